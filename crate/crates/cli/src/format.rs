//! Instance files: a JSON envelope `{"kind", "version", "payload"}` in which
//! every integer is a decimal string.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use instakernel::exactmath::Matrix;
use instakernel::ilpcore::FeasIlp;
use instakernel::ilpreduce::{NFoldIlp, TwoStageIlp};
use instakernel::knapfam::{
    KnapsackInstance, MdKnapsackInstance, SubsetSumInstance, UnboundedKnapsackInstance,
};
use instakernel::schedbal::{LoadBalancingInstance, PreSolution};
use instakernel::{Int, IntMatrix};
use num_traits::{ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

pub const VERSION: u64 = 1;

/// An arbitrary-precision integer written as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dec(pub Int);

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct DecVisitor;
        impl Visitor<'_> for DecVisitor {
            type Value = Dec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer as a decimal string")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Dec, E> {
                parse_int(v).map(Dec).map_err(E::custom)
            }
        }
        d.deserialize_str(DecVisitor)
    }
}

/// Optional sign followed by ASCII digits.
pub fn parse_int(s: &str) -> Result<Int> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        bail!("{s:?} is not a decimal integer");
    }
    Ok(Int::from_str(s)?)
}

fn dec(v: &[Int]) -> Vec<Dec> {
    v.iter().cloned().map(Dec).collect()
}

fn undec(v: Vec<Dec>) -> Vec<Int> {
    v.into_iter().map(|d| d.0).collect()
}

fn dec_matrix(m: &IntMatrix) -> Vec<Vec<Dec>> {
    m.to_rows().iter().map(|r| dec(r)).collect()
}

fn undec_matrix(rows: Vec<Vec<Dec>>, cols: usize) -> Result<IntMatrix> {
    Ok(Matrix::from_rows_with_cols(
        rows.into_iter().map(undec).collect(),
        cols,
    )?)
}

fn width(rows: &[Vec<Dec>]) -> usize {
    rows.first().map_or(0, Vec::len)
}

fn count(d: &Dec, what: &str) -> Result<usize> {
    d.0.to_usize()
        .with_context(|| format!("{what} {} is not a valid index", d.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Ilp,
    TwoStage,
    Nfold,
    Knapsack,
    Subsetsum,
    Uks,
    Mdks,
    Loadbalance,
    Presolution,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        let s = serde_json::to_value(self).expect("kind serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    kind: Kind,
    version: u64,
    payload: Value,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IlpPayload {
    a: Vec<Vec<Dec>>,
    b: Vec<Dec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lower: Option<Vec<Dec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<Vec<Dec>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoStagePayload {
    a: Vec<Vec<Vec<Dec>>>,
    b: Vec<Vec<Vec<Dec>>>,
    rhs: Vec<Vec<Dec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<Dec>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NFoldPayload {
    a: Vec<Vec<Vec<Dec>>>,
    b: Vec<Vec<Vec<Dec>>>,
    link_rhs: Vec<Dec>,
    block_rhs: Vec<Vec<Dec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bound: Option<Dec>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KnapsackPayload {
    weights: Vec<Dec>,
    profits: Vec<Dec>,
    capacity: Dec,
    target: Dec,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubsetSumPayload {
    values: Vec<Dec>,
    target: Dec,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MdksPayload {
    weights: Vec<Vec<Dec>>,
    profits: Vec<Dec>,
    capacities: Vec<Dec>,
    target: Dec,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoadBalancePayload {
    p: Vec<Dec>,
    n: Vec<Dec>,
    m: Dec,
    l: Dec,
    u: Dec,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupPayload {
    machines: Dec,
    configuration: Vec<Dec>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CopyPayload {
    item: Dec,
    power: Dec,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "for", rename_all = "snake_case", deny_unknown_fields)]
enum PrePayload {
    Ilp {
        fixed: Vec<Dec>,
    },
    Uks {
        copies: Vec<CopyPayload>,
    },
    Loadbalance {
        per_machine: Vec<Dec>,
        fixed: Vec<GroupPayload>,
    },
}

/// A block-structured ILP with an optional uniform upper bound on every
/// variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounded<T> {
    pub ilp: T,
    pub bound: Option<Int>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Ilp(FeasIlp),
    TwoStage(Bounded<TwoStageIlp>),
    NFold(Bounded<NFoldIlp>),
    Knapsack(KnapsackInstance),
    SubsetSum(SubsetSumInstance),
    Uks(UnboundedKnapsackInstance),
    Mdks(MdKnapsackInstance),
    LoadBalance(LoadBalancingInstance),
}

/// What the reduced instance needs on top of its own solutions to give
/// back a solution of the original.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PreSol {
    /// `x = fixed + x′`.
    Kernel(Vec<Int>),
    /// `(item, j)` per 0-1 copy, standing for `2^j` units of the item.
    Copies(Vec<(usize, u32)>),
    Schedule(PreSolution),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Instance(Instance),
    Pre(PreSol),
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self {
            Instance::Ilp(_) => Kind::Ilp,
            Instance::TwoStage(_) => Kind::TwoStage,
            Instance::NFold(_) => Kind::Nfold,
            Instance::Knapsack(_) => Kind::Knapsack,
            Instance::SubsetSum(_) => Kind::Subsetsum,
            Instance::Uks(_) => Kind::Uks,
            Instance::Mdks(_) => Kind::Mdks,
            Instance::LoadBalance(_) => Kind::Loadbalance,
        }
    }
}

fn matrices(ms: &[IntMatrix]) -> Vec<Vec<Vec<Dec>>> {
    ms.iter().map(dec_matrix).collect()
}

fn unmatrices(ms: Vec<Vec<Vec<Dec>>>) -> Result<Vec<IntMatrix>> {
    ms.into_iter()
        .map(|m| {
            let w = width(&m);
            undec_matrix(m, w)
        })
        .collect()
}

fn instance_payload(inst: &Instance) -> Result<Value> {
    Ok(match inst {
        Instance::Ilp(ilp) => serde_json::to_value(IlpPayload {
            a: dec_matrix(&ilp.a),
            b: dec(&ilp.b),
            lower: Some(dec(&ilp.lower)),
            upper: ilp.upper.as_deref().map(dec),
        })?,
        Instance::TwoStage(t) => serde_json::to_value(TwoStagePayload {
            a: matrices(&t.ilp.a),
            b: matrices(&t.ilp.b),
            rhs: t.ilp.rhs.iter().map(|r| dec(r)).collect(),
            bound: t.bound.clone().map(Dec),
        })?,
        Instance::NFold(t) => serde_json::to_value(NFoldPayload {
            a: matrices(&t.ilp.a),
            b: matrices(&t.ilp.b),
            link_rhs: dec(&t.ilp.link_rhs),
            block_rhs: t.ilp.block_rhs.iter().map(|r| dec(r)).collect(),
            bound: t.bound.clone().map(Dec),
        })?,
        Instance::Knapsack(k) => serde_json::to_value(KnapsackPayload {
            weights: dec(&k.weights),
            profits: dec(&k.profits),
            capacity: Dec(k.capacity.clone()),
            target: Dec(k.target.clone()),
        })?,
        Instance::Uks(k) => serde_json::to_value(KnapsackPayload {
            weights: dec(&k.weights),
            profits: dec(&k.profits),
            capacity: Dec(k.capacity.clone()),
            target: Dec(k.target.clone()),
        })?,
        Instance::SubsetSum(s) => serde_json::to_value(SubsetSumPayload {
            values: dec(&s.values),
            target: Dec(s.target.clone()),
        })?,
        Instance::Mdks(k) => serde_json::to_value(MdksPayload {
            weights: dec_matrix(&k.weight_matrix),
            profits: dec(&k.profits),
            capacities: dec(&k.capacities),
            target: Dec(k.target.clone()),
        })?,
        Instance::LoadBalance(lb) => serde_json::to_value(LoadBalancePayload {
            p: dec(&lb.p),
            n: dec(&lb.n),
            m: Dec(lb.m.clone()),
            l: Dec(lb.l.clone()),
            u: Dec(lb.u.clone()),
        })?,
    })
}

fn pre_payload(pre: &PreSol) -> Result<Value> {
    let p = match pre {
        PreSol::Kernel(fixed) => PrePayload::Ilp { fixed: dec(fixed) },
        PreSol::Copies(copies) => PrePayload::Uks {
            copies: copies
                .iter()
                .map(|&(i, j)| CopyPayload {
                    item: Dec(Int::from(i)),
                    power: Dec(Int::from(j)),
                })
                .collect(),
        },
        PreSol::Schedule(pre) => PrePayload::Loadbalance {
            per_machine: dec(&pre.per_machine),
            fixed: pre
                .fixed
                .iter()
                .map(|(k, c)| GroupPayload {
                    machines: Dec(k.clone()),
                    configuration: dec(c),
                })
                .collect(),
        },
    };
    Ok(serde_json::to_value(p)?)
}

fn parse_payload<T: serde::de::DeserializeOwned>(kind: Kind, v: Value) -> Result<T> {
    serde_json::from_value(v).with_context(|| format!("malformed {kind} payload"))
}

fn instance_from(kind: Kind, v: Value) -> Result<Instance> {
    Ok(match kind {
        Kind::Ilp => {
            let p: IlpPayload = parse_payload(kind, v)?;
            let n = match (&p.lower, &p.upper) {
                (Some(l), _) => l.len(),
                (None, Some(u)) => u.len(),
                (None, None) => width(&p.a),
            };
            let ilp = FeasIlp {
                a: undec_matrix(p.a, n)?,
                b: undec(p.b),
                lower: p.lower.map_or_else(|| vec![Int::zero(); n], undec),
                upper: p.upper.map(undec),
            };
            ilp.validate()?;
            Instance::Ilp(ilp)
        }
        Kind::TwoStage => {
            let p: TwoStagePayload = parse_payload(kind, v)?;
            let ilp = TwoStageIlp {
                a: unmatrices(p.a)?,
                b: unmatrices(p.b)?,
                rhs: p.rhs.into_iter().map(undec).collect(),
            };
            ilp.shape()?;
            Instance::TwoStage(Bounded {
                ilp,
                bound: p.bound.map(|d| d.0),
            })
        }
        Kind::Nfold => {
            let p: NFoldPayload = parse_payload(kind, v)?;
            let ilp = NFoldIlp {
                a: unmatrices(p.a)?,
                b: unmatrices(p.b)?,
                link_rhs: undec(p.link_rhs),
                block_rhs: p.block_rhs.into_iter().map(undec).collect(),
            };
            ilp.shape()?;
            Instance::NFold(Bounded {
                ilp,
                bound: p.bound.map(|d| d.0),
            })
        }
        Kind::Knapsack | Kind::Uks => {
            let p: KnapsackPayload = parse_payload(kind, v)?;
            let (weights, profits) = (undec(p.weights), undec(p.profits));
            if kind == Kind::Knapsack {
                let k = KnapsackInstance {
                    weights,
                    profits,
                    capacity: p.capacity.0,
                    target: p.target.0,
                };
                k.validate()?;
                Instance::Knapsack(k)
            } else {
                let k = UnboundedKnapsackInstance {
                    weights,
                    profits,
                    capacity: p.capacity.0,
                    target: p.target.0,
                };
                k.validate()?;
                Instance::Uks(k)
            }
        }
        Kind::Subsetsum => {
            let p: SubsetSumPayload = parse_payload(kind, v)?;
            let s = SubsetSumInstance {
                values: undec(p.values),
                target: p.target.0,
            };
            s.validate()?;
            Instance::SubsetSum(s)
        }
        Kind::Mdks => {
            let p: MdksPayload = parse_payload(kind, v)?;
            let n = p.profits.len();
            let k = MdKnapsackInstance {
                weight_matrix: undec_matrix(p.weights, n)?,
                profits: undec(p.profits),
                capacities: undec(p.capacities),
                target: p.target.0,
            };
            k.validate()?;
            Instance::Mdks(k)
        }
        Kind::Loadbalance => {
            let p: LoadBalancePayload = parse_payload(kind, v)?;
            let lb = LoadBalancingInstance {
                p: undec(p.p),
                n: undec(p.n),
                m: p.m.0,
                l: p.l.0,
                u: p.u.0,
            };
            lb.validate()?;
            Instance::LoadBalance(lb)
        }
        Kind::Presolution => unreachable!("handled by the caller"),
    })
}

fn pre_from(v: Value) -> Result<PreSol> {
    Ok(match parse_payload(Kind::Presolution, v)? {
        PrePayload::Ilp { fixed } => PreSol::Kernel(undec(fixed)),
        PrePayload::Uks { copies } => PreSol::Copies(
            copies
                .iter()
                .map(|c| {
                    let j = count(&c.power, "copy power")?;
                    Ok((count(&c.item, "item")?, u32::try_from(j)?))
                })
                .collect::<Result<_>>()?,
        ),
        PrePayload::Loadbalance { per_machine, fixed } => PreSol::Schedule(PreSolution {
            per_machine: undec(per_machine),
            fixed: fixed
                .into_iter()
                .map(|g| (g.machines.0, undec(g.configuration)))
                .collect(),
        }),
    })
}

pub fn to_json(doc: &Document) -> Result<String> {
    let (kind, payload) = match doc {
        Document::Instance(i) => (i.kind(), instance_payload(i)?),
        Document::Pre(p) => (Kind::Presolution, pre_payload(p)?),
    };
    let env = Envelope {
        kind,
        version: VERSION,
        payload,
    };
    let mut s = serde_json::to_string_pretty(&env)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Document> {
    let env: Envelope = serde_json::from_str(text).context("not a valid instance envelope")?;
    if env.version != VERSION {
        bail!("unsupported version {} (expected {VERSION})", env.version);
    }
    Ok(match env.kind {
        Kind::Presolution => Document::Pre(pre_from(env.payload)?),
        kind => Document::Instance(instance_from(kind, env.payload)?),
    })
}

pub fn read_document(path: &Path) -> Result<Document> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    from_json(&text).with_context(|| format!("in {}", path.display()))
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    match read_document(path)? {
        Document::Instance(i) => Ok(i),
        Document::Pre(_) => bail!("{} holds a pre-solution, not an instance", path.display()),
    }
}

pub fn read_pre(path: &Path) -> Result<PreSol> {
    match read_document(path)? {
        Document::Pre(p) => Ok(p),
        Document::Instance(i) => bail!(
            "{} holds a {} instance, not a pre-solution",
            path.display(),
            i.kind()
        ),
    }
}

/// Writes to a temporary file in the target directory, then renames it into
/// place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("cannot create a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

pub fn write_document(path: &Path, doc: &Document) -> Result<()> {
    write_atomic(path, &to_json(doc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use instakernel::{int, ints};

    #[test]
    fn integers_must_be_strings() {
        let bad = r#"{"kind":"subsetsum","version":1,"payload":{"values":[1,2],"target":"3"}}"#;
        assert!(from_json(bad).is_err());
        let good =
            r#"{"kind":"subsetsum","version":1,"payload":{"values":["1","2"],"target":"3"}}"#;
        assert!(from_json(good).is_ok());
        assert!(parse_int("+3").is_err());
        assert!(parse_int("").is_err());
        assert!(parse_int("-").is_err());
        assert_eq!(parse_int("-12").unwrap(), int(-12));
    }

    #[test]
    fn version_and_fields_are_checked() {
        let v2 = r#"{"kind":"subsetsum","version":2,"payload":{"values":["1"],"target":"1"}}"#;
        assert!(from_json(v2).is_err());
        let extra =
            r#"{"kind":"subsetsum","version":1,"payload":{"values":["1"],"target":"1","x":"1"}}"#;
        assert!(from_json(extra).is_err());
    }

    #[test]
    fn loadbalance_layout() {
        let doc = Document::Instance(Instance::LoadBalance(LoadBalancingInstance {
            p: ints(&[2]),
            n: ints(&[6]),
            m: int(3),
            l: int(2),
            u: int(6),
        }));
        let v: Value = serde_json::from_str(&to_json(&doc).unwrap()).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"kind": "loadbalance", "version": 1,
                "payload": {"p": ["2"], "n": ["6"], "m": "3", "l": "2", "u": "6"}})
        );
    }

    #[test]
    fn huge_integers_survive() {
        let big: Int = (Int::from(1) << 300) - 1;
        let doc = Document::Instance(Instance::SubsetSum(SubsetSumInstance {
            values: vec![big.clone(), int(1)],
            target: -big,
        }));
        let text = to_json(&doc).unwrap();
        assert_eq!(from_json(&text).unwrap(), doc);
        assert_eq!(to_json(&from_json(&text).unwrap()).unwrap(), text);
    }
}
