//! Frame description documents (JSON).
//!
//! ```json
//! {
//!   "m": {"s": 2},
//!   "M": ["a"],
//!   "types": ["<e1>", "<<e1>>"],
//!   "kind": "custom",
//!   "relations": {"<e1>": "full", "<<e1>>": "symmetric", "<e2>": ["{}", "{a}"]},
//!   "denotation": {"P^<e1>": "{#1}"},
//!   "valuation": {"x^e1": "#2"}
//! }
//! ```
//!
//! `relations` applies to custom frames only; each entry is `"full"`,
//! `"symmetric"` or the exact list of relations. Types of the frame are the
//! listed ones, those of `relations`, denotation and valuation keys, and all
//! their components. A structured search report with a `witness` member is
//! accepted in place of a description and loads that witness.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::lang::{parse_term, parse_type, Term, TypeExpr};
use crate::qset::Species;

use super::eval::{Interpretation, Valuation};
use super::frame::{build_frame, DomainSpec, Frame, FrameKind, FrameSpec, DEFAULT_DOMAIN_BUDGET};
use super::value::Value;
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDesc {
    pub m: BTreeMap<String, usize>,
    #[serde(rename = "M")]
    pub classical: Vec<String>,
    #[serde(default)]
    pub types: Vec<String>,
    pub kind: FrameKind,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub relations: BTreeMap<String, RelationsDesc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub denotation: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub valuation: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelationsDesc {
    Mode(String),
    Listed(Vec<String>),
}

/// A frame with an interpretation and valuation read from a description.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub frame: Arc<Frame>,
    pub interpretation: Interpretation,
    pub valuation: Valuation,
}

fn bad(msg: impl Into<String>) -> ModelError {
    ModelError::Desc(msg.into())
}

fn ty(s: &str) -> Result<TypeExpr, ModelError> {
    parse_type(s).map_err(|e| bad(format!("type `{s}`: {e}")))
}

fn term(s: &str) -> Result<Term, ModelError> {
    parse_term(s).map_err(|e| bad(format!("term `{s}`: {e}")))
}

fn value(s: &str) -> Result<Value, ModelError> {
    s.parse()
}

impl FrameDesc {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let inner = match raw.get("witness") {
            Some(w) if w.is_object() => w.clone(),
            Some(_) => return Err(bad("report has no witness to load")),
            None => raw,
        };
        serde_json::from_value(inner).map_err(|e| bad(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn spec(&self, budget: usize) -> Result<FrameSpec, ModelError> {
        let mut spec = FrameSpec::new(0, 0, self.kind).with_budget(budget);
        spec.species = self.m.iter().map(|(s, &n)| (Species::new(s), n)).collect();
        spec.classical = self.classical.clone();
        for t in &self.types {
            spec.types.insert(ty(t)?);
        }
        for key in self.denotation.keys().chain(self.valuation.keys()) {
            spec.types.insert(term(key)?.ty);
        }
        for (t, r) in &self.relations {
            if self.kind != FrameKind::Custom {
                return Err(bad("`relations` is only allowed in custom frames"));
            }
            let t = ty(t)?;
            if t.components().is_none() {
                return Err(bad(format!("{t} is not a relation type")));
            }
            let ds = match r {
                RelationsDesc::Mode(m) if m == "full" => DomainSpec::Full,
                RelationsDesc::Mode(m) if m == "symmetric" => DomainSpec::Symmetric,
                RelationsDesc::Mode(m) => return Err(bad(format!("unknown relation mode `{m}`"))),
                RelationsDesc::Listed(vs) => DomainSpec::Listed(vs.iter().map(|v| value(v)).collect::<Result<_, _>>()?),
            };
            spec.domains.insert(t.clone(), ds);
            spec.types.insert(t);
        }
        Ok(spec)
    }

    pub fn load(&self) -> Result<Loaded, ModelError> {
        self.load_with_budget(DEFAULT_DOMAIN_BUDGET)
    }

    pub fn load_with_budget(&self, budget: usize) -> Result<Loaded, ModelError> {
        self.load_with_types(&BTreeSet::new(), budget)
    }

    /// Loads the frame extended by `types` and their components, so that a
    /// formula over those types can be evaluated in it.
    pub fn load_with_types(&self, types: &BTreeSet<TypeExpr>, budget: usize) -> Result<Loaded, ModelError> {
        let frame = Arc::new(build_frame(&self.spec(budget)?.with_types(types))?);
        let mut interpretation = Interpretation::new(frame.clone());
        for (k, v) in &self.denotation {
            let t = term(k)?;
            let c = Term::constant(&t.name, t.ty);
            interpretation.assign(&c, &value(v)?)?;
        }
        let mut valuation = Valuation::new();
        for (k, v) in &self.valuation {
            valuation.set(&frame, &term(k)?, &value(v)?)?;
        }
        Ok(Loaded {
            frame,
            interpretation,
            valuation,
        })
    }

    /// Describes an interpretation and valuation so that loading the result
    /// reproduces them.
    pub fn describe(i: &Interpretation, v: &Valuation) -> Result<Self, ModelError> {
        let frame = i.frame();
        let mut relations = BTreeMap::new();
        let mut types = Vec::new();
        for t in frame.types() {
            if t.components().is_none() {
                continue;
            }
            types.push(t.to_string());
            if frame.kind() == FrameKind::Custom {
                let r = match frame.domain_spec(t)? {
                    DomainSpec::Full => RelationsDesc::Mode("full".into()),
                    DomainSpec::Symmetric => RelationsDesc::Mode("symmetric".into()),
                    DomainSpec::Listed(_) => RelationsDesc::Listed(
                        (0..frame.domain_size(t)?)
                            .map(|e| frame.value(t, e).map(|x| x.to_string()))
                            .collect::<Result<_, _>>()?,
                    ),
                };
                relations.insert(t.to_string(), r);
            }
        }
        let mut m: BTreeMap<String, usize> = frame.species().iter().map(|(s, n)| (s.name().to_string(), *n)).collect();
        if m.is_empty() {
            m.insert("s".into(), 0);
        }
        let denotation = i
            .constants()
            .map(|c| Ok((c.to_string(), i.denotation(c).ok_or_else(|| bad("bad denotation"))?.to_string())))
            .collect::<Result<_, ModelError>>()?;
        let valuation = v
            .terms()
            .map(|t| Ok((t.to_string(), v.get(frame, t).ok_or_else(|| bad("bad valuation"))?.to_string())))
            .collect::<Result<_, ModelError>>()?;
        Ok(FrameDesc {
            m,
            classical: frame.classical().to_vec(),
            types,
            kind: frame.kind(),
            relations,
            denotation,
            valuation,
        })
    }
}
