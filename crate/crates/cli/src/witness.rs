//! Witness files: the JSON form of a family tuple plus its measures and provenance.

use std::time::SystemTime;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};
use sperner::lattice::{Family, FamilyTuple, GroundSize, LatticeError, SetMask};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("malformed witness: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("families must be non-empty (family {0} is empty)")]
    EmptyFamily(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Mask,
    Elements,
}

/// One member: a bitmask (`mask` encoding) or a sorted element list (`elements`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Member {
    Mask(u32),
    Elements(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measures {
    pub sum: u64,
    /// Exact integer of any size.
    pub product: Number,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    /// `builder` or `search`.
    pub source: String,
    pub method: String,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(source: &str, method: &str) -> Self {
        Provenance { source: source.into(), method: method.into(), parameters: Map::new(), seed: None }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.into(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Witness {
    pub schema_version: u32,
    pub n: u32,
    pub k: usize,
    pub encoding: Encoding,
    pub families: Vec<Vec<Member>>,
    pub measures: Measures,
    pub provenance: Provenance,
    pub created: String,
}

/// What `verify` found.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Valid {
        sum: u64,
        product: BigUint,
    },
    /// Not cross-Sperner; carries the first violating pair, rendered.
    Violation(String),
    /// Cross-Sperner, but the recorded measures are wrong.
    MeasureMismatch(String),
}

pub fn product_number(p: &BigUint) -> Number {
    serde_json::from_str(&p.to_string()).expect("decimal digits parse as a JSON number")
}

fn now() -> String {
    humantime::format_rfc3339_seconds(SystemTime::now()).to_string()
}

impl Witness {
    /// Canonical witness (mask encoding, canonical family order) for a tuple.
    pub fn from_tuple(t: &FamilyTuple, provenance: Provenance) -> Self {
        let t = t.canonical();
        let families = t.families().iter().map(|f| f.iter().map(|m| Member::Mask(m.bits())).collect()).collect();
        Witness {
            schema_version: SCHEMA_VERSION,
            n: t.ground().get(),
            k: t.k(),
            encoding: Encoding::Mask,
            families,
            measures: Measures { sum: t.sum(), product: product_number(&t.product()) },
            provenance,
            created: now(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, WitnessError> {
        let w: Witness = serde_json::from_str(text)?;
        if w.schema_version != SCHEMA_VERSION {
            return Err(WitnessError::Schema(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                w.schema_version
            )));
        }
        Ok(w)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("witness serializes");
        s.push('\n');
        s
    }

    /// Decodes the families; checks shape but not the cross-Sperner property.
    pub fn tuple(&self) -> Result<FamilyTuple, WitnessError> {
        let g = GroundSize::new(self.n)?;
        if self.families.len() != self.k {
            return Err(WitnessError::Schema(format!("k = {} but {} families listed", self.k, self.families.len())));
        }
        if self.k < 2 {
            return Err(WitnessError::Schema(format!("need k >= 2 families, got {}", self.k)));
        }
        let mut fams = Vec::with_capacity(self.k);
        for (i, members) in self.families.iter().enumerate() {
            if members.is_empty() {
                return Err(WitnessError::EmptyFamily(i + 1));
            }
            let mut f = Family::empty(g);
            for m in members {
                let mask = match (self.encoding, m) {
                    (Encoding::Mask, Member::Mask(x)) => {
                        let x = SetMask(*x);
                        if !x.fits(g) {
                            return Err(LatticeError::MaskOutOfRange { mask: x.bits(), n: self.n }.into());
                        }
                        x
                    }
                    (Encoding::Elements, Member::Elements(es)) => {
                        if es.windows(2).any(|w| w[0] >= w[1]) {
                            return Err(WitnessError::Schema(format!("element list {es:?} is not strictly ascending")));
                        }
                        SetMask::from_elements(g, es.iter().copied())?
                    }
                    (enc, _) => {
                        return Err(WitnessError::Schema(format!(
                            "family {} has a member not in {:?} encoding",
                            i + 1,
                            enc
                        )))
                    }
                };
                if !f.insert(mask) {
                    return Err(WitnessError::Schema(format!("family {} lists {mask} twice", i + 1)));
                }
            }
            fams.push(f);
        }
        Ok(FamilyTuple::new(fams)?)
    }

    pub fn verify(&self) -> Result<Verdict, WitnessError> {
        let t = self.tuple()?;
        if let Some(v) = t.violation()? {
            return Ok(Verdict::Violation(v.to_string()));
        }
        let (sum, product) = (t.sum(), t.product());
        if sum != self.measures.sum || product.to_string() != self.measures.product.to_string() {
            return Ok(Verdict::MeasureMismatch(format!(
                "recorded sum {} and product {}, recomputed sum {sum} and product {product}",
                self.measures.sum, self.measures.product
            )));
        }
        Ok(Verdict::Valid { sum, product })
    }
}
