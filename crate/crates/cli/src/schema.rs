//! Instance files. JSON with a `kind` tag; unknown fields are rejected.
//!
//! Abelian types are descending exponent lists (`[2, 1]` is `Z/p^2 ⊕ Z/p`, `[]` the
//! trivial group). Matrices are lists of integer rows, reduced on load.

use ptower_core::descent::{build_group, DeltaGroup, DeltaPreset, DescentInstance, Section, SemidirectGroup, DEFAULT_BUDGET};
use ptower_core::lambda::DistinguishedPoly;
use ptower_core::tower::{ElementaryModule, ElementarySummand, TowerInstance, TowerLength};
use ptower_core::{AbelianType, Error, FiniteHModule, LambdaElement, ModMatrix, RingParams};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceFile {
    Tower(TowerFile),
    Elementary(ElementaryFile),
    Descent(DescentFile),
    Observed(ObservedFile),
}

/// `X̄` with `σ` and the generators of `C̄`; `d` absent means `H ≅ Z_p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerFile {
    pub p: u64,
    pub exponents: Vec<u32>,
    pub sigma: Vec<Vec<i64>>,
    pub c_bar: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementaryFile {
    pub p: u64,
    /// Precision the polynomial coefficients are read at.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    pub summands: Vec<SummandFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SummandFile {
    /// `Λ/(p^mu)`.
    PPower { mu: u32 },
    /// `Λ/(P^power)`, coefficients of `P` low to high.
    Distinguished {
        coeffs: Vec<i64>,
        #[serde(default = "one")]
        power: u32,
    },
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum DeltaFile {
    Preset {
        preset: String,
    },
    Table {
        table: Vec<Vec<usize>>,
        /// `δ h δ^{-1} = h^{chi[δ]}`.
        chi: Vec<u64>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionFile {
    pub delta_subgroup: Vec<usize>,
    pub a: Vec<i64>,
    pub b: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentFile {
    pub p: u64,
    pub d: u32,
    pub delta: DeltaFile,
    pub exponents: Vec<u32>,
    pub sigma: Vec<Vec<i64>>,
    /// One matrix per element of `Δ`, in table order.
    pub tau: Vec<Vec<Vec<i64>>>,
    pub sections: Vec<SectionFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservedLevel {
    pub n: u32,
    #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<u64>,
}

/// Class groups known from outside, e.g. from tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservedFile {
    pub p: u64,
    pub levels: Vec<ObservedLevel>,
    #[serde(default)]
    pub ramhyp: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read instance file: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema error: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(#[from] Error),
    #[error("{0}")]
    Other(String),
}

pub fn parse(text: &str) -> Result<InstanceFile, LoadError> {
    Ok(serde_json::from_str(text)?)
}

pub fn read(path: &std::path::Path) -> Result<InstanceFile, LoadError> {
    parse(&std::fs::read_to_string(path)?)
}

fn module(p: u64, exponents: &[u32], sigma: &[Vec<i64>]) -> Result<FiniteHModule, Error> {
    if exponents.is_empty() {
        return FiniteHModule::trivial(p);
    }
    FiniteHModule::new(p, exponents, sigma)
}

impl TowerFile {
    pub fn load(&self) -> Result<TowerInstance, Error> {
        let m = module(self.p, &self.exponents, &self.sigma)?;
        let gens = self.c_bar.iter().map(|g| m.reduce_i64(g)).collect::<Result<Vec<_>, _>>()?;
        let c = m.span(&gens)?;
        let length = self.d.map_or(TowerLength::Unbounded, TowerLength::Finite);
        TowerInstance::new(m, c, length)
    }

    pub fn from_instance(inst: &TowerInstance) -> Self {
        let m = inst.module();
        TowerFile {
            p: m.p(),
            exponents: m.exponents().to_vec(),
            sigma: matrix_rows(m.sigma()),
            c_bar: inst.c_bar().generators().iter().map(|g| to_i64(g)).collect(),
            d: match inst.length() {
                TowerLength::Finite(d) => Some(d),
                TowerLength::Unbounded => None,
            },
        }
    }
}

fn to_i64(v: &[u64]) -> Vec<i64> {
    v.iter().map(|&c| c as i64).collect()
}

fn matrix_rows(m: &ModMatrix) -> Vec<Vec<i64>> {
    m.to_rows().iter().map(|r| to_i64(r)).collect()
}

impl ElementaryFile {
    pub fn load(&self) -> Result<ElementaryModule, Error> {
        let prec = self.precision.unwrap_or(16).min(RingParams::max_precision(self.p));
        let pr = RingParams::new(self.p, prec)?;
        let summands = self
            .summands
            .iter()
            .map(|s| match s {
                SummandFile::PPower { mu } => Ok(ElementarySummand::PPower { mu: *mu }),
                SummandFile::Distinguished { coeffs, power } => Ok(ElementarySummand::Distinguished {
                    poly: DistinguishedPoly::new(LambdaElement::from_i64(pr, coeffs))?,
                    power: *power,
                }),
            })
            .collect::<Result<Vec<_>, Error>>()?;
        ElementaryModule::new(self.p, summands)
    }
}

impl DescentFile {
    pub fn load(&self, budget_override: Option<u64>) -> Result<DescentInstance, LoadError> {
        let g = match &self.delta {
            DeltaFile::Preset { preset } => {
                let preset = DeltaPreset::from_name(preset)
                    .ok_or_else(|| LoadError::Other(format!("unknown Δ preset {preset:?}")))?;
                SemidirectGroup::from_preset(self.p, self.d, preset)?
            }
            DeltaFile::Table { table, chi } => {
                let flat: Vec<usize> = table.iter().flatten().copied().collect();
                if table.iter().any(|r| r.len() != table.len()) {
                    return Err(Error::InvalidGroupTable("table must be square").into());
                }
                SemidirectGroup::new(self.p, self.d, DeltaGroup::from_table(table.len(), flat)?, chi.clone())?
            }
        };
        let m = module(self.p, &self.exponents, &self.sigma)?;
        let tau = self
            .tau
            .iter()
            .map(|t| {
                if m.rank() == 0 {
                    Ok(ModMatrix::zero(m.params(), 0, 0))
                } else {
                    ModMatrix::from_rows(m.params(), t)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let budget = budget_override.or(self.budget).unwrap_or(DEFAULT_BUDGET);
        let group = build_group(g, m.clone(), tau, budget)?;
        let sections = self
            .sections
            .iter()
            .map(|s| {
                Ok(Section {
                    delta_subgroup: s.delta_subgroup.clone(),
                    a: m.reduce_i64(&s.a)?,
                    b: s.b.iter().map(|b| m.reduce_i64(b)).collect::<Result<Vec<_>, Error>>()?,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(DescentInstance::new(group, sections)?)
    }

    pub fn from_instance(inst: &DescentInstance) -> Self {
        let grp = inst.group();
        let g = grp.group();
        let delta = g.delta();
        let m = inst.module();
        DescentFile {
            p: m.p(),
            d: g.d(),
            delta: DeltaFile::Table {
                table: (0..delta.order()).map(|a| (0..delta.order()).map(|b| delta.mul(a, b)).collect()).collect(),
                chi: g.chi().to_vec(),
            },
            exponents: m.exponents().to_vec(),
            sigma: matrix_rows(m.sigma()),
            tau: grp.tau().iter().map(matrix_rows).collect(),
            sections: inst
                .sections()
                .iter()
                .map(|s| SectionFile {
                    delta_subgroup: s.delta_subgroup.clone(),
                    a: to_i64(&s.a),
                    b: s.b.iter().map(|b| to_i64(b)).collect(),
                })
                .collect(),
            budget: None,
        }
    }
}

impl ObservedFile {
    pub fn level(&self, n: u32) -> Option<Observation> {
        let l = self.levels.iter().find(|l| l.n == n)?;
        match (&l.group, l.e) {
            (Some(t), _) => Some(Observation::Group(AbelianType::from_exponents(t.iter().copied()))),
            (None, Some(e)) => Some(Observation::Order(e)),
            (None, None) => None,
        }
    }

    pub fn validate(&self) -> Result<(), LoadError> {
        let mut ns: Vec<u32> = self.levels.iter().map(|l| l.n).collect();
        ns.sort_unstable();
        if ns.iter().enumerate().any(|(i, &n)| n != i as u32) {
            return Err(LoadError::Other("observed levels must be distinct and contiguous from 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Observation {
    Group(AbelianType),
    /// Only `log_p |A_n|` is known.
    Order(u64),
}
