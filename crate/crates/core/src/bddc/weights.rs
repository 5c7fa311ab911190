use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::CoefficientField;
use crate::partition::{MembershipSets, PartitionPair};

/// How duplicated interface values are averaged back to a continuous
/// function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WeightingMode {
    /// Fraction of the subsubdomains containing ξ that belong to Ω_i.
    Cardinality,
    /// Plain multiplicity over Θ: `1 / #{i : Ω_i ∋ ξ}`.
    Counting,
    /// Cardinality with each subsubdomain weighted by its (constant) α.
    CoefficientScaled,
}

impl FromStr for WeightingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cardinality" => Ok(WeightingMode::Cardinality),
            "counting" => Ok(WeightingMode::Counting),
            "coefficient" | "coefficient-scaled" => Ok(WeightingMode::CoefficientScaled),
            _ => Err(Error::Config(format!("unknown weighting mode \"{s}\""))),
        }
    }
}

impl TryFrom<String> for WeightingMode {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WeightingMode> for String {
    fn from(w: WeightingMode) -> String {
        w.to_string()
    }
}

impl fmt::Display for WeightingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightingMode::Cardinality => "cardinality",
            WeightingMode::Counting => "counting",
            WeightingMode::CoefficientScaled => "coefficient",
        })
    }
}

/// Per-DOF weights `δ†_i(ξ)` for every subdomain `i` whose closure holds an
/// interface DOF ξ. DOFs interior to one subdomain have no entry (weight 1).
#[derive(Debug, Clone)]
pub struct WeightingOperator {
    mode: WeightingMode,
    entries: Vec<Vec<(usize, f64)>>,
}

impl WeightingOperator {
    pub fn mode(&self) -> WeightingMode {
        self.mode
    }

    pub fn dof_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_interface(&self, dof: usize) -> bool {
        !self.entries[dof].is_empty()
    }

    /// `(subdomain, weight)` pairs for an interface DOF; empty otherwise.
    pub fn entries(&self, dof: usize) -> &[(usize, f64)] {
        &self.entries[dof]
    }

    /// Weight of `subdomain` at `dof`; 1 for interior DOFs, 0 if the
    /// subdomain does not contain the DOF.
    pub fn weight(&self, subdomain: usize, dof: usize) -> f64 {
        if self.entries[dof].is_empty() {
            return 1.0;
        }
        self.entries[dof]
            .iter()
            .find(|(i, _)| *i == subdomain)
            .map_or(0.0, |(_, w)| *w)
    }
}

/// The α value of every subsubdomain; errors if α varies inside one.
pub fn subsubdomain_alpha(pair: &PartitionPair, coeff: &CoefficientField) -> Result<Vec<f64>> {
    let mut alpha = vec![f64::NAN; pair.subsubdomain_count()];
    for (c, &j) in pair.theta_hat().parts().iter().enumerate() {
        let a = coeff.get(c);
        if alpha[j].is_nan() {
            alpha[j] = a;
        } else if alpha[j] != a {
            return Err(Error::InvalidCoefficient(format!(
                "coefficient varies inside subsubdomain {j} ({} vs {a})",
                alpha[j]
            )));
        }
    }
    Ok(alpha)
}

pub fn compute_weights(
    pair: &PartitionPair,
    membership: &MembershipSets,
    mode: WeightingMode,
    coeff: Option<&CoefficientField>,
) -> Result<WeightingOperator> {
    let alpha = match mode {
        WeightingMode::CoefficientScaled => {
            let coeff = coeff.ok_or_else(|| {
                Error::InvalidCoefficient("coefficient-scaled weighting needs a coefficient field".into())
            })?;
            Some(subsubdomain_alpha(pair, coeff)?)
        }
        _ => None,
    };
    let entries = (0..membership.dof_count())
        .map(|dof| {
            let subs = &membership.on_gamma[dof];
            if subs.len() < 2 {
                return Vec::new();
            }
            let hat = &membership.on_gamma_hat[dof];
            subs.iter()
                .map(|&i| {
                    let w = match mode {
                        WeightingMode::Counting => 1.0 / subs.len() as f64,
                        WeightingMode::Cardinality => {
                            let own = hat.iter().filter(|&&j| pair.parent(j) == i).count();
                            own as f64 / hat.len() as f64
                        }
                        WeightingMode::CoefficientScaled => {
                            let alpha = alpha.as_ref().expect("alpha computed above");
                            let own: f64 = hat.iter().filter(|&&j| pair.parent(j) == i).map(|&j| alpha[j]).sum();
                            let all: f64 = hat.iter().map(|&j| alpha[j]).sum();
                            own / all
                        }
                    };
                    (i, w)
                })
                .collect()
        })
        .collect();
    Ok(WeightingOperator { mode, entries })
}
