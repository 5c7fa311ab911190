//! Coefficient fields for the experiments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{CoefficientField, StructuredMesh};

pub fn make_constant(mesh: &StructuredMesh, value: f64) -> Result<CoefficientField> {
    CoefficientField::constant(mesh.cell_count(), value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[default]
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Straight high-coefficient bars on a unit background: one bar of
/// `cross_section` cells per transverse axis through the centre of every
/// subdomain column, running the full length of the box along `axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    /// α = 10^exponent inside the channels
    pub exponent: i32,
    pub cross_section: usize,
    #[serde(default)]
    pub axis: Axis,
}

impl ChannelSpec {
    pub fn channel_alpha(&self) -> f64 {
        10f64.powi(self.exponent)
    }
}

pub fn make_channels(mesh: &StructuredMesh, subdomains_per_dim: &[usize], spec: &ChannelSpec) -> Result<CoefficientField> {
    let dim = mesh.dim();
    let cells = mesh.cells_per_dim();
    if subdomains_per_dim.len() != dim {
        return Err(Error::InvalidPartition(format!(
            "expected {dim} subdomain counts, got {}",
            subdomains_per_dim.len()
        )));
    }
    let axis = spec.axis.index();
    if axis >= dim {
        return Err(Error::InvalidCoefficient(format!("channel axis {:?} outside a {dim}D mesh", spec.axis)));
    }
    let mut block = [0usize; 3];
    for d in 0..dim {
        if subdomains_per_dim[d] == 0 || !cells[d].is_multiple_of(subdomains_per_dim[d]) {
            return Err(Error::InvalidPartition(format!(
                "{} subdomains do not divide {} cells along axis {d}",
                subdomains_per_dim[d], cells[d]
            )));
        }
        block[d] = cells[d] / subdomains_per_dim[d];
        if d != axis && (spec.cross_section == 0 || spec.cross_section > block[d]) {
            return Err(Error::InvalidCoefficient(format!(
                "channel cross-section {} does not fit subdomain width {} along axis {d}",
                spec.cross_section, block[d]
            )));
        }
    }
    let hi = spec.channel_alpha();
    let in_channel = |g: [usize; 3]| {
        (0..dim).filter(|&d| d != axis).all(|d| {
            let start = (block[d] - spec.cross_section) / 2;
            let local = g[d] % block[d];
            (start..start + spec.cross_section).contains(&local)
        })
    };
    let alpha = (0..mesh.cell_count())
        .map(|c| if in_channel(mesh.cell_coords(c)) { hi } else { 1.0 })
        .collect();
    CoefficientField::new(alpha)
}
