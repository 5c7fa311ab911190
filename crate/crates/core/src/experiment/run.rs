use std::time::Instant;

use super::config::{CoefficientSpec, ExperimentConfig, Preconditioner, SplitSpec};
use super::report::ReportRow;
use crate::bddc::{build_bddc, compute_weights, select_constraints, subsubdomain_alpha, BddcOperator, ConstraintSet, WeightingOperator};
use crate::error::{Error, Result};
use crate::krylov::{pcg, PcgOptions, SolveReport};
use crate::mesh::{assemble, build_mesh, AssembledSystem, CoefficientField, StructuredMesh};
use crate::partition::{
    classify_objects, count_coarse_dofs, partition_uniform, refine_by_coefficient, refine_uniform, InterfaceObject,
    MembershipSets, PartitionPair,
};
use crate::problems::{make_channels, make_constant};

/// Everything built for one configuration, up to the preconditioner.
#[derive(Debug)]
pub struct Pipeline {
    pub mesh: StructuredMesh,
    pub coeff: CoefficientField,
    pub system: AssembledSystem,
    pub pair: PartitionPair,
    pub membership: MembershipSets,
    pub objects: Vec<InterfaceObject>,
    pub constraints: ConstraintSet,
    pub weights: WeightingOperator,
    pub bddc: BddcOperator,
}

impl Pipeline {
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let mesh = build_mesh(config.dim(), &config.cells).map_err(|e| e.in_phase("mesh"))?;
        let coeff = match config.coefficient {
            CoefficientSpec::Constant { value } => make_constant(&mesh, value),
            CoefficientSpec::Channels(spec) => make_channels(&mesh, &config.subdomains, &spec),
        }
        .map_err(|e| e.in_phase("coefficient"))?;
        let pair = partition_pair(config, &mesh, &coeff).map_err(|e| e.in_phase("partition"))?;
        let system = assemble(&mesh, &coeff, 1.0).map_err(|e| e.in_phase("assembly"))?;
        Self::from_parts(config, mesh, coeff, system, pair)
    }

    /// Builds the preconditioner for an already assembled problem.
    pub fn from_parts(
        config: &ExperimentConfig,
        mesh: StructuredMesh,
        coeff: CoefficientField,
        system: AssembledSystem,
        pair: PartitionPair,
    ) -> Result<Self> {
        let membership = MembershipSets::new(&mesh, &pair);
        let objects = classify_objects(&mesh, &pair, &membership);
        let weights = compute_weights(&pair, &membership, config.weighting, Some(&coeff)).map_err(|e| e.in_phase("weights"))?;
        let alpha = subsubdomain_alpha(&pair, &coeff).ok();
        let constraints = select_constraints(&mesh, &pair, &objects, config.recipe, alpha.as_deref())
            .map_err(|e| e.in_phase("constraint selection"))?;
        let bddc = build_bddc(&mesh, &coeff, &system, &pair, &constraints, &weights).map_err(|e| e.in_phase("setup"))?;
        Ok(Pipeline {
            mesh,
            coeff,
            system,
            pair,
            membership,
            objects,
            constraints,
            weights,
            bddc,
        })
    }

    pub fn solve(&self, rhs: &[f64], opts: PcgOptions) -> Result<(Vec<f64>, SolveReport)> {
        pcg(|v| self.system.matrix.matvec(v), |r| self.bddc.apply(r), rhs, opts).map_err(|e| e.in_phase("solve"))
    }
}

fn partition_pair(config: &ExperimentConfig, mesh: &StructuredMesh, coeff: &CoefficientField) -> Result<PartitionPair> {
    let theta = partition_uniform(mesh, &config.subdomains)?;
    match (config.preconditioner, config.split) {
        (Preconditioner::Bddc, _) => PartitionPair::standard(mesh, theta),
        (Preconditioner::BddcSo, SplitSpec::Uniform { s }) => refine_uniform(mesh, &theta, s),
        (Preconditioner::BddcSo, SplitSpec::Coefficient) => refine_by_coefficient(mesh, &theta, coeff),
    }
}

/// Runs one configuration end to end.
pub fn run(config: &ExperimentConfig) -> Result<ReportRow> {
    config.validate()?;
    if config.count_only {
        let s = config.split_factor().ok_or_else(|| Error::Config("count_only needs a uniform split".into()))?;
        let coarse = count_coarse_dofs(&config.subdomains, s, config.recipe)?;
        let dofs: u64 = config.cells.iter().map(|&c| c as u64 - 1).product();
        return Ok(ReportRow::from_config(config, dofs, coarse));
    }
    let start = Instant::now();
    let pipeline = Pipeline::build(config)?;
    let setup_s = start.elapsed().as_secs_f64();
    let opts = PcgOptions {
        tol: config.tol,
        max_iters: config.max_iters,
    };
    let start = Instant::now();
    let (_, report) = pipeline.solve(&pipeline.system.rhs, opts)?;
    let solve_s = start.elapsed().as_secs_f64();

    let mut row = ReportRow::from_config(
        config,
        pipeline.system.dof_count() as u64,
        pipeline.constraints.coarse_count() as u64,
    );
    row.iters = Some(report.iterations);
    row.kappa = Some(report.kappa_estimate);
    row.setup_s = Some(setup_s);
    row.solve_s = Some(solve_s);
    row.converged = report.converged;
    Ok(row)
}

pub fn run_all(configs: &[ExperimentConfig]) -> Result<Vec<ReportRow>> {
    configs.iter().map(run).collect()
}
