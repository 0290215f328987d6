//! One function per subcommand, each turning a scenario into a report.

use mmd_core::algebra::{algebra_distance, center, is_factor, sector_decompose, MatrixStarAlgebra};
use mmd_core::amplifier::{Amplifier, Branch, CascadeConfig};
use mmd_core::crossed::{
    alpha_w_equivalence, build_heisenberg, build_schrodinger, coupled_center, uncoupled_tensor,
};
use mmd_core::group::{DualGroup, FiniteAbelianGroup};
use mmd_core::instrument::Instrument;
use mmd_core::kt::verify_relations;
use mmd_core::linalg::{CMatrix, C64};
use mmd_core::rep::UnitaryRep;
use mmd_core::ssb::{sector_bundle, ssb_checks, SubgroupSpec};
use mmd_core::Error;
use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};
use crate::report::{Check, Report, ScenarioEcho, Table};
use crate::scenario::{to_pairs, to_rows, CascadePath, Scenario};

pub const PROBABILITY_TOL: f64 = 1e-10;
pub const CASCADE_TOL: f64 = 1e-9;
pub const ALGEBRA_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub seed: u64,
    pub max_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Verify,
    Measure,
    Amplify,
    Sectors,
    Crossed,
    Ssb,
    Suite,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Measure => "measure",
            Command::Amplify => "amplify",
            Command::Sectors => "sectors",
            Command::Crossed => "crossed",
            Command::Ssb => "ssb",
            Command::Suite => "suite",
        }
    }
}

/// Runs a single-scenario command.
pub fn execute(command: Command, scenario: &Scenario, ctx: Context) -> Result<Report> {
    match command {
        Command::Verify => verify(scenario, ctx),
        Command::Measure => measure(scenario, ctx),
        Command::Amplify => amplify(scenario, ctx),
        Command::Sectors => sectors(scenario, ctx),
        Command::Crossed => crossed(scenario, ctx),
        Command::Ssb => ssb(scenario, ctx),
        Command::Suite => crate::suite::run_suite(ctx),
    }
}

fn echo(s: &Scenario) -> ScenarioEcho {
    ScenarioEcho {
        name: s.name.clone(),
        group_orders: s.group_orders.clone(),
    }
}

fn rep_of(s: &Scenario) -> Result<(FiniteAbelianGroup, UnitaryRep)> {
    let group = s.group()?;
    let rep = s.representation(&group)?;
    Ok((group, rep))
}

fn label(dual: &DualGroup, gamma: usize) -> String {
    if gamma == dual.trivial() {
        return "ι".to_string();
    }
    let parts: Vec<String> = dual.label(gamma).iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

fn sci(x: f64) -> String {
    format!("{x:e}")
}

pub fn verify(s: &Scenario, ctx: Context) -> Result<Report> {
    let (_, rep) = rep_of(s)?;
    let relations = verify_relations(&rep, ctx.seed).map_err(|e| CliError::core_at("/rep", e))?;
    let mut table = Table::new(&["relation", "residual", "tolerance", "pass"]);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for r in &relations {
        checks.push(Check::at_most(r.relation.clone(), r.residual, r.tolerance));
        table.push(vec![
            r.relation.clone(),
            sci(r.residual),
            sci(r.tolerance),
            r.pass.to_string(),
        ]);
        rows.push(json!({"relation": r.relation, "residual": r.residual, "pass": r.pass}));
    }
    Ok(Report::new(
        "verify",
        echo(s),
        ctx.seed,
        checks,
        json!({ "relations": rows }),
        table,
    ))
}

pub fn measure(s: &Scenario, ctx: Context) -> Result<Report> {
    let (group, rep) = rep_of(s)?;
    let dual = group.dual();
    let omega = s.density_state(rep.dim())?;
    let inst =
        Instrument::on_full_system(&rep, ctx.seed).map_err(|e| CliError::core_at("/rep", e))?;
    let support = inst.support().to_vec();

    let sets: Vec<(String, Vec<usize>)> = match &s.outcome_sets {
        Some(sets) => sets
            .iter()
            .enumerate()
            .map(|(i, set)| {
                let chars = set
                    .characters
                    .iter()
                    .enumerate()
                    .map(|(j, t)| {
                        dual.index_of(t).map_err(|e| {
                            CliError::core_at(&format!("/outcome_sets/{i}/characters/{j}"), e)
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((set.label.clone(), chars))
            })
            .collect::<Result<_>>()?,
        None => support
            .iter()
            .map(|&chi| (label(&dual, chi), vec![chi]))
            .collect(),
    };
    let mut seen = std::collections::BTreeSet::new();
    for (i, (name, _)) in sets.iter().enumerate() {
        if !seen.insert(name.clone()) {
            return Err(CliError::at(
                format!("/outcome_sets/{i}/label"),
                format!("duplicate label {name}"),
            ));
        }
    }

    let rho = omega.matrix();
    let dim = rep.dim();
    let mut probabilities = Map::new();
    let mut posteriors = Vec::new();
    let mut checks = Vec::new();
    let mut table = Table::new(&["label", "probability"]);
    for (name, chars) in &sets {
        // characters outside the spectral support carry no weight
        let delta: Vec<usize> = chars
            .iter()
            .copied()
            .filter(|c| support.contains(c))
            .collect();
        let effect = delta.iter().fold(CMatrix::zeros(dim, dim), |acc, &chi| {
            acc + inst.measure().projection(chi)
        });
        let born = (rho * &effect).trace().re;
        let p = if delta.is_empty() {
            0.0
        } else {
            inst.probability(&omega, &delta)?
        };
        checks.push(Check::at_most(
            format!("born[{name}]"),
            (p - born).abs(),
            PROBABILITY_TOL,
        ));
        probabilities.insert(name.clone(), json!(p));
        table.push(vec![name.clone(), format!("{p:e}")]);

        let posterior = if p > mmd_core::instrument::CONDITIONING_TOL {
            let post = inst.posterior(&omega, &delta)?;
            let luders = delta.iter().fold(CMatrix::zeros(dim, dim), |acc, &chi| {
                let e = inst.measure().projection(chi);
                acc + e * rho * e
            }) / C64::from(born);
            checks.push(Check::at_most(
                format!("luders[{name}]"),
                (post.matrix() - luders).norm(),
                PROBABILITY_TOL,
            ));
            if p > 1e-6 {
                let again = inst.probability(&post, &delta)?;
                checks.push(Check::at_most(
                    format!("repeatability[{name}]"),
                    (again - 1.0).abs(),
                    PROBABILITY_TOL,
                ));
            }
            json!(to_rows(post.matrix()))
        } else {
            Value::Null
        };
        posteriors.push(json!({"label": name, "probability": p, "state": posterior}));
    }
    let total: f64 = support
        .iter()
        .map(|&chi| inst.probability(&omega, &[chi]))
        .sum::<mmd_core::Result<f64>>()?;
    checks.push(Check::at_most(
        "total_probability",
        (total - 1.0).abs(),
        PROBABILITY_TOL,
    ));

    Ok(Report::new(
        "measure",
        echo(s),
        ctx.seed,
        checks,
        json!({"probabilities": probabilities, "posteriors": posteriors}),
        table,
    ))
}

fn branch_json(dual: &DualGroup, b: &Branch) -> Value {
    json!({
        "gamma": dual.label(b.gamma),
        "amplitude": b.amplitude,
        "system_component": to_pairs(&b.component),
    })
}

pub fn amplify(s: &Scenario, ctx: Context) -> Result<Report> {
    let (group, rep) = rep_of(s)?;
    let dual = group.dual();
    let xi = s.vector_state(rep.dim())?;
    let stages = s.stages.ok_or_else(|| CliError::at("/N", "missing"))?;
    let config = CascadeConfig::new(stages)
        .map_err(|e| CliError::core_at("/N", e))?
        .with_max_dim(ctx.max_dim);
    let amp = Amplifier::new(&rep, config, ctx.seed).map_err(|e| CliError::core_at("/rep", e))?;
    let analytic = amp.amplify_analytic(&xi)?;
    let mut checks = vec![Check::at_most(
        "branch_weight",
        (analytic.total_weight() - 1.0).abs(),
        PROBABILITY_TOL,
    )];

    let path = s.path.unwrap_or_default();
    let (branches, fidelity, distribution) = match path {
        CascadePath::Dense => {
            let out = amp.amplify(&xi).map_err(|e| match e {
                Error::DimensionCap { .. } => CliError::core_at("/N", e),
                e => e.into(),
            })?;
            checks.push(Check::at_most(
                "norm",
                (out.vector().norm() - 1.0).abs(),
                PROBABILITY_TOL,
            ));
            let expected = analytic.densify(ctx.max_dim)?;
            checks.push(Check::at_most(
                "branch_theorem",
                (out.vector() - expected).norm(),
                CASCADE_TOL,
            ));
            let fidelity = amp.recover(&out)?.fidelity(&amp.neutral_input(&xi)?);
            checks.push(Check::at_most("roundtrip", 1.0 - fidelity, PROBABILITY_TOL));
            let mut off = 0.0_f64;
            for k in 2..=stages {
                let joint = out.joint_distribution(1, k)?;
                let mass: f64 = joint
                    .iter()
                    .enumerate()
                    .flat_map(|(a, row)| {
                        row.iter()
                            .enumerate()
                            .filter(move |(b, _)| *b != a)
                            .map(|(_, p)| *p)
                    })
                    .sum();
                off = off.max(mass);
            }
            checks.push(Check::at_most("pointer_consensus", off, PROBABILITY_TOL));
            let branches = out.branch_decompose()?;
            (branches, Some(fidelity), out.register_distribution(1)?)
        }
        CascadePath::Analytic => {
            if amp.dense_dim().is_ok() {
                let dense = amp.amplify(&xi)?;
                let diff = (dense.vector() - analytic.densify(ctx.max_dim)?).norm();
                checks.push(Check::at_most(
                    "dense_analytic_agreement",
                    diff,
                    CASCADE_TOL,
                ));
            }
            (
                analytic.branches().to_vec(),
                None,
                analytic.register_distribution(),
            )
        }
    };

    let mut table = Table::new(&["gamma", "amplitude"]);
    for b in &branches {
        table.push(vec![label(&dual, b.gamma), format!("{:e}", b.amplitude)]);
    }
    let result = json!({
        "path": match path { CascadePath::Dense => "dense", CascadePath::Analytic => "analytic" },
        "N": stages,
        "branches": branches.iter().map(|b| branch_json(&dual, b)).collect::<Vec<_>>(),
        "fidelity_roundtrip": fidelity,
        "single_register_distribution": distribution,
    });
    Ok(Report::new(
        "amplify",
        echo(s),
        ctx.seed,
        checks,
        result,
        table,
    ))
}

pub fn sectors(s: &Scenario, ctx: Context) -> Result<Report> {
    let gens = s
        .algebra_generators(None)?
        .filter(|g| !g.is_empty())
        .ok_or_else(|| CliError::at("/generators", "missing or empty"))?;
    let n = gens[0].nrows();
    let m =
        MatrixStarAlgebra::generate(n, &gens).map_err(|e| CliError::core_at("/generators", e))?;
    let dec = sector_decompose(&m, ctx.seed)?;

    let square_sum: usize = dec.sectors.iter().map(|x| x.block_dim * x.block_dim).sum();
    let rank_sum: usize = dec.sectors.iter().map(|x| x.rank()).sum();
    let checks = vec![
        Check::at_most("completeness", dec.completeness_residual(), ALGEBRA_TOL),
        Check::at_most("orthogonality", dec.orthogonality_residual(), ALGEBRA_TOL),
        Check::exact("dimension_count", square_sum == m.dim()),
        Check::exact("rank_count", rank_sum == n),
        Check::exact("center_count", dec.center_dim == dec.len()),
    ];
    let mut table = Table::new(&["sector", "dim", "multiplicity"]);
    for (i, x) in dec.sectors.iter().enumerate() {
        table.push(vec![
            i.to_string(),
            x.block_dim.to_string(),
            x.multiplicity.to_string(),
        ]);
    }
    let result = json!({
        "algebra_dim": m.dim(),
        "sectors": dec.sectors.iter().map(|x| json!({"dim": x.block_dim, "multiplicity": x.multiplicity})).collect::<Vec<_>>(),
        "center_dim": dec.center_dim,
        "is_factor": dec.center_dim == 1,
    });
    Ok(Report::new(
        "sectors",
        echo(s),
        ctx.seed,
        checks,
        result,
        table,
    ))
}

pub fn crossed(s: &Scenario, ctx: Context) -> Result<Report> {
    let (group, rep) = rep_of(s)?;
    let d = rep.dim();
    let m = match s.algebra_generators(Some(d))? {
        Some(gens) if !gens.is_empty() => MatrixStarAlgebra::generate(d, &gens)
            .map_err(|e| CliError::core_at("/generators", e))?,
        _ => MatrixStarAlgebra::full(d),
    };
    let schrodinger = build_schrodinger(&m, &rep)?;
    let heisenberg = build_heisenberg(&m, &rep)?;
    let tensor = uncoupled_tensor(&m, &rep)?;
    let residual = match alpha_w_equivalence(&schrodinger, &heisenberg, &rep) {
        Ok(r) => r.residual(),
        Err(Error::EquivalenceFailure { residual }) => residual,
        Err(e) => return Err(e.into()),
    };

    let (ds, dh) = (schrodinger.dim(), heisenberg.dim());
    let mut checks = vec![
        Check::at_most("alpha_w_equivalence", residual, ALGEBRA_TOL),
        Check::exact("picture_dims_agree", ds == dh),
    ];
    if m.dim() == d * d {
        checks.push(Check::exact("full_matrix_dim", ds == d * d * group.order()));
    }
    if is_factor(&m) {
        let lambda = UnitaryRep::regular(&group);
        let gens: Vec<CMatrix> = lambda.generator_matrices().into_iter().cloned().collect();
        let a = MatrixStarAlgebra::generate(lambda.dim(), &gens)?;
        let z = coupled_center(&m, &a)?;
        let expected = MatrixStarAlgebra::scalars(d).tensor(&a)?;
        checks.push(Check::at_most(
            "tensor_center",
            algebra_distance(&z, &expected),
            ALGEBRA_TOL,
        ));
    }

    let centers = json!({
        "schrodinger": center(schrodinger.algebra()).dim(),
        "heisenberg": center(heisenberg.algebra()).dim(),
        "tensor": center(&tensor).dim(),
    });
    let mut table = Table::new(&["algebra", "dim", "center_dim"]);
    table.push(vec![
        "schrodinger".into(),
        ds.to_string(),
        centers["schrodinger"].to_string(),
    ]);
    table.push(vec![
        "heisenberg".into(),
        dh.to_string(),
        centers["heisenberg"].to_string(),
    ]);
    table.push(vec![
        "tensor".into(),
        tensor.dim().to_string(),
        centers["tensor"].to_string(),
    ]);
    let result = json!({
        "system_dim": m.dim(),
        "dims": {"schrodinger": ds, "heisenberg": dh, "tensor": tensor.dim()},
        "equivalence_residual": residual,
        "center_dims": centers,
    });
    Ok(Report::new(
        "crossed",
        echo(s),
        ctx.seed,
        checks,
        result,
        table,
    ))
}

pub fn ssb(s: &Scenario, ctx: Context) -> Result<Report> {
    let group = s.group()?;
    let gens = s
        .subgroup_generators
        .as_ref()
        .ok_or_else(|| CliError::at("/subgroup_generators", "missing"))?;
    let spec = SubgroupSpec::from_tuples(&group, gens)
        .map_err(|e| CliError::core_at("/subgroup_generators", e))?;
    let selected = s.selected_coset.unwrap_or(0);
    let bundle =
        sector_bundle(&spec, selected).map_err(|e| CliError::core_at("/selected_coset", e))?;
    let flags = ssb_checks(&spec)?;
    let checks = vec![
        Check::exact("lagrange", flags.lagrange),
        Check::exact("annihilator_order", flags.annihilator_order),
        Check::exact("restriction_surjective", flags.restriction_surjective),
        Check::exact("restriction_kernel", flags.restriction_kernel),
        Check::exact("quotient_pairing", flags.quotient_pairing),
        Check::exact("bundle_total", flags.bundle_total),
        Check::exact("transitive", flags.transitive),
    ];

    let dual = group.dual();
    let cosets: Vec<Vec<Vec<usize>>> = spec
        .quotient()
        .iter()
        .map(|c| c.elements.iter().map(|&u| group.element(u)).collect())
        .collect();
    let annihilator: Vec<Vec<usize>> = spec
        .annihilator()
        .iter()
        .map(|&chi| dual.label(chi))
        .collect();
    let mut table = Table::new(&["coset", "representative", "size"]);
    for (i, c) in spec.quotient().iter().enumerate() {
        let rep: Vec<String> = group
            .element(c.representative)
            .iter()
            .map(|x| x.to_string())
            .collect();
        table.push(vec![
            i.to_string(),
            format!("({})", rep.join(",")),
            c.elements.len().to_string(),
        ]);
    }
    let result = json!({
        "subgroup_order": spec.order(),
        "cosets": cosets,
        "annihilator": annihilator,
        "bundle": {
            "base": bundle.base_size(),
            "fiber": bundle.fiber_size(),
            "total": bundle.total_size(),
            "selected": bundle.selected,
        },
    });
    Ok(Report::new("ssb", echo(s), ctx.seed, checks, result, table))
}
