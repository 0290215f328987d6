//! Built-in scenario catalogue over every abelian group of order at most 8.

use mmd_core::group::abelian_groups_up_to;
use mmd_core::linalg::random_unit_vector;
use mmd_core::rep::UnitaryRep;
use mmd_core::ssb::all_subgroups;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::commands::{execute, Command, Context};
use crate::error::Result;
use crate::report::{Check, Report, ScenarioEcho, Table};
use crate::scenario::{to_pairs, to_rows, RepName, RepSpec, Scenario, StateSpec};

pub const SUITE_MAX_ORDER: usize = 8;
/// Crossed products are built for the smaller groups only.
const CROSSED_MAX_ORDER: usize = 4;

fn random_rep_spec(orders: &[usize], dim: usize, seed: u64) -> Result<RepSpec> {
    let group = mmd_core::group::FiniteAbelianGroup::new(orders)?;
    let rep = UnitaryRep::random(&group, dim, &mut ChaCha8Rng::seed_from_u64(seed))?;
    Ok(RepSpec::Matrices(
        rep.generator_matrices().into_iter().map(to_rows).collect(),
    ))
}

fn random_state(dim: usize, seed: u64) -> StateSpec {
    StateSpec::Vector(to_pairs(&random_unit_vector(
        &mut ChaCha8Rng::seed_from_u64(seed),
        dim,
    )))
}

fn orders_tag(orders: &[usize]) -> String {
    orders
        .iter()
        .map(|d| format!("Z{d}"))
        .collect::<Vec<_>>()
        .join("x")
}

/// `(command, scenario)` pairs; each scenario carries its own seed.
pub fn catalogue(base_seed: u64) -> Result<Vec<(Command, Scenario)>> {
    let mut out = Vec::new();
    let mut push = |command: Command, mut s: Scenario| {
        s.seed = base_seed.wrapping_add(out.len() as u64);
        out.push((command, s));
    };
    for group in abelian_groups_up_to(SUITE_MAX_ORDER) {
        let orders = group.orders().to_vec();
        let tag = orders_tag(&orders);
        let n = group.order();
        let salt = base_seed ^ (n as u64) << 8 ^ orders.len() as u64;
        let base = Scenario {
            group_orders: orders.clone(),
            ..Scenario::default()
        };
        push(
            Command::Verify,
            Scenario {
                name: format!("{tag}/verify/standard"),
                rep: Some(RepSpec::Named(RepName::Standard)),
                ..base.clone()
            },
        );
        let random3 = random_rep_spec(&orders, 3, salt)?;
        push(
            Command::Verify,
            Scenario {
                name: format!("{tag}/verify/random3"),
                rep: Some(random3.clone()),
                ..base.clone()
            },
        );
        push(
            Command::Measure,
            Scenario {
                name: format!("{tag}/measure/standard"),
                rep: Some(RepSpec::Named(RepName::Standard)),
                state: Some(random_state(n, salt ^ 1)),
                ..base.clone()
            },
        );
        push(
            Command::Measure,
            Scenario {
                name: format!("{tag}/measure/random3"),
                rep: Some(random3.clone()),
                state: Some(random_state(3, salt ^ 2)),
                ..base.clone()
            },
        );
        push(
            Command::Amplify,
            Scenario {
                name: format!("{tag}/amplify/random2"),
                rep: Some(random_rep_spec(&orders, 2, salt ^ 3)?),
                state: Some(random_state(2, salt ^ 4)),
                stages: Some(if n <= 4 { 3 } else { 2 }),
                ..base.clone()
            },
        );
        let regular = UnitaryRep::regular(&group);
        push(
            Command::Sectors,
            Scenario {
                name: format!("{tag}/sectors/translations"),
                generators: Some(
                    regular
                        .generator_matrices()
                        .into_iter()
                        .map(to_rows)
                        .collect(),
                ),
                ..base.clone()
            },
        );
        if n <= CROSSED_MAX_ORDER {
            push(
                Command::Crossed,
                Scenario {
                    name: format!("{tag}/crossed/standard"),
                    rep: Some(RepSpec::Named(RepName::Standard)),
                    ..base.clone()
                },
            );
        }
        for (i, h) in all_subgroups(&group).iter().enumerate() {
            push(
                Command::Ssb,
                Scenario {
                    name: format!("{tag}/ssb/{i}"),
                    subgroup_generators: Some(
                        h.generators().iter().map(|&g| group.element(g)).collect(),
                    ),
                    ..base.clone()
                },
            );
        }
    }
    Ok(out)
}

/// Runs the catalogue in parallel; reports come back in catalogue order.
pub fn run_suite(ctx: Context) -> Result<Report> {
    let scenarios = catalogue(ctx.seed)?;
    let reports = scenarios
        .par_iter()
        .map(|(command, s)| {
            execute(
                *command,
                s,
                Context {
                    seed: s.seed,
                    max_dim: ctx.max_dim,
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mut checks = Vec::new();
    let mut table = Table::new(&["scenario", "command", "checks", "failed", "pass"]);
    let mut entries = Vec::new();
    for ((command, s), report) in scenarios.iter().zip(&reports) {
        let failed = report.checks.iter().filter(|c| !c.pass).count();
        checks.push(Check::at_most(s.name.clone(), failed as f64, 0.0));
        table.push(vec![
            s.name.clone(),
            command.as_str().to_string(),
            report.checks.len().to_string(),
            failed.to_string(),
            report.pass.to_string(),
        ]);
        entries.push(json!({"scenario": s, "report": report}));
    }
    let echo = ScenarioEcho {
        name: "builtin-suite".into(),
        group_orders: Vec::new(),
    };
    Ok(Report::new(
        "suite",
        echo,
        ctx.seed,
        checks,
        json!({ "max_order": SUITE_MAX_ORDER, "scenarios": entries }),
        table,
    ))
}
