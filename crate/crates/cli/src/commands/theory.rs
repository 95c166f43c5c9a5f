use anyhow::Result;
use heterovar::boundlab::{
    affinity_by_trapezoid, control_experiment, hc_expectation, hc_integral, hellinger_affinity,
    lower_bound_experiment, moment_distribution, smallest_odd_q, AdversarialMean, LowerBoundConfig,
    TestingProblem,
};
use serde::Serialize;

use super::lib;
use crate::args::TheoryCommand;
use crate::io::{emit, num, Table};

const ORACLE_STEPS: usize = 50_000;

#[derive(Serialize)]
struct LowerBoundReport {
    config: LowerBoundConfig,
    rows: Vec<heterovar::boundlab::LowerBoundRow>,
    control: Option<heterovar::boundlab::LowerBoundRow>,
}

pub fn theory(cmd: TheoryCommand) -> Result<()> {
    match cmd {
        TheoryCommand::Moments { q, output } => {
            let g = lib(moment_distribution(q))?;
            let mut t = Table::new(&["node", "weight"]);
            for (v, w) in g.nodes.iter().zip(&g.weights) {
                t.row([num(*v), num(*w)]);
            }
            emit(output.as_ref(), &t.finish())
        }
        TheoryCommand::Hellinger {
            alpha,
            q,
            n_list,
            m_f,
            output,
        } => {
            let mut t = Table::new(&[
                "n",
                "theta",
                "affinity",
                "hellinger_sq",
                "rho",
                "oracle_affinity",
            ]);
            for n in n_list {
                let p = lib(TestingProblem::new(n, alpha, q, m_f))?;
                let a = lib(hellinger_affinity(&p))?;
                t.row([
                    n.to_string(),
                    num(p.theta),
                    num(a.single),
                    num(a.hellinger_sq),
                    num(a.rho),
                    num(affinity_by_trapezoid(&p, ORACLE_STEPS)),
                ]);
            }
            emit(output.as_ref(), &t.finish())
        }
        TheoryCommand::HcCheck { d_list, output } => {
            let mut t = Table::new(&["d", "value", "expectation_form"]);
            for d in d_list {
                t.row([
                    num(d),
                    num(lib(hc_integral(d))?),
                    num(lib(hc_expectation(d))?),
                ]);
            }
            emit(output.as_ref(), &t.finish())
        }
        TheoryCommand::Adversarial {
            alpha,
            q,
            n,
            seed,
            m_f,
            output,
        } => {
            let q = match q {
                Some(q) => q,
                None => lib(smallest_odd_q(alpha))?,
            };
            let f = lib(AdversarialMean::new(n, alpha, q, m_f, seed))?;
            let mut t = Table::new(&["i", "x", "r", "f"]);
            for (i, (r, v)) in f.r.iter().zip(f.design_values()).enumerate() {
                t.row([
                    (i + 1).to_string(),
                    num((i + 1) as f64 / n as f64),
                    num(*r),
                    num(v),
                ]);
            }
            emit(output.as_ref(), &t.finish())
        }
        TheoryCommand::LowerBound {
            alphas,
            ns,
            q,
            m_f,
            replications,
            seed,
            no_control,
            output,
        } => {
            let config = LowerBoundConfig {
                alphas,
                ns,
                replications,
                q,
                m_f,
                master_seed: seed,
                ..Default::default()
            };
            let rows = lib(lower_bound_experiment(&config))?;
            let control = if no_control {
                None
            } else {
                Some(lib(control_experiment(&config))?)
            };
            let report = LowerBoundReport {
                config,
                rows,
                control,
            };
            emit(
                output.as_ref(),
                &(serde_json::to_string_pretty(&report)? + "\n"),
            )
        }
    }
}
