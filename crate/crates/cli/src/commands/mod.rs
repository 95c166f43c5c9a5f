mod simulate;
mod theory;

use anyhow::{bail, Result};
use heterovar::diffvar::estimate_variance;
use heterovar::kernel::{bin_weights, BinLayout, Smoother};
use heterovar::modelsel::{default_h_grid, kfold_cv_diff, kfold_cv_fanyao, log_grid, CvConfig};
use heterovar::residvar::fan_yao_variance;
use heterovar::{Error, Sample};

use crate::args::{CvArgs, EstimateArgs, KernelArgs, MethodArg};
use crate::io::{emit, num, read_grid, read_sample, Table};
use crate::FlagContext;

pub use simulate::{rates, simulate};
pub use theory::theory;

/// Flag name for a library error that refers to one of its inputs.
fn flag_of(e: &Error) -> Option<String> {
    match e {
        Error::InvalidInput { field, .. } | Error::InvalidConfig { field, .. } => {
            Some(match *field {
                "folds" => "k".to_string(),
                other => other.replace('_', "-"),
            })
        }
        Error::BandwidthTooSmall { .. } => Some("h".to_string()),
        // Only the rate studies fit lines through sample sizes.
        Error::InsufficientPoints { .. } => Some("ns".to_string()),
        _ => None,
    }
}

/// Like [`FlagContext::flag`], with the flag derived from the error itself.
pub(crate) fn lib<T>(r: heterovar::Result<T>) -> Result<T> {
    r.map_err(|e| match flag_of(&e) {
        Some(f) => anyhow::Error::new(e).context(format!("--{f}")),
        None => anyhow::Error::new(e),
    })
}

fn parse_h_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        bail!("--h-grid: expected lo:hi:count, got `{spec}`");
    };
    let (Ok(lo), Ok(hi), Ok(count)) =
        (lo.parse::<f64>(), hi.parse::<f64>(), count.parse::<usize>())
    else {
        bail!("--h-grid: expected lo:hi:count, got `{spec}`");
    };
    if !(lo > 0.0 && hi >= lo && count >= 1) || (count > 1 && hi == lo) {
        bail!("--h-grid: need 0 < lo < hi and count >= 1, got `{spec}`");
    }
    Ok(log_grid(lo, hi, count))
}

fn cv_config(sample: &Sample, k: usize, seed: u64, grid: Option<Vec<f64>>) -> CvConfig {
    CvConfig {
        folds: k,
        h_grid: grid.unwrap_or_else(|| default_h_grid(sample.len())),
        seed,
    }
}

pub fn estimate(a: EstimateArgs) -> Result<()> {
    let sample = read_sample(&a.input)?;
    let grid = match &a.grid {
        Some(spec) => read_grid(spec)?,
        None => sample.x().to_vec(),
    };
    let est = match a.method {
        MethodArg::Diff => {
            if a.h_mean.is_some() || a.h_var.is_some() {
                bail!("--h-mean/--h-var: only valid with --method fanyao");
            }
            let h = match a.h {
                Some(h) => h,
                None => {
                    lib(kfold_cv_diff(
                        &sample,
                        a.order,
                        &cv_config(&sample, a.k, a.seed, None),
                    ))?
                    .h_selected
                }
            };
            lib(estimate_variance(&sample, h, a.order, &grid, a.truncate))?
        }
        MethodArg::Fanyao => {
            if a.h.is_some() {
                bail!("--h: not used by --method fanyao; pass --h-mean and --h-var");
            }
            let (h_mean, h_var) = match (a.h_mean, a.h_var) {
                (Some(m), Some(v)) => (m, v),
                (m, v) => {
                    let sel = lib(kfold_cv_fanyao(
                        &sample,
                        &cv_config(&sample, a.k, a.seed, None),
                    ))?;
                    (m.unwrap_or(sel.h_mean()), v.unwrap_or(sel.h_var()))
                }
            };
            let mut est = match fan_yao_variance(&sample, h_mean, h_var, &grid) {
                // Either stage may reject its bandwidth.
                Err(e) if flag_of(&e).as_deref() == Some("h") => Err(e).flag("h-mean/--h-var")?,
                other => lib(other)?,
            };
            if a.truncate {
                for v in &mut est.values {
                    *v = v.max(0.0);
                }
                est.truncated = true;
            }
            est
        }
    };
    let mut t = Table::new(&["x", "vhat"]);
    for (x, v) in est.grid.iter().zip(&est.values) {
        t.row([num(*x), num(*v)]);
    }
    emit(a.output.as_ref(), &t.finish())
}

pub fn cv(a: CvArgs) -> Result<()> {
    let sample = read_sample(&a.input)?;
    let grid = a.h_grid.as_deref().map(parse_h_grid).transpose()?;
    let config = cv_config(&sample, a.k, a.seed, grid);
    let json = match a.method {
        MethodArg::Diff => {
            serde_json::to_string_pretty(&lib(kfold_cv_diff(&sample, a.order, &config))?)?
        }
        MethodArg::Fanyao => {
            serde_json::to_string_pretty(&lib(kfold_cv_fanyao(&sample, &config))?)?
        }
    };
    emit(a.output.as_ref(), &(json + "\n"))
}

pub fn kernel(a: KernelArgs) -> Result<()> {
    let mut t;
    if a.coefficients {
        let layout = BinLayout::fixed(a.n).flag("n")?;
        let smoother = lib(Smoother::new(a.order, a.h, layout))?;
        if !(0.0..=1.0).contains(&a.x) {
            bail!("--x: must lie in [0, 1], got {}", a.x);
        }
        let k = smoother.effective_kernel(a.x);
        t = Table::new(&["k", "coefficient"]);
        for (i, c) in k.coeffs().iter().enumerate() {
            t.row([i.to_string(), num(*c)]);
        }
    } else {
        let w = lib(bin_weights(a.order, a.h, a.x, a.n))?;
        t = Table::new(&["i", "weight"]);
        for (i, v) in w.weights.iter().enumerate() {
            t.row([(i + 1).to_string(), num(*v)]);
        }
    }
    emit(a.output.as_ref(), &t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_grid_spec() {
        let g = parse_h_grid("0.1:0.4:3").unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[1] - 0.2).abs() < 1e-15);
        assert!(parse_h_grid("0.1:0.4").is_err());
        assert!(parse_h_grid("0:0.4:3").is_err());
        assert!(parse_h_grid("0.4:0.1:3").is_err());
        assert_eq!(parse_h_grid("0.2:0.2:1").unwrap(), vec![0.2]);
    }

    #[test]
    fn flags_follow_error_fields() {
        let e = Error::InvalidConfig {
            field: "folds",
            reason: String::new(),
        };
        assert_eq!(flag_of(&e).as_deref(), Some("k"));
        let e = Error::InvalidConfig {
            field: "h_grid",
            reason: String::new(),
        };
        assert_eq!(flag_of(&e).as_deref(), Some("h-grid"));
    }
}
