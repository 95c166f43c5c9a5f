use std::collections::BTreeMap;
use std::fs;

use anyhow::{bail, Context, Result};
use heterovar::diffvar::Method;
use heterovar::simlab::{
    rate_study, run_table1, ExperimentConfig, MeanFn, MethodSummary, Noise, VarianceFn,
};
use heterovar::Design;
use serde::Deserialize;

use super::lib;
use crate::args::{DesignArg, NoiseArg, Preset, RatesArgs, SimulateArgs};
use crate::io::{emit, num, opt_num, Table};

const FAST_REPLICATIONS: usize = 30;

/// Fields accepted by `simulate --config`; each overrides the preset.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SimulationFile {
    n: Option<usize>,
    replications: Option<usize>,
    means: Option<Vec<String>>,
    variance: Option<VarianceFn>,
    noise: Option<Noise>,
    design: Option<Design>,
    folds: Option<usize>,
    h_grid: Option<Vec<f64>>,
    seed: Option<u64>,
    order: Option<usize>,
    methods: Option<Vec<Method>>,
}

fn parse_means(ids: &[String], source: &str) -> Result<Vec<MeanFn>> {
    let mut out: Vec<MeanFn> = Vec::with_capacity(ids.len());
    for id in ids {
        let Some(m) = MeanFn::builtin(id.trim()) else {
            bail!("{source}: unknown mean `{id}` (expected f1, f2, f3 or f4)");
        };
        if out.iter().any(|o| o.id() == m.id()) {
            bail!("{source}: mean `{id}` listed twice");
        }
        out.push(m);
    }
    if out.is_empty() {
        bail!("{source}: no means selected");
    }
    Ok(out)
}

fn plan(a: &SimulateArgs) -> Result<(ExperimentConfig, Vec<MeanFn>)> {
    let (mut base, mut means) = match a.preset {
        Preset::Table1 => (
            ExperimentConfig::table1(MeanFn::F1, 0),
            MeanFn::all_builtin().to_vec(),
        ),
    };
    if let Some(path) = &a.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("--config: cannot read {}", path.display()))?;
        let file: SimulationFile = serde_json::from_str(&text)
            .with_context(|| format!("--config: invalid JSON in {}", path.display()))?;
        if let Some(v) = file.n {
            base.n = v;
        }
        if let Some(v) = file.replications {
            base.replications = v;
        }
        if let Some(v) = &file.means {
            means = parse_means(v, "--config: means")?;
        }
        if let Some(v) = file.variance {
            base.functions.variance = v;
        }
        if let Some(v) = file.noise {
            base.noise = v;
        }
        if let Some(v) = file.design {
            base.design = v;
        }
        if let Some(v) = file.folds {
            base.cv.folds = v;
        }
        if file.h_grid.is_some() {
            base.cv.h_grid = file.h_grid;
        }
        if let Some(v) = file.seed {
            base.master_seed = v;
        }
        if let Some(v) = file.order {
            base.order = v;
        }
        if let Some(v) = file.methods {
            base.methods = v;
        }
    }
    if let Some(v) = a.n {
        base.n = v;
    }
    if a.fast {
        base.replications = FAST_REPLICATIONS;
    }
    if let Some(v) = a.replications {
        base.replications = v;
    }
    if let Some(v) = &a.means {
        means = parse_means(v, "--means")?;
    }
    if let Some(v) = a.noise {
        base.noise = match v {
            NoiseArg::Gaussian => Noise::Gaussian,
            NoiseArg::TwoPoint => Noise::TwoPoint,
        };
    }
    if let Some(v) = a.design {
        base.design = match v {
            DesignArg::Fixed => Design::Fixed,
            DesignArg::RandomUniform => Design::RandomUniform,
        };
    }
    if let Some(v) = a.k {
        base.cv.folds = v;
    }
    if let Some(v) = a.seed {
        base.master_seed = v;
    }
    lib(base.validate())?;
    Ok((base, means))
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let (base, means) = plan(&a)?;
    let mut summary: BTreeMap<String, BTreeMap<Method, MethodSummary>> = BTreeMap::new();
    let mut per_rep = csv::Writer::from_writer(Vec::new());
    per_rep.write_record([
        "mean", "rep", "seed", "method", "h", "h_mean", "cdmse", "error",
    ])?;
    for mean in means {
        let mut config = base.clone();
        config.functions.mean = mean;
        let result = lib(run_table1(&config))
            .with_context(|| format!("mean {}", config.functions.mean.id()))?;
        for r in &result.per_replication {
            per_rep.write_record([
                result.mean.clone(),
                r.rep.to_string(),
                r.seed.to_string(),
                r.method.label().to_string(),
                opt_num(r.h),
                opt_num(r.h_mean),
                opt_num(r.cdmse),
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        summary.insert(result.mean, result.methods);
    }
    if let Some(path) = &a.per_replication {
        let bytes = per_rep.into_inner().context("per-replication CSV")?;
        fs::write(path, bytes)
            .with_context(|| format!("--per-replication: cannot write {}", path.display()))?;
    }
    emit(
        a.summary.as_ref(),
        &(serde_json::to_string_pretty(&summary)? + "\n"),
    )
}

pub fn rates(a: RatesArgs) -> Result<()> {
    let Some(mean) = MeanFn::builtin(&a.mean) else {
        bail!(
            "--mean: unknown mean `{}` (expected f1, f2, f3 or f4)",
            a.mean
        );
    };
    let mut config = ExperimentConfig::table1(mean, a.seed);
    config.replications = a.replications;
    config.order = a.order;
    let study = lib(rate_study(&a.ns, &config, a.h_exponent))?;
    let text = if a.json {
        serde_json::to_string_pretty(&study)? + "\n"
    } else {
        let mut t = Table::new(&["log_n", "log_median_cdmse"]);
        for p in &study.points {
            t.row([num(p.log_n), num(p.log_median_cdmse)]);
        }
        t.finish()
    };
    emit(a.output.as_ref(), &text)
}
