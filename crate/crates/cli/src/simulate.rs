use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use secacc_core::schemes::{verify_scheme_security, Adversary, SchemeConfig, SecurityVerdict};
use secacc_core::sim::{
    ingest_trace, plot_csv, reports_json, reports_text, simulate_many, simulate_trace, AcceleratorConfig,
    HwCostModel, Metric, SchemeReport, Workload,
};
use secacc_core::workloads;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::io::{load_workload, read, slug, write_atomic};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Accelerator presets, comma separated (server, edge).
    #[arg(long, value_delimiter = ',')]
    preset: Option<Vec<String>>,
    /// Scheme presets, comma separated. Defaults to all six.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Topology CSV path or built-in workload name; repeatable.
    #[arg(long)]
    topology: Vec<String>,
    /// External DRAM trace CSV; repeatable.
    #[arg(long)]
    trace: Vec<PathBuf>,
    /// JSON run configuration; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the security checks recorded with the run.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; without it only the summary is printed.
    #[arg(long, env = "SECACC_OUT_DIR")]
    out: Option<PathBuf>,
}

/// Run configuration file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    preset: Option<Vec<String>>,
    schemes: Option<Vec<String>>,
    topologies: Option<Vec<String>>,
    traces: Option<Vec<PathBuf>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    /// Field overrides applied to every accelerator preset.
    accelerator: Option<Value>,
    /// Field overrides per scheme name.
    #[serde(default)]
    scheme_overrides: BTreeMap<String, Value>,
    hw: Option<HwCostModel>,
}

/// Everything that determines the reports, written next to them.
#[derive(Debug, Serialize)]
struct RunManifest {
    seed: u64,
    accelerators: Vec<AcceleratorConfig>,
    schemes: Vec<SchemeConfig>,
    hw: HwCostModel,
    workloads: Vec<String>,
    security: BTreeMap<String, BTreeMap<Adversary, SecurityVerdict>>,
}

enum Job {
    Topology(Workload),
    Trace(String, PathBuf),
}

impl Job {
    fn name(&self) -> &str {
        match self {
            Job::Topology(w) => &w.name,
            Job::Trace(name, _) => name,
        }
    }
}

fn resolve(args: Args) -> Result<(RunFile, u64, Option<PathBuf>)> {
    let mut file = match &args.config {
        Some(path) => serde_json::from_str::<RunFile>(&read(path)?).with_context(|| format!("in {}", path.display()))?,
        None => RunFile::default(),
    };
    let seed = args.seed.or(file.seed).unwrap_or(crate::DEFAULT_SEED);
    let out = args.out.or(file.out.take());
    if args.preset.is_some() {
        file.preset = args.preset;
    }
    if args.schemes.is_some() {
        file.schemes = args.schemes;
    }
    if !args.topology.is_empty() || !args.trace.is_empty() {
        file.topologies = Some(args.topology);
        file.traces = Some(args.trace);
    }
    Ok((file, seed, out))
}

pub fn run(args: Args) -> Result<()> {
    let (file, seed, out) = resolve(args)?;
    let accelerators = file
        .preset
        .clone()
        .unwrap_or_else(|| vec!["server".into()])
        .iter()
        .map(|name| {
            let acc = AcceleratorConfig::preset(name)?;
            match &file.accelerator {
                Some(patch) => acc.with_overrides(patch),
                None => Ok(acc),
            }
        })
        .collect::<secacc_core::Result<Vec<_>>>()?;
    let names = file
        .schemes
        .clone()
        .unwrap_or_else(|| SchemeConfig::PRESETS.iter().map(|s| s.to_string()).collect());
    if names.is_empty() {
        bail!("no schemes selected");
    }
    let schemes = names
        .iter()
        .map(|name| {
            let cfg = SchemeConfig::preset(name)?;
            match file.scheme_overrides.get(name) {
                Some(patch) => cfg.with_overrides(patch),
                None => Ok(cfg),
            }
        })
        .collect::<secacc_core::Result<Vec<_>>>()?;
    // overrides for presets left out by --schemes are ignored, unknown names are not
    for name in file.scheme_overrides.keys() {
        SchemeConfig::preset(name)?;
    }
    let hw = file.hw.unwrap_or_default();

    let mut jobs = Vec::new();
    let topologies = file.topologies.clone().unwrap_or_default();
    let traces = file.traces.clone().unwrap_or_default();
    if topologies.is_empty() && traces.is_empty() {
        for w in workloads::all_builtin()? {
            jobs.push(Job::Topology(w));
        }
    }
    for t in &topologies {
        jobs.push(Job::Topology(load_workload(t)?));
    }
    for t in &traces {
        let name = t.file_stem().map_or_else(|| "trace".into(), |s| s.to_string_lossy().into_owned());
        jobs.push(Job::Trace(name, t.clone()));
    }

    let pairs: Vec<(&AcceleratorConfig, &Job)> = accelerators.iter().flat_map(|a| jobs.iter().map(move |j| (a, j))).collect();
    let reports: Vec<SchemeReport> = pairs
        .par_iter()
        .map(|(acc, job)| -> Result<Vec<SchemeReport>> {
            match job {
                Job::Topology(w) => Ok(simulate_many(w, acc, &schemes, &hw)?),
                Job::Trace(name, path) => {
                    let trace = ingest_trace(&read(path)?).with_context(|| format!("in {}", path.display()))?;
                    Ok(simulate_trace(name, &trace, acc, &schemes, &hw)?)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let summary = reports_text(&reports);
    print!("{summary}");
    if let Some(dir) = out {
        let security = schemes
            .iter()
            .map(|s| Ok((s.name.clone(), verify_scheme_security(s, seed)?)))
            .collect::<secacc_core::Result<BTreeMap<_, _>>>()?;
        let manifest = RunManifest {
            seed,
            accelerators,
            schemes,
            hw,
            workloads: jobs.iter().map(|j| j.name().to_string()).collect(),
            security,
        };
        write_outputs(&dir, &reports, &summary, &manifest)?;
        eprintln!("wrote {} reports to {}", reports.len(), dir.display());
    }
    Ok(())
}

fn write_outputs(dir: &Path, reports: &[SchemeReport], summary: &str, manifest: &RunManifest) -> Result<()> {
    for r in reports {
        let file = format!("{}__{}__{}.json", slug(&r.accelerator), slug(&r.workload), slug(&r.scheme));
        write_atomic(&dir.join("reports").join(file), &reports_json(std::slice::from_ref(r))?)?;
    }
    write_atomic(&dir.join("reports.json"), &reports_json(reports)?)?;
    write_atomic(&dir.join("summary.txt"), summary)?;
    for m in Metric::ALL {
        write_atomic(&dir.join(format!("{}.csv", m.name())), &plot_csv(reports, m))?;
    }
    let mut run = serde_json::to_string_pretty(manifest)?;
    run.push('\n');
    write_atomic(&dir.join("run.json"), &run)
}
