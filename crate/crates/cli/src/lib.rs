//! Command-line front end: config parsing, suite execution, reports and
//! flow traces.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use nbdf_core::contraction::{decompose, envelope, make_phi};
use nbdf_core::rng::stream;
use nbdf_core::sampling::FieldSampler;
use nbdf_core::verifier::{check_criteria, check_identities, check_normal_contraction, counterexample_demo, run_proof_chain};
use nbdf_core::{evolve, Field, FlowTrace};
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::report::{check_entry, format_float, has_failure, to_canonical};

#[derive(Debug, Parser)]
#[command(name = "nbdf", version, about = "Property checks for non-bilinear Dirichlet forms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the criteria, contraction, identity and intermediate-inequality checks.
    Verify {
        config: PathBuf,
        /// Report path; overrides `output.report`, stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Factor the alternating contraction with the given breakpoints.
    Decompose {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        breakpoints: Vec<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Lipschitz envelope of sampled values through the origin.
    Envelope {
        /// `y,v` pairs, one per line, or a JSON array of pairs.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        radius: f64,
    },
    /// Run the implicit-Euler flow and write a CSV trace.
    Flow {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in demonstrations.
    Demo {
        which: Demo,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Demo {
    Counterexample,
}

/// Exit status: 0 all checks passed, 1 a violation, 2 usage or config error.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

/// Runs one subcommand; `Ok(false)` signals a violation.
pub fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Verify { config, out } => {
            let cfg = load(&config)?;
            let report = verify(&cfg)?;
            let ok = !has_failure(&report);
            let path = out.or(cfg.output.report.clone());
            emit(path.as_deref(), &(to_canonical(&report) + "\n"))?;
            if !ok {
                if let Some(p) = &path {
                    eprintln!("violations found, see {}", p.display());
                }
            }
            Ok(ok)
        }
        Command::Decompose { breakpoints, json } => {
            let phi = make_phi(&breakpoints)?;
            let d = decompose(&phi)?;
            let factors: Vec<&[f64]> = d.factors.iter().map(|f| f.breakpoints()).collect();
            let text = if json {
                to_canonical(&json!({"factors": factors, "residual": d.residual.breakpoints()})) + "\n"
            } else {
                let mut s = String::new();
                for f in &factors {
                    writeln!(s, "factor {}", list(f)).unwrap();
                }
                writeln!(s, "residual {}", list(d.residual.breakpoints())).unwrap();
                s
            };
            emit(None, &text)?;
            Ok(true)
        }
        Command::Envelope { samples, radius } => {
            let text = fs::read_to_string(&samples).with_context(|| format!("reading {}", samples.display()))?;
            let pairs = parse_samples(&text)?;
            let phi = envelope(&pairs, radius)?;
            emit(None, &(to_canonical(&serde_json::to_value(&phi)?) + "\n"))?;
            Ok(true)
        }
        Command::Flow { config, out } => {
            let cfg = load(&config)?;
            let trace = flow(&cfg)?;
            emit(out.or(cfg.output.trace.clone()).as_deref(), &trace_csv(&trace))?;
            Ok(true)
        }
        Command::Demo { which: Demo::Counterexample, out } => {
            let c = counterexample_demo();
            let mut extra = Map::new();
            extra.insert("energy_f".into(), json!(c.energy_f));
            extra.insert("energy_neg_f".into(), json!(c.energy_neg_f));
            let report = report::report(0, vec![check_entry(Some("counterexample"), &c.result)], extra);
            emit(out.as_deref(), &(to_canonical(&report) + "\n"))?;
            Ok(!has_failure(&report))
        }
    }
}

fn load(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    RunConfig::from_json(&text).with_context(|| format!("in {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(","))
}

/// Either a JSON array of `[y, v]` pairs or lines of `y,v` (or `y v`);
/// blank lines and `#` comments are skipped.
pub fn parse_samples(text: &str) -> Result<Vec<(f64, f64)>> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).context("malformed sample array");
    }
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let [y, v] = parts.as_slice() else {
            bail!("line {}: expected two numbers", k + 1);
        };
        let parse = |s: &str| s.parse::<f64>().with_context(|| format!("line {}: bad number {s:?}", k + 1));
        out.push((parse(y)?, parse(v)?));
    }
    Ok(out)
}

/// Full report for a verify run.
pub fn verify(cfg: &RunConfig) -> Result<Value> {
    let suite = cfg.suite()?;
    let forms = cfg.build_forms()?;
    let mut checks = Vec::new();
    for (label, form) in &forms {
        let criteria = check_criteria(form, &suite);
        let all_pass = criteria.iter().all(|c| c.passed);
        checks.extend(criteria.iter().map(|c| check_entry(Some(label), c)));
        checks.push(check_entry(Some(label), &check_normal_contraction(form, &suite)));
        if all_pass {
            for c in run_proof_chain(form, &suite)? {
                checks.push(check_entry(Some(label), &c));
            }
        }
    }
    checks.extend(check_identities(&suite).iter().map(|c| check_entry(None, c)));
    Ok(report::report(cfg.seed, checks, Map::new()))
}

pub fn flow(cfg: &RunConfig) -> Result<FlowTrace> {
    let Some(section) = &cfg.flow else {
        bail!("config has no flow section");
    };
    let forms = cfg.build_forms()?;
    let Some((_, form)) = forms.get(section.form) else {
        bail!("flow.form = {} but only {} forms are listed", section.form, forms.len());
    };
    let u0 = match &section.initial {
        Some(v) => Field::new(form.space(), v.clone())?,
        None => FieldSampler::default().sample(form.space(), &mut stream(cfg.seed, "flow/initial")),
    };
    Ok(evolve(form, &u0, &section.config(cfg.seed))?)
}

/// Columns `step,time,energy,residual,v0..v{n-1}`; step 0 has residual 0.
pub fn trace_csv(t: &FlowTrace) -> String {
    let n = t.states.first().map_or(0, |s| s.len());
    let mut s = String::from("step,time,energy,residual");
    for i in 0..n {
        write!(s, ",v{i}").unwrap();
    }
    s.push('\n');
    for (k, state) in t.states.iter().enumerate() {
        let residual = if k == 0 { 0.0 } else { t.residuals[k - 1] };
        write!(
            s,
            "{k},{},{},{}",
            format_float(k as f64 * t.tau),
            format_float(t.energies[k].value()),
            format_float(residual)
        )
        .unwrap();
        for v in state.values() {
            write!(s, ",{}", format_float(*v)).unwrap();
        }
        s.push('\n');
    }
    s
}
