mod input;

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lauricella::determinant::{build_delta, DeterminantReport};
use lauricella::evaluate::{eval_arch, linear_form_scan, scan_csv};
use lauricella::height::{measure, v_quantity, MeasureReport, Place};
use lauricella::hypotheses::{check_hypotheses, HypothesisReport};
use lauricella::instance::InstanceEcho;
use lauricella::interval::{round_down, DecimalInterval};
use lauricella::pade::{build_system, required_truncation, PadeReport};
use lauricella::padic::{eval_padic, PadicValue};
use lauricella::rational::{format_rational, parse_rational};
use lauricella::solutions::{build_canonical, SolutionFamily};
use lauricella::{Instance, Rational};
use serde::Serialize;

use input::{parse_place, Parsed};

#[derive(Parser)]
#[command(name = "lauricella", version, about = "Padé approximants and linear-form measures for Lauricella-type series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the hypotheses on the instance; exit 1 if an operative one fails.
    Validate(Opts),
    /// Build the Padé systems and determinant certificates for n = 0..=n_max.
    Build(Opts),
    /// Compute V, A, U and the measure μ(β, ε), C(β, ε).
    Measure(Opts),
    /// Scan λ with H(λ) ≤ H_max against the measure inequality.
    Scan(Opts),
    /// Evaluate f_j(β) at the chosen place.
    Eval(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// Instance file (TOML).
    file: PathBuf,
    #[arg(long, env = "LAURICELLA_N_MAX")]
    n_max: Option<usize>,
    #[arg(long, env = "LAURICELLA_BETA")]
    beta: Option<String>,
    /// `inf` or a prime.
    #[arg(long, env = "LAURICELLA_PLACE")]
    place: Option<String>,
    #[arg(long, env = "LAURICELLA_EPSILON")]
    epsilon: Option<String>,
    #[arg(long, env = "LAURICELLA_H_MAX")]
    h_max: Option<u64>,
    /// Working precision in bits.
    #[arg(long, env = "LAURICELLA_PRECISION")]
    precision: Option<u32>,
    /// Number of series coefficients T.
    #[arg(long, env = "LAURICELLA_TRUNCATION")]
    truncation: Option<usize>,
    /// Write reports here instead of stdout.
    #[arg(long, env = "LAURICELLA_OUT_DIR")]
    out_dir: Option<PathBuf>,
}

/// File values overridden by flags.
struct Settings {
    parsed: Parsed,
    n_max: usize,
    beta: Option<Rational>,
    place: Place,
    epsilon: Option<Rational>,
    h_max: u64,
    precision: u32,
    truncation: Option<usize>,
    out_dir: Option<PathBuf>,
}

impl Settings {
    fn load(o: &Opts) -> Result<Settings> {
        let text = fs::read_to_string(&o.file).with_context(|| format!("reading {}", o.file.display()))?;
        let parsed = input::parse(&text).with_context(|| format!("in {}", o.file.display()))?;
        let flag = |s: &Option<String>, name: &str| {
            s.as_deref().map(|x| parse_rational(x).map_err(|e| anyhow!("--{name}: {e}"))).transpose()
        };
        let beta = flag(&o.beta, "beta")?.or_else(|| parsed.beta.clone());
        let epsilon = flag(&o.epsilon, "epsilon")?.or_else(|| parsed.epsilon.clone());
        let place = match &o.place {
            Some(p) => parse_place(p).context("--place")?,
            None => parsed.place.unwrap_or(Place::Infinity),
        };
        Ok(Settings {
            n_max: o.n_max.or(parsed.file.n_max).unwrap_or(10),
            h_max: o.h_max.or(parsed.file.h_max).unwrap_or(10),
            precision: o.precision.or(parsed.file.precision).unwrap_or(128),
            truncation: o.truncation.or(parsed.file.truncation),
            out_dir: o.out_dir.clone(),
            beta,
            epsilon,
            place,
            parsed,
        })
    }

    fn instance(&self) -> Result<Instance> {
        self.parsed.polys.instance()
    }

    fn beta(&self) -> Result<&Rational> {
        self.beta.as_ref().ok_or_else(|| anyhow!("`beta` is required (file field or --beta)"))
    }

    fn family(&self, inst: &Instance) -> Result<SolutionFamily> {
        let t = self.truncation.unwrap_or(8 * inst.m * (self.n_max + 1));
        build_canonical(inst, t).map_err(|e| anyhow!("building f_j to T = {t}: {e}"))
    }

    fn emit(&self, name: &str, body: &str) -> Result<()> {
        match &self.out_dir {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join(name);
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
            }
            None => match std::io::stdout().lock().write_all(body.as_bytes()) {
                Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            },
        }
    }

    fn emit_json<T: Serialize>(&self, name: &str, v: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v)?;
        s.push('\n');
        self.emit(name, &s)
    }
}

#[derive(Serialize)]
struct ValidateReport {
    instance: Option<InstanceEcho>,
    instance_hash: Option<String>,
    hypotheses: HypothesisReport,
}

fn validate(s: &Settings) -> Result<bool> {
    let polys = &s.parsed.polys;
    let hypotheses = check_hypotheses(&polys.a, &polys.b, s.n_max as u64);
    let inst = polys.instance().ok();
    let ok = hypotheses.all_operative_pass && inst.is_some();
    let report = ValidateReport {
        instance: inst.as_ref().map(Instance::echo),
        instance_hash: inst.as_ref().map(Instance::hash),
        hypotheses,
    };
    s.emit_json("validate.json", &report)?;
    if !ok {
        let failed: Vec<&str> =
            report.hypotheses.checks.iter().filter(|c| c.operative && !c.passed).map(|c| c.name.as_str()).collect();
        eprintln!("hypotheses failed: {}", failed.join(", "));
    }
    Ok(ok)
}

#[derive(Serialize)]
struct BuildReport {
    instance: InstanceEcho,
    instance_hash: String,
    n_max: usize,
    truncation: usize,
    certified: bool,
    certificates: Vec<DeterminantReport>,
}

fn build(s: &Settings) -> Result<bool> {
    let inst = s.instance()?;
    let needed = required_truncation(&inst, s.n_max).max(inst.m * (s.n_max + 1) + 2);
    let t = s.truncation.unwrap_or(needed);
    let fam = build_canonical(&inst, t).map_err(|e| anyhow!("{e}"))?;
    let mut certificates = Vec::new();
    let mut systems: Vec<PadeReport> = Vec::new();
    for n in 0..=s.n_max {
        let sys = build_system(&fam, n).map_err(|e| anyhow!("Padé system n = {n}: {e}"))?;
        systems.push(sys.report(&fam));
        certificates.push(build_delta(&fam, &sys, s.n_max as u64).map_err(|e| anyhow!("Δ_{n}: {e}"))?);
    }
    let certified = certificates.iter().all(|c| c.delta_is_constant && c.delta_nonzero)
        && systems.iter().all(|p| p.verified);
    if s.out_dir.is_some() {
        for p in &systems {
            s.emit_json(&format!("pade_{:03}.json", p.n), p)?;
        }
    }
    let report = BuildReport { instance: inst.echo(), instance_hash: inst.hash(), n_max: s.n_max, truncation: t, certified, certificates };
    s.emit_json("build.json", &report)?;
    Ok(certified)
}

fn measure_report(s: &Settings, inst: &Instance) -> Result<MeasureReport> {
    let beta = s.beta()?;
    let epsilon = match &s.epsilon {
        Some(e) => e.clone(),
        None => {
            let v = v_quantity(inst, beta, s.place).map_err(|e| anyhow!("{e}"))?.enclose(s.precision);
            if v.is_positive() {
                round_down(&(v.lo() / Rational::from_integer(2.into())), 64)
            } else {
                Rational::from_integer(0.into())
            }
        }
    };
    measure(inst, beta, s.place, &epsilon, s.precision).map_err(|e| anyhow!("{e}"))
}

fn cmd_measure(s: &Settings) -> Result<bool> {
    let inst = s.instance()?;
    let report = measure_report(s, &inst)?;
    s.emit_json("measure.json", &report)?;
    Ok(report.applicable)
}

fn scan(s: &Settings) -> Result<bool> {
    let inst = s.instance()?;
    let m = measure_report(s, &inst)?;
    if !m.applicable {
        bail!("measure not applicable: {}", m.note.unwrap_or_default());
    }
    let fam = s.family(&inst)?;
    let report = linear_form_scan(&fam, &m, s.h_max, s.precision).map_err(|e| anyhow!("{e}"))?;
    s.emit("scan.csv", &scan_csv(&report, inst.m)?)?;
    if s.out_dir.is_some() {
        s.emit_json("scan.json", &report)?;
    } else {
        eprintln!(
            "{} cells, {} violations, {} undecided",
            report.cells,
            report.violations.len(),
            report.undecided.len()
        );
    }
    Ok(report.undecided.is_empty())
}

#[derive(Serialize)]
#[serde(untagged)]
enum Value {
    Archimedean(DecimalInterval),
    Padic(PadicValue),
}

#[derive(Serialize)]
struct EvalRow {
    j: usize,
    value: Value,
}

#[derive(Serialize)]
struct EvalReport {
    instance_hash: String,
    beta: String,
    place: Place,
    truncation: usize,
    values: Vec<EvalRow>,
}

fn eval(s: &Settings) -> Result<bool> {
    let inst = s.instance()?;
    let beta = s.beta()?;
    let fam = s.family(&inst)?;
    let values = (0..=inst.w)
        .map(|j| {
            let value = match s.place {
                Place::Infinity => eval_arch(&fam, j, beta, s.precision).map(|x| Value::Archimedean(x.to_decimal(30))),
                Place::Prime(p) => {
                    let digits = (s.precision as f64 / (p as f64).log2()).ceil() as u32;
                    eval_padic(&fam, j, beta, p, digits).map(Value::Padic)
                }
            };
            value.map(|value| EvalRow { j, value }).map_err(|e| anyhow!("f_{j}({}): {e}", format_rational(beta)))
        })
        .collect::<Result<Vec<_>>>()?;
    let report =
        EvalReport { instance_hash: inst.hash(), beta: format_rational(beta), place: s.place, truncation: fam.truncation(), values };
    s.emit_json("eval.json", &report)?;
    Ok(true)
}

fn run(cli: &Cli) -> Result<bool> {
    let (opts, f): (&Opts, fn(&Settings) -> Result<bool>) = match &cli.command {
        Command::Validate(o) => (o, validate),
        Command::Build(o) => (o, build),
        Command::Measure(o) => (o, cmd_measure),
        Command::Scan(o) => (o, scan),
        Command::Eval(o) => (o, eval),
    };
    f(&Settings::load(opts)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
