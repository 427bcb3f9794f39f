use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use metric_thickenings::homology::{betti_curve, CurveRow};
use metric_thickenings::homotopy::{verify_deformation, DeformationTarget, ProductDeformation, WedgeDeformation};
use metric_thickenings::io::{
    extended_number, parse_r_grid, parse_scale, read_space, ComplexJson, FileDigest, Inputs, MeasureJson, RunReport,
    TransportJson,
};
use metric_thickenings::metric_space::{MetricSpace, Norm, PointedMetricSpace};
use metric_thickenings::suites::{run_suite, Suite, SuiteConfig};
use metric_thickenings::thickening::{non_face_witness, thickening_wedge, Family};
use metric_thickenings::wasserstein::{wasserstein, WassersteinConfig};
use metric_thickenings::{Convention, Error, PointedThickening, ScaleParameter};

#[derive(Parser, Debug)]
#[command(name = "thicken", version, about = "Metric thickenings of finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
struct SpaceArgs {
    /// Distance-matrix CSV, or a point cloud when --metric is given.
    #[arg(long)]
    input: PathBuf,
    /// Read --input as a point cloud under this norm: l1, l2 or linf.
    #[arg(long)]
    metric: Option<Norm>,
}

#[derive(Args, Debug, Serialize)]
struct BuildArgs {
    /// vr, vr-strict, cech or cech-strict.
    #[arg(long, default_value = "vr")]
    construction: String,
    #[arg(long, value_enum, default_value = "closed")]
    convention: ConventionArg,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ConventionArg {
    Closed,
    Open,
}

#[derive(Args, Debug, Serialize)]
struct Common {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Also write the full run report (digests, flags, timing) here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a Vietoris–Rips or Čech complex and print its maximal faces.
    Complex {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        build: BuildArgs,
        /// Scale; `inf` is allowed.
        #[arg(long)]
        r: String,
        #[command(flatten)]
        common: Common,
    },
    /// Betti numbers over GF(2) along an r grid.
    Betti {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        build: BuildArgs,
        /// `start:step:stop` or a comma-separated list.
        #[arg(long, conflicts_with = "r")]
        r_grid: Option<String>,
        #[arg(long)]
        r: Option<String>,
        #[arg(long, default_value_t = 3)]
        dim_cap: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Exact p-Wasserstein distance and an optimal plan.
    Wasserstein {
        #[arg(long)]
        space: PathBuf,
        #[arg(long)]
        metric: Option<Norm>,
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Whether a measure lies in a thickening.
    Contains {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long)]
        r: String,
        #[arg(long)]
        measure: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a seeded suite, or check the product/wedge deformations on
    /// given spaces (`product` / `wedge` with --input and --other).
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long, default_value_t = 3)]
        dim_cap: usize,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        other: Option<PathBuf>,
        #[arg(long)]
        metric: Option<Norm>,
        #[arg(long, default_value = "vr")]
        construction: String,
        #[arg(long, value_enum, default_value = "closed")]
        convention: ConventionArg,
        #[arg(long)]
        r: Option<String>,
        /// Basepoint label in --input (wedge only; default: first point).
        #[arg(long)]
        base: Option<String>,
        /// Basepoint label in --other (wedge only; default: first point).
        #[arg(long)]
        other_base: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

/// A failure that maps to an exit code.
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type Out = Result<Outcome, Failure>;

struct Outcome {
    command: &'static str,
    files: Vec<PathBuf>,
    flags: Value,
    results: Value,
    csv: Option<Vec<Vec<String>>>,
    pass: Option<bool>,
}

fn load_space(path: &Path, norm: Option<Norm>) -> Result<Arc<MetricSpace>, Failure> {
    let x = read_space(path, norm)?;
    let violations = x.validate();
    if let Some(v) = violations.first() {
        return Err(Failure::Lib(Error::Structural(format!(
            "{} is not an extended pseudo-metric: {v:?} ({} violations)",
            path.display(),
            violations.len()
        ))));
    }
    Ok(Arc::new(x))
}

fn scale(build: &str, convention: ConventionArg, r: &str) -> Result<(Family, ScaleParameter), Failure> {
    let (family, forced) = Family::parse(build)?;
    let asked = match convention {
        ConventionArg::Closed => Convention::Closed,
        ConventionArg::Open => Convention::Open,
    };
    let conv = forced.unwrap_or(asked);
    Ok((family, ScaleParameter::new(parse_scale(r)?, conv)?))
}

fn flags<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn cmd_complex(space: SpaceArgs, build: BuildArgs, r: String) -> Out {
    let x = load_space(&space.input, space.metric)?;
    let (family, s) = scale(&build.construction, build.convention, &r)?;
    let t = family.build(&x, s);
    let cj = ComplexJson::from_complex(t.complex());
    let csv: Vec<Vec<String>> = cj.maximal_faces.iter().map(|f| vec![f.join(" ")]).collect();
    let mut results = serde_json::to_value(&cj).map_err(Error::from)?;
    results["construction"] = json!(t.construction().tag());
    results["r"] = extended_number(s.r);
    Ok(Outcome {
        command: "complex",
        files: vec![space.input.clone()],
        flags: json!({"space": flags(&space), "build": flags(&build), "r": r}),
        results,
        csv: Some([vec!["maximal_face".to_owned()]].into_iter().chain(csv).collect()),
        pass: None,
    })
}

fn cmd_betti(space: SpaceArgs, build: BuildArgs, r_grid: Option<String>, r: Option<String>, dim_cap: usize) -> Out {
    let x = load_space(&space.input, space.metric)?;
    let grid_text = r_grid.clone().or(r.clone()).ok_or_else(|| Failure::Usage("betti needs --r-grid or --r".into()))?;
    let grid = parse_r_grid(&grid_text)?;
    let (family, s) = scale(&build.construction, build.convention, "0")?;
    let rows: Vec<CurveRow> = betti_curve(&x, family, s.convention, &grid, dim_cap)?;
    let mut csv = vec![std::iter::once("r".to_owned())
        .chain((0..=dim_cap).map(|k| format!("b{k}")))
        .collect::<Vec<_>>()];
    csv.extend(rows.iter().map(|row| {
        std::iter::once(if row.r.is_infinite() { "inf".to_owned() } else { row.r.to_string() })
            .chain(row.betti.values.iter().map(usize::to_string))
            .collect()
    }));
    let table: Vec<Value> = rows
        .iter()
        .map(|row| json!({"r": extended_number(row.r), "betti": row.betti.values, "maximal_faces": row.maximal_faces}))
        .collect();
    Ok(Outcome {
        command: "betti",
        files: vec![space.input.clone()],
        flags: json!({"space": flags(&space), "build": flags(&build), "r_grid": grid_text, "dim_cap": dim_cap}),
        results: json!({"construction": build.construction, "convention": s.convention, "dim_cap": dim_cap, "rows": table}),
        csv: Some(csv),
        pass: None,
    })
}

fn cmd_wasserstein(space: PathBuf, metric: Option<Norm>, mu: PathBuf, nu: PathBuf, p: f64) -> Out {
    let x = load_space(&space, metric)?;
    let name = space.file_stem().map(|s| s.to_string_lossy().into_owned());
    let read = |path: &Path| -> Result<_, Failure> {
        let text = std::fs::read_to_string(path)?;
        Ok(MeasureJson::parse(&text)?.to_measure(&x, name.as_deref())?)
    };
    let (m, n) = (read(&mu)?, read(&nu)?);
    let config = WassersteinConfig::with_p(p)?;
    let t = wasserstein(&m, &n, &config)?;
    let out = TransportJson::new(&t, p);
    let mut csv = vec![vec!["from".to_owned(), "to".to_owned(), "mass".to_owned()]];
    for e in out.plan.iter().flatten() {
        csv.push(vec![e.from.clone(), e.to.clone(), e.mass.to_string()]);
    }
    Ok(Outcome {
        command: "wasserstein",
        files: vec![space, mu, nu],
        flags: json!({"p": p, "metric": metric}),
        results: serde_json::to_value(&out).map_err(Error::from)?,
        csv: Some(csv),
        pass: None,
    })
}

fn cmd_contains(space: SpaceArgs, build: BuildArgs, r: String, measure: PathBuf) -> Out {
    let x = load_space(&space.input, space.metric)?;
    let (family, s) = scale(&build.construction, build.convention, &r)?;
    let t = family.build(&x, s);
    let text = std::fs::read_to_string(&measure)?;
    let name = space.input.file_stem().map(|s| s.to_string_lossy().into_owned());
    let mu = MeasureJson::parse(&text)?.to_measure(&x, name.as_deref())?;
    let witness = non_face_witness(&t, &mu)?;
    let inside = witness.is_none();
    let csv = vec![
        vec!["contains".to_owned(), "failing_face".to_owned()],
        vec![inside.to_string(), witness.clone().unwrap_or_default().join(" ")],
    ];
    Ok(Outcome {
        command: "contains",
        files: vec![space.input.clone(), measure],
        flags: json!({"space": flags(&space), "build": flags(&build), "r": r}),
        results: json!({"contains": inside, "support": mu.support_labels(), "failing_face": witness}),
        csv: Some(csv),
        pass: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    suite: String,
    seed: u64,
    samples: Option<usize>,
    instances: Option<usize>,
    dim_cap: usize,
    input: Option<PathBuf>,
    other: Option<PathBuf>,
    metric: Option<Norm>,
    construction: String,
    convention: ConventionArg,
    r: Option<String>,
    base: Option<String>,
    other_base: Option<String>,
) -> Out {
    let flags = json!({
        "suite": suite, "seed": seed, "samples": samples, "instances": instances, "dim_cap": dim_cap,
        "construction": construction, "r": r, "base": base, "other_base": other_base,
    });
    if suite == "product" || suite == "wedge" {
        let (Some(input), Some(other), Some(r)) = (input, other, r) else {
            return Err(Failure::Usage(format!("verify {suite} needs --input, --other and --r")));
        };
        let x = load_space(&input, metric)?;
        let y = load_space(&other, metric)?;
        let (family, s) = scale(&construction, convention, &r)?;
        let samples = samples.unwrap_or(100);
        let report = if suite == "product" {
            let d = ProductDeformation::new(&family.build(&x, s), &family.build(&y, s));
            verify_deformation(DeformationTarget::Product(&d), samples, seed)?
        } else {
            let point = |sp: &Arc<MetricSpace>, label: &Option<String>| -> Result<PointedMetricSpace, Failure> {
                let b = match label {
                    Some(l) => sp.index_of(l).ok_or_else(|| Failure::Usage(format!("no point `{l}`")))?,
                    None => 0,
                };
                Ok(PointedMetricSpace::new(Arc::clone(sp), b)?)
            };
            let (px, py) = (point(&x, &base)?, point(&y, &other_base)?);
            let m = PointedThickening::at_point(family.build(&x, s), px.basepoint)?;
            let n = PointedThickening::at_point(family.build(&y, s), py.basepoint)?;
            let w = thickening_wedge(&m, &n)?;
            let v = family.build(w.thickening.space(), s);
            let d = WedgeDeformation::new(&v, &m, &n)?;
            verify_deformation(DeformationTarget::Wedge(&d), samples, seed)?
        };
        let pass = report.passed();
        return Ok(Outcome {
            command: "verify",
            files: vec![input, other],
            flags,
            csv: Some(vec![
                vec!["suite".into(), "pass".into(), "sampled_lipschitz".into(), "failures".into()],
                vec![suite.clone(), pass.to_string(), report.sampled_lipschitz.to_string(), report.failures.len().to_string()],
            ]),
            results: serde_json::to_value(&report).map_err(Error::from)?,
            pass: Some(pass),
        });
    }
    let which: Suite = suite.parse().map_err(|_| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        Failure::Usage(format!("unknown suite `{suite}`; expected product, wedge or one of {}", names.join(", ")))
    })?;
    let defaults = SuiteConfig::default();
    let config = SuiteConfig {
        seed,
        instances: instances.unwrap_or(match which {
            Suite::Coproduct | Suite::HomotopyProduct | Suite::HomotopyWedge => 5,
            _ => defaults.instances,
        }),
        samples: samples.unwrap_or(match which {
            Suite::MetricAxioms => 200,
            _ => defaults.samples,
        }),
        dim_cap,
    };
    let report = run_suite(which, &config)?;
    Ok(Outcome {
        command: "verify",
        files: Vec::new(),
        flags,
        csv: Some(vec![
            vec!["suite".into(), "pass".into(), "checks".into(), "failures".into()],
            vec![
                report.suite.into(),
                report.pass.to_string(),
                report.checks.to_string(),
                report.failures.len().to_string(),
            ],
        ]),
        pass: Some(report.pass),
        results: serde_json::to_value(&report).map_err(Error::from)?,
    })
}

fn flatten_flags(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_flags(&key, v, out);
            }
        }
        Value::Null => {}
        Value::String(s) => {
            out.insert(prefix.to_owned(), s.clone());
        }
        other => {
            out.insert(prefix.to_owned(), other.to_string());
        }
    }
}

fn emit(outcome: Outcome, common: &Common, started: Instant) -> Result<(), Failure> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match (common.format, &outcome.csv) {
        (Format::Csv, Some(rows)) => {
            let mut w = csv::Writer::from_writer(&mut lock);
            for row in rows {
                w.write_record(row).map_err(|e| Failure::Lib(Error::Io(e.into())))?;
            }
            w.flush()?;
        }
        _ => {
            let body = if outcome.command == "verify" {
                &json!({"pass": outcome.pass, "results": outcome.results})
            } else {
                &outcome.results
            };
            serde_json::to_writer_pretty(&mut lock, body).map_err(Error::from)?;
            writeln!(lock)?;
        }
    }
    if let Some(path) = &common.report {
        let mut flag_map = BTreeMap::new();
        flatten_flags("", &outcome.flags, &mut flag_map);
        flag_map.insert("format".into(), format!("{:?}", common.format).to_lowercase());
        let report = RunReport {
            command: outcome.command.to_owned(),
            inputs: Inputs {
                files: outcome.files.iter().map(|f| FileDigest::of(f)).collect::<Result<_, _>>()?,
                flags: flag_map,
            },
            results: outcome.results,
            pass: outcome.pass,
            timing: started.elapsed().as_secs_f64(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&report).map_err(Error::from)?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let started = Instant::now();
    let (result, common) = match cli.command {
        Command::Complex { space, build, r, common } => (cmd_complex(space, build, r), common),
        Command::Betti {
            space,
            build,
            r_grid,
            r,
            dim_cap,
            common,
        } => (cmd_betti(space, build, r_grid, r, dim_cap), common),
        Command::Wasserstein {
            space,
            metric,
            mu,
            nu,
            p,
            common,
        } => (cmd_wasserstein(space, metric, mu, nu, p), common),
        Command::Contains {
            space,
            build,
            r,
            measure,
            common,
        } => (cmd_contains(space, build, r, measure), common),
        Command::Verify {
            suite,
            seed,
            samples,
            instances,
            dim_cap,
            input,
            other,
            metric,
            construction,
            convention,
            r,
            base,
            other_base,
            common,
        } => (
            cmd_verify(
                suite,
                seed,
                samples,
                instances,
                dim_cap,
                input,
                other,
                metric,
                construction,
                convention,
                r,
                base,
                other_base,
            ),
            common,
        ),
    };
    let outcome = result.and_then(|o| {
        let pass = o.pass;
        emit(o, &common, started).map(|()| pass)
    });
    match outcome {
        Ok(Some(false)) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
