//! Command-line front end. Single analyses write JSON, sweeps write CSV.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cube_rigidity::experiment::{self, SweepConfig};
use cube_rigidity::gamma::{cd_check_with, curvature_at_with, curvature_profile_with, CurvatureTolerances};
use cube_rigidity::graph::MeasureBound;
use cube_rigidity::io::{graph_to_json, parse_graph};
use cube_rigidity::obata::{self, DISTANCE_COMPOSED_TOL};
use cube_rigidity::rigidity::almost_rigidity_report_with;
use cube_rigidity::{cartesian_product, hypercube, spectrum, Error, WeightedGraph};
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_REFUSAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cube-rigidity", version, about = "Curvature, spectra and hypercube rigidity of weighted graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Rescale (w, m) so one vertex has unit measure after loading.
    #[arg(long, global = true)]
    pub normalize_measure: bool,
    /// Tolerance override as key=value; keys: psd_relative, bisection, distance_composed.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundArg {
    TwoSided,
    EdgeRatio,
}

impl From<BoundArg> for MeasureBound {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::TwoSided => MeasureBound::TwoSided,
            BoundArg::EdgeRatio => MeasureBound::EdgeRatio,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit H_d(c) as graph JSON.
    GenHypercube {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        c: f64,
    },
    /// Eigenvalues and eigenfunctions of -Δ.
    Spectrum { input: PathBuf },
    /// Sharp curvature per vertex and its minimum.
    Curvature {
        input: PathBuf,
        #[arg(long = "N", default_value = "inf", value_parser = parse_dimension)]
        n: f64,
        #[arg(long)]
        base_vertex: Option<String>,
    },
    /// Check CD(K, N) at every vertex.
    CdCheck {
        input: PathBuf,
        #[arg(long = "K", allow_negative_numbers = true)]
        k: f64,
        #[arg(long = "N", default_value = "inf", value_parser = parse_dimension)]
        n: f64,
    },
    /// Closeness to H_d(K/2): deficit, Frobenius distance, diameter bound.
    Rigidity {
        input: PathBuf,
        #[arg(long = "K")]
        k: f64,
        #[arg(long)]
        d: usize,
        /// Class bound on the measure; enables the class report together with --max-weighted-degree.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        max_weighted_degree: Option<f64>,
        #[arg(long, value_enum, default_value = "two-sided")]
        measure_bound: BoundArg,
    },
    /// Distance-function diagnostics per base vertex.
    Obata {
        input: PathBuf,
        #[arg(long = "K")]
        k: f64,
        #[arg(long)]
        base_vertex: Option<String>,
        /// Report the residual against span(φ_0..φ_level) instead.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Cartesian product of two unit-measure graphs.
    Product { first: PathBuf, second: PathBuf },
    /// Multiplicative noise on weights and measures.
    Perturb {
        input: PathBuf,
        #[arg(long)]
        sigma_w: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma_m: f64,
        #[arg(long)]
        seed: u64,
    },
    /// Perturbation sweep around H_d(c), written as CSV.
    Sweep {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        sigma_w: Vec<f64>,
        /// Paired with --sigma-w; defaults to the same values.
        #[arg(long, value_delimiter = ',')]
        sigma_m: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', required = true)]
        seeds: Vec<u64>,
    },
    /// Whether a function is constant on every sphere about a vertex.
    DistanceComposed {
        input: PathBuf,
        /// JSON object mapping vertex id to value.
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        base_vertex: Option<String>,
    },
}

fn parse_dimension(s: &str) -> Result<f64, String> {
    match s {
        "inf" | "infinity" | "Infinity" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().map_err(|e| e.to_string()),
    }
}

fn dimension_value(n: f64) -> Value {
    if n.is_infinite() {
        json!("inf")
    } else {
        json!(n)
    }
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s.split_once('=').ok_or("expected key=value")?;
    if !["psd_relative", "bisection", "distance_composed"].contains(&key) {
        return Err(format!("unknown tolerance {key:?}"));
    }
    let v: f64 = value.parse().map_err(|e| format!("{e}"))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(format!("tolerance {key} must be positive"));
    }
    Ok((key.to_string(), v))
}

/// A failure with its exit code and machine-readable body.
#[derive(Debug)]
pub struct Failure {
    pub exit_code: i32,
    pub body: Value,
}

impl Failure {
    fn validation(code: &str, message: impl Into<String>) -> Self {
        Failure { exit_code: EXIT_VALIDATION, body: json!({ "error": code, "message": message.into() }) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            exit_code: if e.is_refusal() { EXIT_REFUSAL } else { EXIT_VALIDATION },
            body: json!({ "error": e.code(), "message": e.to_string() }),
        }
    }
}

impl From<clap::Error> for Failure {
    fn from(e: clap::Error) -> Self {
        Failure::validation("Usage", e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

struct Context {
    normalize: bool,
    curvature: CurvatureTolerances,
    distance_composed: f64,
}

impl Context {
    fn new(common: &Common) -> Self {
        let mut ctx = Context {
            normalize: common.normalize_measure,
            curvature: CurvatureTolerances::default(),
            distance_composed: DISTANCE_COMPOSED_TOL,
        };
        for (key, v) in &common.tolerances {
            match key.as_str() {
                "psd_relative" => ctx.curvature.psd_relative = *v,
                "bisection" => ctx.curvature.bisection = *v,
                _ => ctx.distance_composed = *v,
            }
        }
        ctx
    }

    fn load(&self, path: &Path) -> Outcome<WeightedGraph> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::validation("Io", format!("{}: {e}", path.display())))?;
        Ok(parse_graph(&text, self.normalize)?)
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Runs one parsed command and returns the report text.
pub fn execute(cli: &Cli) -> Outcome<String> {
    let ctx = Context::new(&cli.common);
    let text = match &cli.command {
        Command::GenHypercube { d, c } => {
            let mut s = graph_to_json(&hypercube(*d, *c)?);
            s.push('\n');
            s
        }
        Command::Spectrum { input } => pretty(&spectrum(&ctx.load(input)?)),
        Command::Curvature { input, n, base_vertex } => {
            let g = ctx.load(input)?;
            match base_vertex {
                Some(id) => {
                    let x = g.index_of(id)?;
                    let k = curvature_at_with(&g, x, *n, &ctx.curvature)?;
                    pretty(&json!({ "N": dimension_value(*n), "base_vertex": id, "K": k }))
                }
                None => {
                    let profile = curvature_profile_with(&g, *n, &ctx.curvature)?;
                    let argmin = (0..g.len()).fold(0, |b, x| if profile[x] < profile[b] { x } else { b });
                    let per_vertex: BTreeMap<&str, f64> =
                        (0..g.len()).map(|x| (g.id(x), profile[x])).collect();
                    pretty(&json!({
                        "N": dimension_value(*n),
                        "K": profile[argmin],
                        "argmin": g.id(argmin),
                        "profile": per_vertex,
                    }))
                }
            }
        }
        Command::CdCheck { input, k, n } => {
            let g = ctx.load(input)?;
            let c = cd_check_with(&g, *k, *n, &ctx.curvature)?;
            pretty(&json!({
                "K": k,
                "N": dimension_value(*n),
                "holds": c.holds,
                "worst_vertex": g.id(c.worst_vertex),
                "min_eigenvalue": c.min_eigenvalue,
            }))
        }
        Command::Rigidity { input, k, d, delta, max_weighted_degree, measure_bound } => {
            let g = ctx.load(input)?;
            let report = almost_rigidity_report_with(&g, &spectrum(&g), *k, *d)?;
            let mut value = serde_json::to_value(&report).expect("report serializes");
            match (delta, max_weighted_degree) {
                (Some(delta), Some(big_d)) => {
                    let class = g.class_membership(*big_d, *d, *delta, (*measure_bound).into())?;
                    value["class"] = serde_json::to_value(class).expect("class serializes");
                }
                (None, None) => {}
                _ => {
                    return Err(Failure::validation(
                        "InvalidParameter",
                        "--delta and --max-weighted-degree must be given together",
                    ))
                }
            }
            pretty(&value)
        }
        Command::Obata { input, k, base_vertex, level } => {
            let g = ctx.load(input)?;
            let s = spectrum(&g);
            let vertices: Vec<usize> = match base_vertex {
                Some(id) => vec![g.index_of(id)?],
                None => (0..g.len()).collect(),
            };
            match level {
                Some(level) => {
                    let records = vertices
                        .iter()
                        .map(|&x| {
                            let r = obata::generalized_obata(&g, &s, x, *level)?;
                            Ok(json!({ "base_vertex": g.id(x), "level": level, "residual": r }))
                        })
                        .collect::<Outcome<Vec<_>>>()?;
                    pretty(&records)
                }
                None => {
                    let records = vertices
                        .iter()
                        .map(|&x| obata::obata_report(&g, &s, *k, x))
                        .collect::<Result<Vec<_>, _>>()?;
                    pretty(&records)
                }
            }
        }
        Command::Product { first, second } => {
            let mut s = graph_to_json(&cartesian_product(&ctx.load(first)?, &ctx.load(second)?)?);
            s.push('\n');
            s
        }
        Command::Perturb { input, sigma_w, sigma_m, seed } => {
            let mut s = graph_to_json(&ctx.load(input)?.perturb(*sigma_w, *sigma_m, *seed)?);
            s.push('\n');
            s
        }
        Command::Sweep { d, c, sigma_w, sigma_m, seeds } => {
            let config = SweepConfig {
                d: *d,
                c: *c,
                sigma_w: sigma_w.clone(),
                sigma_m: sigma_m.clone(),
                seeds: seeds.clone(),
            };
            experiment::to_csv(&experiment::sweep(&config)?)
        }
        Command::DistanceComposed { input, function, base_vertex } => {
            let g = ctx.load(input)?;
            let h = load_function(&g, function)?;
            let bases: Vec<usize> = match base_vertex {
                Some(id) => vec![g.index_of(id)?],
                None => (0..g.len()).collect(),
            };
            let mut result = BTreeMap::new();
            for p in bases {
                result.insert(g.id(p), obata::is_distance_composed(&g, &h, p, ctx.distance_composed)?);
            }
            pretty(&json!({ "tol": ctx.distance_composed, "distance_composed": result }))
        }
    };
    Ok(text)
}

fn load_function(g: &WeightedGraph, path: &Path) -> Outcome<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::validation("Io", format!("{}: {e}", path.display())))?;
    let values: BTreeMap<String, f64> = serde_json::from_str(&text)
        .map_err(|e| Failure::validation("InvalidParameter", format!("function JSON: {e}")))?;
    let mut h = vec![f64::NAN; g.len()];
    for (id, v) in values {
        h[g.index_of(&id)?] = v;
    }
    if let Some(x) = h.iter().position(|v| v.is_nan()) {
        return Err(Failure::validation("InvalidParameter", format!("no value for vertex {:?}", g.id(x))));
    }
    Ok(h)
}

/// Parses arguments, runs, and writes the report. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let outcome = Cli::try_parse_from(args).map_err(|e| {
        if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
            let _ = e.print();
            return None;
        }
        Some(Failure::from(e))
    });
    let cli = match outcome {
        Ok(cli) => cli,
        Err(None) => return 0,
        Err(Some(f)) => return report_failure(f),
    };
    match execute(&cli) {
        Ok(text) => match &cli.common.out {
            Some(path) => match fs::write(path, text) {
                Ok(()) => 0,
                Err(e) => report_failure(Failure::validation("Io", format!("{}: {e}", path.display()))),
            },
            None => {
                print!("{text}");
                0
            }
        },
        Err(f) => report_failure(f),
    }
}

fn report_failure(f: Failure) -> i32 {
    eprintln!("{}", f.body);
    f.exit_code
}
