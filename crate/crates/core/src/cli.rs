//! The `qrsg` command line: flat `key = value` configuration merged with
//! flags, subcommand execution, and artifact writers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Value};

use crate::constructions::{build_necklace, build_trap, cantor_shell_dimension, cantor_shell_system};
use crate::error::Error;
use crate::geometry::SpherePoint;
use crate::ifs::{chaos_game, similarity_dimension, Region};
use crate::perfectness::{separating_annuli, uniform_perfectness_estimate};
use crate::powermaps::{julia_radius, StretchParams};
use crate::semigroup::{word_log_julia_radii, SemigroupSpec};
use crate::powermaps::PowerMap;
use crate::verify;
use crate::zorich::ZorichMap;

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "QRSG_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "qrsg-out";

#[derive(Debug, Parser)]
#[command(name = "qrsg", version, about = "Julia sets of quasiregular semigroups")]
pub struct Cli {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides the config file and QRSG_OUT_DIR).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radius of the Julia sphere of f_{d,λ}.
    JuliaSphere(JuliaSphereArgs),
    /// Word radii and a point cloud for the two-generator ring semigroup.
    Ring(RingArgs),
    /// Dimension and radial sample of a Cantor-shell semigroup.
    CantorShell(CantorShellArgs),
    /// Validated torus necklace with stage point clouds.
    Necklace(NecklaceArgs),
    /// Conformal-trap system and an attractor cloud.
    Trap(TrapArgs),
    /// Separating annuli and α̂ of a point cloud.
    Perfectness(PerfectnessArgs),
    /// Similarity dimension of a list of ratios.
    Dimension(DimensionArgs),
    /// Runs every acceptance check and prints a pass/fail table.
    Verify,
}

#[derive(Debug, Args)]
pub struct JuliaSphereArgs {
    #[arg(long = "d", allow_hyphen_values = true)]
    pub d: Option<i64>,
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RingArgs {
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub maxlen: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CantorShellArgs {
    #[arg(long = "N")]
    pub big_n: Option<u32>,
    #[arg(long = "n")]
    pub n: Option<u32>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NecklaceArgs {
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub stages: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrapArgs {
    #[arg(long = "d")]
    pub d: Option<usize>,
    /// Trap center, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Target centers, `;` between points and `,` between coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub centers: Option<String>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PerfectnessArgs {
    /// Point cloud, one point per line.
    #[arg(long)]
    pub input: Option<String>,
    /// Rows written to the annulus table.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DimensionArgs {
    #[arg(long)]
    pub ratios: Option<String>,
}

/// Failure classes mapped to exit codes 2 and 1.
#[derive(Debug)]
pub enum CliError {
    Invalid { kind: &'static str, message: String },
    Internal(String),
    /// `verify` found failing criteria.
    Failed(Vec<u32>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 2,
            CliError::Internal(_) | CliError::Failed(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Invalid { kind, message } => json!({"error": kind, "message": message}),
            CliError::Internal(m) => json!({"error": "internal", "message": m}),
            CliError::Failed(ids) => json!({"error": "verification-failed", "criteria": ids}),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        CliError::Invalid {
            kind: "invalid-parameter",
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Invalid {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
}

const GLOBAL_KEYS: [&str; 3] = ["seed", "out", "threads"];

fn allowed_keys(command: &str) -> &'static [&'static str] {
    match command {
        "julia-sphere" => &["d", "lambda"],
        "ring" => &["a", "maxlen", "points"],
        "cantor-shell" => &["N", "n", "points"],
        "necklace" => &["m", "R", "rho", "stages"],
        "trap" => &["d", "x0", "centers", "a", "b", "points", "burnin"],
        "perfectness" => &["input", "limit"],
        "dimension" => &["ratios"],
        _ => &[],
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::invalid(format!("config line {}: expected key = value", no + 1)))?;
        let (k, v) = (k.trim(), v.trim().trim_matches('"'));
        if k.is_empty() {
            return Err(CliError::invalid(format!("config line {}: empty key", no + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::invalid(format!("config key `{k}` given twice")));
        }
    }
    Ok(out)
}

fn opt<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(ToString::to_string)
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::JuliaSphere(_) => "julia-sphere",
            Command::Ring(_) => "ring",
            Command::CantorShell(_) => "cantor-shell",
            Command::Necklace(_) => "necklace",
            Command::Trap(_) => "trap",
            Command::Perfectness(_) => "perfectness",
            Command::Dimension(_) => "dimension",
            Command::Verify => "verify",
        }
    }

    fn flags(&self) -> Vec<(&'static str, Option<String>)> {
        match self {
            Command::JuliaSphere(a) => vec![("d", opt(&a.d)), ("lambda", opt(&a.lambda))],
            Command::Ring(a) => vec![
                ("a", opt(&a.a)),
                ("maxlen", opt(&a.maxlen)),
                ("points", opt(&a.points)),
            ],
            Command::CantorShell(a) => vec![
                ("N", opt(&a.big_n)),
                ("n", opt(&a.n)),
                ("points", opt(&a.points)),
            ],
            Command::Necklace(a) => vec![
                ("m", opt(&a.m)),
                ("R", opt(&a.big_r)),
                ("rho", opt(&a.rho)),
                ("stages", opt(&a.stages)),
            ],
            Command::Trap(a) => vec![
                ("d", opt(&a.d)),
                ("x0", a.x0.clone()),
                ("centers", a.centers.clone()),
                ("a", opt(&a.a)),
                ("b", opt(&a.b)),
                ("points", opt(&a.points)),
                ("burnin", opt(&a.burnin)),
            ],
            Command::Perfectness(a) => vec![("input", a.input.clone()), ("limit", opt(&a.limit))],
            Command::Dimension(a) => vec![("ratios", a.ratios.clone())],
            Command::Verify => vec![],
        }
    }
}

impl RunConfig {
    /// Merges defaults < config file < flags; the output directory also
    /// honours [`OUT_DIR_ENV`] between file and flag.
    pub fn resolve(cli: &Cli, file: Option<&str>, env_out: Option<String>) -> CliResult<Self> {
        let command = cli.command.name();
        let allowed = allowed_keys(command);
        let mut params = BTreeMap::new();
        let mut seed = 0u64;
        let mut out_dir = PathBuf::from(DEFAULT_OUT_DIR);
        let mut threads = None;
        if let Some(text) = file {
            for (k, v) in parse_config(text)? {
                match k.as_str() {
                    "seed" => seed = parse_num(&k, &v)?,
                    "out" => out_dir = PathBuf::from(v),
                    "threads" => threads = Some(parse_num(&k, &v)?),
                    _ if allowed.contains(&k.as_str()) => {
                        params.insert(k, v);
                    }
                    _ => {
                        return Err(CliError::invalid(format!(
                            "unknown key `{k}` for `{command}` (allowed: {})",
                            allowed.iter().chain(GLOBAL_KEYS.iter()).copied().collect::<Vec<_>>().join(", ")
                        )))
                    }
                }
            }
        }
        if let Some(dir) = env_out.filter(|s| !s.is_empty()) {
            out_dir = PathBuf::from(dir);
        }
        for (k, v) in cli.command.flags() {
            if let Some(v) = v {
                params.insert(k.to_string(), v);
            }
        }
        if let Some(s) = cli.seed {
            seed = s;
        }
        if let Some(o) = &cli.out {
            out_dir = o.clone();
        }
        if cli.threads.is_some() {
            threads = cli.threads;
        }
        if threads == Some(0) {
            return Err(CliError::invalid("threads must be positive"));
        }
        Ok(RunConfig {
            command: command.to_string(),
            params,
            seed,
            out_dir,
            threads,
        })
    }

    fn get<T: std::str::FromStr + ToString>(&mut self, key: &str, default: T) -> CliResult<T> {
        match self.params.get(key) {
            Some(v) => parse_num(key, v),
            None => {
                self.params.insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    fn get_str(&mut self, key: &str, default: &str) -> String {
        self.params
            .entry(key.to_string())
            .or_insert_with(|| default.to_string())
            .clone()
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.trim()
        .parse()
        .map_err(|_| CliError::invalid(format!("`{key}`: cannot parse `{v}`")))
}

fn parse_list(key: &str, v: &str) -> CliResult<Vec<f64>> {
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

fn parse_points(key: &str, v: &str) -> CliResult<Vec<SpherePoint>> {
    v.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| Ok(SpherePoint::new(parse_list(key, s)?)?))
        .collect()
}

/// Coordinates with 17 significant digits.
fn fmt_coord(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes one point per line (LF, space separated, 17 significant digits)
/// and returns the number of dropped points at infinity.
pub fn write_pointcloud(points: &[SpherePoint], path: &Path) -> io::Result<usize> {
    let mut text = String::new();
    let mut dropped = 0;
    for p in points {
        match p.coords() {
            Some(c) => {
                let row: Vec<String> = c.iter().map(|&x| fmt_coord(x)).collect();
                text.push_str(&row.join(" "));
                text.push('\n');
            }
            None => dropped += 1,
        }
    }
    fs::write(path, text)?;
    Ok(dropped)
}

/// Reads a cloud written by [`write_pointcloud`] (any whitespace).
pub fn read_pointcloud(path: &Path) -> CliResult<Vec<SpherePoint>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let c = l
                .split_whitespace()
                .map(|s| parse_num("input", s))
                .collect::<CliResult<Vec<f64>>>()?;
            Ok(SpherePoint::new(c)?)
        })
        .collect()
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
    dropped: usize,
}

impl Outputs {
    fn new(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            dropped: 0,
        })
    }

    fn text(&mut self, name: &str, body: &str) -> io::Result<()> {
        fs::write(self.dir.join(name), body)?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn json(&mut self, name: &str, v: &Value) -> io::Result<()> {
        let mut s = serde_json::to_string_pretty(v).map_err(io::Error::other)?;
        s.push('\n');
        self.text(name, &s)
    }

    fn cloud(&mut self, name: &str, points: &[SpherePoint]) -> io::Result<()> {
        self.dropped += write_pointcloud(points, &self.dir.join(name))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

fn scaled(v: Vec<f64>, r: f64) -> SpherePoint {
    SpherePoint::Finite(v.into_iter().map(|a| a * r).collect())
}

/// Executes a resolved configuration; returns the JSON summary printed on
/// standard output.
pub fn execute(mut cfg: RunConfig) -> CliResult<Value> {
    if cfg.command == "verify" {
        return run_verify();
    }
    let mut out = Outputs::new(&cfg.out_dir)?;
    let summary = match cfg.command.as_str() {
        "julia-sphere" => {
            let d: i64 = cfg.get("d", 2)?;
            let lambda: f64 = cfg.get("lambda", 1.0)?;
            let p = StretchParams::from_lambda(d, lambda)?;
            let v = json!({"d": d, "lambda": lambda, "radius": julia_radius(&p)?});
            out.json("julia_sphere.json", &v)?;
            v
        }
        "ring" => run_ring(&mut cfg, &mut out)?,
        "cantor-shell" => run_cantor(&mut cfg, &mut out)?,
        "necklace" => run_necklace(&mut cfg, &mut out)?,
        "trap" => run_trap(&mut cfg, &mut out)?,
        "perfectness" => run_perfectness(&mut cfg, &mut out)?,
        "dimension" => {
            let raw = cfg.get_str("ratios", "0.5,0.25");
            let ratios = parse_list("ratios", &raw)?;
            let v = json!({"ratios": ratios, "s": similarity_dimension(&ratios)?});
            out.json("dimension.json", &v)?;
            v
        }
        other => return Err(CliError::invalid(format!("unknown command `{other}`"))),
    };
    let manifest = json!({
        "command": cfg.command,
        "params": cfg.params,
        "seed": cfg.seed,
        "threads": cfg.threads,
        "out_dir": cfg.out_dir.display().to_string(),
        "outputs": out.files,
        "warnings": {"infinite_points_dropped": out.dropped},
        "version": env!("CARGO_PKG_VERSION"),
    });
    out.json("manifest.json", &manifest)?;
    Ok(summary)
}

fn run_verify() -> CliResult<Value> {
    let outcomes = verify::run_all();
    let mut table = String::new();
    for o in &outcomes {
        let _ = writeln!(table, "{}", o.line());
    }
    eprint!("{table}");
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if failed.is_empty() {
        Ok(json!({"passed": outcomes.len(), "failed": []}))
    } else {
        Err(CliError::Failed(failed))
    }
}

fn run_ring(cfg: &mut RunConfig, out: &mut Outputs) -> CliResult<Value> {
    let a: f64 = cfg.get("a", 4.0)?;
    let maxlen: usize = cfg.get("maxlen", 12)?;
    let npoints: usize = cfg.get("points", 10_000)?;
    if !(a > 1.0) {
        return Err(CliError::invalid("ring needs a > 1"));
    }
    let h = ZorichMap::spatial();
    let spec = SemigroupSpec::power(vec![
        PowerMap::with_lambda(2, 1.0, h)?,
        PowerMap::with_lambda(2, 1.0 / a, h)?,
    ])?;
    let logs = word_log_julia_radii(&spec, maxlen)?;
    let mut csv = String::from("index,radius\n");
    for (i, l) in logs.iter().enumerate() {
        let _ = writeln!(csv, "{i},{}", fmt_coord(l.exp()));
    }
    out.text("ring_radii.csv", &csv)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let cloud: Vec<SpherePoint> = (0..npoints)
        .map(|_| {
            let r = logs[rng.random_range(0..logs.len())].exp();
            scaled(unit_vector(&mut rng, 3), r)
        })
        .collect();
    out.cloud("ring_cloud.xyz", &cloud)?;
    let max_gap = logs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let v = json!({
        "a": a, "maxlen": maxlen, "radii": logs.len(),
        "rmin": logs[0].exp(), "rmax": logs[logs.len() - 1].exp(),
        "max_log_gap": max_gap,
    });
    out.json("ring.json", &v)?;
    Ok(v)
}

fn run_cantor(cfg: &mut RunConfig, out: &mut Outputs) -> CliResult<Value> {
    let big_n: u32 = cfg.get("N", 4)?;
    let n: u32 = cfg.get("n", 3)?;
    let npoints: usize = cfg.get("points", 10_000)?;
    let sys = cantor_shell_system(big_n)?;
    let dim = cantor_shell_dimension(big_n, n)?;
    let sample = chaos_game(sys.system(), npoints.max(1), 64, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let cloud: Vec<SpherePoint> = sample
        .points
        .iter()
        .map(|t| scaled(unit_vector(&mut rng, n as usize), 2f64.powf(t.coords().unwrap_or(&[0.0])[0])))
        .collect();
    out.cloud("cantor_shell_cloud.xyz", &cloud)?;
    let v = json!({
        "N": big_n, "n": n, "ratios": sys.ratios(),
        "radial_dimension": dim - (n - 1) as f64, "dimension": dim,
    });
    out.json("cantor_shell.json", &v)?;
    Ok(v)
}

fn run_necklace(cfg: &mut RunConfig, out: &mut Outputs) -> CliResult<Value> {
    let m: usize = cfg.get("m", 36)?;
    let big_r: f64 = cfg.get("R", 1.0)?;
    let rho: f64 = cfg.get("rho", 0.2)?;
    let stages: usize = cfg.get("stages", 2)?;
    let chain = build_necklace(m, big_r, rho)?;
    for k in 0..=stages {
        let regions = chain.stage(k)?;
        let per = (512 / regions.len()).clamp(8, 64);
        let cloud: Vec<SpherePoint> = regions
            .iter()
            .flat_map(|r| match r {
                Region::Torus(t) => t.core_samples(per),
                Region::Ball(b) => vec![b.center.clone()],
            })
            .map(SpherePoint::Finite)
            .collect();
        out.cloud(&format!("necklace_stage_{k}.xyz"), &cloud)?;
    }
    let v = json!({
        "m": m, "R": big_r, "rho": rho, "ratio": chain.ratio(),
        "ring_radius": chain.children[0].core_radius,
        "report": chain.report,
    });
    out.json("necklace.json", &v)?;
    Ok(v)
}

fn run_trap(cfg: &mut RunConfig, out: &mut Outputs) -> CliResult<Value> {
    let d: usize = cfg.get("d", 2)?;
    let x0 = cfg.get_str("x0", "0,0,0");
    let centers = cfg.get_str("centers", "4,0,0;-4,0,0");
    let a: f64 = cfg.get("a", 1.0)?;
    let b: f64 = cfg.get("b", 0.4)?;
    let npoints: usize = cfg.get("points", 10_000)?;
    let burnin: usize = cfg.get("burnin", 64)?;
    let x0 = SpherePoint::new(parse_list("x0", &x0)?)?;
    let xi = parse_points("centers", &centers)?;
    let trap = build_trap(d, &x0, &xi, a, b)?;
    let sample = chaos_game(&trap.system, npoints.max(1), burnin, cfg.seed)?;
    out.cloud("trap_cloud.xyz", &sample.points)?;
    let v = json!({
        "d": d, "a": a, "b": b, "max_ratio": trap.system.max_ratio(),
        "accuracy_factor": sample.accuracy_factor,
        "check": trap.check_sample(&sample.points),
    });
    out.json("trap.json", &v)?;
    Ok(v)
}

fn run_perfectness(cfg: &mut RunConfig, out: &mut Outputs) -> CliResult<Value> {
    let input = cfg
        .params
        .get("input")
        .cloned()
        .ok_or_else(|| CliError::invalid("perfectness needs `input`"))?;
    let limit: usize = cfg.get("limit", 1000)?;
    let points = read_pointcloud(Path::new(&input))?;
    let est = uniform_perfectness_estimate(&points)?;
    let mut csv = String::from("center_index,inner,outer,modulus,inside,outside,degenerate\n");
    if points.len() <= 4000 {
        for a in separating_annuli(&points)?.iter().take(limit) {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                a.center_index,
                fmt_coord(a.inner),
                fmt_coord(a.outer),
                fmt_coord(a.modulus),
                a.inside,
                a.outside,
                a.degenerate
            );
        }
    } else if let Some(w) = &est.witness {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            w.center_index,
            fmt_coord(w.inner),
            fmt_coord(w.outer),
            fmt_coord(w.modulus),
            w.inside,
            w.outside,
            w.degenerate
        );
    }
    out.text("annuli.csv", &csv)?;
    let v = json!({"alpha_hat": est.alpha_hat, "points": est.points, "witness": est.witness});
    out.json("perfectness.json", &v)?;
    Ok(v)
}

/// Parses arguments, runs, and reports; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 2 {
                let err = CliError::invalid(e.to_string().trim().to_string());
                eprintln!("{}", err.to_json());
            } else {
                let _ = e.print();
            }
            return code;
        }
    };
    let result = (|| {
        let file = match &cli.config {
            Some(p) => Some(
                fs::read_to_string(p)
                    .map_err(|e| CliError::invalid(format!("cannot read config {}: {e}", p.display())))?,
            ),
            None => None,
        };
        let cfg = RunConfig::resolve(&cli, file.as_deref(), std::env::var(OUT_DIR_ENV).ok())?;
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = cfg.threads {
            builder = builder.num_threads(t);
        }
        let pool = builder.build().map_err(|e| CliError::Internal(e.to_string()))?;
        pool.install(|| execute(cfg))
    })();
    match result {
        Ok(v) => {
            let mut stdout = io::stdout().lock();
            let _ = writeln!(stdout, "{v}");
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("qrsg").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn config_parsing() {
        let m = parse_config("# comment\n a = 2 \nmaxlen=5 # trailing\n\n").unwrap();
        assert_eq!(m.get("a").unwrap(), "2");
        assert_eq!(m.get("maxlen").unwrap(), "5");
        assert!(parse_config("novalue").is_err());
        assert!(parse_config("a = 1\na = 2").is_err());
    }

    #[test]
    fn flags_override_file_and_env_overrides_out() {
        let c = cli(&["ring", "--a", "3"]);
        let cfg = RunConfig::resolve(&c, Some("a = 5\nmaxlen = 4\nout = fromfile\nseed = 9"), Some("fromenv".into())).unwrap();
        assert_eq!(cfg.params["a"], "3");
        assert_eq!(cfg.params["maxlen"], "4");
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.out_dir, PathBuf::from("fromenv"));
        let c = cli(&["--out", "flag", "ring"]);
        let cfg = RunConfig::resolve(&c, None, Some("fromenv".into())).unwrap();
        assert_eq!(cfg.out_dir, PathBuf::from("flag"));
    }

    #[test]
    fn unknown_keys_rejected() {
        let c = cli(&["ring"]);
        let err = RunConfig::resolve(&c, Some("lambda = 2"), None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn coordinates_have_17_significant_digits() {
        assert_eq!(fmt_coord(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_coord(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
