//! Argument parsing and subcommand drivers for the `chermnykh` binary.
//!
//! Every subcommand validates all of its inputs before computing anything.
//! Exit status: 0 on success, 1 on numerical failure, 2 on invalid input.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use chermnykh::dynamics::{self, IntegrateOptions};
use chermnykh::equilibria::{find_all_with, find_family, Family, SeedMode};
use chermnykh::stability::{routh_boundary, stability_report, StabilityReport};
use chermnykh::zvc::{self, svg, BBox, ContourSet, OvalSettings};
use chermnykh::{derive_params, presets, Error, Exec, ModelInputs, ModelParams, PhaseState};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const THREADS_ENV: &str = "CHERMNYKH_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "chermnykh",
    version,
    about = "Photogravitational Chermnykh problem with Poynting-Robertson drag"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate the five equilibrium points and classify their stability.
    Equilibria(EquilibriaArgs),
    /// Full linear-stability reports (matrix, coefficients, roots).
    Stability(StabilityArgs),
    /// Zero-velocity curves C = 2 Omega(x, y).
    Zvc(ZvcArgs),
    /// Integrate one trajectory and report the Jacobi drift.
    Integrate(IntegrateArgs),
    /// Oval diagnostics around L4/L5 over the standard twelve-frame grid.
    Table1(Table1Args),
    /// Critical mass ratio of the classical triangular points.
    Routh(RouthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
    Text,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
            Format::Text => "txt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeedArg {
    /// Position series, classical fallback.
    #[value(alias = "series")]
    Paper,
    Classical,
}

impl From<SeedArg> for SeedMode {
    fn from(s: SeedArg) -> Self {
        match s {
            SeedArg::Paper => SeedMode::Series,
            SeedArg::Classical => SeedMode::Classical,
        }
    }
}

/// Model parameters: defaults, then `--preset`, then individual flags.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// Built-in preset (sun-earth, classical, table1) or a preset file.
    #[arg(long)]
    pub preset: Option<String>,
    /// Mass ratio, 0 < mu <= 1/2.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Mass-reduction factor of the larger primary, 0 <= q1 <= 1.
    #[arg(long)]
    pub q1: Option<f64>,
    /// Oblateness coefficient of the smaller primary.
    #[arg(long)]
    pub a2: Option<f64>,
    /// Belt mass.
    #[arg(long)]
    pub mb: Option<f64>,
    /// Belt width parameter a + b.
    #[arg(long)]
    pub t: Option<f64>,
    /// Dimensionless speed of light.
    #[arg(long)]
    pub cd: Option<f64>,
}

impl ModelArgs {
    fn any_set(&self) -> bool {
        self.preset.is_some()
            || [self.mu, self.q1, self.a2, self.mb, self.t, self.cd]
                .iter()
                .any(Option::is_some)
    }

    pub fn resolve(&self, base: ModelInputs) -> Result<ModelInputs, CliError> {
        let mut inputs = match &self.preset {
            None => base,
            Some(name) => match presets::builtin(name) {
                Some(p) => p,
                None => {
                    presets::parse_onto(base, &read(Path::new(name))?).map_err(CliError::from)?
                }
            },
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut inputs.mu, self.mu);
        set(&mut inputs.q1, self.q1);
        set(&mut inputs.a2, self.a2);
        set(&mut inputs.mb, self.mb);
        set(&mut inputs.t, self.t);
        set(&mut inputs.cd, self.cd);
        inputs.validate()?;
        Ok(inputs)
    }

    fn params(&self) -> Result<ModelParams, CliError> {
        Ok(derive_params(self.resolve(ModelInputs::default())?)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output directory; results go to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct EquilibriaArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value = "paper")]
    pub seed_mode: SeedArg,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value = "paper")]
    pub seed_mode: SeedArg,
    /// Restrict to one family (L1..L5).
    #[arg(long)]
    pub family: Option<Family>,
}

#[derive(Debug, Args)]
pub struct ZvcArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Nodes per side.
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    /// xmin,xmax,ymin,ymax
    #[arg(long, default_value = "-1.6,1.6,-1.6,1.6", allow_hyphen_values = true)]
    pub bbox: String,
    /// Contour levels; defaults to each equilibrium's C plus --offset.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub level: Vec<f64>,
    #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
    pub offset: f64,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Start at an equilibrium (displaced by --dx, --dy) instead of --x/--y.
    #[arg(long, conflicts_with_all = ["x", "y"])]
    pub from: Option<Family>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub vx: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub vy: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub dx: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub dy: f64,
    /// Final time (negative integrates backwards).
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output spacing; every accepted step when omitted.
    #[arg(long)]
    pub stride: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    /// Base model (defaults: mu 0.025, T 0.01, Mb 0.2).
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    #[arg(long, default_value = "-1.6,1.6,-1.6,1.6", allow_hyphen_values = true)]
    pub bbox: String,
    /// Oval area separating "yes" from "very-small".
    #[arg(long, default_value_t = 1.0)]
    pub area_threshold: f64,
    /// First level offset of the oval search.
    #[arg(long, default_value_t = 1e-3)]
    pub delta_start: f64,
    #[arg(long, default_value_t = 4.096)]
    pub delta_max: f64,
    /// One row per q1 value.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    pub q1_list: Vec<f64>,
    /// One column per A2 value.
    #[arg(long, value_delimiter = ',', default_value = "0,0.02,0.04")]
    pub a2_list: Vec<f64>,
    /// Belt masses of the final row (q1 = 1, A2 = 0.02).
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    pub mb_list: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct RouthArgs {
    /// Rejected: the boundary is defined for the classical problem only.
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::Invalid(_) | Error::Preset { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read preset '{}': {e}", path.display())))
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn pick(
    format: Option<Format>,
    default: Format,
    allowed: &[Format],
    cmd: &str,
) -> Result<Format, CliError> {
    let f = format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(invalid(format!(
            "{cmd} does not support --format {}",
            f.to_possible_value()
                .expect("no skipped variants")
                .get_name()
        )))
    }
}

/// Writes to `<out>/<stem>.<ext>` (creating the directory) or to `stdout`.
fn emit(
    output: &OutputArgs,
    stem: &str,
    format: Format,
    content: &str,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &output.out {
        None => stdout.write_all(content.as_bytes()).map_err(io),
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(io)?;
            let path = dir.join(format!("{stem}.{}", format.ext()));
            std::fs::write(&path, content).map_err(io)?;
            writeln!(stdout, "wrote {}", path.display()).map_err(io)
        }
    }
}

fn check_grid(n: usize) -> Result<(), CliError> {
    if n < zvc::MIN_RESOLUTION {
        return Err(invalid(format!(
            "--grid must be at least {}",
            zvc::MIN_RESOLUTION
        )));
    }
    Ok(())
}

/// Applies `CHERMNYKH_THREADS` to the global pool.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        invalid(format!(
            "{THREADS_ENV} must be a positive integer, got '{v}'"
        ))
    })?;
    #[cfg(feature = "parallel")]
    {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Equilibria(a) => cmd_equilibria(a, stdout),
        Command::Stability(a) => cmd_stability(a, stdout),
        Command::Zvc(a) => cmd_zvc(a, stdout),
        Command::Integrate(a) => cmd_integrate(a, stdout),
        Command::Table1(a) => cmd_table1(a, stdout),
        Command::Routh(a) => cmd_routh(a, stdout),
    }
}

#[derive(Serialize)]
struct EquilibriumRow {
    family: Family,
    x: f64,
    y: f64,
    residual: f64,
    iterations: usize,
    seed: chermnykh::equilibria::SeedKind,
    class: chermnykh::StabilityClass,
    max_re: f64,
}

fn reports(p: &ModelParams, mode: SeedMode) -> Result<Vec<StabilityReport>, CliError> {
    let points = find_all_with(p, mode, Exec::default())?;
    points
        .iter()
        .map(|pt| stability_report(p, pt).map_err(CliError::from))
        .collect()
}

pub fn cmd_equilibria(a: &EquilibriaArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = pick(
        a.output.format,
        Format::Csv,
        &[Format::Csv, Format::Json],
        "equilibria",
    )?;
    let p = a.model.params()?;
    let rows: Vec<EquilibriumRow> = reports(&p, a.seed_mode.into())?
        .into_iter()
        .map(|r| EquilibriumRow {
            family: r.point.family,
            x: r.point.x,
            y: r.point.y,
            residual: r.point.residual,
            iterations: r.point.iterations,
            seed: r.point.seed_kind,
            class: r.class,
            max_re: r.max_re,
        })
        .collect();
    let body = match format {
        Format::Json => json(&rows),
        _ => {
            let mut s = String::from("family,x,y,residual,iterations,seed,class,max_re\n");
            for r in &rows {
                let seed = serde_json::to_value(r.seed).expect("enum serializes");
                let _ = writeln!(
                    s,
                    "{},{},{},{:e},{},{},{},{:e}",
                    r.family,
                    r.x,
                    r.y,
                    r.residual,
                    r.iterations,
                    seed.as_str().unwrap_or_default(),
                    r.class,
                    r.max_re
                );
            }
            s
        }
    };
    emit(&a.output, "equilibria", format, &body, stdout)
}

pub fn cmd_stability(a: &StabilityArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = pick(
        a.output.format,
        Format::Json,
        &[Format::Json, Format::Csv],
        "stability",
    )?;
    let p = a.model.params()?;
    let mode: SeedMode = a.seed_mode.into();
    let reports = match a.family {
        Some(f) => vec![stability_report(&p, &find_family(&p, f, mode)?)?],
        None => reports(&p, mode)?,
    };
    let body = match format {
        Format::Csv => {
            let mut s = String::from("family,class,max_re,coeff_discrepancy,a,b,c,d");
            for k in 1..=4 {
                let _ = write!(s, ",root{k}_re,root{k}_im");
            }
            s.push('\n');
            for r in &reports {
                let q = &r.coeffs_matrix;
                let _ = write!(
                    s,
                    "{},{},{:e},{:e},{},{},{},{}",
                    r.point.family, r.class, r.max_re, r.coeff_discrepancy, q.a, q.b, q.c, q.d
                );
                for z in &r.roots {
                    let _ = write!(s, ",{},{}", z.re, z.im);
                }
                s.push('\n');
            }
            s
        }
        _ => json(&reports),
    };
    emit(&a.output, "stability", format, &body, stdout)
}

#[derive(Serialize)]
struct ZvcOutput<'a> {
    params: &'a ModelInputs,
    bbox: BBox,
    grid: usize,
    /// How the levels were chosen.
    levels_from: String,
    contours: &'a [ContourSet],
}

pub fn cmd_zvc(a: &ZvcArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = pick(
        a.output.format,
        Format::Csv,
        &[Format::Csv, Format::Json, Format::Svg],
        "zvc",
    )?;
    let p = a.model.params()?;
    let bbox: BBox = a.bbox.parse()?;
    check_grid(a.grid)?;
    if a.level.iter().any(|v| !v.is_finite()) || !a.offset.is_finite() {
        return Err(invalid("contour levels must be finite"));
    }
    let points = find_all_with(&p, SeedMode::Series, Exec::default())?;
    let (levels, levels_from) = if a.level.is_empty() {
        let mut ls = Vec::new();
        for pt in &points {
            let c = 2.0 * chermnykh::model::static_potential(&p, pt.x, pt.y)? + a.offset;
            if !ls.iter().any(|v: &f64| (v - c).abs() < 1e-12) {
                ls.push(c);
            }
        }
        (ls, format!("C of each equilibrium point + {}", a.offset))
    } else {
        (a.level.clone(), "user supplied".to_string())
    };
    let grid = zvc::sample_grid(&p, bbox, a.grid, a.grid)?;
    let sets: Vec<ContourSet> = levels
        .iter()
        .map(|&l| zvc::extract_contours(&grid, l))
        .collect();
    let body = match format {
        Format::Svg => svg::render(&sets, &bbox, &p, &points),
        Format::Json => json(&ZvcOutput {
            params: p.inputs(),
            bbox,
            grid: a.grid,
            levels_from,
            contours: &sets,
        }),
        _ => {
            let mut s = String::from("level,component,closed,x,y\n");
            let mut id = 0;
            for set in &sets {
                for c in &set.components {
                    for &(x, y) in &c.points {
                        let _ = writeln!(s, "{},{id},{},{x},{y}", set.level, c.closed);
                    }
                    id += 1;
                }
            }
            s
        }
    };
    emit(&a.output, "zvc", format, &body, stdout)
}

#[derive(Serialize)]
struct IntegrateOutput<'a> {
    drift: dynamics::DriftReport,
    trajectory: &'a dynamics::Trajectory,
}

pub fn cmd_integrate(a: &IntegrateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = pick(
        a.output.format,
        Format::Csv,
        &[Format::Csv, Format::Json],
        "integrate",
    )?;
    let p = a.model.params()?;
    let opts = IntegrateOptions {
        tol: a.tol,
        stride: a.stride,
        ..IntegrateOptions::default()
    };
    if !a.t_end.is_finite() {
        return Err(invalid("--t-end must be finite"));
    }
    let (x, y) = match (a.from, a.x, a.y) {
        (Some(f), _, _) => {
            let pt = find_family(&p, f, SeedMode::Series)?;
            (pt.x + a.dx, pt.y + a.dy)
        }
        (None, Some(x), Some(y)) => (x + a.dx, y + a.dy),
        _ => return Err(invalid("give --from FAMILY or both --x and --y")),
    };
    let traj = dynamics::integrate_with(&p, PhaseState::new(x, y, a.vx, a.vy), a.t_end, &opts)?;
    let body = match format {
        Format::Json => json(&IntegrateOutput {
            drift: dynamics::drift_report(&traj)?,
            trajectory: &traj,
        }),
        _ => dynamics::to_csv(&traj),
    };
    emit(&a.output, "trajectory", format, &body, stdout)
}

fn table_frames(a: &Table1Args, base: ModelInputs) -> Result<Vec<zvc::FrameSpec>, CliError> {
    let lists = [&a.q1_list, &a.a2_list, &a.mb_list];
    if lists.iter().any(|l| l.is_empty()) {
        return Err(invalid("sweep lists must not be empty"));
    }
    let label = |k: usize| (b'A' + (k as u8).min(25)) as char;
    let mut frames = Vec::new();
    for (k, &q1) in a.q1_list.iter().enumerate() {
        for &a2 in &a.a2_list {
            frames.push(zvc::FrameSpec {
                row: label(k),
                inputs: ModelInputs { q1, a2, ..base },
            });
        }
    }
    for &mb in &a.mb_list {
        frames.push(zvc::FrameSpec {
            row: label(a.q1_list.len()),
            inputs: ModelInputs {
                q1: 1.0,
                a2: 0.02,
                mb,
                ..base
            },
        });
    }
    for f in &frames {
        f.inputs.validate()?;
    }
    Ok(frames)
}

fn table_text(results: &[zvc::FrameResult]) -> String {
    let mut s = String::new();
    let mut row = None;
    for r in results {
        if row != Some(r.row) {
            if row.is_some() {
                s.push('\n');
            }
            let _ = write!(s, "{}  q1={:<4}", r.row, r.inputs.q1);
            row = Some(r.row);
        }
        let last_row = results.last().map(|x| x.row) == Some(r.row);
        let head = if last_row {
            format!("Mb={}", r.inputs.mb)
        } else {
            format!("A2={}", r.inputs.a2)
        };
        let _ = write!(s, "  {:<22}", format!("{head}:{}", r.class));
    }
    s.lines().map(|l| format!("{}\n", l.trim_end())).collect()
}

pub fn cmd_table1(a: &Table1Args, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = pick(
        a.output.format,
        Format::Text,
        &[Format::Text, Format::Csv, Format::Json],
        "table1",
    )?;
    let base = a
        .model
        .resolve(presets::builtin("table1").expect("shipped preset"))?;
    check_grid(a.grid)?;
    let settings = OvalSettings {
        bbox: a.bbox.parse()?,
        resolution: a.grid,
        area_threshold: a.area_threshold,
        delta_start: a.delta_start,
        delta_max: a.delta_max,
    };
    settings.validate()?;
    let frames = table_frames(a, base)?;
    let results = zvc::table1(&frames, &settings, Exec::default())?;
    let body = match format {
        Format::Json => json(&results),
        Format::Csv => zvc::table1_csv(&results),
        _ => table_text(&results),
    };
    emit(&a.output, "table1", format, &body, stdout)
}

#[derive(Serialize)]
struct RouthOutput {
    mu_crit: f64,
    closed_form: f64,
    tol: f64,
}

pub fn cmd_routh(a: &RouthArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let format = pick(
        a.output.format,
        Format::Text,
        &[Format::Text, Format::Json],
        "routh",
    )?;
    if a.model.any_set() {
        return Err(invalid(
            "routh solves for mu in the classical problem (q1 = 1, A2 = Mb = 0, no drag); model flags do not apply",
        ));
    }
    if !(a.tol > 0.0 && a.tol < 1e-2) {
        return Err(invalid(format!(
            "--tol must lie in (0, 1e-2), got {}",
            a.tol
        )));
    }
    let mu = routh_boundary(a.tol);
    let body = match format {
        Format::Json => json(&RouthOutput {
            mu_crit: mu,
            closed_form: (1.0 - (23.0f64 / 27.0).sqrt()) / 2.0,
            tol: a.tol,
        }),
        _ => format!("{mu:.7}\n"),
    };
    emit(&a.output, "routh", format, &body, stdout)
}
