//! Command-line front end.
//!
//! Every subcommand writes its artifacts atomically into `--out` together with
//! a `<command>.manifest.json`, and prints a one-line summary. Exit codes:
//! `0` success, `2` invalid input, `3` unconverged solve or failed fit/bracket,
//! `4` I/O failure or cache corruption.
//!
//! `--config FILE` reads flat `key = value` lines whose keys are long flag
//! names; flags given on the command line win.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::parser::ValueSource;
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{
    self, collapse_deviation, default_sizes, extrapolate_family, find_critical_potential_3d,
    find_equivalent_potential, gamma_curve, radial_profile, sweep, write_equivalence_csv,
    write_sweep_csv, CriticalOptions, CriticalPredicate, DirectSolver, ExtrapolationForm,
    GroundStateSource, SweepRow, Thresholds,
};
use crate::analytic::{equivalent_potential_1d, potential_state_1d, singularity_state_1d};
use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::fitting::radial_fit;
use crate::io::{
    fmt_float, write_atomic, write_wavefunction_csv, CachedSolver, RunManifest, VectorCache,
};
use crate::space::{Boundary, SpaceSpec};

#[derive(Debug, Parser)]
#[command(
    name = "singbound",
    version,
    about = "Bound states at lattice singularities",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Spatial dimension D of each sheet (1, 2 or 3).
    #[arg(long, global = true, default_value_t = 2)]
    pub dim: usize,
    /// Number of sheets M meeting at the junction.
    #[arg(long, global = true, default_value_t = 1)]
    pub degree: usize,
    /// Linear extent L of each sheet [default: 200, 100, 20 for D = 1, 2, 3].
    #[arg(long, global = true)]
    pub extent: Option<usize>,
    /// On-site attraction g at the center, units of t (smooth spaces only).
    #[arg(long, global = true, default_value_t = 0.0)]
    pub potential: f64,
    /// periodic or open.
    #[arg(long, global = true, default_value = "periodic")]
    pub boundary: String,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub hopping: f64,
    /// Residual tolerance [default: 1e-10·‖H‖₁].
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "max-iter", global = true, default_value_t = 50_000)]
    pub max_iter: usize,
    #[arg(long, global = true, default_value_t = 0x5eed_cafe)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
    /// Flat key = value file mirroring the long flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,
    /// Reuse and store eigenvectors in this directory.
    #[arg(long = "cache-dir", global = true)]
    #[serde(skip)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Ground state of one space; writes the wavefunction.
    Solve,
    /// Closed-form one-dimensional states.
    Analytic(AnalyticArgs),
    /// Radial profile and Bessel fit of one ground state.
    Profile,
    /// Sweep over the number of sheets.
    SweepM(SweepMArgs),
    /// Sweep over the on-site potential.
    SweepG(SweepGArgs),
    /// Extrapolate binding energy and r_avg/L to L → ∞ and classify.
    Extrapolate(ExtrapolateArgs),
    /// Equivalent on-site potential for each degree.
    Equivalence(EquivalenceArgs),
    /// Bracket the weakest binding potential in 3D.
    Critical(CriticalArgs),
    /// Compare (γ, E_bind) of singularity and potential families.
    Collapse(CollapseArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyticArgs {
    /// Reduced potentials g/2t to tabulate instead of degrees.
    #[arg(long = "g-tilde")]
    pub g_tilde: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepMArgs {
    /// Degrees: `a,b,c` or inclusive `start:stop:step`.
    #[arg(long, default_value = "2:10:1")]
    pub degrees: String,
    /// Sizes: `a,b,c` or `start:stop:step` [default: the --extent value].
    #[arg(long)]
    pub extents: Option<String>,
    #[arg(long, default_value = "quadratic")]
    pub form: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepGArgs {
    /// Potentials g/t: `a,b,c` or inclusive `start:stop:step`.
    #[arg(long, default_value = "1:20:1")]
    pub potentials: String,
    #[arg(long)]
    pub extents: Option<String>,
    #[arg(long, default_value = "quadratic")]
    pub form: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExtrapolateArgs {
    /// Sizes [default: 40:100:20 in 2D, 10:20:2 in 3D].
    #[arg(long)]
    pub extents: Option<String>,
    /// quadratic (a + b/L + c/L²) or inverse-square (a + c/L²).
    #[arg(long, default_value = "quadratic")]
    pub form: String,
    #[arg(long = "epsilon-e", default_value_t = 1e-3)]
    pub epsilon_e: f64,
    #[arg(long = "epsilon-r", default_value_t = 0.02)]
    pub epsilon_r: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EquivalenceArgs {
    #[arg(long, default_value = "2,3")]
    pub degrees: String,
    /// Binding-energy match tolerance, units of t.
    #[arg(long = "match-tol", default_value_t = 1e-9)]
    pub match_tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CriticalArgs {
    #[arg(long, default_value = "10:20:2")]
    pub extents: String,
    #[arg(long = "tol-g", default_value_t = 0.1)]
    pub tol_g: f64,
    /// Spacing of the coarse scan before bisection, units of t.
    #[arg(long = "scan-step", default_value_t = 0.5)]
    pub scan_step: f64,
    /// binding (extrapolated E_bind > ε_E) or classification (verdict = bound).
    #[arg(long, default_value = "binding")]
    pub predicate: String,
    #[arg(long, default_value = "quadratic")]
    pub form: String,
    #[arg(long = "epsilon-e", default_value_t = 1e-3)]
    pub epsilon_e: f64,
    #[arg(long = "epsilon-r", default_value_t = 0.02)]
    pub epsilon_r: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CollapseArgs {
    /// Singularity degrees [default: 5:100:5 in 2D, 5:60:5 in 3D].
    #[arg(long)]
    pub degrees: Option<String>,
    /// Potentials g/t [default: 1:20:1 in 2D, 4.5:20:0.5 in 3D].
    #[arg(long)]
    pub potentials: Option<String>,
}

/// Parses `a,b,c` or an inclusive `start:stop:step` range.
pub fn parse_list_f64(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("cannot read list `{text}`"));
    if text.contains(':') {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        if !(step > 0.0 && stop >= start) {
            return Err(bad());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| start + step * i as f64).collect())
    } else {
        text.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect()
    }
}

pub fn parse_list_usize(text: &str) -> Result<Vec<usize>> {
    parse_list_f64(text)?
        .into_iter()
        .map(|x| {
            if x >= 0.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(Error::InvalidInput(format!(
                    "`{text}` must list whole numbers"
                )))
            }
        })
        .collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. } | Error::Fit(_) | Error::Bracket(_) | Error::Series(_) => 3,
        Error::Io(_) | Error::Json(_) | Error::CacheCorrupt(_) => 4,
        _ => 2,
    }
}

/// Reads a flat `key = value` config file; `#` starts a comment.
pub fn read_config(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!(
                "{}:{}: expected key = value",
                path.display(),
                n + 1
            ))
        })?;
        pairs.push((
            k.trim().trim_start_matches("--").to_string(),
            v.trim().to_string(),
        ));
    }
    Ok(pairs)
}

/// Re-parses with config values appended for every flag not given on the
/// command line.
fn parse_with_config(argv: Vec<OsString>) -> std::result::Result<Cli, ParseFailure> {
    let matches = Cli::command()
        .try_get_matches_from(argv.clone())
        .map_err(ParseFailure::Clap)?;
    let cli = Cli::from_arg_matches(&matches).map_err(ParseFailure::Clap)?;
    let Some(path) = cli.common.config.clone() else {
        return Ok(cli);
    };
    let pairs = read_config(&path).map_err(ParseFailure::Ours)?;
    let sub = matches.subcommand().map(|(_, m)| m).unwrap_or(&matches);
    let mut extended = argv;
    for (key, value) in pairs {
        let id = key.replace('-', "_");
        if key == "config" || sub.try_contains_id(&id).is_err() {
            return Err(ParseFailure::Ours(Error::InvalidInput(format!(
                "unknown config key `{key}`"
            ))));
        }
        if sub.value_source(&id) == Some(ValueSource::CommandLine) {
            continue;
        }
        extended.push(format!("--{key}").into());
        extended.push(value.into());
    }
    let matches = Cli::command()
        .try_get_matches_from(extended)
        .map_err(ParseFailure::Clap)?;
    Cli::from_arg_matches(&matches).map_err(ParseFailure::Clap)
}

enum ParseFailure {
    Clap(clap::Error),
    Ours(Error),
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse_with_config(argv) {
        Ok(c) => c,
        Err(ParseFailure::Clap(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
        Err(ParseFailure::Ours(e)) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Some(n) = cli.common.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match execute(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

struct Context<'a> {
    common: &'a Common,
    source: Box<dyn GroundStateSource>,
    options: EigenOptions,
    boundary: Boundary,
    outputs: Vec<String>,
}

impl Context<'_> {
    fn extent(&self) -> usize {
        self.common.extent.unwrap_or(match self.common.dim {
            1 => 200,
            2 => 100,
            _ => 20,
        })
    }

    fn spec(&self) -> Result<SpaceSpec> {
        let c = self.common;
        let spec = SpaceSpec {
            dim: c.dim,
            extent: self.extent(),
            degree: c.degree,
            boundary: self.boundary,
            potential: c.potential,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.common.out.join(name);
        write_atomic(&path, bytes)?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn thresholds(epsilon_e: f64, epsilon_r: f64) -> Thresholds {
        Thresholds {
            epsilon_e,
            epsilon_r,
        }
    }
}

fn execute(cli: &Cli) -> Result<String> {
    let started = Instant::now();
    let c = &cli.common;
    let boundary: Boundary = c.boundary.parse()?;
    let options = EigenOptions {
        k: 1,
        tol: c.tol,
        max_iterations: c.max_iter,
        seed: c.seed,
        basis_cap: None,
    };
    let source: Box<dyn GroundStateSource> = match &c.cache_dir {
        Some(dir) => Box::new(CachedSolver {
            hopping: c.hopping,
            options,
            cache: VectorCache::new(dir)?,
        }),
        None => Box::new(DirectSolver {
            hopping: c.hopping,
            options,
        }),
    };
    let mut ctx = Context {
        common: c,
        source,
        options,
        boundary,
        outputs: Vec::new(),
    };
    let (name, summary) = match &cli.command {
        Command::Solve => ("solve", cmd_solve(&mut ctx)?),
        Command::Analytic(a) => ("analytic", cmd_analytic(&mut ctx, a)?),
        Command::Profile => ("profile", cmd_profile(&mut ctx)?),
        Command::SweepM(a) => ("sweep-m", cmd_sweep_m(&mut ctx, a)?),
        Command::SweepG(a) => ("sweep-g", cmd_sweep_g(&mut ctx, a)?),
        Command::Extrapolate(a) => ("extrapolate", cmd_extrapolate(&mut ctx, a)?),
        Command::Equivalence(a) => ("equivalence", cmd_equivalence(&mut ctx, a)?),
        Command::Critical(a) => ("critical", cmd_critical(&mut ctx, a)?),
        Command::Collapse(a) => ("collapse", cmd_collapse(&mut ctx, a)?),
    };
    let parameters = serde_json::json!({
        "common": c,
        "command": &cli.command,
    });
    let mut manifest = RunManifest::new(name, parameters, ctx.options, c.hopping);
    manifest.outputs = ctx.outputs.clone();
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.write(&c.out.join(format!("{name}.manifest.json")))?;
    Ok(summary)
}

fn cmd_solve(ctx: &mut Context<'_>) -> Result<String> {
    let spec = ctx.spec()?;
    let gs = ctx.source.ground_state(&spec)?;
    let mut csv = Vec::new();
    write_wavefunction_csv(&gs.graph, &gs.state, &mut csv)?;
    ctx.write("solve.csv", &csv)?;
    Ok(format!(
        "E0/t = {:.6}  E_bind/t = {:.6}  (N = {}, residual {:.2e})",
        gs.energy / gs.hopping,
        gs.binding_over_t(),
        spec.site_count(),
        gs.residual
    ))
}

fn cmd_analytic(ctx: &mut Context<'_>, args: &AnalyticArgs) -> Result<String> {
    let t = ctx.common.hopping;
    let mut csv = String::new();
    let summary;
    if let Some(list) = &args.g_tilde {
        csv.push_str("g_tilde,alpha,E_over_t,E_bind_over_t\n");
        let gs = parse_list_f64(list)?;
        let mut last = None;
        for g in gs {
            let p = potential_state_1d(g, t)?;
            csv.push_str(&format!(
                "{},{},{},{}\n",
                fmt_float(g),
                fmt_float(p.alpha),
                fmt_float(p.energy / t),
                fmt_float(p.binding_energy / t)
            ));
            last = Some((g, p));
        }
        let (g, p) = last.ok_or_else(|| Error::InvalidInput("empty list".into()))?;
        summary = format!(
            "g_tilde = {g:.6}  alpha = {:.6}  E/t = {:.6}",
            p.alpha,
            p.energy / t
        );
    } else {
        csv.push_str("M,alpha,E_over_t,E_bind_over_t,g_tilde_M\n");
        let m = ctx.common.degree;
        let s = singularity_state_1d(m, t)?;
        let g = if m >= 2 {
            equivalent_potential_1d(m)?
        } else {
            0.0
        };
        csv.push_str(&format!(
            "{m},{},{},{},{}\n",
            fmt_float(s.alpha),
            fmt_float(s.energy / t),
            fmt_float(s.binding_energy / t),
            fmt_float(g)
        ));
        summary = format!(
            "M = {m}  alpha = {:.6}  E/t = {:.6}  E_bind/t = {:.6}  g_tilde_M = {g:.6}",
            s.alpha,
            s.energy / t,
            s.binding_energy / t
        );
    }
    print!("{csv}");
    ctx.write("analytic.csv", csv.as_bytes())?;
    Ok(summary)
}

fn cmd_profile(ctx: &mut Context<'_>) -> Result<String> {
    let spec = ctx.spec()?;
    let gs = ctx.source.ground_state(&spec)?;
    let profile = radial_profile(&gs.state, &gs.graph, gs.energy)?;
    let mut csv = String::from("radius,radius_sq,mean_amplitude,orbit_spread,multiplicity\n");
    for e in &profile.entries {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(e.radius),
            e.radius_sq,
            fmt_float(e.mean_amplitude),
            fmt_float(e.orbit_spread),
            e.multiplicity
        ));
    }
    ctx.write("profile.csv", csv.as_bytes())?;
    let r_avg = analysis::average_radius(&gs.state, &gs.graph)?;
    let mut summary = format!(
        "E0/t = {:.6}  E_bind/t = {:.6}  r_avg = {:.4}",
        gs.energy / gs.hopping,
        gs.binding_over_t(),
        r_avg
    );
    if spec.dim >= 2 {
        let fit = radial_fit(&profile, spec.dim)?;
        ctx.write("profile.fit.json", fit.to_json()?.as_bytes())?;
        if !fit.acceptable {
            return Err(Error::Fit(format!(
                "radial fit not acceptable (flags: {})",
                fit.flags.join(", ")
            )));
        }
        summary.push_str(&format!(
            "  gamma = {:.6}  b = {:.4}",
            fit.param("gamma"),
            fit.param("b")
        ));
    }
    Ok(summary)
}

fn sizes(ctx: &Context<'_>, list: &Option<String>) -> Result<Vec<usize>> {
    match list {
        Some(l) => parse_list_usize(l),
        None => Ok(vec![ctx.extent()]),
    }
}

fn run_sweep(
    ctx: &mut Context<'_>,
    specs: Vec<SpaceSpec>,
    form: &str,
    file: &str,
) -> Result<Vec<SweepRow>> {
    for s in &specs {
        s.validate()?;
    }
    let form: ExtrapolationForm = form.parse()?;
    let rows = sweep(ctx.source.as_ref(), &specs, &Thresholds::default(), form)?;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv)?;
    ctx.write(file, &csv)?;
    Ok(rows)
}

fn cmd_sweep_m(ctx: &mut Context<'_>, args: &SweepMArgs) -> Result<String> {
    let degrees = parse_list_usize(&args.degrees)?;
    let extents = sizes(ctx, &args.extents)?;
    let mut specs = Vec::new();
    for &m in &degrees {
        for &l in &extents {
            specs.push(SpaceSpec::singular(ctx.common.dim, l, m).boundary(ctx.boundary));
        }
    }
    let rows = run_sweep(ctx, specs, &args.form, "sweep-m.csv")?;
    Ok(format!("{} points written to sweep-m.csv", rows.len()))
}

fn cmd_sweep_g(ctx: &mut Context<'_>, args: &SweepGArgs) -> Result<String> {
    let gs = parse_list_f64(&args.potentials)?;
    let extents = sizes(ctx, &args.extents)?;
    let mut specs = Vec::new();
    for &g in &gs {
        for &l in &extents {
            specs.push(SpaceSpec::with_potential(ctx.common.dim, l, g).boundary(ctx.boundary));
        }
    }
    let rows = run_sweep(ctx, specs, &args.form, "sweep-g.csv")?;
    Ok(format!("{} points written to sweep-g.csv", rows.len()))
}

fn cmd_extrapolate(ctx: &mut Context<'_>, args: &ExtrapolateArgs) -> Result<String> {
    let spec = ctx.spec()?;
    let extents = match &args.extents {
        Some(l) => parse_list_usize(l)?,
        None => default_sizes(spec.dim),
    };
    let form: ExtrapolationForm = args.form.parse()?;
    let fam = extrapolate_family(ctx.source.as_ref(), &spec, &extents, form)?;
    let class = fam.classify(&Context::thresholds(args.epsilon_e, args.epsilon_r));
    let mut csv = String::from("L,E0_over_t,E_bind_over_t,r_avg,r_avg_over_L\n");
    for p in &fam.points {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            p.extent,
            fmt_float(p.energy_over_t),
            fmt_float(p.binding_over_t),
            fmt_float(p.r_avg),
            fmt_float(p.r_avg / p.extent as f64)
        ));
    }
    ctx.write("extrapolate.csv", csv.as_bytes())?;
    let report = serde_json::json!({
        "binding": fam.binding,
        "r_avg_over_l": fam.r_avg,
        "classification": class,
    });
    ctx.write(
        "extrapolate.json",
        serde_json::to_string_pretty(&report)?.as_bytes(),
    )?;
    Ok(format!(
        "E_bind limit = {:.6}·t  r_avg/L limit = {:.6}  class = {class}",
        fam.binding.limit, fam.r_avg.limit
    ))
}

fn cmd_equivalence(ctx: &mut Context<'_>, args: &EquivalenceArgs) -> Result<String> {
    let degrees = parse_list_usize(&args.degrees)?;
    let (dim, extent, boundary) = (ctx.common.dim, ctx.extent(), ctx.boundary);
    let source = ctx.source.as_ref();
    let points = {
        use rayon::prelude::*;
        degrees
            .par_iter()
            .map(|&m| find_equivalent_potential(source, m, dim, extent, boundary, args.match_tol))
            .collect::<Result<Vec<_>>>()?
    };
    let mut csv = Vec::new();
    write_equivalence_csv(&points, &mut csv)?;
    ctx.write("equivalence.csv", &csv)?;
    let parts: Vec<String> = points
        .iter()
        .map(|p| format!("g({}) = {:.4}·t", p.degree, p.g_m))
        .collect();
    Ok(parts.join("  "))
}

fn cmd_critical(ctx: &mut Context<'_>, args: &CriticalArgs) -> Result<String> {
    if ctx.common.dim != 3 {
        return Err(Error::InvalidInput(
            "the critical potential is a three-dimensional study; pass --dim 3".into(),
        ));
    }
    let extents = parse_list_usize(&args.extents)?;
    let predicate = match args.predicate.as_str() {
        "binding" => CriticalPredicate::BindingLimit,
        "classification" => CriticalPredicate::Classification,
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown predicate `{other}` (expected binding or classification)"
            )))
        }
    };
    let opts = CriticalOptions {
        tol_g: args.tol_g,
        scan_step: args.scan_step,
        thresholds: Context::thresholds(args.epsilon_e, args.epsilon_r),
        form: args.form.parse()?,
        predicate,
        boundary: ctx.boundary,
    };
    let bracket = find_critical_potential_3d(ctx.source.as_ref(), &extents, &opts)?;
    let mut csv =
        String::from("g_over_t,E_bind_limit_over_t,r_avg_over_L_limit,classification,binds\n");
    let mut probes = bracket.probes.clone();
    probes.sort_by(|a, b| a.g_over_t.total_cmp(&b.g_over_t));
    for p in &probes {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(p.g_over_t),
            fmt_float(p.binding_limit),
            fmt_float(p.r_avg_limit),
            p.class,
            p.binds
        ));
    }
    ctx.write("critical.csv", csv.as_bytes())?;
    ctx.write(
        "critical.json",
        serde_json::to_string_pretty(&bracket)?.as_bytes(),
    )?;
    Ok(format!(
        "critical g in [{:.4}, {:.4}]·t  (lower end {}, upper end {})",
        bracket.g_lo, bracket.g_hi, bracket.lo.class, bracket.hi.class
    ))
}

fn cmd_collapse(ctx: &mut Context<'_>, args: &CollapseArgs) -> Result<String> {
    let dim = ctx.common.dim;
    if dim < 2 {
        return Err(Error::InvalidInput(
            "collapse compares fitted decay constants; use --dim 2 or 3".into(),
        ));
    }
    let degrees = parse_list_usize(args.degrees.as_deref().unwrap_or(if dim == 2 {
        "5:100:5"
    } else {
        "5:60:5"
    }))?;
    let gs = parse_list_f64(args.potentials.as_deref().unwrap_or(if dim == 2 {
        "1:20:1"
    } else {
        "4.5:20:0.5"
    }))?;
    let l = ctx.extent();
    let mut specs: Vec<SpaceSpec> = degrees
        .iter()
        .map(|&m| SpaceSpec::singular(dim, l, m).boundary(ctx.boundary))
        .collect();
    specs.extend(
        gs.iter()
            .map(|&g| SpaceSpec::with_potential(dim, l, g).boundary(ctx.boundary)),
    );
    let rows = run_sweep(ctx, specs, "quadratic", "collapse.csv")?;
    let (sing, pot): (Vec<SweepRow>, Vec<SweepRow>) = rows.into_iter().partition(|r| r.degree >= 2);
    let (sing_curve, sing_dropped) = gamma_curve(&sing);
    let (pot_curve, pot_dropped) = gamma_curve(&pot);
    let deviation = collapse_deviation(&sing_curve, &pot_curve)?;
    let mut summary = format!("collapse deviation = {deviation:.4}");
    if sing_dropped + pot_dropped > 0 {
        summary.push_str(&format!(
            "  ({sing_dropped} singularity and {pot_dropped} potential points without an acceptable fit left out)"
        ));
    }
    Ok(summary)
}
