//! Subcommand front end: wires the library modules into a reproducible
//! workflow (direct DCS -> unfolded amplitudes -> poles -> trajectories ->
//! complex-energy assignment -> decomposition) with deterministic CSV/JSON
//! outputs. Exit codes: 0 success, 2 validation error, 3 numerical failure;
//! the failing stage is named on stderr.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use crate::amplitudes::{
    dcs_direct, fold, fold_endpoint, unfold, AmplitudeError, AngularGrid, Endpoint, FoldConfig,
    FoldedAmplitude, ThetaRoute, UnfoldConfig, UnfoldedAmplitude,
};
use crate::config::{parse_j_list, ConfigError, RunConfig};
use crate::pade::{build_approximant, find_poles_zeros, Axis, PadeError, PoleSet, PoleZeroConfig};
use crate::resonance::{
    decompose_backward, decompose_forward, decompose_sideway, DecompositionReport, ResonanceError,
};
use crate::smatrix::{PartialWaveTable, SmatrixError, UNITARITY_TOL};
use crate::synth::{presets, SyntheticModel};
use crate::trajectories::{
    chain_trajectories, compare_ce_sets, fit_linear, invert_to_ce, observables_cam,
    trajectories_to_csv, CEComparison, CEPole, CESource, ReggeTrajectory, TrajectoryError,
};
use rayon::prelude::*;

#[derive(Debug, Parser)]
#[command(
    name = "regge",
    version,
    about = "Complex angular-momentum resonance analysis of tabulated S-matrix elements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// Flags shared by every subcommand; each overrides the config key of the
/// same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// S-matrix table (CSV or JSON)
    #[arg(long, global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output directory (created if missing)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Flat `key = value` config file with # comments
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Warn when the table's J_max is below this
    #[arg(long, global = true, value_name = "J")]
    pub jmax_warn: Option<usize>,
    /// Scattering-angle grid, degrees
    #[arg(long, global = true, value_name = "A:B:STEP")]
    pub theta_grid: Option<String>,
    /// Upper edge of the unfolded phi grid, degrees
    #[arg(long, global = true, value_name = "DEG")]
    pub phi_max_deg: Option<f64>,
    /// Winding-sum truncation |m| <= m_max
    #[arg(long, global = true, value_name = "M")]
    pub m_max: Option<i32>,
    /// Pole-search trust half-height in Im lambda
    #[arg(long, global = true, value_name = "IM")]
    pub im_cap: Option<f64>,
    /// Minimum |residue| for a significant pole
    #[arg(long, global = true, value_name = "R")]
    pub res_min: Option<f64>,
    /// Energy offset for the CE-set comparison, meV
    #[arg(long, global = true, value_name = "MEV")]
    pub offset_mev: Option<f64>,
    /// Worker threads (default: one per core)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Partial-wave differential cross sections on the theta grid
    Dcs,
    /// Unfolded amplitudes f~ and g~ on the phi grid
    Unfold,
    /// Regge poles and zeros of the continued S(lambda) per energy
    Poles,
    /// Chain per-energy poles into trajectories and fit lambda(E)
    Trajectories,
    /// Complex-energy poles: trajectory inversion vs direct continuation in E
    CePoles {
        /// Integer J values, e.g. "12..17" or "12,14" (default: from the fits)
        #[arg(long, value_name = "LIST")]
        j: Option<String>,
    },
    /// Decompose forward/backward/sideway DCS into background + resonances
    Decompose {
        /// Sideway decomposition angle, degrees
        #[arg(long, value_name = "DEG")]
        theta_deg: Option<f64>,
    },
    /// Generate a synthetic S-matrix table with an exact pole/zero ledger
    Synth {
        /// Built-in model name (see --list)
        #[arg(long, value_name = "NAME")]
        preset: Option<String>,
        /// Model description JSON (alternative to --preset)
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        /// List available presets and exit
        #[arg(long)]
        list: bool,
    },
    /// Full chain on one table, emitting every artifact plus a JSON summary
    Pipeline,
}

/// An error annotated with the pipeline stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub err: anyhow::Error,
}

fn at<T, E: Into<anyhow::Error>>(stage: &'static str, r: Result<T, E>) -> Result<T, StageError> {
    r.map_err(|e| StageError { stage, err: e.into() })
}

const EXIT_VALIDATION: i32 = 2;
const EXIT_NUMERICAL: i32 = 3;

fn classify_amplitude(err: &AmplitudeError) -> i32 {
    match err {
        AmplitudeError::BadGrid { .. }
        | AmplitudeError::PhiOutOfGrid { .. }
        | AmplitudeError::EndpointTheta { .. }
        | AmplitudeError::Smatrix(_) => EXIT_VALIDATION,
        AmplitudeError::QuadratureNotConverged { .. }
        | AmplitudeError::TruncationTooCoarse { .. }
        | AmplitudeError::Pade(_) => EXIT_NUMERICAL,
    }
}

/// Exit code for a failed run: grid/shape/input problems are validation
/// errors (2); convergence and conditioning problems are numerical (3).
fn classify(err: &anyhow::Error) -> i32 {
    if let Some(e) = err.downcast_ref::<AmplitudeError>() {
        return classify_amplitude(e);
    }
    if let Some(e) = err.downcast_ref::<ResonanceError>() {
        return match e {
            ResonanceError::Amplitude(inner) => classify_amplitude(inner),
            _ => EXIT_VALIDATION,
        };
    }
    if let Some(e) = err.downcast_ref::<TrajectoryError>() {
        return match e {
            TrajectoryError::Smatrix(_) => EXIT_VALIDATION,
            _ => EXIT_NUMERICAL,
        };
    }
    if err.downcast_ref::<PadeError>().is_some() {
        return EXIT_NUMERICAL;
    }
    if err.downcast_ref::<ConfigError>().is_some()
        || err.downcast_ref::<SmatrixError>().is_some()
        || err.downcast_ref::<crate::synth::SynthError>().is_some()
        || err.downcast_ref::<serde_json::Error>().is_some()
        || err.downcast_ref::<std::io::Error>().is_some()
    {
        return EXIT_VALIDATION;
    }
    EXIT_NUMERICAL
}

/// Parse argv and run; returns the process exit code.
pub fn main_entry<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => EXIT_VALIDATION,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(se) => {
            eprintln!("regge: stage `{}` failed: {:#}", se.stage, se.err);
            classify(&se.err)
        }
    }
}

fn merged_config(overrides: &Overrides, cmd: &Cmd) -> Result<RunConfig, StageError> {
    let mut cfg = match &overrides.config {
        Some(path) => at("config", RunConfig::from_file(path))?,
        None => RunConfig::default(),
    };
    if let Some(v) = &overrides.input {
        cfg.input = Some(v.clone());
    }
    if let Some(v) = &overrides.out {
        cfg.out = v.clone();
    }
    if let Some(v) = overrides.jmax_warn {
        cfg.jmax_warn = v;
    }
    if let Some(v) = &overrides.theta_grid {
        cfg.theta_grid = v.clone();
    }
    if let Some(v) = overrides.phi_max_deg {
        cfg.phi_max_deg = v;
    }
    if let Some(v) = overrides.m_max {
        cfg.m_max = v;
    }
    if let Some(v) = overrides.im_cap {
        cfg.im_cap = v;
    }
    if let Some(v) = overrides.res_min {
        cfg.res_min = v;
    }
    if let Some(v) = overrides.offset_mev {
        cfg.offset_mev = v;
    }
    if let Some(v) = overrides.threads {
        cfg.threads = Some(v);
    }
    match cmd {
        Cmd::CePoles { j: Some(list) } => cfg.ce_j = Some(at("config", parse_j_list(list))?),
        Cmd::Decompose { theta_deg: Some(t) } => cfg.decompose_theta_deg = *t,
        _ => {}
    }
    at("config", cfg.validate())?;
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<(), StageError> {
    let cfg = merged_config(&cli.overrides, &cli.cmd)?;
    if let Some(n) = cfg.threads {
        // First-wins is fine: a second init in the same process is a no-op.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    at("output-dir", std::fs::create_dir_all(&cfg.out))?;
    match &cli.cmd {
        Cmd::Dcs => cmd_dcs(&cfg),
        Cmd::Unfold => cmd_unfold(&cfg),
        Cmd::Poles => cmd_poles(&cfg),
        Cmd::Trajectories => cmd_trajectories(&cfg),
        Cmd::CePoles { .. } => cmd_ce_poles(&cfg),
        Cmd::Decompose { .. } => cmd_decompose(&cfg),
        Cmd::Synth { preset, model, list } => cmd_synth(&cfg, preset.as_deref(), model.as_deref(), *list),
        Cmd::Pipeline => cmd_pipeline(&cfg),
    }
}

fn load_table(cfg: &RunConfig) -> Result<PartialWaveTable, StageError> {
    let path = cfg.input.as_ref().ok_or_else(|| StageError {
        stage: "load-input",
        err: ConfigError::BadValue {
            key: "input".to_string(),
            detail: "no input table: pass --input or set `input` in the config".to_string(),
        }
        .into(),
    })?;
    let table = at("load-input", PartialWaveTable::load(path))?;
    at("load-input", table.validate(UNITARITY_TOL))?;
    for w in table.warnings(cfg.jmax_warn) {
        eprintln!("regge: warning: {w}");
    }
    Ok(table)
}

fn theta_grid(cfg: &RunConfig) -> Result<AngularGrid, StageError> {
    at("theta-grid", AngularGrid::parse(&cfg.theta_grid))
}

fn pole_config(cfg: &RunConfig, jmax: usize) -> PoleZeroConfig {
    let mut pz = PoleZeroConfig::for_jmax(jmax);
    pz.im_cap = cfg.im_cap;
    pz.box_im = (pz.box_im.0, cfg.im_cap);
    pz.res_min = cfg.res_min;
    pz.im_max = cfg.im_max;
    pz.doublet_radius = cfg.doublet_radius;
    pz
}

/// Unfold settings from the run config; with `cover_m` the phi range is
/// widened (never narrowed) so every winding the fold at that m_max samples
/// stays inside the grid.
fn unfold_config(cfg: &RunConfig, cover_m: Option<i32>) -> UnfoldConfig {
    let mut u = UnfoldConfig {
        phi_min_deg: cfg.phi_min_deg,
        phi_max_deg: cfg.phi_max_deg,
        phi_step_deg: cfg.phi_step_deg,
        lambda_cut: cfg.lambda_cut,
        quad_tol: cfg.quad_tol,
        im_cap: cfg.im_cap,
        ..UnfoldConfig::default()
    };
    if let Some(m) = cover_m {
        let need = UnfoldConfig::covering_m(m);
        if need.phi_min_deg < u.phi_min_deg || need.phi_max_deg > u.phi_max_deg {
            u.phi_min_deg = u.phi_min_deg.min(need.phi_min_deg);
            u.phi_max_deg = u.phi_max_deg.max(need.phi_max_deg);
            eprintln!(
                "regge: note: phi grid widened to [{}, {}] deg to cover the m_max = {m} windings",
                u.phi_min_deg, u.phi_max_deg
            );
        }
    }
    u
}

fn fold_config(cfg: &RunConfig) -> FoldConfig {
    FoldConfig { m_max: cfg.m_max, fold_tol: cfg.fold_tol, ..FoldConfig::default() }
}

fn write_output(cfg: &RunConfig, name: &str, text: &str) -> Result<PathBuf, StageError> {
    let path = cfg.out.join(name);
    at("write-output", std::fs::write(&path, text))?;
    Ok(path)
}

/// Rows of a CSV string without its header line.
fn csv_body(s: &str) -> &str {
    s.split_once('\n').map(|(_, body)| body).unwrap_or("")
}

// ---------------------------------------------------------------------------
// per-energy pole extraction shared by poles/trajectories/ce-poles/pipeline

fn poles_per_energy(
    table: &PartialWaveTable,
    pz: &PoleZeroConfig,
) -> Result<Vec<(f64, PoleSet)>, StageError> {
    let sets: Result<Vec<_>, StageError> = (0..table.n_energies())
        .into_par_iter()
        .map(|ei| {
            let e_mev = table.energies_mev[ei];
            let pairs = at("poles", table.slice_at_energy(ei))?;
            let (nodes, values): (Vec<f64>, Vec<Complex64>) = pairs.into_iter().unzip();
            let approximant = at("poles", build_approximant(&nodes, &values, Axis::Lambda, e_mev))
                .map_err(|se| StageError {
                    stage: se.stage,
                    err: se.err.context(format!("E = {e_mev} meV")),
                })?;
            let set = at("poles", find_poles_zeros(&approximant, pz)).map_err(|se| StageError {
                stage: se.stage,
                err: se.err.context(format!("E = {e_mev} meV")),
            })?;
            Ok((e_mev, set))
        })
        .collect();
    sets
}

fn significance_label(p: &crate::pade::PoleInfo) -> &'static str {
    if p.spurious {
        "spurious"
    } else if p.significant {
        "significant"
    } else {
        "insignificant"
    }
}

fn poles_csv(sets: &[(f64, PoleSet)], axis: Axis) -> String {
    let mut out = String::from("E_meV,axis,re_pos,im_pos,re_res,im_res,significance\n");
    for (e, set) in sets {
        for p in &set.poles {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                e,
                axis,
                p.position.re,
                p.position.im,
                p.residue.re,
                p.residue.im,
                significance_label(p)
            ));
        }
    }
    out
}

/// Significant upper-half poles per energy, as (position, residue) chains fed
/// to the trajectory builder and the tail subtractions.
fn significant_pairs(sets: &[(f64, PoleSet)]) -> Vec<(f64, Vec<(Complex64, Complex64)>)> {
    sets.iter()
        .map(|(e, set)| {
            let mut pairs: Vec<(Complex64, Complex64)> = set
                .significant()
                .filter(|p| p.position.im > 0.0)
                .map(|p| (p.position, p.residue))
                .collect();
            pairs.sort_by(|a, b| {
                (a.0.im, a.0.re)
                    .partial_cmp(&(b.0.im, b.0.re))
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            (*e, pairs)
        })
        .collect()
}

fn build_trajectories(
    sets: &[(f64, PoleSet)],
    cfg: &RunConfig,
) -> Result<Vec<ReggeTrajectory>, StageError> {
    let per_energy = significant_pairs(sets);
    let mut chains = chain_trajectories(&per_energy, cfg.match_radius);
    for t in &mut chains {
        if !t.short {
            t.fit = fit_linear(t, cfg.fit_window).ok();
        }
    }
    Ok(chains)
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn trajectory_json(t: &ReggeTrajectory) -> serde_json::Value {
    let points: Vec<_> = t
        .points
        .iter()
        .map(|p| {
            let j = (p.lambda.re - 0.5).round() as i64;
            json!({
                "e_mev": p.e_mev,
                "lambda": complex_json(p.lambda),
                "residue": complex_json(p.residue),
                "nearest_j": j,
                "j_jp1": j * (j + 1),
            })
        })
        .collect();
    let fit = t.fit.as_ref().map(|f| {
        json!({
            "alpha": complex_json(f.alpha),
            "beta_per_mev": complex_json(f.beta),
            "window_mev": [f.window.0, f.window.1],
            "rms": f.rms,
        })
    });
    json!({
        "label": t.label,
        "n_points": t.points.len(),
        "short": t.short,
        "fit": fit,
        "points": points,
    })
}

/// Integer J values whose lambda = J + 1/2 crossing lies inside a chain's
/// observed Re lambda span.
fn derive_j_values(t: &ReggeTrajectory) -> Vec<usize> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &t.points {
        lo = lo.min(p.lambda.re);
        hi = hi.max(p.lambda.re);
    }
    let j_lo = (lo - 0.5).ceil().max(0.0) as usize;
    let j_hi = (hi - 0.5).floor() as i64;
    if j_hi < j_lo as i64 {
        return Vec::new();
    }
    (j_lo..=j_hi as usize).collect()
}

/// Inverted CE poles for one fitted trajectory at the given integer Js,
/// with the Im lambda of the nearest chain point attached for the
/// angular-life column.
fn invert_trajectory(
    t: &ReggeTrajectory,
    js: &[usize],
) -> Result<Vec<(CEPole, Option<f64>)>, TrajectoryError> {
    let fit = match &t.fit {
        Some(f) => f,
        None => return Ok(Vec::new()),
    };
    let xs: Vec<f64> = js.iter().map(|&j| j as f64 + 0.5).collect();
    let mut out = Vec::with_capacity(js.len());
    for (pole, &j) in invert_to_ce(fit, &xs)?.into_iter().zip(js) {
        let mut pole = pole;
        pole.j = j as f64;
        let im_lambda = t
            .points
            .iter()
            .min_by(|a, b| {
                let da = (a.lambda.re - (j as f64 + 0.5)).abs();
                let db = (b.lambda.re - (j as f64 + 0.5)).abs();
                da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
            })
            .map(|p| p.lambda.im);
        out.push((pole, im_lambda));
    }
    Ok(out)
}

struct CeAnalysis {
    inverted: Vec<(CEPole, Option<f64>)>,
    direct: Vec<CEPole>,
    comparison: CEComparison,
}

fn ce_analysis(
    table: &PartialWaveTable,
    chains: &[ReggeTrajectory],
    cfg: &RunConfig,
) -> Result<CeAnalysis, StageError> {
    let mut inverted: Vec<(CEPole, Option<f64>)> = Vec::new();
    let mut all_js: Vec<usize> = Vec::new();
    for t in chains {
        if t.fit.is_none() {
            continue;
        }
        let js = match &cfg.ce_j {
            Some(user) => user.clone(),
            None => derive_j_values(t),
        };
        inverted.extend(at("ce-invert", invert_trajectory(t, &js))?);
        all_js.extend(js);
    }
    all_js.sort_unstable();
    all_js.dedup();
    let mut direct: Vec<CEPole> = Vec::new();
    for &j in all_js.iter().filter(|&&j| j <= table.jmax) {
        let found = at("ce-direct", crate::trajectories::ce_poles_direct(table, j, None))
            .map_err(|se| StageError {
                stage: se.stage,
                err: se.err.context(format!("J = {j}")),
            })?;
        direct.extend(found);
    }
    let inverted_poles: Vec<CEPole> = inverted.iter().map(|(p, _)| *p).collect();
    let comparison = compare_ce_sets(&inverted_poles, &direct, cfg.offset_mev);
    Ok(CeAnalysis { inverted, direct, comparison })
}

fn ce_csv(ce: &CeAnalysis) -> String {
    let mut poles: Vec<CEPole> = ce.inverted.iter().map(|(p, _)| *p).collect();
    let mut ims: Vec<Option<f64>> = ce.inverted.iter().map(|(_, im)| *im).collect();
    poles.extend(ce.direct.iter().copied());
    ims.extend(std::iter::repeat(None).take(ce.direct.len()));
    crate::trajectories::ce_poles_to_csv(&poles, &ims)
}

fn comparison_json(c: &CEComparison) -> serde_json::Value {
    let pairs: Vec<_> = c
        .pairs
        .iter()
        .map(|p| {
            json!({
                "j_a": p.j_a,
                "j_b": p.j_b,
                "e_a": complex_json(p.e_a),
                "e_b_shifted": complex_json(p.e_b_shifted),
                "d_re_mev": p.d_re,
                "d_im_mev": p.d_im,
            })
        })
        .collect();
    json!({
        "offset_mev": c.offset_mev,
        "n_pairs": c.pairs.len(),
        "pairs": pairs,
        "best_fit_offset_mev": c.best_fit_offset_mev,
        "warning": c.warning,
    })
}

// ---------------------------------------------------------------------------
// subcommands

fn cmd_dcs(cfg: &RunConfig) -> Result<(), StageError> {
    let table = load_table(cfg)?;
    let grid = theta_grid(cfg)?;
    let dcs = at("dcs", dcs_direct(&table, &grid))?;
    write_output(cfg, "dcs.csv", &dcs.to_csv_string())?;
    Ok(())
}

fn cmd_unfold(cfg: &RunConfig) -> Result<(), StageError> {
    let table = load_table(cfg)?;
    let unfolded = at("unfold", unfold(&table, &unfold_config(cfg, None)))?;
    write_output(cfg, "unfold.csv", &unfolded.to_csv_string())?;
    Ok(())
}

fn cmd_poles(cfg: &RunConfig) -> Result<(), StageError> {
    let table = load_table(cfg)?;
    let sets = poles_per_energy(&table, &pole_config(cfg, table.jmax))?;
    write_output(cfg, "poles.csv", &poles_csv(&sets, Axis::Lambda))?;
    Ok(())
}

fn cmd_trajectories(cfg: &RunConfig) -> Result<(), StageError> {
    let table = load_table(cfg)?;
    let sets = poles_per_energy(&table, &pole_config(cfg, table.jmax))?;
    let chains = build_trajectories(&sets, cfg)?;
    write_output(cfg, "trajectories.csv", &trajectories_to_csv(&chains))?;
    let fits: Vec<_> = chains.iter().map(trajectory_json).collect();
    let text = at("write-output", serde_json::to_string_pretty(&json!({ "trajectories": fits })))?;
    write_output(cfg, "trajectory_fits.json", &text)?;
    Ok(())
}

fn cmd_ce_poles(cfg: &RunConfig) -> Result<(), StageError> {
    let table = load_table(cfg)?;
    let sets = poles_per_energy(&table, &pole_config(cfg, table.jmax))?;
    let chains = build_trajectories(&sets, cfg)?;
    let ce = ce_analysis(&table, &chains, cfg)?;
    write_output(cfg, "ce_poles.csv", &ce_csv(&ce))?;
    let text =
        at("write-output", serde_json::to_string_pretty(&comparison_json(&ce.comparison)))?;
    write_output(cfg, "ce_compare.json", &text)?;
    Ok(())
}

/// Filter an unfold's per-energy pole pairs by the run's significance
/// thresholds (the unfold itself keeps everything the resummation needs).
fn decomposition_pairs(
    unfolded: &UnfoldedAmplitude,
    cfg: &RunConfig,
) -> Vec<Vec<(Complex64, Complex64)>> {
    unfolded
        .significant_pole_pairs()
        .into_iter()
        .map(|pairs| {
            pairs
                .into_iter()
                .filter(|(p, r)| r.norm() >= cfg.res_min && p.im <= cfg.im_max)
                .collect()
        })
        .collect()
}

struct DecompositionArtifacts {
    forward: DecompositionReport,
    backward: DecompositionReport,
    sideway: Option<DecompositionReport>,
    csv: String,
}

fn run_decomposition(
    unfolded: &UnfoldedAmplitude,
    cfg: &RunConfig,
) -> Result<DecompositionArtifacts, StageError> {
    let pairs = decomposition_pairs(unfolded, cfg);
    let fcfg = fold_config(cfg);
    let forward = at("decompose", decompose_forward(unfolded, &pairs, &fcfg))?;
    let backward = at("decompose", decompose_backward(unfolded, &pairs, &fcfg))?;
    let theta = cfg.decompose_theta_deg.to_radians();
    let sideway = if AngularGrid::route(theta, unfolded.jmax) == ThetaRoute::Interior {
        let grid = at("decompose", AngularGrid::new(vec![theta]))?;
        let folded = at("decompose", fold(unfolded, &grid, &fcfg))?;
        Some(at("decompose", decompose_sideway(unfolded, &folded, &pairs, theta))?)
    } else {
        eprintln!(
            "regge: note: theta = {} deg routes to an endpoint; sideway decomposition skipped",
            cfg.decompose_theta_deg
        );
        None
    };
    let mut csv = forward.to_csv_string();
    csv.push_str(csv_body(&backward.to_csv_string()));
    if let Some(s) = &sideway {
        csv.push_str(csv_body(&s.to_csv_string()));
    }
    Ok(DecompositionArtifacts { forward, backward, sideway, csv })
}

fn cmd_decompose(cfg: &RunConfig) -> Result<(), StageError> {
    let table = load_table(cfg)?;
    let ucfg = unfold_config(cfg, Some(cfg.m_max));
    let unfolded = at("unfold", unfold(&table, &ucfg))?;
    let artifacts = run_decomposition(&unfolded, cfg)?;
    write_output(cfg, "decompose.csv", &artifacts.csv)?;
    Ok(())
}

fn cmd_synth(
    cfg: &RunConfig,
    preset: Option<&str>,
    model_path: Option<&Path>,
    list: bool,
) -> Result<(), StageError> {
    if list {
        for name in presets::names() {
            println!("{name}");
        }
        return Ok(());
    }
    let (model, stem): (SyntheticModel, String) = match (preset, model_path) {
        (Some(name), None) => {
            let model = presets::by_name(name).ok_or_else(|| StageError {
                stage: "synth",
                err: ConfigError::BadValue {
                    key: "preset".to_string(),
                    detail: format!(
                        "unknown preset `{name}`; run `regge synth --list` for the catalog"
                    ),
                }
                .into(),
            })?;
            (model, name.to_string())
        }
        (None, Some(path)) => {
            let text = at("synth", std::fs::read_to_string(path))?;
            let model: SyntheticModel = at("synth", serde_json::from_str(&text))?;
            let stem = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "model".to_string());
            (model, stem)
        }
        _ => {
            return Err(StageError {
                stage: "synth",
                err: ConfigError::BadValue {
                    key: "preset".to_string(),
                    detail: "pass exactly one of --preset or --model".to_string(),
                }
                .into(),
            })
        }
    };
    let table = at("synth", model.generate())?;
    let ledger = at("synth", model.ledger())?;
    write_output(cfg, &format!("{stem}.csv"), &table.to_csv_string())?;
    let text = at("synth", serde_json::to_string_pretty(&ledger))?;
    write_output(cfg, &format!("{stem}.ledger.json"), &text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// pipeline

fn fold_check(
    table: &PartialWaveTable,
    unfolded: &UnfoldedAmplitude,
    folded: &FoldedAmplitude,
    grid: &AngularGrid,
) -> Result<(String, f64), StageError> {
    let dcs = at("dcs", dcs_direct(table, grid))?;
    let mut csv = String::from("E_meV,theta_deg,sigma_direct,sigma_fold,rel_diff\n");
    let mut max_rel = 0.0f64;
    for ei in 0..unfolded.energies_mev.len() {
        for (ti, &theta) in grid.thetas_rad.iter().enumerate() {
            let direct = dcs.sigma[ei][ti];
            let via_fold = folded.sigma(ei, ti);
            let rel = if direct > 0.0 { (via_fold - direct).abs() / direct } else { 0.0 };
            max_rel = max_rel.max(rel);
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                unfolded.energies_mev[ei],
                theta.to_degrees(),
                direct,
                via_fold,
                rel
            ));
        }
    }
    Ok((csv, max_rel))
}

fn observables_json(t: &ReggeTrajectory, inverted: &[(CEPole, Option<f64>)]) -> serde_json::Value {
    // Observables need an E-plane pole on this trajectory; use the inverted
    // pole nearest the fit window's center.
    let fit = match &t.fit {
        Some(f) => f,
        None => return serde_json::Value::Null,
    };
    let center = 0.5 * (fit.window.0 + fit.window.1);
    let candidate = inverted
        .iter()
        .filter(|(p, _)| matches!(p.source, CESource::InvertedFromCam))
        .min_by(|a, b| {
            let da = (a.0.physical_e().re - center).abs();
            let db = (b.0.physical_e().re - center).abs();
            da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal)
        });
    let (pole, im_lambda) = match candidate {
        Some(c) => c,
        None => return serde_json::Value::Null,
    };
    let lambda = Complex64::new(pole.j + 0.5, im_lambda.unwrap_or(0.0));
    match observables_cam(lambda, pole.physical_e(), None) {
        Ok(o) => json!({
            "j": pole.j,
            "e_pole": complex_json(pole.physical_e()),
            "lifetime_s": o.lifetime_s,
            "angular_life_deg": o.angular_life_deg,
            "rotational_constant_mev": o.rotational_constant_mev,
            "j_used": o.j_used,
        }),
        Err(_) => serde_json::Value::Null,
    }
}

fn cmd_pipeline(cfg: &RunConfig) -> Result<(), StageError> {
    let table = load_table(cfg)?;
    let grid = theta_grid(cfg)?;
    let mut outputs: Vec<String> = Vec::new();

    // Unfold once, wide enough for the fold's winding set.
    let ucfg = unfold_config(cfg, Some(cfg.m_max));
    let unfolded = at("unfold", unfold(&table, &ucfg))?;
    write_output(cfg, "unfold.csv", &unfolded.to_csv_string())?;
    outputs.push("unfold.csv".to_string());

    // Fold back and compare against the direct partial-wave DCS.
    let fcfg = fold_config(cfg);
    let folded = at("fold", fold(&unfolded, &grid, &fcfg))?;
    let dcs = at("dcs", dcs_direct(&table, &grid))?;
    write_output(cfg, "dcs.csv", &dcs.to_csv_string())?;
    outputs.push("dcs.csv".to_string());
    let (fold_csv, max_rel) = fold_check(&table, &unfolded, &folded, &grid)?;
    write_output(cfg, "fold_dcs.csv", &fold_csv)?;
    outputs.push("fold_dcs.csv".to_string());

    // Endpoint amplitudes per energy.
    let mut endpoints = Vec::new();
    for ei in 0..unfolded.energies_mev.len() {
        let f0 = at("fold", fold_endpoint(&unfolded, ei, Endpoint::Forward, &fcfg))?;
        let fpi = at("fold", fold_endpoint(&unfolded, ei, Endpoint::Backward, &fcfg))?;
        endpoints.push(json!({
            "e_mev": unfolded.energies_mev[ei],
            "sigma_forward": f0.norm_sqr(),
            "sigma_backward": fpi.norm_sqr(),
        }));
    }

    // Poles, trajectories, complex-energy assignment.
    let sets = poles_per_energy(&table, &pole_config(cfg, table.jmax))?;
    write_output(cfg, "poles.csv", &poles_csv(&sets, Axis::Lambda))?;
    outputs.push("poles.csv".to_string());
    let chains = build_trajectories(&sets, cfg)?;
    write_output(cfg, "trajectories.csv", &trajectories_to_csv(&chains))?;
    outputs.push("trajectories.csv".to_string());
    let ce = ce_analysis(&table, &chains, cfg)?;
    write_output(cfg, "ce_poles.csv", &ce_csv(&ce))?;
    outputs.push("ce_poles.csv".to_string());

    // Background / resonance decomposition.
    let artifacts = run_decomposition(&unfolded, cfg)?;
    write_output(cfg, "decompose.csv", &artifacts.csv)?;
    outputs.push("decompose.csv".to_string());

    let pole_entries: Vec<_> = sets
        .iter()
        .map(|(e, set)| {
            let poles: Vec<_> = set
                .poles
                .iter()
                .map(|p| {
                    json!({
                        "position": complex_json(p.position),
                        "residue": complex_json(p.residue),
                        "significance": significance_label(p),
                        "crosscheck_rel": p.crosscheck_rel,
                    })
                })
                .collect();
            json!({
                "e_mev": e,
                "fit_degree": set.fit_degree,
                "poles": poles,
                "n_zeros": set.zeros.len(),
            })
        })
        .collect();

    let trajectories_json: Vec<_> = chains
        .iter()
        .map(|t| {
            let mut v = trajectory_json(t);
            let obs = observables_json(t, &ce.inverted);
            v["observables"] = obs;
            v
        })
        .collect();

    let decomposition_json = |label: &str, r: &DecompositionReport| {
        json!({
            "tag": label,
            "n_energies": r.rows.len(),
            "max_residual": r.max_residual(),
            "peak_exact_dcs": r.peak_exact_dcs(),
        })
    };

    let summary = json!({
        "input": cfg.input.as_ref().map(|p| p.display().to_string()),
        "transition": table.transition.to_string(),
        "jmax": table.jmax,
        "energies_mev": table.energies_mev,
        "theta_grid": cfg.theta_grid,
        "fold_check": {
            "max_rel_diff": max_rel,
            "n_theta": grid.thetas_rad.len(),
            "endpoints": endpoints,
        },
        "poles": pole_entries,
        "trajectories": trajectories_json,
        "ce": {
            "n_inverted": ce.inverted.len(),
            "n_direct": ce.direct.len(),
            "comparison": comparison_json(&ce.comparison),
        },
        "decomposition": {
            "forward": decomposition_json("forward", &artifacts.forward),
            "backward": decomposition_json("backward", &artifacts.backward),
            "sideway": artifacts
                .sideway
                .as_ref()
                .map(|s| decomposition_json(&format!("theta={}deg", cfg.decompose_theta_deg), s)),
        },
        "outputs": outputs,
    });
    let text = at("write-output", serde_json::to_string_pretty(&summary))?;
    write_output(cfg, "summary.json", &text)?;
    Ok(())
}
