//! Orchestration of the simulations behind each subcommand: reference-detuning
//! location, detuning sweeps, delayed-correlation traces, and model
//! comparisons, with optional data-parallel execution over sweep points.

use std::fmt;

use rayon::prelude::*;

use rydcav::dynamics::{
    expectation, g2_tau, g2_zero, g2_zero_perturbative, steady_state, CorrelationTrace,
    Liouvillian, SolverOptions, SteadyStateMethod,
};
use rydcav::error::Error as CoreError;
use rydcav::models::{KerrVariant, ModelSystem, ModelVariant, ThreeLevelModel};
use rydcav::params::PhysicalParams;

use crate::csvio::fmt17;

/// Failure of a whole run (as opposed to a single sweep point, which is
/// recorded in the output's error column instead).
#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// Unusable inputs: bad parameter values, grids, cutoffs, or file paths.
    Config(String),
    /// A solver or search failed to converge or broke down numerically.
    Numerical(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(m) => write!(f, "{m}"),
            Self::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    /// Process exit code for this failure: 1 for configuration problems,
    /// 2 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Numerical(_) => 2,
        }
    }
}

/// Sorts a library error into the configuration/numerical split used for
/// process exit codes.
pub fn from_core(e: &CoreError) -> RunError {
    match e {
        CoreError::InvalidParams(_)
        | CoreError::ZeroIntermediateDetuning
        | CoreError::SingleBubbleKerr
        | CoreError::NonPositiveTwoPhotonDetuning
        | CoreError::CutoffTooSmall { .. }
        | CoreError::BasisMismatch => RunError::Config(e.to_string()),
        CoreError::DegenerateSteadyState
        | CoreError::NonConvergence { .. }
        | CoreError::ResidualAboveTolerance { .. }
        | CoreError::VanishingPhotonNumber
        | CoreError::SingularLinearSolve
        | CoreError::InvalidTimeGrid => RunError::Numerical(e.to_string()),
    }
}

/// Builds the requested model variant at a given basis cutoff.
pub fn build_model(
    p: &PhysicalParams,
    variant: ModelVariant,
    cutoff: u32,
) -> Result<ModelSystem, CoreError> {
    match variant {
        ModelVariant::CavityOnly => ModelSystem::cavity_only(p, cutoff),
        ModelVariant::SpinBubble => {
            let eff = p.derive_effective()?;
            ModelSystem::spin_bubble(p, &eff, cutoff)
        }
        ModelVariant::TwoBosonKappaBar => {
            let eff = p.derive_effective()?;
            ModelSystem::two_boson(p, &eff, KerrVariant::KappaBar, cutoff)
        }
        ModelVariant::TwoBosonKappaBarPrime => {
            let eff = p.derive_effective()?;
            ModelSystem::two_boson(p, &eff, KerrVariant::KappaBarPrime, cutoff)
        }
    }
}

/// Parses the `--model` flag values used across subcommands.
pub fn parse_model(name: &str) -> Result<ModelVariant, String> {
    Ok(match name {
        "spin" => ModelVariant::SpinBubble,
        "boson-kbar" => ModelVariant::TwoBosonKappaBar,
        "boson-kbarprime" => ModelVariant::TwoBosonKappaBarPrime,
        "cavity" => ModelVariant::CavityOnly,
        other => {
            return Err(format!(
                "unknown model `{other}` (expected spin, boson-kbar, boson-kbarprime, or cavity)"
            ))
        }
    })
}

/// Stationary photon number of a model variant at a given drive detuning.
fn photon_number_at(
    p: &PhysicalParams,
    variant: ModelVariant,
    cutoff: u32,
    delta_c: f64,
) -> Result<f64, CoreError> {
    let pm = p.with_delta_c(delta_c);
    let model = build_model(&pm, variant, cutoff)?;
    let l = Liouvillian::build(&model)?;
    let rho = steady_state(&l, SteadyStateMethod::NullSpace, &SolverOptions::default())?;
    Ok(expectation(&model.photon_number_op(), &rho)?.re)
}

/// Search window for the reference detuning, in units of `gamma_e`.
pub const REFERENCE_WINDOW: (f64, f64) = (-15.0, 5.0);

/// Locates the drive detuning that maximizes the stationary photon number,
/// by a coarse scan of the window followed by golden-section refinement to
/// `1e-3 * gamma_e`. Fails when the coarse maximum sits on the window
/// boundary (the window then does not bracket the peak).
pub fn locate_reference_detuning(
    p: &PhysicalParams,
    variant: ModelVariant,
    cutoff: u32,
) -> Result<f64, RunError> {
    p.validate().map_err(|e| from_core(&e))?;
    let g = p.gamma_e;
    let (lo, hi) = (REFERENCE_WINDOW.0 * g, REFERENCE_WINDOW.1 * g);
    let coarse_step = 0.25 * g;
    let n = ((hi - lo) / coarse_step).round() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| lo + coarse_step * i as f64).collect();

    let eval = |dc: f64| photon_number_at(p, variant, cutoff, dc).map_err(|e| from_core(&e));

    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, &x) in xs.iter().enumerate() {
        let v = eval(x)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    if best.0 == 0 || best.0 == xs.len() - 1 {
        return Err(RunError::Numerical(format!(
            "photon-number maximum sits on the search-window boundary at delta_c = {}; \
             the window [{lo}, {hi}] does not bracket the peak",
            xs[best.0]
        )));
    }

    // Golden-section maximization on the bracketing interval.
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (xs[best.0 - 1], xs[best.0 + 1]);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    let tol = 1e-3 * g;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = eval(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Uniform reduced-detuning grid `theta_min, theta_min + step, …` up to
/// `theta_max` (inclusive when the step divides the range).
pub fn theta_grid(theta_min: f64, theta_max: f64, theta_step: f64) -> Result<Vec<f64>, RunError> {
    if !theta_min.is_finite() || !theta_max.is_finite() || !theta_step.is_finite() {
        return Err(RunError::Config("theta grid bounds must be finite".into()));
    }
    if theta_step <= 0.0 {
        return Err(RunError::Config("theta_step must be positive".into()));
    }
    if theta_min >= theta_max {
        return Err(RunError::Config("theta_min must be below theta_max".into()));
    }
    let n = ((theta_max - theta_min) / theta_step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| theta_min + theta_step * i as f64).collect())
}

/// `points` equally spaced delays from 0 to `tau_max` inclusive.
pub fn tau_grid(tau_max: f64, points: usize) -> Result<Vec<f64>, RunError> {
    if !tau_max.is_finite() || tau_max <= 0.0 {
        return Err(RunError::Config("tau_max must be positive and finite".into()));
    }
    if points < 2 {
        return Err(RunError::Config("points must be at least 2".into()));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|i| tau_max * i as f64 / last).collect())
}

/// Runs `f` over `0..n`, preserving index order, on a dedicated pool of
/// `workers` threads (0 = one thread per logical CPU). `workers == 1` stays
/// on the calling thread.
pub fn run_indexed<T, F>(n: usize, workers: usize, f: F) -> Result<Vec<T>, RunError>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers == 1 {
        return Ok((0..n).map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}

/// One detuning of a `g²(0)` sweep. Failed points carry NaN observables and
/// the failure text in `error`.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub theta: f64,
    pub delta_c: f64,
    /// Stationary photon number `⟨a†a⟩`.
    pub n_ss: f64,
    /// Stationary pair expectation `⟨a†a†aa⟩`.
    pub pairs_ss: f64,
    pub g2_numeric: f64,
    pub g2_perturbative: f64,
    /// Max-norm of `L ρ_ss` for the returned state.
    pub residual: f64,
    pub error: Option<String>,
}

fn sweep_observables(
    p: &PhysicalParams,
    variant: ModelVariant,
    cutoff: u32,
    delta_c: f64,
) -> Result<(f64, f64, f64, f64, f64), CoreError> {
    let pm = p.with_delta_c(delta_c);
    let model = build_model(&pm, variant, cutoff)?;
    let l = Liouvillian::build(&model)?;
    let rho = steady_state(&l, SteadyStateMethod::NullSpace, &SolverOptions::default())?;
    let n_ss = expectation(&model.photon_number_op(), &rho)?.re;
    let pairs_ss = expectation(&model.photon_pair_op(), &rho)?.re;
    let g2_numeric = g2_zero(&model, &rho)?;
    let g2_perturbative = g2_zero_perturbative(&model)?;
    let residual = l.residual(&rho)?;
    Ok((n_ss, pairs_ss, g2_numeric, g2_perturbative, residual))
}

/// Result of [`run_sweep`]: the freshly located reference detuning, one row
/// per grid point, and the number of failed points.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub delta_c0: f64,
    pub rows: Vec<SweepPoint>,
    pub failed: usize,
}

/// Sweeps `g²(0)` and its stationary moments over the reduced detuning grid.
///
/// The reference detuning is located on the spin-bubble model regardless of
/// the swept `variant`, so every variant is plotted against the same
/// `theta = (delta_c - delta_c0) / gamma_e` axis. Per-point failures are
/// recorded in the row and do not abort the sweep.
pub fn run_sweep(
    p: &PhysicalParams,
    variant: ModelVariant,
    grid: &[f64],
    cutoff: u32,
    workers: usize,
) -> Result<SweepOutput, RunError> {
    let delta_c0 = locate_reference_detuning(p, ModelVariant::SpinBubble, cutoff)?;
    let rows = run_indexed(grid.len(), workers, |i| {
        let theta = grid[i];
        let delta_c = delta_c0 + theta * p.gamma_e;
        match sweep_observables(p, variant, cutoff, delta_c) {
            Ok((n_ss, pairs_ss, g2_numeric, g2_perturbative, residual)) => SweepPoint {
                theta,
                delta_c,
                n_ss,
                pairs_ss,
                g2_numeric,
                g2_perturbative,
                residual,
                error: None,
            },
            Err(e) => SweepPoint {
                theta,
                delta_c,
                n_ss: f64::NAN,
                pairs_ss: f64::NAN,
                g2_numeric: f64::NAN,
                g2_perturbative: f64::NAN,
                residual: f64::NAN,
                error: Some(e.to_string()),
            },
        }
    })?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(SweepOutput { delta_c0, rows, failed })
}

/// One detuning of a model-comparison sweep: `g²(0)` for the spin-bubble
/// model and both two-boson variants at the same drive detuning.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub theta: f64,
    pub delta_c: f64,
    pub g2_spin: f64,
    pub g2_boson_kbar: f64,
    pub g2_boson_kbarprime: f64,
    pub error: Option<String>,
}

fn g2_only(
    p: &PhysicalParams,
    variant: ModelVariant,
    cutoff: u32,
    delta_c: f64,
) -> Result<f64, CoreError> {
    let pm = p.with_delta_c(delta_c);
    let model = build_model(&pm, variant, cutoff)?;
    let l = Liouvillian::build(&model)?;
    let rho = steady_state(&l, SteadyStateMethod::NullSpace, &SolverOptions::default())?;
    g2_zero(&model, &rho)
}

/// Result of [`run_compare`].
#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub delta_c0: f64,
    pub rows: Vec<CompareRow>,
    pub failed: usize,
}

/// Sweeps `g²(0)` for the spin-bubble and both two-boson variants over a
/// shared grid, against the spin-located reference detuning.
pub fn run_compare(
    p: &PhysicalParams,
    grid: &[f64],
    cutoff: u32,
    workers: usize,
) -> Result<CompareOutput, RunError> {
    let eff = p.derive_effective().map_err(|e| from_core(&e))?;
    if eff.kappa_bar_prime.is_none() {
        return Err(RunError::Config(
            "model comparison needs bubble_count >= 2 (the pair-corrected Kerr coefficient \
             is undefined for a single bubble)"
                .into(),
        ));
    }
    let delta_c0 = locate_reference_detuning(p, ModelVariant::SpinBubble, cutoff)?;
    let variants = [
        ModelVariant::SpinBubble,
        ModelVariant::TwoBosonKappaBar,
        ModelVariant::TwoBosonKappaBarPrime,
    ];
    let rows = run_indexed(grid.len(), workers, |i| {
        let theta = grid[i];
        let delta_c = delta_c0 + theta * p.gamma_e;
        let mut g2 = [f64::NAN; 3];
        let mut errors: Vec<String> = Vec::new();
        for (slot, &variant) in g2.iter_mut().zip(&variants) {
            match g2_only(p, variant, cutoff, delta_c) {
                Ok(v) => *slot = v,
                Err(e) => errors.push(format!("{}: {e}", variant.name())),
            }
        }
        CompareRow {
            theta,
            delta_c,
            g2_spin: g2[0],
            g2_boson_kbar: g2[1],
            g2_boson_kbarprime: g2[2],
            error: if errors.is_empty() { None } else { Some(errors.join("; ")) },
        }
    })?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(CompareOutput { delta_c0, rows, failed })
}

/// Result of [`run_g2tau`]: the sampled trace plus the location it was taken
/// at and the analytic three-level oscillation period (absent for the
/// cavity-only model, and for parameters whose polariton splitting has no
/// real part).
#[derive(Debug, Clone)]
pub struct TauOutput {
    pub delta_c0: f64,
    pub delta_c: f64,
    pub trace: CorrelationTrace,
    pub predicted_period: Option<f64>,
}

/// Samples `g²(τ)` at a fixed reduced detuning on a uniform delay grid.
pub fn run_g2tau(
    p: &PhysicalParams,
    variant: ModelVariant,
    theta: f64,
    tau_max: f64,
    points: usize,
    cutoff: u32,
) -> Result<TauOutput, RunError> {
    if !theta.is_finite() {
        return Err(RunError::Config("theta must be finite".into()));
    }
    let taus = tau_grid(tau_max, points)?;
    let delta_c0 = locate_reference_detuning(p, ModelVariant::SpinBubble, cutoff)?;
    let delta_c = delta_c0 + theta * p.gamma_e;
    let pm = p.with_delta_c(delta_c);
    let core = |e: CoreError| from_core(&e);
    let model = build_model(&pm, variant, cutoff).map_err(core)?;
    let l = Liouvillian::build(&model).map_err(core)?;
    let rho = steady_state(&l, SteadyStateMethod::NullSpace, &SolverOptions::default())
        .map_err(core)?;
    let mut trace = g2_tau(&model, &l, &rho, &taus).map_err(core)?;
    trace.theta = Some(theta);
    let predicted_period = match variant {
        ModelVariant::CavityOnly => None,
        _ => {
            let eff = pm.derive_effective().map_err(core)?;
            ThreeLevelModel::build(&pm, &eff)
                .map_err(core)?
                .predicted_oscillation_period()
        }
    };
    Ok(TauOutput { delta_c0, delta_c, trace, predicted_period })
}

/// Renders the derived effective parameters as deterministic
/// `name = value` lines.
pub fn effective_params_report(p: &PhysicalParams) -> Result<String, RunError> {
    let eff = p.derive_effective().map_err(|e| from_core(&e))?;
    let mut out = String::new();
    let mut line = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    line("g2n", fmt17(p.g2n()));
    line("gamma_r_eff", fmt17(eff.gamma_r_eff));
    line("delta_r_eff", fmt17(eff.delta_r_eff));
    line("gamma_c_eff", fmt17(eff.gamma_c_eff));
    line("delta_c_eff", fmt17(eff.delta_c_eff));
    line("g_eff_sqrt_n", fmt17(eff.g_eff_sqrt_n));
    line("n_b", fmt17(eff.n_b));
    line("kappa_bar", fmt17(eff.kappa_bar));
    line(
        "kappa_bar_prime",
        eff.kappa_bar_prime.map_or_else(|| "none".to_owned(), fmt17),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_grid_covers_the_default_window() {
        let g = theta_grid(-8.0, 4.0, 0.05).unwrap();
        assert_eq!(g.len(), 241);
        assert_eq!(g[0], -8.0);
        assert!((g[240] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn theta_grid_rejects_bad_bounds() {
        assert!(theta_grid(0.0, 1.0, 0.0).is_err());
        assert!(theta_grid(0.0, 1.0, -0.5).is_err());
        assert!(theta_grid(1.0, 0.0, 0.5).is_err());
        assert!(theta_grid(f64::NAN, 0.0, 0.5).is_err());
    }

    #[test]
    fn tau_grid_is_inclusive_and_uniform() {
        let g = tau_grid(20.0, 401).unwrap();
        assert_eq!(g.len(), 401);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[400], 20.0);
        assert!((g[1] - 0.05).abs() < 1e-12);
        assert!(tau_grid(0.0, 10).is_err());
        assert!(tau_grid(5.0, 1).is_err());
    }

    #[test]
    fn model_names_round_trip() {
        for v in [
            ModelVariant::SpinBubble,
            ModelVariant::TwoBosonKappaBar,
            ModelVariant::TwoBosonKappaBarPrime,
            ModelVariant::CavityOnly,
        ] {
            assert_eq!(parse_model(v.name()).unwrap(), v);
        }
        assert!(parse_model("three-level").is_err());
    }

    #[test]
    fn cavity_reference_detuning_is_at_resonance() {
        // A bare cavity's photon number is a Lorentzian in the drive
        // detuning, peaked at zero.
        let p = PhysicalParams::reference();
        let dc0 = locate_reference_detuning(&p, ModelVariant::CavityOnly, 3).unwrap();
        assert!(dc0.abs() < 1e-3, "dc0 = {dc0}");
    }

    #[test]
    fn boundary_maximum_is_reported() {
        // A huge collective coupling pushes the dressed-cavity resonance far
        // below the search window.
        let mut p = PhysicalParams::reference();
        p.g2n_override = Some(4000.0);
        let e = locate_reference_detuning(&p, ModelVariant::SpinBubble, 2).unwrap_err();
        assert!(matches!(e, RunError::Numerical(_)));
        assert!(e.to_string().contains("boundary"));
    }

    #[test]
    fn indexed_runs_preserve_order_across_worker_counts() {
        let f = |i: usize| i * i;
        let serial = run_indexed(100, 1, f).unwrap();
        let parallel = run_indexed(100, 4, f).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(serial[7], 49);
    }

    #[test]
    fn effective_report_lists_every_derived_quantity() {
        let text = effective_params_report(&PhysicalParams::reference()).unwrap();
        for key in [
            "g2n",
            "gamma_r_eff",
            "delta_r_eff",
            "gamma_c_eff",
            "delta_c_eff",
            "g_eff_sqrt_n",
            "n_b",
            "kappa_bar",
            "kappa_bar_prime",
        ] {
            assert!(text.contains(&format!("{key} = ")), "missing {key}");
        }
        let mut single = PhysicalParams::reference();
        single.bubble_count = 1;
        single.atom_density = None;
        single.volume = None;
        let text = effective_params_report(&single).unwrap();
        assert!(text.contains("kappa_bar_prime = none"));
    }
}
