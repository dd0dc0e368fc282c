//! Lindblad dynamics: density matrices, the Liouvillian superoperator and
//! its matrix exponential, stationary states, the delayed pair correlation
//! `g²(τ)` via the regression theorem, and a weak-drive series for `g²(0)`.
//!
//! Density matrices are vectorized column by column, so with `d` basis
//! states the superoperator is a dense `d² × d²` complex matrix and
//! `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

// Validation guards are written as negated comparisons (`!(x > y)`) so that a
// NaN produced by an upstream breakdown takes the failure branch; `x <= y`
// would silently accept it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::{same_basis, Basis, Operator};
use crate::linalg::{expm, hermitian_eigenvalues, max_abs};
use crate::models::{ModelSystem, ModelVariant, ThreeLevelModel};
use crate::C64;

fn vec_of(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

fn unvec(d: usize, v: &DVector<C64>) -> DMatrix<C64> {
    DMatrix::from_column_slice(d, d, v.as_slice())
}

fn max_abs_vec(v: &DVector<C64>) -> f64 {
    v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

fn require_time_grid(taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return Err(Error::InvalidTimeGrid);
    }
    let mut prev = 0.0f64;
    for &t in taus {
        if !t.is_finite() || t < prev {
            return Err(Error::InvalidTimeGrid);
        }
        prev = t;
    }
    Ok(())
}

/// A (not necessarily normalized) operator-valued state on a basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    basis: Arc<Basis>,
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// The pure vacuum state `|0,0⟩⟨0,0|`.
    pub fn vacuum(basis: &Arc<Basis>) -> Self {
        let idx = basis
            .index_of(0, 0)
            .expect("every basis contains the vacuum state");
        let mut mat = DMatrix::zeros(basis.dim(), basis.dim());
        mat[(idx, idx)] = C64::new(1.0, 0.0);
        Self { basis: Arc::clone(basis), mat }
    }

    /// Projector onto a normalized copy of `amplitudes`.
    pub fn from_pure(basis: &Arc<Basis>, amplitudes: &DVector<C64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::BasisMismatch);
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidParams("zero state vector".to_string()));
        }
        let mut mat = DMatrix::zeros(basis.dim(), basis.dim());
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                mat[(i, j)] = amplitudes[i] * amplitudes[j].conj() / C64::new(norm_sq, 0.0);
            }
        }
        Ok(Self { basis: Arc::clone(basis), mat })
    }

    /// Wraps an explicit matrix; only the dimension is checked.
    pub fn from_matrix(basis: &Arc<Basis>, mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != basis.dim() || mat.ncols() != basis.dim() {
            return Err(Error::BasisMismatch);
        }
        Ok(Self { basis: Arc::clone(basis), mat })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        let mut t = C64::new(0.0, 0.0);
        for i in 0..self.mat.nrows() {
            t += self.mat[(i, i)];
        }
        t
    }

    /// Largest absolute difference between the matrix and its adjoint.
    pub fn hermiticity_error(&self) -> f64 {
        let diff = &self.mat - self.mat.adjoint();
        max_abs(&diff)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    /// Smallest eigenvalue of the Hermitian part (negative values signal a
    /// nonphysical state beyond roundoff).
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    /// Trace distance `½ Σ |eig(ρ - σ)|`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if !same_basis(&self.basis, &other.basis) {
            return Err(Error::BasisMismatch);
        }
        let diff = DensityMatrix {
            basis: Arc::clone(&self.basis),
            mat: &self.mat - &other.mat,
        };
        Ok(0.5 * diff.eigenvalues().iter().map(|e| e.abs()).sum::<f64>())
    }

    /// Total population on states saturating the excitation cutoff — a
    /// direct measure of truncation stress.
    pub fn boundary_population(&self) -> f64 {
        self.basis
            .boundary_indices()
            .iter()
            .map(|&i| self.mat[(i, i)].re)
            .sum()
    }
}

/// How to find the stationary state of a Liouvillian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyStateMethod {
    /// Direct kernel computation via a trace-constrained linear solve.
    NullSpace,
    /// Repeated application of a fixed-step propagator until the state
    /// stops changing.
    LongTimePropagation,
}

/// Tolerances and limits for the stationary-state solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Time step of the long-time propagator.
    pub propagation_step: f64,
    /// Per-step max-norm change below which propagation stops.
    pub convergence_tol: f64,
    /// Propagation time after which [`Error::NonConvergence`] is returned.
    pub t_max: f64,
    /// Largest acceptable max-norm of `L ρ` for a returned stationary state.
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            propagation_step: 1.0,
            convergence_tol: 1e-12,
            t_max: 1e4,
            residual_tol: 1e-10,
        }
    }
}

/// Dense superoperator generating `dρ/dt = -i[H,ρ] + Σ γ (2LρL† - L†Lρ - ρL†L)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    basis: Arc<Basis>,
    mat: DMatrix<C64>,
}

/// Adds `-i (op ρ - ρ op)` to the superoperator.
fn add_commutator(mat: &mut DMatrix<C64>, d: usize, op: &Operator) {
    let minus_i = C64::new(0.0, -1.0);
    let plus_i = C64::new(0.0, 1.0);
    for (r, c, v) in op.entries() {
        // left product: row block diagonal in the column index of ρ
        for j in 0..d {
            mat[(r + d * j, c + d * j)] += minus_i * v;
        }
        // right product: ρ[i, r] feeds component (i, c) of ρ·op
        for i in 0..d {
            mat[(i + d * c, i + d * r)] += plus_i * v;
        }
    }
}

/// Adds `rate (2 L ρ L† - L†L ρ - ρ L†L)` to the superoperator.
fn add_dissipator(mat: &mut DMatrix<C64>, d: usize, rate: f64, l_op: &Operator) {
    let two_rate = C64::new(2.0 * rate, 0.0);
    let entries: Vec<(usize, usize, C64)> = l_op.entries().collect();
    for &(i, k, lv) in &entries {
        for &(j, l, lw) in &entries {
            mat[(i + d * j, k + d * l)] += two_rate * lv * lw.conj();
        }
    }
    let m_op = l_op.adjoint().matmul(l_op);
    let minus_rate = C64::new(-rate, 0.0);
    for (r, c, v) in m_op.entries() {
        for j in 0..d {
            mat[(r + d * j, c + d * j)] += minus_rate * v;
        }
        for i in 0..d {
            mat[(i + d * c, i + d * r)] += minus_rate * v;
        }
    }
}

impl Liouvillian {
    /// Assembles the generator from an explicit Hamiltonian and collapse
    /// channels, all sharing one basis.
    pub fn from_parts(
        basis: &Arc<Basis>,
        hamiltonian: &Operator,
        collapse: &[(f64, Operator)],
    ) -> Result<Self> {
        if !same_basis(basis, hamiltonian.basis()) {
            return Err(Error::BasisMismatch);
        }
        for (_, l_op) in collapse {
            if !same_basis(basis, l_op.basis()) {
                return Err(Error::BasisMismatch);
            }
        }
        let d = basis.dim();
        let mut mat = DMatrix::zeros(d * d, d * d);
        add_commutator(&mut mat, d, hamiltonian);
        for (rate, l_op) in collapse {
            add_dissipator(&mut mat, d, *rate, l_op);
        }
        Ok(Self { basis: Arc::clone(basis), mat })
    }

    /// Generator of a model system.
    pub fn build(model: &ModelSystem) -> Result<Self> {
        Self::from_parts(model.basis(), model.hamiltonian(), model.collapse())
    }

    /// Pure commutator generator `-i [op, ·]` (no dissipation) — the
    /// superoperator a Hamiltonian perturbation contributes.
    pub fn commutator(op: &Operator) -> Self {
        let d = op.basis().dim();
        let mut mat = DMatrix::zeros(d * d, d * d);
        add_commutator(&mut mat, d, op);
        Self { basis: Arc::clone(op.basis()), mat }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    /// Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    /// Applies the generator to a plain matrix.
    pub fn apply_matrix(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let d = self.dim();
        unvec(d, &(&self.mat * vec_of(rho)))
    }

    /// Applies the generator to a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if !same_basis(&self.basis, rho.basis()) {
            return Err(Error::BasisMismatch);
        }
        Ok(DensityMatrix {
            basis: Arc::clone(&self.basis),
            mat: self.apply_matrix(rho.matrix()),
        })
    }

    /// Largest column sum of the trace rows — zero (to roundoff) iff the
    /// generator preserves the trace of every state.
    pub fn trace_functional_residual(&self) -> f64 {
        let d = self.dim();
        let n = d * d;
        let mut worst = 0.0f64;
        for col in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..d {
                s += self.mat[(i + d * i, col)];
            }
            worst = worst.max(s.norm());
        }
        worst
    }

    /// Finite-time propagator `exp(L t)` as a dense superoperator.
    pub fn propagator(&self, t: f64) -> DMatrix<C64> {
        expm(&(&self.mat * C64::new(t, 0.0)))
    }

    /// Evolves a state for time `t ≥ 0`.
    pub fn propagate(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if !same_basis(&self.basis, rho.basis()) {
            return Err(Error::BasisMismatch);
        }
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidTimeGrid);
        }
        let d = self.dim();
        let x = &self.propagator(t) * vec_of(rho.matrix());
        Ok(DensityMatrix { basis: Arc::clone(&self.basis), mat: unvec(d, &x) })
    }

    /// Max-norm of `L ρ` — the stationarity residual of a state.
    pub fn residual(&self, rho: &DensityMatrix) -> Result<f64> {
        if !same_basis(&self.basis, rho.basis()) {
            return Err(Error::BasisMismatch);
        }
        Ok(max_abs_vec(&(&self.mat * vec_of(rho.matrix()))))
    }
}

/// The trace-constrained system `M = L + c tᵀ` (`c = vec(I)/d`, `t` the trace
/// functional): `M x = c` has the unique trace-one kernel vector of `L` as
/// its solution when the stationary state is unique, and `M` turns singular
/// exactly when it is not.
struct BorderedKernelSolver {
    d: usize,
    m: DMatrix<C64>,
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl BorderedKernelSolver {
    fn new(l: &Liouvillian) -> Result<Self> {
        let d = l.dim();
        let n = d * d;
        let w = C64::new(1.0 / d as f64, 0.0);
        let mut m = l.mat.clone();
        for i in 0..d {
            for k in 0..d {
                m[(i + d * i, k + d * k)] += w;
            }
        }
        let lu = m.clone().lu();
        // singular (or numerically singular) upper factor ⇒ the kernel of L
        // is more than one-dimensional
        let u = lu.u();
        let mut dmin = f64::INFINITY;
        let mut dmax = 0.0f64;
        for i in 0..n {
            let p = u[(i, i)].norm();
            dmin = dmin.min(p);
            dmax = dmax.max(p);
        }
        if !(dmin > dmax * 1e-12) {
            return Err(Error::DegenerateSteadyState);
        }
        Ok(Self { d, m, lu })
    }

    /// Solves `M x = rhs` with one step of iterative refinement.
    fn solve(&self, rhs: &DVector<C64>) -> Result<DVector<C64>> {
        let mut x = self.lu.solve(rhs).ok_or(Error::SingularLinearSolve)?;
        let r = rhs - &self.m * &x;
        if let Some(dx) = self.lu.solve(&r) {
            x += dx;
        }
        Ok(x)
    }

    /// The trace-one kernel vector of `L`.
    fn kernel_state(&self) -> Result<DVector<C64>> {
        let d = self.d;
        let w = C64::new(1.0 / d as f64, 0.0);
        let mut rhs = DVector::zeros(d * d);
        for i in 0..d {
            rhs[i + d * i] = w;
        }
        self.solve(&rhs)
    }
}

/// Symmetrizes, normalizes, and residual-checks a candidate stationary
/// vector.
fn finalize_stationary(
    l: &Liouvillian,
    x: &DVector<C64>,
    opts: &SolverOptions,
) -> Result<DensityMatrix> {
    let d = l.dim();
    let raw = unvec(d, x);
    let mut mat = (&raw + raw.adjoint()) * C64::new(0.5, 0.0);
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..d {
        tr += mat[(i, i)];
    }
    if !(tr.re > 0.1) {
        // a kernel vector with (near-)vanishing trace is not a state
        return Err(Error::DegenerateSteadyState);
    }
    mat /= C64::new(tr.re, 0.0);
    let rho = DensityMatrix { basis: Arc::clone(&l.basis), mat };
    let residual = l.residual(&rho)?;
    if residual > opts.residual_tol {
        return Err(Error::ResidualAboveTolerance { residual });
    }
    Ok(rho)
}

/// Computes the stationary state of the generator.
pub fn steady_state(
    l: &Liouvillian,
    method: SteadyStateMethod,
    opts: &SolverOptions,
) -> Result<DensityMatrix> {
    match method {
        SteadyStateMethod::NullSpace => {
            let solver = BorderedKernelSolver::new(l)?;
            let x = solver.kernel_state()?;
            finalize_stationary(l, &x, opts)
        }
        SteadyStateMethod::LongTimePropagation => {
            let step = opts.propagation_step;
            if !(step > 0.0) || !step.is_finite() {
                return Err(Error::InvalidTimeGrid);
            }
            let p = l.propagator(step);
            let mut x = vec_of(DensityMatrix::vacuum(&l.basis).matrix());
            let mut t = 0.0f64;
            loop {
                let next = &p * &x;
                let change = max_abs_vec(&(&next - &x));
                x = next;
                t += step;
                if change < opts.convergence_tol {
                    break;
                }
                if t >= opts.t_max {
                    return Err(Error::NonConvergence { t_max: opts.t_max });
                }
            }
            finalize_stationary(l, &x, opts)
        }
    }
}

/// `Tr(op ρ)`.
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<C64> {
    if !same_basis(op.basis(), rho.basis()) {
        return Err(Error::BasisMismatch);
    }
    let mut s = C64::new(0.0, 0.0);
    for (r, c, v) in op.entries() {
        s += v * rho.matrix()[(c, r)];
    }
    Ok(s)
}

fn trace_of_product(op: &Operator, mat: &DMatrix<C64>) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for (r, c, v) in op.entries() {
        s += v * mat[(c, r)];
    }
    s
}

const MIN_PHOTON_NUMBER: f64 = 1e-100;

/// Equal-time pair correlation `g²(0) = ⟨a†a†aa⟩ / ⟨a†a⟩²` in a given state.
pub fn g2_zero(model: &ModelSystem, rho: &DensityMatrix) -> Result<f64> {
    let den = expectation(&model.photon_number_op(), rho)?.re;
    if !(den > MIN_PHOTON_NUMBER) {
        return Err(Error::VanishingPhotonNumber);
    }
    let mut num = expectation(&model.photon_pair_op(), rho)?.re;
    // clamp pure-roundoff negatives (the exact value is nonnegative)
    if num < 0.0 && num > -1e-10 * den * den {
        num = 0.0;
    }
    Ok(num / (den * den))
}

/// A sampled delayed pair correlation.
#[derive(Debug, Clone)]
pub struct CorrelationTrace {
    pub variant: ModelVariant,
    /// Cavity detuning offset the trace was computed at, if known.
    pub theta: Option<f64>,
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    /// `|g²(τ_last) - 1|` — how closely the trace has reached its
    /// factorized long-delay limit.
    pub asymptote_deviation: f64,
}

impl CorrelationTrace {
    /// Number of strict sign changes of `g²(τ) - 1` along the trace.
    pub fn unity_crossings(&self) -> usize {
        let mut n = 0;
        for w in self.values.windows(2) {
            if (w[0] - 1.0) * (w[1] - 1.0) < 0.0 {
                n += 1;
            }
        }
        n
    }

    /// Strict interior local maxima as `(τ, g²)` pairs.
    pub fn local_maxima(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for i in 1..self.values.len().saturating_sub(1) {
            if self.values[i] > self.values[i - 1] && self.values[i] > self.values[i + 1] {
                out.push((self.taus[i], self.values[i]));
            }
        }
        out
    }
}

/// Delayed pair correlation `g²(τ) = ⟨a†(0) a†(τ) a(τ) a(0)⟩ / ⟨a†a⟩²` in
/// the stationary state, by propagating the regression seed `a ρ a†` and
/// reading out the photon number along the way.
///
/// `taus` must be finite, nonnegative, and nondecreasing. Repeated gaps are
/// served from a propagator cache, so uniform grids cost one matrix
/// exponential.
pub fn g2_tau(
    model: &ModelSystem,
    l: &Liouvillian,
    rho_ss: &DensityMatrix,
    taus: &[f64],
) -> Result<CorrelationTrace> {
    require_time_grid(taus)?;
    if !same_basis(model.basis(), l.basis()) || !same_basis(model.basis(), rho_ss.basis()) {
        return Err(Error::BasisMismatch);
    }
    let n_op = model.photon_number_op();
    let den = expectation(&n_op, rho_ss)?.re;
    if !(den > MIN_PHOTON_NUMBER) {
        return Err(Error::VanishingPhotonNumber);
    }
    let a_dense = model.cavity_op().to_dense();
    let seed = &a_dense * rho_ss.matrix() * a_dense.adjoint();
    let mut x = vec_of(&seed);
    let mut cache: BTreeMap<u64, DMatrix<C64>> = BTreeMap::new();
    let d = model.basis().dim();
    let mut cur = 0.0f64;
    let mut values = Vec::with_capacity(taus.len());
    for &tau in taus {
        let dt = tau - cur;
        if dt > 0.0 {
            let p = cache
                .entry(dt.to_bits())
                .or_insert_with(|| l.propagator(dt));
            x = &*p * &x;
            cur = tau;
        }
        let numerator = trace_of_product(&n_op, &unvec(d, &x)).re;
        values.push(numerator / (den * den));
    }
    let asymptote_deviation = values.last().map(|v| (v - 1.0).abs()).unwrap_or(0.0);
    Ok(CorrelationTrace {
        variant: model.variant(),
        theta: None,
        taus: taus.to_vec(),
        values,
        asymptote_deviation,
    })
}

/// Leading-order weak-drive value of `g²(0)`.
///
/// The generator splits as `L = L₀ + α L_w` with `L_w = -i[(a + a†), ·]`;
/// seeding the series at the undriven stationary state (the vacuum) and
/// solving `L₀ ρ_k = -L_w ρ_{k-1}` for `k = 1..4` gives the stationary state
/// to fourth order in the drive. The ratio
/// `Tr(a†a†aa ρ₄) / Tr(a†a ρ₂)²` is the drive-independent limit of `g²(0)`;
/// the full numerical value deviates from it at relative order `α²`.
pub fn g2_zero_perturbative(model: &ModelSystem) -> Result<f64> {
    let basis = model.basis();
    let w = model.cavity_op() + &model.cavity_op().adjoint();
    let h0 = Operator::linear_combination(
        basis,
        &[
            (C64::new(1.0, 0.0), model.hamiltonian()),
            (C64::new(-model.drive_amplitude(), 0.0), &w),
        ],
    );
    let l0 = Liouvillian::from_parts(basis, &h0, model.collapse())?;
    let lw = Liouvillian::commutator(&w);
    let solver = BorderedKernelSolver::new(&l0)?;

    let x0 = vec_of(DensityMatrix::vacuum(basis).matrix());
    let seed_residual = max_abs_vec(&(&l0.mat * &x0));
    if seed_residual > 1e-10 {
        // the undriven generator must hold the vacuum stationary for the
        // series to start there
        return Err(Error::ResidualAboveTolerance { residual: seed_residual });
    }

    let mut chain = x0;
    let mut second_order = None;
    let mut fourth_order = None;
    for k in 1..=4u32 {
        let rhs = -(&lw.mat * &chain);
        // rhs is traceless (a commutator image), so the bordered solve
        // returns the traceless solution of L₀ x = rhs
        let x = solver.solve(&rhs)?;
        if k == 2 {
            second_order = Some(x.clone());
        }
        if k == 4 {
            fourth_order = Some(x.clone());
        }
        chain = x;
    }
    let d = basis.dim();
    let c2 = trace_of_product(&model.photon_number_op(), &unvec(d, &second_order.unwrap())).re;
    let d4 = trace_of_product(&model.photon_pair_op(), &unvec(d, &fourth_order.unwrap())).re;
    if !(c2 > MIN_PHOTON_NUMBER) {
        return Err(Error::VanishingPhotonNumber);
    }
    Ok(d4 / (c2 * c2))
}

/// Evolves the three-state amplitude model from `initial` and samples the
/// amplitudes on a time grid (finite, nonnegative, nondecreasing).
pub fn three_level_amplitudes(
    model: &ThreeLevelModel,
    initial: [C64; 3],
    taus: &[f64],
) -> Result<Vec<[C64; 3]>> {
    require_time_grid(taus)?;
    let gen = model.matrix() * C64::new(0.0, -1.0);
    let mut psi = DVector::from_column_slice(&initial);
    let mut cache: BTreeMap<u64, DMatrix<C64>> = BTreeMap::new();
    let mut cur = 0.0f64;
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        let dt = tau - cur;
        if dt > 0.0 {
            let p = cache
                .entry(dt.to_bits())
                .or_insert_with(|| expm(&(&gen * C64::new(dt, 0.0))));
            psi = &*p * &psi;
            cur = tau;
        }
        out.push([psi[0], psi[1], psi[2]]);
    }
    Ok(out)
}
