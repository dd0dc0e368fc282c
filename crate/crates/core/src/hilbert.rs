//! Truncated state spaces for one cavity mode plus one collective matter
//! degree of freedom, and sparse operators acting on them.
//!
//! States are labelled `(n_r, n_c)`: matter excitations and cavity photons.
//! A basis keeps every state with `n_r + n_c <= max_total` and `n_r <=
//! matter_max`, enumerated in lexicographic order, so truncation is a total-
//! excitation cutoff. Operators are stored sparsely (row-major adjacency)
//! and follow the projector-truncation policy: matrix elements that would
//! leave the retained space are dropped, never renormalized.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::C64;

/// Which physical family a basis enumerates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Cavity Fock ladder ⊗ symmetric ladder of a fixed number of two-level
    /// bubbles (matter excitation capped by the bubble count).
    SpinFock,
    /// Cavity Fock ladder ⊗ bosonic matter mode (matter excitation capped
    /// only by its own cutoff).
    BosonFock,
    /// The three lowest states `(0,0), (0,1), (1,0)` used by the
    /// single-excitation amplitude model.
    ThreeLevel,
}

/// A truncated product basis with a fixed, lexicographic state enumeration.
#[derive(Debug, PartialEq, Eq)]
pub struct Basis {
    kind: BasisKind,
    max_total: u32,
    matter_max: u32,
    states: Vec<(u32, u32)>,
}

fn enumerate(max_total: u32, matter_max: u32) -> Vec<(u32, u32)> {
    let mut states = Vec::new();
    for n_r in 0..=matter_max.min(max_total) {
        for n_c in 0..=(max_total - n_r) {
            states.push((n_r, n_c));
        }
    }
    states
}

impl Basis {
    /// Cavity ⊗ collective-spin basis: `n_r` runs over `0..=min(bubbles,
    /// max_total)`, `n_c` over `0..=max_total - n_r`.
    pub fn spin_fock(max_total: u32, bubbles: u32) -> Arc<Self> {
        assert!(bubbles >= 1, "Basis::spin_fock: need at least one bubble");
        Arc::new(Self {
            kind: BasisKind::SpinFock,
            max_total,
            matter_max: bubbles,
            states: enumerate(max_total, bubbles),
        })
    }

    /// Cavity ⊗ bosonic-matter basis. `matter_max = 0` leaves a bare cavity
    /// ladder; `matter_max = max_total` lets the total-excitation cutoff do
    /// all the truncation.
    pub fn boson_fock(max_total: u32, matter_max: u32) -> Arc<Self> {
        Arc::new(Self {
            kind: BasisKind::BosonFock,
            max_total,
            matter_max,
            states: enumerate(max_total, matter_max),
        })
    }

    /// The fixed three-state basis `(0,0), (0,1), (1,0)`.
    pub fn three_level() -> Arc<Self> {
        Arc::new(Self {
            kind: BasisKind::ThreeLevel,
            max_total: 1,
            matter_max: 1,
            states: enumerate(1, 1),
        })
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Number of retained states.
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Largest allowed `n_r + n_c`.
    pub fn max_total_excitations(&self) -> u32 {
        self.max_total
    }

    /// Largest allowed matter excitation (the bubble count for
    /// [`BasisKind::SpinFock`]).
    pub fn matter_max(&self) -> u32 {
        self.matter_max
    }

    /// All retained states in enumeration order.
    pub fn states(&self) -> &[(u32, u32)] {
        &self.states
    }

    /// State labels at `index` (panics when out of range).
    pub fn state(&self, index: usize) -> (u32, u32) {
        self.states[index]
    }

    /// Enumeration index of `(n_r, n_c)`, or `None` when the state was
    /// truncated away.
    pub fn index_of(&self, n_r: u32, n_c: u32) -> Option<usize> {
        self.states.binary_search(&(n_r, n_c)).ok()
    }

    /// Indices of the states sitting exactly on the truncation boundary
    /// `n_r + n_c = max_total`.
    pub fn boundary_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                let (n_r, n_c) = self.states[i];
                n_r + n_c == self.max_total
            })
            .collect()
    }
}

/// Returns true when two operators (or an operator and a state) may be
/// combined: same shared basis object or structurally identical bases.
pub fn same_basis(a: &Arc<Basis>, b: &Arc<Basis>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Sparse complex matrix bound to a [`Basis`].
///
/// `rows[i]` lists `(column, amplitude)` pairs sorted by column; exact zeros
/// are pruned. All arithmetic panics on basis mismatch (that is a programming
/// error, not a runtime condition).
#[derive(Debug, Clone)]
pub struct Operator {
    basis: Arc<Basis>,
    rows: Vec<Vec<(usize, C64)>>,
}

impl Operator {
    /// The zero operator.
    pub fn zero(basis: &Arc<Basis>) -> Self {
        Self {
            basis: Arc::clone(basis),
            rows: vec![Vec::new(); basis.dim()],
        }
    }

    /// The identity.
    pub fn identity(basis: &Arc<Basis>) -> Self {
        let mut rows = Vec::with_capacity(basis.dim());
        for i in 0..basis.dim() {
            rows.push(vec![(i, C64::new(1.0, 0.0))]);
        }
        Self { basis: Arc::clone(basis), rows }
    }

    /// Diagonal operator with `f(n_r, n_c)` on the diagonal.
    pub fn diagonal(basis: &Arc<Basis>, f: impl Fn(u32, u32) -> f64) -> Self {
        let mut op = Self::zero(basis);
        for (i, &(n_r, n_c)) in basis.states().iter().enumerate() {
            let v = f(n_r, n_c);
            if v != 0.0 {
                op.rows[i].push((i, C64::new(v, 0.0)));
            }
        }
        op
    }

    /// Cavity photon annihilation: `(n_r, n_c) -> sqrt(n_c) (n_r, n_c - 1)`.
    pub fn cavity_annihilation(basis: &Arc<Basis>) -> Self {
        assert!(
            matches!(basis.kind(), BasisKind::SpinFock | BasisKind::BosonFock),
            "Operator::cavity_annihilation: basis must resolve photon number"
        );
        let mut op = Self::zero(basis);
        for (j, &(n_r, n_c)) in basis.states().iter().enumerate() {
            if n_c == 0 {
                continue;
            }
            let i = basis
                .index_of(n_r, n_c - 1)
                .expect("Operator::cavity_annihilation: lowering left the basis");
            op.rows[i].push((j, C64::new(f64::from(n_c).sqrt(), 0.0)));
        }
        op.sort_rows();
        op
    }

    /// Collective spin lowering on the symmetric ladder:
    /// `(n_r, n_c) -> sqrt(n_r (bubbles - n_r + 1)) (n_r - 1, n_c)`.
    pub fn collective_lowering(basis: &Arc<Basis>) -> Self {
        assert_eq!(
            basis.kind(),
            BasisKind::SpinFock,
            "Operator::collective_lowering: basis must be a spin ladder"
        );
        let nb = f64::from(basis.matter_max());
        let mut op = Self::zero(basis);
        for (j, &(n_r, n_c)) in basis.states().iter().enumerate() {
            if n_r == 0 {
                continue;
            }
            let i = basis
                .index_of(n_r - 1, n_c)
                .expect("Operator::collective_lowering: lowering left the basis");
            let nr = f64::from(n_r);
            op.rows[i].push((j, C64::new((nr * (nb - nr + 1.0)).sqrt(), 0.0)));
        }
        op.sort_rows();
        op
    }

    /// Collective spin raising (adjoint of [`Operator::collective_lowering`]).
    pub fn collective_raising(basis: &Arc<Basis>) -> Self {
        Self::collective_lowering(basis).adjoint()
    }

    /// Collective `J_z`: diagonal `n_r - bubbles / 2`.
    pub fn jz(basis: &Arc<Basis>) -> Self {
        assert_eq!(
            basis.kind(),
            BasisKind::SpinFock,
            "Operator::jz: basis must be a spin ladder"
        );
        let half = f64::from(basis.matter_max()) / 2.0;
        Self::diagonal(basis, |n_r, _| f64::from(n_r) - half)
    }

    /// Matter excitation number: diagonal `n_r`.
    pub fn matter_number(basis: &Arc<Basis>) -> Self {
        Self::diagonal(basis, |n_r, _| f64::from(n_r))
    }

    /// Unit-step matter lowering `(n_r, n_c) -> sqrt(n_r) (n_r - 1, n_c)`.
    ///
    /// On a bosonic basis this is the matter-mode annihilation operator; on a
    /// spin ladder it is the collective decay channel whose population loss
    /// rate grows linearly with `n_r` (each excited bubble decays
    /// independently), unlike [`Operator::collective_lowering`].
    pub fn matter_annihilation(basis: &Arc<Basis>) -> Self {
        assert!(
            matches!(basis.kind(), BasisKind::SpinFock | BasisKind::BosonFock),
            "Operator::matter_annihilation: basis must resolve matter number"
        );
        let mut op = Self::zero(basis);
        for (j, &(n_r, n_c)) in basis.states().iter().enumerate() {
            if n_r == 0 {
                continue;
            }
            let i = basis
                .index_of(n_r - 1, n_c)
                .expect("Operator::matter_annihilation: lowering left the basis");
            op.rows[i].push((j, C64::new(f64::from(n_r).sqrt(), 0.0)));
        }
        op.sort_rows();
        op
    }

    fn sort_rows(&mut self) {
        for row in &mut self.rows {
            row.sort_unstable_by_key(|&(c, _)| c);
        }
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Number of stored (nonzero) entries.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Matrix element at `(row, col)`; zero when absent.
    pub fn get(&self, row: usize, col: usize) -> C64 {
        match self.rows[row].binary_search_by_key(&col, |&(c, _)| c) {
            Ok(k) => self.rows[row][k].1,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Iterates stored entries as `(row, col, amplitude)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, v)| (i, j, v)))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.basis);
        for (i, j, v) in self.entries() {
            out.rows[j].push((i, v.conj()));
        }
        out.sort_rows();
        out
    }

    /// Scalar multiple.
    pub fn scaled(&self, z: C64) -> Self {
        if z == C64::new(0.0, 0.0) {
            return Self::zero(&self.basis);
        }
        let mut out = self.clone();
        for row in &mut out.rows {
            for entry in row.iter_mut() {
                entry.1 *= z;
            }
        }
        out
    }

    /// Sum of two operators on the same basis.
    pub fn plus(&self, other: &Self) -> Self {
        assert!(
            same_basis(&self.basis, &other.basis),
            "Operator::plus: basis mismatch"
        );
        let mut out = Self::zero(&self.basis);
        for i in 0..self.rows.len() {
            let (a, b) = (&self.rows[i], &other.rows[i]);
            let mut merged = Vec::with_capacity(a.len() + b.len());
            let (mut p, mut q) = (0, 0);
            while p < a.len() || q < b.len() {
                let take_a = q >= b.len() || (p < a.len() && a[p].0 <= b[q].0);
                let take_b = p >= a.len() || (q < b.len() && b[q].0 <= a[p].0);
                if take_a && take_b {
                    let v = a[p].1 + b[q].1;
                    if v != C64::new(0.0, 0.0) {
                        merged.push((a[p].0, v));
                    }
                    p += 1;
                    q += 1;
                } else if take_a {
                    merged.push(a[p]);
                    p += 1;
                } else {
                    merged.push(b[q]);
                    q += 1;
                }
            }
            out.rows[i] = merged;
        }
        out
    }

    /// Weighted sum `sum_k coeff_k * op_k` over operators on one basis.
    pub fn linear_combination(basis: &Arc<Basis>, terms: &[(C64, &Self)]) -> Self {
        let mut acc = Self::zero(basis);
        for &(z, op) in terms {
            acc = acc.plus(&op.scaled(z));
        }
        acc
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert!(
            same_basis(&self.basis, &other.basis),
            "Operator::matmul: basis mismatch"
        );
        let d = self.dim();
        let mut out = Self::zero(&self.basis);
        let mut scratch = vec![C64::new(0.0, 0.0); d];
        let mut touched: Vec<usize> = Vec::new();
        for i in 0..d {
            for &(k, av) in &self.rows[i] {
                for &(j, bv) in &other.rows[k] {
                    if scratch[j] == C64::new(0.0, 0.0) {
                        touched.push(j);
                    }
                    scratch[j] += av * bv;
                }
            }
            touched.sort_unstable();
            let mut row = Vec::with_capacity(touched.len());
            for &j in &touched {
                if scratch[j] != C64::new(0.0, 0.0) {
                    row.push((j, scratch[j]));
                }
                scratch[j] = C64::new(0.0, 0.0);
            }
            out.rows[i] = row;
            touched.clear();
        }
        out
    }

    /// Applies the operator to a dense vector.
    pub fn apply(&self, x: &DVector<C64>) -> DVector<C64> {
        assert_eq!(x.len(), self.dim(), "Operator::apply: dimension mismatch");
        let mut y = DVector::from_element(self.dim(), C64::new(0.0, 0.0));
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &(j, v) in row {
                acc += v * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Dense copy (column-major [`DMatrix`]).
    pub fn to_dense(&self) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }

    /// Largest `|A[i,j] - conj(A[j,i])|`; zero for a Hermitian matrix.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, j, v) in self.entries() {
            let d = (v - self.get(j, i).conj()).norm();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for (i, j, v) in self.entries() {
            worst = worst.max((v - other.get(i, j)).norm());
        }
        for (i, j, v) in other.entries() {
            worst = worst.max((v - self.get(i, j)).norm());
        }
        worst
    }
}

impl core::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.plus(rhs)
    }
}

impl core::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.plus(&rhs.scaled(C64::new(-1.0, 0.0)))
    }
}

impl core::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.matmul(rhs)
    }
}

impl core::ops::Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, z: C64) -> Operator {
        self.scaled(z)
    }
}
