//! Open-system models of the driven dressed cavity: Hamiltonian + collapse
//! channels on a truncated basis, plus a three-state amplitude model for the
//! single-excitation dynamics.
//!
//! All models live in the frame rotating with the drive, in `gamma_e` units,
//! with the effective two-level parameters of
//! [`crate::params::EffectiveParams`]:
//!
//! * **Spin bubble**: the matter excitation is the symmetric ladder of
//!   `bubble_count` two-level bubbles; saturation comes from the finite
//!   ladder and its non-uniform matrix elements.
//! * **Two boson**: the matter excitation is a bosonic mode with a Kerr
//!   anharmonicity standing in for the ladder's saturation; the coefficient
//!   is either `kappa_bar` or the pair-corrected `kappa_bar_prime`.
//! * **Cavity only**: the bare driven, damped cavity — an exactly solvable
//!   reference whose stationary state is coherent.
//! * **Three level**: non-Hermitian 3×3 amplitude dynamics on
//!   `(0,0), (0,1), (1,0)`, for interpreting correlation-decay time scales.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::hilbert::{Basis, Operator};
use crate::params::{EffectiveParams, PhysicalParams};
use crate::C64;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Which saturation mechanism a model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelVariant {
    /// Symmetric spin ladder of blockade bubbles.
    SpinBubble,
    /// Bosonic matter mode with Kerr coefficient `kappa_bar`.
    TwoBosonKappaBar,
    /// Bosonic matter mode with Kerr coefficient `kappa_bar_prime`.
    TwoBosonKappaBarPrime,
    /// Bare driven cavity, no matter mode.
    CavityOnly,
}

impl ModelVariant {
    /// Stable machine-readable name (used by the CLI and file outputs).
    pub fn name(self) -> &'static str {
        match self {
            Self::SpinBubble => "spin",
            Self::TwoBosonKappaBar => "boson-kbar",
            Self::TwoBosonKappaBarPrime => "boson-kbarprime",
            Self::CavityOnly => "cavity",
        }
    }
}

impl core::fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which Kerr coefficient the two-boson model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KerrVariant {
    /// `2 * delta_r_eff / bubble_count`.
    KappaBar,
    /// `2 * delta_r_eff / (bubble_count - 1)`.
    KappaBarPrime,
}

/// A Lindblad model: Hamiltonian, collapse channels, and the cavity operator
/// correlations are measured on.
///
/// Collapse channels are `(rate, jump_operator)` pairs entering the
/// dissipator as `rate * (2 L ρ L† - L†L ρ - ρ L†L)`, so a single excited
/// state whose `L†L` eigenvalue is 1 loses population at `2 * rate`
/// (amplitude-decay convention).
#[derive(Debug, Clone)]
pub struct ModelSystem {
    variant: ModelVariant,
    basis: Arc<Basis>,
    hamiltonian: Operator,
    collapse: Vec<(f64, Operator)>,
    cavity_op: Operator,
    drive_amplitude: f64,
}

impl ModelSystem {
    /// Assembles a model from raw parts. The builders below are the normal
    /// entry points; this is public for custom or reduced systems (tests,
    /// degenerate-case probes).
    pub fn from_parts(
        variant: ModelVariant,
        basis: Arc<Basis>,
        hamiltonian: Operator,
        collapse: Vec<(f64, Operator)>,
        cavity_op: Operator,
        drive_amplitude: f64,
    ) -> Self {
        Self {
            variant,
            basis,
            hamiltonian,
            collapse,
            cavity_op,
            drive_amplitude,
        }
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn collapse(&self) -> &[(f64, Operator)] {
        &self.collapse
    }

    /// Cavity annihilation operator of this model.
    pub fn cavity_op(&self) -> &Operator {
        &self.cavity_op
    }

    pub fn drive_amplitude(&self) -> f64 {
        self.drive_amplitude
    }

    /// Photon number operator `a† a`.
    pub fn photon_number_op(&self) -> Operator {
        &self.cavity_op.adjoint() * &self.cavity_op
    }

    /// Photon pair operator `a† a† a a`.
    pub fn photon_pair_op(&self) -> Operator {
        let ad = self.cavity_op.adjoint();
        &(&ad * &ad) * &(&self.cavity_op * &self.cavity_op)
    }

    /// Spin-bubble model on a total-excitation-truncated basis.
    ///
    /// `H = -delta_c_eff a†a + alpha (a + a†) - delta_r_eff n_r
    ///      + (g_eff sqrt(n_b)) (a J+ + a† J-)`
    ///
    /// with collapse channels `(gamma_c_eff, a)` and `(gamma_r_eff, m)`,
    /// where `m` is the unit-step matter lowering operator: the collective
    /// channel is scaled so a state with `n_r` excited bubbles loses
    /// population at `2 n_r gamma_r_eff`, matching independent per-bubble
    /// decay of symmetric states (coupling to nonsymmetric dark states is
    /// neglected).
    pub fn spin_bubble(
        p: &PhysicalParams,
        eff: &EffectiveParams,
        cutoff: u32,
    ) -> Result<Self> {
        p.validate()?;
        if cutoff < 2 {
            return Err(Error::CutoffTooSmall { required: 2, got: cutoff });
        }
        let basis = Basis::spin_fock(cutoff, p.bubble_count);
        let a = Operator::cavity_annihilation(&basis);
        let ad = a.adjoint();
        let jm = Operator::collective_lowering(&basis);
        let nr = Operator::matter_number(&basis);
        let n_ph = &ad * &a;
        let g_per_bubble = eff.g_eff_sqrt_n / f64::from(p.bubble_count).sqrt();
        // Build the excitation-conserving coupling from the ordering whose
        // intermediate state stays inside the truncated basis (lower first,
        // then raise); the other ordering is its exact adjoint. Multiplying
        // `a * J+` directly would drop boundary elements through states
        // above the cutoff and break Hermiticity.
        let exchange = &ad * &jm;
        let coupling = &exchange + &exchange.adjoint();
        let h = Operator::linear_combination(
            &basis,
            &[
                (re(-eff.delta_c_eff), &n_ph),
                (re(p.alpha), &(&a + &ad)),
                (re(-eff.delta_r_eff), &nr),
                (re(g_per_bubble), &coupling),
            ],
        );
        let matter_decay = Operator::matter_annihilation(&basis);
        Ok(Self::from_parts(
            ModelVariant::SpinBubble,
            basis,
            h,
            vec![(eff.gamma_c_eff, a.clone()), (eff.gamma_r_eff, matter_decay)],
            a,
            p.alpha,
        ))
    }

    /// Two-boson model: the matter ladder is replaced by a bosonic mode with
    /// a Kerr term.
    ///
    /// `H = -delta_c_eff a†a + alpha (a + a†) - delta_r_eff b†b
    ///      - (kappa / 2) b†b†bb + (g_eff sqrt(N)) (a b† + a† b)`
    ///
    /// with collapse channels `(gamma_c_eff, a)` and `(gamma_r_eff, b)`.
    /// `kerr` picks `kappa_bar` or `kappa_bar_prime` (the latter fails for a
    /// single bubble, where it is undefined).
    pub fn two_boson(
        p: &PhysicalParams,
        eff: &EffectiveParams,
        kerr: KerrVariant,
        cutoff: u32,
    ) -> Result<Self> {
        p.validate()?;
        if cutoff < 2 {
            return Err(Error::CutoffTooSmall { required: 2, got: cutoff });
        }
        let (variant, kappa) = match kerr {
            KerrVariant::KappaBar => (ModelVariant::TwoBosonKappaBar, eff.kappa_bar),
            KerrVariant::KappaBarPrime => (
                ModelVariant::TwoBosonKappaBarPrime,
                eff.kappa_bar_prime.ok_or(Error::SingleBubbleKerr)?,
            ),
        };
        let basis = Basis::boson_fock(cutoff, cutoff);
        let a = Operator::cavity_annihilation(&basis);
        let ad = a.adjoint();
        let b = Operator::matter_annihilation(&basis);
        let n_ph = &ad * &a;
        let n_b_op = &b.adjoint() * &b;
        let pair_b =
            Operator::diagonal(&basis, |n_r, _| f64::from(n_r) * f64::from(n_r.saturating_sub(1)));
        // As in the spin model: assemble the exchange term from the
        // lower-then-raise ordering so truncation keeps it Hermitian.
        let exchange = &ad * &b;
        let coupling = &exchange + &exchange.adjoint();
        let h = Operator::linear_combination(
            &basis,
            &[
                (re(-eff.delta_c_eff), &n_ph),
                (re(p.alpha), &(&a + &ad)),
                (re(-eff.delta_r_eff), &n_b_op),
                (re(-kappa / 2.0), &pair_b),
                (re(eff.g_eff_sqrt_n), &coupling),
            ],
        );
        Ok(Self::from_parts(
            variant,
            basis,
            h,
            vec![(eff.gamma_c_eff, a.clone()), (eff.gamma_r_eff, b)],
            a,
            p.alpha,
        ))
    }

    /// Bare driven cavity on a photon-only ladder: `H = -delta_c a†a +
    /// alpha (a + a†)` with collapse `(gamma_c, a)`, using the *bare*
    /// detuning and linewidth (no ensemble attached). Its stationary state
    /// is coherent with `⟨a†a⟩ = alpha² / (delta_c² + gamma_c²)`.
    pub fn cavity_only(p: &PhysicalParams, cutoff: u32) -> Result<Self> {
        p.validate()?;
        if cutoff < 2 {
            return Err(Error::CutoffTooSmall { required: 2, got: cutoff });
        }
        let basis = Basis::boson_fock(cutoff, 0);
        let a = Operator::cavity_annihilation(&basis);
        let ad = a.adjoint();
        let h = Operator::linear_combination(
            &basis,
            &[
                (re(-p.delta_c), &(&ad * &a)),
                (re(p.alpha), &(&a + &ad)),
            ],
        );
        Ok(Self::from_parts(
            ModelVariant::CavityOnly,
            basis,
            h,
            vec![(p.gamma_c, a.clone())],
            a,
            p.alpha,
        ))
    }
}

/// Non-Hermitian 3×3 amplitude model on `(0,0), (0,1), (1,0)`: coherent
/// drive between the ground and one-photon states, coupling between the
/// one-photon and one-matter states, and decay entering as imaginary
/// diagonal shifts.
#[derive(Debug, Clone)]
pub struct ThreeLevelModel {
    basis: Arc<Basis>,
    matrix: DMatrix<C64>,
}

impl ThreeLevelModel {
    /// Builds the amplitude matrix
    ///
    /// ```text
    /// [ 0      alpha                     0                    ]
    /// [ alpha  -delta_c_eff - i gamma_c  g_eff sqrt(N)        ]
    /// [ 0      g_eff sqrt(N)             -delta_r_eff - i gamma_r ]
    /// ```
    pub fn build(p: &PhysicalParams, eff: &EffectiveParams) -> Result<Self> {
        p.validate()?;
        let g = eff.g_eff_sqrt_n;
        let matrix = DMatrix::from_row_slice(
            3,
            3,
            &[
                re(0.0),
                re(p.alpha),
                re(0.0),
                re(p.alpha),
                C64::new(-eff.delta_c_eff, -eff.gamma_c_eff),
                re(g),
                re(0.0),
                re(g),
                C64::new(-eff.delta_r_eff, -eff.gamma_r_eff),
            ],
        );
        Ok(Self { basis: Basis::three_level(), matrix })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    /// The complex amplitude matrix.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Eigenvalues of the single-excitation block (rows/columns 1 and 2),
    /// closed form for a 2×2 matrix.
    pub fn lower_block_eigenvalues(&self) -> (C64, C64) {
        let a = self.matrix[(1, 1)];
        let d = self.matrix[(2, 2)];
        let b = self.matrix[(1, 2)];
        let mean = (a + d) * re(0.5);
        let half_gap = (a - d) * re(0.5);
        let root = (half_gap * half_gap + b * b).sqrt();
        (mean + root, mean - root)
    }

    /// Difference of the single-excitation eigenvalues; its real part is the
    /// angular frequency of single-excitation beats.
    pub fn lower_block_splitting(&self) -> C64 {
        let (l1, l2) = self.lower_block_eigenvalues();
        l1 - l2
    }

    /// Beat period `2π / |Re(splitting)|`, or `None` when the block does not
    /// oscillate (overdamped: the splitting is purely imaginary).
    pub fn predicted_oscillation_period(&self) -> Option<f64> {
        let s = self.lower_block_splitting().re.abs();
        if s < 1e-12 {
            None
        } else {
            Some(2.0 * core::f64::consts::PI / s)
        }
    }
}
