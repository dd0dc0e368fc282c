//! Dense complex-matrix helpers: norms, matrix exponential, Hermitian
//! eigenvalues.
//!
//! The exponential uses the scaling-and-squaring method with diagonal Padé
//! approximants of degree 3/5/7/9/13, chosen by 1-norm thresholds; accuracy
//! is close to unit roundoff for any input, which the propagation and
//! semigroup tests rely on.

use alloc::vec::Vec;

use nalgebra::DMatrix;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::C64;

/// Maximum absolute column sum.
pub fn one_norm(a: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        let mut s = 0.0;
        for i in 0..a.nrows() {
            s += a[(i, j)].norm();
        }
        worst = worst.max(s);
    }
    worst
}

/// Largest entry magnitude.
pub fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068;
const THETA_13: f64 = 5.371920351148152;

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Evaluates the order-`m` diagonal Padé numerator/denominator split
/// `(U, V)` given the precomputed even powers of `a`.
fn pade_uv(a: &DMatrix<C64>, powers: &[&DMatrix<C64>], b: &[f64]) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a.nrows();
    let eye = DMatrix::<C64>::identity(n, n);
    let mut u_inner = &eye * r(b[1]);
    let mut v = &eye * r(b[0]);
    for (k, p) in powers.iter().enumerate() {
        let even = 2 * (k + 1);
        u_inner += *p * r(b[even + 1]);
        v += *p * r(b[even]);
    }
    (a * u_inner, v)
}

/// Matrix exponential `exp(a)`.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    assert_eq!(a.nrows(), a.ncols(), "expm: matrix must be square");
    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let norm = one_norm(a);

    let a2 = a * a;
    let (u, v) = if norm <= THETA_3 {
        let b = [120.0, 60.0, 12.0, 1.0];
        pade_uv(a, &[&a2], &b)
    } else if norm <= THETA_5 {
        let a4 = &a2 * &a2;
        let b = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
        pade_uv(a, &[&a2, &a4], &b)
    } else if norm <= THETA_7 {
        let a4 = &a2 * &a2;
        let a6 = &a2 * &a4;
        let b = [
            17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
        ];
        pade_uv(a, &[&a2, &a4, &a6], &b)
    } else if norm <= THETA_9 {
        let a4 = &a2 * &a2;
        let a6 = &a2 * &a4;
        let a8 = &a4 * &a4;
        let b = [
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ];
        pade_uv(a, &[&a2, &a4, &a6, &a8], &b)
    } else {
        // scale down to the degree-13 window, square back afterwards
        let s = ((norm / THETA_13).log2().ceil()).max(0.0) as u32;
        let scaled = a * r(0.5f64.powi(s as i32));
        let sa2 = &scaled * &scaled;
        let sa4 = &sa2 * &sa2;
        let sa6 = &sa2 * &sa4;
        let b = [
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ];
        let eye = DMatrix::<C64>::identity(n, n);
        let w1 = &sa6 * r(b[13]) + &sa4 * r(b[11]) + &sa2 * r(b[9]);
        let w2 = &sa6 * r(b[7]) + &sa4 * r(b[5]) + &sa2 * r(b[3]) + &eye * r(b[1]);
        let u = &scaled * &(&sa6 * &w1 + w2);
        let z1 = &sa6 * r(b[12]) + &sa4 * r(b[10]) + &sa2 * r(b[8]);
        let v = &sa6 * &z1 + &sa6 * r(b[6]) + &sa4 * r(b[4]) + &sa2 * r(b[2]) + &eye * r(b[0]);
        let mut x = solve_pade(&u, &v);
        for _ in 0..s {
            x = &x * &x;
        }
        return x;
    };
    solve_pade(&u, &v)
}

fn solve_pade(u: &DMatrix<C64>, v: &DMatrix<C64>) -> DMatrix<C64> {
    let denom = v - u;
    let numer = v + u;
    denom
        .lu()
        .solve(&numer)
        .expect("expm: Padé denominator was singular")
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The input is symmetrized as `(a + a†) / 2` first, so tiny numerical
/// asymmetry is tolerated.
pub fn hermitian_eigenvalues(a: &DMatrix<C64>) -> Vec<f64> {
    let herm = (a + a.adjoint()) * r(0.5);
    let mut ev: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("hermitian_eigenvalues: NaN eigenvalue"));
    ev
}
