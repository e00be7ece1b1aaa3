//! Small dense linear-algebra helpers shared by the model modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerances;

/// Spectral radius of a 2x2 matrix from the closed-form eigenvalue formula.
///
/// A negative discriminant means a complex-conjugate pair, whose common modulus
/// is `sqrt(|det|)`.
#[must_use]
pub(crate) fn spectral_radius_2x2(m: &DMatrix<f64>) -> f64 {
    debug_assert_eq!((m.nrows(), m.ncols()), (2, 2));
    let trace = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = trace * trace - 4.0 * det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        (0.5 * (trace + s)).abs().max((0.5 * (trace - s)).abs())
    } else {
        det.abs().sqrt()
    }
}

/// Dominant-eigenvalue power iteration with Rayleigh-quotient acceptance.
///
/// Intended for entrywise-nonnegative matrices, whose dominant eigenvalue is
/// real and nonnegative with a nonnegative eigenvector, so the all-ones start
/// vector always overlaps it. Accepts once `||Mv - lambda v||_inf` falls below
/// `tol * max(1, |lambda|)`.
pub(crate) fn power_iteration_radius(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<f64> {
    let n = m.nrows();
    let mut v = DVector::from_element(n, 1.0);
    for _ in 0..max_iter {
        let w = m * &v;
        let scale = w.amax();
        if scale == 0.0 {
            // A nonnegative matrix annihilating a nonnegative vector supported on
            // every reachable index has no growth along the orbit: radius 0.
            return Ok(0.0);
        }
        let lambda = v.dot(&w) / v.dot(&v);
        let residual = (&w - &v * lambda).amax();
        if residual <= tol * lambda.abs().max(1.0) {
            return Ok(lambda.abs());
        }
        v = w / scale;
    }
    Err(Error::NumericalFailure {
        context: "spectral_radius",
        detail: format!("power iteration did not converge within {max_iter} iterations"),
    })
}

/// `m` raised to the `k`-th power by binary exponentiation.
#[must_use]
pub(crate) fn matrix_power(m: &DMatrix<f64>, k: u32) -> DMatrix<f64> {
    let mut result = DMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Whether a nonnegative matrix is primitive (some power entrywise positive),
/// i.e. whether the movement pattern is regular.
///
/// Entries at or below [`tolerances::STRUCTURAL_ZERO`] count as structural
/// zeros. Entrywise positivity of powers is monotone in the exponent for
/// column-stochastic matrices, and a primitive n x n matrix is positive at the
/// Wielandt exponent n^2 - 2n + 2, so a single boolean-power check at the next
/// power of two above that bound decides the question.
#[must_use]
pub(crate) fn is_primitive(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    assert!(n <= 64, "primitivity check supports up to 64 patches");
    // Row bitmasks: bit j of adj[i] set when i is reachable from j in one step.
    let adj: Vec<u64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| m[(i, j)] > tolerances::STRUCTURAL_ZERO)
                .fold(0u64, |acc, j| acc | (1 << j))
        })
        .collect();
    // Square the boolean matrix until its exponent is a power of two >= wielandt.
    // Grouped to stay in range for n = 1 in unsigned arithmetic.
    let wielandt = n * n + 2 - 2 * n;
    let mut p = adj;
    let mut exponent = 1usize;
    while exponent < wielandt {
        p = bool_mat_square(&p, n);
        exponent *= 2;
    }
    let full = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    p.iter().all(|&row| row == full)
}

/// Boolean matrix product of a row-bitmask matrix with itself.
fn bool_mat_square(p: &[u64], n: usize) -> Vec<u64> {
    (0..n)
        .map(|i| {
            let mut row = 0u64;
            let mut bits = p[i];
            while bits != 0 {
                let l = bits.trailing_zeros() as usize;
                row |= p[l];
                bits &= bits - 1;
            }
            row
        })
        .collect()
}

/// Moduli of all eigenvalues, descending.
#[must_use]
pub(crate) fn eigen_moduli(m: &DMatrix<f64>) -> Vec<f64> {
    let eigs = m.clone().complex_eigenvalues();
    let mut moduli: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalue moduli are finite"));
    moduli
}

/// Smallest distance from any eigenvalue of `m` to the unit circle.
#[must_use]
pub(crate) fn unit_circle_gap(m: &DMatrix<f64>) -> f64 {
    eigen_moduli(m)
        .iter()
        .map(|r| (r - 1.0).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Jacobian of `f` at `x` by central differences with step `1e-6 * (1 + ||x||_inf)`.
pub(crate) fn finite_difference_jacobian<F>(f: &F, x: &DVector<f64>) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = x.len();
    let h = 1e-6 * (1.0 + x.amax());
    let mut jac = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let column = (f(&xp) - f(&xm)) / (2.0 * h);
        jac.set_column(j, &column);
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spectral_radius_2x2_handles_real_and_complex_pairs() {
        let sym = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        assert_abs_diff_eq!(spectral_radius_2x2(&sym), 3.0, epsilon = 1e-14);
        let nilpotent = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(spectral_radius_2x2(&nilpotent), 0.0, epsilon = 1e-14);
        // Rotation by 90 degrees scaled by 2: complex pair of modulus 2.
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        assert_abs_diff_eq!(spectral_radius_2x2(&rot), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn matrix_power_matches_repeated_multiplication() {
        let m = DMatrix::from_row_slice(2, 2, &[0.9, 0.2, 0.1, 0.8]);
        let mut expected = DMatrix::identity(2, 2);
        for _ in 0..13 {
            expected = &expected * &m;
        }
        let got = matrix_power(&m, 13);
        assert!((got - expected).amax() < 1e-13);
        assert_eq!(matrix_power(&m, 0), DMatrix::identity(2, 2));
    }

    #[test]
    fn primitivity_accepts_positive_and_rejects_periodic_patterns() {
        let positive = DMatrix::from_row_slice(2, 2, &[0.9, 0.2, 0.1, 0.8]);
        assert!(is_primitive(&positive));
        // A two-cycle permutation is irreducible but periodic: not regular.
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(!is_primitive(&swap));
        // Identity never mixes patches.
        let id = DMatrix::identity(3, 3);
        assert!(!is_primitive(&id));
        // Primitive but not positive: a cycle with one shortcut.
        let shortcut =
            DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(!is_primitive(&shortcut)); // pure 3-cycle: periodic
        let mixed = DMatrix::from_row_slice(3, 3, &[0.1, 0.0, 1.0, 0.9, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(is_primitive(&mixed));
    }

    #[test]
    fn power_iteration_matches_known_radii() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.25, 0.5, 0.25, 2.0]);
        let rho = power_iteration_radius(&m, 1e-12, 100_000).unwrap();
        let expected = eigen_moduli(&m)[0];
        assert_abs_diff_eq!(rho, expected, epsilon = 1e-10);
        let id = DMatrix::<f64>::identity(4, 4);
        assert_abs_diff_eq!(
            power_iteration_radius(&id, 1e-12, 100).unwrap(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn finite_difference_jacobian_recovers_linear_map() {
        let a = DMatrix::from_row_slice(2, 2, &[1.5, -0.5, 0.25, 2.0]);
        let f = {
            let a = a.clone();
            move |x: &DVector<f64>| &a * x
        };
        let j = finite_difference_jacobian(&f, &DVector::from_vec(vec![1.0, 2.0]));
        assert!((j - a).amax() < 1e-8);
    }

    #[test]
    fn unit_circle_gap_detects_near_unit_eigenvalues() {
        let m = DMatrix::from_row_slice(2, 2, &[0.999999, 0.0, 0.0, 0.5]);
        assert!(unit_circle_gap(&m) < 1e-5);
        let far = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.25]);
        assert_abs_diff_eq!(unit_circle_gap(&far), 0.5, epsilon = 1e-14);
    }
}
