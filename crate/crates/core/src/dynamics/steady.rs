use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::covariance::{symmetrize, CovarianceMatrix};
use crate::error::{Error, Result};
use crate::model::{stability, DiffusionMatrix, DriftMatrix, StabilityReport};
use crate::modes::canonical_modes;

/// Accepted `‖AV + VAᵀ + D‖_max / ‖D‖_max`.
pub const STEADY_RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct SteadyState {
    pub covariance: CovarianceMatrix,
    /// `‖AV + VAᵀ + D‖_max / ‖D‖_max` (absolute when `D = 0`).
    pub residual: f64,
    pub stability: StabilityReport,
}

/// `‖AV + VAᵀ + D‖_max`.
pub fn lyapunov_residual(a: &DMatrix<f64>, d: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    let av = a * v;
    (&av + av.transpose() + d).amax()
}

fn relative_residual(a: &DMatrix<f64>, d: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    let scale = d.amax();
    let r = lyapunov_residual(a, d, v);
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

/// Solve `AV + VAᵀ + D = 0` through `(I⊗A + A⊗I) vec V = −vec D`.
///
/// The drift must be stable. One step of iterative refinement is applied;
/// the result is symmetrized and its relative residual must stay below
/// [`STEADY_RESIDUAL_TOLERANCE`]. The modes are labelled canonically.
pub fn steady_state(a: &DriftMatrix, d: &DiffusionMatrix) -> Result<SteadyState> {
    let n = a.dim();
    if d.dim() != n || !n.is_multiple_of(4) {
        return Err(Error::Shape(format!(
            "drift {n}x{n} and diffusion {0}x{0} must agree and be 4N-dimensional",
            d.dim()
        )));
    }
    let report = stability(a)?;
    if !report.stable {
        return Err(Error::Unstable {
            abscissa: report.spectral_abscissa,
        });
    }
    let v = solve_lyapunov(a.matrix(), d.matrix())?;
    let residual = relative_residual(a.matrix(), d.matrix(), &v);
    if !(residual < STEADY_RESIDUAL_TOLERANCE) {
        return Err(Error::Residual {
            residual,
            tolerance: STEADY_RESIDUAL_TOLERANCE,
        });
    }
    Ok(SteadyState {
        covariance: CovarianceMatrix::from_parts_unchecked(
            v,
            f64::INFINITY,
            canonical_modes(n / 4),
        ),
        residual,
        stability: report,
    })
}

/// Dense Kronecker solve with one refinement step; no stability check.
pub(crate) fn solve_lyapunov(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let m = n * n;
    // column-major vec: vec(AV) = (I⊗A) vec V, vec(VAᵀ) = (A⊗I) vec V
    let mut k = DMatrix::zeros(m, m);
    for blk in 0..n {
        k.view_mut((blk * n, blk * n), (n, n)).copy_from(a);
    }
    for i in 0..n {
        for j in 0..n {
            let aij = a[(i, j)];
            if aij != 0.0 {
                for r in 0..n {
                    k[(i * n + r, j * n + r)] += aij;
                }
            }
        }
    }
    let rhs = -DVector::from_column_slice(d.as_slice());
    let lu = k.clone().lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or(Error::Singular("steady-state Lyapunov system"))?;
    let correction = lu
        .solve(&(&rhs - &k * &x))
        .ok_or(Error::Singular("steady-state refinement"))?;
    x += correction;
    let mut v = DMatrix::from_column_slice(n, n, x.as_slice());
    symmetrize(&mut v);
    if !v.iter().all(|x| x.is_finite()) {
        return Err(Error::Singular("steady-state Lyapunov system"));
    }
    Ok(v)
}
