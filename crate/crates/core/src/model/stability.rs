use nalgebra::{Complex, DMatrix, Schur};
use serde::{Serialize, Serializer};

use super::DriftMatrix;
use crate::error::{Error, Result};

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    #[serde(serialize_with = "complex_pairs")]
    pub eigenvalues: Vec<Complex<f64>>,
    pub stable: bool,
    pub spectral_abscissa: f64,
}

fn complex_pairs<S: Serializer>(v: &[Complex<f64>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| [z.re, z.im]))
}

/// Eigenvalues of a general real matrix, via a real Schur decomposition.
pub(crate) fn real_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::EigenSolver(m.nrows()))?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Eigen-analysis of the drift. Real parts within round-off of zero are
/// reported as exactly zero, so a purely oscillatory drift is not stable.
pub fn stability(a: &DriftMatrix) -> Result<StabilityReport> {
    let m = a.matrix();
    let mut eigenvalues = real_eigenvalues(m)?;
    let snap = 64.0 * f64::EPSILON * m.norm().max(1.0);
    for z in &mut eigenvalues {
        if z.re.abs() <= snap {
            z.re = 0.0;
        }
    }
    eigenvalues.sort_by(|x, y| y.re.total_cmp(&x.re).then(x.im.total_cmp(&y.im)));
    let spectral_abscissa = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport {
        eigenvalues,
        stable: spectral_abscissa < 0.0,
        spectral_abscissa,
    })
}
