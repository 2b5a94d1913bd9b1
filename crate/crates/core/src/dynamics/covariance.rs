use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{canonical_modes, ModeLabel};

/// Lower bound on the smallest eigenvalue of `V + iΩ/2` accepted as physical.
pub const PHYSICALITY_TOLERANCE: f64 = -1e-8;

/// A real symmetric `2k × 2k` covariance matrix of `k` modes.
///
/// `modes[i]` owns rows `2i` (X) and `2i + 1` (Y). The full chain uses the
/// canonical order; reductions keep the order they were taken in. `time`
/// is in the scenario's internal time unit, and infinite for a steady state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CmRepr", into = "CmRepr")]
pub struct CovarianceMatrix {
    data: DMatrix<f64>,
    time: f64,
    modes: Vec<ModeLabel>,
}

#[derive(Serialize, Deserialize)]
struct CmRepr {
    /// `null` for the steady state, whose time is infinite.
    time: Option<f64>,
    modes: Vec<ModeLabel>,
    /// Row-major entries.
    data: Vec<f64>,
}

impl TryFrom<CmRepr> for CovarianceMatrix {
    type Error = Error;

    fn try_from(r: CmRepr) -> Result<Self> {
        let dim = 2 * r.modes.len();
        if r.data.len() != dim * dim {
            return Err(Error::Shape(format!(
                "{} modes need {} entries, got {}",
                r.modes.len(),
                dim * dim,
                r.data.len()
            )));
        }
        let time = r.time.unwrap_or(f64::INFINITY);
        Self::new(DMatrix::from_row_slice(dim, dim, &r.data), time, r.modes)
    }
}

impl From<CovarianceMatrix> for CmRepr {
    fn from(v: CovarianceMatrix) -> Self {
        CmRepr {
            time: v.time.is_finite().then_some(v.time),
            data: v.data.transpose().as_slice().to_vec(),
            modes: v.modes,
        }
    }
}

/// `Ω = ⊕ᵏ [[0, 1], [−1, 0]]`.
pub fn symplectic_form(k: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        w[(2 * i, 2 * i + 1)] = 1.0;
        w[(2 * i + 1, 2 * i)] = -1.0;
    }
    w
}

impl CovarianceMatrix {
    /// Checks shape against `modes`, finiteness and symmetry to `1e-10·‖V‖_max`,
    /// then stores the symmetric part.
    pub fn new(data: DMatrix<f64>, time: f64, modes: Vec<ModeLabel>) -> Result<Self> {
        let dim = 2 * modes.len();
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::Shape(format!(
                "{} modes need a {dim}x{dim} matrix, got {}x{}",
                modes.len(),
                data.nrows(),
                data.ncols()
            )));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("covariance", "entries must be finite"));
        }
        let v = Self::from_parts_unchecked(data, time, modes);
        if v.asymmetry() > 1e-10 * v.data.amax() {
            return Err(Error::invalid("covariance", "matrix is not symmetric"));
        }
        Ok(v.symmetrized())
    }

    /// Covariance of a full `n_nodes` chain in canonical order.
    pub fn canonical(data: DMatrix<f64>, time: f64, n_nodes: usize) -> Result<Self> {
        Self::new(data, time, canonical_modes(n_nodes))
    }

    pub(crate) fn from_parts_unchecked(
        data: DMatrix<f64>,
        time: f64,
        modes: Vec<ModeLabel>,
    ) -> Self {
        Self { data, time, modes }
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn modes(&self) -> &[ModeLabel] {
        &self.modes
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// `‖V − Vᵀ‖_max`.
    pub fn asymmetry(&self) -> f64 {
        (&self.data - self.data.transpose()).amax()
    }

    pub fn symmetrized(mut self) -> Self {
        symmetrize(&mut self.data);
        self
    }

    /// Smallest eigenvalue of the Hermitian matrix `V + iΩ/2`.
    ///
    /// Evaluated through the real symmetric embedding `[[V, −Ω/2], [Ω/2, V]]`,
    /// whose spectrum is that of `V + iΩ/2` with every eigenvalue doubled.
    pub fn min_uncertainty_eigenvalue(&self) -> Result<f64> {
        let n = self.dim();
        let half_omega = symplectic_form(n / 2) * 0.5;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.data);
        m.view_mut((n, n), (n, n)).copy_from(&self.data);
        m.view_mut((0, n), (n, n)).copy_from(&(-&half_omega));
        m.view_mut((n, 0), (n, n)).copy_from(&half_omega);
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0).ok_or(Error::EigenSolver(2 * n))?;
        Ok(eig.eigenvalues.min())
    }

    /// Robertson-Schrödinger uncertainty relation within [`PHYSICALITY_TOLERANCE`].
    pub fn is_physical(&self) -> Result<bool> {
        Ok(self.min_uncertainty_eigenvalue()? >= PHYSICALITY_TOLERANCE)
    }
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}
