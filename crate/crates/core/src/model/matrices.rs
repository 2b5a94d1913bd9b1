use nalgebra::DMatrix;

use super::Scenario;
use crate::error::{Error, Result};

/// Drift matrix `A` of the linearized quantum Langevin equations in the
/// canonical 4N quadrature ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftMatrix(DMatrix<f64>);

/// Diffusion matrix `D`, symmetric, same ordering as the drift.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionMatrix(DMatrix<f64>);

impl DriftMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "drift must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

impl DiffusionMatrix {
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Shape(format!(
                "diffusion must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        if (&m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::Shape("diffusion must be symmetric".into()));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// Assemble `A`.
///
/// Per node `j` (code rows `r = 4j`): magnon rotation by `Δⱼ` and damping
/// `κ̃ⱼ`, phonon rotation by `ω_b` and damping `κ_b`, and the `-2gⱼ` entries
/// at `(r+1, r+2)` and `(r+3, r)`. Each magnon pair `j ≠ l` carries the block
/// `[[-c, s], [-s, -c]]` with `c = √(κⱼκ_l) cos φ_{jl}`, `s = √(κⱼκ_l) sin φ_{jl}`;
/// the block is identical at `(j, l)` and `(l, j)`.
pub fn build_drift(s: &Scenario) -> DriftMatrix {
    let n = s.n_nodes();
    let mut a = DMatrix::zeros(4 * n, 4 * n);
    for j in 0..n {
        let r = 4 * j;
        let delta = s.delta()[j];
        let kt = s.kappa_total(j);
        let wb = s.omega_b();
        let kb = s.kappa_b();
        let g2 = -2.0 * s.g()[j];

        a[(r, r + 1)] = delta;
        a[(r + 1, r)] = -delta;
        a[(r + 2, r + 3)] = wb;
        a[(r + 3, r + 2)] = -wb;
        a[(r, r)] = -kt;
        a[(r + 1, r + 1)] = -kt;
        a[(r + 2, r + 2)] = -kb;
        a[(r + 3, r + 3)] = -kb;
        a[(r + 1, r + 2)] = g2;
        a[(r + 3, r)] = g2;

        for l in (0..n).filter(|&l| l != j) {
            let c = r;
            let q = 4 * l;
            let (sin, cos) = s.pair_phase(j, l).sin_cos();
            let k = (s.kappa()[j] * s.kappa()[l]).sqrt();
            a[(c, q)] = -k * cos;
            a[(c + 1, q + 1)] = -k * cos;
            a[(c, q + 1)] = k * sin;
            a[(c + 1, q)] = -k * sin;
        }
    }
    DriftMatrix(a)
}

/// Assemble `D`: thermal noise on the diagonal and the correlated magnon
/// noise `Γ_{jl}(2n̄+1)` with `Γ_{jl} = √(κⱼκ_l) cos φ_{jl}` on the X-X and
/// Y-Y cross entries, mirrored so that `D` is symmetric.
pub fn build_diffusion(s: &Scenario) -> DiffusionMatrix {
    let n = s.n_nodes();
    let mut d = DMatrix::zeros(4 * n, 4 * n);
    let magnon_noise = 2.0 * s.n_bar_m() + 1.0;
    let phonon_noise = s.kappa_b() * (2.0 * s.n_bar_b() + 1.0);
    for j in 0..n {
        let r = 4 * j;
        let m = s.kappa_total(j) * magnon_noise;
        d[(r, r)] = m;
        d[(r + 1, r + 1)] = m;
        d[(r + 2, r + 2)] = phonon_noise;
        d[(r + 3, r + 3)] = phonon_noise;
        for l in (0..n).filter(|&l| l != j) {
            let q = 4 * l;
            let gamma = (s.kappa()[j] * s.kappa()[l]).sqrt() * s.pair_phase(j, l).cos();
            d[(r, q)] = gamma * magnon_noise;
            d[(r + 1, q + 1)] = gamma * magnon_noise;
        }
    }
    DiffusionMatrix(d)
}
