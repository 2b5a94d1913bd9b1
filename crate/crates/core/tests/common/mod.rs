//! Independent reference constructions shared by the integration tests.
#![allow(dead_code)]

use magnomech::dynamics::CovarianceMatrix;
use magnomech::modes::canonical_modes;
use nalgebra::DMatrix;
use rand::Rng;

/// Quadrature-ordered symplectic built from random squeezers, phase
/// rotations, beam splitters and two-mode squeezers acting on `k` modes.
pub fn random_symplectic<R: Rng>(rng: &mut R, k: usize, max_squeeze: f64) -> DMatrix<f64> {
    let n = 2 * k;
    let mut s = DMatrix::<f64>::identity(n, n);
    for _ in 0..3 * k {
        let mut g = DMatrix::<f64>::identity(n, n);
        let i = rng.random_range(0..k);
        match rng.random_range(0..4) {
            0 => {
                let r = rng.random_range(-max_squeeze..max_squeeze);
                g[(2 * i, 2 * i)] = r.exp();
                g[(2 * i + 1, 2 * i + 1)] = (-r).exp();
            }
            1 => {
                let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let (c, sn) = (th.cos(), th.sin());
                g[(2 * i, 2 * i)] = c;
                g[(2 * i, 2 * i + 1)] = sn;
                g[(2 * i + 1, 2 * i)] = -sn;
                g[(2 * i + 1, 2 * i + 1)] = c;
            }
            kind if k > 1 => {
                let j = (i + rng.random_range(1..k)) % k;
                if kind == 2 {
                    let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                    let (c, sn) = (th.cos(), th.sin());
                    for q in 0..2 {
                        g[(2 * i + q, 2 * i + q)] = c;
                        g[(2 * i + q, 2 * j + q)] = sn;
                        g[(2 * j + q, 2 * i + q)] = -sn;
                        g[(2 * j + q, 2 * j + q)] = c;
                    }
                } else {
                    let r = rng.random_range(-max_squeeze..max_squeeze);
                    let (c, sh) = (r.cosh(), r.sinh());
                    for (q, sign) in [(0, 1.0), (1, -1.0)] {
                        g[(2 * i + q, 2 * i + q)] = c;
                        g[(2 * j + q, 2 * j + q)] = c;
                        g[(2 * i + q, 2 * j + q)] = sign * sh;
                        g[(2 * j + q, 2 * i + q)] = sign * sh;
                    }
                }
            }
            _ => {}
        }
        s = g * s;
    }
    s
}

/// `S diag(ν) Sᵀ` with symplectic eigenvalues `ν ≥ 1/2` (vacuum is `I/2`).
pub fn random_physical_cm<R: Rng>(rng: &mut R, k: usize, max_squeeze: f64) -> DMatrix<f64> {
    let s = random_symplectic(rng, k, max_squeeze);
    let nu: Vec<f64> = (0..k)
        .flat_map(|_| {
            let x = 0.5 + rng.random_range(0.0..2.0);
            [x, x]
        })
        .collect();
    let v = &s * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(nu)) * s.transpose();
    (&v + v.transpose()) * 0.5
}

/// Chain covariance for `n_nodes` nodes from a `4n × 4n` matrix.
pub fn chain_cm(data: DMatrix<f64>) -> CovarianceMatrix {
    let n = data.nrows() / 4;
    CovarianceMatrix::new(data, 0.0, canonical_modes(n)).unwrap()
}

/// Two-mode negativity from `Σ = det A + det B − 2 det C`:
/// `ν₋² ν₊² = det V` and `ν₊² = [Σ + √(Σ² − 4 det V)] / 2`,
/// `E = max(0, −ln 2ν₋)`.
pub fn textbook_two_mode_ln(v: &DMatrix<f64>) -> f64 {
    let det2 = |r: usize, c: usize| v[(r, c)] * v[(r + 1, c + 1)] - v[(r, c + 1)] * v[(r + 1, c)];
    let sigma = det2(0, 0) + det2(2, 2) - 2.0 * det2(0, 2);
    let det = v.clone().determinant();
    let upper = (sigma + (sigma * sigma - 4.0 * det).max(0.0).sqrt()) / 2.0;
    let nu_sq = det / upper;
    (-(2.0 * nu_sq.max(0.0).sqrt()).ln()).max(0.0)
}

/// `V(t)` for `V̇ = AV + VAᵀ + D` via Van Loan's block exponential. The
/// block `e^{−At}` limits this to `t·‖A‖` of order ten; see
/// [`exact_covariance_chained`] for longer spans.
pub fn exact_covariance(
    a: &DMatrix<f64>,
    d: &DMatrix<f64>,
    v0: &DMatrix<f64>,
    t: f64,
) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&(-a * t));
    m.view_mut((0, n), (n, n)).copy_from(&(d * t));
    m.view_mut((n, n), (n, n)).copy_from(&(a.transpose() * t));
    let e = m.exp();
    let f = e.view((n, n), (n, n)).transpose();
    let g = e.view((0, n), (n, n)).into_owned();
    let v = &f * v0 * f.transpose() + &f * g;
    (&v + v.transpose()) * 0.5
}

/// [`exact_covariance`] applied over `pieces` equal sub-intervals.
pub fn exact_covariance_chained(
    a: &DMatrix<f64>,
    d: &DMatrix<f64>,
    v0: &DMatrix<f64>,
    t: f64,
    pieces: usize,
) -> DMatrix<f64> {
    let h = t / pieces as f64;
    let n = a.nrows();
    let forced = exact_covariance(a, d, &DMatrix::zeros(n, n), h);
    let prop = (a * h).exp();
    let mut v = v0.clone();
    for _ in 0..pieces {
        let next = &prop * &v * prop.transpose() + &forced;
        v = (&next + next.transpose()) * 0.5;
    }
    v
}

/// Parameters shared by the reduced multimode drift matrices.
pub struct ReducedParams {
    pub n: usize,
    pub delta: f64,
    pub omega_b: f64,
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub kappa_b: f64,
    pub phi: f64,
}

fn magnon_block(a: &mut DMatrix<f64>, r: usize, p: &ReducedParams) {
    let kt = p.kappa + p.gamma;
    a[(r, r)] = -kt;
    a[(r, r + 1)] = p.delta;
    a[(r + 1, r)] = -p.delta;
    a[(r + 1, r + 1)] = -kt;
}

fn phonon_block(a: &mut DMatrix<f64>, r: usize, p: &ReducedParams) {
    a[(r, r)] = -p.kappa_b;
    a[(r, r + 1)] = p.omega_b;
    a[(r + 1, r)] = -p.omega_b;
    a[(r + 1, r + 1)] = -p.kappa_b;
}

fn cross(a: &mut DMatrix<f64>, r: usize, c: usize, kappa: f64, phi: f64) {
    let (co, si) = (kappa * phi.cos(), kappa * phi.sin());
    for (x, y) in [(r, c), (c, r)] {
        a[(x, y)] = -co;
        a[(x, y + 1)] = si;
        a[(x + 1, y)] = -si;
        a[(x + 1, y + 1)] = -co;
    }
}

/// One phonon, `N` magnons, ordered `[m1, b1, m2, …, mN]`.
pub fn one_phonon_reduced_drift(p: &ReducedParams) -> DMatrix<f64> {
    let dim = 2 * p.n + 2;
    let mut a = DMatrix::zeros(dim, dim);
    magnon_block(&mut a, 0, p);
    phonon_block(&mut a, 2, p);
    a[(1, 2)] = -2.0 * p.g;
    a[(3, 0)] = -2.0 * p.g;
    let mag = |j: usize| 4 + 2 * (j - 2);
    for j in 2..=p.n {
        magnon_block(&mut a, mag(j), p);
        cross(&mut a, 0, mag(j), p.kappa, p.phi);
        for l in j + 1..=p.n {
            cross(&mut a, mag(j), mag(l), p.kappa, 0.0);
        }
    }
    a
}

/// One magnon, `N` phonons, ordered `[m1, m2, b2, …, mN, bN]`.
pub fn one_magnon_reduced_drift(p: &ReducedParams) -> DMatrix<f64> {
    let dim = 4 * p.n - 2;
    let mut a = DMatrix::zeros(dim, dim);
    magnon_block(&mut a, 0, p);
    let mag = |j: usize| 2 + 4 * (j - 2);
    for j in 2..=p.n {
        let (m, b) = (mag(j), mag(j) + 2);
        magnon_block(&mut a, m, p);
        phonon_block(&mut a, b, p);
        a[(m + 1, b)] = -2.0 * p.g;
        a[(b + 1, m)] = -2.0 * p.g;
        cross(&mut a, 0, m, p.kappa, p.phi);
        for l in j + 1..=p.n {
            cross(&mut a, m, mag(l), p.kappa, 0.0);
        }
    }
    a
}

/// Rows/columns of the canonical matrix picked in `modes` order, each
/// mode given as its 0-based canonical slot.
pub fn pick(a: &DMatrix<f64>, slots: &[usize]) -> DMatrix<f64> {
    let idx: Vec<usize> = slots.iter().flat_map(|&s| [2 * s, 2 * s + 1]).collect();
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}
