//! Logarithmic negativity of bipartitions of a Gaussian state.

mod partition;

pub use partition::Bipartition;

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::dynamics::{symplectic_form, CovarianceMatrix};
use crate::error::{Error, Result};
use crate::model::stability::real_eigenvalues;
use crate::modes::ModeLabel;

/// Values of the negativity below this are reported as exactly zero.
pub const LN_CLAMP: f64 = 1e-12;

/// Relative tolerance for matching `±iẽ` eigenvalue partners.
pub const PAIRING_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LnResult {
    pub value: f64,
    /// Symplectic eigenvalues of the partially transposed state, ascending.
    pub symplectic_spectrum: Vec<f64>,
    pub partition: Bipartition,
}

/// Submatrix for `modes`, in the order given (two rows/columns per mode).
pub fn reduce(v: &CovarianceMatrix, modes: &[ModeLabel]) -> Result<CovarianceMatrix> {
    let mut rows = Vec::with_capacity(2 * modes.len());
    for (i, m) in modes.iter().enumerate() {
        if modes[..i].contains(m) {
            return Err(Error::invalid("modes", format!("{m} listed twice")));
        }
        let pos = v
            .modes()
            .iter()
            .position(|x| x == m)
            .ok_or_else(|| Error::UnknownMode(format!("{m} is not part of this state")))?;
        rows.extend([2 * pos, 2 * pos + 1]);
    }
    let data = v.data().select_rows(&rows).select_columns(&rows);
    CovarianceMatrix::new(data, v.time(), modes.to_vec())
}

/// `PVP` with `P = −1` on the Y quadrature of every `side_a` mode. `v` must
/// be the reduction onto `side_a ⧺ side_b`.
pub fn partial_transpose(v: &CovarianceMatrix, p: &Bipartition) -> Result<CovarianceMatrix> {
    if !v.modes().iter().copied().eq(p.modes()) {
        return Err(Error::Shape(format!(
            "state over {} modes does not match partition {p}",
            v.modes().len()
        )));
    }
    let mut data = v.data().clone();
    for k in 0..p.side_a().len() {
        let y = 2 * k + 1;
        data.row_mut(y).neg_mut();
        data.column_mut(y).neg_mut();
    }
    CovarianceMatrix::new(data, v.time(), v.modes().to_vec())
}

/// Moduli `ẽⱼ` of the `±iẽⱼ` eigenvalue pairs of `ΩV`, ascending.
///
/// Partners are matched when `|λ + μ| ≤ 1e-8·max(|λ|, |μ|)` plus an absolute
/// floor of `1e3·ε·‖ΩV‖_F`, so strongly amplified states are not rejected
/// over round-off.
pub fn symplectic_eigenvalues(v: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = v.nrows();
    if n != v.ncols() || !n.is_multiple_of(2) {
        return Err(Error::Shape(format!(
            "symplectic spectrum needs an even square matrix, got {}x{}",
            n,
            v.ncols()
        )));
    }
    let w = symplectic_form(n / 2) * v;
    let floor = 1e3 * f64::EPSILON * w.norm();
    let mut eig = real_eigenvalues(&w)?;
    eig.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    let mut used = vec![false; eig.len()];
    let mut spectrum = Vec::with_capacity(n / 2);
    for i in 0..eig.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let z = eig[i];
        let (j, gap) = (0..eig.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (z + eig[j]).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::UnpairedSpectrum(format!("{z} has no partner")))?;
        let w_j: Complex<f64> = eig[j];
        if gap > PAIRING_TOLERANCE * z.norm().max(w_j.norm()) + floor {
            return Err(Error::UnpairedSpectrum(format!(
                "{z} and {w_j} differ from a ± pair by {gap:e}"
            )));
        }
        used[j] = true;
        spectrum.push(0.5 * (z.norm() + w_j.norm()));
    }
    spectrum.sort_by(f64::total_cmp);
    Ok(spectrum)
}

fn clamp(e: f64) -> f64 {
    if e < LN_CLAMP {
        0.0
    } else {
        e
    }
}

fn negativity_term(e: f64) -> f64 {
    (-(2.0 * e).ln()).max(0.0)
}

/// Logarithmic negativity across `p`.
///
/// Reduce to `side_a ⧺ side_b`, partially transpose, and take the
/// symplectic spectrum. When either side is a single mode the value uses
/// the smallest eigenvalue only, `max[0, −ln 2ẽ_min]`; otherwise it sums
/// `max[0, −ln 2ẽⱼ]` over the spectrum.
pub fn log_negativity(v: &CovarianceMatrix, p: &Bipartition) -> Result<LnResult> {
    let modes: Vec<ModeLabel> = p.modes().collect();
    let reduced = reduce(v, &modes)?;
    let pt = partial_transpose(&reduced, p)?;
    let spectrum = symplectic_eigenvalues(pt.data())?;
    let value = if p.min_side() == 1 {
        negativity_term(spectrum[0])
    } else {
        spectrum.iter().map(|&e| negativity_term(e)).sum()
    };
    Ok(LnResult {
        value: clamp(value),
        symplectic_spectrum: spectrum,
        partition: p.clone(),
    })
}

/// Closed-form two-mode negativity of a 4×4 state `[[A, C], [Cᵀ, B]]`:
/// `Σ̃ = det A + det B − 2 det C` and `ẽ²₋ = [Σ̃ − √(Σ̃² − 4 det V)]/2`,
/// evaluated as `2 det V / [Σ̃ + √(Σ̃² − 4 det V)]` to avoid cancellation.
pub fn two_mode_ln_closed_form(v4: &CovarianceMatrix) -> Result<LnResult> {
    if v4.dim() != 4 {
        return Err(Error::Shape(format!(
            "expected a two-mode state, got {}x{}",
            v4.dim(),
            v4.dim()
        )));
    }
    let v = v4.data();
    let det2 = |r: usize, c: usize| v[(r, c)] * v[(r + 1, c + 1)] - v[(r, c + 1)] * v[(r + 1, c)];
    let sigma = det2(0, 0) + det2(2, 2) - 2.0 * det2(0, 2);
    let det_v = v.determinant();
    let disc = sigma * sigma - 4.0 * det_v;
    if disc < -1e-12 * sigma.abs().max(1.0).powi(2) {
        return Err(Error::Unphysical(format!(
            "negative discriminant {disc:e} in the two-mode formula"
        )));
    }
    let root = disc.max(0.0).sqrt();
    let upper_sq = 0.5 * (sigma + root);
    let lower_sq = if upper_sq > 0.0 {
        det_v / upper_sq
    } else {
        0.5 * (sigma - root)
    };
    let lower = lower_sq.max(0.0).sqrt();
    let upper = upper_sq.max(0.0).sqrt();
    let partition = Bipartition::new(vec![v4.modes()[0]], vec![v4.modes()[1]])?;
    Ok(LnResult {
        value: clamp(negativity_term(lower)),
        symplectic_spectrum: vec![lower, upper],
        partition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::canonical_modes;

    fn tmsv(r: f64) -> CovarianceMatrix {
        let (c, s) = ((2.0 * r).cosh() / 2.0, (2.0 * r).sinh() / 2.0);
        #[rustfmt::skip]
        let m = DMatrix::from_row_slice(4, 4, &[
            c,   0.0, s,   0.0,
            0.0, c,   0.0, -s,
            s,   0.0, c,   0.0,
            0.0, -s,  0.0, c,
        ]);
        CovarianceMatrix::canonical(m, 0.0, 1).unwrap()
    }

    #[test]
    fn reduce_selects_rows_in_order() {
        let data = DMatrix::from_fn(8, 8, |i, j| (10 * i.min(j) + i.max(j)) as f64);
        let v = CovarianceMatrix::canonical(data.clone(), 0.0, 2).unwrap();
        let full = reduce(&v, &canonical_modes(2)).unwrap();
        assert_eq!(full.data(), &data);
        let r = reduce(&v, &[ModeLabel::magnon(1), ModeLabel::phonon(0)]).unwrap();
        // 1-based rows (5, 6, 3, 4)
        let idx = [4, 5, 2, 3];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                assert_eq!(r.data()[(a, b)], data[(i, j)]);
            }
        }
        assert!(reduce(&v, &[ModeLabel::magnon(2)]).is_err());
        assert!(reduce(&v, &[ModeLabel::magnon(0), ModeLabel::magnon(0)]).is_err());
    }

    #[test]
    fn reduction_of_diagonal_stays_diagonal() {
        let d = nalgebra::DVector::from_fn(8, |i, _| i as f64 + 1.0);
        let v = CovarianceMatrix::canonical(DMatrix::from_diagonal(&d), 0.0, 2).unwrap();
        let r = reduce(&v, &[ModeLabel::phonon(1), ModeLabel::magnon(0)]).unwrap();
        assert_eq!(
            r.data(),
            &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![7.0, 8.0, 1.0, 2.0]))
        );
    }

    #[test]
    fn partial_transpose_signs() {
        let p: Bipartition = "m1|b1".parse().unwrap();
        let ones = CovarianceMatrix::canonical(DMatrix::from_element(4, 4, 1.0), 0.0, 1).unwrap();
        let pt = partial_transpose(&ones, &p).unwrap();
        let diag = [1.0, -1.0, 1.0, 1.0];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(pt.data()[(i, j)], diag[i] * diag[j]);
            }
        }
        assert_eq!(partial_transpose(&pt, &p).unwrap(), ones);
        let wrong: Bipartition = "b1|m1".parse().unwrap();
        assert!(partial_transpose(&ones, &wrong).is_err());
    }

    #[test]
    fn symplectic_spectrum_of_simple_states() {
        let s = symplectic_eigenvalues(&(DMatrix::identity(6, 6) * 0.5)).unwrap();
        assert!(s.iter().all(|e| (e - 0.5).abs() < 1e-14));
        let s = symplectic_eigenvalues(&(DMatrix::identity(4, 4) * 3.25)).unwrap();
        assert!(s.iter().all(|e| (e - 3.25).abs() < 1e-13));
        let s = symplectic_eigenvalues(tmsv(0.8).data()).unwrap();
        assert!(s.iter().all(|e| (e - 0.5).abs() < 1e-12), "{s:?}");
        assert!(symplectic_eigenvalues(&DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn asymmetric_input_is_unpaired() {
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = 3.0;
        assert!(matches!(
            symplectic_eigenvalues(&m),
            Err(Error::UnpairedSpectrum(_))
        ));
    }

    #[test]
    fn two_mode_squeezed_vacuum() {
        let v = tmsv(0.5);
        let p: Bipartition = "m1|b1".parse().unwrap();
        let e = log_negativity(&v, &p).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!((e.symplectic_spectrum[0] - (-1.0f64).exp() / 2.0).abs() < 1e-13);
        let c = two_mode_ln_closed_form(&v).unwrap();
        assert!((c.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_is_separable() {
        let v = CovarianceMatrix::canonical(DMatrix::identity(8, 8) * 0.5, 0.0, 2).unwrap();
        for spec in ["m1|b1", "m1,b1|m2,b2", "b2|m1,m2"] {
            assert_eq!(
                log_negativity(&v, &spec.parse().unwrap()).unwrap().value,
                0.0
            );
        }
        let v4 = reduce(&v, &canonical_modes(1)).unwrap();
        assert_eq!(two_mode_ln_closed_form(&v4).unwrap().value, 0.0);
    }

    #[test]
    fn two_by_two_splits_sum_the_spectrum() {
        // two independent TMSV pairs (m1,m2) with 2r = 1 and (b1,b2) with 2r = 0.6
        // across m1,b1 | m2,b2
        let (c1, s1) = ((1.0f64).cosh() / 2.0, (1.0f64).sinh() / 2.0);
        let (c2, s2) = ((0.6f64).cosh() / 2.0, (0.6f64).sinh() / 2.0);
        let mut m = DMatrix::zeros(8, 8);
        for (a, b, c, s) in [(0, 4, c1, s1), (2, 6, c2, s2)] {
            for k in 0..2 {
                m[(a + k, a + k)] = c;
                m[(b + k, b + k)] = c;
            }
            let sign = [1.0, -1.0];
            for k in 0..2 {
                m[(a + k, b + k)] = sign[k] * s;
                m[(b + k, a + k)] = sign[k] * s;
            }
        }
        let v = CovarianceMatrix::canonical(m, 0.0, 2).unwrap();
        let r = log_negativity(&v, &"m1,b1|m2,b2".parse().unwrap()).unwrap();
        assert!((r.value - 1.6).abs() < 1e-12, "{}", r.value);
        let single = log_negativity(&v, &"m1|m2,b2".parse().unwrap()).unwrap();
        assert!((single.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_rejects_wrong_size() {
        let v = CovarianceMatrix::canonical(DMatrix::identity(8, 8), 0.0, 2).unwrap();
        assert!(two_mode_ln_closed_form(&v).is_err());
    }
}
