//! Covariance-matrix dynamics: the initial thermal state, time evolution
//! under `V̇ = AV + VAᵀ + D`, and the algebraic steady state.

mod covariance;
mod evolve;
mod export;
mod steady;

pub use covariance::{symplectic_form, CovarianceMatrix, PHYSICALITY_TOLERANCE};
pub use evolve::{evolve, IntegratorSettings, Trajectory, DEFAULT_DT};
pub use export::{trajectory_csv, TrajectoryJson};
pub use steady::{lyapunov_residual, steady_state, SteadyState, STEADY_RESIDUAL_TOLERANCE};

use nalgebra::DMatrix;

use crate::model::Scenario;
use crate::modes::canonical_modes;

/// Thermal product state: `n̄ + ½` on magnon quadratures, `n̄_b + ½` on phonon ones.
pub fn initial_cm(s: &Scenario) -> CovarianceMatrix {
    let n = s.n_nodes();
    let m = s.n_bar_m() + 0.5;
    let b = s.n_bar_b() + 0.5;
    let diag: Vec<f64> = (0..n).flat_map(|_| [m, m, b, b]).collect();
    CovarianceMatrix::from_parts_unchecked(
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
        0.0,
        canonical_modes(n),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{RateUnits, ScenarioParams};

    #[test]
    fn vacuum_initial_state() {
        let s = ScenarioParams::uniform(RateUnits::Cyclic, 2)
            .build()
            .unwrap();
        let v = initial_cm(&s);
        assert_eq!(v.data(), &(DMatrix::identity(8, 8) * 0.5));
        assert_eq!(v.time(), 0.0);
    }

    #[test]
    fn thermal_phonons() {
        let mut p = ScenarioParams::uniform(RateUnits::Cyclic, 2);
        p.n_bar_b = 20.35;
        let v = initial_cm(&p.build().unwrap());
        let d = v.data().diagonal();
        assert_eq!(
            d.as_slice(),
            &[0.5, 0.5, 20.85, 20.85, 0.5, 0.5, 20.85, 20.85]
        );
        assert!(v.is_physical().unwrap());
    }

    #[test]
    fn dimension_follows_node_count() {
        let s = ScenarioParams::uniform(RateUnits::Cyclic, 4)
            .build()
            .unwrap();
        let v = initial_cm(&s);
        assert_eq!(v.dim(), 16);
        assert_eq!(v.modes().len(), 8);
        let off = v.data() - DMatrix::from_diagonal(&v.data().diagonal());
        assert_eq!(off.amax(), 0.0);
    }
}
