use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::covariance::{symmetrize, CovarianceMatrix};
use crate::error::{Error, Result};
use crate::fingerprint::fingerprint_f64s;
use crate::model::{stability, DiffusionMatrix, DriftMatrix};

/// Default RK4 step in internal time units.
pub const DEFAULT_DT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSettings {
    /// Maximum step; intervals between requested times are split into equal
    /// steps no longer than this.
    pub dt: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self { dt: DEFAULT_DT }
    }
}

impl IntegratorSettings {
    pub fn with_dt(dt: f64) -> Result<Self> {
        let s = Self { dt };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dt.is_finite() && self.dt > 0.0 {
            Ok(())
        } else {
            Err(Error::invalid(
                "dt",
                format!("must be positive, got {}", self.dt),
            ))
        }
    }
}

/// Snapshots of `V(t)` at strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    snapshots: Vec<CovarianceMatrix>,
    fingerprint: String,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[CovarianceMatrix] {
        &self.snapshots
    }

    pub fn into_snapshots(self) -> Vec<CovarianceMatrix> {
        self.snapshots
    }

    pub fn last(&self) -> &CovarianceMatrix {
        self.snapshots.last().expect("trajectories are nonempty")
    }

    /// Hash of `A`, `D`, `V(0)`, the requested times and the step size.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

struct Workspace {
    k1: DMatrix<f64>,
    k2: DMatrix<f64>,
    k3: DMatrix<f64>,
    k4: DMatrix<f64>,
    stage: DMatrix<f64>,
    product: DMatrix<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        let z = || DMatrix::zeros(n, n);
        Self {
            k1: z(),
            k2: z(),
            k3: z(),
            k4: z(),
            stage: z(),
            product: z(),
        }
    }
}

/// Below this dimension a plain column loop beats the blocked product.
const SMALL_DIM: usize = 20;

/// `out = AV + VAᵀ + D`, using `VAᵀ = (AV)ᵀ` for symmetric `V`.
fn rhs(
    a: &DMatrix<f64>,
    d: &DMatrix<f64>,
    v: &DMatrix<f64>,
    product: &mut DMatrix<f64>,
    out: &mut DMatrix<f64>,
) {
    let n = a.nrows();
    if n < SMALL_DIM {
        let (a, v) = (a.as_slice(), v.as_slice());
        for (pj, vj) in product
            .as_mut_slice()
            .chunks_exact_mut(n)
            .zip(v.chunks_exact(n))
        {
            pj.fill(0.0);
            for (ak, &vkj) in a.chunks_exact(n).zip(vj) {
                for (p, &x) in pj.iter_mut().zip(ak) {
                    *p += x * vkj;
                }
            }
        }
    } else {
        product.gemm(1.0, a, v, 0.0);
    }
    let p = product.as_slice();
    for (j, (oj, dj)) in out
        .as_mut_slice()
        .chunks_exact_mut(n)
        .zip(d.as_slice().chunks_exact(n))
        .enumerate()
    {
        for (i, (o, &dij)) in oj.iter_mut().zip(dj).enumerate() {
            *o = p[j * n + i] + p[i * n + j] + dij;
        }
    }
}

/// `y += alpha * x`.
fn add_scaled(y: &mut DMatrix<f64>, alpha: f64, x: &DMatrix<f64>) {
    for (yi, xi) in y.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *yi += alpha * xi;
    }
}

fn rk4_step(a: &DMatrix<f64>, d: &DMatrix<f64>, v: &mut DMatrix<f64>, h: f64, w: &mut Workspace) {
    rhs(a, d, v, &mut w.product, &mut w.k1);

    w.stage.copy_from(v);
    add_scaled(&mut w.stage, 0.5 * h, &w.k1);
    rhs(a, d, &w.stage, &mut w.product, &mut w.k2);

    w.stage.copy_from(v);
    add_scaled(&mut w.stage, 0.5 * h, &w.k2);
    rhs(a, d, &w.stage, &mut w.product, &mut w.k3);

    w.stage.copy_from(v);
    add_scaled(&mut w.stage, h, &w.k3);
    rhs(a, d, &w.stage, &mut w.product, &mut w.k4);

    let h6 = h / 6.0;
    add_scaled(v, h6, &w.k1);
    add_scaled(v, 2.0 * h6, &w.k2);
    add_scaled(v, 2.0 * h6, &w.k3);
    add_scaled(v, h6, &w.k4);
    symmetrize(v);
}

/// Integrate `V̇ = AV + VAᵀ + D` from `v0` with classical fixed-step RK4.
///
/// Every requested time is hit exactly: each interval is divided into
/// `⌈Δt/dt⌉` equal steps. A requested time equal to `v0.time()` yields `v0`
/// itself. The state is symmetrized after every step.
pub fn evolve(
    a: &DriftMatrix,
    d: &DiffusionMatrix,
    v0: &CovarianceMatrix,
    times: &[f64],
    settings: &IntegratorSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    let n = v0.dim();
    if a.dim() != n || d.dim() != n {
        return Err(Error::Shape(format!(
            "drift {0}x{0}, diffusion {1}x{1} and covariance {2}x{2} must agree",
            a.dim(),
            d.dim(),
            n
        )));
    }
    check_times(times, v0.time())?;

    let fingerprint = fingerprint_f64s([
        a.matrix().as_slice(),
        d.matrix().as_slice(),
        v0.data().as_slice(),
        &[v0.time(), settings.dt],
        times,
    ]);

    let (am, dm) = (a.matrix(), d.matrix());
    let mut w = Workspace::new(n);
    let mut v = v0.data().clone();
    let mut t = v0.time();
    let mut snapshots = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / settings.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for k in 0..steps {
                rk4_step(am, dm, &mut v, h, &mut w);
                // |V_ij| ≤ √(V_ii V_jj) for a covariance, so the diagonal overflows first
                let last = k + 1 == steps;
                if !v.diagonal().iter().all(|x| x.is_finite())
                    || (last && !v.iter().all(|x| x.is_finite()))
                {
                    let abscissa = stability(a)
                        .map(|r| r.spectral_abscissa)
                        .unwrap_or(f64::NAN);
                    return Err(Error::NonFinite {
                        time: t + (k + 1) as f64 * h,
                        abscissa,
                    });
                }
            }
        }
        t = target;
        snapshots.push(CovarianceMatrix::from_parts_unchecked(
            v.clone(),
            target,
            v0.modes().to_vec(),
        ));
    }
    Ok(Trajectory {
        times: times.to_vec(),
        snapshots,
        fingerprint,
    })
}

fn check_times(times: &[f64], start: f64) -> Result<()> {
    let first = *times
        .first()
        .ok_or_else(|| Error::TimeGrid("no output times requested".into()))?;
    if !times.iter().all(|t| t.is_finite()) {
        return Err(Error::TimeGrid("times must be finite".into()));
    }
    if first < start {
        return Err(Error::TimeGrid(format!(
            "first time {first} precedes the initial state at {start}"
        )));
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::TimeGrid(format!(
            "times must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}
