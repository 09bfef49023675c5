//! Shared numerical kernel: adaptive Runge-Kutta integration with dense
//! output, Picard iteration on the singular-endpoint integral kernels,
//! damped Newton with finite-difference Jacobians, topological degree
//! certificates (1-d sign degree and planar winding numbers), and
//! predictor-corrector continuation in a homotopy parameter.
//!
//! Everything here is deterministic: no randomness, no hash-order
//! dependence, no threads. All routines take explicit tolerances.

pub mod continuation;
pub mod degree;
pub mod ivp;
pub mod newton;
pub mod singular;

pub use continuation::{continue_zero, ContinuationConfig, PathPoint};
pub use degree::{degree_1d, winding_number, WindingCertificate};
pub use ivp::{integrate_ivp, Dense};
pub use newton::{newton_nd, NewtonConfig, NewtonReport};
pub use singular::{
    apply_kernel, picard_fixed_point, singular_start, volterra_cone, volterra_first,
    volterra_second, with_shrinking_eps, PicardReport, SingularKernel, StartState, VolterraGrid,
};

use thiserror::Error;

/// Tolerances and step bounds for [`integrate_ivp`], plus the handoff
/// distance used by the singular-endpoint starting procedures.
#[derive(Clone, Debug)]
pub struct IntegratorConfig {
    /// Absolute tolerance entering the per-step error norm.
    pub abs_tol: f64,
    /// Relative tolerance entering the per-step error norm.
    pub rel_tol: f64,
    /// Largest step the controller may take.
    pub max_step: f64,
    /// Smallest step before the integration aborts with
    /// [`NumericsError::StepUnderflow`].
    pub min_step: f64,
    /// Distance from a singular endpoint at which the Picard start hands
    /// off to the adaptive integrator.
    pub singular_offset: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_step: 0.1,
            min_step: 1e-14,
            singular_offset: 1e-3,
        }
    }
}

impl IntegratorConfig {
    /// Checks the documented parameter ranges: tolerances in `(0, 1e-2]`,
    /// `0 < min_step <= max_step`, and the singular handoff offset in
    /// `[1e-6, 1e-1]`.
    pub fn validate(&self) -> Result<(), NumericsError> {
        let ok = self.abs_tol > 0.0
            && self.abs_tol <= 1e-2
            && self.rel_tol > 0.0
            && self.rel_tol <= 1e-2
            && self.min_step > 0.0
            && self.min_step <= self.max_step
            && (1e-6..=1e-1).contains(&self.singular_offset);
        if ok {
            Ok(())
        } else {
            Err(NumericsError::BadConfig)
        }
    }
}

/// Errors shared by the numerical kernel. Shooting routines in the symmetry
/// modules surface these unchanged, so a failed solve reports the exact
/// numerical cause.
#[derive(Clone, Debug, Error)]
pub enum NumericsError {
    /// Step size controller fell below `min_step` before reaching the end of
    /// the integration interval.
    #[error("step size underflow at t = {t:.6e} (step {step:.3e})")]
    StepUnderflow { t: f64, step: f64 },

    /// Picard iteration failed to contract even after shrinking the start
    /// interval to the configured floor.
    #[error("singular-start iteration failed to contract for eps >= {eps:.3e}")]
    NoContraction { eps: f64 },

    /// Newton iteration exhausted its budget; carries the best iterate seen.
    #[error("newton did not converge: best residual {residual:.3e}")]
    NoConvergence { best: Vec<f64>, residual: f64 },

    /// A winding-number sweep met a boundary sample too close to zero for the
    /// angle increments to be trusted.
    #[error("map vanishes on the contour: min |F| = {min_abs:.3e} < {tol:.3e}")]
    ZeroOnBoundary { min_abs: f64, tol: f64 },

    /// Adaptive contour refinement hit its subdivision cap without bringing
    /// every angle increment under the safe bound.
    #[error("contour refinement exhausted after {segments} segments")]
    RefinementExhausted { segments: usize },

    /// 1-d degree query with a (numerically) zero value at an endpoint.
    #[error("sign degree undefined: |f({at:.6e})| = {value:.3e} below tolerance")]
    ZeroAtEndpoint { at: f64, value: f64 },

    /// Continuation corrector diverged at the smallest allowed parameter
    /// step; carries the last accepted point.
    #[error("continuation lost the zero path at p = {p:.6}")]
    PathLost { p: f64, z: Vec<f64> },

    /// Configuration outside the documented parameter ranges.
    #[error("invalid numerical configuration")]
    BadConfig,
}

/// Least-squares quadratic `a + b τ + c τ²` through weighted samples.
pub(crate) fn fit_quadratic(pts: &[(f64, f64)]) -> [f64; 3] {
    assert!(pts.len() >= 3, "need at least three band nodes");
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(t, v) in pts {
        let basis = [1.0, t, t * t];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            rhs[i] += basis[i] * v;
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 system.
    let mut a = m;
    let mut b = rhs;
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let fac = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= fac * a[col][k];
            }
            b[row] -= fac * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut v = b[row];
        for k in row + 1..3 {
            v -= a[row][k] * x[k];
        }
        x[row] = v / a[row][row];
    }
    x
}
