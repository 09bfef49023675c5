//! Damped Newton iteration for small nonlinear systems.
//!
//! The residual maps in this crate (shooting mismatches, algebraic
//! inversions) are smooth but only defined on open domains -- a trial step
//! can leave the region where a shot makes sense. The driver therefore
//! treats an evaluation error during the line search as "step too long" and
//! backtracks, while an error at an accepted point is propagated.

use super::NumericsError;
use nalgebra::{DMatrix, DVector};

/// Tuning knobs for [`newton_nd`].
#[derive(Clone, Copy, Debug)]
pub struct NewtonConfig {
    /// Convergence threshold on the max-norm of the residual.
    pub tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
    /// Relative step for the central finite-difference Jacobian.
    pub fd_step: f64,
    /// Smallest damping factor tried before the step is declared failed.
    pub min_lambda: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 60,
            fd_step: 1e-6,
            min_lambda: 1.0 / 1024.0,
        }
    }
}

/// Convergence record of a Newton run.
#[derive(Clone, Copy, Debug)]
pub struct NewtonReport {
    /// Newton steps taken.
    pub iterations: usize,
    /// Final residual max-norm.
    pub residual: f64,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Finds a root of `f` near `x0` by damped Newton with a finite-difference
/// Jacobian. Returns the root and a convergence report, or
/// [`NumericsError::NoConvergence`] carrying the best point seen.
pub fn newton_nd(
    f: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>, NumericsError>,
    x0: &[f64],
    cfg: &NewtonConfig,
) -> Result<(Vec<f64>, NewtonReport), NumericsError> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    assert_eq!(fx.len(), n, "residual dimension must match unknowns");
    let mut res = max_norm(&fx);

    for iter in 0..cfg.max_iter {
        if res <= cfg.tol {
            return Ok((
                x,
                NewtonReport {
                    iterations: iter,
                    residual: res,
                },
            ));
        }

        // Central-difference Jacobian, column by column.
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let h = cfg.fd_step * x[j].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            match (f(&xp), f(&xm)) {
                (Ok(fp), Ok(fm)) => {
                    for i in 0..n {
                        jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
                    }
                }
                // One-sided fallback when a probe leaves the domain.
                (Ok(fp), Err(_)) => {
                    for i in 0..n {
                        jac[(i, j)] = (fp[i] - fx[i]) / h;
                    }
                }
                (Err(_), Ok(fm)) => {
                    for i in 0..n {
                        jac[(i, j)] = (fx[i] - fm[i]) / h;
                    }
                }
                (Err(e), Err(_)) => return Err(e),
            }
        }

        let rhs = DVector::from_iterator(n, fx.iter().map(|v| -v));
        let step = match jac.lu().solve(&rhs) {
            Some(s) => s,
            None => {
                return Err(NumericsError::NoConvergence {
                    best: x,
                    residual: res,
                })
            }
        };

        // Backtracking line search on the residual norm.
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= cfg.min_lambda {
            let trial: Vec<f64> = (0..n).map(|i| x[i] + lambda * step[i]).collect();
            if let Ok(ft) = f(&trial) {
                let rt = max_norm(&ft);
                if rt < res || rt <= cfg.tol {
                    x = trial;
                    fx = ft;
                    res = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(NumericsError::NoConvergence {
                best: x,
                residual: res,
            });
        }
    }

    if res <= cfg.tol {
        let iterations = cfg.max_iter;
        Ok((
            x,
            NewtonReport {
                iterations,
                residual: res,
            },
        ))
    } else {
        Err(NumericsError::NoConvergence {
            best: x,
            residual: res,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_two_dimensional_system() {
        // Circle of radius 2 intersected with the diagonal.
        let mut f = |x: &[f64]| -> Result<Vec<f64>, NumericsError> {
            Ok(vec![x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1]])
        };
        let (root, rep) = newton_nd(&mut f, &[1.0, 0.5], &NewtonConfig::default()).unwrap();
        assert_relative_eq!(root[0], std::f64::consts::SQRT_2, epsilon = 1e-10);
        assert_relative_eq!(root[1], std::f64::consts::SQRT_2, epsilon = 1e-10);
        assert!(rep.residual <= 1e-12);
    }

    #[test]
    fn backtracks_around_domain_boundary() {
        // f is only defined for x > 0; a full step from 5.0 would overshoot
        // far below the root but damping keeps the iterates admissible.
        let mut f = |x: &[f64]| -> Result<Vec<f64>, NumericsError> {
            if x[0] <= 0.0 {
                return Err(NumericsError::BadConfig);
            }
            Ok(vec![x[0].ln()])
        };
        let (root, _) = newton_nd(&mut f, &[5.0], &NewtonConfig::default()).unwrap();
        assert_relative_eq!(root[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn reports_no_convergence_with_best_point() {
        // 1 + x^2 has no real root; the minimizer x = 0 should be reported.
        let mut f =
            |x: &[f64]| -> Result<Vec<f64>, NumericsError> { Ok(vec![1.0 + x[0] * x[0]]) };
        let err = newton_nd(&mut f, &[3.0], &NewtonConfig::default()).unwrap_err();
        match err {
            NumericsError::NoConvergence { best, residual } => {
                assert!(residual >= 1.0);
                assert!(best[0].abs() < 3.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
