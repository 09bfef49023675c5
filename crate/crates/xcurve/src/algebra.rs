//! Pointwise cross-curvature linear algebra and the SU(2) closed-form
//! theory.
//!
//! The cross curvature of a 3-metric with invertible Einstein operator is
//! `X = det(E) · g·E⁻¹` with `E = g⁻¹·Ein(g)`. This module provides that
//! closed form, the bijection between positive symmetric bilinear forms and
//! positive cross tensors, and the complete left-invariant theory on SU(2):
//! forward map, Einstein tensor, inverse solver, scale-invariant roundness
//! ratio, orbit iteration, and a finite-difference check of the
//! linearization identity at the normalized round metric.

use crate::numerics::{newton_nd, NewtonConfig, NumericsError};
use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

/// Default determinant floor below which the Einstein operator is treated
/// as singular.
pub const EPS_SINGULAR_DEFAULT: f64 = 1e-12;

/// Residual tolerance (max-norm) required of the SU(2) inverse solver.
pub const SU2_RESIDUAL_TOL: f64 = 1e-10;

/// Errors of the pointwise algebra layer.
#[derive(Clone, Debug, Error)]
pub enum AlgebraError {
    /// `|det E|` fell below the singularity floor.
    #[error("einstein operator is numerically singular: |det E| = {det_abs:.3e} < {tol:.3e}")]
    SingularEinstein {
        /// Absolute determinant of the (1,1) Einstein operator.
        det_abs: f64,
        /// Floor in effect.
        tol: f64,
    },
    /// A matrix that must be positive-definite is not.
    #[error("matrix is not positive-definite")]
    NotPositiveDefinite,
    /// A cross tensor required to be positive has a non-positive eigenvalue.
    #[error("cross tensor is not positive: smallest eigenvalue {eigenvalue:.6e}")]
    NotPositiveCrossTensor {
        /// Offending eigenvalue.
        eigenvalue: f64,
    },
    /// A diagonal metric coefficient is not strictly positive.
    #[error("metric coefficients must be positive, got ({0}, {1}, {2})", rho[0], rho[1], rho[2])]
    NonPositiveMetric {
        /// The rejected coefficients.
        rho: [f64; 3],
    },
    /// The inverse solver stalled; carries the best iterate seen.
    #[error("inverse solve did not converge: residual {residual:.3e}")]
    NoConvergence {
        /// Best iterate found.
        best: [f64; 3],
        /// Its residual max-norm.
        residual: f64,
    },
    /// An orbit iterate's cross curvature stopped being positive-definite.
    #[error("cross curvature lost positivity at iteration step {step}")]
    PositivityLost {
        /// 1-based step index at which positivity failed.
        step: usize,
    },
}

/// Symmetric part of `m`.
pub fn symmetrize(m: &Matrix3<f64>) -> Matrix3<f64> {
    (m + m.transpose()) / 2.0
}

fn is_spd(m: &Matrix3<f64>) -> bool {
    nalgebra::Cholesky::new(symmetrize(m)).is_some()
}

/// Pointwise (1,2) cross tensor `T(A,B) = M(A×B)` in a background oriented
/// orthonormal frame; `M` symmetric.
#[derive(Clone, Copy, Debug)]
pub struct CrossTensor12 {
    /// Matrix of the associated linear map on tangent vectors.
    pub m: Matrix3<f64>,
}

impl CrossTensor12 {
    /// Evaluates `T(a, b)`.
    pub fn apply(&self, a: &Vector3<f64>, b: &Vector3<f64>) -> Vector3<f64> {
        self.m * a.cross(b)
    }

    /// Whether the tensor is positive (its matrix positive-definite).
    pub fn is_positive(&self) -> bool {
        is_spd(&self.m)
    }
}

/// Cross curvature from metric and Einstein tensor:
/// `X = det(E) · g·E⁻¹` with `E = g⁻¹·ein`.
///
/// `eps_singular` is the determinant floor; pass
/// [`EPS_SINGULAR_DEFAULT`] unless a caller has a reason to loosen it.
pub fn cross_from_einstein(
    g: &Matrix3<f64>,
    ein: &Matrix3<f64>,
    eps_singular: f64,
) -> Result<Matrix3<f64>, AlgebraError> {
    let g = symmetrize(g);
    let ein = symmetrize(ein);
    if !is_spd(&g) {
        return Err(AlgebraError::NotPositiveDefinite);
    }
    let g_inv = g.try_inverse().ok_or(AlgebraError::NotPositiveDefinite)?;
    let e = g_inv * ein;
    let det = e.determinant();
    if det.abs() < eps_singular {
        return Err(AlgebraError::SingularEinstein {
            det_abs: det.abs(),
            tol: eps_singular,
        });
    }
    let e_inv = e
        .try_inverse()
        .ok_or(AlgebraError::SingularEinstein {
            det_abs: det.abs(),
            tol: eps_singular,
        })?;
    Ok(symmetrize(&(det * g * e_inv)))
}

/// The bijection from positive symmetric forms to positive cross tensors:
/// `M = √(det Y) · Y⁻¹`, so that `T(A,B) = ⋆_Y (A∧B)`.
pub fn fmap(y: &Matrix3<f64>) -> Result<CrossTensor12, AlgebraError> {
    let y = symmetrize(y);
    if !is_spd(&y) {
        return Err(AlgebraError::NotPositiveDefinite);
    }
    let det = y.determinant();
    let y_inv = y.try_inverse().ok_or(AlgebraError::NotPositiveDefinite)?;
    Ok(CrossTensor12 {
        m: symmetrize(&(det.sqrt() * y_inv)),
    })
}

/// Inverse of [`fmap`]: recovers the unique positive symmetric form from a
/// positive cross tensor by diagonalizing `M`, rescaling the (oriented)
/// eigenbasis so that `T(Vᵢ,Vⱼ)=V_k`, and returning the metric in which
/// that basis is orthonormal.
pub fn fmap_inverse(t: &CrossTensor12) -> Result<Matrix3<f64>, AlgebraError> {
    let eig = nalgebra::SymmetricEigen::new(symmetrize(&t.m));
    let lam = eig.eigenvalues;
    let smallest = lam.iter().cloned().fold(f64::INFINITY, f64::min);
    if smallest <= 0.0 {
        return Err(AlgebraError::NotPositiveCrossTensor {
            eigenvalue: smallest,
        });
    }
    let mut q = eig.eigenvectors;
    if q.determinant() < 0.0 {
        // Keep the eigenframe positively oriented; the rescaled basis must
        // satisfy the right-hand rule for T(Vᵢ,Vⱼ)=V_k to close cyclically.
        let flipped = -q.column(0).into_owned();
        q.set_column(0, &flipped);
    }
    // In the eigenbasis T(qᵢ,qⱼ) = λ_k q_k; the basis Vᵢ = qᵢ·√λᵢ/√det Λ
    // closes the cyclic relations, and the metric making it orthonormal has
    // eigenvalues λⱼλ_k on the same frame.
    let mu = Vector3::new(lam[1] * lam[2], lam[0] * lam[2], lam[0] * lam[1]);
    Ok(symmetrize(&(q * Matrix3::from_diagonal(&mu) * q.transpose())))
}

fn check_rho(rho: &[f64; 3]) -> Result<(), AlgebraError> {
    if rho.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(AlgebraError::NonPositiveMetric { rho: *rho });
    }
    Ok(())
}

/// Diagonal cross curvature of the left-invariant metric `diag(ρ)` on
/// SU(2) in the Milnor frame (closed form). The result may have any signs.
pub fn su2_cross(rho: &[f64; 3]) -> Result<[f64; 3], AlgebraError> {
    check_rho(rho)?;
    let x = |i: usize, j: usize, k: usize| -> f64 {
        let (a, b, c) = (rho[i], rho[j], rho[k]);
        let first = a * a + b * b - 3.0 * c * c - 2.0 * a * b + 2.0 * a * c + 2.0 * b * c;
        let second = a * a - 3.0 * b * b + c * c + 2.0 * a * b - 2.0 * a * c + 2.0 * b * c;
        first * second / (16.0 * a * b * b * c * c)
    };
    Ok([x(0, 1, 2), x(1, 2, 0), x(2, 0, 1)])
}

/// Diagonal Ricci tensor and scalar curvature of `diag(ρ)` on SU(2) in the
/// Milnor frame.
pub fn su2_ricci(rho: &[f64; 3]) -> Result<([f64; 3], f64), AlgebraError> {
    check_rho(rho)?;
    let ric = |i: usize, j: usize, k: usize| -> f64 {
        let d = rho[j] - rho[k];
        (rho[i] * rho[i] - d * d) / (2.0 * rho[j] * rho[k])
    };
    let r = [ric(0, 1, 2), ric(1, 2, 0), ric(2, 0, 1)];
    let s = r[0] / rho[0] + r[1] / rho[1] + r[2] / rho[2];
    Ok((r, s))
}

/// Diagonal Einstein tensor `Ric − (S/2)·g` of `diag(ρ)` on SU(2),
/// returned as a full matrix for feeding [`cross_from_einstein`].
pub fn su2_einstein(rho: &[f64; 3]) -> Result<Matrix3<f64>, AlgebraError> {
    let (ric, s) = su2_ricci(rho)?;
    let diag = Vector3::new(
        ric[0] - s / 2.0 * rho[0],
        ric[1] - s / 2.0 * rho[1],
        ric[2] - s / 2.0 * rho[2],
    );
    Ok(Matrix3::from_diagonal(&diag))
}

/// Ratio of the largest to the smallest coefficient; 1 exactly on round
/// metrics and strictly larger otherwise.
pub fn lambda_ratio(m: &[f64; 3]) -> Result<f64, AlgebraError> {
    check_rho(m)?;
    let max = m.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = m.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(max / min)
}

/// Solves `su2_cross(ρ) = y` for the unique positive `ρ` by damped Newton
/// from the round initial guess, with a short homotopy fallback from the
/// round case when the direct solve stalls.
pub fn su2_solve(y: &[f64; 3]) -> Result<[f64; 3], AlgebraError> {
    if y.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(AlgebraError::NonPositiveMetric { rho: *y });
    }

    let newton_for = |target: [f64; 3], start: [f64; 3]| -> Result<[f64; 3], AlgebraError> {
        let mut residual = |x: &[f64]| -> Result<Vec<f64>, NumericsError> {
            let rho = [x[0], x[1], x[2]];
            if rho.iter().any(|&r| !(r > 0.0)) {
                // Signals the line search to backtrack into the domain.
                return Err(NumericsError::NoConvergence {
                    best: x.to_vec(),
                    residual: f64::INFINITY,
                });
            }
            let x3 = su2_cross(&rho).expect("positive rho checked above");
            Ok(vec![x3[0] - target[0], x3[1] - target[1], x3[2] - target[2]])
        };
        let cfg = NewtonConfig {
            tol: 1e-12,
            max_iter: 50,
            fd_step: 1e-6,
            ..NewtonConfig::default()
        };
        match newton_nd(&mut residual, &start, &cfg) {
            Ok((x, _)) => Ok([x[0], x[1], x[2]]),
            Err(NumericsError::NoConvergence { best, residual }) => {
                if residual <= SU2_RESIDUAL_TOL && best.len() == 3 {
                    Ok([best[0], best[1], best[2]])
                } else {
                    Err(AlgebraError::NoConvergence {
                        best: [best[0], best[1], best[2]],
                        residual,
                    })
                }
            }
            Err(_) => Err(AlgebraError::NoConvergence {
                best: start,
                residual: f64::INFINITY,
            }),
        }
    };

    // Round guess: exact when y is round, by the scaling law.
    let gmean = (y[0] * y[1] * y[2]).powf(1.0 / 3.0);
    let round = [1.0 / (16.0 * gmean); 3];
    match newton_for(*y, round) {
        Ok(rho) => Ok(rho),
        Err(direct_err) => {
            // Geometric homotopy from the round target to y; each stage is a
            // mild deformation so Newton tracks the unique branch.
            let mut rho = round;
            for stage in 1..=8 {
                let s = stage as f64 / 8.0;
                let target = [
                    gmean.powf(1.0 - s) * y[0].powf(s),
                    gmean.powf(1.0 - s) * y[1].powf(s),
                    gmean.powf(1.0 - s) * y[2].powf(s),
                ];
                match newton_for(target, rho) {
                    Ok(next) => rho = next,
                    Err(_) => return Err(direct_err),
                }
            }
            Ok(rho)
        }
    }
}

/// Orbit of the map `ρ ↦ su2_cross(ρ)`, optionally renormalized to unit
/// geometric mean after every step. The returned sequence starts with the
/// input, so it has `n+1` entries.
pub fn su2_iterate(
    rho: &[f64; 3],
    n: usize,
    normalize: bool,
) -> Result<Vec<[f64; 3]>, AlgebraError> {
    check_rho(rho)?;
    let mut orbit = Vec::with_capacity(n + 1);
    let mut current = *rho;
    orbit.push(current);
    for step in 1..=n {
        let image = su2_cross(&current)?;
        if image.iter().any(|&v| !(v > 0.0)) {
            return Err(AlgebraError::PositivityLost { step });
        }
        current = if normalize {
            let gm = (image[0] * image[1] * image[2]).powf(1.0 / 3.0);
            [image[0] / gm, image[1] / gm, image[2] / gm]
        } else {
            image
        };
        orbit.push(current);
    }
    Ok(orbit)
}

/// Finite-difference check of the linearization identity
/// `DX(h) = DRic(h) − h` at the fixed-point round metric `ρ = (¼,¼,¼)`:
/// returns `‖D_h X − (D_h Ric − h)‖∞` with central differences of the
/// given step size.
pub fn su2_linearization_check(h: &[f64; 3], step: f64) -> f64 {
    assert!(
        (1e-7..=1e-3).contains(&step),
        "difference step {step} outside the supported range"
    );
    let base = [0.25, 0.25, 0.25];
    let at = |s: f64| -> [f64; 3] {
        [base[0] + s * h[0], base[1] + s * h[1], base[2] + s * h[2]]
    };
    let xp = su2_cross(&at(step)).expect("perturbed metric stays positive");
    let xm = su2_cross(&at(-step)).expect("perturbed metric stays positive");
    let (rp, _) = su2_ricci(&at(step)).expect("perturbed metric stays positive");
    let (rm, _) = su2_ricci(&at(-step)).expect("perturbed metric stays positive");
    let mut worst = 0.0f64;
    for i in 0..3 {
        let dx = (xp[i] - xm[i]) / (2.0 * step);
        let dric = (rp[i] - rm[i]) / (2.0 * step);
        worst = worst.max((dx - (dric - h[i])).abs());
    }
    worst
}

/// Sign pattern of a triple as a compact string over `{+, 0, -}`.
pub fn sign_signature(x: &[f64; 3]) -> String {
    x.iter()
        .map(|&v| {
            if v > 0.0 {
                '+'
            } else if v < 0.0 {
                '-'
            } else {
                '0'
            }
        })
        .collect()
}
