//! Predictor-corrector continuation of a zero along a homotopy parameter.
//!
//! Several solves in this crate deform an easy problem into the target one:
//! a zero `z(p)` of `F(p, z) = 0` is tracked from `p0` to `p1` with linear
//! prediction and damped Newton correction, shrinking the parameter step
//! where the path bends and growing it again on easy stretches.

use super::newton::{newton_nd, NewtonConfig};
use super::NumericsError;

/// Tuning knobs for [`continue_zero`].
#[derive(Clone, Copy, Debug)]
pub struct ContinuationConfig {
    /// Initial parameter step.
    pub dp0: f64,
    /// Smallest step tried before the path is declared lost.
    pub dp_min: f64,
    /// Largest step allowed.
    pub dp_max: f64,
    /// Corrector settings.
    pub newton: NewtonConfig,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            dp0: 0.05,
            dp_min: 1e-5,
            dp_max: 0.25,
            newton: NewtonConfig::default(),
        }
    }
}

/// One accepted point on the continuation path.
#[derive(Clone, Debug)]
pub struct PathPoint {
    /// Homotopy parameter.
    pub p: f64,
    /// The tracked zero at this parameter.
    pub z: Vec<f64>,
    /// Caller-supplied scalar recorded at this point (for later certificates).
    pub monitor: f64,
}

/// Tracks the zero of `f(p, .)` from `(p0, z0)` to `p1`. The starting point
/// is polished first; the returned path includes both endpoints. Fails with
/// [`NumericsError::PathLost`] when the corrector cannot recover even at the
/// smallest step.
pub fn continue_zero(
    f: &mut dyn FnMut(f64, &[f64]) -> Result<Vec<f64>, NumericsError>,
    monitor: &mut dyn FnMut(f64, &[f64]) -> f64,
    p0: f64,
    p1: f64,
    z0: &[f64],
    cfg: &ContinuationConfig,
) -> Result<Vec<PathPoint>, NumericsError> {
    assert!(p1 != p0, "empty homotopy interval");
    let span = p1 - p0;

    let polish = |p: f64, guess: &[f64], f: &mut dyn FnMut(f64, &[f64]) -> Result<Vec<f64>, NumericsError>| {
        let mut at_p = |z: &[f64]| f(p, z);
        newton_nd(&mut at_p, guess, &cfg.newton)
    };

    let (z_start, _) = polish(p0, z0, f)?;
    let mut path = vec![PathPoint {
        p: p0,
        z: z_start.clone(),
        monitor: monitor(p0, &z_start),
    }];

    let mut dp = cfg.dp0.min(cfg.dp_max).min(span.abs());
    while (path.last().unwrap().p - p1).abs() > 0.0 {
        let cur = path.last().unwrap().clone();
        let remaining = p1 - cur.p;
        let step = remaining.signum() * dp.min(remaining.abs());
        let p_next = if step.abs() >= remaining.abs() {
            p1
        } else {
            cur.p + step
        };

        // Linear prediction from the last two accepted points.
        let guess: Vec<f64> = if path.len() >= 2 {
            let prev = &path[path.len() - 2];
            let ratio = (p_next - cur.p) / (cur.p - prev.p);
            cur.z
                .iter()
                .zip(&prev.z)
                .map(|(a, b)| a + ratio * (a - b))
                .collect()
        } else {
            cur.z.clone()
        };

        match polish(p_next, &guess, f) {
            Ok((z, _)) => {
                let m = monitor(p_next, &z);
                path.push(PathPoint { p: p_next, z, monitor: m });
                dp = (dp * 1.5).min(cfg.dp_max);
            }
            Err(_) => {
                dp *= 0.5;
                if dp < cfg.dp_min {
                    return Err(NumericsError::PathLost {
                        p: p_next,
                        z: cur.z.clone(),
                    });
                }
            }
        }
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn follows_scalar_root() {
        // z(p) = sqrt(1 + p).
        let mut f = |p: f64, z: &[f64]| -> Result<Vec<f64>, NumericsError> {
            Ok(vec![z[0] * z[0] - (1.0 + p)])
        };
        let mut mon = |_p: f64, z: &[f64]| z[0];
        let path = continue_zero(
            &mut f,
            &mut mon,
            0.0,
            1.0,
            &[1.1],
            &ContinuationConfig::default(),
        )
        .unwrap();
        let end = path.last().unwrap();
        assert_relative_eq!(end.p, 1.0);
        assert_relative_eq!(end.z[0], std::f64::consts::SQRT_2, epsilon = 1e-10);
        assert!(path.len() >= 3);
        assert_relative_eq!(path[0].monitor, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn follows_rotating_planar_root() {
        // z(p) = (cos pi p, sin pi p).
        let mut f = |p: f64, z: &[f64]| -> Result<Vec<f64>, NumericsError> {
            let th = std::f64::consts::PI * p;
            Ok(vec![z[0] - th.cos(), z[1] - th.sin()])
        };
        let mut mon = |_: f64, _: &[f64]| 0.0;
        let path = continue_zero(
            &mut f,
            &mut mon,
            0.0,
            1.0,
            &[1.0, 0.0],
            &ContinuationConfig::default(),
        )
        .unwrap();
        let end = path.last().unwrap();
        assert_relative_eq!(end.z[0], -1.0, epsilon = 1e-10);
        assert_relative_eq!(end.z[1], 0.0, epsilon = 1e-8);
    }

    #[test]
    fn reports_lost_path_at_fold() {
        // The root z = sqrt(0.5 - p) ceases to exist at p = 0.5.
        let mut f = |p: f64, z: &[f64]| -> Result<Vec<f64>, NumericsError> {
            Ok(vec![z[0] * z[0] - (0.5 - p)])
        };
        let mut mon = |_: f64, _: &[f64]| 0.0;
        let err = continue_zero(
            &mut f,
            &mut mon,
            0.0,
            1.0,
            &[0.7],
            &ContinuationConfig::default(),
        )
        .unwrap_err();
        match err {
            NumericsError::PathLost { p, .. } => assert!(p > 0.45 && p < 1.0),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
