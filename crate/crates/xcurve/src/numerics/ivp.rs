//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)) with
//! dense output by cubic Hermite interpolation between accepted steps.
//!
//! The solver stores the state and its derivative at every accepted step, so
//! downstream code can evaluate the solution (and locate level crossings)
//! anywhere in the integration interval without re-integrating. Cubic
//! Hermite interpolation is fourth-order accurate inside an accepted step,
//! which matches the accuracy budget of the shooting pipelines.

use super::{IntegratorConfig, NumericsError};

/// Dense solution of an initial value problem: states and derivatives at the
/// accepted steps, interpolated with cubic Hermite polynomials in between.
#[derive(Clone, Debug)]
pub struct Dense<const N: usize> {
    /// Strictly increasing accepted times, including both endpoints.
    pub ts: Vec<f64>,
    /// States at `ts`.
    pub ys: Vec<[f64; N]>,
    /// Right-hand-side values at `ts`.
    pub fs: Vec<[f64; N]>,
}

impl<const N: usize> Dense<N> {
    /// Builds a dense solution directly from node data. The nodes must be
    /// strictly increasing and the three arrays equally long.
    pub fn from_nodes(ts: Vec<f64>, ys: Vec<[f64; N]>, fs: Vec<[f64; N]>) -> Self {
        assert_eq!(ts.len(), ys.len());
        assert_eq!(ts.len(), fs.len());
        assert!(ts.windows(2).all(|w| w[1] > w[0]), "nodes must increase");
        Self { ts, ys, fs }
    }

    /// First node time.
    pub fn t0(&self) -> f64 {
        self.ts[0]
    }

    /// Last node time.
    pub fn t1(&self) -> f64 {
        *self.ts.last().expect("dense solution has nodes")
    }

    fn segment(&self, t: f64) -> usize {
        // Index i with ts[i] <= t <= ts[i+1], clamped to the domain.
        let n = self.ts.len();
        if t <= self.ts[0] {
            return 0;
        }
        if t >= self.ts[n - 1] {
            return n - 2;
        }
        let i = self.ts.partition_point(|&x| x <= t);
        i.saturating_sub(1).min(n - 2)
    }

    /// Evaluates the interpolant at `t` (clamped to the node range).
    pub fn eval(&self, t: f64) -> [f64; N] {
        let i = self.segment(t);
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let s = ((t - t0) / h).clamp(0.0, 1.0);
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = h00 * self.ys[i][k]
                + h10 * h * self.fs[i][k]
                + h01 * self.ys[i + 1][k]
                + h11 * h * self.fs[i + 1][k];
        }
        out
    }

    /// Evaluates the derivative of the interpolant at `t`.
    pub fn eval_deriv(&self, t: f64) -> [f64; N] {
        let i = self.segment(t);
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let s = ((t - t0) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        let mut out = [0.0; N];
        for k in 0..N {
            out[k] = d00 * self.ys[i][k]
                + d10 * self.fs[i][k]
                + d01 * self.ys[i + 1][k]
                + d11 * self.fs[i + 1][k];
        }
        out
    }

    /// State at the final node.
    pub fn last(&self) -> [f64; N] {
        *self.ys.last().expect("dense solution has nodes")
    }

    /// First time (scanning forward) at which component `k` crosses `level`,
    /// located by bisection on the Hermite interpolant.
    pub fn first_crossing(&self, k: usize, level: f64) -> Option<f64> {
        for i in 0..self.ts.len() - 1 {
            let a = self.ys[i][k] - level;
            let b = self.ys[i + 1][k] - level;
            if a == 0.0 {
                return Some(self.ts[i]);
            }
            if a * b <= 0.0 {
                let (mut lo, mut hi) = (self.ts[i], self.ts[i + 1]);
                let mut flo = a;
                for _ in 0..128 {
                    let mid = 0.5 * (lo + hi);
                    let fm = self.eval(mid)[k] - level;
                    if flo * fm <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                    if hi - lo <= f64::EPSILON * (1.0 + mid.abs()) {
                        break;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
        }
        None
    }

    /// Appends another dense solution that starts where this one ends. The
    /// shared node is kept once (from `self`).
    pub fn append(&mut self, other: &Dense<N>) {
        assert!(
            (other.ts[0] - self.t1()).abs() <= 1e-12 * (1.0 + self.t1().abs()),
            "dense pieces must share their junction node"
        );
        self.ts.extend_from_slice(&other.ts[1..]);
        self.ys.extend_from_slice(&other.ys[1..]);
        self.fs.extend_from_slice(&other.fs[1..]);
    }
}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights (error estimator).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Integrates `y' = rhs(t, y)` from `t0` to `t1 > t0` with the adaptive
/// Dormand-Prince 5(4) pair, recording every accepted step for dense output.
pub fn integrate_ivp<const N: usize>(
    rhs: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    t1: f64,
    y0: [f64; N],
    cfg: &IntegratorConfig,
) -> Result<Dense<N>, NumericsError> {
    cfg.validate()?;
    assert!(t1 >= t0, "integration runs forward in time");
    let mut ts = vec![t0];
    let mut ys = vec![y0];
    let mut k1 = rhs(t0, &y0);
    let mut fs = vec![k1];
    if t1 == t0 {
        return Ok(Dense { ts, ys, fs });
    }

    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut h = (0.01 * span).min(cfg.max_step);

    let axpy = |y: &[f64; N], h: f64, coeffs: &[(f64, &[f64; N])]| -> [f64; N] {
        let mut out = *y;
        for (c, k) in coeffs {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
        out
    };

    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        let y2 = axpy(&y, h, &[(A21, &k1)]);
        let k2 = rhs(t + C2 * h, &y2);
        let y3 = axpy(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = rhs(t + C3 * h, &y3);
        let y4 = axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = rhs(t + C4 * h, &y4);
        let y5 = axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = rhs(t + C5 * h, &y5);
        let y6 = axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = rhs(t + h, &y6);
        let ynew = axpy(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = rhs(t + h, &ynew);

        // Scaled RMS error of the embedded 4th-order solution.
        let mut err2 = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i]
                    + E3 * k3[i]
                    + E4 * k4[i]
                    + E5 * k5[i]
                    + E6 * k6[i]
                    + E7 * k7[i]);
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(ynew[i].abs());
            err2 += (e / scale) * (e / scale);
        }
        let err = (err2 / N as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = ynew;
            k1 = k7; // first-same-as-last
            ts.push(t);
            ys.push(y);
            fs.push(k1);
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(cfg.max_step);
        if t < t1 && h < cfg.min_step {
            return Err(NumericsError::StepUnderflow { t, step: h });
        }
    }

    Ok(Dense { ts, ys, fs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(tol: f64) -> IntegratorConfig {
        IntegratorConfig {
            abs_tol: tol,
            rel_tol: tol,
            max_step: 0.5,
            min_step: 1e-14,
            ..IntegratorConfig::default()
        }
    }

    #[test]
    fn exponential_growth_matches_closed_form() {
        let sol = integrate_ivp(&|_, y: &[f64; 1]| [y[0]], 0.0, 1.0, [1.0], &cfg(1e-12)).unwrap();
        assert_relative_eq!(sol.last()[0], 1.0f64.exp(), max_relative = 1e-10);
    }

    #[test]
    fn harmonic_oscillator_conserves_phase() {
        let sol = integrate_ivp(
            &|_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            std::f64::consts::TAU,
            [1.0, 0.0],
            &cfg(1e-12),
        )
        .unwrap();
        let end = sol.last();
        assert_relative_eq!(end[0], 1.0, epsilon = 1e-9);
        assert!(end[1].abs() < 1e-9);
    }

    #[test]
    fn dense_output_is_accurate_between_steps() {
        let sol = integrate_ivp(
            &|t: f64, _: &[f64; 1]| [t.cos()],
            0.0,
            3.0,
            [0.0],
            &cfg(1e-12),
        )
        .unwrap();
        // Dense output is a fourth-order interpolant between accepted steps,
        // so it is less accurate than the node values themselves.
        for i in 0..=300 {
            let t = 3.0 * i as f64 / 300.0;
            assert_relative_eq!(sol.eval(t)[0], t.sin(), epsilon = 1e-7);
        }
    }

    #[test]
    fn tightening_tolerance_reduces_error() {
        let errs: Vec<f64> = [1e-6, 1e-9, 1e-12]
            .iter()
            .map(|&tol| {
                let sol =
                    integrate_ivp(&|_, y: &[f64; 1]| [y[0]], 0.0, 2.0, [1.0], &cfg(tol)).unwrap();
                (sol.last()[0] - 2.0f64.exp()).abs()
            })
            .collect();
        assert!(errs[1] < errs[0]);
        assert!(errs[2] <= errs[1] + 1e-13);
    }

    #[test]
    fn zero_rhs_is_integrated_exactly() {
        let sol = integrate_ivp(&|_, _: &[f64; 2]| [0.0, 0.0], 0.0, 1.0, [3.0, -4.0], &cfg(1e-10))
            .unwrap();
        assert_eq!(sol.last(), [3.0, -4.0]);
    }

    #[test]
    fn step_underflow_is_reported() {
        // Blow-up at t = 1 forces the controller below min_step.
        let res = integrate_ivp(
            &|t: f64, y: &[f64; 1]| [y[0] / (1.0 - t)],
            0.0,
            1.0,
            [1.0],
            &IntegratorConfig {
                abs_tol: 1e-10,
                rel_tol: 1e-10,
                max_step: 0.5,
                min_step: 1e-10,
                ..IntegratorConfig::default()
            },
        );
        assert!(matches!(res, Err(NumericsError::StepUnderflow { .. })));
    }

    #[test]
    fn first_crossing_locates_roots() {
        let sol = integrate_ivp(
            &|t: f64, _: &[f64; 1]| [t.cos()],
            0.0,
            4.0,
            [0.0],
            &cfg(1e-12),
        )
        .unwrap();
        // sin(t) crosses 0.5 first at t = pi/6.
        let t = sol.first_crossing(0, 0.5).unwrap();
        assert_relative_eq!(t, std::f64::consts::PI / 6.0, epsilon = 1e-8);
    }
}
