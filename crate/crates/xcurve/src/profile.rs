//! Radial profiles of invariant tensor fields.
//!
//! A profile is a scalar function of the radial coordinate on a closed
//! interval, either one of the built-in analytic families or a clamped
//! cubic spline through user samples. Near the singular endpoints the
//! solvers never evaluate raw ratios such as `y'/y - 1/t` directly;
//! instead every profile exposes fifth-order endpoint *jets* (Taylor data
//! in the inward coordinate) from which cancellation-free forms are built.
//! Analytic jets are exact; sampled jets are fitted from the raw samples
//! nearest the endpoint.

use std::f64::consts::PI;
use thiserror::Error;

/// Validation failure of profile data.
#[derive(Clone, Debug, Error)]
pub enum ProfileError {
    /// One or more structural defects; each entry names a violated condition.
    #[error("invalid profile: {}", defects.join("; "))]
    Invalid {
        /// Human-readable defect descriptions.
        defects: Vec<String>,
    },
}

fn invalid(msg: impl Into<String>) -> ProfileError {
    ProfileError::Invalid {
        defects: vec![msg.into()],
    }
}

/// Which end of the radial interval a boundary quantity refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    /// Smaller coordinate value.
    Left,
    /// Larger coordinate value.
    Right,
}

impl Endpoint {
    /// The opposite end.
    pub fn flip(self) -> Endpoint {
        match self {
            Endpoint::Left => Endpoint::Right,
            Endpoint::Right => Endpoint::Left,
        }
    }
}

/// Cubic spline interpolant with prescribed first derivatives at both ends.
///
/// Clamping matters here: the boundary conditions of the reduced problems
/// pin the end slopes exactly, and the solvers rely on the interpolant
/// honoring them to machine precision rather than to spline-order accuracy.
#[derive(Clone, Debug)]
pub struct ClampedSpline {
    ts: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives (moments) at the nodes.
    ms: Vec<f64>,
}

impl ClampedSpline {
    /// Builds the spline through `(ts, ys)` with end slopes `d0`, `d1`.
    pub fn new(ts: Vec<f64>, ys: Vec<f64>, d0: f64, d1: f64) -> Result<Self, ProfileError> {
        let n = ts.len();
        if n < 3 {
            return Err(invalid(format!("need at least 3 sample nodes, got {n}")));
        }
        if ys.len() != n {
            return Err(invalid(format!(
                "{} sample values for {} nodes",
                ys.len(),
                n
            )));
        }
        if ts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("sample grid is not strictly increasing"));
        }
        if ts.iter().chain(ys.iter()).any(|v| !v.is_finite()) || !d0.is_finite() || !d1.is_finite()
        {
            return Err(invalid("non-finite sample data"));
        }

        // Tridiagonal moment system, clamped rows at both ends, solved by
        // the Thomas algorithm (diagonally dominant, no pivoting needed).
        let h: Vec<f64> = ts.windows(2).map(|w| w[1] - w[0]).collect();
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n - 1];
        let mut lower = vec![0.0; n - 1];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0 * h[0];
        upper[0] = h[0];
        rhs[0] = 6.0 * ((ys[1] - ys[0]) / h[0] - d0);
        for i in 1..n - 1 {
            lower[i - 1] = h[i - 1];
            diag[i] = 2.0 * (h[i - 1] + h[i]);
            upper[i] = h[i];
            rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
        }
        lower[n - 2] = h[n - 2];
        diag[n - 1] = 2.0 * h[n - 2];
        rhs[n - 1] = 6.0 * (d1 - (ys[n - 1] - ys[n - 2]) / h[n - 2]);

        for i in 1..n {
            let w = lower[i - 1] / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut ms = vec![0.0; n];
        ms[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            ms[i] = (rhs[i] - upper[i] * ms[i + 1]) / diag[i];
        }

        Ok(Self { ts, ys, ms })
    }

    /// Index of the segment containing `t` (clamped to the domain).
    fn segment(&self, t: f64) -> usize {
        match self
            .ts
            .binary_search_by(|node| node.partial_cmp(&t).unwrap())
        {
            Ok(i) => i.min(self.ts.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.ts.len() - 2),
        }
    }

    /// Spline value at `t` (arguments outside the domain are clamped).
    pub fn value(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.ts[i + 1] - self.ts[i];
        let x = (t.clamp(self.ts[0], *self.ts.last().unwrap()) - self.ts[i]).clamp(0.0, h);
        let b = (self.ys[i + 1] - self.ys[i]) / h - h * (2.0 * self.ms[i] + self.ms[i + 1]) / 6.0;
        self.ys[i]
            + b * x
            + self.ms[i] * x * x / 2.0
            + (self.ms[i + 1] - self.ms[i]) * x * x * x / (6.0 * h)
    }

    /// First derivative at `t`.
    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.ts[i + 1] - self.ts[i];
        let x = (t.clamp(self.ts[0], *self.ts.last().unwrap()) - self.ts[i]).clamp(0.0, h);
        let b = (self.ys[i + 1] - self.ys[i]) / h - h * (2.0 * self.ms[i] + self.ms[i + 1]) / 6.0;
        b + self.ms[i] * x + (self.ms[i + 1] - self.ms[i]) * x * x / (2.0 * h)
    }

    /// Second derivative at `t`.
    pub fn second(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let h = self.ts[i + 1] - self.ts[i];
        let x = (t.clamp(self.ts[0], *self.ts.last().unwrap()) - self.ts[i]).clamp(0.0, h);
        self.ms[i] + (self.ms[i + 1] - self.ms[i]) * x / h
    }

    /// Exact integrals of the spline from the first node to every node:
    /// per segment the cubic integrates to the corrected trapezoid
    /// `h (y_i + y_{i+1})/2 - h³ (m_i + m_{i+1})/24`.
    pub fn prefix_integrals(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.ts.len());
        out.push(0.0);
        let mut acc = 0.0;
        for i in 0..self.ts.len() - 1 {
            let h = self.ts[i + 1] - self.ts[i];
            acc += 0.5 * h * (self.ys[i] + self.ys[i + 1])
                - h * h * h * (self.ms[i] + self.ms[i + 1]) / 24.0;
            out.push(acc);
        }
        out
    }

    /// Sample nodes.
    pub fn nodes(&self) -> &[f64] {
        &self.ts
    }

    /// Sample values.
    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    /// Domain of definition.
    pub fn domain(&self) -> (f64, f64) {
        (self.ts[0], *self.ts.last().unwrap())
    }
}

/// Built-in analytic profile families (the exact-solution test cases).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticKind {
    /// `(2/π) cos(πr/2)` on `[-1, 1]`.
    CosRound,
    /// `(2/π) sin(πr/2)` on `[0, 1]`.
    SinHalf,
    /// `(2/π) cos(πr/2)` on `[0, 1]`.
    CosHalf,
}

impl AnalyticKind {
    fn domain(self) -> (f64, f64) {
        match self {
            AnalyticKind::CosRound => (-1.0, 1.0),
            AnalyticKind::SinHalf | AnalyticKind::CosHalf => (0.0, 1.0),
        }
    }
}

/// A radial profile: analytic family member or spline through samples.
#[derive(Clone, Debug)]
pub enum Radial {
    /// Closed-form profile, optionally rescaled by a positive factor.
    Analytic {
        /// Which family member.
        kind: AnalyticKind,
        /// Multiplicative amplitude (1 for the normalized profiles).
        scale: f64,
    },
    /// Clamped-spline interpolant of user samples.
    Sampled(ClampedSpline),
}

impl Radial {
    /// Profile value at `r`.
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Radial::Analytic { kind, scale } => {
                scale
                    * match kind {
                        AnalyticKind::CosRound | AnalyticKind::CosHalf => {
                            (2.0 / PI) * (PI * r / 2.0).cos()
                        }
                        AnalyticKind::SinHalf => (2.0 / PI) * (PI * r / 2.0).sin(),
                    }
            }
            Radial::Sampled(sp) => sp.value(r),
        }
    }

    /// First derivative at `r`.
    pub fn deriv(&self, r: f64) -> f64 {
        match self {
            Radial::Analytic { kind, scale } => {
                scale
                    * match kind {
                        AnalyticKind::CosRound | AnalyticKind::CosHalf => -(PI * r / 2.0).sin(),
                        AnalyticKind::SinHalf => (PI * r / 2.0).cos(),
                    }
            }
            Radial::Sampled(sp) => sp.deriv(r),
        }
    }

    /// Second derivative at `r`.
    pub fn second(&self, r: f64) -> f64 {
        match self {
            Radial::Analytic { kind, scale } => {
                scale
                    * match kind {
                        AnalyticKind::CosRound | AnalyticKind::CosHalf => {
                            -(PI / 2.0) * (PI * r / 2.0).cos()
                        }
                        AnalyticKind::SinHalf => -(PI / 2.0) * (PI * r / 2.0).sin(),
                    }
            }
            Radial::Sampled(sp) => sp.second(r),
        }
    }

    /// Domain of definition.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Radial::Analytic { kind, .. } => kind.domain(),
            Radial::Sampled(sp) => sp.domain(),
        }
    }

    /// Fifth-order odd jet at an endpoint where the profile vanishes
    /// linearly; `c1` is the exact inward slope there (enforced upstream).
    pub fn odd_jet(&self, at: Endpoint, c1: f64) -> OddJet {
        match self {
            Radial::Analytic { kind, scale } => {
                // All three families reduce to (2s/π) sin(πτ/2) in the inward
                // coordinate τ at their vanishing endpoints.
                debug_assert!(
                    matches!(
                        (kind, at),
                        (AnalyticKind::CosRound, _)
                            | (AnalyticKind::SinHalf, Endpoint::Left)
                            | (AnalyticKind::CosHalf, Endpoint::Right)
                    ),
                    "analytic profile is not odd at this endpoint"
                );
                OddJet {
                    c1: *scale,
                    c3: -scale * PI * PI / 24.0,
                    c5: scale * PI.powi(4) / 1920.0,
                }
            }
            Radial::Sampled(sp) => OddJet::fit(sp.nodes(), sp.values(), at, c1),
        }
    }

    /// Fifth-order even jet at an endpoint where the profile is positive
    /// with vanishing inward slope.
    pub fn even_jet(&self, at: Endpoint) -> EvenJet {
        match self {
            Radial::Analytic { kind, scale } => {
                debug_assert!(
                    matches!(
                        (kind, at),
                        (AnalyticKind::SinHalf, Endpoint::Right)
                            | (AnalyticKind::CosHalf, Endpoint::Left)
                    ),
                    "analytic profile is not even at this endpoint"
                );
                EvenJet {
                    a0: scale * 2.0 / PI,
                    a2: -scale * PI / 4.0,
                    a4: scale * PI.powi(3) / 192.0,
                }
            }
            Radial::Sampled(sp) => EvenJet::fit(sp.nodes(), sp.values(), at),
        }
    }

    /// Uniform samples `(rs, ys)` over the domain, endpoints included.
    pub fn sample_uniform(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = self.domain();
        let n = n.max(2);
        let rs: Vec<f64> = (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect();
        let ys = rs.iter().map(|&r| self.value(r)).collect();
        (rs, ys)
    }
}

/// Odd endpoint Taylor data `y(τ) ≈ c1 τ + c3 τ³ + c5 τ⁵` in the inward
/// coordinate τ (distance from the endpoint into the domain).
#[derive(Clone, Copy, Debug)]
pub struct OddJet {
    /// Inward slope at the endpoint.
    pub c1: f64,
    /// Cubic coefficient.
    pub c3: f64,
    /// Quintic coefficient.
    pub c5: f64,
}

impl OddJet {
    /// Fits `(c3, c5)` from raw samples near the endpoint, taking `c1` as
    /// exact: a two-node collocation of `(y - c1 τ)/τ³ = c3 + c5 τ²`.
    pub fn fit(ts: &[f64], ys: &[f64], at: Endpoint, c1: f64) -> OddJet {
        let n = ts.len();
        assert!(n >= 8, "jet fit needs at least 8 samples, got {n}");
        let node = |j: usize| -> (f64, f64) {
            match at {
                Endpoint::Left => (ts[j] - ts[0], ys[j]),
                Endpoint::Right => (ts[n - 1] - ts[n - 1 - j], ys[n - 1 - j]),
            }
        };
        // Skip the nodes closest to the endpoint: there the defect y - c1 τ
        // is at roundoff level and the quotient by τ³ amplifies it.
        let (ta, ya) = node(3);
        let (tb, yb) = node(6);
        let ga = (ya - c1 * ta) / (ta * ta * ta);
        let gb = (yb - c1 * tb) / (tb * tb * tb);
        let c5 = (gb - ga) / (tb * tb - ta * ta);
        let c3 = ga - c5 * ta * ta;
        OddJet { c1, c3, c5 }
    }

    /// Jet value at inward distance `t`.
    pub fn value(&self, t: f64) -> f64 {
        t * (self.c1 + t * t * (self.c3 + self.c5 * t * t))
    }

    /// Jet derivative at inward distance `t`.
    pub fn deriv(&self, t: f64) -> f64 {
        self.c1 + t * t * (3.0 * self.c3 + 5.0 * self.c5 * t * t)
    }
}

/// Even endpoint Taylor data `y(τ) ≈ a0 + a2 τ² + a4 τ⁴` in the inward
/// coordinate τ.
#[derive(Clone, Copy, Debug)]
pub struct EvenJet {
    /// Endpoint value.
    pub a0: f64,
    /// Quadratic coefficient.
    pub a2: f64,
    /// Quartic coefficient.
    pub a4: f64,
}

impl EvenJet {
    /// Fits `(a2, a4)` from raw samples near the endpoint; `a0` is read off
    /// the endpoint sample exactly.
    pub fn fit(ts: &[f64], ys: &[f64], at: Endpoint) -> EvenJet {
        let n = ts.len();
        assert!(n >= 8, "jet fit needs at least 8 samples, got {n}");
        let node = |j: usize| -> (f64, f64) {
            match at {
                Endpoint::Left => (ts[j] - ts[0], ys[j]),
                Endpoint::Right => (ts[n - 1] - ts[n - 1 - j], ys[n - 1 - j]),
            }
        };
        let a0 = node(0).1;
        let (ta, ya) = node(3);
        let (tb, yb) = node(6);
        let ga = (ya - a0) / (ta * ta);
        let gb = (yb - a0) / (tb * tb);
        let a4 = (gb - ga) / (tb * tb - ta * ta);
        let a2 = ga - a4 * ta * ta;
        EvenJet { a0, a2, a4 }
    }

    /// Jet value at inward distance `t`.
    pub fn value(&self, t: f64) -> f64 {
        self.a0 + t * t * (self.a2 + self.a4 * t * t)
    }

    /// Jet derivative at inward distance `t`.
    pub fn deriv(&self, t: f64) -> f64 {
        t * (2.0 * self.a2 + 4.0 * self.a4 * t * t)
    }
}

/// One-sided fourth-order endpoint slope from raw samples, by
/// differentiating the Newton interpolating polynomial through the five
/// nodes nearest the endpoint.
pub(crate) fn endpoint_slope(ts: &[f64], ys: &[f64], at: Endpoint) -> f64 {
    let n = ts.len();
    let idx: Vec<usize> = match at {
        Endpoint::Left => (0..5.min(n)).collect(),
        Endpoint::Right => (0..5.min(n)).map(|k| n - 1 - k).collect(),
    };
    let t: Vec<f64> = idx.iter().map(|&i| ts[i]).collect();
    let mut dd: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
    // Divided-difference table in place: dd[k] becomes f[t_0..t_k].
    for level in 1..t.len() {
        for k in (level..t.len()).rev() {
            dd[k] = (dd[k] - dd[k - 1]) / (t[k] - t[k - level]);
        }
    }
    // p'(t_0) = sum_k dd[k] * prod_{j<k-1} (t_0 - t_j) ... telescoped.
    let mut slope = 0.0;
    let mut prod = 1.0;
    for k in 1..t.len() {
        slope += dd[k] * prod;
        prod *= t[0] - t[k];
    }
    slope
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn spline_reproduces_cubics_exactly() {
        let p = |t: f64| 2.0 - t + 3.0 * t * t - 0.5 * t * t * t;
        let dp = |t: f64| -1.0 + 6.0 * t - 1.5 * t * t;
        let ts: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| p(t)).collect();
        let sp = ClampedSpline::new(ts, ys, dp(0.0), dp(1.0)).unwrap();
        for i in 0..=50 {
            let t = i as f64 / 50.0;
            assert_abs_diff_eq!(sp.value(t), p(t), epsilon = 1e-12);
            assert_abs_diff_eq!(sp.deriv(t), dp(t), epsilon = 1e-11);
        }
    }

    #[test]
    fn spline_honors_clamped_end_slopes() {
        let ts: Vec<f64> = (0..21).map(|i| i as f64 / 20.0).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| (PI * t).sin()).collect();
        let sp = ClampedSpline::new(ts, ys, PI, -PI).unwrap();
        assert_relative_eq!(sp.deriv(0.0), PI, epsilon = 1e-13);
        assert_relative_eq!(sp.deriv(1.0), -PI, epsilon = 1e-13);
    }

    #[test]
    fn prefix_integrals_are_exact_on_cubics_and_sharp_on_sine() {
        let p = |t: f64| 2.0 - t + 3.0 * t * t - 0.5 * t * t * t;
        let ip = |t: f64| 2.0 * t - 0.5 * t * t + t * t * t - 0.125 * t * t * t * t;
        let dp = |t: f64| -1.0 + 6.0 * t - 1.5 * t * t;
        let ts: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| p(t)).collect();
        let sp = ClampedSpline::new(ts.clone(), ys, dp(0.0), dp(1.0)).unwrap();
        for (t, acc) in ts.iter().copied().zip(sp.prefix_integrals()) {
            assert_abs_diff_eq!(acc, ip(t) - ip(0.0), epsilon = 1e-14);
        }

        let ts: Vec<f64> = (0..=80).map(|i| i as f64 / 80.0).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| (PI * t).sin()).collect();
        let sp = ClampedSpline::new(ts, ys, PI, -PI).unwrap();
        let total = *sp.prefix_integrals().last().unwrap();
        assert_abs_diff_eq!(total, 2.0 / PI, epsilon = 1e-8);
    }

    #[test]
    fn spline_converges_at_fourth_order_on_sine() {
        let build = |n: usize| {
            let ts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let ys: Vec<f64> = ts.iter().map(|&t| (PI * t).sin()).collect();
            ClampedSpline::new(ts, ys, PI, -PI).unwrap()
        };
        let err = |sp: &ClampedSpline| {
            (0..=997)
                .map(|i| {
                    let t = i as f64 / 997.0;
                    (sp.value(t) - (PI * t).sin()).abs()
                })
                .fold(0.0f64, f64::max)
        };
        let e50 = err(&build(50));
        let e100 = err(&build(100));
        assert!(e100 < 1e-7, "coarse spline too inaccurate: {e100}");
        let order = (e50 / e100).log2();
        assert!(order > 3.5, "observed order {order} below cubic-spline rate");
    }

    #[test]
    fn spline_rejects_bad_grids() {
        assert!(ClampedSpline::new(vec![0.0, 0.0, 1.0], vec![0.0; 3], 0.0, 0.0).is_err());
        assert!(ClampedSpline::new(vec![0.0, 1.0], vec![0.0; 2], 0.0, 0.0).is_err());
        assert!(ClampedSpline::new(vec![0.0, 0.5, 1.0], vec![0.0, f64::NAN, 0.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn evaluation_outside_domain_clamps_to_endpoint() {
        let ts: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| t * t).collect();
        let sp = ClampedSpline::new(ts, ys, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(sp.value(-0.5), sp.value(0.0), epsilon = 0.0);
        assert_abs_diff_eq!(sp.value(1.5), sp.value(1.0), epsilon = 0.0);
    }

    #[test]
    fn analytic_jets_match_series_coefficients() {
        // (2/π) sin(πτ/2) = τ - (π²/24) τ³ + (π⁴/1920) τ⁵ - …
        let y = Radial::Analytic {
            kind: AnalyticKind::CosRound,
            scale: 1.0,
        };
        let jet = y.odd_jet(Endpoint::Left, 1.0);
        // The truncated series is seventh-order accurate, so keep the test
        // points small enough that the tail stays below the tolerance.
        for &t in &[1e-3, 5e-3, 0.02] {
            assert_relative_eq!(jet.value(t), y.value(-1.0 + t), max_relative = 1e-10);
            assert_relative_eq!(jet.deriv(t), y.deriv(-1.0 + t), max_relative = 1e-9);
        }
        let y2 = Radial::Analytic {
            kind: AnalyticKind::CosHalf,
            scale: 1.0,
        };
        let ejet = y2.even_jet(Endpoint::Left);
        assert_relative_eq!(ejet.a0, 2.0 / PI, epsilon = 1e-15);
        for &t in &[1e-3, 5e-3, 0.02] {
            assert_relative_eq!(ejet.value(t), y2.value(t), max_relative = 1e-10);
        }
    }

    #[test]
    fn fitted_jets_recover_analytic_coefficients() {
        // Sample the round profile densely and fit jets from raw samples.
        let n = 2001;
        let ts: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| (2.0 / PI) * (PI * t / 2.0).cos()).collect();
        let left = OddJet::fit(&ts, &ys, Endpoint::Left, 1.0);
        assert_relative_eq!(left.c3, -PI * PI / 24.0, max_relative = 1e-6);
        assert_relative_eq!(left.c5, PI.powi(4) / 1920.0, max_relative = 1e-2);
        let right = OddJet::fit(&ts, &ys, Endpoint::Right, 1.0);
        assert_relative_eq!(right.c3, left.c3, max_relative = 1e-7);

        let m = 1001;
        let hs: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
        let hy: Vec<f64> = hs.iter().map(|&t| (2.0 / PI) * (PI * t / 2.0).cos()).collect();
        let even = EvenJet::fit(&hs, &hy, Endpoint::Left);
        assert_relative_eq!(even.a0, 2.0 / PI, epsilon = 1e-15);
        assert_relative_eq!(even.a2, -PI / 4.0, max_relative = 1e-6);
        assert_relative_eq!(even.a4, PI.powi(3) / 192.0, max_relative = 1e-2);
    }

    #[test]
    fn scaled_analytic_profiles_scale_jets() {
        let y = Radial::Analytic {
            kind: AnalyticKind::SinHalf,
            scale: 2.5,
        };
        let jet = y.odd_jet(Endpoint::Left, 2.5);
        assert_relative_eq!(jet.c1, 2.5, epsilon = 1e-15);
        assert_relative_eq!(jet.c3, -2.5 * PI * PI / 24.0, epsilon = 1e-12);
        let ejet = y.even_jet(Endpoint::Right);
        assert_relative_eq!(ejet.a0, 2.5 * 2.0 / PI, epsilon = 1e-14);
    }
}
