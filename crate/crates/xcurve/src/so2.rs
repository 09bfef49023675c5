//! Doubly warped metrics with two commuting circle symmetries: the target
//! `Y = dr² + y₁² dθ₁² + y₂² dθ₂²` on `[0, 1]` is matched by a metric
//! `g = h² dr² + f₁² dθ₁² + f₂² dθ₂²` whose cross curvature equals `Y`.
//!
//! In the reduced variables `l₁ = -f₁'/h`, `l₂ = -f₂'/h` the problem is a
//! coupled pair of second-order equations with regular singular points at
//! both ends, where one circle fiber collapses: `θ₁` at `r = 0` and `θ₂`
//! at `r = 1`. Each equation is sourced by the square of an expression in
//! the other unknown. The solver runs a four-parameter shooting scheme:
//!
//! * Picard starts expand `(l₁, l₂)` off both singular circles with the
//!   curvature data `(α₁, α₂)` at `0` and `(β₁, β₂)` at `1` as unknowns;
//! * right-endpoint shots reuse the left machinery through the mirror
//!   `t ↦ 1 - r`, which maps the system onto itself with the fibers
//!   exchanged — this requires the square truncation to be even;
//! * a homotopy replaces the quadratic couplings by fixed reference fields
//!   at `p = 0`, where the fibers decouple and each block is affine in its
//!   own two parameters: the anchor is a pair of 2×2 linear solves whose
//!   determinant signs certify the topological degree;
//! * predictor-corrector continuation transports the matched zero to the
//!   target equations at `p = 1` under an interval-bounds monitor.
//!
//! Reconstruction integrates `f₁' = -l₁ h` and `-f₂' = l₂ h` exactly
//! through splines of value samples on a uniform grid, and the closed-loop
//! audit recomputes the cross curvature from the reconstructed profiles
//! alone.

use std::f64::consts::PI;

use crate::numerics::{
    continue_zero, integrate_ivp, newton_nd, singular_start, ContinuationConfig, Dense,
    IntegratorConfig, NewtonConfig, NumericsError, PathPoint, SingularKernel, StartState,
    VolterraGrid,
};
use crate::profile::{
    endpoint_slope, AnalyticKind, ClampedSpline, Endpoint, EvenJet, OddJet, ProfileError, Radial,
};
use thiserror::Error;

/// Largest allowed deviation of a profile's endpoint slope from its
/// normalized value.
pub const SLOPE_TOL: f64 = 1e-6;

/// Largest allowed magnitude of a profile where it must vanish.
pub const BOUNDARY_VALUE_TOL: f64 = 1e-9;

/// Allowed excursion outside the interval bounds `-1 ≤ l₁ ≤ 0 ≤ l₂ ≤ 1`
/// at accepted continuation points and at the final solution.
pub const BOUNDS_MARGIN: f64 = 1e-10;

/// Slack on `|F`-argument`| ≤ 2` below which the square truncation counts
/// as active, invalidating a solution of the untruncated problem.
pub const UNTRUNCATION_TOL: f64 = 1e-9;

/// Largest tolerated disagreement between the reconstructed warping
/// factors' one-sided endpoint rates and the radial coefficient.
pub const SMOOTHNESS_TOL: f64 = 1e-8;

/// Convergence target of the Picard starts, measured in the weighted norm
/// `max(|Δs|/t², |Δs'|/t)` over the start grid.
const START_TOL: f64 = 1e-13;

/// Node count of the Volterra grids underlying the Picard starts.
const START_NODES: usize = 64;

/// Uniform reconstruction nodes (an even interval count keeps `r = 1/2` a
/// node). The spacing 2.5e-3 balances the spline truncation of the
/// residual audit's repeated differentiation against its amplification of
/// sample-level noise.
const RECON_POINTS: usize = 401;

/// Interior matching point of the two shooting families.
const MATCH_POINT: f64 = 0.5;

/// Errors of the doubly warped pipeline.
#[derive(Debug, Error)]
pub enum So2Error {
    /// The target profile pair fails the normalization contract.
    #[error("invalid doubly warped profile: {0}")]
    ProfileInvalid(#[from] ProfileError),
    /// A shared numerical routine failed.
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    /// The decoupled reference stage did not produce the certified affine
    /// structure (singular block, wrong determinant sign, bad probes).
    #[error("reference-stage anchor is degenerate: {0}")]
    AnchorDegenerate(String),
    /// The interval bounds `-1 ≤ l₁ ≤ 0 ≤ l₂ ≤ 1` failed at an accepted
    /// continuation point.
    #[error("interval bounds violated at p = {p}: excursion {excursion:.3e}")]
    MonitorViolated {
        /// Homotopy parameter of the offending point.
        p: f64,
        /// Worst excursion outside the bounds observed there.
        excursion: f64,
    },
    /// The matched solution reached the truncation window of the squares.
    #[error("solution reached the truncation window: max |argument| - 2 = {excess:.3e}")]
    Untruncated {
        /// Amount by which the largest argument magnitude exceeds two.
        excess: f64,
    },
    /// Reconstruction or audit found inconsistent structure at an endpoint.
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),
}

/// Even truncation of the square: `F(x) = x²` for `|x| ≤ 2`, `F ≡ 0` for
/// `|x| ≥ 3`, joined on `2 < |x| < 3` by the quintic matching value, slope
/// and curvature at both seams. `0 ≤ F ≤ 8` everywhere. Evenness is load
/// bearing: the mirror reduction of right-endpoint shots flips the sign of
/// the coupling argument.
pub fn truncate_f(x: f64) -> f64 {
    let u = x.abs();
    if u <= 2.0 {
        x * x
    } else if u >= 3.0 {
        0.0
    } else {
        let s = u - 2.0;
        4.0 + s * (4.0 + s * (1.0 + s * (-67.0 + s * (95.0 - 37.0 * s))))
    }
}

/// `sin(πt/2)/t`, continuously extended through `t = 0`.
fn half_sinc(t: f64) -> f64 {
    if t == 0.0 {
        0.5 * PI
    } else {
        (0.5 * PI * t).sin() / t
    }
}

/// `(1 - cos(πt/2))/t²`, continuously extended through `t = 0`.
fn versine_over_sq(t: f64) -> f64 {
    if t == 0.0 {
        PI * PI / 8.0
    } else {
        let s = (0.25 * PI * t).sin();
        2.0 * s * s / (t * t)
    }
}

/// Validated target profile pair `(y₁, y₂)` of the doubly warped problem.
///
/// Normalization contract on `[0, 1]`: `y₁` vanishes at `0` with inward
/// slope `1` and is positive elsewhere with `y₁'(1) = 0`; `y₂` vanishes at
/// `1` with inward slope `1` (`y₂'(1) = -1`) and is positive elsewhere
/// with `y₂'(0) = 0`. The slopes fix the scale of `Y`; an input with a
/// different orbit rate must be rescaled before ingestion.
#[derive(Clone, Debug)]
pub struct ProfileYSo2 {
    y1: Radial,
    y2: Radial,
    /// Inward jets at `r = 0`: `y₁` odd with unit slope, `y₂` even.
    j1_left: OddJet,
    j2_left: EvenJet,
    /// Inward jets at `r = 1`: `y₂` odd with unit slope, `y₁` even.
    j2_right: OddJet,
    j1_right: EvenJet,
}

impl ProfileYSo2 {
    /// Validates a profile pair against the normalization contract and
    /// fits the endpoint jets used by the singular starts.
    pub fn new(y1: Radial, y2: Radial) -> Result<Self, So2Error> {
        let mut defects: Vec<String> = Vec::new();
        for (name, y) in [("y1", &y1), ("y2", &y2)] {
            if y.domain() != (0.0, 1.0) {
                defects.push(format!("domain {:?} of {name} is not [0, 1]", y.domain()));
            }
        }
        // y1: odd at 0 with unit slope, even and positive at 1.
        match &y1 {
            Radial::Analytic { kind, scale } => {
                if *kind != AnalyticKind::SinHalf {
                    defects.push("analytic y1 is not odd at 0 and even at 1".into());
                } else if *scale != 1.0 {
                    defects.push(format!("scale {scale} of y1 breaks the unit slope y1'(0) = 1"));
                }
            }
            Radial::Sampled(sp) => {
                let (ts, ys) = (sp.nodes(), sp.values());
                if ys[0].abs() > BOUNDARY_VALUE_TOL {
                    defects.push(format!("y1(0) = {:e} does not vanish", ys[0]));
                }
                if !(ys[ys.len() - 1] > 0.0) {
                    defects.push(format!("y1(1) = {:e} is not positive", ys[ys.len() - 1]));
                }
                if ts.len() < 8 {
                    defects.push("need at least 8 samples to resolve the endpoint jets".into());
                } else {
                    let dl = endpoint_slope(ts, ys, Endpoint::Left);
                    let dr = endpoint_slope(ts, ys, Endpoint::Right);
                    if (dl - 1.0).abs() > SLOPE_TOL {
                        defects.push(format!("slope of y1 at 0 is {dl}, not 1"));
                    }
                    if dr.abs() > SLOPE_TOL {
                        defects.push(format!("slope of y1 at 1 is {dr}, not 0"));
                    }
                }
                for (k, (&t, &v)) in ts.iter().zip(ys).enumerate() {
                    if k > 0 && k + 1 < ts.len() && v <= 0.0 {
                        defects.push(format!("y1({t}) = {v} is not positive"));
                        break;
                    }
                }
            }
        }
        // y2: even and positive at 0, odd at 1 with unit inward slope.
        match &y2 {
            Radial::Analytic { kind, scale } => {
                if *kind != AnalyticKind::CosHalf {
                    defects.push("analytic y2 is not even at 0 and odd at 1".into());
                } else if *scale != 1.0 {
                    defects.push(format!("scale {scale} of y2 breaks the unit slope y2'(1) = -1"));
                }
            }
            Radial::Sampled(sp) => {
                let (ts, ys) = (sp.nodes(), sp.values());
                if !(ys[0] > 0.0) {
                    defects.push(format!("y2(0) = {:e} is not positive", ys[0]));
                }
                if ys[ys.len() - 1].abs() > BOUNDARY_VALUE_TOL {
                    defects.push(format!("y2(1) = {:e} does not vanish", ys[ys.len() - 1]));
                }
                if ts.len() < 8 {
                    defects.push("need at least 8 samples to resolve the endpoint jets".into());
                } else {
                    let dl = endpoint_slope(ts, ys, Endpoint::Left);
                    let dr = endpoint_slope(ts, ys, Endpoint::Right);
                    if dl.abs() > SLOPE_TOL {
                        defects.push(format!("slope of y2 at 0 is {dl}, not 0"));
                    }
                    if (dr + 1.0).abs() > SLOPE_TOL {
                        defects.push(format!("slope of y2 at 1 is {dr}, not -1"));
                    }
                }
                for (k, (&t, &v)) in ts.iter().zip(ys).enumerate() {
                    if k > 0 && k + 1 < ts.len() && v <= 0.0 {
                        defects.push(format!("y2({t}) = {v} is not positive"));
                        break;
                    }
                }
            }
        }
        if !defects.is_empty() {
            return Err(ProfileError::Invalid { defects }.into());
        }
        let j1_left = y1.odd_jet(Endpoint::Left, 1.0);
        let j2_left = y2.even_jet(Endpoint::Left);
        let j2_right = y2.odd_jet(Endpoint::Right, 1.0);
        let j1_right = y1.even_jet(Endpoint::Right);
        Ok(Self { y1, y2, j1_left, j2_left, j2_right, j1_right })
    }

    /// The validated odd-at-zero warping profile.
    pub fn y1(&self) -> &Radial {
        &self.y1
    }

    /// The validated odd-at-one warping profile.
    pub fn y2(&self) -> &Radial {
        &self.y2
    }

    /// Orbit volume factor `σ(r) = y₁(r) y₂(r)` of the target.
    pub fn sigma(&self, r: f64) -> f64 {
        self.y1.value(r) * self.y2.value(r)
    }

    /// Regularized endpoint ratios of the auxiliary fields at inward
    /// distance `t` from `end`, in the locally mirrored frame where the
    /// odd fiber vanishes at `t = 0`:
    ///
    /// ```text
    /// [ (φ₁'/φ₁ - 1/t)/t,   φ₁/σ = 1/u₂²,   φ₂/σ - 1/t² ]
    /// ```
    ///
    /// with `φ₁ = u₁/u₂`, `φ₂ = u₂/u₁`, `σ = u₁ u₂`. All three extend
    /// continuously through `t = 0`; they are evaluated from the endpoint
    /// jets, so they are meaningful on the singular collar only.
    pub fn aux_ratios(&self, end: Endpoint, t: f64) -> [f64; 3] {
        let side = match end {
            Endpoint::Left => Side::left(self),
            Endpoint::Right => Side::right(self),
        };
        [side.sphi1_over_t(t), side.inv_even_sq(t), side.d2(t)]
    }
}

/// One shooting side of the profile: the left endpoint as-is, or the right
/// endpoint pulled back through the mirror `t ↦ 1 - r`, under which the
/// system maps onto itself with the fiber roles exchanged and
/// `(l₁, l₂)(r) = (-l̃₂, -l̃₁)(1 - r)`.
#[derive(Clone, Copy)]
struct Side<'a> {
    y: &'a ProfileYSo2,
    mirrored: bool,
}

impl<'a> Side<'a> {
    fn left(y: &'a ProfileYSo2) -> Self {
        Side { y, mirrored: false }
    }

    fn right(y: &'a ProfileYSo2) -> Self {
        Side { y, mirrored: true }
    }

    /// Odd warping factor in side coordinates (vanishes at `t = 0`).
    fn u1(&self, t: f64) -> f64 {
        if self.mirrored {
            self.y.y2.value(1.0 - t)
        } else {
            self.y.y1.value(t)
        }
    }

    fn u1p(&self, t: f64) -> f64 {
        if self.mirrored {
            -self.y.y2.deriv(1.0 - t)
        } else {
            self.y.y1.deriv(t)
        }
    }

    /// Even warping factor in side coordinates (positive at `t = 0`).
    fn u2(&self, t: f64) -> f64 {
        if self.mirrored {
            self.y.y1.value(1.0 - t)
        } else {
            self.y.y2.value(t)
        }
    }

    fn u2p(&self, t: f64) -> f64 {
        if self.mirrored {
            -self.y.y1.deriv(1.0 - t)
        } else {
            self.y.y2.deriv(t)
        }
    }

    fn odd(&self) -> &OddJet {
        if self.mirrored {
            &self.y.j2_right
        } else {
            &self.y.j1_left
        }
    }

    fn even(&self) -> &EvenJet {
        if self.mirrored {
            &self.y.j1_right
        } else {
            &self.y.j2_left
        }
    }

    /// `(φ₁'/φ₁ - 1/t)/t` from the endpoint jets; the log-derivative of
    /// `φ₁ = u₁/u₂` sheds its `1/t` pole because `u₁` vanishes linearly.
    fn sphi1_over_t(&self, t: f64) -> f64 {
        let o = self.odd();
        let e = self.even();
        let t2 = t * t;
        let p1 = o.c1 + t2 * (o.c3 + o.c5 * t2);
        let p2 = e.a0 + t2 * (e.a2 + e.a4 * t2);
        (2.0 * o.c3 + 4.0 * o.c5 * t2) / p1 - (2.0 * e.a2 + 4.0 * e.a4 * t2) / p2
    }

    /// `φ₁/σ = 1/u₂²` from the even jet.
    fn inv_even_sq(&self, t: f64) -> f64 {
        let e = self.even();
        let p2 = e.a0 + t * t * (e.a2 + e.a4 * t * t);
        1.0 / (p2 * p2)
    }

    /// `φ₂/σ - 1/t² = 1/u₁² - 1/t²`, regular because the odd factor has
    /// unit slope: with `u₁ = t (1 + u)` this is `-(u/t²)(2 + u)/(1 + u)²`.
    fn d2(&self, t: f64) -> f64 {
        let o = self.odd();
        let t2 = t * t;
        let c = o.c3 + o.c5 * t2;
        let u = t2 * c;
        let p1 = 1.0 + u;
        -c * (2.0 + u) / (p1 * p1)
    }
}

/// One shot of the coupled pair from a singular circle: Picard start data
/// on the collar plus the dense Runge-Kutta solution up to the matching
/// point. A mirrored shot represents the right-endpoint family and is
/// evaluated in the caller's coordinates transparently.
#[derive(Clone, Debug)]
pub struct So2Shot {
    /// Even-fiber curvature `l₁''(0)` in side coordinates.
    pub a1: f64,
    /// Odd-fiber rate `l₂'(0)` in side coordinates.
    pub a2: f64,
    start: StartState<2>,
    dense: Dense<4>,
    mirrored: bool,
}

impl So2Shot {
    fn eval_local(&self, t: f64) -> [f64; 4] {
        let eps = self.start.grid.eps();
        if t < eps {
            let tt = t.max(0.0);
            let (s1, s1p) = self.start.eval(0, tt);
            let (s2, s2p) = self.start.eval(1, tt);
            [
                s1 + 0.5 * self.a1 * tt * tt - 1.0,
                s1p + self.a1 * tt,
                s2 + self.a2 * tt,
                s2p + self.a2,
            ]
        } else {
            self.dense.eval(t)
        }
    }

    /// `(l₁, l₁', l₂, l₂')` at `r` in the caller's coordinates.
    pub fn eval(&self, r: f64) -> [f64; 4] {
        if self.mirrored {
            let v = self.eval_local(1.0 - r);
            [-v[2], v[3], -v[0], v[1]]
        } else {
            self.eval_local(r)
        }
    }

    /// State at the matching end of the dense span, in caller coordinates.
    pub fn match_state(&self) -> [f64; 4] {
        let y = *self.dense.ys.last().expect("dense span has nodes");
        if self.mirrored {
            [-y[2], y[3], -y[0], y[1]]
        } else {
            y
        }
    }

    /// Handoff distance of the singular start.
    pub fn eps(&self) -> f64 {
        self.start.grid.eps()
    }

    /// Worst violation of the interval bounds `-1 ≤ l₁ ≤ 0 ≤ l₂ ≤ 1` over
    /// the accepted nodes (zero while the shot stays inside; the bounds
    /// are mirror-invariant, so side coordinates suffice).
    fn bounds_excursion(&self) -> f64 {
        let mut worst = 0.0f64;
        for y in &self.dense.ys {
            worst = worst
                .max(y[0])
                .max(-1.0 - y[0])
                .max(-y[2])
                .max(y[2] - 1.0);
        }
        worst
    }

    /// Largest coupling-argument magnitude along the dense span at
    /// homotopy parameter `p`; the truncation is idle below 2.
    fn max_abs_arg(&self, p: f64) -> f64 {
        let mut worst = 0.0f64;
        for (t, y) in self.dense.ts.iter().zip(&self.dense.ys) {
            let arg1 = p * y[2] + (1.0 - p) * (0.5 * PI * t).sin();
            let arg2 = p * y[0] - (1.0 - p) * (0.5 * PI * t).cos();
            worst = worst.max(arg1.abs()).max(arg2.abs());
        }
        worst
    }
}

/// Core shot in side coordinates with data `l₁(0) = -1`, `l₁'(0) = 0`,
/// `l₁''(0) = a₁`, `l₂(0) = 0`, `l₂'(0) = a₂` at homotopy parameter `p`.
///
/// Writing `l₁ = s₁ + a₁t²/2 - 1` and `l₂ = s₂ + a₂t` moves the data into
/// the inhomogeneity; `s₁` and `s₂` then satisfy the model singular
/// equations `s₁'' - s₁'/t = t 𝒮₁` and `s₂'' + s₂'/t - s₂/t² = t 𝒮₂` with
/// sources that stay bounded as `t → 0` once the cancelling pole pairs are
/// grouped: the `l₂` pole of `φ₂/σ` is offset against the `-1/t` of its
/// log-derivative term through `(F - 1)(s₂/t + a₂)/t²`, with
/// `F`-argument `+ 1` expanded quadratically.
fn shot_core(
    side: Side<'_>,
    p: f64,
    a1: f64,
    a2: f64,
    cfg: &IntegratorConfig,
) -> Result<So2Shot, NumericsError> {
    let source = |grid: &VolterraGrid, s: &[Vec<f64>; 2], sp: &[Vec<f64>; 2]| -> [Vec<f64>; 2] {
        let n = grid.len();
        let mut src1 = Vec::with_capacity(n);
        let mut src2 = Vec::with_capacity(n);
        for (i, &t) in grid.ts.iter().enumerate() {
            let sphi1_t = side.sphi1_over_t(t);
            let l1 = s[0][i] + 0.5 * a1 * t * t - 1.0;
            let l1p = sp[0][i] + a1 * t;
            let l2p = sp[1][i] + a2;
            // Vanishing-fiber combinations divided by their rates.
            let (l2_over_t, s1_over_t2) = if i == 0 {
                (a2, 0.0)
            } else {
                (s[1][i] / t + a2, s[0][i] / (t * t))
            };
            // arg₁ = p l₂ + (1-p) sin(πt/2) vanishes linearly at t = 0.
            let q1 = p * l2_over_t + (1.0 - p) * half_sinc(t);
            let arg1 = q1 * t;
            let f1_over_t = if arg1.abs() <= 2.0 {
                q1 * q1 * t
            } else {
                truncate_f(arg1) / t
            };
            src1.push(sphi1_t * l1p + l1 * side.inv_even_sq(t) * f1_over_t);
            // arg₂ + 1 = p (l₁ + 1) + (1-p)(1 - cos(πt/2)) vanishes
            // quadratically, so F(arg₂) - 1 factors stably.
            let w2 = p * (s1_over_t2 + 0.5 * a1) + (1.0 - p) * versine_over_sq(t);
            let arg2 = w2 * t * t - 1.0;
            let fm1_over_t2 = if arg2.abs() <= 2.0 {
                (arg2 - 1.0) * w2
            } else {
                (truncate_f(arg2) - 1.0) / (t * t)
            };
            src2.push(
                fm1_over_t2 * l2_over_t - sphi1_t * l2p
                    + side.d2(t) * l2_over_t * truncate_f(arg2),
            );
        }
        [src1, src2]
    };
    let start = singular_start(
        [SingularKernel::First, SingularKernel::Second],
        &source,
        cfg.singular_offset,
        START_NODES,
        START_TOL,
    )?;
    let eps = start.grid.eps();
    let k = start.grid.len() - 1;
    let y0 = [
        start.s[0][k] + 0.5 * a1 * eps * eps - 1.0,
        start.sp[0][k] + a1 * eps,
        start.s[1][k] + a2 * eps,
        start.sp[1][k] + a2,
    ];
    let rhs = |t: f64, y: &[f64; 4]| {
        let u1 = side.u1(t);
        let u2 = side.u2(t);
        let phi1_log = side.u1p(t) / u1 - side.u2p(t) / u2;
        let arg1 = p * y[2] + (1.0 - p) * (0.5 * PI * t).sin();
        let arg2 = p * y[0] - (1.0 - p) * (0.5 * PI * t).cos();
        [
            y[1],
            phi1_log * y[1] + y[0] * truncate_f(arg1) / (u2 * u2),
            y[3],
            -phi1_log * y[3] + y[2] * truncate_f(arg2) / (u1 * u1),
        ]
    };
    let dense = integrate_ivp(&rhs, eps, MATCH_POINT, y0, cfg)?;
    Ok(So2Shot { a1, a2, start, dense, mirrored: side.mirrored })
}

/// Shot from the `r = 0` singular circle with data `l₁''(0) = α₁` and
/// `l₂'(0) = α₂`, integrated to the matching point `r = 1/2`.
pub fn shoot_minus(profile: &ProfileYSo2, p: f64, alpha: [f64; 2]) -> Result<So2Shot, So2Error> {
    Ok(shot_core(Side::left(profile), p, alpha[0], alpha[1], &IntegratorConfig::default())?)
}

/// Shot from the `r = 1` singular circle with data `l₁'(1) = β₁` and
/// `-l₂''(1) = β₂`, integrated back to the matching point; the result is
/// evaluated in the original coordinates on `[1/2, 1]`.
pub fn shoot_plus(profile: &ProfileYSo2, p: f64, beta: [f64; 2]) -> Result<So2Shot, So2Error> {
    Ok(shot_core(Side::right(profile), p, beta[1], beta[0], &IntegratorConfig::default())?)
}

fn mismatch_of(minus: &So2Shot, plus: &So2Shot) -> [f64; 4] {
    let a = minus.match_state();
    let b = plus.match_state();
    [b[0] - a[0], b[1] - a[1], b[2] - a[2], b[3] - a[3]]
}

fn g_core(
    profile: &ProfileYSo2,
    p: f64,
    z: &[f64],
    cfg: &IntegratorConfig,
) -> Result<[f64; 4], NumericsError> {
    let minus = shot_core(Side::left(profile), p, z[0], z[1], cfg)?;
    let plus = shot_core(Side::right(profile), p, z[3], z[2], cfg)?;
    Ok(mismatch_of(&minus, &plus))
}

/// Matching mismatch at `r = 1/2` for shooting data
/// `(α₁, α₂, β₁, β₂)`:
///
/// ```text
/// G = ( Δl₁, Δl₁', Δl₂, Δl₂' )(1/2),    Δ = plus - minus.
/// ```
pub fn g_mismatch(
    profile: &ProfileYSo2,
    p: f64,
    alpha: [f64; 2],
    beta: [f64; 2],
) -> Result<[f64; 4], So2Error> {
    Ok(g_core(
        profile,
        p,
        &[alpha[0], alpha[1], beta[0], beta[1]],
        &IntegratorConfig::default(),
    )?)
}

/// Affine structure of the mismatch at the reference stage `p = 0`, where
/// the fibers decouple and each block is exactly linear in its own data:
/// `(G₁, G₂) = A₁ (α₁, β₁) + B₁` and `(G₃, G₄) = A₂ (α₂, β₂) + B₂`. One
/// probe shot per side carries both fibers because of the decoupling.
struct AffineBlocks {
    a1: [[f64; 2]; 2],
    b1: [f64; 2],
    a2: [[f64; 2]; 2],
    b2: [f64; 2],
    /// Matching-point states of the zero-data and unit-data shots, kept
    /// for the degree probes: minus/plus at `(0,0)`, minus/plus at `(1,1)`.
    states: [[f64; 4]; 4],
}

fn affine_blocks(profile: &ProfileYSo2, cfg: &IntegratorConfig) -> Result<AffineBlocks, NumericsError> {
    let sm0 = shot_core(Side::left(profile), 0.0, 0.0, 0.0, cfg)?.match_state();
    let sm1 = shot_core(Side::left(profile), 0.0, 1.0, 1.0, cfg)?.match_state();
    let sp0 = shot_core(Side::right(profile), 0.0, 0.0, 0.0, cfg)?.match_state();
    let sp1 = shot_core(Side::right(profile), 0.0, 1.0, 1.0, cfg)?.match_state();
    // The α column is the negated unit response of the minus shot, the β
    // column the unit response of the plus shot.
    let a1 = [
        [-(sm1[0] - sm0[0]), sp1[0] - sp0[0]],
        [-(sm1[1] - sm0[1]), sp1[1] - sp0[1]],
    ];
    let a2 = [
        [-(sm1[2] - sm0[2]), sp1[2] - sp0[2]],
        [-(sm1[3] - sm0[3]), sp1[3] - sp0[3]],
    ];
    let b1 = [sp0[0] - sm0[0], sp0[1] - sm0[1]];
    let b2 = [sp0[2] - sm0[2], sp0[3] - sm0[3]];
    Ok(AffineBlocks { a1, b1, a2, b2, states: [sm0, sp0, sm1, sp1] })
}

fn det2(a: &[[f64; 2]; 2]) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn solve2(a: &[[f64; 2]; 2], rhs: [f64; 2]) -> Option<[f64; 2]> {
    let det = det2(a);
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if det.abs() <= 1e-12 * (scale * scale).max(f64::MIN_POSITIVE) {
        return None;
    }
    Some([
        (rhs[0] * a[1][1] - rhs[1] * a[0][1]) / det,
        (a[0][0] * rhs[1] - a[1][0] * rhs[0]) / det,
    ])
}

/// Degree certificate of the matching map at the reference stage.
///
/// At `p = 0` the mismatch splits into two planar affine maps, so the
/// four-dimensional degree over any box containing the anchor is the
/// product of the two block degrees, each the sign of its determinant.
/// The even-fiber block additionally carries the certified probe test:
/// rows measured by dedicated shots at `(α*, 0)` and `(0, β*)`, where
/// `α*` drives the minus value at the matching point to zero and `β*`
/// drives the plus value to `-1`; their determinant must be negative.
#[derive(Clone, Debug)]
pub struct So2Degree {
    /// Determinant of the even-fiber block `A₁`.
    pub det_a1: f64,
    /// Determinant of the odd-fiber block `A₂`.
    pub det_a2: f64,
    /// Determinant of the two honest probe rows (negative when certified).
    pub probe_det: f64,
    /// Probe datum with `l₁₋(1/2) = 0` at `(α*, 0)`.
    pub alpha_star: f64,
    /// Probe datum with `l₁₊(1/2) = -1` at `(0, β*)`.
    pub beta_star: f64,
    /// Product of the block degrees `sign(det A₁) · sign(det A₂)`.
    pub degree: i32,
}

/// Certifies the reference-stage degree for a profile pair.
pub fn degree_certificate(profile: &ProfileYSo2, cfg: &So2Config) -> Result<So2Degree, So2Error> {
    let blocks = affine_blocks(profile, &cfg.integrator)?;
    let det_a1 = det2(&blocks.a1);
    let det_a2 = det2(&blocks.a2);
    if det_a1 == 0.0 || det_a2 == 0.0 || !det_a1.is_finite() || !det_a2.is_finite() {
        return Err(So2Error::AnchorDegenerate("a reference block is singular".into()));
    }
    let [sm0, sp0, ..] = blocks.states;
    // Affinity pins the probe data in closed form; the probe rows are then
    // re-measured by dedicated shots rather than scaled from the blocks.
    let alpha_star = sm0[0] / blocks.a1[0][0];
    let beta_star = (-1.0 - sp0[0]) / blocks.a1[0][1];
    if !(alpha_star > 0.0) || !(beta_star > 0.0) {
        return Err(So2Error::AnchorDegenerate(format!(
            "probe data are not positive: alpha* = {alpha_star:.3e}, beta* = {beta_star:.3e}"
        )));
    }
    let pm = shot_core(Side::left(profile), 0.0, alpha_star, 0.0, &cfg.integrator)
        .map_err(So2Error::from)?
        .match_state();
    let pp = shot_core(Side::right(profile), 0.0, 0.0, beta_star, &cfg.integrator)
        .map_err(So2Error::from)?
        .match_state();
    let row_a = [-(pm[0] - sm0[0]), -(pm[1] - sm0[1])];
    let row_b = [pp[0] - sp0[0], pp[1] - sp0[1]];
    let probe_det = row_a[0] * row_b[1] - row_a[1] * row_b[0];
    if !(probe_det < 0.0) {
        return Err(So2Error::AnchorDegenerate(format!(
            "probe determinant {probe_det:.3e} is not negative"
        )));
    }
    let sign = |v: f64| if v > 0.0 { 1 } else { -1 };
    Ok(So2Degree {
        det_a1,
        det_a2,
        probe_det,
        alpha_star,
        beta_star,
        degree: sign(det_a1) * sign(det_a2),
    })
}

/// Tunables of the doubly warped solver.
#[derive(Clone, Debug)]
pub struct So2Config {
    /// Integrator tolerances and the singular handoff distance.
    pub integrator: IntegratorConfig,
    /// Corrector settings for mismatch zeros.
    pub newton: NewtonConfig,
    /// Homotopy stepping.
    pub continuation: ContinuationConfig,
    /// Node count of the uniform base of output grids.
    pub grid: usize,
}

impl Default for So2Config {
    fn default() -> Self {
        // Mismatch evaluations inherit integrator noise near 1e-12, so the
        // corrector target sits just above that floor.
        let newton = NewtonConfig { tol: 1e-11, ..NewtonConfig::default() };
        let continuation =
            ContinuationConfig { newton: newton.clone(), ..ContinuationConfig::default() };
        Self {
            integrator: IntegratorConfig::default(),
            newton,
            continuation,
            grid: 2001,
        }
    }
}

/// Matched solution of the doubly warped problem in reduced variables.
#[derive(Clone, Debug)]
pub struct SolutionSo2 {
    /// Target profile pair the solution was computed for.
    pub profile: ProfileYSo2,
    /// `(l₁''(0), l₂'(0))`.
    pub alpha: [f64; 2],
    /// `(l₁'(1), -l₂''(1))`.
    pub beta: [f64; 2],
    minus: So2Shot,
    plus: So2Shot,
    /// Accepted continuation points from the reference stage to the target.
    pub path: Vec<PathPoint>,
    /// Shooting data of the matched zero at the reference stage.
    pub anchor: [f64; 4],
    grid_hint: usize,
}

impl SolutionSo2 {
    /// `(l₁, l₁', l₂, l₂')` at `r`, evaluated on the owning shot's side of
    /// the matching point.
    pub fn eval(&self, r: f64) -> [f64; 4] {
        if r <= MATCH_POINT {
            self.minus.eval(r)
        } else {
            self.plus.eval(r)
        }
    }

    /// Componentwise mismatch of the two shots at the matching point.
    pub fn match_defect(&self) -> [f64; 4] {
        mismatch_of(&self.minus, &self.plus)
    }

    /// Radial coefficient `h = -l₁ l₂ / (y₁ y₂)`, with the exact limits
    /// `l₂'(0)/y₂(0)` and `l₁'(1)/y₁(1)` at the singular circles. The
    /// interior form is a product of simple ratios of like-vanishing
    /// factors, so it loses no accuracy approaching the ends.
    pub fn h_value(&self, r: f64) -> f64 {
        if r == 0.0 {
            self.alpha[1] / self.profile.y2.value(0.0)
        } else if r == 1.0 {
            self.beta[0] / self.profile.y1.value(1.0)
        } else {
            let v = self.eval(r);
            -v[0] * v[2] / (self.profile.y1.value(r) * self.profile.y2.value(r))
        }
    }

    /// Uniform output grid on `[0, 1]` with the configured node count.
    pub fn output_grid(&self) -> Vec<f64> {
        let n = self.grid_hint.max(2);
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    /// Worst violation of the interval bounds over both shots.
    pub fn bounds_excursion(&self) -> f64 {
        self.minus.bounds_excursion().max(self.plus.bounds_excursion())
    }

    /// Distance of the largest coupling argument from the truncation seam
    /// at `|argument| = 2` (positive while the truncation is idle).
    pub fn truncation_margin(&self) -> f64 {
        2.0 - self.minus.max_abs_arg(1.0).max(self.plus.max_abs_arg(1.0))
    }
}

/// Solves the doubly warped problem for a validated profile pair: exact
/// affine anchor at the decoupled reference stage, then continuation of
/// the four-parameter shooting zero to the target equations under the
/// interval-bounds monitor.
pub fn solve(profile: &ProfileYSo2, cfg: &So2Config) -> Result<SolutionSo2, So2Error> {
    let blocks = affine_blocks(profile, &cfg.integrator)?;
    let det_a1 = det2(&blocks.a1);
    if !(det_a1 < 0.0) {
        return Err(So2Error::AnchorDegenerate(format!(
            "even-fiber block determinant {det_a1:.3e} is not negative"
        )));
    }
    let z1 = solve2(&blocks.a1, [-blocks.b1[0], -blocks.b1[1]]).ok_or_else(|| {
        So2Error::AnchorDegenerate("even-fiber block is numerically singular".into())
    })?;
    let z2 = solve2(&blocks.a2, [-blocks.b2[0], -blocks.b2[1]]).ok_or_else(|| {
        So2Error::AnchorDegenerate("odd-fiber block is numerically singular".into())
    })?;
    let guess = [z1[0], z2[0], z1[1], z2[1]];
    let mut f0 = |z: &[f64]| -> Result<Vec<f64>, NumericsError> {
        Ok(g_core(profile, 0.0, z, &cfg.integrator)?.to_vec())
    };
    let (anchor, _) = newton_nd(&mut f0, &guess, &cfg.newton)?;

    let mut f = |p: f64, z: &[f64]| -> Result<Vec<f64>, NumericsError> {
        Ok(g_core(profile, p, z, &cfg.integrator)?.to_vec())
    };
    let mut monitor = |p: f64, z: &[f64]| -> f64 {
        let minus = shot_core(Side::left(profile), p, z[0], z[1], &cfg.integrator);
        let plus = shot_core(Side::right(profile), p, z[3], z[2], &cfg.integrator);
        match (minus, plus) {
            (Ok(a), Ok(b)) => BOUNDS_MARGIN - a.bounds_excursion().max(b.bounds_excursion()),
            _ => f64::NEG_INFINITY,
        }
    };
    let path = continue_zero(&mut f, &mut monitor, 0.0, 1.0, &anchor, &cfg.continuation)?;
    for pt in &path {
        if !(pt.monitor > 0.0) {
            return Err(So2Error::MonitorViolated {
                p: pt.p,
                excursion: BOUNDS_MARGIN - pt.monitor,
            });
        }
    }

    let z = path.last().expect("path includes its endpoints").z.clone();
    let minus = shot_core(Side::left(profile), 1.0, z[0], z[1], &cfg.integrator)?;
    let plus = shot_core(Side::right(profile), 1.0, z[3], z[2], &cfg.integrator)?;
    let excess = minus.max_abs_arg(1.0).max(plus.max_abs_arg(1.0)) - 2.0;
    if excess > -UNTRUNCATION_TOL {
        return Err(So2Error::Untruncated { excess });
    }
    for (name, value) in [
        ("l1''(0)", z[0]),
        ("l2'(0)", z[1]),
        ("l1'(1)", z[2]),
        ("-l2''(1)", z[3]),
    ] {
        if !(value > 0.0) {
            return Err(So2Error::DegenerateProfile(format!(
                "endpoint rate {name} = {value:.3e} is not positive"
            )));
        }
    }
    Ok(SolutionSo2 {
        profile: profile.clone(),
        alpha: [z[0], z[1]],
        beta: [z[2], z[3]],
        minus,
        plus,
        path,
        anchor: [anchor[0], anchor[1], anchor[2], anchor[3]],
        grid_hint: cfg.grid,
    })
}

/// Solution metric profiles of the doubly warped problem on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct MetricSo2 {
    /// Radial coefficient `h`.
    pub h: Radial,
    /// Warping factor of the fiber collapsing at `r = 0`.
    pub f1: Radial,
    /// Warping factor of the fiber collapsing at `r = 1`.
    pub f2: Radial,
}

/// Rebuilds the metric profiles `(h, f₁, f₂)` of a matched solution.
///
/// The residual audit differentiates the reconstructed splines twice,
/// which amplifies knot-frequency error structure by the square of the
/// inverse knot gap. Dense-output *values* are clean at every phase while
/// sampled *slopes* are clean only at step-dependent rows, so the warping
/// factors are rebuilt from values alone: `f₁' = -l₁ h` and `-f₂' = l₂ h`
/// are sampled on a uniform grid and integrated exactly through their
/// splines. That keeps every error field smooth and the knots uniform,
/// and smooth error fields differentiate benignly.
pub fn reconstruct(sol: &SolutionSo2) -> Result<MetricSo2, So2Error> {
    let n = RECON_POINTS;
    let mut rs = Vec::with_capacity(n);
    for k in 0..n {
        rs.push(k as f64 / (n - 1) as f64);
    }
    let mut hv = Vec::with_capacity(n);
    let mut w1 = Vec::with_capacity(n);
    let mut w2 = Vec::with_capacity(n);
    for &r in &rs {
        let h = sol.h_value(r);
        if !(h > 0.0) {
            return Err(So2Error::DegenerateProfile(format!(
                "radial coefficient is not positive at r = {r}: h = {h}"
            )));
        }
        let v = sol.eval(r);
        hv.push(h);
        w1.push(-v[0] * h);
        w2.push(v[2] * h);
    }
    let spline_of = |vals: &[f64]| -> Result<ClampedSpline, So2Error> {
        let d0 = endpoint_slope(&rs, vals, Endpoint::Left);
        let d1 = endpoint_slope(&rs, vals, Endpoint::Right);
        ClampedSpline::new(rs.clone(), vals.to_vec(), d0, d1).map_err(So2Error::from)
    };
    let f1v = spline_of(&w1)?.prefix_integrals();
    let p2 = spline_of(&w2)?.prefix_integrals();
    let total2 = p2[n - 1];
    let f2v: Vec<f64> = p2.iter().map(|v| total2 - v).collect();
    if !(f1v[n - 1] > 0.0) || !(f2v[0] > 0.0) {
        return Err(So2Error::DegenerateProfile(
            "a reconstructed warping factor is not positive at its regular end".into(),
        ));
    }
    for k in 1..n - 1 {
        if !(f1v[k] > 0.0) || !(f2v[k] > 0.0) {
            return Err(So2Error::DegenerateProfile(format!(
                "a reconstructed warping factor vanishes at r = {}",
                rs[k]
            )));
        }
    }
    // Independent one-sided rates at the singular circles must agree with
    // the radial coefficient there.
    let defect_left = (endpoint_slope(&rs, &f1v, Endpoint::Left) - hv[0]).abs();
    let defect_right = (endpoint_slope(&rs, &f2v, Endpoint::Right) + hv[n - 1]).abs();
    if defect_left > SMOOTHNESS_TOL || defect_right > SMOOTHNESS_TOL {
        return Err(So2Error::DegenerateProfile(format!(
            "endpoint rates disagree: |f1'(0) - h(0)| = {defect_left:.3e}, \
             |f2'(1) + h(1)| = {defect_right:.3e}"
        )));
    }
    let dh0 = endpoint_slope(&rs, &hv, Endpoint::Left);
    let dh1 = endpoint_slope(&rs, &hv, Endpoint::Right);
    let f1 = ClampedSpline::new(rs.clone(), f1v, w1[0], w1[n - 1]).map_err(So2Error::from)?;
    let f2 = ClampedSpline::new(rs.clone(), f2v, -w2[0], -w2[n - 1]).map_err(So2Error::from)?;
    let h = ClampedSpline::new(rs, hv, dh0, dh1).map_err(So2Error::from)?;
    Ok(MetricSo2 {
        h: Radial::Sampled(h),
        f1: Radial::Sampled(f1),
        f2: Radial::Sampled(f2),
    })
}

/// Cross curvature components of a doubly warped metric on its grid.
#[derive(Clone, Debug)]
pub struct CrossSo2 {
    /// Evaluation nodes.
    pub rs: Vec<f64>,
    /// `dr ⊗ dr` component.
    pub x_rr: Vec<f64>,
    /// `dθ₁ ⊗ dθ₁` component.
    pub x_11: Vec<f64>,
    /// `dθ₂ ⊗ dθ₂` component.
    pub x_22: Vec<f64>,
}

/// Computes the cross curvature of the metric given by profiles
/// `(h, f₁, f₂)` from the profiles alone: `l₁ = -f₁'/h`, `l₂ = -f₂'/h` by
/// spline differentiation, then
///
/// ```text
/// X_rr = (l₁'/f₁) (l₂'/f₂),
/// X_11 = -(l₁/f₂) l₂ l₁' / h,
/// X_22 = -(l₂/f₁) l₁ l₂' / h.
/// ```
///
/// Each parenthesized ratio pairs a vanishing warping factor with a
/// numerator vanishing at the same circle (`f₁`, `l₂`, `l₁'` at `r = 0`;
/// `f₂`, `l₁`, `l₂'` at `r = 1`), so the ratios extend regularly across
/// the grid and only their own endpoint node needs one-sided polynomial
/// extrapolation. Every other factor is bounded away from 0/0.
pub fn forward_cross(g: &MetricSo2) -> Result<CrossSo2, So2Error> {
    let rs: Vec<f64> = match &g.f1 {
        Radial::Sampled(sp) => sp.nodes().to_vec(),
        _ => g.f1.sample_uniform(2001).0,
    };
    let n = rs.len();
    if n < 7 {
        return Err(So2Error::DegenerateProfile(
            "cross-curvature grid needs at least 7 nodes".into(),
        ));
    }
    let mut l1v = Vec::with_capacity(n);
    let mut l2v = Vec::with_capacity(n);
    let mut hv = Vec::with_capacity(n);
    for &r in &rs {
        let h = g.h.value(r);
        if !(h > 0.0) {
            return Err(So2Error::DegenerateProfile(format!(
                "radial coefficient is not positive at r = {r}: h = {h}"
            )));
        }
        hv.push(h);
        l1v.push(-g.f1.deriv(r) / h);
        l2v.push(-g.f2.deriv(r) / h);
    }
    let spline_of = |vals: &[f64]| -> Result<ClampedSpline, So2Error> {
        let d0 = endpoint_slope(&rs, vals, Endpoint::Left);
        let d1 = endpoint_slope(&rs, vals, Endpoint::Right);
        ClampedSpline::new(rs.clone(), vals.to_vec(), d0, d1).map_err(So2Error::from)
    };
    let l1sp = spline_of(&l1v)?;
    let l2sp = spline_of(&l2v)?;
    let l1p: Vec<f64> = rs.iter().map(|&r| l1sp.deriv(r)).collect();
    let l2p: Vec<f64> = rs.iter().map(|&r| l2sp.deriv(r)).collect();
    let f1v: Vec<f64> = rs.iter().map(|&r| g.f1.value(r)).collect();
    let f2v: Vec<f64> = rs.iter().map(|&r| g.f2.value(r)).collect();
    let q1 = vanishing_ratio(&rs, &l1p, &f1v, Endpoint::Left)?;
    let q2 = vanishing_ratio(&rs, &l2p, &f2v, Endpoint::Right)?;
    let rho1 = vanishing_ratio(&rs, &l2v, &f1v, Endpoint::Left)?;
    let rho2 = vanishing_ratio(&rs, &l1v, &f2v, Endpoint::Right)?;
    let mut x_rr = Vec::with_capacity(n);
    let mut x_11 = Vec::with_capacity(n);
    let mut x_22 = Vec::with_capacity(n);
    for i in 0..n {
        x_rr.push(q1[i] * q2[i]);
        x_11.push(-rho2[i] * l2v[i] * l1p[i] / hv[i]);
        x_22.push(-rho1[i] * l1v[i] * l2p[i] / hv[i]);
    }
    Ok(CrossSo2 { rs, x_rr, x_11, x_22 })
}

/// Pointwise ratio `num/den` of sampled fields whose denominator may
/// vanish at the `end` node only; the ratio is assumed to extend there
/// regularly (numerator vanishing at the same rate) and the endpoint row
/// is recovered by polynomial extrapolation through the five nearest
/// interior nodes. A denominator zero anywhere else is an error.
fn vanishing_ratio(
    rs: &[f64],
    num: &[f64],
    den: &[f64],
    end: Endpoint,
) -> Result<Vec<f64>, So2Error> {
    let n = rs.len();
    let scale = den.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pinned = match end {
        Endpoint::Left => 0,
        Endpoint::Right => n - 1,
    };
    let mut out = vec![f64::NAN; n];
    for i in 0..n {
        if i == pinned {
            continue;
        }
        if den[i].abs() <= 1e-14 * scale {
            return Err(So2Error::DegenerateProfile(format!(
                "a warping factor vanishes away from its singular circle at r = {}",
                rs[i]
            )));
        }
        out[i] = num[i] / den[i];
    }
    out[pinned] = if den[pinned].abs() > 1e-9 * scale {
        num[pinned] / den[pinned]
    } else {
        let idx: Vec<usize> = match end {
            Endpoint::Left => (1..=5).collect(),
            Endpoint::Right => (2..=6).map(|k| n - k).collect(),
        };
        let ts: Vec<f64> = idx.iter().map(|&i| rs[i]).collect();
        // Newton divided differences of the regular ratio, evaluated at
        // the pinned node.
        let mut dd: Vec<f64> = idx.iter().map(|&i| out[i]).collect();
        for level in 1..ts.len() {
            for k in (level..ts.len()).rev() {
                dd[k] = (dd[k] - dd[k - 1]) / (ts[k] - ts[k - level]);
            }
        }
        let t0 = rs[pinned];
        let mut acc = dd[ts.len() - 1];
        for k in (0..ts.len() - 1).rev() {
            acc = dd[k] + (t0 - ts[k]) * acc;
        }
        acc
    };
    Ok(out)
}

/// Closed-loop residual data for a metric against the diagonal target
/// `Y = dr² + y₁² dθ₁² + y₂² dθ₂²`: componentwise residual grids of
/// `X(g) - Y`, their joint sup-norm, and the endpoint rate defects.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    /// Evaluation nodes.
    pub rs: Vec<f64>,
    /// `X_rr - 1` per node.
    pub res_rr: Vec<f64>,
    /// `X_11 - y₁²` per node.
    pub res_11: Vec<f64>,
    /// `X_22 - y₂²` per node.
    pub res_22: Vec<f64>,
    /// Sup-norm over all three residual grids.
    pub sup: f64,
    /// `|f₁'(0) - h(0)|` and `|f₂'(1) + h(1)|` from independent one-sided
    /// slope estimates.
    pub smooth_defects: [f64; 2],
}

/// Audits a metric against the target determined by a profile pair by
/// recomputing its cross curvature from the profiles alone.
pub fn residual_report(g: &MetricSo2, profile: &ProfileYSo2) -> Result<ResidualReport, So2Error> {
    let cross = forward_cross(g)?;
    let n = cross.rs.len();
    let mut res_rr = Vec::with_capacity(n);
    let mut res_11 = Vec::with_capacity(n);
    let mut res_22 = Vec::with_capacity(n);
    let mut sup = 0.0f64;
    for i in 0..n {
        let r = cross.rs[i];
        let y1 = profile.y1.value(r);
        let y2 = profile.y2.value(r);
        let rr = cross.x_rr[i] - 1.0;
        let r11 = cross.x_11[i] - y1 * y1;
        let r22 = cross.x_22[i] - y2 * y2;
        sup = sup.max(rr.abs()).max(r11.abs()).max(r22.abs());
        res_rr.push(rr);
        res_11.push(r11);
        res_22.push(r22);
    }
    let fv1: Vec<f64> = cross.rs.iter().map(|&r| g.f1.value(r)).collect();
    let fv2: Vec<f64> = cross.rs.iter().map(|&r| g.f2.value(r)).collect();
    let smooth_defects = [
        (endpoint_slope(&cross.rs, &fv1, Endpoint::Left) - g.h.value(cross.rs[0])).abs(),
        (endpoint_slope(&cross.rs, &fv2, Endpoint::Right) + g.h.value(cross.rs[n - 1])).abs(),
    ];
    Ok(ResidualReport { rs: cross.rs, res_rr, res_11, res_22, sup, smooth_defects })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn oracle_profile() -> ProfileYSo2 {
        ProfileYSo2::new(
            Radial::Analytic { kind: AnalyticKind::SinHalf, scale: 1.0 },
            Radial::Analytic { kind: AnalyticKind::CosHalf, scale: 1.0 },
        )
        .expect("round profile pair is valid")
    }

    fn oracle_alpha() -> [f64; 2] {
        [PI * PI / 4.0, PI / 2.0]
    }

    fn oracle_beta() -> [f64; 2] {
        [PI / 2.0, PI * PI / 4.0]
    }

    #[test]
    fn truncation_matches_the_square_inside_and_dies_smoothly() {
        assert_eq!(truncate_f(0.0), 0.0);
        assert_eq!(truncate_f(1.0), 1.0);
        assert_eq!(truncate_f(2.0), 4.0);
        assert_eq!(truncate_f(3.0), 0.0);
        assert_eq!(truncate_f(3.1), 0.0);
        assert_eq!(truncate_f(-17.0), 0.0);
        let mut prev = truncate_f(-4.0);
        let mut worst_jump = 0.0f64;
        for k in 1..=16000 {
            let x = -4.0 + 8.0 * k as f64 / 16000.0;
            let v = truncate_f(x);
            assert!((0.0..=8.0).contains(&v), "F({x}) = {v} left [0, 8]");
            assert_eq!(v, truncate_f(-x), "F is not even at {x}");
            worst_jump = worst_jump.max((v - prev).abs());
            prev = v;
        }
        // A C¹ blend admits no jumps beyond slope times grid spacing.
        assert!(worst_jump < 5.0 * 8.0 / 16000.0 * 2.0, "jump {worst_jump}");
    }

    #[test]
    fn start_data_reproduce_the_round_shot_from_zero() {
        let y = oracle_profile();
        let shot = shoot_minus(&y, 1.0, oracle_alpha()).expect("round shot");
        let mut worst = 0.0f64;
        for k in 0..=500 {
            let t = 0.5 * k as f64 / 500.0;
            let v = shot.eval(t);
            let (s, c) = (0.5 * PI * t).sin_cos();
            worst = worst
                .max((v[0] + c).abs())
                .max((v[1] - 0.5 * PI * s).abs())
                .max((v[2] - s).abs())
                .max((v[3] - 0.5 * PI * c).abs());
        }
        assert!(worst <= 1e-8, "round shot deviates by {worst:.3e}");
    }

    #[test]
    fn mirrored_shot_reproduces_the_round_solution_on_the_right_half() {
        let y = oracle_profile();
        let shot = shoot_plus(&y, 1.0, oracle_beta()).expect("round shot");
        let mut worst = 0.0f64;
        for k in 0..=500 {
            let r = 0.5 + 0.5 * k as f64 / 500.0;
            let v = shot.eval(r);
            let (s, c) = (0.5 * PI * r).sin_cos();
            worst = worst
                .max((v[0] + c).abs())
                .max((v[1] - 0.5 * PI * s).abs())
                .max((v[2] - s).abs())
                .max((v[3] - 0.5 * PI * c).abs());
        }
        assert!(worst <= 1e-8, "mirrored round shot deviates by {worst:.3e}");
    }

    #[test]
    fn stationary_shots_stay_pinned_at_the_interval_ends() {
        let y = oracle_profile();
        let minus = shoot_minus(&y, 1.0, [0.0, 0.0]).expect("pinned shot");
        let plus = shoot_plus(&y, 1.0, [0.0, 0.0]).expect("pinned shot");
        for k in 0..=100 {
            let r = 0.5 * k as f64 / 100.0;
            let a = minus.eval(r);
            let b = plus.eval(1.0 - r);
            for (value, target) in [
                (a[0], -1.0),
                (a[1], 0.0),
                (a[2], 0.0),
                (a[3], 0.0),
                (b[0], 0.0),
                (b[1], 0.0),
                (b[2], 1.0),
                (b[3], 0.0),
            ] {
                assert_abs_diff_eq!(value, target, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn reference_stage_decouples_into_affine_blocks() {
        let y = oracle_profile();
        let cfg = IntegratorConfig::default();
        let blocks = affine_blocks(&y, &cfg).expect("reference blocks");
        let mut worst = 0.0f64;
        for i in 0..5 {
            for j in 0..5 {
                let a = 0.5 * i as f64;
                let b = 0.5 * j as f64;
                // Entangle the blocks so a cross-dependence would show up.
                let z = [a, 1.3 * b + 0.2, b, 0.7 * a + 0.1];
                let g = g_core(&y, 0.0, &z, &cfg).expect("reference mismatch");
                let pred = [
                    blocks.a1[0][0] * z[0] + blocks.a1[0][1] * z[2] + blocks.b1[0],
                    blocks.a1[1][0] * z[0] + blocks.a1[1][1] * z[2] + blocks.b1[1],
                    blocks.a2[0][0] * z[1] + blocks.a2[0][1] * z[3] + blocks.b2[0],
                    blocks.a2[1][0] * z[1] + blocks.a2[1][1] * z[3] + blocks.b2[1],
                ];
                for k in 0..4 {
                    worst = worst.max((g[k] - pred[k]).abs());
                }
            }
        }
        assert!(worst <= 1e-9, "affine model deviates by {worst:.3e}");
    }

    #[test]
    fn zero_data_reference_shots_pin_one_fiber_and_overshoot_the_other() {
        let y = oracle_profile();
        let cfg = IntegratorConfig::default();
        let minus = shot_core(Side::left(&y), 0.0, 0.0, 0.0, &cfg).expect("reference shot");
        let plus = shot_core(Side::right(&y), 0.0, 0.0, 0.0, &cfg).expect("reference shot");
        // The unsourced fiber of each zero-data shot vanishes identically.
        for k in 0..=20 {
            let t = 0.5 * k as f64 / 20.0;
            assert_eq!(minus.eval(t)[2], 0.0);
            assert_eq!(minus.eval(t)[3], 0.0);
            assert_eq!(plus.eval(1.0 - t)[0], 0.0);
            assert_eq!(plus.eval(1.0 - t)[1], 0.0);
        }
        // The sourced fiber overshoots its own boundary value strictly.
        let a = minus.match_state();
        let b = plus.match_state();
        assert!(a[0] < -1.0, "l1 minus at matching point: {}", a[0]);
        assert!(a[1] < 0.0, "l1' minus at matching point: {}", a[1]);
        assert!(b[2] > 1.0, "l2 plus at matching point: {}", b[2]);
        assert!(b[3] < 0.0, "l2' plus at matching point: {}", b[3]);
        // Together: the zero-data mismatch sits in a definite orthant.
        let g = mismatch_of(&minus, &plus);
        assert!(g[0] > 1.0 && g[1] > 0.0 && g[2] > 1.0 && g[3] < 0.0);
    }

    #[test]
    fn degree_certificate_is_plus_one_with_negative_blocks() {
        let y = oracle_profile();
        let cert = degree_certificate(&y, &So2Config::default()).expect("degree certificate");
        assert!(cert.det_a1 < 0.0, "det A1 = {}", cert.det_a1);
        assert!(cert.det_a2 < 0.0, "det A2 = {}", cert.det_a2);
        assert!(cert.probe_det < 0.0, "probe det = {}", cert.probe_det);
        assert!(cert.alpha_star > 0.0 && cert.beta_star > 0.0);
        assert_eq!(cert.degree, 1);
    }

    #[test]
    fn solve_reconstruct_and_audit_close_the_loop_on_the_round_profile() {
        let y = oracle_profile();
        let sol = solve(&y, &So2Config::default()).expect("round solve");
        let (a, b) = (oracle_alpha(), oracle_beta());
        assert_abs_diff_eq!(sol.alpha[0], a[0], epsilon = 1e-8);
        assert_abs_diff_eq!(sol.alpha[1], a[1], epsilon = 1e-8);
        assert_abs_diff_eq!(sol.beta[0], b[0], epsilon = 1e-8);
        assert_abs_diff_eq!(sol.beta[1], b[1], epsilon = 1e-8);

        let mut worst = 0.0f64;
        for k in 0..=200 {
            let r = k as f64 / 200.0;
            let v = sol.eval(r);
            let (s, c) = (0.5 * PI * r).sin_cos();
            worst = worst.max((v[0] + c).abs()).max((v[2] - s).abs());
        }
        assert!(worst <= 1e-6, "solution deviates from the round one by {worst:.3e}");

        let defect = sol.match_defect();
        let defect_max = defect.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(defect_max <= 1e-9, "matching defect {defect_max:.3e}");
        assert!(sol.bounds_excursion() <= BOUNDS_MARGIN);
        assert!(sol.truncation_margin() > 0.9);
        let q = PI * PI / 4.0;
        assert_abs_diff_eq!(sol.h_value(0.0), q, epsilon = 1e-8);
        assert_abs_diff_eq!(sol.h_value(1.0), q, epsilon = 1e-8);

        let g = reconstruct(&sol).expect("round reconstruction");
        let mut worst_m = 0.0f64;
        for k in 0..=200 {
            let r = k as f64 / 200.0;
            let (s, c) = (0.5 * PI * r).sin_cos();
            worst_m = worst_m
                .max((g.h.value(r) - q).abs())
                .max((g.f1.value(r) - 0.5 * PI * s).abs())
                .max((g.f2.value(r) - 0.5 * PI * c).abs());
        }
        assert!(worst_m <= 1e-6, "metric profiles deviate by {worst_m:.3e}");

        let report = residual_report(&g, &y).expect("round audit");
        assert!(report.sup <= 1e-6, "closed-loop residual {:.3e}", report.sup);
        assert!(report.smooth_defects[0] <= SMOOTHNESS_TOL);
        assert!(report.smooth_defects[1] <= SMOOTHNESS_TOL);
    }

    #[test]
    fn forward_cross_recovers_the_analytic_round_data() {
        let q = PI * PI / 4.0;
        let n = 2001;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let hv = vec![q; n];
        let h = ClampedSpline::new(ts, hv, 0.0, 0.0).expect("constant spline");
        let g = MetricSo2 {
            h: Radial::Sampled(h),
            f1: Radial::Analytic { kind: AnalyticKind::SinHalf, scale: q },
            f2: Radial::Analytic { kind: AnalyticKind::CosHalf, scale: q },
        };
        let cross = forward_cross(&g).expect("analytic cross curvature");
        let mut worst = 0.0f64;
        for (i, &r) in cross.rs.iter().enumerate() {
            let (s, c) = (0.5 * PI * r).sin_cos();
            let y1 = (2.0 / PI) * s;
            let y2 = (2.0 / PI) * c;
            worst = worst
                .max((cross.x_rr[i] - 1.0).abs())
                .max((cross.x_11[i] - y1 * y1).abs())
                .max((cross.x_22[i] - y2 * y2).abs());
        }
        assert!(worst <= 1e-8, "analytic cross data deviate by {worst:.3e}");
    }

    #[test]
    fn cross_curvature_scales_inversely_with_the_metric() {
        let q = PI * PI / 4.0;
        let n = 1001;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let metric_scaled_by = |s: f64| {
            let hv = vec![s * q; n];
            let h = ClampedSpline::new(ts.clone(), hv, 0.0, 0.0).expect("constant spline");
            MetricSo2 {
                h: Radial::Sampled(h),
                f1: Radial::Analytic { kind: AnalyticKind::SinHalf, scale: s * q },
                f2: Radial::Analytic { kind: AnalyticKind::CosHalf, scale: s * q },
            }
        };
        let base = forward_cross(&metric_scaled_by(1.0)).expect("base cross");
        // Doubling (h, f₁, f₂) scales the metric by c = 4 and the cross
        // curvature by 1/c.
        let scaled = forward_cross(&metric_scaled_by(2.0)).expect("scaled cross");
        let mut worst = 0.0f64;
        for i in 0..base.rs.len() {
            worst = worst
                .max((scaled.x_rr[i] - 0.25 * base.x_rr[i]).abs())
                .max((scaled.x_11[i] - 0.25 * base.x_11[i]).abs())
                .max((scaled.x_22[i] - 0.25 * base.x_22[i]).abs());
        }
        assert!(worst <= 1e-8, "scaling law deviates by {worst:.3e}");
    }

    #[test]
    fn profile_validation_rejects_wrong_boundary_data() {
        // Wrong parity class for y1.
        let bad = ProfileYSo2::new(
            Radial::Analytic { kind: AnalyticKind::CosHalf, scale: 1.0 },
            Radial::Analytic { kind: AnalyticKind::CosHalf, scale: 1.0 },
        );
        assert!(matches!(bad, Err(So2Error::ProfileInvalid(_))));
        // Sampled y1 with an off-unit slope at 0.
        let n = 201;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| 1.02 * (2.0 / PI) * (0.5 * PI * t).sin()).collect();
        let sp = ClampedSpline::new(ts, ys, 1.02, 0.0).expect("sampled profile");
        let bad = ProfileYSo2::new(
            Radial::Sampled(sp),
            Radial::Analytic { kind: AnalyticKind::CosHalf, scale: 1.0 },
        );
        assert!(matches!(bad, Err(So2Error::ProfileInvalid(_))));
        // Sampled y2 that fails to vanish at 1.
        let n = 201;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| (2.0 / PI) * (0.5 * PI * t).cos() + 0.05).collect();
        let sp = ClampedSpline::new(ts, ys, 0.0, -1.0).expect("sampled profile");
        let bad = ProfileYSo2::new(
            Radial::Analytic { kind: AnalyticKind::SinHalf, scale: 1.0 },
            Radial::Sampled(sp),
        );
        assert!(matches!(bad, Err(So2Error::ProfileInvalid(_))));
    }

    #[test]
    fn endpoint_ratio_jets_match_direct_ratios_off_the_axis() {
        let y = oracle_profile();
        for end in [Endpoint::Left, Endpoint::Right] {
            let side = match end {
                Endpoint::Left => Side::left(&y),
                Endpoint::Right => Side::right(&y),
            };
            for &t in &[0.02f64, 0.05] {
                let [jet_sphi, jet_inv, jet_d2] = y.aux_ratios(end, t);
                let (u1, u2) = (side.u1(t), side.u2(t));
                let (u1p, u2p) = (side.u1p(t), side.u2p(t));
                let direct_sphi = (u1p / u1 - u2p / u2 - 1.0 / t) / t;
                let direct_inv = 1.0 / (u2 * u2);
                let direct_d2 = 1.0 / (u1 * u1) - 1.0 / (t * t);
                assert_abs_diff_eq!(jet_sphi, direct_sphi, epsilon = 1e-4);
                assert_abs_diff_eq!(jet_inv, direct_inv, epsilon = 1e-8);
                assert_abs_diff_eq!(jet_d2, direct_d2, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn mismatch_vanishes_at_the_round_data_and_flags_wrong_data() {
        let y = oracle_profile();
        let g = g_mismatch(&y, 1.0, oracle_alpha(), oracle_beta()).expect("round mismatch");
        let worst = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst <= 1e-8, "round mismatch {worst:.3e}");
        let g = g_mismatch(&y, 1.0, [1.1 * PI * PI / 4.0, PI / 2.0], oracle_beta())
            .expect("perturbed mismatch");
        let worst = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(worst > 1e-3, "perturbed mismatch is too small: {worst:.3e}");
    }
}
