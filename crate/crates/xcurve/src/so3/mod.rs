//! Cohomogeneity-one metrics with `SO(3)` symmetry: the rotationally
//! symmetric prescribed cross curvature problem on the three-sphere.
//!
//! After normalizing the target to `Y = dr ⊗ dr + y(r)² Q` on `[-1, 1]`
//! (with `y` vanishing to first order at both ends), the problem reduces to
//! a scalar two-point boundary value problem for an auxiliary function `l`:
//!
//! ```text
//! l'' = E(l) / ζ(r),   l(∓1) = ∓1,   l'(∓1) = 0,
//! ```
//!
//! where `ζ = y²` and `E(x) = x³ - x` (truncated far outside the physical
//! band so that every shot exists globally). The endpoints are regular
//! singular: shots are started by Picard iteration on the explicit cone
//! kernel and continued by adaptive Runge-Kutta. Matching value and slope
//! at `r = 0` is a planar mismatch map `J(α, β)` in the two endpoint
//! curvature parameters; a zero is certified by a winding number on an
//! engineered comparison coefficient `σ₀` and carried to the target `ζ` by
//! predictor-corrector continuation. From a matched `l`, the solution
//! metric profiles are `f = l'` and `h = (1 - l²)/y²`, and the closed loop
//! is audited by recomputing the cross curvature from the profiles alone.

mod sigma;

pub use sigma::{build_sigma0, PlateauProfile, Sigma0, Sigma0Certificate, Window, COLLAR_EDGE};

use crate::numerics::{
    continue_zero, integrate_ivp, newton_nd, singular_start, winding_number, ContinuationConfig,
    Dense, IntegratorConfig, NewtonConfig, NumericsError, PathPoint, SingularKernel, StartState,
    WindingCertificate,
};
use crate::numerics::fit_quadratic;
use crate::profile::{
    endpoint_slope, AnalyticKind, ClampedSpline, Endpoint, OddJet, ProfileError, Radial,
};
use thiserror::Error;

/// Gate on the inward boundary slopes of a sampled profile, measured by a
/// one-sided fourth-order estimate from the raw samples. The spline itself
/// is clamped to the exact contract slopes afterwards.
pub const SLOPE_TOL: f64 = 1e-6;
/// Gate on the endpoint values `y(∓1) = 0` of a sampled profile.
pub const BOUNDARY_VALUE_TOL: f64 = 1e-9;
/// Allowed defect in the reconstruction smoothness conditions
/// `f'(-1) = h(-1)` and `f'(1) = -h(1)`.
pub const SMOOTHNESS_TOL: f64 = 1e-8;
/// Slack allowed in the a-posteriori maximum-principle check `|l| <= 1`.
pub const UNTRUNCATION_TOL: f64 = 1e-9;
/// Curvature parameters below this are treated as degenerate endpoints.
pub const DEGENERATE_CURVATURE_TOL: f64 = 1e-8;
/// Relative mismatch allowed between the endpoint scalar curvatures and the
/// extrapolated interior scalar curvature formula.
pub const SCALAR_CHECK_TOL: f64 = 1e-5;
/// The winding box for the comparison mismatch is `[0, a]²` with
/// `a = WINDING_BOX_FACTOR * α₀`; the factor leaves a margin past the
/// certified exit parameter.
pub const WINDING_BOX_FACTOR: f64 = 1.25;
/// Boundary evaluations of the mismatch below this magnitude abort the
/// winding certificate instead of risking an ambiguous angle.
pub const J_BOUNDARY_TOL: f64 = 1e-9;

/// Picard tolerance of the singular start, in the weighted update norm
/// `sup (|Δs|/τ² + |Δs'|/τ)`.
const START_TOL: f64 = 1e-13;
/// Quadrature intervals of the singular-start grid.
const START_NODES: usize = 64;
/// Distance from an endpoint (in `r`) inside which raw-ratio evaluation of
/// `X_rr` is ill-conditioned; collar rows are filled by extrapolation.
const RESIDUAL_COLLAR: f64 = 0.05;
/// Number of rows cut through the singular-start zone for output grids.
const START_ROWS: usize = 8;
/// Uniform reconstruction nodes (an even interval count keeps `r = 0` a
/// node). The spacing 2.5e-3 balances the spline truncation of the
/// residual audit's repeated differentiation against its amplification of
/// sample-level noise.
const RECON_POINTS: usize = 801;

/// Errors from the rotationally symmetric solver.
#[derive(Clone, Debug, Error)]
pub enum So3Error {
    /// The target profile fails the normalization contract.
    #[error("invalid rotationally symmetric profile: {0}")]
    ProfileInvalid(#[from] ProfileError),
    /// Engineering of the comparison coefficient failed one of its
    /// certified properties (see [`build_sigma0`] for the numbering).
    #[error("comparison coefficient construction failed property {property}")]
    ConstructionFailed {
        /// Index of the violated property.
        property: usize,
    },
    /// A shared numerical routine failed.
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    /// The monotonicity monitor `l' > 0` failed at an accepted
    /// continuation point.
    #[error("monotonicity monitor violated at p = {p}: min l' = {min_slope:.3e}")]
    MonitorViolated {
        /// Homotopy parameter of the offending point.
        p: f64,
        /// Smallest slope observed there.
        min_slope: f64,
    },
    /// The matched solution left the physical band `|l| <= 1`.
    #[error("solution escaped the physical band: max |l| - 1 = {excess:.3e}")]
    Untruncated {
        /// Amount by which `|l|` exceeded one.
        excess: f64,
    },
    /// Reconstruction found inconsistent vanishing rates at an endpoint.
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),
    /// Endpoint curvature data too degenerate for scalar curvature.
    #[error("degenerate endpoint: {0}")]
    DegenerateEndpoint(String),
}

/// Quintic smoothstep: `0` at `x <= 0`, `1` at `x >= 1`, with two vanishing
/// derivatives at both ends (so piecewise definitions glued with it are C²).
pub(crate) fn smootherstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 + x * (6.0 * x - 15.0))
}

/// The cubic nonlinearity `E(x) = x³ - x`, blended smoothly to zero between
/// `|x| = 2` and `|x| = 3`. Inside the physical band the truncation is
/// inactive (`E` is exactly the cubic for `|x| <= 2`); outside it caps the
/// growth so that every shot exists on the whole interval.
pub fn truncate_e(x: f64) -> f64 {
    let a = x.abs();
    if a <= 2.0 {
        x * x * x - x
    } else if a >= 3.0 {
        0.0
    } else {
        (x * x * x - x) * smootherstep(3.0 - a)
    }
}

/// Validated target data for the rotationally symmetric problem:
/// `Y = dr ⊗ dr + y(r)² Q` with `y > 0` on `(-1, 1)`, `y(∓1) = 0`, and
/// inward boundary slopes `y'(-1) = 1`, `y'(1) = -1`.
#[derive(Clone, Debug)]
pub struct ProfileYSo3 {
    y: Radial,
    left: OddJet,
    right: OddJet,
}

impl ProfileYSo3 {
    /// Validates a radial profile against the normalization contract and
    /// fits the endpoint jets used by the singular starts.
    pub fn new(y: Radial) -> Result<Self, So3Error> {
        let mut defects: Vec<String> = Vec::new();
        if y.domain() != (-1.0, 1.0) {
            defects.push(format!("domain {:?} is not [-1, 1]", y.domain()));
        }
        match &y {
            Radial::Analytic { kind, scale } => {
                if *kind != AnalyticKind::CosRound {
                    defects.push("analytic family does not satisfy the boundary conditions on [-1, 1]".into());
                } else if *scale != 1.0 {
                    defects.push(format!(
                        "scale {scale} breaks the unit boundary slopes y'(∓1) = ±1"
                    ));
                }
            }
            Radial::Sampled(sp) => {
                let (ts, ys) = (sp.nodes(), sp.values());
                if ys[0].abs() > BOUNDARY_VALUE_TOL {
                    defects.push(format!("y(-1) = {:e} does not vanish", ys[0]));
                }
                if ys[ys.len() - 1].abs() > BOUNDARY_VALUE_TOL {
                    defects.push(format!("y(1) = {:e} does not vanish", ys[ys.len() - 1]));
                }
                if ts.len() < 8 {
                    defects.push("need at least 8 samples to resolve the endpoint jets".into());
                } else {
                    let dl = endpoint_slope(ts, ys, Endpoint::Left);
                    let dr = -endpoint_slope(ts, ys, Endpoint::Right);
                    if (dl - 1.0).abs() > SLOPE_TOL {
                        defects.push(format!("inward slope at -1 is {dl}, not 1"));
                    }
                    if (dr - 1.0).abs() > SLOPE_TOL {
                        defects.push(format!("inward slope at 1 is {dr}, not 1"));
                    }
                }
                for (k, (&t, &v)) in ts.iter().zip(ys).enumerate() {
                    if k > 0 && k + 1 < ts.len() && v <= 0.0 {
                        defects.push(format!("y({t}) = {v} is not positive"));
                        break;
                    }
                }
            }
        }
        if !defects.is_empty() {
            return Err(ProfileError::Invalid { defects }.into());
        }
        let left = y.odd_jet(Endpoint::Left, 1.0);
        let right = y.odd_jet(Endpoint::Right, 1.0);
        Ok(Self { y, left, right })
    }

    /// The validated warping profile.
    pub fn y(&self) -> &Radial {
        &self.y
    }

    /// Orbit coefficient `σ(r) = y(r)²` of the target.
    pub fn sigma(&self, r: f64) -> f64 {
        let v = self.y.value(r);
        v * v
    }

    /// Endpoint jet of `y` in the inward coordinate.
    #[cfg(test)]
    pub(crate) fn jet(&self, at: Endpoint) -> OddJet {
        match at {
            Endpoint::Left => self.left,
            Endpoint::Right => self.right,
        }
    }
}

/// Coefficient field `ζ` of the reduced equation, with collar data at the
/// singular endpoints in cancellation-free form. The variants cover the
/// reference coefficient `(1+r)²`, the engineered comparison profiles, the
/// target `y²`, and convex blends used by the continuation.
#[derive(Clone, Debug)]
pub struct Zeta {
    mirrored: bool,
    kind: ZetaKind,
}

#[derive(Clone, Debug)]
enum ZetaKind {
    /// `ζ(r) = (1 + r)²`, the frame of the reference solution.
    Square,
    /// An engineered even comparison coefficient.
    Engineered(PlateauProfile),
    /// `ζ = y²` for a validated target profile.
    Metric { y: Radial, left: OddJet, right: OddJet },
    /// Convex combination `(1 - p) a + p b`.
    Blend { a: Box<Zeta>, b: Box<Zeta>, p: f64 },
}

impl Zeta {
    /// The reference coefficient `(1 + r)²`.
    pub fn square() -> Self {
        Zeta { mirrored: false, kind: ZetaKind::Square }
    }

    /// Wraps an engineered comparison profile.
    pub fn engineered(profile: PlateauProfile) -> Self {
        Zeta { mirrored: false, kind: ZetaKind::Engineered(profile) }
    }

    /// `ζ = y²` for a validated target.
    pub fn from_profile(p: &ProfileYSo3) -> Self {
        Zeta {
            mirrored: false,
            kind: ZetaKind::Metric { y: p.y.clone(), left: p.left, right: p.right },
        }
    }

    /// Convex blend `(1 - p) a + p b`.
    pub fn blend(a: &Zeta, b: &Zeta, p: f64) -> Self {
        Zeta {
            mirrored: false,
            kind: ZetaKind::Blend { a: Box::new(a.clone()), b: Box::new(b.clone()), p },
        }
    }

    /// The reflected coefficient `r ↦ ζ(-r)`.
    pub fn mirrored(&self) -> Zeta {
        let mut z = self.clone();
        z.mirrored = !z.mirrored;
        z
    }

    /// Coefficient value at `r`.
    pub fn value(&self, r: f64) -> f64 {
        let r = if self.mirrored { -r } else { r };
        match &self.kind {
            ZetaKind::Square => (1.0 + r) * (1.0 + r),
            ZetaKind::Engineered(p) => p.value(r),
            ZetaKind::Metric { y, .. } => {
                let v = y.value(r);
                v * v
            }
            ZetaKind::Blend { a, b, p } => (1.0 - p) * a.value(r) + p * b.value(r),
        }
    }

    /// Collar deviation `(ζ(τ) - τ²)/τ⁴` at inward distance `τ` from an
    /// endpoint, finite at `τ = 0`. For coefficients with exact parabolic
    /// collars this is identically zero.
    fn dev4(&self, at: Endpoint, tau: f64) -> f64 {
        let at = if self.mirrored { at.flip() } else { at };
        match &self.kind {
            ZetaKind::Square => match at {
                Endpoint::Left => 0.0,
                Endpoint::Right => unreachable!("reference coefficient has no right collar"),
            },
            ZetaKind::Engineered(_) => 0.0,
            ZetaKind::Metric { left, right, .. } => {
                let j = match at {
                    Endpoint::Left => left,
                    Endpoint::Right => right,
                };
                // y = τ (c1 + c3 τ² + c5 τ⁴) with c1 = 1 by normalization:
                // (y² - τ²)/τ⁴ expanded without cancellation.
                let t2 = tau * tau;
                2.0 * j.c3
                    + (j.c3 * j.c3 + 2.0 * j.c5) * t2
                    + 2.0 * j.c3 * j.c5 * t2 * t2
                    + j.c5 * j.c5 * t2 * t2 * t2
            }
            ZetaKind::Blend { a, b, p } => (1.0 - p) * a.dev4(at, tau) + p * b.dev4(at, tau),
        }
    }

    /// `1/ζ - 1/τ²` at inward distance `τ` from the left endpoint of the
    /// shot (after mirroring), in cancellation-free form.
    fn inv_defect_left(&self, tau: f64) -> f64 {
        let d = self.dev4(Endpoint::Left, tau);
        -d / (1.0 + tau * tau * d)
    }
}

/// Tuning knobs shared by the rotationally symmetric pipelines.
#[derive(Clone, Debug)]
pub struct So3Config {
    /// Integrator tolerances and the singular handoff distance.
    pub integrator: IntegratorConfig,
    /// Corrector settings for mismatch zeros.
    pub newton: NewtonConfig,
    /// Homotopy stepping.
    pub continuation: ContinuationConfig,
    /// Node count of the uniform base of output and residual grids.
    pub grid: usize,
}

impl Default for So3Config {
    fn default() -> Self {
        // Mismatch evaluations inherit ~2e-12 of integrator noise, so the
        // corrector target sits just above that floor.
        let newton = NewtonConfig { tol: 1e-11, ..NewtonConfig::default() };
        let continuation = ContinuationConfig { newton: newton.clone(), ..ContinuationConfig::default() };
        // The error control would happily take 0.1-wide steps where the
        // solution is locally flat, but the reconstruction differentiates
        // splines through the accepted nodes, whose truncation error grows
        // like the fourth power of the knot spacing: keep steps small.
        let integrator = IntegratorConfig { max_step: 0.02, ..IntegratorConfig::default() };
        Self {
            integrator,
            newton,
            continuation,
            grid: 2001,
        }
    }
}

/// One shot of the reduced equation from a singular endpoint: Picard start
/// data on the collar plus the dense Runge-Kutta solution beyond it. A
/// mirrored shot represents `r ↦ -l(-r)` and is evaluated in the caller's
/// coordinates transparently.
#[derive(Clone, Debug)]
pub struct Shot {
    /// Endpoint curvature parameter (`α` for minus shots, `β` for plus).
    pub alpha: f64,
    start: StartState<1>,
    dense: Dense<2>,
    mirrored: bool,
}

impl Shot {
    /// Value and slope of `l` at `r` in the caller's coordinates.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        if self.mirrored {
            let (l, lp) = self.eval_raw(-r);
            (-l, lp)
        } else {
            self.eval_raw(r)
        }
    }

    fn eval_raw(&self, r: f64) -> (f64, f64) {
        let tau = r + 1.0;
        let eps = self.start.grid.eps();
        if tau < eps {
            let (s, sp) = self.start.eval(0, tau.max(0.0));
            (s + 0.5 * self.alpha * tau * tau - 1.0, sp + self.alpha * tau)
        } else {
            let y = self.dense.eval(r);
            (y[0], y[1])
        }
    }

    /// `(1 + l)` at inward distance `τ` from the shot's own singular
    /// endpoint, in a form that keeps relative accuracy on the collar.
    pub(crate) fn one_plus_l(&self, tau: f64) -> f64 {
        let eps = self.start.grid.eps();
        if tau < eps {
            let (s, _) = self.start.eval(0, tau.max(0.0));
            s + 0.5 * self.alpha * tau * tau
        } else {
            1.0 + self.dense.eval(-1.0 + tau)[0]
        }
    }

    /// Handoff distance of the singular start.
    pub fn eps(&self) -> f64 {
        self.start.grid.eps()
    }

    /// The dense span past the collar, in raw (left-endpoint) coordinates.
    pub(crate) fn dense(&self) -> &Dense<2> {
        &self.dense
    }

    /// State at the far end of the dense span, in caller coordinates.
    pub fn match_state(&self) -> (f64, f64) {
        let y = *self.dense.ys.last().expect("dense span has nodes");
        if self.mirrored {
            (-y[0], y[1])
        } else {
            (y[0], y[1])
        }
    }

    /// Smallest slope over all accepted nodes except the singular endpoint
    /// itself (where `l' = 0` identically).
    pub fn min_slope(&self) -> f64 {
        let mut m = f64::INFINITY;
        for (i, &t) in self.start.grid.ts.iter().enumerate().skip(1) {
            m = m.min(self.start.sp[0][i] + self.alpha * t);
        }
        for y in &self.dense.ys {
            m = m.min(y[1]);
        }
        m
    }

    /// Largest `|l|` over all accepted nodes.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for (i, &t) in self.start.grid.ts.iter().enumerate() {
            m = m.max((self.start.s[0][i] + 0.5 * self.alpha * t * t - 1.0).abs());
        }
        for y in &self.dense.ys {
            m = m.max(y[0].abs());
        }
        m
    }

    /// Accepted dense nodes (and optionally their midpoints), in caller
    /// coordinates. At nodes the dense output is exact to integrator
    /// accuracy; at step midpoints the leading dense-output *derivative*
    /// error vanishes as well, so these are the only rows where sampled
    /// derivatives are clean enough to spline-differentiate.
    fn refinement_nodes(&self, midpoints: bool) -> Vec<f64> {
        let sign = if self.mirrored { -1.0 } else { 1.0 };
        let mut out = Vec::with_capacity(2 * self.dense.ts.len());
        for w in self.dense.ts.windows(2) {
            out.push(sign * w[0]);
            if midpoints {
                out.push(sign * 0.5 * (w[0] + w[1]));
            }
        }
        if let Some(&t) = self.dense.ts.last() {
            out.push(sign * t);
        }
        out
    }
}

/// Core shooting routine in raw (left-endpoint) coordinates: Picard start
/// on `[0, ε]` for the substitution `l = s + α τ²/2 - 1`, then adaptive
/// integration of `l'' = E(l)/ζ` up to `r_end`.
pub(crate) fn shot_core(
    zeta: &Zeta,
    alpha: f64,
    r_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Shot, NumericsError> {
    let source = |grid: &crate::numerics::VolterraGrid,
                  s: &[Vec<f64>; 1],
                  _sp: &[Vec<f64>; 1]|
     -> [Vec<f64>; 1] {
        let out = grid
            .ts
            .iter()
            .enumerate()
            .map(|(i, &tau)| {
                // W = (1 + l)/τ² = s/τ² + α/2, finite at the endpoint.
                let w = if i == 0 {
                    0.5 * alpha
                } else {
                    s[0][i] / (tau * tau) + 0.5 * alpha
                };
                let v = w * tau * tau;
                let szeta = zeta.inv_defect_left(tau);
                tau * w * (w * (v - 3.0) + (v * v - 3.0 * v + 2.0) * szeta)
            })
            .collect();
        [out]
    };
    let start = singular_start(
        [SingularKernel::Cone],
        &source,
        cfg.singular_offset,
        START_NODES,
        START_TOL,
    )?;
    let eps = start.grid.eps();
    let n = start.grid.len() - 1;
    let l0 = start.s[0][n] + 0.5 * alpha * eps * eps - 1.0;
    let lp0 = start.sp[0][n] + alpha * eps;
    let rhs = |r: f64, y: &[f64; 2]| [y[1], truncate_e(y[0]) / zeta.value(r)];
    let dense = integrate_ivp(&rhs, -1.0 + eps, r_end, [l0, lp0], cfg)?;
    Ok(Shot { alpha, start, dense, mirrored: false })
}

/// Shot from the left singular orbit with `l''(-1) = α`, integrated to the
/// matching point `r = 0`.
pub fn shoot_minus(zeta: &Zeta, alpha: f64) -> Result<Shot, So3Error> {
    Ok(shot_core(zeta, alpha, 0.0, &IntegratorConfig::default())?)
}

/// Shot from the right singular orbit with `-l''(1) = β`, integrated back
/// to the matching point; the result is evaluated in the original
/// coordinates on `[0, 1]`.
pub fn shoot_plus(zeta: &Zeta, beta: f64) -> Result<Shot, So3Error> {
    Ok(shot_plus_core(zeta, beta, &IntegratorConfig::default())?)
}

fn shot_plus_core(zeta: &Zeta, beta: f64, cfg: &IntegratorConfig) -> Result<Shot, NumericsError> {
    let mut shot = shot_core(&zeta.mirrored(), beta, 0.0, cfg)?;
    shot.mirrored = true;
    Ok(shot)
}

/// Planar matching mismatch at `r = 0`:
/// `J(α, β) = (l₊(0) - l₋(0), l₊'(0) - l₋'(0))`.
pub fn j_mismatch(zeta: &Zeta, alpha: f64, beta: f64) -> Result<[f64; 2], So3Error> {
    Ok(j_core(zeta, alpha, beta, &IntegratorConfig::default())?)
}

fn j_core(
    zeta: &Zeta,
    alpha: f64,
    beta: f64,
    cfg: &IntegratorConfig,
) -> Result<[f64; 2], NumericsError> {
    let minus = shot_core(zeta, alpha, 0.0, cfg)?;
    let plus = shot_plus_core(zeta, beta, cfg)?;
    let (lm, lpm) = minus.match_state();
    let (lp, lpp) = plus.match_state();
    Ok([lp - lm, lpp - lpm])
}

/// Winding number of the comparison mismatch `J₀ = J(σ₀, ·, ·)` around the
/// boundary of the box `[0, a]²`, `a = 1.25 α₀`, traversed anticlockwise.
/// Returns the certificate and the box size.
pub fn j0_winding(cfg: &So3Config) -> Result<(WindingCertificate, f64), So3Error> {
    let s0 = build_sigma0()?;
    let zeta0 = Zeta::engineered(s0.profile.clone());
    let a = WINDING_BOX_FACTOR * s0.certificate.alpha0;
    let mut f = |al: f64, be: f64| j_core(&zeta0, al, be, &cfg.integrator);
    let vertices = [(0.0, 0.0), (a, 0.0), (a, a), (0.0, a)];
    let cert = winding_number(&mut f, &vertices, 12, J_BOUNDARY_TOL)?;
    Ok((cert, a))
}

/// A matched solution of the rotationally symmetric problem.
#[derive(Clone, Debug)]
pub struct SolutionSo3 {
    /// The validated target.
    pub profile: ProfileYSo3,
    /// Left endpoint curvature parameter `l''(-1)`.
    pub alpha: f64,
    /// Right endpoint curvature parameter `-l''(1)`.
    pub beta: f64,
    minus: Shot,
    plus: Shot,
    /// Continuation path from the comparison coefficient to the target,
    /// with the minimum slope monitor recorded at each accepted point.
    pub path: Vec<PathPoint>,
    /// Certificate of the comparison coefficient used as the anchor.
    pub sigma0: Sigma0Certificate,
    /// The anchor zero of the comparison mismatch at `p = 0`.
    pub anchor: [f64; 2],
    grid_hint: usize,
}

impl SolutionSo3 {
    /// Value and slope of the matched `l` at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        if r < 0.0 {
            self.minus.eval(r)
        } else {
            self.plus.eval(r)
        }
    }

    /// C¹ mismatch of the two halves at the matching point.
    pub fn match_defect(&self) -> [f64; 2] {
        let (lm, lpm) = self.minus.match_state();
        let (lp, lpp) = self.plus.match_state();
        [lp - lm, lpp - lpm]
    }

    /// Largest `|l|` over all accepted nodes of both halves.
    pub fn max_abs_l(&self) -> f64 {
        self.minus.max_abs().max(self.plus.max_abs())
    }

    /// Smallest slope over all accepted nodes of both halves (excluding
    /// the singular endpoints where `l' = 0` identically).
    pub fn min_slope(&self) -> f64 {
        self.minus.min_slope().min(self.plus.min_slope())
    }

    fn assemble_grid(&self, base: Option<usize>, midpoints: bool) -> Vec<f64> {
        let mut rs: Vec<f64> = Vec::new();
        if let Some(n) = base {
            let n = n.max(11);
            for i in 0..n {
                rs.push(-1.0 + 2.0 * i as f64 / (n - 1) as f64);
            }
        }
        rs.extend(self.minus.refinement_nodes(midpoints));
        rs.extend(self.plus.refinement_nodes(midpoints));
        for k in 1..=START_ROWS {
            let frac = k as f64 / START_ROWS as f64;
            rs.push(-1.0 + self.minus.eps() * frac);
            rs.push(1.0 - self.plus.eps() * frac);
        }
        rs.push(0.0);
        rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out = Vec::with_capacity(rs.len());
        out.push(-1.0);
        for &r in &rs {
            if r - out.last().unwrap() > 1e-9 && r < 1.0 - 1e-9 {
                out.push(r);
            }
        }
        out.push(1.0);
        out
    }

    /// The output grid: a uniform base refined by both shots' accepted
    /// nodes and midpoints and by rows through the singular-start collars.
    /// Suitable for value-level evaluation (`l`, `l'`, spline columns).
    pub fn output_grid(&self) -> Vec<f64> {
        self.assemble_grid(Some(self.grid_hint), true)
    }

    /// `1 - l²` at `r`, stable on both collars.
    fn one_minus_l2(&self, r: f64) -> f64 {
        if r < 0.0 {
            let u = self.minus.one_plus_l(1.0 + r);
            u * (2.0 - u)
        } else {
            // Mirrored shot: 1 - l(r)² = (1 + l_raw(-r)) (2 - (1 + l_raw(-r))).
            let u = self.plus.one_plus_l(1.0 - r);
            u * (2.0 - u)
        }
    }

    /// The reconstructed coefficient `h = (1 - l²)/y²`. The numerator is
    /// computed through the collar-stable `1 + l`, so a single formula
    /// serves the whole open interval (a branch switch would plant a kink
    /// in the sampled field that spline differentiation amplifies); the
    /// exact endpoint values are the curvature parameters.
    fn h_value(&self, r: f64) -> f64 {
        if 1.0 + r <= 0.0 {
            return self.alpha;
        }
        if 1.0 - r <= 0.0 {
            return self.beta;
        }
        self.one_minus_l2(r) / self.profile.sigma(r)
    }
}

/// Solves `X(g) = Y` for the validated target: finds the comparison
/// anchor zero, carries it to the target coefficient by continuation in
/// `ζ_p = (1-p) σ₀ + p y²`, audits the monotonicity monitor and the
/// maximum principle, and returns the matched solution.
pub fn solve(profile: &ProfileYSo3, cfg: &So3Config) -> Result<SolutionSo3, So3Error> {
    let s0 = build_sigma0()?;
    let zeta0 = Zeta::engineered(s0.profile.clone());
    let target = Zeta::from_profile(profile);
    let a_max = WINDING_BOX_FACTOR * s0.certificate.alpha0;

    // The comparison coefficient is even, so the mismatch vanishes on the
    // diagonal α = β exactly in its second component; the anchor reduces to
    // a one-dimensional sign change of l(0) in α.
    let value_at_zero = |a: f64| -> Result<f64, NumericsError> {
        Ok(shot_core(&zeta0, a, 0.0, &cfg.integrator)?.match_state().0)
    };
    let (mut lo, mut hi) = (0.0f64, a_max);
    let f_hi = value_at_zero(hi)?;
    if f_hi <= 0.0 {
        return Err(So3Error::ConstructionFailed { property: 4 });
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if value_at_zero(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * a_max {
            break;
        }
    }
    let a_hat = 0.5 * (lo + hi);

    let mut fj0 = |z: &[f64]| -> Result<Vec<f64>, NumericsError> {
        Ok(j_core(&zeta0, z[0], z[1], &cfg.integrator)?.to_vec())
    };
    let (anchor, _) = newton_nd(&mut fj0, &[a_hat, a_hat], &cfg.newton)?;

    let mut f = |p: f64, z: &[f64]| -> Result<Vec<f64>, NumericsError> {
        let zeta = Zeta::blend(&zeta0, &target, p);
        Ok(j_core(&zeta, z[0], z[1], &cfg.integrator)?.to_vec())
    };
    let mut monitor = |p: f64, z: &[f64]| -> f64 {
        let zeta = Zeta::blend(&zeta0, &target, p);
        let minus = shot_core(&zeta, z[0], 0.0, &cfg.integrator);
        let plus = shot_plus_core(&zeta, z[1], &cfg.integrator);
        match (minus, plus) {
            (Ok(a), Ok(b)) => a.min_slope().min(b.min_slope()),
            _ => f64::NEG_INFINITY,
        }
    };
    let path = continue_zero(&mut f, &mut monitor, 0.0, 1.0, &anchor, &cfg.continuation)?;
    for pt in &path {
        if !(pt.monitor > 0.0) {
            return Err(So3Error::MonitorViolated { p: pt.p, min_slope: pt.monitor });
        }
    }

    let z = path.last().expect("path includes its endpoints").z.clone();
    let minus = shot_core(&target, z[0], 0.0, &cfg.integrator)?;
    let plus = shot_plus_core(&target, z[1], &cfg.integrator)?;
    let sol = SolutionSo3 {
        profile: profile.clone(),
        alpha: z[0],
        beta: z[1],
        minus,
        plus,
        path,
        sigma0: s0.certificate,
        anchor: [anchor[0], anchor[1]],
        grid_hint: cfg.grid,
    };
    let excess = sol.max_abs_l() - 1.0;
    if excess > UNTRUNCATION_TOL {
        return Err(So3Error::Untruncated { excess });
    }
    Ok(sol)
}

/// Solution metric profiles of the rotationally symmetric problem.
#[derive(Clone, Debug)]
pub struct MetricSo3 {
    /// Radial coefficient `h` on `[-1, 1]`.
    pub h: Radial,
    /// Orbit coefficient `f` on `[-1, 1]`.
    pub f: Radial,
}

/// Reconstructs the solution metric profiles `f = l'` and
/// `h = (1 - l²)/y²` on the output grid, with the endpoint values taken
/// from the curvature parameters (the quadratic vanishing rates of
/// numerator and denominator). Fails when an independent estimate of
/// `f'(∓1)` disagrees with `±h(∓1)` beyond [`SMOOTHNESS_TOL`].
pub fn reconstruct(sol: &SolutionSo3) -> Result<MetricSo3, So3Error> {
    // The residual audit differentiates the reconstructed splines twice,
    // which amplifies knot-frequency error structure by the square of the
    // inverse knot gap. Dense-output *values* are clean at every phase
    // while sampled *slopes* are clean only at step-dependent rows, so f
    // is rebuilt from values alone: f' = -l·h is sampled on a uniform
    // grid and integrated exactly through its spline. That keeps every
    // error field smooth and the knots uniform, and smooth error fields
    // differentiate benignly.
    let n = RECON_POINTS;
    let mut rs = Vec::with_capacity(n);
    for k in 0..n {
        rs.push(-1.0 + 2.0 * k as f64 / (n - 1) as f64);
    }
    let mut hv = Vec::with_capacity(n);
    let mut wv = Vec::with_capacity(n);
    for &r in &rs {
        let h = sol.h_value(r);
        hv.push(h);
        wv.push(-sol.eval(r).0 * h);
    }
    let dw0 = endpoint_slope(&rs, &wv, Endpoint::Left);
    let dw1 = endpoint_slope(&rs, &wv, Endpoint::Right);
    let wsp = ClampedSpline::new(rs.clone(), wv, dw0, dw1).map_err(So3Error::from)?;
    let mut fv = wsp.prefix_integrals();
    // The orbit closes at the right pole, so the exact integral vanishes
    // there; spread the residual quadrature defect as a linear ramp.
    let closure = fv[n - 1];
    for (f, &r) in fv.iter_mut().zip(&rs) {
        *f -= closure * 0.5 * (r + 1.0);
    }
    fv[0] = 0.0;
    fv[n - 1] = 0.0;

    let df_left = endpoint_slope(&rs, &fv, Endpoint::Left);
    let df_right = endpoint_slope(&rs, &fv, Endpoint::Right);
    let defect_left = (df_left - sol.alpha).abs();
    let defect_right = (df_right + sol.beta).abs();
    if defect_left > SMOOTHNESS_TOL || defect_right > SMOOTHNESS_TOL {
        return Err(So3Error::DegenerateProfile(format!(
            "endpoint rates disagree: |f'(-1) - h(-1)| = {defect_left:.3e}, \
             |f'(1) + h(1)| = {defect_right:.3e}"
        )));
    }

    let dh0 = endpoint_slope(&rs, &hv, Endpoint::Left);
    let dh1 = endpoint_slope(&rs, &hv, Endpoint::Right);
    let f = ClampedSpline::new(rs.clone(), fv, sol.alpha, -sol.beta).map_err(So3Error::from)?;
    let h = ClampedSpline::new(rs, hv, dh0, dh1).map_err(So3Error::from)?;
    Ok(MetricSo3 { h: Radial::Sampled(h), f: Radial::Sampled(f) })
}

/// Cross curvature components of a rotationally symmetric metric on its
/// evaluation grid.
#[derive(Clone, Debug)]
pub struct CrossSo3 {
    /// Evaluation nodes.
    pub rs: Vec<f64>,
    /// `dr ⊗ dr` component.
    pub x_rr: Vec<f64>,
    /// Orbit component (the coefficient of `Q`).
    pub x_qq: Vec<f64>,
}

/// Computes the cross curvature of the metric given by profiles `(h, f)`
/// from the profiles alone: `l = -f'/h` by spline differentiation, then
///
/// ```text
/// X_rr = (l')² / f²,   X_QQ = l' (1 - l²) / (h f).
/// ```
///
/// The raw ratio for `X_rr` is a 0/0 limit at the singular orbits; rows
/// closer than a small collar are filled by quadratic extrapolation from
/// the adjacent well-conditioned band.
pub fn forward_cross(g: &MetricSo3) -> Result<CrossSo3, So3Error> {
    let rs: Vec<f64> = match &g.f {
        Radial::Sampled(sp) => sp.nodes().to_vec(),
        _ => g.f.sample_uniform(2001).0,
    };
    let n = rs.len();
    let (r0, r1) = (rs[0], rs[n - 1]);

    let mut lv = Vec::with_capacity(n);
    for &r in &rs {
        let h = g.h.value(r);
        if !(h > 0.0) {
            return Err(So3Error::DegenerateProfile(format!(
                "radial coefficient is not positive at r = {r}: h = {h}"
            )));
        }
        lv.push(-g.f.deriv(r) / h);
    }
    let d0 = endpoint_slope(&rs, &lv, Endpoint::Left);
    let d1 = endpoint_slope(&rs, &lv, Endpoint::Right);
    let lsp = ClampedSpline::new(rs.clone(), lv.clone(), d0, d1).map_err(So3Error::from)?;

    let mut x_rr = vec![0.0; n];
    let mut x_qq = vec![0.0; n];
    for (i, &r) in rs.iter().enumerate() {
        let l = lv[i];
        let lp = lsp.deriv(r);
        let f = g.f.value(r);
        let h = g.h.value(r);
        x_qq[i] = lp * (1.0 - l) * (1.0 + l) / (h * f.max(f64::MIN_POSITIVE));
        let tau = (r - r0).min(r1 - r);
        if tau >= RESIDUAL_COLLAR {
            x_rr[i] = (lp / f) * (lp / f);
        } else {
            x_rr[i] = f64::NAN; // filled by extrapolation below
        }
        if i == 0 || i == n - 1 {
            x_qq[i] = 0.0;
        }
    }

    // Quadratic extrapolation of X_rr through each collar from the band
    // [collar, 3 collar] beside it.
    for side in [Endpoint::Left, Endpoint::Right] {
        let tau_of = |r: f64| match side {
            Endpoint::Left => r - r0,
            Endpoint::Right => r1 - r,
        };
        let band: Vec<(f64, f64)> = rs
            .iter()
            .enumerate()
            .filter(|(_, &r)| {
                tau_of(r) >= RESIDUAL_COLLAR && tau_of(r) <= 3.0 * RESIDUAL_COLLAR
            })
            .map(|(i, &r)| (tau_of(r), x_rr[i]))
            .collect();
        if band.len() < 3 {
            return Err(So3Error::DegenerateProfile(
                "grid too coarse to extrapolate X_rr through the singular collar".into(),
            ));
        }
        let poly = fit_quadratic(&band);
        for (i, &r) in rs.iter().enumerate() {
            let tau = tau_of(r);
            if tau < RESIDUAL_COLLAR && x_rr[i].is_nan() {
                x_rr[i] = poly[0] + tau * (poly[1] + tau * poly[2]);
            }
        }
    }
    Ok(CrossSo3 { rs, x_rr, x_qq })
}


/// Closed-loop residual data for a metric against a target orbit
/// coefficient `σ`: componentwise residual grids of `X(g) - Y`, their
/// sup-norm, and the endpoint boundary-condition defects.
#[derive(Clone, Debug)]
pub struct ResidualReport {
    /// Evaluation nodes.
    pub rs: Vec<f64>,
    /// `X_rr - 1` per node.
    pub res_rr: Vec<f64>,
    /// `X_QQ - σ` per node.
    pub res_qq: Vec<f64>,
    /// Sup-norm over both residual grids.
    pub sup: f64,
    /// `|f'(-1) - h(-1)|` and `|f'(1) + h(1)|` from independent one-sided
    /// slope estimates.
    pub smooth_defects: [f64; 2],
}

/// Audits a metric against the target `Y = dr ⊗ dr + σ Q` by recomputing
/// its cross curvature from the profiles alone.
pub fn residual_report(g: &MetricSo3, sigma: &dyn Fn(f64) -> f64) -> Result<ResidualReport, So3Error> {
    let cross = forward_cross(g)?;
    let n = cross.rs.len();
    let mut res_rr = Vec::with_capacity(n);
    let mut res_qq = Vec::with_capacity(n);
    let mut sup = 0.0f64;
    for i in 0..n {
        let rr = cross.x_rr[i] - 1.0;
        let qq = cross.x_qq[i] - sigma(cross.rs[i]);
        sup = sup.max(rr.abs()).max(qq.abs());
        res_rr.push(rr);
        res_qq.push(qq);
    }
    let (rs0, rsn) = (cross.rs[0], cross.rs[n - 1]);
    let fv: Vec<f64> = cross.rs.iter().map(|&r| g.f.value(r)).collect();
    let df0 = endpoint_slope(&cross.rs, &fv, Endpoint::Left);
    let df1 = endpoint_slope(&cross.rs, &fv, Endpoint::Right);
    let smooth_defects = [
        (df0 - g.h.value(rs0)).abs(),
        (df1 + g.h.value(rsn)).abs(),
    ];
    Ok(ResidualReport { rs: cross.rs, res_rr, res_qq, sup, smooth_defects })
}

/// Scalar curvatures of the solution metric at the two singular orbits,
/// `(6/l''(-1), -6/l''(1)) = (6/α, 6/β)`, cross-checked against the
/// extrapolated interior formula `S = 4σ/(1 - l²) + 2(1 - l²)/(l')²`.
pub fn scalar_at_singular_orbits(sol: &SolutionSo3) -> Result<[f64; 2], So3Error> {
    if sol.alpha.abs() < DEGENERATE_CURVATURE_TOL || sol.beta.abs() < DEGENERATE_CURVATURE_TOL {
        return Err(So3Error::DegenerateEndpoint(format!(
            "vanishing endpoint curvature: α = {:.3e}, β = {:.3e}",
            sol.alpha, sol.beta
        )));
    }
    let interior = |r: f64| {
        let (_, lp) = sol.eval(r);
        let oml2 = sol.one_minus_l2(r);
        4.0 * sol.profile.sigma(r) / oml2 + 2.0 * oml2 / (lp * lp)
    };
    for (end, curv, s_end) in [
        (-1.0f64, sol.alpha, 6.0 / sol.alpha),
        (1.0f64, sol.beta, 6.0 / sol.beta),
    ] {
        // Quadratic extrapolation in the distance from the endpoint, with
        // probes scaled to the endpoint feature size 1/sqrt(curvature) so
        // the model error stays cubically small for any target.
        let t_max = (0.03 / curv.abs().sqrt()).min(0.5);
        let taus = [t_max / 3.0, 2.0 * t_max / 3.0, t_max];
        let pts: Vec<(f64, f64)> = taus
            .iter()
            .map(|&t| (t, interior(end - end.signum() * t)))
            .collect();
        let poly = fit_quadratic(&pts);
        let extrap = poly[0];
        if (extrap - s_end).abs() > SCALAR_CHECK_TOL * s_end.abs().max(1.0) {
            return Err(So3Error::DegenerateEndpoint(format!(
                "interior scalar curvature extrapolates to {extrap:.8e} at r = {end}, \
                 but the endpoint rate gives {s_end:.8e}"
            )));
        }
    }
    Ok([6.0 / sol.alpha, 6.0 / sol.beta])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn round_profile() -> ProfileYSo3 {
        ProfileYSo3::new(Radial::Analytic { kind: AnalyticKind::CosRound, scale: 1.0 })
            .expect("round profile satisfies the contract")
    }

    #[test]
    fn truncation_matches_the_cubic_inside_the_band() {
        for k in 0..=4000 {
            let x = -2.0 + 4.0 * k as f64 / 4000.0;
            assert_eq!(truncate_e(x), x * x * x - x);
        }
        assert_eq!(truncate_e(2.0), 6.0);
        assert_eq!(truncate_e(-1.0), 0.0);
        assert_eq!(truncate_e(1.0), 0.0);
    }

    #[test]
    fn truncation_is_odd_capped_and_vanishes_far_out() {
        assert_eq!(truncate_e(3.0), 0.0);
        assert_eq!(truncate_e(-3.5), 0.0);
        assert_eq!(truncate_e(7.0), 0.0);
        for k in 0..=7000 {
            let x = -3.5 + k as f64 / 1000.0;
            let e = truncate_e(x);
            assert_eq!(truncate_e(-x), -e, "odd symmetry at x = {x}");
            assert!(e.abs() <= 24.0, "capped at x = {x}: {e}");
            if x.abs() > 1.0 {
                // Same sign as the raw cubic, never larger in magnitude.
                assert!(e.abs() <= (x * x * x - x).abs() + 1e-15);
                assert!(e * (x * x * x - x) >= 0.0);
            }
        }
    }

    #[test]
    fn zero_curvature_shot_is_the_constant_solution() {
        let s0 = build_sigma0().expect("comparison coefficient builds");
        let zeta = Zeta::engineered(s0.profile.clone());
        let shot = shoot_minus(&zeta, 0.0).expect("zero shot exists");
        // The constant l = -1 solves the equation exactly; every node and
        // the matching state must be bitwise exact.
        assert_eq!(shot.match_state(), (-1.0, 0.0));
        let (l, lp) = shot.eval(-0.3);
        assert!((l + 1.0).abs() < 1e-14 && lp.abs() < 1e-14);
        let j = j_mismatch(&zeta, 0.0, 0.0).expect("mismatch at the origin");
        assert_eq!(j, [2.0, 0.0]);
    }

    #[test]
    fn even_coefficient_mismatch_is_diagonal_exact() {
        let s0 = build_sigma0().expect("comparison coefficient builds");
        let zeta = Zeta::engineered(s0.profile.clone());
        let c = 0.4 * s0.certificate.alpha0;
        let j = j_mismatch(&zeta, c, c).expect("diagonal mismatch");
        // Mirrored shots on an even coefficient run the identical program:
        // the slope component cancels bitwise.
        assert_eq!(j[1], 0.0);
        let minus = shoot_minus(&zeta, c).expect("minus shot");
        assert_eq!(j[0], -2.0 * minus.match_state().0);
    }

    #[test]
    fn round_oracle_shot_hits_the_matching_values() {
        let zeta = Zeta::from_profile(&round_profile());
        let alpha = PI * PI / 4.0;
        let shot = shoot_minus(&zeta, alpha).expect("oracle shot exists");
        let (l0, lp0) = shot.match_state();
        assert!(l0.abs() <= 1e-8, "l(0) = {l0:e}");
        assert!((lp0 - FRAC_PI_2).abs() <= 1e-8, "l'(0) = {lp0}");
        for r in [-0.8, -0.5, -0.25, -0.1] {
            let (l, lp) = shot.eval(r);
            assert!((l - (FRAC_PI_2 * r).sin()).abs() <= 1e-8, "l({r})");
            assert!((lp - FRAC_PI_2 * (FRAC_PI_2 * r).cos()).abs() <= 1e-7, "l'({r})");
        }
    }

    #[test]
    fn profile_validation_rejects_bad_normalizations() {
        // Wrong scale: boundary slopes are 2, not 1.
        let bad = Radial::Analytic { kind: AnalyticKind::CosRound, scale: 2.0 };
        assert!(ProfileYSo3::new(bad).is_err());
        // Wrong family: domain [0, 1] and a non-vanishing end.
        let bad = Radial::Analytic { kind: AnalyticKind::SinHalf, scale: 1.0 };
        assert!(ProfileYSo3::new(bad).is_err());
        // Sampled with doubled values: slopes are 2.
        let n = 2001;
        let ts: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|&r| 4.0 / PI * (FRAC_PI_2 * r).cos()).collect();
        let sp = ClampedSpline::new(ts.clone(), ys, 2.0, -2.0).expect("spline builds");
        assert!(ProfileYSo3::new(Radial::Sampled(sp)).is_err());
        // Sampled that does not vanish at the ends.
        let ys: Vec<f64> = ts.iter().map(|&r| 1.0 + 0.1 * r * r).collect();
        let sp = ClampedSpline::new(ts, ys, 0.2, 0.2).expect("spline builds");
        assert!(ProfileYSo3::new(Radial::Sampled(sp)).is_err());
    }

    #[test]
    fn sampled_round_profile_validates() {
        let n = 2001;
        let ts: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|&r| 2.0 / PI * (FRAC_PI_2 * r).cos()).collect();
        let sp = ClampedSpline::new(ts, ys, 1.0, -1.0).expect("spline builds");
        let p = ProfileYSo3::new(Radial::Sampled(sp)).expect("oracle samples validate");
        // The fitted jets match the analytic expansion of (2/pi) sin(pi t/2).
        let j = p.jet(Endpoint::Left);
        assert!((j.c1 - 1.0).abs() < 1e-9);
        assert!((j.c3 + PI * PI / 24.0).abs() < 1e-6);
    }

    #[test]
    fn comparison_winding_is_minus_one() {
        let (cert, a) = j0_winding(&So3Config::default()).expect("winding certificate");
        assert_eq!(cert.winding, -1);
        assert!(cert.min_abs > J_BOUNDARY_TOL);
        let s0 = build_sigma0().expect("comparison coefficient builds");
        assert_eq!(a, WINDING_BOX_FACTOR * s0.certificate.alpha0);
    }

    #[test]
    fn round_oracle_solve_and_closed_loop() {
        let profile = round_profile();
        let cfg = So3Config::default();
        let sol = solve(&profile, &cfg).expect("oracle target solves");
        let quarter_pi2 = PI * PI / 4.0;
        assert!((sol.alpha - quarter_pi2).abs() <= 1e-6, "alpha = {}", sol.alpha);
        assert!((sol.beta - quarter_pi2).abs() <= 1e-6, "beta = {}", sol.beta);

        let mut sup = 0.0f64;
        for &r in &sol.output_grid() {
            let (l, _) = sol.eval(r);
            sup = sup.max((l - (FRAC_PI_2 * r).sin()).abs());
        }
        assert!(sup <= 1e-6, "sup |l - sin(pi r / 2)| = {sup:e}");

        let d = sol.match_defect();
        assert!(d[0].abs() <= 1e-10 && d[1].abs() <= 1e-10, "defect {d:?}");
        assert!(sol.min_slope() > 0.0);
        assert!(sol.max_abs_l() <= 1.0 + UNTRUNCATION_TOL);
        assert_eq!(sol.path.last().expect("path nonempty").p, 1.0);

        let g = reconstruct(&sol).expect("profiles reconstruct");
        let mut sup_h = 0.0f64;
        for k in 0..=400 {
            let r = -1.0 + 2.0 * k as f64 / 400.0;
            sup_h = sup_h.max((g.h.value(r) - quarter_pi2).abs());
        }
        assert!(sup_h <= 1e-6, "sup |h - pi^2/4| = {sup_h:e}");

        let report = residual_report(&g, &|r| profile.sigma(r)).expect("closed loop");
        assert!(report.sup <= 1e-6, "closed-loop residual sup = {:e}", report.sup);
        assert!(report.smooth_defects[0] <= SMOOTHNESS_TOL);
        assert!(report.smooth_defects[1] <= SMOOTHNESS_TOL);

        let scalars = scalar_at_singular_orbits(&sol).expect("endpoint scalars");
        let s_round = 24.0 / (PI * PI);
        assert!((scalars[0] - s_round).abs() <= 1e-8 * s_round);
        assert!((scalars[1] - s_round).abs() <= 1e-8 * s_round);
    }
}
