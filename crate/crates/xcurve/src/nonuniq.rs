//! Non-uniqueness of the prescribed cross curvature problem: one engineered
//! rotationally symmetric target `Y` with three geometrically distinct
//! solution metrics.
//!
//! The construction lives entirely in the comparison family of
//! [`crate::so3`]. With `σ = y²` denoting the orbit coefficient of the
//! target, every candidate solution is determined by a scalar function `l`
//! solving
//!
//! ```text
//! l'' = E(l)/σ,   l(-1) = -1,   l'(-1) = 0,   l''(-1) = α,
//! ```
//!
//! with `E(x) = x³ - x`, and the metric profiles are `f = l'` and
//! `h = (1 - l²)/σ`. Because `σ` is even and `E` is odd, `r ↦ -l(-r)`
//! solves the same equation, so C¹ gluings of shots from opposite ends are
//! again solutions. The target is engineered in three steps:
//!
//! 1. **Rescaled collar solution.** On `[-1, -7/8]` every admissible `σ`
//!    equals `(1+r)²`, where the equation has the scaling symmetry
//!    `l(r) ↦ l(√α (1+r) - 1)`. Rescaling the reference shot `l̃` (the
//!    `α = 1` shot in the frame `ζ = (1+r)²`) by `α_sm = 64 (r₀+1)²`, with
//!    `r₀` the first zero of `l̃`, puts that zero exactly on the collar
//!    edge: `l_sm(-7/8) = 0` with exit slope `l* = 8 (r₀+1) l̃'(r₀) >= 8`
//!    (the slope of a convex run from `-1` to `0` over width `1/8`).
//! 2. **Carved coefficient.** A narrow window of depth `δ² δ₀ / 16` is cut
//!    into the plateau of the certified comparison coefficient `σ₀`,
//!    producing `σ₁`; the smallness forces every matched shot of `σ₁` to
//!    exit the collar edge steeper than `l*`, while the `σ₀` zeros exit
//!    flatter than `5/7`. Along the blend `σ_p = (1-p) σ₀ + p σ₁` the zero
//!    of `K_p(α) = l^{p,α}(7/8)` therefore crosses exit slope `l*` at some
//!    `p*`; the crossing sits so close to `p = 1` that the search runs in
//!    the complement coordinate `w = 1 - p` with the blend formed as
//!    `(1-w) σ₁ + w σ₀`.
//! 3. **Gluing.** With `l_lg = l^{p*,α*}` the selected zero, the three
//!    candidates for `σ = σ_{p*}` are
//!
//!    ```text
//!    l₋ = l_sm on [-1,-7/8] ∪ -l_lg(-r) beyond,   l₊(r) = -l₋(-r),
//!    l₀ = the odd extension of l^{p*,α^},  α^ fixed by l^{p*,α^}(0) = 0.
//!    ```
//!
//!    All three match value `0` and slope `l*` at the seam `∓7/8`, hence
//!    are C¹, hence C² by the equation. They are pairwise far apart in sup
//!    norm, only `l₀` is odd, and the endpoint scalar curvatures
//!    `(6/l''(-1), -6/l''(1))` separate `l₊` from `l₀` beyond any isometry:
//!    an isometry of metrics would have to match the unordered pairs.
//!
//! Every claim is audited a posteriori. The closed-loop audit reconstructs
//! `h = (1 - l²)/σ` (collar-stable) and `f` by independent quadrature of
//! `f' = -l·h`, and evaluates the cross curvature of the reconstructed
//! metric in factored form: with `D = (l' - f)/f`,
//!
//! ```text
//! X_rr - 1 = (l'/f)² - 1 = D (D + 2),       (X_QQ - σ)/σ = D,
//! ```
//!
//! so one well-conditioned field carries both components. The orbit
//! residual is audited relative to `σ` because the engineered coefficient
//! spans many decades between its window floor and its plateau.

use crate::numerics::{
    continue_zero, degree_1d, newton_nd, IntegratorConfig, NumericsError, PathPoint,
};
use crate::so3::{
    build_sigma0, shot_core, PlateauProfile, Shot, Sigma0, So3Config, So3Error, Window, Zeta,
    COLLAR_EDGE,
};
use thiserror::Error;

/// Seam of the gluing: the collar edge `|r| = 7/8`.
const GLUE: f64 = COLLAR_EDGE;
/// Allowed C¹ defect (value and slope) of the gluings at the seam.
pub const GLUE_TOL: f64 = 1e-7;
/// Allowed deviation of the odd candidate from exact oddness.
pub const ODDNESS_TOL: f64 = 1e-8;
/// Sup-norm separation certifying that two candidates are distinct, and
/// that the glued candidates genuinely fail oddness.
pub const DISTINCT_MIN: f64 = 1e-2;
/// Sup bound on the audited equation and cross-curvature residuals.
pub const RESIDUAL_TOL: f64 = 1e-5;
/// Required accuracy of the exit-slope monitor at the selected blend.
pub const MONITOR_TOL: f64 = 1e-8;
/// Minimal gap between the endpoint scalar curvatures of the glued and the
/// odd candidates (the isometry obstruction).
pub const OBSTRUCTION_MIN: f64 = 1e-6;
/// Certified lower bound for the rescaled collar exit slope `l*`.
pub const L_STAR_MIN: f64 = 8.0;

/// Right end of the reference integration; the first zero of the reference
/// solution happens long before, and the truncation of `E` makes the slack
/// harmless.
const REFERENCE_END: f64 = 15.0;
/// Exit-slope bound for zeros of the uncarved comparison map `K₀`.
const EXIT_SLOPE_BOUND: f64 = 5.0 / 7.0;
/// Internal target for the slope monitor; the contract is [`MONITOR_TOL`],
/// the endgame usually lands much deeper.
const MONITOR_TARGET: f64 = 1e-11;
/// Complement cap of the continuation leg: plain continuation in `p` runs
/// to `p = 1 - W_CAP` (dyadic, so the complement is exact); the window is
/// still shallow there, and the remaining sliver is bisected in `w`.
const W_CAP: f64 = 1.0 / 1024.0;
/// A corrected zero qualifies for selection only if its residual exit
/// value is this small; at the selected blend the zero is shallow enough
/// for the corrector to reach it.
const SELECT_VALUE_TOL: f64 = 1e-9;
/// Loose sanity bound on the corrector residual at the deep-end probe,
/// where the zero is so steep in α that one ulp moves the exit value past
/// any tight tolerance; only the monitor sign is read there.
const PROBE_VALUE_TOL: f64 = 1e-3;
/// Quadrature sub-intervals per smooth piece of the audit grid.
const AUDIT_NODES: usize = 1024;
/// Audit rows are thinned by this stride for the emitted field tables.
const TABLE_STRIDE: usize = 8;
/// Distance from the poles inside which the 0/0 ratio field of the audit
/// is skipped; there the collar representation is exact by construction.
const AUDIT_MARGIN: f64 = 1e-2;
/// Slope fields below this magnitude are skipped by the ratio audit (the
/// numerator vanishes at the same points, so nearby rows carry the
/// information).
const RATIO_FLOOR: f64 = 1e-9;
/// Uniform sample count of the distinctness and oddness scans.
const SCAN_POINTS: usize = 2001;

/// Errors of the non-uniqueness pipeline.
#[derive(Clone, Debug, Error)]
pub enum NonUniqError {
    /// A comparison-coefficient or shooting building block failed.
    #[error(transparent)]
    So3(#[from] So3Error),
    /// A shared numerical routine failed.
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    /// A bound required by the construction cannot be met.
    #[error("infeasible construction bound: {0}")]
    InfeasibleBound(String),
    /// The exit-slope monitor does not change sign along the zero path.
    #[error(
        "exit-slope monitor does not change sign along the blend: \
         m(0) = {m_start:.6e}, m(1) = {m_end:.6e}"
    )]
    NoSignChange {
        /// Monitor at the uncarved end of the path.
        m_start: f64,
        /// Monitor at the carved end of the path.
        m_end: f64,
    },
    /// A gluing is not C¹ within [`GLUE_TOL`].
    #[error("gluing defect {defect:.3e} at the seam exceeds the tolerance")]
    GluingDefect {
        /// Worst value-or-slope defect at the seam.
        defect: f64,
    },
    /// The odd candidate deviates from oddness.
    #[error("odd candidate deviates from oddness by {defect:.3e}")]
    OddnessDefect {
        /// Sup of `|l₀(r) + l₀(-r)|`.
        defect: f64,
    },
    /// An audited residual exceeds [`RESIDUAL_TOL`].
    #[error("{which} residual too large: sup = {sup:.3e}")]
    ResidualTooLarge {
        /// Which candidate and component failed.
        which: String,
        /// The offending sup.
        sup: f64,
    },
    /// The endpoint scalar curvatures fail to separate the candidates.
    #[error("endpoint scalar curvatures too close to certify: gap = {gap:.3e}")]
    ObstructionDegenerate {
        /// Smallest gap between the glued and odd curvature values.
        gap: f64,
    },
    /// An internal bracket, anchor, or consistency check failed.
    #[error("degenerate construction data: {0}")]
    Degenerate(String),
}

// ---------------------------------------------------------------------------
// Step 1: the rescaled collar solution.
// ---------------------------------------------------------------------------

/// The rescaled reference solution `l_sm(r) = l̃(√α_sm (1+r) - 1)` on
/// `[-1, -7/8]`, where `l̃` is the reference shot (`ζ = (1+r)²`,
/// `l̃''(-1) = 1`) and `α_sm = 64 (r₀+1)²` places the first zero `r₀` of
/// `l̃` on the collar edge. The scaling symmetry of the collar equation
/// makes `l_sm` an exact solution of `l'' = E(l)/(1+r)²` with
/// `l_sm(-1) = -1`, `l_sm(-7/8) = 0`, `l_sm'(-7/8) = l*`.
#[derive(Clone, Debug)]
pub struct LsmData {
    reference: Shot,
    /// First zero of the reference solution.
    pub r0: f64,
    /// Left endpoint curvature `l_sm''(-1) = α_sm`.
    pub alpha_sm: f64,
    /// Exit slope `l* = l_sm'(-7/8) = 8 (r₀+1) l̃'(r₀)`.
    pub l_star: f64,
}

impl LsmData {
    /// `√α_sm`, the argument rescaling factor.
    fn scale(&self) -> f64 {
        8.0 * (self.r0 + 1.0)
    }

    /// Value and slope of `l_sm` at `r ∈ [-1, -7/8]`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let s = self.scale();
        let (v, d) = self.reference.eval(s * (1.0 + r) - 1.0);
        (v, s * d)
    }

    /// Collar-stable `1 + l_sm` at inward distance `τ` from `r = -1`.
    fn one_plus_l(&self, tau: f64) -> f64 {
        self.reference.one_plus_l(self.scale() * tau)
    }
}

/// Builds the rescaled collar solution from a fresh reference shot and
/// certifies its contract: endpoint data exact, seam value below the glue
/// tolerance, exit slope at least [`L_STAR_MIN`], and `l̃` increasing
/// inside `[-1, 0]` up to its first zero (which gives `l_sm' > 0` and, by
/// the sign of `E` on `[-1, 0]`, `l_sm'' >= 0`).
pub fn compute_lsm(cfg: &IntegratorConfig) -> Result<LsmData, NonUniqError> {
    let reference = shot_core(&Zeta::square(), 1.0, REFERENCE_END, cfg)?;
    let r0 = reference
        .dense()
        .first_crossing(0, 0.0)
        .ok_or_else(|| NonUniqError::Degenerate("reference solution has no zero".into()))?;
    let scale = 8.0 * (r0 + 1.0);
    let data = LsmData {
        l_star: scale * reference.eval(r0).1,
        alpha_sm: scale * scale,
        r0,
        reference,
    };

    let (v_end, d_end) = data.eval(-1.0);
    if (v_end + 1.0).abs() > 1e-14 || d_end.abs() > 1e-14 {
        return Err(NonUniqError::Degenerate(format!(
            "rescaled endpoint data ({v_end}, {d_end}) is not (-1, 0)"
        )));
    }
    let (v_seam, d_seam) = data.eval(-GLUE);
    if v_seam.abs() > 1e-9 {
        return Err(NonUniqError::Degenerate(format!(
            "rescaled zero misses the collar edge by {v_seam:.3e}"
        )));
    }
    if (d_seam - data.l_star).abs() > 1e-12 * data.l_star {
        return Err(NonUniqError::Degenerate(
            "seam slope disagrees with the rescaled reference slope".into(),
        ));
    }
    if !(data.l_star >= L_STAR_MIN) {
        return Err(NonUniqError::InfeasibleBound(format!(
            "collar exit slope {:.6} is below {L_STAR_MIN}",
            data.l_star
        )));
    }
    for k in 1..=256 {
        let x = -1.0 + (r0 + 1.0) * k as f64 / 256.0;
        let (v, d) = data.reference.eval(x);
        if !(d > 0.0) {
            return Err(NonUniqError::Degenerate(format!(
                "reference slope is not positive at {x}"
            )));
        }
        if !(-1.0 - 1e-9 <= v && v <= 1e-9) {
            return Err(NonUniqError::Degenerate(format!(
                "reference value {v} leaves [-1, 0] before its zero"
            )));
        }
    }
    Ok(data)
}

// ---------------------------------------------------------------------------
// Step 2: the carved coefficient σ₁.
// ---------------------------------------------------------------------------

/// The carved comparison coefficient `σ₁` with the case-analysis data that
/// sized its window.
#[derive(Clone, Debug)]
pub struct Sigma1Data {
    /// The coefficient: `σ₀`'s tuned plateau with a window of depth
    /// `δ² δ₀ / 16` carved over `7/8 - 2δ <= |r| <= 7/8 - δ`.
    pub profile: PlateauProfile,
    /// Window scale `δ = min{1/(2(l*+1)), 7/16}`.
    pub delta: f64,
    /// Cubic floor `δ₀ = min{x³ - x : x ∈ [-1+δ, -8δ/15]}`.
    pub delta0: f64,
}

/// Carves the window into the comparison plateau. The window parameters
/// come from the forcing argument: if a matched shot exited the collar
/// edge no steeper than `l*`, it would have to cross the window band with
/// values in `[-1+δ, -8δ/15]`, where `E(l) >= δ₀ > 0`; a floor below
/// `δ² δ₀ / 2` then forces more slope gain across the window than the exit
/// could absorb. The smoothed ramps dilute part of that gain, so the floor
/// is carved to a quarter of the bound's half — `δ² δ₀ / 16` — which
/// restores the margin while staying strictly under the bound. The profile
/// keeps `σ₀`'s blend layer and plateau so the whole blend family shares
/// one collar and one plateau.
pub fn build_sigma1(s0: &Sigma0, l_star: f64) -> Result<Sigma1Data, NonUniqError> {
    if !(l_star >= L_STAR_MIN) {
        return Err(NonUniqError::InfeasibleBound(format!(
            "exit slope {l_star} is below {L_STAR_MIN}"
        )));
    }
    let delta = (0.5 / (l_star + 1.0)).min(7.0 / 16.0);
    let (a, b) = (-1.0 + delta, -8.0 * delta / 15.0);
    if !(a < b) {
        return Err(NonUniqError::InfeasibleBound(format!(
            "empty case interval [{a}, {b}]"
        )));
    }
    // x³ - x is concave for x < 0, so the minimum sits at an endpoint; the
    // scan is a cheap guard against parameter drift.
    let mut delta0 = f64::INFINITY;
    for k in 0..=4096 {
        let x = a + (b - a) * k as f64 / 4096.0;
        delta0 = delta0.min(x * x * x - x);
    }
    if !(delta0 > 0.0) {
        return Err(NonUniqError::InfeasibleBound(format!(
            "case floor δ₀ = {delta0:.3e} is not positive"
        )));
    }
    let window = Window {
        lo: COLLAR_EDGE - 2.0 * delta,
        hi: COLLAR_EDGE - delta,
        floor: 0.0625 * delta * delta * delta0,
        ramp: 0.25 * delta,
    };
    if window.lo - window.ramp <= 0.0 {
        return Err(NonUniqError::InfeasibleBound(
            "window ramp reaches the origin".into(),
        ));
    }
    if window.hi + window.ramp >= COLLAR_EDGE - s0.profile.delta {
        return Err(NonUniqError::InfeasibleBound(
            "window ramp reaches the collar blend layer".into(),
        ));
    }
    let profile = PlateauProfile {
        delta: s0.profile.delta,
        plateau: s0.profile.plateau,
        window: Some(window),
    };
    let bound = 0.5 * delta * delta * delta0;
    for k in 0..=1000 {
        let u = window.lo + (window.hi - window.lo) * k as f64 / 1000.0;
        let v = profile.value(u);
        if !(v < bound) {
            return Err(NonUniqError::InfeasibleBound(format!(
                "carved coefficient reaches {v:.3e} >= {bound:.3e} inside the window"
            )));
        }
    }
    for k in 0..SCAN_POINTS {
        let r = -1.0 + 2.0 * k as f64 / (SCAN_POINTS - 1) as f64;
        if !(profile.value(r) > 0.0) && r.abs() < 1.0 {
            return Err(NonUniqError::InfeasibleBound(format!(
                "carved coefficient is not positive at {r}"
            )));
        }
    }
    Ok(Sigma1Data { profile, delta, delta0 })
}

// ---------------------------------------------------------------------------
// Step 3: degree anchor and the blend-parameter search.
// ---------------------------------------------------------------------------

/// Degree certificate of the uncarved comparison map `K₀` on `[0, α_mx]`.
#[derive(Clone, Copy, Debug)]
pub struct K0Degree {
    /// Brouwer degree of `K₀` on the interval (certified `1`).
    pub degree: i32,
    /// `K₀(0)`; equals `-1` exactly because `E(-1) = 0` pins the zero-data
    /// shot at the constant `-1`.
    pub at_zero: f64,
    /// `K₀(α_mx)`; beyond `1` because the collar scaling alone pushes the
    /// shot past the exit level before the collar edge, for every blend.
    pub at_max: f64,
    /// The box edge `α_mx` (the certified exit parameter of `σ₀`).
    pub alpha_max: f64,
}

/// Exit state `(l(7/8), l'(7/8))` of the shot with curvature `α` in the
/// coefficient `ζ`.
fn exit_state(zeta: &Zeta, alpha: f64, cfg: &IntegratorConfig) -> Result<(f64, f64), NumericsError> {
    Ok(shot_core(zeta, alpha, GLUE, cfg)?.match_state())
}

/// Certifies `deg(K₀, [0, α_mx]) = 1` from the endpoint values.
pub fn k0_degree(s0: &Sigma0, cfg: &So3Config) -> Result<K0Degree, NonUniqError> {
    let zeta0 = Zeta::engineered(s0.profile.clone());
    let alpha_max = s0.certificate.alpha0;
    let at_zero = exit_state(&zeta0, 0.0, &cfg.integrator)?.0;
    let at_max = exit_state(&zeta0, alpha_max, &cfg.integrator)?.0;
    if (at_zero + 1.0).abs() > 1e-13 {
        return Err(NonUniqError::Degenerate(format!(
            "zero-data shot drifted off the constant: K₀(0) = {at_zero}"
        )));
    }
    if !(at_max > 1.0) {
        return Err(NonUniqError::Degenerate(format!(
            "exit parameter fails to exit: K₀(α_mx) = {at_max}"
        )));
    }
    let degree = degree_1d(at_zero, at_max, 1e-9)?;
    if degree != 1 {
        return Err(NonUniqError::Degenerate(format!(
            "comparison map has degree {degree}, expected 1"
        )));
    }
    Ok(K0Degree { degree, at_zero, at_max, alpha_max })
}

/// Outcome of the blend-parameter search: the zero path of `K_p` with its
/// exit-slope monitor, and the selected parameter where the slope equals
/// `l*`.
#[derive(Clone, Debug)]
pub struct PStar {
    /// Selected blend parameter `p* = 1 - w*`.
    pub p_star: f64,
    /// Complement coordinate `w* = 1 - p*`. The slope crossing sits within
    /// a sliver of the carved coefficient, so the endgame bisects `w`
    /// directly and forms the blend as `(1-w) σ₁ + w σ₀`; recovering `w`
    /// from a stored `p` would lose it to cancellation.
    pub w_star: f64,
    /// Curvature parameter `α*` of the selected zero `K_{p*}(α*) = 0`.
    pub alpha_star: f64,
    /// Exit-slope monitor `l'(7/8) - l*` at the selected point.
    pub monitor: f64,
    /// Degree certificate anchoring the zero path.
    pub k0: K0Degree,
    /// Zero path accepted by the continuation in `p`, with the exit-slope
    /// monitor recorded at each point.
    pub path: Vec<PathPoint>,
    /// Monitor values at the two ends of the path.
    pub monitor_ends: [f64; 2],
}

/// Tracks the zero of `K_p` from the uncarved toward the carved
/// coefficient and selects the blend where the exit slope crosses `l*`.
///
/// The path is computed by predictor-corrector continuation in `p`, with
/// the monitor `m = l'(7/8) - l*` recorded at every accepted point; `m`
/// must be negative at `p = 0` (uncarved zeros exit flatter than `5/7`)
/// and positive at the carved end (the window forces a steep exit). The
/// window only bites once its depth `(1-p)·plateau` falls to the slope
/// budget of the equation, which happens within a sliver of `p = 1` far
/// narrower than any continuation step, so the leg in `p` stops at the
/// dyadic cap `1 - 2⁻¹⁰` and the crossing is resolved by bisection in the
/// complement coordinate `w = 1 - p`, correcting the zero in `α` at every
/// trial blend. `w` enters the blend arithmetic exactly; recovering it
/// from a stored `p` near `1` would lose it to cancellation.
pub fn find_pstar(
    s0: &Sigma0,
    s1: &Sigma1Data,
    l_star: f64,
    cfg: &So3Config,
) -> Result<PStar, NonUniqError> {
    let zeta0 = Zeta::engineered(s0.profile.clone());
    let zeta1 = Zeta::engineered(s1.profile.clone());
    let k0 = k0_degree(s0, cfg)?;
    let alpha_max = k0.alpha_max;

    // Anchor zero of K₀ by bisection between the certified endpoint signs.
    let (mut lo, mut hi) = (0.0f64, alpha_max);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if exit_state(&zeta0, mid, &cfg.integrator)?.0 < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * alpha_max {
            break;
        }
    }
    let anchor = 0.5 * (lo + hi);

    let p_cap = 1.0 - W_CAP;
    let mut f = |p: f64, z: &[f64]| -> Result<Vec<f64>, NumericsError> {
        let zeta = Zeta::blend(&zeta0, &zeta1, p);
        Ok(vec![exit_state(&zeta, z[0], &cfg.integrator)?.0])
    };
    let mut monitor = |p: f64, z: &[f64]| -> f64 {
        let zeta = Zeta::blend(&zeta0, &zeta1, p);
        match exit_state(&zeta, z[0], &cfg.integrator) {
            Ok((_, d)) => d - l_star,
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let path = continue_zero(&mut f, &mut monitor, 0.0, p_cap, &[anchor], &cfg.continuation)?;

    let m_start = path.first().expect("path has endpoints").monitor;
    if !(m_start < 0.0 && m_start + l_star < EXIT_SLOPE_BOUND) {
        return Err(NonUniqError::Degenerate(format!(
            "uncarved zero exits at slope {:.6}, expected below {EXIT_SLOPE_BOUND:.4}",
            m_start + l_star
        )));
    }

    // Corrector for one trial blend in the complement coordinate. Newton
    // is tried first (cheap in the mild zone); the guaranteed fallback is
    // bisection in α, since K is exactly -1 at α = 0 and above 1 at α_mx
    // for every blend (the collar exit argument is blend-independent).
    let newton_cfg = crate::numerics::NewtonConfig {
        max_iter: 12,
        ..cfg.newton.clone()
    };
    let eval_at = |w: f64, seed: f64| -> Result<(f64, f64, f64), NonUniqError> {
        let zeta = Zeta::blend(&zeta1, &zeta0, w);
        let mut fk = |z: &[f64]| -> Result<Vec<f64>, NumericsError> {
            Ok(vec![exit_state(&zeta, z[0], &cfg.integrator)?.0])
        };
        let mut alpha = None;
        if let Ok((z, _)) = newton_nd(&mut fk, &[seed], &newton_cfg) {
            let a = z[0];
            if (0.0..=alpha_max).contains(&a)
                && exit_state(&zeta, a, &cfg.integrator)?.0.abs() <= SELECT_VALUE_TOL
            {
                alpha = Some(a);
            }
        }
        let alpha = match alpha {
            Some(a) => a,
            None => {
                let (mut lo, mut hi) = (0.0f64, alpha_max);
                for _ in 0..128 {
                    let mid = 0.5 * (lo + hi);
                    if mid == lo || mid == hi {
                        break;
                    }
                    if exit_state(&zeta, mid, &cfg.integrator)?.0 < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        };
        let (v, d) = exit_state(&zeta, alpha, &cfg.integrator)?;
        Ok((alpha, v, d - l_star))
    };

    // Probe the deep end: a complement floor far below any plausible
    // crossing (the crossing depth is a few window floors, the probe is a
    // thousandth of one), yet large enough that `1 - w` stays below `1`.
    // A windowless profile keeps the probe at the numeric floor and is
    // then reported as a missing sign change.
    let w_floor = s1
        .profile
        .window
        .map(|w| (w.floor / s0.profile.plateau * 1e-3).max(1e-15))
        .unwrap_or(1e-15);
    let seed_end = path.last().expect("path has endpoints").z[0];
    let (a_floor, v_floor, m_floor) = eval_at(w_floor, seed_end)?;
    if v_floor.abs() > PROBE_VALUE_TOL {
        return Err(NonUniqError::Degenerate(format!(
            "corrector lost the zero at the deep-end probe: K = {v_floor:.3e}"
        )));
    }
    let m_end = m_floor;
    if !(m_end > 0.0) {
        return Err(NonUniqError::NoSignChange { m_start, m_end });
    }

    // Bracket the monitor crossing in w over the combined sequence (the
    // path runs in increasing p, hence decreasing w, ending at the probe).
    let mut items: Vec<(f64, f64, f64)> = path
        .iter()
        .map(|pt| (1.0 - pt.p, pt.z[0], pt.monitor))
        .collect();
    items.push((w_floor, a_floor, m_floor));
    let cross = (0..items.len() - 1)
        .find(|&i| items[i].2 < 0.0 && items[i + 1].2 >= 0.0)
        .ok_or(NonUniqError::NoSignChange { m_start, m_end })?;
    let (mut w_neg, mut a_neg, _) = items[cross];
    let (mut w_pos, mut a_pos, _) = items[cross + 1];

    // Selection tracks the best verified zero; path points qualify (their
    // corrector ran to the path tolerance), the probe does not.
    let (mut w_best, mut a_best, mut m_best) = (f64::NAN, f64::NAN, f64::INFINITY);
    for &(wi, ai, mi) in items.iter().take(items.len() - 1) {
        if mi.abs() < m_best.abs() {
            (w_best, a_best, m_best) = (wi, ai, mi);
        }
    }
    for _ in 0..300 {
        if m_best.abs() <= MONITOR_TARGET {
            break;
        }
        let w_mid = 0.5 * (w_pos + w_neg);
        if w_mid == w_pos || w_mid == w_neg {
            break;
        }
        // Zeros along the sliver span many decades in α; the geometric
        // mean of the bracket seeds tracks them better than the midpoint.
        let seed = if a_neg > 0.0 && a_pos > 0.0 {
            (a_neg * a_pos).sqrt()
        } else {
            0.5 * (a_neg + a_pos)
        };
        let (a_mid, v_mid, m_mid) = eval_at(w_mid, seed)?;
        if v_mid.abs() <= SELECT_VALUE_TOL && m_mid.abs() < m_best.abs() {
            (w_best, a_best, m_best) = (w_mid, a_mid, m_mid);
        }
        if m_mid > 0.0 {
            (w_pos, a_pos) = (w_mid, a_mid);
        } else {
            (w_neg, a_neg) = (w_mid, a_mid);
        }
    }
    if !(m_best.abs() <= MONITOR_TOL) {
        return Err(NonUniqError::Degenerate(format!(
            "exit-slope monitor stalled at {m_best:.3e}"
        )));
    }
    Ok(PStar {
        p_star: 1.0 - w_best,
        w_star: w_best,
        alpha_star: a_best,
        monitor: m_best,
        k0,
        path,
        monitor_ends: [m_start, m_end],
    })
}

// ---------------------------------------------------------------------------
// Step 4: the three glued candidates and their audits.
// ---------------------------------------------------------------------------

/// Names the three candidate solutions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `l₋`: rescaled collar solution on the left, mirrored matched shot
    /// beyond.
    Minus,
    /// `l₊(r) = -l₋(-r)`.
    Plus,
    /// `l₀`: the odd candidate.
    Zero,
}

impl Branch {
    /// All three branches in emission order.
    pub const ALL: [Branch; 3] = [Branch::Minus, Branch::Plus, Branch::Zero];

    /// Stable name used in reports and file names.
    pub fn name(self) -> &'static str {
        match self {
            Branch::Minus => "l_minus",
            Branch::Plus => "l_plus",
            Branch::Zero => "l_zero",
        }
    }
}

/// The three candidate solutions over the common target coefficient
/// `σ_{p*}`, with collar-stable evaluation of `l`, `l'`, and
/// `h = (1 - l²)/σ`.
#[derive(Clone, Debug)]
pub struct NonUniqSolutions {
    lsm: LsmData,
    lg: Shot,
    hat: Shot,
    zeta: Zeta,
    /// Curvature of the rescaled collar piece, `l₋''(-1)`.
    pub alpha_sm: f64,
    /// Curvature of the selected matched shot, `l₊''(-1)`.
    pub alpha_star: f64,
    /// Curvature of the odd candidate, `l₀''(-1)`.
    pub alpha_hat: f64,
    /// Common seam slope of all three candidates.
    pub l_star: f64,
    feature_delta: f64,
    feature_window: Option<Window>,
}

impl NonUniqSolutions {
    /// Target orbit coefficient `σ_{p*}(r)`.
    pub fn sigma(&self, r: f64) -> f64 {
        self.zeta.value(r)
    }

    /// Value and slope of the candidate `br` at `r`.
    pub fn eval(&self, br: Branch, r: f64) -> (f64, f64) {
        match br {
            Branch::Minus => {
                if r <= -GLUE {
                    self.lsm.eval(r)
                } else {
                    let (v, d) = self.lg.eval(-r);
                    (-v, d)
                }
            }
            Branch::Plus => {
                let (v, d) = self.eval(Branch::Minus, -r);
                (-v, d)
            }
            Branch::Zero => {
                if r <= 0.0 {
                    self.hat.eval(r)
                } else {
                    let (v, d) = self.hat.eval(-r);
                    (-v, d)
                }
            }
        }
    }

    /// Collar-stable `1 + l` at inward distance `τ` from `r = -1`.
    fn one_plus(&self, br: Branch, tau: f64) -> f64 {
        match br {
            Branch::Minus => self.lsm.one_plus_l(tau),
            Branch::Plus => self.lg.one_plus_l(tau),
            Branch::Zero => self.hat.one_plus_l(tau),
        }
    }

    /// Collar-stable `1 - l` at inward distance `τ` from `r = 1`.
    fn one_minus(&self, br: Branch, tau: f64) -> f64 {
        match br {
            Branch::Minus => self.lg.one_plus_l(tau),
            Branch::Plus => self.lsm.one_plus_l(tau),
            Branch::Zero => self.hat.one_plus_l(tau),
        }
    }

    /// Endpoint curvature parameters `[l''(-1), -l''(1)]` of the branch.
    pub fn curvatures(&self, br: Branch) -> [f64; 2] {
        match br {
            Branch::Minus => [self.alpha_sm, self.alpha_star],
            Branch::Plus => [self.alpha_star, self.alpha_sm],
            Branch::Zero => [self.alpha_hat, self.alpha_hat],
        }
    }

    /// Reconstructed radial coefficient `h = (1 - l²)/σ` of the branch,
    /// through the collar-stable `1 ± l` on the collars (where `σ` is the
    /// exact parabola) and with the curvature parameters as the endpoint
    /// limits.
    pub fn h(&self, br: Branch, r: f64) -> f64 {
        let [ca, cb] = self.curvatures(br);
        let tau_l = 1.0 + r;
        let tau_r = 1.0 - r;
        if tau_l <= 0.0 {
            return ca;
        }
        if tau_r <= 0.0 {
            return cb;
        }
        if tau_l <= 1.0 - GLUE {
            let u = self.one_plus(br, tau_l);
            return u * (2.0 - u) / (tau_l * tau_l);
        }
        if tau_r <= 1.0 - GLUE {
            let u = self.one_minus(br, tau_r);
            return u * (2.0 - u) / (tau_r * tau_r);
        }
        let l = self.eval(br, r).0;
        (1.0 - l) * (1.0 + l) / self.sigma(r)
    }

    /// Smooth-piece boundaries of the audit quadrature: the poles, the
    /// seams, the collar blend layer, and the window edges, mirrored to
    /// both signs. The blend `(1-w) σ₁ + w σ₀` shares these features with
    /// `σ₁` (both profiles share the collar layer and plateau; the window
    /// lives in `σ₁`).
    fn audit_cuts(&self) -> Vec<f64> {
        let mut cuts = vec![-1.0, 0.0, 1.0];
        let mut push = |u: f64| {
            if u > 0.0 && u < 1.0 {
                cuts.push(u);
                cuts.push(-u);
            }
        };
        push(GLUE);
        push(COLLAR_EDGE - self.feature_delta);
        if let Some(w) = self.feature_window {
            push(w.lo - w.ramp);
            push(w.lo);
            push(w.hi);
            push(w.hi + w.ramp);
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        cuts
    }
}

/// Sampled field table of one candidate: the glued `l` and `l'`, and the
/// reconstructed metric profiles `h = (1 - l²)/σ` and `f = ∫ -l·h`.
#[derive(Clone, Debug)]
pub struct FieldTable {
    /// Sample nodes (feature-aligned, dense inside the engineered window).
    pub rs: Vec<f64>,
    /// Candidate values.
    pub l: Vec<f64>,
    /// Candidate slopes.
    pub lp: Vec<f64>,
    /// Radial metric coefficient.
    pub h: Vec<f64>,
    /// Orbit metric coefficient, by quadrature of `-l·h`.
    pub f: Vec<f64>,
}

/// A-posteriori audit of one candidate.
#[derive(Clone, Debug)]
pub struct SolutionAudit {
    /// Which candidate.
    pub branch: &'static str,
    /// Quadrature closure `|f(1)|`; the exact orbit profile vanishes at
    /// both poles, so this measures the integrated-equation defect over
    /// the whole interval.
    pub closure: f64,
    /// Sup of `|l' - f|`: the integrated equation `l'(r) = ∫ E(l)/σ` in
    /// natural units.
    pub ode_sup: f64,
    /// Sup of `|X_rr - 1| = |D (D + 2)|`, `D = (l' - f)/f`, in factored
    /// form.
    pub cross_rr_sup: f64,
    /// Sup of `|X_QQ - σ|/σ = |D|`.
    pub cross_qq_rel_sup: f64,
    /// Sup of `|l(r) + l(-r)|` over the scan grid.
    pub oddness: f64,
    /// Endpoint curvature parameters `[l''(-1), -l''(1)]`.
    pub curvatures: [f64; 2],
    /// Endpoint scalar curvatures `[6/l''(-1), -6/l''(1)]`.
    pub scalars: [f64; 2],
}

impl NonUniqSolutions {
    /// Builds the field table of a candidate and audits it: `f` is
    /// accumulated by per-gap Simpson quadrature of `-l·h` on a
    /// feature-aligned grid, and the factored cross-curvature field
    /// `D = (l' - f)/f` is scanned away from the poles.
    fn audit(&self, br: Branch, cuts: &[f64]) -> (FieldTable, SolutionAudit) {
        let mut rs = Vec::new();
        let mut lv = Vec::new();
        let mut lpv = Vec::new();
        let mut hv = Vec::new();
        let mut fv = Vec::new();

        let w_of = |r: f64, l: f64| -l * self.h(br, r);
        let mut fcur = 0.0f64;
        let (l0, lp0) = self.eval(br, -1.0);
        rs.push(-1.0);
        lv.push(l0);
        lpv.push(lp0);
        hv.push(self.h(br, -1.0));
        fv.push(0.0);
        let mut w_prev = w_of(-1.0, l0);
        let mut r_prev = -1.0f64;

        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            for k in 1..=AUDIT_NODES {
                let r = if k == AUDIT_NODES {
                    b
                } else {
                    a + (b - a) * k as f64 / AUDIT_NODES as f64
                };
                let (l, lp) = self.eval(br, r);
                let w = w_of(r, l);
                let rm = 0.5 * (r_prev + r);
                let wm = w_of(rm, self.eval(br, rm).0);
                fcur += (r - r_prev) / 6.0 * (w_prev + 4.0 * wm + w);
                rs.push(r);
                lv.push(l);
                lpv.push(lp);
                hv.push(self.h(br, r));
                fv.push(fcur);
                (r_prev, w_prev) = (r, w);
            }
        }

        let n = rs.len();
        let closure = fv[n - 1].abs();
        let mut ode_sup = 0.0f64;
        let mut rr_sup = 0.0f64;
        let mut qq_sup = 0.0f64;
        for i in 0..n {
            let r = rs[i];
            if 1.0 + r < AUDIT_MARGIN || 1.0 - r < AUDIT_MARGIN {
                continue;
            }
            let f = fv[i];
            ode_sup = ode_sup.max((lpv[i] - f).abs());
            if f.abs() < RATIO_FLOOR {
                continue;
            }
            let d = (lpv[i] - f) / f;
            rr_sup = rr_sup.max((d * (d + 2.0)).abs());
            qq_sup = qq_sup.max(d.abs());
        }

        let mut oddness = 0.0f64;
        for k in 0..SCAN_POINTS {
            let r = k as f64 / (SCAN_POINTS - 1) as f64;
            oddness = oddness.max((self.eval(br, r).0 + self.eval(br, -r).0).abs());
        }

        let curvatures = self.curvatures(br);
        let audit = SolutionAudit {
            branch: br.name(),
            closure,
            ode_sup,
            cross_rr_sup: rr_sup,
            cross_qq_rel_sup: qq_sup,
            oddness,
            curvatures,
            scalars: [6.0 / curvatures[0], 6.0 / curvatures[1]],
        };

        let mut table = FieldTable {
            rs: Vec::new(),
            l: Vec::new(),
            lp: Vec::new(),
            h: Vec::new(),
            f: Vec::new(),
        };
        for i in 0..n {
            if i % TABLE_STRIDE == 0 || i == n - 1 {
                table.rs.push(rs[i]);
                table.l.push(lv[i]);
                table.lp.push(lpv[i]);
                table.h.push(hv[i]);
                table.f.push(fv[i]);
            }
        }
        (table, audit)
    }
}

/// The endpoint scalar curvatures of the three candidate metrics and the
/// smallest gap separating the glued pair from the odd one.
#[derive(Clone, Copy, Debug)]
pub struct Obstruction {
    /// `(S at r = -1, S at r = 1)` of the `l₋` metric.
    pub g_minus: [f64; 2],
    /// Same for the `l₊` metric (the mirror swap of `g_minus`).
    pub g_plus: [f64; 2],
    /// Same for the odd metric (equal values by parity).
    pub g_zero: [f64; 2],
    /// `min |S(g₊) - S(g₀)|` over the four endpoint pairings.
    pub min_gap: f64,
}

/// Full evidence of the non-uniqueness construction.
#[derive(Clone, Debug)]
pub struct NonUniqCertificate {
    /// First zero of the reference solution.
    pub r0: f64,
    /// Exit-level crossing of the reference solution.
    pub r_star: f64,
    /// Certified exit parameter `α₀` of the comparison coefficient.
    pub alpha0: f64,
    /// Curvature `l₋''(-1) = α_sm` of the rescaled collar solution.
    pub alpha_sm: f64,
    /// Common seam slope `l*`.
    pub l_star: f64,
    /// Window scale `δ`.
    pub delta: f64,
    /// Cubic case floor `δ₀`.
    pub delta0: f64,
    /// Carved window depth `δ² δ₀ / 16`.
    pub window_floor: f64,
    /// Selected blend parameter `p* = 1 - w*`.
    pub p_star: f64,
    /// Complement coordinate of the selected blend.
    pub w_star: f64,
    /// Curvature of the selected matched shot.
    pub alpha_star: f64,
    /// Curvature of the odd candidate.
    pub alpha_hat: f64,
    /// Exit-slope monitor at the selected blend.
    pub monitor: f64,
    /// Degree certificate of the comparison map.
    pub k0: K0Degree,
    /// Monitor values at the ends of the continuation path.
    pub monitor_ends: [f64; 2],
    /// Worst value defect of the gluings at the seams.
    pub glue_value_defect: f64,
    /// Worst slope defect of the gluings at the seams.
    pub glue_slope_defect: f64,
    /// Pairwise sup distances `(l₋, l₊)`, `(l₋, l₀)`, `(l₊, l₀)`.
    pub distinctness: [f64; 3],
    /// Oddness defects of `l₋` and `l₊` (certified large).
    pub odd_failures: [f64; 2],
    /// Per-candidate audits, in [`Branch::ALL`] order.
    pub audits: [SolutionAudit; 3],
    /// Per-candidate field tables, in [`Branch::ALL`] order.
    pub tables: [FieldTable; 3],
    /// Endpoint scalar curvature separation.
    pub obstruction: Obstruction,
    /// Continuation path of the blend search.
    pub path: Vec<PathPoint>,
    solutions: NonUniqSolutions,
}

impl NonUniqCertificate {
    /// The three candidate solutions.
    pub fn solutions(&self) -> &NonUniqSolutions {
        &self.solutions
    }
}

/// Glues the three candidates at the selected blend, audits every claimed
/// property, and assembles the certificate.
pub fn assemble_solutions(
    lsm: LsmData,
    s0: &Sigma0,
    s1: &Sigma1Data,
    ps: &PStar,
    cfg: &So3Config,
) -> Result<NonUniqCertificate, NonUniqError> {
    let zeta0 = Zeta::engineered(s0.profile.clone());
    let zeta1 = Zeta::engineered(s1.profile.clone());
    let zeta = Zeta::blend(&zeta1, &zeta0, ps.w_star);

    let lg = shot_core(&zeta, ps.alpha_star, GLUE, &cfg.integrator)?;
    let (v_seam, d_seam) = lg.match_state();
    let glue_value_defect = v_seam.abs().max(lsm.eval(-GLUE).0.abs());
    let glue_slope_defect = (d_seam - lsm.l_star).abs();
    if glue_value_defect > GLUE_TOL || glue_slope_defect > GLUE_TOL {
        return Err(NonUniqError::GluingDefect {
            defect: glue_value_defect.max(glue_slope_defect),
        });
    }

    // The odd candidate: bisection on the midpoint value l^{p*,α}(0),
    // which is negative at α* (the matched shot is still below zero at the
    // midpoint) and positive at the exit parameter. A coarse pre-scan
    // certifies a single sign change over the bracket.
    let alpha_max = ps.k0.alpha_max;
    let mid_value = |a: f64| -> Result<f64, NumericsError> {
        Ok(shot_core(&zeta, a, 0.0, &cfg.integrator)?.match_state().0)
    };
    let g_lo = mid_value(ps.alpha_star)?;
    let g_hi = mid_value(alpha_max)?;
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(NonUniqError::Degenerate(format!(
            "midpoint bracket is not signed: l(0) = {g_lo:.3e} at α*, {g_hi:.3e} at α_mx"
        )));
    }
    let mut last = g_lo;
    let mut changes = 0usize;
    for k in 1..=8 {
        let a = ps.alpha_star + (alpha_max - ps.alpha_star) * k as f64 / 8.0;
        let v = mid_value(a)?;
        if v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    if changes != 1 {
        return Err(NonUniqError::Degenerate(format!(
            "midpoint value changes sign {changes} times over the bracket"
        )));
    }
    let (mut lo, mut hi) = (ps.alpha_star, alpha_max);
    for _ in 0..96 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if mid_value(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha_hat = 0.5 * (lo + hi);
    let hat = shot_core(&zeta, alpha_hat, 0.0, &cfg.integrator)?;
    if hat.match_state().0.abs() > 1e-9 {
        return Err(NonUniqError::OddnessDefect { defect: hat.match_state().0.abs() });
    }
    if hat.min_slope() < -1e-9 {
        return Err(NonUniqError::Degenerate(format!(
            "odd candidate is not monotone: min slope {:.3e}",
            hat.min_slope()
        )));
    }
    if hat.max_abs() > 1.0 + 1e-9 {
        return Err(NonUniqError::Degenerate(format!(
            "odd candidate leaves the physical band: max |l| = {}",
            hat.max_abs()
        )));
    }

    let solutions = NonUniqSolutions {
        alpha_sm: lsm.alpha_sm,
        l_star: lsm.l_star,
        lsm,
        lg,
        hat,
        zeta,
        alpha_star: ps.alpha_star,
        alpha_hat,
        feature_delta: s1.profile.delta,
        feature_window: s1.profile.window,
    };

    // Oddness: the odd candidate must pass, the glued ones must fail.
    let cuts = solutions.audit_cuts();
    let mut tables = Vec::with_capacity(3);
    let mut audits = Vec::with_capacity(3);
    for br in Branch::ALL {
        let (table, audit) = solutions.audit(br, &cuts);
        for (which, sup) in [
            ("integrated-equation", audit.ode_sup),
            ("radial cross-curvature", audit.cross_rr_sup),
            ("relative orbit cross-curvature", audit.cross_qq_rel_sup),
            ("quadrature closure", audit.closure),
        ] {
            if sup > RESIDUAL_TOL {
                return Err(NonUniqError::ResidualTooLarge {
                    which: format!("{} {which}", br.name()),
                    sup,
                });
            }
        }
        tables.push(table);
        audits.push(audit);
    }
    let audits: [SolutionAudit; 3] = audits.try_into().expect("three audits");
    let tables: [FieldTable; 3] = tables.try_into().expect("three tables");
    if audits[2].oddness > ODDNESS_TOL {
        return Err(NonUniqError::OddnessDefect { defect: audits[2].oddness });
    }
    let odd_failures = [audits[0].oddness, audits[1].oddness];
    for defect in odd_failures {
        if defect < DISTINCT_MIN {
            return Err(NonUniqError::Degenerate(format!(
                "a glued candidate is accidentally odd: defect {defect:.3e}"
            )));
        }
    }

    let mut distinctness = [0.0f64; 3];
    for k in 0..SCAN_POINTS {
        let r = -1.0 + 2.0 * k as f64 / (SCAN_POINTS - 1) as f64;
        let lm = solutions.eval(Branch::Minus, r).0;
        let lp = solutions.eval(Branch::Plus, r).0;
        let lz = solutions.eval(Branch::Zero, r).0;
        distinctness[0] = distinctness[0].max((lm - lp).abs());
        distinctness[1] = distinctness[1].max((lm - lz).abs());
        distinctness[2] = distinctness[2].max((lp - lz).abs());
    }
    for gap in distinctness {
        if gap < DISTINCT_MIN {
            return Err(NonUniqError::Degenerate(format!(
                "two candidates coincide within {gap:.3e}"
            )));
        }
    }

    let cert = NonUniqCertificate {
        r0: solutions.lsm.r0,
        r_star: s0.certificate.r_star,
        alpha0: s0.certificate.alpha0,
        alpha_sm: solutions.alpha_sm,
        l_star: solutions.l_star,
        delta: s1.delta,
        delta0: s1.delta0,
        window_floor: s1.profile.window.map(|w| w.floor).unwrap_or(0.0),
        p_star: ps.p_star,
        w_star: ps.w_star,
        alpha_star: ps.alpha_star,
        alpha_hat,
        monitor: ps.monitor,
        k0: ps.k0,
        monitor_ends: ps.monitor_ends,
        glue_value_defect,
        glue_slope_defect,
        distinctness,
        odd_failures,
        obstruction: Obstruction {
            g_minus: audits[0].scalars,
            g_plus: audits[1].scalars,
            g_zero: audits[2].scalars,
            min_gap: 0.0,
        },
        audits,
        tables,
        path: ps.path.clone(),
        solutions,
    };
    let obstruction = isometry_obstruction(&cert)?;
    Ok(NonUniqCertificate { obstruction, ..cert })
}

/// Certifies that no isometry can identify the `l₊` metric with the odd
/// metric: an isometry of the three-sphere fixes the two singular orbits
/// setwise, so it would have to match the unordered pairs of endpoint
/// scalar curvatures; all four cross-pairings differ by more than
/// [`OBSTRUCTION_MIN`].
pub fn isometry_obstruction(cert: &NonUniqCertificate) -> Result<Obstruction, NonUniqError> {
    let g_minus = [6.0 / cert.alpha_sm, 6.0 / cert.alpha_star];
    let g_plus = [6.0 / cert.alpha_star, 6.0 / cert.alpha_sm];
    let g_zero = [6.0 / cert.alpha_hat, 6.0 / cert.alpha_hat];
    let mut min_gap = f64::INFINITY;
    for a in g_plus {
        for b in g_zero {
            min_gap = min_gap.min((a - b).abs());
        }
    }
    if !(min_gap > OBSTRUCTION_MIN) {
        return Err(NonUniqError::ObstructionDegenerate { gap: min_gap });
    }
    Ok(Obstruction { g_minus, g_plus, g_zero, min_gap })
}

/// Runs the whole pipeline: rescaled collar solution, carved coefficient,
/// blend selection, gluing, and audits.
pub fn run(cfg: &So3Config) -> Result<NonUniqCertificate, NonUniqError> {
    let s0 = build_sigma0()?;
    let lsm = compute_lsm(&cfg.integrator)?;
    let s1 = build_sigma1(s0, lsm.l_star)?;
    let ps = find_pstar(s0, &s1, lsm.l_star, cfg)?;
    assemble_solutions(lsm, s0, &s1, &ps, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn reference_rescaling_lands_the_collar_solution_on_the_seam() {
        let cfg = So3Config::default();
        let lsm = compute_lsm(&cfg.integrator).expect("collar solution");

        assert!(lsm.l_star >= L_STAR_MIN, "exit slope {}", lsm.l_star);
        assert!(lsm.alpha_sm >= 64.0);
        let (v, d) = lsm.eval(-1.0);
        assert_abs_diff_eq!(v, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-14);
        let (v_seam, d_seam) = lsm.eval(-COLLAR_EDGE);
        assert_abs_diff_eq!(v_seam, 0.0, epsilon = 1e-9);
        assert_relative_eq!(d_seam, lsm.l_star, max_relative = 1e-12);

        // A direct shot with the rescaled curvature in the same frame must
        // reproduce the rescaled solution: two independent integrations of
        // the same data.
        let direct = shot_core(
            &Zeta::square(),
            lsm.alpha_sm,
            -COLLAR_EDGE,
            &cfg.integrator,
        )
        .expect("direct shot");
        for r in [-0.95, -0.9, -0.875] {
            let (v1, d1) = lsm.eval(r);
            let (v2, d2) = direct.eval(r);
            assert_abs_diff_eq!(v1, v2, epsilon = 1e-8);
            assert_abs_diff_eq!(d1, d2, epsilon = 1e-6);
        }
    }

    #[test]
    fn carved_coefficient_keeps_the_collar_and_measures_small() {
        let cfg = So3Config::default();
        let s0 = build_sigma0().expect("comparison coefficient");
        let lsm = compute_lsm(&cfg.integrator).expect("collar solution");
        let s1 = build_sigma1(s0, lsm.l_star).expect("carved coefficient");
        let w = s1.profile.window.expect("window");

        // The collar is untouched: at |r| >= 7/8 the coefficient is the
        // exact collar parabola, e.g. (1/16)² at r = -15/16.
        assert_eq!(s1.profile.value(-0.9375), 0.0625 * 0.0625);
        // Evenness is structural (the profile reads |r|).
        for k in 0..=20 {
            let r = -1.0 + 2.0 * k as f64 / 20.0;
            assert_eq!(s1.profile.value(r), s1.profile.value(-r));
        }
        // The floor is held exactly inside the window, and the window
        // measures below the forcing bound δ²δ₀/2.
        let mid = 0.5 * (w.lo + w.hi);
        assert_eq!(s1.profile.value(mid), w.floor);
        assert!(w.floor > 0.0);
        assert!(w.floor < 0.5 * s1.delta * s1.delta * s1.delta0);
        // The window sits strictly between the origin and the collar
        // blend layer.
        assert!(w.lo - w.ramp > 0.0);
        assert!(w.hi + w.ramp < COLLAR_EDGE - s0.profile.delta);
        // Positivity across the open interval.
        for k in 1..2000 {
            let r = -1.0 + 2.0 * k as f64 / 2000.0;
            assert!(s1.profile.value(r) > 0.0, "coefficient at {r}");
        }
    }

    #[test]
    fn window_case_floor_is_concave_endpoint_minimum() {
        let s0 = build_sigma0().expect("comparison coefficient");
        let s1 = build_sigma1(s0, 9.5).expect("carved coefficient");
        let cubic = |x: f64| x * x * x - x;
        let a = -1.0 + s1.delta;
        let b = -8.0 * s1.delta / 15.0;
        assert!(a < b);
        assert_abs_diff_eq!(s1.delta0, cubic(a).min(cubic(b)), epsilon = 1e-12);
    }

    #[test]
    fn comparison_zero_map_has_unit_degree() {
        let cfg = So3Config::default();
        let s0 = build_sigma0().expect("comparison coefficient");
        let k0 = k0_degree(s0, &cfg).expect("degree certificate");
        assert_eq!(k0.degree, 1);
        // The zero-data shot is pinned at the constant -1 exactly.
        assert_eq!(k0.at_zero, -1.0);
        assert!(k0.at_max > 1.0);
        assert!(k0.alpha_max > 0.0);
    }

    #[test]
    fn slope_monitor_brackets_and_selects_the_blend() {
        let cfg = So3Config::default();
        let s0 = build_sigma0().expect("comparison coefficient");
        let lsm = compute_lsm(&cfg.integrator).expect("collar solution");
        let s1 = build_sigma1(s0, lsm.l_star).expect("carved coefficient");
        let ps = find_pstar(s0, &s1, lsm.l_star, &cfg).expect("blend selection");

        assert!(ps.monitor_ends[0] < 0.0);
        assert!(ps.monitor_ends[1] > 0.0);
        // Uncarved zeros exit flatter than 5/7; carved ones steeper than l*.
        assert!(ps.monitor_ends[0] + lsm.l_star < 5.0 / 7.0 + 1e-9);
        assert!(ps.monitor.abs() <= MONITOR_TOL, "monitor {}", ps.monitor);
        assert!(ps.w_star > 0.0 && ps.w_star < 1.0);
        assert!(ps.p_star > 0.0 && ps.p_star < 1.0);
        assert!(ps.alpha_star > 0.0 && ps.alpha_star < ps.k0.alpha_max);
        assert_eq!(ps.k0.degree, 1);

        // The accepted continuation path has no jumps: every step stays
        // within an order of magnitude of the median step, measured
        // jointly in the parameter and the scaled unknown.
        let scale = 1.0 + ps.path[0].z[0].abs();
        let steps: Vec<f64> = ps
            .path
            .windows(2)
            .map(|pq| {
                let dp = pq[1].p - pq[0].p;
                let dz = (pq[1].z[0] - pq[0].z[0]) / scale;
                (dp * dp + dz * dz).sqrt()
            })
            .collect();
        if steps.len() >= 4 {
            let mut sorted = steps.clone();
            sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let median = sorted[sorted.len() / 2];
            let max = *sorted.last().unwrap();
            assert!(
                max <= 10.0 * median,
                "path jump {max:.3e} vs median {median:.3e}"
            );
        }
    }

    #[test]
    fn no_window_blend_reports_no_sign_change() {
        let cfg = So3Config::default();
        let s0 = build_sigma0().expect("comparison coefficient");
        // Without the carved window nothing forces a steep exit; the
        // monitor keeps its sign and the search must say so.
        let s1 = Sigma1Data {
            profile: PlateauProfile {
                delta: s0.profile.delta,
                plateau: s0.profile.plateau,
                window: None,
            },
            delta: 0.05,
            delta0: 0.02,
        };
        match find_pstar(s0, &s1, 9.0, &cfg) {
            Err(NonUniqError::NoSignChange { m_start, m_end }) => {
                assert!(m_start < 0.0);
                assert!(m_end < 0.0);
            }
            Err(other) => panic!("expected NoSignChange, got {other}"),
            Ok(_) => panic!("expected NoSignChange, got a selection"),
        }
    }

    #[test]
    fn three_distinct_solutions_close_the_loop() {
        let cfg = So3Config::default();
        let cert = run(&cfg).expect("non-uniqueness certificate");

        assert!(cert.monitor.abs() <= MONITOR_TOL);
        assert!(cert.glue_value_defect <= GLUE_TOL);
        assert!(cert.glue_slope_defect <= GLUE_TOL);
        for audit in &cert.audits {
            assert!(
                audit.closure <= RESIDUAL_TOL,
                "{} closure {:.3e}",
                audit.branch,
                audit.closure
            );
            assert!(
                audit.ode_sup <= RESIDUAL_TOL,
                "{} equation residual {:.3e}",
                audit.branch,
                audit.ode_sup
            );
            assert!(
                audit.cross_rr_sup <= RESIDUAL_TOL,
                "{} radial residual {:.3e}",
                audit.branch,
                audit.cross_rr_sup
            );
            assert!(
                audit.cross_qq_rel_sup <= RESIDUAL_TOL,
                "{} orbit residual {:.3e}",
                audit.branch,
                audit.cross_qq_rel_sup
            );
        }
        // Only the odd candidate is odd; the glued ones fail by a wide
        // margin, and all three are pairwise far apart.
        assert!(cert.audits[2].oddness <= ODDNESS_TOL);
        for defect in cert.odd_failures {
            assert!(defect >= DISTINCT_MIN);
        }
        for gap in cert.distinctness {
            assert!(gap >= DISTINCT_MIN);
        }
        assert!(cert.obstruction.min_gap > OBSTRUCTION_MIN);

        // The mirror identity l₊(r) = -l₋(-r) holds exactly by
        // delegation, and the odd metric has equal endpoint scalars.
        let sols = cert.solutions();
        for k in 0..=20 {
            let r = -1.0 + 2.0 * k as f64 / 20.0;
            let (vm, dm) = sols.eval(Branch::Minus, -r);
            let (vp, dp) = sols.eval(Branch::Plus, r);
            assert_eq!(vp, -vm);
            assert_eq!(dp, dm);
        }
        assert_eq!(cert.obstruction.g_zero[0], cert.obstruction.g_zero[1]);
        assert_eq!(cert.obstruction.g_minus[0], cert.obstruction.g_plus[1]);
        assert_eq!(cert.obstruction.g_minus[1], cert.obstruction.g_plus[0]);

        // Endpoint limits of the reconstructed radial coefficient are the
        // curvature parameters, and the glued candidate closes at +1.
        assert_eq!(sols.h(Branch::Minus, -1.0), cert.alpha_sm);
        assert_eq!(sols.h(Branch::Minus, 1.0), cert.alpha_star);
        let (v1, d1) = sols.eval(Branch::Minus, 1.0);
        assert_abs_diff_eq!(v1, 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(d1, 0.0, epsilon = 1e-13);

        // Scales established by the construction.
        assert!(cert.l_star >= L_STAR_MIN);
        assert!(cert.w_star > 0.0 && cert.w_star < W_CAP);
        assert!(cert.alpha_hat > cert.alpha_star);
        assert!(cert.alpha_sm > cert.alpha_hat);
    }
}
