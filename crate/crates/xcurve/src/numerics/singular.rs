//! Integral kernels for starting integrations at regular singular endpoints.
//!
//! The radial boundary value problems in this crate degenerate at the ends
//! of the interval: the cone conditions force coefficients like `1/t` and
//! `1/t^2`. Near such an endpoint the substituted unknowns satisfy linear
//! model equations whose solution operators are explicit double integrals
//! (Volterra kernels). The nonlinear problems are solved on a short start
//! interval `[0, eps]` by Picard iteration on those kernels; the result is
//! handed off to the adaptive Runge-Kutta integrator at `t = eps`.
//!
//! The three kernels:
//!
//! * first doubly warped component: `s'' - s'/t = t*S` with solution
//!   `s(t) = int_0^t tau * (int_0^tau S) dtau`;
//! * second doubly warped component: `s'' + s'/t - s/t^2 = t*S` with
//!   solution `s(t) = (1/t) int_0^t tau * (int_0^tau rho S drho) dtau`;
//! * rotationally symmetric component (distance `tau` from the endpoint):
//!   `s'' = 2 s / tau^2 + tau * S` with solution
//!   `s(tau) = tau^2 int_0^tau u^{-4} (int_0^u rho^3 S drho) du`.
//!
//! All quadrature is done on a fixed uniform grid with locally quadratic
//! reconstruction of the integrand against exact monomial moments, so the
//! high-order zeros at the singular endpoint cost no relative accuracy.

use super::NumericsError;

/// Uniform quadrature grid on `[0, eps]` shared by the singular kernels.
#[derive(Clone, Debug)]
pub struct VolterraGrid {
    /// Nodes `0 = t_0 < ... < t_n = eps`.
    pub ts: Vec<f64>,
}

impl VolterraGrid {
    /// Builds a grid with `n >= 8` intervals on `[0, eps]`, `eps > 0`.
    pub fn new(eps: f64, n: usize) -> Self {
        assert!(eps > 0.0 && n >= 8);
        let h = eps / n as f64;
        let mut ts: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
        ts[n] = eps; // exact right endpoint
        Self { ts }
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.ts.len()
    }

    /// True when the grid has no interior nodes (never, by construction).
    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    /// Right endpoint of the grid.
    pub fn eps(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    /// Cumulative integrals `I_k = int_0^{t_k} tau^m f(tau) dtau` where `f`
    /// is given by its samples at the nodes. Each interval uses the
    /// quadratic through the three nearest nodes, integrated exactly against
    /// the monomial weight, so relative accuracy is O(h^3) even where the
    /// weight has a high-order zero.
    pub fn cumulative_weighted(&self, m: u32, f: &[f64]) -> Vec<f64> {
        let n = self.ts.len() - 1;
        assert_eq!(f.len(), n + 1);
        let mut out = vec![0.0; n + 1];
        let mp = [m as f64 + 1.0, m as f64 + 2.0, m as f64 + 3.0];
        for k in 0..n {
            let j = k.clamp(1, n - 1);
            let xs = [self.ts[j - 1], self.ts[j], self.ts[j + 1]];
            let (a, b) = (self.ts[k], self.ts[k + 1]);
            // Moments of tau^(m + q) over [a, b].
            let mom = [
                (b.powf(mp[0]) - a.powf(mp[0])) / mp[0],
                (b.powf(mp[1]) - a.powf(mp[1])) / mp[1],
                (b.powf(mp[2]) - a.powf(mp[2])) / mp[2],
            ];
            let mut inc = 0.0;
            for i in 0..3 {
                let (xi, xj, xk) = (xs[i], xs[(i + 1) % 3], xs[(i + 2) % 3]);
                let den = (xi - xj) * (xi - xk);
                // Lagrange basis (tau - xj)(tau - xk)/den expanded in monomials.
                let c0 = xj * xk / den;
                let c1 = -(xj + xk) / den;
                let c2 = 1.0 / den;
                inc += f[j - 1 + i] * (c0 * mom[0] + c1 * mom[1] + c2 * mom[2]);
            }
            out[k + 1] = out[k] + inc;
        }
        out
    }
}

/// Solves `s'' - s'/t = t*S` with `s(0) = s'(0) = 0` on the grid.
/// Returns the samples of `(s, s')`.
pub fn volterra_first(grid: &VolterraGrid, src: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let a = grid.cumulative_weighted(0, src); // int_0^t S
    let sp: Vec<f64> = grid.ts.iter().zip(&a).map(|(t, ai)| t * ai).collect();
    let s = grid.cumulative_weighted(1, &a); // int_0^t tau * A(tau)
    (s, sp)
}

/// Solves `s'' + s'/t - s/t^2 = t*S` with `s(0) = s'(0) = 0` on the grid.
/// Returns the samples of `(s, s')`.
pub fn volterra_second(grid: &VolterraGrid, src: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let b = grid.cumulative_weighted(1, src); // int_0^t rho S
    let w = grid.cumulative_weighted(1, &b); // int_0^t tau B
    let mut s = vec![0.0; grid.len()];
    let mut sp = vec![0.0; grid.len()];
    for k in 1..grid.len() {
        let t = grid.ts[k];
        s[k] = w[k] / t;
        sp[k] = b[k] - s[k] / t;
    }
    (s, sp)
}

/// Solves `s'' = 2 s/tau^2 + tau*S` with a double zero at `tau = 0`.
/// Returns the samples of `(s, s')`.
pub fn volterra_cone(grid: &VolterraGrid, src: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let a = grid.cumulative_weighted(3, src); // int_0^tau rho^3 S
    let mut g = vec![0.0; grid.len()];
    g[0] = src[0] / 4.0; // limit of A/tau^4
    for k in 1..grid.len() {
        let t = grid.ts[k];
        g[k] = a[k] / (t * t * t * t);
    }
    let u = grid.cumulative_weighted(0, &g);
    let mut s = vec![0.0; grid.len()];
    let mut sp = vec![0.0; grid.len()];
    for k in 1..grid.len() {
        let t = grid.ts[k];
        s[k] = t * t * u[k];
        sp[k] = 2.0 * t * u[k] + a[k] / (t * t);
    }
    (s, sp)
}

/// Which of the three singular-endpoint model equations a start solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularKernel {
    /// `s'' - s'/t = t*S` (first doubly warped component).
    First,
    /// `s'' + s'/t - s/t^2 = t*S` (second doubly warped component).
    Second,
    /// `s'' = 2 s/tau^2 + tau*S` (cone point of the rotationally
    /// symmetric problem, `tau` measured from the endpoint).
    Cone,
}

/// Applies the solution operator of the selected model equation to sampled
/// source data; returns samples of `(s, s')`.
pub fn apply_kernel(kind: SingularKernel, grid: &VolterraGrid, src: &[f64]) -> (Vec<f64>, Vec<f64>) {
    match kind {
        SingularKernel::First => volterra_first(grid, src),
        SingularKernel::Second => volterra_second(grid, src),
        SingularKernel::Cone => volterra_cone(grid, src),
    }
}

/// Convergence record of a Picard iteration.
#[derive(Clone, Copy, Debug)]
pub struct PicardReport {
    /// Iterations performed.
    pub iterations: usize,
    /// Norm of the last update.
    pub last_delta: f64,
    /// Whether the iteration reached the tolerance.
    pub converged: bool,
}

/// Fixed-point iteration `state <- apply(state)` until `dist` between
/// successive states falls below `tol`. Reports `converged = false` when the
/// updates stop contracting geometrically (callers respond by shrinking the
/// start interval, which restores contraction for these kernels).
pub fn picard_fixed_point<S: Clone>(
    init: S,
    apply: impl Fn(&S) -> S,
    dist: impl Fn(&S, &S) -> f64,
    tol: f64,
    max_iter: usize,
) -> (S, PicardReport) {
    let mut state = init;
    let mut prev_delta = f64::INFINITY;
    for iter in 1..=max_iter {
        let next = apply(&state);
        let delta = dist(&state, &next);
        state = next;
        if delta <= tol {
            return (
                state,
                PicardReport {
                    iterations: iter,
                    last_delta: delta,
                    converged: true,
                },
            );
        }
        // After a warm-up the updates of a contraction shrink geometrically.
        if iter >= 4 && delta > 0.9 * prev_delta {
            return (
                state,
                PicardReport {
                    iterations: iter,
                    last_delta: delta,
                    converged: false,
                },
            );
        }
        prev_delta = delta;
    }
    let last = prev_delta;
    (
        state,
        PicardReport {
            iterations: max_iter,
            last_delta: last,
            converged: false,
        },
    )
}

/// Runs `attempt` with a start width `eps`, halving on failure until either
/// success or the width falls below `min_eps` (then [`NumericsError::NoContraction`]).
pub fn with_shrinking_eps<T>(
    eps0: f64,
    min_eps: f64,
    mut attempt: impl FnMut(f64) -> Option<T>,
) -> Result<(f64, T), NumericsError> {
    let mut eps = eps0;
    while eps >= min_eps {
        if let Some(v) = attempt(eps) {
            return Ok((eps, v));
        }
        eps *= 0.5;
    }
    Err(NumericsError::NoContraction { eps })
}

/// Converged start data on `[0, eps]` for a coupled family of model
/// equations: per component, samples of `s` and `s'` on the shared grid.
#[derive(Clone, Debug)]
pub struct StartState<const K: usize> {
    /// Shared quadrature grid of the start interval.
    pub grid: VolterraGrid,
    /// Samples of each component.
    pub s: [Vec<f64>; K],
    /// Samples of each component's derivative.
    pub sp: [Vec<f64>; K],
}

impl<const K: usize> StartState<K> {
    /// Value and derivative of component `k` at `t` inside the start
    /// interval, by cubic Hermite interpolation between grid nodes (the
    /// nodes carry both `s` and `s'`, so no extra accuracy is lost).
    pub fn eval(&self, k: usize, t: f64) -> (f64, f64) {
        let ts = &self.grid.ts;
        let t = t.clamp(ts[0], *ts.last().unwrap());
        let h = ts[1] - ts[0];
        let i = (((t / h) as usize).min(ts.len() - 2)).max(0);
        let (t0, t1) = (ts[i], ts[i + 1]);
        let dt = t1 - t0;
        let x = (t - t0) / dt;
        let (y0, y1) = (self.s[k][i], self.s[k][i + 1]);
        let (d0, d1) = (self.sp[k][i] * dt, self.sp[k][i + 1] * dt);
        let h00 = (1.0 + 2.0 * x) * (1.0 - x) * (1.0 - x);
        let h10 = x * (1.0 - x) * (1.0 - x);
        let h01 = x * x * (3.0 - 2.0 * x);
        let h11 = x * x * (x - 1.0);
        let value = h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
        let g00 = 6.0 * x * (x - 1.0);
        let g10 = (1.0 - x) * (1.0 - 3.0 * x);
        let g01 = -g00;
        let g11 = x * (3.0 * x - 2.0);
        let deriv = (g00 * y0 + g10 * d0 + g01 * y1 + g11 * d1) / dt;
        (value, deriv)
    }
}

/// Solves a coupled singular initial value problem near an endpoint by
/// Picard iteration on the explicit Volterra solution operators.
///
/// `kinds[k]` selects the model equation of component `k`. `source`
/// receives the grid and the current `(s, s')` samples of every component
/// and returns the sampled source terms. Iteration starts from `s = 0`,
/// measures updates in the weighted norm
/// `max_k sup_t (|Δs_k|/t² + |Δs_k'|/t)`, and halves `eps` whenever
/// contraction is not observed (floor `1e-8`).
pub fn singular_start<const K: usize>(
    kinds: [SingularKernel; K],
    source: &dyn Fn(&VolterraGrid, &[Vec<f64>; K], &[Vec<f64>; K]) -> [Vec<f64>; K],
    eps0: f64,
    nodes: usize,
    tol: f64,
) -> Result<StartState<K>, NumericsError> {
    let (_, state) = with_shrinking_eps(eps0, 1e-8, |eps| {
        let grid = VolterraGrid::new(eps, nodes);
        let n = grid.len();
        let zeros = || -> [Vec<f64>; K] { std::array::from_fn(|_| vec![0.0; n]) };
        let apply = |state: &([Vec<f64>; K], [Vec<f64>; K])| {
            let srcs = source(&grid, &state.0, &state.1);
            let mut s: [Vec<f64>; K] = std::array::from_fn(|_| Vec::new());
            let mut sp: [Vec<f64>; K] = std::array::from_fn(|_| Vec::new());
            for k in 0..K {
                let (sk, spk) = apply_kernel(kinds[k], &grid, &srcs[k]);
                s[k] = sk;
                sp[k] = spk;
            }
            (s, sp)
        };
        let dist = |a: &([Vec<f64>; K], [Vec<f64>; K]), b: &([Vec<f64>; K], [Vec<f64>; K])| {
            let mut worst = 0.0f64;
            for k in 0..K {
                for i in 1..n {
                    let t = grid.ts[i];
                    worst = worst.max((a.0[k][i] - b.0[k][i]).abs() / (t * t));
                    worst = worst.max((a.1[k][i] - b.1[k][i]).abs() / t);
                }
            }
            worst
        };
        let (state, report) = picard_fixed_point((zeros(), zeros()), apply, dist, tol, 40);
        report.converged.then(|| StartState {
            grid,
            s: state.0,
            sp: state.1,
        })
    })?;
    Ok(state)
}
