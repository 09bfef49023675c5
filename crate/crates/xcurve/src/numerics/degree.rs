//! Topological degree certificates in one and two dimensions.
//!
//! Existence of solutions to the shooting problems is certified by degree
//! arguments: a sign change of a scalar mismatch on an interval, and the
//! winding number of a planar mismatch around the boundary of a parameter
//! box. Both routines refuse to certify when the map comes too close to
//! zero on the boundary, and the planar one refines adaptively until every
//! angular increment is unambiguous.

use super::NumericsError;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Brouwer degree of a scalar map on an interval from its endpoint values.
/// `fa` and `fb` are the values at the left and right endpoints; both must
/// exceed `tol` in magnitude for the certificate to be valid.
pub fn degree_1d(fa: f64, fb: f64, tol: f64) -> Result<i32, NumericsError> {
    for (at, value) in [(0.0, fa), (1.0, fb)] {
        if value.abs() <= tol {
            return Err(NumericsError::ZeroAtEndpoint { at, value });
        }
    }
    Ok(((fb.signum() - fa.signum()) / 2.0) as i32)
}

/// Evidence backing a winding-number computation.
#[derive(Clone, Copy, Debug)]
pub struct WindingCertificate {
    /// Winding of the image loop around the origin.
    pub winding: i32,
    /// Smallest magnitude of the map over all boundary samples.
    pub min_abs: f64,
    /// Total number of boundary evaluations used.
    pub samples: usize,
}

fn wrap_angle(d: f64) -> f64 {
    let mut d = d % TAU;
    if d > PI {
        d -= TAU;
    } else if d <= -PI {
        d += TAU;
    }
    d
}

struct LoopWalker<'a> {
    f: &'a mut dyn FnMut(f64, f64) -> Result<[f64; 2], NumericsError>,
    vertices: &'a [(f64, f64)],
    tol: f64,
    min_abs: f64,
    samples: usize,
}

impl<'a> LoopWalker<'a> {
    /// Piecewise-linear point on the closed polygon at parameter `t` in
    /// units of edges (edge `k` spans `[k, k+1]`).
    fn point(&self, t: f64) -> (f64, f64) {
        let n = self.vertices.len();
        let k = (t.floor() as usize).min(n - 1);
        let frac = t - k as f64;
        let a = self.vertices[k];
        let b = self.vertices[(k + 1) % n];
        (a.0 + frac * (b.0 - a.0), a.1 + frac * (b.1 - a.1))
    }

    fn eval(&mut self, t: f64) -> Result<[f64; 2], NumericsError> {
        let (x, y) = self.point(t);
        let v = (self.f)(x, y)?;
        let mag = v[0].hypot(v[1]);
        self.samples += 1;
        if mag < self.min_abs {
            self.min_abs = mag;
        }
        if mag <= self.tol {
            return Err(NumericsError::ZeroOnBoundary {
                min_abs: mag,
                tol: self.tol,
            });
        }
        Ok(v)
    }

    /// Total continuous angle change along `[t0, t1]`, bisecting until each
    /// piece turns by less than a quarter circle.
    fn arc(
        &mut self,
        t0: f64,
        t1: f64,
        v0: [f64; 2],
        v1: [f64; 2],
        depth: usize,
    ) -> Result<f64, NumericsError> {
        let d = wrap_angle(v1[1].atan2(v1[0]) - v0[1].atan2(v0[0]));
        if d.abs() <= FRAC_PI_2 {
            return Ok(d);
        }
        if depth == 0 {
            return Err(NumericsError::RefinementExhausted {
                segments: self.samples,
            });
        }
        let tm = 0.5 * (t0 + t1);
        let vm = self.eval(tm)?;
        Ok(self.arc(t0, tm, v0, vm, depth - 1)? + self.arc(tm, t1, vm, v1, depth - 1)?)
    }
}

/// Winding number of the image of a closed polygon under `f` around the
/// origin. `vertices` lists the polygon corners in traversal order (the
/// last connects back to the first); `samples_per_edge` sets the initial
/// sampling density, refined adaptively where the image turns fast.
pub fn winding_number(
    f: &mut dyn FnMut(f64, f64) -> Result<[f64; 2], NumericsError>,
    vertices: &[(f64, f64)],
    samples_per_edge: usize,
    tol: f64,
) -> Result<WindingCertificate, NumericsError> {
    assert!(vertices.len() >= 3 && samples_per_edge >= 1);
    let n_edges = vertices.len();
    let mut walker = LoopWalker {
        f,
        vertices,
        tol,
        min_abs: f64::INFINITY,
        samples: 0,
    };

    // Initial parameter ring.
    let mut ts = Vec::with_capacity(n_edges * samples_per_edge);
    for k in 0..n_edges {
        for j in 0..samples_per_edge {
            ts.push(k as f64 + j as f64 / samples_per_edge as f64);
        }
    }
    let vs: Vec<[f64; 2]> = ts
        .iter()
        .map(|&t| walker.eval(t))
        .collect::<Result<_, _>>()?;

    let mut total = 0.0;
    for i in 0..ts.len() {
        let j = (i + 1) % ts.len();
        let t1 = if j == 0 { n_edges as f64 } else { ts[j] };
        total += walker.arc(ts[i], t1, vs[i], vs[j], 48)?;
    }

    let winding = (total / TAU).round();
    // Quarter-circle pieces around a closed loop must sum to a whole turn.
    assert!(
        (total - TAU * winding).abs() < 1e-6,
        "angle sum {total} is not a multiple of 2*pi"
    );
    Ok(WindingCertificate {
        winding: winding as i32,
        min_abs: walker.min_abs,
        samples: walker.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<(f64, f64)> {
        vec![(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
    }

    #[test]
    fn scalar_degree_detects_sign_change() {
        assert_eq!(degree_1d(-2.0, 3.0, 1e-9).unwrap(), 1);
        assert_eq!(degree_1d(2.0, -3.0, 1e-9).unwrap(), -1);
        assert_eq!(degree_1d(2.0, 3.0, 1e-9).unwrap(), 0);
        assert!(matches!(
            degree_1d(1e-12, 1.0, 1e-9),
            Err(NumericsError::ZeroAtEndpoint { .. })
        ));
    }

    type Planar = Result<[f64; 2], NumericsError>;

    #[test]
    fn identity_winds_once() {
        let mut f = |x: f64, y: f64| -> Planar { Ok([x, y]) };
        let cert = winding_number(&mut f, &square(), 8, 1e-12).unwrap();
        assert_eq!(cert.winding, 1);
        assert!(cert.min_abs > 0.9);
    }

    #[test]
    fn squaring_winds_twice_and_conjugation_backwards() {
        let mut sq = |x: f64, y: f64| -> Planar { Ok([x * x - y * y, 2.0 * x * y]) };
        assert_eq!(winding_number(&mut sq, &square(), 8, 1e-12).unwrap().winding, 2);
        let mut conj = |x: f64, y: f64| -> Planar { Ok([x, -y]) };
        assert_eq!(
            winding_number(&mut conj, &square(), 8, 1e-12).unwrap().winding,
            -1
        );
    }

    #[test]
    fn map_without_enclosed_zero_winds_zero() {
        let mut f = |x: f64, y: f64| -> Planar { Ok([x - 5.0, y]) };
        assert_eq!(winding_number(&mut f, &square(), 8, 1e-12).unwrap().winding, 0);
    }

    #[test]
    fn zero_near_boundary_forces_refinement_but_succeeds() {
        // Zero at (0.999, 0.1): off the coarse sample midline, so one arc
        // increment exceeds a quarter turn and forces adaptive bisection.
        let mut f = |x: f64, y: f64| -> Planar { Ok([x - 0.999, y - 0.1]) };
        let cert = winding_number(&mut f, &square(), 4, 1e-12).unwrap();
        assert_eq!(cert.winding, 1);
        assert!(cert.samples > 16);
    }

    #[test]
    fn zero_on_boundary_is_rejected() {
        let mut f = |x: f64, y: f64| -> Planar { Ok([x - 1.0, y]) };
        assert!(matches!(
            winding_number(&mut f, &square(), 4, 1e-9),
            Err(NumericsError::ZeroOnBoundary { .. })
        ));
    }
}
