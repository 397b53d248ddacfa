//! Diameter, width, thickness and the constancy tests built on them.
//!
//! Polytopes are handled exactly. The farthest point from `P` is the point
//! nearest to `−P`: within `π/2` it is a vertex (`P·x/‖x‖` is
//! quasi-concave where `P·x ≥ 0`), beyond it is the normalized projection
//! of `−P` onto the body's cone. Cap bodies on S² are handled by a closed-form candidate set:
//! the farthest point from `P` is either the far point of one cap circle,
//! a corner where two circles meet, or `−P` itself. Other cap bodies fall
//! back to boundary sampling with local refinement.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::bodies::Body;
use crate::error::{GeomError, Result};
use crate::grid::fibonacci_sphere;
use crate::hull::{cone_projection, lex_cmp};
use crate::polar::polar_body;
use crate::sphere::{angle_between, axpy, normalize, scale, SpherePoint, ToleranceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactVertices,
    Sampled,
}

#[derive(Debug, Clone, Serialize)]
pub struct WidthReport {
    pub value: f64,
    pub witness_pair: (SpherePoint, SpherePoint),
    pub method: Method,
    /// Value from the independent second route, when one was run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstancyReport {
    pub is_constant: bool,
    pub tau: f64,
    pub max_deviation: f64,
    pub samples_used: usize,
}

fn method_of(b: &Body) -> Method {
    match b {
        Body::Polytope(_) => Method::ExactVertices,
        Body::Caps(_) => Method::Sampled,
    }
}

/// Farthest point of `B` from `P` and its distance.
pub fn farthest_point(b: &Body, p: &SpherePoint, cfg: &ToleranceConfig) -> Result<(SpherePoint, f64)> {
    if p.dim() != b.dim() {
        return Err(GeomError::DimensionMismatch { expected: b.dim(), got: p.dim() });
    }
    match b {
        Body::Polytope(poly) => Ok(polytope_farthest(p, poly.vertices())),
        Body::Caps(_) if b.dim() == 3 => {
            let candidates = cap_candidates(b, p);
            if candidates.is_empty() {
                return sampled_farthest(b, p, cfg);
            }
            Ok(argmax_distance(p, &candidates))
        }
        Body::Caps(_) => sampled_farthest(b, p, cfg),
    }
}

fn polytope_farthest(p: &SpherePoint, verts: &[SpherePoint]) -> (SpherePoint, f64) {
    let (v, d) = argmax_distance(p, verts);
    if d <= FRAC_PI_2 {
        return (v, d);
    }
    let z = cone_projection(verts, &scale(p.coords(), -1.0));
    match normalize(&z) {
        Ok(y) => {
            let dy = angle_between(p.coords(), y.coords());
            if dy > d {
                (y, dy)
            } else {
                (v, d)
            }
        }
        Err(_) => (v, d),
    }
}

fn argmax_distance(p: &SpherePoint, pts: &[SpherePoint]) -> (SpherePoint, f64) {
    // farthest = smallest dot product; the angle is taken once at the end
    let mut best: Option<(&SpherePoint, f64)> = None;
    for q in pts {
        let c = p.dot(q);
        best = match best {
            Some((bq, bc)) if bc < c || (bc == c && lex_cmp(bq.coords(), q.coords()).is_le()) => {
                Some((bq, bc))
            }
            _ => Some((q, c)),
        };
    }
    let (q, _) = best.expect("nonempty candidate list");
    (q.clone(), angle_between(p.coords(), q.coords()))
}

/// Candidate maximizers of the distance from `p` over an S² cap body.
fn cap_candidates(b: &Body, p: &SpherePoint) -> Vec<SpherePoint> {
    const IN: f64 = -1e-10;
    let mut out = b.corners();
    let anti = p.antipode();
    if b.slack(&anti) >= IN {
        out.push(anti);
    }
    for (center, radius) in b.constraints() {
        let x = match center.tangent_toward(p.coords()) {
            Some(t) => center.along(&scale(&t, -1.0), radius),
            None if center.dot(p) > 0.0 => center.along(&center.tangent_basis()[0], radius),
            None => center.clone(),
        };
        if b.slack(&x) >= IN {
            out.push(x);
        }
    }
    out
}

fn sampled_farthest(b: &Body, p: &SpherePoint, cfg: &ToleranceConfig) -> Result<(SpherePoint, f64)> {
    let c = b.interior_point()?;
    let dirs = tangent_directions(&c, cfg.boundary_samples);
    let f = |u: &[f64]| -> f64 {
        b.boundary_point(&c, u).map(|x| angle_between(p.coords(), x.coords())).unwrap_or(0.0)
    };
    let (u, _) = maximize_over_directions(&c, &dirs, 4, 1e-11, &f);
    let x = b.boundary_point(&c, &u)?;
    let d = angle_between(p.coords(), x.coords());
    Ok((x, d))
}

/// Deterministic unit tangent directions at `c`.
fn tangent_directions(c: &SpherePoint, m: usize) -> Vec<Vec<f64>> {
    let basis = c.tangent_basis();
    match basis.len() {
        1 => vec![basis[0].clone(), scale(&basis[0], -1.0)],
        2 => (0..m)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / m as f64;
                axpy(&scale(&basis[0], phi.cos()), phi.sin(), &basis[1])
            })
            .collect(),
        _ => fibonacci_sphere(m)
            .into_iter()
            .map(|v| {
                let mut u = vec![0.0; c.dim()];
                for (k, e) in basis.iter().take(3).enumerate() {
                    u = axpy(&u, v[k], e);
                }
                u
            })
            .collect(),
    }
}

/// Maximizes `f` over unit tangents at `c`: scan `dirs`, then refine the
/// best `restarts` by a pattern search along the tangent basis, halving the
/// step down to `min_step`.
fn maximize_over_directions(
    c: &SpherePoint,
    dirs: &[Vec<f64>],
    restarts: usize,
    min_step: f64,
    f: &dyn Fn(&[f64]) -> f64,
) -> (Vec<f64>, f64) {
    let mut scored: Vec<(f64, usize)> = dirs.iter().enumerate().map(|(i, u)| (f(u), i)).collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let basis = c.tangent_basis();
    let spacing = if basis.len() == 2 {
        std::f64::consts::TAU / dirs.len() as f64
    } else {
        (4.0 * PI / dirs.len() as f64).sqrt()
    };
    let retangent = |v: &[f64]| -> Option<Vec<f64>> { c.tangent_toward(v) };
    let mut best = (dirs[scored[0].1].clone(), scored[0].0);
    for &(val, i) in scored.iter().take(restarts) {
        let mut u = dirs[i].clone();
        let mut fu = val;
        let mut step = spacing;
        while step > min_step {
            let mut improved = false;
            for e in &basis {
                for s in [step, -step] {
                    let Some(v) = retangent(&axpy(&u, s, e)) else { continue };
                    let fv = f(&v);
                    if fv > fu {
                        u = v;
                        fu = fv;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if fu > best.1 {
            best = (u, fu);
        }
    }
    best
}

/// Largest distance between two points of the body.
pub fn diameter(b: &Body, cfg: &ToleranceConfig) -> Result<WidthReport> {
    let pts: Vec<SpherePoint> = match b {
        Body::Polytope(p) => p.vertices().to_vec(),
        Body::Caps(_) => {
            let mut s = b.boundary_sample(cfg.boundary_samples, cfg.stream(1))?;
            s.extend(b.corners());
            s
        }
    };
    if pts.len() < 2 {
        return Err(GeomError::EmptyInterior("fewer than two boundary points".into()));
    }
    let mut best = (0usize, 1usize, f64::INFINITY);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let c = pts[i].dot(&pts[j]);
            if c < best.2 {
                best = (i, j, c);
            }
        }
    }
    let (mut p, mut q) = (pts[best.0].clone(), pts[best.1].clone());
    let mut value = angle_between(p.coords(), q.coords());
    let refine = match b {
        Body::Caps(_) => true,
        // a polytope diameter beyond π/2 may end inside a facet
        Body::Polytope(_) => value > FRAC_PI_2,
    };
    if refine {
        if let Body::Polytope(poly) = b {
            for v in poly.vertices() {
                let (w, d) = farthest_point(b, v, cfg)?;
                if d > value {
                    (p, q, value) = (v.clone(), w, d);
                }
            }
        }
        // alternate: fix one end, move the other to the farthest point
        for _ in 0..100 {
            let (q2, d1) = farthest_point(b, &p, cfg)?;
            let (p2, d2) = farthest_point(b, &q2, cfg)?;
            if d2.max(d1) <= value + cfg.tol_angle {
                if d1 > value {
                    q = q2;
                    value = d1;
                }
                break;
            }
            if d2 >= d1 {
                p = p2;
                q = q2;
                value = d2;
            } else {
                q = q2;
                value = d1;
            }
        }
    }
    if lex_cmp(p.coords(), q.coords()).is_gt() {
        std::mem::swap(&mut p, &mut q);
    }
    Ok(WidthReport { value, witness_pair: (p, q), method: method_of(b), cross_check: None })
}

fn reject_antipodal(b: &Body, cfg: &ToleranceConfig) -> Result<()> {
    let d = diameter(b, cfg)?.value;
    if d > PI - cfg.tol_sample {
        return Err(GeomError::ImproperBody(format!(
            "diameter {d} too close to π for width analysis"
        )));
    }
    Ok(())
}

/// Distance from `P` to the farthest point of `B°`, by walking geodesics
/// out of `P` and stopping where the polar condition `B ⊂ S_Q^+` fails.
/// Uses only membership in `B°`, never a materialized polar.
pub fn polar_reach(b: &Body, p: &SpherePoint, cfg: &ToleranceConfig) -> Result<f64> {
    let in_polar = |q: &SpherePoint| -> bool {
        match b {
            Body::Polytope(poly) => poly.vertices().iter().all(|v| v.dot(q) >= 0.0),
            Body::Caps(_) => farthest_point(b, q, cfg).map(|(_, a)| a <= FRAC_PI_2).unwrap_or(false),
        }
    };
    let reach = |u: &[f64]| -> f64 {
        let (mut lo, mut hi) = (0.0, PI);
        if !in_polar(&p.along(u, 1e-9)) {
            return 0.0;
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if in_polar(&p.along(u, mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let dirs = tangent_directions(p, if p.dim() == 3 { 256 } else { 512 });
    let (_, best) = maximize_over_directions(p, &dirs, 8, 1e-7, &reach);
    Ok(best)
}

/// Width of `B` with respect to the supporting hemisphere `S_P^+`,
/// `π − max{|PQ| : Q ∈ B°}`. Route (a) takes the farthest point of the
/// materialized polar; route (b), reported as `cross_check`, walks out of
/// `P` inside the polar defined by its membership condition.
pub fn width_wrt(b: &Body, p: &SpherePoint, cfg: &ToleranceConfig) -> Result<WidthReport> {
    let polar = polar_body(b, cfg)?;
    let mut rep = width_wrt_with_polar(b, &polar, p, cfg)?;
    rep.cross_check = Some(PI - polar_reach(b, p, cfg)?);
    Ok(rep)
}

pub(crate) fn width_wrt_with_polar(
    b: &Body,
    polar: &Body,
    p: &SpherePoint,
    cfg: &ToleranceConfig,
) -> Result<WidthReport> {
    let (_, reach) = farthest_point(b, p, cfg)?;
    if (reach - FRAC_PI_2).abs() > cfg.tol_sample {
        return Err(GeomError::NotSupporting(FRAC_PI_2 - reach));
    }
    let (q, d) = farthest_point(polar, p, cfg)?;
    Ok(WidthReport {
        value: PI - d,
        witness_pair: (p.clone(), q),
        method: method_of(polar),
        cross_check: None,
    })
}

/// Minimum width over all supporting hemispheres, computed as
/// `π − diam(B°)`. The cross-check is the minimum of directly evaluated
/// widths over sampled supporting centers plus the diameter witnesses.
pub fn thickness(b: &Body, cfg: &ToleranceConfig) -> Result<WidthReport> {
    reject_antipodal(b, cfg)?;
    let polar = polar_body(b, cfg)?;
    let d = diameter(&polar, cfg)?;
    let mut centers = polar.boundary_sample(64, cfg.stream(2))?;
    centers.push(d.witness_pair.0.clone());
    centers.push(d.witness_pair.1.clone());
    let mut cross = f64::INFINITY;
    for c in &centers {
        let (_, reach) = farthest_point(&polar, c, cfg)?;
        cross = cross.min(PI - reach);
    }
    Ok(WidthReport {
        value: PI - d.value,
        witness_pair: d.witness_pair,
        method: method_of(&polar),
        cross_check: Some(cross),
    })
}

/// Boundary points used by the constancy tests: random boundary samples
/// plus vertices (polytopes) or circle corners (cap bodies).
fn constancy_points(b: &Body, cfg: &ToleranceConfig, stream: u64) -> Result<Vec<SpherePoint>> {
    let mut pts = b.boundary_sample(cfg.boundary_samples, cfg.stream(stream))?;
    match b {
        Body::Polytope(p) => pts.extend(p.vertices().iter().cloned()),
        Body::Caps(_) => pts.extend(b.corners()),
    }
    Ok(pts)
}

pub fn is_constant_diameter(b: &Body, tol: f64, cfg: &ToleranceConfig) -> Result<ConstancyReport> {
    let tau = diameter(b, cfg)?.value;
    let pts = constancy_points(b, cfg, 3)?;
    let mut max_deviation: f64 = 0.0;
    for p in &pts {
        let (_, d) = farthest_point(b, p, cfg)?;
        max_deviation = max_deviation.max(tau - d);
    }
    Ok(ConstancyReport { is_constant: max_deviation <= tol, tau, max_deviation, samples_used: pts.len() })
}

pub fn is_constant_width(b: &Body, tol: f64, cfg: &ToleranceConfig) -> Result<ConstancyReport> {
    reject_antipodal(b, cfg)?;
    let polar = polar_body(b, cfg)?;
    let centers = constancy_points(&polar, cfg, 4)?;
    let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for c in &centers {
        let (_, reach) = farthest_point(&polar, c, cfg)?;
        let w = PI - reach;
        lo = lo.min(w);
        hi = hi.max(w);
        sum += w;
    }
    let spread = hi - lo;
    Ok(ConstancyReport {
        is_constant: spread <= tol,
        tau: sum / centers.len() as f64,
        max_deviation: spread,
        samples_used: centers.len(),
    })
}

/// Polar-side checks run when a body is of constant width `τ`: the polar
/// must be of constant width and constant diameter `π − τ`.
#[derive(Debug, Clone, Serialize)]
pub struct PolarConstancy {
    pub expected_tau: f64,
    pub width: ConstancyReport,
    pub diameter: ConstancyReport,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub body_summary: String,
    pub constant_width: ConstancyReport,
    pub constant_diameter: ConstancyReport,
    pub verdicts_agree: bool,
    pub tau_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polar: Option<PolarConstancy>,
    pub pass: bool,
}

/// Runs both constancy tests and checks that they agree; for bodies of
/// constant width also checks the polar body's width and diameter.
pub fn verify_theorem_1(b: &Body, tol: f64, cfg: &ToleranceConfig) -> Result<Theorem1Report> {
    let cw = is_constant_width(b, tol, cfg)?;
    let cd = is_constant_diameter(b, tol, cfg)?;
    let verdicts_agree = cw.is_constant == cd.is_constant;
    let tau_gap = (cw.is_constant && cd.is_constant).then(|| (cw.tau - cd.tau).abs());
    let mut pass = verdicts_agree && tau_gap.is_none_or(|g| g <= tol);
    let polar = if cw.is_constant {
        let pb = polar_body(b, cfg)?;
        let expected_tau = PI - cw.tau;
        let width = is_constant_width(&pb, tol, cfg)?;
        let diameter = is_constant_diameter(&pb, tol, cfg)?;
        let ok = width.is_constant
            && diameter.is_constant
            && (width.tau - expected_tau).abs() <= tol
            && (diameter.tau - expected_tau).abs() <= tol;
        pass &= ok;
        Some(PolarConstancy { expected_tau, width, diameter, pass: ok })
    } else {
        None
    };
    Ok(Theorem1Report {
        body_summary: crate::polar::body_summary(b),
        constant_width: cw,
        constant_diameter: cd,
        verdicts_agree,
        tau_gap,
        polar,
        pass,
    })
}

/// Upper bound on the Hausdorff distance between two bodies sharing an
/// interior point: the largest gap between their boundary crossings along
/// common geodesics out of that point.
pub fn radial_hausdorff(a: &Body, b: &Body, samples: usize, seed: u64) -> Result<f64> {
    let c = a.interior_point()?;
    if b.slack(&c) <= 1e-12 {
        return Err(GeomError::NotInterior(b.slack(&c)));
    }
    let mut dirs = tangent_directions(&c, samples);
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
    dirs.extend((0..samples).map(|_| c.random_tangent(&mut rng)));
    // geodesics through vertices catch the corners of polytopes
    for body in [a, b] {
        if let Body::Polytope(p) = body {
            dirs.extend(p.vertices().iter().filter_map(|v| c.tangent_toward(v.coords())));
        }
    }
    let mut worst: f64 = 0.0;
    for u in &dirs {
        worst = worst.max((a.exit_angle(&c, u)? - b.exit_angle(&c, u)?).abs());
    }
    Ok(worst)
}
