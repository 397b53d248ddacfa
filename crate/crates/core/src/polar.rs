//! Spherical polar duality.
//!
//! For a polytope the polar is an exact exchange of the vertex and
//! hemisphere lists. The polar of a cap intersection is the hull of the
//! polar caps; it is materialized as an inscribed polytope (an inner
//! approximation) from `boundary_samples` points on each polar cap circle.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::bodies::{cap_boundary_points, Body, SphericalPolytope};
use crate::error::{GeomError, Result};
use crate::metrics::farthest_point;
use crate::sphere::{cap_polar, SpherePoint, ToleranceConfig};

pub fn polar_polytope(k: &SphericalPolytope) -> SphericalPolytope {
    k.swapped()
}

pub fn polar_body(b: &Body, cfg: &ToleranceConfig) -> Result<Body> {
    match b {
        Body::Polytope(p) => Ok(Body::Polytope(polar_polytope(p))),
        Body::Caps(body) => {
            let mut points: Vec<SpherePoint> = Vec::new();
            for cap in body.caps() {
                let pc = cap_polar(cap);
                if pc.is_point() {
                    points.push(pc.center.clone());
                } else {
                    points.extend(cap_boundary_points(&pc.center, pc.radius, cfg.boundary_samples));
                }
            }
            let poly = SphericalPolytope::s_conv(&points, cfg.tol_angle).map_err(|e| match e {
                GeomError::ImproperBody(m) | GeomError::EmptyInterior(m) => {
                    GeomError::ImproperBody(format!("polar is not a proper body: {m}"))
                }
                other => other,
            })?;
            Ok(Body::Polytope(poly))
        }
    }
}

/// Direct test of `Q ∈ B°`: the whole body lies in `S_Q^+`, i.e. no point
/// of `B` is farther than `π/2` from `Q`.
pub fn polar_membership(b: &Body, q: &SpherePoint, cfg: &ToleranceConfig) -> Result<bool> {
    if q.dim() != b.dim() {
        return Err(GeomError::DimensionMismatch { expected: b.dim(), got: q.dim() });
    }
    match b {
        Body::Polytope(p) => Ok(p.vertices().iter().all(|v| v.dot(q) >= -cfg.tol_sample)),
        Body::Caps(_) => {
            let (_, angle) = farthest_point(b, q, cfg)?;
            Ok(angle <= FRAC_PI_2 + cfg.tol_sample)
        }
    }
}

/// Outcome of one sampled property check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub body_summary: String,
    pub samples: usize,
    pub max_violation: f64,
    pub pass: bool,
}

pub fn body_summary(b: &Body) -> String {
    match b {
        Body::Polytope(p) => format!(
            "polytope(d={}, {} vertices, {} hemispheres)",
            p.dim(),
            p.vertices().len(),
            p.hcenters().len()
        ),
        Body::Caps(c) => format!("caps(d={}, {} caps)", c.dim(), c.caps().len()),
    }
}

/// Samples boundary points of `B°` and checks that every supporting
/// hemisphere center of `B°` there lies on `∂B`. The violation of a center
/// is the absolute value of its slack in `B`.
pub fn check_lemma_2_2(b: &Body, samples: usize, cfg: &ToleranceConfig) -> Result<CheckReport> {
    let polar = polar_body(b, cfg)?;
    let points = polar.boundary_sample(samples, cfg.stream(22))?;
    let mut max_violation: f64 = 0.0;
    for p in &points {
        for q in polar.supporting_centers(p, cfg.tol_sample)? {
            let slack = b.slack(&q);
            let inside = b.contains(&q, cfg.tol_sample)?;
            let violation = if inside { slack.abs() } else { slack.abs().max(cfg.tol_sample * 2.0) };
            max_violation = max_violation.max(violation);
        }
    }
    Ok(CheckReport {
        check: "lemma22".into(),
        body_summary: body_summary(b),
        samples: points.len(),
        max_violation,
        pass: max_violation <= cfg.tol_sample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::CapIntersectionBody;
    use crate::sphere::{angle_between, normalize, Cap};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn orthant() -> Body {
        let pts: Vec<SpherePoint> = (0..3).map(|k| SpherePoint::basis(3, k)).collect();
        Body::Polytope(SphericalPolytope::s_conv(&pts, 1e-9).unwrap())
    }

    fn random_sphere(rng: &mut ChaCha8Rng) -> SpherePoint {
        let g: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
        normalize(&g).unwrap()
    }

    #[test]
    fn orthant_is_self_polar() {
        let o = orthant();
        let p = polar_body(&o, &ToleranceConfig::default()).unwrap();
        let (a, b) = (o.as_polytope().unwrap(), p.as_polytope().unwrap());
        for v in b.vertices() {
            assert!(a.vertices().iter().any(|w| angle_between(v.coords(), w.coords()) < 1e-12));
        }
        assert_eq!(polar_polytope(&polar_polytope(a)), *a);
    }

    #[test]
    fn polar_membership_matches_definition() {
        let cfg = ToleranceConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = normalize(&[0.2, 0.1, 1.0]).unwrap();
        let pts: Vec<SpherePoint> = (0..7)
            .map(|_| {
                let u = c.random_tangent(&mut rng);
                c.along(&u, rng.gen_range(0.1..0.5))
            })
            .collect();
        let k = Body::Polytope(SphericalPolytope::s_conv(&pts, 1e-9).unwrap());
        let kp = polar_body(&k, &cfg).unwrap();
        let verts = k.as_polytope().unwrap().vertices().to_vec();
        for _ in 0..1000 {
            let q = random_sphere(&mut rng);
            let oracle = verts.iter().all(|x| q.dot(x) >= 0.0);
            let margin = verts.iter().map(|x| q.dot(x)).fold(f64::INFINITY, f64::min).abs();
            if margin > 2e-3 {
                assert_eq!(polar_membership(&k, &q, &cfg).unwrap(), oracle);
                assert_eq!(kp.contains(&q, 0.0).unwrap(), oracle);
            }
        }
        assert!(polar_membership(&orthant(), &normalize(&[1.0, 1.0, 1.0]).unwrap(), &cfg).unwrap());
        assert!(!polar_membership(&orthant(), &normalize(&[-1.0, 0.0, 0.0]).unwrap(), &cfg).unwrap());
    }

    #[test]
    fn polar_of_a_cap_is_the_complementary_cap() {
        let cfg = ToleranceConfig::default();
        let n = SpherePoint::north(3);
        let r = 0.5;
        let b = Body::Caps(CapIntersectionBody::new(vec![Cap::new(n.clone(), r).unwrap()]).unwrap());
        let p = polar_body(&b, &cfg).unwrap();
        for v in p.as_polytope().unwrap().vertices() {
            assert_abs_diff_eq!(angle_between(v.coords(), n.coords()), FRAC_PI_2 - r, epsilon = 1e-12);
        }
        // inner approximation: the inscribed polygon loses at most r(1 − cos(π/m))
        for q in p.boundary_sample(200, 3).unwrap() {
            let d = angle_between(q.coords(), n.coords());
            assert!(d <= FRAC_PI_2 - r + 1e-12 && d >= FRAC_PI_2 - r - 1e-5, "{d}");
        }
    }

    #[test]
    fn supporting_centers_on_simple_bodies() {
        let cfg = ToleranceConfig::default();
        let rep = check_lemma_2_2(&orthant(), 200, &cfg).unwrap();
        assert!(rep.pass, "{rep:?}");
        let b = Body::Caps(
            CapIntersectionBody::new(vec![Cap::new(SpherePoint::north(3), 0.6).unwrap()]).unwrap(),
        );
        let rep = check_lemma_2_2(&b, 200, &cfg).unwrap();
        assert!(rep.max_violation < 1e-5, "{rep:?}");
    }
}
