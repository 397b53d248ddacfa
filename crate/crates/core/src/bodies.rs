//! Proper spherical convex bodies: polytopes carried in both vertex and
//! hemisphere form, and finite intersections of caps.
//!
//! Every constraint of either kind is a cap `(center, radius)`; a polytope
//! facet is the hemisphere `(h, π/2)`. Membership, boundary access and
//! supporting hemispheres are expressed once over that common view.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::hull::{cone_hull, lex_cmp};
use crate::sphere::{
    angle_between, axpy, dot, norm, normalize, scale, Cap, SpherePoint, ToleranceConfig,
};

/// Proper spherical polytope in dual representations.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalPolytope {
    vertices: Vec<SpherePoint>,
    hcenters: Vec<SpherePoint>,
}

impl SphericalPolytope {
    /// Spherical convex hull of a finite point set.
    pub fn s_conv(points: &[SpherePoint], tol_angle: f64) -> Result<Self> {
        let hull = cone_hull(points, tol_angle)?;
        let vertices = hull.extreme.iter().map(|&i| points[i].clone()).collect();
        Ok(Self { vertices, hcenters: hull.facets })
    }

    /// Intersection of the closed hemispheres centered at `centers`.
    pub fn from_hemispheres(centers: &[SpherePoint], tol_angle: f64) -> Result<Self> {
        // ∩ S_h^+ is the polar of s-conv(centers): a degenerate hull means the
        // intersection is unbounded, an improper hull means it is flat
        let hull = cone_hull(centers, tol_angle).map_err(|e| match e {
            GeomError::EmptyInterior(_) => GeomError::ImproperBody(
                "hemisphere intersection is not inside an open hemisphere".into(),
            ),
            GeomError::ImproperBody(_) => {
                GeomError::EmptyInterior("hemisphere intersection has no interior".into())
            }
            other => other,
        })?;
        let hcenters = hull.extreme.iter().map(|&i| centers[i].clone()).collect();
        Ok(Self { vertices: hull.facets, hcenters })
    }

    /// Rebuilds a polytope from stored representations, checking that they
    /// describe the same proper body.
    pub fn from_parts(
        vertices: Vec<SpherePoint>,
        hcenters: Vec<SpherePoint>,
        tol_angle: f64,
    ) -> Result<Self> {
        let fresh = Self::s_conv(&vertices, tol_angle)?;
        let tol = 1e-7;
        let same = |a: &[SpherePoint], b: &[SpherePoint]| {
            a.len() == b.len()
                && a.iter().all(|p| b.iter().any(|q| angle_between(p.coords(), q.coords()) < tol))
        };
        if !same(&fresh.vertices, &vertices) || !same(&fresh.hcenters, &hcenters) {
            return Err(GeomError::InvalidParameter(
                "vertex and hemisphere representations disagree".into(),
            ));
        }
        Ok(Self { vertices, hcenters })
    }

    pub fn vertices(&self) -> &[SpherePoint] {
        &self.vertices
    }

    pub fn hcenters(&self) -> &[SpherePoint] {
        &self.hcenters
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    /// Exchanges the two representations. This is the spherical polar.
    pub(crate) fn swapped(&self) -> Self {
        Self { vertices: self.hcenters.clone(), hcenters: self.vertices.clone() }
    }
}

/// Intersection of finitely many caps.
#[derive(Debug, Clone, PartialEq)]
pub struct CapIntersectionBody {
    caps: Vec<Cap>,
}

impl CapIntersectionBody {
    pub fn new(caps: Vec<Cap>) -> Result<Self> {
        let Some(first) = caps.first() else {
            return Err(GeomError::ImproperBody("no caps".into()));
        };
        let d = first.dim();
        if let Some(c) = caps.iter().find(|c| c.dim() != d) {
            return Err(GeomError::DimensionMismatch { expected: d, got: c.dim() });
        }
        if caps.iter().any(Cap::is_point) {
            return Err(GeomError::EmptyInterior("radius-0 cap".into()));
        }
        if caps.iter().all(Cap::is_hemisphere) {
            let centers: Vec<SpherePoint> = caps.iter().map(|c| c.center.clone()).collect();
            SphericalPolytope::from_hemispheres(&centers, 1e-9)?;
        }
        let body = Self { caps };
        Body::Caps(body.clone()).interior_point()?;
        Ok(body)
    }

    pub fn caps(&self) -> &[Cap] {
        &self.caps
    }

    pub fn dim(&self) -> usize {
        self.caps[0].dim()
    }
}

/// A proper spherical convex body.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Polytope(SphericalPolytope),
    Caps(CapIntersectionBody),
}

impl From<SphericalPolytope> for Body {
    fn from(p: SphericalPolytope) -> Self {
        Body::Polytope(p)
    }
}

impl From<CapIntersectionBody> for Body {
    fn from(c: CapIntersectionBody) -> Self {
        Body::Caps(c)
    }
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::Polytope(p) => p.dim(),
            Body::Caps(c) => c.dim(),
        }
    }

    pub fn as_polytope(&self) -> Option<&SphericalPolytope> {
        match self {
            Body::Polytope(p) => Some(p),
            Body::Caps(_) => None,
        }
    }

    /// Constraints as `(center, radius)` pairs.
    pub fn constraints(&self) -> Vec<(&SpherePoint, f64)> {
        match self {
            Body::Polytope(p) => p.hcenters.iter().map(|h| (h, FRAC_PI_2)).collect(),
            Body::Caps(c) => c.caps.iter().map(|c| (&c.center, c.radius)).collect(),
        }
    }

    fn check_dim(&self, q: &SpherePoint) -> Result<()> {
        if q.dim() != self.dim() {
            return Err(GeomError::DimensionMismatch { expected: self.dim(), got: q.dim() });
        }
        Ok(())
    }

    /// Smallest angular margin over all constraints. Positive inside,
    /// zero on the boundary, negative outside.
    pub fn slack(&self, q: &SpherePoint) -> f64 {
        match self {
            Body::Polytope(p) => p
                .hcenters
                .iter()
                .map(|h| h.dot(q).clamp(-1.0, 1.0).asin())
                .fold(f64::INFINITY, f64::min),
            Body::Caps(c) => c.caps.iter().map(|c| c.slack(q)).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn contains(&self, q: &SpherePoint, tol_angle: f64) -> Result<bool> {
        self.check_dim(q)?;
        Ok(match self {
            Body::Polytope(p) => p.hcenters.iter().all(|h| h.dot(q) >= -tol_angle),
            Body::Caps(c) => c.caps.iter().all(|c| c.center.dot(q) >= c.radius.cos() - tol_angle),
        })
    }

    /// A strictly interior point: the normalized vertex centroid (polytope)
    /// or cap-center mean, with a maximal-slack search as fallback.
    pub fn interior_point(&self) -> Result<SpherePoint> {
        const MIN_SLACK: f64 = 1e-9;
        let seeds: Vec<&SpherePoint> = match self {
            Body::Polytope(p) => p.vertices.iter().collect(),
            Body::Caps(c) => c.caps.iter().map(|c| &c.center).collect(),
        };
        let mut mean = vec![0.0; self.dim()];
        for s in &seeds {
            mean = axpy(&mean, 1.0, s.coords());
        }
        let start = normalize(&mean).unwrap_or_else(|_| seeds[0].clone());
        if self.slack(&start) > MIN_SLACK {
            return Ok(start);
        }
        let best = self.max_slack_search(start);
        let s = self.slack(&best);
        if s > MIN_SLACK {
            Ok(best)
        } else {
            Err(GeomError::EmptyInterior(format!("best interior slack {s:.3e}")))
        }
    }

    /// Subgradient ascent on the minimum constraint slack.
    fn max_slack_search(&self, start: SpherePoint) -> SpherePoint {
        let constraints = self.constraints();
        let mut q = start;
        let mut best = (q.clone(), self.slack(&q));
        for k in 0..4000 {
            let (center, _) = constraints
                .iter()
                .min_by(|a, b| (a.1 - angle_between(a.0.coords(), q.coords()))
                    .total_cmp(&(b.1 - angle_between(b.0.coords(), q.coords()))))
                .unwrap();
            let step = 0.2 / (1.0 + k as f64).sqrt();
            let Some(t) = q.tangent_toward(center.coords()) else { break };
            q = q.along(&t, step);
            let s = self.slack(&q);
            if s > best.1 {
                best = (q.clone(), s);
            }
        }
        best.0
    }

    /// Angle at which the geodesic `t ↦ cos(t)c + sin(t)u` leaves the body,
    /// from the closed-form exit of each cap constraint.
    pub fn exit_angle(&self, c: &SpherePoint, u: &[f64]) -> Result<f64> {
        let s = self.slack(c);
        if !(s > 1e-12) {
            return Err(GeomError::NotInterior(s));
        }
        let mut exit = PI;
        for (center, radius) in self.constraints() {
            let a = center.dot(c);
            let b = dot(center.coords(), u);
            let r = a.hypot(b);
            let phi = b.atan2(a);
            let half = (radius.cos() / r).clamp(-1.0, 1.0).acos();
            exit = exit.min(phi + half);
        }
        if exit >= PI - 1e-12 {
            return Err(GeomError::ImproperBody("geodesic never leaves the body".into()));
        }
        Ok(exit)
    }

    /// Where the geodesic from the interior point `c` in tangent direction
    /// `u` crosses the boundary.
    pub fn boundary_point(&self, c: &SpherePoint, u: &[f64]) -> Result<SpherePoint> {
        self.check_dim(c)?;
        if dot(c.coords(), u).abs() > 1e-9 || (norm(u) - 1.0).abs() > 1e-9 {
            return Err(GeomError::InvalidParameter("direction must be a unit tangent".into()));
        }
        Ok(c.along(u, self.exit_angle(c, u)?))
    }

    /// `m` boundary points along uniformly random tangent directions at the
    /// interior point. Deterministic for a fixed seed.
    pub fn boundary_sample(&self, m: usize, seed: u64) -> Result<Vec<SpherePoint>> {
        if m == 0 {
            return Ok(Vec::new());
        }
        let c = self.interior_point()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m)
            .map(|_| {
                let u = c.random_tangent(&mut rng);
                self.boundary_point(&c, &u)
            })
            .collect()
    }

    /// Centers of the supporting hemispheres at a boundary point `p`: active
    /// hemisphere centers of a polytope, or the tangent hemisphere of each
    /// active cap.
    pub fn supporting_centers(&self, p: &SpherePoint, tol_sample: f64) -> Result<Vec<SpherePoint>> {
        self.check_dim(p)?;
        let s = self.slack(p);
        if s.abs() > tol_sample {
            return Err(GeomError::NotOnBoundary(s));
        }
        let mut out: Vec<SpherePoint> = Vec::new();
        match self {
            Body::Polytope(poly) => {
                out.extend(poly.hcenters.iter().filter(|h| h.dot(p).abs() <= tol_sample).cloned());
            }
            Body::Caps(body) => {
                for cap in body.caps.iter().filter(|c| c.slack(p).abs() <= tol_sample) {
                    let c = cap.center.coords();
                    let q = normalize(&axpy(c, -dot(c, p.coords()), p.coords()))?;
                    if !out.iter().any(|o| angle_between(o.coords(), q.coords()) < 1e-12) {
                        out.push(q);
                    }
                }
            }
        }
        out.sort_by(|a, b| lex_cmp(a.coords(), b.coords()));
        Ok(out)
    }

    /// Pairwise intersections of cap boundary circles that lie in the body
    /// (S² cap bodies only; empty otherwise).
    pub fn corners(&self) -> Vec<SpherePoint> {
        let Body::Caps(body) = self else { return Vec::new() };
        if body.dim() != 3 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (i, a) in body.caps.iter().enumerate() {
            for b in &body.caps[i + 1..] {
                for x in circle_intersections(a, b) {
                    if self.slack(&x) >= -1e-10 {
                        out.push(x);
                    }
                }
            }
        }
        out
    }
}

fn circle_intersections(a: &Cap, b: &Cap) -> Vec<SpherePoint> {
    let (ca, cb) = (a.center.coords(), b.center.coords());
    let g = dot(ca, cb);
    let det = 1.0 - g * g;
    if det <= 1e-15 {
        return Vec::new();
    }
    let (ka, kb) = (a.radius.cos(), b.radius.cos());
    let alpha = (ka - g * kb) / det;
    let beta = (kb - g * ka) / det;
    let base = axpy(&scale(ca, alpha), beta, cb);
    let rest = 1.0 - dot(&base, &base);
    if rest < 0.0 {
        return Vec::new();
    }
    let n = [
        ca[1] * cb[2] - ca[2] * cb[1],
        ca[2] * cb[0] - ca[0] * cb[2],
        ca[0] * cb[1] - ca[1] * cb[0],
    ];
    let n = scale(&n, 1.0 / norm(&n));
    let t = rest.sqrt();
    [t, -t].iter().filter_map(|&s| normalize(&axpy(&base, s, &n)).ok()).collect()
}

/// Points spread over the boundary circle of `cap(center, radius)`:
/// uniform angles on S², a Fibonacci lattice of tangent directions on S³.
pub(crate) fn cap_boundary_points(center: &SpherePoint, radius: f64, m: usize) -> Vec<SpherePoint> {
    let basis = center.tangent_basis();
    let dirs: Vec<Vec<f64>> = match basis.len() {
        1 => vec![basis[0].clone(), scale(&basis[0], -1.0)],
        2 => (0..m)
            .map(|k| {
                let phi = std::f64::consts::TAU * k as f64 / m as f64;
                axpy(&scale(&basis[0], phi.cos()), phi.sin(), &basis[1])
            })
            .collect(),
        _ => crate::grid::fibonacci_sphere(m)
            .into_iter()
            .map(|v| {
                let mut u = vec![0.0; center.dim()];
                for (k, e) in basis.iter().take(3).enumerate() {
                    u = axpy(&u, v[k], e);
                }
                u
            })
            .collect(),
    };
    dirs.iter().map(|u| center.along(u, radius)).collect()
}

impl ToleranceConfig {
    /// Seed for the `k`-th independent sampling stream derived from `seed`.
    pub fn stream(&self, k: u64) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::FRAC_PI_3;

    fn sp(v: &[f64]) -> SpherePoint {
        normalize(v).unwrap()
    }

    fn orthant() -> SphericalPolytope {
        let pts: Vec<SpherePoint> = (0..3).map(|k| SpherePoint::basis(3, k)).collect();
        SphericalPolytope::s_conv(&pts, 1e-9).unwrap()
    }

    fn random_points(seed: u64, n: usize, d: usize) -> Vec<SpherePoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                sp(&g)
            })
            .collect()
    }

    #[test]
    fn orthant_hull_has_basis_facets() {
        let o = orthant();
        let pts: Vec<SpherePoint> = (0..3).map(|k| SpherePoint::basis(3, k)).collect();
        for e in &pts {
            assert!(o.hcenters().iter().any(|h| angle_between(h.coords(), e.coords()) < 1e-12));
        }
        // membership oracle: x is in the orthant iff every coordinate is ≥ 0
        let body = Body::Polytope(o);
        for q in random_points(5, 1000, 3) {
            let oracle = q.coords().iter().all(|&x| x >= 0.0);
            assert_eq!(body.contains(&q, 0.0).unwrap(), oracle);
        }
    }

    #[test]
    fn s_conv_errors() {
        assert!(matches!(
            SphericalPolytope::s_conv(&[SpherePoint::basis(3, 0)], 1e-9),
            Err(GeomError::EmptyInterior(_))
        ));
        let pts = vec![SpherePoint::basis(3, 0), sp(&[-1.0, 0.0, 0.0]), SpherePoint::basis(3, 2)];
        assert!(matches!(SphericalPolytope::s_conv(&pts, 1e-9), Err(GeomError::ImproperBody(_))));
    }

    #[test]
    fn from_hemispheres_examples() {
        let centers: Vec<SpherePoint> = (0..3).map(|k| SpherePoint::basis(3, k)).collect();
        let p = SphericalPolytope::from_hemispheres(&centers, 1e-9).unwrap();
        assert_eq!(p.vertices().len(), 3);
        let o = orthant();
        for (a, b) in p.vertices().iter().zip(o.vertices()) {
            assert!(angle_between(a.coords(), b.coords()) < 1e-12);
        }
        let pair = vec![SpherePoint::basis(3, 0), sp(&[-1.0, 0.0, 0.0])];
        assert!(matches!(
            SphericalPolytope::from_hemispheres(&pair, 1e-9),
            Err(GeomError::EmptyInterior(_))
        ));
        assert!(matches!(
            SphericalPolytope::from_hemispheres(&[SpherePoint::basis(3, 0)], 1e-9),
            Err(GeomError::ImproperBody(_))
        ));
    }

    #[test]
    fn vertex_and_hemisphere_forms_agree() {
        let centers: Vec<SpherePoint> = random_points(9, 12, 3)
            .into_iter()
            .map(|p| sp(&axpy(p.coords(), 2.5, &[0.0, 0.0, 1.0])))
            .collect();
        let h = SphericalPolytope::from_hemispheres(&centers, 1e-9).unwrap();
        let v = SphericalPolytope::s_conv(h.vertices(), 1e-9).unwrap();
        let (bh, bv) = (Body::Polytope(h), Body::Polytope(v));
        for q in random_points(10, 1000, 3) {
            let direct = centers.iter().all(|c| c.dot(&q) >= 0.0);
            if bh.slack(&q).abs() > 1e-9 {
                assert_eq!(bh.contains(&q, 0.0).unwrap(), direct);
                assert_eq!(bv.contains(&q, 0.0).unwrap(), direct);
            }
        }
    }

    #[test]
    fn interior_points() {
        let o = Body::Polytope(orthant());
        let c = o.interior_point().unwrap();
        assert_abs_diff_eq!(angle_between(c.coords(), sp(&[1.0, 1.0, 1.0]).coords()), 0.0, epsilon = 1e-12);
        assert!(CapIntersectionBody::new(vec![
            Cap::new(SpherePoint::basis(3, 0), 0.3).unwrap(),
            Cap::new(SpherePoint::basis(3, 1), 0.3).unwrap(),
        ])
        .is_err());
        // off-center caps whose mean is outside the intersection
        let body = Body::Caps(
            CapIntersectionBody::new(vec![
                Cap::new(SpherePoint::north(3), 1.2).unwrap(),
                Cap::new(sp(&[1.0, 0.0, 0.05]), 0.5).unwrap(),
            ])
            .unwrap(),
        );
        assert!(body.slack(&body.interior_point().unwrap()) > 0.0);
    }

    /// Bisection on the membership predicate, independent of the closed form.
    fn bisect_exit(b: &Body, c: &SpherePoint, u: &[f64]) -> f64 {
        let (mut lo, mut hi) = (0.0, PI);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if b.slack(&c.along(u, mid)) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn boundary_point_matches_bisection() {
        let o = Body::Polytope(orthant());
        let c = o.interior_point().unwrap();
        let u = c.tangent_toward(&[1.0, 0.0, 0.0]).unwrap();
        let p = o.boundary_point(&c, &u).unwrap();
        assert_abs_diff_eq!(o.exit_angle(&c, &u).unwrap(), bisect_exit(&o, &c, &u), epsilon = 1e-9);
        assert_abs_diff_eq!(p.coords()[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.coords()[2], 0.0, epsilon = 1e-12);

        let n = SpherePoint::north(3);
        let cap = Body::Caps(CapIntersectionBody::new(vec![Cap::new(n.clone(), 0.7).unwrap()]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let u = n.random_tangent(&mut rng);
            let p = cap.boundary_point(&n, &u).unwrap();
            assert_abs_diff_eq!(angle_between(p.coords(), n.coords()), 0.7, epsilon = 1e-12);
        }
        let up = p.tangent_toward(c.coords()).unwrap();
        assert!(matches!(o.boundary_point(&p, &up), Err(GeomError::NotInterior(_))));
    }

    #[test]
    fn boundary_samples_are_on_the_boundary_and_reproducible() {
        let o = Body::Polytope(orthant());
        assert!(o.boundary_sample(0, 1).unwrap().is_empty());
        let a = o.boundary_sample(64, 7).unwrap();
        assert_eq!(a, o.boundary_sample(64, 7).unwrap());
        assert!(a.iter().all(|p| o.slack(p).abs() <= 1e-3));
    }

    #[test]
    fn supporting_center_examples() {
        let o = Body::Polytope(orthant());
        let s = o.supporting_centers(&sp(&[1.0, 1.0, 0.0]), 1e-3).unwrap();
        assert_eq!(s.len(), 1);
        assert_abs_diff_eq!(s[0].coords()[2], 1.0, epsilon = 1e-12);
        let s = o.supporting_centers(&SpherePoint::basis(3, 0), 1e-3).unwrap();
        assert_eq!(s.len(), 2);
        assert!(o.supporting_centers(&sp(&[1.0, 1.0, 1.0]), 1e-3).is_err());

        let n = SpherePoint::north(3);
        let r = FRAC_PI_3 / 2.0;
        let cap = Body::Caps(CapIntersectionBody::new(vec![Cap::new(n.clone(), r).unwrap()]).unwrap());
        let p = n.along(&[1.0, 0.0, 0.0], r);
        let s = cap.supporting_centers(&p, 1e-3).unwrap();
        assert_eq!(s.len(), 1);
        assert_abs_diff_eq!(angle_between(s[0].coords(), p.coords()), FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(angle_between(s[0].coords(), n.coords()), FRAC_PI_2 - r, epsilon = 1e-12);
    }

    #[test]
    fn circle_intersections_lie_on_both_circles() {
        let a = Cap::new(SpherePoint::north(3), 0.8).unwrap();
        let b = Cap::new(sp(&[0.5, 0.0, 1.0]), 0.6).unwrap();
        let xs = circle_intersections(&a, &b);
        assert_eq!(xs.len(), 2);
        for x in xs {
            assert_abs_diff_eq!(a.slack(&x), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(b.slack(&x), 0.0, epsilon = 1e-12);
        }
    }
}
