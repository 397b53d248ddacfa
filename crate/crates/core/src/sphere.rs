//! Primitive geometry on the unit sphere `S^{d-1} ⊂ R^d`.
//!
//! Points are unit vectors taken from the origin. Distances are the arc
//! length `arccos(P·Q)`. Caps of radius at most `π/2` are the convex
//! building block; the radius-`π/2` cap is a closed hemisphere.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Maximum deviation of `‖coords‖₂` from one after normalization.
pub const EPS_UNIT: f64 = 1e-12;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `a + s·b`
pub(crate) fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub(crate) fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// A point of the unit sphere, stored as its ambient unit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl TryFrom<Vec<f64>> for SpherePoint {
    type Error = GeomError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        normalize(&v)
    }
}

impl From<SpherePoint> for Vec<f64> {
    fn from(p: SpherePoint) -> Self {
        p.coords
    }
}

impl SpherePoint {
    /// Standard basis vector `e_axis` in `R^dim`.
    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut coords = vec![0.0; dim];
        coords[axis] = 1.0;
        Self { coords }
    }

    /// The "north pole" `(0, …, 0, 1)`.
    pub fn north(dim: usize) -> Self {
        Self::basis(dim, dim - 1)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        dot(&self.coords, &other.coords)
    }

    pub fn antipode(&self) -> SpherePoint {
        antipode(self)
    }

    /// Point reached after travelling `t` radians from `self` along the
    /// unit tangent `u` (which must be orthogonal to `self`).
    pub fn along(&self, u: &[f64], t: f64) -> SpherePoint {
        let (s, c) = t.sin_cos();
        let v: Vec<f64> = self.coords.iter().zip(u).map(|(p, q)| c * p + s * q).collect();
        normalize(&v).expect("geodesic through a unit point never vanishes")
    }

    /// Unit tangent at `self` pointing toward `target`, or `None` when
    /// `target` is `±self`.
    pub fn tangent_toward(&self, target: &[f64]) -> Option<Vec<f64>> {
        let t = axpy(target, -dot(target, &self.coords), &self.coords);
        let n = norm(&t);
        (n > 1e-14).then(|| scale(&t, 1.0 / n))
    }

    /// Orthonormal basis of the tangent space at `self` (d−1 vectors).
    pub fn tangent_basis(&self) -> Vec<Vec<f64>> {
        orthonormal_complement(&self.coords)
    }

    /// Uniformly distributed unit tangent vector at `self`.
    pub fn random_tangent<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        loop {
            let g: Vec<f64> = (0..self.dim()).map(|_| rng.sample(StandardNormal)).collect();
            if let Some(t) = self.tangent_toward(&g) {
                return t;
            }
        }
    }

    fn check_dim(&self, other: &SpherePoint) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(GeomError::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }
}

/// Orthonormal basis of the orthogonal complement of the unit vector `w`.
pub(crate) fn orthonormal_complement(w: &[f64]) -> Vec<Vec<f64>> {
    let d = w.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    let mut axes: Vec<usize> = (0..d).collect();
    // least aligned axes first keeps Gram-Schmidt well conditioned
    axes.sort_by(|&i, &j| w[i].abs().total_cmp(&w[j].abs()));
    for &axis in &axes {
        if basis.len() == d - 1 {
            break;
        }
        let mut v = vec![0.0; d];
        v[axis] = 1.0;
        v = axpy(&v, -w[axis], w);
        for b in &basis {
            let c = dot(&v, b);
            v = axpy(&v, -c, b);
        }
        let n = norm(&v);
        if n > 1e-8 {
            basis.push(scale(&v, 1.0 / n));
        }
    }
    basis
}

/// Scales a nonzero vector onto the unit sphere.
pub fn normalize(v: &[f64]) -> Result<SpherePoint> {
    if v.len() < 2 {
        return Err(GeomError::UnsupportedDimension(v.len()));
    }
    let n = norm(v);
    if !(n > 0.0) || !n.is_finite() {
        return Err(GeomError::DegenerateDirection);
    }
    if (n - 1.0).abs() <= 4.0 * f64::EPSILON {
        // already unit up to rounding: keep the bits so parsing is lossless
        return Ok(SpherePoint { coords: v.to_vec() });
    }
    let mut coords = scale(v, 1.0 / n);
    // one more pass pulls the norm to within a couple of ulps of one
    let n2 = norm(&coords);
    coords.iter_mut().for_each(|x| *x /= n2);
    Ok(SpherePoint { coords })
}

/// Arc length between two points, `arccos(P·Q)` with the dot product clamped.
pub fn distance(p: &SpherePoint, q: &SpherePoint) -> Result<f64> {
    p.check_dim(q)?;
    Ok(angle_between(p.coords(), q.coords()))
}

/// Angle between two unit vectors. Uses `atan2` so that nearly equal and
/// nearly antipodal vectors keep full precision.
pub(crate) fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let c = dot(a, b).clamp(-1.0, 1.0);
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - c * y).collect();
    let s = norm(&diff);
    s.atan2(c).clamp(0.0, PI)
}

pub fn antipode(p: &SpherePoint) -> SpherePoint {
    SpherePoint { coords: p.coords.iter().map(|x| -x).collect() }
}

/// Spherical linear interpolation from `p` (t = 0) to `q` (t = 1).
pub fn geodesic(p: &SpherePoint, q: &SpherePoint, t: f64, tol_angle: f64) -> Result<SpherePoint> {
    let total = distance(p, q)?;
    if total <= tol_angle || total >= PI - tol_angle {
        return Err(GeomError::DegenerateGeodesic);
    }
    let u = p.tangent_toward(q.coords()).ok_or(GeomError::DegenerateGeodesic)?;
    Ok(p.along(&u, t * total))
}

/// Spherical cap `{Q : distance(center, Q) ≤ radius}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: SpherePoint,
    pub radius: f64,
}

impl Cap {
    /// Caps wider than a hemisphere are not convex and are rejected.
    pub fn new(center: SpherePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= FRAC_PI_2 + 1e-15) {
            return Err(GeomError::InvalidParameter(format!(
                "cap radius {radius} outside (0, π/2]"
            )));
        }
        Ok(Self { center, radius: radius.min(FRAC_PI_2) })
    }

    /// Closed hemisphere `S_P^+` centered at `p`.
    pub fn hemisphere(p: SpherePoint) -> Self {
        Self { center: p, radius: FRAC_PI_2 }
    }

    pub fn is_hemisphere(&self) -> bool {
        self.radius == FRAC_PI_2
    }

    /// The radius-0 cap, produced only as the polar of a hemisphere.
    pub fn is_point(&self) -> bool {
        self.radius == 0.0
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Signed angular margin of `q`: positive inside, negative outside.
    pub fn slack(&self, q: &SpherePoint) -> f64 {
        self.radius - angle_between(self.center.coords(), q.coords())
    }
}

/// Membership in a cap: `center·Q ≥ cos(radius) − tol_angle`.
pub fn cap_contains(c: &Cap, q: &SpherePoint, tol_angle: f64) -> Result<bool> {
    c.center.check_dim(q)?;
    Ok(c.center.dot(q) >= c.radius.cos() - tol_angle)
}

/// Closed-form polar of a cap: `cap(center, π/2 − radius)`.
pub fn cap_polar(c: &Cap) -> Cap {
    let radius = if c.is_hemisphere() {
        0.0
    } else if c.is_point() {
        FRAC_PI_2
    } else {
        FRAC_PI_2 - c.radius
    };
    Cap { center: c.center.clone(), radius }
}

/// Intersection of two distinct, non-opposite hemispheres.
#[derive(Debug, Clone, PartialEq)]
pub struct Lune {
    a: SpherePoint,
    b: SpherePoint,
}

impl Lune {
    pub fn new(a: SpherePoint, b: SpherePoint, tol_angle: f64) -> Result<Self> {
        let d = distance(&a, &b)?;
        if d <= tol_angle || d >= PI - tol_angle {
            return Err(GeomError::DegenerateLune);
        }
        Ok(Self { a, b })
    }

    pub fn centers(&self) -> (&SpherePoint, &SpherePoint) {
        (&self.a, &self.b)
    }
}

/// Thickness of the lune `S_a^+ ∩ S_b^+`, i.e. `π − |ab|`.
pub fn lune_thickness(l: &Lune) -> f64 {
    PI - angle_between(l.a.coords(), l.b.coords())
}

/// Numerical knobs shared by every sampled computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Tolerance for closed-form paths.
    pub tol_angle: f64,
    /// Tolerance for sampled paths.
    pub tol_sample: f64,
    pub boundary_samples: usize,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { tol_angle: 1e-9, tol_sample: 1e-3, boundary_samples: 2048, seed: 0 }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_angle > 0.0 && self.tol_sample > 0.0) {
            return Err(GeomError::InvalidParameter("tolerances must be positive".into()));
        }
        if self.boundary_samples < 16 {
            return Err(GeomError::InvalidParameter("boundary_samples must be at least 16".into()));
        }
        Ok(())
    }

    /// Default constancy tolerance, `5·tol_sample`.
    pub fn constancy_tol(&self) -> f64 {
        5.0 * self.tol_sample
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn p(v: &[f64]) -> SpherePoint {
        normalize(v).unwrap()
    }

    fn random_point(rng: &mut ChaCha8Rng, d: usize) -> SpherePoint {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        normalize(&g).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(p(&[2.0, 0.0, 0.0]).coords(), &[1.0, 0.0, 0.0]);
        let h = std::f64::consts::SQRT_2 / 2.0;
        let q = p(&[1.0, 1.0, 0.0]);
        assert_abs_diff_eq!(q.coords()[0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(q.coords()[1], h, epsilon = 1e-15);
        assert_eq!(normalize(&[0.0, 0.0, 0.0]), Err(GeomError::DegenerateDirection));
        assert!((norm(p(&[3.0, -7.0, 1e-3, 12.0]).coords()) - 1.0).abs() <= EPS_UNIT);
    }

    #[test]
    fn distance_examples() {
        let e1 = SpherePoint::basis(3, 0);
        let e2 = SpherePoint::basis(3, 1);
        assert_abs_diff_eq!(distance(&e1, &e2).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert_abs_diff_eq!(distance(&e1, &e1.antipode()).unwrap(), PI, epsilon = 1e-15);
        assert_eq!(distance(&e1, &e1).unwrap(), 0.0);
        assert!(distance(&e1, &SpherePoint::basis(4, 0)).is_err());
    }

    #[test]
    fn antipode_is_involution() {
        let e1 = SpherePoint::basis(3, 0);
        assert_eq!(antipode(&e1).coords(), &[-1.0, -0.0, -0.0]);
        let m3 = antipode(&SpherePoint::basis(3, 2));
        assert_eq!(antipode(&m3).coords()[2], 1.0);
        let q = p(&[0.3, -0.2, 0.9]);
        assert_eq!(antipode(&antipode(&q)), q);
    }

    #[test]
    fn geodesic_examples() {
        let e1 = SpherePoint::basis(3, 0);
        let e2 = SpherePoint::basis(3, 1);
        let g0 = geodesic(&e1, &e2, 0.0, 1e-9).unwrap();
        assert_abs_diff_eq!(distance(&g0, &e1).unwrap(), 0.0, epsilon = 1e-12);
        let mid = geodesic(&e1, &e2, 0.5, 1e-9).unwrap();
        assert_abs_diff_eq!(distance(&mid, &p(&[1.0, 1.0, 0.0])).unwrap(), 0.0, epsilon = 1e-12);
        assert!(geodesic(&e1, &e1, 0.5, 1e-9).is_err());
        assert!(geodesic(&e1, &e1.antipode(), 0.5, 1e-9).is_err());

        // oracle: the interpolated point's dot products with P and Q fix its
        // position on the great circle; arccos against P gives t·|PQ|
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_point(&mut rng, 3);
            let b = random_point(&mut rng, 3);
            let g = geodesic(&a, &b, 0.3, 1e-9).unwrap();
            let total = dot(a.coords(), b.coords()).clamp(-1.0, 1.0).acos();
            let got = dot(a.coords(), g.coords()).clamp(-1.0, 1.0).acos();
            assert_abs_diff_eq!(got, 0.3 * total, epsilon = 1e-7);
        }
    }

    #[test]
    fn cap_contains_examples() {
        let n = SpherePoint::north(3);
        let c = Cap::new(n.clone(), FRAC_PI_4).unwrap();
        assert!(cap_contains(&c, &n, 1e-9).unwrap());
        assert!(!cap_contains(&c, &SpherePoint::basis(3, 0), 1e-9).unwrap());
        let h = Cap::hemisphere(SpherePoint::basis(3, 0));
        assert!(cap_contains(&h, &SpherePoint::basis(3, 1), 1e-9).unwrap());
        assert!(Cap::new(n.clone(), 2.0).is_err());
        assert!(Cap::new(n, 0.0).is_err());
    }

    #[test]
    fn lune_examples() {
        let e1 = SpherePoint::basis(3, 0);
        let e2 = SpherePoint::basis(3, 1);
        let l = Lune::new(e1.clone(), e2, 1e-9).unwrap();
        assert_abs_diff_eq!(lune_thickness(&l), FRAC_PI_2, epsilon = 1e-15);

        let far = e1.along(&[0.0, 1.0, 0.0], 2.0 * FRAC_PI_3);
        let l = Lune::new(e1.clone(), far, 1e-9).unwrap();
        assert_abs_diff_eq!(lune_thickness(&l), FRAC_PI_3, epsilon = 1e-12);

        let almost = p(&[-1.0, 1e-12, 0.0]);
        assert_eq!(Lune::new(e1.clone(), almost, 1e-9), Err(GeomError::DegenerateLune));
        assert_eq!(Lune::new(e1.clone(), e1, 1e-9), Err(GeomError::DegenerateLune));
    }

    /// Definition oracle for the polar of a cap: a candidate point X lies in
    /// the polar iff X·Q ≥ 0 for every sampled Q of the cap.
    fn polar_oracle_radius(c: &Cap, rng: &mut ChaCha8Rng) -> f64 {
        let samples: Vec<SpherePoint> = (0..1000)
            .map(|_| {
                let u = c.center.random_tangent(rng);
                let t: f64 = rng.gen_range(0.0..=1.0);
                c.center.along(&u, c.radius * t.sqrt())
            })
            .chain((0..64).map(|k| {
                let phi = k as f64 / 64.0 * std::f64::consts::TAU;
                let u = [phi.cos(), phi.sin(), 0.0];
                c.center.along(&u, c.radius)
            }))
            .collect();
        // largest distance from the center along e1 that stays in ∩ S_Q^+
        let u = [1.0, 0.0, 0.0];
        let inside = |t: f64| {
            let x = c.center.along(&u, t);
            samples.iter().all(|q| x.dot(q) >= -1e-12)
        };
        let (mut lo, mut hi) = (0.0, FRAC_PI_2);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn cap_polar_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for r in [FRAC_PI_4, FRAC_PI_3] {
            let c = Cap::new(SpherePoint::north(3), r).unwrap();
            let polar = cap_polar(&c);
            let oracle = polar_oracle_radius(&c, &mut rng);
            assert_abs_diff_eq!(polar.radius, oracle, epsilon = 1e-3);
        }
        assert_abs_diff_eq!(
            cap_polar(&Cap::new(SpherePoint::north(3), FRAC_PI_3).unwrap()).radius,
            FRAC_PI_6,
            epsilon = 1e-15
        );
        // exact on [π/4, π/2] (Sterbenz), within an ulp below π/4
        let c = Cap::new(SpherePoint::north(3), 1.1).unwrap();
        assert_eq!(cap_polar(&cap_polar(&c)), c);
        let c = Cap::new(SpherePoint::north(3), 0.4).unwrap();
        assert_abs_diff_eq!(cap_polar(&cap_polar(&c)).radius, 0.4, epsilon = 1e-15);
        let h = Cap::hemisphere(SpherePoint::north(3));
        assert!(cap_polar(&h).is_point());
        assert_eq!(cap_polar(&cap_polar(&h)), h);
    }

    #[test]
    fn tolerance_config_validation() {
        assert!(ToleranceConfig::default().validate().is_ok());
        let bad = ToleranceConfig { boundary_samples: 8, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ToleranceConfig { tol_sample: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let q = p(&[0.2, -0.5, 0.7, 0.1]);
        let basis = q.tangent_basis();
        assert_eq!(basis.len(), 3);
        for (i, a) in basis.iter().enumerate() {
            assert_abs_diff_eq!(dot(a, q.coords()), 0.0, epsilon = 1e-14);
            for (j, b) in basis.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(dot(a, b), want, epsilon = 1e-14);
            }
        }
    }
}
