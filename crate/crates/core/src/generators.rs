//! Body and gamma families with known answers.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bodies::{Body, CapIntersectionBody, SphericalPolytope};
use crate::error::{GeomError, Result};
use crate::grid::direction_grid;
use crate::metrics::verify_theorem_1;
use crate::polar::polar_body;
use crate::sphere::{normalize, Cap, SpherePoint, ToleranceConfig};
use crate::wulff::{GammaField, Provenance};

const MAX_RETRIES: usize = 16;

pub fn gen_cap(center: SpherePoint, r: f64) -> Result<Body> {
    if !(r > 0.0 && r < FRAC_PI_2) {
        return Err(GeomError::InvalidParameter(format!("cap radius {r} not in (0, π/2)")));
    }
    Ok(CapIntersectionBody::new(vec![Cap::new(center, r)?])?.into())
}

/// Spherical simplex spanned by the standard basis.
pub fn gen_orthant(d: usize) -> Result<Body> {
    if d < 3 {
        return Err(GeomError::InvalidParameter(format!("orthant needs d >= 3, got {d}")));
    }
    let basis: Vec<SpherePoint> = (0..d).map(|k| SpherePoint::basis(d, k)).collect();
    Ok(SphericalPolytope::s_conv(&basis, 1e-9)?.into())
}

/// Circumradius of the equilateral spherical triangle with side `tau`.
fn circumradius(tau: f64) -> f64 {
    // cos(side) = cos²R + sin²R·cos(2π/3)
    let side = |r: f64| (r.cos().powi(2) - 0.5 * r.sin().powi(2)).clamp(-1.0, 1.0).acos();
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if side(mid) < tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Vertices of the equilateral triangle with side `tau` centered at the
/// north pole, first vertex in the `(y, z)` plane.
pub fn reuleaux_vertices(tau: f64) -> Vec<SpherePoint> {
    let r = circumradius(tau);
    (0..3)
        .map(|k| {
            let phi = FRAC_PI_2 + 2.0 * PI * k as f64 / 3.0;
            normalize(&[r.sin() * phi.cos(), r.sin() * phi.sin(), r.cos()]).expect("unit by construction")
        })
        .collect()
}

/// Spherical Reuleaux triangle of width `tau` on `S²`. Above `π/2` it is
/// the polar of the triangle of width `π − tau`.
pub fn gen_reuleaux(tau: f64) -> Result<Body> {
    gen_reuleaux_with(tau, &ToleranceConfig::default())
}

pub fn gen_reuleaux_with(tau: f64, cfg: &ToleranceConfig) -> Result<Body> {
    if !(tau > 0.0 && tau < PI) {
        return Err(GeomError::InvalidParameter(format!("width {tau} not in (0, π)")));
    }
    if tau > FRAC_PI_2 {
        return polar_body(&gen_reuleaux_with(PI - tau, cfg)?, cfg);
    }
    let caps = reuleaux_vertices(tau)
        .into_iter()
        .map(|v| if tau == FRAC_PI_2 { Ok(Cap::hemisphere(v)) } else { Cap::new(v, tau) })
        .collect::<Result<Vec<_>>>()?;
    Ok(CapIntersectionBody::new(caps)?.into())
}

/// `gen_reuleaux_with` followed by a constant width and diameter check at
/// `tol`; a construction that misses `tau` is reported as improper.
pub fn gen_reuleaux_checked(tau: f64, tol: f64, cfg: &ToleranceConfig) -> Result<Body> {
    let b = gen_reuleaux_with(tau, cfg)?;
    let rep = verify_theorem_1(&b, tol, cfg)?;
    let w = &rep.constant_width;
    if !(rep.pass && w.is_constant && rep.constant_diameter.is_constant && (w.tau - tau).abs() <= tol) {
        return Err(GeomError::ImproperBody(format!(
            "Reuleaux construction for width {tau} measured width {} (deviation {:e})",
            w.tau, w.max_deviation
        )));
    }
    Ok(b)
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> SpherePoint {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(p) = normalize(&g) {
            return p;
        }
    }
}

/// Uniform point of `cap(center, spread)`: the polar angle has density
/// proportional to `sin^{d−2}`, drawn by rejection.
fn random_in_cap(center: &SpherePoint, spread: f64, rng: &mut ChaCha8Rng) -> SpherePoint {
    let d = center.dim() as i32;
    let top = spread.sin().powi(d - 2);
    let t = loop {
        let t = rng.gen_range(0.0..spread);
        if rng.gen::<f64>() * top <= t.sin().powi(d - 2) {
            break t;
        }
    };
    let u = center.random_tangent(rng);
    center.along(&u, t)
}

pub fn gen_random_polytope(d: usize, m: usize, spread: f64, seed: u64) -> Result<Body> {
    if d < 2 {
        return Err(GeomError::UnsupportedDimension(d));
    }
    if m < d {
        return Err(GeomError::InvalidParameter(format!("need m >= d, got m={m}, d={d}")));
    }
    if !(spread > 0.0 && spread < FRAC_PI_2) {
        return Err(GeomError::InvalidParameter(format!("spread {spread} not in (0, π/2)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = random_unit(d, &mut rng);
    let mut last = None;
    for _ in 0..MAX_RETRIES {
        let pts: Vec<SpherePoint> = (0..m).map(|_| random_in_cap(&center, spread, &mut rng)).collect();
        match SphericalPolytope::s_conv(&pts, 1e-9) {
            Ok(p) => return Ok(p.into()),
            Err(e @ (GeomError::EmptyInterior(_) | GeomError::ImproperBody(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaKind {
    /// `γ ≡ value` on a grid of `grid` directions.
    Constant { dim: usize, value: f64, grid: usize },
    /// `γ ≡ 1` on the `2·dim` coordinate directions.
    Cube { dim: usize },
    /// `value·(1 + amplitude·u)` with `u` uniform in `[−1, 1]` per direction.
    Perturbed { dim: usize, value: f64, amplitude: f64, grid: usize },
}

pub fn gen_gamma(kind: &GammaKind, seed: u64) -> Result<GammaField> {
    let check_value = |v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(GeomError::InvalidParameter(format!("gamma value {v} is not positive")))
        }
    };
    match *kind {
        GammaKind::Constant { dim, value, grid } => {
            check_value(value)?;
            let dirs = direction_grid(dim, grid)?;
            let n = dirs.len();
            GammaField::new(dirs, vec![value; n], Provenance::Constant)
        }
        GammaKind::Cube { dim } => {
            if dim < 2 {
                return Err(GeomError::UnsupportedDimension(dim));
            }
            let dirs: Vec<SpherePoint> = (0..dim)
                .flat_map(|k| [SpherePoint::basis(dim, k), SpherePoint::basis(dim, k).antipode()])
                .collect();
            GammaField::new(dirs, vec![1.0; 2 * dim], Provenance::Constant)
        }
        GammaKind::Perturbed { dim, value, amplitude, grid } => {
            check_value(value)?;
            if !(0.0..1.0).contains(&amplitude) {
                return Err(GeomError::InvalidParameter(format!("amplitude {amplitude} not in [0, 1)")));
            }
            let dirs = direction_grid(dim, grid)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let values = dirs.iter().map(|_| value * (1.0 + amplitude * rng.gen_range(-1.0..=1.0))).collect();
            GammaField::new(dirs, values, Provenance::Perturbed)
        }
    }
}
