//! Wulff shapes of sampled support functions, their duals, and the lift to
//! the sphere by central projection.
//!
//! A `GammaField` samples `γ` on finitely many directions, so `W_γ` is the
//! polytope `∩ {x : x·θ_i ≤ γ_i}`. The lift `α_N⁻¹ ∘ Id` sends `x ∈ R^n`
//! to `normalize((x, 1))` on `S^n`; a halfspace `x·θ ≤ γ` becomes the
//! hemisphere centered at `normalize((−θ, γ))`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::bodies::{Body, SphericalPolytope};
use crate::error::{GeomError, Result};
use crate::grid::direction_grid;
use crate::hull::{hull_planes, Plane};
use crate::metrics::{
    diameter, is_constant_diameter, is_constant_width, thickness, ConstancyReport,
};
use crate::polar::{polar_body, polar_polytope};
use crate::sphere::{angle_between, dot, normalize, scale, SpherePoint, ToleranceConfig};

/// Last-coordinate threshold below which a sphere point is treated as on
/// the equator of the lift.
pub const EQUATOR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Constant,
    File,
    Perturbed,
    Derived,
}

/// Positive samples of a support function on unit directions.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaField {
    directions: Vec<SpherePoint>,
    values: Vec<f64>,
    provenance: Provenance,
}

impl GammaField {
    pub fn new(directions: Vec<SpherePoint>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if directions.len() != values.len() {
            return Err(GeomError::InvalidParameter(format!(
                "{} directions but {} values",
                directions.len(),
                values.len()
            )));
        }
        let Some(first) = directions.first() else {
            return Err(GeomError::InvalidParameter("empty gamma field".into()));
        };
        let d = first.dim();
        if let Some(p) = directions.iter().find(|p| p.dim() != d) {
            return Err(GeomError::DimensionMismatch { expected: d, got: p.dim() });
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(GeomError::InvalidParameter(format!("gamma value {v} is not positive")));
        }
        for (i, a) in directions.iter().enumerate() {
            if directions[i + 1..].iter().any(|b| angle_between(a.coords(), b.coords()) < 1e-12) {
                return Err(GeomError::InvalidParameter("repeated direction".into()));
            }
        }
        if !positively_spanning(&directions)? {
            return Err(GeomError::UnboundedWulff);
        }
        Ok(Self { directions, values, provenance })
    }

    pub fn directions(&self) -> &[SpherePoint] {
        &self.directions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn dim(&self) -> usize {
        self.directions[0].dim()
    }
}

/// True when no closed half-space through the origin holds every
/// direction, i.e. the origin is strictly inside their convex hull.
fn positively_spanning(dirs: &[SpherePoint]) -> Result<bool> {
    let pts: Vec<Vec<f64>> = dirs.iter().map(|p| p.coords().to_vec()).collect();
    match hull_planes(&pts) {
        Ok(planes) => Ok(planes.iter().all(|pl| pl.offset > 1e-12)),
        Err(GeomError::EmptyInterior(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// The polytope `∩ {x : x·θ_i ≤ γ_i}`, with vertices recovered through the
/// spherical lift.
#[derive(Debug, Clone)]
pub struct WulffPolytope {
    normals: Vec<SpherePoint>,
    offsets: Vec<f64>,
    redundant: Vec<bool>,
    vertices: Vec<Vec<f64>>,
    lift: SphericalPolytope,
}

impl WulffPolytope {
    pub fn normals(&self) -> &[SpherePoint] {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Per-halfspace flag: true when the halfspace does not touch `W`.
    pub fn redundant(&self) -> &[bool] {
        &self.redundant
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.normals[0].dim()
    }

    /// Directions `−v/‖v‖` over the vertices `v`. These are the facet
    /// normals of the dual shape.
    pub fn dual_facet_directions(&self) -> Vec<SpherePoint> {
        self.vertices.iter().filter_map(|v| normalize(&scale(v, -1.0)).ok()).collect()
    }

    /// Reflection through the origin.
    pub fn reflect(&self) -> Result<WulffPolytope> {
        let g = GammaField::new(
            self.normals.iter().map(SpherePoint::antipode).collect(),
            self.offsets.clone(),
            Provenance::Derived,
        )?;
        build_wulff(&g)
    }
}

pub fn build_wulff(g: &GammaField) -> Result<WulffPolytope> {
    let centers: Vec<SpherePoint> =
        g.directions.iter().zip(&g.values).map(|(t, &v)| lift_halfspace(t, v)).collect::<Result<_>>()?;
    let lift = SphericalPolytope::from_hemispheres(&centers, 1e-9).map_err(|e| match e {
        GeomError::ImproperBody(_) => GeomError::UnboundedWulff,
        other => other,
    })?;
    let redundant = centers
        .iter()
        .map(|c| !lift.hcenters().iter().any(|h| angle_between(h.coords(), c.coords()) < 1e-12))
        .collect();
    let vertices = lift.vertices().iter().map(central_unproject).collect::<Result<_>>()?;
    Ok(WulffPolytope {
        normals: g.directions.clone(),
        offsets: g.values.clone(),
        redundant,
        vertices,
        lift,
    })
}

/// Hemisphere center of the lift of `{x : x·θ ≤ γ}`:
/// `x·θ ≤ γ ⟺ (−θ, γ)·(x, 1) ≥ 0`.
fn lift_halfspace(theta: &SpherePoint, gamma: f64) -> Result<SpherePoint> {
    let mut v: Vec<f64> = theta.coords().iter().map(|x| -x).collect();
    v.push(gamma);
    normalize(&v)
}

/// Radial function `max{λ > 0 : λθ ∈ W}`.
pub fn radial(w: &WulffPolytope, theta: &SpherePoint) -> f64 {
    w.normals
        .iter()
        .zip(&w.offsets)
        .filter_map(|(n, &g)| {
            let c = n.dot(theta);
            (c > 0.0).then(|| g / c)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Radial function of a polytope given by facet planes around an interior
/// origin.
pub fn radial_of_planes(planes: &[Plane], theta: &SpherePoint) -> f64 {
    planes
        .iter()
        .filter_map(|pl| {
            let c = dot(&pl.normal, theta.coords());
            (c > 0.0).then(|| pl.offset / c)
        })
        .fold(f64::INFINITY, f64::min)
}

/// `γ̄(θ) = 1/ρ_W(−θ)` at the requested directions.
pub fn dual_gamma(w: &WulffPolytope, dirs: &[SpherePoint]) -> Result<GammaField> {
    let values = dirs.iter().map(|t| 1.0 / radial(w, &t.antipode())).collect();
    GammaField::new(dirs.to_vec(), values, Provenance::Derived)
}

pub fn dual_wulff(w: &WulffPolytope, dirs: &[SpherePoint]) -> Result<WulffPolytope> {
    build_wulff(&dual_gamma(w, dirs)?)
}

/// `dirs` together with the facet directions of the dual, without repeats.
/// Sampling `γ̄` there makes the dual Wulff shape exact.
pub fn dual_directions(w: &WulffPolytope, dirs: &[SpherePoint]) -> Vec<SpherePoint> {
    let mut out = dirs.to_vec();
    for d in w.dual_facet_directions() {
        if !out.iter().any(|o| angle_between(o.coords(), d.coords()) < 1e-12) {
            out.push(d);
        }
    }
    out
}

/// Euclidean polar `{x : x·y ≤ 1 ∀y ∈ W}` sampled along `dirs`: for each
/// boundary point `y = ρ(θ)θ` the halfspace `x·θ ≤ 1/ρ(θ)`.
pub fn euclidean_polar(w: &WulffPolytope, dirs: &[SpherePoint]) -> Result<WulffPolytope> {
    let values = dirs.iter().map(|t| 1.0 / radial(w, t)).collect();
    build_wulff(&GammaField::new(dirs.to_vec(), values, Provenance::Derived)?)
}

/// `normalize((x, 1))`, the point of the open north hemisphere above `x`.
pub fn central_project(x: &[f64]) -> SpherePoint {
    let mut v = x.to_vec();
    v.push(1.0);
    normalize(&v).expect("(x, 1) is never zero")
}

/// Inverse of [`central_project`]: `(P_1/P_last, …)`.
pub fn central_unproject(p: &SpherePoint) -> Result<Vec<f64>> {
    let c = p.coords();
    let last = c[c.len() - 1];
    if last <= EQUATOR_EPS {
        return Err(GeomError::EquatorSingularity(last));
    }
    Ok(c[..c.len() - 1].iter().map(|x| x / last).collect())
}

/// The spherical Wulff shape: the lift of `W` into the open north hemisphere.
#[derive(Debug, Clone)]
pub struct SphericalWulffShape {
    body: SphericalPolytope,
}

impl SphericalWulffShape {
    pub fn polytope(&self) -> &SphericalPolytope {
        &self.body
    }

    pub fn body(&self) -> Body {
        Body::Polytope(self.body.clone())
    }

    pub fn in_north_hemisphere(&self) -> bool {
        self.body.vertices().iter().all(|v| v.coords()[v.dim() - 1] > 0.0)
    }
}

pub fn spherical_wulff(w: &WulffPolytope) -> Result<SphericalWulffShape> {
    let shape = SphericalWulffShape { body: w.lift.clone() };
    if !shape.in_north_hemisphere() {
        return Err(GeomError::EquatorSingularity(0.0));
    }
    Ok(shape)
}

/// Directions where two radial functions are compared: the field's own
/// directions plus a fixed spiral grid.
fn probe_directions(g: &GammaField) -> Result<Vec<SpherePoint>> {
    let mut out = g.directions().to_vec();
    out.extend(direction_grid(g.dim(), PROBES)?);
    Ok(out)
}

const PROBES: usize = 256;

/// Largest relative gap `|a − b| / b` between two radial functions.
fn max_relative_gap(
    dirs: &[SpherePoint],
    a: impl Fn(&SpherePoint) -> f64,
    b: impl Fn(&SpherePoint) -> f64,
) -> f64 {
    dirs.iter()
        .map(|t| {
            let (x, y) = (a(t), b(t));
            (x - y).abs() / y
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialReport {
    pub check: String,
    pub directions: usize,
    pub max_relative_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares the dual Wulff shape obtained from `γ̄` with the one obtained by
/// lifting to the sphere, taking the spherical polar, projecting the polar
/// vertices back and taking their convex hull.
pub fn check_prop_3_3(g: &GammaField, tol: f64) -> Result<RadialReport> {
    let w = build_wulff(g)?;
    let grid = g.directions();
    let direct = dual_wulff(&w, &dual_directions(&w, grid))?;

    let lift = spherical_wulff(&w)?;
    let polar = polar_polytope(lift.polytope());
    let points: Vec<Vec<f64>> = polar.vertices().iter().map(central_unproject).collect::<Result<_>>()?;
    let planes = hull_planes(&points)?;

    let probes = probe_directions(g)?;
    let err = max_relative_gap(&probes, |t| radial(&direct, t), |t| radial_of_planes(&planes, t));
    Ok(RadialReport {
        check: "prop33".into(),
        directions: probes.len(),
        max_relative_error: err,
        tolerance: tol,
        pass: err <= tol,
    })
}

/// Compares the dual Wulff shape with the origin reflection of the sampled
/// Euclidean polar body.
pub fn check_dual_is_reflected_polar(g: &GammaField, tol: f64) -> Result<RadialReport> {
    let w = build_wulff(g)?;
    let dirs = dual_directions(&w, g.directions());
    let dual = dual_wulff(&w, &dirs)?;
    let mirrored: Vec<SpherePoint> = dirs.iter().map(SpherePoint::antipode).collect();
    let reflected = euclidean_polar(&w, &mirrored)?.reflect()?;
    let probes = probe_directions(g)?;
    let err = max_relative_gap(&probes, |t| radial(&dual, t), |t| radial(&reflected, t));
    Ok(RadialReport {
        check: "dual_reflected_polar".into(),
        directions: probes.len(),
        max_relative_error: err,
        tolerance: tol,
        pass: err <= tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfDualReport {
    pub radial_max_relative_error: f64,
    pub radial_self_dual: bool,
    pub width: ConstancyReport,
    pub width_verdict: bool,
    pub diameter: ConstancyReport,
    pub diameter_verdict: bool,
    pub consistent: bool,
    pub self_dual: bool,
}

/// Three independent self-duality verdicts: `W` and its dual agree
/// radially; the lift has constant width `π/2`; the lift has constant
/// diameter `π/2`.
pub fn check_self_dual(g: &GammaField, tol: f64, cfg: &ToleranceConfig) -> Result<SelfDualReport> {
    let w = build_wulff(g)?;
    let dual = dual_wulff(&w, &dual_directions(&w, g.directions()))?;
    let err = max_relative_gap(&probe_directions(g)?, |t| radial(&w, t), |t| radial(&dual, t));
    let radial_self_dual = err <= tol;

    let lift = spherical_wulff(&w)?.body();
    let width = is_constant_width(&lift, tol, cfg)?;
    let width_verdict = width.is_constant && (width.tau - FRAC_PI_2).abs() <= tol;
    let diameter = is_constant_diameter(&lift, tol, cfg)?;
    let diameter_verdict = diameter.is_constant && (diameter.tau - FRAC_PI_2).abs() <= tol;

    let consistent = radial_self_dual == width_verdict && width_verdict == diameter_verdict;
    Ok(SelfDualReport {
        radial_max_relative_error: err,
        radial_self_dual,
        width,
        width_verdict,
        diameter,
        diameter_verdict,
        consistent,
        self_dual: radial_self_dual && width_verdict && diameter_verdict,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Corollary32Report {
    pub hypothesis_met: bool,
    pub width_constancy: ConstancyReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measures: Option<LiftMeasures>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftMeasures {
    pub width: f64,
    pub diameter: f64,
    pub polar_width: f64,
    pub polar_diameter: f64,
    /// `Δ + diam°`, `Δ + Δ°`, `diam + Δ°`, `diam + diam°`.
    pub sums: [f64; 4],
    pub max_gap_from_pi: f64,
}

/// Width and diameter of the lift and of its polar, and their four
/// pairwise sums, each expected to equal `π` when the lift is of constant
/// width.
pub fn corollary_3_2_report(g: &GammaField, tol: f64, cfg: &ToleranceConfig) -> Result<Corollary32Report> {
    let lift = spherical_wulff(&build_wulff(g)?)?.body();
    let width_constancy = is_constant_width(&lift, cfg.constancy_tol(), cfg)?;
    if !width_constancy.is_constant {
        return Ok(Corollary32Report { hypothesis_met: false, width_constancy, measures: None, pass: false });
    }
    let polar = polar_body(&lift, cfg)?;
    let width = thickness(&lift, cfg)?.value;
    let diam = diameter(&lift, cfg)?.value;
    let polar_width = thickness(&polar, cfg)?.value;
    let polar_diameter = diameter(&polar, cfg)?.value;
    let sums = [width + polar_diameter, width + polar_width, diam + polar_width, diam + polar_diameter];
    let max_gap_from_pi = sums.iter().map(|s| (s - PI).abs()).fold(0.0, f64::max);
    Ok(Corollary32Report {
        hypothesis_met: true,
        width_constancy,
        measures: Some(LiftMeasures { width, diameter: diam, polar_width, polar_diameter, sums, max_gap_from_pi }),
        pass: max_gap_from_pi <= tol,
    })
}
