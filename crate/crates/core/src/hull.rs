//! Convex hulls of point sets in the plane and in 3-space, and the
//! polyhedral-cone hull built on top of them.
//!
//! A finite set of sphere points inside an open hemisphere with axis `w`
//! is mapped to the tangent hyperplane `w·x = 1` by central (gnomonic)
//! projection. Cone facets and extreme rays correspond one-to-one with
//! facets and vertices of the projected hull, so cones in `R^3` and `R^4`
//! reduce to planar and spatial hulls.

use std::collections::HashSet;

use crate::error::{GeomError, Result};
use crate::sphere::{angle_between, axpy, dot, norm, normalize, orthonormal_complement, scale, SpherePoint};

/// Halfspace `normal·y ≤ offset` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn coord_scale(points: &[Vec<f64>]) -> f64 {
    points.iter().map(|p| norm(p)).fold(0.0, f64::max).max(1e-300)
}

/// Andrew's monotone chain. Returns hull vertex indices in counter-clockwise
/// order with collinear points dropped.
pub fn planar_hull(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a][0].total_cmp(&points[b][0]).then(points[a][1].total_cmp(&points[b][1]))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let scale = points
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = 1e-13 * scale * scale;
    let turn = |o: usize, a: usize, b: usize| {
        let (o, a, b) = (points[o], points[a], points[b]);
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for &i in &idx {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], i) <= eps {
            hull.pop();
        }
        hull.push(i);
    }
    let lower = hull.len() + 1;
    for &i in idx.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], i) <= eps {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

#[derive(Debug, Clone)]
struct Face {
    v: [usize; 3],
    normal: [f64; 3],
    offset: f64,
}

/// Incremental convex hull in 3-space. Returns outward-oriented triangles
/// (indices into `points`) with their planes; coplanar facets come back
/// triangulated.
pub fn spatial_hull(points: &[[f64; 3]]) -> Result<Vec<([usize; 3], Plane)>> {
    let n = points.len();
    if n < 4 {
        return Err(GeomError::EmptyInterior(format!("{n} points cannot span 3-space")));
    }
    let scale = points.iter().map(|p| dot3(*p, *p).sqrt()).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-11 * scale;

    let i0 = (0..n).min_by(|&a, &b| points[a][0].total_cmp(&points[b][0])).unwrap();
    let dist2 = |a: usize, b: usize| {
        let d = sub3(points[a], points[b]);
        dot3(d, d)
    };
    let i1 = (0..n).max_by(|&a, &b| dist2(a, i0).total_cmp(&dist2(b, i0))).unwrap();
    let line = sub3(points[i1], points[i0]);
    let off_line = |a: usize| {
        let c = cross(line, sub3(points[a], points[i0]));
        dot3(c, c).sqrt()
    };
    let i2 = (0..n).max_by(|&a, &b| off_line(a).total_cmp(&off_line(b))).unwrap();
    let len = dot3(line, line).sqrt();
    if len <= eps || off_line(i2) / len <= eps {
        return Err(GeomError::EmptyInterior("points are collinear".into()));
    }
    let pn = cross(line, sub3(points[i2], points[i0]));
    let pn_len = dot3(pn, pn).sqrt();
    let off_plane = |a: usize| dot3(pn, sub3(points[a], points[i0])).abs() / pn_len;
    let i3 = (0..n).max_by(|&a, &b| off_plane(a).total_cmp(&off_plane(b))).unwrap();
    if off_plane(i3) <= 1e2 * eps {
        return Err(GeomError::EmptyInterior("points are coplanar".into()));
    }

    let simplex = [i0, i1, i2, i3];
    let mut inner = [0.0; 3];
    for &i in &simplex {
        for k in 0..3 {
            inner[k] += 0.25 * points[i][k];
        }
    }
    let make_face = |a: usize, b: usize, c: usize| -> Face {
        let mut nrm = cross(sub3(points[b], points[a]), sub3(points[c], points[a]));
        let l = dot3(nrm, nrm).sqrt().max(1e-300);
        nrm = [nrm[0] / l, nrm[1] / l, nrm[2] / l];
        let mut face = Face { v: [a, b, c], normal: nrm, offset: dot3(nrm, points[a]) };
        if dot3(face.normal, inner) > face.offset {
            face.v = [a, c, b];
            face.normal = [-nrm[0], -nrm[1], -nrm[2]];
            face.offset = -face.offset;
        }
        face
    };
    let mut faces = vec![
        make_face(i0, i1, i2),
        make_face(i0, i1, i3),
        make_face(i0, i2, i3),
        make_face(i1, i2, i3),
    ];

    for p in 0..n {
        if simplex.contains(&p) {
            continue;
        }
        let pt = points[p];
        let visible: Vec<bool> =
            faces.iter().map(|f| dot3(f.normal, pt) - f.offset > eps).collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            for k in 0..3 {
                edges.insert((f.v[k], f.v[(k + 1) % 3]));
            }
        }
        let mut next: Vec<Face> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| f.clone())
            .collect();
        let mut horizon: Vec<(usize, usize)> =
            edges.iter().filter(|(a, b)| !edges.contains(&(*b, *a))).copied().collect();
        horizon.sort_unstable();
        for (a, b) in horizon {
            next.push(make_face(a, b, p));
        }
        faces = next;
    }

    Ok(faces
        .into_iter()
        .map(|f| (f.v, Plane { normal: f.normal.to_vec(), offset: f.offset }))
        .collect())
}

/// Facet planes of the convex hull of points in `R^k` for `k ∈ {1, 2, 3}`,
/// with coplanar pieces merged. Fails when the hull is not full-dimensional.
pub fn hull_planes(points: &[Vec<f64>]) -> Result<Vec<Plane>> {
    let k = points.first().map(Vec::len).unwrap_or(0);
    let scale = coord_scale(points);
    let planes: Vec<Plane> = match k {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            if hi - lo <= 1e-11 * scale {
                return Err(GeomError::EmptyInterior("points coincide".into()));
            }
            vec![Plane { normal: vec![1.0], offset: hi }, Plane { normal: vec![-1.0], offset: -lo }]
        }
        2 => {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            let ring = planar_hull(&pts);
            if ring.len() < 3 {
                return Err(GeomError::EmptyInterior("points are collinear".into()));
            }
            let mut out = Vec::with_capacity(ring.len());
            for (j, &a) in ring.iter().enumerate() {
                let b = ring[(j + 1) % ring.len()];
                let (pa, pb) = (pts[a], pts[b]);
                let e = [pb[0] - pa[0], pb[1] - pa[1]];
                let l = (e[0] * e[0] + e[1] * e[1]).sqrt();
                let nrm = vec![e[1] / l, -e[0] / l];
                let offset = nrm[0] * pa[0] + nrm[1] * pa[1];
                out.push(Plane { normal: nrm, offset });
            }
            out
        }
        3 => {
            let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
            spatial_hull(&pts)?.into_iter().map(|(_, pl)| pl).collect()
        }
        _ => return Err(GeomError::UnsupportedDimension(k + 1)),
    };
    Ok(merge_planes(planes, scale))
}

fn merge_planes(planes: Vec<Plane>, scale: f64) -> Vec<Plane> {
    let mut out: Vec<Plane> = Vec::with_capacity(planes.len());
    for pl in planes {
        let dup = out.iter().any(|q| {
            let diff: f64 = q.normal.iter().zip(&pl.normal).map(|(a, b)| (a - b).abs()).sum();
            diff <= 1e-9 && (q.offset - pl.offset).abs() <= 1e-9 * scale
        });
        if !dup {
            out.push(pl);
        }
    }
    out
}

/// Maximum-margin axis: the unit `w` maximizing `min_i w·v_i`, found as the
/// minimum-norm point of the convex hull of the generators (Gilbert's
/// algorithm). Returns the axis and the margin it achieves.
pub fn max_margin_axis(gens: &[SpherePoint]) -> (Vec<f64>, f64) {
    let d = gens[0].dim();
    let mut x: Vec<f64> = vec![0.0; d];
    for g in gens {
        for (xi, gi) in x.iter_mut().zip(g.coords()) {
            *xi += gi / gens.len() as f64;
        }
    }
    let margin_of = |x: &[f64]| -> f64 {
        let n = norm(x);
        if n <= 0.0 {
            return f64::NEG_INFINITY;
        }
        gens.iter().map(|g| dot(x, g.coords()) / n).fold(f64::INFINITY, f64::min)
    };
    let mut best = (x.clone(), margin_of(&x));
    for _ in 0..20_000 {
        let xx = dot(&x, &x);
        let (s, sx) = gens
            .iter()
            .map(|g| (g, dot(&x, g.coords())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let m = margin_of(&x);
        if m > best.1 {
            best = (x.clone(), m);
        }
        // duality gap: ‖x‖ bounds the optimal margin from above
        if xx - sx <= 1e-9 * xx.max(1e-300) || xx <= 1e-24 {
            break;
        }
        let diff = axpy(s.coords(), -1.0, &x);
        let dd = dot(&diff, &diff);
        if dd <= 0.0 {
            break;
        }
        let t = ((xx - sx) / dd).clamp(0.0, 1.0);
        x = axpy(&x, t, &diff);
        if best.1 > 0.0 && best.1 >= 0.5 * norm(&x) {
            break;
        }
    }
    let (w, m) = best;
    let n = norm(&w);
    if n <= 0.0 {
        let mut e = vec![0.0; d];
        e[d - 1] = 1.0;
        return (e, f64::NEG_INFINITY);
    }
    (scale(&w, 1.0 / n), m)
}

/// Euclidean projection of `x` onto the cone spanned by `gens`, by the
/// Lawson–Hanson active-set method for nonnegative least squares.
pub fn cone_projection(gens: &[SpherePoint], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let scale_x = norm(x).max(1e-300);
    let mut lambda = vec![0.0; gens.len()];
    let mut passive: Vec<usize> = Vec::new();
    let combine = |lambda: &[f64], idx: &[usize]| -> Vec<f64> {
        let mut z = vec![0.0; d];
        for &i in idx {
            z = axpy(&z, lambda[i], gens[i].coords());
        }
        z
    };
    for _ in 0..4 * gens.len() + 16 {
        let r = axpy(x, -1.0, &combine(&lambda, &passive));
        let next = (0..gens.len())
            .filter(|i| !passive.contains(i))
            .map(|i| (i, dot(gens[i].coords(), &r)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        match next {
            Some((j, w)) if w > 1e-13 * scale_x => passive.push(j),
            _ => break,
        }
        loop {
            let Some(s) = least_squares(gens, &passive, x) else {
                // numerically dependent column: drop the newcomer
                let j = passive.pop().expect("nonempty");
                lambda[j] = 0.0;
                return combine(&lambda, &passive);
            };
            if s.iter().all(|v| *v > 0.0) {
                for (k, &i) in passive.iter().enumerate() {
                    lambda[i] = s[k];
                }
                break;
            }
            let mut alpha = 1.0f64;
            for (k, &i) in passive.iter().enumerate() {
                if s[k] <= 0.0 {
                    alpha = alpha.min(lambda[i] / (lambda[i] - s[k]));
                }
            }
            for (k, &i) in passive.iter().enumerate() {
                lambda[i] += alpha * (s[k] - lambda[i]);
            }
            passive.retain(|&i| lambda[i] > 1e-15);
            for (i, l) in lambda.iter_mut().enumerate() {
                if !passive.contains(&i) {
                    *l = 0.0;
                }
            }
            if passive.is_empty() {
                break;
            }
        }
    }
    combine(&lambda, &passive)
}

/// Unconstrained least squares over the columns `idx`, via the normal
/// equations with partial pivoting. `None` when they are singular.
fn least_squares(gens: &[SpherePoint], idx: &[usize], x: &[f64]) -> Option<Vec<f64>> {
    let k = idx.len();
    let mut a: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| {
            let mut row: Vec<f64> = idx.iter().map(|&j| dot(gens[i].coords(), gens[j].coords())).collect();
            row.push(dot(gens[i].coords(), x));
            row
        })
        .collect();
    for c in 0..k {
        let piv = (c..k).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs()))?;
        if a[piv][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, piv);
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                for col in c..=k {
                    a[r][col] -= f * a[c][col];
                }
            }
        }
    }
    Some((0..k).map(|r| a[r][k] / a[r][r]).collect())
}

/// Extreme rays and facet normals of the polyhedral cone spanned by unit
/// generators.
#[derive(Debug, Clone)]
pub struct ConeHull {
    /// Indices of extreme generators, duplicates removed.
    pub extreme: Vec<usize>,
    /// Inner facet normals `h` with `h·v ≥ 0` for every generator.
    pub facets: Vec<SpherePoint>,
}

/// Hull of the cone over `gens`. Errors: generators not inside an open
/// hemisphere (`ImproperBody`), cone not full-dimensional (`EmptyInterior`).
pub fn cone_hull(gens: &[SpherePoint], tol_angle: f64) -> Result<ConeHull> {
    let Some(first) = gens.first() else {
        return Err(GeomError::EmptyInterior("no generators".into()));
    };
    let d = first.dim();
    if let Some(g) = gens.iter().find(|g| g.dim() != d) {
        return Err(GeomError::DimensionMismatch { expected: d, got: g.dim() });
    }
    if !(2..=4).contains(&d) {
        return Err(GeomError::UnsupportedDimension(d));
    }
    let (w, margin) = max_margin_axis(gens);
    if !(margin > tol_angle) {
        return Err(GeomError::ImproperBody(format!(
            "points are not inside an open hemisphere (margin {margin:.3e})"
        )));
    }
    let basis = orthonormal_complement(&w);
    let projected: Vec<Vec<f64>> = gens
        .iter()
        .map(|g| {
            let h = dot(&w, g.coords());
            basis.iter().map(|e| dot(e, g.coords()) / h).collect()
        })
        .collect();
    let planes = hull_planes(&projected)?;

    // a·y ≤ b on the slice  ⟺  (b·w − Σ a_k e_k)·v ≥ 0 on the cone
    let mut facets: Vec<SpherePoint> = Vec::with_capacity(planes.len());
    for pl in &planes {
        let mut h = scale(&w, pl.offset);
        for (a, e) in pl.normal.iter().zip(&basis) {
            h = axpy(&h, -a, e);
        }
        let h = normalize(&h)?;
        if !facets.iter().any(|f| angle_between(f.coords(), h.coords()) <= tol_angle) {
            facets.push(h);
        }
    }
    facets.sort_by(|a, b| lex_cmp(a.coords(), b.coords()));

    let mut extreme: Vec<usize> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let active: Vec<&[f64]> = facets
            .iter()
            .filter(|f| f.dot(g).abs() <= 1e-9)
            .map(|f| f.coords())
            .collect();
        if rank(&active, 1e-7) < d - 1 {
            continue;
        }
        if extreme.iter().any(|&j| angle_between(gens[j].coords(), g.coords()) < tol_angle) {
            continue;
        }
        extreme.push(i);
    }
    extreme.sort_by(|&a, &b| lex_cmp(gens[a].coords(), gens[b].coords()));
    Ok(ConeHull { extreme, facets })
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Numerical rank by Gram-Schmidt with a residual threshold.
pub(crate) fn rank(vectors: &[&[f64]], threshold: f64) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.to_vec();
        for b in &basis {
            let c = dot(&r, b);
            r = axpy(&r, -c, b);
        }
        let n = norm(&r);
        if n > threshold {
            basis.push(scale(&r, 1.0 / n));
        }
    }
    basis.len()
}
