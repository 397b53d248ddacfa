//! Deterministic direction grids.

use std::f64::consts::{PI, TAU};

use crate::error::{GeomError, Result};
use crate::sphere::{normalize, SpherePoint};

/// Fibonacci spiral with `m` points on S² (coordinates in `R^3`).
pub fn fibonacci_sphere(m: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Antipodally symmetric grid of about `m` directions on `S^{dim-1}`:
/// every direction comes with its antipode. Circles use equal angles, S²
/// a mirrored Fibonacci spiral, S³ a product of a latitude band with two
/// circles.
pub fn direction_grid(dim: usize, m: usize) -> Result<Vec<SpherePoint>> {
    if m < 4 {
        return Err(GeomError::InvalidParameter(format!("grid size {m} < 4")));
    }
    let half = m.div_ceil(2);
    let raw: Vec<Vec<f64>> = match dim {
        2 => (0..half)
            .map(|k| {
                let t = PI * k as f64 / half as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => fibonacci_sphere(2 * half).into_iter().take(half).collect(),
        4 => s3_half_grid(half),
        _ => return Err(GeomError::UnsupportedDimension(dim)),
    };
    let mut out = Vec::with_capacity(2 * raw.len());
    for v in &raw {
        out.push(normalize(v)?);
    }
    for v in &raw {
        out.push(normalize(&v.iter().map(|x| -x).collect::<Vec<_>>())?);
    }
    Ok(out)
}

/// Points of S³ as `(cos a·cos s, cos a·sin s, sin a·cos t, sin a·sin t)`
/// over a product grid, keeping the half with positive leading sign.
fn s3_half_grid(half: usize) -> Vec<Vec<f64>> {
    let rings = ((half as f64).cbrt().ceil() as usize).max(2);
    let mut out = Vec::new();
    for i in 0..rings {
        let a = (i as f64 + 0.5) / rings as f64 * PI / 2.0;
        let n1 = ((a.cos() * 2.0 * rings as f64).ceil() as usize).max(1);
        let n2 = ((a.sin() * 2.0 * rings as f64).ceil() as usize).max(1);
        for j in 0..n1 {
            // s ∈ [0, π): the antipode supplies the other half
            let s = PI * (j as f64 + 0.5) / n1 as f64;
            for k in 0..n2 {
                let t = TAU * k as f64 / n2 as f64;
                out.push(vec![a.cos() * s.cos(), a.cos() * s.sin(), a.sin() * t.cos(), a.sin() * t.sin()]);
            }
        }
    }
    out
}

/// Largest angular distance from any of `probes` to its nearest grid
/// direction; an estimate of the grid's covering radius.
pub fn covering_radius(grid: &[SpherePoint], probes: &[SpherePoint]) -> f64 {
    probes
        .iter()
        .map(|p| {
            grid.iter()
                .map(|g| g.dot(p))
                .fold(f64::NEG_INFINITY, f64::max)
                .clamp(-1.0, 1.0)
                .acos()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_are_symmetric_unit_and_sized() {
        for (dim, m) in [(2, 40), (3, 200), (4, 300)] {
            let g = direction_grid(dim, m).unwrap();
            assert!(g.len() >= m / 2 * 2 - 2, "{dim}: {}", g.len());
            let half = g.len() / 2;
            for k in 0..half {
                assert_eq!(g[k].antipode(), g[k + half]);
            }
        }
        assert!(direction_grid(5, 100).is_err());
        assert!(direction_grid(3, 2).is_err());
    }

    #[test]
    fn dense_sphere_grid_has_small_mesh() {
        let g = direction_grid(3, 1000).unwrap();
        let probes: Vec<SpherePoint> =
            fibonacci_sphere(3001).iter().map(|v| normalize(v).unwrap()).collect();
        let r = covering_radius(&g, &probes);
        assert!(r < 0.1, "{r}");
    }
}
