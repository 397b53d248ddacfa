//! File formats: JSON for bodies and gamma fields, CSV for gamma samples,
//! OFF meshes for bodies on S².

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::bodies::{Body, CapIntersectionBody, SphericalPolytope};
use crate::error::GeomError;
use crate::generators::{gen_gamma, GammaKind};
use crate::sphere::{normalize, Cap, SpherePoint};
use crate::wulff::{GammaField, Provenance};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed input: {0}")]
    Schema(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl IoError {
    /// True when the input itself is at fault, as opposed to a geometric
    /// precondition on well-formed data.
    pub fn is_schema(&self) -> bool {
        match self {
            IoError::Schema(_) => true,
            IoError::Geom(e) => !e.is_geometric(),
        }
    }
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Schema(e.to_string())
    }
}

pub type IoResult<T> = std::result::Result<T, IoError>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum BodyDoc {
    Polytope {
        dim: usize,
        vertices: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hcenters: Option<Vec<Vec<f64>>>,
    },
    Caps {
        dim: usize,
        caps: Vec<CapDoc>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct CapDoc {
    center: Vec<f64>,
    radius: f64,
}

fn points(dim: usize, rows: Vec<Vec<f64>>, what: &str) -> IoResult<Vec<SpherePoint>> {
    if rows.is_empty() {
        return Err(IoError::Schema(format!("no {what}")));
    }
    rows.into_iter()
        .map(|r| {
            if r.len() != dim {
                return Err(IoError::Schema(format!("{what} entry has {} coordinates, dim is {dim}", r.len())));
            }
            normalize(&r).map_err(|e| IoError::Schema(format!("{what} entry: {e}")))
        })
        .collect()
}

fn rows(pts: &[SpherePoint]) -> Vec<Vec<f64>> {
    pts.iter().map(|p| p.coords().to_vec()).collect()
}

pub fn body_to_json(b: &Body) -> String {
    let doc = match b {
        Body::Polytope(p) => BodyDoc::Polytope {
            dim: p.dim(),
            vertices: rows(p.vertices()),
            hcenters: Some(rows(p.hcenters())),
        },
        Body::Caps(c) => BodyDoc::Caps {
            dim: c.dim(),
            caps: c.caps().iter().map(|k| CapDoc { center: k.center.coords().to_vec(), radius: k.radius }).collect(),
        },
    };
    serde_json::to_string_pretty(&doc).expect("body documents always serialize")
}

pub fn body_from_json(text: &str) -> IoResult<Body> {
    match serde_json::from_str::<BodyDoc>(text)? {
        BodyDoc::Polytope { dim, vertices, hcenters } => {
            let v = points(dim, vertices, "vertices")?;
            let poly = match hcenters {
                Some(h) => SphericalPolytope::from_parts(v, points(dim, h, "hcenters")?, 1e-9)?,
                None => SphericalPolytope::s_conv(&v, 1e-9)?,
            };
            Ok(poly.into())
        }
        BodyDoc::Caps { dim, caps } => {
            if caps.is_empty() {
                return Err(IoError::Schema("no caps".into()));
            }
            let caps = caps
                .into_iter()
                .map(|c| {
                    let center = points(dim, vec![c.center], "caps")?.remove(0);
                    Ok(Cap::new(center, c.radius)?)
                })
                .collect::<IoResult<Vec<_>>>()?;
            Ok(CapIntersectionBody::new(caps)?.into())
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SamplesDoc {
    dim: usize,
    directions: Vec<Vec<f64>>,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

pub fn gamma_to_json(g: &GammaField) -> String {
    let mut doc = serde_json::to_value(SamplesDoc {
        dim: g.dim(),
        directions: rows(g.directions()),
        values: g.values().to_vec(),
        provenance: Some(g.provenance()),
    })
    .expect("gamma documents always serialize");
    doc["kind"] = Value::from("samples");
    serde_json::to_string_pretty(&doc).expect("gamma documents always serialize")
}

/// Reads either explicit samples (`"kind": "samples"`) or a generator
/// description (`constant`, `cube`, `perturbed`, with an optional `seed`).
pub fn gamma_from_json(text: &str) -> IoResult<GammaField> {
    let v: Value = serde_json::from_str(text)?;
    match v.get("kind").and_then(Value::as_str) {
        Some("samples") => {
            let doc: SamplesDoc = serde_json::from_value(v)?;
            if doc.directions.len() != doc.values.len() {
                return Err(IoError::Schema(format!(
                    "{} directions but {} values",
                    doc.directions.len(),
                    doc.values.len()
                )));
            }
            let dirs = points(doc.dim, doc.directions, "directions")?;
            Ok(GammaField::new(dirs, doc.values, doc.provenance.unwrap_or(Provenance::File))?)
        }
        Some(_) => {
            let seed = match v.get("seed") {
                None => 0,
                Some(s) => s.as_u64().ok_or_else(|| IoError::Schema("seed must be a nonnegative integer".into()))?,
            };
            let kind: GammaKind = serde_json::from_value(v)?;
            Ok(gen_gamma(&kind, seed)?)
        }
        None => Err(IoError::Schema("gamma document needs a string `kind`".into())),
    }
}

/// Rows `θ_1,…,θ_n,γ`. `#` comments and a non-numeric header row are
/// skipped. Directions must be unit vectors up to `1e-6`.
pub fn gamma_from_csv(text: &str) -> IoResult<GammaField> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut dirs = Vec::new();
    let mut values = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| IoError::Schema(e.to_string()))?;
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let nums = match parsed {
            Ok(n) => n,
            Err(_) if k == 0 => continue,
            Err(e) => return Err(IoError::Schema(format!("row {}: {e}", k + 1))),
        };
        if nums.len() < 3 {
            return Err(IoError::Schema(format!("row {}: need a direction and a value", k + 1)));
        }
        let (theta, gamma) = nums.split_at(nums.len() - 1);
        let n = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (n - 1.0).abs() > 1e-6 {
            return Err(IoError::Schema(format!("row {}: direction has norm {n}", k + 1)));
        }
        dirs.push(normalize(theta)?);
        values.push(gamma[0]);
    }
    if dirs.is_empty() {
        return Err(IoError::Schema("no gamma rows".into()));
    }
    Ok(GammaField::new(dirs, values, Provenance::File)?)
}

pub fn gamma_to_csv(g: &GammaField) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = (1..=g.dim()).map(|k| format!("theta{k}")).chain(["gamma".to_string()]);
    w.write_record(header).expect("writing to memory");
    for (t, v) in g.directions().iter().zip(g.values()) {
        w.write_record(t.coords().iter().chain([v]).map(|x| format!("{x:?}"))).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

/// A triangle mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn euler_characteristic(&self) -> i64 {
        let mut edges = std::collections::BTreeSet::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.faces.len() as i64
    }
}

/// Boundary of a body on S² as a disk mesh. Polytopes are triangulated as
/// a fan over their vertex polygon; cap bodies as a fan from the interior
/// point over `samples` boundary points and the corners.
pub fn body_mesh(b: &Body, samples: usize) -> IoResult<Mesh> {
    if b.dim() != 3 {
        return Err(IoError::Schema(format!("mesh export needs a body on S², got dim {}", b.dim())));
    }
    let c = b.interior_point()?;
    let basis = c.tangent_basis();
    let ring_angle = |p: &SpherePoint| -> f64 {
        let x: f64 = p.coords().iter().zip(&basis[0]).map(|(a, b)| a * b).sum();
        let y: f64 = p.coords().iter().zip(&basis[1]).map(|(a, b)| a * b).sum();
        y.atan2(x)
    };
    let sorted = |mut pts: Vec<SpherePoint>| -> Vec<SpherePoint> {
        pts.sort_by(|a, b| ring_angle(a).total_cmp(&ring_angle(b)));
        pts
    };
    let to3 = |p: &SpherePoint| [p.coords()[0], p.coords()[1], p.coords()[2]];
    match b {
        Body::Polytope(p) => {
            let ring = sorted(p.vertices().to_vec());
            let faces = (1..ring.len() - 1).map(|k| [0, k, k + 1]).collect();
            Ok(Mesh { vertices: ring.iter().map(to3).collect(), faces })
        }
        Body::Caps(_) => {
            let mut pts = Vec::with_capacity(samples + 4);
            for k in 0..samples {
                let phi = std::f64::consts::TAU * k as f64 / samples as f64;
                let u: Vec<f64> = basis[0].iter().zip(&basis[1]).map(|(a, b)| phi.cos() * a + phi.sin() * b).collect();
                pts.push(b.boundary_point(&c, &u)?);
            }
            pts.extend(b.corners());
            let ring = sorted(pts);
            let n = ring.len();
            let mut vertices = vec![to3(&c)];
            vertices.extend(ring.iter().map(to3));
            let faces = (0..n).map(|k| [0, 1 + k, 1 + (k + 1) % n]).collect();
            Ok(Mesh { vertices, faces })
        }
    }
}

pub fn mesh_to_off(m: &Mesh) -> String {
    let mut out = format!("OFF\n{} {} 0\n", m.vertices.len(), m.faces.len());
    for v in &m.vertices {
        let _ = writeln!(out, "{:?} {:?} {:?}", v[0], v[1], v[2]);
    }
    for f in &m.faces {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    out
}

pub fn mesh_from_off(text: &str) -> IoResult<Mesh> {
    let bad = |m: &str| IoError::Schema(format!("OFF: {m}"));
    let mut tokens = text.lines().map(|l| l.split('#').next().unwrap_or("")).flat_map(str::split_whitespace);
    if tokens.next() != Some("OFF") {
        return Err(bad("missing OFF header"));
    }
    let nums: Vec<f64> = tokens.map(|t| t.parse().map_err(|_| bad("bad number"))).collect::<IoResult<_>>()?;
    let count = |k: usize| -> IoResult<usize> {
        let x = *nums.get(k).ok_or_else(|| bad("truncated"))?;
        if x < 0.0 || x.fract() != 0.0 {
            return Err(bad("bad count or index"));
        }
        Ok(x as usize)
    };
    let (nv, nf) = (count(0)?, count(1)?);
    let fstart = 3 + 3 * nv;
    if nums.len() != fstart + 4 * nf {
        return Err(bad("wrong number of entries"));
    }
    let vertices = nums[3..fstart].chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
    let mut faces = Vec::with_capacity(nf);
    for f in 0..nf {
        let at = fstart + 4 * f;
        if count(at)? != 3 {
            return Err(bad("only triangles are supported"));
        }
        let idx = [count(at + 1)?, count(at + 2)?, count(at + 3)?];
        if idx.iter().any(|&i| i >= nv) {
            return Err(bad("face index out of range"));
        }
        faces.push(idx);
    }
    Ok(Mesh { vertices, faces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_orthant, gen_reuleaux};

    #[test]
    fn body_json_round_trips() {
        for b in [gen_orthant(3).unwrap(), gen_orthant(4).unwrap(), gen_reuleaux(1.0).unwrap()] {
            let text = body_to_json(&b);
            let back = body_from_json(&text).unwrap();
            assert_eq!(back, b);
            assert_eq!(body_to_json(&back), text);
        }
    }

    #[test]
    fn body_json_errors_are_classified() {
        let e = body_from_json("{\"kind\":\"polytope\"").unwrap_err();
        assert!(e.is_schema());
        let e = body_from_json(r#"{"kind":"caps","dim":3,"caps":[{"center":[0,0,1],"radius":2.0}]}"#).unwrap_err();
        assert!(e.is_schema(), "{e}");
        let e = body_from_json(r#"{"kind":"polytope","dim":3,"vertices":[[1,0,0],[0,1,0],[0,0]]}"#).unwrap_err();
        assert!(e.is_schema());
        // three points on a great circle have no interior
        let e = body_from_json(r#"{"kind":"polytope","dim":3,"vertices":[[1,0,0],[0,1,0],[1,1,0]]}"#).unwrap_err();
        assert!(!e.is_schema(), "{e}");
        let b = body_from_json(r#"{"kind":"polytope","dim":3,"vertices":[[2,0,0],[0,3,0],[0,0,1]]}"#).unwrap();
        assert_eq!(b, gen_orthant(3).unwrap());
    }

    #[test]
    fn gamma_formats_round_trip() {
        let g = gen_gamma(&GammaKind::Perturbed { dim: 3, value: 1.0, amplitude: 0.2, grid: 50 }, 3).unwrap();
        assert_eq!(gamma_from_json(&gamma_to_json(&g)).unwrap(), g);
        let csv = gamma_to_csv(&g);
        let back = gamma_from_csv(&csv).unwrap();
        assert_eq!(back.values(), g.values());
        assert_eq!(back.directions(), g.directions());
        let c = gamma_from_json(r#"{"kind":"constant","dim":3,"value":2.0,"grid":100}"#).unwrap();
        assert_eq!(c.directions().len(), 100);
        assert!(gamma_from_json(r#"{"dim":3}"#).unwrap_err().is_schema());
        let half = "1,0,0,1\n0,1,0,1\n0,0,1,1\n";
        assert!(!gamma_from_csv(half).unwrap_err().is_schema());
        assert!(gamma_from_csv("1,0,0,1\n0,2,0,1\n").unwrap_err().is_schema());
    }

    #[test]
    fn meshes() {
        let m = body_mesh(&gen_orthant(3).unwrap(), 64).unwrap();
        assert_eq!(m.vertices.len(), 3);
        assert_eq!(m.faces.len(), 1);
        let r = body_mesh(&gen_reuleaux(1.0).unwrap(), 128).unwrap();
        assert_eq!(r.euler_characteristic(), 1);
        assert_eq!(mesh_from_off(&mesh_to_off(&r)).unwrap(), r);
        assert!(body_mesh(&gen_orthant(4).unwrap(), 8).unwrap_err().is_schema());
        assert!(mesh_from_off("OFF\n1 0 0\n").is_err());
    }
}
