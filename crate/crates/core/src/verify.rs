//! Property suites over the generator families.

use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::bodies::Body;
use crate::error::Result;
use crate::generators::{gen_cap, gen_gamma, gen_orthant, gen_random_polytope, gen_reuleaux_with, GammaKind};
use crate::metrics::{diameter, polar_reach, radial_hausdorff, thickness, verify_theorem_1, width_wrt_with_polar};
use crate::polar::{check_lemma_2_2, polar_body, polar_polytope};
use crate::sphere::{SpherePoint, ToleranceConfig};
use crate::wulff::{check_dual_is_reflected_polar, check_prop_3_3, check_self_dual, corollary_3_2_report, GammaField};

/// Directions used for the dense constant gamma fields.
pub const DENSE_GRID: usize = 1200;
pub const WULFF_GRID: usize = 240;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Theorem1,
    Lemma22,
    Lemma23,
    Cor24,
    Prop33,
    Cor32,
    Selfdual,
}

impl Suite {
    pub const EACH: [Suite; 7] =
        [Suite::Theorem1, Suite::Lemma22, Suite::Lemma23, Suite::Cor24, Suite::Prop33, Suite::Cor32, Suite::Selfdual];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Theorem1 => "theorem1",
            Suite::Lemma22 => "lemma22",
            Suite::Lemma23 => "lemma23",
            Suite::Cor24 => "cor24",
            Suite::Prop33 => "prop33",
            Suite::Cor32 => "cor32",
            Suite::Selfdual => "selfdual",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        std::iter::once(Suite::All)
            .chain(Suite::EACH)
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub suite: &'static str,
    pub case: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub failures: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Outcome>,
    pub outcomes: Vec<Outcome>,
}

/// A named body with its width when it is known to be of constant width.
pub struct Specimen {
    pub name: String,
    pub body: Body,
    pub width: Option<f64>,
}

/// Canonical bodies: Reuleaux triangles, caps and orthants.
pub fn canonical_bodies(cfg: &ToleranceConfig) -> Result<Vec<Specimen>> {
    let mut out = Vec::new();
    for (label, tau) in [
        ("pi/6", PI / 6.0),
        ("pi/4", PI / 4.0),
        ("pi/3", PI / 3.0),
        ("pi/2", FRAC_PI_2),
        ("2pi/3", 2.0 * PI / 3.0),
    ] {
        out.push(Specimen {
            name: format!("reuleaux({label})"),
            body: gen_reuleaux_with(tau, cfg)?,
            width: Some(tau),
        });
    }
    for (label, r) in [("pi/8", PI / 8.0), ("pi/5", PI / 5.0)] {
        out.push(Specimen {
            name: format!("cap({label})"),
            body: gen_cap(SpherePoint::north(3), r)?,
            width: Some(2.0 * r),
        });
    }
    for d in [3, 4] {
        out.push(Specimen { name: format!("orthant({d})"), body: gen_orthant(d)?, width: Some(FRAC_PI_2) });
    }
    Ok(out)
}

/// Seeded random polytopes; every fifth one lives on `S³`.
pub fn random_bodies(count: usize, seed: u64) -> Result<Vec<Specimen>> {
    (0..count)
        .map(|i| {
            let s = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
            let (d, m) = if i % 5 == 4 { (4, 12) } else { (3, 9) };
            Ok(Specimen {
                name: format!("random(d={d}, m={m}, seed={s})"),
                body: gen_random_polytope(d, m, 0.6, s)?,
                width: None,
            })
        })
        .collect()
}

pub struct Verifier {
    cfg: ToleranceConfig,
    outcomes: Vec<Outcome>,
}

impl Verifier {
    pub fn new(cfg: ToleranceConfig) -> Self {
        Self { cfg, outcomes: Vec::new() }
    }

    fn record(&mut self, suite: Suite, case: impl Into<String>, result: Result<(bool, Value)>) {
        let (pass, detail) = match result {
            Ok(x) => x,
            Err(e) => (false, json!({ "error": e.to_string() })),
        };
        self.outcomes.push(Outcome { suite: suite.name(), case: case.into(), pass, detail });
    }

    pub fn run(mut self, suite: Suite) -> VerifyReport {
        let suites: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
        for s in suites {
            if let Err(e) = self.run_one(s) {
                self.record(s, "setup", Err(e));
            }
        }
        let failures = self.outcomes.iter().filter(|o| !o.pass).count();
        VerifyReport {
            suite,
            seed: self.cfg.seed,
            cases: self.outcomes.len(),
            failures,
            pass: failures == 0,
            first_failure: self.outcomes.iter().find(|o| !o.pass).cloned(),
            outcomes: self.outcomes,
        }
    }

    fn run_one(&mut self, s: Suite) -> Result<()> {
        match s {
            Suite::All => unreachable!("expanded by run"),
            Suite::Theorem1 => self.theorem1(),
            Suite::Lemma22 => self.lemma22(),
            Suite::Lemma23 => self.lemma23(),
            Suite::Cor24 => self.cor24(),
            Suite::Prop33 => self.prop33(),
            Suite::Cor32 => self.cor32(),
            Suite::Selfdual => self.selfdual(),
        }
    }

    fn theorem1(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let tol = cfg.constancy_tol();
        let mut bodies = canonical_bodies(&cfg)?;
        bodies.extend(random_bodies(50, cfg.seed)?);
        for sp in bodies {
            let r = verify_theorem_1(&sp.body, tol, &cfg).map(|rep| {
                let expected = sp.width.is_none_or(|w| {
                    rep.constant_width.is_constant && (rep.constant_width.tau - w).abs() <= tol
                });
                (rep.pass && expected, json!(rep))
            });
            self.record(Suite::Theorem1, sp.name, r);
        }
        Ok(())
    }

    fn lemma22(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let mut bodies = canonical_bodies(&cfg)?;
        bodies.extend(random_bodies(20, cfg.seed.wrapping_add(22))?);
        for sp in bodies {
            let r = check_lemma_2_2(&sp.body, 256, &cfg).map(|rep| (rep.pass, json!(rep)));
            self.record(Suite::Lemma22, sp.name, r);
        }
        Ok(())
    }

    /// The polar of a body of constant width `τ` has thickness and diameter
    /// `π − τ`.
    fn lemma23(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let tol = cfg.constancy_tol();
        for sp in canonical_bodies(&cfg)? {
            let tau = sp.width.expect("canonical bodies have constant width");
            let r = polar_body(&sp.body, &cfg).and_then(|p| {
                let th = thickness(&p, &cfg)?.value;
                let di = diameter(&p, &cfg)?.value;
                let gap = (th - (PI - tau)).abs().max((di - (PI - tau)).abs());
                Ok((gap <= tol, json!({ "expected": PI - tau, "thickness": th, "diameter": di, "gap": gap })))
            });
            self.record(Suite::Lemma23, sp.name, r);
        }
        Ok(())
    }

    /// Width and diameter duality, the two width routes, and the double
    /// polar.
    fn cor24(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let tol = 2.0 * cfg.tol_sample;
        let mut bodies = canonical_bodies(&cfg)?;
        bodies.extend(random_bodies(20, cfg.seed.wrapping_add(24))?);

        let polars: Vec<Result<Body>> = bodies.iter().map(|sp| polar_body(&sp.body, &cfg)).collect();

        for (sp, polar) in bodies.iter().zip(&polars) {
            let r = polar.clone().and_then(|p| {
                let th = thickness(&sp.body, &cfg)?.value;
                let dp = diameter(&p, &cfg)?.value;
                let gap = (th - (PI - dp)).abs();
                Ok((gap <= tol, json!({ "thickness": th, "polar_diameter": dp, "gap": gap })))
            });
            self.record(Suite::Cor24, format!("duality {}", sp.name), r);
        }

        for (i, (sp, polar)) in bodies.iter().zip(&polars).cycle().take(100).enumerate() {
            // supporting centers are the boundary points of the polar
            let r = polar.clone().and_then(|polar| {
                let p = polar.boundary_sample(1, cfg.stream(100 + i as u64))?.remove(0);
                let a = width_wrt_with_polar(&sp.body, &polar, &p, &cfg)?.value;
                let b = PI - polar_reach(&sp.body, &p, &cfg)?;
                let gap = (a - b).abs();
                Ok((gap <= tol, json!({ "route_a": a, "route_b": b, "gap": gap })))
            });
            self.record(Suite::Cor24, format!("width routes #{i} {}", sp.name), r);
        }

        for (sp, polar) in bodies.iter().zip(&polars) {
            let r = polar.clone().and_then(|p| polar_body(&p, &cfg)).and_then(|pp| {
                match (&sp.body, &pp) {
                    (Body::Polytope(a), Body::Polytope(b)) => {
                        let exact = polar_polytope(&polar_polytope(a)) == *a && b == a;
                        Ok((exact, json!({ "exact": exact })))
                    }
                    _ => {
                        let h = radial_hausdorff(&sp.body, &pp, cfg.boundary_samples, cfg.stream(5))?;
                        Ok((h <= tol, json!({ "hausdorff": h })))
                    }
                }
            });
            self.record(Suite::Cor24, format!("double polar {}", sp.name), r);
        }
        Ok(())
    }

    fn gamma(&self, kind: GammaKind, seed: u64) -> Result<GammaField> {
        gen_gamma(&kind, seed)
    }

    fn prop33(&mut self) -> Result<()> {
        let tol = 5e-3;
        let mut fields = vec![
            ("constant(1)".to_string(), self.gamma(GammaKind::Constant { dim: 3, value: 1.0, grid: WULFF_GRID }, 0)?),
            ("cube".to_string(), self.gamma(GammaKind::Cube { dim: 3 }, 0)?),
        ];
        for i in 0..20u64 {
            let s = self.cfg.seed.wrapping_mul(7919).wrapping_add(i);
            let kind = GammaKind::Perturbed { dim: 3, value: 1.0, amplitude: 0.2, grid: WULFF_GRID };
            fields.push((format!("perturbed(a=0.2, seed={s})"), self.gamma(kind, s)?));
        }
        for (name, g) in fields {
            let r = check_prop_3_3(&g, tol).and_then(|a| {
                let b = check_dual_is_reflected_polar(&g, tol)?;
                Ok((a.pass && b.pass, json!({ "spherical_route": a, "reflected_polar": b })))
            });
            self.record(Suite::Prop33, name, r);
        }
        Ok(())
    }

    fn cor32(&mut self) -> Result<()> {
        let cfg = self.cfg;
        for c in [1.0, 0.5, 2.0] {
            let g = self.gamma(GammaKind::Constant { dim: 3, value: c, grid: DENSE_GRID }, 0)?;
            let r = corollary_3_2_report(&g, 1e-2, &cfg).map(|rep| (rep.pass, json!(rep)));
            self.record(Suite::Cor32, format!("constant({c})"), r);
        }
        Ok(())
    }

    /// `γ ≡ 1` is self-dual; `γ ≡ 2` and the cube are not.
    fn selfdual(&mut self) -> Result<()> {
        let cfg = self.cfg;
        let tol = cfg.constancy_tol();
        let cases = [
            ("constant(1)", GammaKind::Constant { dim: 3, value: 1.0, grid: DENSE_GRID }, Some(FRAC_PI_2)),
            ("constant(2)", GammaKind::Constant { dim: 3, value: 2.0, grid: DENSE_GRID }, Some(2.0 * 2f64.atan())),
            ("cube", GammaKind::Cube { dim: 3 }, None),
        ];
        for (name, kind, width) in cases {
            let expect_self_dual = name == "constant(1)";
            let r = self.gamma(kind, 0).and_then(|g| check_self_dual(&g, tol, &cfg)).map(|rep| {
                let verdicts = [rep.radial_self_dual, rep.width_verdict, rep.diameter_verdict];
                let mut ok = verdicts.iter().all(|v| *v == expect_self_dual);
                if let Some(w) = width {
                    ok &= rep.width.is_constant && (rep.width.tau - w).abs() <= tol;
                }
                (ok, json!(rep))
            });
            self.record(Suite::Selfdual, name, r);
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, cfg: &ToleranceConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    Ok(Verifier::new(*cfg).run(suite))
}
