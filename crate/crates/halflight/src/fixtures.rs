//! Registry of built-in immersion fixtures.
//!
//! Each fixture bundles an immersion spec (with exact closed-form frame
//! overrides where available), deterministic low-discrepancy sample
//! points, and the analytically known expectations for the classifier:
//! principal-curvature formulas, conformal factors and verdicts,
//! co-screen behaviour, and the two-eigenvalue verdict. A seeded
//! generator produces random half-lightlike specs from a rotated
//! cone-times-graph family for sweep tests.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{Classification, FitVerdict, TwoEigenvalueVerdict};
use crate::expr::{parse, Expression};
use crate::framing::ImmersionSpec;
use crate::sampling::halton_points;

/// Expected outcome of the two-eigenvalue verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictExpect {
    /// Hypotheses hold; the smallest |principal curvature| must vanish.
    Applicable,
    /// Hypotheses fail for exactly this reason.
    NotApplicable(&'static str),
}

/// Analytically known classification fragments. `None` fields are not
/// asserted for the fixture.
#[derive(Debug, Clone)]
pub struct Expect {
    /// Principal curvatures as a function of the chart point, descending.
    pub lambdas: Option<fn(&[f64]) -> Vec<f64>>,
    pub screen_verdict: Option<FitVerdict>,
    /// Constant conformal factor in the screen-homothetic case.
    pub screen_factor: Option<f64>,
    pub screen_homothetic: Option<bool>,
    pub coscreen_killing: Option<bool>,
    pub coscreen_verdict: Option<FitVerdict>,
    pub irrotational: bool,
    pub tau_vanishes: bool,
    pub totally_geodesic: bool,
    pub totally_umbilical: Option<bool>,
    pub cartan_applicable: bool,
    pub two_eigenvalue: Option<VerdictExpect>,
    /// Sectional curvature of the nonzero-curvature leaf, when that
    /// leaf is at least two-dimensional on a screen-homothetic fixture.
    pub leaf_curvature: Option<fn(&[f64]) -> f64>,
}

/// One verified expectation with its outcome.
#[derive(Debug, Clone)]
pub struct ExpectationResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub spec: ImmersionSpec,
    /// Deterministic interior sample points.
    pub points: Vec<Vec<f64>>,
    pub expect: Expect,
}

fn exprs(list: &[&str]) -> Vec<Expression> {
    list.iter()
        .map(|s| parse(s).expect("fixture expression must parse"))
        .collect()
}

fn screen_exprs(rows: &[&[&str]]) -> Vec<Vec<Expression>> {
    rows.iter().map(|row| exprs(row)).collect()
}

fn example1() -> Fixture {
    let spec = ImmersionSpec {
        name: "example1".into(),
        chart_dim: 3,
        signature: None,
        components: exprs(&["v1", "v2", "v3", "sqrt(v1^2 - v2^2)", "sqrt(1 + v3^2)"]),
        domain: vec![(1.5, 3.0), (0.5, 1.2), (-1.0, 1.0)],
        radical: Some(exprs(&["1", "v2/v1", "0", "sqrt(v1^2 - v2^2)/v1", "0"])),
        screen: Some(screen_exprs(&[
            &["0", "sqrt(v1^2 - v2^2)/v1", "0", "-v2/v1", "0"],
            &[
                "0",
                "0",
                "sqrt(1 + v3^2)/sqrt(1 + 2*v3^2)",
                "0",
                "v3/sqrt(1 + 2*v3^2)",
            ],
        ])),
        coscreen: Some(exprs(&[
            "0",
            "0",
            "-v3/sqrt(1 + 2*v3^2)",
            "0",
            "sqrt(1 + v3^2)/sqrt(1 + 2*v3^2)",
        ])),
        k: 0.0,
    };
    let points = halton_points(&spec.domain, 8, 0);
    Fixture {
        spec,
        points,
        expect: Expect {
            lambdas: Some(|u| vec![0.0, -1.0 / u[0]]),
            screen_verdict: Some(FitVerdict::Holds),
            screen_factor: Some(0.5),
            screen_homothetic: Some(true),
            coscreen_killing: Some(false),
            coscreen_verdict: Some(FitVerdict::Refuted),
            irrotational: true,
            tau_vanishes: true,
            totally_geodesic: false,
            totally_umbilical: Some(false),
            cartan_applicable: true,
            two_eigenvalue: Some(VerdictExpect::NotApplicable("co-screen not conformal")),
            leaf_curvature: None,
        },
    }
}

fn example2() -> Fixture {
    let spec = ImmersionSpec {
        name: "example2".into(),
        chart_dim: 4,
        signature: None,
        components: exprs(&["v1", "v2", "v3", "v4", "v3", "sqrt(v1^2 - v2^2)"]),
        domain: vec![(1.5, 3.0), (0.5, 1.2), (-1.0, 1.0), (-1.0, 1.0)],
        radical: Some(exprs(&["1", "v2/v1", "0", "0", "0", "sqrt(v1^2 - v2^2)/v1"])),
        screen: Some(screen_exprs(&[
            &["0", "sqrt(v1^2 - v2^2)/v1", "0", "0", "0", "-v2/v1"],
            &["0", "0", "1/sqrt(2)", "0", "1/sqrt(2)", "0"],
            &["0", "0", "0", "1", "0", "0"],
        ])),
        coscreen: Some(exprs(&["0", "0", "1/sqrt(2)", "0", "-1/sqrt(2)", "0"])),
        k: 0.0,
    };
    let points = halton_points(&spec.domain, 8, 16);
    Fixture {
        spec,
        points,
        expect: Expect {
            lambdas: Some(|u| vec![0.0, 0.0, -1.0 / u[0]]),
            screen_verdict: Some(FitVerdict::Holds),
            screen_factor: Some(0.5),
            screen_homothetic: Some(true),
            coscreen_killing: Some(true),
            coscreen_verdict: Some(FitVerdict::Holds),
            irrotational: true,
            tau_vanishes: true,
            totally_geodesic: false,
            totally_umbilical: Some(false),
            cartan_applicable: true,
            two_eigenvalue: Some(VerdictExpect::Applicable),
            leaf_curvature: None,
        },
    }
}

fn example3() -> Fixture {
    let spec = ImmersionSpec {
        name: "example3".into(),
        chart_dim: 4,
        signature: None,
        components: exprs(&[
            "v1",
            "v2",
            "v1*sin(v3)/sqrt(2)",
            "v1*cos(v3)/sqrt(2)",
            "v1*sin(v4)/sqrt(2)",
            "v1*cos(v4)/sqrt(2)",
        ]),
        domain: vec![(1.5, 3.0), (-1.0, 1.0), (-0.6, 0.6), (-0.6, 0.6)],
        radical: Some(exprs(&[
            "1",
            "0",
            "sin(v3)/sqrt(2)",
            "cos(v3)/sqrt(2)",
            "sin(v4)/sqrt(2)",
            "cos(v4)/sqrt(2)",
        ])),
        screen: Some(screen_exprs(&[
            &["0", "1", "0", "0", "0", "0"],
            &["0", "0", "cos(v3)", "-sin(v3)", "0", "0"],
            &["0", "0", "0", "0", "cos(v4)", "-sin(v4)"],
        ])),
        coscreen: Some(exprs(&[
            "1",
            "0",
            "sqrt(2)*sin(v3)",
            "sqrt(2)*cos(v3)",
            "0",
            "0",
        ])),
        k: 0.0,
    };
    let mut points = halton_points(&spec.domain, 8, 32);
    // Dedicated points with v3 = 0 where the co-screen second form takes
    // its simplest closed value.
    points.push(vec![2.0, 0.3, 0.0, 0.25]);
    points.push(vec![2.4, -0.5, 0.0, -0.4]);
    points.push(vec![1.8, 0.1, 0.0, 0.5]);
    Fixture {
        spec,
        points,
        expect: Expect {
            lambdas: Some(|u| vec![0.0, -1.0 / u[0], -1.0 / u[0]]),
            screen_verdict: Some(FitVerdict::Refuted),
            screen_factor: None,
            screen_homothetic: Some(false),
            coscreen_killing: Some(false),
            coscreen_verdict: Some(FitVerdict::Refuted),
            irrotational: true,
            tau_vanishes: true,
            totally_geodesic: false,
            totally_umbilical: Some(false),
            cartan_applicable: true,
            two_eigenvalue: Some(VerdictExpect::NotApplicable("not screen homothetic")),
            leaf_curvature: None,
        },
    }
}

fn plane() -> Fixture {
    let spec = ImmersionSpec {
        name: "plane".into(),
        chart_dim: 3,
        signature: None,
        components: exprs(&["v1", "v1", "v2", "v3", "0"]),
        domain: vec![(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
        radical: Some(exprs(&["1", "1", "0", "0", "0"])),
        screen: Some(screen_exprs(&[
            &["0", "0", "1", "0", "0"],
            &["0", "0", "0", "1", "0"],
        ])),
        coscreen: Some(exprs(&["0", "0", "0", "0", "1"])),
        k: 0.0,
    };
    let points = halton_points(&spec.domain, 8, 48);
    Fixture {
        spec,
        points,
        expect: Expect {
            lambdas: Some(|_| vec![0.0, 0.0]),
            screen_verdict: Some(FitVerdict::Inconclusive),
            screen_factor: None,
            screen_homothetic: Some(false),
            coscreen_killing: Some(true),
            coscreen_verdict: Some(FitVerdict::Holds),
            irrotational: true,
            tau_vanishes: true,
            totally_geodesic: true,
            totally_umbilical: Some(true),
            cartan_applicable: true,
            two_eigenvalue: Some(VerdictExpect::NotApplicable("not screen homothetic")),
            leaf_curvature: None,
        },
    }
}

fn null_cone() -> Fixture {
    let spec = ImmersionSpec {
        name: "null_cone".into(),
        chart_dim: 3,
        signature: None,
        components: exprs(&[
            "v1",
            "v1*sin(v2)*cos(v3)",
            "v1*sin(v2)*sin(v3)",
            "v1*cos(v2)",
            "1",
        ]),
        domain: vec![(1.0, 2.5), (0.4, 2.7), (0.3, 1.6)],
        radical: Some(exprs(&[
            "1",
            "sin(v2)*cos(v3)",
            "sin(v2)*sin(v3)",
            "cos(v2)",
            "0",
        ])),
        screen: Some(screen_exprs(&[
            &["0", "cos(v2)*cos(v3)", "cos(v2)*sin(v3)", "-sin(v2)", "0"],
            &["0", "-sin(v3)", "cos(v3)", "0", "0"],
        ])),
        coscreen: Some(exprs(&["0", "0", "0", "0", "1"])),
        k: 0.0,
    };
    let points = halton_points(&spec.domain, 8, 64);
    Fixture {
        spec,
        points,
        expect: Expect {
            lambdas: Some(|u| vec![-1.0 / u[0], -1.0 / u[0]]),
            screen_verdict: Some(FitVerdict::Holds),
            screen_factor: Some(0.5),
            screen_homothetic: Some(true),
            coscreen_killing: Some(true),
            coscreen_verdict: Some(FitVerdict::Holds),
            irrotational: true,
            tau_vanishes: true,
            totally_geodesic: false,
            totally_umbilical: Some(true),
            cartan_applicable: true,
            two_eigenvalue: Some(VerdictExpect::NotApplicable(
                "principal curvatures not two distinct constants along the screen",
            )),
            leaf_curvature: Some(|u| 1.0 / (u[0] * u[0])),
        },
    }
}

fn null_cone_cylinder() -> Fixture {
    let spec = ImmersionSpec {
        name: "null_cone_cylinder".into(),
        chart_dim: 4,
        signature: None,
        components: exprs(&[
            "v1",
            "v1*sin(v2)*cos(v3)",
            "v1*sin(v2)*sin(v3)",
            "v1*cos(v2)",
            "v4",
            "1",
        ]),
        domain: vec![(1.0, 2.5), (0.4, 2.7), (0.3, 1.6), (-1.0, 1.0)],
        radical: Some(exprs(&[
            "1",
            "sin(v2)*cos(v3)",
            "sin(v2)*sin(v3)",
            "cos(v2)",
            "0",
            "0",
        ])),
        screen: Some(screen_exprs(&[
            &[
                "0",
                "cos(v2)*cos(v3)",
                "cos(v2)*sin(v3)",
                "-sin(v2)",
                "0",
                "0",
            ],
            &["0", "-sin(v3)", "cos(v3)", "0", "0", "0"],
            &["0", "0", "0", "0", "1", "0"],
        ])),
        coscreen: Some(exprs(&["0", "0", "0", "0", "0", "1"])),
        k: 0.0,
    };
    let points = halton_points(&spec.domain, 8, 80);
    Fixture {
        spec,
        points,
        expect: Expect {
            lambdas: Some(|u| vec![0.0, -1.0 / u[0], -1.0 / u[0]]),
            screen_verdict: Some(FitVerdict::Holds),
            screen_factor: Some(0.5),
            screen_homothetic: Some(true),
            coscreen_killing: Some(true),
            coscreen_verdict: Some(FitVerdict::Holds),
            irrotational: true,
            tau_vanishes: true,
            totally_geodesic: false,
            totally_umbilical: Some(false),
            cartan_applicable: true,
            two_eigenvalue: Some(VerdictExpect::Applicable),
            leaf_curvature: Some(|u| 1.0 / (u[0] * u[0])),
        },
    }
}

fn example1_rescaled() -> Fixture {
    let base = example1();
    let mut spec = base.spec.clone();
    spec.name = "example1_rescaled".into();
    // The radical section scaled by v1; every gauge-covariant object
    // transforms accordingly and the rotation 1-form picks up -d(log v1).
    spec.radical = Some(exprs(&["v1", "v2", "0", "sqrt(v1^2 - v2^2)", "0"]));
    let points = halton_points(&spec.domain, 8, 96);
    Fixture {
        spec,
        points,
        expect: Expect {
            lambdas: Some(|_| vec![0.0, -1.0]),
            screen_verdict: Some(FitVerdict::Holds),
            screen_factor: None,
            screen_homothetic: Some(false),
            coscreen_killing: Some(false),
            coscreen_verdict: Some(FitVerdict::Refuted),
            irrotational: true,
            tau_vanishes: false,
            totally_geodesic: false,
            totally_umbilical: Some(false),
            cartan_applicable: false,
            two_eigenvalue: Some(VerdictExpect::NotApplicable("not screen homothetic")),
            leaf_curvature: None,
        },
    }
}

fn example1_twisted() -> Fixture {
    let base = example1();
    let mut spec = base.spec.clone();
    spec.name = "example1_twisted".into();
    // Shear the first screen direction by v3 times the radical: still an
    // orthonormal screen, but the induced transversal and its rotation
    // 1-form change, giving a nonvanishing curl to exercise the
    // curvature identities that involve d-tau.
    spec.screen = Some(screen_exprs(&[
        &[
            "v3",
            "(sqrt(v1^2 - v2^2) + v3*v2)/v1",
            "0",
            "(v3*sqrt(v1^2 - v2^2) - v2)/v1",
            "0",
        ],
        &[
            "0",
            "0",
            "sqrt(1 + v3^2)/sqrt(1 + 2*v3^2)",
            "0",
            "v3/sqrt(1 + 2*v3^2)",
        ],
    ]));
    let points = halton_points(&spec.domain, 8, 112);
    Fixture {
        spec,
        points,
        expect: Expect {
            lambdas: Some(|u| vec![0.0, -1.0 / u[0]]),
            screen_verdict: None,
            screen_factor: None,
            screen_homothetic: None,
            coscreen_killing: Some(false),
            coscreen_verdict: Some(FitVerdict::Refuted),
            irrotational: true,
            tau_vanishes: false,
            totally_geodesic: false,
            totally_umbilical: Some(false),
            cartan_applicable: false,
            two_eigenvalue: None,
            leaf_curvature: None,
        },
    }
}

/// Names of the registered fixtures, registry order.
pub fn names() -> Vec<&'static str> {
    vec![
        "example1",
        "example2",
        "example3",
        "plane",
        "null_cone",
        "null_cone_cylinder",
        "example1_rescaled",
        "example1_twisted",
    ]
}

/// Look up one fixture by name.
pub fn get(name: &str) -> Option<Fixture> {
    match name {
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        "example3" => Some(example3()),
        "plane" => Some(plane()),
        "null_cone" => Some(null_cone()),
        "null_cone_cylinder" => Some(null_cone_cylinder()),
        "example1_rescaled" => Some(example1_rescaled()),
        "example1_twisted" => Some(example1_twisted()),
        _ => None,
    }
}

/// All registered fixtures, registry order.
pub fn all() -> Vec<Fixture> {
    names()
        .into_iter()
        .map(|n| get(n).expect("registered name"))
        .collect()
}

impl Expect {
    /// Compare a measured classification against the known fragments.
    /// Unset fields are skipped.
    pub fn check(&self, cls: &Classification) -> Vec<ExpectationResult> {
        let mut out = Vec::new();
        let mut push = |name: &str, pass: bool, detail: String| {
            out.push(ExpectationResult {
                name: name.to_string(),
                pass,
                detail,
            });
        };

        if let Some(formula) = self.lambdas {
            let mut worst = 0.0f64;
            for (u, row) in cls.points.iter().zip(cls.eigen.per_point.iter()) {
                let want = formula(u);
                for (got, expect) in row.iter().zip(want.iter()) {
                    let defect = (got - expect).abs() / (1.0 + expect.abs());
                    worst = worst.max(defect);
                }
            }
            push(
                "principal_curvature_formula",
                worst < 1e-6,
                format!("worst relative defect {worst:.3e}"),
            );
        }
        if let Some(v) = self.screen_verdict {
            push(
                "screen_conformal_verdict",
                cls.screen_conformal.verdict == v,
                format!("{:?} (want {v:?})", cls.screen_conformal.verdict),
            );
        }
        if let Some(phi) = self.screen_factor {
            let mean = cls.screen_conformal.factor_mean;
            let stdev = cls.screen_conformal.factor_stdev;
            push(
                "screen_conformal_factor",
                (mean - phi).abs() < 1e-6 && stdev < 1e-6,
                format!("factor {mean:.9} +- {stdev:.3e} (want {phi})"),
            );
        }
        if let Some(h) = self.screen_homothetic {
            push(
                "screen_homothetic",
                cls.screen_homothetic == h,
                format!("{} (want {h})", cls.screen_homothetic),
            );
        }
        if let Some(k) = self.coscreen_killing {
            push(
                "coscreen_killing",
                cls.coscreen.killing == k,
                format!(
                    "{} with max |D| = {:.3e} (want {k})",
                    cls.coscreen.killing, cls.coscreen.killing_defect
                ),
            );
        }
        if let Some(v) = self.coscreen_verdict {
            push(
                "coscreen_conformal_verdict",
                cls.coscreen.conformal.verdict == v,
                format!("{:?} (want {v:?})", cls.coscreen.conformal.verdict),
            );
        }
        push(
            "irrotational",
            cls.irrotational == self.irrotational,
            format!("{} (want {})", cls.irrotational, self.irrotational),
        );
        push(
            "tau_vanishes",
            cls.tau_vanishes == self.tau_vanishes,
            format!("{} (want {})", cls.tau_vanishes, self.tau_vanishes),
        );
        push(
            "totally_geodesic",
            cls.totally_geodesic == self.totally_geodesic,
            format!("{} (want {})", cls.totally_geodesic, self.totally_geodesic),
        );
        if let Some(u) = self.totally_umbilical {
            push(
                "totally_umbilical",
                cls.totally_umbilical == u,
                format!("{} (want {u})", cls.totally_umbilical),
            );
        }
        push(
            "cartan_hypotheses",
            cls.cartan_applicable == self.cartan_applicable,
            format!(
                "{} (want {})",
                cls.cartan_applicable, self.cartan_applicable
            ),
        );
        match self.two_eigenvalue {
            Some(VerdictExpect::Applicable) => {
                let (pass, detail) = match &cls.two_eigenvalue {
                    TwoEigenvalueVerdict::Applicable { min_abs } => {
                        (*min_abs < 1e-6, format!("min |lambda| = {min_abs:.3e}"))
                    }
                    other => (false, other.to_string()),
                };
                push("two_eigenvalue_verdict", pass, detail);
            }
            Some(VerdictExpect::NotApplicable(reason)) => {
                let want = format!("not applicable: {reason}");
                let got = cls.two_eigenvalue.to_string();
                push(
                    "two_eigenvalue_verdict",
                    got == want,
                    format!("{got} (want {want})"),
                );
            }
            None => {}
        }
        out
    }
}

/// Deterministic random half-lightlike spec: a null cone over a sphere
/// times a strictly monotone graph coordinate and a constant, with the
/// spatial coordinates scrambled by a random rotation. The radical is
/// rank 1 by construction for every parameter draw.
pub fn random_spec(seed: u64) -> ImmersionSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m: usize = if rng.gen_bool(0.5) { 3 } else { 4 };

    let mut spatial: Vec<String> = Vec::new();
    let domain: Vec<(f64, f64)>;
    let lo1 = rng.gen_range(0.8..2.0);
    let span1 = rng.gen_range(0.5..1.5);
    if m == 3 {
        spatial.push("v1*cos(v2)".to_string());
        spatial.push("v1*sin(v2)".to_string());
        domain = vec![(lo1, lo1 + span1), (0.3, 2.2), (-1.0, 1.0)];
    } else {
        spatial.push("v1*sin(v2)*cos(v3)".to_string());
        spatial.push("v1*sin(v2)*sin(v3)".to_string());
        spatial.push("v1*cos(v2)".to_string());
        domain = vec![(lo1, lo1 + span1), (0.45, 2.6), (0.3, 1.9), (-1.0, 1.0)];
    }
    let a = rng.gen_range(0.5..2.0);
    let graph = match rng.gen_range(0..3) {
        0 => {
            let b = rng.gen_range(0.2..1.5);
            format!("({a:.17e})*v{m} + ({b:.17e})*v{m}^3")
        }
        1 => {
            let s = rng.gen_range(0.4..1.2);
            format!("({a:.17e})*exp(({s:.17e})*v{m})")
        }
        _ => format!("({a:.17e})*v{m}"),
    };
    spatial.push(graph);
    spatial.push(format!("({:.17e})", rng.gen_range(-2.0..2.0)));

    // Random orthogonal matrix on the spatial coordinates; the time
    // coordinate stays fixed so the signature is untouched.
    let n = spatial.len();
    let raw = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0f64));
    let q = raw.qr().q();

    let mut components = vec!["v1".to_string()];
    for i in 0..n {
        let terms: Vec<String> = (0..n)
            .map(|j| format!("({:.17e})*({})", q[(i, j)], spatial[j]))
            .collect();
        components.push(terms.join(" + "));
    }

    ImmersionSpec {
        name: format!("random_{seed}"),
        chart_dim: m,
        signature: None,
        components: components
            .iter()
            .map(|s| parse(s).expect("generated expression must parse"))
            .collect(),
        domain,
        radical: None,
        screen: None,
        coscreen: None,
        k: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify;
    use crate::framing::build_frame;
    use crate::gauss_weingarten::induced_objects;
    use approx::assert_relative_eq;

    #[test]
    fn registry_lookup_and_unknown_name() {
        assert_eq!(names().len(), 8);
        assert!(get("example1").is_some());
        assert!(get("nope").is_none());
        for fixture in all() {
            assert!(!fixture.points.is_empty());
            fixture.spec.validate().expect("fixture spec valid");
        }
    }

    #[test]
    fn every_fixture_builds_frames_at_default_points() {
        for fixture in all() {
            for u in &fixture.points {
                build_frame(&fixture.spec, u).unwrap_or_else(|e| {
                    panic!("{} at {u:?}: {e}", fixture.spec.name);
                });
            }
        }
    }

    #[test]
    fn fixture_classifications_match_expectations() {
        for fixture in all() {
            let cls = classify(&fixture.spec, &fixture.points).expect("classify");
            for result in fixture.expect.check(&cls) {
                assert!(
                    result.pass,
                    "{}: {} failed: {}",
                    fixture.spec.name, result.name, result.detail
                );
            }
        }
    }

    #[test]
    fn example2_default_screen_matches_printed_frame() {
        let fixture = get("example2").unwrap();
        let mut bare = fixture.spec.clone();
        bare.radical = None;
        bare.screen = None;
        bare.coscreen = None;
        let u = &fixture.points[0];
        let with_overrides = build_frame(&fixture.spec, u).unwrap();
        let default = build_frame(&bare, u).unwrap();
        for (w_default, w_printed) in default.screen.iter().zip(with_overrides.screen.iter()) {
            let diff = (w_default - w_printed).amax();
            assert!(diff < 1e-9, "screen mismatch {diff}");
        }
        assert!((default.coscreen.clone() - with_overrides.coscreen.clone()).amax() < 1e-9);
    }

    #[test]
    fn example3_coscreen_form_matches_direct_computation() {
        let fixture = get("example3").unwrap();
        // Points with v3 = 0 sit at the end of the default sample.
        let u = fixture.points.last().unwrap();
        assert_eq!(u[2], 0.0);
        let fp = build_frame(&fixture.spec, u).unwrap();
        let objs = induced_objects(&fixture.spec, &fp).unwrap();
        // The unit co-screen direction gives D(V3, V3) = -2/x1 where V3
        // is the unit tangent along v3.
        let t3 = nalgebra::DVector::from_column_slice(&[0.0, 0.0, 1.0, 0.0]);
        let g33 = objs.g_of(&t3, &t3);
        let d_unit = objs.d_of(&t3, &t3) / g33;
        assert_relative_eq!(d_unit, -2.0 / u[0], max_relative = 1e-9);
    }

    #[test]
    fn random_specs_are_deterministic_and_buildable() {
        let a = random_spec(7);
        let b = random_spec(7);
        assert_eq!(a.to_json(), b.to_json());
        for seed in 0..20 {
            let spec = random_spec(seed);
            spec.validate().expect("random spec valid");
            for u in halton_points(&spec.domain, 2, seed) {
                build_frame(&spec, &u).unwrap_or_else(|e| {
                    panic!("random_{seed} at {u:?}: {e}");
                });
            }
        }
    }
}
