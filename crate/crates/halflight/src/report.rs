//! Aggregated verification reports over sample points.
//!
//! A report runs the selected residual suites at every sample point,
//! grades each residual against the active tolerance for its tier, and
//! carries the sampled classification when requested. The JSON form is
//! the schema-stable machine interface; the text form is a readable
//! projection of the same numbers.

use nalgebra::DVector;
use serde::Serialize;

use crate::classify::{cartan_sums, classify, Classification};
use crate::curvature::{curvature_data, curvature_residuals, ricci_residuals};
use crate::error::FrameError;
use crate::framing::{build_frame, frame_derivatives, DerivRoute, FramePoint, ImmersionSpec};
use crate::gauss_weingarten::{induced_objects, structure_residuals, NamedResidual};
use crate::tolerances::{Tier, Tolerances};

/// Residual suites a report can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// Frame pairing conditions and bundle decompositions.
    Frames,
    /// Induced-object structure identities at each point.
    Induced,
    /// Curvature, Ricci, and connection compatibility identities.
    Curvature,
    /// Principal-curvature sum invariants.
    Cartan,
    /// Sampled geometric classification.
    Classify,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Frames => "frames",
            Suite::Induced => "induced",
            Suite::Curvature => "curvature",
            Suite::Cartan => "cartan",
            Suite::Classify => "classify",
        }
    }

    pub fn parse(text: &str) -> Option<Suite> {
        match text {
            "frames" => Some(Suite::Frames),
            "induced" => Some(Suite::Induced),
            "curvature" => Some(Suite::Curvature),
            "cartan" => Some(Suite::Cartan),
            "classify" => Some(Suite::Classify),
            _ => None,
        }
    }

    pub fn all() -> Vec<Suite> {
        vec![
            Suite::Frames,
            Suite::Induced,
            Suite::Curvature,
            Suite::Cartan,
            Suite::Classify,
        ]
    }
}

/// One graded residual.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualItem {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub tier: Tier,
    /// Informational residuals are reported but never gate a verdict.
    pub informational: bool,
}

impl ResidualItem {
    fn grade(named: NamedResidual, tols: &Tolerances) -> ResidualItem {
        let tolerance = tols.for_tier(named.tier);
        ResidualItem {
            pass: named.informational || named.value <= tolerance,
            name: named.name,
            value: named.value,
            tolerance,
            tier: named.tier,
            informational: named.informational,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub items: Vec<ResidualItem>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub point: Vec<f64>,
    pub route: DerivRoute,
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub spec_name: String,
    pub chart_dim: usize,
    pub ambient_dim: usize,
    pub k: f64,
    pub suites: Vec<Suite>,
    pub tolerances: Tolerances,
    pub points: Vec<PointReport>,
    pub classification: Option<Classification>,
    pub pass: bool,
    pub failures: Vec<String>,
}

/// Residuals of the defining frame conditions at one point: the nine
/// pairing constraints on (ξ, W_a, L, N) and the tangent and ambient
/// bundle decompositions induced by the frame.
pub fn frame_invariants(spec: &ImmersionSpec, fp: &FramePoint) -> Vec<NamedResidual> {
    let space = spec.ambient();
    let m = fp.chart_dim();
    let n = fp.ambient_dim();
    let t = Tier::Algebraic;
    let mut out = Vec::new();

    out.push(NamedResidual::new(
        "radical_null",
        space.norm2(&fp.xi).abs(),
        t,
    ));
    out.push(NamedResidual::new(
        "transversal_null",
        space.norm2(&fp.transversal).abs(),
        t,
    ));
    out.push(NamedResidual::new(
        "radical_transversal_pairing",
        (space.inner(&fp.xi, &fp.transversal) - 1.0).abs(),
        t,
    ));
    let mut w_orth = 0.0f64;
    for (a, wa) in fp.screen.iter().enumerate() {
        for (b, wb) in fp.screen.iter().enumerate() {
            let want = if a == b { 1.0 } else { 0.0 };
            w_orth = w_orth.max((space.inner(wa, wb) - want).abs());
        }
    }
    out.push(NamedResidual::new("screen_orthonormal", w_orth, t));
    let mut w_xi = 0.0f64;
    let mut w_n = 0.0f64;
    let mut w_l = 0.0f64;
    for wa in &fp.screen {
        w_xi = w_xi.max(space.inner(wa, &fp.xi).abs());
        w_n = w_n.max(space.inner(wa, &fp.transversal).abs());
        w_l = w_l.max(space.inner(wa, &fp.coscreen).abs());
    }
    out.push(NamedResidual::new("screen_radical_orthogonal", w_xi, t));
    out.push(NamedResidual::new("screen_transversal_orthogonal", w_n, t));
    out.push(NamedResidual::new("coscreen_screen_orthogonal", w_l, t));
    out.push(NamedResidual::new(
        "coscreen_unit",
        (space.norm2(&fp.coscreen) - 1.0).abs(),
        t,
    ));
    out.push(NamedResidual::new(
        "coscreen_radical_orthogonal",
        space.inner(&fp.coscreen, &fp.xi).abs(),
        t,
    ));
    out.push(NamedResidual::new(
        "coscreen_transversal_orthogonal",
        space.inner(&fp.coscreen, &fp.transversal).abs(),
        t,
    ));

    // Tangent splitting: T_i = η(T_i) ξ + Σ_a g(T_i, W_a) W_a.
    let mut tangent_split = 0.0f64;
    for i in 0..m {
        let t_i = fp.jet.d1[i].clone();
        let mut recon = &fp.xi * fp.eta[i];
        for wa in &fp.screen {
            recon += wa * space.inner(&t_i, wa);
        }
        tangent_split = tangent_split.max((t_i - recon).amax());
    }
    out.push(NamedResidual::new(
        "tangent_bundle_splitting",
        tangent_split,
        t,
    ));

    // Full ambient decomposition: every ambient vector expands in
    // {W_a, L, ξ, N} with the dual pairings as coefficients.
    let mut completeness = 0.0f64;
    for kk in 0..n {
        let mut e = DVector::zeros(n);
        e[kk] = 1.0;
        let mut recon = DVector::zeros(n);
        for wa in &fp.screen {
            recon += wa * space.inner(&e, wa);
        }
        recon += &fp.coscreen * space.inner(&e, &fp.coscreen);
        recon += &fp.xi * space.inner(&e, &fp.transversal);
        recon += &fp.transversal * space.inner(&e, &fp.xi);
        completeness = completeness.max((e - recon).amax());
    }
    out.push(NamedResidual::new(
        "ambient_frame_completeness",
        completeness,
        t,
    ));
    out
}

/// Run the selected suites on the spec at the given points.
pub fn run_report(
    spec: &ImmersionSpec,
    points: &[Vec<f64>],
    suites: &[Suite],
    tols: &Tolerances,
) -> Result<Report, FrameError> {
    if points.is_empty() {
        return Err(FrameError::InvalidSpec(
            "report needs at least one sample point".into(),
        ));
    }
    let needs_classification = suites
        .iter()
        .any(|s| matches!(s, Suite::Classify | Suite::Cartan));
    let classification = if needs_classification {
        Some(classify(spec, points)?)
    } else {
        None
    };
    let cartan_gates = classification
        .as_ref()
        .map(|c| c.cartan_applicable)
        .unwrap_or(false);

    let mut point_reports = Vec::with_capacity(points.len());
    let mut failures = Vec::new();
    let mut ambient_dim = 0;
    for u in points {
        let fp = build_frame(spec, u)?;
        ambient_dim = fp.ambient_dim();
        let objs = induced_objects(spec, &fp)?;
        let mut suite_reports = Vec::new();
        for &suite in suites {
            let named = match suite {
                Suite::Frames => frame_invariants(spec, &fp),
                Suite::Induced => {
                    let fd = frame_derivatives(spec, &fp)?;
                    structure_residuals(&spec.ambient(), &objs, &fd)
                }
                Suite::Curvature => {
                    let curv = curvature_data(spec, &objs)?;
                    let mut named = curvature_residuals(&objs, &curv, spec.k);
                    named.extend(ricci_residuals(&objs, &curv, spec.k));
                    named
                }
                Suite::Cartan => {
                    let sums = cartan_sums(&objs, spec.k);
                    sums.iter()
                        .enumerate()
                        .map(|(i, s)| {
                            let name = format!("cartan_sum_{}", i + 1);
                            if cartan_gates {
                                NamedResidual::new(&name, s.abs(), Tier::TwoFd)
                            } else {
                                NamedResidual::info(&name, s.abs(), Tier::TwoFd)
                            }
                        })
                        .collect()
                }
                Suite::Classify => Vec::new(),
            };
            let items: Vec<ResidualItem> = named
                .into_iter()
                .map(|n| ResidualItem::grade(n, tols))
                .collect();
            let pass = items.iter().all(|i| i.pass);
            if !pass {
                for item in items.iter().filter(|i| !i.pass) {
                    failures.push(format!(
                        "{} at {:?}: {} = {:.3e} > {:.1e}",
                        suite.name(),
                        u,
                        item.name,
                        item.value,
                        item.tolerance
                    ));
                }
            }
            suite_reports.push(SuiteReport {
                suite,
                items,
                pass,
            });
        }
        let pass = suite_reports.iter().all(|s| s.pass);
        point_reports.push(PointReport {
            point: u.clone(),
            route: objs.route,
            suites: suite_reports,
            pass,
        });
    }

    let pass = point_reports.iter().all(|p| p.pass);
    Ok(Report {
        spec_name: spec.name.clone(),
        chart_dim: spec.chart_dim,
        ambient_dim,
        k: spec.k,
        suites: suites.to_vec(),
        tolerances: *tols,
        points: point_reports,
        classification,
        pass,
        failures,
    })
}

fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "n/a".to_string()
    } else {
        format!("{x:.6}")
    }
}

/// Render a report as human-readable text. Same numbers as the JSON
/// form, one residual per line.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "spec {} (chart dim {}, ambient dim {}, k = {})\n",
        report.spec_name, report.chart_dim, report.ambient_dim, report.k
    ));
    for pr in &report.points {
        let coords: Vec<String> = pr.point.iter().map(|c| format!("{c:.6}")).collect();
        out.push_str(&format!(
            "point [{}] route {:?}\n",
            coords.join(", "),
            pr.route
        ));
        for sr in &pr.suites {
            if sr.items.is_empty() {
                continue;
            }
            out.push_str(&format!("  [{}]\n", sr.suite.name()));
            for item in &sr.items {
                let mark = if item.informational {
                    "info"
                } else if item.pass {
                    "pass"
                } else {
                    "FAIL"
                };
                out.push_str(&format!(
                    "    {mark}  {:<38} {:>12.3e}  (tol {:.1e})\n",
                    item.name, item.value, item.tolerance
                ));
            }
        }
    }
    if let Some(cls) = &report.classification {
        out.push_str("classification\n");
        out.push_str(&format!(
            "  screen conformal: {:?} (factor {} +- {:.3e}), homothetic: {}\n",
            cls.screen_conformal.verdict,
            fmt_float(cls.screen_conformal.factor_mean),
            cls.screen_conformal.factor_stdev,
            cls.screen_homothetic
        ));
        out.push_str(&format!(
            "  co-screen: killing {} (max |D| {:.3e}), conformal {:?}, closed conformal {}\n",
            cls.coscreen.killing,
            cls.coscreen.killing_defect,
            cls.coscreen.conformal.verdict,
            cls.coscreen.closed_conformal
        ));
        let groups: Vec<String> = cls
            .eigen
            .group_means
            .iter()
            .zip(cls.eigen.group_multiplicities.iter())
            .map(|(mean, mult)| format!("{} (x{mult})", fmt_float(*mean)))
            .collect();
        out.push_str(&format!(
            "  principal curvatures: [{}], constant along screen: {}\n",
            groups.join(", "),
            cls.eigen.constant_along_screen
        ));
        out.push_str(&format!(
            "  irrotational: {}, tau vanishes: {}, totally geodesic: {}, totally umbilical: {}\n",
            cls.irrotational, cls.tau_vanishes, cls.totally_geodesic, cls.totally_umbilical
        ));
        out.push_str(&format!(
            "  moduli sum hypotheses: {}\n",
            cls.cartan_applicable
        ));
        out.push_str(&format!("  two-eigenvalue: {}\n", cls.two_eigenvalue));
    }
    let verdict = if report.pass { "PASS" } else { "FAIL" };
    out.push_str(&format!("summary: {verdict}"));
    if !report.failures.is_empty() {
        out.push_str(&format!(" ({} failure(s))", report.failures.len()));
        for f in &report.failures {
            out.push_str(&format!("\n  {f}"));
        }
    }
    out.push('\n');
    out
}
