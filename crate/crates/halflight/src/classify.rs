//! Geometric classification of a sampled immersion.
//!
//! Every quantity here is measured, not assumed: screen principal
//! curvatures and their grouping, proportionality fits for the two
//! transversal shape operators, co-screen behaviour (Killing, conformal,
//! closed conformal), rotation-form and irrotationality flags, and the
//! hypothesis checklist for the vanishing-curvature verdict. The
//! functions work pointwise on [`InducedObjects`] and aggregate over a
//! sample of chart points.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::curvature::principal_sums;
use crate::error::FrameError;
use crate::framing::{build_frame, build_frame_aligned, FramePoint, ImmersionSpec};
use crate::gauss_weingarten::{induced_objects, InducedObjects};
use crate::semi_euclidean::symmetric_eigen;
use crate::tolerances::{
    CONFORMAL_FIT, CONFORMAL_REFUTED, CONSTANCY_REL, EIGEN_GROUP, EIGEN_SCREEN_DERIV, FD_STEP,
    KILLING_TOL,
};

/// Absolute bound under which a 1-form measured through the frame
/// derivatives counts as vanishing.
pub const FORM_VANISHES: f64 = 1e-6;

/// Raw pointwise measurements feeding the aggregate classification.
#[derive(Debug, Clone, Serialize)]
pub struct PointClassification {
    pub u: Vec<f64>,
    /// Screen principal curvatures, descending.
    pub lambdas: Vec<f64>,
    /// Least-squares factor in `C ≈ φ B` on the screen block, NaN when
    /// `B` vanishes there.
    pub screen_factor: f64,
    /// Relative residual of that fit.
    pub screen_defect: f64,
    /// Least-squares factor in `B ≈ H₁ g` on the screen block.
    pub umbilic_b_factor: f64,
    pub umbilic_b_defect: f64,
    /// Least-squares factor in `D ≈ H₂ g` on the screen block.
    pub umbilic_d_factor: f64,
    pub umbilic_d_defect: f64,
    /// `max |D_ij|` over the chart; zero means the co-screen direction
    /// generates a metric symmetry.
    pub coscreen_killing: f64,
    /// Least-squares factor in `D ≈ -σ g` on the screen block.
    pub coscreen_sigma: f64,
    pub coscreen_defect: f64,
    /// `max |ρ_i + σ η_i|`, the closedness defect of the co-screen
    /// conformal structure.
    pub closed_defect: f64,
    /// `max(|φ|, |D(·, ξ)|)`; zero means the radical stays tangent under
    /// ambient differentiation.
    pub irrotational_defect: f64,
    pub tau_max: f64,
    pub b_max: f64,
}

/// Outcome of a proportionality fit aggregated over sample points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FitVerdict {
    Holds,
    Refuted,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub factor_mean: f64,
    pub factor_stdev: f64,
    pub max_defect: f64,
    pub verdict: FitVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoscreenReport {
    pub killing_defect: f64,
    pub killing: bool,
    /// Fit of `D ≈ -σ g`; the factor is `σ`.
    pub conformal: FitSummary,
    pub closed_defect: f64,
    pub closed_conformal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenReport {
    /// Principal curvatures at each sample point, descending.
    pub per_point: Vec<Vec<f64>>,
    /// Largest screen-directional eigenvalue derivative at each point.
    pub per_point_screen_derivative: Vec<f64>,
    /// Same group structure (count and multiplicities) at every point.
    pub stable_grouping: bool,
    pub group_count: usize,
    /// Pooled group means, ascending; empty when the grouping is not
    /// stable across points.
    pub group_means: Vec<f64>,
    pub group_multiplicities: Vec<usize>,
    /// Largest deviation of a per-point group mean from its pooled mean.
    pub group_spread: f64,
    pub globally_constant: bool,
    /// Largest directional derivative of a principal curvature along a
    /// screen direction, over all points and directions.
    pub max_screen_derivative: f64,
    pub constant_along_screen: bool,
    /// Smallest pooled |group mean|, NaN when unstable.
    pub min_abs_mean: f64,
}

/// Verdict of the statement: a screen-homothetic half-lightlike
/// submanifold with conformal co-screen in a flat or negatively curved
/// ambient, carrying two distinct screen principal curvatures constant
/// along the screen, must have one of them zero.
#[derive(Debug, Clone, Serialize)]
pub enum TwoEigenvalueVerdict {
    Applicable { min_abs: f64 },
    NotApplicable { reason: String },
}

impl fmt::Display for TwoEigenvalueVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwoEigenvalueVerdict::Applicable { min_abs } => {
                write!(f, "applicable: min |principal curvature| = {min_abs:.3e}")
            }
            TwoEigenvalueVerdict::NotApplicable { reason } => {
                write!(f, "not applicable: {reason}")
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub points: Vec<Vec<f64>>,
    pub per_point: Vec<PointClassification>,
    /// Fit of `C ≈ φ B` on the screen; `Holds` with constant factor is
    /// the screen-homothetic case.
    pub screen_conformal: FitSummary,
    /// Mean conformal factor of that fit (NaN if never determined).
    pub phi: f64,
    pub screen_homothetic: bool,
    pub coscreen: CoscreenReport,
    /// Fit of `B ≈ H₁ g` on the screen.
    pub umbilic_b: FitSummary,
    /// Fit of `D ≈ H₂ g` on the screen.
    pub umbilic_d: FitSummary,
    pub eigen: EigenReport,
    pub irrotational: bool,
    pub tau_vanishes: bool,
    pub totally_geodesic: bool,
    pub totally_umbilical: bool,
    pub two_eigenvalue: TwoEigenvalueVerdict,
    /// Hypotheses of the principal-curvature cross-sum identity hold:
    /// irrotational, vanishing rotation form, curvatures constant along
    /// the screen.
    pub cartan_applicable: bool,
}

/// Least-squares factor and relative defect of `sample ≈ factor * reference`.
///
/// A vanishing reference gives a NaN factor; the defect is then zero when
/// the sample also vanishes and infinite otherwise.
pub fn proportionality_fit(sample: &DMatrix<f64>, reference: &DMatrix<f64>) -> (f64, f64) {
    let rr = reference.dot(reference);
    let scale = rr.sqrt();
    if scale <= 1e-13 {
        if sample.norm() <= 1e-13 {
            return (f64::NAN, 0.0);
        }
        return (f64::NAN, f64::INFINITY);
    }
    let factor = sample.dot(reference) / rr;
    let defect = (sample - reference * factor).norm() / scale;
    (factor, defect)
}

/// Restrict a chart bilinear form to the screen basis.
fn screen_block(fp: &FramePoint, form: &DMatrix<f64>) -> DMatrix<f64> {
    let r = fp.screen_chart.len();
    DMatrix::from_fn(r, r, |a, b| {
        (form * &fp.screen_chart[b]).dot(&fp.screen_chart[a])
    })
}

/// `C(W_a, W_b)` from the stored `C(T_i, W_b)` table.
fn c_screen_block(objs: &InducedObjects) -> DMatrix<f64> {
    let fp = &objs.frame;
    let r = fp.screen_chart.len();
    DMatrix::from_fn(r, r, |a, b| {
        objs.trans.c_screen.column(b).dot(&fp.screen_chart[a])
    })
}

/// Screen principal curvatures (descending) with their directions in
/// chart coordinates. These are the eigenvalues of the radical shape
/// operator restricted to the screen, computed from the symmetric matrix
/// `B(W_a, W_b)` on the orthonormal screen basis.
pub fn principal_directions(objs: &InducedObjects) -> (Vec<f64>, Vec<DVector<f64>>) {
    let fp = &objs.frame;
    let b_wb = screen_block(fp, &objs.alg.b);
    let (eigenvalues, eigenvectors) = symmetric_eigen(&b_wb);
    let r = eigenvalues.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| eigenvalues[b].total_cmp(&eigenvalues[a]));
    let mut lambdas = Vec::with_capacity(r);
    let mut dirs = Vec::with_capacity(r);
    for &idx in &order {
        lambdas.push(eigenvalues[idx]);
        let coeffs = eigenvectors.column(idx);
        let mut chart = DVector::zeros(fp.chart_dim());
        for a in 0..r {
            chart += &fp.screen_chart[a] * coeffs[a];
        }
        dirs.push(chart);
    }
    (lambdas, dirs)
}

/// Matrix `g(A x_i, x_j)` of a chart-valued operator on a list of chart
/// directions.
pub fn shape_in_basis(
    objs: &InducedObjects,
    dirs: &[DVector<f64>],
    op: &DMatrix<f64>,
) -> DMatrix<f64> {
    let gram = &objs.frame.gram;
    let r = dirs.len();
    DMatrix::from_fn(r, r, |i, j| (gram * (op * &dirs[i])).dot(&dirs[j]))
}

/// Cross-sums of the principal curvature identity at one point, one per
/// screen principal direction.
pub fn cartan_sums(objs: &InducedObjects, k: f64) -> Vec<f64> {
    let (lambdas, dirs) = principal_directions(objs);
    let a_n_ee = shape_in_basis(objs, &dirs, &objs.trans.a_n);
    let a_l_ee = shape_in_basis(objs, &dirs, &objs.trans.a_l);
    principal_sums(k, &lambdas, &a_n_ee, &a_l_ee, EIGEN_GROUP)
}

/// Group sorted eigenvalues by relative gaps; returns `(mean, count)`
/// per group in the input order.
pub fn group_eigenvalues(lambdas: &[f64]) -> Vec<(f64, usize)> {
    let mut groups = Vec::new();
    if lambdas.is_empty() {
        return groups;
    }
    let mut start = 0;
    for i in 1..=lambdas.len() {
        let split = i == lambdas.len()
            || (lambdas[i] - lambdas[i - 1]).abs() > EIGEN_GROUP * (1.0 + lambdas[i].abs());
        if split {
            let slice = &lambdas[start..i];
            let mean = slice.iter().sum::<f64>() / slice.len() as f64;
            groups.push((mean, slice.len()));
            start = i;
        }
    }
    groups
}

/// All pointwise measurements at one frame point.
pub fn classify_point(objs: &InducedObjects) -> PointClassification {
    let fp = &objs.frame;
    let m = fp.chart_dim();
    let (lambdas, _) = principal_directions(objs);

    let b_wb = screen_block(fp, &objs.alg.b);
    let c_wb = c_screen_block(objs);
    let d_wb = screen_block(fp, &objs.alg.d);
    let g_wb = DMatrix::identity(m - 1, m - 1);

    let (screen_factor, screen_defect) = proportionality_fit(&c_wb, &b_wb);
    let (umbilic_b_factor, umbilic_b_defect) = proportionality_fit(&b_wb, &g_wb);
    let (umbilic_d_factor, umbilic_d_defect) = proportionality_fit(&d_wb, &g_wb);
    let coscreen_sigma = -umbilic_d_factor;
    let coscreen_defect = umbilic_d_defect;

    let mut closed_defect = 0.0f64;
    for i in 0..m {
        closed_defect = closed_defect.max((objs.trans.rho[i] + coscreen_sigma * fp.eta[i]).abs());
    }

    let d_xi = &objs.alg.d * &fp.xi_chart;
    let mut irrotational_defect = 0.0f64;
    for i in 0..m {
        irrotational_defect = irrotational_defect
            .max(objs.trans.phi[i].abs())
            .max(d_xi[i].abs());
    }

    PointClassification {
        u: fp.u.clone(),
        lambdas,
        screen_factor,
        screen_defect,
        umbilic_b_factor,
        umbilic_b_defect,
        umbilic_d_factor,
        umbilic_d_defect,
        coscreen_killing: objs.alg.d.amax(),
        coscreen_sigma,
        coscreen_defect,
        closed_defect,
        irrotational_defect,
        tau_max: objs.trans.tau.amax(),
        b_max: objs.alg.b.amax(),
    }
}

/// Largest directional derivative of any screen principal curvature
/// along any screen direction at this point, by central differences.
pub fn eigen_screen_derivative(
    spec: &ImmersionSpec,
    fp: &FramePoint,
) -> Result<f64, FrameError> {
    let m = fp.chart_dim();
    let base = FD_STEP * (1.0 + fp.u.iter().fold(0.0f64, |acc, x| acc.max(x.abs())));
    let mut worst = 0.0f64;
    for w in &fp.screen_chart {
        let mut t = base;
        for i in 0..m {
            if w[i].abs() < 1e-14 {
                continue;
            }
            let room = 0.9
                * f64::min(fp.u[i] - spec.domain[i].0, spec.domain[i].1 - fp.u[i])
                / w[i].abs();
            t = t.min(room);
        }
        if t <= 0.0 {
            return Err(FrameError::StencilOutsideDomain {
                point: fp.u.clone(),
                h: t,
            });
        }
        let lambdas_at = |s: f64| -> Result<Vec<f64>, FrameError> {
            let mut v = fp.u.clone();
            for i in 0..m {
                v[i] += s * w[i];
            }
            let shifted = build_frame_aligned(spec, &v, fp)?;
            let objs = induced_objects(spec, &shifted)?;
            Ok(principal_directions(&objs).0)
        };
        let plus = lambdas_at(t)?;
        let minus = lambdas_at(-t)?;
        for (p, q) in plus.iter().zip(minus.iter()) {
            worst = worst.max(((p - q) / (2.0 * t)).abs());
        }
    }
    Ok(worst)
}

fn summarize_fit(samples: &[(f64, f64)]) -> FitSummary {
    let finite: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(factor, _)| factor.is_finite())
        .collect();
    if finite.is_empty() {
        let max_defect = samples.iter().fold(0.0f64, |acc, &(_, d)| acc.max(d));
        return FitSummary {
            factor_mean: f64::NAN,
            factor_stdev: f64::NAN,
            max_defect,
            verdict: if max_defect > CONFORMAL_REFUTED {
                FitVerdict::Refuted
            } else {
                FitVerdict::Inconclusive
            },
        };
    }
    let n = finite.len() as f64;
    let mean = finite.iter().map(|&(f, _)| f).sum::<f64>() / n;
    let var = finite.iter().map(|&(f, _)| (f - mean) * (f - mean)).sum::<f64>() / n;
    let max_defect = finite.iter().fold(0.0f64, |acc, &(_, d)| acc.max(d));
    let verdict = if max_defect < CONFORMAL_FIT {
        FitVerdict::Holds
    } else if max_defect > CONFORMAL_REFUTED {
        FitVerdict::Refuted
    } else {
        FitVerdict::Inconclusive
    };
    FitSummary {
        factor_mean: mean,
        factor_stdev: var.sqrt(),
        max_defect,
        verdict,
    }
}

fn eigen_report(per_point: Vec<Vec<f64>>, screen_derivatives: Vec<f64>) -> EigenReport {
    let max_screen_derivative = screen_derivatives.iter().fold(0.0f64, |a, &d| a.max(d));
    let grouped: Vec<Vec<(f64, usize)>> = per_point
        .iter()
        .map(|l| group_eigenvalues(l))
        .collect();
    let shape: Vec<usize> = grouped[0].iter().map(|&(_, c)| c).collect();
    let stable = grouped
        .iter()
        .all(|g| g.iter().map(|&(_, c)| c).collect::<Vec<_>>() == shape);
    let (group_means, group_multiplicities, group_spread, globally_constant, min_abs_mean) =
        if stable {
            let count = shape.len();
            let mut means = vec![0.0f64; count];
            for g in &grouped {
                for (k, &(mean, _)) in g.iter().enumerate() {
                    means[k] += mean;
                }
            }
            for mean in &mut means {
                *mean /= grouped.len() as f64;
            }
            let mut spread = 0.0f64;
            let mut constant = true;
            for g in &grouped {
                for (k, &(mean, _)) in g.iter().enumerate() {
                    let dev = (mean - means[k]).abs();
                    spread = spread.max(dev);
                    if dev > CONSTANCY_REL * (1.0 + means[k].abs()) {
                        constant = false;
                    }
                }
            }
            let min_abs = means.iter().fold(f64::INFINITY, |acc, m| acc.min(m.abs()));
            (means, shape.clone(), spread, constant, min_abs)
        } else {
            (Vec::new(), Vec::new(), f64::NAN, false, f64::NAN)
        };
    EigenReport {
        per_point,
        per_point_screen_derivative: screen_derivatives,
        stable_grouping: stable,
        group_count: if stable { shape.len() } else { 0 },
        group_means,
        group_multiplicities,
        group_spread,
        globally_constant,
        max_screen_derivative,
        constant_along_screen: max_screen_derivative <= EIGEN_SCREEN_DERIV,
        min_abs_mean,
    }
}

fn two_eigenvalue_verdict(
    k: f64,
    screen_homothetic: bool,
    coscreen: &CoscreenReport,
    eigen: &EigenReport,
) -> TwoEigenvalueVerdict {
    if !screen_homothetic {
        return TwoEigenvalueVerdict::NotApplicable {
            reason: "not screen homothetic".to_string(),
        };
    }
    if !(coscreen.killing || coscreen.conformal.verdict == FitVerdict::Holds) {
        return TwoEigenvalueVerdict::NotApplicable {
            reason: "co-screen not conformal".to_string(),
        };
    }
    if !(eigen.stable_grouping && eigen.group_count == 2 && eigen.constant_along_screen) {
        return TwoEigenvalueVerdict::NotApplicable {
            reason: "principal curvatures not two distinct constants along the screen"
                .to_string(),
        };
    }
    if k > 0.0 {
        return TwoEigenvalueVerdict::NotApplicable {
            reason: "positive ambient curvature".to_string(),
        };
    }
    TwoEigenvalueVerdict::Applicable {
        min_abs: eigen.min_abs_mean,
    }
}

/// Classify an immersion over a sample of chart points. Frames at later
/// points are aligned to the first so that the measurements vary
/// continuously across the sample.
pub fn classify(spec: &ImmersionSpec, points: &[Vec<f64>]) -> Result<Classification, FrameError> {
    if points.is_empty() {
        return Err(FrameError::InvalidSpec(
            "classification needs at least one sample point".to_string(),
        ));
    }
    let mut reference: Option<FramePoint> = None;
    let mut per_point = Vec::with_capacity(points.len());
    let mut lambda_rows = Vec::with_capacity(points.len());
    let mut screen_derivatives = Vec::with_capacity(points.len());
    for u in points {
        let fp = match &reference {
            None => build_frame(spec, u)?,
            Some(r) => build_frame_aligned(spec, u, r)?,
        };
        screen_derivatives.push(eigen_screen_derivative(spec, &fp)?);
        let objs = induced_objects(spec, &fp)?;
        let pc = classify_point(&objs);
        lambda_rows.push(pc.lambdas.clone());
        per_point.push(pc);
        if reference.is_none() {
            reference = Some(objs.frame.clone());
        }
    }

    let screen_conformal = summarize_fit(
        &per_point
            .iter()
            .map(|p| (p.screen_factor, p.screen_defect))
            .collect::<Vec<_>>(),
    );
    let screen_homothetic = screen_conformal.verdict == FitVerdict::Holds
        && screen_conformal.factor_stdev
            <= CONSTANCY_REL * (1.0 + screen_conformal.factor_mean.abs());

    let killing_defect = per_point
        .iter()
        .fold(0.0f64, |acc, p| acc.max(p.coscreen_killing));
    let conformal = summarize_fit(
        &per_point
            .iter()
            .map(|p| (p.coscreen_sigma, p.coscreen_defect))
            .collect::<Vec<_>>(),
    );
    let closed_defect = per_point
        .iter()
        .fold(0.0f64, |acc, p| acc.max(p.closed_defect));
    let coscreen = CoscreenReport {
        killing_defect,
        killing: killing_defect <= KILLING_TOL,
        closed_conformal: (killing_defect <= KILLING_TOL
            || conformal.verdict == FitVerdict::Holds)
            && closed_defect <= FORM_VANISHES,
        conformal,
        closed_defect,
    };

    let umbilic_b = summarize_fit(
        &per_point
            .iter()
            .map(|p| (p.umbilic_b_factor, p.umbilic_b_defect))
            .collect::<Vec<_>>(),
    );
    let umbilic_d = summarize_fit(
        &per_point
            .iter()
            .map(|p| (p.umbilic_d_factor, p.umbilic_d_defect))
            .collect::<Vec<_>>(),
    );

    let eigen = eigen_report(lambda_rows, screen_derivatives);

    let b_max = per_point.iter().fold(0.0f64, |acc, p| acc.max(p.b_max));
    let totally_geodesic = b_max <= KILLING_TOL && killing_defect <= KILLING_TOL;
    let totally_umbilical = totally_geodesic
        || (umbilic_b.verdict == FitVerdict::Holds && umbilic_d.verdict == FitVerdict::Holds);
    let irrotational = per_point
        .iter()
        .fold(0.0f64, |acc, p| acc.max(p.irrotational_defect))
        <= KILLING_TOL;
    let tau_vanishes = per_point
        .iter()
        .fold(0.0f64, |acc, p| acc.max(p.tau_max))
        <= FORM_VANISHES;

    let two_eigenvalue = two_eigenvalue_verdict(spec.k, screen_homothetic, &coscreen, &eigen);
    let cartan_applicable =
        irrotational && tau_vanishes && eigen.constant_along_screen && eigen.stable_grouping;

    Ok(Classification {
        points: points.to_vec(),
        per_point,
        phi: screen_conformal.factor_mean,
        screen_conformal,
        screen_homothetic,
        coscreen,
        umbilic_b,
        umbilic_d,
        eigen,
        irrotational,
        tau_vanishes,
        totally_geodesic,
        totally_umbilical,
        two_eigenvalue,
        cartan_applicable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exprs(list: &[&str]) -> Vec<crate::expr::Expression> {
        list.iter().map(|s| crate::expr::parse(s).unwrap()).collect()
    }

    fn graph_spec() -> ImmersionSpec {
        ImmersionSpec {
            name: "graph".into(),
            chart_dim: 3,
            signature: None,
            components: exprs(&["v1", "v2", "v3", "sqrt(v1^2 - v2^2)", "sqrt(1 + v3^2)"]),
            domain: vec![(1.5, 3.0), (0.5, 1.2), (-1.0, 1.0)],
            radical: None,
            screen: None,
            coscreen: None,
            k: 0.0,
        }
    }

    fn plane_spec() -> ImmersionSpec {
        ImmersionSpec {
            name: "plane".into(),
            chart_dim: 3,
            signature: None,
            components: exprs(&["v1", "v1", "v2", "v3", "0"]),
            domain: vec![(-2.0, 2.0), (-2.0, 2.0), (-2.0, 2.0)],
            radical: None,
            screen: None,
            coscreen: None,
            k: 0.0,
        }
    }

    #[test]
    fn proportionality_fit_handles_degenerate_and_exact_cases() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -2.0]);
        let c = &b * 0.5;
        let (factor, defect) = proportionality_fit(&c, &b);
        assert_relative_eq!(factor, 0.5, max_relative = 1e-14);
        assert!(defect < 1e-14);

        let zero = DMatrix::zeros(2, 2);
        let (factor, defect) = proportionality_fit(&b, &zero);
        assert!(factor.is_nan());
        assert!(defect.is_infinite());
        let (factor, defect) = proportionality_fit(&zero, &zero);
        assert!(factor.is_nan());
        assert_eq!(defect, 0.0);
    }

    #[test]
    fn eigenvalue_grouping_splits_on_relative_gaps() {
        let groups = group_eigenvalues(&[-0.5, -0.5 + 1e-9, 0.3]);
        assert_eq!(groups.len(), 2);
        assert_relative_eq!(groups[0].0, -0.5, max_relative = 1e-8);
        assert_eq!(groups[0].1, 2);
        assert_eq!(groups[1], (0.3, 1));
        assert!(group_eigenvalues(&[]).is_empty());
    }

    #[test]
    fn verdict_messages_are_stable() {
        let applicable = TwoEigenvalueVerdict::Applicable { min_abs: 2.5e-9 };
        assert_eq!(
            applicable.to_string(),
            "applicable: min |principal curvature| = 2.500e-9"
        );
        let blocked = TwoEigenvalueVerdict::NotApplicable {
            reason: "not screen homothetic".to_string(),
        };
        assert_eq!(blocked.to_string(), "not applicable: not screen homothetic");
    }

    #[test]
    fn plane_classifies_as_totally_geodesic() {
        let spec = plane_spec();
        let points = vec![vec![0.3, -0.4, 0.5], vec![-0.7, 0.9, 0.1]];
        let cls = classify(&spec, &points).unwrap();
        assert!(cls.totally_geodesic);
        assert!(cls.totally_umbilical);
        assert!(cls.irrotational);
        assert!(cls.tau_vanishes);
        assert!(cls.coscreen.killing);
        assert!(cls.cartan_applicable);
        for row in &cls.eigen.per_point {
            for l in row {
                assert!(l.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn graph_classification_matches_closed_forms() {
        let spec = graph_spec();
        let points = vec![
            vec![2.0, 1.0, 0.5],
            vec![2.5, 0.8, -0.3],
            vec![1.8, 0.6, 0.2],
        ];
        let cls = classify(&spec, &points).unwrap();

        for (u, row) in points.iter().zip(cls.eigen.per_point.iter()) {
            assert!(row[0].abs() < 1e-10);
            assert_relative_eq!(row[1], -1.0 / u[0], max_relative = 1e-9);
        }
        assert!(cls.eigen.stable_grouping);
        assert_eq!(cls.eigen.group_count, 2);
        assert!(cls.eigen.constant_along_screen);
        assert!(!cls.eigen.globally_constant);

        assert_eq!(cls.screen_conformal.verdict, FitVerdict::Holds);
        assert_relative_eq!(cls.screen_conformal.factor_mean, 0.5, max_relative = 1e-10);
        assert!(cls.screen_homothetic);

        assert!(!cls.coscreen.killing);
        assert_eq!(cls.coscreen.conformal.verdict, FitVerdict::Refuted);
        assert!(cls.coscreen.conformal.max_defect > 1e-2);

        assert!(cls.irrotational);
        assert!(cls.tau_vanishes);
        assert!(!cls.totally_geodesic);
        assert!(!cls.totally_umbilical);

        assert_eq!(
            cls.two_eigenvalue.to_string(),
            "not applicable: co-screen not conformal"
        );
        assert!(cls.cartan_applicable);
    }

    #[test]
    fn graph_cartan_sums_vanish() {
        let spec = graph_spec();
        for u in [[2.0, 1.0, 0.5], [2.4, 0.7, -0.6]] {
            let fp = build_frame(&spec, &u).unwrap();
            let objs = induced_objects(&spec, &fp).unwrap();
            for s in cartan_sums(&objs, 0.0) {
                assert!(s.abs() < 1e-6, "cartan sum {s} at {u:?}");
            }
        }
    }

    #[test]
    fn eigen_derivative_vanishes_along_graph_screen() {
        let spec = graph_spec();
        let fp = build_frame(&spec, &[2.0, 1.0, 0.5]).unwrap();
        let worst = eigen_screen_derivative(&spec, &fp).unwrap();
        assert!(worst < 1e-7, "screen derivative {worst}");
    }

    #[test]
    fn flag_implications_hold_on_fixtures_and_random_specs() {
        let mut runs: Vec<(ImmersionSpec, Vec<Vec<f64>>)> = crate::fixtures::all()
            .into_iter()
            .map(|f| (f.spec, f.points))
            .collect();
        for seed in 0..200u64 {
            let spec = crate::fixtures::random_spec(seed);
            let points = crate::sampling::halton_points(&spec.domain, 2, 11);
            runs.push((spec, points));
        }
        for (spec, points) in &runs {
            let cls = classify(spec, points).unwrap();
            if cls.totally_geodesic {
                assert!(cls.totally_umbilical, "geodesic but not umbilical: {}", spec.name);
                assert!(
                    cls.umbilic_b.factor_mean.abs() < 1e-8,
                    "geodesic with H1 = {:.3e}: {}",
                    cls.umbilic_b.factor_mean,
                    spec.name
                );
                assert!(
                    cls.umbilic_d.factor_mean.abs() < 1e-8,
                    "geodesic with H2 = {:.3e}: {}",
                    cls.umbilic_d.factor_mean,
                    spec.name
                );
            }
            if cls.screen_homothetic {
                assert_eq!(
                    cls.screen_conformal.verdict,
                    FitVerdict::Holds,
                    "homothetic without a conformal fit: {}",
                    spec.name
                );
            }
            if cls.coscreen.killing {
                assert_eq!(
                    cls.coscreen.conformal.verdict,
                    FitVerdict::Holds,
                    "Killing co-screen without a conformal fit: {}",
                    spec.name
                );
                assert!(
                    cls.coscreen.conformal.factor_mean.abs() <= 1e-6,
                    "Killing co-screen with sigma = {:.3e}: {}",
                    cls.coscreen.conformal.factor_mean,
                    spec.name
                );
            }
            if let TwoEigenvalueVerdict::Applicable { min_abs } = &cls.two_eigenvalue {
                assert!(
                    *min_abs < 1e-6,
                    "two constant curvatures but none vanish ({min_abs:.3e}): {}",
                    spec.name
                );
            }
        }
    }

    #[test]
    fn verdicts_invariant_under_constant_radical_rescale() {
        let alpha = crate::expr::parse("2").unwrap();
        for name in ["example1", "example2", "null_cone"] {
            let fixture = crate::fixtures::get(name).unwrap();
            let rescaled = crate::framing::gauge_rescale(&fixture.spec, &alpha).unwrap();
            let base = classify(&fixture.spec, &fixture.points).unwrap();
            let scaled = classify(&rescaled, &fixture.points).unwrap();

            assert_eq!(base.screen_homothetic, scaled.screen_homothetic, "{name}");
            assert_eq!(
                base.screen_conformal.verdict, scaled.screen_conformal.verdict,
                "{name}"
            );
            assert_eq!(base.coscreen.killing, scaled.coscreen.killing, "{name}");
            assert_eq!(
                base.coscreen.conformal.verdict, scaled.coscreen.conformal.verdict,
                "{name}"
            );
            assert_eq!(base.irrotational, scaled.irrotational, "{name}");
            assert_eq!(base.tau_vanishes, scaled.tau_vanishes, "{name}");
            assert_eq!(base.totally_geodesic, scaled.totally_geodesic, "{name}");

            // Principal curvatures scale by the factor, preserving the
            // zero/nonzero pattern.
            for (brow, srow) in base.eigen.per_point.iter().zip(&scaled.eigen.per_point) {
                for (b, s) in brow.iter().zip(srow) {
                    assert!(
                        (s - 2.0 * b).abs() <= 1e-6 * (1.0 + b.abs()),
                        "curvature {b:.9} scaled to {s:.9} on {name}"
                    );
                }
            }

            match (&base.two_eigenvalue, &scaled.two_eigenvalue) {
                (
                    TwoEigenvalueVerdict::Applicable { min_abs: b },
                    TwoEigenvalueVerdict::Applicable { min_abs: s },
                ) => assert!((s - 2.0 * b).abs() <= 1e-6, "{name}"),
                (
                    TwoEigenvalueVerdict::NotApplicable { reason: b },
                    TwoEigenvalueVerdict::NotApplicable { reason: s },
                ) => assert_eq!(b, s, "{name}"),
                (b, s) => panic!("verdict changed shape under rescale on {name}: {b} vs {s}"),
            }
        }
    }

    #[test]
    fn eigenfield_derivative_leaves_the_other_eigenspace() {
        // For a simple screen principal curvature mu, its unit
        // eigenfield Y satisfies g(nabla_X Y, Z) = 0 whenever X and Z
        // lie in a different eigenvalue group whose curvature is also
        // constant along the screen.
        for name in ["example1", "example3"] {
            let fixture = crate::fixtures::get(name).unwrap();
            let spec = &fixture.spec;
            let u0 = &fixture.points[0];
            let fp0 = build_frame(spec, u0).unwrap();
            let objs0 = induced_objects(spec, &fp0).unwrap();
            let (lambdas, dirs) = principal_directions(&objs0);
            let groups = group_eigenvalues(&lambdas);

            let mut ranges = Vec::new();
            let mut start = 0usize;
            for (mean, count) in &groups {
                ranges.push((start..start + count, *mean));
                start += count;
            }

            let h = 1e-4;
            let m = spec.chart_dim;
            for (y_range, mu) in &ranges {
                if y_range.len() != 1 {
                    continue;
                }
                let y0 = &dirs[y_range.start];
                for (x_range, _) in ranges.iter().filter(|(r, _)| r.start != y_range.start) {
                    for xi in x_range.clone() {
                        let x = &dirs[xi];
                        let shift = |sign: f64| -> DVector<f64> {
                            let u: Vec<f64> = u0
                                .iter()
                                .enumerate()
                                .map(|(i, v)| v + sign * h * x[i])
                                .collect();
                            let fp = build_frame(spec, &u).unwrap();
                            let objs = induced_objects(spec, &fp).unwrap();
                            let (lams, ds) = principal_directions(&objs);
                            // Match the mu-eigenfield by overlap and fix
                            // its sign against the center vector.
                            let (best, overlap) = ds
                                .iter()
                                .map(|d| (d.transpose() * &fp0.gram * y0)[(0, 0)])
                                .enumerate()
                                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                                .unwrap();
                            assert!(
                                (lams[best] - mu).abs() <= 1e-3 * (1.0 + mu.abs()),
                                "eigenfield matching drifted on {name}"
                            );
                            &ds[best] * overlap.signum()
                        };
                        let dy = (shift(1.0) - shift(-1.0)) / (2.0 * h);

                        let mut nabla = dy;
                        for p in 0..m {
                            let mut acc = 0.0;
                            for i in 0..m {
                                for j in 0..m {
                                    acc += x[i] * objs0.alg.gamma[p][(i, j)] * y0[j];
                                }
                            }
                            nabla[p] += acc;
                        }

                        for zi in x_range.clone() {
                            let z = &dirs[zi];
                            let val = (nabla.transpose() * &fp0.gram * z)[(0, 0)];
                            assert!(
                                val.abs() < 1e-5,
                                "eigenfield derivative leaks on {name}: {val:.3e}"
                            );
                        }
                    }
                }
            }
        }
    }
}
