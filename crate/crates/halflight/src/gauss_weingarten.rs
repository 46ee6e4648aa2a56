//! Induced geometric objects at a frame point.
//!
//! With the adapted frame `{T_i; N, L}` in place, the ambient second
//! partials of the immersion decompose as
//!
//! `f_ij = Γ^k_ij T_k + B_ij N + D_ij L`
//!
//! giving the induced connection coefficients and the two second
//! fundamental forms, and the frame field derivatives decompose as
//!
//! `∂_i N = -A_N T_i + τ_i N + ρ_i L`
//! `∂_i L = -A_L T_i + φ_i N`
//! `∂_i ξ = -A*_ξ T_i - τ_i ξ - φ_i L`
//!
//! giving the shape operators and the connection one-forms. The screen
//! second fundamental form `C` is read off from the screen basis
//! derivatives, `C(T_i, W_a) = <∂_i W_a, N>`.
//!
//! `B` and the radical shape operator `A*_ξ` depend only on the choice
//! of radical section; `B` annihilates the radical, and `A*_ξ` is
//! recovered algebraically from `B` through the screen basis, so both
//! are exact in the immersion jets. The transversal objects need frame
//! derivatives and inherit that route's accuracy.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::FrameError;
use crate::framing::{frame_derivatives, DerivRoute, FrameDerivatives, FramePoint, ImmersionSpec};
use crate::semi_euclidean::AmbientSpace;
use crate::tolerances::Tier;

/// Accuracy tier of quantities built from frame derivatives obtained by
/// the given route.
pub fn route_tier(route: DerivRoute) -> Tier {
    match route {
        DerivRoute::Jet => Tier::Algebraic,
        DerivRoute::Fd => Tier::OneFd,
    }
}

/// Objects exact in the immersion jets: connection coefficients, both
/// second fundamental forms, the metric derivative, and the radical
/// shape operator.
#[derive(Debug, Clone)]
pub struct AlgebraicForms {
    /// `gamma[k][(i, j)] = Γ^k_ij`, symmetric in `(i, j)`.
    pub gamma: Vec<DMatrix<f64>>,
    /// Second fundamental form paired with the transversal: `B(T_i, T_j)`.
    pub b: DMatrix<f64>,
    /// Second fundamental form paired with the co-screen: `D(T_i, T_j)`.
    pub d: DMatrix<f64>,
    /// `dg[k][(i, j)] = ∂_k g_ij`, exact from the jets.
    pub dg: Vec<DMatrix<f64>>,
    /// Radical shape operator; column `i` holds the chart coefficients
    /// of `A*_ξ T_i`. Screen-valued by construction.
    pub a_star: DMatrix<f64>,
    /// Largest defect when re-assembling `f_ij` from the decomposition.
    pub reconstruction_residual: f64,
}

/// Objects read from frame field derivatives: the transversal and
/// co-screen shape operators, the connection one-forms, and the screen
/// second fundamental form.
#[derive(Debug, Clone)]
pub struct TransversalForms {
    /// Column `i` holds the chart coefficients of `A_N T_i`.
    pub a_n: DMatrix<f64>,
    /// `τ(T_i)`.
    pub tau: DVector<f64>,
    /// `ρ(T_i)`.
    pub rho: DVector<f64>,
    /// Column `i` holds the chart coefficients of `A_L T_i`.
    pub a_l: DMatrix<f64>,
    /// `φ(T_i)`.
    pub phi: DVector<f64>,
    /// `c_screen[(i, a)] = C(T_i, W_a)`.
    pub c_screen: DMatrix<f64>,
    /// The co-screen derivative should have no co-screen component;
    /// this is the largest one observed.
    pub coscreen_closure_residual: f64,
}

/// Everything the curvature and classification layers need at a point.
#[derive(Debug, Clone)]
pub struct InducedObjects {
    pub frame: FramePoint,
    pub route: DerivRoute,
    pub alg: AlgebraicForms,
    pub trans: TransversalForms,
}

/// Decompose the second partials of the immersion in the adapted basis.
pub fn algebraic_forms(space: &AmbientSpace, fp: &FramePoint) -> AlgebraicForms {
    let m = fp.chart_dim();
    let lu = fp.adapted_basis().lu();
    let mut gamma = vec![DMatrix::zeros(m, m); m];
    let mut b = DMatrix::zeros(m, m);
    let mut d = DMatrix::zeros(m, m);
    let mut recon = 0.0f64;
    let basis = fp.adapted_basis();
    for i in 0..m {
        for j in i..m {
            let f_ij = &fp.jet.d2[i][j];
            let sol = lu.solve(f_ij).expect("adapted frame basis is singular");
            for k in 0..m {
                gamma[k][(i, j)] = sol[k];
                gamma[k][(j, i)] = sol[k];
            }
            b[(i, j)] = sol[m];
            b[(j, i)] = sol[m];
            d[(i, j)] = sol[m + 1];
            d[(j, i)] = sol[m + 1];
            recon = recon.max((&basis * &sol - f_ij).norm());
        }
    }

    let mut dg = vec![DMatrix::zeros(m, m); m];
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                dg[k][(i, j)] = space.inner(&fp.jet.d2[k][i], &fp.jet.d1[j])
                    + space.inner(&fp.jet.d1[i], &fp.jet.d2[k][j]);
            }
        }
    }

    // A*_ξ T_i = Σ_a B(T_i, W_a) W_a since the screen is orthonormal and
    // the operator is screen-valued with g(A*_ξ X, Y) = B(X, Y).
    let mut a_star = DMatrix::zeros(m, m);
    for i in 0..m {
        let mut col = DVector::zeros(m);
        for (a, wc) in fp.screen_chart.iter().enumerate() {
            let mut coeff = 0.0;
            for j in 0..m {
                coeff += wc[j] * b[(i, j)];
            }
            col += &fp.screen_chart[a] * coeff;
        }
        a_star.set_column(i, &col);
    }

    AlgebraicForms {
        gamma,
        b,
        d,
        dg,
        a_star,
        reconstruction_residual: recon,
    }
}

/// Decompose the frame field derivatives in the adapted basis.
pub fn transversal_forms(
    space: &AmbientSpace,
    fp: &FramePoint,
    fd: &FrameDerivatives,
) -> TransversalForms {
    let m = fp.chart_dim();
    let mut a_n = DMatrix::zeros(m, m);
    let mut tau = DVector::zeros(m);
    let mut rho = DVector::zeros(m);
    let mut a_l = DMatrix::zeros(m, m);
    let mut phi = DVector::zeros(m);
    let mut c_screen = DMatrix::zeros(m, m - 1);
    let mut closure = 0.0f64;
    for i in 0..m {
        let (t, ncoef, lcoef) = fp.decompose(&fd.d_transversal[i]);
        a_n.set_column(i, &(-t));
        tau[i] = ncoef;
        rho[i] = lcoef;

        let (t, ncoef, lcoef) = fp.decompose(&fd.d_coscreen[i]);
        a_l.set_column(i, &(-t));
        phi[i] = ncoef;
        closure = closure.max(lcoef.abs());

        // C(T_i, W_a) = <∂_i W_a, N> in the ambient pairing.
        for a in 0..m - 1 {
            c_screen[(i, a)] = space.inner(&fd.d_screen[i][a], &fp.transversal);
        }
    }
    TransversalForms {
        a_n,
        tau,
        rho,
        a_l,
        phi,
        c_screen,
        coscreen_closure_residual: closure,
    }
}

/// Build all induced objects at a frame point, choosing the best
/// derivative route the spec allows.
pub fn induced_objects(
    spec: &ImmersionSpec,
    fp: &FramePoint,
) -> Result<InducedObjects, FrameError> {
    let space = spec.ambient();
    let fd = frame_derivatives(spec, fp)?;
    let alg = algebraic_forms(&space, fp);
    let trans = transversal_forms(&space, fp, &fd);
    Ok(InducedObjects {
        frame: fp.clone(),
        route: fd.route,
        alg,
        trans,
    })
}

impl InducedObjects {
    pub fn chart_dim(&self) -> usize {
        self.frame.chart_dim()
    }

    /// `g(X, Y)` for chart coefficient vectors.
    pub fn g_of(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.frame.gram * y)[(0, 0)]
    }

    /// `B(X, Y)` for chart coefficient vectors.
    pub fn b_of(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.alg.b * y)[(0, 0)]
    }

    /// `D(X, Y)` for chart coefficient vectors.
    pub fn d_of(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.alg.d * y)[(0, 0)]
    }

    /// `η(X)` for chart coefficients.
    pub fn eta_of(&self, x: &DVector<f64>) -> f64 {
        self.frame.eta.dot(x)
    }

    /// Screen projection in chart coefficients: `PX = X - η(X) ξ`.
    pub fn screen_project(&self, x: &DVector<f64>) -> DVector<f64> {
        x - &self.frame.xi_chart * self.eta_of(x)
    }

    /// `C(X, PY)` for chart coefficient vectors; the screen part of `Y`
    /// is expanded in the orthonormal screen basis.
    pub fn c_of(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let py = self.screen_project(y);
        let mut total = 0.0;
        for (a, wc) in self.frame.screen_chart.iter().enumerate() {
            // screen coefficient of PY against W_a in the induced metric
            let coeff = (wc.transpose() * &self.frame.gram * &py)[(0, 0)];
            for i in 0..self.chart_dim() {
                total += x[i] * coeff * self.trans.c_screen[(i, a)];
            }
        }
        total
    }

    /// Apply a shape operator stored as chart columns to chart
    /// coefficients.
    fn apply(matrix: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
        matrix * x
    }

    pub fn a_n_apply(&self, x: &DVector<f64>) -> DVector<f64> {
        Self::apply(&self.trans.a_n, x)
    }

    pub fn a_l_apply(&self, x: &DVector<f64>) -> DVector<f64> {
        Self::apply(&self.trans.a_l, x)
    }

    pub fn a_star_apply(&self, x: &DVector<f64>) -> DVector<f64> {
        Self::apply(&self.alg.a_star, x)
    }

    /// `τ(X)`, `ρ(X)`, `φ(X)` for chart coefficients.
    pub fn tau_of(&self, x: &DVector<f64>) -> f64 {
        self.trans.tau.dot(x)
    }

    pub fn rho_of(&self, x: &DVector<f64>) -> f64 {
        self.trans.rho.dot(x)
    }

    pub fn phi_of(&self, x: &DVector<f64>) -> f64 {
        self.trans.phi.dot(x)
    }

    /// Accuracy tier for quantities derived from the frame route.
    pub fn tier(&self) -> Tier {
        route_tier(self.route)
    }
}

/// A named residual with the tier that sets its tolerance.
/// Informational residuals are reported but never gate a verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedResidual {
    pub name: String,
    pub value: f64,
    pub tier: Tier,
    #[serde(default)]
    pub informational: bool,
}

impl NamedResidual {
    pub fn new(name: &str, value: f64, tier: Tier) -> Self {
        NamedResidual {
            name: name.into(),
            value,
            tier,
            informational: false,
        }
    }

    pub fn info(name: &str, value: f64, tier: Tier) -> Self {
        NamedResidual {
            name: name.into(),
            value,
            tier,
            informational: true,
        }
    }
}

/// Residuals of the structural identities every half-lightlike frame
/// must satisfy, evaluated pointwise.
pub fn structure_residuals(
    space: &AmbientSpace,
    objs: &InducedObjects,
    fd: &FrameDerivatives,
) -> Vec<NamedResidual> {
    let fp = &objs.frame;
    let m = fp.chart_dim();
    let t = objs.tier();
    let mut out = Vec::new();

    // B annihilates the radical.
    let b_rad = (&objs.alg.b * &fp.xi_chart).amax();
    out.push(NamedResidual::new("b_on_radical", b_rad, Tier::Algebraic));

    // D(X, ξ) = -φ(X).
    let d_xi = &objs.alg.d * &fp.xi_chart;
    let mut d_phi = 0.0f64;
    for i in 0..m {
        d_phi = d_phi.max((d_xi[i] + objs.trans.phi[i]).abs());
    }
    out.push(NamedResidual::new("d_radical_vs_phi", d_phi, t));

    // The transversal shape operator is screen-valued: <A_N X, N> = 0.
    let mut a_n_eta = 0.0f64;
    for i in 0..m {
        let col = objs.trans.a_n.column(i).into_owned();
        a_n_eta = a_n_eta.max(objs.eta_of(&col).abs());
    }
    out.push(NamedResidual::new("a_n_screen_valued", a_n_eta, t));

    // <A_L X, N> = ρ(X).
    let mut a_l_rho = 0.0f64;
    for i in 0..m {
        let col = objs.trans.a_l.column(i).into_owned();
        a_l_rho = a_l_rho.max((objs.eta_of(&col) - objs.trans.rho[i]).abs());
    }
    out.push(NamedResidual::new("a_l_transversal_part", a_l_rho, t));

    // g(A_L X, Y) = D(X, Y) + φ(X) η(Y).
    let mut a_l_pair = 0.0f64;
    for i in 0..m {
        let col = objs.trans.a_l.column(i).into_owned();
        let g_col = &fp.gram * &col;
        for j in 0..m {
            let expected = objs.alg.d[(i, j)] + objs.trans.phi[i] * fp.eta[j];
            a_l_pair = a_l_pair.max((g_col[j] - expected).abs());
        }
    }
    out.push(NamedResidual::new("a_l_pairing_vs_d", a_l_pair, t));

    // The radical shape operator is screen-valued: <A*_ξ X, N> = 0.
    let mut a_star_eta = 0.0f64;
    for i in 0..m {
        let col = objs.alg.a_star.column(i).into_owned();
        a_star_eta = a_star_eta.max(objs.eta_of(&col).abs());
    }
    out.push(NamedResidual::new(
        "a_star_screen_valued",
        a_star_eta,
        Tier::Algebraic,
    ));

    // Nonmetricity of the induced connection:
    // (∇_k g)(T_i, T_j) = B_ki η_j + B_kj η_i.
    let mut nonmetric = 0.0f64;
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let mut cov = objs.alg.dg[k][(i, j)];
                for l in 0..m {
                    cov -= objs.alg.gamma[l][(k, i)] * fp.gram[(l, j)];
                    cov -= objs.alg.gamma[l][(k, j)] * fp.gram[(i, l)];
                }
                let expected =
                    objs.alg.b[(k, i)] * fp.eta[j] + objs.alg.b[(k, j)] * fp.eta[i];
                nonmetric = nonmetric.max((cov - expected).abs());
            }
        }
    }
    out.push(NamedResidual::new(
        "metric_nonmetricity",
        nonmetric,
        Tier::Algebraic,
    ));

    // Radical derivative reconstruction:
    // ∂_i ξ + A*_ξ T_i + τ_i ξ + φ_i L = 0.
    let mut rad = 0.0f64;
    for i in 0..m {
        let a_star_amb = fp.chart_to_ambient(&objs.alg.a_star.column(i).into_owned());
        let mut v = fd.d_xi[i].clone();
        v += &a_star_amb;
        v += &fp.xi * objs.trans.tau[i];
        v += &fp.coscreen * objs.trans.phi[i];
        rad = rad.max(v.amax());
    }
    out.push(NamedResidual::new("radical_weingarten", rad, t));

    // C is the screen block of A_N: C(T_i, W_a) = g(A_N T_i, W_a).
    let mut c_an = 0.0f64;
    for i in 0..m {
        let a_n_amb = fp.chart_to_ambient(&objs.trans.a_n.column(i).into_owned());
        for (a, w) in fp.screen.iter().enumerate() {
            let lhs = objs.trans.c_screen[(i, a)];
            let rhs = space.inner(&a_n_amb, w);
            c_an = c_an.max((lhs - rhs).abs());
        }
    }
    out.push(NamedResidual::new("c_vs_a_n_screen_block", c_an, t));

    // The co-screen derivative has no co-screen component.
    out.push(NamedResidual::new(
        "coscreen_closure",
        objs.trans.coscreen_closure_residual,
        t,
    ));

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::framing::{build_frame, fd_frame_derivatives, gauge_rescale, jet_frame_derivatives};
    use crate::framing::ImmersionSpec;
    use approx::assert_relative_eq;

    fn exprs(list: &[&str]) -> Vec<crate::expr::Expression> {
        list.iter().map(|s| parse(s).unwrap()).collect()
    }

    fn plane_spec() -> ImmersionSpec {
        ImmersionSpec {
            name: "plane".into(),
            chart_dim: 3,
            signature: None,
            components: exprs(&["v1", "v1", "v2", "v3", "0"]),
            domain: vec![(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
            radical: None,
            screen: None,
            coscreen: None,
            k: 0.0,
        }
    }

    fn lorentz_graph_spec(with_overrides: bool) -> ImmersionSpec {
        let mut spec = ImmersionSpec {
            name: "lorentz_graph".into(),
            chart_dim: 3,
            signature: None,
            components: exprs(&["v1", "v2", "v3", "sqrt(v1^2 - v2^2)", "sqrt(1 + v3^2)"]),
            domain: vec![(1.5, 3.0), (0.5, 1.2), (-1.0, 1.0)],
            radical: None,
            screen: None,
            coscreen: None,
            k: 0.0,
        };
        if with_overrides {
            spec.radical = Some(exprs(&["1", "v2/v1", "0", "sqrt(v1^2 - v2^2)/v1", "0"]));
            spec.screen = Some(vec![
                exprs(&["0", "sqrt(v1^2 - v2^2)/v1", "0", "-v2/v1", "0"]),
                exprs(&[
                    "0",
                    "0",
                    "sqrt(1 + v3^2)/sqrt(1 + 2*v3^2)",
                    "0",
                    "v3/sqrt(1 + 2*v3^2)",
                ]),
            ]);
            spec.coscreen = Some(exprs(&[
                "0",
                "0",
                "-v3/sqrt(1 + 2*v3^2)",
                "0",
                "sqrt(1 + v3^2)/sqrt(1 + 2*v3^2)",
            ]));
        }
        spec
    }

    #[test]
    fn plane_objects_all_vanish() {
        let spec = plane_spec();
        let fp = build_frame(&spec, &[0.2, -0.3, 0.4]).unwrap();
        let objs = induced_objects(&spec, &fp).unwrap();
        assert!(objs.alg.b.amax() < 1e-12);
        assert!(objs.alg.d.amax() < 1e-12);
        assert!(objs.alg.a_star.amax() < 1e-12);
        for g in &objs.alg.gamma {
            assert!(g.amax() < 1e-12);
        }
        assert!(objs.trans.a_n.amax() < 1e-8);
        assert!(objs.trans.a_l.amax() < 1e-8);
        assert!(objs.trans.tau.amax() < 1e-8);
        assert!(objs.trans.rho.amax() < 1e-8);
        assert!(objs.trans.phi.amax() < 1e-8);
        assert!(objs.trans.c_screen.amax() < 1e-8);
    }

    #[test]
    fn graph_second_forms_match_closed_expressions() {
        let spec = lorentz_graph_spec(false);
        let (v1, v2, v3) = (2.0, 1.0, 0.5);
        let fp = build_frame(&spec, &[v1, v2, v3]).unwrap();
        let space = spec.ambient();
        let alg = algebraic_forms(&space, &fp);
        let x4sq = v1 * v1 - v2 * v2;
        let x5sq = 1.0 + v3 * v3;
        let c = 1.0 / (1.0 + 2.0 * v3 * v3).sqrt();
        assert_relative_eq!(alg.b[(0, 0)], -v2 * v2 / (v1 * x4sq), max_relative = 1e-10);
        assert_relative_eq!(alg.b[(0, 1)], v2 / x4sq, max_relative = 1e-10);
        assert_relative_eq!(alg.b[(1, 1)], -v1 / x4sq, max_relative = 1e-10);
        assert_relative_eq!(alg.b[(2, 2)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(alg.d[(2, 2)], c / x5sq, max_relative = 1e-10);
        assert_relative_eq!(alg.d[(0, 0)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(alg.d[(0, 1)], 0.0, epsilon = 1e-12);
        assert!(alg.reconstruction_residual < 1e-12);

        // D in the unit screen direction gives the co-screen eigenvalue.
        let s = fp.screen_chart[1].clone();
        let d_unit = (s.transpose() * &alg.d * &s)[(0, 0)];
        assert_relative_eq!(d_unit, c * c * c, max_relative = 1e-10);
    }

    #[test]
    fn graph_shape_operators_match_closed_expressions() {
        let spec = lorentz_graph_spec(false);
        let (v1, v2, v3) = (2.0, 1.0, 0.5);
        let fp = build_frame(&spec, &[v1, v2, v3]).unwrap();
        let objs = induced_objects(&spec, &fp).unwrap();
        let c = 1.0 / (1.0 + 2.0 * v3 * v3).sqrt();
        let w0 = fp.screen_chart[0].clone();
        let w1 = fp.screen_chart[1].clone();

        // A*_ξ has screen eigenvalues (-1/v1, 0) and kills the radical.
        let a0 = objs.a_star_apply(&w0);
        assert_relative_eq!((&a0 + &w0 / v1).amax(), 0.0, epsilon = 1e-10);
        assert!(objs.a_star_apply(&w1).amax() < 1e-10);
        assert!(objs.a_star_apply(&fp.xi_chart).amax() < 1e-10);

        // A_N has screen eigenvalues (-1/(2 v1), 0) and kills the radical.
        let n0 = objs.a_n_apply(&w0);
        assert_relative_eq!((&n0 + &w0 / (2.0 * v1)).amax(), 0.0, epsilon = 1e-7);
        assert!(objs.a_n_apply(&w1).amax() < 1e-7);
        assert!(objs.a_n_apply(&fp.xi_chart).amax() < 1e-7);

        // A_L stretches the second screen direction by c³.
        let l1 = objs.a_l_apply(&w1);
        assert_relative_eq!((&l1 - &w1 * (c * c * c)).amax(), 0.0, epsilon = 1e-7);
        assert!(objs.a_l_apply(&w0).amax() < 1e-7);
        assert!(objs.a_l_apply(&fp.xi_chart).amax() < 1e-7);

        // connection one-forms vanish for this immersion
        assert!(objs.trans.tau.amax() < 1e-7);
        assert!(objs.trans.rho.amax() < 1e-7);
        assert!(objs.trans.phi.amax() < 1e-7);

        // the screen form is half the second fundamental form here
        let cb = objs.c_of(&w0, &w0);
        let bb = objs.b_of(&w0, &w0);
        assert_relative_eq!(cb, 0.5 * bb, max_relative = 1e-6);
    }

    #[test]
    fn structure_residuals_are_small_on_samples() {
        for spec in [plane_spec(), lorentz_graph_spec(false)] {
            let space = spec.ambient();
            let points: Vec<Vec<f64>> = spec
                .domain
                .iter()
                .map(|(lo, hi)| (0.35 * lo + 0.65 * hi, 0.6 * lo + 0.4 * hi))
                .fold(vec![Vec::new()], |acc, (a, b)| {
                    let mut next = Vec::new();
                    for base in acc {
                        let mut x = base.clone();
                        x.push(a);
                        next.push(x);
                        let mut y = base;
                        y.push(b);
                        next.push(y);
                    }
                    next
                });
            for u in points.iter().take(4) {
                let fp = build_frame(&spec, u).unwrap();
                let fd = fd_frame_derivatives(&spec, &fp).unwrap();
                let alg = algebraic_forms(&space, &fp);
                let trans = transversal_forms(&space, &fp, &fd);
                let objs = InducedObjects {
                    frame: fp.clone(),
                    route: fd.route,
                    alg,
                    trans,
                };
                for r in structure_residuals(&space, &objs, &fd) {
                    let tol = match r.tier {
                        Tier::Algebraic => 1e-10,
                        Tier::OneFd => 1e-7,
                        Tier::TwoFd => 1e-5,
                    };
                    assert!(
                        r.value < tol,
                        "{} = {:.3e} exceeds {tol:.0e} at {u:?} for {}",
                        r.name,
                        r.value,
                        spec.name
                    );
                }
            }
        }
    }

    #[test]
    fn jet_route_matches_fd_route_for_transversal_forms() {
        let spec = lorentz_graph_spec(true);
        let u = [2.2, 0.9, 0.4];
        let fp = build_frame(&spec, &u).unwrap();
        let jet = jet_frame_derivatives(&spec, &fp).unwrap();
        let fd = fd_frame_derivatives(&spec, &fp).unwrap();
        let space = spec.ambient();
        let a = transversal_forms(&space, &fp, &jet);
        let b = transversal_forms(&space, &fp, &fd);
        assert!((a.a_n - b.a_n).amax() < 1e-7);
        assert!((a.a_l - b.a_l).amax() < 1e-7);
        assert!((a.tau - b.tau).amax() < 1e-7);
        assert!((a.rho - b.rho).amax() < 1e-7);
        assert!((a.phi - b.phi).amax() < 1e-7);
    }

    #[test]
    fn radical_rescaling_transforms_objects_covariantly() {
        let spec = lorentz_graph_spec(true);
        let scaled = gauge_rescale(&spec, &parse("v1").unwrap()).unwrap();
        let u = [2.0, 1.0, 0.5];
        let fp1 = build_frame(&spec, &u).unwrap();
        let fp2 = build_frame(&scaled, &u).unwrap();
        let o1 = induced_objects(&spec, &fp1).unwrap();
        let o2 = induced_objects(&scaled, &fp2).unwrap();
        let alpha = u[0];

        // B scales with the radical, D does not.
        assert!((&o2.alg.b - &o1.alg.b * alpha).amax() < 1e-9);
        assert!((&o2.alg.d - &o1.alg.d).amax() < 1e-9);
        // shape operators: A*_ξ scales, A_N scales inversely, A_L fixed
        assert!((&o2.alg.a_star - &o1.alg.a_star * alpha).amax() < 1e-9);
        assert!((&o2.trans.a_n - &o1.trans.a_n / alpha).amax() < 1e-9);
        assert!((&o2.trans.a_l - &o1.trans.a_l).amax() < 1e-9);
        // τ picks up -d log α, here (-1/v1, 0, 0)
        let mut expected_tau = o1.trans.tau.clone();
        expected_tau[0] -= 1.0 / alpha;
        assert!((&o2.trans.tau - &expected_tau).amax() < 1e-9);
        // ρ scales inversely, φ scales directly
        assert!((&o2.trans.rho - &o1.trans.rho / alpha).amax() < 1e-9);
        assert!((&o2.trans.phi - &o1.trans.phi * alpha).amax() < 1e-9);
    }

    #[test]
    fn screen_form_contraction_uses_screen_part_only() {
        let spec = lorentz_graph_spec(false);
        let u = [2.0, 1.0, 0.5];
        let fp = build_frame(&spec, &u).unwrap();
        let objs = induced_objects(&spec, &fp).unwrap();
        // C(X, P ξ) must vanish since P kills the radical.
        let e0 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let c = objs.c_of(&e0, &fp.xi_chart.clone());
        assert!(c.abs() < 1e-9);
        // and the projection of a screen vector is itself
        let w0 = fp.screen_chart[0].clone();
        let p = objs.screen_project(&w0);
        assert!((&p - &w0).amax() < 1e-12);
    }

    #[test]
    fn decomposition_reconstructs_second_jet_at_random_points() {
        let spec = lorentz_graph_spec(false);
        let space = spec.ambient();
        for u in crate::sampling::random_points(&spec.domain, 20, 99) {
            let fp = build_frame(&spec, &u).unwrap();
            let alg = algebraic_forms(&space, &fp);
            assert!(
                alg.reconstruction_residual < 1e-10,
                "residual {:.3e} at {u:?}",
                alg.reconstruction_residual
            );
        }
    }
}
