//! Frame construction along a parametric half-lightlike immersion.
//!
//! Given chart coordinates `u = (v1, ..., vm)` and an immersion
//! `f : U -> R^{m+2}` into flat semi-Euclidean space, this module builds
//! the adapted frame at a point:
//!
//! - `xi` spanning the radical `TM ∩ TM⊥` (the induced metric's kernel),
//! - an orthonormal spacelike screen `{W_1, ..., W_{m-1}}` complementing
//!   `xi` inside the tangent space,
//! - the unit spacelike co-screen direction `L` in the normal bundle,
//! - the unique null transversal `N` with pairing conditions
//!   `<N, xi> = 1`, `<N, N> = <N, W_a> = <N, L> = 0`.
//!
//! Each of `xi`, the screen, and `L` may be overridden by closed-form
//! expressions; overrides are validated against their defining
//! conditions at every point. `N` is never an input: it is determined
//! by the other three.
//!
//! Frame fields are differentiated either exactly (expression jets,
//! available when all three overrides are present) or by Richardson-
//! extrapolated central differences with stencil frames aligned to the
//! center gauge.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, FrameError};
use crate::expr::{Ast, Expression};
use crate::semi_euclidean::{null_kernel, AmbientSpace};
use crate::tolerances::FD_STEP;

/// Relative eigenvalue cutoff for detecting the metric's kernel.
const KERNEL_REL_TOL: f64 = 1e-9;

/// Tolerance for validating user-supplied frame overrides.
const OVERRIDE_TOL: f64 = 1e-8;

/// A parametric immersion with optional frame overrides.
///
/// `components` are expressions in `v1..vm` giving the ambient
/// coordinates of the immersion; `domain` is the chart box. The three
/// optional overrides give ambient components of the radical section,
/// the screen basis (orthonormal), and the unit co-screen section.
/// `k` is the ambient curvature parameter used only by the pointwise
/// curvature-sum diagnostics; the geometric pipeline itself is for the
/// flat ambient.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImmersionSpec {
    #[serde(default)]
    pub name: String,
    pub chart_dim: usize,
    /// Ambient metric signs; defaults to (-, +, ..., +).
    #[serde(default)]
    pub signature: Option<Vec<f64>>,
    pub components: Vec<Expression>,
    pub domain: Vec<(f64, f64)>,
    #[serde(default)]
    pub radical: Option<Vec<Expression>>,
    #[serde(default)]
    pub screen: Option<Vec<Vec<Expression>>>,
    #[serde(default)]
    pub coscreen: Option<Vec<Expression>>,
    #[serde(default)]
    pub k: f64,
}

impl ImmersionSpec {
    pub fn ambient_dim(&self) -> usize {
        self.chart_dim + 2
    }

    pub fn ambient(&self) -> AmbientSpace {
        match &self.signature {
            Some(s) => AmbientSpace::with_signature(s.clone()),
            None => AmbientSpace::lorentzian(self.ambient_dim()),
        }
    }

    /// All three frame overrides present, enabling exact frame
    /// derivatives.
    pub fn has_full_overrides(&self) -> bool {
        self.radical.is_some() && self.screen.is_some() && self.coscreen.is_some()
    }

    /// Check the spec's shape: component/override counts, domain boxes,
    /// variable usage, signature entries.
    pub fn validate(&self) -> Result<(), FrameError> {
        let m = self.chart_dim;
        let n = self.ambient_dim();
        let err = |msg: String| Err(FrameError::InvalidSpec(msg));
        if m < 2 {
            return err(format!("chart dimension must be at least 2, got {m}"));
        }
        if self.components.len() != n {
            return err(format!(
                "expected {n} components for chart dimension {m}, got {}",
                self.components.len()
            ));
        }
        if self.domain.len() != m {
            return err(format!(
                "expected {m} domain intervals, got {}",
                self.domain.len()
            ));
        }
        for (i, (lo, hi)) in self.domain.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return err(format!("domain interval {} is not a finite box: [{lo}, {hi}]", i + 1));
            }
        }
        if let Some(sig) = &self.signature {
            if sig.len() != n {
                return err(format!("signature has {} entries, expected {n}", sig.len()));
            }
            if !sig.iter().all(|&e| e == 1.0 || e == -1.0) {
                return err("signature entries must be +1 or -1".into());
            }
        }
        let check_vars = |exprs: &[Expression], what: &str| -> Result<(), FrameError> {
            for e in exprs {
                if e.max_var() > m {
                    return Err(FrameError::InvalidSpec(format!(
                        "{what} expression `{e}` uses v{} but the chart has {m} variables",
                        e.max_var()
                    )));
                }
            }
            Ok(())
        };
        check_vars(&self.components, "component")?;
        if let Some(r) = &self.radical {
            if r.len() != n {
                return err(format!("radical override has {} components, expected {n}", r.len()));
            }
            check_vars(r, "radical")?;
        }
        if let Some(s) = &self.screen {
            if s.len() != m - 1 {
                return err(format!(
                    "screen override has {} sections, expected {}",
                    s.len(),
                    m - 1
                ));
            }
            for row in s {
                if row.len() != n {
                    return err(format!(
                        "screen section has {} components, expected {n}",
                        row.len()
                    ));
                }
                check_vars(row, "screen")?;
            }
        }
        if let Some(c) = &self.coscreen {
            if c.len() != n {
                return err(format!(
                    "coscreen override has {} components, expected {n}",
                    c.len()
                ));
            }
            check_vars(c, "coscreen")?;
        }
        if !self.k.is_finite() {
            return err("curvature parameter k must be finite".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, FrameError> {
        let spec: ImmersionSpec = serde_json::from_str(text)
            .map_err(|e| FrameError::InvalidSpec(format!("bad spec JSON: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }

    /// Is `u` inside the domain box (inclusive)?
    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.chart_dim
            && u.iter()
                .zip(&self.domain)
                .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }
}

/// Evaluate a list of ambient component expressions as a vector.
fn eval_vector(exprs: &[Expression], u: &[f64]) -> Result<DVector<f64>, EvalError> {
    let mut out = DVector::zeros(exprs.len());
    for (i, e) in exprs.iter().enumerate() {
        out[i] = e.eval(u)?;
    }
    Ok(out)
}

/// Evaluate ambient component expressions and their first partials.
/// Returns the value and one vector per chart direction.
fn eval_vector_jet(
    exprs: &[Expression],
    u: &[f64],
) -> Result<(DVector<f64>, Vec<DVector<f64>>), EvalError> {
    let n = exprs.len();
    let m = u.len();
    let mut value = DVector::zeros(n);
    let mut d1 = vec![DVector::zeros(n); m];
    for (c, e) in exprs.iter().enumerate() {
        let j = e.eval_jet(u, 1)?;
        value[c] = j.value;
        for i in 0..m {
            d1[i][c] = j.grad[i];
        }
    }
    Ok((value, d1))
}

/// Value, first, and second partial derivatives of the immersion at a
/// chart point.
#[derive(Debug, Clone)]
pub struct ImmersionJet {
    pub u: Vec<f64>,
    pub value: DVector<f64>,
    /// Tangent vectors `T_i = ∂f/∂v_i`, one per chart direction.
    pub d1: Vec<DVector<f64>>,
    /// Second partials `∂²f/∂v_i∂v_j`, symmetric in `(i, j)`.
    pub d2: Vec<Vec<DVector<f64>>>,
}

pub fn immersion_jet(spec: &ImmersionSpec, u: &[f64]) -> Result<ImmersionJet, FrameError> {
    let m = spec.chart_dim;
    let n = spec.ambient_dim();
    assert_eq!(u.len(), m, "chart point has wrong dimension");
    let mut value = DVector::zeros(n);
    let mut d1 = vec![DVector::zeros(n); m];
    let mut d2 = vec![vec![DVector::zeros(n); m]; m];
    for (c, expr) in spec.components.iter().enumerate() {
        let jet = expr.eval_jet(u, 2)?;
        value[c] = jet.value;
        for i in 0..m {
            d1[i][c] = jet.grad[i];
            for j in 0..m {
                d2[i][j][c] = jet.hess_at(i, j);
            }
        }
    }
    Ok(ImmersionJet {
        u: u.to_vec(),
        value,
        d1,
        d2,
    })
}

/// Deterministic choices made by the default frame construction,
/// recorded so stencil evaluations can reproduce the same smooth field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameHints {
    /// Chart index whose radical coefficient is scaled to 1.
    pub xi_pivot: usize,
    /// Chart index dropped when building the screen's complement basis.
    pub screen_drop: usize,
}

/// The adapted frame at one chart point.
#[derive(Debug, Clone)]
pub struct FramePoint {
    pub u: Vec<f64>,
    pub jet: ImmersionJet,
    /// Induced metric `g_ij = <T_i, T_j>` (degenerate, rank m-1).
    pub gram: DMatrix<f64>,
    /// Radical section, ambient components.
    pub xi: DVector<f64>,
    /// Radical section in the chart basis: `xi = Σ xi_chart[i] T_i`.
    pub xi_chart: DVector<f64>,
    /// Screen basis, ambient components, orthonormal spacelike.
    pub screen: Vec<DVector<f64>>,
    pub screen_chart: Vec<DVector<f64>>,
    /// Unit spacelike co-screen section `L`.
    pub coscreen: DVector<f64>,
    /// Null transversal `N`.
    pub transversal: DVector<f64>,
    /// `eta_i = <T_i, N>`; the `xi`-component functional of the tangent
    /// frame decomposition.
    pub eta: DVector<f64>,
    pub hints: FrameHints,
}

impl FramePoint {
    pub fn chart_dim(&self) -> usize {
        self.u.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.jet.value.len()
    }

    /// Tangent vectors as columns of an `(m+2) x m` matrix.
    pub fn tangent_matrix(&self) -> DMatrix<f64> {
        let n = self.ambient_dim();
        let m = self.chart_dim();
        DMatrix::from_fn(n, m, |r, c| self.jet.d1[c][r])
    }

    /// Columns `[T_1 .. T_m, N, L]`; a basis of the ambient space along
    /// the immersion.
    pub fn adapted_basis(&self) -> DMatrix<f64> {
        let n = self.ambient_dim();
        let m = self.chart_dim();
        DMatrix::from_fn(n, n, |r, c| {
            if c < m {
                self.jet.d1[c][r]
            } else if c == m {
                self.transversal[r]
            } else {
                self.coscreen[r]
            }
        })
    }

    /// Express an ambient vector in the adapted basis: tangent chart
    /// coefficients, transversal coefficient, co-screen coefficient.
    pub fn decompose(&self, v: &DVector<f64>) -> (DVector<f64>, f64, f64) {
        let m = self.chart_dim();
        let lu = self.adapted_basis().lu();
        let sol = lu.solve(v).expect("adapted frame basis is singular");
        let chart = DVector::from_fn(m, |i, _| sol[i]);
        (chart, sol[m], sol[m + 1])
    }

    /// Map chart coefficients to the ambient tangent vector.
    pub fn chart_to_ambient(&self, c: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.ambient_dim());
        for (i, coeff) in c.iter().enumerate() {
            out += &self.jet.d1[i] * *coeff;
        }
        out
    }

    /// Chart coefficients of the frame basis `{xi, W_1, ..., W_{m-1}}`
    /// as columns of an `m x m` matrix.
    pub fn frame_basis_chart(&self) -> DMatrix<f64> {
        let m = self.chart_dim();
        DMatrix::from_fn(m, m, |r, c| {
            if c == 0 {
                self.xi_chart[r]
            } else {
                self.screen_chart[c - 1][r]
            }
        })
    }
}

/// Express a tangent ambient vector in chart coordinates by least
/// squares; returns the coefficients and the out-of-tangent residual.
fn chart_coords_lsq(tangent: &DMatrix<f64>, v: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = tangent.clone().svd(true, true);
    let coeffs = svd
        .solve(v, 1e-13)
        .expect("least-squares solve cannot fail with computed u/v");
    let residual = (tangent * &coeffs - v).norm();
    (coeffs, residual)
}

/// Build the frame with default choices at `u`.
pub fn build_frame(spec: &ImmersionSpec, u: &[f64]) -> Result<FramePoint, FrameError> {
    build_frame_inner(spec, u, None, None)
}

/// Build the frame at `u` reproducing the reference point's gauge
/// choices and aligning default-constructed parts to it. Used for
/// finite-difference stencils.
pub fn build_frame_aligned(
    spec: &ImmersionSpec,
    u: &[f64],
    reference: &FramePoint,
) -> Result<FramePoint, FrameError> {
    build_frame_inner(spec, u, Some(reference.hints), Some(reference))
}

fn build_frame_inner(
    spec: &ImmersionSpec,
    u: &[f64],
    hints: Option<FrameHints>,
    align: Option<&FramePoint>,
) -> Result<FramePoint, FrameError> {
    let m = spec.chart_dim;
    let n = spec.ambient_dim();
    let space = spec.ambient();
    let jet = immersion_jet(spec, u)?;
    let point = u.to_vec();

    let tangent = DMatrix::from_fn(n, m, |r, c| jet.d1[c][r]);
    let svd_rank = tangent.clone().svd(false, false).rank(1e-10);
    if svd_rank < m {
        return Err(FrameError::TangentRankDeficient {
            rank: svd_rank,
            expected: m,
            point,
        });
    }

    let gram = space.gram(&jet.d1);
    let (_, kernel) = null_kernel(&gram, KERNEL_REL_TOL);
    if kernel.len() != 1 {
        return Err(FrameError::NotHalfLightlike {
            radical_rank: kernel.len(),
            point,
        });
    }
    let kernel_unit = kernel.into_iter().next().expect("one kernel vector");

    // Radical section.
    let (xi, xi_chart, xi_pivot) = match &spec.radical {
        Some(exprs) => {
            let cand = eval_vector(exprs, u)?;
            let scale = cand.norm();
            if scale < 1e-12 {
                return Err(FrameError::OverrideInvalid {
                    which: "radical",
                    condition: "section vanishes".into(),
                    point,
                });
            }
            let null_defect = space.norm2(&cand).abs() / (scale * scale);
            if null_defect > OVERRIDE_TOL {
                return Err(FrameError::OverrideInvalid {
                    which: "radical",
                    condition: format!("not null: |<xi, xi>| / |xi|² = {null_defect:.3e}"),
                    point,
                });
            }
            let (coeffs, residual) = chart_coords_lsq(&tangent, &cand);
            if residual / scale > OVERRIDE_TOL {
                return Err(FrameError::OverrideInvalid {
                    which: "radical",
                    condition: format!("not tangent: residual {residual:.3e}"),
                    point,
                });
            }
            let radical_defect = (&gram * &coeffs).norm() / (1.0 + coeffs.norm());
            if radical_defect > OVERRIDE_TOL {
                return Err(FrameError::OverrideInvalid {
                    which: "radical",
                    condition: format!(
                        "not in the metric kernel: |g xi| = {radical_defect:.3e}"
                    ),
                    point,
                });
            }
            (cand, coeffs, 0)
        }
        None => {
            let pivot = match hints {
                Some(h) => h.xi_pivot,
                None => {
                    let max = kernel_unit.amax();
                    kernel_unit
                        .iter()
                        .position(|c| c.abs() > 1e-6 * max)
                        .expect("kernel vector is nonzero")
                }
            };
            let pivot_coeff = kernel_unit[pivot];
            if pivot_coeff.abs() < 1e-10 {
                return Err(FrameError::AlignmentFailed {
                    detail: format!("radical pivot coefficient {pivot_coeff:.3e} too small"),
                    point,
                });
            }
            let coeffs = &kernel_unit / pivot_coeff;
            let xi = &tangent * &coeffs;
            (xi, coeffs, pivot)
        }
    };

    // Screen basis.
    let (mut screen, mut screen_chart, screen_drop) = match &spec.screen {
        Some(rows) => {
            let mut screen = Vec::with_capacity(m - 1);
            let mut chart = Vec::with_capacity(m - 1);
            for row in rows {
                let w = eval_vector(row, u)?;
                let (coeffs, residual) = chart_coords_lsq(&tangent, &w);
                if residual / (1.0 + w.norm()) > OVERRIDE_TOL {
                    return Err(FrameError::OverrideInvalid {
                        which: "screen",
                        condition: format!("section not tangent: residual {residual:.3e}"),
                        point,
                    });
                }
                screen.push(w);
                chart.push(coeffs);
            }
            let wg = space.gram(&screen);
            let id = DMatrix::<f64>::identity(m - 1, m - 1);
            let defect = (&wg - &id).norm();
            if defect > OVERRIDE_TOL {
                return Err(FrameError::OverrideInvalid {
                    which: "screen",
                    condition: format!("basis not orthonormal: |Gram - I| = {defect:.3e}"),
                    point,
                });
            }
            (screen, chart, 0)
        }
        None => {
            let drop = match hints {
                Some(h) => h.screen_drop,
                None => kernel_unit.iamax(),
            };
            // The coordinate directions other than the radical's pivot
            // form a complement of the radical; the metric restricted to
            // it is automatically nondegenerate, and every tangent vector
            // is orthogonal to the radical, so no projection is needed.
            let mut raw_chart: Vec<DVector<f64>> = Vec::with_capacity(m - 1);
            for i in (0..m).filter(|&i| i != drop) {
                let mut e = DVector::zeros(m);
                e[i] = 1.0;
                raw_chart.push(e);
            }
            // Gram-Schmidt in the ambient metric, carrying chart
            // coefficients through the same elimination.
            let mut screen = Vec::with_capacity(m - 1);
            let mut chart = Vec::with_capacity(m - 1);
            for rc in raw_chart {
                let mut w = &tangent * &rc;
                let mut wc = rc;
                for (e, ec) in screen.iter().zip(chart.iter()) {
                    let c = space.inner(&w, e);
                    w -= e * c;
                    wc -= ec * c;
                }
                let q = space.norm2(&w);
                if q <= 1e-12 * (1.0 + w.norm_squared()) {
                    return Err(FrameError::DegenerateScreen {
                        detail: format!("screen pivot degenerates: <w, w> = {q:.3e}"),
                        point,
                    });
                }
                let inv = 1.0 / q.sqrt();
                screen.push(w * inv);
                chart.push(wc * inv);
            }
            (screen, chart, drop)
        }
    };

    // Align a default screen to the reference frame (sign and order).
    if spec.screen.is_none() {
        if let Some(reference) = align {
            let mut permuted_screen = vec![DVector::zeros(n); m - 1];
            let mut permuted_chart = vec![DVector::zeros(m); m - 1];
            let mut used = vec![false; m - 1];
            for b in 0..m - 1 {
                let mut best = (0usize, 0.0f64);
                for (a, w) in screen.iter().enumerate() {
                    let o = space.inner(w, &reference.screen[b]);
                    if o.abs() > best.1.abs() {
                        best = (a, o);
                    }
                }
                let (a, o) = best;
                if used[a] || o.abs() < 0.5 {
                    return Err(FrameError::AlignmentFailed {
                        detail: format!(
                            "screen overlap with reference ambiguous (|overlap| = {:.3})",
                            o.abs()
                        ),
                        point,
                    });
                }
                used[a] = true;
                let s = o.signum();
                permuted_screen[b] = &screen[a] * s;
                permuted_chart[b] = &screen_chart[a] * s;
            }
            screen = permuted_screen;
            screen_chart = permuted_chart;
        }
    }

    // Co-screen section.
    let coscreen = match &spec.coscreen {
        Some(exprs) => {
            let l = eval_vector(exprs, u)?;
            let unit_defect = (space.norm2(&l) - 1.0).abs();
            if unit_defect > OVERRIDE_TOL {
                return Err(FrameError::OverrideInvalid {
                    which: "coscreen",
                    condition: format!("not unit spacelike: |<L, L> - 1| = {unit_defect:.3e}"),
                    point,
                });
            }
            let normal_defect = jet
                .d1
                .iter()
                .map(|t| space.inner(&l, t).abs())
                .fold(0.0f64, f64::max);
            if normal_defect > OVERRIDE_TOL {
                return Err(FrameError::OverrideInvalid {
                    which: "coscreen",
                    condition: format!("not normal: max |<L, T_i>| = {normal_defect:.3e}"),
                    point,
                });
            }
            l
        }
        None => {
            // Normal space = kernel of the Euclidean Gram of the lowered
            // tangents; two-dimensional for an immersion of codimension 2.
            let lowered: Vec<DVector<f64>> = jet.d1.iter().map(|t| space.lower(t)).collect();
            let mut quad = DMatrix::zeros(n, n);
            for w in &lowered {
                quad += w * w.transpose();
            }
            let (_, normal_basis) = null_kernel(&quad, 1e-11);
            if normal_basis.len() != 2 {
                return Err(FrameError::NoSpacelikeCoscreen { point });
            }
            // The co-screen direction is the (unique) line in the normal
            // plane that is Euclidean-orthogonal to the radical.
            let xi_unit = &xi / xi.norm();
            let mut best: Option<DVector<f64>> = None;
            for nb in &normal_basis {
                let d = nb - &xi_unit * nb.dot(&xi_unit);
                if best.as_ref().map_or(true, |b| d.norm() > b.norm()) {
                    best = Some(d);
                }
            }
            let d = best.expect("normal basis nonempty");
            if d.norm() < 1e-10 {
                return Err(FrameError::NoSpacelikeCoscreen { point });
            }
            let q = space.norm2(&d);
            if q <= 1e-10 * d.norm_squared() {
                return Err(FrameError::NoSpacelikeCoscreen { point });
            }
            let mut l = d / q.sqrt();
            match align {
                Some(reference) => {
                    if space.inner(&l, &reference.coscreen) < 0.0 {
                        l.neg_mut();
                    }
                }
                None => {
                    if l[l.iamax()] < 0.0 {
                        l.neg_mut();
                    }
                }
            }
            l
        }
    };

    // Null transversal: the unique null vector in the orthocomplement of
    // the screen and co-screen that pairs to 1 with the radical.
    let mut rows: Vec<DVector<f64>> = screen.iter().map(|w| space.lower(w)).collect();
    rows.push(space.lower(&coscreen));
    let mut quad = DMatrix::zeros(n, n);
    for r in &rows {
        quad += r * r.transpose();
    }
    let (_, pair_basis) = null_kernel(&quad, 1e-11);
    if pair_basis.len() != 2 {
        return Err(FrameError::DegenerateScreen {
            detail: format!(
                "orthocomplement of screen and co-screen has dimension {}, expected 2",
                pair_basis.len()
            ),
            point,
        });
    }
    let v = pair_basis
        .iter()
        .max_by(|a, b| {
            let pa = space.inner(a, &xi).abs();
            let pb = space.inner(b, &xi).abs();
            pa.partial_cmp(&pb).expect("finite pairings")
        })
        .expect("two basis vectors");
    let c = space.inner(v, &xi);
    if c.abs() < 1e-10 {
        return Err(FrameError::DegenerateScreen {
            detail: "no direction pairing with the radical; frame is degenerate".into(),
            point,
        });
    }
    let a = space.norm2(v);
    let transversal = (v - &xi * (a / (2.0 * c))) / c;

    let eta = DVector::from_fn(m, |i, _| space.inner(&jet.d1[i], &transversal));

    Ok(FramePoint {
        u: point,
        jet,
        gram,
        xi,
        xi_chart,
        screen,
        screen_chart,
        coscreen,
        transversal,
        eta,
        hints: FrameHints {
            xi_pivot,
            screen_drop,
        },
    })
}

/// How frame derivatives were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivRoute {
    /// Exact expression jets plus an implicit solve for the transversal.
    Jet,
    /// Richardson-extrapolated central differences of aligned frames.
    Fd,
}

/// First derivatives of the frame fields along each chart direction.
#[derive(Debug, Clone)]
pub struct FrameDerivatives {
    /// `∂xi/∂v_i`, ambient components.
    pub d_xi: Vec<DVector<f64>>,
    /// `d_screen[i][a] = ∂W_a/∂v_i`.
    pub d_screen: Vec<Vec<DVector<f64>>>,
    /// `∂L/∂v_i`.
    pub d_coscreen: Vec<DVector<f64>>,
    /// `∂N/∂v_i`.
    pub d_transversal: Vec<DVector<f64>>,
    pub route: DerivRoute,
}

/// Central-difference step for direction `i`, shrunk to keep the whole
/// stencil inside the domain box.
pub fn fd_step(spec: &ImmersionSpec, u: &[f64], i: usize) -> Result<f64, FrameError> {
    let (lo, hi) = spec.domain[i];
    let mut h = FD_STEP * (1.0 + u[i].abs());
    let room = (u[i] - lo).min(hi - u[i]);
    if room <= 0.0 {
        return Err(FrameError::StencilOutsideDomain {
            point: u.to_vec(),
            h,
        });
    }
    h = h.min(0.9 * room);
    if h < 1e-10 * (1.0 + u[i].abs()) {
        return Err(FrameError::StencilOutsideDomain {
            point: u.to_vec(),
            h,
        });
    }
    Ok(h)
}

/// Richardson extrapolation of a central difference: combines the
/// difference at step `h` and `h/2` to cancel the leading error term.
fn richardson(
    f: &mut dyn FnMut(f64) -> Result<DVector<f64>, FrameError>,
    h: f64,
) -> Result<DVector<f64>, FrameError> {
    let full = (f(h)? - f(-h)?) / (2.0 * h);
    let half = (f(h / 2.0)? - f(-h / 2.0)?) / h;
    Ok(half * (4.0 / 3.0) - full / 3.0)
}

/// Frame derivatives by aligned central differences. Works for any
/// spec; each stencil frame is rebuilt and aligned to the center gauge.
pub fn fd_frame_derivatives(
    spec: &ImmersionSpec,
    center: &FramePoint,
) -> Result<FrameDerivatives, FrameError> {
    let m = spec.chart_dim;
    let mut d_xi = Vec::with_capacity(m);
    let mut d_screen = Vec::with_capacity(m);
    let mut d_coscreen = Vec::with_capacity(m);
    let mut d_transversal = Vec::with_capacity(m);
    for i in 0..m {
        let h = fd_step(spec, &center.u, i)?;
        let mut frames: Vec<(f64, FramePoint)> = Vec::with_capacity(4);
        for t in [h, -h, h / 2.0, -h / 2.0] {
            let mut v = center.u.clone();
            v[i] += t;
            frames.push((t, build_frame_aligned(spec, &v, center)?));
        }
        let lookup = |field: &dyn Fn(&FramePoint) -> DVector<f64>| {
            let mut f = |t: f64| -> Result<DVector<f64>, FrameError> {
                let fp = &frames
                    .iter()
                    .find(|(s, _)| *s == t)
                    .expect("stencil offset present")
                    .1;
                Ok(field(fp))
            };
            richardson(&mut f, h)
        };
        d_xi.push(lookup(&|fp: &FramePoint| fp.xi.clone())?);
        let mut ds = Vec::with_capacity(m - 1);
        for a in 0..m - 1 {
            ds.push(lookup(&|fp: &FramePoint| fp.screen[a].clone())?);
        }
        d_screen.push(ds);
        d_coscreen.push(lookup(&|fp: &FramePoint| fp.coscreen.clone())?);
        d_transversal.push(lookup(&|fp: &FramePoint| fp.transversal.clone())?);
    }
    Ok(FrameDerivatives {
        d_xi,
        d_screen,
        d_coscreen,
        d_transversal,
        route: DerivRoute::Fd,
    })
}

/// Exact frame derivatives from override expressions. The transversal's
/// derivative is recovered from the derivatives of its defining pairing
/// conditions by a linear solve in the adapted frame.
pub fn jet_frame_derivatives(
    spec: &ImmersionSpec,
    center: &FramePoint,
) -> Result<FrameDerivatives, FrameError> {
    let (radical, screen_rows, coscreen) = match (&spec.radical, &spec.screen, &spec.coscreen) {
        (Some(r), Some(s), Some(c)) => (r, s, c),
        _ => {
            return Err(FrameError::InvalidSpec(
                "exact frame derivatives need radical, screen, and coscreen overrides".into(),
            ))
        }
    };
    let m = spec.chart_dim;
    let n = spec.ambient_dim();
    let space = spec.ambient();
    let u = &center.u;

    let (_, d_xi) = eval_vector_jet(radical, u)?;
    let mut d_screen_by_a = Vec::with_capacity(m - 1);
    for row in screen_rows {
        let (_, d) = eval_vector_jet(row, u)?;
        d_screen_by_a.push(d);
    }
    let (_, d_coscreen) = eval_vector_jet(coscreen, u)?;
    let d_screen: Vec<Vec<DVector<f64>>> = (0..m)
        .map(|i| (0..m - 1).map(|a| d_screen_by_a[a][i].clone()).collect())
        .collect();

    // Differentiating <N, xi> = 1, <N, W_a> = 0, <N, L> = 0, <N, N> = 0
    // gives a linear system for each ∂N/∂v_i with the same matrix: rows
    // are the lowered frame vectors.
    let mut rows = DMatrix::zeros(n, n);
    let mut set_row = |r: usize, v: &DVector<f64>| {
        let low = space.lower(v);
        for c in 0..n {
            rows[(r, c)] = low[c];
        }
    };
    set_row(0, &center.xi);
    for (a, w) in center.screen.iter().enumerate() {
        set_row(1 + a, w);
    }
    set_row(m, &center.coscreen);
    set_row(m + 1, &center.transversal);
    let lu = rows.lu();

    let nvec = &center.transversal;
    let mut d_transversal = Vec::with_capacity(m);
    for i in 0..m {
        let mut rhs = DVector::zeros(n);
        rhs[0] = -space.inner(nvec, &d_xi[i]);
        for a in 0..m - 1 {
            rhs[1 + a] = -space.inner(nvec, &d_screen[i][a]);
        }
        rhs[m] = -space.inner(nvec, &d_coscreen[i]);
        rhs[m + 1] = 0.0;
        let sol = lu.solve(&rhs).ok_or_else(|| FrameError::DegenerateScreen {
            detail: "adapted frame Gram is singular while differentiating the transversal".into(),
            point: u.clone(),
        })?;
        d_transversal.push(sol);
    }

    Ok(FrameDerivatives {
        d_xi,
        d_screen,
        d_coscreen,
        d_transversal,
        route: DerivRoute::Jet,
    })
}

/// Frame derivatives by the best available route: exact jets when all
/// overrides are present, aligned finite differences otherwise.
pub fn frame_derivatives(
    spec: &ImmersionSpec,
    center: &FramePoint,
) -> Result<FrameDerivatives, FrameError> {
    if spec.has_full_overrides() {
        jet_frame_derivatives(spec, center)
    } else {
        fd_frame_derivatives(spec, center)
    }
}

/// Rescale the radical override by a positive scalar field, leaving the
/// rest of the spec untouched. Models the gauge freedom in choosing the
/// radical section.
pub fn gauge_rescale(spec: &ImmersionSpec, alpha: &Expression) -> Result<ImmersionSpec, FrameError> {
    let radical = spec.radical.as_ref().ok_or_else(|| {
        FrameError::InvalidSpec("gauge rescale needs an explicit radical override".into())
    })?;
    if alpha.max_var() > spec.chart_dim {
        return Err(FrameError::InvalidSpec(format!(
            "gauge factor uses v{} but the chart has {} variables",
            alpha.max_var(),
            spec.chart_dim
        )));
    }
    let mut out = spec.clone();
    out.name = format!("{}*rescaled", spec.name);
    out.radical = Some(
        radical
            .iter()
            .map(|c| {
                Expression::new(Ast::Mul(
                    Box::new(alpha.ast().clone()),
                    Box::new(c.ast().clone()),
                ))
            })
            .collect(),
    );
    Ok(out)
}
