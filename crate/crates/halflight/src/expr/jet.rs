//! Truncated multivariate jets up to order 3.
//!
//! A [`Jet`] carries the value of a function of `dim` variables together
//! with its gradient, Hessian, and (optionally) symmetric third
//! derivative tensor at a point. Arithmetic propagates all stored
//! derivatives exactly (Leibniz and Faà di Bruno rules), so derivatives
//! obtained this way carry no truncation error, only rounding.
//!
//! Storage is dense and fully symmetric: the Hessian holds `dim²`
//! entries and the third tensor `dim³`, with every permutation of an
//! index triple set to the same value. Chart dimensions here are tiny
//! (m ≤ 6 or so), so the redundancy costs nothing and keeps contraction
//! code index-free of symmetry bookkeeping.

/// Value and derivatives of a scalar function at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    dim: usize,
    order: usize,
    pub value: f64,
    /// Gradient, length `dim`. Present for `order >= 1`.
    pub grad: Vec<f64>,
    /// Hessian, row-major `dim x dim`. Empty unless `order >= 2`.
    pub hess: Vec<f64>,
    /// Third derivatives, `dim³` entries. Empty unless `order == 3`.
    pub third: Vec<f64>,
}

impl Jet {
    /// The constant function `c`.
    pub fn constant(dim: usize, order: usize, c: f64) -> Self {
        assert!((1..=3).contains(&order), "jet order must be 1..=3");
        Jet {
            dim,
            order,
            value: c,
            grad: vec![0.0; dim],
            hess: if order >= 2 { vec![0.0; dim * dim] } else { Vec::new() },
            third: if order >= 3 { vec![0.0; dim * dim * dim] } else { Vec::new() },
        }
    }

    /// The coordinate function `v_{index+1}` evaluated at `value`.
    pub fn variable(dim: usize, order: usize, index: usize, value: f64) -> Self {
        assert!(index < dim, "variable index out of range");
        let mut j = Jet::constant(dim, order, value);
        j.grad[index] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Hessian entry `(i, j)`.
    pub fn hess_at(&self, i: usize, j: usize) -> f64 {
        self.hess[idx2(self.dim, i, j)]
    }

    /// Third-derivative entry `(i, j, k)`.
    pub fn third_at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.third[idx3(self.dim, i, j, k)]
    }

    fn assert_compatible(&self, other: &Jet) {
        assert_eq!(self.dim, other.dim, "jet dimensions differ");
        assert_eq!(self.order, other.order, "jet orders differ");
    }

    pub fn neg(&self) -> Jet {
        let mut r = self.clone();
        r.value = -r.value;
        for g in &mut r.grad {
            *g = -*g;
        }
        for h in &mut r.hess {
            *h = -*h;
        }
        for t in &mut r.third {
            *t = -*t;
        }
        r
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.assert_compatible(other);
        let mut r = self.clone();
        r.value += other.value;
        for (a, b) in r.grad.iter_mut().zip(&other.grad) {
            *a += b;
        }
        for (a, b) in r.hess.iter_mut().zip(&other.hess) {
            *a += b;
        }
        for (a, b) in r.third.iter_mut().zip(&other.third) {
            *a += b;
        }
        r
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.add(&other.neg())
    }

    /// Leibniz product rule through order 3.
    pub fn mul(&self, other: &Jet) -> Jet {
        self.assert_compatible(other);
        let n = self.dim;
        let (a, b) = (self, other);
        let mut r = Jet::constant(n, self.order, a.value * b.value);
        for i in 0..n {
            r.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
        }
        if self.order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    r.hess[idx2(n, i, j)] = a.hess_at(i, j) * b.value
                        + a.grad[i] * b.grad[j]
                        + a.grad[j] * b.grad[i]
                        + a.value * b.hess_at(i, j);
                }
            }
        }
        if self.order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        r.third[idx3(n, i, j, k)] = a.third_at(i, j, k) * b.value
                            + a.hess_at(i, j) * b.grad[k]
                            + a.hess_at(i, k) * b.grad[j]
                            + a.hess_at(j, k) * b.grad[i]
                            + a.grad[i] * b.hess_at(j, k)
                            + a.grad[j] * b.hess_at(i, k)
                            + a.grad[k] * b.hess_at(i, j)
                            + a.value * b.third_at(i, j, k);
                    }
                }
            }
        }
        r
    }

    /// Compose with a univariate function given its derivatives
    /// `[f, f', f'', f''']` at `self.value` (chain rule through order 3).
    pub fn compose(&self, f: [f64; 4]) -> Jet {
        let n = self.dim;
        let a = self;
        let mut r = Jet::constant(n, self.order, f[0]);
        for i in 0..n {
            r.grad[i] = f[1] * a.grad[i];
        }
        if self.order >= 2 {
            for i in 0..n {
                for j in 0..n {
                    r.hess[idx2(n, i, j)] =
                        f[2] * a.grad[i] * a.grad[j] + f[1] * a.hess_at(i, j);
                }
            }
        }
        if self.order >= 3 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        r.third[idx3(n, i, j, k)] = f[3] * a.grad[i] * a.grad[j] * a.grad[k]
                            + f[2]
                                * (a.hess_at(i, j) * a.grad[k]
                                    + a.hess_at(i, k) * a.grad[j]
                                    + a.hess_at(j, k) * a.grad[i])
                            + f[1] * a.third_at(i, j, k);
                    }
                }
            }
        }
        r
    }

    /// `self / other`. The caller must ensure `other.value != 0`.
    pub fn div(&self, other: &Jet) -> Jet {
        let x = other.value;
        let recip = other.compose([
            1.0 / x,
            -1.0 / (x * x),
            2.0 / (x * x * x),
            -6.0 / (x * x * x * x),
        ]);
        self.mul(&recip)
    }

    /// Integer power. For negative `n` the caller must ensure the value
    /// is nonzero.
    pub fn powi(&self, n: i32) -> Jet {
        self.compose(powi_derivs(self.value, n))
    }

    /// Half-integer power `x^(num/2)`. The caller must ensure the value
    /// is strictly positive.
    pub fn pow_half(&self, num: i32) -> Jet {
        let e = f64::from(num) / 2.0;
        let x = self.value;
        self.compose([
            x.powf(e),
            e * x.powf(e - 1.0),
            e * (e - 1.0) * x.powf(e - 2.0),
            e * (e - 1.0) * (e - 2.0) * x.powf(e - 3.0),
        ])
    }

    /// Square root; value must be strictly positive.
    pub fn sqrt(&self) -> Jet {
        self.pow_half(1)
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.value.sin_cos();
        self.compose([c, -s, -c, s])
    }

    pub fn exp(&self) -> Jet {
        let e = self.value.exp();
        self.compose([e, e, e, e])
    }

    /// Natural logarithm; value must be strictly positive.
    pub fn log(&self) -> Jet {
        let x = self.value;
        self.compose([
            x.ln(),
            1.0 / x,
            -1.0 / (x * x),
            2.0 / (x * x * x),
        ])
    }

    /// Contract the gradient with a direction vector.
    pub fn dir1(&self, d: &[f64]) -> f64 {
        self.grad.iter().zip(d).map(|(g, x)| g * x).sum()
    }

    /// Contract the Hessian with a direction twice.
    pub fn dir2(&self, d: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.hess_at(i, j) * d[i] * d[j];
            }
        }
        acc
    }

    /// Contract the third tensor with a direction three times.
    pub fn dir3(&self, d: &[f64]) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    acc += self.third_at(i, j, k) * d[i] * d[j] * d[k];
                }
            }
        }
        acc
    }

    /// Is every stored coefficient finite?
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|x| x.is_finite())
            && self.hess.iter().all(|x| x.is_finite())
            && self.third.iter().all(|x| x.is_finite())
    }
}

#[inline]
fn idx2(dim: usize, i: usize, j: usize) -> usize {
    i * dim + j
}

#[inline]
fn idx3(dim: usize, i: usize, j: usize, k: usize) -> usize {
    (i * dim + j) * dim + k
}

/// Derivatives `[x^n, (x^n)', (x^n)'', (x^n)''']` with the coefficient
/// computed first so a zero coefficient never multiplies an infinite
/// power (e.g. the third derivative of `x²` at `x = 0`).
fn powi_derivs(x: f64, n: i32) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (k, slot) in out.iter_mut().enumerate() {
        let k = k as i32;
        let mut coeff = 1.0;
        for j in 0..k {
            coeff *= f64::from(n - j);
        }
        *slot = if coeff == 0.0 {
            0.0
        } else {
            coeff * x.powi(n - k)
        };
    }
    out
}
