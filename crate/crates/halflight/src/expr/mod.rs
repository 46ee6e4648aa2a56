//! Expression parsing and evaluation, plain and jet-valued.
//!
//! The grammar covers what the immersion format needs: `v1..vm`
//! variables, decimal literals, `+ - * /`, powers with integer or
//! half-integer exponents, and `sqrt`, `sin`, `cos`, `exp`, `log`.
//! [`Expression::eval`] computes a value; [`Expression::eval_jet`]
//! computes value plus derivatives up to order 3 with no truncation
//! error. The two evaluators share the tree but not the arithmetic, so
//! they can check each other in tests.

mod ast;
mod jet;
mod parser;

pub use ast::{Ast, Exponent, Expression, Func};
pub use jet::Jet;
pub use parser::parse;

use crate::error::EvalError;

impl Expression {
    /// Evaluate the expression and its derivatives at `point`.
    ///
    /// `order` selects how many derivative levels to carry (1 to 3).
    /// Functions with a derivative singularity at the domain boundary
    /// (`sqrt`, `log`, half-integer powers) require strictly positive
    /// arguments here, even where the plain value would still be finite.
    pub fn eval_jet(&self, point: &[f64], order: usize) -> Result<Jet, EvalError> {
        assert!((1..=3).contains(&order), "jet order must be 1..=3");
        if self.max_var() > point.len() {
            return Err(EvalError::VariableOutOfRange {
                var: self.max_var(),
                dim: point.len(),
            });
        }
        let jet = eval_jet_node(self.ast(), point, order)?;
        if !jet.is_finite() {
            return Err(EvalError::NonFinite {
                context: self.ast().to_string(),
            });
        }
        Ok(jet)
    }
}

fn eval_jet_node(node: &Ast, point: &[f64], order: usize) -> Result<Jet, EvalError> {
    let dim = point.len();
    Ok(match node {
        Ast::Const(c) => Jet::constant(dim, order, *c),
        Ast::Var(i) => {
            if *i >= dim {
                return Err(EvalError::VariableOutOfRange {
                    var: i + 1,
                    dim,
                });
            }
            Jet::variable(dim, order, *i, point[*i])
        }
        Ast::Neg(x) => eval_jet_node(x, point, order)?.neg(),
        Ast::Add(a, b) => eval_jet_node(a, point, order)?.add(&eval_jet_node(b, point, order)?),
        Ast::Sub(a, b) => eval_jet_node(a, point, order)?.sub(&eval_jet_node(b, point, order)?),
        Ast::Mul(a, b) => eval_jet_node(a, point, order)?.mul(&eval_jet_node(b, point, order)?),
        Ast::Div(a, b) => {
            let den = eval_jet_node(b, point, order)?;
            if den.value == 0.0 {
                return Err(EvalError::DivisionByZero {
                    context: node.to_string(),
                });
            }
            eval_jet_node(a, point, order)?.div(&den)
        }
        Ast::Pow(base, e) => {
            let b = eval_jet_node(base, point, order)?;
            if e.den == 1 {
                if e.num < 0 && b.value == 0.0 {
                    return Err(EvalError::DivisionByZero {
                        context: node.to_string(),
                    });
                }
                b.powi(e.num)
            } else {
                if b.value <= 0.0 {
                    return Err(EvalError::Domain {
                        func: "pow",
                        arg: b.value,
                        context: node.to_string(),
                    });
                }
                b.pow_half(e.num)
            }
        }
        Ast::Call(func, arg) => {
            let a = eval_jet_node(arg, point, order)?;
            match func {
                Func::Sqrt => {
                    if a.value <= 0.0 {
                        return Err(EvalError::Domain {
                            func: "sqrt",
                            arg: a.value,
                            context: node.to_string(),
                        });
                    }
                    a.sqrt()
                }
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
                Func::Log => {
                    if a.value <= 0.0 {
                        return Err(EvalError::Domain {
                            func: "log",
                            arg: a.value,
                            context: node.to_string(),
                        });
                    }
                    a.log()
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn frozen_jet_of_lorentz_norm() {
        // d = sqrt(v1^2 - v2^2) at (2, 1); value and first derivative
        // fixed to exact decimal expansions computed independently.
        let e = parse("sqrt(v1^2 - v2^2)").unwrap();
        let j = e.eval_jet(&[2.0, 1.0], 3).unwrap();
        assert_eq!(j.value, 1.7320508075688772);
        assert_eq!(j.grad[0], 1.1547005383792515);
        let s = 3f64.sqrt();
        assert_relative_eq!(j.grad[1], -1.0 / s, max_relative = 1e-15);
        assert_relative_eq!(j.hess_at(0, 0), -1.0 / (3.0 * s), max_relative = 1e-14);
        assert_relative_eq!(j.hess_at(0, 1), 2.0 / (3.0 * s), max_relative = 1e-14);
        assert_relative_eq!(j.hess_at(1, 1), -4.0 / (3.0 * s), max_relative = 1e-14);
        assert_relative_eq!(
            j.third_at(0, 0, 0),
            6.0 / (9.0 * s),
            max_relative = 1e-13
        );
    }

    #[test]
    fn jet_agrees_with_plain_eval() {
        let exprs = [
            "v1^2*v2 - v3/(1 + v1^2)",
            "sin(v1)*cos(v2) + exp(v3/4)",
            "log(1 + v1^2) + sqrt(4 + v2^2)",
            "(v1 + v2)^(3/2)/v3",
        ];
        let p = [0.8, -0.4, 1.7];
        for src in exprs {
            let e = parse(src).unwrap();
            let j = e.eval_jet(&p, 3).unwrap();
            assert_relative_eq!(j.value, e.eval(&p).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn strict_domain_for_derivative_singularities() {
        let e = parse("sqrt(v1)").unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), 0.0);
        assert!(matches!(
            e.eval_jet(&[0.0], 1),
            Err(EvalError::Domain { .. })
        ));
        let p = parse("v1^(1/2)").unwrap();
        assert!(matches!(
            p.eval_jet(&[0.0], 1),
            Err(EvalError::Domain { .. })
        ));
    }

    /// Independent finite-difference check of all three derivative levels
    /// along a fixed direction, for a bank of expressions exercising
    /// every operator.
    #[test]
    fn directional_derivatives_match_central_differences() {
        let bank = [
            "v1*v2 + v2*v3",
            "v1/(v2 + 3)",
            "v1^3 - 2*v2^2 + v3",
            "sqrt(v1 + 2)*sin(v2)",
            "exp(v1/2)*log(v2 + 3)",
            "cos(v1*v2)",
            "(v1 + 4)^(-1/2) + v2^(5/2)",
            "-v1^2 + (-v2)^3",
        ];
        let p = [0.9, 0.6, -0.3];
        let d = [0.7, -0.4, 0.5];
        for src in bank {
            let e = parse(src).unwrap();
            let j = e.eval_jet(&p, 3).unwrap();
            let phi = |t: f64| {
                let q: Vec<f64> = p.iter().zip(&d).map(|(x, v)| x + t * v).collect();
                e.eval(&q).unwrap()
            };
            let h = 1e-4;
            let d1 = (phi(h) - phi(-h)) / (2.0 * h);
            assert_relative_eq!(j.dir1(&d), d1, max_relative = 1e-6, epsilon = 1e-9);
            let h = 1e-4;
            let d2 = (phi(h) - 2.0 * phi(0.0) + phi(-h)) / (h * h);
            assert_relative_eq!(j.dir2(&d), d2, max_relative = 1e-5, epsilon = 1e-6);
            let h = 2e-3;
            let d3 =
                (phi(2.0 * h) - 2.0 * phi(h) + 2.0 * phi(-h) - phi(-2.0 * h)) / (2.0 * h * h * h);
            assert_relative_eq!(j.dir3(&d), d3, max_relative = 2e-4, epsilon = 1e-4);
        }
    }
}
