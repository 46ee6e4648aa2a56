//! Expression tree, canonical printing, and plain (value-only) evaluation.

use std::fmt;

use crate::error::EvalError;

/// Unary functions the grammar knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }
}

/// A power exponent: an integer (`den == 1`) or a half-integer
/// (`den == 2`, `num` odd or even). Only these two denominators exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exponent {
    pub num: i32,
    pub den: u8,
}

impl Exponent {
    pub fn int(num: i32) -> Self {
        Exponent { num, den: 1 }
    }

    pub fn half(num: i32) -> Self {
        Exponent { num, den: 2 }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

/// Expression tree. Variables are stored zero-based; the surface syntax
/// `v1` maps to `Var(0)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Const(f64),
    Var(usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Exponent),
    Call(Func, Box<Ast>),
}

impl Ast {
    /// Binding strength used by the canonical printer. Higher binds tighter.
    fn prec(&self) -> u8 {
        match self {
            Ast::Add(..) | Ast::Sub(..) => 1,
            Ast::Mul(..) | Ast::Div(..) => 2,
            Ast::Neg(..) => 3,
            Ast::Pow(..) => 4,
            Ast::Const(_) | Ast::Var(_) | Ast::Call(..) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.prec() < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Ast::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "({c})")?;
                } else {
                    write!(f, "{c}")?;
                }
            }
            Ast::Var(i) => write!(f, "v{}", i + 1)?,
            Ast::Neg(x) => {
                write!(f, "-")?;
                x.fmt_prec(f, 4)?;
            }
            Ast::Add(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " + ")?;
                b.fmt_prec(f, 2)?;
            }
            Ast::Sub(a, b) => {
                a.fmt_prec(f, 1)?;
                write!(f, " - ")?;
                b.fmt_prec(f, 2)?;
            }
            Ast::Mul(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "*")?;
                b.fmt_prec(f, 3)?;
            }
            Ast::Div(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, "/")?;
                b.fmt_prec(f, 3)?;
            }
            Ast::Pow(base, e) => {
                base.fmt_prec(f, 5)?;
                match (e.den, e.num >= 0) {
                    (1, true) => write!(f, "^{}", e.num)?,
                    (1, false) => write!(f, "^({})", e.num)?,
                    _ => write!(f, "^({}/2)", e.num)?,
                }
            }
            Ast::Call(func, arg) => {
                write!(f, "{}(", func.name())?;
                arg.fmt_prec(f, 0)?;
                write!(f, ")")?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }

    fn max_var(&self) -> usize {
        match self {
            Ast::Const(_) => 0,
            Ast::Var(i) => i + 1,
            Ast::Neg(x) | Ast::Pow(x, _) | Ast::Call(_, x) => x.max_var(),
            Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        Ok(match self {
            Ast::Const(c) => *c,
            Ast::Var(i) => {
                if *i >= point.len() {
                    return Err(EvalError::VariableOutOfRange {
                        var: i + 1,
                        dim: point.len(),
                    });
                }
                point[*i]
            }
            Ast::Neg(x) => -x.eval(point)?,
            Ast::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Ast::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Ast::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Ast::Div(a, b) => {
                let den = b.eval(point)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero {
                        context: self.to_string(),
                    });
                }
                a.eval(point)? / den
            }
            Ast::Pow(base, e) => {
                let x = base.eval(point)?;
                if e.den == 1 {
                    if e.num < 0 && x == 0.0 {
                        return Err(EvalError::DivisionByZero {
                            context: self.to_string(),
                        });
                    }
                    x.powi(e.num)
                } else {
                    if x < 0.0 {
                        return Err(EvalError::Domain {
                            func: "pow",
                            arg: x,
                            context: self.to_string(),
                        });
                    }
                    if x == 0.0 && e.num < 0 {
                        return Err(EvalError::DivisionByZero {
                            context: self.to_string(),
                        });
                    }
                    x.powf(e.as_f64())
                }
            }
            Ast::Call(func, arg) => {
                let x = arg.eval(point)?;
                match func {
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError::Domain {
                                func: "sqrt",
                                arg: x,
                                context: self.to_string(),
                            });
                        }
                        x.sqrt()
                    }
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(EvalError::Domain {
                                func: "log",
                                arg: x,
                                context: self.to_string(),
                            });
                        }
                        x.ln()
                    }
                }
            }
        })
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// A parsed expression. `Display` produces a canonical form that parses
/// back to the same tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    ast: Ast,
    max_var: usize,
}

impl Expression {
    pub fn new(ast: Ast) -> Self {
        let max_var = ast.max_var();
        Expression { ast, max_var }
    }

    pub fn ast(&self) -> &Ast {
        &self.ast
    }

    /// Highest variable index referenced, as a coordinate count: an
    /// expression mentioning `v3` (and nothing higher) returns 3.
    pub fn max_var(&self) -> usize {
        self.max_var
    }

    /// Evaluate at a point. The point may have more coordinates than the
    /// expression references, never fewer.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        if self.max_var > point.len() {
            return Err(EvalError::VariableOutOfRange {
                var: self.max_var,
                dim: point.len(),
            });
        }
        let v = self.ast.eval(point)?;
        if !v.is_finite() {
            return Err(EvalError::NonFinite {
                context: self.ast.to_string(),
            });
        }
        Ok(v)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

impl serde::Serialize for Expression {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Expression {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}
