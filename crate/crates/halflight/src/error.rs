//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced while parsing an expression string.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    /// The token stream did not match the grammar.
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },

    /// An identifier that is neither a variable (`v1`, `v2`, ...) nor a
    /// known function name.
    #[error("{line}:{col}: unknown identifier `{name}`")]
    UnknownIdentifier { line: usize, col: usize, name: String },

    /// A numeric literal that started like a number but cannot be one.
    #[error("{line}:{col}: malformed number `{text}`")]
    MalformedNumber { line: usize, col: usize, text: String },

    /// An exponent that is not an integer or half-integer.
    #[error("{line}:{col}: unsupported exponent; only integer and half-integer exponents are allowed")]
    BadExponent { line: usize, col: usize },

    /// A character the lexer does not recognize at all.
    #[error("{line}:{col}: unexpected character `{ch}`")]
    UnexpectedChar { line: usize, col: usize, ch: char },
}

/// Errors produced while evaluating an expression (plain or jet).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// The expression references `v{index+1}` but the evaluation point
    /// has fewer coordinates.
    #[error("expression uses v{var} but the point has only {dim} coordinate(s)")]
    VariableOutOfRange { var: usize, dim: usize },

    /// Division where the denominator evaluated to zero.
    #[error("division by zero while evaluating `{context}`")]
    DivisionByZero { context: String },

    /// A function evaluated outside its real domain, for example
    /// `sqrt` or `log` of a non-positive argument, or a negative base
    /// under a half-integer power.
    #[error("{func}({arg}) is outside the real domain while evaluating `{context}`")]
    Domain {
        func: &'static str,
        arg: f64,
        context: String,
    },

    /// A non-finite value (NaN or infinity) appeared.
    #[error("non-finite value while evaluating `{context}`")]
    NonFinite { context: String },
}

/// Errors produced while building or differentiating frames.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    /// The differential of the immersion drops rank at the point.
    #[error("tangent map has rank {rank} < {expected} at {point:?}; not an immersion there")]
    TangentRankDeficient {
        rank: usize,
        expected: usize,
        point: Vec<f64>,
    },

    /// The induced metric's radical does not have rank exactly one.
    #[error("induced metric has a radical of rank {radical_rank} at {point:?}; need rank exactly 1")]
    NotHalfLightlike {
        radical_rank: usize,
        point: Vec<f64>,
    },

    /// The candidate screen bundle is degenerate (its Gram matrix is
    /// numerically singular), so it is not a Riemannian complement.
    #[error("screen distribution degenerate at {point:?}: {detail}")]
    DegenerateScreen { detail: String, point: Vec<f64> },

    /// No spacelike direction exists in the orthogonal complement of the
    /// tangent space transverse to the radical.
    #[error("no spacelike co-screen direction at {point:?}")]
    NoSpacelikeCoscreen { point: Vec<f64> },

    /// A user-supplied frame override failed one of its defining
    /// conditions at the point.
    #[error("{which} override invalid at {point:?}: {condition}")]
    OverrideInvalid {
        which: &'static str,
        condition: String,
        point: Vec<f64>,
    },

    /// A finite-difference stencil would sample outside the domain box.
    #[error("finite-difference stencil leaves the domain box at {point:?} (step {h})")]
    StencilOutsideDomain { point: Vec<f64>, h: f64 },

    /// Frames at nearby stencil points could not be matched to the
    /// center frame (sign/permutation alignment failed).
    #[error("frame alignment failed near {point:?}: {detail}")]
    AlignmentFailed { detail: String, point: Vec<f64> },

    /// The immersion specification itself is inconsistent.
    #[error("invalid immersion spec: {0}")]
    InvalidSpec(String),

    /// An expression failed to evaluate.
    #[error(transparent)]
    Eval(#[from] EvalError),
}
