//! Singular boundary value problems `y'' + (k/t) y' + f(t, y) = 0` on `(0, 1]`.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::{parse, EvalError, Expr, Var};

/// Boundary data. `Dirichlet` fixes `y(0)` and `y(1)`; `NeumannRobin` fixes
/// `y'(0) = alpha` and `a y(1) + b y'(1) = beta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet {
        alpha: f64,
        beta: f64,
    },
    NeumannRobin {
        alpha: f64,
        a: f64,
        b: f64,
        beta: f64,
    },
}

impl BoundaryCondition {
    pub fn validate(&self) -> Result<()> {
        let finite = match *self {
            BoundaryCondition::Dirichlet { alpha, beta } => alpha.is_finite() && beta.is_finite(),
            BoundaryCondition::NeumannRobin { alpha, a, b, beta } => {
                if a == 0.0 {
                    return Err(Error::Domain("Robin condition requires a != 0".into()));
                }
                [alpha, a, b, beta].iter().all(|v| v.is_finite())
            }
        };
        if !finite {
            return Err(Error::Domain("boundary data must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    /// Coefficient of the `y'/t` term.
    pub k: f64,
    pub f: Expr,
    pub f_y: Expr,
    pub bc: BoundaryCondition,
    pub exact: Option<Expr>,
    /// Constant initial iterate the benchmark was published with.
    pub suggested_guess: Option<f64>,
}

impl Problem {
    /// Builds a problem from an expression for `f`, deriving `f_y`
    /// symbolically.
    pub fn new(
        name: &str,
        k: f64,
        f: &str,
        bc: BoundaryCondition,
        exact: Option<&str>,
    ) -> Result<Problem> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::Domain(format!("k must be finite and >= 0, got {k}")));
        }
        bc.validate()?;
        let f = parse(f)?;
        let exact = match exact {
            Some(text) => {
                let e = parse(text)?;
                if e.depends_on(Var::Y) {
                    return Err(Error::Schema("exact solution must depend on t only".into()));
                }
                Some(e)
            }
            None => None,
        };
        Ok(Problem {
            name: name.to_string(),
            k,
            f_y: f.d_dy(),
            f,
            bc,
            exact,
            suggested_guess: None,
        })
    }

    pub fn eval_f(&self, t: f64, y: f64) -> std::result::Result<f64, EvalError> {
        self.f.eval(t, y)
    }

    pub fn eval_f_y(&self, t: f64, y: f64) -> std::result::Result<f64, EvalError> {
        self.f_y.eval(t, y)
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn eval_exact(&self, t: f64) -> Result<f64> {
        let e = self
            .exact
            .as_ref()
            .ok_or_else(|| Error::MissingExact(self.name.clone()))?;
        Ok(e.eval(t, 0.0)?)
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 5] = [
    "example1",
    "example2",
    "example3",
    "example4",
    "manufactured",
];

/// Benchmark problems.
///
/// * `example1`: stellar structure, `y'' + (2/t) y' + y^5 = 0`.
/// * `example2`: thermal explosion in a cylinder, `f = e^y`.
/// * `example3`: shallow membrane cap, `f = 1/(8y^2) - 1/2`.
/// * `example4`: heat conduction in the human head, `f = e^{-y}`.
/// * `manufactured`: `f = 6` with exact solution `1 - t^2`.
pub fn builtin(name: &str) -> Result<Problem> {
    let robin = |beta: f64, a: f64, b: f64| BoundaryCondition::NeumannRobin {
        alpha: 0.0,
        a,
        b,
        beta,
    };
    let (k, f, bc, exact, guess) = match name {
        "example1" => (
            2.0,
            "y^5",
            robin(0.75f64.sqrt(), 1.0, 0.0),
            Some("sqrt(3/(3+t^2))"),
            Some(0.75f64.sqrt()),
        ),
        "example2" => (
            1.0,
            "exp(y)",
            robin(0.0, 1.0, 0.0),
            Some("2*ln((4-2*sqrt(2))/((3-2*sqrt(2))*t^2+1))"),
            Some(0.0),
        ),
        "example3" => (
            3.0,
            "1/(8*y^2) - 1/2",
            robin(1.0, 1.0, 0.0),
            None,
            Some(1.0),
        ),
        "example4" => (2.0, "exp(-y)", robin(0.0, 2.0, 1.0), None, Some(0.0)),
        "manufactured" => (
            2.0,
            "6",
            BoundaryCondition::Dirichlet {
                alpha: 1.0,
                beta: 0.0,
            },
            Some("1 - t^2"),
            None,
        ),
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    let mut p = Problem::new(name, k, f, bc, exact)?;
    p.suggested_guess = guess;
    Ok(p)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    k: f64,
    f: String,
    bc: BcDoc,
    exact: Option<String>,
    name: Option<String>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum BcDoc {
    Dirichlet {
        alpha: f64,
        beta: f64,
    },
    Robin {
        alpha: f64,
        a: f64,
        b: f64,
        beta: f64,
    },
}

/// Reads a problem from its JSON description:
///
/// ```json
/// {"k": 2, "f": "y^5", "exact": "sqrt(3/(3+t^2))", "name": "lane-emden",
///  "bc": {"type": "robin", "alpha": 0, "a": 1, "b": 0, "beta": 0.8660254038}}
/// ```
pub fn from_json(document: &[u8]) -> Result<Problem> {
    let doc: ProblemDoc =
        serde_json::from_slice(document).map_err(|e| Error::Schema(e.to_string()))?;
    let bc = match doc.bc {
        BcDoc::Dirichlet { alpha, beta } => BoundaryCondition::Dirichlet { alpha, beta },
        BcDoc::Robin { alpha, a, b, beta } => BoundaryCondition::NeumannRobin { alpha, a, b, beta },
    };
    let name = doc.name.unwrap_or_else(|| "custom".to_string());
    Problem::new(&name, doc.k, &doc.f, bc, doc.exact.as_deref())
}
