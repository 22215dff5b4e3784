//! Orthogonal-polynomial wavelet collocation for nonlinear singular boundary
//! value problems `y'' + (k/t) y' + f(t, y) = 0` on `(0, 1]`.
//!
//! ```
//! use sbvp_wavelet::{builtin, solve, Family, SolverConfig, WaveletBasis};
//!
//! let problem = builtin("example1").unwrap();
//! let basis = WaveletBasis::new(Family::Legendre, 3).unwrap();
//! let sol = solve(&problem, &basis, &SolverConfig::default()).unwrap();
//! assert!(sol.converged);
//! assert!((sol.y(1.0) - 0.75f64.sqrt()).abs() < 1e-9);
//! ```

pub mod chebyshev;
pub mod cli;
pub mod collocation;
pub mod error;
pub mod expr;
pub mod metrics;
pub mod orthopoly;
pub mod polynomial;
pub mod quadrature;
pub mod sbvp;
pub mod solver;
pub mod wavelet;

pub use collocation::{collocation_points, Grid};
pub use error::{Error, Result};
pub use expr::{parse, Expr};
pub use metrics::{convergence_study, error_report, ConvergenceRow, ErrorReport};
pub use orthopoly::{norm_constant, poly_coeffs, poly_value, weight_moment, Family};
pub use polynomial::Polynomial;
pub use sbvp::{builtin, from_json, BoundaryCondition, Problem};
pub use solver::{
    boundary_representation, jacobian, lu_solve, residual, solve, solve_newton, solve_qa, Approach,
    BoundaryRepresentation, InitialGuess, Solution, SolverConfig,
};
pub use wavelet::{
    build_basis, eval_basis, project, reconstruct, BasisOrder, CoefficientVector, ProjectionWeight,
    WaveletBasis,
};
