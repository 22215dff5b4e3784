//! Error norms and convergence studies.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::orthopoly::Family;
use crate::sbvp::Problem;
use crate::solver::{solve, Solution, SolverConfig};
use crate::wavelet::WaveletBasis;

/// Number of points of the uniform grid used by [`convergence_study`].
pub const STUDY_POINTS: usize = 33;

#[derive(Clone, Debug, PartialEq)]
pub struct PointError {
    pub t: f64,
    pub computed: f64,
    pub exact: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorReport {
    pub linf: f64,
    /// Plain Euclidean norm of the pointwise errors, no quadrature weights.
    pub l2: f64,
    pub pointwise: Vec<PointError>,
}

impl ErrorReport {
    pub fn from_values(points: &[f64], computed: &[f64], exact: &[f64]) -> Result<ErrorReport> {
        for v in [computed.len(), exact.len()] {
            if v != points.len() {
                return Err(Error::LengthMismatch {
                    expected: points.len(),
                    found: v,
                });
            }
        }
        let pointwise: Vec<PointError> = points
            .iter()
            .zip(computed)
            .zip(exact)
            .map(|((&t, &computed), &exact)| PointError {
                t,
                computed,
                exact,
                abs_error: (computed - exact).abs(),
            })
            .collect();
        let linf = pointwise.iter().map(|p| p.abs_error).fold(0.0, f64::max);
        let l2 = pointwise
            .iter()
            .map(|p| p.abs_error * p.abs_error)
            .sum::<f64>()
            .sqrt();
        Ok(ErrorReport {
            linf,
            l2,
            pointwise,
        })
    }
}

/// Compares `solution` against `exact` at `points`.
pub fn error_report<F>(solution: &Solution, exact: F, points: &[f64]) -> Result<ErrorReport>
where
    F: Fn(f64) -> Result<f64>,
{
    let computed: Vec<f64> = points.iter().map(|&t| solution.y(t)).collect();
    let exact = points
        .iter()
        .map(|&t| exact(t))
        .collect::<Result<Vec<f64>>>()?;
    ErrorReport::from_values(points, &computed, &exact)
}

/// [`error_report`] against the problem's own exact solution.
pub fn problem_error_report(
    solution: &Solution,
    problem: &Problem,
    points: &[f64],
) -> Result<ErrorReport> {
    if !problem.has_exact() {
        return Err(Error::MissingExact(problem.name.clone()));
    }
    error_report(solution, |t| problem.eval_exact(t), points)
}

/// `0, 1/(n-1), ..., 1`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Against the exact solution.
    Exact,
    /// `max |y_J - y_{J+1}|` for problems without one.
    SuccessiveDifference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub level: u32,
    pub size: usize,
    pub linf: f64,
    pub l2: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub kind: ErrorKind,
    pub rows: Vec<ConvergenceRow>,
}

/// Solves at every level in `levels` and tabulates the error on a
/// 33-point uniform grid. Without an exact solution the error column holds
/// the difference to the next level, so one extra level is solved.
pub fn convergence_study(
    problem: &Problem,
    family: Family,
    levels: RangeInclusive<u32>,
    config: &SolverConfig,
) -> Result<ConvergenceStudy> {
    if levels.is_empty() {
        return Err(Error::EmptyRange);
    }
    let kind = if problem.has_exact() {
        ErrorKind::Exact
    } else {
        ErrorKind::SuccessiveDifference
    };
    let last = match kind {
        ErrorKind::Exact => *levels.end(),
        ErrorKind::SuccessiveDifference => levels.end() + 1,
    };
    let solves: Vec<Result<Solution>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (*levels.start()..=last)
            .map(|level| {
                scope.spawn(move || {
                    let basis = WaveletBasis::new(family, level)?;
                    solve(problem, &basis, config)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    let solutions = solves.into_iter().collect::<Result<Vec<Solution>>>()?;
    let grid = uniform_grid(STUDY_POINTS);
    let mut rows = Vec::new();
    for (i, level) in levels.enumerate() {
        let sol = &solutions[i];
        let report = match kind {
            ErrorKind::Exact => problem_error_report(sol, problem, &grid)?,
            ErrorKind::SuccessiveDifference => {
                let next = &solutions[i + 1];
                error_report(sol, |t| Ok(next.y(t)), &grid)?
            }
        };
        rows.push(ConvergenceRow {
            level,
            size: sol.c.len(),
            linf: report.linf,
            l2: report.l2,
            iterations: sol.iterations,
            converged: sol.converged,
        });
    }
    Ok(ConvergenceStudy { kind, rows })
}
