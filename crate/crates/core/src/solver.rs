//! Collocation solvers.
//!
//! `y''` is expanded in the wavelet basis, `y''(t) = sum_m c_m psi_m(t)`, and
//! integrated twice. The boundary conditions fix the two integration
//! constants, leaving `y`, `y'` and `y''` affine in `c`
//! ([`BoundaryRepresentation`]). The ODE is then imposed at the `M`
//! collocation points, and the resulting `M x M` nonlinear system is solved
//! either by Newton-Raphson on `c` (WNA) or by quasilinearization of `f`
//! around the previous iterate (WQA).

use nalgebra::{DMatrix, DVector};

use crate::collocation::{collocation_points, Grid};
use crate::error::{Error, Result};
use crate::sbvp::{BoundaryCondition, Problem};
use crate::wavelet::{BasisOrder, CoefficientVector, WaveletBasis};

/// Pivots below this magnitude mark a matrix as singular.
pub const PIVOT_THRESHOLD: f64 = 1e-14;

/// A residual entry counts as zero below this many ulps of its terms.
const ROUNDING_FACTOR: f64 = 64.0;

/// Sanity bound on the final collocation residual of a converged solve.
pub const CONVERGED_RESIDUAL_BOUND: f64 = 1e-8;

/// Solves `a x = b` by LU with partial pivoting.
pub fn lu_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::LengthMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if b.len() != a.nrows() {
        return Err(Error::LengthMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    let lu = a.clone().lu();
    let pivot = lu
        .u()
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if pivot.is_nan() || pivot < PIVOT_THRESHOLD {
        return Err(Error::SingularMatrix { pivot });
    }
    let x = lu
        .solve(&DVector::from_column_slice(b))
        .ok_or(Error::SingularMatrix { pivot })?;
    Ok(x.iter().copied().collect())
}

/// `offset + coeffs . c`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineForm {
    pub offset: f64,
    pub coeffs: Vec<f64>,
}

impl AffineForm {
    pub fn apply(&self, c: &[f64]) -> f64 {
        self.offset + self.coeffs.iter().zip(c).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// `y`, `y'` and `y''` as affine functions of the coefficient vector, with
/// the boundary conditions built in.
#[derive(Clone, Debug)]
pub struct BoundaryRepresentation {
    basis: WaveletBasis,
    bc: BoundaryCondition,
    j1_at_one: Vec<f64>,
    j2_at_one: Vec<f64>,
}

impl BoundaryRepresentation {
    pub fn new(basis: &WaveletBasis, bc: BoundaryCondition) -> Result<Self> {
        bc.validate()?;
        Ok(BoundaryRepresentation {
            j1_at_one: basis.eval_all(BasisOrder::J1, 1.0),
            j2_at_one: basis.eval_all(BasisOrder::J2, 1.0),
            basis: basis.clone(),
            bc,
        })
    }

    pub fn basis(&self) -> &WaveletBasis {
        &self.basis
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn size(&self) -> usize {
        self.basis.size()
    }

    pub fn d2y_form(&self, t: f64) -> AffineForm {
        AffineForm {
            offset: 0.0,
            coeffs: self.basis.eval_all(BasisOrder::Psi, t),
        }
    }

    pub fn dy_form(&self, t: f64) -> AffineForm {
        let j1 = self.basis.eval_all(BasisOrder::J1, t);
        match self.bc {
            BoundaryCondition::Dirichlet { alpha, beta } => AffineForm {
                offset: beta - alpha,
                coeffs: j1.iter().zip(&self.j2_at_one).map(|(a, b)| a - b).collect(),
            },
            BoundaryCondition::NeumannRobin { alpha, .. } => AffineForm {
                offset: alpha,
                coeffs: j1,
            },
        }
    }

    pub fn y_form(&self, t: f64) -> AffineForm {
        let j2 = self.basis.eval_all(BasisOrder::J2, t);
        match self.bc {
            BoundaryCondition::Dirichlet { alpha, beta } => AffineForm {
                offset: (1.0 - t) * alpha + t * beta,
                coeffs: j2
                    .iter()
                    .zip(&self.j2_at_one)
                    .map(|(a, b)| a - t * b)
                    .collect(),
            },
            BoundaryCondition::NeumannRobin { alpha, a, b, beta } => {
                let r = b / a;
                AffineForm {
                    offset: beta / a + (t - 1.0 - r) * alpha,
                    coeffs: j2
                        .iter()
                        .zip(&self.j2_at_one)
                        .zip(&self.j1_at_one)
                        .map(|((v, w2), w1)| v - w2 - r * w1)
                        .collect(),
                }
            }
        }
    }

    pub fn y(&self, t: f64, c: &CoefficientVector) -> f64 {
        self.y_form(t).apply(c.as_slice())
    }

    pub fn dy(&self, t: f64, c: &CoefficientVector) -> f64 {
        self.dy_form(t).apply(c.as_slice())
    }

    pub fn d2y(&self, t: f64, c: &CoefficientVector) -> f64 {
        self.d2y_form(t).apply(c.as_slice())
    }
}

pub fn boundary_representation(
    basis: &WaveletBasis,
    bc: BoundaryCondition,
) -> Result<BoundaryRepresentation> {
    BoundaryRepresentation::new(basis, bc)
}

/// Precomputed affine forms at the collocation points.
struct CollocationSystem<'a> {
    problem: &'a Problem,
    points: Vec<f64>,
    y: Vec<AffineForm>,
    dy: Vec<AffineForm>,
    d2y: Vec<AffineForm>,
}

impl<'a> CollocationSystem<'a> {
    fn new(problem: &'a Problem, rep: &BoundaryRepresentation, grid: &Grid) -> Result<Self> {
        if let Some(&t) = grid.points().iter().find(|&&t| t.is_nan() || t <= 0.0) {
            return Err(Error::Domain(format!(
                "collocation point {t} is not positive"
            )));
        }
        let points = grid.points().to_vec();
        Ok(CollocationSystem {
            problem,
            y: points.iter().map(|&t| rep.y_form(t)).collect(),
            dy: points.iter().map(|&t| rep.dy_form(t)).collect(),
            d2y: points.iter().map(|&t| rep.d2y_form(t)).collect(),
            points,
        })
    }

    fn check_len(&self, c: &CoefficientVector) -> Result<()> {
        let expected = self.y.first().map_or(0, |f| f.coeffs.len());
        if c.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: c.len(),
            });
        }
        Ok(())
    }

    fn y_values(&self, c: &[f64]) -> Vec<f64> {
        self.y.iter().map(|f| f.apply(c)).collect()
    }

    fn f_at(&self, l: usize, y: f64) -> Result<f64> {
        let t = self.points[l];
        self.problem
            .eval_f(t, y)
            .map_err(|source| Error::PointEval {
                index: l,
                t,
                source,
            })
    }

    fn f_y_at(&self, l: usize, y: f64) -> Result<f64> {
        let t = self.points[l];
        self.problem
            .eval_f_y(t, y)
            .map_err(|source| Error::PointEval {
                index: l,
                t,
                source,
            })
    }

    fn residual(&self, c: &CoefficientVector) -> Result<Vec<f64>> {
        self.check_len(c)?;
        let c = c.as_slice();
        let k = self.problem.k;
        (0..self.points.len())
            .map(|l| {
                let t = self.points[l];
                let y = self.y[l].apply(c);
                Ok(self.d2y[l].apply(c) + k / t * self.dy[l].apply(c) + self.f_at(l, y)?)
            })
            .collect()
    }

    /// True when every residual entry is within rounding of its own terms,
    /// so further updates are noise.
    fn at_rounding_level(&self, c: &[f64]) -> Result<bool> {
        let k = self.problem.k;
        for l in 0..self.points.len() {
            let t = self.points[l];
            let y = self.y[l].apply(c);
            let terms = [
                self.d2y[l].apply(c),
                k / t * self.dy[l].apply(c),
                self.f_at(l, y)?,
            ];
            let size: f64 = terms.iter().map(|v| v.abs()).sum();
            if terms.iter().sum::<f64>().abs() > ROUNDING_FACTOR * f64::EPSILON * size {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `psi_m(t_l) + (k/t_l) A'_lm + g_l A_lm`.
    fn linear_part(&self, g: &[f64]) -> DMatrix<f64> {
        let k = self.problem.k;
        let n = self.points.len();
        let size = self.y.first().map_or(0, |f| f.coeffs.len());
        DMatrix::from_fn(n, size, |l, m| {
            self.d2y[l].coeffs[m]
                + k / self.points[l] * self.dy[l].coeffs[m]
                + g[l] * self.y[l].coeffs[m]
        })
    }

    fn jacobian(&self, c: &CoefficientVector) -> Result<DMatrix<f64>> {
        self.check_len(c)?;
        let ys = self.y_values(c.as_slice());
        let g = ys
            .iter()
            .enumerate()
            .map(|(l, &y)| self.f_y_at(l, y))
            .collect::<Result<Vec<f64>>>()?;
        Ok(self.linear_part(&g))
    }

    /// Linear collocation system of the quasilinearized equation around the
    /// iterate values `y_r` at the collocation points.
    fn quasilinear(&self, y_r: &[f64]) -> Result<(DMatrix<f64>, Vec<f64>)> {
        let k = self.problem.k;
        let mut g = Vec::with_capacity(y_r.len());
        let mut rhs = Vec::with_capacity(y_r.len());
        for (l, &yr) in y_r.iter().enumerate() {
            let t = self.points[l];
            let fy = self.f_y_at(l, yr)?;
            let f = self.f_at(l, yr)?;
            let offsets = self.d2y[l].offset + k / t * self.dy[l].offset + fy * self.y[l].offset;
            g.push(fy);
            rhs.push(-f + yr * fy - offsets);
        }
        Ok((self.linear_part(&g), rhs))
    }
}

/// Collocation residual `F_l = y'' + (k/t_l) y' + f(t_l, y)`.
pub fn residual(
    problem: &Problem,
    rep: &BoundaryRepresentation,
    c: &CoefficientVector,
    grid: &Grid,
) -> Result<Vec<f64>> {
    CollocationSystem::new(problem, rep, grid)?.residual(c)
}

/// Analytic Jacobian `dF_l / dc_m`.
pub fn jacobian(
    problem: &Problem,
    rep: &BoundaryRepresentation,
    c: &CoefficientVector,
    grid: &Grid,
) -> Result<DMatrix<f64>> {
    CollocationSystem::new(problem, rep, grid)?.jacobian(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Approach {
    /// Quasilinearization (WQA).
    Quasilinearization,
    /// Newton-Raphson on the coefficients (WNA).
    Newton,
}

impl Approach {
    /// Method suffix as in `LeWNA` / `LeWQA`.
    pub fn suffix(&self) -> &'static str {
        match self {
            Approach::Quasilinearization => "WQA",
            Approach::Newton => "WNA",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialGuess {
    Constant(f64),
    /// One value per collocation point.
    Values(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub approach: Approach,
    pub max_iter: usize,
    pub tol: f64,
    /// Starting values of `y` at the collocation points for
    /// quasilinearization. `None` starts from `c = 0`, i.e. the boundary
    /// interpolant. Newton always starts from `c = 0`.
    pub initial_guess: Option<InitialGuess>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            approach: Approach::Newton,
            max_iter: 50,
            tol: 1e-12,
            initial_guess: None,
        }
    }
}

impl SolverConfig {
    pub fn with_approach(approach: Approach) -> Self {
        SolverConfig {
            approach,
            ..SolverConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Domain(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        Ok(())
    }

    fn guess_values(&self, m: usize) -> Result<Option<Vec<f64>>> {
        match &self.initial_guess {
            None => Ok(None),
            Some(InitialGuess::Constant(v)) => Ok(Some(vec![*v; m])),
            Some(InitialGuess::Values(v)) if v.len() == m => Ok(Some(v.clone())),
            Some(InitialGuess::Values(v)) => Err(Error::LengthMismatch {
                expected: m,
                found: v.len(),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub c: CoefficientVector,
    pub representation: BoundaryRepresentation,
    pub grid: Grid,
    pub approach: Approach,
    pub iterations: usize,
    /// Max-norm of the change of `y` at the collocation points, per
    /// iteration.
    pub update_history: Vec<f64>,
    /// Max-norm of the collocation residual at the final coefficients.
    pub residual_norm: f64,
    pub converged: bool,
}

impl Solution {
    pub fn y(&self, t: f64) -> f64 {
        self.representation.y(t, &self.c)
    }

    pub fn dy(&self, t: f64) -> f64 {
        self.representation.dy(t, &self.c)
    }

    pub fn d2y(&self, t: f64) -> f64 {
        self.representation.d2y(t, &self.c)
    }

    /// Values at the collocation points.
    pub fn collocation_values(&self) -> Vec<f64> {
        self.grid.points().iter().map(|&t| self.y(t)).collect()
    }

    /// Method label such as `ChWNA`.
    pub fn method_label(&self) -> String {
        format!(
            "{}{}",
            self.representation.basis().family().abbrev(),
            self.approach.suffix()
        )
    }
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| {
        if x.abs() > m || x.is_nan() {
            x.abs()
        } else {
            m
        }
    })
}

fn finish(
    system: &CollocationSystem,
    rep: BoundaryRepresentation,
    grid: Grid,
    approach: Approach,
    c: Vec<f64>,
    history: Vec<f64>,
    small_update: bool,
) -> Result<Solution> {
    let c = CoefficientVector(c);
    let residual_norm = max_abs(system.residual(&c)?);
    Ok(Solution {
        c,
        representation: rep,
        grid,
        approach,
        iterations: history.len(),
        update_history: history,
        converged: small_update && residual_norm <= CONVERGED_RESIDUAL_BOUND,
        residual_norm,
    })
}

fn setup(
    problem: &Problem,
    basis: &WaveletBasis,
    config: &SolverConfig,
) -> Result<(BoundaryRepresentation, Grid)> {
    config.validate()?;
    let rep = BoundaryRepresentation::new(basis, problem.bc)?;
    let grid = collocation_points(basis.size())?;
    Ok((rep, grid))
}

/// Solves with every column scaled to unit max-norm first. Basis functions
/// of some families differ in size by many orders of magnitude, which would
/// otherwise trip the absolute pivot threshold.
fn equilibrated_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let scales: Vec<f64> = a
        .column_iter()
        .map(|col| {
            let m = col.amax();
            if m > 0.0 {
                1.0 / m
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    for (mut col, s) in scaled.column_iter_mut().zip(&scales) {
        col *= *s;
    }
    let z = lu_solve(&scaled, b)?;
    Ok(z.iter().zip(&scales).map(|(z, s)| z * s).collect())
}

fn singular_at(iteration: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::SingularMatrix { pivot } => Error::Conditioning { iteration, pivot },
        other => other,
    }
}

/// Newton-Raphson on the collocation system.
pub fn solve_newton(
    problem: &Problem,
    basis: &WaveletBasis,
    config: &SolverConfig,
) -> Result<Solution> {
    let (rep, grid) = setup(problem, basis, config)?;
    let system = CollocationSystem::new(problem, &rep, &grid)?;
    let size = basis.size();
    // the guess only shapes the quasilinear iterate; Newton starts from the
    // boundary interpolant
    config.guess_values(size)?;
    let mut c = vec![0.0; size];
    let mut history = Vec::new();
    let mut small_update = false;
    for iteration in 1..=config.max_iter {
        let cv = CoefficientVector(c);
        let f = system.residual(&cv)?;
        let jac = system.jacobian(&cv)?;
        c = cv.0;
        let delta = equilibrated_solve(&jac, &f).map_err(singular_at(iteration))?;
        for (ci, di) in c.iter_mut().zip(&delta) {
            *ci -= di;
        }
        // measured on y at the collocation points, like the quasilinear
        // iteration; the coefficients themselves carry rounding noise along
        // near-null directions of the Jacobian
        let step = max_abs(system.y.iter().map(|form| {
            form.coeffs
                .iter()
                .zip(&delta)
                .map(|(a, d)| a * d)
                .sum::<f64>()
        }));
        history.push(step);
        if step <= config.tol || system.at_rounding_level(&c)? {
            small_update = true;
            break;
        }
    }
    finish(
        &system,
        rep,
        grid,
        Approach::Newton,
        c,
        history,
        small_update,
    )
}

/// Quasilinearization: one linear collocation solve per iteration.
pub fn solve_qa(
    problem: &Problem,
    basis: &WaveletBasis,
    config: &SolverConfig,
) -> Result<Solution> {
    let (rep, grid) = setup(problem, basis, config)?;
    let system = CollocationSystem::new(problem, &rep, &grid)?;
    let size = basis.size();
    let mut c = vec![0.0; size];
    let mut y_r = match config.guess_values(size)? {
        None => system.y_values(&c),
        Some(g) => g,
    };
    let mut history = Vec::new();
    let mut small_update = false;
    for iteration in 1..=config.max_iter {
        let (a, rhs) = system.quasilinear(&y_r)?;
        c = equilibrated_solve(&a, &rhs).map_err(singular_at(iteration))?;
        let y_next = system.y_values(&c);
        let change = max_abs(y_next.iter().zip(&y_r).map(|(a, b)| a - b));
        history.push(change);
        y_r = y_next;
        if change <= config.tol || system.at_rounding_level(&c)? {
            small_update = true;
            break;
        }
    }
    finish(
        &system,
        rep,
        grid,
        Approach::Quasilinearization,
        c,
        history,
        small_update,
    )
}

/// Dispatches on `config.approach`.
pub fn solve(problem: &Problem, basis: &WaveletBasis, config: &SolverConfig) -> Result<Solution> {
    match config.approach {
        Approach::Newton => solve_newton(problem, basis, config),
        Approach::Quasilinearization => solve_qa(problem, basis, config),
    }
}
