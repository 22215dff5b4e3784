//! Orthogonal-polynomial wavelet bases on `[0, 1]` and their exact integrals.
//!
//! A basis function is `psi_m(t) = 2^{k/2} v_m O_m(2^k t - n_hat)` on its
//! support cell `[(n_hat-1)/2^k, (n_hat+1)/2^k)` with `n_hat = 2n - 1`. Each
//! `psi_m`, its integral `J psi_m` and double integral `J^2 psi_m` (both taken
//! from `t = 0`) are stored as Chebyshev series in the cell variable
//! `x = 2^k t - n_hat`, so the integrals are exact and evaluation stays stable
//! up to order 64.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::chebyshev::ChebSeries;
use crate::error::{Error, Result};
use crate::orthopoly::{norm_constant, run_recurrence, weight_moment, Family, MAX_ORDER};
use crate::polynomial::Polynomial;
use crate::quadrature::GaussLegendre;

/// Largest supported basis size.
pub const MAX_BASIS_SIZE: usize = MAX_ORDER;

const QUADRATURE_NODES: usize = 128;

/// Which of `psi`, `J psi` or `J^2 psi` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisOrder {
    Psi,
    J1,
    J2,
}

/// Inner product used by [`project`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ProjectionWeight {
    /// Weighted least-squares projection using the family weight mapped onto
    /// the support cell. Exact for any function in the span.
    #[default]
    Family,
    /// Raw `c_m = \int_0^1 f psi_m dt`, no weight and no Gram correction.
    Unweighted,
}

/// Expansion coefficients `c_m` with respect to a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientVector(pub Vec<f64>);

impl CoefficientVector {
    pub fn zeros(m: usize) -> Self {
        CoefficientVector(vec![0.0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for CoefficientVector {
    fn from(v: Vec<f64>) -> Self {
        CoefficientVector(v)
    }
}

#[derive(Clone, Debug)]
pub struct WaveletBasis {
    family: Family,
    dilation: u32,
    translation: u32,
    level: u32,
    psi: Vec<ChebSeries>,
    j1: Vec<ChebSeries>,
    j2: Vec<ChebSeries>,
}

impl WaveletBasis {
    /// Basis with `M = 2^level` functions on the single `k = 1` cell `[0, 1)`.
    pub fn new(family: Family, level: u32) -> Result<Self> {
        build_basis(family, level, 1, 1)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Dilation level `k`.
    pub fn dilation(&self) -> u32 {
        self.dilation
    }

    /// Translation index `n`.
    pub fn translation(&self) -> u32 {
        self.translation
    }

    /// Resolution level `J`.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Basis size `M = 2^J`.
    pub fn size(&self) -> usize {
        self.psi.len()
    }

    fn n_hat(&self) -> f64 {
        (2 * self.translation - 1) as f64
    }

    fn cell_scale(&self) -> f64 {
        2f64.powi(self.dilation as i32)
    }

    /// Support cell `[left, right)`.
    pub fn support(&self) -> (f64, f64) {
        let s = self.cell_scale();
        ((self.n_hat() - 1.0) / s, (self.n_hat() + 1.0) / s)
    }

    /// Cell variable `x = 2^k t - n_hat`.
    fn local(&self, t: f64) -> f64 {
        self.cell_scale() * t - self.n_hat()
    }

    fn series(&self, order: BasisOrder) -> &[ChebSeries] {
        match order {
            BasisOrder::Psi => &self.psi,
            BasisOrder::J1 => &self.j1,
            BasisOrder::J2 => &self.j2,
        }
    }

    /// Chebyshev coefficients (in the cell variable) of one basis function.
    pub fn chebyshev_series(&self, order: BasisOrder, m: usize) -> Result<&ChebSeries> {
        self.series(order).get(m).ok_or(Error::IndexOutOfRange {
            index: m,
            len: self.size(),
        })
    }

    /// Monomial form in `t` on the support cell. Only well conditioned for
    /// small `M`.
    pub fn polynomial(&self, order: BasisOrder, m: usize) -> Result<Polynomial> {
        let s = self.chebyshev_series(order, m)?;
        Ok(s.to_monomial()
            .compose_affine(self.cell_scale(), -self.n_hat()))
    }

    /// Evaluates `psi_m`, `J psi_m` or `J^2 psi_m` at `t`.
    ///
    /// `psi_m` vanishes outside the (closed) support cell; the integrals are
    /// zero left of the cell and continue linearly (`J^2`) or constantly
    /// (`J`) to its right.
    pub fn eval(&self, order: BasisOrder, m: usize, t: f64) -> Result<f64> {
        let s = self.chebyshev_series(order, m)?;
        let (left, right) = self.support();
        if t <= left {
            return Ok(match order {
                BasisOrder::Psi if t == left => s.eval(-1.0),
                _ => 0.0,
            });
        }
        if t <= right {
            return Ok(s.eval(self.local(t)));
        }
        Ok(match order {
            BasisOrder::Psi => 0.0,
            BasisOrder::J1 => s.eval(1.0),
            BasisOrder::J2 => s.eval(1.0) + self.j1[m].eval(1.0) * (t - right),
        })
    }

    /// All `M` values of one order at `t`.
    pub fn eval_all(&self, order: BasisOrder, t: f64) -> Vec<f64> {
        (0..self.size())
            .map(|m| self.eval(order, m, t).expect("index within basis"))
            .collect()
    }

    /// The same basis with every function multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> WaveletBasis {
        let sc = |v: &[ChebSeries]| v.iter().map(|s| s.scale(factor)).collect();
        WaveletBasis {
            psi: sc(&self.psi),
            j1: sc(&self.j1),
            j2: sc(&self.j2),
            ..self.clone()
        }
    }
}

/// Family polynomial `O_m` in the Chebyshev basis.
fn family_series(family: &Family, m: usize) -> ChebSeries {
    run_recurrence(
        family,
        m,
        ChebSeries::constant(1.0),
        |curr, prev, (a, b, c)| curr.mul_x().axpby(a, curr, b).axpby(1.0, prev, -c),
    )
}

/// Builds `M = 2^level` wavelets at dilation `k` and translation `n`
/// (`1 <= n <= 2^{k-1}`).
pub fn build_basis(
    family: Family,
    level: u32,
    dilation: u32,
    translation: u32,
) -> Result<WaveletBasis> {
    family.validate()?;
    if level > 6 {
        return Err(Error::ResolutionTooHigh {
            what: "basis size",
            value: 1usize.checked_shl(level).unwrap_or(usize::MAX),
            max: MAX_BASIS_SIZE,
        });
    }
    if dilation == 0 || dilation > 30 {
        return Err(Error::Domain(format!(
            "dilation level must be in 1..=30, got {dilation}"
        )));
    }
    if translation == 0 || translation > 1 << (dilation - 1) {
        return Err(Error::Domain(format!(
            "translation index must be in 1..={}, got {translation}",
            1u32 << (dilation - 1)
        )));
    }
    let size = 1usize << level;
    let cell = 2f64.powi(dilation as i32);
    let dilation_factor = cell.sqrt();
    let mut psi = Vec::with_capacity(size);
    let mut j1 = Vec::with_capacity(size);
    let mut j2 = Vec::with_capacity(size);
    for m in 0..size {
        let s = family_series(&family, m).scale(dilation_factor * norm_constant(&family, m)?);
        // dt = dx / 2^k
        let i1 = s.integral_from_left().scale(1.0 / cell);
        let i2 = i1.integral_from_left().scale(1.0 / cell);
        psi.push(s);
        j1.push(i1);
        j2.push(i2);
    }
    Ok(WaveletBasis {
        family,
        dilation,
        translation,
        level,
        psi,
        j1,
        j2,
    })
}

/// Evaluates one basis function.
pub fn eval_basis(basis: &WaveletBasis, order: BasisOrder, m: usize, t: f64) -> Result<f64> {
    basis.eval(order, m, t)
}

/// `sum_m c_m psi_m(t)`.
pub fn reconstruct(c: &CoefficientVector, basis: &WaveletBasis, t: f64) -> Result<f64> {
    if c.len() != basis.size() {
        return Err(Error::LengthMismatch {
            expected: basis.size(),
            found: c.len(),
        });
    }
    Ok(c.0
        .iter()
        .zip(basis.eval_all(BasisOrder::Psi, t))
        .map(|(a, b)| a * b)
        .sum())
}

/// Quadrature nodes in `t` and weights that integrate `g(t) w(x(t))` over the
/// support cell, with endpoint singularities of `w` removed by substitution.
fn weighted_rule(basis: &WaveletBasis, weight: ProjectionWeight) -> (Vec<f64>, Vec<f64>) {
    let gl = GaussLegendre::new(QUADRATURE_NODES);
    let cell = basis.cell_scale();
    let n_hat = basis.n_hat();
    let to_t = |x: f64| (x + n_hat) / cell;
    let mut ts = Vec::with_capacity(QUADRATURE_NODES);
    let mut ws = Vec::with_capacity(QUADRATURE_NODES);
    let family = match weight {
        ProjectionWeight::Unweighted => Family::Legendre,
        ProjectionWeight::Family => basis.family,
    };
    for (&node, &w) in gl.nodes.iter().zip(&gl.weights) {
        match family {
            Family::Chebyshev | Family::Gegenbauer { .. } => {
                // x = cos(theta), theta in (0, pi): (1-x^2)^(a-1/2) dx = sin^(2a) dtheta
                let theta = 0.5 * PI * (node + 1.0);
                let power = match family {
                    Family::Gegenbauer { alpha } => 2.0 * alpha,
                    _ => 0.0,
                };
                ts.push(to_t(theta.cos()));
                ws.push(w * 0.5 * PI * theta.sin().powf(power) / cell);
            }
            _ => {
                let wx = match family {
                    Family::Hermite => (-node * node).exp(),
                    Family::Laguerre => (-node).exp(),
                    _ => 1.0,
                };
                ts.push(to_t(node));
                ws.push(w * wx / cell);
            }
        }
    }
    (ts, ws)
}

/// Projects `f` onto the span of the basis.
pub fn project(
    f: impl Fn(f64) -> f64,
    basis: &WaveletBasis,
    weight: ProjectionWeight,
) -> Result<CoefficientVector> {
    let (ts, ws) = weighted_rule(basis, weight);
    let size = basis.size();
    let values: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Quadrature(format!(
            "non-finite function value at t = {}",
            ts[i]
        )));
    }
    let psi: Vec<Vec<f64>> = ts
        .iter()
        .map(|&t| basis.eval_all(BasisOrder::Psi, t))
        .collect();
    if weight == ProjectionWeight::Unweighted {
        let mut raw = vec![0.0; size];
        for ((row, &fv), &w) in psi.iter().zip(&values).zip(&ws) {
            for (r, p) in raw.iter_mut().zip(row) {
                *r += w * fv * p;
            }
        }
        return Ok(CoefficientVector(raw));
    }
    // weighted least squares on the quadrature nodes; same minimizer as the
    // Gram system, without squaring the condition number
    let design = DMatrix::from_fn(ts.len(), size, |i, m| ws[i].sqrt() * psi[i][m]);
    let target =
        DVector::from_iterator(ts.len(), values.iter().zip(&ws).map(|(v, w)| w.sqrt() * v));
    let svd = design.svd(true, true);
    let cutoff = svd.singular_values.max() * size as f64 * f64::EPSILON;
    let c = svd
        .solve(&target, cutoff)
        .map_err(|e| Error::Quadrature(e.to_string()))?;
    Ok(CoefficientVector(c.iter().copied().collect()))
}

/// Gram matrix `\int psi_i psi_j w(x(t)) dt` assembled from monomial
/// products and the family's weight moments. Only defined for families with a
/// bounded weight (Legendre, Chebyshev, Gegenbauer).
pub fn moment_gram_matrix(basis: &WaveletBasis) -> Result<DMatrix<f64>> {
    let family = basis.family();
    let size = basis.size();
    let local: Vec<Polynomial> = basis.psi.iter().map(ChebSeries::to_monomial).collect();
    let max_degree = 2 * size;
    let moments = (0..=max_degree)
        .map(|k| weight_moment(&family, k))
        .collect::<Result<Vec<f64>>>()?;
    let mut gram = DMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..=i {
            let prod = &local[i] * &local[j];
            let v: f64 = prod
                .coeffs()
                .iter()
                .zip(&moments)
                .map(|(c, mu)| c * mu)
                .sum::<f64>()
                / basis.cell_scale();
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    Ok(gram)
}
