//! Finite Chebyshev series `sum_j a_j T_j(x)` on `[-1, 1]`.
//!
//! Multiplication by `x`, integration and differentiation all stay inside the
//! Chebyshev basis, and Clenshaw evaluation is backward stable, so basis
//! functions of order 60+ keep full double precision.

use crate::polynomial::Polynomial;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        ChebSeries { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        ChebSeries { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        match n {
            0 => 0.0,
            1 => self.coeffs[0],
            _ => {
                let (mut b1, mut b2) = (0.0, 0.0);
                for &a in self.coeffs[1..].iter().rev() {
                    let b0 = 2.0 * x * b1 - b2 + a;
                    b2 = b1;
                    b1 = b0;
                }
                x * b1 - b2 + self.coeffs[0]
            }
        }
    }

    pub fn scale(&self, s: f64) -> ChebSeries {
        ChebSeries::new(self.coeffs.iter().map(|a| a * s).collect())
    }

    /// `a*self + b*other`.
    pub fn axpby(&self, a: f64, other: &ChebSeries, b: f64) -> ChebSeries {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        ChebSeries::new(
            (0..n)
                .map(|i| a * get(&self.coeffs, i) + b * get(&other.coeffs, i))
                .collect(),
        )
    }

    /// `x * self(x)`, using `x T_j = (T_{j+1} + T_{|j-1|}) / 2`.
    pub fn mul_x(&self) -> ChebSeries {
        if self.coeffs.is_empty() {
            return ChebSeries::default();
        }
        let mut out = vec![0.0; self.coeffs.len() + 1];
        for (j, &a) in self.coeffs.iter().enumerate() {
            if j == 0 {
                out[1] += a;
            } else {
                out[j + 1] += 0.5 * a;
                out[j - 1] += 0.5 * a;
            }
        }
        ChebSeries::new(out)
    }

    /// Antiderivative normalized to vanish at `x = -1`.
    pub fn integral_from_left(&self) -> ChebSeries {
        let n = self.coeffs.len();
        if n == 0 {
            return ChebSeries::default();
        }
        let mut out = vec![0.0; n + 1];
        for (j, &a) in self.coeffs.iter().enumerate() {
            match j {
                0 => out[1] += a,
                1 => {
                    // x^2/2 = (T_2 + T_0)/4
                    out[2] += 0.25 * a;
                    out[0] += 0.25 * a;
                }
                _ => {
                    out[j + 1] += a / (2.0 * (j + 1) as f64);
                    out[j - 1] -= a / (2.0 * (j - 1) as f64);
                }
            }
        }
        // T_j(-1) = (-1)^j
        let at_left: f64 = out
            .iter()
            .enumerate()
            .map(|(j, &b)| if j % 2 == 0 { b } else { -b })
            .sum();
        out[0] -= at_left;
        ChebSeries::new(out)
    }

    pub fn derivative(&self) -> ChebSeries {
        let n = self.coeffs.len();
        if n <= 1 {
            return ChebSeries::default();
        }
        let mut out = vec![0.0; n - 1];
        for k in (0..n - 1).rev() {
            let next = out.get(k + 2).copied().unwrap_or(0.0);
            out[k] = next + 2.0 * (k + 1) as f64 * self.coeffs[k + 1];
        }
        out[0] *= 0.5;
        ChebSeries::new(out)
    }

    /// Monomial coefficients in `x`. Loses precision for high degrees.
    pub fn to_monomial(&self) -> Polynomial {
        let mut prev = Polynomial::constant(1.0);
        let mut curr = Polynomial::identity();
        let two_x = Polynomial::new(vec![0.0, 2.0]);
        let mut acc = Polynomial::zero();
        for (j, &a) in self.coeffs.iter().enumerate() {
            let tj = match j {
                0 => prev.clone(),
                1 => curr.clone(),
                _ => {
                    let next = &(&two_x * &curr) - &prev;
                    prev = std::mem::replace(&mut curr, next);
                    curr.clone()
                }
            };
            acc = &acc + &tj.scale(a);
        }
        acc
    }
}
