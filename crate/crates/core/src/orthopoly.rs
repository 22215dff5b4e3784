//! The five classical orthogonal polynomial families.
//!
//! Every family is generated from a single three-term recurrence
//! `O_{m+1} = (A_m x + B_m) O_m - C_m O_{m-1}` with `O_0 = 1`, which is then
//! run over scalars ([`poly_value`]), monomial coefficients ([`poly_coeffs`])
//! or Chebyshev coefficients (wavelet construction).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use statrs::function::beta::beta;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::polynomial::Polynomial;

/// Highest polynomial order supported.
pub const MAX_ORDER: usize = 64;

/// Default Gegenbauer parameter when none is given.
pub const DEFAULT_GEGENBAUER_ALPHA: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Chebyshev,
    Hermite,
    Laguerre,
    Legendre,
    Gegenbauer { alpha: f64 },
}

impl Family {
    /// Families in the column order used by comparison tables.
    pub fn table_order(gegenbauer_alpha: f64) -> [Family; 5] {
        [
            Family::Chebyshev,
            Family::Gegenbauer {
                alpha: gegenbauer_alpha,
            },
            Family::Legendre,
            Family::Laguerre,
            Family::Hermite,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Chebyshev => "chebyshev",
            Family::Hermite => "hermite",
            Family::Laguerre => "laguerre",
            Family::Legendre => "legendre",
            Family::Gegenbauer { .. } => "gegenbauer",
        }
    }

    /// Two-letter prefix used in method labels such as `LeWNA`.
    pub fn abbrev(&self) -> &'static str {
        match self {
            Family::Chebyshev => "Ch",
            Family::Hermite => "He",
            Family::Laguerre => "La",
            Family::Legendre => "Le",
            Family::Gegenbauer { .. } => "Ge",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Family::Gegenbauer { alpha } = *self {
            if !(alpha.is_finite() && alpha > -0.5 && alpha != 0.0) {
                return Err(Error::Domain(format!(
                    "Gegenbauer alpha must satisfy alpha > -1/2 and alpha != 0, got {alpha}"
                )));
            }
        }
        Ok(())
    }

    /// Recurrence coefficients `(A_m, B_m, C_m)`.
    pub(crate) fn recurrence(&self, m: usize) -> (f64, f64, f64) {
        let mf = m as f64;
        match *self {
            Family::Chebyshev => {
                if m == 0 {
                    (1.0, 0.0, 0.0)
                } else {
                    (2.0, 0.0, 1.0)
                }
            }
            Family::Hermite => (2.0, 0.0, 2.0 * mf),
            Family::Laguerre => (
                -1.0 / (mf + 1.0),
                (2.0 * mf + 1.0) / (mf + 1.0),
                mf / (mf + 1.0),
            ),
            Family::Legendre => ((2.0 * mf + 1.0) / (mf + 1.0), 0.0, mf / (mf + 1.0)),
            Family::Gegenbauer { alpha } => {
                let c = if m == 0 {
                    0.0
                } else {
                    (mf + 2.0 * alpha - 1.0) / (mf + 1.0)
                };
                (2.0 * (mf + alpha) / (mf + 1.0), 0.0, c)
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Gegenbauer { alpha } => write!(f, "gegenbauer(alpha={alpha})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Parses a family name; Gegenbauer gets the default alpha.
    fn from_str(s: &str) -> Result<Family> {
        match s.to_ascii_lowercase().as_str() {
            "chebyshev" => Ok(Family::Chebyshev),
            "hermite" => Ok(Family::Hermite),
            "laguerre" => Ok(Family::Laguerre),
            "legendre" => Ok(Family::Legendre),
            "gegenbauer" => Ok(Family::Gegenbauer {
                alpha: DEFAULT_GEGENBAUER_ALPHA,
            }),
            other => Err(Error::Domain(format!(
                "unknown polynomial family '{other}'"
            ))),
        }
    }
}

fn check_order(family: &Family, m: usize) -> Result<()> {
    family.validate()?;
    if m > MAX_ORDER {
        return Err(Error::ResolutionTooHigh {
            what: "polynomial order",
            value: m,
            max: MAX_ORDER,
        });
    }
    Ok(())
}

/// Runs the family recurrence over any carrier type.
pub(crate) fn run_recurrence<T>(
    family: &Family,
    m: usize,
    one: T,
    step: impl Fn(&T, &T, (f64, f64, f64)) -> T,
) -> T
where
    T: Clone,
{
    let mut prev: Option<T> = None;
    let mut curr = one;
    for j in 0..m {
        let next = match &prev {
            Some(p) => step(&curr, p, family.recurrence(j)),
            None => {
                let (a, b, _) = family.recurrence(j);
                step(&curr, &curr, (a, b, 0.0))
            }
        };
        prev = Some(std::mem::replace(&mut curr, next));
    }
    curr
}

/// Value of the order-`m` polynomial of `family` at `x`.
pub fn poly_value(family: &Family, m: usize, x: f64) -> Result<f64> {
    check_order(family, m)?;
    Ok(run_recurrence(family, m, 1.0, |&curr, &prev, (a, b, c)| {
        (a * x + b) * curr - c * prev
    }))
}

/// Monomial coefficients of the order-`m` polynomial.
pub fn poly_coeffs(family: &Family, m: usize) -> Result<Polynomial> {
    check_order(family, m)?;
    let x = Polynomial::identity();
    Ok(run_recurrence(
        family,
        m,
        Polynomial::constant(1.0),
        |curr, prev, (a, b, c)| {
            let lin = &x.scale(a) + &Polynomial::constant(b);
            &(&lin * curr) - &prev.scale(c)
        },
    ))
}

/// `\int_{-1}^{1} x^k w(x) dx` for the families with a bounded orthogonality
/// interval.
pub fn weight_moment(family: &Family, k: usize) -> Result<f64> {
    family.validate()?;
    if k % 2 == 1 {
        return match family {
            Family::Hermite | Family::Laguerre => Err(Error::UnsupportedWeight(family.name())),
            _ => Ok(0.0),
        };
    }
    let kf = k as f64;
    match *family {
        Family::Legendre => Ok(2.0 / (kf + 1.0)),
        // (1-x^2)^(lambda-1/2) integrates to B((k+1)/2, lambda+1/2); stepping
        // k by two multiplies that by (k-1)/(k+2 lambda)
        Family::Chebyshev => Ok(even_moment(PI, 0.0, k)),
        Family::Gegenbauer { alpha } => Ok(even_moment(beta(0.5, alpha + 0.5), alpha, k)),
        Family::Hermite | Family::Laguerre => Err(Error::UnsupportedWeight(family.name())),
    }
}

fn even_moment(mu0: f64, lambda: f64, k: usize) -> f64 {
    (2..=k).step_by(2).fold(mu0, |mu, j| {
        mu * (j as f64 - 1.0) / (j as f64 + 2.0 * lambda)
    })
}

/// Orthonormalization factor of the order-`m` polynomial (without the
/// `2^{k/2}` dilation factor).
pub fn norm_constant(family: &Family, m: usize) -> Result<f64> {
    check_order(family, m)?;
    let mf = m as f64;
    Ok(match *family {
        Family::Chebyshev => {
            if m == 0 {
                1.0 / PI.sqrt()
            } else {
                (2.0 / PI).sqrt()
            }
        }
        Family::Hermite => {
            let fact: f64 = (1..=m).map(|j| j as f64).product();
            1.0 / (fact * 2f64.powi(m as i32) * PI.sqrt()).sqrt()
        }
        Family::Laguerre => 1.0,
        Family::Legendre => (mf + 0.5).sqrt(),
        Family::Gegenbauer { alpha } => 1.0 / gegenbauer_norm_sq(alpha, m).sqrt(),
    })
}

/// `\int_{-1}^{1} (C_m^alpha)^2 (1-x^2)^{alpha-1/2} dx`.
fn gegenbauer_norm_sq(alpha: f64, m: usize) -> f64 {
    let mf = m as f64;
    let fact: f64 = (1..=m).map(|j| j as f64).product();
    let ga = gamma(alpha);
    PI * 2f64.powf(1.0 - 2.0 * alpha) * gamma(mf + 2.0 * alpha) / (fact * (mf + alpha) * ga * ga)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Family; 5] = [
        Family::Chebyshev,
        Family::Hermite,
        Family::Laguerre,
        Family::Legendre,
        Family::Gegenbauer { alpha: 1.5 },
    ];

    fn samples(n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| -1.0 + 2.0 * (i as f64 + 0.37) / n as f64)
            .collect()
    }

    #[test]
    fn value_examples() {
        assert_eq!(poly_value(&Family::Legendre, 2, 1.0).unwrap(), 1.0);
        assert_eq!(poly_value(&Family::Laguerre, 1, 1.0).unwrap(), 0.0);
        // T_3(x) = 4x^3 - 3x
        assert!((poly_value(&Family::Chebyshev, 3, 0.5).unwrap() + 1.0).abs() < 1e-15);
        // H_2(x) = 4x^2 - 2
        assert_eq!(poly_value(&Family::Hermite, 2, 0.0).unwrap(), -2.0);
    }

    #[test]
    fn closed_forms() {
        for x in samples(20) {
            let l2 = 1.0 - 2.0 * x + 0.5 * x * x;
            assert!((poly_value(&Family::Laguerre, 2, x).unwrap() - l2).abs() < 1e-14);
            let p3 = 0.5 * (5.0 * x * x * x - 3.0 * x);
            assert!((poly_value(&Family::Legendre, 3, x).unwrap() - p3).abs() < 1e-14);
            // C_2^a = 2a(1+a)x^2 - a
            let a = 1.5;
            let c2 = 2.0 * a * (1.0 + a) * x * x - a;
            let g = Family::Gegenbauer { alpha: a };
            assert!((poly_value(&g, 2, x).unwrap() - c2).abs() < 1e-13);
            let h3 = 8.0 * x * x * x - 12.0 * x;
            assert!((poly_value(&Family::Hermite, 3, x).unwrap() - h3).abs() < 1e-13);
        }
    }

    #[test]
    fn coeff_examples() {
        let g = Family::Gegenbauer { alpha: 1.0 };
        assert_eq!(poly_coeffs(&g, 1).unwrap().coeffs(), &[0.0, 2.0]);
        assert_eq!(poly_coeffs(&Family::Legendre, 0).unwrap().coeffs(), &[1.0]);
        assert_eq!(
            poly_coeffs(&Family::Chebyshev, 2).unwrap().coeffs(),
            &[-1.0, 0.0, 2.0]
        );
    }

    #[test]
    fn order_guard_and_alpha_guard() {
        assert!(matches!(
            poly_value(&Family::Legendre, 65, 0.3),
            Err(Error::ResolutionTooHigh { .. })
        ));
        assert!(poly_value(&Family::Legendre, 64, 0.3).is_ok());
        assert!(matches!(
            poly_coeffs(&Family::Hermite, 100),
            Err(Error::ResolutionTooHigh { .. })
        ));
        for bad in [0.0, -0.5, -0.7, f64::NAN] {
            let g = Family::Gegenbauer { alpha: bad };
            assert!(matches!(poly_value(&g, 1, 0.0), Err(Error::Domain(_))));
        }
        assert!(poly_value(&Family::Gegenbauer { alpha: -0.25 }, 3, 0.2).is_ok());
    }

    #[test]
    fn recurrence_agrees_with_expansion() {
        for fam in ALL {
            for m in 0..=12 {
                let p = poly_coeffs(&fam, m).unwrap();
                for i in 0..50 {
                    let x = -1.0 + 2.0 * ((i as f64 * 0.618_033_988_7) % 1.0);
                    let v = poly_value(&fam, m, x).unwrap();
                    assert!(
                        (v - p.eval(x)).abs() <= 1e-10 * v.abs().max(1.0),
                        "{fam} m={m} x={x}"
                    );
                }
            }
        }
    }

    #[test]
    fn coeffs_match_values_to_relative_precision() {
        for fam in ALL {
            for m in [0, 1, 5, 10] {
                let p = poly_coeffs(&fam, m).unwrap();
                for x in samples(20) {
                    let v = poly_value(&fam, m, x).unwrap();
                    assert!((v - p.eval(x)).abs() <= 1e-12 * v.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn parity() {
        for fam in [
            Family::Legendre,
            Family::Chebyshev,
            Family::Hermite,
            Family::Gegenbauer { alpha: 1.5 },
        ] {
            for m in 0..=10 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                for x in samples(20) {
                    let a = poly_value(&fam, m, -x).unwrap();
                    let b = sign * poly_value(&fam, m, x).unwrap();
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn endpoint_identities() {
        for m in 0..=12 {
            assert!((poly_value(&Family::Chebyshev, m, 1.0).unwrap() - 1.0).abs() <= 1e-12);
            assert!((poly_value(&Family::Legendre, m, 1.0).unwrap() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn moments() {
        assert_eq!(weight_moment(&Family::Legendre, 0).unwrap(), 2.0);
        assert!((weight_moment(&Family::Chebyshev, 0).unwrap() - PI).abs() < 1e-13);
        assert!((weight_moment(&Family::Chebyshev, 2).unwrap() - PI / 2.0).abs() < 1e-13);
        for k in (0..=10).step_by(2) {
            let v = weight_moment(&Family::Legendre, k).unwrap();
            assert!((v - 2.0 / (k as f64 + 1.0)).abs() <= 1e-13);
        }
        for k in [1, 3, 7] {
            assert_eq!(weight_moment(&Family::Chebyshev, k).unwrap(), 0.0);
            assert_eq!(
                weight_moment(&Family::Gegenbauer { alpha: 2.0 }, k).unwrap(),
                0.0
            );
        }
        // alpha = 1/2 reduces to Legendre
        let g = Family::Gegenbauer { alpha: 0.5 };
        assert!((weight_moment(&g, 4).unwrap() - 0.4).abs() < 1e-13);
        assert!(matches!(
            weight_moment(&Family::Hermite, 0),
            Err(Error::UnsupportedWeight(_))
        ));
        assert!(matches!(
            weight_moment(&Family::Laguerre, 3),
            Err(Error::UnsupportedWeight(_))
        ));
    }

    #[test]
    fn norm_examples() {
        assert!(
            (norm_constant(&Family::Legendre, 0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs()
                < 1e-10
        );
        assert_eq!(norm_constant(&Family::Laguerre, 5).unwrap(), 1.0);
        assert!((norm_constant(&Family::Chebyshev, 0).unwrap() - 0.564_189_583_5).abs() < 1e-10);
        // Hermite: 1/sqrt(m! 2^m sqrt(pi))
        let h2 = norm_constant(&Family::Hermite, 2).unwrap();
        assert!((h2 - 1.0 / (8.0 * PI.sqrt()).sqrt()).abs() < 1e-15);
    }

    /// Inner product of two family members computed from monomial products
    /// and weight moments.
    fn moment_inner(fam: &Family, m: usize, n: usize) -> f64 {
        let prod = &poly_coeffs(fam, m).unwrap() * &poly_coeffs(fam, n).unwrap();
        prod.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c * weight_moment(fam, k).unwrap())
            .sum()
    }

    #[test]
    fn orthogonality_from_moments() {
        for fam in [
            Family::Legendre,
            Family::Chebyshev,
            Family::Gegenbauer { alpha: 1.5 },
        ] {
            for m in 0..=8 {
                for n in 0..=8 {
                    let ip = moment_inner(&fam, m, n);
                    if m != n {
                        assert!(ip.abs() <= 1e-9, "{fam} ({m},{n}) -> {ip}");
                    } else {
                        let v = norm_constant(&fam, m).unwrap();
                        assert!((ip * v * v - 1.0).abs() <= 1e-10, "{fam} norm {m}");
                    }
                }
            }
        }
    }
}
