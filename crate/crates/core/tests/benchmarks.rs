//! Published benchmark values for examples 1-4.
//!
//! The published columns are reproduced with eight basis functions (J = 3).

use sbvp_wavelet::{builtin, solve, Approach, Family, SolverConfig, WaveletBasis};

const FAMILIES: [Family; 5] = [
    Family::Chebyshev,
    Family::Gegenbauer { alpha: 1.0 },
    Family::Legendre,
    Family::Laguerre,
    Family::Hermite,
];

fn values_at(
    problem: &str,
    family: Family,
    approach: Approach,
    level: u32,
    ts: &[f64],
) -> Vec<f64> {
    let p = builtin(problem).unwrap();
    let b = WaveletBasis::new(family, level).unwrap();
    let s = solve(&p, &b, &SolverConfig::with_approach(approach)).unwrap();
    assert!(s.converged, "{problem} {family} {approach:?}");
    ts.iter().map(|&t| s.y(t)).collect()
}

fn check(problem: &str, expected: &[(f64, f64)], tol: f64) {
    let ts: Vec<f64> = expected.iter().map(|e| e.0).collect();
    for fam in FAMILIES {
        for approach in [Approach::Newton, Approach::Quasilinearization] {
            let got = values_at(problem, fam, approach, 3, &ts);
            for (g, (t, e)) in got.iter().zip(expected) {
                assert!(
                    (g - e).abs() <= tol,
                    "{problem} {fam} {approach:?} t={t}: {g} vs {e}"
                );
            }
        }
    }
}

#[test]
fn stellar_structure_columns() {
    check(
        "example1",
        &[
            (0.0, 0.999999992),
            (1.0 / 16.0, 0.99934958),
            (3.0 / 16.0, 0.994191616),
            (9.0 / 16.0, 0.951101273),
            (15.0 / 16.0, 0.879439538),
        ],
        5e-7,
    );
}

#[test]
fn thermal_explosion_columns() {
    check(
        "example2",
        &[
            (0.0, 0.316694368),
            (1.0 / 16.0, 0.315354403),
            (3.0 / 16.0, 0.304666887),
            (7.0 / 16.0, 0.252069555),
            (15.0 / 16.0, 0.035785793),
        ],
        5e-7,
    );
}

#[test]
fn membrane_cap_columns() {
    check(
        "example3",
        &[
            (0.0, 0.954135307),
            (1.0 / 16.0, 0.954312412),
            (3.0 / 16.0, 0.955729848),
            (11.0 / 16.0, 0.975683775),
            (15.0 / 16.0, 0.99439132),
        ],
        5e-7,
    );
}

#[test]
fn stellar_structure_error_at_last_row() {
    // the published max error equals the error in the 15/16 row
    let p = builtin("example1").unwrap();
    let t = 15.0 / 16.0;
    let y = values_at("example1", Family::Hermite, Approach::Newton, 3, &[t])[0];
    let err = (y - p.eval_exact(t).unwrap()).abs();
    assert!((err - 2.49669e-9).abs() <= 1e-13, "{err}");
}

#[test]
fn four_basis_functions() {
    // independent reference run with M = 4
    let got = values_at(
        "example1",
        Family::Hermite,
        Approach::Newton,
        2,
        &[1.0 / 16.0, 3.0 / 16.0],
    );
    assert!((got[0] - 0.999346812).abs() <= 5e-9, "{got:?}");
    assert!((got[1] - 0.994190186).abs() <= 5e-9, "{got:?}");
}

#[test]
fn head_conduction_approaches_agree() {
    // the published quasilinear column is off from its Newton column by 2.4e-3;
    // both solve the same collocation system, so here they must coincide
    let ts = [0.0, 0.5, 1.0];
    for level in 2..=3 {
        let newton = values_at("example4", Family::Legendre, Approach::Newton, level, &ts);
        let qa = values_at(
            "example4",
            Family::Legendre,
            Approach::Quasilinearization,
            level,
            &ts,
        );
        for (a, b) in newton.iter().zip(&qa) {
            assert!((a - b).abs() <= 1e-8);
        }
    }
    let y0 = values_at("example4", Family::Legendre, Approach::Newton, 3, &[0.0])[0];
    assert!((y0 - 0.269948774).abs() <= 1e-4, "{y0}");
}
