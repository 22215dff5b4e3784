use rand::{rngs::StdRng, Rng, SeedableRng};
use sbvp_wavelet::{
    boundary_representation, builtin, collocation_points, solve, Approach, BoundaryCondition,
    CoefficientVector, Family, SolverConfig, WaveletBasis,
};

const FAMILIES: [Family; 5] = [
    Family::Chebyshev,
    Family::Gegenbauer { alpha: 1.0 },
    Family::Legendre,
    Family::Laguerre,
    Family::Hermite,
];

fn collocation_solution(problem: &str, family: Family, approach: Approach, level: u32) -> Vec<f64> {
    let p = builtin(problem).unwrap();
    let b = WaveletBasis::new(family, level).unwrap();
    let s = solve(&p, &b, &SolverConfig::with_approach(approach)).unwrap();
    assert!(s.converged, "{problem} {family} {approach:?} J={level}");
    s.collocation_values()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn families_agree() {
    for problem in ["example1", "example2"] {
        for level in 2..=3 {
            let reference =
                collocation_solution(problem, Family::Legendre, Approach::Newton, level);
            for fam in FAMILIES {
                let y = collocation_solution(problem, fam, Approach::Newton, level);
                let d = max_diff(&reference, &y);
                assert!(d <= 1e-8, "{problem} {fam} J={level}: {d}");
            }
        }
    }
}

#[test]
fn approaches_agree() {
    for problem in ["example1", "example2", "example3", "example4"] {
        let newton = collocation_solution(problem, Family::Chebyshev, Approach::Newton, 3);
        let qa = collocation_solution(problem, Family::Chebyshev, Approach::Quasilinearization, 3);
        let d = max_diff(&newton, &qa);
        assert!(d <= 1e-8, "{problem}: {d}");
    }
}

#[test]
fn rescaling_the_basis_leaves_y_unchanged() {
    let p = builtin("example2").unwrap();
    let cfg = SolverConfig::default();
    let b = WaveletBasis::new(Family::Gegenbauer { alpha: 1.5 }, 3).unwrap();
    let y = solve(&p, &b, &cfg).unwrap().collocation_values();
    for factor in [1e-3, 0.5, 7.0, 1e3] {
        let s = solve(&p, &b.rescaled(factor), &cfg).unwrap();
        let d = max_diff(&y, &s.collocation_values());
        assert!(d <= 1e-10, "factor {factor}: {d}");
    }
}

#[test]
fn few_iterations() {
    for problem in ["example1", "example2"] {
        for fam in FAMILIES {
            for approach in [Approach::Newton, Approach::Quasilinearization] {
                let p = builtin(problem).unwrap();
                let b = WaveletBasis::new(fam, 3).unwrap();
                let s = solve(&p, &b, &SolverConfig::with_approach(approach)).unwrap();
                assert!(
                    s.iterations <= 10,
                    "{problem} {fam} {approach:?}: {}",
                    s.iterations
                );
            }
        }
    }
}

#[test]
fn boundary_data_hold_for_any_coefficients() {
    let mut rng = StdRng::seed_from_u64(7);
    let dirichlet = BoundaryCondition::Dirichlet {
        alpha: 0.3,
        beta: -1.2,
    };
    let robin = BoundaryCondition::NeumannRobin {
        alpha: 0.4,
        a: 2.0,
        b: 1.0,
        beta: 0.5,
    };
    for fam in FAMILIES {
        let basis = WaveletBasis::new(fam, 2).unwrap();
        let d = boundary_representation(&basis, dirichlet).unwrap();
        let r = boundary_representation(&basis, robin).unwrap();
        for _ in 0..100 {
            let c = CoefficientVector(
                (0..basis.size())
                    .map(|_| rng.gen_range(-1.0..1.0))
                    .collect(),
            );
            assert!((d.y(0.0, &c) - 0.3).abs() <= 1e-10);
            assert!((d.y(1.0, &c) + 1.2).abs() <= 1e-10);
            assert!((r.dy(0.0, &c) - 0.4).abs() <= 1e-10);
            assert!((2.0 * r.y(1.0, &c) + r.dy(1.0, &c) - 0.5).abs() <= 1e-10);
        }
    }
}

#[test]
fn solution_interpolates_on_collocation_grid() {
    let p = builtin("example1").unwrap();
    let b = WaveletBasis::new(Family::Legendre, 3).unwrap();
    let s = solve(&p, &b, &SolverConfig::default()).unwrap();
    let grid = collocation_points(8).unwrap();
    for (&t, v) in grid.points().iter().zip(s.collocation_values()) {
        assert_eq!(s.y(t), v);
        // collocation residual is tiny at the nodes
        let r = s.d2y(t) + 2.0 / t * s.dy(t) + s.y(t).powi(5);
        assert!(r.abs() <= 1e-10, "{t}: {r}");
    }
}
