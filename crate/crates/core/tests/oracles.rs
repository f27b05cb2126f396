//! Randomized oracle suites that cut across modules.

use std::sync::Arc;

use otlab_core::embed::{
    cb_amplification_norm, factorize, inclusion_constant, pi_summing_lower, PhaseSearchOptions,
    VectorFamily,
};
use otlab_core::qtorus::{LatticeGrid, ThetaMatrix, TorusElement};
use otlab_core::spectral::{operator_norm, singular_values, orlicz_schatten_norm};
use otlab_core::young::{luxemburg_norm, YoungFunction};

fn catalog() -> Vec<YoungFunction> {
    vec![
        YoungFunction::power(1.0).unwrap(),
        YoungFunction::power(2.0).unwrap(),
        YoungFunction::power_log(2.0, 1.0).unwrap(),
        YoungFunction::power_log(2.5, 0.0).unwrap(),
        YoungFunction::interpolate(
            YoungFunction::power(1.0).unwrap(),
            YoungFunction::power(2.0).unwrap(),
            0.5,
        )
        .unwrap(),
    ]
}

#[test]
fn ideal_property_over_random_triples() {
    // || X A Y ||_{S_Phi} <= ||X|| ||Y|| ||A||_{S_Phi} with slack 1e-8
    let grid = LatticeGrid::shared(2, 3).unwrap();
    let theta = ThetaMatrix::from_upper_triangle(2, &[0.3]).unwrap();
    let gauges = catalog();
    let mut worst = f64::NEG_INFINITY;
    for trial in 0..20 {
        let mut rng = otlab_core::rng::stream(101, trial);
        let x = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng).matrix_rep();
        let a = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng).matrix_rep();
        let y = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng).matrix_rep();
        let xn = operator_norm(&x).unwrap();
        let yn = operator_norm(&y).unwrap();
        let xay = x.mul(&a).unwrap().mul(&y).unwrap();
        let sv_a = singular_values(&a).unwrap();
        let sv_xay = singular_values(&xay).unwrap();
        for phi in &gauges {
            let lhs = luxemburg_norm(sv_xay.values(), phi).unwrap();
            let rhs = xn * yn * luxemburg_norm(sv_a.values(), phi).unwrap();
            worst = worst.max(lhs - rhs);
        }
    }
    assert!(worst <= 1e-8, "worst ideal-property violation {worst}");
}

#[test]
fn triangle_inequality_at_operator_level() {
    // rearrangement is handled by the SVD of the sum
    let grid = LatticeGrid::shared(2, 3).unwrap();
    let theta = ThetaMatrix::from_upper_triangle(2, &[0.3]).unwrap();
    let phi = YoungFunction::power_log(2.0, 1.0).unwrap();
    for trial in 0..10 {
        let mut rng = otlab_core::rng::stream(102, trial);
        let a = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng).matrix_rep();
        let b = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng).matrix_rep();
        let sum = a.add(&b).unwrap();
        let na = orlicz_schatten_norm(&a, &phi).unwrap();
        let nb = orlicz_schatten_norm(&b, &phi).unwrap();
        let ns = orlicz_schatten_norm(&sum, &phi).unwrap();
        assert!(ns <= na + nb + 1e-8, "trial {trial}: {ns} > {na} + {nb}");
    }
}

#[test]
fn pi_bounds_stay_under_the_factorization_upper_bound() {
    let grid = LatticeGrid::shared(2, 3).unwrap();
    let phi = YoungFunction::power_log(2.5, 0.0).unwrap();
    let report = factorize(&grid, 1.0, &phi, 7, 60).unwrap();
    assert!(report.pi1_lower <= report.upper_bound + 1e-8);
    // independent re-derivation of the upper bound pieces
    let c = inclusion_constant(&phi, grid.len()).unwrap();
    assert!((report.upper_bound - c * report.ls_orlicz_norm).abs() <= 1e-12);
    // pi_2 against a direct basis-family computation
    let mu: Vec<f64> = grid
        .eigenvalues()
        .iter()
        .map(|&l| (1.0 + l).powf(-0.5))
        .collect();
    let basis = VectorFamily::canonical_basis(grid.len()).unwrap();
    let pi2 = pi_summing_lower(&mu, &basis, 2.0, &PhaseSearchOptions::default()).unwrap();
    assert!((pi2.value - report.pi2_exact).abs() <= 1e-10 * report.pi2_exact);
}

#[test]
fn amplification_constant_for_twisted_elements() {
    let grid = LatticeGrid::shared(2, 2).unwrap();
    let theta = ThetaMatrix::from_upper_triangle(2, &[0.3]).unwrap();
    let mut rng = otlab_core::rng::stream(103, 0);
    let a = TorusElement::random(Arc::clone(&grid), theta, &mut rng).matrix_rep();
    let base = cb_amplification_norm(&a, 1).unwrap();
    for k in 2..=4 {
        let v = cb_amplification_norm(&a, k).unwrap();
        assert!((v - base).abs() <= 1e-10 * (1.0 + base));
    }
}

#[test]
fn optimality_matches_membership_across_catalog() {
    // scan verdicts agree with the series verdicts for every catalog gauge
    use otlab_core::embed::optimality_scan;
    use otlab_core::spectral::ls_spectrum;
    use otlab_core::young::series_membership;
    for phi in catalog() {
        let scan = optimality_scan(2, 1.0, &phi, &[4, 8, 16]).unwrap();
        let grid = LatticeGrid::new(2, 16).unwrap();
        let spec = ls_spectrum(&grid, 1.0).unwrap();
        let series = series_membership(spec.tail().unwrap(), &phi, spec.values()).unwrap();
        assert_eq!(
            scan.membership.holds(),
            series.holds(),
            "phi = {}",
            phi.descriptor()
        );
        if series.holds() {
            assert!(scan.verdict.holds(), "phi = {}: {}", phi.descriptor(), scan.verdict);
        }
        if series.fails() {
            assert!(scan.verdict.fails(), "phi = {}: {}", phi.descriptor(), scan.verdict);
        }
    }
}
