use su11::metric::SwansonParams;
use su11::pdm::{build_pdm_h, gaussian, pdm_generators, refinement_study, PdmConfig, Verdict, REFINEMENT_POINTS};

fn cfg(z: f64) -> PdmConfig {
    PdmConfig::new(SwansonParams::new(1.0, 0.2, 0.1).unwrap(), z)
}

#[test]
fn generator_residuals_shrink_under_refinement() {
    let mut previous: Option<[f64; 4]> = None;
    for points in [400, 800, 1600] {
        let g = pdm_generators(&cfg(0.0).with_points(points)).unwrap();
        assert!(g.k0.is_symmetric());
        let f = gaussian(&g.x, -2.3, 0.4);
        let r = g.residuals(&f, (-3.2, -1.4));
        let now = [r.k0_kp, r.k0_km, r.kp_km, r.adjoint];
        if let Some(prev) = previous {
            for (a, b) in prev.iter().zip(&now) {
                // at least first order: halving Δx halves the residual
                assert!(*b <= 0.5 * a, "{prev:?} -> {now:?}");
            }
        }
        previous = Some(now);
    }
    assert!(previous.unwrap().iter().all(|v| *v < 1e-3));
}

#[test]
fn refinement_protocol_converges_at_second_order() {
    let study = refinement_study(&cfg(0.0), &REFINEMENT_POINTS, 3).unwrap();
    let changes = study.changes();
    for w in changes.windows(2) {
        // second order: each doubling cuts the change by about 4
        assert!(w[1] <= 0.3 * w[0], "{changes:?}");
    }
    assert_eq!(study.verdict(0.01), Verdict::Pass);
    assert!(study.relative_error() < 1e-4);
}

#[test]
fn spectrum_is_independent_of_z() {
    // μ and ν change with z but h stays isospectral
    let base = refinement_study(&cfg(0.0), &[2000], 3).unwrap();
    for z in [-0.6, 0.5, 0.8] {
        let other = refinement_study(&cfg(z), &[2000], 3).unwrap();
        assert!(other.boundary_decayed(), "z = {z}");
        for (a, b) in base.finest().eigenvalues.iter().zip(&other.finest().eigenvalues) {
            assert!((a - b).abs() / a < 2e-3, "z = {z}: {a} vs {b}");
        }
    }
}

#[test]
fn truncated_window_is_inconclusive() {
    let narrow = PdmConfig { x_min: -2.6, ..cfg(0.0) };
    let study = refinement_study(&narrow, &[500, 1000], 3).unwrap();
    assert_eq!(study.verdict(0.01), Verdict::Inconclusive);
}

#[test]
fn mass_and_potential_are_finite_and_positive() {
    let c = cfg(0.0).with_points(1000);
    let h = build_pdm_h(&c).unwrap();
    assert!(h.diag.iter().chain(&h.upper).all(|v| v.is_finite()));
    // off-diagonals are −(1/m)/(2Δx²) < 0, so 1/m > 0 everywhere
    assert!(h.upper.iter().all(|v| *v < 0.0));
    let extreme = PdmConfig { x_max: 400.0, points: 200, ..c };
    assert!(build_pdm_h(&extreme).is_err());
}
