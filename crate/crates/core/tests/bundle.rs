use nalgebra::SymmetricEigen;

use su11::linalg::symmetric_eigs;
use su11::metric::{mu_nu, z_domain, MetricSolution, SwansonParams};
use su11::realization::{discrete_series, materialize, multiboson, oscillator_full, oscillator_sector, Parity, RealizationKind};
use su11::verify::{build_bundle, Tolerances};

fn swanson() -> SwansonParams {
    SwansonParams::new(1.0, 0.2, 0.1).unwrap()
}

#[test]
fn spectrum_of_h_matches_dense_oracle() {
    let p = swanson();
    let s = MetricSolution::solve(&p, 0.5).unwrap();
    let r = discrete_series(0.25, 400).unwrap();
    let h = materialize(&s.h, &r).unwrap();
    let ours = symmetric_eigs(&h).unwrap().values;
    let mut oracle: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    oracle.sort_by(f64::total_cmp);
    let expect = [0.47958, 2.39792, 4.31625, 6.23458, 8.15291];
    for n in 0..5 {
        assert!((ours[n] - oracle[n]).abs() < 1e-10 * oracle[n]);
        assert!((ours[n] - expect[n]).abs() < 1e-5);
    }
}

#[test]
fn doubling_n_does_not_degrade_residuals() {
    let p = swanson();
    let tol = Tolerances::default();
    for z in [-0.4, 0.4, 0.8] {
        let small = build_bundle(&p, z, &discrete_series(0.25, 100).unwrap(), 40, 5).unwrap();
        let large = build_bundle(&p, z, &discrete_series(0.25, 200).unwrap(), 40, 5).unwrap();
        let limits = [tol.herm, tol.eq10, tol.intertwine, tol.quasi, tol.commute, 1e-10, tol.eigvec];
        for (((name, a), (_, b)), lim) in small.residuals.entries().iter().zip(large.residuals.entries()).zip(limits) {
            assert!(b <= *a || b <= lim, "z = {z}: {name} {a} -> {b}");
        }
        for (a, b) in small.spectrum.iter().zip(&large.spectrum) {
            assert!((a - b).abs() < 1e-9 * a);
        }
    }
}

#[test]
fn other_realizations_pass_the_bundle_checks() {
    let p = swanson();
    let tol = Tolerances::default();
    let cases = [
        oscillator_full(200).unwrap(),
        oscillator_sector(Parity::Odd, 200).unwrap(),
        multiboson(3, &[0.2, 0.5, 0.9], 240).unwrap(),
        "radial:L=1".parse::<RealizationKind>().unwrap().build(200, 1.0).unwrap(),
    ];
    for r in cases {
        // same N/T ratio as the CLI defaults; interleaved sectors need the margin per sector
        let t = r.dim / 4;
        // z = 0.4 puts e^{qK₀} across hundreds of bits, so the extended-precision
        // products only cancel if the realization is rebuilt exactly
        for z in [0.4, 0.6] {
            let b = build_bundle(&p, z, &r, t, 5).unwrap();
            assert!(b.passes(&tol), "{:?} z = {z}: {:?}", r.kind, b.failures(&tol));
        }
    }
}

#[test]
fn conformal_parameters_give_passing_bundle() {
    let kind: RealizationKind = "conformal:k=0.75,c=1".parse().unwrap();
    let p = kind.forced_params(1.0).unwrap().unwrap();
    let r = kind.build(200, 1.0).unwrap();
    let dom = z_domain(&p);
    for z in [-0.8, 0.6] {
        assert!(dom.contains(z));
        let b = build_bundle(&p, z, &r, 50, 5).unwrap();
        assert!(b.passes(&Tolerances::default()), "{:?}", b.failures(&Tolerances::default()));
        let omega = p.effective_frequency();
        for (n, e) in b.spectrum.iter().enumerate() {
            assert!((e - 2.0 * omega * (n as f64 + 0.75)).abs() < 1e-9 * e);
        }
    }
}

#[test]
fn mu_and_nu_positive_on_parameter_grid() {
    // positivity is implied by h being a Hermitian oscillator but not proved in general
    let mut violations = Vec::new();
    for i in 0..20 {
        for j in 0..20 {
            let omega = 0.5 + 0.1 * i as f64;
            let alpha = omega * (-0.45 + 0.9 * i as f64 / 19.0);
            let beta = omega * (-0.45 + 0.9 * j as f64 / 19.0);
            let Ok(p) = SwansonParams::new(omega, alpha, beta) else { continue };
            for k in 0..41 {
                let z = -0.99 + 1.98 * k as f64 / 40.0;
                if let Ok((mu, nu)) = mu_nu(&p, z) {
                    if !(mu > 0.0 && nu > 0.0) {
                        violations.push((omega, alpha, beta, z, mu, nu));
                    }
                }
            }
        }
    }
    assert!(violations.is_empty(), "{:?}", &violations[..violations.len().min(5)]);
}
