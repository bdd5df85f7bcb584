use fracstab_core::lyapunov::{caputo_of_functional, decrescence_certificate, default_tolerance};
use fracstab_core::{solve_fde_abm, Grid64, Order64, SicaParams, TeivParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

fn random_sica(rng: &mut ChaCha8Rng) -> SicaParams {
    let base = SicaParams::baseline();
    let mut p = SicaParams {
        lambda: base.lambda * log_uniform(rng, 0.1, 10.0),
        mu: base.mu * log_uniform(rng, 0.3, 3.0),
        rho: base.rho * log_uniform(rng, 0.3, 3.0),
        phi: base.phi * log_uniform(rng, 0.3, 3.0),
        alpha_t: base.alpha_t * log_uniform(rng, 0.3, 3.0),
        omega: base.omega * log_uniform(rng, 0.3, 3.0),
        d: base.d * log_uniform(rng, 0.3, 3.0),
        ..base
    };
    p.beta = log_uniform(rng, 0.2, 5.0) / (p.xi1() * p.xi2() / p.n_const());
    p
}

pub fn random_teiv(rng: &mut ChaCha8Rng, r0_lo: f64, r0_hi: f64) -> TeivParams {
    let base = TeivParams::example();
    let mut p = TeivParams {
        lambda: base.lambda * log_uniform(rng, 0.2, 5.0),
        mu_t: base.mu_t * log_uniform(rng, 0.3, 3.0),
        mu_e: base.mu_e * log_uniform(rng, 0.3, 3.0),
        mu_i: base.mu_i * log_uniform(rng, 0.3, 3.0),
        mu_v: base.mu_v * log_uniform(rng, 0.3, 3.0),
        rho: base.rho * log_uniform(rng, 0.1, 10.0),
        gamma: base.gamma * log_uniform(rng, 0.3, 3.0),
        k: base.k * log_uniform(rng, 0.3, 3.0),
        beta: 1.0,
        alpha1: base.alpha1 * rng.random_range(0.0..3.0),
        alpha2: base.alpha2 * rng.random_range(0.0..3.0),
        alpha3: base.alpha3 * rng.random_range(0.0..3.0),
    };
    p.beta = log_uniform(rng, r0_lo, r0_hi) / p.r0();
    p
}

#[test]
fn sica_threshold_matches_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = [0usize; 2];
    for _ in 0..100 {
        let p = random_sica(&mut rng);
        let r0 = p.r0();
        if (r0 - 1.0).abs() < 1e-6 {
            continue;
        }
        let stable = p.disease_free_abscissa().unwrap() < 0.0;
        assert_eq!(stable, r0 < 1.0, "{p:?} r0={r0}");
        seen[stable as usize] += 1;
    }
    assert!(seen[0] > 10 && seen[1] > 10);
}

#[test]
fn teiv_threshold_matches_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let p = random_teiv(&mut rng, 0.2, 5.0);
        let r0 = p.r0();
        if (r0 - 1.0).abs() < 1e-6 {
            continue;
        }
        assert_eq!(p.infection_free_abscissa().unwrap() < 0.0, r0 < 1.0, "{p:?}");
    }
}

/// Positive state with `S + I + C + A <= S0`, the forward-invariant region.
fn admissible_sica_state(rng: &mut ChaCha8Rng, s0: f64) -> [f64; 4] {
    let total = s0 * rng.random_range(1e-3..1.0);
    let w: [f64; 4] = std::array::from_fn(|_| rng.random_range(1e-3..1.0));
    let sum: f64 = w.iter().sum();
    w.map(|x| total * x / sum)
}

#[test]
fn sica_functionals_decrease_along_the_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let base = SicaParams::baseline();
    let v0 = base.v0().unwrap();
    let end = SicaParams::endemic_scenario();
    let v1 = end.v1().unwrap();
    let estar = end.endemic().unwrap();
    for _ in 0..500 {
        let x = admissible_sica_state(&mut rng, base.s0());
        assert!(v0.field_derivative(&base, &x).unwrap() <= 1e-9 * base.lambda, "{x:?}");
        let y = admissible_sica_state(&mut rng, end.s0());
        assert!(v1.field_derivative(&end, &y).unwrap() <= 1e-9 * end.lambda, "{y:?}");
        assert!(v1.eval(&y).unwrap() > 0.0);
    }
    assert!(v1.field_derivative(&end, &estar).unwrap().abs() < 1e-6);
}

#[test]
fn teiv_functional_decreases_along_the_field_without_reversion() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..20 {
        let mut p = random_teiv(&mut rng, 1.2, 6.0);
        p.rho = 0.0;
        p.beta *= rng.random_range(1.2..6.0) / p.r0();
        let eq = p.chronic().unwrap();
        let l = p.lyapunov(&eq).unwrap();
        for _ in 0..25 {
            let x: [f64; 4] = std::array::from_fn(|i| eq[i] * log_uniform(&mut rng, 0.1, 10.0));
            let scale = p.lambda * (1.0 + l.gradient(&x).unwrap().iter().map(|g| g.abs()).sum::<f64>());
            assert!(l.field_derivative(&p, &x).unwrap() <= 1e-9 * scale, "{p:?} {x:?}");
            assert!(l.eval(&x).unwrap() > 0.0);
        }
    }
}

#[test]
fn teiv_reversion_can_raise_the_functional() {
    // With rho > 0 the quadratic correction does not absorb the
    // (T - T̄)(E - Ē)/T cross term everywhere.
    let p = TeivParams {
        lambda: 22.16260408406491,
        mu_t: 0.006698084892523899,
        mu_e: 0.003493214141848626,
        mu_i: 1.1314977246226021,
        mu_v: 4.642685566599276,
        rho: 0.010627485000259852,
        gamma: 1.1715832991422068,
        k: 135.98548512259606,
        beta: 0.0003078562788528925,
        alpha1: 0.002061439503143176,
        alpha2: 9.405721053342298e-5,
        alpha3: 9.583727117184606e-7,
    };
    let l = p.lyapunov(&p.chronic().unwrap()).unwrap();
    let x = [
        354.35622109109187,
        11.473228865793445,
        6.755163062442932,
        232.6580001992442,
    ];
    let d = l.field_derivative(&p, &x).unwrap();
    assert!((d - 0.1126).abs() < 1e-3, "{d}");
}

#[test]
fn teiv_certificate_along_fractional_trajectory() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let p = random_teiv(&mut rng, 1.5, 4.0);
    let eq = p.chronic().unwrap();
    let l = p.lyapunov(&eq).unwrap();
    let x0 = [eq[0] * 2.0, eq[1] * 0.5, eq[2] * 0.5, eq[3] * 3.0];
    let order = Order64::new(0.8).unwrap();
    let tr = solve_fde_abm(&p, order, &x0, Grid64::new(0.0, 0.05, 4000).unwrap()).unwrap();
    let d = caputo_of_functional(&l, &tr).unwrap();
    let cert = decrescence_certificate(&d, default_tolerance(tr.grid.h, order, d.scale()));
    assert!(cert.pass, "{cert:?}");
}
