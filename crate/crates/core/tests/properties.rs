use kpp_halfline::entire::{psi_n, psi_n_prime, psi_n_second};
use kpp_halfline::halfline::{solve, step, Field, Grid, Kpp};
use kpp_halfline::harness::random::{ordered_pair, random_monotone};
use kpp_halfline::phaseplane::{bc_constant, eigenvalues};
use kpp_halfline::reaction::{Preset, Reaction};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn logistic_eta(m: f64, t: f64) -> f64 {
    m / (m + (1.0 - m) * (-t).exp())
}

fn small_grid() -> Grid {
    Grid::new(30.0, 300, 0.05).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eta_matches_closed_form(m in 0.001f64..0.999, t in -5.0f64..8.0) {
        let r = Reaction::logistic();
        let e = r.eta(m, t).unwrap();
        prop_assert!((e - logistic_eta(m, t)).abs() < 1e-8);
    }

    #[test]
    fn eta_is_monotone(m in 0.01f64..0.9, t in -3.0f64..3.0, dm in 0.001f64..0.09, dt in 0.01f64..1.0) {
        for r in [Reaction::cubic(), Reaction::sine()] {
            let base = r.eta(m, t).unwrap();
            prop_assert!(r.eta(m, t + dt).unwrap() > base);
            prop_assert!(r.eta(m + dm, t).unwrap() > base);
            prop_assert!(base > 0.0 && base < 1.0);
        }
    }

    #[test]
    fn eta_semigroup(m in 0.01f64..0.9, t in 0.0f64..3.0, s in 0.0f64..3.0) {
        let r = Reaction::sine();
        let mid = r.eta_with_tol(m, t, 1e-12).unwrap();
        let two = r.eta_with_tol(mid, s, 1e-12).unwrap();
        let one = r.eta_with_tol(m, t + s, 1e-12).unwrap();
        prop_assert!((one - two).abs() < 1e-9, "{} vs {}", one, two);
    }

    #[test]
    fn vieta_relations(rate in 0.2f64..5.0, k in 1.0f64..10.0) {
        let r = Reaction::preset(Preset::Logistic { rate }).unwrap();
        let c = k * r.c0();
        let e = eigenvalues(&r, c);
        prop_assert!((e.lam0_plus * e.lam0_minus - r.fp0()).abs() <= 1e-12 * r.fp0().max(1.0));
        prop_assert!((e.lam0_plus + e.lam0_minus - c).abs() <= 1e-12 * c);
        prop_assert!((e.lam1_plus * e.lam1_minus - r.fp1()).abs() <= 1e-12 * c * c);
    }

    #[test]
    fn bc_decreases_in_c(k1 in 1.0f64..10.0, gap in 1e-3f64..5.0) {
        let r = Reaction::logistic();
        let b1 = bc_constant(&r, k1 * r.c0()).unwrap();
        let b2 = bc_constant(&r, (k1 + gap) * r.c0()).unwrap();
        prop_assert!(b2 < b1);
        prop_assert!(b1 <= 2.0 && b2 > 1.0);
    }

    #[test]
    fn psi_shape(n in 1usize..200, x in 0.0f64..20.0) {
        for r in [Reaction::logistic(), Reaction::cubic(), Reaction::sine()] {
            let big_n = 5;
            let half = 0.5 * r.fp0();
            prop_assert!(psi_n_prime(&r, n, big_n, x) >= 0.0);
            prop_assert!(psi_n_second(&r, n, big_n, x) <= 0.0);
            prop_assert!(psi_n_second(&r, n, big_n, x) + half * psi_n(&r, n, big_n, x) >= -1e-15);
            prop_assert!(psi_n(&r, n, big_n, x) <= 1.0 / (n + big_n) as f64 + 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ordered_pairs_stay_ordered(seed in 0u64..1_000, i in 0u64..1_000) {
        let r = Reaction::logistic();
        let g = small_grid();
        let (u, v) = ordered_pair(seed, i, &g);
        let a = solve(Kpp(&r), &g, &Field::new(0.0, u), 1.0, &[0.5, 1.0]).unwrap();
        let b = solve(Kpp(&r), &g, &Field::new(0.0, v), 1.0, &[0.5, 1.0]).unwrap();
        for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
            for (x, y) in sa.u.iter().zip(&sb.u) {
                prop_assert!(x - y <= 1e-13);
                prop_assert!(*x >= -1e-13 && *y <= 1.0 + 1e-13);
            }
        }
    }

    #[test]
    fn step_keeps_monotone_data_monotone(seed in 0u64..10_000, amp in 0.05f64..1.0) {
        let r = Reaction::logistic();
        let g = small_grid();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_monotone(&mut rng, &g, amp);
        let next = step(Kpp(&r), &g, &Field::new(0.0, u)).unwrap();
        prop_assert_eq!(next.u[0], 0.0);
        // The zero-flux closure at L is not met by the sampled data, so the
        // check stops 5 units short of it.
        let inner = ((g.l - 5.0) / g.dx()) as usize;
        let worst = next.u[..=inner].windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        prop_assert!(worst >= -1e-14, "worst {}", worst);
    }
}
