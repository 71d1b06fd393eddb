use proptest::prelude::*;

use g2sew::fock::{involutions, partitions, perfect_matchings};
use g2sew::modular::{act_on_h2, chi, embed_sp4, GElement, Sl2};
use g2sew::sewing::{period_matrix, PeriodMatrix, SewingPoint};
use g2sew::theta::{siegel_theta2, siegel_theta2_terms, EvenLattice};
use g2sew::C64;

fn word() -> impl Strategy<Value = Sl2> {
    prop::collection::vec(prop_oneof![Just(Sl2::t()), Just(Sl2::s()), Just(Sl2::s() * Sl2::s() * Sl2::s() * Sl2::t())], 0..6)
        .prop_map(|w| w.into_iter().fold(Sl2::identity(), |a, b| a * b))
}

fn h2() -> impl Strategy<Value = PeriodMatrix> {
    (-0.5..0.5f64, 1.0..2.0f64, -0.5..0.5f64, 1.0..2.0f64, -0.5..0.5f64, -0.3..0.3f64).prop_map(|(a, b, c, d, e, f)| {
        let mut o = PeriodMatrix::diag(C64::new(a, b), C64::new(c, d));
        o.omega12 = C64::new(e, f);
        o
    })
}

fn entries(o: &PeriodMatrix) -> [C64; 3] {
    [o.omega11, o.omega12, o.omega22]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chi_is_a_character(g in word(), h in word()) {
        prop_assert_eq!(chi(&(g * h)).unwrap(), chi(&g).unwrap() * chi(&h).unwrap());
    }

    #[test]
    fn sp4_embedding_is_multiplicative(g1 in word(), g2 in word(), h1 in word(), h2 in word()) {
        let a = embed_sp4(&GElement { gamma1: g1, gamma2: g2, beta_power: 0 });
        let b = embed_sp4(&GElement { gamma1: h1, gamma2: h2, beta_power: 0 });
        let ab = embed_sp4(&GElement { gamma1: g1 * h1, gamma2: g2 * h2, beta_power: 0 });
        prop_assert!(a.is_symplectic());
        prop_assert_eq!(a * b, ab);
        let beta = embed_sp4(&GElement::beta());
        let swapped = embed_sp4(&GElement { gamma1: g2, gamma2: g1, beta_power: 0 });
        prop_assert_eq!(beta * a * beta, swapped);
    }

    #[test]
    fn h2_action_composes(o in h2(), g1 in word(), g2 in word(), m in 0u8..2) {
        let a = embed_sp4(&GElement { gamma1: g1, gamma2: g2, beta_power: m });
        let b = embed_sp4(&GElement { gamma1: g2, gamma2: Sl2::s(), beta_power: 1 - m });
        let lhs = act_on_h2(&(a * b), &o).unwrap();
        let rhs = act_on_h2(&a, &act_on_h2(&b, &o).unwrap()).unwrap();
        let scale = entries(&lhs).iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(lhs.max_diff(&rhs) < 1e-10 * scale);
        prop_assert!(lhs.im_positive_definite());
    }

    #[test]
    fn theta_sum_is_order_independent(o in h2(), seed in any::<u64>()) {
        let lat = EvenLattice::a1();
        let v = siegel_theta2(&lat, &o, 60.0).unwrap().value;
        let mut terms = siegel_theta2_terms(&lat, &o, 60.0);
        // deterministic shuffle
        let mut s = seed | 1;
        for i in (1..terms.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            terms.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let w: C64 = terms.iter().sum();
        prop_assert!((v - w).norm() < 1e-13 * v.norm().max(1.0));
    }

    #[test]
    fn period_matrix_is_symmetric_and_in_h2(
        t1 in (-0.5..0.5f64, 1.0..2.5f64),
        t2 in (-0.5..0.5f64, 1.0..2.5f64),
        frac in 0.0..0.6f64,
        phase in 0.0..6.3f64,
    ) {
        let p = SewingPoint::at_margin(C64::new(t1.0, t1.1), C64::new(t2.0, t2.1), frac, phase).unwrap();
        let o = period_matrix(&p, 12).unwrap();
        prop_assert!(o.im_positive_definite());
        let q = period_matrix(&p.swapped(), 12).unwrap();
        prop_assert!((o.omega11 - q.omega22).norm() < 1e-12);
        prop_assert!((o.omega12 - q.omega12).norm() < 1e-12);
    }
}

#[test]
fn partition_counts() {
    let p = [1usize, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
    for (n, &want) in p.iter().enumerate() {
        let ps = partitions(n as u32);
        assert_eq!(ps.len(), want, "p({n})");
        assert!(ps.iter().all(|x| x.weight() == n as u32));
    }
}

#[test]
fn involution_counts() {
    // fixed-point-free: (2m-1)!!; unrestricted: telephone numbers
    let dfact = [1usize, 1, 3, 15, 105, 945];
    for (m, &want) in dfact.iter().enumerate() {
        assert_eq!(perfect_matchings(2 * m).len(), want);
    }
    assert!(perfect_matchings(5).is_empty());
    let tel = [1usize, 1, 2, 4, 10, 26, 76, 232];
    for (n, &want) in tel.iter().enumerate() {
        assert_eq!(involutions(n, &|_| true).len(), want);
    }
}
