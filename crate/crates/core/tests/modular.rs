use g2sew::modular::{check_automorphy, check_equivariance, check_lattice_automorphy, chi2, AutomorphyKind, GElement};
use g2sew::sewing::SewingPoint;
use g2sew::theta::EvenLattice;
use g2sew::C64;

fn points(frac: f64) -> Vec<SewingPoint> {
    [(C64::new(0.0, 2.0), C64::new(0.0, 2.0)), (C64::new(0.3, 1.5), C64::new(-0.2, 1.8))]
        .iter()
        .map(|&(a, b)| SewingPoint::at_margin(a, b, frac, 0.6).unwrap())
        .collect()
}

#[test]
fn period_map_is_equivariant() {
    for p in points(0.3) {
        for (name, g) in GElement::generators() {
            let r = check_equivariance(&g, &p, 16).unwrap();
            assert!(r < 1e-7, "{name}: {r}");
        }
        assert!(check_equivariance(&GElement::beta(), &p, 16).unwrap() < 1e-12);
        assert_eq!(check_equivariance(&GElement::identity(), &p, 16).unwrap(), 0.0);
    }
}

#[test]
fn equivariance_improves_with_truncation() {
    let p = points(0.3).remove(1);
    for (_, g) in GElement::generators() {
        let a = check_equivariance(&g, &p, 12).unwrap();
        let b = check_equivariance(&g, &p, 20).unwrap();
        assert!(b <= a.max(1e-13), "{a} {b}");
    }
}

#[test]
fn rank_two_characters() {
    for p in points(0.3) {
        for (name, g) in GElement::generators() {
            let r = check_automorphy(&g, &p, 16, AutomorphyKind::Rank2).unwrap();
            assert_eq!(r.character, Some(chi2(&g).unwrap()), "{name}");
            assert!(r.residual < 1e-7, "{name}: {}", r.residual);
        }
    }
}

#[test]
fn rank_24_is_automorphic() {
    for p in points(0.3) {
        for (name, g) in GElement::generators() {
            let r = check_automorphy(&g, &p, 16, AutomorphyKind::Rank24).unwrap();
            assert!(r.residual < 1e-6, "{name}: {}", r.residual);
        }
    }
}

#[test]
fn normalized_lattice_function_follows_theta() {
    for p in points(0.3) {
        for (name, g) in GElement::generators() {
            let r = check_lattice_automorphy(&EvenLattice::a1(), &g, &p, 16).unwrap();
            assert!(r < 1e-7, "{name}: {r}");
        }
    }
}
