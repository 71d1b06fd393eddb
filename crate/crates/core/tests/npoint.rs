use g2sew::fock::genus2_twopoint_direct;
use g2sew::npoint::{form_transport_check, heisenberg_npoint, virasoro_onepoint, virasoro_onepoint_module, ward_identity_check, WardTarget};
use g2sew::partition::z2_heisenberg;
use g2sew::sewing::{annulus_truncation, SewingPoint, SheetPoint};
use g2sew::taylor::{max_relative_discrepancy, taylor_coefficients};
use g2sew::theta::EvenLattice;
use g2sew::C64;

fn points() -> Vec<SewingPoint> {
    vec![
        SewingPoint::new(C64::new(0.0, 2.0), C64::new(0.0, 2.0), C64::new(0.0, 0.0)).unwrap(),
        SewingPoint::new(C64::new(0.3, 1.5), C64::new(-0.2, 1.8), C64::new(0.0, 0.0)).unwrap(),
    ]
}

#[test]
fn two_point_matches_fock_sum() {
    let (x1, x2) = (C64::new(2.0, 1.0), C64::new(-1.5, 2.0));
    for p in points() {
        // small circle: the form's ε-series converges like (ε/x²)^n
        let r = 0.05 * p.bound;
        let closed = taylor_coefficients(
            |e| {
                let q = p.with_eps(e)?;
                Ok(heisenberg_npoint(&[SheetPoint::new(1, x1), SheetPoint::new(1, x2)], &q, 16)?.coefficient)
            },
            r,
            48,
            6,
        )
        .unwrap();
        let direct = genus2_twopoint_direct(x1, x2, &p, 6).unwrap().coeffs;
        let d = max_relative_discrepancy(&closed, &direct, r);
        assert!(d < 1e-7, "{d}");
    }
}

#[test]
fn virasoro_matches_subtracted_limit() {
    let h = C64::new(1e-3, 0.0);
    for p in points() {
        let p = p.with_eps(C64::from_polar(0.25 * p.bound, 0.6)).unwrap();
        let k = annulus_truncation(p.margin);
        let z = z2_heisenberg(&p, k, 1).unwrap().value;
        for x in [SheetPoint::new(1, C64::new(1.9, 1.2)), SheetPoint::new(2, C64::new(-2.2, 0.9))] {
            let a = SheetPoint::new(x.sheet, x.z - h / 2.0);
            let b = SheetPoint::new(x.sheet, x.z + h / 2.0);
            let two = heisenberg_npoint(&[a, b], &p, k).unwrap().coefficient;
            let lim = (two - z / (h * h)) * 0.5;
            let v = virasoro_onepoint(&x, &p, k).unwrap().coefficient;
            assert!((lim - v).norm() < 1e-5 * v.norm(), "{lim} {v}");
        }
    }
}

#[test]
fn ward_identities() {
    for p in points() {
        let p = p.with_eps(C64::from_polar(0.1 * p.bound, -0.3)).unwrap();
        for x in [SheetPoint::new(1, C64::new(1.9, 1.2)), SheetPoint::new(2, C64::new(-2.2, 0.9))] {
            for t in [WardTarget::Module([1.0, 0.0]), WardTarget::Module([-1.0, 2.0]), WardTarget::Lattice(EvenLattice::a1())] {
                let r = ward_identity_check(&t, &x, &p, 16).unwrap();
                assert!(r < 1e-6, "{t:?} {r}");
            }
            let r = ward_identity_check(&WardTarget::Module([0.0, 0.0]), &x, &p, 16).unwrap();
            assert!(r < 1e-8);
        }
    }
}

#[test]
fn module_virasoro_reduces_at_zero_charge() {
    let p = SewingPoint::at_margin(C64::new(0.3, 1.5), C64::new(-0.2, 1.8), 0.25, 1.0).unwrap();
    let x = SheetPoint::new(1, C64::new(1.9, 1.2));
    let a = virasoro_onepoint_module([0.0, 0.0], &x, &p, 16).unwrap().coefficient;
    let b = virasoro_onepoint(&x, &p, 16).unwrap().coefficient;
    assert!((a - b).norm() <= 1e-14 * b.norm());
}

#[test]
fn transported_form_agrees() {
    for p in points() {
        for frac in [0.1, 0.25, 0.4] {
            let p = p.with_eps(C64::from_polar(frac * p.bound, 0.8)).unwrap();
            let k = annulus_truncation(p.margin);
            let x2 = C64::from_polar(0.5 * p.dist[0] * p.margin.sqrt(), 1.3);
            // far from the annulus so only x2 tests the transport
            let x1 = C64::new(0.2, 3.0);
            let r = form_transport_check(x1, x2, &p, k).unwrap();
            assert!(r < 1e-6, "{frac} {r}");
        }
    }
}
