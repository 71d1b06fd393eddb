use g2sew_cli::output::Num;
use g2sew_cli::parse_complex;
use proptest::prelude::*;

proptest! {
    #[test]
    fn complex_text_round_trips(re in any::<f64>().prop_filter("finite", |x| x.is_finite()), im in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        for s in [format!("{re}{im:+}i"), format!("{re:e}{im:+e}i"), format!("{re:.16e}{im:+.16e}i")] {
            let z = parse_complex(&s).unwrap();
            prop_assert_eq!((z.re.to_bits(), z.im.to_bits()), (re.to_bits(), im.to_bits()), "{}", s);
        }
    }

    #[test]
    fn json_numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = serde_json::to_string(&Num(x)).unwrap();
        let back: f64 = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }
}
