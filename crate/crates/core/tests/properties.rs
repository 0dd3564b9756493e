use proptest::prelude::*;

use lclp::channel::{llr, qpsk_point, ChannelConfig};
use lclp::code::{lift_binary_matrix, parse_alist, random_regular, syndrome, SpcCode, TannerGraph};
use lclp::lclp::{decode, dual_objective, init, iterate};
use lclp::ms::{ms_cn_update, ms_decode, MessageState};
use lclp::oracle::brute_all_marginals;
use lclp::ring::{Kappa, Zq};
use lclp::selftest::{absolute_error, relative_semiring_error};
use lclp::sim::parse_ebn0_list;
use lclp::trellis::{all_marginals_for_kappa, NotAlphaForm};

const TOY: &str = "3 2 4\n1 2\n1 2 1\n2 2\n1 1\n1 3 2 1\n2 1\n1 1 2 3\n2 1 3 1\n";

fn small_code() -> impl Strategy<Value = (SpcCode, Vec<f64>)> {
    (2usize..=8, 1usize..=5).prop_flat_map(|(q, d)| {
        (
            prop::collection::vec(1..q, d),
            prop::collection::vec(-6.0f64..6.0, d * (q - 1)),
        )
            .prop_map(move |(h, costs)| (SpcCode::from_coefficients(Zq::new(q).unwrap(), h).unwrap(), costs))
    })
}

fn toy() -> TannerGraph {
    parse_alist(TOY).unwrap()
}

fn small_lifted(seed: u64) -> TannerGraph {
    lift_binary_matrix(&random_regular(24, 3, 6, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trellis_matches_enumeration_for_any_modulus((code, costs) in small_code(), kappa in 0.05f64..20.0) {
        let kappas = [Kappa::Finite(kappa), Kappa::Infinite];
        let brute = brute_all_marginals(&code, &costs, &kappas).unwrap();
        for (k, reference) in kappas.iter().zip(&brute) {
            let trellis = all_marginals_for_kappa(&code, &costs, *k, NotAlphaForm::Branch).unwrap();
            for i in 0..code.degree() {
                for a in 1..code.q() {
                    for (x, y) in [
                        (trellis.c_alpha(i, a), reference.c_alpha(i, a)),
                        (trellis.c_not_alpha(i, a), reference.c_not_alpha(i, a)),
                    ] {
                        let err = match k {
                            Kappa::Finite(kv) => relative_semiring_error(x, y, *kv),
                            Kappa::Infinite => absolute_error(x, y),
                        };
                        prop_assert!(matches!(err, Some(e) if e < 1e-9), "{x} vs {y} at kappa {k}");
                    }
                }
            }
        }
    }

    #[test]
    fn both_not_alpha_forms_agree((code, costs) in small_code(), kappa in 0.05f64..20.0) {
        for k in [Kappa::Finite(kappa), Kappa::Infinite] {
            let a = all_marginals_for_kappa(&code, &costs, k, NotAlphaForm::Branch).unwrap();
            let b = all_marginals_for_kappa(&code, &costs, k, NotAlphaForm::AltForward).unwrap();
            for i in 0..code.degree() {
                for al in 1..code.q() {
                    let (x, y) = (a.c_not_alpha(i, al), b.c_not_alpha(i, al));
                    match k {
                        Kappa::Finite(kv) => prop_assert!(relative_semiring_error(x, y, kv).unwrap() < 1e-12),
                        Kappa::Infinite => prop_assert_eq!(x, y),
                    }
                }
            }
        }
    }

    #[test]
    fn syndrome_is_linear(a in prop::collection::vec(0usize..4, 3), b in prop::collection::vec(0usize..4, 3)) {
        let g = toy();
        let sum: Vec<usize> = a.iter().zip(&b).map(|(x, y)| (x + y) % 4).collect();
        let (sa, sb, ss) = (syndrome(&a, &g).unwrap(), syndrome(&b, &g).unwrap(), syndrome(&sum, &g).unwrap());
        for j in 0..g.m() {
            prop_assert_eq!(ss[j], (sa[j] + sb[j]) % 4);
        }
    }

    #[test]
    fn llr_sign_follows_distance(re in -2.0f64..2.0, im in -2.0f64..2.0, sigma in 0.1f64..3.0) {
        let c = ChannelConfig::qpsk(sigma, 0).unwrap();
        let y = num_complex::Complex64::new(re, im);
        let l = llr(y, &c);
        let d0 = (y - qpsk_point(0)).norm_sqr();
        for a in 1..4 {
            let da = (y - qpsk_point(a)).norm_sqr();
            if (d0 - da).abs() > 1e-12 {
                prop_assert_eq!(l[a - 1] > 0.0, d0 < da);
            }
        }
    }

    #[test]
    fn comma_lists_parse_back(values in prop::collection::vec(-20.0f64..40.0, 1..8)) {
        let text: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        prop_assert_eq!(parse_ebn0_list(&text.join(",")).unwrap(), values);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dual_objective_never_decreases(
        seed in 0u64..1000,
        llr in prop::collection::vec(-5.0f64..5.0, 72),
        kappa in 0.5f64..20.0,
    ) {
        let g = small_lifted(seed);
        let mut state = init(&g, &llr, Kappa::Finite(kappa)).unwrap();
        let mut prev = dual_objective(&state, &g).unwrap();
        for _ in 0..16 {
            iterate(&mut state, &g).unwrap();
            let obj = dual_objective(&state, &g).unwrap();
            prop_assert!(obj >= prev - 1e-8, "{prev} -> {obj}");
            prev = obj;
        }
    }

    #[test]
    fn zero_llrs_stay_zero(seed in 0u64..1000, kappa in prop::option::of(0.05f64..50.0)) {
        let g = small_lifted(seed);
        let kappa = kappa.map_or(Kappa::Infinite, Kappa::Finite);
        let mut state = init(&g, &vec![0.0; 72], kappa).unwrap();
        for _ in 0..5 {
            iterate(&mut state, &g).unwrap();
        }
        prop_assert!(state.edges_are_zero());
    }

    #[test]
    fn decoders_return_codewords_when_converged(seed in 0u64..1000, llr in prop::collection::vec(-3.0f64..6.0, 72)) {
        let g = small_lifted(seed);
        for r in [decode(&g, &llr, Kappa::Infinite, 32).unwrap(), ms_decode(&g, &llr, 32).unwrap()] {
            prop_assert_eq!(r.converged, g.is_codeword(&r.word));
            prop_assert!(r.iterations_used <= 32);
        }
    }

    #[test]
    fn ms_decisions_scale_free(seed in 0u64..1000, llr in prop::collection::vec(-3.0f64..6.0, 72), p in -3i32..4) {
        let g = small_lifted(seed);
        // powers of two keep every sum exact, so ties break identically
        let c = 2f64.powi(p);
        let scaled: Vec<f64> = llr.iter().map(|x| x * c).collect();
        let (a, b) = (ms_decode(&g, &llr, 16).unwrap(), ms_decode(&g, &scaled, 16).unwrap());
        prop_assert_eq!(a.word, b.word);
        prop_assert_eq!(a.iterations_used, b.iterations_used);
    }

    #[test]
    fn ms_check_output_is_extrinsic(seed in 0u64..1000, llr in prop::collection::vec(-3.0f64..6.0, 72), bump in -5.0f64..5.0) {
        let g = small_lifted(seed);
        let mut s = MessageState::new(&g, &llr).unwrap();
        ms_cn_update(&mut s, &g, 0).unwrap();
        let before = s.cn_to_vn.clone();
        let e = g.row_edges(0).start;
        for k in 0..3 {
            s.vn_to_cn[e * 3 + k] += bump;
        }
        ms_cn_update(&mut s, &g, 0).unwrap();
        prop_assert_eq!(&s.cn_to_vn[e * 3..e * 3 + 3], &before[e * 3..e * 3 + 3]);
    }
}
