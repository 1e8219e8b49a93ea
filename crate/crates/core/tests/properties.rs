use proptest::prelude::*;
use rug::Float;

use tautodensity::logic::{self, Formula};
use tautodensity::{count, exact, numeric, quad};

const PREC: u32 = 256;

fn formula(m: u32) -> impl Strategy<Value = Formula> {
    let leaf = (0..m).prop_map(Formula::var);
    leaf.prop_recursive(6, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::neg),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::imp(a, b)),
        ]
    })
}

fn permutation(m: u32) -> impl Strategy<Value = Vec<u32>> {
    Just((0..m).collect::<Vec<u32>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn render_parse_roundtrip(f in formula(4)) {
        let text = logic::render_formula(&f);
        prop_assert_eq!(logic::parse_formula(&text, 4).unwrap(), f);
    }

    #[test]
    fn permuting_variables_permutes_the_mask((f, sigma) in (formula(3), permutation(3))) {
        let g = logic::permute_vars(&f, &sigma);
        prop_assert_eq!(g.falsity_mask(3), logic::permute_mask(f.falsity_mask(3), &sigma, 3));
        prop_assert_eq!(g.len(), f.len());
    }

    #[test]
    fn type_formula_is_idempotent(f in formula(3)) {
        let t = logic::type_of(&f);
        prop_assert!(logic::is_type_formula(&t));
        prop_assert_eq!(logic::type_of(&t), t.clone());
        prop_assert_eq!(logic::norm_stats(&t).norm, logic::norm_stats(&f).norm);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    /// γ-conversion scales ζ_s by (1−γ̂)/(1−γ); moving δ from g to f leaves it alone.
    #[test]
    fn conversions_preserve_zeta(m in 1u32..=4, gh in 0.0f64..0.9, d0 in -0.5f64..0.5, d1 in -0.5f64..0.5, s in 5usize..40) {
        let base = quad::BaseSpec::formulas(m, 40, PREC);
        let z = quad::zeta_s(&base, s).unwrap();
        let tol = Float::with_val(PREC, 1e-60);

        let g_hat = Float::with_val(PREC, gh);
        let conv = quad::gamma_convert(&base, &g_hat).unwrap();
        let c = (Float::with_val(PREC, 1u32) - &g_hat) / (Float::with_val(PREC, 1u32) - &base.gamma);
        let want = Float::with_val(PREC, &z * &c);
        prop_assert!((quad::zeta_s(&conv, s).unwrap() - want).abs() < tol);

        let delta = [Float::with_val(PREC, d0), Float::with_val(PREC, d1)];
        let moved = quad::delta_convert(&base, &delta);
        prop_assert!((quad::zeta_s(&moved, s).unwrap() - &z).abs() < tol);
        let g_moved = Float::with_val(PREC, &base.gamma + &delta[0]) + Float::with_val(PREC, &delta[1] * &base.r);
        prop_assert!((moved.gamma.clone() - g_moved).abs() < tol);
    }
}

/// The exact densities become closer to fixed points of the cut operator as s grows.
#[test]
fn cut_residual_of_densities_decreases() {
    for m in 1..=2 {
        let beta = exact::solve_alpha_beta(m, PREC).unwrap().all_densities();
        let table = count::class_coefficients(m, 200).unwrap();
        let sys = quad::build_falsity_system(m, &table, PREC).unwrap();
        let mut last: Option<Float> = None;
        for s in [25, 50, 100, 200] {
            let c = quad::apply_cut_operator(&sys, s, &beta).unwrap();
            let diff: Vec<Float> = c.iter().zip(&beta).map(|(a, b)| Float::with_val(PREC, a - b)).collect();
            let r = numeric::max_abs(&diff);
            if let Some(prev) = &last {
                assert!(r < *prev, "m={m} s={s}: {} not below {}", r.to_f64(), prev.to_f64());
            }
            last = Some(r);
        }
    }
}
