use rug::Float;

use tautodensity::{asympt, count, exact, quad, systems, verify};

const PREC: u32 = 256;

#[test]
fn series_match_fixed_m_solves_at_large_m() {
    let m = 1_000_000u32;
    let mf = Float::with_val(PREC, m);
    for spec in [systems::strong_system(), systems::weak_system(), systems::combined_system()] {
        let numeric = quad::category_ratios(m, &spec, PREC).unwrap();
        let series = asympt::system_ratios(&spec, 10).unwrap();
        for (name, s) in &series {
            let diff = (s.eval_at_m(&mf) - &numeric[name]).abs().to_f64();
            // first omitted term is of size m^(-11/2) = 1e-33
            assert!(diff < 1e-20, "{} {name}: {diff:e}", spec.name);
        }
    }
}

#[test]
fn combined_tautologies_stay_below_the_density() {
    let m = 2;
    let sys = quad::build_category_system(m, &systems::combined_system(), 400, PREC).unwrap();
    let cfg = quad::category_config(&sys, 400, Float::with_val(PREC, 1e-40), 1_000_000).unwrap();
    let res = quad::shifted_iterate(&sys, &cfg).unwrap();
    assert!(res.converged);
    let t = res.x[sys.index("T").unwrap()].to_f64();
    let taut = exact::solve_alpha_beta(m, PREC).unwrap().density_of_class(0).to_f64();
    assert!(t > 0.13 && t < taut, "T = {t}, tautologies {taut}");
}

#[test]
fn linear_solve_recovers_exact_densities() {
    for m in 1..=3 {
        let tab = exact::solve_alpha_beta(m, PREC).unwrap();
        let table = count::class_coefficients(m, 1).unwrap();
        let sys = quad::build_falsity_system(m, &table, PREC).unwrap();
        let beta = quad::ratio_linear_solve(&sys, &tab.values_at_s0(), quad::Normalization::SumOne).unwrap();
        for (a, b) in beta.iter().zip(tab.all_densities()) {
            assert!((Float::with_val(PREC, a - &b)).abs().to_f64() < 1e-40, "m={m}");
        }
    }
}

#[test]
fn cut_table_reproduced_at_depth_200() {
    let table = count::class_coefficients(2, 200).unwrap();
    let res = verify::scut_solve(2, 200, &table, &Float::with_val(PREC, 1e-30), 1_000_000).unwrap();
    assert!(res.converged);
    assert!((res.x[0].to_f64() - 0.3322).abs() < 5e-5);
    assert!((res.x[15].to_f64() - 0.0971).abs() < 5e-5);
    assert!((count::ratio_at(&table, 0, 200, PREC).unwrap().to_f64() - 0.3293).abs() < 5e-5);
}
