//! Cross-solver checks shared by `tautodensity verify` and the acceptance target.
//! Each check recomputes its quantities from scratch and compares against reference
//! numbers or against an independent method.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rug::{Float, Rational};
use serde_json::{json, Value};

use crate::asympt::{self, YSeries};
use crate::count::{self, CoeffTable};
use crate::exact;
use crate::logic::{self, Formula, Half, Strength};
use crate::numeric::{decimal_trunc, max_abs};
use crate::quad;
use crate::systems;

const PREC: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Clone, Debug)]
pub struct Item {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    /// A failing item whose reference value is a documented misprint.
    pub known_discrepancy: bool,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub id: u32,
    pub title: &'static str,
    pub items: Vec<Item>,
    pub elapsed: Duration,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }

    /// Failing only on documented discrepancies.
    pub fn only_known_failures(&self) -> bool {
        self.items.iter().all(|i| i.pass || i.known_discrepancy)
    }

    pub fn line(&self) -> String {
        let failed = self.items.iter().filter(|i| !i.pass).count();
        format!(
            "{} criterion {}: {} ({} items, {} failed, {:.2?})",
            if self.pass() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.items.len(),
            failed,
            self.elapsed
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "criterion": self.id,
            "title": self.title,
            "pass": self.pass(),
            "seconds": self.elapsed.as_secs_f64(),
            "items": self.items.iter().map(|i| json!({
                "name": i.name, "pass": i.pass, "detail": i.detail, "known_discrepancy": i.known_discrepancy,
            })).collect::<Vec<_>>(),
        })
    }
}

struct Builder {
    id: u32,
    title: &'static str,
    items: Vec<Item>,
    t0: Instant,
}

impl Builder {
    fn new(id: u32, title: &'static str) -> Builder {
        Builder { id, title, items: Vec::new(), t0: Instant::now() }
    }

    fn item(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.items.push(Item { name: name.into(), pass, detail: detail.into(), known_discrepancy: false });
    }

    fn err(&mut self, name: impl Into<String>, e: impl std::fmt::Display) {
        self.item(name, false, format!("error: {e}"));
    }

    fn finish(self) -> Check {
        Check { id: self.id, title: self.title, items: self.items, elapsed: self.t0.elapsed() }
    }
}

fn table(m: u32, n: usize, cache: Option<&Path>) -> Result<CoeffTable, count::CountError> {
    match cache {
        Some(dir) => count::class_coefficients_cached(m, n, Some(&count::cache_path(dir, m))),
        None => count::class_coefficients(m, n),
    }
}

fn close(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

/// Reference densities (tautology, antilogy) for m = 1..4.
pub const DENSITY_TABLE: [(u32, f64, f64, f64); 4] =
    [(1, 0.4232, 0.1632, 5e-5), (2, 0.33213, 0.09710, 5e-6), (3, 0.27003, 0.06625, 5e-6), (4, 0.22561, 0.04868, 5e-6)];

fn density_items(b: &mut Builder, ms: &[u32]) {
    for &(m, taut, anti, tol) in DENSITY_TABLE.iter().filter(|r| ms.contains(&r.0)) {
        let t0 = Instant::now();
        match exact::solve_alpha_beta(m, PREC) {
            Ok(tab) => {
                let dt = t0.elapsed();
                for (label, class, want) in [("taut", 0, taut), ("anti", logic::full_mask(m), anti)] {
                    let v = tab.density_of_class(class);
                    let x = v.to_f64();
                    let pass = close(x, want, tol);
                    // the one-variable reference digits are truncated, not rounded
                    let truncated = decimal_trunc(&v, 4);
                    let known = !pass && m == 1 && truncated == want.to_string();
                    b.items.push(Item {
                        name: format!("m={m} {label} density"),
                        pass,
                        detail: format!("{x:.9} vs {want} (tol {tol:e}); truncated to 4 digits {truncated}"),
                        known_discrepancy: known,
                    });
                }
                let limit = if m <= 3 { Duration::from_secs(1) } else { Duration::from_secs(1800) };
                b.item(format!("m={m} runtime"), dt <= limit, format!("{dt:.2?} (limit {limit:?})"));
            }
            Err(e) => b.err(format!("m={m}"), e),
        }
    }
}

/// Exact densities of m = 2, 3 (and 4 at the full level).
pub fn criterion_1(level: Level) -> Check {
    let mut b = Builder::new(1, "exact tautology/antilogy densities");
    let ms: &[u32] = if level == Level::Full { &[2, 3, 4] } else { &[2, 3] };
    density_items(&mut b, ms);
    if level == Level::Quick {
        b.item("m=4", true, "skipped at quick level");
    }
    b.finish()
}

pub fn criterion_2() -> Check {
    let mut b = Builder::new(2, "one-variable densities");
    density_items(&mut b, &[1]);
    b.finish()
}

/// (m, tautology row, antilogy row); each row is (ratio, cut) at s = 10, 50, 200.
pub const SCUT_TABLE: [(u32, [(f64, f64); 3], [(f64, f64); 3]); 3] = [
    (1, [(0.3102, 0.4243), (0.4142, 0.4233), (0.4210, 0.4233)], [(0.1868, 0.1642), (0.1612, 0.1634), (0.1628, 0.1633)]),
    (2, [(0.2374, 0.3345), (0.3206, 0.3323), (0.3293, 0.3322)], [(0.0996, 0.0982), (0.0947, 0.0972), (0.0965, 0.0971)]),
    (3, [(0.1913, 0.2732), (0.2581, 0.2703), (0.2670, 0.2701)], [(0.0637, 0.0673), (0.0641, 0.0663), (0.0657, 0.0663)]),
];

pub const SCUT_DEPTHS: [usize; 3] = [10, 50, 200];

/// Cut solution of the falsity system with the default configuration.
pub fn scut_solve(m: u32, s: usize, t: &CoeffTable, tol: &Float, max_it: usize) -> Result<quad::IterResult, quad::QuadError> {
    let sys = quad::build_falsity_system(m, t, PREC)?;
    let start = logic::var_mask(0, m).0 as usize;
    quad::shifted_iterate(&sys, &quad::default_config(&sys, s, start, tol.clone(), max_it))
}

pub fn criterion_3(cache: Option<&Path>) -> Check {
    let mut b = Builder::new(3, "s-cut comparison table");
    let tol = Float::with_val(PREC, 1e-30);
    for (m, taut, anti) in SCUT_TABLE {
        let t = match table(m, 200, cache) {
            Ok(t) => t,
            Err(e) => {
                b.err(format!("m={m} table"), e);
                continue;
            }
        };
        let full = logic::full_mask(m);
        for (si, &s) in SCUT_DEPTHS.iter().enumerate() {
            let res = scut_solve(m, s, &t, &tol, 1_000_000);
            for (label, class, (ratio, cut)) in [("taut", 0u64, taut[si]), ("anti", full, anti[si])] {
                match count::ratio_at(&t, class, s, PREC) {
                    Ok(r) => {
                        let r = r.to_f64();
                        b.item(format!("m={m} {label} s={s} ratio"), close(r, ratio, 5e-5), format!("{r:.6} vs {ratio}"));
                    }
                    Err(e) => b.err(format!("m={m} {label} s={s} ratio"), e),
                }
                match &res {
                    Ok(x) => {
                        let v = x.x[class as usize].to_f64();
                        b.item(
                            format!("m={m} {label} s={s} cut"),
                            x.converged && close(v, cut, 5e-5),
                            format!("{v:.6} vs {cut} ({} iterations)", x.iterations),
                        );
                    }
                    Err(e) => b.err(format!("m={m} {label} s={s} cut"), e),
                }
            }
        }
    }
    let dt = b.t0.elapsed();
    b.item("runtime", dt <= Duration::from_secs(300), format!("{dt:.2?}"));
    b.finish()
}

/// Histogram of falsity masks over every formula of each length, by brute enumeration.
pub fn enumeration_histogram(m: u32, n_max: usize) -> Vec<Vec<u64>> {
    let mut hist = vec![vec![0u64; n_max + 1]; logic::num_classes(m)];
    for n in 1..=n_max {
        for f in logic::enumerate_formulas(m, n) {
            hist[f.falsity_mask(m).0 as usize][n] += 1;
        }
    }
    hist
}

/// Compares a class table with an enumeration histogram; returns the first mismatch.
pub fn compare_with_histogram(t: &CoeffTable, hist: &[Vec<u64>]) -> Option<(usize, usize)> {
    for (c, row) in hist.iter().enumerate() {
        for (n, &v) in row.iter().enumerate() {
            if t.counts.get(c).and_then(|r| r.get(n)).map_or(true, |x| *x != v) {
                return Some((c, n));
            }
        }
    }
    None
}

pub fn criterion_4(cache: Option<&Path>) -> Check {
    let mut b = Builder::new(4, "class coefficients equal enumeration histograms");
    for m in 1..=2 {
        let hist = enumeration_histogram(m, 12);
        match table(m, 12, cache) {
            Ok(t) => match compare_with_histogram(&t, &hist) {
                None => b.item(format!("m={m} n<=12"), true, format!("{} classes agree", hist.len())),
                Some((c, n)) => b.item(format!("m={m} n<=12"), false, format!("class {c}, length {n} differs")),
            },
            Err(e) => b.err(format!("m={m}"), e),
        }
    }
    b.finish()
}

pub fn criterion_5(cache: Option<&Path>) -> Check {
    let mut b = Builder::new(5, "octic residual for one variable");
    match table(1, 30, cache).and_then(|t| count::verify_octic_m1(&t, 30)) {
        Ok(first) => b.item("orders 0..=30", first == 31, format!("first nonzero order {first}")),
        Err(e) => b.err("octic", e),
    }
    b.finish()
}

type Expected = &'static [(i32, i64, i64)];

fn series_matches(s: &YSeries, want: Expected, through: i32) -> bool {
    (-2..=through).all(|k| {
        let w = want.iter().find(|t| t.0 == k).map_or(Rational::new(), |t| Rational::from((t.1, t.2)));
        s.coeff(k).map_or(false, |c| c == w)
    })
}

fn expected_text(want: Expected) -> String {
    want.iter().map(|(k, n, d)| format!("{}/{}·y^{k}", n, d)).collect::<Vec<_>>().join(" ")
}

/// Ratio expansions, keyed by target; coefficients of `y^k` (`y = m^(-1/2)`) through `y^4`.
pub const RATIO_EXPECTED: [(&str, Expected); 9] = [
    ("s1", &[(2, 1, 1), (3, -7, 2), (4, 7, 1)]),
    ("sc", &[(2, 1, 4), (3, -3, 4), (4, 19, 16)]),
    ("strong-T", &[(2, 1, 1), (3, -7, 2), (4, 31, 4)]),
    ("weak-T", &[(2, 1, 1), (3, -5, 2), (4, 29, 8)]),
    ("weak-B", &[(2, 1, 4), (3, -3, 4), (4, 9, 8)]),
    ("combined-B", &[(2, 1, 4), (3, -1, 2), (4, 5, 16)]),
    ("combined-T", &[(2, 1, 1), (3, -7, 4), (4, 5, 4)]),
    ("combined-U", &[(0, 1, 1), (2, -1, 1), (3, 5, 4), (4, -1, 8)]),
    ("combined-A", &[(3, 1, 2), (4, -9, 8)]),
];

/// Reference ratio coefficients that the equation systems do not reproduce; see README.
pub const KNOWN_RATIO_MISPRINTS: [&str; 2] = ["weak-T", "weak-B"];

/// Values `X(s₀)` through `y^3`.
pub const VALUE_EXPECTED: [(&str, &str, Expected); 16] = [
    ("strong", "T", &[(1, 1, 2), (2, -5, 4), (3, 17, 8)]),
    ("strong", "A", &[(2, 1, 4), (3, -3, 4)]),
    ("strong", "U", &[(-1, 1, 1), (1, -1, 2), (2, 1, 1), (3, -11, 8)]),
    ("weak", "B", &[(1, 1, 4), (2, -1, 2), (3, 9, 16)]),
    ("weak", "T", &[(1, 1, 2), (2, -1, 1), (3, 5, 4)]),
    ("weak", "U", &[(-1, 1, 1), (1, -1, 2), (2, 3, 4), (3, -5, 8)]),
    ("weak", "A", &[(2, 1, 4), (3, -5, 8)]),
    ("combined", "B1", &[(1, 1, 4), (2, -1, 2), (3, 9, 16)]),
    ("combined", "B2", &[(-1, 1, 4), (0, -1, 4), (1, -3, 16), (2, 5, 8), (3, -47, 64)]),
    ("combined", "B3", &[(-1, 1, 4), (0, -1, 4), (1, -3, 16), (2, 9, 16), (3, -35, 64)]),
    ("combined", "B4", &[(0, 1, 8), (1, -3, 16), (2, 1, 16), (3, 3, 32)]),
    ("combined", "B5", &[(0, 1, 8), (1, -3, 16), (3, 9, 32)]),
    ("combined", "B", &[(1, 1, 4), (2, -3, 8), (3, 3, 16)]),
    ("combined", "T", &[(1, 1, 2), (2, -3, 4), (3, 1, 2)]),
    ("combined", "U", &[(-1, 1, 1), (1, -1, 2), (2, 1, 2)]),
    ("combined", "A", &[(2, 1, 4), (3, -1, 2)]),
];

pub fn criterion_6() -> Check {
    let mut b = Builder::new(6, "asymptotic expansions, exact rational equality");
    for (target, want) in RATIO_EXPECTED {
        match asympt::ratio_series(target, 4) {
            Ok(s) => {
                let pass = series_matches(&s, want, 4);
                b.items.push(Item {
                    name: format!("ratio {target}"),
                    pass,
                    detail: format!("computed {} ; reference {}", s.render_m(), expected_text(want)),
                    known_discrepancy: !pass && KNOWN_RATIO_MISPRINTS.contains(&target),
                });
            }
            Err(e) => b.err(format!("ratio {target}"), e),
        }
    }
    for sys in ["strong", "weak", "combined"] {
        let spec = systems::system_by_name(sys).unwrap();
        match asympt::system_values(&spec, 3) {
            Ok(vals) => {
                for (_, member, want) in VALUE_EXPECTED.iter().filter(|v| v.0 == sys) {
                    let s = &vals[*member];
                    b.item(format!("value {sys}-{member}"), series_matches(s, want, 3), s.render_m());
                }
            }
            Err(e) => b.err(format!("values {sys}"), e),
        }
    }
    match asympt::strong_simple_values(6) {
        Ok(_) => b.item("strong values by radicals", true, "radicals equal the order-by-order solution through y^6"),
        Err(e) => b.err("strong values by radicals", e),
    }
    match asympt::strong_t_ratio_by_quotient(4) {
        Ok(q) => b.item("strong-T by quotient", series_matches(&q, RATIO_EXPECTED[2].1, 4), q.render_m()),
        Err(e) => b.err("strong-T by quotient", e),
    }
    let dt = b.t0.elapsed();
    b.item("runtime", dt <= Duration::from_secs(10), format!("{dt:.2?}"));
    b.finish()
}

/// |φ| bounds and simple ⇒ tautology over every formula of length ≤ `n_max`.
pub fn norm_and_simple_suite(m: u32, n_max: usize) -> Result<usize, String> {
    let mut seen = 0;
    for n in 1..=n_max {
        for f in logic::enumerate_formulas(m, n) {
            seen += 1;
            let st = logic::norm_stats(&f);
            let alt = Half(1 - 2 * st.repeats as i64 - st.negations as i64);
            if st.norm != alt || st.norm > Half(1) {
                return Err(format!("{f}: norm {} vs {}", st.norm, alt));
            }
            if f.is_tautology(m) && st.norm > Half(-1) {
                return Err(format!("tautology {f} has |φ| = {}", st.norm));
            }
            if f.is_antilogy(m) && st.norm > Half(-2) {
                return Err(format!("antilogy {f} has |φ| = {}", st.norm));
            }
            if logic::is_simple(&f) && !f.is_tautology(m) {
                return Err(format!("simple {f} is not a tautology"));
            }
        }
    }
    Ok(seen)
}

/// strong T ⇒ weak T ⇒ tautology and weak A ⇒ antilogy, for both basis families.
pub fn category_soundness(m: u32, n_max: usize) -> Result<usize, String> {
    let mut seen = 0;
    let families: [(&str, fn(&Formula) -> bool); 2] = [("S1", logic::is_simple_first), ("S1uS2", logic::is_simple)];
    for (name, fam) in families {
        let mut strong = logic::CategoryClassifier::new(fam, Strength::Strong);
        let mut weak = logic::CategoryClassifier::new(fam, Strength::Weak);
        for n in 1..=n_max {
            for f in logic::enumerate_formulas(m, n) {
                seen += 1;
                let (s, w) = (strong.classify(&f), weak.classify(&f));
                if s == logic::Cat::T && w != logic::Cat::T {
                    return Err(format!("{name}: {f} strong T but weak {w:?}"));
                }
                if s == logic::Cat::A && w != logic::Cat::A {
                    return Err(format!("{name}: {f} strong A but weak {w:?}"));
                }
                if w == logic::Cat::T && !f.is_tautology(m) {
                    return Err(format!("{name}: weak tautology {f} is not a tautology"));
                }
                if w == logic::Cat::A && !f.is_antilogy(m) {
                    return Err(format!("{name}: weak antilogy {f} is not an antilogy"));
                }
            }
        }
    }
    Ok(seen)
}

fn random_simplex(rng: &mut StdRng, n: usize) -> Vec<Float> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let sum: f64 = raw.iter().sum();
    let mut x: Vec<Float> = raw.iter().map(|v| Float::with_val(PREC, *v) / sum).collect();
    // land exactly on Σx = 1 at working precision
    let total = Float::with_val(PREC, Float::sum(x.iter()));
    x[0] += Float::with_val(PREC, 1u32) - total;
    x
}

/// Σ C_s(x) = 1 and C_s(x) ≥ 0 for random x ∈ H; returns the worst deviation.
pub fn hyperplane_suite(sys: &quad::QuadSystem, s: usize, points: usize, seed: u64) -> Result<f64, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let x = random_simplex(&mut rng, sys.len());
        let c = quad::apply_cut_operator(sys, s, &x).map_err(|e| e.to_string())?;
        if c.iter().any(|v| *v < 0) {
            return Err("negative coordinate".into());
        }
        let dev = (Float::with_val(PREC, Float::sum(c.iter())) - 1u32).abs().to_f64();
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Dense Jacobian vs central differences of the cut operator, and column sums vs the
/// closed-form 1-norm; returns the worst relative error.
pub fn jacobian_suite(sys: &quad::QuadSystem, s: usize, points: usize, seed: u64) -> Result<f64, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = sys.len();
    let h = Float::with_val(PREC, 1e-20);
    let mut worst = 0.0f64;
    for p in 0..points {
        let x: Vec<Float> = if p % 2 == 0 {
            random_simplex(&mut rng, n)
        } else {
            (0..n).map(|_| Float::with_val(PREC, rng.gen::<f64>())).collect()
        };
        let j = quad::jacobian(sys, s, &x).map_err(|e| e.to_string())?;
        let scale = max_abs(&j.iter().flatten().cloned().collect::<Vec<_>>()).to_f64().max(1e-300);
        for col in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[col] += &h;
            xm[col] -= &h;
            let cp = quad::apply_cut_operator(sys, s, &xp).map_err(|e| e.to_string())?;
            let cm = quad::apply_cut_operator(sys, s, &xm).map_err(|e| e.to_string())?;
            for row in 0..n {
                let fd = Float::with_val(PREC, &cp[row] - &cm[row]) / Float::with_val(PREC, &h * 2u32);
                let err = (fd - &j[row][col]).abs().to_f64() / scale;
                worst = worst.max(err);
            }
        }
        let closed = quad::jacobian_one_norm(sys, s, &x).map_err(|e| e.to_string())?;
        for col in 0..n {
            let colsum = Float::with_val(PREC, Float::sum(j.iter().map(|r| &r[col])));
            let err = (colsum - &closed).abs().to_f64() / closed.to_f64().abs().max(1e-300);
            worst = worst.max(err);
        }
        let norm = quad::one_norm(&j);
        worst = worst.max((norm - &closed).abs().to_f64() / closed.to_f64().abs().max(1e-300));
    }
    Ok(worst)
}

pub fn criterion_7(level: Level, cache: Option<&Path>) -> Check {
    let mut b = Builder::new(7, "property suites");
    let norm_depth = |m: u32| if level == Level::Full || m < 3 { 11 } else { 9 };
    for m in 1..=3 {
        let n = norm_depth(m);
        match norm_and_simple_suite(m, n) {
            Ok(c) => b.item(format!("|φ| bounds and simple ⇒ tautology, m={m}, ℓ≤{n}"), true, format!("{c} formulae")),
            Err(e) => b.item(format!("|φ| bounds and simple ⇒ tautology, m={m}, ℓ≤{n}"), false, e),
        }
    }
    let cat_depth = if level == Level::Full { 12 } else { 10 };
    for m in 1..=2 {
        match category_soundness(m, cat_depth) {
            Ok(c) => b.item(format!("category soundness m={m}, n≤{cat_depth}"), true, format!("{c} labels")),
            Err(e) => b.item(format!("category soundness m={m}, n≤{cat_depth}"), false, e),
        }
    }
    for name in ["strong", "weak", "combined"] {
        let r = systems::validate_partition(&systems::system_by_name(name).unwrap());
        b.item(format!("natural partition {name}"), r.ok(), format!("{r:?}"));
    }
    for m in 1..=3 {
        match table(m, 50, cache).map_err(|e| e.to_string()).and_then(|t| {
            quad::build_falsity_system(m, &t, PREC).map_err(|e| e.to_string()).map(|sys| (t, sys))
        }) {
            Ok((_, sys)) => {
                b.item(format!("natural partition falsity m={m}"), quad::validate_natural_partition(&sys).is_ok(), "");
                if m == 2 {
                    match hyperplane_suite(&sys, 50, 100, 7) {
                        Ok(w) => b.item("C_s maps H into H (100 points)", w < 1e-60, format!("max |Σc−1| = {w:e}")),
                        Err(e) => b.item("C_s maps H into H (100 points)", false, e),
                    }
                    match jacobian_suite(&sys, 50, 20, 11) {
                        Ok(w) => b.item("Jacobian vs finite differences (20 points)", w < 1e-6, format!("max rel err {w:e}")),
                        Err(e) => b.item("Jacobian vs finite differences (20 points)", false, e),
                    }
                }
            }
            Err(e) => b.err(format!("falsity system m={m}"), e),
        }
    }
    b.finish()
}

pub fn criterion_8(level: Level, cache: Option<&Path>) -> Check {
    let mut b = Builder::new(8, "cross-method agreement");
    for m in 1..=3 {
        let res = (|| -> Result<f64, String> {
            let ex = exact::solve_alpha_beta(m, PREC).map_err(|e| e.to_string())?;
            let t = table(m, 2, cache).map_err(|e| e.to_string())?;
            let sys = quad::build_falsity_system(m, &t, PREC).map_err(|e| e.to_string())?;
            let beta = quad::ratio_linear_solve(&sys, &ex.values_at_s0(), quad::Normalization::SumOne)
                .map_err(|e| e.to_string())?;
            let d = ex.all_densities();
            Ok(beta.iter().zip(&d).map(|(a, b)| Float::with_val(PREC, a - b).abs().to_f64()).fold(0.0, f64::max))
        })();
        match res {
            Ok(diff) => b.item(format!("linear ratio solve vs exact, m={m}"), diff < 1e-20, format!("max diff {diff:e}")),
            Err(e) => b.err(format!("linear ratio solve vs exact, m={m}"), e),
        }
    }
    let ms: &[u32] = if level == Level::Full { &[1, 2, 3] } else { &[1, 2] };
    for &m in ms {
        let res = (|| -> Result<f64, String> {
            let ex = exact::solve_alpha_beta(m, PREC).map_err(|e| e.to_string())?;
            let t = table(m, 2000, cache).map_err(|e| e.to_string())?;
            let mut worst = 0.0f64;
            for c in 0..logic::num_classes(m) {
                let r = count::ratio_at(&t, c as u64, 2000, PREC).map_err(|e| e.to_string())?;
                worst = worst.max((r - ex.density_of_class(c as u64)).abs().to_f64());
            }
            Ok(worst)
        })();
        match res {
            Ok(diff) => b.item(format!("ratios at n=2000 vs exact, m={m}"), diff <= 2e-3, format!("max diff {diff:e}")),
            Err(e) => b.err(format!("ratios at n=2000 vs exact, m={m}"), e),
        }
    }
    if level == Level::Quick {
        b.item("ratios at n=2000, m=3", true, "skipped at quick level");
    }
    b.finish()
}

pub fn criterion_9(level: Level) -> Check {
    let mut b = Builder::new(9, "two-sided bound sandwich");
    let bounds = match asympt::bounds_report(4) {
        Ok(r) => r,
        Err(e) => {
            b.err("bounds", e);
            return b.finish();
        }
    };
    let ms: &[u32] = if level == Level::Full { &[2, 3, 4] } else { &[2, 3] };
    for &m in ms {
        match exact::solve_alpha_beta(m, PREC) {
            Ok(ex) => {
                let d = ex.density_of_class(0);
                let (lo, up) = bounds.at(m, PREC);
                b.item(
                    format!("m={m}"),
                    lo <= d && d <= up,
                    format!("{:.6} ≤ {:.6} ≤ {:.6}", lo.to_f64(), d.to_f64(), up.to_f64()),
                );
            }
            Err(e) => b.err(format!("m={m}"), e),
        }
    }
    b.finish()
}

pub fn run_all(level: Level, cache: Option<&Path>) -> Vec<Check> {
    vec![
        criterion_1(level),
        criterion_2(),
        criterion_3(cache),
        criterion_4(cache),
        criterion_5(cache),
        criterion_6(),
        criterion_7(level, cache),
        criterion_8(level, cache),
        criterion_9(level),
    ]
}
