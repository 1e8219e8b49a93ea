//! Exact coefficient recursions: all formulae, every falsity class, and the
//! category systems.
//!
//! Per-class counting works in transform space. For a set `S` of assignments let
//! `U_n[S]` be the number of length-`n` formulae whose falsity set contains `S`
//! and `L_n[S]` the number whose falsity set lies inside `S`. The class recursion
//! becomes, independently for every `S`,
//!
//! ```text
//! U_n[S] = [n=1]·#{i : F_{x_i} ⊇ S} + L_{n-1}[Sᶜ] + Σ_{i+j=n-1} L_i[Sᶜ]·U_j[S]
//! ```
//!
//! because `F_ψ ∖ F_φ ⊇ S` iff `F_ψ ⊇ S` and `F_φ ⊆ Sᶜ`. Each step inverts `U` to
//! the class counts and re-sums them into `L`. The convolution is evaluated online
//! with divide-and-conquer blocks multiplied by Kronecker substitution, and only one
//! `S` per orbit of the variable permutations is tracked.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rug::integer::Order;
use rug::ops::Pow;
use rug::{Float, Integer};
use thiserror::Error;

use crate::logic::{self, full_mask, num_classes, var_mask, Formula, Strength};
use crate::systems::{self, SystemSpec};

#[derive(Debug, Error)]
pub enum CountError {
    #[error("refused: {0}")]
    Resource(String),
    #[error("no formulae of length {0}")]
    ZeroDenominator(usize),
    #[error("length {n} beyond table depth {n_max}")]
    OutOfRange { n: usize, n_max: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("cache: {0}")]
    CacheFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Largest variable count accepted by [`class_coefficients`].
pub const MAX_CLASS_VARS: u32 = 3;

/// `[zⁿ]W` for `n = 0..=n_max` (index 0 is 0).
pub fn w_coefficients(m: u32, n_max: usize) -> Vec<Integer> {
    let mut w = vec![Integer::new(); n_max + 1];
    for n in 1..=n_max {
        let mut v = Integer::from(&w[n - 1]);
        if n == 1 {
            v += m;
        }
        for i in 1..n.saturating_sub(1) {
            v += &w[i] * Integer::from(&w[n - 1 - i]);
        }
        w[n] = v;
    }
    w
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTable {
    pub m: u32,
    pub n_max: usize,
    /// `counts[class][n]`, `n = 0..=n_max`.
    pub counts: Vec<Vec<Integer>>,
}

impl CoeffTable {
    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn row(&self, class: u64) -> &[Integer] {
        &self.counts[class as usize]
    }

    pub fn tautologies(&self) -> &[Integer] {
        &self.counts[0]
    }

    pub fn antilogies(&self) -> &[Integer] {
        self.counts.last().unwrap()
    }

    pub fn totals(&self) -> Vec<Integer> {
        let mut out = vec![Integer::new(); self.n_max + 1];
        for row in &self.counts {
            for (o, c) in out.iter_mut().zip(row) {
                *o += c;
            }
        }
        out
    }

    /// Cuts the table down to a smaller depth.
    pub fn truncated(&self, n_max: usize) -> CoeffTable {
        assert!(n_max <= self.n_max);
        CoeffTable { m: self.m, n_max, counts: self.counts.iter().map(|r| r[..=n_max].to_vec()).collect() }
    }
}

/// Orbit representatives of assignment sets under variable permutations.
struct Orbits {
    reps: Vec<u64>,
    /// For every set, the index of its representative in `reps`.
    rep_of: Vec<usize>,
}

fn permutations(m: u32) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, left: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            prefix.push(v);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..m).collect(), &mut out);
    out
}

fn orbits(m: u32) -> Orbits {
    let k = num_classes(m);
    let perms = permutations(m);
    let mut rep_of = vec![usize::MAX; k];
    let mut reps = Vec::new();
    for s in 0..k as u64 {
        if rep_of[s as usize] != usize::MAX {
            continue;
        }
        let idx = reps.len();
        reps.push(s);
        for p in &perms {
            let img = logic::permute_mask(logic::FalsityMask(s), p, m).0;
            rep_of[img as usize] = idx;
        }
    }
    Orbits { reps, rep_of }
}

const SCHOOLBOOK: usize = 24;

/// Adds `Σ f[i]·g[j]` into `h[off + i + j]` for targets in `[lo, hi)`. Coefficients are
/// nonnegative, so larger blocks are packed into single integers and multiplied once.
fn mul_add(f: &[Integer], g: &[Integer], off: usize, h: &mut [Integer], lo: usize, hi: usize) {
    if f.is_empty() || g.is_empty() || lo >= hi {
        return;
    }
    if f.len().min(g.len()) <= SCHOOLBOOK {
        for (i, a) in f.iter().enumerate() {
            let base = off + i;
            if base >= hi {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for j in lo.saturating_sub(base)..(hi - base).min(g.len()) {
                if !g[j].is_zero() {
                    h[off + i + j] += a * Integer::from(&g[j]);
                }
            }
        }
        return;
    }
    let bits = |v: &[Integer]| v.iter().map(|x| x.significant_bits()).max().unwrap_or(0);
    let need = bits(f) + bits(g) + usize::BITS - f.len().min(g.len()).leading_zeros() + 1;
    let slot = need.div_ceil(64) as usize;
    let pack = |v: &[Integer]| {
        let mut limbs = vec![0u64; v.len() * slot];
        for (i, x) in v.iter().enumerate() {
            x.write_digits(&mut limbs[i * slot..(i + 1) * slot], Order::Lsf);
        }
        Integer::from_digits(&limbs, Order::Lsf)
    };
    let prod = pack(f) * pack(g);
    let limbs = prod.to_digits::<u64>(Order::Lsf);
    for t in 0..f.len() + g.len() - 1 {
        let tgt = off + t;
        if tgt < lo {
            continue;
        }
        if tgt >= hi {
            break;
        }
        let start = t * slot;
        if start >= limbs.len() {
            break;
        }
        let end = ((t + 1) * slot).min(limbs.len());
        h[tgt] += Integer::from_digits(&limbs[start..end], Order::Lsf);
    }
}

struct ClassSolver {
    m: u32,
    n_max: usize,
    orb: Orbits,
    full: u64,
    /// `[n=1]` term per representative.
    unit: Vec<u32>,
    /// Per representative: f[n] = L_n[Sᶜ], g[n] = U_n[S], acc[n] = Σ_{i+j=n} f_i g_j.
    f: Vec<Vec<Integer>>,
    g: Vec<Vec<Integer>>,
    acc: Vec<Vec<Integer>>,
    counts: Vec<Vec<Integer>>,
}

impl ClassSolver {
    fn new(m: u32, n_max: usize) -> Self {
        let k = num_classes(m);
        let orb = orbits(m);
        let r = orb.reps.len();
        let vms: Vec<u64> = (0..m).map(|i| var_mask(i, m).0).collect();
        let unit = orb.reps.iter().map(|&s| vms.iter().filter(|&&v| v & s == s).count() as u32).collect();
        let zeros = || vec![vec![Integer::new(); n_max + 1]; r];
        ClassSolver {
            m,
            n_max,
            full: full_mask(m),
            unit,
            f: zeros(),
            g: zeros(),
            acc: zeros(),
            counts: vec![vec![Integer::new(); n_max + 1]; k],
            orb,
        }
    }

    fn run(mut self) -> CoeffTable {
        let size = (self.n_max + 1).next_power_of_two();
        self.solve(0, size);
        CoeffTable { m: self.m, n_max: self.n_max, counts: self.counts }
    }

    fn solve(&mut self, l: usize, r: usize) {
        if l > self.n_max {
            return;
        }
        if r - l == 1 {
            self.leaf(l);
            return;
        }
        let mid = (l + r) / 2;
        self.solve(l, mid);
        let hi = r.min(self.n_max + 1);
        if mid < hi {
            for s in 0..self.orb.reps.len() {
                let (f, g, acc) = (&self.f[s], &self.g[s], &mut self.acc[s]);
                if l == 0 {
                    mul_add(&f[..mid], &g[..mid], 0, acc, mid, hi);
                } else {
                    let w = (r - l).min(self.n_max + 1);
                    mul_add(&f[l..mid], &g[..w], l, acc, mid, hi);
                    mul_add(&g[l..mid], &f[..w], l, acc, mid, hi);
                }
            }
        }
        self.solve(mid, r);
    }

    fn leaf(&mut self, n: usize) {
        if n == 0 {
            return;
        }
        let k = num_classes(self.m);
        let reps = self.orb.reps.len();
        let mut u_rep = Vec::with_capacity(reps);
        for s in 0..reps {
            let mut v = Integer::from(&self.f[s][n - 1]);
            v += &self.acc[s][n - 1];
            if n == 1 {
                v += self.unit[s];
            }
            u_rep.push(v);
        }
        // superset sums → class counts
        let mut cls: Vec<Integer> = (0..k).map(|t| u_rep[self.orb.rep_of[t]].clone()).collect();
        let mut bit = 1usize;
        while bit < k {
            for t in 0..k {
                if t & bit == 0 {
                    let hi = cls[t | bit].clone();
                    cls[t] -= hi;
                }
            }
            bit <<= 1;
        }
        for (t, c) in cls.iter().enumerate() {
            self.counts[t][n] = c.clone();
        }
        // subset sums
        let mut bit = 1usize;
        while bit < k {
            for t in 0..k {
                if t & bit != 0 {
                    let lo = cls[t ^ bit].clone();
                    cls[t] += lo;
                }
            }
            bit <<= 1;
        }
        for (s, u) in u_rep.into_iter().enumerate() {
            let comp = (!self.orb.reps[s] & self.full) as usize;
            self.f[s][n] = cls[comp].clone();
            self.g[s][n] = u;
        }
    }
}

/// Exact per-class counts of formulae of each length up to `n_max`.
pub fn class_coefficients(m: u32, n_max: usize) -> Result<CoeffTable, CountError> {
    if m == 0 {
        return Err(CountError::Unsupported("at least one variable is required".into()));
    }
    if m > MAX_CLASS_VARS {
        return Err(CountError::Resource(format!(
            "class table for m = {m} has {} classes; use the exact-density solver instead",
            if m >= 6 { "2^64".to_string() } else { (1u64 << (1u32 << m)).to_string() }
        )));
    }
    Ok(ClassSolver::new(m, n_max).run())
}

/// Direct pairwise recursion: premise class C, conclusion class D, target `D & !C`.
/// Quadratic in the number of classes; kept as a reference.
pub fn class_coefficients_pairwise(m: u32, n_max: usize) -> Result<CoeffTable, CountError> {
    if m == 0 || m > MAX_CLASS_VARS {
        return Err(CountError::Resource(format!("pairwise class recursion limited to 1 ≤ m ≤ {MAX_CLASS_VARS}")));
    }
    let k = num_classes(m);
    let full = full_mask(m) as usize;
    // rows by length first, transposed at the end
    let mut by_n = vec![vec![Integer::new(); k]; n_max + 1];
    for n in 1..=n_max {
        let mut row = vec![Integer::new(); k];
        if n == 1 {
            for i in 0..m {
                row[var_mask(i, m).0 as usize] += 1;
            }
        } else {
            for a in 0..k {
                row[full & !a] += &by_n[n - 1][a];
            }
            for i in 1..n - 1 {
                let j = n - 1 - i;
                for c in 0..k {
                    if by_n[i][c].is_zero() {
                        continue;
                    }
                    for d in 0..k {
                        if !by_n[j][d].is_zero() {
                            row[d & !c] += &by_n[i][c] * Integer::from(&by_n[j][d]);
                        }
                    }
                }
            }
        }
        by_n[n] = row;
    }
    let counts = (0..k).map(|a| (0..=n_max).map(|n| by_n[n][a].clone()).collect()).collect();
    Ok(CoeffTable { m, n_max, counts })
}

pub fn ratio_at(table: &CoeffTable, class: u64, n: usize, prec: u32) -> Result<Float, CountError> {
    if n > table.n_max {
        return Err(CountError::OutOfRange { n, n_max: table.n_max });
    }
    let total: Integer = table.counts.iter().map(|r| &r[n]).sum();
    if total.is_zero() {
        return Err(CountError::ZeroDenominator(n));
    }
    Ok(Float::with_val(prec, &table.counts[class as usize][n]) / Float::with_val(prec, &total))
}

/// `Σ_{n≤s} c_n rⁿ` at the precision of `r`.
pub fn truncated_eval(coeffs: &[Integer], r: &Float, s: usize) -> Float {
    let prec = r.prec();
    let mut acc = Float::with_val(prec, 0u32);
    for c in coeffs[..=s.min(coeffs.len() - 1)].iter().rev() {
        acc *= r;
        acc += c;
    }
    acc
}

pub fn w_asymptotic_estimate(m: u32, n: usize, prec: u32) -> Float {
    let sq = Float::with_val(prec, m).sqrt();
    let num = Float::with_val(prec, 2 * m) + &sq;
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let nn = Float::with_val(prec, n as f64);
    let den = pi * 4u32 * nn.clone() * &nn * &nn;
    let base = sq * 2u32 + 1u32;
    (num / den).sqrt() * base.pow(n as u32)
}

// ---------------------------------------------------------------------------
// Category counts

/// Basis families with an equation system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisFamily {
    /// simple tautologies of the first kind
    S1,
    /// first and second kind together
    S12,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CategoryCounts {
    pub t: Vec<Integer>,
    pub u: Vec<Integer>,
    pub a: Vec<Integer>,
    pub basis: Vec<Integer>,
}

pub fn category_spec(basis: BasisFamily, strength: Strength) -> Result<SystemSpec, CountError> {
    match (basis, strength) {
        (BasisFamily::S1, Strength::Strong) => Ok(systems::strong_system()),
        (BasisFamily::S1, Strength::Weak) => Ok(systems::weak_system()),
        (BasisFamily::S12, Strength::Weak) => Ok(systems::combined_system()),
        (BasisFamily::S12, Strength::Strong) => {
            Err(CountError::Unsupported("no equation system for strong (S1 ∪ S2)-categories".into()))
        }
    }
}

/// Exact coefficients of every member of a category system (W included under "W").
pub fn system_coefficients(spec: &SystemSpec, m: u32, n_max: usize) -> BTreeMap<&'static str, Vec<Integer>> {
    system_coefficients_with(spec, m, n_max, &BTreeMap::new())
}

/// Like [`system_coefficients`], but members named in `fixed` take the supplied
/// coefficients instead of their own equation.
pub fn system_coefficients_with(
    spec: &SystemSpec,
    m: u32,
    n_max: usize,
    fixed: &BTreeMap<&str, Vec<Integer>>,
) -> BTreeMap<&'static str, Vec<Integer>> {
    let w = w_coefficients(m, n_max);
    let names = spec.names();
    let mut x: Vec<Vec<Integer>> = vec![vec![Integer::new(); n_max + 1]; names.len()];
    let order = spec.eval_order();
    let polys: Vec<_> = spec
        .equations
        .iter()
        .map(|e| {
            let f = systems::z_poly_at(&e.f, m);
            let g: Vec<_> = e.g.iter().map(|(j, p)| (*j, systems::z_poly_at(p, m))).collect();
            let h: Vec<_> = e.h.iter().map(|(j, k, p)| (*j, *k, systems::z_poly_at(p, m))).collect();
            (f, g, h)
        })
        .collect();
    let get = |x: &Vec<Vec<Integer>>, name: &str, n: usize| -> Integer {
        if name == systems::W {
            w[n].clone()
        } else {
            x[spec.index(name).unwrap()][n].clone()
        }
    };
    for n in 1..=n_max {
        for &i in &order {
            if let Some(v) = fixed.get(spec.equations[i].name) {
                x[i][n] = v[n].clone();
                continue;
            }
            let (f, g, h) = &polys[i];
            let mut v = Integer::from(*f.get(n).unwrap_or(&0));
            for (j, p) in g {
                for (b, &c) in p.iter().enumerate() {
                    if c != 0 && b <= n {
                        v += get(&x, j, n - b) * c;
                    }
                }
            }
            for (j, k, p) in h {
                for (b, &c) in p.iter().enumerate() {
                    if c == 0 || n < b + 1 {
                        continue;
                    }
                    let tot = n - 1 - b;
                    let mut s = Integer::new();
                    for q in 1..tot {
                        s += get(&x, j, q) * get(&x, k, tot - q);
                    }
                    v += s * c;
                }
            }
            x[i][n] = v;
        }
    }
    let mut out: BTreeMap<&'static str, Vec<Integer>> = names.into_iter().zip(x).collect();
    out.insert(systems::W, w);
    out
}

pub fn category_coefficients(
    m: u32,
    n_max: usize,
    basis: BasisFamily,
    strength: Strength,
) -> Result<CategoryCounts, CountError> {
    let spec = category_spec(basis, strength)?;
    let mut c = system_coefficients(&spec, m, n_max);
    Ok(CategoryCounts {
        t: c.remove("T").unwrap(),
        u: c.remove("U").unwrap(),
        a: c.remove("A").unwrap(),
        basis: c.remove(spec.basis).unwrap(),
    })
}

/// Brute-force category statistics over every formula up to a length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedCategories {
    /// Labels from the family itself; `basis` counts the generically basic members.
    pub counts: CategoryCounts,
    /// Members of the closed-form structural description of the basis.
    pub structural: Vec<Integer>,
    /// Largest 2|φ| among structural members that are not basic (`None` if there are none).
    pub excess_max_norm2: Option<i64>,
    /// Basic formulae the structural description misses.
    pub missing: Vec<Integer>,
}

/// Per-formula classification of all formulae; the check for [`category_coefficients`].
pub fn category_counts_by_enumeration(m: u32, n_max: usize, basis: BasisFamily, strength: Strength) -> EnumeratedCategories {
    let in_family: fn(&Formula) -> bool = match basis {
        BasisFamily::S1 => logic::is_simple_first,
        BasisFamily::S12 => logic::is_simple,
    };
    let zeros = || vec![Integer::new(); n_max + 1];
    let mut counts = CategoryCounts { t: zeros(), u: zeros(), a: zeros(), basis: zeros() };
    let mut structural = zeros();
    let mut missing = zeros();
    let mut excess_max_norm2 = None;
    let levels = logic::formulas_up_to(m, n_max);
    let cls = std::cell::RefCell::new(logic::CategoryClassifier::new(in_family, strength));
    let anti = |g: &Formula| cls.borrow_mut().classify(g) == logic::Cat::A;
    for (n, level) in levels.iter().enumerate() {
        for f in level {
            match cls.borrow_mut().classify(f) {
                logic::Cat::T => counts.t[n] += 1,
                logic::Cat::U => counts.u[n] += 1,
                logic::Cat::A => counts.a[n] += 1,
            }
            let basic = cls.borrow_mut().is_basic(f);
            let shaped = match (basis, strength) {
                (BasisFamily::S1, Strength::Strong) => logic::is_simple_strict(f),
                (BasisFamily::S1, Strength::Weak) => logic::is_weak_s1_basic(f, anti),
                (BasisFamily::S12, _) => logic::is_weak_s12_basic(f, anti),
            };
            if basic {
                counts.basis[n] += 1;
            }
            if shaped {
                structural[n] += 1;
            }
            if basic && !shaped {
                missing[n] += 1;
            }
            if shaped && !basic {
                let v = logic::norm_stats(f).norm.0;
                excess_max_norm2 = Some(excess_max_norm2.map_or(v, |x: i64| x.max(v)));
            }
        }
    }
    EnumeratedCategories { counts, structural, excess_max_norm2, missing }
}

// ---------------------------------------------------------------------------
// Octic check for one variable

// Coefficient of I^k as (P_k, Q_k): P_k(z) + Q_k(z)·(1 − z)·W(z), index = power of z.
const OCTIC: [(&[i64], &[i64]); 9] = [
    (&[0, -1, -2], &[1, 2, 1]),
    (&[-2, -4, 6, 12], &[0, -6, -8, -2]),
    (&[0, 13, 18, -19, -22, 4], &[0, 0, 15, 12, 1]),
    (&[0, 0, -36, -32, 32, 16, -4], &[0, 0, 0, -20, -8]),
    (&[0, 0, 0, 55, 28, -28, -4, 1], &[0, 0, 0, 0, 15, 2]),
    (&[0, 0, 0, 0, -50, -12, 12], &[0, 0, 0, 0, 0, -6]),
    (&[0, 0, 0, 0, 0, 27, 2, -2], &[0, 0, 0, 0, 0, 0, 1]),
    (&[0, 0, 0, 0, 0, 0, -8], &[]),
    (&[0, 0, 0, 0, 0, 0, 0, 1], &[]),
];

fn trunc_mul(a: &[Integer], b: &[Integer], len: usize) -> Vec<Integer> {
    let mut out = vec![Integer::new(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * Integer::from(y);
        }
    }
    out
}

fn small_poly(p: &[i64], len: usize) -> Vec<Integer> {
    let mut v = vec![Integer::new(); len];
    for (i, &c) in p.iter().enumerate().take(len) {
        v[i] = Integer::from(c);
    }
    v
}

/// Residual series (orders `0..=s`) of the octic satisfied by the one-variable
/// tautology series `taut` together with `w`.
pub fn octic_residual(taut: &[Integer], w: &[Integer], s: usize) -> Vec<Integer> {
    let len = s + 1;
    let pad = |v: &[Integer]| {
        let mut v = v[..len.min(v.len())].to_vec();
        v.resize(len, Integer::new());
        v
    };
    let i1 = pad(taut);
    let w = pad(w);
    let one_minus_z = small_poly(&[1, -1], len);
    let w1 = trunc_mul(&one_minus_z, &w, len);
    let mut pow = small_poly(&[1], len);
    let mut res = vec![Integer::new(); len];
    for (k, (p, q)) in OCTIC.iter().enumerate() {
        if k > 0 {
            pow = trunc_mul(&pow, &i1, len);
        }
        let mut coef = small_poly(p, len);
        if !q.is_empty() {
            let qw = trunc_mul(&small_poly(q, len), &w1, len);
            for (c, x) in coef.iter_mut().zip(qw) {
                *c += x;
            }
        }
        for (r, x) in res.iter_mut().zip(trunc_mul(&coef, &pow, len)) {
            *r += x;
        }
    }
    res
}

/// First order at which the octic residual is nonzero, or `s + 1` if it vanishes
/// through order `s`.
pub fn verify_octic_m1(table: &CoeffTable, s: usize) -> Result<usize, CountError> {
    if table.m != 1 {
        return Err(CountError::Unsupported("the octic identity is for one variable".into()));
    }
    if table.n_max < s {
        return Err(CountError::OutOfRange { n: s, n_max: table.n_max });
    }
    let res = octic_residual(table.tautologies(), &table.totals(), s);
    Ok(res.iter().position(|c| !c.is_zero()).unwrap_or(s + 1))
}

// ---------------------------------------------------------------------------
// On-disk cache

const MAGIC: &[u8; 5] = b"TAUT1";

pub fn write_cache(table: &CoeffTable, path: &Path) -> Result<(), CountError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&table.m.to_le_bytes())?;
    w.write_all(&(table.n_max as u64).to_le_bytes())?;
    for row in &table.counts {
        for c in row {
            let limbs = c.to_digits::<u64>(Order::Lsf);
            w.write_all(&(limbs.len() as u32).to_le_bytes())?;
            for l in limbs {
                w.write_all(&l.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<CoeffTable, CountError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CountError::CacheFormat("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b4)?;
    let m = u32::from_le_bytes(b4);
    if m == 0 || m > MAX_CLASS_VARS {
        return Err(CountError::CacheFormat(format!("variable count {m} out of range")));
    }
    r.read_exact(&mut b8)?;
    let n_max = u64::from_le_bytes(b8) as usize;
    let mut counts = Vec::with_capacity(num_classes(m));
    for _ in 0..num_classes(m) {
        let mut row = Vec::with_capacity(n_max + 1);
        for _ in 0..=n_max {
            r.read_exact(&mut b4)?;
            let len = u32::from_le_bytes(b4) as usize;
            let mut limbs = vec![0u64; len];
            for l in limbs.iter_mut() {
                r.read_exact(&mut b8)?;
                *l = u64::from_le_bytes(b8);
            }
            row.push(Integer::from_digits(&limbs, Order::Lsf));
        }
        counts.push(row);
    }
    if r.read(&mut [0u8; 1])? != 0 {
        return Err(CountError::CacheFormat("trailing bytes".into()));
    }
    Ok(CoeffTable { m, n_max, counts })
}

/// File for the table of `m` variables inside a cache directory.
pub fn cache_path(dir: &Path, m: u32) -> std::path::PathBuf {
    dir.join(format!("classes-m{m}.taut"))
}

/// Class table through the cache: reuse a deep enough table for the same m, otherwise
/// compute and (re)write it.
pub fn class_coefficients_cached(m: u32, n_max: usize, cache: Option<&Path>) -> Result<CoeffTable, CountError> {
    if let Some(p) = cache {
        if p.exists() {
            if let Ok(t) = read_cache(p) {
                if t.m == m && t.n_max >= n_max {
                    return Ok(t.truncated(n_max));
                }
            }
        }
    }
    let t = class_coefficients(m, n_max)?;
    if let Some(p) = cache {
        write_cache(&t, p)?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn w_small() {
        assert_eq!(w_coefficients(1, 6)[1..], ints(&[1, 1, 2, 4, 9, 21])[..]);
        assert_eq!(w_coefficients(2, 4)[1..], ints(&[2, 2, 6, 14])[..]);
    }

    #[test]
    fn w_matches_enumeration() {
        for m in 1..=3 {
            let w = w_coefficients(m, 8);
            for n in 1..=8 {
                assert_eq!(w[n], logic::enumerate_formulas(m, n).count() as u64);
            }
        }
    }

    #[test]
    fn class_examples() {
        let t = class_coefficients(1, 5).unwrap();
        assert_eq!(t.tautologies()[3..], ints(&[1, 0, 5])[..]);
        let col: Vec<_> = (0..4).map(|a| t.counts[a][4].clone()).collect();
        assert_eq!(col, ints(&[0, 1, 2, 1]));
        for m in 1..=3 {
            let t = class_coefficients(m, 3).unwrap();
            let vms: Vec<u64> = (0..m).map(|i| var_mask(i, m).0).collect();
            for a in 0..t.num_classes() {
                assert_eq!(t.counts[a][1], u32::from(vms.contains(&(a as u64))));
            }
        }
    }

    #[test]
    fn transform_matches_pairwise() {
        for (m, n) in [(1, 40), (2, 24), (3, 9)] {
            assert_eq!(class_coefficients(m, n).unwrap(), class_coefficients_pairwise(m, n).unwrap(), "m={m}");
        }
    }

    #[test]
    fn kronecker_matches_schoolbook() {
        let f: Vec<Integer> = (0..70).map(|i| Integer::from(3u32).pow(i as u32 * 3) + i).collect();
        let g: Vec<Integer> = (0..90).map(|i| Integer::from(7u32).pow(i as u32) * (i % 5)).collect();
        let mut h1 = vec![Integer::new(); 200];
        let mut h2 = h1.clone();
        mul_add(&f, &g, 5, &mut h1, 40, 150);
        for (i, a) in f.iter().enumerate() {
            for (j, b) in g.iter().enumerate() {
                let t = 5 + i + j;
                if (40..150).contains(&t) {
                    h2[t] += a * Integer::from(b);
                }
            }
        }
        assert_eq!(h1, h2);
    }

    #[test]
    fn mass_conservation() {
        let t = class_coefficients(3, 60).unwrap();
        assert_eq!(t.totals(), w_coefficients(3, 60));
    }

    #[test]
    fn refusals() {
        assert!(matches!(class_coefficients(4, 5), Err(CountError::Resource(_))));
    }

    #[test]
    fn orbit_counts() {
        assert_eq!(orbits(1).reps.len(), 4);
        assert_eq!(orbits(2).reps.len(), 12);
        assert_eq!(orbits(3).reps.len(), 80);
    }

    #[test]
    fn ratios() {
        let t = class_coefficients(1, 3).unwrap();
        assert_eq!(ratio_at(&t, 0, 3, 64).unwrap(), 0.5);
        assert!(matches!(ratio_at(&t, 0, 4, 64), Err(CountError::OutOfRange { .. })));
        assert!(matches!(ratio_at(&t, 0, 0, 64), Err(CountError::ZeroDenominator(0))));
    }

    #[test]
    fn truncation_eval() {
        let w = w_coefficients(1, 30);
        let r = Float::with_val(128, 1u32) / 3u32;
        assert_eq!(truncated_eval(&w, &r, 1), r);
        let mut prev = Float::with_val(128, 0u32);
        for s in 1..30 {
            let v = truncated_eval(&w, &r, s);
            assert!(v >= prev && v < 1u32);
            prev = v;
        }
    }

    #[test]
    fn octic() {
        let t = class_coefficients(1, 30).unwrap();
        assert_eq!(verify_octic_m1(&t, 10).unwrap(), 11);
        assert_eq!(verify_octic_m1(&t, 30).unwrap(), 31);
        let mut bad = t.clone();
        bad.counts[0][5] += 1;
        assert!(verify_octic_m1(&bad, 30).unwrap() <= 30);
    }

    #[test]
    fn w_estimate() {
        let w = w_coefficients(1, 100);
        let e = w_asymptotic_estimate(1, 100, 128) / Float::with_val(128, &w[100]);
        assert!((e.to_f64() - 1.0).abs() < 0.1);
        let e1 = w_asymptotic_estimate(1, 1000, 128);
        let e2 = w_asymptotic_estimate(1, 1001, 128);
        assert!(((e2 / e1).to_f64() - 3.0).abs() < 0.01);
    }

    #[test]
    fn category_small() {
        for m in 1..=3 {
            let c = category_coefficients(m, 2, BasisFamily::S1, Strength::Strong).unwrap();
            assert_eq!((c.t[1].clone(), c.u[1].clone(), c.a[1].clone()), (Integer::new(), Integer::from(m), Integer::new()));
        }
        let c = category_coefficients(1, 3, BasisFamily::S1, Strength::Strong).unwrap();
        assert_eq!((c.t[3].to_u32(), c.a[3].to_u32(), c.u[3].to_u32()), (Some(1), Some(0), Some(1)));
        let c = category_coefficients(1, 4, BasisFamily::S1, Strength::Weak).unwrap();
        assert_eq!(c.a[4], 1);
        assert!(category_coefficients(1, 4, BasisFamily::S12, Strength::Strong).is_err());
    }

    #[test]
    fn cache_roundtrip() {
        let t = class_coefficients(2, 30).unwrap();
        let dir = std::env::temp_dir().join(format!("taut-cache-{}", std::process::id()));
        write_cache(&t, &dir).unwrap();
        assert_eq!(read_cache(&dir).unwrap(), t);
        assert_eq!(class_coefficients_cached(2, 20, Some(&dir)).unwrap(), t.truncated(20));
        std::fs::write(&dir, b"nope").unwrap();
        assert!(read_cache(&dir).is_err());
        std::fs::remove_file(&dir).ok();
    }
}
