//! Well-formed formulae over `x0..x(m-1)` with `~` and `->`.
//!
//! Everything semantic goes through [`FalsityMask`]: bit `t` of the mask is set
//! iff assignment `t` (bit `i` of `t` set iff `x_i` is true) falsifies the
//! formula. Tautologies have mask 0, antilogies have the full mask.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest variable count for which a falsity mask fits in a `u64`.
pub const MAX_VARS: u32 = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} out of range for m = {m}")]
    VarOutOfRange { index: u32, m: u32 },
    #[error("m = {0} exceeds the supported variable count {MAX_VARS}")]
    TooManyVars(u32),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Formula {
    Var(u32),
    Neg(Arc<Formula>),
    Impl(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn var(i: u32) -> Self {
        Formula::Var(i)
    }

    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Arc::new(f))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Impl(Arc::new(a), Arc::new(b))
    }

    /// ℓ(x) = 1, ℓ(¬φ) = ℓ(φ)+1, ℓ(φ→ψ) = ℓ(φ)+ℓ(ψ)+1.
    pub fn len(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::Neg(a) => a.len() + 1,
            Formula::Impl(a, b) => a.len() + b.len() + 1,
        }
    }

    /// Largest variable index plus one (0 never happens: every formula has a variable).
    pub fn var_bound(&self) -> u32 {
        match self {
            Formula::Var(i) => i + 1,
            Formula::Neg(a) => a.var_bound(),
            Formula::Impl(a, b) => a.var_bound().max(b.var_bound()),
        }
    }

    pub fn check_vars(&self, m: u32) -> Result<(), LogicError> {
        if m > MAX_VARS {
            return Err(LogicError::TooManyVars(m));
        }
        let b = self.var_bound();
        if b > m {
            return Err(LogicError::VarOutOfRange { index: b - 1, m });
        }
        Ok(())
    }

    /// Variable indices in left-to-right order of occurrence.
    pub fn occurrences(&self) -> Vec<u32> {
        fn go(f: &Formula, out: &mut Vec<u32>) {
            match f {
                Formula::Var(i) => out.push(*i),
                Formula::Neg(a) => go(a, out),
                Formula::Impl(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn negations(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Neg(a) => a.negations() + 1,
            Formula::Impl(a, b) => a.negations() + b.negations(),
        }
    }

    /// Splits `ψ1 → [ψ2 → … [ψk → η]]` into the premises and the non-implication head η.
    pub fn premises(&self) -> (Vec<&Formula>, &Formula) {
        let mut ps = Vec::new();
        let mut cur = self;
        while let Formula::Impl(a, b) = cur {
            ps.push(a.as_ref());
            cur = b.as_ref();
        }
        (ps, cur)
    }

    pub fn falsity_mask(&self, m: u32) -> FalsityMask {
        assert!(m <= MAX_VARS, "m = {m} too large for a u64 falsity mask");
        let full = full_mask(m);
        fn go(f: &Formula, m: u32, full: u64) -> u64 {
            match f {
                Formula::Var(i) => {
                    assert!(*i < m, "variable x{i} out of range for m = {m}");
                    var_mask(*i, m).0
                }
                Formula::Neg(a) => !go(a, m, full) & full,
                Formula::Impl(a, b) => go(b, m, full) & !go(a, m, full),
            }
        }
        FalsityMask(go(self, m, full))
    }

    pub fn is_tautology(&self, m: u32) -> bool {
        self.falsity_mask(m).0 == 0
    }

    pub fn is_antilogy(&self, m: u32) -> bool {
        self.falsity_mask(m).0 == full_mask(m)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

/// Integer encoding of a falsity set; see the module docs for the bit convention.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FalsityMask(pub u64);

/// Number of truth assignments, 2^m.
pub fn num_assignments(m: u32) -> u32 {
    1 << m
}

/// Number of semantic classes, 2^(2^m) (only meaningful for m ≤ 5 as a usize on 64-bit).
pub fn num_classes(m: u32) -> usize {
    1usize << (1usize << m)
}

pub fn full_mask(m: u32) -> u64 {
    let bits = 1u32 << m;
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// F_{x_i}: assignments with x_i false.
pub fn var_mask(i: u32, m: u32) -> FalsityMask {
    let mut mask = 0u64;
    for t in 0..num_assignments(m) {
        if t >> i & 1 == 0 {
            mask |= 1 << t;
        }
    }
    FalsityMask(mask)
}

/// Image of a mask under the assignment action T ↦ σT of a variable permutation.
pub fn permute_mask(mask: FalsityMask, sigma: &[u32], m: u32) -> FalsityMask {
    let mut out = 0u64;
    for t in 0..num_assignments(m) {
        if mask.0 >> t & 1 == 1 {
            let mut u = 0u32;
            for i in 0..m {
                if t >> i & 1 == 1 {
                    u |= 1 << apply_perm(sigma, i);
                }
            }
            out |= 1 << u;
        }
    }
    FalsityMask(out)
}

fn apply_perm(sigma: &[u32], i: u32) -> u32 {
    sigma.get(i as usize).copied().unwrap_or(i)
}

pub fn permute_vars(f: &Formula, sigma: &[u32]) -> Formula {
    match f {
        Formula::Var(i) => Formula::Var(apply_perm(sigma, *i)),
        Formula::Neg(a) => Formula::neg(permute_vars(a, sigma)),
        Formula::Impl(a, b) => Formula::imp(permute_vars(a, sigma), permute_vars(b, sigma)),
    }
}

// ---------------------------------------------------------------------------
// Surface syntax

pub fn parse_formula(text: &str, m: u32) -> Result<Formula, LogicError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let f = p.top()?;
    p.skip_ws();
    if p.pos < p.s.len() {
        let msg = if p.peek_str("->") {
            "nested implication needs brackets".to_string()
        } else {
            format!("unexpected character {:?}", p.s[p.pos] as char)
        };
        return Err(LogicError::Syntax { pos: p.pos, msg });
    }
    f.check_vars(m)?;
    Ok(f)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek_str(&self, t: &str) -> bool {
        self.s[self.pos..].starts_with(t.as_bytes())
    }

    fn err<T>(&self, msg: &str) -> Result<T, LogicError> {
        Err(LogicError::Syntax { pos: self.pos, msg: msg.to_string() })
    }

    fn top(&mut self) -> Result<Formula, LogicError> {
        let left = self.unary()?;
        self.skip_ws();
        if self.peek_str("->") {
            self.pos += 2;
            let right = self.unary()?;
            return Ok(Formula::imp(left, right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        self.skip_ws();
        match self.s.get(self.pos) {
            Some(b'~') => {
                self.pos += 1;
                Ok(Formula::neg(self.unary()?))
            }
            Some(&open @ (b'[' | b'(')) => {
                let close = if open == b'[' { b']' } else { b')' };
                self.pos += 1;
                let inner = self.top()?;
                self.skip_ws();
                if self.s.get(self.pos) != Some(&close) {
                    return if self.peek_str("->") {
                        self.err("nested implication needs brackets")
                    } else {
                        self.err(&format!("expected {:?}", close as char))
                    };
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if start == self.pos {
                    self.pos = start;
                    return self.err("expected variable index after 'x'");
                }
                let digits = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match digits.parse::<u32>() {
                    Ok(i) => Ok(Formula::Var(i)),
                    Err(_) => {
                        self.pos = start;
                        self.err("variable index too large")
                    }
                }
            }
            Some(_) => self.err("expected a variable, '~' or a bracket"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Canonical text: `[ ]` around every implication except the outermost.
pub fn render_formula(f: &Formula) -> String {
    fn go(f: &Formula, top: bool, out: &mut String) {
        match f {
            Formula::Var(i) => {
                out.push('x');
                out.push_str(&i.to_string());
            }
            Formula::Neg(a) => {
                out.push('~');
                go(a, false, out);
            }
            Formula::Impl(a, b) => {
                if !top {
                    out.push('[');
                }
                go(a, false, out);
                out.push_str("->");
                go(b, false, out);
                if !top {
                    out.push(']');
                }
            }
        }
    }
    let mut s = String::new();
    go(f, true, &mut s);
    s
}

// ---------------------------------------------------------------------------
// Enumeration

/// All formulae of each length `1..=n`, index `k` holding length `k` (index 0 empty).
pub fn formulas_up_to(m: u32, n: usize) -> Vec<Vec<Formula>> {
    let mut levels: Vec<Vec<Formula>> = vec![Vec::new(); n + 1];
    for len in 1..=n {
        levels[len] = build_level(m, len, &levels).collect();
    }
    levels
}

fn build_level<'a>(m: u32, len: usize, levels: &'a [Vec<Formula>]) -> Box<dyn Iterator<Item = Formula> + 'a> {
    if len == 1 {
        return Box::new((0..m).map(Formula::Var));
    }
    let negs = levels[len - 1].iter().map(|f| Formula::Neg(Arc::new(f.clone())));
    let impls = (1..len - 1).flat_map(move |i| {
        let j = len - 1 - i;
        levels[i].iter().flat_map(move |a| {
            let a = Arc::new(a.clone());
            levels[j].iter().map(move |b| Formula::Impl(a.clone(), Arc::new(b.clone())))
        })
    });
    Box::new(negs.chain(impls))
}

/// Every formula of length exactly `n`, each once. Shorter levels are materialized,
/// the last one is streamed.
pub fn enumerate_formulas(m: u32, n: usize) -> impl Iterator<Item = Formula> {
    assert!(n >= 1, "formula length starts at 1");
    let levels = formulas_up_to(m, n - 1);
    FormulaStream { levels, m, n, buf: Vec::new(), stage: 0, stage_pos: 0 }
}

// Owns the lower levels so the stream can outlive the caller's frame.
struct FormulaStream {
    levels: Vec<Vec<Formula>>,
    m: u32,
    n: usize,
    buf: Vec<Formula>,
    stage: usize,
    stage_pos: usize,
}

impl Iterator for FormulaStream {
    type Item = Formula;

    fn next(&mut self) -> Option<Formula> {
        loop {
            if let Some(f) = self.buf.pop() {
                return Some(f);
            }
            // stage 0: variables or negations; stage s ≥ 1: implications with a left part
            // of length s, produced one left formula at a time.
            let n = self.n;
            if self.stage == 0 {
                self.stage = 1;
                self.buf = if n == 1 {
                    (0..self.m).rev().map(Formula::Var).collect()
                } else {
                    self.levels[n - 1].iter().rev().map(|f| Formula::neg(f.clone())).collect()
                };
                self.stage_pos = 0;
                continue;
            }
            if n < 3 {
                return None;
            }
            let i = self.stage;
            if i > n - 2 {
                return None;
            }
            let j = n - 1 - i;
            if self.stage_pos >= self.levels[i].len() {
                self.stage += 1;
                self.stage_pos = 0;
                continue;
            }
            let a = Arc::new(self.levels[i][self.stage_pos].clone());
            self.stage_pos += 1;
            self.buf = self.levels[j].iter().rev().map(|b| Formula::Impl(a.clone(), Arc::new(b.clone()))).collect();
        }
    }
}

// ---------------------------------------------------------------------------
// Types and norms

/// Canonical representative under variable renaming: first occurrences get 0, 1, 2, ….
pub fn type_of(f: &Formula) -> Formula {
    let mut map: HashMap<u32, u32> = HashMap::new();
    for v in f.occurrences() {
        let next = map.len() as u32;
        map.entry(v).or_insert(next);
    }
    let mut sigma: Vec<u32> = (0..f.var_bound()).collect();
    for (&from, &to) in &map {
        sigma[from as usize] = to;
    }
    permute_vars(f, &sigma)
}

pub fn is_type_formula(f: &Formula) -> bool {
    let mut next = 0u32;
    for v in f.occurrences() {
        if v > next {
            return false;
        }
        if v == next {
            next += 1;
        }
    }
    true
}

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Half(pub i64);

impl Half {
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NormStats {
    /// ‖φ‖
    pub distinct_vars: usize,
    pub length: usize,
    /// Variable occurrences that are not first occurrences.
    pub repeats: usize,
    pub negations: usize,
    /// |φ| = ‖φ‖ − ℓ(φ)/2
    pub norm: Half,
}

pub fn norm_stats(f: &Formula) -> NormStats {
    let occ = f.occurrences();
    let mut seen = occ.clone();
    seen.sort_unstable();
    seen.dedup();
    let distinct_vars = seen.len();
    let length = f.len();
    let norm = Half(2 * distinct_vars as i64 - length as i64);
    let repeats = occ.len() - distinct_vars;
    let negations = f.negations();
    debug_assert_eq!(norm.0, 1 - 2 * repeats as i64 - negations as i64);
    NormStats { distinct_vars, length, repeats, negations, norm }
}

// ---------------------------------------------------------------------------
// Simple tautologies

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct SimpleKinds {
    pub first: bool,
    pub strict_first: bool,
    pub second: bool,
}

impl SimpleKinds {
    pub fn is_none(&self) -> bool {
        !self.first && !self.second
    }
}

pub fn classify_simple(f: &Formula) -> SimpleKinds {
    let (ps, head) = f.premises();
    let mut kinds = SimpleKinds::default();
    if let Formula::Var(p) = head {
        let is_p = |g: &&Formula| matches!(g, Formula::Var(q) if q == p);
        kinds.first = ps.iter().any(is_p);
        kinds.strict_first = !ps.is_empty() && is_p(&ps[0]) && !ps[1..].iter().any(is_p);
    }
    kinds.second = ps.len() >= 2
        && ps.iter().any(|g| match g {
            Formula::Var(p) => ps.iter().any(|h| is_neg_var(h, *p)),
            _ => false,
        });
    kinds
}

fn is_neg_var(f: &Formula, p: u32) -> bool {
    matches!(f, Formula::Neg(a) if **a == Formula::Var(p))
}

/// Membership in 𝒮₁.
pub fn is_simple_first(f: &Formula) -> bool {
    classify_simple(f).first
}

/// Membership in 𝒮₁ ∪ 𝒮₂.
pub fn is_simple(f: &Formula) -> bool {
    !classify_simple(f).is_none()
}

/// Membership in 𝒮_c (strict first kind), the strong basis of 𝒮₁.
pub fn is_simple_strict(f: &Formula) -> bool {
    classify_simple(f).strict_first
}

// ---------------------------------------------------------------------------
// Categories

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Strength {
    Strong,
    Weak,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Cat {
    T,
    U,
    A,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct CategoryLabel {
    pub cat: Cat,
    pub strength: Strength,
}

impl fmt::Display for CategoryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.cat {
            Cat::T => "T",
            Cat::U => "U",
            Cat::A => "A",
        };
        let s = match self.strength {
            Strength::Strong => "strong",
            Strength::Weak => "weak",
        };
        write!(f, "{s} {c}")
    }
}

pub fn neg_cat(c: Cat) -> Cat {
    match c {
        Cat::T => Cat::A,
        Cat::U => Cat::U,
        Cat::A => Cat::T,
    }
}

/// The `premise → conclusion` table; the weak table sends every `A → ·` to T.
pub fn impl_cat(strength: Strength, premise: Cat, conclusion: Cat) -> Cat {
    match (premise, conclusion) {
        (_, Cat::T) => Cat::T,
        (Cat::A, _) if strength == Strength::Weak => Cat::T,
        (Cat::T, c) => c,
        (_, _) => Cat::U,
    }
}

/// Memoizing bottom-up labeler for one (basis, strength) pair.
pub struct CategoryClassifier<'a> {
    basis: Box<dyn Fn(&Formula) -> bool + 'a>,
    strength: Strength,
    memo: HashMap<Formula, Cat>,
}

impl<'a> CategoryClassifier<'a> {
    pub fn new(basis: impl Fn(&Formula) -> bool + 'a, strength: Strength) -> Self {
        CategoryClassifier { basis: Box::new(basis), strength, memo: HashMap::new() }
    }

    pub fn strength(&self) -> Strength {
        self.strength
    }

    pub fn classify(&mut self, f: &Formula) -> Cat {
        if let Some(&c) = self.memo.get(f) {
            return c;
        }
        let c = if (self.basis)(f) { Cat::T } else { self.table_label(f) };
        self.memo.insert(f.clone(), c);
        c
    }

    /// Label from the table alone, ignoring whether `f` itself is in the basis.
    pub fn table_label(&mut self, f: &Formula) -> Cat {
        match f {
            Formula::Var(_) => Cat::U,
            Formula::Neg(a) => neg_cat(self.classify(a)),
            Formula::Impl(a, b) => {
                let ca = self.classify(a);
                let cb = self.classify(b);
                impl_cat(self.strength, ca, cb)
            }
        }
    }

    /// Generic basic-ness: in the basis set, yet not a tautology of the basis minus itself.
    pub fn is_basic(&mut self, f: &Formula) -> bool {
        (self.basis)(f) && self.table_label(f) != Cat::T
    }
}

pub fn category_classify(f: &Formula, basis_test: impl Fn(&Formula) -> bool, strength: Strength) -> CategoryLabel {
    let mut c = CategoryClassifier::new(basis_test, strength);
    CategoryLabel { cat: c.classify(f), strength }
}

/// Weak basis of 𝒮₁: `p → ψ2 → … → ψk → p` with every ψj ≠ p and not an antilogy.
pub fn is_weak_s1_basic(f: &Formula, mut is_anti: impl FnMut(&Formula) -> bool) -> bool {
    let (ps, head) = f.premises();
    let Formula::Var(p) = head else { return false };
    if ps.is_empty() || *ps[0] != Formula::Var(*p) {
        return false;
    }
    ps[1..].iter().all(|g| **g != Formula::Var(*p) && !is_anti(g))
}

/// Weak basis of 𝒮₁ ∪ 𝒮₂, by the three disjoint structural shapes.
pub fn is_weak_s12_basic(f: &Formula, mut is_anti: impl FnMut(&Formula) -> bool) -> bool {
    let (ps, head) = f.premises();
    if ps.is_empty() {
        return false;
    }
    let middle_ok = |excluded: &Formula, is_anti: &mut dyn FnMut(&Formula) -> bool| {
        ps[1..].iter().all(|g| *g != excluded && !is_anti(g))
    };
    match ps[0] {
        Formula::Var(p) => {
            let pv = Formula::Var(*p);
            if *head == pv {
                return middle_ok(&pv, &mut is_anti);
            }
            if !ps[1..].iter().any(|g| is_neg_var(g, *p)) {
                return false;
            }
            if let Formula::Neg(eta) = head {
                if is_anti(eta) {
                    return false;
                }
            }
            middle_ok(&pv, &mut is_anti)
        }
        Formula::Neg(a) => {
            let Formula::Var(p) = **a else { return false };
            let pv = Formula::Var(p);
            if *head == pv || !ps[1..].iter().any(|g| **g == pv) {
                return false;
            }
            if let Formula::Neg(eta) = head {
                if is_anti(eta) {
                    return false;
                }
            }
            middle_ok(ps[0], &mut is_anti)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, m: u32) -> Formula {
        parse_formula(s, m).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("x0", 1), Formula::Var(0));
        assert_eq!(p("x0->x0", 1), Formula::imp(Formula::var(0), Formula::var(0)));
        let f = p("~[x0->~x1]", 2);
        assert_eq!(f, Formula::neg(Formula::imp(Formula::var(0), Formula::neg(Formula::var(1)))));
        assert_eq!(render_formula(&f), "~[x0->~x1]");
        assert_eq!(p("(x0 -> (x1->x0))", 2), p("x0->[x1->x0]", 2));
        assert_eq!(p("[x0->x1]", 2), p("x0->x1", 2));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_formula("x0->x1->x0", 2), Err(LogicError::Syntax { .. })));
        assert!(matches!(parse_formula("x2", 2), Err(LogicError::VarOutOfRange { index: 2, m: 2 })));
        assert!(matches!(parse_formula("[x0->x1", 2), Err(LogicError::Syntax { .. })));
        assert!(matches!(parse_formula("", 1), Err(LogicError::Syntax { pos: 0, .. })));
        assert!(matches!(parse_formula("x", 1), Err(LogicError::Syntax { pos: 1, .. })));
        assert!(matches!(parse_formula("[x0->x1)", 2), Err(LogicError::Syntax { .. })));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_formula(&Formula::var(0)), "x0");
        let f = Formula::imp(Formula::var(0), Formula::imp(Formula::var(0), Formula::var(0)));
        assert_eq!(render_formula(&f), "x0->[x0->x0]");
        assert_eq!(render_formula(&Formula::neg(Formula::neg(Formula::var(1)))), "~~x1");
    }

    #[test]
    fn lengths() {
        assert_eq!(Formula::var(0).len(), 1);
        assert_eq!(p("~x0", 1).len(), 2);
        assert_eq!(p("x0->~x1", 2).len(), 4);
    }

    // Truth-table oracle, independent of the mask recursion.
    fn truth(f: &Formula, t: u32) -> bool {
        match f {
            Formula::Var(i) => t >> i & 1 == 1,
            Formula::Neg(a) => !truth(a, t),
            Formula::Impl(a, b) => !truth(a, t) || truth(b, t),
        }
    }

    fn oracle_mask(f: &Formula, m: u32) -> u64 {
        (0..1u32 << m).filter(|&t| !truth(f, t)).map(|t| 1u64 << t).sum()
    }

    #[test]
    fn masks() {
        assert_eq!(var_mask(0, 2).0, 5);
        assert_eq!(var_mask(1, 2).0, 3);
        assert_eq!(p("x0->x1", 2).falsity_mask(2).0, 2);
        assert_eq!(p("x0->x0", 1).falsity_mask(1).0, 0);
        for m in 1..=3 {
            for n in 1..=7 {
                for f in enumerate_formulas(m, n) {
                    assert_eq!(f.falsity_mask(m).0, oracle_mask(&f, m), "{f}");
                }
            }
        }
    }

    #[test]
    fn taut_anti() {
        assert!(p("x0->x0", 1).is_tautology(1));
        assert!(p("~[x0->x0]", 1).is_antilogy(1));
        let x = p("x0", 1);
        assert!(!x.is_tautology(1) && !x.is_antilogy(1));
    }

    #[test]
    fn enumeration_small() {
        let l1: Vec<_> = enumerate_formulas(1, 1).collect();
        assert_eq!(l1, vec![Formula::var(0)]);
        let mut l3: Vec<String> = enumerate_formulas(1, 3).map(|f| render_formula(&f)).collect();
        l3.sort();
        assert_eq!(l3, vec!["x0->x0", "~~x0"]);
        let l2: Vec<String> = enumerate_formulas(2, 2).map(|f| render_formula(&f)).collect();
        assert_eq!(l2, vec!["~x0", "~x1"]);
    }

    #[test]
    fn enumeration_distinct_and_sized() {
        for n in 1..=8 {
            let all: Vec<_> = enumerate_formulas(2, n).collect();
            let mut s = all.clone();
            s.sort();
            s.dedup();
            assert_eq!(s.len(), all.len());
            assert!(all.iter().all(|f| f.len() == n));
        }
    }

    #[test]
    fn stream_matches_levels() {
        let levels = formulas_up_to(2, 7);
        for n in 1..=7 {
            let streamed: Vec<_> = enumerate_formulas(2, n).collect();
            assert_eq!(streamed, levels[n]);
        }
    }

    #[test]
    fn types() {
        assert_eq!(render_formula(&type_of(&p("x1->x1", 2))), "x0->x0");
        assert_eq!(render_formula(&type_of(&p("x2->[x0->x2]", 3))), "x0->[x1->x0]");
        assert_eq!(type_of(&p("x0", 1)), p("x0", 1));
        assert!(is_type_formula(&p("x0->[x1->x0]", 2)));
        assert!(!is_type_formula(&p("x1->x0", 2)));
    }

    #[test]
    fn norms() {
        assert_eq!(norm_stats(&p("x0", 1)).norm, Half(1));
        let s = norm_stats(&p("x0->x0", 1));
        assert_eq!((s.distinct_vars, s.length, s.norm), (1, 3, Half(-1)));
        assert_eq!(norm_stats(&p("~[x0->x0]", 1)).norm, Half(-2));
        assert_eq!(Half(-1).to_string(), "-1/2");
        assert_eq!(Half(-2).to_string(), "-1");
    }

    #[test]
    fn simple_kinds() {
        let k = classify_simple(&p("x0->x0", 1));
        assert!(k.first && k.strict_first && !k.second);
        let k = classify_simple(&p("x1->[x0->x0]", 2));
        assert!(k.first && !k.strict_first);
        let k = classify_simple(&p("x0->[~x0->x1]", 2));
        assert!(k.second && !k.first);
        assert!(classify_simple(&p("x0->x1", 2)).is_none());
        // one premise cannot carry both p and ¬p
        assert!(classify_simple(&p("~x0->x0", 1)).is_none());
    }

    #[test]
    fn category_examples() {
        assert_eq!(category_classify(&p("x0->x0", 1), is_simple_first, Strength::Strong).cat, Cat::T);
        assert_eq!(category_classify(&p("~[x0->x0]", 1), is_simple_first, Strength::Strong).cat, Cat::A);
        assert_eq!(category_classify(&p("~x0->x1", 2), is_simple_first, Strength::Weak).cat, Cat::U);
        // weak only: antilogy premise makes a tautology
        let f = p("~[x0->x0]->x1", 2);
        assert_eq!(category_classify(&f, is_simple_first, Strength::Weak).cat, Cat::T);
        assert_eq!(category_classify(&f, is_simple_first, Strength::Strong).cat, Cat::U);
    }

    #[test]
    fn impl_tables() {
        use Cat::*;
        let strong = [(T, T, T), (T, U, U), (T, A, A), (U, T, T), (U, U, U), (U, A, U), (A, T, T), (A, U, U), (A, A, U)];
        for (a, b, c) in strong {
            assert_eq!(impl_cat(Strength::Strong, a, b), c);
        }
        for b in [T, U, A] {
            assert_eq!(impl_cat(Strength::Weak, A, b), T);
        }
    }

    #[test]
    fn permute_examples() {
        let f = p("x0->x1", 2);
        let g = permute_vars(&f, &[1, 0]);
        assert_eq!(render_formula(&g), "x1->x0");
        assert_eq!(permute_vars(&p("x0", 1), &[]), p("x0", 1));
        assert_eq!(f.falsity_mask(2).0, 2);
        assert_eq!(g.falsity_mask(2).0, 4);
        assert_eq!(permute_mask(f.falsity_mask(2), &[1, 0], 2), g.falsity_mask(2));
    }
}
