//! Exact truncated Laurent series in `y = m^(-1/2)` and the expansions of the category
//! systems at `s₀ = y/(2+y)`, where `W(s₀) = 1/y`.
//!
//! Every member `X` of a category system has `yX(s₀)` analytic in `y`; the solver works
//! with these scaled unknowns `x = yX` and `x_W = 1`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde_json::{json, Value};
use thiserror::Error;

use crate::systems::{self, MzTerm, SystemSpec};

#[derive(Debug, Error, PartialEq)]
pub enum AsymptError {
    #[error("division by a series with no known nonzero coefficient")]
    DivisionByZero,
    #[error("square root of a series with odd leading order {0}")]
    OddOrder(i32),
    #[error("square root of a non-square leading coefficient {0}")]
    NonSquare(String),
    #[error("singular linear step at order {0}")]
    Singular(i32),
    #[error("equation {name} has residual at order {order}")]
    Residual { name: String, order: i32 },
    #[error("no radical branch vanishes at y = 0")]
    Branch,
    #[error("unknown target {0}")]
    UnknownTarget(String),
    #[error("coefficient of y^{need} requested, series known below y^{have}")]
    Order { need: i32, have: i32 },
}

/// `Σ_{k=start}^{prec-1} c_k y^k + O(y^prec)`.
#[derive(Clone, Debug)]
pub struct YSeries {
    start: i32,
    coeffs: Vec<Rational>,
    prec: i32,
}

impl YSeries {
    /// Coefficients from `y^start` on; missing ones up to `prec` are zero.
    pub fn from_coeffs(start: i32, mut coeffs: Vec<Rational>, prec: i32) -> YSeries {
        let len = (prec - start).max(0) as usize;
        coeffs.resize(len, Rational::new());
        YSeries { start, coeffs, prec }
    }

    pub fn zero(prec: i32) -> YSeries {
        YSeries { start: prec, coeffs: Vec::new(), prec }
    }

    pub fn constant(c: impl Into<Rational>, prec: i32) -> YSeries {
        YSeries::monomial(c, 0, prec)
    }

    pub fn one(prec: i32) -> YSeries {
        YSeries::constant(1, prec)
    }

    /// `c·y^k`
    pub fn monomial(c: impl Into<Rational>, k: i32, prec: i32) -> YSeries {
        YSeries::from_coeffs(k, vec![c.into()], prec.max(k))
    }

    pub fn y(prec: i32) -> YSeries {
        YSeries::monomial(1, 1, prec)
    }

    /// First unknown order.
    pub fn prec(&self) -> i32 {
        self.prec
    }

    /// Lowest order with a nonzero known coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.coeffs.iter().position(|c| *c != 0).map(|i| self.start + i as i32)
    }

    pub fn coeff(&self, k: i32) -> Result<Rational, AsymptError> {
        if k >= self.prec {
            return Err(AsymptError::Order { need: k, have: self.prec });
        }
        if k < self.start {
            return Ok(Rational::new());
        }
        Ok(self.coeffs[(k - self.start) as usize].clone())
    }

    fn c(&self, k: i32) -> &Rational {
        &self.coeffs[(k - self.start) as usize]
    }

    /// Known terms as `(order, coefficient)`, zeros skipped.
    pub fn terms(&self) -> Vec<(i32, Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(i, c)| (self.start + i as i32, c.clone()))
            .collect()
    }

    pub fn truncate(&self, prec: i32) -> YSeries {
        let p = prec.min(self.prec);
        let keep = (p - self.start).max(0) as usize;
        YSeries { start: self.start.min(p), coeffs: self.coeffs[..keep.min(self.coeffs.len())].to_vec(), prec: p }
    }

    fn normalized(&self) -> YSeries {
        match self.valuation() {
            Some(v) => YSeries { start: v, coeffs: self.coeffs[(v - self.start) as usize..].to_vec(), prec: self.prec },
            None => YSeries::zero(self.prec),
        }
    }

    /// Multiplies by `y^k`.
    pub fn shift(&self, k: i32) -> YSeries {
        YSeries { start: self.start + k, coeffs: self.coeffs.clone(), prec: self.prec + k }
    }

    pub fn scale(&self, c: &Rational) -> YSeries {
        YSeries { start: self.start, coeffs: self.coeffs.iter().map(|x| Rational::from(x * c)).collect(), prec: self.prec }
    }

    pub fn inv(&self) -> Result<YSeries, AsymptError> {
        let b = self.normalized();
        if b.coeffs.is_empty() {
            return Err(AsymptError::DivisionByZero);
        }
        let n = b.coeffs.len();
        let lead = Rational::from(1) / &b.coeffs[0];
        let mut r = vec![Rational::new(); n];
        r[0] = lead.clone();
        for i in 1..n {
            let mut s = Rational::new();
            for k in 1..=i {
                s += Rational::from(&b.coeffs[k] * &r[i - k]);
            }
            r[i] = -s * &lead;
        }
        Ok(YSeries { start: -b.start, coeffs: r, prec: -b.start + n as i32 })
    }

    pub fn div(&self, other: &YSeries) -> Result<YSeries, AsymptError> {
        Ok(self * &other.inv()?)
    }

    /// Square root with a positive leading coefficient.
    pub fn sqrt(&self) -> Result<YSeries, AsymptError> {
        let a = self.normalized();
        if a.coeffs.is_empty() {
            return Err(AsymptError::DivisionByZero);
        }
        if a.start % 2 != 0 {
            return Err(AsymptError::OddOrder(a.start));
        }
        let lead = &a.coeffs[0];
        let (num, den) = (lead.numer(), lead.denom());
        if *num < 0 || !num.is_perfect_square() || !den.is_perfect_square() {
            return Err(AsymptError::NonSquare(lead.to_string()));
        }
        let s0 = Rational::from((Integer::from(num.sqrt_ref()), Integer::from(den.sqrt_ref())));
        let n = a.coeffs.len();
        let mut s = vec![Rational::new(); n];
        s[0] = s0.clone();
        let two_s0 = Rational::from(&s0 * 2u32);
        for i in 1..n {
            let mut acc = a.coeffs[i].clone();
            for k in 1..i {
                acc -= Rational::from(&s[k] * &s[i - k]);
            }
            s[i] = acc / &two_s0;
        }
        Ok(YSeries { start: a.start / 2, coeffs: s, prec: a.start / 2 + n as i32 })
    }

    /// Numeric value at a given m (sum of the known terms).
    pub fn eval_at_m(&self, m: &Float) -> Float {
        let p = m.prec();
        let y = Float::with_val(p, m.sqrt_ref()).recip();
        let mut acc = Float::with_val(p, 0u32);
        for (k, c) in self.terms() {
            let yk = Float::with_val(p, (&y).pow(k)) * Float::with_val(p, &c);
            acc += yk;
        }
        acc
    }

    /// Renders in powers of m, e.g. `1/m - 7/4*m^-3/2 + 5/4*m^-2 + O(m^-5/2)`.
    pub fn render_m(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.terms() {
            let neg = c < 0;
            let a = Rational::from(c.abs_ref());
            let body = m_term(&a, k);
            if out.is_empty() {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out.push_str(&format!(" + O({})", m_power(self.prec)));
        out
    }

    /// `{"order_num", "order_den", "coeffs": [[e2, num, den], …]}`: `e2` is twice the
    /// m-exponent as a string, the O-term exponent is `order_num/order_den`.
    pub fn to_json(&self) -> Value {
        let (on, od) = half(-self.prec);
        let int = |z: &Integer| z.to_i64().map_or_else(|| json!(z.to_string()), |v| json!(v));
        let coeffs: Vec<Value> =
            self.terms().into_iter().map(|(k, c)| json!([(-k).to_string(), int(c.numer()), int(c.denom())])).collect();
        json!({ "order_num": on, "order_den": od, "coeffs": coeffs })
    }
}

/// `y^k = m^(-k/2)` as a reduced fraction.
fn half(e2: i32) -> (i32, i32) {
    if e2 % 2 == 0 {
        (e2 / 2, 1)
    } else {
        (e2, 2)
    }
}

fn half_str(e2: i32) -> String {
    match half(e2) {
        (n, 1) => n.to_string(),
        (n, d) => format!("{n}/{d}"),
    }
}

fn m_power(k: i32) -> String {
    match -k {
        0 => "1".into(),
        2 => "m".into(),
        e2 => format!("m^{}", half_str(e2)),
    }
}

fn m_term(a: &Rational, k: i32) -> String {
    let one = *a == 1;
    match k {
        0 => a.to_string(),
        2 if one => "1/m".into(),
        _ if one => m_power(k),
        _ => format!("{a}*{}", m_power(k)),
    }
}

/// Same known order and same coefficients, however they are stored.
impl PartialEq for YSeries {
    fn eq(&self, other: &YSeries) -> bool {
        self.prec == other.prec && self.terms() == other.terms()
    }
}

impl fmt::Display for YSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}*y^{k}")?;
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(y^{})", self.prec)
    }
}

impl Add for &YSeries {
    type Output = YSeries;
    fn add(self, b: &YSeries) -> YSeries {
        let prec = self.prec.min(b.prec);
        let start = self.start.min(b.start).min(prec);
        let coeffs = (start..prec)
            .map(|k| {
                let mut v = Rational::new();
                if k >= self.start && k < self.prec {
                    v += self.c(k);
                }
                if k >= b.start && k < b.prec {
                    v += b.c(k);
                }
                v
            })
            .collect();
        YSeries { start, coeffs, prec }
    }
}

impl Neg for &YSeries {
    type Output = YSeries;
    fn neg(self) -> YSeries {
        YSeries { start: self.start, coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(), prec: self.prec }
    }
}

impl Sub for &YSeries {
    type Output = YSeries;
    fn sub(self, b: &YSeries) -> YSeries {
        self + &(-b)
    }
}

impl Mul for &YSeries {
    type Output = YSeries;
    fn mul(self, b: &YSeries) -> YSeries {
        let (va, vb) = (self.valuation().unwrap_or(self.prec), b.valuation().unwrap_or(b.prec));
        let prec = (va + b.prec).min(vb + self.prec);
        let start = (va + vb).min(prec);
        let mut coeffs = vec![Rational::new(); (prec - start) as usize];
        for i in va..self.prec {
            let x = self.c(i);
            if *x == 0 {
                continue;
            }
            for j in vb..b.prec {
                let k = i + j;
                if k >= prec {
                    break;
                }
                coeffs[(k - start) as usize] += Rational::from(x * b.c(j));
            }
        }
        YSeries { start, coeffs, prec }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr for YSeries {
            type Output = YSeries;
            fn $f(self, b: YSeries) -> YSeries {
                (&self).$f(&b)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

/// Shared constants of the substitution `m = y⁻²`, `z = s₀ = y/(2+y)`.
#[derive(Clone, Debug)]
pub struct Subst {
    pub prec: i32,
    /// `1/(2+y)`
    pub inv2y: YSeries,
    pub z: YSeries,
}

impl Subst {
    pub fn new(prec: i32) -> Subst {
        let two_y = YSeries::from_coeffs(0, vec![Rational::from(2), Rational::from(1)], prec);
        let inv2y = two_y.inv().expect("2 + y is invertible");
        let z = &YSeries::y(prec) * &inv2y;
        Subst { prec, inv2y, z }
    }

    /// `c·m^a·z^b·y^extra = c·y^(b+extra−2a)/(2+y)^b`
    pub fn term(&self, t: &MzTerm, extra: i32) -> YSeries {
        let e = t.b as i32 + extra - 2 * t.a as i32;
        let mut r = YSeries::monomial(t.c, e, self.prec);
        for _ in 0..t.b {
            r = &r * &self.inv2y;
        }
        r.truncate(self.prec)
    }

    pub fn poly(&self, p: &[MzTerm], extra: i32) -> YSeries {
        p.iter().fold(YSeries::zero(self.prec), |acc, t| &acc + &self.term(t, extra))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Member(usize),
    W,
}

#[derive(Clone, Debug)]
struct ScaledEq {
    /// `y·f`
    f: YSeries,
    g: Vec<(Slot, YSeries)>,
    /// `h/(2+y)`
    h: Vec<(Slot, Slot, YSeries)>,
}

/// A category system rewritten for the scaled unknowns `x = yX` at `s₀`:
/// `x_i = y f_i + Σ g_ij x_j + (1/(2+y)) Σ h_ijk x_j x_k`, with `x_W = 1`.
#[derive(Clone, Debug)]
pub struct SymbolicSystem {
    pub name: String,
    pub names: Vec<String>,
    pub prec: i32,
    eqs: Vec<ScaledEq>,
    seeds: Vec<Rational>,
}

impl SymbolicSystem {
    pub fn new(spec: &SystemSpec, prec: i32) -> SymbolicSystem {
        let sub = Subst::new(prec);
        let slot = |n: &str| if n == systems::W { Slot::W } else { Slot::Member(spec.index(n).expect("member")) };
        let eqs = spec
            .equations
            .iter()
            .map(|e| ScaledEq {
                f: sub.poly(&e.f, 1),
                g: e.g.iter().map(|(j, p)| (slot(j), sub.poly(p, 0))).collect(),
                h: e.h.iter().map(|(j, k, p)| (slot(j), slot(k), &sub.inv2y * &sub.poly(p, 0))).collect(),
            })
            .collect();
        SymbolicSystem {
            name: spec.name.to_string(),
            names: spec.names().iter().map(|s| s.to_string()).collect(),
            prec,
            eqs,
            seeds: spec.equations.iter().map(|e| Rational::from(e.seed)).collect(),
        }
    }

    fn get<'a>(&self, x: &'a [YSeries], s: Slot, one: &'a YSeries) -> &'a YSeries {
        match s {
            Slot::Member(i) => &x[i],
            Slot::W => one,
        }
    }

    /// Right side minus left side of every equation.
    pub fn residual(&self, x: &[YSeries]) -> Vec<YSeries> {
        let one = YSeries::one(self.prec);
        self.eqs
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut r = e.f.clone();
                for (j, c) in &e.g {
                    r = &r + &(c * self.get(x, *j, &one));
                }
                for (j, k, c) in &e.h {
                    r = &r + &(c * &(self.get(x, *j, &one) * self.get(x, *k, &one)));
                }
                &r - &x[i]
            })
            .collect()
    }

    /// Constant-term Jacobian of the residual; it is the matrix of every order-k step.
    fn step_matrix(&self, x: &[YSeries]) -> Vec<Vec<Rational>> {
        let n = self.names.len();
        let c0 = |s: &YSeries| s.coeff(0).unwrap_or_default();
        let val0 = |s: Slot| match s {
            Slot::Member(i) => c0(&x[i]),
            Slot::W => Rational::from(1),
        };
        let mut j = vec![vec![Rational::new(); n]; n];
        for (i, e) in self.eqs.iter().enumerate() {
            j[i][i] -= 1;
            for (s, c) in &e.g {
                if let Slot::Member(a) = s {
                    j[i][*a] += c0(c);
                }
            }
            for (a, b, c) in &e.h {
                let c = c0(c);
                if let Slot::Member(a) = a {
                    j[i][*a] += Rational::from(&c * &val0(*b));
                }
                if let Slot::Member(b) = b {
                    j[i][*b] += Rational::from(&c * &val0(*a));
                }
            }
        }
        j
    }
}

/// Gauss–Jordan over the rationals; `None` if singular.
fn solve_rational(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| a[r][c] != 0)?;
        a.swap(c, p);
        b.swap(c, p);
        let piv = a[c][c].clone();
        for r in 0..n {
            if r == c || a[r][c] == 0 {
                continue;
            }
            let f = Rational::from(&a[r][c] / &piv);
            for k in c..n {
                let t = Rational::from(&f * &a[c][k]);
                a[r][k] -= t;
            }
            let t = Rational::from(&f * &b[c]);
            b[r] -= t;
        }
    }
    Some((0..n).map(|i| Rational::from(&b[i] / &a[i][i])).collect())
}

/// Scaled solutions `yX(s₀)` of every member through `y^(prec-1)`.
#[derive(Clone, Debug)]
pub struct SeriesSolution {
    pub system: SymbolicSystem,
    pub x: Vec<YSeries>,
}

impl SeriesSolution {
    pub fn scaled(&self, name: &str) -> Option<&YSeries> {
        self.system.names.iter().position(|n| n == name).map(|i| &self.x[i])
    }

    /// `X(s₀)` itself, a series starting at `y^-1`.
    pub fn value(&self, name: &str) -> Option<YSeries> {
        self.scaled(name).map(|s| s.shift(-1))
    }

    /// Largest order through which every residual is identically zero.
    pub fn residual_clean_through(&self) -> i32 {
        let res = self.system.residual(&self.x);
        res.iter()
            .map(|r| r.valuation().map_or(r.prec() - 1, |v| v - 1))
            .min()
            .unwrap_or(self.system.prec - 1)
    }
}

/// Undetermined coefficients: order 0 from the seeds, then one exact linear solve per order.
pub fn solve_system_series(spec: &SystemSpec, prec: i32) -> Result<SeriesSolution, AsymptError> {
    let sys = SymbolicSystem::new(spec, prec);
    let n = sys.names.len();
    let mut x: Vec<YSeries> = sys.seeds.iter().map(|s| YSeries::constant(s.clone(), prec)).collect();
    let r0 = sys.residual(&x);
    for (i, r) in r0.iter().enumerate() {
        if r.coeff(0)? != 0 {
            return Err(AsymptError::Residual { name: sys.names[i].clone(), order: 0 });
        }
    }
    let jac = sys.step_matrix(&x);
    for k in 1..prec {
        let r = sys.residual(&x);
        let rhs: Vec<Rational> = r.iter().map(|s| s.coeff(k).map(|c| -c)).collect::<Result<_, _>>()?;
        let c = solve_rational(jac.clone(), rhs).ok_or(AsymptError::Singular(k))?;
        for (i, ci) in c.into_iter().enumerate() {
            if ci != 0 {
                x[i] = &x[i] + &YSeries::monomial(ci, k, prec);
            }
        }
    }
    let sol = SeriesSolution { system: sys, x };
    if sol.residual_clean_through() < prec - 1 {
        let res = sol.system.residual(&sol.x);
        let i = (0..n).find(|&i| res[i].valuation().is_some()).unwrap_or(0);
        return Err(AsymptError::Residual { name: sol.system.names[i].clone(), order: res[i].valuation().unwrap_or(0) });
    }
    Ok(sol)
}

/// Limit ratios `β_i` of every member (with `β_W = 1`) from the linear ratio equations
/// `β_i = Σ g_ij β_j + z Σ h_ijk (X_j β_k + X_k β_j)`, solved in series arithmetic.
pub fn solve_ratios(sol: &SeriesSolution) -> Result<Vec<YSeries>, AsymptError> {
    let sys = &sol.system;
    let prec = sys.prec;
    let n = sys.names.len();
    let one = YSeries::one(prec);
    let mut a = vec![vec![YSeries::zero(prec); n + 1]; n];
    let put = |a: &mut Vec<Vec<YSeries>>, i: usize, s: Slot, c: &YSeries| match s {
        Slot::Member(j) => a[i][j] = &a[i][j] + c,
        Slot::W => a[i][n] = &a[i][n] - c,
    };
    for (i, e) in sys.eqs.iter().enumerate() {
        a[i][i] = &a[i][i] - &one;
        for (j, c) in &e.g {
            put(&mut a, i, *j, c);
        }
        for (j, k, c) in &e.h {
            // z·X_j = x_j/(2+y) is already inside c
            let xj = sys.get(&sol.x, *j, &one);
            let xk = sys.get(&sol.x, *k, &one);
            put(&mut a, i, *k, &(c * xj));
            put(&mut a, i, *j, &(c * xk));
        }
    }
    for c in 0..n {
        let p = (c..n).find(|&r| a[r][c].coeff(0).map_or(false, |v| v != 0)).ok_or(AsymptError::Singular(0))?;
        a.swap(c, p);
        let piv = a[c][c].inv()?;
        a[c] = a[c].iter().map(|e| (e * &piv).truncate(prec)).collect();
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = a[r][c].clone();
            if f.valuation().is_none() {
                continue;
            }
            let row_c = a[c].clone();
            for (x, y) in a[r].iter_mut().zip(&row_c) {
                *x = (&*x - &(&f * y)).truncate(prec);
            }
        }
    }
    Ok((0..n).map(|i| a[i][n].clone()).collect())
}

/// Ratio series targets: `s1`, `sc`, or `<system>-<member>` such as `combined-T`.
pub const RATIO_TARGETS: [&str; 9] =
    ["s1", "sc", "strong-T", "weak-T", "weak-B", "combined-B", "combined-T", "combined-U", "combined-A"];

fn resolve_target(target: &str) -> Result<(SystemSpec, String), AsymptError> {
    let unknown = || AsymptError::UnknownTarget(target.to_string());
    match target {
        "s1" => Ok((systems::s1_system(), "S1".into())),
        "sc" => Ok((systems::sc_system(), "Sc".into())),
        _ => {
            let (sys, member) = target.split_once('-').ok_or_else(unknown)?;
            let spec = systems::system_by_name(sys).ok_or_else(unknown)?;
            spec.index(member).ok_or_else(unknown)?;
            Ok((spec, member.to_string()))
        }
    }
}

/// Guard orders carried beyond the requested one.
pub const GUARD: i32 = 2;

/// Limit ratio of a target through `y^order` (i.e. through `m^(-order/2)`).
pub fn ratio_series(target: &str, order: i32) -> Result<YSeries, AsymptError> {
    let (spec, member) = resolve_target(target)?;
    let sol = solve_system_series(&spec, order + 1 + GUARD)?;
    let beta = solve_ratios(&sol)?;
    let i = sol.system.names.iter().position(|n| *n == member).unwrap();
    Ok(beta[i].truncate(order + 1))
}

/// All ratios of one system, keyed by member.
pub fn system_ratios(spec: &SystemSpec, order: i32) -> Result<BTreeMap<String, YSeries>, AsymptError> {
    let sol = solve_system_series(spec, order + 1 + GUARD)?;
    let beta = solve_ratios(&sol)?;
    Ok(sol.system.names.iter().cloned().zip(beta.into_iter().map(|b| b.truncate(order + 1))).collect())
}

/// Values `X(s₀)` of one system, keyed by member, through `y^order` (i.e. through `m^(-order/2)`).
pub fn system_values(spec: &SystemSpec, order: i32) -> Result<BTreeMap<String, YSeries>, AsymptError> {
    let sol = solve_system_series(spec, order + 2 + GUARD)?;
    Ok(sol.system.names.iter().cloned().zip(sol.x.iter().map(|x| x.shift(-1).truncate(order + 1))).collect())
}

/// Strong 𝒮₁-categories at `s₀` from the closed forms
/// `T = (Q − √(Q² − 4zS_c(1−zW)))/(2z(1−zW))`, `Q = 1 − z² + zS_c − zW`,
/// `A = zT/(1 − zT)`, `U = (mz − S_c + zA(W − T))/(1 − z − zW)`.
#[derive(Clone, Debug)]
pub struct StrongValues {
    pub t: YSeries,
    pub a: YSeries,
    pub u: YSeries,
}

pub fn strong_by_radicals(prec: i32) -> Result<StrongValues, AsymptError> {
    // work with extra room: the radical loses two orders to the cancellation
    let p = prec + 4;
    let sub = Subst::new(p);
    let z = &sub.z;
    let one = YSeries::one(p);
    let w = YSeries::monomial(1, -1, p);
    let m = YSeries::monomial(1, -2, p);
    let zw = (z * &w).truncate(p);
    let z2 = z * z;
    // S_c(1 + z² − zW) = mz³
    let sc = (&(&m * &(&z2 * z)).truncate(p)).div(&(&(&one + &z2) - &zw))?;
    let q = &(&(&one - &z2) + &(z * &sc)) - &zw;
    let one_zw = &one - &zw;
    let disc = &(&q * &q) - &(&(z * &sc) * &one_zw).scale(&Rational::from(4));
    let root = disc.sqrt()?;
    let den = (z * &one_zw).scale(&Rational::from(2));
    let num = [&q - &root, &q + &root]
        .into_iter()
        .find(|n| n.coeff(0).map_or(false, |c| c == 0))
        .ok_or(AsymptError::Branch)?;
    let t = num.div(&den)?;
    let zt = z * &t;
    let a = zt.div(&(&one - &zt))?;
    let u_num = &(&(&m * z) - &sc) + &(&(z * &a) * &(&w - &t));
    let u = u_num.div(&(&(&one - z) - &zw))?;
    Ok(StrongValues { t: t.truncate(prec), a: a.truncate(prec), u: u.truncate(prec) })
}

/// Values of the strong system through `y^order`, by radicals and by the order-by-order
/// solver; errors if the two disagree.
pub fn strong_simple_values(order: i32) -> Result<StrongValues, AsymptError> {
    let rad = strong_by_radicals(order + 1)?;
    let solved = system_values(&systems::strong_system(), order)?;
    for (name, s) in [("T", &rad.t), ("A", &rad.a), ("U", &rad.u)] {
        if solved[name] != *s {
            return Err(AsymptError::Residual { name: name.into(), order });
        }
    }
    Ok(rad)
}

/// Strong-T ratio from the quotient `(T − 1/s₀)(T + γ/s₀) / (T(√m+1) + A − √m(2√m+3))`,
/// with `γ` the S_c ratio.
pub fn strong_t_ratio_by_quotient(order: i32) -> Result<YSeries, AsymptError> {
    let p = order + 1 + GUARD + 2;
    let v = strong_by_radicals(p)?;
    let gamma = ratio_series("sc", p - 1)?;
    let inv_s0 = YSeries::from_coeffs(-1, vec![Rational::from(2), Rational::from(1)], p);
    let sqrt_m = YSeries::monomial(1, -1, p);
    let one = YSeries::one(p);
    let num = &(&v.t - &inv_s0) * &(&v.t + &(&gamma * &inv_s0));
    let den = &(&(&v.t * &(&sqrt_m + &one)) + &v.a) - &(&sqrt_m * &(&sqrt_m.scale(&Rational::from(2)) + &YSeries::constant(3, p)));
    Ok(num.div(&den)?.truncate(order + 1))
}

/// `m(4m+6√m+3)/((√m+1)²(2m+3√m+2)²) = y²(4+6y+3y²)/((1+y)²(2+3y+2y²)²)`.
pub fn s1_ratio_closed_form(order: i32) -> YSeries {
    let p = order + 1;
    let poly = |c: &[i64]| YSeries::from_coeffs(0, c.iter().map(|&v| Rational::from(v)).collect(), p);
    let q = poly(&[2, 3, 2]);
    let den = &(&poly(&[1, 1]) * &poly(&[1, 1])) * &(&q * &q);
    (&poly(&[4, 6, 3]).shift(2)).div(&den).unwrap().truncate(p)
}

/// `m/(2m+3√m+2)² = y²/(2+3y+2y²)²`.
pub fn sc_ratio_closed_form(order: i32) -> YSeries {
    let p = order + 1;
    let q = YSeries::from_coeffs(0, vec![2, 3, 2].into_iter().map(Rational::from).collect(), p);
    YSeries::monomial(1, 2, p).div(&(&q * &q)).unwrap().truncate(p)
}

/// Two-sided bound on the tautology density from the combined categories.
#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub lower: YSeries,
    pub upper: YSeries,
}

pub fn bounds_report(order: i32) -> Result<BoundsReport, AsymptError> {
    let r = system_ratios(&systems::combined_system(), order)?;
    let lower = r["T"].clone();
    let upper = &YSeries::one(order + 1) - &r["A"];
    Ok(BoundsReport { lower, upper })
}

impl BoundsReport {
    pub fn at(&self, m: u32, prec: u32) -> (Float, Float) {
        let mf = Float::with_val(prec, m);
        (self.lower.eval_at_m(&mf), self.upper.eval_at_m(&mf))
    }

    pub fn to_json(&self, ms: &[u32], prec: u32) -> Value {
        let inst: Vec<Value> = ms
            .iter()
            .map(|&m| {
                let (lo, up) = self.at(m, prec);
                json!({ "m": m, "lower": lo.to_f64(), "upper": up.to_f64() })
            })
            .collect();
        json!({
            "lower": self.lower.to_json(),
            "upper": self.upper.to_json(),
            "lower_text": self.lower.render_m(),
            "upper_text": self.upper.render_m(),
            "at": inst,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn s0_expansion() {
        let s = Subst::new(6);
        let want = [q(0, 1), q(1, 2), q(-1, 4), q(1, 8), q(-1, 16), q(1, 32)];
        for (k, w) in want.iter().enumerate() {
            assert_eq!(s.z.coeff(k as i32).unwrap(), *w);
        }
    }

    #[test]
    fn arithmetic() {
        let p = 8;
        let y = YSeries::y(p);
        let inv_y = YSeries::monomial(1, -1, p);
        let prod = &inv_y * &y;
        assert_eq!(prod.terms(), vec![(0, q(1, 1))]);
        let sq = YSeries::from_coeffs(0, vec![q(1, 1), q(-2, 1), q(1, 1)], p);
        let r = sq.sqrt().unwrap();
        assert_eq!(r.terms(), vec![(0, q(1, 1)), (1, q(-1, 1))]);
        assert!(matches!(y.sqrt(), Err(AsymptError::OddOrder(1))));
        assert!(matches!(YSeries::constant(2, p).sqrt(), Err(AsymptError::NonSquare(_))));
        assert_eq!(YSeries::zero(p).inv(), Err(AsymptError::DivisionByZero));
        // (1 + y)/(1 + y) = 1 to the tracked order
        let a = YSeries::from_coeffs(0, vec![q(1, 1), q(1, 1)], p);
        let one = a.div(&a).unwrap();
        assert_eq!(one.terms(), vec![(0, q(1, 1))]);
        assert_eq!(one.prec(), p);
    }

    #[test]
    fn order_tracking() {
        let a = YSeries::from_coeffs(-1, vec![q(1, 1), q(1, 1)], 3);
        let b = YSeries::from_coeffs(2, vec![q(1, 1)], 6);
        // known through y^2 from a, through y^(-1+6) from b → min = 5
        assert_eq!((&a * &b).prec(), 5);
        assert_eq!((&a + &b).prec(), 3);
        assert!(a.coeff(3).is_err());
    }

    #[test]
    fn rendering() {
        let s = YSeries::from_coeffs(2, vec![q(1, 1), q(-7, 4), q(5, 4)], 5);
        assert_eq!(s.render_m(), "1/m - 7/4*m^-3/2 + 5/4*m^-2 + O(m^-5/2)");
        let u = YSeries::from_coeffs(0, vec![q(1, 1), q(0, 1), q(-1, 1)], 3);
        assert_eq!(u.render_m(), "1 - 1/m + O(m^-3/2)");
        let v = YSeries::from_coeffs(-1, vec![q(1, 1)], 0);
        assert_eq!(v.render_m(), "m^1/2 + O(1)");
        let j = s.to_json();
        assert_eq!(j["order_num"], -5);
        assert_eq!(j["order_den"], 2);
        assert_eq!(j["coeffs"][1], json!(["-3", -7, 4]));
    }

    #[test]
    fn closed_forms_match_solver() {
        assert_eq!(ratio_series("s1", 6).unwrap(), s1_ratio_closed_form(6));
        assert_eq!(ratio_series("sc", 6).unwrap(), sc_ratio_closed_form(6));
    }

    #[test]
    fn unknown_targets() {
        assert!(matches!(ratio_series("nope", 4), Err(AsymptError::UnknownTarget(_))));
        assert!(matches!(ratio_series("weak-Q", 4), Err(AsymptError::UnknownTarget(_))));
    }

    #[test]
    fn radicals_agree_with_solver() {
        strong_simple_values(6).unwrap();
    }

    #[test]
    fn residuals_vanish() {
        for name in systems::SYSTEM_NAMES {
            let sol = solve_system_series(&systems::system_by_name(name).unwrap(), 9).unwrap();
            assert_eq!(sol.residual_clean_through(), 8, "{name}");
        }
    }
}
