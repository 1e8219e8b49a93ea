//! Quadratic systems `A_i = f_i + Σ g_ij A_j + h Σ h_ijk A_j A_k` over a base
//! equation `Z = f + gZ + hZ²` with radius `r`, and the s-cut fixed-point method
//! that approximates the limit ratios `β_i = lim [zⁿ]A_i / [zⁿ]Z`.

use std::collections::BTreeMap;

use rug::Float;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::count::{self, CoeffTable};
use crate::logic::{full_mask, num_classes};
use crate::numeric::{decimal_trunc, digits_for, max_abs, solve_linear};
use crate::systems::{self, SystemSpec};

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("truncation depth {have} below cut depth {need}")]
    Depth { need: usize, have: usize },
    #[error("discriminant {0} is negative")]
    NegativeDiscriminant(f64),
    #[error("γ = 1 has no γ-conversion")]
    GammaOne,
    #[error("singular linear system")]
    Singular,
    #[error("natural-partition check failed: {0}")]
    Partition(String),
    #[error("no convergence for values at the radius: residual {0:e}")]
    Values(f64),
    #[error(transparent)]
    Count(#[from] count::CountError),
}

/// Power series by coefficients (index = power).
pub type Series = Vec<Float>;

fn eval(series: &[Float], x: &Float) -> Float {
    let mut acc = Float::with_val(x.prec(), 0u32);
    for c in series.iter().rev() {
        acc *= x;
        acc += c;
    }
    acc
}

fn eval_upto(series: &[Float], x: &Float, s: usize) -> Float {
    eval(&series[..series.len().min(s + 1)], x)
}

/// The base equation `Z = f + gZ + hZ²`.
#[derive(Clone, Debug)]
pub struct BaseSpec {
    pub f: Series,
    pub g: Series,
    pub h: Series,
    /// Limit ratio of `f_n / Z_n`.
    pub gamma: Float,
    pub r: Float,
    /// Coefficients of `Z` as far as known.
    pub z: Series,
    /// Closed-form `Z(r)` when available.
    pub z_at_r: Option<Float>,
}

impl BaseSpec {
    pub fn prec(&self) -> u32 {
        self.r.prec()
    }

    /// The all-formulae equation `W = mz + zW + zW²` at `s₀`, with `depth` coefficients.
    pub fn formulas(m: u32, depth: usize, prec: u32) -> BaseSpec {
        let w = count::w_coefficients(m, depth);
        let f0 = |v: u32| Float::with_val(prec, v);
        BaseSpec {
            f: vec![f0(0), f0(m)],
            g: vec![f0(0), f0(1)],
            h: vec![f0(0), f0(1)],
            gamma: f0(0),
            r: crate::numeric::s0(prec, m),
            z: w.iter().map(|c| Float::with_val(prec, c)).collect(),
            z_at_r: Some(Float::with_val(prec, m).sqrt()),
        }
    }

    pub fn g_r(&self) -> Float {
        eval(&self.g, &self.r)
    }

    pub fn h_r(&self) -> Float {
        eval(&self.h, &self.r)
    }

    pub fn z_trunc(&self, s: usize) -> Result<Float, QuadError> {
        if self.z.len() <= s {
            return Err(QuadError::Depth { need: s, have: self.z.len().saturating_sub(1) });
        }
        Ok(eval_upto(&self.z, &self.r, s))
    }

    pub fn z_r(&self) -> Float {
        self.z_at_r.clone().unwrap_or_else(|| eval(&self.z, &self.r))
    }

    /// `f(r)`. Converted bases carry multiples of `Z` in `f`; those use `Z(r)`.
    pub fn f_r(&self) -> Float {
        eval(&self.f, &self.r)
    }
}

/// `ζ_s = 1 − γ − g(r) − 2h(r)Z^{≤s}(r)`.
pub fn zeta_s(base: &BaseSpec, s: usize) -> Result<Float, QuadError> {
    let p = base.prec();
    let zt = base.z_trunc(s)?;
    Ok(Float::with_val(p, 1u32) - &base.gamma - base.g_r() - base.h_r() * zt * 2u32)
}

/// `√((1 − g(r))² − 4 f(r) h(r)) − γ`, the limit of `ζ_s`.
pub fn impurity(base: &BaseSpec) -> Result<Float, QuadError> {
    let p = base.prec();
    let one_g = Float::with_val(p, 1u32) - base.g_r();
    let disc = Float::with_val(p, one_g.square_ref()) - base.f_r() * base.h_r() * 4u32;
    let tol = Float::with_val(p, 1u32) >> (p / 2);
    if disc < 0 {
        if Float::with_val(p, -&disc) > tol {
            return Err(QuadError::NegativeDiscriminant(disc.to_f64()));
        }
        return Ok(Float::with_val(p, 0u32) - &base.gamma);
    }
    Ok(disc.sqrt() - &base.gamma)
}

fn scale_series(s: &[Float], c: &Float) -> Series {
    s.iter().map(|x| Float::with_val(x.prec(), x * c)).collect()
}

fn add_series(a: &[Float], b: &[Float]) -> Series {
    let p = a.first().or(b.first()).map_or(64, |x| x.prec());
    (0..a.len().max(b.len()))
        .map(|i| {
            let mut v = Float::with_val(p, 0u32);
            if let Some(x) = a.get(i) {
                v += x;
            }
            if let Some(x) = b.get(i) {
                v += x;
            }
            v
        })
        .collect()
}

/// Rewrites the base so its f-ratio becomes `γ̂`:
/// `f̂ = ((1−γ̂)/(1−γ)) f + ((γ̂−γ)/(1−γ)) Z`, `ĝ`, `ĥ` scaled by `(1−γ̂)/(1−γ)`.
pub fn gamma_convert(base: &BaseSpec, gamma_hat: &Float) -> Result<BaseSpec, QuadError> {
    let p = base.prec();
    let one_g = Float::with_val(p, 1u32) - &base.gamma;
    if one_g.is_zero() {
        return Err(QuadError::GammaOne);
    }
    let c = (Float::with_val(p, 1u32) - gamma_hat) / &one_g;
    let d = Float::with_val(p, gamma_hat - &base.gamma) / &one_g;
    Ok(BaseSpec {
        f: add_series(&scale_series(&base.f, &c), &scale_series(&base.z, &d)),
        g: scale_series(&base.g, &c),
        h: scale_series(&base.h, &c),
        gamma: gamma_hat.clone(),
        r: base.r.clone(),
        z: base.z.clone(),
        z_at_r: base.z_at_r.clone(),
    })
}

/// Moves a polynomial `δ` from `g` into `f`: `f̃ = f + δZ`, `g̃ = g − δ`, `γ̃ = γ + δ(r)`.
pub fn delta_convert(base: &BaseSpec, delta: &[Float]) -> BaseSpec {
    let p = base.prec();
    let mut dz = vec![Float::with_val(p, 0u32); base.z.len() + delta.len()];
    for (i, d) in delta.iter().enumerate() {
        for (j, z) in base.z.iter().enumerate() {
            dz[i + j] += Float::with_val(p, d * z);
        }
    }
    dz.truncate(base.z.len());
    let neg: Series = delta.iter().map(|d| Float::with_val(p, -d)).collect();
    BaseSpec {
        f: add_series(&base.f, &dz),
        g: add_series(&base.g, &neg),
        h: base.h.clone(),
        gamma: Float::with_val(p, &base.gamma + eval(delta, &base.r)),
        r: base.r.clone(),
        z: base.z.clone(),
        z_at_r: base.z_at_r.clone(),
    }
}

/// Quadratic coupling `h_ijk` at the radius.
#[derive(Clone, Debug)]
pub enum Coupling {
    /// Explicit `(i, j, k, h_ijk(r))` entries.
    Sparse(Vec<(usize, usize, usize, Float)>),
    /// Falsity classes: `h_ijk = 1` iff `k & !j == i`. Bilinear forms are evaluated
    /// through superset/subset-sum transforms.
    Falsity { m: u32 },
}

#[derive(Clone, Debug)]
pub struct QuadSystem {
    pub name: String,
    pub names: Vec<String>,
    pub base: BaseSpec,
    pub gamma: Vec<Float>,
    /// `f_i(r)`.
    pub f_r: Vec<Float>,
    /// Sparse rows of `g_ij(r)`.
    pub g: Vec<Vec<(usize, Float)>>,
    pub coupling: Coupling,
    /// Coefficients of each member, for the cut sums `A_j^{≤s}(r)`.
    pub trunc: Vec<Series>,
    /// The members form a natural partition of the base.
    pub natural: bool,
    /// Index of the member that is the base series itself, if any.
    pub base_member: Option<usize>,
}

impl QuadSystem {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn prec(&self) -> u32 {
        self.base.prec()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn zero(&self) -> Float {
        Float::with_val(self.prec(), 0u32)
    }

    /// Calls `visit(i, j, k, h_ijk)` for every nonzero coupling.
    pub fn for_each_coupling(&self, mut visit: impl FnMut(usize, usize, usize, &Float)) {
        match &self.coupling {
            Coupling::Sparse(v) => {
                for (i, j, k, c) in v {
                    visit(*i, *j, *k, c);
                }
            }
            Coupling::Falsity { m } => {
                let one = Float::with_val(self.prec(), 1u32);
                let n = num_classes(*m);
                for j in 0..n {
                    for k in 0..n {
                        visit(k & !j, j, k, &one);
                    }
                }
            }
        }
    }

    /// `Σ_{j,k} h_ijk u_j v_k` for every `i`.
    pub fn bilinear(&self, u: &[Float], v: &[Float]) -> Vec<Float> {
        let p = self.prec();
        match &self.coupling {
            Coupling::Sparse(list) => {
                let mut out = vec![self.zero(); self.len()];
                for (i, j, k, c) in list {
                    out[*i] += Float::with_val(p, &u[*j] * &v[*k]) * c;
                }
                out
            }
            Coupling::Falsity { m } => falsity_bilinear(*m, u, v),
        }
    }

    pub fn truncations_at(&self, s: usize) -> Result<Vec<Float>, QuadError> {
        self.trunc
            .iter()
            .map(|t| {
                if t.len() <= s {
                    Err(QuadError::Depth { need: s, have: t.len().saturating_sub(1) })
                } else {
                    Ok(eval_upto(t, &self.base.r, s))
                }
            })
            .collect()
    }

    fn linear(&self, x: &[Float]) -> Vec<Float> {
        let p = self.prec();
        self.g
            .iter()
            .map(|row| {
                let mut acc = Float::with_val(p, 0u32);
                for (j, c) in row {
                    acc += Float::with_val(p, c * &x[*j]);
                }
                acc
            })
            .collect()
    }
}

fn falsity_bilinear(m: u32, u: &[Float], v: &[Float]) -> Vec<Float> {
    // Σ_{k & !j ⊇ S} u_j v_k = (Σ_{j ⊆ Sᶜ} u_j)(Σ_{k ⊇ S} v_k), then invert the superset sum.
    let n = num_classes(m);
    let full = full_mask(m) as usize;
    let mut lo: Vec<Float> = u.to_vec();
    let mut up: Vec<Float> = v.to_vec();
    let mut bit = 1;
    while bit < n {
        for t in 0..n {
            if t & bit != 0 {
                let a = lo[t ^ bit].clone();
                lo[t] += a;
            } else {
                let b = up[t | bit].clone();
                up[t] += b;
            }
        }
        bit <<= 1;
    }
    let mut w: Vec<Float> = (0..n).map(|s| Float::with_val(u[0].prec(), &lo[full & !s] * &up[s])).collect();
    let mut bit = 1;
    while bit < n {
        for t in 0..n {
            if t & bit == 0 {
                let b = w[t | bit].clone();
                w[t] -= b;
            }
        }
        bit <<= 1;
    }
    w
}

/// Precomputed per-depth data of the cut operator.
#[derive(Clone, Debug)]
pub struct Cut {
    pub s: usize,
    pub zeta: Float,
    pub h_r: Float,
    pub a: Vec<Float>,
}

impl Cut {
    pub fn new(sys: &QuadSystem, s: usize) -> Result<Cut, QuadError> {
        Ok(Cut { s, zeta: zeta_s(&sys.base, s)?, h_r: sys.base.h_r(), a: sys.truncations_at(s)? })
    }
}

/// `c_i = γ_i + Σ g_ij x_j + Σ h(r) h_ijk (A_j^{≤s} x_k + A_k^{≤s} x_j) + ζ_s Σ h_ijk x_j x_k`.
pub fn apply_cut(sys: &QuadSystem, cut: &Cut, x: &[Float]) -> Result<Vec<Float>, QuadError> {
    if x.len() != sys.len() {
        return Err(QuadError::Dimension { expected: sys.len(), got: x.len() });
    }
    let p = sys.prec();
    let lin = sys.linear(x);
    let ax = sys.bilinear(&cut.a, x);
    let xa = sys.bilinear(x, &cut.a);
    let xx = sys.bilinear(x, x);
    Ok((0..sys.len())
        .map(|i| {
            let mut c = Float::with_val(p, &sys.gamma[i] + &lin[i]);
            c += Float::with_val(p, &ax[i] + &xa[i]) * &cut.h_r;
            c += Float::with_val(p, &xx[i] * &cut.zeta);
            c
        })
        .collect())
}

pub fn apply_cut_operator(sys: &QuadSystem, s: usize, x: &[Float]) -> Result<Vec<Float>, QuadError> {
    apply_cut(sys, &Cut::new(sys, s)?, x)
}

#[derive(Clone, Debug)]
pub enum Shift {
    None,
    Standard,
    Custom(Float),
}

#[derive(Clone, Debug)]
pub struct CutConfig {
    pub s: usize,
    pub shift: Shift,
    pub tolerance: Float,
    pub max_iterations: usize,
    pub start: Vec<Float>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Hyperplane {
    /// Σx = 1
    Unit,
    /// Σx = γ/ζ_s
    Alternative,
    Neither,
}

#[derive(Clone, Debug)]
pub struct IterResult {
    pub x: Vec<Float>,
    pub iterations: usize,
    pub converged: bool,
    /// ‖C_s(x) − x‖∞ at the returned point.
    pub residual: Float,
    pub sigma: Float,
    pub zeta: Float,
    pub hyperplane: Hyperplane,
}

pub fn standard_sigma(sys: &QuadSystem, zeta: &Float) -> Float {
    let p = sys.prec();
    (Float::with_val(p, 1u32) - &sys.base.gamma + zeta) / sys.len() as u32
}

/// `x ← C_s(x) − σ(Σx − 1)·𝟙` until the step is below tolerance.
pub fn shifted_iterate(sys: &QuadSystem, cfg: &CutConfig) -> Result<IterResult, QuadError> {
    let p = sys.prec();
    let cut = Cut::new(sys, cfg.s)?;
    let sigma = match &cfg.shift {
        Shift::None => Float::with_val(p, 0u32),
        Shift::Standard => standard_sigma(sys, &cut.zeta),
        Shift::Custom(v) => v.clone(),
    };
    let mut x = cfg.start.clone();
    if x.len() != sys.len() {
        return Err(QuadError::Dimension { expected: sys.len(), got: x.len() });
    }
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let c = apply_cut(sys, &cut, &x)?;
        let sum: Float = Float::with_val(p, Float::sum(x.iter())) - 1u32;
        let shift = Float::with_val(p, &sum * &sigma);
        let next: Vec<Float> = c.into_iter().map(|v| v - &shift).collect();
        let step: Vec<Float> = next.iter().zip(&x).map(|(a, b)| Float::with_val(p, a - b)).collect();
        x = next;
        if !x.iter().all(|v| v.is_finite()) {
            break;
        }
        if max_abs(&step) < cfg.tolerance {
            converged = true;
            break;
        }
    }
    let c = apply_cut(sys, &cut, &x)?;
    let diff: Vec<Float> = c.iter().zip(&x).map(|(a, b)| Float::with_val(p, a - b)).collect();
    let residual = max_abs(&diff);
    let total = Float::with_val(p, Float::sum(x.iter()));
    let near = |a: &Float, b: &Float| Float::with_val(p, a - b).abs() < Float::with_val(p, &cfg.tolerance * 1000u32);
    let one = Float::with_val(p, 1u32);
    let hyperplane = if near(&total, &one) {
        Hyperplane::Unit
    } else if !cut.zeta.is_zero() && near(&total, &(Float::with_val(p, &sys.base.gamma / &cut.zeta))) {
        Hyperplane::Alternative
    } else {
        Hyperplane::Neither
    };
    Ok(IterResult { x, iterations, converged, residual, sigma, zeta: cut.zeta, hyperplane })
}

/// Default configuration: standard shift, start at `e_start`.
pub fn default_config(sys: &QuadSystem, s: usize, start: usize, tolerance: Float, max_iterations: usize) -> CutConfig {
    let p = sys.prec();
    let mut x = vec![Float::with_val(p, 0u32); sys.len()];
    x[start] = Float::with_val(p, 1u32);
    CutConfig { s, shift: Shift::Standard, tolerance, max_iterations, start: x }
}

/// Category systems: no shift, start at the base member, which the cut operator keeps at 1.
pub fn category_config(sys: &QuadSystem, s: usize, tolerance: Float, max_iterations: usize) -> Option<CutConfig> {
    let w = sys.base_member?;
    let mut cfg = default_config(sys, s, w, tolerance, max_iterations);
    cfg.shift = Shift::None;
    Some(cfg)
}

/// Dense Jacobian of the (unshifted) cut operator.
pub fn jacobian(sys: &QuadSystem, s: usize, x: &[Float]) -> Result<Vec<Vec<Float>>, QuadError> {
    let cut = Cut::new(sys, s)?;
    let p = sys.prec();
    let n = sys.len();
    let mut j = vec![vec![Float::with_val(p, 0u32); n]; n];
    for (i, row) in sys.g.iter().enumerate() {
        for (c, v) in row {
            j[i][*c] += v;
        }
    }
    sys.for_each_coupling(|i, a, b, h| {
        // ∂/∂x_b of h_iab(h(r)(A_a x_b + A_b x_a) + ζ x_a x_b), and symmetrically for a
        let lin_b = Float::with_val(p, &cut.a[a] * &cut.h_r) + Float::with_val(p, &cut.zeta * &x[a]);
        let lin_a = Float::with_val(p, &cut.a[b] * &cut.h_r) + Float::with_val(p, &cut.zeta * &x[b]);
        j[i][b] += lin_b * h;
        j[i][a] += lin_a * h;
    });
    Ok(j)
}

/// Maximum absolute column sum.
pub fn one_norm(j: &[Vec<Float>]) -> Float {
    let p = j[0][0].prec();
    let mut best = Float::with_val(p, 0u32);
    for c in 0..j[0].len() {
        let mut s = Float::with_val(p, 0u32);
        for row in j {
            s += Float::with_val(p, row[c].abs_ref());
        }
        if s > best {
            best = s;
        }
    }
    best
}

/// Closed form `1 − ζ_s − γ + 2ζ_s Σx` of the Jacobian 1-norm for nonnegative natural
/// partitions at nonnegative `x`.
pub fn jacobian_one_norm(sys: &QuadSystem, s: usize, x: &[Float]) -> Result<Float, QuadError> {
    let p = sys.prec();
    let zeta = zeta_s(&sys.base, s)?;
    let sum = Float::with_val(p, Float::sum(x.iter()));
    Ok(Float::with_val(p, 1u32) - &zeta - &sys.base.gamma + zeta * sum * 2u32)
}

#[derive(Clone, Debug)]
pub enum Normalization {
    /// Σβ = 1
    SumOne,
    /// β of the given member = 1
    Member(usize),
}

/// Solves `β_i = γ_i + Σ g_ij β_j + Σ h(r) h_ijk (A_j(r) β_k + A_k(r) β_j)`. A homogeneous
/// system gets the normalization row appended.
pub fn ratio_linear_solve(sys: &QuadSystem, values: &[Float], norm: Normalization) -> Result<Vec<Float>, QuadError> {
    let n = sys.len();
    if values.len() != n {
        return Err(QuadError::Dimension { expected: n, got: values.len() });
    }
    let p = sys.prec();
    let hr = sys.base.h_r();
    let mut a = vec![vec![Float::with_val(p, 0u32); n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = Float::with_val(p, 1u32);
    }
    for (i, row) in sys.g.iter().enumerate() {
        for (c, v) in row {
            a[i][*c] -= v;
        }
    }
    sys.for_each_coupling(|i, j, k, h| {
        let c = Float::with_val(p, h * &hr);
        a[i][k] -= Float::with_val(p, &c * &values[j]);
        a[i][j] -= Float::with_val(p, &c * &values[k]);
    });
    let mut b = sys.gamma.clone();
    if sys.gamma.iter().all(|g| g.is_zero()) {
        let row = match norm {
            Normalization::SumOne => vec![Float::with_val(p, 1u32); n],
            Normalization::Member(idx) => {
                let mut r = vec![Float::with_val(p, 0u32); n];
                r[idx] = Float::with_val(p, 1u32);
                r
            }
        };
        a.push(row);
        b.push(Float::with_val(p, 1u32));
    }
    solve_linear(a, b).ok_or(QuadError::Singular)
}

/// Natural-partition identities at the radius: Σγ_i = γ, Σf_i(r) = f(r), column sums of
/// g equal g(r), and Σ_i (h_ijk + h_ikj) = 2 for every pair.
pub fn validate_natural_partition(sys: &QuadSystem) -> Result<(), QuadError> {
    let p = sys.prec();
    let n = sys.len();
    let tol = Float::with_val(p, 1u32) >> (p / 2);
    let close = |a: &Float, b: &Float| Float::with_val(p, a - b).abs() <= tol;
    let gsum = Float::with_val(p, Float::sum(sys.gamma.iter()));
    if !close(&gsum, &sys.base.gamma) {
        return Err(QuadError::Partition("Σγ_i ≠ γ".into()));
    }
    let fsum = Float::with_val(p, Float::sum(sys.f_r.iter()));
    if !close(&fsum, &sys.base.f_r()) {
        return Err(QuadError::Partition("Σf_i ≠ f".into()));
    }
    let mut col = vec![Float::with_val(p, 0u32); n];
    for row in &sys.g {
        for (c, v) in row {
            col[*c] += v;
        }
    }
    let g_r = sys.base.g_r();
    if let Some(j) = col.iter().position(|c| !close(c, &g_r)) {
        return Err(QuadError::Partition(format!("column {j} of g does not sum to g(r)")));
    }
    let mut pair = vec![Float::with_val(p, 0u32); n * n];
    sys.for_each_coupling(|_, j, k, h| {
        pair[j * n + k] += h;
        pair[k * n + j] += h;
    });
    let two = Float::with_val(p, 2u32);
    if let Some(ix) = pair.iter().position(|v| !close(v, &two)) {
        return Err(QuadError::Partition(format!("pair ({}, {}) has weight ≠ 2", ix / n, ix % n)));
    }
    Ok(())
}

/// One member per falsity class, `h_ijk = 1` iff `k & !j = i`, `g_ij = z` iff `j = iᶜ`.
pub fn build_falsity_system(m: u32, table: &CoeffTable, prec: u32) -> Result<QuadSystem, QuadError> {
    if table.m != m {
        return Err(QuadError::Dimension { expected: m as usize, got: table.m as usize });
    }
    let n = num_classes(m);
    let full = full_mask(m) as usize;
    let base = BaseSpec::formulas(m, table.n_max, prec);
    let r = base.r.clone();
    let zero = Float::with_val(prec, 0u32);
    let mut f_r = vec![zero.clone(); n];
    for i in 0..m {
        f_r[crate::logic::var_mask(i, m).0 as usize] += &r;
    }
    let sys = QuadSystem {
        name: format!("falsity-m{m}"),
        names: (0..n).map(|i| i.to_string()).collect(),
        gamma: vec![zero; n],
        f_r,
        g: (0..n).map(|i| vec![(full & !i, r.clone())]).collect(),
        coupling: Coupling::Falsity { m },
        trunc: table.counts.iter().map(|row| row.iter().map(|c| Float::with_val(prec, c)).collect()).collect(),
        natural: true,
        base_member: None,
        base,
    };
    validate_natural_partition(&sys)?;
    Ok(sys)
}

fn poly_at(p: &[systems::MzTerm], m: u32, z: &Float) -> Float {
    let coeffs = systems::z_poly_at(p, m);
    let fl: Vec<Float> = coeffs.iter().map(|&c| Float::with_val(z.prec(), c)).collect();
    eval(&fl, z)
}

/// A category system at a fixed m with the base series appended as member "W".
/// Cut truncations come from the exact coefficients up to `depth`.
pub fn build_category_system(m: u32, spec: &SystemSpec, depth: usize, prec: u32) -> Result<QuadSystem, QuadError> {
    let base = BaseSpec::formulas(m, depth, prec);
    let r = base.r.clone();
    let mut names: Vec<String> = spec.names().iter().map(|s| s.to_string()).collect();
    names.push(systems::W.to_string());
    let n = names.len();
    let w_idx = n - 1;
    let idx = |name: &str| if name == systems::W { w_idx } else { spec.index(name).unwrap() };
    let zero = Float::with_val(prec, 0u32);
    let mut f_r = vec![zero.clone(); n];
    let mut g: Vec<Vec<(usize, Float)>> = vec![Vec::new(); n];
    let mut coupling = Vec::new();
    for (i, e) in spec.equations.iter().enumerate() {
        f_r[i] = poly_at(&e.f, m, &r);
        for (j, p) in &e.g {
            g[i].push((idx(j), poly_at(p, m, &r)));
        }
        for (j, k, p) in &e.h {
            coupling.push((i, idx(j), idx(k), poly_at(p, m, &r)));
        }
    }
    f_r[w_idx] = Float::with_val(prec, &r * m);
    g[w_idx].push((w_idx, r.clone()));
    coupling.push((w_idx, w_idx, w_idx, Float::with_val(prec, 1u32)));

    let coeffs = count::system_coefficients(spec, m, depth);
    let trunc = names
        .iter()
        .map(|nm| coeffs[nm.as_str()].iter().map(|c| Float::with_val(prec, c)).collect())
        .collect();
    Ok(QuadSystem {
        name: spec.name.to_string(),
        names,
        gamma: vec![zero; n],
        f_r,
        g,
        coupling: Coupling::Sparse(coupling),
        trunc,
        natural: false,
        base_member: Some(w_idx),
        base,
    })
}

/// Values of every member at the radius: the base member is `Z(r)`, the others solve
/// `X = f(r) + G X + h(r) H(X, X)` with the base fixed, by fixed-point sweeps then Newton.
pub fn values_at_radius(sys: &QuadSystem) -> Result<Vec<Float>, QuadError> {
    let p = sys.prec();
    let n = sys.len();
    let hr = sys.base.h_r();
    let mut x = vec![Float::with_val(p, 0u32); n];
    let fixed = sys.base_member;
    if let Some(w) = fixed {
        x[w] = sys.base.z_r();
    }
    let residual = |x: &[Float]| -> Vec<Float> {
        let lin = sys.linear(x);
        let quad = sys.bilinear(x, x);
        (0..n)
            .map(|i| {
                if Some(i) == fixed {
                    return Float::with_val(p, 0u32);
                }
                Float::with_val(p, &sys.f_r[i] + &lin[i]) + Float::with_val(p, &quad[i] * &hr) - &x[i]
            })
            .collect()
    };
    for _ in 0..2000 {
        let r = residual(&x);
        for i in 0..n {
            x[i] += &r[i];
        }
        if max_abs(&r).to_f64() < 1e-12 {
            break;
        }
    }
    let tol = Float::with_val(p, 1u32) >> (p * 3 / 4);
    let free: Vec<usize> = (0..n).filter(|&i| Some(i) != fixed).collect();
    for _ in 0..200 {
        let r = residual(&x);
        if max_abs(&r) <= tol {
            return Ok(x);
        }
        // Jacobian of the residual over the free members
        let mut jac = vec![vec![Float::with_val(p, 0u32); free.len()]; free.len()];
        let pos = |k: usize| free.iter().position(|&f| f == k);
        for (a, &i) in free.iter().enumerate() {
            jac[a][a] -= 1u32;
            for (c, v) in &sys.g[i] {
                if let Some(b) = pos(*c) {
                    jac[a][b] += v;
                }
            }
        }
        sys.for_each_coupling(|i, j, k, h| {
            let Some(a) = pos(i) else { return };
            let c = Float::with_val(p, h * &hr);
            if let Some(b) = pos(k) {
                jac[a][b] += Float::with_val(p, &c * &x[j]);
            }
            if let Some(b) = pos(j) {
                jac[a][b] += Float::with_val(p, &c * &x[k]);
            }
        });
        let rhs: Vec<Float> = free.iter().map(|&i| Float::with_val(p, -&r[i])).collect();
        let dx = solve_linear(jac, rhs).ok_or(QuadError::Singular)?;
        for (a, &i) in free.iter().enumerate() {
            x[i] += &dx[a];
        }
    }
    Err(QuadError::Values(max_abs(&residual(&x)).to_f64()))
}

/// Limit ratios of a category system at a fixed m, normalized by the base member.
pub fn category_ratios(m: u32, spec: &SystemSpec, prec: u32) -> Result<BTreeMap<String, Float>, QuadError> {
    let sys = build_category_system(m, spec, 1, prec)?;
    let vals = values_at_radius(&sys)?;
    let beta = ratio_linear_solve(&sys, &vals, Normalization::Member(sys.base_member.unwrap()))?;
    Ok(sys.names.iter().cloned().zip(beta).collect())
}

pub fn report_json(sys: &QuadSystem, s: usize, res: &IterResult) -> Value {
    let d = digits_for(sys.prec());
    let mut sol = Map::new();
    for (n, v) in sys.names.iter().zip(&res.x) {
        sol.insert(n.clone(), json!(decimal_trunc(v, d)));
    }
    json!({
        "system": sys.name,
        "s": s,
        "sigma": decimal_trunc(&res.sigma, d),
        "zeta_s": decimal_trunc(&res.zeta, d),
        "iterations": res.iterations,
        "converged": res.converged,
        "residual": format!("{:e}", res.residual.to_f64()),
        "solution": sol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::count::class_coefficients;

    fn f(p: u32, v: f64) -> Float {
        Float::with_val(p, v)
    }

    #[test]
    fn zeta_examples() {
        let b = BaseSpec::formulas(1, 10, 128);
        assert!((zeta_s(&b, 0).unwrap().to_f64() - 2.0 / 3.0).abs() < 1e-30);
        let mut prev = zeta_s(&b, 0).unwrap();
        for s in 1..10 {
            let z = zeta_s(&b, s).unwrap();
            assert!(z <= prev);
            prev = z;
        }
        assert!(impurity(&b).unwrap().to_f64().abs() < 1e-30);
    }

    #[test]
    fn impurity_positive_when_fh_lowered() {
        let mut b = BaseSpec::formulas(2, 10, 128);
        b.f[1] = f(128, 1.0);
        assert!(impurity(&b).unwrap() > 0);
        b.h = vec![f(128, 0.0)];
        b.gamma = f(128, 0.0);
        let imp = impurity(&b).unwrap();
        assert!((imp - (Float::with_val(128, 1u32) - b.g_r())).to_f64().abs() < 1e-30);
    }

    #[test]
    fn conversions() {
        let b = BaseSpec::formulas(2, 40, 128);
        let same = gamma_convert(&b, &b.gamma).unwrap();
        assert_eq!(zeta_s(&same, 20).unwrap(), zeta_s(&b, 20).unwrap());
        let d = delta_convert(&b, &[f(128, 0.0)]);
        assert_eq!(zeta_s(&d, 20).unwrap(), zeta_s(&b, 20).unwrap());
        let d = delta_convert(&b, &[f(128, 0.0), f(128, 1.0)]);
        assert!((d.gamma.to_f64() - b.r.to_f64()).abs() < 1e-30);
        let mut one = b.clone();
        one.gamma = f(128, 1.0);
        assert!(matches!(gamma_convert(&one, &f(128, 0.5)), Err(QuadError::GammaOne)));
    }

    #[test]
    fn falsity_transform_matches_sparse() {
        let t = class_coefficients(2, 12).unwrap();
        let sys = build_falsity_system(2, &t, 128).unwrap();
        let mut list = Vec::new();
        sys.for_each_coupling(|i, j, k, h| list.push((i, j, k, h.clone())));
        let mut sparse = sys.clone();
        sparse.coupling = Coupling::Sparse(list);
        let u: Vec<Float> = (0..16).map(|i| f(128, (i as f64 * 0.37).sin())).collect();
        let v: Vec<Float> = (0..16).map(|i| f(128, (i as f64 * 1.1).cos())).collect();
        let a = sys.bilinear(&u, &v);
        let b = sparse.bilinear(&u, &v);
        for (x, y) in a.iter().zip(&b) {
            assert!(Float::with_val(128, x - y).abs().to_f64() < 1e-30);
        }
    }

    #[test]
    fn zero_vector_gives_gamma() {
        let t = class_coefficients(1, 10).unwrap();
        let sys = build_falsity_system(1, &t, 128).unwrap();
        let c = apply_cut_operator(&sys, 10, &vec![f(128, 0.0); 4]).unwrap();
        assert!(c.iter().all(|v| v.is_zero()));
        assert!(matches!(apply_cut_operator(&sys, 10, &[f(128, 0.0)]), Err(QuadError::Dimension { .. })));
        assert!(matches!(apply_cut_operator(&sys, 11, &vec![f(128, 0.0); 4]), Err(QuadError::Depth { .. })));
    }

    #[test]
    fn small_cut_solution() {
        let t = class_coefficients(1, 50).unwrap();
        let sys = build_falsity_system(1, &t, 128).unwrap();
        let cfg = default_config(&sys, 50, 1, f(128, 1e-25), 100_000);
        let r = shifted_iterate(&sys, &cfg).unwrap();
        assert!(r.converged);
        assert_eq!(r.hyperplane, Hyperplane::Unit);
        assert!((r.x[0].to_f64() - 0.4233).abs() < 5e-5);
    }

    #[test]
    fn single_equation_ratios() {
        let s1 = category_ratios(1, &systems::s1_system(), 128).unwrap();
        assert!((s1["S1"].to_f64() - 13.0 / 196.0).abs() < 1e-25);
        let sc = category_ratios(1, &systems::sc_system(), 128).unwrap();
        assert!((sc["Sc"].to_f64() - 1.0 / 49.0).abs() < 1e-25);
    }
}
