//! Limit densities of every falsity class from the values `α_B = I_{−;B}(s₀)` and
//! the square-root weights `β_B` of the block series `I_{−;B}`.
//!
//! `I_{−;B}` counts formulae whose falsity set contains `Bᶜ`. Blocks are solved from
//! the full set downwards; each one depends only on strict supersets.

use rug::Float;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::logic::{full_mask, num_classes, var_mask};
use crate::numeric::{decimal_trunc, digits_for};

pub const MAX_EXACT_VARS: u32 = 4;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("variable count {0} outside 1..={MAX_EXACT_VARS}")]
    VarsOutOfRange(u32),
    #[error("discriminant for block {b:#x} is {d}, below zero beyond tolerance")]
    NegativeDiscriminant { b: u64, d: f64 },
    #[error("discriminant for block {b:#x} vanishes while β↑ = {beta_up} does not")]
    Degenerate { b: u64, beta_up: f64 },
    #[error("classes {a:#x} and {b:#x} overlap")]
    Overlap { a: u64, b: u64 },
}

/// `m_B`: variables whose falsity set, joined with `B`, covers every assignment.
pub fn count_m_b(b: u64, m: u32) -> u32 {
    let full = full_mask(m);
    (0..m).filter(|&i| var_mask(i, m).0 | b == full).count() as u32
}

#[derive(Clone, Debug)]
pub struct BlockRecord {
    pub m_b: u32,
    pub sigma: i32,
    pub alpha_up: Float,
    pub beta_up: Float,
    pub d: Float,
    pub alpha: Float,
    pub beta: Float,
}

#[derive(Clone, Debug)]
pub struct AlphaBetaTable {
    pub m: u32,
    pub precision: u32,
    pub s0: Float,
    /// Indexed by the block bits `B`.
    pub blocks: Vec<BlockRecord>,
    /// Blocks whose `β` was set to 0 at a doubly vanishing discriminant.
    pub flags: Vec<String>,
    /// Tiny negative discriminants clamped to zero.
    pub clamped: usize,
}

fn parity(x: u64) -> i32 {
    if x.count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn solve_alpha_beta(m: u32, prec: u32) -> Result<AlphaBetaTable, ExactError> {
    if m == 0 || m > MAX_EXACT_VARS {
        return Err(ExactError::VarsOutOfRange(m));
    }
    let k = num_classes(m);
    let full = full_mask(m);
    let sq = Float::with_val(prec, m).sqrt();
    let inv_s0 = Float::with_val(prec, &sq * 2u32) + 1u32;
    let s0 = Float::with_val(prec, 1u32) / &inv_s0;
    let tol = Float::with_val(prec, 1u32) >> (prec * 2 / 5);
    let zero = Float::with_val(prec, 0u32);

    let mut order: Vec<u64> = (0..k as u64).collect();
    order.sort_by_key(|&b| (std::cmp::Reverse(b.count_ones()), b));

    let mut alpha = vec![zero.clone(); k];
    let mut beta = vec![zero.clone(); k];
    let mut blocks: Vec<Option<BlockRecord>> = vec![None; k];
    let mut flags = Vec::new();
    let mut clamped = 0;

    for b in order {
        let sigma = parity(b);
        let m_b = count_m_b(b, m);
        if b == full {
            let a = sq.clone();
            let be = (Float::with_val(prec, 2 * m) + &sq).sqrt();
            alpha[b as usize] = a.clone();
            beta[b as usize] = be.clone();
            blocks[b as usize] = Some(BlockRecord {
                m_b,
                sigma,
                alpha_up: zero.clone(),
                beta_up: zero.clone(),
                d: zero.clone(),
                alpha: a,
                beta: be,
            });
            continue;
        }
        let mut au = zero.clone();
        let mut bu = zero.clone();
        let rest = full & !b;
        let mut sub = rest;
        while sub != 0 {
            let bp = (b | sub) as usize;
            if parity(bp as u64) > 0 {
                au += &alpha[bp];
                bu += &beta[bp];
            } else {
                au -= &alpha[bp];
                bu -= &beta[bp];
            }
            sub = (sub - 1) & rest;
        }
        // t = 2√m + 1 − σ − α↑
        let t = Float::with_val(prec, &inv_s0 - sigma) - &au;
        let mut d = Float::with_val(prec, t.square_ref()) - Float::with_val(prec, &au + m_b) * (4 * sigma);
        if d < 0 {
            if Float::with_val(prec, -&d) > tol {
                return Err(ExactError::NegativeDiscriminant { b, d: d.to_f64() });
            }
            clamped += 1;
            d = zero.clone();
        }
        let rd = Float::with_val(prec, d.sqrt_ref());
        let a = Float::with_val(prec, &t - &rd) / (2 * sigma);
        let be = if d <= tol {
            if Float::with_val(prec, bu.abs_ref()) > tol {
                return Err(ExactError::Degenerate { b, beta_up: bu.to_f64() });
            }
            flags.push(format!("block {b:#x}: vanishing discriminant, β set to 0"));
            zero.clone()
        } else {
            let q = (Float::with_val(prec, &inv_s0 + sigma) - &au) / &rd - 1u32;
            Float::with_val(prec, &bu * &q) / (2 * sigma)
        };
        alpha[b as usize] = a.clone();
        beta[b as usize] = be.clone();
        blocks[b as usize] = Some(BlockRecord { m_b, sigma, alpha_up: au, beta_up: bu, d, alpha: a, beta: be });
    }
    Ok(AlphaBetaTable {
        m,
        precision: prec,
        s0,
        blocks: blocks.into_iter().map(Option::unwrap).collect(),
        flags,
        clamped,
    })
}

impl AlphaBetaTable {
    pub fn norm(&self) -> Float {
        let p = self.precision;
        (Float::with_val(p, 2 * self.m) + Float::with_val(p, self.m).sqrt()).sqrt()
    }

    fn full(&self) -> u64 {
        full_mask(self.m)
    }

    fn signed_subset_sum(&self, a: u64, pick: impl Fn(&BlockRecord) -> &Float) -> Float {
        let ac = self.full() & !a;
        let mut tot = Float::with_val(self.precision, 0u32);
        let mut sub = ac;
        loop {
            let v = pick(&self.blocks[sub as usize]);
            if parity(sub) > 0 {
                tot += v;
            } else {
                tot -= v;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & ac;
        }
        tot * parity(a)
    }

    /// `(−1)^{|A|} Σ_{B ⊆ Aᶜ} (−1)^{|B|} β_B / √(2m + √m)`.
    pub fn density_of_class(&self, a: u64) -> Float {
        self.signed_subset_sum(a, |r| &r.beta) / self.norm()
    }

    /// `I_A(s₀)`: the same combination with `α` in place of `β`.
    pub fn value_of_class(&self, a: u64) -> Float {
        self.signed_subset_sum(a, |r| &r.alpha)
    }

    /// Every class at once through one subset-sum transform.
    fn all_combined(&self, pick: impl Fn(&BlockRecord) -> &Float) -> Vec<Float> {
        let k = self.blocks.len();
        let mut v: Vec<Float> =
            self.blocks.iter().enumerate().map(|(b, r)| Float::with_val(self.precision, pick(r)) * parity(b as u64)).collect();
        let mut bit = 1usize;
        while bit < k {
            for t in 0..k {
                if t & bit != 0 {
                    let lo = v[t ^ bit].clone();
                    v[t] += lo;
                }
            }
            bit <<= 1;
        }
        let full = self.full() as usize;
        (0..k).map(|a| Float::with_val(self.precision, &v[full & !a]) * parity(a as u64)).collect()
    }

    pub fn all_densities(&self) -> Vec<Float> {
        let n = self.norm();
        self.all_combined(|r| &r.beta).into_iter().map(|x| x / &n).collect()
    }

    pub fn values_at_s0(&self) -> Vec<Float> {
        self.all_combined(|r| &r.alpha)
    }

    pub fn to_json(&self, all_classes: bool) -> Value {
        let digits = digits_for(self.precision);
        let dens = self.all_densities();
        let full = self.full();
        let keys: Vec<u64> = if all_classes { (0..=full).collect() } else { vec![0, full] };
        let mut d = Map::new();
        let mut al = Map::new();
        let mut be = Map::new();
        for k in keys {
            d.insert(k.to_string(), json!(decimal_trunc(&dens[k as usize], digits)));
            al.insert(k.to_string(), json!(decimal_trunc(&self.blocks[k as usize].alpha, digits)));
            be.insert(k.to_string(), json!(decimal_trunc(&self.blocks[k as usize].beta, digits)));
        }
        json!({
            "m": self.m,
            "precision_bits": self.precision,
            "densities": d,
            "alpha": al,
            "beta": be,
            "flags": self.flags,
        })
    }
}

/// Signed coefficients expressing `I_{A;B}` through the block series `I_{−;B'}`,
/// `B ⊆ B' ⊆ Aᶜ`.
pub fn lincomb_coeffs(a: u64, b: u64, m: u32) -> Result<Vec<(u64, i32)>, ExactError> {
    if a & b != 0 {
        return Err(ExactError::Overlap { a, b });
    }
    let free = full_mask(m) & !a & !b;
    let mut out = Vec::new();
    let mut sub = free;
    loop {
        let bp = b | sub;
        out.push((bp, parity(a) * parity(bp)));
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Stability {
    pub max_alpha_diff: Float,
    pub max_beta_diff: Float,
    pub bound: Float,
}

impl Stability {
    pub fn ok(&self) -> bool {
        self.max_alpha_diff <= self.bound && self.max_beta_diff <= self.bound
    }
}

/// Re-solves at twice the precision and reports the largest drift of `α` and `β`,
/// against the bound `2^(−prec/4)`.
pub fn stability_check(m: u32, prec: u32) -> Result<Stability, ExactError> {
    let lo = solve_alpha_beta(m, prec)?;
    let hi = solve_alpha_beta(m, 2 * prec)?;
    let mut da = Float::with_val(2 * prec, 0u32);
    let mut db = da.clone();
    for (x, y) in lo.blocks.iter().zip(&hi.blocks) {
        let a = Float::with_val(2 * prec, &y.alpha - &x.alpha).abs();
        let b = Float::with_val(2 * prec, &y.beta - &x.beta).abs();
        if a > da {
            da = a;
        }
        if b > db {
            db = b;
        }
    }
    let bound = Float::with_val(2 * prec, 1u32) >> (prec / 4);
    Ok(Stability { max_alpha_diff: da, max_beta_diff: db, bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    // set-theoretic m_B: every variable falsity set F with F ∪ B = all assignments
    fn m_b_oracle(b: u64, m: u32) -> u32 {
        let mut c = 0;
        for i in 0..m {
            let covered = (0..1u32 << m).all(|t| (t >> i & 1 == 0) || (b >> t & 1 == 1));
            c += covered as u32;
        }
        c
    }

    #[test]
    fn m_b_values() {
        assert_eq!(count_m_b(15, 2), 2);
        assert_eq!(count_m_b(0, 2), 0);
        for b in 0..16 {
            assert_eq!(count_m_b(b, 2), m_b_oracle(b, 2));
        }
        assert_eq!(count_m_b(!2u64 & 15, 2), 1);
    }

    #[test]
    fn full_block() {
        let t = solve_alpha_beta(2, 128).unwrap();
        let r = &t.blocks[15];
        assert!((r.alpha.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        assert!((r.beta.to_f64() - (4.0 + 2f64.sqrt()).sqrt()).abs() < 1e-15);
        assert!(r.d.is_zero());
    }

    #[test]
    fn densities_small() {
        let t = solve_alpha_beta(1, 256).unwrap();
        assert!((t.density_of_class(0).to_f64() - 0.4232385384).abs() < 1e-9);
        assert!((t.density_of_class(3).to_f64() - 0.1632956768).abs() < 1e-9);
        let t = solve_alpha_beta(2, 256).unwrap();
        assert!((t.density_of_class(0).to_f64() - 0.33213).abs() < 5e-6);
        assert!((t.density_of_class(15).to_f64() - 0.09710).abs() < 5e-6);
        assert!(t.flags.is_empty());
    }

    #[test]
    fn transform_matches_direct() {
        let t = solve_alpha_beta(2, 128).unwrap();
        let all = t.all_densities();
        let vals = t.values_at_s0();
        for a in 0..16 {
            assert!((all[a].to_f64() - t.density_of_class(a as u64).to_f64()).abs() < 1e-30);
            assert!((vals[a].to_f64() - t.value_of_class(a as u64).to_f64()).abs() < 1e-30);
        }
        let sum: f64 = vals.iter().map(|v| v.to_f64()).sum();
        assert!((sum - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn block_invariants() {
        let t = solve_alpha_beta(3, 128).unwrap();
        let sq = 3f64.sqrt();
        for r in &t.blocks {
            assert!(r.alpha >= 0 && r.alpha.to_f64() <= sq + 1e-12);
            assert!(r.d >= 0);
        }
    }

    #[test]
    fn lincomb() {
        let c = lincomb_coeffs(0, 0, 1).unwrap();
        assert_eq!(c, vec![(0, 1), (1, -1), (2, -1), (3, 1)]);
        assert_eq!(lincomb_coeffs(0, 15, 2).unwrap(), vec![(15, 1)]);
        assert!(matches!(lincomb_coeffs(1, 3, 1), Err(ExactError::Overlap { .. })));
    }

    #[test]
    fn refuses_large_m() {
        assert!(matches!(solve_alpha_beta(5, 64), Err(ExactError::VarsOutOfRange(5))));
    }

    #[test]
    fn stable_under_doubling() {
        assert!(stability_check(2, 128).unwrap().ok());
    }
}
