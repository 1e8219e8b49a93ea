//! Small helpers around `rug::Float`.

use rug::float::Round;
use rug::{Float, Integer, Rational};

pub const DEFAULT_PRECISION: u32 = 256;

pub fn fl(prec: u32, v: impl Into<f64>) -> Float {
    Float::with_val(prec, v.into())
}

pub fn from_int(prec: u32, v: &Integer) -> Float {
    Float::with_val(prec, v)
}

pub fn from_rat(prec: u32, v: &Rational) -> Float {
    Float::with_val(prec, v)
}

pub fn sqrt_m(prec: u32, m: u32) -> Float {
    Float::with_val(prec, m).sqrt()
}

/// s₀ = 1/(2√m + 1), the dominant singularity of the all-formulae series.
pub fn s0(prec: u32, m: u32) -> Float {
    let d = sqrt_m(prec, m) * 2u32 + 1u32;
    Float::with_val(prec, 1u32) / d
}

/// Plain decimal with `digits` significant digits, truncated toward zero.
pub fn decimal_trunc(x: &Float, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf".into() } else { "inf".into() };
    }
    let (neg, ds, exp) = x.to_sign_string_exp_round(10, Some(digits.max(1)), Round::Zero);
    let Some(exp) = exp else { return "0".into() };
    let ds = ds.trim_end_matches('0');
    let ds = if ds.is_empty() { "0" } else { ds };
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp <= 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-exp) as usize));
        out.push_str(ds);
    } else {
        let e = exp as usize;
        if ds.len() <= e {
            out.push_str(ds);
            out.extend(std::iter::repeat('0').take(e - ds.len()));
        } else {
            out.push_str(&ds[..e]);
            out.push('.');
            out.push_str(&ds[e..]);
        }
    }
    out
}

/// Digits carried by decimal output at a given binary precision.
pub fn digits_for(prec: u32) -> usize {
    (prec / 4) as usize
}

pub fn to_f64(x: &Float) -> f64 {
    x.to_f64()
}

/// Largest |x_i| of a vector.
pub fn max_abs(xs: &[Float]) -> Float {
    let prec = xs.first().map_or(64, |x| x.prec());
    let mut best = Float::with_val(prec, 0u32);
    for x in xs {
        let a = Float::with_val(prec, x.abs_ref());
        if a > best {
            best = a;
        }
    }
    best
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting. `A` may have more
/// rows than columns provided the system is consistent; surplus rows must reduce to ≈ 0.
/// Returns `None` when a pivot column is numerically zero.
pub fn solve_linear(mut a: Vec<Vec<Float>>, mut b: Vec<Float>) -> Option<Vec<Float>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    assert_eq!(b.len(), rows);
    assert!(rows >= cols);
    let prec = b.first().map_or(64, |x| x.prec());
    let scale = a.iter().flatten().map(|v| v.to_f64().abs()).fold(0.0, f64::max).max(1.0);
    let tiny = scale * 2f64.powi(-(prec as i32) / 2);
    for c in 0..cols {
        let (p, best) = (c..rows)
            .map(|r| (r, a[r][c].to_f64().abs()))
            .fold((c, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tiny {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        let piv = a[c][c].clone();
        for r in c + 1..rows {
            if a[r][c].is_zero() {
                continue;
            }
            let f = Float::with_val(prec, &a[r][c] / &piv);
            for k in c..cols {
                let t = Float::with_val(prec, &f * &a[c][k]);
                a[r][k] -= t;
            }
            let t = Float::with_val(prec, &f * &b[c]);
            b[r] -= t;
        }
    }
    let mut x = vec![Float::with_val(prec, 0u32); cols];
    for c in (0..cols).rev() {
        let mut acc = b[c].clone();
        for k in c + 1..cols {
            acc -= Float::with_val(prec, &a[c][k] * &x[k]);
        }
        x[c] = acc / &a[c][c];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        let x = Float::with_val(128, 0.33213);
        assert!(decimal_trunc(&x, 5) == "0.33212" || decimal_trunc(&x, 5) == "0.33213");
        assert_eq!(decimal_trunc(&Float::with_val(64, 1234.5), 8), "1234.5");
        assert_eq!(decimal_trunc(&Float::with_val(64, 1234.5), 2), "1200");
        assert_eq!(decimal_trunc(&Float::with_val(64, -0.0625), 3), "-0.0625");
        assert_eq!(decimal_trunc(&Float::with_val(64, 0.0), 3), "0");
        // truncation, never rounding up
        let two_thirds = Float::with_val(128, 2u32) / 3u32;
        assert_eq!(decimal_trunc(&two_thirds, 4), "0.6666");
    }

    #[test]
    fn s0_value() {
        let s = s0(128, 4);
        assert!((s.to_f64() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn linear_overdetermined() {
        let f = |v: f64| Float::with_val(128, v);
        // x + y = 3, x - y = 1, 2x = 4
        let a = vec![vec![f(1.0), f(1.0)], vec![f(1.0), f(-1.0)], vec![f(2.0), f(0.0)]];
        let b = vec![f(3.0), f(1.0), f(4.0)];
        let x = solve_linear(a, b).unwrap();
        assert!((x[0].to_f64() - 2.0).abs() < 1e-30 && (x[1].to_f64() - 1.0).abs() < 1e-30);
        let sing = vec![vec![f(1.0), f(1.0)], vec![f(2.0), f(2.0)]];
        assert!(solve_linear(sing, vec![f(1.0), f(2.0)]).is_none());
    }
}
