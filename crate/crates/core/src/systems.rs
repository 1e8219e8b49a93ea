//! Category systems as data.
//!
//! Every member obeys `X = f + Σ g_j X_j + z Σ h_jk X_j X_k`, where the
//! coefficient polynomials are integer combinations of `m^a z^b`. The
//! all-formulae series `W` is referenced by name but never listed: each
//! consumer supplies it (exact coefficients, `W(s₀) = √m`, or `yW = 1`).

use std::fmt;

/// `c · m^a · z^b`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MzTerm {
    pub c: i64,
    pub a: u32,
    pub b: u32,
}

pub const fn t(c: i64, a: u32, b: u32) -> MzTerm {
    MzTerm { c, a, b }
}

pub type MzPoly = Vec<MzTerm>;

/// Value at a given m as a polynomial in z (index = power).
pub fn z_poly_at(p: &[MzTerm], m: u32) -> Vec<i64> {
    let deg = p.iter().map(|t| t.b as usize).max().unwrap_or(0);
    let mut out = vec![0i64; deg + 1];
    for t in p {
        out[t.b as usize] += t.c * (m as i64).pow(t.a);
    }
    out
}

pub fn eval_f64(p: &[MzTerm], m: f64, z: f64) -> f64 {
    p.iter().map(|t| t.c as f64 * m.powi(t.a as i32) * z.powi(t.b as i32)).sum()
}

#[derive(Clone, Debug)]
pub struct Equation {
    pub name: &'static str,
    pub f: MzPoly,
    pub g: Vec<(&'static str, MzPoly)>,
    pub h: Vec<(&'static str, &'static str, MzPoly)>,
    /// Leading coefficient of `y·X(s₀)` as (num, den), y = m^(-1/2).
    pub seed: (i64, i64),
}

#[derive(Clone, Debug)]
pub struct SystemSpec {
    pub name: &'static str,
    pub equations: Vec<Equation>,
    /// Members that partition W (empty when the system is not a partition of W).
    pub partition: Vec<&'static str>,
    /// The member counting the basis (or the whole seed set for single equations).
    pub basis: &'static str,
}

pub const W: &str = "W";

impl SystemSpec {
    pub fn index(&self, name: &str) -> Option<usize> {
        self.equations.iter().position(|e| e.name == name)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.equations.iter().map(|e| e.name).collect()
    }

    /// Members in an order where every z-free linear dependency comes first.
    pub fn eval_order(&self) -> Vec<usize> {
        let n = self.equations.len();
        let mut done = vec![false; n];
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let before = order.len();
            for (i, e) in self.equations.iter().enumerate() {
                if done[i] {
                    continue;
                }
                let ready = e.g.iter().all(|(j, p)| {
                    *j == W || p.iter().all(|t| t.b > 0) || self.index(j).map_or(true, |k| done[k])
                });
                if ready {
                    done[i] = true;
                    order.push(i);
                }
            }
            assert!(order.len() > before, "system {} has a cycle of z-free dependencies", self.name);
        }
        order
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

fn one() -> MzPoly {
    vec![t(1, 0, 0)]
}

/// Strict simple tautologies of the first kind, the strong basis of 𝒮₁.
pub fn sc_equation() -> Equation {
    Equation {
        name: "Sc",
        f: vec![t(1, 1, 3)],
        g: vec![("Sc", vec![t(-1, 0, 2)])],
        h: vec![("Sc", W, one())],
        seed: (0, 1),
    }
}

pub fn sc_system() -> SystemSpec {
    SystemSpec { name: "sc", equations: vec![sc_equation()], partition: vec![], basis: "Sc" }
}

/// All simple tautologies of the first kind.
pub fn s1_system() -> SystemSpec {
    SystemSpec {
        name: "s1",
        equations: vec![Equation {
            name: "S1",
            f: vec![t(1, 1, 3)],
            g: vec![("S1", vec![t(1, 1, 2), t(-1, 0, 2)])],
            h: vec![("S1", W, vec![t(1, 0, 0), t(1, 0, 1), t(1, 0, 2)])],
            seed: (0, 1),
        }],
        partition: vec![],
        basis: "S1",
    }
}

/// Strong 𝒮₁-categories with basis 𝒮_c.
pub fn strong_system() -> SystemSpec {
    SystemSpec {
        name: "strong",
        equations: vec![
            sc_equation(),
            Equation {
                name: "T",
                f: vec![],
                g: vec![("Sc", one()), ("A", vec![t(1, 0, 1)])],
                h: vec![("T", W, one())],
                seed: (0, 1),
            },
            Equation {
                name: "U",
                f: vec![t(1, 1, 1)],
                g: vec![("Sc", vec![t(-1, 0, 0)]), ("U", vec![t(1, 0, 1)])],
                h: vec![("U", W, one()), ("A", W, one()), ("A", "T", vec![t(-1, 0, 0)])],
                seed: (1, 1),
            },
            a_equation(),
        ],
        partition: vec!["T", "U", "A"],
        basis: "Sc",
    }
}

fn a_equation() -> Equation {
    Equation { name: "A", f: vec![], g: vec![("T", vec![t(1, 0, 1)])], h: vec![("A", "T", one())], seed: (0, 1) }
}

fn weak_tua(basis: &'static str) -> Vec<Equation> {
    vec![
        Equation {
            name: "T",
            f: vec![],
            g: vec![(basis, one()), ("A", vec![t(1, 0, 1)])],
            h: vec![("T", W, one()), ("A", W, one()), ("A", "T", vec![t(-1, 0, 0)])],
            seed: (0, 1),
        },
        Equation {
            name: "U",
            f: vec![t(1, 1, 1)],
            g: vec![(basis, vec![t(-1, 0, 0)]), ("U", vec![t(1, 0, 1)])],
            h: vec![("U", W, one())],
            seed: (1, 1),
        },
        a_equation(),
    ]
}

fn weak_first_kind(name: &'static str) -> Equation {
    Equation {
        name,
        f: vec![t(1, 1, 3)],
        g: vec![(name, vec![t(-1, 0, 2)])],
        h: vec![(name, W, one()), (name, "A", vec![t(-1, 0, 0)])],
        seed: (0, 1),
    }
}

/// Weak 𝒮₁-categories.
pub fn weak_system() -> SystemSpec {
    let mut equations = vec![weak_first_kind("B")];
    equations.extend(weak_tua("B"));
    SystemSpec { name: "weak", equations, partition: vec!["T", "U", "A"], basis: "B" }
}

/// Second-kind basis pieces: `(m² − m) z^p + m z^p W − m z^p A + self·X + z X (W − A)`.
fn second_kind(name: &'static str, p: u32, self_g: MzPoly, seed: (i64, i64)) -> Equation {
    Equation {
        name,
        f: vec![t(1, 2, p), t(-1, 1, p)],
        g: vec![(W, vec![t(1, 1, p)]), ("A", vec![t(-1, 1, p)]), (name, self_g)],
        h: vec![(name, W, one()), (name, "A", vec![t(-1, 0, 0)])],
        seed,
    }
}

/// Weak (𝒮₁ ∪ 𝒮₂)-categories.
pub fn combined_system() -> SystemSpec {
    let mut equations = vec![
        weak_first_kind("B1"),
        second_kind("B2", 3, vec![t(-1, 0, 2)], (1, 4)),
        second_kind("B3", 3, vec![t(-1, 0, 2), t(-1, 0, 3)], (1, 4)),
        second_kind("B4", 4, vec![t(-1, 0, 3)], (0, 1)),
        second_kind("B5", 4, vec![t(-1, 0, 2), t(-1, 0, 3)], (0, 1)),
        Equation {
            name: "B",
            f: vec![],
            g: vec![("B1", one()), ("B2", one()), ("B3", vec![t(-1, 0, 0)]), ("B4", one()), ("B5", vec![t(-1, 0, 0)])],
            h: vec![],
            seed: (0, 1),
        },
    ];
    equations.extend(weak_tua("B"));
    SystemSpec { name: "combined", equations, partition: vec!["T", "U", "A"], basis: "B" }
}

pub fn system_by_name(name: &str) -> Option<SystemSpec> {
    match name {
        "sc" => Some(sc_system()),
        "s1" => Some(s1_system()),
        "strong" => Some(strong_system()),
        "weak" => Some(weak_system()),
        "combined" => Some(combined_system()),
        _ => None,
    }
}

pub const SYSTEM_NAMES: [&str; 5] = ["sc", "s1", "strong", "weak", "combined"];

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub f_ok: bool,
    pub g_ok: bool,
    pub h_ok: bool,
}

impl PartitionReport {
    pub fn ok(&self) -> bool {
        self.f_ok && self.g_ok && self.h_ok
    }
}

/// Natural-partition identities for the partition members, with W expanded into the
/// partition: Σf = mz, Σ_i g_ij = z·[j ∈ P], and every ordered pair (j,k) of partition
/// members carries total h weight 1 (so Σ_i (h_ijk + h_ikj) = 2), as polynomials in m, z.
pub fn validate_partition(spec: &SystemSpec) -> PartitionReport {
    use std::collections::BTreeMap;
    let p = &spec.partition;
    let key = |poly: &[MzTerm]| {
        let mut acc: BTreeMap<(u32, u32), i64> = BTreeMap::new();
        for t in poly {
            *acc.entry((t.a, t.b)).or_default() += t.c;
        }
        acc.retain(|_, v| *v != 0);
        acc
    };
    let members: Vec<&Equation> = spec.equations.iter().filter(|e| p.contains(&e.name)).collect();

    let f_sum: Vec<MzTerm> = members.iter().flat_map(|e| e.f.iter().copied()).collect();
    let f_ok = key(&f_sum) == key(&[t(1, 1, 1)]);

    let mut g_ok = true;
    let mut targets: Vec<&str> = spec.names();
    targets.push(W);
    for j in targets {
        let sum: Vec<MzTerm> =
            members.iter().flat_map(|e| e.g.iter().filter(|(n, _)| *n == j).flat_map(|(_, q)| q.iter().copied())).collect();
        let want = if p.contains(&j) { key(&[t(1, 0, 1)]) } else { BTreeMap::new() };
        g_ok &= key(&sum) == want;
    }

    let mut pairs: BTreeMap<(&str, &str), Vec<MzTerm>> = BTreeMap::new();
    let mut h_ok = true;
    for e in &members {
        for (j, k, q) in &e.h {
            let js: Vec<&str> = if *j == W { p.clone() } else { vec![j] };
            let ks: Vec<&str> = if *k == W { p.clone() } else { vec![k] };
            for a in &js {
                for b in &ks {
                    if !p.contains(a) || !p.contains(b) {
                        h_ok = false;
                    }
                    pairs.entry((a, b)).or_default().extend(q.iter().copied());
                }
            }
        }
    }
    for a in p {
        for b in p {
            let got = pairs.get(&(*a, *b)).map(|v| key(v)).unwrap_or_default();
            h_ok &= got == key(&[t(1, 0, 0)]);
        }
    }
    PartitionReport { f_ok, g_ok, h_ok }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_hold() {
        for s in [strong_system(), weak_system(), combined_system()] {
            assert!(validate_partition(&s).ok(), "{}", s.name);
        }
    }

    #[test]
    fn broken_partition_detected() {
        let mut s = strong_system();
        s.equations[3].h.clear();
        assert!(!validate_partition(&s).h_ok);
    }

    #[test]
    fn eval_orders_respect_constant_links() {
        let s = combined_system();
        let order = s.eval_order();
        let pos = |n: &str| order.iter().position(|&i| s.equations[i].name == n).unwrap();
        assert!(pos("B1") < pos("B") && pos("B5") < pos("B") && pos("B") < pos("T") && pos("B") < pos("U"));
        let s = strong_system();
        let order = s.eval_order();
        assert_eq!(s.equations[order[0]].name, "Sc");
    }

    #[test]
    fn z_poly() {
        assert_eq!(z_poly_at(&[t(1, 2, 3), t(-1, 1, 3)], 3), vec![0, 0, 0, 6]);
    }
}
