//! Averaging grids `[1,N] × [1,b(N)]` and their sub-grids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the box height `b(N)` grows with `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum BoxRule {
    /// `max(2, ⌊N^{1/(2d)}⌋)`.
    #[default]
    Default,
    /// `max(1, ⌊N^{num/den}⌋)`.
    Power { num: u32, den: u32 },
    /// `max(1, ⌊N^{1/d} / ln N⌋)`.
    RootLog,
    /// Constant height.
    Fixed { b: u64 },
}

/// Largest `r` with `r^k <= x`.
pub fn int_root(x: u64, k: u32) -> u64 {
    if k == 0 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / k as f64).round() as u64;
    let pow = |r: u64| (r as u128).checked_pow(k).unwrap_or(u128::MAX);
    while r > 0 && pow(r) > x as u128 {
        r -= 1;
    }
    while pow(r + 1) <= x as u128 {
        r += 1;
    }
    r
}

/// Largest `r` with `r^den <= x^num`.
fn rational_power_floor(x: u64, num: u32, den: u32) -> u64 {
    let target = (x as f64).powf(num as f64 / den as f64);
    let mut r = target.round().max(0.0) as u128;
    let bound = (x as u128).checked_pow(num);
    let pow = |r: u128| r.checked_pow(den);
    let le = |r: u128| match (pow(r), bound) {
        (Some(a), Some(b)) => a <= b,
        (None, Some(_)) => false,
        // x^num overflows: fall back to the float comparison
        (_, None) => (r as f64) <= target,
    };
    while r > 0 && !le(r) {
        r -= 1;
    }
    while le(r + 1) {
        r += 1;
    }
    r.min(u64::MAX as u128) as u64
}

impl BoxRule {
    /// Box height at `n` for polynomials of maximal degree `degree`.
    pub fn height(self, n: u64, degree: u32) -> u64 {
        let d = degree.max(1);
        match self {
            BoxRule::Default => int_root(n, 2 * d).max(2),
            BoxRule::Power { num, den } => rational_power_floor(n, num, den).max(1),
            BoxRule::RootLog => {
                if n < 3 {
                    return 1;
                }
                let v = (n as f64).powf(1.0 / d as f64) / (n as f64).ln();
                (v.floor() as u64).max(1)
            }
            BoxRule::Fixed { b } => b.max(1),
        }
    }

    /// Whether `b(N) → ∞` and `b(N)/N^{1/d} → 0` hold for this rule.
    pub fn satisfies_growth(self, degree: u32) -> bool {
        let d = degree.max(1);
        match self {
            BoxRule::Default | BoxRule::RootLog => true,
            // 0 < num/den < 1/d
            BoxRule::Power { num, den } => num > 0 && (num as u64) * (d as u64) < den as u64,
            BoxRule::Fixed { .. } => false,
        }
    }
}

impl fmt::Display for BoxRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxRule::Default => write!(f, "default"),
            BoxRule::Power { num, den } => write!(f, "power:{num}/{den}"),
            BoxRule::RootLog => write!(f, "root-log"),
            BoxRule::Fixed { b } => write!(f, "fixed:{b}"),
        }
    }
}

impl FromStr for BoxRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unknown box rule `{s}`"));
        match s.split_once(':') {
            None if s == "default" => Ok(BoxRule::Default),
            None if s == "root-log" => Ok(BoxRule::RootLog),
            Some(("power", frac)) => {
                let (a, b) = frac.split_once('/').ok_or_else(bad)?;
                let num = a.trim().parse().map_err(|_| bad())?;
                let den: u32 = b.trim().parse().map_err(|_| bad())?;
                if den == 0 {
                    return Err(bad());
                }
                Ok(BoxRule::Power { num, den })
            }
            Some(("fixed", b)) => Ok(BoxRule::Fixed { b: b.trim().parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }
}

/// The grid `[1,N] × [1,b(N)]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FolnerBox {
    pub n: u64,
    pub rule: BoxRule,
    /// Maximal polynomial degree, the `d` in the growth rule.
    pub degree: u32,
}

impl FolnerBox {
    pub fn new(n: u64, rule: BoxRule, degree: u32) -> Self {
        assert!(n >= 1, "box needs N >= 1");
        Self { n, rule, degree }
    }

    pub fn height(&self) -> u64 {
        self.rule.height(self.n, self.degree)
    }

    pub fn size(&self) -> u64 {
        self.n * self.height()
    }

    pub fn region(&self) -> Region {
        Region::rect(1, self.n as i64, 1, self.height() as i64)
    }
}

/// A rectangle of `(m, n)` pairs, optionally restricted to one class
/// `(a, b) + r Z²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub m: (i64, i64),
    pub n: (i64, i64),
    pub class: Option<(i64, i64, i64)>,
}

impl Region {
    /// `[m0, m1] × [n0, n1]`, inclusive.
    pub fn rect(m0: i64, m1: i64, n0: i64, n1: i64) -> Self {
        Self { m: (m0, m1), n: (n0, n1), class: None }
    }

    /// Restriction to `m ≡ a`, `n ≡ b (mod r)`.
    pub fn with_class(mut self, r: i64, a: i64, b: i64) -> Self {
        assert!(r >= 1);
        self.class = Some((r, a.rem_euclid(r), b.rem_euclid(r)));
        self
    }

    fn first_and_step(lo: i64, hi: i64, class: Option<(i64, i64)>) -> (i64, i64, i64) {
        match class {
            None => (lo, hi, 1),
            Some((r, a)) => (lo + (a - lo).rem_euclid(r), hi, r),
        }
    }

    /// Row values of `m`, in increasing order.
    pub fn m_values(&self) -> Vec<i64> {
        let (s, e, st) = Self::first_and_step(self.m.0, self.m.1, self.class.map(|(r, a, _)| (r, a)));
        (s..=e).step_by(st as usize).collect()
    }

    /// Column values of `n`, in increasing order.
    pub fn n_values(&self) -> Vec<i64> {
        let (s, e, st) = Self::first_and_step(self.n.0, self.n.1, self.class.map(|(r, _, b)| (r, b)));
        (s..=e).step_by(st as usize).collect()
    }

    pub fn len(&self) -> usize {
        self.m_values().len() * self.n_values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest `|m|` and `|n|` in the region.
    pub fn max_abs(&self) -> (u64, u64) {
        (
            self.m.0.unsigned_abs().max(self.m.1.unsigned_abs()),
            self.n.0.unsigned_abs().max(self.n.1.unsigned_abs()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_rule_heights() {
        assert_eq!(BoxRule::Default.height(4000, 2), 7);
        assert_eq!(BoxRule::Default.height(2000, 2), 6);
        assert_eq!(BoxRule::Default.height(2000, 1), 44);
        assert_eq!(BoxRule::Default.height(10, 4), 2);
        assert_eq!(BoxRule::Default.height(6561, 2), 9);
    }

    #[test]
    fn power_rule_is_exact_at_perfect_powers() {
        assert_eq!(BoxRule::Power { num: 1, den: 4 }.height(6561, 1), 9);
        assert_eq!(BoxRule::Power { num: 1, den: 4 }.height(6560, 1), 8);
        assert_eq!(BoxRule::Power { num: 2, den: 3 }.height(1000, 1), 100);
    }

    #[test]
    fn growth_conditions() {
        assert!(BoxRule::Default.satisfies_growth(3));
        assert!(BoxRule::RootLog.satisfies_growth(2));
        assert!(BoxRule::Power { num: 1, den: 3 }.satisfies_growth(2));
        assert!(!BoxRule::Power { num: 1, den: 2 }.satisfies_growth(2));
        assert!(!BoxRule::Fixed { b: 5 }.satisfies_growth(1));
    }

    #[test]
    fn rule_parsing_round_trips() {
        for r in [BoxRule::Default, BoxRule::RootLog, BoxRule::Power { num: 1, den: 5 }, BoxRule::Fixed { b: 3 }] {
            assert_eq!(r.to_string().parse::<BoxRule>().unwrap(), r);
        }
        assert!("power:1/0".parse::<BoxRule>().is_err());
        assert!("cubic".parse::<BoxRule>().is_err());
    }

    #[test]
    fn int_root_edges() {
        assert_eq!(int_root(0, 3), 0);
        assert_eq!(int_root(1, 5), 1);
        assert_eq!(int_root(u64::MAX, 2), 4294967295);
        assert_eq!(int_root(80, 4), 2);
        assert_eq!(int_root(81, 4), 3);
    }

    #[test]
    fn region_classes_partition() {
        let reg = Region::rect(1, 20, 1, 7);
        let total: usize = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| reg.with_class(3, a, b).len()).sum();
        assert_eq!(total, reg.len());
        assert_eq!(reg.with_class(3, 2, 0).m_values(), vec![2, 5, 8, 11, 14, 17, 20]);
        assert_eq!(reg.with_class(3, 2, 0).n_values(), vec![3, 6]);
    }
}
