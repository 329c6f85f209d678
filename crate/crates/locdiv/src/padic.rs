//! Open subsets of ℤ_p represented as finite disjoint unions of residue
//! classes a + pⁿℤ_p, with exact rational Haar measure (normalized so that
//! μ(ℤ_p) = 1) and membership tests.
//!
//! The central construction is [`proposition_set`]: the truncation at depth
//! N of the union ⋃_{n≥1} (a_n·p^{n−1} + pⁿℤ_p) with nonzero digits a_n.
//! Truncation keeps every union finite, so measures are exact rationals;
//! the truncation error of the infinite union is p^{−N}/(p−1).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::Result;

/// A residue class a + pⁿℤ_p with 0 ≤ a < pⁿ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClass {
    p: u64,
    level: u32,
    center: BigUint,
}

impl ResidueClass {
    pub fn new(p: u64, level: u32, center: BigUint) -> Result<Self> {
        let modulus = BigUint::from(p).pow(level);
        if level > 0 && center >= modulus {
            return Err(Error::domain(format!(
                "center {center} is not reduced mod {p}^{level}"
            )));
        }
        Ok(ResidueClass { p, level, center })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn center(&self) -> &BigUint {
        &self.center
    }

    /// Haar measure p^{−level}.
    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.p).pow(self.level))
    }

    fn contains_residue(&self, r: &BigUint) -> bool {
        let modulus = BigUint::from(self.p).pow(self.level);
        r % modulus == self.center
    }

    fn intersects(&self, other: &ResidueClass) -> bool {
        let (lo, hi) = if self.level <= other.level {
            (self, other)
        } else {
            (other, self)
        };
        let modulus = BigUint::from(lo.p).pow(lo.level);
        &hi.center % modulus == lo.center
    }
}

/// Membership verdict of an integer in a truncated open set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    In,
    Out,
    /// x ≡ 0 mod p^N: the truncation cannot decide, since a nonzero such x
    /// may lie in a class deeper than the truncation depth.
    Unknown,
}

/// A finite disjoint union of residue classes in ℤ_p, truncated at depth N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicOpenSet {
    p: u64,
    classes: Vec<ResidueClass>,
    depth: u32,
}

impl PadicOpenSet {
    pub fn new(p: u64, classes: Vec<ResidueClass>, depth: u32) -> Result<Self> {
        for c in &classes {
            if c.p != p {
                return Err(Error::domain("classes must share the prime p"));
            }
            if c.level > depth {
                return Err(Error::domain("class level exceeds the set depth"));
            }
        }
        for (i, a) in classes.iter().enumerate() {
            for b in &classes[i + 1..] {
                if a.intersects(b) {
                    return Err(Error::domain("classes must be pairwise disjoint"));
                }
            }
        }
        let set = PadicOpenSet { p, classes, depth };
        if set.haar_measure() > BigRational::one() {
            return Err(Error::domain("total measure exceeds 1"));
        }
        Ok(set)
    }

    pub fn empty(p: u64, depth: u32) -> Self {
        PadicOpenSet {
            p,
            classes: Vec::new(),
            depth,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn classes(&self) -> &[ResidueClass] {
        &self.classes
    }

    /// Exact Haar measure: the sum of p^{−level} over the classes.
    pub fn haar_measure(&self) -> BigRational {
        self.classes
            .iter()
            .map(|c| c.measure())
            .fold(BigRational::zero(), |acc, m| acc + m)
    }

    /// Membership of an integer, interpreted modulo p^depth.
    pub fn contains(&self, x: &BigInt) -> Membership {
        let modulus = BigInt::from(self.p).pow(self.depth);
        let r = x.mod_floor(&modulus).to_biguint().unwrap();
        if r.is_zero() {
            return Membership::Unknown;
        }
        if self.classes.iter().any(|c| c.contains_residue(&r)) {
            Membership::In
        } else {
            Membership::Out
        }
    }

    /// The classes of the set contained in the subgroup p^mℤ_p.
    pub fn intersect_subgroup(&self, m: u32) -> Result<PadicOpenSet> {
        if m >= self.depth {
            return Err(Error::DepthExceeded {
                m,
                depth: self.depth,
            });
        }
        if m == 0 {
            return Ok(self.clone());
        }
        let pm = BigUint::from(self.p).pow(m);
        let classes = self
            .classes
            .iter()
            .filter(|c| c.level > m && (&c.center % &pm).is_zero())
            .cloned()
            .collect();
        Ok(PadicOpenSet {
            p: self.p,
            classes,
            depth: self.depth,
        })
    }
}

/// Rule producing the nonzero digit a_n of the n-th class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DigitRule {
    /// Every a_n equals the given digit.
    Constant(u64),
    /// Deterministic sequence from a linear congruential recurrence:
    /// s_{k+1} = (1103515245·s_k + 12345) mod 2³¹, digit_n = 1 + (s_{n−1} mod (p−1)).
    Seeded(u64),
}

impl DigitRule {
    /// The digit a_n ∈ {1, …, p−1} for level n ≥ 1.
    pub fn digit(&self, p: u64, n: u32) -> u64 {
        match *self {
            DigitRule::Constant(a) => a,
            DigitRule::Seeded(seed) => {
                let mut s = seed % (1 << 31);
                for _ in 1..n {
                    s = (1103515245u64.wrapping_mul(s).wrapping_add(12345)) % (1 << 31);
                }
                1 + (s % (p - 1))
            }
        }
    }
}

impl std::fmt::Display for DigitRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DigitRule::Constant(a) => write!(f, "const:{a}"),
            DigitRule::Seeded(s) => write!(f, "seed:{s}"),
        }
    }
}

impl std::str::FromStr for DigitRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(a) = s.strip_prefix("const:") {
            return Ok(DigitRule::Constant(a.parse().map_err(|_| {
                Error::parse(format!("bad constant digit in rule '{s}'"))
            })?));
        }
        if let Some(a) = s.strip_prefix("seed:") {
            return Ok(DigitRule::Seeded(a.parse().map_err(|_| {
                Error::parse(format!("bad seed in rule '{s}'"))
            })?));
        }
        Err(Error::parse(format!(
            "rule must be 'const:<digit>' or 'seed:<int>', got '{s}'"
        )))
    }
}

/// Specification of a truncated digit-rule set: prime, rule, depth.
///
/// Serializes to the text record `p=<prime> rule=<rule> depth=<N>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSpec {
    pub p: u64,
    pub rule: DigitRule,
    pub depth: u32,
}

impl SetSpec {
    pub fn new(p: u64, rule: DigitRule, depth: u32) -> Result<Self> {
        if p < 3 || !crate::arith::is_probable_prime(&BigUint::from(p)) {
            return Err(Error::domain(format!("p must be an odd prime, got {p}")));
        }
        if depth < 1 {
            return Err(Error::domain("depth must be at least 1"));
        }
        if let DigitRule::Constant(a) = rule {
            if a == 0 || a >= p {
                return Err(Error::domain(format!(
                    "constant digit {a} is not in 1..{p}"
                )));
            }
        }
        Ok(SetSpec { p, rule, depth })
    }

    pub fn to_record(&self) -> String {
        format!("p={} rule={} depth={}", self.p, self.rule, self.depth)
    }

    pub fn parse_record(s: &str) -> Result<Self> {
        let mut p = None;
        let mut rule = None;
        let mut depth = None;
        for tok in s.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("bad token '{tok}' in set record")))?;
            match key {
                "p" => p = Some(val.parse::<u64>().map_err(|_| Error::parse("bad p"))?),
                "rule" => rule = Some(val.parse::<DigitRule>()?),
                "depth" => depth = Some(val.parse::<u32>().map_err(|_| Error::parse("bad depth"))?),
                _ => return Err(Error::parse(format!("unknown key '{key}' in set record"))),
            }
        }
        match (p, rule, depth) {
            (Some(p), Some(rule), Some(depth)) => SetSpec::new(p, rule, depth),
            _ => Err(Error::parse("set record needs p=, rule= and depth=")),
        }
    }
}

/// The truncated set A: classes a_n·p^{n−1} + pⁿℤ_p for 1 ≤ n ≤ N.
///
/// Members of the n-th class have p-adic valuation exactly n−1, so the
/// classes are automatically pairwise disjoint.
pub fn proposition_set(spec: &SetSpec) -> Result<PadicOpenSet> {
    let SetSpec { p, rule, depth } = *spec;
    let mut classes = Vec::with_capacity(depth as usize);
    for n in 1..=depth {
        let a = rule.digit(p, n);
        if a == 0 || a % p == 0 {
            return Err(Error::domain(format!("digit a_{n} = {a} is zero mod {p}")));
        }
        let center = BigUint::from(a % p) * BigUint::from(p).pow(n - 1);
        classes.push(ResidueClass::new(p, n, center)?);
    }
    PadicOpenSet::new(p, classes, depth)
}

/// Exact truncated measure (1 − p^{−N})/(p−1) of the constant-digit set.
pub fn truncated_measure(p: u64, depth: u32) -> BigRational {
    let p_big = BigInt::from(p);
    let one = BigRational::one();
    let pn = BigRational::new(BigInt::one(), p_big.clone().pow(depth));
    (one - pn) / BigRational::from(p_big - BigInt::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn spec(p: u64, a: u64, depth: u32) -> SetSpec {
        SetSpec::new(p, DigitRule::Constant(a), depth).unwrap()
    }

    #[test]
    fn proposition_set_classes() {
        let set = proposition_set(&spec(5, 1, 2)).unwrap();
        assert_eq!(set.classes().len(), 2);
        assert_eq!(set.classes()[0].level(), 1);
        assert_eq!(*set.classes()[0].center(), BigUint::from(1u32));
        assert_eq!(set.classes()[1].level(), 2);
        assert_eq!(*set.classes()[1].center(), BigUint::from(5u32));

        let set = proposition_set(&spec(3, 2, 1)).unwrap();
        assert_eq!(set.classes().len(), 1);
        assert_eq!(*set.classes()[0].center(), BigUint::from(2u32));
        assert_eq!(set.haar_measure(), rat(1, 3));
    }

    #[test]
    fn haar_measure_values() {
        assert_eq!(proposition_set(&spec(5, 1, 3)).unwrap().haar_measure(), rat(31, 125));
        // Full Z_p as a single level-0 class.
        let full = PadicOpenSet::new(
            7,
            vec![ResidueClass::new(7, 0, BigUint::zero()).unwrap()],
            1,
        )
        .unwrap();
        assert_eq!(full.haar_measure(), BigRational::one());
        assert_eq!(PadicOpenSet::empty(5, 4).haar_measure(), BigRational::zero());
    }

    #[test]
    fn exact_measure_identity() {
        // haar(proposition_set(p, rule, N)) = (1 - p^{-N})/(p - 1).
        for p in [3u64, 5, 7] {
            for n in 1..=12u32 {
                let set = proposition_set(&spec(p, 1, n)).unwrap();
                assert_eq!(set.haar_measure(), truncated_measure(p, n));
                // Digit choice does not change the measure.
                let seeded = SetSpec::new(p, DigitRule::Seeded(42), n).unwrap();
                let set = proposition_set(&seeded).unwrap();
                assert_eq!(set.haar_measure(), truncated_measure(p, n));
            }
        }
    }

    #[test]
    fn contains_verdicts() {
        let set = proposition_set(&spec(5, 1, 4)).unwrap();
        assert_eq!(set.contains(&BigInt::from(6)), Membership::In);
        assert_eq!(set.contains(&BigInt::from(10)), Membership::Out);
        assert_eq!(set.contains(&BigInt::from(0)), Membership::Unknown);
        assert_eq!(set.contains(&BigInt::from(625)), Membership::Unknown);
        // Valuation 1 with digit 1: 5 + 25k.
        assert_eq!(set.contains(&BigInt::from(30)), Membership::In);
    }

    #[test]
    fn contains_decided_by_unique_level() {
        // Every x != 0 mod p^N gets its verdict from the class at level v_p(x)+1.
        let set = proposition_set(&spec(5, 2, 3)).unwrap();
        for x in 1..125i64 {
            let m = set.contains(&BigInt::from(x));
            let mut y = x;
            while y % 5 == 0 {
                y /= 5;
            }
            let expected = if y % 5 == 2 { Membership::In } else { Membership::Out };
            assert_eq!(m, expected, "x = {x}");
        }
    }

    #[test]
    fn intersect_subgroup_levels() {
        let set = proposition_set(&spec(5, 1, 4)).unwrap();
        assert_eq!(set.intersect_subgroup(0).unwrap(), set);
        let sub = set.intersect_subgroup(2).unwrap();
        assert_eq!(sub.classes().len(), 2);
        assert_eq!(sub.haar_measure(), rat(1, 125) + rat(1, 625));
        assert!(matches!(
            set.intersect_subgroup(4),
            Err(Error::DepthExceeded { .. })
        ));
    }

    #[test]
    fn relative_measure_persistence() {
        // haar(A ∩ p^m Z_p) * p^m = (1 - p^{-(N-m)})/(p-1) for constant digits.
        for p in [3u64, 5, 7] {
            let n = 8u32;
            let set = proposition_set(&spec(p, 1, n)).unwrap();
            for m in 0..n {
                let sub = set.intersect_subgroup(m).unwrap();
                let relative = sub.haar_measure() * BigRational::from(BigInt::from(p).pow(m));
                assert_eq!(relative, truncated_measure(p, n - m), "p={p} m={m}");
            }
        }
    }

    #[test]
    fn disjointness_is_enforced() {
        let a = ResidueClass::new(5, 1, BigUint::from(1u32)).unwrap();
        let b = ResidueClass::new(5, 2, BigUint::from(6u32)).unwrap();
        // 6 ≡ 1 mod 5, so b ⊆ a.
        assert!(PadicOpenSet::new(5, vec![a, b], 2).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(SetSpec::new(2, DigitRule::Constant(1), 3).is_err());
        assert!(SetSpec::new(9, DigitRule::Constant(1), 3).is_err());
        assert!(SetSpec::new(5, DigitRule::Constant(0), 3).is_err());
        assert!(SetSpec::new(5, DigitRule::Constant(5), 3).is_err());
        assert!(SetSpec::new(5, DigitRule::Constant(1), 0).is_err());
    }

    #[test]
    fn seeded_digits_are_nonzero_and_reproducible() {
        let rule = DigitRule::Seeded(20260823);
        for p in [3u64, 5, 7] {
            for n in 1..=16 {
                let d = rule.digit(p, n);
                assert!(d >= 1 && d < p);
                assert_eq!(d, rule.digit(p, n));
            }
        }
    }

    #[test]
    fn record_roundtrip() {
        for s in [
            spec(5, 1, 8),
            spec(7, 3, 12),
            SetSpec::new(5, DigitRule::Seeded(99), 4).unwrap(),
        ] {
            let rec = s.to_record();
            assert_eq!(SetSpec::parse_record(&rec).unwrap(), s);
        }
        assert_eq!(spec(5, 1, 8).to_record(), "p=5 rule=const:1 depth=8");
        assert!(SetSpec::parse_record("p=5 depth=8").is_err());
    }
}
