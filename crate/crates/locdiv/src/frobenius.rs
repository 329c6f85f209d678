//! The persistent prime set S over ℚ realized along the cyclotomic
//! ℤ_p-extension: Frobenius coordinates of primes as discrete logarithms in
//! 1 + pℤ/p^{N+1}, membership of primes in the truncated set, deterministic
//! enumeration, and empirical density estimation with Chebotarev-style
//! congruence filters emulating cyclotomic layers.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arith;
use crate::error::Error;
use crate::padic::{proposition_set, Membership, PadicOpenSet, SetSpec};
use crate::sieve::prime_sieve;
use crate::Result;

/// Specification of the persistent set S: an auxiliary odd prime p′, a
/// nonzero digit rule and a truncation depth N. Membership of a prime q is
/// decided by whether its Frobenius coordinate lies in the truncated set A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PersistentSetSpec {
    set: SetSpec,
}

impl PersistentSetSpec {
    pub fn new(set: SetSpec) -> Self {
        PersistentSetSpec { set }
    }

    /// Construct and check the density constraint 1/(p′−1) < ε.
    pub fn with_epsilon(set: SetSpec, epsilon: &BigRational) -> Result<Self> {
        let density = BigRational::new(BigInt::from(1), BigInt::from(set.p - 1));
        if &density >= epsilon {
            return Err(Error::domain(format!(
                "1/(p'-1) = {density} is not below epsilon = {epsilon}"
            )));
        }
        Ok(PersistentSetSpec { set })
    }

    pub fn p(&self) -> u64 {
        self.set.p
    }

    pub fn depth(&self) -> u32 {
        self.set.depth
    }

    pub fn set_spec(&self) -> &SetSpec {
        &self.set
    }

    pub fn open_set(&self) -> PadicOpenSet {
        proposition_set(&self.set).expect("validated spec")
    }
}

/// Precomputed data for coordinate extraction at a fixed spec.
///
/// The fast path works in u64 whenever p^{N+1} fits; the general path goes
/// through [`arith::discrete_log_1p`].
struct CoordCtx {
    p: u64,
    depth: u32,
    /// p^0 … p^{N+1}
    p_pows: Vec<u64>,
    /// (1+p)^{-p^i} mod p^{N+1} for i < N
    ginv_pows: Vec<u64>,
}

impl CoordCtx {
    fn new(p: u64, depth: u32) -> Option<CoordCtx> {
        let mut p_pows = vec![1u64];
        for _ in 0..=depth {
            p_pows.push(p_pows.last()?.checked_mul(p)?);
        }
        let modulus = p_pows[depth as usize + 1];
        let ginv = arith::inv_mod_u64(p + 1, modulus)?;
        let mut ginv_pows = Vec::with_capacity(depth as usize);
        let mut acc = ginv;
        for _ in 0..depth {
            ginv_pows.push(acc);
            acc = arith::pow_mod_u64(acc, p, modulus);
        }
        Some(CoordCtx {
            p,
            depth,
            p_pows,
            ginv_pows,
        })
    }

    fn modulus(&self) -> u64 {
        self.p_pows[self.depth as usize + 1]
    }

    /// The unique x mod p^N with (1+p)^x ≡ q^{p−1} mod p^{N+1}.
    fn coordinate(&self, q: u64) -> u64 {
        let m = self.modulus();
        let u = arith::pow_mod_u64(q % m, self.p - 1, m);
        let mut z = u;
        let mut x = 0u64;
        for i in 0..self.depth as usize {
            let zr = z % self.p_pows[i + 2];
            debug_assert_eq!((zr - 1) % self.p_pows[i], 0);
            let digit = ((zr - 1) / self.p_pows[i + 1]) % self.p;
            x += digit * self.p_pows[i];
            for _ in 0..digit {
                z = arith::mul_mod_u64(z, self.ginv_pows[i], m);
            }
        }
        debug_assert_eq!(z % self.p_pows[self.depth as usize + 1], 1);
        x
    }
}

/// Image of Frob_q in Gal(ℚ_∞/ℚ) ≅ ℤ_{p′}, reduced mod p′^N.
pub fn frobenius_coordinate(q: u64, spec: &PersistentSetSpec) -> Result<BigUint> {
    if q == spec.p() {
        return Err(Error::domain(format!(
            "the auxiliary prime {} ramifies in its own tower",
            q
        )));
    }
    if let Some(ctx) = CoordCtx::new(spec.p(), spec.depth()) {
        return Ok(BigUint::from(ctx.coordinate(q)));
    }
    // General path for p^{N+1} beyond u64.
    let modulus = BigUint::from(spec.p()).pow(spec.depth() + 1);
    let base = arith::ResidueInt::new(BigInt::from(q), modulus);
    let u = arith::mod_pow(&base, &BigUint::from(spec.p() - 1));
    arith::discrete_log_1p(&u, spec.p())
}

/// Membership of a prime q in the persistent set S.
///
/// q = p′ is `Out` by convention (the finitely many ramified primes are
/// ignored); `Unknown` means the coordinate vanishes mod p′^N and the
/// truncation cannot decide.
pub fn in_persistent_set(q: u64, spec: &PersistentSetSpec) -> Membership {
    if q == spec.p() {
        return Membership::Out;
    }
    let x = frobenius_coordinate(q, spec).expect("q != p'");
    spec.open_set().contains(&BigInt::from(x))
}

/// One enumerated prime with its verdict and coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetMember {
    pub q: u64,
    pub verdict: Membership,
    /// Frobenius coordinate mod p′^N; `None` for q = p′.
    pub coordinate: Option<BigUint>,
}

/// Deterministic ascending enumeration of primes q ≤ X with verdicts.
pub fn enumerate_set(spec: &PersistentSetSpec, x_bound: u64) -> Vec<SetMember> {
    enumerate_over_primes(spec, &prime_sieve(x_bound))
}

/// Enumeration over a caller-provided ascending prime list.
pub fn enumerate_over_primes(spec: &PersistentSetSpec, primes: &[u64]) -> Vec<SetMember> {
    let open_set = spec.open_set();
    let ctx = CoordCtx::new(spec.p(), spec.depth());
    primes
        .iter()
        .map(|&q| {
            if q == spec.p() {
                return SetMember {
                    q,
                    verdict: Membership::Out,
                    coordinate: None,
                };
            }
            let x = match &ctx {
                Some(ctx) => BigUint::from(ctx.coordinate(q)),
                None => frobenius_coordinate(q, spec).expect("q != p'"),
            };
            let verdict = open_set.contains(&BigInt::from(x.clone()));
            SetMember {
                q,
                verdict,
                coordinate: Some(x),
            }
        })
        .collect()
}

/// Congruence predicate q mod m ∈ R emulating a Chebotarev condition in a
/// cyclotomic layer ℚ(ζ_m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChebotarevPredicate {
    modulus: u64,
    residues: BTreeSet<u64>,
}

impl ChebotarevPredicate {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residues(&self) -> &BTreeSet<u64> {
        &self.residues
    }

    pub fn matches(&self, q: u64) -> bool {
        if self.modulus == 1 {
            return true;
        }
        q % self.modulus != 0 && self.residues.contains(&(q % self.modulus))
    }
}

/// Build the predicate q ↦ (q ∤ m and q mod m ∈ residues).
pub fn chebotarev_filter(m: u64, residues: &[u64]) -> Result<ChebotarevPredicate> {
    if m == 0 {
        return Err(Error::domain("filter modulus must be positive"));
    }
    let mut set = BTreeSet::new();
    for &r in residues {
        let r = r % m.max(1);
        if m > 1 && num_integer::gcd(r, m) != 1 {
            return Err(Error::domain(format!(
                "residue {r} is not coprime to the modulus {m}"
            )));
        }
        set.insert(r);
    }
    Ok(ChebotarevPredicate {
        modulus: m,
        residues: set,
    })
}

/// Empirical natural-density estimate of S among filtered primes ≤ X.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityEstimate {
    pub numerator: u64,
    pub denominator: u64,
    #[serde(skip)]
    pub ratio: BigRational,
    pub unknown: u64,
    pub bound: u64,
}

impl DensityEstimate {
    /// Ratio as f64, for human-readable reporting only; all stored values
    /// stay exact.
    pub fn ratio_f64(&self) -> f64 {
        if self.denominator == 0 {
            return 0.0;
        }
        self.numerator as f64 / self.denominator as f64
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "numerator": self.numerator,
            "denominator": self.denominator,
            "ratio_num": self.ratio.numer().to_string(),
            "ratio_den": self.ratio.denom().to_string(),
            "unknown": self.unknown,
            "limit": self.bound,
        })
    }
}

/// Ratio #{q ≤ X : q ∈ S, filter(q)} / #{q ≤ X : filter(q)}.
///
/// `Unknown` verdicts are counted separately and excluded from the
/// numerator.
pub fn estimate_density(
    spec: &PersistentSetSpec,
    x_bound: u64,
    filter: Option<&ChebotarevPredicate>,
) -> DensityEstimate {
    density_from_enumeration(&enumerate_set(spec, x_bound), x_bound, filter)
}

/// Density over an existing enumeration (avoids re-sieving when several
/// filters are applied to the same set).
pub fn density_from_enumeration(
    members: &[SetMember],
    x_bound: u64,
    filter: Option<&ChebotarevPredicate>,
) -> DensityEstimate {
    let mut numerator = 0u64;
    let mut denominator = 0u64;
    let mut unknown = 0u64;
    for m in members {
        if m.q > x_bound {
            break;
        }
        if let Some(f) = filter {
            if !f.matches(m.q) {
                continue;
            }
        }
        denominator += 1;
        match m.verdict {
            Membership::In => numerator += 1,
            Membership::Unknown => unknown += 1,
            Membership::Out => {}
        }
    }
    let ratio = if denominator == 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(numerator), BigInt::from(denominator))
    };
    DensityEstimate {
        numerator,
        denominator,
        ratio,
        unknown,
        bound: x_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use crate::padic::DigitRule;

    fn spec(p: u64, digit: u64, depth: u32) -> PersistentSetSpec {
        PersistentSetSpec::new(SetSpec::new(p, DigitRule::Constant(digit), depth).unwrap())
    }

    #[test]
    fn coordinate_examples() {
        let s = spec(5, 1, 2);
        // 7^4 = 2401 ≡ 26 ≡ 6^5 mod 125, so x = 5.
        assert_eq!(frobenius_coordinate(7, &s).unwrap(), BigUint::from(5u32));
        // q ≡ 1 mod p^{N+1} gives x = 0: 251 is prime, 251 ≡ 1 mod 125.
        assert_eq!(frobenius_coordinate(251, &s).unwrap(), BigUint::from(0u32));
        // q ≡ 6 mod 125: 881 is prime and 881 = 7*125 + 6, so
        // q^4 ≡ 6^4 ≡ 46 ≡ 6^4 mod 125 and x = 4.
        assert_eq!(frobenius_coordinate(881, &s).unwrap(), BigUint::from(4u32));
        assert!(frobenius_coordinate(5, &s).is_err());
    }

    #[test]
    fn coordinate_matches_generic_discrete_log() {
        let s = spec(5, 1, 4);
        let modulus = BigUint::from(5u64).pow(5);
        for q in [2u64, 3, 7, 11, 13, 101, 1999] {
            let base = arith::ResidueInt::new(BigInt::from(q), modulus.clone());
            let u = arith::mod_pow(&base, &BigUint::from(4u32));
            let expect = arith::discrete_log_1p(&u, 5).unwrap();
            assert_eq!(frobenius_coordinate(q, &s).unwrap(), expect, "q = {q}");
        }
    }

    #[test]
    fn coordinate_brute_force_small() {
        // Brute-force (1+p)^x sweep cross-check at p'=3, N=3.
        let s = spec(3, 1, 3);
        let m = 81u64;
        for q in [2u64, 5, 7, 11, 13, 17, 19, 23] {
            let u = arith::pow_mod_u64(q, 2, m);
            let mut expect = None;
            for x in 0..27u64 {
                if arith::pow_mod_u64(4, x, m) == u {
                    expect = Some(x);
                    break;
                }
            }
            assert_eq!(
                frobenius_coordinate(q, &s).unwrap(),
                BigUint::from(expect.unwrap()),
                "q = {q}"
            );
        }
    }

    #[test]
    fn membership_examples() {
        let s = spec(5, 1, 4);
        // x(7) = 5 mod 625: valuation 1, digit 1 -> In with constant digit 1.
        assert_eq!(in_persistent_set(7, &s), Membership::In);
        assert_eq!(in_persistent_set(5, &s), Membership::Out);
        // x(2): 2^4 = 16, coordinate has valuation 0; digit != 1 -> Out.
        let x2 = frobenius_coordinate(2, &s).unwrap().to_u64().unwrap();
        assert_ne!(x2 % 5, 1);
        assert_eq!(in_persistent_set(2, &s), Membership::Out);
    }

    #[test]
    fn coordinate_depends_only_on_residue() {
        let s = spec(5, 1, 2);
        // 7 and 257 are both ≡ 7 mod 125.
        assert_eq!(
            frobenius_coordinate(7, &s).unwrap(),
            frobenius_coordinate(257, &s).unwrap()
        );
    }

    #[test]
    fn homomorphism_shadow() {
        // If q*r ≡ s mod p^{N+1} for primes q, r, s then x(q)+x(r) ≡ x(s) mod p^N.
        let s = spec(5, 1, 2);
        let pn1 = 125u64;
        let pn = BigUint::from(25u32);
        let primes = prime_sieve(3000);
        let mut checked = 0;
        for &q in &primes[..40] {
            for &r in &primes[..40] {
                if q == 5 || r == 5 {
                    continue;
                }
                let target = (q * r) % pn1;
                if let Some(&sprime) = primes.iter().find(|&&t| t % pn1 == target && t != 5) {
                    let lhs = (frobenius_coordinate(q, &s).unwrap()
                        + frobenius_coordinate(r, &s).unwrap())
                        % &pn;
                    let rhs = frobenius_coordinate(sprime, &s).unwrap();
                    assert_eq!(lhs, rhs, "q={q} r={r} s={sprime}");
                    checked += 1;
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn enumerate_small() {
        let s = spec(5, 1, 4);
        let members = enumerate_set(&s, 20);
        let qs: Vec<u64> = members.iter().map(|m| m.q).collect();
        assert_eq!(qs, vec![2, 3, 5, 7, 11, 13, 17, 19]);
        let m5 = members.iter().find(|m| m.q == 5).unwrap();
        assert_eq!(m5.verdict, Membership::Out);
        assert!(m5.coordinate.is_none());
        let m7 = members.iter().find(|m| m.q == 7).unwrap();
        assert_eq!(m7.verdict, Membership::In);
        assert!(enumerate_set(&s, 1).is_empty());
    }

    #[test]
    fn filters() {
        let f = chebotarev_filter(4, &[1]).unwrap();
        assert!(f.matches(5));
        assert!(!f.matches(7));
        assert!(!f.matches(2));
        let all = chebotarev_filter(1, &[]).unwrap();
        assert!(all.matches(2) && all.matches(97));
        assert!(chebotarev_filter(4, &[2]).is_err());
    }

    #[test]
    fn dirichlet_sanity_mod7() {
        // Primes ≡ 1 mod 7 among primes ≤ 100000: near 1/6.
        let primes = prime_sieve(100_000);
        let count = primes.iter().filter(|&&q| q % 7 == 1).count();
        let ratio = count as f64 / primes.len() as f64;
        assert!((ratio - 1.0 / 6.0).abs() < 0.01, "ratio = {ratio}");
    }

    #[test]
    fn density_small_bound() {
        // At X = 50000 with depth 6 the ratio is already near 1/4.
        let s = spec(5, 1, 6);
        let d = estimate_density(&s, 50_000, None);
        assert_eq!(d.numerator + d.unknown <= d.denominator, true);
        assert!((d.ratio_f64() - 0.25).abs() < 0.03, "ratio = {}", d.ratio_f64());
        // Unknown fraction is tiny: coordinates vanish mod 5^6 rarely.
        assert!(d.unknown <= d.denominator / 100);
    }

    #[test]
    fn epsilon_check() {
        let set = SetSpec::new(5, DigitRule::Constant(1), 4).unwrap();
        let eps = BigRational::new(BigInt::from(3), BigInt::from(10));
        assert!(PersistentSetSpec::with_epsilon(set.clone(), &eps).is_ok());
        let eps = BigRational::new(BigInt::from(1), BigInt::from(4));
        assert!(PersistentSetSpec::with_epsilon(set, &eps).is_err());
    }
}
