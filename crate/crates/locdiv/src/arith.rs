//! Exact modular arithmetic: residue integers, Legendre symbols, modular
//! square roots, the digit-by-digit discrete logarithm in 1 + pℤ_p, and a
//! budgeted integer factorization helper (trial division plus capped
//! Pollard rho).

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;
use crate::Result;

/// An integer reduced modulo a fixed positive modulus.
///
/// Operations are only defined between residues with equal moduli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueInt {
    value: BigUint,
    modulus: BigUint,
}

impl ResidueInt {
    pub fn new(value: impl Into<BigInt>, modulus: impl Into<BigUint>) -> Self {
        let modulus: BigUint = modulus.into();
        assert!(modulus >= BigUint::from(2u32), "modulus must be at least 2");
        let m = BigInt::from(modulus.clone());
        let v: BigInt = value.into().mod_floor(&m);
        ResidueInt {
            value: v.to_biguint().unwrap(),
            modulus,
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    fn assert_same_modulus(&self, other: &Self) {
        assert_eq!(
            self.modulus, other.modulus,
            "operation between residues with different moduli"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_modulus(other);
        let mut v = &self.value + &other.value;
        if v >= self.modulus {
            v -= &self.modulus;
        }
        ResidueInt {
            value: v,
            modulus: self.modulus.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_modulus(other);
        let v = if self.value >= other.value {
            &self.value - &other.value
        } else {
            &self.modulus - &other.value + &self.value
        };
        ResidueInt {
            value: v,
            modulus: self.modulus.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_modulus(other);
        ResidueInt {
            value: (&self.value * &other.value) % &self.modulus,
            modulus: self.modulus.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        let v = if self.value.is_zero() {
            BigUint::zero()
        } else {
            &self.modulus - &self.value
        };
        ResidueInt {
            value: v,
            modulus: self.modulus.clone(),
        }
    }
}

/// `base^exp mod m` by square-and-multiply.
pub fn mod_pow(base: &ResidueInt, exp: &BigUint) -> ResidueInt {
    ResidueInt {
        value: base.value.modpow(exp, &base.modulus),
        modulus: base.modulus.clone(),
    }
}

/// Multiplicative inverse modulo `m` via extended Euclid.
///
/// Fails with [`Error::NotInvertible`] when `gcd(x, m) > 1`.
pub fn mod_inverse(x: &ResidueInt) -> Result<ResidueInt> {
    let a = BigInt::from(x.value.clone());
    let m = BigInt::from(x.modulus.clone());
    let ext = a.extended_gcd(&m);
    if !ext.gcd.is_one() {
        return Err(Error::NotInvertible {
            value: x.value.to_string(),
            modulus: x.modulus.to_string(),
        });
    }
    Ok(ResidueInt::new(ext.x, x.modulus.clone()))
}

/// Legendre symbol (a/ℓ) for an odd prime ℓ, via the Euler criterion.
pub fn legendre_symbol(a: &BigInt, ell: u64) -> i32 {
    debug_assert!(ell > 2 && ell % 2 == 1);
    let l = BigInt::from(ell);
    let r = a.mod_floor(&l).to_u64().unwrap();
    if r == 0 {
        return 0;
    }
    let e = pow_mod_u64(r, (ell - 1) / 2, ell);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Square root of `a` modulo an odd prime ℓ, if one exists.
///
/// Returns the smaller of the two roots. Uses Tonelli–Shanks.
pub fn sqrt_mod(a: &BigInt, ell: u64) -> Option<u64> {
    debug_assert!(ell > 2 && ell % 2 == 1);
    let l = BigInt::from(ell);
    let a = a.mod_floor(&l).to_u64().unwrap();
    if a == 0 {
        return Some(0);
    }
    if pow_mod_u64(a, (ell - 1) / 2, ell) != 1 {
        return None;
    }
    // Write ell - 1 = q * 2^s with q odd.
    let mut q = ell - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let root = if s == 1 {
        pow_mod_u64(a, (ell + 1) / 4, ell)
    } else {
        // Find a quadratic non-residue z.
        let mut z = 2;
        while pow_mod_u64(z, (ell - 1) / 2, ell) == 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = pow_mod_u64(z, q, ell);
        let mut t = pow_mod_u64(a, q, ell);
        let mut r = pow_mod_u64(a, (q + 1) / 2, ell);
        while t != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2 != 1 {
                t2 = mul_mod_u64(t2, t2, ell);
                i += 1;
            }
            let b = pow_mod_u64(c, 1 << (m - i - 1), ell);
            m = i;
            c = mul_mod_u64(b, b, ell);
            t = mul_mod_u64(t, c, ell);
            r = mul_mod_u64(r, b, ell);
        }
        r
    };
    Some(root.min(ell - root))
}

/// Discrete logarithm in the group 1 + pℤ/p^{N+1} with base 1 + p.
///
/// The modulus of `u` must be p^{N+1} for some N ≥ 1 and `u ≡ 1 mod p`.
/// Returns the unique x mod p^N with (1+p)^x ≡ u, computed digit by digit:
/// the i-th digit is read off from u·(1+p)^{-x_{<i}} mod p^{i+2}.
pub fn discrete_log_1p(u: &ResidueInt, p: u64) -> Result<BigUint> {
    let p_big = BigUint::from(p);
    if p < 3 || p % 2 == 0 {
        return Err(Error::domain("discrete_log_1p requires an odd prime p"));
    }
    // Recover N from the modulus.
    let mut n_plus_1 = 0u32;
    let mut m = u.modulus.clone();
    while m > BigUint::one() {
        let (q, r) = m.div_rem(&p_big);
        if !r.is_zero() {
            return Err(Error::domain("modulus is not a power of p"));
        }
        m = q;
        n_plus_1 += 1;
    }
    if n_plus_1 < 2 {
        return Err(Error::domain("modulus must be at least p^2"));
    }
    let n = n_plus_1 - 1;
    if (&u.value % &p_big) != BigUint::one() {
        return Err(Error::domain("u is not congruent to 1 mod p"));
    }

    let modulus = &u.modulus;
    let g = ResidueInt::new(BigInt::from(p + 1), modulus.clone());
    let ginv = mod_inverse(&g).expect("1+p is a unit mod p^{N+1}");

    // ginv_pow holds (1+p)^{-p^i}; z accumulates u * (1+p)^{-x_{<i}}.
    let mut ginv_pow = ginv.value.clone();
    let mut z = u.value.clone();
    let mut x = BigUint::zero();
    let mut p_pow_i = BigUint::one(); // p^i
    let mut p_pow_i1 = p_big.clone(); // p^{i+1}
    for _ in 0..n {
        let p_pow_i2 = &p_pow_i1 * &p_big;
        let zr = &z % &p_pow_i2;
        debug_assert!((&zr % &p_pow_i1).is_one() || !(&zr % &p_pow_i1).is_one());
        let delta = (&zr - BigUint::one()) / &p_pow_i1;
        let digit = (&delta % &p_big).to_u64().unwrap();
        x += &p_pow_i * BigUint::from(digit);
        if digit != 0 {
            let step = ginv_pow.modpow(&BigUint::from(digit), modulus);
            z = (&z * step) % modulus;
        }
        ginv_pow = ginv_pow.modpow(&p_big, modulus);
        p_pow_i = p_pow_i1.clone();
        p_pow_i1 = p_pow_i2;
    }
    debug_assert!((&z % &p_pow_i1).is_one());
    Ok(x)
}

/// `a * b mod m` without overflow.
pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `a^e mod m` without overflow.
pub fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m` for u64 inputs, if it exists.
pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Miller–Rabin probable-prime test, deterministic for inputs below 3.3·10^24
/// via a fixed base set, with extra random-free bases for larger inputs.
pub fn is_probable_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - BigUint::one();
    let mut d = n_minus_1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Budgeted factorization: trial division below 10^6, then capped Pollard
/// rho on the remaining cofactor. Returns `None` when the budget is
/// exhausted before the cofactor splits.
pub fn factorize(n: &BigUint) -> Option<BTreeMap<BigUint, u32>> {
    const TRIAL_LIMIT: u64 = 1_000_000;
    const RHO_ITERATIONS: u64 = 1 << 20;

    let mut factors = BTreeMap::new();
    if n.is_zero() {
        return None;
    }
    let mut rem = n.clone();
    let mut d = 2u64;
    while d < TRIAL_LIMIT {
        let db = BigUint::from(d);
        if &db * &db > rem {
            break;
        }
        while (&rem % &db).is_zero() {
            rem /= &db;
            *factors.entry(db.clone()).or_insert(0) += 1;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![rem];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            *factors.entry(m).or_insert(0) += 1;
            continue;
        }
        let f = pollard_rho(&m, RHO_ITERATIONS)?;
        stack.push(&m / &f);
        stack.push(f);
    }
    Some(factors)
}

fn pollard_rho(n: &BigUint, max_iter: u64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    // Brent's cycle variant with deterministic parameter sweep.
    for c in 1u64..20 {
        let c = BigUint::from(c);
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        let mut iter = 0u64;
        while d.is_one() {
            if iter > max_iter {
                break;
            }
            iter += 1;
            x = (&x * &x + &c) % n;
            y = (&y * &y + &c) % n;
            y = (&y * &y + &c) % n;
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if !d.is_one() && d != *n {
            return Some(d);
        }
    }
    None
}

/// All positive divisors from a factorization, unordered cap-checked.
pub fn divisors_from_factorization(factors: &BTreeMap<BigUint, u32>, cap: usize) -> Option<Vec<BigUint>> {
    let mut divs = vec![BigUint::one()];
    for (p, &e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pe = BigUint::one();
            for _ in 0..=e {
                next.push(d * &pe);
                pe *= p;
            }
        }
        if next.len() > cap {
            return None;
        }
        divs = next;
    }
    Some(divs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn res(v: i64, m: u64) -> ResidueInt {
        ResidueInt::new(BigInt::from(v), BigUint::from(m))
    }

    #[test]
    fn mod_pow_examples() {
        assert_eq!(*mod_pow(&res(2, 7), &BigUint::zero()).value(), BigUint::one());
        assert_eq!(
            *mod_pow(&res(7, 125), &BigUint::from(4u32)).value(),
            BigUint::from(26u32)
        );
        assert_eq!(
            *mod_pow(&res(6, 125), &BigUint::from(5u32)).value(),
            BigUint::from(26u32)
        );
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(*mod_inverse(&res(1, 9)).unwrap().value(), BigUint::one());
        assert_eq!(*mod_inverse(&res(3, 7)).unwrap().value(), BigUint::from(5u32));
        assert!(matches!(
            mod_inverse(&res(2, 4)),
            Err(Error::NotInvertible { .. })
        ));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_symbol(&BigInt::from(0), 5), 0);
        assert_eq!(legendre_symbol(&BigInt::from(4), 5), 1);
        assert_eq!(legendre_symbol(&BigInt::from(2), 5), -1);
    }

    #[test]
    fn sqrt_mod_examples() {
        assert_eq!(sqrt_mod(&BigInt::from(0), 5), Some(0));
        assert_eq!(sqrt_mod(&BigInt::from(4), 5), Some(2));
        assert_eq!(sqrt_mod(&BigInt::from(2), 5), None);
        // 13 ≡ 1 mod 4 exercises the full Tonelli-Shanks loop.
        let r = sqrt_mod(&BigInt::from(10), 13).unwrap();
        assert_eq!(mul_mod_u64(r, r, 13), 10);
    }

    #[test]
    fn discrete_log_examples() {
        let m = BigUint::from(125u32);
        assert_eq!(
            discrete_log_1p(&ResidueInt::new(BigInt::from(1), m.clone()), 5).unwrap(),
            BigUint::zero()
        );
        assert_eq!(
            discrete_log_1p(&ResidueInt::new(BigInt::from(26), m.clone()), 5).unwrap(),
            BigUint::from(5u32)
        );
        assert_eq!(
            discrete_log_1p(&ResidueInt::new(BigInt::from(6), m.clone()), 5).unwrap(),
            BigUint::from(1u32)
        );
        assert!(discrete_log_1p(&ResidueInt::new(BigInt::from(7), m), 5).is_err());
    }

    #[test]
    fn discrete_log_brute_force_agreement() {
        // p=5, N=2: check every element of 1 + 5Z/125 against exhaustive search.
        let m = BigUint::from(125u32);
        let g = ResidueInt::new(BigInt::from(6), m.clone());
        for x in 0u32..25 {
            let u = mod_pow(&g, &BigUint::from(x));
            assert_eq!(discrete_log_1p(&u, 5).unwrap(), BigUint::from(x));
        }
    }

    #[test]
    fn factorize_small() {
        let f = factorize(&BigUint::from(360u32)).unwrap();
        assert_eq!(f.get(&BigUint::from(2u32)), Some(&3));
        assert_eq!(f.get(&BigUint::from(3u32)), Some(&2));
        assert_eq!(f.get(&BigUint::from(5u32)), Some(&1));
        let divs = divisors_from_factorization(&f, 1000).unwrap();
        assert_eq!(divs.len(), 24);
    }

    #[test]
    fn factorize_semiprime_via_rho() {
        // 1000003 * 1000033 exceeds the trial-division limit squared budget path.
        let n = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64);
        let f = factorize(&n).unwrap();
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn miller_rabin_known_values() {
        assert!(is_probable_prime(&BigUint::from(2u32)));
        assert!(is_probable_prime(&BigUint::from(1_000_003u64)));
        assert!(!is_probable_prime(&BigUint::from(1u32)));
        assert!(!is_probable_prime(&(BigUint::from(1_000_003u64) * 7u32)));
        // Carmichael number.
        assert!(!is_probable_prime(&BigUint::from(561u32)));
    }

    proptest! {
        #[test]
        fn inverse_roundtrip(x in 1u64..1000, m in 2u64..1000) {
            let r = res(x as i64, m);
            if let Ok(inv) = mod_inverse(&r) {
                prop_assert!(r.mul(&inv).is_one());
            } else {
                prop_assert!(num_integer::gcd(x % m, m) > 1 || x % m == 0);
            }
        }

        #[test]
        fn legendre_matches_sqrt(a in 0i64..100, idx in 0usize..5) {
            let ells = [5u64, 7, 11, 13, 17];
            let ell = ells[idx];
            let a = BigInt::from(a);
            let sym = legendre_symbol(&a, ell);
            let root = sqrt_mod(&a, ell);
            match sym {
                0 => prop_assert_eq!(root, Some(0)),
                1 => {
                    let r = root.unwrap();
                    let expect = a.mod_floor(&BigInt::from(ell)).to_u64().unwrap();
                    prop_assert_eq!(mul_mod_u64(r, r, ell), expect);
                }
                _ => prop_assert_eq!(root, None),
            }
        }

        #[test]
        fn discrete_log_pow_roundtrip(x in 0u64..125, pidx in 0usize..2) {
            let (p, n) = [(5u64, 3u32), (3u64, 4u32)][pidx];
            let modulus = BigUint::from(p).pow(n + 1);
            let pn = BigUint::from(p).pow(n);
            let x = BigUint::from(x) % &pn;
            let g = ResidueInt::new(BigInt::from(p + 1), modulus);
            let u = mod_pow(&g, &x);
            prop_assert_eq!(discrete_log_1p(&u, p).unwrap(), x);
        }
    }
}
