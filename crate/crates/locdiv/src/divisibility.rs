//! Divisibility oracles: exact global pⁿ-divisibility of rational points via
//! division polynomials and rational root search, and local pⁿ-divisibility
//! in E(F_ℓ) at good odd primes via the Sylow decomposition of the reduced
//! group (with a brute-force cross-check mode).

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::elliptic::{RationalCurve, RationalPoint, ReducedCurve, ReducedPoint};
use crate::error::Error;
use crate::Result;

/// Largest bit size of a constant/leading coefficient for which the
/// divisor-enumeration root search is attempted before falling back to the
/// modular lifting route.
const DIVISOR_ROUTE_BIT_LIMIT: u64 = 96;
const DIVISOR_CAP: usize = 2048;
const CANDIDATE_CAP: usize = 20_000;

// ---------------------------------------------------------------------------
// Dense integer polynomials (little-endian coefficients, trimmed).

#[derive(Debug, Clone, PartialEq, Eq)]
struct Poly(Vec<BigInt>);

impl Poly {
    fn zero() -> Self {
        Poly(Vec::new())
    }

    fn constant(c: i64) -> Self {
        Poly(vec![BigInt::from(c)]).trimmed()
    }

    fn from_coeffs(c: Vec<BigInt>) -> Self {
        Poly(c).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect()).trimmed()
    }

    fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect()).trimmed()
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    fn scale(&self, c: &BigInt) -> Poly {
        Poly(self.0.iter().map(|x| x * c).collect()).trimmed()
    }

    fn derivative(&self) -> Poly {
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
        .trimmed()
    }

    /// Exact division by a monic-leading divisor; panics if not exact.
    fn div_exact(&self, div: &Poly) -> Poly {
        assert!(!div.is_zero());
        let mut rem = self.0.clone();
        if rem.len() < div.0.len() {
            assert!(self.is_zero(), "inexact polynomial division");
            return Poly::zero();
        }
        let dl = div.0.last().unwrap();
        let qlen = rem.len() - div.0.len() + 1;
        let mut q = vec![BigInt::zero(); qlen];
        for k in (0..qlen).rev() {
            let top = rem[k + div.0.len() - 1].clone();
            let (c, r) = top.div_rem(dl);
            assert!(r.is_zero(), "inexact polynomial division");
            for (j, d) in div.0.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            q[k] = c;
        }
        assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
        Poly(q).trimmed()
    }

    fn div_scalar_exact(&self, c: &BigInt) -> Poly {
        Poly(
            self.0
                .iter()
                .map(|x| {
                    let (q, r) = x.div_rem(c);
                    assert!(r.is_zero(), "inexact scalar division");
                    q
                })
                .collect(),
        )
    }

    /// Homogeneous evaluation Σ aᵢ rⁱ s^{d−i}; zero iff r/s is a root
    /// (for s ≠ 0).
    fn eval_homogeneous(&self, r: &BigInt, s: &BigInt) -> BigInt {
        let d = self.degree();
        let mut rp = BigInt::one();
        let mut acc = BigInt::zero();
        let mut spows = vec![BigInt::one()];
        for _ in 0..d {
            spows.push(spows.last().unwrap() * s);
        }
        for (i, a) in self.0.iter().enumerate() {
            acc += a * &rp * &spows[d - i];
            rp *= r;
        }
        acc
    }

    fn eval_mod_big(&self, t: &BigInt, m: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.0.iter().rev() {
            acc = (acc * t + c).mod_floor(m);
        }
        acc
    }

    fn reduce_mod_u64(&self, l: u64) -> Vec<u64> {
        let lb = BigInt::from(l);
        let mut out: Vec<u64> = self
            .0
            .iter()
            .map(|c| c.mod_floor(&lb).to_u64().unwrap())
            .collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }

    fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.0 {
            g = g.gcd(c);
        }
        g
    }
}

// ---------------------------------------------------------------------------
// The coordinate ring element a(x) + b(x)·y with y² = x³ + Ax + B.

#[derive(Debug, Clone)]
struct YPoly {
    a: Poly,
    b: Poly,
}

impl YPoly {
    fn pure(a: Poly) -> Self {
        YPoly { a, b: Poly::zero() }
    }

    fn y_times(b: Poly) -> Self {
        YPoly { a: Poly::zero(), b }
    }

    fn mul(&self, other: &YPoly, f: &Poly) -> YPoly {
        YPoly {
            a: self.a.mul(&other.a).add(&self.b.mul(&other.b).mul(f)),
            b: self.a.mul(&other.b).add(&self.b.mul(&other.a)),
        }
    }

    fn sub(&self, other: &YPoly) -> YPoly {
        YPoly {
            a: self.a.sub(&other.a),
            b: self.b.sub(&other.b),
        }
    }

    fn square(&self, f: &Poly) -> YPoly {
        self.mul(self, f)
    }

    /// Exact division by 2y: from X = 2y(c + dy) = 2df + 2cy recover c, d.
    fn div_2y(&self, f: &Poly) -> YPoly {
        YPoly {
            a: self.b.div_scalar_exact(&BigInt::from(2)),
            b: self.a.div_exact(f).div_scalar_exact(&BigInt::from(2)),
        }
    }
}

/// ψ₀..ψ_{m_max} on y² = x³ + ax + b (integer model).
fn psi_table(a: &BigInt, b: &BigInt, m_max: u64) -> Vec<YPoly> {
    let f = Poly::from_coeffs(vec![b.clone(), a.clone(), BigInt::zero(), BigInt::one()]);
    let mut t: Vec<YPoly> = Vec::with_capacity(m_max as usize + 1);
    t.push(YPoly::pure(Poly::zero()));
    t.push(YPoly::pure(Poly::constant(1)));
    if m_max >= 2 {
        t.push(YPoly::y_times(Poly::constant(2)));
    }
    if m_max >= 3 {
        // 3x⁴ + 6ax² + 12bx − a²
        t.push(YPoly::pure(Poly::from_coeffs(vec![
            -(a * a),
            BigInt::from(12) * b,
            BigInt::from(6) * a,
            BigInt::zero(),
            BigInt::from(3),
        ])));
    }
    if m_max >= 4 {
        // 4y(x⁶ + 5ax⁴ + 20bx³ − 5a²x² − 4abx − 8b² − a³)
        t.push(YPoly::y_times(
            Poly::from_coeffs(vec![
                BigInt::from(-8) * b * b - a.pow(3),
                BigInt::from(-4) * a * b,
                BigInt::from(-5) * a * a,
                BigInt::from(20) * b,
                BigInt::from(5) * a,
                BigInt::zero(),
                BigInt::one(),
            ])
            .scale(&BigInt::from(4)),
        ));
    }
    for m in 5..=m_max as usize {
        let k = m / 2;
        let next = if m % 2 == 1 {
            t[k + 2]
                .mul(&t[k].square(&f).mul(&t[k], &f), &f)
                .sub(&t[k - 1].mul(&t[k + 1].square(&f).mul(&t[k + 1], &f), &f))
        } else {
            t[k].mul(
                &t[k + 2]
                    .mul(&t[k - 1].square(&f), &f)
                    .sub(&t[k - 2].mul(&t[k + 1].square(&f), &f)),
                &f,
            )
            .div_2y(&f)
        };
        t.push(next);
    }
    t
}

/// The m-th division polynomial of a curve, in the y-free normal form on the
/// curve's integral model: for odd m this is ψ_m ∈ ℤ[x]; for even m it is the
/// x-part g with ψ_m = g·y.
#[derive(Debug, Clone)]
pub struct DivisionPolynomial {
    pub m: u64,
    coeffs: Vec<BigInt>,
    has_y: bool,
    curve: RationalCurve,
}

impl DivisionPolynomial {
    pub fn new(curve: &RationalCurve, m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("division polynomial index must be >= 1"));
        }
        let model = curve.integral();
        let t = psi_table(&model.a, &model.b, m);
        let p = &t[m as usize];
        let (coeffs, has_y) = if m % 2 == 1 {
            assert!(p.b.is_zero());
            (p.a.0.clone(), false)
        } else {
            assert!(p.a.is_zero());
            (p.b.0.clone(), true)
        };
        Ok(DivisionPolynomial {
            m,
            coeffs,
            has_y,
            curve: curve.clone(),
        })
    }

    /// Coefficients of the x-part, constant term first.
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn has_y_factor(&self) -> bool {
        self.has_y
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Roots of the x-part over F_ℓ at a good odd prime, by an x-sweep.
    pub fn roots_mod(&self, ell: u64) -> Result<Vec<u64>> {
        self.curve.reduced_curve(ell)?;
        let c = Poly(self.coeffs.clone()).reduce_mod_u64(ell);
        let mut roots = Vec::new();
        for x in 0..ell {
            if eval_u64(&c, x, ell) == 0 {
                roots.push(x);
            }
        }
        Ok(roots)
    }
}

// ---------------------------------------------------------------------------
// Rational root search.

/// Outcome of an exhaustive rational root search: `Complete` lists all
/// rational roots; `Inconclusive` means the search budget was exhausted and
/// absence of further roots is not proven.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootSearch {
    Complete(Vec<BigRational>),
    Inconclusive,
}

fn eval_u64(coeffs: &[u64], x: u64, l: u64) -> u64 {
    let mut acc = 0u64;
    for c in coeffs.iter().rev() {
        acc = (arith::mul_mod_u64(acc, x, l) + c) % l;
    }
    acc
}

fn poly_gcd_is_one_mod(f: &[u64], g: &[u64], l: u64) -> bool {
    let trim = |v: &mut Vec<u64>| while v.last() == Some(&0) {
        v.pop();
    };
    let mut a = f.to_vec();
    let mut b = g.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let linv = arith::inv_mod_u64(*b.last().unwrap(), l).unwrap();
        while a.len() >= b.len() && !a.is_empty() {
            let c = arith::mul_mod_u64(*a.last().unwrap(), linv, l);
            let off = a.len() - b.len();
            for (i, bc) in b.iter().enumerate() {
                let s = arith::mul_mod_u64(c, *bc, l);
                a[off + i] = (a[off + i] + l - s) % l;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len() == 1
}

fn rational_reconstruct(
    t: &BigInt,
    m: &BigInt,
    num_bound: &BigInt,
    den_bound: &BigInt,
) -> Option<BigRational> {
    let (mut r0, mut r1) = (m.clone(), t.clone());
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1.abs() > *num_bound {
        if r1.is_zero() {
            return None;
        }
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > *den_bound {
        return None;
    }
    Some(BigRational::new(r1, s1))
}

/// All rational roots of the primitive integer polynomial, or Inconclusive.
///
/// Small leading/constant coefficients go through the rational root theorem
/// with divisor enumeration. Large ones use a modular route: roots are found
/// modulo an auxiliary prime L at which the polynomial stays squarefree,
/// lifted by Newton iteration to a modulus exceeding twice the product of the
/// coefficient bounds, and recovered by rational reconstruction; every
/// candidate is confirmed exactly, and squarefreeness mod L makes the list
/// complete. Inconclusive is returned only when no suitable L is found.
fn rational_roots(f: &Poly) -> RootSearch {
    let mut f = f.clone().trimmed();
    if f.is_zero() {
        // The zero polynomial has every rational as a root; callers never
        // pass it.
        panic!("rational_roots on the zero polynomial");
    }
    let content = f.content();
    if !content.is_one() {
        f = f.div_scalar_exact(&content);
    }
    let mut roots: Vec<BigRational> = Vec::new();
    let k = f.0.iter().position(|c| !c.is_zero()).unwrap();
    if k > 0 {
        roots.push(BigRational::zero());
        f = Poly(f.0[k..].to_vec());
    }
    if f.degree() == 0 {
        return RootSearch::Complete(roots);
    }
    let a0 = f.coeff(0);
    let ad = f.0.last().unwrap().clone();
    if f.degree() == 1 {
        roots.push(BigRational::new(-a0, ad));
        roots.sort();
        roots.dedup();
        return RootSearch::Complete(roots);
    }

    // Divisor enumeration route.
    if a0.bits() <= DIVISOR_ROUTE_BIT_LIMIT && ad.bits() <= DIVISOR_ROUTE_BIT_LIMIT {
        let fa0 = arith::factorize(&a0.abs().to_biguint().unwrap());
        let fad = arith::factorize(&ad.abs().to_biguint().unwrap());
        if let (Some(fa0), Some(fad)) = (fa0, fad) {
            let d0 = arith::divisors_from_factorization(&fa0, DIVISOR_CAP);
            let dd = arith::divisors_from_factorization(&fad, DIVISOR_CAP);
            if let (Some(d0), Some(dd)) = (d0, dd) {
                if d0.len() * dd.len() * 2 <= CANDIDATE_CAP {
                    let mut seen = BTreeSet::new();
                    for r in &d0 {
                        for s in &dd {
                            let r = BigInt::from(r.clone());
                            let s = BigInt::from(s.clone());
                            if !r.gcd(&s).is_one() {
                                continue;
                            }
                            for cand in [(r.clone(), s.clone()), (-r.clone(), s.clone())] {
                                if seen.insert(cand.clone())
                                    && f.eval_homogeneous(&cand.0, &cand.1).is_zero()
                                {
                                    roots.push(BigRational::new(cand.0, cand.1));
                                }
                            }
                        }
                    }
                    roots.sort();
                    roots.dedup();
                    return RootSearch::Complete(roots);
                }
            }
        }
    }

    // Modular route.
    let fprime = f.derivative();
    let mut chosen: Option<(u64, Vec<u64>)> = None;
    let mut l = 10_007u64;
    let mut tried = 0;
    while tried < 60 {
        if arith::is_probable_prime(&BigUint::from(l)) {
            tried += 1;
            let fl = f.reduce_mod_u64(l);
            let fpl = fprime.reduce_mod_u64(l);
            if fl.len() == f.0.len() && poly_gcd_is_one_mod(&fl, &fpl, l) {
                chosen = Some((l, fl));
                break;
            }
        }
        l += 2;
    }
    let Some((l, fl)) = chosen else {
        return RootSearch::Inconclusive;
    };

    let num_bound = a0.abs();
    let den_bound = ad.abs();
    let target: BigInt = BigInt::from(2) * &num_bound * &den_bound + 1;
    let mut mod_roots = Vec::new();
    for x in 0..l {
        if eval_u64(&fl, x, l) == 0 {
            mod_roots.push(x);
        }
    }
    for t0 in mod_roots {
        let mut modulus = BigInt::from(l);
        let mut t = BigInt::from(t0);
        while modulus < target {
            modulus = &modulus * &modulus;
            let fv = f.eval_mod_big(&t, &modulus);
            let dv = fprime.eval_mod_big(&t, &modulus);
            let dinv = big_inv_mod(&dv, &modulus).expect("derivative invertible by choice of L");
            t = (&t - fv * dinv).mod_floor(&modulus);
        }
        if let Some(cand) = rational_reconstruct(&t, &modulus, &num_bound, &den_bound) {
            let (r, s) = (cand.numer().clone(), cand.denom().clone());
            if f.eval_homogeneous(&r, &s).is_zero() {
                roots.push(cand);
            }
        }
    }
    roots.sort();
    roots.dedup();
    RootSearch::Complete(roots)
}

fn big_inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(m);
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().to_biguint().unwrap();
    let d = r.denom().to_biguint().unwrap();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &sn * &sn == n && &sd * &sd == d {
        Some(BigRational::new(BigInt::from(sn), BigInt::from(sd)))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Global divisibility.

/// Result of the exact global oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GlobalOutcome {
    /// A rational Q with pⁿ·Q = P, verified exactly.
    Divisible(RationalPoint),
    /// Provably no rational Q exists.
    NotDivisible,
    /// The root-search budget was exhausted on some branch; absence of a
    /// witness is not proven.
    Inconclusive,
}

fn validate_instance(curve: &RationalCurve, point: &RationalPoint, p: u64, n: u32) -> Result<()> {
    if !arith::is_probable_prime(&BigUint::from(p)) {
        return Err(Error::domain(format!("p = {p} is not prime")));
    }
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    if !curve.is_on_curve(point) {
        return Err(Error::domain("point is not on the curve"));
    }
    Ok(())
}

/// All rational Q with p·Q = T on the integer-model curve, plus a flag for
/// an exhausted root search.
fn preimages_by_p(
    curve: &RationalCurve,
    psi: &[YPoly],
    f_curve: &Poly,
    t: &RationalPoint,
    p: u64,
) -> (Vec<RationalPoint>, bool) {
    let RationalPoint::Affine { x: xt, y: _ } = t else {
        unreachable!("preimages are only taken of affine targets");
    };
    let m = p as usize;
    // φ_p = x·ψ_p² − ψ_{p+1}ψ_{p−1}, and the fiber of x∘[p] over x_t is cut
    // out by s·φ_p − r·ψ_p² where x_t = r/s.
    let psi2 = psi[m].square(f_curve);
    let phi = YPoly::pure(Poly::from_coeffs(vec![BigInt::zero(), BigInt::one()]))
        .mul(&psi2, f_curve)
        .sub(&psi[m + 1].mul(&psi[m - 1], f_curve));
    assert!(phi.b.is_zero());
    assert!(psi2.b.is_zero());
    let fiber = phi
        .a
        .scale(xt.denom())
        .sub(&psi2.a.scale(xt.numer()));
    let mut out = Vec::new();
    let mut inconclusive = false;
    match rational_roots(&fiber) {
        RootSearch::Inconclusive => inconclusive = true,
        RootSearch::Complete(xs) => {
            for x0 in xs {
                let y2 = x0.pow(3)
                    + BigRational::from(curve.integral().a.clone()) * &x0
                    + BigRational::from(curve.integral().b.clone());
                let Some(y0) = rational_sqrt(&y2) else {
                    continue;
                };
                for q in [
                    RationalPoint::affine(x0.clone(), y0.clone()),
                    RationalPoint::affine(x0.clone(), -y0),
                ] {
                    if &curve.scalar_mul(p, &q) == t && !out.contains(&q) {
                        out.push(q);
                    }
                }
            }
        }
    }
    (out, inconclusive)
}

/// Decide whether P = pⁿ·Q for some rational Q, exactly.
///
/// Torsion points are handled by exhaustive search in the torsion subgroup;
/// otherwise preimages are pulled back one p-stage at a time, breadth-first,
/// via the division-polynomial fiber and exhaustive rational root search.
pub fn global_divide(
    curve: &RationalCurve,
    point: &RationalPoint,
    p: u64,
    n: u32,
) -> Result<GlobalOutcome> {
    validate_instance(curve, point, p, n)?;
    let pn_big = BigUint::from(p).pow(n);
    let pn = pn_big
        .to_u64()
        .ok_or_else(|| Error::domain("p^n exceeds the supported scalar range"))?;

    if curve.is_torsion(point) {
        // Any Q with pⁿ·Q torsion is itself torsion, so this search is
        // exhaustive.
        if let Ok(torsion) = curve.torsion_subgroup() {
            for q in &torsion {
                if &curve.scalar_mul(pn, q) == point {
                    return Ok(GlobalOutcome::Divisible(q.clone()));
                }
            }
            return Ok(GlobalOutcome::NotDivisible);
        }
    }

    // Work on the integral model; divisibility transfers both ways under the
    // (u², u³) coordinate change.
    let model = curve.integral();
    let int_curve = RationalCurve::new(
        BigRational::from(model.a.clone()),
        BigRational::from(model.b.clone()),
    )?;
    let u2 = BigRational::from(model.scale.pow(2));
    let u3 = BigRational::from(model.scale.pow(3));
    let start = match point {
        RationalPoint::Infinity => unreachable!("infinity is torsion"),
        RationalPoint::Affine { x, y } => RationalPoint::affine(x * &u2, y * &u3),
    };

    let psi = psi_table(&model.a, &model.b, p + 1);
    let f_curve = Poly::from_coeffs(vec![
        model.b.clone(),
        model.a.clone(),
        BigInt::zero(),
        BigInt::one(),
    ]);

    let mut frontier = vec![start];
    let mut any_inconclusive = false;
    for _ in 0..n {
        let mut next: Vec<RationalPoint> = Vec::new();
        for t in &frontier {
            let (pre, inconclusive) = preimages_by_p(&int_curve, &psi, &f_curve, t, p);
            any_inconclusive |= inconclusive;
            for q in pre {
                if !next.contains(&q) {
                    next.push(q);
                }
            }
        }
        if next.is_empty() {
            return Ok(if any_inconclusive {
                GlobalOutcome::Inconclusive
            } else {
                GlobalOutcome::NotDivisible
            });
        }
        frontier = next;
    }
    let q_int = frontier.remove(0);
    let q = match &q_int {
        RationalPoint::Infinity => RationalPoint::Infinity,
        RationalPoint::Affine { x, y } => RationalPoint::affine(x / &u2, y / &u3),
    };
    assert_eq!(&curve.scalar_mul(pn, &q), point, "witness check failed");
    Ok(GlobalOutcome::Divisible(q))
}

// ---------------------------------------------------------------------------
// Local divisibility.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalMethod {
    Structural,
    BruteForce,
}

impl LocalMethod {
    pub fn name(&self) -> &'static str {
        match self {
            LocalMethod::Structural => "structural",
            LocalMethod::BruteForce => "brute_force",
        }
    }
}

/// Verdict of the local oracle at one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalVerdict {
    pub ell: u64,
    pub divisible: bool,
    pub method: LocalMethod,
    pub witness: Option<ReducedPoint>,
}

/// Is ℓ admissible for local testing of (curve, p): an odd prime of good
/// reduction with ℓ ≠ p?
pub fn admissible_prime(curve: &RationalCurve, p: u64, ell: u64) -> bool {
    ell != 2
        && ell != p
        && arith::is_probable_prime(&BigUint::from(ell))
        && !(curve.integral().disc.clone() % BigInt::from(ell)).is_zero()
}

fn check_admissible(curve: &RationalCurve, p: u64, ell: u64) -> Result<()> {
    if ell == 2 {
        return Err(Error::BadPrime {
            ell,
            reason: "l = 2 is excluded".into(),
        });
    }
    if !arith::is_probable_prime(&BigUint::from(ell)) {
        return Err(Error::BadPrime {
            ell,
            reason: "l is not prime".into(),
        });
    }
    if ell == p {
        return Err(Error::BadPrime {
            ell,
            reason: "l = p is excluded".into(),
        });
    }
    if (curve.integral().disc.clone() % BigInt::from(ell)).is_zero() {
        return Err(Error::BadPrime {
            ell,
            reason: "l divides the discriminant".into(),
        });
    }
    Ok(())
}

/// The full Sylow p-subgroup of E(F_ℓ), given #E(F_ℓ) = p^a·m with p ∤ m,
/// collected from a deterministic x-sweep: every point R contributes m·R,
/// and closures under the group law are taken until all p^a elements appear.
fn sylow_subgroup(ec: &ReducedCurve, m: u64, pa: u64) -> Vec<ReducedPoint> {
    let mut set: BTreeSet<ReducedPoint> = BTreeSet::new();
    set.insert(ReducedPoint::Infinity);
    'sweep: for x in 0..ec.l {
        if set.len() as u64 == pa {
            break;
        }
        let Some((pt, _)) = ec.lift_x(x) else {
            continue;
        };
        let g = ec.scalar_mul(m, &pt);
        if set.contains(&g) {
            continue;
        }
        let base: Vec<ReducedPoint> = set.iter().cloned().collect();
        let mut kg = g;
        while !set.contains(&kg) {
            for s in &base {
                set.insert(ec.add(s, &kg));
            }
            kg = ec.add(&kg, &g);
            if set.len() as u64 == pa {
                break 'sweep;
            }
        }
    }
    assert_eq!(set.len() as u64, pa, "Sylow subgroup sweep incomplete");
    set.into_iter().collect()
}

/// Is red_ℓ(P) divisible by pⁿ in E(F_ℓ)?
///
/// The structural method splits E(F_ℓ) into its Sylow p-part and prime-to-p
/// part: with #E = p^a·m and 1 = αm + βp^a, the point is divisible iff its
/// p-component αm·red(P) lies in pⁿ·(Sylow p-subgroup); the prime-to-p
/// component is always divisible. The brute-force method enumerates E(F_ℓ).
pub fn local_divide_test(
    curve: &RationalCurve,
    point: &RationalPoint,
    p: u64,
    n: u32,
    ell: u64,
    method: LocalMethod,
) -> Result<LocalVerdict> {
    validate_instance(curve, point, p, n)?;
    check_admissible(curve, p, ell)?;
    let pn = BigUint::from(p)
        .pow(n)
        .to_u64()
        .ok_or_else(|| Error::domain("p^n exceeds the supported scalar range"))?;
    let ec = curve.reduced_curve(ell)?;
    let red = curve.reduce_at(point, ell)?;

    let (divisible, witness) = match method {
        LocalMethod::BruteForce => {
            let mut found = None;
            for r in ec.enumerate_points() {
                if ec.scalar_mul(pn, &r) == red {
                    found = Some(r);
                    break;
                }
            }
            (found.is_some(), found)
        }
        LocalMethod::Structural => {
            let total = ec.count_points()?;
            let mut a = 0u32;
            let mut m = total;
            while m % p == 0 {
                m /= p;
                a += 1;
            }
            if a == 0 {
                // p invertible mod #E: every point is pⁿ-divisible.
                let k = arith::inv_mod_u64(pn % total, total).unwrap();
                let w = ec.scalar_mul(k, &red);
                debug_assert_eq!(ec.scalar_mul(pn, &w), red);
                (true, Some(w))
            } else {
                let pa = total / m;
                let alpha = arith::inv_mod_u64(m % pa, pa).unwrap();
                let red_p = ec.scalar_mul(alpha.checked_mul(m).unwrap() % total, &red);
                let sylow = sylow_subgroup(&ec, m, pa);
                let mut found = None;
                for g in &sylow {
                    if ec.scalar_mul(pn % (pa * p), g) == red_p {
                        found = Some(*g);
                        break;
                    }
                }
                match found {
                    None => (false, None),
                    Some(g) => {
                        let w = if m == 1 {
                            g
                        } else {
                            let beta = arith::inv_mod_u64(pa % m, m).unwrap();
                            let t = arith::inv_mod_u64(pn % m, m).unwrap();
                            let c = (((t as u128 * beta as u128) % total as u128)
                                * pa as u128
                                % total as u128) as u64;
                            ec.add(&g, &ec.scalar_mul(c, &red))
                        };
                        assert_eq!(ec.scalar_mul(pn, &w), red, "witness check failed");
                        (true, Some(w))
                    }
                }
            }
        }
    };
    if let Some(w) = &witness {
        debug_assert_eq!(ec.scalar_mul(pn, w), red);
    }
    Ok(LocalVerdict {
        ell,
        divisible,
        method,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(x: i64, y: i64) -> RationalPoint {
        RationalPoint::affine(
            BigRational::from(BigInt::from(x)),
            BigRational::from(BigInt::from(y)),
        )
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn division_polynomial_examples() {
        let e = RationalCurve::from_integers(0, 1).unwrap();
        let d1 = DivisionPolynomial::new(&e, 1).unwrap();
        assert_eq!(d1.coefficients(), &[BigInt::one()]);
        let d3 = DivisionPolynomial::new(&e, 3).unwrap();
        // 3x⁴ + 12x
        assert_eq!(
            d3.coefficients(),
            &[
                BigInt::zero(),
                BigInt::from(12),
                BigInt::zero(),
                BigInt::zero(),
                BigInt::from(3)
            ]
        );
        assert!(!d3.has_y_factor());
        assert!(DivisionPolynomial::new(&e, 2).unwrap().has_y_factor());
    }

    #[test]
    fn division_polynomial_degrees() {
        let e = RationalCurve::from_integers(-2, 5).unwrap();
        for m in (3..=13u64).step_by(2) {
            let d = DivisionPolynomial::new(&e, m).unwrap();
            assert_eq!(d.degree() as u64, (m * m - 1) / 2, "m = {m}");
        }
    }

    #[test]
    fn psi_roots_are_torsion_x_coordinates() {
        let e = RationalCurve::from_integers(0, 1).unwrap();
        let d3 = DivisionPolynomial::new(&e, 3).unwrap();
        for ell in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
            let ec = e.reduced_curve(ell).unwrap();
            let roots: BTreeSet<u64> = d3.roots_mod(ell).unwrap().into_iter().collect();
            let mut torsion_x = BTreeSet::new();
            for pt in ec.enumerate_points() {
                if let ReducedPoint::Affine { x, .. } = pt {
                    if ec.scalar_mul(3, &pt).is_infinity() {
                        torsion_x.insert(x);
                    }
                }
            }
            // Every order-3 x-coordinate is a root, and every root that
            // lifts to a point of E(F_l) (rather than a quadratic twist)
            // gives an order-3 point.
            assert!(torsion_x.is_subset(&roots), "l = {ell}");
            let liftable: BTreeSet<u64> = roots
                .iter()
                .copied()
                .filter(|&x| ec.lift_x(x).is_some())
                .collect();
            assert_eq!(liftable, torsion_x, "l = {ell}");
        }
    }

    #[test]
    fn rational_roots_divisor_route() {
        // (2x − 3)(x + 5)(3x − 1)
        let f = Poly::from_coeffs(vec![BigInt::from(-3), BigInt::from(2)])
            .mul(&Poly::from_coeffs(vec![BigInt::from(5), BigInt::one()]))
            .mul(&Poly::from_coeffs(vec![BigInt::from(-1), BigInt::from(3)]));
        match rational_roots(&f) {
            RootSearch::Complete(mut roots) => {
                roots.sort();
                assert_eq!(roots, vec![rat(-5, 1), rat(1, 3), rat(3, 2)]);
            }
            RootSearch::Inconclusive => panic!("divisor route should be conclusive"),
        }
    }

    #[test]
    fn rational_roots_modular_route() {
        // (2x + 3)(5x − 7)(x² + c) with c a 200-bit number: the constant and
        // leading coefficients exceed the divisor-route budget.
        let c: BigInt = BigInt::from(7) << 200;
        let small = Poly::from_coeffs(vec![BigInt::from(-21), BigInt::from(1), BigInt::from(10)]);
        let big = Poly::from_coeffs(vec![c.clone(), BigInt::zero(), c.clone()]);
        let f = small.mul(&big);
        assert!(f.coeff(0).bits() > DIVISOR_ROUTE_BIT_LIMIT);
        match rational_roots(&f) {
            RootSearch::Complete(mut roots) => {
                roots.sort();
                assert_eq!(roots, vec![rat(-3, 2), rat(7, 5)]);
            }
            RootSearch::Inconclusive => panic!("modular route should be conclusive"),
        }
    }

    #[test]
    fn rational_roots_with_zero_root() {
        // x²(x − 4)
        let f = Poly::from_coeffs(vec![
            BigInt::zero(),
            BigInt::zero(),
            BigInt::from(-4),
            BigInt::one(),
        ]);
        assert_eq!(
            rational_roots(&f),
            RootSearch::Complete(vec![rat(0, 1), rat(4, 1)])
        );
    }

    #[test]
    fn global_divide_examples() {
        let e = RationalCurve::from_integers(0, 1).unwrap();
        match global_divide(&e, &rp(0, 1), 2, 1).unwrap() {
            GlobalOutcome::Divisible(q) => assert_eq!(e.scalar_mul(2, &q), rp(0, 1)),
            other => panic!("expected a witness, got {other:?}"),
        }
        assert_eq!(
            global_divide(&e, &rp(2, 3), 2, 1).unwrap(),
            GlobalOutcome::NotDivisible
        );
        assert_eq!(
            global_divide(&e, &RationalPoint::Infinity, 3, 2).unwrap(),
            GlobalOutcome::Divisible(RationalPoint::Infinity)
        );
    }

    #[test]
    fn global_divide_nontorsion() {
        // y² = x³ - 2 has trivial torsion and (3,5) is a generator; P = 4Q
        // has large enough coordinates that the fiber polynomial's
        // coefficients exceed the divisor-route budget.
        let e = RationalCurve::from_integers(0, -2).unwrap();
        let q = rp(3, 5);
        let p = e.scalar_mul(4, &q);
        match global_divide(&e, &p, 2, 2).unwrap() {
            GlobalOutcome::Divisible(w) => assert_eq!(e.scalar_mul(4, &w), p),
            other => panic!("expected a witness, got {other:?}"),
        }
        // Q itself is not divisible by 2: E(Q) ≅ Z with generator Q.
        assert_eq!(
            global_divide(&e, &q, 2, 1).unwrap(),
            GlobalOutcome::NotDivisible
        );
    }

    #[test]
    fn global_divide_constructed_instances() {
        // P = pⁿ·Q by construction must come back Divisible.
        for (a, b, qx, qy, p, n) in [
            (0i64, -2i64, 3i64, 5i64, 2u64, 1u32),
            (0, -2, 3, 5, 3, 1),
            (-2, 0, -1, 1, 2, 2),
            (0, 1, 2, 3, 5, 1),
        ] {
            let e = RationalCurve::from_integers(a, b).unwrap();
            let q = rp(qx, qy);
            assert!(e.is_on_curve(&q), "a={a} b={b}");
            let pn = p.pow(n);
            let target = e.scalar_mul(pn, &q);
            if target.is_infinity() {
                continue;
            }
            match global_divide(&e, &target, p, n).unwrap() {
                GlobalOutcome::Divisible(w) => assert_eq!(e.scalar_mul(pn, &w), target),
                other => panic!("a={a} b={b} p={p} n={n}: got {other:?}"),
            }
        }
    }

    #[test]
    fn local_divide_examples() {
        let e = RationalCurve::from_integers(0, 1).unwrap();
        for method in [LocalMethod::Structural, LocalMethod::BruteForce] {
            let v = local_divide_test(&e, &rp(2, 3), 2, 1, 5, method).unwrap();
            assert!(!v.divisible, "{method:?}");
            assert!(v.witness.is_none());
            let v = local_divide_test(&e, &rp(0, 1), 2, 1, 5, method).unwrap();
            assert!(v.divisible);
            let w = v.witness.unwrap();
            let ec = e.reduced_curve(5).unwrap();
            assert_eq!(ec.scalar_mul(2, &w), e.reduce_at(&rp(0, 1), 5).unwrap());
        }
    }

    #[test]
    fn local_divide_bad_primes() {
        let e = RationalCurve::from_integers(0, 1).unwrap(); // Δ = -432 = -2⁴·3³
        assert!(matches!(
            local_divide_test(&e, &rp(0, 1), 2, 1, 2, LocalMethod::Structural),
            Err(Error::BadPrime { ell: 2, .. })
        ));
        assert!(matches!(
            local_divide_test(&e, &rp(0, 1), 2, 1, 3, LocalMethod::Structural),
            Err(Error::BadPrime { ell: 3, .. })
        ));
        assert!(matches!(
            local_divide_test(&e, &rp(0, 1), 5, 1, 5, LocalMethod::Structural),
            Err(Error::BadPrime { ell: 5, .. })
        ));
        assert!(matches!(
            local_divide_test(&e, &rp(0, 1), 2, 1, 9, LocalMethod::Structural),
            Err(Error::BadPrime { ell: 9, .. })
        ));
    }

    #[test]
    fn constructed_divisible_is_locally_divisible() {
        let e = RationalCurve::from_integers(0, -2).unwrap();
        let q = rp(3, 5);
        let target = e.scalar_mul(2, &q);
        for ell in [5u64, 7, 11, 13, 17, 19, 23] {
            if !admissible_prime(&e, 2, ell) {
                continue;
            }
            let v =
                local_divide_test(&e, &target, 2, 1, ell, LocalMethod::Structural).unwrap();
            assert!(v.divisible, "l = {ell}");
        }
    }

    #[test]
    fn structural_agrees_with_brute_force() {
        let curves = [(0i64, 1i64), (0, -2), (-2, 0), (-1, 0), (2, 3)];
        let mut checked = 0;
        for (a, b) in curves {
            let e = RationalCurve::from_integers(a, b).unwrap();
            let pts = [rp(3, 5), rp(2, 3), rp(-1, 1), rp(0, 0), rp(1, 0), rp(0, 1)];
            for pt in pts.iter().filter(|pt| e.is_on_curve(pt)) {
                for p in [2u64, 3, 5] {
                    for n in [1u32, 2] {
                        for ell in [5u64, 7, 11, 13, 101, 997] {
                            if !admissible_prime(&e, p, ell) {
                                continue;
                            }
                            let s = local_divide_test(&e, pt, p, n, ell, LocalMethod::Structural)
                                .unwrap();
                            let bf = local_divide_test(&e, pt, p, n, ell, LocalMethod::BruteForce)
                                .unwrap();
                            assert_eq!(
                                s.divisible, bf.divisible,
                                "a={a} b={b} pt={pt} p={p} n={n} l={ell}"
                            );
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 100);
    }
}
