//! Exact elliptic curve arithmetic: short Weierstrass curves y² = x³ + ax + b
//! over ℚ with the chord-tangent group law in exact rationals, reduction at
//! good odd primes, naive point counting over F_ℓ, and the rational torsion
//! subgroup via the Lutz–Nagell criterion.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{self, legendre_symbol, sqrt_mod};
use crate::error::Error;
use crate::Result;

/// Hard cap for naive O(ℓ) point counting.
pub const COUNT_CAP: u64 = 1_000_000;

/// Stopping rule for torsion detection: rational torsion points on elliptic
/// curves over ℚ have order at most 12 (Mazur's theorem, used here as an
/// external fact).
pub const MAZUR_BOUND: u64 = 12;

/// A point of E(ℚ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalPoint {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl RationalPoint {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        RationalPoint::Affine { x, y }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, RationalPoint::Infinity)
    }
}

impl PartialOrd for RationalPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RationalPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (RationalPoint::Infinity, RationalPoint::Infinity) => Ordering::Equal,
            (RationalPoint::Infinity, _) => Ordering::Less,
            (_, RationalPoint::Infinity) => Ordering::Greater,
            (RationalPoint::Affine { x: x1, y: y1 }, RationalPoint::Affine { x: x2, y: y2 }) => {
                x1.cmp(x2).then_with(|| y1.cmp(y2))
            }
        }
    }
}

impl std::fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RationalPoint::Infinity => write!(f, "inf"),
            RationalPoint::Affine { x, y } => {
                write!(f, "x={} y={}", format_rational(x), format_rational(y))
            }
        }
    }
}

/// Integral model obtained by clearing denominators with the (u⁴, u⁶)
/// scaling: Y² = X³ + AX + B with (x, y) ↦ (u²x, u³y).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralModel {
    pub a: BigInt,
    pub b: BigInt,
    pub scale: BigInt,
    /// Δ = −16(4A³ + 27B²) of the integral model.
    pub disc: BigInt,
}

/// A short Weierstrass curve y² = x³ + ax + b over ℚ with Δ ≠ 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCurve {
    a: BigRational,
    b: BigRational,
    integral: IntegralModel,
}

impl RationalCurve {
    pub fn new(a: BigRational, b: BigRational) -> Result<Self> {
        let four_a3 = BigRational::from(BigInt::from(4)) * &a * &a * &a;
        let twenty7_b2 = BigRational::from(BigInt::from(27)) * &b * &b;
        if (four_a3 + twenty7_b2).is_zero() {
            return Err(Error::domain("singular curve: 4a^3 + 27b^2 = 0"));
        }
        let u = a.denom().lcm(b.denom());
        let a_int = (&a * BigRational::from(u.pow(4))).to_integer();
        let b_int = (&b * BigRational::from(u.pow(6))).to_integer();
        let disc = BigInt::from(-16)
            * (BigInt::from(4) * a_int.pow(3) + BigInt::from(27) * b_int.pow(2));
        Ok(RationalCurve {
            a,
            b,
            integral: IntegralModel {
                a: a_int,
                b: b_int,
                scale: u,
                disc,
            },
        })
    }

    pub fn from_integers(a: i64, b: i64) -> Result<Self> {
        RationalCurve::new(
            BigRational::from(BigInt::from(a)),
            BigRational::from(BigInt::from(b)),
        )
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn integral(&self) -> &IntegralModel {
        &self.integral
    }

    /// Δ = −16(4a³ + 27b²) of the given model.
    pub fn discriminant(&self) -> BigRational {
        BigRational::from(BigInt::from(-16))
            * (BigRational::from(BigInt::from(4)) * self.a.pow(3)
                + BigRational::from(BigInt::from(27)) * self.b.pow(2))
    }

    pub fn is_on_curve(&self, p: &RationalPoint) -> bool {
        match p {
            RationalPoint::Infinity => true,
            RationalPoint::Affine { x, y } => {
                y * y == x.pow(3) + &self.a * x + &self.b
            }
        }
    }

    pub fn neg(&self, p: &RationalPoint) -> RationalPoint {
        match p {
            RationalPoint::Infinity => RationalPoint::Infinity,
            RationalPoint::Affine { x, y } => RationalPoint::Affine {
                x: x.clone(),
                y: -y.clone(),
            },
        }
    }

    /// Chord-tangent addition; the vertical-line case yields Infinity.
    pub fn add(&self, p: &RationalPoint, q: &RationalPoint) -> RationalPoint {
        let (x1, y1) = match p {
            RationalPoint::Infinity => return q.clone(),
            RationalPoint::Affine { x, y } => (x, y),
        };
        let (x2, y2) = match q {
            RationalPoint::Infinity => return p.clone(),
            RationalPoint::Affine { x, y } => (x, y),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2).is_zero() {
                return RationalPoint::Infinity;
            }
            (BigRational::from(BigInt::from(3)) * x1 * x1 + &self.a)
                / (BigRational::from(BigInt::from(2)) * y1)
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda - x1 - x2;
        let y3 = lambda * (x1 - &x3) - y1;
        RationalPoint::Affine { x: x3, y: y3 }
    }

    /// n·P by double-and-add.
    pub fn scalar_mul(&self, n: u64, p: &RationalPoint) -> RationalPoint {
        let mut acc = RationalPoint::Infinity;
        let mut base = p.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }

    /// Reduction E(ℚ) → E(F_ℓ) at a good odd prime, through the integral
    /// model. Points with ℓ in a coordinate denominator map to Infinity.
    pub fn reduce_at(&self, p: &RationalPoint, ell: u64) -> Result<ReducedPoint> {
        let curve = self.reduced_curve(ell)?;
        let point = match p {
            RationalPoint::Infinity => ReducedPoint::Infinity,
            RationalPoint::Affine { x, y } => {
                let u = &self.integral.scale;
                let xi = x * BigRational::from(u.pow(2));
                let yi = y * BigRational::from(u.pow(3));
                let l = BigInt::from(ell);
                if (xi.denom() % &l).is_zero() || (yi.denom() % &l).is_zero() {
                    ReducedPoint::Infinity
                } else {
                    let dx = arith::inv_mod_u64(
                        xi.denom().mod_floor(&l).to_u64().unwrap(),
                        ell,
                    )
                    .unwrap();
                    let dy = arith::inv_mod_u64(
                        yi.denom().mod_floor(&l).to_u64().unwrap(),
                        ell,
                    )
                    .unwrap();
                    let nx = xi.numer().mod_floor(&l).to_u64().unwrap();
                    let ny = yi.numer().mod_floor(&l).to_u64().unwrap();
                    ReducedPoint::Affine {
                        x: arith::mul_mod_u64(nx, dx, ell),
                        y: arith::mul_mod_u64(ny, dy, ell),
                    }
                }
            }
        };
        debug_assert!(curve.is_on_curve(&point));
        Ok(point)
    }

    /// The curve over F_ℓ obtained by reducing the integral model.
    pub fn reduced_curve(&self, ell: u64) -> Result<ReducedCurve> {
        if ell == 2 {
            return Err(Error::BadPrime {
                ell,
                reason: "reduction at 2 is not supported".into(),
            });
        }
        let l = BigInt::from(ell);
        if (&self.integral.disc % &l).is_zero() {
            return Err(Error::BadReduction { ell });
        }
        Ok(ReducedCurve {
            l: ell,
            a: self.integral.a.mod_floor(&l).to_u64().unwrap(),
            b: self.integral.b.mod_floor(&l).to_u64().unwrap(),
        })
    }

    /// Map a point of the integral model back to this curve.
    fn from_integral_point(&self, x: &BigInt, y: &BigInt) -> RationalPoint {
        let u = &self.integral.scale;
        RationalPoint::Affine {
            x: BigRational::new(x.clone(), u.pow(2)),
            y: BigRational::new(y.clone(), u.pow(3)),
        }
    }

    /// The full rational torsion subgroup by the Lutz–Nagell candidate
    /// sweep on the integral model, sorted.
    ///
    /// Candidates are integral points with Y = 0 or Y² | Δ; each candidate
    /// is kept iff m·candidate = ∞ for some m ≤ [`MAZUR_BOUND`].
    pub fn torsion_subgroup(&self) -> Result<Vec<RationalPoint>> {
        let model = &self.integral;
        let int_curve = RationalCurve::new(
            BigRational::from(model.a.clone()),
            BigRational::from(model.b.clone()),
        )?;
        let disc_abs = model.disc.abs().to_biguint().unwrap();
        let factors = arith::factorize(&disc_abs).ok_or_else(|| {
            Error::domain("torsion candidate sweep: discriminant exceeds the factoring budget")
        })?;
        // Square divisors y^2 | disc correspond to y built from half the
        // exponents.
        let half: std::collections::BTreeMap<BigUint, u32> = factors
            .iter()
            .filter(|(_, &e)| e >= 2)
            .map(|(p, &e)| (p.clone(), e / 2))
            .collect();
        let mut y_candidates = arith::divisors_from_factorization(&half, 1 << 16)
            .ok_or_else(|| Error::domain("torsion candidate sweep: too many divisors"))?;
        y_candidates.push(BigUint::zero());

        let mut torsion = vec![RationalPoint::Infinity];
        for y in &y_candidates {
            let y = BigInt::from(y.clone());
            let c = &model.b - &y * &y;
            for x in integer_cubic_roots(&model.a, &c)? {
                let candidate = int_curve.from_integral_point(&x, &y);
                if !int_curve.is_on_curve(&candidate) {
                    continue;
                }
                for sign in [1i64, -1] {
                    let pt = if sign == 1 {
                        candidate.clone()
                    } else {
                        int_curve.neg(&candidate)
                    };
                    if torsion.contains(&pt) {
                        continue;
                    }
                    let mut acc = pt.clone();
                    for _ in 1..=MAZUR_BOUND {
                        if acc.is_infinity() {
                            torsion.push(pt);
                            break;
                        }
                        acc = int_curve.add(&acc, &pt);
                    }
                }
            }
        }
        // Map back to the original model.
        let u = &model.scale;
        let mut out: Vec<RationalPoint> = torsion
            .into_iter()
            .map(|p| match p {
                RationalPoint::Infinity => RationalPoint::Infinity,
                RationalPoint::Affine { x, y } => RationalPoint::Affine {
                    x: x / BigRational::from(u.pow(2)),
                    y: y / BigRational::from(u.pow(3)),
                },
            })
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Is P a torsion point? (m·P = ∞ for some m ≤ Mazur's bound.)
    pub fn is_torsion(&self, p: &RationalPoint) -> bool {
        let mut acc = p.clone();
        for _ in 1..=MAZUR_BOUND {
            if acc.is_infinity() {
                return true;
            }
            acc = self.add(&acc, p);
        }
        false
    }
}

/// Integer roots of the monic cubic X³ + aX + c.
fn integer_cubic_roots(a: &BigInt, c: &BigInt) -> Result<Vec<BigInt>> {
    let eval = |x: &BigInt| x.pow(3) + a * x + c;
    let mut roots = Vec::new();
    if c.is_zero() {
        roots.push(BigInt::zero());
        // Remaining factor X² + a.
        if a.is_negative() || a.is_zero() {
            let na = (-a).to_biguint().unwrap();
            let r = na.sqrt();
            if &r * &r == na {
                let r = BigInt::from(r);
                roots.push(r.clone());
                roots.push(-r);
            }
        }
        roots.sort();
        roots.dedup();
        return Ok(roots);
    }
    let factors = arith::factorize(&c.abs().to_biguint().unwrap())
        .ok_or_else(|| Error::domain("cubic root search: constant exceeds factoring budget"))?;
    let divisors = arith::divisors_from_factorization(&factors, 1 << 16)
        .ok_or_else(|| Error::domain("cubic root search: too many divisors"))?;
    for d in divisors {
        let d = BigInt::from(d);
        for cand in [d.clone(), -d] {
            if eval(&cand).is_zero() {
                roots.push(cand);
            }
        }
    }
    roots.sort();
    roots.dedup();
    Ok(roots)
}

/// A point of E(F_ℓ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReducedPoint {
    Infinity,
    Affine { x: u64, y: u64 },
}

impl ReducedPoint {
    pub fn is_infinity(&self) -> bool {
        matches!(self, ReducedPoint::Infinity)
    }
}

impl std::fmt::Display for ReducedPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReducedPoint::Infinity => write!(f, "inf"),
            ReducedPoint::Affine { x, y } => write!(f, "x={x} y={y}"),
        }
    }
}

/// y² = x³ + ax + b over F_ℓ, ℓ an odd prime of good reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedCurve {
    pub l: u64,
    pub a: u64,
    pub b: u64,
}

impl ReducedCurve {
    /// x³ + ax + b in F_ℓ.
    pub fn rhs(&self, x: u64) -> u64 {
        let l = self.l;
        let x2 = arith::mul_mod_u64(x, x, l);
        let x3 = arith::mul_mod_u64(x2, x, l);
        (x3 + arith::mul_mod_u64(self.a, x, l) + self.b) % l
    }

    pub fn is_on_curve(&self, p: &ReducedPoint) -> bool {
        match p {
            ReducedPoint::Infinity => true,
            ReducedPoint::Affine { x, y } => arith::mul_mod_u64(*y, *y, self.l) == self.rhs(*x),
        }
    }

    pub fn neg(&self, p: &ReducedPoint) -> ReducedPoint {
        match *p {
            ReducedPoint::Infinity => ReducedPoint::Infinity,
            ReducedPoint::Affine { x, y } => ReducedPoint::Affine {
                x,
                y: if y == 0 { 0 } else { self.l - y },
            },
        }
    }

    pub fn add(&self, p: &ReducedPoint, q: &ReducedPoint) -> ReducedPoint {
        let l = self.l;
        let (x1, y1) = match *p {
            ReducedPoint::Infinity => return *q,
            ReducedPoint::Affine { x, y } => (x, y),
        };
        let (x2, y2) = match *q {
            ReducedPoint::Infinity => return *p,
            ReducedPoint::Affine { x, y } => (x, y),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2) % l == 0 {
                return ReducedPoint::Infinity;
            }
            let num = (3 * arith::mul_mod_u64(x1, x1, l) % l + self.a) % l;
            let den = arith::inv_mod_u64(2 * y1 % l, l).unwrap();
            arith::mul_mod_u64(num, den, l)
        } else {
            let num = (y2 + l - y1) % l;
            let den = arith::inv_mod_u64((x2 + l - x1) % l, l).unwrap();
            arith::mul_mod_u64(num, den, l)
        };
        let x3 = (arith::mul_mod_u64(lambda, lambda, l) + 2 * l - x1 - x2) % l;
        let y3 = (arith::mul_mod_u64(lambda, (x1 + l - x3) % l, l) + l - y1) % l;
        ReducedPoint::Affine { x: x3, y: y3 }
    }

    pub fn scalar_mul(&self, n: u64, p: &ReducedPoint) -> ReducedPoint {
        let mut acc = ReducedPoint::Infinity;
        let mut base = *p;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            n >>= 1;
            if n > 0 {
                base = self.add(&base, &base);
            }
        }
        acc
    }

    /// #E(F_ℓ) = ℓ + 1 + Σ_x χ(x³ + ax + b), with the Hasse bound asserted.
    pub fn count_points(&self) -> Result<u64> {
        if self.l > COUNT_CAP {
            return Err(Error::domain(format!(
                "point counting capped at l <= {COUNT_CAP}, got {}",
                self.l
            )));
        }
        let mut n: i64 = self.l as i64 + 1;
        for x in 0..self.l {
            n += legendre_symbol(&BigInt::from(self.rhs(x)), self.l) as i64;
        }
        let n = n as u64;
        let hasse = 2 * (self.l as f64).sqrt() as u64 + 2;
        assert!(
            n.abs_diff(self.l + 1) <= hasse,
            "Hasse bound violated: N = {n} at l = {}",
            self.l
        );
        Ok(n)
    }

    /// The two lifts of x, if x³ + ax + b is a square.
    pub fn lift_x(&self, x: u64) -> Option<(ReducedPoint, ReducedPoint)> {
        let r = self.rhs(x);
        sqrt_mod(&BigInt::from(r), self.l).map(|y| {
            (
                ReducedPoint::Affine { x, y },
                ReducedPoint::Affine {
                    x,
                    y: if y == 0 { 0 } else { self.l - y },
                },
            )
        })
    }

    /// All points, by an x-sweep. Only sensible for small ℓ.
    pub fn enumerate_points(&self) -> Vec<ReducedPoint> {
        let mut pts = vec![ReducedPoint::Infinity];
        for x in 0..self.l {
            if let Some((p, q)) = self.lift_x(x) {
                pts.push(p);
                if q != p {
                    pts.push(q);
                }
            }
        }
        pts
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse a rational in the form `n` or `n/d`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::parse(format!("bad integer '{t}'")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::parse("zero denominator"));
            }
            Ok(BigRational::new(parse_int(n)?, den))
        }
        None => Ok(BigRational::from(parse_int(s)?)),
    }
}

/// Parse `a=<rat> b=<rat>`.
pub fn parse_curve(s: &str) -> Result<RationalCurve> {
    let mut a = None;
    let mut b = None;
    for tok in s.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("bad token '{tok}' in curve")))?;
        match k {
            "a" => a = Some(parse_rational(v)?),
            "b" => b = Some(parse_rational(v)?),
            _ => return Err(Error::parse(format!("unknown curve key '{k}'"))),
        }
    }
    match (a, b) {
        (Some(a), Some(b)) => RationalCurve::new(a, b),
        _ => Err(Error::parse("curve needs a= and b=")),
    }
}

/// Parse `inf` or `x=<rat> y=<rat>`.
pub fn parse_point(s: &str) -> Result<RationalPoint> {
    if s.trim() == "inf" {
        return Ok(RationalPoint::Infinity);
    }
    let mut x = None;
    let mut y = None;
    for tok in s.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("bad token '{tok}' in point")))?;
        match k {
            "x" => x = Some(parse_rational(v)?),
            "y" => y = Some(parse_rational(v)?),
            _ => return Err(Error::parse(format!("unknown point key '{k}'"))),
        }
    }
    match (x, y) {
        (Some(x), Some(y)) => Ok(RationalPoint::Affine { x, y }),
        _ => Err(Error::parse("point needs x= and y= (or 'inf')")),
    }
}

/// Render a curve in the `a=.. b=..` input format.
pub fn format_curve(curve: &RationalCurve) -> String {
    format!(
        "a={} b={}",
        format_rational(curve.a()),
        format_rational(curve.b())
    )
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

    #[test]
    fn group_law_examples() {
        let e = RationalCurve::from_integers(0, 1).unwrap();
        let p = rp(2, 3);
        assert!(e.is_on_curve(&p));
        assert_eq!(e.add(&p, &RationalPoint::Infinity), p);
        assert_eq!(e.scalar_mul(2, &p), rp(0, 1));
        assert_eq!(e.add(&p, &rp(-1, 0)), rp(0, -1));
        assert_eq!(e.add(&p, &e.neg(&p)), RationalPoint::Infinity);
    }

    #[test]
    fn group_law_axioms_sampled() {
        let e = RationalCurve::from_integers(0, 1).unwrap();
        // E(Q) torsion Z/6 generated by (2,3); sample all pairs/triples.
        let pts: Vec<RationalPoint> = (0..6).map(|i| e.scalar_mul(i, &rp(2, 3))).collect();
        for p in &pts {
            for q in &pts {
                assert_eq!(e.add(p, q), e.add(q, p));
                for r in &pts {
                    assert_eq!(e.add(&e.add(p, q), r), e.add(p, &e.add(q, r)));
                }
            }
        }
    }

    #[test]
    fn singular_rejected() {
        assert!(RationalCurve::from_integers(0, 0).is_err());
        assert!(RationalCurve::from_integers(-3, 2).is_err());
    }

    #[test]
    fn integral_model_scaling() {
        let e = RationalCurve::new(
            BigRational::new(BigInt::from(1), BigInt::from(4)),
            BigRational::new(BigInt::from(1), BigInt::from(2)),
        )
        .unwrap();
        let m = e.integral();
        // u = lcm(4, 2) = 4: A = a u^4 = 64, B = b u^6 = 2048.
        assert_eq!(m.scale, BigInt::from(4));
        assert_eq!(m.a, BigInt::from(64));
        assert_eq!(m.b, BigInt::from(2048));
    }

    #[test]
    fn reduce_examples() {
        let e = RationalCurve::from_integers(0, 1).unwrap();
        assert_eq!(
            e.reduce_at(&RationalPoint::Infinity, 5).unwrap(),
            ReducedPoint::Infinity
        );
        assert_eq!(
            e.reduce_at(&rp(2, 3), 5).unwrap(),
            ReducedPoint::Affine { x: 2, y: 3 }
        );
        // Δ = -432 = -16·27: bad at 3.
        assert!(matches!(
            e.reduce_at(&rp(2, 3), 3),
            Err(Error::BadReduction { ell: 3 })
        ));
        // A denominator divisible by l reduces to Infinity:
        // on y² = x³ - 2x, 2·(-1,1) = (9/4, -21/8), bad denominator at 2 only;
        // use l = 5 with a point having 5 in the denominator instead.
        let e2 = RationalCurve::from_integers(-2, 0).unwrap();
        let q = e2.scalar_mul(2, &rp(-1, 1));
        assert_eq!(
            q,
            RationalPoint::affine(
                BigRational::new(BigInt::from(9), BigInt::from(4)),
                BigRational::new(BigInt::from(-21), BigInt::from(8)),
            )
        );
    }

    #[test]
    fn reduce_is_homomorphism() {
        let e = RationalCurve::from_integers(0, 1).unwrap();
        let pts: Vec<RationalPoint> = (0..6).map(|i| e.scalar_mul(i, &rp(2, 3))).collect();
        for ell in [5u64, 7, 11, 13] {
            let ec = e.reduced_curve(ell).unwrap();
            for p in &pts {
                for q in &pts {
                    let lhs = e.reduce_at(&e.add(p, q), ell).unwrap();
                    let rhs = ec.add(
                        &e.reduce_at(p, ell).unwrap(),
                        &e.reduce_at(q, ell).unwrap(),
                    );
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn count_points_examples() {
        let e = ReducedCurve { l: 5, a: 0, b: 1 };
        assert_eq!(e.count_points().unwrap(), 6);
        let e = ReducedCurve { l: 3, a: 2, b: 0 }; // y² = x³ - x over F_3
        assert_eq!(e.count_points().unwrap(), 4);
        let big = ReducedCurve {
            l: 1_000_003,
            a: 1,
            b: 1,
        };
        assert!(big.count_points().is_err());
    }

    #[test]
    fn count_matches_enumeration_and_lagrange() {
        for ell in [5u64, 7, 11, 13, 17, 19, 23] {
            for (a, b) in [(0u64, 1u64), (1, 1), (2, 3), (4, 0)] {
                let e = ReducedCurve { l: ell, a, b };
                // Skip singular reductions.
                if (4 * a.pow(3) + 27 * b.pow(2)) % ell == 0 {
                    continue;
                }
                let n = e.count_points().unwrap();
                let pts = e.enumerate_points();
                assert_eq!(pts.len() as u64, n, "l={ell} a={a} b={b}");
                for p in &pts {
                    assert!(e.is_on_curve(p));
                    assert_eq!(e.scalar_mul(n, p), ReducedPoint::Infinity);
                }
            }
        }
    }

    #[test]
    fn torsion_examples() {
        let e = RationalCurve::from_integers(0, 1).unwrap();
        let t = e.torsion_subgroup().unwrap();
        assert_eq!(t.len(), 6);
        for p in [rp(0, 1), rp(0, -1), rp(-1, 0), rp(2, 3), rp(2, -3)] {
            assert!(t.contains(&p));
        }
        // Closure under the group law and negation.
        for p in &t {
            assert!(t.contains(&e.neg(p)));
            for q in &t {
                assert!(t.contains(&e.add(p, q)));
            }
        }

        let e = RationalCurve::from_integers(0, -2).unwrap();
        assert_eq!(e.torsion_subgroup().unwrap(), vec![RationalPoint::Infinity]);

        let e = RationalCurve::from_integers(-1, 0).unwrap();
        let t = e.torsion_subgroup().unwrap();
        assert_eq!(t.len(), 4);
        for p in [rp(0, 0), rp(1, 0), rp(-1, 0)] {
            assert!(t.contains(&p));
        }
    }

    #[test]
    fn parse_roundtrip() {
        let e = parse_curve("a=0 b=1").unwrap();
        assert_eq!(e, RationalCurve::from_integers(0, 1).unwrap());
        let e = parse_curve("a=1/4 b=-3/2").unwrap();
        assert_eq!(parse_curve(&format_curve(&e)).unwrap(), e);
        assert_eq!(parse_point("inf").unwrap(), RationalPoint::Infinity);
        let p = parse_point("x=2 y=-3").unwrap();
        assert_eq!(p, rp(2, -3));
        assert_eq!(parse_point(&p.to_string()).unwrap(), p);
        assert!(parse_curve("a=0").is_err());
        assert!(parse_point("x=1").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
