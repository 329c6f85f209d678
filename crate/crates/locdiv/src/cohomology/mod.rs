//! First group cohomology H¹(G, M) and the local-conditions subgroup
//! H¹_loc(G, M) for finite groups acting on M = (ℤ/pⁿ)^r, together with the
//! structural predicates used by the divisibility theory: equality of the
//! all-cyclic and p-cyclic variants of H¹_loc, injectivity of restriction to
//! a p-Sylow subgroup, and vanishing of H¹_loc for cyclic p-Sylow.
//!
//! Cocycles are parametrized by their values on a greedy generating set of
//! G: walking the Cayley graph assigns to every element h a matrix A_h with
//! c(h) = A_h·u, and every non-tree edge contributes a linear constraint.
//! All linear algebra runs over ℤ via Smith normal form, reduced mod pⁿ.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::arith;
use crate::error::Error;
use crate::snf::{self, IntMatrix};
use crate::Result;

/// Cap on matrix-group closure size.
pub const CLOSURE_CAP: usize = 100_000;

const FULL_ASSOCIATIVITY_BOUND: usize = 64;
const ASSOCIATIVITY_SAMPLES: usize = 1 << 16;

// ---------------------------------------------------------------------------
// Matrices over ℤ/q.

/// A square matrix over ℤ/q, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModMatrix {
    dim: usize,
    q: u64,
    entries: Vec<u64>,
}

impl ModMatrix {
    pub fn new(dim: usize, q: u64, entries: Vec<u64>) -> Result<Self> {
        if q < 2 {
            return Err(Error::domain("matrix modulus must be >= 2"));
        }
        if entries.len() != dim * dim {
            return Err(Error::domain(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(ModMatrix {
            dim,
            q,
            entries: entries.into_iter().map(|e| e % q).collect(),
        })
    }

    pub fn identity(dim: usize, q: u64) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1 % q;
        }
        ModMatrix { dim, q, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn entry(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim + j]
    }

    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.q, other.q);
        let d = self.dim;
        let mut out = vec![0u64; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.entries[i * d + k];
                if a == 0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] = (out[i * d + j]
                        + arith::mul_mod_u64(a, other.entries[k * d + j], self.q))
                        % self.q;
                }
            }
        }
        ModMatrix {
            dim: d,
            q: self.q,
            entries: out,
        }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = 0u64;
                for j in 0..self.dim {
                    acc = (acc + arith::mul_mod_u64(self.entry(i, j), v[j] % self.q, self.q))
                        % self.q;
                }
                acc
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == ModMatrix::identity(self.dim, self.q)
    }
}

// ---------------------------------------------------------------------------
// Finite groups as explicit multiplication tables.

/// A finite group given by its multiplication table of element indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupTable {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inv: Vec<usize>,
}

impl FiniteGroupTable {
    /// Validates the table: an identity and inverses must exist, and
    /// associativity is checked exhaustively up to order 64 and on a
    /// deterministic sample of triples above.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let g = table.len();
        if g == 0 {
            return Err(Error::domain("empty multiplication table"));
        }
        for row in &table {
            if row.len() != g || row.iter().any(|&x| x >= g) {
                return Err(Error::domain("multiplication table is not square over 0..g"));
            }
        }
        let mul: Vec<usize> = table.iter().flatten().copied().collect();
        let at = |a: usize, b: usize| mul[a * g + b];
        let identity = (0..g)
            .find(|&e| (0..g).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::domain("table has no identity element"))?;
        let mut inv = vec![usize::MAX; g];
        for x in 0..g {
            inv[x] = (0..g)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or_else(|| Error::domain(format!("element {x} has no inverse")))?;
        }
        let check = |a: usize, b: usize, c: usize| at(at(a, b), c) == at(a, at(b, c));
        if g <= FULL_ASSOCIATIVITY_BOUND {
            for a in 0..g {
                for b in 0..g {
                    for c in 0..g {
                        if !check(a, b, c) {
                            return Err(Error::domain(format!(
                                "associativity fails at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            // Deterministic LCG sample.
            let mut s: u64 = 0x9e3779b97f4a7c15;
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (s >> 33) as usize
            };
            for _ in 0..ASSOCIATIVITY_SAMPLES {
                let (a, b, c) = (next() % g, next() % g, next() % g);
                if !check(a, b, c) {
                    return Err(Error::domain(format!(
                        "associativity fails at ({a}, {b}, {c})"
                    )));
                }
            }
        }
        Ok(FiniteGroupTable {
            order: g,
            mul,
            identity,
            inv,
        })
    }

    pub fn trivial() -> Self {
        FiniteGroupTable::new(vec![vec![0]]).unwrap()
    }

    pub fn cyclic(m: usize) -> Self {
        assert!(m >= 1);
        let table = (0..m)
            .map(|a| (0..m).map(|b| (a + b) % m).collect())
            .collect();
        FiniteGroupTable::new(table).unwrap()
    }

    pub fn direct_product(&self, other: &FiniteGroupTable) -> FiniteGroupTable {
        let (g, h) = (self.order, other.order);
        let table = (0..g * h)
            .map(|a| {
                (0..g * h)
                    .map(|b| self.mul(a / h, b / h) * h + other.mul(a % h, b % h))
                    .collect()
            })
            .collect();
        FiniteGroupTable::new(table).unwrap()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Elements of the subgroup generated by `gens`, sorted.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut set = BTreeSet::new();
        set.insert(self.identity);
        let mut queue: VecDeque<usize> = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &t in gens {
                let y = self.mul(x, t);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set.into_iter().collect()
    }

    /// A greedy generating set: scan elements in index order and keep those
    /// not yet generated.
    pub fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut reach: BTreeSet<usize> = [self.identity].into();
        for x in 0..self.order {
            if !reach.contains(&x) {
                gens.push(x);
                reach = self.generated_subgroup(&gens).into_iter().collect();
            }
        }
        gens
    }
}

/// Closure of a list of invertible matrices over ℤ/q into a group table,
/// returning the table together with the matrix of each element (identity
/// first).
pub fn matrix_group(gens: &[ModMatrix]) -> Result<(FiniteGroupTable, Vec<ModMatrix>)> {
    let first = gens
        .first()
        .ok_or_else(|| Error::domain("matrix group needs at least one generator"))?;
    let (dim, q) = (first.dim(), first.modulus());
    if gens.iter().any(|m| m.dim() != dim || m.modulus() != q) {
        return Err(Error::domain("generator matrices have mixed shapes"));
    }
    let mut elements = vec![ModMatrix::identity(dim, q)];
    let mut index: HashMap<ModMatrix, usize> = HashMap::new();
    index.insert(elements[0].clone(), 0);
    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for gmat in gens {
            let prod = elements[i].mul(gmat);
            if !index.contains_key(&prod) {
                if elements.len() >= CLOSURE_CAP {
                    return Err(Error::ClosureCapExceeded { cap: CLOSURE_CAP });
                }
                index.insert(prod.clone(), elements.len());
                elements.push(prod);
                queue.push_back(elements.len() - 1);
            }
        }
    }
    let g = elements.len();
    let mut table = vec![vec![0usize; g]; g];
    for a in 0..g {
        for b in 0..g {
            let prod = elements[a].mul(&elements[b]);
            table[a][b] = *index
                .get(&prod)
                .ok_or_else(|| Error::domain("matrix set is not closed under inversion"))?;
        }
    }
    Ok((FiniteGroupTable::new(table)?, elements))
}

// ---------------------------------------------------------------------------
// G-modules.

/// The module M = (ℤ/pⁿ)^r with a G-action given by one invertible matrix
/// per group element.
#[derive(Debug, Clone)]
pub struct GModule {
    p: u64,
    n: u32,
    q: u64,
    rank: usize,
    action: Vec<ModMatrix>,
}

impl GModule {
    pub fn new(group: &FiniteGroupTable, p: u64, n: u32, action: Vec<ModMatrix>) -> Result<Self> {
        if !arith::is_probable_prime(&BigUint::from(p)) {
            return Err(Error::domain(format!("p = {p} is not prime")));
        }
        if n == 0 {
            return Err(Error::domain("n must be >= 1"));
        }
        let q = p.pow(n);
        if action.len() != group.order() {
            return Err(Error::domain("need one action matrix per group element"));
        }
        let rank = action[0].dim();
        if action
            .iter()
            .any(|m| m.dim() != rank || m.modulus() != q)
        {
            return Err(Error::domain("action matrices have mixed shapes"));
        }
        if !action[group.identity()].is_identity() {
            return Err(Error::domain("the identity must act trivially"));
        }
        for a in 0..group.order() {
            if !action[a].mul(&action[group.inverse(a)]).is_identity() {
                return Err(Error::domain(format!(
                    "action matrix of element {a} is not invertible mod p^n"
                )));
            }
            for b in 0..group.order() {
                if action[a].mul(&action[b]) != action[group.mul(a, b)] {
                    return Err(Error::domain(format!(
                        "action is not a homomorphism at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(GModule {
            p,
            n,
            q,
            rank,
            action,
        })
    }

    pub fn trivial(group: &FiniteGroupTable, p: u64, n: u32, rank: usize) -> Result<Self> {
        let q = p.pow(n);
        GModule::new(
            group,
            p,
            n,
            vec![ModMatrix::identity(rank, q); group.order()],
        )
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self, element: usize) -> &ModMatrix {
        &self.action[element]
    }
}

// ---------------------------------------------------------------------------
// Cocycle parametrization.

/// c(h) = A_h·u for each element h, where u stacks the cocycle's values on
/// the generating set; Z¹ and B¹ are lattices in the u-coordinates.
struct Parametrization {
    gens: Vec<usize>,
    dim: usize,
    /// Per element: rank × dim matrix over ℤ/q (u64 entries).
    a_mats: Vec<Vec<Vec<u64>>>,
    z_gens: Vec<Vec<BigInt>>,
    b_gens: Vec<Vec<BigInt>>,
}

fn parametrize(group: &FiniteGroupTable, module: &GModule) -> Parametrization {
    let g = group.order();
    let r = module.rank();
    let q = module.modulus();
    let gens = group.greedy_generators();
    let k = gens.len();
    let dim = k * r;

    let mut a_mats: Vec<Option<Vec<Vec<u64>>>> = vec![None; g];
    a_mats[group.identity()] = Some(vec![vec![0u64; dim]; r]);
    let mut constraints: Vec<Vec<BigInt>> = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::from([group.identity()]);
    while let Some(h) = queue.pop_front() {
        let a_h = a_mats[h].clone().unwrap();
        let rho_h = module.matrix(h);
        for (j, &t) in gens.iter().enumerate() {
            // c(h·t) = c(h) + ρ(h)·E_t
            let mut cand = a_h.clone();
            for (i, row) in cand.iter_mut().enumerate() {
                for l in 0..r {
                    row[j * r + l] = (row[j * r + l] + rho_h.entry(i, l)) % q;
                }
            }
            let w = group.mul(h, t);
            match &a_mats[w] {
                None => {
                    a_mats[w] = Some(cand);
                    queue.push_back(w);
                }
                Some(a_w) => {
                    for i in 0..r {
                        let row: Vec<BigInt> = (0..dim)
                            .map(|c| {
                                BigInt::from((cand[i][c] + q - a_w[i][c]) % q)
                            })
                            .collect();
                        if row.iter().any(|x| !x.is_zero()) {
                            constraints.push(row);
                        }
                    }
                }
            }
        }
    }
    let a_mats: Vec<Vec<Vec<u64>>> = a_mats.into_iter().map(Option::unwrap).collect();

    let qb = BigInt::from(q);
    let z_gens = if constraints.is_empty() {
        (0..dim)
            .map(|i| {
                let mut e = vec![BigInt::zero(); dim];
                e[i] = BigInt::one();
                e
            })
            .collect()
    } else {
        snf::kernel_mod(&IntMatrix::from_rows(constraints), &qb)
    };

    let mut b_gens = Vec::with_capacity(r);
    for i in 0..r {
        let mut m = vec![0u64; r];
        m[i] = 1;
        let mut v = vec![BigInt::zero(); dim];
        for (j, &t) in gens.iter().enumerate() {
            let tm = module.matrix(t).apply(&m);
            for l in 0..r {
                v[j * r + l] = BigInt::from((tm[l] + q - m[l]) % q);
            }
        }
        b_gens.push(v);
    }

    Parametrization {
        gens,
        dim,
        a_mats,
        z_gens,
        b_gens,
    }
}

impl Parametrization {
    /// The full map c: G → M of the cocycle with parameter vector u.
    fn cocycle(&self, module: &GModule, u: &[BigInt]) -> Vec<Vec<u64>> {
        let q = module.modulus();
        let qb = BigInt::from(q);
        self.a_mats
            .iter()
            .map(|a_h| {
                a_h.iter()
                    .map(|row| {
                        let mut acc = BigInt::zero();
                        for (c, coef) in row.iter().enumerate() {
                            acc += BigInt::from(*coef) * &u[c];
                        }
                        acc.modpow(&BigInt::one(), &qb).to_u64().unwrap() % q
                    })
                    .collect()
            })
            .collect()
    }

    /// A_{σ}·u as an r-vector over ℤ/q.
    fn value_at(&self, module: &GModule, sigma: usize, u: &[BigInt]) -> Vec<u64> {
        let q = module.modulus();
        let qb = BigInt::from(q);
        self.a_mats[sigma]
            .iter()
            .map(|row| {
                let mut acc = BigInt::zero();
                for (c, coef) in row.iter().enumerate() {
                    acc += BigInt::from(*coef) * &u[c];
                }
                acc.modpow(&BigInt::one(), &qb).to_u64().unwrap() % q
            })
            .collect()
    }
}

fn big_to_u64_divisors(orders: &[BigInt]) -> Vec<u64> {
    orders.iter().map(|d| d.to_u64().unwrap()).collect()
}

/// Invariant factors (> 1, in divisibility order) of Z¹(G, M).
pub fn cocycle_space(group: &FiniteGroupTable, module: &GModule) -> Vec<u64> {
    let param = parametrize(group, module);
    let q = BigInt::from(module.modulus());
    let (orders, _) = snf::quotient_structure(&param.z_gens, &[], param.dim, &q);
    big_to_u64_divisors(&orders)
}

/// Invariant factors (> 1, in divisibility order) of B¹(G, M).
pub fn coboundary_space(group: &FiniteGroupTable, module: &GModule) -> Vec<u64> {
    let param = parametrize(group, module);
    let q = BigInt::from(module.modulus());
    let (orders, _) = snf::quotient_structure(&param.b_gens, &[], param.dim, &q);
    big_to_u64_divisors(&orders)
}

/// The structure of a cohomology group: invariant factors and explicit
/// generating cocycles (one map G → M per factor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyResult {
    pub divisors: Vec<u64>,
    pub generators: Vec<Vec<Vec<u64>>>,
}

impl CohomologyResult {
    pub fn order(&self) -> u64 {
        self.divisors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.divisors.is_empty()
    }
}

/// H¹(G, M) = Z¹/B¹.
pub fn h1(group: &FiniteGroupTable, module: &GModule) -> CohomologyResult {
    let param = parametrize(group, module);
    let q = BigInt::from(module.modulus());
    let (orders, gens) = snf::quotient_structure(&param.z_gens, &param.b_gens, param.dim, &q);
    let generators = gens
        .iter()
        .map(|u| param.cocycle(module, u))
        .collect();
    CohomologyResult {
        divisors: big_to_u64_divisors(&orders),
        generators,
    }
}

/// All cyclic subgroups of G (as sorted element lists), one entry per
/// distinct subgroup; with `p_only`, only those of p-power order (the
/// trivial subgroup included).
pub fn cyclic_subgroups(group: &FiniteGroupTable, p: u64, p_only: bool) -> Vec<Vec<usize>> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for x in 0..group.order() {
        let sub = group.generated_subgroup(&[x]);
        if p_only {
            let mut o = sub.len() as u64;
            while o % p == 0 {
                o /= p;
            }
            if o != 1 {
                continue;
            }
        }
        seen.insert(sub);
    }
    seen.into_iter().collect()
}

/// One generator per distinct nontrivial cyclic (p-)subgroup.
fn cyclic_generators(group: &FiniteGroupTable, p: u64, p_only: bool) -> Vec<usize> {
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut gens = Vec::new();
    for x in 0..group.order() {
        if x == group.identity() {
            continue;
        }
        if p_only {
            let mut o = group.element_order(x) as u64;
            while o % p == 0 {
                o /= p;
            }
            if o != 1 {
                continue;
            }
        }
        if seen.insert(group.generated_subgroup(&[x])) {
            gens.push(x);
        }
    }
    gens
}

/// Solution lattice, in the coefficient coordinates of the given H¹ basis,
/// of "the class Σ xᵢ·hᵢ restricts to a coboundary on ⟨σ⟩ for every σ in
/// `sigmas`". A cocycle on a cyclic group ⟨σ⟩ is a coboundary iff its value
/// at σ lies in the image of ρ(σ) − 1, which is solved jointly with one
/// auxiliary module variable per σ.
fn restriction_solution_lattice(
    param: &Parametrization,
    module: &GModule,
    h1_gens_u: &[Vec<BigInt>],
    sigmas: &[usize],
) -> Vec<Vec<BigInt>> {
    let s = h1_gens_u.len();
    let r = module.rank();
    let q = module.modulus();
    let qb = BigInt::from(q);
    let cols = s + sigmas.len() * r;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (ci, &sigma) in sigmas.iter().enumerate() {
        let rho = module.matrix(sigma);
        let values: Vec<Vec<u64>> = h1_gens_u
            .iter()
            .map(|u| param.value_at(module, sigma, u))
            .collect();
        for l in 0..r {
            let mut row = vec![BigInt::zero(); cols];
            for (i, v) in values.iter().enumerate() {
                row[i] = BigInt::from(v[l]);
            }
            for t in 0..r {
                let delta = u64::from(l == t);
                // −(ρ(σ) − I)
                row[s + ci * r + t] =
                    BigInt::from((2 * q - rho.entry(l, t) + delta) % q) - BigInt::from(q);
            }
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return (0..s)
            .map(|i| {
                let mut e = vec![BigInt::zero(); s];
                e[i] = BigInt::one();
                e
            })
            .collect();
    }
    let kernel = snf::kernel_mod(&IntMatrix::from_rows(rows), &qb);
    kernel.into_iter().map(|v| v[..s].to_vec()).collect()
}

fn h1_loc_lattice(
    group: &FiniteGroupTable,
    module: &GModule,
    p_only: bool,
) -> (Parametrization, Vec<BigInt>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let param = parametrize(group, module);
    let q = BigInt::from(module.modulus());
    let (orders, gens_u) = snf::quotient_structure(&param.z_gens, &param.b_gens, param.dim, &q);
    let sigmas = cyclic_generators(group, module.p(), p_only);
    let mut x_gens = restriction_solution_lattice(&param, module, &gens_u, &sigmas);
    // The trivial classes diag(dᵢ)·ℤ^s are always solutions.
    let s = orders.len();
    let mut d_gens = Vec::with_capacity(s);
    for (i, d) in orders.iter().enumerate() {
        let mut e = vec![BigInt::zero(); s];
        e[i] = d.clone();
        d_gens.push(e);
    }
    x_gens.extend(d_gens.clone());
    (
        Parametrization {
            gens: param.gens,
            dim: param.dim,
            a_mats: param.a_mats,
            z_gens: gens_u,
            b_gens: d_gens.clone(),
        },
        orders,
        x_gens,
        d_gens,
    )
}

/// H¹_loc(G, M): the classes of H¹ whose restriction to every cyclic
/// subgroup (with `p_only`, every cyclic p-subgroup) is a coboundary.
pub fn h1_loc(group: &FiniteGroupTable, module: &GModule, p_only: bool) -> CohomologyResult {
    let (param, orders, x_gens, d_gens) = h1_loc_lattice(group, module, p_only);
    let s = orders.len();
    if s == 0 {
        return CohomologyResult {
            divisors: Vec::new(),
            generators: Vec::new(),
        };
    }
    let q = BigInt::from(module.modulus());
    let (loc_orders, loc_x) = snf::quotient_structure(&x_gens, &d_gens, s, &q);
    let h1_gens_u = &param.z_gens;
    let generators = loc_x
        .iter()
        .map(|x| {
            let mut u = vec![BigInt::zero(); param.dim];
            for (i, xi) in x.iter().enumerate() {
                for (c, uc) in h1_gens_u[i].iter().enumerate() {
                    u[c] += xi * uc;
                }
            }
            param.cocycle(module, &u)
        })
        .collect();
    CohomologyResult {
        divisors: big_to_u64_divisors(&loc_orders),
        generators,
    }
}

/// Lemma check: H¹_loc over all cyclic subgroups equals H¹_loc over cyclic
/// p-subgroups for p-primary M. Returning false signals a bug.
pub fn check_p_cyclic_equivalence(group: &FiniteGroupTable, module: &GModule) -> bool {
    let (_, orders, x_all, d_gens) = h1_loc_lattice(group, module, false);
    let (_, _, x_p, _) = h1_loc_lattice(group, module, true);
    let s = orders.len();
    if s == 0 {
        return true;
    }
    let q = BigInt::from(module.modulus());
    let _ = d_gens;
    x_all
        .iter()
        .all(|x| snf::lattice_contains(&x_p, x, &q))
        && x_p.iter().all(|x| snf::lattice_contains(&x_all, x, &q))
}

/// A p-Sylow subgroup of G (sorted element indices), grown greedily: a
/// proper p-subgroup always extends by an element normalizing it, so adding
/// any element that keeps the closure a p-group reaches full Sylow order.
pub fn sylow_subgroup(group: &FiniteGroupTable, p: u64) -> Vec<usize> {
    let mut pa = 1u64;
    let mut rest = group.order() as u64;
    while rest % p == 0 {
        rest /= p;
        pa *= p;
    }
    let is_p_power = |k: u64| {
        let mut k = k;
        while k % p == 0 {
            k /= p;
        }
        k == 1
    };
    let mut current = vec![group.identity()];
    while (current.len() as u64) < pa {
        let mut extended = false;
        for x in 0..group.order() {
            if current.contains(&x) || !is_p_power(group.element_order(x) as u64) {
                continue;
            }
            let mut gens: Vec<usize> = current.clone();
            gens.push(x);
            let closure = group.generated_subgroup(&gens);
            if is_p_power(closure.len() as u64) {
                current = closure;
                extended = true;
                break;
            }
        }
        assert!(extended, "Sylow subgroup growth stalled");
    }
    current
}

/// Is the p-Sylow subgroup of G cyclic (equivalently: does G contain an
/// element of order equal to the full p-part of |G|)?
pub fn p_sylow_cyclic(group: &FiniteGroupTable, p: u64) -> bool {
    let mut pa = 1usize;
    let mut rest = group.order();
    while rest % p as usize == 0 {
        rest /= p as usize;
        pa *= p as usize;
    }
    pa == 1 || (0..group.order()).any(|x| group.element_order(x) == pa)
}

/// Lemma check: restriction H¹(G, M) → H¹(G_p, M) to a p-Sylow subgroup is
/// injective for p-primary M. A class restricts to a coboundary on G_p iff
/// its values on a generating set of G_p are simultaneously of coboundary
/// shape, which is a linear condition with one auxiliary module variable.
pub fn check_sylow_injectivity(group: &FiniteGroupTable, module: &GModule) -> bool {
    let param = parametrize(group, module);
    let q = BigInt::from(module.modulus());
    let (orders, gens_u) = snf::quotient_structure(&param.z_gens, &param.b_gens, param.dim, &q);
    let s = orders.len();
    if s == 0 {
        return true;
    }
    let sylow = sylow_subgroup(group, module.p());
    // Greedy generators of the Sylow subgroup.
    let mut sub_gens: Vec<usize> = Vec::new();
    let mut reach: BTreeSet<usize> = [group.identity()].into();
    for &x in &sylow {
        if !reach.contains(&x) {
            sub_gens.push(x);
            reach = group.generated_subgroup(&sub_gens).into_iter().collect();
        }
    }

    // One joint coboundary condition over all Sylow generators: a single
    // auxiliary m must work for every generator, so solve with shared
    // auxiliary columns.
    let r = module.rank();
    let qm = module.modulus();
    let cols = s + r;
    let mut rows = Vec::new();
    for &t in &sub_gens {
        let rho = module.matrix(t);
        let values: Vec<Vec<u64>> = gens_u
            .iter()
            .map(|u| param.value_at(module, t, u))
            .collect();
        for l in 0..r {
            let mut row = vec![BigInt::zero(); cols];
            for (i, v) in values.iter().enumerate() {
                row[i] = BigInt::from(v[l]);
            }
            for c in 0..r {
                let delta = u64::from(l == c);
                row[s + c] =
                    BigInt::from((2 * qm - rho.entry(l, c) + delta) % qm) - BigInt::from(qm);
            }
            rows.push(row);
        }
    }
    let kernel = if rows.is_empty() {
        (0..s)
            .map(|i| {
                let mut e = vec![BigInt::zero(); s];
                e[i] = BigInt::one();
                e
            })
            .collect()
    } else {
        snf::kernel_mod(&IntMatrix::from_rows(rows), &q)
            .into_iter()
            .map(|v| v[..s].to_vec())
            .collect::<Vec<_>>()
    };
    // Injective iff every kernel solution is a trivial class.
    let mut d_gens = Vec::with_capacity(s);
    for (i, d) in orders.iter().enumerate() {
        let mut e = vec![BigInt::zero(); s];
        e[i] = d.clone();
        d_gens.push(e);
    }
    kernel
        .iter()
        .all(|x| snf::lattice_contains(&d_gens, x, &q))
}
