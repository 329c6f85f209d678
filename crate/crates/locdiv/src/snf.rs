//! Exact integer linear algebra: Smith normal form with unimodular
//! transforms, kernels of integer matrices modulo pⁿ, and structure of
//! quotients of integer lattices. Everything works over ℤ; reductions
//! modulo pⁿ are applied afterwards.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        IntMatrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors of length `dim`.
    pub fn from_columns(dim: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zero(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length mismatch");
            for i in 0..dim {
                m.set(i, j, col[i].clone());
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        for k in 0..self.cols {
            let v = self.get(i, k) + c * self.get(j, k);
            self.set(i, k, v);
        }
    }

    /// col_j += c * col_i
    fn add_col(&mut self, j: usize, i: usize, c: &BigInt) {
        for k in 0..self.rows {
            let v = self.get(k, j) + c * self.get(k, i);
            self.set(k, j, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for k in 0..self.cols {
            let v = -self.get(i, k);
            self.set(i, k, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for k in 0..self.rows {
            let v = -self.get(k, j);
            self.set(k, j, v);
        }
    }
}

/// Result of a Smith normal form computation: U·M·V = D with U, V
/// unimodular and D diagonal with the divisibility chain d₁ | d₂ | …
#[derive(Debug, Clone)]
pub struct Snf {
    /// Diagonal entries of D (length min(rows, cols)), nonnegative.
    pub diag: Vec<BigInt>,
    /// Row transform, if requested.
    pub u: Option<IntMatrix>,
    /// Inverse of the row transform, if requested.
    pub u_inv: Option<IntMatrix>,
    /// Column transform, if requested.
    pub v: Option<IntMatrix>,
}

impl Snf {
    /// Nonzero diagonal divisors.
    pub fn divisors(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_zero()).cloned().collect()
    }
}

/// Nearest-integer quotient, so the remainder satisfies |r| ≤ |b|/2.
fn rounded_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if &r * 2 > b.abs() {
        q + 1
    } else {
        q
    }
}

/// Smith normal form over ℤ. Transforms are tracked only when requested;
/// tracking U costs O(rows²) memory, which matters for tall constraint
/// matrices where only V is needed.
pub fn smith_normal_form(m: &IntMatrix, want_u: bool, want_v: bool) -> Snf {
    let mut a = m.clone();
    let rows = a.rows;
    let cols = a.cols;
    let mut u = want_u.then(|| IntMatrix::identity(rows));
    let mut u_inv = want_u.then(|| IntMatrix::identity(rows));
    let mut v = want_v.then(|| IntMatrix::identity(cols));

    let n = rows.min(cols);
    let mut t = 0usize;
    while t < n {
        // Locate a minimal-magnitude nonzero entry in the trailing block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a.get(i, j).is_zero()
                    && pivot.is_none_or(|(pi, pj)| a.get(i, j).abs() < a.get(pi, pj).abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break;
        };
        a.swap_rows(t, pi);
        if let Some(u) = &mut u {
            u.swap_rows(t, pi);
        }
        if let Some(ui) = &mut u_inv {
            ui.swap_cols(t, pi);
        }
        a.swap_cols(t, pj);
        if let Some(v) = &mut v {
            v.swap_cols(t, pj);
        }

        'reduce: loop {
            // Clear column t below the pivot.
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = -rounded_div(a.get(i, t), a.get(t, t));
                a.add_row(i, t, &q);
                if let Some(u) = &mut u {
                    u.add_row(i, t, &q);
                }
                if let Some(ui) = &mut u_inv {
                    let neg = -&q;
                    ui.add_col(t, i, &neg);
                }
            }
            // If a remainder survived, swap the smallest one up and restart.
            for i in t + 1..rows {
                if !a.get(i, t).is_zero() {
                    a.swap_rows(t, i);
                    if let Some(u) = &mut u {
                        u.swap_rows(t, i);
                    }
                    if let Some(ui) = &mut u_inv {
                        ui.swap_cols(t, i);
                    }
                    continue 'reduce;
                }
            }
            // Clear row t right of the pivot.
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = -rounded_div(a.get(t, j), a.get(t, t));
                a.add_col(j, t, &q);
                if let Some(v) = &mut v {
                    v.add_col(j, t, &q);
                }
            }
            for j in t + 1..cols {
                if !a.get(t, j).is_zero() {
                    a.swap_cols(t, j);
                    if let Some(v) = &mut v {
                        v.swap_cols(t, j);
                    }
                    continue 'reduce;
                }
            }
            break;
        }

        // Enforce the divisibility chain: the pivot must divide every
        // entry of the trailing block.
        let mut fixed = true;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if !a.get(i, j).mod_floor(&a.get(t, t).abs()).is_zero() {
                    let one = BigInt::one();
                    a.add_row(t, i, &one);
                    if let Some(u) = &mut u {
                        u.add_row(t, i, &one);
                    }
                    if let Some(ui) = &mut u_inv {
                        let neg = -&one;
                        ui.add_col(i, t, &neg);
                    }
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }

        if a.get(t, t).is_negative() {
            a.negate_row(t);
            if let Some(u) = &mut u {
                u.negate_row(t);
            }
            if let Some(ui) = &mut u_inv {
                ui.negate_col(t);
            }
        }
        t += 1;
    }

    let diag = (0..n).map(|i| a.get(i, i).clone()).collect();
    Snf { diag, u, u_inv, v }
}

/// Generators of the solution module of `M·x ≡ 0 (mod q)` in (ℤ/q)^cols.
pub fn kernel_mod(m: &IntMatrix, q: &BigInt) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m, false, true);
    let v = snf.v.unwrap();
    let mut gens = Vec::new();
    for j in 0..m.cols {
        let scale = if j < snf.diag.len() && !snf.diag[j].is_zero() {
            let g = snf.diag[j].gcd(q);
            q / g
        } else {
            BigInt::one()
        };
        if &scale >= q {
            continue;
        }
        let gen: Vec<BigInt> = v
            .column(j)
            .iter()
            .map(|x| (x * &scale).mod_floor(q))
            .collect();
        if gen.iter().any(|x| !x.is_zero()) {
            gens.push(gen);
        }
    }
    gens
}

/// One solution of `M·x ≡ b (mod q)`, if any exists.
pub fn solve_mod(m: &IntMatrix, b: &[BigInt], q: &BigInt) -> Option<Vec<BigInt>> {
    assert_eq!(m.rows, b.len());
    let snf = smith_normal_form(m, true, true);
    let u = snf.u.as_ref().unwrap();
    let v = snf.v.as_ref().unwrap();
    let c = u.mul_vec(b);
    let mut y = vec![BigInt::zero(); m.cols];
    for i in 0..m.rows {
        let d = if i < snf.diag.len() {
            snf.diag[i].clone()
        } else {
            BigInt::zero()
        };
        let ci = c[i].mod_floor(q);
        if d.is_zero() {
            if !ci.is_zero() {
                return None;
            }
            continue;
        }
        let g = d.gcd(q);
        if !ci.mod_floor(&g).is_zero() {
            return None;
        }
        let qg = q / &g;
        let dg = (&d / &g).mod_floor(&qg);
        let inv = mod_inv_bigint(&dg, &qg)?;
        y[i] = ((&ci / &g) * inv).mod_floor(&qg);
    }
    let x: Vec<BigInt> = v.mul_vec(&y).iter().map(|t| t.mod_floor(q)).collect();
    debug_assert!(m
        .mul_vec(&x)
        .iter()
        .zip(b)
        .all(|(lhs, rhs)| (lhs - rhs).mod_floor(q).is_zero()));
    Some(x)
}

fn mod_inv_bigint(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Structure of the finite abelian group L₁/L₂ where
/// Lᵢ = span(gensᵢ) + q·ℤ^dim and L₂ ⊆ L₁.
///
/// Returns the nontrivial invariant-factor orders together with lifted
/// generators (vectors in ℤ^dim reduced mod q, one per order).
pub fn quotient_structure(
    gens_big: &[Vec<BigInt>],
    gens_small: &[Vec<BigInt>],
    dim: usize,
    q: &BigInt,
) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
    if dim == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut cols1: Vec<Vec<BigInt>> = gens_big.to_vec();
    for i in 0..dim {
        let mut e = vec![BigInt::zero(); dim];
        e[i] = q.clone();
        cols1.push(e);
    }
    let a1 = IntMatrix::from_columns(dim, &cols1);
    let snf1 = smith_normal_form(&a1, true, false);
    let u1 = snf1.u.as_ref().unwrap();
    let u1_inv = snf1.u_inv.as_ref().unwrap();
    assert!(
        snf1.diag.iter().take(dim).all(|d| !d.is_zero()),
        "L1 must have full rank (it contains q·Z^dim)"
    );

    let mut cols2: Vec<Vec<BigInt>> = gens_small.to_vec();
    for i in 0..dim {
        let mut e = vec![BigInt::zero(); dim];
        e[i] = q.clone();
        cols2.push(e);
    }
    // Express L2 in the basis B of L1: column w maps to D1^{-1}·U1·w.
    let mut x_cols = Vec::with_capacity(cols2.len());
    for w in &cols2 {
        let y = u1.mul_vec(w);
        let col: Vec<BigInt> = (0..dim)
            .map(|i| {
                let (quot, rem) = y[i].div_mod_floor(&snf1.diag[i]);
                assert!(rem.is_zero(), "L2 is not contained in L1");
                quot
            })
            .collect();
        x_cols.push(col);
    }
    let x = IntMatrix::from_columns(dim, &x_cols);
    let snf2 = smith_normal_form(&x, true, false);
    let u2_inv = snf2.u_inv.as_ref().unwrap();

    let mut orders = Vec::new();
    let mut gens = Vec::new();
    for i in 0..dim {
        let d = &snf2.diag[i];
        assert!(!d.is_zero(), "quotient of full-rank lattices is finite");
        if d.is_one() {
            continue;
        }
        // Generator: B·(column i of U2^{-1}) where B = U1^{-1}·D1.
        let col = u2_inv.column(i);
        let scaled: Vec<BigInt> = (0..dim).map(|k| &col[k] * &snf1.diag[k]).collect();
        let gen: Vec<BigInt> = u1_inv.mul_vec(&scaled).iter().map(|t| t.mod_floor(q)).collect();
        orders.push(d.clone());
        gens.push(gen);
    }
    (orders, gens)
}

/// Does `x` lie in span(gens) + q·ℤ^dim, i.e. in the subgroup of (ℤ/q)^dim
/// generated by `gens`?
pub fn lattice_contains(gens: &[Vec<BigInt>], x: &[BigInt], q: &BigInt) -> bool {
    if x.iter().all(|t| t.mod_floor(q).is_zero()) {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    let m = IntMatrix::from_columns(x.len(), gens);
    solve_mod(&m, x, q).is_some()
}
