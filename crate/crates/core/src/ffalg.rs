//! Finite fields `F_q` with table-driven arithmetic, dense matrices over them,
//! and the enumerations (general linear groups, graded subspaces) that the
//! representation layer is built on.
//!
//! Elements of `F_{p^e}` are stored as a single byte: the integer
//! `c_0 + c_1 p + ... + c_{e-1} p^{e-1}` encoding the polynomial
//! `c_0 + c_1 t + ... + c_{e-1} t^{e-1}` modulo a fixed irreducible modulus.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field element, encoded as described in the module docs.
pub type Elem = u8;

/// Hard-coded irreducible moduli, coefficients low to high, monic.
const MODULI: &[(u32, u32, &[u32])] = &[
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (3, 2, &[1, 0, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 2, &[2, 0, 1]),
    (7, 2, &[1, 0, 1]),
];

/// Limits on brute-force enumeration. Exceeding a limit is an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Maximum number of points (matrices, representations, subspaces) in a single enumeration.
    pub max_points: u64,
    /// Maximum group order swept element by element.
    pub max_group: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_points: 1 << 20,
            max_group: 10_000,
        }
    }
}

impl Bounds {
    pub fn check_points(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.max_points as u128 {
            return Err(Error::BoundExceeded {
                what: what.to_string(),
                needed,
                bound: self.max_points,
            });
        }
        Ok(())
    }

    pub fn check_group(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.max_group as u128 {
            return Err(Error::BoundExceeded {
                what: what.to_string(),
                needed,
                bound: self.max_group,
            });
        }
        Ok(())
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// The finite field `F_q`, `q = p^e`, with precomputed operation tables.
#[derive(Clone)]
pub struct Field {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    generator: Elem,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

impl Eq for Field {}

impl Field {
    /// Builds `F_q` for a supported prime power `q < 256`.
    pub fn new(q: u64) -> Result<Field> {
        if !(2..=255).contains(&q) {
            return Err(Error::UnsupportedField(q));
        }
        let q32 = q as u32;
        if is_prime(q32) {
            return Ok(Field::build(q32, 1, vec![0, 1]));
        }
        for &(p, e, m) in MODULI {
            if p.pow(e) == q32 {
                return Ok(Field::build(p, e, m.to_vec()));
            }
        }
        Err(Error::UnsupportedField(q))
    }

    fn build(p: u32, e: u32, modulus: Vec<u32>) -> Field {
        let q = p.pow(e);
        let n = q as usize;
        let digits = |x: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(e as usize);
            let mut x = x;
            for _ in 0..e {
                v.push(x % p);
                x /= p;
            }
            v
        };
        let encode = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let mut add = vec![0; n * n];
        let mut mul = vec![0; n * n];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = encode(&sum) as Elem;

                // polynomial product, then reduce by the monic modulus
                let mut prod = vec![0u32; 2 * e as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                for deg in (e as usize..prod.len()).rev() {
                    let c = prod[deg];
                    if c == 0 {
                        continue;
                    }
                    for (k, m) in modulus.iter().enumerate().take(e as usize) {
                        let idx = deg - e as usize + k;
                        prod[idx] = (prod[idx] + (p - c) * m) % p;
                    }
                    prod[deg] = 0;
                }
                mul[(a * q + b) as usize] = encode(&prod[..e as usize]) as Elem;
            }
        }
        let mut neg = vec![0; n];
        let mut inv = vec![0; n];
        for a in 0..n {
            for b in 0..n {
                if add[a * n + b] == 0 {
                    neg[a] = b as Elem;
                }
                if a != 0 && mul[a * n + b] == 1 {
                    inv[a] = b as Elem;
                }
            }
        }
        let mut field = Field {
            p,
            e,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
            generator: 1,
        };
        field.generator = (1..q)
            .map(|g| g as Elem)
            .find(|&g| field.multiplicative_order(g) == q - 1)
            .unwrap_or(1);
        field
    }

    fn multiplicative_order(&self, g: Elem) -> u32 {
        let mut x = g;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, g);
            k += 1;
            if k > self.q {
                return 0;
            }
        }
        k
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Monic modulus coefficients, low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// A generator of the multiplicative group.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|x| x as Elem)
    }

    /// Additive basis of `F_q` over `F_p`: the powers `1, t, ..., t^{e-1}`.
    pub fn prime_basis(&self) -> Vec<Elem> {
        (0..self.e).map(|k| self.p.pow(k) as Elem).collect()
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            Err(Error::ZeroInverse(self.q))
        } else {
            Ok(self.inv[a as usize])
        }
    }

    /// Coefficient vector (little-endian) of an element.
    pub fn to_coeffs(&self, a: Elem) -> Vec<u32> {
        let mut x = a as u32;
        (0..self.e)
            .map(|_| {
                let c = x % self.p;
                x /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        if coeffs.len() > self.e as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Parse(format!(
                "coefficients {coeffs:?} are not an element of F_{}",
                self.q
            )));
        }
        Ok(coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c) as Elem)
    }

    /// `#GL_n(F_q) = prod_{k<n} (q^n - q^k)`.
    pub fn gl_order(&self, n: usize) -> u128 {
        let q = self.q as u128;
        let qn = q.pow(n as u32);
        (0..n as u32).map(|k| qn - q.pow(k)).product()
    }

    /// Number of `k`-dimensional subspaces of `F_q^n`.
    pub fn gaussian_binomial(&self, n: usize, k: usize) -> u128 {
        if k > n {
            return 0;
        }
        let q = self.q as u128;
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..k as u32 {
            num *= q.pow(n as u32 - i) - 1;
            den *= q.pow(i + 1) - 1;
        }
        num / den
    }
}

/// Dense row-major matrix over a finite field.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl FMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Elem>) -> Result<FMatrix> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(FMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Elem>]) -> Result<FMatrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        FMatrix::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> FMatrix {
        FMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> FMatrix {
        let mut m = FMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        self.data
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(<[Elem]>::to_vec)
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> FMatrix {
        let mut t = FMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, rhs: &FMatrix, f: &Field) -> Result<FMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = FMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, rhs.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &FMatrix, f: &Field) -> Result<FMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape("cannot add matrices of different shapes".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(FMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self, f: &Field) -> (FMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            m.swap_rows(row, pr);
            let inv = f.inv(m.get(row, col)).expect("pivot is nonzero");
            for c in 0..m.cols {
                m.set(row, c, f.mul(inv, m.get(row, c)));
            }
            for r in 0..m.rows {
                let factor = m.get(r, col);
                if r == row || factor == 0 {
                    continue;
                }
                for c in 0..m.cols {
                    let v = f.sub(m.get(r, c), f.mul(factor, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self, f: &Field) -> usize {
        self.rref(f).1.len()
    }

    pub fn is_invertible(&self, f: &Field) -> bool {
        self.rows == self.cols && self.rank(f) == self.rows
    }

    pub fn inverse(&self, f: &Field) -> Result<FMatrix> {
        if self.rows != self.cols {
            return Err(Error::Shape("only square matrices are invertible".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(FMatrix::zeros(0, 0));
        }
        let mut aug = FMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let (red, pivots) = aug.rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        let mut out = FMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, red.get(r, n + c));
            }
        }
        Ok(out)
    }

    /// Sub-block `rows r0..r0+nr`, `cols c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> FMatrix {
        let mut out = FMatrix::zeros(nr, nc);
        for r in 0..nr {
            for c in 0..nc {
                out.set(r, c, self.get(r0 + r, c0 + c));
            }
        }
        out
    }

    /// Assembles the lower block-triangular matrix
    /// `[[quotient, 0], [mixing, sub]]` for a coordinate splitting `V = T ⊕ W`
    /// whose first coordinates span `T` and whose last coordinates span the
    /// stable subspace `W`.
    pub fn block_compose(quotient: &FMatrix, mixing: &FMatrix, sub: &FMatrix) -> Result<FMatrix> {
        if mixing.rows != sub.rows || mixing.cols != quotient.cols {
            return Err(Error::Shape(format!(
                "mixing block {}x{} does not fit quotient {}x{} and sub {}x{}",
                mixing.rows, mixing.cols, quotient.rows, quotient.cols, sub.rows, sub.cols
            )));
        }
        let rows = quotient.rows + sub.rows;
        let cols = quotient.cols + sub.cols;
        let mut out = FMatrix::zeros(rows, cols);
        for r in 0..quotient.rows {
            for c in 0..quotient.cols {
                out.set(r, c, quotient.get(r, c));
            }
        }
        for r in 0..sub.rows {
            for c in 0..quotient.cols {
                out.set(quotient.rows + r, c, mixing.get(r, c));
            }
            for c in 0..sub.cols {
                out.set(quotient.rows + r, quotient.cols + c, sub.get(r, c));
            }
        }
        Ok(out)
    }

    /// Inverse of [`FMatrix::block_compose`]: returns `(quotient, sub, mixing)` for a
    /// map `V_src -> V_dst` with `tau_src`/`tau_dst` quotient coordinates first.
    /// Fails if the upper-right block is nonzero (the last coordinates are not stable).
    pub fn block_extract(&self, tau_src: usize, tau_dst: usize) -> Result<(FMatrix, FMatrix, FMatrix)> {
        if tau_src > self.cols || tau_dst > self.rows {
            return Err(Error::Shape("splitting larger than the matrix".into()));
        }
        let om_src = self.cols - tau_src;
        let om_dst = self.rows - tau_dst;
        if !self.block(0, tau_src, tau_dst, om_src).is_zero() {
            return Err(Error::Shape("sub block is not stable".into()));
        }
        Ok((
            self.block(0, 0, tau_dst, tau_src),
            self.block(tau_dst, tau_src, om_dst, om_src),
            self.block(tau_dst, 0, om_dst, tau_src),
        ))
    }
}

/// Enumerates the `q^{rows*cols}` matrices of a shape in lexicographic order
/// of their row-major entries.
pub fn enumerate_matrices(rows: usize, cols: usize, f: &Field, bounds: &Bounds) -> Result<Vec<FMatrix>> {
    let n = rows * cols;
    let total = (f.q() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    bounds.check_points(&format!("{rows}x{cols} matrices over F_{}", f.q()), total)?;
    let q = f.q() as u64;
    Ok((0..total as u64)
        .map(|mut code| {
            let mut data = vec![0; n];
            for slot in data.iter_mut().rev() {
                *slot = (code % q) as Elem;
                code /= q;
            }
            FMatrix { rows, cols, data }
        })
        .collect())
}

/// All invertible `n x n` matrices over `F_q`.
pub fn enumerate_gl(n: usize, f: &Field, bounds: &Bounds) -> Result<Vec<FMatrix>> {
    Ok(enumerate_matrices(n, n, f, bounds)?
        .into_iter()
        .filter(|m| m.is_invertible(f))
        .collect())
}

/// All `k`-dimensional subspaces of `F_q^n`, each given by its unique
/// `k x n` reduced row echelon basis.
pub fn enumerate_subspaces(n: usize, k: usize, f: &Field, bounds: &Bounds) -> Result<Vec<FMatrix>> {
    if k > n {
        return Ok(Vec::new());
    }
    bounds.check_points(&format!("{k}-subspaces of F_{}^{n}", f.q()), f.gaussian_binomial(n, k))?;
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    subspaces_rec(n, k, 0, &mut pivots, f, &mut out);
    Ok(out)
}

fn subspaces_rec(n: usize, k: usize, start: usize, pivots: &mut Vec<usize>, f: &Field, out: &mut Vec<FMatrix>) {
    if pivots.len() == k {
        // free slots: row r, column c > pivots[r], c not a pivot column
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let pivots = &*pivots;
                (pivots[r] + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let q = f.q() as u64;
        let count = q.pow(free.len() as u32);
        for mut code in 0..count {
            let mut m = FMatrix::zeros(k, n);
            for (r, &p) in pivots.iter().enumerate() {
                m.set(r, p, 1);
            }
            for &(r, c) in free.iter().rev() {
                m.set(r, c, (code % q) as Elem);
                code /= q;
            }
            out.push(m);
        }
        return;
    }
    let remaining = k - pivots.len();
    for p in start..=n - remaining {
        pivots.push(p);
        subspaces_rec(n, k, p + 1, pivots, f, out);
        pivots.pop();
    }
}

/// All graded subspaces `U ⊆ V` with `dim U_i = omega_i`, as one RREF basis per vertex.
pub fn enumerate_graded_subspaces(
    nu: &[usize],
    omega: &[usize],
    f: &Field,
    bounds: &Bounds,
) -> Result<Vec<Vec<FMatrix>>> {
    if nu.len() != omega.len() || nu.iter().zip(omega).any(|(n, w)| w > n) {
        return Err(Error::DimMismatch(format!("{omega:?} is not below {nu:?}")));
    }
    let total: u128 = nu.iter().zip(omega).map(|(&n, &w)| f.gaussian_binomial(n, w)).product();
    bounds.check_points("graded subspaces", total)?;
    let mut acc: Vec<Vec<FMatrix>> = vec![Vec::new()];
    for (&n, &w) in nu.iter().zip(omega) {
        let choices = enumerate_subspaces(n, w, f, bounds)?;
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    v
                })
            })
            .collect();
    }
    Ok(acc)
}
