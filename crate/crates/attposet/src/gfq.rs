//! Prime-field arithmetic and the small dense row reduction used to
//! canonicalize subspaces.
//!
//! Matrices here are at most (N+M)×(N+M), so everything is dense and eager.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u32) -> Result<()> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(Error::NotPrime(p as u64))
    }
}

#[inline]
fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

/// Multiplicative inverse of a nonzero residue (Fermat).
fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a != 0);
    let mut base = a as u64;
    let mut exp = p as u64 - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    acc as u32
}

/// A residue modulo a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    value: u32,
    p: u32,
}

impl FieldScalar {
    pub fn new(value: u64, p: u32) -> Result<Self> {
        check_prime(p)?;
        Ok(FieldScalar {
            value: (value % p as u64) as u32,
            p,
        })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldScalar {
            value: inv_mod(self.value, self.p),
            p: self.p,
        })
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FieldScalar {
            value: add_mod(self.value, rhs.value, self.p),
            p: self.p,
        }
    }
}

impl Sub for FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FieldScalar {
            value: sub_mod(self.value, rhs.value, self.p),
            p: self.p,
        }
    }
}

impl Mul for FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.p, rhs.p, "mixed moduli");
        FieldScalar {
            value: mul_mod(self.value, rhs.value, self.p),
            p: self.p,
        }
    }
}

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> Self {
        FieldScalar {
            value: sub_mod(0, self.value, self.p),
            p: self.p,
        }
    }
}

/// Dense row-major matrix over F_p. Entries are stored as reduced residues.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GFMatrix {
    p: u32,
    nrows: usize,
    ncols: usize,
    data: Vec<u32>,
}

impl GFMatrix {
    pub fn zeros(p: u32, nrows: usize, ncols: usize) -> Result<Self> {
        check_prime(p)?;
        Ok(Self::zeros_unchecked(p, nrows, ncols))
    }

    pub(crate) fn zeros_unchecked(p: u32, nrows: usize, ncols: usize) -> Self {
        GFMatrix {
            p,
            nrows,
            ncols,
            data: vec![0; nrows * ncols],
        }
    }

    pub fn identity(p: u32, n: usize) -> Result<Self> {
        let mut m = Self::zeros(p, n, n)?;
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        Ok(m)
    }

    /// Builds a matrix from rows of integers, reducing each entry mod p.
    pub fn from_rows(p: u32, ncols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        check_prime(p)?;
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|&v| (v % p as u64) as u32));
        }
        Ok(GFMatrix {
            p,
            nrows: rows.len(),
            ncols,
            data,
        })
    }

    pub(crate) fn from_raw(p: u32, nrows: usize, ncols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), nrows * ncols);
        debug_assert!(data.iter().all(|&v| v < p));
        GFMatrix {
            p,
            nrows,
            ncols,
            data,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldScalar {
        FieldScalar {
            value: self.data[r * self.ncols + c],
            p: self.p,
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldScalar) {
        assert_eq!(v.p, self.p, "mixed moduli");
        self.data[r * self.ncols + c] = v.value;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        (0..self.nrows).map(move |r| self.row(r))
    }

    /// Row-major entry sequence.
    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn stack(a: &GFMatrix, b: &GFMatrix) -> Result<GFMatrix> {
        if a.ncols != b.ncols {
            return Err(Error::Dimension(format!(
                "cannot stack widths {} and {}",
                a.ncols, b.ncols
            )));
        }
        if a.p != b.p {
            return Err(Error::Dimension("mixed moduli".into()));
        }
        let mut data = a.data.clone();
        data.extend_from_slice(&b.data);
        Ok(GFMatrix {
            p: a.p,
            nrows: a.nrows + b.nrows,
            ncols: a.ncols,
            data,
        })
    }

    pub fn mul(&self, other: &GFMatrix) -> Result<GFMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let p = self.p;
        let mut out = GFMatrix::zeros_unchecked(p, self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.data[i * self.ncols + k];
                if a == 0 {
                    continue;
                }
                for j in 0..other.ncols {
                    let idx = i * other.ncols + j;
                    out.data[idx] = add_mod(
                        out.data[idx],
                        mul_mod(a, other.data[k * other.ncols + j], p),
                        p,
                    );
                }
            }
        }
        Ok(out)
    }
}

/// Result of row reduction. Pivot columns are 0-based here; use
/// [`Rref::pivots_one_based`] for anything that is shown to a user.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: GFMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl Rref {
    pub fn pivots_one_based(&self) -> Vec<usize> {
        self.pivots.iter().map(|c| c + 1).collect()
    }
}

/// Reduced row-echelon form with zero rows removed.
pub fn rref(m: &GFMatrix) -> Rref {
    let p = m.p;
    let ncols = m.ncols;
    let mut a = m.data.clone();
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..ncols {
        if row == m.nrows {
            break;
        }
        let Some(piv) = (row..m.nrows).find(|&r| a[r * ncols + col] != 0) else {
            continue;
        };
        if piv != row {
            for c in 0..ncols {
                a.swap(piv * ncols + c, row * ncols + c);
            }
        }
        let inv = inv_mod(a[row * ncols + col], p);
        if inv != 1 {
            for c in col..ncols {
                a[row * ncols + c] = mul_mod(a[row * ncols + c], inv, p);
            }
        }
        for r in 0..m.nrows {
            if r == row {
                continue;
            }
            let f = a[r * ncols + col];
            if f == 0 {
                continue;
            }
            for c in col..ncols {
                let v = mul_mod(f, a[row * ncols + c], p);
                a[r * ncols + c] = sub_mod(a[r * ncols + c], v, p);
            }
        }
        pivots.push(col);
        row += 1;
    }
    a.truncate(row * ncols);
    Rref {
        reduced: GFMatrix::from_raw(p, row, ncols, a),
        rank: row,
        pivots,
    }
}

/// Pivot column of each row of a matrix already in reduced echelon form.
fn echelon_pivots(basis: &GFMatrix) -> Vec<usize> {
    basis
        .rows()
        .map(|r| r.iter().position(|&v| v != 0).unwrap_or(basis.ncols))
        .collect()
}

/// Membership of `v` in the row space of `basis`, which must be in RREF.
pub fn row_space_contains(basis: &GFMatrix, v: &[FieldScalar]) -> Result<bool> {
    if v.len() != basis.ncols {
        return Err(Error::Dimension(format!(
            "vector of length {} against basis of width {}",
            v.len(),
            basis.ncols
        )));
    }
    let p = basis.p;
    if v.iter().any(|x| x.p != p) {
        return Err(Error::Dimension("mixed moduli".into()));
    }
    let mut w: Vec<u32> = v.iter().map(|x| x.value).collect();
    for (r, pc) in echelon_pivots(basis).into_iter().enumerate() {
        if pc >= basis.ncols {
            continue;
        }
        let f = w[pc];
        if f == 0 {
            continue;
        }
        for (c, wc) in w.iter_mut().enumerate() {
            let t = mul_mod(f, basis.data[r * basis.ncols + c], p);
            *wc = sub_mod(*wc, t, p);
        }
    }
    Ok(w.iter().all(|&x| x == 0))
}

/// Rank of the two matrices stacked vertically.
pub fn stack_rank(a: &GFMatrix, b: &GFMatrix) -> Result<usize> {
    Ok(rref(&GFMatrix::stack(a, b)?).rank)
}

/// Every rank-`k` matrix with `n` columns in reduced row-echelon form over
/// F_p, grouped by pivot set in lexicographic order.
pub fn enumerate_rref(p: u32, k: usize, n: usize) -> Result<Vec<GFMatrix>> {
    check_prime(p)?;
    if k > n {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        let mut free = Vec::new();
        for (r, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..n {
                if !pivots.contains(&c) {
                    free.push(r * n + c);
                }
            }
        }
        let mut base = vec![0u32; k * n];
        for (r, &pc) in pivots.iter().enumerate() {
            base[r * n + pc] = 1;
        }
        let mut digits = vec![0u32; free.len()];
        loop {
            let mut data = base.clone();
            for (slot, &d) in free.iter().zip(&digits) {
                data[*slot] = d;
            }
            out.push(GFMatrix::from_raw(p, k, n, data));
            if !odometer(&mut digits, p) {
                break;
            }
        }
        if !next_combination(&mut pivots, n) {
            break;
        }
    }
    Ok(out)
}

/// Advances a base-p counter; false once it wraps to zero.
pub(crate) fn odometer(digits: &mut [u32], p: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < p {
            return true;
        }
        *d = 0;
    }
    false
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
