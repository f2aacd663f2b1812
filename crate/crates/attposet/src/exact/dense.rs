use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{QSqrt, Rational, SparseMat};
use crate::error::{Error, Result};

/// Dense row-major matrix over ℚ(√q), used for module models and small
/// elimination problems.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMat {
    nrows: usize,
    ncols: usize,
    data: Vec<QSqrt>,
}

impl DenseMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        DenseMat {
            nrows,
            ncols,
            data: vec![QSqrt::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, QSqrt::one());
        }
        m
    }

    pub fn diagonal(values: Vec<QSqrt>) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.into_iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<QSqrt>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(DenseMat {
            nrows: rows.len(),
            ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_sparse(m: &SparseMat) -> Self {
        let mut d = Self::zeros(m.nrows(), m.ncols());
        for (r, c, v) in m.iter() {
            d.set(r, c, v.clone());
        }
        d
    }

    pub fn to_sparse(&self) -> SparseMat {
        SparseMat::from_rows(
            self.nrows,
            self.ncols,
            (0..self.nrows)
                .map(|r| {
                    (0..self.ncols)
                        .map(|c| (c, self.get(r, c).clone()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> &QSqrt {
        &self.data[r * self.ncols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: QSqrt) {
        self.data[r * self.ncols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[QSqrt] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<(usize, usize, &QSqrt)> {
        self.data
            .iter()
            .position(|v| !v.is_zero())
            .map(|k| (k / self.ncols, k % self.ncols, &self.data[k]))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::Dimension(format!(
                "{}x{} against {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(DenseMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(DenseMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &QSqrt) -> Self {
        DenseMat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|a| c * a).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.ncols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn apply(&self, v: &[QSqrt]) -> Result<Vec<QSqrt>> {
        if v.len() != self.ncols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.ncols
            )));
        }
        Ok((0..self.nrows)
            .map(|r| {
                let mut s = QSqrt::zero();
                for (a, x) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        s += &(a * x);
                    }
                }
                s
            })
            .collect())
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.ncols {
            return Err(Error::Dimension(format!(
                "cannot stack widths {} and {}",
                self.ncols, other.ncols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(DenseMat {
            nrows: self.nrows + other.nrows,
            ncols: self.ncols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<QSqrt>], nrows: usize) -> Result<Self> {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != nrows {
                return Err(Error::Dimension("column length".into()));
            }
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        Ok(m)
    }

    pub fn rank(&self) -> usize {
        echelon(self).pivots.len()
    }

    /// Gauss–Jordan inverse over the field.
    pub fn inverse(&self) -> Result<Self> {
        if self.nrows != self.ncols {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.nrows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(Error::DivisionByZero)?;
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            let p = a.get(col, col).inverse()?;
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r != col && !a.get(r, col).is_zero() {
                    let f = a.get(r, col).clone();
                    a.axpy_row(r, col, &f);
                    inv.axpy_row(r, col, &f);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.ncols {
                self.data.swap(i * self.ncols + c, j * self.ncols + c);
            }
        }
    }

    fn scale_row(&mut self, r: usize, f: &QSqrt) {
        for c in 0..self.ncols {
            let v = &self.data[r * self.ncols + c] * f;
            self.data[r * self.ncols + c] = v;
        }
    }

    /// row[target] -= f · row[src]
    fn axpy_row(&mut self, target: usize, src: usize, f: &QSqrt) {
        for c in 0..self.ncols {
            let s = &self.data[src * self.ncols + c];
            if !s.is_zero() {
                let t = f * s;
                self.data[target * self.ncols + c] -= &t;
            }
        }
    }
}

/// An integral domain with exact division, as needed by one-step
/// fraction-free elimination.
trait Domain: Clone + Zero {
    fn mul(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
}

impl Domain for BigInt {
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn div_exact(&self, o: &Self) -> Self {
        let (q, r) = self.div_rem(o);
        debug_assert!(r.is_zero(), "inexact fraction-free division");
        q
    }
}

impl Domain for QSqrt {
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
}

struct Echelon {
    rows: Vec<Vec<QSqrt>>,
    pivots: Vec<usize>,
}

/// Fraction-free row echelon form: every stored entry is a minor of the input.
fn bareiss<T: Domain>(mut a: Vec<Vec<T>>, ncols: usize) -> (Vec<Vec<T>>, Vec<usize>) {
    let nrows = a.len();
    let mut prev: Option<T> = None;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pv = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..ncols {
                let mut v = pv.mul(&row[j]);
                if !f.is_zero() && !pivot_row[j].is_zero() {
                    v = v.sub(&f.mul(&pivot_row[j]));
                }
                if let Some(d) = &prev {
                    v = v.div_exact(d);
                }
                row[j] = v;
            }
            row[c] = T::zero();
        }
        prev = Some(pv);
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

fn echelon(m: &DenseMat) -> Echelon {
    let rational = m.data.iter().all(QSqrt::is_rational);
    if rational {
        // clear each row's denominators, then eliminate over ℤ
        let rows: Vec<Vec<BigInt>> = (0..m.nrows)
            .map(|r| {
                let row = m.row(r);
                let l = row
                    .iter()
                    .fold(BigInt::one(), |acc, v| acc.lcm(v.a().denom()));
                row.iter()
                    .map(|v| (v.a() * Rational::from_integer(l.clone())).to_integer())
                    .collect()
            })
            .collect();
        let (rows, pivots) = bareiss(rows, m.ncols);
        Echelon {
            rows: rows
                .into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|v| QSqrt::rational(Rational::from_integer(v)))
                        .collect()
                })
                .collect(),
            pivots,
        }
    } else {
        let rows: Vec<Vec<QSqrt>> = (0..m.nrows)
            .map(|r| {
                let row = m.row(r);
                let l = row
                    .iter()
                    .fold(BigInt::one(), |acc, v| acc.lcm(&v.denom_lcm()));
                let l = QSqrt::rational(Rational::from_integer(l));
                row.iter().map(|v| v * &l).collect()
            })
            .collect();
        let (rows, pivots) = bareiss(rows, m.ncols);
        Echelon { rows, pivots }
    }
}

/// Basis of the right kernel. Rational kernels are returned as primitive
/// integer vectors whose first nonzero entry is positive; otherwise the
/// first nonzero entry is normalized to one.
pub fn dense_kernel_basis(m: &DenseMat) -> Vec<Vec<QSqrt>> {
    let e = echelon(m);
    let n = m.ncols;
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; n];
        for &c in &e.pivots {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut x = vec![QSqrt::zero(); n];
        x[free] = QSqrt::one();
        for (k, &pc) in e.pivots.iter().enumerate().rev() {
            let row = &e.rows[k];
            let mut s = QSqrt::zero();
            for j in pc + 1..n {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s += &(&row[j] * &x[j]);
                }
            }
            if !s.is_zero() {
                x[pc] = -(&s / &row[pc]);
            }
        }
        basis.push(normalize(x));
    }
    basis
}

fn normalize(x: Vec<QSqrt>) -> Vec<QSqrt> {
    if x.iter().all(QSqrt::is_rational) {
        let l = x
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.a().denom()));
        let ints: Vec<BigInt> = x
            .iter()
            .map(|v| (v.a() * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let sign = ints
            .iter()
            .find(|v| !v.is_zero())
            .map_or(BigInt::one(), |v| v.signum());
        let g = if g.is_zero() { BigInt::one() } else { g * sign };
        ints.into_iter()
            .map(|v| QSqrt::rational(Rational::from_integer(v / &g)))
            .collect()
    } else {
        let lead = x
            .iter()
            .find(|v| !v.is_zero())
            .cloned()
            .unwrap_or_else(QSqrt::one);
        x.iter().map(|v| v / &lead).collect()
    }
}

/// Whether the matrices are linearly independent as flattened vectors.
pub fn linear_independence(mats: &[SparseMat]) -> Result<bool> {
    if let Some(first) = mats.first() {
        if mats
            .iter()
            .any(|m| m.nrows() != first.nrows() || m.ncols() != first.ncols())
        {
            return Err(Error::Dimension("matrices of different shapes".into()));
        }
    }
    let vectors: Vec<BTreeMap<(usize, usize), QSqrt>> = mats
        .iter()
        .map(|m| m.iter().map(|(r, c, v)| ((r, c), v.clone())).collect())
        .collect();
    Ok(sparse_rank(vectors) == mats.len())
}

/// Rank of a family of sparse vectors keyed by any ordered index.
pub fn sparse_rank<K: Ord + Clone>(vectors: Vec<BTreeMap<K, QSqrt>>) -> usize {
    let mut reduced: Vec<(K, BTreeMap<K, QSqrt>)> = Vec::new();
    for mut v in vectors {
        for (pk, pv) in &reduced {
            if let Some(f) = v.get(pk).cloned() {
                for (k, x) in pv {
                    let t = &f * x;
                    let e = v.entry(k.clone()).or_insert_with(QSqrt::zero);
                    *e -= &t;
                    if e.is_zero() {
                        v.remove(k);
                    }
                }
            }
        }
        if let Some((k, lead)) = v.iter().next().map(|(k, x)| (k.clone(), x.clone())) {
            let inv = lead.inverse().expect("nonzero lead");
            for x in v.values_mut() {
                *x = &*x * &inv;
            }
            reduced.push((k, v));
        }
    }
    reduced.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat_int;
    use proptest::prelude::*;

    fn ints(rows: &[&[i64]]) -> DenseMat {
        DenseMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| QSqrt::int(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn is_kernel_vector(m: &DenseMat, v: &[QSqrt]) -> bool {
        m.apply(v).unwrap().iter().all(Zero::is_zero)
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        assert!(dense_kernel_basis(&DenseMat::identity(4)).is_empty());
        assert_eq!(dense_kernel_basis(&DenseMat::zeros(3, 3)).len(), 3);
    }

    #[test]
    fn kernel_of_all_ones() {
        let k = dense_kernel_basis(&ints(&[&[1, 1], &[1, 1]]));
        assert_eq!(k, vec![vec![QSqrt::int(1), QSqrt::int(-1)]]);
    }

    #[test]
    fn kernel_over_the_quadratic_field() {
        // rows (1, s) and (s, 2) at q = 2 are proportional
        let s = QSqrt::sqrt_q(2);
        let m = DenseMat::from_rows(vec![
            vec![QSqrt::one(), s.clone()],
            vec![s.clone(), QSqrt::int(2)],
        ])
        .unwrap();
        let k = dense_kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert!(is_kernel_vector(&m, &k[0]));
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn inverse_round_trip() {
        let m = ints(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), DenseMat::identity(3));
        assert!(ints(&[&[1, 2], &[2, 4]]).inverse().is_err());
    }

    #[test]
    fn independence_examples() {
        let m =
            SparseMat::from_triplets(2, 2, [(0, 1, QSqrt::int(3)), (1, 1, QSqrt::int(1))]).unwrap();
        assert!(linear_independence(std::slice::from_ref(&m)).unwrap());
        assert!(!linear_independence(&[m.clone(), m.scale(&QSqrt::int(2))]).unwrap());
        assert!(!linear_independence(&[m.clone(), m.clone()]).unwrap());
        let other = SparseMat::identity(2);
        assert!(linear_independence(&[m.clone(), other]).unwrap());
        assert!(linear_independence(&[m, SparseMat::identity(3)]).is_err());
    }

    proptest! {
        #[test]
        fn kernel_dimension_is_nullity(rows in proptest::collection::vec(proptest::collection::vec(-3i64..4, 5), 1..6)) {
            let m = DenseMat::from_rows(rows.iter().map(|r| r.iter().map(|&v| QSqrt::int(v)).collect()).collect()).unwrap();
            let k = dense_kernel_basis(&m);
            prop_assert_eq!(k.len(), m.ncols() - m.rank());
            for v in &k {
                prop_assert!(is_kernel_vector(&m, v));
            }
            let vecs = k.iter().map(|v| v.iter().cloned().enumerate().filter(|(_, x)| !x.is_zero()).collect()).collect();
            prop_assert_eq!(sparse_rank::<usize>(vecs), k.len());
        }

        #[test]
        fn rank_matches_field_elimination(rows in proptest::collection::vec(proptest::collection::vec(-3i64..4, 4), 4)) {
            let m = DenseMat::from_rows(rows.iter().map(|r| r.iter().map(|&v| QSqrt::new(rat_int(v), rat_int(v % 2), 3)).collect()).collect()).unwrap();
            let det_nonzero = m.inverse().is_ok();
            prop_assert_eq!(det_nonzero, m.rank() == 4);
        }
    }
}
