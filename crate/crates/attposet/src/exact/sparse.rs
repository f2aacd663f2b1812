use std::fmt::Debug;

use num_traits::{One, Zero};

use super::QSqrt;
use crate::error::{Error, Result};

/// Ring operations needed by the sparse kernels. Integer instances rely on
/// overflow checks being enabled (the workspace turns them on in every
/// profile), so a wrapped value can never be reported as a result.
pub trait Scalar: Clone + PartialEq + Debug + Zero + One {
    fn add_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self = self.add_ref(rhs);
    }
}

impl Scalar for i128 {
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl Scalar for QSqrt {
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
}

/// Row-compressed sparse matrix; rows hold (column, value) with strictly
/// increasing columns and no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat<T = QSqrt> {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, T)>>,
}

pub type IntMat = SparseMat<i128>;

impl<T: Scalar> SparseMat<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMat {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal((0..n).map(|_| T::one()).collect())
    }

    pub fn diagonal(values: Vec<T>) -> Self {
        let n = values.len();
        let rows = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                if v.is_zero() {
                    Vec::new()
                } else {
                    vec![(i, v)]
                }
            })
            .collect();
        SparseMat {
            nrows: n,
            ncols: n,
            rows,
        }
    }

    /// Builds from (row, col, value) triplets; duplicates are summed and
    /// zeros dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); nrows];
        for (r, c, v) in entries {
            if r >= nrows || c >= ncols {
                return Err(Error::Dimension(format!(
                    "entry ({r},{c}) outside {nrows}x{ncols}"
                )));
            }
            rows[r].push((c, v));
        }
        for row in &mut rows {
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, T)> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match merged.last_mut() {
                    Some((lc, lv)) if *lc == c => lv.add_assign_ref(&v),
                    _ => merged.push((c, v)),
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            *row = merged;
        }
        Ok(SparseMat { nrows, ncols, rows })
    }

    /// Rows given directly; columns must be increasing, zeros are dropped.
    pub(crate) fn from_rows(nrows: usize, ncols: usize, rows: Vec<Vec<(usize, T)>>) -> Self {
        debug_assert_eq!(rows.len(), nrows);
        debug_assert!(rows.iter().all(|r| r.windows(2).all(|w| w[0].0 < w[1].0)));
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.retain(|(_, v)| !v.is_zero());
                r
            })
            .collect();
        SparseMat { nrows, ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, T)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        match self.rows[r].binary_search_by_key(&c, |e| e.0) {
            Ok(k) => self.rows[r][k].1.clone(),
            Err(_) => T::zero(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn first_nonzero(&self) -> Option<(usize, usize, &T)> {
        self.iter().next()
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
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                        out.push(a[i].clone());
                        i += 1;
                    } else if i == a.len() || b[j].0 < a[i].0 {
                        out.push(b[j].clone());
                        j += 1;
                    } else {
                        let v = a[i].1.add_ref(&b[j].1);
                        if !v.is_zero() {
                            out.push((a[i].0, v));
                        }
                        i += 1;
                        j += 1;
                    }
                }
                out
            })
            .collect();
        Ok(SparseMat {
            nrows: self.nrows,
            ncols: self.ncols,
            rows,
        })
    }

    pub fn neg(&self) -> Self {
        self.map(|v| v.neg_ref())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zeros(self.nrows, self.ncols);
        }
        self.map(|v| c.mul_ref(v))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparseMat<U> {
        SparseMat::from_rows(
            self.nrows,
            self.ncols,
            self.rows
                .iter()
                .map(|r| r.iter().map(|(c, v)| (*c, f(v))).collect())
                .collect(),
        )
    }

    /// Row-by-row product with a dense accumulator.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut acc: Vec<Option<T>> = vec![None; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut rows = Vec::with_capacity(self.nrows);
        for arow in &self.rows {
            for (k, av) in arow {
                for (j, bv) in &other.rows[*k] {
                    let t = av.mul_ref(bv);
                    match &mut acc[*j] {
                        Some(x) => x.add_assign_ref(&t),
                        slot @ None => {
                            *slot = Some(t);
                            touched.push(*j);
                        }
                    }
                }
            }
            touched.sort_unstable();
            let mut out = Vec::with_capacity(touched.len());
            for j in touched.drain(..) {
                if let Some(v) = acc[j].take() {
                    if !v.is_zero() {
                        out.push((j, v));
                    }
                }
            }
            rows.push(out);
        }
        Ok(SparseMat {
            nrows: self.nrows,
            ncols: other.ncols,
            rows,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                rows[*c].push((r, v.clone()));
            }
        }
        SparseMat {
            nrows: self.ncols,
            ncols: self.nrows,
            rows,
        }
    }

    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.ncols {
            return Err(Error::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.ncols
            )));
        }
        Ok(self
            .rows
            .iter()
            .map(|row| {
                let mut s = T::zero();
                for (c, a) in row {
                    if !v[*c].is_zero() {
                        s.add_assign_ref(&a.mul_ref(&v[*c]));
                    }
                }
                s
            })
            .collect())
    }

    /// Block with the given row and column ranges.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let out = self.rows[rows.clone()]
            .iter()
            .map(|r| {
                r.iter()
                    .filter(|(c, _)| cols.contains(c))
                    .map(|(c, v)| (c - cols.start, v.clone()))
                    .collect()
            })
            .collect();
        SparseMat {
            nrows: rows.len(),
            ncols: cols.len(),
            rows: out,
        }
    }
}

impl IntMat {
    pub fn to_qsqrt(&self) -> SparseMat<QSqrt> {
        self.map(|&v| QSqrt::rational(super::Rational::from_integer(v.into())))
    }

    /// Overflow-checked product.
    pub fn mul_checked(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut acc = vec![0i128; other.ncols];
        let mut seen = vec![false; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut rows = Vec::with_capacity(self.nrows);
        for arow in &self.rows {
            for (k, av) in arow {
                for (j, bv) in &other.rows[*k] {
                    let t = av.checked_mul(*bv).ok_or(Error::Overflow)?;
                    acc[*j] = acc[*j].checked_add(t).ok_or(Error::Overflow)?;
                    if !seen[*j] {
                        seen[*j] = true;
                        touched.push(*j);
                    }
                }
            }
            touched.sort_unstable();
            let mut out = Vec::with_capacity(touched.len());
            for j in touched.drain(..) {
                seen[j] = false;
                let v = std::mem::take(&mut acc[j]);
                if v != 0 {
                    out.push((j, v));
                }
            }
            rows.push(out);
        }
        Ok(SparseMat {
            nrows: self.nrows,
            ncols: other.ncols,
            rows,
        })
    }

    /// Overflow-checked matrix-vector product.
    pub fn apply_checked(&self, v: &[i128]) -> Result<Vec<i128>> {
        self.rows
            .iter()
            .map(|row| {
                row.iter().try_fold(0i128, |s, (c, a)| {
                    a.checked_mul(v[*c])
                        .and_then(|t| s.checked_add(t))
                        .ok_or(Error::Overflow)
                })
            })
            .collect()
    }

    /// Overflow-checked product with the transpose, without forming it.
    pub fn apply_transpose_checked(&self, v: &[i128]) -> Result<Vec<i128>> {
        let mut out = vec![0i128; self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            let x = v[r];
            if x == 0 {
                continue;
            }
            for (c, a) in row {
                out[*c] = a
                    .checked_mul(x)
                    .and_then(|t| out[*c].checked_add(t))
                    .ok_or(Error::Overflow)?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small(n: usize, m: usize, entries: &[(usize, usize, i64)]) -> SparseMat {
        SparseMat::from_triplets(n, m, entries.iter().map(|&(r, c, v)| (r, c, QSqrt::int(v))))
            .unwrap()
    }

    #[test]
    fn triplets_merge_and_drop_zeros() {
        let m = small(2, 2, &[(0, 1, 2), (0, 1, -2), (1, 0, 3), (1, 0, 4)]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), QSqrt::int(7));
        assert!(SparseMat::<QSqrt>::from_triplets(1, 1, [(1, 0, QSqrt::one())]).is_err());
    }

    #[test]
    fn product_with_zero_is_zero() {
        let a = small(3, 3, &[(0, 0, 1), (1, 2, 5), (2, 1, -3)]);
        assert!(a.mul(&SparseMat::zeros(3, 4)).unwrap().is_zero());
        assert!(a.mul(&SparseMat::zeros(2, 2)).is_err());
    }

    #[test]
    fn cancellation_leaves_no_entries() {
        let a = small(2, 2, &[(0, 0, 1), (0, 1, 1)]);
        let b = small(2, 2, &[(0, 0, 1), (1, 0, -1)]);
        assert!(a.mul(&b).unwrap().is_zero());
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn checked_apply_detects_overflow() {
        let m = IntMat::from_triplets(1, 1, [(0, 0, i128::MAX / 2)]).unwrap();
        assert!(matches!(m.apply_checked(&[3]), Err(Error::Overflow)));
        assert_eq!(
            m.apply_transpose_checked(&[1]).unwrap(),
            vec![i128::MAX / 2]
        );
    }

    fn mat(n: usize, m: usize) -> impl Strategy<Value = SparseMat> {
        proptest::collection::vec((0..n, 0..m, -4i64..5, -2i64..3), 0..12).prop_map(move |es| {
            SparseMat::from_triplets(
                n,
                m,
                es.into_iter().map(|(r, c, a, b)| {
                    (
                        r,
                        c,
                        QSqrt::new(super::super::rat_int(a), super::super::rat_int(b), 2),
                    )
                }),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn associative_and_distributive(a in mat(4, 3), b in mat(3, 5), c in mat(5, 2), d in mat(3, 5)) {
            let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
            let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let lhs = a.mul(&b.add(&d).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&d).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn apply_composes(a in mat(4, 3), b in mat(3, 5), v in proptest::collection::vec(-9i64..10, 5)) {
            let v: Vec<QSqrt> = v.into_iter().map(QSqrt::int).collect();
            let lhs = a.mul(&b).unwrap().apply(&v).unwrap();
            let rhs = a.apply(&b.apply(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn transpose_is_an_involution(a in mat(4, 6)) {
            prop_assert_eq!(a.transpose().transpose(), a);
        }
    }
}
