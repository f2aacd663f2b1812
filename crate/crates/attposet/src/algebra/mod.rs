//! Generators of the incidence algebra and the identity catalog.
//!
//! Every generator is stored as an integer sparse matrix; K⁻¹ is kept as
//! the integer diagonal diag(q^i) together with the scale q^{−(N+M)}.

mod catalog;
mod check;
mod eval;
mod expr;

pub use catalog::{
    catalog_ids, central_c1, central_c2, independence_ids, independent_on_columns, relation,
    verify_independence, verify_relation, Identity, IndependenceOutcome, Relation, RelationKind,
};
pub use check::{CheckResult, Mode, Witness};
pub use eval::{
    evaluate_dense, evaluate_sparse, verify_identities, verify_identities_dense, word_column,
    Alphabet, ExtLetter, Verification, DEFAULT_DENSE_CAP,
};
pub use expr::{Expr, Factor, Letter, Word};

use std::collections::HashMap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::exact::{IntMat, QSqrt, SparseMat};
use crate::gfq::{enumerate_rref, GFMatrix};
use crate::poset::{hyperplanes_from, InstanceParams, Poset, SubspaceCanon};

#[derive(Clone, Debug)]
pub struct GeneratorSet {
    params: InstanceParams,
    offsets: Vec<usize>,
    raise: IntMat,
    lower: IntMat,
    tilde: IntMat,
    k: IntMat,
    k_rev: IntMat,
    proj: Vec<IntMat>,
}

impl GeneratorSet {
    pub fn params(&self) -> InstanceParams {
        self.params
    }

    /// |P|.
    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn grade_range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn grade_size(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn grade_of(&self, global: usize) -> usize {
        self.offsets.partition_point(|&o| o <= global) - 1
    }

    /// The raising matrix R.
    pub fn r(&self) -> &IntMat {
        &self.raise
    }

    /// The lowering matrix L.
    pub fn l(&self) -> &IntMat {
        &self.lower
    }

    pub fn s(&self) -> &IntMat {
        &self.tilde
    }

    pub fn k(&self) -> &IntMat {
        &self.k
    }

    /// diag(q^i) on grade i, which equals q^{N+M}K⁻¹.
    pub fn k_reversed(&self) -> &IntMat {
        &self.k_rev
    }

    pub fn f(&self, i: usize) -> Result<&IntMat> {
        self.proj.get(i).ok_or_else(|| Error::OutOfRange {
            what: format!("projection index, N = {}", self.params.n),
            index: i as i64,
        })
    }

    /// Scale q^{−(N+M)} with K⁻¹ = scale · k_reversed.
    pub fn kinv_scale(&self) -> QSqrt {
        QSqrt::q_int_power(self.params.q, -(self.params.ambient_dim() as i64))
    }

    pub fn kinv(&self) -> SparseMat {
        self.k_rev.to_qsqrt().scale(&self.kinv_scale())
    }
}

fn diagonal(values: Vec<i128>) -> IntMat {
    SparseMat::diagonal(values)
}

struct HyperplaneMaker {
    q: u32,
    coeffs: HashMap<usize, Vec<GFMatrix>>,
}

impl HyperplaneMaker {
    fn of(&mut self, basis: &GFMatrix) -> Vec<SubspaceCanon> {
        let k = basis.nrows();
        if k == 0 {
            return Vec::new();
        }
        let q = self.q;
        let coeffs = self
            .coeffs
            .entry(k)
            .or_insert_with(|| enumerate_rref(q, k - 1, k).expect("prime modulus"));
        hyperplanes_from(coeffs, basis)
    }
}

pub fn build_generators(p: &Poset) -> Result<GeneratorSet> {
    let params = p.params();
    let InstanceParams { q, n, m } = params;
    let size = p.len();
    let offsets: Vec<usize> = (0..=n + 1).map(|i| p.offset(i)).collect();
    let mut hyper = HyperplaneMaker {
        q,
        coeffs: HashMap::new(),
    };

    let mut raise_rows: Vec<Vec<(usize, i128)>> = Vec::with_capacity(size);
    for x in p.grades().iter().flatten() {
        let mut row: Vec<(usize, i128)> = hyper
            .of(&x.basis)
            .iter()
            .map(|y| p.global_index(y).map(|c| (c, 1)))
            .collect::<Option<_>>()
            .ok_or_else(|| {
                Error::Invalid("a hyperplane of a poset element is missing from the poset".into())
            })?;
        row.sort_unstable();
        raise_rows.push(row);
    }
    let raise = SparseMat::from_triplets(
        size,
        size,
        raise_rows
            .into_iter()
            .enumerate()
            .flat_map(|(r, row)| row.into_iter().map(move |(c, v)| (r, c, v))),
    )?;
    let lower = raise.transpose();

    // Lines of h, embedded in the last M coordinates.
    let lines: Vec<Vec<u32>> = enumerate_rref(q, 1, m)?
        .iter()
        .map(|l| {
            let mut v = vec![0u32; n];
            v.extend_from_slice(l.row(0));
            v
        })
        .collect();
    let mut tilde_rows: Vec<Vec<usize>> = Vec::with_capacity(size);
    for (gx, x) in p.grades().iter().flatten().enumerate() {
        let mut row = Vec::new();
        for w in &lines {
            let rows: Vec<Vec<u64>> = x
                .basis
                .rows()
                .chain(std::iter::once(w.as_slice()))
                .map(|r| r.iter().map(|&v| v as u64).collect())
                .collect();
            let z = SubspaceCanon::from_matrix(&GFMatrix::from_rows(q, n + m, &rows)?);
            for y in hyper.of(&z.basis) {
                if let Some(gy) = p.global_index(&y) {
                    if gy != gx {
                        row.push(gy);
                    }
                }
            }
        }
        row.sort_unstable();
        row.dedup();
        tilde_rows.push(row);
    }
    let tilde = SparseMat::from_triplets(
        size,
        size,
        tilde_rows
            .into_iter()
            .enumerate()
            .flat_map(|(r, row)| row.into_iter().map(move |c| (r, c, 1i128))),
    )?;

    let qi = q as i128;
    let grade_vals = |f: &dyn Fn(usize) -> i128| -> Vec<i128> {
        (0..=n)
            .flat_map(|i| std::iter::repeat_n(f(i), offsets[i + 1] - offsets[i]))
            .collect()
    };
    let k = diagonal(grade_vals(&|i| qi.pow((n + m - i) as u32)));
    let k_rev = diagonal(grade_vals(&|i| qi.pow(i as u32)));
    let proj = (0..=n)
        .map(|j| diagonal(grade_vals(&|i| i128::from(i == j))))
        .collect();
    Ok(GeneratorSet {
        params,
        offsets,
        raise,
        lower,
        tilde,
        k,
        k_rev,
        proj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::{covers, enumerate, in_tilde};

    fn gens(q: u32, n: usize, m: usize) -> (Poset, GeneratorSet) {
        let p = enumerate(InstanceParams::new(q, n, m).unwrap()).unwrap();
        let g = build_generators(&p).unwrap();
        (p, g)
    }

    #[test]
    fn raise_nnz_at_2_2_1() {
        let (_, g) = gens(2, 2, 1);
        assert_eq!(g.r().nnz(), 18);
        assert_eq!(g.r().transpose(), *g.l());
    }

    #[test]
    fn k_diagonal_at_2_2_1() {
        let (_, g) = gens(2, 2, 1);
        let mut vals: Vec<i128> = (0..g.len()).map(|i| g.k().get(i, i)).collect();
        vals.dedup();
        assert_eq!(vals, vec![8, 4, 2]);
        let kinv = g.kinv();
        let prod = g.k().to_qsqrt().mul(&kinv).unwrap();
        assert_eq!(prod, SparseMat::identity(g.len()));
    }

    #[test]
    fn generators_match_pairwise_oracle() {
        for (q, n, m) in [(2, 2, 1), (2, 3, 1), (3, 2, 1), (2, 2, 2)] {
            let (p, g) = gens(q, n, m);
            let all: Vec<&SubspaceCanon> = p.grades().iter().flatten().collect();
            for (a, x) in all.iter().enumerate() {
                for (b, y) in all.iter().enumerate() {
                    assert_eq!(g.r().get(a, b) == 1, covers(y, x), "R at {a},{b}");
                    let t = x.dim == y.dim && in_tilde(&p, x, y).unwrap();
                    assert_eq!(g.s().get(a, b) == 1, t, "S at {a},{b}");
                }
            }
        }
    }

    #[test]
    fn s_is_symmetric_with_zero_diagonal() {
        let (_, g) = gens(2, 3, 2);
        assert_eq!(g.s().transpose(), *g.s());
        assert!((0..g.len()).all(|i| g.s().get(i, i) == 0));
    }

    #[test]
    fn projections_partition_identity() {
        let (_, g) = gens(3, 3, 1);
        let mut sum = IntMat::zeros(g.len(), g.len());
        for i in 0..=3 {
            sum = sum.add(g.f(i).unwrap()).unwrap();
            assert_eq!(g.f(i).unwrap().nnz(), g.grade_size(i));
        }
        assert_eq!(sum, IntMat::identity(g.len()));
        assert!(g.f(4).is_err());
    }
}
