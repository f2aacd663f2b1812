//! The attenuated space poset: subspaces of F_q^{N+M} meeting the span of the
//! last M coordinates trivially, graded by dimension.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gfq::{
    self, enumerate_rref, odometer, row_space_contains, rref, stack_rank, FieldScalar, GFMatrix,
};

pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;
pub const CACHE_FORMAT: &str = "attposet-cache/1";

/// Gaussian binomial coefficient: the number of k-dimensional subspaces of F_q^n.
pub fn gauss(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num = 1u128;
    let mut den = 1u128;
    for j in 0..k {
        num *= q.pow((n - j) as u32) - 1;
        den *= q.pow((j + 1) as u32) - 1;
    }
    num / den
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InstanceParams {
    pub q: u32,
    pub n: usize,
    pub m: usize,
}

impl InstanceParams {
    pub fn new(q: u32, n: usize, m: usize) -> Result<Self> {
        if !gfq::is_prime(q as u64) {
            return Err(Error::NotPrime(q as u64));
        }
        if n < 1 || m < 1 {
            return Err(Error::InvalidParams(format!(
                "N = {n} and M = {m} must both be positive"
            )));
        }
        Ok(InstanceParams { q, n, m })
    }

    /// Dimension of the ambient space, N + M.
    pub fn ambient_dim(&self) -> usize {
        self.n + self.m
    }

    pub fn grade_size(&self, i: usize) -> u128 {
        gauss(self.n, i, self.q as u64) * (self.q as u128).pow((i * self.m) as u32)
    }

    pub fn grade_sizes(&self) -> Vec<u128> {
        (0..=self.n).map(|i| self.grade_size(i)).collect()
    }

    pub fn total_size(&self) -> u128 {
        self.grade_sizes().iter().sum()
    }

    pub fn require_large_n(&self, what: &str) -> Result<()> {
        if self.n < 6 {
            return Err(Error::NotApplicable(format!(
                "{what} requires N >= 6, got N = {}",
                self.n
            )));
        }
        Ok(())
    }
}

/// An element of the poset, stored by its reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubspaceCanon {
    pub dim: usize,
    pub basis: GFMatrix,
}

impl SubspaceCanon {
    /// Canonical form of the row space of `m`.
    pub fn from_matrix(m: &GFMatrix) -> Self {
        let r = rref(m);
        SubspaceCanon {
            dim: r.rank,
            basis: r.reduced,
        }
    }

    pub fn key(&self) -> &[u32] {
        self.basis.entries()
    }

    /// True when every pivot lies among the first `n` columns, which is
    /// exactly the condition that the subspace meets the tail coordinates
    /// trivially.
    pub fn avoids_tail(&self, n: usize) -> bool {
        self.basis
            .rows()
            .all(|r| r.iter().position(|&v| v != 0).is_some_and(|c| c < n))
    }
}

#[derive(Clone, Debug)]
pub struct Poset {
    params: InstanceParams,
    grades: Vec<Vec<SubspaceCanon>>,
    offsets: Vec<usize>,
    index: HashMap<Vec<u32>, (usize, usize)>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params && self.grades == other.grades
    }
}

impl Poset {
    fn from_grades(params: InstanceParams, grades: Vec<Vec<SubspaceCanon>>) -> Self {
        let mut offsets = Vec::with_capacity(grades.len() + 1);
        let mut index = HashMap::new();
        let mut acc = 0usize;
        for (i, g) in grades.iter().enumerate() {
            offsets.push(acc);
            for (pos, x) in g.iter().enumerate() {
                index.insert(x.key().to_vec(), (i, pos));
            }
            acc += g.len();
        }
        offsets.push(acc);
        Poset {
            params,
            grades,
            offsets,
            index,
        }
    }

    pub fn params(&self) -> InstanceParams {
        self.params
    }

    pub fn grades(&self) -> &[Vec<SubspaceCanon>] {
        &self.grades
    }

    pub fn grade(&self, i: usize) -> &[SubspaceCanon] {
        &self.grades[i]
    }

    pub fn grade_sizes(&self) -> Vec<usize> {
        self.grades.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of the first element of grade i in the global order; index
    /// N+1 holds the total size.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn grade_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn grade_of(&self, global: usize) -> usize {
        self.offsets.partition_point(|&o| o <= global) - 1
    }

    pub fn element(&self, global: usize) -> &SubspaceCanon {
        let i = self.grade_of(global);
        &self.grades[i][global - self.offsets[i]]
    }

    /// (grade, position) of a canonical basis, if it belongs to the poset.
    pub fn locate(&self, x: &SubspaceCanon) -> Option<(usize, usize)> {
        self.index.get(x.key()).copied()
    }

    pub fn global_index(&self, x: &SubspaceCanon) -> Option<usize> {
        self.locate(x).map(|(i, pos)| self.offsets[i] + pos)
    }

    /// Basis of the fixed subspace h: the last M coordinate vectors.
    pub fn h_basis(&self) -> GFMatrix {
        let InstanceParams { q, n, m } = self.params;
        let rows: Vec<Vec<u64>> = (0..m)
            .map(|j| {
                let mut r = vec![0u64; n + m];
                r[n + j] = 1;
                r
            })
            .collect();
        GFMatrix::from_rows(q, n + m, &rows).expect("valid modulus")
    }
}

pub fn enumerate(params: InstanceParams) -> Result<Poset> {
    enumerate_with_cap(params, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_with_cap(params: InstanceParams, cap: u64) -> Result<Poset> {
    let size = params.total_size();
    if size > cap as u128 {
        return Err(Error::EnumerationCap { size, cap });
    }
    let InstanceParams { q, n, m } = params;
    let width = n + m;
    let mut grades = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut grade = Vec::with_capacity(params.grade_size(i) as usize);
        for head in enumerate_rref(q, i, n)? {
            let mut tail = vec![0u32; i * m];
            loop {
                let mut data = Vec::with_capacity(i * width);
                for r in 0..i {
                    data.extend_from_slice(head.row(r));
                    data.extend_from_slice(&tail[r * m..(r + 1) * m]);
                }
                grade.push(SubspaceCanon {
                    dim: i,
                    basis: GFMatrix::from_raw(q, i, width, data),
                });
                if !odometer(&mut tail, q) {
                    break;
                }
            }
        }
        grade.sort_by(|a, b| a.key().cmp(b.key()));
        grades.push(grade);
    }
    Ok(Poset::from_grades(params, grades))
}

/// Whether `y` covers `x`.
pub fn covers(x: &SubspaceCanon, y: &SubspaceCanon) -> bool {
    if y.dim != x.dim + 1 {
        return false;
    }
    let p = y.basis.modulus();
    x.basis.rows().all(|row| {
        let v: Vec<FieldScalar> = row
            .iter()
            .map(|&a| FieldScalar::new(a as u64, p).expect("prime"))
            .collect();
        row_space_contains(&y.basis, &v).unwrap_or(false)
    })
}

/// Whether x + y has dimension i+1 and meets h in a line, for x, y of grade i.
pub fn in_tilde(p: &Poset, x: &SubspaceCanon, y: &SubspaceCanon) -> Result<bool> {
    if x.dim != y.dim {
        return Err(Error::Dimension(format!(
            "grades {} and {} differ",
            x.dim, y.dim
        )));
    }
    let sum = rref(&GFMatrix::stack(&x.basis, &y.basis)?).reduced;
    if sum.nrows() != x.dim + 1 {
        return Ok(false);
    }
    let m = p.params().m;
    let meet = sum.nrows() + m - stack_rank(&sum, &p.h_basis())?;
    Ok(meet == 1)
}

/// All codimension-one subspaces of the row space of `basis`, given the
/// RREF coefficient matrices of shape (k−1)×k for k = rank of `basis`.
pub(crate) fn hyperplanes_from(coeffs: &[GFMatrix], basis: &GFMatrix) -> Vec<SubspaceCanon> {
    coeffs
        .iter()
        .map(|c| SubspaceCanon::from_matrix(&c.mul(basis).expect("conformable")))
        .collect()
}

fn checksum(params: &InstanceParams, grades: &Value) -> String {
    let mut h = Sha256::new();
    h.update(format!("{}:{}:{}:{}", params.q, params.n, params.m, grades).as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn grades_json(p: &Poset) -> Value {
    Value::Array(
        p.grades
            .iter()
            .map(|g| {
                Value::Array(
                    g.iter()
                        .map(|x| Value::Array(x.basis.rows().map(|r| json!(r)).collect()))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn save_cache(p: &Poset, path: &Path) -> Result<()> {
    let grades = grades_json(p);
    let doc = json!({
        "format": CACHE_FORMAT,
        "q": p.params.q,
        "N": p.params.n,
        "M": p.params.m,
        "checksum": checksum(&p.params, &grades),
        "grades": grades,
    });
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(io)?;
        }
    }
    fs::write(path, doc.to_string()).map_err(io)
}

pub fn load_cache(path: &Path) -> Result<Poset> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_cache(&text)
}

fn field<'a>(doc: &'a Value, key: &str) -> Result<&'a Value> {
    doc.get(key)
        .ok_or_else(|| Error::Cache(format!("malformed file: missing field {key}")))
}

fn as_usize(v: &Value, key: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| {
        Error::Cache(format!(
            "malformed file: field {key} is not a non-negative integer"
        ))
    })
}

pub fn parse_cache(text: &str) -> Result<Poset> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| Error::Cache(format!("malformed file: {e}")))?;
    let format = field(&doc, "format")?.as_str().unwrap_or_default();
    if format != CACHE_FORMAT {
        return Err(Error::Cache(format!(
            "version mismatch: expected {CACHE_FORMAT}, found {format:?}"
        )));
    }
    let q = as_usize(field(&doc, "q")?, "q")?;
    let n = as_usize(field(&doc, "N")?, "N")?;
    let m = as_usize(field(&doc, "M")?, "M")?;
    let params = u32::try_from(q)
        .map_err(|_| Error::Cache("parameter mismatch: q out of range".into()))
        .and_then(|q| {
            InstanceParams::new(q, n, m)
                .map_err(|e| Error::Cache(format!("parameter mismatch: {e}")))
        })?;
    let grades_val = field(&doc, "grades")?;
    let stored = field(&doc, "checksum")?
        .as_str()
        .ok_or_else(|| Error::Cache("malformed file: checksum is not a string".into()))?;
    if stored != checksum(&params, grades_val) {
        return Err(Error::Cache("checksum failure".into()));
    }
    let grades_arr = grades_val
        .as_array()
        .ok_or_else(|| Error::Cache("malformed file: grades is not a list".into()))?;
    if grades_arr.len() != n + 1 {
        return Err(Error::Cache(format!(
            "parameter mismatch: {} grades for N = {n}",
            grades_arr.len()
        )));
    }
    let width = n + m;
    let mut grades = Vec::with_capacity(n + 1);
    for (i, g) in grades_arr.iter().enumerate() {
        let elems = g
            .as_array()
            .ok_or_else(|| Error::Cache(format!("malformed file: grade {i} is not a list")))?;
        if elems.len() as u128 != params.grade_size(i) {
            return Err(Error::Cache(format!(
                "parameter mismatch: grade {i} has {} elements, expected {}",
                elems.len(),
                params.grade_size(i)
            )));
        }
        let mut grade: Vec<SubspaceCanon> = Vec::with_capacity(elems.len());
        for e in elems {
            let rows = e.as_array().ok_or_else(|| {
                Error::Cache(format!(
                    "malformed file: element in grade {i} is not a list"
                ))
            })?;
            let mut data = Vec::with_capacity(i * width);
            for r in rows {
                let r = r.as_array().filter(|r| r.len() == width).ok_or_else(|| {
                    Error::Cache(format!(
                        "malformed file: row of width other than {width} in grade {i}"
                    ))
                })?;
                for v in r {
                    let v = v.as_u64().filter(|&v| v < q as u64).ok_or_else(|| {
                        Error::Cache(format!(
                            "malformed file: entry outside [0, {q}) in grade {i}"
                        ))
                    })?;
                    data.push(v as u32);
                }
            }
            if rows.len() != i {
                return Err(Error::Cache(format!(
                    "malformed file: element of dimension {} in grade {i}",
                    rows.len()
                )));
            }
            let x = SubspaceCanon {
                dim: i,
                basis: GFMatrix::from_raw(params.q, i, width, data),
            };
            if rref(&x.basis).reduced != x.basis || !x.avoids_tail(n) {
                return Err(Error::Cache(format!(
                    "malformed file: non-canonical element in grade {i}"
                )));
            }
            if grade.last().is_some_and(|prev| prev.key() >= x.key()) {
                return Err(Error::Cache(format!(
                    "malformed file: grade {i} is not in canonical order"
                )));
            }
            grade.push(x);
        }
        grades.push(grade);
    }
    Ok(Poset::from_grades(params, grades))
}
