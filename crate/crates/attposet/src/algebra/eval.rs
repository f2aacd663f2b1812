//! Exact evaluation of identities between expressions.
//!
//! Each term's coefficient is multiplied by the scales of its letters and the
//! whole identity is put over one common denominator D, so a side becomes
//! Σ (p_k + r_k·√q)/D · W_k with integer p_k, r_k and integer word matrices
//! W_k. Because √q is irrational whenever it appears, the two sides agree iff
//! the p-parts and the r-parts agree separately.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::catalog::Identity;
use super::check::{CheckResult, Mode, Witness};
use super::expr::{Expr, Factor, Letter};
use super::GeneratorSet;
use crate::error::{Error, Result};
use crate::exact::{DenseMat, IntMat, QSqrt, Rational, SparseMat};

pub const DEFAULT_DENSE_CAP: usize = 3000;
const VECTOR_ENTRY_MAX: i128 = 1_000_000;

/// An extra matrix available to expressions as `Letter::Ext(k)`, stored as
/// scale · integer matrix.
#[derive(Clone, Debug)]
pub struct ExtLetter {
    scale: QSqrt,
    mat: IntMat,
}

impl ExtLetter {
    pub fn new(scale: QSqrt, mat: IntMat) -> Self {
        ExtLetter { scale, mat }
    }

    /// Splits a rational matrix into 1/lcm(denominators) times an integer
    /// matrix.
    pub fn from_matrix(m: &SparseMat) -> Result<Self> {
        if m.iter().any(|(_, _, v)| !v.is_rational()) {
            return Err(Error::NotApplicable(
                "extra letters must have rational entries".into(),
            ));
        }
        let den = m
            .iter()
            .fold(BigInt::one(), |acc, (_, _, v)| acc.lcm(v.a().denom()));
        let scaled: Vec<(usize, usize, i128)> = m
            .iter()
            .map(|(r, c, v)| {
                (v.a() * Rational::from_integer(den.clone()))
                    .to_integer()
                    .to_i128()
                    .map(|x| (r, c, x))
                    .ok_or(Error::Overflow)
            })
            .collect::<Result<_>>()?;
        Ok(ExtLetter {
            scale: QSqrt::rational(Rational::new(BigInt::one(), den)),
            mat: SparseMat::from_triplets(m.nrows(), m.ncols(), scaled)?,
        })
    }

    pub fn to_matrix(&self) -> SparseMat {
        self.mat.to_qsqrt().scale(&self.scale)
    }
}

pub struct Alphabet<'a> {
    gens: &'a GeneratorSet,
    ext: Vec<ExtLetter>,
}

impl<'a> Alphabet<'a> {
    pub fn new(gens: &'a GeneratorSet) -> Self {
        Alphabet {
            gens,
            ext: Vec::new(),
        }
    }

    pub fn with_ext(gens: &'a GeneratorSet, ext: Vec<ExtLetter>) -> Self {
        Alphabet { gens, ext }
    }

    pub fn gens(&self) -> &GeneratorSet {
        self.gens
    }

    fn q(&self) -> u32 {
        self.gens.params().q
    }

    /// Scale and integer matrix of a letter.
    pub fn letter(&self, l: Letter) -> Result<(QSqrt, &IntMat)> {
        let g = self.gens;
        Ok(match l {
            Letter::R => (QSqrt::one(), g.r()),
            Letter::L => (QSqrt::one(), g.l()),
            Letter::S => (QSqrt::one(), g.s()),
            Letter::K => (QSqrt::one(), g.k()),
            Letter::KInv => (g.kinv_scale(), g.k_reversed()),
            Letter::F(i) => (QSqrt::one(), g.f(i)?),
            Letter::Ext(k) => {
                let e = self.ext.get(k).ok_or_else(|| Error::OutOfRange {
                    what: "extra letter".into(),
                    index: k as i64,
                })?;
                (e.scale.clone(), &e.mat)
            }
        })
    }

    fn support(&self, f: Option<&Factor>) -> usize {
        match f.map(|f| f.letter) {
            Some(Letter::F(i)) if i <= self.gens.params().n => self.gens.grade_size(i),
            _ => self.gens.len(),
        }
    }
}

/// How identities are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verification {
    pub mode: Mode,
    pub trials: u32,
    pub seed: u64,
    pub dense_cap: usize,
}

impl Verification {
    pub fn dense() -> Self {
        Verification {
            mode: Mode::Dense,
            trials: 0,
            seed: 0,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }

    pub fn matrix_free(trials: u32, seed: u64) -> Self {
        Verification {
            mode: Mode::MatrixFree,
            trials,
            seed,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

struct ScaledTerm {
    word: Vec<Factor>,
    p: BigInt,
    r: BigInt,
}

struct Prepared {
    label: String,
    lhs: Vec<ScaledTerm>,
    rhs: Vec<ScaledTerm>,
    den: BigInt,
}

fn prepare(part: &Identity, alpha: &Alphabet) -> Result<Prepared> {
    let scaled = |e: &super::Expr| -> Result<Vec<(Vec<Factor>, QSqrt)>> {
        e.terms()
            .map(|(w, c)| {
                let mut c = c.clone();
                for f in w {
                    let (s, _) = alpha.letter(f.letter)?;
                    c = &c * &s;
                }
                Ok((w.clone(), c))
            })
            .collect()
    };
    let lhs = scaled(&part.lhs)?;
    let rhs = scaled(&part.rhs)?;
    let den = lhs
        .iter()
        .chain(&rhs)
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(&c.denom_lcm()));
    let d = Rational::from_integer(den.clone());
    let int = |(word, c): (Vec<Factor>, QSqrt)| ScaledTerm {
        word,
        p: (c.a() * &d).to_integer(),
        r: (c.b() * &d).to_integer(),
    };
    Ok(Prepared {
        label: part.label.clone(),
        lhs: lhs.into_iter().map(int).collect(),
        rhs: rhs.into_iter().map(int).collect(),
        den,
    })
}

fn value(p: &BigInt, r: &BigInt, den: &BigInt, q: u32) -> QSqrt {
    let a = Rational::new(p.clone(), den.clone());
    let b = Rational::new(r.clone(), den.clone());
    if b.is_zero() {
        QSqrt::rational(a)
    } else {
        QSqrt::new(a, b, q)
    }
}

pub fn verify_identities(
    id: &str,
    parts: &[Identity],
    alpha: &Alphabet,
    v: &Verification,
) -> Result<CheckResult> {
    let prepared: Vec<Prepared> = parts
        .iter()
        .map(|p| prepare(p, alpha))
        .collect::<Result<_>>()?;
    match v.mode {
        Mode::Dense => {
            check_dense_cap(&prepared, alpha, v.dense_cap)?;
            let mut ctx = DenseCtx::new(alpha);
            for p in &prepared {
                if let Some(w) = ctx.compare(p)? {
                    return Ok(CheckResult::fail(id, Mode::Dense, w));
                }
            }
            Ok(CheckResult::pass(id, Mode::Dense))
        }
        Mode::MatrixFree => {
            if v.trials == 0 {
                return Err(Error::Invalid(
                    "matrix-free verification needs at least one trial".into(),
                ));
            }
            for (t, vec) in random_vectors(alpha.gens.len(), v.trials, v.seed)
                .iter()
                .enumerate()
            {
                let mut cache = VecCache::default();
                for p in &prepared {
                    if let Some(w) = compare_on_vector(p, alpha, vec, t as u32, &mut cache)? {
                        return Ok(CheckResult::fail(id, Mode::MatrixFree, w)
                            .with_randomness(v.trials, v.seed));
                    }
                }
            }
            Ok(CheckResult::pass(id, Mode::MatrixFree).with_randomness(v.trials, v.seed))
        }
        Mode::Exact => Err(Error::Invalid(
            "identities are checked in dense or matrix-free mode".into(),
        )),
    }
}

/// The test vectors shared by every identity for a given seed: entries
/// uniform in [0, 10⁶].
pub(crate) fn random_vectors(n: usize, trials: u32, seed: u64) -> Vec<Vec<i128>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            (0..n)
                .map(|_| rng.gen_range(0..=VECTOR_ENTRY_MAX))
                .collect()
        })
        .collect()
}

fn check_dense_cap(prepared: &[Prepared], alpha: &Alphabet, cap: usize) -> Result<()> {
    let worst = prepared
        .iter()
        .flat_map(|p| p.lhs.iter().chain(&p.rhs))
        .map(|t| {
            alpha
                .support(t.word.first())
                .min(alpha.support(t.word.last()))
        })
        .max()
        .unwrap_or(0);
    if worst > cap {
        return Err(Error::DenseCap { size: worst, cap });
    }
    Ok(())
}

type PairRow = Vec<(usize, i128, i128)>;

struct DenseCtx<'a, 'b> {
    alpha: &'a Alphabet<'b>,
    factors: HashMap<Factor, Rc<IntMat>>,
    products: HashMap<(bool, Vec<Factor>), Rc<IntMat>>,
}

impl<'a, 'b> DenseCtx<'a, 'b> {
    fn new(alpha: &'a Alphabet<'b>) -> Self {
        DenseCtx {
            alpha,
            factors: HashMap::new(),
            products: HashMap::new(),
        }
    }

    fn factor(&mut self, f: Factor) -> Result<Rc<IntMat>> {
        if let Some(m) = self.factors.get(&f) {
            return Ok(m.clone());
        }
        let (_, m) = self.alpha.letter(f.letter)?;
        let m = Rc::new(if f.transposed {
            m.transpose()
        } else {
            m.clone()
        });
        self.factors.insert(f, m.clone());
        Ok(m)
    }

    /// Integer product of a word, multiplied from whichever end has the
    /// smaller grade support, with every partial product cached.
    fn product(&mut self, word: &[Factor]) -> Result<Rc<IntMat>> {
        let n = self.alpha.gens.len();
        if word.is_empty() {
            return Ok(Rc::new(IntMat::identity(n)));
        }
        let from_left = self.alpha.support(word.first()) < self.alpha.support(word.last());
        let len = word.len();
        let key = |k: usize| -> (bool, Vec<Factor>) {
            if from_left {
                (true, word[..k].to_vec())
            } else {
                (false, word[len - k..].to_vec())
            }
        };
        let mut k = len;
        while k > 1 && !self.products.contains_key(&key(k)) {
            k -= 1;
        }
        let mut acc = match self.products.get(&key(k)) {
            Some(m) if k > 1 => m.clone(),
            _ => {
                k = 1;
                self.factor(if from_left { word[0] } else { word[len - 1] })?
            }
        };
        while k < len {
            let next = if from_left {
                self.factor(word[k])?
            } else {
                self.factor(word[len - 1 - k])?
            };
            acc = Rc::new(if from_left {
                acc.mul_checked(&next)?
            } else {
                next.mul_checked(&acc)?
            });
            k += 1;
            self.products.insert(key(k), acc.clone());
        }
        Ok(acc)
    }

    fn side(&mut self, terms: &[ScaledTerm]) -> Result<Vec<PairRow>> {
        let n = self.alpha.gens.len();
        let mut mats = Vec::with_capacity(terms.len());
        for t in terms {
            let p = t.p.to_i128().ok_or(Error::Overflow)?;
            let r = t.r.to_i128().ok_or(Error::Overflow)?;
            mats.push((self.product(&t.word)?, p, r));
        }
        let mut acc_p = vec![0i128; n];
        let mut acc_r = vec![0i128; n];
        let mut seen = vec![false; n];
        let mut touched = Vec::new();
        let mut rows = Vec::with_capacity(n);
        for x in 0..n {
            for (m, p, r) in &mats {
                for (c, w) in m.row(x) {
                    let tp = w.checked_mul(*p).ok_or(Error::Overflow)?;
                    let tr = w.checked_mul(*r).ok_or(Error::Overflow)?;
                    acc_p[*c] = acc_p[*c].checked_add(tp).ok_or(Error::Overflow)?;
                    acc_r[*c] = acc_r[*c].checked_add(tr).ok_or(Error::Overflow)?;
                    if !seen[*c] {
                        seen[*c] = true;
                        touched.push(*c);
                    }
                }
            }
            touched.sort_unstable();
            let mut row = Vec::with_capacity(touched.len());
            for c in touched.drain(..) {
                seen[c] = false;
                let (p, r) = (std::mem::take(&mut acc_p[c]), std::mem::take(&mut acc_r[c]));
                if p != 0 || r != 0 {
                    row.push((c, p, r));
                }
            }
            rows.push(row);
        }
        Ok(rows)
    }

    fn compare(&mut self, p: &Prepared) -> Result<Option<Witness>> {
        let lhs = self.side(&p.lhs)?;
        let rhs = self.side(&p.rhs)?;
        let q = self.alpha.q();
        for (x, (a, b)) in lhs.iter().zip(&rhs).enumerate() {
            if a == b {
                continue;
            }
            let col = first_difference(a, b);
            let get = |row: &PairRow| {
                row.iter()
                    .find(|e| e.0 == col)
                    .map_or((BigInt::zero(), BigInt::zero()), |e| {
                        (BigInt::from(e.1), BigInt::from(e.2))
                    })
            };
            let (lp, lr) = get(a);
            let (rp, rr) = get(b);
            return Ok(Some(Witness::Entry {
                part: p.label.clone(),
                row: x,
                col,
                lhs: value(&lp, &lr, &p.den, q),
                rhs: value(&rp, &rr, &p.den, q),
            }));
        }
        Ok(None)
    }
}

fn first_difference(a: &PairRow, b: &PairRow) -> usize {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) => return x.0.min(y.0),
            (Some(x), None) => return x.0,
            (None, Some(y)) => return y.0,
            (None, None) => unreachable!("rows differ"),
        }
    }
}

/// Integers used for matrix-free products: checked i128 first, BigInt when
/// that overflows.
pub(crate) trait VecEntry: Clone + Sized {
    fn zero_entry() -> Self;
    fn mul_add(acc: &Self, a: i128, x: &Self) -> Option<Self>;
    fn is_zero_entry(&self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl VecEntry for i128 {
    fn zero_entry() -> Self {
        0
    }
    fn mul_add(acc: &Self, a: i128, x: &Self) -> Option<Self> {
        a.checked_mul(*x).and_then(|t| acc.checked_add(t))
    }
    fn is_zero_entry(&self) -> bool {
        *self == 0
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl VecEntry for BigInt {
    fn zero_entry() -> Self {
        Zero::zero()
    }
    fn mul_add(acc: &Self, a: i128, x: &Self) -> Option<Self> {
        Some(acc + x * a)
    }
    fn is_zero_entry(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

pub(crate) fn apply_factor<T: VecEntry>(m: &IntMat, transposed: bool, v: &[T]) -> Option<Vec<T>> {
    if transposed {
        let mut out = vec![T::zero_entry(); m.ncols()];
        for (r, x) in v.iter().enumerate() {
            if x.is_zero_entry() {
                continue;
            }
            for (c, a) in m.row(r) {
                out[*c] = T::mul_add(&out[*c], *a, x)?;
            }
        }
        Some(out)
    } else {
        (0..m.nrows())
            .map(|r| {
                m.row(r).iter().try_fold(T::zero_entry(), |s, (c, a)| {
                    if v[*c].is_zero_entry() {
                        Some(s)
                    } else {
                        T::mul_add(&s, *a, &v[*c])
                    }
                })
            })
            .collect()
    }
}

#[derive(Default)]
struct VecCache {
    small: HashMap<Vec<Factor>, Rc<Vec<i128>>>,
    big: HashMap<Vec<Factor>, Rc<Vec<BigInt>>>,
}

fn apply_word_cached<T: VecEntry>(
    alpha: &Alphabet,
    word: &[Factor],
    v: &Rc<Vec<T>>,
    cache: &mut HashMap<Vec<Factor>, Rc<Vec<T>>>,
) -> Result<Option<Rc<Vec<T>>>> {
    let len = word.len();
    let mut k = 0;
    while k < len && !cache.contains_key(&word[k..]) {
        k += 1;
    }
    let mut acc = if k < len {
        cache[&word[k..]].clone()
    } else {
        v.clone()
    };
    while k > 0 {
        k -= 1;
        let f = word[k];
        let (_, m) = alpha.letter(f.letter)?;
        match apply_factor(m, f.transposed, &acc) {
            Some(next) => acc = Rc::new(next),
            None => return Ok(None),
        }
        cache.insert(word[k..].to_vec(), acc.clone());
    }
    Ok(Some(acc))
}

/// W·v for an integer word matrix W, exactly.
fn word_times(
    alpha: &Alphabet,
    word: &[Factor],
    v: &[i128],
    cache: &mut VecCache,
) -> Result<Vec<BigInt>> {
    let small = Rc::new(v.to_vec());
    if let Some(out) = apply_word_cached(alpha, word, &small, &mut cache.small)? {
        return Ok(out.iter().map(|&v| BigInt::from(v)).collect());
    }
    let big = Rc::new(v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
    let out = apply_word_cached(alpha, word, &big, &mut cache.big)?
        .expect("BigInt products cannot overflow");
    Ok(out.iter().map(VecEntry::to_big).collect())
}

fn side_on_vector(
    terms: &[ScaledTerm],
    alpha: &Alphabet,
    v: &[i128],
    cache: &mut VecCache,
) -> Result<(Vec<BigInt>, Vec<BigInt>)> {
    let n = alpha.gens.len();
    let mut p_acc = vec![BigInt::zero(); n];
    let mut r_acc = vec![BigInt::zero(); n];
    for t in terms {
        let w = word_times(alpha, &t.word, v, cache)?;
        for (i, x) in w.iter().enumerate() {
            if Zero::is_zero(x) {
                continue;
            }
            if !Zero::is_zero(&t.p) {
                p_acc[i] += x * &t.p;
            }
            if !Zero::is_zero(&t.r) {
                r_acc[i] += x * &t.r;
            }
        }
    }
    Ok((p_acc, r_acc))
}

fn compare_on_vector(
    p: &Prepared,
    alpha: &Alphabet,
    v: &[i128],
    trial: u32,
    cache: &mut VecCache,
) -> Result<Option<Witness>> {
    let (lp, lr) = side_on_vector(&p.lhs, alpha, v, cache)?;
    let (rp, rr) = side_on_vector(&p.rhs, alpha, v, cache)?;
    let q = alpha.q();
    Ok((0..lp.len())
        .find(|&i| lp[i] != rp[i] || lr[i] != rr[i])
        .map(|i| Witness::Vector {
            part: p.label.clone(),
            trial,
            index: i,
            lhs: value(&lp[i], &lr[i], &p.den, q),
            rhs: value(&rp[i], &rr[i], &p.den, q),
        }))
}

/// Column `col` of the matrix of a word (letter scales included), as sparse
/// (row, value) pairs.
pub fn word_column(alpha: &Alphabet, word: &[Factor], col: usize) -> Result<Vec<(usize, QSqrt)>> {
    let n = alpha.gens.len();
    if col >= n {
        return Err(Error::OutOfRange {
            what: format!("column of a {n}x{n} matrix"),
            index: col as i64,
        });
    }
    let mut scale = QSqrt::one();
    for f in word {
        scale = &scale * &alpha.letter(f.letter)?.0;
    }
    let mut e = vec![0i128; n];
    e[col] = 1;
    let out = word_times(alpha, word, &e, &mut VecCache::default())?;
    Ok(out
        .into_iter()
        .enumerate()
        .filter(|(_, x)| !Zero::is_zero(x))
        .map(|(i, x)| (i, &QSqrt::rational(Rational::from_integer(x)) * &scale))
        .collect())
}

/// Evaluates an expression as a full sparse matrix. Each word is multiplied
/// in checked integer arithmetic and scaled once at the end.
pub fn evaluate_sparse(expr: &Expr, alpha: &Alphabet) -> Result<SparseMat> {
    let n = alpha.gens.len();
    let mut total = SparseMat::zeros(n, n);
    for (word, c) in expr.terms() {
        let mut scale = c.clone();
        let mut prod = IntMat::identity(n);
        for f in word {
            let (s, m) = alpha.letter(f.letter)?;
            scale = &scale * &s;
            prod = if f.transposed {
                prod.mul_checked(&m.transpose())?
            } else {
                prod.mul_checked(m)?
            };
        }
        total = total.add(&prod.to_qsqrt().scale(&scale))?;
    }
    Ok(total)
}

/// Evaluates an expression on small dense matrices supplied per letter.
pub fn evaluate_dense(
    expr: &Expr,
    dim: usize,
    lookup: &dyn Fn(Letter) -> Result<DenseMat>,
) -> Result<DenseMat> {
    let mut cache: HashMap<Factor, DenseMat> = HashMap::new();
    let mut total = DenseMat::zeros(dim, dim);
    for (word, c) in expr.terms() {
        let mut prod = DenseMat::identity(dim);
        for f in word {
            if !cache.contains_key(f) {
                let m = lookup(f.letter)?;
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::Dimension(format!(
                        "letter {} is not {dim}x{dim}",
                        f.letter
                    )));
                }
                cache.insert(*f, if f.transposed { m.transpose() } else { m });
            }
            prod = prod.mul(&cache[f])?;
        }
        total = total.add(&prod.scale(c))?;
    }
    Ok(total)
}

/// Checks identities on dense matrices, reporting the first differing entry.
pub fn verify_identities_dense(
    id: &str,
    parts: &[Identity],
    dim: usize,
    lookup: &dyn Fn(Letter) -> Result<DenseMat>,
) -> Result<CheckResult> {
    for part in parts {
        let lhs = evaluate_dense(&part.lhs, dim, lookup)?;
        let rhs = evaluate_dense(&part.rhs, dim, lookup)?;
        if let Some((row, col, _)) = lhs.sub(&rhs)?.first_nonzero() {
            return Ok(CheckResult::fail(
                id,
                Mode::Dense,
                Witness::Entry {
                    part: part.label.clone(),
                    row,
                    col,
                    lhs: lhs.get(row, col).clone(),
                    rhs: rhs.get(row, col).clone(),
                },
            ));
        }
    }
    Ok(CheckResult::pass(id, Mode::Dense))
}

#[cfg(test)]
mod tests {
    use super::super::build_generators;
    use super::*;
    use crate::poset::{enumerate, InstanceParams};

    fn gens(q: u32, n: usize, m: usize) -> GeneratorSet {
        build_generators(&enumerate(InstanceParams::new(q, n, m).unwrap()).unwrap()).unwrap()
    }

    fn ident(lhs: Expr, rhs: Expr) -> Identity {
        Identity {
            label: "t".into(),
            lhs,
            rhs,
        }
    }

    #[test]
    fn random_vectors_are_reproducible() {
        let a = random_vectors(10, 3, 7);
        assert_eq!(a, random_vectors(10, 3, 7));
        assert_ne!(a, random_vectors(10, 3, 8));
        assert!(a
            .iter()
            .flatten()
            .all(|&x| (0..=VECTOR_ENTRY_MAX).contains(&x)));
    }

    #[test]
    fn kinv_times_k_is_identity_in_both_modes() {
        let g = gens(2, 2, 1);
        let a = Alphabet::new(&g);
        let id = ident(Expr::word(&[Letter::K, Letter::KInv]), Expr::one());
        for v in [Verification::dense(), Verification::matrix_free(2, 1)] {
            assert!(
                verify_identities("t", std::slice::from_ref(&id), &a, &v)
                    .unwrap()
                    .pass
            );
        }
    }

    #[test]
    fn false_identity_has_matching_witnesses() {
        let g = gens(2, 2, 1);
        let a = Alphabet::new(&g);
        let id = ident(
            Expr::word(&[Letter::R, Letter::L]),
            Expr::word(&[Letter::L, Letter::R]),
        );
        let d =
            verify_identities("t", std::slice::from_ref(&id), &a, &Verification::dense()).unwrap();
        assert!(!d.pass);
        let Some(Witness::Entry { lhs, rhs, .. }) = d.witness else {
            panic!()
        };
        assert_ne!(lhs, rhs);
        let m = verify_identities("t", &[id], &a, &Verification::matrix_free(1, 3)).unwrap();
        assert!(!m.pass);
    }

    #[test]
    fn irrational_coefficients_split_exactly() {
        let g = gens(2, 2, 1);
        let a = Alphabet::new(&g);
        let s = QSqrt::sqrt_q(2);
        // (√2 K)(√2 K) = 2 K²
        let lhs = Expr::letter(Letter::K).scale(&s).pow(2);
        let rhs = Expr::word(&[Letter::K, Letter::K]).scale(&QSqrt::int(2));
        assert!(
            verify_identities(
                "t",
                &[ident(lhs.clone(), rhs.clone())],
                &a,
                &Verification::dense()
            )
            .unwrap()
            .pass
        );
        let wrong = Expr::word(&[Letter::K, Letter::K]).scale(&s);
        let r = verify_identities(
            "t",
            &[ident(lhs, wrong)],
            &a,
            &Verification::matrix_free(1, 0),
        )
        .unwrap();
        let Some(Witness::Vector { lhs, rhs, .. }) = r.witness else {
            panic!()
        };
        assert!(lhs.is_rational());
        assert!(!rhs.is_rational());
    }

    #[test]
    fn transposed_letters_use_literal_transposes() {
        let g = gens(2, 3, 1);
        let a = Alphabet::new(&g);
        let id = ident(Expr::transposed_letter(Letter::R), Expr::letter(Letter::L));
        assert!(
            verify_identities("t", std::slice::from_ref(&id), &a, &Verification::dense())
                .unwrap()
                .pass
        );
        assert!(
            verify_identities("t", &[id], &a, &Verification::matrix_free(2, 5))
                .unwrap()
                .pass
        );
    }

    #[test]
    fn dense_cap_is_enforced_by_support() {
        let g = gens(2, 3, 1);
        let a = Alphabet::new(&g);
        let id = ident(
            Expr::word(&[Letter::R, Letter::L]),
            Expr::word(&[Letter::R, Letter::L]),
        );
        let cap = g.grade_size(0).max(g.grade_size(1));
        assert!(cap < g.len());
        let v = Verification {
            dense_cap: cap,
            ..Verification::dense()
        };
        assert!(matches!(
            verify_identities("t", &[id], &a, &v),
            Err(Error::DenseCap { .. })
        ));
        let restricted = ident(
            Expr::word(&[Letter::R, Letter::F(0)]),
            Expr::word(&[Letter::F(1), Letter::R, Letter::F(0)]),
        );
        assert!(verify_identities("t", &[restricted], &a, &v).unwrap().pass);
    }

    #[test]
    fn ext_letters_round_trip() {
        let g = gens(2, 2, 1);
        let r = g.r().to_qsqrt().scale(&QSqrt::frac(3, 4));
        let e = ExtLetter::from_matrix(&r).unwrap();
        assert_eq!(e.to_matrix(), r);
        let a = Alphabet::with_ext(&g, vec![e]);
        let id = ident(
            Expr::letter(Letter::Ext(0)).scale(&QSqrt::int(4)),
            Expr::letter(Letter::R).scale(&QSqrt::int(3)),
        );
        assert!(
            verify_identities("t", &[id], &a, &Verification::dense())
                .unwrap()
                .pass
        );
    }

    #[test]
    fn word_column_matches_dense_product() {
        let g = gens(2, 3, 1);
        let a = Alphabet::new(&g);
        let word: Vec<Factor> = [Letter::R, Letter::R, Letter::L]
            .iter()
            .map(|&l| Factor::plain(l))
            .collect();
        let full = g.r().mul(g.r()).unwrap().mul(g.l()).unwrap();
        for col in [0, 3, 20] {
            let got = word_column(&a, &word, col).unwrap();
            let want: Vec<(usize, QSqrt)> = (0..g.len())
                .filter(|&r| full.get(r, col) != 0)
                .map(|r| (r, QSqrt::int(full.get(r, col) as i64)))
                .collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn sparse_and_dense_evaluation_agree() {
        let g = gens(2, 2, 1);
        let a = Alphabet::new(&g);
        let e = Expr::word(&[Letter::R, Letter::L]).scale(&QSqrt::sqrt_q(2))
            - Expr::letter(Letter::KInv);
        let sparse = evaluate_sparse(&e, &a).unwrap();
        let lookup = |l: Letter| -> Result<DenseMat> {
            let (s, m) = a.letter(l)?;
            Ok(DenseMat::from_sparse(&m.to_qsqrt().scale(&s)))
        };
        let dense = evaluate_dense(&e, g.len(), &lookup).unwrap();
        assert_eq!(DenseMat::from_sparse(&sparse), dense);
        let same = Identity::new("t", e.clone(), e);
        assert!(
            verify_identities_dense("t", &[same], g.len(), &lookup)
                .unwrap()
                .pass
        );
    }
}
