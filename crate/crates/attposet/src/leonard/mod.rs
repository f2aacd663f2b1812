//! Pairs A, A* built from the raising and lowering maps:
//! A = Σ α_i R F_i + Σ θ_i F_i and A* = Σ α*_i L F_i + Σ θ*_i F_i.
//!
//! Includes the degree-4 commutators B, B*, the recurrence coefficients, the
//! eight parameter families that make B and B* vanish, the block tables of B
//! and B*, and the Leonard pair test on each irreducible module.

mod blocks;
mod cases;

pub use blocks::{block_checks, block_formula, block_tables, zero_block, BlockFormula, BlockTable};
pub use cases::{
    case_expand, case_expand_with_gauge, leonard_check, phi_closed_form, AxiomViolation, CaseSpec,
    CaseTag, LeonardOutcome, ParameterArray,
};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebra::{
    evaluate_dense, verify_identities, verify_identities_dense, Alphabet, CheckResult, Expr,
    ExtLetter, GeneratorSet, Identity, Letter, Verification,
};
use crate::error::{Error, Result};
use crate::exact::{DenseMat, QSqrt, SparseMat};
use crate::poset::InstanceParams;
use crate::specdec::{enumerate_types, module_model, ModuleModel};

/// The letter A in B/B* expressions.
pub const LETTER_A: Letter = Letter::Ext(0);
/// The letter A* in B/B* expressions.
pub const LETTER_A_STAR: Letter = Letter::Ext(1);

fn distinct(seq: &[QSqrt], name: &str) -> Result<()> {
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return Err(Error::Invalid(format!(
                    "{name}_{i} = {name}_{j} = {}",
                    seq[i]
                )));
            }
        }
    }
    Ok(())
}

/// Off-diagonal weights α_0..α_{N−1}, α*_1..α*_N and eigenvalue sequences
/// θ_0..θ_N, θ*_0..θ*_N.
#[derive(Clone, Debug, PartialEq)]
pub struct LeonardInput {
    alphas: Vec<QSqrt>,
    alpha_stars: Vec<QSqrt>,
    thetas: Vec<QSqrt>,
    theta_stars: Vec<QSqrt>,
}

impl LeonardInput {
    /// `alpha_stars[k]` is α*_{k+1}.
    pub fn new(
        alphas: Vec<QSqrt>,
        alpha_stars: Vec<QSqrt>,
        thetas: Vec<QSqrt>,
        theta_stars: Vec<QSqrt>,
    ) -> Result<Self> {
        let n = alphas.len();
        if n == 0 || alpha_stars.len() != n || thetas.len() != n + 1 || theta_stars.len() != n + 1 {
            return Err(Error::Dimension(format!(
                "need N weights of each kind and N+1 eigenvalues of each kind, got {}, {}, {}, {}",
                n,
                alpha_stars.len(),
                thetas.len(),
                theta_stars.len()
            )));
        }
        if let Some(i) = alphas.iter().position(Zero::is_zero) {
            return Err(Error::Invalid(format!("α_{i} = 0")));
        }
        if let Some(i) = alpha_stars.iter().position(Zero::is_zero) {
            return Err(Error::Invalid(format!("α*_{} = 0", i + 1)));
        }
        distinct(&thetas, "θ")?;
        distinct(&theta_stars, "θ*")?;
        Ok(LeonardInput {
            alphas,
            alpha_stars,
            thetas,
            theta_stars,
        })
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    /// α_i, zero outside 0 ≤ i ≤ N−1.
    pub fn alpha(&self, i: i64) -> QSqrt {
        usize::try_from(i)
            .ok()
            .and_then(|i| self.alphas.get(i))
            .cloned()
            .unwrap_or_else(QSqrt::zero)
    }

    /// α*_i, zero outside 1 ≤ i ≤ N.
    pub fn alpha_star(&self, i: i64) -> QSqrt {
        usize::try_from(i - 1)
            .ok()
            .and_then(|i| self.alpha_stars.get(i))
            .cloned()
            .unwrap_or_else(QSqrt::zero)
    }

    /// ξ_i = α_i α*_{i+1}.
    pub fn xi(&self, i: i64) -> QSqrt {
        self.alpha(i) * self.alpha_star(i + 1)
    }

    /// θ_i; indices outside 0..=N are indeterminates and are refused.
    pub fn theta(&self, i: i64) -> Result<QSqrt> {
        pick(&self.thetas, i, "θ")
    }

    pub fn theta_star(&self, i: i64) -> Result<QSqrt> {
        pick(&self.theta_stars, i, "θ*")
    }

    pub fn thetas(&self) -> &[QSqrt] {
        &self.thetas
    }

    pub fn theta_stars(&self) -> &[QSqrt] {
        &self.theta_stars
    }

    /// The same data with θ_i replaced.
    pub fn with_theta(&self, i: usize, v: QSqrt) -> Result<Self> {
        let mut thetas = self.thetas.clone();
        *thetas.get_mut(i).ok_or(Error::OutOfRange {
            what: "eigenvalue index".into(),
            index: i as i64,
        })? = v;
        Self::new(
            self.alphas.clone(),
            self.alpha_stars.clone(),
            thetas,
            self.theta_stars.clone(),
        )
    }

    pub fn to_json(&self) -> Value {
        let list = |v: &[QSqrt]| v.iter().map(QSqrt::to_json_compact).collect::<Vec<_>>();
        json!({
            "alphas": list(&self.alphas),
            "alphaStars": list(&self.alpha_stars),
            "thetas": list(&self.thetas),
            "thetaStars": list(&self.theta_stars),
        })
    }
}

fn pick(seq: &[QSqrt], i: i64, name: &str) -> Result<QSqrt> {
    usize::try_from(i)
        .ok()
        .and_then(|i| seq.get(i))
        .cloned()
        .ok_or_else(|| Error::OutOfRange {
            what: format!("{name} index, need 0..={}", seq.len() - 1),
            index: i,
        })
}

/// β, γ, γ*, ϱ, ϱ* of the tridiagonal relations.
#[derive(Clone, Debug, PartialEq)]
pub struct TDCoeffs {
    pub beta: QSqrt,
    pub gamma: QSqrt,
    pub gamma_star: QSqrt,
    pub rho: QSqrt,
    pub rho_star: QSqrt,
}

impl TDCoeffs {
    /// β = 2 or β = −2. No pair with B = B* = 0 has such a β.
    pub fn beta_is_degenerate(&self) -> bool {
        self.beta == QSqrt::int(2) || self.beta == QSqrt::int(-2)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "beta": self.beta.to_json_compact(),
            "gamma": self.gamma.to_json_compact(),
            "gammaStar": self.gamma_star.to_json_compact(),
            "rho": self.rho.to_json_compact(),
            "rhoStar": self.rho_star.to_json_compact(),
            "betaDegenerate": self.beta_is_degenerate(),
        })
    }
}

fn ratio(seq: &[QSqrt], i: usize) -> Result<QSqrt> {
    (&seq[i - 2] - &seq[i + 1]).div_exact(&(&seq[i - 1] - &seq[i]))
}

fn gamma_at(seq: &[QSqrt], beta: &QSqrt, i: usize) -> QSqrt {
    &seq[i - 1] - beta * &seq[i] + &seq[i + 1]
}

fn rho_at(seq: &[QSqrt], beta: &QSqrt, gamma: &QSqrt, i: usize) -> QSqrt {
    let (a, b) = (&seq[i - 1], &seq[i]);
    a * a - beta * a * b + b * b - gamma * (a + b)
}

/// Coefficients determined by two eigenvalue sequences, each checked across
/// its whole range.
pub fn standard_params(thetas: &[QSqrt], theta_stars: &[QSqrt]) -> Result<TDCoeffs> {
    if thetas.len() != theta_stars.len() {
        return Err(Error::Dimension(
            "eigenvalue sequences differ in length".into(),
        ));
    }
    if thetas.len() < 4 {
        return Err(Error::NotApplicable("need N ≥ 3 to determine β".into()));
    }
    distinct(thetas, "θ")?;
    distinct(theta_stars, "θ*")?;
    let beta = ratio(thetas, 2)? - QSqrt::one();
    let gamma = gamma_at(thetas, &beta, 1);
    let gamma_star = gamma_at(theta_stars, &beta, 1);
    let coeffs = TDCoeffs {
        rho: rho_at(thetas, &beta, &gamma, 1),
        rho_star: rho_at(theta_stars, &beta, &gamma_star, 1),
        beta,
        gamma,
        gamma_star,
    };
    match td_violation(thetas, theta_stars, &coeffs)? {
        Some(msg) => Err(Error::NotRecurrent(msg)),
        None => Ok(coeffs),
    }
}

/// The first relation between eigenvalues and coefficients that fails, over
/// the ranges available for sequences of this length.
pub fn td_violation(
    thetas: &[QSqrt],
    theta_stars: &[QSqrt],
    c: &TDCoeffs,
) -> Result<Option<String>> {
    let n = thetas.len().saturating_sub(1);
    let b1 = &c.beta + &QSqrt::one();
    for (seq, name) in [(thetas, "θ"), (theta_stars, "θ*")] {
        for i in 2..n {
            if ratio(seq, i)? != b1 {
                return Ok(Some(format!("{name}: β+1 ratio differs at i = {i}")));
            }
        }
    }
    for (seq, g, r, name) in [
        (thetas, &c.gamma, &c.rho, "θ"),
        (theta_stars, &c.gamma_star, &c.rho_star, "θ*"),
    ] {
        for i in 1..n {
            if &gamma_at(seq, &c.beta, i) != g {
                return Ok(Some(format!("{name}: γ differs at i = {i}")));
            }
        }
        for i in 1..=n {
            if &rho_at(seq, &c.beta, g, i) != r {
                return Ok(Some(format!("{name}: ϱ differs at i = {i}")));
            }
        }
    }
    Ok(None)
}

/// Closed forms of a β-recurrent sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum RecurrenceShape {
    /// a + b i + c i², for β = 2.
    Quadratic,
    /// a + b (−1)^i + c i (−1)^i, for β = −2.
    Alternating,
    /// a + b Q^i + c Q^{−i} with β = Q + Q⁻¹ and |Q| > 1.
    Geometric { base: QSqrt },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceFit {
    pub shape: RecurrenceShape,
    pub a: QSqrt,
    pub b: QSqrt,
    pub c: QSqrt,
}

impl RecurrenceShape {
    fn basis(&self, i: usize) -> Result<[QSqrt; 3]> {
        let sign = if i.is_multiple_of(2) {
            QSqrt::one()
        } else {
            -QSqrt::one()
        };
        let iv = QSqrt::int(i as i64);
        Ok(match self {
            RecurrenceShape::Quadratic => [QSqrt::one(), iv.clone(), &iv * &iv],
            RecurrenceShape::Alternating => [QSqrt::one(), sign.clone(), iv * sign],
            RecurrenceShape::Geometric { base } => {
                [QSqrt::one(), base.pow(i as i64)?, base.pow(-(i as i64))?]
            }
        })
    }
}

impl RecurrenceFit {
    pub fn value(&self, i: usize) -> Result<QSqrt> {
        let [u, v, w] = self.shape.basis(i)?;
        Ok(&self.a * &u + &self.b * &v + &self.c * &w)
    }
}

/// Whether θ_{i−2} − θ_{i+1} = (β+1)(θ_{i−1} − θ_i) wherever defined.
pub fn is_beta_recurrent(seq: &[QSqrt], beta: &QSqrt) -> bool {
    let b1 = beta + &QSqrt::one();
    (2..seq.len().saturating_sub(1))
        .all(|i| &seq[i - 2] - &seq[i + 1] == &b1 * &(&seq[i - 1] - &seq[i]))
}

/// Fits the closed form matching β exactly.
pub fn beta_fit(seq: &[QSqrt], beta: &QSqrt) -> Result<RecurrenceFit> {
    if seq.len() < 4 {
        return Err(Error::NotApplicable("need at least four terms".into()));
    }
    if !is_beta_recurrent(seq, beta) {
        return Err(Error::NotRecurrent(format!("not {beta}-recurrent")));
    }
    let shape = if *beta == QSqrt::int(2) {
        RecurrenceShape::Quadratic
    } else if *beta == QSqrt::int(-2) {
        RecurrenceShape::Alternating
    } else {
        let disc = beta * beta - QSqrt::int(4);
        let root = disc.sqrt().ok_or_else(|| {
            Error::NotRecurrent(format!("Q + 1/Q = {beta} has no root in the scalar field"))
        })?;
        let half = QSqrt::frac(1, 2);
        let (q1, q2) = (&(beta + &root) * &half, &(beta - &root) * &half);
        let base = if q1.to_f64().abs() >= q2.to_f64().abs() {
            q1
        } else {
            q2
        };
        RecurrenceShape::Geometric { base }
    };
    let rows = (0..3)
        .map(|i| shape.basis(i).map(Vec::from))
        .collect::<Result<Vec<_>>>()?;
    let inv = DenseMat::from_rows(rows)?.inverse()?;
    let abc = inv.apply(&seq[..3])?;
    let fit = RecurrenceFit {
        shape,
        a: abc[0].clone(),
        b: abc[1].clone(),
        c: abc[2].clone(),
    };
    for (i, v) in seq.iter().enumerate() {
        if fit.value(i)? != *v {
            return Err(Error::NotRecurrent(format!("closed form misses term {i}")));
        }
    }
    Ok(fit)
}

/// ♥_i = (β+1)((θ*_i−θ*_{i+2})(θ_{i+1}−θ_i) + (θ*_{i+1}−θ*_{i+2})(θ_i−θ_{i+2})).
pub fn heartsuit(i: usize, thetas: &[QSqrt], theta_stars: &[QSqrt], beta: &QSqrt) -> Result<QSqrt> {
    let n = thetas.len().min(theta_stars.len());
    if i + 2 >= n {
        return Err(Error::OutOfRange {
            what: format!("♥ index, need 0..={}", n.saturating_sub(3)),
            index: i as i64,
        });
    }
    let (t, s) = (thetas, theta_stars);
    Ok((beta + &QSqrt::one())
        * ((&s[i] - &s[i + 2]) * (&t[i + 1] - &t[i])
            + (&s[i + 1] - &s[i + 2]) * (&t[i] - &t[i + 2])))
}

/// The R²F_i coefficient body from the F_{i+2}BF_i table; equals ♥_i under
/// the standard assumption (0 ≤ i ≤ N−2).
pub fn heart_from_b(i: usize, inp: &LeonardInput, c: &TDCoeffs) -> Result<QSqrt> {
    let i = i as i64;
    let (t, s) = (|k| inp.theta(k), |k| inp.theta_star(k));
    let b1 = &c.beta + &QSqrt::one();
    Ok(
        (s(i)? - s(i + 2)?) * (t(i)? + t(i + 1)? + t(i + 2)? - &c.gamma)
            - b1 * ((s(i + 1)? - s(i + 2)?) * t(i + 2)? + (s(i)? - s(i + 1)?) * t(i)?),
    )
}

/// The L²F_i coefficient body from the F_{i−2}B*F_i table; equals −♥_{i−2}
/// under the standard assumption (2 ≤ i ≤ N).
pub fn heart_from_bstar(i: usize, inp: &LeonardInput, c: &TDCoeffs) -> Result<QSqrt> {
    let i = i as i64;
    let (t, s) = (|k| inp.theta(k), |k| inp.theta_star(k));
    let b1 = &c.beta + &QSqrt::one();
    Ok(
        (t(i)? - t(i - 2)?) * (s(i)? + s(i - 1)? + s(i - 2)? - &c.gamma_star)
            - b1 * ((t(i - 1)? - t(i - 2)?) * s(i - 2)? + (t(i)? - t(i - 1)?) * s(i)?),
    )
}

/// Both ♥ identities over their full ranges.
pub fn verify_heart(inp: &LeonardInput, c: &TDCoeffs) -> Result<CheckResult> {
    use crate::algebra::{Mode, Witness};
    let n = inp.n();
    for i in 0..=n.saturating_sub(2) {
        let h = heartsuit(i, inp.thetas(), inp.theta_stars(), &c.beta)?;
        let lhs = heart_from_b(i, inp, c)?;
        if lhs != h {
            return Ok(CheckResult::fail(
                "HEART",
                Mode::Exact,
                Witness::Message(format!("B-table form at i = {i}: {lhs} vs ♥ = {h}")),
            ));
        }
        let star = heart_from_bstar(i + 2, inp, c)?;
        if star != -h.clone() {
            return Ok(CheckResult::fail(
                "HEART",
                Mode::Exact,
                Witness::Message(format!(
                    "B*-table form at i = {}: {star} vs −♥ = {}",
                    i + 2,
                    -h
                )),
            ));
        }
    }
    Ok(CheckResult::pass("HEART", Mode::Exact))
}

/// The scalar relations a pair with B = B* = 0 forces on ξ and ♥:
/// three recurrences for 1 ≤ i ≤ N−3, and the i = 0 relation for ♥_0.
pub fn verify_xi_identities(
    inp: &LeonardInput,
    c: &TDCoeffs,
    params: InstanceParams,
) -> Result<CheckResult> {
    use crate::algebra::{Mode, Witness};
    let q = params.q;
    let n = inp.n() as i64;
    let nm = params.ambient_dim() as i64;
    let b1 = &c.beta + &QSqrt::one();
    let qq = QSqrt::int(q as i64);
    let xi = |i: i64| inp.xi(i);
    let fail = |msg: String| {
        Ok(CheckResult::fail(
            "XI-IDENTITIES",
            Mode::Exact,
            Witness::Message(msg),
        ))
    };
    for i in 1..=n - 3 {
        let h = heartsuit(i as usize, inp.thetas(), inp.theta_stars(), &c.beta)?;
        let first = xi(i - 1) - &b1 * xi(i) + &b1 * xi(i + 1) - xi(i + 2);
        let second = xi(i - 1) * QSqrt::frac(1, q as i64) - &b1 * xi(i + 1)
            + (&qq + &QSqrt::one()) * xi(i + 2);
        let third = xi(i - 1)
            - xi(i + 2)
            - QSqrt::frac(1, q as i64 + 1) * QSqrt::q_int_power(q, 2 + i - nm) * h;
        for (k, v) in [first, second, third].iter().enumerate() {
            if !v.is_zero() {
                return fail(format!("identity {} at i = {i} leaves {v}", k + 1));
            }
        }
    }
    if n >= 3 {
        let lhs = QSqrt::q_int_power(q, -(params.m as i64))
            * heartsuit(0, inp.thetas(), inp.theta_stars(), &c.beta)?;
        let rhs = heart_zero_series(inp, c, params);
        if lhs != rhs {
            return fail(format!("♥_0 relation: {lhs} vs {rhs}"));
        }
    }
    Ok(CheckResult::pass("XI-IDENTITIES", Mode::Exact))
}

/// [k] = (q^k − 1)/(q − 1).
pub(crate) fn q_count(q: u32, k: i64) -> QSqrt {
    (QSqrt::q_int_power(q, k) - QSqrt::one()) * QSqrt::frac(1, q as i64 - 1)
}

/// [N](β+1)ξ_0 − [N−1][2](β+1)ξ_1 + [N−2][3]ξ_2.
pub(crate) fn heart_zero_series(inp: &LeonardInput, c: &TDCoeffs, params: InstanceParams) -> QSqrt {
    let q = params.q;
    let n = params.n as i64;
    let b1 = &c.beta + &QSqrt::one();
    q_count(q, n) * &b1 * inp.xi(0) - q_count(q, n - 1) * q_count(q, 2) * &b1 * inp.xi(1)
        + q_count(q, n - 2) * q_count(q, 3) * inp.xi(2)
}

/// A and A* on the whole standard module.
pub fn build_a_astar(inp: &LeonardInput, g: &GeneratorSet) -> Result<(SparseMat, SparseMat)> {
    let n = g.params().n;
    if inp.n() != n {
        return Err(Error::Dimension(format!(
            "input has N = {}, instance has N = {n}",
            inp.n()
        )));
    }
    let size = g.len();
    let grade: Vec<usize> = (0..=n)
        .flat_map(|i| std::iter::repeat_n(i, g.grade_size(i)))
        .collect();
    let grade = &grade;
    fn diag<'a>(
        seq: &'a [QSqrt],
        grade: &'a [usize],
    ) -> impl Iterator<Item = (usize, usize, QSqrt)> + 'a {
        grade
            .iter()
            .enumerate()
            .map(move |(x, &i)| (x, x, seq[i].clone()))
    }
    let a = SparseMat::from_triplets(
        size,
        size,
        g.r()
            .iter()
            .map(|(row, col, _)| (row, col, inp.alpha(grade[col] as i64)))
            .chain(diag(inp.thetas(), grade)),
    )?;
    let astar = SparseMat::from_triplets(
        size,
        size,
        g.l()
            .iter()
            .map(|(row, col, _)| (row, col, inp.alpha_star(grade[col] as i64)))
            .chain(diag(inp.theta_stars(), grade)),
    )?;
    Ok((a, astar))
}

/// A and A* on one irreducible module, computed from the module's R, L, F.
pub fn build_a_astar_module(
    inp: &LeonardInput,
    model: &ModuleModel,
) -> Result<(DenseMat, DenseMat)> {
    let dim = model.dim();
    let mut a = DenseMat::zeros(dim, dim);
    let mut astar = DenseMat::zeros(dim, dim);
    for i in 0..=inp.n() {
        let f = model.f(i)?;
        let (ii, si) = (i as i64, i);
        a = a
            .add(&model.rm.mul(&f)?.scale(&inp.alpha(ii)))?
            .add(&f.scale(&inp.thetas()[si]))?;
        astar = astar
            .add(&model.lm.mul(&f)?.scale(&inp.alpha_star(ii)))?
            .add(&f.scale(&inp.theta_stars()[si]))?;
    }
    Ok((a, astar))
}

fn word(x: Letter, y: Letter, pattern: &str) -> Expr {
    let letters: Vec<Letter> = pattern
        .chars()
        .map(|ch| if ch == 'a' { x } else { y })
        .collect();
    Expr::word(&letters)
}

/// A³A* − (β+1)A²A*A + (β+1)AA*A² − A*A³ − γ(A²A* − A*A²) − ϱ(AA* − A*A)
/// for (x, y) = (A, A*); swapping the letters and using γ*, ϱ* gives B*.
fn tridiagonal_expr(x: Letter, y: Letter, beta: &QSqrt, gamma: &QSqrt, rho: &QSqrt) -> Expr {
    let b1 = beta + &QSqrt::one();
    let w = |p: &str| word(x, y, p);
    let cubic = &(&(&w("aaab") - &w("aaba").scale(&b1)) + &w("abaa").scale(&b1)) - &w("baaa");
    let quad = (&w("aab") - &w("baa")).scale(gamma);
    let lin = (&w("ab") - &w("ba")).scale(rho);
    &(&cubic - &quad) - &lin
}

/// B in the letters A = Ext(0), A* = Ext(1).
pub fn b_expr(c: &TDCoeffs) -> Expr {
    tridiagonal_expr(LETTER_A, LETTER_A_STAR, &c.beta, &c.gamma, &c.rho)
}

/// B* in the letters A = Ext(0), A* = Ext(1).
pub fn bstar_expr(c: &TDCoeffs) -> Expr {
    tridiagonal_expr(LETTER_A_STAR, LETTER_A, &c.beta, &c.gamma_star, &c.rho_star)
}

/// B written as the commutator [A, A²A* − βAA*A + A*A² − γ(AA*+A*A) − ϱA*].
pub fn b_commutator_expr(c: &TDCoeffs) -> Expr {
    commutator_form(LETTER_A, LETTER_A_STAR, &c.beta, &c.gamma, &c.rho)
}

pub fn bstar_commutator_expr(c: &TDCoeffs) -> Expr {
    commutator_form(LETTER_A_STAR, LETTER_A, &c.beta, &c.gamma_star, &c.rho_star)
}

fn commutator_form(x: Letter, y: Letter, beta: &QSqrt, gamma: &QSqrt, rho: &QSqrt) -> Expr {
    let w = |p: &str| word(x, y, p);
    let inner = &(&(&(&w("aab") - &w("aba").scale(beta)) + &w("baa"))
        - &(&w("ab") + &w("ba")).scale(gamma))
        - &w("b").scale(rho);
    Expr::letter(x).commutator(&inner)
}

/// B and B* for explicit dense A, A*.
pub fn build_b_bstar_dense(
    a: &DenseMat,
    astar: &DenseMat,
    c: &TDCoeffs,
) -> Result<(DenseMat, DenseMat)> {
    let dim = a.nrows();
    let lookup = |l: Letter| match l {
        LETTER_A => Ok(a.clone()),
        LETTER_A_STAR => Ok(astar.clone()),
        other => Err(Error::Invalid(format!("letter {other} is not A or A*"))),
    };
    Ok((
        evaluate_dense(&b_expr(c), dim, &lookup)?,
        evaluate_dense(&bstar_expr(c), dim, &lookup)?,
    ))
}

/// A and A* on every irreducible module type of the instance.
pub struct ModuleKit {
    pub model: ModuleModel,
    pub a: DenseMat,
    pub astar: DenseMat,
}

impl ModuleKit {
    pub fn lookup(&self, l: Letter) -> Result<DenseMat> {
        match l {
            LETTER_A => Ok(self.a.clone()),
            LETTER_A_STAR => Ok(self.astar.clone()),
            other => self.model.letter(other),
        }
    }
}

pub fn module_kits(inp: &LeonardInput, params: InstanceParams) -> Result<Vec<ModuleKit>> {
    enumerate_types(params)
        .into_iter()
        .map(|t| {
            let model = module_model(t, params)?;
            let (a, astar) = build_a_astar_module(inp, &model)?;
            Ok(ModuleKit { model, a, astar })
        })
        .collect()
}

/// Checks identities exactly on every module model; the first failure is
/// reported under `id` with the module type appended to the part label.
pub fn verify_on_modules(id: &str, parts: &[Identity], kits: &[ModuleKit]) -> Result<CheckResult> {
    use crate::algebra::Witness;
    for kit in kits {
        let res = verify_identities_dense(id, parts, kit.model.dim(), &|l| kit.lookup(l))?;
        if let Some(Witness::Entry {
            part,
            row,
            col,
            lhs,
            rhs,
        }) = res.witness
        {
            return Ok(CheckResult::fail(
                id,
                res.mode,
                Witness::Entry {
                    part: format!("{part} on {}", kit.model.ty),
                    row,
                    col,
                    lhs,
                    rhs,
                },
            ));
        }
    }
    Ok(CheckResult::pass(id, crate::algebra::Mode::Dense))
}

/// An alphabet over the instance with A = Ext(0) and A* = Ext(1).
pub fn leonard_alphabet<'a>(inp: &LeonardInput, g: &'a GeneratorSet) -> Result<Alphabet<'a>> {
    let (a, astar) = build_a_astar(inp, g)?;
    Ok(Alphabet::with_ext(
        g,
        vec![ExtLetter::from_matrix(&a)?, ExtLetter::from_matrix(&astar)?],
    ))
}

/// B = 0 and B* = 0 on the standard module.
pub fn verify_b_bstar(
    alpha: &Alphabet,
    c: &TDCoeffs,
    v: &Verification,
) -> Result<[CheckResult; 2]> {
    Ok([
        verify_identities("LEONARD-B", &[Identity::zero("B = 0", b_expr(c))], alpha, v)?,
        verify_identities(
            "LEONARD-BSTAR",
            &[Identity::zero("B* = 0", bstar_expr(c))],
            alpha,
            v,
        )?,
    ])
}

/// B = 0 and B* = 0 on every module model.
pub fn verify_b_bstar_modules(kits: &[ModuleKit], c: &TDCoeffs) -> Result<[CheckResult; 2]> {
    Ok([
        verify_on_modules(
            "LEONARD-B-MODULES",
            &[Identity::zero("B = 0", b_expr(c))],
            kits,
        )?,
        verify_on_modules(
            "LEONARD-BSTAR-MODULES",
            &[Identity::zero("B* = 0", bstar_expr(c))],
            kits,
        )?,
    ])
}

/// The first block F_j B F_i (or F_j B* F_i) that is not zero, searched
/// matrix-free; used to locate why B ≠ 0.
pub fn nonzero_block(
    alpha: &Alphabet,
    c: &TDCoeffs,
    star: bool,
    v: &Verification,
) -> Result<Option<(usize, usize)>> {
    let n = alpha.gens().params().n;
    let body = if star { bstar_expr(c) } else { b_expr(c) };
    for i in 0..=n {
        let parts: Vec<Identity> = (0..=n)
            .map(|j| {
                let lhs = &(&Expr::letter(Letter::F(j)) * &body) * &Expr::letter(Letter::F(i));
                Identity::zero(format!("{j},{i}"), lhs)
            })
            .collect();
        let res = verify_identities("BLOCK-SEARCH", &parts, alpha, v)?;
        use crate::algebra::Witness;
        if let Some(Witness::Vector { part, .. } | Witness::Entry { part, .. }) = res.witness {
            let (j, i) = part.split_once(',').expect("label is j,i");
            return Ok(Some((j.parse().expect("index"), i.parse().expect("index"))));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests;
