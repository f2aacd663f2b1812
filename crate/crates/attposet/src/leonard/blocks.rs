//! Weighted-sum descriptions of the blocks F_j B F_i and F_j B* F_i.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{
    b_expr, bstar_expr, heart_from_b, heart_from_bstar, heart_zero_series, heartsuit, LeonardInput,
    ModuleKit, TDCoeffs,
};
use crate::algebra::{
    evaluate_dense, verify_identities, Alphabet, CheckResult, Expr, Identity, Letter, Mode,
    Verification, Witness,
};
use crate::error::{Error, Result};
use crate::exact::{DenseMat, QSqrt};
use crate::poset::InstanceParams;

/// One table of block coefficients, indexed by the source grade i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockTable {
    /// F_{i+3} B F_i.
    BRaise3,
    /// F_{i−1} B F_i.
    BLower1,
    /// F_{i+1} B F_i.
    BRaise1,
    /// F_i B F_i.
    BDiag,
    /// F_{i+2} B F_i.
    BRaise2,
    /// F_{i+2} B F_i, simplified under the standard assumption.
    BRaise2Standard,
    /// F_2 B F_0 as a multiple of R²F_0, under the standard assumption.
    BRaise2Base,
    /// F_{i−3} B* F_i.
    BsLower3,
    /// F_{i+1} B* F_i.
    BsRaise1,
    /// F_{i−1} B* F_i.
    BsLower1,
    /// F_i B* F_i.
    BsDiag,
    /// F_{i−2} B* F_i.
    BsLower2,
    /// F_{i−2} B* F_i, simplified under the standard assumption.
    BsLower2Standard,
    /// F_0 B* F_2 as a multiple of L²F_2, under the standard assumption.
    BsLower2Base,
}

impl BlockTable {
    pub const ALL: [BlockTable; 14] = [
        BlockTable::BRaise3,
        BlockTable::BLower1,
        BlockTable::BRaise1,
        BlockTable::BDiag,
        BlockTable::BRaise2,
        BlockTable::BRaise2Standard,
        BlockTable::BRaise2Base,
        BlockTable::BsLower3,
        BlockTable::BsRaise1,
        BlockTable::BsLower1,
        BlockTable::BsDiag,
        BlockTable::BsLower2,
        BlockTable::BsLower2Standard,
        BlockTable::BsLower2Base,
    ];

    pub fn is_star(self) -> bool {
        matches!(
            self,
            BlockTable::BsLower3
                | BlockTable::BsRaise1
                | BlockTable::BsLower1
                | BlockTable::BsDiag
                | BlockTable::BsLower2
                | BlockTable::BsLower2Standard
                | BlockTable::BsLower2Base
        )
    }

    pub fn needs_standard(self) -> bool {
        matches!(
            self,
            BlockTable::BRaise2Standard
                | BlockTable::BRaise2Base
                | BlockTable::BsLower2Standard
                | BlockTable::BsLower2Base
        )
    }

    /// target − source.
    pub fn shift(self) -> i64 {
        match self {
            BlockTable::BRaise3 => 3,
            BlockTable::BLower1 | BlockTable::BsLower1 => -1,
            BlockTable::BRaise1 | BlockTable::BsRaise1 => 1,
            BlockTable::BDiag | BlockTable::BsDiag => 0,
            BlockTable::BRaise2 | BlockTable::BRaise2Standard | BlockTable::BRaise2Base => 2,
            BlockTable::BsLower3 => -3,
            BlockTable::BsLower2 | BlockTable::BsLower2Standard | BlockTable::BsLower2Base => -2,
        }
    }

    /// Source grades for which the table is stated.
    pub fn sources(self, n: usize) -> Vec<usize> {
        let range = |lo: usize, hi: Option<usize>| match hi {
            Some(hi) if lo <= hi => (lo..=hi).collect(),
            _ => Vec::new(),
        };
        match self {
            BlockTable::BRaise3 => range(0, n.checked_sub(3)),
            BlockTable::BLower1 | BlockTable::BsLower1 => range(1, Some(n)),
            BlockTable::BRaise1 | BlockTable::BsRaise1 => range(0, n.checked_sub(1)),
            BlockTable::BDiag | BlockTable::BsDiag => range(0, Some(n)),
            BlockTable::BRaise2 | BlockTable::BRaise2Standard => range(0, n.checked_sub(2)),
            BlockTable::BRaise2Base => range(0, n.checked_sub(2).map(|_| 0)),
            BlockTable::BsLower3 => range(3, Some(n)),
            BlockTable::BsLower2 | BlockTable::BsLower2Standard => range(2, Some(n)),
            BlockTable::BsLower2Base => range(2, (n >= 2).then_some(2)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BlockTable::BRaise3 => "B+3",
            BlockTable::BLower1 => "B-1",
            BlockTable::BRaise1 => "B+1",
            BlockTable::BDiag => "B0",
            BlockTable::BRaise2 => "B+2",
            BlockTable::BRaise2Standard => "B+2std",
            BlockTable::BRaise2Base => "B+2base",
            BlockTable::BsLower3 => "B*-3",
            BlockTable::BsRaise1 => "B*+1",
            BlockTable::BsLower1 => "B*-1",
            BlockTable::BsDiag => "B*0",
            BlockTable::BsLower2 => "B*-2",
            BlockTable::BsLower2Standard => "B*-2std",
            BlockTable::BsLower2Base => "B*-2base",
        }
    }
}

/// F_target X F_source = rhs, with X = B or B* and rhs a combination of
/// words in R, L ending in F_source.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockFormula {
    /// None for the blocks that vanish outright.
    pub table: Option<BlockTable>,
    pub star: bool,
    pub target: usize,
    pub source: usize,
    pub rhs: Expr,
}

impl BlockFormula {
    pub fn label(&self) -> String {
        let name = self
            .table
            .map_or(if self.star { "B*zero" } else { "Bzero" }, BlockTable::name);
        format!(
            "{name} F{} {} F{}",
            self.target,
            if self.star { "B*" } else { "B" },
            self.source
        )
    }

    /// The identity F_target X F_source = rhs.
    pub fn identity(&self, c: &TDCoeffs) -> Identity {
        let body = if self.star { bstar_expr(c) } else { b_expr(c) };
        let lhs = &(&Expr::letter(Letter::F(self.target)) * &body)
            * &Expr::letter(Letter::F(self.source));
        Identity::new(self.label(), lhs, self.rhs.clone())
    }
}

fn term(pattern: &str, i: usize) -> Expr {
    let mut letters: Vec<Letter> = pattern
        .chars()
        .map(|ch| match ch {
            'R' => Letter::R,
            'L' => Letter::L,
            other => unreachable!("pattern letter {other}"),
        })
        .collect();
    letters.push(Letter::F(i));
    Expr::word(&letters)
}

struct Rows {
    source: usize,
    rhs: Expr,
}

impl Rows {
    /// Adds weight·body·pattern unless the weight vanishes, in which case
    /// the body (which may reference indeterminate eigenvalues) is skipped.
    fn add(
        &mut self,
        pattern: &str,
        weight: QSqrt,
        body: impl FnOnce() -> Result<QSqrt>,
    ) -> Result<()> {
        if weight.is_zero() {
            return Ok(());
        }
        let c = weight * body()?;
        self.rhs = &self.rhs + &term(pattern, self.source).scale(&c);
        Ok(())
    }
}

/// The row of `table` at source grade i.
pub fn block_formula(
    table: BlockTable,
    i: usize,
    inp: &LeonardInput,
    c: &TDCoeffs,
    params: InstanceParams,
) -> Result<BlockFormula> {
    let n = inp.n();
    if !table.sources(n).contains(&i) {
        return Err(Error::OutOfRange {
            what: format!("source grade of table {}", table.name()),
            index: i as i64,
        });
    }
    let q = params.q;
    let nm = params.ambient_dim() as i64;
    let k = i as i64;
    let a = |j: i64| inp.alpha(j);
    let s = |j: i64| inp.alpha_star(j);
    let t = |j: i64| inp.theta(j);
    let ts = |j: i64| inp.theta_star(j);
    let xi = |j: i64| inp.xi(j);
    let beta = &c.beta;
    let b1 = beta + &QSqrt::int(1);
    let qf = |u: QSqrt, v: QSqrt, g: &QSqrt, r: &QSqrt| {
        &u * &u - beta * &u * &v + &v * &v - g * (&u + &v) - r
    };
    let q3 = QSqrt::int(q as i64).pow(3)? - QSqrt::int(1);
    let frac = |num: i64| QSqrt::int(num).div_exact(&q3);
    let qi = QSqrt::int(q as i64);
    let (c3, c4) = (
        frac(q as i64 * (q as i64 * q as i64 - 1))?,
        frac(q as i64 * q as i64 * (q as i64 - 1))?,
    );
    let (c5, c6) = (frac(q as i64 - 1)?, frac(q as i64 * q as i64 - 1)?);

    let mut rows = Rows {
        source: i,
        rhs: Expr::zero(),
    };
    match table {
        BlockTable::BRaise3 => rows.add("RRR", a(k) * a(k + 1) * a(k + 2), || {
            Ok(ts(k)? - ts(k + 3)? - &b1 * (ts(k + 1)? - ts(k + 2)?))
        })?,
        BlockTable::BLower1 => rows.add("L", s(k), || {
            Ok((t(k - 1)? - t(k)?) * qf(t(k - 1)?, t(k)?, &c.gamma, &c.rho))
        })?,
        BlockTable::BRaise1 => {
            rows.add("R", a(k), || {
                Ok((ts(k)? - ts(k + 1)?) * qf(t(k)?, t(k + 1)?, &c.gamma, &c.rho))
            })?;
            rows.add("RRL", a(k) * a(k - 1) * s(k), || {
                Ok(t(k - 1)? - beta * t(k)? + t(k + 1)? - &c.gamma)
            })?;
            rows.add("LRR", a(k) * a(k + 1) * s(k + 2), || {
                Ok(-t(k)? + beta * t(k + 1)? - t(k + 2)? + &c.gamma)
            })?;
        }
        BlockTable::BDiag => {
            rows.add("RL", s(k) * a(k - 1), || {
                Ok(qf(t(k - 1)?, t(k)?, &c.gamma, &c.rho))
            })?;
            rows.add("LR", s(k + 1) * a(k), || {
                Ok(-qf(t(k)?, t(k + 1)?, &c.gamma, &c.rho))
            })?;
        }
        BlockTable::BRaise2 => {
            rows.add("RR", a(k) * a(k + 1), || heart_from_b(i, inp, c))?;
            rows.add("RRRL", a(k) * a(k + 1) * a(k - 1) * s(k), || {
                Ok(QSqrt::int(1))
            })?;
            rows.add("RRLR", -(&b1 * a(k) * a(k) * a(k + 1) * s(k + 1)), || {
                Ok(QSqrt::int(1))
            })?;
            rows.add("RLRR", &b1 * a(k) * a(k + 1) * a(k + 1) * s(k + 2), || {
                Ok(QSqrt::int(1))
            })?;
            rows.add("LRRR", -(a(k) * a(k + 1) * a(k + 2) * s(k + 3)), || {
                Ok(QSqrt::int(1))
            })?;
        }
        BlockTable::BRaise2Standard => {
            let w = a(k) * a(k + 1);
            let heart = heartsuit(i, inp.thetas(), inp.theta_stars(), beta)?;
            let lead = QSqrt::q_int_power(q, nm - k - 2)
                * (&qi + &QSqrt::int(1))
                * &b1
                * (xi(k) - xi(k + 1));
            rows.add("RR", -w.clone(), || Ok(lead - heart))?;
            rows.add("RRRL", w.clone(), || {
                Ok(xi(k - 1) - &c3 * &b1 * xi(k) + &c4 * &b1 * xi(k + 1))
            })?;
            rows.add("LRRR", -w, || {
                Ok(&c5 * &b1 * xi(k) - &c6 * &b1 * xi(k + 1) + xi(k + 2))
            })?;
        }
        BlockTable::BRaise2Base => {
            let qm = params.m as i64;
            let heart = heartsuit(0, inp.thetas(), inp.theta_stars(), beta)?;
            let scalar = heart_zero_series(inp, c, params) - QSqrt::q_int_power(q, -qm) * heart;
            rows.add("RR", -(a(0) * a(1) * QSqrt::q_int_power(q, qm)), || {
                Ok(scalar)
            })?;
        }
        BlockTable::BsLower3 => rows.add("LLL", s(k) * s(k - 1) * s(k - 2), || {
            Ok(t(k)? - t(k - 3)? - &b1 * (t(k - 1)? - t(k - 2)?))
        })?,
        BlockTable::BsRaise1 => rows.add("R", a(k), || {
            Ok((ts(k + 1)? - ts(k)?) * qf(ts(k + 1)?, ts(k)?, &c.gamma_star, &c.rho_star))
        })?,
        BlockTable::BsLower1 => {
            rows.add("L", s(k), || {
                Ok((t(k)? - t(k - 1)?) * qf(ts(k)?, ts(k - 1)?, &c.gamma_star, &c.rho_star))
            })?;
            rows.add("LLR", a(k) * s(k + 1) * s(k), || {
                Ok(ts(k - 1)? - beta * ts(k)? + ts(k + 1)? - &c.gamma_star)
            })?;
            rows.add("RLL", s(k) * s(k - 1) * a(k - 2), || {
                Ok(-ts(k)? + beta * ts(k - 1)? - ts(k - 2)? + &c.gamma_star)
            })?;
        }
        BlockTable::BsDiag => {
            rows.add("RL", s(k) * a(k - 1), || {
                Ok(-qf(ts(k - 1)?, ts(k)?, &c.gamma_star, &c.rho_star))
            })?;
            rows.add("LR", s(k + 1) * a(k), || {
                Ok(qf(ts(k)?, ts(k + 1)?, &c.gamma_star, &c.rho_star))
            })?;
        }
        BlockTable::BsLower2 => {
            rows.add("LL", s(k) * s(k - 1), || heart_from_bstar(i, inp, c))?;
            rows.add("LLLR", s(k) * s(k - 1) * s(k + 1) * a(k), || {
                Ok(QSqrt::int(1))
            })?;
            rows.add("LLRL", -(&b1 * s(k) * s(k) * s(k - 1) * a(k - 1)), || {
                Ok(QSqrt::int(1))
            })?;
            rows.add("LRLL", &b1 * s(k) * s(k - 1) * s(k - 1) * a(k - 2), || {
                Ok(QSqrt::int(1))
            })?;
            rows.add("RLLL", -(s(k) * s(k - 1) * s(k - 2) * a(k - 3)), || {
                Ok(QSqrt::int(1))
            })?;
        }
        BlockTable::BsLower2Standard => {
            let w = s(k - 1) * s(k);
            let heart = heartsuit(i - 2, inp.thetas(), inp.theta_stars(), beta)?;
            let lead = QSqrt::q_int_power(q, nm - k)
                * (&qi + &QSqrt::int(1))
                * &b1
                * (xi(k - 1) - xi(k - 2));
            rows.add("LL", -w.clone(), || Ok(lead + heart))?;
            rows.add("RLLL", -w.clone(), || {
                Ok(xi(k - 3) - &c3 * &b1 * xi(k - 2) + &c4 * &b1 * xi(k - 1))
            })?;
            rows.add("LLLR", w, || {
                Ok(&c5 * &b1 * xi(k - 2) - &c6 * &b1 * xi(k - 1) + xi(k))
            })?;
        }
        BlockTable::BsLower2Base => {
            let qm = params.m as i64;
            let heart = heartsuit(0, inp.thetas(), inp.theta_stars(), beta)?;
            let scalar = heart_zero_series(inp, c, params) - QSqrt::q_int_power(q, -qm) * heart;
            rows.add("LL", s(1) * s(2) * QSqrt::q_int_power(q, qm), || Ok(scalar))?;
        }
    }
    Ok(BlockFormula {
        table: Some(table),
        star: table.is_star(),
        target: (k + table.shift()) as usize,
        source: i,
        rhs: rows.rhs,
    })
}

/// A block that vanishes because its grade difference is outside the band:
/// F_j B F_i with j − i ∉ [−1, 3], or F_j B* F_i with j − i ∉ [−3, 1].
pub fn zero_block(star: bool, target: usize, source: usize, n: usize) -> Result<BlockFormula> {
    let diff = target as i64 - source as i64;
    let inside = if star {
        (-3..=1).contains(&diff)
    } else {
        (-1..=3).contains(&diff)
    };
    if target > n || source > n || inside {
        return Err(Error::OutOfRange {
            what: format!("zero block of {}", if star { "B*" } else { "B" }),
            index: diff,
        });
    }
    Ok(BlockFormula {
        table: None,
        star,
        target,
        source,
        rhs: Expr::zero(),
    })
}

/// Every stated row of every table plus every vanishing block. Tables that
/// need the standard assumption are included only when `standard` is set.
pub fn block_tables(
    inp: &LeonardInput,
    c: &TDCoeffs,
    params: InstanceParams,
    standard: bool,
) -> Result<Vec<BlockFormula>> {
    let n = inp.n();
    let mut out = Vec::new();
    for table in BlockTable::ALL {
        if table.needs_standard() && !standard {
            continue;
        }
        for i in table.sources(n) {
            out.push(block_formula(table, i, inp, c, params)?);
        }
    }
    for star in [false, true] {
        for target in 0..=n {
            for source in 0..=n {
                if let Ok(f) = zero_block(star, target, source, n) {
                    out.push(f);
                }
            }
        }
    }
    Ok(out)
}

/// Checks every formula exactly on each module model and, when an alphabet
/// is given, on the standard module in the given mode. Formulas sharing a
/// source are checked together on the standard module so the products with
/// B F_i are computed once.
pub fn block_checks(
    formulas: &[BlockFormula],
    c: &TDCoeffs,
    kits: &[ModuleKit],
    alpha: Option<&Alphabet>,
    v: &Verification,
) -> Result<Vec<CheckResult>> {
    let id = |f: &BlockFormula| format!("BLOCK {}", f.label());
    let mut out: Vec<Option<CheckResult>> = vec![None; formulas.len()];

    let local: Vec<(DenseMat, DenseMat)> = kits
        .iter()
        .map(|k| super::build_b_bstar_dense(&k.a, &k.astar, c))
        .collect::<Result<_>>()?;
    for (slot, f) in out.iter_mut().zip(formulas) {
        for (kit, (b, bs)) in kits.iter().zip(&local) {
            let dim = kit.model.dim();
            let body = if f.star { bs } else { b };
            let lhs = kit
                .model
                .f(f.target)?
                .mul(body)?
                .mul(&kit.model.f(f.source)?)?;
            let rhs = evaluate_dense(&f.rhs, dim, &|l| kit.lookup(l))?;
            if let Some((row, col, _)) = lhs.sub(&rhs)?.first_nonzero() {
                *slot = Some(CheckResult::fail(
                    id(f),
                    Mode::Dense,
                    Witness::Entry {
                        part: format!("{} on {}", f.label(), kit.model.ty),
                        row,
                        col,
                        lhs: lhs.get(row, col).clone(),
                        rhs: rhs.get(row, col).clone(),
                    },
                ));
                break;
            }
        }
    }

    if let Some(alpha) = alpha {
        let mut groups: BTreeMap<(bool, usize), Vec<usize>> = BTreeMap::new();
        for (k, f) in formulas.iter().enumerate() {
            if out[k].is_none() {
                groups.entry((f.star, f.source)).or_default().push(k);
            }
        }
        for members in groups.values() {
            let parts: Vec<Identity> = members.iter().map(|&k| formulas[k].identity(c)).collect();
            let res = verify_identities("BLOCK-GROUP", &parts, alpha, v)?;
            if res.pass {
                for &k in members {
                    out[k] = Some(CheckResult {
                        id: id(&formulas[k]),
                        ..res.clone()
                    });
                }
            } else {
                for (&k, part) in members.iter().zip(&parts) {
                    let single =
                        verify_identities(&id(&formulas[k]), std::slice::from_ref(part), alpha, v)?;
                    out[k] = Some(single);
                }
            }
        }
    }
    Ok(out
        .into_iter()
        .zip(formulas)
        .map(|(r, f)| r.unwrap_or_else(|| CheckResult::pass(id(f), Mode::Dense)))
        .collect())
}
