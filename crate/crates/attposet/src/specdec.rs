//! Irreducible module types, the central elements C₁, C₂, the central
//! idempotents and the quantum group module checks.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebra::{
    central_c1, central_c2, evaluate_sparse, relation, verify_identities_dense, Alphabet,
    CheckResult, GeneratorSet, Letter, Mode, RelationKind, Witness,
};
use crate::error::{Error, Result};
use crate::exact::{dense_kernel_basis, rational_to_string, DenseMat, QSqrt, SparseMat};
use crate::poset::InstanceParams;

/// Endpoint r and diameter d of an irreducible module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModuleType {
    pub r: usize,
    pub d: usize,
}

impl ModuleType {
    pub fn new(r: usize, d: usize) -> Self {
        ModuleType { r, d }
    }

    pub fn dim(&self) -> usize {
        self.d + 1
    }

    pub fn is_valid(&self, params: InstanceParams) -> bool {
        let (n, m) = (params.n as i64, params.m as i64);
        let (r, d) = (self.r as i64, self.d as i64);
        r <= n && d <= n && n - 2 * r <= d && d <= n - r && d <= n + m - 2 * r
    }
}

impl std::fmt::Display for ModuleType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.r, self.d)
    }
}

/// All types, ordered by (r, d).
pub fn enumerate_types(params: InstanceParams) -> Vec<ModuleType> {
    let n = params.n;
    (0..=n)
        .flat_map(|r| (0..=n).map(move |d| ModuleType::new(r, d)))
        .filter(|t| t.is_valid(params))
        .collect()
}

fn qi(q: u32, k: i64) -> QSqrt {
    QSqrt::q_int_power(q, k)
}

/// x_{r+i}(r,d) = q^{N+M−r−d}(q^i−1)(q^{d+1−i}−1)/(q−1)².
pub fn x_coeff(r: usize, d: usize, i: usize, params: InstanceParams) -> Result<QSqrt> {
    if i < 1 || i > d {
        return Err(Error::OutOfRange {
            what: format!("x coefficient index, need 1..={d}"),
            index: i as i64,
        });
    }
    let q = params.q;
    let one = QSqrt::one();
    let num = &(&qi(q, (params.ambient_dim() as i64) - (r + d) as i64)
        * &(&qi(q, i as i64) - &one))
        * &(&qi(q, (d + 1 - i) as i64) - &one);
    let den = QSqrt::int((q as i64 - 1) * (q as i64 - 1));
    num.div_exact(&den)
}

/// c₁(r,d) = (q−1)⁻¹q^{N+M−r}(1+q^{−d−1}).
pub fn c1_value(t: ModuleType, params: InstanceParams) -> QSqrt {
    let q = params.q;
    let nm = params.ambient_dim() as i64;
    let v = &qi(q, nm - t.r as i64) * &(&QSqrt::one() + &qi(q, -(t.d as i64) - 1));
    &v * &QSqrt::frac(1, q as i64 - 1)
}

/// c₂(r,d) = q^{2N+2M−2r−d}.
pub fn c2_value(t: ModuleType, params: InstanceParams) -> QSqrt {
    qi(
        params.q,
        2 * params.ambient_dim() as i64 - 2 * t.r as i64 - t.d as i64,
    )
}

/// The (d+1)-dimensional action of R, L, K on an irreducible module of
/// type (r,d) in the basis w_0..w_d, with w_i in grade r+i.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleModel {
    pub ty: ModuleType,
    pub params: InstanceParams,
    pub rm: DenseMat,
    pub lm: DenseMat,
    pub km: DenseMat,
}

pub fn module_model(t: ModuleType, params: InstanceParams) -> Result<ModuleModel> {
    if !t.is_valid(params) {
        return Err(Error::Invalid(format!(
            "{t} is not a module type for N={}, M={}",
            params.n, params.m
        )));
    }
    let dim = t.dim();
    let mut rm = DenseMat::zeros(dim, dim);
    let mut lm = DenseMat::zeros(dim, dim);
    for i in 0..t.d {
        rm.set(i + 1, i, QSqrt::one());
        lm.set(i, i + 1, x_coeff(t.r, t.d, i + 1, params)?);
    }
    let nm = params.ambient_dim() as i64;
    let km = DenseMat::diagonal(
        (0..dim)
            .map(|i| qi(params.q, nm - (t.r + i) as i64))
            .collect(),
    );
    Ok(ModuleModel {
        ty: t,
        params,
        rm,
        lm,
        km,
    })
}

impl ModuleModel {
    pub fn dim(&self) -> usize {
        self.ty.dim()
    }

    pub fn kinv(&self) -> DenseMat {
        let nm = self.params.ambient_dim() as i64;
        DenseMat::diagonal(
            (0..self.dim())
                .map(|i| qi(self.params.q, (self.ty.r + i) as i64 - nm))
                .collect(),
        )
    }

    /// F_j for a global grade j.
    pub fn f(&self, j: usize) -> Result<DenseMat> {
        if j > self.params.n {
            return Err(Error::OutOfRange {
                what: format!("projection index, N = {}", self.params.n),
                index: j as i64,
            });
        }
        let mut m = DenseMat::zeros(self.dim(), self.dim());
        if j >= self.ty.r && j <= self.ty.r + self.ty.d {
            m.set(j - self.ty.r, j - self.ty.r, QSqrt::one());
        }
        Ok(m)
    }

    /// S on the module, determined by S = RL − LR + (K − q^{N+M}K⁻¹ + (1−q^M)I)/(q−1).
    pub fn s(&self) -> Result<DenseMat> {
        let q = self.params.q;
        let nm = self.params.ambient_dim() as i64;
        let rl = self.rm.mul(&self.lm)?;
        let lr = self.lm.mul(&self.rm)?;
        let diag = self
            .km
            .sub(&self.kinv().scale(&qi(q, nm)))?
            .add(
                &DenseMat::identity(self.dim())
                    .scale(&(&QSqrt::one() - &qi(q, self.params.m as i64))),
            )?
            .scale(&QSqrt::frac(1, q as i64 - 1));
        rl.sub(&lr)?.add(&diag)
    }

    pub fn letter(&self, l: Letter) -> Result<DenseMat> {
        match l {
            Letter::R => Ok(self.rm.clone()),
            Letter::L => Ok(self.lm.clone()),
            Letter::K => Ok(self.km.clone()),
            Letter::KInv => Ok(self.kinv()),
            Letter::S => self.s(),
            Letter::F(j) => self.f(j),
            Letter::Ext(_) => Err(Error::Invalid("module models have no extra letters".into())),
        }
    }
}

/// Catalog relations that make sense on a single module.
pub const MODEL_RELATIONS: [&str; 20] = [
    "REL-01", "REL-02", "REL-03", "REL-04", "REL-05", "REL-06", "REL-07", "REL-08", "REL-09",
    "REL-10", "REL-11", "REL-12", "REL-13", "REL-14", "REL-15", "REL-16", "REL-17", "REL-22",
    "REL-23", "REL-24",
];

/// Evaluates `MODEL_RELATIONS` on the model, plus C₁ = c₁I and C₂ = c₂I.
pub fn verify_model_relations(model: &ModuleModel) -> Result<Vec<CheckResult>> {
    let lookup = |l: Letter| model.letter(l);
    let tag = |id: &str| format!("{id}{}", model.ty);
    let mut out = Vec::new();
    for id in MODEL_RELATIONS {
        if let RelationKind::Identities(parts) = relation(id, model.params)?.kind {
            let mut res = verify_identities_dense(id, &parts, model.dim(), &lookup)?;
            res.id = tag(id);
            out.push(res);
        }
    }
    let scalars = [
        (
            "C1",
            central_c1(model.params.q),
            c1_value(model.ty, model.params),
        ),
        (
            "C2",
            central_c2(model.params.q),
            c2_value(model.ty, model.params),
        ),
    ];
    let parts: Vec<_> = scalars
        .into_iter()
        .map(|(name, e, c)| {
            crate::algebra::Identity::new(
                format!("{name} is scalar"),
                e,
                crate::algebra::Expr::scalar(c),
            )
        })
        .collect();
    let mut res = verify_identities_dense("CENTRAL-SCALARS", &parts, model.dim(), &lookup)?;
    res.id = tag("CENTRAL-SCALARS");
    out.push(res);
    Ok(out)
}

/// C₁, C₂ and, after `spectral_decompose`, the central idempotents.
#[derive(Clone, Debug)]
pub struct CentralPack {
    pub params: InstanceParams,
    pub c1: SparseMat,
    pub c2: SparseMat,
    /// (type, c₁, c₂) for every type.
    pub predicted: Vec<(ModuleType, QSqrt, QSqrt)>,
    pub multiplicities: BTreeMap<ModuleType, usize>,
    pub projections: BTreeMap<ModuleType, SparseMat>,
    pub phi: Option<SparseMat>,
    pub omega: Option<SparseMat>,
}

pub fn build_central(g: &GeneratorSet) -> Result<CentralPack> {
    let params = g.params();
    let alpha = Alphabet::new(g);
    let c1 = evaluate_sparse(&central_c1(params.q), &alpha)?;
    let c2 = evaluate_sparse(&central_c2(params.q), &alpha)?;
    let predicted = enumerate_types(params)
        .into_iter()
        .map(|t| (t, c1_value(t, params), c2_value(t, params)))
        .collect();
    Ok(CentralPack {
        params,
        c1,
        c2,
        predicted,
        multiplicities: BTreeMap::new(),
        projections: BTreeMap::new(),
        phi: None,
        omega: None,
    })
}

fn grade_block(m: &SparseMat, g: &GeneratorSet, i: usize) -> DenseMat {
    let range = g.grade_range(i);
    DenseMat::from_sparse(&m.block(range.clone(), range))
}

/// Orthogonal projection onto the column span of `basis` (columns).
fn projection(basis: &[Vec<QSqrt>], n: usize) -> Result<DenseMat> {
    let v = DenseMat::from_columns(basis, n)?;
    let vt = v.transpose();
    let gram_inv = vt.mul(&v)?.inverse()?;
    v.mul(&gram_inv)?.mul(&vt)
}

/// Computes joint (C₁, C₂) eigenspaces grade by grade, the multiplicities
/// and the central idempotents e_λ, and assembles Φ = Σ q^r e_λ and
/// Ω = Σ q^{d/2} e_λ.
pub fn spectral_decompose(
    g: &GeneratorSet,
    mut pack: CentralPack,
    dense_cap: usize,
) -> Result<CentralPack> {
    if g.len() > dense_cap {
        return Err(Error::DenseCap {
            size: g.len(),
            cap: dense_cap,
        });
    }
    let params = g.params();
    for (a, (ta, c1a, c2a)) in pack.predicted.iter().enumerate() {
        for (tb, c1b, c2b) in &pack.predicted[a + 1..] {
            if c1a == c1b && c2a == c2b {
                return Err(Error::Spectral(format!(
                    "types {ta} and {tb} share central character"
                )));
            }
        }
    }
    for m in [&pack.c1, &pack.c2] {
        if m.iter().any(|(r, c, _)| g.grade_of(r) != g.grade_of(c)) {
            return Err(Error::Spectral("central element mixes grades".into()));
        }
    }
    let n = g.len();
    let mut dims: BTreeMap<ModuleType, Vec<usize>> = BTreeMap::new();
    let mut triplets: BTreeMap<ModuleType, Vec<(usize, usize, QSqrt)>> = BTreeMap::new();
    for i in 0..=params.n {
        let size = g.grade_size(i);
        let offset = g.grade_range(i).start;
        let b1 = grade_block(&pack.c1, g, i);
        let b2 = grade_block(&pack.c2, g, i);
        let mut found = 0;
        for (t, c1, c2) in pack
            .predicted
            .iter()
            .filter(|(t, _, _)| t.r <= i && i <= t.r + t.d)
        {
            let eye = DenseMat::identity(size);
            let stacked = b1.sub(&eye.scale(c1))?.stack(&b2.sub(&eye.scale(c2))?)?;
            let basis = dense_kernel_basis(&stacked);
            found += basis.len();
            dims.entry(*t).or_default().push(basis.len());
            if basis.is_empty() {
                continue;
            }
            let p = projection(&basis, size)?;
            let entries = triplets.entry(*t).or_default();
            for r in 0..size {
                for c in 0..size {
                    let v = p.get(r, c);
                    if !v.is_zero() {
                        entries.push((offset + r, offset + c, v.clone()));
                    }
                }
            }
        }
        if found != size {
            return Err(Error::Spectral(format!(
                "grade {i}: predicted eigenspaces have total dimension {found}, grade has {size}"
            )));
        }
    }
    let mut multiplicities = BTreeMap::new();
    let mut projections = BTreeMap::new();
    for (t, ds) in dims {
        if ds.iter().any(|&x| x != ds[0]) {
            return Err(Error::Spectral(format!(
                "type {t}: eigenspace dimensions {ds:?} differ across grades"
            )));
        }
        let total: usize = ds.iter().sum();
        if !total.is_multiple_of(t.dim()) {
            return Err(Error::Spectral(format!(
                "type {t}: dimension {total} not divisible by {}",
                t.dim()
            )));
        }
        multiplicities.insert(t, total / t.dim());
        if ds[0] > 0 {
            projections.insert(
                t,
                SparseMat::from_triplets(n, n, triplets.remove(&t).unwrap_or_default())?,
            );
        }
    }
    let combine = |f: &dyn Fn(ModuleType) -> QSqrt| -> Result<SparseMat> {
        projections
            .iter()
            .try_fold(SparseMat::zeros(n, n), |acc, (t, e)| {
                acc.add(&e.scale(&f(*t)))
            })
    };
    let q = params.q;
    pack.phi = Some(combine(&|t| qi(q, t.r as i64))?);
    pack.omega = Some(combine(&|t| QSqrt::q_power(q, t.d as i64))?);
    pack.multiplicities = multiplicities;
    pack.projections = projections;
    Ok(pack)
}

/// Σ_λ f(λ) e_λ.
fn central_function(pack: &CentralPack, f: &dyn Fn(ModuleType) -> QSqrt) -> Result<SparseMat> {
    let n = pack.c1.nrows();
    if pack.projections.is_empty() {
        return Err(Error::Spectral("projections have not been computed".into()));
    }
    pack.projections
        .iter()
        .try_fold(SparseMat::zeros(n, n), |acc, (t, e)| {
            acc.add(&e.scale(&f(*t)))
        })
}

fn compare(label: &str, lhs: &SparseMat, rhs: &SparseMat) -> Result<Option<Witness>> {
    Ok(lhs
        .sub(rhs)?
        .first_nonzero()
        .map(|(row, col, _)| Witness::Entry {
            part: label.to_string(),
            row,
            col,
            lhs: lhs.get(row, col),
            rhs: rhs.get(row, col),
        }))
}

fn first_failure(id: &str, checks: Vec<(String, SparseMat, SparseMat)>) -> Result<CheckResult> {
    for (label, lhs, rhs) in checks {
        if let Some(w) = compare(&label, &lhs, &rhs)? {
            return Ok(CheckResult::fail(id, Mode::Dense, w));
        }
    }
    Ok(CheckResult::pass(id, Mode::Dense))
}

/// The idempotents are central, orthogonal, sum to I and carry the predicted
/// central characters.
pub fn verify_idempotents(g: &GeneratorSet, pack: &CentralPack) -> Result<CheckResult> {
    let n = g.len();
    let eye = SparseMat::identity(n);
    let mut checks = vec![(
        "sum of idempotents".to_string(),
        central_function(pack, &|_| QSqrt::one())?,
        eye,
    )];
    let gens = [
        ("R", g.r().to_qsqrt()),
        ("L", g.l().to_qsqrt()),
        ("K", g.k().to_qsqrt()),
    ];
    let chars: BTreeMap<ModuleType, (QSqrt, QSqrt)> = pack
        .predicted
        .iter()
        .map(|(t, a, b)| (*t, (a.clone(), b.clone())))
        .collect();
    for (t, e) in &pack.projections {
        for (u, f) in &pack.projections {
            let rhs = if t == u {
                e.clone()
            } else {
                SparseMat::zeros(n, n)
            };
            checks.push((format!("e{t} e{u}"), e.mul(f)?, rhs));
        }
        for (name, x) in &gens {
            checks.push((format!("[e{t}, {name}]"), e.mul(x)?, x.mul(e)?));
        }
        let (c1, c2) = &chars[t];
        checks.push((format!("C1 e{t}"), pack.c1.mul(e)?, e.scale(c1)));
        checks.push((format!("C2 e{t}"), pack.c2.mul(e)?, e.scale(c2)));
    }
    first_failure("CENTRAL-IDEMPOTENTS", checks)
}

/// C₁ = q^{N+M−1}Φ⁻¹Ω⁻¹(τΩ + τ⁻¹Ω⁻¹)/(τ−τ⁻¹) and C₂ = q^{2N+2M}Φ⁻²Ω⁻²,
/// with Φ⁻¹ and Ω⁻¹ checked as inverses.
pub fn verify_phi_omega(pack: &CentralPack) -> Result<CheckResult> {
    let q = pack.params.q;
    let nm = pack.params.ambient_dim() as i64;
    let n = pack.c1.nrows();
    let (phi, omega) = match (&pack.phi, &pack.omega) {
        (Some(p), Some(o)) => (p, o),
        _ => return Err(Error::Spectral("projections have not been computed".into())),
    };
    let phi_inv = central_function(pack, &|t| qi(q, -(t.r as i64)))?;
    let omega_inv = central_function(pack, &|t| QSqrt::q_power(q, -(t.d as i64)))?;
    let tau = QSqrt::sqrt_q(q);
    let tau_inv = tau.inverse()?;
    let eye = SparseMat::identity(n);
    let po_inv = phi_inv.mul(&omega_inv)?;
    let inner = omega.scale(&tau).add(&omega_inv.scale(&tau_inv))?;
    let c1_rhs = po_inv
        .mul(&inner)?
        .scale(&qi(q, nm - 1))
        .scale(&(&tau - &tau_inv).inverse()?);
    let c2_rhs = po_inv.mul(&po_inv)?.scale(&qi(q, 2 * nm));
    first_failure(
        "CENTRAL-PHI-OMEGA",
        vec![
            ("Phi Phi^-1".into(), phi.mul(&phi_inv)?, eye.clone()),
            ("Omega Omega^-1".into(), omega.mul(&omega_inv)?, eye),
            ("C1 in Phi, Omega".into(), pack.c1.clone(), c1_rhs),
            ("C2 in Phi, Omega".into(), pack.c2.clone(), c2_rhs),
        ],
    )
}

/// The four Chevalley relations for given e, f, k, k⁻¹ as dense matrices.
fn chevalley_dense(
    id: &str,
    q: u32,
    e: &DenseMat,
    f: &DenseMat,
    k: &DenseMat,
    kinv: &DenseMat,
) -> Result<CheckResult> {
    let tau = QSqrt::sqrt_q(q);
    let tau_inv = tau.inverse()?;
    let tau2 = &tau * &tau;
    let tau_m2 = &tau_inv * &tau_inv;
    let eye = DenseMat::identity(e.nrows());
    let checks = [
        ("k k^-1 = 1", k.mul(kinv)?, eye.clone()),
        ("k^-1 k = 1", kinv.mul(k)?, eye),
        ("k e = tau^2 e k", k.mul(e)?, e.mul(k)?.scale(&tau2)),
        ("k f = tau^-2 f k", k.mul(f)?, f.mul(k)?.scale(&tau_m2)),
        (
            "ef - fe = (k - k^-1)/(tau - tau^-1)",
            e.mul(f)?.sub(&f.mul(e)?)?,
            k.sub(kinv)?.scale(&(&tau - &tau_inv).inverse()?),
        ),
    ];
    for (label, lhs, rhs) in checks {
        if let Some((row, col, _)) = lhs.sub(&rhs)?.first_nonzero() {
            return Ok(CheckResult::fail(
                id,
                Mode::Dense,
                Witness::Entry {
                    part: label.into(),
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

/// The quantum group action on one module with Φ = q^r, Ω = q^{d/2} and
/// Θ = Φ^a Ω^b.
pub fn verify_uqsl2(
    t: ModuleType,
    params: InstanceParams,
    theta_power: (i64, i64),
) -> Result<CheckResult> {
    let model = module_model(t, params)?;
    let q = params.q;
    let nm = params.ambient_dim() as i64;
    let (a, b) = theta_power;
    let r = t.r as i64;
    let d = t.d as i64;
    // Exponents of q^{1/2}.
    let theta = 2 * r * a + d * b;
    let phi_omega = 2 * r + d;
    let e = model.lm.scale(&QSqrt::q_power(q, theta));
    let f = model
        .rm
        .scale(&QSqrt::q_power(q, -2 * nm + 1 - theta + phi_omega));
    let k = model.km.scale(&QSqrt::q_power(q, -2 * nm + phi_omega));
    let kinv = model.kinv().scale(&QSqrt::q_power(q, 2 * nm - phi_omega));
    chevalley_dense(&format!("UQSL2{t}"), q, &e, &f, &k, &kinv)
}

/// The same action on the whole standard module, with Θ = Φ^a Ω^b.
pub fn verify_uqsl2_global(
    g: &GeneratorSet,
    pack: &CentralPack,
    theta_power: (i64, i64),
) -> Result<CheckResult> {
    let q = pack.params.q;
    let nm = pack.params.ambient_dim() as i64;
    let (a, b) = theta_power;
    let scalar = |t: ModuleType, sign: i64| {
        let theta = 2 * t.r as i64 * a + t.d as i64 * b;
        QSqrt::q_power(q, sign * theta)
    };
    let theta = central_function(pack, &|t| scalar(t, 1))?;
    // q^{−N−M+1/2}Θ⁻¹ΦΩ and q^{−N−M}ΦΩ as central functions.
    let f_coeff = central_function(pack, &|t| {
        &scalar(t, -1) * &QSqrt::q_power(q, -2 * nm + 1 + 2 * t.r as i64 + t.d as i64)
    })?;
    let k_coeff = central_function(pack, &|t| {
        QSqrt::q_power(q, -2 * nm + 2 * t.r as i64 + t.d as i64)
    })?;
    let kinv_coeff = central_function(pack, &|t| {
        QSqrt::q_power(q, 2 * nm - 2 * t.r as i64 - t.d as i64)
    })?;
    let e = theta.mul(&g.l().to_qsqrt())?;
    let f = f_coeff.mul(&g.r().to_qsqrt())?;
    let k = k_coeff.mul(&g.k().to_qsqrt())?;
    let kinv = kinv_coeff.mul(&g.kinv())?;
    let res = chevalley_dense(
        "UQSL2-GLOBAL",
        q,
        &DenseMat::from_sparse(&e),
        &DenseMat::from_sparse(&f),
        &DenseMat::from_sparse(&k),
        &DenseMat::from_sparse(&kinv),
    )?;
    Ok(res)
}

fn scalar_json(v: &QSqrt) -> Value {
    if v.is_rational() {
        json!(rational_to_string(v.a()))
    } else {
        v.to_json()
    }
}

/// The spectrum report: per type its central character and multiplicity.
pub fn spectrum_report(pack: &CentralPack) -> Value {
    let types: Vec<Value> = pack
        .predicted
        .iter()
        .map(|(t, c1, c2)| {
            json!({
                "r": t.r,
                "d": t.d,
                "c1": scalar_json(c1),
                "c2": scalar_json(c2),
                "multiplicity": pack.multiplicities.get(t).copied().unwrap_or(0),
            })
        })
        .collect();
    let total: usize = pack.multiplicities.iter().map(|(t, m)| m * t.dim()).sum();
    let p = pack.params;
    json!({
        "instance": {"q": p.q, "N": p.n, "M": p.m},
        "types": types,
        "total_dim": total,
        "pass": total == pack.c1.nrows(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_generators;
    use crate::exact::rat;
    use crate::poset::enumerate;
    use proptest::prelude::*;

    fn params(q: u32, n: usize, m: usize) -> InstanceParams {
        InstanceParams::new(q, n, m).unwrap()
    }

    fn t(r: usize, d: usize) -> ModuleType {
        ModuleType::new(r, d)
    }

    #[test]
    fn type_examples() {
        assert_eq!(
            enumerate_types(params(2, 3, 1)),
            vec![t(0, 3), t(1, 1), t(1, 2), t(2, 0)]
        );
        assert_eq!(enumerate_types(params(2, 1, 1)), vec![t(0, 1), t(1, 0)]);
    }

    /// Direct formula for x, written independently with integer powers.
    fn x_oracle(q: i64, n: usize, m: usize, r: usize, d: usize, i: usize) -> QSqrt {
        let e = (n + m) as i64 - (r + d) as i64;
        let num = (q.pow(i as u32) - 1) * (q.pow((d + 1 - i) as u32) - 1);
        let den = (q - 1) * (q - 1);
        let p = if e >= 0 {
            QSqrt::int(q.pow(e as u32))
        } else {
            QSqrt::frac(1, q.pow((-e) as u32))
        };
        &p * &QSqrt::frac(num, den)
    }

    #[test]
    fn x_coefficients() {
        let p = params(2, 3, 1);
        let xs: Vec<QSqrt> = (1..=3).map(|i| x_coeff(0, 3, i, p).unwrap()).collect();
        assert_eq!(xs, vec![QSqrt::int(14), QSqrt::int(18), QSqrt::int(14)]);
        assert_eq!(
            x_coeff(1, 1, 1, p).unwrap(),
            QSqrt::int(2i64.pow(4 - 1 - 1))
        );
        assert!(x_coeff(0, 3, 0, p).is_err());
        assert!(x_coeff(0, 3, 4, p).is_err());
    }

    #[test]
    fn central_values() {
        let p = params(2, 3, 1);
        assert_eq!(c1_value(t(0, 3), p), QSqrt::int(17));
        let c2: Vec<QSqrt> = [t(0, 3), t(1, 1), t(1, 2), t(2, 0)]
            .iter()
            .map(|&x| c2_value(x, p))
            .collect();
        assert_eq!(
            c2,
            vec![
                QSqrt::int(32),
                QSqrt::int(32),
                QSqrt::int(16),
                QSqrt::int(16)
            ]
        );
        let c1: Vec<QSqrt> = [t(1, 1), t(1, 2), t(2, 0)]
            .iter()
            .map(|&x| c1_value(x, p))
            .collect();
        assert_eq!(c1, vec![QSqrt::int(10), QSqrt::int(9), QSqrt::int(6)]);
    }

    #[test]
    fn small_models() {
        let p = params(2, 3, 1);
        let m = module_model(t(2, 0), p).unwrap();
        assert_eq!(m.km, DenseMat::diagonal(vec![QSqrt::int(4)]));
        assert!(m.rm.is_zero() && m.lm.is_zero());
        let m = module_model(t(0, 3), p).unwrap();
        let sup: Vec<QSqrt> = (0..3).map(|i| m.lm.get(i, i + 1).clone()).collect();
        assert_eq!(sup, vec![QSqrt::int(14), QSqrt::int(18), QSqrt::int(14)]);
        assert!(module_model(t(3, 3), p).is_err());
    }

    #[test]
    fn models_satisfy_catalog() {
        for p in [params(2, 3, 1), params(3, 3, 2), params(2, 6, 1)] {
            for ty in enumerate_types(p) {
                for res in verify_model_relations(&module_model(ty, p).unwrap()).unwrap() {
                    assert!(res.pass, "{}: {:?}", res.id, res.witness);
                }
            }
        }
    }

    #[test]
    fn perturbed_model_fails() {
        let p = params(2, 3, 1);
        let mut m = module_model(t(0, 3), p).unwrap();
        m.lm.set(0, 1, QSqrt::int(15));
        let results = verify_model_relations(&m).unwrap();
        assert!(results.iter().any(|r| !r.pass));
    }

    /// Multiplicities from graded dimensions: dim P_i = Σ_{λ ∋ i} m_λ, solved
    /// as a square system when the types and grades match up.
    fn counting_oracle(p: InstanceParams) -> BTreeMap<ModuleType, usize> {
        let types = enumerate_types(p);
        assert_eq!(types.len(), p.n + 1, "counting system is square only here");
        let rows: Vec<Vec<QSqrt>> = (0..=p.n)
            .map(|i| {
                types
                    .iter()
                    .map(|ty| QSqrt::int((ty.r <= i && i <= ty.r + ty.d) as i64))
                    .collect()
            })
            .collect();
        let a = DenseMat::from_rows(rows).unwrap();
        let inv = a.inverse().unwrap();
        let sizes: Vec<QSqrt> = p
            .grade_sizes()
            .iter()
            .map(|&s| QSqrt::int(s as i64))
            .collect();
        let sol = inv.apply(&sizes).unwrap();
        types
            .iter()
            .zip(sol)
            .map(|(ty, v)| {
                assert!(v.is_rational() && v.a().is_integer());
                (*ty, v.a().to_integer().try_into().unwrap())
            })
            .collect()
    }

    #[test]
    fn decomposition_at_2_3_1() {
        let p = params(2, 3, 1);
        let g = build_generators(&enumerate(p).unwrap()).unwrap();
        let pack = spectral_decompose(&g, build_central(&g).unwrap(), 3000).unwrap();
        let expect: BTreeMap<ModuleType, usize> =
            [(t(0, 3), 1), (t(1, 1), 6), (t(1, 2), 7), (t(2, 0), 14)].into();
        assert_eq!(pack.multiplicities, expect);
        assert_eq!(pack.multiplicities, counting_oracle(p));
        assert!(verify_idempotents(&g, &pack).unwrap().pass);
        assert!(verify_phi_omega(&pack).unwrap().pass);
        assert!(verify_uqsl2_global(&g, &pack, (0, 0)).unwrap().pass);
        assert!(verify_uqsl2_global(&g, &pack, (1, -1)).unwrap().pass);
        let rep = spectrum_report(&pack);
        assert_eq!(rep["total_dim"], json!(51));
        assert_eq!(
            rep["types"][0],
            json!({"r":0,"d":3,"c1":"17/1","c2":"32/1","multiplicity":1})
        );
    }

    #[test]
    fn decomposition_at_3_3_1_matches_counting() {
        let p = params(3, 3, 1);
        let g = build_generators(&enumerate(p).unwrap()).unwrap();
        let pack = spectral_decompose(&g, build_central(&g).unwrap(), 3000).unwrap();
        assert_eq!(pack.multiplicities, counting_oracle(p));
    }

    #[test]
    fn dense_cap_is_respected() {
        let g = build_generators(&enumerate(params(2, 3, 1)).unwrap()).unwrap();
        let pack = build_central(&g).unwrap();
        assert!(matches!(
            spectral_decompose(&g, pack, 50),
            Err(Error::DenseCap { .. })
        ));
    }

    #[test]
    fn module_chevalley_relations() {
        for p in [params(2, 3, 1), params(2, 6, 1)] {
            for ty in enumerate_types(p) {
                for theta in [(0, 0), (2, -1)] {
                    assert!(verify_uqsl2(ty, p, theta).unwrap().pass, "{ty}");
                }
            }
        }
    }

    #[test]
    fn phi_omega_scalar_example() {
        // 8 · 2^{−3/2} · (17/4) · 2^{1/2} = 17 for type (0,3) at (2,3,1).
        let q = 2;
        let v = &(&(&QSqrt::int(8) * &QSqrt::q_power(q, -3)) * &QSqrt::rational(rat(17, 4)))
            * &QSqrt::q_power(q, 1);
        assert_eq!(v, c1_value(t(0, 3), params(2, 3, 1)));
    }

    proptest! {
        #[test]
        fn types_obey_bounds_and_characters_separate(n in 1usize..8, m in 1usize..5, q in prop::sample::select(vec![2u32, 3, 5])) {
            let p = params(q, n, m);
            let types = enumerate_types(p);
            prop_assert!(types.contains(&t(0, n)));
            for ty in &types {
                prop_assert!(ty.is_valid(p));
                for i in 1..=ty.d {
                    let x = x_coeff(ty.r, ty.d, i, p).unwrap();
                    prop_assert!(!x.is_zero());
                    prop_assert_eq!(x, x_oracle(q as i64, n, m, ty.r, ty.d, i));
                }
            }
            for (a, ta) in types.iter().enumerate() {
                for tb in &types[a + 1..] {
                    prop_assert!(c1_value(*ta, p) != c1_value(*tb, p) || c2_value(*ta, p) != c2_value(*tb, p));
                }
            }
        }
    }
}
