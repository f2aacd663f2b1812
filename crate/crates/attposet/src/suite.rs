//! Suite runner shared by the command line tool and the acceptance harness.
//!
//! A run produces a `Report`: the config echo, one `CheckResult` per check,
//! optional structured sections (grade sizes, spectrum, Leonard arrays) and
//! per-check wall-clock times. Times are the only nondeterministic field and
//! are dropped from the canonical JSON.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::algebra::{
    build_generators, catalog_ids, independence_ids, verify_independence, verify_relation,
    CheckResult, GeneratorSet, Mode, Verification, Witness, DEFAULT_DENSE_CAP,
};
use crate::error::{Error, Result};
use crate::leonard::{
    block_checks, block_tables, case_expand, leonard_alphabet, leonard_check, module_kits,
    standard_params, verify_b_bstar, verify_b_bstar_modules, verify_heart, verify_xi_identities,
    CaseSpec, CaseTag,
};
use crate::poset::{enumerate, load_cache, save_cache, InstanceParams, Poset};
use crate::specdec::{
    build_central, enumerate_types, module_model, spectral_decompose, spectrum_report,
    verify_idempotents, verify_model_relations, verify_phi_omega, verify_uqsl2,
    verify_uqsl2_global, CentralPack,
};

pub const CACHE_ENV: &str = "ATTPOSET_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Poset,
    Relations,
    Spectrum,
    Quantum,
    Leonard,
    All,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Poset => "poset",
            Suite::Relations => "relations",
            Suite::Spectrum => "spectrum",
            Suite::Quantum => "quantum",
            Suite::Leonard => "leonard",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "poset" => Suite::Poset,
            "relations" => Suite::Relations,
            "spectrum" => Suite::Spectrum,
            "quantum" => Suite::Quantum,
            "leonard" => Suite::Leonard,
            "all" => Suite::All,
            other => return Err(Error::Invalid(format!("unknown suite {other}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeChoice {
    Dense,
    MatrixFree,
    /// Dense iff |P| is within the dense cap.
    Auto,
}

impl ModeChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeChoice::Dense => "dense",
            ModeChoice::MatrixFree => "matrix-free",
            ModeChoice::Auto => "auto",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "dense" => ModeChoice::Dense,
            "matrix-free" => ModeChoice::MatrixFree,
            "auto" => ModeChoice::Auto,
            other => return Err(Error::Invalid(format!("unknown mode {other}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: InstanceParams,
    pub suite: Suite,
    pub mode: ModeChoice,
    pub trials: u32,
    pub seed: u64,
    pub dense_cap: usize,
    /// Poset cache file; read if present, written otherwise.
    pub cache: Option<PathBuf>,
    /// Leonard cases to run; empty means the built-in sample for every tag.
    pub cases: Vec<CaseSpec>,
    /// Θ = Φ^a Ω^b in the quantum group checks.
    pub theta_power: (i64, i64),
}

impl RunConfig {
    pub fn new(params: InstanceParams, suite: Suite) -> Self {
        RunConfig {
            params,
            suite,
            mode: ModeChoice::Auto,
            trials: 5,
            seed: 42,
            dense_cap: DEFAULT_DENSE_CAP,
            cache: None,
            cases: Vec::new(),
            theta_power: (0, 0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode != ModeChoice::Dense && self.trials == 0 {
            return Err(Error::Invalid("trials must be at least 1".into()));
        }
        Ok(())
    }

    /// The verification settings for an instance of `size` elements.
    pub fn verification(&self, size: usize) -> Verification {
        let dense = match self.mode {
            ModeChoice::Dense => true,
            ModeChoice::MatrixFree => false,
            ModeChoice::Auto => size <= self.dense_cap,
        };
        let mut v = if dense {
            Verification::dense()
        } else {
            Verification::matrix_free(self.trials, self.seed)
        };
        v.dense_cap = self.dense_cap;
        v
    }

    fn to_json(&self) -> Value {
        let p = self.params;
        json!({
            "q": p.q,
            "N": p.n,
            "M": p.m,
            "suite": self.suite.as_str(),
            "mode": self.mode.as_str(),
            "trials": self.trials,
            "seed": self.seed,
            "denseCap": self.dense_cap,
            "thetaPower": [self.theta_power.0, self.theta_power.1],
            "cases": self.cases.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }
}

const BUILTIN_CASES: [(CaseTag, &str); 8] = [
    (CaseTag::IPlus, include_str!("../../../fixtures/Iplus.json")),
    (
        CaseTag::IMinus,
        include_str!("../../../fixtures/Iminus.json"),
    ),
    (CaseTag::IZero, include_str!("../../../fixtures/I0.json")),
    (
        CaseTag::IIPlus,
        include_str!("../../../fixtures/IIplus.json"),
    ),
    (
        CaseTag::IIMinus,
        include_str!("../../../fixtures/IIminus.json"),
    ),
    (CaseTag::IIZero, include_str!("../../../fixtures/II0.json")),
    (
        CaseTag::IIIPlus,
        include_str!("../../../fixtures/IIIplus.json"),
    ),
    (
        CaseTag::IIIMinus,
        include_str!("../../../fixtures/IIIminus.json"),
    ),
];

/// The sample parameters shipped in `fixtures/`, one per case tag.
pub fn builtin_cases(q: u32) -> Result<Vec<CaseSpec>> {
    BUILTIN_CASES
        .iter()
        .map(|(tag, text)| {
            let v: Value = serde_json::from_str(text).map_err(|e| Error::Fixture {
                path: format!("builtin {tag}"),
                msg: e.to_string(),
            })?;
            CaseSpec::from_json(&v, q)
        })
        .collect()
}

/// Cache file name for an instance inside a cache directory.
pub fn cache_file_name(params: InstanceParams) -> String {
    format!("attposet-q{}-N{}-M{}.json", params.q, params.n, params.m)
}

/// The cache path to use: an explicit path wins, then `ATTPOSET_CACHE_DIR`.
pub fn resolve_cache_path(explicit: Option<&Path>, params: InstanceParams) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    std::env::var_os(CACHE_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(cache_file_name(params)))
}

/// Loads the poset from the cache when one exists for this instance,
/// otherwise enumerates it and writes the cache.
pub fn obtain_poset(params: InstanceParams, cache: Option<&Path>) -> Result<Poset> {
    let Some(path) = cache else {
        return enumerate(params);
    };
    if path.exists() {
        let p = load_cache(path)?;
        if p.params() != params {
            return Err(Error::Cache(format!(
                "{} holds q={}, N={}, M={}",
                path.display(),
                p.params().q,
                p.params().n,
                p.params().m
            )));
        }
        return Ok(p);
    }
    let p = enumerate(params)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    save_cache(&p, path)?;
    Ok(p)
}

#[derive(Clone, Debug, Default)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: Value,
    pub checks: Vec<CheckResult>,
    /// Milliseconds per check, aligned with `checks`.
    pub millis: Vec<f64>,
    pub sections: Map<String, Value>,
}

impl Report {
    fn new(cfg: &RunConfig) -> Self {
        Report {
            config: cfg.to_json(),
            checks: Vec::new(),
            millis: Vec::new(),
            sections: Map::new(),
        }
    }

    fn push(&mut self, res: CheckResult, millis: f64) {
        if self.checks.iter().any(|c| c.id == res.id) {
            return;
        }
        self.checks.push(res);
        self.millis.push(millis);
    }

    fn timed<T>(&mut self, f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
        let start = Instant::now();
        let out = f()?;
        Ok((out, start.elapsed().as_secs_f64() * 1e3))
    }

    fn run_one(&mut self, f: impl FnOnce() -> Result<CheckResult>) -> Result<()> {
        let (res, ms) = self.timed(f)?;
        self.push(res, ms);
        Ok(())
    }

    fn run_many(&mut self, f: impl FnOnce() -> Result<Vec<CheckResult>>) -> Result<()> {
        let (res, ms) = self.timed(f)?;
        let share = ms / res.len().max(1) as f64;
        for r in res {
            self.push(r, share);
        }
        Ok(())
    }

    pub fn summary(&self) -> Summary {
        let skipped = self.checks.iter().filter(|c| c.skipped.is_some()).count();
        let passed = self.checks.iter().filter(|c| c.pass).count() - skipped;
        Summary {
            total: self.checks.len(),
            passed,
            failed: self.checks.len() - passed - skipped,
            skipped,
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self, with_timings: bool) -> Value {
        let s = self.summary();
        let mut v = json!({
            "tool": "attposet",
            "version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "checks": self.checks.iter().map(CheckResult::to_json).collect::<Vec<_>>(),
            "summary": {
                "total": s.total,
                "passed": s.passed,
                "failed": s.failed,
                "skipped": s.skipped,
                "pass": self.pass(),
            },
            "sections": self.sections,
        });
        if with_timings {
            let t: Map<String, Value> = self
                .checks
                .iter()
                .zip(&self.millis)
                .map(|(c, ms)| (c.id.clone(), json!((ms * 1000.0).round() / 1000.0)))
                .collect();
            v["timings_ms"] = Value::Object(t);
        }
        v
    }

    /// The report without timing fields, pretty-printed; identical runs give
    /// identical bytes.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json(false)).expect("report serializes")
    }

    pub fn text_table(&self) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.id.len())
            .max()
            .unwrap_or(2)
            .max(2);
        let mut out = String::new();
        for (c, ms) in self.checks.iter().zip(&self.millis) {
            let status = match (c.pass, &c.skipped) {
                (_, Some(_)) => "SKIP",
                (true, None) => "PASS",
                (false, None) => "FAIL",
            };
            let _ = write!(
                out,
                "{status}  {:<width$}  {:<11}  {:>10.1} ms",
                c.id,
                c.mode.as_str(),
                ms
            );
            if let Some(reason) = &c.skipped {
                let _ = write!(out, "  ({reason})");
            }
            if let Some(w) = &c.witness {
                let _ = write!(out, "  witness: {w}");
            }
            out.push('\n');
        }
        let s = self.summary();
        let _ = writeln!(
            out,
            "{} checks: {} passed, {} failed, {} skipped",
            s.total, s.passed, s.failed, s.skipped
        );
        out
    }
}

/// Lazily built instance data shared between suites.
struct Ctx<'c> {
    cfg: &'c RunConfig,
    poset: Option<Poset>,
    gens: Option<GeneratorSet>,
    pack: Option<Option<CentralPack>>,
}

impl<'c> Ctx<'c> {
    fn poset(&mut self) -> Result<&Poset> {
        if self.poset.is_none() {
            self.poset = Some(obtain_poset(self.cfg.params, self.cfg.cache.as_deref())?);
        }
        Ok(self.poset.as_ref().expect("just set"))
    }

    fn gens(&mut self) -> Result<&GeneratorSet> {
        if self.gens.is_none() {
            let g = build_generators(self.poset()?)?;
            self.gens = Some(g);
        }
        Ok(self.gens.as_ref().expect("just set"))
    }

    fn size(&self) -> usize {
        self.cfg.params.total_size() as usize
    }

    /// The spectral decomposition, or None above the dense cap.
    fn pack(&mut self) -> Result<Option<&CentralPack>> {
        if self.pack.is_none() {
            let pack = if self.size() <= self.cfg.dense_cap {
                let cap = self.cfg.dense_cap;
                let g = self.gens()?;
                Some(spectral_decompose(g, build_central(g)?, cap)?)
            } else {
                None
            };
            self.pack = Some(pack);
        }
        Ok(self.pack.as_ref().expect("just set").as_ref())
    }
}

fn too_large(ctx: &Ctx) -> String {
    format!(
        "|P| = {} exceeds the dense cap {}",
        ctx.size(),
        ctx.cfg.dense_cap
    )
}

fn poset_suite(ctx: &mut Ctx, rep: &mut Report) -> Result<()> {
    let params = ctx.cfg.params;
    let ((sizes, res), ms) = rep.timed(|| {
        let sizes = ctx.poset()?.grade_sizes();
        let expect: Vec<usize> = params.grade_sizes().iter().map(|&s| s as usize).collect();
        let res = if sizes == expect {
            CheckResult::pass("POSET-GRADES", Mode::Exact)
        } else {
            CheckResult::fail(
                "POSET-GRADES",
                Mode::Exact,
                Witness::Message(format!("enumerated {sizes:?}, counted {expect:?}")),
            )
        };
        Ok((sizes, res))
    })?;
    rep.push(res, ms);
    rep.sections.insert(
        "poset".into(),
        json!({"gradeSizes": sizes, "total": sizes.iter().sum::<usize>()}),
    );
    Ok(())
}

fn relations_suite(ctx: &mut Ctx, rep: &mut Report) -> Result<()> {
    let params = ctx.cfg.params;
    let v = ctx.cfg.verification(ctx.size());
    let large = params.n >= 6;
    let cap = ctx.cfg.dense_cap;
    let mode_choice = ctx.cfg.mode;
    let g = ctx.gens()?;
    for &id in catalog_ids() {
        if id == "REL-19" {
            if !large {
                rep.push(CheckResult::skipped(id, "needs N >= 6"), 0.0);
                continue;
            }
            // Every word ends in F0 or F2, so the dense check only touches
            // those columns.
            let v19 = if mode_choice == ModeChoice::MatrixFree {
                v
            } else {
                Verification {
                    dense_cap: cap,
                    ..Verification::dense()
                }
            };
            rep.run_one(|| verify_relation(id, g, &v19))?;
            continue;
        }
        rep.run_one(|| verify_relation(id, g, &v))?;
    }
    for &id in independence_ids() {
        if !large {
            rep.push(CheckResult::skipped(id, "needs N >= 6"), 0.0);
            continue;
        }
        rep.run_one(|| verify_independence(id, g, cap))?;
    }
    Ok(())
}

fn spectrum_suite(ctx: &mut Ctx, rep: &mut Report) -> Result<()> {
    let (pack, ms) = {
        let start = Instant::now();
        let pack = ctx.pack()?.cloned();
        (pack, start.elapsed().as_secs_f64() * 1e3)
    };
    let Some(pack) = pack else {
        let why = too_large(ctx);
        for id in ["SPECTRUM", "CENTRAL-IDEMPOTENTS", "CENTRAL-PHI-OMEGA"] {
            rep.push(CheckResult::skipped(id, why.clone()), 0.0);
        }
        return Ok(());
    };
    let report = spectrum_report(&pack);
    let ok = report["pass"] == json!(true);
    rep.push(
        if ok {
            CheckResult::pass("SPECTRUM", Mode::Exact)
        } else {
            CheckResult::fail(
                "SPECTRUM",
                Mode::Exact,
                Witness::Message(format!("module dimensions sum to {}", report["total_dim"])),
            )
        },
        ms,
    );
    rep.sections.insert("spectrum".into(), report);
    let g = ctx.gens()?;
    rep.run_one(|| verify_idempotents(g, &pack))?;
    rep.run_one(|| verify_phi_omega(&pack))?;
    Ok(())
}

fn quantum_suite(ctx: &mut Ctx, rep: &mut Report) -> Result<()> {
    let params = ctx.cfg.params;
    let theta = ctx.cfg.theta_power;
    for t in enumerate_types(params) {
        rep.run_one(|| verify_uqsl2(t, params, theta))?;
        rep.run_many(|| verify_model_relations(&module_model(t, params)?))?;
    }
    let pack = ctx.pack()?.cloned();
    match pack {
        Some(pack) => {
            let g = ctx.gens()?;
            rep.run_one(|| verify_uqsl2_global(g, &pack, theta))?;
            rep.run_one(|| verify_phi_omega(&pack))?;
        }
        None => {
            let why = too_large(ctx);
            rep.push(CheckResult::skipped("UQSL2-GLOBAL", why.clone()), 0.0);
            rep.push(CheckResult::skipped("CENTRAL-PHI-OMEGA", why), 0.0);
        }
    }
    let v = ctx.cfg.verification(ctx.size());
    let g = ctx.gens()?;
    rep.run_one(|| verify_relation("REL-24", g, &v))?;
    Ok(())
}

fn tagged(mut r: CheckResult, tag: CaseTag) -> CheckResult {
    r.id = format!("{tag} {}", r.id);
    r
}

fn first_failure(id: String, results: Vec<CheckResult>) -> CheckResult {
    match results.into_iter().find(|r| !r.pass) {
        Some(bad) => {
            let w = bad
                .witness
                .map(|w| format!("{}: {w}", bad.id))
                .unwrap_or(bad.id);
            CheckResult::fail(id, Mode::Dense, Witness::Message(w))
        }
        None => CheckResult::pass(id, Mode::Dense),
    }
}

fn leonard_case(ctx: &mut Ctx, rep: &mut Report, spec: &CaseSpec) -> Result<Value> {
    let params = ctx.cfg.params;
    let tag = spec.tag;
    let (inp, c) = case_expand(spec, params)?;
    rep.run_one(|| {
        let direct = standard_params(inp.thetas(), inp.theta_stars())?;
        let id = format!("{tag} COEFFS");
        Ok(if direct != c {
            CheckResult::fail(
                id,
                Mode::Exact,
                Witness::Message("closed-form coefficients disagree".into()),
            )
        } else if c.beta_is_degenerate() {
            CheckResult::fail(
                id,
                Mode::Exact,
                Witness::Message(format!("beta = {}", c.beta)),
            )
        } else {
            CheckResult::pass(id, Mode::Exact)
        })
    })?;
    rep.run_one(|| Ok(tagged(verify_heart(&inp, &c)?, tag)))?;
    rep.run_one(|| Ok(tagged(verify_xi_identities(&inp, &c, params)?, tag)))?;

    let v = ctx.cfg.verification(ctx.size());
    let g = ctx.gens()?;
    rep.run_many(|| {
        let alpha = leonard_alphabet(&inp, g)?;
        Ok(verify_b_bstar(&alpha, &c, &v)?
            .into_iter()
            .map(|r| tagged(r, tag))
            .collect())
    })?;
    let kits = module_kits(&inp, params)?;
    rep.run_many(|| {
        Ok(verify_b_bstar_modules(&kits, &c)?
            .into_iter()
            .map(|r| tagged(r, tag))
            .collect())
    })?;
    rep.run_one(|| {
        let formulas = block_tables(&inp, &c, params, true)?;
        let res = block_checks(&formulas, &c, &kits, None, &Verification::dense())?;
        Ok(first_failure(format!("{tag} BLOCK-TABLES-MODULES"), res))
    })?;

    let mut modules = Vec::new();
    for t in enumerate_types(params) {
        let (out, ms) = rep.timed(|| leonard_check(spec, t, params))?;
        let id = format!("{tag} LEONARD-MODULE{t}");
        let res = if out.pass {
            CheckResult::pass(id, Mode::Exact)
        } else {
            let why = match (&out.violation, &out.axioms) {
                (Some(i), _) => format!("forbidden x at i = {i}"),
                (None, Err(a)) => a.to_string(),
                _ => "closed form or coefficient mismatch".into(),
            };
            CheckResult::fail(id, Mode::Exact, Witness::Message(why))
        };
        rep.push(res, ms);
        modules.push(out.to_json());
    }
    Ok(json!({
        "tag": tag.as_str(),
        "case": spec.to_json(),
        "coeffs": c.to_json(),
        "input": inp.to_json(),
        "modules": modules,
    }))
}

fn leonard_suite(ctx: &mut Ctx, rep: &mut Report) -> Result<()> {
    let params = ctx.cfg.params;
    if params.n < 6 {
        if ctx.cfg.suite == Suite::Leonard {
            params.require_large_n("the leonard suite")?;
        }
        rep.push(CheckResult::skipped("LEONARD", "needs N >= 6"), 0.0);
        return Ok(());
    }
    let cases = if ctx.cfg.cases.is_empty() {
        builtin_cases(params.q)?
    } else {
        ctx.cfg.cases.clone()
    };
    let mut section = Vec::new();
    for spec in &cases {
        section.push(leonard_case(ctx, rep, spec)?);
    }
    rep.sections.insert("leonard".into(), Value::Array(section));
    Ok(())
}

/// Runs the configured suite. Errors are configuration problems; check
/// failures are recorded in the report.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let mut ctx = Ctx {
        cfg,
        poset: None,
        gens: None,
        pack: None,
    };
    let mut rep = Report::new(cfg);
    let suites: &[Suite] = match cfg.suite {
        Suite::All => &[
            Suite::Poset,
            Suite::Relations,
            Suite::Spectrum,
            Suite::Quantum,
            Suite::Leonard,
        ],
        ref s => std::slice::from_ref(s),
    };
    for s in suites {
        match s {
            Suite::Poset => poset_suite(&mut ctx, &mut rep)?,
            Suite::Relations => relations_suite(&mut ctx, &mut rep)?,
            Suite::Spectrum => spectrum_suite(&mut ctx, &mut rep)?,
            Suite::Quantum => quantum_suite(&mut ctx, &mut rep)?,
            Suite::Leonard => leonard_suite(&mut ctx, &mut rep)?,
            Suite::All => unreachable!("expanded above"),
        }
    }
    Ok(rep)
}

/// Ids in the report that came from the relation catalog.
pub fn relation_ids(rep: &Report) -> BTreeSet<&str> {
    rep.checks
        .iter()
        .map(|c| c.id.as_str())
        .filter(|id| catalog_ids().contains(id))
        .collect()
}
