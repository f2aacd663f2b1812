use std::fmt;
use std::path::Path;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use super::{td_violation, LeonardInput, TDCoeffs};
use crate::error::{Error, Result};
use crate::exact::QSqrt;
use crate::poset::InstanceParams;
use crate::specdec::{x_coeff, ModuleType};

/// The eight parameter families for which B = B* = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    IPlus,
    IMinus,
    IZero,
    IIPlus,
    IIMinus,
    IIZero,
    IIIPlus,
    IIIMinus,
}

impl CaseTag {
    pub const ALL: [CaseTag; 8] = [
        CaseTag::IPlus,
        CaseTag::IMinus,
        CaseTag::IZero,
        CaseTag::IIPlus,
        CaseTag::IIMinus,
        CaseTag::IIZero,
        CaseTag::IIIPlus,
        CaseTag::IIIMinus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::IPlus => "I+",
            CaseTag::IMinus => "I-",
            CaseTag::IZero => "I0",
            CaseTag::IIPlus => "II+",
            CaseTag::IIMinus => "II-",
            CaseTag::IIZero => "II0",
            CaseTag::IIIPlus => "III+",
            CaseTag::IIIMinus => "III-",
        }
    }

    /// Accepts "I+", "I-" (or a Unicode minus), "I0", and so on.
    pub fn parse(s: &str) -> Result<Self> {
        let norm = s.trim().replace('\u{2212}', "-");
        CaseTag::ALL
            .into_iter()
            .find(|t| t.as_str() == norm)
            .ok_or_else(|| Error::Invalid(format!("unknown case tag {s:?}")))
    }

    /// 1, 2 or 3.
    pub fn family(self) -> u8 {
        match self {
            CaseTag::IPlus | CaseTag::IMinus | CaseTag::IZero => 1,
            CaseTag::IIPlus | CaseTag::IIMinus | CaseTag::IIZero => 2,
            CaseTag::IIIPlus | CaseTag::IIIMinus => 3,
        }
    }

    /// File stem of the bundled fixture.
    pub fn file_stem(self) -> &'static str {
        match self {
            CaseTag::IPlus => "Iplus",
            CaseTag::IMinus => "Iminus",
            CaseTag::IZero => "I0",
            CaseTag::IIPlus => "IIplus",
            CaseTag::IIMinus => "IIminus",
            CaseTag::IIZero => "II0",
            CaseTag::IIIPlus => "IIIplus",
            CaseTag::IIIMinus => "IIIminus",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One family with its constants. Every family is written uniformly as
/// θ_i = a + bQ^i + cQ^{−i}, θ*_i = a* + b*Q^i + c*Q^{−i}, with Q = q⁻¹ for
/// family II and Q = q otherwise; the family's zero constraints pick out the
/// rows of the table.
#[derive(Clone, Debug, PartialEq)]
pub struct CaseSpec {
    pub tag: CaseTag,
    pub a: QSqrt,
    pub b: QSqrt,
    pub c: QSqrt,
    pub a_star: QSqrt,
    pub b_star: QSqrt,
    pub c_star: QSqrt,
    pub x: QSqrt,
}

const FIELDS: [&str; 7] = ["a", "b", "c", "aStar", "bStar", "cStar", "x"];

impl CaseSpec {
    pub fn from_json(v: &Value, q: u32) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Invalid("case spec must be a JSON object".into()))?;
        let tag = match obj.get("tag") {
            Some(Value::String(s)) => CaseTag::parse(s)?,
            _ => return Err(Error::Invalid("field tag: missing or not a string".into())),
        };
        let field = |k: &str| -> Result<QSqrt> {
            let v = obj
                .get(k)
                .ok_or_else(|| Error::Invalid(format!("field {k}: missing")))?;
            QSqrt::from_json(v, q).map_err(|e| Error::Invalid(format!("field {k}: {e}")))
        };
        let spec = CaseSpec {
            tag,
            a: field("a")?,
            b: field("b")?,
            c: field("c")?,
            a_star: field("aStar")?,
            b_star: field("bStar")?,
            c_star: field("cStar")?,
            x: field("x")?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path, q: u32) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let fixture = |msg: String| Error::Fixture {
            path: path.display().to_string(),
            msg,
        };
        let v: Value = serde_json::from_str(&text).map_err(|e| fixture(e.to_string()))?;
        Self::from_json(&v, q).map_err(|e| fixture(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("tag".into(), json!(self.tag.as_str()));
        for (k, v) in FIELDS.iter().zip(self.values()) {
            m.insert((*k).into(), v.to_json_compact());
        }
        Value::Object(m)
    }

    fn values(&self) -> [&QSqrt; 7] {
        [
            &self.a,
            &self.b,
            &self.c,
            &self.a_star,
            &self.b_star,
            &self.c_star,
            &self.x,
        ]
    }

    /// The zero and nonzero constraints of the family.
    pub fn validate(&self) -> Result<()> {
        let nz = |v: &QSqrt| !v.is_zero();
        let (b, c, bs, cs) = (nz(&self.b), nz(&self.c), nz(&self.b_star), nz(&self.c_star));
        let ok = match self.tag {
            CaseTag::IPlus => c && cs && b && !bs,
            CaseTag::IMinus => c && cs && !b && bs,
            CaseTag::IZero => c && cs && !b && !bs,
            CaseTag::IIPlus => b && bs && c && !cs,
            CaseTag::IIMinus => b && bs && !c && cs,
            CaseTag::IIZero => b && bs && !c && !cs,
            CaseTag::IIIPlus => b && !bs && !c && cs && nz(&self.x),
            CaseTag::IIIMinus => !b && bs && c && !cs && nz(&self.x),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "constants violate the constraints of case {}",
                self.tag
            )))
        }
    }

    /// Q with β = Q + Q⁻¹.
    pub fn q_base(&self, q: u32) -> QSqrt {
        if self.tag.family() == 2 {
            QSqrt::frac(1, q as i64)
        } else {
            QSqrt::int(q as i64)
        }
    }

    fn geometric(&self, a: &QSqrt, b: &QSqrt, c: &QSqrt, i: usize, q: u32) -> QSqrt {
        let qb = self.q_base(q);
        let up = qb.pow(i as i64).expect("Q is nonzero");
        let down = qb.pow(-(i as i64)).expect("Q is nonzero");
        a + b * up + c * down
    }

    pub fn theta(&self, i: usize, q: u32) -> QSqrt {
        self.geometric(&self.a, &self.b, &self.c, i, q)
    }

    pub fn theta_star(&self, i: usize, q: u32) -> QSqrt {
        self.geometric(&self.a_star, &self.b_star, &self.c_star, i, q)
    }

    /// ξ_i: x − q^{−1−N−M−i}(q−1)²cc* in family I, the same with bb* in
    /// family II, and x in family III.
    pub fn xi(&self, i: usize, params: InstanceParams) -> QSqrt {
        let q = params.q;
        let prod = match self.tag.family() {
            1 => &self.c * &self.c_star,
            2 => &self.b * &self.b_star,
            _ => return self.x.clone(),
        };
        let k = -1 - params.ambient_dim() as i64 - i as i64;
        &self.x - QSqrt::q_int_power(q, k) * QSqrt::int((q as i64 - 1).pow(2)) * prod
    }

    /// β = Q+Q⁻¹, γ = −Q⁻¹(Q−1)²a, ϱ = Q⁻¹(Q−1)²a² − (Q−Q⁻¹)²bc, and the
    /// starred analogues.
    pub fn coeffs(&self, q: u32) -> TDCoeffs {
        let qb = self.q_base(q);
        let qinv = qb.inverse().expect("Q is nonzero");
        let sq = |v: QSqrt| &v * &v;
        let lin = &qinv * &sq(&qb - &QSqrt::one());
        let cross = sq(&qb - &qinv);
        TDCoeffs {
            beta: &qb + &qinv,
            gamma: -(&lin * &self.a),
            gamma_star: -(&lin * &self.a_star),
            rho: &lin * &sq(self.a.clone()) - &cross * &self.b * &self.c,
            rho_star: &lin * &sq(self.a_star.clone()) - &cross * &self.b_star * &self.c_star,
        }
    }

    /// bc* + cb*.
    pub fn forbidden_sum(&self) -> QSqrt {
        &self.b * &self.c_star + &self.c * &self.b_star
    }
}

/// Expands a case with the gauge α_i = 1, α*_{i+1} = ξ_i.
pub fn case_expand(spec: &CaseSpec, params: InstanceParams) -> Result<(LeonardInput, TDCoeffs)> {
    case_expand_with_gauge(spec, params, &vec![QSqrt::one(); params.n])
}

/// Expands a case with α_i = gauge_i and α*_{i+1} = ξ_i / gauge_i.
pub fn case_expand_with_gauge(
    spec: &CaseSpec,
    params: InstanceParams,
    gauge: &[QSqrt],
) -> Result<(LeonardInput, TDCoeffs)> {
    spec.validate()?;
    let n = params.n;
    if gauge.len() != n {
        return Err(Error::Dimension(format!(
            "gauge has {} entries, need {n}",
            gauge.len()
        )));
    }
    let mut alpha_stars = Vec::with_capacity(n);
    for (i, g) in gauge.iter().enumerate() {
        let xi = spec.xi(i, params);
        if xi.is_zero() {
            return Err(Error::Invalid(format!("ξ_{i} = 0")));
        }
        alpha_stars.push(
            xi.div_exact(g)
                .map_err(|_| Error::Invalid(format!("gauge entry {i} is zero")))?,
        );
    }
    let q = params.q;
    let inp = LeonardInput::new(
        gauge.to_vec(),
        alpha_stars,
        (0..=n).map(|i| spec.theta(i, q)).collect(),
        (0..=n).map(|i| spec.theta_star(i, q)).collect(),
    )?;
    Ok((inp, spec.coeffs(q)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomViolation {
    /// 1..=5 for conditions (i)..(v).
    pub axiom: u8,
    pub index: usize,
    pub detail: String,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "condition {} fails at index {}: {}",
            self.axiom, self.index, self.detail
        )
    }
}

/// (θ_0..θ_d, θ*_0..θ*_d, φ_1..φ_d, ϕ_1..ϕ_d); `varphi[k]` and `phi[k]`
/// hold index k+1.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterArray {
    pub theta: Vec<QSqrt>,
    pub theta_star: Vec<QSqrt>,
    pub varphi: Vec<QSqrt>,
    pub phi: Vec<QSqrt>,
}

impl ParameterArray {
    pub fn diameter(&self) -> usize {
        self.theta.len() - 1
    }

    /// Σ_{h<i} (θ_h − θ_{d−h}) / (θ_0 − θ_d); needs d ≥ 1 and θ_0 ≠ θ_d.
    fn partial_sum(&self, i: usize) -> QSqrt {
        let d = self.diameter();
        let t = &self.theta;
        let den = (&t[0] - &t[d]).inverse().expect("θ_0 ≠ θ_d");
        (0..i).fold(QSqrt::zero(), |acc, h| acc + (&t[h] - &t[d - h]) * &den)
    }

    /// ϕ_i from Definition (iv) given φ_1: φ_1·Σ + (θ*_i − θ*_0)(θ_{d−i+1} − θ_0).
    fn phi_from(theta: &[QSqrt], theta_star: &[QSqrt], varphi1: &QSqrt, i: usize) -> QSqrt {
        let d = theta.len() - 1;
        let den = (&theta[0] - &theta[d]).inverse().expect("θ_0 ≠ θ_d");
        let sum = (0..i).fold(QSqrt::zero(), |acc, h| {
            acc + (&theta[h] - &theta[d - h]) * &den
        });
        varphi1 * sum + (&theta_star[i] - &theta_star[0]) * (&theta[d - i + 1] - &theta[0])
    }

    /// Checks the five defining conditions in order.
    pub fn validate(&self) -> std::result::Result<(), AxiomViolation> {
        let d = self.diameter();
        let bad = |axiom, index, detail: String| {
            Err(AxiomViolation {
                axiom,
                index,
                detail,
            })
        };
        if self.theta_star.len() != d + 1 || self.varphi.len() != d || self.phi.len() != d {
            return bad(0, 0, "sequence lengths disagree".into());
        }
        for (seq, name) in [(&self.theta, "θ"), (&self.theta_star, "θ*")] {
            for i in 0..=d {
                for j in i + 1..=d {
                    if seq[i] == seq[j] {
                        return bad(1, j, format!("{name}_{i} = {name}_{j}"));
                    }
                }
            }
        }
        for i in 1..=d {
            if self.varphi[i - 1].is_zero() {
                return bad(2, i, format!("φ_{i} = 0"));
            }
            if self.phi[i - 1].is_zero() {
                return bad(2, i, format!("ϕ_{i} = 0"));
            }
        }
        let (t, s) = (&self.theta, &self.theta_star);
        for i in 1..=d {
            let sum = self.partial_sum(i);
            let want = &self.phi[0] * &sum + (&s[i] - &s[0]) * (&t[i - 1] - &t[d]);
            if want != self.varphi[i - 1] {
                return bad(
                    3,
                    i,
                    format!("φ_{i} = {} but the sum gives {want}", self.varphi[i - 1]),
                );
            }
            let want = &self.varphi[0] * &sum + (&s[i] - &s[0]) * (&t[d - i + 1] - &t[0]);
            if want != self.phi[i - 1] {
                return bad(
                    4,
                    i,
                    format!("ϕ_{i} = {} but the sum gives {want}", self.phi[i - 1]),
                );
            }
        }
        if d >= 3 {
            let r = |seq: &[QSqrt], i: usize| (&seq[i - 2] - &seq[i + 1]) / (&seq[i - 1] - &seq[i]);
            let first = r(t, 2);
            for i in 2..d {
                if r(t, i) != first || r(s, i) != first {
                    return bad(5, i, format!("ratio at i = {i} differs from {first}"));
                }
            }
        }
        Ok(())
    }

    /// (θ_{i−2} − θ_{i+1})/(θ_{i−1} − θ_i) at i = 2, when d ≥ 3.
    pub fn common_ratio(&self) -> Option<QSqrt> {
        let t = &self.theta;
        (self.diameter() >= 3).then(|| (&t[0] - &t[3]) / (&t[1] - &t[2]))
    }

    pub fn to_json(&self) -> Value {
        let list = |v: &[QSqrt]| v.iter().map(QSqrt::to_json_compact).collect::<Vec<_>>();
        json!({
            "theta": list(&self.theta),
            "thetaStar": list(&self.theta_star),
            "varphi": list(&self.varphi),
            "phi": list(&self.phi),
        })
    }
}

/// ϕ_i from the per-family closed forms, with base = q^{N+M−r−d}(q−1)⁻²x and
/// u_i = (q^i−1)(q^{d−i+1}−1).
pub fn phi_closed_form(spec: &CaseSpec, t: ModuleType, i: usize, params: InstanceParams) -> QSqrt {
    let q = params.q;
    let qi = |k: i64| QSqrt::q_int_power(q, k);
    let (r, d) = (t.r as i64, t.d as i64);
    let i = i as i64;
    let base =
        qi(params.ambient_dim() as i64 - r - d) * QSqrt::frac(1, (q as i64 - 1).pow(2)) * &spec.x;
    let u = (qi(i) - QSqrt::one()) * (qi(d - i + 1) - QSqrt::one());
    let bcs = &spec.b * &spec.c_star;
    let cbs = &spec.c * &spec.b_star;
    let shift = match spec.tag {
        CaseTag::IPlus | CaseTag::IIIPlus => bcs * qi(-i),
        CaseTag::IMinus | CaseTag::IIIMinus => cbs * qi(i - d - 1),
        CaseTag::IIPlus => cbs * qi(-i),
        CaseTag::IIMinus => bcs * qi(i - d - 1),
        CaseTag::IZero | CaseTag::IIZero => QSqrt::zero(),
    };
    (base - shift) * u
}

/// Result of the Leonard pair test on one module type.
#[derive(Clone, Debug, PartialEq)]
pub struct LeonardOutcome {
    pub ty: ModuleType,
    pub pass: bool,
    /// First i in 1..=d with x = q^{r+d−N−M}(q−1)²(bc*+cb*)q^{−i}.
    pub violation: Option<usize>,
    pub array: ParameterArray,
    pub axioms: std::result::Result<(), AxiomViolation>,
    /// First i with ϕ_i = 0.
    pub phi_zero_at: Option<usize>,
    /// First i where ϕ_i disagrees with the family's closed form.
    pub closed_form_mismatch: Option<usize>,
    /// A recurrence relation between the module's eigenvalues and the global
    /// coefficients that fails.
    pub coeff_mismatch: Option<String>,
}

impl LeonardOutcome {
    pub fn to_json(&self) -> Value {
        json!({
            "r": self.ty.r,
            "d": self.ty.d,
            "pass": self.pass,
            "violation": self.violation,
            "phiZeroAt": self.phi_zero_at,
            "axiomViolation": self.axioms.as_ref().err().map(|v| json!({"axiom": v.axiom, "index": v.index, "detail": v.detail})),
            "closedFormMismatch": self.closed_form_mismatch,
            "coeffMismatch": self.coeff_mismatch,
            "parameterArray": self.array.to_json(),
        })
    }
}

/// Whether A, A* act on a module of type t as a Leonard pair.
pub fn leonard_check(
    spec: &CaseSpec,
    t: ModuleType,
    params: InstanceParams,
) -> Result<LeonardOutcome> {
    if !t.is_valid(params) {
        return Err(Error::Invalid(format!(
            "{t} is not a module type for N={}, M={}",
            params.n, params.m
        )));
    }
    let (inp, coeffs) = super::case_expand(spec, params)?;
    let q = params.q;
    let (r, d) = (t.r, t.d);
    let nm = params.ambient_dim() as i64;
    let scale = QSqrt::q_int_power(q, (r + d) as i64 - nm)
        * QSqrt::int((q as i64 - 1).pow(2))
        * spec.forbidden_sum();
    let violation = (1..=d).find(|&i| spec.x == &scale * &QSqrt::q_int_power(q, -(i as i64)));

    let theta = inp.thetas()[r..=r + d].to_vec();
    let theta_star = inp.theta_stars()[r..=r + d].to_vec();
    let varphi = (1..=d)
        .map(|i| Ok(inp.xi((r + i - 1) as i64) * x_coeff(r, d, i, params)?))
        .collect::<Result<Vec<_>>>()?;
    let phi = (1..=d)
        .map(|i| ParameterArray::phi_from(&theta, &theta_star, &varphi[0], i))
        .collect::<Vec<_>>();
    let phi_zero_at = phi.iter().position(Zero::is_zero).map(|k| k + 1);
    let closed_form_mismatch = (1..=d).find(|&i| phi[i - 1] != phi_closed_form(spec, t, i, params));
    let coeff_mismatch = td_violation(&theta, &theta_star, &coeffs)?;
    let array = ParameterArray {
        theta,
        theta_star,
        varphi,
        phi,
    };
    let axioms = array.validate();
    let pass = violation.is_none()
        && axioms.is_ok()
        && closed_form_mismatch.is_none()
        && coeff_mismatch.is_none();
    Ok(LeonardOutcome {
        ty: t,
        pass,
        violation,
        array,
        axioms,
        phi_zero_at,
        closed_form_mismatch,
        coeff_mismatch,
    })
}
