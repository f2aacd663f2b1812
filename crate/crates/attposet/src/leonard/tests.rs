use std::path::PathBuf;

use proptest::prelude::*;

use super::*;
use crate::algebra::{build_generators, Mode};
use crate::poset::enumerate;
use crate::specdec::{x_coeff, ModuleType};

fn p(q: u32, n: usize, m: usize) -> InstanceParams {
    InstanceParams::new(q, n, m).unwrap()
}

fn ints(v: &[i64]) -> Vec<QSqrt> {
    v.iter().map(|&x| QSqrt::int(x)).collect()
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(tag: CaseTag) -> CaseSpec {
    CaseSpec::load(&fixture_dir().join(format!("{}.json", tag.file_stem())), 2).unwrap()
}

fn geometric(a: i64, b: i64, c: i64, base: i64, len: usize) -> Vec<QSqrt> {
    let qb = QSqrt::int(base);
    (0..len)
        .map(|i| {
            QSqrt::int(a)
                + QSqrt::int(b) * qb.pow(i as i64).unwrap()
                + QSqrt::int(c) * qb.pow(-(i as i64)).unwrap()
        })
        .collect()
}

#[test]
fn input_invariants() {
    assert!(LeonardInput::new(
        ints(&[0, 1]),
        ints(&[1, 1]),
        ints(&[0, 1, 2]),
        ints(&[0, 1, 2])
    )
    .is_err());
    assert!(LeonardInput::new(
        ints(&[1, 1]),
        ints(&[1, 0]),
        ints(&[0, 1, 2]),
        ints(&[0, 1, 2])
    )
    .is_err());
    assert!(LeonardInput::new(
        ints(&[1, 1]),
        ints(&[1, 1]),
        ints(&[0, 1, 0]),
        ints(&[0, 1, 2])
    )
    .is_err());
    assert!(LeonardInput::new(
        ints(&[1]),
        ints(&[1, 1]),
        ints(&[0, 1, 2]),
        ints(&[0, 1, 2])
    )
    .is_err());
    let inp = LeonardInput::new(
        ints(&[2, 3]),
        ints(&[5, 7]),
        ints(&[0, 1, 2]),
        ints(&[4, 5, 6]),
    )
    .unwrap();
    assert_eq!(inp.alpha(-1), QSqrt::int(0));
    assert_eq!(inp.alpha(2), QSqrt::int(0));
    assert_eq!(inp.alpha_star(0), QSqrt::int(0));
    assert_eq!(inp.alpha_star(3), QSqrt::int(0));
    assert_eq!(inp.xi(0), QSqrt::int(10));
    assert_eq!(inp.xi(1), QSqrt::int(21));
    assert!(inp.theta(3).is_err());
    assert!(inp.theta(-1).is_err());
}

#[test]
fn a_matrix_on_the_standard_module() {
    let g = build_generators(&enumerate(p(2, 3, 1)).unwrap()).unwrap();
    let inp = LeonardInput::new(
        ints(&[1, 1, 1]),
        ints(&[1, 1, 1]),
        ints(&[0, 1, 2, 3]),
        ints(&[3, 2, 1, 0]),
    )
    .unwrap();
    let (a, astar) = build_a_astar(&inp, &g).unwrap();
    let mut expect = g.r().to_qsqrt();
    for i in 0..=3 {
        expect = expect
            .add(&g.f(i).unwrap().to_qsqrt().scale(&QSqrt::int(i as i64)))
            .unwrap();
        for x in g.grade_range(i) {
            assert_eq!(a.get(x, x), QSqrt::int(i as i64));
        }
    }
    assert_eq!(a, expect);
    assert_eq!(
        astar
            .transpose()
            .sub(&a)
            .unwrap()
            .iter()
            .filter(|(r, c, _)| r != c)
            .count(),
        0
    );
}

#[test]
fn a_matrix_on_a_module() {
    let params = p(2, 3, 1);
    let model = module_model(ModuleType::new(0, 3), params).unwrap();
    let inp = LeonardInput::new(
        ints(&[1, 1, 1]),
        ints(&[2, 3, 5]),
        ints(&[7, 8, 9, 10]),
        ints(&[1, 2, 3, 4]),
    )
    .unwrap();
    let (a, astar) = build_a_astar_module(&inp, &model).unwrap();
    for i in 0..4 {
        assert_eq!(*a.get(i, i), QSqrt::int(7 + i as i64));
        assert_eq!(*astar.get(i, i), QSqrt::int(1 + i as i64));
    }
    let x = [14, 18, 14];
    for i in 0..3 {
        assert_eq!(*a.get(i + 1, i), QSqrt::int(1));
        assert_eq!(*astar.get(i, i + 1), QSqrt::int([2, 3, 5][i] * x[i]));
        assert_eq!(x_coeff(0, 3, i + 1, params).unwrap(), QSqrt::int(x[i]));
    }
    let nnz = |m: &DenseMat| {
        (0..4)
            .flat_map(|r| (0..4).map(move |c| (r, c)))
            .filter(|&(r, c)| !m.get(r, c).is_zero())
            .count()
    };
    assert_eq!(nnz(&a), 7);
    assert_eq!(nnz(&astar), 7);
}

#[test]
fn expanded_form_equals_commutator_form() {
    let c = TDCoeffs {
        beta: QSqrt::frac(5, 2),
        gamma: QSqrt::int(3),
        gamma_star: QSqrt::frac(-1, 7),
        rho: QSqrt::int(11),
        rho_star: QSqrt::sqrt_q(2),
    };
    assert_eq!(b_expr(&c), b_commutator_expr(&c));
    assert_eq!(bstar_expr(&c), bstar_commutator_expr(&c));
    assert_eq!(b_expr(&c).degree(), 4);
}

#[test]
fn commuting_diagonal_pair_gives_zero() {
    let d = DenseMat::diagonal(ints(&[1, 4, 9, 16]));
    let c = TDCoeffs {
        beta: QSqrt::int(7),
        gamma: QSqrt::int(2),
        gamma_star: QSqrt::int(-3),
        rho: QSqrt::int(5),
        rho_star: QSqrt::int(1),
    };
    let (b, bs) = build_b_bstar_dense(&d, &d, &c).unwrap();
    assert!(b.is_zero() && bs.is_zero());
}

#[test]
fn standard_params_examples() {
    let q = 2;
    let qi = |k: i64| QSqrt::q_int_power(q, k);
    let th: Vec<QSqrt> = (0..6).map(|i| qi(-i)).collect();
    let c = standard_params(&th, &th).unwrap();
    assert_eq!(c.beta, qi(1) + qi(-1));
    assert!(c.gamma.is_zero() && c.rho.is_zero());
    assert!(!c.beta_is_degenerate());

    let (a, astar) = (QSqrt::int(3), QSqrt::int(-2));
    let th: Vec<QSqrt> = (0..6).map(|i| &a + qi(-i)).collect();
    let ts: Vec<QSqrt> = (0..6).map(|i| &astar + qi(-i) * QSqrt::int(5)).collect();
    let c = standard_params(&th, &ts).unwrap();
    let lin = QSqrt::frac(1, 2);
    assert_eq!(c.gamma, -(&lin * &a));
    assert_eq!(c.gamma_star, -(&lin * &astar));

    let lin_seq = ints(&[0, 1, 2, 3, 4]);
    let c = standard_params(&lin_seq, &ints(&[0, 2, 4, 6, 8])).unwrap();
    assert_eq!(c.beta, QSqrt::int(2));
    assert!(c.beta_is_degenerate());

    let bad = ints(&[0, 1, 3, 4, 9]);
    assert!(matches!(
        standard_params(&bad, &lin_seq),
        Err(Error::NotRecurrent(_))
    ));
    assert!(matches!(
        standard_params(&lin_seq, &bad),
        Err(Error::NotRecurrent(_))
    ));
    assert!(standard_params(&ints(&[0, 1, 2]), &ints(&[0, 1, 2])).is_err());
}

#[test]
fn beta_fit_examples() {
    let th = geometric(3, 2, 5, 2, 7);
    let fit = beta_fit(&th, &QSqrt::frac(5, 2)).unwrap();
    assert_eq!(
        fit.shape,
        RecurrenceShape::Geometric {
            base: QSqrt::int(2)
        }
    );
    assert_eq!(
        (fit.a, fit.b, fit.c),
        (QSqrt::int(3), QSqrt::int(2), QSqrt::int(5))
    );

    let quad: Vec<QSqrt> = (0..6).map(|i| QSqrt::int(1 + i + i * i)).collect();
    let fit = beta_fit(&quad, &QSqrt::int(2)).unwrap();
    assert_eq!(fit.shape, RecurrenceShape::Quadratic);
    assert_eq!(
        (fit.a, fit.b, fit.c),
        (QSqrt::int(1), QSqrt::int(1), QSqrt::int(1))
    );

    let alt: Vec<QSqrt> = (0..6)
        .map(|i| QSqrt::int(if i % 2 == 0 { i } else { -i }))
        .collect();
    let fit = beta_fit(&alt, &QSqrt::int(-2)).unwrap();
    assert_eq!(fit.shape, RecurrenceShape::Alternating);
    assert_eq!(
        (fit.a, fit.b, fit.c),
        (QSqrt::int(0), QSqrt::int(0), QSqrt::int(1))
    );

    assert!(matches!(
        beta_fit(&quad, &QSqrt::frac(5, 2)),
        Err(Error::NotRecurrent(_))
    ));
    assert!(beta_fit(&quad[..3], &QSqrt::int(2)).is_err());
    // β = 3 needs √5, which is not in ℚ(√2).
    let fib = geometric(0, 1, 0, 1, 5);
    assert!(beta_fit(&fib, &QSqrt::int(3)).is_err());
}

#[test]
fn heartsuit_basics() {
    let th = ints(&[1, 2, 4, 8, 16]);
    let constant = ints(&[5, 5, 5, 5, 5]);
    for i in 0..=2 {
        assert!(heartsuit(i, &th, &constant, &QSqrt::int(3))
            .unwrap()
            .is_zero());
    }
    assert!(heartsuit(3, &th, &constant, &QSqrt::int(3)).is_err());
}

#[test]
fn case_expansion_examples() {
    let params = p(2, 6, 1);
    let i0 = fixture(CaseTag::IZero);
    let (inp, c) = case_expand(&i0, params).unwrap();
    for i in 0..6 {
        let want = QSqrt::int(1) - QSqrt::q_int_power(2, -8 - i);
        assert_eq!(inp.xi(i), want);
        assert_eq!(inp.alpha(i), QSqrt::int(1));
        assert_eq!(inp.alpha_star(i + 1), want);
    }
    assert_eq!(c.beta, QSqrt::frac(5, 2));

    let mut forbidden = fixture(CaseTag::IPlus);
    forbidden.x = QSqrt::q_int_power(2, -8);
    assert!(matches!(case_expand(&forbidden, params), Err(Error::Invalid(m)) if m.contains("ξ_0")));

    let iii = fixture(CaseTag::IIIPlus);
    let (inp, _) = case_expand(&iii, params).unwrap();
    for i in 0..6 {
        assert_eq!(inp.xi(i), iii.x);
        assert_eq!(
            inp.theta(i).unwrap(),
            &iii.a + &iii.b * QSqrt::q_int_power(2, i)
        );
        assert_eq!(
            inp.theta_star(i).unwrap(),
            &iii.a_star + &iii.c_star * QSqrt::q_int_power(2, -i)
        );
    }

    let mut broken = fixture(CaseTag::IPlus);
    broken.b_star = QSqrt::int(1);
    assert!(broken.validate().is_err());
    assert!(case_expand(&broken, params).is_err());

    let mut collide = fixture(CaseTag::IIIPlus);
    collide.b = QSqrt::int(0);
    assert!(case_expand(&collide, params).is_err());
}

#[test]
fn fixtures_load_and_round_trip() {
    for tag in CaseTag::ALL {
        let spec = fixture(tag);
        assert_eq!(spec.tag, tag);
        assert_eq!(CaseSpec::from_json(&spec.to_json(), 2).unwrap(), spec);
        assert_eq!(CaseTag::parse(tag.as_str()).unwrap(), tag);
    }
    assert_eq!(CaseTag::parse("I\u{2212}").unwrap(), CaseTag::IMinus);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"tag":"I0","a":"0/1","b":"zero"}"#).unwrap();
    let err = CaseSpec::load(&path, 2).unwrap_err().to_string();
    assert!(err.contains("bad.json") && err.contains("field b"), "{err}");
    assert!(CaseSpec::load(&dir.path().join("missing.json"), 2).is_err());
}

#[test]
fn every_case_is_consistent() {
    let params = p(2, 6, 1);
    for tag in CaseTag::ALL {
        let spec = fixture(tag);
        let (inp, c) = case_expand(&spec, params).unwrap();
        assert_eq!(
            standard_params(inp.thetas(), inp.theta_stars()).unwrap(),
            c,
            "{tag}"
        );
        assert!(!c.beta_is_degenerate());
        assert!(verify_heart(&inp, &c).unwrap().pass, "{tag}");
        let xi = verify_xi_identities(&inp, &c, params).unwrap();
        assert!(xi.pass, "{tag}: {:?}", xi.witness);

        let swap = |f: RecurrenceFit| (f.a, f.b, f.c);
        let fit = |seq: &[QSqrt]| swap(beta_fit(seq, &c.beta).unwrap());
        let (th, ts) = if tag.family() == 2 {
            (
                (spec.a.clone(), spec.c.clone(), spec.b.clone()),
                (
                    spec.a_star.clone(),
                    spec.c_star.clone(),
                    spec.b_star.clone(),
                ),
            )
        } else {
            (
                (spec.a.clone(), spec.b.clone(), spec.c.clone()),
                (
                    spec.a_star.clone(),
                    spec.b_star.clone(),
                    spec.c_star.clone(),
                ),
            )
        };
        assert_eq!(fit(inp.thetas()), th, "{tag}");
        assert_eq!(fit(inp.theta_stars()), ts, "{tag}");
        let xis: Vec<QSqrt> = (0..6).map(|i| inp.xi(i)).collect();
        let (x, y, z) = fit(&xis);
        assert_eq!(x, spec.x);
        assert!(y.is_zero());
        let forced = match tag.family() {
            1 => -(QSqrt::q_int_power(2, -8) * &spec.c * &spec.c_star),
            2 => -(QSqrt::q_int_power(2, -8) * &spec.b * &spec.b_star),
            _ => QSqrt::int(0),
        };
        assert_eq!(z, forced, "{tag}");
    }
}

#[test]
fn every_case_vanishes_on_modules() {
    let params = p(2, 6, 1);
    for tag in CaseTag::ALL {
        let (inp, c) = case_expand(&fixture(tag), params).unwrap();
        let kits = module_kits(&inp, params).unwrap();
        assert_eq!(kits.len(), enumerate_types(params).len());
        for r in verify_b_bstar_modules(&kits, &c).unwrap() {
            assert!(r.pass, "{tag}: {:?}", r.witness);
        }
        let bumped = inp
            .with_theta(3, inp.theta(3).unwrap() + QSqrt::int(1))
            .unwrap();
        let kits = module_kits(&bumped, params).unwrap();
        let [b, _] = verify_b_bstar_modules(&kits, &c).unwrap();
        assert!(!b.pass, "{tag}");
    }
}

#[test]
fn gauge_does_not_matter() {
    let params = p(2, 6, 1);
    let spec = fixture(CaseTag::IIMinus);
    let gauge = vec![
        QSqrt::int(3),
        QSqrt::frac(-1, 2),
        QSqrt::int(7),
        QSqrt::frac(2, 5),
        QSqrt::int(-4),
        QSqrt::int(1),
    ];
    let (inp, c) = case_expand_with_gauge(&spec, params, &gauge).unwrap();
    assert_eq!(inp.alpha(1), QSqrt::frac(-1, 2));
    let kits = module_kits(&inp, params).unwrap();
    for r in verify_b_bstar_modules(&kits, &c).unwrap() {
        assert!(r.pass);
    }
    let (plain, _) = case_expand(&spec, params).unwrap();
    for i in 0..6 {
        assert_eq!(inp.xi(i), plain.xi(i));
    }
    assert!(case_expand_with_gauge(&spec, params, &gauge[..3]).is_err());
}

/// Arbitrary data: the unsimplified block tables hold for any parameters.
fn generic_input(n: usize) -> (LeonardInput, TDCoeffs) {
    let pick = |seed: i64, k: usize| {
        (0..k as i64)
            .map(|i| QSqrt::int(seed + i * i) + QSqrt::frac(1, i + 2))
            .collect::<Vec<_>>()
    };
    let inp = LeonardInput::new(pick(2, n), pick(5, n), pick(-3, n + 1), pick(7, n + 1)).unwrap();
    let c = TDCoeffs {
        beta: QSqrt::frac(7, 3),
        gamma: QSqrt::int(2),
        gamma_star: QSqrt::frac(-5, 2),
        rho: QSqrt::int(-1),
        rho_star: QSqrt::frac(3, 4),
    };
    (inp, c)
}

/// Standard eigenvalues with unrelated weights, so B ≠ 0 but the simplified
/// tables still apply.
fn standard_input(params: InstanceParams) -> (LeonardInput, TDCoeffs) {
    let spec = fixture(CaseTag::IPlus);
    let (base, c) = case_expand(&spec, params).unwrap();
    let n = params.n;
    let alphas = (0..n).map(|i| QSqrt::int(1 + i as i64)).collect();
    let stars = (0..n)
        .map(|i| QSqrt::frac(3 - 2 * i as i64, 2 + i as i64))
        .collect();
    let inp = LeonardInput::new(
        alphas,
        stars,
        base.thetas().to_vec(),
        base.theta_stars().to_vec(),
    )
    .unwrap();
    (inp, c)
}

#[test]
fn block_tables_hold_on_modules() {
    let params = p(2, 6, 1);
    for (inp, c, standard) in [
        {
            let (i, c) = generic_input(6);
            (i, c, false)
        },
        {
            let (i, c) = standard_input(params);
            (i, c, true)
        },
    ] {
        let kits = module_kits(&inp, params).unwrap();
        let formulas = block_tables(&inp, &c, params, standard).unwrap();
        assert!(formulas.iter().any(|f| !f.rhs.is_zero()));
        for r in block_checks(&formulas, &c, &kits, None, &Verification::dense()).unwrap() {
            assert!(r.pass, "{}: {:?}", r.id, r.witness);
        }
    }
}

#[test]
fn block_tables_hold_on_a_small_instance() {
    let params = p(2, 4, 1);
    let g = build_generators(&enumerate(params).unwrap()).unwrap();
    for (inp, c) in [generic_input(4), standard_input(params)] {
        let alpha = leonard_alphabet(&inp, &g).unwrap();
        let kits = module_kits(&inp, params).unwrap();
        let formulas = block_tables(&inp, &c, params, true).unwrap();
        let standard_ok = verify_heart(&inp, &c).unwrap().pass;
        let v = Verification::matrix_free(2, 9);
        for (r, f) in block_checks(&formulas, &c, &kits, Some(&alpha), &v)
            .unwrap()
            .iter()
            .zip(&formulas)
        {
            if f.table.is_some_and(BlockTable::needs_standard) && !standard_ok {
                continue;
            }
            assert!(r.pass, "{}: {:?}", r.id, r.witness);
            assert_eq!(r.mode, Mode::MatrixFree);
        }
    }
}

#[test]
fn a_wrong_row_is_caught() {
    let params = p(2, 6, 1);
    let (inp, c) = generic_input(6);
    let kits = module_kits(&inp, params).unwrap();
    let mut f = block_formula(BlockTable::BRaise3, 1, &inp, &c, params).unwrap();
    assert_eq!((f.target, f.source), (4, 1));
    f.rhs = f.rhs.scale(&QSqrt::int(2));
    let r = block_checks(&[f], &c, &kits, None, &Verification::dense()).unwrap();
    assert!(!r[0].pass);
}

#[test]
fn block_ranges() {
    let params = p(2, 6, 1);
    let (inp, c) = generic_input(6);
    assert!(block_formula(BlockTable::BRaise3, 4, &inp, &c, params).is_err());
    assert!(block_formula(BlockTable::BsLower3, 2, &inp, &c, params).is_err());
    assert!(block_formula(BlockTable::BRaise2Base, 1, &inp, &c, params).is_err());
    assert!(zero_block(false, 0, 5, 6).is_ok());
    assert!(zero_block(false, 5, 0, 6).is_ok());
    assert!(zero_block(false, 3, 0, 6).is_err());
    assert!(zero_block(true, 0, 3, 6).is_err());
    assert!(zero_block(true, 2, 0, 6).is_ok());
    let f = block_formula(BlockTable::BRaise3, 0, &inp, &c, params).unwrap();
    let coef = inp.alpha(0)
        * inp.alpha(1)
        * inp.alpha(2)
        * (inp.theta_star(0).unwrap()
            - inp.theta_star(3).unwrap()
            - (&c.beta + &QSqrt::int(1))
                * (inp.theta_star(1).unwrap() - inp.theta_star(2).unwrap()));
    assert_eq!(
        f.rhs,
        Expr::word(&[Letter::R, Letter::R, Letter::R, Letter::F(0)]).scale(&coef)
    );
}

#[test]
fn leonard_check_on_every_module() {
    let params = p(2, 6, 1);
    for tag in CaseTag::ALL {
        let spec = fixture(tag);
        for t in enumerate_types(params) {
            let out = leonard_check(&spec, t, params).unwrap();
            assert!(out.pass, "{tag} {t}: {out:?}");
            assert!(out.array.validate().is_ok());
        }
    }
    let iii = fixture(CaseTag::IIIPlus);
    let out = leonard_check(&iii, ModuleType::new(0, 6), params).unwrap();
    let t = &out.array.theta;
    let direct = (&t[0] - &t[3]) / (&t[1] - &t[2]);
    assert_eq!(out.array.common_ratio().unwrap(), direct);
    assert_eq!(direct, QSqrt::frac(7, 2));
}

#[test]
fn forbidden_x_fails_at_the_predicted_index() {
    let params = p(2, 6, 1);
    let t = ModuleType::new(1, 4);
    let mut spec = fixture(CaseTag::IPlus);
    let bcs = &spec.b * &spec.c_star;
    spec.x = QSqrt::q_int_power(2, (t.r + t.d) as i64 - 7) * bcs * QSqrt::frac(1, 2);
    let out = leonard_check(&spec, t, params).unwrap();
    assert!(!out.pass);
    assert_eq!(out.violation, Some(1));
    assert_eq!(out.phi_zero_at, Some(1));
    assert_eq!(out.axioms.as_ref().unwrap_err().axiom, 2);
    assert_eq!(out.closed_form_mismatch, None);

    let mut minus = fixture(CaseTag::IMinus);
    let cbs = &minus.c * &minus.b_star;
    minus.x = QSqrt::q_int_power(2, (t.r + t.d) as i64 - 7) * cbs * QSqrt::frac(1, 2);
    let out = leonard_check(&minus, t, params).unwrap();
    assert_eq!(out.violation, Some(1));
    assert_eq!(out.phi_zero_at, Some(t.d));
}

#[test]
fn parameter_array_rejects_tampering() {
    let params = p(2, 6, 1);
    let out = leonard_check(&fixture(CaseTag::IZero), ModuleType::new(0, 6), params).unwrap();
    let mut arr = out.array.clone();
    arr.varphi[2] = &arr.varphi[2] + &QSqrt::int(1);
    assert_eq!(arr.validate().unwrap_err().axiom, 3);
    let mut arr = out.array.clone();
    arr.theta_star[4] = arr.theta_star[1].clone();
    assert_eq!(arr.validate().unwrap_err().axiom, 1);
    let mut arr = out.array;
    arr.phi[2] = &arr.phi[2] + &QSqrt::int(1);
    assert_eq!(arr.validate().unwrap_err().axiom, 4);
    let trivial = leonard_check(&fixture(CaseTag::IZero), ModuleType::new(3, 0), params).unwrap();
    assert!(trivial.pass && trivial.array.varphi.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn geometric_fit_round_trip(a in -9i64..10, b in -9i64..10, c in -9i64..10, base in 2i64..5) {
        let seq = geometric(a, b, c, base, 6);
        let beta = QSqrt::int(base) + QSqrt::frac(1, base);
        let fit = beta_fit(&seq, &beta).unwrap();
        prop_assert_eq!(fit.shape, RecurrenceShape::Geometric { base: QSqrt::int(base) });
        prop_assert_eq!((fit.a, fit.b, fit.c), (QSqrt::int(a), QSqrt::int(b), QSqrt::int(c)));
    }

    #[test]
    fn closed_coefficients_match_standard_params(
        a in -5i64..6, b in 1i64..4, c in 1i64..4, a2 in -5i64..6, b2 in 1i64..4, c2 in 1i64..4, flip in any::<bool>()
    ) {
        // θ_i = a + bQ^i + cQ^{-i} with Q = 2 (or 1/2); distinct because b, c > 0 keep it convex in i.
        let spec = CaseSpec {
            tag: if flip { CaseTag::IIZero } else { CaseTag::IZero },
            a: QSqrt::int(a), b: QSqrt::int(b), c: QSqrt::int(c),
            a_star: QSqrt::int(a2), b_star: QSqrt::int(b2), c_star: QSqrt::int(c2),
            x: QSqrt::int(1),
        };
        let th: Vec<QSqrt> = (0..7).map(|i| spec.theta(i, 2)).collect();
        let ts: Vec<QSqrt> = (0..7).map(|i| spec.theta_star(i, 2)).collect();
        prop_assume!(th.iter().enumerate().all(|(i, x)| th[i + 1..].iter().all(|y| x != y)));
        prop_assume!(ts.iter().enumerate().all(|(i, x)| ts[i + 1..].iter().all(|y| x != y)));
        prop_assert_eq!(standard_params(&th, &ts).unwrap(), spec.coeffs(2));
    }

    #[test]
    fn x_only_cases_have_constant_xi(x in 1i64..20) {
        let mut spec = fixture(CaseTag::IIIMinus);
        spec.x = QSqrt::int(x);
        let params = p(2, 6, 1);
        let (inp, _) = case_expand(&spec, params).unwrap();
        prop_assert!((0..6).all(|i| inp.xi(i) == QSqrt::int(x)));
    }
}
