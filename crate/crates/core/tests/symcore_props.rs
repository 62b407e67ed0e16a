use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use psurf::pdebench::ExactSolution;
use psurf::symcore::probe::probe_max_abs;
use psurf::symcore::{
    is_zero_onshell, normalize, parse, parse_normal, rational_to_f64, EvolutionModel, Expr, Generator, LaurentSeries,
    NormalForm,
};

fn leaf(fields: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-3i64..=3).prop_map(Expr::int),
        (0..fields.len(), 0u32..3).prop_map(move |(f, k)| Expr::jet(fields[f], k)),
        Just(Expr::Gen(Generator::Eta)),
    ]
}

fn expr_over(fields: &'static [&'static str]) -> impl Strategy<Value = Expr> {
    leaf(fields).prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Product),
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (inner.clone(), 0i64..3).prop_map(|(e, k)| Expr::Pow(Box::new(e), k)),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Quotient(Box::new(a), Box::new(b))),
        ]
    })
}

fn expr() -> impl Strategy<Value = Expr> {
    expr_over(&["q"])
}

fn two_field_expr() -> impl Strategy<Value = Expr> {
    expr_over(&["q", "r"])
}

fn mkdv() -> EvolutionModel {
    EvolutionModel::new()
        .with_evolution("q", parse_normal("-6*q^2*q_x - q_xxx").unwrap())
        .unwrap()
}

fn nls() -> EvolutionModel {
    EvolutionModel::new()
        .with_evolution("q", parse_normal("2*q^2*r - q_xx").unwrap())
        .unwrap()
        .with_evolution("r", parse_normal("r_xx - 2*q*r^2").unwrap())
        .unwrap()
}

/// Evaluates a tree directly on the MKdV soliton, with time jets taken
/// from the closed form rather than from the model.
fn eval_on_soliton(e: &Expr, sol: &ExactSolution, x: f64, t: f64, eta: f64) -> f64 {
    let go = |e: &Expr| eval_on_soliton(e, sol, x, t, eta);
    match e {
        Expr::Const(c) => rational_to_f64(c),
        Expr::Gen(Generator::Eta) => eta,
        Expr::Gen(g) => sol.value(g, x, t).expect("soliton supplies q jets"),
        Expr::TimeJet { x_order, .. } => sol.q_t_jet(*x_order, x, t),
        Expr::Sum(xs) => xs.iter().map(go).sum(),
        Expr::Product(xs) => xs.iter().map(go).product(),
        Expr::Neg(a) => -go(a),
        Expr::Pow(a, k) => go(a).powi(*k as i32),
        Expr::Quotient(a, b) => go(a) / go(b),
    }
}

fn time_jet(k: u32) -> Expr {
    Expr::TimeJet { field: "q".into(), x_order: k }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn normalize_is_idempotent_and_prints_back(e in expr()) {
        let Ok(nf) = normalize(&e) else { return Ok(()); };
        let again = normalize(&parse(&nf.to_string()).unwrap()).unwrap();
        prop_assert_eq!(&again, &nf);
        let rebuilt = NormalForm::from_parts(nf.numerator().clone(), nf.denominator().clone()).unwrap();
        prop_assert_eq!(rebuilt, nf);
    }

    #[test]
    fn normalize_is_a_ring_homomorphism(a in expr(), b in expr()) {
        let (Ok(na), Ok(nb)) = (normalize(&a), normalize(&b)) else { return Ok(()); };
        let sum = normalize(&Expr::Sum(vec![a.clone(), b.clone()])).unwrap();
        let diff = normalize(&Expr::Sum(vec![a.clone(), Expr::Neg(Box::new(b.clone()))])).unwrap();
        let prod = normalize(&Expr::Product(vec![a, b])).unwrap();
        prop_assert_eq!(sum, &na + &nb);
        prop_assert_eq!(diff, &na - &nb);
        prop_assert_eq!(prod, &na * &nb);
    }

    #[test]
    fn total_dx_obeys_leibniz(a in two_field_expr(), b in two_field_expr()) {
        let (Ok(na), Ok(nb)) = (normalize(&a), normalize(&b)) else { return Ok(()); };
        let m = EvolutionModel::new();
        let lhs = m.total_dx(&(&na * &nb)).unwrap();
        let rhs = &(&na * &m.total_dx(&nb).unwrap()) + &(&nb * &m.total_dx(&na).unwrap());
        prop_assert!((&lhs - &rhs).is_zero());
    }

    #[test]
    fn total_derivatives_commute_on_shell(e in two_field_expr()) {
        let Ok(ne) = normalize(&e) else { return Ok(()); };
        let m = nls();
        let xt = m.total_dx(&m.total_dt(&ne).unwrap()).unwrap();
        let tx = m.total_dt(&m.total_dx(&ne).unwrap()).unwrap();
        prop_assert!(m.reduce(&(&xt - &tx)).unwrap().is_zero());
    }

    #[test]
    fn laurent_expansion_resums(cs in prop::collection::vec((-3i64..=3, expr()), 1..4)) {
        let terms: Vec<Expr> = cs
            .into_iter()
            .map(|(k, e)| Expr::Product(vec![Expr::Pow(Box::new(Expr::Gen(Generator::Eta)), k), e]))
            .collect();
        let Ok(nf) = normalize(&Expr::Sum(terms)) else { return Ok(()); };
        let Ok(series) = LaurentSeries::of(&nf) else { return Ok(()); };
        prop_assert_eq!(series.resum(), nf);
    }

    #[test]
    fn onshell_zero_test_is_sound(a in expr(), k in 0u32..3, perturb in any::<bool>(), seed in any::<u64>()) {
        // D_t D_x^k q * a - (D_x^k E) * a vanishes on-shell; adding q_x does not.
        let m = mkdv();
        let Ok(na) = normalize(&a) else { return Ok(()); };
        let mut dk = m.total_dt(&NormalForm::jet("q", k)).unwrap();
        if perturb {
            dk = &dk + &NormalForm::jet("q", 1);
        }
        let lhs = Expr::Product(vec![time_jet(k), a.clone()]);
        let rhs = Expr::Product(vec![parse(&dk.to_string()).unwrap(), a]);
        let e = Expr::Sum(vec![lhs.clone(), Expr::Neg(Box::new(rhs.clone()))]);
        let zero = is_zero_onshell(&e, &m).unwrap();
        prop_assert_eq!(zero, !perturb || na.is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if zero {
            for _ in 0..20 {
                let sol = ExactSolution::MkdvSoliton { a: rng.random_range(0.5..1.5) };
                let (x, t, eta) = (rng.random_range(-2.0..2.0), rng.random_range(0.0..1.0), rng.random_range(0.5..2.0));
                let (l, r) = (eval_on_soliton(&lhs, &sol, x, t, eta), eval_on_soliton(&rhs, &sol, x, t, eta));
                if l.is_finite() && r.is_finite() {
                    prop_assert!((l - r).abs() < 1e-9 * l.abs().max(1.0), "{l} vs {r}");
                }
            }
        } else {
            prop_assert!(probe_max_abs(&e.normalize_in(&m).unwrap(), &mut rng, 20) > 1e-3);
        }
    }
}
