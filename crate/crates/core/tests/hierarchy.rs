mod common;

use psurf::claws::{euler_trivial, flux_sequence, g_sequence, hierarchy, verify};
use psurf::structure::QRModel;
use psurf::symcore::{laurent_eta, parse_normal, EvolutionModel};

use common::{mkdv, oracle_mkdv, sine_gordon};

#[test]
fn generic_first_terms() {
    let qr = QRModel::parse("q", "r", "0", "0", "0").unwrap();
    let gs = g_sequence(&qr, &EvolutionModel::new(), 2).unwrap();
    assert_eq!(gs.get(1), &parse_normal("q*r").unwrap());
    assert_eq!(gs.get(2), &parse_normal("-q*r_x").unwrap());
}

#[test]
fn mkdv_terms_match_independent_oracle() {
    let (qr, m) = mkdv();
    let gs = g_sequence(&qr, &m, 8).unwrap();
    let oracle = oracle_mkdv(8);
    for n in 1..=8 {
        assert_eq!(gs.get(n), &oracle[n - 1], "g_{n}");
    }
    assert_eq!(gs.get(3), &parse_normal("-q^4 - q*q_xx").unwrap());
    assert_eq!(gs.get(4), &parse_normal("5*q^3*q_x + q*q_xxx").unwrap());
}

#[test]
fn recursion_and_series_residuals_vanish() {
    let (qr, m) = mkdv();
    let big_n = 6;
    let gs = g_sequence(&qr, &m, big_n).unwrap();
    for n in 1..big_n {
        assert!(gs.recursion_residual(n).unwrap().is_zero(), "n = {n}");
    }
    let res = gs.series_residual(&qr.r).unwrap();
    for (m, c) in laurent_eta(&res, -(big_n as i64 - 1), 0).unwrap().iter().enumerate() {
        assert!(c.is_zero(), "eta^{} coefficient {c}", m as i64 - (big_n as i64 - 1));
    }
}

#[test]
fn mkdv_hierarchy_to_order_eight() {
    let (qr, m) = mkdv();
    let h = hierarchy(&qr, &m, 8, false).unwrap();
    assert_eq!(h.laws.len(), 8);
    assert!(h.cancelled.is_empty());
    assert!(h.all_verified(), "{:?}", h.verified);
    for law in &h.laws {
        assert_eq!(law.trivial, law.order % 2 == 0, "order {}", law.order);
        // -[(q_xx/q + 2 q^2) g_n + (q_x/q) g_{n+1} + g_{n+2}]
        let n = law.order;
        let a = &parse_normal("q_xx/q + 2*q^2").unwrap() * h.g.get(n);
        let b = &parse_normal("q_x/q").unwrap() * h.g.get(n + 1);
        let golden = -(&(&a + &b) + h.g.get(n + 2));
        assert_eq!(law.flux, golden, "order {n}");
    }
}

#[test]
fn sine_gordon_hierarchy_to_order_six() {
    let (qr, m) = sine_gordon();
    let h = hierarchy(&qr, &m, 6, false).unwrap();
    assert_eq!(h.cancelled, vec![1]);
    assert_eq!(h.laws.iter().map(|l| l.order).collect::<Vec<_>>(), vec![2, 3, 4, 5, 6]);
    assert!(h.all_verified());
    for law in &h.laws {
        // -(sin u / u_x) g_{n-1}
        let golden = m.reduce(&(&parse_normal("-sin(u)/u_x").unwrap() * h.g.get(law.order - 1))).unwrap();
        assert_eq!(law.flux, golden, "order {}", law.order);
    }
}

#[test]
fn mirror_hierarchies_verify() {
    for (qr, m) in [mkdv(), sine_gordon()] {
        let h = hierarchy(&qr, &m, 5, true).unwrap();
        assert!(!h.laws.is_empty());
        assert!(h.all_verified());
    }
}

#[test]
fn cancelled_order_is_a_seed_identity() {
    // At the cancelled order the flux is A_{-1} alone; it still balances.
    let (qr, m) = sine_gordon();
    let gs = g_sequence(&qr, &m, 2).unwrap();
    let law = psurf::claws::ConservationLaw {
        order: 1,
        density: gs.get(1).clone(),
        flux: parse_normal("cos(u)/2").unwrap(),
        trivial: false,
    };
    assert!(verify(&law, &m).unwrap());
    assert!(flux_sequence(&qr, &gs, &m).unwrap().cancelled.contains(&1));
}

#[test]
fn antiderivative_fixtures() {
    let (qr, m) = mkdv();
    let gs = g_sequence(&qr, &m, 4).unwrap();
    let g2 = m.total_dx(&parse_normal("q^2/2").unwrap()).unwrap();
    let g4 = m.total_dx(&parse_normal("5/4*q^4 + q*q_xx - 1/2*q_x^2").unwrap()).unwrap();
    assert_eq!(gs.get(2), &g2);
    assert_eq!(gs.get(4), &g4);
    assert!(euler_trivial(&g2, &m).unwrap() && euler_trivial(&g4, &m).unwrap());
}
