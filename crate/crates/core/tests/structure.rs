use psurf::structure::{
    check_all, closedness_residuals, derive_evolution, phi_compatibility, qr_identity_residual, qr_to_f, residuals_f,
    residuals_qr, FTable, QRModel,
};
use psurf::symcore::{parse_normal, EvolutionModel, NormalForm};

fn nf(s: &str) -> NormalForm {
    parse_normal(s).unwrap()
}

const MKDV: [&str; 5] = [
    "q",
    "-q",
    "-1/2*eta^3 - eta*q^2",
    "-q_xx - eta*q_x - eta^2*q - 2*q^3",
    "q_xx - eta*q_x + eta^2*q + 2*q^3",
];

const SINE_GORDON: [&str; 5] = ["u_x/2", "-u_x/2", "cos(u)/(2*eta)", "-sin(u)/(2*eta)", "-sin(u)/(2*eta)"];

fn qr(e: [&str; 5]) -> QRModel {
    QRModel::parse(e[0], e[1], e[2], e[3], e[4]).unwrap()
}

fn mkdv_model() -> EvolutionModel {
    EvolutionModel::new().with_evolution("q", nf("-6*q^2*q_x - q_xxx")).unwrap()
}

fn sg_base() -> EvolutionModel {
    EvolutionModel::new().with_constraint("u", 1, nf("2*q")).unwrap()
}

fn sg_model() -> EvolutionModel {
    sg_base().with_evolution("q", nf("sin(u)/2")).unwrap()
}

#[test]
fn worked_models_satisfy_every_identity() {
    for (data, m) in [(MKDV, mkdv_model()), (SINE_GORDON, sg_model())] {
        let entries = check_all(&qr(data), None, &m).unwrap();
        assert_eq!(entries.len(), 9);
        for e in &entries {
            assert!(e.onshell_zero, "{} = {}", e.name, e.expression);
        }
    }
}

#[test]
fn first_equation_is_an_identity_off_shell() {
    assert!(qr_identity_residual(&qr(MKDV), &EvolutionModel::new()).unwrap().is_zero());
    assert!(qr_identity_residual(&qr(SINE_GORDON), &sg_base()).unwrap().is_zero());
}

#[test]
fn representation_entries() {
    let f = qr_to_f(&qr(MKDV));
    assert_eq!(f.get(3, 1), &nf("-2*q"));
    let f = qr_to_f(&qr(SINE_GORDON));
    assert!(f.get(2, 1).is_zero());
    assert_eq!(f.get(3, 1), &nf("-u_x"));
    let f = qr_to_f(&qr(["0"; 5]));
    assert_eq!(f.get(1, 1), &nf("-eta"));
    for (a, b) in [(1, 2), (2, 1), (2, 2), (3, 1), (3, 2)] {
        assert!(f.get(a, b).is_zero());
    }
}

#[test]
fn derived_flows() {
    let m = derive_evolution(&qr(MKDV), &EvolutionModel::new()).unwrap();
    assert_eq!(m.total_dt(&nf("q")).unwrap(), nf("-6*q^2*q_x - q_xxx"));
    let m = derive_evolution(&qr(SINE_GORDON), &sg_base()).unwrap();
    // u_xt = 2 q_t
    assert_eq!(m.total_dt(&nf("2*q")).unwrap(), nf("sin(u)"));
}

/// Each f-residual is a fixed combination of the qr-residuals:
/// `R1 = -2 Q1`, `R2 = -(Q2 + Q3)`, `R3 = Q2 - Q3`. Checked with flows
/// that do not satisfy the equations, so every residual is nonzero.
#[test]
fn representations_span_the_same_ideal() {
    let wrong_scalar = EvolutionModel::new().with_evolution("q", nf("q_x")).unwrap();
    let nls = QRModel::parse("q", "r", "-eta^2/2 + q*r", "-eta*q - q_x", "-eta*r + r_x").unwrap();
    let wrong_pair = EvolutionModel::new()
        .with_evolution("q", nf("q_xx"))
        .unwrap()
        .with_evolution("r", nf("q*r"))
        .unwrap();
    for (model, m) in [(qr(MKDV), wrong_scalar), (nls, wrong_pair)] {
        let q = residuals_qr(&model, &m).unwrap().residuals;
        let f = residuals_f(&qr_to_f(&model), &m).unwrap().residuals;
        assert!(!q[1].is_zero());
        assert_eq!(f[0], q[0].scale(&psurf::symcore::rat(-2, 1)));
        assert_eq!(f[1], -(&q[1] + &q[2]));
        assert_eq!(f[2], &q[1] - &q[2]);
    }
}

#[test]
fn wrong_flow_breaks_third_f_residual() {
    let m = EvolutionModel::new().with_evolution("q", nf("q_x")).unwrap();
    let r = residuals_f(&qr_to_f(&qr(MKDV)), &m).unwrap();
    assert!(!r.residuals[2].is_zero());
}

#[test]
fn every_single_perturbation_is_detected() {
    // (entry, added term)
    let list: [(usize, &str); 6] = [(2, "q"), (2, "eta"), (3, "q_x"), (3, "1/10"), (4, "q"), (4, "eta*q_x")];
    for (data, m) in [(MKDV, mkdv_model()), (SINE_GORDON, sg_model())] {
        for (slot, extra) in list {
            let mut e: Vec<String> = data.iter().map(|s| s.to_string()).collect();
            e[slot] = format!("({}) + {extra}", e[slot]);
            let model = QRModel::parse(&e[0], &e[1], &e[2], &e[3], &e[4]).unwrap();
            let entries = check_all(&model, None, &m).unwrap();
            assert!(
                entries.iter().any(|r| !r.onshell_zero),
                "perturbation {slot} += {extra} went unnoticed"
            );
        }
    }
}

#[test]
fn angle_system_perturbations() {
    let m = mkdv_model();
    let base = qr_to_f(&qr(MKDV));
    let mut f: FTable = base.clone();
    *f.get_mut(3, 2) = f.get(3, 2) + &nf("q");
    assert!(!phi_compatibility(&f, &m).unwrap().is_zero());
    let mut f = base;
    *f.get_mut(1, 2) = f.get(1, 2) + &nf("q");
    let (theta, _) = closedness_residuals(&f, &m).unwrap();
    assert!(!theta.is_zero());
}

#[test]
fn constant_flat_table_is_compatible_off_shell() {
    // Constant entries with f_a1 f_b2 = f_a2 f_b1 make all three quadratic
    // terms vanish, so the table is flat without any model.
    let f = FTable::new([[nf("1"), nf("2")], [nf("2"), nf("4")], [nf("3"), nf("6")]]);
    let m = EvolutionModel::new();
    assert!(residuals_f(&f, &m).unwrap().all_zero());
    assert!(phi_compatibility(&f, &m).unwrap().is_zero());
}
