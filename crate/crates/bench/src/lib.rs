//! Fixtures shared by the criterion benches in `benches/`.

use psurf::structure::QRModel;
use psurf::symcore::{parse_normal, EvolutionModel};

pub fn mkdv() -> (QRModel, EvolutionModel) {
    let qr = QRModel::parse(
        "q",
        "-q",
        "-1/2*eta^3 - eta*q^2",
        "-q_xx - eta*q_x - eta^2*q - 2*q^3",
        "q_xx - eta*q_x + eta^2*q + 2*q^3",
    )
    .expect("mkdv data parses");
    let m = EvolutionModel::new()
        .with_evolution("q", parse_normal("-6*q^2*q_x - q_xxx").expect("flow parses"))
        .expect("valid model");
    (qr, m)
}

pub fn sine_gordon() -> (QRModel, EvolutionModel) {
    let qr = QRModel::parse("u_x/2", "-u_x/2", "cos(u)/(2*eta)", "-sin(u)/(2*eta)", "-sin(u)/(2*eta)")
        .expect("sine-Gordon data parses");
    let m = EvolutionModel::new()
        .with_constraint("u", 1, parse_normal("2*q").expect("constraint parses"))
        .and_then(|m| m.with_evolution("q", parse_normal("sin(u)/2").expect("flow parses")))
        .expect("valid model");
    (qr, m)
}
