//! Models and independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::Ratio;

use psurf::structure::QRModel;
use psurf::symcore::{parse_normal, EvolutionModel, NormalForm};

pub const MKDV_QR: [&str; 5] = [
    "q",
    "-q",
    "-1/2*eta^3 - eta*q^2",
    "-q_xx - eta*q_x - eta^2*q - 2*q^3",
    "q_xx - eta*q_x + eta^2*q + 2*q^3",
];

pub const SG_QR: [&str; 5] = ["u_x/2", "-u_x/2", "cos(u)/(2*eta)", "-sin(u)/(2*eta)", "-sin(u)/(2*eta)"];

pub fn nf(s: &str) -> NormalForm {
    parse_normal(s).unwrap()
}

pub fn qr(e: [&str; 5]) -> QRModel {
    QRModel::parse(e[0], e[1], e[2], e[3], e[4]).unwrap()
}

pub fn sg_base() -> EvolutionModel {
    EvolutionModel::new().with_constraint("u", 1, nf("2*q")).unwrap()
}

pub fn mkdv() -> (QRModel, EvolutionModel) {
    let m = EvolutionModel::new().with_evolution("q", nf("-6*q^2*q_x - q_xxx")).unwrap();
    (qr(MKDV_QR), m)
}

pub fn sine_gordon() -> (QRModel, EvolutionModel) {
    let m = sg_base().with_evolution("q", nf("sin(u)/2")).unwrap();
    (qr(SG_QR), m)
}

/// Integer polynomials in `q, q_x, q_xx, ...` keyed by exponent vectors.
pub type Dict = BTreeMap<Vec<u32>, i64>;

fn trim(mut mono: Vec<u32>) -> Vec<u32> {
    while mono.last() == Some(&0) {
        mono.pop();
    }
    mono
}

fn add_into(acc: &mut Dict, mono: Vec<u32>, c: i64) {
    let mono = trim(mono);
    let e = acc.entry(mono.clone()).or_insert(0);
    *e += c;
    if *e == 0 {
        acc.remove(&mono);
    }
}

pub fn mul(a: &Dict, b: &Dict) -> Dict {
    let mut out = Dict::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let n = ma.len().max(mb.len());
            let m: Vec<u32> = (0..n)
                .map(|i| ma.get(i).copied().unwrap_or(0) + mb.get(i).copied().unwrap_or(0))
                .collect();
            add_into(&mut out, m, ca * cb);
        }
    }
    out
}

pub fn dx(a: &Dict) -> Dict {
    let mut out = Dict::new();
    for (m, c) in a {
        for (j, &e) in m.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let mut n = m.clone();
            n.resize(n.len().max(j + 2), 0);
            n[j] -= 1;
            n[j + 1] += 1;
            add_into(&mut out, n, c * e as i64);
        }
    }
    out
}

pub fn scale(a: &Dict, k: i64) -> Dict {
    a.iter().map(|(m, c)| (m.clone(), c * k)).collect()
}

pub fn sum(a: &Dict, b: &Dict) -> Dict {
    let mut out = a.clone();
    for (m, c) in b {
        add_into(&mut out, m.clone(), *c);
    }
    out
}

fn mono_text(m: &[u32]) -> String {
    let mut s = String::new();
    for (j, e) in m.iter().enumerate() {
        if *e > 0 {
            s += &format!("*D[q,{j}]^{e}");
        }
    }
    s
}

pub fn to_normal(a: &Dict) -> NormalForm {
    if a.is_empty() {
        return NormalForm::zero();
    }
    let text = a.iter().map(|(m, c)| format!("({c}){}", mono_text(m))).collect::<Vec<_>>().join(" + ");
    nf(&text)
}

/// `g_n` for MKdV through `h_n = g_n / q`:
/// `h_1 = -q`, `h_{n+1} = -q sum h_k h_{n-k} - D_x h_n`.
pub fn oracle_mkdv_dicts(count: usize) -> Vec<Dict> {
    let q: Dict = [(vec![1], 1)].into_iter().collect();
    let mut h = vec![scale(&q, -1)];
    while h.len() < count {
        let n = h.len();
        let mut conv = Dict::new();
        for k in 1..n {
            conv = sum(&conv, &mul(&h[k - 1], &h[n - k - 1]));
        }
        h.push(sum(&scale(&mul(&q, &conv), -1), &scale(&dx(&h[n - 1]), -1)));
    }
    h.iter().map(|hn| mul(&q, hn)).collect()
}

pub fn oracle_mkdv(count: usize) -> Vec<NormalForm> {
    oracle_mkdv_dicts(count).iter().map(to_normal).collect()
}

/// Scaling weight with `q` of weight 1 and each x-derivative adding 1.
fn weight(m: &[u32]) -> u32 {
    m.iter().enumerate().map(|(j, e)| e * (j as u32 + 1)).sum()
}

/// Every exponent vector of weight `w`.
fn monomials(w: u32) -> Vec<Vec<u32>> {
    fn go(rest: u32, j: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(trim(cur.clone()));
            return;
        }
        if j + 1 > rest {
            return;
        }
        for e in 0..=rest / (j + 1) {
            cur.push(e);
            go(rest - e * (j + 1), j + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(w, 0, &mut Vec::new(), &mut out);
    out.retain(|m| !m.is_empty());
    out
}

/// Solves `D_x P = g` with `P` ranging over all polynomials of weight one
/// less than `g`, by exact elimination. `None` when no such `P` exists.
pub fn antiderivative(g: &Dict) -> Option<NormalForm> {
    type Q = Ratio<i64>;
    let w = weight(g.keys().next()?);
    assert!(g.keys().all(|m| weight(m) == w), "g is not weight-homogeneous");
    let basis = monomials(w - 1);
    let images: Vec<Dict> = basis.iter().map(|m| dx(&[(m.clone(), 1)].into_iter().collect())).collect();
    let mut rows: Vec<Vec<u32>> = images.iter().flat_map(|d| d.keys().cloned()).chain(g.keys().cloned()).collect();
    rows.sort();
    rows.dedup();
    let cols = basis.len();
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .map(|r| {
            let mut row: Vec<Q> = images.iter().map(|d| Q::from(*d.get(r).unwrap_or(&0))).collect();
            row.push(Q::from(*g.get(r).unwrap_or(&0)));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| a[i][c] != Q::from(0)) else { continue };
        a.swap(r, p);
        let lead = a[r][c];
        for x in a[r].iter_mut() {
            *x /= lead;
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != Q::from(0) {
                let f = a[i][c];
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if a[r..].iter().any(|row| row[cols] != Q::from(0)) {
        return None;
    }
    let text: Vec<String> = pivots
        .iter()
        .enumerate()
        .filter(|(i, _)| a[*i][cols] != Q::from(0))
        .map(|(i, &c)| format!("({}){}", a[i][cols], mono_text(&basis[c])))
        .collect();
    Some(if text.is_empty() { NormalForm::zero() } else { nf(&text.join(" + ")) })
}
