//! JSON interchange for forms and quaternion-valued functions.
//!
//! Form: `{"n": 1, "k": 2, "terms": [{"idx": [0, 1], "coeff": [{"exps": [0, 0, 0, 0], "c": "1"}]}]}`.
//! QFunction: `{"n": 1, "components": [poly, poly, poly, poly]}` where a poly is a
//! `coeff` list as above. Rationals are written `p/q` or as integers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::{Form, MultiIndex};
use crate::linalg::{fmt_q, parse_q};
use crate::poly::{Monomial, Poly};
use crate::qholo::QFunction;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonoJson {
    pub exps: Vec<u16>,
    pub c: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub idx: Vec<usize>,
    pub coeff: Vec<MonoJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormJson {
    pub n: usize,
    pub k: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QFunctionJson {
    pub n: usize,
    pub components: Vec<Vec<MonoJson>>,
}

pub fn poly_to_json(p: &Poly) -> Vec<MonoJson> {
    p.terms().map(|(m, c)| MonoJson { exps: m.0.clone(), c: fmt_q(c) }).collect()
}

pub fn poly_from_json(nvars: usize, monos: &[MonoJson], at: &str) -> Result<Poly> {
    let mut p = Poly::zero(nvars);
    for (i, m) in monos.iter().enumerate() {
        if m.exps.len() != nvars {
            return Err(Error::Input(format!("{at}[{i}].exps: expected {nvars} exponents, got {}", m.exps.len())));
        }
        let c = parse_q(&m.c).ok_or_else(|| Error::Input(format!("{at}[{i}].c: {:?} is not a rational", m.c)))?;
        p.add_term(Monomial(m.exps.clone()), c);
    }
    Ok(p)
}

pub fn form_to_json(a: &Form) -> FormJson {
    FormJson {
        n: a.n(),
        k: a.k(),
        terms: a.terms().map(|(m, p)| TermJson { idx: m.indices(), coeff: poly_to_json(p) }).collect(),
    }
}

pub fn form_from_json(j: &FormJson) -> Result<Form> {
    if j.n == 0 {
        return Err(Error::Input("n: must be at least 1".into()));
    }
    if j.k > 4 * j.n {
        return Err(Error::Input(format!("k: {} exceeds 4n = {}", j.k, 4 * j.n)));
    }
    let mut out = Form::zero(j.n, j.k);
    for (t, term) in j.terms.iter().enumerate() {
        let at = format!("terms[{t}]");
        if term.idx.len() != j.k {
            return Err(Error::Input(format!("{at}.idx: expected {} indices, got {}", j.k, term.idx.len())));
        }
        if let Some(bad) = term.idx.iter().find(|&&i| i >= 4 * j.n) {
            return Err(Error::Input(format!("{at}.idx: index {bad} out of range for n = {}", j.n)));
        }
        let (m, sign) = MultiIndex::from_unsorted(&term.idx)
            .ok_or_else(|| Error::Input(format!("{at}.idx: repeated index")))?;
        let p = poly_from_json(4 * j.n, &term.coeff, &format!("{at}.coeff"))?;
        out.add_term(m, p.scale(&crate::linalg::q(sign)));
    }
    Ok(out)
}

fn parse<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))
}

pub fn form_to_string(a: &Form) -> String {
    serde_json::to_string(&form_to_json(a)).expect("serializable")
}

pub fn form_from_str(s: &str) -> Result<Form> {
    form_from_json(&parse(s)?)
}

pub fn qfunction_to_json(f: &QFunction) -> QFunctionJson {
    QFunctionJson { n: f.n, components: f.components.iter().map(poly_to_json).collect() }
}

pub fn qfunction_from_json(j: &QFunctionJson) -> Result<QFunction> {
    if j.n == 0 {
        return Err(Error::Input("n: must be at least 1".into()));
    }
    if j.components.len() != 4 {
        return Err(Error::Input(format!("components: expected 4 polynomials, got {}", j.components.len())));
    }
    let mut comps = Vec::with_capacity(4);
    for (u, c) in j.components.iter().enumerate() {
        comps.push(poly_from_json(4 * j.n, c, &format!("components[{u}]"))?);
    }
    QFunction::new(j.n, comps.try_into().expect("four components"))
}

pub fn qfunction_to_string(f: &QFunction) -> String {
    serde_json::to_string(&qfunction_to_json(f)).expect("serializable")
}

pub fn qfunction_from_str(s: &str) -> Result<QFunction> {
    qfunction_from_json(&parse(s)?)
}
