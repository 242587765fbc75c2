//! Browser bindings for three `qdc-core` operations: the E_{k,r} table, the
//! symbol ellipticity verdicts and the q-holomorphy check.
//!
//! Each operation is a plain function returning a JSON string so it can be
//! exercised natively; the `#[wasm_bindgen]` wrappers convert errors to JS.

use serde_json::json;
use wasm_bindgen::prelude::*;

use qdc_core::decomposition::decomposition_table;
use qdc_core::json::{form_to_json, qfunction_from_str};
use qdc_core::linalg::parse_q;
use qdc_core::qholo::cauchy_riemann;
use qdc_core::symbol::ellipticity_report;

/// Largest n accepted by the table.
pub const MAX_TABLE_N: usize = 16;
/// Largest n accepted by the ellipticity check, which is exact linear algebra on Λ(ℝ^{4n}).
pub const MAX_ELLIPTICITY_N: usize = 3;

fn check_n(n: usize, max: usize) -> Result<(), String> {
    if (1..=max).contains(&n) {
        Ok(())
    } else {
        Err(format!("n must be between 1 and {max}, got {n}"))
    }
}

/// Rows `{k, r, epsilon, dim}` of the Casimir decomposition of Λ^k(ℍ^n).
pub fn table_json(n: usize) -> Result<String, String> {
    check_n(n, MAX_TABLE_N)?;
    Ok(json!({ "n": n, "rows": decomposition_table(n) }).to_string())
}

/// Exactness of the symbol sequence at every diagonal node. An empty `xi` means e^0.
pub fn ellipticity_json(n: usize, xi: &str) -> Result<String, String> {
    check_n(n, MAX_ELLIPTICITY_N)?;
    let xi = if xi.trim().is_empty() {
        None
    } else {
        let parsed = xi
            .split(',')
            .enumerate()
            .map(|(i, s)| parse_q(s.trim()).ok_or_else(|| format!("ξ entry {i}: {:?} is not a rational", s.trim())))
            .collect::<Result<Vec<_>, _>>()?;
        Some(parsed)
    };
    let rep = ellipticity_report(n, xi.as_deref()).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(&rep).map_err(|e| e.to_string())?;
    v["all_match"] = rep.all_match().into();
    Ok(v.to_string())
}

/// Cauchy–Riemann residual of a quaternion-valued polynomial function.
pub fn qholo_json(function: &str) -> Result<String, String> {
    let f = qfunction_from_str(function).map_err(|e| e.to_string())?;
    let residual = cauchy_riemann(&f);
    Ok(json!({ "q_holomorphic": residual.is_zero(), "residual": form_to_json(&residual) }).to_string())
}

#[wasm_bindgen(js_name = decompositionTable)]
pub fn decomposition_table_js(n: usize) -> Result<String, JsError> {
    table_json(n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = ellipticity)]
pub fn ellipticity_js(n: usize, xi: &str) -> Result<String, JsError> {
    ellipticity_json(n, xi).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = qholoCheck)]
pub fn qholo_check_js(function: &str) -> Result<String, JsError> {
    qholo_json(function).map_err(|e| JsError::new(&e))
}
