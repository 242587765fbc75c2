//! Quaternion-valued functions and forms under the diagonal action
//! `𝓘(α) = I(α) - α·i`, `𝓙(α) = J(α) - α·j`, `𝓚(α) = K(α) - α·k`.
//!
//! Coordinates on `H ⊗ Λ^k` put component `u` (of `1, i, j, k`) at offset
//! `u * dim Λ^k`.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock};

use serde::Serialize;

use crate::cache::Cache;
use crate::decomposition::{casimir_eigenvalue, eigenspace, epsilon, weights_present, GridNode};
use crate::error::{Error, Result};
use crate::form::{lambda, Form};
use crate::linalg::{joint_kernel, kernel_of_columns, q, q_frac, same_span, Echelon, SparseVec};
use crate::poly::{monomials_up_to, Monomial, Poly};
use crate::quaternion::{unit_mul, QForm, Unit};
use crate::sp1::{act, apply_columns, generator_columns, Generator, Support};
use crate::symbol::wedge_index_coords;

/// `f = f_0 + f_1 i + f_2 j + f_3 k` with polynomial components on `R^{4n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFunction {
    pub n: usize,
    pub components: [Poly; 4],
}

impl QFunction {
    pub fn new(n: usize, components: [Poly; 4]) -> Result<Self> {
        if components.iter().any(|p| p.nvars() != 4 * n) {
            return Err(Error::Input(format!("components must be polynomials in {} variables", 4 * n)));
        }
        Ok(Self { n, components })
    }

    pub fn constant(n: usize, c: [i64; 4]) -> Self {
        Self { n, components: c.map(|x| Poly::constant(4 * n, q(x))) }
    }

    /// `f(q) = q` on the first block.
    pub fn identity(n: usize) -> Self {
        Self { n, components: std::array::from_fn(|u| Poly::var(4 * n, u)) }
    }

    /// The quaternion-valued 1-form `df`.
    pub fn differential(&self) -> QForm {
        let comps = self.components.clone().map(|p| Form::from_coeff(self.n, crate::form::MultiIndex::from_bits(0), p).d());
        QForm::new(comps).expect("components share n and k")
    }
}

/// `df_0 + I(df_1) + J(df_2) + K(df_3)`; zero exactly for q-holomorphic `f`.
pub fn cauchy_riemann(f: &QFunction) -> Form {
    let df = f.differential();
    let mut out = df.component(0).clone();
    for g in Generator::ALL {
        out = out.add(&act(g, df.component(g.unit_index())));
    }
    out
}

pub fn is_q_holomorphic(f: &QFunction) -> bool {
    cauchy_riemann(f).is_zero()
}

fn unit_of(g: Generator) -> Unit {
    Unit { sign: 1, index: g.unit_index() }
}

/// `g(α) - α·u_g`.
pub fn script_act(g: Generator, a: &QForm) -> QForm {
    a.map(|f| act(g, f)).sub(&a.right_mul(unit_of(g)))
}

pub fn script_casimir(a: &QForm) -> QForm {
    Generator::ALL
        .iter()
        .fold(QForm::zero(a.n(), a.k()), |acc, &g| acc.add(&script_act(g, &script_act(g, a))))
}

/// Columns of a script generator on `H ⊗ Λ^k`.
fn script_columns(n: usize, k: usize, g: Generator) -> Arc<Vec<SparseVec>> {
    static CACHE: LazyLock<Cache<(usize, usize, Generator), Vec<SparseVec>>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k, g), || {
        let dim = lambda(n, k).dim();
        let cols = generator_columns(n, k, g, Support::all(n));
        let mut out = Vec::with_capacity(4 * dim);
        for u in 0..4 {
            let (s, c) = unit_mul(u, g.unit_index());
            for (p, col) in cols.iter().enumerate() {
                let v = col.remap(|i| Some(u * dim + i)).axpy(&q(-s), &SparseVec::unit(c * dim + p));
                out.push(v);
            }
        }
        out
    })
}

fn script_casimir_columns(n: usize, k: usize) -> Arc<Vec<SparseVec>> {
    static CACHE: LazyLock<Cache<(usize, usize), Vec<SparseVec>>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k), || {
        let gens: Vec<_> = Generator::ALL.iter().map(|&g| script_columns(n, k, g)).collect();
        (0..4 * lambda(n, k).dim())
            .map(|j| gens.iter().fold(SparseVec::new(), |acc, g| acc.add(&apply_columns(g, &g[j]))))
            .collect()
    })
}

/// Real Casimir acting on the form part of every component.
fn form_casimir_columns(n: usize, k: usize) -> Vec<SparseVec> {
    let dim = lambda(n, k).dim();
    let c = crate::sp1::casimir_columns(n, k, Support::all(n));
    (0..4).flat_map(|u| c.iter().map(move |col| col.remap(move |i| Some(u * dim + i)))).collect()
}

/// `H ⊗ E_{k,r}` split by script weight `s ∈ {r + 1, r - 1}`.
pub fn hq_summand(n: usize, k: usize, r: usize, s: usize) -> Arc<Vec<SparseVec>> {
    static CACHE: LazyLock<Cache<(usize, usize, usize, usize), Vec<SparseVec>>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k, r, s), || {
        let dim = 4 * lambda(n, k).dim();
        let form = form_casimir_columns(n, k);
        let script = script_casimir_columns(n, k);
        joint_kernel(
            &[(form.as_slice(), q(-casimir_eigenvalue(r as i64))), (script.as_slice(), q(-casimir_eigenvalue(s as i64)))],
            dim,
        )
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HqSplit {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub epsilon: i64,
    /// Dimension of the `V_{r+1}` summand, eigenvalue `-(r+1)(r+3)`.
    pub upper: usize,
    /// Dimension of the `V_{r-1}` summand, eigenvalue `-(r-1)(r+1)`.
    pub lower: usize,
    pub expected_upper: usize,
    pub expected_lower: usize,
    pub total: usize,
}

impl HqSplit {
    pub fn passed(&self) -> bool {
        self.upper == self.expected_upper
            && self.lower == self.expected_lower
            && self.upper + self.lower == self.total
    }
}

pub fn hq_split(n: usize, k: usize, r: usize) -> Result<HqSplit> {
    let node = GridNode::new(k, r).validate(n)?;
    let eps = node.epsilon(n);
    let upper = hq_summand(n, k, r, r + 1).len();
    let lower = if r >= 1 { hq_summand(n, k, r, r - 1).len() } else { 0 };
    Ok(HqSplit {
        n,
        k,
        r,
        epsilon: eps,
        upper,
        lower,
        expected_upper: 2 * (r + 2) * eps as usize,
        expected_lower: 2 * r * eps as usize,
        total: 4 * eigenspace(n, k, r).dim(),
    })
}

/// Every node of the grid for `n`.
pub fn hq_split_all(n: usize) -> Result<Vec<HqSplit>> {
    let mut out = Vec::new();
    for k in 0..=4 * n {
        for r in weights_present(n, k) {
            out.push(hq_split(n, k, r)?);
        }
    }
    Ok(out)
}

/// `[𝓐, 𝓑] = 2𝓒` for cyclic `(A, B, C)` on every basis element of `H ⊗ Λ^k`.
pub fn script_brackets_hold(n: usize) -> bool {
    (0..=4 * n).all(|k| {
        lambda(n, k).indices().iter().all(|&m| {
            (0..4).all(|u| {
                let a = QForm::from_component(&Form::basis(n, m), u);
                Generator::ALL.iter().all(|&x| {
                    Generator::ALL.iter().all(|&y| {
                        let lhs = script_act(x, &script_act(y, &a)).sub(&script_act(y, &script_act(x, &a)));
                        match x.bracket(y) {
                            Some((c, z)) => lhs == script_act(z, &a).scale(&q(c)),
                            None => lhs.is_zero(),
                        }
                    })
                })
            })
        })
    })
}

fn flatten(a: &QForm, monos: &HashMap<Monomial, usize>) -> SparseVec {
    let dim = lambda(a.n(), a.k()).dim();
    let block = 4 * dim;
    let mut out = SparseVec::new();
    for u in 0..4 {
        for (m, v) in a.component(u).by_monomial() {
            let slot = monos[&m];
            out = out.add(&v.remap(|i| Some(slot * block + u * dim + i)));
        }
    }
    out
}

/// Over all `f` with components of degree `<= max_deg`: `f` is q-holomorphic
/// exactly when `df` is an eigenvector of the script Casimir with eigenvalue `-8`.
#[derive(Clone, Debug, Serialize)]
pub struct HolomorphyEquivalence {
    pub n: usize,
    pub max_deg: u32,
    pub function_space_dim: usize,
    pub holomorphic_dim: usize,
    pub v2_dim: usize,
    pub equal: bool,
}

pub fn holomorphy_equivalence(n: usize, max_deg: u32) -> HolomorphyEquivalence {
    let nvars = 4 * n;
    let monos = monomials_up_to(nvars, max_deg);
    let index: HashMap<Monomial, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut cr_cols = Vec::new();
    let mut v2_cols = Vec::new();
    for u in 0..4 {
        for m in &monos {
            let mut comps: [Poly; 4] = std::array::from_fn(|_| Poly::zero(nvars));
            comps[u] = Poly::monomial(m.clone(), q(1));
            let f = QFunction { n, components: comps };
            let cr = QForm::real(&cauchy_riemann(&f));
            cr_cols.push(flatten(&cr, &index));
            let df = f.differential();
            let shifted = script_casimir(&df).add(&df.scale(&q(8)));
            v2_cols.push(flatten(&shifted, &index));
        }
    }
    let holo = kernel_of_columns(&cr_cols);
    let v2 = kernel_of_columns(&v2_cols);
    HolomorphyEquivalence {
        n,
        max_deg,
        function_space_dim: cr_cols.len(),
        holomorphic_dim: holo.len(),
        v2_dim: v2.len(),
        equal: same_span(&holo, &v2),
    }
}

/// Script-weight spaces `F_{k,s}` of `H ⊗ Λ^k`.
fn script_weights(n: usize, k: usize) -> Vec<usize> {
    let mut s: Vec<usize> = weights_present(n, k).into_iter().flat_map(|r| [Some(r + 1), r.checked_sub(1)]).flatten().collect();
    s.sort_unstable();
    s.dedup();
    s
}

fn script_space(n: usize, k: usize, s: usize) -> Arc<Vec<SparseVec>> {
    static CACHE: LazyLock<Cache<(usize, usize, usize), Vec<SparseVec>>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k, s), || {
        let script = script_casimir_columns(n, k);
        joint_kernel(&[(script.as_slice(), q(-casimir_eigenvalue(s as i64)))], 4 * lambda(n, k).dim())
    })
}

fn script_project(n: usize, k: usize, s: usize, v: &SparseVec) -> SparseVec {
    let weights = script_weights(n, k);
    if !weights.contains(&s) {
        return SparseVec::new();
    }
    let c = script_casimir_columns(n, k);
    let target = casimir_eigenvalue(s as i64);
    weights.iter().filter(|&&o| o != s).fold(v.clone(), |acc, &o| {
        let other = casimir_eigenvalue(o as i64);
        apply_columns(&c, &acc).axpy(&q(-other), &acc).scale(&q_frac(1, target - other))
    })
}

fn quaternion_symbol_rank(n: usize, k: usize, s: usize) -> usize {
    if k + 1 > 4 * n {
        return 0;
    }
    let dim = lambda(n, k).dim();
    let images: Vec<SparseVec> = script_space(n, k, s)
        .iter()
        .map(|v| {
            let wedged = (0..4).fold(SparseVec::new(), |acc, u| {
                let part = v.iter().filter(|(i, _)| i / dim == u).map(|(i, c)| (i % dim, c.clone()));
                let part = wedge_index_coords(n, k, &SparseVec::from_entries(part), 0);
                acc.add(&part.remap(|i| Some(u * lambda(n, k + 1).dim() + i)))
            });
            script_project(n, k + 1, s + 1, &wedged)
        })
        .collect();
    Echelon::from_vectors(&images).rank()
}

#[derive(Clone, Debug, Serialize)]
pub struct QuaternionSymbolRow {
    pub k: usize,
    pub s: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuaternionSymbolReport {
    pub n: usize,
    pub rows: Vec<QuaternionSymbolRow>,
}

impl QuaternionSymbolReport {
    pub fn all_exact(&self) -> bool {
        self.rows.iter().all(|r| r.exact)
    }
}

/// Exactness of `F_{k-1,s-1} → F_{k,s} → F_{k+1,s+1}` under `α ↦ π(α ∧ e^0)`
/// at every node of the quaternion-valued grid of `H^1`.
pub fn qholo_symbol_ellipticity(n: usize) -> Result<QuaternionSymbolReport> {
    if n != 1 {
        return Err(Error::Domain("the quaternion-valued symbol report is defined for n = 1".into()));
    }
    let mut rows = Vec::new();
    for k in 0..=4 * n {
        for s in script_weights(n, k) {
            let dim = script_space(n, k, s).len();
            if dim == 0 {
                continue;
            }
            let rank_out = quaternion_symbol_rank(n, k, s);
            let rank_in = if k >= 1 && s >= 1 { quaternion_symbol_rank(n, k - 1, s - 1) } else { 0 };
            rows.push(QuaternionSymbolRow { k, s, dim, rank_in, rank_out, exact: dim - rank_out == rank_in });
        }
    }
    Ok(QuaternionSymbolReport { n, rows })
}

/// `ε`-weighted expectation for `dim F_{k,s}`.
pub fn script_space_dim_formula(n: usize, k: usize, s: usize) -> usize {
    let up = if s >= 1 { 2 * (s + 1) * epsilon(n, k, s as i64 - 1).max(0) as usize } else { 0 };
    let down = 2 * (s + 1) * epsilon(n, k, s as i64 + 1).max(0) as usize;
    up + down
}
