//! The principal symbol of `D'`, the fine spaces `E^{l,m}_{k,r}`, lie-in
//! conditions and ellipticity verdicts.
//!
//! The symbol direction is `ξ = e^0` unless stated otherwise. The block
//! `H_0 = span(e^0..e^3)` is the distinguished one; `l` counts indices in it
//! and `m` is the weight under the `sp(1)` action restricted to the other
//! blocks.

use std::sync::{Arc, LazyLock};

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::Cache;
use crate::decomposition::{casimir_eigenvalue, eigenspace, epsilon, lies_in, project, sectors, sector_eigenvectors};
use crate::error::{Error, Result};
use crate::form::{lambda, Form, MultiIndex};
use crate::linalg::{fmt_q, kernel_of_columns, q, q_frac, same_span, Echelon, SparseVec, Q};
use crate::sp1::{act, act_on_one_form, apply_columns, casimir_columns, generator_columns, Generator, Support};

/// `v ∧ e^i` in coordinates, `v ∈ Λ^k`.
pub fn wedge_index_coords(n: usize, k: usize, v: &SparseVec, i: usize) -> SparseVec {
    if k + 1 > 4 * n {
        return SparseVec::new();
    }
    let (src, dst) = (lambda(n, k), lambda(n, k + 1));
    let e = MultiIndex::single(i);
    SparseVec::from_entries(v.iter().filter_map(|(p, c)| {
        let m = src.index(*p);
        m.wedge_sign(e).map(|s| (dst.position(m.union(e)), c * q(s)))
    }))
}

/// `σ(α) = (1/(2(r+1))) ((r+2) α e^0 - I(α) e^1 - J(α) e^2 - K(α) e^3)` in coordinates.
pub fn symbol_coords(n: usize, k: usize, r: usize, v: &SparseVec) -> SparseVec {
    if k + 1 > 4 * n {
        return SparseVec::new();
    }
    let mut acc = wedge_index_coords(n, k, v, 0).scale(&q(r as i64 + 2));
    for g in Generator::ALL {
        let gv = apply_columns(&generator_columns(n, k, g, Support::all(n)), v);
        acc = acc.sub(&wedge_index_coords(n, k, &gv, g.unit_index()));
    }
    acc.scale(&q_frac(1, 2 * (r as i64 + 1)))
}

fn require_member(alpha: &Form, r: usize) -> Result<()> {
    if !alpha.is_constant() {
        return Err(Error::Input("the symbol acts on constant-coefficient forms".into()));
    }
    if r > alpha.k() || (alpha.k() - r) % 2 != 0 || !lies_in(alpha, r) {
        return Err(Error::Domain(format!("form does not lie in E_({},{})", alpha.k(), r)));
    }
    Ok(())
}

/// The symbol of `D'` at `ξ = e^0` by its closed formula.
pub fn symbol_up(alpha: &Form, r: usize) -> Result<Form> {
    require_member(alpha, r)?;
    let n = alpha.n();
    let mut out = alpha.wedge(&Form::e(n, &[0]))?.scale(&q(r as i64 + 2));
    for g in Generator::ALL {
        out = out.sub(&act(g, alpha).wedge(&Form::e(n, &[g.unit_index()]))?);
    }
    let out = out.scale(&q_frac(1, 2 * (r as i64 + 1)));
    if !lies_in(&out, r + 1) {
        return Err(Error::Invariant("symbol image left E_(k+1,r+1)".into()));
    }
    Ok(out)
}

/// `π_{k+1,r+1}(α ∧ ξ)`, defaulting to `ξ = e^0`.
pub fn symbol_via_projection(alpha: &Form, r: usize, xi: Option<&Form>) -> Result<Form> {
    require_member(alpha, r)?;
    let e0 = Form::e(alpha.n(), &[0]);
    let xi = xi.unwrap_or(&e0);
    if xi.k() != 1 || !xi.is_constant() || xi.is_zero() {
        return Err(Error::Input("ξ must be a nonzero constant 1-form".into()));
    }
    Ok(project(&alpha.wedge(xi)?, r + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Duality {
    SelfDual,
    AntiSelfDual,
}

/// Label of a fine space `E^{l,m}_{k,r}` (with `±` for `l = 2, m = r`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FineNode {
    pub k: usize,
    pub r: usize,
    pub l: usize,
    pub m: usize,
    pub part: Option<Duality>,
}

impl FineNode {
    pub fn new(k: usize, r: usize, l: usize, m: usize) -> Self {
        Self { k, r, l, m, part: None }
    }

    pub fn with_part(self, part: Duality) -> Self {
        Self { part: Some(part), ..self }
    }

    pub fn is_admissible(&self) -> bool {
        let (r, m) = (self.r as i64, self.m as i64);
        let shape = match self.l {
            0 | 4 => m == r,
            1 | 3 => (m - r).abs() == 1,
            2 => m == r || (m - r).abs() == 2,
            _ => false,
        };
        let part_ok = self.part.is_none() || (self.l == 2 && m == r);
        shape && part_ok && self.r <= self.k && (self.k - self.r) % 2 == 0 && self.l <= self.k
    }

    /// Admissible `(l, m)` labels for `(k, r)`; `l = 2, m = r` appears split.
    pub fn all_for(k: usize, r: usize) -> Vec<FineNode> {
        let mut out = Vec::new();
        let ms = |l: usize| -> Vec<i64> {
            let r = r as i64;
            match l {
                0 | 4 => vec![r],
                1 | 3 => vec![r + 1, r - 1],
                _ => vec![r + 2, r, r - 2],
            }
        };
        for l in 0..=4usize.min(k) {
            for m in ms(l) {
                if m < 0 {
                    continue;
                }
                let node = FineNode::new(k, r, l, m as usize);
                if l == 2 && m as usize == r {
                    out.push(node.with_part(Duality::SelfDual));
                    out.push(node.with_part(Duality::AntiSelfDual));
                } else {
                    out.push(node);
                }
            }
        }
        out.retain(FineNode::is_admissible);
        out
    }
}

/// `E^{l,m}_{k,r}`: vectors of `E_{k,r}` with exactly `l` indices in `H_0`
/// and weight `m` under the action on the remaining blocks.
pub fn fine_space(n: usize, node: FineNode) -> Result<Arc<Vec<SparseVec>>> {
    if !node.is_admissible() {
        return Err(Error::Domain(format!("inadmissible fine node {node:?}")));
    }
    static CACHE: LazyLock<Cache<(usize, FineNode), Vec<SparseVec>>> = LazyLock::new(Cache::new);
    Ok(CACHE.get_or_init(&(n, node), || {
        let FineNode { k, r, l, m, part } = node;
        if k > 4 * n {
            return Vec::new();
        }
        let sec = sectors(n, k);
        let full = casimir_columns(n, k, Support::all(n));
        let tail = casimir_columns(n, k, Support::tail(n));
        let head = casimir_columns(n, k, Support::head());
        let mut out = Vec::new();
        for (g, (counts, _)) in sec.groups.iter().enumerate() {
            if counts[0] as usize != l {
                continue;
            }
            let mut rows: Vec<(&[SparseVec], i64)> =
                vec![(tail.as_slice(), -casimir_eigenvalue(m as i64)), (full.as_slice(), -casimir_eigenvalue(r as i64))];
            match part {
                Some(Duality::SelfDual) => rows.push((head.as_slice(), 8)),
                Some(Duality::AntiSelfDual) => rows.push((head.as_slice(), 0)),
                None => {}
            }
            out.extend(sector_eigenvectors(&sec, g, &rows));
        }
        out
    }))
}

/// Fine space for possibly out-of-range labels; empty when the label does not exist.
pub fn fine_space_or_empty(n: usize, k: i64, r: i64, l: usize, m: i64, part: Option<Duality>) -> Arc<Vec<SparseVec>> {
    if k < 0 || r < 0 || m < 0 {
        return Arc::new(Vec::new());
    }
    let node = FineNode { k: k as usize, r: r as usize, l, m: m as usize, part };
    fine_space(n, node).unwrap_or_else(|_| Arc::new(Vec::new()))
}

/// Closed-form dimension of a fine space.
pub fn fine_dim_formula(n: usize, node: FineNode) -> usize {
    let (k, r, l, m) = (node.k as i64, node.r as i64, node.l as i64, node.m as i64);
    let eps = epsilon(n - 1, (k - l).max(0) as usize, m).max(0) as usize;
    if k - l < 0 {
        return 0;
    }
    let r1 = (r + 1) as usize;
    match (node.l, node.part) {
        (0, _) | (4, _) => r1 * eps,
        (1, _) | (3, _) => 2 * r1 * eps,
        (2, Some(Duality::SelfDual)) => r1 * eps * usize::from(m >= 1),
        (2, Some(Duality::AntiSelfDual)) => 3 * r1 * eps,
        (2, None) if m == r => r1 * eps * (usize::from(m >= 1) + 3),
        (2, None) => r1 * eps,
        _ => 0,
    }
}

/// The five lie-in systems: `l = 1` pieces of `V_m ⊗ V_1` and `l = 2` pieces of `V_m ⊗ V_2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LieInCase {
    OneUp,
    OneDown,
    TwoUp,
    TwoMid,
    TwoDown,
}

impl LieInCase {
    pub const ALL: [LieInCase; 5] = [LieInCase::OneUp, LieInCase::OneDown, LieInCase::TwoUp, LieInCase::TwoMid, LieInCase::TwoDown];

    pub fn l(self) -> usize {
        match self {
            LieInCase::OneUp | LieInCase::OneDown => 1,
            _ => 2,
        }
    }

    /// Weight of the target summand, or `None` if it does not exist.
    pub fn target_weight(self, m: usize) -> Option<usize> {
        match self {
            LieInCase::OneUp => Some(m + 1),
            LieInCase::OneDown => m.checked_sub(1),
            LieInCase::TwoUp => Some(m + 2),
            LieInCase::TwoMid => Some(m),
            LieInCase::TwoDown => m.checked_sub(2),
        }
    }

    /// Diagonal coefficient `c` of the system, as derived from the Casimir.
    ///
    /// `l = 1`: `c α_i + Σ g(α_j) [g(e^j) = ±e^i] = 0`.
    /// `l = 2`: `c β_i = X_i` with `X_1 = J(β_3) - K(β_2)` and cyclic.
    pub fn coefficient(self, m: usize) -> i64 {
        let m = m as i64;
        match self {
            LieInCase::OneUp => m,
            LieInCase::OneDown => -(m + 2),
            LieInCase::TwoUp => -m,
            LieInCase::TwoMid => 2,
            LieInCase::TwoDown => m + 2,
        }
    }

    /// The `l = 2` coefficients in the form they are often quoted (`m+4` and `2-m`
    /// for the outer summands); kept to show those systems are inconsistent.
    pub fn quoted_coefficient(self, m: usize) -> i64 {
        let m = m as i64;
        match self {
            LieInCase::TwoUp => m + 4,
            LieInCase::TwoDown => 2 - m,
            other => other.coefficient(m as usize),
        }
    }
}

impl std::str::FromStr for LieInCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one_up" => Ok(LieInCase::OneUp),
            "one_down" => Ok(LieInCase::OneDown),
            "two_up" => Ok(LieInCase::TwoUp),
            "two_mid" => Ok(LieInCase::TwoMid),
            "two_down" => Ok(LieInCase::TwoDown),
            other => Err(Error::Input(format!("unknown lie-in case {other:?}"))),
        }
    }
}

fn omega_plus(n: usize, j: usize) -> Form {
    match j {
        1 => Form::e(n, &[0, 1]).add(&Form::e(n, &[2, 3])),
        2 => Form::e(n, &[0, 2]).add(&Form::e(n, &[3, 1])),
        _ => Form::e(n, &[0, 3]).add(&Form::e(n, &[1, 2])),
    }
}

#[derive(Clone, Debug)]
pub struct LieInSolution {
    pub case: LieInCase,
    pub k_base: usize,
    pub m: usize,
    pub base_dim: usize,
    /// Each solution as a tuple of base forms (4 for `l = 1`, 3 for `l = 2`), in `Λ^{k_base}` coordinates.
    pub solutions: Vec<Vec<SparseVec>>,
}

impl LieInSolution {
    pub fn dim(&self) -> usize {
        self.solutions.len()
    }

    /// `Σ α_j ∧ e^j` (`l = 1`) or `Σ β_j ∧ ω_j^+` (`l = 2`) for every solution.
    pub fn assembled(&self, n: usize) -> Vec<SparseVec> {
        self.solutions
            .iter()
            .map(|t| {
                let mut f = Form::zero(n, self.k_base + self.case.l());
                for (s, v) in t.iter().enumerate() {
                    let a = Form::from_coords(n, self.k_base, v);
                    let piece = if self.case.l() == 1 { Form::e(n, &[s]) } else { omega_plus(n, s + 1) };
                    f = f.add(&a.wedge(&piece).expect("same n"));
                }
                f.to_coords().expect("constant")
            })
            .collect()
    }
}

/// Solve a lie-in system with diagonal coefficient `c` over `E^0_{k_base,m}`.
pub fn solve_lie_in(n: usize, case: LieInCase, k_base: usize, m: usize, c: i64) -> Result<LieInSolution> {
    let base = fine_space(n, FineNode::new(k_base, m, 0, m))?;
    let dim = lambda(n, k_base).dim();
    let gens: Vec<_> = Generator::ALL.iter().map(|g| generator_columns(n, k_base, *g, Support::all(n))).collect();
    let slots = if case.l() == 1 { 4 } else { 3 };
    let c = q(c);
    // Columns indexed by (slot, base vector); rows by (equation, coordinate).
    let mut cols = Vec::with_capacity(slots * base.len());
    for s in 0..slots {
        for b in base.iter() {
            let mut col = SparseVec::new();
            let mut add = |row: usize, v: &SparseVec, coef: &Q| {
                col = col.axpy(coef, &v.remap(|p| Some(row * dim + p)));
            };
            add(s, b, &c);
            if case.l() == 1 {
                for (gi, g) in Generator::ALL.iter().enumerate() {
                    let (i, sign) = act_on_one_form(*g, s, 1).expect("head index");
                    add(i, &apply_columns(&gens[gi], b), &q(sign));
                }
            } else {
                // X_1 = J β_3 - K β_2, X_2 = K β_1 - I β_3, X_3 = I β_2 - J β_1 (slots 0..3 hold β_1..β_3).
                let terms: [(usize, usize, i64); 2] = match s {
                    0 => [(1, 2, 1), (2, 1, -1)],
                    1 => [(0, 2, -1), (2, 0, 1)],
                    _ => [(0, 1, 1), (1, 0, -1)],
                };
                for (row, gi, sign) in terms {
                    add(row, &apply_columns(&gens[gi], b), &q(-sign));
                }
            }
            cols.push(col);
        }
    }
    let solutions = kernel_of_columns(&cols)
        .into_iter()
        .map(|x| {
            (0..slots)
                .map(|s| {
                    let mut v = SparseVec::new();
                    for (j, b) in base.iter().enumerate() {
                        let coef = x.get(s * base.len() + j);
                        if !coef.is_zero() {
                            v = v.axpy(&coef, b);
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    Ok(LieInSolution { case, k_base, m, base_dim: base.len(), solutions })
}

/// Solution space of the lie-in system for `case` over `E^0_{k_base,m}`.
pub fn lie_in_solution_space(n: usize, case: LieInCase, k_base: usize, m: usize) -> Result<LieInSolution> {
    solve_lie_in(n, case, k_base, m, case.coefficient(m))
}

/// Fine space the assembled solutions of `case` should span.
pub fn lie_in_target(n: usize, case: LieInCase, k_base: usize, m: usize) -> Arc<Vec<SparseVec>> {
    let Some(r) = case.target_weight(m) else {
        return Arc::new(Vec::new());
    };
    let k = (k_base + case.l()) as i64;
    let part = (case == LieInCase::TwoMid).then_some(Duality::SelfDual);
    fine_space_or_empty(n, k, r as i64, case.l(), m as i64, part)
}

#[derive(Clone, Debug, Serialize)]
pub struct LieInReport {
    pub case: LieInCase,
    pub k_base: usize,
    pub m: usize,
    pub solution_dim: usize,
    pub expected_dim: usize,
    pub spans_target: bool,
    /// `two_mid` only: solutions are exactly `(I, J, K)(β_0)`.
    pub matches_ijk: Option<bool>,
}

pub fn lie_in_report(n: usize, case: LieInCase, k_base: usize, m: usize) -> Result<LieInReport> {
    let sol = lie_in_solution_space(n, case, k_base, m)?;
    let target = lie_in_target(n, case, k_base, m);
    let spans_target = same_span(&sol.assembled(n), &target);
    let matches_ijk = (case == LieInCase::TwoMid).then(|| {
        let base = fine_space(n, FineNode::new(k_base, m, 0, m)).expect("admissible");
        let dim = lambda(n, k_base).dim();
        let flat = |t: &[SparseVec]| {
            t.iter().enumerate().fold(SparseVec::new(), |acc, (s, v)| acc.add(&v.remap(|p| Some(s * dim + p))))
        };
        let ijk: Vec<SparseVec> = base
            .iter()
            .map(|b| {
                let t: Vec<SparseVec> = Generator::ALL
                    .iter()
                    .map(|g| apply_columns(&generator_columns(n, k_base, *g, Support::all(n)), b))
                    .collect();
                flat(&t)
            })
            .collect();
        let sols: Vec<SparseVec> = sol.solutions.iter().map(|t| flat(t)).collect();
        same_span(&sols, &ijk)
    });
    Ok(LieInReport { case, k_base, m, solution_dim: sol.dim(), expected_dim: target.len(), spans_target, matches_ijk })
}

/// `ker σ` on `E^1_{k-1,r-1}` against `{α_0 e^0 - (1/r) Σ g(α_0) e^g : α_0 ∈ E^0_{k-2,r-2}}`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelCharacterization {
    pub k: usize,
    pub r: usize,
    pub kernel_dim: usize,
    pub predicted_dim: usize,
    pub equal: bool,
}

pub fn kernel_characterization(n: usize, k: usize, r: usize) -> Result<KernelCharacterization> {
    if r == 0 || k < 2 || r > k || (k - r) % 2 != 0 {
        return Err(Error::Domain(format!("kernel characterization needs r >= 1 and a valid node, got ({k},{r})")));
    }
    let (k1, r1) = (k as i64 - 1, r as i64 - 1);
    let mut source: Vec<SparseVec> = Vec::new();
    for m in [r1 + 1, r1 - 1] {
        source.extend(fine_space_or_empty(n, k1, r1, 1, m, None).iter().cloned());
    }
    let images: Vec<SparseVec> = source.iter().map(|v| symbol_coords(n, k - 1, r - 1, v)).collect();
    let kernel: Vec<SparseVec> = kernel_of_columns(&images)
        .iter()
        .map(|x| x.iter().fold(SparseVec::new(), |acc, (j, c)| acc.axpy(c, &source[*j])))
        .collect();
    let base = fine_space_or_empty(n, k as i64 - 2, r as i64 - 2, 0, r as i64 - 2, None);
    let inv_r = q_frac(-1, r as i64);
    let predicted: Vec<SparseVec> = base
        .iter()
        .map(|a0| {
            let mut v = wedge_index_coords(n, k - 2, a0, 0);
            for g in Generator::ALL {
                let ga = apply_columns(&generator_columns(n, k - 2, g, Support::all(n)), a0);
                v = v.axpy(&inv_r, &wedge_index_coords(n, k - 2, &ga, g.unit_index()));
            }
            v
        })
        .collect();
    Ok(KernelCharacterization {
        k,
        r,
        kernel_dim: kernel.len(),
        predicted_dim: predicted.len(),
        equal: same_span(&kernel, &predicted),
    })
}

/// Ranks and exactness of one short sequence `0 → A → B → C → 0` of fine spaces.
#[derive(Clone, Debug, Serialize)]
pub struct ShortSequence {
    pub name: &'static str,
    pub labels: [String; 3],
    pub dims: [usize; 3],
    pub rank_ab: usize,
    pub rank_bc: usize,
    pub alternating_sum: i64,
    pub exact_at: [bool; 3],
    pub maps_into_targets: bool,
}

impl ShortSequence {
    pub fn exact(&self) -> bool {
        self.exact_at.iter().all(|x| *x)
    }
}

struct FineSpec {
    k: i64,
    r: i64,
    l: usize,
    m: i64,
}

impl FineSpec {
    fn label(&self) -> String {
        format!("E^{{{},{}}}_{{{},{}}}", self.l, self.m, self.k, self.r)
    }

    fn space(&self, n: usize) -> Arc<Vec<SparseVec>> {
        fine_space_or_empty(n, self.k, self.r, self.l, self.m, None)
    }
}

fn sigma_images(n: usize, spec: &FineSpec, vs: &[SparseVec]) -> Vec<SparseVec> {
    vs.iter().map(|v| symbol_coords(n, spec.k as usize, spec.r as usize, v)).collect()
}

fn short_sequence(n: usize, name: &'static str, specs: [FineSpec; 3]) -> ShortSequence {
    let spaces: Vec<Arc<Vec<SparseVec>>> = specs.iter().map(|s| s.space(n)).collect();
    let dims = [spaces[0].len(), spaces[1].len(), spaces[2].len()];
    let img_ab = sigma_images(n, &specs[0], &spaces[0]);
    let img_bc = sigma_images(n, &specs[1], &spaces[1]);
    let rank_ab = Echelon::from_vectors(&img_ab).rank();
    let rank_bc = Echelon::from_vectors(&img_bc).rank();
    let into_b = Echelon::from_vectors(spaces[1].iter());
    let into_c = Echelon::from_vectors(spaces[2].iter());
    let maps_into_targets = img_ab.iter().all(|v| into_b.contains(v)) && img_bc.iter().all(|v| into_c.contains(v));
    ShortSequence {
        name,
        labels: [specs[0].label(), specs[1].label(), specs[2].label()],
        dims,
        rank_ab,
        rank_bc,
        alternating_sum: dims[0] as i64 - dims[1] as i64 + dims[2] as i64,
        exact_at: [rank_ab == dims[0], dims[1] - rank_bc == rank_ab, rank_bc == dims[2]],
        maps_into_targets,
    }
}

/// The top, middle and bottom short sequences the symbol sequence splits into at `E_{k,r}`.
pub fn five_sequence_report(n: usize, k: usize, r: usize) -> Result<[ShortSequence; 3]> {
    if n < 2 || k < 2 || r > k || (k - r) % 2 != 0 {
        return Err(Error::Domain(format!("five-space sequence needs n >= 2, k >= 2 and a valid node, got n={n} ({k},{r})")));
    }
    let (k, r) = (k as i64, r as i64);
    let f = |k, r, l, m| FineSpec { k, r, l, m };
    Ok([
        short_sequence(n, "top", [f(k, r, 2, r + 2), f(k + 1, r + 1, 3, r + 2), f(k + 2, r + 2, 4, r + 2)]),
        short_sequence(n, "middle", [f(k - 1, r - 1, 1, r), f(k, r, 2, r), f(k + 1, r + 1, 3, r)]),
        short_sequence(n, "bottom", [f(k - 2, r - 2, 0, r - 2), f(k - 1, r - 1, 1, r - 2), f(k, r, 2, r - 2)]),
    ])
}

/// Rank of `σ: E_{k,r} → E_{k+1,r+1}` at `ξ = e^0`, computed sector by sector.
pub fn symbol_rank(n: usize, k: usize, r: usize) -> usize {
    static CACHE: LazyLock<Cache<(usize, usize, usize), usize>> = LazyLock::new(Cache::new);
    *CACHE.get_or_init(&(n, k, r), || {
        if k + 1 > 4 * n {
            return 0;
        }
        eigenspace(n, k, r)
            .by_sector
            .iter()
            .map(|vs| Echelon::from_vectors(&vs.iter().map(|v| symbol_coords(n, k, r, v)).collect::<Vec<_>>()).rank())
            .sum()
    })
}

/// Rank of `α ↦ π_{k+1,r+1}(α ∧ ξ)` on `E_{k,r}` for an arbitrary covector.
pub fn symbol_rank_xi(n: usize, k: usize, r: usize, xi: &Form) -> Result<usize> {
    if k + 1 > 4 * n {
        return Ok(0);
    }
    let images: Result<Vec<SparseVec>> = eigenspace(n, k, r)
        .vectors()
        .map(|v| symbol_via_projection(&Form::from_coords(n, k, v), r, Some(xi))?.to_coords())
        .collect();
    Ok(Echelon::from_vectors(&images?).rank())
}

/// Predicted verdict: the diagonal from `E_{2k0,0}` fails at `j = 0, 1` for
/// `k0 >= 2`, only at `j = 1` for `k0 = 1`, and nowhere for `k0 = 0`.
pub fn predicted_exact(k0: usize, j: usize) -> bool {
    !((k0 >= 2 && j <= 1) || (k0 == 1 && j == 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticityRow {
    pub k0: usize,
    pub k: usize,
    pub r: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub exact: bool,
    pub predicted: bool,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EllipticityReport {
    pub n: usize,
    pub xi: Vec<String>,
    pub rows: Vec<EllipticityRow>,
}

impl EllipticityReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k0,k,r,exact,predicted,match\n");
        for row in &self.rows {
            s.push_str(&format!("{},{},{},{},{},{}\n", row.k0, row.k, row.r, row.exact, row.predicted, row.matches));
        }
        s
    }
}

/// Every node of every diagonal `(2k0 + j, j)` with its exactness verdict.
pub fn diagonal_nodes(n: usize) -> Vec<(usize, usize)> {
    (0..=2 * n).flat_map(|k0| (0..=2 * n - k0).map(move |j| (k0, j))).collect()
}

/// Exactness of `E_{k-1,r-1} → E_{k,r} → E_{k+1,r+1}` along every diagonal.
/// With `xi = None` the symbol direction is `e^0`.
pub fn ellipticity_report(n: usize, xi: Option<&[Q]>) -> Result<EllipticityReport> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let xi_form = match xi {
        None => None,
        Some(c) => {
            if c.len() != 4 * n {
                return Err(Error::Input(format!("ξ needs {} components, got {}", 4 * n, c.len())));
            }
            let mut f = Form::zero(n, 1);
            for (i, x) in c.iter().enumerate() {
                f = f.add(&Form::e(n, &[i]).scale(x));
            }
            if f.is_zero() {
                return Err(Error::Input("ξ must be nonzero".into()));
            }
            Some(f)
        }
    };
    let nodes = diagonal_nodes(n);
    // Warm eigenspaces in parallel before the dependent rank computations.
    nodes.par_iter().for_each(|&(k0, j)| {
        eigenspace(n, 2 * k0 + j, j);
    });
    let rank = |k: usize, r: usize| -> Result<usize> {
        match &xi_form {
            None => Ok(symbol_rank(n, k, r)),
            Some(f) => symbol_rank_xi(n, k, r, f),
        }
    };
    let rows: Result<Vec<EllipticityRow>> = nodes
        .par_iter()
        .map(|&(k0, j)| {
            let (k, r) = (2 * k0 + j, j);
            let dim = eigenspace(n, k, r).dim();
            let rank_out = rank(k, r)?;
            let rank_in = if k >= 1 && r >= 1 { rank(k - 1, r - 1)? } else { 0 };
            let exact = dim - rank_out == rank_in;
            let predicted = predicted_exact(k0, j);
            Ok(EllipticityRow { k0, k, r, dim, rank_in, rank_out, exact, predicted, matches: exact == predicted })
        })
        .collect();
    let xi = match xi {
        None => {
            let mut v = vec!["0".to_string(); 4 * n];
            v[0] = "1".into();
            v
        }
        Some(c) => c.iter().map(fmt_q).collect(),
    };
    Ok(EllipticityReport { n, xi, rows: rows? })
}

/// The explicit non-exactness witnesses and the small-degree exact cases.
#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleReport {
    /// `α e^{0123}` for `α ∈ E^0_{k-4,0}`: lies in `E_{k,0}` and `σ` kills it.
    pub e0123_in_kernel: Vec<(usize, bool)>,
    /// `α e^{123}` for `α ∈ E^0_{k-2,0}`: lies in `E_{k+1,1}`, `σ` kills it and it is not in `σ(E_{k,0})`.
    pub e123_not_image: Vec<(usize, bool)>,
    pub injective_00: bool,
    pub injective_20: bool,
    pub exact_at_11: bool,
}

impl CounterexampleReport {
    pub fn passed(&self) -> bool {
        self.e0123_in_kernel.iter().all(|x| x.1)
            && self.e123_not_image.iter().all(|x| x.1)
            && self.injective_00
            && self.injective_20
            && self.exact_at_11
    }
}

pub fn counterexample_report(n: usize) -> Result<CounterexampleReport> {
    if n < 2 {
        return Err(Error::Domain("the counterexamples need n >= 2".into()));
    }
    let mut e0123_in_kernel = Vec::new();
    let mut k = 4;
    while k <= 4 * n - 1 {
        let base = fine_space_or_empty(n, k as i64 - 4, 0, 0, 0, None);
        if !base.is_empty() {
            let ok = base.iter().all(|a| {
                let f = Form::from_coords(n, k - 4, a).wedge(&Form::e(n, &[0, 1, 2, 3])).expect("same n");
                let v = f.to_coords().expect("constant");
                lies_in(&f, 0) && symbol_coords(n, k, 0, &v).is_zero() && !v.is_zero()
            });
            e0123_in_kernel.push((k, ok));
        }
        k += 2;
    }
    let mut e123_not_image = Vec::new();
    let mut k = 2;
    while k + 1 <= 4 * n - 1 {
        let base = fine_space_or_empty(n, k as i64 - 2, 0, 0, 0, None);
        if !base.is_empty() {
            let image: Vec<SparseVec> = eigenspace(n, k, 0).vectors().map(|v| symbol_coords(n, k, 0, v)).collect();
            let image = Echelon::from_vectors(&image);
            let ok = base.iter().all(|a| {
                let f = Form::from_coords(n, k - 2, a).wedge(&Form::e(n, &[1, 2, 3])).expect("same n");
                let v = f.to_coords().expect("constant");
                lies_in(&f, 1) && symbol_coords(n, k + 1, 1, &v).is_zero() && !image.contains(&v)
            });
            e123_not_image.push((k + 1, ok));
        }
        k += 2;
    }
    let injective = |k: usize, r: usize| symbol_rank(n, k, r) == eigenspace(n, k, r).dim();
    let exact_at_11 = eigenspace(n, 1, 1).dim() - symbol_rank(n, 1, 1) == symbol_rank(n, 0, 0);
    Ok(CounterexampleReport {
        e0123_in_kernel,
        e123_not_image,
        injective_00: injective(0, 0),
        injective_20: injective(2, 0),
        exact_at_11,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::weights_present;

    #[test]
    fn symbol_of_one_is_e0() {
        assert_eq!(symbol_up(&Form::one(1), 0).unwrap(), Form::e(1, &[0]));
        assert!(matches!(symbol_up(&Form::e(1, &[0, 1]), 2), Err(Error::Domain(_))));
    }

    #[test]
    fn closed_formula_matches_projection() {
        for n in 1..=2 {
            for k in 0..4 * n {
                for r in weights_present(n, k) {
                    for v in eigenspace(n, k, r).vectors().step_by(3) {
                        let a = Form::from_coords(n, k, v);
                        let s = symbol_up(&a, r).unwrap();
                        assert_eq!(s, symbol_via_projection(&a, r, None).unwrap());
                        assert_eq!(s.to_coords().unwrap(), symbol_coords(n, k, r, v));
                    }
                }
            }
        }
    }

    #[test]
    fn fine_spaces_four_dimensional() {
        let top = fine_space(1, FineNode::new(4, 0, 4, 0)).unwrap();
        assert_eq!(top.len(), 1);
        assert!(fine_space(1, FineNode::new(4, 0, 3, 0)).is_err());
    }

    #[test]
    fn fine_dims_match_formulas_and_sum() {
        for n in 1..=2 {
            for k in 0..=4 * n {
                for r in weights_present(n, k) {
                    let mut total = 0;
                    for node in FineNode::all_for(k, r) {
                        let d = fine_space(n, node).unwrap().len();
                        assert_eq!(d, fine_dim_formula(n, node), "n={n} {node:?}");
                        total += d;
                    }
                    assert_eq!(total, eigenspace(n, k, r).dim());
                }
            }
        }
    }

    #[test]
    fn anti_self_dual_part_dimension() {
        for k in 2..=6 {
            for r in weights_present(2, k) {
                let node = FineNode::new(k, r, 2, r);
                if !node.is_admissible() {
                    continue;
                }
                let asd = fine_space(2, node.with_part(Duality::AntiSelfDual)).unwrap();
                assert_eq!(asd.len() as i64, 3 * (r as i64 + 1) * epsilon(1, k - 2, r as i64));
                if r == 0 {
                    assert!(fine_space(2, node.with_part(Duality::SelfDual)).unwrap().is_empty());
                }
            }
        }
    }

    #[test]
    fn lie_in_systems() {
        for (k_base, m) in [(0, 0), (1, 1), (2, 0), (2, 2), (3, 1)] {
            for case in LieInCase::ALL {
                let rep = lie_in_report(2, case, k_base, m).unwrap();
                assert_eq!(rep.solution_dim, rep.expected_dim, "{rep:?}");
                assert!(rep.spans_target, "{rep:?}");
                if let Some(ok) = rep.matches_ijk {
                    assert!(ok);
                }
            }
        }
        let mid = lie_in_report(2, LieInCase::TwoMid, 1, 1).unwrap();
        assert_eq!(mid.solution_dim, 2 * epsilon(1, 1, 1) as usize);
    }

    #[test]
    fn quoted_outer_coefficients_have_no_solutions() {
        for (k_base, m) in [(1, 1), (2, 2), (3, 1)] {
            for case in [LieInCase::TwoUp, LieInCase::TwoDown] {
                let sol = solve_lie_in(2, case, k_base, m, case.quoted_coefficient(m)).unwrap();
                assert_eq!(sol.dim(), 0);
                assert!(lie_in_solution_space(2, case, k_base, m).unwrap().dim() > 0 || case.target_weight(m).is_none());
            }
        }
    }

    #[test]
    fn kernel_characterization_holds() {
        for (k, r) in [(2, 2), (3, 1), (4, 2), (4, 4), (5, 3)] {
            let c = kernel_characterization(2, k, r).unwrap();
            assert!(c.equal, "{c:?}");
        }
    }

    #[test]
    fn five_sequences() {
        for (k, r) in [(2, 0), (3, 1), (4, 0), (4, 2), (5, 1)] {
            let seqs = five_sequence_report(2, k, r).unwrap();
            for s in &seqs {
                assert!(s.maps_into_targets);
                if r > 0 {
                    assert_eq!(s.alternating_sum, 0, "{s:?}");
                    assert!(s.exact(), "{s:?}");
                }
            }
            if r == 0 && epsilon(1, k - 2, 0) > 0 {
                let mid = &seqs[1];
                let e = epsilon(1, k - 2, 0) as usize;
                assert_eq!(mid.dims, [0, 3 * e, 4 * e]);
                assert!(!mid.exact());
            }
        }
    }

    #[test]
    fn ellipticity_n2() {
        let rep = ellipticity_report(2, None).unwrap();
        assert!(rep.all_match(), "{:#?}", rep.rows.iter().filter(|r| !r.matches).collect::<Vec<_>>());
        assert!(rep.to_csv().starts_with("k0,k,r,exact,predicted,match\n0,0,0,true,true,true"));
    }

    #[test]
    fn counterexamples_n2() {
        let rep = counterexample_report(2).unwrap();
        assert!(rep.passed(), "{rep:?}");
        assert!(!rep.e0123_in_kernel.is_empty());
        assert!(!rep.e123_not_image.is_empty());
    }
}
