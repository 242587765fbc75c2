//! Real forms on flat `C^2 = H^1` split by the `u(1) = <I>` action.
//!
//! `[[Λ^{p,q}]]` with `p + q = k` and `w = p - q >= 0` is the `w^2`-eigenspace
//! of `-I∘I` on `Λ^k`. The real operators `[∂]` and `[∂̄]` are the components of
//! `d` raising and lowering `w` by one.

use std::sync::{Arc, LazyLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cache::Cache;
use crate::form::{lambda, Form};
use crate::linalg::{joint_kernel, q, q_frac, Echelon, SparseVec};
use crate::sp1::{apply_columns, generator_columns, Generator, Support};
use crate::space::SpaceBasis;

const N: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct U1Node {
    pub k: usize,
    pub w: usize,
}

impl U1Node {
    pub fn p(self) -> usize {
        (self.k + self.w) / 2
    }

    pub fn q(self) -> usize {
        (self.k - self.w) / 2
    }

    pub fn label(self) -> String {
        if self.w == 0 {
            format!("[Λ^{{{},{}}}]", self.p(), self.q())
        } else {
            format!("[[Λ^{{{},{}}}]]", self.p(), self.q())
        }
    }
}

/// Weights `w` occurring in `Λ^k(C^2)`.
pub fn u1_weights(k: usize) -> Vec<usize> {
    if k > 4 {
        return Vec::new();
    }
    (0..=k.min(4 - k)).filter(|w| (k - w) % 2 == 0).collect()
}

/// Columns of `-I∘I` on `Λ^k`.
fn minus_i_squared(k: usize) -> Arc<Vec<SparseVec>> {
    static CACHE: LazyLock<Cache<usize, Vec<SparseVec>>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&k, || {
        let cols = generator_columns(N, k, Generator::I, Support::all(N));
        cols.iter().map(|c| apply_columns(&cols, c).scale(&q(-1))).collect()
    })
}

fn u1_space(k: usize, w: usize) -> Arc<Vec<SparseVec>> {
    static CACHE: LazyLock<Cache<(usize, usize), Vec<SparseVec>>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(k, w), || {
        let l = minus_i_squared(k);
        joint_kernel(&[(l.as_slice(), q(-((w * w) as i64)))], lambda(N, k).dim())
    })
}

/// The direct-sum decomposition of `Λ^k(C^2)`; empty for `k > 4`.
pub fn u1_decompose(k: usize) -> Vec<(U1Node, SpaceBasis)> {
    u1_weights(k)
        .into_iter()
        .map(|w| (U1Node { k, w }, SpaceBasis::from_independent(N, k, u1_space(k, w).to_vec())))
        .collect()
}

/// Projection onto `[[Λ^{p,q}]]` with `p - q = w`, by interpolation in `-I∘I`.
pub fn u1_project_coords(k: usize, w: usize, v: &SparseVec) -> SparseVec {
    let weights = u1_weights(k);
    if !weights.contains(&w) {
        return SparseVec::new();
    }
    let l = minus_i_squared(k);
    let target = (w * w) as i64;
    weights.iter().filter(|&&o| o != w).fold(v.clone(), |acc, &o| {
        let other = (o * o) as i64;
        apply_columns(&l, &acc).axpy(&q(-other), &acc).scale(&q_frac(1, target - other))
    })
}

/// Coefficient-wise projection of a polynomial form.
pub fn u1_project(a: &Form, w: usize) -> Form {
    let k = a.k();
    let parts: Vec<_> = a.by_monomial().into_iter().map(|(m, v)| (m, u1_project_coords(k, w, &v))).collect();
    Form::from_monomials(N, k, parts.iter().map(|(m, v)| (m, v)))
}

/// `[∂]`: the component of `d` in weight `w + 1`.
pub fn real_del(a: &Form, w: usize) -> Form {
    u1_project(&a.d(), w + 1)
}

/// `[∂̄]`: the component of `d` in weight `w - 1`; zero on `[Λ^{p,p}]`.
pub fn real_del_bar(a: &Form, w: usize) -> Form {
    match w.checked_sub(1) {
        Some(lower) => u1_project(&a.d(), lower),
        None => Form::zero(N, a.k() + 1),
    }
}

/// Rank of `σ(α) = π_{w+1}(α ∧ e^0)` on `[[Λ^{p,q}]]`.
pub fn real_symbol_rank(k: usize, w: usize) -> usize {
    if k >= 4 {
        return 0;
    }
    let images: Vec<SparseVec> = u1_space(k, w)
        .iter()
        .map(|v| u1_project_coords(k + 1, w + 1, &crate::symbol::wedge_index_coords(N, k, v, 0)))
        .collect();
    Echelon::from_vectors(&images).rank()
}

/// The diagonal from `[Λ^{p0,p0}]` fails at its first two spaces for `p0 > 0`
/// and only at `[[Λ^{1,0}]]` for `p0 = 0`.
pub fn real_predicted_exact(p0: usize, j: usize) -> bool {
    if p0 == 0 {
        j != 1
    } else {
        j >= 2
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RealEllipticityRow {
    pub p0: usize,
    pub label: String,
    pub k: usize,
    pub w: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub exact: bool,
    pub predicted: bool,
}

/// Exactness along each upward diagonal starting at `[Λ^{p0,p0}]`.
pub fn real_ellipticity() -> Vec<RealEllipticityRow> {
    let mut rows = Vec::new();
    for p0 in 0..=2 {
        for j in 0..=(4 - 2 * p0) {
            let (k, w) = (2 * p0 + j, j);
            if !u1_weights(k).contains(&w) {
                continue;
            }
            let dim = u1_space(k, w).len();
            let rank_out = real_symbol_rank(k, w);
            let rank_in = if j >= 1 { real_symbol_rank(k - 1, w - 1) } else { 0 };
            let exact = dim - rank_out == rank_in;
            rows.push(RealEllipticityRow {
                p0,
                label: U1Node { k, w }.label(),
                k,
                w,
                dim,
                rank_in,
                rank_out,
                exact,
                predicted: real_predicted_exact(p0, j),
            });
        }
    }
    rows
}

#[derive(Clone, Debug, Serialize)]
pub struct RealDolbeaultReport {
    pub dims: Vec<(String, usize)>,
    /// `e^{01} ∈ [Λ^{1,1}]` and `σ(e^{01}) = 0`.
    pub e01_in_kernel: bool,
    /// `e^{123} ∈ [[Λ^{2,1}]]`, it has nowhere to go, and it is not in `σ([Λ^{1,1}])`.
    pub e123_not_image: bool,
    /// The leading edge fails only at `[[Λ^{1,0}]]`.
    pub leading_edge_failure: bool,
    /// Every node with `p >= q + 2` is exact.
    pub exact_far_from_diagonal: bool,
    pub ellipticity: Vec<RealEllipticityRow>,
    pub identity_trials: usize,
    pub identity_violations: usize,
}

impl RealDolbeaultReport {
    pub fn passed(&self) -> bool {
        self.e01_in_kernel
            && self.e123_not_image
            && self.leading_edge_failure
            && self.exact_far_from_diagonal
            && self.ellipticity.iter().all(|r| r.exact == r.predicted)
            && self.identity_violations == 0
    }
}

/// Checks `[∂] + [∂̄] = d`, `[∂]^2 = 0`, `[∂][∂̄] + [∂̄][∂] = 0` and `[∂̄]^2 = 0`
/// on seeded random polynomial forms; returns the number of violations.
pub fn check_real_identities(trials: usize, max_deg: u32, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for k in 0..=4 {
        for w in u1_weights(k) {
            for _ in 0..trials {
                let a = u1_project(&Form::random(&mut rng, N, k, max_deg, 3), w);
                let up = real_del(&a, w);
                let down = real_del_bar(&a, w);
                let ok = up.add(&down) == a.d()
                    && real_del(&up, w + 1).is_zero()
                    && real_del_bar(&down, w.saturating_sub(1)).is_zero()
                    && (w == 0 || real_del(&down, w - 1).add(&real_del_bar(&up, w + 1)).is_zero());
                violations += usize::from(!ok);
            }
        }
    }
    violations
}

pub fn real_dolbeault_counterexamples() -> RealDolbeaultReport {
    let contains = |k: usize, w: usize, f: &Form| {
        let v = f.to_coords().expect("constant");
        Echelon::from_vectors(u1_space(k, w).iter()).contains(&v)
    };
    let e01 = Form::e(N, &[0, 1]);
    let e01_in_kernel = contains(2, 0, &e01) && u1_project(&e01.wedge(&Form::e(N, &[0])).expect("n = 1"), 1).is_zero();

    let e123 = Form::e(N, &[1, 2, 3]);
    let image: Vec<SparseVec> = u1_space(2, 0)
        .iter()
        .map(|v| u1_project_coords(3, 1, &crate::symbol::wedge_index_coords(N, 2, v, 0)))
        .collect();
    let e123_not_image = contains(3, 1, &e123)
        && !u1_weights(4).contains(&2)
        && !Echelon::from_vectors(&image).contains(&e123.to_coords().expect("constant"));

    let ellipticity = real_ellipticity();
    let leading_edge_failure = ellipticity.iter().filter(|r| r.p0 == 0).all(|r| r.exact == (r.k != 1));
    let exact_far_from_diagonal = ellipticity.iter().filter(|r| r.w >= 2).all(|r| r.exact);
    let dims = (0..=4).flat_map(u1_decompose).map(|(node, b)| (node.label(), b.dim())).collect();
    let identity_trials = 5;
    RealDolbeaultReport {
        dims,
        e01_in_kernel,
        e123_not_image,
        leading_edge_failure,
        exact_far_from_diagonal,
        ellipticity,
        identity_trials,
        identity_violations: check_real_identities(identity_trials, 3, 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::binomial;

    #[test]
    fn decomposition_dims() {
        let dims = |k| u1_decompose(k).into_iter().map(|(n, b)| (n.w, b.dim())).collect::<Vec<_>>();
        assert_eq!(dims(0), vec![(0, 1)]);
        assert_eq!(dims(1), vec![(1, 4)]);
        assert_eq!(dims(2), vec![(0, 4), (2, 2)]);
        assert_eq!(dims(3), vec![(1, 4)]);
        assert_eq!(dims(4), vec![(0, 1)]);
        for k in 0..=4 {
            let total: usize = u1_decompose(k).iter().map(|(_, b)| b.dim()).sum();
            assert_eq!(total as i64, binomial(4, k as i64));
        }
        assert!(u1_decompose(5).is_empty());
    }

    #[test]
    fn e01_is_type_one_one() {
        let e01 = Form::e(1, &[0, 1]);
        assert_eq!(u1_project(&e01, 0), e01);
        assert!(u1_project(&e01, 2).is_zero());
    }

    #[test]
    fn projections_resolve_identity() {
        let f = Form::e(1, &[0, 2]).add(&Form::e(1, &[1, 3]).scale(&q(3)));
        let sum = u1_project(&f, 0).add(&u1_project(&f, 2));
        assert_eq!(sum, f);
    }

    #[test]
    fn counterexamples_and_identities() {
        let rep = real_dolbeault_counterexamples();
        assert!(rep.passed(), "{rep:#?}");
        let verdicts: Vec<_> = rep.ellipticity.iter().map(|r| (r.k, r.w, r.exact)).collect();
        assert_eq!(
            verdicts,
            vec![(0, 0, true), (1, 1, false), (2, 2, true), (2, 0, false), (3, 1, false), (4, 0, false)]
        );
    }
}
