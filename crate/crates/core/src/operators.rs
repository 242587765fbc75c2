//! The operators `D' = π_{k+1,r+1} ∘ d` and `D̄ = π_{k+1,r-1} ∘ d` on
//! polynomial sections of `E_{k,r}`, the double complex identities and the
//! cohomology of the flat polynomial model.

use std::collections::HashMap;
use std::sync::LazyLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::Cache;
use crate::decomposition::{eigenspace, project, weights_present, GridNode};
use crate::error::{Error, Result};
use crate::form::{lambda, Form};
use crate::linalg::{q, q_frac, Echelon, SparseVec, Q};
use crate::poly::{monomials_of_degree, Monomial};
use crate::sp1::casimir;

/// A polynomial section of `E_{k,r}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSection {
    pub node: GridNode,
    pub form: Form,
}

impl GradedSection {
    /// Checks that `form` has degree `k` and is fixed by `π_{k,r}`.
    pub fn new(node: GridNode, form: Form) -> Result<Self> {
        node.validate(form.n())?;
        if form.k() != node.k {
            return Err(Error::Input(format!("form has degree {} but the node has k={}", form.k(), node.k)));
        }
        if project(&form, node.r) != form {
            return Err(Error::Domain(format!("form does not lie in E_({},{})", node.k, node.r)));
        }
        Ok(Self { node, form })
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }

    pub fn max_poly_degree(&self) -> Option<u32> {
        self.form.poly_degree()
    }
}

/// `D'`, landing in `E_{k+1,r+1}`.
pub fn d_up(s: &GradedSection) -> GradedSection {
    let node = GridNode::new(s.node.k + 1, s.node.r + 1);
    GradedSection { node, form: project(&s.form.d(), node.r) }
}

/// `D̄`, landing in `E_{k+1,r-1}`; the zero section when `r = 0`.
pub fn d_down(s: &GradedSection) -> GradedSection {
    let k = s.node.k + 1;
    if s.node.r == 0 {
        return GradedSection { node: GridNode::new(k, 0), form: Form::zero(s.n(), k) };
    }
    let node = GridNode::new(k, s.node.r - 1);
    GradedSection { node, form: project(&s.form.d(), node.r) }
}

/// `D'α = -¼((r-1) + C/(r+1)) dα`.
pub fn d_up_closed_form(s: &GradedSection) -> GradedSection {
    let r = s.node.r as i64;
    let da = s.form.d();
    let form = da.scale(&q(r - 1)).add(&casimir(&da).scale(&q_frac(1, r + 1))).scale(&q_frac(-1, 4));
    GradedSection { node: GridNode::new(s.node.k + 1, s.node.r + 1), form }
}

/// `D̄α = ¼((r+3) + C/(r+1)) dα`.
pub fn d_down_closed_form(s: &GradedSection) -> GradedSection {
    let r = s.node.r as i64;
    let da = s.form.d();
    let form = da.scale(&q(r + 3)).add(&casimir(&da).scale(&q_frac(1, r + 1))).scale(&q_frac(1, 4));
    GradedSection { node: GridNode::new(s.node.k + 1, s.node.r.saturating_sub(1)), form }
}

/// Every node `(k, r)` with `ε^n_{k,r} > 0`, ordered by `(k, r)`.
pub fn grid_nodes(n: usize) -> Vec<GridNode> {
    (0..=4 * n).flat_map(|k| weights_present(n, k).into_iter().map(move |r| GridNode::new(k, r))).collect()
}

/// Random section at `node`: a random polynomial form projected to `E_{k,r}`.
/// Draws are repeated until the projection is nonzero.
pub fn random_section<R: Rng>(rng: &mut R, n: usize, node: GridNode, max_deg: u32) -> GradedSection {
    loop {
        let raw = Form::random(rng, n, node.k, max_deg, 3);
        let form = project(&raw, node.r);
        if !form.is_zero() {
            return GradedSection { node, form };
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeCheck {
    pub k: usize,
    pub r: usize,
    pub trials: usize,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleComplexReport {
    pub n: usize,
    pub max_poly_degree: u32,
    pub trials: usize,
    pub seed: u64,
    pub nodes: Vec<NodeCheck>,
}

impl DoubleComplexReport {
    pub fn violation_count(&self) -> usize {
        self.nodes.iter().map(|c| c.violations.len()).sum()
    }
}

fn check_section(s: &GradedSection) -> Vec<&'static str> {
    let mut bad = Vec::new();
    let up = d_up(s);
    let down = d_down(s);
    if up.form.add(&down.form) != s.form.d() {
        bad.push("d != D' + D̄");
    }
    if !d_up(&up).form.is_zero() {
        bad.push("D'D' != 0");
    }
    if !d_down(&down).form.is_zero() {
        bad.push("D̄D̄ != 0");
    }
    let mixed = d_up(&down).form.add(&d_down(&up).form);
    if !mixed.is_zero() {
        bad.push("D'D̄ + D̄D' != 0");
    }
    if d_up_closed_form(s).form != up.form {
        bad.push("closed form of D' disagrees");
    }
    if d_down_closed_form(s).form != down.form {
        bad.push("closed form of D̄ disagrees");
    }
    bad
}

/// Check `d = D' + D̄`, `D'^2 = D'D̄ + D̄D' = D̄^2 = 0` and the closed forms of
/// both operators on `trials` seeded random sections at every node.
pub fn verify_double_complex(n: usize, max_poly_degree: u32, trials: usize, seed: u64) -> DoubleComplexReport {
    let nodes: Vec<NodeCheck> = grid_nodes(n)
        .into_par_iter()
        .enumerate()
        .map(|(idx, node)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(idx as u64);
            let mut violations = Vec::new();
            for t in 0..trials {
                let s = random_section(&mut rng, n, node, max_poly_degree);
                for v in check_section(&s) {
                    violations.push(format!("trial {t}: {v}"));
                }
            }
            NodeCheck { k: node.k, r: node.r, trials, violations }
        })
        .collect();
    DoubleComplexReport { n, max_poly_degree, trials, seed, nodes }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyDims {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub max_poly_degree: u32,
    pub dim_kernel: usize,
    pub dim_image: usize,
    pub dim_cohomology: usize,
}

/// Rank of `D'_{k,r}` on sections whose coefficients are homogeneous of degree `p`.
fn d_up_rank_homogeneous(n: usize, k: usize, r: usize, p: u32) -> (usize, usize) {
    static CACHE: LazyLock<Cache<(usize, usize, usize, u32), (usize, usize)>> = LazyLock::new(Cache::new);
    *CACHE.get_or_init(&(n, k, r, p), || {
        let basis = eigenspace(n, k, r);
        let sources = monomials_of_degree(4 * n, p);
        let domain_dim = sources.len() * basis.dim();
        if p == 0 || basis.dim() == 0 || k + 1 > 4 * n {
            return (0, domain_dim);
        }
        let targets: HashMap<Monomial, usize> =
            monomials_of_degree(4 * n, p - 1).into_iter().enumerate().map(|(i, m)| (m, i)).collect();
        let width = lambda(n, k + 1).dim();
        // π_{k+1,r+1}(e^i ∧ v) for every direction i and basis vector v.
        let wedged: Vec<Vec<SparseVec>> = basis
            .vectors()
            .map(|v| {
                let f = Form::from_coords(n, k, v);
                (0..4 * n)
                    .map(|i| {
                        let w = Form::e(n, &[i]).wedge(&f).expect("same n");
                        project(&w, r + 1).to_coords().expect("constant")
                    })
                    .collect()
            })
            .collect();
        let mut ech = Echelon::new();
        for m in &sources {
            for w in &wedged {
                let mut entries: Vec<(usize, Q)> = Vec::new();
                for (i, e) in m.0.iter().enumerate() {
                    if *e == 0 {
                        continue;
                    }
                    let mut lower = m.clone();
                    lower.0[i] -= 1;
                    let base = targets[&lower] * width;
                    entries.extend(w[i].iter().map(|(j, c)| (base + j, c * q(*e as i64))));
                }
                ech.insert(SparseVec::from_entries(entries));
            }
        }
        (ech.rank(), domain_dim)
    })
}

/// Dimensions of `ker D'_{k,r}`, `im D'_{k-1,r-1}` and their quotient on
/// sections with coefficients of degree at most `max_poly_degree`.
pub fn cohomology_dims(n: usize, k: usize, r: usize, max_poly_degree: u32) -> Result<CohomologyDims> {
    GridNode::new(k, r).validate(n)?;
    let mut dim_kernel = 0;
    let mut dim_image = 0;
    for p in 0..=max_poly_degree {
        let (rank, dom) = d_up_rank_homogeneous(n, k, r, p);
        dim_kernel += dom - rank;
        if k >= 1 && r >= 1 {
            dim_image += d_up_rank_homogeneous(n, k - 1, r - 1, p).0;
        }
    }
    Ok(CohomologyDims { n, k, r, max_poly_degree, dim_kernel, dim_image, dim_cohomology: dim_kernel - dim_image })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(4 * n, i)
    }

    #[test]
    fn functions_go_to_their_differential() {
        let f = Form::from_coeff(1, crate::form::MultiIndex::EMPTY, x(1, 0).mul(&x(1, 2)).add(&x(1, 3)));
        let s = GradedSection::new(GridNode::new(0, 0), f.clone()).unwrap();
        assert_eq!(d_up(&s).form, f.d());
        assert_eq!(d_up_closed_form(&s).form, f.d());
        assert!(d_down(&s).form.is_zero());
        let c = GradedSection::new(GridNode::new(0, 0), Form::one(1)).unwrap();
        assert!(d_up(&c).form.is_zero());
    }

    #[test]
    fn d_up_on_anti_self_dual_two_form() {
        let w = Form::e(1, &[0, 1]).sub(&Form::e(1, &[2, 3])).mul_poly(&x(1, 2));
        let s = GradedSection::new(GridNode::new(2, 0), w.clone()).unwrap();
        let expected = Form::e(1, &[2]).wedge(&Form::e(1, &[0, 1]).sub(&Form::e(1, &[2, 3]))).unwrap();
        assert_eq!(d_up(&s).form, expected);
        assert!(d_down(&s).form.is_zero());
    }

    #[test]
    fn d_splits_on_self_dual() {
        let w = Form::e(1, &[0, 1]).add(&Form::e(1, &[2, 3])).mul_poly(&x(1, 0));
        let s = GradedSection::new(GridNode::new(2, 2), w.clone()).unwrap();
        assert_eq!(d_up(&s).form.add(&d_down(&s).form), Form::e(1, &[0]).wedge(&Form::e(1, &[0, 1]).add(&Form::e(1, &[2, 3]))).unwrap());
    }

    #[test]
    fn d_down_from_one_forms_lands_in_anti_self_dual() {
        let a = Form::e(1, &[0]).mul_poly(&x(1, 1).mul(&x(1, 3)));
        let s = GradedSection::new(GridNode::new(1, 1), a).unwrap();
        let out = d_down(&s);
        assert!(!out.form.is_zero());
        assert!(crate::decomposition::lies_in(&out.form, 0));
    }

    #[test]
    fn membership_is_enforced() {
        assert!(GradedSection::new(GridNode::new(2, 2), Form::e(1, &[0, 1])).is_err());
        assert!(GradedSection::new(GridNode::new(2, 1), Form::e(1, &[0, 1])).is_err());
    }

    #[test]
    fn double_complex_small() {
        let rep = verify_double_complex(1, 2, 5, 11);
        assert_eq!(rep.violation_count(), 0);
        let again = verify_double_complex(1, 2, 5, 11);
        assert_eq!(serde_json::to_string(&rep).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn cohomology_examples() {
        for d in 0..=3 {
            assert_eq!(cohomology_dims(1, 0, 0, d).unwrap().dim_cohomology, 1);
        }
        let c = cohomology_dims(1, 1, 1, 1).unwrap();
        assert_eq!(c.dim_image, 4);
        assert_eq!(c.dim_kernel, 4 + 4 * 4 - d_up_rank_homogeneous(1, 1, 1, 1).0);
        assert!(cohomology_dims(1, 2, 1, 1).is_err());
    }
}
