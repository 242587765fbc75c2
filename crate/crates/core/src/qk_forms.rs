//! Kähler forms, the fundamental 4-form `Ω`, the quaternion-valued 2-form `Ψ`
//! and the effective (Kraines–Bonan) decomposition on flat `H^n`.

use std::sync::{Arc, LazyLock};

use serde::Serialize;

use crate::cache::Cache;
use crate::decomposition::eigenspace;
use crate::error::{Error, Result};
use crate::form::{binomial, lambda, Form};
use crate::linalg::{kernel_of_columns, kernel_of_rows, lincomb, q, q_frac, Echelon, Insert, SparseVec, Q};
use crate::quaternion::QForm;
use crate::sp1::{apply_columns, casimir, generator_columns, Generator, Support};

#[derive(Clone, Debug)]
pub struct StructuralForms {
    pub omega_i: Form,
    pub omega_j: Form,
    pub omega_k: Form,
    pub omega: Form,
    pub psi: QForm,
}

fn kahler(n: usize, pairs: [(usize, usize, i64); 2]) -> Form {
    let mut out = Form::zero(n, 2);
    for a in 0..n {
        for (i, j, s) in pairs {
            out = out.add(&Form::e(n, &[4 * a + i, 4 * a + j]).scale(&q(s)));
        }
    }
    out
}

/// `ω_I, ω_J, ω_K, Ω, Ψ` in the standard frame, with their defining identities checked.
pub fn structural_forms(n: usize) -> Result<StructuralForms> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let omega_i = kahler(n, [(0, 1, 1), (2, 3, 1)]);
    let omega_j = kahler(n, [(0, 2, 1), (1, 3, -1)]);
    let omega_k = kahler(n, [(0, 3, 1), (1, 2, 1)]);
    let omega = omega_i.wedge(&omega_i)?.add(&omega_j.wedge(&omega_j)?).add(&omega_k.wedge(&omega_k)?);
    let psi = QForm::new([Form::zero(n, 2), omega_i.clone(), omega_j.clone(), omega_k.clone()])?;

    psi_square_ratio(&psi, &omega)?;
    if !casimir(&omega).is_zero() {
        return Err(Error::Invariant("Ω is not sp(1)-invariant".into()));
    }
    Ok(StructuralForms { omega_i, omega_j, omega_k, omega, psi })
}

/// The scalar `c` with `Ψ∧Ψ = c Ω`; fails if `Ψ∧Ψ` is not a real multiple of `Ω`.
pub fn psi_square_ratio(psi: &QForm, omega: &Form) -> Result<Q> {
    let sq = psi.wedge(psi)?;
    let (m, p) = omega.terms().next().ok_or_else(|| Error::Invariant("Ω vanishes".into()))?;
    let c = sq.component(0).coeff(*m).constant_term() / p.constant_term();
    if sq != QForm::real(&omega.scale(&c)) {
        return Err(Error::Invariant("Ψ∧Ψ is not a real multiple of Ω".into()));
    }
    Ok(c)
}

fn omega_cached(n: usize) -> Arc<Form> {
    static CACHE: LazyLock<Cache<usize, Form>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&n, || structural_forms(n).expect("structural forms").omega)
}

/// `Ω^j`, with `Ω^0 = 1`.
pub fn omega_power(n: usize, j: usize) -> Form {
    let omega = omega_cached(n);
    let mut out = Form::one(n);
    for _ in 0..j {
        out = out.wedge(&omega).expect("same n");
    }
    out
}

fn check_bonan_degree(n: usize, k: usize) -> Result<()> {
    if k > 2 * n + 2 {
        return Err(Error::Domain(format!("degree {k} exceeds 2n+2 = {} for n={n}", 2 * n + 2)));
    }
    Ok(())
}

/// Whether `Ω ∧ *μ = 0`.
pub fn is_effective(mu: &Form) -> Result<bool> {
    check_bonan_degree(mu.n(), mu.k())?;
    if !mu.is_constant() {
        return Err(Error::Input("effectivity is tested on constant-coefficient forms".into()));
    }
    Ok(omega_cached(mu.n()).wedge(&mu.hodge_star())?.is_zero())
}

/// Basis of the effective `k`-forms: the kernel of `μ ↦ Ω ∧ *μ`.
pub fn effective_basis(n: usize, k: usize) -> Arc<Vec<SparseVec>> {
    static CACHE: LazyLock<Cache<(usize, usize), Vec<SparseVec>>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k), || {
        let omega = omega_cached(n);
        let space = lambda(n, k);
        let target = 4 * n - k + 4;
        if target > 4 * n {
            return (0..space.dim()).map(SparseVec::unit).collect();
        }
        let cols: Vec<SparseVec> = space
            .indices()
            .iter()
            .map(|m| omega.wedge(&Form::basis(n, *m).hodge_star()).expect("same n").to_coords().expect("constant"))
            .collect();
        kernel_of_columns(&cols)
    })
}

/// Columns `Ω^j ∧ v` for effective `v` of degree `k - 4j`, with their labels.
#[derive(Debug)]
struct BonanSystem {
    labels: Vec<(usize, SparseVec)>,
    solver: Echelon,
    rank: usize,
}

fn bonan_system(n: usize, k: usize) -> Arc<BonanSystem> {
    static CACHE: LazyLock<Cache<(usize, usize), BonanSystem>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k), || {
        let mut labels = Vec::new();
        let mut solver = Echelon::tagged();
        let mut rank = 0;
        for j in 0..=k / 4 {
            let power = omega_power(n, j);
            for v in effective_basis(n, k - 4 * j).iter() {
                let mu = Form::from_coords(n, k - 4 * j, v);
                let col = power.wedge(&mu).expect("same n").to_coords().expect("constant");
                if let Insert::Independent = solver.insert(col) {
                    rank += 1;
                }
                labels.push((j, v.clone()));
            }
        }
        BonanSystem { labels, solver, rank }
    })
}

/// Rank and column count of the decomposition system in degree `k`.
pub fn bonan_system_rank(n: usize, k: usize) -> Result<(usize, usize)> {
    check_bonan_degree(n, k)?;
    let sys = bonan_system(n, k);
    Ok((sys.rank, sys.labels.len()))
}

/// `φ = Σ_j Ω^j ∧ μ_{k-4j}` with every `μ` effective; entries ordered by `j`.
pub fn kraines_bonan_decompose(phi: &Form) -> Result<Vec<(usize, Form)>> {
    let (n, k) = (phi.n(), phi.k());
    check_bonan_degree(n, k)?;
    let sys = bonan_system(n, k);
    let total = binomial(4 * n as i64, k as i64) as usize;
    if sys.rank != sys.labels.len() || sys.rank != total {
        return Err(Error::Invariant(format!(
            "decomposition system in degree {k} has rank {} with {} columns, expected {total}",
            sys.rank,
            sys.labels.len()
        )));
    }
    let coords = phi.to_coords()?;
    let sol = sys.solver.solve(&coords).ok_or_else(|| Error::Invariant("form outside the decomposition span".into()))?;
    let mut parts: Vec<(usize, SparseVec)> = (0..=k / 4).map(|j| (j, SparseVec::new())).collect();
    for (col, c) in sol.iter() {
        let (j, v) = &sys.labels[*col];
        parts[*j].1 = parts[*j].1.axpy(c, v);
    }
    Ok(parts.into_iter().map(|(j, v)| (j, Form::from_coords(n, k - 4 * j, &v))).collect())
}

/// `Σ_j Ω^j ∧ μ_j`.
pub fn recompose(n: usize, parts: &[(usize, Form)]) -> Result<Form> {
    let k = parts.first().map(|(j, f)| f.k() + 4 * j).unwrap_or(0);
    let mut out = Form::zero(n, k);
    for (j, mu) in parts {
        out = out.add(&omega_power(n, *j).wedge(mu)?);
    }
    Ok(out)
}

/// Rational points of the unit sphere used to sample complex structures `aI + bJ + cK`.
pub fn sphere_points() -> Vec<[Q; 3]> {
    let raw: [(i64, i64, i64, i64); 10] = [
        (1, 0, 0, 1),
        (0, 1, 0, 1),
        (0, 0, 1, 1),
        (3, 4, 0, 5),
        (0, 3, 4, 5),
        (4, 0, 3, 5),
        (1, 2, 2, 3),
        (2, -1, 2, 3),
        (2, 3, 6, 7),
        (-6, 2, 3, 7),
    ];
    raw.iter().map(|&(a, b, c, d)| [q_frac(a, d), q_frac(b, d), q_frac(c, d)]).collect()
}

/// Real form of `Λ^{k,0} ⊕ Λ^{0,k}` for the complex structure `u = aI + bJ + cK`:
/// the kernel of `D_u^2 + k^2` on `Λ^k`.
pub fn lambda_k0(n: usize, k: usize, u: &[Q; 3]) -> Vec<SparseVec> {
    let dim = lambda(n, k).dim();
    let gens: Vec<_> = Generator::ALL.iter().map(|g| generator_columns(n, k, *g, Support::all(n))).collect();
    let du: Vec<SparseVec> = (0..dim).map(|i| lincomb(gens.iter().zip(u).map(|(cols, c)| (c.clone(), &cols[i])))).collect();
    let rows: Vec<SparseVec> = (0..dim)
        .map(|i| apply_columns(&du, &du[i]).axpy(&q((k * k) as i64), &SparseVec::unit(i)))
        .collect();
    kernel_of_rows(&rows, dim)
}

#[derive(Clone, Debug, Serialize)]
pub struct TopRowCheck {
    pub n: usize,
    pub k: usize,
    pub dim_top: usize,
    pub expected_dim: usize,
    pub samples_contained: bool,
    pub span_matches: bool,
}

impl TopRowCheck {
    pub fn passed(&self) -> bool {
        self.dim_top == self.expected_dim && self.samples_contained && self.span_matches
    }
}

/// Compare `E_{k,k}` with the span of `Λ^{k,0}_u` over the sampled complex structures.
pub fn top_row_check(n: usize, k: usize) -> TopRowCheck {
    let top = eigenspace(n, k, k);
    let top_vectors: Vec<SparseVec> = top.vectors().cloned().collect();
    let top_echelon = Echelon::from_vectors(&top_vectors);
    let mut samples = Vec::new();
    let mut contained = true;
    for u in sphere_points() {
        let part = lambda_k0(n, k, &u);
        contained &= part.iter().all(|v| top_echelon.contains(v));
        samples.extend(part);
    }
    TopRowCheck {
        n,
        k,
        dim_top: top.dim(),
        expected_dim: (k + 1) * crate::decomposition::epsilon(n, k, k as i64) as usize,
        samples_contained: contained,
        span_matches: crate::linalg::same_span(&samples, &top_vectors),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn four_dimensional_structural_forms() {
        let s = structural_forms(1).unwrap();
        assert_eq!(s.omega_i, Form::e(1, &[0, 1]).add(&Form::e(1, &[2, 3])));
        assert_eq!(s.omega_j, Form::e(1, &[0, 2]).add(&Form::e(1, &[3, 1])));
        assert_eq!(s.omega_k, Form::e(1, &[0, 3]).add(&Form::e(1, &[1, 2])));
        assert_eq!(s.omega, Form::e(1, &[0, 1, 2, 3]).scale(&q(6)));
        for n in 1..=3 {
            let s = structural_forms(n).unwrap();
            assert_eq!(psi_square_ratio(&s.psi, &s.omega).unwrap(), q(-1));
        }
    }

    #[test]
    fn effectivity_examples() {
        assert!(is_effective(&Form::e(2, &[0])).unwrap());
        assert!(!is_effective(&Form::e(2, &[0, 1, 2, 3])).unwrap());
        assert!(is_effective(&Form::zero(2, 3)).unwrap());
        assert!(matches!(is_effective(&Form::e(2, &[0, 1, 2, 3, 4, 5, 6])), Err(Error::Domain(_))));
    }

    #[test]
    fn decomposition_examples() {
        let phi = Form::e(2, &[1, 5, 6]);
        assert_eq!(kraines_bonan_decompose(&phi).unwrap(), vec![(0, phi.clone())]);

        let omega = omega_power(2, 1);
        let parts = kraines_bonan_decompose(&omega).unwrap();
        assert_eq!(parts[0].1, Form::zero(2, 4));
        assert_eq!(parts[1].1, Form::one(2));

        let e0123 = Form::e(2, &[0, 1, 2, 3]);
        let parts = kraines_bonan_decompose(&e0123).unwrap();
        assert!(is_effective(&parts[0].1).unwrap());
        assert!(!parts[1].1.is_zero());
        assert_eq!(recompose(2, &parts).unwrap(), e0123);
    }

    #[test]
    fn system_has_full_rank() {
        for n in 1..=2 {
            for k in 0..=2 * n + 2 {
                let (rank, cols) = bonan_system_rank(n, k).unwrap();
                assert_eq!(rank, cols);
                assert_eq!(rank as i64, binomial(4 * n as i64, k as i64));
            }
        }
    }

    #[test]
    fn random_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..=6 {
            for _ in 0..10 {
                let phi = Form::random(&mut rng, 2, k, 0, 4);
                let parts = kraines_bonan_decompose(&phi).unwrap();
                for (_, mu) in &parts {
                    assert!(is_effective(mu).unwrap());
                }
                assert_eq!(recompose(2, &parts).unwrap(), phi);
            }
        }
    }

    #[test]
    fn top_row_is_spanned_by_sampled_structures() {
        for n in 1..=2 {
            for k in 0..=2 * n {
                let c = top_row_check(n, k);
                assert!(c.passed(), "{c:?}");
            }
        }
    }
}
