//! Concrete subspaces of `Λ^k` and matrices between them.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::form::{lambda, Form};
use crate::linalg::{kernel_of_columns, lincomb, DenseMatrix, Echelon, SparseVec, Q};

/// Linearly independent constant-coefficient forms spanning a subspace of `Λ^k(R^{4n})`.
///
/// Vectors are stored as coordinates in the lexicographic basis of `Λ^k`.
#[derive(Clone, Debug)]
pub struct SpaceBasis {
    n: usize,
    k: usize,
    vectors: Vec<SparseVec>,
}

impl SpaceBasis {
    /// Basis from coordinate vectors. Fails if they are dependent.
    pub fn new(n: usize, k: usize, vectors: Vec<SparseVec>) -> Result<Self> {
        let b = Self { n, k, vectors };
        if Echelon::from_vectors(&b.vectors).rank() != b.vectors.len() {
            return Err(Error::Invariant("basis vectors are linearly dependent".into()));
        }
        Ok(b)
    }

    /// Caller guarantees independence (e.g. vectors straight out of an echelon form).
    pub fn from_independent(n: usize, k: usize, vectors: Vec<SparseVec>) -> Self {
        Self { n, k, vectors }
    }

    pub fn from_forms(forms: &[Form]) -> Result<Self> {
        let first = forms.first().ok_or_else(|| Error::Input("empty form list".into()))?;
        let (n, k) = (first.n(), first.k());
        let mut vs = Vec::with_capacity(forms.len());
        for f in forms {
            if f.n() != n || f.k() != k {
                return Err(Error::Input("forms of different type in one basis".into()));
            }
            vs.push(f.to_coords()?);
        }
        Self::new(n, k, vs)
    }

    /// The whole of `Λ^k`.
    pub fn full(n: usize, k: usize) -> Self {
        Self { n, k, vectors: (0..lambda(n, k).dim()).map(SparseVec::unit).collect() }
    }

    pub fn empty(n: usize, k: usize) -> Self {
        Self { n, k, vectors: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[SparseVec] {
        &self.vectors
    }

    pub fn forms(&self) -> Vec<Form> {
        self.vectors.iter().map(|v| Form::from_coords(self.n, self.k, v)).collect()
    }

    pub fn echelon(&self) -> Echelon {
        Echelon::from_vectors(&self.vectors)
    }

    pub fn contains_coords(&self, v: &SparseVec) -> bool {
        self.echelon().contains(v)
    }

    pub fn contains(&self, f: &Form) -> Result<bool> {
        Ok(self.contains_coords(&f.to_coords()?))
    }

    /// Same subspace of `Λ^k`.
    pub fn same_span(&self, other: &SpaceBasis) -> bool {
        self.n == other.n && self.k == other.k && crate::linalg::same_span(&self.vectors, &other.vectors)
    }

    pub fn is_subspace_of(&self, other: &SpaceBasis) -> bool {
        let e = other.echelon();
        self.vectors.iter().all(|v| e.contains(v))
    }

    fn tagged(&self) -> Echelon {
        let mut e = Echelon::tagged();
        for v in &self.vectors {
            e.insert(v.clone());
        }
        e
    }
}

/// Matrix of a linear map with labelled domain and codomain bases.
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub domain: SpaceBasis,
    pub codomain: SpaceBasis,
    /// `codomain.dim()` rows by `domain.dim()` columns.
    pub matrix: DenseMatrix,
}

impl LinearMap {
    fn columns(&self) -> Vec<SparseVec> {
        (0..self.domain.dim())
            .map(|j| SparseVec::from_entries(self.matrix.iter().enumerate().map(|(i, row)| (i, row[j].clone()))))
            .collect()
    }

    pub fn rank(&self) -> usize {
        Echelon::from_vectors(&self.columns()).rank()
    }

    pub fn nullity(&self) -> usize {
        self.domain.dim() - self.rank()
    }

    pub fn kernel_basis(&self) -> SpaceBasis {
        let combos = kernel_of_columns(&self.columns());
        let vectors = combos
            .iter()
            .map(|c| lincomb(c.iter().map(|(j, x)| (x.clone(), &self.domain.vectors()[*j]))))
            .collect();
        SpaceBasis::from_independent(self.domain.n(), self.domain.k(), vectors)
    }

    pub fn image_basis(&self) -> SpaceBasis {
        let images: Vec<SparseVec> = self
            .columns()
            .iter()
            .map(|c| lincomb(c.iter().map(|(i, x)| (x.clone(), &self.codomain.vectors()[*i]))))
            .collect();
        SpaceBasis::from_independent(self.codomain.n(), self.codomain.k(), crate::linalg::span_basis(&images))
    }
}

/// Matrix of `f` from `domain` to `codomain`.
///
/// Fails with [`Error::Containment`] naming the first image that leaves the
/// codomain span.
pub fn matrix_of_map<F>(f: F, domain: &SpaceBasis, codomain: &SpaceBasis) -> Result<LinearMap>
where
    F: Fn(&Form) -> Form,
{
    let solver = codomain.tagged();
    let mut matrix = vec![vec![Q::zero(); domain.dim()]; codomain.dim()];
    for (j, x) in domain.forms().iter().enumerate() {
        let y = f(x);
        if y.n() != codomain.n() || (y.k() != codomain.k() && !y.is_zero()) {
            return Err(Error::Containment { vector: y.to_string() });
        }
        let coords = if y.is_zero() { SparseVec::new() } else { y.to_coords()? };
        let sol = solver.solve(&coords).ok_or_else(|| Error::Containment { vector: y.to_string() })?;
        for (i, c) in sol.iter() {
            matrix[*i][j] = c.clone();
        }
    }
    Ok(LinearMap { domain: domain.clone(), codomain: codomain.clone(), matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::sp1::casimir;
    use num_traits::One;

    #[test]
    fn identity_and_zero_matrices() {
        let b = SpaceBasis::from_forms(&[Form::e(1, &[0]), Form::e(1, &[1]), Form::e(1, &[2])]).unwrap();
        let id = matrix_of_map(|f| f.clone(), &b, &b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(id.matrix[i][j], if i == j { Q::one() } else { Q::zero() });
            }
        }
        let z = matrix_of_map(|f| Form::zero(f.n(), f.k()), &b, &b).unwrap();
        assert!(z.matrix.iter().flatten().all(Zero::is_zero));
        assert_eq!(z.rank(), 0);
        assert_eq!(z.kernel_basis().dim(), 3);
    }

    #[test]
    fn casimir_on_one_forms_is_minus_three() {
        let b = SpaceBasis::full(1, 1);
        let m = matrix_of_map(casimir, &b, &b).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.matrix[i][j], if i == j { q(-3) } else { Q::zero() });
            }
        }
    }

    #[test]
    fn wedge_with_e0_has_rank_three() {
        let e0 = Form::e(1, &[0]);
        let m = matrix_of_map(|f| f.wedge(&e0).unwrap(), &SpaceBasis::full(1, 1), &SpaceBasis::full(1, 2)).unwrap();
        assert_eq!(m.rank(), 3);
        let ker = m.kernel_basis();
        assert_eq!(ker.dim(), 1);
        assert!(ker.same_span(&SpaceBasis::from_forms(&[e0]).unwrap()));
        assert_eq!(m.rank() + m.nullity(), 4);
        assert_eq!(m.image_basis().dim(), 3);
    }

    #[test]
    fn containment_error_is_reported() {
        let b = SpaceBasis::from_forms(&[Form::e(1, &[0])]).unwrap();
        let err = matrix_of_map(|f| f.add(&Form::e(1, &[1])), &b, &b).unwrap_err();
        assert!(matches!(err, Error::Containment { .. }));
    }
}
