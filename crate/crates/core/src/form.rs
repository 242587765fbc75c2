//! Sparse exterior forms on R^{4n} with polynomial coefficients.
//!
//! Coordinates are `x_{4a+b}` for block `a in 0..n` and `b in 0..4`, and the
//! basis 1-forms are `e^i = dx_i`. A basis k-form is a [`MultiIndex`], stored
//! as a bitmask; its canonical representative lists indices in increasing
//! order and any permutation sign lives in the coefficient.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::linalg::{fmt_q, q, SparseVec, Q};
use crate::poly::Poly;

/// Maximum number of 1-form indices representable (`4n <= 64`).
pub const MAX_INDICES: usize = 64;

/// Strictly increasing index set naming the basis form `e^{i_1 ... i_k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(u64);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn from_bits(bits: u64) -> Self {
        MultiIndex(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn single(i: usize) -> Self {
        debug_assert!(i < MAX_INDICES);
        MultiIndex(1u64 << i)
    }

    /// Canonical index set from a strictly increasing list.
    pub fn new(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        let mut prev: Option<usize> = None;
        for &i in indices {
            if i >= MAX_INDICES {
                return Err(Error::Input(format!("index {i} out of range")));
            }
            if prev.is_some_and(|p| p >= i) {
                return Err(Error::Input(format!("indices {indices:?} are not strictly increasing")));
            }
            prev = Some(i);
            bits |= 1 << i;
        }
        Ok(MultiIndex(bits))
    }

    /// Sort an arbitrary index list, returning the permutation sign, or
    /// `None` if an index repeats.
    pub fn from_unsorted(indices: &[usize]) -> Option<(Self, i64)> {
        let mut acc = (MultiIndex::EMPTY, 1i64);
        for &i in indices {
            let (m, s) = acc;
            let sign = m.wedge_sign(MultiIndex::single(i))?;
            acc = (MultiIndex(m.0 | 1 << i), s * sign);
        }
        Some(acc)
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Sign of `e^self ∧ e^other` relative to the canonical ordering of the
    /// union, or `None` when the sets overlap.
    pub fn wedge_sign(self, other: MultiIndex) -> Option<i64> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        for j in other.iter() {
            swaps += (self.0 >> j).count_ones();
        }
        Some(if swaps % 2 == 0 { 1 } else { -1 })
    }

    pub fn union(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 | other.0)
    }

    pub fn without(self, i: usize) -> MultiIndex {
        MultiIndex(self.0 & !(1 << i))
    }

    pub fn complement(self, dim: usize) -> MultiIndex {
        let full = if dim == 64 { u64::MAX } else { (1u64 << dim) - 1 };
        MultiIndex(full & !self.0)
    }

    /// Number of indices falling in the 4-block `a`.
    pub fn block_count(self, a: usize) -> usize {
        ((self.0 >> (4 * a)) & 0xF).count_ones() as usize
    }
}

impl Ord for MultiIndex {
    /// Lexicographic order on the increasing index lists.
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            return Ordering::Equal;
        }
        let diff = self.0 ^ other.0;
        let d = diff.trailing_zeros();
        let self_has_d = self.0 >> d & 1 == 1;
        let without_d = if self_has_d { other.0 } else { self.0 };
        // The set lacking d either ends before d (a prefix, hence smaller) or
        // continues with something larger than d.
        let without_continues = d < 63 && (without_d >> (d + 1)) != 0;
        if self_has_d == without_continues {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let s: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "e^{{{}}}", s.join(","))
    }
}

/// The ordered basis of `Λ^k(R^{4n})` with a reverse lookup.
#[derive(Debug)]
pub struct LambdaSpace {
    pub n: usize,
    pub k: usize,
    indices: Vec<MultiIndex>,
    pos: HashMap<MultiIndex, usize>,
}

impl LambdaSpace {
    fn build(n: usize, k: usize) -> Self {
        let dim = 4 * n;
        let mut indices = Vec::new();
        if k <= dim {
            subsets(dim, k, &mut |m| indices.push(m));
        }
        indices.sort();
        let pos = indices.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        Self { n, k, indices, pos }
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn index(&self, i: usize) -> MultiIndex {
        self.indices[i]
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, m: MultiIndex) -> usize {
        self.pos[&m]
    }
}

fn subsets(dim: usize, k: usize, f: &mut impl FnMut(MultiIndex)) {
    fn rec(start: usize, dim: usize, left: usize, bits: u64, f: &mut impl FnMut(MultiIndex)) {
        if left == 0 {
            f(MultiIndex(bits));
            return;
        }
        for i in start..=dim - left {
            rec(i + 1, dim, left - 1, bits | 1 << i, f);
        }
    }
    rec(0, dim, k, 0, f);
}

static LAMBDA: std::sync::LazyLock<Cache<(usize, usize), LambdaSpace>> = std::sync::LazyLock::new(Cache::new);

/// Shared basis of `Λ^k(R^{4n})`.
pub fn lambda(n: usize, k: usize) -> Arc<LambdaSpace> {
    LAMBDA.get_or_init(&(n, k), || LambdaSpace::build(n, k))
}

pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || k > n || n < 0 {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Homogeneous degree-k form on R^{4n} with polynomial coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    n: usize,
    k: usize,
    terms: BTreeMap<MultiIndex, Poly>,
}

impl Form {
    pub fn zero(n: usize, k: usize) -> Self {
        assert!(4 * n <= MAX_INDICES, "at most {} coordinates supported", MAX_INDICES);
        Self { n, k, terms: BTreeMap::new() }
    }

    /// The constant function 1 as a 0-form.
    pub fn one(n: usize) -> Self {
        Self::basis(n, MultiIndex::EMPTY)
    }

    pub fn basis(n: usize, m: MultiIndex) -> Self {
        let mut f = Self::zero(n, m.degree());
        f.add_term(m, Poly::one(4 * n));
        f
    }

    /// `e^{i_1...i_k}` from an increasing index list (panics on bad input;
    /// parsers should go through [`MultiIndex::new`]).
    pub fn e(n: usize, indices: &[usize]) -> Self {
        let (m, s) = MultiIndex::from_unsorted(indices).expect("repeated index");
        Self::basis(n, m).scale(&q(s))
    }

    pub fn from_coeff(n: usize, m: MultiIndex, p: Poly) -> Self {
        let mut f = Self::zero(n, m.degree());
        f.add_term(m, p);
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn nvars(&self) -> usize {
        4 * self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: MultiIndex) -> Poly {
        self.terms.get(&m).cloned().unwrap_or_else(|| Poly::zero(self.nvars()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.values().all(Poly::is_constant)
    }

    /// Largest polynomial degree among the coefficients.
    pub fn poly_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(Poly::degree).max()
    }

    pub fn add_term(&mut self, m: MultiIndex, p: Poly) {
        assert_eq!(m.degree(), self.k, "term degree mismatch");
        assert!(m.max_index().is_none_or(|i| i < 4 * self.n), "index out of range for n={}", self.n);
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(c) => {
                *c = c.add(&p);
                if c.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, p);
            }
        }
    }

    pub fn add_scaled_term(&mut self, m: MultiIndex, p: &Poly, c: &Q) {
        if c.is_zero() {
            return;
        }
        self.add_term(m, p.scale(c));
    }

    fn check_compatible(&self, other: &Form) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Input(format!("block counts differ: n={} vs n={}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Form {
        assert!(self.n == other.n && self.k == other.k, "adding forms of different type");
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.add_term(*m, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> Form {
        if c.is_zero() {
            return Form::zero(self.n, self.k);
        }
        Form { n: self.n, k: self.k, terms: self.terms.iter().map(|(m, p)| (*m, p.scale(c))).collect() }
    }

    pub fn mul_poly(&self, p: &Poly) -> Form {
        let mut out = Form::zero(self.n, self.k);
        for (m, c) in &self.terms {
            out.add_term(*m, c.mul(p));
        }
        out
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.check_compatible(other)?;
        let k = self.k + other.k;
        let mut out = Form::zero(self.n, k);
        if k > 4 * self.n {
            return Ok(out);
        }
        for (ma, pa) in &self.terms {
            for (mb, pb) in &other.terms {
                if let Some(s) = ma.wedge_sign(*mb) {
                    out.add_term(ma.union(*mb), pa.mul(pb).scale(&q(s)));
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative: `d(p e^I) = sum_i (∂p/∂x_i) e^i ∧ e^I`.
    pub fn d(&self) -> Form {
        let mut out = Form::zero(self.n, self.k + 1);
        if self.k + 1 > 4 * self.n {
            return out;
        }
        for (m, p) in &self.terms {
            for i in 0..4 * self.n {
                if m.contains(i) {
                    continue;
                }
                let dp = p.derivative(i);
                if dp.is_zero() {
                    continue;
                }
                let s = MultiIndex::single(i).wedge_sign(*m).expect("disjoint");
                out.add_term(m.union(MultiIndex::single(i)), dp.scale(&q(s)));
            }
        }
        out
    }

    /// Hodge star for the flat metric with orientation `e^0 ∧ ... ∧ e^{4n-1}`,
    /// normalised so that `α ∧ *α = |α|^2 vol`.
    pub fn hodge_star(&self) -> Form {
        let dim = 4 * self.n;
        let mut out = Form::zero(self.n, dim - self.k);
        for (m, p) in &self.terms {
            let c = m.complement(dim);
            let s = m.wedge_sign(c).expect("complement is disjoint");
            out.add_term(c, p.scale(&q(s)));
        }
        out
    }

    /// Apply a linear map given on basis elements, coefficient-wise.
    pub fn map_basis<F>(&self, target_k: usize, mut f: F) -> Form
    where
        F: FnMut(MultiIndex) -> Vec<(MultiIndex, Q)>,
    {
        let mut out = Form::zero(self.n, target_k);
        for (m, p) in &self.terms {
            for (m2, c) in f(*m) {
                out.add_scaled_term(m2, p, &c);
            }
        }
        out
    }

    /// Coordinates of a constant form in the basis of `Λ^k`.
    pub fn to_coords(&self) -> Result<SparseVec> {
        let space = lambda(self.n, self.k);
        let mut entries = Vec::with_capacity(self.terms.len());
        for (m, p) in &self.terms {
            if !p.is_constant() {
                return Err(Error::Input("form has non-constant coefficients".into()));
            }
            entries.push((space.position(*m), p.constant_term()));
        }
        Ok(SparseVec::from_entries(entries))
    }

    pub fn from_coords(n: usize, k: usize, v: &SparseVec) -> Form {
        let space = lambda(n, k);
        let mut out = Form::zero(n, k);
        for (i, c) in v.iter() {
            out.add_term(space.index(*i), Poly::constant(4 * n, c.clone()));
        }
        out
    }

    /// Split into (basis-coefficient polynomial, constant coordinate vector)
    /// pairs keyed by monomial: `form = sum_m x^m * v_m`.
    pub fn by_monomial(&self) -> BTreeMap<crate::poly::Monomial, SparseVec> {
        let space = lambda(self.n, self.k);
        let mut acc: BTreeMap<crate::poly::Monomial, Vec<(usize, Q)>> = BTreeMap::new();
        for (m, p) in &self.terms {
            let i = space.position(*m);
            for (mono, c) in p.terms() {
                acc.entry(mono.clone()).or_default().push((i, c.clone()));
            }
        }
        acc.into_iter().map(|(m, es)| (m, SparseVec::from_entries(es))).collect()
    }

    /// Inverse of [`Form::by_monomial`].
    pub fn from_monomials<'a, I>(n: usize, k: usize, parts: I) -> Form
    where
        I: IntoIterator<Item = (&'a crate::poly::Monomial, &'a SparseVec)>,
    {
        let space = lambda(n, k);
        let mut out = Form::zero(n, k);
        for (mono, v) in parts {
            for (i, c) in v.iter() {
                out.add_term(space.index(*i), Poly::monomial(mono.clone(), c.clone()));
            }
        }
        out
    }
}

impl Form {
    /// Random form with `nterms` basis terms, each carrying a random
    /// polynomial of degree at most `max_deg` with coefficients in `{-2,-1,1,2}`.
    pub fn random<R: rand::Rng>(rng: &mut R, n: usize, k: usize, max_deg: u32, nterms: usize) -> Form {
        let space = lambda(n, k);
        let mut out = Form::zero(n, k);
        if space.dim() == 0 {
            return out;
        }
        for _ in 0..nterms {
            let m = space.index(rng.gen_range(0..space.dim()));
            let nt = 1 + rng.gen_range(0..2);
            let p = Poly::random(rng, 4 * n, max_deg, nt);
            out.add_term(m, p);
        }
        out
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, p)| {
                if p.is_constant() {
                    let c = p.constant_term();
                    if c.is_one() {
                        format!("{m}")
                    } else {
                        format!("{}·{m}", fmt_q(&c))
                    }
                } else {
                    format!("({p})·{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order_on_index_sets() {
        let a = MultiIndex::new(&[0, 1]).unwrap();
        let b = MultiIndex::new(&[0, 2]).unwrap();
        let c = MultiIndex::new(&[1, 2]).unwrap();
        let d = MultiIndex::new(&[0]).unwrap();
        let e = MultiIndex::new(&[0, 1, 3]).unwrap();
        assert!(a < b && b < c && d < a && a < e && e < b);
    }

    #[test]
    fn basis_listing_is_sorted_and_complete() {
        let l = lambda(2, 3);
        assert_eq!(l.dim(), 56);
        assert!(l.indices().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(l.index(0).indices(), vec![0, 1, 2]);
    }

    #[test]
    fn wedge_examples() {
        let e0 = Form::e(1, &[0]);
        let e1 = Form::e(1, &[1]);
        assert_eq!(e0.wedge(&e1).unwrap(), Form::e(1, &[0, 1]));
        assert!(Form::e(1, &[0, 1]).wedge(&e0).unwrap().is_zero());
        let w = Form::e(1, &[0, 1]).sub(&Form::e(1, &[2, 3]));
        assert_eq!(w.wedge(&w).unwrap(), Form::e(1, &[0, 1, 2, 3]).scale(&q(-2)));
    }

    #[test]
    fn wedge_rejects_mismatched_n() {
        assert!(matches!(Form::e(1, &[0]).wedge(&Form::e(2, &[0])), Err(Error::Input(_))));
    }

    #[test]
    fn exterior_derivative_examples() {
        let x0 = Poly::var(4, 0);
        let x1 = Poly::var(4, 1);
        let f = Form::e(1, &[1]).mul_poly(&x0);
        assert_eq!(f.d(), Form::e(1, &[0, 1]));
        assert!(Form::e(1, &[0, 2]).scale(&q(5)).d().is_zero());
        let g = Form::e(1, &[2]).mul_poly(&x0.mul(&x1));
        let expect = Form::e(1, &[0, 2]).mul_poly(&x1).add(&Form::e(1, &[1, 2]).mul_poly(&x0));
        assert_eq!(g.d(), expect);
    }

    #[test]
    fn hodge_star_examples() {
        assert_eq!(Form::e(1, &[0, 1]).hodge_star(), Form::e(1, &[2, 3]));
        assert_eq!(Form::one(1).hodge_star(), Form::e(1, &[0, 1, 2, 3]));
        let sd = Form::e(1, &[0, 1]).add(&Form::e(1, &[2, 3]));
        assert_eq!(sd.hodge_star(), sd);
    }

    #[test]
    fn unsorted_sign() {
        let (m, s) = MultiIndex::from_unsorted(&[3, 1]).unwrap();
        assert_eq!((m.indices(), s), (vec![1, 3], -1));
        assert!(MultiIndex::from_unsorted(&[2, 2]).is_none());
        assert!(MultiIndex::new(&[2, 1]).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(4, -1), 0);
    }
}
