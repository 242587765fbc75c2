//! Exact rational linear algebra on sparse vectors.
//!
//! Everything here works over `BigRational`. Vectors are sorted lists of
//! `(column, value)` pairs with no stored zeros, and the central object is
//! [`Echelon`], an incrementally maintained reduced row echelon form. Rank,
//! kernel, span membership and coordinate solves all go through it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Sparse rational vector, entries sorted by column, zeros never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        Self { entries: vec![(i, Q::one())] }
    }

    /// Build from arbitrary (possibly repeated, unsorted) entries.
    pub fn from_entries<I: IntoIterator<Item = (usize, Q)>>(it: I) -> Self {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, v) in it {
            if v.is_zero() {
                continue;
            }
            let slot = acc.entry(i).or_insert_with(Q::zero);
            *slot += v;
        }
        Self { entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
    }

    pub fn from_dense(values: &[Q]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Q)> {
        self.entries.iter()
    }

    pub fn get(&self, i: usize) -> Q {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(p) => self.entries[p].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn leading(&self) -> Option<&(usize, Q)> {
        self.entries.first()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Self { entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect() }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: &Q, other: &SparseVec) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let s = x + y * c;
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        Self { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> Self {
        self.axpy(&Q::one(), other)
    }

    pub fn sub(&self, other: &SparseVec) -> Self {
        self.axpy(&-Q::one(), other)
    }

    pub fn dot(&self, other: &SparseVec) -> Q {
        let mut s = Q::zero();
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        while let (Some((i, x)), Some((j, y))) = (a.peek(), b.peek()) {
            if i < j {
                a.next();
            } else if j < i {
                b.next();
            } else {
                s += x * y;
                a.next();
                b.next();
            }
        }
        s
    }

    /// Relabel columns through `f`; entries mapping to `None` are dropped.
    pub fn remap(&self, f: impl Fn(usize) -> Option<usize>) -> Self {
        Self::from_entries(self.entries.iter().filter_map(|(i, v)| f(*i).map(|j| (j, v.clone()))))
    }
}

/// Linear combination `sum_i c_i v_i` accumulated in one pass.
pub fn lincomb<'a, I>(terms: I) -> SparseVec
where
    I: IntoIterator<Item = (Q, &'a SparseVec)>,
{
    let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
    for (c, v) in terms {
        if c.is_zero() {
            continue;
        }
        for (i, x) in v.iter() {
            let slot = acc.entry(*i).or_insert_with(Q::zero);
            *slot += x * &c;
        }
    }
    SparseVec { entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect() }
}

/// Reduced row echelon form built one vector at a time.
///
/// Stored rows have pivot value 1 and are zero in every other pivot column.
/// With tagging enabled each row also carries the combination of inserted
/// vectors that produced it, which turns dependent insertions into kernel
/// vectors and allows coordinate solves.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    tags: Vec<SparseVec>,
    pivots: BTreeMap<usize, usize>,
    tagged: bool,
    inserted: usize,
}

/// Result of [`Echelon::insert`].
#[derive(Clone, Debug)]
pub enum Insert {
    Independent,
    /// The vector was dependent; the payload (when tagging) is a nonzero
    /// combination of inserted vectors summing to zero.
    Dependent(Option<SparseVec>),
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tagged() -> Self {
        Self { tagged: true, ..Self::default() }
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a SparseVec>>(vs: I) -> Self {
        let mut e = Self::new();
        for v in vs {
            e.insert(v.clone());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    fn reduce_with_tag(&self, v: &SparseVec, tag: Option<SparseVec>) -> (SparseVec, Option<SparseVec>) {
        let hits: Vec<(Q, usize)> = v
            .iter()
            .filter_map(|(c, x)| self.pivots.get(c).map(|&r| (-x.clone(), r)))
            .collect();
        if hits.is_empty() {
            return (v.clone(), tag);
        }
        let reduced = lincomb(
            std::iter::once((Q::one(), v)).chain(hits.iter().map(|(c, r)| (c.clone(), &self.rows[*r]))),
        );
        let tag = tag.map(|t| {
            lincomb(std::iter::once((Q::one(), &t)).chain(hits.iter().map(|(c, r)| (c.clone(), &self.tags[*r]))))
        });
        (reduced, tag)
    }

    /// Residue of `v` modulo the current row space.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_with_tag(v, None).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn insert(&mut self, v: SparseVec) -> Insert {
        let tag = self.tagged.then(|| SparseVec::unit(self.inserted));
        self.inserted += 1;
        let (red, tag) = self.reduce_with_tag(&v, tag);
        let Some((p, lead)) = red.leading().cloned() else {
            return Insert::Dependent(tag);
        };
        let inv = lead.recip();
        let row = red.scale(&inv);
        let tag = tag.map(|t| t.scale(&inv));
        for i in 0..self.rows.len() {
            let c = self.rows[i].get(p);
            if !c.is_zero() {
                let neg = -c;
                self.rows[i] = self.rows[i].axpy(&neg, &row);
                if let Some(t) = &tag {
                    self.tags[i] = self.tags[i].axpy(&neg, t);
                }
            }
        }
        self.pivots.insert(p, self.rows.len());
        self.rows.push(row);
        if let Some(t) = tag {
            self.tags.push(t);
        }
        Insert::Independent
    }

    /// Express `v` as a combination of the inserted vectors (tagged mode only).
    /// Returns `None` when `v` is outside the span.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.tagged, "solve requires a tagged echelon");
        let (red, tag) = self.reduce_with_tag(v, Some(SparseVec::new()));
        if red.is_zero() {
            // reduce subtracted sum c_r tag_r; v = -(that) in terms of inserted vectors
            tag.map(|t| t.scale(&-Q::one()))
        } else {
            None
        }
    }

    /// Null space of the matrix whose rows were inserted, in `ncols` columns.
    pub fn null_space(&self, ncols: usize) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for f in 0..ncols {
            if self.pivots.contains_key(&f) {
                continue;
            }
            let mut entries = vec![(f, Q::one())];
            for (&p, &r) in &self.pivots {
                let c = self.rows[r].get(f);
                if !c.is_zero() {
                    entries.push((p, -c));
                }
            }
            out.push(SparseVec::from_entries(entries));
        }
        out
    }
}

pub fn rank(vs: &[SparseVec]) -> usize {
    Echelon::from_vectors(vs).rank()
}

/// Basis of `{x : <row_i, x> = 0 for all i}` in `ncols` coordinates.
pub fn kernel_of_rows(rows: &[SparseVec], ncols: usize) -> Vec<SparseVec> {
    Echelon::from_vectors(rows).null_space(ncols)
}

/// Basis of the null space of the map whose columns are `cols`:
/// combinations `x` with `sum_j x_j cols_j = 0`.
pub fn kernel_of_columns(cols: &[SparseVec]) -> Vec<SparseVec> {
    let mut e = Echelon::tagged();
    let mut out = Vec::new();
    for c in cols {
        if let Insert::Dependent(Some(t)) = e.insert(c.clone()) {
            out.push(t);
        }
    }
    out
}

/// Common kernel of the operators `M_b + shift_b * id` on a `dim`-dimensional
/// space, each `M_b` given by its columns.
pub fn joint_kernel(ops: &[(&[SparseVec], Q)], dim: usize) -> Vec<SparseVec> {
    let cols: Vec<SparseVec> = (0..dim)
        .map(|j| {
            ops.iter().enumerate().fold(SparseVec::new(), |acc, (b, (m, shift))| {
                let col = m[j].axpy(shift, &SparseVec::unit(j));
                acc.add(&col.remap(|i| Some(b * dim + i)))
            })
        })
        .collect();
    kernel_of_columns(&cols)
}

/// Echelon basis of the span of `vs`.
pub fn span_basis(vs: &[SparseVec]) -> Vec<SparseVec> {
    Echelon::from_vectors(vs).rows().to_vec()
}

pub fn same_span(a: &[SparseVec], b: &[SparseVec]) -> bool {
    let ea = Echelon::from_vectors(a);
    let eb = Echelon::from_vectors(b);
    ea.rank() == eb.rank() && b.iter().all(|v| ea.contains(v))
}

pub fn span_contains(basis: &[SparseVec], v: &[SparseVec]) -> bool {
    let e = Echelon::from_vectors(basis);
    v.iter().all(|x| e.contains(x))
}

/// Dense matrix in row-major order.
pub type DenseMatrix = Vec<Vec<Q>>;

pub fn dense_rank(m: &DenseMatrix) -> usize {
    let rows: Vec<SparseVec> = m.iter().map(|r| SparseVec::from_dense(r)).collect();
    rank(&rows)
}

/// Render a rational as `p/q` or an integer string.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Q::new(num, den))
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> SparseVec {
        SparseVec::from_dense(&xs.iter().map(|&x| q(x)).collect::<Vec<_>>())
    }

    #[test]
    fn zero_and_identity_ranks() {
        let zero: Vec<SparseVec> = (0..4).map(|_| SparseVec::new()).collect();
        assert_eq!(rank(&zero), 0);
        assert_eq!(kernel_of_columns(&zero).len(), 4);
        let id: Vec<SparseVec> = (0..4).map(SparseVec::unit).collect();
        assert_eq!(rank(&id), 4);
        assert!(kernel_of_columns(&id).is_empty());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let rows = vec![v(&[1, 2, 3, 4]), v(&[2, 4, 6, 8]), v(&[0, 1, -1, 2])];
        let ker = kernel_of_rows(&rows, 4);
        assert_eq!(ker.len(), 2);
        for k in &ker {
            for r in &rows {
                assert!(r.dot(k).is_zero());
            }
        }
    }

    #[test]
    fn column_kernel_and_solve() {
        let cols = vec![v(&[1, 0, 1]), v(&[0, 1, 1]), v(&[1, 1, 2])];
        let ker = kernel_of_columns(&cols);
        assert_eq!(ker.len(), 1);
        let k = &ker[0];
        let combo = lincomb((0..3).map(|j| (k.get(j), &cols[j])));
        assert!(combo.is_zero());

        let e = {
            let mut e = Echelon::tagged();
            for c in &cols[..2] {
                e.insert(c.clone());
            }
            e
        };
        let target = v(&[2, -3, -1]);
        let x = e.solve(&target).unwrap();
        let back = lincomb((0..2).map(|j| (x.get(j), &cols[j])));
        assert_eq!(back, target);
        assert!(e.solve(&v(&[0, 0, 1])).is_none());
    }

    #[test]
    fn parse_and_format_rationals() {
        for s in ["0", "7", "-3/4", "5/10"] {
            let x = parse_q(s).unwrap();
            assert_eq!(parse_q(&fmt_q(&x)).unwrap(), x);
        }
        assert_eq!(fmt_q(&parse_q("6/4").unwrap()), "3/2");
        assert!(parse_q("1/0").is_none());
        assert!(parse_q("1.5").is_none());
    }
}
