//! Sp(1) weight combinatorics and the Casimir eigenspaces `E_{k,r} ⊂ Λ^k`.
//!
//! `Λ^k(R^{4n})` splits into blocks ("sectors") indexed by how many indices
//! fall in each 4-block. The `sp(1)` action preserves every sector, so the
//! eigenspaces are computed sector by sector, which keeps the exact
//! eliminations small (at most 216 columns for `n = 3`).

use std::collections::HashMap;
use std::sync::{Arc, LazyLock};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::form::{binomial, lambda, Form};
use crate::linalg::{kernel_of_rows, q, q_frac, SparseVec, Q};
use crate::sp1::{apply_columns, casimir_columns, Support};
use crate::space::SpaceBasis;

/// Casimir eigenvalue `-r(r+2)` of `V_r`.
pub fn casimir_eigenvalue(r: i64) -> i64 {
    -r * (r + 2)
}

/// Binomial with the convention that half-integer or out-of-range lower
/// arguments give zero; `twice_lower` is `2q`.
fn binom_half(top: i64, twice_lower: i64) -> i64 {
    if twice_lower % 2 != 0 {
        return 0;
    }
    binomial(top, twice_lower / 2)
}

/// Multiplicity of the weight `r` in `Λ^k(2n V_1)`.
pub fn weight_multiplicity(n: usize, k: usize, r: i64) -> i64 {
    let (n2, k) = (2 * n as i64, k as i64);
    binom_half(n2, k + r) * binom_half(n2, k - r)
}

/// Multiplicity `ε^n_{k,r}` of `V_r` in `Λ^k(R^{4n})`.
pub fn epsilon(n: usize, k: usize, r: i64) -> i64 {
    if r < 0 {
        return 0;
    }
    weight_multiplicity(n, k, r) - weight_multiplicity(n, k, r + 2)
}

/// A node `(k, r)` of the double complex: `E_{k,r}` sits in `Λ^k` with weight `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridNode {
    pub k: usize,
    pub r: usize,
}

impl GridNode {
    pub fn new(k: usize, r: usize) -> Self {
        Self { k, r }
    }

    /// `0 <= r <= k <= 4n` with `r ≡ k (mod 2)`.
    pub fn validate(self, n: usize) -> Result<Self> {
        if self.k > 4 * n || self.r > self.k || (self.k - self.r) % 2 != 0 {
            return Err(Error::Domain(format!("({}, {}) is not a valid node for n={n}", self.k, self.r)));
        }
        Ok(self)
    }

    pub fn epsilon(self, n: usize) -> i64 {
        epsilon(n, self.k, self.r as i64)
    }

    pub fn dim(self, n: usize) -> usize {
        (self.epsilon(n) as usize) * (self.r + 1)
    }
}

/// Weights `r` that actually occur in `Λ^k(R^{4n})`.
pub fn weights_present(n: usize, k: usize) -> Vec<usize> {
    (0..=k).filter(|r| (k - r) % 2 == 0 && epsilon(n, k, *r as i64) > 0).collect()
}

/// `[m+n, m+n-2, ..., |m-n|]`.
pub fn clebsch_gordon(m: usize, n: usize) -> Vec<usize> {
    let (hi, lo) = if m >= n { (m, n) } else { (n, m) };
    (0..=lo).map(|i| hi + lo - 2 * i).collect()
}

/// Partition of the basis of `Λ^k` by per-block index counts.
#[derive(Debug)]
pub struct Sectors {
    pub n: usize,
    pub k: usize,
    /// `(block counts, positions in Λ^k)`, positions ascending.
    pub groups: Vec<(Vec<u8>, Vec<usize>)>,
    lookup: HashMap<usize, (usize, usize)>,
}

impl Sectors {
    fn build(n: usize, k: usize) -> Self {
        let space = lambda(n, k);
        let mut map: std::collections::BTreeMap<Vec<u8>, Vec<usize>> = Default::default();
        for (i, m) in space.indices().iter().enumerate() {
            let counts: Vec<u8> = (0..n).map(|a| m.block_count(a) as u8).collect();
            map.entry(counts).or_default().push(i);
        }
        let groups: Vec<_> = map.into_iter().collect();
        let mut lookup = HashMap::new();
        for (g, (_, pos)) in groups.iter().enumerate() {
            for (l, p) in pos.iter().enumerate() {
                lookup.insert(*p, (g, l));
            }
        }
        Self { n, k, groups, lookup }
    }

    /// `(sector, local position)` of a global basis position.
    pub fn locate(&self, pos: usize) -> (usize, usize) {
        self.lookup[&pos]
    }

    pub fn sector_of(&self, counts: &[u8]) -> Option<usize> {
        self.groups.iter().position(|(c, _)| c.as_slice() == counts)
    }

    /// Restrict a global vector lying in sector `g` to local coordinates.
    pub fn to_local(&self, g: usize, v: &SparseVec) -> SparseVec {
        v.remap(|i| {
            let (gg, l) = self.locate(i);
            (gg == g).then_some(l)
        })
    }

    pub fn to_global(&self, g: usize, v: &SparseVec) -> SparseVec {
        let pos = &self.groups[g].1;
        v.remap(|l| Some(pos[l]))
    }
}

pub fn sectors(n: usize, k: usize) -> Arc<Sectors> {
    static CACHE: LazyLock<Cache<(usize, usize), Sectors>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k), || Sectors::build(n, k))
}

/// Kernel of `M + shift * id` restricted to sector `g`, where `M` is given by
/// its columns on `Λ^k` and preserves sectors.
pub fn sector_eigenvectors(sec: &Sectors, g: usize, rows: &[(&[SparseVec], i64)]) -> Vec<SparseVec> {
    let pos = &sec.groups[g].1;
    let mut local_rows = Vec::new();
    for (cols, shift) in rows {
        // Sector-preserving operators built from sp(1) derivations are
        // symmetric, so columns double as rows.
        for (l, &p) in pos.iter().enumerate() {
            let mut row = sec.to_local(g, &cols[p]);
            if *shift != 0 {
                row = row.axpy(&q(*shift), &SparseVec::unit(l));
            }
            local_rows.push(row);
        }
    }
    kernel_of_rows(&local_rows, pos.len()).iter().map(|v| sec.to_global(g, v)).collect()
}

/// Basis of `E_{k,r}` grouped by sector.
#[derive(Debug)]
pub struct Eigenspace {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    /// One entry per sector of `Λ^k` (possibly empty), in sector order.
    pub by_sector: Vec<Vec<SparseVec>>,
}

impl Eigenspace {
    pub fn dim(&self) -> usize {
        self.by_sector.iter().map(Vec::len).sum()
    }

    pub fn vectors(&self) -> impl Iterator<Item = &SparseVec> {
        self.by_sector.iter().flatten()
    }

    pub fn basis(&self) -> SpaceBasis {
        SpaceBasis::from_independent(self.n, self.k, self.vectors().cloned().collect())
    }
}

/// `E_{k,r}` as the kernel of `Casimir + r(r+2)`, computed and cached once per node.
pub fn eigenspace(n: usize, k: usize, r: usize) -> Arc<Eigenspace> {
    static CACHE: LazyLock<Cache<(usize, usize, usize), Eigenspace>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k, r), || {
        let sec = sectors(n, k);
        let valid = k <= 4 * n && r <= k && (k - r) % 2 == 0;
        let by_sector = if !valid {
            sec.groups.iter().map(|_| Vec::new()).collect()
        } else {
            let cas = casimir_columns(n, k, Support::all(n));
            let shift = -casimir_eigenvalue(r as i64);
            (0..sec.groups.len()).map(|g| sector_eigenvectors(&sec, g, &[(cas.as_slice(), shift)])).collect()
        };
        Eigenspace { n, k, r, by_sector }
    })
}

pub fn eigenspace_basis(n: usize, k: usize, r: usize) -> SpaceBasis {
    eigenspace(n, k, r).basis()
}

/// Columns of the projector `π_{k,r}` on `Λ^k`, built as the Lagrange
/// interpolation polynomial in the Casimir over the eigenvalues present.
pub fn projector(n: usize, k: usize, r: usize) -> Arc<Vec<SparseVec>> {
    static CACHE: LazyLock<Cache<(usize, usize, usize), Vec<SparseVec>>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k, r), || {
        let dim = lambda(n, k).dim();
        let present = weights_present(n, k);
        if !present.contains(&r) {
            return vec![SparseVec::new(); dim];
        }
        let cas = casimir_columns(n, k, Support::all(n));
        let lr = casimir_eigenvalue(r as i64);
        let factors: Vec<(i64, Q)> = present
            .iter()
            .filter(|&&s| s != r)
            .map(|&s| {
                let ls = casimir_eigenvalue(s as i64);
                (ls, q_frac(1, lr - ls))
            })
            .collect();
        (0..dim)
            .map(|i| {
                let mut v = SparseVec::unit(i);
                for (ls, inv) in &factors {
                    let cv = apply_columns(&cas, &v);
                    v = cv.axpy(&q(-ls), &v).scale(inv);
                }
                v
            })
            .collect()
    })
}

/// `π_{k,r}` applied coefficient-wise. Weights that do not occur in degree
/// `k` (wrong parity, `r > k`, or `ε = 0`) give the zero form.
pub fn project(a: &Form, r: usize) -> Form {
    let (n, k) = (a.n(), a.k());
    let mut out = Form::zero(n, k);
    if r > k || (k - r) % 2 != 0 {
        return out;
    }
    let p = projector(n, k, r);
    let space = lambda(n, k);
    for (m, c) in a.terms() {
        for (j, x) in p[space.position(*m)].iter() {
            out.add_scaled_term(space.index(*j), c, x);
        }
    }
    out
}

/// Whether `a` is a Casimir eigenform of weight `r`.
pub fn lies_in(a: &Form, r: usize) -> bool {
    let c = crate::sp1::casimir(a);
    c == a.scale(&q(casimir_eigenvalue(r as i64)))
}

/// One row of the decomposition table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: usize,
    pub r: usize,
    pub epsilon: i64,
    pub dim: usize,
}

/// Every `(k, r)` with `ε^n_{k,r} > 0`, dimensions from the closed formula.
pub fn decomposition_table(n: usize) -> Vec<TableRow> {
    (0..=4 * n)
        .flat_map(|k| {
            weights_present(n, k).into_iter().map(move |r| {
                let e = epsilon(n, k, r as i64);
                TableRow { k, r, epsilon: e, dim: e as usize * (r + 1) }
            })
        })
        .collect()
}

pub fn table_csv(rows: &[TableRow]) -> String {
    let mut s = String::from("k,r,epsilon,dim\n");
    for row in rows {
        s.push_str(&format!("{},{},{},{}\n", row.k, row.r, row.epsilon, row.dim));
    }
    s
}

/// Sum of `(r+1) ε` over one degree; equals `C(4n, k)`.
pub fn row_total(rows: &[TableRow], k: usize) -> usize {
    rows.iter().filter(|r| r.k == k).map(|r| r.dim).sum()
}

pub fn is_zero_form(a: &Form) -> bool {
    a.terms().all(|(_, p)| p.terms().all(|(_, c)| c.is_zero()))
}
