//! The `sp(1)` action generated by the hypercomplex structure `I, J, K`.
//!
//! On each 4-block `(e^{4a}, ..., e^{4a+3})` the generators act on 1-forms by
//! `e^1 = I e^0`, `e^2 = J e^0`, `e^3 = K e^0` with `I^2 = J^2 = K^2 = -1` and
//! `IJ = K`. They extend to `Λ^k` as derivations and act trivially on
//! polynomial coefficients.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock};

use serde::{Deserialize, Serialize};

use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::form::{lambda, Form, MultiIndex};
use crate::linalg::{lincomb, q, SparseVec, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    I,
    J,
    K,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::I, Generator::J, Generator::K];

    /// `[self, other] = 2 * third` for the cyclic order `I, J, K`.
    pub fn bracket(self, other: Generator) -> Option<(i64, Generator)> {
        use Generator::*;
        match (self, other) {
            (I, J) => Some((2, K)),
            (J, K) => Some((2, I)),
            (K, I) => Some((2, J)),
            (J, I) => Some((-2, K)),
            (K, J) => Some((-2, I)),
            (I, K) => Some((-2, J)),
            _ => None,
        }
    }

    /// Position of the generator among the imaginary units (`I -> 1`, ...).
    pub fn unit_index(self) -> usize {
        match self {
            Generator::I => 1,
            Generator::J => 2,
            Generator::K => 3,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Generator::I => "I",
            Generator::J => "J",
            Generator::K => "K",
        };
        f.write_str(s)
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" => Ok(Generator::I),
            "J" | "j" => Ok(Generator::J),
            "K" | "k" => Ok(Generator::K),
            other => Err(Error::Input(format!("unknown generator {other:?} (expected I, J or K)"))),
        }
    }
}

/// Within-block table: `(image offset, sign)` for offsets 0..4.
const fn block_table(g: Generator) -> [(usize, i64); 4] {
    match g {
        Generator::I => [(1, 1), (0, -1), (3, 1), (2, -1)],
        Generator::J => [(2, 1), (3, -1), (0, -1), (1, 1)],
        Generator::K => [(3, 1), (2, 1), (1, -1), (0, -1)],
    }
}

/// Image of `e^i` under `g`, as `(index, sign)`.
pub fn act_on_one_form(g: Generator, i: usize, n: usize) -> Result<(usize, i64)> {
    if i >= 4 * n {
        return Err(Error::Domain(format!("index {i} out of range for n={n}")));
    }
    let (off, s) = block_table(g)[i % 4];
    Ok((i - i % 4 + off, s))
}

/// Which 1-form indices a derivation acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Support(pub u64);

impl Support {
    pub fn all(n: usize) -> Self {
        Support(if 4 * n == 64 { u64::MAX } else { (1u64 << (4 * n)) - 1 })
    }

    /// Only the distinguished block `H_0 = span(e^0..e^3)`.
    pub fn head() -> Self {
        Support(0xF)
    }

    /// Every block except `H_0`.
    pub fn tail(n: usize) -> Self {
        Support(Self::all(n).0 & !0xF)
    }
}

/// Derivation image of a basis form, restricted to indices in `support`.
pub fn act_basis(g: Generator, m: MultiIndex, support: Support) -> Vec<(MultiIndex, i64)> {
    let table = block_table(g);
    let mut out = Vec::new();
    for i in m.iter() {
        if support.0 >> i & 1 == 0 {
            continue;
        }
        let (off, s) = table[i % 4];
        let j = i - i % 4 + off;
        if m.contains(j) {
            continue;
        }
        let rest = m.without(i);
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let between = (rest.bits() >> (lo + 1)) & ((1u64 << (hi - lo - 1)) - 1);
        let sign = if between.count_ones() % 2 == 0 { s } else { -s };
        out.push((rest.union(MultiIndex::single(j)), sign));
    }
    out
}

pub fn act(g: Generator, a: &Form) -> Form {
    act_supported(g, a, Support::all(a.n()))
}

pub fn act_supported(g: Generator, a: &Form, support: Support) -> Form {
    a.map_basis(a.k(), |m| act_basis(g, m, support).into_iter().map(|(m2, s)| (m2, q(s))).collect())
}

/// `I^2 + J^2 + K^2`.
pub fn casimir(a: &Form) -> Form {
    casimir_supported(a, Support::all(a.n()))
}

pub fn casimir_supported(a: &Form, support: Support) -> Form {
    let mut out = Form::zero(a.n(), a.k());
    for g in Generator::ALL {
        let once = act_supported(g, a, support);
        out = out.add(&act_supported(g, &once, support));
    }
    out
}

/// Action of `aI + bJ + cK` on forms.
pub fn act_combination(coeffs: [&Q; 3], a: &Form) -> Form {
    let mut out = Form::zero(a.n(), a.k());
    for (g, c) in Generator::ALL.iter().zip(coeffs) {
        out = out.add(&act(*g, a).scale(c));
    }
    out
}

/// Columns of a generator's matrix on `Λ^k(R^{4n})`.
pub fn generator_columns(n: usize, k: usize, g: Generator, support: Support) -> Arc<Vec<SparseVec>> {
    static CACHE: LazyLock<Cache<(usize, usize, Generator, u64), Vec<SparseVec>>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k, g, support.0), || {
        let space = lambda(n, k);
        space
            .indices()
            .iter()
            .map(|m| {
                SparseVec::from_entries(act_basis(g, *m, support).into_iter().map(|(m2, s)| (space.position(m2), q(s))))
            })
            .collect()
    })
}

/// Apply a column-stored matrix to a coordinate vector.
pub fn apply_columns(cols: &[SparseVec], v: &SparseVec) -> SparseVec {
    lincomb(v.iter().map(|(i, c)| (c.clone(), &cols[*i])))
}

/// Columns of the Casimir (restricted to `support`) on `Λ^k(R^{4n})`.
pub fn casimir_columns(n: usize, k: usize, support: Support) -> Arc<Vec<SparseVec>> {
    static CACHE: LazyLock<Cache<(usize, usize, u64), Vec<SparseVec>>> = LazyLock::new(Cache::new);
    CACHE.get_or_init(&(n, k, support.0), || {
        let gens: Vec<_> = Generator::ALL.iter().map(|g| generator_columns(n, k, *g, support)).collect();
        (0..lambda(n, k).dim())
            .map(|i| {
                let mut acc = SparseVec::new();
                for cols in &gens {
                    acc = acc.add(&apply_columns(cols, &cols[i]));
                }
                acc
            })
            .collect()
    })
}
