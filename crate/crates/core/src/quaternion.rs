//! Quaternion-valued forms, stored by components in the basis `(1, i, j, k)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::form::Form;
use crate::linalg::{q, Q};

/// Product of basis units: `e_a e_b = sign * e_c` with `e_0 = 1, e_1 = i, e_2 = j, e_3 = k`.
pub const fn unit_mul(a: usize, b: usize) -> (i64, usize) {
    const TABLE: [[(i64, usize); 4]; 4] = [
        [(1, 0), (1, 1), (1, 2), (1, 3)],
        [(1, 1), (-1, 0), (1, 3), (-1, 2)],
        [(1, 2), (-1, 3), (-1, 0), (1, 1)],
        [(1, 3), (1, 2), (-1, 1), (-1, 0)],
    ];
    TABLE[a][b]
}

/// Signed basis unit `±e_u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Unit {
    pub sign: i64,
    pub index: usize,
}

impl Unit {
    pub const ONE: Unit = Unit { sign: 1, index: 0 };

    pub fn all_signed() -> Vec<Unit> {
        (0..4).flat_map(|index| [Unit { sign: 1, index }, Unit { sign: -1, index }]).collect()
    }

    pub fn mul(self, other: Unit) -> Unit {
        let (s, c) = unit_mul(self.index, other.index);
        Unit { sign: self.sign * other.sign * s, index: c }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QForm {
    comps: [Form; 4],
}

impl QForm {
    pub fn new(comps: [Form; 4]) -> Result<Self> {
        let (n, k) = (comps[0].n(), comps[0].k());
        if comps.iter().any(|c| c.n() != n || c.k() != k) {
            return Err(Error::Input("quaternion components must share n and k".into()));
        }
        Ok(Self { comps })
    }

    pub fn zero(n: usize, k: usize) -> Self {
        Self { comps: std::array::from_fn(|_| Form::zero(n, k)) }
    }

    /// `a` placed in the component of unit `u`.
    pub fn from_component(a: &Form, u: usize) -> Self {
        let mut out = Self::zero(a.n(), a.k());
        out.comps[u] = a.clone();
        out
    }

    pub fn real(a: &Form) -> Self {
        Self::from_component(a, 0)
    }

    pub fn n(&self) -> usize {
        self.comps[0].n()
    }

    pub fn k(&self) -> usize {
        self.comps[0].k()
    }

    pub fn component(&self, u: usize) -> &Form {
        &self.comps[u]
    }

    pub fn components(&self) -> &[Form; 4] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Form::is_zero)
    }

    pub fn add(&self, other: &QForm) -> QForm {
        QForm { comps: std::array::from_fn(|u| self.comps[u].add(&other.comps[u])) }
    }

    pub fn sub(&self, other: &QForm) -> QForm {
        QForm { comps: std::array::from_fn(|u| self.comps[u].sub(&other.comps[u])) }
    }

    pub fn scale(&self, c: &Q) -> QForm {
        QForm { comps: std::array::from_fn(|u| self.comps[u].scale(c)) }
    }

    /// Apply a real-linear map to every component.
    pub fn map(&self, f: impl Fn(&Form) -> Form) -> QForm {
        QForm { comps: std::array::from_fn(|u| f(&self.comps[u])) }
    }

    /// Wedge the form parts and multiply the quaternion parts.
    pub fn wedge(&self, other: &QForm) -> Result<QForm> {
        let mut out = QForm::zero(self.n(), self.k() + other.k());
        for a in 0..4 {
            if self.comps[a].is_zero() {
                continue;
            }
            for b in 0..4 {
                let (s, c) = unit_mul(a, b);
                let w = self.comps[a].wedge(&other.comps[b])?;
                out.comps[c] = out.comps[c].add(&w.scale(&q(s)));
            }
        }
        Ok(out)
    }

    /// Right multiplication `α ↦ α·u`.
    pub fn right_mul(&self, u: Unit) -> QForm {
        let mut out = QForm::zero(self.n(), self.k());
        for a in 0..4 {
            let (s, c) = unit_mul(a, u.index);
            out.comps[c] = out.comps[c].add(&self.comps[a].scale(&q(s * u.sign)));
        }
        out
    }

    /// Left multiplication `α ↦ u·α`.
    pub fn left_mul(&self, u: Unit) -> QForm {
        let mut out = QForm::zero(self.n(), self.k());
        for a in 0..4 {
            let (s, c) = unit_mul(u.index, a);
            out.comps[c] = out.comps[c].add(&self.comps[a].scale(&q(s * u.sign)));
        }
        out
    }
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 4] = ["1", "i", "j", "k"];
        let parts: Vec<String> = self
            .comps
            .iter()
            .zip(NAMES)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, name)| format!("({c})·{name}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_table_is_the_quaternion_algebra() {
        assert_eq!(unit_mul(1, 2), (1, 3));
        assert_eq!(unit_mul(2, 1), (-1, 3));
        assert_eq!(unit_mul(3, 3), (-1, 0));
        for a in Unit::all_signed() {
            for b in Unit::all_signed() {
                for c in Unit::all_signed() {
                    assert_eq!(a.mul(b).mul(c), a.mul(b.mul(c)));
                }
            }
        }
    }

    #[test]
    fn right_multiplication_by_i() {
        let a = QForm::new([Form::e(1, &[0]), Form::e(1, &[1]), Form::e(1, &[2]), Form::e(1, &[3])]).unwrap();
        let r = a.right_mul(Unit { sign: 1, index: 1 });
        assert_eq!(r.component(0), &Form::e(1, &[1]).scale(&q(-1)));
        assert_eq!(r.component(1), &Form::e(1, &[0]));
        assert_eq!(r.component(2), &Form::e(1, &[3]));
        assert_eq!(r.component(3), &Form::e(1, &[2]).scale(&q(-1)));
    }

    #[test]
    fn right_multiplication_is_associative() {
        let a = QForm::new([Form::e(1, &[0]), Form::e(1, &[1, 2]).scale(&q(0)), Form::e(1, &[2]), Form::e(1, &[3])]);
        assert!(a.is_err());
        let a = QForm::new([Form::e(1, &[0]), Form::e(1, &[1]), Form::e(1, &[2]).scale(&q(2)), Form::e(1, &[3])]).unwrap();
        for p in Unit::all_signed() {
            for r in Unit::all_signed() {
                assert_eq!(a.right_mul(p.mul(r)), a.right_mul(p).right_mul(r));
                assert_eq!(a.left_mul(p).right_mul(r), a.right_mul(r).left_mul(p));
            }
        }
    }
}
