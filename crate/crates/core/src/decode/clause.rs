//! Decoder-side clause equations and the operations that rewrite them.
//!
//! A clause stores a ring element `g` and its terms `(i_j, f_j)` and always
//! satisfies `unpad(g) = unpad(sum_j D^f_j * pad(x_{i_j}))` for the true data.
//! Every operation below maps valid clauses to valid clauses.

use crate::encode::{ClauseSpec, Term};
use crate::error::{Error, Result};
use crate::ring::{pad, unpad, DataSymbol, GhostVector};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    ell: u64,
    g: GhostVector,
    terms: Vec<Term>,
}

impl Clause {
    /// `g = pad(y)` with the terms of `spec`.
    pub fn read(spec: &ClauseSpec, y: &DataSymbol) -> Self {
        Self {
            ell: spec.ell,
            g: pad(y),
            terms: spec.terms.clone(),
        }
    }

    pub fn from_parts(ell: u64, g: GhostVector, terms: Vec<Term>) -> Self {
        Self { ell, g, terms }
    }

    /// Symbol index this clause came from; for derived clauses, the newest
    /// symbol that went into it.
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn g(&self) -> &GhostVector {
        &self.g
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn p(&self) -> u32 {
        self.g.p()
    }

    pub fn factor_of(&self, index: usize) -> Option<u32> {
        self.terms.iter().find(|t| t.index == index).map(|t| t.factor)
    }

    pub fn contains(&self, index: usize) -> bool {
        self.terms.iter().any(|t| t.index == index)
    }

    /// For a size-2 clause, the other endpoint.
    pub fn partner_of(&self, index: usize) -> Option<usize> {
        match self.terms.as_slice() {
            [a, b] if a.index == index => Some(b.index),
            [a, b] if b.index == index => Some(a.index),
            _ => None,
        }
    }

    /// Checks the clause invariant against ground-truth data.
    pub fn holds_for(&self, data: &[DataSymbol]) -> bool {
        let mut acc = GhostVector::zero(self.p());
        for t in &self.terms {
            acc.xor_rotated(&pad(&data[t.index]), t.factor);
        }
        unpad(&acc) == unpad(&self.g)
    }

    /// Removes the term on `index` using its decoded value, given as the
    /// monomial `value` with shift factor `value_factor`:
    /// `g += D^(f - value_factor) * value`. Returns false if the clause has no
    /// such term.
    pub fn monomial_reduce(&mut self, index: usize, value: &GhostVector, value_factor: u32) -> bool {
        let Some(pos) = self.terms.iter().position(|t| t.index == index) else {
            return false;
        };
        let p = self.p();
        let f = self.terms[pos].factor;
        let shift = (f + p - value_factor % p) % p;
        self.g.xor_rotated(value, shift);
        self.terms.swap_remove(pos);
        true
    }

    /// For a size-1 clause: the data index and its value, rotated back to
    /// factor zero and in canonical (ghost bit zero) form, i.e. `pad(x)`.
    pub fn output(&self) -> Option<(usize, GhostVector)> {
        match self.terms.as_slice() {
            [t] => {
                let mut v = self.g.shift_inv(t.factor);
                v.canonicalize();
                Some((t.index, v))
            }
            _ => None,
        }
    }

    pub(crate) fn clear(&mut self) {
        self.terms = Vec::new();
        self.g = GhostVector::zero(0);
    }
}

/// Joins two size-2 clauses `{(a, f1u), (s, f2u)}` and `{(s, f1v), (b, f2v)}`
/// at their shared index `s` into `{(a, f1u + f1v), (b, f2u + f2v)}` with
/// `g' = D^f1v g_u + D^f2u g_v`; both contributions on `s` carry the shift
/// `f2u + f1v` and cancel.
///
/// Returns `None` when `a == b`, where the two clauses are parallel and call
/// for [`parallel_edge_resolve`] instead.
///
/// Panics unless both clauses have size 2 and contain `shared`.
pub fn edge_contract(u: &Clause, v: &Clause, shared: usize) -> Option<Clause> {
    let a = u.partner_of(shared).expect("u must be a size-2 clause on the shared index");
    let b = v.partner_of(shared).expect("v must be a size-2 clause on the shared index");
    if a == b {
        return None;
    }
    let p = u.p();
    let f1u = u.factor_of(a).unwrap();
    let f2u = u.factor_of(shared).unwrap();
    let f1v = v.factor_of(shared).unwrap();
    let f2v = v.factor_of(b).unwrap();
    let mut g = u.g.shift_mul(f1v);
    g.xor_rotated(&v.g, f2u);
    Some(Clause {
        ell: u.ell.max(v.ell),
        g,
        terms: vec![
            Term {
                index: a,
                factor: (f1u + f1v) % p,
            },
            Term {
                index: b,
                factor: (f2u + f2v) % p,
            },
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParallelOutcome {
    /// Both indices decoded; values are `pad(x)` for each index.
    Resolved {
        a: (usize, GhostVector),
        b: (usize, GhostVector),
    },
    /// The two clauses are linearly dependent; either one can be dropped.
    Redundant,
}

/// Two size-2 clauses on the same pair `{a, b}`:
/// `D^f1u x_a + D^f2u x_b = g_u` and `D^f1v x_a + D^f2v x_b = g_v`.
///
/// Eliminating `x_b` gives `(D^(f1u+f2v) + D^(f1v+f2u)) x_a = D^f2v g_u + D^f2u g_v`,
/// solvable unless the two exponents agree modulo `p`; `x_b` follows
/// symmetrically.
pub fn parallel_edge_resolve(u: &Clause, v: &Clause) -> Result<ParallelOutcome> {
    let [ta, tb] = u.terms.as_slice() else {
        return Err(Error::InvalidConfig("parallel resolution needs size-2 clauses".into()));
    };
    let (a, b) = (ta.index, tb.index);
    let (Some(f1v), Some(f2v), 2) = (v.factor_of(a), v.factor_of(b), v.k()) else {
        return Err(Error::InvalidConfig("clauses are not parallel".into()));
    };
    let p = u.p();
    let (f1u, f2u) = (ta.factor, tb.factor);
    let e1 = (f1u + f2v) % p;
    let e2 = (f1v + f2u) % p;
    if e1 == e2 {
        return Ok(ParallelOutcome::Redundant);
    }
    let mut ya = u.g.shift_mul(f2v);
    ya.xor_rotated(&v.g, f2u);
    let mut yb = u.g.shift_mul(f1v);
    yb.xor_rotated(&v.g, f1u);
    Ok(ParallelOutcome::Resolved {
        a: (a, ya.binomial_inv(e1, e2)?),
        b: (b, yb.binomial_inv(e2, e1)?),
    })
}

/// Whether two parallel clauses with these factor pairs are dependent.
pub fn parallel_is_redundant(p: u32, (f1u, f2u): (u32, u32), (f1v, f2v): (u32, u32)) -> bool {
    (f1u + f2v) % p == (f1v + f2u) % p
}
