//! 2x2 matrices over Fp[t] or a residue ring: group operations,
//! congruence reduction, characteristic-polynomial tests, the adjoint
//! representation and the target-set predicates.

use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::polyring::{PolyError, PolyFp};
use crate::quotient::{ResidueElem, ResidueRing, RingError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatError {
    #[error("matrix entries come from different rings")]
    MixedRings,
    #[error("matrix is not in SL2: det != 1")]
    NotUnimodular,
    #[error("operation requires a field coefficient ring")]
    NotAField,
    #[error("generating set is degenerate: {0}")]
    DegenerateGenSet(String),
    #[error("cannot parse matrix literal {0:?}")]
    Parse(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// Coefficient-ring interface shared by Fp[t] and residue rings.
/// `zero_like`/`one_like` carry the ring context of the receiver.
pub trait Coeff: Clone + PartialEq + Eq + std::hash::Hash + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn same_ring(&self, other: &Self) -> bool;
}

impl Coeff for PolyFp {
    fn zero_like(&self) -> Self {
        PolyFp::zero(self.p())
    }
    fn one_like(&self) -> Self {
        PolyFp::one(self.p())
    }
    fn add(&self, other: &Self) -> Self {
        PolyFp::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        PolyFp::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        PolyFp::mul(self, other)
    }
    fn neg(&self) -> Self {
        PolyFp::neg(self)
    }
    fn is_zero(&self) -> bool {
        PolyFp::is_zero(self)
    }
    fn same_ring(&self, other: &Self) -> bool {
        self.p() == other.p()
    }
}

impl Coeff for ResidueElem {
    fn zero_like(&self) -> Self {
        self.ring().zero()
    }
    fn one_like(&self) -> Self {
        self.ring().one()
    }
    fn add(&self, other: &Self) -> Self {
        ResidueElem::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        ResidueElem::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        ResidueElem::mul(self, other)
    }
    fn neg(&self) -> Self {
        ResidueElem::neg(self)
    }
    fn is_zero(&self) -> bool {
        ResidueElem::is_zero(self)
    }
    fn same_ring(&self, other: &Self) -> bool {
        self.ring() == other.ring()
    }
}

/// Row-major 2x2 matrix [[a, b], [c, d]] over one coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat2<T: Coeff> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Coeff> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, MatError> {
        if !(a.same_ring(&b) && a.same_ring(&c) && a.same_ring(&d)) {
            return Err(MatError::MixedRings);
        }
        Ok(Mat2 { a, b, c, d })
    }

    /// New matrix with the SL2 invariant checked on construction.
    pub fn new_sl2(a: T, b: T, c: T, d: T) -> Result<Self, MatError> {
        let m = Self::new(a, b, c, d)?;
        if !m.det().sub(&m.a.one_like()).is_zero() {
            return Err(MatError::NotUnimodular);
        }
        Ok(m)
    }

    pub fn identity_like(&self) -> Self {
        let one = self.a.one_like();
        let zero = self.a.zero_like();
        Mat2 {
            a: one.clone(),
            b: zero.clone(),
            c: zero,
            d: one,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero()
            && self.c.is_zero()
            && self.a.sub(&self.a.one_like()).is_zero()
            && self.d.sub(&self.d.one_like()).is_zero()
    }

    pub fn det(&self) -> T {
        self.a.mul(&self.d).sub(&self.b.mul(&self.c))
    }

    pub fn trace(&self) -> T {
        self.a.add(&self.d)
    }

    pub fn is_sl2(&self) -> bool {
        self.det().sub(&self.a.one_like()).is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Mat2 {
            a: self.a.mul(&other.a).add(&self.b.mul(&other.c)),
            b: self.a.mul(&other.b).add(&self.b.mul(&other.d)),
            c: self.c.mul(&other.a).add(&self.d.mul(&other.c)),
            d: self.c.mul(&other.b).add(&self.d.mul(&other.d)),
        }
    }

    /// Adjugate inverse; only valid for det = 1.
    pub fn inv(&self) -> Result<Self, MatError> {
        if !self.is_sl2() {
            return Err(MatError::NotUnimodular);
        }
        Ok(Mat2 {
            a: self.d.clone(),
            b: self.b.neg(),
            c: self.c.neg(),
            d: self.a.clone(),
        })
    }

    pub fn has_zero_entry(&self) -> bool {
        self.a.is_zero() || self.b.is_zero() || self.c.is_zero() || self.d.is_zero()
    }

    pub fn trace_equals(&self, alpha: &T) -> bool {
        self.trace().sub(alpha).is_zero()
    }

    /// The adjoint action X -> g^{-1} X g on sl2 in the basis
    /// (E, H, F) with E = [[0,1],[0,0]], H = [[1,0],[0,-1]],
    /// F = [[0,0],[1,0]]. Coordinates of a traceless [[m11,m12],[m21,-m11]]
    /// are (m12, m11, m21).
    pub fn ad_matrix(&self) -> Result<[[T; 3]; 3], MatError> {
        let ginv = self.inv()?;
        let zero = self.a.zero_like();
        let one = self.a.one_like();
        let basis = [
            // E, H, F
            Mat2::new(zero.clone(), one.clone(), zero.clone(), zero.clone())?,
            Mat2::new(one.clone(), zero.clone(), zero.clone(), one.neg())?,
            Mat2::new(zero.clone(), zero.clone(), one.clone(), zero.clone())?,
        ];
        let mut cols: Vec<[T; 3]> = Vec::with_capacity(3);
        for bmat in &basis {
            let img = ginv.mul(bmat).mul(self);
            cols.push([img.b.clone(), img.a.clone(), img.c.clone()]);
        }
        Ok([
            [cols[0][0].clone(), cols[1][0].clone(), cols[2][0].clone()],
            [cols[0][1].clone(), cols[1][1].clone(), cols[2][1].clone()],
            [cols[0][2].clone(), cols[1][2].clone(), cols[2][2].clone()],
        ])
    }

    /// F(g) = chi_{Ad(g)}(1) = det(I - Ad(g)) with the resultant sign
    /// fixed as Res(chi, X-1) = chi(1) for monic chi. Vanishes exactly
    /// when g fixes a nonzero vector of sl2. Note that on SL2 this is
    /// everywhere: the traceless part 2g - tr(g) I is itself fixed by
    /// conjugation (and Ad(+-I) = I), so F vanishes identically.
    pub fn ad_fixed_point_poly(&self) -> Result<T, MatError> {
        let m = self.ad_matrix()?;
        let one = self.a.one_like();
        // I - Ad(g)
        let e = |i: usize, j: usize| -> T {
            if i == j {
                one.sub(&m[i][j])
            } else {
                m[i][j].neg()
            }
        };
        let det = e(0, 0)
            .mul(&e(1, 1).mul(&e(2, 2)).sub(&e(1, 2).mul(&e(2, 1))))
            .sub(&e(0, 1).mul(&e(1, 0).mul(&e(2, 2)).sub(&e(1, 2).mul(&e(2, 0)))))
            .add(&e(0, 2).mul(&e(1, 0).mul(&e(2, 1)).sub(&e(1, 1).mul(&e(2, 0)))));
        Ok(det)
    }
}

impl Mat2<PolyFp> {
    pub fn identity(p: u64) -> Self {
        Mat2 {
            a: PolyFp::one(p),
            b: PolyFp::zero(p),
            c: PolyFp::zero(p),
            d: PolyFp::one(p),
        }
    }

    pub fn max_entry_degree(&self) -> usize {
        [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .filter_map(|e| e.degree())
            .max()
            .unwrap_or(0)
    }

    /// Entrywise congruence reduction mod f.
    pub fn reduce_mod(&self, ring: &Arc<ResidueRing>) -> Result<Mat2<ResidueElem>, MatError> {
        Ok(Mat2 {
            a: ring.reduce(&self.a)?,
            b: ring.reduce(&self.b)?,
            c: ring.reduce(&self.c)?,
            d: ring.reduce(&self.d)?,
        })
    }

    /// Necessary torsion condition from the trace: finite order forces
    /// tr(g) in Fp, i.e. a constant polynomial.
    pub fn is_torsion_trace(&self) -> bool {
        self.trace().is_constant()
    }
}

impl Mat2<ResidueElem> {
    pub fn ring(&self) -> &Arc<ResidueRing> {
        self.a.ring()
    }

    /// X^2 - tr(g) X + 1 has a root in F_q iff tr(g)^2 - 4 is a square
    /// or zero. Requires det(g) = 1 over a field.
    pub fn char_poly_reducible(&self) -> Result<bool, MatError> {
        if !self.ring().is_field() {
            return Err(MatError::NotAField);
        }
        let t = self.trace();
        let four = self.a.one_like().add(&self.a.one_like());
        let four = four.mul(&four);
        let disc = t.mul(&t).sub(&four);
        Ok(disc.is_square_or_zero()?)
    }

    /// Trace lies in the prime field (image of the upstairs torsion
    /// condition).
    pub fn is_torsion_trace(&self) -> bool {
        self.trace().rep().is_constant()
    }
}

/// Parse "[[a;b];[c;d]]" with entries in polynomial text format,
/// e.g. "[[1,1@3;0,2@3];[0@3;1@3]]".
impl FromStr for Mat2<PolyFp> {
    type Err = MatError;

    fn from_str(s: &str) -> Result<Self, MatError> {
        let inner = s
            .trim()
            .strip_prefix("[[")
            .and_then(|x| x.strip_suffix("]]"))
            .ok_or_else(|| MatError::Parse(s.to_string()))?;
        let rows: Vec<&str> = inner.split("];[").collect();
        if rows.len() != 2 {
            return Err(MatError::Parse(s.to_string()));
        }
        let mut entries = Vec::with_capacity(4);
        for row in rows {
            let cols: Vec<&str> = row.split(';').collect();
            if cols.len() != 2 {
                return Err(MatError::Parse(s.to_string()));
            }
            for cstr in cols {
                entries.push(cstr.trim().parse::<PolyFp>()?);
            }
        }
        let mut it = entries.into_iter();
        Mat2::new(
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
            it.next().unwrap(),
        )
    }
}

impl std::fmt::Display for Mat2<PolyFp> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[[{};{}];[{};{}]]", self.a, self.b, self.c, self.d)
    }
}

/// Symmetric generating set: closed under inverse, no identity,
/// no duplicates.
#[derive(Debug, Clone)]
pub struct GenSet<T: Coeff> {
    elems: Vec<Mat2<T>>,
}

impl<T: Coeff> GenSet<T> {
    /// Symmetrizes (adds inverses) and deduplicates; rejects the
    /// identity and non-SL2 inputs.
    pub fn new(gens: Vec<Mat2<T>>) -> Result<Self, MatError> {
        if gens.is_empty() {
            return Err(MatError::DegenerateGenSet("empty generating set".into()));
        }
        let mut elems: Vec<Mat2<T>> = Vec::new();
        for g in gens {
            if !g.is_sl2() {
                return Err(MatError::NotUnimodular);
            }
            if g.is_identity() {
                return Err(MatError::DegenerateGenSet(
                    "identity in generating set".into(),
                ));
            }
            let gi = g.inv()?;
            for h in [g, gi] {
                if !elems.contains(&h) {
                    elems.push(h);
                }
            }
        }
        Ok(GenSet { elems })
    }

    pub fn elems(&self) -> &[Mat2<T>] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Position of the inverse of elems[i] within the set.
    pub fn inverse_letter(&self, i: usize) -> usize {
        let inv = self.elems[i].inv().expect("gen set elements are SL2");
        self.elems
            .iter()
            .position(|g| *g == inv)
            .expect("gen set is symmetric")
    }
}

impl GenSet<PolyFp> {
    /// Max entry degree D across the set.
    pub fn degree_bound(&self) -> usize {
        self.elems
            .iter()
            .map(|m| m.max_entry_degree())
            .max()
            .unwrap_or(0)
    }

    pub fn reduce_mod(&self, ring: &Arc<ResidueRing>) -> Result<Vec<Mat2<ResidueElem>>, MatError> {
        self.elems.iter().map(|g| g.reduce_mod(ring)).collect()
    }

    /// The Nagao pair: A = [[1,t],[0,1]], B = [[1,0],[t,1]], symmetrized.
    pub fn nagao(p: u64) -> Self {
        let t = PolyFp::t(p);
        let one = PolyFp::one(p);
        let zero = PolyFp::zero(p);
        let a = Mat2::new(one.clone(), t.clone(), zero.clone(), one.clone()).unwrap();
        let b = Mat2::new(one.clone(), zero, t, one).unwrap();
        GenSet::new(vec![a, b]).unwrap()
    }
}
