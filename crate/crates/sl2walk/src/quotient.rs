//! Residue rings Fp[t]/(f): reduction, inversion, the Euler square test,
//! the CRT isomorphism for square-free moduli and the Frobenius map.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::polyring::{factor, Factorization, PolyError, PolyFp};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("characteristic mismatch between element and ring")]
    CharMismatch,
    #[error("element not invertible; gcd with modulus is {0}")]
    NotInvertible(String),
    #[error("operation requires a field, but the modulus is reducible")]
    NotAField,
    #[error("operation requires a square-free modulus")]
    NotSquareFree,
    #[error("CRT components do not match the ring factorization")]
    CrtMismatch,
    #[error("elements belong to different rings")]
    RingMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The quotient ring Fp[t]/(f) for a monic modulus of degree >= 1.
/// A field exactly when f is irreducible.
#[derive(Debug)]
pub struct ResidueRing {
    modulus: PolyFp,
    factorization: Factorization,
    is_field: bool,
    /// p^deg(f); None when it does not fit in u128.
    cardinality: Option<u128>,
}

impl PartialEq for ResidueRing {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus
    }
}
impl Eq for ResidueRing {}

impl ResidueRing {
    pub fn new(modulus: PolyFp) -> Result<Arc<Self>, RingError> {
        let fac = factor(&modulus)?;
        Ok(Self::with_factorization(modulus, fac))
    }

    /// Constructor that skips refactoring when the caller already knows
    /// the factorization (e.g. a freshly generated irreducible).
    pub fn with_factorization(modulus: PolyFp, factorization: Factorization) -> Arc<Self> {
        let modulus = modulus.monic();
        let deg = modulus.degree().expect("modulus must be nonzero");
        assert!(deg >= 1, "modulus must have degree >= 1");
        let is_field = factorization.factors.len() == 1 && factorization.factors[0].1 == 1;
        let cardinality = (modulus.p() as u128).checked_pow(deg as u32);
        Arc::new(ResidueRing {
            modulus,
            factorization,
            is_field,
            cardinality,
        })
    }

    pub fn from_irreducible(modulus: PolyFp) -> Arc<Self> {
        let f = modulus.monic();
        Self::with_factorization(
            f.clone(),
            Factorization {
                factors: vec![(f, 1)],
                unit: 1,
            },
        )
    }

    pub fn p(&self) -> u64 {
        self.modulus.p()
    }

    pub fn modulus(&self) -> &PolyFp {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().unwrap()
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn is_field(&self) -> bool {
        self.is_field
    }

    pub fn is_squarefree(&self) -> bool {
        self.factorization.is_squarefree()
    }

    pub fn cardinality(&self) -> Option<u128> {
        self.cardinality
    }

    /// Ring descriptor "p=3;f=1,0,1" used in CLI flags and reports.
    pub fn descriptor(&self) -> String {
        let coeffs: Vec<String> = self.modulus.coeffs().iter().map(|c| c.to_string()).collect();
        format!("p={};f={}", self.p(), coeffs.join(","))
    }

    pub fn reduce(self: &Arc<Self>, a: &PolyFp) -> Result<ResidueElem, RingError> {
        if a.p() != self.p() {
            return Err(RingError::CharMismatch);
        }
        Ok(ResidueElem {
            ring: Arc::clone(self),
            rep: a.rem(&self.modulus)?,
        })
    }

    pub fn zero(self: &Arc<Self>) -> ResidueElem {
        ResidueElem {
            ring: Arc::clone(self),
            rep: PolyFp::zero(self.p()),
        }
    }

    pub fn one(self: &Arc<Self>) -> ResidueElem {
        ResidueElem {
            ring: Arc::clone(self),
            rep: PolyFp::one(self.p()),
        }
    }

    pub fn constant(self: &Arc<Self>, c: u64) -> ResidueElem {
        ResidueElem {
            ring: Arc::clone(self),
            rep: PolyFp::constant(self.p(), c),
        }
    }

    /// Element with index k in the base-p digit enumeration
    /// (coefficient i of the representative = digit i of k).
    pub fn element_from_index(self: &Arc<Self>, mut k: u128) -> ResidueElem {
        let p = self.p() as u128;
        let mut coeffs = Vec::with_capacity(self.degree());
        for _ in 0..self.degree() {
            coeffs.push((k % p) as u64);
            k /= p;
        }
        ResidueElem {
            ring: Arc::clone(self),
            rep: PolyFp::new(self.p(), coeffs),
        }
    }

    pub fn index_of(&self, x: &ResidueElem) -> u128 {
        let p = self.p() as u128;
        let mut k = 0u128;
        for &c in x.rep.coeffs().iter().rev() {
            k = k * p + c as u128;
        }
        k
    }

    /// Iterator over all p^deg(f) elements. Panics if the cardinality
    /// overflows u128 (desk-scale enumeration only).
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = ResidueElem> + '_ {
        let n = self.cardinality.expect("ring too large to enumerate");
        let ring = Arc::clone(self);
        (0..n).map(move |k| ring.element_from_index(k))
    }
}

/// A fully reduced element of a residue ring.
#[derive(Debug, Clone)]
pub struct ResidueElem {
    ring: Arc<ResidueRing>,
    rep: PolyFp,
}

impl PartialEq for ResidueElem {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep && *self.ring == *other.ring
    }
}
impl Eq for ResidueElem {}

impl std::hash::Hash for ResidueElem {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rep.hash(state);
    }
}

impl fmt::Display for ResidueElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

impl ResidueElem {
    pub fn ring(&self) -> &Arc<ResidueRing> {
        &self.ring
    }

    pub fn rep(&self) -> &PolyFp {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.rep.is_one()
    }

    fn check_ring(&self, other: &Self) -> Result<(), RingError> {
        if *self.ring != *other.ring {
            return Err(RingError::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_ring(other).expect("ring mismatch");
        ResidueElem {
            ring: Arc::clone(&self.ring),
            rep: self.rep.add(&other.rep),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_ring(other).expect("ring mismatch");
        ResidueElem {
            ring: Arc::clone(&self.ring),
            rep: self.rep.sub(&other.rep),
        }
    }

    pub fn neg(&self) -> Self {
        ResidueElem {
            ring: Arc::clone(&self.ring),
            rep: self.rep.neg(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_ring(other).expect("ring mismatch");
        let prod = self.rep.mul(&other.rep);
        ResidueElem {
            ring: Arc::clone(&self.ring),
            rep: prod.rem(self.ring.modulus()).expect("modulus nonzero"),
        }
    }

    pub fn inverse(&self) -> Result<Self, RingError> {
        if self.rep.is_zero() {
            return Err(RingError::NotInvertible("0".into()));
        }
        let (g, u, _) = self.rep.xgcd(self.ring.modulus())?;
        if !g.is_one() {
            return Err(RingError::NotInvertible(g.to_string()));
        }
        Ok(ResidueElem {
            ring: Arc::clone(&self.ring),
            rep: u.rem(self.ring.modulus())?,
        })
    }

    pub fn pow(&self, e: &BigUint) -> Self {
        let rep = self
            .rep
            .pow_mod(e, self.ring.modulus())
            .expect("modulus nonzero");
        ResidueElem {
            ring: Arc::clone(&self.ring),
            rep,
        }
    }

    /// Euler criterion in the field case: x is a square iff
    /// x^((q-1)/2) = 1. Callers treat zero as a square by convention.
    pub fn is_square_unit(&self) -> Result<bool, RingError> {
        if !self.ring.is_field() {
            return Err(RingError::NotAField);
        }
        if self.is_zero() {
            return Err(RingError::NotInvertible("0".into()));
        }
        let q = BigUint::from(self.ring.p()).pow(self.ring.degree() as u32);
        let e = (q - BigUint::one()) / BigUint::from(2u32);
        Ok(self.pow(&e).is_one())
    }

    /// Square-or-zero test used by the discriminant criterion.
    pub fn is_square_or_zero(&self) -> Result<bool, RingError> {
        if self.is_zero() {
            Ok(true)
        } else {
            self.is_square_unit()
        }
    }

    /// x -> x^p. Iterating deg(f) times is the identity on a field.
    pub fn frobenius(&self) -> Result<Self, RingError> {
        if !self.ring.is_field() {
            return Err(RingError::NotAField);
        }
        Ok(self.pow(&BigUint::from(self.ring.p())))
    }
}

/// Split x across the irreducible factors of a square-free modulus.
pub fn crt_split(x: &ResidueElem) -> Result<Vec<ResidueElem>, RingError> {
    let ring = x.ring();
    if !ring.is_squarefree() {
        return Err(RingError::NotSquareFree);
    }
    ring.factorization()
        .factors
        .iter()
        .map(|(f, _)| {
            let comp = ResidueRing::from_irreducible(f.clone());
            comp.reduce(x.rep())
        })
        .collect()
}

/// Inverse of `crt_split`: recombine components over pairwise coprime
/// irreducible moduli into the product ring.
pub fn crt_combine(
    target: &Arc<ResidueRing>,
    components: &[ResidueElem],
) -> Result<ResidueElem, RingError> {
    if !target.is_squarefree() {
        return Err(RingError::NotSquareFree);
    }
    let factors = &target.factorization().factors;
    if factors.len() != components.len() {
        return Err(RingError::CrtMismatch);
    }
    let p = target.p();
    let mut acc = PolyFp::zero(p);
    for ((f, _), comp) in factors.iter().zip(components) {
        if comp.ring().modulus() != f {
            return Err(RingError::CrtMismatch);
        }
        // m = modulus / f; e = m * (m^{-1} mod f) is 1 mod f, 0 mod others
        let (m, r) = target.modulus().divmod(f)?;
        debug_assert!(r.is_zero());
        let (g, u, _) = m.xgcd(f)?;
        if !g.is_one() {
            return Err(RingError::CrtMismatch);
        }
        let e = m.mul(&u);
        acc = acc.add(&e.mul(comp.rep()));
    }
    target.reduce(&acc)
}
