//! Exact arithmetic in Fp[t]: dense polynomials over a small odd prime,
//! factorization (square-free / distinct-degree / equal-degree), Rabin
//! irreducibility and the admissibility machinery for modulus selection.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeros,
    #[error("modulus mismatch: p={0} vs p={1}")]
    ModulusMismatch(u64, u64),
    #[error("irreducibility is undefined for constant polynomials")]
    ConstantPolynomial,
    #[error("admissibility requires n > 1, got {0}")]
    AdmissibilityDomain(u64),
    #[error("overflow computing admissible sequence (N={n}, i={i})")]
    AdmissibleOverflow { n: u64, i: u64 },
    #[error("random irreducible search exceeded {0} rejection rounds")]
    IrreducibleSearchExhausted(usize),
    #[error("cannot parse polynomial literal {0:?}")]
    Parse(String),
    #[error("coefficient {c} out of range for p={p}")]
    CoefficientRange { c: u64, p: u64 },
    #[error("modulus p={0} must be an odd prime >= 3")]
    BadCharacteristic(u64),
}

/// Dense polynomial over Z/p, coefficients lowest degree first,
/// trailing zeros stripped. The zero polynomial has an empty
/// coefficient vector and `degree() == None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyFp {
    p: u64,
    coeffs: Vec<u64>,
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PolyFp {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        assert!(p >= 3 && p % 2 == 1 && is_prime_u64(p), "p must be an odd prime >= 3");
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyFp { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        PolyFp::new(p, vec![])
    }

    pub fn one(p: u64) -> Self {
        PolyFp::new(p, vec![1])
    }

    pub fn constant(p: u64, c: u64) -> Self {
        PolyFp::new(p, vec![c])
    }

    /// The monomial t.
    pub fn t(p: u64) -> Self {
        PolyFp::new(p, vec![0, 1])
    }

    pub fn monomial(p: u64, deg: usize, c: u64) -> Self {
        let mut v = vec![0; deg + 1];
        v[deg] = c;
        PolyFp::new(p, v)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading_coeff(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coeff() == 1
    }

    fn check_same_p(&self, other: &Self) -> Result<(), PolyError> {
        if self.p != other.p {
            Err(PolyError::ModulusMismatch(self.p, other.p))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_p(other).expect("mixed characteristics");
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = vec![0u64; n];
        for (i, c) in v.iter_mut().enumerate() {
            *c = (self.coeff(i) + other.coeff(i)) % self.p;
        }
        PolyFp::new(self.p, v)
    }

    pub fn neg(&self) -> Self {
        let v = self.coeffs.iter().map(|&c| (self.p - c) % self.p).collect();
        PolyFp::new(self.p, v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_p(other).expect("mixed characteristics");
        if self.is_zero() || other.is_zero() {
            return PolyFp::zero(self.p);
        }
        let mut v = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = (v[i + j] + a * b) % self.p;
            }
        }
        PolyFp::new(self.p, v)
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.p;
        let v = self.coeffs.iter().map(|&a| a * c % self.p).collect();
        PolyFp::new(self.p, v)
    }

    fn inv_mod_p(&self, a: u64) -> u64 {
        // Fermat; p is prime and small.
        let mut r = 1u64;
        let mut b = a % self.p;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        r
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.inv_mod_p(self.leading_coeff()))
    }

    pub fn divmod(&self, b: &Self) -> Result<(Self, Self), PolyError> {
        self.check_same_p(b)?;
        if b.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let db = b.coeffs.len() - 1;
        if self.coeffs.len() < b.coeffs.len() {
            return Ok((PolyFp::zero(self.p), self.clone()));
        }
        let p = self.p;
        let lead_inv = self.inv_mod_p(b.leading_coeff());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - db];
        for i in (db..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let q = c * lead_inv % p;
            quot[i - db] = q;
            for (j, &bc) in b.coeffs.iter().enumerate() {
                let idx = i - db + j;
                rem[idx] = (rem[idx] + p * p - q * bc % p) % p;
            }
        }
        Ok((PolyFp::new(p, quot), PolyFp::new(p, rem)))
    }

    pub fn rem(&self, b: &Self) -> Result<Self, PolyError> {
        Ok(self.divmod(b)?.1)
    }

    /// Monic gcd. Errors if both inputs are zero.
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_same_p(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::GcdOfZeros);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    /// Extended gcd: returns (g, u, v) monic with u*self + v*other = g.
    pub fn xgcd(&self, other: &Self) -> Result<(Self, Self, Self), PolyError> {
        self.check_same_p(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::GcdOfZeros);
        }
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (PolyFp::one(p), PolyFp::zero(p));
        let (mut t0, mut t1) = (PolyFp::zero(p), PolyFp::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        // normalize to monic gcd
        let lc = r0.leading_coeff();
        let inv = self.inv_mod_p(lc);
        Ok((r0.scale(inv), s0.scale(inv), t0.scale(inv)))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return PolyFp::zero(self.p);
        }
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % self.p) * c % self.p)
            .collect();
        PolyFp::new(self.p, v)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let x = x % self.p;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + c) % self.p;
        }
        acc
    }

    /// self^e mod m by square and multiply.
    pub fn pow_mod(&self, e: &BigUint, m: &Self) -> Result<Self, PolyError> {
        if m.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let mut base = self.rem(m)?;
        let mut result = PolyFp::one(self.p);
        let mut e = e.clone();
        let two = BigUint::from(2u32);
        while !e.is_zero() {
            if (&e % &two).is_one() {
                result = result.mul(&base).rem(m)?;
            }
            base = base.mul(&base).rem(m)?;
            e >>= 1;
        }
        Ok(result)
    }

    /// t^(p^k) mod m, via k successive p-power maps.
    fn t_frobenius_power(k: usize, m: &Self) -> Result<Self, PolyError> {
        let p = m.p;
        let pe = BigUint::from(p);
        let mut x = PolyFp::t(p).rem(m)?;
        for _ in 0..k {
            x = x.pow_mod(&pe, m)?;
        }
        Ok(x)
    }

    /// Rabin's deterministic criterion: f is irreducible of degree n iff
    /// f divides t^(p^n) - t and gcd(f, t^(p^(n/q)) - t) = 1 for every
    /// prime divisor q of n.
    pub fn is_irreducible(&self) -> Result<bool, PolyError> {
        let n = match self.degree() {
            None | Some(0) => return Err(PolyError::ConstantPolynomial),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let f = self.monic();
        let t = PolyFp::t(self.p);
        let full = Self::t_frobenius_power(n, &f)?;
        if full.sub(&t.rem(&f)?) != PolyFp::zero(self.p) {
            return Ok(false);
        }
        for q in prime_divisors(n as u64) {
            let part = Self::t_frobenius_power(n / q as usize, &f)?;
            let g = f.gcd(&part.sub(&t.rem(&f)?))?;
            if !g.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for PolyFp {
    /// Text format "c0,c1,...,ck@p"; the zero polynomial prints as "0@p".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0@{}", self.p);
        }
        let body: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}@{}", body.join(","), self.p)
    }
}

impl FromStr for PolyFp {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, PolyError> {
        let (body, ps) = s
            .split_once('@')
            .ok_or_else(|| PolyError::Parse(s.to_string()))?;
        let p: u64 = ps.parse().map_err(|_| PolyError::Parse(s.to_string()))?;
        if p < 3 || p % 2 == 0 || !is_prime_u64(p) {
            return Err(PolyError::BadCharacteristic(p));
        }
        let mut coeffs = Vec::new();
        for part in body.split(',') {
            let c: u64 = part
                .trim()
                .parse()
                .map_err(|_| PolyError::Parse(s.to_string()))?;
            if c >= p {
                return Err(PolyError::CoefficientRange { c, p });
            }
            coeffs.push(c);
        }
        Ok(PolyFp::new(p, coeffs))
    }
}

/// Parse the coefficient body "c0,c1,..." against a known p.
pub fn parse_coeff_list(body: &str, p: u64) -> Result<PolyFp, PolyError> {
    PolyFp::from_str(&format!("{body}@{p}"))
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn smallest_prime_factor(n: u64) -> u64 {
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

/// Monic irreducible factors with multiplicities; `unit` is the leading
/// coefficient of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub factors: Vec<(PolyFp, u32)>,
    pub unit: u64,
}

impl Factorization {
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, m)| m == 1)
    }

    pub fn product(&self, p: u64) -> PolyFp {
        let mut acc = PolyFp::constant(p, self.unit);
        for (f, m) in &self.factors {
            for _ in 0..*m {
                acc = acc.mul(f);
            }
        }
        acc
    }

    pub fn factor_degrees(&self) -> Vec<usize> {
        self.factors
            .iter()
            .map(|(f, _)| f.degree().expect("irreducible factors are nonzero"))
            .collect()
    }
}

/// Full factorization over Fp: square-free split, then distinct-degree,
/// then Cantor-Zassenhaus equal-degree with a fixed internal seed.
pub fn factor(f: &PolyFp) -> Result<Factorization, PolyError> {
    factor_seeded(f, 0x5eed_cafe)
}

pub fn factor_seeded(f: &PolyFp, seed: u64) -> Result<Factorization, PolyError> {
    if f.is_zero() {
        return Err(PolyError::DivisionByZero);
    }
    let p = f.p();
    let unit = f.leading_coeff();
    let mut factors: Vec<(PolyFp, u32)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    collect_factors(&f.monic(), 1, &mut factors, &mut rng)?;
    factors.sort_by(|a, b| {
        let da = a.0.degree();
        let db = b.0.degree();
        da.cmp(&db).then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
    });
    // merge duplicates
    let mut merged: Vec<(PolyFp, u32)> = Vec::new();
    for (g, m) in factors {
        if let Some(last) = merged.last_mut() {
            if last.0 == g {
                last.1 += m;
                continue;
            }
        }
        merged.push((g, m));
    }
    let _ = p;
    Ok(Factorization {
        factors: merged,
        unit,
    })
}

fn collect_factors(
    f: &PolyFp,
    mult: u32,
    out: &mut Vec<(PolyFp, u32)>,
    rng: &mut ChaCha8Rng,
) -> Result<(), PolyError> {
    let p = f.p();
    if f.is_one() {
        return Ok(());
    }
    let d = f.degree().unwrap();
    if d == 0 {
        return Ok(());
    }
    let fp = f.derivative();
    if fp.is_zero() {
        // f = h(t^p); h has the same coefficients at indices divisible by p.
        let mut h = Vec::new();
        let mut i = 0;
        while i <= d {
            h.push(f.coeff(i));
            i += p as usize;
        }
        let h = PolyFp::new(p, h);
        return collect_factors(&h, mult * p as u32, out, rng);
    }
    let g = f.gcd(&fp)?;
    if !g.is_one() {
        let (sf, r) = f.divmod(&g)?;
        debug_assert!(r.is_zero());
        collect_factors(&sf, mult, out, rng)?;
        return collect_factors(&g, mult, out, rng);
    }
    // f square-free: distinct-degree split
    let t = PolyFp::t(p);
    let mut rest = f.clone();
    let mut frob = t.rem(&rest)?;
    let pe = BigUint::from(p);
    let mut deg = 1usize;
    while rest.degree().unwrap_or(0) >= 2 * deg {
        frob = frob.pow_mod(&pe, &rest)?;
        let g = rest.gcd(&frob.sub(&t.rem(&rest)?))?;
        if !g.is_one() {
            equal_degree_split(&g, deg, out, mult, rng)?;
            let (q, r) = rest.divmod(&g)?;
            debug_assert!(r.is_zero());
            rest = q;
            frob = frob.rem(&rest)?;
        }
        deg += 1;
    }
    if rest.degree().unwrap_or(0) >= 1 {
        out.push((rest.monic(), mult));
    }
    Ok(())
}

/// Cantor-Zassenhaus random splitting of a product of irreducibles of
/// known equal degree d.
fn equal_degree_split(
    f: &PolyFp,
    d: usize,
    out: &mut Vec<(PolyFp, u32)>,
    mult: u32,
    rng: &mut ChaCha8Rng,
) -> Result<(), PolyError> {
    let p = f.p();
    let n = f.degree().unwrap();
    if n == d {
        out.push((f.monic(), mult));
        return Ok(());
    }
    let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    loop {
        let coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let h = PolyFp::new(p, coeffs);
        if h.is_zero() {
            continue;
        }
        let g0 = f.gcd(&h)?;
        if !g0.is_one() && g0.degree() != f.degree() {
            let (q, _) = f.divmod(&g0)?;
            equal_degree_split(&g0, d, out, mult, rng)?;
            equal_degree_split(&q, d, out, mult, rng)?;
            return Ok(());
        }
        let hp = h.pow_mod(&e, f)?.sub(&PolyFp::one(p));
        let g = f.gcd(&hp)?;
        if !g.is_one() && g.degree() != f.degree() {
            let (q, _) = f.divmod(&g)?;
            equal_degree_split(&g, d, out, mult, rng)?;
            equal_degree_split(&q, d, out, mult, rng)?;
            return Ok(());
        }
    }
}

/// True iff the smallest prime factor of n is >= M.
pub fn is_admissible(n: u64, m_threshold: u64) -> Result<bool, PolyError> {
    if n <= 1 {
        return Err(PolyError::AdmissibilityDomain(n));
    }
    Ok(smallest_prime_factor(n) >= m_threshold)
}

/// True iff every irreducible factor of f has M-admissible degree.
/// Degree-1 factors always fail for M >= 2 since 1 is not admissible;
/// admissibility is defined only for integers n > 1, so degree-1
/// factors are treated as inadmissible.
pub fn is_admissible_poly(f: &PolyFp, m_threshold: u64) -> Result<bool, PolyError> {
    let fac = factor(f)?;
    for d in fac.factor_degrees() {
        if d <= 1 || !is_admissible(d as u64, m_threshold)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// n_i = N*i + 1 for i = 1..=count with N the product of all primes <= M.
pub fn admissible_sequence(m_threshold: u64, count: u64) -> Result<Vec<u64>, PolyError> {
    assert!(m_threshold >= 2 && count >= 1);
    let mut n: u64 = 1;
    for q in 2..=m_threshold {
        if is_prime_u64(q) {
            n = n
                .checked_mul(q)
                .ok_or(PolyError::AdmissibleOverflow { n, i: 0 })?;
        }
    }
    let mut out = Vec::with_capacity(count as usize);
    for i in 1..=count {
        let v = n
            .checked_mul(i)
            .and_then(|x| x.checked_add(1))
            .ok_or(PolyError::AdmissibleOverflow { n, i })?;
        out.push(v);
    }
    Ok(out)
}

/// Monic irreducible of exact degree n, deterministic for a fixed seed.
pub fn random_irreducible(p: u64, n: usize, seed: u64) -> Result<PolyFp, PolyError> {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = 400 * (n + 1);
    for _ in 0..cap {
        let mut coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        coeffs.push(1);
        let f = PolyFp::new(p, coeffs);
        if f.is_irreducible()? {
            return Ok(f);
        }
    }
    Err(PolyError::IrreducibleSearchExhausted(cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> PolyFp {
        s.parse().unwrap()
    }

    #[test]
    fn divmod_monomial() {
        // (t^2+1) / t over F3
        let (q, r) = poly("1,0,1@3").divmod(&poly("0,1@3")).unwrap();
        assert_eq!(q, poly("0,1@3"));
        assert_eq!(r, poly("1@3"));
    }

    #[test]
    fn divmod_self_is_identity() {
        let f = poly("1,2,0,1@3");
        let (q, r) = f.divmod(&f).unwrap();
        assert_eq!(q, PolyFp::one(3));
        assert!(r.is_zero());
    }

    #[test]
    fn divmod_reconstructs() {
        // oracle: re-multiplication a = q*b + r, deg r < deg b
        let a = poly("1,2,0,1@3");
        let b = poly("1,0,1@3");
        let (q, r) = a.divmod(&b).unwrap();
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree() < b.degree());
    }

    #[test]
    fn divide_by_zero_rejected() {
        assert_eq!(
            poly("1,1@3").divmod(&PolyFp::zero(3)),
            Err(PolyError::DivisionByZero)
        );
    }

    #[test]
    fn gcd_with_zero() {
        let f = poly("2,0,1@3");
        assert_eq!(f.gcd(&PolyFp::zero(3)).unwrap(), f.monic());
        assert_eq!(
            PolyFp::zero(3).gcd(&PolyFp::zero(3)),
            Err(PolyError::GcdOfZeros)
        );
    }

    #[test]
    fn gcd_of_common_factor() {
        // gcd(f*g, f*h) = monic(f) for coprime g, h
        let f = poly("1,0,1@3");
        let g = poly("1,1@3");
        let h = poly("2,1@3");
        let d = f.mul(&g).gcd(&f.mul(&h)).unwrap();
        assert_eq!(d, f.monic());
    }

    #[test]
    fn gcd_matches_exhaustive_divisor_search() {
        // enumerate all monic divisors of degree <= 2 over F3
        let a = poly("1,0,1@3");
        let b = poly("2,0,1@3");
        let g = a.gcd(&b).unwrap();
        let mut best = PolyFp::one(3);
        for c0 in 0..3 {
            for c1 in 0..3 {
                for deg in 1..=2usize {
                    let cand = if deg == 1 {
                        PolyFp::new(3, vec![c0, 1])
                    } else {
                        PolyFp::new(3, vec![c0, c1, 1])
                    };
                    if a.rem(&cand).unwrap().is_zero()
                        && b.rem(&cand).unwrap().is_zero()
                        && cand.degree() > best.degree()
                    {
                        best = cand;
                    }
                }
            }
        }
        assert_eq!(g, best);
    }

    fn all_monic(p: u64, deg: usize) -> Vec<PolyFp> {
        let mut out = Vec::new();
        let total = (p as usize).pow(deg as u32);
        for k in 0..total {
            let mut coeffs = Vec::with_capacity(deg + 1);
            let mut k = k as u64;
            for _ in 0..deg {
                coeffs.push(k % p);
                k /= p;
            }
            coeffs.push(1);
            out.push(PolyFp::new(p, coeffs));
        }
        out
    }

    fn irreducible_by_trial_division(f: &PolyFp) -> bool {
        let d = f.degree().unwrap();
        if d == 1 {
            return true;
        }
        for e in 1..=d / 2 {
            for g in all_monic(f.p(), e) {
                if f.rem(&g).unwrap().is_zero() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn rabin_agrees_with_trial_division_small() {
        for p in [3u64, 5] {
            for deg in 1..=4usize {
                for f in all_monic(p, deg) {
                    assert_eq!(
                        f.is_irreducible().unwrap(),
                        irreducible_by_trial_division(&f),
                        "mismatch for {f}"
                    );
                }
            }
        }
    }

    #[test]
    fn irreducible_examples() {
        assert!(poly("1,0,1@3").is_irreducible().unwrap()); // t^2+1 has no root in F3
        assert!(!poly("2,0,1@3").is_irreducible().unwrap()); // t^2-1 = (t-1)(t+1)
        assert!(poly("0,1@7").is_irreducible().unwrap());
        assert_eq!(
            poly("2@3").is_irreducible(),
            Err(PolyError::ConstantPolynomial)
        );
    }

    #[test]
    fn factor_monomial_power() {
        let fac = factor(&poly("0,0,1@3")).unwrap();
        assert_eq!(fac.factors, vec![(poly("0,1@3"), 2)]);
        assert_eq!(fac.unit, 1);
    }

    #[test]
    fn factor_known_product() {
        let f = poly("1,0,1@3").mul(&poly("0,1@3"));
        let fac = factor(&f).unwrap();
        assert_eq!(fac.factors, vec![(poly("0,1@3"), 1), (poly("1,0,1@3"), 1)]);
        assert!(fac.is_squarefree());
    }

    #[test]
    fn factor_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let deg = rng.gen_range(1..=8usize);
            let mut coeffs: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..5)).collect();
            coeffs.push(rng.gen_range(1..5));
            let f = PolyFp::new(5, coeffs);
            let fac = factor(&f).unwrap();
            assert_eq!(fac.product(5), f, "roundtrip failed for {f}");
            for (g, _) in &fac.factors {
                assert!(g.is_monic());
                assert!(g.is_irreducible().unwrap());
            }
        }
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(31, 5).unwrap());
        assert!(!is_admissible(6, 5).unwrap());
        assert!(is_admissible(7 * 11, 7).unwrap());
        assert_eq!(is_admissible(1, 5), Err(PolyError::AdmissibilityDomain(1)));
    }

    #[test]
    fn admissible_sequence_example() {
        assert_eq!(admissible_sequence(5, 3).unwrap(), vec![31, 61, 91]);
        assert_eq!(admissible_sequence(3, 2).unwrap(), vec![7, 13]);
        for m in [3u64, 5, 7] {
            for n in admissible_sequence(m, 100).unwrap() {
                assert!(is_admissible(n, m).unwrap());
            }
        }
    }

    #[test]
    fn admissible_sequence_overflow() {
        assert!(matches!(
            admissible_sequence(53, u64::MAX / 2),
            Err(PolyError::AdmissibleOverflow { .. })
        ));
    }

    #[test]
    fn random_irreducible_deterministic_and_valid() {
        let a = random_irreducible(3, 2, 99).unwrap();
        let b = random_irreducible(3, 2, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.is_monic());
        assert_eq!(a.degree(), Some(2));
        assert!(a.is_irreducible().unwrap());
        // one of the 3 monic irreducible quadratics over F3
        let irr: Vec<PolyFp> = all_monic(3, 2)
            .into_iter()
            .filter(|f| f.is_irreducible().unwrap())
            .collect();
        assert_eq!(irr.len(), 3);
        assert!(irr.contains(&a));
    }

    #[test]
    fn ring_axioms_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let rand_poly = |rng: &mut ChaCha8Rng| {
                let deg = rng.gen_range(0..=16usize);
                PolyFp::new(7, (0..=deg).map(|_| rng.gen_range(0..7)).collect())
            };
            let a = rand_poly(&mut rng);
            let b = rand_poly(&mut rng);
            let c = rand_poly(&mut rng);
            assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            assert_eq!(a.mul(&b), b.mul(&a));
        }
    }

    #[test]
    fn parse_display_roundtrip() {
        let f = poly("1,0,2@3");
        assert_eq!(f.to_string().parse::<PolyFp>().unwrap(), f);
        assert!(matches!(
            "5,1@3".parse::<PolyFp>(),
            Err(PolyError::CoefficientRange { c: 5, p: 3 })
        ));
        assert!("1,1@4".parse::<PolyFp>().is_err());
    }
}
