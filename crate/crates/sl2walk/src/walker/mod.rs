//! Random walks driven by a symmetric generator set: exact convolution
//! measures on enumerated quotients, seeded Monte-Carlo walks upstairs,
//! escape-probability estimators with quotient-side bounds, and the
//! exhaustive relation search that certifies free pairs.

mod kesten;

pub use kesten::{kesten_return_profile, rational_to_f64, tree_spectral_radius};

use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cayley::{QuotientGroup, DEFAULT_ENUM_BUDGET};
use crate::polyring::PolyFp;
use crate::quotient::{ResidueElem, ResidueRing};
use crate::sl2::{GenSet, Mat2, MatError};

/// Identifier of the RNG algorithm recorded in every report.
pub const RNG_ID: &str = "chacha8";

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("generator multiset is not symmetric")]
    NotSymmetric,
    #[error("generator image not found in the quotient group")]
    NotInGroup,
    #[error("unknown predicate {0:?}")]
    UnknownPredicate(String),
    #[error("predicate cannot be evaluated upstairs: {0}")]
    NotUpstairs(String),
    #[error("variety is all of the group: escape bound is vacuous")]
    ZeroVariety,
    #[error(transparent)]
    Mat(#[from] MatError),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

/// Probability weights over an enumerated quotient.
#[derive(Debug, Clone)]
pub struct MeasureVector {
    weights: Vec<f64>,
}

impl MeasureVector {
    pub fn point_mass(group: &QuotientGroup) -> Self {
        let mut weights = vec![0.0; group.len()];
        weights[group.identity_index() as usize] = 1.0;
        MeasureVector { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// One convolution step: new(g) = mean_s old(g s^-1) = mean_s old(g s)
    /// for symmetric S.
    pub fn step(&mut self, group: &QuotientGroup, s: &[Mat2<ResidueElem>]) {
        let perms: Vec<Vec<u32>> = s.iter().map(|m| group.right_mul_perm(m)).collect();
        let k = s.len() as f64;
        let old = std::mem::take(&mut self.weights);
        let mut new = vec![0.0; old.len()];
        crate::par::run_fill_f64(&mut new, |i| {
            let mut acc = 0.0;
            for perm in &perms {
                acc += old[perm[i] as usize];
            }
            acc / k
        });
        self.weights = new;
    }

    pub fn mass_on(&self, member: &[bool]) -> f64 {
        self.weights
            .iter()
            .zip(member)
            .filter(|(_, m)| **m)
            .map(|(w, _)| *w)
            .sum()
    }

    pub fn tv_distance(&self, other: &Self) -> f64 {
        0.5 * self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

fn check_symmetric(s: &[Mat2<ResidueElem>]) -> Result<(), WalkError> {
    for g in s {
        let gi = g.inv()?;
        if s.iter().filter(|h| **h == *g).count() != s.iter().filter(|h| **h == gi).count() {
            return Err(WalkError::NotSymmetric);
        }
    }
    Ok(())
}

/// mu_S^{(l)} on the quotient, by l pushforward steps from the point
/// mass at the identity.
pub fn exact_measure(
    group: &QuotientGroup,
    s: &[Mat2<ResidueElem>],
    l: usize,
) -> Result<MeasureVector, WalkError> {
    check_symmetric(s)?;
    for m in s {
        if group.index_of(m).is_none() {
            return Err(WalkError::NotInGroup);
        }
    }
    let mut mu = MeasureVector::point_mass(group);
    for _ in 0..l {
        mu.step(group, s);
    }
    Ok(mu)
}

/// One sampled walk upstairs: the ordered product of uniform letters.
#[derive(Debug, Clone)]
pub struct WalkSample {
    pub word: Vec<usize>,
    pub endpoint: Mat2<PolyFp>,
    pub max_entry_degree: usize,
}

pub fn sample_walk(s: &GenSet<PolyFp>, l: usize, seed: u64) -> WalkSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_walk_with(s, l, &mut rng)
}

pub fn sample_walk_with(s: &GenSet<PolyFp>, l: usize, rng: &mut ChaCha8Rng) -> WalkSample {
    let p = s.elems()[0].a.p();
    let mut endpoint = Mat2::identity(p);
    let mut word = Vec::with_capacity(l);
    for _ in 0..l {
        let li = rng.gen_range(0..s.len());
        word.push(li);
        endpoint = endpoint.mul(&s.elems()[li]);
    }
    let max_entry_degree = endpoint.max_entry_degree();
    WalkSample {
        word,
        endpoint,
        max_entry_degree,
    }
}

/// Target-set predicates, evaluable on quotient elements and (where the
/// defining condition is polynomial) directly upstairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    All,
    ZeroEntry,
    /// trace = the given prime-field constant.
    TraceEq(u64),
    /// trace lies in the prime field (necessary torsion condition).
    Torsion,
    /// g = h^2 for some h in the quotient group.
    Square,
    /// characteristic polynomial splits over the residue field.
    ReducibleChi,
    /// det(I - Ad(g)) = 0.
    AdFixedPoint,
}

impl FromStr for Predicate {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self, WalkError> {
        let s = s.trim();
        if let Some(a) = s.strip_prefix("trace-").or_else(|| s.strip_prefix("trace=")) {
            let v = a
                .parse::<u64>()
                .map_err(|_| WalkError::UnknownPredicate(s.to_string()))?;
            return Ok(Predicate::TraceEq(v));
        }
        match s {
            "all" => Ok(Predicate::All),
            "zero-entry" => Ok(Predicate::ZeroEntry),
            "torsion" => Ok(Predicate::Torsion),
            "square" => Ok(Predicate::Square),
            "reducible-chi" => Ok(Predicate::ReducibleChi),
            "ad-fixed-point" => Ok(Predicate::AdFixedPoint),
            other => Err(WalkError::UnknownPredicate(other.to_string())),
        }
    }
}

impl std::fmt::Display for Predicate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Predicate::All => write!(f, "all"),
            Predicate::ZeroEntry => write!(f, "zero-entry"),
            Predicate::TraceEq(a) => write!(f, "trace-{a}"),
            Predicate::Torsion => write!(f, "torsion"),
            Predicate::Square => write!(f, "square"),
            Predicate::ReducibleChi => write!(f, "reducible-chi"),
            Predicate::AdFixedPoint => write!(f, "ad-fixed-point"),
        }
    }
}

impl Predicate {
    /// Evaluate on an SL2(Fp[t]) element; None when the defining set is
    /// not polynomially checkable upstairs (squares, reducibility).
    pub fn eval_upstairs(&self, g: &Mat2<PolyFp>) -> Option<bool> {
        match self {
            Predicate::All => Some(true),
            Predicate::ZeroEntry => Some(g.has_zero_entry()),
            Predicate::TraceEq(a) => {
                let alpha = PolyFp::constant(g.a.p(), *a);
                Some(g.trace_equals(&alpha))
            }
            Predicate::Torsion => Some(g.is_torsion_trace()),
            Predicate::AdFixedPoint => Some(
                g.ad_fixed_point_poly()
                    .expect("SL2 element")
                    .is_zero(),
            ),
            Predicate::Square | Predicate::ReducibleChi => None,
        }
    }
}

/// Predicate evaluator bound to one quotient, with the squaring table
/// precomputed when needed.
pub struct QuotientPredicate<'g> {
    group: &'g QuotientGroup,
    pred: Predicate,
    square_table: Option<Vec<bool>>,
}

impl<'g> QuotientPredicate<'g> {
    pub fn new(group: &'g QuotientGroup, pred: Predicate) -> Self {
        let square_table = if pred == Predicate::Square {
            let mut t = vec![false; group.len()];
            for g in group.elems() {
                t[group.index_of(&g.mul(g)).expect("closed") as usize] = true;
            }
            Some(t)
        } else {
            None
        };
        QuotientPredicate {
            group,
            pred,
            square_table,
        }
    }

    pub fn eval_index(&self, i: u32) -> bool {
        let g = self.group.elem(i);
        match &self.pred {
            Predicate::All => true,
            Predicate::ZeroEntry => g.has_zero_entry(),
            Predicate::TraceEq(a) => {
                let alpha = self.group.ring().constant(*a);
                g.trace_equals(&alpha)
            }
            Predicate::Torsion => g.is_torsion_trace(),
            Predicate::Square => self.square_table.as_ref().unwrap()[i as usize],
            Predicate::ReducibleChi => g.char_poly_reducible().expect("field quotient"),
            Predicate::AdFixedPoint => g.ad_fixed_point_poly().expect("SL2").is_zero(),
        }
    }

    pub fn member_table(&self) -> Vec<bool> {
        (0..self.group.len() as u32)
            .map(|i| self.eval_index(i))
            .collect()
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone)]
pub struct CiEstimate {
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub trials: u64,
}

impl CiEstimate {
    fn from_counts(successes: u64, trials: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials);
        CiEstimate {
            estimate: successes as f64 / trials.max(1) as f64,
            ci_lo,
            ci_hi,
            trials,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuotientBound {
    pub descriptor: String,
    pub value: f64,
    /// True when computed from the exact measure; false when sampled.
    pub exact: bool,
    pub ci: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct EscapeEstimate {
    pub predicate: Predicate,
    pub l: usize,
    /// Sampled fraction upstairs; None when the predicate is only
    /// checkable downstairs.
    pub direct: Option<CiEstimate>,
    pub quotient_bounds: Vec<QuotientBound>,
    pub seed: u64,
    pub rng_id: &'static str,
}

/// Estimate mu_S^{(l)}(X) upstairs and the pushforward bound in each
/// given quotient (exact when the quotient is enumerable).
pub fn escape_probability(
    s: &GenSet<PolyFp>,
    pred: &Predicate,
    l: usize,
    quotients: &[Arc<ResidueRing>],
    trials: u64,
    seed: u64,
) -> Result<EscapeEstimate, WalkError> {
    // direct upstairs estimate when the predicate is polynomial
    let upstairs_ok = pred.eval_upstairs(&Mat2::identity(s.elems()[0].a.p())).is_some();
    let direct = if upstairs_ok {
        let hits = crate::par::run_sum_u64(trials as usize, |t| {
            let mut rng = walk_stream(seed, t as u64);
            let w = sample_walk_with(s, l, &mut rng);
            pred.eval_upstairs(&w.endpoint).unwrap() as u64
        });
        Some(CiEstimate::from_counts(hits, trials))
    } else {
        None
    };

    let mut quotient_bounds = Vec::new();
    for ring in quotients {
        quotient_bounds.push(quotient_bound(s, pred, l, ring, trials, seed)?);
    }
    Ok(EscapeEstimate {
        predicate: pred.clone(),
        l,
        direct,
        quotient_bounds,
        seed,
        rng_id: RNG_ID,
    })
}

/// Pushforward mass of the predicate set in one quotient: exact for
/// enumerable groups, sampled via the index walk otherwise.
pub fn quotient_bound(
    s: &GenSet<PolyFp>,
    pred: &Predicate,
    l: usize,
    ring: &Arc<ResidueRing>,
    trials: u64,
    seed: u64,
) -> Result<QuotientBound, WalkError> {
    let group = QuotientGroup::enumerate_with_budget(ring, DEFAULT_ENUM_BUDGET)
        .map_err(|e| WalkError::Budget(e.to_string()))?;
    let imgs = s.reduce_mod(ring)?;
    let qp = QuotientPredicate::new(&group, pred.clone());
    if group.len() <= 200_000 {
        let mu = exact_measure(&group, &imgs, l)?;
        let member = qp.member_table();
        Ok(QuotientBound {
            descriptor: ring.descriptor(),
            value: mu.mass_on(&member),
            exact: true,
            ci: None,
        })
    } else {
        // sampled index walk through right-multiplication tables
        let perms: Vec<Vec<u32>> = imgs.iter().map(|m| group.right_mul_perm(m)).collect();
        let hits = crate::par::run_sum_u64(trials as usize, |t| {
            let mut rng = walk_stream(seed ^ 0x9E3779B9, t as u64);
            let mut i = group.identity_index();
            for _ in 0..l {
                i = perms[rng.gen_range(0..perms.len())][i as usize];
            }
            qp.eval_index(i) as u64
        });
        let est = CiEstimate::from_counts(hits, trials);
        Ok(QuotientBound {
            descriptor: ring.descriptor(),
            value: est.estimate,
            exact: false,
            ci: Some((est.ci_lo, est.ci_hi)),
        })
    }
}

/// Disjoint, thread-count-independent RNG stream per trial.
fn walk_stream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Subvarieties of r-tuples for the product walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TuplePredicate {
    /// Some component lies in the predicate set (vanishing of the
    /// product polynomial).
    Component(Predicate),
    /// tr(g_1) = tr(g_2) (r = 2).
    TraceDiff,
    /// The zero polynomial: vanishes everywhere — a misuse case.
    ZeroPoly,
}

#[derive(Debug, Clone)]
pub struct ProductEscape {
    pub estimate: CiEstimate,
    /// Set when every sampled tuple landed in the variety, indicating
    /// F vanishes identically (theorem precondition violated).
    pub misuse_zero_variety: bool,
}

pub fn product_escape(
    s: &GenSet<PolyFp>,
    f: &TuplePredicate,
    r: usize,
    l: usize,
    trials: u64,
    seed: u64,
) -> Result<ProductEscape, WalkError> {
    if let TuplePredicate::Component(p) = f {
        if p.eval_upstairs(&Mat2::identity(s.elems()[0].a.p())).is_none() {
            return Err(WalkError::NotUpstairs(p.to_string()));
        }
    }
    if *f == TuplePredicate::TraceDiff && r != 2 {
        return Err(WalkError::UnknownPredicate(
            "trace-diff needs r = 2".into(),
        ));
    }
    let hits = crate::par::run_sum_u64(trials as usize, |t| {
        let mut rng = walk_stream(seed, t as u64);
        let tuple: Vec<Mat2<PolyFp>> = (0..r)
            .map(|_| sample_walk_with(s, l, &mut rng).endpoint)
            .collect();
        let inside = match f {
            TuplePredicate::Component(p) => {
                tuple.iter().any(|g| p.eval_upstairs(g).unwrap())
            }
            TuplePredicate::TraceDiff => tuple[0].trace() == tuple[1].trace(),
            TuplePredicate::ZeroPoly => true,
        };
        inside as u64
    });
    Ok(ProductEscape {
        estimate: CiEstimate::from_counts(hits, trials),
        misuse_zero_variety: hits == trials && trials > 0,
    })
}

/// Freeness certificate for a pair found in the ball B_S(N).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertStatus {
    CertifiedToDepth,
    Refuted,
}

#[derive(Debug, Clone)]
pub struct FreePairCertificate {
    pub x: Mat2<PolyFp>,
    pub y: Mat2<PolyFp>,
    pub search_radius: usize,
    pub certified_depth: usize,
    pub status: CertStatus,
    /// max entry degree over {x, y}: the girth bound denominator.
    pub degree_bound: usize,
}

/// Scan pairs from B_S(N) in (max word length, discovery order) and
/// return the first pair with no nontrivial relation of length <= L.
///
/// Only relations whose first letter is x or y need checking: a
/// reduced relation starting with x^-1 or y^-1 yields one starting
/// with x or y of the same length by taking the inverse word.
pub fn free_pair_search(s: &GenSet<PolyFp>, n_radius: usize, depth: usize) -> FreePairCertificate {
    let ball = ball_elements(s, n_radius);
    let p = s.elems()[0].a.p();
    let id = Mat2::identity(p);
    // pairs ordered by (max word length, position in the ball) so the
    // first certified pair is deterministic
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for xi in 0..ball.len() {
        for yi in 0..ball.len() {
            if xi != yi {
                pairs.push((xi, yi));
            }
        }
    }
    pairs.sort_by_key(|&(xi, yi)| (ball[xi].1.max(ball[yi].1), xi, yi));
    for (xi, yi) in pairs {
        {
            let (x, y) = (&ball[xi].0, &ball[yi].0);
            if *x == *y || x.is_identity() || y.is_identity() {
                continue;
            }
            if *y == x.inv().expect("SL2") {
                continue; // cyclic pair, never free of rank 2
            }
            if no_relation_to_depth(x, y, depth) {
                let degree_bound = x.max_entry_degree().max(y.max_entry_degree());
                return FreePairCertificate {
                    x: x.clone(),
                    y: y.clone(),
                    search_radius: n_radius,
                    certified_depth: depth,
                    status: CertStatus::CertifiedToDepth,
                    degree_bound,
                };
            }
        }
    }
    FreePairCertificate {
        x: id.clone(),
        y: id,
        search_radius: n_radius,
        certified_depth: depth,
        status: CertStatus::Refuted,
        degree_bound: 0,
    }
}

/// Ball B_S(N) by BFS over reduced words, deduplicated by matrix,
/// ordered by (word length, discovery order). The identity is included
/// at length 0.
fn ball_elements(s: &GenSet<PolyFp>, n: usize) -> Vec<(Mat2<PolyFp>, usize)> {
    let p = s.elems()[0].a.p();
    let id = Mat2::identity(p);
    let mut seen = std::collections::HashSet::new();
    seen.insert(id.clone());
    let mut out = vec![(id.clone(), 0usize)];
    let mut frontier = vec![id];
    for len in 1..=n {
        let mut next = Vec::new();
        for g in &frontier {
            for l in s.elems() {
                let h = g.mul(l);
                if seen.insert(h.clone()) {
                    out.push((h.clone(), len));
                    next.push(h);
                }
            }
        }
        frontier = next;
    }
    out
}

/// Exhaustive DFS over reduced words in {x^{±1}, y^{±1}} of length <=
/// depth with first letter x or y; true when no word equals I.
pub fn no_relation_to_depth(x: &Mat2<PolyFp>, y: &Mat2<PolyFp>, depth: usize) -> bool {
    let letters = [
        x.clone(),
        y.clone(),
        x.inv().expect("SL2"),
        y.inv().expect("SL2"),
    ];
    let inverse_of = [2usize, 3, 0, 1];
    // stack of (product, last letter, remaining depth)
    let mut stack: Vec<(Mat2<PolyFp>, usize, usize)> = Vec::new();
    for first in [0usize, 1] {
        if letters[first].is_identity() {
            return false;
        }
        stack.push((letters[first].clone(), first, depth - 1));
    }
    while let Some((prod, last, rem)) = stack.pop() {
        if rem == 0 {
            continue;
        }
        for (li, letter) in letters.iter().enumerate() {
            if inverse_of[last] == li {
                continue;
            }
            let next = prod.mul(letter);
            if next.is_identity() {
                return false;
            }
            stack.push((next, li, rem - 1));
        }
    }
    true
}
