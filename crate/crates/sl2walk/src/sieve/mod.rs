//! Experiment drivers: the small sieve (one growing modulus paired to
//! the walk length), the big sieve (product moduli with per-factor
//! density bounds), and the expander survey (girth / spectral-gap /
//! bipartiteness table over a modulus family).

pub mod config;
pub mod fit;
pub mod report;

pub use config::{BudgetCaps, ExperimentConfig, ModulusStrategy};
pub use fit::{classify_shape, log_linear_fit, DecayShape, FitResult, ShapeFit};
pub use report::{strip_meta, ExperimentReport, FreePairSummary, ReportRow, SCHEMA_VERSION};

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cayley::{
    count_oracles, girth, is_bipartite, sl2_order_formula, spectral_rho, CayleyError, EigMethod,
    GirthResult, QuotientGroup,
};
use crate::polyring::{random_irreducible, PolyError, PolyFp};
use crate::quotient::{ResidueRing, RingError};
use crate::sl2::{GenSet, Mat2, MatError};
use crate::walker::{
    exact_measure, free_pair_search, CertStatus, Predicate, QuotientPredicate, WalkError,
};

use config::first_prime_above;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no usable modulus: {0}")]
    NoModulus(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Cayley(#[from] CayleyError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// Groups up to this size get exact pushforward measures; larger ones
/// are sampled by index walks.
const EXACT_MEASURE_CUTOFF: usize = 200_000;

fn mat_desc(m: &Mat2<PolyFp>) -> String {
    let e = |p: &PolyFp| {
        p.coeffs()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("{};{};{};{}", e(&m.a), e(&m.b), e(&m.c), e(&m.d))
}

/// The generator set the walk actually uses: either the configured set
/// or a relation-free pair found in its ball, recorded in the header.
fn walk_generators(
    cfg: &ExperimentConfig,
    report: &mut ExperimentReport,
) -> Result<GenSet<PolyFp>, SieveError> {
    let s = cfg.build_generators()?;
    if !cfg.certify_free_pair {
        return Ok(s);
    }
    let cert = free_pair_search(&s, cfg.free_pair_radius, cfg.free_pair_depth);
    if cert.status != CertStatus::CertifiedToDepth {
        return Err(SieveError::Config(format!(
            "no relation-free pair to depth {} in the radius-{} ball",
            cfg.free_pair_depth, cfg.free_pair_radius
        )));
    }
    report.header.free_pair = Some(FreePairSummary {
        x: mat_desc(&cert.x),
        y: mat_desc(&cert.y),
        certified_depth: cert.certified_depth,
        degree_bound: cert.degree_bound,
    });
    let pair = GenSet::new(vec![cert.x, cert.y])?;
    Ok(pair)
}

/// Deterministic modulus for a degree: seeded irreducible pick.
fn modulus_for_degree(p: u64, d: u64, seed: u64) -> Result<Arc<ResidueRing>, SieveError> {
    let f = random_irreducible(p, d as usize, seed.wrapping_add(d))?;
    Ok(ResidueRing::from_irreducible(f))
}

/// Nearest available degree to the pairing target l * c; ties go to
/// the smaller degree so the choice is deterministic.
fn paired_degree(degrees: &[u64], l: usize, c: f64) -> u64 {
    let target = l as f64 * c;
    *degrees
        .iter()
        .min_by(|a, b| {
            let da = (**a as f64 - target).abs();
            let db = (**b as f64 - target).abs();
            da.partial_cmp(&db)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(b))
        })
        .expect("nonempty degree list")
}

/// Pushforward mass of the predicate set after l steps: exact measure
/// for small groups, seeded index walks above the cutoff.
fn bound_in_group(
    group: &QuotientGroup,
    imgs: &[Mat2<crate::quotient::ResidueElem>],
    pred: &Predicate,
    l: usize,
    trials: u64,
    seed: u64,
) -> Result<(f64, bool, Option<(f64, f64)>), SieveError> {
    let qp = QuotientPredicate::new(group, pred.clone());
    if group.len() <= EXACT_MEASURE_CUTOFF {
        let mu = exact_measure(group, imgs, l)?;
        let member = qp.member_table();
        Ok((mu.mass_on(&member), true, None))
    } else {
        let perms: Vec<Vec<u32>> = imgs.iter().map(|m| group.right_mul_perm(m)).collect();
        let hits = crate::par::run_sum_u64(trials as usize, |t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51E7_EB0B);
            rng.set_stream(t as u64);
            let mut i = group.identity_index();
            for _ in 0..l {
                i = perms[rng.gen_range(0..perms.len())][i as usize];
            }
            qp.eval_index(i) as u64
        });
        let est = hits as f64 / trials.max(1) as f64;
        let ci = crate::walker::wilson_interval(hits, trials);
        Ok((est, false, Some(ci)))
    }
}

/// Small sieve: one modulus per row, degree growing with the walk
/// length, predicate with a provably small quotient image.
pub fn run_small_sieve(cfg: &ExperimentConfig) -> Result<ExperimentReport, SieveError> {
    let t0 = Instant::now();
    cfg.validate()?;
    let pred: Predicate = cfg
        .predicate
        .parse()
        .map_err(|e: WalkError| SieveError::Config(e.to_string()))?;
    if !matches!(
        pred,
        Predicate::ZeroEntry | Predicate::TraceEq(_) | Predicate::Torsion | Predicate::AdFixedPoint
    ) {
        return Err(SieveError::Config(format!(
            "predicate {pred} has no small quotient image; use the big sieve"
        )));
    }
    let mut report = ExperimentReport::new("small-sieve", cfg);
    let s = walk_generators(cfg, &mut report)?;

    let degrees = cfg.degrees()?;
    let usable: Vec<u64> = degrees
        .iter()
        .copied()
        .filter(|&d| {
            sl2_order_formula(cfg.p, &[d as usize])
                .is_some_and(|o| o <= cfg.budget.enumeration as u128)
        })
        .collect();
    if usable.is_empty() {
        return Err(SieveError::NoModulus(format!(
            "no degree in {degrees:?} keeps |SL2| within the enumeration budget {}",
            cfg.budget.enumeration
        )));
    }

    let mut cache: HashMap<u64, (Arc<ResidueRing>, QuotientGroup)> = HashMap::new();
    for &l in &cfg.l_schedule {
        let d = paired_degree(&usable, l, cfg.pairing_constant);
        if !cache.contains_key(&d) {
            let ring = modulus_for_degree(cfg.p, d, cfg.seed)?;
            let group = QuotientGroup::enumerate_with_budget(&ring, cfg.budget.enumeration as u128)?;
            cache.insert(d, (ring, group));
        }
        let (ring, group) = &cache[&d];
        let imgs = s.reduce_mod(ring)?;
        let (bound, exact, ci) = bound_in_group(group, &imgs, &pred, l, cfg.trials, cfg.seed)?;
        report.rows.push(ReportRow {
            l: Some(l),
            modulus: ring.descriptor(),
            bound: Some(bound),
            exact,
            ci_lo: ci.map(|c| c.0),
            ci_hi: ci.map(|c| c.1),
            ..Default::default()
        });
    }

    let ls: Vec<f64> = report.rows.iter().map(|r| r.l.unwrap() as f64).collect();
    let bs: Vec<f64> = report.rows.iter().map(|r| r.bound.unwrap()).collect();
    report.fit = Some(classify_shape(&ls, &bs));
    report.wall_clock_ms = t0.elapsed().as_millis();
    Ok(report)
}

/// Per-factor density fallback when a factor field is beyond the
/// census budget: 3/4 for squares (at least a quarter of every SL2(q)
/// is a non-square) and 5/8 for reducible characteristic polynomials
/// (at most half the group plus the trace-±2 classes).
fn fallback_gamma(pred: &Predicate) -> f64 {
    match pred {
        Predicate::Square => 0.75,
        Predicate::ReducibleChi => 0.625,
        _ => 1.0,
    }
}

/// Big sieve: product moduli over prime degrees above M; the bound
/// column multiplies per-factor densities (exact census when the
/// factor field is enumerable, fallback otherwise) and the factor
/// count follows i = ceil(c * sqrt(l / log l)).
pub fn run_big_sieve(cfg: &ExperimentConfig) -> Result<ExperimentReport, SieveError> {
    let t0 = Instant::now();
    cfg.validate()?;
    let pred: Predicate = cfg
        .predicate
        .parse()
        .map_err(|e: WalkError| SieveError::Config(e.to_string()))?;
    if !matches!(pred, Predicate::Square | Predicate::ReducibleChi) {
        return Err(SieveError::Config(format!(
            "predicate {pred} needs a per-quotient density below 1; the big sieve supports square and reducible-chi"
        )));
    }
    let mut report = ExperimentReport::new("big-sieve", cfg);
    let i2 = cfg.i2.unwrap_or_else(|| first_prime_above(cfg.m_threshold));
    report.header.notes.push(format!(
        "first factor degree i2 = {i2} (free parameter; default = first prime above M)"
    ));
    report.header.notes.push(
        "bound column multiplies per-factor densities; product groups are never enumerated"
            .into(),
    );

    let schedule_i: Vec<usize> = cfg
        .l_schedule
        .iter()
        .map(|&l| factor_count(l, cfg.schedule_constant))
        .collect();
    let max_i = *schedule_i.iter().max().expect("nonempty schedule");

    // consecutive prime degrees starting at i2
    let mut factor_degrees = Vec::with_capacity(max_i);
    let mut d = i2;
    for _ in 0..max_i {
        factor_degrees.push(d);
        d = first_prime_above(d);
    }

    // per-factor density: exact census when enumerable, else fallback
    let gamma_fb = fallback_gamma(&pred);
    let mut gammas: Vec<(f64, bool)> = Vec::new();
    for &d in &factor_degrees {
        let enumerable = sl2_order_formula(cfg.p, &[d as usize])
            .is_some_and(|o| o <= cfg.budget.enumeration as u128);
        if enumerable {
            let ring = modulus_for_degree(cfg.p, d, cfg.seed)?;
            let group = QuotientGroup::enumerate_with_budget(&ring, cfg.budget.enumeration as u128)?;
            let census = count_oracles(&group)?;
            let count = match pred {
                Predicate::Square => census.squares,
                Predicate::ReducibleChi => census.reducible_char_poly,
                _ => unreachable!("predicate filtered above"),
            };
            gammas.push((count as f64 / census.order as f64, true));
        } else {
            gammas.push((gamma_fb, false));
        }
    }

    for (&l, &i) in cfg.l_schedule.iter().zip(&schedule_i) {
        let bound: f64 = gammas[..i].iter().map(|(g, _)| g).product();
        let fallback = gammas[..i].iter().filter(|(_, exact)| !exact).count();
        let desc = factor_degrees[..i]
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join("*");
        report.rows.push(ReportRow {
            l: Some(l),
            modulus: format!("p={};degrees={desc}", cfg.p),
            factor_count: Some(i),
            bound: Some(bound),
            exact: fallback == 0,
            fallback_factors: Some(fallback),
            ..Default::default()
        });
    }

    let ls: Vec<f64> = report.rows.iter().map(|r| r.l.unwrap() as f64).collect();
    let bs: Vec<f64> = report.rows.iter().map(|r| r.bound.unwrap()).collect();
    report.fit = Some(classify_shape(&ls, &bs));
    report.wall_clock_ms = t0.elapsed().as_millis();
    Ok(report)
}

/// Factor-count schedule i = max(1, ceil(c * sqrt(l / log l))).
pub fn factor_count(l: usize, c: f64) -> usize {
    if l < 2 {
        return 1;
    }
    let lf = l as f64;
    ((c * (lf / lf.ln()).sqrt()).ceil() as usize).max(1)
}

/// Expander survey: per-modulus girth, spectral radius, bipartiteness
/// and order, with the girth cross-checked against the entry-degree
/// bound when the pair is certified relation-free deep enough.
pub fn run_expander_survey(cfg: &ExperimentConfig) -> Result<ExperimentReport, SieveError> {
    let t0 = Instant::now();
    cfg.validate()?;
    let mut report = ExperimentReport::new("survey", cfg);

    let degrees = cfg.degrees()?;
    let max_d = *degrees.iter().max().expect("validated nonempty");

    // deep enough certification for the girth bound at every modulus
    let s0 = cfg.build_generators()?;
    let cert = if cfg.certify_free_pair {
        let depth = cfg.free_pair_depth.max(2 * max_d as usize);
        let c = free_pair_search(&s0, cfg.free_pair_radius, depth);
        if c.status != CertStatus::CertifiedToDepth {
            return Err(SieveError::Config(format!(
                "no relation-free pair to depth {depth} in the radius-{} ball",
                cfg.free_pair_radius
            )));
        }
        report.header.free_pair = Some(FreePairSummary {
            x: mat_desc(&c.x),
            y: mat_desc(&c.y),
            certified_depth: c.certified_depth,
            degree_bound: c.degree_bound,
        });
        Some(c)
    } else {
        None
    };
    let s = match &cert {
        Some(c) => GenSet::new(vec![c.x.clone(), c.y.clone()])?,
        None => s0,
    };

    let girth_budget = (cfg.budget.enumeration as usize).min(2_000_000);
    for &d in &degrees {
        let ring = modulus_for_degree(cfg.p, d, cfg.seed)?;
        let order = sl2_order_formula(cfg.p, &[d as usize]);
        let g = girth(&ring, &s, girth_budget)?;
        let (girth_str, girth_lower) = match &g {
            GirthResult::Finite(v) => (v.to_string(), Some(*v)),
            GirthResult::AtLeast(v) => (format!(">={v}"), Some(*v)),
            GirthResult::Degenerate(msg) => (format!("degenerate:{msg}"), None),
        };
        let girth_bound_ok = cert.as_ref().map(|c| {
            let needed = (d as usize).div_ceil(c.degree_bound.max(1));
            c.certified_depth >= needed
                && girth_lower.map(|v| v >= needed).unwrap_or(false)
        });
        let (rho, bipartite) = if order.is_some_and(|o| o <= cfg.budget.enumeration as u128) {
            let group = QuotientGroup::enumerate_with_budget(&ring, cfg.budget.enumeration as u128)?;
            let imgs = s.reduce_mod(&ring)?;
            let rep = spectral_rho(&group, &imgs, EigMethod::Auto)
                .map_err(|e| SieveError::Config(format!("spectral failure: {e}")))?;
            let bip = is_bipartite(&group, &imgs)
                .map_err(|e| SieveError::Config(format!("bipartiteness failure: {e}")))?;
            (Some(rep.rho), Some(bip))
        } else {
            (None, None)
        };
        report.rows.push(ReportRow {
            modulus: ring.descriptor(),
            order: order.map(|o| o.to_string()),
            girth: Some(girth_str),
            rho,
            bipartite,
            girth_bound_ok,
            exact: true,
            ..Default::default()
        });
    }
    report.wall_clock_ms = t0.elapsed().as_millis();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_toml(body: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(body).unwrap()
    }

    #[test]
    fn small_sieve_exact_rows_decay() {
        let cfg = cfg_toml(
            r#"
            p = 3
            predicate = "trace-2"
            l_schedule = [0, 6, 30, 45]
            certify_free_pair = false
            generators = "1;1;0;1|1;0;1,1;1"
            trials = 1000
            pairing_constant = 0.0666666666666
            [modulus_strategy]
            kind = "explicit-degrees"
            degrees = [2, 3]
        "#,
        );
        let rep = run_small_sieve(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 4);
        // l = 0: point mass at the identity, which has trace 2
        assert_eq!(rep.rows[0].bound, Some(1.0));
        assert!(rep.rows.iter().all(|r| r.exact));
        // bounds decay along the schedule, and the well-mixed row
        // approximates the uniform target fraction
        let bounds: Vec<f64> = rep.rows.iter().map(|r| r.bound.unwrap()).collect();
        assert!(bounds.windows(2).all(|w| w[0] > w[1]), "got {bounds:?}");
        let b30 = rep.rows[2].bound.unwrap();
        assert!((b30 - 81.0 / 720.0).abs() < 0.03, "got {b30}");
        let b45 = rep.rows[3].bound.unwrap();
        assert!((b45 - 729.0 / 19656.0).abs() < 0.02, "got {b45}");
        let fit = rep.fit.as_ref().unwrap();
        assert!(fit.exponential.as_ref().unwrap().slope < 0.0);
    }

    #[test]
    fn small_sieve_rejects_large_image_predicate() {
        let cfg = cfg_toml(
            r#"
            p = 3
            predicate = "square"
            l_schedule = [4]
            certify_free_pair = false
            [modulus_strategy]
            kind = "explicit-degrees"
            degrees = [2]
        "#,
        );
        assert!(matches!(
            run_small_sieve(&cfg),
            Err(SieveError::Config(_))
        ));
    }

    #[test]
    fn small_sieve_reports_modulus_gap() {
        // degree 7 alone: |SL2(3^7)| is far beyond the enumeration budget
        let cfg = cfg_toml(
            r#"
            p = 3
            predicate = "zero-entry"
            l_schedule = [4]
            certify_free_pair = false
            [modulus_strategy]
            kind = "explicit-degrees"
            degrees = [7]
        "#,
        );
        assert!(matches!(
            run_small_sieve(&cfg),
            Err(SieveError::NoModulus(_))
        ));
    }

    #[test]
    fn factor_count_schedule_shape() {
        assert_eq!(factor_count(0, 1.0), 1);
        assert_eq!(factor_count(1, 1.0), 1);
        // monotone nondecreasing, sublinear growth
        let vals: Vec<usize> = (2..200).map(|l| factor_count(l, 1.0)).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert!(factor_count(100, 1.0) < 10);
    }

    #[test]
    fn big_sieve_density_products() {
        let cfg = cfg_toml(
            r#"
            p = 3
            predicate = "square"
            l_schedule = [4, 16, 36]
            certify_free_pair = false
            [modulus_strategy]
            kind = "primes-above"
            count = 1
        "#,
        );
        let rep = run_big_sieve(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 3);
        for row in &rep.rows {
            let i = row.factor_count.unwrap();
            let bound = row.bound.unwrap();
            // census densities never exceed the 3/4 fallback
            assert!(bound <= 0.75f64.powi(i as i32) + 1e-12);
            assert!(bound > 0.0);
            // only the degree-3 factor field is enumerable at p = 3
            assert_eq!(row.fallback_factors.unwrap(), i.saturating_sub(1));
        }
        // factor counts grow with l
        let is: Vec<usize> = rep.rows.iter().map(|r| r.factor_count.unwrap()).collect();
        assert!(is.windows(2).all(|w| w[0] <= w[1]));
        assert!(is[0] < *is.last().unwrap());
    }

    #[test]
    fn big_sieve_rejects_small_image_predicate() {
        let cfg = cfg_toml(
            r#"
            p = 3
            predicate = "trace-2"
            l_schedule = [4]
            [modulus_strategy]
            kind = "primes-above"
            count = 1
        "#,
        );
        assert!(matches!(run_big_sieve(&cfg), Err(SieveError::Config(_))));
    }

    #[test]
    fn survey_rows_and_girth_bound() {
        let cfg = cfg_toml(
            r#"
            p = 3
            predicate = "all"
            l_schedule = [2]
            free_pair_depth = 6
            [modulus_strategy]
            kind = "explicit-degrees"
            degrees = [2, 3]
        "#,
        );
        let rep = run_expander_survey(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 2);
        assert!(rep.header.free_pair.is_some());
        for row in &rep.rows {
            assert_eq!(row.girth_bound_ok, Some(true), "row {row:?}");
            let rho = row.rho.unwrap();
            assert!(rho > 0.0 && rho < 1.0);
            assert_eq!(row.bipartite, Some(false));
        }
        // orders match the closed form
        assert_eq!(rep.rows[0].order.as_deref(), Some("720"));
        assert_eq!(rep.rows[1].order.as_deref(), Some("19656"));
    }

    #[test]
    fn survey_deterministic_bytes() {
        let cfg = cfg_toml(
            r#"
            p = 3
            predicate = "all"
            l_schedule = [2]
            free_pair_depth = 6
            seed = 7
            [modulus_strategy]
            kind = "explicit-degrees"
            degrees = [2]
        "#,
        );
        let a = run_expander_survey(&cfg).unwrap().deterministic_json_lines();
        let b = run_expander_survey(&cfg).unwrap().deterministic_json_lines();
        assert_eq!(a, b);
    }
}
