//! The classified subgroup families of SL2(q) — Borel, split torus,
//! subfield groups, center — plus custom closures, and the exact
//! escape profile of a walk measure from a subgroup.

use num_bigint::BigUint;

use super::{sl2_order_formula, CayleyError, QuotientGroup};
use crate::quotient::ResidueElem;
use crate::sl2::Mat2;
use crate::walker::exact_measure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupKind {
    /// Stabilizer of [1:0] in the projective line: upper triangulars.
    Borel,
    /// Diagonal subgroup, cyclic of order q - 1.
    Torus,
    /// SL2 over the subfield of order p^m; needs m | deg(f).
    Subfield(usize),
    /// {I, -I}.
    Center,
    /// Closure of an explicit generator list.
    Custom(Vec<Mat2<ResidueElem>>),
}

#[derive(Debug, Clone)]
pub struct SubgroupWitness {
    pub kind: SubgroupKind,
    pub generators: Vec<Mat2<ResidueElem>>,
    /// Indices of the members within the ambient enumeration.
    pub elements: Vec<u32>,
    /// member[i] iff elems[i] is in the subgroup.
    pub member: Vec<bool>,
    pub order: u128,
    pub index_in_g: u128,
}

pub fn build_subgroup(
    group: &QuotientGroup,
    kind: SubgroupKind,
) -> Result<SubgroupWitness, CayleyError> {
    let ring = group.ring();
    let needs_field = !matches!(kind, SubgroupKind::Custom(_) | SubgroupKind::Center);
    if needs_field && !ring.is_field() {
        return Err(CayleyError::BadSubgroupParams(
            "kind requires a field modulus".into(),
        ));
    }

    let elements: Vec<u32> = match &kind {
        SubgroupKind::Borel => collect(group, |m| m.c.is_zero()),
        SubgroupKind::Torus => collect(group, |m| m.b.is_zero() && m.c.is_zero()),
        SubgroupKind::Center => collect(group, |m| {
            m.b.is_zero() && m.c.is_zero() && m.a == m.d
        }),
        SubgroupKind::Subfield(m) => {
            let n = ring.degree();
            if *m == 0 || n % m != 0 || *m == n {
                return Err(CayleyError::BadSubgroupParams(format!(
                    "subfield degree {m} must properly divide {n}"
                )));
            }
            // fixed field of frobenius^m: x^(p^m) = x
            let pm = BigUint::from(ring.p()).pow(*m as u32);
            let fixed = |x: &ResidueElem| x.pow(&pm) == *x;
            collect(group, |mat| {
                fixed(&mat.a) && fixed(&mat.b) && fixed(&mat.c) && fixed(&mat.d)
            })
        }
        SubgroupKind::Custom(gens) => group.closure(gens),
    };

    let mut member = vec![false; group.len()];
    for &i in &elements {
        member[i as usize] = true;
    }

    verify_closure(group, &elements, &member)?;

    let order = elements.len() as u128;
    // expected orders for the named families
    let q = ring.cardinality();
    if let (Some(q), true) = (q, ring.is_field()) {
        let expect = match &kind {
            SubgroupKind::Borel => Some(q * (q - 1)),
            SubgroupKind::Torus => Some(q - 1),
            SubgroupKind::Center => Some(if ring.p() == 2 { 1 } else { 2 }),
            SubgroupKind::Subfield(m) => sl2_order_formula(ring.p(), &[*m]),
            SubgroupKind::Custom(_) => None,
        };
        if let Some(e) = expect {
            if e != order {
                return Err(CayleyError::BadSubgroupParams(format!(
                    "expected order {e}, enumerated {order}"
                )));
            }
        }
    }
    if group.order() % order != 0 {
        return Err(CayleyError::BadSubgroupParams(format!(
            "Lagrange violation: {order} does not divide {}",
            group.order()
        )));
    }

    let generators = greedy_generators(group, &elements, &member);
    Ok(SubgroupWitness {
        kind,
        generators,
        elements,
        member,
        order,
        index_in_g: group.order() / order,
    })
}

fn collect<F: Fn(&Mat2<ResidueElem>) -> bool>(group: &QuotientGroup, pred: F) -> Vec<u32> {
    (0..group.len() as u32)
        .filter(|&i| pred(group.elem(i)))
        .collect()
}

/// Pairwise closure check (exhaustive up to 5000 members, sampled above).
fn verify_closure(
    group: &QuotientGroup,
    elements: &[u32],
    member: &[bool],
) -> Result<(), CayleyError> {
    let check = |i: u32, j: u32| -> bool {
        let prod = group.elem(i).mul(group.elem(j));
        member[group.index_of(&prod).expect("group closed") as usize]
    };
    for &i in elements {
        let inv = group.elem(i).inv()?;
        if !member[group.index_of(&inv).expect("group closed") as usize] {
            return Err(CayleyError::BadSubgroupParams(
                "set not closed under inverse".into(),
            ));
        }
    }
    if elements.len() <= 5000 {
        for &i in elements {
            for &j in elements {
                if !check(i, j) {
                    return Err(CayleyError::BadSubgroupParams(
                        "set not closed under multiplication".into(),
                    ));
                }
            }
        }
    } else {
        let m = elements.len();
        for k in 0..200_000usize {
            let i = elements[(k.wrapping_mul(2654435761)) % m];
            let j = elements[(k.wrapping_mul(40503) + 7) % m];
            if !check(i, j) {
                return Err(CayleyError::BadSubgroupParams(
                    "set not closed under multiplication".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Small generating set by greedy closure growth.
fn greedy_generators(
    group: &QuotientGroup,
    elements: &[u32],
    member: &[bool],
) -> Vec<Mat2<ResidueElem>> {
    let mut gens: Vec<Mat2<ResidueElem>> = Vec::new();
    let mut covered = vec![false; group.len()];
    covered[group.identity_index() as usize] = true;
    let mut covered_count = 1usize;
    for &i in elements {
        if covered[i as usize] {
            continue;
        }
        gens.push(group.elem(i).clone());
        let reach = group.closure(&gens);
        covered_count = reach.len();
        for &j in &reach {
            debug_assert!(member[j as usize]);
            covered[j as usize] = true;
        }
        if covered_count == elements.len() {
            break;
        }
    }
    let _ = covered_count;
    gens
}

/// mu_S^{(2l)}(H) for l = 1..l_max, computed from the exact walk
/// measure: two pushforward steps per row, then the mass on H.
pub fn escape_profile(
    group: &QuotientGroup,
    s: &[Mat2<ResidueElem>],
    h: &SubgroupWitness,
    l_max: usize,
) -> Result<Vec<f64>, CayleyError> {
    let mut profile = Vec::with_capacity(l_max);
    let mut mu = exact_measure(group, s, 0).map_err(|e| {
        CayleyError::BadSubgroupParams(format!("measure construction failed: {e}"))
    })?;
    for _ in 1..=l_max {
        mu.step(group, s);
        mu.step(group, s);
        profile.push(mu.mass_on(&h.member));
    }
    Ok(profile)
}

/// Same quantity by the folding identity: mu^{(2l)}(H) equals the
/// squared 2-norm of mu^{(l)} folded onto the cosets G/H.
pub fn escape_profile_folded(
    group: &QuotientGroup,
    s: &[Mat2<ResidueElem>],
    h: &SubgroupWitness,
    l_max: usize,
) -> Result<Vec<f64>, CayleyError> {
    // coset label = smallest member index of gH
    let mut label = vec![u32::MAX; group.len()];
    for i in 0..group.len() as u32 {
        let g = group.elem(i);
        let mut best = u32::MAX;
        for &hj in &h.elements {
            let idx = group
                .index_of(&g.mul(group.elem(hj)))
                .expect("group closed");
            best = best.min(idx);
        }
        label[i as usize] = best;
    }
    let mut mu = exact_measure(group, s, 0).map_err(|e| {
        CayleyError::BadSubgroupParams(format!("measure construction failed: {e}"))
    })?;
    let mut profile = Vec::with_capacity(l_max);
    for _ in 1..=l_max {
        mu.step(group, s);
        let mut coset_mass = std::collections::HashMap::new();
        for (i, w) in mu.weights().iter().enumerate() {
            *coset_mass.entry(label[i]).or_insert(0.0) += *w;
        }
        profile.push(coset_mass.values().map(|c| c * c).sum());
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::PolyFp;
    use crate::quotient::ResidueRing;
    use crate::sl2::GenSet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn group(s: &str) -> QuotientGroup {
        let r: Arc<ResidueRing> = ResidueRing::new(s.parse::<PolyFp>().unwrap()).unwrap();
        QuotientGroup::enumerate(&r).unwrap()
    }

    #[test]
    fn borel_order() {
        for (m, q) in [("0,1@3", 3u128), ("0,1@5", 5), ("1,0,1@3", 9)] {
            let g = group(m);
            let h = build_subgroup(&g, SubgroupKind::Borel).unwrap();
            assert_eq!(h.order, q * (q - 1));
            assert_eq!(h.order * h.index_in_g, g.order());
        }
    }

    #[test]
    fn torus_order_and_cyclic() {
        for (m, q) in [("0,1@5", 5u128), ("0,1@7", 7), ("1,0,1@3", 9)] {
            let g = group(m);
            let h = build_subgroup(&g, SubgroupKind::Torus).unwrap();
            assert_eq!(h.order, q - 1);
            // cyclic: some element has order q-1
            let id = g.identity_index();
            let cyclic = h.elements.iter().any(|&i| {
                let base = g.elem(i);
                let mut acc = base.clone();
                let mut ord = 1u128;
                while g.index_of(&acc).unwrap() != id {
                    acc = acc.mul(base);
                    ord += 1;
                }
                ord == h.order
            });
            assert!(cyclic, "q={q}");
        }
    }

    #[test]
    fn center_is_plus_minus_identity() {
        let g = group("0,1@5");
        let h = build_subgroup(&g, SubgroupKind::Center).unwrap();
        assert_eq!(h.order, 2);
        for &i in &h.elements {
            let m = g.elem(i);
            assert!(m.b.is_zero() && m.c.is_zero() && m.a == m.d);
        }
    }

    #[test]
    fn subfield_subgroup() {
        // F_9 over F_3: SL2(3) inside SL2(9)
        let g = group("1,0,1@3");
        let h = build_subgroup(&g, SubgroupKind::Subfield(1)).unwrap();
        assert_eq!(h.order, 24);
        assert_eq!(h.index_in_g, 30);
        // m must properly divide n
        assert!(build_subgroup(&g, SubgroupKind::Subfield(2)).is_err());
        let g4 = group("2,1,0,0,1@3"); // degree-4 irreducible? checked below
        if g4.ring().is_field() {
            assert!(build_subgroup(&g4, SubgroupKind::Subfield(3)).is_err());
        }
    }

    #[test]
    fn borel_is_metabelian() {
        // [[a,b],[c,d]] = I for commutators of commutators
        let comm = |x: &Mat2<ResidueElem>, y: &Mat2<ResidueElem>| {
            x.mul(y)
                .mul(&x.inv().unwrap())
                .mul(&y.inv().unwrap())
        };
        // exhaustive for q = 3
        {
            let g = group("0,1@3");
            let h = build_subgroup(&g, SubgroupKind::Borel).unwrap();
            for &i in &h.elements {
                for &j in &h.elements {
                    for &k in &h.elements {
                        for &l in &h.elements {
                            let c1 = comm(g.elem(i), g.elem(j));
                            let c2 = comm(g.elem(k), g.elem(l));
                            assert!(comm(&c1, &c2).is_identity());
                        }
                    }
                }
            }
        }
        // sampled for q in {5, 9}
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for m in ["0,1@5", "1,0,1@3"] {
            let g = group(m);
            let h = build_subgroup(&g, SubgroupKind::Borel).unwrap();
            for _ in 0..10_000 {
                let pick = |rng: &mut ChaCha8Rng| {
                    g.elem(h.elements[rng.gen_range(0..h.elements.len())]).clone()
                };
                let c1 = comm(&pick(&mut rng), &pick(&mut rng));
                let c2 = comm(&pick(&mut rng), &pick(&mut rng));
                assert!(comm(&c1, &c2).is_identity());
            }
        }
    }

    #[test]
    fn custom_closure_and_goursat_projections() {
        // product modulus t(t^2+1) over F3: subgroups generated by
        // random pairs that turn out proper have a proper projection
        let f = "0,1@3"
            .parse::<PolyFp>()
            .unwrap()
            .mul(&"1,0,1@3".parse().unwrap());
        let r = ResidueRing::new(f).unwrap();
        let g = QuotientGroup::enumerate(&r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let mut proper_seen = 0;
        for trial in 0..30 {
            let a = g.elem(rng.gen_range(1..g.len() as u32)).clone();
            let b = if trial < 10 {
                // cyclic subgroups are proper, guaranteeing coverage
                a.clone()
            } else {
                g.elem(rng.gen_range(1..g.len() as u32)).clone()
            };
            if a.is_identity() || b.is_identity() {
                continue;
            }
            let gens = GenSet::new(vec![a, b]).unwrap();
            let h = build_subgroup(&g, SubgroupKind::Custom(gens.elems().to_vec())).unwrap();
            if h.order == g.order() {
                continue;
            }
            proper_seen += 1;
            // projections to the two CRT factors
            let mut proj_proper = false;
            for (fac, _) in &r.factorization().factors {
                let fr = ResidueRing::from_irreducible(fac.clone());
                let fg = QuotientGroup::enumerate(&fr).unwrap();
                let mut imgs = std::collections::HashSet::new();
                for &i in &h.elements {
                    let m = g.elem(i);
                    let down = Mat2::new(
                        fr.reduce(m.a.rep()).unwrap(),
                        fr.reduce(m.b.rep()).unwrap(),
                        fr.reduce(m.c.rep()).unwrap(),
                        fr.reduce(m.d.rep()).unwrap(),
                    )
                    .unwrap();
                    imgs.insert(fg.index_of(&down).unwrap());
                }
                if (imgs.len() as u128) < fg.order() {
                    proj_proper = true;
                }
            }
            assert!(proj_proper, "proper subgroup with both projections onto");
        }
        assert!(proper_seen > 0, "no proper subgroups sampled");
    }

    #[test]
    fn escape_from_whole_group_is_one() {
        let g = group("0,1@3");
        let r = g.ring().clone();
        let a = Mat2::new_sl2(r.one(), r.one(), r.zero(), r.one()).unwrap();
        let b = Mat2::new_sl2(r.one(), r.zero(), r.one(), r.one()).unwrap();
        let s = GenSet::new(vec![a, b]).unwrap().elems().to_vec();
        let all = build_subgroup(&g, SubgroupKind::Custom(s.clone())).unwrap();
        assert_eq!(all.order, g.order());
        let prof = escape_profile(&g, &s, &all, 8).unwrap();
        for v in prof {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_and_folded_profiles_agree() {
        let g = group("0,1@5");
        let r = g.ring().clone();
        let a = Mat2::new_sl2(r.one(), r.one(), r.zero(), r.one()).unwrap();
        let b = Mat2::new_sl2(r.one(), r.zero(), r.one(), r.one()).unwrap();
        let s = GenSet::new(vec![a, b]).unwrap().elems().to_vec();
        assert!(g.generates(&s));
        let h = build_subgroup(&g, SubgroupKind::Borel).unwrap();
        let direct = escape_profile(&g, &s, &h, 15).unwrap();
        let folded = escape_profile_folded(&g, &s, &h, 15).unwrap();
        for (d, f) in direct.iter().zip(&folded) {
            assert!((d - f).abs() < 1e-12, "direct {d} vs folded {f}");
        }
    }

    #[test]
    fn escape_profile_monotone_and_drops() {
        // unipotent pair with parameters 1 and t: the images generate
        // SL2(9) (the pure-t pair lands in a conjugate of SL2(3))
        let g = group("1,0,1@3");
        let r = g.ring().clone();
        let one = PolyFp::one(3);
        let zero = PolyFp::zero(3);
        let one_plus_t = "1,1@3".parse::<PolyFp>().unwrap();
        let a = Mat2::new(one.clone(), one.clone(), zero.clone(), one.clone()).unwrap();
        let b = Mat2::new(one.clone(), zero, one_plus_t, one).unwrap();
        let s = GenSet::new(vec![a, b]).unwrap().reduce_mod(&r).unwrap();
        assert!(g.generates(&s), "walk generators must generate SL2(9)");
        let h = build_subgroup(&g, SubgroupKind::Borel).unwrap();
        let prof = escape_profile(&g, &s, &h, 30).unwrap();
        for w in prof.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "profile must be non-increasing");
        }
        let target = (h.index_in_g as f64).powf(-0.25);
        assert!(
            prof.iter().any(|&v| v < target),
            "profile never dropped below {target}: {prof:?}"
        );
    }
}
