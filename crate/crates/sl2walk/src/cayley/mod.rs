//! Enumerated congruence quotients SL2(Fp[t]/(f)) and the graph/spectral
//! machinery on their Cayley graphs.

mod census;
mod girth;
mod spectral;
mod subgroup;

pub use census::{count_oracles, Census};
pub use girth::{girth, GirthResult};
pub use spectral::{is_bipartite, mixing_check, spectral_rho, EigMethod, SpectralError, SpectralReport};
pub use subgroup::{
    build_subgroup, escape_profile, escape_profile_folded, SubgroupKind, SubgroupWitness,
};

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::quotient::{crt_combine, ResidueElem, ResidueRing, RingError};
use crate::sl2::{Mat2, MatError};

#[derive(Debug, Error)]
pub enum CayleyError {
    #[error("enumeration budget exceeded: group order {order} > budget {budget}")]
    BudgetExceeded { order: u128, budget: u128 },
    #[error("modulus must be square-free for quotient enumeration")]
    NotSquareFree,
    #[error("subgroup parameters invalid: {0}")]
    BadSubgroupParams(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

/// |SL2(q)| = q(q^2 - 1); the quotient order is the product over the
/// irreducible factor degrees.
pub fn sl2_order_formula(p: u64, factor_degrees: &[usize]) -> Option<u128> {
    let mut total: u128 = 1;
    for &n in factor_degrees {
        let q = (p as u128).checked_pow(n as u32)?;
        let fac = q.checked_mul(q.checked_mul(q)?.checked_sub(1)?)?;
        total = total.checked_mul(fac)?;
    }
    Some(total)
}

/// A fully enumerated congruence quotient with index lookup.
#[derive(Debug)]
pub struct QuotientGroup {
    ring: Arc<ResidueRing>,
    elems: Vec<Mat2<ResidueElem>>,
    index: HashMap<Mat2<ResidueElem>, u32>,
    identity: u32,
    order: u128,
}

pub const DEFAULT_ENUM_BUDGET: u128 = 10_000_000;

impl QuotientGroup {
    pub fn enumerate(ring: &Arc<ResidueRing>) -> Result<Self, CayleyError> {
        Self::enumerate_with_budget(ring, DEFAULT_ENUM_BUDGET)
    }

    pub fn enumerate_with_budget(
        ring: &Arc<ResidueRing>,
        budget: u128,
    ) -> Result<Self, CayleyError> {
        if !ring.is_squarefree() {
            return Err(CayleyError::NotSquareFree);
        }
        let degrees = ring.factorization().factor_degrees();
        let order = sl2_order_formula(ring.p(), &degrees).ok_or(CayleyError::BudgetExceeded {
            order: u128::MAX,
            budget,
        })?;
        if order > budget {
            return Err(CayleyError::BudgetExceeded { order, budget });
        }

        let elems = if ring.is_field() {
            enumerate_field(ring)
        } else {
            enumerate_product(ring)?
        };
        debug_assert_eq!(elems.len() as u128, order);

        let mut index = HashMap::with_capacity(elems.len());
        for (i, g) in elems.iter().enumerate() {
            index.insert(g.clone(), i as u32);
        }
        let one = ring.one();
        let zero = ring.zero();
        let id = Mat2::new(one.clone(), zero.clone(), zero, one)?;
        let identity = *index.get(&id).expect("identity enumerated");
        Ok(QuotientGroup {
            ring: Arc::clone(ring),
            elems,
            index,
            identity,
            order,
        })
    }

    pub fn ring(&self) -> &Arc<ResidueRing> {
        &self.ring
    }

    pub fn order(&self) -> u128 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[Mat2<ResidueElem>] {
        &self.elems
    }

    pub fn elem(&self, i: u32) -> &Mat2<ResidueElem> {
        &self.elems[i as usize]
    }

    pub fn identity_index(&self) -> u32 {
        self.identity
    }

    pub fn index_of(&self, g: &Mat2<ResidueElem>) -> Option<u32> {
        self.index.get(g).copied()
    }

    /// Permutation i -> index(s * elems[i]).
    pub fn left_mul_perm(&self, s: &Mat2<ResidueElem>) -> Vec<u32> {
        self.elems
            .iter()
            .map(|g| self.index[&s.mul(g)])
            .collect()
    }

    /// Permutation i -> index(elems[i] * s).
    pub fn right_mul_perm(&self, s: &Mat2<ResidueElem>) -> Vec<u32> {
        self.elems
            .iter()
            .map(|g| self.index[&g.mul(s)])
            .collect()
    }

    /// BFS closure of a generating set; returns reached indices in
    /// discovery order.
    pub fn closure(&self, gens: &[Mat2<ResidueElem>]) -> Vec<u32> {
        let mut seen = vec![false; self.elems.len()];
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        seen[self.identity as usize] = true;
        out.push(self.identity);
        queue.push_back(self.identity);
        let perms: Vec<Vec<u32>> = gens.iter().map(|s| self.left_mul_perm(s)).collect();
        while let Some(i) = queue.pop_front() {
            for perm in &perms {
                let j = perm[i as usize];
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    out.push(j);
                    queue.push_back(j);
                }
            }
        }
        out
    }

    pub fn generates(&self, gens: &[Mat2<ResidueElem>]) -> bool {
        self.closure(gens).len() == self.elems.len()
    }
}

fn enumerate_field(ring: &Arc<ResidueRing>) -> Vec<Mat2<ResidueElem>> {
    let q = ring.cardinality().expect("field fits enumeration budget");
    let mut out = Vec::new();
    // a != 0: d = (1 + bc) / a
    for ka in 1..q {
        let a = ring.element_from_index(ka);
        let ainv = a.inverse().expect("nonzero in a field");
        for kb in 0..q {
            let b = ring.element_from_index(kb);
            for kc in 0..q {
                let c = ring.element_from_index(kc);
                let d = ring.one().add(&b.mul(&c)).mul(&ainv);
                out.push(Mat2::new(a.clone(), b.clone(), c, d).expect("same ring"));
            }
        }
    }
    // a = 0: bc = -1, d free
    for kb in 1..q {
        let b = ring.element_from_index(kb);
        let c = b.inverse().expect("nonzero in a field").neg();
        for kd in 0..q {
            let d = ring.element_from_index(kd);
            out.push(Mat2::new(ring.zero(), b.clone(), c.clone(), d).expect("same ring"));
        }
    }
    out
}

/// Square-free multi-factor case: the CRT product of the enumerated
/// factor groups.
fn enumerate_product(ring: &Arc<ResidueRing>) -> Result<Vec<Mat2<ResidueElem>>, CayleyError> {
    let factor_rings: Vec<Arc<ResidueRing>> = ring
        .factorization()
        .factors
        .iter()
        .map(|(f, _)| ResidueRing::from_irreducible(f.clone()))
        .collect();
    let factor_groups: Vec<Vec<Mat2<ResidueElem>>> =
        factor_rings.iter().map(enumerate_field).collect();

    let mut out = Vec::new();
    let mut idx = vec![0usize; factor_groups.len()];
    loop {
        let parts: Vec<&Mat2<ResidueElem>> = factor_groups
            .iter()
            .zip(&idx)
            .map(|(g, &i)| &g[i])
            .collect();
        let combine = |pick: fn(&Mat2<ResidueElem>) -> &ResidueElem| -> Result<ResidueElem, RingError> {
            let comps: Vec<ResidueElem> = parts.iter().map(|m| pick(m).clone()).collect();
            crt_combine(ring, &comps)
        };
        let a = combine(|m| &m.a)?;
        let b = combine(|m| &m.b)?;
        let c = combine(|m| &m.c)?;
        let d = combine(|m| &m.d)?;
        out.push(Mat2::new(a, b, c, d)?);

        // odometer
        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < factor_groups[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == factor_groups.len() {
                return Ok(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::PolyFp;

    fn ring(s: &str) -> Arc<ResidueRing> {
        ResidueRing::new(s.parse::<PolyFp>().unwrap()).unwrap()
    }

    #[test]
    fn sl2_3_order_and_bruteforce() {
        let r = ring("0,1@3");
        let g = QuotientGroup::enumerate(&r).unwrap();
        assert_eq!(g.order(), 24);
        // oracle: enumerate all 81 matrices over F3, keep det 1
        let mut count = 0;
        for ka in 0..3u128 {
            for kb in 0..3u128 {
                for kc in 0..3u128 {
                    for kd in 0..3u128 {
                        let m = Mat2::new(
                            r.element_from_index(ka),
                            r.element_from_index(kb),
                            r.element_from_index(kc),
                            r.element_from_index(kd),
                        )
                        .unwrap();
                        if m.is_sl2() {
                            count += 1;
                            assert!(g.index_of(&m).is_some());
                        }
                    }
                }
            }
        }
        assert_eq!(count, 24);
    }

    #[test]
    fn sl2_9_order() {
        let g = QuotientGroup::enumerate(&ring("1,0,1@3")).unwrap();
        assert_eq!(g.order(), 720);
        assert_eq!(g.len(), 720);
    }

    #[test]
    fn crt_product_order() {
        let f = "0,1@3".parse::<PolyFp>().unwrap().mul(&"1,0,1@3".parse().unwrap());
        let r = ResidueRing::new(f).unwrap();
        let g = QuotientGroup::enumerate(&r).unwrap();
        assert_eq!(g.order(), 24 * 720);
        assert_eq!(g.len(), 17280);
    }

    #[test]
    fn budget_exceeded_reports_order() {
        let err = QuotientGroup::enumerate_with_budget(&ring("1,0,1@3"), 100).unwrap_err();
        match err {
            CayleyError::BudgetExceeded { order, budget } => {
                assert_eq!(order, 720);
                assert_eq!(budget, 100);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn perms_are_group_translations() {
        let g = QuotientGroup::enumerate(&ring("0,1@5")).unwrap();
        let s = g.elem(7).clone();
        let perm = g.left_mul_perm(&s);
        for i in 0..g.len() {
            assert_eq!(g.elem(perm[i]).clone(), s.mul(g.elem(i as u32)));
        }
        // permutation property
        let mut seen = vec![false; g.len()];
        for &j in &perm {
            assert!(!seen[j as usize]);
            seen[j as usize] = true;
        }
    }
}
