//! Exact Cayley-graph girth via breadth-first exploration of reduced
//! words from the identity. No group enumeration is required: visited
//! elements are hashed by their canonical matrix form, so the routine
//! also runs in quotients far beyond the enumeration budget.

use std::collections::HashMap;
use std::sync::Arc;

use crate::quotient::{ResidueElem, ResidueRing};
use crate::sl2::{GenSet, Mat2, MatError};
use crate::polyring::PolyFp;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GirthResult {
    /// Exact girth.
    Finite(usize),
    /// Exploration hit the node budget with no collision: every
    /// nontrivial relation has at least this length.
    AtLeast(usize),
    /// The images of the generators collide with each other or the
    /// identity, so the reduced-word girth is not a meaningful number.
    Degenerate(String),
}

const NO_LETTER: u8 = u8::MAX;

/// Reduced-word convention: s and s^-1 are distinct letters; immediate
/// backtracking (a letter followed by its inverse letter) is forbidden,
/// but repeating a letter is allowed, so an involution is detected as a
/// relation of length 2.
pub fn girth(
    ring: &Arc<ResidueRing>,
    s: &GenSet<PolyFp>,
    node_budget: usize,
) -> Result<GirthResult, MatError> {
    let gens: Vec<Mat2<ResidueElem>> = s.reduce_mod(ring)?;
    girth_of_images(&gens, s, node_budget)
}

pub fn girth_of_images(
    gens: &[Mat2<ResidueElem>],
    upstairs: &GenSet<PolyFp>,
    node_budget: usize,
) -> Result<GirthResult, MatError> {
    // degenerate checks: distinct images, none equal to the identity
    for (i, g) in gens.iter().enumerate() {
        if g.is_identity() {
            return Ok(GirthResult::Degenerate(format!(
                "generator {i} reduces to the identity"
            )));
        }
        for (j, h) in gens.iter().enumerate().skip(i + 1) {
            if g == h {
                return Ok(GirthResult::Degenerate(format!(
                    "generators {i} and {j} have equal images"
                )));
            }
        }
    }
    let inv_letter: Vec<u8> = (0..gens.len())
        .map(|i| upstairs.inverse_letter(i) as u8)
        .collect();

    // visited: element -> (depth, first letter of the word that reached it)
    let mut visited: HashMap<Mat2<ResidueElem>, (u32, u8)> = HashMap::new();
    let identity = gens[0].identity_like();
    visited.insert(identity.clone(), (0, NO_LETTER));

    // frontier entries: (element, first letter, last letter)
    let mut frontier: Vec<(Mat2<ResidueElem>, u8, u8)> =
        vec![(identity, NO_LETTER, NO_LETTER)];
    let mut depth: u32 = 0;

    loop {
        depth += 1;
        let mut next = Vec::new();
        for (g, first, last) in &frontier {
            for (li, s_mat) in gens.iter().enumerate() {
                let li = li as u8;
                // forbid immediate backtracking; an involution letter is
                // its own matrix inverse but formally s != s^-1, so
                // repeating it stays a reduced word
                if *last != NO_LETTER
                    && inv_letter[*last as usize] == li
                    && *last != li
                {
                    continue; // not reduced
                }
                let h = g.mul(s_mat);
                let first_here = if *first == NO_LETTER { li } else { *first };
                if let Some(&(d, _)) = visited.get(&h) {
                    // first collision in BFS order closes the shortest
                    // relation: the two words have distinct first letters
                    // (a shared first letter would have collided earlier).
                    return Ok(GirthResult::Finite(depth as usize + d as usize));
                }
                visited.insert(h.clone(), (depth, first_here));
                next.push((h, first_here, li));
                if visited.len() > node_budget {
                    // all words of length <= depth-1 explored collision-free
                    return Ok(GirthResult::AtLeast(2 * (depth as usize - 1) + 1));
                }
            }
        }
        if next.is_empty() {
            // cannot happen in a finite group with nonempty gens
            return Ok(GirthResult::Degenerate("exploration stalled".into()));
        }
        frontier = next;
    }
}
