//! Two-sided spectral radius of the Cayley adjacency operator,
//! bipartiteness, and the mixing-bound verifier.
//!
//! The adjacency operator averages over generator translates:
//! (A f)(g) = (1/|S|) sum_s f(s g). With S symmetric this is a
//! symmetric stochastic matrix; rho is max(|lambda_2|, |lambda_min|)
//! on the mean-zero subspace.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::QuotientGroup;
use crate::par;
use crate::quotient::ResidueElem;
use crate::sl2::Mat2;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("generator multiset is not symmetric (inverse multiplicities differ)")]
    NotSymmetric,
    #[error("group order {0} exceeds the dense-method budget {1}")]
    DenseBudget(usize, usize),
    #[error("iteration did not converge: residual {residual:e} after {iters} steps")]
    NoConvergence { residual: f64, iters: usize },
    #[error("generator image is not in the group")]
    NotInGroup,
    #[error("generator set does not generate the group")]
    NotGenerating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigMethod {
    Dense,
    Iterative,
    /// Dense up to the size cutoff, iterative above it.
    Auto,
}

pub const DENSE_CUTOFF: usize = 4000;
const ITER_TOL: f64 = 1e-6;
const MAX_LANCZOS: usize = 600;

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub rho: f64,
    pub lambda2: f64,
    pub lambda_min: f64,
    pub method: EigMethod,
    /// max over the reported extreme eigenpairs of ||A v - lambda v||_2.
    pub residual: f64,
    /// Number of vertices the operator acted on.
    pub n: usize,
    /// True when S does not generate and the report covers only <S>.
    pub restricted_to_span: bool,
}

/// Walk operator on the span of S: permutation images plus vertex count.
struct CayleyOp {
    perms: Vec<Vec<u32>>,
    n: usize,
}

impl CayleyOp {
    fn build(
        group: &QuotientGroup,
        s: &[Mat2<ResidueElem>],
    ) -> Result<(Self, bool), SpectralError> {
        check_symmetric(s)?;
        let imgs: Vec<u32> = s
            .iter()
            .map(|m| group.index_of(m).ok_or(SpectralError::NotInGroup))
            .collect::<Result<_, _>>()?;
        let span = group.closure(s);
        let restricted = span.len() != group.len();
        let full_perms: Vec<Vec<u32>> = imgs
            .iter()
            .map(|&i| group.left_mul_perm(group.elem(i)))
            .collect();
        if !restricted {
            return Ok((
                CayleyOp {
                    perms: full_perms,
                    n: group.len(),
                },
                false,
            ));
        }
        // relabel the span 0..m and restrict each permutation to it
        let mut relabel = vec![u32::MAX; group.len()];
        for (new, &old) in span.iter().enumerate() {
            relabel[old as usize] = new as u32;
        }
        let perms = full_perms
            .iter()
            .map(|perm| {
                span.iter()
                    .map(|&old| relabel[perm[old as usize] as usize])
                    .collect()
            })
            .collect();
        Ok((
            CayleyOp {
                perms,
                n: span.len(),
            },
            true,
        ))
    }

    fn matvec(&self, x: &[f64], out: &mut [f64]) {
        let k = self.perms.len() as f64;
        par::run_fill_f64(out, |i| {
            let mut acc = 0.0;
            for perm in &self.perms {
                acc += x[perm[i] as usize];
            }
            acc / k
        });
    }

    fn dense_matrix(&self) -> DMatrix<f64> {
        let w = 1.0 / self.perms.len() as f64;
        let mut a = DMatrix::zeros(self.n, self.n);
        for perm in &self.perms {
            for (i, &j) in perm.iter().enumerate() {
                // contribution of f[j] to (Af)[i]
                a[(i, j as usize)] += w;
            }
        }
        a
    }

    fn residual_norm(&self, v: &[f64], lambda: f64) -> f64 {
        let mut av = vec![0.0; self.n];
        self.matvec(v, &mut av);
        av.iter()
            .zip(v)
            .map(|(a, x)| (a - lambda * x) * (a - lambda * x))
            .sum::<f64>()
            .sqrt()
    }
}

fn check_symmetric(s: &[Mat2<ResidueElem>]) -> Result<(), SpectralError> {
    for g in s {
        let gi = g.inv().map_err(|_| SpectralError::NotSymmetric)?;
        let fwd = s.iter().filter(|h| **h == *g).count();
        let bwd = s.iter().filter(|h| **h == gi).count();
        if fwd != bwd {
            return Err(SpectralError::NotSymmetric);
        }
    }
    Ok(())
}

pub fn spectral_rho(
    group: &QuotientGroup,
    s: &[Mat2<ResidueElem>],
    method: EigMethod,
) -> Result<SpectralReport, SpectralError> {
    let (op, restricted) = CayleyOp::build(group, s)?;
    let method = match method {
        EigMethod::Auto => {
            if op.n <= DENSE_CUTOFF {
                EigMethod::Dense
            } else {
                EigMethod::Iterative
            }
        }
        m => m,
    };
    let mut report = match method {
        EigMethod::Dense => dense_rho(&op)?,
        EigMethod::Iterative => lanczos_rho(&op)?,
        EigMethod::Auto => unreachable!(),
    };
    report.restricted_to_span = restricted;
    Ok(report)
}

fn dense_rho(op: &CayleyOp) -> Result<SpectralReport, SpectralError> {
    if op.n > DENSE_CUTOFF {
        return Err(SpectralError::DenseBudget(op.n, DENSE_CUTOFF));
    }
    let a = op.dense_matrix();
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..op.n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap()
    });
    let lambda2 = if op.n >= 2 {
        eig.eigenvalues[order[1]]
    } else {
        f64::NEG_INFINITY
    };
    let lambda_min = eig.eigenvalues[order[op.n - 1]];
    let rho = lambda2.abs().max(lambda_min.abs());
    let mut residual: f64 = 0.0;
    for col in [order.get(1), order.last()].into_iter().flatten() {
        let v: Vec<f64> = eig.eigenvectors.column(*col).iter().copied().collect();
        residual = residual.max(op.residual_norm(&v, eig.eigenvalues[*col]));
    }
    Ok(SpectralReport {
        rho,
        lambda2,
        lambda_min,
        method: EigMethod::Dense,
        residual,
        n: op.n,
        restricted_to_span: false,
    })
}

/// Lanczos with full reorthogonalization on the mean-zero subspace.
/// The constant eigenvector (eigenvalue 1) is deflated by projecting
/// every vector onto mean zero, so the extreme Ritz values are
/// lambda_2 and lambda_min of the full operator.
fn lanczos_rho(op: &CayleyOp) -> Result<SpectralReport, SpectralError> {
    let n = op.n;
    if n < 2 {
        return Err(SpectralError::NoConvergence {
            residual: f64::INFINITY,
            iters: 0,
        });
    }
    let project_mean_zero = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        for x in v.iter_mut() {
            *x -= mean;
        }
    };
    // deterministic seeded start vector
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_CA11);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project_mean_zero(&mut v);
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = norm(&v);
    for x in v.iter_mut() {
        *x /= nv;
    }

    let max_iters = MAX_LANCZOS.min(n - 1);
    let mut basis: Vec<Vec<f64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];

    for m in 1..=max_iters {
        let vm = basis.last().unwrap().clone();
        op.matvec(&vm, &mut w);
        project_mean_zero(&mut w);
        let alpha: f64 = w.iter().zip(&vm).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        // full reorthogonalization against the whole basis, twice
        for _ in 0..2 {
            for b in &basis {
                let proj: f64 = w.iter().zip(b).map(|(a, x)| a * x).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= proj * bi;
                }
            }
        }
        let beta = norm(&w);

        // Ritz values of the current tridiagonal
        if m >= 2 || beta < ITER_TOL {
            let mut t = DMatrix::zeros(m, m);
            for i in 0..m {
                t[(i, i)] = alphas[i];
                if i + 1 < m {
                    t[(i, i + 1)] = betas[i];
                    t[(i + 1, i)] = betas[i];
                }
            }
            let eig = t.symmetric_eigen();
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
            let top = order[0];
            let bot = order[m - 1];
            // residual estimate |beta_m * y_last| for each extreme pair
            let res = |col: usize| beta * eig.eigenvectors[(m - 1, col)].abs();
            let residual = res(top).max(res(bot));
            if residual <= ITER_TOL || beta < 1e-14 || m == max_iters {
                if residual > ITER_TOL && beta >= 1e-14 {
                    return Err(SpectralError::NoConvergence { residual, iters: m });
                }
                let lambda2 = eig.eigenvalues[top];
                let lambda_min = eig.eigenvalues[bot];
                // assemble the two Ritz vectors for an explicit certificate
                let ritz = |col: usize| -> Vec<f64> {
                    let mut out = vec![0.0; n];
                    for (k, b) in basis.iter().enumerate() {
                        let c = eig.eigenvectors[(k, col)];
                        for (o, bi) in out.iter_mut().zip(b) {
                            *o += c * bi;
                        }
                    }
                    out
                };
                let cert = op
                    .residual_norm(&ritz(top), lambda2)
                    .max(op.residual_norm(&ritz(bot), lambda_min));
                return Ok(SpectralReport {
                    rho: lambda2.abs().max(lambda_min.abs()),
                    lambda2,
                    lambda_min,
                    method: EigMethod::Iterative,
                    residual: cert,
                    n,
                    restricted_to_span: false,
                });
            }
        }
        betas.push(beta);
        for x in w.iter_mut() {
            *x /= beta;
        }
        basis.push(w.clone());
    }
    Err(SpectralError::NoConvergence {
        residual: f64::INFINITY,
        iters: max_iters,
    })
}

/// BFS 2-coloring of the Cayley graph (on the span of S).
pub fn is_bipartite(
    group: &QuotientGroup,
    s: &[Mat2<ResidueElem>],
) -> Result<bool, SpectralError> {
    let (op, _) = CayleyOp::build(group, s)?;
    let mut color = vec![u8::MAX; op.n];
    color[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for perm in &op.perms {
            let j = perm[i] as usize;
            if color[j] == u8::MAX {
                color[j] = 1 - color[i];
                queue.push_back(j);
            } else if color[j] == color[i] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Max over l <= l_max and all pairs (g, h) of
/// |<A^l chi_g, chi_h> - 1/n| - rho^l. The mixing bound asserts this
/// is <= 0; floating error allows a small positive slack.
pub fn mixing_check(
    group: &QuotientGroup,
    s: &[Mat2<ResidueElem>],
    l_max: usize,
) -> Result<f64, SpectralError> {
    let (op, restricted) = CayleyOp::build(group, s)?;
    if restricted {
        // deviation from 1/|G| is not the right target on a proper span
        return Err(SpectralError::NotGenerating);
    }
    if op.n > DENSE_CUTOFF {
        return Err(SpectralError::DenseBudget(op.n, DENSE_CUTOFF));
    }
    let rho = dense_rho(&op)?.rho;
    let n = op.n;
    let a = op.dense_matrix();
    let uniform = 1.0 / n as f64;
    // powers: <A^l chi_g, chi_h> = (A^l)[h, g]
    let mut pw = DMatrix::<f64>::identity(n, n);
    let mut worst = f64::NEG_INFINITY;
    for l in 0..=l_max {
        let bound = rho.powi(l as i32);
        for j in 0..n {
            for i in 0..n {
                let dev = (pw[(i, j)] - uniform).abs();
                worst = worst.max(dev - bound);
            }
        }
        if l < l_max {
            pw = &a * pw;
        }
    }
    Ok(worst)
}
