//! Data-parallel inner loops with a sequential fallback. The `parallel`
//! feature routes the `run_*` entry points through rayon; the `seq_*`
//! variants are always available so benchmarks can compare both.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Sum f(i) for i in 0..n.
pub fn seq_sum_u64<F: Fn(usize) -> u64>(n: usize, f: F) -> u64 {
    (0..n).map(f).sum()
}

#[cfg(feature = "parallel")]
pub fn run_sum_u64<F: Fn(usize) -> u64 + Sync + Send>(n: usize, f: F) -> u64 {
    (0..n).into_par_iter().map(f).sum()
}

#[cfg(not(feature = "parallel"))]
pub fn run_sum_u64<F: Fn(usize) -> u64 + Sync + Send>(n: usize, f: F) -> u64 {
    seq_sum_u64(n, f)
}

/// Fill out[i] = f(i).
pub fn seq_fill_f64<F: Fn(usize) -> f64>(out: &mut [f64], f: F) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = f(i);
    }
}

#[cfg(feature = "parallel")]
pub fn run_fill_f64<F: Fn(usize) -> f64 + Sync + Send>(out: &mut [f64], f: F) {
    out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
}

#[cfg(not(feature = "parallel"))]
pub fn run_fill_f64<F: Fn(usize) -> f64 + Sync + Send>(out: &mut [f64], f: F) {
    seq_fill_f64(out, f)
}

/// Map i to f(i), collecting in index order (deterministic merge).
pub fn seq_map_collect<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn run_map_collect<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_map_collect<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    seq_map_collect(n, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_and_seq_agree() {
        let f = |i: usize| (i as u64).wrapping_mul(2654435761) % 97;
        assert_eq!(run_sum_u64(10_000, f), seq_sum_u64(10_000, f));
        let g = |i: usize| (i as f64).sqrt();
        let mut a = vec![0.0; 1000];
        let mut b = vec![0.0; 1000];
        run_fill_f64(&mut a, g);
        seq_fill_f64(&mut b, g);
        assert_eq!(a, b);
    }
}
