//! Fixed-order pairwise reductions.
//!
//! Every sum over lattice sites or chains goes through these helpers so the
//! association order depends only on the number of terms, never on how work
//! was split across threads.

use num_complex::Complex64;

const LEAF: usize = 16;

/// Pairwise sum of `f(i)` for `i` in `0..n`.
pub fn tree_sum<F>(n: usize, f: &F) -> Complex64
where
    F: Fn(usize) -> Complex64,
{
    tree_range(0, n, f)
}

fn tree_range<F>(lo: usize, hi: usize, f: &F) -> Complex64
where
    F: Fn(usize) -> Complex64,
{
    let len = hi - lo;
    if len <= LEAF {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in lo..hi {
            acc += f(i);
        }
        return acc;
    }
    let mid = lo + len / 2;
    tree_range(lo, mid, f) + tree_range(mid, hi, f)
}

/// Pairwise sum of a slice.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    tree_sum(values.len(), &|i| values[i])
}

/// Real-valued pairwise sum.
pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (l, r) = values.split_at(values.len() / 2);
    pairwise_sum_real(l) + pairwise_sum_real(r)
}
