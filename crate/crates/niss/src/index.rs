//! Multi-index bookkeeping for functions on `X^d`.
//!
//! Points `x^d` and coefficient indices `s^d` over an alphabet of size `q`
//! share one canonical flat index: lexicographic with the first coordinate
//! most significant, i.e. `idx = sum_i digit_i * q^(d-i)`. For `q = 2` the
//! subset representation `S ⊆ [d]` maps to the multi-index with `s_i = 1`
//! iff `i ∈ S`.

/// `q^d` as usize, panicking on overflow (callers cap sizes well below this).
pub fn pow(q: usize, d: usize) -> usize {
    q.checked_pow(d as u32).expect("q^d overflows usize")
}

/// Digits of `idx` in base `q`, most significant first, padded to length `d`.
pub fn digits(idx: usize, q: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0usize; d];
    let mut rest = idx;
    for i in (0..d).rev() {
        out[i] = rest % q;
        rest /= q;
    }
    out
}

/// Flat index of a digit vector (first digit most significant).
pub fn flat(digits: &[usize], q: usize) -> usize {
    digits.iter().fold(0, |acc, &s| acc * q + s)
}

/// Number of nonzero digits of `idx` in base `q` (Hamming weight for q=2).
pub fn weight(idx: usize, q: usize, d: usize) -> usize {
    let mut rest = idx;
    let mut w = 0;
    for _ in 0..d {
        if rest % q != 0 {
            w += 1;
        }
        rest /= q;
    }
    w
}

/// Digit of `idx` at coordinate `coord` (1-based, coordinate 1 most significant).
pub fn digit_at(idx: usize, q: usize, d: usize, coord: usize) -> usize {
    debug_assert!((1..=d).contains(&coord));
    (idx / pow(q, d - coord)) % q
}

/// Flat index with the digit at `coord` (1-based) replaced by `value`.
pub fn with_digit(idx: usize, q: usize, d: usize, coord: usize, value: usize) -> usize {
    let place = pow(q, d - coord);
    let old = (idx / place) % q;
    idx - old * place + value * place
}

/// Subset of `[d]` (1-based coordinates) to its q=2 multi-index.
pub fn subset_to_index(subset: &[usize], d: usize) -> usize {
    let mut idx = 0usize;
    for &i in subset {
        debug_assert!((1..=d).contains(&i));
        idx |= 1 << (d - i);
    }
    idx
}

/// q=2 multi-index to the subset of `[d]` it encodes (ascending coordinates).
pub fn index_to_subset(idx: usize, d: usize) -> Vec<usize> {
    (1..=d).filter(|&i| idx & (1 << (d - i)) != 0).collect()
}

/// Hamming distance between two q=2 point indices.
pub fn hamming(a: usize, b: usize) -> u32 {
    (a ^ b).count_ones()
}
