//! Lexicographic simulating functions and the input-complexity machinery.
//!
//! Works over binary alphabets with uniform input marginals (the DSBS
//! family). The lexicographic pair accepts the `ceil(2^d Q(1))`
//! lexicographically smallest strings, with `-1 < +1` and the first
//! coordinate most significant, so the all-(-1) string is accepted first --
//! the same polarity the projection operator pushes mass toward.
//!
//! The time-domain correlation formula here is re-derived from first
//! principles (anchored by `f = g ≡ 1 ↦ 1`) and cross-checked against both
//! the Fourier route and direct expectation:
//!
//! `E[f g] = ((1+ρ)/4)^d (4 Σ_{f=1,g=1} γ^{d_H} + 2^d C_ρ (1 - 2Q_U(1) - 2Q_V(1)))`
//!
//! with `γ = (1-ρ)/(1+ρ)` and `C_ρ = Σ_x γ^{d_H(x, all-(-1))} = (2/(1+ρ))^d`.

use crate::distributions::TargetPmf;
use crate::error::{Error, Result};
use crate::fourier::RealTable;
use crate::index;

/// Dense Hamming-matrix cap: `2^d <= 4096`.
pub const HAMMING_MATRIX_CAP: usize = 1 << 12;

/// Pair counts at each Hamming distance among `{(x,y): f(x)=g(y)=1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceSpectrum {
    /// `n[k]` = number of accepted pairs at distance k; length `d+1`.
    pub n: Vec<u64>,
}

impl DistanceSpectrum {
    /// Total number of accepted pairs (`|f^{-1}(1)| * |g^{-1}(1)|`).
    pub fn total(&self) -> u64 {
        self.n.iter().sum()
    }
}

/// The lexicographic simulating pair for given output biases.
#[derive(Debug, Clone)]
pub struct LexPair {
    /// Block length.
    pub d: usize,
    /// Acceptance threshold of `f`: accepts indices `< x_c`.
    pub x_c: usize,
    /// Acceptance threshold of `g`.
    pub y_c: usize,
    /// `f` as a ±1 table.
    pub f_table: RealTable,
    /// `g` as a ±1 table.
    pub g_table: RealTable,
}

/// Builds the lexicographic pair: thresholds `ceil(2^d Q_U(1))` and
/// `ceil(2^d Q_V(1))` under strict lexicographic order.
pub fn lex_pair(d: usize, q_u_bias: f64, q_v_bias: f64) -> Result<LexPair> {
    if !(0.0..=1.0).contains(&q_u_bias) || !(0.0..=1.0).contains(&q_v_bias) {
        return Err(Error::InvalidDistribution(
            "biases must be in [0, 1]".into(),
        ));
    }
    let n = index::pow(2, d);
    let thr = |bias: f64| -> usize {
        let raw = (bias * n as f64 - 1e-9).ceil();
        (raw.max(0.0) as usize).min(n)
    };
    let x_c = thr(q_u_bias);
    let y_c = thr(q_v_bias);
    let table = |c: usize| RealTable {
        d,
        q: 2,
        values: (0..n).map(|x| if x < c { 1.0 } else { -1.0 }).collect(),
    };
    Ok(LexPair {
        d,
        x_c,
        y_c,
        f_table: table(x_c),
        g_table: table(y_c),
    })
}

fn accept_count(t: &RealTable) -> usize {
    t.values.iter().filter(|&&v| v > 0.0).count()
}

fn check_pm1(t: &RealTable) -> Result<()> {
    if t.q != 2 {
        return Err(Error::Dimension("binary tables required".into()));
    }
    if t.values.iter().any(|&v| v.abs() != 1.0) {
        return Err(Error::ConditionViolation("table is not ±1-valued".into()));
    }
    Ok(())
}

/// Closed-form `E[f(X^d) g(Y^d)]` under the DSBS with correlation `rho`.
///
/// Requires uniform binary marginals; the bias arguments are redundant with
/// the tables' acceptance fractions and are verified against them.
pub fn time_domain_correlation(
    f: &RealTable,
    g: &RealTable,
    rho: f64,
    q_u_bias: f64,
    q_v_bias: f64,
) -> Result<f64> {
    check_pm1(f)?;
    check_pm1(g)?;
    if f.d != g.d {
        return Err(Error::Dimension("table lengths differ".into()));
    }
    if rho <= -1.0 || rho > 1.0 {
        return Err(Error::UnsupportedHypothesis(
            "rho must lie in (-1, 1]".into(),
        ));
    }
    let d = f.d;
    let n = index::pow(2, d);
    let qu = accept_count(f) as f64 / n as f64;
    let qv = accept_count(g) as f64 / n as f64;
    if (qu - q_u_bias).abs() > 1e-9 || (qv - q_v_bias).abs() > 1e-9 {
        return Err(Error::UnsupportedHypothesis(format!(
            "bias arguments ({q_u_bias}, {q_v_bias}) do not match the \
             acceptance fractions ({qu}, {qv})"
        )));
    }
    let gamma = (1.0 - rho) / (1.0 + rho);
    let mut s = 0.0;
    for x in 0..n {
        if f.values[x] < 0.0 {
            continue;
        }
        for y in 0..n {
            if g.values[y] > 0.0 {
                s += gamma.powi(index::hamming(x, y) as i32);
            }
        }
    }
    Ok(assemble_time_domain(d, rho, s, qu, qv))
}

fn assemble_time_domain(d: usize, rho: f64, pair_sum: f64, qu: f64, qv: f64) -> f64 {
    let c_rho = (2.0 / (1.0 + rho)).powi(d as i32);
    let scale = ((1.0 + rho) / 4.0).powi(d as i32);
    scale * (4.0 * pair_sum + (1u64 << d) as f64 * c_rho * (1.0 - 2.0 * qu - 2.0 * qv))
}

/// `Σ_{x < a, y < b} γ^{d_H(x,y)}` by digit DP over the `d` bit positions.
///
/// `O(d)` instead of the `O(4^d)` pair scan; used for lexicographic pairs at
/// depths beyond enumeration reach.
pub fn lex_pair_weight_sum(d: usize, a: usize, b: usize, gamma: f64) -> f64 {
    if a == 0 || b == 0 {
        return 0.0;
    }
    let n = index::pow(2, d);
    let ta0 = a < n; // a == 2^d means "no constraint"
    let tb0 = b < n;
    // memo[i][ta][tb]
    let mut memo = vec![[[f64::NAN; 2]; 2]; d + 1];
    memo[d] = [[1.0, 0.0], [0.0, 0.0]]; // [ta][tb]: tight at the end -> excluded
    for i in (0..d).rev() {
        let abit = (a >> (d - 1 - i)) & 1;
        let bbit = (b >> (d - 1 - i)) & 1;
        for ta in 0..2 {
            for tb in 0..2 {
                let mut acc = 0.0;
                let max_bx = if ta == 1 { abit } else { 1 };
                let max_by = if tb == 1 { bbit } else { 1 };
                for bx in 0..=max_bx {
                    for by in 0..=max_by {
                        let w = if bx != by { gamma } else { 1.0 };
                        let nta = (ta == 1 && bx == abit) as usize;
                        let ntb = (tb == 1 && by == bbit) as usize;
                        acc += w * memo[i + 1][nta][ntb];
                    }
                }
                memo[i][ta][tb] = acc;
            }
        }
    }
    memo[0][ta0 as usize][tb0 as usize]
}

/// Exact output joint of the lexicographic pair at block length `d` via the
/// digit DP (no sampling, no table materialization).
pub fn lex_pair_exact_joint(d: usize, n_u: usize, n_v: usize, rho: f64) -> Result<TargetPmf> {
    let n = index::pow(2, d);
    if n_u > n || n_v > n {
        return Err(Error::Dimension("acceptance count exceeds 2^d".into()));
    }
    let gamma = (1.0 - rho) / (1.0 + rho);
    let s = lex_pair_weight_sum(d, n_u, n_v, gamma);
    // P(U=1, V=1) = ((1+rho)/4)^d * S
    let p11 = ((1.0 + rho) / 4.0).powi(d as i32) * s;
    let qu1 = n_u as f64 / n as f64;
    let qv1 = n_v as f64 / n as f64;
    let p10 = qu1 - p11;
    let p01 = qv1 - p11;
    let p00 = 1.0 - p11 - p10 - p01;
    TargetPmf::new(2, 2, vec![p00, p01, p10, p11])
}

/// Exhaustive pair count at each Hamming distance.
pub fn distance_spectrum(f: &RealTable, g: &RealTable) -> Result<DistanceSpectrum> {
    check_pm1(f)?;
    check_pm1(g)?;
    if f.d != g.d {
        return Err(Error::Dimension("table lengths differ".into()));
    }
    let n = index::pow(2, f.d);
    let mut counts = vec![0u64; f.d + 1];
    for x in 0..n {
        if f.values[x] < 0.0 {
            continue;
        }
        for y in 0..n {
            if g.values[y] > 0.0 {
                counts[index::hamming(x, y) as usize] += 1;
            }
        }
    }
    Ok(DistanceSpectrum { n: counts })
}

/// `s1 ⪯ s2`: every prefix sum of `s1` is at most the matching one of `s2`.
pub fn spectrum_dominates(s1: &DistanceSpectrum, s2: &DistanceSpectrum) -> Result<bool> {
    if s1.n.len() != s2.n.len() {
        return Err(Error::Dimension("spectra lengths differ".into()));
    }
    let mut acc1 = 0u64;
    let mut acc2 = 0u64;
    for (a, b) in s1.n.iter().zip(&s2.n) {
        acc1 += a;
        acc2 += b;
        if acc1 > acc2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Projection operator `Ξ_k`: pushes accepted mass toward `x_k = -1` within
/// every bit-flip pair (`∨` on the `-1` side, `∧` on the `+1` side).
pub fn project(f: &RealTable, k: usize) -> Result<RealTable> {
    check_pm1(f)?;
    if !(1..=f.d).contains(&k) {
        return Err(Error::Dimension(format!("coordinate {k} out of range")));
    }
    let n = index::pow(2, f.d);
    let bit = 1usize << (f.d - k);
    let mut out = vec![0.0; n];
    for x in 0..n {
        let flipped = x ^ bit;
        out[x] = if x & bit == 0 {
            f.values[x].max(f.values[flipped])
        } else {
            f.values[x].min(f.values[flipped])
        };
    }
    RealTable::new(f.d, 2, out)
}

/// Shuffling operator `Π_π`: `out(x) = f(π(x))` with
/// `(π(x))_i = x_{π(i)}` for a 1-based permutation of `[d]`.
pub fn shuffle(f: &RealTable, pi: &[usize]) -> Result<RealTable> {
    check_pm1(f)?;
    let d = f.d;
    if pi.len() != d {
        return Err(Error::Dimension("permutation length mismatch".into()));
    }
    let mut seen = vec![false; d + 1];
    for &p in pi {
        if !(1..=d).contains(&p) || seen[p] {
            return Err(Error::Dimension("not a permutation of [d]".into()));
        }
        seen[p] = true;
    }
    let n = index::pow(2, d);
    let mut out = vec![0.0; n];
    for x in 0..n {
        let mut permuted = 0usize;
        for (i, &p) in pi.iter().enumerate() {
            let coord_val = (x >> (d - p)) & 1;
            permuted |= coord_val << (d - 1 - i);
        }
        out[x] = f.values[permuted];
    }
    RealTable::new(d, 2, out)
}

/// Hamming-distance matrix `D_d` via the Kronecker recursion
/// `D_d = 𝕀_1 ⊗ D_{d-1} + D_1 ⊗ 𝕀_{d-1}` (𝕀 is the all-ones matrix).
pub fn hamming_matrix(d: usize) -> Result<Vec<Vec<u8>>> {
    if d == 0 {
        return Err(Error::Dimension("d must be at least 1".into()));
    }
    let n = index::pow(2, d);
    if n > HAMMING_MATRIX_CAP {
        return Err(Error::SizeCap(format!(
            "2^d = {n} exceeds the dense cap {HAMMING_MATRIX_CAP}"
        )));
    }
    let mut m = vec![vec![0u8, 1], vec![1u8, 0]];
    for _ in 1..d {
        let half = m.len();
        let full = half * 2;
        let mut next = vec![vec![0u8; full]; full];
        for i in 0..full {
            for j in 0..full {
                // 𝕀_1 ⊗ D_{d-1}: the previous matrix in every block;
                // D_1 ⊗ 𝕀_{d-1}: +1 on the off-diagonal blocks.
                let base = m[i % half][j % half];
                let extra = u8::from((i < half) != (j < half));
                next[i][j] = base + extra;
            }
        }
        m = next;
    }
    Ok(m)
}

/// One row of the TV-decay table.
#[derive(Debug, Clone, Copy)]
pub struct TvDecayRow {
    /// Block length.
    pub d: usize,
    /// Unhalved TV distance of the lex-pair joint at `d` to the proxy joint
    /// at the largest computed `d`.
    pub tv_to_proxy: f64,
    /// `tv(d) / tv(d-1)` when both are meaningful.
    pub ratio: Option<f64>,
}

/// Exact TV-decay table of the lexicographic pair toward the largest-`d`
/// joint (a proxy for the limit, not ground truth).
pub fn tv_decay_experiment(
    q_u_bias: f64,
    q_v_bias: f64,
    rho: f64,
    d_max: usize,
) -> Result<Vec<TvDecayRow>> {
    if d_max > 40 {
        return Err(Error::SizeCap("d_max too large for exact arithmetic".into()));
    }
    let joint_at = |d: usize| -> Result<TargetPmf> {
        let n = index::pow(2, d);
        let thr = |bias: f64| -> usize {
            let raw = (bias * n as f64 - 1e-9).ceil();
            (raw.max(0.0) as usize).min(n)
        };
        lex_pair_exact_joint(d, thr(q_u_bias), thr(q_v_bias), rho)
    };
    let proxy = joint_at(d_max)?;
    let mut rows: Vec<TvDecayRow> = Vec::new();
    for d in 1..=d_max {
        let j = joint_at(d)?;
        let tv = crate::distributions::tv_distance(&j, &proxy)?;
        let ratio = rows.last().and_then(|prev: &TvDecayRow| {
            if prev.tv_to_proxy > 1e-15 && tv > 1e-15 {
                Some(tv / prev.tv_to_proxy)
            } else {
                None
            }
        });
        rows.push(TvDecayRow {
            d,
            tv_to_proxy: tv,
            ratio,
        });
    }
    Ok(rows)
}
