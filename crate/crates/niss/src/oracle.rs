//! Brute-force ground-truth engines.
//!
//! Everything here evaluates expectations by exhaustive enumeration and
//! searches by exhaustive iteration with fixed tie-breaking, so results are
//! deterministic and independent of the Fourier/solver code paths they are
//! used to certify. Deliberately desk-scale only.

use crate::distributions::{psi_inverse, ExpectationVector, JointPmf, TargetPmf};
use crate::error::{Error, Result};
use crate::fourier::{RealTable, TruthTable};
use crate::index;

/// Enumeration cap for [`exact_expectation`]: number of `(x^d, y^d)` terms.
pub const EXPECTATION_TERM_CAP: usize = 1 << 24;

/// Combination-count cap for [`brute_force_biased_maxcorr`].
pub const PAIR_ENUMERATION_CAP: u128 = 100_000_000;

/// `E[f(X^d) g(Y^d)]` by direct summation over all `(x^d, y^d)` pairs.
pub fn exact_expectation(f: &RealTable, g: &RealTable, joint: &JointPmf, d: usize) -> Result<f64> {
    if f.d != d || g.d != d || f.q != joint.qx() || g.q != joint.qy() {
        return Err(Error::Dimension("table shapes do not match joint/d".into()));
    }
    let nx = index::pow(joint.qx(), d);
    let ny = index::pow(joint.qy(), d);
    if nx.saturating_mul(ny) > EXPECTATION_TERM_CAP {
        return Err(Error::SizeCap(format!(
            "exact_expectation needs {} terms (cap {})",
            nx * ny,
            EXPECTATION_TERM_CAP
        )));
    }
    let qy = joint.qy();
    let mut total = 0.0;
    for x in 0..nx {
        let xd = index::digits(x, joint.qx(), d);
        for y in 0..ny {
            let mut w = 1.0;
            let mut rest = y;
            for i in (0..d).rev() {
                w *= joint.prob(xd[i], rest % qy);
                rest /= qy;
            }
            total += w * f.values[x] * g.values[y];
        }
    }
    Ok(total)
}

/// Exact joint output pmf of a finite-output pair under `joint^d`.
pub fn exact_output_joint(f: &TruthTable, g: &TruthTable, joint: &JointPmf) -> Result<TargetPmf> {
    if f.d != g.d || f.q != joint.qx() || g.q != joint.qy() {
        return Err(Error::Dimension("table shapes do not match joint".into()));
    }
    let d = f.d;
    let nx = index::pow(joint.qx(), d);
    let ny = index::pow(joint.qy(), d);
    if nx.saturating_mul(ny) > EXPECTATION_TERM_CAP {
        return Err(Error::SizeCap("exact_output_joint term cap".into()));
    }
    let qy = joint.qy();
    let mut cells = vec![0.0; f.out_size * g.out_size];
    for x in 0..nx {
        let xd = index::digits(x, joint.qx(), d);
        for y in 0..ny {
            let mut w = 1.0;
            let mut rest = y;
            for i in (0..d).rev() {
                w *= joint.prob(xd[i], rest % qy);
                rest /= qy;
            }
            cells[f.values[x] * g.out_size + g.values[y]] += w;
        }
    }
    TargetPmf::new(f.out_size, g.out_size, cells)
}

/// Iterator over k-subsets of `0..n` in lexicographic order of index tuples.
struct Combinations {
    n: usize,
    k: usize,
    cur: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            cur: (0..k).collect(),
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let k = self.k;
        if k == 0 {
            self.done = true;
            return Some(out);
        }
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.cur[i] != i + self.n - k {
                self.cur[i] += 1;
                for j in i + 1..k {
                    self.cur[j] = self.cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Result of the acceptance-count-constrained exhaustive search.
#[derive(Debug, Clone)]
pub struct BiasedMaxcorr {
    /// Best `E[f g]` over ±1 pairs with the given acceptance counts.
    pub value: f64,
    /// Accepting set of the maximizing `f` (point indices, ascending).
    pub accept_f: Vec<usize>,
    /// Accepting set of the maximizing `g`.
    pub accept_g: Vec<usize>,
}

impl BiasedMaxcorr {
    /// Maximizing `f` as a ±1 table.
    pub fn f_table(&self, d: usize, q: usize) -> RealTable {
        set_to_table(&self.accept_f, d, q)
    }

    /// Maximizing `g` as a ±1 table.
    pub fn g_table(&self, d: usize, q: usize) -> RealTable {
        set_to_table(&self.accept_g, d, q)
    }
}

fn set_to_table(accept: &[usize], d: usize, q: usize) -> RealTable {
    let mut values = vec![-1.0; index::pow(q, d)];
    for &x in accept {
        values[x] = 1.0;
    }
    RealTable { d, q, values }
}

/// Exhaustive maximum of `E[f(X^d) g(Y^d)]` over ±1 tables with
/// `|f^{-1}(1)| = n_u` and `|g^{-1}(1)| = n_v`.
///
/// For each accepting set `A` of `f`, the best `B` is the set of `n_v`
/// largest entries of `y ↦ Σ_{a∈A} W(a, y)` (the inner problem is linear in
/// the accepting set, so the greedy pick is exact). Ties break toward the
/// lexicographically smallest accepting set, so output is deterministic.
pub fn brute_force_biased_maxcorr(
    joint: &JointPmf,
    d: usize,
    n_u: usize,
    n_v: usize,
) -> Result<BiasedMaxcorr> {
    if joint.qx() != joint.qy() {
        return Err(Error::Dimension("search requires matching alphabets".into()));
    }
    let q = joint.qx();
    let n = index::pow(q, d);
    if n_u > n || n_v > n {
        return Err(Error::Dimension("acceptance count exceeds table size".into()));
    }
    if binomial(n, n_u) * binomial(n, n_v) > PAIR_ENUMERATION_CAP {
        return Err(Error::SizeCap(format!(
            "C({n},{n_u})*C({n},{n_v}) exceeds {PAIR_ENUMERATION_CAP}"
        )));
    }
    // dense product weight matrix W(x, y)
    let mut w = vec![0.0; n * n];
    for x in 0..n {
        let xd = index::digits(x, q, d);
        for y in 0..n {
            let mut p = 1.0;
            let mut rest = y;
            for i in (0..d).rev() {
                p *= joint.prob(xd[i], rest % q);
                rest /= q;
            }
            w[x * n + y] = p;
        }
    }
    let px: Vec<f64> = (0..n).map(|x| (0..n).map(|y| w[x * n + y]).sum()).collect();
    let py: Vec<f64> = (0..n).map(|y| (0..n).map(|x| w[x * n + y]).sum()).collect();

    let mut best_val = f64::NEG_INFINITY;
    let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
    for a in Combinations::new(n, n_u) {
        let mass_a: f64 = a.iter().map(|&x| px[x]).sum();
        let mut s = vec![0.0; n];
        for &x in &a {
            for y in 0..n {
                s[y] += w[x * n + y];
            }
        }
        // greedy selection of the n_v best columns; exact ties (including
        // float-summation noise below 1e-12) break toward the smaller index
        // so forced ties stay lexicographic
        let mut picked = vec![false; n];
        let mut b = Vec::with_capacity(n_v);
        for _ in 0..n_v {
            let mut cur: Option<usize> = None;
            for y in 0..n {
                if picked[y] {
                    continue;
                }
                match cur {
                    None => cur = Some(y),
                    Some(c) => {
                        if s[y] > s[c] + 1e-12 {
                            cur = Some(y);
                        }
                    }
                }
            }
            let y = cur.expect("n_v <= n");
            picked[y] = true;
            b.push(y);
        }
        b.sort_unstable();
        let mass_ab: f64 = b.iter().map(|&y| s[y]).sum();
        let mass_b: f64 = b.iter().map(|&y| py[y]).sum();
        let val = 4.0 * mass_ab - 2.0 * mass_a - 2.0 * mass_b + 1.0;
        if val > best_val + 1e-12 {
            best_val = val;
            best = Some((a, b));
        }
    }
    let (accept_f, accept_g) = best.expect("at least one pair exists");
    Ok(BiasedMaxcorr {
        value: best_val,
        accept_f,
        accept_g,
    })
}

/// One extreme point found by [`brute_force_extremes`].
#[derive(Debug, Clone)]
pub struct ExtremeRecord {
    /// Centered expectation vector of the pair.
    pub e: ExpectationVector,
    /// Directional magnitude `t = Σ β²`.
    pub t: f64,
    /// Direction `α = β / t` (empty when `t = 0`).
    pub alpha: Vec<f64>,
    /// The exact output distribution.
    pub joint_out: TargetPmf,
    /// The function pair realizing it.
    pub f: TruthTable,
    /// Second element of the pair.
    pub g: TruthTable,
}

/// Enumerates all finite-output pairs with the given per-symbol acceptance
/// counts and keeps, per quantized direction, the record with the largest
/// directional magnitude `t`.
///
/// `direction_grid` controls the quantization: each unit-normalized beta
/// coordinate is rounded to multiples of `1/direction_grid` to form the
/// bucket key. Records come back sorted by decreasing `t`.
pub fn brute_force_extremes(
    joint: &JointPmf,
    d: usize,
    counts_u: &[usize],
    counts_v: &[usize],
    direction_grid: usize,
) -> Result<Vec<ExtremeRecord>> {
    let q = joint.qx();
    let n = index::pow(q, d);
    if counts_u.iter().sum::<usize>() != n || counts_v.iter().sum::<usize>() != n {
        return Err(Error::Dimension("counts must sum to q^d".into()));
    }
    let out_u = counts_u.len();
    let out_v = counts_v.len();
    let tables_u = enumerate_tables(n, counts_u);
    let tables_v = enumerate_tables(n, counts_v);
    if tables_u.len().saturating_mul(tables_v.len()) > 5_000_000 {
        return Err(Error::SizeCap("too many finite-output pairs".into()));
    }
    use std::collections::HashMap;
    let mut buckets: HashMap<Vec<i64>, ExtremeRecord> = HashMap::new();
    for fu in &tables_u {
        let f = TruthTable::new(d, q, out_u, fu.clone())?;
        for gv in &tables_v {
            let g = TruthTable::new(d, q, out_v, gv.clone())?;
            let out = exact_output_joint(&f, &g, joint)?;
            let ev = crate::distributions::psi_map(&out);
            let mut beta = Vec::with_capacity((out_u - 1) * (out_v - 1));
            for u in 1..out_u {
                for v in 1..out_v {
                    beta.push(ev.e(u, v) - ev.mu[u] * ev.nu[v]);
                }
            }
            let t: f64 = beta.iter().map(|b| b * b).sum();
            let (alpha, key) = if t > 1e-12 {
                let alpha: Vec<f64> = beta.iter().map(|b| b / t).collect();
                let norm = t.sqrt();
                let key: Vec<i64> = beta
                    .iter()
                    .map(|b| (b / norm * direction_grid as f64).round() as i64)
                    .collect();
                (alpha, key)
            } else {
                (Vec::new(), vec![i64::MAX; (out_u - 1) * (out_v - 1)])
            };
            let rec = ExtremeRecord {
                e: ev,
                t,
                alpha,
                joint_out: out,
                f: f.clone(),
                g,
            };
            match buckets.get(&key) {
                Some(prev) if prev.t >= rec.t => {}
                _ => {
                    buckets.insert(key, rec);
                }
            }
        }
    }
    let mut out: Vec<ExtremeRecord> = buckets.into_values().collect();
    // deterministic order: by magnitude, ties by the table contents
    out.sort_by(|a, b| {
        b.t.partial_cmp(&a.t)
            .unwrap()
            .then_with(|| a.f.values.cmp(&b.f.values))
            .then_with(|| a.g.values.cmp(&b.g.values))
    });
    Ok(out)
}

/// All tables on `n` points whose per-symbol counts match `counts`.
fn enumerate_tables(n: usize, counts: &[usize]) -> Vec<Vec<usize>> {
    fn rec(
        pos: usize,
        n: usize,
        cur: &mut Vec<usize>,
        remaining: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == n {
            out.push(cur.clone());
            return;
        }
        for sym in 0..remaining.len() {
            if remaining[sym] > 0 {
                remaining[sym] -= 1;
                cur[pos] = sym;
                rec(pos + 1, n, cur, remaining, out);
                remaining[sym] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    let mut remaining = counts.to_vec();
    rec(0, n, &mut cur, &mut remaining, &mut out);
    out
}

/// Reconstructs the unique target on a ray: `e = μν + t·α`, then `Ψ^{-1}`.
///
/// The entries through symbol 0 are filled in from the marginal structure
/// (condition `Σ_u f_u = 2 - |U|` pointwise determines them linearly).
pub fn target_on_ray(mu: &[f64], nu: &[f64], alpha: &[f64], t: f64) -> Result<TargetPmf> {
    let qu = mu.len();
    let qv = nu.len();
    if alpha.len() != (qu - 1) * (qv - 1) {
        return Err(Error::Dimension("direction length mismatch".into()));
    }
    let mut e = vec![0.0; qu * qv];
    for u in 0..qu {
        for v in 0..qv {
            e[u * qv + v] = mu[u] * nu[v];
        }
    }
    for u in 1..qu {
        for v in 1..qv {
            e[u * qv + v] += t * alpha[(u - 1) * (qv - 1) + (v - 1)];
        }
    }
    for v in 1..qv {
        let mut s = 0.0;
        for u in 1..qu {
            s += e[u * qv + v] - mu[u] * nu[v];
        }
        e[v] = mu[0] * nu[v] - s;
    }
    for u in 0..qu {
        let mut s = 0.0;
        for v in 1..qv {
            s += e[u * qv + v] - mu[u] * nu[v];
        }
        e[u * qv] = mu[u] * nu[0] - s;
    }
    let ev = ExpectationVector {
        e,
        mu: mu.to_vec(),
        nu: nu.to_vec(),
    };
    psi_inverse(&ev)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expectation_of_constants_and_dictator() {
        let joint = JointPmf::dsbs(0.4).unwrap();
        let d = 2;
        let c1 = RealTable::constant(d, 2, 0.5);
        let c2 = RealTable::constant(d, 2, -0.5);
        let e = exact_expectation(&c1, &c2, &joint, d).unwrap();
        assert!((e + 0.25).abs() < 1e-15);
        // f = g = x_1 on DSBS(delta=0.3): E = rho = 0.4
        let vals: Vec<f64> = (0..4)
            .map(|x| if index::digit_at(x, 2, d, 1) == 1 { 1.0 } else { -1.0 })
            .collect();
        let f = RealTable::new(d, 2, vals).unwrap();
        let e = exact_expectation(&f, &f, &joint, d).unwrap();
        assert!((e - 0.4).abs() < 1e-12);
    }

    #[test]
    fn combinations_cover_everything() {
        let all: Vec<Vec<usize>> = Combinations::new(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
        let none: Vec<Vec<usize>> = Combinations::new(3, 0).collect();
        assert_eq!(none, vec![Vec::<usize>::new()]);
    }

    #[test]
    fn d1_uniform_biases() {
        let joint = JointPmf::dsbs(0.4).unwrap();
        let r = brute_force_biased_maxcorr(&joint, 1, 1, 1).unwrap();
        assert!((r.value - 0.4).abs() < 1e-12);
        assert_eq!(r.accept_f, vec![0]);
        assert_eq!(r.accept_g, vec![0]);
    }

    #[test]
    fn forced_constant_side() {
        let joint = JointPmf::dsbs(0.4).unwrap();
        let d = 2;
        // n_u = 2^d: f constant +1, E[fg] = E[g] = 2*n_v/2^d - 1
        let r = brute_force_biased_maxcorr(&joint, d, 4, 1).unwrap();
        assert!((r.value - (2.0 * 0.25 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn lex_pair_wins_at_single_count() {
        let joint = JointPmf::dsbs(0.4).unwrap();
        let r = brute_force_biased_maxcorr(&joint, 2, 1, 1).unwrap();
        // lexicographically first point is the all-(-1) string (index 0)
        assert_eq!(r.accept_f, vec![0]);
        assert_eq!(r.accept_g, vec![0]);
        // value = 4*P(0,0)^2 - 2/4 - 2/4 + 1 = 4*0.35^2
        let p00: f64 = 0.35;
        assert!((r.value - 4.0 * p00 * p00).abs() < 1e-12);
    }

    #[test]
    fn extremes_binary_match_maxcorr() {
        let joint = JointPmf::dsbs(0.4).unwrap();
        let recs = brute_force_extremes(&joint, 1, &[1, 1], &[1, 1], 8).unwrap();
        // best |e - mu nu| for uniform-bias binary outputs is rho = 0.4
        assert!((recs[0].t.sqrt() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn independent_joint_extremes_collapse() {
        let joint = JointPmf::product_of(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        let recs = brute_force_extremes(&joint, 1, &[1, 1], &[1, 1], 8).unwrap();
        for r in &recs {
            assert!(r.t < 1e-12);
        }
    }

    #[test]
    fn ray_reconstruction_roundtrip() {
        let q = TargetPmf::new(2, 2, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let ev = crate::distributions::psi_map(&q);
        let beta = ev.e(1, 1) - ev.mu[1] * ev.nu[1];
        let t = beta * beta;
        let alpha = vec![beta / t];
        let back = target_on_ray(&ev.mu, &ev.nu, &alpha, t).unwrap();
        for (a, b) in q.entries().iter().zip(back.entries()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_enforced() {
        let joint = JointPmf::dsbs(0.4).unwrap();
        assert!(matches!(
            brute_force_biased_maxcorr(&joint, 5, 16, 16),
            Err(Error::SizeCap(_))
        ));
    }
}
