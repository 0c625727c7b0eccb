//! Finite-alphabet probability objects.
//!
//! Conventions used throughout the crate:
//!
//! - Binary alphabets are `{-1, +1}` with index 0 mapping to `-1` and index 1
//!   to `+1`; alphabets of size `q > 2` are `{0, 1, ..., q-1}`.
//! - Total variation distance is the *unhalved* sum `Σ |P(x) - Q(x)|` (range
//!   `[0, 2]`). Most libraries halve it; this crate deliberately does not.
//! - Construction refuses to renormalize: entries must be nonnegative and sum
//!   to 1 within [`SIMPLEX_TOL`], otherwise an error is returned.
//!
//! Every type here is immutable after construction and safe to share across
//! threads; the operations are pure functions.

use crate::error::{Error, Result};

/// Tolerance on simplex invariants at construction time.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Real value carried by alphabet point `j` of an alphabet of size `q`.
///
/// `{-1, +1}` for binary, `0..q-1` otherwise.
pub fn alphabet_point(q: usize, j: usize) -> f64 {
    if q == 2 {
        2.0 * j as f64 - 1.0
    } else {
        j as f64
    }
}

fn check_simplex(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|&v| v < -SIMPLEX_TOL) {
        return Err(Error::InvalidDistribution(format!(
            "{what}: negative entry"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what}: entries sum to {sum}, expected 1 within {SIMPLEX_TOL}"
        )));
    }
    Ok(())
}

/// Joint pmf of a pair of input sources on `X x Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    qx: usize,
    qy: usize,
    p: Vec<f64>, // row-major, p[x*qy + y]
}

impl JointPmf {
    /// Builds a joint pmf from row-major entries `P(x, y)`.
    pub fn new(qx: usize, qy: usize, p: Vec<f64>) -> Result<Self> {
        if qx < 2 || qy < 2 {
            return Err(Error::Dimension(format!(
                "alphabet sizes must be >= 2, got ({qx}, {qy})"
            )));
        }
        if p.len() != qx * qy {
            return Err(Error::Dimension(format!(
                "pmf needs {} entries, got {}",
                qx * qy,
                p.len()
            )));
        }
        check_simplex(&p, "joint pmf")?;
        Ok(Self { qx, qy, p })
    }

    /// Doubly symmetric binary source with correlation `rho = 1 - 2*flip_prob`.
    pub fn dsbs(rho: f64) -> Result<Self> {
        let a = (1.0 + rho) / 4.0;
        let b = (1.0 - rho) / 4.0;
        Self::new(2, 2, vec![a, b, b, a])
    }

    /// Binary joint with marginals `P_X(1) = px1`, `P_Y(1) = py1` and Pearson
    /// correlation `rho` of the `{-1,+1}` embeddings.
    pub fn binary_from_marginals(px1: f64, py1: f64, rho: f64) -> Result<Self> {
        let sx = 2.0 * (px1 * (1.0 - px1)).sqrt();
        let sy = 2.0 * (py1 * (1.0 - py1)).sqrt();
        if sx < 1e-15 || sy < 1e-15 {
            return Err(Error::Degenerate(
                "binary marginal has zero variance".into(),
            ));
        }
        let ex = 2.0 * px1 - 1.0;
        let ey = 2.0 * py1 - 1.0;
        let exy = rho * sx * sy + ex * ey;
        // index 0 is -1, index 1 is +1
        let p = vec![
            (1.0 - ex - ey + exy) / 4.0,
            (1.0 - ex + ey - exy) / 4.0,
            (1.0 + ex - ey - exy) / 4.0,
            (1.0 + ex + ey + exy) / 4.0,
        ];
        Self::new(2, 2, p)
    }

    /// Product of the two marginals (an independent pair).
    pub fn product_of(px: &[f64], py: &[f64]) -> Result<Self> {
        let mut p = Vec::with_capacity(px.len() * py.len());
        for &a in px {
            for &b in py {
                p.push(a * b);
            }
        }
        Self::new(px.len(), py.len(), p)
    }

    /// Size of the X alphabet.
    pub fn qx(&self) -> usize {
        self.qx
    }

    /// Size of the Y alphabet.
    pub fn qy(&self) -> usize {
        self.qy
    }

    /// `P(x, y)`.
    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.p[x * self.qy + y]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.p
    }

    /// Marginal of X (row sums).
    pub fn marginal_x(&self) -> Vec<f64> {
        (0..self.qx)
            .map(|x| (0..self.qy).map(|y| self.prob(x, y)).sum())
            .collect()
    }

    /// Marginal of Y (column sums).
    pub fn marginal_y(&self) -> Vec<f64> {
        (0..self.qy)
            .map(|y| (0..self.qx).map(|x| self.prob(x, y)).sum())
            .collect()
    }

    /// True when both marginals are uniform within `tol`.
    pub fn has_uniform_marginals(&self, tol: f64) -> bool {
        let ux = 1.0 / self.qx as f64;
        let uy = 1.0 / self.qy as f64;
        self.marginal_x().iter().all(|&v| (v - ux).abs() <= tol)
            && self.marginal_y().iter().all(|&v| (v - uy).abs() <= tol)
    }

    /// Pearson correlation of the canonical alphabet embeddings.
    pub fn embedded_correlation(&self) -> Result<f64> {
        let ex: Vec<f64> = (0..self.qx).map(|j| alphabet_point(self.qx, j)).collect();
        let ey: Vec<f64> = (0..self.qy).map(|j| alphabet_point(self.qy, j)).collect();
        pearson_correlation(self, &ex, &ey)
    }
}

/// Target (output) pmf on `U x V`; same invariants as [`JointPmf`].
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPmf {
    qu: usize,
    qv: usize,
    q: Vec<f64>, // row-major, q[u*qv + v]
}

impl TargetPmf {
    /// Builds a target pmf from row-major entries `Q(u, v)`.
    pub fn new(qu: usize, qv: usize, q: Vec<f64>) -> Result<Self> {
        if qu < 2 || qv < 2 {
            return Err(Error::Dimension(format!(
                "output alphabet sizes must be >= 2, got ({qu}, {qv})"
            )));
        }
        if q.len() != qu * qv {
            return Err(Error::Dimension(format!(
                "target pmf needs {} entries, got {}",
                qu * qv,
                q.len()
            )));
        }
        check_simplex(&q, "target pmf")?;
        Ok(Self { qu, qv, q })
    }

    /// Binary target from marginals `Q_U(1)`, `Q_V(1)` and agreement `P(U=V)`.
    pub fn binary_from_agreement(qu1: f64, qv1: f64, agree: f64) -> Result<Self> {
        let q11 = (agree - 1.0 + qu1 + qv1) / 2.0;
        let q10 = qu1 - q11;
        let q01 = qv1 - q11;
        let q00 = 1.0 - q11 - q10 - q01;
        Self::new(2, 2, vec![q00, q01, q10, q11])
    }

    /// Product of the given output marginals.
    pub fn product_of(qu: &[f64], qv: &[f64]) -> Result<Self> {
        let mut q = Vec::with_capacity(qu.len() * qv.len());
        for &a in qu {
            for &b in qv {
                q.push(a * b);
            }
        }
        Self::new(qu.len(), qv.len(), q)
    }

    /// Size of the U alphabet.
    pub fn qu(&self) -> usize {
        self.qu
    }

    /// Size of the V alphabet.
    pub fn qv(&self) -> usize {
        self.qv
    }

    /// `Q(u, v)`.
    pub fn prob(&self, u: usize, v: usize) -> f64 {
        self.q[u * self.qv + v]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.q
    }

    /// Marginal of U.
    pub fn marginal_u(&self) -> Vec<f64> {
        (0..self.qu)
            .map(|u| (0..self.qv).map(|v| self.prob(u, v)).sum())
            .collect()
    }

    /// Marginal of V.
    pub fn marginal_v(&self) -> Vec<f64> {
        (0..self.qv)
            .map(|v| (0..self.qu).map(|u| self.prob(u, v)).sum())
            .collect()
    }

    /// `P(U = V)` (only meaningful when the alphabets align).
    pub fn agreement(&self) -> f64 {
        (0..self.qu.min(self.qv)).map(|k| self.prob(k, k)).sum()
    }
}

/// Centered pairwise expectations `e_{u,v} = E[f_u g_v]` plus output biases.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectationVector {
    /// `e[u*|V| + v]`, each in `[-1, 1]`.
    pub e: Vec<f64>,
    /// Output biases `mu_u = 2 Q_U(u) - 1`; sums to `2 - |U|`.
    pub mu: Vec<f64>,
    /// Output biases `nu_v = 2 Q_V(v) - 1`; sums to `2 - |V|`.
    pub nu: Vec<f64>,
}

impl ExpectationVector {
    /// `e_{u,v}`.
    pub fn e(&self, u: usize, v: usize) -> f64 {
        self.e[u * self.nu.len() + v]
    }

    /// Number of U symbols.
    pub fn qu(&self) -> usize {
        self.mu.len()
    }

    /// Number of V symbols.
    pub fn qv(&self) -> usize {
        self.nu.len()
    }
}

/// Unhalved total variation distance `Σ |p - q|`.
pub fn tv_distance(p: &TargetPmf, q: &TargetPmf) -> Result<f64> {
    if p.qu != q.qu || p.qv != q.qv {
        return Err(Error::Dimension(format!(
            "tv_distance alphabets differ: ({},{}) vs ({},{})",
            p.qu, p.qv, q.qu, q.qv
        )));
    }
    Ok(p.q
        .iter()
        .zip(q.q.iter())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// Unhalved total variation between raw probability vectors of equal length.
pub fn tv_distance_raw(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension(
            "tv_distance_raw length mismatch".into(),
        ));
    }
    Ok(p.iter().zip(q.iter()).map(|(a, b)| (a - b).abs()).sum())
}

/// Pearson correlation of `embed_x(X)` and `embed_y(Y)` under `p`.
pub fn pearson_correlation(p: &JointPmf, embed_x: &[f64], embed_y: &[f64]) -> Result<f64> {
    if embed_x.len() != p.qx || embed_y.len() != p.qy {
        return Err(Error::Dimension(
            "embedding length does not match alphabet".into(),
        ));
    }
    let px = p.marginal_x();
    let py = p.marginal_y();
    let mx: f64 = px.iter().zip(embed_x).map(|(w, v)| w * v).sum();
    let my: f64 = py.iter().zip(embed_y).map(|(w, v)| w * v).sum();
    let vx: f64 = px
        .iter()
        .zip(embed_x)
        .map(|(w, v)| w * (v - mx) * (v - mx))
        .sum();
    let vy: f64 = py
        .iter()
        .zip(embed_y)
        .map(|(w, v)| w * (v - my) * (v - my))
        .sum();
    if vx < 1e-24 || vy < 1e-24 {
        return Err(Error::Degenerate(
            "embedded variable has zero variance".into(),
        ));
    }
    let mut cov = 0.0;
    for x in 0..p.qx {
        for y in 0..p.qy {
            cov += p.prob(x, y) * (embed_x[x] - mx) * (embed_y[y] - my);
        }
    }
    Ok(cov / (vx.sqrt() * vy.sqrt()))
}

/// The bijection from output distributions to expectation vectors:
/// `e_{u,v} = 4 Q(u,v) - 2 Q_U(u) - 2 Q_V(v) + 1`.
pub fn psi_map(q: &TargetPmf) -> ExpectationVector {
    let qu = q.marginal_u();
    let qv = q.marginal_v();
    let mut e = Vec::with_capacity(q.qu * q.qv);
    for u in 0..q.qu {
        for v in 0..q.qv {
            e.push(4.0 * q.prob(u, v) - 2.0 * qu[u] - 2.0 * qv[v] + 1.0);
        }
    }
    ExpectationVector {
        e,
        mu: qu.iter().map(|&a| 2.0 * a - 1.0).collect(),
        nu: qv.iter().map(|&a| 2.0 * a - 1.0).collect(),
    }
}

/// Inverts [`psi_map`]; errors when the induced matrix is not a pmf.
pub fn psi_inverse(ev: &ExpectationVector) -> Result<TargetPmf> {
    let qu_n = ev.qu();
    let qv_n = ev.qv();
    let qu: Vec<f64> = ev.mu.iter().map(|&m| (1.0 + m) / 2.0).collect();
    let qv: Vec<f64> = ev.nu.iter().map(|&m| (1.0 + m) / 2.0).collect();
    let mut q = Vec::with_capacity(qu_n * qv_n);
    for u in 0..qu_n {
        for v in 0..qv_n {
            q.push((ev.e(u, v) + 2.0 * qu[u] + 2.0 * qv[v] - 1.0) / 4.0);
        }
    }
    TargetPmf::new(qu_n, qv_n, q)
        .map_err(|e| Error::InfeasibleExpectation(format!("induced matrix is not a pmf: {e}")))
}

/// Star mixture `lambda * q + (1 - lambda) * (Q_U ⊗ Q_V)`.
///
/// The center of the star is the product of `q`'s own marginals, so the
/// mixture preserves them for every `lambda`.
pub fn star_mix(q: &TargetPmf, lambda: f64) -> TargetPmf {
    let qu = q.marginal_u();
    let qv = q.marginal_v();
    let mut out = Vec::with_capacity(q.qu * q.qv);
    for u in 0..q.qu {
        for v in 0..q.qv {
            out.push(lambda * q.prob(u, v) + (1.0 - lambda) * qu[u] * qv[v]);
        }
    }
    TargetPmf {
        qu: q.qu,
        qv: q.qv,
        q: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform2x2() -> TargetPmf {
        TargetPmf::new(2, 2, vec![0.25; 4]).unwrap()
    }

    #[test]
    fn rejects_bad_simplex() {
        assert!(JointPmf::new(2, 2, vec![0.3, 0.3, 0.2, 0.1]).is_err());
        assert!(JointPmf::new(2, 2, vec![0.5, 0.6, -0.1, 0.0]).is_err());
        // renormalization is refused, not silently applied
        assert!(TargetPmf::new(2, 2, vec![0.2, 0.2, 0.2, 0.2]).is_err());
    }

    #[test]
    fn tv_identity_and_point_masses() {
        let p = uniform2x2();
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        let a = TargetPmf::new(2, 2, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let b = TargetPmf::new(2, 2, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(tv_distance(&a, &b).unwrap(), 2.0);
        // uniform vs point mass: |1-.25| + 3*.25 = 1.5
        assert!((tv_distance(&p, &a).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn tv_alphabet_mismatch() {
        let p = uniform2x2();
        let r = TargetPmf::new(2, 3, vec![1.0 / 6.0; 6]).unwrap();
        assert!(matches!(tv_distance(&p, &r), Err(Error::Dimension(_))));
    }

    #[test]
    fn pearson_examples() {
        // perfect correlation
        let p = JointPmf::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let e = [-1.0, 1.0];
        assert!((pearson_correlation(&p, &e, &e).unwrap() - 1.0).abs() < 1e-12);
        // independence
        let prod = JointPmf::product_of(&[0.3, 0.7], &[0.6, 0.4]).unwrap();
        assert!(pearson_correlation(&prod, &e, &e).unwrap().abs() < 1e-12);
        // DSBS with delta = 0.3 -> 1 - 2*0.3 = 0.4
        let dsbs = JointPmf::dsbs(0.4).unwrap();
        assert!((pearson_correlation(&dsbs, &e, &e).unwrap() - 0.4).abs() < 1e-12);
        // zero variance errors
        let degen = JointPmf::new(2, 2, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        assert!(matches!(
            pearson_correlation(&degen, &e, &e),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn binary_from_marginals_matches() {
        let p = JointPmf::binary_from_marginals(0.6, 0.7, 0.4).unwrap();
        let mx = p.marginal_x();
        let my = p.marginal_y();
        assert!((mx[1] - 0.6).abs() < 1e-12);
        assert!((my[1] - 0.7).abs() < 1e-12);
        assert!((p.embedded_correlation().unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn psi_map_examples() {
        // product of uniforms -> all zero
        let ev = psi_map(&uniform2x2());
        assert!(ev.e.iter().all(|&v| v.abs() < 1e-15));
        // perfect agreement: Q(u,u) = 1/2
        let q = TargetPmf::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let ev = psi_map(&q);
        assert!((ev.e(1, 1) - 1.0).abs() < 1e-15);
        assert!((ev.e(0, 0) - 1.0).abs() < 1e-15);
        assert!((ev.e(0, 1) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn psi_roundtrip() {
        let q = TargetPmf::new(2, 3, vec![0.1, 0.2, 0.05, 0.3, 0.15, 0.2]).unwrap();
        let back = psi_inverse(&psi_map(&q)).unwrap();
        for (a, b) in q.entries().iter().zip(back.entries()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn psi_inverse_rejects_infeasible() {
        let mut ev = psi_map(&uniform2x2());
        ev.e[0] = 3.0; // pushes induced entry outside the simplex
        assert!(matches!(
            psi_inverse(&ev),
            Err(Error::InfeasibleExpectation(_))
        ));
    }

    #[test]
    fn star_mix_endpoints_and_marginals() {
        let q = TargetPmf::new(2, 2, vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let at1 = star_mix(&q, 1.0);
        for (a, b) in q.entries().iter().zip(at1.entries()) {
            assert!((a - b).abs() < 1e-15);
        }
        let at0 = star_mix(&q, 0.0);
        let prod = TargetPmf::product_of(&q.marginal_u(), &q.marginal_v()).unwrap();
        for (a, b) in prod.entries().iter().zip(at0.entries()) {
            assert!((a - b).abs() < 1e-15);
        }
        for lambda in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let m = star_mix(&q, lambda);
            for (a, b) in m.marginal_u().iter().zip(q.marginal_u()) {
                assert!((a - b).abs() < 1e-15);
            }
            for (a, b) in m.marginal_v().iter().zip(q.marginal_v()) {
                assert!((a - b).abs() < 1e-15);
            }
        }
        // midpoint is the entrywise midpoint
        let mid = star_mix(&q, 0.5);
        for u in 0..2 {
            for v in 0..2 {
                let expect = 0.5 * q.prob(u, v) + 0.5 * at0.prob(u, v);
                assert!((mid.prob(u, v) - expect).abs() < 1e-15);
            }
        }
    }
}
