//! Orthonormal bases on finite probability spaces and Fourier machinery.
//!
//! A basis is a family `psi_s`, `s = 0..q-1`, orthonormal under
//! `<f, g> = E_{P_X}[f g]` with `psi_0 ≡ 1`. Products over coordinates give
//! the parity family `phi_{s^d}(x^d) = prod_i psi_{s_i}(x_i)`, orthonormal
//! under the product measure, and every `f: X^d -> R` decomposes as
//! `f = sum_{s^d} f_{s^d} phi_{s^d}` with `f_{s^d} = E[f phi_{s^d}]`.
//!
//! Coefficients use the canonical flat index of [`crate::index`]: `s_1` most
//! significant. Transforms are exact tensor contractions, `O(d q^{d+1})`;
//! dense coefficient storage caps out around `q^d <= 2^20`.

use crate::distributions::{alphabet_point, JointPmf};
use crate::error::{Error, Result};
use crate::index;

/// Numerical tolerance for orthonormality checks.
pub const ORTHO_TOL: f64 = 1e-10;

/// Per-coordinate orthonormal function family with its inner-product weights.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    q: usize,
    /// `psi[s][j]` = value of the s-th basis function at alphabet point j.
    psi: Vec<Vec<f64>>,
    /// Marginal pmf defining the inner product.
    weights: Vec<f64>,
}

impl OrthonormalBasis {
    /// Gram-Schmidt on `seeds` under `<f,g> = E_marginal[f g]`.
    ///
    /// The first seed must be the constant function 1. Output signs are the
    /// natural Gram-Schmidt ones (normalized residuals, never flipped); with
    /// the default seeds this leaves each `psi_s` positive at the smallest
    /// alphabet point where it is nonzero.
    pub fn gram_schmidt(marginal: &[f64], seeds: &[Vec<f64>]) -> Result<Self> {
        let q = marginal.len();
        if q < 2 {
            return Err(Error::Dimension("alphabet size must be >= 2".into()));
        }
        if seeds.len() != q || seeds.iter().any(|s| s.len() != q) {
            return Err(Error::Dimension(format!(
                "need {q} seed functions tabulated on {q} points"
            )));
        }
        if seeds[0].iter().any(|&v| (v - 1.0).abs() > 1e-12) {
            return Err(Error::DegenerateBasis(
                "first seed must be the constant 1".into(),
            ));
        }
        let dot = |a: &[f64], b: &[f64]| -> f64 {
            a.iter()
                .zip(b)
                .zip(marginal)
                .map(|((x, y), w)| w * x * y)
                .sum()
        };
        let mut psi: Vec<Vec<f64>> = Vec::with_capacity(q);
        for seed in seeds {
            let mut r = seed.clone();
            for prev in &psi {
                let c = dot(&r, prev);
                for (rv, pv) in r.iter_mut().zip(prev) {
                    *rv -= c * pv;
                }
            }
            let norm = dot(&r, &r).sqrt();
            if norm < ORTHO_TOL {
                return Err(Error::DegenerateBasis(
                    "seed is linearly dependent in L2(P_X)".into(),
                ));
            }
            for rv in r.iter_mut() {
                *rv /= norm;
            }
            psi.push(r);
        }
        Ok(Self {
            q,
            psi,
            weights: marginal.to_vec(),
        })
    }

    /// Default basis for a marginal: for `q = 2` the seeds are `{1, x}` so
    /// `psi_1(x) = (x - mu)/sigma`; for `q > 2` the seeds are the constant
    /// plus the 0/1 indicators of points `0..q-2`.
    pub fn default_for(marginal: &[f64]) -> Result<Self> {
        let q = marginal.len();
        let mut seeds = vec![vec![1.0; q]];
        if q == 2 {
            seeds.push((0..q).map(|j| alphabet_point(q, j)).collect());
        } else {
            for s in 0..q - 1 {
                seeds.push((0..q).map(|j| if j == s { 1.0 } else { 0.0 }).collect());
            }
        }
        Self::gram_schmidt(marginal, &seeds)
    }

    /// Alphabet size.
    pub fn q(&self) -> usize {
        self.q
    }

    /// `psi_s(j)`.
    pub fn value(&self, s: usize, j: usize) -> f64 {
        self.psi[s][j]
    }

    /// Basis function `s` tabulated over the alphabet.
    pub fn function(&self, s: usize) -> &[f64] {
        &self.psi[s]
    }

    /// Marginal pmf used by the inner product.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Max deviation from `E[psi_s psi_t] = 1(s=t)`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..self.q {
            for t in 0..self.q {
                let e: f64 = (0..self.q)
                    .map(|j| self.weights[j] * self.psi[s][j] * self.psi[t][j])
                    .sum();
                let target = if s == t { 1.0 } else { 0.0 };
                worst = worst.max((e - target).abs());
            }
        }
        worst
    }

    /// Product measure weight of the point `x^d` (flat index).
    pub fn product_weight(&self, x: usize, d: usize) -> f64 {
        let mut w = 1.0;
        let mut rest = x;
        for _ in 0..d {
            w *= self.weights[rest % self.q];
            rest /= self.q;
        }
        w
    }

    /// Parity value `phi_{s^d}(x^d)`.
    pub fn parity(&self, s: usize, x: usize, d: usize) -> f64 {
        let mut v = 1.0;
        let mut ss = s;
        let mut xx = x;
        for _ in 0..d {
            v *= self.psi[ss % self.q][xx % self.q];
            ss /= self.q;
            xx /= self.q;
        }
        v
    }
}

/// Cross-correlation matrix `rho_{s,t} = E_{P_XY}[psi_s(X) psi'_t(Y)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCorrelationMatrix {
    q: usize,
    rho: Vec<f64>, // row-major q x q
}

impl CrossCorrelationMatrix {
    /// Computes the matrix for a joint pmf and a basis on each side.
    pub fn from_joint(
        joint: &JointPmf,
        basis_x: &OrthonormalBasis,
        basis_y: &OrthonormalBasis,
    ) -> Result<Self> {
        if joint.qx() != joint.qy() {
            return Err(Error::Dimension(
                "cross-correlation requires matching alphabet sizes".into(),
            ));
        }
        let q = joint.qx();
        if basis_x.q() != q || basis_y.q() != q {
            return Err(Error::Dimension(
                "basis alphabet does not match joint pmf".into(),
            ));
        }
        let mut rho = vec![0.0; q * q];
        for s in 0..q {
            for t in 0..q {
                let mut e = 0.0;
                for x in 0..q {
                    for y in 0..q {
                        e += joint.prob(x, y) * basis_x.value(s, x) * basis_y.value(t, y);
                    }
                }
                rho[s * q + t] = e;
            }
        }
        Ok(Self { q, rho })
    }

    /// Diagonal matrix `diag(1, r_1, ..., r_{q-1})`.
    pub fn diagonal(diag: &[f64]) -> Self {
        let q = diag.len();
        let mut rho = vec![0.0; q * q];
        for (s, &v) in diag.iter().enumerate() {
            rho[s * q + s] = v;
        }
        Self { q, rho }
    }

    /// Alphabet size.
    pub fn q(&self) -> usize {
        self.q
    }

    /// `rho_{s,t}`.
    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.rho[s * self.q + t]
    }

    /// True when the matrix is `diag(1, r)` for a binary alphabet.
    pub fn boolean_diagonal(&self) -> Option<f64> {
        if self.q == 2
            && (self.get(0, 0) - 1.0).abs() < 1e-12
            && self.get(0, 1).abs() < 1e-12
            && self.get(1, 0).abs() < 1e-12
        {
            Some(self.get(1, 1))
        } else {
            None
        }
    }

    /// Spectral norm of the submatrix on non-constant indices `s, t >= 1`.
    ///
    /// This is the largest correlation the basis pair can couple through a
    /// single coordinate; it bounds the curvature of the bilinear objective
    /// on the bias-pinned subspace.
    pub fn free_spectral_norm(&self) -> f64 {
        let n = self.q - 1;
        if n == 0 {
            return 0.0;
        }
        let a = |i: usize, j: usize| self.get(i + 1, j + 1);
        // power iteration on R^T R
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.1).collect();
        let mut norm_sq = 0.0;
        for _ in 0..500 {
            // w = R v
            let w: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| a(i, j) * v[j]).sum())
                .collect();
            // u = R^T w
            let u: Vec<f64> = (0..n)
                .map(|j| (0..n).map(|i| a(i, j) * w[i]).sum())
                .collect();
            let len: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len < 1e-300 {
                return 0.0;
            }
            norm_sq = u
                .iter()
                .zip(&v)
                .map(|(x, y)| x * y)
                .sum::<f64>()
                .max(0.0);
            v = u.iter().map(|x| x / len).collect();
        }
        norm_sq.sqrt()
    }
}

/// Product kernel `K = rho_1 ⊗ ... ⊗ rho_d` acting on coefficient vectors.
///
/// `E[f(X^d) g(Y^d)] = f^T K g` when `f`, `g` hold Fourier coefficients in
/// the respective bases. Application is the structured d-fold contraction,
/// `O(d q^{d+1})` rather than the naive `O(q^{2d})`.
#[derive(Debug, Clone)]
pub struct RhoKernel {
    d: usize,
    q: usize,
    mats: Vec<CrossCorrelationMatrix>, // one per coordinate
}

impl RhoKernel {
    /// IID kernel: the same per-letter matrix on every coordinate.
    pub fn iid(rho: CrossCorrelationMatrix, d: usize) -> Self {
        Self {
            q: rho.q(),
            mats: vec![rho; d],
            d,
        }
    }

    /// Kernel with a distinct matrix per coordinate (non-IID structures).
    pub fn per_coordinate(mats: Vec<CrossCorrelationMatrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::Dimension("kernel needs at least one coordinate".into()));
        }
        let q = mats[0].q();
        if mats.iter().any(|m| m.q() != q) {
            return Err(Error::Dimension("kernel coordinate sizes differ".into()));
        }
        Ok(Self {
            d: mats.len(),
            q,
            mats,
        })
    }

    /// Block length.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Per-letter alphabet size.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Per-coordinate matrices.
    pub fn mats(&self) -> &[CrossCorrelationMatrix] {
        &self.mats
    }

    /// `K v` by contracting each coordinate axis in turn.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = index::pow(self.q, self.d);
        assert_eq!(v.len(), n, "kernel dimension mismatch");
        let mut cur = v.to_vec();
        for coord in 1..=self.d {
            cur = contract_axis(&cur, self.q, self.d, coord, |s, t| {
                self.mats[coord - 1].get(s, t)
            });
        }
        cur
    }

    /// `K^T v` (contraction with the transposed per-letter matrices).
    pub fn apply_t(&self, v: &[f64]) -> Vec<f64> {
        let n = index::pow(self.q, self.d);
        assert_eq!(v.len(), n, "kernel dimension mismatch");
        let mut cur = v.to_vec();
        for coord in 1..=self.d {
            cur = contract_axis(&cur, self.q, self.d, coord, |s, t| {
                self.mats[coord - 1].get(t, s)
            });
        }
        cur
    }

    /// Largest singular value of the kernel restricted to indices with at
    /// least one nonzero digit (the bias-pinned subspace).
    pub fn free_spectral_norm(&self) -> f64 {
        self.mats
            .iter()
            .map(|m| m.free_spectral_norm())
            .fold(0.0, f64::max)
    }

    /// `f^T K g`.
    pub fn bilinear(&self, f: &[f64], g: &[f64]) -> f64 {
        let kg = self.apply(g);
        f.iter().zip(&kg).map(|(a, b)| a * b).sum()
    }
}

/// Contracts coordinate `coord` (1-based) of a `q^d` tensor with `m(s, t)`.
fn contract_axis<F: Fn(usize, usize) -> f64>(
    vals: &[f64],
    q: usize,
    d: usize,
    coord: usize,
    m: F,
) -> Vec<f64> {
    let stride = index::pow(q, d - coord);
    let outer = index::pow(q, coord - 1);
    let mut out = vec![0.0; vals.len()];
    for hi in 0..outer {
        let base = hi * q * stride;
        for lo in 0..stride {
            for s in 0..q {
                let mut acc = 0.0;
                for t in 0..q {
                    acc += m(s, t) * vals[base + t * stride + lo];
                }
                out[base + s * stride + lo] = acc;
            }
        }
    }
    out
}

/// Real-valued function tabulated on `X^d` (flat canonical index).
#[derive(Debug, Clone, PartialEq)]
pub struct RealTable {
    /// Block length.
    pub d: usize,
    /// Input alphabet size.
    pub q: usize,
    /// `values[x]` for each flat point index.
    pub values: Vec<f64>,
}

impl RealTable {
    /// Builds a table, checking the length.
    pub fn new(d: usize, q: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != index::pow(q, d) {
            return Err(Error::Dimension(format!(
                "table needs {} values, got {}",
                index::pow(q, d),
                values.len()
            )));
        }
        Ok(Self { d, q, values })
    }

    /// Constant table.
    pub fn constant(d: usize, q: usize, value: f64) -> Self {
        Self {
            d,
            q,
            values: vec![value; index::pow(q, d)],
        }
    }

    /// Expectation under the product measure of `marginal`.
    pub fn mean(&self, marginal: &[f64]) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(x, v)| {
                let mut w = 1.0;
                let mut rest = x;
                for _ in 0..self.d {
                    w *= marginal[rest % self.q];
                    rest /= self.q;
                }
                w * v
            })
            .sum()
    }
}

/// Finite-output function tabulated on `X^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthTable {
    /// Block length.
    pub d: usize,
    /// Input alphabet size.
    pub q: usize,
    /// Output alphabet size.
    pub out_size: usize,
    /// `values[x] ∈ 0..out_size`.
    pub values: Vec<usize>,
}

impl TruthTable {
    /// Builds a table, checking length and output range.
    pub fn new(d: usize, q: usize, out_size: usize, values: Vec<usize>) -> Result<Self> {
        if values.len() != index::pow(q, d) {
            return Err(Error::Dimension(format!(
                "table needs {} values, got {}",
                index::pow(q, d),
                values.len()
            )));
        }
        if values.iter().any(|&v| v >= out_size) {
            return Err(Error::Dimension("output value out of range".into()));
        }
        Ok(Self {
            d,
            q,
            out_size,
            values,
        })
    }

    /// Binary table from a ±1-valued real table (1 maps to output 1).
    pub fn from_sign_table(t: &RealTable) -> Result<Self> {
        let values = t
            .values
            .iter()
            .map(|&v| {
                if (v - 1.0).abs() < 1e-9 {
                    Ok(1usize)
                } else if (v + 1.0).abs() < 1e-9 {
                    Ok(0usize)
                } else {
                    Err(Error::ConditionViolation(format!(
                        "value {v} is not ±1"
                    )))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(t.d, t.q, 2, values)
    }

    /// The ±1 table of `2*1(f = u) - 1` for one output symbol.
    pub fn indicator(&self, u: usize) -> RealTable {
        RealTable {
            d: self.d,
            q: self.q,
            values: self
                .values
                .iter()
                .map(|&v| if v == u { 1.0 } else { -1.0 })
                .collect(),
        }
    }
}

/// Fourier coefficient vector indexed by `s^d` (flat canonical index).
#[derive(Debug, Clone, PartialEq)]
pub struct FourierVector {
    /// Block length.
    pub d: usize,
    /// Input alphabet size.
    pub q: usize,
    /// `coeffs[s]` for each flat multi-index.
    pub coeffs: Vec<f64>,
}

impl FourierVector {
    /// Builds a coefficient vector, checking the length.
    pub fn new(d: usize, q: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != index::pow(q, d) {
            return Err(Error::Dimension(format!(
                "coefficient vector needs {} entries, got {}",
                index::pow(q, d),
                coeffs.len()
            )));
        }
        Ok(Self { d, q, coeffs })
    }

    /// All-zero vector except the constant coefficient.
    pub fn bias_only(d: usize, q: usize, bias: f64) -> Self {
        let mut coeffs = vec![0.0; index::pow(q, d)];
        coeffs[0] = bias;
        Self { d, q, coeffs }
    }

    /// Constant (empty-index) coefficient.
    pub fn bias(&self) -> f64 {
        self.coeffs[0]
    }

    /// `Σ_s f_s^2` (equals `E[f^2]` by Parseval).
    pub fn sum_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

/// Forward transform: `f_{s^d} = E_{P^d}[f(X^d) phi_{s^d}(X^d)]`.
pub fn fourier_transform(table: &RealTable, basis: &OrthonormalBasis) -> Result<FourierVector> {
    if table.q != basis.q() {
        return Err(Error::Dimension("table/basis alphabet mismatch".into()));
    }
    let q = table.q;
    let mut cur = table.values.clone();
    for coord in 1..=table.d {
        cur = contract_axis(&cur, q, table.d, coord, |s, j| {
            basis.value(s, j) * basis.weights()[j]
        });
    }
    FourierVector::new(table.d, q, cur)
}

/// Inverse transform: `f(x^d) = Σ_{s^d} f_{s^d} phi_{s^d}(x^d)`.
pub fn inverse_transform(v: &FourierVector, basis: &OrthonormalBasis) -> Result<RealTable> {
    if v.q != basis.q() {
        return Err(Error::Dimension("vector/basis alphabet mismatch".into()));
    }
    let q = v.q;
    let mut cur = v.coeffs.clone();
    for coord in 1..=v.d {
        cur = contract_axis(&cur, q, v.d, coord, |j, s| basis.value(s, j));
    }
    RealTable::new(v.d, q, cur)
}

/// `E[f(X^d) g(Y^d)]` from Fourier coefficients and the per-letter matrix.
///
/// Uses the closed product form `Σ_{s^d,t^d} f g Π rho_{s_i,t_i}`; when the
/// matrix is `diag(1, r)` on a binary alphabet the weight-counting fast path
/// `Σ_S f_S g_S r^{|S|}` is taken (both routes agree to 1e-12).
pub fn inner_product_fourier(
    f: &FourierVector,
    g: &FourierVector,
    rho: &CrossCorrelationMatrix,
) -> Result<f64> {
    if f.d != g.d || f.q != g.q {
        return Err(Error::Dimension("coefficient vectors differ in shape".into()));
    }
    if f.q != rho.q() {
        return Err(Error::Dimension("rho alphabet mismatch".into()));
    }
    if let Some(r) = rho.boolean_diagonal() {
        let mut acc = 0.0;
        for s in 0..f.coeffs.len() {
            let w = index::weight(s, 2, f.d) as i32;
            acc += f.coeffs[s] * g.coeffs[s] * r.powi(w);
        }
        return Ok(acc);
    }
    let kernel = RhoKernel::iid(rho.clone(), f.d);
    Ok(kernel.bilinear(&f.coeffs, &g.coeffs))
}

/// Overparametrized representation: one ±1 table per output symbol.
///
/// The family satisfies `f_u(x) ∈ {-1, 1}` and `Σ_u f_u(x) = 2 - |U|`
/// pointwise.
pub fn indicator_decompose(t: &TruthTable) -> Vec<RealTable> {
    (0..t.out_size).map(|u| t.indicator(u)).collect()
}
