//! Case studies with non-IID inputs.
//!
//! Three executable models: one shared fair bit plus unlimited local
//! randomness, Bell-state measurement pairs (handled purely at the
//! probability level, since the measurement statistics reduce to
//! trigonometric pmfs), and first-order Markov sources with their custom
//! orthonormal sequence basis.

use crate::distributions::{JointPmf, TargetPmf};
use crate::error::{Error, Result};
use crate::fourier::{CrossCorrelationMatrix, RhoKernel};
use crate::fpath::{FPathConfig, FPathState, Problem, SideRep};
use crate::index;

/// Achievable region for one bit of common randomness.
#[derive(Debug, Clone, Copy)]
pub struct CommonRandomnessRegion {
    /// Output bias `Q_U(1)`.
    pub a: f64,
    /// Output bias `Q_V(1)`.
    pub b: f64,
    /// `ζ = 1 - (2a-1)(2b-1)`.
    pub zeta: f64,
    /// `β = min(2a, 2(1-a)) · min(2b, 2(1-b))`.
    pub beta: f64,
    /// Lower endpoint of the achievable `P(U = V)` interval.
    pub agree_lo: f64,
    /// Upper endpoint.
    pub agree_hi: f64,
    /// Bound on the shared-bit coefficient: `|f̃_1| <= f1_max`.
    pub f1_max: f64,
    /// Bound on `|g̃_1|`.
    pub g1_max: f64,
}

/// Closed-form achievable region of the one-shared-bit scenario.
pub fn cr_region(a: f64, b: f64) -> Result<CommonRandomnessRegion> {
    if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
        return Err(Error::InvalidDistribution("biases must be in [0,1]".into()));
    }
    let zeta = 1.0 - (2.0 * a - 1.0) * (2.0 * b - 1.0);
    let f1_max = (2.0 * a).min(2.0 * (1.0 - a));
    let g1_max = (2.0 * b).min(2.0 * (1.0 - b));
    let beta = f1_max * g1_max;
    Ok(CommonRandomnessRegion {
        a,
        b,
        zeta,
        beta,
        agree_lo: (2.0 - zeta - beta) / 2.0,
        agree_hi: (2.0 - zeta + beta) / 2.0,
        f1_max,
        g1_max,
    })
}

/// Exact output joint of the shared-bit protocol with coefficients
/// `f̃(z) = (2a-1) + f1·z`, `g̃(z) = (2b-1) + g1·z` on the fair bit `z`.
pub fn cr_exact_joint(a: f64, b: f64, f1: f64, g1: f64) -> Result<TargetPmf> {
    let reg = cr_region(a, b)?;
    if f1.abs() > reg.f1_max + 1e-12 || g1.abs() > reg.g1_max + 1e-12 {
        return Err(Error::ConditionViolation(
            "shared-bit coefficient outside the feasible interval".into(),
        ));
    }
    let mut cells = vec![0.0; 4];
    for z in [-1.0f64, 1.0] {
        let pu1 = (1.0 + (2.0 * a - 1.0) + f1 * z) / 2.0;
        let pv1 = (1.0 + (2.0 * b - 1.0) + g1 * z) / 2.0;
        for (u, pu) in [(0usize, 1.0 - pu1), (1, pu1)] {
            for (v, pv) in [(0usize, 1.0 - pv1), (1, pv1)] {
                cells[u * 2 + v] += 0.5 * pu * pv;
            }
        }
    }
    TargetPmf::new(2, 2, cells)
}

/// Monte-Carlo run of the shared-bit protocol; bit-reproducible per seed.
pub fn cr_monte_carlo(
    a: f64,
    b: f64,
    f1: f64,
    g1: f64,
    n: u64,
    seed: u64,
) -> Result<crate::protocol::EmpiricalJoint> {
    use rand::{Rng, RngCore, SeedableRng};
    cr_exact_joint(a, b, f1, g1)?; // validates the coefficients
    let mut master = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let mut z_rng = rand_chacha::ChaCha12Rng::seed_from_u64(master.next_u64());
    let mut u_rng = rand_chacha::ChaCha12Rng::seed_from_u64(master.next_u64());
    let mut v_rng = rand_chacha::ChaCha12Rng::seed_from_u64(master.next_u64());
    let mut counts = vec![0u64; 4];
    for _ in 0..n {
        let z: f64 = if z_rng.gen::<bool>() { 1.0 } else { -1.0 };
        let pu1 = (1.0 + (2.0 * a - 1.0) + f1 * z) / 2.0;
        let pv1 = (1.0 + (2.0 * b - 1.0) + g1 * z) / 2.0;
        let u = usize::from(u_rng.gen::<f64>() < pu1);
        let v = usize::from(v_rng.gen::<f64>() < pv1);
        counts[u * 2 + v] += 1;
    }
    Ok(crate::protocol::EmpiricalJoint {
        qu: 2,
        qv: 2,
        counts,
        n,
    })
}

/// Measurement-outcome joint of a shared Bell state with analyzer angles
/// `theta`, `theta_prime`: symmetric with uniform marginals,
/// `P(-1,-1) = P(1,1) = cos²(θ'-θ)/2`.
pub fn bell_measurement_joint(theta: f64, theta_prime: f64) -> Result<JointPmf> {
    let delta = theta_prime - theta;
    let c = delta.cos().powi(2) / 2.0;
    let s = delta.sin().powi(2) / 2.0;
    JointPmf::new(2, 2, vec![c, s, s, c])
}

/// First-order Markov source pair: `X_1 = Y_1 ~ Be(1/2)`, later letters flip
/// with coupled probabilities (`Y`'s flip equals `X`'s flip xored with an
/// independent `Be(delta_y)` bit).
#[derive(Debug, Clone, Copy)]
pub struct MarkovSource {
    /// Flip probability of the X chain.
    pub delta_x: f64,
    /// Extra flip probability applied to Y relative to X.
    pub delta_y: f64,
    /// Sequence length.
    pub d: usize,
}

impl MarkovSource {
    /// Validates the parameter ranges.
    pub fn new(delta_x: f64, delta_y: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta_x) || !(0.0..=1.0).contains(&delta_y) {
            return Err(Error::InvalidDistribution("deltas must be in [0,1]".into()));
        }
        if d == 0 {
            return Err(Error::Dimension("d must be at least 1".into()));
        }
        Ok(Self {
            delta_x,
            delta_y,
            d,
        })
    }

    /// `p ∗ q = p(1-q) + q(1-p)`.
    pub fn delta_z(&self) -> f64 {
        self.delta_x * (1.0 - self.delta_y) + self.delta_y * (1.0 - self.delta_x)
    }

    /// Transition covariance `ρ' = 4 δ_x (1-δ_x)(1-2δ_y)`
    /// (`Cov(X_{i-1}X_i, Y_{i-1}Y_i)`).
    pub fn rho_prime(&self) -> f64 {
        4.0 * self.delta_x * (1.0 - self.delta_x) * (1.0 - 2.0 * self.delta_y)
    }

    /// Correlation of the unit-normalized transition basis functions:
    /// `ρ'/(σ1 σ2)`. This is the coefficient the Fourier inner product
    /// carries per transition coordinate (it equals 1 when `δ_y = 0`, i.e.
    /// `Y ≡ X`, and 0 when `δ_y = 1/2`).
    pub fn rho_coordinate(&self) -> f64 {
        let dz = self.delta_z();
        let s1 = 2.0 * (self.delta_x * (1.0 - self.delta_x)).sqrt();
        let s2 = 2.0 * (dz * (1.0 - dz)).sqrt();
        if s1 < 1e-12 || s2 < 1e-12 {
            return 0.0;
        }
        self.rho_prime() / (s1 * s2)
    }

    /// Marginal law of one chain with flip probability `delta` (flat index,
    /// first letter most significant, bit 0 ↦ -1).
    fn chain_law(&self, delta: f64) -> Vec<f64> {
        let n = index::pow(2, self.d);
        (0..n)
            .map(|x| {
                let mut p = 0.5;
                for i in 2..=self.d {
                    let prev = (x >> (self.d - i + 1)) & 1;
                    let cur = (x >> (self.d - i)) & 1;
                    p *= if prev != cur { delta } else { 1.0 - delta };
                }
                p
            })
            .collect()
    }

    /// Exact joint law over sequence pairs, `pmf[x * 2^d + y]`.
    pub fn joint_pmf(&self) -> Result<Vec<f64>> {
        if self.d > 12 {
            return Err(Error::SizeCap("markov joint enumerates 4^d states".into()));
        }
        let d = self.d;
        let n = index::pow(2, d);
        let dx = self.delta_x;
        let dy = self.delta_y;
        // P(flip_x, flip_y) table
        let t = |fx: usize, fy: usize| -> f64 {
            match (fx, fy) {
                (1, 1) => dx * (1.0 - dy),
                (1, 0) => dx * dy,
                (0, 1) => (1.0 - dx) * dy,
                _ => (1.0 - dx) * (1.0 - dy),
            }
        };
        let mut pmf = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                let x1 = (x >> (d - 1)) & 1;
                let y1 = (y >> (d - 1)) & 1;
                if x1 != y1 {
                    continue;
                }
                let mut p = 0.5;
                for i in 2..=d {
                    let fx = ((x >> (d - i + 1)) & 1) ^ ((x >> (d - i)) & 1);
                    let fy = ((y >> (d - i + 1)) & 1) ^ ((y >> (d - i)) & 1);
                    p *= t(fx, fy);
                }
                pmf[x * n + y] = p;
            }
        }
        Ok(pmf)
    }
}

/// Orthonormal family tabulated on sequence space with its measure.
#[derive(Debug, Clone)]
pub struct SequenceBasis {
    /// Sequence length.
    pub d: usize,
    /// `phi[s][x]` where `s` is the subset index.
    pub phi: Vec<Vec<f64>>,
    /// Sequence-space measure.
    pub weights: Vec<f64>,
}

impl SequenceBasis {
    /// Max deviation from `E[phi_S phi_T] = 1(S=T)` under the measure.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.phi.len();
        let mut worst = 0.0f64;
        for s in 0..n {
            for t in s..n {
                let e: f64 = (0..n)
                    .map(|x| self.weights[x] * self.phi[s][x] * self.phi[t][x])
                    .sum();
                let target = if s == t { 1.0 } else { 0.0 };
                worst = worst.max((e - target).abs());
            }
        }
        worst
    }

    /// Coefficients of a value table under the basis and measure.
    pub fn to_coeffs(&self, values: &[f64]) -> Vec<f64> {
        let n = self.phi.len();
        (0..n)
            .map(|s| {
                (0..n)
                    .map(|x| self.weights[x] * values[x] * self.phi[s][x])
                    .sum()
            })
            .collect()
    }
}

/// The Markov sequence bases with their correlation structure.
#[derive(Debug, Clone)]
pub struct MarkovBasisPair {
    /// Basis on the X sequences.
    pub basis_x: SequenceBasis,
    /// Basis on the Y sequences.
    pub basis_y: SequenceBasis,
    /// Per-coordinate correlations: `rho[0] = 1` (the shared first bit),
    /// `rho[i] = ρ'/(σ1 σ2)` for the transition coordinates.
    pub rho: Vec<f64>,
    /// Standard deviation of `X_{i-1} X_i`.
    pub sigma1: f64,
    /// Standard deviation of `Y_{i-1} Y_i`.
    pub sigma2: f64,
}

fn bit_pm1(x: usize, d: usize, coord: usize) -> f64 {
    if (x >> (d - coord)) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Builds the Markov bases from the closed-form `ψ` families:
/// `ψ_1(x) = x_1`, `ψ_i(x) = (x_{i-1} x_i - (1 - 2δ))/σ`.
pub fn markov_basis(src: &MarkovSource) -> Result<MarkovBasisPair> {
    if src.d > 10 {
        return Err(Error::SizeCap("sequence basis tabulates 4^d values".into()));
    }
    let dz = src.delta_z();
    let sigma1 = 2.0 * (src.delta_x * (1.0 - src.delta_x)).sqrt();
    let sigma2 = 2.0 * (dz * (1.0 - dz)).sqrt();
    if sigma1 < 1e-9 || sigma2 < 1e-9 {
        return Err(Error::Degenerate(
            "transition variable has zero variance (delta in {0, 1})".into(),
        ));
    }
    let d = src.d;
    let n = index::pow(2, d);
    let build = |mean: f64, sigma: f64, weights: Vec<f64>| -> SequenceBasis {
        // per-coordinate psi values at each sequence
        let psi = |i: usize, x: usize| -> f64 {
            if i == 1 {
                bit_pm1(x, d, 1)
            } else {
                (bit_pm1(x, d, i - 1) * bit_pm1(x, d, i) - mean) / sigma
            }
        };
        let mut phi = vec![vec![0.0; n]; n];
        for s in 0..n {
            let subset = index::index_to_subset(s, d);
            for (x, v) in phi[s].iter_mut().enumerate() {
                *v = subset.iter().map(|&i| psi(i, x)).product();
            }
        }
        SequenceBasis { d, phi, weights }
    };
    let basis_x = build(
        1.0 - 2.0 * src.delta_x,
        sigma1,
        src.chain_law(src.delta_x),
    );
    let basis_y = build(1.0 - 2.0 * dz, sigma2, src.chain_law(dz));
    let mut rho = vec![src.rho_coordinate(); d];
    rho[0] = 1.0;
    Ok(MarkovBasisPair {
        basis_x,
        basis_y,
        rho,
        sigma1,
        sigma2,
    })
}

/// Gram-Schmidt fallback: orthonormalizes the uniform-IID parities under the
/// Markov chain law (the route available when no closed form is known).
pub fn markov_basis_gram_schmidt(src: &MarkovSource) -> Result<SequenceBasis> {
    if src.d > 8 {
        return Err(Error::SizeCap("GS fallback is quadratic in 2^d".into()));
    }
    let d = src.d;
    let n = index::pow(2, d);
    let weights = src.chain_law(src.delta_x);
    // seeds: uniform parities in subset-index order (constant first)
    let mut phi: Vec<Vec<f64>> = Vec::with_capacity(n);
    let dot = |a: &[f64], b: &[f64], w: &[f64]| -> f64 {
        a.iter().zip(b).zip(w).map(|((x, y), wi)| wi * x * y).sum()
    };
    for s in 0..n {
        let subset = index::index_to_subset(s, d);
        let mut seed: Vec<f64> = (0..n)
            .map(|x| subset.iter().map(|&i| bit_pm1(x, d, i)).product())
            .collect();
        for prev in &phi {
            let c = dot(&seed, prev, &weights);
            for (sv, pv) in seed.iter_mut().zip(prev) {
                *sv -= c * pv;
            }
        }
        let norm = dot(&seed, &seed, &weights).sqrt();
        if norm < 1e-10 {
            return Err(Error::DegenerateBasis(
                "uniform parity became dependent under the chain law".into(),
            ));
        }
        for v in seed.iter_mut() {
            *v /= norm;
        }
        phi.push(seed);
    }
    Ok(SequenceBasis { d, phi, weights })
}

/// `E[f(X^d) g(Y^d)]` from sequence-basis coefficients:
/// `Σ_S f_S g_S r^{|S| - 1(1 ∈ S)}` with `r = ρ'/(σ1 σ2)` (the correlation
/// of the normalized transition functions; the unnormalized covariance ρ'
/// would only be correct for unnormalized products).
pub fn markov_inner_product(
    f_coeffs: &[f64],
    g_coeffs: &[f64],
    src: &MarkovSource,
) -> Result<f64> {
    let d = src.d;
    let n = index::pow(2, d);
    if f_coeffs.len() != n || g_coeffs.len() != n {
        return Err(Error::Dimension("coefficient length mismatch".into()));
    }
    let rp = src.rho_coordinate();
    let mut acc = 0.0;
    for s in 0..n {
        let w = index::weight(s, 2, d) as i32;
        let first = i32::from((s >> (d - 1)) & 1 == 1);
        acc += f_coeffs[s] * g_coeffs[s] * rp.powi(w - first);
    }
    Ok(acc)
}

/// Exploratory: runs the path-following solver on the Markov kernel
/// (per-coordinate `diag(1, ρ_i)` structure over the sequence bases).
pub fn markov_fpath(
    src: &MarkovSource,
    qu1: f64,
    qv1: f64,
    cfg: &FPathConfig,
) -> Result<FPathState> {
    let pair = markov_basis(src)?;
    let mats: Vec<CrossCorrelationMatrix> = pair
        .rho
        .iter()
        .map(|&r| CrossCorrelationMatrix::diagonal(&[1.0, r]))
        .collect();
    let kernel = RhoKernel::per_coordinate(mats)?;
    let problem = Problem::new(
        kernel,
        SideRep::Dense {
            phi: pair.basis_x.phi.clone(),
            weights: pair.basis_x.weights.clone(),
        },
        SideRep::Dense {
            phi: pair.basis_y.phi.clone(),
            weights: pair.basis_y.weights.clone(),
        },
        2.0 * qu1 - 1.0,
        2.0 * qv1 - 1.0,
    );
    crate::fpath::solve_generic(problem, src.d, 2, cfg)
}

/// CSV table of the shared-bit achievable region over a bias grid:
/// `a,b,zeta,beta,agree_lo,agree_hi`.
pub fn cr_region_csv(grid_steps: usize) -> Result<String> {
    use std::fmt::Write as _;
    let mut out = String::from("a,b,zeta,beta,agree_lo,agree_hi\n");
    for i in 0..=grid_steps {
        for j in 0..=grid_steps {
            let a = i as f64 / grid_steps as f64;
            let b = j as f64 / grid_steps as f64;
            let r = cr_region(a, b)?;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                crate::cli::fmt12(a),
                crate::cli::fmt12(b),
                crate::cli::fmt12(r.zeta),
                crate::cli::fmt12(r.beta),
                crate::cli::fmt12(r.agree_lo),
                crate::cli::fmt12(r.agree_hi)
            );
        }
    }
    Ok(out)
}

/// CSV curve of the Bell measurement agreement probability against the
/// analyzer angle difference: `delta,agreement`.
pub fn bell_curve_csv(points: usize) -> Result<String> {
    use std::fmt::Write as _;
    let mut out = String::from("delta,agreement\n");
    for i in 0..=points {
        let delta = std::f64::consts::PI * i as f64 / points as f64;
        let j = bell_measurement_joint(0.0, delta)?;
        let _ = writeln!(
            out,
            "{},{}",
            crate::cli::fmt12(delta),
            crate::cli::fmt12(j.prob(0, 0) + j.prob(1, 1))
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn cr_region_examples() {
        // a = b = 1/2: one shared fair bit covers the full agreement range
        let r = cr_region(0.5, 0.5).unwrap();
        assert!((r.zeta - 1.0).abs() < 1e-15);
        assert!((r.beta - 1.0).abs() < 1e-15);
        assert!((r.agree_lo - 0.0).abs() < 1e-15);
        assert!((r.agree_hi - 1.0).abs() < 1e-15);
        // a = 0: deterministic U, degenerate interval at independence
        let r = cr_region(0.0, 0.3).unwrap();
        assert!(r.beta.abs() < 1e-15);
        assert!((r.agree_hi - r.agree_lo).abs() < 1e-15);
        // a = b = 1/4
        let r = cr_region(0.25, 0.25).unwrap();
        assert!((r.zeta - 0.75).abs() < 1e-15);
        assert!((r.beta - 0.25).abs() < 1e-15);
        assert!((r.agree_lo - 0.5).abs() < 1e-15);
        assert!((r.agree_hi - 0.75).abs() < 1e-15);
    }

    #[test]
    fn cr_endpoints_attained_exactly() {
        for (a, b) in [(0.25, 0.25), (0.3, 0.65), (0.5, 0.5)] {
            let r = cr_region(a, b).unwrap();
            let hi = cr_exact_joint(a, b, r.f1_max, r.g1_max).unwrap();
            assert!((hi.agreement() - r.agree_hi).abs() < 1e-12);
            let lo = cr_exact_joint(a, b, r.f1_max, -r.g1_max).unwrap();
            assert!((lo.agreement() - r.agree_lo).abs() < 1e-12);
            // marginals preserved
            assert!((hi.marginal_u()[1] - a).abs() < 1e-12);
            assert!((hi.marginal_v()[1] - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cr_monte_carlo_hits_the_endpoint() {
        let (a, b) = (0.25, 0.25);
        let r = cr_region(a, b).unwrap();
        let emp = cr_monte_carlo(a, b, r.f1_max, r.g1_max, 200_000, 3).unwrap();
        let exact = cr_exact_joint(a, b, r.f1_max, r.g1_max).unwrap();
        let tv = emp.tv_to(&exact).unwrap();
        assert!(tv < emp.tv_tolerance_3sigma(&exact));
        let agree = emp.phat(0, 0) + emp.phat(1, 1);
        assert!((agree - r.agree_hi).abs() < 0.01);
    }

    #[test]
    fn bell_joint_examples() {
        // theta = theta': perfect agreement
        let j = bell_measurement_joint(0.7, 0.7).unwrap();
        assert!((j.prob(0, 0) - 0.5).abs() < 1e-12);
        assert!((j.prob(1, 1) - 0.5).abs() < 1e-12);
        // difference pi/4: independent uniform
        let j = bell_measurement_joint(0.0, std::f64::consts::FRAC_PI_4).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((j.prob(x, y) - 0.25).abs() < 1e-12);
            }
        }
        // random angles: completeness and uniform marginals
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(41);
        for _ in 0..50 {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let tp: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let j = bell_measurement_joint(t, tp).unwrap();
            assert!(j.has_uniform_marginals(1e-12));
        }
    }

    #[test]
    fn bell_inside_cr_region() {
        // the Bell joint's agreement stays inside the a=b=1/2 shared-bit band
        let r = cr_region(0.5, 0.5).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        for _ in 0..50 {
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let tp: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let j = bell_measurement_joint(t, tp).unwrap();
            let agree = j.prob(0, 0) + j.prob(1, 1);
            assert!(agree >= r.agree_lo - 1e-12 && agree <= r.agree_hi + 1e-12);
        }
    }

    #[test]
    fn markov_joint_properties() {
        // d=1: a single shared fair bit
        let src = MarkovSource::new(0.3, 0.2, 1).unwrap();
        let pmf = src.joint_pmf().unwrap();
        assert_eq!(pmf, vec![0.5, 0.0, 0.0, 0.5]);
        // delta = 0: constant runs, perfectly correlated
        let src = MarkovSource::new(0.0, 0.0, 3).unwrap();
        let pmf = src.joint_pmf().unwrap();
        let n = 8;
        assert!((pmf[0] - 0.5).abs() < 1e-15);
        assert!((pmf[(n - 1) * n + (n - 1)] - 0.5).abs() < 1e-15);
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // random deltas at d=3: sums to 1, uniform letter marginals,
        // Markov property via conditional factorization
        let src = MarkovSource::new(0.37, 0.21, 3).unwrap();
        let pmf = src.joint_pmf().unwrap();
        assert!((pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let d = 3;
        for i in 1..=d {
            // each X_i is uniform
            let mut p1 = 0.0;
            for x in 0..n {
                if (x >> (d - i)) & 1 == 1 {
                    for y in 0..n {
                        p1 += pmf[x * n + y];
                    }
                }
            }
            assert!((p1 - 0.5).abs() < 1e-12, "X_{i} not uniform: {p1}");
        }
        // factorization: P(x) = 1/2 prod transition(delta_x)
        let law = src.chain_law(src.delta_x);
        for x in 0..n {
            let px: f64 = (0..n).map(|y| pmf[x * n + y]).sum();
            assert!((px - law[x]).abs() < 1e-12);
        }
    }

    #[test]
    fn markov_basis_orthonormal_and_formula_consistent() {
        let src = MarkovSource::new(0.25, 0.25, 4).unwrap();
        let pair = markov_basis(&src).unwrap();
        assert!(pair.basis_x.orthonormality_defect() < 1e-10);
        assert!(pair.basis_y.orthonormality_defect() < 1e-10);
        // sigma1 = 2 sqrt(3/16) = sqrt(3)/2
        assert!((pair.sigma1 - 3f64.sqrt() / 2.0).abs() < 1e-12);
        // cross-orthogonality: E[phi_S phi'_T] = 1(S=T) prod rho_i
        let joint = src.joint_pmf().unwrap();
        let n = 16;
        let rp = src.rho_coordinate();
        for s in 0..n {
            for t in 0..n {
                let mut e = 0.0;
                for x in 0..n {
                    for y in 0..n {
                        e += joint[x * n + y] * pair.basis_x.phi[s][x] * pair.basis_y.phi[t][y];
                    }
                }
                let expect = if s == t {
                    let w = index::weight(s, 2, 4) as i32;
                    let first = i32::from((s >> 3) & 1 == 1);
                    rp.powi(w - first)
                } else {
                    0.0
                };
                assert!((e - expect).abs() < 1e-10, "s={s} t={t}: {e} vs {expect}");
            }
        }
    }

    #[test]
    fn markov_inner_product_matches_direct() {
        let src = MarkovSource::new(0.3, 0.15, 4).unwrap();
        let pair = markov_basis(&src).unwrap();
        let joint = src.joint_pmf().unwrap();
        let n = 16;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(43);
        for _ in 0..10 {
            let f: Vec<f64> = (0..n)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect();
            let g: Vec<f64> = (0..n)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect();
            let fc = pair.basis_x.to_coeffs(&f);
            let gc = pair.basis_y.to_coeffs(&g);
            let via_formula = markov_inner_product(&fc, &gc, &src).unwrap();
            let mut direct = 0.0;
            for x in 0..n {
                for y in 0..n {
                    direct += joint[x * n + y] * f[x] * g[y];
                }
            }
            assert!(
                (via_formula - direct).abs() < 1e-10,
                "{via_formula} vs {direct}"
            );
        }
    }

    #[test]
    fn rho_prime_decouples_at_half() {
        let src = MarkovSource::new(0.3, 0.5, 2).unwrap();
        assert!(src.rho_prime().abs() < 1e-15);
        assert!(src.rho_coordinate().abs() < 1e-15);
        // identity coupling: correlation 1 exactly (the covariance is not)
        let ident = MarkovSource::new(0.3, 0.0, 2).unwrap();
        assert!((ident.rho_coordinate() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_delta_rejected() {
        let src = MarkovSource::new(0.0, 0.3, 2).unwrap();
        assert!(matches!(markov_basis(&src), Err(Error::Degenerate(_))));
    }

    #[test]
    fn gram_schmidt_fallback_is_orthonormal() {
        let src = MarkovSource::new(0.3, 0.2, 4).unwrap();
        let gs = markov_basis_gram_schmidt(&src).unwrap();
        assert!(gs.orthonormality_defect() < 1e-10);
    }

    #[test]
    fn csv_exports_are_well_formed() {
        let region = cr_region_csv(4).unwrap();
        assert_eq!(region.lines().count(), 1 + 25);
        assert!(region.starts_with("a,b,zeta,beta,agree_lo,agree_hi"));
        let curve = bell_curve_csv(8).unwrap();
        assert_eq!(curve.lines().count(), 1 + 9);
        // agreement is 1 at delta = 0 and 0 at delta = pi/2
        let rows: Vec<&str> = curve.lines().skip(1).collect();
        let first: f64 = rows[0].split(',').nth(1).unwrap().parse().unwrap();
        let mid: f64 = rows[4].split(',').nth(1).unwrap().parse().unwrap();
        assert!((first - 1.0).abs() < 1e-9);
        assert!(mid.abs() < 1e-9);
    }

    #[test]
    fn markov_fpath_dominates_exhaustive_pairs() {
        // the continuous optimum must dominate every ±1 pair with matching
        // means on sequence space
        let src = MarkovSource::new(0.2, 0.15, 2).unwrap();
        let cfg = FPathConfig {
            d_lambda: 1e-3,
            ..FPathConfig::default()
        };
        let state = markov_fpath(&src, 0.5, 0.5, &cfg).unwrap();
        let joint = src.joint_pmf().unwrap();
        let wx = src.chain_law(src.delta_x);
        let wy = src.chain_law(src.delta_z());
        let n = 4;
        let mut best = -1.0f64;
        for fm in 0..(1usize << n) {
            let f: Vec<f64> = (0..n)
                .map(|x| if fm >> x & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            let mf: f64 = f.iter().zip(&wx).map(|(v, w)| v * w).sum();
            if mf.abs() > 1e-12 {
                continue;
            }
            for gm in 0..(1usize << n) {
                let g: Vec<f64> = (0..n)
                    .map(|y| if gm >> y & 1 == 1 { 1.0 } else { -1.0 })
                    .collect();
                let mg: f64 = g.iter().zip(&wy).map(|(v, w)| v * w).sum();
                if mg.abs() > 1e-12 {
                    continue;
                }
                let mut e = 0.0;
                for x in 0..n {
                    for y in 0..n {
                        e += joint[x * n + y] * f[x] * g[y];
                    }
                }
                best = best.max(e);
            }
        }
        assert!(best > 0.0, "no mean-zero pairs found");
        assert!(
            state.objective >= best - 1e-6,
            "fpath {} below exhaustive {best}",
            state.objective
        );
    }

    #[test]
    fn markov_fpath_runs_and_is_sane() {
        // exploratory wiring: solver output stays within the valid range and
        // beats the bias product on a correlated source
        let src = MarkovSource::new(0.2, 0.1, 3).unwrap();
        let cfg = FPathConfig {
            d_lambda: 1e-3,
            ..FPathConfig::default()
        };
        let state = markov_fpath(&src, 0.5, 0.5, &cfg).unwrap();
        assert!(state.objective > 0.2);
        assert!(state.objective <= 1.0 + 1e-9);
        assert!(state.max_box_violation < 1e-9);
    }
}
