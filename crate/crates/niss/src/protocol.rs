//! Executable simulating protocols.
//!
//! The randomization/derandomization (RD) machinery turns `[-1,1]`-valued
//! function families into finite-output samplers whose conditional law at
//! every input is exactly `(1 + f̃_u(x))/2`, preserving means and
//! cross-expectations. Gated two-stage coin protocols then mix a correlated
//! arm with an independent fallback: gating each agent with bias `λ` puts
//! weight `λ²` on the correlated arm, which walks the star segment between
//! a solver-found extreme and the product of the target marginals.
//!
//! All coins default to seeded pseudo-random draws with documented stream
//! splitting; an optional mode extracts them from extra source samples (von
//! Neumann unbiasing plus binary-expansion comparison) to mirror the
//! non-overlapping-samples construction faithfully.

use crate::distributions::{JointPmf, TargetPmf};
use crate::error::{Error, Result};
use crate::fourier::{inverse_transform, RealTable, TruthTable};
use crate::fpath::FPathState;
use crate::index;
use crate::maxcorr::{maximal_correlation_single_letter, PrimalInstance};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Pointwise tolerance on conditions (3)/(4).
pub const CONDITION_TOL: f64 = 1e-12;

/// A `[-1,1]`-valued family `(f̃_u)_{u ∈ U}` satisfying the randomized
/// function conditions: every value in `[-1, 1]` and `Σ_u f̃_u(x) = 2 - |U|`
/// at every point.
#[derive(Debug, Clone)]
pub struct RandomizedFunction {
    d: usize,
    q: usize,
    out_size: usize,
    tables: Vec<RealTable>,
}

impl RandomizedFunction {
    /// Validates and wraps a family indexed by the full output alphabet.
    pub fn new(tables: Vec<RealTable>) -> Result<Self> {
        if tables.len() < 2 {
            return Err(Error::Dimension("need at least two output symbols".into()));
        }
        let d = tables[0].d;
        let q = tables[0].q;
        if tables.iter().any(|t| t.d != d || t.q != q) {
            return Err(Error::Dimension("family tables differ in shape".into()));
        }
        let out_size = tables.len();
        let n = index::pow(q, d);
        for t in &tables {
            if t.values.iter().any(|v| v.abs() > 1.0 + CONDITION_TOL) {
                return Err(Error::ConditionViolation(
                    "value outside [-1, 1]".into(),
                ));
            }
        }
        let target = 2.0 - out_size as f64;
        for x in 0..n {
            let s: f64 = tables.iter().map(|t| t.values[x]).sum();
            if (s - target).abs() > 1e-9 {
                return Err(Error::ConditionViolation(format!(
                    "family sums to {s} at point {x}, expected {target}"
                )));
            }
        }
        Ok(Self {
            d,
            q,
            out_size,
            tables,
        })
    }

    /// Binary family from a single `[-1,1]` table: `f̃_1 = table`,
    /// `f̃_0 = -table`.
    pub fn binary(table: RealTable) -> Result<Self> {
        let neg = RealTable {
            d: table.d,
            q: table.q,
            values: table.values.iter().map(|v| -v).collect(),
        };
        Self::new(vec![neg, table])
    }

    /// Constant family carrying a fixed output pmf: `f̃_u ≡ 2 Q(u) - 1`.
    pub fn constant(d: usize, q: usize, pmf: &[f64]) -> Result<Self> {
        let tables = pmf
            .iter()
            .map(|&p| RealTable::constant(d, q, 2.0 * p - 1.0))
            .collect();
        Self::new(tables)
    }

    /// Deterministic family from a finite-output truth table.
    pub fn deterministic(t: &TruthTable) -> Result<Self> {
        Self::new(crate::fourier::indicator_decompose(t))
    }

    /// Block length.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Input alphabet size.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Output alphabet size.
    pub fn out_size(&self) -> usize {
        self.out_size
    }

    /// `f̃_u(x)`.
    pub fn value(&self, u: usize, x: usize) -> f64 {
        self.tables[u].values[x]
    }

    /// The family's tables.
    pub fn tables(&self) -> &[RealTable] {
        &self.tables
    }

    /// Sequential coin biases at input `x`: coin `C_u` for `u = 1..|U|-1`
    /// has bias `(f̃_u(x) + 1) / (3 - (u+1) - Σ_{u' < u, u' >= 1} f̃_{u'}(x))`
    /// with `u` counted as its integer symbol value.
    pub fn coin_biases(&self, x: usize) -> Result<Vec<f64>> {
        let mut biases = Vec::with_capacity(self.out_size - 1);
        let mut partial = 0.0;
        for u in 1..self.out_size {
            let numer = self.value(u, x) + 1.0;
            let denom = 3.0 - u as f64 - partial;
            let b = if denom.abs() < 1e-12 {
                if numer.abs() > 1e-9 {
                    return Err(Error::ConditionViolation(format!(
                        "coin {u} at point {x}: bias {numer}/{denom} undefined"
                    )));
                }
                0.0
            } else {
                numer / denom
            };
            if !(-CONDITION_TOL..=1.0 + 1e-9).contains(&b) {
                return Err(Error::ConditionViolation(format!(
                    "coin {u} at point {x}: bias {b} outside [0, 1]"
                )));
            }
            biases.push(b.clamp(0.0, 1.0));
            partial += self.value(u, x);
        }
        Ok(biases)
    }

    /// Conditional output law at `x` computed through the coin cascade
    /// (must equal `(1 + f̃_u(x))/2` exactly; the RD preservation tests
    /// assert this).
    pub fn conditional_law_via_coins(&self, x: usize) -> Result<Vec<f64>> {
        let biases = self.coin_biases(x)?;
        let mut law = vec![0.0; self.out_size];
        let mut none_heads = 1.0;
        for (k, &b) in biases.iter().enumerate() {
            law[k + 1] = b * none_heads;
            none_heads *= 1.0 - b;
        }
        law[0] = none_heads;
        Ok(law)
    }

    /// Conditional output law `(1 + f̃_u(x)) / 2`.
    pub fn conditional_law(&self, x: usize) -> Vec<f64> {
        (0..self.out_size)
            .map(|u| (1.0 + self.value(u, x)) / 2.0)
            .collect()
    }

    /// Draws an output symbol at `x` using the sequential coin scheme:
    /// coins `C_u` in symbol order, output the smallest `u` whose coin came
    /// up heads, defaulting to 0.
    pub fn sample(&self, x: usize, coins: &mut CoinSource<'_>) -> Result<usize> {
        let biases = self.coin_biases(x)?;
        for (k, &b) in biases.iter().enumerate() {
            if coins.flip(b)? {
                return Ok(k + 1);
            }
        }
        Ok(0)
    }
}

/// Validates a binary `[-1,1]` table and wraps it as a stochastic sampler
/// whose conditional mean at every input equals the table value.
pub fn derandomize_binary(ft: &RealTable) -> Result<RandomizedFunction> {
    RandomizedFunction::binary(ft.clone())
}

/// Validates a finite family (conditions (3)/(4)) and returns the sampler.
pub fn derandomize_finite(tables: Vec<RealTable>) -> Result<RandomizedFunction> {
    RandomizedFunction::new(tables)
}

/// How protocol coins are produced.
pub enum CoinSource<'a> {
    /// Seeded pseudo-random draws (default).
    Prng(&'a mut ChaCha12Rng),
    /// Coins distilled from extra source samples: von Neumann pairs for fair
    /// bits, binary-expansion comparison for biased coins. Binary sources
    /// only.
    VonNeumann {
        /// Stream of raw source samples.
        rng: &'a mut ChaCha12Rng,
        /// `P(sample = 1)` of the source being consumed.
        p1: f64,
    },
}

impl CoinSource<'_> {
    /// Flips a coin with success probability `p`.
    pub fn flip(&mut self, p: f64) -> Result<bool> {
        match self {
            CoinSource::Prng(rng) => Ok(rng.gen::<f64>() < p),
            CoinSource::VonNeumann { rng, p1 } => {
                // compare fair bits against the binary expansion of p
                let mut frac = p;
                for _ in 0..64 {
                    frac *= 2.0;
                    let digit = frac >= 1.0;
                    if digit {
                        frac -= 1.0;
                    }
                    let bit = von_neumann_bit(rng, *p1);
                    if bit != digit {
                        return Ok(!bit && digit);
                    }
                }
                Ok(false)
            }
        }
    }
}

/// Fair bit via von Neumann unbiasing of a `Be(p1)` stream.
fn von_neumann_bit(rng: &mut ChaCha12Rng, p1: f64) -> bool {
    loop {
        let a = rng.gen::<f64>() < p1;
        let b = rng.gen::<f64>() < p1;
        if a != b {
            return a;
        }
    }
}

/// One agent's arm of a gated protocol.
#[derive(Debug, Clone)]
pub enum Arm {
    /// Data-dependent randomized function of the agent's block.
    Data(RandomizedFunction),
    /// Fixed output pmf, independent of the data.
    Fixed(Vec<f64>),
}

impl Arm {
    /// Conditional output law given the agent's input point.
    pub fn law(&self, x: usize) -> Result<Vec<f64>> {
        match self {
            Arm::Data(rf) => rf.conditional_law_via_coins(x),
            Arm::Fixed(pmf) => Ok(pmf.clone()),
        }
    }

    fn out_size(&self) -> usize {
        match self {
            Arm::Data(rf) => rf.out_size(),
            Arm::Fixed(pmf) => pmf.len(),
        }
    }

    fn sample(&self, x: usize, coins: &mut CoinSource<'_>) -> Result<usize> {
        match self {
            Arm::Data(rf) => rf.sample(x, coins),
            Arm::Fixed(pmf) => {
                // sequential coins over the pmf, same cascade convention
                let mut rest = 1.0;
                for (u, &p) in pmf.iter().enumerate().skip(1) {
                    let b = if rest > 1e-12 { p / rest } else { 0.0 };
                    if coins.flip(b.clamp(0.0, 1.0))? {
                        return Ok(u);
                    }
                    rest -= p;
                }
                Ok(0)
            }
        }
    }
}

/// Two-stage gated coin protocol: with probability `λ` (independently per
/// agent) the inner arm answers, otherwise the fallback.
#[derive(Debug, Clone)]
pub struct CoinProtocol {
    /// Gate bias; the correlated arm carries weight `λ²` in the mixture.
    pub gate_lambda: f64,
    /// Alice's correlated arm.
    pub x_inner: Arm,
    /// Alice's independent fallback.
    pub x_fallback: Arm,
    /// Bob's correlated arm.
    pub y_inner: Arm,
    /// Bob's independent fallback.
    pub y_fallback: Arm,
    /// Block length consumed by the data arms.
    pub d: usize,
}

impl CoinProtocol {
    /// Output alphabet sizes.
    pub fn out_sizes(&self) -> (usize, usize) {
        (self.x_inner.out_size(), self.y_inner.out_size())
    }

    /// Exact output joint distribution under `joint^d`, by enumeration.
    pub fn exact_output_joint(&self, joint: &JointPmf) -> Result<TargetPmf> {
        let (qu, qv) = self.out_sizes();
        let qx = joint.qx();
        let qy = joint.qy();
        let nx = index::pow(qx, self.d);
        let ny = index::pow(qy, self.d);
        if nx.saturating_mul(ny) > crate::oracle::EXPECTATION_TERM_CAP {
            return Err(Error::SizeCap("protocol enumeration too large".into()));
        }
        let lam = self.gate_lambda;
        let mut cells = vec![0.0; qu * qv];
        // per-x mixed laws for each agent
        let mut x_laws = Vec::with_capacity(nx);
        for x in 0..nx {
            let inner = self.x_inner.law(x)?;
            let fall = self.x_fallback.law(x)?;
            let mixed: Vec<f64> = inner
                .iter()
                .zip(&fall)
                .map(|(i, f)| lam * i + (1.0 - lam) * f)
                .collect();
            x_laws.push(mixed);
        }
        let mut y_laws = Vec::with_capacity(ny);
        for y in 0..ny {
            let inner = self.y_inner.law(y)?;
            let fall = self.y_fallback.law(y)?;
            let mixed: Vec<f64> = inner
                .iter()
                .zip(&fall)
                .map(|(i, f)| lam * i + (1.0 - lam) * f)
                .collect();
            y_laws.push(mixed);
        }
        for x in 0..nx {
            let xd = index::digits(x, qx, self.d);
            for y in 0..ny {
                let mut w = 1.0;
                let mut rest = y;
                for i in (0..self.d).rev() {
                    w *= joint.prob(xd[i], rest % qy);
                    rest /= qy;
                }
                if w == 0.0 {
                    continue;
                }
                for u in 0..qu {
                    for v in 0..qv {
                        cells[u * qv + v] += w * x_laws[x][u] * y_laws[y][v];
                    }
                }
            }
        }
        TargetPmf::new(qu, qv, cells)
    }
}

/// Protocol achieving a symmetric-output target correlation on binary
/// outputs: gate `λ = sqrt(|target| / rho*)`, inner arms built from the
/// single-letter optimal pair, fair-coin fallbacks.
pub fn coin_protocol_uniform_output(joint: &JointPmf, target_rho: f64) -> Result<CoinProtocol> {
    let sl = maximal_correlation_single_letter(joint)?;
    if target_rho.abs() > sl.value + 1e-12 {
        return Err(Error::InfeasibleTarget(format!(
            "target correlation {target_rho} exceeds the achievable {}",
            sl.value
        )));
    }
    let lambda = if sl.value > 1e-15 {
        (target_rho.abs() / sl.value).sqrt()
    } else {
        0.0
    };
    let bx = crate::fourier::OrthonormalBasis::default_for(&joint.marginal_x())?;
    let by = crate::fourier::OrthonormalBasis::default_for(&joint.marginal_y())?;
    let ft = inverse_transform(&sl.f_coeffs, &bx)?;
    let mut gt = inverse_transform(&sl.g_coeffs, &by)?;
    if target_rho < 0.0 {
        for v in gt.values.iter_mut() {
            *v = -*v;
        }
    }
    Ok(CoinProtocol {
        gate_lambda: lambda,
        x_inner: Arm::Data(RandomizedFunction::binary(clamp_table(ft)?)?),
        y_inner: Arm::Data(RandomizedFunction::binary(clamp_table(gt)?)?),
        x_fallback: Arm::Fixed(vec![0.5, 0.5]),
        y_fallback: Arm::Fixed(vec![0.5, 0.5]),
        d: 1,
    })
}

fn clamp_table(mut t: RealTable) -> Result<RealTable> {
    for v in t.values.iter_mut() {
        if v.abs() > 1.0 + crate::maxcorr::BOX_TOL {
            return Err(Error::ConditionViolation(format!(
                "table value {v} outside [-1, 1]"
            )));
        }
        *v = v.clamp(-1.0, 1.0);
    }
    Ok(t)
}

/// Protocol for a binary target with fixed marginals and agreement
/// probability: the solver pair is the correlated arm, biased coins carrying
/// the target marginals are the fallback, and the gate interpolates the star
/// segment (`λ² = (e_t - μν)/(e* - μν)`).
pub fn coin_protocol_fb(
    inst: &PrimalInstance,
    target_agreement: f64,
    state: &FPathState,
) -> Result<CoinProtocol> {
    let mu = inst.q_u_bias();
    let nu = inst.q_v_bias();
    let e_target = 2.0 * target_agreement - 1.0;
    let e_star = state.objective;
    let denom = e_star - mu * nu;
    let w = if denom.abs() < 1e-12 {
        if (e_target - mu * nu).abs() > 1e-9 {
            return Err(Error::InfeasibleTarget(
                "solver pair carries no correlation beyond the bias product".into(),
            ));
        }
        0.0
    } else {
        (e_target - mu * nu) / denom
    };
    if !(-1e-9..=1.0 + 1e-9).contains(&w) {
        return Err(Error::InfeasibleTarget(format!(
            "target agreement needs mixture weight {w}; achievable range is \
             [{}, {}] given rho_b = {e_star}",
            mu * nu,
            e_star
        )));
    }
    let lambda = w.clamp(0.0, 1.0).sqrt();
    let ft = clamp_table(inverse_transform(&state.f, inst.basis_x())?)?;
    let gt = clamp_table(inverse_transform(&state.g, inst.basis_y())?)?;
    let qu1 = (1.0 + mu) / 2.0;
    let qv1 = (1.0 + nu) / 2.0;
    Ok(CoinProtocol {
        gate_lambda: lambda,
        x_inner: Arm::Data(RandomizedFunction::binary(ft)?),
        y_inner: Arm::Data(RandomizedFunction::binary(gt)?),
        x_fallback: Arm::Fixed(vec![1.0 - qu1, qu1]),
        y_fallback: Arm::Fixed(vec![1.0 - qv1, qv1]),
        d: inst.d(),
    })
}

/// Protocol for a general finite-output target: gates between a family
/// achieving the extreme of the target's direction and per-agent samplers of
/// the target marginals, with `λ = sqrt(t(Q')/t_achieved)`.
pub fn coin_protocol_ff(
    joint: &JointPmf,
    target: &TargetPmf,
    f_family: &RandomizedFunction,
    g_family: &RandomizedFunction,
) -> Result<CoinProtocol> {
    if f_family.out_size() != target.qu() || g_family.out_size() != target.qv() {
        return Err(Error::Dimension("family/target output sizes differ".into()));
    }
    let d = f_family.d();
    // effective joint of the achieved pair
    let achieved = achieved_expectations(joint, d, f_family, g_family)?;
    let qu = target.marginal_u();
    let qv = target.marginal_v();
    // marginals must match: the gate preserves them only then
    let ach_qu: Vec<f64> = achieved.mu.iter().map(|m| (1.0 + m) / 2.0).collect();
    let ach_qv: Vec<f64> = achieved.nu.iter().map(|m| (1.0 + m) / 2.0).collect();
    for (a, b) in ach_qu.iter().zip(&qu) {
        if (a - b).abs() > 1e-6 {
            return Err(Error::InfeasibleTarget(
                "achieved family marginals do not match the target's".into(),
            ));
        }
    }
    for (a, b) in ach_qv.iter().zip(&qv) {
        if (a - b).abs() > 1e-6 {
            return Err(Error::InfeasibleTarget(
                "achieved family marginals do not match the target's".into(),
            ));
        }
    }
    let lambda = match crate::maxcorr::direction_of_target(target) {
        None => 0.0,
        Some((alpha_t, t_t)) => {
            // achieved centered vector and its directional coordinate
            let (qu_n, qv_n) = (target.qu(), target.qv());
            let mut beta_a = Vec::with_capacity((qu_n - 1) * (qv_n - 1));
            for u in 1..qu_n {
                for v in 1..qv_n {
                    beta_a.push(achieved.e(u, v) - achieved.mu[u] * achieved.nu[v]);
                }
            }
            let t_a: f64 = beta_a.iter().map(|b| b * b).sum();
            if t_a < 1e-18 {
                return Err(Error::InfeasibleTarget(
                    "achieved family is uncorrelated; cannot reach a directed target".into(),
                ));
            }
            // direction alignment: unit vectors must agree
            let na = t_a.sqrt();
            let nt = t_t.sqrt();
            for (i, b) in beta_a.iter().enumerate() {
                let unit_t = alpha_t.alpha[i] * t_t / nt;
                if (b / na - unit_t).abs() > 1e-6 {
                    return Err(Error::InfeasibleTarget(format!(
                        "target direction differs from the achieved one at index {i}"
                    )));
                }
            }
            let w = nt / na; // β_target = w · β_achieved
            if w > 1.0 + 1e-9 {
                return Err(Error::InfeasibleTarget(format!(
                    "target magnitude {nt} exceeds the achieved {na}"
                )));
            }
            w.min(1.0).sqrt()
        }
    };
    Ok(CoinProtocol {
        gate_lambda: lambda,
        x_inner: Arm::Data(f_family.clone()),
        y_inner: Arm::Data(g_family.clone()),
        x_fallback: Arm::Fixed(qu),
        y_fallback: Arm::Fixed(qv),
        d,
    })
}

/// Exact centered expectations of a randomized family pair under `joint^d`.
fn achieved_expectations(
    joint: &JointPmf,
    d: usize,
    f_family: &RandomizedFunction,
    g_family: &RandomizedFunction,
) -> Result<crate::distributions::ExpectationVector> {
    let nx = index::pow(joint.qx(), d);
    let ny = index::pow(joint.qy(), d);
    if nx.saturating_mul(ny) > crate::oracle::EXPECTATION_TERM_CAP {
        return Err(Error::SizeCap("family expectation enumeration".into()));
    }
    let qu = f_family.out_size();
    let qv = g_family.out_size();
    let mut e = vec![0.0; qu * qv];
    let qy = joint.qy();
    for x in 0..nx {
        let xd = index::digits(x, joint.qx(), d);
        for y in 0..ny {
            let mut w = 1.0;
            let mut rest = y;
            for i in (0..d).rev() {
                w *= joint.prob(xd[i], rest % qy);
                rest /= qy;
            }
            for u in 0..qu {
                for v in 0..qv {
                    e[u * qv + v] += w * f_family.value(u, x) * g_family.value(v, y);
                }
            }
        }
    }
    // means under the respective marginals
    let wx: Vec<f64> = {
        let mx = joint.marginal_x();
        (0..nx)
            .map(|x| {
                let mut w = 1.0;
                let mut rest = x;
                for _ in 0..d {
                    w *= mx[rest % joint.qx()];
                    rest /= joint.qx();
                }
                w
            })
            .collect()
    };
    let wy: Vec<f64> = {
        let my = joint.marginal_y();
        (0..ny)
            .map(|y| {
                let mut w = 1.0;
                let mut rest = y;
                for _ in 0..d {
                    w *= my[rest % qy];
                    rest /= qy;
                }
                w
            })
            .collect()
    };
    let mu: Vec<f64> = (0..qu)
        .map(|u| (0..nx).map(|x| wx[x] * f_family.value(u, x)).sum())
        .collect();
    let nu: Vec<f64> = (0..qv)
        .map(|v| (0..ny).map(|y| wy[y] * g_family.value(v, y)).sum())
        .collect();
    Ok(crate::distributions::ExpectationVector { e, mu, nu })
}

/// Empirical joint with confidence half-widths.
#[derive(Debug, Clone)]
pub struct EmpiricalJoint {
    /// Output alphabet sizes.
    pub qu: usize,
    /// Second output alphabet size.
    pub qv: usize,
    /// Cell counts, row-major.
    pub counts: Vec<u64>,
    /// Number of samples.
    pub n: u64,
}

impl EmpiricalJoint {
    /// Empirical cell probability.
    pub fn phat(&self, u: usize, v: usize) -> f64 {
        self.counts[u * self.qv + v] as f64 / self.n as f64
    }

    /// Empirical pmf vector.
    pub fn phat_vec(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.n as f64)
            .collect()
    }

    /// Unhalved TV distance to a target.
    pub fn tv_to(&self, target: &TargetPmf) -> Result<f64> {
        crate::distributions::tv_distance_raw(&self.phat_vec(), target.entries())
    }

    /// `Σ_cells 3 sqrt(q(1-q)/n)`: the 3-sigma-per-cell TV tolerance.
    pub fn tv_tolerance_3sigma(&self, target: &TargetPmf) -> f64 {
        target
            .entries()
            .iter()
            .map(|&p| 3.0 * (p * (1.0 - p) / self.n as f64).sqrt())
            .sum()
    }

    /// Empirical `E[UV]` with outputs embedded as `{-1, +1}` (binary only).
    pub fn correlation_pm1(&self) -> f64 {
        let mut acc = 0.0;
        for u in 0..self.qu {
            for v in 0..self.qv {
                let su = if u == 1 { 1.0 } else { -1.0 };
                let sv = if v == 1 { 1.0 } else { -1.0 };
                acc += su * sv * self.phat(u, v);
            }
        }
        acc
    }
}

/// Which coin mode Monte-Carlo uses for protocol decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinMode {
    /// Seeded pseudo-random coins (default).
    Prng,
    /// Coins distilled from extra source samples (binary sources only).
    VonNeumann,
}

/// Seeded stream split: one master seed yields the five independent streams
/// (source, gate X, gate Y, coin X, coin Y), in that fixed order.
fn split_streams(seed: u64) -> [ChaCha12Rng; 5] {
    let mut master = ChaCha12Rng::seed_from_u64(seed);
    [
        ChaCha12Rng::seed_from_u64(master.next_u64()),
        ChaCha12Rng::seed_from_u64(master.next_u64()),
        ChaCha12Rng::seed_from_u64(master.next_u64()),
        ChaCha12Rng::seed_from_u64(master.next_u64()),
        ChaCha12Rng::seed_from_u64(master.next_u64()),
    ]
}

/// Draws one `(x^d, y^d)` pair from `joint^d`, returned as flat indices.
fn sample_pair(joint: &JointPmf, d: usize, rng: &mut ChaCha12Rng) -> (usize, usize) {
    let qx = joint.qx();
    let qy = joint.qy();
    let mut x = 0usize;
    let mut y = 0usize;
    for _ in 0..d {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut cell = qx * qy - 1;
        'outer: for a in 0..qx {
            for b in 0..qy {
                acc += joint.prob(a, b);
                if r < acc {
                    cell = a * qy + b;
                    break 'outer;
                }
            }
        }
        x = x * qx + cell / qy;
        y = y * qy + cell % qy;
    }
    (x, y)
}

/// Runs a gated protocol for `n` samples; bit-reproducible per seed.
pub fn monte_carlo_protocol(
    protocol: &CoinProtocol,
    joint: &JointPmf,
    n: u64,
    seed: u64,
    mode: CoinMode,
) -> Result<EmpiricalJoint> {
    if n == 0 {
        return Err(Error::Dimension("need at least one sample".into()));
    }
    let (qu, qv) = protocol.out_sizes();
    let mut counts = vec![0u64; qu * qv];
    let [mut src, mut gate_x, mut gate_y, mut coin_x, mut coin_y] = split_streams(seed);
    let px1 = joint.marginal_x().get(1).copied().unwrap_or(0.5);
    let py1 = joint.marginal_y().get(1).copied().unwrap_or(0.5);
    for _ in 0..n {
        let (x, y) = sample_pair(joint, protocol.d, &mut src);
        let u = {
            let mut gate = make_source(&mut gate_x, mode, joint, px1)?;
            let heads = gate.flip(protocol.gate_lambda)?;
            let mut coins = make_source(&mut coin_x, mode, joint, px1)?;
            if heads {
                protocol.x_inner.sample(x, &mut coins)?
            } else {
                protocol.x_fallback.sample(x, &mut coins)?
            }
        };
        let v = {
            let mut gate = make_source(&mut gate_y, mode, joint, py1)?;
            let heads = gate.flip(protocol.gate_lambda)?;
            let mut coins = make_source(&mut coin_y, mode, joint, py1)?;
            if heads {
                protocol.y_inner.sample(y, &mut coins)?
            } else {
                protocol.y_fallback.sample(y, &mut coins)?
            }
        };
        counts[u * qv + v] += 1;
    }
    Ok(EmpiricalJoint { qu, qv, counts, n })
}

fn make_source<'a>(
    rng: &'a mut ChaCha12Rng,
    mode: CoinMode,
    joint: &JointPmf,
    p1: f64,
) -> Result<CoinSource<'a>> {
    match mode {
        CoinMode::Prng => Ok(CoinSource::Prng(rng)),
        CoinMode::VonNeumann => {
            if joint.qx() != 2 || joint.qy() != 2 {
                return Err(Error::UnsupportedHypothesis(
                    "von Neumann extraction mode supports binary sources only".into(),
                ));
            }
            Ok(CoinSource::VonNeumann { rng, p1 })
        }
    }
}

/// Runs a deterministic table pair for `n` samples.
pub fn monte_carlo_pair(
    f: &TruthTable,
    g: &TruthTable,
    joint: &JointPmf,
    n: u64,
    seed: u64,
) -> Result<EmpiricalJoint> {
    if f.d != g.d {
        return Err(Error::Dimension("table lengths differ".into()));
    }
    if n == 0 {
        return Err(Error::Dimension("need at least one sample".into()));
    }
    let mut counts = vec![0u64; f.out_size * g.out_size];
    let [mut src, _, _, _, _] = split_streams(seed);
    for _ in 0..n {
        let (x, y) = sample_pair(joint, f.d, &mut src);
        counts[f.values[x] * g.out_size + g.values[y]] += 1;
    }
    Ok(EmpiricalJoint {
        qu: f.out_size,
        qv: g.out_size,
        counts,
        n,
    })
}
