//! Convex-concave path-following solver for the primal problem.
//!
//! The objective family interpolates a concave surrogate `L_0` and a convex
//! surrogate `L_1` of the bilinear primal:
//!
//! `L_λ(f, g) = B(f, g) + c_f(λ) Σf² + c_g(λ) Σg² + const(λ)`
//!
//! with `B = Σ f_{s^d} g_{t^d} Π rho_{s_i,t_i}`, `c_f(λ) = λα₁ - (1-λ)α₀`,
//! and `const(λ) = (1-λ)(α₀+β₀) - λ(α₁+β₁)`. On the coefficient sphere
//! `Σf² = Σg² = 1` the surrogates collapse to the primal objective, so `L_λ`
//! is constant in `λ` there and strictly decreasing in `λ` at interior
//! points.
//!
//! The inner maximization over the product polytope runs Frank-Wolfe with an
//! exact vertex rule and exact line search. Two departures from the naive
//! method are load-bearing:
//!
//! - the re-solve trigger compares the current objective to the one at the
//!   iterate's *own* solve point, so drift accumulates across skipped steps
//!   (a single-step comparison would never reach the threshold);
//! - the bias-only point is a stationary saddle of every `L_λ`, so when the
//!   Frank-Wolfe gap vanishes a deterministic set of seeded vertex pairs is
//!   probed and the best strictly improving pair is adopted.

use crate::error::{Error, Result};
use crate::fourier::{
    fourier_transform, inverse_transform, FourierVector, OrthonormalBasis, RealTable, RhoKernel,
};
use crate::maxcorr::{check_membership, PrimalInstance, BOX_TOL};

/// Solver hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FPathConfig {
    /// Concave surrogate weight on `Σf²`.
    pub alpha0: f64,
    /// Concave surrogate weight on `Σg²`.
    pub beta0: f64,
    /// Convex surrogate weight on `Σf²`.
    pub alpha1: f64,
    /// Convex surrogate weight on `Σg²`.
    pub beta1: f64,
    /// λ step.
    pub d_lambda: f64,
    /// Objective-drift threshold that triggers a re-solve.
    pub eps_lambda: f64,
    /// Frank-Wolfe iteration budget per re-solve.
    pub fw_max_iters: usize,
    /// Frank-Wolfe gap tolerance.
    pub fw_tol: f64,
}

impl Default for FPathConfig {
    fn default() -> Self {
        Self {
            alpha0: 1.0,
            beta0: 1.0,
            alpha1: 1.1,
            beta1: 1.1,
            d_lambda: 2e-5,
            eps_lambda: 0.04,
            fw_max_iters: 10_000,
            fw_tol: 1e-8,
        }
    }
}

impl FPathConfig {
    fn validate(&self) -> Result<()> {
        let pos = [
            self.alpha0,
            self.beta0,
            self.alpha1,
            self.beta1,
            self.d_lambda,
            self.eps_lambda,
            self.fw_tol,
        ];
        if pos.iter().any(|&v| v <= 0.0) {
            return Err(Error::ConstraintViolation(
                "all solver constants must be positive".into(),
            ));
        }
        if self.d_lambda > self.eps_lambda {
            return Err(Error::ConstraintViolation(
                "d_lambda must not exceed eps_lambda".into(),
            ));
        }
        Ok(())
    }
}

/// One row of the λ trace.
#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    /// λ at this step.
    pub lambda: f64,
    /// `L_λ` of the current iterate.
    pub objective: f64,
    /// Primal bilinear value of the current iterate.
    pub primal: f64,
    /// `Σ f_s²`.
    pub f_norm_sq: f64,
    /// `Σ g_s²`.
    pub g_norm_sq: f64,
    /// True when this step re-ran the inner solver.
    pub resolved: bool,
}

/// Optimality certificate per the sufficient conditions: the iterate reached
/// the coefficient sphere while `L_λ` was still concave.
#[derive(Debug, Clone, Copy)]
pub struct Certificate {
    /// λ at which the trace first shows both norms at 1 (within 1e-6).
    pub lambda_star: f64,
    /// Largest λ keeping `L_λ` concave on the bias-pinned subspace.
    pub lambda_concave: f64,
}

/// Coefficient snapshot taken at each re-solve.
#[derive(Debug, Clone)]
pub struct Snapshot {
    /// λ of the re-solve.
    pub lambda: f64,
    /// `f` coefficients after the re-solve.
    pub f: Vec<f64>,
    /// `g` coefficients after the re-solve.
    pub g: Vec<f64>,
}

/// Final solver state.
#[derive(Debug, Clone)]
pub struct FPathState {
    /// Final λ (always 1 on success).
    pub lambda: f64,
    /// Final `f` coefficients.
    pub f: FourierVector,
    /// Final `g` coefficients.
    pub g: FourierVector,
    /// Primal bilinear objective of the final iterate (the achieved value).
    pub objective: f64,
    /// `(Σf², Σg²)` of the final iterate.
    pub boundary_flags: (f64, f64),
    /// Per-step trace.
    pub trace: Vec<TraceRow>,
    /// Coefficients at each re-solve (the trace between snapshots is flat).
    pub snapshots: Vec<Snapshot>,
    /// Certificate, when the sufficient conditions were observed.
    pub certificate: Option<Certificate>,
    /// Largest pointwise box violation seen across re-solve iterates.
    pub max_box_violation: f64,
    /// Set when the surrogate weights had to be widened, with the new
    /// `(alpha0/beta0, alpha1/beta1)` values.
    pub widened_weights: Option<(f64, f64)>,
}

/// One side of the problem: transforms between coefficient and value space.
#[derive(Debug, Clone)]
pub(crate) enum SideRep {
    /// IID product basis.
    Product {
        /// Per-letter basis.
        basis: OrthonormalBasis,
        /// Block length.
        d: usize,
    },
    /// Explicit orthonormal family on sequence space (non-IID cases).
    Dense {
        /// `phi[s][x]`.
        phi: Vec<Vec<f64>>,
        /// Point measure.
        weights: Vec<f64>,
    },
}

impl SideRep {
    pub(crate) fn n(&self) -> usize {
        match self {
            SideRep::Product { basis, d } => crate::index::pow(basis.q(), *d),
            SideRep::Dense { phi, .. } => phi.len(),
        }
    }

    pub(crate) fn point_weights(&self) -> Vec<f64> {
        match self {
            SideRep::Product { basis, d } => {
                (0..self.n()).map(|x| basis.product_weight(x, *d)).collect()
            }
            SideRep::Dense { weights, .. } => weights.clone(),
        }
    }

    pub(crate) fn to_values(&self, coeffs: &[f64]) -> Vec<f64> {
        match self {
            SideRep::Product { basis, d } => {
                let v = FourierVector::new(*d, basis.q(), coeffs.to_vec()).expect("shape");
                inverse_transform(&v, basis).expect("shape").values
            }
            SideRep::Dense { phi, .. } => {
                let n = phi.len();
                (0..n)
                    .map(|x| (0..n).map(|s| coeffs[s] * phi[s][x]).sum())
                    .collect()
            }
        }
    }

    pub(crate) fn to_coeffs(&self, values: &[f64]) -> Vec<f64> {
        match self {
            SideRep::Product { basis, d } => {
                let t = RealTable::new(*d, basis.q(), values.to_vec()).expect("shape");
                fourier_transform(&t, basis).expect("shape").coeffs
            }
            SideRep::Dense { phi, weights } => {
                let n = phi.len();
                (0..n)
                    .map(|s| (0..n).map(|x| weights[x] * values[x] * phi[s][x]).sum())
                    .collect()
            }
        }
    }
}

/// Generalized problem the inner solver runs on.
#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub(crate) kernel: RhoKernel,
    pub(crate) x: SideRep,
    pub(crate) y: SideRep,
    pub(crate) mu: f64,
    pub(crate) nu: f64,
    weights_x: Vec<f64>,
    weights_y: Vec<f64>,
}

impl Problem {
    pub(crate) fn new(kernel: RhoKernel, x: SideRep, y: SideRep, mu: f64, nu: f64) -> Self {
        let weights_x = x.point_weights();
        let weights_y = y.point_weights();
        Self {
            kernel,
            x,
            y,
            mu,
            nu,
            weights_x,
            weights_y,
        }
    }

    pub(crate) fn from_instance(inst: &PrimalInstance) -> Self {
        Self::new(
            inst.kernel(),
            SideRep::Product {
                basis: inst.basis_x().clone(),
                d: inst.d(),
            },
            SideRep::Product {
                basis: inst.basis_y().clone(),
                d: inst.d(),
            },
            inst.q_u_bias(),
            inst.q_v_bias(),
        )
    }

    fn n(&self) -> usize {
        self.x.n()
    }

    fn bilinear(&self, f: &[f64], g: &[f64]) -> f64 {
        self.kernel.bilinear(f, g)
    }

    fn lmo_x(&self, scores: &[f64]) -> Vec<f64> {
        lmo_values(scores, &self.weights_x, self.mu)
    }

    fn lmo_y(&self, scores: &[f64]) -> Vec<f64> {
        lmo_values(scores, &self.weights_y, self.nu)
    }
}

/// Exact linear maximization over `{v ∈ [-1,1]^n : Σ w v = bias}`.
///
/// Sorts points by score (ties toward smaller index), assigns `+1` to the
/// top `(1+bias)/2` of the mass, one fractional value at the crossing, `-1`
/// below. This is a vertex of the polytope.
fn lmo_values(scores: &[f64], weights: &[f64], bias: f64) -> Vec<f64> {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| scores[j].partial_cmp(&scores[i]).unwrap().then(i.cmp(&j)));
    let target = (1.0 + bias) / 2.0;
    let mut out = vec![-1.0; n];
    let mut acc = 0.0;
    for &i in &order {
        let w = weights[i];
        if w <= 0.0 {
            // zero-mass point: value is irrelevant, pick the score's sign
            out[i] = if scores[i] >= 0.0 { 1.0 } else { -1.0 };
            continue;
        }
        if acc + w <= target + 1e-15 {
            out[i] = 1.0;
            acc += w;
        } else if acc < target - 1e-15 {
            out[i] = 2.0 * ((target - acc) / w) - 1.0;
            acc = target;
        } else {
            break;
        }
    }
    out
}

struct Iterate {
    f: Vec<f64>,
    g: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sum_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

fn l_value(p: &Problem, it: &Iterate, c_f: f64, c_g: f64) -> f64 {
    p.bilinear(&it.f, &it.g) + c_f * sum_sq(&it.f) + c_g * sum_sq(&it.g)
}

/// One Frank-Wolfe run maximizing `B + c_f Σf² + c_g Σg²` from `start`.
fn fw_solve(p: &Problem, c_f: f64, c_g: f64, start: Iterate, cfg: &FPathConfig) -> Iterate {
    let mut it = start;
    for _ in 0..cfg.fw_max_iters {
        let kg = p.kernel.apply(&it.g);
        let ktf = p.kernel.apply_t(&it.f);
        let grad_f: Vec<f64> = kg
            .iter()
            .zip(&it.f)
            .map(|(k, f)| k + 2.0 * c_f * f)
            .collect();
        let grad_g: Vec<f64> = ktf
            .iter()
            .zip(&it.g)
            .map(|(k, g)| k + 2.0 * c_g * g)
            .collect();
        let vf_vals = p.lmo_x(&p.x.to_values(&grad_f));
        let vg_vals = p.lmo_y(&p.y.to_values(&grad_g));
        let mut vf = p.x.to_coeffs(&vf_vals);
        let mut vg = p.y.to_coeffs(&vg_vals);
        vf[0] = p.mu;
        vg[0] = p.nu;
        let df: Vec<f64> = vf.iter().zip(&it.f).map(|(a, b)| a - b).collect();
        let dg: Vec<f64> = vg.iter().zip(&it.g).map(|(a, b)| a - b).collect();
        let gap = dot(&grad_f, &df) + dot(&grad_g, &dg);
        if gap < cfg.fw_tol {
            match escape_probe(p, c_f, c_g, &it) {
                Some(better) => {
                    it = better;
                    continue;
                }
                None => break,
            }
        }
        // quadratic line search along (df, dg)
        let kdg = p.kernel.apply(&dg);
        let h2 = dot(&df, &kdg) + c_f * sum_sq(&df) + c_g * sum_sq(&dg);
        let h1 = dot(&df, &kg) + dot(&it.f, &kdg)
            + 2.0 * c_f * dot(&it.f, &df)
            + 2.0 * c_g * dot(&it.g, &dg);
        let t = if h2.abs() < 1e-14 {
            // flat quadratic: full step when it helps, halving as a guard
            let mut t = if h1 > 0.0 { 1.0 } else { 0.0 };
            if t > 0.0 {
                let base = l_value(p, &it, c_f, c_g);
                loop {
                    let cand = Iterate {
                        f: it.f.iter().zip(&df).map(|(a, b)| a + t * b).collect(),
                        g: it.g.iter().zip(&dg).map(|(a, b)| a + t * b).collect(),
                    };
                    if l_value(p, &cand, c_f, c_g) >= base || t < 1e-12 {
                        break;
                    }
                    t *= 0.5;
                }
            }
            t
        } else if h2 < 0.0 {
            (-h1 / (2.0 * h2)).clamp(0.0, 1.0)
        } else if h1 + h2 > 0.0 {
            1.0
        } else {
            0.0
        };
        if t <= 0.0 {
            match escape_probe(p, c_f, c_g, &it) {
                Some(better) => {
                    it = better;
                    continue;
                }
                None => break,
            }
        }
        for (fi, di) in it.f.iter_mut().zip(&df) {
            *fi += t * di;
        }
        for (gi, di) in it.g.iter_mut().zip(&dg) {
            *gi += t * di;
        }
        it.f[0] = p.mu;
        it.g[0] = p.nu;
    }
    it
}

/// Deterministic saddle escape: seeded vertex pairs refined by one power
/// step through the kernel; returns the best pair that strictly improves.
fn escape_probe(p: &Problem, c_f: f64, c_g: f64, it: &Iterate) -> Option<Iterate> {
    let n = p.n();
    let cur = l_value(p, it, c_f, c_g);
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    seeds.push((0..n).map(|x| if x % 2 == 0 { 1.0 } else { -1.0 }).collect());
    seeds.push(
        (0..n)
            .map(|x| -1.0 + 2.0 * x as f64 / (n.max(2) - 1) as f64)
            .collect(),
    );
    seeds.push((0..n).map(|x| if x < n / 2 { 1.0 } else { -1.0 }).collect());
    let mut best: Option<Iterate> = None;
    let mut best_val = cur + 1e-13;
    for seed in &seeds {
        for sign in [1.0f64, -1.0] {
            let s_vals: Vec<f64> = seed.iter().map(|v| sign * v).collect();
            let s_coeffs = p.x.to_coeffs(&s_vals);
            let vg_vals = p.lmo_y(&p.y.to_values(&p.kernel.apply_t(&s_coeffs)));
            let mut vg = p.y.to_coeffs(&vg_vals);
            vg[0] = p.nu;
            let vf_vals = p.lmo_x(&p.x.to_values(&p.kernel.apply(&vg)));
            let mut vf = p.x.to_coeffs(&vf_vals);
            vf[0] = p.mu;
            let vg2_vals = p.lmo_y(&p.y.to_values(&p.kernel.apply_t(&vf)));
            let mut vg2 = p.y.to_coeffs(&vg2_vals);
            vg2[0] = p.nu;
            let cand = Iterate { f: vf, g: vg2 };
            let val = l_value(p, &cand, c_f, c_g);
            if val > best_val {
                best_val = val;
                best = Some(cand);
            }
        }
    }
    best
}

fn coeff_weights(cfg: &FPathConfig, lambda: f64) -> (f64, f64) {
    (
        lambda * cfg.alpha1 - (1.0 - lambda) * cfg.alpha0,
        lambda * cfg.beta1 - (1.0 - lambda) * cfg.beta0,
    )
}

fn lambda_const(cfg: &FPathConfig, lambda: f64) -> f64 {
    (1.0 - lambda) * (cfg.alpha0 + cfg.beta0) - lambda * (cfg.alpha1 + cfg.beta1)
}

/// `L_λ` value of a feasible pair (used by tests and trace consumers).
pub fn objective_lambda(
    f: &FourierVector,
    g: &FourierVector,
    inst: &PrimalInstance,
    cfg: &FPathConfig,
    lambda: f64,
) -> Result<f64> {
    let b = crate::maxcorr::primal_objective(f, g, inst)?;
    let (c_f, c_g) = coeff_weights(cfg, lambda);
    Ok(b + c_f * f.sum_sq() + c_g * g.sum_sq() + lambda_const(cfg, lambda))
}

/// Largest λ at which `L_λ` is concave on the bias-pinned subspace, from the
/// kernel's free spectral norm.
pub fn lambda_concave(cfg: &FPathConfig, sigma: f64) -> f64 {
    let a = cfg.alpha0 + cfg.alpha1;
    let b = cfg.beta0 + cfg.beta1;
    let cap = (cfg.alpha0 / a).min(cfg.beta0 / b);
    // 4 (alpha0 - a λ)(beta0 - b λ) = sigma²
    let qa = 4.0 * a * b;
    let qb = -4.0 * (cfg.alpha0 * b + cfg.beta0 * a);
    let qc = 4.0 * cfg.alpha0 * cfg.beta0 - sigma * sigma;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return cap;
    }
    let root = (-qb - disc.sqrt()) / (2.0 * qa);
    root.clamp(0.0, cap)
}

/// Maximizes `B + c_f Σf² + c_g Σg²` over the feasible product polytope by
/// Frank-Wolfe from `start`.
pub fn frank_wolfe_maximize(
    inst: &PrimalInstance,
    c_f: f64,
    c_g: f64,
    start: (&FourierVector, &FourierVector),
    cfg: &FPathConfig,
) -> Result<(FourierVector, FourierVector)> {
    let rep_f = check_membership(start.0, inst.basis_x(), inst.q_u_bias())?;
    let rep_g = check_membership(start.1, inst.basis_y(), inst.q_v_bias())?;
    if !rep_f.feasible || !rep_g.feasible {
        return Err(Error::ConstraintViolation(format!(
            "infeasible start: violations {} / {}",
            rep_f.violation(),
            rep_g.violation()
        )));
    }
    let p = Problem::from_instance(inst);
    let it = fw_solve(
        &p,
        c_f,
        c_g,
        Iterate {
            f: start.0.coeffs.clone(),
            g: start.1.coeffs.clone(),
        },
        cfg,
    );
    Ok((
        FourierVector::new(inst.d(), inst.joint().qx(), it.f)?,
        FourierVector::new(inst.d(), inst.joint().qx(), it.g)?,
    ))
}

/// Runs the full path-following schedule on a primal instance.
pub fn fpath_solve(inst: &PrimalInstance, cfg: &FPathConfig) -> Result<FPathState> {
    let p = Problem::from_instance(inst);
    solve_generic(p, inst.d(), inst.joint().qx(), cfg)
}

/// Shared λ-schedule implementation; `d` and `q` shape the coefficient
/// vectors of the returned state.
pub(crate) fn solve_generic(
    p: Problem,
    d: usize,
    q: usize,
    cfg: &FPathConfig,
) -> Result<FPathState> {
    cfg.validate()?;
    let mut cfg = cfg.clone();
    let sigma = p.kernel.free_spectral_norm();
    let mut widened = None;
    if 4.0 * cfg.alpha0 * cfg.beta0 <= sigma * sigma
        || 4.0 * cfg.alpha1 * cfg.beta1 <= sigma * sigma
    {
        let w = 1.05 * sigma / 2.0;
        cfg.alpha0 = cfg.alpha0.max(w);
        cfg.beta0 = cfg.beta0.max(w);
        cfg.alpha1 = cfg.alpha1.max(w * 1.1);
        cfg.beta1 = cfg.beta1.max(w * 1.1);
        widened = Some((cfg.alpha0, cfg.alpha1));
    }
    if p.mu.abs() > 1.0 + 1e-12 || p.nu.abs() > 1.0 + 1e-12 {
        return Err(Error::InfeasibleTarget("bias outside [-1, 1]".into()));
    }
    let n = p.n();
    let steps_hint = (1.0 / cfg.d_lambda).ceil() as usize + 2;
    let mut trace = Vec::with_capacity(steps_hint.min(1 << 22));
    let mut snapshots = Vec::new();
    let mut max_violation = 0.0f64;

    // λ = 0: global maximum of the concave surrogate
    let (c_f0, c_g0) = coeff_weights(&cfg, 0.0);
    let mut start_f = vec![0.0; n];
    let mut start_g = vec![0.0; n];
    start_f[0] = p.mu;
    start_g[0] = p.nu;
    let mut it = fw_solve(&p, c_f0, c_g0, Iterate { f: start_f, g: start_g }, &cfg);
    let mut lambda_solved = 0.0;
    let mut b = p.bilinear(&it.f, &it.g);
    let mut nf = sum_sq(&it.f);
    let mut ng = sum_sq(&it.g);
    max_violation = max_violation.max(iterate_violation(&p, &it));
    trace.push(TraceRow {
        lambda: 0.0,
        objective: b + c_f0 * nf + c_g0 * ng + lambda_const(&cfg, 0.0),
        primal: b,
        f_norm_sq: nf,
        g_norm_sq: ng,
        resolved: true,
    });
    snapshots.push(Snapshot {
        lambda: 0.0,
        f: it.f.clone(),
        g: it.g.clone(),
    });

    let mut lambda = 0.0f64;
    while lambda < 1.0 - 1e-12 {
        let lambda_new = (lambda + cfg.d_lambda).min(1.0);
        let (cf_new, cg_new) = coeff_weights(&cfg, lambda_new);
        let (cf_old, cg_old) = coeff_weights(&cfg, lambda_solved);
        let l_new = b + cf_new * nf + cg_new * ng + lambda_const(&cfg, lambda_new);
        let l_old = b + cf_old * nf + cg_old * ng + lambda_const(&cfg, lambda_solved);
        let mut resolved = false;
        if (l_new - l_old).abs() >= cfg.eps_lambda {
            it = fw_solve(&p, cf_new, cg_new, it, &cfg);
            lambda_solved = lambda_new;
            b = p.bilinear(&it.f, &it.g);
            nf = sum_sq(&it.f);
            ng = sum_sq(&it.g);
            max_violation = max_violation.max(iterate_violation(&p, &it));
            snapshots.push(Snapshot {
                lambda: lambda_new,
                f: it.f.clone(),
                g: it.g.clone(),
            });
            resolved = true;
        }
        let (cf_new, cg_new) = coeff_weights(&cfg, lambda_new);
        trace.push(TraceRow {
            lambda: lambda_new,
            objective: b + cf_new * nf + cg_new * ng + lambda_const(&cfg, lambda_new),
            primal: b,
            f_norm_sq: nf,
            g_norm_sq: ng,
            resolved,
        });
        lambda = lambda_new;
    }

    let lam_c = lambda_concave(&cfg, sigma);
    let certificate = scan_certificate(&trace, lam_c, cfg.d_lambda);
    Ok(FPathState {
        lambda: 1.0,
        f: FourierVector::new(d, q, it.f)?,
        g: FourierVector::new(d, q, it.g)?,
        objective: b,
        boundary_flags: (nf, ng),
        trace,
        snapshots,
        certificate,
        max_box_violation: max_violation,
        widened_weights: widened,
    })
}

fn iterate_violation(p: &Problem, it: &Iterate) -> f64 {
    let fv = p.x.to_values(&it.f);
    let gv = p.y.to_values(&it.g);
    let mf = fv.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mg = gv.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    ((mf - 1.0).max(0.0)).max((mg - 1.0).max(0.0))
}

/// Earliest boundary arrival compatible with the concavity window.
///
/// The trace only changes at re-solves, so the true transition lies between
/// the previous re-solve and the first boundary row; the certificate is
/// issued when that interval intersects the concave region.
fn scan_certificate(trace: &[TraceRow], lam_c: f64, d_lambda: f64) -> Option<Certificate> {
    let mut prev_resolve = 0.0f64;
    for row in trace {
        let on_boundary =
            (row.f_norm_sq - 1.0).abs() <= 1e-6 && (row.g_norm_sq - 1.0).abs() <= 1e-6;
        if on_boundary {
            if prev_resolve <= lam_c + d_lambda {
                return Some(Certificate {
                    lambda_star: row.lambda.max(d_lambda),
                    lambda_concave: lam_c,
                });
            }
            return None;
        }
        if row.resolved {
            prev_resolve = row.lambda;
        }
    }
    None
}

/// Re-derives the optimality certificate of a completed solve from its
/// trace: the earliest λ with both squared norms at 1 (within 1e-6) whose
/// preceding re-solve still lay in the concave region of `L_λ`.
pub fn optimality_certificate(
    state: &FPathState,
    inst: &PrimalInstance,
    cfg: &FPathConfig,
) -> Option<Certificate> {
    let sigma = inst.kernel().free_spectral_norm();
    scan_certificate(&state.trace, lambda_concave(cfg, sigma), cfg.d_lambda)
}

/// Checks the final iterates of a state against the instance polytopes.
pub fn state_feasibility(state: &FPathState, inst: &PrimalInstance) -> Result<(f64, f64)> {
    let rf = check_membership(&state.f, inst.basis_x(), inst.q_u_bias())?;
    let rg = check_membership(&state.g, inst.basis_y(), inst.q_v_bias())?;
    if rf.violation() > BOX_TOL || rg.violation() > BOX_TOL {
        return Err(Error::ConstraintViolation(format!(
            "final iterate violates the box: {} / {}",
            rf.violation(),
            rg.violation()
        )));
    }
    Ok((rf.violation(), rg.violation()))
}
