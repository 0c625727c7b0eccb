//! Maximal, biased, and directional maximal correlation.
//!
//! The primal problem maximizes `E[f(X^d) g(Y^d)]` over coefficient vectors
//! whose reconstructions stay in `[-1, 1]` pointwise with pinned constant
//! coefficients (the output biases). [`PrimalInstance`] packages a joint
//! input pmf with the bases and per-letter cross-correlation matrix the
//! optimization runs against; the solver itself lives in [`crate::fpath`].

use crate::distributions::{JointPmf, TargetPmf};
use crate::error::{Error, Result};
use crate::fourier::{
    fourier_transform, inner_product_fourier, inverse_transform, CrossCorrelationMatrix,
    FourierVector, OrthonormalBasis, RealTable, RhoKernel,
};
use crate::index;

/// Feasibility tolerance on the pointwise box constraints.
pub const BOX_TOL: f64 = 1e-9;

/// Tolerance on objective comparisons.
pub const OBJ_TOL: f64 = 1e-8;

/// A biased-maximal-correlation problem instance.
#[derive(Debug, Clone)]
pub struct PrimalInstance {
    joint: JointPmf,
    d: usize,
    /// Target constant coefficient `f_∅ = 2 Q_U(1) - 1`.
    q_u_bias: f64,
    /// Target constant coefficient `g_∅ = 2 Q_V(1) - 1`.
    q_v_bias: f64,
    basis_x: OrthonormalBasis,
    basis_y: OrthonormalBasis,
    rho: CrossCorrelationMatrix,
}

impl PrimalInstance {
    /// Builds an instance from output-1 probabilities `Q_U(1)`, `Q_V(1)`.
    ///
    /// Bases default to [`OrthonormalBasis::default_for`] on each marginal;
    /// the cross-correlation matrix is recomputed and sanity-checked.
    pub fn new(joint: JointPmf, d: usize, qu1: f64, qv1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&qu1) || !(0.0..=1.0).contains(&qv1) {
            return Err(Error::InvalidDistribution(
                "output biases must be probabilities".into(),
            ));
        }
        let basis_x = OrthonormalBasis::default_for(&joint.marginal_x())?;
        let basis_y = OrthonormalBasis::default_for(&joint.marginal_y())?;
        let rho = CrossCorrelationMatrix::from_joint(&joint, &basis_x, &basis_y)?;
        // invariant: rho row/col 0 orthogonal to constants
        if (rho.get(0, 0) - 1.0).abs() > 1e-10 {
            return Err(Error::Degenerate("rho_{0,0} != 1".into()));
        }
        Ok(Self {
            joint,
            d,
            q_u_bias: 2.0 * qu1 - 1.0,
            q_v_bias: 2.0 * qv1 - 1.0,
            basis_x,
            basis_y,
            rho,
        })
    }

    /// Input joint pmf.
    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    /// Block length.
    pub fn d(&self) -> usize {
        self.d
    }

    /// `f_∅` target (equals `2 Q_U(1) - 1`).
    pub fn q_u_bias(&self) -> f64 {
        self.q_u_bias
    }

    /// `g_∅` target (equals `2 Q_V(1) - 1`).
    pub fn q_v_bias(&self) -> f64 {
        self.q_v_bias
    }

    /// Basis on the X side.
    pub fn basis_x(&self) -> &OrthonormalBasis {
        &self.basis_x
    }

    /// Basis on the Y side.
    pub fn basis_y(&self) -> &OrthonormalBasis {
        &self.basis_y
    }

    /// Per-letter cross-correlation matrix.
    pub fn rho(&self) -> &CrossCorrelationMatrix {
        &self.rho
    }

    /// The d-fold product kernel.
    pub fn kernel(&self) -> RhoKernel {
        RhoKernel::iid(self.rho.clone(), self.d)
    }

    /// Coefficient-space dimension `q^d`.
    pub fn n(&self) -> usize {
        index::pow(self.joint.qx(), self.d)
    }
}

/// Outcome of the single-letter bounded maximal-correlation optimization.
#[derive(Debug, Clone)]
pub struct SingleLetterMaxcorr {
    /// The optimal value of `Σ f_i g_j rho_{i,j}` over the bounded polytope.
    pub value: f64,
    /// Optimal single-letter coefficients of `f` (index 0 is the constant, 0).
    pub f_coeffs: FourierVector,
    /// Optimal single-letter coefficients of `g`.
    pub g_coeffs: FourierVector,
}

/// Largest correlation achievable by zero-mean `[-1,1]`-valued single-letter
/// functions: `max Σ_{i,j>=1} f_i g_j rho_{i,j}` with both reconstructions
/// bounded by 1.
///
/// For uniform marginals this equals the HGR maximal correlation; for biased
/// marginals it is smaller (the unit-variance optimum does not fit in the
/// box). Binary inputs use the closed form `f(x) = (x - E[X])/(1 + |E[X]|)`;
/// larger alphabets run the d=1 primal through the path-following solver.
pub fn maximal_correlation_single_letter(joint: &JointPmf) -> Result<SingleLetterMaxcorr> {
    let q = joint.qx();
    if q != joint.qy() {
        return Err(Error::Dimension("alphabet sizes must match".into()));
    }
    let inst = PrimalInstance::new(joint.clone(), 1, 0.5, 0.5)?;
    if q == 2 {
        let px = joint.marginal_x();
        let py = joint.marginal_y();
        let ex = px[1] - px[0];
        let ey = py[1] - py[0];
        let sx = 2.0 * (px[0] * px[1]).sqrt();
        let sy = 2.0 * (py[0] * py[1]).sqrt();
        if sx < 1e-12 || sy < 1e-12 {
            return Err(Error::Degenerate("marginal has zero variance".into()));
        }
        let r = inst.rho.get(1, 1);
        let f1 = sx / (1.0 + ex.abs());
        let g1 = (sy / (1.0 + ey.abs())) * r.signum();
        let value = (f1 * g1 * r).abs();
        let f = FourierVector::new(1, 2, vec![0.0, f1])?;
        let g = FourierVector::new(1, 2, vec![0.0, g1])?;
        return Ok(SingleLetterMaxcorr {
            value,
            f_coeffs: f,
            g_coeffs: g,
        });
    }
    // general alphabets: run the d=1 primal with zero biases
    let state = crate::fpath::fpath_solve(&inst, &crate::fpath::FPathConfig::default())?;
    Ok(SingleLetterMaxcorr {
        value: state.objective,
        f_coeffs: state.f,
        g_coeffs: state.g,
    })
}

/// Evaluates the primal objective `Σ f g Π rho^{n(...)}` for a feasible pair.
///
/// Errors when the constant coefficients do not match the instance biases.
pub fn primal_objective(
    f: &FourierVector,
    g: &FourierVector,
    inst: &PrimalInstance,
) -> Result<f64> {
    if (f.bias() - inst.q_u_bias).abs() > BOX_TOL || (g.bias() - inst.q_v_bias).abs() > BOX_TOL {
        return Err(Error::ConstraintViolation(format!(
            "bias mismatch: f_0={} (want {}), g_0={} (want {})",
            f.bias(),
            inst.q_u_bias,
            g.bias(),
            inst.q_v_bias
        )));
    }
    inner_product_fourier(f, g, &inst.rho)
}

/// Pointwise feasibility report for one coefficient vector.
#[derive(Debug, Clone, Copy)]
pub struct MembershipReport {
    /// True when the reconstruction stays in `[-1, 1]` and the bias matches.
    pub feasible: bool,
    /// `max_x |f(x)|` of the reconstruction.
    pub max_abs_value: f64,
    /// `|f_0 - bias|`.
    pub bias_error: f64,
}

impl MembershipReport {
    /// Magnitude of the box violation, 0 when feasible.
    pub fn violation(&self) -> f64 {
        (self.max_abs_value - 1.0).max(0.0)
    }
}

/// Checks `|Σ_s f_s φ_s(x)| <= 1` at every point and `f_0 = bias`.
pub fn check_membership(
    v: &FourierVector,
    basis: &OrthonormalBasis,
    bias: f64,
) -> Result<MembershipReport> {
    let table = inverse_transform(v, basis)?;
    let max_abs_value = table.values.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let bias_error = (v.bias() - bias).abs();
    Ok(MembershipReport {
        feasible: max_abs_value <= 1.0 + BOX_TOL && bias_error <= BOX_TOL,
        max_abs_value,
        bias_error,
    })
}

/// Equi-biased objective `Σ_S f_S^2 rho^{|S|}` (binary inputs).
pub fn equibiased_objective(f: &FourierVector, rho: f64) -> Result<f64> {
    if f.q != 2 {
        return Err(Error::Dimension("equi-biased form requires q = 2".into()));
    }
    Ok(f.coeffs
        .iter()
        .enumerate()
        .map(|(s, c)| c * c * rho.powi(index::weight(s, 2, f.d) as i32))
        .sum())
}

/// Direction in the centered expectation-vector space.
///
/// Normalized the way the directional-correlation definitions use it:
/// `alpha = beta / Σ beta²`, so `beta = t * alpha` exactly and the
/// directional coordinate `t` is linear along the star segment. (`Σ alpha²`
/// is generally not 1 under this convention.)
#[derive(Debug, Clone)]
pub struct DirectionVector {
    qu: usize,
    qv: usize,
    /// `alpha[(u-1)*(qv-1) + (v-1)]` for `u, v >= 1`.
    pub alpha: Vec<f64>,
}

impl DirectionVector {
    /// Builds a direction for output alphabet sizes `(qu, qv)`.
    pub fn new(qu: usize, qv: usize, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != (qu - 1) * (qv - 1) {
            return Err(Error::Dimension("direction length mismatch".into()));
        }
        Ok(Self { qu, qv, alpha })
    }

    /// `alpha_{u,v}` for `u, v >= 1`.
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.alpha[(u - 1) * (self.qv - 1) + (v - 1)]
    }

    /// Output alphabet sizes.
    pub fn shape(&self) -> (usize, usize) {
        (self.qu, self.qv)
    }

    /// Reference pair for the objective: `(1,1)` when `alpha_{1,1} != 0`,
    /// else the first `(u, v)` in row-major order with nonzero coordinate.
    pub fn reference_pair(&self) -> Option<(usize, usize)> {
        for u in 1..self.qu {
            for v in 1..self.qv {
                if self.get(u, v).abs() > 1e-12 {
                    return Some((u, v));
                }
            }
        }
        None
    }
}

/// Direction and magnitude of a target: `beta = 4(Q - Q_U Q_V)` on the
/// non-reference symbols, `alpha = beta/Σbeta²`, `t = Σbeta²`.
///
/// Returns `None` when the target is (numerically) the product of its
/// marginals, where no direction is defined.
pub fn direction_of_target(q: &TargetPmf) -> Option<(DirectionVector, f64)> {
    let qu = q.marginal_u();
    let qv = q.marginal_v();
    let nu_sz = q.qu();
    let nv_sz = q.qv();
    let mut beta = Vec::with_capacity((nu_sz - 1) * (nv_sz - 1));
    for u in 1..nu_sz {
        for v in 1..nv_sz {
            beta.push(4.0 * (q.prob(u, v) - qu[u] * qv[v]));
        }
    }
    let t: f64 = beta.iter().map(|b| b * b).sum();
    if t < 1e-24 {
        return None;
    }
    let alpha = beta.iter().map(|b| b / t).collect();
    Some((
        DirectionVector {
            qu: nu_sz,
            qv: nv_sz,
            alpha,
        },
        t,
    ))
}

/// Evaluation of a finite-output coefficient family against a direction.
#[derive(Debug, Clone)]
pub struct DirectionalReport {
    /// Directional coordinate at the reference pair.
    pub objective: f64,
    /// Per-(u,v) directionality residuals (row-major over `u,v >= 1`):
    /// `t_{u,v} - t_ref` where `alpha_{u,v} != 0`, else the raw centered
    /// expectation that the zero direction coordinate requires to vanish.
    pub residuals: Vec<f64>,
    /// Per-u box/bias feasibility of the `f` family.
    pub membership_f: Vec<MembershipReport>,
    /// Per-v box/bias feasibility of the `g` family.
    pub membership_g: Vec<MembershipReport>,
    /// Violation of `f_0(x) ∈ [-1,1]` where `f_0 = (2-|U|) - Σ_u f_u`.
    pub aggregate_violation_f: f64,
    /// Same for the `g` family.
    pub aggregate_violation_g: f64,
}

/// Directional objective and constraint residuals for coefficient families
/// over the non-reference output symbols (`|U|-1` and `|V|-1` vectors).
///
/// Bias targets are read off the families' constant coefficients; the
/// instance supplies bases and the kernel.
pub fn directional_objective_and_constraints(
    f_family: &[FourierVector],
    g_family: &[FourierVector],
    inst: &PrimalInstance,
    alpha: &DirectionVector,
) -> Result<DirectionalReport> {
    let (qu, qv) = alpha.shape();
    if f_family.len() != qu - 1 || g_family.len() != qv - 1 {
        return Err(Error::Dimension(format!(
            "families must have sizes {} and {}",
            qu - 1,
            qv - 1
        )));
    }
    let (ru, rv) = alpha
        .reference_pair()
        .ok_or_else(|| Error::Degenerate("direction vector is zero".into()))?;
    let t_of = |u: usize, v: usize| -> Result<f64> {
        let fu = &f_family[u - 1];
        let gv = &g_family[v - 1];
        let e = inner_product_fourier(fu, gv, inst.rho())?;
        Ok(e - fu.bias() * gv.bias())
    };
    let objective = t_of(ru, rv)? / alpha.get(ru, rv);
    let mut residuals = Vec::with_capacity((qu - 1) * (qv - 1));
    for u in 1..qu {
        for v in 1..qv {
            let a = alpha.get(u, v);
            let centered = t_of(u, v)?;
            if a.abs() > 1e-12 {
                residuals.push(centered / a - objective);
            } else {
                residuals.push(centered);
            }
        }
    }
    let membership_f = f_family
        .iter()
        .map(|f| check_membership(f, inst.basis_x(), f.bias()))
        .collect::<Result<Vec<_>>>()?;
    let membership_g = g_family
        .iter()
        .map(|g| check_membership(g, inst.basis_y(), g.bias()))
        .collect::<Result<Vec<_>>>()?;
    let aggregate_violation_f = aggregate_violation(f_family, inst.basis_x(), qu)?;
    let aggregate_violation_g = aggregate_violation(g_family, inst.basis_y(), qv)?;
    Ok(DirectionalReport {
        objective,
        residuals,
        membership_f,
        membership_g,
        aggregate_violation_f,
        aggregate_violation_g,
    })
}

/// Max violation of `|(2-|U|) - Σ_u f_u(x)| <= 1` over all points.
fn aggregate_violation(
    family: &[FourierVector],
    basis: &OrthonormalBasis,
    out_size: usize,
) -> Result<f64> {
    if family.is_empty() {
        return Ok(0.0);
    }
    let tables = family
        .iter()
        .map(|f| inverse_transform(f, basis))
        .collect::<Result<Vec<_>>>()?;
    let n = tables[0].values.len();
    let mut worst = 0.0f64;
    for x in 0..n {
        let sum: f64 = tables.iter().map(|t| t.values[x]).sum();
        let f0 = (2.0 - out_size as f64) - sum;
        worst = worst.max((f0.abs() - 1.0).max(0.0));
    }
    Ok(worst)
}

/// Transforms a ±1 table into the instance's coefficient space (X side).
pub fn table_to_coeffs_x(t: &RealTable, inst: &PrimalInstance) -> Result<FourierVector> {
    fourier_transform(t, inst.basis_x())
}

/// Transforms a ±1 table into the instance's coefficient space (Y side).
pub fn table_to_coeffs_y(t: &RealTable, inst: &PrimalInstance) -> Result<FourierVector> {
    fourier_transform(t, inst.basis_y())
}
