//! Linear-programming route to biased maximal correlation for uniform input
//! marginals, with an embedded dense simplex solver.
//!
//! # Formulation
//!
//! The multiplier-space LP suggested by the KKT derivation cannot work as a
//! standalone program: the objective weights on the constant multiplier
//! coefficients are positive and unconstrained above (the aggregate
//! complementary-slackness identity that would pin them is bilinear in the
//! multipliers). The LP built here instead solves the same fixed-`d` problem
//! in a correlation-plan form:
//!
//! - variables `z(x,y) ≈ f(x) g(y)`, `f(x)`, `g(y)`, all in `[-1, 1]`;
//! - mean-consistency equalities `E_y[z(x, ·)] = ν f(x)`,
//!   `E_x[z(·, y)] = μ g(y)`, `E[f] = μ`, `E[g] = ν` (uniform measures);
//! - McCormick envelopes tying `z` to `f` and `g`;
//! - objective `max Σ_{x,y} W(x,y) z(x,y)` with `W = Π_i P(x_i, y_i)`.
//!
//! Any feasible function pair induces a feasible plan, so the optimum is
//! always an upper bound on the primal value; on `q = 2`, `d ≤ 2` instances
//! it matches the exhaustive oracle at machine precision for every
//! acceptance-count pair. At `d = 3` the relaxation can be strictly loose,
//! which [`dual_vs_primal_check`] reports rather than hides.
//!
//! The recovered `f̄`, `ḡ` are read off the plan variables and re-expressed
//! through the uniform characters `χ_{s^d}`. In the KKT derivation the `f̄`
//! box constraint carries the `Q_V` bias and `ḡ` the `Q_U` bias (the
//! stationarity equations recover each side's partner); that cross-pairing
//! is intrinsic to the multiplier route and documented here for reference.

use crate::distributions::JointPmf;
use crate::error::{Error, Result};
use crate::fourier::{CrossCorrelationMatrix, OrthonormalBasis, RhoKernel};
use crate::fpath::{fpath_solve, FPathConfig};
use crate::index;
use crate::maxcorr::PrimalInstance;

/// Hard cap on `q^d` for the dual route (the LP has `q^{2d} + 2 q^d`
/// variables).
pub const DUAL_POINT_CAP: usize = 64;

/// A biased-maximal-correlation instance restricted to uniform marginals.
#[derive(Debug, Clone)]
pub struct DualInstance {
    joint: JointPmf,
    d: usize,
    qu1: f64,
    qv1: f64,
    n: usize,
    /// Product weights `W(x,y)`, row-major.
    w: Vec<f64>,
    /// Uniform characters `chi[s][x]` used to express recovered functions.
    chi: Vec<Vec<f64>>,
    /// The `q^d x q^d` kernel matrix `P = [Π rho_{s_i,t_i}]`.
    rho_kernel: Vec<f64>,
}

impl DualInstance {
    /// Builds the instance; refuses non-uniform input marginals.
    pub fn new(joint: JointPmf, d: usize, qu1: f64, qv1: f64) -> Result<Self> {
        if joint.qx() != joint.qy() {
            return Err(Error::Dimension("alphabet sizes must match".into()));
        }
        if !joint.has_uniform_marginals(1e-12) {
            return Err(Error::UnsupportedHypothesis(
                "dual route requires uniform input marginals".into(),
            ));
        }
        let q = joint.qx();
        let n = index::pow(q, d);
        if n > DUAL_POINT_CAP {
            return Err(Error::SizeCap(format!(
                "dual route caps q^d at {DUAL_POINT_CAP}, got {n}"
            )));
        }
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
        let uniform = vec![1.0 / q as f64; q];
        let basis = OrthonormalBasis::default_for(&uniform)?;
        let mut chi = vec![vec![0.0; n]; n];
        for (s, row) in chi.iter_mut().enumerate() {
            for (x, v) in row.iter_mut().enumerate() {
                *v = basis.parity(s, x, d);
            }
        }
        let rho = CrossCorrelationMatrix::from_joint(&joint, &basis, &basis)?;
        let kernel = RhoKernel::iid(rho, d);
        let mut rho_kernel = vec![0.0; n * n];
        for t in 0..n {
            let mut e = vec![0.0; n];
            e[t] = 1.0;
            let col = kernel.apply(&e);
            for s in 0..n {
                rho_kernel[s * n + t] = col[s];
            }
        }
        Ok(Self {
            joint,
            d,
            qu1,
            qv1,
            n,
            w,
            chi,
            rho_kernel,
        })
    }

    /// Number of points `q^d`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Block length.
    pub fn d(&self) -> usize {
        self.d
    }

    /// The input joint pmf.
    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    /// Output bias `Q_U(1)`.
    pub fn qu1(&self) -> f64 {
        self.qu1
    }

    /// Output bias `Q_V(1)`.
    pub fn qv1(&self) -> f64 {
        self.qv1
    }

    /// The objective's constant term `(2Q_U(1)-1)(2Q_V(1)-1)`.
    pub fn constant(&self) -> f64 {
        (2.0 * self.qu1 - 1.0) * (2.0 * self.qv1 - 1.0)
    }

    /// The `q^d × q^d` kernel matrix entry `P_{s,t}`.
    pub fn rho_kernel(&self, s: usize, t: usize) -> f64 {
        self.rho_kernel[s * self.n + t]
    }

    /// True when the kernel matrix is numerically singular (e.g. `rho ≡ 0`
    /// off the constant). The factorized multiplier route would require
    /// invertibility; the plan construction does not.
    pub fn kernel_is_singular(&self) -> bool {
        lu_singular(&self.rho_kernel, self.n)
    }

    /// Uniform character value `chi_{s^d}(x^d)`.
    pub fn chi(&self, s: usize, x: usize) -> f64 {
        self.chi[s][x]
    }
}

/// LU factorization with partial pivoting, reporting singularity only.
fn lu_singular(a: &[f64], n: usize) -> bool {
    let mut m = a.to_vec();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for r in col + 1..n {
            let v = m[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best < 1e-12 {
            return true;
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
        }
        let pivot = m[col * n + col];
        for r in col + 1..n {
            let factor = m[r * n + col] / pivot;
            for c in col..n {
                m[r * n + c] -= factor * m[col * n + c];
            }
        }
    }
    false
}

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    /// `coeffs · x <= rhs`
    Le,
    /// `coeffs · x >= rhs`
    Ge,
    /// `coeffs · x = rhs`
    Eq,
}

/// One dense LP row.
#[derive(Debug, Clone)]
pub struct LpConstraint {
    /// Row coefficients (length = number of variables).
    pub coeffs: Vec<f64>,
    /// Relation to the right-hand side.
    pub sense: Sense,
    /// Right-hand side.
    pub rhs: f64,
}

/// Generic dense LP: maximize `objective · x` subject to rows and bounds.
#[derive(Debug, Clone)]
pub struct LpProblem {
    /// Maximization objective.
    pub objective: Vec<f64>,
    /// Constraint rows.
    pub constraints: Vec<LpConstraint>,
    /// Per-variable lower bounds (finite).
    pub lower: Vec<f64>,
    /// Per-variable upper bounds (`f64::INFINITY` allowed).
    pub upper: Vec<f64>,
}

impl LpProblem {
    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Dimension("bounds length mismatch".into()));
        }
        if self.lower.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dimension("lower bounds must be finite".into()));
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Error::Dimension("constraint length mismatch".into()));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::Dimension("non-finite LP entry".into()));
            }
        }
        Ok(())
    }

    /// Plain-text tableau dump for debugging.
    pub fn dump(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "maximize {:?}", self.objective);
        for (i, c) in self.constraints.iter().enumerate() {
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, "r{i}: {:?} {op} {}", c.coeffs, c.rhs);
        }
        let _ = writeln!(out, "bounds: {:?} .. {:?}", self.lower, self.upper);
        out
    }
}

/// Simplex output: optimum and the primal variable values.
#[derive(Debug, Clone)]
pub struct LpSolution {
    /// Optimal objective value (maximization).
    pub objective: f64,
    /// Optimal variable assignment.
    pub x: Vec<f64>,
}

/// Dense two-phase simplex with Bland's rule (anti-cycling).
///
/// Variables are shifted to their lower bounds; finite upper bounds become
/// explicit rows. Small and deliberate rather than fast.
pub fn simplex_solve(lp: &LpProblem) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.objective.len();
    // shifted problem: x = lower + x', x' >= 0
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for c in &lp.constraints {
        let shift: f64 = c.coeffs.iter().zip(&lp.lower).map(|(a, lo)| a * lo).sum();
        rows.push((c.coeffs.clone(), c.sense, c.rhs - shift));
    }
    for (j, (&lo, &hi)) in lp.lower.iter().zip(&lp.upper).enumerate() {
        if hi.is_finite() {
            if hi < lo - 1e-12 {
                return Err(Error::Infeasible(format!("empty bound range on x{j}")));
            }
            let mut coeffs = vec![0.0; n];
            coeffs[j] = 1.0;
            rows.push((coeffs, Sense::Le, hi - lo));
        }
    }
    // normalize rhs >= 0
    for (coeffs, sense, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            for v in coeffs.iter_mut() {
                *v = -*v;
            }
            *rhs = -*rhs;
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let m = rows.len();
    let mut n_slack = 0;
    let mut n_art = 0;
    for (_, sense, _) in &rows {
        match sense {
            Sense::Le => n_slack += 1,
            Sense::Ge => {
                n_slack += 1;
                n_art += 1;
            }
            Sense::Eq => n_art += 1,
        }
    }
    let total = n + n_slack + n_art;
    let mut tab = vec![vec![0.0f64; total + 1]; m];
    let mut basis = vec![0usize; m];
    let mut slack_at = n;
    let mut art_at = n + n_slack;
    let mut art_cols = Vec::new();
    for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        tab[i][..n].copy_from_slice(coeffs);
        tab[i][total] = *rhs;
        match sense {
            Sense::Le => {
                tab[i][slack_at] = 1.0;
                basis[i] = slack_at;
                slack_at += 1;
            }
            Sense::Ge => {
                tab[i][slack_at] = -1.0;
                slack_at += 1;
                tab[i][art_at] = 1.0;
                basis[i] = art_at;
                art_cols.push(art_at);
                art_at += 1;
            }
            Sense::Eq => {
                tab[i][art_at] = 1.0;
                basis[i] = art_at;
                art_cols.push(art_at);
                art_at += 1;
            }
        }
    }

    // phase 1: minimize the sum of artificials
    if n_art > 0 {
        let mut cost = vec![0.0f64; total];
        for &c in &art_cols {
            cost[c] = 1.0;
        }
        let residual = run_simplex(&mut tab, &mut basis, &cost, total, &art_cols, true)?;
        if residual > 1e-8 {
            return Err(Error::Infeasible(format!("phase-1 residual {residual}")));
        }
        // pivot leftover artificials out of the basis where possible
        for i in 0..m {
            if art_cols.contains(&basis[i]) {
                if let Some(j) = (0..n + n_slack).find(|&j| tab[i][j].abs() > 1e-9) {
                    pivot(&mut tab, &mut basis, i, j);
                }
            }
        }
    }

    // phase 2: minimize the negated objective, artificials blocked
    let mut cost = vec![0.0f64; total];
    for j in 0..n {
        cost[j] = -lp.objective[j];
    }
    run_simplex(&mut tab, &mut basis, &cost, total, &art_cols, false)?;

    let mut xprime = vec![0.0f64; total];
    for i in 0..m {
        xprime[basis[i]] = tab[i][total];
    }
    let x: Vec<f64> = (0..n).map(|j| lp.lower[j] + xprime[j]).collect();
    let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { objective, x })
}

/// Bland-rule simplex (minimization) on a prepared tableau; returns the
/// phase objective.
fn run_simplex(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    total: usize,
    blocked: &[usize],
    phase1: bool,
) -> Result<f64> {
    let m = tab.len();
    let rhs_col = total;
    loop {
        // reduced costs z_j - c_j
        let mut entering = None;
        for j in 0..total {
            if basis.contains(&j) || (!phase1 && blocked.contains(&j)) {
                continue;
            }
            let mut z = 0.0;
            for i in 0..m {
                let cb = cost[basis[i]];
                if cb != 0.0 {
                    z += cb * tab[i][j];
                }
            }
            if z - cost[j] > 1e-10 {
                entering = Some(j); // Bland: first improving index
                break;
            }
        }
        let Some(e) = entering else {
            let mut obj = 0.0;
            for i in 0..m {
                obj += cost[basis[i]] * tab[i][rhs_col];
            }
            return Ok(obj);
        };
        // ratio test; Bland ties toward the smallest basis index
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if tab[i][e] > 1e-10 {
                let ratio = tab[i][rhs_col] / tab[i][e];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12 || (ratio < lr + 1e-12 && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((l, _)) = leave else {
            if phase1 {
                return Err(Error::Infeasible("phase-1 unbounded".into()));
            }
            return Err(Error::Unbounded(
                "objective unbounded over the feasible region".into(),
            ));
        };
        pivot(tab, basis, l, e);
    }
}

fn pivot(tab: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let m = tab.len();
    let ncols = tab[0].len();
    let p = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= p;
    }
    for i in 0..m {
        if i != row {
            let factor = tab[i][col];
            if factor != 0.0 {
                for j in 0..ncols {
                    let delta = factor * tab[row][j];
                    tab[i][j] -= delta;
                }
            }
        }
    }
    basis[row] = col;
}

/// Builds the plan LP of a [`DualInstance`].
///
/// Variable order: `z(x,y)` row-major, then `f(x)`, then `g(y)`.
pub fn build_dual_lp(inst: &DualInstance) -> LpProblem {
    let n = inst.n;
    let nz = n * n;
    let nvar = nz + 2 * n;
    let mu = 2.0 * inst.qu1 - 1.0;
    let nu = 2.0 * inst.qv1 - 1.0;
    let mut objective = vec![0.0; nvar];
    objective[..nz].copy_from_slice(&inst.w);
    let mut constraints = Vec::with_capacity(2 + 2 * n + 4 * nz);
    let nf = n as f64;
    let mut row = vec![0.0; nvar];
    for x in 0..n {
        row[nz + x] = 1.0;
    }
    constraints.push(LpConstraint {
        coeffs: row,
        sense: Sense::Eq,
        rhs: nf * mu,
    });
    let mut row = vec![0.0; nvar];
    for y in 0..n {
        row[nz + n + y] = 1.0;
    }
    constraints.push(LpConstraint {
        coeffs: row,
        sense: Sense::Eq,
        rhs: nf * nu,
    });
    for x in 0..n {
        let mut row = vec![0.0; nvar];
        for y in 0..n {
            row[x * n + y] = 1.0;
        }
        row[nz + x] = -nf * nu;
        constraints.push(LpConstraint {
            coeffs: row,
            sense: Sense::Eq,
            rhs: 0.0,
        });
    }
    for y in 0..n {
        let mut row = vec![0.0; nvar];
        for x in 0..n {
            row[x * n + y] = 1.0;
        }
        row[nz + n + y] = -nf * mu;
        constraints.push(LpConstraint {
            coeffs: row,
            sense: Sense::Eq,
            rhs: 0.0,
        });
    }
    // McCormick envelopes of z = f g on [-1,1]^2
    for x in 0..n {
        for y in 0..n {
            let zi = x * n + y;
            let fi = nz + x;
            let gi = nz + n + y;
            for (sz, sf, sg) in [
                (1.0, 1.0, -1.0),
                (1.0, -1.0, 1.0),
                (-1.0, 1.0, 1.0),
                (-1.0, -1.0, -1.0),
            ] {
                let mut row = vec![0.0; nvar];
                row[zi] = sz;
                row[fi] = sf;
                row[gi] = sg;
                constraints.push(LpConstraint {
                    coeffs: row,
                    sense: Sense::Le,
                    rhs: 1.0,
                });
            }
        }
    }
    LpProblem {
        objective,
        constraints,
        lower: vec![-1.0; nvar],
        upper: vec![1.0; nvar],
    }
}

/// Solved dual with recovered functions.
#[derive(Debug, Clone)]
pub struct DualSolution {
    /// The biased-maximal-correlation estimate (LP optimum).
    pub rho_b: f64,
    /// LP value net of the constant term `(2Q_U(1)-1)(2Q_V(1)-1)`.
    pub lp_value: f64,
    /// The constant term.
    pub constant: f64,
    /// Recovered `f̄` values on points.
    pub f_values: Vec<f64>,
    /// Recovered `ḡ` values on points.
    pub g_values: Vec<f64>,
    /// `f̄` expressed in the uniform characters.
    pub f_coeffs: Vec<f64>,
    /// `ḡ` expressed in the uniform characters.
    pub g_coeffs: Vec<f64>,
}

/// Builds and solves the dual LP.
pub fn solve_dual(inst: &DualInstance) -> Result<DualSolution> {
    let lp = build_dual_lp(inst);
    let sol = simplex_solve(&lp)?;
    let n = inst.n;
    let nz = n * n;
    let f_values = sol.x[nz..nz + n].to_vec();
    let g_values = sol.x[nz + n..].to_vec();
    let nf = n as f64;
    let f_coeffs: Vec<f64> = (0..n)
        .map(|s| (0..n).map(|x| f_values[x] * inst.chi[s][x]).sum::<f64>() / nf)
        .collect();
    let g_coeffs: Vec<f64> = (0..n)
        .map(|s| (0..n).map(|x| g_values[x] * inst.chi[s][x]).sum::<f64>() / nf)
        .collect();
    let constant = inst.constant();
    Ok(DualSolution {
        rho_b: sol.objective,
        lp_value: sol.objective - constant,
        constant,
        f_values,
        g_values,
        f_coeffs,
        g_coeffs,
    })
}

/// Side-by-side run of the dual LP and the path-following solver.
#[derive(Debug, Clone)]
pub struct DualPrimalReport {
    /// LP optimum.
    pub dual_value: f64,
    /// F-PATH achieved objective.
    pub fpath_value: f64,
    /// `dual - fpath` (nonnegative up to solver tolerance).
    pub gap: f64,
    /// Whether the primal run produced an optimality certificate.
    pub certificate_present: bool,
}

/// Runs both routes on the same uniform-marginal instance and reports the
/// gap. At `d <= 2` the LP is exact; at `d = 3` it may exceed the primal.
pub fn dual_vs_primal_check(inst: &DualInstance, cfg: &FPathConfig) -> Result<DualPrimalReport> {
    if inst.d > 3 || inst.joint.qx() != 2 {
        return Err(Error::SizeCap(
            "dual_vs_primal_check supports q = 2, d <= 3".into(),
        ));
    }
    let dual = solve_dual(inst)?;
    let primal_inst = PrimalInstance::new(inst.joint.clone(), inst.d, inst.qu1, inst.qv1)?;
    let state = fpath_solve(&primal_inst, cfg)?;
    Ok(DualPrimalReport {
        dual_value: dual.rho_b,
        fpath_value: state.objective,
        gap: dual.rho_b - state.objective,
        certificate_present: state.certificate.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn simplex_toy_problems() {
        // max x s.t. x <= 1, x >= 0
        let lp = LpProblem {
            objective: vec![1.0],
            constraints: vec![LpConstraint {
                coeffs: vec![1.0],
                sense: Sense::Le,
                rhs: 1.0,
            }],
            lower: vec![0.0],
            upper: vec![f64::INFINITY],
        };
        let sol = simplex_solve(&lp).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-9);

        // degenerate LP with redundant constraints terminates (Bland)
        let lp = LpProblem {
            objective: vec![1.0, 1.0],
            constraints: vec![
                LpConstraint {
                    coeffs: vec![1.0, 1.0],
                    sense: Sense::Le,
                    rhs: 1.0,
                },
                LpConstraint {
                    coeffs: vec![2.0, 2.0],
                    sense: Sense::Le,
                    rhs: 2.0,
                },
                LpConstraint {
                    coeffs: vec![1.0, 0.0],
                    sense: Sense::Le,
                    rhs: 1.0,
                },
            ],
            lower: vec![0.0, 0.0],
            upper: vec![f64::INFINITY; 2],
        };
        let sol = simplex_solve(&lp).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-9);

        // hand-computed optimum: max 3x + 2y, x + y <= 4, x + 3y <= 6 -> 12
        let lp = LpProblem {
            objective: vec![3.0, 2.0],
            constraints: vec![
                LpConstraint {
                    coeffs: vec![1.0, 1.0],
                    sense: Sense::Le,
                    rhs: 4.0,
                },
                LpConstraint {
                    coeffs: vec![1.0, 3.0],
                    sense: Sense::Le,
                    rhs: 6.0,
                },
            ],
            lower: vec![0.0, 0.0],
            upper: vec![f64::INFINITY; 2],
        };
        let sol = simplex_solve(&lp).unwrap();
        assert!((sol.objective - 12.0).abs() < 1e-9, "{}", sol.objective);

        // ge constraint: max -x s.t. x >= 3 -> -3
        let lp = LpProblem {
            objective: vec![-1.0],
            constraints: vec![LpConstraint {
                coeffs: vec![1.0],
                sense: Sense::Ge,
                rhs: 3.0,
            }],
            lower: vec![0.0],
            upper: vec![10.0],
        };
        let sol = simplex_solve(&lp).unwrap();
        assert!((sol.objective + 3.0).abs() < 1e-9);

        // unbounded detection
        let lp = LpProblem {
            objective: vec![1.0],
            constraints: vec![],
            lower: vec![0.0],
            upper: vec![f64::INFINITY],
        };
        assert!(matches!(simplex_solve(&lp), Err(Error::Unbounded(_))));

        // infeasible detection
        let lp = LpProblem {
            objective: vec![1.0],
            constraints: vec![
                LpConstraint {
                    coeffs: vec![1.0],
                    sense: Sense::Ge,
                    rhs: 5.0,
                },
                LpConstraint {
                    coeffs: vec![1.0],
                    sense: Sense::Le,
                    rhs: 1.0,
                },
            ],
            lower: vec![0.0],
            upper: vec![f64::INFINITY],
        };
        assert!(matches!(simplex_solve(&lp), Err(Error::Infeasible(_))));
    }

    #[test]
    fn dual_d1_uniform_matches_closed_form() {
        let joint = JointPmf::dsbs(0.4).unwrap();
        let inst = DualInstance::new(joint, 1, 0.5, 0.5).unwrap();
        let sol = solve_dual(&inst).unwrap();
        assert!((sol.lp_value + sol.constant - 0.4).abs() < 1e-9);
        assert!((sol.rho_b - 0.4).abs() < 1e-9);
    }

    #[test]
    fn dual_zero_correlation_gives_bias_product() {
        let joint = JointPmf::product_of(&[0.5, 0.5], &[0.5, 0.5]).unwrap();
        let inst = DualInstance::new(joint, 1, 0.25, 0.75).unwrap();
        assert!(inst.kernel_is_singular());
        let sol = solve_dual(&inst).unwrap();
        assert!((sol.rho_b - inst.constant()).abs() < 1e-9);
        assert!(sol.lp_value.abs() < 1e-9);
        assert!((sol.f_coeffs[0] - (2.0 * 0.25 - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn dual_d2_matches_oracle() {
        let joint = JointPmf::dsbs(0.4).unwrap();
        let inst = DualInstance::new(joint.clone(), 2, 0.25, 0.25).unwrap();
        let sol = solve_dual(&inst).unwrap();
        let orc = oracle::brute_force_biased_maxcorr(&joint, 2, 1, 1).unwrap();
        assert!(
            (sol.rho_b - orc.value).abs() < 1e-6,
            "dual {} vs oracle {}",
            sol.rho_b,
            orc.value
        );
        // recovered functions satisfy the primal box
        assert!(sol.f_values.iter().all(|v| v.abs() <= 1.0 + 1e-8));
        assert!(sol.g_values.iter().all(|v| v.abs() <= 1.0 + 1e-8));
    }

    #[test]
    fn dual_rejects_nonuniform_marginals() {
        let joint = JointPmf::binary_from_marginals(0.6, 0.5, 0.3).unwrap();
        assert!(matches!(
            DualInstance::new(joint, 1, 0.5, 0.5),
            Err(Error::UnsupportedHypothesis(_))
        ));
    }

    #[test]
    fn weak_duality_against_sampled_primal_points() {
        use rand::{Rng, SeedableRng};
        let joint = JointPmf::dsbs(0.6).unwrap();
        let inst = DualInstance::new(joint.clone(), 2, 0.5, 0.25).unwrap();
        let sol = solve_dual(&inst).unwrap();
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(21);
        let n = 4;
        let tf = 2.0 * inst.qu1() - 1.0;
        let tg = 2.0 * inst.qv1() - 1.0;
        let mut tested = 0;
        while tested < 100 {
            // random values, then shift to the exact means
            let mut f: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let mut g: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let mf: f64 = f.iter().sum::<f64>() / n as f64;
            let mg: f64 = g.iter().sum::<f64>() / n as f64;
            for v in f.iter_mut() {
                *v += tf - mf;
            }
            for v in g.iter_mut() {
                *v += tg - mg;
            }
            if f.iter().any(|v| v.abs() > 1.0) || g.iter().any(|v| v.abs() > 1.0) {
                continue;
            }
            tested += 1;
            let mut val = 0.0;
            for x in 0..n {
                for y in 0..n {
                    let mut w = 1.0;
                    for c in 1..=2usize {
                        w *= joint.prob(
                            crate::index::digit_at(x, 2, 2, c),
                            crate::index::digit_at(y, 2, 2, c),
                        );
                    }
                    val += w * f[x] * g[y];
                }
            }
            assert!(val <= sol.rho_b + 1e-9, "primal {val} > dual {}", sol.rho_b);
        }
    }

    #[test]
    fn dual_vs_primal_on_small_instances() {
        let joint = JointPmf::dsbs(0.4).unwrap();
        let cfg = FPathConfig {
            d_lambda: 1e-3,
            ..FPathConfig::default()
        };
        for (d, qu1, qv1) in [(1, 0.5, 0.5), (2, 0.25, 0.25), (2, 0.5, 0.75)] {
            let inst = DualInstance::new(joint.clone(), d, qu1, qv1).unwrap();
            let rep = dual_vs_primal_check(&inst, &cfg).unwrap();
            assert!(rep.gap >= -1e-8, "dual below primal: {}", rep.gap);
            if rep.certificate_present && d <= 2 {
                assert!(rep.gap.abs() < 1e-6, "certified gap {}", rep.gap);
            }
        }
    }
}
