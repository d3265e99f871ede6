//! Majorization, thermo-majorization curves and the ε-flattest state.
//!
//! Thermo-majorization is decided by comparing the concave curve of the
//! candidate source against the lower curve at the lower curve's elbows only.
//! Between two elbows the lower curve is linear and the upper curve concave, so
//! checking the endpoints suffices.

use crate::entropy::ThermalContext;
use crate::simplex::{self, ProbVec, CMP_TOL};
use crate::{Error, Result};

/// Smallest prefix-sum gap `Σ_{i<k} p↓_i − Σ_{i<k} q↓_i` over all `k`.
/// Shorter vectors are zero-padded.
pub fn majorization_margin(p: &ProbVec, q: &ProbVec) -> f64 {
    let n = p.dim().max(q.dim());
    let ps = simplex::sort_desc(&p.padded(n));
    let qs = simplex::sort_desc(&q.padded(n));
    let (mut sp, mut sq) = (0.0, 0.0);
    let mut margin = f64::INFINITY;
    // The full sum (k = n) is 1 − 1 and carries no information.
    for i in 0..n.saturating_sub(1) {
        sp += ps[i];
        sq += qs[i];
        margin = margin.min(sp - sq);
    }
    if margin.is_infinite() {
        0.0
    } else {
        margin
    }
}

/// `p ≻ q`: every prefix sum of sorted `p` dominates that of sorted `q`.
pub fn majorizes(p: &ProbVec, q: &ProbVec) -> bool {
    majorization_margin(p, q) >= -CMP_TOL
}

/// Piecewise-linear thermo-majorization curve.
#[derive(Clone, Debug, PartialEq)]
pub struct TMCurve {
    /// `(cumulative Gibbs weight, cumulative probability)`, starting at `(0,0)`.
    pub elbows: Vec<(f64, f64)>,
    /// The beta-order: `order[r]` is the level placed at rank `r`.
    pub order: Vec<usize>,
}

impl TMCurve {
    /// Linear interpolation between elbows; `x` is clamped to `[0, 1]`.
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let e = &self.elbows;
        let j = e.partition_point(|&(ex, _)| ex < x);
        if j == 0 {
            return e[0].1;
        }
        if j == e.len() {
            return e[e.len() - 1].1;
        }
        let ((x0, y0), (x1, y1)) = (e[j - 1], e[j]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Slopes of consecutive segments are nonincreasing within `tol`.
    pub fn is_concave(&self, tol: f64) -> bool {
        let slopes: Vec<f64> = self
            .elbows
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        slopes
            .windows(2)
            .all(|s| s[1] <= s[0] + tol * s[0].abs().max(1.0))
    }
}

fn check_ctx(p: &ProbVec, ctx: &ThermalContext) -> Result<()> {
    if p.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: ctx.dim(),
        });
    }
    if let Some(i) = ctx.gibbs().iter().position(|g| g <= 0.0) {
        return Err(Error::Support {
            index: i,
            detail: "zero Gibbs weight".into(),
        });
    }
    Ok(())
}

/// Beta-order `p` by `p_i / g_i` (descending, ties by index) and accumulate.
pub fn tm_curve(p: &ProbVec, ctx: &ThermalContext) -> Result<TMCurve> {
    check_ctx(p, ctx)?;
    let g = ctx.gibbs();
    let ratio: Vec<f64> = p.iter().zip(g.iter()).map(|(a, b)| a / b).collect();
    let mut order: Vec<usize> = (0..p.dim()).collect();
    order.sort_by(|&a, &b| ratio[b].total_cmp(&ratio[a]));
    let mut elbows = Vec::with_capacity(p.dim() + 1);
    elbows.push((0.0, 0.0));
    let (mut x, mut y) = (0.0, 0.0);
    for &i in &order {
        x += g[i];
        y += p[i];
        elbows.push((x, y));
    }
    Ok(TMCurve { elbows, order })
}

/// Minimum of `curve_p(x) − curve_q(x)` over the elbows of `curve_q`.
pub fn tm_margin(p: &ProbVec, q: &ProbVec, ctx: &ThermalContext) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let cp = tm_curve(p, ctx)?;
    let cq = tm_curve(q, ctx)?;
    Ok(curve_margin(&cp, &cq))
}

/// Both curves' abscissae are increasing, so one merge pass evaluates `upper`
/// at every elbow of `lower`. The last elbow (x = 1) is skipped: both curves
/// end at height 1 and rounding there is noise.
fn curve_margin(upper: &TMCurve, lower: &TMCurve) -> f64 {
    let ue = &upper.elbows;
    let mut j = 1;
    let mut margin = f64::INFINITY;
    for &(x, y) in &lower.elbows[1..lower.elbows.len() - 1] {
        while j < ue.len() - 1 && ue[j].0 < x {
            j += 1;
        }
        let ((x0, y0), (x1, y1)) = (ue[j - 1], ue[j]);
        let at = if x1 > x0 {
            y0 + (y1 - y0) * ((x - x0) / (x1 - x0)).clamp(0.0, 1.0)
        } else {
            y1
        };
        margin = margin.min(at - y);
    }
    if margin.is_infinite() {
        0.0
    } else {
        margin
    }
}

/// `p ≻_T q` with respect to `ctx`.
pub fn thermo_majorizes(p: &ProbVec, q: &ProbVec, ctx: &ThermalContext) -> Result<bool> {
    Ok(tm_margin(p, q, ctx)? >= -CMP_TOL)
}

/// Saturation point of flattening: the mass that must move to reach uniform.
pub fn flattening_saturation(q: &ProbVec) -> f64 {
    let u = 1.0 / q.dim() as f64;
    q.iter().map(|x| (x - u).max(0.0)).sum()
}

/// The ε-flattest state near `q` by water-filling.
///
/// The largest entries are lowered to a common cap and the smallest raised to
/// a common floor, each moving `min(eps, saturation)` of mass. Entries keep
/// their positions. If `eps` reaches the saturation point the result is
/// uniform.
pub fn flattest_state(q: &ProbVec, eps: f64) -> Result<ProbVec> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::Domain(format!("eps must be >= 0, got {eps}")));
    }
    let d = q.dim();
    let sat = flattening_saturation(q);
    if eps == 0.0 || sat == 0.0 {
        return Ok(q.clone());
    }
    if eps >= sat {
        return Ok(ProbVec::uniform(d));
    }
    let m = eps;
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| q[b].total_cmp(&q[a]));

    // Cap: lower the top k entries to a = (Σ top k − m)/k, the first k with a ≥ next.
    let mut s = 0.0;
    let mut cap = (0usize, 0.0);
    for k in 1..=d {
        s += q[idx[k - 1]];
        let a = (s - m) / k as f64;
        let next = if k < d { q[idx[k]] } else { f64::NEG_INFINITY };
        if a >= next {
            cap = (k, a);
            break;
        }
    }
    // Floor: raise the bottom k entries to b = (Σ bottom k + m)/k.
    let mut s = 0.0;
    let mut floor = (0usize, 0.0);
    for k in 1..=d {
        s += q[idx[d - k]];
        let b = (s + m) / k as f64;
        let next = if k < d {
            q[idx[d - k - 1]]
        } else {
            f64::INFINITY
        };
        if b <= next {
            floor = (k, b);
            break;
        }
    }
    debug_assert!(cap.0 + floor.0 <= d);
    let mut out = q.entries().to_vec();
    for &i in &idx[..cap.0] {
        out[i] = cap.1;
    }
    for &i in &idx[d - floor.0..] {
        out[i] = floor.1;
    }
    ProbVec::new(out)
}

/// The sampled-catalyst test: does `p ⊗ c ≻_T q ⊗ c̃` hold for `c̃` the
/// ε-flattest state of `c`? The catalyst carries a trivial Hamiltonian.
///
/// This is a sufficient heuristic, not a decision procedure: another `c̃` in
/// the ε-ball could succeed where the flattest one fails.
pub fn eps_catalytic_step(
    p: &ProbVec,
    q: &ProbVec,
    c: &ProbVec,
    eps: f64,
    ctx: &ThermalContext,
) -> Result<bool> {
    Ok(eps_catalytic_margin(p, q, c, eps, ctx)? >= -CMP_TOL)
}

/// Margin form of [`eps_catalytic_step`].
pub fn eps_catalytic_margin(
    p: &ProbVec,
    q: &ProbVec,
    c: &ProbVec,
    eps: f64,
    ctx: &ThermalContext,
) -> Result<f64> {
    let c_out = flattest_state(c, eps)?;
    let pc = simplex::tensor(p, c)?;
    let qc = simplex::tensor(q, &c_out)?;
    let joint = ctx.tensor(&ThermalContext::degenerate(c.dim()))?;
    tm_margin(&pc, &qc, &joint)
}
