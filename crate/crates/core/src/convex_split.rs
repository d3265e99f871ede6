//! The swap-mixing channel and the convex-split bound.
//!
//! For a system register holding `ρ` and `m` catalyst registers holding `σ`,
//! the channel applies a uniformly random swap between the system and one of
//! the registers (including the identity), producing
//! `(1/(m+1)) Σ_{i=0..m} σ ⊗ … ⊗ ρ_(i) ⊗ … ⊗ σ`. Register 0 is the system and
//! the most significant digit of the joint index.

use serde::Serialize;

use crate::catalysis::{self, ConversionParams};
use crate::entropy::{self, ThermalContext};
use crate::simplex::{self, ProbVec, CMP_TOL};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct MixState {
    pub m: u32,
    pub rho: ProbVec,
    pub sigma: ProbVec,
    pub joint: ProbVec,
}

impl MixState {
    /// Marginal distribution of register `j` (0 = system).
    pub fn register_marginal(&self, j: u32) -> ProbVec {
        let d = self.rho.dim();
        let regs = self.m + 1;
        let stride = d.pow(regs - 1 - j);
        let mut out = vec![0.0; d];
        for (idx, &x) in self.joint.entries().iter().enumerate() {
            out[(idx / stride) % d] += x;
        }
        ProbVec::from_vec_unchecked(out)
    }

    /// Joint marginal of the catalyst registers `1..=m`.
    pub fn catalyst_marginal(&self) -> ProbVec {
        let block = self.joint.dim() / self.rho.dim();
        let mut out = vec![0.0; block];
        for chunk in self.joint.entries().chunks(block) {
            for (o, x) in out.iter_mut().zip(chunk) {
                *o += x;
            }
        }
        ProbVec::from_vec_unchecked(out)
    }
}

pub fn mix_channel(rho: &ProbVec, sigma: &ProbVec, m: u32) -> Result<MixState> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    if m == 0 {
        return Err(Error::Domain("convex split needs m >= 1".into()));
    }
    let requested = (rho.dim() as u128).checked_pow(m + 1).unwrap_or(u128::MAX);
    simplex::check_dim(
        "convex-split joint state",
        requested,
        simplex::dimension_cap(),
    )?;
    // all_sigma = σ^{⊗j}; with_rho = Σ over placements of ρ among the first j registers.
    let mut all_sigma = vec![1.0];
    let mut with_rho = vec![0.0];
    for _ in 0..=m {
        let mut next_with = Vec::with_capacity(with_rho.len() * sigma.dim());
        for (&b, &a) in with_rho.iter().zip(&all_sigma) {
            for (&s, &r) in sigma.entries().iter().zip(rho.entries()) {
                next_with.push(b * s + a * r);
            }
        }
        let mut next_all = Vec::with_capacity(all_sigma.len() * sigma.dim());
        for &a in &all_sigma {
            next_all.extend(sigma.iter().map(|s| a * s));
        }
        with_rho = next_with;
        all_sigma = next_all;
    }
    let scale = 1.0 / (m as f64 + 1.0);
    let joint = ProbVec::new(with_rho.into_iter().map(|x| x * scale).collect())?;
    Ok(MixState {
        m,
        rho: rho.clone(),
        sigma: sigma.clone(),
        joint,
    })
}

/// `√(2^{D_∞(ρ‖σ)} / m)` without the reporting cap.
pub fn convex_split_bound_raw(rho: &ProbVec, sigma: &ProbVec, m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("convex split needs m >= 1".into()));
    }
    let dmax = entropy::renyi_divergence(rho, sigma, f64::INFINITY)?;
    Ok((dmax.exp2() / m as f64).sqrt())
}

/// The convex-split bound, capped at 1 (a trace distance never exceeds 1).
///
/// `ρ` must be supported inside `σ`; perturbing `σ` is left to the caller.
pub fn convex_split_bound(rho: &ProbVec, sigma: &ProbVec, m: u32) -> Result<f64> {
    Ok(convex_split_bound_raw(rho, sigma, m)?.min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexSplitCheck {
    pub m: u32,
    /// Trace distance between the mixed joint state and `σ^{⊗(m+1)}`.
    pub empirical: f64,
    pub bound: f64,
    pub ok: bool,
    /// Trace distance of the catalyst registers alone to `σ^{⊗m}`.
    pub catalyst_distance: f64,
}

impl ConvexSplitCheck {
    /// `empirical / bound`, tightness telemetry only.
    pub fn ratio(&self) -> f64 {
        self.empirical / self.bound
    }
}

pub fn verify_convex_split(rho: &ProbVec, sigma: &ProbVec, m: u32) -> Result<ConvexSplitCheck> {
    let bound = convex_split_bound(rho, sigma, m)?;
    let state = mix_channel(rho, sigma, m)?;
    let target = simplex::tensor_power(sigma, m + 1)?;
    let empirical = simplex::trace_distance(&state.joint, &target)?;
    let cat_target = simplex::tensor_power(sigma, m)?;
    let catalyst_distance = simplex::trace_distance(&state.catalyst_marginal(), &cat_target)?;
    Ok(ConvexSplitCheck {
        m,
        empirical,
        bound,
        ok: empirical <= bound + CMP_TOL,
        catalyst_distance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorCurvePoint {
    pub n: u64,
    pub r_n: f64,
    /// `n · r_n`, the number of intermediate copies.
    pub m: f64,
    pub delta: f64,
    pub nu: f64,
    pub eps_c_bound: f64,
    pub eps_s_bound: f64,
    /// True when `r_n = 0` and both bounds are reported as 1.
    pub vacuous: bool,
}

/// Catalyst and system error bounds of the embezzling protocol as a function
/// of the number `n` of catalyst copies.
///
/// `n` copies of `ω` are converted into `m = n r_n` copies of `σ` (trivial
/// Hamiltonians on both), with error `δ = e^{−n^κ}`; the convex split then
/// costs `ν = √(2^{D_∞(ρ‖σ)} / m)`. The catalyst bound is `2δ + ν`. The system
/// ends in the register marginal `(mσ + ρ)/(m + 1)`, which sits at distance
/// `T(ρ,σ)/(m+1)` from `σ`, so its bound is `δ + T(ρ,σ)/(m+1)`.
pub fn theorem1_error_curve(
    rho: &ProbVec,
    sigma: &ProbVec,
    omega: &ProbVec,
    n_list: &[u64],
    kappa: f64,
) -> Result<Vec<ErrorCurvePoint>> {
    let dmax = entropy::renyi_divergence(rho, sigma, f64::INFINITY)?;
    let t = simplex::trace_distance(rho, sigma)?;
    n_list
        .iter()
        .map(|&n| {
            let rate = catalysis::conversion_rate(&ConversionParams {
                kappa,
                n,
                source: omega.clone(),
                target: sigma.clone(),
                source_ctx: ThermalContext::degenerate(omega.dim()),
                target_ctx: ThermalContext::degenerate(sigma.dim()),
            })?;
            let delta = rate.delta_bound;
            let m = n as f64 * rate.r_n;
            if rate.r_n <= 0.0 {
                return Ok(ErrorCurvePoint {
                    n,
                    r_n: 0.0,
                    m: 0.0,
                    delta,
                    nu: 1.0,
                    eps_c_bound: 1.0,
                    eps_s_bound: 1.0,
                    vacuous: true,
                });
            }
            let nu = (dmax.exp2() / m).sqrt();
            Ok(ErrorCurvePoint {
                n,
                r_n: rate.r_n,
                m,
                delta,
                nu,
                eps_c_bound: catalysis::catalyst_error_budget(delta, nu)?,
                eps_s_bound: delta + t / (m + 1.0),
                vacuous: false,
            })
        })
        .collect()
}
