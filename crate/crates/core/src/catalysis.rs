//! Second laws, Duan catalysts, k-copy search and the closed-form bounds of the
//! catalytic protocol.
//!
//! "For all α ≥ 0" is replaced by an [`AlphaGrid`]; results carry the smallest
//! free-energy gap seen on the grid so that near-touching cases are visible.

use serde::Serialize;

use crate::entropy::{self, AlphaGrid, ThermalContext};
use crate::majorization;
use crate::simplex::{self, ProbVec};
use crate::{Error, Result};

/// Free-energy gaps in `[-tol, tol]` away from α = 0 are flagged as sensitive
/// to the grid resolution.
pub const GRID_SENSITIVITY: f64 = 1e-6;
/// Tolerance of the second-law comparison.
pub const SECOND_LAW_TOL: f64 = 1e-10;
/// Default cap on copies searched by [`min_k_copy`].
pub const DEFAULT_K_MAX: u32 = 12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecondLaws {
    pub holds: bool,
    /// `min_α F_α(p) − F_α(q)` over the whole grid.
    pub margin: f64,
    /// Same minimum over α > 0. For full-support states both `D_0` vanish, so
    /// `margin` is pinned at zero and this is the informative number.
    pub strict_margin: f64,
    /// Order at which `strict_margin` is attained (`inf` serialized as null).
    pub worst_alpha: f64,
    pub grid_sensitive: bool,
}

/// Checks `F_α(p) ≥ F_α(q)` on every grid point.
///
/// Gaps are computed as `ln2 (D_α(p‖g) − D_α(q‖g)) / β`, which is exactly the
/// free-energy difference without the `ln Z` offset.
pub fn second_laws(
    p: &ProbVec,
    q: &ProbVec,
    ctx: &ThermalContext,
    grid: &AlphaGrid,
) -> Result<SecondLaws> {
    let g = ctx.gibbs();
    let scale = std::f64::consts::LN_2 / ctx.beta();
    let mut margin = f64::INFINITY;
    let mut strict = f64::INFINITY;
    let mut worst = f64::NAN;
    for alpha in grid.iter() {
        let gap = scale
            * (entropy::renyi_divergence(p, g, alpha)? - entropy::renyi_divergence(q, g, alpha)?);
        margin = margin.min(gap);
        if alpha > 0.0 && gap < strict {
            strict = gap;
            worst = alpha;
        }
    }
    Ok(SecondLaws {
        holds: margin >= -SECOND_LAW_TOL,
        margin,
        strict_margin: strict,
        worst_alpha: worst,
        grid_sensitive: strict.abs() <= GRID_SENSITIVITY,
    })
}

/// Convenience form returning `(holds, margin)`.
pub fn second_laws_holds(
    p: &ProbVec,
    q: &ProbVec,
    ctx: &ThermalContext,
    grid: &AlphaGrid,
) -> Result<(bool, f64)> {
    let s = second_laws(p, q, ctx, grid)?;
    Ok((s.holds, s.margin))
}

/// One block of a Duan catalyst: `q^{⊗q_power} ⊗ p^{⊗p_power}` with weight `1/k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DuanBlock {
    pub weight: f64,
    pub q_power: u32,
    pub p_power: u32,
}

/// Symbolic Duan catalyst `(1/k) ⊕_{i=1..k} q^{⊗(k−i)} ⊗ p^{⊗(i−1)}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DuanSpec {
    pub k: u32,
    pub p_state: ProbVec,
    pub q_state: ProbVec,
    pub blocks: Vec<DuanBlock>,
    pub total_dim: u128,
}

impl DuanSpec {
    pub fn materialize(&self) -> Result<ProbVec> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let qpow = simplex::tensor_power(&self.q_state, b.q_power)?;
                let ppow = simplex::tensor_power(&self.p_state, b.p_power)?;
                Ok((b.weight, simplex::tensor(&qpow, &ppow)?))
            })
            .collect::<Result<Vec<_>>>()?;
        simplex::direct_sum(&blocks)
    }

    /// Hamiltonian of the catalyst register: each block carries `k − 1` copies
    /// of the system Hamiltonian, so its Gibbs state is `(1/k) ⊕ g^{⊗(k−1)}`.
    /// For a trivial Hamiltonian this is uniform.
    pub fn catalyst_context(&self, ctx: &ThermalContext) -> Result<ThermalContext> {
        let n = simplex::check_dim("Duan catalyst", self.total_dim, simplex::dimension_cap())?;
        if ctx.is_uniform() {
            return Ok(ThermalContext::degenerate(n));
        }
        let gk = simplex::tensor_power(ctx.gibbs(), self.k - 1)?;
        let w = 1.0 / self.k as f64;
        let blocks: Vec<(f64, ProbVec)> = (0..self.k).map(|_| (w, gk.clone())).collect();
        ThermalContext::from_gibbs(simplex::direct_sum(&blocks)?)
    }
}

pub fn duan_state(p: &ProbVec, q: &ProbVec, k: u32) -> Result<DuanSpec> {
    if k == 0 {
        return Err(Error::Domain("Duan state needs k >= 1".into()));
    }
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let total_dim = (p.dim() as u128)
        .checked_pow(k - 1)
        .and_then(|x| x.checked_mul(k as u128))
        .unwrap_or(u128::MAX);
    simplex::check_dim("Duan catalyst", total_dim, simplex::dimension_cap())?;
    let w = 1.0 / k as f64;
    let blocks = (1..=k)
        .map(|i| DuanBlock {
            weight: w,
            q_power: k - i,
            p_power: i - 1,
        })
        .collect();
    Ok(DuanSpec {
        k,
        p_state: p.clone(),
        q_state: q.clone(),
        blocks,
        total_dim,
    })
}

fn k_copy_holds(p: &ProbVec, q: &ProbVec, ctx: &ThermalContext, k: u32) -> Result<bool> {
    let pk = simplex::tensor_power(p, k)?;
    let qk = simplex::tensor_power(q, k)?;
    let ck = if ctx.is_uniform() {
        ThermalContext::degenerate(pk.dim())
    } else {
        let mut c = ctx.clone();
        for _ in 1..k {
            c = c.tensor(ctx)?;
        }
        c
    };
    majorization::thermo_majorizes(&pk, &qk, &ck)
}

/// `(p^{⊗k} ≻_T q^{⊗k}, p ⊗ z ≻_T q ⊗ z)` for the Duan catalyst `z`.
///
/// The first implies the second; a violation is a bug and panics in debug
/// builds.
pub fn duan_catalysis_check(
    p: &ProbVec,
    q: &ProbVec,
    k: u32,
    ctx: &ThermalContext,
) -> Result<(bool, bool)> {
    let kcopy = k_copy_holds(p, q, ctx, k)?;
    let spec = duan_state(p, q, k)?;
    let z = spec.materialize()?;
    let joint = ctx.tensor(&spec.catalyst_context(ctx)?)?;
    let catalytic =
        majorization::thermo_majorizes(&simplex::tensor(p, &z)?, &simplex::tensor(q, &z)?, &joint)?;
    debug_assert!(
        !kcopy || catalytic,
        "k-copy transformable but Duan check failed"
    );
    Ok((kcopy, catalytic))
}

/// When `p` and `q` have the same support, the last segment of each
/// thermo-majorization curve has slope `min p_i/g_i` (resp. `q`), and both
/// curves end at the same point. So `p^{⊗k} ≻_T q^{⊗k}` needs
/// `(min p_i/g_i)^k ≤ (min q_i/g_i)^k` for every `k`. Checking this once, in
/// ratio form, keeps float round-off in products of tiny entries from
/// producing spurious large-`k` hits.
fn lower_tail_obstructed(p: &ProbVec, q: &ProbVec, ctx: &ThermalContext) -> bool {
    let g = ctx.gibbs();
    if p.iter().zip(q.iter()).any(|(a, b)| (a > 0.0) != (b > 0.0)) {
        return false;
    }
    let min_ratio = |x: &ProbVec| {
        x.iter()
            .zip(g.iter())
            .filter(|&(a, _)| a > 0.0)
            .map(|(a, gi)| a / gi)
            .fold(f64::INFINITY, f64::min)
    };
    min_ratio(p) > min_ratio(q) * (1.0 + 1e-12)
}

/// Smallest `k ≤ k_max` with `p^{⊗k} ≻_T q^{⊗k}`.
///
/// Every `k` is tested; nothing assumes the property is monotone in `k`. A
/// resource-cap breach is reported with the `k` at which it happened. Pairs
/// whose smallest Gibbs-rescaled entry is larger for `p` than for `q` (with
/// equal supports) return `None` without building any tensor power.
pub fn min_k_copy(
    p: &ProbVec,
    q: &ProbVec,
    ctx: &ThermalContext,
    k_max: u32,
) -> Result<Option<u32>> {
    if p.dim() != q.dim() || p.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim().max(ctx.dim()),
        });
    }
    if lower_tail_obstructed(p, q, ctx) {
        return Ok(None);
    }
    for k in 1..=k_max {
        match k_copy_holds(p, q, ctx, k) {
            Ok(true) => return Ok(Some(k)),
            Ok(false) => {}
            Err(Error::ResourceLimit {
                what,
                requested,
                cap,
            }) => {
                return Err(Error::ResourceLimit {
                    what: format!("{what} at k = {k}"),
                    requested,
                    cap,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// `(d_S − 1) / (1 + (d_S − 1) log₂ d_C)`.
pub fn embezzlement_bound(d_s: u64, d_c: u64) -> f64 {
    let a = (d_s as f64) - 1.0;
    a / (1.0 + a * (d_c as f64).log2())
}

/// Inputs of the finite-`n` conversion rate between `n` copies of a source and
/// `n r_n` copies of a target. Source and target may live on different systems,
/// hence the two contexts.
#[derive(Clone, Debug)]
pub struct ConversionParams {
    pub kappa: f64,
    pub n: u64,
    pub source: ProbVec,
    pub target: ProbVec,
    pub source_ctx: ThermalContext,
    pub target_ctx: ThermalContext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateClamp {
    None,
    Zero,
    Asymptotic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConversionRate {
    /// Clamped rate.
    pub r_n: f64,
    /// Formula value before clamping.
    pub raw_r_n: f64,
    /// `D(source‖g) / D(target‖g)`.
    pub asymptotic: f64,
    pub v: f64,
    /// `floor(n · r_n)`.
    pub m: u64,
    /// `e^{−n^κ}`.
    pub delta_bound: f64,
    pub clamp: RateClamp,
}

/// Second-order conversion rate
/// `r_n = (D_s/D_t)(1 − √(2V_s/D_s) |1 − 1/√v| / √(n^{1−κ}))`,
/// `v = (V_s/D_s)/(V_t/D_t)`, all in bits.
pub fn conversion_rate(params: &ConversionParams) -> Result<ConversionRate> {
    let ConversionParams {
        kappa,
        n,
        source,
        target,
        source_ctx,
        target_ctx,
    } = params;
    if !(*kappa > 0.0 && *kappa < 1.0) {
        return Err(Error::Domain(format!(
            "kappa must lie in (0,1), got {kappa}"
        )));
    }
    if *n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let d_s = entropy::relative_entropy(source, source_ctx.gibbs())?;
    let d_t = entropy::relative_entropy(target, target_ctx.gibbs())?;
    if d_t <= 0.0 {
        return Err(Error::UndefinedRate("target is the Gibbs state".into()));
    }
    if d_s <= 0.0 {
        return Err(Error::UndefinedRate("source is the Gibbs state".into()));
    }
    let v_s = entropy::relative_entropy_variance(source, source_ctx.gibbs())?;
    let v_t = entropy::relative_entropy_variance(target, target_ctx.gibbs())?;
    if v_s <= 0.0 || v_t <= 0.0 {
        return Err(Error::UndefinedRate(
            "a relative-entropy variance vanishes, so v is undefined".into(),
        ));
    }
    let asymptotic = d_s / d_t;
    let v = (v_s / d_s) / (v_t / d_t);
    let nf = *n as f64;
    let correction =
        (2.0 * v_s / d_s).sqrt() * (1.0 - 1.0 / v.sqrt()).abs() / nf.powf(1.0 - kappa).sqrt();
    let raw = asymptotic * (1.0 - correction);
    let (r_n, clamp) = if raw < 0.0 {
        (0.0, RateClamp::Zero)
    } else if raw > asymptotic {
        (asymptotic, RateClamp::Asymptotic)
    } else {
        (raw, RateClamp::None)
    };
    Ok(ConversionRate {
        r_n,
        raw_r_n: raw,
        asymptotic,
        v,
        m: (nf * r_n).floor() as u64,
        delta_bound: delta_bound(*n, *kappa),
        clamp,
    })
}

/// `e^{−n^κ}`.
pub fn delta_bound(n: u64, kappa: f64) -> f64 {
    (-(n as f64).powf(kappa)).exp()
}

/// `2δ + ν`.
pub fn catalyst_error_budget(delta: f64, nu: f64) -> Result<f64> {
    if !(delta >= 0.0 && nu >= 0.0) {
        return Err(Error::Domain("error terms must be nonnegative".into()));
    }
    Ok(2.0 * delta + nu)
}

/// Copies of `omega` needed to distill one Duan catalyst:
/// `(log₂ D − H(z)) / (log₂ d_C − H(ω))` with `D = k d_S^{k−1}`.
pub fn copies_lower_bound(duan: &DuanSpec, omega: &ProbVec) -> Result<f64> {
    let denom = (omega.dim() as f64).log2() - entropy::shannon(omega);
    if denom <= 1e-14 {
        return Err(Error::InfiniteCopies);
    }
    let z = duan.materialize()?;
    let numer = (duan.total_dim as f64).log2() - entropy::shannon(&z);
    Ok(numer.max(0.0) / denom)
}
