//! Entropies, Rényi divergences and generalized free energies.
//!
//! Everything information-theoretic is in bits. `alpha = f64::INFINITY` selects
//! the min-entropy / max-divergence limit. Free energies are in energy units and
//! pass through `ln 2`.

use std::f64::consts::LN_2;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::simplex::{self, ProbVec};
use crate::{Error, Result};

/// Exact rational Gibbs weights `g_i = d_i / D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalForm {
    pub denominator: u64,
    pub numerators: Vec<u64>,
}

/// Hamiltonian levels plus inverse temperature, with the derived Gibbs state.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalContext {
    energies: Vec<f64>,
    beta: f64,
    gibbs: ProbVec,
    /// Natural log of the partition function.
    log_z: f64,
    rational: Option<RationalForm>,
}

impl ThermalContext {
    pub fn new(energies: Vec<f64>, beta: f64) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::Domain(
                "thermal context needs at least one level".into(),
            ));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("beta must be positive, got {beta}")));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::Domain("energies must be finite".into()));
        }
        let logits: Vec<f64> = energies.iter().map(|e| -beta * e).collect();
        let log_z = log_sum_exp(&logits);
        let g: Vec<f64> = logits.iter().map(|l| (l - log_z).exp()).collect();
        if g.iter().any(|&x| x <= 0.0) {
            return Err(Error::Domain(
                "a Gibbs weight underflows to zero; energies too spread for this beta".into(),
            ));
        }
        let gibbs = ProbVec::from_weights(g)?;
        Ok(Self {
            energies,
            beta,
            gibbs,
            log_z,
            rational: None,
        })
    }

    /// Trivial Hamiltonian on `dim` levels: energies zero, `beta = 1`, Gibbs uniform.
    pub fn degenerate(dim: usize) -> Self {
        assert!(dim > 0);
        let rational = RationalForm {
            denominator: dim as u64,
            numerators: vec![1; dim],
        };
        Self {
            energies: vec![0.0; dim],
            beta: 1.0,
            gibbs: ProbVec::uniform(dim),
            log_z: (dim as f64).ln(),
            rational: Some(rational),
        }
    }

    /// Context whose Gibbs state is exactly `d_i / Σd`: `beta = 1`, `E_i = −ln d_i`.
    pub fn from_rational(numerators: &[u64]) -> Result<Self> {
        if numerators.is_empty() || numerators.contains(&0) {
            return Err(Error::Domain(
                "rational Gibbs numerators must be positive".into(),
            ));
        }
        let denom: u64 = numerators.iter().sum();
        let energies = numerators.iter().map(|&d| -(d as f64).ln()).collect();
        let gibbs = ProbVec::from_weights(numerators.iter().map(|&d| d as f64).collect())?;
        Ok(Self {
            energies,
            beta: 1.0,
            gibbs,
            log_z: (denom as f64).ln(),
            rational: Some(RationalForm {
                denominator: denom,
                numerators: numerators.to_vec(),
            }),
        })
    }

    /// Context with a prescribed full-support Gibbs vector (`beta = 1`, `Z = 1`).
    pub fn from_gibbs(gibbs: ProbVec) -> Result<Self> {
        if let Some(i) = gibbs.iter().position(|g| g <= 0.0) {
            return Err(Error::Support {
                index: i,
                detail: "Gibbs weights must be strictly positive".into(),
            });
        }
        Ok(Self {
            energies: gibbs.iter().map(|g| -g.ln()).collect(),
            beta: 1.0,
            gibbs,
            log_z: 0.0,
            rational: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.gibbs.dim()
    }
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gibbs(&self) -> &ProbVec {
        &self.gibbs
    }
    /// `ln Z`.
    pub fn log_z(&self) -> f64 {
        self.log_z
    }
    pub fn rational_form(&self) -> Option<&RationalForm> {
        self.rational.as_ref()
    }

    /// True when all Gibbs weights agree to a few ulps.
    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.dim() as f64;
        self.gibbs
            .iter()
            .all(|g| (g - u).abs() <= 4.0 * f64::EPSILON * u)
    }

    /// Non-interacting composite `self ⊗ other`. The other factor's energies are
    /// rescaled to this context's temperature so the Gibbs state is the product.
    pub fn tensor(&self, other: &ThermalContext) -> Result<ThermalContext> {
        let gibbs = simplex::tensor(&self.gibbs, &other.gibbs)?;
        let scale = other.beta / self.beta;
        let mut energies = Vec::with_capacity(gibbs.dim());
        for &a in &self.energies {
            energies.extend(other.energies.iter().map(|&b| a + b * scale));
        }
        let rational = match (&self.rational, &other.rational) {
            (Some(x), Some(y)) => {
                x.denominator
                    .checked_mul(y.denominator)
                    .map(|denominator| RationalForm {
                        denominator,
                        numerators: x
                            .numerators
                            .iter()
                            .flat_map(|&a| y.numerators.iter().map(move |&b| a * b))
                            .collect(),
                    })
            }
            _ => None,
        };
        Ok(ThermalContext {
            energies,
            beta: self.beta,
            gibbs,
            log_z: self.log_z + other.log_z,
            rational,
        })
    }

    fn check_dim(&self, p: &ProbVec) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: p.dim(),
                right: self.dim(),
            });
        }
        Ok(())
    }

    /// Parse `{"energies":[..],"beta":..}`, `{"degenerate":d}` or `{"gibbs":[..]}`.
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("thermal context must be a JSON object".into()))?;
        if let Some(d) = obj.get("degenerate") {
            let d = d
                .as_u64()
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::Parse("\"degenerate\" must be a positive integer".into()))?;
            return Ok(Self::degenerate(d as usize));
        }
        if let Some(g) = obj.get("gibbs") {
            let g: Vec<f64> = serde_json::from_value(g.clone())?;
            return Self::from_gibbs(ProbVec::new(g)?);
        }
        let energies: Vec<f64> = serde_json::from_value(
            obj.get("energies")
                .cloned()
                .ok_or_else(|| Error::Parse("thermal context needs \"energies\"".into()))?,
        )?;
        let beta = obj
            .get("beta")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Parse("thermal context needs numeric \"beta\"".into()))?;
        Self::new(energies, beta)
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::json!({ "energies": self.energies, "beta": self.beta })
    }
}

impl FromStr for ThermalContext {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s.trim())?;
        Self::from_json_value(&v)
    }
}

/// Finite set of Rényi orders standing in for "all α ≥ 0".
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaGrid {
    values: Vec<f64>,
    include_infinity: bool,
}

impl AlphaGrid {
    /// Sorts and deduplicates; 0 and 1 are always added.
    pub fn new(mut values: Vec<f64>, include_infinity: bool) -> Result<Self> {
        if values.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::Domain(
                "alpha grid values must be finite and nonnegative".into(),
            ));
        }
        values.push(0.0);
        values.push(1.0);
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Self {
            values,
            include_infinity,
        })
    }

    /// `{0} ∪ 120 log-spaced points in [1e-3, 1e3] ∪ {1} ∪ {∞}`.
    pub fn default_grid() -> Self {
        let pts = (0..120).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / 119.0));
        Self::new(pts.collect(), true).expect("default grid is valid")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn include_infinity(&self) -> bool {
        self.include_infinity
    }

    /// All orders, with `f64::INFINITY` last when included.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .copied()
            .chain(self.include_infinity.then_some(f64::INFINITY))
    }

    pub fn len(&self) -> usize {
        self.values.len() + self.include_infinity as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self::default_grid()
    }
}

/// `"default"` or a comma list such as `0.5,1,2,inf`.
impl FromStr for AlphaGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("default") {
            return Ok(Self::default_grid());
        }
        let mut vals = Vec::new();
        let mut inf = false;
        for tok in t.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            if matches!(tok.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
                inf = true;
            } else {
                vals.push(
                    tok.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("alpha {tok:?}: {e}")))?,
                );
            }
        }
        Self::new(vals, inf)
    }
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::Domain(format!("alpha must be >= 0, got {alpha}")));
    }
    Ok(())
}

/// Natural log of `Σ_i w_i e^{x_i}` for weights summing to one. Near `x = 0`
/// the `expm1`/`ln_1p` form avoids cancellation; elsewhere log-sum-exp avoids
/// overflow.
fn log_mean_exp(weights_and_exps: &[(f64, f64)]) -> f64 {
    let small = weights_and_exps.iter().all(|&(_, x)| x.abs() < 0.5);
    if small {
        let s: f64 = weights_and_exps.iter().map(|&(w, x)| w * x.exp_m1()).sum();
        s.ln_1p()
    } else {
        let xs: Vec<f64> = weights_and_exps.iter().map(|&(w, x)| w.ln() + x).collect();
        log_sum_exp(&xs)
    }
}

pub fn shannon(p: &ProbVec) -> f64 {
    -p.iter()
        .filter(|&x| x > 0.0)
        .map(|x| x * x.log2())
        .sum::<f64>()
}

/// Rényi entropy `H_α(p)` in bits.
pub fn renyi_entropy(p: &ProbVec, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 0.0 {
        return Ok((p.support_size() as f64).log2());
    }
    if alpha == 1.0 {
        return Ok(shannon(p));
    }
    if alpha == f64::INFINITY {
        return Ok(-p.max().log2());
    }
    // Σ p^α = Σ p · e^{(α−1) ln p}
    let terms: Vec<(f64, f64)> = p
        .iter()
        .filter(|&x| x > 0.0)
        .map(|x| (x, (alpha - 1.0) * x.ln()))
        .collect();
    Ok(log_mean_exp(&terms) / ((1.0 - alpha) * LN_2))
}

fn check_pair(p: &ProbVec, q: &ProbVec) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    Ok(())
}

fn support_violation(p: &ProbVec, q: &ProbVec) -> Option<usize> {
    p.iter()
        .zip(q.iter())
        .position(|(a, b)| a > 0.0 && b <= 0.0)
}

fn support_error(index: usize) -> Error {
    Error::Support {
        index,
        detail: "p has mass where q vanishes".into(),
    }
}

/// `D(p‖q) = Σ p log₂(p/q)`.
pub fn relative_entropy(p: &ProbVec, q: &ProbVec) -> Result<f64> {
    check_pair(p, q)?;
    if let Some(i) = support_violation(p, q) {
        return Err(support_error(i));
    }
    let d: f64 = p
        .iter()
        .zip(q.iter())
        .filter(|&(a, _)| a > 0.0)
        .map(|(a, b)| a * (a / b).log2())
        .sum();
    Ok(d.max(0.0))
}

/// Varentropy `V(p) = Σ p (−log₂ p − H(p))²`.
pub fn entropy_variance(p: &ProbVec) -> f64 {
    let h = shannon(p);
    p.iter()
        .filter(|&x| x > 0.0)
        .map(|x| x * (-x.log2() - h).powi(2))
        .sum()
}

/// `V(p‖q) = Σ p (log₂(p/q) − D(p‖q))²`.
pub fn relative_entropy_variance(p: &ProbVec, q: &ProbVec) -> Result<f64> {
    let d = relative_entropy(p, q)?;
    Ok(p.iter()
        .zip(q.iter())
        .filter(|&(a, _)| a > 0.0)
        .map(|(a, b)| a * ((a / b).log2() - d).powi(2))
        .sum())
}

/// Rényi divergence `D_α(p‖q)` in bits.
///
/// For `0 < α < 1` the divergence is finite even when `p` leaves the support
/// of `q`; for `α ≥ 1` that is a support error.
pub fn renyi_divergence(p: &ProbVec, q: &ProbVec, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_pair(p, q)?;
    if alpha == 0.0 {
        let mass: f64 = p
            .iter()
            .zip(q.iter())
            .filter(|&(a, _)| a > 0.0)
            .map(|(_, b)| b)
            .sum();
        if mass <= 0.0 {
            return Err(Error::Domain(
                "D_0 is infinite: supports of p and q are disjoint".into(),
            ));
        }
        return Ok((-mass.log2()).max(0.0));
    }
    let violation = support_violation(p, q);
    if alpha >= 1.0 {
        if let Some(i) = violation {
            return Err(support_error(i));
        }
    }
    if alpha == 1.0 {
        return relative_entropy(p, q);
    }
    if alpha == f64::INFINITY {
        let m = p
            .iter()
            .zip(q.iter())
            .filter(|&(a, _)| a > 0.0)
            .map(|(a, b)| a / b)
            .fold(0.0, f64::max);
        return Ok(m.log2().max(0.0));
    }
    // Σ p^α q^{1−α} = Σ_{supp p ∩ supp q} p · e^{(1−α) ln(q/p)}
    let terms: Vec<(f64, f64)> = p
        .iter()
        .zip(q.iter())
        .filter(|&(a, b)| a > 0.0 && b > 0.0)
        .map(|(a, b)| (a, (1.0 - alpha) * (b / a).ln()))
        .collect();
    if terms.is_empty() {
        return Err(Error::Domain(
            "Renyi divergence is infinite: supports of p and q are disjoint".into(),
        ));
    }
    let lme = if violation.is_some() {
        // The weights no longer sum to one, so the expm1 form does not apply.
        let xs: Vec<f64> = terms.iter().map(|&(w, x)| w.ln() + x).collect();
        log_sum_exp(&xs)
    } else {
        log_mean_exp(&terms)
    };
    Ok((lme / ((alpha - 1.0) * LN_2)).max(0.0))
}

/// `F_α(p) = (ln2 · D_α(p‖g) − ln Z) / β`.
pub fn free_energy(p: &ProbVec, ctx: &ThermalContext, alpha: f64) -> Result<f64> {
    ctx.check_dim(p)?;
    let d = renyi_divergence(p, ctx.gibbs(), alpha)?;
    Ok((LN_2 * d - ctx.log_z()) / ctx.beta())
}

/// The embedding `Γ_d`: entry `i` is split into `d_i` equal parts.
pub fn embed(x: &ProbVec, d: &[u64]) -> Result<ProbVec> {
    if d.len() != x.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: d.len(),
        });
    }
    if d.contains(&0) {
        return Err(Error::Domain(
            "embedding multiplicities must be positive".into(),
        ));
    }
    let total: u128 = d.iter().map(|&k| k as u128).sum();
    let n = simplex::check_dim("embedding", total, simplex::dimension_cap())?;
    let mut out = Vec::with_capacity(n);
    for (xi, &k) in x.iter().zip(d) {
        let v = xi / k as f64;
        out.extend(std::iter::repeat_n(v, k as usize));
    }
    Ok(ProbVec::from_vec_unchecked(out))
}

/// Best rational approximation `d_i / D` of the Gibbs weights over every
/// denominator `D ≤ max_denominator`.
///
/// Quality is the largest componentwise error; ties go to the smallest `D`.
pub fn rationalize_gibbs(ctx: &ThermalContext, max_denominator: u64) -> Result<ThermalContext> {
    let g = ctx.gibbs().entries();
    let n = g.len() as u64;
    if max_denominator < n {
        return Err(Error::Domain(format!(
            "denominator cap {max_denominator} is below the {n} required levels"
        )));
    }
    let mut best: Option<(f64, u64, Vec<u64>)> = None;
    for denom in n..=max_denominator {
        let d = best_numerators(g, denom);
        let err = max_error(g, &d, denom);
        if best.as_ref().is_none_or(|(e, _, _)| err < *e - 1e-15) {
            best = Some((err, denom, d));
        }
    }
    let (_, denominator, numerators) = best.expect("at least one denominator examined");
    let mut out = ctx.clone();
    out.rational = Some(RationalForm {
        denominator,
        numerators,
    });
    Ok(out)
}

fn max_error(g: &[f64], d: &[u64], denom: u64) -> f64 {
    g.iter()
        .zip(d)
        .map(|(gi, &di)| (di as f64 / denom as f64 - gi).abs())
        .fold(0.0, f64::max)
}

/// Minimax integer allocation: start from per-entry rounding (each at its own
/// optimum), then move one unit at a time toward `Σd = D`, always choosing the
/// entry whose new error is smallest. With separable convex costs this greedy
/// walk minimizes the maximum error.
fn best_numerators(g: &[f64], denom: u64) -> Vec<u64> {
    let df = denom as f64;
    let mut d: Vec<u64> = g
        .iter()
        .map(|gi| ((gi * df).round() as u64).max(1))
        .collect();
    let err = |di: u64, gi: f64| (di as f64 / df - gi).abs();
    loop {
        let sum: u64 = d.iter().sum();
        if sum == denom {
            return d;
        }
        let pick = if sum > denom {
            (0..d.len())
                .filter(|&i| d[i] > 1)
                .min_by(|&a, &b| err(d[a] - 1, g[a]).total_cmp(&err(d[b] - 1, g[b])))
        } else {
            (0..d.len()).min_by(|&a, &b| err(d[a] + 1, g[a]).total_cmp(&err(d[b] + 1, g[b])))
        };
        let i = pick.expect("denominator is at least the number of levels");
        if sum > denom {
            d[i] -= 1;
        } else {
            d[i] += 1;
        }
    }
}
