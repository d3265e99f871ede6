//! Catalyst samplers and target generators.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::simplex::{self, ProbVec, Seed};
use crate::{Error, Result};

/// How the unnormalized entries of a random catalyst are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    /// Density `x e^{−x²/2}`.
    Rayleigh,
    /// Uniform on `[0, 1]`.
    Uniform,
    /// Density `e^{−x}`; normalized, this is uniform on the simplex.
    Exponential,
    /// Flat Dirichlet, drawn as normalized exponentials.
    DirichletFlat,
    /// The fixed product state `(1 − r, r)^{⊗n}`.
    Multicopy { r: f64, n: u32 },
}

impl SamplerKind {
    pub fn validate(&self) -> Result<()> {
        if let SamplerKind::Multicopy { r, n } = *self {
            if !(0.0..0.5).contains(&r) {
                return Err(Error::Config(format!(
                    "multicopy r must lie in [0, 0.5), got {r}"
                )));
            }
            if n == 0 || n > 26 {
                return Err(Error::Config(format!(
                    "multicopy n must lie in 1..=26, got {n}"
                )));
            }
        }
        Ok(())
    }

    /// Catalyst dimension implied by the sampler, if it fixes one.
    pub fn implied_dim(&self) -> Option<u64> {
        match *self {
            SamplerKind::Multicopy { n, .. } => Some(1u64 << n),
            _ => None,
        }
    }

    /// Whether two draws can differ (multicopy catalysts are deterministic).
    pub fn is_random(&self) -> bool {
        !matches!(self, SamplerKind::Multicopy { .. })
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplerKind::Rayleigh => f.write_str("rayleigh"),
            SamplerKind::Uniform => f.write_str("uniform"),
            SamplerKind::Exponential => f.write_str("exponential"),
            SamplerKind::DirichletFlat => f.write_str("dirichlet_flat"),
            SamplerKind::Multicopy { r, n } => write!(f, "multicopy:{r}:{n}"),
        }
    }
}

/// Names as printed by `Display`, e.g. `exponential` or `multicopy:0.3:10`.
impl FromStr for SamplerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.trim() {
            "rayleigh" => SamplerKind::Rayleigh,
            "uniform" => SamplerKind::Uniform,
            "exponential" => SamplerKind::Exponential,
            "dirichlet_flat" => SamplerKind::DirichletFlat,
            other => {
                let parts: Vec<&str> = other.split(':').collect();
                match parts.as_slice() {
                    ["multicopy", r, n] => SamplerKind::Multicopy {
                        r: r.parse()
                            .map_err(|_| Error::Parse(format!("bad r in {other:?}")))?,
                        n: n.parse()
                            .map_err(|_| Error::Parse(format!("bad n in {other:?}")))?,
                    },
                    _ => return Err(Error::Parse(format!("unknown sampler {other:?}"))),
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

fn draw<R: Rng + ?Sized>(kind: SamplerKind, rng: &mut R) -> f64 {
    match kind {
        // Inverse CDF with 1 − U ∈ (0, 1].
        SamplerKind::Rayleigh => (-2.0 * (1.0 - rng.random::<f64>()).ln()).sqrt(),
        SamplerKind::Uniform => rng.random::<f64>(),
        SamplerKind::Exponential | SamplerKind::DirichletFlat => Exp1.sample(rng),
        SamplerKind::Multicopy { .. } => unreachable!("multicopy catalysts are not sampled"),
    }
}

/// Draw one catalyst of dimension `d_c`; the same seed gives the same vector.
/// For multicopy catalysts `d_c` must equal `2^n`.
pub fn sample_catalyst(kind: SamplerKind, d_c: u64, seed: Seed) -> Result<ProbVec> {
    kind.validate()?;
    if let SamplerKind::Multicopy { r, n } = kind {
        if d_c != 1u64 << n {
            return Err(Error::Config(format!(
                "multicopy catalyst of {n} qubits has dimension {}, not {d_c}",
                1u64 << n
            )));
        }
        let qubit = ProbVec::new(vec![1.0 - r, r])?;
        return simplex::tensor_power(&qubit, n);
    }
    if d_c < 2 {
        return Err(Error::Config(format!(
            "catalyst dimension must be >= 2, got {d_c}"
        )));
    }
    let d = simplex::check_dim("catalyst", d_c as u128, simplex::dimension_cap())?;
    let mut rng = seed.rng();
    loop {
        let w: Vec<f64> = (0..d).map(|_| draw(kind, &mut rng)).collect();
        if let Ok(c) = ProbVec::from_weights(w) {
            return Ok(c);
        }
    }
}

/// How targets `q` are chosen on the simplex.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetMode {
    /// All points with coordinates in `(1/steps) ℤ`.
    Grid { steps: u32 },
    /// `count` flat-Dirichlet draws.
    Sample { count: usize },
}

impl TargetMode {
    pub fn targets(&self, dim: usize, root: u64) -> Result<Vec<ProbVec>> {
        match *self {
            TargetMode::Sample { count } => Ok((0..count as u64)
                .map(|j| simplex::random_simplex(dim, &mut Seed::new(root, j).rng()))
                .collect()),
            TargetMode::Grid { steps } => simplex_grid(dim, steps),
        }
    }
}

impl fmt::Display for TargetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetMode::Grid { steps } => write!(f, "grid:{}", 1.0 / *steps as f64),
            TargetMode::Sample { count } => write!(f, "sample:{count}"),
        }
    }
}

/// `grid:Δ` (with `1/Δ` an integer) or `sample:N`.
impl FromStr for TargetMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Parse(format!(
                "target mode must be grid:<step> or sample:<n>, got {s:?}"
            ))
        };
        let (kind, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind {
            "sample" => {
                let count: usize = arg.parse().map_err(|_| bad())?;
                if count == 0 {
                    return Err(bad());
                }
                Ok(TargetMode::Sample { count })
            }
            "grid" => {
                let step: f64 = arg.parse().map_err(|_| bad())?;
                if !(step > 0.0 && step <= 1.0) {
                    return Err(bad());
                }
                let steps = (1.0 / step).round();
                if ((1.0 / step) - steps).abs() > 1e-9 {
                    return Err(Error::Parse(format!("grid step {step} must divide 1")));
                }
                Ok(TargetMode::Grid {
                    steps: steps as u32,
                })
            }
            _ => Err(bad()),
        }
    }
}

/// Every probability vector of dimension `dim` with entries in `(1/steps) ℤ`,
/// in lexicographic order of the integer coordinates.
pub fn simplex_grid(dim: usize, steps: u32) -> Result<Vec<ProbVec>> {
    if dim == 0 || steps == 0 {
        return Err(Error::Domain(
            "grid needs positive dimension and step count".into(),
        ));
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; dim];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, steps: u32, out: &mut Vec<ProbVec>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            let v = cur.iter().map(|&k| k as f64 / steps as f64).collect();
            out.push(ProbVec::new(v).expect("grid point is normalized"));
            return;
        }
        for k in 0..=left {
            cur[pos] = k;
            rec(pos + 1, left - k, cur, steps, out);
        }
    }
    rec(0, steps, &mut cur, steps, &mut out);
    Ok(out)
}
