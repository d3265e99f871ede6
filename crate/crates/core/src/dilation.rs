//! Permutation dilations of Gibbs-stochastic channels in exact arithmetic.
//!
//! A rational Gibbs state `g_i = d_i / D` is embedded as a uniform distribution
//! over `D` microstates, level `i` owning `d_i` of them. A channel `r(j|i)`
//! preserving `g` is then realized by a permutation of microstates in which
//! level `i` sends `n_{j|i} = d_i r(j|i)` microstates to level `j`. When those
//! counts are not integers every block is refined by a common shell factor `s`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

use crate::simplex::{self, ProbVec};
use crate::{Error, Result};

/// A stochastic matrix over exact rationals; `rows[i][j] = r(j|i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalChannel {
    rows: Vec<Vec<BigRational>>,
    gibbs: Vec<BigRational>,
}

impl RationalChannel {
    /// Validates stochasticity and exact Gibbs preservation.
    pub fn new(rows: Vec<Vec<BigRational>>, gibbs: Vec<BigRational>) -> Result<Self> {
        let d = gibbs.len();
        if d == 0 || rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Domain(format!(
                "channel must be {d}x{d} to match the Gibbs vector"
            )));
        }
        if gibbs.iter().any(|g| !g.is_positive()) {
            return Err(Error::Domain("Gibbs weights must be positive".into()));
        }
        if gibbs.iter().sum::<BigRational>() != BigRational::one() {
            return Err(Error::Domain("Gibbs weights must sum to 1".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.iter().any(|x| x.is_negative()) {
                return Err(Error::Domain(format!("row {i} has a negative entry")));
            }
            if row.iter().sum::<BigRational>() != BigRational::one() {
                return Err(Error::Domain(format!("row {i} does not sum to 1")));
            }
        }
        for j in 0..d {
            let image: BigRational = (0..d).map(|i| &gibbs[i] * &rows[i][j]).sum();
            if image != gibbs[j] {
                return Err(Error::NotGibbsPreserving(format!(
                    "output weight of level {j} is {image}, expected {}",
                    gibbs[j]
                )));
            }
        }
        Ok(Self { rows, gibbs })
    }

    pub fn dim(&self) -> usize {
        self.gibbs.len()
    }
    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }
    pub fn gibbs(&self) -> &[BigRational] {
        &self.gibbs
    }

    /// Direct matrix action `q_j = Σ_i p_i r(j|i)`.
    pub fn apply(&self, p: &[BigRational]) -> Result<Vec<BigRational>> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: p.len(),
                right: self.dim(),
            });
        }
        Ok((0..self.dim())
            .map(|j| (0..self.dim()).map(|i| &p[i] * &self.rows[i][j]).sum())
            .collect())
    }

    /// Parse the JSON forms accepted on the command line: a square array of
    /// rationals and a Gibbs array. Entries may be integers, `"a/b"` strings or
    /// decimal literals (read exactly).
    pub fn from_json(channel: &str, gibbs: &str) -> Result<Self> {
        let ch: Value = serde_json::from_str(channel)?;
        let g: Value = serde_json::from_str(gibbs)?;
        let rows = ch
            .as_array()
            .ok_or_else(|| Error::Parse("channel must be a JSON array of rows".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::Parse("channel rows must be arrays".into()))?
                    .iter()
                    .map(rational_from_json)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let g = g
            .as_array()
            .ok_or_else(|| Error::Parse("gibbs must be a JSON array".into()))?
            .iter()
            .map(rational_from_json)
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, g)
    }
}

fn rational_from_json(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        _ => Err(Error::Parse(format!("not a rational: {v}"))),
    }
}

/// `"3"`, `"-2/7"` or `"0.125"`, all read exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("not a rational: {t:?}"));
    if t.contains('/') {
        let r = BigRational::from_str(t).map_err(|_| bad())?;
        return Ok(r);
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.chars().any(|c| !c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let num = BigInt::from_str(&digits).map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(num, den));
    }
    let num = BigInt::from_str(t).map_err(|_| bad())?;
    Ok(BigRational::from_integer(num))
}

/// The combinatorial core of a dilation: a permutation of `shell_size`
/// microstates, grouped into one contiguous block per level.
#[derive(Clone, Debug, PartialEq)]
pub struct PermutationDilation {
    /// Common Gibbs denominator `D`.
    pub denominator: u64,
    /// Gibbs numerators `d_i`.
    pub multiplicities: Vec<u64>,
    /// Refinement factor `s`; block `i` has `s·d_i` microstates.
    pub shell_factor: u64,
    /// `s·D`.
    pub shell_size: usize,
    /// `counts[i][j] = n_{j|i}`, microstates moved from level `i` to `j`.
    pub counts: Vec<Vec<u64>>,
    /// `assignment[slot] = image slot`.
    pub assignment: Vec<usize>,
}

impl PermutationDilation {
    pub fn dim(&self) -> usize {
        self.multiplicities.len()
    }

    fn block_sizes(&self) -> Vec<usize> {
        self.multiplicities
            .iter()
            .map(|&d| (d * self.shell_factor) as usize)
            .collect()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.block_sizes()
            .into_iter()
            .map(|b| {
                let o = acc;
                acc += b;
                o
            })
            .collect()
    }

    /// Spread each level's probability evenly over its microstates.
    pub fn embed(&self, p: &[BigRational]) -> Result<Vec<BigRational>> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: p.len(),
                right: self.dim(),
            });
        }
        let mut out = Vec::with_capacity(self.shell_size);
        for (pi, size) in p.iter().zip(self.block_sizes()) {
            let each = pi / BigRational::from_integer(BigInt::from(size));
            out.extend(std::iter::repeat_n(each, size));
        }
        Ok(out)
    }

    /// Move the content of every slot to its image.
    pub fn permute(&self, shell: &[BigRational]) -> Result<Vec<BigRational>> {
        self.check_shell(shell)?;
        let mut out = vec![BigRational::zero(); self.shell_size];
        for (slot, x) in shell.iter().enumerate() {
            out[self.assignment[slot]] = x.clone();
        }
        Ok(out)
    }

    pub fn inverse_permute(&self, shell: &[BigRational]) -> Result<Vec<BigRational>> {
        self.check_shell(shell)?;
        Ok(self.assignment.iter().map(|&t| shell[t].clone()).collect())
    }

    /// Total probability per level.
    pub fn marginal(&self, shell: &[BigRational]) -> Result<Vec<BigRational>> {
        self.check_shell(shell)?;
        let mut out = Vec::with_capacity(self.dim());
        let mut start = 0;
        for size in self.block_sizes() {
            out.push(shell[start..start + size].iter().sum());
            start += size;
        }
        Ok(out)
    }

    fn check_shell(&self, shell: &[BigRational]) -> Result<()> {
        if shell.len() != self.shell_size {
            return Err(Error::DimensionMismatch {
                left: shell.len(),
                right: self.shell_size,
            });
        }
        Ok(())
    }

    /// Whether the assignment is a bijection that moves exactly `n_{j|i}`
    /// microstates from block `i` to block `j`, with consistent marginals.
    pub fn is_consistent(&self) -> bool {
        let n = self.shell_size;
        let mut seen = vec![false; n];
        for &t in &self.assignment {
            if t >= n || seen[t] {
                return false;
            }
            seen[t] = true;
        }
        let sizes = self.block_sizes();
        let offsets = self.offsets();
        let block_of = |slot: usize| offsets.partition_point(|&o| o <= slot) - 1;
        let d = self.dim();
        let mut moved = vec![vec![0u64; d]; d];
        for (slot, &t) in self.assignment.iter().enumerate() {
            moved[block_of(slot)][block_of(t)] += 1;
        }
        let rows_ok = (0..d).all(|i| moved[i].iter().sum::<u64>() as usize == sizes[i]);
        let cols_ok = (0..d).all(|j| (0..d).map(|i| moved[i][j]).sum::<u64>() as usize == sizes[j]);
        moved == self.counts && rows_ok && cols_ok
    }
}

fn to_u64(x: &BigInt, what: &str) -> Result<u64> {
    x.to_u64()
        .ok_or_else(|| Error::Overflow(format!("{what} does not fit in 64 bits")))
}

/// Build the lexicographic permutation dilation of `ch`.
pub fn build_dilation(ch: &RationalChannel) -> Result<PermutationDilation> {
    let d = ch.dim();
    let denom = ch
        .gibbs
        .iter()
        .fold(BigInt::one(), |acc, g| acc.lcm(g.denom()));
    let mult: Vec<BigInt> = ch
        .gibbs
        .iter()
        .map(|g| (g * BigRational::from_integer(denom.clone())).to_integer())
        .collect();
    // Raw counts d_i r(j|i), refined by the lcm of their denominators.
    let raw: Vec<Vec<BigRational>> = (0..d)
        .map(|i| {
            let di = BigRational::from_integer(mult[i].clone());
            ch.rows[i].iter().map(|r| &di * r).collect()
        })
        .collect();
    let shell_factor = raw
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let s = BigRational::from_integer(shell_factor.clone());
    let counts = raw
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| to_u64(&(x * &s).to_integer(), "block count"))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let shell_big = &shell_factor * &denom;
    let requested = shell_big.to_u128().unwrap_or(u128::MAX);
    let shell_size = simplex::check_dim("dilation shell", requested, simplex::dimension_cap())?;

    let mut dil = PermutationDilation {
        denominator: to_u64(&denom, "Gibbs denominator")?,
        multiplicities: mult
            .iter()
            .map(|m| to_u64(m, "Gibbs numerator"))
            .collect::<Result<Vec<_>>>()?,
        shell_factor: to_u64(&shell_factor, "shell factor")?,
        shell_size,
        counts,
        assignment: Vec::new(),
    };

    // Lexicographic fill: source blocks in order, each split across targets
    // in order, each target filled from its first free slot.
    let offsets = dil.offsets();
    let mut next_free = offsets.clone();
    let mut assignment = vec![usize::MAX; shell_size];
    for (row, &start) in dil.counts.iter().zip(&offsets) {
        let mut src = start;
        for (&n, free) in row.iter().zip(next_free.iter_mut()) {
            for _ in 0..n {
                assignment[src] = *free;
                *free += 1;
                src += 1;
            }
        }
    }
    dil.assignment = assignment;
    if !dil.is_consistent() {
        return Err(Error::NotGibbsPreserving(
            "block counts do not close into a permutation".into(),
        ));
    }
    Ok(dil)
}

/// Push `p` through the dilation and read off the system marginal, exactly.
pub fn apply_dilation_exact(
    dil: &PermutationDilation,
    p: &[BigRational],
) -> Result<Vec<BigRational>> {
    dil.marginal(&dil.permute(&dil.embed(p)?)?)
}

/// Float front end: `p` is converted exactly, the result rounded once.
pub fn apply_dilation(dil: &PermutationDilation, p: &ProbVec) -> Result<ProbVec> {
    let exact = p
        .iter()
        .map(|x| {
            BigRational::from_float(x)
                .ok_or_else(|| Error::InvalidProbability("non-finite entry".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let out = apply_dilation_exact(dil, &exact)?;
    ProbVec::new(out.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect())
}

/// `½ Σ |a_i − b_i|` over rationals.
pub fn rational_trace_distance(a: &[BigRational], b: &[BigRational]) -> Result<BigRational> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let total: BigRational = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    Ok(total / BigRational::from_integer(BigInt::from(2)))
}

/// A random Gibbs-stochastic channel for Gibbs numerators `d`: the
/// coarse-graining of a convex combination of `terms` random permutations of
/// `D = Σd` microstates, with integer weights in `1..=max_weight`.
pub fn random_gibbs_stochastic<R: Rng + ?Sized>(
    d: &[u64],
    terms: usize,
    max_weight: u64,
    rng: &mut R,
) -> Result<RationalChannel> {
    if d.is_empty() || d.contains(&0) || terms == 0 || max_weight == 0 {
        return Err(Error::Domain("invalid random channel parameters".into()));
    }
    let big_d: u64 = d.iter().sum();
    let n = big_d as usize;
    let mut block = Vec::with_capacity(n);
    for (i, &k) in d.iter().enumerate() {
        block.extend(std::iter::repeat_n(i, k as usize));
    }
    let dim = d.len();
    // Integer flow counts: flow[i][j] = Σ_k w_k · #{a ∈ i : π_k(a) ∈ j}.
    let mut flow = vec![vec![0u64; dim]; dim];
    let mut total_w = 0u64;
    for _ in 0..terms {
        let w = rng.random_range(1..=max_weight);
        total_w += w;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        for (a, &b) in perm.iter().enumerate() {
            flow[block[a]][block[b]] += w;
        }
    }
    let rows = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    BigRational::new(
                        BigInt::from(flow[i][j]),
                        BigInt::from(total_w) * BigInt::from(d[i]),
                    )
                })
                .collect()
        })
        .collect();
    let gibbs = d
        .iter()
        .map(|&k| BigRational::new(BigInt::from(k), BigInt::from(big_d)))
        .collect();
    RationalChannel::new(rows, gibbs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Seed;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn uniform(d: i64) -> Vec<BigRational> {
        vec![r(1, d); d as usize]
    }

    fn identity(d: usize) -> Vec<Vec<BigRational>> {
        (0..d)
            .map(|i| (0..d).map(|j| r((i == j) as i64, 1)).collect())
            .collect()
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert_eq!(parse_rational(" 2/6 ").unwrap(), r(1, 3));
        assert_eq!(parse_rational("0.125").unwrap(), r(1, 8));
        assert!(parse_rational("x").is_err());
        let ch =
            RationalChannel::from_json(r#"[["1/2","1/2"],[0.5,0.5]]"#, r#"["1/2","1/2"]"#).unwrap();
        assert_eq!(ch.rows()[1][0], r(1, 2));
    }

    #[test]
    fn rejects_non_gibbs_preserving() {
        let g = vec![r(2, 3), r(1, 3)];
        let rows = vec![vec![r(1, 2), r(1, 2)], vec![r(1, 2), r(1, 2)]];
        assert!(matches!(
            RationalChannel::new(rows, g),
            Err(Error::NotGibbsPreserving(_))
        ));
        let bad_row = vec![vec![r(1, 2), r(1, 3)], vec![r(1, 2), r(1, 2)]];
        assert!(RationalChannel::new(bad_row, uniform(2)).is_err());
    }

    #[test]
    fn identity_dilation() {
        let g = vec![r(1, 2), r(1, 3), r(1, 6)];
        let ch = RationalChannel::new(identity(3), g).unwrap();
        let dil = build_dilation(&ch).unwrap();
        assert_eq!(dil.shell_size, 6);
        assert_eq!(dil.assignment, (0..6).collect::<Vec<_>>());
        let p = vec![r(1, 5), r(3, 5), r(1, 5)];
        assert_eq!(apply_dilation_exact(&dil, &p).unwrap(), p);
    }

    #[test]
    fn full_thermalization_qutrit() {
        let g = uniform(3);
        let rows = vec![g.clone(); 3];
        let ch = RationalChannel::new(rows, g.clone()).unwrap();
        let dil = build_dilation(&ch).unwrap();
        assert_eq!(dil.shell_size, 9);
        assert!(dil.counts.iter().flatten().all(|&n| n == 1));
        for p in [
            vec![r(1, 1), r(0, 1), r(0, 1)],
            vec![r(1, 2), r(1, 4), r(1, 4)],
        ] {
            assert_eq!(apply_dilation_exact(&dil, &p).unwrap(), g);
        }
        let out = apply_dilation(&dil, &ProbVec::new(vec![0.7, 0.2, 0.1]).unwrap()).unwrap();
        assert!(out.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn partial_swap_shell() {
        for (a, b) in [(1, 3), (2, 5), (3, 7), (1, 2)] {
            let t = r(a, b);
            let one = r(1, 1);
            let rows = vec![vec![&one - &t, t.clone()], vec![t.clone(), &one - &t]];
            let dil = build_dilation(&RationalChannel::new(rows, uniform(2)).unwrap()).unwrap();
            assert_eq!(dil.shell_size as i64, 2 * b);
        }
    }

    #[test]
    fn shell_distance_bounds_system_distance() {
        // Full thermalization of a qubit: p = (1,0) lands exactly on q = (1/2,1/2)
        // at the system level, but the shell keeps p's microstate structure.
        let g = uniform(2);
        let ch = RationalChannel::new(vec![g.clone(); 2], g.clone()).unwrap();
        let dil = build_dilation(&ch).unwrap();
        let p = vec![r(1, 1), r(0, 1)];
        let out_shell = dil.permute(&dil.embed(&p).unwrap()).unwrap();
        let q_shell = dil.embed(&g).unwrap();
        let sys = rational_trace_distance(&dil.marginal(&out_shell).unwrap(), &g).unwrap();
        let full = rational_trace_distance(&out_shell, &q_shell).unwrap();
        assert_eq!(sys, r(0, 1));
        assert_eq!(full, r(1, 2));
    }

    #[test]
    fn random_channels_are_valid() {
        let mut rng = Seed::new(11, 0).rng();
        for _ in 0..20 {
            let ch = random_gibbs_stochastic(&[2, 1, 3], 3, 5, &mut rng).unwrap();
            let dil = build_dilation(&ch).unwrap();
            assert!(dil.is_consistent());
            let gi = ch.gibbs().to_vec();
            assert_eq!(apply_dilation_exact(&dil, &gi).unwrap(), gi);
        }
    }
}
