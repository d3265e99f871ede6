//! Integer-weight distributions for zero-tolerance majorization.
//!
//! A distribution is a vector of `u128` numerators over a shared denominator.
//! Tensor powers and Duan catalysts of rationals with modest denominators stay
//! comfortably inside `u128`; every multiplication is checked and overflow is
//! reported rather than wrapped.
//!
//! Only trivial Hamiltonians are handled directly: thermo-majorization for a
//! rational Gibbs state reduces to this case through [`ExactDist::embed`].

use num_integer::Integer;

use crate::simplex::{self, ProbVec};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactDist {
    num: Vec<u128>,
    den: u128,
}

fn overflow(what: &str) -> Error {
    Error::Overflow(what.to_string())
}

impl ExactDist {
    pub fn new(num: Vec<u128>, den: u128) -> Result<Self> {
        if num.is_empty() || den == 0 {
            return Err(Error::InvalidProbability(
                "empty or zero-denominator distribution".into(),
            ));
        }
        let total = num
            .iter()
            .try_fold(0u128, |a, &b| a.checked_add(b))
            .ok_or_else(|| overflow("numerator sum"))?;
        if total != den {
            return Err(Error::InvalidProbability(format!(
                "numerators sum to {total}, denominator is {den}"
            )));
        }
        Ok(Self { num, den })
    }

    /// Round `p` to denominator `den` by largest remainders, keeping every entry
    /// at least 1 (so the result has full support).
    pub fn round_from(p: &ProbVec, den: u128) -> Result<Self> {
        let d = p.dim() as u128;
        if den < d {
            return Err(Error::Domain(format!(
                "denominator {den} too small for {d} positive entries"
            )));
        }
        // Largest remainders, then lift empty entries by taking from the largest.
        let scaled: Vec<f64> = p.iter().map(|x| x * den as f64).collect();
        let mut num: Vec<u128> = scaled.iter().map(|x| x.floor() as u128).collect();
        let mut left = den.saturating_sub(num.iter().sum::<u128>());
        let mut order: Vec<usize> = (0..num.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = scaled[a] - scaled[a].floor();
            let rb = scaled[b] - scaled[b].floor();
            rb.total_cmp(&ra)
        });
        for &i in order.iter().cycle() {
            if left == 0 {
                break;
            }
            num[i] += 1;
            left -= 1;
        }
        for i in 0..num.len() {
            if num[i] == 0 {
                let top = (0..num.len()).max_by_key(|&j| num[j]).expect("nonempty");
                num[top] -= 1;
                num[i] = 1;
            }
        }
        Self::new(num, den)
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }
    pub fn numerators(&self) -> &[u128] {
        &self.num
    }
    pub fn denominator(&self) -> u128 {
        self.den
    }

    pub fn to_probvec(&self) -> ProbVec {
        let den = self.den as f64;
        ProbVec::from_weights(self.num.iter().map(|&n| n as f64 / den).collect())
            .expect("exact distribution has positive total")
    }

    pub fn tensor(&self, other: &ExactDist) -> Result<ExactDist> {
        let n = simplex::check_dim(
            "exact tensor product",
            self.dim() as u128 * other.dim() as u128,
            simplex::dimension_cap(),
        )?;
        let den = self
            .den
            .checked_mul(other.den)
            .ok_or_else(|| overflow("tensor denominator"))?;
        let mut num = Vec::with_capacity(n);
        for &a in &self.num {
            for &b in &other.num {
                // a·b ≤ den, so this cannot overflow once den fits.
                num.push(a * b);
            }
        }
        Ok(ExactDist { num, den })
    }

    /// `self^{⊗k}`; `k = 0` is the point mass `(1)`.
    pub fn power(&self, k: u32) -> Result<ExactDist> {
        let mut acc = ExactDist {
            num: vec![1],
            den: 1,
        };
        for _ in 0..k {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    /// The embedding `Γ_d`: entry `i` is split into `d_i` equal parts. Over
    /// the denominator `den · lcm(d)` every part is an integer.
    pub fn embed(&self, d: &[u64]) -> Result<ExactDist> {
        if d.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: d.len(),
                right: self.dim(),
            });
        }
        if d.contains(&0) {
            return Err(Error::Domain(
                "embedding multiplicities must be positive".into(),
            ));
        }
        let l = d.iter().fold(1u128, |acc, &x| acc.lcm(&(x as u128)));
        let total: u128 = d.iter().map(|&x| x as u128).sum();
        simplex::check_dim("exact embedding", total, simplex::dimension_cap())?;
        let den = self
            .den
            .checked_mul(l)
            .ok_or_else(|| overflow("embedding denominator"))?;
        let mut num = Vec::with_capacity(total as usize);
        for (&a, &di) in self.num.iter().zip(d) {
            let part = a * (l / di as u128);
            num.extend(std::iter::repeat_n(part, di as usize));
        }
        Ok(ExactDist { num, den })
    }

    /// Equal-weight direct sum `(1/n) ⊕ b_i` of blocks sharing one denominator.
    pub fn equal_blocks(blocks: &[ExactDist]) -> Result<ExactDist> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidProbability("direct sum of no blocks".into()))?;
        if blocks.iter().any(|b| b.den != first.den) {
            return Err(Error::Domain(
                "equal-weight blocks need a shared denominator".into(),
            ));
        }
        let den = first
            .den
            .checked_mul(blocks.len() as u128)
            .ok_or_else(|| overflow("direct-sum denominator"))?;
        let total: u128 = blocks.iter().map(|b| b.dim() as u128).sum();
        simplex::check_dim("exact direct sum", total, simplex::dimension_cap())?;
        let num = blocks.iter().flat_map(|b| b.num.iter().copied()).collect();
        Ok(ExactDist { num, den })
    }
}

/// Exact `a ≻ b`; shorter vectors are zero-padded.
pub fn majorizes(a: &ExactDist, b: &ExactDist) -> Result<bool> {
    // Bring both to the denominator den_a·den_b unless they already agree.
    if a.den != b.den {
        a.den
            .checked_mul(b.den)
            .ok_or_else(|| overflow("common denominator"))?;
    }
    let n = a.dim().max(b.dim());
    let sorted = |x: &ExactDist, scale: u128| {
        let mut v: Vec<u128> = x.num.iter().map(|&k| k * scale).collect();
        v.resize(n, 0);
        v.sort_unstable_by(|x, y| y.cmp(x));
        v
    };
    let (sa, sb) = if a.den == b.den {
        (sorted(a, 1), sorted(b, 1))
    } else {
        (sorted(a, b.den), sorted(b, a.den))
    };
    let (mut pa, mut pb) = (0u128, 0u128);
    for (x, y) in sa.iter().zip(&sb) {
        pa += x;
        pb += y;
        if pa < pb {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The Duan catalyst `(1/k) ⊕_{i=1..k} q^{⊗(k−i)} ⊗ p^{⊗(i−1)}`.
pub fn duan_state(p: &ExactDist, q: &ExactDist, k: u32) -> Result<ExactDist> {
    if k == 0 {
        return Err(Error::Domain("Duan state needs k >= 1".into()));
    }
    if p.dim() != q.dim() || p.den != q.den {
        return Err(Error::Domain(
            "Duan state needs p and q with equal dimension and denominator".into(),
        ));
    }
    let blocks = (1..=k)
        .map(|i| q.power(k - i)?.tensor(&p.power(i - 1)?))
        .collect::<Result<Vec<_>>>()?;
    ExactDist::equal_blocks(&blocks)
}

/// Smallest `k ≤ k_max` with `p^{⊗k} ≻ q^{⊗k}`. Every `k` is tested.
pub fn min_k_copy(p: &ExactDist, q: &ExactDist, k_max: u32) -> Result<Option<u32>> {
    for k in 1..=k_max {
        if majorizes(&p.power(k)?, &q.power(k)?)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// `(p^{⊗k} ≻ q^{⊗k}, p ⊗ z ≻ q ⊗ z)` with `z` the Duan catalyst.
pub fn duan_catalysis_check(p: &ExactDist, q: &ExactDist, k: u32) -> Result<(bool, bool)> {
    let kcopy = majorizes(&p.power(k)?, &q.power(k)?)?;
    let z = duan_state(p, q, k)?;
    let catalytic = majorizes(&p.tensor(&z)?, &q.tensor(&z)?)?;
    Ok((kcopy, catalytic))
}
