//! Probability-vector primitives.
//!
//! A [`ProbVec`] is the population vector of a block-diagonal state. Every
//! constructor validates; operations that combine valid vectors (tensor products,
//! direct sums, sorting) produce valid vectors by construction.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance on the total mass of a vector handed in from outside.
pub const INGEST_TOL: f64 = 1e-9;
/// Entries in `[-NEG_CLAMP, 0)` are treated as rounding noise and clamped to zero.
pub const NEG_CLAMP: f64 = 1e-12;
/// Tolerance for internal comparisons of partial sums.
pub const CMP_TOL: f64 = 1e-12;

/// Default cap on the number of entries any single vector may have (2^26).
pub const DEFAULT_DIM_CAP: usize = 1 << 26;

static DIM_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIM_CAP);

/// Current process-wide dimension cap.
pub fn dimension_cap() -> usize {
    DIM_CAP.load(Ordering::Relaxed)
}

/// Change the process-wide dimension cap. Returns the previous value.
pub fn set_dimension_cap(cap: usize) -> usize {
    DIM_CAP.swap(cap.max(1), Ordering::Relaxed)
}

pub(crate) fn check_dim(what: &str, requested: u128, cap: usize) -> Result<usize> {
    if requested > cap as u128 {
        return Err(Error::ResourceLimit {
            what: what.to_string(),
            requested,
            cap,
        });
    }
    Ok(requested as usize)
}

/// A finite probability vector.
#[derive(Clone, PartialEq)]
pub struct ProbVec {
    entries: Vec<f64>,
}

impl ProbVec {
    /// Validate and normalize `entries`.
    ///
    /// Entries slightly below zero (down to `-1e-12`) are clamped; the total must be
    /// within `1e-9` of one and is then divided out.
    pub fn new(mut entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidProbability("empty vector".into()));
        }
        for (i, x) in entries.iter_mut().enumerate() {
            if !x.is_finite() {
                return Err(Error::InvalidProbability(format!(
                    "entry {i} is not finite"
                )));
            }
            if *x < 0.0 {
                if *x < -NEG_CLAMP {
                    return Err(Error::InvalidProbability(format!(
                        "entry {i} is negative ({x})"
                    )));
                }
                *x = 0.0;
            }
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > INGEST_TOL {
            return Err(Error::InvalidProbability(format!(
                "entries sum to {total}, expected 1"
            )));
        }
        if total != 1.0 {
            for x in entries.iter_mut() {
                *x /= total;
            }
        }
        Ok(Self { entries })
    }

    /// Normalize a nonnegative weight vector (e.g. raw random draws).
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidProbability(format!(
                "weights have non-positive or non-finite total {total}"
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidProbability("negative weight".into()));
        }
        Ok(Self {
            entries: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    /// Wrap entries that are valid by construction.
    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        debug_assert!(entries.iter().all(|&x| x >= 0.0));
        debug_assert!((entries.iter().sum::<f64>() - 1.0).abs() < 1e-8);
        Self { entries }
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0, "uniform distribution needs a positive dimension");
        Self {
            entries: vec![1.0 / dim as f64; dim],
        }
    }

    /// The point mass on `index`.
    pub fn point(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut entries = vec![0.0; dim];
        entries[index] = 1.0;
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<f64> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().copied()
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    pub fn support_size(&self) -> usize {
        self.entries.iter().filter(|&&x| x > 0.0).count()
    }

    pub fn is_full_support(&self) -> bool {
        self.entries.iter().all(|&x| x > 0.0)
    }

    /// Append zeros up to `dim` entries.
    pub fn padded(&self, dim: usize) -> Self {
        let mut entries = self.entries.clone();
        if entries.len() < dim {
            entries.resize(dim, 0.0);
        }
        Self { entries }
    }

    /// Comma-separated decimal text form.
    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|x| format!("{x}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Debug for ProbVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ProbVec").field(&self.entries).finish()
    }
}

impl std::ops::Index<usize> for ProbVec {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

#[derive(Serialize, Deserialize)]
struct ProbVecJson {
    p: Vec<f64>,
}

impl Serialize for ProbVec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProbVecJson {
            p: self.entries.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProbVec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ProbVecJson::deserialize(d)?;
        ProbVec::new(raw.p).map_err(serde::de::Error::custom)
    }
}

/// Accepts either the JSON form `{"p":[...]}` (or a bare JSON array) or
/// comma-separated decimals.
impl FromStr for ProbVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.starts_with('{') {
            let raw: ProbVecJson = serde_json::from_str(t)?;
            return ProbVec::new(raw.p);
        }
        if t.starts_with('[') {
            let raw: Vec<f64> = serde_json::from_str(t)?;
            return ProbVec::new(raw);
        }
        let entries = t
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("{x:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ProbVec::new(entries)
    }
}

/// Kronecker product `a ⊗ b` with entry `(i, j)` at index `i * b.dim() + j`.
pub fn tensor(a: &ProbVec, b: &ProbVec) -> Result<ProbVec> {
    tensor_capped(a, b, dimension_cap())
}

pub fn tensor_capped(a: &ProbVec, b: &ProbVec, cap: usize) -> Result<ProbVec> {
    let n = check_dim("tensor product", a.dim() as u128 * b.dim() as u128, cap)?;
    let mut out = Vec::with_capacity(n);
    for &x in &a.entries {
        out.extend(b.entries.iter().map(|&y| x * y));
    }
    Ok(ProbVec::from_vec_unchecked(out))
}

/// `a^{⊗k}`; `k = 0` gives the one-dimensional vector `(1)`.
pub fn tensor_power(a: &ProbVec, k: u32) -> Result<ProbVec> {
    let cap = dimension_cap();
    check_dim(
        "tensor power",
        (a.dim() as u128).checked_pow(k).unwrap_or(u128::MAX),
        cap,
    )?;
    let mut acc = ProbVec::from_vec_unchecked(vec![1.0]);
    for _ in 0..k {
        acc = tensor_capped(&acc, a, cap)?;
    }
    Ok(acc)
}

/// Weighted concatenation `⊕_i w_i b_i`.
pub fn direct_sum(blocks: &[(f64, ProbVec)]) -> Result<ProbVec> {
    if blocks.is_empty() {
        return Err(Error::InvalidProbability("direct sum of no blocks".into()));
    }
    let total: f64 = blocks.iter().map(|(w, _)| *w).sum();
    if blocks.iter().any(|(w, _)| !(*w >= 0.0)) {
        return Err(Error::InvalidProbability("negative block weight".into()));
    }
    if (total - 1.0).abs() > INGEST_TOL {
        return Err(Error::InvalidProbability(format!(
            "block weights sum to {total}, expected 1"
        )));
    }
    let n: u128 = blocks.iter().map(|(_, b)| b.dim() as u128).sum();
    let n = check_dim("direct sum", n, dimension_cap())?;
    let mut out = Vec::with_capacity(n);
    for (w, b) in blocks {
        out.extend(b.entries.iter().map(|&x| x * w / total));
    }
    Ok(ProbVec::from_vec_unchecked(out))
}

/// `½ Σ |a_i − b_i|`.
pub fn trace_distance(a: &ProbVec, b: &ProbVec) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(0.5
        * a.entries
            .iter()
            .zip(&b.entries)
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>())
}

/// Nonincreasing rearrangement; equal entries keep their relative order.
pub fn sort_desc(a: &ProbVec) -> ProbVec {
    let mut entries = a.entries.clone();
    entries.sort_by(|x, y| y.total_cmp(x));
    ProbVec { entries }
}

/// Counter-based seed: `(root, stream)` fully determines a random sequence, so
/// trials can run in any order or in parallel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub root: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(root: u64, stream: u64) -> Self {
        Self { root, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.root);
        rng.set_stream(self.stream);
        rng
    }

    /// Derive an independent root for a named sub-experiment.
    pub fn derive_root(root: u64, tag: &str) -> u64 {
        // FNV-1a over the tag, then one splitmix64 round.
        let mut h: u64 = 0xcbf29ce484222325;
        for b in tag.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        splitmix64(root ^ h)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// A point drawn uniformly from the simplex (flat Dirichlet), via normalized
/// standard exponentials.
pub fn random_simplex<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ProbVec {
    loop {
        let w: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
        if let Ok(p) = ProbVec::from_weights(w) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pv(x: &[f64]) -> ProbVec {
        ProbVec::new(x.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn construction_clamps_and_rejects() {
        let p = pv(&[0.5, 0.5 + 1e-13, -1e-13]);
        assert_eq!(p.entries()[2], 0.0);
        assert!(ProbVec::new(vec![0.5, 0.6, -0.1]).is_err());
        assert!(ProbVec::new(vec![0.5, 0.4]).is_err());
        assert!(ProbVec::new(vec![]).is_err());
        assert!(ProbVec::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn tensor_examples() {
        let t = tensor(&pv(&[1.0]), &pv(&[0.3, 0.7])).unwrap();
        assert_eq!(t.entries(), &[0.3, 0.7]);
        let h = pv(&[0.5, 0.5]);
        assert_eq!(tensor(&h, &h).unwrap().entries(), &[0.25; 4]);
        let p = pv(&[0.65, 0.2, 0.15]);
        let pp = tensor(&p, &p).unwrap();
        assert_eq!(pp.dim(), 9);
        assert!((pp.max() - 0.4225).abs() < 1e-15);
    }

    #[test]
    fn tensor_cap_breach() {
        let a = ProbVec::uniform(8);
        let err = tensor_capped(&a, &a, 32).unwrap_err();
        assert!(err.is_resource_limit());
    }

    #[test]
    fn direct_sum_examples() {
        let s = direct_sum(&[(1.0, pv(&[0.3, 0.7]))]).unwrap();
        assert_eq!(s.entries(), &[0.3, 0.7]);
        let s = direct_sum(&[(0.5, pv(&[1.0])), (0.5, pv(&[1.0]))]).unwrap();
        assert_eq!(s.entries(), &[0.5, 0.5]);
        let s = direct_sum(&[(0.5, pv(&[0.5, 0.4, 0.1])), (0.5, pv(&[0.65, 0.2, 0.15]))]).unwrap();
        assert!(close(
            s.entries(),
            &[0.25, 0.2, 0.05, 0.325, 0.1, 0.075],
            1e-15
        ));
        assert!(direct_sum(&[(0.5, pv(&[1.0])), (0.4, pv(&[1.0]))]).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let a = pv(&[0.65, 0.2, 0.15]);
        assert_eq!(trace_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(
            trace_distance(&pv(&[1.0, 0.0]), &pv(&[0.0, 1.0])).unwrap(),
            1.0
        );
        let d = trace_distance(&a, &pv(&[0.5, 0.4, 0.1])).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
        assert!(matches!(
            trace_distance(&a, &pv(&[1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sort_examples() {
        assert_eq!(sort_desc(&pv(&[0.1, 0.9])).entries(), &[0.9, 0.1]);
        assert_eq!(sort_desc(&ProbVec::uniform(4)), ProbVec::uniform(4));
        assert_eq!(
            sort_desc(&pv(&[0.2, 0.65, 0.15])).entries(),
            &[0.65, 0.2, 0.15]
        );
    }

    #[test]
    fn parse_forms() {
        let a: ProbVec = "0.3, 0.7".parse().unwrap();
        let b: ProbVec = r#"{"p":[0.3,0.7]}"#.parse().unwrap();
        let c: ProbVec = "[0.3,0.7]".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"p":[0.3,0.7]}"#);
        let back: ProbVec = json.parse().unwrap();
        assert_eq!(back, a);
        assert!("0.3,abc".parse::<ProbVec>().is_err());
    }

    #[test]
    fn seeds_reproduce() {
        let s = Seed::new(7, 3);
        let a: Vec<u64> = (0..4).map(|_| s.rng().random()).collect();
        let b: Vec<u64> = (0..4).map(|_| s.rng().random()).collect();
        assert_eq!(a, b);
        let x: u64 = Seed::new(7, 4).rng().random();
        assert_ne!(a[0], x);
        assert_ne!(Seed::derive_root(7, "a"), Seed::derive_root(7, "b"));
    }

    fn simplex_strategy(dim: usize) -> impl Strategy<Value = ProbVec> {
        proptest::collection::vec(0.001f64..1.0, dim)
            .prop_map(|w| ProbVec::from_weights(w).unwrap())
    }

    proptest! {
        #[test]
        fn tensor_preserves_distance(a in simplex_strategy(3), b in simplex_strategy(3), c in simplex_strategy(4)) {
            let lhs = trace_distance(&tensor(&a, &c).unwrap(), &tensor(&b, &c).unwrap()).unwrap();
            let rhs = trace_distance(&a, &b).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn tensor_associative_up_to_order(a in simplex_strategy(2), b in simplex_strategy(3), c in simplex_strategy(2)) {
            let l = tensor(&tensor(&a, &b).unwrap(), &c).unwrap();
            let r = tensor(&a, &tensor(&b, &c).unwrap()).unwrap();
            let (ls, rs) = (sort_desc(&l), sort_desc(&r));
            prop_assert!(close(ls.entries(), rs.entries(), 1e-15));
        }

        #[test]
        fn trace_distance_is_metric(a in simplex_strategy(4), b in simplex_strategy(4), c in simplex_strategy(4)) {
            let ab = trace_distance(&a, &b).unwrap();
            let ba = trace_distance(&b, &a).unwrap();
            let ac = trace_distance(&a, &c).unwrap();
            let cb = trace_distance(&c, &b).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ab <= ac + cb + 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
            prop_assert!(trace_distance(&a, &a).unwrap() < 1e-12);
        }

        #[test]
        fn direct_sum_sorted_invariant_under_block_permutation(a in simplex_strategy(2), b in simplex_strategy(3), w in 0.05f64..0.95) {
            let x = sort_desc(&direct_sum(&[(w, a.clone()), (1.0 - w, b.clone())]).unwrap());
            let y = sort_desc(&direct_sum(&[(1.0 - w, b), (w, a)]).unwrap());
            prop_assert!(close(x.entries(), y.entries(), 1e-15));
        }
    }
}
