//! Finite integer sets inside a host interval `[0, N)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest Cantor depth accepted by [`cantor_build`].
pub const DEFAULT_MAX_CANTOR_DEPTH: u32 = 16;

/// A finite subset of `[0, ambient)`.
///
/// `ambient` doubles as the modulus when the set is read inside the cyclic
/// group of that order. Elements are kept sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSet")]
pub struct DiscreteSet {
    ambient: usize,
    elements: Vec<usize>,
}

#[derive(Deserialize)]
struct RawSet {
    ambient: usize,
    elements: Vec<usize>,
}

impl TryFrom<RawSet> for DiscreteSet {
    type Error = Error;

    fn try_from(raw: RawSet) -> Result<Self> {
        DiscreteSet::new(raw.ambient, raw.elements)
    }
}

impl DiscreteSet {
    /// Builds a set from strictly increasing elements below `ambient`.
    pub fn new(ambient: usize, elements: Vec<usize>) -> Result<Self> {
        if ambient == 0 {
            return Err(Error::Argument("ambient must be positive".into()));
        }
        if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Argument(format!(
                "elements must be strictly increasing ({} followed by {})",
                w[0], w[1]
            )));
        }
        if let Some(&last) = elements.last() {
            if last >= ambient {
                return Err(Error::Range(format!(
                    "element {last} outside [0, {ambient})"
                )));
            }
        }
        Ok(Self { ambient, elements })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(ambient: usize, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut elements: Vec<usize> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        Self::new(ambient, elements)
    }

    /// The whole interval `[0, ambient)`.
    pub fn full(ambient: usize) -> Result<Self> {
        Self::new(ambient, (0..ambient).collect())
    }

    pub fn empty(ambient: usize) -> Result<Self> {
        Self::new(ambient, Vec::new())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, value: usize) -> bool {
        self.elements.binary_search(&value).is_ok()
    }

    pub fn is_subset(&self, other: &DiscreteSet) -> bool {
        self.elements.iter().all(|&e| other.contains(e))
    }

    /// Same elements in a larger (or equal) host interval.
    pub fn with_ambient(&self, ambient: usize) -> Result<Self> {
        Self::new(ambient, self.elements.clone())
    }

    /// Smallest odd ambient `>= self.ambient()`, elements unchanged.
    pub fn oddified(&self) -> Self {
        let ambient = self.ambient | 1;
        Self { ambient, elements: self.elements.clone() }
    }

    pub fn mask(&self) -> Bitmask {
        Bitmask::from_set(self)
    }

    /// Point values of the indicator function on `[0, ambient)`.
    pub fn indicator(&self) -> Vec<f64> {
        let mut values = vec![0.0; self.ambient];
        for &e in &self.elements {
            values[e] = 1.0;
        }
        values
    }
}

/// Fixed-length bitmask view of a [`DiscreteSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmask {
    len: usize,
    words: Vec<u64>,
}

impl Bitmask {
    pub fn from_set(set: &DiscreteSet) -> Self {
        let len = set.ambient();
        let mut words = vec![0u64; len.div_ceil(64)];
        for &e in set.elements() {
            words[e / 64] |= 1 << (e % 64);
        }
        Self { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Finite-scale fractional density: `cardinality = delta_hat * ambient^alpha_hat`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DensityEstimate {
    pub alpha_hat: f64,
    pub cardinality: usize,
    pub ambient: usize,
    pub delta_hat: f64,
}

/// Triadic Cantor set `C_depth` with ambient `3^depth + 1`.
///
/// `C_0 = {1}` and `C_{i+1} = C_i ∪ {3^{i+1} + 1 - c : c ∈ C_i}`.
pub fn cantor_build(depth: u32) -> Result<DiscreteSet> {
    cantor_build_limited(depth, DEFAULT_MAX_CANTOR_DEPTH)
}

pub fn cantor_build_limited(depth: u32, max_depth: u32) -> Result<DiscreteSet> {
    if depth > max_depth {
        return Err(Error::SizeLimit(format!(
            "cantor depth {depth} exceeds maximum {max_depth}"
        )));
    }
    let mut elements = vec![1usize];
    let mut scale = 1usize;
    for _ in 0..depth {
        scale *= 3;
        // reflected copy lies strictly above the current maximum
        let reflected: Vec<usize> = elements.iter().rev().map(|&c| scale + 1 - c).collect();
        elements.extend(reflected);
    }
    DiscreteSet::new(scale + 1, elements)
}

/// `alpha_hat = log(max(|A|, 1)) / log(N)`, the density of `A` relative to its
/// own ambient.
pub fn fractional_density_fit(set: &DiscreteSet) -> Result<DensityEstimate> {
    let ambient = set.ambient();
    if ambient < 2 {
        return Err(Error::Argument("density fit needs ambient >= 2".into()));
    }
    let cardinality = set.len();
    let alpha_hat = (cardinality.max(1) as f64).ln() / (ambient as f64).ln();
    let delta_hat = cardinality as f64 / (ambient as f64).powf(alpha_hat);
    Ok(DensityEstimate { alpha_hat, cardinality, ambient, delta_hat })
}

/// Ratios `|A ∩ [0, p]| / p^exponent` at each checkpoint `p`.
///
/// Growth of the sequence indicates `exponent` below the density exponent,
/// decay indicates it is above.
pub fn density_profile(
    set: &DiscreteSet,
    exponent: f64,
    checkpoints: &[usize],
) -> Result<Vec<(usize, f64)>> {
    if checkpoints.is_empty() {
        return Err(Error::Argument("checkpoint list is empty".into()));
    }
    if !(exponent > 0.0 && exponent <= 1.0) {
        return Err(Error::Parameter(format!("exponent {exponent} not in (0, 1]")));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("checkpoints must be ascending".into()));
    }
    if checkpoints[0] == 0 {
        return Err(Error::Argument("checkpoints must be positive".into()));
    }
    if let Some(&last) = checkpoints.last() {
        if last > set.ambient() {
            return Err(Error::Range(format!(
                "checkpoint {last} exceeds ambient {}",
                set.ambient()
            )));
        }
    }
    let elements = set.elements();
    Ok(checkpoints
        .iter()
        .map(|&p| {
            let count = elements.partition_point(|&e| e <= p);
            (p, count as f64 / (p as f64).powf(exponent))
        })
        .collect())
}

/// Quantizes points of `[0, 1]` onto `[0, target_n)` via `floor(x * (N - 1))`.
pub fn scale_embed(points: &[f64], target_n: usize) -> Result<DiscreteSet> {
    if target_n < 2 {
        return Err(Error::Argument("target ambient must be >= 2".into()));
    }
    let top = (target_n - 1) as f64;
    let mut out = Vec::with_capacity(points.len());
    for &x in points {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Range(format!("point {x} outside [0, 1]")));
        }
        out.push(((x * top).floor() as usize).min(target_n - 1));
    }
    DiscreteSet::from_unsorted(target_n, out)
}
