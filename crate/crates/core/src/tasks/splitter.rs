use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{ParamMap, ParamValue};

/// One resampling split: positions used for fitting and for testing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Resampling co-strategy.
///
/// `Kfold` cuts `0..n` into `k` contiguous folds, the first `n % k` of
/// them one element longer. With a `seed` the positions are first shuffled
/// by Fisher–Yates driven by the 64-bit LCG
/// `s ← s·6364136223846793005 + 1442695040888963407` (seeded with `seed`),
/// drawing `j = (s >> 33) mod (i + 1)` for `i = n−1, …, 1`. Index lists
/// inside each split are sorted.
///
/// `Holdout` and `TemporalHoldout` train on the first `⌊f·n⌋` positions
/// and test on the rest, so training never follows testing in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Splitter {
    Kfold {
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Holdout {
        train_fraction: f64,
    },
    TemporalHoldout {
        train_fraction: f64,
    },
}

impl Splitter {
    pub fn kfold(k: usize) -> Result<Self> {
        Splitter::Kfold { k, seed: None }.validated()
    }

    pub fn kfold_shuffled(k: usize, seed: u64) -> Result<Self> {
        Splitter::Kfold { k, seed: Some(seed) }.validated()
    }

    pub fn holdout(train_fraction: f64) -> Result<Self> {
        Splitter::Holdout { train_fraction }.validated()
    }

    pub fn temporal_holdout(train_fraction: f64) -> Result<Self> {
        Splitter::TemporalHoldout { train_fraction }.validated()
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Splitter::Kfold { .. } => "kfold",
            Splitter::Holdout { .. } => "holdout",
            Splitter::TemporalHoldout { .. } => "temporal_holdout",
        }
    }

    /// Whether every split keeps training positions before test positions.
    pub fn is_temporal(&self) -> bool {
        matches!(self, Splitter::TemporalHoldout { .. } | Splitter::Holdout { .. })
    }

    fn validated(self) -> Result<Self> {
        match &self {
            Splitter::Kfold { k, .. } if *k < 2 => Err(Error::domain("k", k, "integers ≥ 2")),
            Splitter::Holdout { train_fraction } | Splitter::TemporalHoldout { train_fraction }
                if !(*train_fraction > 0.0 && *train_fraction < 1.0) =>
            {
                Err(Error::domain("train_fraction", train_fraction, "(0, 1)"))
            }
            _ => Ok(self),
        }
    }

    pub fn split(&self, n: usize) -> Result<Vec<Split>> {
        match self {
            Splitter::Kfold { k, seed } => kfold(*k, *seed, n),
            Splitter::Holdout { train_fraction } | Splitter::TemporalHoldout { train_fraction } => {
                let n_train = holdout_size(*train_fraction, n);
                if n_train == 0 || n_train == n {
                    let needed = (2..)
                        .find(|&m| {
                            let t = holdout_size(*train_fraction, m);
                            t > 0 && t < m
                        })
                        .expect("fraction in (0, 1)");
                    return Err(Error::TooFewSamples { needed, got: n });
                }
                Ok(vec![Split {
                    train: (0..n_train).collect(),
                    test: (n_train..n).collect(),
                }])
            }
        }
    }

    /// `{kind, …}` as a parameter map.
    pub fn to_params(&self) -> ParamMap {
        let mut p = ParamMap::new().with("kind", self.kind());
        match self {
            Splitter::Kfold { k, seed } => {
                p.insert("k", *k as i64);
                if let Some(s) = seed {
                    p.insert("seed", *s as i64);
                }
            }
            Splitter::Holdout { train_fraction } | Splitter::TemporalHoldout { train_fraction } => {
                p.insert("train_fraction", *train_fraction);
            }
        }
        p
    }

    /// Inverse of [`Splitter::to_params`]. `kind` may instead be passed
    /// separately, as workflow files do.
    pub fn from_params(kind: Option<&str>, params: &ParamMap) -> Result<Self> {
        let kind = match kind {
            Some(k) => k,
            None => params
                .get("kind")
                .and_then(ParamValue::as_str)
                .ok_or_else(|| Error::UnknownParameter("kind".into()))?,
        };
        let allowed: &[&str] = match kind {
            "kfold" => &["kind", "k", "seed"],
            "holdout" | "temporal_holdout" => &["kind", "train_fraction"],
            other => {
                return Err(Error::domain(
                    "splitter",
                    other,
                    "one of {kfold, holdout, temporal_holdout}",
                ))
            }
        };
        if let Some(key) = params.keys().find(|k| !allowed.contains(k)) {
            return Err(Error::UnknownParameter(key.to_string()));
        }
        let int = |key: &str| -> Result<Option<i64>> {
            params
                .get(key)
                .map(|v| v.as_i64().ok_or_else(|| Error::domain(key, v, "integers")))
                .transpose()
        };
        let fraction = || -> Result<f64> {
            let v = params
                .get("train_fraction")
                .ok_or_else(|| Error::UnknownParameter("train_fraction".into()))?;
            v.as_f64().ok_or_else(|| Error::domain("train_fraction", v, "(0, 1)"))
        };
        match kind {
            "kfold" => {
                let k = int("k")?.unwrap_or(5);
                if k < 2 {
                    return Err(Error::domain("k", k, "integers ≥ 2"));
                }
                let seed = int("seed")?
                    .map(|s| u64::try_from(s).map_err(|_| Error::domain("seed", s, "integers ≥ 0")))
                    .transpose()?;
                Splitter::Kfold { k: k as usize, seed }.validated()
            }
            "holdout" => Splitter::holdout(fraction()?),
            _ => Splitter::temporal_holdout(fraction()?),
        }
    }
}

fn holdout_size(fraction: f64, n: usize) -> usize {
    (fraction * n as f64).floor() as usize
}

fn kfold(k: usize, seed: Option<u64>, n: usize) -> Result<Vec<Split>> {
    if n < k {
        return Err(Error::TooFewSamples { needed: k, got: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(seed) = seed {
        shuffle(&mut order, seed);
    }
    let (base, extra) = (n / k, n % k);
    let mut start = 0;
    let mut splits = Vec::with_capacity(k);
    for fold in 0..k {
        let len = base + usize::from(fold < extra);
        let mut test = order[start..start + len].to_vec();
        let mut train: Vec<usize> = order[..start].iter().chain(&order[start + len..]).copied().collect();
        test.sort_unstable();
        train.sort_unstable();
        splits.push(Split { train, test });
        start += len;
    }
    Ok(splits)
}

/// Portable Fisher–Yates shuffle driven by Knuth's MMIX LCG.
pub fn shuffle<T>(items: &mut [T], seed: u64) {
    let mut state = seed;
    for i in (1..items.len()).rev() {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let j = ((state >> 33) % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}
