//! Natural density of describable index sets.

use num_integer::Integer;
use serde::Serialize;

use crate::index_set::IndexSetDescriptor;

/// Prefix lengths at which empirical densities are reported.
pub const DENSITY_LADDER: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

/// `count(k ≤ n) ≤ finite + [squares]·⌊√n⌋ + [powers_of_two]·(⌊log₂ n⌋ + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroBound {
    pub finite: u64,
    pub squares: bool,
    pub powers_of_two: bool,
}

impl ZeroBound {
    pub fn count_bound(&self, n: u64) -> u64 {
        let mut b = self.finite;
        if self.squares {
            b += n.isqrt();
        }
        if self.powers_of_two && n > 0 {
            b += n.ilog2() as u64 + 1;
        }
        b
    }

    pub fn describe(&self) -> String {
        let mut terms = Vec::new();
        if self.finite > 0 {
            terms.push(self.finite.to_string());
        }
        if self.squares {
            terms.push("floor(sqrt(n))".to_string());
        }
        if self.powers_of_two {
            terms.push("floor(log2(n)) + 1".to_string());
        }
        if terms.is_empty() {
            terms.push("0".to_string());
        }
        format!("count(k <= n) <= {}", terms.join(" + "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityValue {
    /// Reduced fraction in `[0, 1]`.
    ExactRational {
        numerator: u64,
        denominator: u64,
    },
    /// Density zero for an infinite set, with a counting bound.
    ZeroByBound {
        bound: ZeroBound,
        witness: String,
    },
    Unknown {
        reason: String,
    },
}

impl DensityValue {
    pub fn exact(numerator: u64, denominator: u64) -> Self {
        let g = numerator.gcd(&denominator).max(1);
        DensityValue::ExactRational {
            numerator: numerator / g,
            denominator: denominator / g,
        }
    }

    /// `Some(true)` for density zero, `Some(false)` for positive density.
    pub fn is_zero(&self) -> Option<bool> {
        match self {
            DensityValue::ExactRational { numerator, .. } => Some(*numerator == 0),
            DensityValue::ZeroByBound { .. } => Some(true),
            DensityValue::Unknown { .. } => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            DensityValue::ExactRational {
                numerator,
                denominator,
            } => Some(*numerator as f64 / *denominator as f64),
            DensityValue::ZeroByBound { .. } => Some(0.0),
            DensityValue::Unknown { .. } => None,
        }
    }
}

/// Exact natural density: finite sets have density 0, residue patterns
/// contribute `|R|/M`, squares and powers of two are counted by a bound.
pub fn natural_density(ds: &IndexSetDescriptor) -> DensityValue {
    let Some(profile) = ds.analyze() else {
        return DensityValue::Unknown {
            reason: format!("combined modulus exceeds {}", crate::index_set::MODULUS_CAP),
        };
    };
    if profile.is_finite() {
        return DensityValue::exact(0, 1);
    }
    let (num, den) = profile.density();
    if num > 0 {
        return DensityValue::exact(num, den);
    }
    let bound = ZeroBound {
        finite: profile.finite_count,
        squares: profile.has_squares,
        powers_of_two: profile.has_powers_of_two,
    };
    DensityValue::ZeroByBound {
        witness: bound.describe(),
        bound,
    }
}

/// `count(k ≤ n)/n` at one prefix length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefixDensity {
    pub n: u64,
    pub count: u64,
    pub density: f64,
}
