//! Finite carriers, subsets encoded as bitmasks, and maps between carriers.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported carrier. Every subset fits in a `u16`.
pub const MAX_POINTS: usize = 16;

/// Bitmask with the low `n` bits set.
pub fn full_mask(n: usize) -> u16 {
    debug_assert!(n <= MAX_POINTS);
    if n == MAX_POINTS {
        u16::MAX
    } else {
        (1u16 << n) - 1
    }
}

/// Iterates the set bits of `mask` in ascending order.
pub fn members(mask: u16) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(p)
        }
    })
}

/// Bitmask of the given points. Panics on points `>= 16`.
pub fn mask_of<I: IntoIterator<Item = usize>>(points: I) -> u16 {
    points.into_iter().fold(0u16, |m, p| m | (1u16 << p))
}

/// `[0,2]`-style rendering of a mask, also used as a canonical index label.
pub fn mask_label(mask: u16) -> String {
    let parts: Vec<String> = members(mask).map(|p| p.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// A non-empty finite carrier `{0, .., n-1}` with optional presentation labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSpace {
    n: usize,
    labels: Option<Vec<String>>,
}

impl PointSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_POINTS {
            return Err(Error::OutOfRange {
                what: "n",
                value: n,
                range: "1..=16",
            });
        }
        Ok(PointSpace { n, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut space = PointSpace::new(labels.len())?;
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != labels.len() {
            return Err(Error::Invariant("point labels must be distinct".into()));
        }
        space.labels = Some(labels);
        Ok(space)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn full_mask(&self) -> u16 {
        full_mask(self.n)
    }

    pub fn check_point(&self, point: usize) -> Result<()> {
        if point < self.n {
            Ok(())
        } else {
            Err(Error::PointOutOfRange { point, n: self.n })
        }
    }

    pub fn check_mask(&self, mask: u16) -> Result<()> {
        if mask & !self.full_mask() == 0 {
            Ok(())
        } else {
            Err(Error::Invariant(format!(
                "mask {mask:#b} has bits outside a space of {} points",
                self.n
            )))
        }
    }

    pub fn same_size(&self, other: &PointSpace) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected: self.n,
                found: other.n,
            })
        }
    }

    pub fn empty(&self) -> PointSet {
        PointSet { n: self.n, mask: 0 }
    }

    pub fn full(&self) -> PointSet {
        PointSet {
            n: self.n,
            mask: self.full_mask(),
        }
    }

    pub fn set(&self, mask: u16) -> Result<PointSet> {
        self.check_mask(mask)?;
        Ok(PointSet { n: self.n, mask })
    }

    pub fn set_of(&self, points: &[usize]) -> Result<PointSet> {
        for &p in points {
            self.check_point(p)?;
        }
        Ok(PointSet {
            n: self.n,
            mask: mask_of(points.iter().copied()),
        })
    }
}

/// A subset of an `n`-point carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    n: usize,
    mask: u16,
}

impl PointSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u16 {
        self.mask
    }

    pub fn contains(&self, point: usize) -> bool {
        point < self.n && self.mask & (1 << point) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn members(&self) -> impl Iterator<Item = usize> {
        members(self.mask)
    }

    fn same_space(&self, other: &PointSet) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected: self.n,
                found: other.n,
            })
        }
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet> {
        self.same_space(other)?;
        Ok(PointSet {
            n: self.n,
            mask: self.mask | other.mask,
        })
    }

    pub fn intersection(&self, other: &PointSet) -> Result<PointSet> {
        self.same_space(other)?;
        Ok(PointSet {
            n: self.n,
            mask: self.mask & other.mask,
        })
    }

    pub fn complement(&self) -> PointSet {
        PointSet {
            n: self.n,
            mask: !self.mask & full_mask(self.n),
        }
    }

    pub fn is_subset(&self, other: &PointSet) -> Result<bool> {
        self.same_space(other)?;
        Ok(self.mask & !other.mask == 0)
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&mask_label(self.mask))
    }
}

/// A function between two finite carriers, given by its value table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointMap {
    domain: PointSpace,
    codomain: PointSpace,
    values: Vec<usize>,
}

impl PointMap {
    pub fn new(domain: PointSpace, codomain: PointSpace, values: Vec<usize>) -> Result<Self> {
        if values.len() != domain.n() {
            return Err(Error::Invariant(format!(
                "map has {} values for a domain of {} points",
                values.len(),
                domain.n()
            )));
        }
        for &v in &values {
            codomain.check_point(v)?;
        }
        Ok(PointMap {
            domain,
            codomain,
            values,
        })
    }

    pub fn identity(space: &PointSpace) -> Self {
        PointMap {
            domain: space.clone(),
            codomain: space.clone(),
            values: (0..space.n()).collect(),
        }
    }

    pub fn domain(&self) -> &PointSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &PointSpace {
        &self.codomain
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, point: usize) -> usize {
        self.values[point]
    }

    /// Preimage of a codomain mask as a domain mask.
    pub fn preimage(&self, mask: u16) -> u16 {
        self.values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| mask & (1 << v) != 0)
            .fold(0u16, |m, (p, _)| m | (1 << p))
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &PointMap) -> Result<PointMap> {
        self.codomain.same_size(&next.domain)?;
        Ok(PointMap {
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            values: self.values.iter().map(|&v| next.values[v]).collect(),
        })
    }

    /// Every map from an `n`-point carrier to an `m`-point carrier, in
    /// lexicographic order of value tables.
    pub fn all(domain: &PointSpace, codomain: &PointSpace) -> Vec<PointMap> {
        let n = domain.n();
        let m = codomain.n();
        let total = m.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let mut values = vec![0; n];
                for slot in values.iter_mut().rev() {
                    *slot = code % m;
                    code /= m;
                }
                PointMap {
                    domain: domain.clone(),
                    codomain: codomain.clone(),
                    values,
                }
            })
            .collect()
    }
}
