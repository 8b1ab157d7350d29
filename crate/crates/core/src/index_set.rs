//! Describable sets of positive integers and exact analysis of their tails.
//!
//! A descriptor is a boolean combination of four atom kinds: finite sets,
//! residue classes, perfect squares and powers of two. Past the largest
//! finite member, membership of `k` depends only on `k mod M` (with `M` the
//! lcm of all moduli), on whether `k` is a square and on whether `k` is a
//! power of two. [`TailProfile`] records which of those patterns recur
//! infinitely often and belong to the set, which decides finiteness and
//! natural density exactly.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Moduli whose lcm exceeds this bound are not analyzed.
pub const MODULUS_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum IndexSetDescriptor {
    Finite {
        members: Vec<u64>,
    },
    Residues {
        #[serde(rename = "mod")]
        modulus: u64,
        residues: Vec<u64>,
    },
    Squares,
    PowersOfTwo,
    Complement {
        of: Box<IndexSetDescriptor>,
    },
    Union {
        of: Vec<IndexSetDescriptor>,
    },
}

pub fn is_square(k: u64) -> bool {
    let r = k.isqrt();
    r * r == k
}

pub fn is_power_of_two(k: u64) -> bool {
    k.is_power_of_two()
}

impl IndexSetDescriptor {
    pub fn finite<I: IntoIterator<Item = u64>>(members: I) -> Self {
        let mut members: Vec<u64> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        IndexSetDescriptor::Finite { members }
    }

    pub fn residues<I: IntoIterator<Item = u64>>(modulus: u64, residues: I) -> Result<Self> {
        let mut residues: Vec<u64> = residues.into_iter().collect();
        residues.sort_unstable();
        residues.dedup();
        let d = IndexSetDescriptor::Residues { modulus, residues };
        d.validate()?;
        Ok(d)
    }

    pub fn complement(of: IndexSetDescriptor) -> Self {
        IndexSetDescriptor::Complement { of: Box::new(of) }
    }

    pub fn union(of: Vec<IndexSetDescriptor>) -> Self {
        IndexSetDescriptor::Union { of }
    }

    /// The empty set, written as an empty union.
    pub fn empty() -> Self {
        IndexSetDescriptor::Union { of: Vec::new() }
    }

    /// `a ∩ b`, written through complements and unions.
    pub fn intersection(a: IndexSetDescriptor, b: IndexSetDescriptor) -> Self {
        Self::complement(Self::union(vec![Self::complement(a), Self::complement(b)]))
    }

    /// `a \ b`.
    pub fn difference(a: IndexSetDescriptor, b: IndexSetDescriptor) -> Self {
        Self::complement(Self::union(vec![Self::complement(a), b]))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            IndexSetDescriptor::Residues { modulus, residues } => {
                if *modulus == 0 {
                    return Err(Error::Invariant(
                        "residue modulus must be at least 1".into(),
                    ));
                }
                if let Some(r) = residues.iter().find(|&&r| r >= *modulus) {
                    return Err(Error::Invariant(format!(
                        "residue {r} is not in [0, {modulus})"
                    )));
                }
                Ok(())
            }
            IndexSetDescriptor::Complement { of } => of.validate(),
            IndexSetDescriptor::Union { of } => of.iter().try_for_each(|d| d.validate()),
            _ => Ok(()),
        }
    }

    /// Sorts and deduplicates member and residue lists, recursively.
    pub fn canonicalize(&mut self) {
        match self {
            IndexSetDescriptor::Finite { members } => {
                members.sort_unstable();
                members.dedup();
            }
            IndexSetDescriptor::Residues { residues, .. } => {
                residues.sort_unstable();
                residues.dedup();
            }
            IndexSetDescriptor::Complement { of } => of.canonicalize(),
            IndexSetDescriptor::Union { of } => of.iter_mut().for_each(|d| d.canonicalize()),
            _ => {}
        }
    }

    /// Direct membership test.
    pub fn contains(&self, k: u64) -> bool {
        match self {
            IndexSetDescriptor::Finite { members } => members.binary_search(&k).is_ok(),
            IndexSetDescriptor::Residues { modulus, residues } => {
                residues.binary_search(&(k % modulus)).is_ok()
            }
            IndexSetDescriptor::Squares => is_square(k),
            IndexSetDescriptor::PowersOfTwo => is_power_of_two(k),
            IndexSetDescriptor::Complement { of } => !of.contains(k),
            IndexSetDescriptor::Union { of } => of.iter().any(|d| d.contains(k)),
        }
    }

    /// `|{k ∈ 1..=n : k ∈ self}|` by direct evaluation.
    pub fn count_up_to(&self, n: u64) -> u64 {
        (1..=n).filter(|&k| self.contains(k)).count() as u64
    }

    /// Membership of a large `k` from its residue, squareness and
    /// power-of-two flags, with every finite atom treated as empty.
    fn tail_member(&self, residue: u64, square: bool, power: bool) -> bool {
        match self {
            IndexSetDescriptor::Finite { .. } => false,
            IndexSetDescriptor::Residues { modulus, residues } => {
                residues.binary_search(&(residue % modulus)).is_ok()
            }
            IndexSetDescriptor::Squares => square,
            IndexSetDescriptor::PowersOfTwo => power,
            IndexSetDescriptor::Complement { of } => !of.tail_member(residue, square, power),
            IndexSetDescriptor::Union { of } => {
                of.iter().any(|d| d.tail_member(residue, square, power))
            }
        }
    }

    fn collect_atoms(&self, atoms: &mut Atoms) {
        match self {
            IndexSetDescriptor::Finite { members } => {
                atoms.finite_count += members.len() as u64;
                if let Some(&m) = members.last() {
                    atoms.finite_max = atoms.finite_max.max(m);
                }
            }
            IndexSetDescriptor::Residues { modulus, .. } => {
                atoms.modulus = atoms.modulus.and_then(|m| {
                    let l = m.lcm(modulus);
                    (l <= MODULUS_CAP).then_some(l)
                });
            }
            IndexSetDescriptor::Squares => atoms.squares = true,
            IndexSetDescriptor::PowersOfTwo => atoms.powers = true,
            IndexSetDescriptor::Complement { of } => of.collect_atoms(atoms),
            IndexSetDescriptor::Union { of } => of.iter().for_each(|d| d.collect_atoms(atoms)),
        }
    }

    /// Exact tail analysis, or `None` when the combined modulus exceeds
    /// [`MODULUS_CAP`].
    pub fn analyze(&self) -> Option<TailProfile> {
        let mut atoms = Atoms {
            modulus: Some(1),
            finite_max: 0,
            finite_count: 0,
            squares: false,
            powers: false,
        };
        self.collect_atoms(&mut atoms);
        let modulus = atoms.modulus?;
        let two_adic = modulus.trailing_zeros();
        let settle = atoms.finite_max.max(1u64 << two_adic);

        let dense_residues: Vec<u64> = (0..modulus)
            .filter(|&r| self.tail_member(r, false, false))
            .collect();

        let mut roots: Vec<Option<u64>> = vec![None; modulus as usize];
        for t in 0..modulus {
            let r = (t * t) % modulus;
            roots[r as usize].get_or_insert(t);
        }
        let square_residues: Vec<(u64, u64)> = roots
            .iter()
            .enumerate()
            .filter_map(|(r, t)| t.map(|t| (r as u64, t)))
            .filter(|&(r, _)| self.tail_member(r, true, false))
            .collect();

        // (2^e mod M, e even) is periodic from e = v2(M) on, with period
        // dividing lcm(ord, 2) <= 2M.
        let mut power_patterns = Vec::new();
        let mut seen = vec![false; 2 * modulus as usize];
        let mut value = pow_mod(2, two_adic as u64, modulus);
        for e in two_adic as u64..two_adic as u64 + 2 * modulus {
            let even = e % 2 == 0;
            let slot = 2 * value as usize + even as usize;
            if !seen[slot] {
                seen[slot] = true;
                if self.tail_member(value, even, true) {
                    power_patterns.push((value, even));
                }
            }
            value = (value * 2) % modulus;
        }
        power_patterns.sort_unstable();

        Some(TailProfile {
            modulus,
            two_adic,
            finite_max: atoms.finite_max,
            finite_count: atoms.finite_count,
            has_squares: atoms.squares,
            has_powers_of_two: atoms.powers,
            settle,
            dense_residues,
            square_residues,
            power_patterns,
        })
    }

    /// Whether the set is finite, or `None` when the analysis is out of reach.
    pub fn is_finite(&self) -> Option<bool> {
        self.analyze().map(|p| p.is_finite())
    }
}

struct Atoms {
    modulus: Option<u64>,
    finite_max: u64,
    finite_count: u64,
    squares: bool,
    powers: bool,
}

fn pow_mod(base: u64, exp: u64, modulus: u64) -> u64 {
    let mut result = 1 % modulus;
    let mut b = base % modulus;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = result * b % modulus;
        }
        b = b * b % modulus;
        e >>= 1;
    }
    result
}

/// Infinitely recurring membership patterns of a descriptor.
///
/// Every member greater than `settle` falls into one of the listed patterns,
/// and every listed pattern has members beyond any bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailProfile {
    pub modulus: u64,
    pub two_adic: u32,
    pub finite_max: u64,
    pub finite_count: u64,
    pub has_squares: bool,
    pub has_powers_of_two: bool,
    pub settle: u64,
    /// Residues `r` whose non-square, non-power-of-two members are in the set.
    pub dense_residues: Vec<u64>,
    /// `(r, t)` with `t² ≡ r`, for square residues in the set.
    pub square_residues: Vec<(u64, u64)>,
    /// `(2^e mod M, e even)` patterns of powers of two in the set.
    pub power_patterns: Vec<(u64, bool)>,
}

impl TailProfile {
    pub fn is_finite(&self) -> bool {
        self.dense_residues.is_empty()
            && self.square_residues.is_empty()
            && self.power_patterns.is_empty()
    }

    /// Natural density as `(numerator, denominator)`, not reduced.
    pub fn density(&self) -> (u64, u64) {
        (self.dense_residues.len() as u64, self.modulus)
    }

    /// Some member strictly greater than `bound`, when one is representable.
    pub fn member_beyond(&self, bound: u64) -> Option<u64> {
        let m = self.modulus;
        let b = bound.max(self.settle);
        let mut best: Option<u64> = None;
        let mut offer = |k: u64| best = Some(best.map_or(k, |cur| cur.min(k)));

        for &r in &self.dense_residues {
            let mut k = b + 1 + (r + m - (b + 1) % m) % m;
            while is_square(k) || is_power_of_two(k) {
                k += m;
            }
            offer(k);
        }
        for &(_, t) in &self.square_residues {
            let s0 = b.isqrt() + 1;
            let mut s = s0 + (t + m - s0 % m) % m;
            while s.is_power_of_two() {
                s += m;
            }
            if let Some(k) = s.checked_mul(s) {
                offer(k);
            }
        }
        let start = (64 - b.leading_zeros()).max(self.two_adic);
        for e in start..64 {
            let k = 1u64 << e;
            let pattern = (k % m, e % 2 == 0);
            if k > b && self.power_patterns.contains(&pattern) {
                offer(k);
                break;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_density_prefix(d: &IndexSetDescriptor, n: u64) -> f64 {
        d.count_up_to(n) as f64 / n as f64
    }

    #[test]
    fn membership() {
        let sq = IndexSetDescriptor::Squares;
        assert!(sq.contains(1) && sq.contains(49) && !sq.contains(50));
        let p2 = IndexSetDescriptor::PowersOfTwo;
        assert!(p2.contains(1) && p2.contains(64) && !p2.contains(12));
        let r = IndexSetDescriptor::residues(3, [0]).unwrap();
        assert!(r.contains(3) && !r.contains(4));
        assert!(!IndexSetDescriptor::empty().contains(1));
        let both = IndexSetDescriptor::intersection(sq.clone(), p2.clone());
        assert!(both.contains(16) && !both.contains(8) && !both.contains(9));
    }

    #[test]
    fn residues_must_be_below_modulus() {
        assert!(IndexSetDescriptor::residues(3, [3]).is_err());
        assert!(IndexSetDescriptor::residues(0, []).is_err());
    }

    #[test]
    fn finiteness_of_atoms() {
        assert_eq!(IndexSetDescriptor::finite([5, 7]).is_finite(), Some(true));
        assert_eq!(IndexSetDescriptor::Squares.is_finite(), Some(false));
        assert_eq!(IndexSetDescriptor::PowersOfTwo.is_finite(), Some(false));
        assert_eq!(IndexSetDescriptor::empty().is_finite(), Some(true));
        let none = IndexSetDescriptor::residues(4, []).unwrap();
        assert_eq!(none.is_finite(), Some(true));
    }

    #[test]
    fn sparse_intersections() {
        // squares that are powers of two: 4^j, infinite
        let a = IndexSetDescriptor::intersection(
            IndexSetDescriptor::Squares,
            IndexSetDescriptor::PowersOfTwo,
        );
        assert_eq!(a.is_finite(), Some(false));
        // powers of two congruent to 1 mod 4: only k = 1
        let b = IndexSetDescriptor::intersection(
            IndexSetDescriptor::PowersOfTwo,
            IndexSetDescriptor::residues(4, [1]).unwrap(),
        );
        let p = b.analyze().unwrap();
        assert!(p.is_finite());
        assert!(p.settle >= 1);
        // squares congruent to 2 mod 3 do not exist
        let c = IndexSetDescriptor::intersection(
            IndexSetDescriptor::Squares,
            IndexSetDescriptor::residues(3, [2]).unwrap(),
        );
        assert_eq!(c.is_finite(), Some(true));
        assert_eq!(c.count_up_to(10_000), 0);
        // odd powers of two: not squares, congruent to 2 mod 3
        let d = IndexSetDescriptor::difference(
            IndexSetDescriptor::PowersOfTwo,
            IndexSetDescriptor::Squares,
        );
        let p = d.analyze().unwrap();
        assert_eq!(p.power_patterns, vec![(0, false)]);
    }

    #[test]
    fn density_matches_prefix_counts() {
        let cases = [
            (IndexSetDescriptor::residues(3, [0]).unwrap(), (1, 3)),
            (
                IndexSetDescriptor::complement(IndexSetDescriptor::Squares),
                (1, 1),
            ),
            (
                IndexSetDescriptor::union(vec![
                    IndexSetDescriptor::residues(2, [0]).unwrap(),
                    IndexSetDescriptor::residues(3, [0]).unwrap(),
                ]),
                (4, 6),
            ),
        ];
        for (d, expected) in cases {
            let p = d.analyze().unwrap();
            assert_eq!(p.density(), expected, "{d:?}");
            let empirical = brute_density_prefix(&d, 60_000);
            let exact = expected.0 as f64 / expected.1 as f64;
            assert!(
                (empirical - exact).abs() < 0.01,
                "{d:?}: {empirical} vs {exact}"
            );
        }
    }

    #[test]
    fn witnesses_are_members() {
        let ds = [
            IndexSetDescriptor::Squares,
            IndexSetDescriptor::PowersOfTwo,
            IndexSetDescriptor::residues(7, [3, 5]).unwrap(),
            IndexSetDescriptor::intersection(
                IndexSetDescriptor::Squares,
                IndexSetDescriptor::residues(5, [4]).unwrap(),
            ),
            IndexSetDescriptor::intersection(
                IndexSetDescriptor::PowersOfTwo,
                IndexSetDescriptor::residues(7, [4]).unwrap(),
            ),
        ];
        for d in ds {
            let p = d.analyze().unwrap();
            for bound in [0u64, 10, 1_000, 123_456] {
                let k = p.member_beyond(bound).expect("infinite set has a witness");
                assert!(k > bound && d.contains(k), "{d:?} bound {bound} gave {k}");
            }
        }
    }

    #[test]
    fn large_moduli_are_out_of_reach() {
        let d = IndexSetDescriptor::union(vec![
            IndexSetDescriptor::residues(1_048_573, [0]).unwrap(),
            IndexSetDescriptor::residues(1_048_571, [0]).unwrap(),
        ]);
        assert!(d.analyze().is_none());
    }

    #[test]
    fn serde_shape() {
        let d = IndexSetDescriptor::union(vec![
            IndexSetDescriptor::residues(3, [0]).unwrap(),
            IndexSetDescriptor::complement(IndexSetDescriptor::Squares),
        ]);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(
            s,
            r#"{"type":"union","of":[{"type":"residues","mod":3,"residues":[0]},{"type":"complement","of":{"type":"squares"}}]}"#
        );
        let back: IndexSetDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
