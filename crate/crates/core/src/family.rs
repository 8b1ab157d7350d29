//! Indexed families of {0,1}-valued quasimetrics.

use crate::error::{Error, Result};
use crate::points::{members, PointSpace};
use crate::topology::Preorder;

/// An `I`-indexed family `(d_i)` of {0,1}-valued functions on `X × X`.
///
/// Matrix `i` is stored as rows of bitmasks: bit `y` of `rows[i][x]` is
/// `d_i(x, y)`. Indices are kept sorted by label, matrices permuted with
/// them. Values built with [`QuasiFamily::new`] satisfy the quasimetric
/// axioms; [`QuasiFamily::new_unchecked`] only checks shape, for feeding
/// the axiom checker.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuasiFamily {
    space: PointSpace,
    indices: Vec<String>,
    rows: Vec<Vec<u16>>,
}

fn rows_from_matrix(n: usize, label: &str, matrix: &[Vec<u8>]) -> Result<Vec<u16>> {
    if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Invariant(format!(
            "matrix for index `{label}` must be {n}x{n}"
        )));
    }
    matrix
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .try_fold(0u16, |acc, (y, &v)| match v {
                    0 => Ok(acc),
                    1 => Ok(acc | 1 << y),
                    other => Err(Error::Invariant(format!(
                        "entry {other} of index `{label}` is not 0 or 1"
                    ))),
                })
        })
        .collect()
}

impl QuasiFamily {
    pub fn new(
        space: PointSpace,
        indices: Vec<String>,
        matrices: Vec<Vec<Vec<u8>>>,
    ) -> Result<Self> {
        let q = Self::new_unchecked(space, indices, matrices)?;
        q.require_axioms()?;
        Ok(q)
    }

    /// Shape-checked only: square {0,1} matrices, distinct labels, `|I| ≥ 1`.
    pub fn new_unchecked(
        space: PointSpace,
        indices: Vec<String>,
        matrices: Vec<Vec<Vec<u8>>>,
    ) -> Result<Self> {
        if indices.len() != matrices.len() {
            return Err(Error::Invariant(format!(
                "{} index labels for {} matrices",
                indices.len(),
                matrices.len()
            )));
        }
        let rows = indices
            .iter()
            .zip(&matrices)
            .map(|(label, m)| rows_from_matrix(space.n(), label, m))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows_unchecked(space, indices, rows)
    }

    /// Builds from bitmask rows (`bit y of rows[i][x]` = `d_i(x,y)`).
    pub fn from_rows(space: PointSpace, indices: Vec<String>, rows: Vec<Vec<u16>>) -> Result<Self> {
        let q = Self::from_rows_unchecked(space, indices, rows)?;
        q.require_axioms()?;
        Ok(q)
    }

    pub fn from_rows_unchecked(
        space: PointSpace,
        indices: Vec<String>,
        rows: Vec<Vec<u16>>,
    ) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Invariant("the index set must be non-empty".into()));
        }
        if indices.len() != rows.len() {
            return Err(Error::Invariant("index and matrix counts differ".into()));
        }
        for r in &rows {
            if r.len() != space.n() {
                return Err(Error::Invariant(format!(
                    "each matrix needs {} rows",
                    space.n()
                )));
            }
            for &m in r {
                space.check_mask(m)?;
            }
        }
        let mut paired: Vec<(String, Vec<u16>)> = indices.into_iter().zip(rows).collect();
        paired.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = paired.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::Invariant(format!("duplicate index `{}`", w[0].0)));
        }
        let (indices, rows) = paired.into_iter().unzip();
        Ok(QuasiFamily {
            space,
            indices,
            rows,
        })
    }

    /// The family whose zero relations are the given preorders, labeled
    /// `i0, i1, ...`.
    pub fn from_preorders(preorders: &[&Preorder]) -> Result<Self> {
        let n = preorders
            .first()
            .ok_or_else(|| Error::Invariant("the index set must be non-empty".into()))?
            .n();
        let space = PointSpace::new(n)?;
        let full = space.full_mask();
        let mut indices = Vec::new();
        let mut rows = Vec::new();
        for (i, p) in preorders.iter().enumerate() {
            if p.n() != n {
                return Err(Error::SpaceMismatch {
                    expected: n,
                    found: p.n(),
                });
            }
            indices.push(format!("i{i}"));
            rows.push(p.rows().iter().map(|&r| !r & full).collect());
        }
        Self::from_rows(space, indices, rows)
    }

    fn require_axioms(&self) -> Result<()> {
        match crate::qmetric::check_quasifamily(self).first() {
            None => Ok(()),
            Some(v) => Err(Error::Invariant(v.to_string())),
        }
    }

    pub fn space(&self) -> &PointSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn indices(&self) -> &[String] {
        &self.indices
    }

    pub fn index_count(&self) -> usize {
        self.indices.len()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.indices
            .binary_search_by(|l| l.as_str().cmp(label))
            .map_err(|_| Error::UnknownIndex(label.to_string()))
    }

    /// `d_i(x, y)` for the index at position `i`.
    pub fn d(&self, i: usize, x: usize, y: usize) -> u8 {
        ((self.rows[i][x] >> y) & 1) as u8
    }

    /// Row `x` of matrix `i`: the points at distance 1 from `x`.
    pub fn far_from(&self, i: usize, x: usize) -> u16 {
        self.rows[i][x]
    }

    /// Points `p` with `d_i(p, x) = 1`.
    pub fn far_to(&self, i: usize, x: usize) -> u16 {
        (0..self.n())
            .filter(|&p| self.rows[i][p] & (1 << x) != 0)
            .fold(0u16, |m, p| m | 1 << p)
    }

    /// `{y : d_i(x,y) = 0}` as a mask.
    pub fn ball_mask(&self, i: usize, x: usize) -> u16 {
        !self.rows[i][x] & self.space.full_mask()
    }

    /// Intersection of the balls at `x` over every index.
    pub fn core_ball(&self, x: usize) -> u16 {
        (0..self.index_count()).fold(self.space.full_mask(), |acc, i| acc & self.ball_mask(i, x))
    }

    pub fn rows(&self, i: usize) -> &[u16] {
        &self.rows[i]
    }

    pub fn matrix(&self, i: usize) -> Vec<Vec<u8>> {
        let n = self.n();
        (0..n)
            .map(|x| (0..n).map(|y| self.d(i, x, y)).collect())
            .collect()
    }

    /// The zero relation `d_i(x,y) = 0` of index `i`, if it is a preorder.
    pub fn zero_preorder(&self, i: usize) -> Result<Preorder> {
        let rows = (0..self.n()).map(|x| self.ball_mask(i, x)).collect();
        Preorder::new(self.n(), rows)
    }

    /// Labels for each point: supplied labels or decimal positions.
    pub fn point_name(&self, x: usize) -> String {
        self.space
            .labels()
            .map_or_else(|| x.to_string(), |l| l[x].clone())
    }

    /// Relabels the carrier; the matrices are unchanged.
    pub fn with_space(self, space: PointSpace) -> Result<Self> {
        self.space.same_size(&space)?;
        Ok(QuasiFamily { space, ..self })
    }

    /// Keeps the indices for which `keep` holds.
    pub fn retain_indices(&self, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let (indices, rows): (Vec<String>, Vec<Vec<u16>>) = (0..self.index_count())
            .filter(|&i| keep(i))
            .map(|i| (self.indices[i].clone(), self.rows[i].clone()))
            .unzip();
        Self::from_rows(self.space.clone(), indices, rows)
    }

    /// Every (x, y) pair with `d_i(x,y) = 0`, as index lists, for reports.
    pub fn zero_pairs(&self, i: usize) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|x| members(self.ball_mask(i, x)).map(move |y| (x, y)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize) -> PointSpace {
        PointSpace::new(n).unwrap()
    }

    #[test]
    fn decodes_a_single_matrix() {
        let q = QuasiFamily::new(
            space(2),
            vec!["d".into()],
            vec![vec![vec![0, 1], vec![0, 0]]],
        )
        .unwrap();
        assert_eq!(q.d(0, 0, 1), 1);
        assert_eq!(q.d(0, 1, 0), 0);
        assert_eq!(q.ball_mask(0, 0), 0b01);
        assert_eq!(q.ball_mask(0, 1), 0b11);
        assert_eq!(q.far_to(0, 1), 0b01);
    }

    #[test]
    fn rejects_nonzero_diagonal() {
        let err = QuasiFamily::new(
            space(2),
            vec!["d".into()],
            vec![vec![vec![0, 0], vec![0, 1]]],
        );
        assert!(matches!(err, Err(Error::Invariant(_))));
        let raw = QuasiFamily::new_unchecked(
            space(2),
            vec!["d".into()],
            vec![vec![vec![0, 0], vec![0, 1]]],
        );
        assert!(raw.is_ok());
    }

    #[test]
    fn indices_are_sorted_with_matrices() {
        let q = QuasiFamily::new(
            space(2),
            vec!["b".into(), "a".into()],
            vec![vec![vec![0, 1], vec![0, 0]], vec![vec![0, 0], vec![1, 0]]],
        )
        .unwrap();
        assert_eq!(q.indices(), &["a".to_string(), "b".to_string()]);
        assert_eq!(q.matrix(0), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(q.position("b").unwrap(), 1);
        assert!(matches!(q.position("c"), Err(Error::UnknownIndex(_))));
    }

    #[test]
    fn shape_errors() {
        assert!(QuasiFamily::new(space(2), vec![], vec![]).is_err());
        assert!(QuasiFamily::new(
            space(2),
            vec!["a".into()],
            vec![vec![vec![0, 2], vec![0, 0]]]
        )
        .is_err());
        assert!(QuasiFamily::new(space(2), vec!["a".into()], vec![vec![vec![0, 0]]]).is_err());
        assert!(QuasiFamily::new(
            space(1),
            vec!["a".into(), "a".into()],
            vec![vec![vec![0]], vec![vec![0]]]
        )
        .is_err());
    }

    #[test]
    fn preorder_round_trip() {
        let p = Preorder::new(3, vec![0b101, 0b110, 0b100]).unwrap();
        let q = QuasiFamily::from_preorders(&[&p]).unwrap();
        assert_eq!(
            q.matrix(0),
            vec![vec![0, 1, 0], vec![1, 0, 0], vec![1, 1, 0]]
        );
        assert_eq!(q.zero_preorder(0).unwrap(), p);
    }
}
