//! Exact row-space rank over the rationals.

use num_traits::Zero;

use crate::rational::Rational;

/// Incrementally maintained reduced row basis.
///
/// Each stored row has a pivot column with entry one, and every other stored
/// row is zero in that column.
#[derive(Debug, Clone, Default)]
pub struct RowSpace {
    width: usize,
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RowSpace {
    pub fn new(width: usize) -> Self {
        RowSpace {
            width,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    fn reduce(&self, mut row: Vec<Rational>) -> Vec<Rational> {
        for (pivot, basis) in &self.rows {
            if row[*pivot].is_zero() {
                continue;
            }
            let factor = row[*pivot].clone();
            for (x, b) in row.iter_mut().zip(basis) {
                if !b.is_zero() {
                    *x -= &factor * b;
                }
            }
        }
        row
    }

    /// True when `row` already lies in the span.
    pub fn contains(&self, row: &[Rational]) -> bool {
        assert_eq!(row.len(), self.width, "row width mismatch");
        self.reduce(row.to_vec()).iter().all(Zero::is_zero)
    }

    /// Adds `row`; returns whether the rank grew.
    pub fn insert(&mut self, row: Vec<Rational>) -> bool {
        assert_eq!(row.len(), self.width, "row width mismatch");
        let mut row = self.reduce(row);
        let Some(pivot) = row.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = row[pivot].recip();
        for x in row.iter_mut() {
            *x *= &inv;
        }
        for (_, basis) in self.rows.iter_mut() {
            if basis[pivot].is_zero() {
                continue;
            }
            let factor = basis[pivot].clone();
            for (b, r) in basis.iter_mut().zip(&row) {
                if !r.is_zero() {
                    *b -= &factor * r;
                }
            }
        }
        self.rows.push((pivot, row));
        true
    }
}

/// Rank of the matrix whose rows are `rows`.
pub fn rank<I>(width: usize, rows: I) -> usize
where
    I: IntoIterator<Item = Vec<Rational>>,
{
    let mut space = RowSpace::new(width);
    for row in rows {
        space.insert(row);
        if space.rank() == width {
            break;
        }
    }
    space.rank()
}
