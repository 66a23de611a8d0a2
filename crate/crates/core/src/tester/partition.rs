use rand::Rng;

use crate::boolfn::BitVector;
use crate::{Error, Result};

/// A map from coordinates `1..=n` to cells `1..=m_cells`. Cells may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    n: usize,
    m_cells: usize,
    assignment: Vec<u32>,
}

/// Each coordinate's cell is drawn independently and uniformly.
pub fn random_partition<R: Rng + ?Sized>(
    n: usize,
    m_cells: usize,
    rng: &mut R,
) -> Result<Partition> {
    if m_cells == 0 {
        return Err(Error::param("partition needs at least one cell"));
    }
    let assignment = (0..n).map(|_| rng.gen_range(1..=m_cells as u32)).collect();
    Ok(Partition {
        n,
        m_cells,
        assignment,
    })
}

impl Partition {
    pub fn from_assignment(m_cells: usize, assignment: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&c| c == 0 || c as usize > m_cells) {
            return Err(Error::param(format!("cell {bad} outside 1..={m_cells}")));
        }
        Ok(Partition {
            n: assignment.len(),
            m_cells,
            assignment,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m_cells(&self) -> usize {
        self.m_cells
    }

    /// Cell of coordinate `j` (1-based).
    pub fn cell(&self, j: usize) -> usize {
        self.assignment[j - 1] as usize
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    /// Coordinates of cell `i`, ascending.
    pub fn members(&self, i: usize) -> Vec<usize> {
        (1..=self.n).filter(|&j| self.cell(j) == i).collect()
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.m_cells];
        for &c in &self.assignment {
            sizes[c as usize - 1] += 1;
        }
        sizes
    }

    /// Adds empty cells up to `m_cells` in total.
    pub fn pad(&mut self, m_cells: usize) {
        self.m_cells = self.m_cells.max(m_cells);
    }

    /// `z` on cell `i`, zero elsewhere.
    pub fn restrict(&self, z: &BitVector, i: usize) -> BitVector {
        let mut x = BitVector::zeros(self.n);
        for (j, &c) in self.assignment.iter().enumerate() {
            if c as usize == i && z.get(j + 1) {
                x.set(j + 1, true);
            }
        }
        x
    }
}

/// The point constant on every cell: `x_j = y_{cell(j)}`.
pub fn expand_projection(p: &Partition, y: &BitVector) -> Result<BitVector> {
    if y.len() != p.m_cells {
        return Err(Error::DimensionMismatch {
            expected: p.m_cells,
            found: y.len(),
        });
    }
    let yw = y.words();
    let words = p.assignment.chunks(64).map(|chunk| {
        chunk.iter().enumerate().fold(0u64, |w, (b, &c)| {
            let c = c as usize - 1;
            w | ((yw[c >> 6] >> (c & 63)) & 1) << b
        })
    });
    Ok(BitVector::from_words(p.n, words))
}
