//! Classical homology of a deterministic complex over the rationals:
//! oriented boundary matrices, exact ranks, Betti numbers and the Euler
//! characteristic. No floating point anywhere.

use crate::complex::{Cell, SimplicialComplex};

/// Oriented simplicial boundary matrix from k-cells (columns) to
/// (k-1)-cells (rows), with the sorted-vertex orientation convention.
#[derive(Clone, Debug)]
pub struct BoundaryMatrix {
    rows: Vec<Cell>,
    cols: Vec<Cell>,
    entries: Vec<Vec<i64>>, // entries[r][c] in {-1, 0, 1}
}

impl BoundaryMatrix {
    pub fn rows(&self) -> &[Cell] {
        &self.rows
    }

    pub fn cols(&self) -> &[Cell] {
        &self.cols
    }

    pub fn entry(&self, r: usize, c: usize) -> i64 {
        self.entries[r][c]
    }

    pub fn rank(&self) -> usize {
        rank_fraction_free(self.entries.clone())
    }

    /// Matrix product with another boundary map (self ∘ other), used to
    /// check the chain-complex identity.
    pub fn compose(&self, other: &BoundaryMatrix) -> Vec<Vec<i64>> {
        let (n, m, p) = (self.rows.len(), self.cols.len(), other.cols.len());
        assert_eq!(m, other.rows.len());
        let mut out = vec![vec![0i64; p]; n];
        for r in 0..n {
            for c in 0..p {
                out[r][c] = (0..m).map(|k| self.entries[r][k] * other.entries[k][c]).sum();
            }
        }
        out
    }
}

/// Exact rank by fraction-free (Bareiss) elimination over the integers.
/// Panics on i128 overflow, which desk-scale matrices never reach.
fn rank_fraction_free(m: Vec<Vec<i64>>) -> usize {
    let mut a: Vec<Vec<i128>> = m
        .into_iter()
        .map(|row| row.into_iter().map(i128::from).collect())
        .collect();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut rank = 0;
    let mut prev_pivot: i128 = 1;
    for col in 0..cols {
        let pivot_row = (rank..rows).find(|&r| a[r][col] != 0);
        let Some(pr) = pivot_row else { continue };
        a.swap(rank, pr);
        let pivot = a[rank][col];
        for r in (rank + 1)..rows {
            for c in (col + 1)..cols {
                let num = pivot
                    .checked_mul(a[r][c])
                    .and_then(|x| x.checked_sub(a[r][col].checked_mul(a[rank][c]).unwrap()))
                    .expect("fraction-free elimination overflow");
                a[r][c] = num / prev_pivot;
            }
            a[r][col] = 0;
        }
        prev_pivot = pivot;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// The boundary map from k-cells down to (k-1)-cells.
pub fn boundary_matrix(complex: &SimplicialComplex, k: usize) -> BoundaryMatrix {
    assert!(k >= 1, "boundary matrix is defined for k >= 1");
    let rows: Vec<Cell> = complex.cells_of_dim(k - 1).cloned().collect();
    let cols: Vec<Cell> = complex.cells_of_dim(k).cloned().collect();
    let row_index: std::collections::HashMap<&Cell, usize> =
        rows.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut entries = vec![vec![0i64; cols.len()]; rows.len()];
    for (ci, cell) in cols.iter().enumerate() {
        for (drop, facet) in cell.facets().iter().enumerate() {
            let ri = row_index[facet];
            entries[ri][ci] = if drop % 2 == 0 { 1 } else { -1 };
        }
    }
    BoundaryMatrix {
        rows,
        cols,
        entries,
    }
}

/// The k-th Betti number over the rationals.
pub fn betti(complex: &SimplicialComplex, k: usize) -> usize {
    if complex.is_empty() {
        return 0;
    }
    let c_k = complex.cells_of_dim(k).count();
    if c_k == 0 {
        return 0;
    }
    let rank_k = if k == 0 {
        0
    } else {
        boundary_matrix(complex, k).rank()
    };
    let rank_k1 = boundary_matrix(complex, k + 1).rank();
    c_k - rank_k - rank_k1
}

/// All Betti numbers up to the complex dimension.
pub fn betti_all(complex: &SimplicialComplex) -> Vec<usize> {
    match complex.dimension() {
        None => Vec::new(),
        Some(d) => (0..=d).map(|k| betti(complex, k)).collect(),
    }
}

/// Euler characteristic as the alternating cell count.
pub fn euler(complex: &SimplicialComplex) -> i64 {
    let mut chi = 0i64;
    for cell in complex.cells() {
        chi += if cell.dimension() % 2 == 0 { 1 } else { -1 };
    }
    chi
}

/// Connected components of the 0/1-skeleton by union-find; the
/// independent b0 oracle for graphs.
pub fn components_union_find(complex: &SimplicialComplex) -> usize {
    let vertices: Vec<u32> = complex.vertex_set().into_iter().collect();
    let index: std::collections::HashMap<u32, usize> =
        vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for edge in complex.cells_of_dim(1) {
        let a = find(&mut parent, index[&edge.vertices()[0]]);
        let b = find(&mut parent, index[&edge.vertices()[1]]);
        parent[a] = b;
    }
    (0..vertices.len())
        .filter(|&i| find(&mut parent, i) == i)
        .count()
}
