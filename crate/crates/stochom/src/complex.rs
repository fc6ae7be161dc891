//! Abstract simplicial complexes with per-cell existence probabilities.
//!
//! Cells are sorted vertex tuples. A `RandomComplex` pairs a face-closed
//! complex with an exact rational probability for every cell; a
//! `Configuration` records one outcome of the independent per-cell coin
//! flips, and `realize` maps it to the classical subcomplex that actually
//! exists (a cell survives only when its whole closure is switched on).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// A single simplex, stored as a strictly increasing vertex tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    vertices: Vec<u32>,
}

impl Cell {
    pub fn new(mut vertices: Vec<u32>) -> Result<Self, ComplexError> {
        vertices.sort_unstable();
        let distinct = vertices.windows(2).all(|w| w[0] < w[1]);
        if vertices.is_empty() || !distinct {
            return Err(ComplexError::InvalidCell { vertices });
        }
        Ok(Cell { vertices })
    }

    /// Panicking constructor for literals in tests and builders.
    pub fn of(vertices: &[u32]) -> Self {
        Cell::new(vertices.to_vec()).expect("invalid cell literal")
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// All proper faces of every dimension, excluding the cell itself.
    pub fn proper_faces(&self) -> Vec<Cell> {
        let n = self.vertices.len();
        let mut faces = Vec::new();
        for mask in 1u32..((1 << n) - 1) {
            let vs: Vec<u32> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.vertices[i])
                .collect();
            faces.push(Cell { vertices: vs });
        }
        faces
    }

    /// Codimension-one faces in the order obtained by dropping vertex i.
    pub fn facets(&self) -> Vec<Cell> {
        (0..self.vertices.len())
            .map(|i| {
                let mut vs = self.vertices.clone();
                vs.remove(i);
                Cell { vertices: vs }
            })
            .collect()
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn is_face_of(&self, other: &Cell) -> bool {
        self.vertices.iter().all(|v| other.contains_vertex(*v))
    }
}

// Cells order by (dimension, vertex tuple); this is the enumeration and
// serialization order everywhere.
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertices
            .len()
            .cmp(&other.vertices.len())
            .then_with(|| self.vertices.cmp(&other.vertices))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("invalid cell: vertices must be distinct and non-empty, got {vertices:?}")]
    InvalidCell { vertices: Vec<u32> },
    #[error("complex is not face-closed: cell {cell} is missing face {missing}")]
    MissingFace { cell: Cell, missing: Cell },
    #[error("duplicate cell {0}")]
    DuplicateCell(Cell),
    #[error("probability {value} for cell {cell} is outside [0,1]")]
    ProbabilityRange { cell: Cell, value: Rat },
    #[error("cell {0} has no probability assigned")]
    MissingProbability(Cell),
    #[error("probability assigned to unknown cell {0}")]
    UnknownCell(Cell),
}

/// A finite abstract simplicial complex: a face-closed set of cells.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    cells: BTreeSet<Cell>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        SimplicialComplex::default()
    }

    /// Builds a complex from an explicit cell set, rejecting missing faces.
    pub fn new(cells: BTreeSet<Cell>) -> Result<Self, ComplexError> {
        for cell in &cells {
            for facet in cell.facets() {
                if cell.dimension() >= 1 && !cells.contains(&facet) {
                    return Err(ComplexError::MissingFace {
                        cell: cell.clone(),
                        missing: facet,
                    });
                }
            }
        }
        Ok(SimplicialComplex { cells })
    }

    /// Builds the smallest complex containing the given cells.
    pub fn closure_of<I: IntoIterator<Item = Cell>>(cells: I) -> Self {
        let mut all = BTreeSet::new();
        for cell in cells {
            for face in cell.proper_faces() {
                all.insert(face);
            }
            all.insert(cell);
        }
        SimplicialComplex { cells: all }
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter()
    }

    pub fn cells_of_dim(&self, k: usize) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.dimension() == k)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.cells.contains(cell)
    }

    pub fn dimension(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dimension()).max()
    }

    pub fn vertex_set(&self) -> BTreeSet<u32> {
        self.cells
            .iter()
            .flat_map(|c| c.vertices().iter().copied())
            .collect()
    }

    pub fn is_face_closed(&self) -> bool {
        self.cells
            .iter()
            .all(|c| c.proper_faces().iter().all(|f| self.cells.contains(f)))
    }

    /// The maximal 1-skeleton over `m` points labeled 1..=m: all vertices
    /// and all edges.
    pub fn complete_graph(m: u32) -> Self {
        let mut cells = BTreeSet::new();
        for i in 1..=m {
            cells.insert(Cell::of(&[i]));
            for j in (i + 1)..=m {
                cells.insert(Cell::of(&[i, j]));
            }
        }
        SimplicialComplex { cells }
    }

    /// The maximal complex over `m` points: every nonempty subset is a cell.
    pub fn maximal(m: u32) -> Self {
        let verts: Vec<u32> = (1..=m).collect();
        let mut cells = BTreeSet::new();
        for mask in 1u32..(1 << m) {
            let vs: Vec<u32> = (0..m as usize)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| verts[i])
                .collect();
            cells.insert(Cell { vertices: vs });
        }
        SimplicialComplex { cells }
    }
}

/// A simplicial complex whose cells carry independent existence
/// probabilities (exact rationals in [0,1]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomComplex {
    complex: SimplicialComplex,
    prob: BTreeMap<Cell, Rat>,
}

impl RandomComplex {
    pub fn new(
        complex: SimplicialComplex,
        prob: BTreeMap<Cell, Rat>,
    ) -> Result<Self, ComplexError> {
        for cell in complex.cells() {
            match prob.get(cell) {
                None => return Err(ComplexError::MissingProbability(cell.clone())),
                Some(p) => {
                    if p < &Rat::zero() || p > &Rat::one() {
                        return Err(ComplexError::ProbabilityRange {
                            cell: cell.clone(),
                            value: p.clone(),
                        });
                    }
                }
            }
        }
        for cell in prob.keys() {
            if !complex.contains(cell) {
                return Err(ComplexError::UnknownCell(cell.clone()));
            }
        }
        Ok(RandomComplex { complex, prob })
    }

    pub fn empty() -> Self {
        RandomComplex {
            complex: SimplicialComplex::empty(),
            prob: BTreeMap::new(),
        }
    }

    /// Assigns the same probability to every cell of a complex.
    pub fn uniform(complex: SimplicialComplex, p: Rat) -> Result<Self, ComplexError> {
        let prob = complex.cells().map(|c| (c.clone(), p.clone())).collect();
        RandomComplex::new(complex, prob)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn prob(&self, cell: &Cell) -> &Rat {
        &self.prob[cell]
    }

    pub fn len(&self) -> usize {
        self.complex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.complex.is_empty()
    }

    /// Cells in (dimension, vertex tuple) order; the fixed enumeration
    /// order used for configuration bitmasks.
    pub fn ordered_cells(&self) -> Vec<&Cell> {
        self.complex.cells().collect()
    }

    /// Product of the probabilities over the whole closure of a cell: the
    /// chance the cell survives a realization on its own.
    pub fn closure_probability(&self, cell: &Cell) -> Rat {
        let mut acc = self.prob(cell).clone();
        for face in cell.proper_faces() {
            acc *= self.prob(&face);
        }
        acc
    }
}

/// One outcome of the per-cell coin flips of a `RandomComplex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    on: BTreeMap<Cell, bool>,
}

impl Configuration {
    pub fn new(rc: &RandomComplex, on: BTreeMap<Cell, bool>) -> Result<Self, ComplexError> {
        for cell in on.keys() {
            if !rc.complex().contains(cell) {
                return Err(ComplexError::UnknownCell(cell.clone()));
            }
        }
        for cell in rc.complex().cells() {
            if !on.contains_key(cell) {
                return Err(ComplexError::MissingProbability(cell.clone()));
            }
        }
        Ok(Configuration { on })
    }

    /// Configuration from a bitmask over `rc.ordered_cells()`.
    pub fn from_mask(rc: &RandomComplex, mask: u64) -> Self {
        let on = rc
            .ordered_cells()
            .iter()
            .enumerate()
            .map(|(i, c)| ((*c).clone(), mask >> i & 1 == 1))
            .collect();
        Configuration { on }
    }

    pub fn is_on(&self, cell: &Cell) -> bool {
        self.on[cell]
    }
}

/// The classical subcomplex that exists under a configuration: a cell is
/// present iff every cell of its closure is switched on.
pub fn realize(rc: &RandomComplex, cfg: &Configuration) -> SimplicialComplex {
    let cells: BTreeSet<Cell> = rc
        .complex()
        .cells()
        .filter(|c| cfg.is_on(c) && c.proper_faces().iter().all(|f| cfg.is_on(f)))
        .cloned()
        .collect();
    // present cells are closed under faces by construction
    SimplicialComplex { cells }
}

/// Probability of observing exactly this configuration of coin flips.
pub fn configuration_probability(rc: &RandomComplex, cfg: &Configuration) -> Rat {
    let mut acc = Rat::one();
    for cell in rc.complex().cells() {
        if cfg.is_on(cell) {
            acc *= rc.prob(cell);
        } else {
            acc *= Rat::one() - rc.prob(cell);
        }
    }
    acc
}
