//! Vietoris–Rips complexes over Euclidean point clouds and the
//! centroid-distance probability heuristics: a cell is likelier to exist
//! the closer a data point sits to its center of mass, relative to the
//! cell's own spread.

use std::collections::{BTreeMap, BTreeSet};

use num::One;
use thiserror::Error;

use crate::complex::{Cell, ComplexError, RandomComplex, Rat, SimplicialComplex};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("line {line}: row has {got} fields, expected {expected}")]
    RaggedRow {
        line: usize,
        got: usize,
        expected: usize,
    },
    #[error("line {line}: field {field:?} is not a finite number")]
    BadField { line: usize, field: String },
    #[error("vertex {0} does not index a point of the cloud")]
    VertexOutOfRange(u32),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Finite points in a fixed-dimension Euclidean space. Point i is vertex
/// i+1 of any complex built over the cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Self {
        if let Some(first) = points.first() {
            assert!(!first.is_empty(), "points need at least one coordinate");
            assert!(points.iter().all(|p| p.len() == first.len()));
        }
        assert!(points.iter().flatten().all(|c| c.is_finite()));
        PointCloud { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(|p| p.len())
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Parses comma-separated rows of floats. Empty and whitespace-only lines
/// are skipped; all rows must have the same arity.
pub fn load_points(text: &str) -> Result<PointCloud, GeometryError> {
    let mut points: Vec<Vec<f64>> = Vec::new();
    let mut expected: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in raw.split(',') {
            let value: f64 = field.trim().parse().map_err(|_| GeometryError::BadField {
                line,
                field: field.trim().to_string(),
            })?;
            if !value.is_finite() {
                return Err(GeometryError::BadField {
                    line,
                    field: field.trim().to_string(),
                });
            }
            row.push(value);
        }
        match expected {
            None => expected = Some(row.len()),
            Some(e) if e != row.len() => {
                return Err(GeometryError::RaggedRow {
                    line,
                    got: row.len(),
                    expected: e,
                })
            }
            _ => {}
        }
        points.push(row);
    }
    Ok(PointCloud { points })
}

/// The Vietoris–Rips complex at the given radius: a k-simplex for every
/// (k+1)-subset of points with all pairwise distances <= radius, up to
/// max_dim. Vertices are numbered 1..=n in point order.
pub fn vr_complex(pc: &PointCloud, radius: f64, max_dim: usize) -> SimplicialComplex {
    assert!(radius >= 0.0, "radius must be non-negative");
    let n = pc.len();
    let adjacent = |i: usize, j: usize| dist(pc.point(i), pc.point(j)) <= radius;
    let mut cells: BTreeSet<Cell> = (1..=n as u32).map(|v| Cell::of(&[v])).collect();
    // grow cliques by their largest vertex; every face appears earlier
    let mut frontier: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for _ in 1..=max_dim {
        let mut next = Vec::new();
        for clique in &frontier {
            let last = *clique.last().unwrap();
            for cand in (last + 1)..n {
                if clique.iter().all(|&i| adjacent(i, cand)) {
                    let mut bigger = clique.clone();
                    bigger.push(cand);
                    let vs: Vec<u32> = bigger.iter().map(|&i| i as u32 + 1).collect();
                    cells.insert(Cell::of(&vs));
                    next.push(bigger);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    SimplicialComplex::new(cells).expect("cliques are face-closed")
}

/// Probability family: exponent applied to the distance ratio r_d/r_m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbFamily {
    /// p = 1 - (r_d/r_m)^(1/k)
    Root,
    /// p = 1 - (r_d/r_m)^k
    Power,
    /// p = 1 - (r_d/r_m)^2
    Quadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbModel {
    pub family: ProbFamily,
    pub k: u32,
}

impl ProbModel {
    pub fn new(family: ProbFamily, k: u32) -> Self {
        assert!(k >= 1);
        ProbModel { family, k }
    }

    fn exponent(&self) -> f64 {
        match self.family {
            ProbFamily::Root => 1.0 / self.k as f64,
            ProbFamily::Power => self.k as f64,
            ProbFamily::Quadratic => 2.0,
        }
    }
}

/// Which vertex distance from the centroid plays the role of the cell
/// radius r_m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RadiusMode {
    #[default]
    Max,
    Min,
    Mean,
}

/// Assigns existence probabilities to a complex built over the cloud.
/// Vertices get probability 1. A higher cell gets
/// p = clamp(1 - (r_d/r_m)^e, 0, 1) where r_d is the distance from the
/// cell's centroid to the nearest cloud point and r_m the centroid-to-own-
/// vertex distance selected by `radius_mode`. A degenerate cell with
/// r_m = 0 gets probability 0 with a warning on stderr. Probabilities are
/// stored as the exact rational value of the computed float.
pub fn assign_probabilities(
    x: &SimplicialComplex,
    pc: &PointCloud,
    model: ProbModel,
    radius_mode: RadiusMode,
) -> Result<RandomComplex, GeometryError> {
    let mut prob: BTreeMap<Cell, Rat> = BTreeMap::new();
    for cell in x.cells() {
        for &v in cell.vertices() {
            if v == 0 || v as usize > pc.len() {
                return Err(GeometryError::VertexOutOfRange(v));
            }
        }
        if cell.dimension() == 0 {
            prob.insert(cell.clone(), Rat::one());
            continue;
        }
        let d = pc.dim().expect("non-empty cloud");
        let mut centroid = vec![0.0; d];
        for &v in cell.vertices() {
            for (c, x) in centroid.iter_mut().zip(pc.point(v as usize - 1)) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= cell.vertices().len() as f64;
        }
        let r_d = (0..pc.len())
            .map(|i| dist(&centroid, pc.point(i)))
            .fold(f64::INFINITY, f64::min);
        let vertex_dists: Vec<f64> = cell
            .vertices()
            .iter()
            .map(|&v| dist(&centroid, pc.point(v as usize - 1)))
            .collect();
        let r_m = match radius_mode {
            RadiusMode::Max => vertex_dists.iter().copied().fold(0.0, f64::max),
            RadiusMode::Min => vertex_dists.iter().copied().fold(f64::INFINITY, f64::min),
            RadiusMode::Mean => vertex_dists.iter().sum::<f64>() / vertex_dists.len() as f64,
        };
        let p = if r_m == 0.0 {
            eprintln!("warning: degenerate cell {cell} (all vertices coincide); probability 0");
            0.0
        } else {
            (1.0 - (r_d / r_m).powf(model.exponent())).clamp(0.0, 1.0)
        };
        prob.insert(
            cell.clone(),
            Rat::from_float(p).expect("probability is finite"),
        );
    }
    let complex = SimplicialComplex::new(x.cells().cloned().collect())?;
    Ok(RandomComplex::new(complex, prob)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology;
    use num::Zero;

    fn unit_square() -> PointCloud {
        load_points("0,0\n1,0\n1,1\n0,1\n").unwrap()
    }

    #[test]
    fn load_points_basics() {
        let pc = load_points("0,0\n1,0\n0,1\n").unwrap();
        assert_eq!(pc.len(), 3);
        assert_eq!(pc.dim(), Some(2));
        assert!(load_points("").unwrap().is_empty());
        assert!(matches!(
            load_points("1,2\n3\n"),
            Err(GeometryError::RaggedRow { line: 2, got: 1, expected: 2 })
        ));
        assert!(matches!(
            load_points("1,x\n"),
            Err(GeometryError::BadField { line: 1, .. })
        ));
        assert!(matches!(
            load_points("1,inf\n"),
            Err(GeometryError::BadField { line: 1, .. })
        ));
    }

    #[test]
    fn vr_triangle_radii() {
        let pc = load_points("0,0\n1,0\n0.5,0.8660254037844386\n").unwrap();
        let full = vr_complex(&pc, 1.0, 2);
        assert_eq!(full.len(), 7); // filled triangle
        assert_eq!(homology::betti(&full, 1), 0);
        let sparse = vr_complex(&pc, 0.5, 2);
        assert_eq!(sparse.len(), 3); // isolated vertices
    }

    #[test]
    fn vr_unit_square_cycle() {
        let x = vr_complex(&unit_square(), 1.05, 1);
        assert_eq!(x.cells_of_dim(1).count(), 4); // diagonals are sqrt(2)
        assert_eq!(homology::betti(&x, 1), 1);
    }

    #[test]
    fn vr_monotone_in_radius() {
        let pc = load_points("0,0\n2,0\n1,1.5\n0.3,0.4\n").unwrap();
        let mut prev = vr_complex(&pc, 0.0, 2);
        for r in [0.5, 1.0, 1.6, 2.4, 3.0] {
            let next = vr_complex(&pc, r, 2);
            assert!(prev.cells().all(|c| next.contains(c)), "radius {r}");
            prev = next;
        }
    }

    #[test]
    fn max_dim_cap() {
        let pc = load_points("0,0\n1,0\n0,1\n1,1\n").unwrap();
        let x = vr_complex(&pc, 2.0, 1);
        assert_eq!(x.dimension(), Some(1));
        assert_eq!(x.cells_of_dim(1).count(), 6);
    }

    #[test]
    fn probability_extremes() {
        // midpoint of the long edge coincides with a data point: r_d = 0
        let pc = load_points("0,0\n2,0\n1,0\n").unwrap();
        let x = vr_complex(&pc, 2.0, 1);
        let rc =
            assign_probabilities(&x, &pc, ProbModel::new(ProbFamily::Root, 2), RadiusMode::Max)
                .unwrap();
        assert_eq!(rc.prob(&Cell::of(&[1, 2])), &Rat::one());
        for v in 1..=3 {
            assert_eq!(rc.prob(&Cell::of(&[v])), &Rat::one());
        }
        // nearest data point to the short edges' centers are their own
        // endpoints: r_d = r_m, probability 0
        assert_eq!(rc.prob(&Cell::of(&[1, 3])), &Rat::zero());
        assert_eq!(rc.prob(&Cell::of(&[2, 3])), &Rat::zero());
    }

    #[test]
    fn quadratic_hand_value() {
        // edge {1,2} center (1,0); nearest cloud point (1,0.5) at r_d=0.5,
        // endpoints at r_m=1; quadratic gives 1 - 0.25 = 0.75
        let pc = load_points("0,0\n2,0\n1,0.5\n").unwrap();
        let x = vr_complex(&pc, 2.5, 1);
        let rc = assign_probabilities(
            &x,
            &pc,
            ProbModel::new(ProbFamily::Quadratic, 1),
            RadiusMode::Max,
        )
        .unwrap();
        assert_eq!(rc.prob(&Cell::of(&[1, 2])), &Rat::from_float(0.75).unwrap());
    }

    #[test]
    fn root_model_monotone_in_ratio() {
        let model = ProbModel::new(ProbFamily::Root, 3);
        let p = |ratio: f64| 1.0 - ratio.powf(model.exponent());
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let value = p(i as f64 / 10.0);
            assert!(value <= prev);
            prev = value;
        }
    }

    #[test]
    fn degenerate_duplicate_points() {
        let pc = load_points("0,0\n0,0\n").unwrap();
        let x = vr_complex(&pc, 1.0, 1);
        let rc =
            assign_probabilities(&x, &pc, ProbModel::new(ProbFamily::Root, 2), RadiusMode::Max)
                .unwrap();
        assert_eq!(rc.prob(&Cell::of(&[1, 2])), &Rat::zero());
    }

    #[test]
    fn all_probabilities_in_range() {
        let pc = load_points("0,0\n1,0.1\n0.4,0.9\n1.3,1.1\n0.2,0.5\n").unwrap();
        let x = vr_complex(&pc, 1.5, 2);
        for family in [ProbFamily::Root, ProbFamily::Power, ProbFamily::Quadratic] {
            for mode in [RadiusMode::Max, RadiusMode::Min, RadiusMode::Mean] {
                let rc =
                    assign_probabilities(&x, &pc, ProbModel::new(family, 2), mode).unwrap();
                for cell in rc.complex().cells() {
                    let p = rc.prob(cell);
                    assert!(p >= &Rat::zero() && p <= &Rat::one());
                    if cell.dimension() == 0 {
                        assert_eq!(p, &Rat::one());
                    }
                }
            }
        }
    }
}
