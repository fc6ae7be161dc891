//! Ground-truth expected invariants by exhaustive enumeration, the
//! closed-form expected Euler characteristic, symbolic polynomial
//! expansion, seeded Monte Carlo estimation, and the subcomplex count.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::RwLock;

use num::{BigUint, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::complex::{Cell, RandomComplex, Rat, SimplicialComplex};
use crate::homology;

/// Cap on cells enumerated exactly (2^N configurations).
pub const ENUMERATION_GUARD: usize = 24;
/// Cap on cells expanded symbolically.
pub const SYMBOLIC_GUARD: usize = 16;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("complex has {cells} cells, above the enumeration guard of {guard}; use the Monte Carlo estimator instead")]
    GuardExceeded { cells: usize, guard: usize },
}

/// Bitmask over `ordered_cells` of each cell's closure (the cell and all
/// its faces).
fn closure_masks(cells: &[&Cell]) -> Vec<u64> {
    let index: HashMap<&Cell, usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    cells
        .iter()
        .map(|c| {
            let mut mask = 1u64 << index[*c];
            for face in c.proper_faces() {
                mask |= 1u64 << index[&face];
            }
            mask
        })
        .collect()
}

/// Cells that actually exist under an on/off mask: those whose whole
/// closure is switched on.
fn realized_mask(on: u64, closures: &[u64]) -> u64 {
    let mut out = 0u64;
    for (i, cl) in closures.iter().enumerate() {
        if on & cl == *cl {
            out |= 1 << i;
        }
    }
    out
}

fn complex_of_mask(cells: &[&Cell], mask: u64) -> SimplicialComplex {
    // realized masks are face-closed, so the unchecked closure is exact
    SimplicialComplex::closure_of(
        cells
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, c)| (*c).clone()),
    )
}

fn betti_of_mask(cells: &[&Cell], mask: u64, k: usize, memo: &mut HashMap<u64, i64>) -> i64 {
    if let Some(&b) = memo.get(&mask) {
        return b;
    }
    let b = homology::betti(&complex_of_mask(cells, mask), k) as i64;
    memo.insert(mask, b);
    b
}

/// Expected k-th Betti number by summing b_k(realization) times the
/// configuration probability over all 2^N configurations. Exact.
pub fn expected_betti_exact(rc: &RandomComplex, k: usize) -> Result<Rat, OracleError> {
    let cells = rc.ordered_cells();
    let n = cells.len();
    if n > ENUMERATION_GUARD {
        return Err(OracleError::GuardExceeded {
            cells: n,
            guard: ENUMERATION_GUARD,
        });
    }
    let closures = closure_masks(&cells);
    let probs: Vec<Rat> = cells.iter().map(|c| rc.prob(c).clone()).collect();
    let mut memo: HashMap<u64, i64> = HashMap::new();
    let mut total = Rat::zero();
    // depth-first over cells so each configuration costs one multiplication
    let mut stack: Vec<(usize, u64, Rat)> = vec![(0, 0, Rat::one())];
    while let Some((i, on, acc)) = stack.pop() {
        if acc.is_zero() {
            continue;
        }
        if i == n {
            let b = betti_of_mask(&cells, realized_mask(on, &closures), k, &mut memo);
            if b != 0 {
                total += acc * Rat::from_integer(b.into());
            }
            continue;
        }
        let p = &probs[i];
        stack.push((i + 1, on | 1 << i, acc.clone() * p));
        stack.push((i + 1, on, acc * (Rat::one() - p)));
    }
    Ok(total)
}

/// Expected Euler characteristic in closed form: the alternating sum over
/// cells of the product of closure probabilities. No enumeration.
pub fn expected_euler_exact(rc: &RandomComplex) -> Rat {
    let mut chi = Rat::zero();
    for cell in rc.complex().cells() {
        let term = rc.closure_probability(cell);
        if cell.dimension() % 2 == 0 {
            chi += term;
        } else {
            chi -= term;
        }
    }
    chi
}

/// Expected Betti number as a multivariate polynomial, one 0/1 indicator
/// variable per cell. Stored fully expanded and reduced: a monomial is a
/// set of cells (indicators are idempotent) with an integer coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicPolynomial {
    terms: BTreeMap<BTreeSet<Cell>, i64>,
}

impl SymbolicPolynomial {
    pub fn terms(&self) -> impl Iterator<Item = (&BTreeSet<Cell>, i64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the exact variable set (all closure cells listed).
    pub fn coefficient(&self, monomial: &BTreeSet<Cell>) -> i64 {
        self.terms.get(monomial).copied().unwrap_or(0)
    }

    /// Exact value at a numeric probability assignment.
    pub fn eval(&self, assignment: &BTreeMap<Cell, Rat>) -> Rat {
        let mut total = Rat::zero();
        for (monomial, coeff) in &self.terms {
            let mut term = Rat::from_integer((*coeff).into());
            for cell in monomial {
                term *= &assignment[cell];
            }
            total += term;
        }
        total
    }
}

impl fmt::Display for SymbolicPolynomial {
    /// Shorthand rendering: each monomial is labeled by its maximal cells,
    /// the implied faces absorbed into the symbol.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keyed: Vec<(usize, &BTreeSet<Cell>, i64)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.len(), m, *c))
            .collect();
        keyed.sort();
        let mut out = String::new();
        for (i, (_, monomial, coeff)) in keyed.iter().enumerate() {
            let maximal: Vec<&Cell> = monomial
                .iter()
                .filter(|c| !monomial.iter().any(|d| d != *c && c.is_face_of(d)))
                .collect();
            let label: String = maximal
                .iter()
                .map(|c| {
                    let vs: Vec<String> =
                        c.vertices().iter().map(|v| v.to_string()).collect();
                    format!("p{{{}}}", vs.join(","))
                })
                .collect();
            let mag = coeff.abs();
            if i == 0 {
                if *coeff < 0 {
                    out.push_str("- ");
                }
            } else if *coeff < 0 {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            if mag != 1 {
                out.push_str(&mag.to_string());
            }
            out.push_str(&label);
        }
        write!(f, "{out}")
    }
}

/// Full symbolic expansion of the expected k-th Betti number. Computed as
/// b_k of every realization followed by a subset-lattice Möbius transform,
/// so the coefficient of a variable set T is
/// Σ_{S ⊆ T} (−1)^{|T|−|S|} b_k(realize(S)).
pub fn symbolic_expected_betti(
    rc: &RandomComplex,
    k: usize,
) -> Result<SymbolicPolynomial, OracleError> {
    let cells = rc.ordered_cells();
    let n = cells.len();
    if n > SYMBOLIC_GUARD {
        return Err(OracleError::GuardExceeded {
            cells: n,
            guard: SYMBOLIC_GUARD,
        });
    }
    let closures = closure_masks(&cells);
    let mut memo: HashMap<u64, i64> = HashMap::new();
    let mut vals: Vec<i64> = (0..1u64 << n)
        .map(|on| betti_of_mask(&cells, realized_mask(on, &closures), k, &mut memo))
        .collect();
    for bit in 0..n {
        for mask in 0..1usize << n {
            if mask >> bit & 1 == 1 {
                vals[mask] -= vals[mask ^ (1 << bit)];
            }
        }
    }
    let mut terms = BTreeMap::new();
    for (mask, &coeff) in vals.iter().enumerate() {
        if coeff != 0 {
            let monomial: BTreeSet<Cell> = cells
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| (*c).clone())
                .collect();
            terms.insert(monomial, coeff);
        }
    }
    Ok(SymbolicPolynomial { terms })
}

/// Coefficient of the monomial named by its maximal cells: the variable
/// set looked up is the face closure of `maximal_cells`.
pub fn monomial_coefficient(poly: &SymbolicPolynomial, maximal_cells: &BTreeSet<Cell>) -> i64 {
    let closure: BTreeSet<Cell> = maximal_cells
        .iter()
        .flat_map(|c| {
            let mut v = c.proper_faces();
            v.push(c.clone());
            v
        })
        .collect();
    poly.coefficient(&closure)
}

/// Monte Carlo estimate of an expected Betti number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Seeded Monte Carlo estimator. Sample i draws from an independent
/// counter-based substream (stream i of a ChaCha8 generator seeded with
/// `seed`), and the accumulators are integers, so the result is
/// bit-identical across runs and across thread counts.
pub fn mc_estimate(rc: &RandomComplex, k: usize, samples: u64, seed: u64) -> McEstimate {
    assert!(samples >= 2, "at least two samples required");
    let cells = rc.ordered_cells();
    let closures = closure_masks(&cells);
    let probs: Vec<f64> = cells
        .iter()
        .map(|c| rc.prob(c).to_f64().expect("probability fits f64"))
        .collect();
    let memo: RwLock<HashMap<u64, i64>> = RwLock::new(HashMap::new());
    let betti_of = |mask: u64| -> i64 {
        if let Some(&b) = memo.read().unwrap().get(&mask) {
            return b;
        }
        let b = homology::betti(&complex_of_mask(&cells, mask), k) as i64;
        memo.write().unwrap().insert(mask, b);
        b
    };
    let (sum, sum_sq) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let mut on = 0u64;
            for (j, p) in probs.iter().enumerate() {
                if rng.gen::<f64>() < *p {
                    on |= 1 << j;
                }
            }
            let b = betti_of(realized_mask(on, &closures));
            (b as i128, (b as i128) * (b as i128))
        })
        .reduce(|| (0i128, 0i128), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = sum as f64 / n;
    let variance = ((sum_sq as f64) - (sum as f64) * (sum as f64) / n) / (n - 1.0);
    McEstimate {
        mean,
        std_error: (variance.max(0.0) / n).sqrt(),
        samples,
        seed,
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Number of subcomplexes of the maximal 1-skeleton over n points:
/// Σ_{k=0}^n C(n,k) · 2^{C(k,2)} — choose the vertex set, then any edge
/// subset over it.
pub fn count_subcomplexes(n: u64) -> BigUint {
    let mut total = BigUint::zero();
    for k in 0..=n {
        let edges = if k >= 2 { k * (k - 1) / 2 } else { 0 };
        total += binomial(n, k) << edges;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::rat;
    use crate::format::parse_complex;

    fn two_point_example() -> RandomComplex {
        parse_complex("v 1 1/2\nv 2 1/4\ne 1 2 1/3\n").unwrap()
    }

    #[test]
    fn two_point_expected_b0() {
        let rc = two_point_example();
        assert_eq!(expected_betti_exact(&rc, 0).unwrap(), rat(17, 24));
        assert_eq!(expected_euler_exact(&rc), rat(17, 24));
    }

    #[test]
    fn degenerate_probabilities_recover_classical() {
        let x = SimplicialComplex::complete_graph(4);
        let all_on = RandomComplex::uniform(x.clone(), rat(1, 1)).unwrap();
        assert_eq!(expected_betti_exact(&all_on, 1).unwrap(), rat(3, 1));
        let all_off = RandomComplex::uniform(x, rat(0, 1)).unwrap();
        assert_eq!(expected_betti_exact(&all_off, 1).unwrap(), rat(0, 1));
    }

    #[test]
    fn triangle_uniform_half_b0() {
        let x = SimplicialComplex::complete_graph(3);
        let rc = RandomComplex::uniform(x, rat(1, 2)).unwrap();
        // brute-force value over all 2^6 configurations
        assert_eq!(expected_betti_exact(&rc, 0).unwrap(), rat(73, 64));
    }

    #[test]
    fn euler_alternating_betti_sum() {
        let x = SimplicialComplex::closure_of([Cell::of(&[1, 2, 3])]);
        let rc = RandomComplex::uniform(x, rat(2, 5)).unwrap();
        let alt = expected_betti_exact(&rc, 0).unwrap() - expected_betti_exact(&rc, 1).unwrap()
            + expected_betti_exact(&rc, 2).unwrap();
        assert_eq!(expected_euler_exact(&rc), alt);
    }

    #[test]
    fn symbolic_two_points() {
        let rc = two_point_example();
        let poly = symbolic_expected_betti(&rc, 0).unwrap();
        // p1 + p2 - p1 p2 p12 in shorthand
        assert_eq!(poly.len(), 3);
        let v1: BTreeSet<Cell> = [Cell::of(&[1])].into();
        let v2: BTreeSet<Cell> = [Cell::of(&[2])].into();
        let edge: BTreeSet<Cell> = [Cell::of(&[1, 2])].into();
        assert_eq!(monomial_coefficient(&poly, &v1), 1);
        assert_eq!(monomial_coefficient(&poly, &v2), 1);
        assert_eq!(monomial_coefficient(&poly, &edge), -1);
        assert_eq!(poly.to_string(), "p{1} + p{2} - p{1,2}");
        // evaluation matches enumeration
        let assignment: BTreeMap<Cell, Rat> = rc
            .ordered_cells()
            .iter()
            .map(|c| ((*c).clone(), rc.prob(c).clone()))
            .collect();
        assert_eq!(poly.eval(&assignment), rat(17, 24));
    }

    #[test]
    fn symbolic_three_point_skeleton() {
        let rc =
            RandomComplex::uniform(SimplicialComplex::complete_graph(3), rat(1, 2)).unwrap();
        let poly = symbolic_expected_betti(&rc, 0).unwrap();
        for i in 1..=3u32 {
            assert_eq!(monomial_coefficient(&poly, &[Cell::of(&[i])].into()), 1);
        }
        for e in [[1, 2], [1, 3], [2, 3]] {
            assert_eq!(monomial_coefficient(&poly, &[Cell::of(&e)].into()), -1);
        }
        let cycle: BTreeSet<Cell> = [Cell::of(&[1, 2]), Cell::of(&[1, 3]), Cell::of(&[2, 3])]
            .into();
        assert_eq!(monomial_coefficient(&poly, &cycle), 1);
        assert_eq!(poly.len(), 7);
    }

    #[test]
    fn symbolic_monomials_are_face_closed() {
        let rc =
            RandomComplex::uniform(SimplicialComplex::maximal(3), rat(1, 3)).unwrap();
        for k in 0..=1 {
            let poly = symbolic_expected_betti(&rc, k).unwrap();
            for (monomial, _) in poly.terms() {
                for cell in monomial {
                    for face in cell.proper_faces() {
                        assert!(monomial.contains(&face));
                    }
                }
            }
        }
    }

    #[test]
    fn points_only_symbolic_b0() {
        let x = SimplicialComplex::closure_of([Cell::of(&[1]), Cell::of(&[4]), Cell::of(&[9])]);
        let rc = RandomComplex::uniform(x, rat(1, 7)).unwrap();
        let poly = symbolic_expected_betti(&rc, 0).unwrap();
        assert_eq!(poly.to_string(), "p{1} + p{4} + p{9}");
    }

    #[test]
    fn mc_deterministic_and_degenerate() {
        let rc = two_point_example();
        let a = mc_estimate(&rc, 0, 10_000, 7);
        let b = mc_estimate(&rc, 0, 10_000, 7);
        assert_eq!(a, b);
        let ones =
            RandomComplex::uniform(SimplicialComplex::complete_graph(3), rat(1, 1)).unwrap();
        let est = mc_estimate(&ones, 0, 100, 1);
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_error, 0.0);
        let zeros =
            RandomComplex::uniform(SimplicialComplex::complete_graph(3), rat(0, 1)).unwrap();
        let est = mc_estimate(&zeros, 0, 100, 1);
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn mc_close_to_exact() {
        let rc = two_point_example();
        let est = mc_estimate(&rc, 0, 100_000, 42);
        let exact = 17.0 / 24.0;
        assert!((est.mean - exact).abs() <= 5.0 * est.std_error);
    }

    #[test]
    fn subcomplex_counts() {
        let want: [(u64, u64); 9] = [
            (1, 2),
            (2, 5),
            (3, 18),
            (4, 113),
            (5, 1450),
            (6, 40069),
            (7, 2350602),
            (8, 286192513),
            (9, 71213783666),
        ];
        for (n, v) in want {
            assert_eq!(count_subcomplexes(n), BigUint::from(v));
        }
        assert_eq!(count_subcomplexes(0), BigUint::one());
    }

    #[test]
    fn subcomplex_count_by_explicit_enumeration() {
        // count face-closed subsets of the maximal 1-skeleton directly
        for n in 1..=4u64 {
            let x = SimplicialComplex::complete_graph(n as u32);
            let cells: Vec<&Cell> = x.cells().collect();
            let mut count = 0u64;
            for mask in 0u64..1 << cells.len() {
                let chosen: BTreeSet<&Cell> = cells
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, c)| *c)
                    .collect();
                let closed = chosen.iter().all(|c| {
                    c.proper_faces().iter().all(|f| chosen.contains(f))
                });
                if closed {
                    count += 1;
                }
            }
            assert_eq!(count_subcomplexes(n), BigUint::from(count));
        }
    }

    #[test]
    fn guard_errors() {
        let x = SimplicialComplex::complete_graph(8); // 36 cells
        let rc = RandomComplex::uniform(x, rat(1, 2)).unwrap();
        assert!(matches!(
            expected_betti_exact(&rc, 0),
            Err(OracleError::GuardExceeded { cells: 36, .. })
        ));
        assert!(matches!(
            symbolic_expected_betti(&rc, 0),
            Err(OracleError::GuardExceeded { cells: 36, .. })
        ));
    }
}
