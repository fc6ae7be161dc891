//! Equal-probability polynomials for the maximal complex over m points:
//! every n-cell gets the same probability x (lower faces certain), and the
//! higher-order terms of the expected Betti polynomial collapse to a
//! univariate polynomial p_n^E = Σ k_i x^i with k_i the coefficient sum
//! over all labeled i-subsets of n-cells. Plus orbit counting under vertex
//! relabeling and the structural assembly of b_0^E.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigUint, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::complex::{Cell, Rat};
use crate::pattern::{automorphism_count, Pattern, PatternError};
use crate::reduction::betti_of_cells;

/// Caps for exhaustive generation: point count and n-cell count.
pub const POINT_GUARD: u32 = 8;
pub const NCELL_GUARD: usize = 24;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("m={m} gives {ncells} {n}-cells, above the guard (m <= {POINT_GUARD}, cells <= {NCELL_GUARD})")]
    GuardExceeded { m: u32, n: usize, ncells: usize },
    #[error("pattern has {vertices} vertices but only {m} points available")]
    TooFewPoints { vertices: usize, m: u32 },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// Univariate polynomial with integer coefficients, sparse by degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UniPoly {
    coeffs: BTreeMap<usize, i64>,
}

impl UniPoly {
    pub fn from_coeffs<I: IntoIterator<Item = (usize, i64)>>(coeffs: I) -> Self {
        UniPoly {
            coeffs: coeffs.into_iter().filter(|(_, c)| *c != 0).collect(),
        }
    }

    pub fn coefficient(&self, degree: usize) -> i64 {
        self.coeffs.get(&degree).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn lowest_degree(&self) -> Option<usize> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.coeffs.iter().map(|(d, c)| (*d, *c))
    }

    /// Exact evaluation by Horner's scheme over descending degrees.
    pub fn eval_rat(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        let mut prev_degree: Option<usize> = None;
        for (&degree, &coeff) in self.coeffs.iter().rev() {
            if let Some(prev) = prev_degree {
                for _ in 0..(prev - degree) {
                    acc *= x;
                }
            }
            acc += Rat::from_integer(coeff.into());
            prev_degree = Some(degree);
        }
        if let Some(lowest) = prev_degree {
            for _ in 0..lowest {
                acc *= x;
            }
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.eval_rat(&Rat::from_float(x).expect("finite input"))
            .to_f64()
            .expect("value fits f64")
    }
}

impl fmt::Display for UniPoly {
    /// Exact text form: `k_i x^i` terms in descending degree, e.g.
    /// `2x^6 - 6x^5 + 3x^4 + 4x^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, (&degree, &coeff)) in self.coeffs.iter().rev().enumerate() {
            let mag = coeff.abs();
            if i == 0 {
                if coeff < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if coeff < 0 { " - " } else { " + " });
            }
            let show_mag = mag != 1 || degree == 0;
            if show_mag {
                out.push_str(&mag.to_string());
            }
            match degree {
                0 => {}
                1 => out.push('x'),
                d => out.push_str(&format!("x^{d}")),
            }
        }
        write!(f, "{out}")
    }
}

fn binomial_u(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn binomial_i(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// A canonical pattern together with its orbit size inside the maximal
/// complex over m points and its coefficient.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub pattern: Pattern,
    pub orbit_order: BigUint,
    pub coefficient: i64,
}

/// Number of distinct labeled copies of the pattern inside the maximal
/// complex over m points: C(m, v) · v! / |Aut|.
pub fn orbit_count(p: &Pattern, m: u32) -> Result<BigUint, PolyError> {
    let v = p.vertex_set().len();
    if v > m as usize {
        return Err(PolyError::TooFewPoints { vertices: v, m });
    }
    let autos = automorphism_count(p)?;
    let mut labeled = BigUint::one();
    for i in 1..=v as u64 {
        labeled *= BigUint::from(i);
    }
    Ok(binomial_u(m as u64, v as u64) * labeled / BigUint::from(autos))
}

/// All n-cells of the maximal complex over m points, in cell order.
fn all_n_cells(m: u32, n: usize) -> Vec<Cell> {
    let verts: Vec<u32> = (1..=m).collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; n + 1];
    fn rec(verts: &[u32], pick: &mut Vec<usize>, depth: usize, start: usize, out: &mut Vec<Cell>) {
        if depth == pick.len() {
            let vs: Vec<u32> = pick.iter().map(|&i| verts[i]).collect();
            out.push(Cell::of(&vs));
            return;
        }
        for i in start..verts.len() {
            pick[depth] = i;
            rec(verts, pick, depth + 1, i + 1, out);
        }
    }
    rec(&verts, &mut pick, 0, 0, &mut out);
    out
}

fn b1_of_edge_mask(edges: &[(usize, usize)], mask: u32, nverts: usize) -> i64 {
    let mut parent: Vec<usize> = (0..nverts).collect();
    let mut covered = vec![false; nverts];
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut ecount = 0i64;
    let mut merges = 0i64;
    for (i, &(a, b)) in edges.iter().enumerate() {
        if mask >> i & 1 == 0 {
            continue;
        }
        ecount += 1;
        covered[a] = true;
        covered[b] = true;
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra != rb {
            parent[ra] = rb;
            merges += 1;
        }
    }
    let vcount = covered.iter().filter(|&&c| c).count() as i64;
    ecount - vcount + (vcount - merges) // E - V + components
}

/// The equal-probability polynomial p_n^E for the maximal complex over m
/// points: coefficient k_i is the sum of the reduced-polynomial
/// coefficients c_n over every labeled set of i n-cells. Computed by one
/// pass of b_n over all n-cell subsets followed by a binomial inversion,
/// which is the subset-lattice Möbius transform grouped by subset size.
pub fn p_n_polynomial(m: u32, n: usize) -> Result<UniPoly, PolyError> {
    let ncells = all_n_cells(m, n);
    let e = ncells.len();
    if m > POINT_GUARD || e > NCELL_GUARD {
        return Err(PolyError::GuardExceeded { m, n, ncells: e });
    }
    // B_t = Σ over t-subsets of b_n(closure of the subset)
    let mut level_b = vec![0i128; e + 1];
    if n == 1 {
        let edges: Vec<(usize, usize)> = ncells
            .iter()
            .map(|c| {
                (
                    c.vertices()[0] as usize - 1,
                    c.vertices()[1] as usize - 1,
                )
            })
            .collect();
        for mask in 0u32..(1u32 << e) as u32 {
            let b = b1_of_edge_mask(&edges, mask, m as usize);
            if b != 0 {
                level_b[mask.count_ones() as usize] += b as i128;
            }
        }
    } else {
        for mask in 0u64..1 << e {
            let cells: BTreeSet<Cell> = ncells
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect();
            let b = betti_of_cells(&cells, n);
            if b != 0 {
                level_b[mask.count_ones() as usize] += b as i128;
            }
        }
    }
    // k_i = Σ_t (−1)^{i−t} C(e−t, i−t) B_t
    let mut coeffs = BTreeMap::new();
    for i in 0..=e {
        let mut k_i: i128 = 0;
        for (t, &b_t) in level_b.iter().enumerate().take(i + 1) {
            if b_t == 0 {
                continue;
            }
            let sign = if (i - t) % 2 == 0 { 1 } else { -1 };
            k_i += sign * binomial_i(e - t, i - t) * b_t;
        }
        if k_i != 0 {
            coeffs.insert(i, i64::try_from(k_i).expect("coefficient fits i64"));
        }
    }
    Ok(UniPoly { coeffs })
}

/// Structural form of the expected component count of the maximal
/// 1-skeleton over m points: one +1 term per vertex, one -1 term per edge,
/// and higher-order terms indexed by edge sets with nonzero reduced
/// coefficient.
#[derive(Clone, Debug)]
pub struct B0Assembly {
    pub m: u32,
    /// every vertex monomial has coefficient +1
    pub vertex_terms: usize,
    /// every single-edge monomial has coefficient -1
    pub edge_terms: usize,
    /// (edge set, coefficient) for all edge sets with nonzero coefficient
    pub higher: Vec<(BTreeSet<Cell>, i64)>,
}

impl B0Assembly {
    pub fn term_count(&self) -> usize {
        self.vertex_terms + self.edge_terms + self.higher.len()
    }

    /// Value at all probabilities 1; the maximal complex is connected, so
    /// this is 1.
    pub fn eval_all_ones(&self) -> i64 {
        self.vertex_terms as i64 - self.edge_terms as i64
            + self.higher.iter().map(|(_, c)| c).sum::<i64>()
    }
}

/// Point guard for the explicit term listing; the full subset lattice of
/// edges is materialized, so this is tighter than the p_n^E guard.
pub const ASSEMBLY_POINT_GUARD: u32 = 7;

/// Assembles the reduced b_0^E of the maximal 1-skeleton over m points.
/// The higher coefficients are the subset-lattice Möbius transform of b_1
/// over edge sets, which matches the reduced-polynomial coefficient c_1 of
/// each pattern.
pub fn assemble_b0(m: u32) -> Result<B0Assembly, PolyError> {
    if m > ASSEMBLY_POINT_GUARD {
        return Err(PolyError::GuardExceeded {
            m,
            n: 1,
            ncells: (m as usize) * (m as usize - 1) / 2,
        });
    }
    let edges = all_n_cells(m, 1);
    let e = edges.len();
    let pairs: Vec<(usize, usize)> = edges
        .iter()
        .map(|c| {
            (
                c.vertices()[0] as usize - 1,
                c.vertices()[1] as usize - 1,
            )
        })
        .collect();
    let mut vals: Vec<i64> = (0..1u64 << e)
        .map(|mask| b1_of_edge_mask(&pairs, mask as u32, m as usize))
        .collect();
    for bit in 0..e {
        for mask in 0..1usize << e {
            if mask >> bit & 1 == 1 {
                vals[mask] -= vals[mask ^ (1 << bit)];
            }
        }
    }
    let mut higher = Vec::new();
    for (mask, &coeff) in vals.iter().enumerate() {
        if coeff != 0 {
            let set: BTreeSet<Cell> = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect();
            higher.push((set, coeff));
        }
    }
    Ok(B0Assembly {
        m,
        vertex_terms: m as usize,
        edge_terms: e,
        higher,
    })
}
