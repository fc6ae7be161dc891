//! Cell configurations up to vertex relabeling.
//!
//! A `Pattern` is the set of maximal cells of a monomial (not necessarily
//! face-closed) together with the dimension k its coefficient refers to.
//! `canonical_form` produces a relabeling-invariant key by taking the
//! minimum encoding over vertex bijections, restricted to bijections that
//! respect an iterated degree-signature refinement; the refinement is
//! preserved by every isomorphism, so the key is still complete.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::complex::{Cell, SimplicialComplex};

/// Default cap on pattern vertices accepted by canonicalization.
pub const DEFAULT_CANONICAL_VERTEX_GUARD: usize = 12;
/// Cap on the number of signature-respecting bijections tried.
const PERMUTATION_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern has {vertices} vertices, above the guard of {guard}")]
    TooManyVertices { vertices: usize, guard: usize },
    #[error("pattern is too symmetric: {candidates} candidate relabelings exceed the search budget")]
    SearchBudget { candidates: u64 },
    #[error("vertex {0} does not occur in the pattern")]
    UnknownVertex(u32),
}

/// A set of cells standing for one monomial, with the dimension tag k.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    cells: BTreeSet<Cell>,
    k: usize,
}

impl Pattern {
    pub fn new(cells: BTreeSet<Cell>, k: usize) -> Self {
        assert!(k >= 1, "pattern dimension tag must be >= 1");
        Pattern { cells, k }
    }

    /// Pattern of 1-cells from vertex pairs.
    pub fn from_edges(edges: &[(u32, u32)]) -> Self {
        let cells = edges.iter().map(|&(a, b)| Cell::of(&[a, b])).collect();
        Pattern::new(cells, 1)
    }

    pub fn from_cells<I: IntoIterator<Item = Cell>>(cells: I, k: usize) -> Self {
        Pattern::new(cells.into_iter().collect(), k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter()
    }

    pub fn cell_set(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    /// The cells of dimension k, the ones deletion levels act on.
    pub fn k_cells(&self) -> Vec<&Cell> {
        self.cells.iter().filter(|c| c.dimension() == self.k).collect()
    }

    pub fn vertex_set(&self) -> BTreeSet<u32> {
        self.cells
            .iter()
            .flat_map(|c| c.vertices().iter().copied())
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Face closure of the pattern as a deterministic complex.
    pub fn closure(&self) -> SimplicialComplex {
        SimplicialComplex::closure_of(self.cells.iter().cloned())
    }

    pub fn without_cells(&self, removed: &BTreeSet<Cell>) -> Pattern {
        let cells = self.cells.difference(removed).cloned().collect();
        Pattern::new(cells, self.k)
    }

    /// Relabels vertices through the given map; panics on missing entries.
    pub fn relabel(&self, map: &BTreeMap<u32, u32>) -> Pattern {
        let cells = self
            .cells
            .iter()
            .map(|c| Cell::of(&c.vertices().iter().map(|v| map[v]).collect::<Vec<_>>()))
            .collect();
        Pattern::new(cells, self.k)
    }
}

/// Number of k-cells of the pattern containing the vertex.
pub fn covering_degree(p: &Pattern, v: u32, k: usize) -> Result<usize, PatternError> {
    if !p.vertex_set().contains(&v) {
        return Err(PatternError::UnknownVertex(v));
    }
    Ok(p.cells()
        .filter(|c| c.dimension() == k && c.contains_vertex(v))
        .count())
}

/// Relabeling-invariant key for a pattern.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm {
    key: Vec<u8>,
}

impl CanonicalForm {
    pub fn bytes(&self) -> &[u8] {
        &self.key
    }

    pub fn to_hex(&self) -> String {
        self.key.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(hex: &str) -> Option<Self> {
        if hex.len() % 2 != 0 {
            return None;
        }
        let key = (0..hex.len() / 2)
            .map(|i| u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).ok())
            .collect::<Option<Vec<u8>>>()?;
        Some(CanonicalForm { key })
    }
}

fn encode_relabeled(p: &Pattern, label: &HashMap<u32, u8>) -> Vec<u8> {
    let mut cells: Vec<Vec<u8>> = p
        .cells()
        .map(|c| {
            let mut vs: Vec<u8> = c.vertices().iter().map(|v| label[v]).collect();
            vs.sort_unstable();
            vs
        })
        .collect();
    cells.sort();
    let mut out = vec![p.k as u8, label.len() as u8];
    for cell in cells {
        out.push(cell.len() as u8);
        out.extend_from_slice(&cell);
    }
    out
}

/// Iterated neighborhood-signature refinement. Returns, per vertex, a
/// class id; isomorphisms map classes onto classes.
fn refine_classes(p: &Pattern, vertices: &[u32]) -> Vec<usize> {
    let n = vertices.len();
    let index: HashMap<u32, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    // initial signature: multiset of incident cell dimensions
    let mut class: Vec<u64> = vec![0; n];
    let mut sig: Vec<Vec<u64>> = vec![Vec::new(); n];
    for (i, v) in vertices.iter().enumerate() {
        let mut dims: Vec<u64> = p
            .cells()
            .filter(|c| c.contains_vertex(*v))
            .map(|c| c.dimension() as u64)
            .collect();
        dims.sort_unstable();
        sig[i] = dims;
    }
    assign_classes(&sig, &mut class);
    for _ in 0..n {
        let mut next_sig: Vec<Vec<u64>> = vec![Vec::new(); n];
        for (i, v) in vertices.iter().enumerate() {
            let mut s = vec![class[i]];
            let mut neighbor_classes: Vec<u64> = Vec::new();
            for cell in p.cells().filter(|c| c.contains_vertex(*v)) {
                let mut others: Vec<u64> = cell
                    .vertices()
                    .iter()
                    .filter(|w| **w != *v)
                    .map(|w| class[index[w]])
                    .collect();
                others.sort_unstable();
                neighbor_classes.push(cell.dimension() as u64);
                neighbor_classes.extend(others);
                neighbor_classes.push(u64::MAX); // cell separator
            }
            neighbor_classes.sort_unstable();
            s.extend(neighbor_classes);
            next_sig[i] = s;
        }
        let mut next_class = vec![0; n];
        assign_classes(&next_sig, &mut next_class);
        if next_class == class {
            break;
        }
        class = next_class;
    }
    class.into_iter().map(|c| c as usize).collect()
}

fn assign_classes(sig: &[Vec<u64>], class: &mut [u64]) {
    let mut sorted: Vec<&Vec<u64>> = sig.iter().collect();
    sorted.sort();
    sorted.dedup();
    let rank: HashMap<&Vec<u64>, u64> = sorted
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, i as u64))
        .collect();
    for (i, s) in sig.iter().enumerate() {
        class[i] = rank[s];
    }
}

struct LabelSearch<'a> {
    p: &'a Pattern,
    vertices: Vec<u32>,
    groups: Vec<Vec<usize>>, // vertex indices per class, classes in fixed order
    best: Option<Vec<u8>>,
    automorphisms: u64,
}

impl LabelSearch<'_> {
    fn run(&mut self) {
        let mut label: HashMap<u32, u8> = HashMap::new();
        let mut next = 0u8;
        self.assign_group(0, &mut label, &mut next);
    }

    fn assign_group(&mut self, g: usize, label: &mut HashMap<u32, u8>, next: &mut u8) {
        if g == self.groups.len() {
            let enc = encode_relabeled(self.p, label);
            match &self.best {
                Some(best) if *best < enc => {}
                Some(best) if *best == enc => self.automorphisms += 1,
                _ => {
                    self.best = Some(enc);
                    self.automorphisms = 1;
                }
            }
            return;
        }
        let members = self.groups[g].clone();
        self.permute(&members, 0, label, next, g);
    }

    fn permute(
        &mut self,
        members: &[usize],
        depth: usize,
        label: &mut HashMap<u32, u8>,
        next: &mut u8,
        g: usize,
    ) {
        if depth == members.len() {
            self.assign_group(g + 1, label, next);
            return;
        }
        for &m in members {
            let v = self.vertices[m];
            if label.contains_key(&v) {
                continue;
            }
            label.insert(v, *next);
            *next += 1;
            self.permute(members, depth + 1, label, next, g);
            *next -= 1;
            label.remove(&v);
        }
    }
}

fn canonical_search(p: &Pattern, guard: usize) -> Result<(CanonicalForm, u64), PatternError> {
    let vertices: Vec<u32> = p.vertex_set().into_iter().collect();
    if vertices.len() > guard {
        return Err(PatternError::TooManyVertices {
            vertices: vertices.len(),
            guard,
        });
    }
    if vertices.is_empty() {
        return Ok((
            CanonicalForm {
                key: vec![p.k() as u8, 0],
            },
            1,
        ));
    }
    let class = refine_classes(p, &vertices);
    let nclasses = class.iter().max().unwrap() + 1;
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); nclasses];
    for (i, c) in class.iter().enumerate() {
        groups[*c].push(i);
    }
    let mut candidates = 1u64;
    for group in &groups {
        let f: u64 = (1..=group.len() as u64).product();
        candidates = candidates.saturating_mul(f);
    }
    if candidates > PERMUTATION_BUDGET {
        return Err(PatternError::SearchBudget { candidates });
    }
    let mut search = LabelSearch {
        p,
        vertices,
        groups,
        best: None,
        automorphisms: 0,
    };
    search.run();
    Ok((
        CanonicalForm {
            key: search.best.expect("non-empty search"),
        },
        search.automorphisms,
    ))
}

/// Canonical key, identical exactly for isomorphic patterns.
pub fn canonical_form(p: &Pattern) -> Result<CanonicalForm, PatternError> {
    canonical_form_with_guard(p, DEFAULT_CANONICAL_VERTEX_GUARD)
}

pub fn canonical_form_with_guard(
    p: &Pattern,
    guard: usize,
) -> Result<CanonicalForm, PatternError> {
    canonical_search(p, guard).map(|(key, _)| key)
}

/// Order of the automorphism group of the pattern (vertex relabelings
/// fixing the cell set), by exhaustive search over the refined classes.
pub fn automorphism_count(p: &Pattern) -> Result<u64, PatternError> {
    canonical_search(p, DEFAULT_CANONICAL_VERTEX_GUARD).map(|(_, autos)| autos)
}
