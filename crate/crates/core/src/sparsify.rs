//! Spacetime graph, restricted stabilizer groups and exhaustive search for
//! low-weight connected stabilizers.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gf2::{Basis, BitMatrix, BitVec};
use crate::outcome_code::{compute_outcome_code, linearize};
use crate::pauli::{Letter, ProjPauli};
use crate::propagation::FaultOperator;
use crate::spacetime_code::{logical_generators, SpacetimeCode};
use crate::symplectic;

/// Graph on the spacetime qubits of layers `0..Δ` (half-levels `0.5..Δ-0.5`).
/// Vertex `l·n + q` is qubit `q` of layer `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacetimeGraph {
    n: usize,
    depth: usize,
    adj: Vec<Vec<usize>>,
}

impl SpacetimeGraph {
    /// Every operation at level `l` and every qubit idle at level `l` joins
    /// its qubits on layers `l-1` and `l` into a clique.
    pub fn build(c: &Circuit) -> SpacetimeGraph {
        let (n, depth) = (c.n(), c.depth());
        let nv = n * depth;
        let mut adj_sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nv];
        for l in 1..=depth {
            let mut groups: Vec<Vec<usize>> =
                c.ops_at_level(l).iter().map(|op| op.support()).collect();
            groups.extend(c.idle_qubits(l).into_iter().map(|q| vec![q]));
            for qs in groups {
                let mut clique: Vec<usize> = qs.iter().map(|&q| (l - 1) * n + q).collect();
                if l < depth {
                    clique.extend(qs.iter().map(|&q| l * n + q));
                }
                for &a in &clique {
                    for &b in &clique {
                        if a != b {
                            adj_sets[a].insert(b);
                        }
                    }
                }
            }
        }
        SpacetimeGraph { n, depth, adj: adj_sets.into_iter().map(|s| s.into_iter().collect()).collect() }
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `(layer, qubit)` of a vertex.
    pub fn vertex(&self, v: usize) -> (usize, usize) {
        (v / self.n, v % self.n)
    }

    pub fn describe(&self, v: usize) -> String {
        let (l, q) = self.vertex(v);
        format!("({l}.5, q{q})")
    }

    /// Vertices within distance `radius` of `v`, ascending.
    pub fn ball(&self, v: usize, radius: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.adj.len()];
        let mut queue = VecDeque::from([v]);
        dist[v] = 0;
        while let Some(a) = queue.pop_front() {
            if dist[a] == radius {
                continue;
            }
            for &b in &self.adj[a] {
                if dist[b] == usize::MAX {
                    dist[b] = dist[a] + 1;
                    queue.push_back(b);
                }
            }
        }
        (0..self.adj.len()).filter(|&i| dist[i] != usize::MAX).collect()
    }

    /// Connected components of the subgraph induced by `support`, each sorted,
    /// ordered by smallest vertex.
    pub fn connected_components(&self, support: &[usize]) -> Vec<Vec<usize>> {
        let mut inside = vec![false; self.adj.len()];
        for &v in support {
            inside[v] = true;
        }
        let mut seen = vec![false; self.adj.len()];
        let mut sorted = support.to_vec();
        sorted.sort_unstable();
        let mut out = Vec::new();
        for &s in &sorted {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let a = comp[i];
                i += 1;
                for &b in &self.adj[a] {
                    if inside[b] && !seen[b] {
                        seen[b] = true;
                        comp.push(b);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self, support: &[usize]) -> bool {
        support.is_empty() || self.connected_components(support).len() == 1
    }
}

fn local(f: &FaultOperator, a: &[usize]) -> ProjPauli {
    let mut p = ProjPauli::identity(a.len());
    for (i, &v) in a.iter().enumerate() {
        p.set(i, f.flat().get(v));
    }
    p
}

fn global(p: &ProjPauli, a: &[usize], n: usize, depth: usize) -> FaultOperator {
    let mut flat = ProjPauli::identity(n * (depth + 1));
    for (i, &v) in a.iter().enumerate() {
        flat.set(v, p.get(i));
    }
    FaultOperator::from_flat(n, depth, flat)
}

/// Generators of the stabilizers supported inside `a`, given generators of
/// the normalizer (stabilizers together with logical operators).
pub fn restricted_group(
    stabilizers: &[FaultOperator],
    logicals: &[FaultOperator],
    a: &[usize],
) -> Vec<FaultOperator> {
    let Some(first) = stabilizers.first().or(logicals.first()) else {
        return Vec::new();
    };
    let (n, depth) = (first.n(), first.depth());
    let w = a.len();
    let mut g = Basis::new(2 * w);
    for f in stabilizers.iter().chain(logicals) {
        let p = local(f, a);
        if !p.is_identity() {
            g.insert(p.symplectic());
        }
    }
    let g: Vec<ProjPauli> = g.rows().iter().map(ProjPauli::from_symplectic).collect();
    let h = symplectic::dual_operators(&g, w).expect("echelon rows are independent");
    let mut out = Basis::new(2 * w);
    for i in 0..w {
        for l in [Letter::X, Letter::Z] {
            let mut s = ProjPauli::single(w, i, l);
            for (gj, hj) in g.iter().zip(&h) {
                if s.commutator(gj) {
                    s.mul_assign(hj);
                }
            }
            out.insert(s.symplectic());
        }
    }
    let mut rows = BitMatrix::from_rows(2 * w, out.rows().to_vec());
    rows.rref();
    rows.rows()
        .iter()
        .filter(|r| !r.is_zero())
        .map(|r| global(&ProjPauli::from_symplectic(r), a, n, depth))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Largest number of restricted generators enumerated per ball.
    pub budget: usize,
    /// Skip over-budget balls instead of failing.
    pub skip_over_budget: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { budget: 20, skip_over_budget: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub balls_processed: usize,
    pub budget_hits: usize,
    /// Weight → number of distinct connected stabilizers found.
    pub weight_histogram: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug)]
pub struct Sparsified {
    /// All connected stabilizers of weight ≤ M, sorted by weight then text.
    pub found: Vec<FaultOperator>,
    /// Independent generators: low-weight ones first, then original checks
    /// needed to complete the rank.
    pub basis: Vec<FaultOperator>,
    /// Outcome check behind each basis element.
    pub basis_checks: Vec<BitVec>,
    /// How many original generators had to be kept.
    pub fallback: usize,
    pub report: SearchReport,
    pub code: SpacetimeCode,
}

fn sort_canonical(v: &mut [FaultOperator]) {
    v.sort_by_cached_key(|f| (f.weight(), f.to_string()));
}

/// All connected stabilizers of weight at most `max_weight` of the spacetime
/// code of the linearized circuit, plus a sparse generating set.
pub fn low_weight_stabilizers(
    c: &Circuit,
    max_weight: usize,
    opts: SearchOptions,
) -> Result<Sparsified> {
    let lin = linearize(c);
    let (oc, _) = compute_outcome_code(&lin);
    let code = SpacetimeCode::build(&lin, &oc)?;
    let logicals = logical_generators(&lin, &oc)?.all();
    let graph = SpacetimeGraph::build(&lin);
    let mut report = SearchReport::default();
    let mut found: Vec<FaultOperator> = Vec::new();
    if max_weight > 0 && code.r() > 0 {
        let radius = max_weight / 2;
        let per_ball: Vec<std::result::Result<Vec<FaultOperator>, usize>> = (0..graph
            .num_vertices())
            .into_par_iter()
            .map(|v| {
                let a = graph.ball(v, radius);
                let gens = restricted_group(code.stabilizers(), &logicals, &a);
                if gens.len() > opts.budget {
                    return Err(gens.len());
                }
                Ok(enumerate_connected(&gens, max_weight, &graph))
            })
            .collect();
        let mut seen: HashSet<FaultOperator> = HashSet::new();
        for (v, res) in per_ball.into_iter().enumerate() {
            match res {
                Ok(list) => {
                    report.balls_processed += 1;
                    for f in list {
                        if !seen.contains(&f) {
                            seen.insert(f.clone());
                            found.push(f);
                        }
                    }
                }
                Err(g) => {
                    if !opts.skip_over_budget {
                        return Err(Error::Budget(format!(
                            "ball around vertex {} has {g} restricted generators (budget {})",
                            graph.describe(v),
                            opts.budget
                        )));
                    }
                    report.budget_hits += 1;
                }
            }
        }
        sort_canonical(&mut found);
    } else if max_weight > 0 {
        report.balls_processed = graph.num_vertices();
    }
    for f in &found {
        *report.weight_histogram.entry(f.weight()).or_insert(0) += 1;
    }
    let (basis, basis_checks, fallback) = select_basis(&code, &found)?;
    Ok(Sparsified { found, basis, basis_checks, fallback, report, code })
}

fn enumerate_connected(
    gens: &[FaultOperator],
    max_weight: usize,
    graph: &SpacetimeGraph,
) -> Vec<FaultOperator> {
    let mut out = Vec::new();
    let Some(first) = gens.first() else { return out };
    let mut cur = FaultOperator::identity(first.n(), first.depth());
    for i in 1u64..(1u64 << gens.len()) {
        cur.mul_assign(&gens[i.trailing_zeros() as usize]);
        let w = cur.weight();
        if w == 0 || w > max_weight {
            continue;
        }
        if graph.is_connected(&cur.support()) {
            out.push(cur.clone());
        }
    }
    out
}

/// Greedy independent subset of `found`, completed with original generators.
fn select_basis(
    code: &SpacetimeCode,
    found: &[FaultOperator],
) -> Result<(Vec<FaultOperator>, Vec<BitVec>, usize)> {
    let mut span = Basis::new(2 * code.num_qubits());
    let mut basis = Vec::new();
    for f in found {
        if span.rank() == code.r() {
            break;
        }
        if span.insert(f.flat().symplectic()) {
            basis.push(f.clone());
        }
    }
    let mut fallback = 0;
    for s in code.stabilizers() {
        if span.rank() == code.r() {
            break;
        }
        if span.insert(s.flat().symplectic()) {
            basis.push(s.clone());
            fallback += 1;
        }
    }
    let cols = code.check_matrix().transpose();
    let m = code.checks().first().map_or(0, BitVec::len);
    let mut checks = Vec::with_capacity(basis.len());
    for f in &basis {
        let x = cols.solve(&f.flat().symplectic()).ok_or_else(|| {
            Error::Invariant(format!("{f} is not in the stabilizer group"))
        })?;
        let mut u = BitVec::zeros(m);
        for i in x.iter_ones() {
            u.xor_assign(&code.checks()[i]);
        }
        checks.push(u);
    }
    Ok((basis, checks, fallback))
}
