//! Linear algebra on Pauli operators viewed as symplectic vectors.

use crate::gf2::{Basis, BitMatrix, BitVec};
use crate::pauli::ProjPauli;

/// `z ‖ x`, so that `[a, b] = a.symplectic() · swapped(b)`.
fn swapped(p: &ProjPauli) -> BitVec {
    p.z().concat(p.x())
}

pub fn rank(ops: &[ProjPauli]) -> usize {
    let Some(first) = ops.first() else { return 0 };
    let mut b = Basis::new(2 * first.n());
    for p in ops {
        b.insert(p.symplectic());
    }
    b.rank()
}

/// Basis of all operators on `n` qubits commuting with every element of `ops`.
pub fn commutant_basis(ops: &[ProjPauli], n: usize) -> Vec<ProjPauli> {
    let m = BitMatrix::from_rows(2 * n, ops.iter().map(swapped).collect());
    m.nullspace().iter().map(ProjPauli::from_symplectic).collect()
}

/// For linearly independent `gens`, operators `h_i` with `[h_i, g_j] = δ_ij`.
/// Returns `None` if `gens` are dependent.
pub fn dual_operators(gens: &[ProjPauli], n: usize) -> Option<Vec<ProjPauli>> {
    let m = BitMatrix::from_rows(2 * n, gens.iter().map(swapped).collect());
    (0..gens.len())
        .map(|j| {
            m.solve(&BitVec::unit(gens.len(), j))
                .map(|v| ProjPauli::from_symplectic(&v))
        })
        .collect()
}

/// Splits `pool` into anticommuting pairs `(a_i, b_i)` with `[a_i, b_j] = δ_ij`
/// and `[a_i, a_j] = [b_i, b_j] = 0`, plus a remainder commuting with
/// everything in the span of `pool`.
pub fn symplectic_pairs(pool: Vec<ProjPauli>) -> (Vec<(ProjPauli, ProjPauli)>, Vec<ProjPauli>) {
    let mut pool: Vec<ProjPauli> = pool.into_iter().filter(|p| !p.is_identity()).collect();
    let mut pairs = Vec::new();
    loop {
        let found = (0..pool.len()).find_map(|i| {
            (i + 1..pool.len())
                .find(|&j| pool[i].commutator(&pool[j]))
                .map(|j| (i, j))
        });
        let Some((i, j)) = found else { break };
        let b = pool.remove(j);
        let a = pool.remove(i);
        for c in pool.iter_mut() {
            let ca = c.commutator(&a);
            let cb = c.commutator(&b);
            if cb {
                c.mul_assign(&a);
            }
            if ca {
                c.mul_assign(&b);
            }
        }
        pool.retain(|p| !p.is_identity());
        pairs.push((a, b));
    }
    (pairs, pool)
}

/// Logical operator pairs for the stabilizer group generated by the
/// independent, pairwise commuting `gens` on `n` qubits.
pub fn logical_pairs(gens: &[ProjPauli], n: usize) -> Vec<(ProjPauli, ProjPauli)> {
    let destab = dual_operators(gens, n).expect("generators must be independent");
    let mut cands = Vec::with_capacity(2 * n);
    for q in 0..n {
        for l in [crate::pauli::Letter::X, crate::pauli::Letter::Z] {
            let mut c = ProjPauli::single(n, q, l);
            let orig = c.clone();
            for (g, d) in gens.iter().zip(&destab) {
                if orig.commutator(g) {
                    c.mul_assign(d);
                }
            }
            cands.push(c);
        }
    }
    symplectic_pairs(cands).0
}
