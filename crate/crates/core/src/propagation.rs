//! Fault operators and their propagation through a circuit.
//!
//! Layer `l` of a fault operator sits at half-level `l + 0.5`, between the
//! operations of level `l` and level `l + 1`. Layers are stored back to back in
//! one Pauli operator on `n(Δ+1)` qubits, spacetime qubit `l·n + q` being qubit
//! `q` of layer `l`.

use std::fmt;

use crate::circuit::Circuit;
use crate::error::{check_dim, Error, Result};
use crate::gf2::BitVec;
use crate::pauli::{Letter, ProjPauli};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaultOperator {
    n: usize,
    depth: usize,
    flat: ProjPauli,
}

impl FaultOperator {
    pub fn identity(n: usize, depth: usize) -> Self {
        FaultOperator { n, depth, flat: ProjPauli::identity(n * (depth + 1)) }
    }

    pub fn for_circuit(c: &Circuit) -> Self {
        Self::identity(c.n(), c.depth())
    }

    pub fn from_flat(n: usize, depth: usize, flat: ProjPauli) -> Self {
        assert_eq!(flat.n(), n * (depth + 1), "flat operator has the wrong width");
        FaultOperator { n, depth, flat }
    }

    pub fn from_layers(n: usize, layers: &[ProjPauli]) -> Self {
        assert!(!layers.is_empty());
        let mut f = Self::identity(n, layers.len() - 1);
        for (l, p) in layers.iter().enumerate() {
            f.set_layer(l, p);
        }
        f
    }

    /// `η_{layer+0.5}(p)`: `p` placed on a single layer.
    pub fn eta(n: usize, depth: usize, layer: usize, p: &ProjPauli) -> Result<Self> {
        check_dim(n, p.n())?;
        if layer > depth {
            return Err(Error::OutOfRange { index: layer, limit: depth });
        }
        let mut f = Self::identity(n, depth);
        f.set_layer(layer, p);
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn num_layers(&self) -> usize {
        self.depth + 1
    }

    pub fn flat(&self) -> &ProjPauli {
        &self.flat
    }

    pub fn layer(&self, l: usize) -> ProjPauli {
        let n = self.n;
        ProjPauli::from_xz(self.flat.x().slice(l * n, n), self.flat.z().slice(l * n, n))
    }

    pub fn layers(&self) -> Vec<ProjPauli> {
        (0..=self.depth).map(|l| self.layer(l)).collect()
    }

    pub fn set_layer(&mut self, l: usize, p: &ProjPauli) {
        assert!(l <= self.depth);
        for q in 0..self.n {
            self.flat.set(l * self.n + q, p.get(q));
        }
    }

    /// Multiplies `p` into layer `l`.
    pub fn mul_layer(&mut self, l: usize, p: &ProjPauli) {
        for q in p.support() {
            let cur = self.flat.get(l * self.n + q);
            let (a, b) = cur.bits();
            let (c, d) = p.get(q).bits();
            self.flat.set(l * self.n + q, Letter::from_bits(a ^ c, b ^ d));
        }
    }

    pub fn mul(&self, other: &FaultOperator) -> FaultOperator {
        debug_assert_eq!((self.n, self.depth), (other.n, other.depth));
        FaultOperator { n: self.n, depth: self.depth, flat: self.flat.mul(&other.flat) }
    }

    pub fn mul_assign(&mut self, other: &FaultOperator) {
        self.flat.mul_assign(&other.flat);
    }

    /// Layer-wise symplectic form summed mod 2.
    pub fn commutator(&self, other: &FaultOperator) -> bool {
        self.flat.commutator(&other.flat)
    }

    pub fn is_identity(&self) -> bool {
        self.flat.is_identity()
    }

    pub fn weight(&self) -> usize {
        self.flat.weight()
    }

    /// Spacetime qubits `l·n + q` carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        self.flat.support()
    }

    fn check_shape(&self, c: &Circuit) -> Result<()> {
        check_dim(c.n(), self.n)?;
        check_dim(c.depth(), self.depth)
    }

    /// Parses `0.5:Z0;1.5:Z0` (or `I`) for a circuit of width `n` and depth `depth`.
    pub fn parse(s: &str, n: usize, depth: usize) -> Result<FaultOperator> {
        let err = |msg: String| Error::PauliSyntax { text: s.to_string(), msg };
        let mut f = Self::identity(n, depth);
        let t = s.trim();
        if t == "I" || t.is_empty() {
            return Ok(f);
        }
        let mut seen = vec![false; depth + 1];
        for entry in t.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let (lvl, pauli) = entry
                .split_once(':')
                .ok_or_else(|| err(format!("entry {entry:?} lacks a level")))?;
            let l: usize = lvl
                .trim()
                .strip_suffix(".5")
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| err(format!("bad half-level {lvl:?}")))?;
            if l > depth {
                return Err(Error::OutOfRange { index: l, limit: depth });
            }
            if std::mem::replace(&mut seen[l], true) {
                return Err(err(format!("half-level {lvl} given twice")));
            }
            f.set_layer(l, &ProjPauli::parse(pauli, n)?);
        }
        Ok(f)
    }
}

impl fmt::Display for FaultOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for l in 0..=self.depth {
            let p = self.layer(l);
            if p.is_identity() {
                continue;
            }
            if !first {
                f.write_str(";")?;
            }
            first = false;
            write!(f, "{l}.5:{p}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FaultOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FaultOperator[n={}, Δ={}]({self})", self.n, self.depth)
    }
}

/// Outcome flips and residual error of a fault.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Effect {
    pub f: BitVec,
    pub e: ProjPauli,
}

impl Effect {
    pub fn trivial(m: usize, n: usize) -> Self {
        Effect { f: BitVec::zeros(m), e: ProjPauli::identity(n) }
    }
}

/// `η_{l+0.5}(p)` sized for `c`.
pub fn eta(c: &Circuit, layer: usize, p: &ProjPauli) -> Result<FaultOperator> {
    FaultOperator::eta(c.n(), c.depth(), layer, p)
}

/// Forward accumulation: layer `l` becomes the net error after level `l`.
pub fn cumulant(c: &Circuit, f: &FaultOperator) -> Result<FaultOperator> {
    f.check_shape(c)?;
    let mut out = f.clone();
    let mut run = out.layer(0);
    for l in 1..=c.depth() {
        run = c.apply_level_proj(l, &run);
        run.mul_assign(&f.layer(l));
        out.set_layer(l, &run);
    }
    Ok(out)
}

/// Backward accumulation, the adjoint of [`cumulant`].
pub fn back_cumulant(c: &Circuit, f: &FaultOperator) -> Result<FaultOperator> {
    f.check_shape(c)?;
    let mut out = f.clone();
    let mut run = out.layer(c.depth());
    for l in (1..=c.depth()).rev() {
        run = c.apply_level_inverse_proj(l, &run);
        run.mul_assign(&f.layer(l - 1));
        out.set_layer(l - 1, &run);
    }
    Ok(out)
}

/// Cumulant from the closed form `∏_{i≤l} U_{i,l} F_i U_{i,l}⁻¹`.
pub fn cumulant_explicit(c: &Circuit, f: &FaultOperator) -> Result<FaultOperator> {
    f.check_shape(c)?;
    let mut out = FaultOperator::for_circuit(c);
    for l in 0..=c.depth() {
        let mut acc = ProjPauli::identity(c.n());
        for i in 0..=l {
            acc.mul_assign(&c.window_unitary(i, l)?.conjugate_proj(&f.layer(i)));
        }
        out.set_layer(l, &acc);
    }
    Ok(out)
}

/// Back-cumulant from the closed form `∏_{j≥l} U_{l,j}⁻¹ F_j U_{l,j}`.
pub fn back_cumulant_explicit(c: &Circuit, f: &FaultOperator) -> Result<FaultOperator> {
    f.check_shape(c)?;
    let mut out = FaultOperator::for_circuit(c);
    for l in 0..=c.depth() {
        let mut acc = ProjPauli::identity(c.n());
        for j in l..=c.depth() {
            let w = c.window_unitary(l, j)?.inverse();
            acc.mul_assign(&w.conjugate_proj(&f.layer(j)));
        }
        out.set_layer(l, &acc);
    }
    Ok(out)
}

/// `f_j = [P F_{l_j-0.5}, S_j]` and `E = P F_{Δ+0.5}`.
pub fn effect(c: &Circuit, f: &FaultOperator) -> Result<Effect> {
    let p = cumulant(c, f)?;
    Ok(effect_of_cumulant(c, &p))
}

pub(crate) fn effect_of_cumulant(c: &Circuit, p: &FaultOperator) -> Effect {
    let layers = p.layers();
    let mut flips = BitVec::zeros(c.num_measurements());
    for (j, m) in c.measurements().iter().enumerate() {
        if layers[m.level - 1].commutator(m.op.proj()) {
            flips.set(j, true);
        }
    }
    Effect { f: flips, e: layers[c.depth()].clone() }
}

fn place_measurements(c: &Circuit, u: &BitVec, offset: usize) -> Result<FaultOperator> {
    check_dim(c.num_measurements(), u.len())?;
    let mut f = FaultOperator::for_circuit(c);
    for j in u.iter_ones() {
        let m = c.measurement(j);
        f.mul_layer(m.level + offset - 1, m.op.proj());
    }
    Ok(f)
}

/// `F(u)`: each measured operator with `u_j = 1` placed right before its level.
pub fn relation_operator(c: &Circuit, u: &BitVec) -> Result<FaultOperator> {
    place_measurements(c, u, 0)
}

/// `B[F(u)]`.
pub fn check_operator(c: &Circuit, u: &BitVec) -> Result<FaultOperator> {
    back_cumulant(c, &relation_operator(c, u)?)
}

/// `P[F'(u)]` with each measured operator placed right after its level.
pub fn check_operator_forward(c: &Circuit, u: &BitVec) -> Result<FaultOperator> {
    cumulant(c, &place_measurements(c, u, 1)?)
}

/// Weight-one operator anticommuting with measurement `j`, on its lowest
/// support qubit: `X` if that anticommutes, else `Z`.
pub fn flip_partner(c: &Circuit, j: usize) -> ProjPauli {
    let s = c.measurement(j).op.proj();
    let q = s.support()[0];
    let letter = match s.get(q) {
        Letter::X => Letter::Z,
        _ => Letter::X,
    };
    ProjPauli::single(c.n(), q, letter)
}

/// Fault flipping only outcome `j`: the partner on both sides of the measurement.
pub fn flip_fault(c: &Circuit, j: usize) -> FaultOperator {
    let q = flip_partner(c, j);
    let l = c.measurement(j).level;
    let mut f = FaultOperator::for_circuit(c);
    f.mul_layer(l - 1, &q);
    f.mul_layer(l, &q);
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_circuit;

    fn p(s: &str, n: usize) -> ProjPauli {
        ProjPauli::parse(s, n).unwrap()
    }

    fn fault(c: &Circuit, s: &str) -> FaultOperator {
        FaultOperator::parse(s, c.n(), c.depth()).unwrap()
    }

    fn two_z() -> Circuit {
        parse_circuit("QUBITS 1\nM Z0\nTICK\nM Z0").unwrap()
    }

    #[test]
    fn eta_and_text_form() {
        let c = two_z();
        let f = eta(&c, 0, &p("X0", 1)).unwrap();
        assert_eq!(f.to_string(), "0.5:X0");
        assert!(eta(&c, 2, &ProjPauli::identity(1)).unwrap().is_identity());
        assert!(eta(&c, 3, &p("X0", 1)).is_err());
        let g = f.mul(&eta(&c, 1, &p("Z0", 1)).unwrap());
        assert_eq!(g.to_string(), "0.5:X0;1.5:Z0");
        assert_eq!(fault(&c, "0.5:X0;1.5:Z0"), g);
        assert_eq!(FaultOperator::identity(1, 2).to_string(), "I");
        assert!(FaultOperator::parse("0.5:X0;0.5:Z0", 1, 2).is_err());
        assert!(FaultOperator::parse("1:X0", 1, 2).is_err());
    }

    #[test]
    fn cumulant_examples() {
        let h = parse_circuit("QUBITS 1\nH 0").unwrap();
        let f = cumulant(&h, &fault(&h, "0.5:X0")).unwrap();
        assert_eq!(f.to_string(), "0.5:X0;1.5:Z0");

        let idle = parse_circuit("QUBITS 1\nI 0\nTICK\nI 0").unwrap();
        let f = cumulant(&idle, &fault(&idle, "0.5:Z0")).unwrap();
        assert_eq!(f.to_string(), "0.5:Z0;1.5:Z0;2.5:Z0");

        let cx = parse_circuit("QUBITS 2\nCX 0 1").unwrap();
        let f = cumulant(&cx, &fault(&cx, "0.5:X0")).unwrap();
        assert_eq!(f.layer(1), p("X0*X1", 2));
    }

    #[test]
    fn back_cumulant_examples() {
        let h = parse_circuit("QUBITS 1\nH 0").unwrap();
        let f = back_cumulant(&h, &fault(&h, "1.5:Z0")).unwrap();
        assert_eq!(f.to_string(), "0.5:X0;1.5:Z0");

        let c = two_z();
        let b = back_cumulant(&c, &fault(&c, "0.5:Z0;1.5:Z0")).unwrap();
        assert_eq!(b.to_string(), "1.5:Z0");
        assert!(back_cumulant(&c, &FaultOperator::for_circuit(&c)).unwrap().is_identity());
    }

    #[test]
    fn effect_examples() {
        let c = two_z();
        let e = effect(&c, &fault(&c, "1.5:X0")).unwrap();
        assert_eq!(e.f.to_string(), "01");
        assert_eq!(e.e, p("X0", 1));
        let e = effect(&c, &fault(&c, "1.5:Z0")).unwrap();
        assert!(e.f.is_zero());
        let e = effect(&c, &FaultOperator::for_circuit(&c)).unwrap();
        assert_eq!(e, Effect::trivial(2, 1));
    }

    #[test]
    fn check_operator_examples() {
        let c = two_z();
        let u = BitVec::parse_bits("11").unwrap();
        assert_eq!(check_operator(&c, &u).unwrap().to_string(), "1.5:Z0");
        assert_eq!(check_operator_forward(&c, &u).unwrap().to_string(), "1.5:Z0");
        assert!(check_operator(&c, &BitVec::zeros(2)).unwrap().is_identity());
        assert!(check_operator(&c, &BitVec::zeros(3)).is_err());
    }

    #[test]
    fn explicit_formulas_agree_with_sweeps() {
        let c = parse_circuit("QUBITS 2\nH 0\nTICK\nCX 0 1\nTICK\nS 1\nM X0").unwrap();
        let f = fault(&c, "0.5:X0*Z1;1.5:Y1;2.5:Z0;3.5:X1");
        assert_eq!(cumulant(&c, &f).unwrap(), cumulant_explicit(&c, &f).unwrap());
        assert_eq!(back_cumulant(&c, &f).unwrap(), back_cumulant_explicit(&c, &f).unwrap());
    }

    #[test]
    fn flip_fault_flips_only_its_outcome() {
        let c = parse_circuit("QUBITS 2\nM X0*Z1\nTICK\nM Z1\nTICK\nM Y0").unwrap();
        for j in 0..3 {
            let e = effect(&c, &flip_fault(&c, j)).unwrap();
            assert_eq!(e.f, BitVec::unit(3, j));
            assert!(e.e.is_identity());
        }
        assert_eq!(flip_partner(&c, 0), p("Z0", 2));
        assert_eq!(flip_partner(&c, 2), p("X0", 2));
    }
}
