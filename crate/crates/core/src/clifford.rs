//! Clifford unitaries stored as conjugation images of the generators.

use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::pauli::{Letter, PhasedPauli, ProjPauli};

/// A Clifford unitary `U` given by `U X_q U⁻¹` and `U Z_q U⁻¹` for every qubit.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    xs: Vec<PhasedPauli>,
    zs: Vec<PhasedPauli>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        CliffordTableau {
            xs: (0..n).map(|q| PhasedPauli::new(ProjPauli::single(n, q, Letter::X), 0)).collect(),
            zs: (0..n).map(|q| PhasedPauli::new(ProjPauli::single(n, q, Letter::Z), 0)).collect(),
        }
    }

    /// Builds a tableau from generator images, checking that they are Hermitian
    /// and preserve the commutation relations.
    pub fn from_images(xs: Vec<PhasedPauli>, zs: Vec<PhasedPauli>) -> Result<Self> {
        let n = xs.len();
        check_dim(n, zs.len())?;
        for p in xs.iter().chain(&zs) {
            check_dim(n, p.n())?;
            if !p.is_hermitian() {
                return Err(Error::Precondition(format!("image {p} is not Hermitian")));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if xs[i].commutator(&xs[j]) || zs[i].commutator(&zs[j]) {
                    return Err(Error::Precondition(format!(
                        "images of qubits {i} and {j} do not commute"
                    )));
                }
                if xs[i].commutator(&zs[j]) != (i == j) {
                    return Err(Error::Precondition(format!(
                        "images of X{i} and Z{j} have the wrong commutator"
                    )));
                }
            }
        }
        Ok(CliffordTableau { xs, zs })
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn x_image(&self, q: usize) -> &PhasedPauli {
        &self.xs[q]
    }

    pub fn z_image(&self, q: usize) -> &PhasedPauli {
        &self.zs[q]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n())
    }

    /// `U p U⁻¹`.
    pub fn conjugate(&self, p: &PhasedPauli) -> PhasedPauli {
        debug_assert_eq!(self.n(), p.n());
        let mut acc = PhasedPauli::new(ProjPauli::identity(self.n()), p.phase_exp());
        let (x, z) = (p.proj().x(), p.proj().z());
        for q in x.or(z).iter_ones() {
            if x.get(q) {
                acc = acc.mul(&self.xs[q]);
            }
            if z.get(q) {
                acc = acc.mul(&self.zs[q]);
            }
        }
        acc
    }

    pub fn checked_conjugate(&self, p: &PhasedPauli) -> Result<PhasedPauli> {
        check_dim(self.n(), p.n())?;
        Ok(self.conjugate(p))
    }

    /// `U p U⁻¹` modulo phase.
    pub fn conjugate_proj(&self, p: &ProjPauli) -> ProjPauli {
        debug_assert_eq!(self.n(), p.n());
        let mut acc = ProjPauli::identity(self.n());
        for q in p.x().iter_ones() {
            acc.mul_assign(self.xs[q].proj());
        }
        for q in p.z().iter_ones() {
            acc.mul_assign(self.zs[q].proj());
        }
        acc
    }

    /// The unitary that applies `self` first and `then` second.
    pub fn compose(&self, then: &CliffordTableau) -> CliffordTableau {
        debug_assert_eq!(self.n(), then.n());
        CliffordTableau {
            xs: self.xs.iter().map(|p| then.conjugate(p)).collect(),
            zs: self.zs.iter().map(|p| then.conjugate(p)).collect(),
        }
    }

    pub fn checked_compose(&self, then: &CliffordTableau) -> Result<CliffordTableau> {
        check_dim(self.n(), then.n())?;
        Ok(self.compose(then))
    }

    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n();
        let pre = |g: &PhasedPauli| {
            // Coefficients follow from [U p U⁻¹, U Z_k U⁻¹] = x_k(p) and the X analogue.
            let mut p = ProjPauli::identity(n);
            for k in 0..n {
                let xk = g.commutator(&self.zs[k]);
                let zk = g.commutator(&self.xs[k]);
                p.set(k, Letter::from_bits(xk, zk));
            }
            let img = self.conjugate(&PhasedPauli::new(p.clone(), 0));
            debug_assert_eq!(img.proj(), g.proj());
            PhasedPauli::new(p, g.phase_exp() + 4 - img.phase_exp())
        };
        let id = Self::identity(n);
        CliffordTableau {
            xs: id.xs.iter().map(pre).collect(),
            zs: id.zs.iter().map(pre).collect(),
        }
    }

    /// Extends a tableau on `qubits.len()` local qubits to `n` qubits, with local
    /// qubit `i` acting on `qubits[i]`.
    pub fn embed(&self, qubits: &[usize], n: usize) -> CliffordTableau {
        let mut t = Self::identity(n);
        for (i, &q) in qubits.iter().enumerate() {
            t.xs[q] = lift(&self.xs[i], qubits, n);
            t.zs[q] = lift(&self.zs[i], qubits, n);
        }
        t
    }

    /// Conjugates an `N`-qubit operator by this local tableau acting on `qubits`.
    pub fn apply_on(&self, qubits: &[usize], p: &PhasedPauli) -> PhasedPauli {
        let local = extract(p.proj(), qubits);
        let img = self.conjugate(&PhasedPauli::new(local, 0));
        let mut out = p.proj().clone();
        for (i, &q) in qubits.iter().enumerate() {
            out.set(q, img.proj().get(i));
        }
        PhasedPauli::new(out, p.phase_exp() + img.phase_exp())
    }

    pub fn apply_on_proj(&self, qubits: &[usize], p: &ProjPauli) -> ProjPauli {
        let local = extract(p, qubits);
        let img = self.conjugate_proj(&local);
        let mut out = p.clone();
        for (i, &q) in qubits.iter().enumerate() {
            out.set(q, img.get(i));
        }
        out
    }

    /// Tableau of a named gate, or `None` if the name is unknown.
    pub fn named(name: &str) -> Option<CliffordTableau> {
        let (xs, zs): (&[&str], &[&str]) = match name {
            "I" => (&["+X0"], &["+Z0"]),
            "X" => (&["+X0"], &["-Z0"]),
            "Y" => (&["-X0"], &["-Z0"]),
            "Z" => (&["-X0"], &["+Z0"]),
            "H" => (&["+Z0"], &["+X0"]),
            "S" => (&["+Y0"], &["+Z0"]),
            "S_DAG" => (&["-Y0"], &["+Z0"]),
            "SQRT_X" => (&["+X0"], &["-Y0"]),
            "SQRT_X_DAG" => (&["+X0"], &["+Y0"]),
            "CX" => (&["+X0*X1", "+X1"], &["+Z0", "+Z0*Z1"]),
            "CZ" => (&["+X0*Z1", "+Z0*X1"], &["+Z0", "+Z1"]),
            "SWAP" => (&["+X1", "+X0"], &["+Z1", "+Z0"]),
            _ => return None,
        };
        let n = xs.len();
        let parse = |v: &[&str]| -> Vec<PhasedPauli> {
            v.iter().map(|s| PhasedPauli::parse(s, n).expect("gate table")).collect()
        };
        Some(CliffordTableau { xs: parse(xs), zs: parse(zs) })
    }

    pub const GATE_NAMES: [&'static str; 12] =
        ["I", "X", "Y", "Z", "H", "S", "S_DAG", "SQRT_X", "SQRT_X_DAG", "CX", "CZ", "SWAP"];
}

fn extract(p: &ProjPauli, qubits: &[usize]) -> ProjPauli {
    let mut local = ProjPauli::identity(qubits.len());
    for (i, &q) in qubits.iter().enumerate() {
        local.set(i, p.get(q));
    }
    local
}

fn lift(p: &PhasedPauli, qubits: &[usize], n: usize) -> PhasedPauli {
    let mut out = ProjPauli::identity(n);
    for (i, &q) in qubits.iter().enumerate() {
        out.set(q, p.proj().get(i));
    }
    PhasedPauli::new(out, p.phase_exp())
}

impl fmt::Display for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{ ")?;
        for q in 0..self.n() {
            if q > 0 {
                f.write_str(", ")?;
            }
            write!(f, "X{q} -> {}, Z{q} -> {}", self.xs[q], self.zs[q])?;
        }
        f.write_str(" }")
    }
}

impl fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CliffordTableau{self}")
    }
}
