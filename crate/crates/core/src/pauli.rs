//! Pauli operators in binary symplectic form.
//!
//! A [`ProjPauli`] is a Pauli operator modulo phase; a [`PhasedPauli`] carries
//! the exponent `a` in `i^a · X^x Z^z` (per qubit, X factor to the left of the Z
//! factor). `Y` is therefore stored as `x = z = 1` with one extra unit of phase.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dim, Error, Result};
use crate::gf2::BitVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];
}

/// Pauli operator up to phase.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPauli {
    x: BitVec,
    z: BitVec,
}

impl ProjPauli {
    pub fn identity(n: usize) -> Self {
        ProjPauli { x: BitVec::zeros(n), z: BitVec::zeros(n) }
    }

    pub fn from_xz(x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len(), "x and z parts differ in length");
        ProjPauli { x, z }
    }

    pub fn single(n: usize, q: usize, l: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set(q, l);
        p
    }

    /// Builds an operator from `(qubit, letter)` pairs.
    pub fn from_letters(n: usize, letters: &[(usize, Letter)]) -> Self {
        let mut p = Self::identity(n);
        for &(q, l) in letters {
            p.set(q, l);
        }
        p
    }

    /// Inverse of [`ProjPauli::symplectic`]: the first half are X bits.
    pub fn from_symplectic(v: &BitVec) -> Self {
        assert!(v.len().is_multiple_of(2));
        let n = v.len() / 2;
        ProjPauli { x: v.slice(0, n), z: v.slice(n, n) }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &BitVec {
        &self.x
    }

    pub fn z(&self) -> &BitVec {
        &self.z
    }

    pub fn get(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set(&mut self, q: usize, l: Letter) {
        let (x, z) = l.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// `x ‖ z` as a single vector of length `2n`.
    pub fn symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn mul_assign(&mut self, other: &ProjPauli) {
        debug_assert_eq!(self.n(), other.n());
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn mul(&self, other: &ProjPauli) -> ProjPauli {
        let mut r = self.clone();
        r.mul_assign(other);
        r
    }

    pub fn checked_mul(&self, other: &ProjPauli) -> Result<ProjPauli> {
        check_dim(self.n(), other.n())?;
        Ok(self.mul(other))
    }

    /// Symplectic form: true iff the two operators anticommute.
    #[inline]
    pub fn commutator(&self, other: &ProjPauli) -> bool {
        debug_assert_eq!(self.n(), other.n());
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    pub fn checked_commutator(&self, other: &ProjPauli) -> Result<bool> {
        check_dim(self.n(), other.n())?;
        Ok(self.commutator(other))
    }

    pub fn support_bits(&self) -> BitVec {
        self.x.or(&self.z)
    }

    pub fn support(&self) -> Vec<usize> {
        self.support_bits().iter_ones().collect()
    }

    pub fn weight(&self) -> usize {
        self.support_bits().count_ones()
    }

    /// Sets every component outside `qubits` to the identity.
    pub fn restrict(&self, qubits: &[usize]) -> Result<ProjPauli> {
        let n = self.n();
        let mut keep = BitVec::zeros(n);
        for &q in qubits {
            if q >= n {
                return Err(Error::OutOfRange { index: q, limit: n });
            }
            keep.set(q, true);
        }
        Ok(self.restrict_mask(&keep))
    }

    pub fn restrict_mask(&self, keep: &BitVec) -> ProjPauli {
        ProjPauli { x: self.x.and(keep), z: self.z.and(keep) }
    }

    /// Number of qubits carrying `Y`.
    pub fn y_count(&self) -> usize {
        self.x.and(&self.z).count_ones()
    }

    pub fn parse(s: &str, n: usize) -> Result<ProjPauli> {
        let p = PhasedPauli::parse(s, n)?;
        Ok(p.into_proj())
    }

    fn write_factors(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let mut first = true;
        for q in self.support_bits().iter_ones() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "{}{}", self.get(q).as_char(), q)?;
        }
        Ok(())
    }
}

impl fmt::Display for ProjPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_factors(f)
    }
}

impl fmt::Debug for ProjPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjPauli[{}]({self})", self.n())
    }
}

/// Pauli operator with phase `i^phase`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PhasedPauli {
    proj: ProjPauli,
    phase: u8,
}

impl PhasedPauli {
    pub fn identity(n: usize) -> Self {
        PhasedPauli { proj: ProjPauli::identity(n), phase: 0 }
    }

    /// Raw constructor: the operator `i^phase · X^x Z^z`.
    pub fn new(proj: ProjPauli, phase: u8) -> Self {
        PhasedPauli { proj, phase: phase & 3 }
    }

    /// The Hermitian operator `±proj`, where `proj` reads each qubit as I, X, Y or Z.
    pub fn hermitian(proj: ProjPauli, negative: bool) -> Self {
        let ny = (proj.y_count() % 4) as u8;
        PhasedPauli::new(proj, ny + if negative { 2 } else { 0 })
    }

    pub fn proj(&self) -> &ProjPauli {
        &self.proj
    }

    pub fn into_proj(self) -> ProjPauli {
        self.proj
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn n(&self) -> usize {
        self.proj.n()
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as usize + self.proj.y_count()).is_multiple_of(2)
    }

    /// Phase relative to the letter-wise product, where `Y` counts as a letter:
    /// 0 for `+`, 1 for `+i`, 2 for `-`, 3 for `-i`.
    pub fn letter_phase(&self) -> u8 {
        let ny = (self.proj.y_count() % 4) as u8;
        (self.phase + 4 - ny) & 3
    }

    /// For Hermitian operators, whether the sign is negative.
    pub fn is_negative(&self) -> bool {
        self.letter_phase() == 2
    }

    pub fn negate(&self) -> Self {
        PhasedPauli::new(self.proj.clone(), self.phase + 2)
    }

    pub fn with_phase(&self, phase: u8) -> Self {
        PhasedPauli::new(self.proj.clone(), phase)
    }

    pub fn is_identity(&self) -> bool {
        self.proj.is_identity()
    }

    pub fn mul(&self, other: &PhasedPauli) -> PhasedPauli {
        debug_assert_eq!(self.n(), other.n());
        let swap = self.proj.z.dot(&other.proj.x) as u8;
        let phase = self.phase + other.phase + 2 * swap;
        PhasedPauli::new(self.proj.mul(&other.proj), phase)
    }

    pub fn checked_mul(&self, other: &PhasedPauli) -> Result<PhasedPauli> {
        check_dim(self.n(), other.n())?;
        Ok(self.mul(other))
    }

    pub fn commutator(&self, other: &PhasedPauli) -> bool {
        self.proj.commutator(&other.proj)
    }

    /// Parses strings like `-X0*Z3*Y7`, `+I`, or `+iX0`.
    pub fn parse(s: &str, n: usize) -> Result<PhasedPauli> {
        let err = |msg: &str| Error::PauliSyntax { text: s.to_string(), msg: msg.to_string() };
        let t = s.trim();
        let (sign, body) = if let Some(r) = t.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (1, r)
        } else {
            (0, t)
        };
        let body = body.trim();
        if body.is_empty() {
            return Err(err("empty operator"));
        }
        let mut proj = ProjPauli::identity(n);
        if body != "I" {
            for factor in body.split('*') {
                let factor = factor.trim();
                let mut chars = factor.chars();
                let letter = match chars.next() {
                    Some('X') => Letter::X,
                    Some('Y') => Letter::Y,
                    Some('Z') => Letter::Z,
                    _ => return Err(err(&format!("bad factor {factor:?}"))),
                };
                let idx = chars.as_str();
                if idx.is_empty() || !idx.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(err(&format!("bad qubit index in {factor:?}")));
                }
                let q: usize = idx.parse().map_err(|_| err("qubit index overflow"))?;
                if q >= n {
                    return Err(Error::OutOfRange { index: q, limit: n });
                }
                if proj.get(q) != Letter::I {
                    return Err(err(&format!("qubit {q} appears twice")));
                }
                proj.set(q, letter);
            }
        }
        let ny = (proj.y_count() % 4) as u8;
        Ok(PhasedPauli::new(proj, sign + ny))
    }
}

impl fmt::Display for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.letter_phase() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })?;
        self.proj.write_factors(f)
    }
}

impl fmt::Debug for PhasedPauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhasedPauli[{}]({self})", self.n())
    }
}

/// Parses with the qubit count given as the largest index plus one.
impl FromStr for PhasedPauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n = max_index(s).map_or(1, |m| m + 1);
        PhasedPauli::parse(s, n)
    }
}

fn max_index(s: &str) -> Option<usize> {
    let mut best = None;
    let mut cur: Option<usize> = None;
    for c in s.chars().chain(std::iter::once(' ')) {
        if let Some(d) = c.to_digit(10) {
            cur = Some(cur.unwrap_or(0).saturating_mul(10).saturating_add(d as usize));
        } else if let Some(v) = cur.take() {
            best = Some(best.map_or(v, |b: usize| b.max(v)));
        }
    }
    best
}
