//! Symbolic Pauli strings on up to 64 qubits.
//!
//! A string is stored as `coeff * X^x Z^z` where `x` and `z` are bit masks over
//! basis-index bits. Qubit `q` of an `n`-qubit register is bit `n - 1 - q`, so
//! qubit 0 is the most significant (leftmost Kronecker factor).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::BTreeMap;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn qubit_bit(q: usize, n: usize) -> u64 {
    debug_assert!(q < n && n <= 64);
    1u64 << (n - 1 - q)
}

#[inline]
fn parity(m: u64) -> bool {
    m.count_ones() & 1 == 1
}

/// Single Pauli product with a unit-modulus (or general) coefficient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pauli {
    pub coeff: C64,
    pub x: u64,
    pub z: u64,
}

impl Pauli {
    pub fn identity() -> Self {
        Pauli {
            coeff: ONE,
            x: 0,
            z: 0,
        }
    }

    pub fn x(q: usize, n: usize) -> Self {
        Pauli {
            coeff: ONE,
            x: qubit_bit(q, n),
            z: 0,
        }
    }

    pub fn z(q: usize, n: usize) -> Self {
        Pauli {
            coeff: ONE,
            x: 0,
            z: qubit_bit(q, n),
        }
    }

    /// Y = i X Z.
    pub fn y(q: usize, n: usize) -> Self {
        let b = qubit_bit(q, n);
        Pauli {
            coeff: I,
            x: b,
            z: b,
        }
    }

    pub fn scale(self, c: C64) -> Self {
        Pauli {
            coeff: self.coeff * c,
            ..self
        }
    }

    pub fn mul(&self, rhs: &Pauli) -> Pauli {
        let sign = if parity(self.z & rhs.x) { -1.0 } else { 1.0 };
        Pauli {
            coeff: self.coeff * rhs.coeff * sign,
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
        }
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conj(&self) -> Pauli {
        Pauli {
            coeff: self.coeff.conj(),
            ..*self
        }
    }

    pub fn adjoint(&self) -> Pauli {
        let sign = if parity(self.x & self.z) { -1.0 } else { 1.0 };
        Pauli {
            coeff: self.coeff.conj() * sign,
            ..*self
        }
    }

    pub fn commutes(&self, rhs: &Pauli) -> bool {
        parity(self.x & rhs.z) == parity(self.z & rhs.x)
    }

    /// `out += self * v`
    pub fn apply_add(&self, v: &[C64], out: &mut [C64]) {
        for (b, &amp) in v.iter().enumerate() {
            if amp == ZERO {
                continue;
            }
            let b = b as u64;
            let s = if parity(self.z & b) {
                -self.coeff
            } else {
                self.coeff
            };
            out[(b ^ self.x) as usize] += s * amp;
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        self.apply_add(v, &mut out);
        out
    }
}

/// Linear combination of Pauli strings with merged coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliSum {
    terms: BTreeMap<(u64, u64), C64>,
}

impl PauliSum {
    pub fn zero() -> Self {
        PauliSum::default()
    }

    pub fn scalar(c: C64) -> Self {
        let mut s = PauliSum::zero();
        s.add_term(Pauli::identity().scale(c));
        s
    }

    pub fn add_term(&mut self, p: Pauli) {
        let e = self.terms.entry((p.x, p.z)).or_insert(ZERO);
        *e += p.coeff;
    }

    pub fn add(&mut self, other: &PauliSum) {
        for (&(x, z), &c) in &other.terms {
            self.add_term(Pauli { coeff: c, x, z });
        }
    }

    pub fn add_scaled(&mut self, other: &PauliSum, c: C64) {
        for (&(x, z), &d) in &other.terms {
            self.add_term(Pauli { coeff: c * d, x, z });
        }
    }

    pub fn scale(&self, c: C64) -> PauliSum {
        let mut s = PauliSum::zero();
        s.add_scaled(self, c);
        s
    }

    pub fn mul(&self, rhs: &PauliSum) -> PauliSum {
        let mut s = PauliSum::zero();
        for p in self.iter() {
            for q in rhs.iter() {
                s.add_term(p.mul(&q));
            }
        }
        s.prune();
        s
    }

    pub fn adjoint(&self) -> PauliSum {
        let mut s = PauliSum::zero();
        for p in self.iter() {
            s.add_term(p.adjoint());
        }
        s
    }

    /// Drop coefficients below 1e-15 (cancellations are exact for dyadic data).
    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > 1e-15);
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Pauli> + '_ {
        self.terms
            .iter()
            .map(|(&(x, z), &coeff)| Pauli { coeff, x, z })
    }

    /// Largest coefficient modulus; zero iff the operator vanishes (strings are independent).
    pub fn max_coeff(&self) -> f64 {
        self.iter().map(|p| p.coeff.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; v.len()];
        for p in self.iter() {
            p.apply_add(v, &mut out);
        }
        out
    }

    pub fn to_dense(&self, n_qubits: usize) -> DMatrix<C64> {
        let dim = 1usize << n_qubits;
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for p in self.iter() {
            for b in 0..dim as u64 {
                let s = if parity(p.z & b) { -p.coeff } else { p.coeff };
                m[((b ^ p.x) as usize, b as usize)] += s;
            }
        }
        m
    }
}

impl From<Pauli> for PauliSum {
    fn from(p: Pauli) -> Self {
        let mut s = PauliSum::zero();
        s.add_term(p);
        s
    }
}

pub fn dvec(v: Vec<C64>) -> DVector<C64> {
    DVector::from_vec(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    fn dense1(p: Pauli) -> DMatrix<C64> {
        PauliSum::from(p).to_dense(1)
    }

    #[test]
    fn single_qubit_matrices() {
        let x = dense1(Pauli::x(0, 1));
        let y = dense1(Pauli::y(0, 1));
        let z = dense1(Pauli::z(0, 1));
        assert_eq!(x, DMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]));
        assert_eq!(y, DMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]));
        assert_eq!(z, DMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]));
        // XY = iZ
        let xy = PauliSum::from(Pauli::x(0, 1).mul(&Pauli::y(0, 1))).to_dense(1);
        assert_eq!(xy, z.map(|c| c * I));
    }

    #[test]
    fn qubit_zero_is_leftmost_factor() {
        // X on qubit 0 of 2 flips the high bit: |00> -> |10> = index 2
        let v = vec![ONE, ZERO, ZERO, ZERO];
        let w = Pauli::x(0, 2).apply(&v);
        assert_eq!(w[2], ONE);
    }

    #[test]
    fn adjoint_and_conj_match_dense() {
        let p = Pauli::y(0, 2)
            .mul(&Pauli::x(1, 2))
            .scale(C64::new(0.3, -0.7));
        let d = PauliSum::from(p).to_dense(2);
        assert_eq!(PauliSum::from(p.adjoint()).to_dense(2), d.adjoint());
        assert_eq!(PauliSum::from(p.conj()).to_dense(2), d.map(|c| c.conj()));
    }

    #[test]
    fn product_matches_dense_product() {
        let a = Pauli::y(0, 3).mul(&Pauli::z(2, 3));
        let b = Pauli::x(0, 3).mul(&Pauli::y(1, 3));
        let lhs = PauliSum::from(a.mul(&b)).to_dense(3);
        let rhs = PauliSum::from(a).to_dense(3) * PauliSum::from(b).to_dense(3);
        assert!(max_abs(&(lhs - rhs)) < 1e-15);
        assert_eq!(a.commutes(&b), false);
    }
}
