//! Dense statevector simulator.
//!
//! Amplitude index bit `i` is the computational-basis value of simulator
//! qubit `i`, so qubit 0 is the least significant bit.
//!
//! Gate table (rows are the output amplitudes for |0⟩, |1⟩):
//!
//! | gate | matrix |
//! |------|--------|
//! | H    | (1/√2) [[1, 1], [1, −1]] |
//! | X    | [[0, 1], [1, 0]] |
//! | Y    | [[0, −i], [i, 0]] |
//! | Z    | diag(1, −1) |
//! | S, S† | diag(1, i), diag(1, −i) |
//! | T, T† | diag(1, e^{iπ/4}), diag(1, e^{−iπ/4}) |
//! | RX(θ) | [[cos θ/2, −i sin θ/2], [−i sin θ/2, cos θ/2]] |
//! | RY(θ) | [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]] |
//! | RZ(θ) | diag(e^{−iθ/2}, e^{iθ/2}) |
//!
//! CNOT and CZ take (control, target); CCX takes (control, control, target).

use num_complex::Complex64;
use thiserror::Error;

use crate::gate::GateKind;

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("{kind} expects {expected} qubits and {params} parameters")]
    Arity { kind: GateKind, expected: usize, params: usize },
    #[error("qubit {qubit} out of range for {n} qubits")]
    OutOfRange { qubit: usize, n: usize },
    #[error("repeated qubit operand {0}")]
    Duplicate(usize),
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The single-qubit matrix of `kind`, or of the target action for
/// controlled kinds (X for CNOT and CCX, Z for CZ). `None` for SWAP.
pub fn gate_matrix(kind: GateKind, params: &[f64]) -> Option<Matrix2> {
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let theta = params.first().copied().unwrap_or(0.0);
    let (s, co) = (theta / 2.0).sin_cos();
    Some(match kind {
        GateKind::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        GateKind::X | GateKind::Cnot | GateKind::Ccx => [[zero, one], [one, zero]],
        GateKind::Y => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
        GateKind::Z | GateKind::Cz => [[one, zero], [zero, c(-1.0, 0.0)]],
        GateKind::S => [[one, zero], [zero, c(0.0, 1.0)]],
        GateKind::Sdg => [[one, zero], [zero, c(0.0, -1.0)]],
        GateKind::T => [[one, zero], [zero, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        GateKind::Tdg => [[one, zero], [zero, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]],
        GateKind::Rx => [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]],
        GateKind::Ry => [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]],
        GateKind::Rz => [[Complex64::from_polar(1.0, -theta / 2.0), zero], [zero, Complex64::from_polar(1.0, theta / 2.0)]],
        GateKind::Swap => return None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n` qubits.
    pub fn new(n: usize) -> StateVector {
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[0] = c(1.0, 0.0);
        StateVector { n, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> StateVector {
        assert!(amps.len().is_power_of_two(), "amplitude count must be a power of two");
        StateVector { n: amps.len().trailing_zeros() as usize, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn apply_gate(&mut self, kind: GateKind, params: &[f64], targets: &[usize]) -> Result<(), SimError> {
        if targets.len() != kind.num_qubits() || params.len() != kind.num_params() {
            return Err(SimError::Arity { kind, expected: kind.num_qubits(), params: kind.num_params() });
        }
        for (i, &q) in targets.iter().enumerate() {
            if q >= self.n {
                return Err(SimError::OutOfRange { qubit: q, n: self.n });
            }
            if targets[..i].contains(&q) {
                return Err(SimError::Duplicate(q));
            }
        }
        match kind {
            GateKind::Swap => self.swap_qubits(targets[0], targets[1]),
            _ => {
                let (target, controls) = targets.split_last().unwrap();
                let m = gate_matrix(kind, params).unwrap();
                self.apply_controlled(controls, *target, &m);
            }
        }
        Ok(())
    }

    /// Applies `m` to `target` on the subspace where every control is 1.
    pub fn apply_controlled(&mut self, controls: &[usize], target: usize, m: &Matrix2) {
        let cmask: usize = controls.iter().map(|&q| 1usize << q).sum();
        let t = 1usize << target;
        for i in 0..self.amps.len() {
            if i & t != 0 || i & cmask != cmask {
                continue;
            }
            let a = self.amps[i];
            let b = self.amps[i | t];
            self.amps[i] = m[0][0] * a + m[0][1] * b;
            self.amps[i | t] = m[1][0] * a + m[1][1] * b;
        }
    }

    pub fn swap_qubits(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (ma, mb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, i ^ ma ^ mb);
            }
        }
    }

    /// Probability that qubit `q` reads 1.
    pub fn prob_one(&self, q: usize) -> f64 {
        let m = 1usize << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Projects qubit `q` onto `bit` and renormalizes.
    pub fn collapse(&mut self, q: usize, bit: bool) {
        let m = 1usize << q;
        let mut norm = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & m != 0) != bit {
                *a = c(0.0, 0.0);
            } else {
                norm += a.norm_sqr();
            }
        }
        let scale = 1.0 / norm.sqrt();
        for a in &mut self.amps {
            *a *= scale;
        }
    }

    /// Samples qubit `q` with the uniform draw `u` ∈ [0, 1): reads 0 when
    /// `u < P(0)`. Collapses the state.
    pub fn measure(&mut self, q: usize, u: f64) -> bool {
        let p0 = 1.0 - self.prob_one(q);
        let bit = u >= p0;
        self.collapse(q, bit);
        bit
    }

    /// Appends a qubit in |0⟩ as the new most significant bit; returns its index.
    pub fn add_qubit(&mut self) -> usize {
        self.amps.resize(self.amps.len() * 2, c(0.0, 0.0));
        self.n += 1;
        self.n - 1
    }

    /// Drops qubit `q`, which must be in a basis state (checked by the
    /// caller). Qubit `n-1` takes index `q`.
    pub fn remove_qubit(&mut self, q: usize) {
        let last = self.n - 1;
        self.swap_qubits(q, last);
        let bit = self.prob_one(last) > 0.5;
        let half = self.amps.len() / 2;
        if bit {
            self.amps.drain(..half);
        } else {
            self.amps.truncate(half);
        }
        self.n -= 1;
        let norm = self.norm_sqr().sqrt();
        for a in &mut self.amps {
            *a /= norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::new(1);
        s.apply_gate(GateKind::H, &[], &[0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitudes(), &[c(h, 0.0), c(h, 0.0)], 1e-15));
    }

    #[test]
    fn bell_amplitudes() {
        let mut s = StateVector::new(2);
        s.apply_gate(GateKind::H, &[], &[0]).unwrap();
        s.apply_gate(GateKind::Cnot, &[], &[0, 1]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitudes(), &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)], 1e-15));
    }

    #[test]
    fn control_is_first_operand() {
        let mut s = StateVector::new(2);
        s.apply_gate(GateKind::X, &[], &[1]).unwrap();
        s.apply_gate(GateKind::Cnot, &[], &[1, 0]).unwrap();
        assert!((s.amplitudes()[3].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn arity_and_range() {
        let mut s = StateVector::new(2);
        assert!(matches!(s.apply_gate(GateKind::Cnot, &[], &[0]), Err(SimError::Arity { .. })));
        assert!(matches!(s.apply_gate(GateKind::Rx, &[], &[0]), Err(SimError::Arity { .. })));
        assert_eq!(s.apply_gate(GateKind::H, &[], &[2]), Err(SimError::OutOfRange { qubit: 2, n: 2 }));
        assert_eq!(s.apply_gate(GateKind::Swap, &[], &[1, 1]), Err(SimError::Duplicate(1)));
    }

    #[test]
    fn measure_definite_and_collapse() {
        let mut s = StateVector::new(1);
        s.apply_gate(GateKind::X, &[], &[0]).unwrap();
        let before = s.clone();
        assert!(s.measure(0, 0.999));
        assert!(s.measure(0, 0.0));
        assert!(close(s.amplitudes(), before.amplitudes(), 1e-15));
    }

    #[test]
    fn grow_and_shrink() {
        let mut s = StateVector::new(1);
        s.apply_gate(GateKind::H, &[], &[0]).unwrap();
        assert_eq!(s.add_qubit(), 1);
        s.apply_gate(GateKind::X, &[], &[1]).unwrap();
        s.remove_qubit(1);
        assert_eq!(s.num_qubits(), 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitudes(), &[c(h, 0.0), c(h, 0.0)], 1e-15));
        s.add_qubit();
        s.apply_gate(GateKind::X, &[], &[1]).unwrap();
        s.remove_qubit(0);
        assert!(close(s.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)], 1e-15));
    }
}
