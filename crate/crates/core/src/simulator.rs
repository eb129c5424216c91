//! Dense statevector simulator.
//!
//! Qubit `q` is bit `q` of the basis-state index (little-endian). Rotations use the
//! convention `R_A(φ) = exp(-i φ A / 2)`, so every rotation angle enters the circuit
//! output as a single frequency and the two-term parameter-shift rule is exact.
//!
//! The observable is the mean of Pauli-Z over all qubits, evaluated exactly.

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Real;

/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimulatorError {
    #[error("register of {0} qubits is outside the supported range 1..={MAX_QUBITS}")]
    Capacity(usize),
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },
    #[error("CNOT control and target are both qubit {0}")]
    SameQubit(usize),
    #[error("parameter index {index} out of range for {len} parameters")]
    ParameterIndex { index: usize, len: usize },
    #[error("amplitude vector of length {len} is not a power of two within capacity")]
    AmplitudeLength { len: usize },
}

/// A single gate of a circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp<T> {
    Rx { target: usize, angle: T },
    Ry { target: usize, angle: T },
    Rz { target: usize, angle: T },
    Cnot { control: usize, target: usize },
}

impl<T: Real> GateOp<T> {
    pub fn target(&self) -> usize {
        match *self {
            GateOp::Rx { target, .. }
            | GateOp::Ry { target, .. }
            | GateOp::Rz { target, .. }
            | GateOp::Cnot { target, .. } => target,
        }
    }

    /// Rotation angle, `None` for CNOT.
    pub fn angle(&self) -> Option<T> {
        match *self {
            GateOp::Rx { angle, .. } | GateOp::Ry { angle, .. } | GateOp::Rz { angle, .. } => {
                Some(angle)
            }
            GateOp::Cnot { .. } => None,
        }
    }

    /// Same gate with its rotation angle offset by `delta`. CNOT is returned unchanged.
    pub fn shifted(self, delta: T) -> Self {
        match self {
            GateOp::Rx { target, angle } => GateOp::Rx { target, angle: angle + delta },
            GateOp::Ry { target, angle } => GateOp::Ry { target, angle: angle + delta },
            GateOp::Rz { target, angle } => GateOp::Rz { target, angle: angle + delta },
            cnot @ GateOp::Cnot { .. } => cnot,
        }
    }

    /// Inverse gate: negated angle for rotations, itself for CNOT.
    pub fn inverse(self) -> Self {
        match self {
            GateOp::Rx { target, angle } => GateOp::Rx { target, angle: -angle },
            GateOp::Ry { target, angle } => GateOp::Ry { target, angle: -angle },
            GateOp::Rz { target, angle } => GateOp::Rz { target, angle: -angle },
            cnot @ GateOp::Cnot { .. } => cnot,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<(), SimulatorError> {
        let check = |index: usize| {
            if index < n_qubits {
                Ok(())
            } else {
                Err(SimulatorError::QubitIndex { index, n_qubits })
            }
        };
        check(self.target())?;
        if let GateOp::Cnot { control, target } = *self {
            check(control)?;
            if control == target {
                return Err(SimulatorError::SameQubit(control));
            }
        }
        Ok(())
    }
}

/// `2^n` complex amplitudes of an `n`-qubit pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// The all-zeros computational basis state.
    pub fn zero(n_qubits: usize) -> Result<Self, SimulatorError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(SimulatorError::Capacity(n_qubits));
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amplitudes[0] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes. The caller is responsible for normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self, SimulatorError> {
        let len = amplitudes.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(SimulatorError::AmplitudeLength { len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(SimulatorError::AmplitudeLength { len });
        }
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    /// Sum of squared amplitude magnitudes.
    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &GateOp<T>) -> Result<(), SimulatorError> {
        gate.validate(self.n_qubits)?;
        let half = T::lit(0.5);
        match *gate {
            GateOp::Rx { target, angle } => {
                let (s, c) = (angle * half).sin_cos();
                let zero = T::zero();
                self.apply_single(
                    target,
                    [
                        [Complex::new(c, zero), Complex::new(zero, -s)],
                        [Complex::new(zero, -s), Complex::new(c, zero)],
                    ],
                );
            }
            GateOp::Ry { target, angle } => {
                let (s, c) = (angle * half).sin_cos();
                let zero = T::zero();
                self.apply_single(
                    target,
                    [
                        [Complex::new(c, zero), Complex::new(-s, zero)],
                        [Complex::new(s, zero), Complex::new(c, zero)],
                    ],
                );
            }
            GateOp::Rz { target, angle } => {
                let (s, c) = (angle * half).sin_cos();
                let lower = Complex::new(c, -s);
                let upper = Complex::new(c, s);
                let mask = 1usize << target;
                for (index, amp) in self.amplitudes.iter_mut().enumerate() {
                    *amp = *amp * if index & mask == 0 { lower } else { upper };
                }
            }
            GateOp::Cnot { control, target } => {
                let cmask = 1usize << control;
                let tmask = 1usize << target;
                for index in 0..self.amplitudes.len() {
                    if index & cmask != 0 && index & tmask == 0 {
                        self.amplitudes.swap(index, index | tmask);
                    }
                }
            }
        }
        Ok(())
    }

    fn apply_single(&mut self, target: usize, m: [[Complex<T>; 2]; 2]) {
        let mask = 1usize << target;
        for index in 0..self.amplitudes.len() {
            if index & mask != 0 {
                continue;
            }
            let partner = index | mask;
            let a = self.amplitudes[index];
            let b = self.amplitudes[partner];
            self.amplitudes[index] = m[0][0] * a + m[0][1] * b;
            self.amplitudes[partner] = m[1][0] * a + m[1][1] * b;
        }
    }

    /// `(1/n) Σ_q ⟨Z_q⟩`.
    pub fn expect_z_mean(&self) -> T {
        let mut total = T::zero();
        for (index, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            // Σ_q (1 - 2 bit_q) = n - 2 popcount
            let ones = index.count_ones() as usize;
            let weight = T::lit(self.n_qubits as f64 - 2.0 * ones as f64);
            total = total + p * weight;
        }
        total / T::lit(self.n_qubits as f64)
    }
}

pub fn init_zero<T: Real>(n_qubits: usize) -> Result<StateVector<T>, SimulatorError> {
    StateVector::zero(n_qubits)
}

pub fn apply_gate<T: Real>(
    mut state: StateVector<T>,
    gate: &GateOp<T>,
) -> Result<StateVector<T>, SimulatorError> {
    state.apply(gate)?;
    Ok(state)
}

pub fn expect_z_mean<T: Real>(state: &StateVector<T>) -> T {
    state.expect_z_mean()
}

/// Evolves `|0…0⟩` through `gates` and returns the mean-Z expectation.
pub fn run_circuit<T: Real>(gates: &[GateOp<T>], n_qubits: usize) -> Result<T, SimulatorError> {
    let mut state = StateVector::zero(n_qubits)?;
    for gate in gates {
        state.apply(gate)?;
    }
    Ok(state.expect_z_mean())
}

/// Parameter-shift derivative of `run_circuit(builder(params))` with respect to
/// `params[index]`. Exact when that parameter appears as a bare rotation angle.
pub fn param_shift_grad<T, F>(
    builder: F,
    n_qubits: usize,
    params: &[T],
    index: usize,
) -> Result<T, SimulatorError>
where
    T: Real,
    F: Fn(&[T]) -> Vec<GateOp<T>>,
{
    if index >= params.len() {
        return Err(SimulatorError::ParameterIndex { index, len: params.len() });
    }
    let shift = T::FRAC_PI_2();
    let mut shifted = params.to_vec();
    shifted[index] = params[index] + shift;
    let plus = run_circuit(&builder(&shifted), n_qubits)?;
    shifted[index] = params[index] - shift;
    let minus = run_circuit(&builder(&shifted), n_qubits)?;
    Ok((plus - minus) * T::lit(0.5))
}

/// Derivative of the circuit output with respect to the angle of each gate listed in
/// `gate_indices`, by shifting that gate alone by ±π/2.
///
/// Prefix states are reused, so the cost is roughly half of rebuilding every shifted
/// circuit from scratch. CNOT entries yield zero.
pub fn angle_gradients<T: Real>(
    gates: &[GateOp<T>],
    n_qubits: usize,
    gate_indices: &[usize],
) -> Result<Vec<T>, SimulatorError> {
    for gate in gates {
        gate.validate(n_qubits)?;
    }
    let mut wanted = vec![false; gates.len()];
    for &index in gate_indices {
        if index >= gates.len() {
            return Err(SimulatorError::ParameterIndex { index, len: gates.len() });
        }
        wanted[index] = true;
    }

    let shift = T::FRAC_PI_2();
    let half = T::lit(0.5);
    let mut by_gate = vec![T::zero(); gates.len()];
    let mut prefix = StateVector::zero(n_qubits)?;
    for (k, gate) in gates.iter().enumerate() {
        if wanted[k] && gate.angle().is_some() {
            let finish = |first: GateOp<T>| -> Result<T, SimulatorError> {
                let mut state = prefix.clone();
                state.apply(&first)?;
                for rest in &gates[k + 1..] {
                    state.apply(rest)?;
                }
                Ok(state.expect_z_mean())
            };
            let plus = finish(gate.shifted(shift))?;
            let minus = finish(gate.shifted(-shift))?;
            by_gate[k] = (plus - minus) * half;
        }
        prefix.apply(gate)?;
    }
    Ok(gate_indices.iter().map(|&i| by_gate[i]).collect())
}
