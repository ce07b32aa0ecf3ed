//! Z-controlled two-qubit gate built from the pair-crossing phase, plus the
//! small dense matrix algebra needed to verify its truth table and the
//! Hadamard-conjugation construction of CNOT.
//!
//! Two-qubit basis ordering is |n_a n_b> = |00>, |01>, |10>, |11> throughout
//! (first factor = control channel a, second = target channel b).

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Basis labels for 4-dimensional gates, in row/column order.
pub const TWO_QUBIT_BASIS: [&str; 4] = ["|00>", "|01>", "|10>", "|11>"];

/// Small dense unitary, dim 2 (one qubit) or 4 (two qubits), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::DimensionMismatch(format!(
                "gate dimension must be 2 or 4, got {dim}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{dim}x{dim} gate needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(GateMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// max_ij |(G G_dagger - I)_ij|; zero for an exactly unitary matrix.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.get(i, k) * self.get(j, k).conj();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    /// Nested [re, im] pairs for serialization layers.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| {
                        let v = self.get(i, j);
                        [v.re, v.im]
                    })
                    .collect()
            })
            .collect()
    }
}

// e^{i t}, exact on quarter-turn multiples: doubling fl(pi/2) is exact in
// binary floating point, so t = 0, +-pi/2, +-pi, ... hit the branch with zero
// remainder and return exact unit entries.
fn cis(t: f64) -> Complex64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let quarter_turns = (t / half_pi).round();
    if t - quarter_turns * half_pi == 0.0 && quarter_turns.abs() < 9e15 {
        return match (quarter_turns as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::new(t.cos(), t.sin())
}

/// Z-controlled gate diag(1, 1, 1, e^{-i theta}): only the doubly occupied
/// state |11> acquires the crossing phase. theta = pi gives diag(1,1,1,-1)
/// with an exact -1 entry.
pub fn cz_from_phase(theta: f64) -> GateMatrix {
    let mut entries = vec![Complex64::new(0.0, 0.0); 16];
    entries[0] = Complex64::new(1.0, 0.0);
    entries[5] = Complex64::new(1.0, 0.0);
    entries[10] = Complex64::new(1.0, 0.0);
    entries[15] = cis(-theta);
    GateMatrix { dim: 4, entries }
}

/// Single-qubit Hadamard.
pub fn hadamard() -> GateMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    GateMatrix {
        dim: 2,
        entries: vec![
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(h, 0.0),
            Complex64::new(-h, 0.0),
        ],
    }
}

/// Standard CNOT with control on the first qubit, target on the second.
pub fn cnot() -> GateMatrix {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    GateMatrix {
        dim: 4,
        entries: vec![
            one, zero, zero, zero, //
            zero, one, zero, zero, //
            zero, zero, zero, one, //
            zero, zero, one, zero,
        ],
    }
}

/// Kronecker product a (x) b; the result must still be a one- or two-qubit gate.
pub fn tensor(a: &GateMatrix, b: &GateMatrix) -> Result<GateMatrix> {
    let dim = a.dim * b.dim;
    if dim != 4 {
        return Err(Error::DimensionMismatch(format!(
            "tensor product of {}x{} and {}x{} exceeds two qubits",
            a.dim, a.dim, b.dim, b.dim
        )));
    }
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..a.dim {
        for j in 0..a.dim {
            for k in 0..b.dim {
                for l in 0..b.dim {
                    entries[(i * b.dim + k) * dim + (j * b.dim + l)] = a.get(i, j) * b.get(k, l);
                }
            }
        }
    }
    GateMatrix::new(dim, entries)
}

fn matmul(a: &GateMatrix, b: &GateMatrix) -> Result<GateMatrix> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(format!(
            "cannot multiply {}x{} by {}x{}",
            a.dim, a.dim, b.dim, b.dim
        )));
    }
    let n = a.dim;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += a.get(i, k) * b.get(k, j);
            }
            entries[i * n + j] = acc;
        }
    }
    GateMatrix::new(n, entries)
}

/// Circuit composition: compose(&[g1, g2, g3]) applies g1 first, so the
/// returned matrix is g3 * g2 * g1.
pub fn compose(gates: &[GateMatrix]) -> Result<GateMatrix> {
    let first = gates
        .first()
        .ok_or_else(|| Error::InvalidParameter("compose needs at least one gate".into()))?;
    let mut acc = first.clone();
    for g in &gates[1..] {
        acc = matmul(g, &acc)?;
    }
    Ok(acc)
}

/// Apply a gate to a state vector (column), preserving its norm.
pub fn apply(state: &[Complex64], g: &GateMatrix) -> Result<Vec<Complex64>> {
    if state.len() != g.dim {
        return Err(Error::DimensionMismatch(format!(
            "state has {} amplitudes, gate is {}x{}",
            state.len(),
            g.dim,
            g.dim
        )));
    }
    Ok((0..g.dim)
        .map(|i| (0..g.dim).map(|j| g.get(i, j) * state[j]).sum())
        .collect())
}

/// Computational basis state |idx> of the given dimension.
pub fn basis_state(dim: usize, idx: usize) -> Result<Vec<Complex64>> {
    if idx >= dim {
        return Err(Error::DimensionMismatch(format!(
            "basis index {idx} out of range for dimension {dim}"
        )));
    }
    let mut state = vec![Complex64::new(0.0, 0.0); dim];
    state[idx] = Complex64::new(1.0, 0.0);
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PI: f64 = std::f64::consts::PI;

    fn max_dev(a: &GateMatrix, b: &GateMatrix) -> f64 {
        a.entries()
            .iter()
            .zip(b.entries())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn half_turn_truth_table_is_exact() {
        let g = cz_from_phase(PI);
        // |00>, |01>, |10> pass through unchanged; |11> flips sign. All four
        // mappings are bit-exact.
        for idx in 0..3 {
            let state = basis_state(4, idx).unwrap();
            assert_eq!(apply(&state, &g).unwrap(), state);
        }
        let out = apply(&basis_state(4, 3).unwrap(), &g).unwrap();
        assert_eq!(out[3], Complex64::new(-1.0, 0.0));
        assert_eq!(out[0], Complex64::new(0.0, 0.0));
        assert_eq!(out[1], Complex64::new(0.0, 0.0));
        assert_eq!(out[2], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn zero_phase_is_identity() {
        assert_eq!(cz_from_phase(0.0), GateMatrix::identity(4).unwrap());
    }

    #[test]
    fn quarter_turn_applied_twice_is_half_turn() {
        let quarter = cz_from_phase(PI / 2.0);
        let twice = compose(&[quarter.clone(), quarter]).unwrap();
        assert_eq!(twice, cz_from_phase(PI));
    }

    #[test]
    fn hadamard_squares_to_identity() {
        let h2 = compose(&[hadamard(), hadamard()]).unwrap();
        assert!(max_dev(&h2, &GateMatrix::identity(2).unwrap()) < 1e-12);
    }

    #[test]
    fn hadamard_conjugation_gives_cnot() {
        let wrap = tensor(&GateMatrix::identity(2).unwrap(), &hadamard()).unwrap();
        let circuit = compose(&[wrap.clone(), cz_from_phase(PI), wrap]).unwrap();
        let dev = max_dev(&circuit, &cnot());
        assert!(dev < 1e-12, "deviation from CNOT: {dev:.3e}");
    }

    #[test]
    fn named_gates_are_unitary() {
        for g in [cz_from_phase(PI), cz_from_phase(0.37), cnot()] {
            assert!(g.unitarity_deviation() < 1e-12);
        }
        assert!(hadamard().unitarity_deviation() < 1e-12);
    }

    #[test]
    fn apply_preserves_norm_for_random_states() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let wrap = tensor(&GateMatrix::identity(2).unwrap(), &hadamard()).unwrap();
        let gates = [cz_from_phase(1.234), cnot(), wrap];
        for _ in 0..20 {
            let mut state: Vec<Complex64> = (0..4)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = state.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            for v in &mut state {
                *v /= norm;
            }
            for g in &gates {
                let out = apply(&state, g).unwrap();
                let out_norm = out.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                assert!((out_norm - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        assert!(apply(&basis_state(2, 0).unwrap(), &cz_from_phase(PI)).is_err());
        assert!(tensor(&cz_from_phase(PI), &hadamard()).is_err());
        assert!(compose(&[hadamard(), cz_from_phase(PI)]).is_err());
        assert!(compose(&[]).is_err());
        assert!(GateMatrix::new(3, vec![Complex64::new(1.0, 0.0); 9]).is_err());
    }

    proptest! {
        #[test]
        fn cz_is_diagonal_unitary_and_composable(
            t1 in -10.0f64..10.0,
            t2 in -10.0f64..10.0,
        ) {
            let g1 = cz_from_phase(t1);
            prop_assert!(g1.unitarity_deviation() < 1e-12);
            for i in 0..4 {
                for j in 0..4 {
                    if i != j {
                        prop_assert_eq!(g1.get(i, j), Complex64::new(0.0, 0.0));
                    }
                }
            }
            let product = compose(&[g1, cz_from_phase(t2)]).unwrap();
            let direct = cz_from_phase(t1 + t2);
            prop_assert!(max_dev(&product, &direct) < 1e-12);
        }
    }
}
