//! Exact algebra on two-qubit density matrices: spectra, entropies, partial
//! trace and transpose, Bloch decomposition and dephasing in a product basis.
//!
//! The product basis is fixed as |00>, |01>, |10>, |11> with qubit A first,
//! so index `2*a + b` addresses A in state `a` and B in state `b`.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::linalg::{
    self, adjoint, hermitian2_eigenvalues, hermiticity_deviation, jacobi_hermitian, kron2, matmul,
    trace, C64, C_ONE, C_ZERO,
};

/// Hermiticity tolerance required by the eigenvalue and trace-norm entry points.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Construction tolerance for density matrices (trace, Hermiticity, positivity).
pub const DENSITY_TOL: f64 = 1e-12;
/// Eigenvalues in [-ENTROPY_CLAMP, 0) are treated as exact zeros before logs;
/// anything more negative is rejected as invalid rather than silently fixed.
pub const ENTROPY_CLAMP: f64 = 1e-10;
/// Marginals whose eigenvalue gap is below this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Which qubit of the pair an operation acts on (A is the left factor).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Logarithm base for entropy-like quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyBase {
    /// log base 2
    Bits,
    /// natural log
    Nats,
}

pub(crate) fn pauli_x() -> [[C64; 2]; 2] {
    [[C_ZERO, C_ONE], [C_ONE, C_ZERO]]
}

pub(crate) fn pauli_y() -> [[C64; 2]; 2] {
    [
        [C_ZERO, C64::new(0.0, -1.0)],
        [C64::new(0.0, 1.0), C_ZERO],
    ]
}

pub(crate) fn pauli_z() -> [[C64; 2]; 2] {
    [[C_ONE, C_ZERO], [C_ZERO, C64::new(-1.0, 0.0)]]
}

pub(crate) fn identity2() -> [[C64; 2]; 2] {
    [[C_ONE, C_ZERO], [C_ZERO, C_ONE]]
}

pub(crate) fn pauli(i: usize) -> [[C64; 2]; 2] {
    match i {
        0 => identity2(),
        1 => pauli_x(),
        2 => pauli_y(),
        3 => pauli_z(),
        _ => unreachable!("pauli index {i}"),
    }
}

/// A 4x4 complex matrix in the fixed product basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix4 {
    entries: [[C64; 4]; 4],
}

impl ComplexMatrix4 {
    /// Wraps raw entries, rejecting non-finite values.
    pub fn new(entries: [[C64; 4]; 4]) -> Result<Self> {
        for row in &entries {
            for z in row {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::Domain("matrix entry is not finite".into()));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn zeros() -> Self {
        Self {
            entries: [[C_ZERO; 4]; 4],
        }
    }

    pub fn identity() -> Self {
        Self {
            entries: linalg::identity::<4>(),
        }
    }

    pub(crate) fn from_entries_unchecked(entries: [[C64; 4]; 4]) -> Self {
        Self { entries }
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }

    pub fn entries(&self) -> &[[C64; 4]; 4] {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        trace(&self.entries)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: adjoint(&self.entries),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self {
            entries: matmul(&self.entries, &other.entries),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        let mut entries = self.entries;
        for row in &mut entries {
            for z in row {
                *z *= factor;
            }
        }
        Self { entries }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut entries = self.entries;
        for (r, row) in entries.iter_mut().enumerate() {
            for (c, z) in row.iter_mut().enumerate() {
                *z += other.entries[r][c];
            }
        }
        Self { entries }
    }

    /// Max entrywise deviation from Hermitian symmetry.
    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.entries)
    }
}

/// Eigenvalues of a Hermitian 4x4 matrix, sorted descending.
///
/// The input must be Hermitian to within [`HERMITICITY_TOL`].
pub fn hermitian_eigenvalues(m: &ComplexMatrix4) -> Result<[f64; 4]> {
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: HERMITICITY_TOL,
        });
    }
    let mut vals = jacobi_hermitian(&m.entries).values;
    vals.reverse();
    Ok(vals)
}

/// Trace norm of a Hermitian matrix: the sum of absolute eigenvalues.
pub fn trace_norm(m: &ComplexMatrix4) -> Result<f64> {
    let vals = hermitian_eigenvalues(m)?;
    Ok(vals.iter().map(|v| v.abs()).sum())
}

/// The binary-entropy-of-a-square-root map
/// h(z) = -(1+sqrt z)/2 log2((1+sqrt z)/2) - (1-sqrt z)/2 log2((1-sqrt z)/2),
/// defined on z in [0, 1], with 0 log 0 = 0.
pub fn binary_entropy_sqrt(z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "binary_entropy_sqrt requires z in [0, 1], got {z}"
        )));
    }
    let r = z.sqrt();
    let p = 0.5 * (1.0 + r);
    let q = 0.5 * (1.0 - r);
    let mut h = 0.0;
    for x in [p, q] {
        if x > 0.0 {
            h -= x * x.log2();
        }
    }
    Ok(h)
}

fn entropy_from_spectrum(spectrum: &[f64], base: EntropyBase) -> f64 {
    let mut nats = 0.0;
    for &lam in spectrum {
        let lam = clamp_probability(lam);
        if lam > 0.0 {
            nats -= lam * lam.ln();
        }
    }
    match base {
        EntropyBase::Nats => nats,
        EntropyBase::Bits => nats / LN_2,
    }
}

/// Clamp rounding noise off a probability-like eigenvalue. Values slightly
/// below zero or slightly above one (within [`ENTROPY_CLAMP`]) are snapped to
/// the boundary; anything further out is left alone for the caller's checks.
pub(crate) fn clamp_probability(lam: f64) -> f64 {
    if (-ENTROPY_CLAMP..0.0).contains(&lam) {
        0.0
    } else if lam > 1.0 && lam <= 1.0 + ENTROPY_CLAMP {
        1.0
    } else {
        lam
    }
}

/// A validated two-qubit state: Hermitian, unit trace, positive semidefinite
/// (all to [`DENSITY_TOL`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensityMatrix {
    m: ComplexMatrix4,
}

impl TwoQubitDensityMatrix {
    pub fn new(m: ComplexMatrix4) -> Result<Self> {
        let dev = m.hermiticity_deviation();
        if dev > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian: deviation {dev:.3e}"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace is {} + {}i, expected 1",
                tr.re, tr.im
            )));
        }
        let min_eig = jacobi_hermitian(m.entries()).values[0];
        if min_eig < -DENSITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { m })
    }

    /// Outer product |psi><psi| of a normalized four-component vector.
    pub fn from_pure(state: &[C64; 4]) -> Result<Self> {
        let mut entries = [[C_ZERO; 4]; 4];
        for (r, row) in entries.iter_mut().enumerate() {
            for (c, z) in row.iter_mut().enumerate() {
                *z = state[r] * state[c].conj();
            }
        }
        Self::new(ComplexMatrix4::new(entries)?)
    }

    pub(crate) fn from_matrix_unchecked(m: ComplexMatrix4) -> Self {
        debug_assert!(m.hermiticity_deviation() <= 1e-9);
        debug_assert!((m.trace().re - 1.0).abs() <= 1e-9);
        Self { m }
    }

    pub fn matrix(&self) -> &ComplexMatrix4 {
        &self.m
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut vals = jacobi_hermitian(self.m.entries()).values;
        vals.reverse();
        vals
    }

    pub fn von_neumann_entropy(&self, base: EntropyBase) -> f64 {
        entropy_from_spectrum(&self.eigenvalues(), base)
    }

    pub fn purity(&self) -> f64 {
        self.m.matmul(&self.m).trace().re
    }

    /// Reduced state of one qubit.
    pub fn partial_trace(&self, keep: Subsystem) -> QubitDensityMatrix {
        let e = self.m.entries();
        let mut out = [[C_ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = match keep {
                    Subsystem::A => e[2 * i][2 * j] + e[2 * i + 1][2 * j + 1],
                    Subsystem::B => e[i][j] + e[2 + i][2 + j],
                };
            }
        }
        QubitDensityMatrix { m: out }
    }

    /// Transpose of one subsystem's indices. An involution that preserves the
    /// trace and Hermiticity exactly; the result is generally not positive.
    pub fn partial_transpose(&self, subsystem: Subsystem) -> ComplexMatrix4 {
        let e = self.m.entries();
        let mut out = [[C_ZERO; 4]; 4];
        for a in 0..2 {
            for b in 0..2 {
                for m in 0..2 {
                    for n in 0..2 {
                        out[2 * a + m][2 * b + n] = match subsystem {
                            Subsystem::A => e[2 * b + m][2 * a + n],
                            Subsystem::B => e[2 * a + n][2 * b + m],
                        };
                    }
                }
            }
        }
        ComplexMatrix4::from_entries_unchecked(out)
    }

    /// Local Bloch vectors and the 3x3 correlation matrix:
    /// a_i = tr(rho sigma_i x I), b_j = tr(rho I x sigma_j),
    /// t_ij = tr(rho sigma_i x sigma_j).
    pub fn bloch_decompose(&self) -> BlochDecomposition {
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            a[i] = self.expectation(&kron2(&pauli(i + 1), &identity2()));
            b[i] = self.expectation(&kron2(&identity2(), &pauli(i + 1)));
            for j in 0..3 {
                t[i][j] = self.expectation(&kron2(&pauli(i + 1), &pauli(j + 1)));
            }
        }
        BlochDecomposition { a, b, t }
    }

    fn expectation(&self, op: &[[C64; 4]; 4]) -> f64 {
        trace(&matmul(self.m.entries(), op)).re
    }

    /// Dephase in the product basis defined by a measurement direction on each
    /// qubit: rho' = sum_ab (P_a x P_b) rho (P_a x P_b). The result is diagonal
    /// in that basis and keeps the diagonal weights of the input.
    pub fn dephase_in_product_basis(
        &self,
        basis_a: &MeasurementBasis,
        basis_b: &MeasurementBasis,
    ) -> TwoQubitDensityMatrix {
        let pa = basis_a.projectors();
        let pb = basis_b.projectors();
        let mut out = [[C_ZERO; 4]; 4];
        for proj_a in &pa {
            for proj_b in &pb {
                let p = kron2(proj_a, proj_b);
                let term = matmul(&matmul(&p, self.m.entries()), &p);
                for r in 0..4 {
                    for c in 0..4 {
                        out[r][c] += term[r][c];
                    }
                }
            }
        }
        TwoQubitDensityMatrix::from_matrix_unchecked(ComplexMatrix4::from_entries_unchecked(out))
    }

    /// Quantum mutual information S(rho_A) + S(rho_B) - S(rho_AB), clamped at 0.
    pub fn mutual_information(&self, base: EntropyBase) -> f64 {
        let sa = self.partial_trace(Subsystem::A).von_neumann_entropy(base);
        let sb = self.partial_trace(Subsystem::B).von_neumann_entropy(base);
        (sa + sb - self.von_neumann_entropy(base)).max(0.0)
    }
}

/// A single-qubit reduced state produced by [`TwoQubitDensityMatrix::partial_trace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensityMatrix {
    m: [[C64; 2]; 2],
}

impl QubitDensityMatrix {
    pub fn entries(&self) -> &[[C64; 2]; 2] {
        &self.m
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let [lo, hi] = hermitian2_eigenvalues(&self.m);
        [hi, lo]
    }

    pub fn von_neumann_entropy(&self, base: EntropyBase) -> f64 {
        entropy_from_spectrum(&self.eigenvalues(), base)
    }

    /// Bloch vector r with rho = (I + r . sigma)/2.
    pub fn bloch_vector(&self) -> [f64; 3] {
        [
            2.0 * self.m[0][1].re,
            -2.0 * self.m[0][1].im,
            self.m[0][0].re - self.m[1][1].re,
        ]
    }

    /// The eigenbasis as a measurement direction, or `None` when the state is
    /// degenerate (proportional to the identity) and every basis diagonalizes it.
    pub fn eigenbasis(&self) -> Option<MeasurementBasis> {
        let r = self.bloch_vector();
        let norm = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if norm <= DEGENERACY_TOL {
            return None;
        }
        Some(MeasurementBasis::from_bloch_direction(
            r[0] / norm,
            r[1] / norm,
            r[2] / norm,
        ))
    }
}

/// Local Bloch data of a two-qubit state. `a` and `b` are the single-qubit
/// Bloch vectors, `t` the correlation matrix; `reconstruct` inverts
/// [`TwoQubitDensityMatrix::bloch_decompose`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDecomposition {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl BlochDecomposition {
    /// rho = (I x I + a.sigma x I + I x b.sigma + sum_ij t_ij sigma_i x sigma_j) / 4
    pub fn reconstruct(&self) -> ComplexMatrix4 {
        let mut acc = linalg::identity::<4>();
        let mut add = |coeff: f64, op: [[C64; 4]; 4]| {
            for r in 0..4 {
                for c in 0..4 {
                    acc[r][c] += op[r][c] * coeff;
                }
            }
        };
        for i in 0..3 {
            add(self.a[i], kron2(&pauli(i + 1), &identity2()));
            add(self.b[i], kron2(&identity2(), &pauli(i + 1)));
            for j in 0..3 {
                add(self.t[i][j], kron2(&pauli(i + 1), &pauli(j + 1)));
            }
        }
        ComplexMatrix4::from_entries_unchecked(acc).scale(0.25)
    }
}

/// A projective measurement direction on the Bloch sphere. The associated
/// rank-1 projector pair sums to the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    theta: f64,
    phi: f64,
}

impl MeasurementBasis {
    /// `theta` in [0, pi], `phi` in [0, 2 pi).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("theta {theta} outside [0, pi]")));
        }
        if !phi.is_finite() || !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::Domain(format!("phi {phi} outside [0, 2 pi)")));
        }
        Ok(Self { theta, phi })
    }

    /// The computational (sigma_z) basis.
    pub fn computational() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Direction from a unit Bloch vector.
    pub(crate) fn from_bloch_direction(nx: f64, ny: f64, nz: f64) -> Self {
        let theta = nz.clamp(-1.0, 1.0).acos();
        let mut phi = ny.atan2(nx);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        if phi >= 2.0 * PI {
            phi = 0.0;
        }
        Self { theta, phi }
    }

    /// The orthonormal basis vectors.
    pub fn vectors(&self) -> [[C64; 2]; 2] {
        basis_vectors(self.theta, self.phi)
    }

    /// The two rank-1 projectors |v_k><v_k|.
    pub fn projectors(&self) -> [[[C64; 2]; 2]; 2] {
        let vs = self.vectors();
        let proj = |v: &[C64; 2]| {
            [
                [v[0] * v[0].conj(), v[0] * v[1].conj()],
                [v[1] * v[0].conj(), v[1] * v[1].conj()],
            ]
        };
        [proj(&vs[0]), proj(&vs[1])]
    }
}

/// Orthonormal pair for a direction given by raw angles (callers inside
/// optimization loops pass unnormalized angles; trigonometry wraps them).
pub(crate) fn basis_vectors(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (sin_half, cos_half) = (0.5 * theta).sin_cos();
    let phase = C64::new(phi.cos(), phi.sin());
    [
        [C64::new(cos_half, 0.0), phase * sin_half],
        [-phase.conj() * sin_half, C64::new(cos_half, 0.0)],
    ]
}
