//! Dense complex matrix helpers for the tiny fixed dimensions used here
//! (2, 3, 4 and 16). Eigenproblems are solved with cyclic Jacobi rotations;
//! at these sizes that is simpler and more predictable than a general solver.

use num_complex::Complex64;

pub(crate) type C64 = Complex64;

pub(crate) const C_ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const C_ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Off-diagonal convergence threshold of the Jacobi sweep, relative to the
/// Frobenius norm of the input.
const JACOBI_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

pub(crate) fn identity<const N: usize>() -> [[C64; N]; N] {
    let mut m = [[C_ZERO; N]; N];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C_ONE;
    }
    m
}

pub(crate) fn matmul<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = [[C_ZERO; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            if aik == C_ZERO {
                continue;
            }
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub(crate) fn adjoint<const N: usize>(m: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = [[C_ZERO; N]; N];
    for i in 0..N {
        for j in 0..N {
            out[i][j] = m[j][i].conj();
        }
    }
    out
}

pub(crate) fn trace<const N: usize>(m: &[[C64; N]; N]) -> C64 {
    (0..N).map(|i| m[i][i]).sum()
}

/// Max entrywise deviation from Hermitian symmetry, max_ij |m_ij - conj(m_ji)|.
pub(crate) fn hermiticity_deviation<const N: usize>(m: &[[C64; N]; N]) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..N {
        for j in i..N {
            dev = dev.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    dev
}

pub(crate) fn frobenius_norm<const N: usize>(m: &[[C64; N]; N]) -> f64 {
    m.iter()
        .flatten()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn off_diagonal_norm<const N: usize>(m: &[[C64; N]; N]) -> f64 {
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                s += m[i][j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
/// `vectors` holds the eigenvectors as columns: column `c` belongs to `values[c]`.
pub(crate) struct Eigh<const N: usize> {
    pub values: [f64; N],
    pub vectors: [[C64; N]; N],
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation annihilates one off-diagonal pair; the phase of the pivot
/// entry is absorbed into the rotation so complex Hermitian input needs no
/// preliminary reduction. A matrix that is already diagonal is returned
/// untouched, eigenvectors exactly the standard basis.
pub(crate) fn jacobi_hermitian<const N: usize>(m: &[[C64; N]; N]) -> Eigh<N> {
    let mut a = *m;
    let mut v = identity::<N>();
    let tol = JACOBI_TOL * frobenius_norm(m).max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= tol {
            break;
        }
        for p in 0..N - 1 {
            for q in p + 1..N {
                let apq = a[p][q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                // unit phase of the pivot; division keeps real input exactly real
                let u = apq / mag;
                let tau = (a[q][q].re - a[p][p].re) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let su = u * s;
                let suc = u.conj() * s;

                let app = a[p][p].re + t * mag;
                let aqq = a[q][q].re - t * mag;
                a[p][p] = C64::new(app, 0.0);
                a[q][q] = C64::new(aqq, 0.0);
                a[p][q] = C_ZERO;
                a[q][p] = C_ZERO;
                for k in 0..N {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = akp * c + akq * suc;
                    a[k][q] = akq * c - akp * su;
                    a[p][k] = a[k][p].conj();
                    a[q][k] = a[k][q].conj();
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = vkp * c + vkq * suc;
                    row[q] = vkq * c - vkp * su;
                }
            }
        }
    }

    let mut order: [usize; N] = core::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[i][i].re.total_cmp(&a[j][j].re));
    let mut values = [0.0; N];
    let mut vectors = [[C_ZERO; N]; N];
    for (c, &src) in order.iter().enumerate() {
        values[c] = a[src][src].re;
        for r in 0..N {
            vectors[r][c] = v[r][src];
        }
    }
    Eigh { values, vectors }
}

/// Eigenvalues (ascending) of a real symmetric 3x3 matrix.
pub(crate) fn symmetric3_eigenvalues(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let mut cm = [[C_ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            cm[i][j] = C64::new(m[i][j], 0.0);
        }
    }
    jacobi_hermitian(&cm).values
}

/// Eigenvalues (ascending) of a 2x2 Hermitian matrix, in closed form.
pub(crate) fn hermitian2_eigenvalues(m: &[[C64; 2]; 2]) -> [f64; 2] {
    let half_tr = 0.5 * (m[0][0].re + m[1][1].re);
    let half_gap = 0.5 * (m[0][0].re - m[1][1].re);
    let r = (half_gap * half_gap + m[0][1].norm_sqr()).sqrt();
    [half_tr - r, half_tr + r]
}

/// Kronecker product of two 2x2 matrices in the |ab> ordering (first factor
/// = left qubit).
pub(crate) fn kron2(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 4]; 4] {
    let mut out = [[C_ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}
