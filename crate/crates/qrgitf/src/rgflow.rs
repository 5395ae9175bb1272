//! Renormalization-group machinery for the transverse-field Ising chain with
//! two-site blocks: the exact block ground state, the coupling map
//! (J, g) -> (J / sqrt(g^2+1), g^2), an overflow-safe iterated flow in log
//! space, and a numerical verification that projecting the two-block operator
//! onto the block ground doublets reproduces the renormalized spectrum.

use crate::error::{Error, Result};
use crate::linalg::{jacobi_hermitian, kron2, C64, C_ONE, C_ZERO};
use crate::qcore::{identity2, pauli, pauli_x, pauli_z, ComplexMatrix4, TwoQubitDensityMatrix};

/// Once |ln g_n| exceeds this, measures are indistinguishable from their
/// phase limits at double precision and g_n itself would overflow soon after
/// (g^(2^n) leaves the f64 exponent range near n = 10 already for g = 2.5).
pub const SATURATION_LOG_THRESHOLD: f64 = 690.0;

/// Degeneracy tolerance of the block ground doublet, relative to the coupling.
const DOUBLET_TOL: f64 = 1e-10;

/// Bare couplings of the chain Hamiltonian: exchange J > 0 and dimensionless
/// transverse field g >= 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub j: f64,
    pub g: f64,
}

impl Coupling {
    pub fn new(j: f64, g: f64) -> Result<Self> {
        if !j.is_finite() || j <= 0.0 {
            return Err(Error::Domain(format!("exchange J must be finite and > 0, got {j}")));
        }
        if !g.is_finite() || g < 0.0 {
            return Err(Error::Domain(format!("field g must be finite and >= 0, got {g}")));
        }
        Ok(Self { j, g })
    }
}

/// One coarse-graining step: J' = J / sqrt(g^2 + 1) (equal to J 2s/(1+s^2)
/// with s = sqrt(g^2+1) + g), g' = g^2.
pub fn rg_map(c: Coupling) -> Coupling {
    Coupling {
        j: c.j / c.g.hypot(1.0),
        g: c.g * c.g,
    }
}

/// Phase label for a flow that has left the numerically resolvable window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Saturation {
    None,
    /// g_n -> 0: the long-range-ordered side.
    Ordered,
    /// g_n -> infinity: the paramagnetic side.
    Disordered,
}

/// The field after n flow steps, kept as log_g = 2^n ln(g0) so that deep
/// flows never overflow. `saturated` marks values beyond
/// [`SATURATION_LOG_THRESHOLD`], where the phase limits take over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowedCoupling {
    log_g: f64,
    n: u32,
    saturated: Saturation,
}

impl FlowedCoupling {
    pub fn log_g(&self) -> f64 {
        self.log_g
    }

    pub fn steps(&self) -> u32 {
        self.n
    }

    pub fn saturation(&self) -> Saturation {
        self.saturated
    }

    /// The flowed field g_n when it is representable.
    pub fn field(&self) -> Option<f64> {
        match self.saturated {
            Saturation::None => Some(self.log_g.exp()),
            Saturation::Ordered | Saturation::Disordered => None,
        }
    }
}

/// Iterate g' = g^2 for `n` steps from `g0`, in log space.
pub fn flow(g0: f64, n: u32) -> Result<FlowedCoupling> {
    if !g0.is_finite() || g0 < 0.0 {
        return Err(Error::Domain(format!("field g must be finite and >= 0, got {g0}")));
    }
    if g0 == 0.0 {
        // exact ordered fixed point at every step count
        return Ok(FlowedCoupling {
            log_g: -f64::MAX,
            n,
            saturated: Saturation::Ordered,
        });
    }
    let ln_g = g0.ln();
    if ln_g == 0.0 {
        // critical fixed point, exact at every step count
        return Ok(FlowedCoupling {
            log_g: 0.0,
            n,
            saturated: Saturation::None,
        });
    }
    // 2^n as f64 is exact until it overflows to infinity; the clamp below
    // then pins log_g at the representable extreme with the right sign
    let scale = if n < 2000 { 2.0f64.powi(n as i32) } else { f64::INFINITY };
    let log_g = scale * ln_g;
    let (log_g, saturated) = if log_g < -SATURATION_LOG_THRESHOLD {
        (log_g.max(-f64::MAX), Saturation::Ordered)
    } else if log_g > SATURATION_LOG_THRESHOLD {
        (log_g.min(f64::MAX), Saturation::Disordered)
    } else {
        (log_g, Saturation::None)
    };
    Ok(FlowedCoupling { log_g, n, saturated })
}

/// The exact block ground state: amplitudes (alpha, beta), the auxiliary
/// s = sqrt(g^2+1) + g, and the 4x4 density matrix with beta^2 and alpha^2 on
/// the outer diagonal corners and alpha beta coherences.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub alpha: f64,
    pub beta: f64,
    pub s: f64,
    pub rho: TwoQubitDensityMatrix,
}

/// Ground state at field g >= 0.
pub fn ground_state(g: f64) -> Result<GroundState> {
    if !g.is_finite() || g < 0.0 {
        return Err(Error::Domain(format!("field g must be finite and >= 0, got {g}")));
    }
    let s = g + g.hypot(1.0);
    let hyp_s = s.hypot(1.0);
    Ok(build_ground_state(s / hyp_s, 1.0 / hyp_s, s))
}

/// Ground state of a flowed field, using the exact phase limits once the flow
/// has saturated. The disordered limit carries `s = infinity` along with
/// alpha = 1, beta = 0.
pub fn ground_state_flowed(c: &FlowedCoupling) -> GroundState {
    match c.saturation() {
        Saturation::None => {
            ground_state(c.log_g().exp()).expect("unsaturated flow carries a finite field")
        }
        Saturation::Ordered => build_ground_state(
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::FRAC_1_SQRT_2,
            1.0,
        ),
        Saturation::Disordered => build_ground_state(1.0, 0.0, f64::INFINITY),
    }
}

fn build_ground_state(alpha: f64, beta: f64, s: f64) -> GroundState {
    let mut e = [[C_ZERO; 4]; 4];
    e[0][0] = C64::new(beta * beta, 0.0);
    e[3][3] = C64::new(alpha * alpha, 0.0);
    e[0][3] = C64::new(alpha * beta, 0.0);
    e[3][0] = e[0][3];
    let rho =
        TwoQubitDensityMatrix::from_matrix_unchecked(ComplexMatrix4::from_entries_unchecked(e));
    GroundState { alpha, beta, s, rho }
}

/// Outcome of the two-block projection check. The spectrum test compares
/// `half_gap` to `predicted_half_gap` = J' sqrt(1 + g'^2); it is invariant
/// under the unitary freedom inside each degenerate doublet. The Pauli
/// coefficients of the effective operator are diagnostic only.
#[derive(Debug, Clone)]
pub struct ProjectionReport {
    pub half_gap: f64,
    pub predicted_half_gap: f64,
    /// Eigenvalues of the projected operator, ascending; they form two doubly
    /// degenerate levels.
    pub effective_eigenvalues: [f64; 4],
    /// coefficients[i][j] of sigma_i x sigma_j (index 0 = identity) in the
    /// projected operator.
    pub pauli_coefficients: [[f64; 4]; 4],
}

/// Build the two-block operator H^B + H^BB on four sites, project it onto the
/// product of the block ground doublets, and compare the effective spectrum
/// with the coupling map prediction.
///
/// The field split is asymmetric: each block carries the field on its first
/// site through H^B, and the inter-block bond carries the field on the
/// block's second site through H^BB. With blocks (1,2) and (3,4) the operator
/// is -J (s1z s2z + g s1x) - J (s3z s4z + g s3x) - J (s2z s3z + g s2x).
pub fn verify_effective_hamiltonian(c: Coupling) -> Result<ProjectionReport> {
    let Coupling { j, g } = c;

    // block Hamiltonian -J (sz sz + g sx x I) and its ground doublet
    let mut block = [[C_ZERO; 4]; 4];
    let zz = kron2(&pauli_z(), &pauli_z());
    let xi = kron2(&pauli_x(), &identity2());
    for r in 0..4 {
        for col in 0..4 {
            block[r][col] = -(zz[r][col] + xi[r][col] * g) * j;
        }
    }
    let eig = jacobi_hermitian(&block);
    let scale = j * (1.0 + g).max(1.0);
    if (eig.values[1] - eig.values[0]).abs() > DOUBLET_TOL * scale {
        return Err(Error::Structure(format!(
            "block ground doublet is split by {:.3e}; the block operator is wrong",
            eig.values[1] - eig.values[0]
        )));
    }
    if eig.values[2] - eig.values[0] <= DOUBLET_TOL * scale {
        return Err(Error::Structure(
            "block spectrum is not a pair of separated doublets".into(),
        ));
    }

    let h = two_block_operator(j, g);

    // isometry onto doublet (x) doublet, columns ordered |00>,|01>,|10>,|11>
    // of the effective pair of sites
    let mut p0 = [[C_ZERO; 4]; 16];
    for a in 0..2 {
        for b in 0..2 {
            for r1 in 0..4 {
                for r2 in 0..4 {
                    p0[4 * r1 + r2][2 * a + b] = eig.vectors[r1][a] * eig.vectors[r2][b];
                }
            }
        }
    }

    // effective operator P0† H P0
    let mut hp = [[C_ZERO; 4]; 16];
    for r in 0..16 {
        for c2 in 0..4 {
            let mut acc = C_ZERO;
            for k in 0..16 {
                acc += h[r][k] * p0[k][c2];
            }
            hp[r][c2] = acc;
        }
    }
    let mut heff = [[C_ZERO; 4]; 4];
    for c1 in 0..4 {
        for c2 in 0..4 {
            let mut acc = C_ZERO;
            for r in 0..16 {
                acc += p0[r][c1].conj() * hp[r][c2];
            }
            heff[c1][c2] = acc;
        }
    }

    let eff = jacobi_hermitian(&heff);
    let values = eff.values;
    if (values[1] - values[0]).abs() > DOUBLET_TOL * scale
        || (values[3] - values[2]).abs() > DOUBLET_TOL * scale
    {
        return Err(Error::Structure(format!(
            "effective spectrum {values:?} does not form two degenerate doublets"
        )));
    }

    let renormalized = rg_map(c);
    let predicted = renormalized.j * renormalized.g.hypot(1.0);

    let mut pauli_coefficients = [[0.0; 4]; 4];
    for (i, row) in pauli_coefficients.iter_mut().enumerate() {
        for (jj, out) in row.iter_mut().enumerate() {
            let op = kron2(&pauli(i), &pauli(jj));
            let mut tr = C_ZERO;
            for r in 0..4 {
                for k in 0..4 {
                    tr += heff[r][k] * op[k][r];
                }
            }
            *out = tr.re / 4.0;
        }
    }

    Ok(ProjectionReport {
        half_gap: 0.5 * (values[3] - values[0]),
        predicted_half_gap: predicted,
        effective_eigenvalues: values,
        pauli_coefficients,
    })
}

/// -J (s1z s2z + g s1x) - J (s3z s4z + g s3x) - J (s2z s3z + g s2x) on 16 dims.
fn two_block_operator(j: f64, g: f64) -> [[C64; 16]; 16] {
    let i2 = identity2();
    let x = pauli_x();
    let z = pauli_z();
    let mut h = [[C_ZERO; 16]; 16];
    let mut add = |ops: [&[[C64; 2]; 2]; 4], w: f64| {
        for (r, row) in h.iter_mut().enumerate() {
            for (c, out) in row.iter_mut().enumerate() {
                let mut v = C_ONE;
                for (k, op) in ops.iter().enumerate() {
                    let rk = (r >> (3 - k)) & 1;
                    let ck = (c >> (3 - k)) & 1;
                    v *= op[rk][ck];
                }
                *out += v * w;
            }
        }
    };
    add([&z, &z, &i2, &i2], -j);
    add([&x, &i2, &i2, &i2], -j * g);
    add([&i2, &i2, &z, &z], -j);
    add([&i2, &i2, &x, &i2], -j * g);
    add([&i2, &z, &z, &i2], -j);
    add([&i2, &x, &i2, &i2], -j * g);
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_at_symmetric_point_is_bell() {
        let gs = ground_state(0.0).unwrap();
        assert_eq!(gs.s, 1.0);
        assert!((gs.alpha - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((gs.beta - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((gs.rho.matrix().get(0, 3).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ground_state_at_critical_field() {
        let gs = ground_state(1.0).unwrap();
        assert!((gs.s - 2.414213562373095).abs() < 1e-14);
        assert!((gs.alpha * gs.alpha - 0.8535533905932737).abs() < 1e-13);
        assert!((gs.beta * gs.beta - 0.14644660940672624).abs() < 1e-13);
        assert!((gs.alpha * gs.alpha + gs.beta * gs.beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_state_rejects_bad_fields() {
        assert!(ground_state(-0.5).is_err());
        assert!(ground_state(f64::NAN).is_err());
        assert!(ground_state(f64::INFINITY).is_err());
    }

    #[test]
    fn ground_state_amplitude_identity() {
        // alpha^2 - beta^2 = g / sqrt(g^2 + 1)
        for g in [0.0, 0.1, 0.5, 1.0, 3.0, 40.0] {
            let gs = ground_state(g).unwrap();
            let lhs = gs.alpha * gs.alpha - gs.beta * gs.beta;
            assert!((lhs - g / g.hypot(1.0)).abs() < 1e-12, "g = {g}");
        }
    }

    #[test]
    fn ground_state_purity_is_one() {
        for g in [0.0, 0.4, 1.0, 2.5, 100.0] {
            assert!((ground_state(g).unwrap().rho.purity() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rg_map_values() {
        let c = rg_map(Coupling::new(1.0, 0.0).unwrap());
        assert_eq!(c.j, 1.0);
        assert_eq!(c.g, 0.0);

        let c = rg_map(Coupling::new(1.0, 1.0).unwrap());
        assert!((c.j - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(c.g, 1.0);

        let c = rg_map(Coupling::new(2.0, 2.0).unwrap());
        assert!((c.j - 2.0 * 0.4472135954999579).abs() < 1e-15);
        assert_eq!(c.g, 4.0);

        // J' agrees with the J 2s/(1+s^2) form
        for g in [0.2f64, 0.7, 1.0, 3.3] {
            let s = g + g.hypot(1.0);
            let alt = 2.0 * s / (1.0 + s * s);
            let c = rg_map(Coupling::new(1.0, g).unwrap());
            assert!((c.j - alt).abs() < 1e-14);
        }
    }

    #[test]
    fn rg_map_fixed_points_and_instability() {
        // fixed points of g' = g^2 on [0, inf) are exactly 0 and 1
        for g in [0.0f64, 1.0] {
            assert_eq!(rg_map(Coupling::new(1.0, g).unwrap()).g, g);
        }
        for g in [0.3f64, 0.9, 1.1, 2.0] {
            assert_ne!(rg_map(Coupling::new(1.0, g).unwrap()).g, g);
        }
        // |d g'/dg| at g = 1 is 2 (> 1, unstable), by central difference
        let h = 1e-6;
        let d = (rg_map(Coupling::new(1.0, 1.0 + h).unwrap()).g
            - rg_map(Coupling::new(1.0, 1.0 - h).unwrap()).g)
            / (2.0 * h);
        assert!((d - 2.0).abs() < 1e-9);
    }

    #[test]
    fn coupling_validation() {
        assert!(Coupling::new(0.0, 1.0).is_err());
        assert!(Coupling::new(-1.0, 1.0).is_err());
        assert!(Coupling::new(1.0, -0.1).is_err());
        assert!(Coupling::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn flow_fixed_point_is_exact() {
        for n in [0, 1, 7, 200, 100_000] {
            let fc = flow(1.0, n).unwrap();
            assert_eq!(fc.log_g(), 0.0);
            assert_eq!(fc.saturation(), Saturation::None);
        }
    }

    #[test]
    fn flow_iterates_squaring() {
        let fc = flow(0.5, 3).unwrap();
        assert_eq!(fc.saturation(), Saturation::None);
        let g = fc.field().unwrap();
        assert!((g - 0.00390625).abs() / 0.00390625 < 1e-14);
    }

    #[test]
    fn flow_saturates_disordered() {
        let fc = flow(1.5, 11).unwrap();
        assert_eq!(fc.saturation(), Saturation::Disordered);
        assert!((fc.log_g() - 2048.0 * 1.5f64.ln()).abs() < 1e-9);
        assert!(fc.field().is_none());
    }

    #[test]
    fn flow_saturates_ordered_and_handles_zero() {
        let fc = flow(0.7, 40).unwrap();
        assert_eq!(fc.saturation(), Saturation::Ordered);
        let fc = flow(0.0, 5).unwrap();
        assert_eq!(fc.saturation(), Saturation::Ordered);
        let fc = flow(0.0, 0).unwrap();
        assert_eq!(fc.saturation(), Saturation::Ordered);
        assert!(flow(-1.0, 2).is_err());
        assert!(flow(f64::NAN, 2).is_err());
    }

    #[test]
    fn flow_is_monotone_away_from_criticality() {
        for g0 in [0.2, 0.9, 0.99] {
            let mut prev = flow(g0, 0).unwrap().log_g();
            for n in 1..=20 {
                let cur = flow(g0, n).unwrap().log_g();
                assert!(cur < prev, "g0 = {g0}, n = {n}");
                prev = cur;
            }
        }
        for g0 in [1.01, 1.5, 2.5] {
            let mut prev = flow(g0, 0).unwrap().log_g();
            for n in 1..=20 {
                let cur = flow(g0, n).unwrap().log_g();
                assert!(cur > prev, "g0 = {g0}, n = {n}");
                prev = cur;
            }
        }
    }

    #[test]
    fn flowed_ground_state_limits() {
        let ordered = ground_state_flowed(&flow(0.5, 30).unwrap());
        assert!((ordered.alpha - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((ordered.rho.matrix().get(0, 3).re - 0.5).abs() < 1e-15);

        let disordered = ground_state_flowed(&flow(1.5, 30).unwrap());
        assert_eq!(disordered.alpha, 1.0);
        assert_eq!(disordered.beta, 0.0);
        // a computational product projector: every correlation measure vanishes
        assert_eq!(disordered.rho.matrix().get(3, 3).re, 1.0);
        assert_eq!(disordered.rho.matrix().get(0, 0).re, 0.0);
        assert!(disordered.s.is_infinite());

        let plain = ground_state_flowed(&flow(0.8, 2).unwrap());
        let direct = ground_state(0.8f64.powi(4)).unwrap();
        assert!((plain.alpha - direct.alpha).abs() < 1e-12);
    }

    #[test]
    fn projection_check_matches_coupling_map() {
        for g in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
            let report = verify_effective_hamiltonian(Coupling::new(1.0, g).unwrap()).unwrap();
            assert!(
                (report.half_gap - report.predicted_half_gap).abs() < 1e-10,
                "g = {g}: {} vs {}",
                report.half_gap,
                report.predicted_half_gap
            );
        }
        // scale covariance in J
        let report = verify_effective_hamiltonian(Coupling::new(2.5, 2.0).unwrap()).unwrap();
        assert!((report.half_gap - 2.5 * (17.0f64 / 5.0).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn projection_report_values() {
        let r = verify_effective_hamiltonian(Coupling::new(1.0, 0.0).unwrap()).unwrap();
        assert!((r.half_gap - 1.0).abs() < 1e-12);
        let r = verify_effective_hamiltonian(Coupling::new(1.0, 1.0).unwrap()).unwrap();
        assert!((r.half_gap - 1.0).abs() < 1e-12);
        let r = verify_effective_hamiltonian(Coupling::new(1.0, 2.0).unwrap()).unwrap();
        assert!((r.half_gap - 1.8439088914585775).abs() < 1e-12);
        // doubly degenerate effective levels
        let e = r.effective_eigenvalues;
        assert!((e[1] - e[0]).abs() < 1e-10 && (e[3] - e[2]).abs() < 1e-10);
        // identity component equals the mean level; traceless part is bounded
        // by the half gap
        let mean = e.iter().sum::<f64>() / 4.0;
        assert!((r.pauli_coefficients[0][0] - mean).abs() < 1e-10);
    }
}
