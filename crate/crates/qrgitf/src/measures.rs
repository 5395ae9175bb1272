//! Seven quantum-correlation quantifiers for the block ground state, each in
//! two independent routes: a closed form in the (flowed) field, and a
//! definition-level oracle that works on arbitrary two-qubit states. The
//! oracles exist to arbitrate the closed forms numerically, so they never
//! share a code path with them.
//!
//! Unit conventions follow the saturation values: discord and disturbance in
//! bits, the deficit in nats, everything else dimensionless.
//!
//! The CHSH closed form is the Horodecki value 2 sqrt(1 + 1/(g^2+1)); its
//! popular "fully simplified" variant 2 sqrt(2)/sqrt(g^2+1) fails the known
//! disordered-phase limit of 2 and is deliberately not used. Output metadata
//! labels the convention (`chsh_convention: horodecki`).

use std::f64::consts::{LN_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{hermitian2_eigenvalues, kron2, symmetric3_eigenvalues, C64};
use crate::qcore::{
    basis_vectors, trace_norm, EntropyBase, MeasurementBasis, Subsystem, TwoQubitDensityMatrix,
};
use crate::rgflow::{FlowedCoupling, Saturation};

/// Identifier of a correlation measure. Discord and disturbance share one
/// closed form on this state family, as do the measurement-induced
/// nonlocality and the geometric discord.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureId {
    Negativity,
    Discord,
    Mid,
    Min,
    Gqd,
    QuantumDeficit,
    Chsh,
}

impl MeasureId {
    pub const ALL: [MeasureId; 7] = [
        MeasureId::Negativity,
        MeasureId::Discord,
        MeasureId::Mid,
        MeasureId::Min,
        MeasureId::Gqd,
        MeasureId::QuantumDeficit,
        MeasureId::Chsh,
    ];

    /// Short stable key used in CLI arguments and file output.
    pub fn key(&self) -> &'static str {
        match self {
            MeasureId::Negativity => "neg",
            MeasureId::Discord => "qd",
            MeasureId::Mid => "mid",
            MeasureId::Min => "min",
            MeasureId::Gqd => "gqd",
            MeasureId::QuantumDeficit => "qde",
            MeasureId::Chsh => "chsh",
        }
    }

    pub fn units(&self) -> Units {
        match self {
            MeasureId::Discord | MeasureId::Mid => Units::Bits,
            MeasureId::QuantumDeficit => Units::Nats,
            _ => Units::Dimensionless,
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.key() == s)
            .ok_or_else(|| Error::Configuration(format!("unknown measure id `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Bits,
    Nats,
    Dimensionless,
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::Bits => "bits",
            Units::Nats => "nats",
            Units::Dimensionless => "dimensionless",
        })
    }
}

/// A measure evaluation together with its unit convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    pub units: Units,
}

/// Amplitude data of the ground state at a given log field, evaluated in a
/// form that stays finite over the whole unsaturated window |ln g| <= 690:
/// beta^2 = 1 / (2 s sqrt(g^2+1)) is taken through logs (ln s = asinh g), and
/// 1/sqrt(g^2+1) through `hypot`.
struct FieldProfile {
    alpha_sq: f64,
    beta_sq: f64,
    ln_alpha_sq: f64,
    ln_beta_sq: f64,
    /// 1 / sqrt(g^2 + 1) = 2 alpha beta
    inv_hyp: f64,
}

impl FieldProfile {
    fn from_log_field(log_g: f64) -> Self {
        let g = log_g.exp();
        let inv_hyp = 1.0 / g.hypot(1.0);
        let ln_hyp = if log_g > 0.0 {
            log_g + 0.5 * (-2.0 * log_g).exp().ln_1p()
        } else {
            0.5 * (g * g).ln_1p()
        };
        let ln_beta_sq = -LN_2 - g.asinh() - ln_hyp;
        let beta_sq = ln_beta_sq.exp();
        let alpha_sq = 1.0 - beta_sq;
        let ln_alpha_sq = (-beta_sq).ln_1p();
        Self {
            alpha_sq,
            beta_sq,
            ln_alpha_sq,
            ln_beta_sq,
            inv_hyp,
        }
    }

    /// -alpha^2 ln alpha^2 - beta^2 ln beta^2, the marginal entropy in nats.
    fn marginal_entropy_nats(&self) -> f64 {
        let mut s = -self.alpha_sq * self.ln_alpha_sq;
        if self.beta_sq > 0.0 {
            s -= self.beta_sq * self.ln_beta_sq;
        }
        s
    }
}

/// Negativity 1 / (2 sqrt(g^2 + 1)); 1/2 in the ordered limit, 0 in the
/// disordered limit.
pub fn negativity_closed(c: &FlowedCoupling) -> MeasureValue {
    let value = match c.saturation() {
        Saturation::Ordered => 0.5,
        Saturation::Disordered => 0.0,
        Saturation::None => 0.5 * FieldProfile::from_log_field(c.log_g()).inv_hyp,
    };
    MeasureValue {
        value,
        units: Units::Dimensionless,
    }
}

/// Discord and measurement-induced disturbance (equal on this family):
/// -alpha^2 log2 alpha^2 - beta^2 log2 beta^2 bits, which is h((beta^2-alpha^2)^2).
pub fn discord_mid_closed(c: &FlowedCoupling) -> MeasureValue {
    let value = match c.saturation() {
        Saturation::Ordered => 1.0,
        Saturation::Disordered => 0.0,
        Saturation::None => {
            FieldProfile::from_log_field(c.log_g()).marginal_entropy_nats() / LN_2
        }
    };
    MeasureValue {
        value,
        units: Units::Bits,
    }
}

/// Measurement-induced nonlocality and geometric discord (equal on this
/// family): 1 / (2 (1 + g^2)) = 2 alpha^2 beta^2.
pub fn min_gqd_closed(c: &FlowedCoupling) -> MeasureValue {
    let value = match c.saturation() {
        Saturation::Ordered => 0.5,
        Saturation::Disordered => 0.0,
        Saturation::None => {
            let inv = FieldProfile::from_log_field(c.log_g()).inv_hyp;
            0.5 * inv * inv
        }
    };
    MeasureValue {
        value,
        units: Units::Dimensionless,
    }
}

/// Quantum deficit -alpha^2 ln alpha^2 - beta^2 ln beta^2 nats; equals
/// ln 2 times the discord by construction.
pub fn quantum_deficit_closed(c: &FlowedCoupling) -> MeasureValue {
    let value = match c.saturation() {
        Saturation::Ordered => LN_2,
        Saturation::Disordered => 0.0,
        Saturation::None => FieldProfile::from_log_field(c.log_g()).marginal_entropy_nats(),
    };
    MeasureValue {
        value,
        units: Units::Nats,
    }
}

/// Maximal CHSH expectation 2 sqrt(1 + 1/(g^2+1)): the Tsirelson bound
/// 2 sqrt(2) in the ordered limit, the classical bound 2 in the disordered
/// limit.
pub fn chsh_max_closed(c: &FlowedCoupling) -> MeasureValue {
    let value = match c.saturation() {
        Saturation::Ordered => 2.0 * SQRT_2,
        Saturation::Disordered => 2.0,
        Saturation::None => {
            let inv = FieldProfile::from_log_field(c.log_g()).inv_hyp;
            2.0 * (1.0 + inv * inv).sqrt()
        }
    };
    MeasureValue {
        value,
        units: Units::Dimensionless,
    }
}

/// Closed form of any measure at a flowed coupling.
pub fn closed_form(id: MeasureId, c: &FlowedCoupling) -> MeasureValue {
    match id {
        MeasureId::Negativity => negativity_closed(c),
        MeasureId::Discord | MeasureId::Mid => {
            let mut v = discord_mid_closed(c);
            v.units = id.units();
            v
        }
        MeasureId::Min | MeasureId::Gqd => min_gqd_closed(c),
        MeasureId::QuantumDeficit => quantum_deficit_closed(c),
        MeasureId::Chsh => chsh_max_closed(c),
    }
}

// ---------------------------------------------------------------------------
// definition-level oracles
// ---------------------------------------------------------------------------

/// Negativity from its definition: (||rho^T_A||_1 - 1) / 2.
pub fn oracle_negativity(rho: &TwoQubitDensityMatrix) -> f64 {
    let pt = rho.partial_transpose(Subsystem::A);
    let norm = trace_norm(&pt).expect("partial transpose of a state is Hermitian");
    ((norm - 1.0) / 2.0).max(0.0)
}

/// Quantum discord via minimization of the conditional entropy over
/// projective measurements on B: a (resolution x 2 resolution) grid over the
/// Bloch sphere followed by three refinement rounds, each shrinking the
/// search window tenfold around the best point.
///
/// `resolution` must be at least 8; 64 reaches ~1e-6 of the optimum on
/// smooth families.
pub fn oracle_discord(rho: &TwoQubitDensityMatrix, resolution: usize) -> Result<f64> {
    if resolution < 8 {
        return Err(Error::Configuration(format!(
            "discord search resolution must be >= 8, got {resolution}"
        )));
    }
    let s_b = rho
        .partial_trace(Subsystem::B)
        .von_neumann_entropy(EntropyBase::Bits);
    let s_ab = rho.von_neumann_entropy(EntropyBase::Bits);

    let n_theta = resolution;
    let n_phi = 2 * resolution;
    let d_theta = PI / (n_theta - 1) as f64;
    let d_phi = 2.0 * PI / n_phi as f64;

    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..n_theta {
        let theta = i as f64 * d_theta;
        for j in 0..n_phi {
            let phi = j as f64 * d_phi;
            let v = conditional_entropy_bits(rho, theta, phi);
            if v < best.0 {
                best = (v, theta, phi);
            }
        }
    }

    let mut w_theta = d_theta;
    let mut w_phi = d_phi;
    for _ in 0..3 {
        let (_, t0, p0) = best;
        for i in -8i32..=8 {
            for j in -8i32..=8 {
                let theta = (t0 + i as f64 * w_theta / 8.0).clamp(0.0, PI);
                let phi = p0 + j as f64 * w_phi / 8.0;
                let v = conditional_entropy_bits(rho, theta, phi);
                if v < best.0 {
                    best = (v, theta, phi);
                }
            }
        }
        w_theta /= 10.0;
        w_phi /= 10.0;
    }

    Ok((s_b - s_ab + best.0).max(0.0))
}

/// sum_k p_k S(rho_A | outcome k) for a measurement of B along (theta, phi).
fn conditional_entropy_bits(rho: &TwoQubitDensityMatrix, theta: f64, phi: f64) -> f64 {
    let e = rho.matrix().entries();
    let mut total = 0.0;
    for v in basis_vectors(theta, phi) {
        // unnormalized post-measurement state of A:
        // A[i][j] = sum_mn conj(v_m) rho[(i,m),(j,n)] v_n
        let mut a = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for m in 0..2 {
                    for n in 0..2 {
                        acc += v[m].conj() * e[2 * i + m][2 * j + n] * v[n];
                    }
                }
                a[i][j] = acc;
            }
        }
        let p = a[0][0].re + a[1][1].re;
        if p > 1e-15 {
            let evals = hermitian2_eigenvalues(&a);
            let mut s = 0.0;
            for lam in evals {
                let q = crate::qcore::clamp_probability(lam / p);
                if q > 0.0 {
                    s -= q * q.log2();
                }
            }
            total += p * s;
        }
    }
    total
}

fn marginal_bases(rho: &TwoQubitDensityMatrix) -> (MeasurementBasis, MeasurementBasis) {
    // degenerate marginals keep the computational basis, the limit of the
    // marginal eigenbasis from g > 0 on this family
    let ba = rho
        .partial_trace(Subsystem::A)
        .eigenbasis()
        .unwrap_or_else(MeasurementBasis::computational);
    let bb = rho
        .partial_trace(Subsystem::B)
        .eigenbasis()
        .unwrap_or_else(MeasurementBasis::computational);
    (ba, bb)
}

/// Measurement-induced disturbance: mutual information lost under dephasing
/// in the marginal eigenbases.
pub fn oracle_mid(rho: &TwoQubitDensityMatrix) -> f64 {
    let (ba, bb) = marginal_bases(rho);
    let dephased = rho.dephase_in_product_basis(&ba, &bb);
    (rho.mutual_information(EntropyBase::Bits) - dephased.mutual_information(EntropyBase::Bits))
        .max(0.0)
}

/// Measurement-induced nonlocality and geometric discord from the Bloch data:
/// MIN = (||T||^2 - lambda_min(T T^t)) / 4 when a = 0, else
/// (||T||^2 - a^t T T^t a / ||a||^2) / 4;
/// GQD = (||a||^2 + ||T||^2 - lambda_max(a a^t + T T^t)) / 4.
pub fn oracle_min_gqd(rho: &TwoQubitDensityMatrix) -> (f64, f64) {
    let bd = rho.bloch_decompose();
    let a = bd.a;
    let t = bd.t;
    let mut tt = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            tt[i][j] = (0..3).map(|k| t[i][k] * t[j][k]).sum();
        }
    }
    let norm_t_sq: f64 = t.iter().flatten().map(|x| x * x).sum();
    let a_sq = a.iter().map(|x| x * x).sum::<f64>();

    let min = if a_sq <= 1e-24 {
        0.25 * (norm_t_sq - symmetric3_eigenvalues(&tt)[0])
    } else {
        let mut quad = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                quad += a[i] * tt[i][j] * a[j];
            }
        }
        0.25 * (norm_t_sq - quad / a_sq)
    };

    let mut m = tt;
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] += a[i] * a[j];
        }
    }
    let gqd = 0.25 * (a_sq + norm_t_sq - symmetric3_eigenvalues(&m)[2]);
    (min.max(0.0), gqd.max(0.0))
}

/// Quantum deficit from its spectral definition,
/// sum_i lambda_i ln lambda_i - sum_ab P_ab ln P_ab, with P_ab the diagonal
/// weights of the state in the marginal-eigenbasis product frame.
pub fn oracle_quantum_deficit(rho: &TwoQubitDensityMatrix) -> f64 {
    let mut acc = 0.0;
    for lam in rho.eigenvalues() {
        let lam = crate::qcore::clamp_probability(lam);
        if lam > 0.0 {
            acc += lam * lam.ln();
        }
    }
    let (ba, bb) = marginal_bases(rho);
    let pa = ba.projectors();
    let pb = bb.projectors();
    let e = rho.matrix().entries();
    for proj_a in &pa {
        for proj_b in &pb {
            let p4 = kron2(proj_a, proj_b);
            let mut w = 0.0;
            for r in 0..4 {
                for k in 0..4 {
                    w += (e[r][k] * p4[k][r]).re;
                }
            }
            let w = crate::qcore::clamp_probability(w);
            if w > 0.0 {
                acc -= w * w.ln();
            }
        }
    }
    acc.max(0.0)
}

/// Maximal CHSH expectation by the Horodecki criterion:
/// 2 sqrt(u1 + u2) with u1 >= u2 the largest eigenvalues of T^t T.
pub fn oracle_chsh(rho: &TwoQubitDensityMatrix) -> f64 {
    let t = rho.bloch_decompose().t;
    let mut ttt = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ttt[i][j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let w = symmetric3_eigenvalues(&ttt);
    2.0 * (w[2].max(0.0) + w[1].max(0.0)).sqrt()
}

/// Maximal CHSH expectation by direct search over the measurement vectors:
/// for fixed b, b' the optimal a, a' align with T(b + b') and T(b - b'), so
/// the objective is ||T(b+b')|| + ||T(b-b')||, gridded over both directions
/// and refined three times with a tenfold-shrinking window.
pub fn oracle_chsh_direct(rho: &TwoQubitDensityMatrix) -> f64 {
    let t = rho.bloch_decompose().t;
    let objective = |tb: f64, pb: f64, tb2: f64, pb2: f64| -> f64 {
        let b = unit_vector(tb, pb);
        let b2 = unit_vector(tb2, pb2);
        let plus = apply3(&t, [b[0] + b2[0], b[1] + b2[1], b[2] + b2[2]]);
        let minus = apply3(&t, [b[0] - b2[0], b[1] - b2[1], b[2] - b2[2]]);
        norm3(plus) + norm3(minus)
    };

    let n_theta = 16usize;
    let n_phi = 16usize;
    let d_theta = PI / (n_theta - 1) as f64;
    let d_phi = 2.0 * PI / n_phi as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0, 0.0, 0.0);
    for i1 in 0..n_theta {
        for j1 in 0..n_phi {
            for i2 in 0..n_theta {
                for j2 in 0..n_phi {
                    let args = (
                        i1 as f64 * d_theta,
                        j1 as f64 * d_phi,
                        i2 as f64 * d_theta,
                        j2 as f64 * d_phi,
                    );
                    let v = objective(args.0, args.1, args.2, args.3);
                    if v > best.0 {
                        best = (v, args.0, args.1, args.2, args.3);
                    }
                }
            }
        }
    }

    let mut wt = d_theta;
    let mut wp = d_phi;
    for _ in 0..3 {
        let (_, t1, p1, t2, p2) = best;
        for i1 in -3i32..=3 {
            for j1 in -3i32..=3 {
                for i2 in -3i32..=3 {
                    for j2 in -3i32..=3 {
                        let args = (
                            t1 + i1 as f64 * wt / 3.0,
                            p1 + j1 as f64 * wp / 3.0,
                            t2 + i2 as f64 * wt / 3.0,
                            p2 + j2 as f64 * wp / 3.0,
                        );
                        let v = objective(args.0, args.1, args.2, args.3);
                        if v > best.0 {
                            best = (v, args.0, args.1, args.2, args.3);
                        }
                    }
                }
            }
        }
        wt /= 10.0;
        wp /= 10.0;
    }
    best.0
}

fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

fn apply3(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    core::array::from_fn(|i| (0..3).map(|j| m[i][j] * v[j]).sum())
}

fn norm3(v: [f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
