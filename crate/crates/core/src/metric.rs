//! Lip-norms, spectral-distance lower bounds, and the Orlicz transport
//! inequality check.
//!
//! `L(a)` is the operator norm of the commutator `[Delta^{1/2}, a]` on the
//! truncation, with `Delta^{1/2}` the positive square root
//! (`omega_n = 2 pi |n|`). The spectral distance is estimated from below by
//! scaling candidates to the `L(a) = 1` sphere; `||L||_CB` is replaced by
//! the operational constant `K_hat = max ||a||_op / L(a)` over the evaluated
//! pool, and every report states the substitution. The trace pairing uses
//! the normalized trace `tau = Tr / |grid|`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::embed::inclusion_constant;
use crate::error::{Error, Result};
use crate::qtorus::{twisted_phase, LatticeGrid, MatrixRep, ThetaMatrix, TorusElement};
use crate::spectral::{operator_norm_of, singular_values};
use crate::verdict::Verdict;
use crate::young::YoungFunction;

/// Candidates with a Lip-norm below this are useless for distance bounds.
const LIP_FLOOR: f64 = 1e-12;
/// Chain-inequality slack accepted by the transport check.
const CHAIN_TOL: f64 = 1e-8;

/// Normalized state on the truncation: hermitian, positive semidefinite,
/// `tau(rho) = Tr(rho)/|grid| = 1`.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: MatrixRep,
}

impl DensityOperator {
    pub fn new(matrix: MatrixRep) -> Result<Self> {
        if !matrix.is_hermitian(1e-10) {
            return Err(Error::InvalidParameter(
                "density operator must be hermitian within 1e-10".into(),
            ));
        }
        let eig = nalgebra::SymmetricEigen::new(matrix.entries().clone());
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-10 {
            return Err(Error::NotPsd(min));
        }
        let m = matrix.dim() as f64;
        let tau = matrix.trace().re / m;
        if (tau - 1.0).abs() > 1e-10 || matrix.trace().im.abs() > 1e-10 * m {
            return Err(Error::InvalidParameter(format!(
                "density operator must have normalized trace 1, got {tau}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &MatrixRep {
        &self.matrix
    }

    pub fn grid(&self) -> &Arc<LatticeGrid> {
        self.matrix.grid()
    }

    /// Seeded random state: normalized complex Wishart.
    pub fn random(grid: &Arc<LatticeGrid>, seed: u64, label: u64) -> Result<Self> {
        let mut rng = crate::rng::stream(seed, label);
        let dim = grid.len();
        let g = DMatrix::from_fn(dim, dim, |_, _| crate::rng::complex_gaussian(&mut rng));
        let mut w = &g * g.adjoint();
        let tau = w.diagonal().iter().map(|c| c.re).sum::<f64>() / dim as f64;
        w /= Complex64::new(tau, 0.0);
        Self::new(MatrixRep::from_entries(Arc::clone(grid), w)?)
    }

    /// Serialize like a dense complex matrix: `{d, R, entries: [[re, im], ...]}`
    /// in row-major order.
    pub fn to_json(&self) -> String {
        let m = self.matrix.entries();
        let entries: Vec<[f64; 2]> = m.row_iter()
            .flat_map(|row| {
                row.iter()
                    .map(|c| [c.re, c.im])
                    .collect::<Vec<_>>()
            })
            .collect();
        let body = DensityJson {
            d: self.grid().dim(),
            radius: self.grid().radius(),
            entries,
        };
        serde_json::to_string(&body).expect("density serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let body: DensityJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("density JSON: {e}")))?;
        let grid = LatticeGrid::shared(body.d, body.radius)?;
        let dim = grid.len();
        if body.entries.len() != dim * dim {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries, got {}",
                dim * dim,
                body.entries.len()
            )));
        }
        let entries = DMatrix::from_fn(dim, dim, |i, j| {
            let [re, im] = body.entries[i * dim + j];
            Complex64::new(re, im)
        });
        Self::new(MatrixRep::from_entries(grid, entries)?)
    }
}

#[derive(Serialize, serde::Deserialize)]
struct DensityJson {
    d: usize,
    #[serde(rename = "R")]
    radius: i64,
    entries: Vec<[f64; 2]>,
}

fn omega(n: &[i64]) -> f64 {
    let sq: i64 = n.iter().map(|&x| x * x).sum();
    2.0 * PI * (sq as f64).sqrt()
}

/// Lip-norm `L(a) = || [Delta^{1/2}, a] ||`: largest singular value of the
/// commutator matrix `C[m, n] = a_{m-n} e^{2 pi i phi(m-n, n)} (omega_m - omega_n)`
/// on the grid block.
pub fn lip_norm(a: &TorusElement) -> Result<f64> {
    let m = commutator_matrix(a);
    operator_norm_of(&m)
}

fn commutator_matrix(a: &TorusElement) -> DMatrix<Complex64> {
    let grid = a.grid();
    let rep = a.matrix_rep();
    let omegas: Vec<f64> = (0..grid.len()).map(|i| omega(grid.point(i))).collect();
    let mut out = rep.entries().clone();
    for row in 0..grid.len() {
        for col in 0..grid.len() {
            out[(row, col)] *= Complex64::new(omegas[row] - omegas[col], 0.0);
        }
    }
    out
}

/// A pool candidate with its precomputed representation and norms.
#[derive(Debug, Clone)]
pub struct CandidateEval {
    pub element: TorusElement,
    matrix: MatrixRep,
    pub label: String,
    pub lip: f64,
    pub op_norm: f64,
}

/// Default candidate pool: every single mode `U^n` (n != 0) in the grid plus
/// `n_random` seeded random trace-zero elements.
pub fn default_pool(
    grid: &Arc<LatticeGrid>,
    theta: &ThetaMatrix,
    n_random: usize,
    seed: u64,
) -> Result<Vec<TorusElement>> {
    let mut pool = Vec::with_capacity(grid.len() - 1 + n_random);
    for i in 1..grid.len() {
        pool.push(TorusElement::monomial(
            Arc::clone(grid),
            theta.clone(),
            grid.point(i),
            Complex64::ONE,
        )?);
    }
    for label in 0..n_random {
        let mut rng = crate::rng::stream(seed, 0xd157 + label as u64);
        pool.push(TorusElement::random_trace_zero(
            Arc::clone(grid),
            theta.clone(),
            &mut rng,
        ));
    }
    Ok(pool)
}

/// Evaluate Lip and operator norms for each candidate, dropping Lip-null
/// ones (constants are projected out first).
pub fn evaluate_pool(pool: &[TorusElement]) -> Result<Vec<CandidateEval>> {
    let mut out = Vec::with_capacity(pool.len());
    for (i, a) in pool.iter().enumerate() {
        let mut a = a.clone();
        if a.trace() != Complex64::ZERO {
            let zero = vec![0i64; a.grid().dim()];
            let t = a.trace();
            let mut c = a.clone();
            c.set_coeff(&zero, a.coeff(&zero) - t)?;
            a = c;
        }
        let lip = lip_norm(&a)?;
        if lip <= LIP_FLOOR {
            continue;
        }
        let matrix = a.matrix_rep();
        let op_norm = operator_norm_of(matrix.entries())?;
        out.push(CandidateEval {
            element: a,
            matrix,
            label: format!("pool[{i}]"),
            lip,
            op_norm,
        });
    }
    Ok(out)
}

/// Operational surrogate for `||L||_CB`: the best `||a||_op / L(a)` over the
/// evaluated trace-zero pool. A certified lower bound for the true constant.
#[derive(Debug, Clone, Serialize)]
pub struct LipReport {
    pub k_hat: f64,
    pub pool_size: usize,
    pub best_label: String,
    /// States the `||L||_CB -> K_hat` substitution for every consumer.
    pub note: String,
}

pub fn lip_constant_estimate(pool: &[CandidateEval]) -> Result<LipReport> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let best = pool
        .iter()
        .max_by(|a, b| {
            (a.op_norm / a.lip)
                .partial_cmp(&(b.op_norm / b.lip))
                .expect("finite ratios")
        })
        .expect("nonempty pool");
    Ok(LipReport {
        k_hat: best.op_norm / best.lip,
        pool_size: pool.len(),
        best_label: best.label.clone(),
        note: "K_hat is the max of ||a||_op / L(a) over the evaluated pool, an \
               operational stand-in for the undefined cb-norm of the Lip map"
            .into(),
    })
}

/// Elementwise fit of a trace-zero element to a target matrix: average each
/// lattice diagonal of the target against the twisted-shift pattern.
fn fit_element(
    grid: &Arc<LatticeGrid>,
    theta: &ThetaMatrix,
    target: &DMatrix<Complex64>,
) -> Result<TorusElement> {
    let mut el = TorusElement::zero(Arc::clone(grid), theta.clone())?;
    let mut sum = vec![Complex64::ZERO; grid.len()];
    let mut count = vec![0usize; grid.len()];
    let mut diff = vec![0i64; grid.dim()];
    for row in 0..grid.len() {
        for col in 0..grid.len() {
            let r = grid.point(row);
            let n = grid.point(col);
            for (t, (&a, &b)) in diff.iter_mut().zip(r.iter().zip(n.iter())) {
                *t = a - b;
            }
            if let Some(qi) = grid.index_of(&diff) {
                // target[row, col] ~ a_q e^{2 pi i phi(q, n)}
                let phase = Complex64::cis(-2.0 * PI * twisted_phase(&diff, n, theta));
                sum[qi] += target[(row, col)] * phase;
                count[qi] += 1;
            }
        }
    }
    let coeffs: Vec<Complex64> = sum
        .iter()
        .zip(&count)
        .map(|(s, &c)| if c == 0 { Complex64::ZERO } else { s / c as f64 })
        .collect();
    for (i, &c) in coeffs.iter().enumerate() {
        if i == 0 {
            continue; // trace projected out
        }
        el.set_coeff(grid.point(i), c)?;
    }
    Ok(el)
}

/// Candidate adapted to the data: fit to `sign(rho - sigma)` from the
/// eigendecomposition of the difference.
pub fn data_adapted_candidate(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    theta: &ThetaMatrix,
) -> Result<Option<CandidateEval>> {
    let grid = rho.grid();
    let x = rho.matrix().sub(sigma.matrix())?;
    let eig = nalgebra::SymmetricEigen::new(x.entries().clone());
    let dim = grid.len();
    let mut sign = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim {
        let s = eig.eigenvalues[k].signum();
        if s == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        for i in 0..dim {
            for j in 0..dim {
                sign[(i, j)] += v[i] * Complex64::new(s, 0.0) * v[j].conj();
            }
        }
    }
    let el = fit_element(grid, theta, &sign)?;
    let lip = lip_norm(&el)?;
    if lip <= LIP_FLOOR {
        return Ok(None);
    }
    let matrix = el.matrix_rep();
    let op_norm = operator_norm_of(matrix.entries())?;
    Ok(Some(CandidateEval {
        element: el,
        matrix,
        label: "data-adapted sign fit".into(),
        lip,
        op_norm,
    }))
}

/// `|tau(a X)| = |tr(M(a) X)| / dim` via the O(n^2) trace of a product.
fn pairing(candidate: &CandidateEval, x: &MatrixRep) -> f64 {
    let a = candidate.matrix.entries();
    let b = x.entries();
    let n = b.nrows();
    let mut tr = Complex64::ZERO;
    for i in 0..n {
        for j in 0..n {
            tr += a[(i, j)] * b[(j, i)];
        }
    }
    (tr / n as f64).norm()
}

/// Certified lower bound for the spectral distance `d_L(rho, sigma)`:
/// the best `|tau(a (rho - sigma))| / L(a)` over the pool and the
/// data-adapted candidate.
pub fn spectral_distance_lower(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    pool: &[CandidateEval],
) -> Result<f64> {
    if rho.grid().dim() != sigma.grid().dim() || rho.grid().radius() != sigma.grid().radius() {
        return Err(Error::GridMismatch("density pair on different grids".into()));
    }
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let x = rho.matrix().sub(sigma.matrix())?;
    let theta = pool[0].element.theta().clone();
    let mut best = 0.0f64;
    for cand in pool {
        best = best.max(pairing(cand, &x) / cand.lip);
    }
    if let Some(cand) = data_adapted_candidate(rho, sigma, &theta)? {
        best = best.max(pairing(&cand, &x) / cand.lip);
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportOutcome {
    pub verdict: Verdict,
    pub distance_lower: f64,
    /// `||rho - sigma||_{S_Phi}` (unnormalized singular values).
    pub s_phi_norm: f64,
    /// Normalized trace norm `tau(|rho - sigma|)`.
    pub s1_tau_norm: f64,
    pub k_hat: f64,
    pub c_phi: f64,
    pub upper_bound: f64,
    /// Smallest slack across every candidate's three-factor chain.
    pub worst_chain_slack: f64,
    pub note: String,
}

/// Verify `d_L(rho, sigma) <= ||rho - sigma||_{S_Phi} K_hat c_Phi`, checking
/// the per-candidate chain
/// `|tau(a X)| <= ||a||_op tau(|X|) <= ||a||_op c_Phi ||X||_{S_Phi}`
/// term by term.
pub fn transport_check(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    phi: &YoungFunction,
    pool: &[CandidateEval],
) -> Result<TransportOutcome> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let x = rho.matrix().sub(sigma.matrix())?;
    let dim = x.dim();
    let sv = singular_values(&x)?;
    let s_phi_norm = crate::young::luxemburg_norm(sv.values(), phi)?;
    let s1_tau_norm = sv.values().iter().sum::<f64>() / dim as f64;
    let c_phi = inclusion_constant(phi, dim)?;

    let theta = pool[0].element.theta().clone();
    let mut candidates: Vec<CandidateEval> = pool.to_vec();
    if let Some(cand) = data_adapted_candidate(rho, sigma, &theta)? {
        candidates.push(cand);
    }
    let lip = lip_constant_estimate(&candidates)?;
    let k_hat = lip.k_hat;

    let mut distance_lower = 0.0f64;
    let mut worst_chain_slack = f64::INFINITY;
    let mut violating: Option<(String, f64)> = None;
    for cand in &candidates {
        let lhs = pairing(cand, &x);
        distance_lower = distance_lower.max(lhs / cand.lip);
        // chain link 1: |tau(aX)| <= ||a||_op tau(|X|)
        let link1 = cand.op_norm * s1_tau_norm - lhs;
        // chain link 2: tau(|X|) <= c_Phi ||X||_{S_Phi} (scaled by ||a||_op)
        let link2 = cand.op_norm * (c_phi * s_phi_norm - s1_tau_norm);
        // chain link 3: ||a||_op <= K_hat L(a)
        let link3 = k_hat * cand.lip - cand.op_norm;
        let slack = link1.min(link2).min(link3);
        if slack < worst_chain_slack {
            worst_chain_slack = slack;
        }
        if slack < -CHAIN_TOL && violating.is_none() {
            violating = Some((cand.label.clone(), slack));
        }
    }
    let upper_bound = s_phi_norm * k_hat * c_phi;
    let margin = upper_bound - distance_lower;
    let verdict = match violating {
        None if margin >= -CHAIN_TOL => Verdict::Holds { margin },
        Some((label, slack)) => Verdict::Fails {
            margin: slack,
            witness: format!("candidate {label} breaks the chain by {slack:e}"),
        },
        None => Verdict::Fails {
            margin,
            witness: "distance lower bound exceeds the transport upper bound".into(),
        },
    };
    Ok(TransportOutcome {
        verdict,
        distance_lower,
        s_phi_norm,
        s1_tau_norm,
        k_hat,
        c_phi,
        upper_bound,
        worst_chain_slack,
        note: lip.note,
    })
}
