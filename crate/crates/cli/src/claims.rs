//! The all-claims verification harness.
//!
//! Every theorem-shaped statement the laboratory realizes is registered
//! here with a stable id and a tier. REQUIRED claims gate the exit code:
//! they cover content that is provable on the truncation (or whose
//! hypothesis violation must be diagnosed correctly). REPORT-ONLY claims
//! carry measured verdicts for statements whose standard supporting
//! arguments have known flaws; an honest numerical refutation there must not fail the
//! harness.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, Result};
use num_complex::Complex64;
use serde::Serialize;

use otlab_core::embed::{
    cb_amplification_norm, factorize, optimality_scan, pi_summing_lower, PhaseSearchOptions,
    VectorFamily, PLATEAU_TOL,
};
use otlab_core::metric::{
    default_pool, evaluate_pool, spectral_distance_lower, transport_check, DensityOperator,
};
use otlab_core::pde::{
    heat_apply_element, heat_scaling_fit, heat_smoothing_check, regularity_check, spectral_gap,
    EllipticProblem,
};
use otlab_core::qtorus::{LatticeGrid, TorusElement};
use otlab_core::spectral::{ls_matrix, ls_spectrum, operator_norm, singular_values, weyl_fit};
use otlab_core::young::{luxemburg_norm, series_membership, YoungFunction};
use otlab_core::{Error, Verdict};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    Required,
    ReportOnly,
}

/// Result of one registered claim.
pub struct ClaimOutcome {
    pub verdict: Verdict,
    pub numbers: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl ClaimOutcome {
    fn holds(margin: f64) -> Self {
        Self {
            verdict: Verdict::Holds { margin },
            numbers: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn fails(margin: f64, witness: impl Into<String>) -> Self {
        Self {
            verdict: Verdict::Fails {
                margin,
                witness: witness.into(),
            },
            numbers: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn num(mut self, key: &str, value: f64) -> Self {
        self.numbers.insert(key.into(), value);
        self
    }

    fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}

/// Canonical serialized form of a finished claim. Deterministic: no
/// wall-clock content (timings are emitted separately).
#[derive(Debug, Clone, Serialize)]
pub struct ClaimReport {
    pub id: String,
    pub locus: String,
    pub tier: Tier,
    pub verdict: Verdict,
    pub numbers: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

pub struct Claim {
    pub id: &'static str,
    pub locus: &'static str,
    pub tier: Tier,
    run: fn(&RunConfig) -> Result<ClaimOutcome>,
}

pub fn registry() -> Vec<Claim> {
    vec![
        Claim {
            id: "lem-ideal-property",
            locus: "two-sided multiplication bound ||XAY|| <= ||X|| ||Y|| ||A|| in S_Phi",
            tier: Tier::Required,
            run: claim_ideal_property,
        },
        Claim {
            id: "prop-sv-decay",
            locus: "eigenvalue counting N(lambda) ~ C lambda^{d/2} and mu_n(L_s) ~ (n/C)^{-s/d}",
            tier: Tier::Required,
            run: claim_sv_decay,
        },
        Claim {
            id: "cor-membership",
            locus: "L_s in S_Phi for power-log gauges exactly when p > d/s",
            tier: Tier::Required,
            run: claim_membership,
        },
        Claim {
            id: "thm-embedding",
            locus: "Sobolev embedding factors through S_Phi with exact reconstruction",
            tier: Tier::Required,
            run: claim_embedding,
        },
        Claim {
            id: "thm-main-factorization",
            locus: "summing bounds pi_1 <= c_Phi ||L_s||_{S_Phi}, pi_2 exact, cb amplifications flat",
            tier: Tier::Required,
            run: claim_main_factorization,
        },
        Claim {
            id: "prop-optimality",
            locus: "divergent gauge series forces unbounded truncated norms; convergent plateaus",
            tier: Tier::Required,
            run: claim_optimality,
        },
        Claim {
            id: "thm-interpolation",
            locus: "interpolated gauge satisfies the geometric-mean inverse relation",
            tier: Tier::Required,
            run: claim_interpolation,
        },
        Claim {
            id: "lem-spectral-gap",
            locus: "spectral gap of -Delta + V for V >= 0 with tau(V) > 0",
            tier: Tier::Required,
            run: claim_spectral_gap,
        },
        Claim {
            id: "thm-elliptic-regularity",
            locus: "solution bound ||u||_{W^{s,Phi}} <= ||f||_{S_Phi} / lambda_0",
            tier: Tier::Required,
            run: claim_elliptic_regularity,
        },
        Claim {
            id: "def-heat-semigroup",
            locus: "heat flow composition law and trace preservation",
            tier: Tier::Required,
            run: claim_heat_semigroup,
        },
        Claim {
            id: "prop-heat-smoothing",
            locus: "smoothing bound ||e^{-t Delta}||_{S_1 -> S_Phi} <= sup_n e^{-t lambda_n}/Phi^{-1}(n)",
            tier: Tier::ReportOnly,
            run: claim_heat_smoothing,
        },
        Claim {
            id: "ex-heat-scaling",
            locus: "measured smoothing-norm scaling against the classical exponent -d(1-1/p)/2",
            tier: Tier::ReportOnly,
            run: claim_heat_scaling,
        },
        Claim {
            id: "thm-transport",
            locus: "spectral-distance bound d_L <= ||rho - sigma||_{S_Phi} K_hat c_Phi",
            tier: Tier::Required,
            run: claim_transport,
        },
    ]
}

/// Full run: every registered claim exactly once, in registry order.
pub struct ClaimRun {
    pub reports: Vec<ClaimReport>,
    /// (claim id, seconds); non-deterministic, emitted outside the report.
    pub timings: Vec<(String, f64)>,
    pub required_failures: usize,
}

/// Run a single registered claim by id.
pub fn run_claim(cfg: &RunConfig, id: &str) -> Result<ClaimReport> {
    let claim = registry()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| anyhow!("no claim with id {id}"))?;
    let outcome = (claim.run)(cfg).map_err(|e| anyhow!("claim {id} aborted: {e}"))?;
    Ok(ClaimReport {
        id: claim.id.into(),
        locus: claim.locus.into(),
        tier: claim.tier,
        verdict: outcome.verdict,
        numbers: outcome.numbers,
        notes: outcome.notes,
    })
}

pub fn run_all(cfg: &RunConfig) -> Result<ClaimRun> {
    let mut reports = Vec::new();
    let mut timings = Vec::new();
    let mut required_failures = 0usize;
    for claim in registry() {
        let start = Instant::now();
        let outcome = (claim.run)(cfg)
            .map_err(|e| anyhow!("claim {} aborted: {e}", claim.id))?;
        timings.push((claim.id.to_string(), start.elapsed().as_secs_f64()));
        if claim.tier == Tier::Required && !outcome.verdict.holds() {
            required_failures += 1;
        }
        reports.push(ClaimReport {
            id: claim.id.into(),
            locus: claim.locus.into(),
            tier: claim.tier,
            verdict: outcome.verdict,
            numbers: outcome.numbers,
            notes: outcome.notes,
        });
    }
    Ok(ClaimRun {
        reports,
        timings,
        required_failures,
    })
}

fn gauge_catalog(cfg: &RunConfig) -> Result<Vec<YoungFunction>> {
    let mut out = vec![
        YoungFunction::power(1.0).map_err(|e| anyhow!("{e}"))?,
        YoungFunction::power(2.0).map_err(|e| anyhow!("{e}"))?,
        YoungFunction::power_log(2.0, 1.0).map_err(|e| anyhow!("{e}"))?,
        YoungFunction::power_log(2.5, 0.0).map_err(|e| anyhow!("{e}"))?,
        YoungFunction::interpolate(
            YoungFunction::power(1.0).map_err(|e| anyhow!("{e}"))?,
            YoungFunction::power(2.0).map_err(|e| anyhow!("{e}"))?,
            0.5,
        )
        .map_err(|e| anyhow!("{e}"))?,
    ];
    let configured = cfg.gauge()?;
    if !out.iter().any(|g| g.descriptor() == configured.descriptor()) {
        out.push(configured);
    }
    Ok(out)
}

fn claim_ideal_property(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let grid = cfg.grid_at(cfg.claims.ideal_radius)?;
    let theta = cfg.theta_matrix()?;
    let gauges = gauge_catalog(cfg)?;
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0usize;
    for trial in 0..cfg.claims.ideal_triples {
        let mut rng = otlab_core::rng::stream(cfg.seed, 0x1dea + trial as u64);
        let x = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng).matrix_rep();
        let a = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng).matrix_rep();
        let y = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng).matrix_rep();
        let xn = operator_norm(&x).map_err(|e| anyhow!("{e}"))?;
        let yn = operator_norm(&y).map_err(|e| anyhow!("{e}"))?;
        let xay = x
            .mul(&a)
            .and_then(|m| m.mul(&y))
            .map_err(|e| anyhow!("{e}"))?;
        let sv_a = singular_values(&a).map_err(|e| anyhow!("{e}"))?;
        let sv_xay = singular_values(&xay).map_err(|e| anyhow!("{e}"))?;
        for phi in &gauges {
            let lhs = luxemburg_norm(sv_xay.values(), phi).map_err(|e| anyhow!("{e}"))?;
            let rhs = xn * yn * luxemburg_norm(sv_a.values(), phi).map_err(|e| anyhow!("{e}"))?;
            let violation = lhs - rhs;
            worst = worst.max(violation);
            if violation > 1e-8 {
                failures += 1;
            }
        }
    }
    let outcome = if failures == 0 {
        ClaimOutcome::holds(-worst)
    } else {
        ClaimOutcome::fails(worst, format!("{failures} violations beyond 1e-8"))
    };
    Ok(outcome
        .num("worst_violation", worst)
        .num("triples", cfg.claims.ideal_triples as f64)
        .num("gauges", gauges.len() as f64))
}

fn claim_sv_decay(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let grid = LatticeGrid::shared(2, cfg.claims.decay_radius).map_err(|e| anyhow!("{e}"))?;
    let fit = weyl_fit(&grid).map_err(|e| anyhow!("{e}"))?;
    let want_d2 = 1.0 / (4.0 * std::f64::consts::PI);
    let spectrum = ls_spectrum(&grid, 1.0).map_err(|e| anyhow!("{e}"))?;
    let n_total = spectrum.len() as f64;
    let mid = n_total.sqrt();
    let lo = (mid / 10f64.sqrt()).ceil() as usize;
    let hi = (mid * 10f64.sqrt()).floor() as usize;
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    for n in lo..=hi {
        let ratio = spectrum.values()[n - 1] * (n as f64 / fit.c_hat).sqrt();
        ratio_min = ratio_min.min(ratio);
        ratio_max = ratio_max.max(ratio);
    }
    let grid1 = LatticeGrid::shared(1, cfg.claims.weyl_radius_d1).map_err(|e| anyhow!("{e}"))?;
    let fit1 = weyl_fit(&grid1).map_err(|e| anyhow!("{e}"))?;
    let want_d1 = 1.0 / std::f64::consts::PI;

    let weyl_ok = (fit.c_hat - want_d2).abs() <= 0.05 * want_d2
        && (fit1.c_hat - want_d1).abs() <= 0.05 * want_d1;
    let window_ok = ratio_min >= 0.8 && ratio_max <= 1.25;
    let margin = (ratio_min - 0.8).min(1.25 - ratio_max);
    let outcome = if weyl_ok && window_ok {
        ClaimOutcome::holds(margin)
    } else {
        ClaimOutcome::fails(
            margin,
            format!("ratios [{ratio_min:.4}, {ratio_max:.4}] or Weyl constants out of window"),
        )
    };
    Ok(outcome
        .num("c_hat_d2", fit.c_hat)
        .num("c_hat_d2_target", want_d2)
        .num("c_hat_d1", fit1.c_hat)
        .num("c_hat_d1_target", want_d1)
        .num("weyl_residual_d2", fit.residual)
        .num("ratio_min", ratio_min)
        .num("ratio_max", ratio_max)
        .num("rank_lo", lo as f64)
        .num("rank_hi", hi as f64))
}

fn claim_membership(_cfg: &RunConfig) -> Result<ClaimOutcome> {
    // canonical instance d=2, s=1: threshold at p = 2
    let grid = LatticeGrid::shared(2, 16).map_err(|e| anyhow!("{e}"))?;
    let spectrum = ls_spectrum(&grid, 1.0).map_err(|e| anyhow!("{e}"))?;
    let tail = spectrum.tail().expect("radius 16 has an envelope");
    let mut outcome = ClaimOutcome::holds(0.0);
    let mut all_ok = true;
    for &p in &[1.5, 2.0, 2.5] {
        for &alpha in &[0.0, 1.0] {
            let phi = YoungFunction::power_log(p, alpha).map_err(|e| anyhow!("{e}"))?;
            let verdict =
                series_membership(tail, &phi, spectrum.values()).map_err(|e| anyhow!("{e}"))?;
            let expect_member = p > 2.0;
            let ok = if expect_member {
                verdict.holds()
            } else {
                verdict.fails()
            };
            all_ok &= ok;
            let key = format!("member_p{p}_alpha{alpha}");
            outcome = outcome.num(&key, if verdict.holds() { 1.0 } else { 0.0 });
            if !ok {
                outcome = outcome.note(format!(
                    "unexpected verdict for p={p}, alpha={alpha}: {verdict}"
                ));
            }
        }
    }
    // the boundary case p = d/s with a positive log power diverges, against
    // the claimed membership for that instance elsewhere in the source
    outcome = outcome.num("discrepancy_p2_alpha1", 1.0).note(
        "discrepancy flag: at p = d/s = 2 with alpha = 1 the series diverges \
         (terms ~ 1/n), contradicting the claimed membership for that boundary \
         instance; the numerical verdict is reported as computed",
    );
    if !all_ok {
        outcome.verdict = Verdict::Fails {
            margin: -1.0,
            witness: "membership pattern does not match the p > d/s threshold".into(),
        };
    }
    Ok(outcome)
}

fn claim_embedding(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let grid = cfg.grid_at(cfg.claims.family_radius)?;
    let phi = cfg.gauge()?;
    match factorize(&grid, cfg.s, &phi, cfg.seed, cfg.claims.families) {
        Ok(report) => {
            let recon_ok = report.reconstruction_error <= 1e-12;
            let bound_ok = report.pi1_lower <= report.upper_bound + 1e-8;
            let outcome = if recon_ok && bound_ok {
                ClaimOutcome::holds(report.upper_bound - report.pi1_lower)
            } else {
                ClaimOutcome::fails(
                    report.pi1_lower - report.upper_bound,
                    format!(
                        "reconstruction error {:.3e} or pi_1 bound breach",
                        report.reconstruction_error
                    ),
                )
            };
            Ok(outcome
                .num("ls_orlicz_norm", report.ls_orlicz_norm)
                .num("inclusion_constant", report.inclusion_constant)
                .num("pi1_lower", report.pi1_lower)
                .num("upper_bound", report.upper_bound)
                .num("reconstruction_error", report.reconstruction_error)
                .num("families", report.families_tested as f64)
                .note(report.domain_note))
        }
        Err(Error::MembershipFailed(diag)) => {
            // hypothesis violated and correctly diagnosed: the factorization
            // story is consistent, so the claim as registered holds
            Ok(ClaimOutcome::holds(0.0)
                .num("membership_failed", 1.0)
                .note(format!("hypothesis violated for the configured gauge: {diag}")))
        }
        Err(e) => Err(anyhow!("{e}")),
    }
}

fn claim_main_factorization(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let grid = cfg.grid_at(cfg.claims.family_radius)?;
    let phi = cfg.gauge()?;
    // pi_2 through the basis family must equal the HS norm of the symbol
    let mu: Vec<f64> = grid
        .eigenvalues()
        .iter()
        .map(|&l| (1.0 + l).powf(-cfg.s / 2.0))
        .collect();
    let hs: f64 = mu.iter().map(|v| v * v).sum::<f64>().sqrt();
    let basis = VectorFamily::canonical_basis(grid.len()).map_err(|e| anyhow!("{e}"))?;
    let pi2 = pi_summing_lower(
        &mu,
        &basis,
        2.0,
        &PhaseSearchOptions {
            seed: cfg.seed,
            ..Default::default()
        },
    )
    .map_err(|e| anyhow!("{e}"))?;
    let pi2_ok = (pi2.value - hs).abs() <= 1e-10 * hs.max(1.0);

    // cb amplifications of the diagonal factor stay flat in k
    let amp_grid = cfg.grid_at(cfg.claims.amplification_radius)?;
    let ls = ls_matrix(&amp_grid, cfg.s).map_err(|e| anyhow!("{e}"))?;
    let base = cb_amplification_norm(&ls, 1).map_err(|e| anyhow!("{e}"))?;
    let mut amp_spread = 0.0f64;
    for k in 2..=4 {
        let v = cb_amplification_norm(&ls, k).map_err(|e| anyhow!("{e}"))?;
        amp_spread = amp_spread.max((v - base).abs());
    }
    let amp_ok = amp_spread <= 1e-10;

    // summing bound for a convergent gauge (configured gauge when possible)
    let bound_outcome = match factorize(&grid, cfg.s, &phi, cfg.seed, cfg.claims.families) {
        Ok(report) => Some((report.pi1_lower, report.upper_bound)),
        Err(Error::MembershipFailed(_)) => None,
        Err(e) => return Err(anyhow!("{e}")),
    };
    let bound_ok = bound_outcome.is_none_or(|(lo, up)| lo <= up + 1e-8);

    let mut outcome = if pi2_ok && amp_ok && bound_ok {
        ClaimOutcome::holds((1e-10 - amp_spread).max(0.0))
    } else {
        ClaimOutcome::fails(
            -amp_spread,
            format!("pi2_ok={pi2_ok}, amp_ok={amp_ok}, bound_ok={bound_ok}"),
        )
    };
    outcome = outcome
        .num("pi2_basis_family", pi2.value)
        .num("pi2_hs_oracle", hs)
        .num("cb_base_norm", base)
        .num("cb_spread_k1_to_k4", amp_spread);
    if let Some((lo, up)) = bound_outcome {
        outcome = outcome.num("pi1_lower", lo).num("upper_bound", up);
    } else {
        outcome = outcome.note("configured gauge diverges; summing bound skipped here");
    }
    Ok(outcome)
}

fn claim_optimality(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let divergent = YoungFunction::power(2.0).map_err(|e| anyhow!("{e}"))?;
    let convergent = YoungFunction::power_log(2.5, 0.0).map_err(|e| anyhow!("{e}"))?;
    let radii = &cfg.scan.radii;
    let div = optimality_scan(2, 1.0, &divergent, radii).map_err(|e| anyhow!("{e}"))?;
    let conv = optimality_scan(2, 1.0, &convergent, radii).map_err(|e| anyhow!("{e}"))?;

    let div_growths: Vec<f64> = div
        .rows
        .windows(2)
        .map(|w| (w[1].norm - w[0].norm) / w[0].norm)
        .collect();
    let div_ok = div.verdict.fails()
        && div_growths.iter().all(|&g| g > 0.0)
        && div_growths.last().is_some_and(|&g| g > PLATEAU_TOL);
    let conv_growths: Vec<f64> = conv
        .rows
        .windows(2)
        .map(|w| (w[1].norm - w[0].norm) / w[0].norm)
        .collect();
    // plateau within tolerance from the second radius onward
    let conv_ok = conv.verdict.holds()
        && conv_growths.iter().skip(1).all(|&g| g.abs() <= PLATEAU_TOL);

    let mut outcome = if div_ok && conv_ok {
        ClaimOutcome::holds(
            div_growths.last().copied().unwrap_or(0.0) - PLATEAU_TOL,
        )
    } else {
        ClaimOutcome::fails(0.0, format!("div_ok={div_ok}, conv_ok={conv_ok}"))
    };
    for (i, row) in div.rows.iter().enumerate() {
        outcome = outcome.num(&format!("divergent_norm_r{}", row.radius), row.norm);
        if i > 0 {
            outcome = outcome.num(
                &format!("divergent_growth_r{}", row.radius),
                div_growths[i - 1],
            );
        }
    }
    for (i, row) in conv.rows.iter().enumerate() {
        outcome = outcome.num(&format!("convergent_norm_r{}", row.radius), row.norm);
        if i > 0 {
            outcome = outcome.num(
                &format!("convergent_growth_r{}", row.radius),
                conv_growths[i - 1],
            );
        }
    }
    Ok(outcome
        .note(format!("divergent scan: {}", div.verdict))
        .note(format!("convergent scan: {}", conv.verdict)))
}

fn claim_interpolation(_cfg: &RunConfig) -> Result<ClaimOutcome> {
    let p1 = YoungFunction::power(1.0).map_err(|e| anyhow!("{e}"))?;
    let p2 = YoungFunction::power(2.0).map_err(|e| anyhow!("{e}"))?;
    let phi = YoungFunction::interpolate(p1.clone(), p2.clone(), 0.5).map_err(|e| anyhow!("{e}"))?;
    // 20-point grid: Phi_theta(t) = t^{4/3}
    let mut worst_rel = 0.0f64;
    for i in 0..20 {
        let t = 10f64.powf(-2.0 + 4.0 * i as f64 / 19.0);
        let got = phi.eval(t).map_err(|e| anyhow!("{e}"))?;
        let want = t.powf(4.0 / 3.0);
        worst_rel = worst_rel.max((got - want).abs() / want);
    }
    // symmetry under (phi0, phi1, theta) <-> (phi1, phi0, 1 - theta)
    let pl = YoungFunction::power_log(2.0, 1.0).map_err(|e| anyhow!("{e}"))?;
    let a = YoungFunction::interpolate(p1.clone(), pl.clone(), 0.3).map_err(|e| anyhow!("{e}"))?;
    let b = YoungFunction::interpolate(pl.clone(), p1.clone(), 0.7).map_err(|e| anyhow!("{e}"))?;
    let mut worst_sym = 0.0f64;
    for &t in &[0.05, 0.5, 3.0, 40.0] {
        let va = a.eval(t).map_err(|e| anyhow!("{e}"))?;
        let vb = b.eval(t).map_err(|e| anyhow!("{e}"))?;
        worst_sym = worst_sym.max((va - vb).abs() / (1.0 + va.abs()));
    }
    // inverse relation: weighted geometric mean at t in {0.1, 1, 10}
    let theta = 0.3;
    let c = YoungFunction::interpolate(p1.clone(), pl.clone(), theta).map_err(|e| anyhow!("{e}"))?;
    let mut worst_inv = 0.0f64;
    for &t in &[0.1, 1.0, 10.0] {
        let want = p1.inverse(t).map_err(|e| anyhow!("{e}"))?.powf(1.0 - theta)
            * pl.inverse(t).map_err(|e| anyhow!("{e}"))?.powf(theta);
        let got = c.inverse(t).map_err(|e| anyhow!("{e}"))?;
        worst_inv = worst_inv.max((got - want).abs() / want);
    }
    let ok = worst_rel <= 1e-6 && worst_sym <= 1e-9 && worst_inv <= 1e-9;
    let outcome = if ok {
        ClaimOutcome::holds(1e-6 - worst_rel)
    } else {
        ClaimOutcome::fails(
            -worst_rel,
            format!("closed-form {worst_rel:e}, symmetry {worst_sym:e}, inverse {worst_inv:e}"),
        )
    };
    Ok(outcome
        .num("closed_form_rel_err", worst_rel)
        .num("symmetry_err", worst_sym)
        .num("inverse_relation_err", worst_inv)
        .num("convexity_ok", if phi.convexity_ok() { 1.0 } else { 0.0 }))
}

fn claim_spectral_gap(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let grid = cfg.grid_at(cfg.pde.radius)?;
    let theta = cfg.theta_matrix()?;
    let phi = cfg.gauge()?;

    // scalar potential: ground state is the constant mode, gap exactly c
    let c = 1.0;
    let scalar = TorusElement::one(Arc::clone(&grid), theta.clone())
        .map_err(|e| anyhow!("{e}"))?
        .scale(Complex64::new(c, 0.0));
    let scalar_problem =
        EllipticProblem::new(scalar, cfg.s, phi.clone()).map_err(|e| anyhow!("{e}"))?;
    let scalar_gap = spectral_gap(&scalar_problem).map_err(|e| anyhow!("{e}"))?;
    let scalar_ok = (scalar_gap.lambda0 - c).abs() <= 1e-12;

    // V = 0: no gap, consistent with tau(V) > 0 being necessary
    let zero = TorusElement::zero(Arc::clone(&grid), theta.clone()).map_err(|e| anyhow!("{e}"))?;
    let zero_problem = EllipticProblem::new(zero, cfg.s, phi.clone()).map_err(|e| anyhow!("{e}"))?;
    let zero_gap = spectral_gap(&zero_problem).map_err(|e| anyhow!("{e}"))?;
    let zero_ok = zero_gap.lambda0.abs() <= 1e-12;

    // d=1 trigonometric potential 2 + U + U*: tau(V) = 2 > 0 while
    // inf sigma(V) sits near zero, so the claimed bound lambda0 >= inf sigma(V)
    // is vacuous; the computed gap is reported next to both numbers
    let grid1 = LatticeGrid::shared(1, 4).map_err(|e| anyhow!("{e}"))?;
    let theta1 = otlab_core::qtorus::ThetaMatrix::zero(1);
    let mut v1 = TorusElement::one(Arc::clone(&grid1), theta1.clone())
        .map_err(|e| anyhow!("{e}"))?
        .scale(Complex64::new(2.0, 0.0));
    v1.set_coeff(&[1], Complex64::ONE).map_err(|e| anyhow!("{e}"))?;
    v1.set_coeff(&[-1], Complex64::ONE).map_err(|e| anyhow!("{e}"))?;
    let trig_problem = EllipticProblem::new(v1, cfg.s, phi).map_err(|e| anyhow!("{e}"))?;
    let trig_gap = spectral_gap(&trig_problem).map_err(|e| anyhow!("{e}"))?;
    let trig_ok = trig_gap.lambda0 > 0.0;

    let ok = scalar_ok && zero_ok && trig_ok;
    let outcome = if ok {
        ClaimOutcome::holds(trig_gap.lambda0)
    } else {
        ClaimOutcome::fails(
            trig_gap.lambda0,
            format!("scalar_ok={scalar_ok}, zero_ok={zero_ok}, trig_ok={trig_ok}"),
        )
    };
    Ok(outcome
        .num("lambda0_scalar", scalar_gap.lambda0)
        .num("lambda0_zero_potential", zero_gap.lambda0)
        .num("lambda0_trig", trig_gap.lambda0)
        .num("vmin_trig", trig_gap.vmin)
        .num("trace_v_trig", trig_gap.trace_v)
        .note(
            "the computed gap is reported next to inf sigma(V): lower-bounding \
             lambda0 by inf sigma(V) alone is vacuous for trigonometric \
             potentials whose spectrum reaches zero",
        ))
}

fn claim_elliptic_regularity(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let grid = cfg.grid_at(cfg.pde.radius)?;
    let theta = cfg.theta_matrix()?;
    let phi = cfg.gauge()?;

    // scalar case with the equality witness f = U^0
    let scalar = TorusElement::one(Arc::clone(&grid), theta.clone())
        .map_err(|e| anyhow!("{e}"))?;
    let problem = EllipticProblem::new(scalar, cfg.s, phi.clone()).map_err(|e| anyhow!("{e}"))?;
    let f0 = TorusElement::one(Arc::clone(&grid), theta.clone()).map_err(|e| anyhow!("{e}"))?;
    let eq = regularity_check(&problem, &f0).map_err(|e| anyhow!("{e}"))?;
    let eq_ok = eq.verdict.holds() && (eq.u_norm - eq.f_norm).abs() <= 1e-10 * eq.f_norm;

    let mut worst_margin = f64::INFINITY;
    let mut holds_all = true;
    for trial in 0..cfg.pde.trials {
        let mut rng = otlab_core::rng::stream(cfg.seed, 0x2e90 + trial as u64);
        let f = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng);
        let out = regularity_check(&problem, &f).map_err(|e| anyhow!("{e}"))?;
        let margin = match &out.verdict {
            Verdict::Holds { margin } => *margin,
            Verdict::Fails { margin, .. } => *margin,
            Verdict::Inconclusive { .. } => f64::NAN,
        };
        worst_margin = worst_margin.min(margin);
        holds_all &= out.verdict.holds();
    }

    // non-scalar survey: verdict content reported, not gated
    let mut v = TorusElement::one(Arc::clone(&grid), theta.clone())
        .map_err(|e| anyhow!("{e}"))?;
    let mut e1 = vec![0i64; cfg.d];
    e1[0] = 1;
    let mut e1n = vec![0i64; cfg.d];
    e1n[0] = -1;
    v.set_coeff(&e1, Complex64::new(0.5, 0.0)).map_err(|e| anyhow!("{e}"))?;
    v.set_coeff(&e1n, Complex64::new(0.5, 0.0)).map_err(|e| anyhow!("{e}"))?;
    let nonscalar = EllipticProblem::new(v, cfg.s, phi).map_err(|e| anyhow!("{e}"))?;
    let mut ns_margin_min = f64::INFINITY;
    let mut ns_margin_max = f64::NEG_INFINITY;
    let mut ns_holds = 0usize;
    let ns_trials = cfg.pde.trials.min(20);
    for trial in 0..ns_trials {
        let mut rng = otlab_core::rng::stream(cfg.seed, 0x3e90 + trial as u64);
        let f = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng);
        let out = regularity_check(&nonscalar, &f).map_err(|e| anyhow!("{e}"))?;
        let margin = match &out.verdict {
            Verdict::Holds { margin } => {
                ns_holds += 1;
                *margin
            }
            Verdict::Fails { margin, .. } => *margin,
            Verdict::Inconclusive { .. } => f64::NAN,
        };
        ns_margin_min = ns_margin_min.min(margin);
        ns_margin_max = ns_margin_max.max(margin);
    }

    let ok = eq_ok && holds_all;
    let outcome = if ok {
        ClaimOutcome::holds(worst_margin)
    } else {
        ClaimOutcome::fails(worst_margin, "scalar-potential regularity breach".to_string())
    };
    Ok(outcome
        .num("scalar_trials", cfg.pde.trials as f64)
        .num("scalar_worst_margin", worst_margin)
        .num("equality_gap", (eq.u_norm - eq.f_norm).abs())
        .num("nonscalar_trials", ns_trials as f64)
        .num("nonscalar_holds", ns_holds as f64)
        .num("nonscalar_margin_min", ns_margin_min)
        .num("nonscalar_margin_max", ns_margin_max)
        .note(
            "non-scalar margins are reported, not gated: the commutation step \
             behind the scalar argument is unavailable there",
        ))
}

fn claim_heat_semigroup(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let grid = cfg.grid()?;
    let theta = cfg.theta_matrix()?;
    let mut worst_comp = 0.0f64;
    let mut worst_trace = 0.0f64;
    for trial in 0..10 {
        let mut rng = otlab_core::rng::stream(cfg.seed, 0x4ea7 + trial as u64);
        let x = TorusElement::random(Arc::clone(&grid), theta.clone(), &mut rng);
        let two_step = heat_apply_element(&heat_apply_element(&x, 0.07).map_err(|e| anyhow!("{e}"))?, 0.03)
            .map_err(|e| anyhow!("{e}"))?;
        let one_step = heat_apply_element(&x, 0.10).map_err(|e| anyhow!("{e}"))?;
        for (a, b) in two_step.coeffs().iter().zip(one_step.coeffs()) {
            worst_comp = worst_comp.max((a - b).norm());
        }
        let heated = heat_apply_element(&x, 0.25).map_err(|e| anyhow!("{e}"))?;
        worst_trace = worst_trace.max((heated.trace() - x.trace()).norm());
    }
    let ok = worst_comp <= 1e-12 && worst_trace == 0.0;
    let outcome = if ok {
        ClaimOutcome::holds(1e-12 - worst_comp)
    } else {
        ClaimOutcome::fails(worst_comp, "semigroup law breach".to_string())
    };
    Ok(outcome
        .num("composition_error", worst_comp)
        .num("trace_error", worst_trace))
}

fn claim_heat_smoothing(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let grid = cfg.grid_at(cfg.heat.radius)?;
    let phi = cfg.gauge()?;
    let mut worst: Option<(f64, f64, String)> = None;
    let mut rows = 0usize;
    for &t in &cfg.heat.t_list {
        let report = heat_smoothing_check(&grid, t, &phi, cfg.heat.trials, cfg.seed)
            .map_err(|e| anyhow!("{e}"))?;
        rows += report.rows.len();
        if worst.as_ref().is_none_or(|(_, r, _)| report.worst_ratio > *r) {
            worst = Some((t, report.worst_ratio, report.worst_label.clone()));
        }
    }
    let (t, worst_ratio, worst_label) = worst.expect("t_list is nonempty");
    let verdict = if worst_ratio <= 1.0 + 1e-8 {
        Verdict::Holds {
            margin: 1.0 - worst_ratio,
        }
    } else {
        Verdict::Fails {
            margin: 1.0 - worst_ratio,
            witness: worst_label.clone(),
        }
    };
    let bound = otlab_core::spectral::heat_bound_factor(&grid, t, &phi)
        .map_err(|e| anyhow!("{e}"))?;
    Ok(ClaimOutcome {
        verdict,
        numbers: BTreeMap::new(),
        notes: Vec::new(),
    }
    .num("bound_factor_at_worst_t", bound)
    .num("worst_ratio", worst_ratio)
    .num("worst_t", t)
    .num("trials", rows as f64)
    .note(format!("worst case: {worst_label}"))
    .note(
        "report-only: the usual derivation of this bound rests on a false \
         step (mu_n of a product is not the product of mu_n), so the \
         measured worst ratio is the deliverable",
    ))
}

fn claim_heat_scaling(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let grid = cfg.grid_at(cfg.heat.radius)?;
    let phi = YoungFunction::power(2.0).map_err(|e| anyhow!("{e}"))?;
    let fit = heat_scaling_fit(
        &grid,
        &phi,
        (cfg.heat.window[0], cfg.heat.window[1]),
        cfg.heat.samples,
        cfg.heat.trials.min(8),
        cfg.seed,
    )
    .map_err(|e| anyhow!("{e}"))?;
    let classical = fit.classical.unwrap_or(f64::NAN);
    Ok(ClaimOutcome::holds(0.0)
        .num("slope", fit.slope)
        .num("classical_exponent", classical)
        .num("samples", fit.rows.len() as f64)
        .note(fit.caveat)
        .note("report-only: slope tabulated against the classical exponent"))
}

fn claim_transport(cfg: &RunConfig) -> Result<ClaimOutcome> {
    let grid = cfg.grid_at(cfg.metric.radius)?;
    let theta = cfg.theta_matrix()?;
    let phi = cfg.gauge()?;
    let pool = default_pool(&grid, &theta, cfg.metric.pool_random, cfg.seed)
        .map_err(|e| anyhow!("{e}"))?;
    let evals = evaluate_pool(&pool).map_err(|e| anyhow!("{e}"))?;

    let mut worst_slack = f64::INFINITY;
    let mut worst_margin = f64::INFINITY;
    let mut all_hold = true;
    for pair in 0..cfg.metric.pairs {
        let rho = DensityOperator::random(&grid, cfg.seed, 2 * pair as u64)
            .map_err(|e| anyhow!("{e}"))?;
        let sigma = DensityOperator::random(&grid, cfg.seed, 2 * pair as u64 + 1)
            .map_err(|e| anyhow!("{e}"))?;
        let out = transport_check(&rho, &sigma, &phi, &evals).map_err(|e| anyhow!("{e}"))?;
        worst_slack = worst_slack.min(out.worst_chain_slack);
        if let Verdict::Holds { margin } = out.verdict {
            worst_margin = worst_margin.min(margin);
        } else {
            all_hold = false;
        }
    }
    // identical states give a zero lower bound
    let rho = DensityOperator::random(&grid, cfg.seed, 999).map_err(|e| anyhow!("{e}"))?;
    let self_distance =
        spectral_distance_lower(&rho, &rho, &evals).map_err(|e| anyhow!("{e}"))?;
    // pool monotonicity: max over a superset cannot decrease
    let sigma = DensityOperator::random(&grid, cfg.seed, 998).map_err(|e| anyhow!("{e}"))?;
    let half = evals.len() / 2;
    let d_half = spectral_distance_lower(&rho, &sigma, &evals[..half.max(1)])
        .map_err(|e| anyhow!("{e}"))?;
    let d_full = spectral_distance_lower(&rho, &sigma, &evals).map_err(|e| anyhow!("{e}"))?;
    let mono_ok = d_full >= d_half;

    let ok = all_hold && worst_slack >= -1e-8 && self_distance.abs() <= 1e-12 && mono_ok;
    let outcome = if ok {
        ClaimOutcome::holds(worst_margin)
    } else {
        ClaimOutcome::fails(
            worst_slack,
            format!("all_hold={all_hold}, worst_slack={worst_slack:e}, mono_ok={mono_ok}"),
        )
    };
    Ok(outcome
        .num("pairs", cfg.metric.pairs as f64)
        .num("worst_chain_slack", worst_slack)
        .num("worst_margin", worst_margin)
        .num("self_distance", self_distance)
        .num("pool_size", evals.len() as f64)
        .note(
            "K_hat substitutes for the undefined cb-norm of the Lip map; the \
             normalized trace tau = Tr/|grid| drives the pairing",
        ))
}
