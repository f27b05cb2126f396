//! Young functions, their numerical inverses, Luxemburg norms of sequences,
//! and convergence diagnosis of Orlicz series.
//!
//! The catalog is closed: pure powers `t^p`, power-logs `t^p log(e+t)^alpha`,
//! and geometric interpolants defined through their inverse
//! `Phi_theta^{-1}(t) = Phi_0^{-1}(t)^{1-theta} Phi_1^{-1}(t)^theta`.
//! These cover every gauge the implemented claims instantiate; arbitrary
//! user-supplied gauges are rejected so the Young axioms stay testable.

use std::f64::consts::E;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::verdict::Verdict;

/// Relative tolerance for all monotone bisections in this module.
const BISECT_REL_TOL: f64 = 1e-12;
/// Iteration cap for a bisection after a bracket is found.
const BISECT_MAX_ITER: usize = 200;
/// Smallest argument of the validation sampling grid.
const GRID_LO: f64 = 1e-9;
/// Number of geometric sampling points used by the validation checks.
const GRID_POINTS: usize = 160;

#[derive(Debug, Clone)]
enum Kind {
    Power { p: f64 },
    PowerLog { p: f64, alpha: f64 },
    Interpolated {
        phi0: Box<YoungFunction>,
        phi1: Box<YoungFunction>,
        theta: f64,
    },
}

/// A parametrized convex gauge with `Phi(0) = 0` and a numeric inverse.
#[derive(Debug, Clone)]
pub struct YoungFunction {
    kind: Kind,
    eval_cap: f64,
    convexity_ok: bool,
}

/// Largest cap that keeps `Phi(cap)` finite in f64 with headroom.
fn default_cap(p: f64) -> f64 {
    let by_power = 10f64.powf(300.0 / p - 5.0);
    by_power.min(1e100)
}

impl YoungFunction {
    /// `Phi(t) = t^p`, `p >= 1`.
    pub fn power(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "power exponent must be a finite real >= 1, got {p}"
            )));
        }
        let phi = Self {
            kind: Kind::Power { p },
            eval_cap: default_cap(p),
            convexity_ok: true,
        };
        phi.validate().map_err(|e| {
            Error::InvalidParameter(format!("power:p={p} fails Young validation: {e}"))
        })?;
        Ok(phi)
    }

    /// `Phi(t) = t^p log(e+t)^alpha`, `p >= 1`.
    ///
    /// Negative `alpha` is accepted only when the sampled convexity check
    /// passes; it can break convexity near zero.
    pub fn power_log(p: f64, alpha: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "powerlog needs finite p >= 1 and finite alpha, got p={p}, alpha={alpha}"
            )));
        }
        let phi = Self {
            kind: Kind::PowerLog { p, alpha },
            eval_cap: default_cap(p + alpha.max(0.0)),
            convexity_ok: true,
        };
        phi.validate().map_err(|e| {
            Error::InvalidParameter(format!(
                "powerlog:p={p},alpha={alpha} fails Young validation: {e}"
            ))
        })?;
        Ok(phi)
    }

    /// Interpolated gauge defined by
    /// `Phi_theta^{-1}(t) = Phi_0^{-1}(t)^{1-theta} Phi_1^{-1}(t)^theta`.
    ///
    /// Evaluation inverts this inverse numerically. The sampled-convexity
    /// validation runs on the result; a failure is recorded on the returned
    /// object as a warning flag (see [`YoungFunction::convexity_ok`]), not an
    /// error.
    pub fn interpolate(phi0: YoungFunction, phi1: YoungFunction, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "interpolation weight must lie in (0,1), got {theta}"
            )));
        }
        let eval_cap = phi0.eval_cap.min(phi1.eval_cap);
        let mut phi = Self {
            kind: Kind::Interpolated {
                phi0: Box::new(phi0),
                phi1: Box::new(phi1),
                theta,
            },
            eval_cap,
            convexity_ok: true,
        };
        phi.convexity_ok = phi.validate().is_ok();
        Ok(phi)
    }

    pub fn eval_cap(&self) -> f64 {
        self.eval_cap
    }

    /// False when the sampled convexity check failed for an interpolated
    /// gauge (the NonConvexResult warning).
    pub fn convexity_ok(&self) -> bool {
        self.convexity_ok
    }

    /// Descriptor in the config/CLI string syntax.
    pub fn descriptor(&self) -> String {
        match &self.kind {
            Kind::Power { p } => format!("power:p={p}"),
            Kind::PowerLog { p, alpha } => format!("powerlog:p={p},alpha={alpha}"),
            Kind::Interpolated { phi0, phi1, theta } => format!(
                "interp:theta={theta}:({})|({})",
                phi0.descriptor(),
                phi1.descriptor()
            ),
        }
    }

    /// Power exponent governing the growth of the gauge, when one exists in
    /// closed form (used for classical-exponent comparisons).
    pub fn power_exponent(&self) -> Option<f64> {
        match &self.kind {
            Kind::Power { p } => Some(*p),
            Kind::PowerLog { p, .. } => Some(*p),
            Kind::Interpolated { .. } => None,
        }
    }

    /// Parse a descriptor: `power:p=2`, `powerlog:p=2,alpha=1`, or
    /// `interp:theta=0.5:(power:p=1)|(power:p=2)`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |msg: &str| Error::InvalidParameter(format!("cannot parse `{text}`: {msg}"));
        if let Some(rest) = text.strip_prefix("power:") {
            let p = parse_kv(rest, "p").ok_or_else(|| bad("expected power:p=<real>"))?;
            return Self::power(p);
        }
        if let Some(rest) = text.strip_prefix("powerlog:") {
            let mut p = None;
            let mut alpha = None;
            for part in rest.split(',') {
                if let Some(v) = parse_kv(part, "p") {
                    p = Some(v);
                } else if let Some(v) = parse_kv(part, "alpha") {
                    alpha = Some(v);
                } else {
                    return Err(bad("expected powerlog:p=<real>,alpha=<real>"));
                }
            }
            let (p, alpha) = match (p, alpha) {
                (Some(p), Some(a)) => (p, a),
                _ => return Err(bad("expected powerlog:p=<real>,alpha=<real>")),
            };
            return Self::power_log(p, alpha);
        }
        if let Some(rest) = text.strip_prefix("interp:") {
            let (theta_part, operands) = rest
                .split_once(':')
                .ok_or_else(|| bad("expected interp:theta=<real>:(..)|(..)"))?;
            let theta =
                parse_kv(theta_part, "theta").ok_or_else(|| bad("expected theta=<real>"))?;
            let (left, right) = split_operands(operands).ok_or_else(|| bad("expected (..)|(..)"))?;
            return Self::interpolate(Self::parse(left)?, Self::parse(right)?, theta);
        }
        Err(bad("unknown gauge kind"))
    }

    /// Evaluate `Phi(t)` for `0 <= t <= eval_cap`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gauge argument must be finite and >= 0, got {t}"
            )));
        }
        if t > self.eval_cap {
            return Err(Error::OverflowDomain {
                arg: t,
                cap: self.eval_cap,
            });
        }
        self.eval_inner(t)
    }

    fn eval_inner(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            Kind::Power { p } => Ok(t.powf(*p)),
            Kind::PowerLog { p, alpha } => Ok(t.powf(*p) * (E + t).ln().powf(*alpha)),
            Kind::Interpolated { .. } => {
                // Invert the closed-form inverse: find y with Phi^{-1}(y) = t.
                bisect_increasing(|y| self.inverse(y), t, 1.0)
            }
        }
    }

    /// `Phi(t)` with out-of-cap arguments mapped to +inf instead of an error.
    /// Monotone solvers use this to keep brackets well-defined.
    fn eval_saturating(&self, t: f64) -> f64 {
        if t > self.eval_cap {
            return f64::INFINITY;
        }
        self.eval_inner(t).unwrap_or(f64::INFINITY)
    }

    /// Numeric inverse: the `t >= 0` with `Phi(t) = y`, exact at `y = 0`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !y.is_finite() || y < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "inverse argument must be finite and >= 0, got {y}"
            )));
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            Kind::Power { p } => Ok(y.powf(1.0 / p)),
            Kind::PowerLog { .. } => bisect_increasing(|t| self.eval(t), y, 1.0),
            Kind::Interpolated { phi0, phi1, theta } => {
                let a = phi0.inverse(y)?;
                let b = phi1.inverse(y)?;
                Ok(a.powf(1.0 - theta) * b.powf(*theta))
            }
        }
    }

    /// Sampled validation of the Young axioms: `Phi(0)=0`, monotonicity on a
    /// geometric grid, midpoint convexity on sampled pairs, and inverse
    /// consistency.
    fn validate(&self) -> Result<()> {
        if self.eval_inner(0.0)? != 0.0 {
            return Err(Error::InvalidParameter("Phi(0) != 0".into()));
        }
        let grid = geometric_grid(GRID_LO, self.eval_cap, GRID_POINTS);
        let values: Vec<f64> = grid
            .iter()
            .map(|&t| self.eval_inner(t))
            .collect::<Result<_>>()?;
        for (i, w) in values.windows(2).enumerate() {
            if !w[1].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "Phi not finite at t={:e}",
                    grid[i + 1]
                )));
            }
            if w[1] < w[0] {
                return Err(Error::InvalidParameter(format!(
                    "Phi decreases between t={:e} and t={:e}",
                    grid[i],
                    grid[i + 1]
                )));
            }
        }
        // Midpoint convexity over nearby and spread-out pairs.
        for stride in [1usize, 7, 23] {
            for i in 0..values.len().saturating_sub(stride) {
                let (s, t) = (grid[i], grid[i + stride]);
                let mid = self.eval_inner(0.5 * (s + t))?;
                let chord = 0.5 * (values[i] + values[i + stride]);
                if mid > chord + 1e-12 * (1.0 + values[i + stride]) {
                    return Err(Error::InvalidParameter(format!(
                        "midpoint convexity fails on ({s:e}, {t:e})"
                    )));
                }
            }
        }
        // Phi(Phi^{-1}(y)) = y to relative 1e-9 on a sampled grid.
        for &y in &geometric_grid(1e-9, 1e9, 37) {
            let t = self.inverse(y)?;
            let back = self.eval_saturating(t);
            if (back - y).abs() > 1e-9 * (1.0 + y.abs()) {
                return Err(Error::InvalidParameter(format!(
                    "inverse consistency fails at y={y:e}: Phi(Phi^{{-1}}(y))={back:e}"
                )));
            }
        }
        Ok(())
    }
}

fn parse_kv(part: &str, key: &str) -> Option<f64> {
    let (k, v) = part.trim().split_once('=')?;
    if k.trim() != key {
        return None;
    }
    v.trim().parse().ok()
}

fn strip_parens(s: &str) -> Option<&str> {
    s.trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .map(str::trim)
}

/// Split `"(..)|(..)"` at the top-level bar, honoring nested parentheses.
fn split_operands(text: &str) -> Option<(&str, &str)> {
    let text = text.trim();
    let mut depth = 0i32;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '|' if depth == 0 => {
                let left = strip_parens(&text[..i])?;
                let right = strip_parens(&text[i + 1..])?;
                return Some((left, right));
            }
            _ => {}
        }
    }
    None
}

fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Solve `f(t) = y` for an increasing `f` with `f(0) = 0`: bracket by
/// doubling/halving from `start`, then bisect until
/// `|f(t) - y| <= 1e-12 (1 + y)` (or the bracket reaches ulp width).
fn bisect_increasing<F>(f: F, y: f64, start: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let fv = |t: f64| f(t).unwrap_or(f64::INFINITY);
    let mut lo;
    let mut hi;
    if fv(start) >= y {
        hi = start;
        lo = start;
        let mut guard = 0;
        while fv(lo) > y {
            lo /= 2.0;
            guard += 1;
            if lo < 1e-300 || guard > 1100 {
                // f is continuous with f(0)=0, so the root is below any
                // representable positive t; report the bracket.
                return Err(Error::NoConvergence(format!(
                    "bracketing stalled below t={lo:e} for target {y:e}"
                )));
            }
        }
    } else {
        lo = start;
        hi = start;
        let mut guard = 0;
        while fv(hi) < y {
            hi *= 2.0;
            guard += 1;
            if guard > 1100 {
                return Err(Error::NoConvergence(format!(
                    "bracketing stalled above t={hi:e} for target {y:e}"
                )));
            }
        }
    }
    for _ in 0..BISECT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let value = fv(mid);
        if (value - y).abs() <= BISECT_REL_TOL * (1.0 + y) || hi - lo <= f64::EPSILON * hi {
            return Ok(mid);
        }
        if value < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence(format!(
        "bisection cap hit, bracket [{lo:e}, {hi:e}] for target {y:e}"
    )))
}

/// Luxemburg norm `inf { lambda > 0 : sum Phi(mu_i / lambda) <= 1 }` of a
/// nonincreasing nonnegative sequence. Returns 0 for the all-zero sequence.
pub fn luxemburg_norm(mu: &[f64], phi: &YoungFunction) -> Result<f64> {
    for (i, &v) in mu.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sequence entry {i} is {v}, expected finite and >= 0"
            )));
        }
        if i > 0 && v > mu[i - 1] {
            return Err(Error::NotSorted(i));
        }
    }
    let top = mu.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0.0);
    }
    let f = |lambda: f64| -> f64 {
        let mut acc = 0.0;
        for &v in mu {
            if v == 0.0 {
                break; // sorted, the rest are zero
            }
            acc += phi.eval_saturating(v / lambda);
            if !acc.is_finite() {
                return f64::INFINITY;
            }
        }
        acc
    };
    // F is strictly decreasing in lambda where positive; bracket from mu_1.
    let mut lo = top;
    let mut hi = top;
    if f(top) > 1.0 {
        let mut guard = 0;
        while f(hi) > 1.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 1100 {
                return Err(Error::NoConvergence(format!(
                    "Luxemburg bracket stalled above lambda={hi:e}"
                )));
            }
        }
    } else {
        let mut guard = 0;
        loop {
            let next = lo / 2.0;
            if f(next) > 1.0 {
                lo = next;
                break;
            }
            lo = next;
            guard += 1;
            if lo < 1e-300 || guard > 1100 {
                return Err(Error::NoConvergence(format!(
                    "Luxemburg bracket stalled below lambda={lo:e}"
                )));
            }
        }
    }
    for _ in 0..BISECT_MAX_ITER {
        if hi - lo <= BISECT_REL_TOL * hi {
            return Ok(hi);
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence(format!(
        "Luxemburg bisection cap hit, bracket [{lo:e}, {hi:e}]"
    )))
}

/// Analytic tail envelope `mu_n <= c n^{-exponent}` valid from `start_index`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEnvelope {
    pub c: f64,
    pub exponent: f64,
    pub start_index: usize,
}

impl TailEnvelope {
    /// Construct and verify domination over the enumerated values from
    /// `start_index` (1-based) onward.
    pub fn new(c: f64, exponent: f64, start_index: usize, observed: &[f64]) -> Result<Self> {
        if !(c > 0.0) || !(exponent > 0.0) || start_index < 1 {
            return Err(Error::InvalidParameter(format!(
                "envelope needs c > 0, exponent > 0, start_index >= 1 \
                 (got c={c}, exponent={exponent}, start_index={start_index})"
            )));
        }
        let env = Self {
            c,
            exponent,
            start_index,
        };
        for n in start_index..=observed.len() {
            let bound = env.bound(n);
            if observed[n - 1] > bound * (1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "envelope does not dominate value {:e} at index {n} (bound {:e})",
                    observed[n - 1],
                    bound
                )));
            }
        }
        Ok(env)
    }

    /// Smallest dominating amplitude for the given decay rate, snapped up by
    /// one part in 1e12 so the domination check is stable.
    pub fn dominating(exponent: f64, start_index: usize, observed: &[f64]) -> Result<Self> {
        if start_index > observed.len() {
            return Err(Error::InvalidParameter(
                "envelope start index beyond the enumerated values".into(),
            ));
        }
        let mut c = 0.0f64;
        for n in start_index..=observed.len() {
            c = c.max(observed[n - 1] * (n as f64).powf(exponent));
        }
        if c == 0.0 {
            c = f64::MIN_POSITIVE;
        }
        Self::new(c * (1.0 + 1e-12), exponent, start_index, observed)
    }

    pub fn bound(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(-self.exponent)
    }
}

/// Diagnostics behind a [`series_membership`] verdict.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesDiagnostics {
    pub head_sum: f64,
    pub tail_upper: Option<f64>,
    pub tail_lower: f64,
    pub condensation_ratio: f64,
    pub minorant: Option<f64>,
}

/// Convergence verdict for `sum_n Phi(mu_n)` where the head is enumerated
/// exactly and the tail is modeled by the envelope.
///
/// The tail is certified through the integral test on the monotone envelope
/// term `a(x) = Phi(c x^{-r})`: `Holds` reports the finite bound
/// `head + int_N a`, `Fails` reports a harmonic minorant witness, and when
/// the dyadic condensation diagnostics can certify neither direction the
/// verdict is `Inconclusive` with both partial bounds.
pub fn series_membership(
    env: &TailEnvelope,
    phi: &YoungFunction,
    head: &[f64],
) -> Result<Verdict> {
    Ok(series_membership_full(env, phi, head)?.0)
}

pub fn series_membership_full(
    env: &TailEnvelope,
    phi: &YoungFunction,
    head: &[f64],
) -> Result<(Verdict, SeriesDiagnostics)> {
    if head.len() + 1 < env.start_index {
        return Err(Error::InvalidParameter(format!(
            "head covers {} entries but the envelope only starts at {}",
            head.len(),
            env.start_index
        )));
    }
    let n0 = head.len().max(1) as f64;
    let mut head_sum = 0.0;
    for &v in head {
        head_sum += phi.eval(v)?;
    }
    let term = |x: f64| phi.eval_saturating(env.c * x.powf(-env.exponent));

    // Dyadic condensation diagnostics d_k = x_k * a(x_k), x_k = n0 * 2^k.
    let mut d = Vec::with_capacity(51);
    for k in 0..=50 {
        let x = n0 * 2f64.powi(k);
        let v = x * term(x);
        if !v.is_finite() {
            break;
        }
        d.push(v);
        if v == 0.0 {
            break;
        }
    }
    let ratios: Vec<f64> = d
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let recent: &[f64] = &ratios[ratios.len().saturating_sub(10)..];
    let last_d = d.last().copied().unwrap_or(0.0);
    let recent_max = recent.iter().copied().fold(0.0f64, f64::max);
    let mean_log_slope = if recent.is_empty() {
        f64::NEG_INFINITY
    } else {
        recent.iter().map(|r| r.ln()).sum::<f64>() / recent.len() as f64
    };

    let convergent = !ratios.is_empty() && (last_d == 0.0 || recent_max <= 0.995);
    let divergent = !convergent && mean_log_slope >= -1e-4 && last_d > 1e-9;

    if convergent {
        let rho = (recent_max + 1e-3).min(0.999);
        let upper_tail = envelope_integral(&term, n0, rho);
        let lower_tail = envelope_integral_lower(&term, n0 + 1.0);
        let diag = SeriesDiagnostics {
            head_sum,
            tail_upper: Some(upper_tail),
            tail_lower: lower_tail,
            condensation_ratio: recent_max,
            minorant: None,
        };
        return Ok((
            Verdict::Holds {
                margin: head_sum + upper_tail,
            },
            diag,
        ));
    }
    if divergent {
        // All sampled x carry x * a(x) >= m, a harmonic minorant.
        let m = d.iter().copied().fold(f64::INFINITY, f64::min);
        let diag = SeriesDiagnostics {
            head_sum,
            tail_upper: None,
            tail_lower: f64::INFINITY,
            condensation_ratio: recent_max,
            minorant: Some(m),
        };
        return Ok((
            Verdict::Fails {
                margin: -m,
                witness: format!(
                    "terms dominate {:.6e}/n beyond n={}, partial sums grow like {:.6e}*ln(N)",
                    m, head.len().max(1), m
                ),
            },
            diag,
        ));
    }
    let lower_tail = envelope_integral_lower(&term, n0 + 1.0);
    let diag = SeriesDiagnostics {
        head_sum,
        tail_upper: None,
        tail_lower: lower_tail,
        condensation_ratio: recent_max,
        minorant: None,
    };
    Ok((
        Verdict::Inconclusive {
            lower: head_sum + lower_tail,
            upper: None,
        },
        diag,
    ))
}

/// Upper bound for `int_A^inf a(x) dx` by dyadic Simpson panels plus a
/// geometric remainder with ratio `rho`; the quadrature cuts off once the
/// integrand falls below 1e-18.
fn envelope_integral<F: Fn(f64) -> f64>(a: &F, from: f64, rho: f64) -> f64 {
    let mut total = 0.0;
    let mut left = from;
    for _ in 0..200 {
        let right = left * 2.0;
        total += simpson_log(a, left, right);
        if a(right) < 1e-18 {
            // a is nonincreasing: remaining <= sum_k (x_{k+1}-x_k) a(x_k)
            // = sum_k g(x_k) <= g(right)/(1-rho).
            total += right * a(right) / (1.0 - rho);
            return total;
        }
        left = right;
    }
    total
}

/// Finite lower bound for `int_A^inf a(x) dx` (truncated at the quadrature
/// horizon; still a valid lower bound since `a >= 0`).
fn envelope_integral_lower<F: Fn(f64) -> f64>(a: &F, from: f64) -> f64 {
    let mut total = 0.0;
    let mut left = from;
    for _ in 0..200 {
        let right = left * 2.0;
        let panel = simpson_log(a, left, right);
        if !panel.is_finite() {
            return f64::INFINITY;
        }
        total += panel;
        if a(right) < 1e-18 {
            return total;
        }
        left = right;
    }
    total
}

/// Composite Simpson for `int a(x) dx` over `[lo, hi]` in log coordinates.
fn simpson_log<F: Fn(f64) -> f64>(a: &F, lo: f64, hi: f64) -> f64 {
    const NODES: usize = 32; // even panel count
    let (ulo, uhi) = (lo.ln(), hi.ln());
    let h = (uhi - ulo) / NODES as f64;
    let g = |u: f64| {
        let x = u.exp();
        x * a(x)
    };
    let mut acc = g(ulo) + g(uhi);
    for i in 1..NODES {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(ulo + h * i as f64);
    }
    acc * h / 3.0
}
