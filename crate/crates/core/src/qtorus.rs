//! The truncated quantum-torus algebra: twisted Fourier multiplication,
//! adjoints, trace, Laplacian eigenvalues, and GNS matrix representations.
//!
//! Elements are coefficient tables `a = sum a_n U^n` over the lattice ball
//! `|n|_inf <= R`, with the generator relation
//! `U_j U_k = e^{2 pi i theta_jk} U_k U_j`. Under the phase convention
//! `phi(m, n) = sum_{j>k} m_j n_k theta_jk` the monomials compose as
//! `U^m U^n = e^{2 pi i phi(m,n)} U^{m+n}`, which pins every formula below.
//! The Laplacian is taken in the positive convention
//! `lambda_n = 4 pi^2 |n|^2` so the spectral calculus of later modules is
//! well-defined.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default dimension guard; higher d needs explicit opt-in.
pub const MAX_DIM: usize = 4;
/// Guard on enumerated lattice points (not the dense-matrix cap).
pub const MAX_POINTS: usize = 1 << 22;
/// Dense matrices (and their amplifications) are capped at this side length.
pub const DENSE_CAP: usize = 4096;

/// Real skew-symmetric deformation matrix, stored exactly from its strict
/// upper triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaMatrix {
    d: usize,
    upper: Vec<f64>, // row-major strict upper triangle: (0,1), (0,2), ..., (d-2,d-1)
}

impl ThetaMatrix {
    pub fn zero(d: usize) -> Self {
        Self {
            d,
            upper: vec![0.0; d * (d - 1) / 2],
        }
    }

    pub fn from_upper_triangle(d: usize, upper: &[f64]) -> Result<Self> {
        let want = d * (d - 1) / 2;
        if upper.len() != want {
            return Err(Error::InvalidParameter(format!(
                "theta upper triangle for d={d} needs {want} entries, got {}",
                upper.len()
            )));
        }
        if upper.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("theta entries must be finite".into()));
        }
        Ok(Self {
            d,
            upper: upper.to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn upper_triangle(&self) -> &[f64] {
        &self.upper
    }

    /// Entry `theta_{jk}` (0-based indices); skew-symmetry is exact.
    pub fn entry(&self, j: usize, k: usize) -> f64 {
        if j == k {
            return 0.0;
        }
        let (a, b, sign) = if j < k { (j, k, 1.0) } else { (k, j, -1.0) };
        // offset of (a, b) in the row-major strict upper triangle
        let idx = a * self.d - a * (a + 1) / 2 + (b - a - 1);
        sign * self.upper[idx]
    }
}

/// Lattice ball `|n|_inf <= R`, enumerated graded by `|n|^2` then
/// lexicographic; index 0 is the origin. The Laplacian eigenvalues are
/// nondecreasing along this enumeration, so the sorted eigenvalue rank is
/// the grid index plus one.
#[derive(Debug)]
pub struct LatticeGrid {
    d: usize,
    radius: i64,
    points: Vec<Vec<i64>>,
    eigenvalues: Vec<f64>,
    index: HashMap<Vec<i64>, usize>,
}

impl PartialEq for LatticeGrid {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.radius == other.radius
    }
}

/// Laplacian eigenvalue `4 pi^2 |n|^2` of the mode `U^n`.
pub fn laplace_eigenvalue(n: &[i64]) -> f64 {
    let sq: i64 = n.iter().map(|&x| x * x).sum();
    4.0 * PI * PI * sq as f64
}

/// Sobolev weight `(1 + lambda_n)^{s/2}`.
pub fn sobolev_weight(n: &[i64], s: f64) -> f64 {
    (1.0 + laplace_eigenvalue(n)).powf(s / 2.0)
}

impl LatticeGrid {
    pub fn new(d: usize, radius: i64) -> Result<Self> {
        Self::new_with_caps(d, radius, MAX_DIM, MAX_POINTS)
    }

    /// Construction with explicit guards, for callers that opt out of the
    /// defaults.
    pub fn new_with_caps(
        d: usize,
        radius: i64,
        max_dim: usize,
        max_points: usize,
    ) -> Result<Self> {
        if d == 0 || d > max_dim {
            return Err(Error::InvalidParameter(format!(
                "dimension {d} outside the supported range 1..={max_dim}"
            )));
        }
        if radius < 0 {
            return Err(Error::InvalidParameter("radius must be >= 0".into()));
        }
        let side = 2 * radius as usize + 1;
        let size = side.checked_pow(d as u32).filter(|&s| s <= max_points);
        let Some(size) = size else {
            return Err(Error::InvalidParameter(format!(
                "grid of {side}^{d} points exceeds the {max_points} cap"
            )));
        };
        let mut points = Vec::with_capacity(size);
        let mut cursor = vec![-radius; d];
        loop {
            points.push(cursor.clone());
            let mut axis = d;
            loop {
                if axis == 0 {
                    break;
                }
                axis -= 1;
                if cursor[axis] < radius {
                    cursor[axis] += 1;
                    for c in cursor.iter_mut().skip(axis + 1) {
                        *c = -radius;
                    }
                    break;
                }
                if axis == 0 {
                    let mut grid = Self::finish(d, radius, points);
                    grid.index = grid
                        .points
                        .iter()
                        .enumerate()
                        .map(|(i, p)| (p.clone(), i))
                        .collect();
                    return Ok(grid);
                }
            }
        }
    }

    fn finish(d: usize, radius: i64, mut points: Vec<Vec<i64>>) -> Self {
        points.sort_by(|a, b| {
            let qa: i64 = a.iter().map(|&x| x * x).sum();
            let qb: i64 = b.iter().map(|&x| x * x).sum();
            qa.cmp(&qb).then_with(|| a.cmp(b))
        });
        let eigenvalues = points.iter().map(|p| laplace_eigenvalue(p)).collect();
        Self {
            d,
            radius,
            points,
            eigenvalues,
            index: HashMap::new(),
        }
    }

    /// Shared handle, the form every element and operator holds.
    pub fn shared(d: usize, radius: i64) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(d, radius)?))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[i64] {
        &self.points[i]
    }

    pub fn points(&self) -> impl Iterator<Item = &[i64]> {
        self.points.iter().map(|p| p.as_slice())
    }

    pub fn index_of(&self, n: &[i64]) -> Option<usize> {
        self.index.get(n).copied()
    }

    /// Eigenvalue of the mode at grid index `i` (nondecreasing in `i`).
    pub fn eigenvalue(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Enlarged grid of radius `R + pad` for interior-block checks.
    pub fn padded(&self, pad: i64) -> Result<Arc<Self>> {
        Self::shared(self.d, self.radius + pad)
    }
}

/// Phase in turns: `phi(m, n) = sum_{j>k} m_j n_k theta_jk`, the convention
/// under which `U^m U^n = e^{2 pi i phi(m,n)} U^{m+n}` and the defining
/// relation holds.
pub fn twisted_phase(m: &[i64], n: &[i64], theta: &ThetaMatrix) -> f64 {
    let mut acc = 0.0;
    for (j, &mj) in m.iter().enumerate().skip(1) {
        if mj == 0 {
            continue;
        }
        for (k, &nk) in n.iter().enumerate().take(j) {
            if nk != 0 {
                acc += (mj * nk) as f64 * theta.entry(j, k);
            }
        }
    }
    acc
}

fn cis_turns(turns: f64) -> Complex64 {
    Complex64::cis(2.0 * PI * turns)
}

/// Truncated algebra element `a = sum a_n U^n` with its deformation data.
///
/// `dropped_mass` reports the total `sum |a_m b_n|` of products that fell
/// outside the grid in the multiplication that produced this element.
#[derive(Debug, Clone)]
pub struct TorusElement {
    grid: Arc<LatticeGrid>,
    theta: ThetaMatrix,
    coeffs: Vec<Complex64>,
    dropped_mass: f64,
}

impl TorusElement {
    pub fn zero(grid: Arc<LatticeGrid>, theta: ThetaMatrix) -> Result<Self> {
        if theta.dim() != grid.dim() {
            return Err(Error::GridMismatch(format!(
                "theta dimension {} vs grid dimension {}",
                theta.dim(),
                grid.dim()
            )));
        }
        let len = grid.len();
        Ok(Self {
            grid,
            theta,
            coeffs: vec![Complex64::ZERO; len],
            dropped_mass: 0.0,
        })
    }

    /// The unit `1 = U^0`.
    pub fn one(grid: Arc<LatticeGrid>, theta: ThetaMatrix) -> Result<Self> {
        let origin = vec![0i64; grid.dim()];
        Self::monomial(grid, theta, &origin, Complex64::ONE)
    }

    /// `c * U^n`.
    pub fn monomial(
        grid: Arc<LatticeGrid>,
        theta: ThetaMatrix,
        n: &[i64],
        c: Complex64,
    ) -> Result<Self> {
        let mut el = Self::zero(grid, theta)?;
        let idx = el.grid.index_of(n).ok_or_else(|| {
            Error::GridMismatch(format!("lattice point {n:?} outside the grid"))
        })?;
        el.coeffs[idx] = c;
        Ok(el)
    }

    pub fn from_coeffs(
        grid: Arc<LatticeGrid>,
        theta: ThetaMatrix,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for a grid of {} points",
                coeffs.len(),
                grid.len()
            )));
        }
        let mut el = Self::zero(grid, theta)?;
        el.coeffs = coeffs;
        Ok(el)
    }

    /// Seeded random element with independent complex Gaussian coefficients.
    pub fn random<R: Rng>(grid: Arc<LatticeGrid>, theta: ThetaMatrix, rng: &mut R) -> Self {
        let coeffs = (0..grid.len())
            .map(|_| crate::rng::complex_gaussian(rng))
            .collect();
        Self {
            grid,
            theta,
            coeffs,
            dropped_mass: 0.0,
        }
    }

    /// Random element with the constant mode projected out.
    pub fn random_trace_zero<R: Rng>(
        grid: Arc<LatticeGrid>,
        theta: ThetaMatrix,
        rng: &mut R,
    ) -> Self {
        let mut el = Self::random(grid, theta, rng);
        el.coeffs[0] = Complex64::ZERO;
        el
    }

    pub fn grid(&self) -> &Arc<LatticeGrid> {
        &self.grid
    }

    pub fn theta(&self) -> &ThetaMatrix {
        &self.theta
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: &[i64]) -> Complex64 {
        self.grid
            .index_of(n)
            .map_or(Complex64::ZERO, |i| self.coeffs[i])
    }

    pub fn set_coeff(&mut self, n: &[i64], c: Complex64) -> Result<()> {
        let idx = self
            .grid
            .index_of(n)
            .ok_or_else(|| Error::GridMismatch(format!("lattice point {n:?} outside the grid")))?;
        self.coeffs[idx] = c;
        Ok(())
    }

    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }

    fn same_frame(&self, other: &Self) -> Result<()> {
        if self.grid.dim() != other.grid.dim()
            || self.grid.radius() != other.grid.radius()
            || self.theta != other.theta
        {
            return Err(Error::GridMismatch(
                "elements live on different grids or deformations".into(),
            ));
        }
        Ok(())
    }

    /// Twisted convolution `(ab)_p = sum_{m+n=p} a_m b_n e^{2 pi i phi(m,n)}`.
    ///
    /// Products landing outside the grid are dropped and their absolute mass
    /// is reported on the result.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_frame(other)?;
        let grid = &self.grid;
        let mut out = vec![Complex64::ZERO; grid.len()];
        let mut dropped = 0.0;
        let mut target = vec![0i64; grid.dim()];
        for (i, &am) in self.coeffs.iter().enumerate() {
            if am == Complex64::ZERO {
                continue;
            }
            let m = grid.point(i);
            for (j, &bn) in other.coeffs.iter().enumerate() {
                if bn == Complex64::ZERO {
                    continue;
                }
                let n = grid.point(j);
                for (t, (&mm, &nn)) in target.iter_mut().zip(m.iter().zip(n.iter())) {
                    *t = mm + nn;
                }
                match grid.index_of(&target) {
                    Some(k) => {
                        let ph = twisted_phase(m, n, &self.theta);
                        out[k] += am * bn * cis_turns(ph);
                    }
                    None => dropped += (am * bn).norm(),
                }
            }
        }
        Ok(Self {
            grid: Arc::clone(grid),
            theta: self.theta.clone(),
            coeffs: out,
            dropped_mass: dropped,
        })
    }

    /// Adjoint `a*`: coefficientwise
    /// `(a*)_{-n} = conj(a_n) e^{-2 pi i phi(n, -n)}`, so that the matrix
    /// representation of `a*` is the conjugate transpose of that of `a`.
    pub fn adjoint(&self) -> Self {
        let grid = &self.grid;
        let mut out = vec![Complex64::ZERO; grid.len()];
        let mut neg = vec![0i64; grid.dim()];
        for (i, &an) in self.coeffs.iter().enumerate() {
            if an == Complex64::ZERO {
                continue;
            }
            let n = grid.point(i);
            for (t, &x) in neg.iter_mut().zip(n.iter()) {
                *t = -x;
            }
            // -n is always in the symmetric grid
            let k = grid.index_of(&neg).expect("grid is symmetric under negation");
            let ph = twisted_phase(n, &neg, &self.theta);
            out[k] = an.conj() * cis_turns(-ph);
        }
        Self {
            grid: Arc::clone(grid),
            theta: self.theta.clone(),
            coeffs: out,
            dropped_mass: self.dropped_mass,
        }
    }

    /// Canonical trace `tau(a) = a_0`.
    pub fn trace(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `l^2` coefficient norm; equals `tau(a* a)^{1/2}` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sobolev norm `(sum_n w_s(n)^2 |a_n|^2)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let w = (1.0 + self.grid.eigenvalue(i)).powf(s / 2.0);
                w * w * c.norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in &mut out.coeffs {
            *v *= c;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_frame(other)?;
        let mut out = self.clone();
        for (v, w) in out.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *v += w;
        }
        out.dropped_mass = self.dropped_mass + other.dropped_mass;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-Complex64::ONE))
    }

    /// Copy the coefficients into a larger grid (same d and theta).
    pub fn embed_into(&self, grid: Arc<LatticeGrid>) -> Result<Self> {
        if grid.dim() != self.grid.dim() || grid.radius() < self.grid.radius() {
            return Err(Error::GridMismatch(
                "target grid must share the dimension and be at least as large".into(),
            ));
        }
        let mut out = Self::zero(grid, self.theta.clone())?;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != Complex64::ZERO {
                out.set_coeff(self.grid.point(i), c)?;
            }
        }
        Ok(out)
    }

    /// Dense GNS left-multiplication matrix:
    /// `M(a)[m, n] = a_{m-n} e^{2 pi i phi(m-n, n)}`.
    pub fn matrix_rep(&self) -> MatrixRep {
        let grid = &self.grid;
        let m = grid.len();
        let mut mat = DMatrix::<Complex64>::zeros(m, m);
        let mut diff = vec![0i64; grid.dim()];
        for col in 0..m {
            let n = grid.point(col);
            for row in 0..m {
                let r = grid.point(row);
                for (t, (&a, &b)) in diff.iter_mut().zip(r.iter().zip(n.iter())) {
                    *t = a - b;
                }
                if let Some(qi) = grid.index_of(&diff) {
                    let c = self.coeffs[qi];
                    if c != Complex64::ZERO {
                        mat[(row, col)] = c * cis_turns(twisted_phase(&diff, n, &self.theta));
                    }
                }
            }
        }
        MatrixRep {
            grid: Arc::clone(grid),
            entries: mat,
        }
    }

    /// JSON object `{d, R, theta: upper-triangle list, coeffs: [[n..., re, im], ...]}`.
    /// The round-trip is exact.
    pub fn to_json(&self) -> String {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::ZERO)
            .map(|(i, c)| {
                let mut row: Vec<f64> = self.grid.point(i).iter().map(|&x| x as f64).collect();
                row.push(c.re);
                row.push(c.im);
                row
            })
            .collect();
        let body = ElementJson {
            d: self.grid.dim(),
            radius: self.grid.radius(),
            theta: self.theta.upper_triangle().to_vec(),
            coeffs,
        };
        serde_json::to_string(&body).expect("element serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let body: ElementJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("element JSON: {e}")))?;
        let grid = LatticeGrid::shared(body.d, body.radius)?;
        let theta = ThetaMatrix::from_upper_triangle(body.d, &body.theta)?;
        let mut el = Self::zero(grid, theta)?;
        for row in &body.coeffs {
            if row.len() != body.d + 2 {
                return Err(Error::InvalidParameter(format!(
                    "coefficient row needs {} entries, got {}",
                    body.d + 2,
                    row.len()
                )));
            }
            let n: Vec<i64> = row[..body.d]
                .iter()
                .map(|&x| {
                    if x.fract() != 0.0 {
                        Err(Error::InvalidParameter(format!(
                            "lattice coordinate {x} is not an integer"
                        )))
                    } else {
                        Ok(x as i64)
                    }
                })
                .collect::<Result<_>>()?;
            el.set_coeff(&n, Complex64::new(row[body.d], row[body.d + 1]))?;
        }
        Ok(el)
    }
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    d: usize,
    #[serde(rename = "R")]
    radius: i64,
    theta: Vec<f64>,
    coeffs: Vec<Vec<f64>>,
}

/// Dense complex operator over a fixed lattice enumeration.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    grid: Arc<LatticeGrid>,
    entries: DMatrix<Complex64>,
}

impl MatrixRep {
    pub fn identity(grid: Arc<LatticeGrid>) -> Self {
        let m = grid.len();
        Self {
            grid,
            entries: DMatrix::identity(m, m),
        }
    }

    /// Diagonal operator in the grid enumeration.
    pub fn from_diagonal(grid: Arc<LatticeGrid>, diag: &[f64]) -> Result<Self> {
        if diag.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} diagonal entries for a grid of {} points",
                diag.len(),
                grid.len()
            )));
        }
        let m = grid.len();
        let mut entries = DMatrix::<Complex64>::zeros(m, m);
        for (i, &v) in diag.iter().enumerate() {
            entries[(i, i)] = Complex64::new(v, 0.0);
        }
        Ok(Self { grid, entries })
    }

    pub fn from_entries(grid: Arc<LatticeGrid>, entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != grid.len() || entries.ncols() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{}x{} entries for a grid of {} points",
                entries.nrows(),
                entries.ncols(),
                grid.len()
            )));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(Self { grid, entries })
    }

    pub fn grid(&self) -> &Arc<LatticeGrid> {
        &self.grid
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    fn same_frame(&self, other: &Self) -> Result<()> {
        if self.grid.dim() != other.grid.dim() || self.grid.radius() != other.grid.radius() {
            return Err(Error::GridMismatch("operators live on different grids".into()));
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            entries: self.entries.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_frame(other)?;
        Ok(Self {
            grid: Arc::clone(&self.grid),
            entries: &self.entries * &other.entries,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_frame(other)?;
        Ok(Self {
            grid: Arc::clone(&self.grid),
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_frame(other)?;
        Ok(Self {
            grid: Arc::clone(&self.grid),
            entries: &self.entries - &other.entries,
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            entries: self.entries.map(|v| v * c),
        }
    }

    /// Matrix trace (unnormalized); divide by `grid.len()` for `tau`.
    pub fn trace(&self) -> Complex64 {
        self.entries.diagonal().iter().sum()
    }

    pub fn hs_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = self.entries.nrows();
        for i in 0..m {
            for j in i..m {
                let a = self.entries[(i, j)];
                let b = self.entries[(j, i)].conj();
                if (a - b).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Rows and columns indexed by lattice points with `|n|_inf <= radius`,
    /// for interior-block comparisons on padded grids.
    pub fn interior_block(&self, radius: i64) -> DMatrix<Complex64> {
        let keep: Vec<usize> = (0..self.grid.len())
            .filter(|&i| self.grid.point(i).iter().all(|&x| x.abs() <= radius))
            .collect();
        let mut out = DMatrix::<Complex64>::zeros(keep.len(), keep.len());
        for (r, &i) in keep.iter().enumerate() {
            for (c, &j) in keep.iter().enumerate() {
                out[(r, c)] = self.entries[(i, j)];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn theta2(v: f64) -> ThetaMatrix {
        ThetaMatrix::from_upper_triangle(2, &[v]).unwrap()
    }

    #[test]
    fn grid_enumeration_is_graded() {
        let g = LatticeGrid::new(2, 2).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!(g.point(0), &[0, 0]);
        for w in g.eigenvalues().windows(2) {
            assert!(w[0] <= w[1]);
        }
        // graded-lex determinism: |n|^2 = 1 block in lex order
        assert_eq!(g.point(1), &[-1, 0]);
        assert_eq!(g.point(2), &[0, -1]);
        assert_eq!(g.point(3), &[0, 1]);
        assert_eq!(g.point(4), &[1, 0]);
    }

    #[test]
    fn phase_convention_matches_generator_relation() {
        let th = theta2(0.25);
        // U_1 U_2 lands on U^{(1,1)} with no phase
        assert_eq!(twisted_phase(&[1, 0], &[0, 1], &th), 0.0);
        // U_2 U_1 picks up theta_21 = -0.25
        assert_eq!(twisted_phase(&[0, 1], &[1, 0], &th), -0.25);
        // commutative torus
        let flat = theta2(0.0);
        assert_eq!(twisted_phase(&[3, -2], &[1, 5], &flat), 0.0);
    }

    #[test]
    fn defining_relation() {
        let grid = LatticeGrid::shared(2, 2).unwrap();
        for &t in &[0.0, 0.25, 0.3, -0.7] {
            let th = theta2(t);
            let u1 =
                TorusElement::monomial(Arc::clone(&grid), th.clone(), &[1, 0], Complex64::ONE)
                    .unwrap();
            let u2 =
                TorusElement::monomial(Arc::clone(&grid), th.clone(), &[0, 1], Complex64::ONE)
                    .unwrap();
            let lhs = u1.multiply(&u2).unwrap();
            let rhs = u2.multiply(&u1).unwrap().scale(cis_turns(t));
            for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs().iter()) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn unit_is_neutral() {
        let grid = LatticeGrid::shared(2, 2).unwrap();
        let th = theta2(0.3);
        let mut rng = crate::rng::stream(5, 0);
        let b = TorusElement::random(Arc::clone(&grid), th.clone(), &mut rng);
        let one = TorusElement::one(Arc::clone(&grid), th).unwrap();
        let prod = one.multiply(&b).unwrap();
        for (x, y) in prod.coeffs().iter().zip(b.coeffs().iter()) {
            assert_eq!(x, y);
        }
        assert_eq!(prod.dropped_mass(), 0.0);
    }

    #[test]
    fn generator_product_phases() {
        let grid = LatticeGrid::shared(2, 2).unwrap();
        let th = theta2(0.3);
        let a = TorusElement::monomial(Arc::clone(&grid), th.clone(), &[1, 0], Complex64::ONE)
            .unwrap();
        let b = TorusElement::monomial(Arc::clone(&grid), th.clone(), &[0, 1], Complex64::ONE)
            .unwrap();
        let ab = a.multiply(&b).unwrap();
        assert_abs_diff_eq!(ab.coeff(&[1, 1]).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ab.coeff(&[1, 1]).im, 0.0, epsilon = 1e-15);
        let ba = b.multiply(&a).unwrap();
        let want = cis_turns(-0.3);
        assert!((ba.coeff(&[1, 1]) - want).norm() < 1e-14);
    }

    #[test]
    fn multiply_matches_convolution_oracle_at_theta_zero() {
        // direct double-loop convolution oracle
        let grid = LatticeGrid::shared(2, 2).unwrap();
        let th = theta2(0.0);
        let mut rng = crate::rng::stream(6, 0);
        let a = TorusElement::random(Arc::clone(&grid), th.clone(), &mut rng);
        let b = TorusElement::random(Arc::clone(&grid), th.clone(), &mut rng);
        let prod = a.multiply(&b).unwrap();
        for idx in 0..grid.len() {
            let p = grid.point(idx);
            let mut want = Complex64::ZERO;
            for i in 0..grid.len() {
                let m = grid.point(i);
                let n = [p[0] - m[0], p[1] - m[1]];
                if let Some(j) = grid.index_of(&n) {
                    want += a.coeffs()[i] * b.coeffs()[j];
                }
            }
            assert!((prod.coeffs()[idx] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn adjoint_is_conjugate_transpose_on_matrices() {
        let grid = LatticeGrid::shared(2, 3).unwrap();
        let th = theta2(0.3);
        let mut rng = crate::rng::stream(7, 0);
        let a = TorusElement::random(Arc::clone(&grid), th, &mut rng);
        let lhs = a.adjoint().matrix_rep();
        let rhs = a.matrix_rep().adjoint();
        let diff = (lhs.entries() - rhs.entries()).map(|c| c.norm()).max();
        assert!(diff < 1e-12, "adjoint mismatch {diff}");
        // involution
        let back = a.adjoint().adjoint();
        for (x, y) in back.coeffs().iter().zip(a.coeffs().iter()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn adjoint_commutative_monomial() {
        let grid = LatticeGrid::shared(2, 2).unwrap();
        let th = theta2(0.0);
        let c = Complex64::new(0.4, -1.1);
        let a = TorusElement::monomial(Arc::clone(&grid), th, &[1, -2], c).unwrap();
        let adj = a.adjoint();
        assert_eq!(adj.coeff(&[-1, 2]), c.conj());
    }

    #[test]
    fn trace_is_constant_coefficient_and_tracial() {
        let grid = LatticeGrid::shared(2, 2).unwrap();
        let th = theta2(0.3);
        let one = TorusElement::one(Arc::clone(&grid), th.clone()).unwrap();
        assert_eq!(one.trace(), Complex64::ONE);
        let u = TorusElement::monomial(Arc::clone(&grid), th.clone(), &[1, 1], Complex64::ONE)
            .unwrap();
        assert_eq!(u.trace(), Complex64::ZERO);
        let mut rng = crate::rng::stream(8, 0);
        for _ in 0..5 {
            let a = TorusElement::random(Arc::clone(&grid), th.clone(), &mut rng);
            let b = TorusElement::random(Arc::clone(&grid), th.clone(), &mut rng);
            let ab = a.multiply(&b).unwrap().trace();
            let ba = b.multiply(&a).unwrap().trace();
            assert!((ab - ba).norm() < 1e-12);
            // Parseval: tau(a* a) = sum |a_n|^2
            let direct: f64 = a.coeffs().iter().map(|c| c.norm_sqr()).sum();
            let via_product = a.adjoint().multiply(&a).unwrap().trace();
            assert!((via_product.re - direct).abs() < 1e-12 * (1.0 + direct));
            assert!(via_product.im.abs() < 1e-12);
            assert!(via_product.re >= -1e-14);
        }
    }

    #[test]
    fn laplace_eigenvalues() {
        assert_eq!(laplace_eigenvalue(&[0, 0]), 0.0);
        assert_abs_diff_eq!(laplace_eigenvalue(&[1, 0]), 39.4784176043574, epsilon = 1e-10);
        assert_abs_diff_eq!(laplace_eigenvalue(&[1, 1]), 78.9568352087149, epsilon = 1e-10);
    }

    #[test]
    fn sobolev_weights() {
        assert_eq!(sobolev_weight(&[0, 0], 3.7), 1.0);
        assert_eq!(sobolev_weight(&[2, -5], 0.0), 1.0);
        let w = sobolev_weight(&[1, 0], 1.0);
        assert_abs_diff_eq!(w, (1.0 + 4.0 * PI * PI).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(w, 6.3623, epsilon = 1e-4);
    }

    #[test]
    fn matrix_rep_of_unit_is_identity() {
        let grid = LatticeGrid::shared(2, 1).unwrap();
        let th = theta2(0.3);
        let one = TorusElement::one(grid, th).unwrap();
        let m = one.matrix_rep();
        let id = DMatrix::<Complex64>::identity(9, 9);
        assert_eq!(m.entries(), &id);
    }

    #[test]
    fn matrix_rep_of_generator_is_twisted_shift() {
        let grid = LatticeGrid::shared(2, 1).unwrap();
        let th = theta2(0.3);
        let u1 = TorusElement::monomial(Arc::clone(&grid), th.clone(), &[1, 0], Complex64::ONE)
            .unwrap();
        let m = u1.matrix_rep();
        for col in 0..grid.len() {
            let n = grid.point(col);
            let target = [n[0] + 1, n[1]];
            for row in 0..grid.len() {
                let entry = m.entries()[(row, col)];
                if grid.point(row) == target {
                    assert_abs_diff_eq!(entry.norm(), 1.0, epsilon = 1e-14);
                    let want = cis_turns(twisted_phase(&[1, 0], n, &th));
                    assert!((entry - want).norm() < 1e-14);
                } else {
                    assert_eq!(entry, Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn matrix_rep_hs_norm_matches_overlap_oracle() {
        // ||M(a)||_HS^2 = sum_q |a_q|^2 * #{(m, n) in grid^2 : m - n = q}
        let grid = LatticeGrid::shared(2, 2).unwrap();
        let th = theta2(0.3);
        let mut rng = crate::rng::stream(9, 0);
        let a = TorusElement::random(Arc::clone(&grid), th, &mut rng);
        let hs = a.matrix_rep().hs_norm();
        let mut want = 0.0;
        for (qi, &c) in a.coeffs().iter().enumerate() {
            let q = grid.point(qi);
            let mut count = 0usize;
            for col in 0..grid.len() {
                let n = grid.point(col);
                let m = [n[0] + q[0], n[1] + q[1]];
                if grid.index_of(&m).is_some() {
                    count += 1;
                }
            }
            want += c.norm_sqr() * count as f64;
        }
        assert!((hs * hs - want).abs() < 1e-9 * (1.0 + want));
    }

    #[test]
    fn matrix_rep_is_homomorphism_on_interior_block() {
        // Assemble on the padded grid; the original-radius block of
        // M(a) M(b) - M(ab) vanishes when a, b are supported in the interior.
        let r = 2;
        let small = LatticeGrid::shared(2, r).unwrap();
        let padded = small.padded(r).unwrap();
        let th = theta2(0.3);
        let mut rng = crate::rng::stream(10, 0);
        let a_small =
            TorusElement::random(Arc::clone(&small), th.clone(), &mut rng);
        let b_small =
            TorusElement::random(Arc::clone(&small), th.clone(), &mut rng);
        let a = a_small.embed_into(Arc::clone(&padded)).unwrap();
        let b = b_small.embed_into(Arc::clone(&padded)).unwrap();
        let prod = a.multiply(&b).unwrap();
        assert_eq!(prod.dropped_mass(), 0.0); // fits inside the padding
        let lhs = a.matrix_rep().mul(&b.matrix_rep()).unwrap();
        let rhs = prod.matrix_rep();
        let diff = lhs.sub(&rhs).unwrap();
        let block = diff.interior_block(r);
        let max = block.iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(max < 1e-10, "interior block residue {max}");
    }

    #[test]
    fn associativity_on_interior() {
        let grid = LatticeGrid::shared(2, 2).unwrap();
        let padded = grid.padded(4).unwrap();
        let th = theta2(0.17);
        let mut rng = crate::rng::stream(12, 0);
        for _ in 0..3 {
            let a = TorusElement::random(Arc::clone(&grid), th.clone(), &mut rng)
                .embed_into(Arc::clone(&padded))
                .unwrap();
            let b = TorusElement::random(Arc::clone(&grid), th.clone(), &mut rng)
                .embed_into(Arc::clone(&padded))
                .unwrap();
            let c = TorusElement::random(Arc::clone(&grid), th.clone(), &mut rng)
                .embed_into(Arc::clone(&padded))
                .unwrap();
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            for i in 0..padded.len() {
                if padded.point(i).iter().all(|&x| x.abs() <= 2) {
                    assert!((left.coeffs()[i] - right.coeffs()[i]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn commutative_reduction_at_theta_zero() {
        let grid = LatticeGrid::shared(2, 2).unwrap();
        let th = theta2(0.0);
        let mut rng = crate::rng::stream(13, 0);
        let a = TorusElement::random(Arc::clone(&grid), th.clone(), &mut rng);
        let b = TorusElement::random(Arc::clone(&grid), th, &mut rng);
        let ab = a.multiply(&b).unwrap();
        let ba = b.multiply(&a).unwrap();
        for (x, y) in ab.coeffs().iter().zip(ba.coeffs().iter()) {
            assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn element_json_roundtrip_is_exact() {
        let grid = LatticeGrid::shared(2, 2).unwrap();
        let th = theta2(1.0 / 3.0);
        let mut rng = crate::rng::stream(14, 0);
        let a = TorusElement::random(grid, th, &mut rng);
        let text = a.to_json();
        let back = TorusElement::from_json(&text).unwrap();
        assert_eq!(a.coeffs(), back.coeffs());
        assert_eq!(a.theta(), back.theta());
        assert_eq!(text, back.to_json());
    }

    #[test]
    fn dropped_mass_reported() {
        // U^(2,0) * U^(1,0) lands outside R=2 and is dropped.
        let grid = LatticeGrid::shared(2, 2).unwrap();
        let th = theta2(0.0);
        let a = TorusElement::monomial(
            Arc::clone(&grid),
            th.clone(),
            &[2, 0],
            Complex64::new(2.0, 0.0),
        )
        .unwrap();
        let b = TorusElement::monomial(Arc::clone(&grid), th, &[1, 0], Complex64::new(3.0, 0.0))
            .unwrap();
        let prod = a.multiply(&b).unwrap();
        assert!(prod.coeffs().iter().all(|c| *c == Complex64::ZERO));
        assert_abs_diff_eq!(prod.dropped_mass(), 6.0, epsilon = 1e-15);
    }
}
