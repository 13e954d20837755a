use std::fmt;
use std::ops::{Add, Mul, Sub};

use faer::Mat;
use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// How the represented window is closed off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Periodic window; shifts wrap around and the walk algebra holds exactly.
    Cyclic,
    /// Sites `0..n` of the half-line with a plain cutoff at the far edge.
    HalfLineTruncated,
    /// A finite window of the full line with plain cutoffs at both ends.
    FullLineTruncated,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Cyclic => "cyclic",
            Boundary::HalfLineTruncated => "half-line-truncated",
            Boundary::FullLineTruncated => "full-line-truncated",
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Contiguous block of lattice sites `start..start + sites`, each carrying
/// `components` internal states (1 for scalar operators, 2 for spinors).
///
/// Basis ordering is component-major: all sites of component 0, then all
/// sites of component 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub start: i64,
    pub sites: usize,
    pub components: usize,
}

impl Window {
    pub fn scalar(start: i64, sites: usize) -> Self {
        Window { start, sites, components: 1 }
    }

    pub fn spinor(start: i64, sites: usize) -> Self {
        Window { start, sites, components: 2 }
    }

    /// Window `[-sites/2, sites/2)` centred on the cut between -1 and 0.
    pub fn centered(sites: usize) -> Self {
        Window::scalar(-((sites / 2) as i64), sites)
    }

    pub fn half_line(sites: usize) -> Self {
        Window::scalar(0, sites)
    }

    pub fn dim(&self) -> usize {
        self.sites * self.components
    }

    /// One past the last site.
    pub fn end(&self) -> i64 {
        self.start + self.sites as i64
    }

    pub fn contains(&self, x: i64) -> bool {
        x >= self.start && x < self.end()
    }

    pub fn sites_iter(&self) -> impl Iterator<Item = i64> {
        self.start..self.end()
    }

    /// Basis index of site `x` in component `c`, if represented.
    pub fn index(&self, component: usize, x: i64) -> Option<usize> {
        (component < self.components && self.contains(x))
            .then(|| component * self.sites + (x - self.start) as usize)
    }

    /// Site and component of basis index `i`.
    pub fn site(&self, i: usize) -> (usize, i64) {
        (i / self.sites, self.start + (i % self.sites) as i64)
    }

    /// Periodic representative of `x` inside the window.
    pub fn wrap(&self, x: i64) -> i64 {
        self.start + (x - self.start).rem_euclid(self.sites as i64)
    }
}

/// Dense complex matrix of an operator restricted to a lattice window.
///
/// `margin` records how many sites at the low and high ends of the window are
/// padding: present so that products see every neighbour of the interior, but
/// dropped by [`OperatorMatrix::strip_margin`] before traces are taken.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    entries: Mat<Complex64>,
    boundary: Boundary,
    window: Window,
    margin: (usize, usize),
}

impl OperatorMatrix {
    pub fn new(entries: Mat<Complex64>, boundary: Boundary, window: Window) -> Result<Self> {
        let dim = window.dim();
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: entries.nrows().max(entries.ncols()),
                right: dim,
            });
        }
        Ok(OperatorMatrix { entries, boundary, window, margin: (0, 0) })
    }

    pub fn from_fn(
        boundary: Boundary,
        window: Window,
        f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let dim = window.dim();
        OperatorMatrix {
            entries: Mat::from_fn(dim, dim, f),
            boundary,
            window,
            margin: (0, 0),
        }
    }

    pub fn zeros(boundary: Boundary, window: Window) -> Self {
        Self::from_fn(boundary, window, |_, _| ZERO)
    }

    pub fn identity(boundary: Boundary, window: Window) -> Self {
        Self::from_fn(boundary, window, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diagonal(boundary: Boundary, window: Window, diag: &[Complex64]) -> Result<Self> {
        if diag.len() != window.dim() {
            return Err(Error::DimensionMismatch { left: diag.len(), right: window.dim() });
        }
        Ok(Self::from_fn(boundary, window, |i, j| if i == j { diag[i] } else { ZERO }))
    }

    /// Scalar matrix on `n` sites from real entries; used for small literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { left: bad.len(), right: n });
        }
        Ok(Self::from_fn(Boundary::FullLineTruncated, Window::scalar(0, n), |i, j| {
            Complex64::new(rows[i][j], 0.0)
        }))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn margin(&self) -> (usize, usize) {
        self.margin
    }

    pub fn entries(&self) -> &Mat<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> Mat<Complex64> {
        self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[(i, j)] = value;
    }

    /// Entry between site `x` (component `cx`) and site `y` (component `cy`),
    /// zero when either site is outside the window.
    pub fn site_entry(&self, cx: usize, x: i64, cy: usize, y: i64) -> Complex64 {
        match (self.window.index(cx, x), self.window.index(cy, y)) {
            (Some(i), Some(j)) => self.entries[(i, j)],
            _ => ZERO,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Marks `lo` sites at the start and `hi` sites at the end as padding.
    pub fn with_margin(mut self, lo: usize, hi: usize) -> Result<Self> {
        if lo + hi >= self.window.sites {
            return Err(Error::DimensionTooSmall { min: lo + hi + 1, got: self.window.sites });
        }
        self.margin = (lo, hi);
        Ok(self)
    }

    /// Restriction to the interior sites, dropping the padding recorded in
    /// `margin`.
    pub fn strip_margin(&self) -> OperatorMatrix {
        let (lo, hi) = self.margin;
        if lo == 0 && hi == 0 {
            return self.clone();
        }
        let inner = Window {
            start: self.window.start + lo as i64,
            sites: self.window.sites - lo - hi,
            components: self.window.components,
        };
        let outer = self.window;
        let map = |i: usize| {
            let (c, x) = inner.site(i);
            outer.index(c, x).expect("interior site inside outer window")
        };
        let entries = Mat::from_fn(inner.dim(), inner.dim(), |i, j| self.entries[(map(i), map(j))]);
        OperatorMatrix { entries, boundary: self.boundary, window: inner, margin: (0, 0) }
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            entries: self.entries.adjoint().to_owned(),
            boundary: self.boundary,
            window: self.window,
            margin: self.margin,
        }
    }

    pub fn scale(&self, s: Complex64) -> OperatorMatrix {
        let n = self.dim();
        OperatorMatrix {
            entries: Mat::from_fn(n, n, |i, j| self.entries[(i, j)] * s),
            ..self.clone()
        }
    }

    pub fn scale_real(&self, s: f64) -> OperatorMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    /// `self + s·I`.
    pub fn shift_diagonal(&self, s: Complex64) -> OperatorMatrix {
        let mut out = self.clone();
        for i in 0..self.dim() {
            out.entries[(i, i)] += s;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entries[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                m = m.max(self.entries[(i, j)].norm());
            }
        }
        m
    }

    /// `max |M - M*|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut m = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                m = m.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        m
    }

    /// `max |self - other|` entrywise.
    pub fn max_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok((self - other).max_abs())
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        let n = self.dim();
        (0..n).all(|j| (0..n).all(|i| self.entries[(i, j)].im == 0.0))
    }

    pub fn check_same_dim(&self, other: &OperatorMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    /// Numerical rank: singular values above `tol · max(1, σ_max)`.
    pub fn rank(&self, tol: f64) -> Result<usize> {
        let sv = super::singular_values(self)?;
        let top = sv.iter().cloned().fold(0.0, f64::max).max(1.0);
        Ok(sv.iter().filter(|&&s| s > tol * top).count())
    }
}

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix { entries: &self.entries * &rhs.entries, ..self.clone() }
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix { entries: &self.entries + &rhs.entries, ..self.clone() }
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        assert_eq!(self.dim(), rhs.dim(), "operator dimension mismatch");
        OperatorMatrix { entries: &self.entries - &rhs.entries, ..self.clone() }
    }
}

/// Periodic left shift `(Lψ)(x) = ψ(x+1)` on `n` sites.
pub fn cyclic_shift(n: usize) -> Result<OperatorMatrix> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    Ok(OperatorMatrix::from_fn(Boundary::Cyclic, Window::scalar(0, n), |i, j| {
        if j == (i + 1) % n {
            ONE
        } else {
            ZERO
        }
    }))
}

/// Right shift `v δ_x = δ_{x+1}` on the half-line sites `0..n`, cut off at
/// the far edge.
pub fn halfline_shift(n: usize) -> Result<OperatorMatrix> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, got: n });
    }
    Ok(OperatorMatrix::from_fn(Boundary::HalfLineTruncated, Window::half_line(n), |i, j| {
        if i == j + 1 {
            ONE
        } else {
            ZERO
        }
    }))
}
