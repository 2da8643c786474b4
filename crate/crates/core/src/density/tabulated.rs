//! Tabulated densities: piecewise-linear pdf on a strictly increasing grid.
//!
//! File format: a header line `# grid=<n>` followed by `n` lines of
//! whitespace-separated `x pdf` pairs. The loader renormalizes to unit
//! mass and records the factor it applied.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct Tabulated<T> {
    xs: Vec<T>,
    ps: Vec<T>,
    cdf: Vec<T>,
    normalization: T,
    mean: T,
    variance: T,
    min_step: T,
}

impl<T: Real> Tabulated<T> {
    /// Build from grid points, renormalizing the pdf values to unit mass.
    pub fn from_points(xs: Vec<T>, raw: Vec<T>) -> Result<Self> {
        if xs.len() != raw.len() {
            return Err(Error::TabulatedFormat(format!(
                "{} grid points but {} pdf values",
                xs.len(),
                raw.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::TabulatedFormat("need at least 2 grid points".into()));
        }
        let mut min_step = T::infinity();
        for w in xs.windows(2) {
            let step = w[1] - w[0];
            if step <= T::zero() {
                return Err(Error::TabulatedFormat("x values must be strictly increasing".into()));
            }
            min_step = min_step.min(step);
        }
        if raw.iter().any(|&p| p < T::zero() || !p.is_finite()) {
            return Err(Error::TabulatedFormat("pdf values must be finite and nonnegative".into()));
        }

        // Trapezoid mass of the raw table; piecewise-linear makes this exact.
        let mut mass = T::zero();
        for k in 0..xs.len() - 1 {
            mass += (xs[k + 1] - xs[k]) * (raw[k] + raw[k + 1]) * T::of(0.5);
        }
        if !(mass > T::zero()) {
            return Err(Error::TabulatedFormat("pdf integrates to zero".into()));
        }
        let ps: Vec<T> = raw.iter().map(|&p| p / mass).collect();

        let mut cdf = Vec::with_capacity(xs.len());
        cdf.push(T::zero());
        let mut acc = T::zero();
        for k in 0..xs.len() - 1 {
            acc += (xs[k + 1] - xs[k]) * (ps[k] + ps[k + 1]) * T::of(0.5);
            cdf.push(acc);
        }
        // Pin the final value so inverse-CDF sampling never runs off the end.
        *cdf.last_mut().unwrap() = T::one();

        let (m1, m2) = piecewise_linear_moments(&xs, &ps);
        Ok(Tabulated {
            xs,
            ps,
            cdf,
            normalization: mass,
            mean: m1,
            variance: m2 - m1 * m1,
            min_step,
        })
    }

    /// Parse the `# grid=<n>` + `x pdf` text format.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = loop {
            match lines.next() {
                Some(Ok(line)) if line.trim().is_empty() => continue,
                Some(Ok(line)) => break line,
                Some(Err(e)) => return Err(Error::TabulatedFormat(e.to_string())),
                None => return Err(Error::TabulatedFormat("empty file".into())),
            }
        };
        let n: usize = header
            .trim()
            .strip_prefix("# grid=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::TabulatedFormat(format!("expected '# grid=<n>' header, got '{header}'")))?;

        let mut xs = Vec::with_capacity(n);
        let mut ps = Vec::with_capacity(n);
        for line in lines {
            let line = line.map_err(|e| Error::TabulatedFormat(e.to_string()))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let x: f64 = it
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::TabulatedFormat(format!("bad line '{line}'")))?;
            let p: f64 = it
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::TabulatedFormat(format!("bad line '{line}'")))?;
            xs.push(T::of(x));
            ps.push(T::of(p));
        }
        if xs.len() != n {
            return Err(Error::TabulatedFormat(format!(
                "header declared {n} points, found {}",
                xs.len()
            )));
        }
        Self::from_points(xs, ps)
    }

    pub fn grid(&self) -> &[T] {
        &self.xs
    }

    pub fn values(&self) -> &[T] {
        &self.ps
    }

    /// Mass the loader divided out to reach unit normalization.
    pub fn normalization(&self) -> T {
        self.normalization
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn variance(&self) -> T {
        self.variance
    }

    pub fn min_step(&self) -> T {
        self.min_step
    }

    pub fn lo(&self) -> T {
        self.xs[0]
    }

    pub fn hi(&self) -> T {
        *self.xs.last().unwrap()
    }

    fn cell_of(&self, x: T) -> Option<usize> {
        if x < self.lo() || x > self.hi() {
            return None;
        }
        // partition_point wants Ord; scan via binary search on PartialOrd.
        let mut lo = 0usize;
        let mut hi = self.xs.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    pub fn pdf(&self, x: T) -> T {
        match self.cell_of(x) {
            None => T::zero(),
            Some(k) => {
                let t = (x - self.xs[k]) / (self.xs[k + 1] - self.xs[k]);
                self.ps[k] + (self.ps[k + 1] - self.ps[k]) * t
            }
        }
    }

    /// Slope of the pdf inside the cell containing `x` (zero outside).
    pub fn dpdf(&self, x: T) -> T {
        match self.cell_of(x) {
            None => T::zero(),
            Some(k) => (self.ps[k + 1] - self.ps[k]) / (self.xs[k + 1] - self.xs[k]),
        }
    }

    /// Differential entropy of the piecewise-linear pdf, exactly: on a
    /// cell where `f` runs linearly from `f0` to `f1`,
    /// `int -f ln f = (g(f0) - g(f1)) / (4 slope)` with
    /// `g(u) = u^2 (2 ln u - 1)`.
    pub fn entropy_exact(&self) -> T {
        fn g<T: Real>(u: T) -> T {
            if u > T::zero() {
                u * u * (T::of(2.0) * u.ln() - T::one())
            } else {
                T::zero()
            }
        }
        let mut h = T::zero();
        for k in 0..self.xs.len() - 1 {
            let dx = self.xs[k + 1] - self.xs[k];
            let (f0, f1) = (self.ps[k], self.ps[k + 1]);
            let slope = (f1 - f0) / dx;
            if slope.abs() < T::of(1e-300) {
                h += dx * crate::quad::neg_p_log_p(f0);
            } else {
                h += (g(f0) - g(f1)) / (T::of(4.0) * slope);
            }
        }
        h
    }

    /// Fisher information of the piecewise-linear pdf, exactly: each cell
    /// contributes `slope * ln(f1/f0)`, which diverges wherever the pdf
    /// touches zero with nonzero slope.
    pub fn fisher_exact(&self) -> T {
        let mut j = T::zero();
        for k in 0..self.xs.len() - 1 {
            let dx = self.xs[k + 1] - self.xs[k];
            let (f0, f1) = (self.ps[k], self.ps[k + 1]);
            let slope = (f1 - f0) / dx;
            if slope == T::zero() {
                continue;
            }
            if f0 <= T::zero() || f1 <= T::zero() {
                return T::infinity();
            }
            j += slope * (f1 / f0).ln();
        }
        j
    }

    /// Inverse-CDF sample for uniform `u` in [0, 1).
    ///
    /// The in-cell inverse solves the quadratic CDF of the linear pdf, so
    /// samples are distributed exactly as `pdf` describes.
    pub fn inverse_cdf(&self, u: T) -> T {
        let u = u.max(T::zero()).min(T::one());
        let mut lo = 0usize;
        let mut hi = self.cdf.len() - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.cdf[mid] <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let k = lo;
        let h = self.xs[k + 1] - self.xs[k];
        let target = u - self.cdf[k];
        let f0 = self.ps[k];
        let df = self.ps[k + 1] - self.ps[k];
        // Solve h*(f0*t + df*t^2/2) = target for t in [0, 1].
        let t = if df.abs() < T::of(1e-30) {
            if f0 > T::zero() {
                target / (f0 * h)
            } else {
                T::of(0.5)
            }
        } else {
            let disc = (f0 * f0 + T::of(2.0) * df * target / h).max(T::zero());
            (disc.sqrt() - f0) / df
        };
        self.xs[k] + h * t.max(T::zero()).min(T::one())
    }
}

/// Exact first and second moments of a piecewise-linear pdf.
fn piecewise_linear_moments<T: Real>(xs: &[T], ps: &[T]) -> (T, T) {
    let half = T::of(0.5);
    let third = T::of(1.0 / 3.0);
    let quarter = T::of(0.25);
    let mut m1 = T::zero();
    let mut m2 = T::zero();
    for k in 0..xs.len() - 1 {
        let x0 = xs[k];
        let h = xs[k + 1] - xs[k];
        let f0 = ps[k];
        let df = ps[k + 1] - ps[k];
        // Integrals of x*f and x^2*f over the cell, with x = x0 + t*h.
        m1 += h * (x0 * f0 + (x0 * df + h * f0) * half + h * df * third);
        m2 += h * (x0 * x0 * f0
            + (x0 * x0 * df + T::of(2.0) * x0 * h * f0) * half
            + (T::of(2.0) * x0 * h * df + h * h * f0) * third
            + h * h * df * quarter);
    }
    (m1, m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn triangle() -> Tabulated<f64> {
        // Triangle on [0, 2] peaking at 1: mean 1, variance 1/6.
        let xs = vec![0.0, 1.0, 2.0];
        let ps = vec![0.0, 1.0, 0.0];
        Tabulated::from_points(xs, ps).unwrap()
    }

    #[test]
    fn renormalizes_and_records_factor() {
        let t = Tabulated::from_points(vec![0.0, 1.0, 2.0], vec![0.0, 3.0, 0.0]).unwrap();
        assert_relative_eq!(t.normalization(), 3.0, max_relative = 1e-14);
        assert_relative_eq!(t.pdf(1.0), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn triangle_moments() {
        let t = triangle();
        assert_relative_eq!(t.mean(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(t.variance(), 1.0 / 6.0, max_relative = 1e-13);
    }

    #[test]
    fn inverse_cdf_round_trip() {
        let t = triangle();
        // CDF of the triangle: u = x^2/2 on [0,1]; invert a few points.
        assert_relative_eq!(t.inverse_cdf(0.125), 0.5, max_relative = 1e-12);
        assert_relative_eq!(t.inverse_cdf(0.5), 1.0, max_relative = 1e-12);
        assert!(t.pdf(-0.1) == 0.0 && t.pdf(2.1) == 0.0);
    }

    #[test]
    fn parses_file_format() {
        let text = "# grid=3\n0.0 0.0\n1.0 2.0\n2.0 0.0\n";
        let t = Tabulated::<f64>::from_reader(text.as_bytes()).unwrap();
        assert_relative_eq!(t.mean(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(t.normalization(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Tabulated::<f64>::from_points(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(Tabulated::<f64>::from_points(vec![0.0, 1.0], vec![-1.0, 1.0]).is_err());
        assert!(Tabulated::<f64>::from_reader("# grid=5\n0 1\n1 1\n".as_bytes()).is_err());
        assert!(Tabulated::<f64>::from_reader("nonsense\n".as_bytes()).is_err());
    }
}
