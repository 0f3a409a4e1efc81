//! Continuous carriers: the Gaussian family (closed under multiplicative
//! fusion) and a uniform-grid log-density for everything else.

use crate::error::{Error, Result};

/// Trapezoidal integral of `exp(log_density)` must land within this distance
/// of 1 for a [`GridDensity`] to be valid.
pub const GRID_SUM_TOLERANCE: f64 = 1e-6;

/// A normal distribution, stored as `(mean, variance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDistribution {
    mean: f64,
    variance: f64,
}

impl GaussianDistribution {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidMean(mean));
        }
        if !variance.is_finite() || variance <= 0.0 {
            return Err(Error::InvalidVariance(variance));
        }
        Ok(Self { mean, variance })
    }

    pub fn standard() -> Self {
        Self {
            mean: 0.0,
            variance: 1.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Log of the density at `x`.
    pub fn log_density(&self, x: f64) -> f64 {
        let z = x - self.mean;
        -0.5 * (z * z / self.variance) - 0.5 * (2.0 * std::f64::consts::PI * self.variance).ln()
    }
}

/// A probability density sampled at `M >= 2` uniform grid points on
/// `[lower, upper]`, stored as log-density values and normalized so the
/// trapezoidal integral of the density is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    lower: f64,
    upper: f64,
    log_density: Vec<f64>,
}

impl GridDensity {
    /// Normalize raw log-density values on the given grid.
    ///
    /// Entries may be `-inf` (zero density). Fails with `EmptySupport` when
    /// the integral of the exponentiated values is zero.
    pub fn from_log_density(lower: f64, upper: f64, raw: Vec<f64>) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() || lower >= upper {
            return Err(Error::InvalidGrid(format!(
                "bounds [{lower}, {upper}] must be finite with lower < upper"
            )));
        }
        if raw.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 grid points, got {}",
                raw.len()
            )));
        }
        for (index, &value) in raw.iter().enumerate() {
            if value.is_nan() || value == f64::INFINITY {
                return Err(Error::NonFiniteLogWeight { index, value });
            }
        }
        let log_integral = log_trapezoid(&raw, step(lower, upper, raw.len()));
        if log_integral == f64::NEG_INFINITY {
            return Err(Error::EmptySupport);
        }
        let log_density = raw.into_iter().map(|v| v - log_integral).collect();
        Ok(Self {
            lower,
            upper,
            log_density,
        })
    }

    /// Sample a log-density function at `points` uniform grid points and
    /// normalize.
    pub fn from_fn<F: Fn(f64) -> f64>(
        lower: f64,
        upper: f64,
        points: usize,
        log_density: F,
    ) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 grid points, got {points}"
            )));
        }
        let h = step(lower, upper, points);
        let raw = (0..points)
            .map(|i| log_density(lower + i as f64 * h))
            .collect();
        Self::from_log_density(lower, upper, raw)
    }

    /// Grid rendering of a Gaussian.
    pub fn gaussian(
        g: &GaussianDistribution,
        lower: f64,
        upper: f64,
        points: usize,
    ) -> Result<Self> {
        Self::from_fn(lower, upper, points, |x| g.log_density(x))
    }

    /// The flat density on `[lower, upper]`.
    pub fn flat(lower: f64, upper: f64, points: usize) -> Result<Self> {
        Self::from_fn(lower, upper, points, |_| 0.0)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn points(&self) -> usize {
        self.log_density.len()
    }

    pub fn step(&self) -> f64 {
        step(self.lower, self.upper, self.log_density.len())
    }

    /// Abscissa of grid point `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.lower + i as f64 * self.step()
    }

    pub fn log_density_values(&self) -> &[f64] {
        &self.log_density
    }

    /// Density at grid point `i`.
    pub fn density(&self, i: usize) -> f64 {
        self.log_density[i].exp()
    }

    pub fn same_grid(&self, other: &GridDensity) -> bool {
        self.lower == other.lower
            && self.upper == other.upper
            && self.log_density.len() == other.log_density.len()
    }

    /// Mean of the density by trapezoidal quadrature.
    pub fn mean(&self) -> f64 {
        self.moment(|x| x)
    }

    /// Variance of the density by trapezoidal quadrature.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(|x| (x - m) * (x - m))
    }

    fn moment<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let h = self.step();
        let n = self.log_density.len();
        let term = |i: usize| f(self.x(i)) * self.density(i);
        let mut sum = 0.5 * (term(0) + term(n - 1));
        for i in 1..n - 1 {
            sum += term(i);
        }
        sum * h
    }
}

fn step(lower: f64, upper: f64, points: usize) -> f64 {
    (upper - lower) / (points - 1) as f64
}

/// `log( h * (f0/2 + f1 + ... + f{n-1}/2) )` for `f = exp(raw)`, max-shifted.
fn log_trapezoid(raw: &[f64], h: f64) -> f64 {
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let n = raw.len();
    let mut sum = 0.5 * ((raw[0] - max).exp() + (raw[n - 1] - max).exp());
    for v in &raw[1..n - 1] {
        sum += (v - max).exp();
    }
    max + (sum * h).ln()
}
