//! Natural cubic splines for envelope construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How extrema are extended past the signal ends before splining.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BoundaryPolicy {
    /// Reflect the two extrema nearest each end across the end sample.
    #[default]
    MirrorExtrema,
    /// Use each end sample as an extra knot for both envelopes.
    ClampEndpoints,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub position: f64,
    pub value: f64,
}

impl Knot {
    pub fn new(position: f64, value: f64) -> Self {
        Self { position, value }
    }
}

/// Adds boundary knots to the extrema of `signal` according to `policy`.
pub fn extend_knots(extrema: &[(usize, f64)], signal: &[f64], policy: BoundaryPolicy) -> Vec<Knot> {
    let inner = extrema.iter().map(|&(i, v)| Knot::new(i as f64, v));
    let n = signal.len();
    if n == 0 {
        return inner.collect();
    }
    let last = (n - 1) as f64;
    match policy {
        BoundaryPolicy::MirrorExtrema => {
            let k = extrema.len().min(2);
            let left = extrema[..k]
                .iter()
                .rev()
                .map(|&(i, v)| Knot::new(-(i as f64), v));
            let right = extrema[extrema.len() - k..]
                .iter()
                .rev()
                .map(|&(i, v)| Knot::new(2.0 * last - i as f64, v));
            left.chain(inner).chain(right).collect()
        }
        BoundaryPolicy::ClampEndpoints => {
            let mut knots = Vec::with_capacity(extrema.len() + 2);
            if extrema.first().is_none_or(|&(i, _)| i > 0) {
                knots.push(Knot::new(0.0, signal[0]));
            }
            knots.extend(inner);
            if extrema.last().is_none_or(|&(i, _)| i < n - 1) {
                knots.push(Knot::new(last, signal[n - 1]));
            }
            knots
        }
    }
}

/// Cubic spline with zero second derivative at the outermost knots.
///
/// Outside the knot range the spline continues along its end tangent,
/// which keeps the curve C2 there as well.
#[derive(Debug, Clone)]
pub struct NaturalSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl NaturalSpline {
    pub fn fit(knots: &[Knot]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InsufficientExtrema);
        }
        if knots.windows(2).any(|w| w[1].position <= w[0].position) {
            return Err(Error::InvalidConfig(
                "spline knot positions must be strictly increasing".into(),
            ));
        }
        let xs: Vec<f64> = knots.iter().map(|k| k.position).collect();
        let ys: Vec<f64> = knots.iter().map(|k| k.value).collect();
        let second = natural_second_derivatives(&xs, &ys);
        Ok(Self { xs, ys, second })
    }

    pub fn knots(&self) -> impl Iterator<Item = Knot> + '_ {
        self.xs.iter().zip(&self.ys).map(|(&x, &y)| Knot::new(x, y))
    }

    pub fn second_derivatives(&self) -> &[f64] {
        &self.second
    }

    fn piece(&self, seg: usize, x: f64) -> f64 {
        let (x0, x1) = (self.xs[seg], self.xs[seg + 1]);
        let (y0, y1) = (self.ys[seg], self.ys[seg + 1]);
        let (m0, m1) = (self.second[seg], self.second[seg + 1]);
        let h = x1 - x0;
        let t = x - x0;
        let slope = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
        y0 + t * (slope + t * (0.5 * m0 + t * (m1 - m0) / (6.0 * h)))
    }

    fn start_slope(&self) -> f64 {
        let h = self.xs[1] - self.xs[0];
        (self.ys[1] - self.ys[0]) / h - h * self.second[1] / 6.0
    }

    fn end_slope(&self) -> f64 {
        let n = self.xs.len();
        let h = self.xs[n - 1] - self.xs[n - 2];
        (self.ys[n - 1] - self.ys[n - 2]) / h + h * self.second[n - 2] / 6.0
    }

    /// Evaluates at `x`, assuming `seg` is the correct piece when `x` is
    /// inside the knot range.
    fn eval_in(&self, seg: usize, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] {
            self.ys[0] + self.start_slope() * (x - self.xs[0])
        } else if x > self.xs[n - 1] {
            self.ys[n - 1] + self.end_slope() * (x - self.xs[n - 1])
        } else {
            self.piece(seg, x)
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let seg = self.xs.partition_point(|&k| k <= x).clamp(1, self.xs.len() - 1) - 1;
        self.eval_in(seg, x)
    }

    /// Evaluates at every integer position `0..len`.
    pub fn sample(&self, len: usize) -> Vec<f64> {
        let last_seg = self.xs.len() - 2;
        let mut seg = 0;
        (0..len)
            .map(|i| {
                let x = i as f64;
                while seg < last_seg && self.xs[seg + 1] <= x {
                    seg += 1;
                }
                self.eval_in(seg, x)
            })
            .collect()
    }
}

/// Solves the natural-spline tridiagonal system for the knot second
/// derivatives with the Thomas algorithm.
fn natural_second_derivatives(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    let interior = n - 2;
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

    // row r (r = 0..interior) couples m[r], m[r+1], m[r+2]
    let mut c_prime = vec![0.0; interior];
    let mut d_prime = vec![0.0; interior];
    for r in 0..interior {
        let sub = h[r];
        let diag = 2.0 * (h[r] + h[r + 1]);
        let sup = h[r + 1];
        let rhs = 6.0 * (slope[r + 1] - slope[r]);
        if r == 0 {
            c_prime[r] = sup / diag;
            d_prime[r] = rhs / diag;
        } else {
            let denom = diag - sub * c_prime[r - 1];
            c_prime[r] = sup / denom;
            d_prime[r] = (rhs - sub * d_prime[r - 1]) / denom;
        }
    }
    m[interior] = d_prime[interior - 1];
    for r in (0..interior - 1).rev() {
        m[r + 1] = d_prime[r] - c_prime[r] * m[r + 2];
    }
    m
}

/// Natural cubic spline through `knots`, sampled at `0..domain_length`.
///
/// `knots` are expected to be boundary-extended already; see
/// [`extend_knots`].
pub fn spline_envelope(knots: &[Knot], domain_length: usize) -> Result<Vec<f64>> {
    Ok(NaturalSpline::fit(knots)?.sample(domain_length))
}
