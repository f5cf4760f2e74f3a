//! Monotone piecewise-cubic Hermite interpolation (Fritsch–Carlson).

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

/// Limits a prescribed end slope so the end interval stays monotone.
fn limit_end_slope(d: f64, secant: f64) -> f64 {
    if secant == 0.0 || d.signum() != secant.signum() || d == 0.0 {
        0.0
    } else if d.abs() > 3.0 * secant.abs() {
        3.0 * secant
    } else {
        d
    }
}

impl Pchip {
    /// Knots must be strictly increasing in `x`; `start_slope` and `end_slope`
    /// are targets for the outer derivatives and get limited if they would
    /// break monotonicity on the first or last interval.
    pub(crate) fn new(xs: Vec<f64>, ys: Vec<f64>, start_slope: f64, end_slope: f64) -> Self {
        let n = xs.len();
        assert!(n >= 2 && ys.len() == n);
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]));
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let secant: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ds = vec![0.0; n];
        ds[0] = limit_end_slope(start_slope, secant[0]);
        ds[n - 1] = limit_end_slope(end_slope, secant[n - 2]);
        for i in 1..n - 1 {
            let (s0, s1) = (secant[i - 1], secant[i]);
            if s0 * s1 <= 0.0 {
                ds[i] = 0.0;
            } else {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                ds[i] = (w1 + w2) / (w1 / s0 + w2 / s1);
            }
        }
        Pchip { xs, ys, ds }
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&xi| xi <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let s = ((x - self.xs[i]) / h).clamp(0.0, 1.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }
}
