//! Natural cubic spline on sorted knots, used to tabulate expensive
//! log-densities once and evaluate them cheaply afterwards.

pub(crate) struct Spline {
    pub(crate) xs: Vec<f64>,
    pub(crate) ys: Vec<f64>,
    d2: Vec<f64>,
}

impl Spline {
    pub(crate) fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let n = xs.len();
        let mut d2 = vec![0.0; n];
        if n >= 3 {
            let mut diag = vec![0.0; n];
            let mut sup = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[i] = 2.0 * (h0 + h1);
                sup[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
                if i > 1 {
                    let w = h0 / diag[i - 1];
                    diag[i] -= w * sup[i - 1];
                    rhs[i] -= w * rhs[i - 1];
                }
            }
            d2[n - 2] = rhs[n - 2] / diag[n - 2];
            for i in (1..n - 2).rev() {
                d2[i] = (rhs[i] - sup[i] * d2[i + 1]) / diag[i];
            }
        }
        Self { xs, ys, d2 }
    }

    /// Evaluate inside [xs[0], xs[last]]; the caller clamps outside.
    pub(crate) fn eval(&self, x: f64) -> f64 {
        let j = self.xs.partition_point(|&t| t < x).clamp(1, self.xs.len() - 1) - 1;
        let h = self.xs[j + 1] - self.xs[j];
        let a = (self.xs[j + 1] - x) / h;
        let b = (x - self.xs[j]) / h;
        a * self.ys[j]
            + b * self.ys[j + 1]
            + ((a * a * a - a) * self.d2[j] + (b * b * b - b) * self.d2[j + 1]) * h * h / 6.0
    }
}
