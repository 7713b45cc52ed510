//! Cubic Hermite interpolation helpers.

/// Cubic Hermite interpolant on `[x0, x1]` from endpoint values and slopes.
/// Returns the value and the first derivative at `x`.
#[inline]
pub fn hermite(x0: f64, x1: f64, y0: f64, m0: f64, y1: f64, m1: f64, x: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let (b, db) = hermite_basis(s);
    let value = b[0] * y0 + b[1] * h * m0 + b[2] * y1 + b[3] * h * m1;
    let deriv = (db[0] * y0 + db[1] * h * m0 + db[2] * y1 + db[3] * h * m1) / h;
    (value, deriv)
}

/// Hermite basis `(h00, h10, h01, h11)` and its derivative with respect to `s`.
#[inline]
pub fn hermite_basis(s: f64) -> ([f64; 4], [f64; 4]) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        [
            2.0 * s3 - 3.0 * s2 + 1.0,
            s3 - 2.0 * s2 + s,
            -2.0 * s3 + 3.0 * s2,
            s3 - s2,
        ],
        [
            6.0 * s2 - 6.0 * s,
            3.0 * s2 - 4.0 * s + 1.0,
            -6.0 * s2 + 6.0 * s,
            3.0 * s2 - 2.0 * s,
        ],
    )
}

/// Locate the cell `[xs[i], xs[i+1]]` containing `x` in a strictly increasing
/// sequence. Returns `None` outside `[xs[0], xs[n-1]]` (with a relative slack
/// of a few ulps at the ends).
pub fn locate(xs: &[f64], x: f64) -> Option<usize> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let lo = xs[0];
    let hi = xs[n - 1];
    let slack = 1e-12 * (hi - lo).abs().max(1.0);
    if !(x >= lo - slack && x <= hi + slack) {
        return None;
    }
    let i = match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i,
        Err(i) => i.saturating_sub(1),
    };
    Some(i.min(n - 2))
}

/// Monotone piecewise cubic (Fritsch–Carlson) through tabulated points.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Option<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return None;
        }
        let delta: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            m[i] = if delta[i - 1] * delta[i] <= 0.0 {
                0.0
            } else {
                0.5 * (delta[i - 1] + delta[i])
            };
        }
        for i in 0..n - 1 {
            if delta[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
                continue;
            }
            let a = m[i] / delta[i];
            let b = m[i + 1] / delta[i];
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                m[i] = tau * a * delta[i];
                m[i + 1] = tau * b * delta[i];
            }
        }
        Some(Self { xs, ys, slopes: m })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    /// Value and derivative; `None` outside the tabulated range.
    pub fn eval(&self, x: f64) -> Option<(f64, f64)> {
        let i = locate(&self.xs, x)?;
        Some(hermite(
            self.xs[i],
            self.xs[i + 1],
            self.ys[i],
            self.slopes[i],
            self.ys[i + 1],
            self.slopes[i + 1],
            x,
        ))
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubics() {
        let p = |x: f64| 2.0 * x * x * x - x * x + 3.0 * x - 1.0;
        let dp = |x: f64| 6.0 * x * x - 2.0 * x + 3.0;
        let (x0, x1) = (0.3, 1.1);
        for k in 0..=10 {
            let x = x0 + (x1 - x0) * k as f64 / 10.0;
            let (v, d) = hermite(x0, x1, p(x0), dp(x0), p(x1), dp(x1), x);
            assert!((v - p(x)).abs() < 1e-13);
            assert!((d - dp(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn locate_edges() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(locate(&xs, 0.0), Some(0));
        assert_eq!(locate(&xs, 3.0), Some(2));
        assert_eq!(locate(&xs, 1.5), Some(1));
        assert_eq!(locate(&xs, 1.0), Some(1));
        assert_eq!(locate(&xs, 3.5), None);
        assert_eq!(locate(&xs, f64::NAN), None);
    }

    #[test]
    fn monotone_cubic_preserves_monotonicity() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.1, 0.2, 5.0, 5.1];
        let mc = MonotoneCubic::new(xs, ys).unwrap();
        let mut prev = -1.0;
        for k in 0..=400 {
            let x = k as f64 / 100.0;
            let (v, d) = mc.eval(x).unwrap();
            assert!(v >= prev - 1e-15);
            assert!(d >= -1e-12);
            prev = v;
        }
        assert!(mc.eval(4.5).is_none());
    }
}
