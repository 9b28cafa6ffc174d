//! Shape-preserving piecewise cubic Hermite interpolation (PCHIP slopes).

#[derive(Debug, Clone)]
pub(crate) struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl Pchip {
    /// `xs` strictly increasing, at least two knots.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let k = xs.len();
        debug_assert!(k >= 2 && ys.len() == k);
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..k - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let mut ds = vec![0.0; k];
        if k == 2 {
            ds[0] = del[0];
            ds[1] = del[0];
            return Pchip { xs, ys, ds };
        }
        for i in 1..k - 1 {
            let (a, b) = (del[i - 1], del[i]);
            if a * b > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                ds[i] = (w1 + w2) / (w1 / a + w2 / b);
            }
        }
        ds[0] = end_slope(h[0], h[1], del[0], del[1]);
        ds[k - 1] = end_slope(h[k - 2], h[k - 3], del[k - 2], del[k - 3]);
        Pchip { xs, ys, ds }
    }

    pub fn lo(&self) -> f64 {
        self.xs[0]
    }

    pub fn hi(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// Value at x, clamped to the end values outside the knot range.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0];
        }
        if x >= self.xs[k - 1] {
            return self.ys[k - 1];
        }
        let i = self.xs.partition_point(|&v| v <= x) - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let v = h00 * self.ys[i] + h * (h10 * self.ds[i] + h11 * self.ds[i + 1]) + h01 * self.ys[i + 1];
        // the slopes keep each piece inside its end values; the clamp only removes rounding
        let (a, b) = (self.ys[i], self.ys[i + 1]);
        v.clamp(a.min(b), a.max(b))
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Uniform knots on [lo, hi] merged with extra knots inside the range.
pub(crate) fn knots_with(lo: f64, hi: f64, count: usize, extra: &[f64]) -> Vec<f64> {
    let count = count.max(2);
    let step = (hi - lo) / (count - 1) as f64;
    let mut xs: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
    *xs.last_mut().unwrap() = hi;
    xs.extend(extra.iter().copied().filter(|&e| e > lo && e < hi));
    xs.sort_by(f64::total_cmp);
    let tol = 1e-9 * step;
    let mut out: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        match out.last() {
            Some(&p) if x - p <= tol => {
                // keep exact extra knots in place of a nearly coincident uniform one
                if extra.contains(&x) {
                    *out.last_mut().unwrap() = x;
                }
            }
            _ => out.push(x),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_functions() {
        let xs: Vec<f64> = (0..400).map(|i| i as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|x| (-x * x).exp()).collect();
        let p = Pchip::new(xs, ys);
        let mut worst: f64 = 0.0;
        for i in 0..3990 {
            let x = i as f64 * 0.001 + 0.0003;
            worst = worst.max((p.eval(x) - (-x * x).exp()).abs());
        }
        // harmonic-mean slopes are second order where the slope changes sign
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn monotone_data_gives_monotone_interpolant() {
        let xs = vec![0.0, 1.0, 1.5, 4.0, 4.1, 7.0];
        let ys = vec![0.0, 0.0, 2.0, 2.1, 5.0, 5.0];
        let p = Pchip::new(xs, ys);
        let mut prev = p.eval(0.0);
        for i in 1..=7000 {
            let v = p.eval(i as f64 * 0.001);
            assert!(v >= prev - 1e-15);
            assert!(v <= 5.0 + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn knot_merging() {
        let k = knots_with(0.0, 1.0, 5, &[0.25, 0.3, 2.0]);
        assert_eq!(k, vec![0.0, 0.25, 0.3, 0.5, 0.75, 1.0]);
    }
}
