//! Cubic spline on a uniform grid with zero slope at the left end and a
//! natural right end, the boundary shape of a radial profile.

#[derive(Clone, Debug)]
pub struct RadialSpline {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl RadialSpline {
    /// `y` sampled at `x0 + i h`; at least three knots.
    pub fn new(x0: f64, h: f64, y: &[f64]) -> Self {
        let n = y.len();
        assert!(n >= 3, "spline needs at least three knots");
        // Tridiagonal system for the knot curvatures.
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 2.0;
        sup[0] = 1.0;
        rhs[0] = 6.0 / h * ((y[1] - y[0]) / h);
        for i in 1..n - 1 {
            sub[i] = 1.0;
            diag[i] = 4.0;
            sup[i] = 1.0;
            rhs[i] = 6.0 / (h * h) * (y[i + 1] - 2.0 * y[i] + y[i - 1]);
        }
        diag[n - 1] = 1.0;
        rhs[n - 1] = 0.0;
        for i in 1..n {
            let w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 1] = rhs[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
        }
        RadialSpline {
            x0,
            h,
            y: y.to_vec(),
            m,
        }
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let s = (x - self.x0) / self.h;
        let last = self.y.len() - 1;
        if !(s >= 0.0) || s > last as f64 {
            return None;
        }
        let i = (s.floor() as usize).min(last - 1);
        Some((i, s - i as f64))
    }

    /// Value, first and second derivative at `x`; zero outside the grid.
    pub fn eval3(&self, x: f64) -> (f64, f64, f64) {
        let Some((i, t)) = self.locate(x) else {
            return (0.0, 0.0, 0.0);
        };
        let h = self.h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let a = 1.0 - t;
        let v = a * y0 + t * y1 + h * h / 6.0 * ((a * a * a - a) * m0 + (t * t * t - t) * m1);
        let d = (y1 - y0) / h + h / 6.0 * (-(3.0 * a * a - 1.0) * m0 + (3.0 * t * t - 1.0) * m1);
        let dd = a * m0 + t * m1;
        (v, d, dd)
    }

    pub fn value(&self, x: f64) -> f64 {
        let Some((i, t)) = self.locate(x) else {
            return 0.0;
        };
        let h = self.h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        let a = 1.0 - t;
        a * y0 + t * y1 + h * h / 6.0 * ((a * a * a - a) * m0 + (t * t * t - t) * m1)
    }
}
