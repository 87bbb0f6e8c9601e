//! Eigenvalues of complex matrices up to 4x4 from the characteristic
//! polynomial, with a residual-guarded refinement step.

use num_complex::Complex64;

use crate::linalg::solve_complex;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix of dimension 1 to 4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallMatrix {
    n: usize,
    a: [[Complex64; 4]; 4],
}

impl SmallMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=4).contains(&n), "dimension {n} outside 1..=4");
        SmallMatrix {
            n,
            a: [[ZERO; 4]; 4],
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let mut m = Self::zeros(rows.len());
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), rows.len(), "matrix must be square");
            for (j, v) in row.iter().enumerate() {
                m.a[i][j] = *v;
            }
        }
        m
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| Complex64::new(*x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i][j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.n).map(|i| self.a[i][..self.n].to_vec()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(self.a[i][j].norm());
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    pub fn mul(&self, other: &SmallMatrix) -> SmallMatrix {
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                for j in 0..self.n {
                    out.a[i][j] += self.a[i][k] * other.a[k][j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.a[i][j] * v[j]).sum())
            .collect()
    }

    pub fn scaled(&self, s: f64) -> SmallMatrix {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.a[i][j] *= s;
            }
        }
        out
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.a[i][j].norm_sqr();
            }
        }
        s.sqrt()
    }
}

/// Characteristic polynomial `det(lambda I - A)` by Faddeev-LeVerrier,
/// coefficients in ascending powers with the leading one last.
pub fn char_poly(a: &SmallMatrix) -> Vec<Complex64> {
    let n = a.n;
    let mut c = vec![ZERO; n + 1];
    c[n] = ONE;
    let mut m = SmallMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a.mul(&m);
        for i in 0..n {
            next.a[i][i] += c[n - k + 1];
        }
        m = next;
        c[n - k] = -a.mul(&m).trace() / k as f64;
    }
    c
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for coef in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + coef;
    }
    (p, dp)
}

/// All roots of a monic polynomial (ascending coefficients) by Aberth-Ehrlich
/// simultaneous iteration.
pub fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let c: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    if n == 1 {
        return vec![-c[0]];
    }
    let center = -c[n - 1] / n as f64;
    // Fujiwara-style bound on the root radius about the origin.
    let radius = (1..=n)
        .map(|k| c[n - k].norm().powf(1.0 / k as f64))
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            center
                + Complex64::from_polar(
                    radius,
                    2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4,
                )
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(&c, z[i]);
            if p == ZERO {
                continue;
            }
            let ratio = p / dp;
            let mut repulse = ZERO;
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d != ZERO {
                        repulse += ONE / d;
                    }
                }
            }
            let step = ratio / (ONE - ratio * repulse);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-17 {
            break;
        }
    }
    z
}

/// An eigenvalue with its right eigenvector when one could be extracted.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Option<Vec<Complex64>>,
    /// `||A v - lambda v|| / ||A||` for the normalised vector, or infinity.
    pub residual: f64,
}

fn residual(a: &SmallMatrix, lambda: Complex64, v: &[Complex64]) -> f64 {
    let av = a.mul_vec(v);
    av.iter()
        .zip(v)
        .map(|(x, y)| (x - lambda * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn normalise(v: &mut [Complex64]) -> bool {
    let s = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if s == 0.0 || !s.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= s);
    true
}

/// Two inverse-iteration sweeps at a slightly shifted eigenvalue.
fn inverse_iteration(a: &SmallMatrix, lambda: Complex64) -> Option<Vec<Complex64>> {
    let n = a.n;
    let shift = lambda + Complex64::new(1e-13, 1e-13) * a.max_abs().max(1e-300);
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.3 - 0.05 * i as f64))
        .collect();
    for _ in 0..2 {
        let mut m = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = a.a[i][j];
            }
            m[i * n + i] -= shift;
        }
        solve_complex(&mut m, &mut v, n)?;
        if !normalise(&mut v) {
            return None;
        }
    }
    Some(v)
}

/// Eigenpairs: roots of the characteristic polynomial of the scaled matrix,
/// then one refinement `lambda <- v^H A v` accepted only if it lowers the
/// residual.
pub fn eig_pairs(a: &SmallMatrix) -> Vec<EigenPair> {
    let scale = a.max_abs();
    if scale == 0.0 {
        return (0..a.n)
            .map(|i| {
                let mut v = vec![ZERO; a.n];
                v[i] = ONE;
                EigenPair {
                    value: ZERO,
                    vector: Some(v),
                    residual: 0.0,
                }
            })
            .collect();
    }
    let b = a.scaled(1.0 / scale);
    let roots = poly_roots(&char_poly(&b));
    roots
        .into_iter()
        .map(|lambda| {
            let Some(v) = inverse_iteration(&b, lambda) else {
                return EigenPair {
                    value: lambda * scale,
                    vector: None,
                    residual: f64::INFINITY,
                };
            };
            let r0 = residual(&b, lambda, &v);
            let bv = b.mul_vec(&v);
            let rq: Complex64 = v.iter().zip(&bv).map(|(x, y)| x.conj() * y).sum();
            let r1 = residual(&b, rq, &v);
            let (value, res) = if r1 < r0 { (rq, r1) } else { (lambda, r0) };
            EigenPair {
                value: value * scale,
                vector: Some(v),
                residual: res,
            }
        })
        .collect()
}

/// All eigenvalues with algebraic multiplicity.
pub fn eig_small(a: &SmallMatrix) -> Vec<Complex64> {
    eig_pairs(a).into_iter().map(|p| p.value).collect()
}
