//! Lowest eigenpairs of a small symmetric tridiagonal matrix.
//!
//! Eigenvalues by Sturm-sequence bisection, eigenvectors by inverse iteration
//! with a partially pivoted tridiagonal LU.

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`
/// (`off.len() == diag.len() - 1`).
pub struct Tridiagonal<'a> {
    pub diag: &'a [f64],
    pub off: &'a [f64],
}

impl Tridiagonal<'_> {
    fn len(&self) -> usize {
        self.diag.len()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let b2 = if i > 0 {
                self.off[i - 1] * self.off[i - 1]
            } else {
                0.0
            };
            q = self.diag[i] - x - if i > 0 { b2 / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k` lowest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        (0..k.min(self.len()))
            .map(|i| {
                // smallest x with count_below(x) > i
                let (mut a, mut b) = (lo - scale * 1e-15, hi + scale * 1e-15);
                for _ in 0..200 {
                    let mid = 0.5 * (a + b);
                    if mid <= a || mid >= b || b - a <= 2.0 * f64::EPSILON * scale {
                        break;
                    }
                    if self.count_below(mid) > i {
                        b = mid;
                    } else {
                        a = mid;
                    }
                }
                0.5 * (a + b)
            })
            .collect()
    }

    /// Unit eigenvector for eigenvalue `lambda`, orthogonalized against `prior`
    /// vectors that belong to (numerically) the same eigenvalue.
    pub fn eigenvector(&self, lambda: f64, prior: &[(f64, Vec<f64>)]) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            return vec![1.0];
        }
        let (lo, hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let lu = ShiftedLu::factor(self, lambda, scale);
        let close: Vec<&Vec<f64>> = prior
            .iter()
            .filter(|(mu, _)| (mu - lambda).abs() <= 1e-9 * scale)
            .map(|(_, v)| v)
            .collect();

        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 % 13) as f64)).collect();
        for _ in 0..4 {
            for v in &close {
                let c: f64 = x.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(v.iter()).for_each(|(a, b)| *a -= c * b);
            }
            lu.solve(&mut x);
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(nrm.is_finite() && nrm > 0.0) {
                x = (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
                continue;
            }
            x.iter_mut().for_each(|v| *v /= nrm);
        }
        for v in &close {
            let c: f64 = x.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            x.iter_mut().zip(v.iter()).for_each(|(a, b)| *a -= c * b);
        }
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nrm);
        x
    }
}

/// LU factors of `T − shift·I` with partial pivoting (LAPACK `gttrf` layout).
struct ShiftedLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &Tridiagonal<'_>, shift: f64, scale: f64) -> Self {
        let n = t.diag.len();
        let tiny = f64::EPSILON * scale;
        let mut d: Vec<f64> = t.diag.iter().map(|a| a - shift).collect();
        let mut dl = t.off.to_vec();
        let mut du = t.off.to_vec();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = temp - self.dl[i] * x[i];
            } else {
                x[i + 1] -= self.dl[i] * x[i];
            }
        }
        x[n - 1] /= self.d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
    }
}
