//! Symmetric tridiagonal eigenproblem: Sturm-sequence bisection for the
//! lowest eigenvalues, inverse iteration for their eigenvectors.

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length must be n - 1");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let denom = if q == 0.0 { f64::EPSILON * (self.off[i - 1].abs() + f64::MIN_POSITIVE) } else { q };
            q = self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based), bisected to working precision.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        assert!(index < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        lo -= 1e-12 * scale;
        hi += 1e-12 * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        (0..k.min(self.len())).map(|i| self.eigenvalue(i)).collect()
    }

    /// Unit-norm eigenvector for an eigenvalue by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let scale = self.gershgorin().1.abs().max(1.0);
        let shift = lambda + 1e-13 * scale;
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * ((i * 7919) % 101) as f64 / 101.0).collect();
        normalize(&mut x);
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            normalize(&mut x);
        }
        // fix sign so the first significant component is positive
        if let Some(v) = x.iter().find(|v| v.abs() > 1e-8) {
            if *v < 0.0 {
                x.iter_mut().for_each(|c| *c = -*c);
            }
        }
        x
    }

    pub fn lowest_eigenpairs(&self, k: usize) -> Vec<(f64, Vec<f64>)> {
        self.lowest_eigenvalues(k).into_iter().map(|l| (l, self.eigenvector(l))).collect()
    }

    /// Solves `(T - shift) x = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            let p = self.diag[0] - shift;
            return vec![b[0] / if p == 0.0 { f64::EPSILON } else { p }];
        }
        // upper-triangular factor has bandwidth 2 after pivoting
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut rhs = b.to_vec();
        let mut cur_d = self.diag[0] - shift;
        let mut cur_u = self.off[0];
        let mut cur_u2 = 0.0;
        let tiny = f64::EPSILON * self.gershgorin().1.abs().max(1.0);
        for i in 0..n - 1 {
            let sub = self.off[i];
            let next_d = self.diag[i + 1] - shift;
            let next_u = if i + 1 < n - 1 { self.off[i + 1] } else { 0.0 };
            if cur_d.abs() >= sub.abs() {
                let piv = if cur_d == 0.0 { tiny } else { cur_d };
                let m = sub / piv;
                u0[i] = piv;
                u1[i] = cur_u;
                u2[i] = cur_u2;
                rhs[i + 1] -= m * rhs[i];
                cur_d = next_d - m * cur_u;
                cur_u = next_u - m * cur_u2;
                cur_u2 = 0.0;
            } else {
                // swap rows i and i+1
                let m = cur_d / sub;
                u0[i] = sub;
                u1[i] = next_d;
                u2[i] = next_u;
                rhs.swap(i, i + 1);
                rhs[i + 1] -= m * rhs[i];
                cur_d = cur_u - m * next_d;
                cur_u = cur_u2 - m * next_u;
                cur_u2 = 0.0;
            }
        }
        u0[n - 1] = if cur_d == 0.0 { tiny } else { cur_d };
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * x[i + 2];
            }
            x[i] = s / u0[i];
        }
        x
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 && norm.is_finite() {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}
