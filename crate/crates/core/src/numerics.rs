//! Small numerical building blocks: compensated summation, adaptive Simpson
//! quadrature, Gauss-Legendre rules, least squares and a dense Jacobi
//! eigensolver used as a test oracle.

/// Kahan compensated accumulator. Summation order is up to the caller;
/// all library code feeds it in ascending index order so results do not
/// depend on thread count.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Adaptive Simpson quadrature on [a, b] with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Surface area of the unit (m-1)-sphere in R^m: 2 pi^{m/2} / Gamma(m/2).
pub fn unit_sphere_area(m: usize) -> f64 {
    assert!(m >= 1);
    let half = m as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma_half_integer(m)
}

/// Gamma(m/2) for positive integer m.
fn gamma_half_integer(m: usize) -> f64 {
    if m % 2 == 0 {
        // Gamma(k) = (k-1)!
        let k = m / 2;
        (1..k).map(|i| i as f64).product()
    } else {
        // Gamma(k + 1/2) = sqrt(pi) (2k)! / (4^k k!)
        let k = (m - 1) / 2;
        let mut v = std::f64::consts::PI.sqrt();
        for i in 1..=k {
            v *= i as f64 - 0.5;
        }
        v
    }
}

pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut acc = KahanSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value() / values.len() as f64
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Ordinary least squares fit y = slope * x + intercept.
/// Returns (slope, intercept, r^2).
pub fn ols_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2);
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

/// Jacobi eigenvalue iteration for a dense symmetric matrix, used as a
/// spectral oracle in tests. Returns eigenvalues in ascending order.
pub fn symmetric_eigenvalues(a: &ndarray::Array2<f64>) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut d = a.clone();
    for _ in 0..200 * n * n {
        let mut p = 0;
        let mut q = 1;
        let mut max = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                if d[[i, j]].abs() > max {
                    max = d[[i, j]].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if max <= 1e-13 {
            break;
        }
        let app = d[[p, p]];
        let aqq = d[[q, q]];
        let apq = d[[p, q]];
        let tau = (aqq - app) / (2.0 * apq);
        let t = if tau >= 0.0 {
            1.0 / (tau + (1.0 + tau * tau).sqrt())
        } else {
            -1.0 / (-tau + (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;
        for i in 0..n {
            if i != p && i != q {
                let dip = d[[i, p]];
                let diq = d[[i, q]];
                d[[i, p]] = c * dip - s * diq;
                d[[p, i]] = d[[i, p]];
                d[[i, q]] = s * dip + c * diq;
                d[[q, i]] = d[[i, q]];
            }
        }
        d[[p, p]] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
        d[[q, q]] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
        d[[p, q]] = 0.0;
        d[[q, p]] = 0.0;
    }
    let mut eig: Vec<f64> = (0..n).map(|i| d[[i, i]]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Shortest round-trip decimal formatting shared by all CSV writers.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simpson_polynomial_is_near_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn simpson_oscillatory() {
        let v = adaptive_simpson(&|x: f64| (10.0 * x).sin(), 0.0, 1.0, 1e-11);
        let exact = (1.0 - (10.0f64).cos()) / 10.0;
        assert_abs_diff_eq!(v, exact, epsilon = 1e-10);
    }

    #[test]
    fn gauss_legendre_integrates_high_degree_exactly() {
        let (xs, ws) = gauss_legendre(8);
        // exact for polynomials of degree <= 15
        let v: f64 = xs.iter().zip(&ws).map(|(&x, &w)| w * x.powi(14)).sum();
        assert_abs_diff_eq!(v, 2.0 / 15.0, epsilon = 1e-13);
        let s: f64 = ws.iter().sum();
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn sphere_areas_match_closed_forms() {
        assert_abs_diff_eq!(unit_sphere_area(1), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(unit_sphere_area(2), 2.0 * std::f64::consts::PI, epsilon = 1e-12);
        assert_abs_diff_eq!(unit_sphere_area(3), 4.0 * std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn ols_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| -0.5 * x + 2.0).collect();
        let (slope, intercept, r2) = ols_fit(&xs, &ys);
        assert_abs_diff_eq!(slope, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(intercept, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn jacobi_eigenvalues_of_known_matrix() {
        let a = ndarray::array![[2.0, 1.0], [1.0, 2.0]];
        let eig = symmetric_eigenvalues(&a);
        assert_abs_diff_eq!(eig[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig[1], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
