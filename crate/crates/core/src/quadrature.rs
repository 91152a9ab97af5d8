//! Composite quadrature rules on uniform grids.

/// Composite trapezoid rule for samples `f` on a uniform grid of spacing `h`.
pub fn trapezoid(f: &[f64], h: f64) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = f[1..n - 1].iter().sum();
            h * (inner + 0.5 * (f[0] + f[n - 1]))
        }
    }
}

/// Trapezoid rule applied to `g(f_i)` without materialising the mapped vector.
pub fn trapezoid_by<F: Fn(usize, f64) -> f64>(f: &[f64], h: f64, g: F) -> f64 {
    let n = f.len();
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.5 * (g(0, f[0]) + g(n - 1, f[n - 1]));
    for (i, &v) in f.iter().enumerate().take(n - 1).skip(1) {
        acc += g(i, v);
    }
    h * acc
}

/// Composite Simpson rule for `f` on `[a, b]` with `n` subintervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        acc += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    acc * h / 3.0
}
