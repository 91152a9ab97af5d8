//! Backstepping kernels and the Volterra transformations they define.
//!
//! The forward kernel `p` solves `p_xx − p_yy = λ p` on `0 ≤ y ≤ x` with
//! `p(x, 0) = 0`, `p(x, x) = λ x / 2`:
//!
//! ```text
//! p(x, y) = (y/2) Σ_{n≥0} λ^{n+1} ((x² − y²)/4)^n / (n! (n+1)!)
//! ```
//!
//! The inverse kernel `q` solves `q_xx − q_yy = −λ q` with the same boundary
//! data and is the alternating version of the same series. Both are
//! time-independent, so they are evaluated directly at physical coordinates.

use crate::error::{invalid, Error, Result};
use crate::pdesolver::FieldState;

/// Largest admissible `√λ · x` before the series is considered out of range.
pub const MAX_GROWTH_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub lambda: f64,
    pub tol: f64,
    pub max_terms: usize,
}

impl KernelParams {
    pub const DEFAULT_TOL: f64 = 1e-15;
    pub const DEFAULT_MAX_TERMS: usize = 500;

    pub fn new(lambda: f64) -> Result<Self> {
        let p = Self {
            lambda,
            tol: Self::DEFAULT_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(invalid("lambda", format!("must be > 0, got {}", self.lambda)));
        }
        if !(self.tol > 0.0 && self.tol <= 1e-6) {
            return Err(invalid("tol", format!("must lie in (0, 1e-6], got {}", self.tol)));
        }
        if self.max_terms < 20 {
            return Err(invalid(
                "max_terms",
                format!("must be >= 20, got {}", self.max_terms),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Plus,
    Alternating,
}

/// `Σ_{n≥0} (±s)^n / (n!(n+1)!)` with the relative stopping rule.
fn series(s: f64, sign: Sign, params: &KernelParams) -> f64 {
    let ratio = match sign {
        Sign::Plus => s,
        Sign::Alternating => -s,
    };
    let mut term = 1.0;
    let mut sum: f64 = 1.0;
    for n in 0..params.max_terms {
        let next = term * ratio / ((n + 1) as f64 * (n + 2) as f64);
        if next.abs() < params.tol * sum.abs() {
            break;
        }
        sum += next;
        term = next;
    }
    sum
}

fn kernel(params: &KernelParams, x: f64, y: f64, sign: Sign) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::NonFinite(format!("kernel argument ({x}, {y})")));
    }
    if y < 0.0 || y > x {
        return Err(invalid("y", format!("kernel requires 0 <= y <= x, got x={x}, y={y}")));
    }
    if params.lambda.sqrt() * x > MAX_GROWTH_EXPONENT {
        return Err(Error::KernelRange(format!(
            "sqrt(lambda) * x = {} exceeds {MAX_GROWTH_EXPONENT}",
            params.lambda.sqrt() * x
        )));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let s = params.lambda * (x * x - y * y) / 4.0;
    let v = 0.5 * params.lambda * y * series(s, sign, params);
    if !v.is_finite() {
        return Err(Error::KernelRange(format!("kernel value at ({x}, {y}) is not finite")));
    }
    Ok(v)
}

/// Forward kernel `p(x, y)`, `0 ≤ y ≤ x`.
pub fn p_kernel(params: &KernelParams, x: f64, y: f64) -> Result<f64> {
    kernel(params, x, y, Sign::Plus)
}

/// Inverse kernel `q(x, y)`, `0 ≤ y ≤ x`.
pub fn q_kernel(params: &KernelParams, x: f64, y: f64) -> Result<f64> {
    kernel(params, x, y, Sign::Alternating)
}

/// `v_i + sign · l · ∫₀^{y_i} K(l y_i, l s) v(s) ds` by trapezoid on the state's grid.
fn volterra(state: &FieldState, params: &KernelParams, sign: Sign, factor: f64) -> Result<FieldState> {
    params.validate()?;
    let n = state.n_grid();
    let h = state.h();
    let l = state.length();
    let v = &state.values;
    let mut out = v.clone();
    // kernel row i is needed at nodes j ≤ i; the endpoint j = i is λ x / 2
    for i in 1..=n {
        let x = l * i as f64 * h;
        let mut acc = 0.0;
        for (j, &vj) in v.iter().enumerate().take(i + 1).skip(1) {
            let y = if j == i { x } else { l * j as f64 * h };
            let k = kernel(params, x, y, sign)?;
            let w = if j == i { 0.5 } else { 1.0 };
            acc += w * k * vj;
        }
        out[i] = v[i] + factor * l * h * acc;
    }
    out[0] = 0.0;
    Ok(FieldState {
        t: state.t,
        values: out,
        curve: state.curve,
    })
}

/// `w(x) = u(x) + ∫₀^x p(x, y) u(y) dy` on the physical interval of `u`.
pub fn forward_transform(u: &FieldState, params: &KernelParams) -> Result<FieldState> {
    volterra(u, params, Sign::Plus, 1.0)
}

/// `u(x) = w(x) − ∫₀^x q(x, y) w(y) dy`.
pub fn inverse_transform(w: &FieldState, params: &KernelParams) -> Result<FieldState> {
    volterra(w, params, Sign::Alternating, -1.0)
}

/// Empirical kernel maxima over the triangle `0 ≤ y ≤ x ≤ l` and the growth bound `√λ e^{√λ l}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBound {
    pub p_max: f64,
    pub q_max: f64,
    pub bound: f64,
}

impl KernelBound {
    pub fn holds(&self) -> bool {
        self.p_max <= self.bound && self.q_max <= self.bound
    }
}

/// Samples the triangle on a 101 × 101 sub-grid.
pub fn kernel_bound_check(params: &KernelParams, l_value: f64) -> Result<KernelBound> {
    params.validate()?;
    if !(l_value.is_finite() && l_value > 0.0) {
        return Err(invalid("l", format!("must be > 0, got {l_value}")));
    }
    const M: usize = 100;
    let mut p_max: f64 = 0.0;
    let mut q_max: f64 = 0.0;
    for i in 0..=M {
        let x = l_value * i as f64 / M as f64;
        for j in 0..=i {
            let y = if j == i { x } else { l_value * j as f64 / M as f64 };
            p_max = p_max.max(p_kernel(params, x, y)?.abs());
            q_max = q_max.max(q_kernel(params, x, y)?.abs());
        }
    }
    let r = params.lambda.sqrt();
    Ok(KernelBound {
        p_max,
        q_max,
        bound: r * (r * l_value).exp(),
    })
}

/// Maximum centered-difference residuals of both kernel equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelResidual {
    pub h: f64,
    /// `max |−p_xx + p_yy + λ p|`
    pub p_residual: f64,
    /// `max |−q_xx + q_yy − λ q|`
    pub q_residual: f64,
}

/// Residuals at interior points of the unit triangle with spacing `1/resolution`.
pub fn kernel_pde_residual(params: &KernelParams, resolution: usize) -> Result<KernelResidual> {
    params.validate()?;
    if resolution < 16 {
        return Err(invalid("resolution", format!("must be >= 16, got {resolution}")));
    }
    let h = 1.0 / resolution as f64;
    let lam = params.lambda;
    let mut p_res: f64 = 0.0;
    let mut q_res: f64 = 0.0;
    // the five-point stencil stays inside the triangle: 1 ≤ j, j + 1 ≤ i − 1, i + 1 ≤ n
    for i in 3..resolution {
        for j in 1..(i - 1) {
            let (x, y) = (i as f64 * h, j as f64 * h);
            for (sign, acc) in [(Sign::Plus, &mut p_res), (Sign::Alternating, &mut q_res)] {
                let k = |a: f64, b: f64| kernel(params, a, b, sign);
                let c = k(x, y)?;
                let kxx = (k(x + h, y)? - 2.0 * c + k(x - h, y)?) / (h * h);
                let kyy = (k(x, y + h)? - 2.0 * c + k(x, y - h)?) / (h * h);
                let react = if sign == Sign::Plus { lam * c } else { -lam * c };
                *acc = acc.max((-kxx + kyy + react).abs());
            }
        }
    }
    Ok(KernelResidual {
        h,
        p_residual: p_res,
        q_residual: q_res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoundaryCurve;

    fn params(lambda: f64) -> KernelParams {
        KernelParams::new(lambda).unwrap()
    }

    /// Independent oracle: 20 leading terms summed directly from factorials.
    fn partial_sum(lambda: f64, x: f64, y: f64, alternating: bool) -> f64 {
        let mut fact = [1.0f64; 23];
        for n in 1..23 {
            fact[n] = fact[n - 1] * n as f64;
        }
        let s: f64 = (0..20)
            .map(|n| {
                let sign = if alternating && n % 2 == 1 { -1.0 } else { 1.0 };
                sign * lambda.powi(n as i32 + 1) * ((x * x - y * y) / 4.0).powi(n as i32)
                    / (fact[n] * fact[n + 1])
            })
            .sum();
        y / 2.0 * s
    }

    #[test]
    fn vanishes_on_y_zero() {
        for lam in [0.3, 1.0, 25.0] {
            assert_eq!(p_kernel(&params(lam), 1.7, 0.0).unwrap(), 0.0);
            assert_eq!(q_kernel(&params(lam), 1.7, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn diagonal_value() {
        assert_eq!(p_kernel(&params(2.0), 3.0, 3.0).unwrap(), 3.0);
        assert_eq!(q_kernel(&params(2.0), 3.0, 3.0).unwrap(), 3.0);
        for x in [0.1, 0.77, 2.0, 5.5] {
            assert_eq!(p_kernel(&params(6.5), x, x).unwrap(), 6.5 * x / 2.0);
        }
    }

    #[test]
    fn matches_partial_sum_oracle() {
        let p = p_kernel(&params(1.0), 1.0, 0.5).unwrap();
        let q = q_kernel(&params(1.0), 1.0, 0.5).unwrap();
        assert!((p - partial_sum(1.0, 1.0, 0.5, false)).abs() < 1e-15);
        assert!((q - partial_sum(1.0, 1.0, 0.5, true)).abs() < 1e-15);
        // frozen from the oracle
        assert!((p - 0.274_181_473_928_713).abs() < 1e-12, "{p}");
        assert!((q - 0.227_283_584_403_995).abs() < 1e-12, "{q}");
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(p_kernel(&params(1.0), 1.0, 1.5).is_err());
        assert!(q_kernel(&params(1.0), 1.0, -0.1).is_err());
        assert!(matches!(
            p_kernel(&params(1e4), 8.0, 1.0),
            Err(Error::KernelRange(_))
        ));
        assert!(KernelParams { lambda: 1.0, tol: 1e-3, max_terms: 100 }.validate().is_err());
        assert!(KernelParams { lambda: 1.0, tol: 1e-9, max_terms: 5 }.validate().is_err());
        assert!(KernelParams::new(0.0).is_err());
    }

    #[test]
    fn truncation_is_stable_beyond_stopping_index() {
        let base = params(6.5);
        let more = KernelParams { max_terms: 2000, ..base };
        for (x, y) in [(1.0, 0.3), (4.0, 1.0), (6.0, 2.0)] {
            let a = p_kernel(&base, x, y).unwrap();
            let b = p_kernel(&more, x, y).unwrap();
            assert!(((a - b) / b).abs() < base.tol * 10.0);
        }
    }

    #[test]
    fn transforms_of_zero_and_tiny_lambda() {
        let curve = BoundaryCurve::power_law(1.0, 0.5).unwrap();
        let z = FieldState::zeros(curve, 32);
        assert!(forward_transform(&z, &params(1.0)).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(inverse_transform(&z, &params(1.0)).unwrap().values.iter().all(|&v| v == 0.0));
        let u = FieldState::from_fn(curve, 64, |y| (3.0 * y).sin() + y * y).unwrap();
        let tiny = params(1e-12);
        let w = forward_transform(&u, &tiny).unwrap();
        let back = inverse_transform(&u, &tiny).unwrap();
        for i in 0..=64 {
            assert!((w.values[i] - u.values[i]).abs() < 1e-10);
            assert!((back.values[i] - u.values[i]).abs() < 1e-10);
        }
        assert_eq!(w.values[0], 0.0);
    }

    #[test]
    fn bound_examples() {
        let b = kernel_bound_check(&params(1.0), 1.0).unwrap();
        assert!((b.bound - std::f64::consts::E).abs() < 1e-12);
        assert!(b.holds());
        let b = kernel_bound_check(&params(4.0), 2.0).unwrap();
        assert!((b.bound - 2.0 * 4f64.exp()).abs() < 1e-9);
        assert!(b.holds());
        let b = kernel_bound_check(&params(1e-12), 1.0).unwrap();
        assert!(b.p_max < 1e-11 && b.holds());
    }

    #[test]
    fn residual_small_lambda_is_negligible() {
        let r = kernel_pde_residual(&params(1e-12), 16).unwrap();
        assert!(r.p_residual < 1e-9 && r.q_residual < 1e-9, "{r:?}");
        assert!(kernel_pde_residual(&params(1.0), 8).is_err());
    }
}
