//! Forward-mode dual numbers carrying a full gradient vector.
//!
//! A `Dual` holds a value together with its partial derivatives with
//! respect to a fixed set of seed variables. Arithmetic propagates the
//! derivatives exactly, so first derivatives of metric components, map
//! components and vector fields come out at machine precision.
//!
//! ```
//! use subgeom::dual::Dual;
//! let x = Dual::var(2.0, 0, 1);
//! let y = (x.clone() * x.clone()).exp(); // d/dx e^{x^2} = 2x e^{x^2}
//! assert!((y.grad(0) - 4.0 * (4.0f64).exp()).abs() < 1e-12);
//! ```

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value plus gradient. An empty gradient vector denotes a constant,
/// which combines with duals of any seed width.
#[derive(Clone, Debug, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: Vec<f64>,
}

impl Dual {
    pub fn constant(x: f64) -> Self {
        Dual { re: x, eps: Vec::new() }
    }

    /// Seed variable `i` of `n` with value `x`.
    pub fn var(x: f64, i: usize, n: usize) -> Self {
        let mut eps = vec![0.0; n];
        eps[i] = 1.0;
        Dual { re: x, eps }
    }

    /// Seed a whole coordinate point: component `i` becomes variable `i`.
    pub fn seed_point(coords: &[f64]) -> Vec<Dual> {
        let n = coords.len();
        coords
            .iter()
            .enumerate()
            .map(|(i, &x)| Dual::var(x, i, n))
            .collect()
    }

    /// Lift coordinates as constants (plain evaluation, no derivatives).
    pub fn lift_point(coords: &[f64]) -> Vec<Dual> {
        coords.iter().map(|&x| Dual::constant(x)).collect()
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.eps.get(i).copied().unwrap_or(0.0)
    }

    fn unary(&self, value: f64, slope: f64) -> Dual {
        Dual {
            re: value,
            eps: self.eps.iter().map(|e| e * slope).collect(),
        }
    }

    pub fn exp(&self) -> Dual {
        let v = self.re.exp();
        self.unary(v, v)
    }

    pub fn ln(&self) -> Dual {
        self.unary(self.re.ln(), 1.0 / self.re)
    }

    pub fn sin(&self) -> Dual {
        self.unary(self.re.sin(), self.re.cos())
    }

    pub fn cos(&self) -> Dual {
        self.unary(self.re.cos(), -self.re.sin())
    }

    pub fn sqrt(&self) -> Dual {
        let v = self.re.sqrt();
        self.unary(v, 0.5 / v)
    }

    pub fn powi(&self, k: i32) -> Dual {
        self.unary(self.re.powi(k), k as f64 * self.re.powi(k - 1))
    }

    pub fn powf(&self, a: f64) -> Dual {
        self.unary(self.re.powf(a), a * self.re.powf(a - 1.0))
    }

    pub fn recip(&self) -> Dual {
        self.unary(1.0 / self.re, -1.0 / (self.re * self.re))
    }

    /// Real exponentiation with a dual exponent, via exp/ln.
    pub fn pow(&self, other: &Dual) -> Dual {
        if other.eps.is_empty() {
            self.powf(other.re)
        } else {
            (other.clone() * self.ln()).exp()
        }
    }
}

fn zip(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Vec::new(),
        (true, false) => b.iter().map(|&y| f(0.0, y)).collect(),
        (false, true) => a.iter().map(|&x| f(x, 0.0)).collect(),
        (false, false) => {
            debug_assert_eq!(a.len(), b.len(), "dual seed widths differ");
            a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
        }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual {
            re: self.re + rhs.re,
            eps: zip(&self.eps, &rhs.eps, |a, b| a + b),
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual {
            re: self.re - rhs.re,
            eps: zip(&self.eps, &rhs.eps, |a, b| a - b),
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual {
            re: self.re * rhs.re,
            eps: zip(&self.eps, &rhs.eps, |a, b| a * rhs.re + self.re * b),
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let d = rhs.re * rhs.re;
        Dual {
            re: self.re / rhs.re,
            eps: zip(&self.eps, &rhs.eps, |a, b| (a * rhs.re - self.re * b) / d),
        }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            re: -self.re,
            eps: self.eps.iter().map(|e| -e).collect(),
        }
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, rhs: f64) -> Dual {
        self.unary(self.re * rhs, rhs)
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    fn add(self, rhs: f64) -> Dual {
        Dual { re: self.re + rhs, eps: self.eps }
    }
}

impl From<f64> for Dual {
    fn from(x: f64) -> Self {
        Dual::constant(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6 * (1.0 + x.abs());
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn product_rule() {
        let x = Dual::var(1.3, 0, 1);
        let y = x.clone() * x.sin();
        let expect = fd(|t| t * t.sin(), 1.3);
        assert!((y.grad(0) - expect).abs() < 1e-8);
    }

    #[test]
    fn quotient_and_exp() {
        let x = Dual::var(0.7, 0, 1);
        let y = x.exp() / (x.clone() + 2.0);
        let expect = fd(|t| t.exp() / (t + 2.0), 0.7);
        assert!((y.grad(0) - expect).abs() < 1e-8);
    }

    #[test]
    fn multivariate_seed() {
        let p = Dual::seed_point(&[1.0, 2.0]);
        let f = p[0].clone() * p[1].clone() + p[1].powi(3);
        assert_eq!(f.grad(0), 2.0);
        assert_eq!(f.grad(1), 1.0 + 12.0);
    }

    #[test]
    fn constants_broadcast() {
        let x = Dual::var(3.0, 0, 4);
        let c = Dual::constant(2.0);
        let y = x * c;
        assert_eq!(y.grad(0), 2.0);
        assert_eq!(y.eps.len(), 4);
    }
}
