//! Truncated jets: a function value together with its first `order`
//! derivatives at a point, with arithmetic that propagates derivatives
//! exactly (Leibniz rule, quotient recursion).
//!
//! Jets are the carrier for curve data along `t`: every coordinate of a
//! sampled curve is a [`Jet`], and covariant differentiation consumes one
//! derivative order per application.

/// Binomial coefficients up to the largest jet order we ever build
/// (curve jets are capped at order 6).
const MAX_ORDER: usize = 8;

fn binomial(n: usize, k: usize) -> f64 {
    debug_assert!(n <= MAX_ORDER && k <= n);
    const TABLE: [[u32; MAX_ORDER + 1]; MAX_ORDER + 1] = {
        let mut t = [[0u32; MAX_ORDER + 1]; MAX_ORDER + 1];
        let mut n = 0;
        while n <= MAX_ORDER {
            t[n][0] = 1;
            let mut k = 1;
            while k <= n {
                t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
                k += 1;
            }
            n += 1;
        }
        t
    };
    TABLE[n][k] as f64
}

/// Derivative values `f(t0), f'(t0), ..., f^(order)(t0)` of a scalar
/// function at a fixed parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    values: Vec<f64>,
}

impl Jet {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "a jet needs at least the value itself");
        assert!(values.len() <= MAX_ORDER + 1, "jet order too high");
        Jet { values }
    }

    /// Jet of a constant: all derivatives vanish.
    pub fn constant(c: f64, order: usize) -> Self {
        let mut values = vec![0.0; order + 1];
        values[0] = c;
        Jet { values }
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    /// The function value (0th derivative).
    pub fn value(&self) -> f64 {
        self.values[0]
    }

    /// The k-th derivative value.
    pub fn deriv(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Jet of df/dt: shifts derivatives down one order.
    pub fn differentiate(&self) -> Jet {
        assert!(self.order() >= 1, "cannot differentiate an order-0 jet");
        Jet::new(self.values[1..].to_vec())
    }

    /// Truncate to a lower order (no-op if already at or below it).
    pub fn truncate(&self, order: usize) -> Jet {
        if self.order() <= order {
            self.clone()
        } else {
            Jet::new(self.values[..=order].to_vec())
        }
    }

    fn common_order(&self, rhs: &Jet) -> usize {
        self.order().min(rhs.order())
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        let n = self.common_order(rhs);
        Jet::new((0..=n).map(|k| self.values[k] + rhs.values[k]).collect())
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        let n = self.common_order(rhs);
        Jet::new((0..=n).map(|k| self.values[k] - rhs.values[k]).collect())
    }

    pub fn neg(&self) -> Jet {
        Jet::new(self.values.iter().map(|v| -v).collect())
    }

    pub fn scale(&self, c: f64) -> Jet {
        Jet::new(self.values.iter().map(|v| c * v).collect())
    }

    /// Leibniz rule: (fg)^(k) = sum_i C(k,i) f^(i) g^(k-i).
    pub fn mul(&self, rhs: &Jet) -> Jet {
        let n = self.common_order(rhs);
        let mut out = vec![0.0; n + 1];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..=k {
                acc += binomial(k, i) * self.values[i] * rhs.values[k - i];
            }
            *slot = acc;
        }
        Jet::new(out)
    }

    /// Quotient h = f/g solved order by order from f = g*h.
    /// Requires g(t0) != 0.
    pub fn div(&self, rhs: &Jet) -> Jet {
        let n = self.common_order(rhs);
        let g0 = rhs.values[0];
        assert!(g0 != 0.0, "jet division by a jet with zero value");
        let mut h = vec![0.0; n + 1];
        for k in 0..=n {
            let mut acc = self.values[k];
            for i in 1..=k {
                acc -= binomial(k, i) * rhs.values[i] * h[k - i];
            }
            h[k] = acc / g0;
        }
        Jet::new(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sin_jet(t: f64, order: usize) -> Jet {
        // derivatives of sin cycle: sin, cos, -sin, -cos
        let cycle = [t.sin(), t.cos(), -t.sin(), -t.cos()];
        Jet::new((0..=order).map(|k| cycle[k % 4]).collect())
    }

    fn cos_jet(t: f64, order: usize) -> Jet {
        let cycle = [t.cos(), -t.sin(), -t.cos(), t.sin()];
        Jet::new((0..=order).map(|k| cycle[k % 4]).collect())
    }

    #[test]
    fn product_matches_analytic_derivatives() {
        let t = 0.7;
        let p = sin_jet(t, 5).mul(&cos_jet(t, 5));
        // sin*cos = sin(2t)/2, derivatives 2^(k-1) * sin^(k)(2t)
        let analytic = [
            0.5 * (2.0 * t).sin(),
            (2.0 * t).cos(),
            -2.0 * (2.0 * t).sin(),
            -4.0 * (2.0 * t).cos(),
            8.0 * (2.0 * t).sin(),
            16.0 * (2.0 * t).cos(),
        ];
        for (k, want) in analytic.iter().enumerate() {
            assert_relative_eq!(p.deriv(k), *want, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn division_round_trips_product() {
        let t = 0.3;
        let a = sin_jet(t, 5);
        let b = Jet::new(vec![
            2.0 + t.cos(),
            -t.sin(),
            -t.cos(),
            t.sin(),
            t.cos(),
            -t.sin(),
        ]);
        let q = a.mul(&b).div(&b);
        for k in 0..=5 {
            assert_relative_eq!(q.deriv(k), a.deriv(k), epsilon = 1e-12);
        }
    }

    #[test]
    fn differentiate_shifts() {
        let j = Jet::new(vec![1.0, 2.0, 3.0, 4.0]);
        let d = j.differentiate();
        assert_eq!(d.values(), &[2.0, 3.0, 4.0]);
        assert_eq!(d.order(), 2);
    }

    #[test]
    fn constant_jet_has_zero_derivatives() {
        let c = Jet::constant(7.5, 4);
        assert_eq!(c.value(), 7.5);
        assert!(c.values()[1..].iter().all(|&v| v == 0.0));
    }
}
