use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// Value and first three derivatives of a function at one point.
///
/// `order` is the highest derivative still known; differentiating drops it
/// by one and products keep the smaller of the two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    d: [Complex64; 4],
    order: i32,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

impl Jet {
    pub const MAX_ORDER: i32 = 3;

    pub fn new(d: [Complex64; 4]) -> Self {
        Self {
            d,
            order: Self::MAX_ORDER,
        }
    }

    pub fn real(d: [f64; 4]) -> Self {
        Self::new(d.map(|v| Complex64::new(v, 0.0)))
    }

    /// Jet of the identity function `x`.
    pub fn position(x: f64) -> Self {
        Self::real([x, 1.0, 0.0, 0.0])
    }

    /// Jet of a constant.
    pub fn constant(c: Complex64) -> Self {
        Self::new([c, ZERO, ZERO, ZERO])
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// `d^j f / dx^j`, if still known.
    pub fn get(&self, j: usize) -> Option<Complex64> {
        if (j as i32) <= self.order {
            Some(self.d[j])
        } else {
            None
        }
    }

    /// All four slots, whether or not they are still known.
    pub fn raw(&self) -> [Complex64; 4] {
        self.d
    }

    pub fn value(&self) -> Option<Complex64> {
        self.get(0)
    }

    pub fn derivative(&self) -> Self {
        Self {
            d: [self.d[1], self.d[2], self.d[3], ZERO],
            order: self.order - 1,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            d: self.d.map(|v| v * c),
            order: self.order,
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        Jet {
            d: [0, 1, 2, 3].map(|j| self.d[j] + rhs.d[j]),
            order: self.order.min(rhs.order),
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        Jet {
            d: [0, 1, 2, 3].map(|j| self.d[j] - rhs.d[j]),
            order: self.order.min(rhs.order),
        }
    }
}

/// Leibniz rule.
impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let (a, b) = (self.d, rhs.d);
        Jet {
            d: [
                a[0] * b[0],
                a[1] * b[0] + a[0] * b[1],
                a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
                a[3] * b[0] + 3.0 * a[2] * b[1] + 3.0 * a[1] * b[2] + a[0] * b[3],
            ],
            order: self.order.min(rhs.order),
        }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        // x^2 * x = x^3 at x = 2: 8, 12, 12, 6
        let x = Jet::position(2.0);
        let cube = x * x * x;
        let want = [8.0, 12.0, 12.0, 6.0];
        for (j, w) in want.into_iter().enumerate() {
            assert_eq!(cube.get(j).unwrap().re, w);
        }
    }

    #[test]
    fn order_tracking() {
        let f = Jet::position(1.0);
        let d = f.derivative().derivative();
        assert_eq!(d.order(), 1);
        assert!(d.get(2).is_none());
        let dd = d.derivative().derivative();
        assert!(dd.value().is_none());
        assert_eq!((f * d).order(), 1);
    }
}
