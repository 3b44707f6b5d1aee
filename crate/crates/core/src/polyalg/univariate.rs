/// Dense real polynomial `c_0 + c_1 x + … + c_d x^d`.
///
/// Trailing zeros are trimmed on construction, so the leading coefficient is
/// nonzero unless the polynomial is zero (empty coefficient vector).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UnivariatePoly {
    coeffs: Vec<f64>,
}

impl UnivariatePoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_evaluates() {
        let p = UnivariatePoly::new(vec![1.0, 0.0, -2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.eval(3.0), -17.0);
        assert_eq!(UnivariatePoly::new(vec![0.0]).degree(), None);
    }
}
