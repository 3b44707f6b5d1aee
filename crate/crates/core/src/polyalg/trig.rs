use num_complex::Complex64;

/// Real trigonometric polynomial `q(θ) = Σ_{j=-t}^{t} c_j e^{ijθ}` with `c_{-j} = conj(c_j)`.
///
/// Coefficients are stored densely, index `j + t`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    half_degree: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zero(half_degree: usize) -> Self {
        Self {
            half_degree,
            coeffs: vec![Complex64::default(); 2 * half_degree + 1],
        }
    }

    pub fn constant(c: f64) -> Self {
        let mut q = Self::zero(0);
        q.coeffs[0] = Complex64::new(c, 0.0);
        q
    }

    /// From the nonnegative-index half `c_0, c_1, …, c_t`; `c_0` must be real.
    pub fn from_nonneg(half: &[Complex64]) -> Self {
        let t = half.len().saturating_sub(1);
        let mut q = Self::zero(t);
        for (j, &c) in half.iter().enumerate() {
            q.set(j as isize, c);
        }
        q
    }

    pub fn half_degree(&self) -> usize {
        self.half_degree
    }

    pub fn coeff(&self, j: isize) -> Complex64 {
        let t = self.half_degree as isize;
        if j.abs() > t {
            Complex64::default()
        } else {
            self.coeffs[(j + t) as usize]
        }
    }

    /// Sets `c_j` and `c_{-j} = conj(c_j)`, growing the half degree if needed.
    pub fn set(&mut self, j: isize, c: Complex64) {
        let need = j.unsigned_abs();
        if need > self.half_degree {
            self.grow(need);
        }
        let t = self.half_degree as isize;
        if j == 0 {
            self.coeffs[t as usize] = Complex64::new(c.re, 0.0);
        } else {
            self.coeffs[(j + t) as usize] = c;
            self.coeffs[(-j + t) as usize] = c.conj();
        }
    }

    fn grow(&mut self, t: usize) {
        let mut out = Self::zero(t);
        let old = self.half_degree as isize;
        for j in -old..=old {
            out.coeffs[(j + t as isize) as usize] = self.coeff(j);
        }
        *self = out;
    }

    pub fn eval_complex(&self, theta: f64) -> Complex64 {
        let t = self.half_degree as isize;
        (-t..=t)
            .map(|j| self.coeff(j) * Complex64::from_polar(1.0, j as f64 * theta))
            .sum()
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_complex(theta).re
    }

    pub fn add(&self, other: &Self) -> Self {
        let t = self.half_degree.max(other.half_degree);
        let mut out = Self::zero(t);
        let ti = t as isize;
        for j in -ti..=ti {
            out.coeffs[(j + ti) as usize] = self.coeff(j) + other.coeff(j);
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest `|j|` with `|c_j| > tol`, or `None` when every coefficient is below `tol`.
    pub fn effective_half_degree(&self, tol: f64) -> Option<usize> {
        let t = self.half_degree as isize;
        (0..=t).rev().find(|&j| self.coeff(j).norm() > tol).map(|j| j as usize)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.im.abs() <= tol)
    }

    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let t = self.half_degree.max(other.half_degree) as isize;
        (-t..=t)
            .map(|j| (self.coeff(j) - other.coeff(j)).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_evaluates_real() {
        let q = TrigPoly::from_nonneg(&[Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)]);
        for i in 0..20 {
            let th = i as f64 * 0.3;
            let v = q.eval_complex(th);
            assert!(v.im.abs() < 1e-12);
            assert!((v.re - (2.0 + 2.0 * th.cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn set_grows_half_degree() {
        let mut q = TrigPoly::constant(1.0);
        q.set(-2, Complex64::new(0.0, 1.0));
        assert_eq!(q.half_degree(), 2);
        assert_eq!(q.coeff(2), Complex64::new(0.0, -1.0));
        assert_eq!(q.effective_half_degree(1e-14), Some(2));
    }
}
