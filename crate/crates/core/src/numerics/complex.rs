use super::Real;

/// Complex number as a pair of extended-precision reals.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let im = re.zero_like();
        Complex { re, im }
    }

    pub fn zero_like(x: &Real) -> Self {
        Complex { re: x.zero_like(), im: x.zero_like() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn abs(&self) -> Real {
        self.re.hypot(&self.im)
    }

    /// `max(|re|, |im|)`, the modulus used for infinity norms of complex vectors.
    pub fn max_abs(&self) -> Real {
        self.re.abs().max(&self.im.abs()).clone()
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn add(&self, o: &Complex) -> Complex {
        Complex { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        Complex { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Complex) -> Complex {
        Complex {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn scale(&self, s: &Real) -> Complex {
        Complex { re: &self.re * s, im: &self.im * s }
    }

    pub fn div(&self, o: &Complex) -> Complex {
        let d = o.re.square() + o.im.square();
        Complex {
            re: (&self.re * &o.re + &self.im * &o.im) / &d,
            im: (&self.im * &o.re - &self.re * &o.im) / &d,
        }
    }
}
