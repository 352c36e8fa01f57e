use std::fmt;

use super::field::Gq;
use super::poly::Poly;

/// Rational function in lowest terms with a monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFun::zero();
        }
        let g = num.gcd(&den);
        let num = num.div_exact(&g).expect("gcd divides");
        let den = den.div_exact(&g).expect("gcd divides");
        let l = den.lead().inv();
        RatFun { num: num.scale(&l), den: den.scale(&l) }
    }

    pub fn poly(p: Poly) -> Self {
        RatFun { num: p, den: Poly::one() }
    }

    pub fn constant(v: Gq) -> Self {
        RatFun::poly(Poly::constant(v))
    }

    pub fn zero() -> Self {
        RatFun { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFun::poly(Poly::one())
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RatFun) -> RatFun {
        if self.den == o.den {
            return RatFun::new(self.num.add(&o.num), self.den.clone());
        }
        RatFun::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &RatFun) -> RatFun {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RatFun {
        RatFun { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &RatFun) -> RatFun {
        if self.is_zero() || o.is_zero() {
            return RatFun::zero();
        }
        RatFun::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> RatFun {
        assert!(!self.is_zero(), "inverse of zero rational function");
        RatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFun) -> RatFun {
        self.mul(&o.inv())
    }

    /// Order of vanishing along the squarefree factor `g` (negative at poles).
    pub fn valuation(&self, g: &Poly) -> i64 {
        self.num.valuation(g) as i64 - self.den.valuation(g) as i64
    }

    /// Order of vanishing at infinity: `deg den − deg num`.
    pub fn valuation_infinity(&self) -> i64 {
        self.den.deg() as i64 - self.num.deg() as i64
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &Gq) -> Option<Gq> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(&self.num.eval(x) / &d)
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
