//! 128-bit complex arithmetic for polishing Bethe roots that sit on
//! near-exact strings, where the f64 Bethe equations lose most of their digits.

use alloc::vec::Vec;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

use crate::C64;

const PREC: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;

pub(crate) struct Ctx {
    cc: Consts,
}

#[derive(Clone, Debug)]
pub(crate) struct XC {
    re: BigFloat,
    im: BigFloat,
}

fn big(x: f64) -> BigFloat {
    BigFloat::from_f64(x, PREC)
}

fn word_f64(w: u64, exp: i32) -> f64 {
    (w as f64) * 2f64.powi(exp)
}

/// Nearest f64 (up to one final rounding) of a finite `BigFloat`.
fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    match x.as_raw_parts() {
        Some((m, _, s, e, _)) => {
            let n = m.len();
            let mut v = word_f64(m[n - 1], e - 64);
            if n >= 2 {
                v += word_f64(m[n - 2], e - 128);
            }
            if s == Sign::Neg {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}

impl Ctx {
    pub(crate) fn new() -> Option<Self> {
        Consts::new().ok().map(|cc| Ctx { cc })
    }

    pub(crate) fn sh(&mut self, z: &XC) -> XC {
        let (shr, chr) = (z.re.sinh(PREC, RM, &mut self.cc), z.re.cosh(PREC, RM, &mut self.cc));
        let (s, c) = (z.im.sin(PREC, RM, &mut self.cc), z.im.cos(PREC, RM, &mut self.cc));
        XC {
            re: shr.mul(&c, PREC, RM),
            im: chr.mul(&s, PREC, RM),
        }
    }

    pub(crate) fn ch(&mut self, z: &XC) -> XC {
        let (shr, chr) = (z.re.sinh(PREC, RM, &mut self.cc), z.re.cosh(PREC, RM, &mut self.cc));
        let (s, c) = (z.im.sin(PREC, RM, &mut self.cc), z.im.cos(PREC, RM, &mut self.cc));
        XC {
            re: chr.mul(&c, PREC, RM),
            im: shr.mul(&s, PREC, RM),
        }
    }
}

impl XC {
    pub(crate) fn from_c64(z: C64) -> Self {
        XC { re: big(z.re), im: big(z.im) }
    }

    /// `hi + lo` held exactly.
    pub(crate) fn from_dd(hi: C64, lo: C64) -> Self {
        Self::from_c64(hi).add(&Self::from_c64(lo))
    }

    pub(crate) fn one() -> Self {
        Self::from_c64(C64::new(1.0, 0.0))
    }

    pub(crate) fn add(&self, o: &Self) -> Self {
        XC {
            re: self.re.add(&o.re, PREC, RM),
            im: self.im.add(&o.im, PREC, RM),
        }
    }

    pub(crate) fn sub(&self, o: &Self) -> Self {
        XC {
            re: self.re.sub(&o.re, PREC, RM),
            im: self.im.sub(&o.im, PREC, RM),
        }
    }

    pub(crate) fn mul(&self, o: &Self) -> Self {
        let rr = self.re.mul(&o.re, PREC, RM);
        let ii = self.im.mul(&o.im, PREC, RM);
        let ri = self.re.mul(&o.im, PREC, RM);
        let ir = self.im.mul(&o.re, PREC, RM);
        XC {
            re: rr.sub(&ii, PREC, RM),
            im: ri.add(&ir, PREC, RM),
        }
    }

    pub(crate) fn div(&self, o: &Self) -> Self {
        let den = o.re.mul(&o.re, PREC, RM).add(&o.im.mul(&o.im, PREC, RM), PREC, RM);
        let conj = XC { re: o.re.clone(), im: o.im.neg() };
        let num = self.mul(&conj);
        XC {
            re: num.re.div(&den, PREC, RM),
            im: num.im.div(&den, PREC, RM),
        }
    }

    pub(crate) fn to_c64(&self) -> C64 {
        C64::new(to_f64(&self.re), to_f64(&self.im))
    }

    /// Split into `hi + lo` with `hi` the nearest f64 pair.
    pub(crate) fn to_dd(&self) -> (C64, C64) {
        let hi = self.to_c64();
        let lo = self.sub(&Self::from_c64(hi)).to_c64();
        (hi, lo)
    }
}

pub(crate) fn from_dd_slice(hi: &[C64], lo: &[C64]) -> Vec<XC> {
    hi.iter()
        .zip(lo.iter().chain(core::iter::repeat(&C64::new(0.0, 0.0))))
        .map(|(&h, &l)| XC::from_dd(h, l))
        .collect()
}
