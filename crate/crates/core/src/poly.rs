use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type ExactRational = BigRational;

/// `"numerator/denominator"`, including for integers (`"3/1"`).
pub fn format_rational(x: &ExactRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parse `"a/b"` or `"a"`.
pub fn parse_rational(s: &str) -> Option<ExactRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let den: BigInt = b.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(BigRational::new(a.trim().parse().ok()?, den))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Decimal rendering with `digits` significant digits, for display only.
pub fn rational_to_decimal(x: &ExactRational, digits: usize) -> String {
    let v = to_f64(x);
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), v);
    // Re-render plain when the exponent is moderate.
    let parsed: f64 = s.parse().unwrap_or(v);
    if parsed.abs() >= 1e-4 && parsed.abs() < 1e15 {
        let int_digits = parsed.abs().log10().floor() as i64 + 1;
        let decimals = (digits as i64 - int_digits).max(0) as usize;
        let plain = format!("{:.*}", decimals, parsed);
        if plain.contains('.') {
            plain.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            plain
        }
    } else {
        s
    }
}

pub fn to_f64(x: &ExactRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or_else(|| {
        // Scale down huge numerators/denominators before converting.
        let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
        let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Polynomial in `z` with exact rational coefficients; index = power.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalPolynomial {
    coeffs: Vec<ExactRational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<ExactRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn one() -> Self {
        RationalPolynomial::new(vec![ExactRational::one()])
    }

    /// `z + c`.
    pub fn linear(c: ExactRational) -> Self {
        RationalPolynomial::new(vec![c, ExactRational::one()])
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coefficients(&self) -> &[ExactRational] {
        &self.coeffs
    }

    /// `[z^power]`, zero beyond the degree.
    pub fn coefficient(&self, power: usize) -> ExactRational {
        self.coeffs.get(power).cloned().unwrap_or_else(ExactRational::zero)
    }

    /// Multiply in place by `z + c`.
    pub fn mul_linear(&mut self, c: &ExactRational) {
        if self.coeffs.is_empty() {
            return;
        }
        let mut out = vec![ExactRational::zero(); self.coeffs.len() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            out[i] += a * c;
            out[i + 1] += a;
        }
        self.coeffs = out;
    }

    pub fn mul(&self, other: &RationalPolynomial) -> RationalPolynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return RationalPolynomial::new(vec![]);
        }
        let mut out = vec![ExactRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }

    pub fn eval(&self, z: &ExactRational) -> ExactRational {
        self.coeffs
            .iter()
            .rev()
            .fold(ExactRational::zero(), |acc, c| acc * z + c)
    }
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (power, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match power {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "({})z", format_rational(c))?,
                _ => write!(f, "({})z^{power}", format_rational(c))?,
            }
        }
        Ok(())
    }
}

impl Serialize for RationalPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(format_rational))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> ExactRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn formats_and_parses() {
        assert_eq!(format_rational(&q(26, 6)), "13/3");
        assert_eq!(format_rational(&q(3, 1)), "3/1");
        assert_eq!(parse_rational("13/3"), Some(q(13, 3)));
        assert_eq!(parse_rational("-4"), Some(q(-4, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(rational_to_decimal(&q(13, 3), 12), "4.33333333333");
        assert_eq!(rational_to_decimal(&q(5, 2), 12), "2.5");
    }

    #[test]
    fn products_of_linear_factors() {
        let mut p = RationalPolynomial::one();
        p.mul_linear(&q(1, 1));
        p.mul_linear(&q(3, 2));
        assert_eq!(p.coefficients(), &[q(3, 2), q(5, 2), q(1, 1)]);
        let other = RationalPolynomial::linear(q(1, 1)).mul(&RationalPolynomial::linear(q(3, 2)));
        assert_eq!(p, other);
        assert_eq!(p.eval(&q(1, 1)), q(5, 1));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.coefficient(7), q(0, 1));
    }
}
