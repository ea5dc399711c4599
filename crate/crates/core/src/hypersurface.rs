//! Chern classes of a smooth degree-`d` hypersurface in projective space,
//! expressed as exact polynomials in `d` times powers of the hyperplane
//! class, and evaluation of base classes to polynomials in `d`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::polyring::{Coeff, IntersectionPolynomial, Monomial, Polynomial, Variable};

/// Exact univariate polynomial in the hypersurface degree `d`.
///
/// Coefficients are stored in ascending exponent order; the representation
/// is canonical (no trailing zeros, empty for the zero polynomial).
#[derive(Clone, PartialEq, Eq, Debug, Default, Hash)]
pub struct DegreePolynomial {
    coeffs: Vec<BigInt>,
}

impl DegreePolynomial {
    pub fn zero() -> Self {
        DegreePolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The monomial `d`.
    pub fn d() -> Self {
        Self::from_coeffs(vec![BigInt::zero(), BigInt::one()])
    }

    /// Ascending-order coefficients; trailing zeros are stripped.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = DegreePolynomial { coeffs };
        p.normalize();
        p
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, exp: usize) -> BigInt {
        self.coeffs.get(exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Nonzero coefficients in descending exponent order.
    pub fn iter_desc(&self) -> impl Iterator<Item = (usize, &BigInt)> {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
    }

    /// Multiplication by `d` (shift every exponent up by one).
    pub fn times_d(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigInt::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        DegreePolynomial { coeffs }
    }

    /// Horner evaluation at an integer.
    pub fn eval(&self, d: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * d + c;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl AddAssign<&DegreePolynomial> for DegreePolynomial {
    fn add_assign(&mut self, rhs: &DegreePolynomial) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), BigInt::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a += b;
        }
        self.normalize();
    }
}

impl Add for &DegreePolynomial {
    type Output = DegreePolynomial;
    fn add(self, rhs: &DegreePolynomial) -> DegreePolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &DegreePolynomial {
    type Output = DegreePolynomial;
    fn sub(self, rhs: &DegreePolynomial) -> DegreePolynomial {
        let mut out = self.clone();
        out += &-rhs;
        out
    }
}

impl Neg for &DegreePolynomial {
    type Output = DegreePolynomial;
    fn neg(self) -> DegreePolynomial {
        DegreePolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &DegreePolynomial {
    type Output = DegreePolynomial;
    fn mul(self, rhs: &DegreePolynomial) -> DegreePolynomial {
        if self.is_zero() || rhs.is_zero() {
            return DegreePolynomial::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        DegreePolynomial::from_coeffs(coeffs)
    }
}

impl Coeff for DegreePolynomial {
    fn coeff_zero() -> Self {
        DegreePolynomial::zero()
    }
    fn coeff_one() -> Self {
        DegreePolynomial::one()
    }
    fn coeff_is_zero(&self) -> bool {
        DegreePolynomial::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl fmt::Display for DegreePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (exp, c)) in self.iter_desc().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.magnitude();
            match exp {
                0 => write!(f, "{mag}")?,
                1 if mag.is_one() => write!(f, "d")?,
                1 => write!(f, "{mag}*d")?,
                _ if mag.is_one() => write!(f, "d^{exp}")?,
                _ => write!(f, "{mag}*d^{exp}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for DegreePolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut coeffs: BTreeMap<usize, BigInt> = BTreeMap::new();
        let mut rest = s.trim();
        if rest.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut sign = BigInt::one();
        let mut first = true;
        while !rest.is_empty() {
            if !first || rest.starts_with(['+', '-']) {
                let (op, tail) = rest.split_at(1);
                if op == "-" {
                    sign = -BigInt::one();
                } else if op == "+" {
                    sign = BigInt::one();
                } else {
                    return Err(Error::Parse(format!("expected + or -, got {op:?}")));
                }
                rest = tail.trim_start();
            }
            first = false;
            let end = rest
                .find(['+', '-'])
                .unwrap_or(rest.len());
            let term = rest[..end].trim();
            rest = rest[end..].trim_start();
            if term.is_empty() {
                return Err(Error::Parse("empty term".into()));
            }
            let (coeff, exp) = parse_d_term(term)?;
            *coeffs.entry(exp).or_insert_with(BigInt::zero) += &sign * coeff;
        }
        let max = coeffs.keys().max().copied().unwrap_or(0);
        let mut out = vec![BigInt::zero(); max + 1];
        for (e, c) in coeffs {
            out[e] = c;
        }
        Ok(DegreePolynomial::from_coeffs(out))
    }
}

fn parse_d_term(term: &str) -> Result<(BigInt, usize), Error> {
    let mut coeff = BigInt::one();
    let mut exp = 0usize;
    for factor in term.split('*') {
        let factor = factor.trim();
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in {term:?}")));
        }
        if let Some(tail) = factor.strip_prefix('d') {
            let e: usize = if tail.is_empty() {
                1
            } else if let Some(digits) = tail.strip_prefix('^') {
                digits
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?
            } else {
                return Err(Error::Parse(format!("bad factor {factor:?}")));
            };
            exp += e;
        } else {
            let value = BigInt::from_str(factor)
                .map_err(|_| Error::Parse(format!("bad factor {factor:?}")))?;
            coeff *= value;
        }
    }
    Ok((coeff, exp))
}

/// Lifts an integer-coefficient class to one with `d`-polynomial
/// coefficients, so it can be substituted into.
pub fn lift(p: &IntersectionPolynomial) -> Polynomial<DegreePolynomial> {
    Polynomial::from_terms(
        p.terms()
            .map(|(m, c)| (m.clone(), DegreePolynomial::constant(c.clone()))),
    )
}

/// Chern classes of a smooth degree-`d` hypersurface in projective
/// `(n+1)`-space: `c_s = h^s * sum_{j=0..s} (-d)^j * C(n+2, s-j)` for
/// `s = 1..n`. The list is indexed by `s - 1`.
pub fn chern_classes_of_hypersurface(n: usize) -> Vec<Polynomial<DegreePolynomial>> {
    assert!(n >= 1, "hypersurface dimension must be at least 1");
    (1..=n)
        .map(|s| {
            let mut coeffs = vec![BigInt::zero(); s + 1];
            for (j, slot) in coeffs.iter_mut().enumerate() {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                *slot = BigInt::from(sign) * binomial(BigInt::from(n + 2), BigInt::from(s - j));
            }
            Polynomial::term(
                Monomial::var_pow(Variable::H, s as u32),
                DegreePolynomial::from_coeffs(coeffs),
            )
        })
        .collect()
}

/// Evaluates a base class (in `c`, `h` only, homogeneous of grade `n`) to
/// an exact polynomial in the degree `d`: substitutes every `c_s` by its
/// hypersurface expression, collapses `h^n`, and multiplies once by `d`
/// for the ambient integral of `h^n`.
pub fn evaluate_degree(p: &IntersectionPolynomial, n: usize) -> Result<DegreePolynomial, Error> {
    if p.is_zero() {
        return Ok(DegreePolynomial::zero());
    }
    if !p.is_base_only() || p.homogeneous_grade() != Some(n as u32) {
        return Err(Error::NotBaseClass { expected: n });
    }
    let classes = chern_classes_of_hypersurface(n);
    let assignments: BTreeMap<Variable, Polynomial<DegreePolynomial>> = classes
        .into_iter()
        .enumerate()
        .map(|(i, class)| (Variable::C((i + 1) as u8), class))
        .collect();
    let substituted = lift(p).substitute(&assignments);
    let mut total = DegreePolynomial::zero();
    let h_top = Monomial::var_pow(Variable::H, n as u32);
    for (m, c) in substituted.terms() {
        debug_assert_eq!(*m, h_top);
        total += c;
    }
    Ok(total.times_d())
}
