//! Exact sparse multivariate polynomial arithmetic over arbitrary-precision
//! integers.
//!
//! Three classes of variables occur in the pipeline: the tautological
//! classes `u1..uk` of the projectivized levels, the Chern classes
//! `c1..cn` of the base, and the hyperplane class `h`. Every variable
//! carries a cohomological grade (`uj` and `h` have grade 1, `cs` has
//! grade `s`), monomials are kept in canonical sorted form, and a
//! polynomial is a map from monomials to nonzero coefficients, so equality
//! is structural.
//!
//! Coefficients are arbitrary-precision integers; the level relations are
//! monic in the eliminated variable, so the whole pipeline is
//! division-free. The coefficient ring is a type parameter only because
//! the final evaluation step needs classes whose coefficients are
//! themselves polynomials in the hypersurface degree `d` (see
//! [`crate::hypersurface::DegreePolynomial`]).

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// A formal variable of the intersection ring.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Variable {
    /// Tautological class of the level-`j` projectivized bundle, `1 <= j`.
    U(u8),
    /// Chern class of the base bundle with index `s`, of grade `s`.
    C(u8),
    /// Hyperplane class.
    H,
}

impl Variable {
    /// Cohomological grade: `u` and `h` count 1, `c_s` counts `s`.
    pub fn grade(self) -> u32 {
        match self {
            Variable::C(s) => u32::from(s),
            _ => 1,
        }
    }

    /// True for the base variables `c_s` and `h` (everything but `u_j`).
    pub fn is_base(self) -> bool {
        !matches!(self, Variable::U(_))
    }
}

/// Variable precedence: `uk > .. > u1 > c1 > .. > cn > h`.
impl Ord for Variable {
    fn cmp(&self, other: &Self) -> Ordering {
        use Variable::*;
        match (self, other) {
            (U(a), U(b)) => a.cmp(b),
            (U(_), _) => Ordering::Greater,
            (_, U(_)) => Ordering::Less,
            (C(a), C(b)) => b.cmp(a),
            (C(_), H) => Ordering::Greater,
            (H, C(_)) => Ordering::Less,
            (H, H) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Variable {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::U(j) => write!(f, "u{j}"),
            Variable::C(s) => write!(f, "c{s}"),
            Variable::H => write!(f, "h"),
        }
    }
}

/// Inline exponent storage; the pipeline never sees more than `k + n + 1`
/// distinct variables, which fits without heap allocation.
type ExpVec = SmallVec<[(Variable, u32); 12]>;

/// A power product of variables in canonical form: exponents sorted by
/// descending variable precedence, no zero exponents, total grade cached.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: ExpVec,
    grade: u32,
}

impl Monomial {
    /// The empty product.
    pub fn one() -> Self {
        Monomial {
            exps: ExpVec::new(),
            grade: 0,
        }
    }

    pub fn var(v: Variable) -> Self {
        let mut exps = ExpVec::new();
        exps.push((v, 1));
        Monomial {
            grade: v.grade(),
            exps,
        }
    }

    pub fn var_pow(v: Variable, e: u32) -> Self {
        if e == 0 {
            return Monomial::one();
        }
        let mut exps = ExpVec::new();
        exps.push((v, e));
        Monomial {
            grade: e * v.grade(),
            exps,
        }
    }

    /// Canonicalizes an arbitrary exponent list: merges duplicates, drops
    /// zero exponents, sorts by descending precedence.
    pub fn from_exps(exps: impl IntoIterator<Item = (Variable, u32)>) -> Self {
        let mut exps: ExpVec = exps.into_iter().filter(|&(_, e)| e > 0).collect();
        exps.sort_by(|a, b| b.0.cmp(&a.0));
        exps.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                earlier.1 += later.1;
                true
            } else {
                false
            }
        });
        let grade = exps.iter().map(|&(v, e)| e * v.grade()).sum();
        Monomial { exps, grade }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn grade(&self) -> u32 {
        self.grade
    }

    /// Grade contributed by the base variables `c_s` and `h` alone.
    pub fn base_grade(&self) -> u32 {
        self.exps
            .iter()
            .filter(|(v, _)| v.is_base())
            .map(|&(v, e)| e * v.grade())
            .sum()
    }

    pub fn exponent(&self, v: Variable) -> u32 {
        self.exps
            .iter()
            .find(|&&(w, _)| w == v)
            .map_or(0, |&(_, e)| e)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Variable, u32)> + '_ {
        self.exps.iter().copied()
    }

    /// True if any `u_j` occurs.
    pub fn involves_u(&self) -> bool {
        self.exps.iter().any(|(v, _)| !v.is_base())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = ExpVec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.exps.len() && j < other.exps.len() {
            match self.exps[i].0.cmp(&other.exps[j].0) {
                Ordering::Greater => {
                    exps.push(self.exps[i]);
                    i += 1;
                }
                Ordering::Less => {
                    exps.push(other.exps[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    exps.push((self.exps[i].0, self.exps[i].1 + other.exps[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        exps.extend_from_slice(&self.exps[i..]);
        exps.extend_from_slice(&other.exps[j..]);
        Monomial {
            exps,
            grade: self.grade + other.grade,
        }
    }

    /// Exact division by `v^e`; the exponent of `v` must be at least `e`.
    pub fn div_pow(&self, v: Variable, e: u32) -> Monomial {
        let mut out = self.clone();
        out.div_pow_mut(v, e);
        out
    }

    fn div_pow_mut(&mut self, v: Variable, e: u32) {
        if e == 0 {
            return;
        }
        let idx = self
            .exps
            .iter()
            .position(|&(w, _)| w == v)
            .expect("divisor variable not present");
        debug_assert!(self.exps[idx].1 >= e);
        if self.exps[idx].1 == e {
            self.exps.remove(idx);
        } else {
            self.exps[idx].1 -= e;
        }
        self.grade -= e * v.grade();
    }
}

/// Graded lexicographic order (grade first, then lexicographic with respect
/// to the variable precedence). Used for canonical serialization.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.grade.cmp(&other.grade).then_with(|| {
            let mut i = 0;
            let mut j = 0;
            loop {
                match (self.exps.get(i), other.exps.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(v1, e1)), Some(&(v2, e2))) => match v1.cmp(&v2) {
                        Ordering::Greater => return Ordering::Greater,
                        Ordering::Less => return Ordering::Less,
                        Ordering::Equal => {
                            if e1 != e2 {
                                return e1.cmp(&e2);
                            }
                            i += 1;
                            j += 1;
                        }
                    },
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Coefficient ring of a [`Polynomial`]. Implemented by `BigInt` and by
/// [`crate::hypersurface::DegreePolynomial`].
pub trait Coeff: Clone + Eq + Send + Sync {
    fn coeff_zero() -> Self;
    fn coeff_one() -> Self;
    fn coeff_is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
}

impl Coeff for BigInt {
    fn coeff_zero() -> Self {
        Zero::zero()
    }
    fn coeff_one() -> Self {
        One::one()
    }
    fn coeff_is_zero(&self) -> bool {
        Zero::is_zero(self)
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

/// A sparse polynomial in canonical form: no stored coefficient is zero,
/// and equality is equality of the term maps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial<C: Coeff = BigInt> {
    terms: BTreeMap<Monomial, C>,
}

/// The working currency of the pipeline: integer coefficients.
pub type IntersectionPolynomial = Polynomial<BigInt>;

/// Chunk the outer operand of a product across threads once the work
/// estimate (term count product) reaches this size.
#[cfg(feature = "parallel")]
const PAR_MUL_WORK: usize = 1 << 14;

impl<C: Coeff> Polynomial<C> {
    pub fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(C::coeff_one())
    }

    pub fn constant(c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.coeff_is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn var(v: Variable) -> Self {
        Self::term(Monomial::var(v), C::coeff_one())
    }

    pub fn term(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.coeff_is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in iter {
            p.accumulate(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending canonical monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    /// Adds `c * m` in place, pruning a resulting zero.
    pub fn accumulate(&mut self, m: Monomial, c: C) {
        if c.coeff_is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().coeff_is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.coeff_is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, x)| (m.clone(), x.mul_ref(c)))
                .collect(),
        }
    }

    /// Multiplies every term by the monomial `m`.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.mul(m), c.clone()))
                .collect(),
        }
    }

    /// Distributive product. When `base_cap` is given, every product
    /// monomial whose combined grade in the base variables (`c`, `h`)
    /// exceeds the cap is discarded.
    pub fn mul_capped(&self, other: &Self, base_cap: Option<u32>) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let (outer, inner) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let inner_terms: Vec<(&Monomial, &C, u32)> = inner
            .terms
            .iter()
            .map(|(m, c)| (m, c, m.base_grade()))
            .collect();
        let outer_terms: Vec<(&Monomial, &C)> = outer.terms.iter().collect();

        #[cfg(feature = "parallel")]
        {
            let work = outer_terms.len().saturating_mul(inner_terms.len());
            if work >= PAR_MUL_WORK && rayon::current_num_threads() > 1 {
                let chunk = outer_terms
                    .len()
                    .div_ceil(rayon::current_num_threads() * 4)
                    .max(16);
                let terms = outer_terms
                    .par_chunks(chunk)
                    .map(|block| mul_block(block, &inner_terms, base_cap))
                    .reduce(BTreeMap::new, merge_maps);
                return Polynomial { terms };
            }
        }

        Polynomial {
            terms: mul_block(&outer_terms, &inner_terms, base_cap),
        }
    }

    /// Plain small-exponent power (used for substitution values).
    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul_capped(self, None);
        }
        acc
    }

    /// The polynomial coefficient of `v^e`, treating `self` as univariate
    /// in `v`.
    pub fn coeff_of(&self, v: Variable, e: u32) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == e)
                .map(|(m, c)| (m.div_pow(v, e), c.clone()))
                .collect(),
        }
    }

    /// Largest exponent of `v` over all terms.
    pub fn max_exponent(&self, v: Variable) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Splits into (terms with exponent of `v` below `e`, the rest),
    /// consuming `self`.
    pub(crate) fn split_min_exp(self, v: Variable, e: u32) -> (Self, Self) {
        let (low, high) = self
            .terms
            .into_iter()
            .partition(|(m, _)| m.exponent(v) < e);
        (Polynomial { terms: low }, Polynomial { terms: high })
    }

    /// Exact division of every term by `v^e`. The monomial order is
    /// compatible with division by a common factor, so the rebuilt map
    /// sees its keys in sorted order.
    pub(crate) fn div_exact_pow(self, v: Variable, e: u32) -> Self {
        Polynomial {
            terms: self
                .terms
                .into_iter()
                .map(|(mut m, c)| {
                    m.div_pow_mut(v, e);
                    (m, c)
                })
                .collect(),
        }
    }

    /// Simultaneous substitution, fully expanded. Variables without an
    /// assignment are left in place.
    pub fn substitute(&self, assignments: &BTreeMap<Variable, Polynomial<C>>) -> Self {
        if assignments.is_empty() {
            return self.clone();
        }
        let mut pow_cache: HashMap<(Variable, u32), Polynomial<C>> = HashMap::new();
        let mut result = Self::zero();
        for (m, c) in &self.terms {
            let mut kept: Vec<(Variable, u32)> = Vec::new();
            let mut acc = Self::constant(c.clone());
            for (v, e) in m.iter() {
                if let Some(repl) = assignments.get(&v) {
                    let p = pow_cache
                        .entry((v, e))
                        .or_insert_with(|| repl.pow(e))
                        .clone();
                    acc = acc.mul_capped(&p, None);
                } else {
                    kept.push((v, e));
                }
            }
            if !kept.is_empty() {
                acc = acc.mul_monomial(&Monomial::from_exps(kept));
            }
            result += &acc;
        }
        result
    }

    /// `Some(g)` when every term has grade `g` (the zero polynomial
    /// reports grade 0), `None` otherwise.
    pub fn homogeneous_grade(&self) -> Option<u32> {
        let mut grades = self.terms.keys().map(|m| m.grade());
        let first = match grades.next() {
            None => return Some(0),
            Some(g) => g,
        };
        grades.all(|g| g == first).then_some(first)
    }

    /// True when no `u_j` occurs anywhere.
    pub fn is_base_only(&self) -> bool {
        self.terms.keys().all(|m| !m.involves_u())
    }

    /// Largest term grade (0 for the zero polynomial).
    pub fn max_grade(&self) -> u32 {
        self.terms.keys().map(|m| m.grade()).max().unwrap_or(0)
    }
}

fn mul_block<C: Coeff>(
    block: &[(&Monomial, &C)],
    inner: &[(&Monomial, &C, u32)],
    base_cap: Option<u32>,
) -> BTreeMap<Monomial, C> {
    let mut acc: BTreeMap<Monomial, C> = BTreeMap::new();
    for &(m1, c1) in block {
        let b1 = m1.base_grade();
        for &(m2, c2, b2) in inner {
            if let Some(cap) = base_cap {
                if b1 + b2 > cap {
                    continue;
                }
            }
            let c = c1.mul_ref(c2);
            if c.coeff_is_zero() {
                continue;
            }
            match acc.entry(m1.mul(m2)) {
                Entry::Vacant(e) => {
                    e.insert(c);
                }
                Entry::Occupied(mut e) => {
                    e.get_mut().add_assign_ref(&c);
                    if e.get().coeff_is_zero() {
                        e.remove();
                    }
                }
            }
        }
    }
    acc
}

#[cfg(feature = "parallel")]
fn merge_maps<C: Coeff>(
    mut a: BTreeMap<Monomial, C>,
    mut b: BTreeMap<Monomial, C>,
) -> BTreeMap<Monomial, C> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    for (m, c) in b {
        match a.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                e.get_mut().add_assign_ref(&c);
                if e.get().coeff_is_zero() {
                    e.remove();
                }
            }
        }
    }
    a
}

impl<C: Coeff> AddAssign<&Polynomial<C>> for Polynomial<C> {
    fn add_assign(&mut self, rhs: &Polynomial<C>) {
        for (m, c) in &rhs.terms {
            self.accumulate(m.clone(), c.clone());
        }
    }
}

impl<C: Coeff> AddAssign<Polynomial<C>> for Polynomial<C> {
    fn add_assign(&mut self, mut rhs: Polynomial<C>) {
        if self.terms.len() < rhs.terms.len() {
            std::mem::swap(&mut self.terms, &mut rhs.terms);
        }
        for (m, c) in rhs.terms {
            self.accumulate(m, c);
        }
    }
}

impl<C: Coeff> SubAssign<&Polynomial<C>> for Polynomial<C> {
    fn sub_assign(&mut self, rhs: &Polynomial<C>) {
        for (m, c) in &rhs.terms {
            self.accumulate(m.clone(), c.neg_ref());
        }
    }
}

impl<C: Coeff> Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<C: Coeff> Add for Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(mut self, rhs: Polynomial<C>) -> Polynomial<C> {
        self += rhs;
        self
    }
}

impl<C: Coeff> Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<C: Coeff> Sub for Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(mut self, rhs: Polynomial<C>) -> Polynomial<C> {
        self -= &rhs;
        self
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg_ref()))
                .collect(),
        }
    }
}

impl<C: Coeff> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

impl<C: Coeff> Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &Polynomial<C>) -> Polynomial<C> {
        self.mul_capped(rhs, None)
    }
}

impl<C: Coeff> Mul for Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Polynomial<C>) -> Polynomial<C> {
        self.mul_capped(&rhs, None)
    }
}

impl IntersectionPolynomial {
    /// Integer-coefficient term constructor, handy in tests.
    pub fn iterm(m: Monomial, c: i64) -> Self {
        Self::term(m, BigInt::from(c))
    }
}

/// Terms in descending canonical order, coefficients in decimal, `^` for
/// powers, `*` for products. The empty polynomial prints as `0`.
impl fmt::Display for IntersectionPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
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
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, PartialEq)]
enum Token {
    Plus,
    Minus,
    Star,
    Caret,
    Int(BigInt),
    Var(Variable),
}

fn lex(input: &str) -> Result<Vec<Token>, Error> {
    let mut tokens = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            b'-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            b'*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            b'^' => {
                tokens.push(Token::Caret);
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &input[start..i];
                let value = BigInt::from_str(digits)
                    .map_err(|e| Error::Parse(format!("bad integer {digits:?}: {e}")))?;
                tokens.push(Token::Int(value));
            }
            b'u' | b'c' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let index: u8 = input[start + 1..i]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad variable {:?}", &input[start..i])))?;
                if index == 0 {
                    return Err(Error::Parse(format!(
                        "variable indices are 1-based, got {:?}",
                        &input[start..i]
                    )));
                }
                tokens.push(Token::Var(if b == b'u' {
                    Variable::U(index)
                } else {
                    Variable::C(index)
                }));
            }
            b'h' => {
                tokens.push(Token::Var(Variable::H));
                i += 1;
            }
            _ => {
                return Err(Error::Parse(format!(
                    "unexpected character {:?} at offset {i}",
                    b as char
                )))
            }
        }
    }
    Ok(tokens)
}

/// Parses the canonical text form (and any reordering of its terms, with
/// arbitrary whitespace).
impl FromStr for IntersectionPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let tokens = lex(s)?;
        if tokens.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut result = Self::zero();
        let mut pos = 0;
        loop {
            let mut negative = false;
            match tokens.get(pos) {
                Some(Token::Plus) => pos += 1,
                Some(Token::Minus) => {
                    negative = true;
                    pos += 1;
                }
                _ => {}
            }
            let mut coeff = BigInt::from(1);
            let mut exps: Vec<(Variable, u32)> = Vec::new();
            loop {
                match tokens.get(pos) {
                    Some(Token::Int(v)) => {
                        coeff *= v;
                        pos += 1;
                    }
                    Some(Token::Var(v)) => {
                        let v = *v;
                        pos += 1;
                        let mut e = 1u32;
                        if let Some(Token::Caret) = tokens.get(pos) {
                            pos += 1;
                            match tokens.get(pos) {
                                Some(Token::Int(x)) => {
                                    e = u32::try_from(x.clone()).map_err(|_| {
                                        Error::Parse(format!("exponent {x} out of range"))
                                    })?;
                                    pos += 1;
                                }
                                _ => return Err(Error::Parse("expected exponent after ^".into())),
                            }
                        }
                        exps.push((v, e));
                    }
                    _ => return Err(Error::Parse("expected a coefficient or variable".into())),
                }
                if let Some(Token::Star) = tokens.get(pos) {
                    pos += 1;
                } else {
                    break;
                }
            }
            if negative {
                coeff = -coeff;
            }
            result.accumulate(Monomial::from_exps(exps), coeff);
            match tokens.get(pos) {
                None => break,
                Some(Token::Plus) | Some(Token::Minus) => {}
                Some(t) => return Err(Error::Parse(format!("unexpected token {t:?}"))),
            }
        }
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntersectionPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn add_cancels_inverse() {
        assert!((p("u1") + p("-u1")).is_zero());
    }

    #[test]
    fn add_like_terms() {
        assert_eq!(p("2*h") + p("3*h"), p("5*h"));
    }

    #[test]
    fn add_cancellation() {
        assert_eq!(p("c1 + h") + p("c1 - h"), p("2*c1"));
    }

    #[test]
    fn mul_difference_of_squares() {
        assert_eq!(&p("u1 + h") * &p("u1 - h"), p("u1^2 - h^2"));
    }

    #[test]
    fn mul_base_cap_drops_high_base_grade() {
        let sq = p("u1 + h").mul_capped(&p("u1 + h"), Some(1));
        assert_eq!(sq, p("u1^2 + 2*u1*h"));
    }

    #[test]
    fn mul_matches_naive_expansion() {
        // Independent oracle: expand (u3 + 2 u2 + 6 u1 + 18 h)^2 by nested
        // loops over the term list and assert the u2*u1 coefficient.
        let gens = [
            (Variable::U(3), 1i64),
            (Variable::U(2), 2),
            (Variable::U(1), 6),
            (Variable::H, 18),
        ];
        let mut naive: BTreeMap<Vec<(Variable, u32)>, i64> = BTreeMap::new();
        for &(v1, a1) in &gens {
            for &(v2, a2) in &gens {
                let key = Monomial::from_exps([(v1, 1), (v2, 1)]);
                let key: Vec<_> = key.iter().collect();
                *naive.entry(key).or_insert(0) += a1 * a2;
            }
        }
        let target: Vec<_> = Monomial::from_exps([(Variable::U(2), 1), (Variable::U(1), 1)])
            .iter()
            .collect();
        assert_eq!(naive[&target], 24);

        let a = p("u3 + 2*u2 + 6*u1 + 18*h");
        let sq = &a * &a;
        assert_eq!(
            sq.coeff(&Monomial::from_exps([
                (Variable::U(2), 1),
                (Variable::U(1), 1)
            ])),
            Some(&BigInt::from(24))
        );
    }

    #[test]
    fn coeff_of_examples() {
        assert_eq!(p("u1^2 + 2*u1*h + h^2").coeff_of(Variable::U(1), 1), p("2*h"));
        assert_eq!(p("c1*u2^3").coeff_of(Variable::U(2), 3), p("c1"));
        assert_eq!(p("h^3").coeff_of(Variable::U(1), 0), p("h^3"));
    }

    #[test]
    fn substitute_empty_and_zero() {
        assert_eq!(p("h").substitute(&BTreeMap::new()), p("h"));
        let mut assignments = BTreeMap::new();
        assignments.insert(Variable::U(1), IntersectionPolynomial::zero());
        assert!(p("u1^2").substitute(&assignments).is_zero());
    }

    #[test]
    fn substitute_expands_products() {
        let mut assignments = BTreeMap::new();
        assignments.insert(Variable::C(1), p("-h"));
        assert_eq!(p("c1*h^2 + c1^2").substitute(&assignments), p("-h^3 + h^2"));
    }

    #[test]
    fn display_and_parse_round_trip() {
        let q = p("-3421377792*h^3 + 676045440*c1*h^2 - 7494966*c1^3 + 10997352*c1*c2 - 3835548*c3");
        let text = q.to_string();
        assert_eq!(text.parse::<IntersectionPolynomial>().unwrap(), q);
        // descending graded-lex order places the c1^3 term first
        assert!(text.starts_with("-7494966*c1^3"));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("u1 +".parse::<IntersectionPolynomial>().is_err());
        assert!("x1".parse::<IntersectionPolynomial>().is_err());
        assert!("u0".parse::<IntersectionPolynomial>().is_err());
        assert!("".parse::<IntersectionPolynomial>().is_err());
    }

    #[test]
    fn zero_displays_as_zero() {
        assert_eq!(IntersectionPolynomial::zero().to_string(), "0");
        assert_eq!(p("0"), IntersectionPolynomial::zero());
    }

    #[test]
    fn variable_precedence() {
        use Variable::*;
        assert!(U(2) > U(1));
        assert!(U(1) > C(1));
        assert!(C(1) > C(2));
        assert!(C(3) > H);
    }

    #[test]
    fn homogeneous_grade_tracks_c_weights() {
        assert_eq!(p("c2 + h^2 + c1*h").homogeneous_grade(), Some(2));
        assert_eq!(p("c2 + h").homogeneous_grade(), None);
    }
}
