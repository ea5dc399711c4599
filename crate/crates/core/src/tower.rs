//! Chern-class model of the tower of projectivized bundles over a base of
//! dimension `n`, for jets of order `k` and rank `r = n`.
//!
//! For each level the model stores the Chern classes of the level bundle,
//! fully expanded over the base variables, together with the monic level
//! relation satisfied by the tautological class `u_j`. Reduction rewrites
//! every `u_j^r` through its relation, eliminating from the top level down
//! so no eliminated variable is ever reintroduced, and integration along
//! the fibers extracts the coefficient of `u_j^{r-1}` level by level.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::binomial;

use crate::error::Error;
use crate::packed::{PackedPoly, PackedTower, MAX_EXP};
use crate::polyring::{IntersectionPolynomial, Monomial, Variable};

/// The Chern data of a tower with base dimension `n` and height `k`.
#[derive(Clone, Debug)]
pub struct TowerModel {
    n: usize,
    k: usize,
    r: usize,
    total_dim: usize,
    /// `chern[j][s-1]` is the grade-`s` Chern class of the level-`j`
    /// bundle, `j = 0..k-1`, expressed in `u_1..u_j` and the base
    /// variables.
    chern: Vec<Vec<IntersectionPolynomial>>,
    /// `relations[j-1]` is the monic relation of `u_j`, `j = 1..k`.
    relations: Vec<IntersectionPolynomial>,
    /// `-(relations[j-1] - u_j^r)`, the rewrite target of `u_j^r`.
    neg_rest: Vec<IntersectionPolynomial>,
    /// Lazily built packed form of the relations, for the fast path.
    packed: OnceLock<Option<PackedTower>>,
}

fn binom(a: usize, b: isize) -> BigInt {
    if b < 0 {
        return BigInt::ZERO;
    }
    binomial(BigInt::from(a), BigInt::from(b))
}

/// Builds the per-level Chern classes and relations for a tower of height
/// `k` over a base of dimension `n >= 2` (the rank equals `n`).
pub fn build_tower(n: usize, k: usize) -> Result<TowerModel, Error> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if k < 1 {
        return Err(Error::InvalidOrder(k));
    }
    let r = n;
    let mut chern: Vec<Vec<IntersectionPolynomial>> = Vec::with_capacity(k);
    chern.push(
        (1..=r)
            .map(|s| IntersectionPolynomial::var(Variable::C(s as u8)))
            .collect(),
    );
    for t in 1..k {
        let u = Variable::U(t as u8);
        let prev = &chern[t - 1];
        let mut level = Vec::with_capacity(r);
        for s in 1..=r {
            // grade-s part of (1 - u) * sum_t c_t^{prev} (1 + u)^{r-t}
            let mut w = prev[s - 1].clone();
            let head = binom(r, s as isize) - binom(r, s as isize - 1);
            w += &IntersectionPolynomial::term(Monomial::var_pow(u, s as u32), head);
            for j in 1..s {
                let factor = binom(r - j, (s - j) as isize) - binom(r - j, (s - j) as isize - 1);
                w += &prev[j - 1]
                    .scale(&factor)
                    .mul_monomial(&Monomial::var_pow(u, (s - j) as u32));
            }
            level.push(w);
        }
        chern.push(level);
    }
    let mut relations = Vec::with_capacity(k);
    let mut neg_rest = Vec::with_capacity(k);
    for j in 1..=k {
        let u = Variable::U(j as u8);
        let mut rest = IntersectionPolynomial::zero();
        for s in 1..=r {
            rest += &chern[j - 1][s - 1].mul_monomial(&Monomial::var_pow(u, (r - s) as u32));
        }
        let monic = IntersectionPolynomial::term(Monomial::var_pow(u, r as u32), BigInt::from(1));
        relations.push(&monic + &rest);
        neg_rest.push(-rest);
    }
    Ok(TowerModel {
        n,
        k,
        r,
        total_dim: n + k * (r - 1),
        chern,
        relations,
        neg_rest,
        packed: OnceLock::new(),
    })
}

impl TowerModel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    /// Dimension of the top tower level, `n + k(r-1)`.
    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// The grade-`s` Chern class of the level-`level` bundle, `level` in
    /// `0..k`, `s` in `1..=r`.
    pub fn chern_class(&self, level: usize, s: usize) -> &IntersectionPolynomial {
        &self.chern[level][s - 1]
    }

    /// The monic relation of `u_j`, `j` in `1..=k`.
    pub fn relation(&self, j: usize) -> &IntersectionPolynomial {
        &self.relations[j - 1]
    }

    fn packed(&self) -> Option<&PackedTower> {
        self.packed
            .get_or_init(|| PackedTower::build(self.n, self.k, &self.neg_rest))
            .as_ref()
    }

    /// Canonical representative with degree below `r` in every `u_j`.
    pub fn reduce(&self, p: &IntersectionPolynomial) -> IntersectionPolynomial {
        self.reduce_capped(p.clone(), None)
    }

    /// Reduction that additionally discards monomials whose base grade
    /// exceeds `base_cap`. Sound inside the Morse pipeline because
    /// rewriting never decreases base grade and the final class has base
    /// grade exactly `n`.
    pub fn reduce_capped(
        &self,
        p: IntersectionPolynomial,
        base_cap: Option<u32>,
    ) -> IntersectionPolynomial {
        // Fast path: reduction never raises a monomial's grade, and every
        // exponent is bounded by the grade, so inputs of grade <= MAX_EXP
        // cannot overflow the packed fields.
        if p.max_grade() <= MAX_EXP {
            if let Some(pt) = self.packed() {
                if let Some(packed) = PackedPoly::from_generic(&pt.layout, &p) {
                    return pt
                        .reduce_capped(packed, base_cap, self.r as u32)
                        .to_generic(&pt.layout);
                }
            }
        }
        self.reduce_capped_generic(p, base_cap)
    }

    fn reduce_level(
        &self,
        mut p: IntersectionPolynomial,
        j: usize,
        base_cap: Option<u32>,
    ) -> IntersectionPolynomial {
        let v = Variable::U(j as u8);
        let r = self.r as u32;
        loop {
            if p.max_exponent(v) < r {
                return p;
            }
            let (low, high) = p.split_min_exp(v, r);
            // u_j^r <- -(c_1 u_j^{r-1} + .. + c_r), coefficients from the
            // level below; their u-support is u_1..u_{j-1} only.
            let quotient = high.div_exact_pow(v, r);
            p = low + quotient.mul_capped(&self.neg_rest[j - 1], base_cap);
        }
    }

    /// Pushforward to the base: iterated extraction of the coefficient of
    /// `u_j^{r-1}` from the top level down. Expects reduced input.
    pub fn integrate_fiber(&self, p: &IntersectionPolynomial) -> IntersectionPolynomial {
        let mut p = p.clone();
        for j in (1..=self.k).rev() {
            p = p.coeff_of(Variable::U(j as u8), (self.r - 1) as u32);
        }
        p
    }

    /// `reduce(p^e)` computed by iterated multiply-then-reduce, so every
    /// intermediate stays in reduced (and, if capped, base-pruned) form.
    /// Fails once an intermediate exceeds `max_terms`.
    pub fn pow_reduced(
        &self,
        p: &IntersectionPolynomial,
        e: usize,
        base_cap: Option<u32>,
        max_terms: usize,
    ) -> Result<IntersectionPolynomial, Error> {
        // Intermediate grades stay below e * max_grade(p); keep the packed
        // path only when that bound fits a field.
        if (p.max_grade() as usize).saturating_mul(e.max(1)) <= MAX_EXP as usize {
            if let Some(pt) = self.packed() {
                if let Some(pa) = PackedPoly::from_generic(&pt.layout, p) {
                    let mut acc = PackedPoly::one();
                    for _ in 0..e {
                        acc = pt.reduce_capped(
                            acc.mul_capped(&pa, base_cap, &pt.layout),
                            base_cap,
                            self.r as u32,
                        );
                        if acc.len() > max_terms {
                            return Err(Error::TooLarge {
                                terms: acc.len(),
                                limit: max_terms,
                            });
                        }
                    }
                    return Ok(acc.to_generic(&pt.layout));
                }
            }
        }
        let mut acc = IntersectionPolynomial::one();
        for _ in 0..e {
            acc = self.reduce_capped_generic(acc.mul_capped(p, base_cap), base_cap);
            if acc.len() > max_terms {
                return Err(Error::TooLarge {
                    terms: acc.len(),
                    limit: max_terms,
                });
            }
        }
        Ok(acc)
    }

    fn reduce_capped_generic(
        &self,
        mut p: IntersectionPolynomial,
        base_cap: Option<u32>,
    ) -> IntersectionPolynomial {
        for j in (1..=self.k).rev() {
            p = self.reduce_level(p, j, base_cap);
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_MAX_TERMS;

    fn p(s: &str) -> IntersectionPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(matches!(build_tower(1, 3), Err(Error::InvalidDimension(1))));
        assert!(matches!(build_tower(3, 0), Err(Error::InvalidOrder(0))));
    }

    #[test]
    fn level_zero_is_the_base() {
        let t = build_tower(4, 2).unwrap();
        for s in 1..=4 {
            assert_eq!(
                *t.chern_class(0, s),
                IntersectionPolynomial::var(Variable::C(s as u8))
            );
        }
    }

    #[test]
    fn rank_three_recursion_matches_closed_form() {
        // c1 gains 2u, c2 gains c1*u, c3 loses c1*u^2 + 2u^3
        let t = build_tower(3, 3).unwrap();
        for level in 1..3 {
            let u = Monomial::var(Variable::U(level as u8));
            let u2 = Monomial::var_pow(Variable::U(level as u8), 2);
            let u3 = Monomial::var_pow(Variable::U(level as u8), 3);
            let prev1 = t.chern_class(level - 1, 1);
            let prev2 = t.chern_class(level - 1, 2);
            let prev3 = t.chern_class(level - 1, 3);
            assert_eq!(
                *t.chern_class(level, 1),
                prev1 + &IntersectionPolynomial::iterm(u.clone(), 2)
            );
            assert_eq!(
                *t.chern_class(level, 2),
                prev2 + &prev1.mul_monomial(&u)
            );
            assert_eq!(
                *t.chern_class(level, 3),
                &(prev3 - &prev1.mul_monomial(&u2)) - &IntersectionPolynomial::iterm(u3, 2)
            );
        }
    }

    #[test]
    fn total_dimension() {
        assert_eq!(build_tower(3, 3).unwrap().total_dim(), 9);
        assert_eq!(build_tower(5, 5).unwrap().total_dim(), 25);
        assert_eq!(build_tower(2, 1).unwrap().total_dim(), 3);
    }

    #[test]
    fn reduce_leaves_low_degrees_alone() {
        let t = build_tower(3, 2).unwrap();
        assert_eq!(t.reduce(&p("u2^2")), p("u2^2"));
        assert_eq!(t.reduce(&p("h^4")), p("h^4"));
    }

    #[test]
    fn reduce_applies_level_one_relation() {
        let t = build_tower(2, 1).unwrap();
        assert_eq!(t.reduce(&p("u1^2")), p("-c1*u1 - c2"));
        // two-step reduction by hand: u1^3 = (c1^2 - c2) u1 + c1 c2
        assert_eq!(t.reduce(&p("u1^3")), p("c1^2*u1 - c2*u1 + c1*c2"));
    }

    #[test]
    fn reduce_is_bounded_in_each_u() {
        let t = build_tower(3, 3).unwrap();
        let q = t.reduce(&p("u3^5*u2^4*u1^3"));
        for j in 1..=3 {
            assert!(q.max_exponent(Variable::U(j)) <= 2);
        }
    }

    #[test]
    fn pow_reduced_examples() {
        let t = build_tower(2, 1).unwrap();
        assert_eq!(
            t.pow_reduced(&p("u1"), 0, None, DEFAULT_MAX_TERMS).unwrap(),
            IntersectionPolynomial::one()
        );
        assert_eq!(
            t.pow_reduced(&p("u1"), 2, None, DEFAULT_MAX_TERMS).unwrap(),
            p("-c1*u1 - c2")
        );
        let cube = t
            .pow_reduced(&p("u1 + 2*h"), 3, None, DEFAULT_MAX_TERMS)
            .unwrap();
        assert_eq!(
            cube.coeff_of(Variable::U(1), 1),
            p("c1^2 - c2 - 6*h*c1 + 12*h^2")
        );
    }

    #[test]
    fn pow_reduced_respects_ceiling() {
        let t = build_tower(3, 3).unwrap();
        let a = p("u3 + 2*u2 + 6*u1 + 18*h");
        assert!(matches!(
            t.pow_reduced(&a, 8, Some(3), 5),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn integrate_fiber_examples() {
        let t = build_tower(3, 2).unwrap();
        assert_eq!(t.integrate_fiber(&p("u2^2*u1^2")), IntersectionPolynomial::one());
        assert_eq!(t.integrate_fiber(&p("h^3*u2^2*u1^2")), p("h^3"));
        assert_eq!(
            t.integrate_fiber(&p("u2*u1^2*c1")),
            IntersectionPolynomial::zero()
        );
    }

    #[test]
    fn reduce_is_idempotent_on_a_sample() {
        let t = build_tower(3, 2).unwrap();
        let q = p("u2^4*u1^3 + c1*u2^3 - 5*h*u1^4");
        let once = t.reduce(&q);
        assert_eq!(t.reduce(&once), once);
    }
}
