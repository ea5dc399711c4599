//! The algebraic Morse inequality pipeline: assembles the criterion class
//! `F^N - N F^{N-1} G` for the weighted tautological line bundle on the
//! tower, reduces and integrates it down to the base, evaluates it as an
//! exact polynomial in the hypersurface degree `d`, and extracts the least
//! degree from which the polynomial stays positive.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::Error;
use crate::hypersurface::{evaluate_degree, DegreePolynomial};
use crate::polyring::{IntersectionPolynomial, Monomial, Variable};
use crate::tower::build_tower;
use crate::Budget;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Weights of the tautological classes defining the weighted line bundle,
/// together with the hyperplane twist that makes it a difference of nef
/// bundles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    a: Vec<u64>,
    twist: u64,
}

impl WeightVector {
    /// `a_j` is the weight of the level-`j` tautological class.
    pub fn weights(&self) -> &[u64] {
        &self.a
    }

    pub fn twist(&self) -> u64 {
        self.twist
    }

    /// Sum of the weights; `3^{k-1}` for the canonical vector.
    pub fn weighted_degree(&self) -> u64 {
        self.a.iter().sum()
    }

    /// `a_1 >= 3 a_2, .., a_{k-2} >= 3 a_{k-1}` and `a_{k-1} >= 2 a_k > 0`
    /// (for `k = 1`, the single weight must be 1).
    pub fn is_admissible(&self) -> bool {
        let k = self.a.len();
        if k == 0 {
            return false;
        }
        if k == 1 {
            return self.a[0] == 1;
        }
        if self.a[k - 1] == 0 || self.a[k - 2] < 2 * self.a[k - 1] {
            return false;
        }
        (0..k.saturating_sub(2)).all(|i| self.a[i] >= 3 * self.a[i + 1])
    }
}

/// Result of the full pipeline for one `(n, k)` cell.
#[derive(Clone, Debug)]
pub struct MorseResult {
    pub n: usize,
    pub k: usize,
    /// Dimension of the top tower level.
    pub total_dim: usize,
    pub weights: WeightVector,
    /// The integrated criterion class, in `c`, `h` only.
    pub class_in_chern: IntersectionPolynomial,
    /// The class evaluated on a degree-`d` hypersurface.
    pub poly_in_d: DegreePolynomial,
    /// Least degree from which `poly_in_d` is positive, if any.
    pub bound: Option<u64>,
}

/// The canonical weight vector `(2*3^{k-2}, .., 6, 2, 1)` with twist
/// `2*3^{k-1}` (for `k = 1`: weight `(1)`, twist `2`).
pub fn canonical_weights(k: usize) -> Result<WeightVector, Error> {
    if k < 1 {
        return Err(Error::InvalidOrder(k));
    }
    let mut a = Vec::with_capacity(k);
    for j in 1..k {
        a.push(2 * 3u64.pow((k - 1 - j) as u32));
    }
    a.push(1);
    Ok(WeightVector {
        a,
        twist: 2 * 3u64.pow((k - 1) as u32),
    })
}

/// The Morse criterion class for the `(n, k)` cell, integrated down to the
/// base: with `A = u_k + sum_{j<k} a_j u_j + twist*h` and `B = twist*h`,
/// computes the fiber integral of `reduce((A - N B) A^{N-1})`. The result
/// involves only `c` and `h` and is homogeneous of grade `n`.
pub fn morse_class(n: usize, k: usize) -> Result<IntersectionPolynomial, Error> {
    morse_class_with(n, k, &Budget::default(), true)
}

/// As [`morse_class`], with an explicit term ceiling and a switch for the
/// base-grade pruning (disabling the cap is only useful for checking that
/// pruning does not change the answer).
pub fn morse_class_with(
    n: usize,
    k: usize,
    budget: &Budget,
    use_base_cap: bool,
) -> Result<IntersectionPolynomial, Error> {
    let tower = build_tower(n, k)?;
    let w = canonical_weights(k)?;
    let cap = use_base_cap.then_some(n as u32);
    let big_n = tower.total_dim();

    let mut a_poly = IntersectionPolynomial::zero();
    for (j, &aj) in w.a.iter().enumerate() {
        a_poly += &IntersectionPolynomial::term(
            Monomial::var(Variable::U((j + 1) as u8)),
            BigInt::from(aj),
        );
    }
    a_poly += &IntersectionPolynomial::term(Monomial::var(Variable::H), BigInt::from(w.twist));
    let n_times_b = IntersectionPolynomial::term(
        Monomial::var(Variable::H),
        BigInt::from(w.twist) * BigInt::from(big_n as u64),
    );

    let power = tower.pow_reduced(&a_poly, big_n - 1, cap, budget.max_terms)?;
    let head = &a_poly - &n_times_b;
    let reduced = tower.reduce_capped(head.mul_capped(&power, cap), cap);
    Ok(tower.integrate_fiber(&reduced))
}

/// Least `d0 >= 1` such that `p(d) > 0` for every integer `d >= d0`.
///
/// With a positive leading coefficient, the shift certificate below gives
/// an integer `m` past which the polynomial provably stays positive, so
/// only `1..=m` needs to be evaluated; the answer is one past the last
/// non-positive value. Otherwise the polynomial cannot stay positive and
/// the bound is absent. (The certificate point sits near the largest real
/// root, far below the Cauchy bound when the coefficients are lopsided.)
pub fn degree_bound(p: &DegreePolynomial) -> Option<u64> {
    let lead = p.leading_coeff()?;
    if !lead.is_positive() {
        return None;
    }
    // "All Taylor coefficients of p(x + m) are nonnegative" is monotone
    // in m and eventually true; locate the flip by doubling then
    // bisecting.
    let mut hi = 1u64;
    while !shifted_nonnegative(p, hi) {
        hi = hi.checked_mul(2).expect("certificate search overflow");
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if shifted_nonnegative(p, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let certified = hi;
    let mut last_non_positive = 0u64;
    for d in 1..=certified {
        if !p.eval(&BigInt::from(d)).is_positive() {
            last_non_positive = d;
        }
    }
    Some(last_non_positive + 1)
}

/// True when every coefficient of `p(x + m)` is nonnegative; the shifted
/// polynomial then has no room to dip below zero for `x >= 0`.
fn shifted_nonnegative(p: &DegreePolynomial, m: u64) -> bool {
    let deg = match p.degree() {
        Some(d) => d,
        None => return true,
    };
    let m = BigInt::from(m);
    let mut coeffs: Vec<BigInt> = (0..=deg).map(|e| p.coeff(e)).collect();
    for i in 0..deg {
        for j in (i..deg).rev() {
            let carry = &m * &coeffs[j + 1];
            coeffs[j] += carry;
        }
    }
    coeffs.iter().all(|c| !c.is_negative())
}

/// Runs the whole pipeline for one cell.
pub fn compute_bound(n: usize, k: usize) -> Result<MorseResult, Error> {
    compute_bound_with(n, k, &Budget::default())
}

pub fn compute_bound_with(n: usize, k: usize, budget: &Budget) -> Result<MorseResult, Error> {
    let class = morse_class_with(n, k, budget, true)?;
    let poly = evaluate_degree(&class, n)?;
    let bound = degree_bound(&poly);
    Ok(MorseResult {
        n,
        k,
        total_dim: n + k * (n - 1),
        weights: canonical_weights(k)?,
        class_in_chern: class,
        poly_in_d: poly,
        bound,
    })
}

/// One cell of the bounds table.
#[derive(Debug)]
pub struct TableCell {
    pub n: usize,
    pub k: usize,
    pub result: Result<MorseResult, Error>,
}

/// Computes the cells `n = 2..=max_n`, `k = 1..=k_max` independently (in
/// parallel when enabled), in row-major order.
pub fn compute_table(max_n: usize, k_max: usize, budget: &Budget) -> Vec<TableCell> {
    let cells: Vec<(usize, usize)> = (2..=max_n)
        .flat_map(|n| (1..=k_max).map(move |k| (n, k)))
        .collect();

    #[cfg(feature = "parallel")]
    let iter = cells.into_par_iter();
    #[cfg(not(feature = "parallel"))]
    let iter = cells.into_iter();

    iter.map(|(n, k)| TableCell {
        n,
        k,
        result: compute_bound_with(n, k, budget),
    })
    .collect()
}
