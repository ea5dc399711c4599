//! Packed fast path for the tower pipeline.
//!
//! Within one tower computation the variable universe is fixed
//! (`u1..uk`, `c1..cn`, `h`), so an exponent vector packs into a `u128`
//! with one 6-bit field per variable. Monomial multiplication becomes a
//! single integer addition and term accumulation a hash map keyed by the
//! packed word, which is what makes the large cells tractable.
//!
//! The packing is only used when it provably cannot overflow: every
//! intermediate of the reduction has total grade at most that of the
//! input, so as long as the input grade fits in one field (`<= 63`) no
//! individual exponent can escape its field. Callers fall back to the
//! generic representation otherwise.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::polyring::{IntersectionPolynomial, Monomial, Variable};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const FIELD_BITS: u32 = 6;
/// Largest exponent a field can hold.
pub(crate) const MAX_EXP: u32 = (1 << FIELD_BITS) - 1;
const MAX_VARS: usize = (128 / FIELD_BITS) as usize;

/// Fixed variable universe with one field per variable.
#[derive(Clone, Debug)]
pub(crate) struct Layout {
    vars: Vec<Variable>,
    grades: Vec<u32>,
    base: Vec<bool>,
}

impl Layout {
    /// Layout for a tower of height `k` over an `n`-dimensional base, or
    /// `None` when the universe does not fit the packing.
    pub(crate) fn for_tower(n: usize, k: usize) -> Option<Layout> {
        let count = k + n + 1;
        if count > MAX_VARS {
            return None;
        }
        let mut vars = Vec::with_capacity(count);
        for j in (1..=k).rev() {
            vars.push(Variable::U(j as u8));
        }
        for s in 1..=n {
            vars.push(Variable::C(s as u8));
        }
        vars.push(Variable::H);
        let grades = vars.iter().map(|v| v.grade()).collect();
        let base = vars.iter().map(|v| v.is_base()).collect();
        Some(Layout { vars, grades, base })
    }

    pub(crate) fn index_of(&self, v: Variable) -> Option<usize> {
        self.vars.iter().position(|&w| w == v)
    }

    fn field(key: u128, idx: usize) -> u32 {
        ((key >> (FIELD_BITS as usize * idx)) & u128::from(MAX_EXP)) as u32
    }

    fn base_grade_of(&self, key: u128) -> u32 {
        let mut g = 0u32;
        for (idx, &is_base) in self.base.iter().enumerate() {
            if is_base {
                g += Self::field(key, idx) * self.grades[idx];
            }
        }
        g
    }

    fn pack_monomial(&self, m: &Monomial) -> Option<(u128, u32)> {
        let mut key = 0u128;
        let mut base_grade = 0u32;
        for (v, e) in m.iter() {
            if e > MAX_EXP {
                return None;
            }
            let idx = self.index_of(v)?;
            key |= u128::from(e) << (FIELD_BITS as usize * idx);
            if self.base[idx] {
                base_grade += e * self.grades[idx];
            }
        }
        Some((key, base_grade))
    }

    fn unpack_monomial(&self, key: u128) -> Monomial {
        Monomial::from_exps(
            self.vars
                .iter()
                .enumerate()
                .map(|(idx, &v)| (v, Self::field(key, idx)))
                .filter(|&(_, e)| e > 0),
        )
    }
}

#[derive(Clone, Debug)]
struct Term {
    key: u128,
    base_grade: u32,
    coeff: BigInt,
}

/// A polynomial over a fixed [`Layout`], terms sorted by packed key.
#[derive(Clone, Debug)]
pub(crate) struct PackedPoly {
    terms: Vec<Term>,
}

/// Multiplicative mixer for packed keys (std's default hasher is far too
/// slow for this inner loop).
#[derive(Default)]
struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ u64::from(b)).wrapping_mul(0x100000001b3);
        }
    }

    fn write_u128(&mut self, x: u128) {
        let mut h = (x as u64) ^ ((x >> 64) as u64).wrapping_mul(0x9E3779B97F4A7C15);
        h ^= h >> 30;
        h = h.wrapping_mul(0xBF58476D1CE4E5B9);
        h ^= h >> 27;
        h = h.wrapping_mul(0x94D049BB133111EB);
        h ^= h >> 31;
        self.0 = h;
    }
}

type KeyMap = HashMap<u128, BigInt, BuildHasherDefault<KeyHasher>>;

/// Chunk threshold mirroring the generic multiplication path.
#[cfg(feature = "parallel")]
const PAR_MUL_WORK: usize = 1 << 14;

impl PackedPoly {
    pub(crate) fn one() -> Self {
        PackedPoly {
            terms: vec![Term {
                key: 0,
                base_grade: 0,
                coeff: BigInt::from(1),
            }],
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn from_generic(layout: &Layout, p: &IntersectionPolynomial) -> Option<Self> {
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let (key, base_grade) = layout.pack_monomial(m)?;
            terms.push(Term {
                key,
                base_grade,
                coeff: c.clone(),
            });
        }
        terms.sort_unstable_by_key(|t| t.key);
        Some(PackedPoly { terms })
    }

    pub(crate) fn to_generic(&self, layout: &Layout) -> IntersectionPolynomial {
        IntersectionPolynomial::from_terms(
            self.terms
                .iter()
                .map(|t| (layout.unpack_monomial(t.key), t.coeff.clone())),
        )
    }

    pub(crate) fn max_exp(&self, idx: usize) -> u32 {
        self.terms
            .iter()
            .map(|t| Layout::field(t.key, idx))
            .max()
            .unwrap_or(0)
    }

    /// Splits into (exponent of field `idx` below `e`, the rest).
    pub(crate) fn split_min_exp(self, idx: usize, e: u32) -> (Self, Self) {
        let (low, high) = self
            .terms
            .into_iter()
            .partition(|t| Layout::field(t.key, idx) < e);
        (PackedPoly { terms: low }, PackedPoly { terms: high })
    }

    /// Exact division by the `e`-th power of field `idx` (all terms must
    /// carry at least that exponent); key order is preserved.
    pub(crate) fn div_exact_pow(mut self, idx: usize, e: u32) -> Self {
        let delta = u128::from(e) << (FIELD_BITS as usize * idx);
        for t in &mut self.terms {
            debug_assert!(Layout::field(t.key, idx) >= e);
            t.key -= delta;
        }
        self
    }

    /// Merge-accumulate of two key-sorted polynomials.
    pub(crate) fn add(self, other: Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.into_iter().peekable();
        let mut b = other.terms.into_iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => {
                    if x.key < y.key {
                        out.push(a.next().unwrap());
                    } else if x.key > y.key {
                        out.push(b.next().unwrap());
                    } else {
                        let mut x = a.next().unwrap();
                        let y = b.next().unwrap();
                        x.coeff += y.coeff;
                        if !x.coeff.is_zero() {
                            out.push(x);
                        }
                    }
                }
                (Some(_), None) => {
                    out.extend(a);
                    break;
                }
                (None, Some(_)) => {
                    out.extend(b);
                    break;
                }
                (None, None) => break,
            }
        }
        PackedPoly { terms: out }
    }

    /// Distributive product with base-grade pruning. The smaller operand
    /// is pre-sorted by base grade so the cap cuts the inner loop short.
    pub(crate) fn mul_capped(&self, other: &Self, base_cap: Option<u32>, layout: &Layout) -> Self {
        if self.terms.is_empty() || other.terms.is_empty() {
            return PackedPoly { terms: Vec::new() };
        }
        let (outer, inner) = if self.terms.len() >= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut inner_terms: Vec<&Term> = inner.terms.iter().collect();
        inner_terms.sort_unstable_by_key(|t| t.base_grade);

        #[cfg(feature = "parallel")]
        {
            let work = outer.terms.len().saturating_mul(inner_terms.len());
            if work >= PAR_MUL_WORK && rayon::current_num_threads() > 1 {
                let chunk = outer
                    .terms
                    .len()
                    .div_ceil(rayon::current_num_threads() * 4)
                    .max(16);
                let map = outer
                    .terms
                    .par_chunks(chunk)
                    .map(|block| mul_block_packed(block, &inner_terms, base_cap))
                    .reduce(KeyMap::default, merge_key_maps);
                return Self::from_key_map(map, layout);
            }
        }

        Self::from_key_map(mul_block_packed(&outer.terms, &inner_terms, base_cap), layout)
    }

    fn from_key_map(map: KeyMap, layout: &Layout) -> Self {
        let mut terms: Vec<Term> = map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(key, coeff)| Term {
                key,
                base_grade: layout.base_grade_of(key),
                coeff,
            })
            .collect();
        terms.sort_unstable_by_key(|t| t.key);
        PackedPoly { terms }
    }
}

fn mul_block_packed(block: &[Term], inner: &[&Term], base_cap: Option<u32>) -> KeyMap {
    let mut acc = KeyMap::with_capacity_and_hasher(block.len() * 2, Default::default());
    for t1 in block {
        for t2 in inner {
            if let Some(cap) = base_cap {
                if t1.base_grade + t2.base_grade > cap {
                    break; // inner is sorted by base grade
                }
            }
            let key = t1.key + t2.key;
            let c = &t1.coeff * &t2.coeff;
            *acc.entry(key).or_insert_with(BigInt::zero) += c;
        }
    }
    acc
}

#[cfg(feature = "parallel")]
fn merge_key_maps(mut a: KeyMap, mut b: KeyMap) -> KeyMap {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    for (key, c) in b {
        *a.entry(key).or_insert_with(BigInt::zero) += c;
    }
    a
}

/// The tower data pre-packed for the fast path.
#[derive(Clone, Debug)]
pub(crate) struct PackedTower {
    pub(crate) layout: Layout,
    /// `neg_rest[j-1]` packed, for `j = 1..=k`.
    pub(crate) neg_rest: Vec<PackedPoly>,
    pub(crate) u_index: Vec<usize>,
}

impl PackedTower {
    pub(crate) fn build(
        n: usize,
        k: usize,
        neg_rest: &[IntersectionPolynomial],
    ) -> Option<PackedTower> {
        let layout = Layout::for_tower(n, k)?;
        let packed: Option<Vec<PackedPoly>> = neg_rest
            .iter()
            .map(|p| PackedPoly::from_generic(&layout, p))
            .collect();
        let u_index = (1..=k)
            .map(|j| layout.index_of(Variable::U(j as u8)).unwrap())
            .collect();
        Some(PackedTower {
            layout,
            neg_rest: packed?,
            u_index,
        })
    }

    /// Full reduction (top level down, to a fixed point per level).
    pub(crate) fn reduce_capped(&self, mut p: PackedPoly, base_cap: Option<u32>, r: u32) -> PackedPoly {
        for j in (0..self.u_index.len()).rev() {
            let idx = self.u_index[j];
            loop {
                if p.max_exp(idx) < r {
                    break;
                }
                let (low, high) = p.split_min_exp(idx, r);
                let quotient = high.div_exact_pow(idx, r);
                p = low.add(quotient.mul_capped(&self.neg_rest[j], base_cap, &self.layout));
            }
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_round_trip() {
        let layout = Layout::for_tower(3, 3).unwrap();
        let p: IntersectionPolynomial =
            "u3^2*u1 - 5*c2*h + 42*c1^3 - 1".parse().unwrap();
        let packed = PackedPoly::from_generic(&layout, &p).unwrap();
        assert_eq!(packed.to_generic(&layout), p);
    }

    #[test]
    fn packed_mul_matches_generic(){
        let layout = Layout::for_tower(2, 2).unwrap();
        let a: IntersectionPolynomial = "u2 + 2*u1 + 6*h".parse().unwrap();
        let b: IntersectionPolynomial = "u1^2 - c1*u1 - c2 + 3*h^2".parse().unwrap();
        for cap in [None, Some(2)] {
            let generic = a.mul_capped(&b, cap);
            let pa = PackedPoly::from_generic(&layout, &a).unwrap();
            let pb = PackedPoly::from_generic(&layout, &b).unwrap();
            assert_eq!(pa.mul_capped(&pb, cap, &layout).to_generic(&layout), generic);
        }
    }

    #[test]
    fn layout_rejects_oversized_universes() {
        assert!(Layout::for_tower(30, 30).is_none());
        let layout = Layout::for_tower(2, 1).unwrap();
        let too_big: IntersectionPolynomial = "h^64".parse().unwrap();
        assert!(PackedPoly::from_generic(&layout, &too_big).is_none());
        let foreign: IntersectionPolynomial = "u5".parse().unwrap();
        assert!(PackedPoly::from_generic(&layout, &foreign).is_none());
    }
}
