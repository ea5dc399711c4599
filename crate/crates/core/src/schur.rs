//! Partition combinatorics: the Pieri rule, graded decomposition of the
//! weighted jet bundles into irreducible pieces, the Brückmann–Rackwitz
//! vanishing test for Schur powers of the cotangent bundle, and the
//! verifier certifying that hypersurfaces carry no jet differentials of
//! order below their dimension.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::Error;
use crate::Budget;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// A nonincreasing tuple of positive parts (trailing zeros trimmed).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Parts must be nonincreasing; zeros are trimmed.
    pub fn new(parts: Vec<u32>) -> Self {
        assert!(
            parts.windows(2).all(|w| w[0] >= w[1]),
            "partition parts must be nonincreasing"
        );
        let mut parts = parts;
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// The 1-based part, 0 beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 || i > self.parts.len() {
            0
        } else {
            self.parts[i - 1]
        }
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of boxes.
    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&p| u64::from(p)).sum()
    }

    /// Column depths: the `i`-th part of the conjugate is the number of
    /// rows of length at least `i`.
    pub fn conjugate(&self) -> Partition {
        let cols = self.parts.first().copied().unwrap_or(0) as usize;
        let parts = (1..=cols)
            .map(|i| self.parts.iter().filter(|&&p| p >= i as u32).count() as u32)
            .collect();
        Partition { parts }
    }

    pub fn contains(&self, other: &Partition) -> bool {
        (1..=other.len()).all(|i| self.part(i) >= other.part(i))
    }

    /// Comma-separated parts, e.g. `3,1,1` (empty for the empty
    /// partition).
    pub fn csv(&self) -> String {
        self.parts
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.csv())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Partition::empty());
        }
        let mut parts = Vec::new();
        for item in s.split(',') {
            let value: u32 = item
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad partition part {item:?}")))?;
            parts.push(value);
        }
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!(
                "partition parts must be nonincreasing: {s:?}"
            )));
        }
        Ok(Partition::new(parts))
    }
}

/// A formal nonnegative combination of partitions.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct PartitionMultiset {
    entries: BTreeMap<Partition, u64>,
}

impl PartitionMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(p: Partition) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(p, 1);
        PartitionMultiset { entries }
    }

    pub fn add(&mut self, p: Partition, mult: u64) {
        if mult > 0 {
            *self.entries.entry(p).or_insert(0) += mult;
        }
    }

    /// Distinct partitions.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn multiplicity(&self, p: &Partition) -> u64 {
        self.entries.get(p).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, u64)> {
        self.entries.iter().map(|(p, &m)| (p, m))
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }
}

/// Exponents of one graded piece of the order-`k` jet bundle: `ell[j-1]`
/// counts the symmetric factor contributed by the `j`-th derivative, of
/// weight `j`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GradedPiece {
    ell: Vec<u32>,
}

impl GradedPiece {
    pub fn new(ell: Vec<u32>) -> Self {
        GradedPiece { ell }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.ell
    }

    /// The weighted degree `l1 + 2 l2 + .. + k lk`.
    pub fn weighted_degree(&self) -> u64 {
        self.ell
            .iter()
            .enumerate()
            .map(|(i, &l)| (i as u64 + 1) * u64::from(l))
            .sum()
    }
}

impl fmt::Display for GradedPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.ell
                .iter()
                .map(|l| l.to_string())
            .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// Pieri rule: all partitions obtained from `lambda` by adding `m` boxes
/// with no two in the same column, kept to at most `n` rows. Every
/// multiplicity is 1.
pub fn pieri(lambda: &Partition, m: u32, n: usize) -> PartitionMultiset {
    assert!(lambda.len() <= n, "partition has more than n rows");
    let mut out = PartitionMultiset::new();
    let max_rows = (lambda.len() + 1).min(n);
    let mut current = Vec::with_capacity(max_rows);
    extend_rows(lambda, 1, max_rows, m, &mut current, &mut out);
    out
}

fn extend_rows(
    lambda: &Partition,
    row: usize,
    max_rows: usize,
    remaining: u32,
    current: &mut Vec<u32>,
    out: &mut PartitionMultiset,
) {
    if row > max_rows {
        if remaining == 0 {
            out.add(Partition::new(current.clone()), 1);
        }
        return;
    }
    let base = lambda.part(row);
    // a row may grow up to the previous row of lambda (horizontal strip)
    let hi = if row == 1 {
        base + remaining
    } else {
        lambda.part(row - 1).min(base + remaining)
    };
    for value in base..=hi {
        current.push(value);
        extend_rows(lambda, row + 1, max_rows, remaining - (value - base), current, out);
        current.pop();
    }
}

/// Decomposition of `S^{l1} V x .. x S^{lk} V` into irreducibles by
/// iterated Pieri products, for a group of rank `n`.
pub fn decompose_tensor(ell: &GradedPiece, n: usize) -> PartitionMultiset {
    decompose_tensor_guarded(ell, n, usize::MAX).expect("unguarded decomposition cannot fail")
}

fn decompose_tensor_guarded(
    ell: &GradedPiece,
    n: usize,
    max_entries: usize,
) -> Result<PartitionMultiset, Error> {
    let mut acc = PartitionMultiset::singleton(Partition::empty());
    for &l in ell.exponents() {
        if l == 0 {
            continue;
        }
        let mut next = PartitionMultiset::new();
        for (lambda, mult) in acc.iter() {
            for (mu, _) in pieri(lambda, l, n).iter() {
                next.add(mu.clone(), mult);
            }
            if next.len() > max_entries {
                return Err(Error::TooLarge {
                    terms: next.len(),
                    limit: max_entries,
                });
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Dimension of the irreducible representation of the rank-`n` general
/// linear group with highest weight `lambda` (Weyl dimension formula).
pub fn schur_dim(lambda: &Partition, n: usize) -> BigUint {
    assert!(lambda.len() <= n, "partition has more than n rows");
    let mut num = BigUint::from(1u32);
    let mut den = BigUint::from(1u32);
    for i in 1..=n {
        for j in (i + 1)..=n {
            let li = u64::from(lambda.part(i));
            let lj = u64::from(lambda.part(j));
            num *= BigUint::from(li - lj + (j - i) as u64);
            den *= BigUint::from((j - i) as u64);
        }
    }
    num / den
}

/// All exponent tuples of weighted degree `m` for order `k`, in
/// descending lexicographic order.
pub fn graded_pieces(k: usize, m: u32) -> Vec<GradedPiece> {
    assert!(k >= 1, "order must be at least 1");
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    enumerate_pieces(k, 1, m, &mut current, &mut out);
    out
}

fn enumerate_pieces(
    k: usize,
    pos: usize,
    remaining: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<GradedPiece>,
) {
    let weight = pos as u32;
    if pos == k {
        if remaining % weight == 0 {
            current.push(remaining / weight);
            out.push(GradedPiece::new(current.clone()));
            current.pop();
        }
        return;
    }
    for l in (0..=remaining / weight).rev() {
        current.push(l);
        enumerate_pieces(k, pos + 1, remaining - weight * l, current, out);
        current.pop();
    }
}

/// Brückmann–Rackwitz test: `H^0` of the Schur power of the cotangent
/// bundle vanishes on every smooth `n`-dimensional complete intersection
/// in projective `ambient`-space whenever the total depth of the first
/// `ambient - n` columns is below `n`.
pub fn br_vanishing(lambda: &Partition, n: usize, ambient: usize) -> bool {
    column_sum(lambda, ambient - n) < n as u64
}

/// Sum of the first `codim` column depths.
fn column_sum(lambda: &Partition, codim: usize) -> u64 {
    (1..=codim)
        .map(|i| lambda.parts().iter().filter(|&&p| p >= i as u32).count() as u64)
        .sum()
}

/// Which jet bundle the verification statement is about. The enumeration
/// always runs over the full graded pieces; the invariant subbundle sits
/// inside them, so its sections vanish whenever all components do.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum JetMode {
    #[default]
    Invariant,
    GreenGriffiths,
}

impl fmt::Display for JetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetMode::Invariant => write!(f, "invariant"),
            JetMode::GreenGriffiths => write!(f, "green-griffiths"),
        }
    }
}

/// Why a component is flagged in a [`VanishingReport`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ViolationKind {
    /// More nonzero rows than the jet order allows.
    ExcessRows,
    /// The column test fails, so vanishing is not guaranteed.
    NotGuaranteed,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::ExcessRows => write!(f, "excess-rows"),
            ViolationKind::NotGuaranteed => write!(f, "not-guaranteed"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Violation {
    pub piece: GradedPiece,
    pub component: Partition,
    pub multiplicity: u64,
    /// Total depth of the front columns entering the test.
    pub column_sum: u64,
    pub kind: ViolationKind,
}

/// Outcome of the vanishing verification for one `(n, k, m)`.
#[derive(Clone, Debug)]
pub struct VanishingReport {
    pub n: usize,
    pub ambient: usize,
    pub k: usize,
    pub m: u32,
    pub mode: JetMode,
    /// Number of graded pieces of weighted degree `m`.
    pub pieces: usize,
    /// Number of irreducible components over all pieces (distinct per
    /// piece).
    pub components: usize,
    pub all_vanish: bool,
    pub violations: Vec<Violation>,
}

/// Verifies that every irreducible component of every graded piece of the
/// order-`k` weight-`m` jet bundle of a smooth hypersurface passes the
/// column vanishing test. For `k < n` the report must come back clean;
/// for `k >= n` the violations list the components whose vanishing is not
/// guaranteed.
pub fn verify_theorem1(n: usize, k: usize, m: u32, mode: JetMode) -> Result<VanishingReport, Error> {
    verify_vanishing(n, n + 1, k, m, mode, &Budget::default())
}

/// As [`verify_theorem1`], for a complete intersection of dimension `n`
/// in projective `ambient`-space, with an explicit enumeration ceiling.
pub fn verify_vanishing(
    n: usize,
    ambient: usize,
    k: usize,
    m: u32,
    mode: JetMode,
    budget: &Budget,
) -> Result<VanishingReport, Error> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    if ambient <= n {
        return Err(Error::InvalidAmbient { ambient, dim: n });
    }
    if k < 1 {
        return Err(Error::InvalidOrder(k));
    }
    if m < 1 {
        return Err(Error::InvalidWeight(m));
    }
    let codim = ambient - n;
    let pieces = graded_pieces(k, m);
    if pieces.len() > budget.max_terms {
        return Err(Error::TooLarge {
            terms: pieces.len(),
            limit: budget.max_terms,
        });
    }

    let summarize = |piece: &GradedPiece| -> Result<(usize, Vec<Violation>), Error> {
        let components = decompose_tensor_guarded(piece, n, budget.max_terms)?;
        let mut violations = Vec::new();
        for (lambda, mult) in components.iter() {
            let t = column_sum(lambda, codim);
            let kind = if lambda.len() > k {
                Some(ViolationKind::ExcessRows)
            } else if t >= n as u64 {
                Some(ViolationKind::NotGuaranteed)
            } else {
                None
            };
            if let Some(kind) = kind {
                violations.push(Violation {
                    piece: piece.clone(),
                    component: lambda.clone(),
                    multiplicity: mult,
                    column_sum: t,
                    kind,
                });
            }
        }
        Ok((components.len(), violations))
    };

    #[cfg(feature = "parallel")]
    let summaries: Result<Vec<_>, Error> = pieces.par_iter().map(summarize).collect();
    #[cfg(not(feature = "parallel"))]
    let summaries: Result<Vec<_>, Error> = pieces.iter().map(summarize).collect();
    let summaries = summaries?;

    let mut components = 0usize;
    let mut violations = Vec::new();
    for (count, mut viols) in summaries {
        components += count;
        violations.append(&mut viols);
        if components > budget.max_terms {
            return Err(Error::TooLarge {
                terms: components,
                limit: budget.max_terms,
            });
        }
    }
    Ok(VanishingReport {
        n,
        ambient,
        k,
        m,
        mode,
        pieces: pieces.len(),
        components,
        all_vanish: violations.is_empty(),
        violations,
    })
}
