//! Subset-size vectors, disjoint subset families and their counts.
//!
//! Two counters are provided. [`paper_count`] divides the product of binomials
//! of a size vector by `prod #_g`, the number of channels carrying `g` groups;
//! [`exact_count`] divides by `prod #_g!` and therefore equals the number of
//! distinct families produced by [`enumerate_partitions`]. They agree whenever
//! no size occurs more than twice.

use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, Result};

/// Which size vectors a scheme searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMode {
    All,
    /// Subset sizes differ by at most one.
    AlmostEqual,
    Equal,
    /// Exactly `n` groups on every channel.
    Fixed(usize),
}

impl fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionMode::All => f.write_str("all"),
            SelectionMode::AlmostEqual => f.write_str("almost_equal"),
            SelectionMode::Equal => f.write_str("equal"),
            SelectionMode::Fixed(n) => write!(f, "fixed({n})"),
        }
    }
}

impl std::str::FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" | "optimal" => Ok(SelectionMode::All),
            "almost_equal" => Ok(SelectionMode::AlmostEqual),
            "equal" => Ok(SelectionMode::Equal),
            other => {
                let n = other
                    .strip_prefix("fixed(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|n| n.trim().parse::<usize>().ok())
                    .ok_or_else(|| Error::param("selection_mode", format!("unknown mode `{other}`")))?;
                if n == 0 {
                    return Err(Error::param("selection_mode", "fixed(n) needs n >= 1"));
                }
                Ok(SelectionMode::Fixed(n))
            }
        }
    }
}

/// Non-increasing subset sizes, one per channel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SizeVector {
    pub sizes: Vec<usize>,
}

impl SizeVector {
    pub fn new(mut sizes: Vec<usize>) -> Result<Self> {
        if sizes.contains(&0) {
            return Err(Error::param("sizes", "every subset size must be >= 1"));
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Ok(SizeVector { sizes })
    }

    /// Total number of groups selected.
    pub fn q(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// `(size, multiplicity)` pairs.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &s in &self.sizes {
            *m.entry(s).or_insert(0) += 1;
        }
        m
    }
}

impl fmt::Display for SizeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.sizes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

/// Disjoint non-empty subsets in canonical form: each subset ascending, the
/// subsets ordered by size (descending) and then smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetCombination {
    pub subsets: Vec<Vec<usize>>,
}

impl SubsetCombination {
    pub fn is_canonical(&self) -> bool {
        self.subsets
            .iter()
            .all(|s| !s.is_empty() && s.windows(2).all(|w| w[0] < w[1]))
            && self
                .subsets
                .windows(2)
                .all(|w| w[0].len() > w[1].len() || (w[0].len() == w[1].len() && w[0][0] < w[1][0]))
    }

    pub fn is_disjoint(&self) -> bool {
        let mut all: Vec<usize> = self.subsets.iter().flatten().copied().collect();
        let n = all.len();
        all.sort_unstable();
        all.dedup();
        all.len() == n
    }

    pub fn size_vector(&self) -> SizeVector {
        SizeVector {
            sizes: self.subsets.iter().map(Vec::len).collect(),
        }
    }
}

fn check_gc(groups: usize, channels: usize) -> Result<()> {
    if channels == 0 {
        return Err(Error::param("channels", "must be >= 1"));
    }
    if channels > groups {
        return Err(Error::param("channels", format!("C = {channels} exceeds G = {groups}")));
    }
    Ok(())
}

/// Partitions of `q` into exactly `parts` parts, each at most `max_part`,
/// appended in non-increasing form.
fn partitions_into(q: usize, parts: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if parts == 0 {
        if q == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    if q < parts {
        return;
    }
    let hi = max_part.min(q - (parts - 1));
    for first in 1..=hi {
        // Remaining parts are at most `first`, so they can hold at most
        // `first * (parts - 1)`.
        if q - first > first * (parts - 1) {
            continue;
        }
        prefix.push(first);
        partitions_into(q - first, parts - 1, first, prefix, out);
        prefix.pop();
    }
}

/// All admissible size vectors for `mode`, in lexicographic order.
pub fn enumerate_size_vectors(groups: usize, channels: usize, mode: SelectionMode) -> Result<Vec<SizeVector>> {
    check_gc(groups, channels)?;
    if let SelectionMode::Fixed(0) = mode {
        return Err(Error::param("selection_mode", "fixed(n) needs n >= 1"));
    }
    let mut raw = Vec::new();
    for q in channels..=groups {
        partitions_into(q, channels, q, &mut Vec::with_capacity(channels), &mut raw);
    }
    let mut out: Vec<SizeVector> = raw
        .into_iter()
        .filter(|s| {
            let (max, min) = (s[0], s[s.len() - 1]);
            match mode {
                SelectionMode::All => true,
                SelectionMode::AlmostEqual => max - min <= 1,
                SelectionMode::Equal => max == min,
                SelectionMode::Fixed(n) => max == n && min == n,
            }
        })
        .map(|sizes| SizeVector { sizes })
        .collect();
    out.sort();
    Ok(out)
}

pub fn binomial(n: usize, k: usize) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128).ok_or(Error::Overflow)? / (i as u128 + 1);
    }
    Ok(acc)
}

fn factorial(n: usize) -> Result<u128> {
    (1..=n as u128).try_fold(1u128, |acc, i| acc.checked_mul(i).ok_or(Error::Overflow))
}

/// `prod_i binom(G - x_1 - ... - x_{i-1}, x_i)`.
fn binomial_product(groups: usize, sv: &SizeVector) -> Result<u128> {
    let mut remaining = groups;
    let mut acc: u128 = 1;
    for &s in &sv.sizes {
        acc = acc.checked_mul(binomial(remaining, s)?).ok_or(Error::Overflow)?;
        remaining = remaining.saturating_sub(s);
    }
    Ok(acc)
}

fn paper_term(groups: usize, sv: &SizeVector) -> Result<u128> {
    let divisor: u128 = sv.multiplicities().values().map(|&m| m as u128).product();
    Ok(binomial_product(groups, sv)? / divisor)
}

fn exact_term(groups: usize, sv: &SizeVector) -> Result<u128> {
    let mut divisor: u128 = 1;
    for &m in sv.multiplicities().values() {
        divisor = divisor.checked_mul(factorial(m)?).ok_or(Error::Overflow)?;
    }
    Ok(binomial_product(groups, sv)? / divisor)
}

fn checked_sum(mut terms: impl Iterator<Item = Result<u128>>) -> Result<u128> {
    terms.try_fold(0u128, |acc, t| acc.checked_add(t?).ok_or(Error::Overflow))
}

/// Number of subset combinations with the `prod #_g` divisor.
pub fn paper_count(groups: usize, channels: usize, mode: SelectionMode) -> Result<u128> {
    let svs = enumerate_size_vectors(groups, channels, mode)?;
    checked_sum(svs.iter().map(|sv| paper_term(groups, sv)))
}

/// [`paper_count`] split by the total number of selected groups `q`.
pub fn paper_count_by_q(groups: usize, channels: usize, mode: SelectionMode) -> Result<BTreeMap<usize, u128>> {
    let mut out = BTreeMap::new();
    for sv in enumerate_size_vectors(groups, channels, mode)? {
        let term = paper_term(groups, &sv)?;
        let slot = out.entry(sv.q()).or_insert(0u128);
        *slot = slot.checked_add(term).ok_or(Error::Overflow)?;
    }
    Ok(out)
}

/// Number of distinct subset families (divisor `prod #_g!`).
pub fn exact_count(groups: usize, channels: usize, mode: SelectionMode) -> Result<u128> {
    let svs = enumerate_size_vectors(groups, channels, mode)?;
    checked_sum(svs.iter().map(|sv| exact_term(groups, sv)))
}

/// Term of [`paper_count`] for one size vector drawn from `groups` items.
pub fn paper_count_for(groups: usize, sv: &SizeVector) -> Result<u128> {
    if sv.q() > groups {
        return Ok(0);
    }
    paper_term(groups, sv)
}

/// Number of distinct families for one size vector drawn from `groups` items.
pub fn exact_count_for(groups: usize, sv: &SizeVector) -> Result<u128> {
    if sv.q() > groups {
        return Ok(0);
    }
    exact_term(groups, sv)
}

/// `paper_count * C!`: subset combinations times channel permutations.
pub fn allocation_search_space(groups: usize, channels: usize, mode: SelectionMode) -> Result<u128> {
    paper_count(groups, channels, mode)?
        .checked_mul(factorial(channels)?)
        .ok_or(Error::Overflow)
}

/// Equal-size-only lower bound on the search:
/// `[sum_{n=1}^{G/C} prod_{i=0}^{C-1} binom(G - i n, n) / C] * C!`.
pub fn complexity_lower_bound(groups: usize, channels: usize) -> Result<u128> {
    check_gc(groups, channels)?;
    let mut sum: u128 = 0;
    for n in 1..=groups / channels {
        let mut prod: u128 = 1;
        for i in 0..channels {
            prod = prod.checked_mul(binomial(groups - i * n, n)?).ok_or(Error::Overflow)?;
        }
        sum = sum.checked_add(prod / channels as u128).ok_or(Error::Overflow)?;
    }
    sum.checked_mul(factorial(channels)?).ok_or(Error::Overflow)
}

/// One level of the partition iterator: a combination of `size` positions
/// into `avail`.
#[derive(Debug, Clone)]
struct Level {
    avail: Vec<usize>,
    idx: Vec<usize>,
}

/// Lexicographic iterator over the canonical families of a size vector.
///
/// The iterator is `Clone`, so a partially consumed iterator can be saved and
/// resumed; [`PartitionIter::shard`] splits the sequence round-robin.
#[derive(Debug, Clone)]
pub struct PartitionIter {
    pool: Vec<usize>,
    sizes: Vec<usize>,
    levels: Vec<Level>,
    started: bool,
    done: bool,
    yielded: u64,
}

impl PartitionIter {
    pub fn new(group_ids: &[usize], sv: &SizeVector) -> Result<Self> {
        let mut pool = group_ids.to_vec();
        pool.sort_unstable();
        let before = pool.len();
        pool.dedup();
        if pool.len() != before {
            return Err(Error::param("group_ids", "duplicate group id"));
        }
        if sv.sizes.contains(&0) || sv.sizes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::param("sizes", format!("{sv} is not a canonical size vector")));
        }
        if sv.q() > pool.len() {
            return Err(Error::PoolTooSmall {
                sizes: sv.sizes.clone(),
                needed: sv.q(),
                available: pool.len(),
            });
        }
        Ok(PartitionIter {
            pool,
            sizes: sv.sizes.clone(),
            levels: Vec::with_capacity(sv.len()),
            started: false,
            done: false,
            yielded: 0,
        })
    }

    /// Number of families yielded so far.
    pub fn position(&self) -> u64 {
        self.yielded
    }

    /// Every `num_shards`-th family starting from the `index`-th.
    pub fn shard(self, index: usize, num_shards: usize) -> impl Iterator<Item = SubsetCombination> {
        assert!(num_shards >= 1 && index < num_shards, "invalid shard");
        self.skip(index).step_by(num_shards)
    }

    fn subset_of(level: &Level) -> impl Iterator<Item = usize> + '_ {
        level.idx.iter().map(move |&i| level.avail[i])
    }

    /// Initialises level `l` at its first valid combination.
    fn open_level(&mut self, l: usize) -> bool {
        let used: Vec<usize> = self.levels[..l]
            .iter()
            .flat_map(|lv| Self::subset_of(lv).collect::<Vec<_>>())
            .collect();
        let avail: Vec<usize> = self.pool.iter().copied().filter(|g| !used.contains(g)).collect();
        let size = self.sizes[l];
        // Within a run of equal sizes the smallest elements must increase.
        let start = if l > 0 && self.sizes[l - 1] == size {
            let prev_min = self.levels[l - 1].avail[self.levels[l - 1].idx[0]];
            avail.partition_point(|&g| g <= prev_min)
        } else {
            0
        };
        if start + size > avail.len() {
            return false;
        }
        let idx = (start..start + size).collect();
        self.levels.truncate(l);
        self.levels.push(Level { avail, idx });
        true
    }

    /// Steps level `l` to its next combination in lexicographic order.
    fn advance_level(&mut self, l: usize) -> bool {
        let level = &mut self.levels[l];
        let n = level.avail.len();
        let s = level.idx.len();
        if s == 0 {
            return false;
        }
        let mut i = s;
        while i > 0 {
            i -= 1;
            if level.idx[i] < n - s + i {
                level.idx[i] += 1;
                for j in i + 1..s {
                    level.idx[j] = level.idx[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }

    /// Depth-first step: opens level `l` (or advances it when `advancing`),
    /// descending on success and backtracking on failure. Returns false when
    /// the enumeration is exhausted.
    fn search(&mut self, mut l: usize, mut advancing: bool) -> bool {
        loop {
            let ok = if advancing {
                self.levels.truncate(l + 1);
                self.advance_level(l)
            } else {
                self.open_level(l)
            };
            if ok {
                if l + 1 == self.sizes.len() {
                    return true;
                }
                l += 1;
                advancing = false;
            } else {
                if l == 0 {
                    return false;
                }
                l -= 1;
                advancing = true;
            }
        }
    }

    fn current(&self) -> SubsetCombination {
        SubsetCombination {
            subsets: self.levels.iter().map(|lv| Self::subset_of(lv).collect()).collect(),
        }
    }
}

impl Iterator for PartitionIter {
    type Item = SubsetCombination;

    fn next(&mut self) -> Option<SubsetCombination> {
        if self.done {
            return None;
        }
        let ok = if self.sizes.is_empty() {
            // A single empty family.
            !std::mem::replace(&mut self.started, true)
        } else if !self.started {
            self.started = true;
            self.search(0, false)
        } else {
            self.search(self.sizes.len() - 1, true)
        };
        if ok {
            self.yielded += 1;
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

/// Every canonical family of disjoint subsets of `group_ids` with sizes `sv`.
pub fn enumerate_partitions(group_ids: &[usize], sv: &SizeVector) -> Result<Vec<SubsetCombination>> {
    Ok(PartitionIter::new(group_ids, sv)?.collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(s: &[usize]) -> SizeVector {
        SizeVector::new(s.to_vec()).unwrap()
    }

    #[test]
    fn size_vectors_seven_three() {
        let all = enumerate_size_vectors(7, 3, SelectionMode::All).unwrap();
        let got: Vec<String> = all.iter().map(ToString::to_string).collect();
        assert_eq!(
            got,
            [
                "[1,1,1]", "[2,1,1]", "[2,2,1]", "[2,2,2]", "[3,1,1]", "[3,2,1]", "[3,2,2]", "[3,3,1]", "[4,1,1]",
                "[4,2,1]", "[5,1,1]"
            ]
        );
        let ae = enumerate_size_vectors(7, 3, SelectionMode::AlmostEqual).unwrap();
        assert_eq!(ae.len(), 5);
        assert_eq!(ae.last().unwrap(), &sv(&[3, 2, 2]));
        assert_eq!(enumerate_size_vectors(7, 3, SelectionMode::Equal).unwrap().len(), 2);
        assert_eq!(
            enumerate_size_vectors(3, 3, SelectionMode::Equal).unwrap(),
            vec![sv(&[1, 1, 1])]
        );
        assert_eq!(
            enumerate_size_vectors(7, 3, SelectionMode::Fixed(2)).unwrap(),
            vec![sv(&[2, 2, 2])]
        );
        assert!(enumerate_size_vectors(7, 3, SelectionMode::Fixed(3))
            .unwrap()
            .is_empty());
        assert!(enumerate_size_vectors(2, 3, SelectionMode::All).is_err());
    }

    #[test]
    fn counts_seven_three() {
        assert_eq!(paper_count(7, 3, SelectionMode::All).unwrap(), 1841);
        // The [3,2,2] term is 35 * 6 * 1 / 2 = 105, as in the `all` total.
        assert_eq!(paper_count(7, 3, SelectionMode::AlmostEqual).unwrap(), 910);
        let ae: Vec<u128> = paper_count_by_q(7, 3, SelectionMode::AlmostEqual)
            .unwrap()
            .into_values()
            .collect();
        assert_eq!(ae, vec![70, 210, 315, 210, 105]);
        assert_eq!(paper_count(7, 3, SelectionMode::Equal).unwrap(), 280);
        let by_q: Vec<u128> = paper_count_by_q(7, 3, SelectionMode::All)
            .unwrap()
            .into_values()
            .collect();
        assert_eq!(by_q, vec![70, 210, 525, 735, 301]);
        assert_eq!(exact_count(7, 3, SelectionMode::All).unwrap(), 1701);
        assert_eq!(exact_count(7, 3, SelectionMode::Equal).unwrap(), 140);
        assert_eq!(exact_count(3, 3, SelectionMode::All).unwrap(), 1);
    }

    #[test]
    fn search_space_and_bound() {
        assert_eq!(allocation_search_space(7, 3, SelectionMode::All).unwrap(), 11046);
        // [1,1,1] is the only vector at G = C = 3: 3*2*1 / 3 = 2 combinations.
        assert_eq!(paper_count(3, 3, SelectionMode::All).unwrap(), 2);
        assert_eq!(allocation_search_space(3, 3, SelectionMode::All).unwrap(), 12);
        assert_eq!(
            allocation_search_space(6, 1, SelectionMode::All).unwrap(),
            paper_count(6, 1, SelectionMode::All).unwrap()
        );
        assert_eq!(
            complexity_lower_bound(6, 1).unwrap(),
            paper_count(6, 1, SelectionMode::Equal).unwrap()
        );
        assert_eq!(
            complexity_lower_bound(7, 3).unwrap(),
            allocation_search_space(7, 3, SelectionMode::Equal).unwrap()
        );
    }

    #[test]
    fn partitions_small() {
        let fams = enumerate_partitions(&[0, 1, 2, 3], &sv(&[2, 2])).unwrap();
        let got: Vec<Vec<Vec<usize>>> = fams.into_iter().map(|f| f.subsets).collect();
        assert_eq!(
            got,
            vec![
                vec![vec![0, 1], vec![2, 3]],
                vec![vec![0, 2], vec![1, 3]],
                vec![vec![0, 3], vec![1, 2]],
            ]
        );
        let ids: Vec<usize> = (0..7).collect();
        assert_eq!(enumerate_partitions(&ids, &sv(&[1, 1, 1])).unwrap().len(), 35);
        assert!(matches!(
            enumerate_partitions(&[0, 1], &sv(&[2, 1])),
            Err(Error::PoolTooSmall { .. })
        ));
    }

    #[test]
    fn partitions_are_sorted_canonical_and_counted() {
        let ids: Vec<usize> = (0..7).collect();
        for v in enumerate_size_vectors(7, 3, SelectionMode::All).unwrap() {
            let fams = enumerate_partitions(&ids, &v).unwrap();
            assert_eq!(fams.len() as u128, exact_count_for(7, &v).unwrap(), "{v}");
            assert!(fams.iter().all(|f| f.is_canonical() && f.is_disjoint()));
            assert!(fams.windows(2).all(|w| w[0] < w[1]), "{v}");
        }
    }

    #[test]
    fn iterator_resume_and_shards() {
        let ids: Vec<usize> = (0..6).collect();
        let v = sv(&[2, 1, 1]);
        let full = enumerate_partitions(&ids, &v).unwrap();
        let mut it = PartitionIter::new(&ids, &v).unwrap();
        let head: Vec<_> = it.by_ref().take(7).collect();
        assert_eq!(it.position(), 7);
        let saved = it.clone();
        let tail: Vec<_> = it.collect();
        let tail2: Vec<_> = saved.collect();
        assert_eq!(tail, tail2);
        let rejoined: Vec<_> = head.into_iter().chain(tail).collect();
        assert_eq!(rejoined, full);

        let mut merged: Vec<_> = (0..3)
            .flat_map(|i| PartitionIter::new(&ids, &v).unwrap().shard(i, 3))
            .collect();
        merged.sort();
        assert_eq!(merged, full);
    }

    #[test]
    fn mode_parsing_round_trip() {
        for m in [
            SelectionMode::All,
            SelectionMode::AlmostEqual,
            SelectionMode::Equal,
            SelectionMode::Fixed(4),
        ] {
            assert_eq!(m.to_string().parse::<SelectionMode>().unwrap(), m);
        }
        assert!("fixed(0)".parse::<SelectionMode>().is_err());
        assert!("some".parse::<SelectionMode>().is_err());
    }
}
