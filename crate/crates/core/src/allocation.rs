//! Channel allocation: subset selection plus channel assignment.
//!
//! Selection walks every size vector admitted by a [`SelectionMode`] and every
//! canonical family of disjoint subsets with those sizes. Assignment maps the
//! subsets of one family onto channels, either by exhaustive search or by the
//! three-stage MUSCA heuristic.
//!
//! Throughput separates over channels once powers are fixed per channel, so
//! both paths memoise the value of "this group set on channel `k`" and add the
//! per-channel values in channel order. Candidates reached by different paths
//! therefore compare exactly.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::combinatorics::{enumerate_size_vectors, PartitionIter, SelectionMode, SizeVector};
use crate::geometry::NetworkScenario;
use crate::power::{assign_channel_powers, assign_powers, BoundsTable, PLowForm, PowerPolicy};
use crate::radio::{channel_throughput, path_gain, sum_throughput, FadingRealization, PowerVector, ThroughputMode};
use crate::scalar::Scalar;
use crate::{Error, Result};

/// Groups carried by each channel.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Assignment {
    /// `channel_to_groups[k]`: ascending group indices sharing channel `k`.
    pub channel_to_groups: Vec<Vec<usize>>,
    /// Channels no group may share (MUSCA stage 1).
    pub cu_only_channels: BTreeSet<usize>,
    /// Subsets that did not receive a channel.
    pub unassigned_subsets: Vec<Vec<usize>>,
}

impl Assignment {
    /// Every channel left to its CU.
    pub fn empty(channels: usize) -> Self {
        Assignment {
            channel_to_groups: vec![Vec::new(); channels],
            ..Default::default()
        }
    }

    pub fn assigned_groups(&self) -> impl Iterator<Item = usize> + '_ {
        self.channel_to_groups.iter().flatten().copied()
    }

    pub fn channel_of(&self, group: usize) -> Option<usize> {
        self.channel_to_groups.iter().position(|m| m.contains(&group))
    }

    /// Checks disjointness, group indices and that CU-only channels are empty.
    pub fn validate<T: Scalar>(&self, scenario: &NetworkScenario<T>) -> Result<()> {
        if self.channel_to_groups.len() != scenario.num_channels() {
            return Err(Error::param(
                "assignment",
                format!(
                    "{} channel slots for {} channels",
                    self.channel_to_groups.len(),
                    scenario.num_channels()
                ),
            ));
        }
        let mut seen = BTreeSet::new();
        for g in self.assigned_groups() {
            if g >= scenario.num_groups() || !scenario.groups[g].is_active() {
                return Err(Error::InactiveGroup(g));
            }
            if !seen.insert(g) {
                return Err(Error::param("assignment", format!("group {g} is on two channels")));
            }
        }
        for &k in &self.cu_only_channels {
            if self.channel_to_groups.get(k).is_some_and(|m| !m.is_empty()) {
                return Err(Error::param(
                    "assignment",
                    format!("CU-only channel {k} carries groups"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AssignmentMethod {
    #[default]
    Exhaustive,
    Musca,
}

impl fmt::Display for AssignmentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AssignmentMethod::Exhaustive => "exhaustive",
            AssignmentMethod::Musca => "musca",
        })
    }
}

/// Size limits above which combinatorial searches refuse to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchGuard {
    pub max_groups: usize,
    pub max_channels: usize,
    pub allow_large_search: bool,
}

impl Default for SearchGuard {
    fn default() -> Self {
        SearchGuard {
            max_groups: 10,
            max_channels: 5,
            allow_large_search: false,
        }
    }
}

impl SearchGuard {
    pub fn check(&self, groups: usize, channels: usize) -> Result<()> {
        if self.allow_large_search || (groups <= self.max_groups && channels <= self.max_channels) {
            Ok(())
        } else {
            Err(Error::SearchGuard {
                groups,
                channels,
                max_groups: self.max_groups,
                max_channels: self.max_channels,
            })
        }
    }
}

/// One allocation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeConfig {
    pub selection_mode: SelectionMode,
    pub assignment_method: AssignmentMethod,
    pub power_policy: PowerPolicy,
    pub throughput_mode: ThroughputMode,
    pub p_low_form: PLowForm,
    pub search_guard: SearchGuard,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig::new(SelectionMode::All, AssignmentMethod::Exhaustive)
    }
}

impl SchemeConfig {
    pub fn new(selection_mode: SelectionMode, assignment_method: AssignmentMethod) -> Self {
        SchemeConfig {
            selection_mode,
            assignment_method,
            power_policy: PowerPolicy::default(),
            throughput_mode: ThroughputMode::default(),
            p_low_form: PLowForm::default(),
            search_guard: SearchGuard::default(),
        }
    }

    pub fn mode(&self) -> SelectionMode {
        self.selection_mode
    }
}

impl fmt::Display for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.mode(), self.assignment_method)
    }
}

impl std::str::FromStr for SchemeConfig {
    type Err = Error;

    /// `<mode>[:<method>]`, e.g. `all`, `almost_equal:musca`, `fixed(2):musca`.
    fn from_str(s: &str) -> Result<Self> {
        let (mode, method) = match s.trim().split_once(':') {
            Some((m, a)) => (m, Some(a.trim())),
            None => (s.trim(), None),
        };
        let method = match method {
            None | Some("exhaustive") => AssignmentMethod::Exhaustive,
            Some("musca") => AssignmentMethod::Musca,
            Some(other) => {
                return Err(Error::param("scheme", format!("unknown assignment method `{other}`")));
            }
        };
        Ok(SchemeConfig::new(mode.parse()?, method))
    }
}

/// Result of [`allocate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation<T> {
    pub assignment: Assignment,
    pub powers: PowerVector<T>,
    pub throughput: T,
    /// Size vector of the winning subset family; `None` for the CU-only
    /// fallback.
    pub size_vector: Option<SizeVector>,
    /// No group transmits in the returned allocation.
    pub cu_only: bool,
    /// Number of candidate assignments compared.
    pub candidates: u64,
}

/// Memoised per-channel throughput.
struct ChannelValues<'a, T> {
    scenario: &'a NetworkScenario<T>,
    bounds: &'a BoundsTable<T>,
    fading: &'a FadingRealization<T>,
    policy: PowerPolicy,
    mode: ThroughputMode,
    cache: HashMap<(usize, Vec<usize>), T>,
}

impl<'a, T: Scalar> ChannelValues<'a, T> {
    fn new(
        scenario: &'a NetworkScenario<T>,
        bounds: &'a BoundsTable<T>,
        fading: &'a FadingRealization<T>,
        policy: PowerPolicy,
        mode: ThroughputMode,
    ) -> Self {
        ChannelValues {
            scenario,
            bounds,
            fading,
            policy,
            mode,
            cache: HashMap::new(),
        }
    }

    /// Throughput of channel `k` carrying `members` (ascending).
    fn value(&mut self, k: usize, members: &[usize]) -> Result<T> {
        if let Some(&v) = self.cache.get(&(k, members.to_vec())) {
            return Ok(v);
        }
        let s = self.scenario;
        let mut powers = PowerVector {
            cu_w: vec![s.params.max_cu_power_w(); s.num_channels()],
            mg_w: vec![T::zero(); s.num_groups()],
            muted: vec![false; s.num_groups()],
        };
        assign_channel_powers(s, self.bounds, self.fading, members, k, self.policy, &mut powers)?;
        let v = channel_throughput(s, self.fading, &powers, members, k, self.mode)?;
        self.cache.insert((k, members.to_vec()), v);
        Ok(v)
    }

    /// Sum over channels, in channel order.
    fn total(&mut self, assignment: &Assignment) -> Result<T> {
        let mut acc = T::zero();
        for (k, members) in assignment.channel_to_groups.iter().enumerate() {
            acc = acc + self.value(k, members)?;
        }
        Ok(acc)
    }
}

fn sorted(subset: &[usize]) -> Vec<usize> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    s
}

fn check_subsets<T: Scalar>(scenario: &NetworkScenario<T>, subsets: &[Vec<usize>]) -> Result<()> {
    if subsets.len() > scenario.num_channels() {
        return Err(Error::param(
            "subsets",
            format!("{} subsets for {} channels", subsets.len(), scenario.num_channels()),
        ));
    }
    let mut seen = BTreeSet::new();
    for &g in subsets.iter().flatten() {
        if g >= scenario.num_groups() {
            return Err(Error::InactiveGroup(g));
        }
        if !seen.insert(g) {
            return Err(Error::param("subsets", format!("group {g} appears twice")));
        }
    }
    Ok(())
}

/// MUSCA stage 1: channel `k` is usable iff some group of `groups`, alone on
/// `k` at `P_G` with unit fading, leaves the CU's SIR at or above its
/// threshold.
pub fn musca_available_channels<T: Scalar>(scenario: &NetworkScenario<T>, groups: &[usize]) -> Vec<bool> {
    let p = &scenario.params;
    let alpha = p.path_loss_exponent;
    let (p_c, p_g, th) = (p.max_cu_power_w(), p.max_mg_power_w(), p.cu_sir_threshold());
    scenario
        .cus
        .iter()
        .map(|cu| {
            let signal = p_c * path_gain(cu.dist_to_bs_m, alpha);
            groups.iter().any(|&g| {
                let interference = p_g * path_gain(scenario.groups[g].tx_position.norm(), alpha);
                signal >= th * interference
            })
        })
        .collect()
}

/// MUSCA stage 2: `I[k][s]`, the worst (over members and their receivers) sum
/// interference that subset `s` would see on channel `k`, with every
/// transmitter at maximum power and unit fading.
pub fn musca_interference_matrix<T: Scalar>(scenario: &NetworkScenario<T>, subsets: &[Vec<usize>]) -> Vec<Vec<T>> {
    let p = &scenario.params;
    let alpha = p.path_loss_exponent;
    let (p_c, p_g) = (p.max_cu_power_w(), p.max_mg_power_w());
    scenario
        .cus
        .iter()
        .map(|cu| {
            subsets
                .iter()
                .map(|subset| {
                    let mut worst = T::zero();
                    for &g in subset {
                        for rx in &scenario.groups[g].receivers {
                            let mut i = p_c * path_gain(cu.position.distance(rx), alpha);
                            for &other in subset {
                                if other != g {
                                    let tx = scenario.groups[other].tx_position;
                                    i = i + p_g * path_gain(tx.distance(rx), alpha);
                                }
                            }
                            worst = worst.max(i);
                        }
                    }
                    worst
                })
                .collect()
        })
        .collect()
}

/// MUSCA stage 3: repeatedly takes the smallest entry of `matrix[k][s]` among
/// available channels and unassigned subsets (ties: lower channel, then lower
/// subset). Returns the channel of each subset.
pub fn musca_greedy_assignment<T: Scalar>(matrix: &[Vec<T>], available: &[bool]) -> Vec<Option<usize>> {
    let n_subsets = matrix.first().map_or(0, Vec::len);
    let mut entries: Vec<(T, usize, usize)> = matrix
        .iter()
        .enumerate()
        .filter(|(k, _)| available.get(*k).copied().unwrap_or(false))
        .flat_map(|(k, row)| row.iter().enumerate().map(move |(s, &v)| (v, k, s)))
        .collect();
    entries.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let mut subset_channel = vec![None; n_subsets];
    let mut channel_taken = vec![false; matrix.len()];
    for (_, k, s) in entries {
        if subset_channel[s].is_none() && !channel_taken[k] {
            subset_channel[s] = Some(k);
            channel_taken[k] = true;
        }
    }
    subset_channel
}

/// MUSCA channel assignment of `subsets` (at most `C` of them).
pub fn musca_assign<T: Scalar>(scenario: &NetworkScenario<T>, subsets: &[Vec<usize>]) -> Result<Assignment> {
    check_subsets(scenario, subsets)?;
    let groups: Vec<usize> = subsets.iter().flatten().copied().collect();
    let available = musca_available_channels(scenario, &groups);
    let matrix = musca_interference_matrix(scenario, subsets);
    let placement = musca_greedy_assignment(&matrix, &available);
    let mut assignment = Assignment::empty(scenario.num_channels());
    assignment.cu_only_channels = (0..scenario.num_channels()).filter(|&k| !available[k]).collect();
    for (subset, slot) in subsets.iter().zip(placement) {
        match slot {
            Some(k) => assignment.channel_to_groups[k] = sorted(subset),
            None => assignment.unassigned_subsets.push(sorted(subset)),
        }
    }
    Ok(assignment)
}

/// Injective placements of `m` subsets onto `c` channels, each as the channel
/// of every subset (`None` = dropped). Complete placements come first, in
/// lexicographic permutation order; then placements dropping one subset, two,
/// and so on, each group ordered by dropped set and then lexicographically.
pub fn placements(m: usize, c: usize) -> Vec<Vec<Option<usize>>> {
    fn perms(
        kept: &[usize],
        c: usize,
        slot: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<Option<usize>>>,
    ) {
        let Some((&first, rest)) = kept.split_first() else {
            out.push(slot.clone());
            return;
        };
        for k in 0..c {
            if !used[k] {
                used[k] = true;
                slot[first] = Some(k);
                perms(rest, c, slot, used, out);
                slot[first] = None;
                used[k] = false;
            }
        }
    }
    fn combos(n: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            combos(n, r, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for dropped in m.saturating_sub(c)..=m {
        let mut drop_sets = Vec::new();
        combos(m, dropped, 0, &mut Vec::new(), &mut drop_sets);
        for ds in drop_sets {
            let kept: Vec<usize> = (0..m).filter(|s| !ds.contains(s)).collect();
            perms(&kept, c, &mut vec![None; m], &mut vec![false; c], &mut out);
        }
    }
    out
}

fn assignment_from_placement(channels: usize, subsets: &[Vec<usize>], placement: &[Option<usize>]) -> Assignment {
    let mut a = Assignment::empty(channels);
    for (subset, slot) in subsets.iter().zip(placement) {
        match slot {
            Some(k) => a.channel_to_groups[*k] = sorted(subset),
            None => a.unassigned_subsets.push(sorted(subset)),
        }
    }
    a
}

fn exhaustive_with<T: Scalar>(
    values: &mut ChannelValues<'_, T>,
    subsets: &[Vec<usize>],
    placements: &[Vec<Option<usize>>],
) -> Result<(Assignment, T)> {
    let c = values.scenario.num_channels();
    let sorted_subsets: Vec<Vec<usize>> = subsets.iter().map(|s| sorted(s)).collect();
    // table[k][s] for subsets, plus the empty channel value.
    let mut table = Vec::with_capacity(c);
    let mut empty = Vec::with_capacity(c);
    for k in 0..c {
        empty.push(values.value(k, &[])?);
        let row = sorted_subsets
            .iter()
            .map(|s| values.value(k, s))
            .collect::<Result<Vec<T>>>()?;
        table.push(row);
    }
    let mut best: Option<(T, usize)> = None;
    let mut on_channel = vec![None; c];
    for (i, placement) in placements.iter().enumerate() {
        on_channel.iter_mut().for_each(|x| *x = None);
        for (s, slot) in placement.iter().enumerate() {
            if let Some(k) = slot {
                on_channel[*k] = Some(s);
            }
        }
        let mut total = T::zero();
        for k in 0..c {
            total = total
                + match on_channel[k] {
                    Some(s) => table[k][s],
                    None => empty[k],
                };
        }
        if best.is_none_or(|(v, _)| total > v) {
            best = Some((total, i));
        }
    }
    let (v, i) = best.expect("at least one placement");
    Ok((assignment_from_placement(c, &sorted_subsets, &placements[i]), v))
}

/// Best placement of `subsets` onto channels by exhaustive search.
///
/// Besides the `C!` complete placements (subsets padded with empty slots when
/// there are fewer than `C`), placements that leave some subsets unassigned are
/// also searched, so every MUSCA output is among the candidates. Ties keep the
/// first candidate in [`placements`] order.
pub fn exhaustive_assign<T: Scalar>(
    scenario: &NetworkScenario<T>,
    subsets: &[Vec<usize>],
    fading: &FadingRealization<T>,
    scheme: &SchemeConfig,
) -> Result<(Assignment, T)> {
    scheme
        .search_guard
        .check(scenario.params.num_groups, scenario.num_channels())?;
    check_subsets(scenario, subsets)?;
    let bounds = BoundsTable::compute(scenario, scheme.p_low_form)?;
    let mut values = ChannelValues::new(scenario, &bounds, fading, scheme.power_policy, scheme.throughput_mode);
    let pl = placements(subsets.len(), scenario.num_channels());
    exhaustive_with(&mut values, subsets, &pl)
}

/// Sum throughput of `assignment` with powers from `policy`.
pub fn evaluate<T: Scalar>(
    scenario: &NetworkScenario<T>,
    assignment: &Assignment,
    policy: PowerPolicy,
    mode: ThroughputMode,
    fading: &FadingRealization<T>,
) -> Result<T> {
    let bounds = BoundsTable::compute(scenario, PLowForm::default())?;
    evaluate_with_bounds(scenario, assignment, &bounds, policy, mode, fading)
}

pub fn evaluate_with_bounds<T: Scalar>(
    scenario: &NetworkScenario<T>,
    assignment: &Assignment,
    bounds: &BoundsTable<T>,
    policy: PowerPolicy,
    mode: ThroughputMode,
    fading: &FadingRealization<T>,
) -> Result<T> {
    let powers = assign_powers(scenario, assignment, bounds, fading, policy)?;
    sum_throughput(scenario, fading, &powers, assignment, mode)
}

fn finish<T: Scalar>(
    scenario: &NetworkScenario<T>,
    bounds: &BoundsTable<T>,
    fading: &FadingRealization<T>,
    scheme: &SchemeConfig,
    assignment: Assignment,
    size_vector: Option<SizeVector>,
    candidates: u64,
) -> Result<Allocation<T>> {
    let powers = assign_powers(scenario, &assignment, bounds, fading, scheme.power_policy)?;
    let throughput = sum_throughput(scenario, fading, &powers, &assignment, scheme.throughput_mode)?;
    let cu_only = !assignment.assigned_groups().any(|g| !powers.muted[g]);
    Ok(Allocation {
        assignment,
        powers,
        throughput,
        size_vector,
        cu_only,
        candidates,
    })
}

/// Best allocation of `scenario` under `scheme`, evaluated on `fading`.
///
/// With fewer active groups than channels, families of `min(C, G)` subsets are
/// searched. When no family is admissible (e.g. `fixed(n)` with `nC > G`) or
/// there are no active groups, the CU-only allocation is returned with
/// `cu_only` set.
pub fn allocate<T: Scalar>(
    scenario: &NetworkScenario<T>,
    scheme: &SchemeConfig,
    fading: &FadingRealization<T>,
) -> Result<Allocation<T>> {
    let c = scenario.num_channels();
    scheme.search_guard.check(scenario.params.num_groups, c)?;
    let bounds = BoundsTable::compute(scenario, scheme.p_low_form)?;
    let g = scenario.num_groups();
    if g == 0 {
        return finish(scenario, &bounds, fading, scheme, Assignment::empty(c), None, 0);
    }
    let c_eff = c.min(g);
    let ids: Vec<usize> = (0..g).collect();
    let mut values = ChannelValues::new(scenario, &bounds, fading, scheme.power_policy, scheme.throughput_mode);
    let mut best: Option<(T, Assignment, SizeVector)> = None;
    let mut candidates = 0u64;
    for sv in enumerate_size_vectors(g, c_eff, scheme.mode())? {
        let pl = placements(sv.len(), c);
        for family in PartitionIter::new(&ids, &sv)? {
            let (assignment, v) = match scheme.assignment_method {
                AssignmentMethod::Exhaustive => {
                    candidates += pl.len() as u64;
                    exhaustive_with(&mut values, &family.subsets, &pl)?
                }
                AssignmentMethod::Musca => {
                    candidates += 1;
                    let a = musca_assign(scenario, &family.subsets)?;
                    let v = values.total(&a)?;
                    (a, v)
                }
            };
            if best.as_ref().is_none_or(|(bv, _, _)| v > *bv) {
                best = Some((v, assignment, sv.clone()));
            }
        }
    }
    match best {
        Some((v, assignment, sv)) => {
            let out = finish(scenario, &bounds, fading, scheme, assignment, Some(sv), candidates)?;
            debug_assert!(out.throughput == v, "memoised and direct evaluation disagree");
            Ok(out)
        }
        None => {
            let mut out = finish(
                scenario,
                &bounds,
                fading,
                scheme,
                Assignment::empty(c),
                None,
                candidates,
            )?;
            out.cu_only = true;
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_scenario, SimParams};

    #[test]
    fn stage3_hand_cases() {
        // Matrix is indexed [channel][subset].
        let m = vec![vec![1.0, 5.0], vec![4.0, 2.0]];
        assert_eq!(musca_greedy_assignment(&m, &[true, true]), vec![Some(0), Some(1)]);
        // Both subsets prefer channel 0; subset 0 has the smaller value.
        let m = vec![vec![1.0, 1.5], vec![2.0, 9.0]];
        assert_eq!(musca_greedy_assignment(&m, &[true, true]), vec![Some(0), Some(1)]);
        // Unavailable channel is never used.
        assert_eq!(musca_greedy_assignment(&m, &[false, true]), vec![Some(1), None]);
        // Ties go to the lower channel, then the lower subset.
        let m = vec![vec![3.0, 3.0], vec![3.0, 3.0]];
        assert_eq!(musca_greedy_assignment(&m, &[true, true]), vec![Some(0), Some(1)]);
    }

    #[test]
    fn placement_counts_and_order() {
        let p = placements(3, 3);
        assert_eq!(p.len(), 34);
        assert_eq!(p[0], vec![Some(0), Some(1), Some(2)]);
        assert_eq!(p[5], vec![Some(2), Some(1), Some(0)]);
        assert_eq!(*p.last().unwrap(), vec![None, None, None]);
        assert_eq!(placements(1, 1), vec![vec![Some(0)], vec![None]]);
        // Two subsets on three channels: 6 complete, 3 + 3 with one dropped, 1 empty.
        assert_eq!(placements(2, 3).len(), 13);
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in [
            "all:exhaustive",
            "almost_equal:musca",
            "equal:exhaustive",
            "fixed(2):musca",
        ] {
            assert_eq!(s.parse::<SchemeConfig>().unwrap().to_string(), s);
        }
        assert_eq!("equal".parse::<SchemeConfig>().unwrap().to_string(), "equal:exhaustive");
        assert!("all:greedy".parse::<SchemeConfig>().is_err());
    }

    #[test]
    fn guard_refuses_large_searches() {
        let params = SimParams::<f64> {
            num_groups: 11,
            ..Default::default()
        };
        let scenario = generate_scenario(&params, 0).unwrap();
        let fading = FadingRealization::unit(&scenario);
        let err = allocate(&scenario, &SchemeConfig::default(), &fading).unwrap_err();
        assert!(err.to_string().contains("allow_large_search"));
    }

    #[test]
    fn stage2_grows_with_subset() {
        let scenario = generate_scenario(&SimParams::<f64>::default(), 3).unwrap();
        let g = scenario.num_groups();
        assert!(g >= 2);
        let m1 = musca_interference_matrix(&scenario, &[vec![0]]);
        let m2 = musca_interference_matrix(&scenario, &[vec![0, 1]]);
        for k in 0..scenario.num_channels() {
            assert!(m1[k][0] >= 0.0);
            assert!(m2[k][0] >= m1[k][0]);
        }
    }
}
