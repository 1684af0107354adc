use d2dcast::allocation::*;
use d2dcast::combinatorics::{enumerate_partitions, SelectionMode, SizeVector};
use d2dcast::harness::draw_scenario;
use d2dcast::power::PowerPolicy;
use d2dcast::radio::ThroughputMode;
use d2dcast::{seed, SimParams};
use proptest::prelude::*;

fn small_params(groups: usize) -> SimParams {
    SimParams {
        num_groups: groups,
        // Sparse MG density keeps the power bounds loose, so groups do
        // transmit and the comparisons are not all between CU-only values.
        group_density_per_channel: 1e-8,
        cu_density_per_channel: 1e-7,
        ..SimParams::default()
    }
}

fn scheme(s: &str) -> SchemeConfig {
    s.parse().unwrap()
}

/// Every injective map of subsets to channels (or to nothing), scored with
/// the public evaluator.
fn brute_force_best(sc: &d2dcast::NetworkScenario, f: &d2dcast::FadingRealization, subsets: &[Vec<usize>]) -> f64 {
    let c = sc.num_channels();
    let m = subsets.len();
    let mut best = f64::NEG_INFINITY;
    let total = (c + 1).pow(m as u32);
    'codes: for code in 0..total {
        let mut a = Assignment::empty(c);
        let mut x = code;
        for s in subsets {
            let slot = x % (c + 1);
            x /= c + 1;
            if slot < c {
                if !a.channel_to_groups[slot].is_empty() {
                    continue 'codes;
                }
                let mut sorted = s.clone();
                sorted.sort_unstable();
                a.channel_to_groups[slot] = sorted;
            }
        }
        let v = evaluate(sc, &a, PowerPolicy::MaxFeasible, ThroughputMode::Instantaneous, f).unwrap();
        best = best.max(v);
    }
    best
}

#[test]
fn exhaustive_assign_matches_brute_force() {
    let params = small_params(5);
    let mut checked = 0;
    for j in 0..25u64 {
        let (sc, f) = draw_scenario(&params, seed::scenario_seed(5, 0, j)).unwrap();
        if sc.num_groups() < 3 {
            continue;
        }
        let ids: Vec<usize> = (0..sc.num_groups()).collect();
        let sv = SizeVector::new(vec![2, 1]).unwrap();
        for fam in enumerate_partitions(&ids, &sv).unwrap().iter().take(4) {
            let (a, v) = exhaustive_assign(&sc, &fam.subsets, &f, &SchemeConfig::default()).unwrap();
            a.validate(&sc).unwrap();
            let want = brute_force_best(&sc, &f, &fam.subsets);
            assert!((v - want).abs() < 1e-9, "scenario {j}: {v} vs {want}");
            checked += 1;
        }
    }
    assert!(checked > 10);
}

#[test]
fn musca_output_is_valid_and_never_beats_exhaustive() {
    let params = small_params(6);
    for j in 0..20u64 {
        let (sc, f) = draw_scenario(&params, seed::scenario_seed(6, 0, j)).unwrap();
        if sc.num_groups() < 3 {
            continue;
        }
        let ids: Vec<usize> = (0..sc.num_groups()).collect();
        let sv = SizeVector::new(vec![1, 1, 1]).unwrap();
        for fam in enumerate_partitions(&ids, &sv).unwrap().iter().take(5) {
            let a = musca_assign(&sc, &fam.subsets).unwrap();
            a.validate(&sc).unwrap();
            let available = musca_available_channels(&sc, &fam.subsets.concat());
            for (k, members) in a.channel_to_groups.iter().enumerate() {
                assert!(members.is_empty() || available[k]);
            }
            let placed = a.channel_to_groups.iter().filter(|m| !m.is_empty()).count();
            assert_eq!(placed + a.unassigned_subsets.len(), fam.subsets.len());
            let v_musca = evaluate(&sc, &a, PowerPolicy::MaxFeasible, ThroughputMode::Instantaneous, &f).unwrap();
            let (_, v_ex) = exhaustive_assign(&sc, &fam.subsets, &f, &SchemeConfig::default()).unwrap();
            assert!(v_ex >= v_musca, "scenario {j}: {v_ex} < {v_musca}");
        }
    }
}

#[test]
fn scheme_dominance_per_scenario() {
    let params = small_params(7);
    let schemes = [
        "all",
        "almost_equal",
        "equal",
        "fixed(2)",
        "all:musca",
        "fixed(2):musca",
    ]
    .map(scheme);
    for j in 0..15u64 {
        let (sc, f) = draw_scenario(&params, seed::scenario_seed(7, 0, j)).unwrap();
        if sc.degenerate {
            continue;
        }
        let v: Vec<f64> = schemes
            .iter()
            .map(|s| allocate(&sc, s, &f).unwrap().throughput)
            .collect();
        assert!(v[0] >= v[1] && v[1] >= v[2] && v[2] >= v[3], "scenario {j}: {v:?}");
        assert!(v[0] >= v[4] && v[3] >= v[5], "scenario {j}: {v:?}");
    }
}

#[test]
fn grid_policy_never_loses_to_max_feasible() {
    let params = small_params(4);
    let max_feasible = SchemeConfig::default();
    let grid = SchemeConfig {
        power_policy: PowerPolicy::Grid(8),
        ..SchemeConfig::default()
    };
    for j in 0..10u64 {
        let (sc, f) = draw_scenario(&params, seed::scenario_seed(8, 0, j)).unwrap();
        if sc.degenerate {
            continue;
        }
        let a = allocate(&sc, &max_feasible, &f).unwrap();
        let b = allocate(&sc, &grid, &f).unwrap();
        assert!(
            b.throughput >= a.throughput,
            "scenario {j}: {} < {}",
            b.throughput,
            a.throughput
        );
    }
}

#[test]
fn cu_only_fallback_when_no_family_fits() {
    let params = small_params(5);
    let (sc, f) = draw_scenario(&params, seed::scenario_seed(9, 0, 0)).unwrap();
    let out = allocate(&sc, &scheme("fixed(3)"), &f).unwrap();
    assert!(out.cu_only);
    assert_eq!(out.size_vector, None);
    assert_eq!(out.assignment.assigned_groups().count(), 0);
}

#[test]
fn allocation_respects_power_bounds() {
    let params = small_params(6);
    for j in 0..10u64 {
        let (sc, f) = draw_scenario(&params, seed::scenario_seed(10, 0, j)).unwrap();
        if sc.degenerate {
            continue;
        }
        let out = allocate(&sc, &SchemeConfig::default(), &f).unwrap();
        let bounds = d2dcast::power::BoundsTable::compute(&sc, Default::default()).unwrap();
        for (k, members) in out.assignment.channel_to_groups.iter().enumerate() {
            for &g in members {
                let b = bounds.get(g, k);
                if out.powers.muted[g] {
                    assert!(!b.feasible);
                } else {
                    assert!(out.powers.mg_w[g] >= b.p_inf_w && out.powers.mg_w[g] <= b.p_sup_w);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn musca_greedy_is_injective_and_uses_available_channels(
        vals in prop::collection::vec(prop::collection::vec(0.0f64..10.0, 3), 4),
        avail in prop::collection::vec(any::<bool>(), 4),
    ) {
        let out = musca_greedy_assignment(&vals, &avail);
        prop_assert_eq!(out.len(), 3);
        let used: Vec<usize> = out.iter().flatten().copied().collect();
        let mut dedup = used.clone();
        dedup.sort_unstable();
        dedup.dedup();
        prop_assert_eq!(dedup.len(), used.len());
        prop_assert!(used.iter().all(|&k| avail[k]));
        // As many subsets are placed as channels and subsets allow.
        let n_avail = avail.iter().filter(|&&a| a).count();
        prop_assert_eq!(used.len(), n_avail.min(3));
    }

    #[test]
    fn dominance_holds_for_random_seeds(master in any::<u64>()) {
        let params = SimParams { master_seed: master, ..small_params(5) };
        let (sc, f) = draw_scenario(&params, seed::scenario_seed(master, 0, 0)).unwrap();
        prop_assume!(!sc.degenerate);
        let all = allocate(&sc, &scheme("all"), &f).unwrap().throughput;
        let musca = allocate(&sc, &scheme("all:musca"), &f).unwrap().throughput;
        let equal = allocate(&sc, &scheme("equal"), &f).unwrap().throughput;
        prop_assert!(all >= musca && all >= equal);
    }
}

#[test]
fn selection_modes_exposed_by_scheme_strings() {
    assert_eq!(scheme("almost_equal:musca").selection_mode, SelectionMode::AlmostEqual);
    assert_eq!(scheme("fixed(2)").assignment_method, AssignmentMethod::Exhaustive);
}
