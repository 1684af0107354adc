use d2dcast::allocation::Assignment;
use d2dcast::geometry::generate_scenario;
use d2dcast::radio::*;
use d2dcast::seed;
use d2dcast::SimParams;

fn d4(a: &d2dcast::Point, b: &d2dcast::Point) -> f64 {
    let d = a.distance(b).max(1.0);
    d.powi(-4)
}

/// Sum throughput recomputed from raw positions, fades and powers.
fn brute_force(
    sc: &d2dcast::NetworkScenario,
    f: &d2dcast::FadingRealization,
    pw: &d2dcast::PowerVector,
    a: &Assignment,
) -> f64 {
    let p = &sc.params;
    let cap = 1e6;
    let mut total = 0.0;
    let bs = d2dcast::Point::new(0.0, 0.0);
    for k in 0..sc.cus.len() {
        let members = &a.channel_to_groups[k];
        let cu = &sc.cus[k];
        let signal = pw.cu_w[k] * f.gain(k, Tx::Cu(k), Rx::Bs) * d4(&cu.position, &bs);
        let interference: f64 = members
            .iter()
            .map(|&g| pw.mg_w[g] * f.gain(k, Tx::Mg(g), Rx::Bs) * d4(&sc.groups[g].tx_position, &bs))
            .sum();
        let sir = if interference > 0.0 { signal / interference } else { cap };
        if sir >= p.cu_sir_threshold() {
            total += (1.0 + sir).log2();
        }
        for &g in members {
            let grp = &sc.groups[g];
            let mut worst = f64::INFINITY;
            for (r, rx) in grp.receivers.iter().enumerate() {
                let who = Rx::Member { group: g, index: r };
                let s = pw.mg_w[g] * f.gain(k, Tx::Mg(g), who) * d4(&grp.tx_position, rx);
                let mut i = pw.cu_w[k] * f.gain(k, Tx::Cu(k), who) * d4(&cu.position, rx);
                for &o in members.iter().filter(|&&o| o != g) {
                    i += pw.mg_w[o] * f.gain(k, Tx::Mg(o), who) * d4(&sc.groups[o].tx_position, rx);
                }
                worst = worst.min(if i > 0.0 { s / i } else { cap });
            }
            if worst >= p.mg_sir_threshold() {
                total += (1.0 + worst).log2();
            }
        }
    }
    total
}

#[test]
fn sum_throughput_matches_brute_force_on_full_instances() {
    let params = SimParams {
        receiver_density_per_m2: 4e-5,
        ..SimParams::default()
    };
    let mut checked = 0;
    for i in 0..40 {
        let sc = generate_scenario(&params, i).unwrap();
        if sc.num_groups() < 3 {
            continue;
        }
        let f = FadingRealization::draw(&sc, &mut seed::rng(i));
        let mut pw = PowerVector::uniform(3, sc.num_groups(), 1.0, 0.0);
        let mut a = Assignment::empty(3);
        for g in 0..sc.num_groups() {
            a.channel_to_groups[g % 3].push(g);
            pw.mg_w[g] = 10f64.powi(-(g as i32 % 4));
        }
        let got = sum_throughput(&sc, &f, &pw, &a, ThroughputMode::Instantaneous).unwrap();
        let want = brute_force(&sc, &f, &pw, &a);
        assert!(
            (got - want).abs() <= 1e-9 * want.max(1.0),
            "scenario {i}: {got} vs {want}"
        );
        checked += 1;
    }
    assert!(checked > 10);
}

#[test]
fn relabelling_channels_leaves_throughput_unchanged() {
    let params = SimParams::default();
    let sc = generate_scenario(&params, 3).unwrap();
    let f = FadingRealization::unit(&sc);
    let pw = PowerVector::uniform(3, sc.num_groups(), 1.0, 0.01);
    let mut a = Assignment::empty(3);
    for g in 0..sc.num_groups() {
        a.channel_to_groups[g % 3].push(g);
    }
    let v = sum_throughput(&sc, &f, &pw, &a, ThroughputMode::Instantaneous).unwrap();
    // Permute CUs together with their channel contents.
    let mut sc2 = sc.clone();
    sc2.cus.rotate_left(1);
    for (k, cu) in sc2.cus.iter_mut().enumerate() {
        cu.channel = k;
        cu.id = k;
    }
    let mut a2 = a.clone();
    a2.channel_to_groups.rotate_left(1);
    let v2 = sum_throughput(
        &sc2,
        &FadingRealization::unit(&sc2),
        &pw,
        &a2,
        ThroughputMode::Instantaneous,
    )
    .unwrap();
    assert!((v - v2).abs() < 1e-9, "{v} {v2}");
}

#[test]
fn adding_an_interferer_never_raises_any_sir() {
    let params = SimParams {
        receiver_density_per_m2: 4e-5,
        ..SimParams::default()
    };
    for i in 0..20 {
        let sc = generate_scenario(&params, 100 + i).unwrap();
        if sc.num_groups() < 2 {
            continue;
        }
        let f = FadingRealization::draw(&sc, &mut seed::rng(i));
        let pw = PowerVector::uniform(3, sc.num_groups(), 1.0, 0.5);
        let mut a = Assignment::empty(3);
        a.channel_to_groups[0] = vec![0];
        let before_g = sir_group(&sc, &f, &pw, &a, 0, 0).unwrap();
        let before_c = sir_cu(&sc, &f, &pw, &a, 0).unwrap();
        a.channel_to_groups[0] = vec![0, 1];
        assert!(sir_group(&sc, &f, &pw, &a, 0, 0).unwrap() <= before_g);
        assert!(sir_cu(&sc, &f, &pw, &a, 0).unwrap() < before_c);
    }
}
