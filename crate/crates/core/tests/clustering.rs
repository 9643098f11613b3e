use bhcast_core::clustering::{
    adjusted_rand_index, kmeans, median_daily_signatures, select_k, served_traffic_share, silhouette,
    weekly_signatures, Normalization,
};
use bhcast_core::series::{acf, midnight, DayClass, MissingPolicy, TimeWindow};
use bhcast_core::synth::{builtin_archetype, builtin_archetypes, generate_scenario, Scenario, ScenarioSpec};
use chrono::{Duration, NaiveDate};

fn monday() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 6).unwrap()
}

fn four_weeks() -> TimeWindow {
    TimeWindow::days(monday(), monday() + Duration::days(27)).unwrap()
}

fn scenario(mix: &[(&str, usize)], noise: f64, seed: u64) -> Scenario {
    let mix = mix
        .iter()
        .map(|(name, n)| {
            let a = builtin_archetype(name).unwrap();
            let a = if *name == "U" { a } else { a.with_noise(noise) };
            (a, *n)
        })
        .collect();
    generate_scenario(&ScenarioSpec { mix, start: monday(), days: 28, seed }).unwrap()
}

fn truth(sc: &Scenario, ids: &[String]) -> Vec<String> {
    ids.iter().map(|id| sc.label_of(id).unwrap().to_string()).collect()
}

#[test]
fn planted_four_archetypes_recovered() {
    let sc = scenario(&[("R1", 60), ("R2", 60), ("B", 50), ("T", 30)], 0.05, 11);
    let set = weekly_signatures(&sc.traces, &four_weeks(), MissingPolicy::Reject, Normalization::Max).unwrap();
    assert_eq!(set.signatures.len(), 200);
    let m = kmeans(&set.signatures, 4, 1, 10).unwrap();
    let ari = adjusted_rand_index(&m.assignments, &truth(&sc, &m.cell_ids));
    assert!(ari >= 0.95, "ARI {ari}");

    // k = 4 beats every other k except 5
    let at4 = m.mean_silhouette().unwrap();
    for k in [2, 3, 6, 7, 8, 9, 10] {
        let other = kmeans(&set.signatures, k, 1, 10).unwrap();
        let s = silhouette(&other, &set.signatures).unwrap().mean;
        assert!(at4 > s, "k={k}: {s} >= {at4}");
    }
}

#[test]
fn five_archetypes_select_five() {
    let sc = scenario(&[("R1", 50), ("R2", 40), ("B", 40), ("T", 30), ("U", 15)], 0.05, 5);
    let set = weekly_signatures(&sc.traces, &four_weeks(), MissingPolicy::Reject, Normalization::Max).unwrap();
    let sel = select_k(&set.signatures, 2..=10, 7, 10).unwrap();
    assert_eq!(sel.best_k, 5, "{:?}", sel.scores);
}

#[test]
fn three_archetypes_select_three() {
    let sc = scenario(&[("R1", 20), ("B", 20), ("T", 20)], 0.05, 2);
    let set = weekly_signatures(&sc.traces, &four_weeks(), MissingPolicy::Reject, Normalization::Max).unwrap();
    let sel = select_k(&set.signatures, 2..=10, 7, 10).unwrap();
    assert_eq!(sel.best_k, 3, "{:?}", sel.scores);
    assert!(!sel.weak_structure);
}

#[test]
fn single_archetype_has_weak_structure() {
    let sc = scenario(&[("R1", 40)], 0.05, 4);
    let set = weekly_signatures(&sc.traces, &four_weeks(), MissingPolicy::Reject, Normalization::Max).unwrap();
    let sel = select_k(&set.signatures, 2..=10, 7, 10).unwrap();
    let best = sel.scores.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(sel.best_k, 2, "{:?}", sel.scores);
    assert!(best < 0.3, "{best}");
    assert!(sel.weak_structure);
}

#[test]
fn noiseless_signature_equals_template() {
    let r1 = builtin_archetype("R1").unwrap().with_noise(0.0);
    let sc =
        generate_scenario(&ScenarioSpec { mix: vec![(r1.clone(), 3)], start: monday(), days: 28, seed: 1 }).unwrap();
    let set = weekly_signatures(&sc.traces, &four_weeks(), MissingPolicy::Reject, Normalization::Max).unwrap();
    let mut template: Vec<f64> = Vec::new();
    for _ in 0..5 {
        template.extend(&r1.workday_profile);
    }
    template.extend(&r1.saturday_profile);
    template.extend(&r1.sunday_profile);
    let peak = template.iter().copied().fold(0.0, f64::max);
    for sig in &set.signatures {
        for (a, b) in sig.values.iter().zip(&template) {
            assert!((a - b / peak).abs() < 1e-12);
        }
    }
}

#[test]
fn outlier_day_does_not_move_signature() {
    let r1 = builtin_archetype("R1").unwrap().with_noise(0.0).with_amplitude(100.0, 100.0);
    let sc =
        generate_scenario(&ScenarioSpec { mix: vec![(r1.clone(), 1)], start: monday(), days: 28, seed: 1 }).unwrap();
    let mut values: Vec<f64> = sc.traces[0].values().iter().map(|v| v.unwrap()).collect();
    // Wednesday of week 2 carries a 50x outage-recovery spike
    for v in &mut values[(9 * 24)..(10 * 24)] {
        *v *= 50.0;
    }
    let trace = bhcast_core::series::HourlyTrace::from_values("x", midnight(monday()), values).unwrap();
    let [work, sat, sun] = median_daily_signatures(&trace, &four_weeks(), MissingPolicy::Reject).unwrap();
    for h in 0..24 {
        assert!((work.values[h] - 100.0 * r1.workday_profile[h]).abs() < 1e-9);
        assert!((sat.values[h] - 100.0 * r1.profile(DayClass::Saturday)[h]).abs() < 1e-9);
        assert!((sun.values[h] - 100.0 * r1.profile(DayClass::Sunday)[h]).abs() < 1e-9);
    }
}

#[test]
fn residential_signature_repeats_daily_on_workdays() {
    let sc = scenario(&[("R1", 1)], 0.05, 8);
    let set = weekly_signatures(&sc.traces, &four_weeks(), MissingPolicy::Reject, Normalization::Max).unwrap();
    let v = &set.signatures[0].values;
    let week = acf(&v[..120], 24).unwrap();
    assert!(week[24] > 0.7, "{}", week[24]);
    assert!(v[..24] == v[24..48]);
    assert!(v[120..144] != v[..24]);
    assert!(v[144..168] != v[..24]);
}

#[test]
fn scaling_traces_keeps_assignments() {
    let sc = scenario(&[("R1", 10), ("B", 10), ("T", 10)], 0.05, 3);
    let w = four_weeks();
    let a = weekly_signatures(&sc.traces, &w, MissingPolicy::Reject, Normalization::Max).unwrap();
    let scaled: Vec<_> = sc.traces.iter().enumerate().map(|(i, t)| t.scaled(1.0 + i as f64 * 0.37)).collect();
    let b = weekly_signatures(&scaled, &w, MissingPolicy::Reject, Normalization::Max).unwrap();
    for (x, y) in a.signatures.iter().zip(&b.signatures) {
        for (p, q) in x.values.iter().zip(&y.values) {
            assert!((p - q).abs() <= 1e-12);
        }
    }
    assert_eq!(
        kmeans(&a.signatures, 3, 4, 5).unwrap().assignments,
        kmeans(&b.signatures, 3, 4, 5).unwrap().assignments
    );
}

#[test]
fn planted_traffic_shares_recovered() {
    // cell counts and per-cell amplitudes chosen so each archetype carries its planted share
    let planted = [("R1", 37, 48.6), ("R2", 30, 29.1), ("B", 21, 13.9), ("T", 8, 8.3), ("U", 4, 0.1)];
    let window = four_weeks();
    let mean_level = |name: &str| {
        let a = builtin_archetype(name).unwrap();
        let mut total = 0.0;
        for d in 0..28 {
            total += a.profile(DayClass::of(monday() + Duration::days(d))).iter().sum::<f64>();
        }
        total
    };
    let mix = planted
        .iter()
        .map(|&(name, n, share)| {
            let amp = 1e9 * share / (n as f64 * mean_level(name));
            (builtin_archetype(name).unwrap().with_noise(0.05).with_amplitude(amp, amp), n)
        })
        .collect();
    let sc = generate_scenario(&ScenarioSpec { mix, start: monday(), days: 28, seed: 21 }).unwrap();
    let set = weekly_signatures(&sc.traces, &window, MissingPolicy::Reject, Normalization::Max).unwrap();
    let model = kmeans(&set.signatures, 5, 3, 10).unwrap();
    let shares = served_traffic_share(&model, &sc.traces, &window, MissingPolicy::Reject).unwrap();
    assert!((shares.iter().sum::<f64>() - 1.0).abs() < 1e-9);

    // direct summation oracle per planted label
    let mut by_label = std::collections::HashMap::new();
    let mut total = 0.0;
    for t in &sc.traces {
        let v: f64 = t.values().iter().map(|x| x.unwrap()).sum();
        *by_label.entry(sc.label_of(t.cell_id()).unwrap().to_string()).or_insert(0.0) += v;
        total += v;
    }
    for &(name, _, share) in &planted {
        let c = model.cluster_of(&format!("{name}-0000")).unwrap();
        assert!((shares[c] * 100.0 - share).abs() < 1.0, "{name}: {} vs {share}", shares[c] * 100.0);
        assert!((by_label[name] / total - shares[c]).abs() < 1e-9);
    }
}

#[test]
fn single_cluster_holds_all_traffic() {
    let sc = scenario(&[("R1", 3), ("B", 3)], 0.05, 1);
    let set = weekly_signatures(&sc.traces, &four_weeks(), MissingPolicy::Reject, Normalization::Max).unwrap();
    let m = kmeans(&set.signatures, 1, 0, 1).unwrap();
    assert_eq!(served_traffic_share(&m, &sc.traces, &four_weeks(), MissingPolicy::Reject).unwrap(), vec![1.0]);
    assert_eq!(builtin_archetypes().len(), 5);
}
