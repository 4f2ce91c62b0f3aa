use mutalm_core::kill::KillMatrix;
use mutalm_core::sim::{run_campaign, simulate_session};
use proptest::prelude::*;

fn two_by_two() -> KillMatrix {
    KillMatrix {
        approach: "x".into(),
        mutant_ids: vec!["3:literal:1:00000000".into(), "7:literal:1:00000000".into()],
        test_names: vec!["t1".into(), "t2".into()],
        kills: vec![vec![true, false], vec![false, true]],
        revealing_tests: vec!["t2".into()],
    }
}

#[test]
fn two_mutant_expected_effort() {
    // Each of the two analysis orders is equally likely: the revealing
    // mutant comes first (effort 1) or second (effort 2).
    let exact = (1.0 + 2.0) / 2.0;
    assert_eq!(exact, 1.5);
    let start = std::time::Instant::now();
    let r = run_campaign("b", &two_by_two(), 10_000, 2, 0);
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!(r.detection_ratio, 1.0);
    let mean = r.mean_first_reveal.unwrap();
    assert!((mean - exact).abs() <= 0.05, "{mean}");
}

fn matrices() -> impl Strategy<Value = KillMatrix> {
    (1usize..8, 1usize..5).prop_flat_map(|(m, t)| {
        (
            prop::collection::vec(prop::collection::vec(any::<bool>(), t), m),
            prop::collection::vec(any::<bool>(), t),
            prop::collection::vec(1u32..4, m),
        )
            .prop_map(move |(kills, rev, lines)| KillMatrix {
                approach: "x".into(),
                mutant_ids: lines
                    .iter()
                    .enumerate()
                    .map(|(i, l)| format!("{l}:literal:{i}:00000000"))
                    .collect(),
                test_names: (0..t).map(|j| format!("t{j}")).collect(),
                kills,
                revealing_tests: (0..t).filter(|j| rev[*j]).map(|j| format!("t{j}")).collect(),
            })
    })
}

proptest! {
    #[test]
    fn session_invariants(m in matrices(), seed in any::<u64>(), cap in 1usize..10) {
        let t = simulate_session(&m, seed, cap);
        prop_assert!(t.total_effort <= cap);
        prop_assert_eq!(t.total_effort, t.analyzed_order.len());
        let mut chosen: Vec<usize> = Vec::new();
        for id in &t.analyzed_order {
            let row = m.mutant_ids.iter().position(|x| x == id).unwrap();
            // Nothing analysed was already killed by a chosen test.
            prop_assert!(chosen.iter().all(|c| !m.kills[row][*c]));
            if m.is_killed(row) {
                let name = &t.selected_tests[chosen.len()];
                let col = m.test_names.iter().position(|x| x == name).unwrap();
                prop_assert!(m.kills[row][col]);
                chosen.push(col);
            }
        }
        prop_assert_eq!(chosen.len(), t.selected_tests.len());
        let first = chosen.iter().position(|c| m.is_revealing(*c));
        prop_assert_eq!(t.bug_found, first.is_some());
        if let Some(e) = t.effort_to_first_reveal {
            prop_assert!(e <= t.total_effort);
        }
        prop_assert_eq!(t.clone(), simulate_session(&m, seed, cap));
    }

    #[test]
    fn curve_is_monotone(m in matrices(), seed in any::<u64>(), cap in 1usize..10) {
        let r = run_campaign("b", &m, 20, cap, seed);
        prop_assert_eq!(r.curve.len(), cap);
        for w in r.curve.windows(2) {
            prop_assert!(w[0].1 <= w[1].1 && w[0].0 < w[1].0);
        }
        prop_assert!((r.curve.last().unwrap().1 - r.detection_ratio).abs() < 1e-12);
    }
}
