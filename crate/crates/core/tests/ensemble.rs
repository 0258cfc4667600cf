use proptest::prelude::*;
use tweet_affect::ensemble::{stepwise_prune, stepwise_prune_with, EnsembleMember, OnReject, PruneOptions};
use tweet_affect::models::PredictionSet;

fn member(name: &str, dev: Vec<f64>, test: Vec<f64>, score: f64) -> EnsembleMember {
    let ids = |n: usize, p: &str| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
    EnsembleMember {
        name: name.to_string(),
        dev: PredictionSet::new(ids(dev.len(), "d"), dev).unwrap(),
        test: PredictionSet::new(ids(test.len(), "t"), test).unwrap(),
        individual_dev_score: score,
    }
}

fn members_strategy() -> impl Strategy<Value = Vec<EnsembleMember>> {
    prop::collection::vec((prop::collection::vec(0.0f64..1.0, 3), 0.0f64..1.0, 0.0f64..1.0), 1..=6).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (dev, test, score))| member(&format!("m{i}"), dev, vec![test], (score * 4.0).round() / 4.0))
            .collect()
    })
}

fn first_value(p: &PredictionSet) -> tweet_affect::Result<f64> {
    Ok(p.values[0])
}

proptest! {
    #[test]
    fn pruning_invariants(members in members_strategy(), min_gain in 0.0f64..0.05, skip in any::<bool>()) {
        let options = PruneOptions { min_gain, on_reject: if skip { OnReject::Skip } else { OnReject::Stop } };
        let r = stepwise_prune_with(&members, first_value, &options).unwrap();
        let names: Vec<&str> = members.iter().map(|m| m.name.as_str()).collect();

        prop_assert!(!r.kept.is_empty());
        prop_assert!(r.dev_score >= r.full_score);
        // kept members appear in input order
        let positions: Vec<usize> = r.kept.iter().map(|k| names.iter().position(|n| n == k).unwrap()).collect();
        prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));

        let kept: Vec<&EnsembleMember> = members.iter().filter(|m| r.kept.contains(&m.name)).collect();
        let mean = |f: &dyn Fn(&EnsembleMember) -> f64| kept.iter().map(|m| f(m)).sum::<f64>() / kept.len() as f64;
        prop_assert!((r.dev_score - mean(&|m| m.dev.values[0])).abs() < 1e-12);
        prop_assert!((r.averaged_test.values[0] - mean(&|m| m.test.values[0])).abs() < 1e-12);

        let mut best = r.full_score;
        for (i, attempt) in r.removal_log.iter().enumerate() {
            prop_assert_eq!(attempt.accepted, attempt.score > best + min_gain + 1e-12);
            if attempt.accepted {
                best = attempt.score;
                prop_assert!(!r.kept.contains(&attempt.name));
            } else if !skip {
                prop_assert_eq!(i, r.removal_log.len() - 1);
            }
        }
        prop_assert_eq!(best, r.dev_score);
    }

    #[test]
    fn larger_threshold_never_keeps_fewer(members in members_strategy(), a in 0.0f64..0.05, b in 0.0f64..0.05) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let run = |g: f64| stepwise_prune_with(&members, first_value, &PruneOptions { min_gain: g, on_reject: OnReject::Stop }).unwrap();
        // with stop-on-reject, a stricter threshold rejects no later than a looser one
        prop_assert!(run(hi).kept.len() >= run(lo).kept.len());
    }
}

#[test]
fn single_member_is_kept() {
    let m = vec![member("only", vec![0.1, 0.5, 0.9], vec![], 0.3)];
    let r = stepwise_prune(&m, &[0.0, 0.5, 1.0], 0.002).unwrap();
    assert_eq!(r.kept, vec!["only"]);
    assert!(r.removal_log.is_empty());
}

#[test]
fn misaligned_members_are_rejected() {
    let a = member("a", vec![0.1, 0.2], vec![], 0.1);
    let mut b = member("b", vec![0.1, 0.2], vec![], 0.2);
    b.dev.ids.reverse();
    assert!(stepwise_prune(&[a, b], &[0.0, 1.0], 0.002).is_err());
}
