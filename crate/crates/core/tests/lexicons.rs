use std::sync::Arc;

use proptest::prelude::*;
use tweet_affect::corpus::{AffectTarget, Dataset, LabeledInstance, Origin, Tweet};
use tweet_affect::features::FeatureSpec;
use tweet_affect::lexicons::{featurize, forward_select, forward_select_by, Lexicon};
use tweet_affect::models::PredictorSpec;

/// The documented two-phase procedure, coded directly from its description.
fn reference(names: &[&str], score: &dyn Fn(&[usize]) -> f64) -> Vec<usize> {
    let base = score(&[]);
    let mut beneficial: Vec<(f64, &str, usize)> = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let gain = score(&[i]) - base;
        if gain > 0.0 {
            beneficial.push((gain, name, i));
        }
    }
    beneficial.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(b.1)));
    let mut chosen: Vec<usize> = Vec::new();
    let mut best = base;
    for (_, _, i) in beneficial {
        let mut trial = chosen.clone();
        trial.push(i);
        let s = score(&trial);
        if s > best {
            chosen = trial;
            best = s;
        } else {
            break;
        }
    }
    chosen
}

proptest! {
    #[test]
    fn forward_selection_matches_reference(
        n in 1usize..=4,
        table in prop::collection::vec(-0.2f64..0.2, 16),
        base in -0.1f64..0.5,
    ) {
        let names: Vec<String> = (0..n).map(|i| format!("lex{}", (i * 3) % 5)).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        // score of a subset, looked up by its bitmask; empty subset is the base
        let score = |subset: &[usize]| -> f64 {
            let mask: usize = subset.iter().map(|i| 1 << i).sum();
            if mask == 0 { base } else { base + table[mask] }
        };
        let got = forward_select_by(&names, |s| Ok(score(s))).unwrap();
        prop_assert_eq!(&got.selected, &reference(&names, &score));
        let gains: Vec<f64> = got.selected.iter().map(|&i| got.gains[i]).collect();
        prop_assert!(gains.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(gains.iter().all(|&g| g > 0.0));
    }
}

#[test]
fn sufficient_lexicon_is_selected_first() {
    let words: Vec<String> = (0..30).map(|i| format!("w{i}")).collect();
    let a = Lexicon::from_entries("a", words.iter().enumerate().map(|(i, w)| (w.as_str(), "s", (i % 7) as f64 / 7.0))).unwrap();
    let noise = Lexicon::from_entries("noise", words.iter().enumerate().map(|(i, w)| (w.as_str(), "s", ((i * 11) % 5) as f64))).unwrap();
    let target: AffectTarget = "EI-Reg-joy".parse().unwrap();
    let instances: Vec<LabeledInstance> = (0..120)
        .map(|i| {
            let toks = [&words[(i * 7) % 30], &words[(i * 13 + 2) % 30], &words[(i * 3 + 1) % 30]];
            let sum: f64 = toks.iter().map(|t| a.score(t, "s").unwrap()).sum();
            LabeledInstance {
                tweet: Tweet::from_tokens(i.to_string(), toks.iter().map(|t| t.to_string()).collect()),
                label: sum / 3.0,
                origin: Origin::Gold,
            }
        })
        .collect();
    let data = Dataset::new(target, instances).unwrap();
    let candidates = vec![Arc::new(noise), Arc::new(a)];
    let base = FeatureSpec::new(None, Vec::new());
    let (chosen, sel) = forward_select(&candidates, &base, &PredictorSpec::kernel_svr(0.01), &data, 5).unwrap();
    assert_eq!(chosen[0].name(), "a");
    assert_eq!(sel.selected[0], 1);
}

#[test]
fn featurize_is_deterministic() {
    let lex = Lexicon::from_entries("l", [("feliz", "joy", 0.8), ("triste", "sadness", 0.9)]).unwrap();
    let t = Tweet::new("1", "muy feliz y triste feliz");
    let a = featurize(&t, &[&lex]);
    let b = featurize(&t, &[&lex]);
    assert_eq!(a, b);
    assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
}
