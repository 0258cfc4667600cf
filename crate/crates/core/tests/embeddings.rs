use std::path::Path;

use proptest::prelude::*;
use tweet_affect::corpus::Tweet;
use tweet_affect::embeddings::{embed_tweet, parse_embeddings, EmbeddingTable};

fn table(rows: &[(String, Vec<f64>)], dim: usize) -> EmbeddingTable {
    let mut t = EmbeddingTable::new(dim).unwrap();
    for (w, v) in rows {
        t.insert(w.clone(), v).unwrap();
    }
    t
}

fn vocab_and_vectors() -> impl Strategy<Value = (usize, Vec<(String, Vec<f64>)>)> {
    (1usize..6).prop_flat_map(|dim| {
        let rows = prop::collection::btree_map("[a-z]{1,6}", prop::collection::vec(-1e3f64..1e3, dim), 1..12)
            .prop_map(|m| m.into_iter().collect::<Vec<_>>());
        (Just(dim), rows)
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn pooling_ignores_token_order((dim, rows) in vocab_and_vectors(), picks in prop::collection::vec(0usize..100, 0..10), seed in any::<u64>()) {
        let t = table(&rows, dim);
        let mut tokens: Vec<String> = picks.iter().map(|&i| rows[i % rows.len()].0.clone()).collect();
        tokens.push("oov-token".into());
        let a = embed_tweet(&Tweet::from_tokens("a", tokens.clone()), &t);
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        tokens.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let b = embed_tweet(&Tweet::from_tokens("b", tokens), &t);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn pooled_norm_is_bounded((dim, rows) in vocab_and_vectors(), picks in prop::collection::vec(0usize..100, 1..10)) {
        let t = table(&rows, dim);
        let tokens: Vec<String> = picks.iter().map(|&i| rows[i % rows.len()].0.clone()).collect();
        let bound = tokens.iter().map(|w| norm(t.get(w).unwrap())).fold(0.0, f64::max);
        let v = embed_tweet(&Tweet::from_tokens("a", tokens), &t);
        prop_assert!(norm(&v) <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn text_format_round_trips_bit_exactly((dim, rows) in vocab_and_vectors()) {
        let t = table(&rows, dim);
        let back = parse_embeddings(&t.to_text(), Path::new("mem"), None).unwrap();
        prop_assert_eq!(back.dim(), dim);
        prop_assert_eq!(back.words(), t.words());
        for w in t.words() {
            let (a, b) = (t.get(w).unwrap(), back.get(w).unwrap());
            prop_assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}

#[test]
fn hand_examples() {
    let t = table(&[("a".into(), vec![1.0, 0.0]), ("b".into(), vec![0.0, 1.0])], 2);
    assert_eq!(embed_tweet(&Tweet::from_tokens("x", vec!["a".into(), "b".into()]), &t), [0.5, 0.5]);
    assert_eq!(embed_tweet(&Tweet::from_tokens("x", vec!["zzz".into()]), &t), [0.0, 0.0]);
    assert_eq!(embed_tweet(&Tweet::from_tokens("x", vec!["b".into()]), &t), [0.0, 1.0]);
}

#[test]
fn vocabulary_filter_on_a_large_file() {
    let mut text = String::new();
    for i in 0..99 {
        text.push_str(&format!("w{i} 0.1 0.2 0.3\n"));
    }
    text.push_str("hola 1 2 3\n");
    let vocab = ["hola".to_string()].into_iter().collect();
    let t = parse_embeddings(&text, Path::new("e.txt"), Some(&vocab)).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t.get("hola").unwrap(), [1.0, 2.0, 3.0]);
}
