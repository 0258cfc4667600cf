//! Counts how often the translated and silver variants beat the regular one
//! on held-out data of the synthetic task.
//!
//! `cargo run --release -p tweet-affect --example directional -- [seeds] [first-seed] [model]`

use std::time::Instant;

use tweet_affect::experiment::execute;
use tweet_affect::synthetic::{generate, synthetic_config, SyntheticSpec};

fn main() -> tweet_affect::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let seeds: u64 = args.first().and_then(|s| s.parse().ok()).unwrap_or(20);
    let first: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let model = args.get(2).cloned().unwrap_or_else(|| "svm".into());
    let start = Instant::now();
    let (mut t_wins, mut s_wins) = (0, 0);
    for seed in first..first + seeds {
        let task = generate(&SyntheticSpec {
            seed,
            ..SyntheticSpec::default()
        })?;
        let mut cfg = synthetic_config(seed);
        let names = [model.clone(), format!("{model}-t"), format!("{model}-s")];
        cfg.variants = names
            .iter()
            .map(|n| cfg.resolve_variant(n))
            .collect::<tweet_affect::Result<_>>()?;
        let out = execute(&cfg, &task.resources()?)?;
        let score = |n: &str| out.variant(n).and_then(|v| v.test_score).unwrap_or(f64::NAN);
        let (r, t, s) = (score(&names[0]), score(&names[1]), score(&names[2]));
        t_wins += usize::from(t > r);
        s_wins += usize::from(s > r);
        println!(
            "seed {seed:2}: regular {r:.4}  translated {t:.4}  silver {s:.4}  (silver added {})",
            out.silver_added.unwrap_or(0)
        );
    }
    println!(
        "translated wins {t_wins}/{seeds}, silver wins {s_wins}/{seeds}, {:.1}s",
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
