//! `generate`: random inputs for the other commands, reproducible by seed.

use clap::ValueEnum;
use metrize::gen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// A metric space (for `check`, `embed`).
    Space,
    /// A pseudo-metric space (for `check --pseudo`).
    Pseudo,
    /// A fundamental sequence of covers (for `metrize`).
    Sequence,
    /// A truncated inverse sequence with onto bonds (for `invlim`).
    Truncation,
    /// A ladder whose squares commute (for `invlim perturb`).
    Ladder,
    /// Input for `build adjunction`.
    Adjunction,
}

pub fn run(kind: Kind, seed: u64, size: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = size.max(1);
    let value: Value = match kind {
        Kind::Space => json!(gen::metric(&mut rng, n, 8)),
        Kind::Pseudo => json!(gen::pseudo_metric(&mut rng, n, 8)),
        Kind::Sequence => json!(gen::fundamental_sequence(&mut rng, n, 4)),
        Kind::Truncation => json!(gen::truncation(&mut rng, n.saturating_sub(1), 4, true)),
        Kind::Ladder => json!(gen::commuting_ladder(&mut rng, n.saturating_sub(1), 4)),
        Kind::Adjunction => {
            let x = gen::metric(&mut rng, n, 8);
            let y = gen::metric(&mut rng, n.div_ceil(2), 8);
            let map = gen::partial_map(&mut rng, x.len(), y.len(), x.len().div_ceil(2));
            json!({ "x": x, "y": y, "map": map })
        }
    };
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}
