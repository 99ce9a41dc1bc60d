//! Deterministic generators for spaces, weights and batteries.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::ExtNonneg;
use crate::space::{FiniteSpace, SpaceRef};
use crate::weights::Weight;

pub const MAX_POINTS: usize = 6;

/// Generator settings. Identical configs yield identical streams.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    pub max_points: usize,
    pub entry_grid: Vec<ExtNonneg>,
    pub trials: usize,
    pub horizon: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_points: 4,
            entry_grid: default_grid(),
            trials: 100,
            horizon: 32,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenConfig {
            seed,
            ..Self::default()
        }
    }

    /// Clamps `max_points` into `1..=6` and drops an empty grid back to the default.
    pub fn normalized(mut self) -> Self {
        self.max_points = self.max_points.clamp(1, MAX_POINTS);
        if self.entry_grid.is_empty() {
            self.entry_grid = default_grid();
        }
        self.trials = self.trials.max(1);
        self.horizon = self.horizon.max(1);
        self
    }

    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// `{0, 1/2, 1, 2, ∞}`.
pub fn default_grid() -> Vec<ExtNonneg> {
    vec![
        ExtNonneg::zero(),
        ExtNonneg::ratio(1, 2),
        ExtNonneg::from_integer(1),
        ExtNonneg::from_integer(2),
        ExtNonneg::Infinity,
    ]
}

pub fn point_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("p{i}")
            }
        })
        .collect()
}

/// Builds an `n`-point table from `entry(x * n + y)`, forces a zero diagonal,
/// closes it under min-plus composition and keeps it only when separated.
pub fn repaired_space(n: usize, entry: impl Fn(usize) -> ExtNonneg) -> Option<SpaceRef> {
    let mut t: Vec<Vec<ExtNonneg>> = (0..n)
        .map(|x| {
            (0..n)
                .map(|y| if x == y { ExtNonneg::zero() } else { entry(x * n + y) })
                .collect()
        })
        .collect();
    for k in 0..n {
        for x in 0..n {
            for y in 0..n {
                let via = t[x][k].add(&t[k][y]);
                if via < t[x][y] {
                    t[x][y] = via;
                }
            }
        }
    }
    FiniteSpace::new(point_labels(n), t).ok().map(Arc::new)
}

/// An endless, deterministic stream of repaired random spaces.
pub fn gen_space(cfg: &GenConfig) -> impl Iterator<Item = SpaceRef> {
    let cfg = cfg.clone().normalized();
    let mut rng = cfg.rng(0);
    std::iter::from_fn(move || loop {
        let n = rng.random_range(1..=cfg.max_points);
        let picks: Vec<ExtNonneg> = (0..n * n)
            .map(|_| cfg.entry_grid.choose(&mut rng).expect("nonempty grid").clone())
            .collect();
        if let Some(space) = repaired_space(n, |i| picks[i].clone()) {
            return Some(space);
        }
    })
}

/// Every valid space with at most `max_n` points whose entries lie on `grid`.
pub fn all_small_spaces(max_n: usize, grid: &[ExtNonneg]) -> Vec<SpaceRef> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let off = n * n - n;
        let total = grid.len().pow(off as u32);
        for mut code in 0..total {
            let mut table = vec![vec![ExtNonneg::zero(); n]; n];
            for (x, row) in table.iter_mut().enumerate() {
                for (y, cell) in row.iter_mut().enumerate() {
                    if x != y {
                        *cell = grid[code % grid.len()].clone();
                        code /= grid.len();
                    }
                }
            }
            if let Ok(space) = FiniteSpace::new(point_labels(n), table) {
                out.push(Arc::new(space));
            }
        }
    }
    out
}

fn fingerprint(space: &FiniteSpace) -> u64 {
    // FNV-1a over the textual table, stable across platforms and releases
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in space.table().iter().flatten() {
        for b in v.to_string().bytes().chain(std::iter::once(b';')) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

fn push_unique(out: &mut Vec<Weight>, w: Weight) {
    if !out.contains(&w) {
        out.push(w);
    }
}

/// A deduplicated list of weights: all representables first, then the
/// envelope of the zero array, shifts, pairwise infs and sups, and envelopes
/// of random arrays drawn from the grid.
pub fn gen_weights(space: &SpaceRef, cfg: &GenConfig) -> Vec<Weight> {
    let cfg = cfg.clone().normalized();
    let mut rng = cfg.rng(1 ^ fingerprint(space));
    let n = space.len();
    let mut out = Vec::new();
    for x in space.points() {
        push_unique(&mut out, Weight::yoneda(space, x));
    }
    let zero = vec![ExtNonneg::zero(); n];
    push_unique(&mut out, Weight::envelope(space, &zero).expect("length matches"));
    let finite: Vec<ExtNonneg> = cfg.entry_grid.iter().filter(|v| v.is_finite()).cloned().collect();
    for _ in 0..n.max(2) {
        let base = out.choose(&mut rng).expect("nonempty").clone();
        if let Some(r) = finite.choose(&mut rng) {
            push_unique(&mut out, base.plus(r));
            push_unique(&mut out, base.tminus(r));
        }
    }
    for _ in 0..n.max(2) {
        let a = out.choose(&mut rng).expect("nonempty").clone();
        let b = out.choose(&mut rng).expect("nonempty").clone();
        let pair = [a, b];
        push_unique(&mut out, Weight::inf_of(&pair).expect("same space"));
        push_unique(&mut out, Weight::sup_of(&pair).expect("same space"));
    }
    for _ in 0..2 * n {
        let f: Vec<ExtNonneg> = (0..n)
            .map(|_| cfg.entry_grid.choose(&mut rng).expect("nonempty grid").clone())
            .collect();
        push_unique(&mut out, Weight::envelope(space, &f).expect("length matches"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use crate::space::fixtures::s2;

    #[test]
    fn singleton_config() {
        let cfg = GenConfig {
            max_points: 1,
            ..GenConfig::default()
        };
        assert!(gen_space(&cfg).take(20).all(|s| s.len() == 1));
    }

    #[test]
    fn streams_are_deterministic() {
        let cfg = GenConfig::with_seed(17);
        let a: Vec<_> = gen_space(&cfg).take(30).collect();
        let b: Vec<_> = gen_space(&cfg).take(30).collect();
        assert_eq!(a, b);
        let c: Vec<_> = gen_space(&GenConfig::with_seed(18)).take(30).collect();
        assert_ne!(a, c);
        for s in &a {
            assert_eq!(gen_weights(s, &cfg), gen_weights(s, &cfg));
        }
    }

    #[test]
    fn emitted_spaces_validate() {
        let cfg = GenConfig {
            max_points: 6,
            ..GenConfig::with_seed(3)
        };
        for s in gen_space(&cfg).take(200) {
            FiniteSpace::new(s.labels().to_vec(), s.table()).unwrap();
            assert!(s.len() <= 6);
        }
    }

    #[test]
    fn weight_stream_contents() {
        let s = s2();
        let ws = gen_weights(&s, &GenConfig::default());
        assert_eq!(ws[0], Weight::yoneda(&s, 0));
        assert_eq!(ws[1], Weight::yoneda(&s, 1));
        assert!(ws.contains(&Weight::from_strs(s.clone(), &["0", "0"]).unwrap()));
        for (i, w) in ws.iter().enumerate() {
            assert!(!ws[..i].contains(w));
            Weight::new(s.clone(), w.values().to_vec()).unwrap();
        }
    }

    #[test]
    fn small_space_census() {
        let grid = default_grid();
        let spaces = all_small_spaces(2, &grid);
        // one singleton plus the 2-point tables without a double zero
        assert_eq!(spaces.len(), 1 + 24);
        let three = all_small_spaces(3, &grid).len() - spaces.len();
        assert!(three > 1000);
        assert!(spaces.iter().any(|s| s.len() == 2 && s.d(0, 1) == &q("1") && s.d(1, 0) == &q("2")));
    }

    #[test]
    fn repair_closes_triangles() {
        let vals = ["0", "5", "inf", "1", "0", "1", "inf", "1", "0"];
        let s = repaired_space(3, |i| q(vals[i])).unwrap();
        assert_eq!(s.d(0, 2), &q("6"));
        assert_eq!(s.d(2, 0), &q("2"));
    }
}
