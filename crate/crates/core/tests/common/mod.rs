//! Shared helpers for the integration suites: a deterministic RNG, random
//! weakly guarded specifications, and random transition-system fragments.

use ppdalab_core::algebra::{Identifier, ProcessExpr, RecSpec};
use ppdalab_core::foundations::ActionLabel;
use ppdalab_core::lts::LtsFragment;

/// SplitMix64: tiny, deterministic, good enough for test data.
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    pub fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }
}

/// A random weakly guarded BPP specification: up to `max_idents`
/// identifiers, bodies of at most `max_size` nodes, identifiers only under
/// action prefixes.
pub fn random_bpp_spec(rng: &mut Rng, max_idents: usize, max_size: usize) -> RecSpec {
    let ident_count = 1 + rng.below(max_idents);
    let names: Vec<String> = (0..ident_count).map(|i| format!("X{}", i)).collect();
    let actions = ["a", "b", "c"];

    fn gen(
        rng: &mut Rng,
        size: &mut usize,
        guarded: bool,
        names: &[String],
        actions: &[&str],
    ) -> ProcessExpr {
        if *size == 0 {
            return if rng.chance(50) { ProcessExpr::Accept } else { ProcessExpr::Deadlock };
        }
        *size -= 1;
        match rng.below(if guarded { 6 } else { 5 }) {
            0 => ProcessExpr::Accept,
            1 => ProcessExpr::Deadlock,
            2 => {
                let label = ActionLabel::plain(actions[rng.below(actions.len())]);
                ProcessExpr::prefix(label, gen(rng, size, true, names, actions))
            }
            3 => ProcessExpr::choice(
                gen(rng, size, guarded, names, actions),
                gen(rng, size, guarded, names, actions),
            ),
            4 => ProcessExpr::parallel(
                gen(rng, size, guarded, names, actions),
                gen(rng, size, guarded, names, actions),
            ),
            _ => ProcessExpr::ident(&names[rng.below(names.len())]),
        }
    }

    let equations: Vec<(Identifier, ProcessExpr)> = names
        .iter()
        .map(|name| {
            let mut size = 1 + rng.below(max_size);
            // ensure at least one prefix so the equation can move
            let mut body = ProcessExpr::prefix(
                ActionLabel::plain(actions[rng.below(actions.len())]),
                gen(rng, &mut size, true, &names, &actions),
            );
            if rng.chance(70) {
                body = ProcessExpr::choice(body, gen(rng, &mut size, false, &names, &actions));
            }
            if rng.chance(50) {
                body = ProcessExpr::choice(ProcessExpr::Accept, body);
            }
            (Identifier::new(name), body)
        })
        .collect();
    RecSpec::new("Random", equations, Identifier::new(&names[0]), [], [], None)
        .expect("random spec is closed")
}

/// A random fragment of at most `max_states` states over labels a, b and
/// tau, with random acceptance marks and no horizon states.
pub fn random_fragment(rng: &mut Rng, max_states: usize) -> LtsFragment {
    let n = 2 + rng.below(max_states.saturating_sub(1));
    let states: Vec<(String, bool)> =
        (0..n).map(|i| (format!("s{}", i), rng.chance(40))).collect();
    let labels = [ActionLabel::plain("a"), ActionLabel::plain("b"), ActionLabel::tau()];
    let edge_count = n + rng.below(2 * n);
    let edges: Vec<(usize, ActionLabel, usize)> = (0..edge_count)
        .map(|_| {
            let label = labels[rng.below(labels.len())].clone();
            (rng.below(n), label, rng.below(n))
        })
        .collect();
    LtsFragment::build(states, edges)
}
