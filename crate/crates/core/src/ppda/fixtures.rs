//! The automata used throughout the test suite, transcribed exactly.

use std::collections::BTreeMap;

use crate::foundations::{ActionLabel, Arg, Bag, DataSymbol};

use super::{bag_of, trans, Ppda, StateName, TransitionTest};

fn sym(name: &str) -> DataSymbol {
    DataSymbol::new(name)
}

fn plain(name: &str) -> ActionLabel {
    ActionLabel::plain(name)
}

fn present(name: &str) -> TransitionTest {
    TransitionTest::Present(sym(name))
}

fn absent(name: &str) -> TransitionTest {
    TransitionTest::Absent(sym(name))
}

/// The always accepting counter: one state, increments via `a`, decrements
/// via `b`.
pub fn counter() -> Ppda {
    Ppda::new(
        "Counter",
        [StateName::new("s0")],
        [sym("1")],
        [
            trans("s0", plain("a"), absent("1"), bag_of(&["1"]), "s0"),
            trans("s0", plain("a"), present("1"), bag_of(&["1", "1"]), "s0"),
            trans("s0", plain("b"), present("1"), Bag::empty(), "s0"),
        ],
        StateName::new("s0"),
        [StateName::new("s0")],
    )
    .expect("counter fixture")
}

/// The counter that only accepts when its bag is empty: three states, with a
/// tau-pair checking whether a `1` remains after each decrement.
pub fn counter_empty() -> Ppda {
    Ppda::new(
        "CounterEmpty",
        ["empty", "some", "check"].map(StateName::new),
        [sym("1")],
        [
            trans("empty", plain("a"), absent("1"), bag_of(&["1"]), "some"),
            trans("some", plain("a"), present("1"), bag_of(&["1", "1"]), "some"),
            trans("some", plain("b"), present("1"), Bag::empty(), "check"),
            trans("check", ActionLabel::tau(), absent("1"), Bag::empty(), "empty"),
            trans("check", ActionLabel::tau(), present("1"), bag_of(&["1"]), "some"),
        ],
        StateName::new("empty"),
        [StateName::new("empty")],
    )
    .expect("counter-empty fixture")
}

/// The always accepting bag over the given data alphabet: per symbol, four
/// transitions — insert when absent, insert when present, remove, and show
/// absence.
pub fn always_accepting_bag(data: &[&str]) -> Ppda {
    let mut transitions = Vec::new();
    for d in data {
        let ins = ActionLabel::plain_arg("ins", Arg::bare(sym(d)));
        let rem = ActionLabel::plain_arg("rem", Arg::bare(sym(d)));
        let show = ActionLabel::plain_arg("show", Arg::minus(sym(d)));
        transitions.push(trans("s0", ins.clone(), absent(d), bag_of(&[d]), "s0"));
        transitions.push(trans("s0", ins, present(d), bag_of(&[d, d]), "s0"));
        transitions.push(trans("s0", rem, present(d), Bag::empty(), "s0"));
        transitions.push(trans("s0", show, absent(d), Bag::empty(), "s0"));
    }
    Ppda::new(
        "Bag",
        [StateName::new("s0")],
        data.iter().map(|d| sym(d)),
        transitions,
        StateName::new("s0"),
        [StateName::new("s0")],
    )
    .expect("bag fixture")
}

/// The counter with a change: decrementing `c` is only possible on the empty
/// bag.
pub fn counter_change() -> Ppda {
    Ppda::new(
        "CounterChange",
        [StateName::new("s0")],
        [sym("1")],
        [
            trans("s0", plain("c"), absent("1"), bag_of(&["1"]), "s0"),
            trans("s0", plain("a"), present("1"), bag_of(&["1", "1"]), "s0"),
            trans("s0", plain("b"), present("1"), Bag::empty(), "s0"),
        ],
        StateName::new("s0"),
        [StateName::new("s0")],
    )
    .expect("counter-change fixture")
}

/// The two-state automaton with three loop rules on its initial state, a `c`
/// switch into an accepting state, and a `d` loop there.
pub fn fig9() -> Ppda {
    Ppda::new(
        "TwoState",
        ["s", "t"].map(StateName::new),
        [sym("1")],
        [
            trans("s", plain("a"), absent("1"), bag_of(&["1"]), "s"),
            trans("s", plain("a"), present("1"), bag_of(&["1", "1"]), "s"),
            trans("s", plain("b"), present("1"), Bag::empty(), "s"),
            trans("s", plain("c"), present("1"), Bag::empty(), "t"),
            trans("t", plain("d"), present("1"), Bag::empty(), "t"),
        ],
        StateName::new("s"),
        [StateName::new("t")],
    )
    .expect("fig9 fixture")
}

/// The automaton with a divergence: a non-accepting initial state with three
/// tau loop rules and an `a` escape into an accepting `a`-loop.
pub fn divergence() -> Ppda {
    Ppda::new(
        "Divergence",
        ["u", "v"].map(StateName::new),
        [sym("1")],
        [
            trans("u", ActionLabel::tau(), absent("1"), bag_of(&["1"]), "u"),
            trans("u", ActionLabel::tau(), present("1"), bag_of(&["1", "1"]), "u"),
            trans("u", ActionLabel::tau(), present("1"), Bag::empty(), "u"),
            trans("u", plain("a"), present("1"), Bag::empty(), "v"),
            trans("v", plain("a"), present("1"), Bag::empty(), "v"),
        ],
        StateName::new("u"),
        [StateName::new("v")],
    )
    .expect("divergence fixture")
}

/// All named fixture automata.
pub fn fixtures() -> BTreeMap<String, Ppda> {
    let mut map = BTreeMap::new();
    map.insert("counter".to_string(), counter());
    map.insert("counter-empty".to_string(), counter_empty());
    map.insert("bag".to_string(), always_accepting_bag(&["d", "e"]));
    map.insert("counter-change".to_string(), counter_change());
    map.insert("fig9".to_string(), fig9());
    map.insert("divergence".to_string(), divergence());
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_has_one_state_three_transitions() {
        let m = counter();
        assert_eq!(m.states().len(), 1);
        assert_eq!(m.transitions().len(), 3);
    }

    #[test]
    fn fig9_shape() {
        let m = fig9();
        assert_eq!(m.states().len(), 2);
        assert_eq!(m.transitions().len(), 5);
        assert!(!m.accepting().contains(m.initial()));
        assert!(m.accepting().contains(&StateName::new("t")));
    }

    #[test]
    fn bag_over_two_symbols_has_eight_transitions() {
        let m = always_accepting_bag(&["d", "e"]);
        assert_eq!(m.transitions().len(), 8);
    }
}
