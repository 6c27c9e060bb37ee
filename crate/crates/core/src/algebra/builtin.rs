//! The specifications used throughout the test suite, parametrised by the
//! data alphabet where applicable.

use std::collections::BTreeMap;

use crate::foundations::{ActionLabel, Arg, DataSymbol, Polarity, Port, PriorityOrder};

use super::{Identifier, ProcessExpr, RecSpec};

use ProcessExpr as E;

fn plain(name: &str) -> ActionLabel {
    ActionLabel::plain(name)
}

/// The always accepting counter: `AC = 1 + a . (AC || (1 + b . 1))`.
pub fn ac() -> RecSpec {
    RecSpec::single(
        "AC",
        "AC",
        E::choice(
            E::Accept,
            E::prefix(
                plain("a"),
                E::parallel(
                    E::ident("AC"),
                    E::choice(E::Accept, E::prefix(plain("b"), E::Accept)),
                ),
            ),
        ),
    )
}

/// The counter accepting only when empty: `EC = 1 + a . (EC || b . 1)`.
pub fn ec() -> RecSpec {
    RecSpec::single(
        "EC",
        "EC",
        E::choice(
            E::Accept,
            E::prefix(
                plain("a"),
                E::parallel(E::ident("EC"), E::prefix(plain("b"), E::Accept)),
            ),
        ),
    )
}

/// The bag without absence signalling:
/// `AB = 1 + sum_d ins(d) . (AB || (1 + rem(d) . 1))`.
pub fn ab(data: &[&str]) -> RecSpec {
    let body = E::sum(std::iter::once(E::Accept).chain(data.iter().map(|d| {
        E::prefix(
            ActionLabel::plain_arg("ins", Arg::bare(DataSymbol::new(*d))),
            E::parallel(
                E::ident("AB"),
                E::choice(
                    E::Accept,
                    E::prefix(
                        ActionLabel::plain_arg("rem", Arg::bare(DataSymbol::new(*d))),
                        E::Accept,
                    ),
                ),
            ),
        )
    })));
    RecSpec::new(
        "AB",
        [(Identifier::new("AB"), body)],
        Identifier::new("AB"),
        data.iter().map(|d| DataSymbol::new(*d)),
        [],
        None,
    )
    .expect("AB is closed")
}

/// The always accepting bag with absence signalling, using the priority
/// `show(-d) < rem(d)`:
/// `ABag = 1 + sum_d ins(d) . theta(ABag || (1 + rem(d) . 1))
///           + sum_d show(-d) . ABag`.
pub fn abag(data: &[&str]) -> RecSpec {
    let ins = |d: &str| ActionLabel::plain_arg("ins", Arg::bare(DataSymbol::new(d)));
    let rem = |d: &str| ActionLabel::plain_arg("rem", Arg::bare(DataSymbol::new(d)));
    let show = |d: &str| ActionLabel::plain_arg("show", Arg::minus(DataSymbol::new(d)));
    let body = E::sum(
        std::iter::once(E::Accept)
            .chain(data.iter().map(|d| {
                E::prefix(
                    ins(d),
                    E::theta(E::parallel(
                        E::ident("ABag"),
                        E::choice(E::Accept, E::prefix(rem(d), E::Accept)),
                    )),
                )
            }))
            .chain(data.iter().map(|d| E::prefix(show(d), E::ident("ABag")))),
    );
    let priority = PriorityOrder::new(data.iter().flat_map(|d| {
        [(show(d), rem(d)), (show(d), ActionLabel::tau())]
    }))
    .expect("ABag priority order is valid");
    RecSpec::new(
        "ABag",
        [(Identifier::new("ABag"), body)],
        Identifier::new("ABag"),
        data.iter().map(|d| DataSymbol::new(*d)),
        [],
        Some(priority),
    )
    .expect("ABag is closed")
}

/// The communicating always accepting bag over an input and an output port;
/// removals send `out!+d`, absence signals send `out!-d` with lower
/// priority.
pub fn abag_io(data: &[&str], input: &str, output: &str) -> RecSpec {
    abag_io_in(data, input, Polarity::Bare, output)
}

/// `abag_io` with the polarity mark expected on received data, so a bag can
/// be fed directly from another bag's `+d`-marked removal sends.
pub fn abag_io_in(data: &[&str], input: &str, in_polarity: Polarity, output: &str) -> RecSpec {
    let name = format!("ABag{}{}", input, output);
    let ident = Identifier::new(&name);
    let recv = |d: &str| {
        ActionLabel::receive(
            Port::new(input),
            Arg { symbol: DataSymbol::new(d), polarity: in_polarity },
        )
    };
    let send_plus = |d: &str| ActionLabel::send(Port::new(output), Arg::plus(DataSymbol::new(d)));
    let send_minus = |d: &str| ActionLabel::send(Port::new(output), Arg::minus(DataSymbol::new(d)));
    let body = E::sum(
        std::iter::once(E::Accept)
            .chain(data.iter().map(|d| {
                E::prefix(
                    recv(d),
                    E::theta(E::parallel(
                        E::Ident(ident.clone()),
                        E::choice(E::Accept, E::prefix(send_plus(d), E::Accept)),
                    )),
                )
            }))
            .chain(data.iter().map(|d| E::prefix(send_minus(d), E::Ident(ident.clone())))),
    );
    let priority = PriorityOrder::new(data.iter().flat_map(|d| {
        [(send_minus(d), send_plus(d)), (send_minus(d), ActionLabel::tau())]
    }))
    .expect("ABag^io priority order is valid");
    RecSpec::new(
        name,
        [(ident.clone(), body)],
        ident,
        data.iter().map(|d| DataSymbol::new(*d)),
        [Port::new(input), Port::new(output)],
        Some(priority),
    )
    .expect("ABag^io is closed")
}

/// The communicating bag accepting only when empty.
pub fn ebag_io(data: &[&str], input: &str, output: &str) -> RecSpec {
    ebag_io_in(data, input, Polarity::Bare, output)
}

/// `ebag_io` with the polarity mark expected on received data.
pub fn ebag_io_in(data: &[&str], input: &str, in_polarity: Polarity, output: &str) -> RecSpec {
    let name = format!("EBag{}{}", input, output);
    let ident = Identifier::new(&name);
    let recv = |d: &str| {
        ActionLabel::receive(
            Port::new(input),
            Arg { symbol: DataSymbol::new(d), polarity: in_polarity },
        )
    };
    let send_plus = |d: &str| ActionLabel::send(Port::new(output), Arg::plus(DataSymbol::new(d)));
    let send_minus = |d: &str| ActionLabel::send(Port::new(output), Arg::minus(DataSymbol::new(d)));
    let body = E::sum(
        std::iter::once(E::Accept)
            .chain(data.iter().map(|d| {
                E::prefix(
                    recv(d),
                    E::theta(E::parallel(
                        E::Ident(ident.clone()),
                        E::prefix(send_plus(d), E::Accept),
                    )),
                )
            }))
            .chain(data.iter().map(|d| E::prefix(send_minus(d), E::Ident(ident.clone())))),
    );
    let priority = PriorityOrder::new(data.iter().flat_map(|d| {
        [(send_minus(d), send_plus(d)), (send_minus(d), ActionLabel::tau())]
    }))
    .expect("EBag^io priority order is valid");
    RecSpec::new(
        name,
        [(ident.clone(), body)],
        ident,
        data.iter().map(|d| DataSymbol::new(*d)),
        [Port::new(input), Port::new(output)],
        Some(priority),
    )
    .expect("EBag^io is closed")
}

/// The priority-free communicating bag used with get communication:
/// `AB_io = 1 + sum_d in?d . (AB_io || (1 + out!d . 1))`.
pub fn ab_io(data: &[&str], input: &str, output: &str) -> RecSpec {
    let name = format!("AB{}{}", input, output);
    let ident = Identifier::new(&name);
    let body = E::sum(std::iter::once(E::Accept).chain(data.iter().map(|d| {
        E::prefix(
            ActionLabel::receive(Port::new(input), Arg::bare(DataSymbol::new(*d))),
            E::parallel(
                E::Ident(ident.clone()),
                E::choice(
                    E::Accept,
                    E::prefix(
                        ActionLabel::send(Port::new(output), Arg::bare(DataSymbol::new(*d))),
                        E::Accept,
                    ),
                ),
            ),
        )
    })));
    RecSpec::new(
        name,
        [(ident.clone(), body)],
        ident,
        data.iter().map(|d| DataSymbol::new(*d)),
        [Port::new(input), Port::new(output)],
        None,
    )
    .expect("AB^io is closed")
}

/// The unguarded equation `X = a . 1 + X || b . 1`, whose root necessarily
/// branches unboundedly.
pub fn unguarded_example() -> RecSpec {
    RecSpec::single(
        "unguarded",
        "X",
        E::choice(
            E::prefix(plain("a"), E::Accept),
            E::parallel(E::ident("X"), E::prefix(plain("b"), E::Accept)),
        ),
    )
}

/// All named builtin specifications, over the default data alphabet `{d}`
/// and ports `i`/`o` where applicable.
pub fn builtin_specs() -> BTreeMap<String, RecSpec> {
    let mut map = BTreeMap::new();
    for spec in [
        ac(),
        ec(),
        ab(&["d"]),
        abag(&["d"]),
        abag_io(&["d"], "i", "o"),
        ebag_io(&["d"], "i", "o"),
        ab_io(&["d"], "i", "o"),
        unguarded_example(),
    ] {
        map.insert(spec.name().to_string(), spec);
    }
    map
}
