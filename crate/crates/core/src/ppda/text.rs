//! Textual format for parallel pushdown automata.
//!
//! ```text
//! ppda Counter {
//!   data: 1;
//!   states: s0;
//!   initial: s0;
//!   accepting: s0;
//!   trans: s0 -a[-1/{1}]-> s0;
//! }
//! ```
//!
//! An optional `ports:` section (before the transitions) declares the names
//! whose parenthesised labels are completed communications `c(d)`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::foundations::DataSymbol;
use crate::textutil::{Cursor, SyntaxError};

use super::{Ppda, PpdaError, PpdaTransition, StateName, TransitionTest};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PpdaParseError {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("in ppda `{name}`: {error}")]
    Semantic { name: String, error: PpdaError },
}

/// Parses every `ppda` block in the input.
pub fn parse_ppda_file(input: &str) -> Result<Vec<Ppda>, PpdaParseError> {
    let mut cursor = Cursor::new(input);
    let mut out = Vec::new();
    while !cursor.at_end() {
        cursor.expect_str("ppda").map_err(PpdaParseError::Syntax)?;
        out.push(parse_block(&mut cursor)?);
    }
    Ok(out)
}

fn parse_block(cursor: &mut Cursor<'_>) -> Result<Ppda, PpdaParseError> {
    let name = cursor.ident()?;
    cursor.expect('{')?;
    let mut data: Vec<String> = Vec::new();
    let mut states: Vec<String> = Vec::new();
    let mut initial: Option<String> = None;
    let mut accepting: Vec<String> = Vec::new();
    let mut transitions: Vec<PpdaTransition> = Vec::new();
    let mut ports: BTreeSet<String> = BTreeSet::new();

    loop {
        if cursor.eat('}') {
            break;
        }
        let section = cursor.ident()?;
        cursor.expect(':')?;
        match section.as_str() {
            "data" => data = cursor.ident_list()?,
            "states" => states = cursor.ident_list()?,
            "ports" => ports = cursor.ident_list()?.into_iter().collect(),
            "initial" => {
                initial = Some(cursor.ident()?);
                cursor.expect(';')?;
            }
            "accepting" => accepting = cursor.ident_list()?,
            "trans" => {
                let source = cursor.ident()?;
                cursor.expect('-')?;
                let label = cursor.label(&ports)?;
                cursor.expect('[')?;
                let test = if cursor.eat('+') {
                    TransitionTest::Present(DataSymbol::new(cursor.ident()?))
                } else if cursor.eat('-') {
                    TransitionTest::Absent(DataSymbol::new(cursor.ident()?))
                } else {
                    return Err(cursor.error("expected `+` or `-` opening the bag test").into());
                };
                cursor.expect('/')?;
                let payload = cursor.bag()?;
                cursor.expect(']')?;
                cursor.expect_str("->")?;
                let target = cursor.ident()?;
                cursor.expect(';')?;
                transitions.push(PpdaTransition {
                    source: StateName::new(source),
                    label,
                    test,
                    payload,
                    target: StateName::new(target),
                });
            }
            other => {
                return Err(cursor
                    .error(format!("unknown section `{}` in ppda block", other))
                    .into())
            }
        }
    }

    let initial = match initial {
        Some(i) => i,
        None => {
            return Err(cursor.error(format!("ppda `{}` declares no initial state", name)).into())
        }
    };
    Ppda::new(
        name.clone(),
        states.into_iter().map(StateName::new),
        data.into_iter().map(DataSymbol::new),
        transitions,
        StateName::new(initial),
        accepting.into_iter().map(StateName::new),
    )
    .map_err(|error| PpdaParseError::Semantic { name, error })
}

/// Deterministic printer; `parse_ppda_file(print_ppda(m))` yields `m` again.
pub fn print_ppda(m: &Ppda) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "ppda {} {{", m.name());
    let list = |items: Vec<String>| items.join(", ");
    let _ = writeln!(out, "  data: {};", list(m.data().iter().map(|d| d.to_string()).collect()));
    let _ = writeln!(
        out,
        "  states: {};",
        list(m.states().iter().map(|s| s.to_string()).collect())
    );
    let ports: BTreeSet<String> = m
        .transitions()
        .iter()
        .filter_map(|t| t.label.port().map(|p| p.to_string()))
        .collect();
    if !ports.is_empty() {
        let _ = writeln!(out, "  ports: {};", list(ports.into_iter().collect()));
    }
    let _ = writeln!(out, "  initial: {};", m.initial());
    let _ = writeln!(
        out,
        "  accepting: {};",
        list(m.accepting().iter().map(|s| s.to_string()).collect())
    );
    for t in m.transitions() {
        let _ = writeln!(out, "  trans: {};", t);
    }
    out.push_str("}\n");
    out
}
