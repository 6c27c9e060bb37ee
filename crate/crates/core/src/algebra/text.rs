//! Textual format for recursive specifications.
//!
//! ```text
//! spec ABag {
//!   data: d;
//!   ports: ;
//!   priority { show(-d) < rem(d); show(-d) < tau; }
//!   init: ABag;
//!   ABag = 1 + ins(d) . theta(ABag || (1 + rem(d) . 1)) + show(-d) . ABag;
//! }
//! ```
//!
//! Operators: `0`, `1`, `.` (prefix), `+`, `||`, `theta(p)`,
//! `rho[a -> b](p)`, `encap[c](p)`, `hide[c](p)`. Sections must appear in
//! the order data, ports, priority, init, equations; all but the equations
//! may be omitted. The names `0`, `1`, `tau`, `theta`, `rho`, `encap` and
//! `hide` are reserved.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::foundations::{DataSymbol, Port, PriorityOrder, Renaming};
use crate::textutil::{Cursor, SyntaxError};

use super::{Identifier, ProcessExpr, RecSpec, SpecError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpecParseError {
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("in spec `{name}`: {error}")]
    Semantic { name: String, error: SpecError },
    #[error("in spec `{name}`: invalid priority order: {error}")]
    Priority { name: String, error: Box<crate::foundations::PriorityError> },
    #[error("in spec `{name}`: invalid renaming: {error}")]
    Renaming { name: String, error: crate::foundations::RenamingError },
}

const RESERVED: [&str; 7] = ["0", "1", "tau", "theta", "rho", "encap", "hide"];

/// Parses every `spec` block in the input.
pub fn parse_spec_file(input: &str) -> Result<Vec<RecSpec>, SpecParseError> {
    let mut cursor = Cursor::new(input);
    let mut out = Vec::new();
    while !cursor.at_end() {
        cursor.expect_str("spec").map_err(SpecParseError::Syntax)?;
        out.push(parse_block(&mut cursor)?);
    }
    Ok(out)
}

struct BlockParser<'a, 'b> {
    cursor: &'a mut Cursor<'b>,
    name: String,
    ports: BTreeSet<String>,
}

fn parse_block(cursor: &mut Cursor<'_>) -> Result<RecSpec, SpecParseError> {
    let name = cursor.ident()?;
    cursor.expect('{')?;
    let mut parser = BlockParser { cursor, name: name.clone(), ports: BTreeSet::new() };

    let mut data: Vec<String> = Vec::new();
    let mut priority: Option<PriorityOrder> = None;
    let mut initial: Option<String> = None;
    let mut equations: Vec<(Identifier, ProcessExpr)> = Vec::new();

    loop {
        if parser.cursor.eat('}') {
            break;
        }
        let word = parser.cursor.ident()?;
        match word.as_str() {
            "data" => {
                parser.cursor.expect(':')?;
                data = parser.cursor.ident_list()?;
            }
            "ports" => {
                parser.cursor.expect(':')?;
                parser.ports = parser.cursor.ident_list()?.into_iter().collect();
            }
            "priority" => {
                parser.cursor.expect('{')?;
                let mut pairs = Vec::new();
                while !parser.cursor.eat('}') {
                    let lower = parser.cursor.label(&parser.ports)?;
                    parser.cursor.expect('<')?;
                    let upper = parser.cursor.label(&parser.ports)?;
                    parser.cursor.expect(';')?;
                    pairs.push((lower, upper));
                }
                priority = Some(PriorityOrder::new(pairs).map_err(|error| {
                    SpecParseError::Priority { name: name.clone(), error: Box::new(error) }
                })?);
            }
            "init" => {
                parser.cursor.expect(':')?;
                initial = Some(parser.cursor.ident()?);
                parser.cursor.expect(';')?;
            }
            lhs => {
                if RESERVED.contains(&lhs) {
                    return Err(parser
                        .cursor
                        .error(format!("`{}` is reserved and cannot define an equation", lhs))
                        .into());
                }
                parser.cursor.expect('=')?;
                let body = parser.expr()?;
                parser.cursor.expect(';')?;
                equations.push((Identifier::new(lhs), body));
            }
        }
    }

    let initial = match initial {
        Some(i) => i,
        None => match equations.first() {
            Some((x, _)) => x.name().to_string(),
            None => {
                return Err(parser
                    .cursor
                    .error(format!("spec `{}` has no equations", name))
                    .into())
            }
        },
    };
    RecSpec::new(
        name.clone(),
        equations,
        Identifier::new(initial),
        data.into_iter().map(DataSymbol::new),
        parser.ports.iter().map(Port::new),
        priority,
    )
    .map_err(|error| SpecParseError::Semantic { name, error })
}

impl BlockParser<'_, '_> {
    fn expr(&mut self) -> Result<ProcessExpr, SpecParseError> {
        let mut result = self.par()?;
        while self.cursor.eat('+') {
            let rhs = self.par()?;
            result = ProcessExpr::choice(result, rhs);
        }
        Ok(result)
    }

    fn par(&mut self) -> Result<ProcessExpr, SpecParseError> {
        let mut result = self.item()?;
        while self.cursor.eat_str("||") {
            let rhs = self.item()?;
            result = ProcessExpr::parallel(result, rhs);
        }
        Ok(result)
    }

    fn item(&mut self) -> Result<ProcessExpr, SpecParseError> {
        if self.cursor.eat('(') {
            let inner = self.expr()?;
            self.cursor.expect(')')?;
            return Ok(inner);
        }
        let word = self.cursor.ident()?;
        match word.as_str() {
            "0" => Ok(ProcessExpr::Deadlock),
            "1" => Ok(ProcessExpr::Accept),
            "theta" => {
                self.cursor.expect('(')?;
                let inner = self.expr()?;
                self.cursor.expect(')')?;
                Ok(ProcessExpr::theta(inner))
            }
            "rho" => {
                self.cursor.expect('[')?;
                let mut pairs = Vec::new();
                if !self.cursor.eat(']') {
                    loop {
                        let from = self.cursor.label(&self.ports)?;
                        self.cursor.expect_str("->")?;
                        let to = self.cursor.label(&self.ports)?;
                        pairs.push((from, to));
                        if self.cursor.eat(',') {
                            continue;
                        }
                        self.cursor.expect(']')?;
                        break;
                    }
                }
                let renaming = Renaming::new(pairs).map_err(|error| {
                    SpecParseError::Renaming { name: self.name.clone(), error }
                })?;
                self.cursor.expect('(')?;
                let inner = self.expr()?;
                self.cursor.expect(')')?;
                Ok(ProcessExpr::rename(renaming, inner))
            }
            "encap" | "hide" => {
                let is_encap = word == "encap";
                self.cursor.expect('[')?;
                let mut ports = Vec::new();
                if !self.cursor.eat(']') {
                    loop {
                        ports.push(Port::new(self.cursor.ident()?));
                        if self.cursor.eat(',') {
                            continue;
                        }
                        self.cursor.expect(']')?;
                        break;
                    }
                }
                self.cursor.expect('(')?;
                let inner = self.expr()?;
                self.cursor.expect(')')?;
                Ok(if is_encap {
                    ProcessExpr::encap(ports, inner)
                } else {
                    ProcessExpr::hide(ports, inner)
                })
            }
            name => {
                let label = self.cursor.label_continue(name.to_string(), &self.ports)?;
                if self.cursor.eat('.') {
                    let target = self.item()?;
                    Ok(ProcessExpr::prefix(label, target))
                } else {
                    match label {
                        crate::foundations::ActionLabel::Plain { name, arg: None } => {
                            Ok(ProcessExpr::Ident(Identifier::new(name)))
                        }
                        other => Err(self
                            .cursor
                            .error(format!(
                                "expected `.` after action label `{}` (bare references must be plain identifiers)",
                                other
                            ))
                            .into()),
                    }
                }
            }
        }
    }
}

/// Deterministic printer; `parse_spec_file(print_spec(s))` yields `s` again.
pub fn print_spec(spec: &RecSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "spec {} {{", spec.name());
    let _ = writeln!(
        out,
        "  data: {};",
        spec.data().iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
    );
    let _ = writeln!(
        out,
        "  ports: {};",
        spec.ports().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
    );
    if let Some(order) = spec.priority() {
        let _ = writeln!(out, "  priority {{");
        for (a, b) in order.pairs() {
            let _ = writeln!(out, "    {} < {};", a, b);
        }
        let _ = writeln!(out, "  }}");
    }
    let _ = writeln!(out, "  init: {};", spec.initial());
    for (x, body) in spec.equations() {
        let _ = writeln!(out, "  {} = {};", x, body);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin_specs;

    #[test]
    fn builtins_round_trip() {
        for (name, spec) in builtin_specs() {
            let printed = print_spec(&spec);
            let parsed = parse_spec_file(&printed)
                .unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
            assert_eq!(parsed.len(), 1, "{name}");
            assert_eq!(&parsed[0], &spec, "round-trip failed for {name}\n{printed}");
        }
    }

    #[test]
    fn ac_source_parses() {
        let text = "spec AC { init: AC; AC = 1 + a . (AC || (1 + b . 1)); }";
        let parsed = parse_spec_file(text).unwrap();
        assert_eq!(parsed[0], crate::algebra::ac());
    }

    #[test]
    fn undefined_identifier_is_semantic_error() {
        let text = "spec Bad { init: X; X = a . Y; }";
        let err = parse_spec_file(text).unwrap_err();
        assert!(matches!(err, SpecParseError::Semantic { .. }), "{err}");
    }

    #[test]
    fn init_defaults_to_first_equation() {
        let text = "spec S { X = a . 1; Y = b . 1; }";
        let parsed = parse_spec_file(text).unwrap();
        assert_eq!(parsed[0].initial(), &Identifier::new("X"));
    }

    #[test]
    fn operator_precedence() {
        let text = "spec P { X = a . 1 + b . 1 || c . 1; }";
        let parsed = parse_spec_file(text).unwrap();
        use ProcessExpr as E;
        use crate::foundations::ActionLabel;
        let a = |n: &str| ActionLabel::plain(n);
        let expected = E::choice(
            E::prefix(a("a"), E::Accept),
            E::parallel(E::prefix(a("b"), E::Accept), E::prefix(a("c"), E::Accept)),
        );
        assert_eq!(parsed[0].body(&Identifier::new("X")).unwrap(), &expected);
    }

    #[test]
    fn ports_classify_comm_labels() {
        let text = "spec C { ports: c; X = c(d) . 1; }";
        let parsed = parse_spec_file(text).unwrap();
        use crate::foundations::{ActionLabel, Arg, DataSymbol, Port};
        let expected = ProcessExpr::prefix(
            ActionLabel::comm(Port::new("c"), Arg::bare(DataSymbol::new("d"))),
            ProcessExpr::Accept,
        );
        assert_eq!(parsed[0].body(&Identifier::new("X")).unwrap(), &expected);
    }
}
