//! Character-level parsing helpers shared by the `.ppda` and `.spec`
//! readers.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::foundations::{ActionLabel, Arg, Bag, DataSymbol, Polarity, Port};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub struct Cursor<'a> {
    rest: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(input: &'a str) -> Self {
        Cursor { rest: input, line: 1, column: 1 }
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError { line: self.line, column: self.column, message: message.into() }
    }

    fn advance(&mut self, len: usize) {
        let (consumed, rest) = self.rest.split_at(len);
        for c in consumed.chars() {
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
        self.rest = rest;
    }

    pub fn skip_ws(&mut self) {
        loop {
            let trimmed = self.rest.trim_start_matches([' ', '\t', '\r', '\n']);
            let ws = self.rest.len() - trimmed.len();
            if ws > 0 {
                self.advance(ws);
            }
            if self.rest.starts_with('#') {
                let end = self.rest.find('\n').unwrap_or(self.rest.len());
                self.advance(end);
                continue;
            }
            break;
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest.is_empty()
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest.chars().next()
    }

    /// Peeks without skipping whitespace, for token-internal lookahead.
    pub fn peek_raw(&self) -> Option<char> {
        self.rest.chars().next()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.advance(c.len_utf8());
            true
        } else {
            false
        }
    }

    pub fn eat_raw(&mut self, c: char) -> bool {
        if self.peek_raw() == Some(c) {
            self.advance(c.len_utf8());
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c)))
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest.starts_with(s) {
            self.advance(s.len());
            true
        } else {
            false
        }
    }

    pub fn expect_str(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.eat_str(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", s)))
        }
    }

    fn is_ident_char(c: char) -> bool {
        c.is_ascii_alphanumeric() || c == '_'
    }

    /// An identifier: letters, digits and underscores.
    pub fn ident(&mut self) -> Result<String, SyntaxError> {
        self.skip_ws();
        let end = self
            .rest
            .char_indices()
            .find(|(_, c)| !Self::is_ident_char(*c))
            .map(|(i, _)| i)
            .unwrap_or(self.rest.len());
        if end == 0 {
            return Err(self.error("expected an identifier"));
        }
        let word = self.rest[..end].to_string();
        self.advance(end);
        Ok(word)
    }

    /// Identifier without leading whitespace skip (token-internal).
    fn ident_raw(&mut self) -> Result<String, SyntaxError> {
        let end = self
            .rest
            .char_indices()
            .find(|(_, c)| !Self::is_ident_char(*c))
            .map(|(i, _)| i)
            .unwrap_or(self.rest.len());
        if end == 0 {
            return Err(self.error("expected an identifier"));
        }
        let word = self.rest[..end].to_string();
        self.advance(end);
        Ok(word)
    }

    fn arg_raw(&mut self) -> Result<Arg, SyntaxError> {
        let polarity = if self.eat_raw('+') {
            Polarity::Plus
        } else if self.eat_raw('-') {
            Polarity::Minus
        } else {
            Polarity::Bare
        };
        let symbol = DataSymbol::new(self.ident_raw()?);
        Ok(Arg { symbol, polarity })
    }

    /// An action label. Names listed in `ports` parenthesised with an
    /// argument are read as completed communications `c(d)`; other
    /// parenthesised names are plain parametrised actions.
    pub fn label(&mut self, ports: &BTreeSet<String>) -> Result<ActionLabel, SyntaxError> {
        let name = self.ident()?;
        self.label_continue(name, ports)
    }

    /// Finishes parsing a label whose leading name has already been read.
    pub fn label_continue(
        &mut self,
        name: String,
        ports: &BTreeSet<String>,
    ) -> Result<ActionLabel, SyntaxError> {
        if name == "tau" {
            return Ok(ActionLabel::tau());
        }
        match self.peek_raw() {
            Some('!') => {
                self.eat_raw('!');
                Ok(ActionLabel::send(Port::new(name), self.arg_raw()?))
            }
            Some('?') => {
                self.eat_raw('?');
                if self.eat_raw('?') {
                    if self.eat_raw('+') {
                        Ok(ActionLabel::get(Port::new(name), DataSymbol::new(self.ident_raw()?)))
                    } else if self.eat_raw('-') {
                        Ok(ActionLabel::failed_get(
                            Port::new(name),
                            DataSymbol::new(self.ident_raw()?),
                        ))
                    } else {
                        Err(self.error("expected `+` or `-` after `??`"))
                    }
                } else {
                    Ok(ActionLabel::receive(Port::new(name), self.arg_raw()?))
                }
            }
            Some('(') => {
                self.eat_raw('(');
                let arg = self.arg_raw()?;
                if !self.eat_raw(')') {
                    return Err(self.error("expected `)` closing the action argument"));
                }
                if ports.contains(&name) {
                    Ok(ActionLabel::comm(Port::new(name), arg))
                } else {
                    Ok(ActionLabel::Plain { name, arg: Some(arg) })
                }
            }
            _ => Ok(ActionLabel::plain(name)),
        }
    }

    /// A bag literal: `{d,d,e}` or `{}`.
    pub fn bag(&mut self) -> Result<Bag, SyntaxError> {
        self.expect('{')?;
        let mut bag = Bag::empty();
        if self.eat('}') {
            return Ok(bag);
        }
        loop {
            bag.add(DataSymbol::new(self.ident()?));
            if self.eat(',') {
                continue;
            }
            self.expect('}')?;
            return Ok(bag);
        }
    }

    /// Comma-separated identifiers terminated by `;`; the list may be empty.
    pub fn ident_list(&mut self) -> Result<Vec<String>, SyntaxError> {
        let mut out = Vec::new();
        if self.eat(';') {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if self.eat(',') {
                continue;
            }
            self.expect(';')?;
            return Ok(out);
        }
    }
}

impl fmt::Debug for Cursor<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cursor(line {}, column {})", self.line, self.column)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_label(s: &str) -> ActionLabel {
        let mut cursor = Cursor::new(s);
        cursor.label(&["c", "p"].map(str::to_string).into_iter().collect()).unwrap()
    }

    #[test]
    fn label_forms() {
        assert_eq!(parse_label("a"), ActionLabel::plain("a"));
        assert_eq!(parse_label("tau"), ActionLabel::tau());
        assert_eq!(
            parse_label("c!d"),
            ActionLabel::send(Port::new("c"), Arg::bare(DataSymbol::new("d")))
        );
        assert_eq!(
            parse_label("o!+d"),
            ActionLabel::send(Port::new("o"), Arg::plus(DataSymbol::new("d")))
        );
        assert_eq!(
            parse_label("c?d"),
            ActionLabel::receive(Port::new("c"), Arg::bare(DataSymbol::new("d")))
        );
        assert_eq!(
            parse_label("c??+d"),
            ActionLabel::get(Port::new("c"), DataSymbol::new("d"))
        );
        assert_eq!(
            parse_label("c??-d"),
            ActionLabel::failed_get(Port::new("c"), DataSymbol::new("d"))
        );
        // declared port: completed communication; otherwise parametrised
        assert_eq!(
            parse_label("c(d)"),
            ActionLabel::comm(Port::new("c"), Arg::bare(DataSymbol::new("d")))
        );
        assert_eq!(
            parse_label("show(-d)"),
            ActionLabel::plain_arg("show", Arg::minus(DataSymbol::new("d")))
        );
    }

    #[test]
    fn labels_round_trip_through_display() {
        for text in ["a", "tau", "c!d", "c?d", "c(d)", "c??+d", "c??-d", "ins(d)", "o!-d"] {
            let label = parse_label(text);
            assert_eq!(label.to_string(), *text);
        }
    }

    #[test]
    fn bag_literals() {
        let mut cursor = Cursor::new("{d,d,e}");
        let bag = cursor.bag().unwrap();
        assert_eq!(bag.to_string(), "{d,d,e}");
        let mut cursor = Cursor::new("{}");
        assert!(cursor.bag().unwrap().is_empty());
    }

    #[test]
    fn errors_carry_positions() {
        let mut cursor = Cursor::new("abc\n  !");
        cursor.ident().unwrap();
        let err = cursor.ident().unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }
}
