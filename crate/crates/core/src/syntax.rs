//! Text syntax for formulas and sequents.
//!
//! ```text
//! formula := term | term "/" term | term "\" term
//! term    := atom | "!" term | "(" formula ")"
//! atom    := [A-Za-z][A-Za-z0-9_']*
//! sequent := formula ("," formula)* "->" formula | "->" formula
//! ```
//!
//! Divisions do not associate: `a/b/c` is rejected. The `*_internal`
//! entry points additionally accept reserved atoms (`#...`), which only
//! appear in machine-written files such as serialized derivations.

use thiserror::Error;

use crate::formula::{Atom, Formula, Sequent, RESERVED_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {expected}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Slash,
    Backslash,
    Bang,
    LParen,
    RParen,
    Comma,
    Arrow,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("atom `{a}`"),
            Tok::Slash => "`/`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::Bang => "`!`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn is_atom_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str, allow_reserved: bool) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < bytes.len() {
        let (off, c) = bytes[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '/' => {
                out.push((off, Tok::Slash));
                i += 1;
            }
            '\\' => {
                out.push((off, Tok::Backslash));
                i += 1;
            }
            '!' => {
                out.push((off, Tok::Bang));
                i += 1;
            }
            '(' => {
                out.push((off, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((off, Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push((off, Tok::Comma));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1).map(|&(_, c)| c) == Some('>') {
                    out.push((off, Tok::Arrow));
                    i += 2;
                } else {
                    return Err(ParseError {
                        offset: off,
                        expected: "`->`".into(),
                        found: "`-`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && is_atom_char(bytes[i].1) {
                    i += 1;
                }
                let end = bytes.get(i).map_or(text.len(), |&(o, _)| o);
                out.push((off, Tok::Atom(text[bytes[start].0..end].to_string())));
            }
            c if c == RESERVED_PREFIX && allow_reserved => {
                i += 1;
                while i < bytes.len() && (is_atom_char(bytes[i].1) || bytes[i].1 == '~') {
                    i += 1;
                }
                let end = bytes.get(i).map_or(text.len(), |&(o, _)| o);
                if end == off + 1 {
                    return Err(ParseError {
                        offset: off,
                        expected: "reserved atom name".into(),
                        found: "`#`".into(),
                    });
                }
                out.push((off, Tok::Atom(text[off..end].to_string())));
            }
            other => {
                return Err(ParseError {
                    offset: off,
                    expected: "atom, `!`, `(`, `/`, `\\`, `,` or `->`".into(),
                    found: format!("`{other}`"),
                })
            }
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let left = self.term()?;
        match self.peek() {
            Tok::Slash => {
                self.bump();
                let right = self.term()?;
                self.no_chain()?;
                Ok(Formula::over(left, right))
            }
            Tok::Backslash => {
                self.bump();
                let right = self.term()?;
                self.no_chain()?;
                Ok(Formula::under(left, right))
            }
            _ => Ok(left),
        }
    }

    fn no_chain(&self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Slash | Tok::Backslash) {
            Err(self.error("parentheses around a nested division"))
        } else {
            Ok(())
        }
    }

    fn term(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Atom(name) => {
                self.bump();
                Ok(Formula::Var(Atom::new(&name)))
            }
            Tok::Bang => {
                self.bump();
                Ok(Formula::bang(self.term()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            _ => Err(self.error("atom, `!` or `(`")),
        }
    }

    fn sequent(&mut self) -> Result<Sequent, ParseError> {
        let mut antecedent = Vec::new();
        if *self.peek() != Tok::Arrow {
            antecedent.push(self.formula()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                antecedent.push(self.formula()?);
            }
        }
        self.expect(Tok::Arrow, "`,` or `->`")?;
        let succedent = self.formula()?;
        Ok(Sequent::new(antecedent, succedent))
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }
}

fn parse_with<T>(
    text: &str,
    allow_reserved: bool,
    f: impl FnOnce(&mut Parser) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let mut p = Parser {
        toks: lex(text, allow_reserved)?,
        pos: 0,
    };
    let v = f(&mut p)?;
    p.finish()?;
    Ok(v)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, false, Parser::formula)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    parse_with(text, false, Parser::sequent)
}

/// Like [`parse_formula`] but also accepts reserved `#` atoms.
pub fn parse_formula_internal(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, true, Parser::formula)
}

/// Like [`parse_sequent`] but also accepts reserved `#` atoms.
pub fn parse_sequent_internal(text: &str) -> Result<Sequent, ParseError> {
    parse_with(text, true, Parser::sequent)
}

/// Parses a bare atom (used by line-oriented file formats).
pub fn parse_atom_internal(text: &str) -> Result<Atom, ParseError> {
    match parse_formula_internal(text)? {
        Formula::Var(a) => Ok(a),
        other => Err(ParseError {
            offset: 0,
            expected: "atom".into(),
            found: format!("`{other}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(s: &str) -> Formula {
        Formula::var(s)
    }

    #[test]
    fn parses_examples() {
        assert_eq!(parse_formula("p").unwrap(), v("p"));
        assert_eq!(
            parse_formula("(np\\s)/np").unwrap(),
            Formula::over(Formula::under(v("np"), v("s")), v("np"))
        );
        assert_eq!(parse_formula("!np").unwrap(), Formula::bang(v("np")));
        assert_eq!(
            parse_formula("s/!np").unwrap(),
            Formula::over(v("s"), Formula::bang(v("np")))
        );
        assert_eq!(parse_formula("p'_1").unwrap(), v("p'_1"));
    }

    #[test]
    fn rejects_chained_divisions() {
        let err = parse_formula("a/b/c").unwrap_err();
        assert_eq!(err.offset, 3);
        assert!(parse_formula("a/b\\c").is_err());
        assert!(parse_formula("(a/b)/c").is_ok());
    }

    #[test]
    fn error_offsets() {
        let err = parse_formula("p/").unwrap_err();
        assert_eq!(err.offset, 2);
        assert_eq!(err.found, "end of input");
        let err = parse_formula("(p").unwrap_err();
        assert_eq!(err.expected, "`)`");
        let err = parse_formula("p $").unwrap_err();
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn reserved_atoms_only_internal() {
        assert!(parse_formula("#u1").is_err());
        let f = parse_formula_internal("#s~0/#u1").unwrap();
        assert_eq!(
            f,
            Formula::over(
                Formula::atom(&Atom::fresh("s~0")),
                Formula::atom(&Atom::fresh("u1"))
            )
        );
    }

    #[test]
    fn sequents() {
        let s = parse_sequent("-> p/p").unwrap();
        assert!(s.antecedent.is_empty());
        assert_eq!(s.to_string(), "-> p/p");
        let s = parse_sequent("np, (np\\s)/np, np -> s").unwrap();
        assert_eq!(s.antecedent.len(), 3);
        assert_eq!(s.to_string(), "np, (np\\s)/np, np -> s");
        assert!(parse_sequent("p, -> q").is_err());
        assert!(parse_sequent("p q").is_err());
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![Just("p"), Just("q"), Just("np"), Just("s'")].prop_map(Formula::var);
        leaf.prop_recursive(8, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::over(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::under(a, b)),
                inner.prop_map(Formula::bang),
            ]
        })
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(f in arb_formula()) {
            prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn compound_size_exceeds_parts(f in arb_formula()) {
            match &f {
                Formula::Var(_) => prop_assert_eq!(f.size(), 1),
                Formula::Over(a, b) | Formula::Under(a, b) => {
                    prop_assert!(f.size() > a.size() && f.size() > b.size());
                    prop_assert_eq!(f.size(), a.size() + b.size() + 1);
                }
                Formula::Bang(a) => prop_assert_eq!(f.size(), a.size() + 1),
            }
        }

        #[test]
        fn classify_is_pure(fs in proptest::collection::vec(arb_formula(), 1..4)) {
            let s = Sequent::new(fs[1..].to_vec(), fs[0].clone());
            let a = s.classify();
            prop_assert_eq!(a, s.classify());
            prop_assert!(!a.bang_free || a.bang_on_vars_only);
        }
    }
}
