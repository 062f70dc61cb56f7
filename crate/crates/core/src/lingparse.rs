//! Categorial-grammar parsing: a sentence parses as `B` when some choice of
//! lexical types `A1, …, An` for its words makes `A1, …, An -> B` derivable
//! in `!L*`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::calculus::System;
use crate::formula::{Formula, Sequent};
use crate::grammar::strip_comment;
use crate::prover::{decide_restricted, prove, Budget, ProveResult};
use crate::syntax::{parse_formula, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("line {line}: expected `word: formula`")]
    Shape { line: usize },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: ParseError },
    #[error("unknown word `{0}`")]
    UnknownWord(String),
    #[error("empty word")]
    EmptyWord,
}

/// Words and their types. A word may have several types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, Vec<Formula>>,
}

impl Lexicon {
    pub fn new() -> Lexicon {
        Lexicon::default()
    }

    /// Adds a type for `word`; repeated types are kept once.
    pub fn insert(&mut self, word: &str, ty: Formula) -> Result<(), LexiconError> {
        if word.is_empty() {
            return Err(LexiconError::EmptyWord);
        }
        let types = self.entries.entry(word.to_string()).or_default();
        if !types.contains(&ty) {
            types.push(ty);
        }
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[Formula]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lines `word: formula`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let (word, ty) = line
                .split_once(':')
                .ok_or(LexiconError::Shape { line: i + 1 })?;
            let word = word.trim();
            if word.is_empty() || word.contains(char::is_whitespace) {
                return Err(LexiconError::Shape { line: i + 1 });
            }
            let ty = parse_formula(ty.trim()).map_err(|source| LexiconError::Formula {
                line: i + 1,
                source,
            })?;
            lex.insert(word, ty)?;
        }
        Ok(lex)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, types) in &self.entries {
            for t in types {
                out.push_str(&format!("{w}: {t}\n"));
            }
        }
        out
    }
}

/// Types for a small fragment of English.
pub fn builtin_lexicon() -> Lexicon {
    const ENTRIES: &[(&[&str], &str)] = &[
        (&["John", "Pete", "Mary", "Ann"], "np"),
        (&["person", "paper", "book"], "n"),
        (&["the"], "np/n"),
        (&["met", "likes", "reads", "signed"], "(np\\s)/np"),
        (&["runs", "sleeps"], "np\\s"),
        (&["yesterday", "today"], "(np\\s)\\(np\\s)"),
        (&["whom", "that"], "(n\\n)/(s/!np)"),
        (&["without"], "((np\\s)/(np\\s))/np"),
        (&["reading"], "np/np"),
    ];
    let mut lex = Lexicon::new();
    for (words, ty) in ENTRIES {
        let ty = parse_formula(ty).expect("builtin type");
        for w in *words {
            lex.insert(w, ty.clone()).expect("builtin word");
        }
    }
    lex
}

/// One sequent per choice of types, in lexicographic order of the choices.
pub fn sentence_to_sequents<S: AsRef<str>>(
    words: &[S],
    lex: &Lexicon,
    target: &Formula,
) -> Result<Vec<Sequent>, LexiconError> {
    let mut choices: Vec<&[Formula]> = Vec::new();
    for w in words {
        let w = w.as_ref();
        choices.push(
            lex.get(w)
                .ok_or_else(|| LexiconError::UnknownWord(w.to_string()))?,
        );
    }
    let mut out = vec![Vec::new()];
    for types in choices {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Formula>| {
                types.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
    }
    Ok(out
        .into_iter()
        .map(|ant| Sequent::new(ant, target.clone()))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseOutcome {
    pub sequent: Sequent,
    pub result: ProveResult,
}

impl fmt::Display for ParseOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}  {}", self.result.verdict(), self.sequent)
    }
}

/// Proves every candidate sequent in `!L*`. Sequents with `!` on variables
/// only are decided; the rest are searched within `budget`.
pub fn parse_sentence<S: AsRef<str>>(
    words: &[S],
    lex: &Lexicon,
    target: &Formula,
    budget: &Budget,
) -> Result<Vec<ParseOutcome>, LexiconError> {
    let sys = System::bang_lstar();
    Ok(sentence_to_sequents(words, lex, target)?
        .into_iter()
        .map(|sequent| {
            let result = match decide_restricted(&sequent) {
                Ok(r) => r,
                Err(_) => prove(&sequent, &sys, budget),
            };
            ParseOutcome { sequent, result }
        })
        .collect())
}

/// Whether some outcome is derivable.
pub fn parses(outcomes: &[ParseOutcome]) -> bool {
    outcomes.iter().any(|o| o.result.is_derivable())
}
