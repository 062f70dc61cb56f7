//! Atoms, formulas and sequents.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Prefix reserved for machine-generated atoms. The surface syntax never
/// produces it, so fresh atoms cannot collide with user input.
pub const RESERVED_PREFIX: char = '#';

/// A primitive type.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Atom {
        Atom(Arc::from(name))
    }

    /// Build a reserved atom `#<suffix>`.
    pub fn fresh(suffix: &str) -> Atom {
        Atom(Arc::from(format!("{RESERVED_PREFIX}{suffix}")))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_reserved(&self) -> bool {
        self.0.starts_with(RESERVED_PREFIX)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Atom, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Atom::new(&s))
    }
}

/// A type of the calculus.
///
/// `Over(b, a)` is written `b/a` and `Under(a, b)` is written `a\b`; in both
/// cases `b` is the numerator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(Atom),
    Over(Box<Formula>, Box<Formula>),
    Under(Box<Formula>, Box<Formula>),
    Bang(Box<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Formula {
        Formula::Var(Atom::new(name))
    }

    pub fn atom(a: &Atom) -> Formula {
        Formula::Var(a.clone())
    }

    /// `numerator / denominator`
    pub fn over(numerator: Formula, denominator: Formula) -> Formula {
        Formula::Over(Box::new(numerator), Box::new(denominator))
    }

    /// `denominator \ numerator`
    pub fn under(denominator: Formula, numerator: Formula) -> Formula {
        Formula::Under(Box::new(denominator), Box::new(numerator))
    }

    pub fn bang(body: Formula) -> Formula {
        Formula::Bang(Box::new(body))
    }

    pub fn is_bang(&self) -> bool {
        matches!(self, Formula::Bang(_))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    pub fn as_var(&self) -> Option<&Atom> {
        match self {
            Formula::Var(a) => Some(a),
            _ => None,
        }
    }

    pub fn bang_body(&self) -> Option<&Formula> {
        match self {
            Formula::Bang(b) => Some(b),
            _ => None,
        }
    }

    /// Number of variable and connective occurrences.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::Over(a, b) | Formula::Under(a, b) => a.size() + b.size() + 1,
            Formula::Bang(a) => a.size() + 1,
        }
    }

    pub fn contains_bang(&self) -> bool {
        match self {
            Formula::Var(_) => false,
            Formula::Over(a, b) | Formula::Under(a, b) => a.contains_bang() || b.contains_bang(),
            Formula::Bang(_) => true,
        }
    }

    pub fn contains_under(&self) -> bool {
        match self {
            Formula::Var(_) => false,
            Formula::Over(a, b) => a.contains_under() || b.contains_under(),
            Formula::Under(..) => true,
            Formula::Bang(a) => a.contains_under(),
        }
    }

    /// True when every `!` in the formula is applied to a variable.
    pub fn bang_on_vars_only(&self) -> bool {
        match self {
            Formula::Var(_) => true,
            Formula::Over(a, b) | Formula::Under(a, b) => {
                a.bang_on_vars_only() && b.bang_on_vars_only()
            }
            Formula::Bang(a) => a.is_var(),
        }
    }

    /// Calls `f` on every atom occurrence, left to right.
    pub fn for_each_atom<F: FnMut(&Atom)>(&self, f: &mut F) {
        match self {
            Formula::Var(a) => f(a),
            Formula::Over(a, b) | Formula::Under(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
            Formula::Bang(a) => a.for_each_atom(f),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Minimal-parenthesis rendering: both operands of a division are terms, so a
/// division operand gets parentheses; `!` binds tightest.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn term(x: &Formula, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match x {
                Formula::Over(..) | Formula::Under(..) => write!(f, "({x})"),
                _ => write!(f, "{x}"),
            }
        }
        match self {
            Formula::Var(a) => write!(f, "{a}"),
            Formula::Over(num, den) => {
                term(num, f)?;
                f.write_str("/")?;
                term(den, f)
            }
            Formula::Under(den, num) => {
                term(den, f)?;
                f.write_str("\\")?;
                term(num, f)
            }
            Formula::Bang(a) => {
                f.write_str("!")?;
                term(a, f)
            }
        }
    }
}

/// `Π → A` with an ordered antecedent.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub succedent: Formula,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Formula) -> Sequent {
        Sequent {
            antecedent,
            succedent,
        }
    }

    pub fn size(&self) -> usize {
        self.antecedent.iter().map(Formula::size).sum::<usize>() + self.succedent.size()
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent
            .iter()
            .chain(std::iter::once(&self.succedent))
    }

    pub fn contains_bang(&self) -> bool {
        self.formulas().any(Formula::contains_bang)
    }

    pub fn classify(&self) -> FragmentFlags {
        FragmentFlags {
            bang_free: !self.contains_bang(),
            one_division: !self.formulas().any(Formula::contains_under),
            bang_on_vars_only: self.formulas().all(Formula::bang_on_vars_only),
        }
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        if self.antecedent.is_empty() {
            write!(f, "-> {}", self.succedent)
        } else {
            write!(f, " -> {}", self.succedent)
        }
    }
}

/// Which syntactic fragment a sequent belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FragmentFlags {
    pub bang_free: bool,
    /// Only `/` occurs.
    pub one_division: bool,
    /// Every `!` is applied to a variable.
    pub bang_on_vars_only: bool,
}
