//! Inference systems, derivation trees and proof transformations.
//!
//! Rules are stored with enough position data that a tree can be checked
//! node by node without any search:
//!
//! ```text
//!  Γ → A   Δ1, B, Δ2 → C           Γ → A   Δ1, B, Δ2 → C
//! ----------------------- /L      ----------------------- \L
//!  Δ1, B/A, Γ, Δ2 → C              Δ1, Γ, A\B, Δ2 → C
//!
//!  Γ, A → B           A, Γ → B       Γ1, A, Γ2 → C        !A1..!An → B
//! ---------- /R      ---------- \R   -------------- !L    -------------- !R
//!  Γ → B/A            Γ → A\B        Γ1, !A, Γ2 → C       !A1..!An → !B
//!
//!  Δ1, !A, Γ, Δ2 → C        Δ1, Γ, !A, Δ2 → C       Δ1, !A, !A, Δ2 → C
//! ------------------ perm1  ------------------ perm2  ------------------ contr
//!  Δ1, Γ, !A, Δ2 → C        Δ1, !A, Γ, Δ2 → C        Δ1, !A, Δ2 → C
//! ```

mod check;
mod cut;
mod expand;
mod perm;
mod serial;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Atom, Formula, Sequent};

pub use check::{check_derivation, CheckError};
pub use cut::{eliminate_cut, eliminate_cuts, CutError};
pub use expand::backward_expansions;
pub use perm::{normalize_perm_blocks, perm_distance, permute_to, restructure};
pub use serial::{DerivationNode, SerialError};

/// Inference rule applied at a derivation node, with its position data.
///
/// All indices refer to the antecedent of the node's conclusion unless noted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleTag {
    Axiom,
    /// `(→/)`
    OverRight,
    /// `(/→)`: `principal` is the index of `B/A`, `gamma_len` the length of
    /// the `Γ` segment that follows it.
    OverLeft {
        principal: usize,
        gamma_len: usize,
    },
    /// `(→\)`
    UnderRight,
    /// `(\→)`: `principal` is the index of `A\B`, `gamma_len` the length of
    /// the `Γ` segment that precedes it.
    UnderLeft {
        principal: usize,
        gamma_len: usize,
    },
    /// `(!→)` on the formula at `index`.
    BangLeft {
        index: usize,
    },
    /// `(→!)`
    BangRight,
    /// The banged formula at `from` in the premise sits at `to >= from` in
    /// the conclusion.
    Perm1 {
        from: usize,
        to: usize,
    },
    /// The banged formula at `from` in the premise sits at `to <= from` in
    /// the conclusion.
    Perm2 {
        from: usize,
        to: usize,
    },
    /// Contraction of the two adjacent copies `index, index + 1` of the
    /// premise into the one at `index` of the conclusion.
    Contr {
        index: usize,
    },
    /// Buszkowski rule `rule` of shape B1; `split` is `|Π1|`.
    B1 {
        rule: usize,
        split: usize,
    },
    /// Buszkowski rule `rule` of shape B2.
    B2 {
        rule: usize,
    },
    /// Cut; `window` is `|Δ1|`.
    Cut {
        window: usize,
    },
}

impl RuleTag {
    pub fn arity(&self) -> usize {
        match self {
            RuleTag::Axiom => 0,
            RuleTag::OverLeft { .. }
            | RuleTag::UnderLeft { .. }
            | RuleTag::B1 { .. }
            | RuleTag::Cut { .. } => 2,
            _ => 1,
        }
    }

    pub fn is_perm(&self) -> bool {
        matches!(self, RuleTag::Perm1 { .. } | RuleTag::Perm2 { .. })
    }

    /// Logical rules introduce a connective; Buszkowski rules are counted
    /// with them.
    pub fn is_logical(&self) -> bool {
        !matches!(
            self,
            RuleTag::Axiom
                | RuleTag::Perm1 { .. }
                | RuleTag::Perm2 { .. }
                | RuleTag::Contr { .. }
                | RuleTag::Cut { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            RuleTag::Axiom => "axiom",
            RuleTag::OverRight => "/R",
            RuleTag::OverLeft { .. } => "/L",
            RuleTag::UnderRight => "\\R",
            RuleTag::UnderLeft { .. } => "\\L",
            RuleTag::BangLeft { .. } => "!L",
            RuleTag::BangRight => "!R",
            RuleTag::Perm1 { .. } => "perm1",
            RuleTag::Perm2 { .. } => "perm2",
            RuleTag::Contr { .. } => "contr",
            RuleTag::B1 { .. } => "B1",
            RuleTag::B2 { .. } => "B2",
            RuleTag::Cut { .. } => "cut",
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        match *self {
            RuleTag::OverLeft {
                principal,
                gamma_len,
            }
            | RuleTag::UnderLeft {
                principal,
                gamma_len,
            } => write!(f, "[{principal},{gamma_len}]"),
            RuleTag::BangLeft { index } | RuleTag::Contr { index } => write!(f, "[{index}]"),
            RuleTag::Perm1 { from, to } | RuleTag::Perm2 { from, to } => {
                write!(f, "[{from},{to}]")
            }
            RuleTag::B1 { rule, split } => write!(f, "[{rule},{split}]"),
            RuleTag::B2 { rule } => write!(f, "[{rule}]"),
            RuleTag::Cut { window } => write!(f, "[{window}]"),
            _ => Ok(()),
        }
    }
}

/// A derivation tree. Validity is checked by [`check_derivation`], not
/// enforced on construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub rule: RuleTag,
    pub conclusion: Sequent,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn new(rule: RuleTag, conclusion: Sequent, premises: Vec<Derivation>) -> Derivation {
        Derivation {
            rule,
            conclusion,
            premises,
        }
    }

    pub fn axiom(f: Formula) -> Derivation {
        Derivation::new(RuleTag::Axiom, Sequent::new(vec![f.clone()], f), vec![])
    }

    /// `(/→)` with principal `numerator/denominator`; `main` concludes
    /// `Δ1, numerator, Δ2 → C` with the numerator at `delta1_len`.
    pub fn over_left(
        denominator: Formula,
        delta1_len: usize,
        gamma: Derivation,
        main: Derivation,
    ) -> Derivation {
        let m = &main.conclusion;
        let principal = Formula::over(m.antecedent[delta1_len].clone(), denominator);
        let g = &gamma.conclusion.antecedent;
        let mut ant = m.antecedent[..delta1_len].to_vec();
        ant.push(principal);
        ant.extend(g.iter().cloned());
        ant.extend(m.antecedent[delta1_len + 1..].iter().cloned());
        let tag = RuleTag::OverLeft {
            principal: delta1_len,
            gamma_len: g.len(),
        };
        let succ = m.succedent.clone();
        Derivation::new(tag, Sequent::new(ant, succ), vec![gamma, main])
    }

    /// `(\→)` with principal `denominator\numerator`; `main` concludes
    /// `Δ1, numerator, Δ2 → C` with the numerator at `delta1_len`.
    pub fn under_left(
        denominator: Formula,
        delta1_len: usize,
        gamma: Derivation,
        main: Derivation,
    ) -> Derivation {
        let m = &main.conclusion;
        let principal = Formula::under(denominator, m.antecedent[delta1_len].clone());
        let g = &gamma.conclusion.antecedent;
        let mut ant = m.antecedent[..delta1_len].to_vec();
        ant.extend(g.iter().cloned());
        ant.push(principal);
        ant.extend(m.antecedent[delta1_len + 1..].iter().cloned());
        let tag = RuleTag::UnderLeft {
            principal: delta1_len + g.len(),
            gamma_len: g.len(),
        };
        let succ = m.succedent.clone();
        Derivation::new(tag, Sequent::new(ant, succ), vec![gamma, main])
    }

    /// `(→/)` discharging the last antecedent formula of `premise`.
    pub fn over_right(premise: Derivation) -> Derivation {
        let mut ant = premise.conclusion.antecedent.clone();
        let den = ant.pop().expect("(→/) premise needs a nonempty antecedent");
        let succ = Formula::over(premise.conclusion.succedent.clone(), den);
        Derivation::new(RuleTag::OverRight, Sequent::new(ant, succ), vec![premise])
    }

    /// `(→\)` discharging the first antecedent formula of `premise`.
    pub fn under_right(premise: Derivation) -> Derivation {
        let mut ant = premise.conclusion.antecedent.clone();
        assert!(!ant.is_empty(), "(→\\) premise needs a nonempty antecedent");
        let den = ant.remove(0);
        let succ = Formula::under(den, premise.conclusion.succedent.clone());
        Derivation::new(RuleTag::UnderRight, Sequent::new(ant, succ), vec![premise])
    }

    /// `(!→)` banging the formula at `index` of the premise.
    pub fn bang_left(index: usize, premise: Derivation) -> Derivation {
        let mut ant = premise.conclusion.antecedent.clone();
        ant[index] = Formula::bang(ant[index].clone());
        let succ = premise.conclusion.succedent.clone();
        Derivation::new(
            RuleTag::BangLeft { index },
            Sequent::new(ant, succ),
            vec![premise],
        )
    }

    pub fn bang_right(premise: Derivation) -> Derivation {
        let ant = premise.conclusion.antecedent.clone();
        let succ = Formula::bang(premise.conclusion.succedent.clone());
        Derivation::new(RuleTag::BangRight, Sequent::new(ant, succ), vec![premise])
    }

    /// Contraction of the adjacent copies at `index, index + 1` of the premise.
    pub fn contr(index: usize, premise: Derivation) -> Derivation {
        let mut ant = premise.conclusion.antecedent.clone();
        ant.remove(index + 1);
        let succ = premise.conclusion.succedent.clone();
        Derivation::new(
            RuleTag::Contr { index },
            Sequent::new(ant, succ),
            vec![premise],
        )
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self
            .premises
            .iter()
            .map(Derivation::depth)
            .max()
            .unwrap_or(0)
    }

    /// Number of nodes satisfying `pred`.
    pub fn count(&self, pred: &impl Fn(&RuleTag) -> bool) -> usize {
        usize::from(pred(&self.rule)) + self.premises.iter().map(|p| p.count(pred)).sum::<usize>()
    }

    pub fn is_cut_free(&self) -> bool {
        self.count(&|r| matches!(r, RuleTag::Cut { .. })) == 0
    }

    /// Pre-order list of rule tags.
    pub fn rules(&self) -> Vec<RuleTag> {
        let mut out = Vec::new();
        fn go(d: &Derivation, out: &mut Vec<RuleTag>) {
            out.push(d.rule);
            for p in &d.premises {
                go(p, out);
            }
        }
        go(self, &mut out);
        out
    }
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Indented text rendering, root first.
impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(d: &Derivation, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            writeln!(
                f,
                "{:indent$}{}  [{}]",
                "",
                d.conclusion,
                d.rule,
                indent = depth * 2
            )?;
            for p in &d.premises {
                go(p, depth + 1, f)?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}

/// One Buszkowski rule over fixed primitive types.
///
/// `B1(p, q, r)`: from `Π1 → p` and `Π2 → q` infer `Π1, Π2 → r`.
/// `B2(p, q, r)`: from `Π, q → p` infer `Π → r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BusRule {
    B1 { p: Atom, q: Atom, r: Atom },
    B2 { p: Atom, q: Atom, r: Atom },
}

impl BusRule {
    pub fn b1(p: &str, q: &str, r: &str) -> BusRule {
        BusRule::B1 {
            p: Atom::new(p),
            q: Atom::new(q),
            r: Atom::new(r),
        }
    }

    pub fn b2(p: &str, q: &str, r: &str) -> BusRule {
        BusRule::B2 {
            p: Atom::new(p),
            q: Atom::new(q),
            r: Atom::new(r),
        }
    }

    pub fn atoms(&self) -> [&Atom; 3] {
        match self {
            BusRule::B1 { p, q, r } | BusRule::B2 { p, q, r } => [p, q, r],
        }
    }

    pub fn conclusion_atom(&self) -> &Atom {
        self.atoms()[2]
    }
}

impl fmt::Display for BusRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BusRule::B1 { p, q, r } => write!(f, "B1 {p} {q} {r}"),
            BusRule::B2 { p, q, r } => write!(f, "B2 {p} {q} {r}"),
        }
    }
}

/// An ordered, finite set of Buszkowski rules.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<BusRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleSetError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

impl RuleSet {
    pub fn new(rules: Vec<BusRule>) -> RuleSet {
        RuleSet { rules }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn get(&self, i: usize) -> Option<&BusRule> {
        self.rules.get(i)
    }

    /// Text form: one `B1 p q r` or `B2 p q r` per line.
    pub fn to_text(&self) -> String {
        self.rules.iter().map(|r| format!("{r}\n")).collect()
    }

    /// Parses the text form; blank lines and lines starting with `#` are
    /// skipped.
    pub fn parse(text: &str) -> Result<RuleSet, RuleSetError> {
        let mut rules = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| RuleSetError::Syntax {
                line: n + 1,
                message,
            };
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(err(format!("expected `B1|B2 p q r`, got `{line}`")));
            }
            let atom =
                |s: &str| crate::syntax::parse_atom_internal(s).map_err(|e| err(e.to_string()));
            let (p, q, r) = (atom(parts[1])?, atom(parts[2])?, atom(parts[3])?);
            rules.push(match parts[0] {
                "B1" => BusRule::B1 { p, q, r },
                "B2" => BusRule::B2 { p, q, r },
                other => return Err(err(format!("unknown rule kind `{other}`"))),
            });
        }
        Ok(RuleSet { rules })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Base {
    /// The Lambek calculus with empty antecedents allowed.
    LStar,
    /// `L*` extended with the relevant modality `!`.
    BangLStar,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("Buszkowski rules cannot be combined with the modal calculus")]
pub struct SystemError;

/// An inference system: a base calculus, optional Buszkowski rules, and
/// whether the checker tolerates cut nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    base: Base,
    rules: RuleSet,
    allow_cut: bool,
}

impl System {
    pub fn new(base: Base, rules: RuleSet, allow_cut: bool) -> Result<System, SystemError> {
        if base == Base::BangLStar && !rules.is_empty() {
            return Err(SystemError);
        }
        Ok(System {
            base,
            rules,
            allow_cut,
        })
    }

    pub fn lstar() -> System {
        System {
            base: Base::LStar,
            rules: RuleSet::default(),
            allow_cut: false,
        }
    }

    pub fn bang_lstar() -> System {
        System {
            base: Base::BangLStar,
            rules: RuleSet::default(),
            allow_cut: false,
        }
    }

    /// `L* + R`.
    pub fn with_rules(rules: RuleSet) -> System {
        System {
            base: Base::LStar,
            rules,
            allow_cut: false,
        }
    }

    pub fn allowing_cut(mut self) -> System {
        self.allow_cut = true;
        self
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn allow_cut(&self) -> bool {
        self.allow_cut
    }

    pub fn has_bang(&self) -> bool {
        self.base == Base::BangLStar
    }
}
