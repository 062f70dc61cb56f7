//! Binary grammars and breadth-first rewriting.
//!
//! Productions are `w => v1 v2` (expand) or `v1 v2 => w` (reduce).

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::formula::Atom;
use crate::syntax::parse_atom_internal;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Production {
    /// `w => v1 v2`
    Expand { w: Atom, v1: Atom, v2: Atom },
    /// `v1 v2 => w`
    Reduce { v1: Atom, v2: Atom, w: Atom },
}

impl Production {
    pub fn expand(w: &str, v1: &str, v2: &str) -> Production {
        Production::Expand {
            w: Atom::new(w),
            v1: Atom::new(v1),
            v2: Atom::new(v2),
        }
    }

    pub fn reduce(v1: &str, v2: &str, w: &str) -> Production {
        Production::Reduce {
            v1: Atom::new(v1),
            v2: Atom::new(v2),
            w: Atom::new(w),
        }
    }

    pub fn lhs(&self) -> Vec<Atom> {
        match self {
            Production::Expand { w, .. } => vec![w.clone()],
            Production::Reduce { v1, v2, .. } => vec![v1.clone(), v2.clone()],
        }
    }

    pub fn rhs(&self) -> Vec<Atom> {
        match self {
            Production::Expand { v1, v2, .. } => vec![v1.clone(), v2.clone()],
            Production::Reduce { w, .. } => vec![w.clone()],
        }
    }

    fn symbols(&self) -> [&Atom; 3] {
        match self {
            Production::Expand { w, v1, v2 } | Production::Reduce { v1, v2, w } => [w, v1, v2],
        }
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Production::Expand { w, v1, v2 } => write!(f, "{w} => {v1} {v2}"),
            Production::Reduce { v1, v2, w } => write!(f, "{v1} {v2} => {w}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("`{0}` is both a terminal and a nonterminal")]
    Overlap(Atom),
    #[error("start symbol `{0}` is not a nonterminal")]
    Start(Atom),
    #[error("production `{0}` uses a symbol outside the alphabet")]
    Alphabet(Production),
    #[error("left side of `{prod}` does not occur at position {pos}")]
    Mismatch { prod: Production, pos: usize },
    #[error("target word is empty")]
    EmptyTarget,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// `⟨N, Σ, P, s⟩`. Symbol order is kept as given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryGrammar {
    nonterminals: Vec<Atom>,
    terminals: Vec<Atom>,
    start: Atom,
    productions: Vec<Production>,
}

impl BinaryGrammar {
    pub fn new(
        nonterminals: Vec<Atom>,
        terminals: Vec<Atom>,
        start: Atom,
        productions: Vec<Production>,
    ) -> Result<BinaryGrammar, GrammarError> {
        let mut nonterminals = nonterminals;
        let mut terminals = terminals;
        dedup(&mut nonterminals);
        dedup(&mut terminals);
        if let Some(a) = terminals.iter().find(|a| nonterminals.contains(a)) {
            return Err(GrammarError::Overlap(a.clone()));
        }
        if !nonterminals.contains(&start) {
            return Err(GrammarError::Start(start));
        }
        let g = BinaryGrammar {
            nonterminals,
            terminals,
            start,
            productions,
        };
        if let Some(p) = g
            .productions
            .iter()
            .find(|p| p.symbols().iter().any(|a| !g.is_symbol(a)))
        {
            return Err(GrammarError::Alphabet(p.clone()));
        }
        Ok(g)
    }

    pub fn nonterminals(&self) -> &[Atom] {
        &self.nonterminals
    }

    pub fn terminals(&self) -> &[Atom] {
        &self.terminals
    }

    pub fn start(&self) -> &Atom {
        &self.start
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    /// `N ∪ Σ`, nonterminals first.
    pub fn symbols(&self) -> Vec<Atom> {
        self.nonterminals
            .iter()
            .chain(&self.terminals)
            .cloned()
            .collect()
    }

    pub fn is_symbol(&self, a: &Atom) -> bool {
        self.nonterminals.contains(a) || self.terminals.contains(a)
    }

    /// Replaces the single-symbol production `u => v` by `u => w1 w2` and
    /// `w1 w2 => v` with two new nonterminals.
    pub fn with_unit_production(&self, u: &Atom, v: &Atom) -> Result<BinaryGrammar, GrammarError> {
        let mut k = 0;
        let mut fresh = || loop {
            let a = Atom::fresh(&format!("w{k}"));
            k += 1;
            if !self.is_symbol(&a) {
                return a;
            }
        };
        let (w1, w2) = (fresh(), fresh());
        let mut nonterminals = self.nonterminals.clone();
        nonterminals.extend([w1.clone(), w2.clone()]);
        let mut productions = self.productions.clone();
        productions.push(Production::Expand {
            w: u.clone(),
            v1: w1.clone(),
            v2: w2.clone(),
        });
        productions.push(Production::Reduce {
            v1: w1,
            v2: w2,
            w: v.clone(),
        });
        BinaryGrammar::new(
            nonterminals,
            self.terminals.clone(),
            self.start.clone(),
            productions,
        )
    }

    /// Line format: `nonterminals: s t`, `terminals: a b`, `start: s`, then
    /// `w => v1 v2` or `v1 v2 => w`. `# ` starts a comment.
    pub fn parse(text: &str) -> Result<BinaryGrammar, GrammarError> {
        let mut nonterminals = None;
        let mut terminals = None;
        let mut start = None;
        let mut productions = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| GrammarError::Syntax {
                line: i + 1,
                message,
            };
            let atoms = |s: &str| -> Result<Vec<Atom>, GrammarError> {
                s.split_whitespace()
                    .map(|t| parse_atom_internal(t).map_err(|e| err(e.to_string())))
                    .collect()
            };
            if let Some((key, rest)) = line.split_once(':') {
                let list = atoms(rest)?;
                match key.trim() {
                    "nonterminals" => nonterminals = Some(list),
                    "terminals" => terminals = Some(list),
                    "start" => match list.as_slice() {
                        [s] => start = Some(s.clone()),
                        _ => return Err(err("`start:` takes one symbol".into())),
                    },
                    other => return Err(err(format!("unknown header `{other}`"))),
                }
            } else if let Some((l, r)) = line.split_once("=>") {
                let (l, r) = (atoms(l)?, atoms(r)?);
                productions.push(match (l.as_slice(), r.as_slice()) {
                    ([w], [v1, v2]) => Production::Expand {
                        w: w.clone(),
                        v1: v1.clone(),
                        v2: v2.clone(),
                    },
                    ([v1, v2], [w]) => Production::Reduce {
                        v1: v1.clone(),
                        v2: v2.clone(),
                        w: w.clone(),
                    },
                    _ => return Err(err(format!("`{line}` is not a binary production"))),
                });
            } else {
                return Err(err(format!("cannot read `{line}`")));
            }
        }
        let missing = |what: &str| GrammarError::Syntax {
            line: 0,
            message: format!("missing `{what}:` header"),
        };
        BinaryGrammar::new(
            nonterminals.ok_or_else(|| missing("nonterminals"))?,
            terminals.ok_or_else(|| missing("terminals"))?,
            start.ok_or_else(|| missing("start"))?,
            productions,
        )
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[Atom]| {
            v.iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = format!(
            "nonterminals: {}\nterminals: {}\nstart: {}\n",
            join(&self.nonterminals),
            join(&self.terminals),
            self.start
        );
        for p in &self.productions {
            out.push_str(&format!("{p}\n"));
        }
        out
    }
}

fn dedup(v: &mut Vec<Atom>) {
    let mut seen = HashSet::new();
    v.retain(|a| seen.insert(a.clone()));
}

/// A comment is a `#` token followed by a space or the line end, so reserved
/// atoms such as `#w0` are not comments.
pub(crate) fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        let starts_token = i == 0 || bytes[i - 1].is_ascii_whitespace();
        let ends = bytes.get(i + 1).is_none_or(|c| c.is_ascii_whitespace());
        if b == b'#' && starts_token && ends {
            return &line[..i];
        }
    }
    line
}

/// `η α θ ⇒ η β θ` where `α` is the left side of `prod` and `|η| = pos`.
pub fn rewrite_step(
    word: &[Atom],
    prod: &Production,
    pos: usize,
) -> Result<Vec<Atom>, GrammarError> {
    let lhs = prod.lhs();
    if word.get(pos..pos + lhs.len()) != Some(lhs.as_slice()) {
        return Err(GrammarError::Mismatch {
            prod: prod.clone(),
            pos,
        });
    }
    let mut out = word[..pos].to_vec();
    out.extend(prod.rhs());
    out.extend_from_slice(&word[pos + lhs.len()..]);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub production: Production,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteTrace {
    pub from: Atom,
    pub steps: Vec<TraceStep>,
}

impl RewriteTrace {
    /// Every intermediate string, starting with `[from]`.
    pub fn replay(&self) -> Result<Vec<Vec<Atom>>, GrammarError> {
        let mut words = vec![vec![self.from.clone()]];
        for step in &self.steps {
            let next = rewrite_step(words.last().unwrap(), &step.production, step.pos)?;
            words.push(next);
        }
        Ok(words)
    }

    pub fn result(&self) -> Result<Vec<Atom>, GrammarError> {
        Ok(self.replay()?.pop().unwrap())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Derives {
    Yes(RewriteTrace),
    No,
    Unknown,
}

/// Strings kept before `derives` gives up.
pub const MAX_STATES: usize = 2_000_000;

/// Breadth-first search for `from ⇒* target`.
///
/// Strings longer than `|target| + step_budget` are pruned; when `g` has no
/// reduce productions lengths never shrink and the cap is `|target|`. `No`
/// means the reachable strings under the cap were exhausted, `Unknown` that
/// more than [`MAX_STATES`] strings were met.
pub fn derives(
    g: &BinaryGrammar,
    target: &[Atom],
    from: &Atom,
    step_budget: usize,
) -> Result<Derives, GrammarError> {
    if target.is_empty() {
        return Err(GrammarError::EmptyTarget);
    }
    let shrinks = g
        .productions
        .iter()
        .any(|p| matches!(p, Production::Reduce { .. }));
    let cap = if shrinks {
        target.len() + step_budget
    } else {
        target.len()
    };
    let root = vec![from.clone()];
    let mut parent: HashMap<Vec<Atom>, Option<(Vec<Atom>, TraceStep)>> = HashMap::new();
    parent.insert(root.clone(), None);
    let mut queue = VecDeque::from([root]);
    while let Some(word) = queue.pop_front() {
        if word == target {
            return Ok(Derives::Yes(trace_to(&parent, from, word)));
        }
        for prod in &g.productions {
            let lhs = prod.lhs();
            let grow = prod.rhs().len() > lhs.len();
            if grow && word.len() + 1 > cap {
                continue;
            }
            for pos in 0..(word.len() + 1).saturating_sub(lhs.len()) {
                if word[pos..pos + lhs.len()] != lhs[..] {
                    continue;
                }
                let next = rewrite_step(&word, prod, pos).expect("left side matched");
                if parent.contains_key(&next) {
                    continue;
                }
                if parent.len() >= MAX_STATES {
                    return Ok(Derives::Unknown);
                }
                let step = TraceStep {
                    production: prod.clone(),
                    pos,
                };
                parent.insert(next.clone(), Some((word.clone(), step)));
                queue.push_back(next);
            }
        }
    }
    Ok(Derives::No)
}

fn trace_to(
    parent: &HashMap<Vec<Atom>, Option<(Vec<Atom>, TraceStep)>>,
    from: &Atom,
    mut word: Vec<Atom>,
) -> RewriteTrace {
    let mut steps = Vec::new();
    while let Some(Some((prev, step))) = parent.get(&word) {
        steps.push(step.clone());
        word = prev.clone();
    }
    steps.reverse();
    RewriteTrace {
        from: from.clone(),
        steps,
    }
}

/// Splits a space-separated word into symbols.
pub fn word(text: &str) -> Vec<Atom> {
    text.split_whitespace().map(Atom::new).collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn g1() -> BinaryGrammar {
        BinaryGrammar::new(
            word("s t"),
            word("a b"),
            Atom::new("s"),
            vec![
                Production::expand("s", "a", "b"),
                Production::expand("s", "a", "t"),
                Production::expand("t", "s", "b"),
            ],
        )
        .unwrap()
    }

    pub(crate) fn g2() -> BinaryGrammar {
        let g = g1();
        let mut p = g.productions().to_vec();
        p.push(Production::reduce("a", "a", "t"));
        BinaryGrammar::new(word("s t"), word("a b"), Atom::new("s"), p).unwrap()
    }

    #[test]
    fn rewrite_examples() {
        let p = Production::expand("s", "a", "b");
        assert_eq!(rewrite_step(&word("s"), &p, 0).unwrap(), word("a b"));
        assert_eq!(
            rewrite_step(&word("a s b"), &p, 1).unwrap(),
            word("a a b b")
        );
        let r = Production::reduce("a", "a", "t");
        assert_eq!(rewrite_step(&word("a a b"), &r, 0).unwrap(), word("t b"));
        assert!(matches!(
            rewrite_step(&word("a b"), &r, 0),
            Err(GrammarError::Mismatch { .. })
        ));
        assert!(rewrite_step(&word("a"), &r, 0).is_err());
    }

    #[test]
    fn derives_examples() {
        let g = g1();
        let s = Atom::new("s");
        match derives(&g, &word("a a b b"), &s, 8).unwrap() {
            Derives::Yes(t) => {
                assert_eq!(t.result().unwrap(), word("a a b b"));
                assert_eq!(t.steps.len(), 3);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(derives(&g, &word("a b a"), &s, 8).unwrap(), Derives::No);
        assert_eq!(
            derives(&g, &word("s"), &s, 0).unwrap(),
            Derives::Yes(RewriteTrace {
                from: s.clone(),
                steps: vec![]
            })
        );
        assert_eq!(derives(&g, &[], &s, 3), Err(GrammarError::EmptyTarget));
    }

    #[test]
    fn reduce_grammar_reaches_new_words() {
        // s => a t => a s b => a a b b, then a a => t
        let g = g2();
        match derives(&g, &word("t b b"), &Atom::new("s"), 6).unwrap() {
            Derives::Yes(t) => assert_eq!(t.result().unwrap(), word("t b b")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation() {
        let e = BinaryGrammar::new(word("s"), word("s"), Atom::new("s"), vec![]);
        assert!(matches!(e, Err(GrammarError::Overlap(_))));
        let e = BinaryGrammar::new(word("s"), word("a"), Atom::new("a"), vec![]);
        assert!(matches!(e, Err(GrammarError::Start(_))));
        let e = BinaryGrammar::new(
            word("s"),
            word("a"),
            Atom::new("s"),
            vec![Production::expand("s", "a", "z")],
        );
        assert!(matches!(e, Err(GrammarError::Alphabet(_))));
    }

    #[test]
    fn file_round_trip() {
        let text = "# toy\nnonterminals: s t\nterminals: a b\nstart: s\ns => a b\ns => a t # tail\nt => s b\na a => t\n";
        let g = BinaryGrammar::parse(text).unwrap();
        assert_eq!(g, g2());
        assert_eq!(BinaryGrammar::parse(&g.to_text()).unwrap(), g);
        assert!(BinaryGrammar::parse("nonterminals: s\nterminals: a\nstart: s\ns => a\n").is_err());
        assert!(BinaryGrammar::parse("terminals: a\nstart: s\n").is_err());
    }

    #[test]
    fn unit_production_helper() {
        let g = g1()
            .with_unit_production(&Atom::new("t"), &Atom::new("b"))
            .unwrap();
        assert_eq!(g.nonterminals().len(), 4);
        // t => b now holds through two steps
        match derives(&g, &word("a a b b"), &Atom::new("s"), 6).unwrap() {
            Derives::Yes(_) => {}
            other => panic!("{other:?}"),
        }
        match derives(&g, &word("a b"), &Atom::new("s"), 6).unwrap() {
            Derives::Yes(t) => assert_eq!(t.result().unwrap(), word("a b")),
            other => panic!("{other:?}"),
        }
        // s => a t => a b
        match derives(&g, &word("b"), &Atom::new("t"), 4).unwrap() {
            Derives::Yes(t) => assert_eq!(t.steps.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    fn arb_word() -> impl Strategy<Value = Vec<Atom>> {
        prop::collection::vec(prop_oneof![Just("a"), Just("b")], 1..7)
            .prop_map(|v| v.into_iter().map(Atom::new).collect())
    }

    proptest! {
        #[test]
        fn traces_replay_with_unit_length_steps(w in arb_word()) {
            let g = g2();
            if let Derives::Yes(t) = derives(&g, &w, &Atom::new("s"), 4).unwrap() {
                let words = t.replay().unwrap();
                prop_assert_eq!(words.last().unwrap(), &w);
                let mut net: isize = 0;
                for pair in words.windows(2) {
                    let d = pair[1].len() as isize - pair[0].len() as isize;
                    prop_assert_eq!(d.abs(), 1);
                    net += d;
                }
                prop_assert_eq!(net, w.len() as isize - 1);
            }
        }

        #[test]
        fn budget_monotone(w in arb_word(), k in 0usize..4) {
            let g = g2();
            let s = Atom::new("s");
            if let Derives::Yes(_) = derives(&g, &w, &s, k).unwrap() {
                let more = derives(&g, &w, &s, k + 2).unwrap();
                prop_assert!(matches!(more, Derives::Yes(_)));
            }
        }
    }
}
