//! Grammars as Buszkowski rules, and Buszkowski rules as banged formulas.
//!
//! [`encode_grammar`] turns a binary grammar into a rule set `R` such that
//! `x ⇒* z1 … zm` iff `z1, …, zm → x` is derivable in `L* + R`.
//! [`gamma`] and [`embed`] map `L* + R` sequents into `!L*`, and
//! [`translate_to_bang`] carries derivations across.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::calculus::{
    check_derivation, eliminate_cut, permute_to, restructure, BusRule, CheckError, CutError,
    Derivation, RuleSet, RuleTag, System,
};
use crate::formula::{Atom, Formula, Sequent};
use crate::grammar::{BinaryGrammar, GrammarError, Production, RewriteTrace};
use crate::prover::{prove, Budget, ProveResult};

#[derive(Debug, Error)]
pub enum EncodingError {
    #[error("invalid trace: {0}")]
    Trace(#[from] GrammarError),
    #[error("production `{0}` is not in the grammar")]
    UnknownProduction(Production),
    #[error("input derivation is not a cut-free L*+R derivation: {0}")]
    Input(CheckError),
    #[error("input derivation contains cut")]
    HasCut,
    #[error("`{0}` contains `!`")]
    Bang(Sequent),
    #[error(transparent)]
    Cut(#[from] CutError),
}

/// Rule indices for one pair `(v1 v2 => w, x)`. Two-rule entries are
/// `[B2, B1]`; rule (3) is `[B2, B2, B1]`. Per-symbol entries follow
/// [`BinaryGrammar::symbols`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairContext {
    pub id: usize,
    /// Index of the reduce production in the grammar.
    pub production: usize,
    pub x: Atom,
    /// `(y, ỹ)` for every symbol `y`.
    pub tilde: Vec<(Atom, Atom)>,
    pub a: Atom,
    pub b: Atom,
    pub c: Atom,
    pub e: Atom,
    pub f: Atom,
    pub aux: Vec<Atom>,
    pub rule1: usize,
    pub rule2: Vec<[usize; 2]>,
    pub rule3: [usize; 3],
    pub rule4: Vec<[usize; 2]>,
    pub rule5: [usize; 2],
    pub rule6: Vec<[usize; 2]>,
    pub rule7: usize,
}

impl PairContext {
    fn tilde_of(&self, y: &Atom) -> &Atom {
        &self
            .tilde
            .iter()
            .find(|(s, _)| s == y)
            .expect("symbol of the grammar")
            .1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedSystem {
    pub grammar: BinaryGrammar,
    pub ruleset: RuleSet,
    /// `(production index, rule index)` for each expand production.
    pub expand_rules: Vec<(usize, usize)>,
    pub pairs: Vec<PairContext>,
}

impl EncodedSystem {
    pub fn system(&self) -> System {
        System::with_rules(self.ruleset.clone())
    }

    pub fn pair_table_json(&self) -> String {
        serde_json::to_string_pretty(&self.pairs).expect("pair table serializes")
    }

    fn pair(&self, production: usize, x: &Atom) -> Option<&PairContext> {
        self.pairs
            .iter()
            .find(|p| p.production == production && &p.x == x)
    }
}

struct Builder {
    rules: Vec<BusRule>,
    next_u: usize,
}

impl Builder {
    fn push(&mut self, r: BusRule) -> usize {
        self.rules.push(r);
        self.rules.len() - 1
    }

    fn fresh_u(&mut self, aux: &mut Vec<Atom>) -> Atom {
        let u = Atom::fresh(&format!("u{}", self.next_u));
        self.next_u += 1;
        aux.push(u.clone());
        u
    }

    /// `Δ1 → p` and `Δ2, q → r` give `Δ1, Δ2 → t`, as `[B2, B1]`.
    fn split(&mut self, p: &Atom, q: &Atom, r: &Atom, t: &Atom, aux: &mut Vec<Atom>) -> [usize; 2] {
        let u = self.fresh_u(aux);
        let b2 = self.push(b2(r, q, &u));
        let b1 = self.push(b1(p, &u, t));
        [b2, b1]
    }
}

fn b1(p: &Atom, q: &Atom, r: &Atom) -> BusRule {
    BusRule::B1 {
        p: p.clone(),
        q: q.clone(),
        r: r.clone(),
    }
}

/// `Π, q → p` gives `Π → r`.
fn b2(p: &Atom, q: &Atom, r: &Atom) -> BusRule {
    BusRule::B2 {
        p: p.clone(),
        q: q.clone(),
        r: r.clone(),
    }
}

/// One B1 rule per expand production, then `7 + 6·|N ∪ Σ|` rules for every
/// pair of a reduce production and a symbol `x`. Deterministic, including
/// the names of fresh atoms.
pub fn encode_grammar(g: &BinaryGrammar) -> EncodedSystem {
    let mut bld = Builder {
        rules: Vec::new(),
        next_u: 0,
    };
    let mut expand_rules = Vec::new();
    for (i, p) in g.productions().iter().enumerate() {
        if let Production::Expand { w, v1, v2 } = p {
            expand_rules.push((i, bld.push(b1(v1, v2, w))));
        }
    }
    let symbols = g.symbols();
    let mut pairs = Vec::new();
    for (i, p) in g.productions().iter().enumerate() {
        let Production::Reduce { v1, v2, w } = p else {
            continue;
        };
        for x in &symbols {
            let id = pairs.len();
            let tilde: Vec<(Atom, Atom)> = symbols
                .iter()
                .map(|y| (y.clone(), Atom::fresh(&format!("{y}~{id}"))))
                .collect();
            let mark = |c: char| Atom::fresh(&format!("{c}{id}"));
            let (a, b, c, e, f) = (mark('a'), mark('b'), mark('c'), mark('e'), mark('f'));
            let t = |y: &Atom| tilde.iter().find(|(s, _)| s == y).unwrap().1.clone();
            let mut aux = Vec::new();

            let rule1 = bld.push(b1(&e, x, &a));
            let rule2 = symbols
                .iter()
                .map(|y| bld.split(&t(y), y, &a, &a, &mut aux))
                .collect();
            let u1 = bld.fresh_u(&mut aux);
            let u2 = bld.fresh_u(&mut aux);
            let rule3 = [
                bld.push(b2(&a, v2, &u1)),
                bld.push(b2(&u1, v1, &u2)),
                bld.push(b1(&t(w), &u2, &b)),
            ];
            let rule4 = symbols
                .iter()
                .map(|y| bld.split(&t(y), y, &b, &b, &mut aux))
                .collect();
            let rule5 = bld.split(&f, &e, &b, &c, &mut aux);
            let rule6 = symbols
                .iter()
                .map(|y| bld.split(y, &t(y), &c, &c, &mut aux))
                .collect();
            let rule7 = bld.push(b2(&c, &f, x));
            pairs.push(PairContext {
                id,
                production: i,
                x: x.clone(),
                tilde,
                a,
                b,
                c,
                e,
                f,
                aux,
                rule1,
                rule2,
                rule3,
                rule4,
                rule5,
                rule6,
                rule7,
            });
        }
    }
    EncodedSystem {
        grammar: g.clone(),
        ruleset: RuleSet::new(bld.rules),
        expand_rules,
        pairs,
    }
}

fn ax(a: &Atom) -> Derivation {
    Derivation::axiom(Formula::atom(a))
}

/// B2 rule `rule` under `d`, whose antecedent loses its last formula.
fn apply_b2(rules: &RuleSet, rule: usize, d: Derivation) -> Derivation {
    let mut ant = d.conclusion.antecedent.clone();
    ant.pop();
    let r = rules.rules[rule].conclusion_atom();
    Derivation::new(
        RuleTag::B2 { rule },
        Sequent::new(ant, Formula::atom(r)),
        vec![d],
    )
}

fn apply_b1(rule: usize, r: &Atom, left: Derivation, right: Derivation) -> Derivation {
    let mut ant = left.conclusion.antecedent.clone();
    ant.extend(right.conclusion.antecedent.iter().cloned());
    let split = left.conclusion.antecedent.len();
    Derivation::new(
        RuleTag::B1 { rule, split },
        Sequent::new(ant, Formula::atom(r)),
        vec![left, right],
    )
}

/// Derivation of `z1, …, zm → x` in `L* + R` for a trace `x ⇒* z1 … zm`.
///
/// Expand steps are cut into the current derivation and the cut is
/// eliminated; reduce steps stack the marker-moving chain of their pair.
pub fn grammar_to_derivation(
    enc: &EncodedSystem,
    trace: &RewriteTrace,
) -> Result<Derivation, EncodingError> {
    let words = trace.replay()?;
    let x = &trace.from;
    let sys = enc.system();
    let mut d = ax(x);
    for (step, word) in trace.steps.iter().zip(&words) {
        let index = enc
            .grammar
            .productions()
            .iter()
            .position(|p| p == &step.production)
            .ok_or_else(|| EncodingError::UnknownProduction(step.production.clone()))?;
        d = match &step.production {
            Production::Expand { w, v1, v2 } => {
                let rule = enc
                    .expand_rules
                    .iter()
                    .find(|(p, _)| *p == index)
                    .expect("every expand production has a rule")
                    .1;
                let local = apply_b1(rule, w, ax(v1), ax(v2));
                eliminate_cut(&local, &d, step.pos, &sys)?
            }
            Production::Reduce { w, .. } => {
                let pair = enc
                    .pair(index, x)
                    .ok_or_else(|| EncodingError::UnknownProduction(step.production.clone()))?;
                reduce_chain(&enc.ruleset, pair, w, word, step.pos, d)
            }
        };
    }
    Ok(d)
}

/// From `d: y1 … y(k-1), v1, v2, y(k+1) … yn → x` (the string `word`, with
/// `v1` at `pos`) to `y1 … y(k-1), w, y(k+1) … yn → x`.
fn reduce_chain(
    rules: &RuleSet,
    p: &PairContext,
    w: &Atom,
    word: &[Atom],
    pos: usize,
    d: Derivation,
) -> Derivation {
    let before = &word[..pos];
    let after = &word[pos + 2..];
    let sym = |y: &Atom| {
        p.tilde
            .iter()
            .position(|(s, _)| s == y)
            .expect("symbol of the grammar")
    };

    // (1'): e, word → a
    let mut d = apply_b1(p.rule1, &p.a, ax(&p.e), d);
    // (2')*: carry e leftwards over the symbols after the redex
    for y in after.iter().rev() {
        let [r2, r1] = p.rule2[sym(y)];
        let u = apply_b2(rules, r2, d);
        d = apply_b1(r1, &p.a, ax(p.tilde_of(y)), u);
    }
    // (3'): replace v1 v2 by w̃
    let [r3a, r3b, r3c] = p.rule3;
    d = apply_b2(rules, r3a, d);
    d = apply_b2(rules, r3b, d);
    d = apply_b1(r3c, &p.b, ax(p.tilde_of(w)), d);
    // (4')*: carry on over the symbols before the redex
    for y in before.iter().rev() {
        let [r2, r1] = p.rule4[sym(y)];
        let u = apply_b2(rules, r2, d);
        d = apply_b1(r1, &p.b, ax(p.tilde_of(y)), u);
    }
    // (5'): f, ỹ1 … w̃ … ỹn → c
    let [r2, r1] = p.rule5;
    let u = apply_b2(rules, r2, d);
    d = apply_b1(r1, &p.c, ax(&p.f), u);
    // (6)*: unmark right to left, each unmarked symbol an axiom
    let mut restored: Vec<Atom> = before.to_vec();
    restored.push(w.clone());
    restored.extend_from_slice(after);
    for y in restored.iter().rev() {
        let [r2, r1] = p.rule6[sym(y)];
        let u = apply_b2(rules, r2, d);
        d = apply_b1(r1, &p.c, ax(y), u);
    }
    // (7): drop f
    apply_b2(rules, p.rule7, d)
}

/// `B1(p, q, r) ↦ (r/q)/p` and `B2(p, q, r) ↦ r/(p/q)`.
pub fn rule_formula(r: &BusRule) -> Formula {
    match r {
        BusRule::B1 { p, q, r } => Formula::over(
            Formula::over(Formula::atom(r), Formula::atom(q)),
            Formula::atom(p),
        ),
        BusRule::B2 { p, q, r } => Formula::over(
            Formula::atom(r),
            Formula::over(Formula::atom(p), Formula::atom(q)),
        ),
    }
}

/// The formulas of the rules of `r`, in rule order, without duplicates.
pub fn gamma(r: &RuleSet) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    for rule in &r.rules {
        let f = rule_formula(rule);
        if !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

/// `!B1, …, !Bn, Π → A`.
pub fn embed(b: &[Formula], goal: &Sequent) -> Sequent {
    let mut ant: Vec<Formula> = b.iter().cloned().map(Formula::bang).collect();
    ant.extend(goal.antecedent.iter().cloned());
    Sequent::new(ant, goal.succedent.clone())
}

/// Turns a cut-free `L* + R` derivation into a `!L*` derivation of
/// `embed(B, conclusion)` for some `B ⊆ gamma(R)`, listed in gamma order.
pub fn translate_to_bang(
    d: &Derivation,
    r: &RuleSet,
) -> Result<(Vec<Formula>, Derivation), EncodingError> {
    if d.conclusion.contains_bang() {
        return Err(EncodingError::Bang(d.conclusion.clone()));
    }
    if !d.is_cut_free() {
        return Err(EncodingError::HasCut);
    }
    check_derivation(d, &System::with_rules(r.clone())).map_err(EncodingError::Input)?;
    let g = gamma(r);
    let index: Vec<usize> = r
        .rules
        .iter()
        .map(|rule| g.iter().position(|f| *f == rule_formula(rule)).unwrap())
        .collect();
    let t = Translator { r, g: &g, index };
    let (b, out) = t.go(d);
    Ok((b.into_iter().map(|i| g[i].clone()).collect(), out))
}

struct Translator<'a> {
    r: &'a RuleSet,
    g: &'a [Formula],
    index: Vec<usize>,
}

impl Translator<'_> {
    fn target(&self, b: &BTreeSet<usize>, s: &Sequent) -> Vec<Formula> {
        let chosen: Vec<Formula> = b.iter().map(|&i| self.g[i].clone()).collect();
        embed(&chosen, s).antecedent
    }

    fn go(&self, d: &Derivation) -> (BTreeSet<usize>, Derivation) {
        let s = &d.conclusion;
        match d.rule {
            RuleTag::Axiom => (BTreeSet::new(), d.clone()),
            RuleTag::OverRight => {
                let (b, p) = self.go(&d.premises[0]);
                (b, Derivation::over_right(p))
            }
            RuleTag::UnderRight => {
                let (b, p) = self.go(&d.premises[0]);
                // bring the discharged formula in front of the banged prefix
                let mut ant = p.conclusion.antecedent.clone();
                let a = ant.remove(b.len());
                ant.insert(0, a);
                (b, Derivation::under_right(permute_to(&ant, p)))
            }
            RuleTag::OverLeft { principal, .. } | RuleTag::UnderLeft { principal, .. } => {
                let (bg, dg) = self.go(&d.premises[0]);
                let (bm, dm) = self.go(&d.premises[1]);
                let joined = match (&d.rule, &s.antecedent[principal]) {
                    (RuleTag::OverLeft { .. }, Formula::Over(_, den)) => {
                        Derivation::over_left((**den).clone(), bm.len() + principal, dg, dm)
                    }
                    (RuleTag::UnderLeft { gamma_len, .. }, Formula::Under(den, _)) => {
                        let start = principal - gamma_len;
                        Derivation::under_left((**den).clone(), bm.len() + start, dg, dm)
                    }
                    _ => unreachable!("checked principal formula"),
                };
                let b: BTreeSet<usize> = bg.union(&bm).copied().collect();
                let target = self.target(&b, s);
                (b, restructure(joined, &target))
            }
            RuleTag::B1 { rule, .. } => {
                let BusRule::B1 { p, q, r } = &self.r.rules[rule] else {
                    unreachable!("checked rule shape")
                };
                let (b1, d1) = self.go(&d.premises[0]);
                let (b2, d2) = self.go(&d.premises[1]);
                let over_q = Derivation::over_left(Formula::atom(q), 0, d2, ax(r));
                let over_p = Derivation::over_left(Formula::atom(p), 0, d1, over_q);
                let banged = Derivation::bang_left(0, over_p);
                let mut b: BTreeSet<usize> = b1.union(&b2).copied().collect();
                b.insert(self.index[rule]);
                let target = self.target(&b, s);
                (b, restructure(banged, &target))
            }
            RuleTag::B2 { rule } => {
                let BusRule::B2 { p, q, r } = &self.r.rules[rule] else {
                    unreachable!("checked rule shape")
                };
                let (mut b, d1) = self.go(&d.premises[0]);
                let slash = Derivation::over_right(d1);
                let den = Formula::over(Formula::atom(p), Formula::atom(q));
                let over = Derivation::over_left(den, 0, slash, ax(r));
                let banged = Derivation::bang_left(0, over);
                b.insert(self.index[rule]);
                let target = self.target(&b, s);
                (b, restructure(banged, &target))
            }
            _ => unreachable!("checked L*+R derivation"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Deduction {
    Found {
        subset: Vec<Formula>,
        derivation: Derivation,
    },
    NotFound,
    Unknown(String),
}

/// Largest `|gamma(R)|` for which [`deduction_search`] tries subsets one by
/// one.
pub const SUBSET_SEARCH_LIMIT: usize = 10;

/// Looks for `B ⊆ gamma(R)` with `!B, Π → A` derivable in `!L*`.
///
/// Up to [`SUBSET_SEARCH_LIMIT`] formulas, subsets are tried by increasing
/// size and then lexicographically, each with its own `prove` call. Larger
/// `gamma(R)` is handled by [`deduction_search_guided`].
pub fn deduction_search(
    goal: &Sequent,
    r: &RuleSet,
    budget: &Budget,
) -> Result<Deduction, EncodingError> {
    if goal.contains_bang() {
        return Err(EncodingError::Bang(goal.clone()));
    }
    let g = gamma(r);
    if g.len() > SUBSET_SEARCH_LIMIT {
        return deduction_search_guided(goal, r, budget);
    }
    let sys = System::bang_lstar();
    let mut cut = None;
    for size in 0..=g.len() {
        for subset in combinations(g.len(), size) {
            let chosen: Vec<Formula> = subset.iter().map(|&i| g[i].clone()).collect();
            match prove(&embed(&chosen, goal), &sys, budget) {
                ProveResult::Derivable(derivation) => {
                    return Ok(Deduction::Found {
                        subset: chosen,
                        derivation,
                    })
                }
                ProveResult::NotDerivable => {}
                ProveResult::Unknown(why) => {
                    cut.get_or_insert(format!("subset {subset:?}: {why}"));
                }
            }
        }
    }
    Ok(match cut {
        Some(why) => Deduction::Unknown(why),
        None => Deduction::NotFound,
    })
}

/// Proves `goal` in `L* + R` and translates the derivation.
///
/// `NotFound` rests on the equivalence of the two systems: when the `L* + R`
/// search space is exhausted no subset can succeed.
pub fn deduction_search_guided(
    goal: &Sequent,
    r: &RuleSet,
    budget: &Budget,
) -> Result<Deduction, EncodingError> {
    if goal.contains_bang() {
        return Err(EncodingError::Bang(goal.clone()));
    }
    match prove(goal, &System::with_rules(r.clone()), budget) {
        ProveResult::Derivable(d) => {
            let (subset, derivation) = translate_to_bang(&d, r)?;
            Ok(Deduction::Found { subset, derivation })
        }
        ProveResult::NotDerivable => Ok(Deduction::NotFound),
        ProveResult::Unknown(why) => Ok(Deduction::Unknown(why)),
    }
}

/// `k`-element subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
