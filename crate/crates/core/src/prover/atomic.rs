//! Search for sequents of atoms in `L* + R`.
//!
//! Such derivations use axioms and Buszkowski rules only, and every sequent
//! in them is again a sequent of atoms. A sequent repeated on one branch can
//! be cut out of any derivation, so a state already on the current path
//! fails. Failures that relied on an ancestor being on the path are not
//! cached. Both the branch depth and the growth of antecedents beyond the
//! goal's length are deepened iteratively.

use std::collections::HashMap;
use std::rc::Rc;

use super::search::SearchResult;
use crate::calculus::{BusRule, Derivation, RuleSet, RuleTag};
use crate::formula::{Atom, Formula, Sequent};

type Id = u32;

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    ant: Vec<Id>,
    succ: Id,
}

enum Plan {
    Axiom,
    B1 {
        rule: usize,
        split: usize,
        left: Rc<Plan>,
        right: Rc<Plan>,
    },
    B2 {
        rule: usize,
        above: Rc<Plan>,
    },
}

enum Outcome {
    Proved(Rc<Plan>, usize),
    /// `low` is the shallowest path position the failure depended on.
    Failed {
        hit: bool,
        low: usize,
    },
}

#[derive(Default)]
struct Entry {
    proof: Option<(Rc<Plan>, usize)>,
    definitive: bool,
    /// Limits `(depth, length)` known to fail; an antichain.
    fails: Vec<(usize, usize)>,
}

/// Rules as `(p, q, r)` ids.
enum Rule {
    B1(Id, Id, Id),
    B2(Id, Id, Id),
}

pub(super) struct AtomicSearch {
    atoms: Vec<Atom>,
    ids: HashMap<Atom, Id>,
    rules: Vec<Rule>,
    /// Rule indices by conclusion atom.
    by_conclusion: HashMap<Id, Vec<usize>>,
    memo: HashMap<State, Entry>,
    path: HashMap<State, usize>,
    nodes: usize,
    max_nodes: usize,
    aborted: bool,
    max_len: usize,
}

const NO_DEPENDENCY: usize = usize::MAX;

impl AtomicSearch {
    pub(super) fn new(rules: &RuleSet, max_nodes: usize) -> AtomicSearch {
        let mut s = AtomicSearch {
            atoms: Vec::new(),
            ids: HashMap::new(),
            rules: Vec::new(),
            by_conclusion: HashMap::new(),
            memo: HashMap::new(),
            path: HashMap::new(),
            nodes: 0,
            max_nodes,
            aborted: false,
            max_len: 0,
        };
        for (i, r) in rules.rules.iter().enumerate() {
            let rule = match r {
                BusRule::B1 { p, q, r } => Rule::B1(s.id(p), s.id(q), s.id(r)),
                BusRule::B2 { p, q, r } => Rule::B2(s.id(p), s.id(q), s.id(r)),
            };
            let concl = match rule {
                Rule::B1(_, _, r) | Rule::B2(_, _, r) => r,
            };
            s.rules.push(rule);
            s.by_conclusion.entry(concl).or_default().push(i);
        }
        s
    }

    fn id(&mut self, a: &Atom) -> Id {
        if let Some(&i) = self.ids.get(a) {
            return i;
        }
        let i = self.atoms.len() as Id;
        self.atoms.push(a.clone());
        self.ids.insert(a.clone(), i);
        i
    }

    pub(super) fn nodes(&self) -> usize {
        self.nodes
    }

    /// `None` if `goal` is not a sequent of atoms.
    pub(super) fn run(&mut self, goal: &Sequent, max_depth: usize) -> Option<SearchResult> {
        let mut ant = Vec::new();
        for f in &goal.antecedent {
            ant.push(self.id(f.as_var()?));
        }
        let succ = self.id(goal.succedent.as_var()?);
        let root = State { ant, succ };
        let base = root.ant.len() + 1;
        let mut l = max_depth.min(4);
        let mut extra = 1;
        loop {
            self.max_len = base + extra;
            match self.solve(&root, l, 0) {
                Outcome::Proved(plan, _) => {
                    return Some(SearchResult::Proved(self.build(&plan, &root)));
                }
                Outcome::Failed { hit: false, .. } => return Some(SearchResult::Exhausted),
                Outcome::Failed { hit: true, .. } => {
                    if self.aborted {
                        return Some(SearchResult::Cut(format!(
                            "search-node cap of {} reached",
                            self.max_nodes
                        )));
                    }
                    if l >= max_depth && extra >= max_depth {
                        return Some(SearchResult::Cut(format!(
                            "no proof within {max_depth} rule applications per branch"
                        )));
                    }
                    l = l.saturating_mul(2).min(max_depth);
                    extra = (extra + 1).min(max_depth);
                }
            }
        }
    }

    /// Derivable only as an axiom: no rule concludes it.
    fn axiom_only(&self, a: Id) -> bool {
        !self.by_conclusion.contains_key(&a)
    }

    fn solve(&mut self, st: &State, l: usize, depth: usize) -> Outcome {
        if st.ant.len() == 1 && st.ant[0] == st.succ {
            return Outcome::Proved(Rc::new(Plan::Axiom), 0);
        }
        if self.axiom_only(st.succ) {
            return Outcome::Failed {
                hit: false,
                low: NO_DEPENDENCY,
            };
        }
        if let Some(e) = self.memo.get(st) {
            if let Some((p, d)) = &e.proof {
                if *d <= l {
                    return Outcome::Proved(p.clone(), *d);
                }
            }
            if e.definitive {
                return Outcome::Failed {
                    hit: false,
                    low: NO_DEPENDENCY,
                };
            }
            let len = self.max_len;
            if e.fails.iter().any(|&(fl, fm)| l <= fl && len <= fm) {
                return Outcome::Failed {
                    hit: true,
                    low: NO_DEPENDENCY,
                };
            }
        }
        if let Some(&at) = self.path.get(st) {
            return Outcome::Failed {
                hit: false,
                low: at,
            };
        }
        if l == 0 || self.aborted || st.ant.len() > self.max_len {
            return Outcome::Failed {
                hit: true,
                low: NO_DEPENDENCY,
            };
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.aborted = true;
            return Outcome::Failed {
                hit: true,
                low: NO_DEPENDENCY,
            };
        }
        self.path.insert(st.clone(), depth);
        let out = self.expand(st, l, depth);
        self.path.remove(st);
        let e = self.memo.entry(st.clone()).or_default();
        match out {
            Outcome::Proved(ref p, d) => {
                if e.proof.as_ref().is_none_or(|(_, old)| d < *old) {
                    e.proof = Some((p.clone(), d));
                }
                out
            }
            Outcome::Failed { hit, low } if low >= depth => {
                if hit {
                    let len = self.max_len;
                    if !e.fails.iter().any(|&(fl, fm)| l <= fl && len <= fm) {
                        e.fails.retain(|&(fl, fm)| !(fl <= l && fm <= len));
                        e.fails.push((l, len));
                    }
                } else {
                    e.definitive = true;
                }
                Outcome::Failed {
                    hit,
                    low: NO_DEPENDENCY,
                }
            }
            failed => failed,
        }
    }

    fn expand(&mut self, st: &State, l: usize, depth: usize) -> Outcome {
        let mut hit = false;
        let mut low = NO_DEPENDENCY;
        let note = |o: &Outcome, hit: &mut bool, low: &mut usize| {
            if let Outcome::Failed { hit: h, low: w } = o {
                *hit |= *h;
                *low = (*low).min(*w);
            }
        };
        let candidates = self
            .by_conclusion
            .get(&st.succ)
            .cloned()
            .unwrap_or_default();
        for rule in candidates {
            match self.rules[rule] {
                Rule::B1(p, q, _) => {
                    let n = st.ant.len();
                    let splits: Vec<usize> = if self.axiom_only(p) {
                        if st.ant.first() == Some(&p) {
                            vec![1]
                        } else {
                            vec![]
                        }
                    } else if self.axiom_only(q) {
                        if st.ant.last() == Some(&q) {
                            vec![n - 1]
                        } else {
                            vec![]
                        }
                    } else {
                        (0..=n).collect()
                    };
                    for j in splits {
                        let left = State {
                            ant: st.ant[..j].to_vec(),
                            succ: p,
                        };
                        let lo = self.solve(&left, l - 1, depth + 1);
                        note(&lo, &mut hit, &mut low);
                        let Outcome::Proved(lp, ld) = lo else {
                            continue;
                        };
                        let right = State {
                            ant: st.ant[j..].to_vec(),
                            succ: q,
                        };
                        let ro = self.solve(&right, l - 1, depth + 1);
                        note(&ro, &mut hit, &mut low);
                        if let Outcome::Proved(rp, rd) = ro {
                            let plan = Plan::B1 {
                                rule,
                                split: j,
                                left: lp,
                                right: rp,
                            };
                            return Outcome::Proved(Rc::new(plan), 1 + ld.max(rd));
                        }
                    }
                }
                Rule::B2(p, q, _) => {
                    if self.axiom_only(p) && !(st.ant.is_empty() && p == q) {
                        continue;
                    }
                    let mut ant = st.ant.clone();
                    ant.push(q);
                    let o = self.solve(&State { ant, succ: p }, l - 1, depth + 1);
                    note(&o, &mut hit, &mut low);
                    if let Outcome::Proved(above, d) = o {
                        return Outcome::Proved(Rc::new(Plan::B2 { rule, above }), 1 + d);
                    }
                }
            }
        }
        Outcome::Failed { hit, low }
    }

    fn build(&self, plan: &Plan, st: &State) -> Derivation {
        let f = |i: Id| Formula::atom(&self.atoms[i as usize]);
        let seq = |s: &State| Sequent::new(s.ant.iter().map(|&i| f(i)).collect(), f(s.succ));
        match plan {
            Plan::Axiom => Derivation::axiom(f(st.succ)),
            Plan::B1 {
                rule,
                split,
                left,
                right,
            } => {
                let Rule::B1(p, q, _) = self.rules[*rule] else {
                    unreachable!()
                };
                let ls = State {
                    ant: st.ant[..*split].to_vec(),
                    succ: p,
                };
                let rs = State {
                    ant: st.ant[*split..].to_vec(),
                    succ: q,
                };
                Derivation::new(
                    RuleTag::B1 {
                        rule: *rule,
                        split: *split,
                    },
                    seq(st),
                    vec![self.build(left, &ls), self.build(right, &rs)],
                )
            }
            Plan::B2 { rule, above } => {
                let Rule::B2(p, q, _) = self.rules[*rule] else {
                    unreachable!()
                };
                let mut ant = st.ant.clone();
                ant.push(q);
                let up = State { ant, succ: p };
                Derivation::new(
                    RuleTag::B2 { rule: *rule },
                    seq(st),
                    vec![self.build(above, &up)],
                )
            }
        }
    }
}
