//! Bottom-up saturation for sequents of atoms in `L* + R`.
//!
//! Starting from axioms, applies Buszkowski rules forward while keeping every
//! antecedent within a length bound. Within that bound the saturation is
//! complete, so raising the bound step by step finds any derivation whose
//! sequents are all short, however deep it is.

use std::collections::HashMap;

use crate::calculus::{BusRule, Derivation, RuleSet, RuleTag};
use crate::formula::{Atom, Formula, Sequent};

type Id = u32;

#[derive(Clone, Copy)]
enum Source {
    Axiom,
    B1 {
        rule: usize,
        left: usize,
        right: usize,
    },
    B2 {
        rule: usize,
        above: usize,
    },
}

struct Item {
    ant: Vec<Id>,
    succ: Id,
    source: Source,
}

#[derive(Default)]
struct Store {
    items: Vec<Item>,
    index: HashMap<(Vec<Id>, Id), usize>,
    by_succ: HashMap<Id, Vec<usize>>,
}

impl Store {
    fn push(&mut self, ant: Vec<Id>, succ: Id, source: Source) {
        let key = (ant, succ);
        if self.index.contains_key(&key) {
            return;
        }
        let i = self.items.len();
        self.by_succ.entry(succ).or_default().push(i);
        self.items.push(Item {
            ant: key.0.clone(),
            succ,
            source,
        });
        self.index.insert(key, i);
    }
}

enum Rule {
    B1(Id, Id, Id),
    B2(Id, Id, Id),
}

pub(super) struct Saturation {
    atoms: Vec<Atom>,
    ids: HashMap<Atom, Id>,
    rules: Vec<Rule>,
    /// Rule indices by premise atom (`p` or `q` for B1, `p` for B2).
    by_premise: HashMap<Id, Vec<usize>>,
    work: usize,
}

pub(super) enum Outcome {
    Proved(Derivation),
    /// The saturation at this bound closed without reaching the goal.
    Closed,
    OutOfBudget,
}

impl Saturation {
    pub(super) fn new(rules: &RuleSet) -> Saturation {
        let mut s = Saturation {
            atoms: Vec::new(),
            ids: HashMap::new(),
            rules: Vec::new(),
            by_premise: HashMap::new(),
            work: 0,
        };
        for (i, r) in rules.rules.iter().enumerate() {
            let rule = match r {
                BusRule::B1 { p, q, r } => Rule::B1(s.id(p), s.id(q), s.id(r)),
                BusRule::B2 { p, q, r } => Rule::B2(s.id(p), s.id(q), s.id(r)),
            };
            match rule {
                Rule::B1(p, q, _) => {
                    s.by_premise.entry(p).or_default().push(i);
                    if q != p {
                        s.by_premise.entry(q).or_default().push(i);
                    }
                }
                Rule::B2(p, _, _) => s.by_premise.entry(p).or_default().push(i),
            }
            s.rules.push(rule);
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

    /// Rule applications attempted so far, over all calls.
    pub(super) fn work(&self) -> usize {
        self.work
    }

    /// Saturates with antecedents of at most `max_len` atoms. `None` if
    /// `goal` is not a sequent of atoms.
    pub(super) fn run(
        &mut self,
        goal: &Sequent,
        max_len: usize,
        max_work: usize,
    ) -> Option<Outcome> {
        let mut gant = Vec::new();
        for f in &goal.antecedent {
            gant.push(self.id(f.as_var()?));
        }
        let gsucc = self.id(goal.succedent.as_var()?);

        let mut st = Store::default();
        for a in 0..self.atoms.len() as Id {
            st.push(vec![a], a, Source::Axiom);
        }
        let mut next = 0;
        while next < st.items.len() {
            let cur = next;
            next += 1;
            if st.items[cur].ant == gant && st.items[cur].succ == gsucc {
                return Some(Outcome::Proved(self.build(&st.items, cur)));
            }
            let a = st.items[cur].succ;
            let Some(rules) = self.by_premise.get(&a) else {
                continue;
            };
            for &rule in rules {
                match self.rules[rule] {
                    Rule::B1(p, q, r) => {
                        // as left premise, then as right premise
                        for side in [0, 1] {
                            let (other, mine) = if side == 0 { (q, p) } else { (p, q) };
                            if mine != a {
                                continue;
                            }
                            let partners = st.by_succ.get(&other).cloned().unwrap_or_default();
                            for j in partners {
                                if j > cur {
                                    continue;
                                }
                                self.work += 1;
                                if self.work > max_work {
                                    return Some(Outcome::OutOfBudget);
                                }
                                if st.items[cur].ant.len() + st.items[j].ant.len() > max_len {
                                    continue;
                                }
                                let (left, right) = if side == 0 { (cur, j) } else { (j, cur) };
                                let mut ant = st.items[left].ant.clone();
                                ant.extend_from_slice(&st.items[right].ant);
                                st.push(ant, r, Source::B1 { rule, left, right });
                            }
                        }
                    }
                    Rule::B2(_, q, r) => {
                        self.work += 1;
                        if self.work > max_work {
                            return Some(Outcome::OutOfBudget);
                        }
                        if st.items[cur].ant.last() == Some(&q) {
                            let ant = st.items[cur].ant[..st.items[cur].ant.len() - 1].to_vec();
                            st.push(ant, r, Source::B2 { rule, above: cur });
                        }
                    }
                }
            }
        }
        Some(Outcome::Closed)
    }

    fn build(&self, items: &[Item], i: usize) -> Derivation {
        let f = |a: Id| Formula::atom(&self.atoms[a as usize]);
        let it = &items[i];
        let seq = Sequent::new(it.ant.iter().map(|&a| f(a)).collect(), f(it.succ));
        match it.source {
            Source::Axiom => Derivation::axiom(f(it.succ)),
            Source::B1 { rule, left, right } => Derivation::new(
                RuleTag::B1 {
                    rule,
                    split: items[left].ant.len(),
                },
                seq,
                vec![self.build(items, left), self.build(items, right)],
            ),
            Source::B2 { rule, above } => {
                Derivation::new(RuleTag::B2 { rule }, seq, vec![self.build(items, above)])
            }
        }
    }
}
