//! Forward enumeration of derivations, smallest first.
//!
//! Sequents are generated bottom-up from axioms by every rule of the system,
//! keeping for each sequent the size of its smallest derivation (a
//! Dijkstra-style closure, since a rule's conclusion size is one plus the sum
//! of its premise sizes). Only sequents that can occur in a derivation of the
//! goal are kept:
//!
//! - antecedent formulas are negative subformulas of the goal, succedents
//!   positive ones (rule atoms are added to both);
//! - a compound formula not under `!` occurs no more often than it occurs
//!   negatively in the goal, since no rule duplicates it;
//! - when every `!` is on a variable and there are no rules, each atom is
//!   balanced: its positive occurrences are bounded by those in the goal and
//!   match the negative ones, with each negative `!p` standing for at least
//!   one `p`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};

use crate::calculus::{BusRule, System};
use crate::formula::{Atom, Formula, Sequent};

/// True iff `goal` has a cut-free derivation in `sys` with at most
/// `size_bound` nodes. Exponential; meant for small goals.
pub fn brute_force_derivable(goal: &Sequent, sys: &System, size_bound: usize) -> bool {
    if !sys.has_bang() && goal.contains_bang() {
        return false;
    }
    Closure::new(goal, sys, size_bound).run()
}

#[derive(Default, Clone, Copy)]
struct Tally {
    pos: i64,
    neg: i64,
    bang: i64,
}

struct Closure<'a> {
    goal: &'a Sequent,
    sys: &'a System,
    bound: usize,
    negative: HashSet<Formula>,
    positive: HashSet<Formula>,
    /// Compound non-banged formula -> negative occurrences in the goal.
    caps: HashMap<Formula, usize>,
    /// Goal's positive occurrences per atom, when counting applies.
    atom_caps: Option<BTreeMap<Atom, i64>>,
    best: HashMap<Sequent, usize>,
    settled: Vec<(Sequent, usize)>,
    heap: BinaryHeap<Reverse<(usize, Sequent)>>,
}

fn subformulas(
    f: &Formula,
    positive: bool,
    pos: &mut HashSet<Formula>,
    neg: &mut HashSet<Formula>,
) {
    if positive {
        pos.insert(f.clone());
    } else {
        neg.insert(f.clone());
    }
    match f {
        Formula::Var(_) => {}
        Formula::Over(num, den) => {
            subformulas(num, positive, pos, neg);
            subformulas(den, !positive, pos, neg);
        }
        Formula::Under(den, num) => {
            subformulas(den, !positive, pos, neg);
            subformulas(num, positive, pos, neg);
        }
        Formula::Bang(body) => subformulas(body, positive, pos, neg),
    }
}

fn negative_occurrences(f: &Formula, positive: bool, caps: &mut HashMap<Formula, usize>) {
    match f {
        Formula::Var(_) => return,
        Formula::Bang(body) => {
            negative_occurrences(body, positive, caps);
            return;
        }
        _ => {}
    }
    if !positive {
        *caps.entry(f.clone()).or_insert(0) += 1;
    }
    match f {
        Formula::Over(num, den) => {
            negative_occurrences(num, positive, caps);
            negative_occurrences(den, !positive, caps);
        }
        Formula::Under(den, num) => {
            negative_occurrences(den, !positive, caps);
            negative_occurrences(num, positive, caps);
        }
        _ => unreachable!(),
    }
}

fn count_atoms(f: &Formula, positive: bool, out: &mut BTreeMap<Atom, Tally>) {
    match f {
        Formula::Var(a) => {
            let t = out.entry(a.clone()).or_default();
            if positive {
                t.pos += 1;
            } else {
                t.neg += 1;
            }
        }
        Formula::Over(num, den) => {
            count_atoms(num, positive, out);
            count_atoms(den, !positive, out);
        }
        Formula::Under(den, num) => {
            count_atoms(den, !positive, out);
            count_atoms(num, positive, out);
        }
        Formula::Bang(body) => match (&**body, positive) {
            (Formula::Var(a), false) => out.entry(a.clone()).or_default().bang += 1,
            _ => count_atoms(body, positive, out),
        },
    }
}

impl<'a> Closure<'a> {
    fn new(goal: &'a Sequent, sys: &'a System, bound: usize) -> Closure<'a> {
        let mut positive = HashSet::new();
        let mut negative = HashSet::new();
        let mut caps = HashMap::new();
        for f in &goal.antecedent {
            subformulas(f, false, &mut positive, &mut negative);
            negative_occurrences(f, false, &mut caps);
        }
        subformulas(&goal.succedent, true, &mut positive, &mut negative);
        negative_occurrences(&goal.succedent, true, &mut caps);
        for r in &sys.rules().rules {
            for a in r.atoms() {
                positive.insert(Formula::atom(a));
                negative.insert(Formula::atom(a));
            }
        }
        let counting = sys.rules().is_empty() && goal.formulas().all(Formula::bang_on_vars_only);
        let atom_caps = counting.then(|| {
            let mut t = BTreeMap::new();
            for f in &goal.antecedent {
                count_atoms(f, false, &mut t);
            }
            count_atoms(&goal.succedent, true, &mut t);
            t.into_iter().map(|(a, x)| (a, x.pos)).collect()
        });
        // compound caps only hold when no compound formula sits under `!`
        let caps = if goal.formulas().all(Formula::bang_on_vars_only) {
            caps
        } else {
            HashMap::new()
        };
        Closure {
            goal,
            sys,
            bound,
            negative,
            positive,
            caps,
            atom_caps,
            best: HashMap::new(),
            settled: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn admissible(&self, s: &Sequent) -> bool {
        if !self.positive.contains(&s.succedent)
            || !s.antecedent.iter().all(|f| self.negative.contains(f))
        {
            return false;
        }
        if !self.caps.is_empty() {
            let mut seen: HashMap<&Formula, usize> = HashMap::new();
            for f in &s.antecedent {
                if let Some(&cap) = self.caps.get(f) {
                    let n = seen.entry(f).or_insert(0);
                    *n += 1;
                    if *n > cap {
                        return false;
                    }
                } else if !f.is_var() && !f.is_bang() {
                    return false;
                }
            }
        }
        if let Some(atom_caps) = &self.atom_caps {
            let mut t = BTreeMap::new();
            for f in &s.antecedent {
                count_atoms(f, false, &mut t);
            }
            count_atoms(&s.succedent, true, &mut t);
            for (a, x) in t {
                let cap = atom_caps.get(&a).copied().unwrap_or(0);
                if x.pos > cap || x.pos < x.neg + x.bang || (x.bang == 0 && x.pos != x.neg) {
                    return false;
                }
            }
        }
        true
    }

    fn offer(&mut self, s: Sequent, size: usize) {
        if size > self.bound {
            return;
        }
        if self.best.get(&s).is_some_and(|&b| b <= size) {
            return;
        }
        if !self.admissible(&s) {
            return;
        }
        self.best.insert(s.clone(), size);
        self.heap.push(Reverse((size, s)));
    }

    fn run(mut self) -> bool {
        if !self.admissible(self.goal) {
            return false;
        }
        let shared: Vec<Formula> = self
            .negative
            .iter()
            .filter(|f| self.positive.contains(*f))
            .cloned()
            .collect();
        for f in shared {
            self.offer(Sequent::new(vec![f.clone()], f), 1);
        }
        let mut done: HashSet<Sequent> = HashSet::new();
        while let Some(Reverse((size, s))) = self.heap.pop() {
            if done.contains(&s) || self.best.get(&s) != Some(&size) {
                continue;
            }
            if s == *self.goal {
                return true;
            }
            done.insert(s.clone());
            self.unary(&s, size);
            self.settled.push((s.clone(), size));
            let partners = self.settled.clone();
            for (t, tsize) in &partners {
                let total = size + tsize + 1;
                if total > self.bound {
                    continue;
                }
                self.binary(&s, t, total);
                if t != &s {
                    self.binary(t, &s, total);
                }
            }
        }
        false
    }

    fn unary(&mut self, s: &Sequent, size: usize) {
        let ant = &s.antecedent;
        let succ = &s.succedent;
        let n = ant.len();
        let next = size + 1;
        if let Some(last) = ant.last() {
            let f = Formula::over(succ.clone(), last.clone());
            self.offer(Sequent::new(ant[..n - 1].to_vec(), f), next);
            let f = Formula::under(ant[0].clone(), succ.clone());
            self.offer(Sequent::new(ant[1..].to_vec(), f), next);
        }
        for r in &self.sys.rules().rules.clone() {
            if let BusRule::B2 { p, q, r } = r {
                if succ == &Formula::atom(p) && ant.last() == Some(&Formula::atom(q)) {
                    self.offer(Sequent::new(ant[..n - 1].to_vec(), Formula::atom(r)), next);
                }
            }
        }
        if !self.sys.has_bang() {
            return;
        }
        for i in 0..n {
            let mut a = ant.clone();
            a[i] = Formula::bang(ant[i].clone());
            self.offer(Sequent::new(a, succ.clone()), next);
        }
        if ant.iter().all(Formula::is_bang) {
            self.offer(Sequent::new(ant.clone(), Formula::bang(succ.clone())), next);
        }
        for i in 0..n {
            if !ant[i].is_bang() {
                continue;
            }
            for j in 0..n {
                if i != j {
                    let mut a = ant.clone();
                    let f = a.remove(i);
                    a.insert(j, f);
                    self.offer(Sequent::new(a, succ.clone()), next);
                }
            }
            if i + 1 < n && ant[i + 1] == ant[i] {
                let mut a = ant.clone();
                a.remove(i + 1);
                self.offer(Sequent::new(a, succ.clone()), next);
            }
        }
    }

    /// Rules with `s` as the first premise and `t` as the second.
    fn binary(&mut self, s: &Sequent, t: &Sequent, total: usize) {
        let a = &s.succedent;
        for (k, b) in t.antecedent.iter().enumerate() {
            // s: Γ → A, t: Δ1, B, Δ2 → C
            let over = Formula::over(b.clone(), a.clone());
            if self.negative.contains(&over) {
                let mut ant = t.antecedent[..k].to_vec();
                ant.push(over);
                ant.extend(s.antecedent.iter().cloned());
                ant.extend(t.antecedent[k + 1..].iter().cloned());
                self.offer(Sequent::new(ant, t.succedent.clone()), total);
            }
            let under = Formula::under(a.clone(), b.clone());
            if self.negative.contains(&under) {
                let mut ant = t.antecedent[..k].to_vec();
                ant.extend(s.antecedent.iter().cloned());
                ant.push(under);
                ant.extend(t.antecedent[k + 1..].iter().cloned());
                self.offer(Sequent::new(ant, t.succedent.clone()), total);
            }
        }
        for r in &self.sys.rules().rules.clone() {
            if let BusRule::B1 { p, q, r } = r {
                if s.succedent == Formula::atom(p) && t.succedent == Formula::atom(q) {
                    let mut ant = s.antecedent.clone();
                    ant.extend(t.antecedent.iter().cloned());
                    self.offer(Sequent::new(ant, Formula::atom(r)), total);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::RuleSet;
    use crate::syntax::parse_sequent;

    fn seq(s: &str) -> Sequent {
        parse_sequent(s).unwrap()
    }

    #[test]
    fn small_cases() {
        let l = System::lstar();
        assert!(brute_force_derivable(&seq("p -> p"), &l, 1));
        assert!(brute_force_derivable(&seq("-> p/p"), &l, 5));
        assert!(!brute_force_derivable(&seq("-> p/p"), &l, 1));
        assert!(!brute_force_derivable(&seq("q, p -> p"), &l, 50));
    }

    #[test]
    fn modal_cases() {
        let b = System::bang_lstar();
        assert!(!brute_force_derivable(&seq("!p, q -> q"), &b, 200));
        // three axioms, two (/→), two (!→), one contraction; no permutation needed
        assert!(brute_force_derivable(&seq("(q/p)/p, !p -> q"), &b, 8));
        assert!(!brute_force_derivable(&seq("(q/p)/p, !p -> q"), &b, 7));
        assert!(brute_force_derivable(&seq("s/!p -> !p\\s"), &b, 50));
    }

    #[test]
    fn with_rules() {
        let sys = System::with_rules(RuleSet::new(vec![BusRule::b1("p", "q", "r")]));
        assert!(brute_force_derivable(&seq("p, q -> r"), &sys, 3));
        assert!(!brute_force_derivable(&seq("q, p -> r"), &sys, 30));
        let sys = System::with_rules(RuleSet::new(vec![BusRule::b2("p", "q", "r")]));
        assert!(brute_force_derivable(&seq("p/q -> r"), &sys, 5));
    }
}
