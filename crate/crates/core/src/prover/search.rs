//! Backward search over canonical states.
//!
//! A state is `(M, L, C)`: the multiset `M` of banged antecedent formulas,
//! the ordered list `L` of the others, and the succedent. Permutations let a
//! banged formula reach any position, so only its membership in `M` matters.
//! Plans found here are turned into concrete trees by [`Search::materialize`],
//! which inserts the permutation steps.

use std::collections::HashMap;
use std::rc::Rc;

use super::balance;
use crate::calculus::{permute_to, BusRule, Derivation, RuleTag, System};
use crate::formula::{Atom, Formula, Sequent};

type FId = u32;

#[derive(Clone, Copy, Debug)]
enum Node {
    Var(usize),
    Over(FId, FId),
    Under(FId, FId),
    Bang(FId),
}

#[derive(Default)]
struct Interner {
    ids: HashMap<Formula, FId>,
    forms: Vec<Formula>,
    nodes: Vec<Node>,
    atoms: HashMap<Atom, usize>,
}

impl Interner {
    fn atom(&mut self, a: &Atom) -> usize {
        let n = self.atoms.len();
        *self.atoms.entry(a.clone()).or_insert(n)
    }

    fn intern(&mut self, f: &Formula) -> FId {
        if let Some(&id) = self.ids.get(f) {
            return id;
        }
        let node = match f {
            Formula::Var(a) => Node::Var(self.atom(a)),
            Formula::Over(num, den) => Node::Over(self.intern(num), self.intern(den)),
            Formula::Under(den, num) => Node::Under(self.intern(den), self.intern(num)),
            Formula::Bang(b) => Node::Bang(self.intern(b)),
        };
        let id = self.forms.len() as FId;
        self.forms.push(f.clone());
        self.nodes.push(node);
        self.ids.insert(f.clone(), id);
        id
    }

    fn node(&self, id: FId) -> Node {
        self.nodes[id as usize]
    }

    fn formula(&self, id: FId) -> &Formula {
        &self.forms[id as usize]
    }

    fn is_bang(&self, id: FId) -> bool {
        matches!(self.node(id), Node::Bang(_))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct State {
    /// Sorted.
    bangs: Vec<FId>,
    list: Vec<FId>,
    succ: FId,
}

#[derive(Clone, Debug)]
enum Step {
    Axiom,
    OverRight,
    UnderRight,
    BangRight,
    OverLeft {
        i: usize,
        g: usize,
        gamma_bangs: Vec<FId>,
    },
    UnderLeft {
        i: usize,
        g: usize,
        gamma_bangs: Vec<FId>,
    },
    BangLeft {
        bang: FId,
        k: usize,
    },
    Contr {
        bang: FId,
    },
    B1 {
        rule: usize,
        j: usize,
        left_bangs: Vec<FId>,
    },
    B2 {
        rule: usize,
    },
}

#[derive(Debug)]
struct Plan {
    step: Step,
    children: Vec<Rc<Plan>>,
    /// Largest number of logical steps on one branch.
    logical: usize,
    /// Largest number of contractions on one branch.
    contr: usize,
}

impl Plan {
    fn new(step: Step, children: Vec<Rc<Plan>>) -> Rc<Plan> {
        let l = children.iter().map(|c| c.logical).max().unwrap_or(0);
        let c = children.iter().map(|c| c.contr).max().unwrap_or(0);
        let (logical, contr) = match step {
            Step::Axiom => (0, 0),
            Step::Contr { .. } => (l, c + 1),
            _ => (l + 1, c),
        };
        Rc::new(Plan {
            step,
            children,
            logical,
            contr,
        })
    }
}

enum Outcome {
    Proved(Rc<Plan>),
    /// `hit` records whether some branch was cut by the budget.
    Failed {
        hit: bool,
    },
}

#[derive(Default)]
struct Entry {
    proof: Option<Rc<Plan>>,
    definitive: bool,
    /// Budgets known to fail; an antichain.
    fails: Vec<(usize, usize)>,
}

pub(crate) enum SearchResult {
    Proved(Derivation),
    Exhausted,
    Cut(String),
}

pub(crate) struct Search<'a> {
    sys: &'a System,
    it: Interner,
    memo: HashMap<State, Entry>,
    nodes: usize,
    max_nodes: usize,
    aborted: bool,
    prune: bool,
    base: Vec<i64>,
    wild: Vec<bool>,
    cols: Vec<Vec<i64>>,
    col_of: Vec<FId>,
    lower: Vec<i64>,
}

impl<'a> Search<'a> {
    pub(crate) fn new(sys: &'a System, max_nodes: usize) -> Search<'a> {
        let mut it = Interner::default();
        for r in &sys.rules().rules {
            for a in r.atoms() {
                it.atom(a);
            }
        }
        Search {
            sys,
            it,
            memo: HashMap::new(),
            nodes: 0,
            max_nodes,
            aborted: false,
            // atom counting is unsound once Buszkowski rules can create atoms
            prune: sys.rules().is_empty(),
            base: Vec::new(),
            wild: Vec::new(),
            cols: Vec::new(),
            col_of: Vec::new(),
            lower: Vec::new(),
        }
    }

    pub(crate) fn nodes(&self) -> usize {
        self.nodes
    }

    /// Runs the search with per-branch limits growing toward `max_logical`
    /// and `max_contr`.
    pub(crate) fn run(
        &mut self,
        goal: &Sequent,
        max_logical: usize,
        max_contr: usize,
    ) -> SearchResult {
        let root = self.state_of(&goal.antecedent, &goal.succedent);
        if !self.viable(&root) {
            return SearchResult::Exhausted;
        }
        let mut l = max_logical.min(4);
        let mut c = 0;
        loop {
            match self.solve(&root, l, c) {
                Outcome::Proved(plan) => {
                    let d =
                        self.materialize(&plan, goal.antecedent.clone(), goal.succedent.clone());
                    return SearchResult::Proved(d);
                }
                Outcome::Failed { hit: false } => return SearchResult::Exhausted,
                Outcome::Failed { hit: true } => {
                    if self.aborted {
                        return SearchResult::Cut(format!(
                            "search-node cap of {} reached",
                            self.max_nodes
                        ));
                    }
                    if l >= max_logical && c >= max_contr {
                        return SearchResult::Cut(format!(
                            "no proof within {max_logical} logical steps and {max_contr} contractions per branch"
                        ));
                    }
                    l = l.saturating_mul(2).min(max_logical);
                    c = if c == 0 { 1 } else { c.saturating_mul(2) }.min(max_contr);
                }
            }
        }
    }

    fn state_of(&mut self, ant: &[Formula], succ: &Formula) -> State {
        let mut bangs = Vec::new();
        let mut list = Vec::new();
        for f in ant {
            let id = self.it.intern(f);
            if self.it.is_bang(id) {
                bangs.push(id);
            } else {
                list.push(id);
            }
        }
        bangs.sort_unstable();
        State {
            bangs,
            list,
            succ: self.it.intern(succ),
        }
    }

    // Counting invariant of derivable sequents: each atom has as many
    // positive as negative occurrences once every negative `!F` is counted
    // `k_F ≥ 1` times per copy. `balance::may_balance` checks the resulting
    // linear system. Bodies holding a further negative `!` are left out and
    // their atoms dropped from the system.

    fn tally(&mut self, id: FId, positive: bool, col: Option<usize>) {
        match self.it.node(id) {
            Node::Var(a) => {
                let d = if positive { 1 } else { -1 };
                match col {
                    Some(j) => self.cols[j][a] += d,
                    None => self.base[a] += d,
                }
            }
            Node::Over(x, y) => {
                self.tally(x, positive, col);
                self.tally(y, !positive, col);
            }
            Node::Under(y, x) => {
                self.tally(y, !positive, col);
                self.tally(x, positive, col);
            }
            Node::Bang(b) => {
                if positive {
                    self.tally(b, true, col);
                } else if col.is_some() || self.negative_bang_inside(b, false) {
                    self.mark_wild(b);
                } else {
                    let j = match self.col_of.iter().position(|&f| f == b) {
                        Some(j) => j,
                        None => {
                            self.col_of.push(b);
                            self.cols.push(vec![0; self.base.len()]);
                            self.lower.push(0);
                            self.cols.len() - 1
                        }
                    };
                    self.lower[j] += 1;
                    if self.lower[j] == 1 {
                        self.tally(b, false, Some(j));
                    }
                }
            }
        }
    }

    fn negative_bang_inside(&self, id: FId, positive: bool) -> bool {
        match self.it.node(id) {
            Node::Var(_) => false,
            Node::Over(x, y) | Node::Under(y, x) => {
                self.negative_bang_inside(x, positive) || self.negative_bang_inside(y, !positive)
            }
            Node::Bang(b) => !positive || self.negative_bang_inside(b, positive),
        }
    }

    fn mark_wild(&mut self, id: FId) {
        match self.it.node(id) {
            Node::Var(a) => self.wild[a] = true,
            Node::Over(x, y) | Node::Under(x, y) => {
                self.mark_wild(x);
                self.mark_wild(y);
            }
            Node::Bang(b) => self.mark_wild(b),
        }
    }

    fn viable(&mut self, st: &State) -> bool {
        if !self.prune {
            return true;
        }
        let n = self.it.atoms.len();
        self.base.clear();
        self.base.resize(n, 0);
        self.wild.clear();
        self.wild.resize(n, false);
        self.cols.clear();
        self.col_of.clear();
        self.lower.clear();
        for &f in st.bangs.iter().chain(&st.list) {
            self.tally(f, false, None);
        }
        self.tally(st.succ, true, None);
        let keep: Vec<usize> = (0..n).filter(|&a| !self.wild[a]).collect();
        let base: Vec<i64> = keep.iter().map(|&a| self.base[a]).collect();
        let cols: Vec<Vec<i64>> = self
            .cols
            .iter()
            .map(|c| keep.iter().map(|&a| c[a]).collect())
            .collect();
        balance::may_balance(&base, &cols, &self.lower)
    }

    fn solve(&mut self, st: &State, l: usize, c: usize) -> Outcome {
        if self.aborted {
            return Outcome::Failed { hit: true };
        }
        if let Some(e) = self.memo.get(st) {
            if let Some(p) = &e.proof {
                if p.logical <= l && p.contr <= c {
                    return Outcome::Proved(p.clone());
                }
            }
            if e.definitive {
                return Outcome::Failed { hit: false };
            }
            if e.fails.iter().any(|&(fl, fc)| l <= fl && c <= fc) {
                return Outcome::Failed { hit: true };
            }
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.aborted = true;
            return Outcome::Failed { hit: true };
        }
        let out = self.expand(st, l, c);
        let e = self.memo.entry(st.clone()).or_default();
        match &out {
            Outcome::Proved(p) => {
                let better = e
                    .proof
                    .as_ref()
                    .is_none_or(|q| p.logical <= q.logical && p.contr <= q.contr);
                if better {
                    e.proof = Some(p.clone());
                }
            }
            Outcome::Failed { hit: false } => e.definitive = true,
            Outcome::Failed { hit: true } => {
                if !e.fails.iter().any(|&(fl, fc)| l <= fl && c <= fc) {
                    e.fails.retain(|&(fl, fc)| !(fl <= l && fc <= c));
                    e.fails.push((l, c));
                }
            }
        }
        out
    }

    /// Tries every child in turn; `None` means keep looking.
    fn try_unary(
        &mut self,
        step: Step,
        child: State,
        l: usize,
        c: usize,
        hit: &mut bool,
    ) -> Option<Rc<Plan>> {
        if !self.viable(&child) {
            return None;
        }
        match self.solve(&child, l, c) {
            Outcome::Proved(p) => Some(Plan::new(step, vec![p])),
            Outcome::Failed { hit: h } => {
                *hit |= h;
                None
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn try_binary(
        &mut self,
        step: Step,
        first: State,
        second: State,
        l: usize,
        c: usize,
        hit: &mut bool,
    ) -> Option<Rc<Plan>> {
        if !self.viable(&first) || !self.viable(&second) {
            return None;
        }
        let p0 = match self.solve(&first, l, c) {
            Outcome::Proved(p) => p,
            Outcome::Failed { hit: h } => {
                *hit |= h;
                return None;
            }
        };
        match self.solve(&second, l, c) {
            Outcome::Proved(p1) => Some(Plan::new(step, vec![p0, p1])),
            Outcome::Failed { hit: h } => {
                *hit |= h;
                None
            }
        }
    }

    fn with_formula(
        &self,
        mut bangs: Vec<FId>,
        mut list: Vec<FId>,
        at: usize,
        f: FId,
        succ: FId,
    ) -> State {
        if self.it.is_bang(f) {
            bangs.push(f);
            bangs.sort_unstable();
        } else {
            list.insert(at, f);
        }
        State { bangs, list, succ }
    }

    fn expand(&mut self, st: &State, l: usize, c: usize) -> Outcome {
        let is_axiom = (st.bangs.is_empty() && st.list.len() == 1 && st.list[0] == st.succ)
            || (st.list.is_empty() && st.bangs.len() == 1 && st.bangs[0] == st.succ);
        if is_axiom {
            return Outcome::Proved(Plan::new(Step::Axiom, vec![]));
        }
        if l == 0 {
            return Outcome::Failed {
                hit: self.any_logical(st),
            };
        }
        let mut hit = false;
        let has_bang = self.sys.has_bang();

        // right rules are invertible, so they are applied eagerly
        match self.it.node(st.succ) {
            Node::Over(num, den) => {
                let n = st.list.len();
                let child = self.with_formula(st.bangs.clone(), st.list.clone(), n, den, num);
                let p = self.try_unary(Step::OverRight, child, l - 1, c, &mut hit);
                return finish(p, hit);
            }
            Node::Under(den, num) => {
                let child = self.with_formula(st.bangs.clone(), st.list.clone(), 0, den, num);
                let p = self.try_unary(Step::UnderRight, child, l - 1, c, &mut hit);
                return finish(p, hit);
            }
            Node::Bang(body) if has_bang && st.list.is_empty() => {
                let child = State {
                    bangs: st.bangs.clone(),
                    list: vec![],
                    succ: body,
                };
                if let Some(p) = self.try_unary(Step::BangRight, child, l - 1, c, &mut hit) {
                    return Outcome::Proved(p);
                }
            }
            _ => {}
        }

        let splits = multiset_splits(&st.bangs);
        let n = st.list.len();
        for i in 0..n {
            match self.it.node(st.list[i]) {
                Node::Over(num, den) => {
                    for g in 0..n - i {
                        for (m1, m2) in &splits {
                            let gamma = State {
                                bangs: m1.clone(),
                                list: st.list[i + 1..i + 1 + g].to_vec(),
                                succ: den,
                            };
                            let mut rest = st.list[..i].to_vec();
                            rest.extend_from_slice(&st.list[i + 1 + g..]);
                            let main = self.with_formula(m2.clone(), rest, i, num, st.succ);
                            let step = Step::OverLeft {
                                i,
                                g,
                                gamma_bangs: m1.clone(),
                            };
                            if let Some(p) = self.try_binary(step, gamma, main, l - 1, c, &mut hit)
                            {
                                return Outcome::Proved(p);
                            }
                        }
                    }
                }
                Node::Under(den, num) => {
                    for g in 0..=i {
                        for (m1, m2) in &splits {
                            let gamma = State {
                                bangs: m1.clone(),
                                list: st.list[i - g..i].to_vec(),
                                succ: den,
                            };
                            let mut rest = st.list[..i - g].to_vec();
                            rest.extend_from_slice(&st.list[i + 1..]);
                            let main = self.with_formula(m2.clone(), rest, i - g, num, st.succ);
                            let step = Step::UnderLeft {
                                i,
                                g,
                                gamma_bangs: m1.clone(),
                            };
                            if let Some(p) = self.try_binary(step, gamma, main, l - 1, c, &mut hit)
                            {
                                return Outcome::Proved(p);
                            }
                        }
                    }
                }
                _ => {}
            }
        }

        if has_bang {
            let mut distinct = st.bangs.clone();
            distinct.dedup();
            for &b in &distinct {
                let Node::Bang(body) = self.it.node(b) else {
                    unreachable!()
                };
                let mut rest = st.bangs.clone();
                let pos = rest.iter().position(|&x| x == b).unwrap();
                rest.remove(pos);
                let ks = if self.it.is_bang(body) { 0..=0 } else { 0..=n };
                for k in ks {
                    let child = self.with_formula(rest.clone(), st.list.clone(), k, body, st.succ);
                    if let Some(p) =
                        self.try_unary(Step::BangLeft { bang: b, k }, child, l - 1, c, &mut hit)
                    {
                        return Outcome::Proved(p);
                    }
                }
            }
        }

        if let Node::Var(r) = self.it.node(st.succ) {
            let rules = self.sys.rules().rules.clone();
            for (idx, rule) in rules.iter().enumerate() {
                match rule {
                    BusRule::B1 { p, q, r: concl } if self.it.atoms.get(concl) == Some(&r) => {
                        let (p, q) = (
                            self.it.intern(&Formula::atom(p)),
                            self.it.intern(&Formula::atom(q)),
                        );
                        for j in 0..=n {
                            for (m1, m2) in &splits {
                                let left = State {
                                    bangs: m1.clone(),
                                    list: st.list[..j].to_vec(),
                                    succ: p,
                                };
                                let right = State {
                                    bangs: m2.clone(),
                                    list: st.list[j..].to_vec(),
                                    succ: q,
                                };
                                let step = Step::B1 {
                                    rule: idx,
                                    j,
                                    left_bangs: m1.clone(),
                                };
                                if let Some(pl) =
                                    self.try_binary(step, left, right, l - 1, c, &mut hit)
                                {
                                    return Outcome::Proved(pl);
                                }
                            }
                        }
                    }
                    BusRule::B2 { p, q, r: concl } if self.it.atoms.get(concl) == Some(&r) => {
                        let (p, q) = (
                            self.it.intern(&Formula::atom(p)),
                            self.it.intern(&Formula::atom(q)),
                        );
                        let mut list = st.list.clone();
                        list.push(q);
                        let child = State {
                            bangs: st.bangs.clone(),
                            list,
                            succ: p,
                        };
                        if let Some(pl) =
                            self.try_unary(Step::B2 { rule: idx }, child, l - 1, c, &mut hit)
                        {
                            return Outcome::Proved(pl);
                        }
                    }
                    _ => {}
                }
            }
        }

        if has_bang && !st.bangs.is_empty() {
            let mut distinct = st.bangs.clone();
            distinct.dedup();
            for &b in &distinct {
                let mut bangs = st.bangs.clone();
                bangs.push(b);
                bangs.sort_unstable();
                let child = State {
                    bangs,
                    list: st.list.clone(),
                    succ: st.succ,
                };
                if !self.viable(&child) {
                    continue;
                }
                if c == 0 {
                    hit = true;
                    continue;
                }
                if let Some(p) = self.try_unary(Step::Contr { bang: b }, child, l, c - 1, &mut hit)
                {
                    return Outcome::Proved(p);
                }
            }
        }
        Outcome::Failed { hit }
    }

    /// Whether any rule other than an axiom could apply to `st`.
    fn any_logical(&self, st: &State) -> bool {
        if !matches!(self.it.node(st.succ), Node::Var(_)) {
            return true;
        }
        if !st.bangs.is_empty()
            || st
                .list
                .iter()
                .any(|&f| !matches!(self.it.node(f), Node::Var(_)))
        {
            return true;
        }
        let Node::Var(r) = self.it.node(st.succ) else {
            unreachable!()
        };
        self.sys
            .rules()
            .rules
            .iter()
            .any(|rule| self.it.atoms.get(rule.conclusion_atom()) == Some(&r))
    }

    /// Concrete tree for `plan` concluding `ant -> succ`, where `ant` is an
    /// arrangement of the plan's state.
    fn materialize(&self, plan: &Plan, ant: Vec<Formula>, succ: Formula) -> Derivation {
        let kids = &plan.children;
        match &plan.step {
            Step::Axiom => {
                debug_assert_eq!(ant, vec![succ.clone()]);
                Derivation::axiom(succ)
            }
            Step::OverRight => {
                let Formula::Over(num, den) = succ else {
                    unreachable!()
                };
                let mut a = ant;
                a.push(*den);
                Derivation::over_right(self.materialize(&kids[0], a, *num))
            }
            Step::UnderRight => {
                let Formula::Under(den, num) = succ else {
                    unreachable!()
                };
                let mut a = vec![*den];
                a.extend(ant);
                Derivation::under_right(self.materialize(&kids[0], a, *num))
            }
            Step::BangRight => {
                let Formula::Bang(body) = succ else {
                    unreachable!()
                };
                Derivation::bang_right(self.materialize(&kids[0], ant, *body))
            }
            Step::OverLeft { i, g, gamma_bangs } => {
                let nb = non_banged(&ant);
                let p = nb[*i];
                let e = nb.get(i + g + 1).copied().unwrap_or(ant.len());
                let region = |t: usize| p < t && t < e;
                let chosen = self.choose(&ant, gamma_bangs, region);
                let all = 0..ant.len();
                let before: Vec<usize> = (0..p).filter(|&t| !chosen[t]).collect();
                let keep: Vec<usize> = (p + 1..e)
                    .filter(|&t| !ant[t].is_bang() || chosen[t])
                    .collect();
                let outside: Vec<usize> =
                    all.clone().filter(|&t| chosen[t] && !region(t)).collect();
                let out: Vec<usize> = (p + 1..e)
                    .filter(|&t| ant[t].is_bang() && !chosen[t])
                    .collect();
                let after: Vec<usize> = (e..ant.len()).filter(|&t| !chosen[t]).collect();
                let d1 = before.len();
                let glen = keep.len() + outside.len();
                let order: Vec<usize> = before
                    .into_iter()
                    .chain([p])
                    .chain(keep)
                    .chain(outside)
                    .chain(out)
                    .chain(after)
                    .collect();
                let x: Vec<Formula> = order.iter().map(|&t| ant[t].clone()).collect();
                let Formula::Over(num, den) = &ant[p] else {
                    unreachable!()
                };
                let gamma_ant = x[d1 + 1..d1 + 1 + glen].to_vec();
                let mut main_ant = x[..d1].to_vec();
                main_ant.push((**num).clone());
                main_ant.extend_from_slice(&x[d1 + 1 + glen..]);
                let gd = self.materialize(&kids[0], gamma_ant, (**den).clone());
                let md = self.materialize(&kids[1], main_ant, succ);
                permute_to(&ant, Derivation::over_left((**den).clone(), d1, gd, md))
            }
            Step::UnderLeft { i, g, gamma_bangs } => {
                let nb = non_banged(&ant);
                let p = nb[*i];
                // region is (e, p) exclusive; `e` is one before the first slot
                let e = if *i > *g { nb[i - g - 1] as isize } else { -1 };
                let region = |t: usize| (t as isize) > e && t < p;
                let chosen = self.choose(&ant, gamma_bangs, region);
                let start = (e + 1) as usize;
                let before: Vec<usize> = (0..start).filter(|&t| !chosen[t]).collect();
                let out: Vec<usize> = (start..p)
                    .filter(|&t| ant[t].is_bang() && !chosen[t])
                    .collect();
                let outside: Vec<usize> = (0..ant.len())
                    .filter(|&t| chosen[t] && !region(t))
                    .collect();
                let keep: Vec<usize> = (start..p)
                    .filter(|&t| !ant[t].is_bang() || chosen[t])
                    .collect();
                let after: Vec<usize> = (p + 1..ant.len()).filter(|&t| !chosen[t]).collect();
                let d1 = before.len() + out.len();
                let glen = outside.len() + keep.len();
                let order: Vec<usize> = before
                    .into_iter()
                    .chain(out)
                    .chain(outside)
                    .chain(keep)
                    .chain([p])
                    .chain(after)
                    .collect();
                let x: Vec<Formula> = order.iter().map(|&t| ant[t].clone()).collect();
                let Formula::Under(den, num) = &ant[p] else {
                    unreachable!()
                };
                let gamma_ant = x[d1..d1 + glen].to_vec();
                let mut main_ant = x[..d1].to_vec();
                main_ant.push((**num).clone());
                main_ant.extend_from_slice(&x[d1 + glen + 1..]);
                let gd = self.materialize(&kids[0], gamma_ant, (**den).clone());
                let md = self.materialize(&kids[1], main_ant, succ);
                permute_to(&ant, Derivation::under_left((**den).clone(), d1, gd, md))
            }
            Step::BangLeft { bang, k } => {
                let bang = self.it.formula(*bang);
                let body = bang.bang_body().unwrap().clone();
                let mut before = 0;
                let mut hit = None;
                let mut first = None;
                for (t, f) in ant.iter().enumerate() {
                    if f == bang {
                        first.get_or_insert(t);
                        if body.is_bang() || before == *k {
                            hit = Some(t);
                            break;
                        }
                    }
                    if !f.is_bang() {
                        before += 1;
                    }
                }
                if let Some(t) = hit {
                    let mut a = ant;
                    a[t] = body;
                    return Derivation::bang_left(t, self.materialize(&kids[0], a, succ));
                }
                // no copy sits at the right place: move one there first
                let mut x = ant.clone();
                x.remove(first.unwrap());
                let q = non_banged(&x).get(*k).copied().unwrap_or(x.len());
                x.insert(q, bang.clone());
                let mut a = x;
                a[q] = body;
                let top = Derivation::bang_left(q, self.materialize(&kids[0], a, succ));
                permute_to(&ant, top)
            }
            Step::Contr { bang } => {
                let bang = self.it.formula(*bang);
                let t = ant.iter().position(|f| f == bang).unwrap();
                let mut a = ant;
                a.insert(t + 1, bang.clone());
                Derivation::contr(t, self.materialize(&kids[0], a, succ))
            }
            Step::B1 {
                rule,
                j,
                left_bangs,
            } => {
                let BusRule::B1 { p, q, .. } = &self.sys.rules().rules[*rule] else {
                    unreachable!()
                };
                let nb = non_banged(&ant);
                let cut_at = nb.get(*j).copied().unwrap_or(ant.len());
                let chosen = self.choose(&ant, left_bangs, |t| t < cut_at);
                let (left, right): (Vec<usize>, Vec<usize>) = (0..ant.len()).partition(|&t| {
                    if ant[t].is_bang() {
                        chosen[t]
                    } else {
                        t < cut_at
                    }
                });
                let split = left.len();
                let x: Vec<Formula> = left.iter().chain(&right).map(|&t| ant[t].clone()).collect();
                let d0 = self.materialize(&kids[0], x[..split].to_vec(), Formula::atom(p));
                let d1 = self.materialize(&kids[1], x[split..].to_vec(), Formula::atom(q));
                let node = Derivation::new(
                    RuleTag::B1 { rule: *rule, split },
                    Sequent::new(x, succ),
                    vec![d0, d1],
                );
                permute_to(&ant, node)
            }
            Step::B2 { rule } => {
                let BusRule::B2 { p, q, .. } = &self.sys.rules().rules[*rule] else {
                    unreachable!()
                };
                let mut a = ant.clone();
                a.push(Formula::atom(q));
                let child = self.materialize(&kids[0], a, Formula::atom(p));
                Derivation::new(
                    RuleTag::B2 { rule: *rule },
                    Sequent::new(ant, succ),
                    vec![child],
                )
            }
        }
    }

    /// Picks occurrences of the banged formulas `wanted` in `ant`, preferring
    /// positions where `prefer` holds.
    fn choose(&self, ant: &[Formula], wanted: &[FId], prefer: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut chosen = vec![false; ant.len()];
        for &w in wanted {
            let f = self.it.formula(w);
            let pick = (0..ant.len())
                .find(|&t| !chosen[t] && ant[t] == *f && prefer(t))
                .or_else(|| (0..ant.len()).find(|&t| !chosen[t] && ant[t] == *f))
                .expect("planned banged formula present");
            chosen[pick] = true;
        }
        chosen
    }
}

fn finish(p: Option<Rc<Plan>>, hit: bool) -> Outcome {
    match p {
        Some(p) => Outcome::Proved(p),
        None => Outcome::Failed { hit },
    }
}

fn non_banged(ant: &[Formula]) -> Vec<usize> {
    (0..ant.len()).filter(|&t| !ant[t].is_bang()).collect()
}

/// All ways to split a sorted multiset in two, as sorted pairs.
fn multiset_splits(m: &[FId]) -> Vec<(Vec<FId>, Vec<FId>)> {
    let mut groups: Vec<(FId, usize)> = Vec::new();
    for &x in m {
        match groups.last_mut() {
            Some((y, n)) if *y == x => *n += 1,
            _ => groups.push((x, 1)),
        }
    }
    let mut out = vec![(Vec::new(), Vec::new())];
    for (x, n) in groups {
        let mut next = Vec::with_capacity(out.len() * (n + 1));
        for (a, b) in &out {
            for take in 0..=n {
                let mut a2 = a.clone();
                let mut b2 = b.clone();
                a2.extend(std::iter::repeat_n(x, take));
                b2.extend(std::iter::repeat_n(x, n - take));
                next.push((a2, b2));
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_of_multiset() {
        let s = multiset_splits(&[1, 1, 2]);
        assert_eq!(s.len(), 6);
        assert!(s.contains(&(vec![1], vec![1, 2])));
        assert_eq!(multiset_splits(&[]).len(), 1);
    }
}
