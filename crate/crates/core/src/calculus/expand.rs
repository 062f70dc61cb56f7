use super::{Base, BusRule, RuleTag, System};
use crate::formula::{Formula, Sequent};

/// Every cut-free rule instance whose conclusion is `goal`, with its premises.
///
/// Contraction and permutation instances are listed only when
/// `contr_allowed`; permutations that leave the antecedent unchanged are
/// omitted.
pub fn backward_expansions(
    goal: &Sequent,
    sys: &System,
    contr_allowed: bool,
) -> Vec<(RuleTag, Vec<Sequent>)> {
    let mut out = Vec::new();
    let ant = &goal.antecedent;
    let succ = &goal.succedent;
    let n = ant.len();
    if sys.base() == Base::LStar && goal.contains_bang() {
        return out;
    }

    if n == 1 && ant[0] == *succ {
        out.push((RuleTag::Axiom, vec![]));
    }

    match succ {
        Formula::Over(num, den) => {
            let mut a = ant.clone();
            a.push((**den).clone());
            out.push((RuleTag::OverRight, vec![Sequent::new(a, (**num).clone())]));
        }
        Formula::Under(den, num) => {
            let mut a = vec![(**den).clone()];
            a.extend(ant.iter().cloned());
            out.push((RuleTag::UnderRight, vec![Sequent::new(a, (**num).clone())]));
        }
        Formula::Bang(body) if sys.has_bang() && ant.iter().all(Formula::is_bang) => {
            out.push((
                RuleTag::BangRight,
                vec![Sequent::new(ant.clone(), (**body).clone())],
            ));
        }
        _ => {}
    }

    for (i, f) in ant.iter().enumerate() {
        match f {
            Formula::Over(num, den) => {
                for g in 0..n - i {
                    let gamma = ant[i + 1..i + 1 + g].to_vec();
                    let mut rest = ant[..i].to_vec();
                    rest.push((**num).clone());
                    rest.extend(ant[i + 1 + g..].iter().cloned());
                    out.push((
                        RuleTag::OverLeft {
                            principal: i,
                            gamma_len: g,
                        },
                        vec![
                            Sequent::new(gamma, (**den).clone()),
                            Sequent::new(rest, succ.clone()),
                        ],
                    ));
                }
            }
            Formula::Under(den, num) => {
                for g in 0..=i {
                    let gamma = ant[i - g..i].to_vec();
                    let mut rest = ant[..i - g].to_vec();
                    rest.push((**num).clone());
                    rest.extend(ant[i + 1..].iter().cloned());
                    out.push((
                        RuleTag::UnderLeft {
                            principal: i,
                            gamma_len: g,
                        },
                        vec![
                            Sequent::new(gamma, (**den).clone()),
                            Sequent::new(rest, succ.clone()),
                        ],
                    ));
                }
            }
            Formula::Bang(body) if sys.has_bang() => {
                let mut a = ant.clone();
                a[i] = (**body).clone();
                out.push((
                    RuleTag::BangLeft { index: i },
                    vec![Sequent::new(a, succ.clone())],
                ));
                if !contr_allowed {
                    continue;
                }
                let mut a = ant.clone();
                a.insert(i, f.clone());
                out.push((
                    RuleTag::Contr { index: i },
                    vec![Sequent::new(a, succ.clone())],
                ));
                for from in 0..n {
                    let mut a = ant.clone();
                    let moved = a.remove(i);
                    a.insert(from, moved);
                    if a == *ant {
                        continue;
                    }
                    let tag = if from <= i {
                        RuleTag::Perm1 { from, to: i }
                    } else {
                        RuleTag::Perm2 { from, to: i }
                    };
                    out.push((tag, vec![Sequent::new(a, succ.clone())]));
                }
            }
            _ => {}
        }
    }

    if let Some(r) = succ.as_var() {
        for (idx, rule) in sys.rules().rules.iter().enumerate() {
            match rule {
                BusRule::B1 { p, q, r: c } if c == r => {
                    for split in 0..=n {
                        out.push((
                            RuleTag::B1 { rule: idx, split },
                            vec![
                                Sequent::new(ant[..split].to_vec(), Formula::atom(p)),
                                Sequent::new(ant[split..].to_vec(), Formula::atom(q)),
                            ],
                        ));
                    }
                }
                BusRule::B2 { p, q, r: c } if c == r => {
                    let mut a = ant.clone();
                    a.push(Formula::atom(q));
                    out.push((
                        RuleTag::B2 { rule: idx },
                        vec![Sequent::new(a, Formula::atom(p))],
                    ));
                }
                _ => {}
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{check_derivation, Derivation, RuleSet};
    use crate::syntax::parse_sequent;
    use proptest::prelude::*;

    fn seq(s: &str) -> Sequent {
        parse_sequent(s).unwrap()
    }

    /// Checks the root node only; the premises are placeholder leaves, so
    /// any failure below the root is ignored.
    fn one_step(goal: &Sequent, tag: RuleTag, premises: &[Sequent], sys: &System) -> bool {
        let leaves = premises
            .iter()
            .map(|p| Derivation::new(RuleTag::Axiom, p.clone(), vec![]))
            .collect();
        let d = Derivation::new(tag, goal.clone(), leaves);
        match check_derivation(&d, sys) {
            Ok(()) => true,
            Err(e) => !e.path.is_empty(),
        }
    }

    #[test]
    fn lists_axiom_and_left_rules() {
        let g = seq("p/q, q -> p");
        let exps = backward_expansions(&g, &System::lstar(), false);
        let tags: Vec<RuleTag> = exps.iter().map(|(t, _)| *t).collect();
        assert!(tags.contains(&RuleTag::OverLeft {
            principal: 0,
            gamma_len: 1
        }));
        assert!(!tags.contains(&RuleTag::Axiom));
    }

    #[test]
    fn perm_instances_skip_identity() {
        let g = seq("!p, !p, q -> q");
        let exps = backward_expansions(&g, &System::bang_lstar(), true);
        assert!(exps.iter().any(|(t, _)| t.is_perm()));
        for (t, prem) in &exps {
            if t.is_perm() {
                assert_ne!(prem[0], g);
            }
        }
        // moving the first !p past the second !p gives the goal back
        assert!(!exps
            .iter()
            .any(|(t, _)| *t == RuleTag::Perm2 { from: 1, to: 0 }));
    }

    #[test]
    fn contr_only_when_allowed() {
        let g = seq("!p -> p");
        let sys = System::bang_lstar();
        assert!(!backward_expansions(&g, &sys, false)
            .iter()
            .any(|(t, _)| matches!(t, RuleTag::Contr { .. }) || t.is_perm()));
        assert!(backward_expansions(&g, &sys, true)
            .iter()
            .any(|(t, _)| matches!(t, RuleTag::Contr { .. })));
    }

    #[test]
    fn bus_rules_expand() {
        let sys = System::with_rules(RuleSet::new(vec![
            BusRule::b1("p", "q", "r"),
            BusRule::b2("p", "q", "r"),
        ]));
        let exps = backward_expansions(&seq("a, b -> r"), &sys, false);
        assert_eq!(
            exps.iter()
                .filter(|(t, _)| matches!(t, RuleTag::B1 { .. }))
                .count(),
            3
        );
        assert_eq!(
            exps.iter()
                .filter(|(t, _)| matches!(t, RuleTag::B2 { .. }))
                .count(),
            1
        );
    }

    fn arb_sequent() -> impl Strategy<Value = Sequent> {
        let leaf = prop_oneof![Just("p"), Just("q")].prop_map(Formula::var);
        let f = leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::over(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::under(a, b)),
                inner.prop_map(Formula::bang),
            ]
        });
        (proptest::collection::vec(f.clone(), 0..4), f).prop_map(|(a, s)| Sequent::new(a, s))
    }

    proptest! {
        // Every listed instance passes the checker at the root.
        #[test]
        fn expansions_are_checker_instances(g in arb_sequent()) {
            let sys = System::bang_lstar();
            for (tag, prem) in backward_expansions(&g, &sys, true) {
                prop_assert!(one_step(&g, tag, &prem, &sys), "{} {}", tag, g);
            }
        }
    }
}
