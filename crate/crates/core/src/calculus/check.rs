use thiserror::Error;

use super::{Base, BusRule, Derivation, RuleTag, System};
use crate::formula::{Formula, Sequent};

/// First failing node, addressed by premise indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid node at {}: {message}", path_string(.path))]
pub struct CheckError {
    pub path: Vec<usize>,
    pub message: String,
}

fn path_string(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        let parts: Vec<String> = path.iter().map(usize::to_string).collect();
        format!("root/{}", parts.join("/"))
    }
}

pub fn check_derivation(d: &Derivation, sys: &System) -> Result<(), CheckError> {
    let mut path = Vec::new();
    check_rec(d, sys, &mut path)
}

fn check_rec(d: &Derivation, sys: &System, path: &mut Vec<usize>) -> Result<(), CheckError> {
    if let Err(message) = check_node(d, sys) {
        return Err(CheckError {
            path: path.clone(),
            message: format!("{} concluding `{}`: {message}", d.rule, d.conclusion),
        });
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_rec(p, sys, path)?;
        path.pop();
    }
    Ok(())
}

fn premise(d: &Derivation, i: usize) -> &Sequent {
    &d.premises[i].conclusion
}

fn expect_premise(d: &Derivation, i: usize, expected: &Sequent) -> Result<(), String> {
    let got = premise(d, i);
    if got == expected {
        Ok(())
    } else {
        Err(format!("premise {i} is `{got}`, expected `{expected}`"))
    }
}

fn check_node(d: &Derivation, sys: &System) -> Result<(), String> {
    let arity = d.rule.arity();
    if d.premises.len() != arity {
        return Err(format!(
            "rule takes {arity} premise(s), node has {}",
            d.premises.len()
        ));
    }
    let concl = &d.conclusion;
    let ant = &concl.antecedent;
    let n = ant.len();
    if sys.base() == Base::LStar && concl.contains_bang() {
        return Err("`!` is not a connective of L*".into());
    }
    let needs_bang = |what: &str| -> Result<(), String> {
        if sys.has_bang() {
            Ok(())
        } else {
            Err(format!("{what} is not a rule of L*"))
        }
    };
    match d.rule {
        RuleTag::Axiom => {
            if n == 1 && ant[0] == concl.succedent {
                Ok(())
            } else {
                Err("not an instance of A -> A".into())
            }
        }
        RuleTag::OverRight => {
            let Formula::Over(num, den) = &concl.succedent else {
                return Err("succedent is not a right division".into());
            };
            let mut a = ant.clone();
            a.push((**den).clone());
            expect_premise(d, 0, &Sequent::new(a, (**num).clone()))
        }
        RuleTag::UnderRight => {
            let Formula::Under(den, num) = &concl.succedent else {
                return Err("succedent is not a left division".into());
            };
            let mut a = vec![(**den).clone()];
            a.extend(ant.iter().cloned());
            expect_premise(d, 0, &Sequent::new(a, (**num).clone()))
        }
        RuleTag::OverLeft {
            principal,
            gamma_len,
        } => {
            if principal >= n || principal + 1 + gamma_len > n {
                return Err(format!(
                    "positions out of bounds for antecedent of length {n}"
                ));
            }
            let Formula::Over(num, den) = &ant[principal] else {
                return Err(format!("formula {principal} is not a right division"));
            };
            let gamma = ant[principal + 1..principal + 1 + gamma_len].to_vec();
            expect_premise(d, 0, &Sequent::new(gamma, (**den).clone()))?;
            let mut rest = ant[..principal].to_vec();
            rest.push((**num).clone());
            rest.extend(ant[principal + 1 + gamma_len..].iter().cloned());
            expect_premise(d, 1, &Sequent::new(rest, concl.succedent.clone()))
        }
        RuleTag::UnderLeft {
            principal,
            gamma_len,
        } => {
            if principal >= n || gamma_len > principal {
                return Err(format!(
                    "positions out of bounds for antecedent of length {n}"
                ));
            }
            let Formula::Under(den, num) = &ant[principal] else {
                return Err(format!("formula {principal} is not a left division"));
            };
            let start = principal - gamma_len;
            let gamma = ant[start..principal].to_vec();
            expect_premise(d, 0, &Sequent::new(gamma, (**den).clone()))?;
            let mut rest = ant[..start].to_vec();
            rest.push((**num).clone());
            rest.extend(ant[principal + 1..].iter().cloned());
            expect_premise(d, 1, &Sequent::new(rest, concl.succedent.clone()))
        }
        RuleTag::BangLeft { index } => {
            needs_bang("(!→)")?;
            if index >= n {
                return Err(format!("index {index} out of bounds"));
            }
            let Formula::Bang(body) = &ant[index] else {
                return Err(format!("formula {index} is not banged"));
            };
            let mut a = ant.clone();
            a[index] = (**body).clone();
            expect_premise(d, 0, &Sequent::new(a, concl.succedent.clone()))
        }
        RuleTag::BangRight => {
            needs_bang("(→!)")?;
            let Formula::Bang(body) = &concl.succedent else {
                return Err("succedent is not banged".into());
            };
            if let Some(f) = ant.iter().find(|f| !f.is_bang()) {
                return Err(format!(
                    "(→!) premise antecedent contains a non-banged formula `{f}`"
                ));
            }
            expect_premise(d, 0, &Sequent::new(ant.clone(), (**body).clone()))
        }
        RuleTag::Perm1 { from, to } | RuleTag::Perm2 { from, to } => {
            needs_bang("permutation")?;
            if from >= n || to >= n {
                return Err(format!(
                    "indices out of bounds for antecedent of length {n}"
                ));
            }
            match d.rule {
                RuleTag::Perm1 { .. } if from > to => {
                    return Err("(perm1) moves the banged formula to the right".into())
                }
                RuleTag::Perm2 { .. } if from < to => {
                    return Err("(perm2) moves the banged formula to the left".into())
                }
                _ => {}
            }
            if !ant[to].is_bang() {
                return Err(format!("moved formula `{}` is not banged", ant[to]));
            }
            let mut a = ant.clone();
            let f = a.remove(to);
            a.insert(from, f);
            expect_premise(d, 0, &Sequent::new(a, concl.succedent.clone()))
        }
        RuleTag::Contr { index } => {
            needs_bang("(contr)")?;
            if index >= n {
                return Err(format!("index {index} out of bounds"));
            }
            if !ant[index].is_bang() {
                return Err(format!("contracted formula `{}` is not banged", ant[index]));
            }
            let mut a = ant.clone();
            a.insert(index, ant[index].clone());
            expect_premise(d, 0, &Sequent::new(a, concl.succedent.clone()))
        }
        RuleTag::B1 { rule, split } => {
            let Some(BusRule::B1 { p, q, r }) = sys.rules().get(rule) else {
                return Err(format!("rule {rule} is not a B1 rule of the system"));
            };
            if concl.succedent != Formula::atom(r) {
                return Err(format!("succedent must be `{r}`"));
            }
            if split > n {
                return Err(format!("split {split} out of bounds"));
            }
            expect_premise(d, 0, &Sequent::new(ant[..split].to_vec(), Formula::atom(p)))?;
            expect_premise(d, 1, &Sequent::new(ant[split..].to_vec(), Formula::atom(q)))
        }
        RuleTag::B2 { rule } => {
            let Some(BusRule::B2 { p, q, r }) = sys.rules().get(rule) else {
                return Err(format!("rule {rule} is not a B2 rule of the system"));
            };
            if concl.succedent != Formula::atom(r) {
                return Err(format!("succedent must be `{r}`"));
            }
            let mut a = ant.clone();
            a.push(Formula::atom(q));
            expect_premise(d, 0, &Sequent::new(a, Formula::atom(p)))
        }
        RuleTag::Cut { window } => {
            if !sys.allow_cut() {
                return Err("cut is not admitted by this system".into());
            }
            let left = premise(d, 0);
            let right = premise(d, 1);
            let ra = &right.antecedent;
            if window >= ra.len() || ra[window] != left.succedent {
                return Err(format!(
                    "premise 1 has no `{}` at position {window}",
                    left.succedent
                ));
            }
            let mut a = ra[..window].to_vec();
            a.extend(left.antecedent.iter().cloned());
            a.extend(ra[window + 1..].iter().cloned());
            let expected = Sequent::new(a, right.succedent.clone());
            if &expected == concl {
                Ok(())
            } else {
                Err(format!("cut yields `{expected}`"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::RuleSet;
    use crate::syntax::{parse_formula, parse_sequent};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn seq(s: &str) -> Sequent {
        parse_sequent(s).unwrap()
    }

    #[test]
    fn axiom_ok() {
        let d = Derivation::axiom(f("np"));
        assert_eq!(d.conclusion, seq("np -> np"));
        assert!(check_derivation(&d, &System::lstar()).is_ok());
    }

    #[test]
    fn bad_axiom() {
        let d = Derivation::new(RuleTag::Axiom, seq("p -> q"), vec![]);
        let err = check_derivation(&d, &System::lstar()).unwrap_err();
        assert!(err.path.is_empty());
    }

    /// The medial-extraction fragment: (→/) over perm1 over (!→) over the
    /// "John met Pete yesterday" sequent.
    fn example3_fragment() -> Derivation {
        let np = f("np");
        let tv = f("(np\\s)/np");
        let adv = f("(np\\s)\\(np\\s)");
        // np, np\s -> s
        let vp = Derivation::under_left(
            np.clone(),
            0,
            Derivation::axiom(np.clone()),
            Derivation::axiom(f("s")),
        );
        // np, np\s, adv -> s  via adv applied to np\s
        let with_adv_top = Derivation::under_left(f("np\\s"), 1, Derivation::axiom(f("np\\s")), vp);
        // np, (np\s)/np, np, adv -> s
        let full =
            Derivation::over_left(np.clone(), 1, Derivation::axiom(np.clone()), with_adv_top);
        assert_eq!(
            full.conclusion.antecedent,
            vec![np.clone(), tv.clone(), np.clone(), adv.clone()]
        );
        let banged = Derivation::bang_left(2, full);
        let perm = Derivation::new(
            RuleTag::Perm1 { from: 2, to: 3 },
            Sequent::new(vec![np.clone(), tv.clone(), adv.clone(), f("!np")], f("s")),
            vec![banged],
        );
        Derivation::over_right(perm)
    }

    #[test]
    fn example3_fragment_checks() {
        let d = example3_fragment();
        assert_eq!(
            d.conclusion,
            seq("np, (np\\s)/np, (np\\s)\\(np\\s) -> s/!np")
        );
        check_derivation(&d, &System::bang_lstar()).unwrap();
        // the same tree is not an L* derivation
        assert!(check_derivation(&d, &System::lstar()).is_err());
    }

    #[test]
    fn bang_right_rejects_unbanged_context() {
        let d = Derivation::new(
            RuleTag::BangRight,
            seq("!p, q -> !q"),
            vec![Derivation::new(RuleTag::Axiom, seq("!p, q -> q"), vec![])],
        );
        let err = check_derivation(&d, &System::bang_lstar()).unwrap_err();
        assert!(err.message.contains("non-banged"), "{err}");
        assert!(err.path.is_empty());
    }

    #[test]
    fn bang_right_with_empty_context() {
        // n = 0 instance: "-> !(p/p)" from "-> p/p"
        let d = Derivation::bang_right(Derivation::over_right(Derivation::axiom(f("p"))));
        assert_eq!(d.conclusion, seq("-> !(p/p)"));
        check_derivation(&d, &System::bang_lstar()).unwrap();
    }

    #[test]
    fn perm_direction_enforced() {
        let top = Derivation::new(RuleTag::Axiom, seq("!p, q -> r"), vec![]);
        let bad = Derivation::new(
            RuleTag::Perm2 { from: 0, to: 1 },
            seq("q, !p -> r"),
            vec![top],
        );
        let err = check_derivation(&bad, &System::bang_lstar()).unwrap_err();
        assert!(err.message.contains("perm2"), "{err}");
    }

    #[test]
    fn contr_and_error_path() {
        let inner = Derivation::new(RuleTag::Axiom, seq("!p, !p -> q"), vec![]);
        let d = Derivation::contr(0, inner);
        assert_eq!(d.conclusion, seq("!p -> q"));
        let err = check_derivation(&d, &System::bang_lstar()).unwrap_err();
        assert_eq!(err.path, vec![0]);
    }

    #[test]
    fn buszkowski_rules() {
        let rules = RuleSet::new(vec![BusRule::b1("p", "q", "r"), BusRule::b2("p", "q", "r")]);
        let sys = System::with_rules(rules);
        let d = Derivation::new(
            RuleTag::B1 { rule: 0, split: 1 },
            seq("p, q -> r"),
            vec![Derivation::axiom(f("p")), Derivation::axiom(f("q"))],
        );
        check_derivation(&d, &sys).unwrap();
        // B1 tag pointing at a B2 entry
        let wrong = Derivation::new(
            RuleTag::B1 { rule: 1, split: 1 },
            d.conclusion.clone(),
            d.premises.clone(),
        );
        assert!(check_derivation(&wrong, &sys).is_err());
        // p/q -> r via B2 over (/→)
        let inner = Derivation::over_left(
            f("q"),
            0,
            Derivation::axiom(f("q")),
            Derivation::axiom(f("p")),
        );
        let d2 = Derivation::new(RuleTag::B2 { rule: 1 }, seq("p/q -> r"), vec![inner]);
        check_derivation(&d2, &sys).unwrap();
        assert!(check_derivation(&d2, &System::lstar()).is_err());
    }

    #[test]
    fn cut_only_when_allowed() {
        let d = Derivation::new(
            RuleTag::Cut { window: 0 },
            seq("p -> p"),
            vec![Derivation::axiom(f("p")), Derivation::axiom(f("p"))],
        );
        assert!(check_derivation(&d, &System::lstar()).is_err());
        check_derivation(&d, &System::lstar().allowing_cut()).unwrap();
    }
}
