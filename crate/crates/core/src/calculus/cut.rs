use thiserror::Error;

use super::{check_derivation, CheckError, Derivation, RuleTag, System};
use crate::formula::{Formula, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutError {
    #[error("cut elimination is implemented for L* and L*+R only")]
    ModalSystem,
    #[error("right premise has no `{formula}` at position {window}")]
    Window { formula: Formula, window: usize },
    #[error("input derivation is invalid: {0}")]
    Invalid(CheckError),
    #[error("no reduction applies to the cut of `{left}` into `{right}`")]
    Stuck { left: Sequent, right: Sequent },
}

/// Cut-free derivation of `Δ1, Π, Δ2 → C` from derivations of `Π → A` and
/// `Δ1, A, Δ2 → C`, where `window = |Δ1|`.
///
/// Both inputs may themselves contain cuts; they are removed first.
pub fn eliminate_cut(
    left: &Derivation,
    right: &Derivation,
    window: usize,
    sys: &System,
) -> Result<Derivation, CutError> {
    if sys.has_bang() {
        return Err(CutError::ModalSystem);
    }
    let with_cut = sys.clone().allowing_cut();
    check_derivation(left, &with_cut).map_err(CutError::Invalid)?;
    check_derivation(right, &with_cut).map_err(CutError::Invalid)?;
    let a = &left.conclusion.succedent;
    if right.conclusion.antecedent.get(window) != Some(a) {
        return Err(CutError::Window {
            formula: a.clone(),
            window,
        });
    }
    let l = eliminate_cuts(left, sys)?;
    let r = eliminate_cuts(right, sys)?;
    cut(&l, &r, window)
}

/// Removes every cut node, innermost first.
pub fn eliminate_cuts(d: &Derivation, sys: &System) -> Result<Derivation, CutError> {
    if sys.has_bang() {
        return Err(CutError::ModalSystem);
    }
    if d.is_cut_free() {
        return Ok(d.clone());
    }
    let premises = d
        .premises
        .iter()
        .map(|p| eliminate_cuts(p, sys))
        .collect::<Result<Vec<_>, _>>()?;
    match d.rule {
        RuleTag::Cut { window } => cut(&premises[0], &premises[1], window),
        rule => Ok(Derivation::new(rule, d.conclusion.clone(), premises)),
    }
}

/// Replaces position `window` of `s` by `pi`.
fn splice(s: &Sequent, window: usize, pi: &[Formula]) -> Sequent {
    let mut a = s.antecedent[..window].to_vec();
    a.extend(pi.iter().cloned());
    a.extend(s.antecedent[window + 1..].iter().cloned());
    Sequent::new(a, s.succedent.clone())
}

/// Both inputs are cut-free.
fn cut(l: &Derivation, r: &Derivation, w: usize) -> Result<Derivation, CutError> {
    if l.rule == RuleTag::Axiom {
        return Ok(r.clone());
    }
    if r.rule == RuleTag::Axiom {
        return Ok(l.clone());
    }
    let pi = &l.conclusion.antecedent;
    let k = pi.len();
    match r.rule {
        // the cut formula is a side formula of the right derivation
        RuleTag::OverRight => Ok(Derivation::over_right(cut(l, &r.premises[0], w)?)),
        RuleTag::UnderRight => Ok(Derivation::under_right(cut(l, &r.premises[0], w + 1)?)),
        RuleTag::OverLeft {
            principal: i,
            gamma_len: g,
        } if w != i => {
            let den = over_den(&r.conclusion.antecedent[i]);
            let (gamma, main) = (&r.premises[0], &r.premises[1]);
            Ok(if w < i {
                Derivation::over_left(den, i - 1 + k, gamma.clone(), cut(l, main, w)?)
            } else if w <= i + g {
                Derivation::over_left(den, i, cut(l, gamma, w - i - 1)?, main.clone())
            } else {
                Derivation::over_left(den, i, gamma.clone(), cut(l, main, w - g)?)
            })
        }
        RuleTag::UnderLeft {
            principal: i,
            gamma_len: g,
        } if w != i => {
            let den = under_den(&r.conclusion.antecedent[i]);
            let (gamma, main) = (&r.premises[0], &r.premises[1]);
            let start = i - g;
            Ok(if w < start {
                Derivation::under_left(den, start - 1 + k, gamma.clone(), cut(l, main, w)?)
            } else if w < i {
                Derivation::under_left(den, start, cut(l, gamma, w - start)?, main.clone())
            } else {
                Derivation::under_left(den, start, gamma.clone(), cut(l, main, w - g)?)
            })
        }
        RuleTag::B1 { rule, split } => {
            let (p0, p1) = if w < split {
                (cut(l, &r.premises[0], w)?, r.premises[1].clone())
            } else {
                (r.premises[0].clone(), cut(l, &r.premises[1], w - split)?)
            };
            let split = if w < split { split - 1 + k } else { split };
            Ok(Derivation::new(
                RuleTag::B1 { rule, split },
                splice(&r.conclusion, w, pi),
                vec![p0, p1],
            ))
        }
        RuleTag::B2 { rule } => Ok(Derivation::new(
            RuleTag::B2 { rule },
            splice(&r.conclusion, w, pi),
            vec![cut(l, &r.premises[0], w)?],
        )),
        // the cut formula is principal on the right
        RuleTag::OverLeft { gamma_len: g, .. } | RuleTag::UnderLeft { gamma_len: g, .. } => {
            match (l.rule, r.rule) {
                (RuleTag::OverRight, RuleTag::OverLeft { .. }) => {
                    let inner = cut(&r.premises[0], &l.premises[0], k)?;
                    cut(&inner, &r.premises[1], w)
                }
                (RuleTag::UnderRight, RuleTag::UnderLeft { .. }) => {
                    let inner = cut(&r.premises[0], &l.premises[0], 0)?;
                    cut(&inner, &r.premises[1], w - g)
                }
                // the cut formula is a side formula on the left
                (RuleTag::OverLeft { principal: i, .. }, _) => {
                    let den = over_den(&pi[i]);
                    let main = cut(&l.premises[1], r, w)?;
                    Ok(Derivation::over_left(
                        den,
                        w + i,
                        l.premises[0].clone(),
                        main,
                    ))
                }
                (
                    RuleTag::UnderLeft {
                        principal: i,
                        gamma_len: lg,
                    },
                    _,
                ) => {
                    let den = under_den(&pi[i]);
                    let main = cut(&l.premises[1], r, w)?;
                    Ok(Derivation::under_left(
                        den,
                        w + i - lg,
                        l.premises[0].clone(),
                        main,
                    ))
                }
                _ => Err(CutError::Stuck {
                    left: l.conclusion.clone(),
                    right: r.conclusion.clone(),
                }),
            }
        }
        _ => Err(CutError::Stuck {
            left: l.conclusion.clone(),
            right: r.conclusion.clone(),
        }),
    }
}

fn over_den(f: &Formula) -> Formula {
    match f {
        Formula::Over(_, den) => (**den).clone(),
        _ => unreachable!("checked (/→) principal"),
    }
}

fn under_den(f: &Formula) -> Formula {
    match f {
        Formula::Under(den, _) => (**den).clone(),
        _ => unreachable!("checked (\\→) principal"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{BusRule, RuleSet};
    use crate::syntax::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn ax(s: &str) -> Derivation {
        Derivation::axiom(f(s))
    }

    #[test]
    fn principal_over() {
        // left: p/q, q -> p  then (→/) gives  p/q -> p/q
        let l = Derivation::over_right(Derivation::over_left(f("q"), 0, ax("q"), ax("p")));
        // right: p/q, q -> p
        let r = Derivation::over_left(f("q"), 0, ax("q"), ax("p"));
        let sys = System::lstar();
        let d = eliminate_cut(&l, &r, 0, &sys).unwrap();
        assert_eq!(d.conclusion, r.conclusion);
        check_derivation(&d, &sys).unwrap();
    }

    #[test]
    fn principal_under() {
        // left: q\p -> q\p by (→\); right: q, q\p -> p
        let l = Derivation::under_right(Derivation::under_left(f("q"), 0, ax("q"), ax("p")));
        let r = Derivation::under_left(f("q"), 0, ax("q"), ax("p"));
        let sys = System::lstar();
        let d = eliminate_cut(&l, &r, 1, &sys).unwrap();
        assert_eq!(d.conclusion, r.conclusion);
        check_derivation(&d, &sys).unwrap();
    }

    #[test]
    fn side_formula_in_bus_rule() {
        let sys = System::with_rules(RuleSet::new(vec![BusRule::b1("p", "q", "r")]));
        // left: p/t, t -> p; right: B1 over p -> p and q -> q
        let l = Derivation::over_left(f("t"), 0, ax("t"), ax("p"));
        let r = Derivation::new(
            RuleTag::B1 { rule: 0, split: 1 },
            Sequent::new(vec![f("p"), f("q")], f("r")),
            vec![ax("p"), ax("q")],
        );
        let d = eliminate_cut(&l, &r, 0, &sys).unwrap();
        assert_eq!(
            d.conclusion,
            Sequent::new(vec![f("p/t"), f("t"), f("q")], f("r"))
        );
        check_derivation(&d, &sys).unwrap();
        assert!(d.is_cut_free());
    }

    #[test]
    fn rejects_bad_window() {
        let err = eliminate_cut(&ax("p"), &ax("q"), 0, &System::lstar()).unwrap_err();
        assert!(matches!(err, CutError::Window { .. }));
        let err = eliminate_cut(&ax("p"), &ax("p"), 0, &System::bang_lstar()).unwrap_err();
        assert_eq!(err, CutError::ModalSystem);
    }
}
