//! Proof search.
//!
//! [`prove`] is a budgeted backward search for every system; it answers
//! `NotDerivable` only when its search space ran out before the budget did.
//! [`decide_restricted`] is the terminating procedure for `!L*` sequents
//! whose `!` is applied to variables only. [`brute_force_derivable`] is an
//! unrelated forward enumerator used as a test oracle.

mod atomic;
mod balance;
mod forward;
mod oracle;
mod search;

use thiserror::Error;

use crate::calculus::{check_derivation, normalize_perm_blocks, Derivation, System};
use crate::formula::{Formula, Sequent};

pub use oracle::brute_force_derivable;

/// Search limits. The step limits apply to each branch of a derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Logical rules (Buszkowski rules included) on one branch.
    pub max_logical_steps: usize,
    /// Contractions on one branch.
    pub max_contractions: usize,
    /// Search states expanded in total.
    pub max_nodes: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_logical_steps: 256,
            max_contractions: 16,
            max_nodes: 1_000_000,
        }
    }
}

impl Budget {
    /// Per-branch limits that suffice for restricted sequents of size
    /// `n`: fewer than `n` logical steps and fewer than `2n` contractions.
    pub fn restricted(n: usize) -> Budget {
        Budget {
            max_logical_steps: n.saturating_sub(1),
            max_contractions: (2 * n).saturating_sub(1),
            max_nodes: usize::MAX,
        }
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Budget {
        self.max_nodes = max_nodes;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProveResult {
    Derivable(Derivation),
    NotDerivable,
    Unknown(String),
}

impl ProveResult {
    pub fn is_derivable(&self) -> bool {
        matches!(self, ProveResult::Derivable(_))
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            ProveResult::Derivable(d) => Some(d),
            _ => None,
        }
    }

    /// `DERIVABLE`, `NOT_DERIVABLE` or `UNKNOWN`.
    pub fn verdict(&self) -> &'static str {
        match self {
            ProveResult::Derivable(_) => "DERIVABLE",
            ProveResult::NotDerivable => "NOT_DERIVABLE",
            ProveResult::Unknown(_) => "UNKNOWN",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`!` is applied to the non-variable `{formula}`")]
pub struct FragmentViolation {
    pub formula: String,
}

/// Upper bound on the size of a normalized derivation of a restricted
/// sequent of size `n`: `12n² + 3n`.
pub fn size_bound(n: usize) -> usize {
    12 * n * n + 3 * n
}

/// Budgeted backward proof search in `sys`.
///
/// Sequents of atoms in `L* + R` go to a dedicated search, since their
/// derivations use Buszkowski rules and axioms only. The emitted derivation
/// is cut-free, checker-valid, and has its permutation blocks normalized.
pub fn prove(goal: &Sequent, sys: &System, budget: &Budget) -> ProveResult {
    if !sys.has_bang() && goal.contains_bang() {
        return ProveResult::NotDerivable;
    }
    let (result, nodes) = if !sys.has_bang() && !sys.rules().is_empty() && is_atomic(goal) {
        atomic_search(goal, sys, budget)
    } else {
        let mut s = search::Search::new(sys, budget.max_nodes);
        let r = s.run(goal, budget.max_logical_steps, budget.max_contractions);
        (r, s.nodes())
    };
    match result {
        search::SearchResult::Proved(d) => {
            let d = normalize_perm_blocks(&d);
            if let Err(e) = check_derivation(&d, sys) {
                panic!("prover emitted an invalid derivation for `{goal}`: {e}\n{d}");
            }
            ProveResult::Derivable(d)
        }
        search::SearchResult::Exhausted => ProveResult::NotDerivable,
        search::SearchResult::Cut(why) => {
            ProveResult::Unknown(format!("{why} ({nodes} states expanded)"))
        }
    }
}

/// Node cap for the top-down part of [`atomic_search`].
const TOP_DOWN_NODES: usize = 200_000;

/// Top-down search first, since only it can refute; then saturation under a
/// growing antecedent bound with the rest of the node budget.
fn atomic_search(goal: &Sequent, sys: &System, budget: &Budget) -> (search::SearchResult, usize) {
    let mut s = atomic::AtomicSearch::new(sys.rules(), (budget.max_nodes / 4).min(TOP_DOWN_NODES));
    let r = s.run(goal, budget.max_logical_steps).expect("atomic goal");
    if !matches!(r, search::SearchResult::Cut(_)) {
        return (r, s.nodes());
    }
    let spent = s.nodes();
    let mut sat = forward::Saturation::new(sys.rules());
    let rest = budget.max_nodes.saturating_sub(spent);
    let lo = goal.antecedent.len().max(1);
    for len in lo..=lo + budget.max_logical_steps {
        match sat.run(goal, len, rest).expect("atomic goal") {
            forward::Outcome::Proved(d) => {
                return (search::SearchResult::Proved(d), spent + sat.work())
            }
            forward::Outcome::Closed => {}
            forward::Outcome::OutOfBudget => break,
        }
    }
    (r, spent + sat.work())
}

fn is_atomic(s: &Sequent) -> bool {
    s.formulas().all(Formula::is_var)
}

/// Decides a `!L*` sequent whose `!` is applied only to variables.
///
/// Runs [`prove`] with [`Budget::restricted`]. Atom counting bounds the
/// contractions in this fragment, so if that budget is cut the search is
/// repeated without step limits and still terminates.
pub fn decide_restricted(goal: &Sequent) -> Result<ProveResult, FragmentViolation> {
    if let Some(f) = goal.formulas().find(|f| !f.bang_on_vars_only()) {
        return Err(FragmentViolation {
            formula: f.to_string(),
        });
    }
    let sys = System::bang_lstar();
    let first = prove(goal, &sys, &Budget::restricted(goal.size()));
    if !matches!(first, ProveResult::Unknown(_)) {
        return Ok(first);
    }
    let open = Budget {
        max_logical_steps: usize::MAX / 2,
        max_contractions: usize::MAX / 2,
        max_nodes: usize::MAX,
    };
    match prove(goal, &sys, &open) {
        ProveResult::Unknown(why) => unreachable!("restricted search cannot be cut: {why}"),
        r => Ok(r),
    }
}
