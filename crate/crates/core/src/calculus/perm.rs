//! Blocks of structural steps: permutations and contractions of banged
//! formulas.

use super::{Derivation, RuleTag};
use crate::formula::{Formula, Sequent};

/// Extends `top` with the fewest permutation steps turning its antecedent
/// into `bottom`.
///
/// # Panics
///
/// If `bottom` is not a rearrangement of the top antecedent that keeps the
/// non-banged formulas in order.
pub fn permute_to(bottom: &[Formula], top: Derivation) -> Derivation {
    let t = top.conclusion.antecedent.clone();
    let succ = top.conclusion.succedent.clone();
    let mut d = top;
    for (from, to, next) in perm_moves(&t, bottom) {
        let tag = if from <= to {
            RuleTag::Perm1 { from, to }
        } else {
            RuleTag::Perm2 { from, to }
        };
        d = Derivation::new(tag, Sequent::new(next, succ.clone()), vec![d]);
    }
    d
}

/// Number of permutation steps [`permute_to`] would insert.
pub fn perm_distance(top: &[Formula], bottom: &[Formula]) -> usize {
    perm_moves(top, bottom).len()
}

/// Moves `(from, to, antecedent after the move)` from `t` to `s`.
fn perm_moves(t: &[Formula], s: &[Formula]) -> Vec<(usize, usize, Vec<Formula>)> {
    let n = t.len();
    assert_eq!(
        n,
        s.len(),
        "permutation between antecedents of different length"
    );
    let matched = max_fixed_matching(t, s);

    // ids are indices into t; give every unmatched slot of s an unmatched id
    // of t holding the same formula
    let mut id_of_s: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    for &(i, j) in &matched {
        id_of_s[j] = Some(i);
        used[i] = true;
    }
    for j in 0..n {
        if id_of_s[j].is_none() {
            let i = (0..n)
                .find(|&i| !used[i] && t[i] == s[j])
                .unwrap_or_else(|| panic!("`{}` has no counterpart in the top antecedent", s[j]));
            used[i] = true;
            id_of_s[j] = Some(i);
        }
    }
    let id_of_s: Vec<usize> = id_of_s.into_iter().map(Option::unwrap).collect();
    let fixed: Vec<bool> = {
        let mut f = vec![false; n];
        for &(_, j) in &matched {
            f[j] = true;
        }
        f
    };

    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for j in 0..n {
        if fixed[j] {
            continue;
        }
        let id = id_of_s[j];
        let b = cur.iter().position(|&x| x == id).unwrap();
        cur.remove(b);
        let a = if j == 0 {
            0
        } else {
            cur.iter().position(|&x| x == id_of_s[j - 1]).unwrap() + 1
        };
        cur.insert(a, id);
        if a != b {
            out.push((b, a, cur.iter().map(|&x| t[x].clone()).collect()));
        }
    }
    debug_assert!(cur.iter().zip(s).all(|(&x, f)| t[x] == *f));
    out
}

/// Largest common subsequence of `t` and `s` that contains every non-banged
/// formula of both, as `(index in t, index in s)` pairs.
fn max_fixed_matching(t: &[Formula], s: &[Formula]) -> Vec<(usize, usize)> {
    const NEG: i64 = i64::MIN / 4;
    let (n, m) = (t.len(), s.len());
    let mut dp = vec![vec![NEG; m + 1]; n + 1];
    dp[n][m] = 0;
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                continue;
            }
            let mut best = NEG;
            if i < n && j < m && t[i] == s[j] && dp[i + 1][j + 1] > NEG {
                best = best.max(dp[i + 1][j + 1] + 1);
            }
            if i < n && t[i].is_bang() {
                best = best.max(dp[i + 1][j]);
            }
            if j < m && s[j].is_bang() {
                best = best.max(dp[i][j + 1]);
            }
            dp[i][j] = best;
        }
    }
    assert!(
        dp[0][0] > NEG,
        "antecedents differ in their non-banged formulas"
    );
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < n || j < m {
        if i < n
            && j < m
            && t[i] == s[j]
            && dp[i + 1][j + 1] > NEG
            && dp[i][j] == dp[i + 1][j + 1] + 1
        {
            out.push((i, j));
            i += 1;
            j += 1;
        } else if i < n && t[i].is_bang() && dp[i][j] == dp[i + 1][j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Replaces every maximal chain of permutation steps by the minimal chain
/// between the same two antecedents. Idempotent.
pub fn normalize_perm_blocks(d: &Derivation) -> Derivation {
    if d.rule.is_perm() {
        let mut top = d;
        while top.rule.is_perm() {
            top = &top.premises[0];
        }
        let top = normalize_perm_blocks(top);
        permute_to(&d.conclusion.antecedent, top)
    } else {
        Derivation::new(
            d.rule,
            d.conclusion.clone(),
            d.premises.iter().map(normalize_perm_blocks).collect(),
        )
    }
}

/// Extends `top` to conclude `bottom` using permutations followed by
/// contractions. `bottom` may hold fewer copies of a banged formula than the
/// top antecedent, but at least one.
///
/// # Panics
///
/// If no such block exists.
pub fn restructure(top: Derivation, bottom: &[Formula]) -> Derivation {
    let t = &top.conclusion.antecedent;
    // duplicate in place: each surplus copy sits next to the first
    // occurrence of its formula in `bottom`
    let mut widened: Vec<Formula> = Vec::with_capacity(t.len());
    let mut contractions: Vec<(usize, usize)> = Vec::new();
    let mut seen: Vec<&Formula> = Vec::new();
    for f in bottom {
        widened.push(f.clone());
        if seen.contains(&f) {
            continue;
        }
        seen.push(f);
        let have = t.iter().filter(|g| *g == f).count();
        let want = bottom.iter().filter(|g| *g == f).count();
        assert!(have >= want, "`{f}` occurs more often below than above");
        if have > want {
            assert!(f.is_bang(), "only banged formulas contract, not `{f}`");
            contractions.push((widened.len() - 1, have - want));
            for _ in 0..have - want {
                widened.push(f.clone());
            }
        }
    }
    assert_eq!(
        widened.len(),
        t.len(),
        "top antecedent has formulas absent below"
    );
    let mut d = permute_to(&widened, top);
    // contract from the right so earlier indices stay valid
    for &(index, extra) in contractions.iter().rev() {
        for _ in 0..extra {
            d = Derivation::contr(index, d);
        }
    }
    debug_assert_eq!(d.conclusion.antecedent, bottom);
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{check_derivation, System};
    use crate::syntax::{parse_formula, parse_sequent};
    use proptest::prelude::*;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn leaf(s: &str) -> Derivation {
        Derivation::new(RuleTag::Axiom, parse_sequent(s).unwrap(), vec![])
    }

    /// Checks the structural block above the placeholder leaf.
    fn block_ok(d: &Derivation) -> bool {
        match check_derivation(d, &System::bang_lstar()) {
            Ok(()) => true,
            Err(e) => e.path.len() == d.depth() - 1,
        }
    }

    #[test]
    fn single_move() {
        let d = permute_to(&[f("q"), f("!p"), f("r")], leaf("!p, q, r -> s"));
        assert_eq!(d.rule, RuleTag::Perm1 { from: 0, to: 1 });
        assert!(block_ok(&d));
        let d = permute_to(&[f("!p"), f("q"), f("r")], leaf("q, r, !p -> s"));
        assert_eq!(d.rule, RuleTag::Perm2 { from: 2, to: 0 });
        assert!(block_ok(&d));
    }

    #[test]
    fn identity_adds_nothing() {
        let d = permute_to(&[f("!p"), f("q")], leaf("!p, q -> s"));
        assert_eq!(d.rule, RuleTag::Axiom);
    }

    #[test]
    fn moves_fewest() {
        // !a !b q  ->  q !a !b : moving q is not allowed, so two moves
        let t = [f("!a"), f("!b"), f("q")];
        let s = [f("q"), f("!a"), f("!b")];
        assert_eq!(perm_distance(&t, &s), 2);
        // swapping two banged formulas takes one move
        assert_eq!(perm_distance(&[f("!a"), f("!b")], &[f("!b"), f("!a")]), 1);
    }

    #[test]
    fn restructure_contracts_at_bottom() {
        let d = restructure(leaf("!p, q, !p, !p -> s"), &[f("q"), f("!p")]);
        assert_eq!(d.conclusion.antecedent, vec![f("q"), f("!p")]);
        assert!(matches!(d.rule, RuleTag::Contr { .. }));
        assert_eq!(d.count(&|r| matches!(r, RuleTag::Contr { .. })), 2);
        assert!(block_ok(&d));
    }

    fn arb_banged_perm() -> impl Strategy<Value = (Vec<Formula>, Vec<Formula>)> {
        let item = prop_oneof![
            Just(f("p")),
            Just(f("q")),
            Just(f("!p")),
            Just(f("!q")),
            Just(f("!(p/q)")),
        ];
        (proptest::collection::vec(item, 0..7), any::<u64>()).prop_map(|(t, seed)| {
            // move banged items to pseudo-random slots
            let mut s: Vec<Formula> = t.iter().filter(|x| !x.is_bang()).cloned().collect();
            let mut x = seed;
            for b in t.iter().filter(|x| x.is_bang()) {
                x = x
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let pos = (x >> 33) as usize % (s.len() + 1);
                s.insert(pos, b.clone());
            }
            (t, s)
        })
    }

    proptest! {
        #[test]
        fn permute_to_reaches_target((t, s) in arb_banged_perm()) {
            let top = Derivation::new(RuleTag::Axiom, Sequent::new(t.clone(), f("r")), vec![]);
            let d = permute_to(&s, top);
            prop_assert_eq!(&d.conclusion.antecedent, &s);
            prop_assert!(block_ok(&d));
            let banged = t.iter().filter(|x| x.is_bang()).count();
            prop_assert!(d.size() - 1 <= banged);
        }

        #[test]
        fn normalize_is_idempotent((t, s) in arb_banged_perm()) {
            // a wasteful chain from t to s and back
            let top = Derivation::new(RuleTag::Axiom, Sequent::new(t.clone(), f("r")), vec![]);
            let d = permute_to(&t, permute_to(&s, top));
            let n1 = normalize_perm_blocks(&d);
            prop_assert_eq!(&n1.conclusion, &d.conclusion);
            prop_assert_eq!(n1.size(), 1);
            let n2 = normalize_perm_blocks(&n1);
            prop_assert_eq!(&n1, &n2);
        }
    }
}
