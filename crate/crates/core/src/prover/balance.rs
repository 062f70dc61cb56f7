//! Integer feasibility of atom-balance equations.

/// Whether `base + Σ_j k_j · cols[j] = 0` may hold with integers
/// `k_j ≥ lower[j]`.
///
/// Answers `false` only when this is certain: the system has no rational
/// solution, or it fixes some `k_j` to a value that is fractional or below
/// its bound. Variables left free are not examined.
pub(super) fn may_balance(base: &[i64], cols: &[Vec<i64>], lower: &[i64]) -> bool {
    let n = cols.len();
    let mut rows: Vec<Vec<i128>> = base
        .iter()
        .enumerate()
        .map(|(a, &b)| {
            let mut r: Vec<i128> = cols.iter().map(|c| i128::from(c[a])).collect();
            r.push(-i128::from(b));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for j in 0..n {
        let Some(p) = (top..rows.len()).find(|&i| rows[i][j] != 0) else {
            continue;
        };
        rows.swap(top, p);
        for i in 0..rows.len() {
            if i == top || rows[i][j] == 0 {
                continue;
            }
            let (f, g) = (rows[top][j], rows[i][j]);
            let pivot = rows[top].clone();
            for (x, y) in rows[i].iter_mut().zip(&pivot) {
                *x = *x * f - y * g;
            }
            reduce(&mut rows[i]);
        }
        pivots.push(j);
        top += 1;
    }
    // inconsistent rows
    if rows[top..].iter().any(|r| r[n] != 0) {
        return false;
    }
    for (r, &j) in rows.iter().zip(&pivots) {
        let free = (0..n).any(|k| k != j && r[k] != 0);
        if free {
            continue;
        }
        let (p, rhs) = (r[j], r[n]);
        if rhs % p != 0 || rhs / p < i128::from(lower[j]) {
            return false;
        }
    }
    true
}

fn reduce(row: &mut [i128]) {
    let g = row.iter().fold(0i128, |g, &x| gcd(g, x.abs()));
    if g > 1 {
        for x in row.iter_mut() {
            *x /= g;
        }
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
