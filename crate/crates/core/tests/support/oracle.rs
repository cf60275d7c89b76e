//! Brute-force reference implementations over attribute bitmasks. Nothing
//! here calls into the library.

use std::collections::BTreeSet;

pub type Fd = (u32, u32);

pub fn full(n: usize) -> u32 {
    (1u32 << n) - 1
}

pub fn closure(x: u32, fds: &[Fd]) -> u32 {
    let mut c = x;
    loop {
        let before = c;
        for &(l, r) in fds {
            if l & c == l {
                c |= r;
            }
        }
        if c == before {
            return c;
        }
    }
}

fn proper_subsets(x: u32) -> impl Iterator<Item = u32> {
    (0..x).filter(move |s| s & x == *s)
}

pub fn is_superkey(x: u32, cols: u32, fds: &[Fd]) -> bool {
    closure(x, fds) & cols == cols
}

/// Minimal superkeys of the relation over `cols`.
pub fn keys(cols: u32, fds: &[Fd]) -> Vec<u32> {
    (0..=cols)
        .filter(|m| m & cols == *m)
        .filter(|&m| is_superkey(m, cols, fds) && proper_subsets(m).all(|s| !is_superkey(s, cols, fds)))
        .collect()
}

pub fn prime(cols: u32, fds: &[Fd]) -> u32 {
    keys(cols, fds).into_iter().fold(0, |a, k| a | k)
}

fn minimal_for(x: u32, a: usize, fds: &[Fd]) -> bool {
    proper_subsets(x).all(|s| closure(s, fds) & (1 << a) == 0)
}

/// `(X, A)` with `X` a nonempty proper subset of a candidate key, `A`
/// non-prime, `A` in the closure of `X`, and no smaller such `X`.
pub fn partial_pairs(n: usize, fds: &[Fd]) -> BTreeSet<(u32, usize)> {
    let cols = full(n);
    let ks = keys(cols, fds);
    let pr = prime(cols, fds);
    let mut out = BTreeSet::new();
    for x in 1..=cols {
        if !ks.iter().any(|k| x & k == x && x != *k) {
            continue;
        }
        for a in 0..n {
            let bit = 1 << a;
            if x & bit == 0 && pr & bit == 0 && closure(x, fds) & bit != 0 && minimal_for(x, a, fds) {
                out.insert((x, a));
            }
        }
    }
    out
}

/// `(X, A)` with `A` non-prime, `A` in the closure of `X` but not in `X`,
/// `X` minimal for `A`, `X` not a superkey and not a proper subset of a key.
pub fn transitive_pairs(n: usize, fds: &[Fd]) -> BTreeSet<(u32, usize)> {
    let cols = full(n);
    let ks = keys(cols, fds);
    let pr = prime(cols, fds);
    let mut out = BTreeSet::new();
    for x in 0..=cols {
        if is_superkey(x, cols, fds) || ks.iter().any(|k| x & k == x && x != *k) {
            continue;
        }
        for a in 0..n {
            let bit = 1 << a;
            if x & bit == 0 && pr & bit == 0 && closure(x, fds) & bit != 0 && minimal_for(x, a, fds) {
                out.insert((x, a));
            }
        }
    }
    out
}

/// Every nontrivial `X -> A` inside `cols` (under `fds` over the whole
/// universe) has `X` a superkey of `cols` or `A` prime in `cols`.
pub fn is_3nf(cols: u32, fds: &[Fd]) -> bool {
    let projected = |x: u32| closure(x, fds) & cols;
    let local: Vec<Fd> = (0..=cols).filter(|m| m & cols == *m).map(|m| (m, projected(m))).collect();
    let pr = prime(cols, &local);
    for x in (0..=cols).filter(|m| m & cols == *m) {
        let derived = projected(x) & !x;
        if derived == 0 || projected(x) == cols {
            continue;
        }
        if derived & !pr != 0 {
            return false;
        }
    }
    true
}

/// Tableau chase over `n` attributes.
pub fn lossless(n: usize, fragments: &[u32], fds: &[Fd]) -> bool {
    // Symbol 0 is the distinguished variable; others are row-specific.
    let mut rows: Vec<Vec<usize>> = fragments
        .iter()
        .enumerate()
        .map(|(i, f)| (0..n).map(|a| if f & (1 << a) != 0 { 0 } else { 1 + i * n + a }).collect())
        .collect();
    loop {
        let mut changed = false;
        for &(l, r) in fds {
            for i in 0..rows.len() {
                for j in 0..rows.len() {
                    if i == j || (0..n).any(|a| l & (1 << a) != 0 && rows[i][a] != rows[j][a]) {
                        continue;
                    }
                    for a in (0..n).filter(|a| r & (1 << a) != 0) {
                        let (x, y) = (rows[i][a], rows[j][a]);
                        if x != y {
                            let (keep, drop) = (x.min(y), x.max(y));
                            for row in rows.iter_mut() {
                                if row[a] == drop {
                                    row[a] = keep;
                                }
                            }
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    rows.iter().any(|row| row.iter().all(|s| *s == 0))
}

/// Each dependency follows from the projections onto the fragments.
pub fn preserves(fragments: &[u32], fds: &[Fd]) -> bool {
    fds.iter().all(|&(l, r)| {
        let mut z = l;
        loop {
            let before = z;
            for &f in fragments {
                z |= closure(z & f, fds) & f;
            }
            if z == before {
                break;
            }
        }
        r & !z == 0
    })
}
