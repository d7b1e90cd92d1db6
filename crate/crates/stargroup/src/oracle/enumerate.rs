use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::StarSemigroup;

/// Largest order the enumerator accepts.
pub const MAX_ORDER: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dedup {
    None,
    Iso,
    IsoAnti,
}

#[derive(Debug, Clone)]
pub struct EnumerationTask {
    pub order: usize,
    pub dedup: Dedup,
    /// Keep only tables admitting at least one valid star.
    pub require_star: bool,
    /// Cap on visited search nodes.
    pub budget: u64,
}

impl EnumerationTask {
    pub fn new(order: usize, dedup: Dedup) -> Self {
        EnumerationTask {
            order,
            dedup,
            require_star: false,
            budget: 50_000_000,
        }
    }
}

/// All associative tables of the given order, flat and row-major, in
/// lexicographic order. With deduplication each class is represented by its
/// lexicographically least relabeling.
pub fn enumerate_semigroups(task: &EnumerationTask) -> Result<Vec<Vec<usize>>> {
    let n = task.order;
    if n == 0 || n > MAX_ORDER {
        return Err(Error::Shape(format!("order {n} outside 1..={MAX_ORDER}")));
    }
    let nodes = AtomicU64::new(0);
    // split the search on the first two cells
    let prefixes: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(_, b)| n > 1 || b == 0)
        .collect();
    let parts: Vec<Result<Vec<Vec<usize>>>> = prefixes
        .par_iter()
        .map(|&(a, b)| {
            let mut table = vec![n; n * n];
            table[0] = a;
            let mut out = Vec::new();
            if n > 1 {
                table[1] = b;
                if consistent(&table, n) {
                    search(&mut table, n, 2, &nodes, task.budget, &mut out)?;
                }
            } else if consistent(&table, n) {
                out.push(table.clone());
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for p in parts {
        all.extend(p?);
    }
    let mut set = BTreeSet::new();
    for t in all {
        if task.require_star && star_structures(&t, n).is_empty() {
            continue;
        }
        let key = match task.dedup {
            Dedup::None => t,
            Dedup::Iso => canonical(&t, n, false),
            Dedup::IsoAnti => canonical(&t, n, true),
        };
        set.insert(key);
    }
    Ok(set.into_iter().collect())
}

fn search(
    table: &mut Vec<usize>,
    n: usize,
    cell: usize,
    nodes: &AtomicU64,
    budget: u64,
    out: &mut Vec<Vec<usize>>,
) -> Result<()> {
    if cell == n * n {
        out.push(table.clone());
        return Ok(());
    }
    for v in 0..n {
        if nodes.fetch_add(1, Ordering::Relaxed) >= budget {
            return Err(Error::BudgetExceeded(budget));
        }
        table[cell] = v;
        if consistent(table, n) {
            search(table, n, cell + 1, nodes, budget, out)?;
        }
    }
    table[cell] = n;
    Ok(())
}

/// Associativity on every triple whose four products are already filled.
fn consistent(t: &[usize], n: usize) -> bool {
    for x in 0..n {
        for y in 0..n {
            let xy = t[x * n + y];
            if xy == n {
                continue;
            }
            for z in 0..n {
                let l = t[xy * n + z];
                let yz = t[y * n + z];
                if l == n || yz == n {
                    continue;
                }
                let r = t[x * n + yz];
                if r != n && l != r {
                    return false;
                }
            }
        }
    }
    true
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Lexicographically least image of the table under relabeling (and
/// transposition when `anti` is set).
pub fn canonical(t: &[usize], n: usize, anti: bool) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    for p in permutations(n) {
        for transpose in [false, true] {
            if transpose && !anti {
                continue;
            }
            let mut img = vec![0; n * n];
            for x in 0..n {
                for y in 0..n {
                    let v = if transpose { t[y * n + x] } else { t[x * n + y] };
                    img[p[x] * n + p[y]] = p[v];
                }
            }
            if best.as_ref().map_or(true, |b| img < *b) {
                best = Some(img);
            }
        }
    }
    best.unwrap()
}

/// All involutions σ with x σ(x) x = x on an associative table, in
/// lexicographic order of σ.
pub(crate) fn star_structures(t: &[usize], n: usize) -> Vec<Vec<usize>> {
    fn go(t: &[usize], n: usize, star: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(x) = (0..n).find(|&x| star[x] == n) else {
            out.push(star.clone());
            return;
        };
        let m = |a: usize, b: usize| t[a * n + b];
        for y in x..n {
            if star[y] != n {
                continue;
            }
            if m(m(x, y), x) != x || m(m(y, x), y) != y {
                continue;
            }
            star[x] = y;
            star[y] = x;
            go(t, n, star, out);
            star[x] = n;
            star[y] = n;
        }
    }
    let mut out = Vec::new();
    go(t, n, &mut vec![n; n], &mut out);
    out.sort();
    out
}

/// Every *-semigroup structure on a table.
pub fn enumerate_star_structures(table: &[usize], n: usize) -> Result<Vec<StarSemigroup>> {
    star_structures(table, n)
        .into_iter()
        .map(|star| StarSemigroup::from_flat(None, n, table.to_vec(), star))
        .collect()
}

/// All *-semigroups of order n, one table per isomorphism class of the
/// underlying semigroup, with every star on it.
pub fn all_star_semigroups(n: usize) -> Result<Vec<StarSemigroup>> {
    let mut out = Vec::new();
    for t in enumerate_semigroups(&EnumerationTask::new(n, Dedup::Iso))? {
        out.extend(enumerate_star_structures(&t, n)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts_up_to_iso_and_anti_iso() {
        let counts: Vec<usize> = (1..=4)
            .map(|n| enumerate_semigroups(&EnumerationTask::new(n, Dedup::IsoAnti)).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 4, 18, 126]);
    }

    #[test]
    fn labeled_and_iso_counts() {
        let labeled: Vec<usize> = (1..=3)
            .map(|n| enumerate_semigroups(&EnumerationTask::new(n, Dedup::None)).unwrap().len())
            .collect();
        assert_eq!(labeled, vec![1, 8, 113]);
        let iso: Vec<usize> = (1..=3)
            .map(|n| enumerate_semigroups(&EnumerationTask::new(n, Dedup::Iso)).unwrap().len())
            .collect();
        assert_eq!(iso, vec![1, 5, 24]);
    }

    #[test]
    fn null_semigroup_has_no_star() {
        assert!(star_structures(&[0, 0, 0, 0], 2).is_empty());
        let two = enumerate_semigroups(&EnumerationTask::new(2, Dedup::Iso)).unwrap();
        assert!(two.iter().any(|t| star_structures(t, 2).is_empty()));
    }

    #[test]
    fn group_has_inversion_star() {
        // Z/3
        let t = vec![0, 1, 2, 1, 2, 0, 2, 0, 1];
        assert!(star_structures(&t, 3).contains(&vec![0, 2, 1]));
        // left zero: identity star qualifies
        assert!(star_structures(&[0, 0, 1, 1], 2).contains(&vec![0, 1]));
    }

    #[test]
    fn budget_is_enforced() {
        let mut task = EnumerationTask::new(4, Dedup::None);
        task.budget = 10;
        assert!(matches!(enumerate_semigroups(&task), Err(Error::BudgetExceeded(10))));
    }

    #[test]
    fn output_is_sorted_and_deterministic() {
        let a = enumerate_semigroups(&EnumerationTask::new(3, Dedup::Iso)).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| enumerate_semigroups(&EnumerationTask::new(3, Dedup::Iso)).unwrap());
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }
}
