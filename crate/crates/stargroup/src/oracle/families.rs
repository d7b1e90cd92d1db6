use crate::error::{Error, Result};
use crate::kernel::StarSemigroup;

pub const FAMILIES: [&str; 6] = [
    "symmetric_inverse",
    "semilattice_chain",
    "cyclic_group",
    "left_zero",
    "right_zero",
    "brandt",
];

/// A named standard *-semigroup.
pub fn standard_family(name: &str, n: usize) -> Result<StarSemigroup> {
    match name {
        "symmetric_inverse" => symmetric_inverse(n),
        "semilattice_chain" => build(format!("chain{n}"), n, |x, y| x.min(y), |x| x),
        "cyclic_group" => build(format!("C{n}"), n, |x, y| (x + y) % n, |x| (n - x) % n),
        "left_zero" => build(format!("LZ{n}"), n, |x, _| x, |x| x),
        "right_zero" => build(format!("RZ{n}"), n, |_, y| y, |x| x),
        "brandt" => brandt(n),
        _ => Err(Error::UnknownFamily(name.to_string())),
    }
}

fn build(
    name: String,
    n: usize,
    mul: impl Fn(usize, usize) -> usize,
    star: impl Fn(usize) -> usize,
) -> Result<StarSemigroup> {
    if n == 0 {
        return Err(Error::Shape("empty carrier".into()));
    }
    let table = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| mul(x, y)).collect();
    StarSemigroup::from_flat(Some(name), n, table, (0..n).map(star).collect())
}

/// Partial injections of `0..k` as vectors of optional images, ordered by
/// domain size and then by graph.
pub fn partial_injections(k: usize) -> Vec<Vec<Option<usize>>> {
    fn go(i: usize, k: usize, cur: &mut Vec<Option<usize>>, used: &mut Vec<bool>, out: &mut Vec<Vec<Option<usize>>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        go(i + 1, k, cur, used, out);
        cur.pop();
        for j in 0..k {
            if !used[j] {
                used[j] = true;
                cur.push(Some(j));
                go(i + 1, k, cur, used, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, k, &mut Vec::new(), &mut vec![false; k], &mut out);
    let graph = |m: &Vec<Option<usize>>| -> Vec<(usize, usize)> {
        m.iter().enumerate().filter_map(|(i, v)| v.map(|j| (i, j))).collect()
    };
    out.sort_by_key(|m| (graph(m).len(), graph(m)));
    out
}

/// Partial bijections under composition `(st)(i) = s(t(i))`.
fn symmetric_inverse(k: usize) -> Result<StarSemigroup> {
    if k == 0 || k > 3 {
        return Err(Error::Shape(format!("symmetric_inverse needs 1 <= n <= 3, got {k}")));
    }
    let maps = partial_injections(k);
    let index = |m: &Vec<Option<usize>>| maps.iter().position(|q| q == m).unwrap();
    let n = maps.len();
    let mut mul = Vec::with_capacity(n * n);
    for s in &maps {
        for t in &maps {
            let st: Vec<Option<usize>> = t.iter().map(|v| v.and_then(|j| s[j])).collect();
            mul.push(index(&st));
        }
    }
    let star = maps
        .iter()
        .map(|m| {
            let mut inv = vec![None; k];
            for (i, v) in m.iter().enumerate() {
                if let Some(j) = v {
                    inv[*j] = Some(i);
                }
            }
            index(&inv)
        })
        .collect();
    StarSemigroup::from_flat(Some(format!("I{k}")), n, mul, star)
}

/// The Brandt semigroup: zero plus matrix units (i,j), (i,j)(j,l) = (i,l).
fn brandt(k: usize) -> Result<StarSemigroup> {
    if k == 0 {
        return Err(Error::Shape("empty carrier".into()));
    }
    let n = k * k + 1;
    let unit = |i: usize, j: usize| 1 + i * k + j;
    let mut mul = vec![0; n * n];
    let mut star = vec![0; n];
    for i in 0..k {
        for j in 0..k {
            star[unit(i, j)] = unit(j, i);
            for l in 0..k {
                mul[unit(i, j) * n + unit(j, l)] = unit(i, l);
            }
        }
    }
    StarSemigroup::from_flat(Some(format!("B{k}")), n, mul, star)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_inverse_orders() {
        assert_eq!(standard_family("symmetric_inverse", 1).unwrap().order(), 2);
        assert_eq!(standard_family("symmetric_inverse", 2).unwrap().order(), 7);
        assert_eq!(standard_family("symmetric_inverse", 3).unwrap().order(), 34);
        assert!(standard_family("symmetric_inverse", 4).is_err());
    }

    #[test]
    fn i2_layout() {
        let i2 = standard_family("symmetric_inverse", 2).unwrap();
        let maps = partial_injections(2);
        assert_eq!(maps[0], vec![None, None]);
        assert_eq!(maps[5], vec![Some(0), Some(1)]);
        assert_eq!(maps[6], vec![Some(1), Some(0)]);
        assert_eq!(i2.projections(), vec![0, 1, 4, 5]);
        // swap restricted to {first point}
        assert_eq!(maps[i2.mul(6, 1)], vec![Some(1), None]);
    }

    #[test]
    fn small_members() {
        let sl2 = standard_family("semilattice_chain", 2).unwrap();
        assert_eq!(sl2.rows(), vec![vec![0, 0], vec![0, 1]]);
        let c2 = standard_family("cyclic_group", 2).unwrap();
        assert_eq!(c2.rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(standard_family("brandt", 2).unwrap().order(), 5);
        assert_eq!(standard_family("right_zero", 3).unwrap().mul(0, 2), 2);
        assert!(matches!(standard_family("free", 2), Err(Error::UnknownFamily(_))));
    }
}
