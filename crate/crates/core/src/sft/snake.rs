//! The snake shift on `ℤ²`.
//!
//! Each symbol names two distinct unit directions `(L, R)`: the neighbour the
//! path comes from and the neighbour it continues to. For a cell `u` and its
//! neighbour `v = u + d` the rules are
//! `R(u) = d ⟺ L(v) = -d` and `L(u) = d ⟺ R(v) = -d`.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::{ForbiddenPattern, SftSpec};
use crate::error::Result;
use crate::group::{Group, GroupSpec};
use crate::pattern::{Alphabet, Pattern};
use crate::symbols::{Symbol, SymbolSet};

/// Unit directions in symbol-name order, as `ℤ²` coordinates.
pub const SNAKE_DIRECTIONS: [(&str, [i64; 2]); 4] =
    [("E", [1, 0]), ("N", [0, 1]), ("W", [-1, 0]), ("S", [0, -1])];

fn opposite(d: usize) -> usize {
    (d + 2) % 4
}

fn symbols() -> Vec<(usize, usize)> {
    (0..4)
        .flat_map(|l| (0..4).map(move |r| (l, r)))
        .filter(|(l, r)| l != r)
        .collect()
}

/// The `(L, R)` direction indices of a snake symbol.
pub fn snake_direction(s: Symbol) -> (usize, usize) {
    symbols()[s as usize]
}

fn snake_symbol(l: usize, r: usize) -> Symbol {
    symbols()
        .iter()
        .position(|&p| p == (l, r))
        .expect("distinct directions") as Symbol
}

fn alphabet() -> Alphabet {
    Alphabet::new(
        symbols()
            .into_iter()
            .map(|(l, r)| format!("{}{}", SNAKE_DIRECTIONS[l].0, SNAKE_DIRECTIONS[r].0)),
    )
    .expect("distinct names")
}

/// Snake shift over `ℤ²` with generators `a` (east) and `b` (north).
pub fn snake_shift() -> Result<SftSpec> {
    snake_shift_without_cycles(0)
}

/// Snake shift that additionally forbids every closed path of length at most
/// `max_cycle`. Cycles of every length are excluded only in the limit, so this
/// is a finite-type over-approximation of the cycle-free snake shift.
pub fn snake_shift_without_cycles(max_cycle: usize) -> Result<SftSpec> {
    let g = Arc::new(Group::new(GroupSpec::z2())?);
    let k = 12;
    let mut rules = Vec::new();
    for d in [0usize, 1] {
        let cell = g.from_coordinates(&SNAKE_DIRECTIONS[d].1)?;
        for u in 0..k as Symbol {
            let (lu, ru) = snake_direction(u);
            let bad = (0..k as Symbol).filter(|&v| {
                let (lv, rv) = snake_direction(v);
                (ru == d) != (lv == opposite(d)) || (lu == d) != (rv == opposite(d))
            });
            let bad = SymbolSet::from_iter(k, bad);
            if let Some(r) = ForbiddenPattern::new(vec![
                (
                    crate::group::Element::identity(),
                    SymbolSet::singleton(k, u),
                ),
                (cell.clone(), bad),
            ]) {
                rules.push(r);
            }
        }
    }
    for cycle in closed_walks(max_cycle) {
        let n = cycle.len();
        let mut cells = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let step = |a: [i64; 2], b: [i64; 2]| {
                SNAKE_DIRECTIONS
                    .iter()
                    .position(|(_, v)| v[0] == b[0] - a[0] && v[1] == b[1] - a[1])
                    .expect("unit step")
            };
            let l = step(cycle[i], cycle[(i + n - 1) % n]);
            let r = step(cycle[i], cycle[(i + 1) % n]);
            cells.push(g.from_coordinates(&cycle[i])?);
            values.push(snake_symbol(l, r));
        }
        rules.push(ForbiddenPattern::from_pattern(
            &Pattern::new(cells, values)?,
            k,
        ));
    }
    SftSpec::new(g, alphabet(), rules)
}

/// Self-avoiding closed walks from the origin of length `4..=max_len`.
fn closed_walks(max_len: usize) -> BTreeSet<Vec<[i64; 2]>> {
    fn extend(path: &mut Vec<[i64; 2]>, max_len: usize, out: &mut BTreeSet<Vec<[i64; 2]>>) {
        let last = *path.last().expect("nonempty");
        for (_, d) in SNAKE_DIRECTIONS {
            let next = [last[0] + d[0], last[1] + d[1]];
            if next == [0, 0] && path.len() >= 4 {
                out.insert(path.clone());
                continue;
            }
            if path.len() < max_len && !path.contains(&next) {
                path.push(next);
                extend(path, max_len, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    if max_len >= 4 {
        extend(&mut vec![[0, 0]], max_len, &mut out);
    }
    out
}
