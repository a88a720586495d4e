//! Entropy: the monotone dyadic upper-bound estimator, exact entropy of
//! `ℤ`-SFTs by transfer matrices, and a strip transfer-matrix value for
//! nearest-neighbour `ℤ²`-SFTs.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rayon::prelude::*;

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::pattern::Support;
use crate::sft::{SftSpec, Window};
use crate::symbols::Symbol;

/// Which subsets `A ⊆ B_n` the estimator minimizes over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubsetFamily {
    /// Every nonempty subset of the largest ball `B_k` (`k ≤ n`) with at most
    /// this many cells, plus every ball `B_j` with `j ≤ n`.
    Capped(usize),
    /// The balls `B_j`, `j ≤ n`.
    Balls,
    /// These windows, each from the first `n` whose ball contains it.
    Windows(Vec<Support>),
}

impl Default for SubsetFamily {
    fn default() -> Self {
        SubsetFamily::Capped(12)
    }
}

impl fmt::Display for SubsetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetFamily::Capped(c) => write!(f, "capped:{c}"),
            SubsetFamily::Balls => write!(f, "balls"),
            SubsetFamily::Windows(w) => write!(f, "windows:{}", w.len()),
        }
    }
}

impl FromStr for SubsetFamily {
    type Err = Error;

    /// Parses `capped:<c>` or `balls`; window lists come from files.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("capped", c)) => c
                .parse()
                .map(SubsetFamily::Capped)
                .map_err(|_| Error::invalid(format!("bad cap in family `{s}`"))),
            None if s == "balls" => Ok(SubsetFamily::Balls),
            _ => Err(Error::invalid(format!("unknown subset family `{s}`"))),
        }
    }
}

/// One step of the estimator.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyRow {
    pub n: usize,
    /// `|B_n|`.
    pub ball: usize,
    /// Number of sets `A` minimized over.
    pub family: usize,
    /// `h_n = h_num / 2ⁿ`; meaningless when `empty`.
    pub h_num: i64,
    /// `min_A (1/|A|) ln |restrictions of B_n-patterns to A|`.
    pub raw: f64,
    /// Same with locally admissible `A`-patterns counted directly.
    pub raw_loc: f64,
    pub ms: u64,
    /// No locally admissible pattern on `B_n`, so the subshift is empty.
    pub empty: bool,
}

impl EntropyRow {
    pub fn h_den(&self) -> u64 {
        1u64 << self.n
    }

    /// `h_n`, or negative infinity for an empty language.
    pub fn h(&self) -> f64 {
        if self.empty {
            f64::NEG_INFINITY
        } else {
            self.h_num as f64 / self.h_den() as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyTrace {
    pub family: String,
    pub rows: Vec<EntropyRow>,
}

impl EntropyTrace {
    /// CSV with columns `n,ball,family,h_n_num,h_n_den,raw,ms`.
    pub fn to_csv(&self, bits: bool) -> String {
        let scale = if bits { std::f64::consts::LOG2_E } else { 1.0 };
        let mut out = String::from("n,ball,family,h_n_num,h_n_den,raw,ms\n");
        for r in &self.rows {
            let (num, raw) = if r.empty {
                ("-inf".to_string(), "-inf".to_string())
            } else {
                (r.h_num.to_string(), format!("{:.9}", r.raw * scale))
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.n,
                r.ball,
                r.family,
                num,
                r.h_den(),
                raw,
                r.ms
            ));
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct EstimateOptions {
    /// A set `A` whose locally admissible patterns number at most this many
    /// is counted by restriction (each candidate checked for extension to
    /// `B_n`); larger sets are counted by local admissibility alone. The
    /// choice depends only on `A`, so the trace stays monotone.
    pub restrict_limit: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            restrict_limit: 1 << 16,
        }
    }
}

/// Natural log of a big integer (`-∞` for zero).
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Numerator of the least `k/2ⁿ` strictly above `raw`.
pub fn dyadic_above(raw: f64, n: usize) -> i64 {
    (raw * (1u64 << n) as f64).floor() as i64 + 1
}

struct Member {
    support: Support,
    loc: BigUint,
    /// Locally admissible patterns, kept when the set is counted by restriction.
    candidates: Option<Vec<Vec<Symbol>>>,
}

fn positions(within: &Support, part: &Support) -> Vec<usize> {
    part.cells()
        .iter()
        .map(|c| within.position(c).expect("subset"))
        .collect()
}

fn extendable_count(
    big: &Window<'_>,
    part: &Support,
    candidates: &[Vec<Symbol>],
    meter: &Meter,
) -> Result<Vec<bool>> {
    let idx = positions(big.support(), part);
    candidates
        .par_iter()
        .map(|p| {
            let fixed: Vec<(usize, Symbol)> = idx.iter().copied().zip(p.iter().copied()).collect();
            big.extendable(&fixed, meter)
        })
        .collect()
}

/// The monotone upper-bound estimator with default options.
pub fn estimate(
    x: &SftSpec,
    n_max: usize,
    family: &SubsetFamily,
    budget: &Budget,
) -> Result<EntropyTrace> {
    estimate_with(x, n_max, family, &EstimateOptions::default(), budget)
}

/// For each `n ≤ n_max`, `h_n = min_A h^A_n` where `h^A_n` is the least
/// `k/2ⁿ` strictly above `(1/|A|) ln |L^A_n|` and `L^A_n` is the set of
/// restrictions to `A` of the locally admissible patterns on `B_n`.
/// Members whose window cannot be counted within the budget are left out of
/// the family at every step.
pub fn estimate_with(
    x: &SftSpec,
    n_max: usize,
    family: &SubsetFamily,
    opts: &EstimateOptions,
    budget: &Budget,
) -> Result<EntropyTrace> {
    if n_max > 40 {
        return Err(Error::invalid("n_max above 40 is not supported"));
    }
    let g = x.group();
    let mut balls: Vec<Support> = Vec::new();
    let mut members: HashMap<Support, Member> = HashMap::new();
    let mut too_big: HashSet<Support> = HashSet::new();
    let mut rows = Vec::new();
    let mut empty = false;
    for n in 0..=n_max {
        let start = Instant::now();
        balls.push(Support::new(g.ball(n)?.elements));
        let ball = balls[n].clone();
        let big = Window::new(x, &ball)?;
        let full = vec![x.alphabet().full_set(); ball.len()];
        if empty
            || big
                .first_within(&full, &budget.meter("entropy estimate"))?
                .is_none()
        {
            empty = true;
            rows.push(EntropyRow {
                n,
                ball: ball.len(),
                family: 0,
                h_num: 0,
                raw: f64::NEG_INFINITY,
                raw_loc: f64::NEG_INFINITY,
                ms: start.elapsed().as_millis() as u64,
                empty: true,
            });
            continue;
        }
        let (mut sets, base) = family_at(family, &balls, n)?;
        for s in &sets {
            if !members.contains_key(s) && !too_big.contains(s) {
                let w = Window::new(x, s)?;
                let loc = match w.count(budget) {
                    Err(Error::ResourceLimit(_)) => {
                        too_big.insert(s.clone());
                        continue;
                    }
                    r => r?,
                };
                let candidates = if loc <= BigUint::from(opts.restrict_limit) {
                    Some(w.enumerate(budget)?)
                } else {
                    None
                };
                members.insert(
                    s.clone(),
                    Member {
                        support: s.clone(),
                        loc,
                        candidates,
                    },
                );
            }
        }
        sets.retain(|s| !too_big.contains(s));
        if sets.is_empty() {
            return Err(Error::limit(format!(
                "no member of the family at n = {n} can be counted within the budget"
            )));
        }
        let meter = budget.meter("entropy estimate");
        let projected = match base.as_ref().and_then(|b| members.get(b)) {
            Some(Member {
                support,
                candidates: Some(c),
                ..
            }) => {
                let ok = extendable_count(&big, support, c, &meter)?;
                let kept: Vec<&Vec<Symbol>> = c
                    .iter()
                    .zip(ok)
                    .filter(|(_, k)| *k)
                    .map(|(p, _)| p)
                    .collect();
                Some((support.clone(), kept))
            }
            _ => None,
        };
        let counts: Vec<Result<(f64, f64)>> = sets
            .par_iter()
            .map(|s| {
                let m = &members[s];
                let size = m.support.len() as f64;
                let loc_raw = ln_big(&m.loc) / size;
                let count = match &m.candidates {
                    _ if s == &ball => m.loc.clone(),
                    None => m.loc.clone(),
                    Some(c) => match &projected {
                        Some((base, kept)) if s.is_subset(base) => {
                            let idx = positions(base, s);
                            let distinct: HashSet<Vec<Symbol>> = kept
                                .iter()
                                .map(|p| idx.iter().map(|&i| p[i]).collect())
                                .collect();
                            BigUint::from(distinct.len())
                        }
                        _ => BigUint::from(
                            extendable_count(&big, s, c, &meter)?
                                .into_iter()
                                .filter(|&k| k)
                                .count(),
                        ),
                    },
                };
                Ok((ln_big(&count) / size, loc_raw))
            })
            .collect();
        let mut raw = f64::INFINITY;
        let mut raw_loc = f64::INFINITY;
        for c in counts {
            let (r, l) = c?;
            raw = raw.min(r);
            raw_loc = raw_loc.min(l);
        }
        rows.push(EntropyRow {
            n,
            ball: ball.len(),
            family: sets.len(),
            h_num: dyadic_above(raw, n),
            raw,
            raw_loc,
            ms: start.elapsed().as_millis() as u64,
            empty: false,
        });
    }
    Ok(EntropyTrace {
        family: family.to_string(),
        rows,
    })
}

/// Family members at step `n`, and the ball whose subsets they include.
fn family_at(
    family: &SubsetFamily,
    balls: &[Support],
    n: usize,
) -> Result<(Vec<Support>, Option<Support>)> {
    let mut sets: Vec<Support> = Vec::new();
    let mut base = None;
    match family {
        SubsetFamily::Capped(c) => {
            if let Some(k) = (0..=n).rev().find(|&k| balls[k].len() <= *c) {
                let cells = balls[k].cells();
                if cells.len() >= 63 {
                    return Err(Error::limit("subset cap too large"));
                }
                for mask in 1u64..(1u64 << cells.len()) {
                    sets.push(Support::new(
                        cells
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, c)| c.clone())
                            .collect(),
                    ));
                }
                base = Some(balls[k].clone());
            }
            sets.extend(balls[..=n].iter().cloned());
        }
        SubsetFamily::Balls => sets.extend(balls[..=n].iter().cloned()),
        SubsetFamily::Windows(ws) => {
            sets.extend(
                ws.iter()
                    .filter(|w| !w.is_empty() && w.is_subset(&balls[n]))
                    .cloned(),
            );
            if sets.is_empty() {
                sets.push(balls[n].clone());
            }
        }
    }
    let mut seen = HashSet::new();
    sets.retain(|s| seen.insert(s.clone()));
    Ok((sets, base))
}

/// Exact entropy of a `ℤ`-SFT.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactEntropy {
    pub entropy: f64,
    pub spectral_radius: f64,
    /// Admissible `m`-blocks.
    pub states: usize,
    /// Admissible `(m+1)`-blocks.
    pub transitions: usize,
    /// The transition graph has no cycle: the subshift is empty.
    pub empty: bool,
}

/// Position in `ℤ` of an element of a one-generator infinite cyclic group.
fn z_position(e: &Element) -> i64 {
    e.letters()
        .iter()
        .map(|&l| if l == 0 { 1 } else { -1 })
        .sum()
}

fn z_interval(g: &Group, len: usize) -> Result<(Support, Vec<usize>)> {
    let cells: Vec<Element> = (0..len as i64)
        .map(|i| {
            let w = if i == 0 {
                String::new()
            } else {
                format!("{}^{i}", g.generator_names()[0])
            };
            g.canonicalize_str(if w.is_empty() { "1" } else { &w })
        })
        .collect::<Result<_>>()?;
    let support = Support::new(cells.clone());
    let order = cells
        .iter()
        .map(|c| support.position(c).expect("member"))
        .collect();
    Ok((support, order))
}

/// `ln` of the spectral radius of the block transition matrix of `x`
/// recoded with memory `memory`.
pub fn exact_z(x: &SftSpec, memory: usize, budget: &Budget) -> Result<ExactEntropy> {
    let g = x.group();
    if g.generator_names().len() != 1 || !g.is_infinite_cyclic() {
        return Err(Error::invalid(
            "exact entropy needs an infinite cyclic group on one generator",
        ));
    }
    for r in x.forbidden() {
        let pos: Vec<i64> = r.support().cells().iter().map(z_position).collect();
        let span = (pos.iter().max().unwrap() - pos.iter().min().unwrap()) as usize + 1;
        if span > memory + 1 {
            return Err(Error::MemoryTooSmall { span, memory });
        }
    }
    if memory == 0 {
        let k = Window::new(x, &z_interval(g, 1)?.0)?
            .count(budget)?
            .to_usize()
            .unwrap_or(usize::MAX);
        return Ok(ExactEntropy {
            entropy: if k == 0 { 0.0 } else { (k as f64).ln() },
            spectral_radius: k as f64,
            states: k,
            transitions: k,
            empty: k == 0,
        });
    }
    let (short, short_order) = z_interval(g, memory)?;
    let (long, long_order) = z_interval(g, memory + 1)?;
    let blocks = Window::new(x, &short)?.enumerate(budget)?;
    if blocks.len() > budget.states {
        return Err(Error::limit(format!(
            "{} blocks exceed the state budget",
            blocks.len()
        )));
    }
    let in_order =
        |p: &[Symbol], order: &[usize]| -> Vec<Symbol> { order.iter().map(|&i| p[i]).collect() };
    let index: HashMap<Vec<Symbol>, usize> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| (in_order(b, &short_order), i))
        .collect();
    let mut adj = vec![Vec::new(); blocks.len()];
    let mut transitions = 0;
    for p in Window::new(x, &long)?.enumerate(budget)? {
        let seq = in_order(&p, &long_order);
        let (Some(&a), Some(&b)) = (index.get(&seq[..memory]), index.get(&seq[1..])) else {
            continue;
        };
        adj[a].push(b);
        transitions += 1;
    }
    let rho = spectral_radius(&adj, budget)?;
    Ok(ExactEntropy {
        entropy: if rho > 0.0 { rho.ln() } else { 0.0 },
        spectral_radius: rho,
        states: blocks.len(),
        transitions,
        empty: rho == 0.0,
    })
}

const TOLERANCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 2_000_000;

/// Spectral radius of a 0/1 matrix given by adjacency lists: the maximum
/// over strongly connected components, each by power iteration on `M + I`
/// with Collatz–Wielandt bounds.
pub fn spectral_radius(adj: &[Vec<usize>], budget: &Budget) -> Result<f64> {
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..adj.len()).map(|_| graph.add_node(())).collect();
    for (a, outs) in adj.iter().enumerate() {
        for &b in outs {
            graph.add_edge(nodes[a], nodes[b], ());
        }
    }
    let meter = budget.meter("power iteration");
    let mut best = 0.0f64;
    for comp in tarjan_scc(&graph) {
        let local: HashMap<usize, usize> = comp
            .iter()
            .enumerate()
            .map(|(i, v)| (v.index(), i))
            .collect();
        let edges: Vec<(usize, usize)> = comp
            .iter()
            .flat_map(|v| {
                let a = local[&v.index()];
                adj[v.index()]
                    .iter()
                    .filter_map(|b| local.get(b).map(|&b| (a, b)))
                    .collect::<Vec<_>>()
            })
            .collect();
        if edges.is_empty() {
            continue;
        }
        best = best.max(component_radius(comp.len(), &edges, &meter)?);
    }
    Ok(best)
}

fn component_radius(n: usize, edges: &[(usize, usize)], meter: &Meter) -> Result<f64> {
    let mut v = vec![1.0f64; n];
    let mut gap = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        meter.tick((n + edges.len()) as u64)?;
        let mut w = v.clone();
        for &(a, b) in edges {
            w[a] += v[b];
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (wi, vi) in w.iter().zip(&v) {
            let q = wi / vi;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        gap = hi - lo;
        if gap <= TOLERANCE * hi {
            return Ok((lo + hi) / 2.0 - 1.0);
        }
        let norm = w.iter().cloned().fold(0.0, f64::max);
        v = w.into_iter().map(|x| x / norm).collect();
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        gap,
    })
}

/// `(1/w) ln ρ` for the transfer matrix between rows of a width-`w` strip of
/// a nearest-neighbour `ℤ²`-SFT, rows wrapped periodically.
pub fn strip_lower_bound(x: &SftSpec, width: usize, budget: &Budget) -> Result<f64> {
    let g = x.group();
    if g.free_abelian_rank() != Some(2) || width == 0 {
        return Err(Error::invalid(
            "strip values need a nearest-neighbour SFT over Z^2 and a positive width",
        ));
    }
    let k = x.alphabet().len();
    let states = (k as u128)
        .checked_pow(width as u32)
        .filter(|&s| s <= budget.states as u128)
        .ok_or_else(|| Error::limit(format!("{k}^{width} strip states exceed the state budget")))?
        as usize;
    // Each rule as (dx, dy, set) offsets from its lower-left corner.
    let mut rules = Vec::new();
    for r in x.forbidden() {
        let mut cells = Vec::new();
        for (c, s) in r.support().cells().iter().zip(r.sets()) {
            let v = g.coordinates(c)?.expect("free abelian");
            cells.push((v[0], v[1], s));
        }
        let (mx, my) = (
            cells.iter().map(|c| c.0).min().unwrap(),
            cells.iter().map(|c| c.1).min().unwrap(),
        );
        if cells.iter().any(|c| c.0 - mx > 1 || c.1 - my > 1) {
            return Err(Error::invalid("forbidden supports must fit in a 2x2 box"));
        }
        rules.push(
            cells
                .into_iter()
                .map(|(x, y, s)| ((x - mx) as usize, (y - my) as usize, s))
                .collect::<Vec<_>>(),
        );
    }
    let row = |code: usize| -> Vec<Symbol> {
        let mut v = vec![0; width];
        let mut c = code;
        for i in (0..width).rev() {
            v[i] = (c % k) as Symbol;
            c /= k;
        }
        v
    };
    let hits = |rows: [&[Symbol]; 2], two_rows: bool| -> bool {
        rules.iter().any(|rule| {
            let tall = rule.iter().any(|c| c.1 == 1);
            tall == two_rows
                && (0..width).any(|t| {
                    rule.iter()
                        .all(|&(dx, dy, s)| s.contains(rows[dy][(t + dx) % width]))
                })
        })
    };
    let rows: Vec<Vec<Symbol>> = (0..states).map(row).collect();
    let valid: Vec<usize> = (0..states)
        .filter(|&i| !hits([&rows[i], &rows[i]], false))
        .collect();
    let meter = budget.meter("strip transfer matrix");
    let mut adj = vec![Vec::new(); valid.len()];
    for (a, &ra) in valid.iter().enumerate() {
        meter.tick(valid.len() as u64)?;
        for (b, &rb) in valid.iter().enumerate() {
            if !hits([&rows[ra], &rows[rb]], true) {
                adj[a].push(b);
            }
        }
    }
    let rho = spectral_radius(&adj, budget)?;
    Ok(if rho > 0.0 {
        rho.ln() / width as f64
    } else {
        f64::NEG_INFINITY
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::pattern::Alphabet;
    use crate::sft::tests::{golden_mean, hard_square};
    use crate::sft::{full_shift, ForbiddenPattern};
    use crate::symbols::SymbolSet;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn z() -> Arc<Group> {
        Arc::new(Group::new(GroupSpec::z()).unwrap())
    }

    /// `ln ρ(M)` via `ln ‖M^{2^j}‖ / 2^j` with renormalized squaring.
    fn gelfand(m: &[Vec<f64>]) -> f64 {
        let n = m.len();
        let mut a = m.to_vec();
        let mut log_scale = 0.0;
        let steps = 40;
        for _ in 0..steps {
            let mut b = vec![vec![0.0; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if a[i][k] != 0.0 {
                        for j in 0..n {
                            b[i][j] += a[i][k] * a[k][j];
                        }
                    }
                }
            }
            let norm: f64 = b.iter().flatten().cloned().fold(0.0, f64::max);
            if norm == 0.0 {
                return f64::NEG_INFINITY;
            }
            log_scale = 2.0 * log_scale + norm.ln();
            a = b
                .into_iter()
                .map(|r| r.into_iter().map(|x| x / norm).collect())
                .collect();
        }
        log_scale / 2f64.powi(steps)
    }

    /// Nearest-neighbour `ℤ`-SFT forbidding the listed two-letter words.
    fn pairs_sft(k: usize, banned: &[(u32, u32)]) -> SftSpec {
        let g = z();
        let a = g.canonicalize_str("a").unwrap();
        let rules = banned
            .iter()
            .filter_map(|&(s, t)| {
                ForbiddenPattern::new(vec![
                    (Element::identity(), SymbolSet::singleton(k, s)),
                    (a.clone(), SymbolSet::singleton(k, t)),
                ])
            })
            .collect();
        SftSpec::new(g, Alphabet::numbered(k), rules).unwrap()
    }

    #[test]
    fn exact_values() {
        let b = Budget::default();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let e = exact_z(&golden_mean(z()), 1, &b).unwrap();
        assert!((e.entropy - phi.ln()).abs() < 1e-9);
        for k in 1..5 {
            let x = full_shift(z(), Alphabet::numbered(k));
            for m in 0..3 {
                assert!((exact_z(&x, m, &b).unwrap().entropy - (k as f64).ln()).abs() < 1e-12);
            }
        }
        let g = z();
        let no_one = SftSpec::new(
            g.clone(),
            Alphabet::numbered(2),
            vec![
                ForbiddenPattern::new(vec![(Element::identity(), SymbolSet::singleton(2, 1))])
                    .unwrap(),
            ],
        )
        .unwrap();
        let e = exact_z(&no_one, 1, &b).unwrap();
        assert_eq!(e.entropy, 0.0);
        assert!(!e.empty);
        assert!(matches!(
            exact_z(&golden_mean(z()), 0, &b),
            Err(Error::MemoryTooSmall { span: 2, memory: 0 })
        ));
    }

    #[test]
    fn empty_shift_flagged() {
        let x = pairs_sft(1, &[(0, 0)]);
        let e = exact_z(&x, 1, &Budget::default()).unwrap();
        assert!(e.empty);
        let t = estimate(&x, 2, &SubsetFamily::Balls, &Budget::default()).unwrap();
        assert!(t.rows[1].empty && t.rows[1].h() == f64::NEG_INFINITY);
        assert!(!t.rows[0].empty);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn exact_matches_gelfand(k in 1usize..4, mask in any::<u16>()) {
            let mut banned = Vec::new();
            let mut m = vec![vec![1.0; k]; k];
            for s in 0..k {
                for t in 0..k {
                    if mask >> (s * k + t) & 1 == 1 {
                        banned.push((s as u32, t as u32));
                        m[s][t] = 0.0;
                    }
                }
            }
            let e = exact_z(&pairs_sft(k, &banned), 1, &Budget::default()).unwrap();
            let oracle = gelfand(&m);
            if oracle == f64::NEG_INFINITY {
                prop_assert!(e.empty);
            } else {
                prop_assert!((e.entropy - oracle).abs() < 1e-6, "{} vs {}", e.entropy, oracle);
            }
        }
    }

    #[test]
    fn strip_values_against_row_oracle() {
        let b = Budget::default();
        let g2 = Arc::new(Group::new(GroupSpec::z2()).unwrap());
        let full = full_shift(g2, Alphabet::numbered(2));
        for w in 1..5 {
            assert!((strip_lower_bound(&full, w, &b).unwrap() - 2f64.ln()).abs() < 1e-12);
        }
        let hs = hard_square();
        assert_eq!(strip_lower_bound(&hs, 1, &b).unwrap(), 0.0);
        for w in 2..6 {
            // Rows are cyclic binary words without adjacent ones; rows stack
            // when they share no one.
            let ok_row =
                |r: usize| (0..w).all(|i| !(r >> i & 1 == 1 && r >> ((i + 1) % w) & 1 == 1));
            let rows: Vec<usize> = (0..1 << w).filter(|&r| ok_row(r)).collect();
            let m: Vec<Vec<f64>> = rows
                .iter()
                .map(|&r| {
                    rows.iter()
                        .map(|&s| if r & s == 0 { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect();
            let got = strip_lower_bound(&hs, w, &b).unwrap();
            assert!((got - gelfand(&m) / w as f64).abs() < 1e-6, "w={w}");
        }
        let w2 = strip_lower_bound(&hs, 2, &b).unwrap();
        assert!((w2 - (1.0 + 2f64.sqrt()).ln() / 2.0).abs() < 1e-9);
    }

    #[test]
    fn estimator_grid_and_monotone() {
        let b = Budget::default();
        let t = estimate(&golden_mean(z()), 6, &SubsetFamily::default(), &b).unwrap();
        let exact = (1.0 + 5f64.sqrt()) / 2.0;
        for w in t.rows.windows(2) {
            assert!(w[1].h_num as i128 <= 2 * w[0].h_num as i128);
        }
        for r in &t.rows {
            assert!(r.h() >= exact.ln() - 1e-9);
            assert!(r.h() > r.raw && r.h() - r.raw <= 1.0 / r.h_den() as f64);
            assert!(r.raw <= r.raw_loc + 1e-12);
        }
    }

    #[test]
    fn full_shift_raw_is_log_k() {
        let b = Budget::default();
        let g2 = Arc::new(Group::new(GroupSpec::z2()).unwrap());
        for k in 2..4 {
            let t = estimate(
                &full_shift(g2.clone(), Alphabet::numbered(k)),
                2,
                &SubsetFamily::default(),
                &b,
            )
            .unwrap();
            for r in &t.rows {
                assert!((r.raw - (k as f64).ln()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn restriction_can_be_smaller_than_local() {
        // Symbol 2 may not be followed by anything, so it never occurs
        // strictly inside a larger window.
        let x = pairs_sft(3, &[(2, 0), (2, 1), (2, 2)]);
        let fam = SubsetFamily::Windows(vec![Support::new(vec![Element::identity()])]);
        let t = estimate(&x, 1, &fam, &Budget::default()).unwrap();
        assert!((t.rows[1].raw - 2f64.ln()).abs() < 1e-12);
        assert!((t.rows[1].raw_loc - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn golden_mean_counts_by_fibonacci() {
        // Restrictions of length-(2n+1) words to sub-intervals are all golden
        // mean words, counted independently here by brute force.
        let b = Budget::default();
        let t = estimate(&golden_mean(z()), 5, &SubsetFamily::Balls, &b).unwrap();
        for r in &t.rows {
            let len = r.ball as u32;
            let count = (0u32..1 << len).filter(|w| w & (w >> 1) == 0).count() as f64;
            assert!((r.raw - count.ln() / len as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_format() {
        let t = estimate(
            &golden_mean(z()),
            1,
            &SubsetFamily::Balls,
            &Budget::default(),
        )
        .unwrap();
        let csv = t.to_csv(false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,ball,family,h_n_num,h_n_den,raw,ms");
        assert!(lines[1].starts_with("0,1,1,1,1,0.693147181,"));
    }

    #[test]
    fn family_parsing() {
        assert_eq!(
            "capped:12".parse::<SubsetFamily>().unwrap(),
            SubsetFamily::Capped(12)
        );
        assert_eq!(
            "balls".parse::<SubsetFamily>().unwrap(),
            SubsetFamily::Balls
        );
        assert!("all".parse::<SubsetFamily>().is_err());
    }
}
