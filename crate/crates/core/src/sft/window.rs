//! Forbidden-pattern placements compiled against a finite window.
//!
//! A [`Window`] lists every occurrence position of every forbidden pattern
//! whose translated support lies inside the window. Each such placement is a
//! [`Constraint`]: it is violated when every one of its cells carries a symbol
//! from the corresponding set.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{CheckedAdd, One, Zero};
use rand::seq::SliceRandom;
use rand::RngCore;
use rayon::prelude::*;

use super::SftSpec;
use crate::budget::{Budget, Meter};
use crate::error::Result;
use crate::group::Element;
use crate::pattern::{Pattern, Support};
use crate::symbols::{Symbol, SymbolSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Constraint {
    /// Window indices, ascending.
    pub cells: Vec<usize>,
    pub sets: Vec<SymbolSet>,
}

impl Constraint {
    #[inline]
    fn violated_by(&self, values: &[Symbol]) -> bool {
        self.cells
            .iter()
            .zip(&self.sets)
            .all(|(&c, s)| s.contains(values[c]))
    }
}

pub struct Window<'s> {
    sft: &'s SftSpec,
    support: Support,
    constraints: Vec<Constraint>,
    /// Constraints grouped by their largest cell index.
    by_last: Vec<Vec<usize>>,
    by_cell: Vec<Vec<usize>>,
    /// Some forbidden pattern has empty support, so nothing is admissible.
    doomed: bool,
}

impl<'s> Window<'s> {
    pub fn new(sft: &'s SftSpec, support: &Support) -> Result<Self> {
        let g = sft.group();
        let n = support.len();
        let mut constraints = Vec::new();
        let mut doomed = false;
        let mut products: HashMap<(Element, Element), Option<usize>> = HashMap::new();
        for rule in sft.forbidden() {
            if rule.support().is_empty() {
                doomed = true;
                continue;
            }
            'placement: for t in support.cells() {
                let mut cells = Vec::with_capacity(rule.support().len());
                for f in rule.support().cells() {
                    let key = (f.clone(), t.clone());
                    let idx = match products.get(&key) {
                        Some(i) => *i,
                        None => {
                            let i = support.position(&g.multiply(f, t)?);
                            products.insert(key, i);
                            i
                        }
                    };
                    match idx {
                        Some(i) => cells.push(i),
                        None => continue 'placement,
                    }
                }
                let mut pairs: Vec<(usize, SymbolSet)> =
                    cells.into_iter().zip(rule.sets().iter().cloned()).collect();
                pairs.sort_by_key(|p| p.0);
                let (cells, sets) = pairs.into_iter().unzip();
                constraints.push(Constraint { cells, sets });
            }
        }
        constraints.sort();
        constraints.dedup();
        let mut by_last = vec![Vec::new(); n];
        let mut by_cell = vec![Vec::new(); n];
        for (ci, c) in constraints.iter().enumerate() {
            by_last[*c.cells.last().expect("nonempty")].push(ci);
            for &cell in &c.cells {
                by_cell[cell].push(ci);
            }
        }
        Ok(Window {
            sft,
            support: support.clone(),
            constraints,
            by_last,
            by_cell,
            doomed,
        })
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    fn alphabet_len(&self) -> usize {
        self.sft.alphabet().len()
    }

    /// Whether the coloring (in support order) avoids every placement.
    pub fn admits(&self, values: &[Symbol]) -> bool {
        !self.doomed && !self.constraints.iter().any(|c| c.violated_by(values))
    }

    /// All admissible colorings in lexicographic order (cells in support
    /// order, symbols in alphabet order).
    pub fn enumerate(&self, budget: &Budget) -> Result<Vec<Vec<Symbol>>> {
        self.enumerate_within(None, budget)
    }

    /// As [`Window::enumerate`], with each cell restricted to a domain.
    pub fn enumerate_within(
        &self,
        domains: Option<&[SymbolSet]>,
        budget: &Budget,
    ) -> Result<Vec<Vec<Symbol>>> {
        if self.doomed {
            return Ok(Vec::new());
        }
        let n = self.len();
        if n == 0 {
            return Ok(vec![Vec::new()]);
        }
        let full = SymbolSet::full(self.alphabet_len());
        let domains: Vec<SymbolSet> = match domains {
            Some(d) => d.to_vec(),
            None => vec![full; n],
        };
        let meter = budget.meter("pattern enumeration");
        let firsts: Vec<Symbol> = domains[0].iter().collect();
        let parts: Vec<Result<Vec<Vec<Symbol>>>> = firsts
            .par_iter()
            .map(|&s| {
                let mut out = Vec::new();
                let mut values = vec![0; n];
                values[0] = s;
                if self.ok_at(0, &values) {
                    self.backtrack(1, &mut values, &domains, &meter, budget, &mut out)?;
                }
                Ok(out)
            })
            .collect();
        let mut out = Vec::new();
        for p in parts {
            out.extend(p?);
            budget.check_patterns(out.len(), "pattern enumeration")?;
        }
        Ok(out)
    }

    #[inline]
    fn ok_at(&self, i: usize, values: &[Symbol]) -> bool {
        !self.by_last[i]
            .iter()
            .any(|&ci| self.constraints[ci].violated_by(values))
    }

    fn backtrack(
        &self,
        i: usize,
        values: &mut Vec<Symbol>,
        domains: &[SymbolSet],
        meter: &Meter,
        budget: &Budget,
        out: &mut Vec<Vec<Symbol>>,
    ) -> Result<()> {
        if i == values.len() {
            out.push(values.clone());
            return budget.check_patterns(out.len(), "pattern enumeration");
        }
        for s in domains[i].iter() {
            meter.tick(1)?;
            values[i] = s;
            if self.ok_at(i, values) {
                self.backtrack(i + 1, values, domains, meter, budget, out)?;
            }
        }
        Ok(())
    }

    /// First admissible coloring in lexicographic order within the domains.
    pub fn first_within(
        &self,
        domains: &[SymbolSet],
        meter: &Meter,
    ) -> Result<Option<Vec<Symbol>>> {
        if self.doomed {
            return Ok(None);
        }
        let mut values = vec![0; self.len()];
        Ok(self
            .first_from(0, &mut values, domains, meter)?
            .then_some(values))
    }

    fn first_from(
        &self,
        i: usize,
        values: &mut Vec<Symbol>,
        domains: &[SymbolSet],
        meter: &Meter,
    ) -> Result<bool> {
        if i == values.len() {
            return Ok(true);
        }
        for s in domains[i].iter() {
            meter.tick(1)?;
            values[i] = s;
            if self.ok_at(i, values) && self.first_from(i + 1, values, domains, meter)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Admissible patterns as [`Pattern`]s.
    pub fn patterns(&self, budget: &Budget) -> Result<Vec<Pattern>> {
        Ok(self
            .enumerate(budget)?
            .into_iter()
            .map(|v| Pattern::on(self.support.clone(), v))
            .collect())
    }

    /// Number of admissible colorings.
    pub fn count(&self, budget: &Budget) -> Result<BigUint> {
        self.count_within(None, budget)
    }

    /// Number of admissible colorings with each cell restricted to a domain.
    pub fn count_within(&self, domains: Option<&[SymbolSet]>, budget: &Budget) -> Result<BigUint> {
        if self.doomed {
            return Ok(BigUint::zero());
        }
        let full = SymbolSet::full(self.alphabet_len());
        let domains: Vec<SymbolSet> = match domains {
            Some(d) => d.to_vec(),
            None => vec![full; self.len()],
        };
        let plan = self.plan();
        if let Some(c) = self.run_dp::<u128>(&plan, &domains, budget)? {
            return Ok(BigUint::from(c));
        }
        Ok(self
            .run_dp::<BigUint>(&plan, &domains, budget)?
            .expect("big integers do not overflow"))
    }

    /// Elimination order chosen greedily to keep the live frontier small.
    fn plan(&self) -> Plan {
        let n = self.len();
        let mut open_cells: Vec<usize> = self.constraints.iter().map(|c| c.cells.len()).collect();
        let mut assigned = vec![false; n];
        let mut live: Vec<usize> = Vec::new();
        let mut steps = Vec::with_capacity(n);
        // A cell stays live while one of its constraints has unassigned cells.
        let pending = |cell: usize, open: &[usize], extra: Option<usize>| -> bool {
            self.by_cell[cell].iter().any(|&ci| {
                let dec = extra.is_some_and(|c| self.constraints[ci].cells.contains(&c));
                open[ci] - usize::from(dec) > 0
            })
        };
        for _ in 0..n {
            let mut best: Option<(usize, usize)> = None;
            for c in (0..n).filter(|&c| !assigned[c]) {
                let mut size = live.len() + 1;
                for &d in live.iter().chain(std::iter::once(&c)) {
                    if !pending(d, &open_cells, Some(c)) {
                        size -= 1;
                    }
                }
                if best.is_none_or(|(b, _)| size < b) {
                    best = Some((size, c));
                }
            }
            let c = best.expect("unassigned cell").1;
            assigned[c] = true;
            let completed: Vec<usize> = self.by_cell[c]
                .iter()
                .copied()
                .filter(|&ci| {
                    open_cells[ci] -= 1;
                    open_cells[ci] == 0
                })
                .collect();
            let mut full = live.clone();
            full.push(c);
            let slot = |cell: usize| full.iter().position(|&x| x == cell).expect("live cell");
            let checks: Vec<(Vec<usize>, usize)> = completed
                .iter()
                .map(|&ci| {
                    (
                        self.constraints[ci]
                            .cells
                            .iter()
                            .map(|&x| slot(x))
                            .collect(),
                        ci,
                    )
                })
                .collect();
            let keep: Vec<usize> = (0..full.len())
                .filter(|&i| pending(full[i], &open_cells, None))
                .collect();
            live = keep.iter().map(|&i| full[i]).collect();
            steps.push(Step {
                cell: c,
                checks,
                keep,
            });
        }
        Plan { steps }
    }

    fn run_dp<T>(&self, plan: &Plan, domains: &[SymbolSet], budget: &Budget) -> Result<Option<T>>
    where
        T: Clone + Zero + One + CheckedAdd + Send + Sync,
    {
        let meter = budget.meter("window counting");
        let mut states: HashMap<Vec<Symbol>, T> = HashMap::new();
        states.insert(Vec::new(), T::one());
        for step in &plan.steps {
            if states.len() > budget.states.max(1) * 64 {
                return Err(crate::Error::limit(format!(
                    "window counting: {} frontier states exceed the state budget",
                    states.len()
                )));
            }
            let syms: Vec<Symbol> = domains[step.cell].iter().collect();
            meter.tick((states.len() * syms.len().max(1)) as u64)?;
            let expand =
                |(key, count): (&Vec<Symbol>, &T), acc: &mut HashMap<Vec<Symbol>, T>| -> bool {
                    let mut full = key.clone();
                    full.push(0);
                    let last = full.len() - 1;
                    for &s in &syms {
                        full[last] = s;
                        let bad = step.checks.iter().any(|(slots, ci)| {
                            let c = &self.constraints[*ci];
                            slots
                                .iter()
                                .zip(&c.sets)
                                .all(|(&k, set)| set.contains(full[k]))
                        });
                        if bad {
                            continue;
                        }
                        let next: Vec<Symbol> = step.keep.iter().map(|&k| full[k]).collect();
                        let entry = acc.entry(next).or_insert_with(T::zero);
                        match entry.checked_add(count) {
                            Some(v) => *entry = v,
                            None => return false,
                        }
                    }
                    true
                };
            let next = if states.len() < 2048 {
                let mut acc = HashMap::new();
                for kv in states.iter() {
                    if !expand(kv, &mut acc) {
                        return Ok(None);
                    }
                }
                Some(acc)
            } else {
                let entries: Vec<(&Vec<Symbol>, &T)> = states.iter().collect();
                entries
                    .par_chunks(1024)
                    .map(|chunk| {
                        let mut acc = HashMap::new();
                        for &kv in chunk {
                            if !expand(kv, &mut acc) {
                                return None;
                            }
                        }
                        Some(acc)
                    })
                    .reduce(
                        || Some(HashMap::new()),
                        |a, b| {
                            let (mut a, b) = (a?, b?);
                            for (k, v) in b {
                                let e = a.entry(k).or_insert_with(T::zero);
                                *e = e.checked_add(&v)?;
                            }
                            Some(a)
                        },
                    )
            };
            match next {
                Some(s) => states = s,
                None => return Ok(None),
            }
        }
        let mut total = T::zero();
        for v in states.values() {
            match total.checked_add(v) {
                Some(t) => total = t,
                None => return Ok(None),
            }
        }
        Ok(Some(total))
    }

    /// Whether the given cell values extend to an admissible coloring of the
    /// whole window.
    pub fn extendable(&self, fixed: &[(usize, Symbol)], meter: &Meter) -> Result<bool> {
        Ok(self.solve(fixed, None, meter)?.is_some())
    }

    /// Uniformly shuffled search for one admissible coloring extending `fixed`.
    pub fn sample(
        &self,
        fixed: &[(usize, Symbol)],
        rng: &mut dyn RngCore,
        budget: &Budget,
    ) -> Result<Option<Vec<Symbol>>> {
        let meter = budget.meter("pattern sampling");
        self.solve(fixed, Some(rng), &meter)
    }

    /// Depth-first search with smallest-domain-first cell choice and forward
    /// checking.
    pub(crate) fn solve(
        &self,
        fixed: &[(usize, Symbol)],
        mut rng: Option<&mut dyn RngCore>,
        meter: &Meter,
    ) -> Result<Option<Vec<Symbol>>> {
        if self.doomed {
            return Ok(None);
        }
        let n = self.len();
        let mut csp = Csp {
            w: self,
            domains: vec![SymbolSet::full(self.alphabet_len()); n],
            values: vec![None; n],
            trail: Vec::new(),
        };
        for &(c, s) in fixed {
            if !csp.domains[c].contains(s) {
                return Ok(None);
            }
            csp.domains[c] = SymbolSet::singleton(self.alphabet_len(), s);
            csp.values[c] = Some(s);
        }
        for ci in 0..self.constraints.len() {
            if !csp.propagate(ci) {
                return Ok(None);
            }
        }
        if csp.search(&mut rng, meter)? {
            Ok(Some(
                csp.values
                    .into_iter()
                    .map(|v| v.expect("assigned"))
                    .collect(),
            ))
        } else {
            Ok(None)
        }
    }
}

struct Step {
    cell: usize,
    /// Constraints completed at this step, as slots into the extended state.
    checks: Vec<(Vec<usize>, usize)>,
    /// Slots of the extended state that remain live.
    keep: Vec<usize>,
}

struct Plan {
    steps: Vec<Step>,
}

struct Csp<'a, 's> {
    w: &'a Window<'s>,
    domains: Vec<SymbolSet>,
    values: Vec<Option<Symbol>>,
    trail: Vec<(usize, SymbolSet)>,
}

impl Csp<'_, '_> {
    /// Applies constraint `ci` to the current partial assignment; false on
    /// a violation or a wiped-out domain.
    fn propagate(&mut self, ci: usize) -> bool {
        let c = &self.w.constraints[ci];
        let mut open = None;
        for (k, &cell) in c.cells.iter().enumerate() {
            match self.values[cell] {
                Some(v) if !c.sets[k].contains(v) => return true,
                Some(_) => {}
                None if open.is_some() => return true,
                None => open = Some(k),
            }
        }
        let Some(k) = open else { return false };
        let cell = c.cells[k];
        if self.domains[cell].intersect(&c.sets[k]).is_empty() {
            return true;
        }
        let reduced = self.domains[cell].minus(&c.sets[k]);
        let old = std::mem::replace(&mut self.domains[cell], reduced);
        self.trail.push((cell, old));
        !self.domains[cell].is_empty()
    }

    fn search(&mut self, rng: &mut Option<&mut dyn RngCore>, meter: &Meter) -> Result<bool> {
        let Some(cell) = (0..self.values.len())
            .filter(|&c| self.values[c].is_none())
            .min_by_key(|&c| self.domains[c].len())
        else {
            return Ok(true);
        };
        let mut options: Vec<Symbol> = self.domains[cell].iter().collect();
        if let Some(r) = rng.as_deref_mut() {
            options.shuffle(r);
        }
        for s in options {
            meter.tick(1)?;
            let mark = self.trail.len();
            self.values[cell] = Some(s);
            let mut ok = true;
            for i in 0..self.w.by_cell[cell].len() {
                let ci = self.w.by_cell[cell][i];
                if !self.propagate(ci) {
                    ok = false;
                    break;
                }
            }
            if ok && self.search(rng, meter)? {
                return Ok(true);
            }
            self.values[cell] = None;
            while self.trail.len() > mark {
                let (c, d) = self.trail.pop().expect("trail entry");
                self.domains[c] = d;
            }
        }
        Ok(false)
    }
}
