//! Cocycles, charts and the embedding of an `H`-shift along a chart.
//!
//! A cocycle is stored as a finite table: for each letter `s` of `H` and each
//! locally admissible pattern on the window `W`, the element of `G` that `s`
//! moves by. Evaluating a word folds the table from the rightmost letter:
//! `g₀ = base`, `g_{k+1} = table(s, window at g_k)·g_k`, where the window at
//! `g` reads the cells `w·g`.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::group::{inverse_word, Element, Group, GroupSpec, Letter};
use crate::pattern::{Alphabet, Pattern, Support};
use crate::sft::{
    full_shift, lift_left, lift_right, snake_direction, snake_shift, ForbiddenPattern, SftSpec,
    Window, SNAKE_DIRECTIONS,
};
use crate::symbols::{Symbol, SymbolSet};

#[derive(Clone, Debug)]
pub struct Cocycle {
    h_group: Arc<Group>,
    window: Support,
    table: HashMap<(Letter, Vec<Symbol>), Element>,
}

impl Cocycle {
    pub fn new(
        h_group: Arc<Group>,
        window: Support,
        table: HashMap<(Letter, Vec<Symbol>), Element>,
    ) -> Self {
        Cocycle {
            h_group,
            window,
            table,
        }
    }

    pub fn h_group(&self) -> &Arc<Group> {
        &self.h_group
    }

    pub fn window(&self) -> &Support {
        &self.window
    }

    pub fn get(&self, letter: Letter, values: &[Symbol]) -> Option<&Element> {
        self.table.get(&(letter, values.to_vec()))
    }

    /// Entries sorted by letter, then window values.
    pub fn entries(&self) -> Vec<(Letter, &[Symbol], &Element)> {
        let mut v: Vec<_> = self
            .table
            .iter()
            .map(|((l, p), e)| (*l, p.as_slice(), e))
            .collect();
        v.sort();
        v
    }
}

/// A `G`-shift together with an `H`-cocycle on it.
#[derive(Clone, Debug)]
pub struct Chart {
    sft: SftSpec,
    cocycle: Cocycle,
}

impl Chart {
    /// Fails unless the table is defined for every letter of `H` and every
    /// locally admissible pattern on the window.
    pub fn new(sft: SftSpec, cocycle: Cocycle, budget: &Budget) -> Result<Self> {
        let ch = Chart { sft, cocycle };
        if let Some((l, p)) = ch.missing_entries(budget)?.into_iter().next() {
            let names: Vec<&str> = p.iter().map(|&s| ch.sft.alphabet().name(s)).collect();
            return Err(Error::invalid(format!(
                "cocycle table has no entry for `{}` on window pattern [{}]",
                ch.cocycle.h_group.letter_name(l),
                names.join(", ")
            )));
        }
        Ok(ch)
    }

    pub fn sft(&self) -> &SftSpec {
        &self.sft
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn group(&self) -> &Arc<Group> {
        self.sft.group()
    }

    fn missing_entries(&self, budget: &Budget) -> Result<Vec<(Letter, Vec<Symbol>)>> {
        let patterns = Window::new(&self.sft, &self.cocycle.window)?.enumerate(budget)?;
        let mut missing = Vec::new();
        for l in 0..self.cocycle.h_group.letter_count() as Letter {
            for p in &patterns {
                if self.cocycle.get(l, p).is_none() {
                    missing.push((l, p.clone()));
                }
            }
        }
        Ok(missing)
    }

    /// Window values read at `g`, or the first cell missing from `p`.
    fn window_at(
        &self,
        p: &Pattern,
        g: &Element,
    ) -> Result<std::result::Result<Vec<Symbol>, Element>> {
        let grp = self.group();
        let mut vals = Vec::with_capacity(self.cocycle.window.len());
        for w in self.cocycle.window.cells() {
            let cell = grp.multiply(w, g)?;
            match p.get(&cell) {
                Some(s) => vals.push(s),
                None => return Ok(Err(cell)),
            }
        }
        Ok(Ok(vals))
    }

    fn step(&self, letter: Letter, vals: &[Symbol], g: &Element) -> Result<Element> {
        let v = self
            .cocycle
            .get(letter, vals)
            .ok_or_else(|| Error::PatternNotInTable {
                generator: self.cocycle.h_group.letter_name(letter).to_string(),
            })?;
        self.group().multiply(v, g)
    }

    /// Position reached from `base` by the `H`-word `w` under the pattern `p`.
    pub fn evaluate_word(&self, w: &[Letter], p: &Pattern, base: &Element) -> Result<Element> {
        let mut g = base.clone();
        for &l in w.iter().rev() {
            let vals = self.window_at(p, &g)?.map_err(|cell| {
                Error::InsufficientData(format!(
                    "cell `{}` is outside the pattern",
                    self.group().format(&cell)
                ))
            })?;
            g = self.step(l, &vals, &g)?;
        }
        Ok(g)
    }

    /// Like [`Chart::evaluate_word`], with `None` when the path leaves `p`.
    pub fn try_evaluate(
        &self,
        w: &[Letter],
        p: &Pattern,
        base: &Element,
    ) -> Result<Option<Element>> {
        match self.evaluate_word(w, p, base) {
            Ok(g) => Ok(Some(g)),
            Err(Error::InsufficientData(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// `ℤ` with the single generator `s`.
fn z_s() -> Result<Arc<Group>> {
    Ok(Arc::new(Group::new(GroupSpec::free_abelian(&["s"]))?))
}

/// Snake chart: `s` moves along the `R` direction of the current tile and
/// `s⁻¹` along its `L` direction.
pub fn snake_chart() -> Result<Chart> {
    let x = snake_shift()?;
    let h = z_s()?;
    let mut table = HashMap::new();
    for sym in 0..x.alphabet().len() as Symbol {
        let (l, r) = snake_direction(sym);
        table.insert(
            (0, vec![sym]),
            x.group().from_coordinates(&SNAKE_DIRECTIONS[r].1)?,
        );
        table.insert(
            (1, vec![sym]),
            x.group().from_coordinates(&SNAKE_DIRECTIONS[l].1)?,
        );
    }
    let window = Support::new(vec![Element::identity()]);
    Ok(Chart {
        sft: x,
        cocycle: Cocycle::new(h, window, table),
    })
}

/// Chart of a subgroup acting by left multiplication: one-point shift, empty
/// window, `γ(s) = image of s`.
pub fn subgroup_chart(h_spec: GroupSpec, images: &[String], g: Arc<Group>) -> Result<Chart> {
    let h = Arc::new(Group::new(h_spec)?);
    if images.len() != h.generator_names().len() {
        return Err(Error::invalid("one image word per generator is required"));
    }
    let mut table = HashMap::new();
    for (i, w) in images.iter().enumerate() {
        let img = g.parse_word(w)?;
        table.insert(((2 * i) as Letter, Vec::new()), g.canonicalize(&img)?);
        table.insert(
            ((2 * i + 1) as Letter, Vec::new()),
            g.canonicalize(&inverse_word(&img))?,
        );
    }
    Ok(Chart {
        sft: full_shift(g, Alphabet::new(["*"])?),
        cocycle: Cocycle::new(h, Support::default(), table),
    })
}

/// Result of [`embed`].
#[derive(Clone, Debug)]
pub struct EmbeddedShift {
    pub sft: SftSpec,
    /// Union of all cells read or constrained by the transported rules.
    pub visited: Support,
    /// Number of rules coming from forbidden patterns of the embedded shift.
    pub transported_rules: usize,
}

/// `Y_γ[X]`: symbols are pairs `(y, x)` with index `y·|Σ_X| + x`.
///
/// For every forbidden pattern `q` of `Y`, the shortlex representative of each
/// cell of `q` is evaluated from the identity, branching over the `X`-values
/// of every window cell the evaluation reads. Each branch yields one rule: the
/// branch's `X`-values on the cells read, and `q`'s symbols on the `Y`-layer
/// at the end points.
pub fn embed(y: &SftSpec, ch: &Chart, budget: &Budget) -> Result<EmbeddedShift> {
    if !y.group().spec().same_group(ch.cocycle.h_group.spec()) {
        return Err(Error::invalid(
            "the embedded shift is not over the chart's acting group",
        ));
    }
    let x = &ch.sft;
    let (ky, kx) = (y.alphabet().len(), x.alphabet().len());
    let mut rules: Vec<ForbiddenPattern> = x
        .forbidden()
        .iter()
        .map(|r| r.map_sets(|s| lift_right(s, ky, kx)))
        .collect();
    let meter = budget.meter("embedding");
    let mut visited: Vec<Element> = Vec::new();
    let mut transported = Vec::new();
    for q in y.forbidden() {
        let words: Vec<&[Letter]> = q.support().cells().iter().map(|c| c.letters()).collect();
        let mut search = EmbedSearch {
            ch,
            words: &words,
            q,
            assigned: HashMap::new(),
            order: Vec::new(),
            ends: Vec::new(),
            out: &mut transported,
            meter: &meter,
            visited: &mut visited,
            budget,
        };
        search.run(0, 0, Element::identity())?;
    }
    let count = transported.len();
    for (cells, ends) in transported {
        let mut pairs = Vec::new();
        for (c, xs) in cells {
            pairs.push((c, lift_right(&SymbolSet::singleton(kx, xs), ky, kx)));
        }
        for (c, ys) in ends {
            pairs.push((c, lift_left(&ys, ky, kx)));
        }
        rules.extend(ForbiddenPattern::new(pairs));
    }
    Ok(EmbeddedShift {
        sft: SftSpec::new(x.group().clone(), y.alphabet().product(x.alphabet()), rules)?,
        visited: Support::new(visited),
        transported_rules: count,
    })
}

type Branch = (Vec<(Element, Symbol)>, Vec<(Element, SymbolSet)>);

struct EmbedSearch<'a> {
    ch: &'a Chart,
    words: &'a [&'a [Letter]],
    q: &'a ForbiddenPattern,
    assigned: HashMap<Element, Symbol>,
    order: Vec<Element>,
    ends: Vec<Element>,
    out: &'a mut Vec<Branch>,
    meter: &'a Meter,
    visited: &'a mut Vec<Element>,
    budget: &'a Budget,
}

impl EmbedSearch<'_> {
    fn run(&mut self, i: usize, k: usize, g: Element) -> Result<()> {
        self.meter.tick(1)?;
        if i == self.words.len() {
            let cells = self
                .order
                .iter()
                .map(|c| (c.clone(), self.assigned[c]))
                .collect();
            let ends = self
                .ends
                .iter()
                .cloned()
                .zip(self.q.sets().iter().cloned())
                .collect();
            self.out.push((cells, ends));
            self.visited.extend(self.order.iter().cloned());
            self.visited.extend(self.ends.iter().cloned());
            self.visited.sort();
            self.visited.dedup();
            return self.budget.check_patterns(self.out.len(), "embedding");
        }
        let w = self.words[i];
        if k == w.len() {
            self.ends.push(g);
            self.run(i + 1, 0, Element::identity())?;
            self.ends.pop();
            return Ok(());
        }
        let grp = self.ch.group();
        let mut vals = Vec::with_capacity(self.ch.cocycle.window.len());
        for c in self.ch.cocycle.window.cells() {
            let cell = grp.multiply(c, &g)?;
            match self.assigned.get(&cell) {
                Some(&s) => vals.push(s),
                None => {
                    for s in 0..self.ch.sft.alphabet().len() as Symbol {
                        self.assigned.insert(cell.clone(), s);
                        self.order.push(cell.clone());
                        if !self.violates_at(&cell)? {
                            self.run(i, k, g.clone())?;
                        }
                        self.order.pop();
                        self.assigned.remove(&cell);
                    }
                    return Ok(());
                }
            }
        }
        let letter = w[w.len() - 1 - k];
        let next = self.ch.step(letter, &vals, &g)?;
        self.run(i, k + 1, next)
    }

    /// Whether some forbidden placement of `X` through `cell` lies entirely in
    /// the assigned cells and matches.
    fn violates_at(&self, cell: &Element) -> Result<bool> {
        let g = self.ch.group();
        for r in self.ch.sft.forbidden() {
            for f in r.support().cells() {
                let t = g.multiply(&g.invert(f)?, cell)?;
                let mut hit = true;
                for (f2, set) in r.support().cells().iter().zip(r.sets()) {
                    match self.assigned.get(&g.multiply(f2, &t)?) {
                        Some(&s) if set.contains(s) => {}
                        _ => {
                            hit = false;
                            break;
                        }
                    }
                }
                if hit {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// Chart built from a presentation `⟨S | R⟩` of `H` and a finite set `F` of
/// steps in `G`. Symbols are maps `S → F` (written `[f₁,…,f_k]` in letter
/// order); the rules make `s⁻¹` undo `s` and make each relator close up.
pub fn chart_from_presentation(
    h_spec: GroupSpec,
    steps: &[Element],
    g: Arc<Group>,
    budget: &Budget,
) -> Result<Chart> {
    let h = Arc::new(Group::new(h_spec)?);
    let mut f: Vec<Element> = steps.to_vec();
    f.sort();
    f.dedup();
    if f.is_empty() {
        return Err(Error::invalid("the step set is empty"));
    }
    let letters = h.letter_count();
    let nf = f.len();
    let size = nf
        .checked_pow(letters as u32)
        .filter(|&s| s <= budget.patterns && s <= u32::MAX as usize)
        .ok_or_else(|| Error::limit(format!("{nf}^{letters} symbols exceed the pattern budget")))?;
    let comp =
        |sym: Symbol, s: usize| -> usize { (sym as usize / nf.pow((letters - 1 - s) as u32)) % nf };
    let names: Vec<String> = (0..size as Symbol)
        .map(|sym| {
            let parts: Vec<String> = (0..letters)
                .map(|s| {
                    let e = &f[comp(sym, s)];
                    if e.is_identity() {
                        "1".to_string()
                    } else {
                        g.format(e)
                    }
                })
                .collect();
            format!("[{}]", parts.join(","))
        })
        .collect();
    let where_step = |s: usize, j: usize| {
        SymbolSet::from_iter(size, (0..size as Symbol).filter(|&x| comp(x, s) == j))
    };
    let mut rules = Vec::new();
    for s in 0..letters {
        let back = s ^ 1;
        for (j, fj) in f.iter().enumerate() {
            let inv = g.invert(fj)?;
            let undo = SymbolSet::from_iter(
                size,
                (0..size as Symbol).filter(|&x| f[comp(x, back)] != inv),
            );
            rules.extend(ForbiddenPattern::new(vec![
                (Element::identity(), where_step(s, j)),
                (fj.clone(), undo),
            ]));
        }
    }
    for rel in h.relators()? {
        let n = rel.len();
        let total = nf
            .checked_pow(n as u32)
            .filter(|&t| t <= budget.patterns)
            .ok_or_else(|| {
                Error::limit(format!(
                    "relator of length {n} needs {nf}^{n} step sequences"
                ))
            })?;
        for code in 0..total {
            let mut c = code;
            let mut pos = Element::identity();
            let mut cells = Vec::with_capacity(n);
            for &letter in rel.iter().rev() {
                let j = c % nf;
                c /= nf;
                cells.push((pos.clone(), where_step(letter as usize, j)));
                pos = g.multiply(&f[j], &pos)?;
            }
            if !pos.is_identity() {
                rules.extend(ForbiddenPattern::new(cells));
            }
        }
    }
    let x = SftSpec::new(g.clone(), Alphabet::new(names)?, rules)?;
    let singles = Window::new(&x, &Support::new(vec![Element::identity()]))?.enumerate(budget)?;
    let mut table = HashMap::new();
    for s in 0..letters {
        for v in &singles {
            table.insert((s as Letter, v.clone()), f[comp(v[0], s)].clone());
        }
    }
    Ok(Chart {
        sft: x,
        cocycle: Cocycle::new(h, Support::new(vec![Element::identity()]), table),
    })
}

/// Which `X`-patterns a freeness check runs over.
#[derive(Clone, Debug)]
pub enum FreenessScope {
    /// All locally admissible patterns on the ball of this radius.
    Ball(usize),
    /// All locally admissible patterns on this window.
    Window(Support),
    /// Exactly these patterns.
    Patterns(Vec<Pattern>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreenessViolation {
    pub pattern: Pattern,
    pub word: Vec<Letter>,
    pub base: Element,
}

#[derive(Clone, Debug)]
pub struct FreenessReport {
    pub patterns: usize,
    pub words: usize,
    pub max_word_length: usize,
    pub violations: Vec<FreenessViolation>,
}

impl FreenessReport {
    pub fn summary(&self, scope: &str) -> String {
        if self.violations.is_empty() {
            format!("no violation up to ({scope}, L = {})", self.max_word_length)
        } else {
            format!("{} violation(s) found", self.violations.len())
        }
    }
}

/// Freely reduced words of length `1..=max_len`, in shortlex order.
pub fn reduced_words(letters: usize, max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            for l in 0..letters as Letter {
                if w.last() == Some(&(l ^ 1)) {
                    continue;
                }
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// Looks for a nontrivial `H`-word of length at most `max_len` that returns
/// some base cell to itself. Finding none proves nothing beyond this scale.
pub fn freeness_check(
    ch: &Chart,
    scope: &FreenessScope,
    max_len: usize,
    budget: &Budget,
) -> Result<FreenessReport> {
    const MAX_REPORTED: usize = 100;
    let patterns = match scope {
        FreenessScope::Ball(r) => {
            let support = Support::new(ch.group().ball(*r)?.elements);
            Window::new(&ch.sft, &support)?.patterns(budget)?
        }
        FreenessScope::Window(w) => Window::new(&ch.sft, w)?.patterns(budget)?,
        FreenessScope::Patterns(ps) => ps.clone(),
    };
    let h = &ch.cocycle.h_group;
    let mut words = Vec::new();
    for w in reduced_words(h.letter_count(), max_len) {
        if !h.wp_decide(&w)? {
            words.push(w);
        }
    }
    let meter = budget.meter("freeness check");
    let mut violations = Vec::new();
    'outer: for p in &patterns {
        for base in p.support().cells() {
            for w in &words {
                meter.tick(1)?;
                if ch.try_evaluate(w, p, base)?.as_ref() == Some(base) {
                    violations.push(FreenessViolation {
                        pattern: p.clone(),
                        word: w.clone(),
                        base: base.clone(),
                    });
                    if violations.len() >= MAX_REPORTED {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(FreenessReport {
        patterns: patterns.len(),
        words: words.len(),
        max_word_length: max_len,
        violations,
    })
}

#[derive(Clone, Debug, Default)]
pub struct CocycleReport {
    pub table_entries: usize,
    pub samples: usize,
    pub missing_entries: usize,
    pub inverse_checks: usize,
    pub inverse_failures: usize,
    pub equation_checks: usize,
    pub equation_failures: usize,
}

impl CocycleReport {
    pub fn ok(&self) -> bool {
        self.missing_entries == 0 && self.inverse_failures == 0 && self.equation_failures == 0
    }
}

/// Checks table totality, `s⁻¹ s = 1` on sampled patterns over the ball of
/// radius `radius`, and the cocycle equation on random word pairs.
pub fn check_cocycle(
    ch: &Chart,
    radius: usize,
    samples: usize,
    rng: &mut dyn RngCore,
    budget: &Budget,
) -> Result<CocycleReport> {
    let mut rep = CocycleReport {
        table_entries: ch.cocycle.table.len(),
        missing_entries: ch.missing_entries(budget)?.len(),
        ..CocycleReport::default()
    };
    let support = Support::new(ch.group().ball(radius)?.elements);
    let window = Window::new(&ch.sft, &support)?;
    let h = &ch.cocycle.h_group;
    let letters = h.letter_count() as Letter;
    for _ in 0..samples {
        let Some(v) = window.sample(&[], rng, budget)? else {
            break;
        };
        rep.samples += 1;
        let p = Pattern::on(support.clone(), v);
        let base = support.cells()[rng.gen_range(0..support.len())].clone();
        for s in 0..letters {
            if let Some(end) = ch.try_evaluate(&[s ^ 1, s], &p, &base)? {
                rep.inverse_checks += 1;
                if end != base {
                    rep.inverse_failures += 1;
                }
            }
        }
        let mut word =
            |len: usize| -> Vec<Letter> { (0..len).map(|_| rng.gen_range(0..letters)).collect() };
        let (u, v) = (word(3), word(3));
        let mut uv = u.clone();
        uv.extend_from_slice(&v);
        if let (Some(mid), Some(whole)) = (
            ch.try_evaluate(&v, &p, &base)?,
            ch.try_evaluate(&uv, &p, &base)?,
        ) {
            if let Some(end) = ch.try_evaluate(&u, &p, &mid)? {
                rep.equation_checks += 1;
                if end != whole {
                    rep.equation_failures += 1;
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sft::tests::golden_mean;
    use crate::sft::{count_locally_admissible, free_extension, is_locally_admissible};
    use num_bigint::BigUint;
    use rand::SeedableRng;

    fn line(ch: &Chart, sym: &str, n: i64) -> Pattern {
        let g = ch.group();
        let s = ch.sft.alphabet().symbol(sym).unwrap();
        let cells = (-n..=n)
            .map(|i| g.from_coordinates(&[i, 0]).unwrap())
            .collect();
        Pattern::new(cells, vec![s; (2 * n + 1) as usize]).unwrap()
    }

    #[test]
    fn snake_table_and_evaluation() {
        let ch = snake_chart().unwrap();
        let g = ch.group();
        let we = ch.sft.alphabet().symbol("WE").unwrap();
        assert_eq!(g.format(ch.cocycle.get(0, &[we]).unwrap()), "a");
        assert_eq!(g.format(ch.cocycle.get(1, &[we]).unwrap()), "a^-1");
        let p = line(&ch, "WE", 3);
        let o = Element::identity();
        assert_eq!(ch.evaluate_word(&[], &p, &o).unwrap(), o);
        assert_eq!(g.format(&ch.evaluate_word(&[0], &p, &o).unwrap()), "a");
        assert_eq!(g.format(&ch.evaluate_word(&[0, 0], &p, &o).unwrap()), "a a");
        assert!(matches!(
            ch.evaluate_word(&[0; 5], &p, &o),
            Err(Error::InsufficientData(_))
        ));
        assert_eq!(ch.evaluate_word(&[1, 0], &p, &o).unwrap(), o);
    }

    #[test]
    fn snake_inverse_consistency_on_all_tiles() {
        let ch = snake_chart().unwrap();
        let g = ch.group();
        let b = Budget::default();
        let ball = Support::new(g.ball(1).unwrap().elements);
        for p in Window::new(&ch.sft, &ball).unwrap().patterns(&b).unwrap() {
            for s in 0..2 {
                if let Some(end) = ch
                    .try_evaluate(&[s ^ 1, s], &p, &Element::identity())
                    .unwrap()
                {
                    assert!(end.is_identity());
                }
            }
        }
    }

    #[test]
    fn embedding_golden_mean_along_snake() {
        let ch = snake_chart().unwrap();
        let y = golden_mean(ch.cocycle.h_group.clone());
        let e = embed(&y, &ch, &Budget::default()).unwrap();
        assert_eq!(e.transported_rules, 12);
        assert_eq!(e.sft.forbidden().len(), ch.sft.forbidden().len() + 12);
        assert_eq!(e.sft.alphabet().len(), 24);
    }

    #[test]
    fn embedding_full_shift_multiplies_counts() {
        let ch = snake_chart().unwrap();
        let y = full_shift(ch.cocycle.h_group.clone(), Alphabet::numbered(2));
        let e = embed(&y, &ch, &Budget::default()).unwrap();
        let b = Budget::default();
        let f = crate::sft::tests::rect(ch.group(), 2, 2);
        let lhs = count_locally_admissible(&e.sft, &f, &b).unwrap();
        let rhs = count_locally_admissible(&ch.sft, &f, &b).unwrap() * BigUint::from(16u32);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn subgroup_chart_reproduces_free_extension() {
        let g = Arc::new(Group::new(GroupSpec::z2()).unwrap());
        let ch = subgroup_chart(GroupSpec::free_abelian(&["s"]), &["a".into()], g.clone()).unwrap();
        let y = golden_mean(ch.cocycle.h_group.clone());
        let e = embed(&y, &ch, &Budget::default()).unwrap();
        let fe = free_extension(&y, &["a".into()], g.clone(), 3).unwrap();
        assert_eq!(e.sft.forbidden().len(), fe.forbidden().len());
        let b = Budget::default();
        for (w, h) in [(3, 2), (2, 3), (4, 1)] {
            let f = crate::sft::tests::rect(&g, w, h);
            assert_eq!(
                count_locally_admissible(&e.sft, &f, &b).unwrap(),
                count_locally_admissible(&fe, &f, &b).unwrap()
            );
        }
        let report = freeness_check(&ch, &FreenessScope::Ball(1), 4, &b).unwrap();
        assert!(report.violations.is_empty());
    }

    #[test]
    fn presentation_chart_for_z_in_z() {
        let g = Arc::new(Group::new(GroupSpec::z()).unwrap());
        let steps = vec![
            g.canonicalize_str("a").unwrap(),
            g.canonicalize_str("a^-1").unwrap(),
        ];
        let ch = chart_from_presentation(
            GroupSpec::free_abelian(&["s"]),
            &steps,
            g.clone(),
            &Budget::default(),
        )
        .unwrap();
        assert_eq!(ch.sft.alphabet().len(), 4);
        let east = ch.sft.alphabet().symbol("[a,a^-1]").unwrap();
        let cells = (0..6).map(|i| g.from_coordinates(&[i]).unwrap()).collect();
        assert!(
            is_locally_admissible(&ch.sft, &Pattern::new(cells, vec![east; 6]).unwrap()).unwrap()
        );
        let bad = ch.sft.alphabet().symbol("[a,a]").unwrap();
        let cells = (0..2).map(|i| g.from_coordinates(&[i]).unwrap()).collect();
        assert!(
            !is_locally_admissible(&ch.sft, &Pattern::new(cells, vec![bad; 2]).unwrap()).unwrap()
        );
    }

    #[test]
    fn freeness_finds_snake_cycles() {
        let ch = snake_chart().unwrap();
        let b = Budget::default();
        let sq = crate::sft::tests::rect(ch.group(), 2, 2);
        let report = freeness_check(&ch, &FreenessScope::Window(sq), 4, &b).unwrap();
        assert!(!report.violations.is_empty());
        let straight = FreenessScope::Patterns(vec![line(&ch, "WE", 4), line(&ch, "EW", 4)]);
        assert!(freeness_check(&ch, &straight, 4, &b)
            .unwrap()
            .violations
            .is_empty());
    }

    #[test]
    fn cocycle_report_on_snake() {
        let ch = snake_chart().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let rep = check_cocycle(&ch, 2, 50, &mut rng, &Budget::default()).unwrap();
        assert!(rep.ok(), "{rep:?}");
        assert!(rep.inverse_checks > 0 && rep.equation_checks > 0);
        assert_eq!(rep.table_entries, 24);
    }

    #[test]
    fn reduced_word_counts() {
        assert_eq!(reduced_words(2, 3).len(), 6);
        assert_eq!(reduced_words(4, 2).len(), 4 + 12);
    }
}
