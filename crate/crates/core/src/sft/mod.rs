//! Subshifts of finite type and their constructors.
//!
//! Forbidden patterns carry one [`SymbolSet`] per cell: the rule forbids every
//! pattern on its support whose value at each cell lies in that cell's set.
//! A rule with singleton sets is an ordinary forbidden pattern; sets let
//! constructions such as lifts to product alphabets stay compact.

mod extension;
mod snake;
mod tiling;
mod window;

pub use extension::{free_extension, higher_power_shift, HigherPowerShift};
pub use snake::{snake_direction, snake_shift, snake_shift_without_cycles, SNAKE_DIRECTIONS};
pub use tiling::{tiling_sft, TileSet, TileSetDoc, EMPTY_TILE};
pub use window::Window;

use std::sync::Arc;

use num_bigint::BigUint;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::pattern::{Alphabet, Pattern, Support};
use crate::symbols::{Symbol, SymbolSet};

/// Forbidden pattern with a set of symbols per cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ForbiddenPattern {
    support: Support,
    sets: Vec<SymbolSet>,
}

impl ForbiddenPattern {
    /// Cells may repeat; repeated cells intersect their sets. Returns `None`
    /// when some set is empty, since such a rule forbids nothing.
    pub fn new(cells: Vec<(Element, SymbolSet)>) -> Option<Self> {
        let mut cells = cells;
        cells.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Element, SymbolSet)> = Vec::with_capacity(cells.len());
        for (e, s) in cells {
            match merged.last_mut() {
                Some((last, set)) if *last == e => *set = set.intersect(&s),
                _ => merged.push((e, s)),
            }
        }
        if merged.iter().any(|(_, s)| s.is_empty()) {
            return None;
        }
        let (cells, sets) = merged.into_iter().unzip();
        Some(ForbiddenPattern {
            support: Support::new(cells),
            sets,
        })
    }

    pub fn from_pattern(p: &Pattern, alphabet_len: usize) -> Self {
        ForbiddenPattern {
            support: p.support().clone(),
            sets: p
                .values()
                .iter()
                .map(|&s| SymbolSet::singleton(alphabet_len, s))
                .collect(),
        }
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn sets(&self) -> &[SymbolSet] {
        &self.sets
    }

    /// Number of ordinary patterns this rule stands for.
    pub fn expanded_len(&self) -> BigUint {
        self.sets.iter().map(|s| BigUint::from(s.len())).product()
    }

    pub fn matches(&self, p: &Pattern) -> bool {
        p.support() == &self.support
            && p.values()
                .iter()
                .zip(&self.sets)
                .all(|(&v, s)| s.contains(v))
    }

    /// Canonical translate: among the translates that move some cell to the
    /// identity, the least one. The identity is then the shortlex-least cell.
    fn normalized(self, g: &Group) -> Result<Self> {
        let mut best: Option<ForbiddenPattern> = None;
        for c in self.support.cells() {
            let shift = g.invert(c)?;
            let cells = self
                .support
                .cells()
                .iter()
                .map(|f| g.multiply(f, &shift))
                .collect::<Result<Vec<_>>>()?;
            let cand =
                ForbiddenPattern::new(cells.into_iter().zip(self.sets.iter().cloned()).collect())
                    .expect("sets unchanged");
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        Ok(best.unwrap_or(self))
    }

    /// Same rule with each set mapped through `f`.
    pub(crate) fn map_sets(&self, f: impl Fn(&SymbolSet) -> SymbolSet) -> Self {
        ForbiddenPattern {
            support: self.support.clone(),
            sets: self.sets.iter().map(f).collect(),
        }
    }
}

/// A subshift of finite type: group, alphabet and forbidden patterns.
#[derive(Clone, Debug)]
pub struct SftSpec {
    group: Arc<Group>,
    alphabet: Alphabet,
    forbidden: Vec<ForbiddenPattern>,
}

impl SftSpec {
    /// Normalizes every rule so its least cell is the identity, then sorts and
    /// deduplicates.
    pub fn new(
        group: Arc<Group>,
        alphabet: Alphabet,
        forbidden: Vec<ForbiddenPattern>,
    ) -> Result<Self> {
        let k = alphabet.len();
        let mut rules = Vec::with_capacity(forbidden.len());
        for r in forbidden {
            if r.sets
                .iter()
                .any(|s| s.capacity() < k || s.iter().any(|x| x as usize >= k))
            {
                return Err(Error::invalid(
                    "forbidden pattern uses a symbol outside the alphabet",
                ));
            }
            let r = r.map_sets(|s| {
                let mut t = SymbolSet::empty(k);
                for x in s.iter() {
                    t.insert(x);
                }
                t
            });
            rules.push(r.normalized(&group)?);
        }
        rules.sort();
        rules.dedup();
        Ok(SftSpec {
            group,
            alphabet,
            forbidden: rules,
        })
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &[ForbiddenPattern] {
        &self.forbidden
    }

    /// Union of all forbidden supports.
    pub fn forbidden_union(&self) -> Support {
        self.forbidden
            .iter()
            .fold(Support::default(), |acc, r| acc.union(r.support()))
    }

    pub fn window(&self, support: &Support) -> Result<Window<'_>> {
        Window::new(self, support)
    }
}

pub fn full_shift(group: Arc<Group>, alphabet: Alphabet) -> SftSpec {
    SftSpec {
        group,
        alphabet,
        forbidden: Vec::new(),
    }
}

/// No forbidden pattern occurs at a position whose translated support lies
/// inside the support of `q`.
pub fn is_locally_admissible(x: &SftSpec, q: &Pattern) -> Result<bool> {
    Ok(Window::new(x, q.support())?.admits(q.values()))
}

/// All locally admissible patterns on `f`, in lexicographic order.
pub fn locally_admissible(x: &SftSpec, f: &Support, budget: &Budget) -> Result<Vec<Pattern>> {
    Window::new(x, f)?.patterns(budget)
}

pub fn count_locally_admissible(x: &SftSpec, f: &Support, budget: &Budget) -> Result<BigUint> {
    Window::new(x, f)?.count(budget)
}

fn same_group(a: &Group, b: &Group) -> bool {
    std::ptr::eq(a, b) || a.spec() == b.spec()
}

/// Lift of a set over `Σ_x` to the product alphabet `Σ_x × Σ_y` (left factor).
pub(crate) fn lift_left(s: &SymbolSet, left_len: usize, right_len: usize) -> SymbolSet {
    let mut out = SymbolSet::empty(left_len * right_len);
    for a in s.iter() {
        for b in 0..right_len as Symbol {
            out.insert(a * right_len as Symbol + b);
        }
    }
    out
}

/// Lift of a set over `Σ_y` to `Σ_x × Σ_y` (right factor).
pub(crate) fn lift_right(s: &SymbolSet, left_len: usize, right_len: usize) -> SymbolSet {
    let mut out = SymbolSet::empty(left_len * right_len);
    for a in 0..left_len as Symbol {
        for b in s.iter() {
            out.insert(a * right_len as Symbol + b);
        }
    }
    out
}

/// Product SFT on `Σ_x × Σ_y`; symbol `(a, b)` has index `a·|Σ_y| + b`.
pub fn product_sft(x: &SftSpec, y: &SftSpec) -> Result<SftSpec> {
    if !same_group(&x.group, &y.group) {
        return Err(Error::invalid("product of shifts over different groups"));
    }
    let (kx, ky) = (x.alphabet.len(), y.alphabet.len());
    let mut rules: Vec<ForbiddenPattern> = x
        .forbidden
        .iter()
        .map(|r| r.map_sets(|s| lift_left(s, kx, ky)))
        .collect();
    rules.extend(
        y.forbidden
            .iter()
            .map(|r| r.map_sets(|s| lift_right(s, kx, ky))),
    );
    SftSpec::new(x.group.clone(), x.alphabet.product(&y.alphabet), rules)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use proptest::prelude::*;

    pub(crate) fn golden_mean(g: Arc<Group>) -> SftSpec {
        let a = g.canonicalize(&[0]).unwrap();
        let p = Pattern::new(vec![Element::identity(), a], vec![1, 1]).unwrap();
        SftSpec::new(
            g,
            Alphabet::numbered(2),
            vec![ForbiddenPattern::from_pattern(&p, 2)],
        )
        .unwrap()
    }

    pub(crate) fn hard_square() -> SftSpec {
        let g = Arc::new(Group::new(GroupSpec::z2()).unwrap());
        let rules = ["a", "b"]
            .iter()
            .map(|w| {
                let p = Pattern::new(
                    vec![Element::identity(), g.canonicalize_str(w).unwrap()],
                    vec![1, 1],
                )
                .unwrap();
                ForbiddenPattern::from_pattern(&p, 2)
            })
            .collect();
        SftSpec::new(g, Alphabet::numbered(2), rules).unwrap()
    }

    fn z() -> Arc<Group> {
        Arc::new(Group::new(GroupSpec::z()).unwrap())
    }

    fn interval(g: &Group, n: i64) -> Support {
        Support::new((0..n).map(|i| g.from_coordinates(&[i]).unwrap()).collect())
    }

    pub(crate) fn rect(g: &Group, w: i64, h: i64) -> Support {
        Support::new(
            (0..w)
                .flat_map(|x| (0..h).map(move |y| (x, y)))
                .map(|(x, y)| g.from_coordinates(&[x, y]).unwrap())
                .collect(),
        )
    }

    /// Every coloring of the support, tested by the definition directly.
    fn brute_admissible(x: &SftSpec, f: &Support) -> Vec<Vec<Symbol>> {
        let k = x.alphabet().len() as u64;
        let n = f.len() as u32;
        let g = x.group();
        let mut out = Vec::new();
        for code in 0..k.pow(n) {
            let mut c = code;
            let mut v = vec![0; n as usize];
            for i in (0..n as usize).rev() {
                v[i] = (c % k) as Symbol;
                c /= k;
            }
            let q = Pattern::on(f.clone(), v.clone());
            let mut ok = true;
            for rule in x.forbidden() {
                for t in f.cells() {
                    let shifted = rule.support().shift(g, t).unwrap();
                    if !shifted.is_subset(f) {
                        continue;
                    }
                    let hit = rule
                        .support()
                        .cells()
                        .iter()
                        .zip(rule.sets())
                        .all(|(c, s)| s.contains(q.get(&g.multiply(c, t).unwrap()).unwrap()));
                    if hit {
                        ok = false;
                    }
                }
            }
            if ok {
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn local_admissibility_examples() {
        let g = z();
        let x = golden_mean(g.clone());
        let f = interval(&g, 3);
        assert!(is_locally_admissible(&x, &Pattern::on(f.clone(), vec![1, 0, 1])).unwrap());
        assert!(!is_locally_admissible(&x, &Pattern::on(f.clone(), vec![0, 1, 1])).unwrap());
        let hs = hard_square();
        let sq = rect(hs.group(), 2, 2);
        assert!(!is_locally_admissible(&hs, &Pattern::on(sq.clone(), vec![1; 4])).unwrap());
        let w = Window::new(&hs, &sq).unwrap();
        assert_eq!(w.constraint_count(), 4);
    }

    #[test]
    fn counts_match_brute_force() {
        let g = z();
        let b = Budget::default();
        let x = golden_mean(g.clone());
        let f = interval(&g, 3);
        assert_eq!(brute_admissible(&x, &f).len(), 5);
        assert_eq!(locally_admissible(&x, &f, &b).unwrap().len(), 5);
        assert_eq!(
            count_locally_admissible(&x, &f, &b).unwrap(),
            BigUint::from(5u32)
        );
        let hs = hard_square();
        let sq = rect(hs.group(), 2, 2);
        assert_eq!(brute_admissible(&hs, &sq).len(), 7);
        assert_eq!(
            count_locally_admissible(&hs, &sq, &b).unwrap(),
            BigUint::from(7u32)
        );
        let full = full_shift(g.clone(), Alphabet::numbered(2));
        for k in 0..6 {
            assert_eq!(
                count_locally_admissible(&full, &interval(&g, k), &b).unwrap(),
                BigUint::from(1u64 << k)
            );
        }
    }

    #[test]
    fn enumeration_is_lexicographic_and_matches_brute_force() {
        let b = Budget::default();
        let hs = hard_square();
        for (w, h) in [(1, 1), (2, 3), (3, 3), (4, 2)] {
            let f = rect(hs.group(), w, h);
            let fast = Window::new(&hs, &f).unwrap().enumerate(&b).unwrap();
            assert_eq!(fast, brute_admissible(&hs, &f));
            assert_eq!(
                BigUint::from(fast.len()),
                count_locally_admissible(&hs, &f, &b).unwrap()
            );
        }
    }

    #[test]
    fn product_examples() {
        let g = z();
        let b = Budget::default();
        let x = golden_mean(g.clone());
        let p = product_sft(&x, &x).unwrap();
        assert_eq!(p.alphabet().len(), 4);
        assert_eq!(
            count_locally_admissible(&p, &interval(&g, 3), &b).unwrap(),
            BigUint::from(25u32)
        );
        let full = full_shift(g.clone(), Alphabet::numbered(2));
        let ff = product_sft(&full, &full).unwrap();
        assert!(ff.forbidden().is_empty());
        assert_eq!(
            count_locally_admissible(&ff, &interval(&g, 3), &b).unwrap(),
            BigUint::from(64u32)
        );
    }

    #[test]
    fn empty_support_rule_forbids_everything() {
        let g = z();
        let x = SftSpec::new(
            g.clone(),
            Alphabet::numbered(2),
            vec![ForbiddenPattern::new(vec![]).unwrap()],
        )
        .unwrap();
        let b = Budget::default();
        assert_eq!(
            count_locally_admissible(&x, &interval(&g, 2), &b).unwrap(),
            BigUint::from(0u32)
        );
        assert!(locally_admissible(&x, &Support::default(), &b)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn rules_are_normalized_and_deduplicated() {
        let g = z();
        let a = |i| g.from_coordinates(&[i]).unwrap();
        let p1 = Pattern::new(vec![a(3), a(4)], vec![1, 1]).unwrap();
        let p2 = Pattern::new(vec![a(-1), a(0)], vec![1, 1]).unwrap();
        let x = SftSpec::new(
            g.clone(),
            Alphabet::numbered(2),
            vec![
                ForbiddenPattern::from_pattern(&p1, 2),
                ForbiddenPattern::from_pattern(&p2, 2),
            ],
        )
        .unwrap();
        assert_eq!(x.forbidden().len(), 1);
        assert!(x.forbidden()[0].support().cells()[0].is_identity());
    }

    #[test]
    fn extension_search_agrees_with_enumeration() {
        let hs = hard_square();
        let b = Budget::default();
        let big = rect(hs.group(), 3, 3);
        let w = Window::new(&hs, &big).unwrap();
        let all = w.enumerate(&b).unwrap();
        let meter = b.meter("test");
        for v0 in 0..2 {
            for v4 in 0..2 {
                let expect = all.iter().any(|v| v[0] == v0 && v[4] == v4);
                assert_eq!(w.extendable(&[(0, v0), (4, v4)], &meter).unwrap(), expect);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn restriction_is_monotone(w in 1i64..4, h in 1i64..3) {
            let hs = hard_square();
            let b = Budget::default();
            let small = rect(hs.group(), w, h);
            let big = rect(hs.group(), w + 1, h + 1);
            let inner = Window::new(&hs, &small).unwrap();
            for p in locally_admissible(&hs, &big, &b).unwrap() {
                let r = crate::pattern::restrict(&p, &small).unwrap();
                prop_assert!(inner.admits(r.values()));
            }
        }

        #[test]
        fn random_rule_counts_match_brute_force(
            rules in proptest::collection::vec(
                (proptest::collection::vec((-1i64..2, 0i64..2), 1..3),
                 proptest::collection::vec(0u32..3, 3)), 0..4),
            w in 1i64..4, h in 1i64..3,
        ) {
            let g = Arc::new(Group::new(GroupSpec::z2()).unwrap());
            let forbidden = rules.iter().filter_map(|(cells, vals)| {
                ForbiddenPattern::new(cells.iter().zip(vals).map(|(&(x, y), &v)| {
                    (g.from_coordinates(&[x, y]).unwrap(), SymbolSet::singleton(3, v))
                }).collect())
            }).collect();
            let x = SftSpec::new(g.clone(), Alphabet::numbered(3), forbidden).unwrap();
            let f = rect(&g, w, h);
            let b = Budget::default();
            let brute = brute_admissible(&x, &f);
            prop_assert_eq!(Window::new(&x, &f).unwrap().enumerate(&b).unwrap(), brute.clone());
            prop_assert_eq!(count_locally_admissible(&x, &f, &b).unwrap(), BigUint::from(brute.len()));
        }
    }
}
