//! Alphabets, supports, finite patterns and pattern codings.
//!
//! Shift convention: `(g·x)(h) = x(h·g)`. A pattern `p` *occurs in `x` at `t`*
//! when `x(f·t) = p(f)` for every `f` in its support, i.e. `t·x ∈ [p]`.
//! Hence `x ∈ t·[p]` iff `x(f·t⁻¹) = p(f)`, which says that
//! [`translate`]`(p, t)` occurs in `x` at the identity.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{inverse_word, Element, Group, Letter};
pub use crate::symbols::{Symbol, SymbolSet};

/// Ordered list of distinct symbol names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, Symbol>,
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;

    fn try_from(symbols: Vec<String>) -> Result<Self> {
        Alphabet::new(symbols)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::invalid("alphabet must be nonempty"));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i as Symbol).is_some() {
                return Err(Error::invalid(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// Symbols `0, 1, …, k-1`.
    pub fn numbered(k: usize) -> Self {
        Alphabet::new((0..k).map(|i| i.to_string())).expect("k > 0")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.symbols[s as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn full_set(&self) -> SymbolSet {
        SymbolSet::full(self.len())
    }

    /// Pairs `(a, b)`, with `a` the major index: symbol `a·|other| + b`.
    pub fn product(&self, other: &Alphabet) -> Alphabet {
        let names = self
            .symbols
            .iter()
            .flat_map(|a| other.symbols.iter().map(move |b| format!("({a},{b})")));
        Alphabet::new(names).expect("product of valid alphabets")
    }
}

/// Finite set of group elements, kept in shortlex order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support {
    cells: Vec<Element>,
}

impl Support {
    pub fn new(mut cells: Vec<Element>) -> Self {
        cells.sort();
        cells.dedup();
        Support { cells }
    }

    pub fn from_words(g: &Group, words: &[&str]) -> Result<Self> {
        Ok(Support::new(
            words
                .iter()
                .map(|w| g.canonicalize_str(w))
                .collect::<Result<_>>()?,
        ))
    }

    pub fn cells(&self) -> &[Element] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn position(&self, e: &Element) -> Option<usize> {
        self.cells.binary_search(e).ok()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.position(e).is_some()
    }

    pub fn is_subset(&self, other: &Support) -> bool {
        self.cells.iter().all(|c| other.contains(c))
    }

    pub fn union(&self, other: &Support) -> Support {
        Support::new(self.cells.iter().chain(&other.cells).cloned().collect())
    }

    /// `{f·t⁻¹ : f ∈ self}`.
    pub fn translate(&self, g: &Group, t: &Element) -> Result<Support> {
        let ti = g.invert(t)?;
        Ok(Support::new(
            self.cells
                .iter()
                .map(|f| g.multiply(f, &ti))
                .collect::<Result<_>>()?,
        ))
    }

    /// `{f·t : f ∈ self}`: the cells an occurrence at `t` touches.
    pub fn shift(&self, g: &Group, t: &Element) -> Result<Support> {
        Ok(Support::new(
            self.cells
                .iter()
                .map(|f| g.multiply(f, t))
                .collect::<Result<_>>()?,
        ))
    }
}

/// Total assignment of symbols to the cells of a support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    support: Support,
    values: Vec<Symbol>,
}

impl Pattern {
    /// Builds a pattern from parallel cell/value lists in any order.
    pub fn new(cells: Vec<Element>, values: Vec<Symbol>) -> Result<Self> {
        if cells.len() != values.len() {
            return Err(Error::invalid("pattern cells and values differ in length"));
        }
        let mut pairs: Vec<(Element, Symbol)> = cells.into_iter().zip(values).collect();
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::invalid("pattern assigns a cell twice"));
            }
        }
        let (cells, values) = pairs.into_iter().unzip();
        Ok(Pattern {
            support: Support { cells },
            values,
        })
    }

    /// Values given in the support's own (shortlex) order.
    pub fn on(support: Support, values: Vec<Symbol>) -> Self {
        assert_eq!(support.len(), values.len(), "pattern arity");
        Pattern { support, values }
    }

    pub fn empty() -> Self {
        Pattern::on(Support::default(), Vec::new())
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn values(&self) -> &[Symbol] {
        &self.values
    }

    pub fn get(&self, cell: &Element) -> Option<Symbol> {
        self.support.position(cell).map(|i| self.values[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, Symbol)> {
        self.support.cells.iter().zip(self.values.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coding whose entry for cell `f` is the word of `f⁻¹`.
    pub fn to_coding(&self, g: &Group) -> Result<PatternCoding> {
        Ok(PatternCoding {
            entries: self
                .iter()
                .map(|(c, s)| Ok((g.invert(c)?.letters().to_vec(), s)))
                .collect::<Result<_>>()?,
        })
    }
}

/// Pattern `p'` with `p'(f·t⁻¹) = p(f)`, so that `x ∈ t·[p]` iff `p'` occurs
/// in `x` at the identity.
pub fn translate(g: &Group, p: &Pattern, t: &Element) -> Result<Pattern> {
    if t.is_identity() {
        return Ok(p.clone());
    }
    let ti = g.invert(t)?;
    let cells = p
        .support
        .cells
        .iter()
        .map(|f| g.multiply(f, &ti))
        .collect::<Result<Vec<_>>>()?;
    Pattern::new(cells, p.values.clone())
}

pub fn restrict(p: &Pattern, a: &Support) -> Result<Pattern> {
    let values = a
        .cells
        .iter()
        .map(|c| p.get(c).ok_or(Error::SupportMismatch))
        .collect::<Result<Vec<_>>>()?;
    Ok(Pattern::on(a.clone(), values))
}

/// Finite map from words to symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternCoding {
    pub entries: Vec<(Vec<Letter>, Symbol)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Resolved {
    Pattern(Pattern),
    /// Two entries name the same cell with different symbols, so the coded
    /// cylinder is empty.
    Inconsistent {
        cell: Element,
        first: Symbol,
        second: Symbol,
    },
}

/// Pattern denoted by a coding: entry `(w, α)` puts `α` at the cell `w⁻¹`.
pub fn resolve_coding(g: &Group, c: &PatternCoding) -> Result<Resolved> {
    let mut cells: Vec<(Element, Symbol)> = Vec::with_capacity(c.entries.len());
    for (w, s) in &c.entries {
        let cell = g.canonicalize(&inverse_word(w))?;
        match cells.iter().find(|(e, _)| *e == cell) {
            Some(&(_, prev)) if prev != *s => {
                return Ok(Resolved::Inconsistent {
                    cell,
                    first: prev,
                    second: *s,
                })
            }
            Some(_) => {}
            None => cells.push((cell, *s)),
        }
    }
    let (cells, values) = cells.into_iter().unzip();
    Ok(Resolved::Pattern(Pattern::new(cells, values)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use proptest::prelude::*;

    fn z() -> Group {
        Group::new(GroupSpec::z()).unwrap()
    }

    fn z2() -> Group {
        Group::new(GroupSpec::z2()).unwrap()
    }

    fn el(g: &Group, w: &str) -> Element {
        g.canonicalize_str(w).unwrap()
    }

    #[test]
    fn translate_examples() {
        let g = z();
        let p = Pattern::new(vec![el(&g, "")], vec![0]).unwrap();
        let q = translate(&g, &p, &el(&g, "a")).unwrap();
        assert_eq!(q, Pattern::new(vec![el(&g, "a^-1")], vec![0]).unwrap());
        assert_eq!(translate(&g, &p, &Element::identity()).unwrap(), p);

        let g = z2();
        let p = Pattern::new(vec![el(&g, ""), el(&g, "a")], vec![0, 1]).unwrap();
        let q = translate(&g, &p, &el(&g, "b")).unwrap();
        assert_eq!(q.get(&el(&g, "b^-1")), Some(0));
        assert_eq!(q.get(&el(&g, "a b^-1")), Some(1));
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn restrict_examples() {
        let g = z();
        let p = Pattern::new(vec![el(&g, ""), el(&g, "a")], vec![0, 1]).unwrap();
        assert_eq!(restrict(&p, p.support()).unwrap(), p);
        assert!(restrict(&p, &Support::default()).unwrap().is_empty());
        let one = restrict(&p, &Support::new(vec![el(&g, "a")])).unwrap();
        assert_eq!(one.values(), [1]);
        assert!(matches!(
            restrict(&p, &Support::new(vec![el(&g, "a a")])),
            Err(Error::SupportMismatch)
        ));
    }

    #[test]
    fn resolve_examples() {
        let g = z();
        let c = PatternCoding {
            entries: vec![(g.parse_word("aa⁻¹").unwrap(), 0), (vec![], 0)],
        };
        assert_eq!(
            resolve_coding(&g, &c).unwrap(),
            Resolved::Pattern(Pattern::new(vec![Element::identity()], vec![0]).unwrap())
        );
        let c = PatternCoding {
            entries: vec![(g.parse_word("aa⁻¹").unwrap(), 0), (vec![], 1)],
        };
        assert!(matches!(
            resolve_coding(&g, &c).unwrap(),
            Resolved::Inconsistent { .. }
        ));

        let g = z2();
        let c = PatternCoding {
            entries: vec![(g.parse_word("ab").unwrap(), 0)],
        };
        let Resolved::Pattern(p) = resolve_coding(&g, &c).unwrap() else {
            panic!()
        };
        assert_eq!(p.get(&el(&g, "a^-1 b^-1")), Some(0));
    }

    #[test]
    fn alphabet_rules() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["0", "0"]).is_err());
        let a: Alphabet = serde_json::from_str(r#"["x","y"]"#).unwrap();
        assert_eq!(a.symbol("y").unwrap(), 1);
        assert!(matches!(a.symbol("z"), Err(Error::UnknownSymbol(_))));
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"["x","y"]"#);
        assert_eq!(a.product(&Alphabet::numbered(2)).name(3), "(y,1)");
    }

    fn arb_word() -> impl Strategy<Value = Vec<Letter>> {
        proptest::collection::vec(0u16..4, 0..6)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn right_action_law(cells in proptest::collection::vec(arb_word(), 1..4),
                            t in arb_word(), u in arb_word()) {
            for g in [z2(), Group::new(GroupSpec {
                name: "L".into(),
                generators: vec!["t".into(), "s".into()],
                oracle: crate::group::Oracle::Lamplighter,
                relators: vec![],
            }).unwrap()] {
                let mut support: Vec<Element> = cells.iter().map(|w| g.canonicalize(w).unwrap()).collect();
                support.sort();
                support.dedup();
                let values = (0..support.len() as Symbol).collect();
                let p = Pattern::new(support, values).unwrap();
                let (t, u) = (g.canonicalize(&t).unwrap(), g.canonicalize(&u).unwrap());
                let lhs = translate(&g, &translate(&g, &p, &t).unwrap(), &u).unwrap();
                // The action law composes on the right: translating by t then u
                // is translating by u·t.
                let rhs = translate(&g, &p, &g.multiply(&u, &t).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn coding_round_trip(cells in proptest::collection::vec(arb_word(), 0..5)) {
            let g = z2();
            let mut support: Vec<Element> = cells.iter().map(|w| g.canonicalize(w).unwrap()).collect();
            support.sort();
            support.dedup();
            let values = (0..support.len() as Symbol).map(|i| i % 3).collect();
            let p = Pattern::new(support, values).unwrap();
            prop_assert_eq!(resolve_coding(&g, &p.to_coding(&g).unwrap()).unwrap(), Resolved::Pattern(p));
        }
    }
}
