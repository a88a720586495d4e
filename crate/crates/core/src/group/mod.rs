//! Finitely generated groups given by word-problem oracles.
//!
//! Words are sequences of [`Letter`]s: base generator `i` contributes the
//! letters `2i` (the generator) and `2i + 1` (its formal inverse), so the
//! inverse of letter `l` is `l ^ 1` and the letter order follows declaration
//! order with each generator immediately followed by its inverse.
//!
//! Elements are represented by their shortlex-least word. Shortlex geodesics
//! are prefix-closed, so a breadth-first ball grown level by level in letter
//! order meets every element first through its canonical word.

mod intmat;
mod oracle;

pub(crate) use intmat::{adjugate, apply};

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use oracle::{Evaluator, Key};

pub type Letter = u16;

#[inline]
pub fn inverse_letter(l: Letter) -> Letter {
    l ^ 1
}

/// Formal inverse of a word: reversed, each letter inverted.
pub fn inverse_word(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|&l| l ^ 1).collect()
}

/// Replaces each letter by the word of its base generator, reversed and
/// inverted for inverse letters.
pub fn substitute(w: &[Letter], images: &[Vec<Letter>]) -> Vec<Letter> {
    oracle::substitute(w, images)
}

/// Group element, stored as its canonical (shortlex-least) word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element(Arc<[Letter]>);

impl Element {
    pub fn identity() -> Self {
        Element(Arc::from(Vec::new()))
    }

    pub(crate) fn from_canonical(w: Vec<Letter>) -> Self {
        Element(Arc::from(w))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element{:?}", &self.0[..])
    }
}

/// Serializable description of a group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    #[serde(default)]
    pub name: String,
    /// Generator names in declaration order. Entries of the form `x^-1` are
    /// accepted and ignored; every generator has a formal inverse anyway.
    pub generators: Vec<String>,
    pub oracle: Oracle,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Oracle {
    FreeAbelian {
        rank: usize,
    },
    FiniteCyclic {
        order: u64,
    },
    /// Generators are the left factor's followed by the right factor's.
    DirectProduct {
        left: Box<GroupSpec>,
        right: Box<GroupSpec>,
    },
    /// `ℤ^d ⋊ ℤ`; generators `a_1 … a_d, t`. Row `i` of `matrix` is the
    /// exponent vector of `t a_i t^-1`.
    Semidirect {
        matrix: Vec<Vec<i64>>,
    },
    /// `ℤ/2 ≀ ℤ` with generators `t` (shift) and `s` (lamp at the cursor).
    Lamplighter,
    /// Subgroup generated by words of the parent group, one per generator.
    Subgroup {
        parent: Box<GroupSpec>,
        images: Vec<String>,
    },
    Subprocess {
        command: Vec<String>,
    },
}

impl GroupSpec {
    pub fn free_abelian(names: &[&str]) -> Self {
        GroupSpec {
            name: format!("Z^{}", names.len()),
            generators: names.iter().map(|s| s.to_string()).collect(),
            oracle: Oracle::FreeAbelian { rank: names.len() },
            relators: Vec::new(),
        }
    }

    /// `ℤ` with generator `a`.
    pub fn z() -> Self {
        Self::free_abelian(&["a"])
    }

    /// `ℤ²` with generators `a` (east) and `b` (north).
    pub fn z2() -> Self {
        Self::free_abelian(&["a", "b"])
    }

    pub fn cyclic(order: u64) -> Self {
        GroupSpec {
            name: format!("Z/{order}"),
            generators: vec!["a".into()],
            oracle: Oracle::FiniteCyclic { order },
            relators: Vec::new(),
        }
    }

    pub fn subgroup(parent: GroupSpec, names: &[&str], images: &[&str]) -> Self {
        GroupSpec {
            name: format!("subgroup of {}", parent.name),
            generators: names.iter().map(|s| s.to_string()).collect(),
            oracle: Oracle::Subgroup {
                parent: Box::new(parent),
                images: images.iter().map(|s| s.to_string()).collect(),
            },
            relators: Vec::new(),
        }
    }

    /// Same group presentation, ignoring the display name.
    pub fn same_group(&self, other: &GroupSpec) -> bool {
        self.generators == other.generators
            && self.oracle == other.oracle
            && self.relators == other.relators
    }

    /// Declared base generators with any listed `x^-1` entries removed.
    pub fn base_generators(&self) -> Result<Vec<String>> {
        let mut base: Vec<String> = Vec::new();
        let mut inverses = Vec::new();
        for g in &self.generators {
            let g = g.trim();
            if let Some(b) = g.strip_suffix("^-1").or_else(|| g.strip_suffix("⁻¹")) {
                inverses.push(b.to_string());
            } else {
                if g.is_empty() || g.contains(char::is_whitespace) || g.contains('^') {
                    return Err(Error::invalid(format!("bad generator name `{g}`")));
                }
                if base.iter().any(|b| b == g) {
                    return Err(Error::invalid(format!("duplicate generator `{g}`")));
                }
                base.push(g.to_string());
            }
        }
        if let Some(bad) = inverses.iter().find(|i| !base.contains(i)) {
            return Err(Error::invalid(format!(
                "inverse of undeclared generator `{bad}`"
            )));
        }
        Ok(base)
    }

    fn expected_generators(&self) -> Result<Option<usize>> {
        Ok(match &self.oracle {
            Oracle::FreeAbelian { rank } => Some(*rank),
            Oracle::FiniteCyclic { .. } => Some(1),
            Oracle::DirectProduct { left, right } => {
                Some(left.base_generators()?.len() + right.base_generators()?.len())
            }
            Oracle::Semidirect { matrix } => Some(matrix.len() + 1),
            Oracle::Lamplighter => Some(2),
            Oracle::Subgroup { images, .. } => Some(images.len()),
            Oracle::Subprocess { .. } => None,
        })
    }
}

pub(crate) fn letter_names(base: &[String]) -> Vec<String> {
    base.iter()
        .flat_map(|g| [g.clone(), format!("{g}^-1")])
        .collect()
}

/// All distinct elements of word length at most `radius`, shortlex-sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub radius: usize,
    pub elements: Vec<Element>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

#[derive(Default)]
struct BallCache {
    by_key: HashMap<Key, Element>,
    elements: Vec<Element>,
    /// `level_starts[k]` is the index of the first element of length `k`;
    /// one extra entry marks the end of the last complete level.
    level_starts: Vec<usize>,
}

impl BallCache {
    fn radius(&self) -> Option<usize> {
        self.level_starts.len().checked_sub(2)
    }
}

/// A group session: the `GroupSpec`, its compiled oracle and a canonicalization cache.
pub struct Group {
    spec: GroupSpec,
    base: Vec<String>,
    names: Vec<String>,
    eval: Evaluator,
    ball_cap: usize,
    cache: Mutex<BallCache>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("name", &self.spec.name)
            .field("generators", &self.base)
            .finish()
    }
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        Self::with_budget(spec, &Budget::default())
    }

    pub fn with_budget(spec: GroupSpec, budget: &Budget) -> Result<Self> {
        let base = spec.base_generators()?;
        if base.is_empty() {
            return Err(Error::invalid("a group needs at least one generator"));
        }
        if let Some(n) = spec.expected_generators()? {
            if n != base.len() {
                return Err(Error::invalid(format!(
                    "oracle expects {n} generators but {} were declared",
                    base.len()
                )));
            }
        }
        let names = letter_names(&base);
        let eval = Evaluator::build(&spec, &names)?;
        let mut cache = BallCache::default();
        cache.elements.push(Element::identity());
        cache.level_starts = vec![0, 1];
        if let Some(k) = eval.key(&[])? {
            cache.by_key.insert(k, Element::identity());
        }
        Ok(Group {
            spec,
            base,
            names,
            eval,
            ball_cap: budget.ball_cap,
            cache: Mutex::new(cache),
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn generator_names(&self) -> &[String] {
        &self.base
    }

    /// Number of letters (generators and their inverses).
    pub fn letter_count(&self) -> usize {
        self.names.len()
    }

    pub fn letter_name(&self, l: Letter) -> &str {
        &self.names[l as usize]
    }

    /// Parses a word. Tokens may be separated by whitespace or juxtaposed
    /// (`aa^-1b`); generator names are matched greedily, and each may be
    /// followed by `^-1`, `⁻¹` or an integer power `^k`. The empty string,
    /// `1` and `e` denote the identity unless they are generator names.
    pub fn parse_word(&self, word: &str) -> Result<Vec<Letter>> {
        let mut out = Vec::new();
        for token in word.split_whitespace() {
            if (token == "1" || token == "e" || token == "ε")
                && !self.base.iter().any(|b| b == token)
            {
                continue;
            }
            let mut rest = token;
            while !rest.is_empty() {
                let Some((gi, name)) = self
                    .base
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| rest.starts_with(n.as_str()))
                    .max_by_key(|(_, n)| n.len())
                else {
                    return Err(Error::UnknownGenerator {
                        token: token.to_string(),
                        word: word.to_string(),
                    });
                };
                rest = &rest[name.len()..];
                let mut power: i64 = 1;
                if let Some(r) = rest.strip_prefix("⁻¹") {
                    power = -1;
                    rest = r;
                } else if let Some(r) = rest.strip_prefix('^') {
                    let digits = r
                        .char_indices()
                        .take_while(|(i, c)| {
                            c.is_ascii_digit() || (*i == 0 && (*c == '-' || *c == '+'))
                        })
                        .map(|(i, c)| i + c.len_utf8())
                        .last()
                        .unwrap_or(0);
                    power = r[..digits].parse().map_err(|_| Error::UnknownGenerator {
                        token: token.to_string(),
                        word: word.to_string(),
                    })?;
                    rest = &r[digits..];
                }
                let letter = (2 * gi) as Letter + Letter::from(power < 0);
                out.extend(std::iter::repeat(letter).take(power.unsigned_abs() as usize));
            }
        }
        Ok(out)
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        w.iter()
            .map(|&l| self.names[l as usize].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn format(&self, e: &Element) -> String {
        self.format_word(e.letters())
    }

    fn check_letters(&self, w: &[Letter]) -> Result<()> {
        if let Some(&bad) = w.iter().find(|&&l| l as usize >= self.names.len()) {
            return Err(Error::UnknownGenerator {
                token: format!("#{bad}"),
                word: format!("{w:?}"),
            });
        }
        Ok(())
    }

    /// Whether `w` represents the identity.
    pub fn wp_decide(&self, w: &[Letter]) -> Result<bool> {
        self.check_letters(w)?;
        self.eval.is_identity(w)
    }

    pub fn wp_decide_str(&self, w: &str) -> Result<bool> {
        self.wp_decide(&self.parse_word(w)?)
    }

    /// Shortlex-least word representing the same element as `w`.
    pub fn canonicalize(&self, w: &[Letter]) -> Result<Element> {
        self.check_letters(w)?;
        if let Some(e) = self.direct_canonical(w)? {
            return Ok(e);
        }
        let key = self.eval.key(w)?;
        let mut cache = self.cache.lock().expect("group cache poisoned");
        for radius in 0..=w.len() {
            if let Some(k) = &key {
                if let Some(e) = cache.by_key.get(k) {
                    return Ok(e.clone());
                }
                if radius < w.len() {
                    self.grow(&mut cache, radius + 1)?;
                }
                continue;
            }
            self.grow(&mut cache, radius)?;
            let lo = if radius == 0 {
                0
            } else {
                cache.level_starts[radius]
            };
            let hi = cache.level_starts[radius + 1];
            let inv = inverse_word(w);
            for i in lo..hi {
                let mut probe = cache.elements[i].letters().to_vec();
                probe.extend_from_slice(&inv);
                if self.eval.is_identity(&probe)? {
                    return Ok(cache.elements[i].clone());
                }
            }
        }
        Err(Error::Oracle(format!(
            "no representative of length <= {} found for `{}`",
            w.len(),
            self.format_word(w)
        )))
    }

    pub fn canonicalize_str(&self, w: &str) -> Result<Element> {
        self.canonicalize(&self.parse_word(w)?)
    }

    /// Closed-form canonical words for abelian oracles.
    fn direct_canonical(&self, w: &[Letter]) -> Result<Option<Element>> {
        match &self.eval {
            Evaluator::FreeAbelian(_) => {
                let k = self.eval.key(w)?.expect("keyed");
                let mut out = Vec::new();
                for (i, &c) in k.iter().enumerate() {
                    let l = (2 * i) as Letter + Letter::from(c < 0);
                    out.extend(std::iter::repeat(l).take(c.unsigned_abs() as usize));
                }
                Ok(Some(Element::from_canonical(out)))
            }
            Evaluator::Cyclic(m) => {
                let k = self.eval.key(w)?.expect("keyed")[0] as u64;
                let out = if k <= m - k {
                    vec![0; k as usize]
                } else {
                    vec![1; (m - k) as usize]
                };
                Ok(Some(Element::from_canonical(out)))
            }
            _ => Ok(None),
        }
    }

    fn grow(&self, cache: &mut BallCache, radius: usize) -> Result<()> {
        let keyed = self.eval.key(&[])?.is_some();
        while cache.radius().unwrap_or(0) < radius {
            let r = cache.radius().unwrap_or(0);
            let lo = if r == 0 { 0 } else { cache.level_starts[r] };
            let hi = cache.level_starts[r + 1];
            for i in lo..hi {
                let parent = cache.elements[i].clone();
                for l in 0..self.names.len() as Letter {
                    if parent.letters().last() == Some(&(l ^ 1)) {
                        continue;
                    }
                    let mut cand = parent.letters().to_vec();
                    cand.push(l);
                    let fresh = if keyed {
                        let k = self.eval.key(&cand)?.expect("keyed");
                        if cache.by_key.contains_key(&k) {
                            None
                        } else {
                            let e = Element::from_canonical(cand);
                            cache.by_key.insert(k, e.clone());
                            Some(e)
                        }
                    } else {
                        let inv = inverse_word(&cand);
                        let mut seen = false;
                        for old in &cache.elements {
                            let mut probe = old.letters().to_vec();
                            probe.extend_from_slice(&inv);
                            if self.eval.is_identity(&probe)? {
                                seen = true;
                                break;
                            }
                        }
                        (!seen).then(|| Element::from_canonical(cand))
                    };
                    if let Some(e) = fresh {
                        if cache.elements.len() >= self.ball_cap {
                            return Err(Error::limit(format!(
                                "ball of radius {} exceeds the cap of {} elements",
                                r + 1,
                                self.ball_cap
                            )));
                        }
                        cache.elements.push(e);
                    }
                }
            }
            let end = cache.elements.len();
            cache.level_starts.push(end);
        }
        Ok(())
    }

    /// All elements of word length at most `n`, in shortlex order.
    pub fn ball(&self, n: usize) -> Result<Ball> {
        let mut cache = self.cache.lock().expect("group cache poisoned");
        self.grow(&mut cache, n)?;
        let end = cache.level_starts[n + 1];
        Ok(Ball {
            radius: n,
            elements: cache.elements[..end].to_vec(),
        })
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut w = x.letters().to_vec();
        w.extend_from_slice(y.letters());
        self.canonicalize(&w)
    }

    pub fn invert(&self, x: &Element) -> Result<Element> {
        self.canonicalize(&inverse_word(x.letters()))
    }

    /// Normal-form coordinates for built-in oracles; for free-abelian groups
    /// this is the exponent vector.
    pub fn coordinates(&self, x: &Element) -> Result<Option<Vec<i64>>> {
        self.eval.key(x.letters())
    }

    /// Rank when the group is free abelian on its generators.
    pub fn free_abelian_rank(&self) -> Option<usize> {
        self.eval.is_free_abelian()
    }

    /// Element with the given exponent vector in a free-abelian group.
    pub fn from_coordinates(&self, v: &[i64]) -> Result<Element> {
        let mut w = Vec::new();
        for (i, &c) in v.iter().enumerate() {
            let l = (2 * i) as Letter + Letter::from(c < 0);
            w.extend(std::iter::repeat(l).take(c.unsigned_abs() as usize));
        }
        self.canonicalize(&w)
    }

    /// True when the group is known to be infinite cyclic on its single generator.
    pub fn is_infinite_cyclic(&self) -> bool {
        self.eval.is_infinite_cyclic(self.base.len())
    }

    /// Parses the declared relators.
    pub fn relators(&self) -> Result<Vec<Vec<Letter>>> {
        self.spec
            .relators
            .iter()
            .map(|r| self.parse_word(r))
            .collect()
    }
}
