//! Constructions that move an SFT between a group and a subgroup.

use std::collections::HashMap;
use std::sync::Arc;

use super::{ForbiddenPattern, SftSpec};
use crate::error::{Error, Result};
use crate::group::{substitute, Element, Group, GroupSpec, Letter, Oracle};
use crate::pattern::{Alphabet, Pattern};
use crate::symbols::{Symbol, SymbolSet};

/// Homomorphism from the generators of `h` to words of `g`.
pub(crate) struct Embedding {
    images: Vec<Vec<Letter>>,
}

impl Embedding {
    pub fn new(h: &Group, g: &Group, images: &[String]) -> Result<Self> {
        if images.len() != h.generator_names().len() {
            return Err(Error::invalid(format!(
                "{} image words given for {} generators",
                images.len(),
                h.generator_names().len()
            )));
        }
        Ok(Embedding {
            images: images
                .iter()
                .map(|w| g.parse_word(w))
                .collect::<Result<_>>()?,
        })
    }

    pub fn apply(&self, g: &Group, h: &[Letter]) -> Result<Element> {
        g.canonicalize(&substitute(h, &self.images))
    }

    /// Fails when two elements of the radius-`r` ball share an image.
    pub fn check_injective(&self, h: &Group, g: &Group, r: usize) -> Result<()> {
        let mut seen: HashMap<Element, Element> = HashMap::new();
        for e in h.ball(r)?.elements {
            let img = self.apply(g, e.letters())?;
            if let Some(prev) = seen.insert(img, e.clone()) {
                return Err(Error::EmbeddingNotInjective {
                    first: h.format(&prev),
                    second: h.format(&e),
                });
            }
        }
        Ok(())
    }
}

/// Free extension of `y` (over `H`) to `g`, along the homomorphism sending
/// the `i`-th generator of `H` to `images[i]`. Injectivity is checked on the
/// ball of radius `check_radius` of `H`.
pub fn free_extension(
    y: &SftSpec,
    images: &[String],
    g: Arc<Group>,
    check_radius: usize,
) -> Result<SftSpec> {
    let h = y.group();
    let emb = Embedding::new(h, &g, images)?;
    emb.check_injective(h, &g, check_radius)?;
    let mut rules = Vec::with_capacity(y.forbidden().len());
    for r in y.forbidden() {
        let cells = r
            .support()
            .cells()
            .iter()
            .map(|c| emb.apply(&g, c.letters()))
            .collect::<Result<Vec<_>>>()?;
        rules.extend(ForbiddenPattern::new(
            cells.into_iter().zip(r.sets().iter().cloned()).collect(),
        ));
    }
    SftSpec::new(g, y.alphabet().clone(), rules)
}

/// Higher power shift `X^[R]` over a subgroup `H` with coset representatives
/// `R`, together with the data of the conjugacy `φ(x)(r·h) = x(h)(r)`.
pub struct HigherPowerShift {
    pub sft: SftSpec,
    parent: Arc<Group>,
    reps: Vec<Element>,
    embedding: Embedding,
    base: usize,
}

impl HigherPowerShift {
    pub fn representatives(&self) -> &[Element] {
        &self.reps
    }

    /// Component `i` of a tuple symbol.
    pub fn component(&self, s: Symbol, i: usize) -> Symbol {
        let m = self.reps.len();
        let place = (self.base as u64).pow((m - 1 - i) as u32);
        ((s as u64 / place) % self.base as u64) as Symbol
    }

    pub fn tuple_symbol(&self, comps: &[Symbol]) -> Symbol {
        comps
            .iter()
            .fold(0u64, |acc, &c| acc * self.base as u64 + c as u64) as Symbol
    }

    /// Image of an element of `H` in the parent group.
    pub fn embed(&self, h: &Element) -> Result<Element> {
        self.embedding.apply(&self.parent, h.letters())
    }

    /// `φ` on a finite pattern over `H`: cell `r_i·h` gets component `i` of `p(h)`.
    pub fn to_parent_pattern(&self, p: &Pattern) -> Result<Pattern> {
        let mut cells = Vec::new();
        let mut values = Vec::new();
        for (h, s) in p.iter() {
            let ih = self.embed(h)?;
            for (i, r) in self.reps.iter().enumerate() {
                cells.push(self.parent.multiply(r, &ih)?);
                values.push(self.component(s, i));
            }
        }
        Pattern::new(cells, values)
    }
}

/// Builds `X^[R]` for `y` over `G`. `h_spec` must be a subgroup spec whose
/// parent is `y`'s group; `reps` must be a transversal with `G = ⋃ r·H`, which
/// is checked on the ball of radius `check_radius` of `G`.
pub fn higher_power_shift(
    y: &SftSpec,
    reps: &[Element],
    h_spec: GroupSpec,
    check_radius: usize,
) -> Result<HigherPowerShift> {
    let g = y.group().clone();
    let Oracle::Subgroup { parent, images } = &h_spec.oracle else {
        return Err(Error::invalid(
            "the subgroup must be given as a subgroup spec",
        ));
    };
    if **parent != *g.spec() {
        return Err(Error::invalid(
            "the subgroup's parent differs from the shift's group",
        ));
    }
    if reps.is_empty() {
        return Err(Error::invalid("no coset representatives given"));
    }
    let images = images.clone();
    let h = Arc::new(Group::new(h_spec)?);
    let emb = Embedding::new(&h, &g, &images)?;

    let mut needed: Vec<Element> = g.ball(check_radius)?.elements;
    for r in y.forbidden() {
        for f in r.support().cells() {
            for r0 in reps {
                needed.push(g.multiply(f, r0)?);
            }
        }
    }
    let max_len = needed.iter().map(Element::len).max().unwrap_or(0);
    let limit = 2 * max_len + 8;
    let mut table: HashMap<Element, (usize, Element)> = HashMap::new();
    let mut rho = 0;
    loop {
        table.clear();
        for (ri, r) in reps.iter().enumerate() {
            for e in h.ball(rho)?.elements {
                let key = g.multiply(r, &emb.apply(&g, e.letters())?)?;
                if let Some((rj, f)) = table.insert(key.clone(), (ri, e.clone())) {
                    return Err(Error::CosetCheckFailed(format!(
                        "`{}` is both r{} · {} and r{} · {}",
                        g.format(&key),
                        rj + 1,
                        h.format(&f),
                        ri + 1,
                        h.format(&e)
                    )));
                }
            }
        }
        if needed.iter().all(|e| table.contains_key(e)) {
            break;
        }
        rho += 1;
        if rho > limit {
            let missing = needed
                .iter()
                .find(|e| !table.contains_key(*e))
                .expect("missing element");
            return Err(Error::CosetCheckFailed(format!(
                "`{}` is not of the form r·h with |h| <= {limit}",
                g.format(missing)
            )));
        }
    }

    let base = y.alphabet().len();
    let m = reps.len();
    let size = base
        .checked_pow(m as u32)
        .filter(|&s| s <= u32::MAX as usize)
        .ok_or_else(|| Error::limit("tuple alphabet too large"))?;
    let hp = HigherPowerShift {
        sft: crate::sft::full_shift(h.clone(), y.alphabet().clone()),
        parent: g.clone(),
        reps: reps.to_vec(),
        embedding: emb,
        base,
    };
    let names: Vec<String> = (0..size as Symbol)
        .map(|s| {
            let parts: Vec<&str> = (0..m)
                .map(|i| y.alphabet().name(hp.component(s, i)))
                .collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let mut rules = Vec::new();
    for r in y.forbidden() {
        for r0 in reps {
            let mut per_cell: Vec<(Element, Vec<(usize, &SymbolSet)>)> = Vec::new();
            for (f, set) in r.support().cells().iter().zip(r.sets()) {
                let (ri, h1) = table[&g.multiply(f, r0)?].clone();
                match per_cell.iter_mut().find(|(c, _)| *c == h1) {
                    Some((_, v)) => v.push((ri, set)),
                    None => per_cell.push((h1, vec![(ri, set)])),
                }
            }
            let cells = per_cell
                .into_iter()
                .map(|(c, cons)| {
                    let set = SymbolSet::from_iter(
                        size,
                        (0..size as Symbol).filter(|&s| {
                            cons.iter()
                                .all(|(i, set)| set.contains(hp.component(s, *i)))
                        }),
                    );
                    (c, set)
                })
                .collect();
            rules.extend(ForbiddenPattern::new(cells));
        }
    }
    Ok(HigherPowerShift {
        sft: SftSpec::new(h, Alphabet::new(names)?, rules)?,
        ..hp
    })
}
