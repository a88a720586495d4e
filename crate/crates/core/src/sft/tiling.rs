//! Tile sets and the SFT of all tilings by them.
//!
//! A configuration assigns to each cell `g` either no tile or a tile `T`,
//! which then covers `T·g`. Tilings are the configurations whose covers are
//! pairwise disjoint and exhaust the group.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ForbiddenPattern, SftSpec};
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::pattern::{Alphabet, Support};
use crate::symbols::SymbolSet;

/// Name of the "no tile here" symbol.
pub const EMPTY_TILE: &str = "-";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileSet {
    tiles: Vec<Support>,
}

/// JSON form: each tile is a list of words.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TileSetDoc {
    pub tiles: Vec<Vec<String>>,
}

impl TileSet {
    pub fn new(tiles: Vec<Support>) -> Result<Self> {
        if tiles.is_empty() {
            return Err(Error::invalid("tile set is empty"));
        }
        for (i, t) in tiles.iter().enumerate() {
            if !t.contains(&Element::identity()) {
                return Err(Error::invalid(format!(
                    "tile {} does not contain the identity",
                    i + 1
                )));
            }
            if tiles[..i].contains(t) {
                return Err(Error::invalid(format!(
                    "tile {} repeats an earlier tile",
                    i + 1
                )));
            }
        }
        Ok(TileSet { tiles })
    }

    pub fn tiles(&self) -> &[Support] {
        &self.tiles
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// Symbol of tile `i` in the tiling alphabet (symbol 0 is no tile).
    pub fn symbol(i: usize) -> u32 {
        i as u32 + 1
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(
            std::iter::once(EMPTY_TILE.to_string())
                .chain((1..=self.len()).map(|i| format!("T{i}"))),
        )
        .expect("distinct names")
    }

    pub fn union(&self) -> Support {
        self.tiles
            .iter()
            .fold(Support::default(), |a, t| a.union(t))
    }

    pub fn from_doc(g: &Group, doc: &TileSetDoc) -> Result<Self> {
        let tiles = doc
            .tiles
            .iter()
            .map(|t| {
                let words: Vec<&str> = t.iter().map(String::as_str).collect();
                Support::from_words(g, &words)
            })
            .collect::<Result<_>>()?;
        TileSet::new(tiles)
    }

    pub fn to_doc(&self, g: &Group) -> TileSetDoc {
        TileSetDoc {
            tiles: self
                .tiles
                .iter()
                .map(|t| t.cells().iter().map(|c| g.format(c)).collect())
                .collect(),
        }
    }
}

/// SFT whose configurations are exactly the tilings by `tiles`.
///
/// Disjointness: for each `g = t₂⁻¹t₁ ≠ 1` with `t₁, t₂` in the union of the
/// tiles, forbid tiles `T` at `1` and `T'` at `g` with `T ∩ T'·g ≠ ∅`.
/// Covering: forbid every pattern on `V = ⋃T⁻¹` in which no placed tile covers
/// the identity, written as one rule whose cell `v` ranges over the empty
/// symbol and the tiles `T` with `v⁻¹ ∉ T`.
pub fn tiling_sft(group: Arc<Group>, tiles: &TileSet) -> Result<SftSpec> {
    let g = &*group;
    let k = tiles.len() + 1;
    let union = tiles.union();
    let mut rules = Vec::new();
    let mut offsets = Vec::new();
    for t1 in union.cells() {
        for t2 in union.cells() {
            let d = g.multiply(&g.invert(t2)?, t1)?;
            if !d.is_identity() {
                offsets.push(d);
            }
        }
    }
    offsets.sort();
    offsets.dedup();
    for d in &offsets {
        let shifted: Vec<Support> = tiles
            .tiles()
            .iter()
            .map(|t| t.shift(g, d))
            .collect::<Result<_>>()?;
        for (i, ti) in tiles.tiles().iter().enumerate() {
            let bad = shifted
                .iter()
                .enumerate()
                .filter(|(_, s)| s.cells().iter().any(|c| ti.contains(c)))
                .map(|(j, _)| TileSet::symbol(j));
            let bad = SymbolSet::from_iter(k, bad);
            if let Some(r) = ForbiddenPattern::new(vec![
                (
                    Element::identity(),
                    SymbolSet::singleton(k, TileSet::symbol(i)),
                ),
                (d.clone(), bad),
            ]) {
                rules.push(r);
            }
        }
    }
    let inverses = Support::new(
        union
            .cells()
            .iter()
            .map(|c| g.invert(c))
            .collect::<Result<_>>()?,
    );
    let mut cover = Vec::with_capacity(inverses.len());
    for v in inverses.cells() {
        let vi = g.invert(v)?;
        let mut allowed = SymbolSet::singleton(k, 0);
        for (i, t) in tiles.tiles().iter().enumerate() {
            if !t.contains(&vi) {
                allowed.insert(TileSet::symbol(i));
            }
        }
        cover.push((v.clone(), allowed));
    }
    rules.extend(ForbiddenPattern::new(cover));
    SftSpec::new(group, tiles.alphabet(), rules)
}
