//! JSON documents for groups, patterns, SFTs, charts, tile sets and tilings.
//!
//! References to other documents may be given inline or as a path, resolved
//! against the directory of the referring file.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::budget::Budget;
use crate::chart::{Chart, Cocycle};
use crate::error::{Error, Result};
use crate::group::{Element, Group, GroupSpec};
use crate::pattern::{resolve_coding, Alphabet, Pattern, PatternCoding, Resolved, Support};
use crate::reduction::{ExactTiling, FactorMap};
use crate::sft::{ForbiddenPattern, SftSpec, TileSet, TileSetDoc};
use crate::symbols::SymbolSet;

/// Word for an element, with `1` for the identity.
pub fn word(g: &Group, e: &Element) -> String {
    if e.is_identity() {
        "1".to_string()
    } else {
        g.format(e)
    }
}

pub fn words(g: &Group, s: &Support) -> Vec<String> {
    s.cells().iter().map(|c| word(g, c)).collect()
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// A document given inline or by path.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(String),
    Inline(T),
}

impl<T: for<'de> Deserialize<'de> + Clone> Ref<T> {
    /// The document and the directory its own references resolve against.
    pub fn load(&self, base: &Path) -> Result<(T, PathBuf)> {
        match self {
            Ref::Inline(t) => Ok((t.clone(), base.to_path_buf())),
            Ref::Path(p) => {
                let path = base.join(p);
                Ok((serde_json::from_value(read_json(&path)?)?, base_dir(&path)))
            }
        }
    }
}

/// A cell value: one symbol, or a set of symbols in forbidden patterns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CellValue {
    One(String),
    Set(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternDoc {
    pub support: Vec<String>,
    pub values: Vec<CellValue>,
}

impl PatternDoc {
    pub fn from_pattern(g: &Group, a: &Alphabet, p: &Pattern) -> Self {
        PatternDoc {
            support: words(g, p.support()),
            values: p
                .iter()
                .map(|(_, s)| CellValue::One(a.name(s).to_string()))
                .collect(),
        }
    }

    fn check_len(&self) -> Result<()> {
        if self.support.len() != self.values.len() {
            return Err(Error::invalid(format!(
                "pattern has {} cells but {} values",
                self.support.len(),
                self.values.len()
            )));
        }
        Ok(())
    }

    pub fn to_pattern(&self, g: &Group, a: &Alphabet) -> Result<Pattern> {
        self.check_len()?;
        let mut cells = Vec::with_capacity(self.support.len());
        let mut values = Vec::with_capacity(self.support.len());
        for (w, v) in self.support.iter().zip(&self.values) {
            cells.push(g.canonicalize_str(w)?);
            match v {
                CellValue::One(s) => values.push(a.symbol(s)?),
                CellValue::Set(_) => {
                    return Err(Error::invalid("a pattern cell holds a set of symbols"))
                }
            }
        }
        Pattern::new(cells, values)
    }

    pub fn to_rule(&self, g: &Group, a: &Alphabet) -> Result<Option<ForbiddenPattern>> {
        self.check_len()?;
        let mut cells = Vec::with_capacity(self.support.len());
        for (w, v) in self.support.iter().zip(&self.values) {
            let set = match v {
                CellValue::One(s) => SymbolSet::singleton(a.len(), a.symbol(s)?),
                CellValue::Set(ss) => {
                    let syms = ss.iter().map(|s| a.symbol(s)).collect::<Result<Vec<_>>>()?;
                    SymbolSet::from_iter(a.len(), syms)
                }
            };
            cells.push((g.canonicalize_str(w)?, set));
        }
        Ok(ForbiddenPattern::new(cells))
    }

    pub fn from_rule(g: &Group, a: &Alphabet, r: &ForbiddenPattern) -> Self {
        PatternDoc {
            support: words(g, r.support()),
            values: r
                .sets()
                .iter()
                .map(|s| {
                    let names: Vec<String> = s.iter().map(|x| a.name(x).to_string()).collect();
                    if names.len() == 1 {
                        CellValue::One(names.into_iter().next().expect("one"))
                    } else {
                        CellValue::Set(names)
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SftDoc {
    pub group: Ref<GroupSpec>,
    pub alphabet: Vec<String>,
    #[serde(default)]
    pub forbidden: Vec<PatternDoc>,
}

impl SftDoc {
    pub fn from_sft(x: &SftSpec) -> Self {
        let g = x.group();
        SftDoc {
            group: Ref::Inline(g.spec().clone()),
            alphabet: x.alphabet().names().to_vec(),
            forbidden: x
                .forbidden()
                .iter()
                .map(|r| PatternDoc::from_rule(g, x.alphabet(), r))
                .collect(),
        }
    }

    pub fn build(&self, base: &Path, budget: &Budget) -> Result<SftSpec> {
        let (spec, _) = self.group.load(base)?;
        let g = Arc::new(Group::with_budget(spec, budget)?);
        self.build_over(g)
    }

    /// Builds the SFT over an already constructed group.
    pub fn build_over(&self, g: Arc<Group>) -> Result<SftSpec> {
        let a = Alphabet::new(self.alphabet.iter().cloned())?;
        let rules = self
            .forbidden
            .iter()
            .filter_map(|p| p.to_rule(&g, &a).transpose())
            .collect::<Result<Vec<_>>>()?;
        SftSpec::new(g, a, rules)
    }
}

pub fn load_group(path: &Path, budget: &Budget) -> Result<Arc<Group>> {
    let spec: GroupSpec = serde_json::from_value(read_json(path)?)?;
    Ok(Arc::new(Group::with_budget(spec, budget)?))
}

pub fn load_sft(path: &Path, budget: &Budget) -> Result<SftSpec> {
    let doc: SftDoc = serde_json::from_value(read_json(path)?)?;
    doc.build(&base_dir(path), budget)
}

pub fn sft_to_json(x: &SftSpec) -> Result<String> {
    Ok(serde_json::to_string_pretty(&SftDoc::from_sft(x))?)
}

/// A support: a list of words.
pub fn load_support(path: &Path, g: &Group) -> Result<Support> {
    let ws: Vec<String> = serde_json::from_value(read_json(path)?)?;
    let refs: Vec<&str> = ws.iter().map(String::as_str).collect();
    Support::from_words(g, &refs)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableEntryDoc {
    pub gen: String,
    pub pattern: PatternDoc,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartDoc {
    pub sft: Ref<SftDoc>,
    pub h_generators: Vec<String>,
    /// Full description of the acting group; defaults to the free abelian
    /// group on `h_generators`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_group: Option<GroupSpec>,
    pub window: Vec<String>,
    pub table: Vec<TableEntryDoc>,
}

impl ChartDoc {
    pub fn from_chart(ch: &Chart) -> Self {
        let g = ch.group();
        let x = ch.sft();
        let h = ch.cocycle().h_group();
        let window = ch.cocycle().window();
        let table = ch
            .cocycle()
            .entries()
            .into_iter()
            .map(|(l, vals, e)| TableEntryDoc {
                gen: h.letter_name(l).to_string(),
                pattern: PatternDoc::from_pattern(
                    g,
                    x.alphabet(),
                    &Pattern::on(window.clone(), vals.to_vec()),
                ),
                value: word(g, e),
            })
            .collect();
        let names: Vec<&str> = h.generator_names().iter().map(String::as_str).collect();
        ChartDoc {
            sft: Ref::Inline(SftDoc::from_sft(x)),
            h_generators: h.generator_names().to_vec(),
            h_group: (!h.spec().same_group(&GroupSpec::free_abelian(&names)))
                .then(|| h.spec().clone()),
            window: words(g, window),
            table,
        }
    }

    pub fn build(&self, base: &Path, budget: &Budget) -> Result<Chart> {
        let (sdoc, sbase) = self.sft.load(base)?;
        let x = sdoc.build(&sbase, budget)?;
        let g = x.group().clone();
        let names: Vec<&str> = self.h_generators.iter().map(String::as_str).collect();
        let spec = self
            .h_group
            .clone()
            .unwrap_or_else(|| GroupSpec::free_abelian(&names));
        let h = Arc::new(Group::with_budget(spec, budget)?);
        if h.generator_names() != self.h_generators.as_slice() {
            return Err(Error::invalid(
                "h_generators do not match the acting group's generators",
            ));
        }
        let wrefs: Vec<&str> = self.window.iter().map(String::as_str).collect();
        let window = Support::from_words(&g, &wrefs)?;
        let mut table = HashMap::new();
        for e in &self.table {
            let letters = h.parse_word(&e.gen)?;
            if letters.len() != 1 {
                return Err(Error::invalid(format!(
                    "table key `{}` is not a single generator",
                    e.gen
                )));
            }
            let p = e.pattern.to_pattern(&g, x.alphabet())?;
            if p.support() != &window {
                return Err(Error::invalid(format!(
                    "table pattern for `{}` is not on the window",
                    e.gen
                )));
            }
            let vals = p.iter().map(|(_, s)| s).collect();
            if table
                .insert((letters[0], vals), g.canonicalize_str(&e.value)?)
                .is_some()
            {
                return Err(Error::invalid(format!(
                    "duplicate table entry for `{}`",
                    e.gen
                )));
            }
        }
        Chart::new(x, Cocycle::new(h, window, table), budget)
    }
}

pub fn load_chart(path: &Path, budget: &Budget) -> Result<Chart> {
    let doc: ChartDoc = serde_json::from_value(read_json(path)?)?;
    doc.build(&base_dir(path), budget)
}

pub fn chart_to_json(ch: &Chart) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ChartDoc::from_chart(ch))?)
}

pub fn load_tiles(path: &Path, g: &Group) -> Result<TileSet> {
    let doc: TileSetDoc = serde_json::from_value(read_json(path)?)?;
    TileSet::from_doc(g, &doc)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlacementDoc {
    /// Tile name, `T1`, `T2`, ...
    pub tile: String,
    pub at: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactTilingDoc {
    pub lattice: Vec<Vec<i64>>,
    pub placements: Vec<PlacementDoc>,
}

impl ExactTilingDoc {
    pub fn build(&self, g: Arc<Group>, tiles: TileSet) -> Result<ExactTiling> {
        let a = tiles.alphabet();
        let placements = self
            .placements
            .iter()
            .map(|p| {
                let s = a.symbol(&p.tile)?;
                if s == 0 {
                    return Err(Error::invalid("a placement names the empty tile"));
                }
                Ok((s as usize - 1, p.at.clone()))
            })
            .collect::<Result<_>>()?;
        ExactTiling::new(g, tiles, self.lattice.clone(), placements)
    }
}

pub fn load_exact_tiling(path: &Path, g: Arc<Group>, tiles: TileSet) -> Result<ExactTiling> {
    let doc: ExactTilingDoc = serde_json::from_value(read_json(path)?)?;
    doc.build(g, tiles)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompletionDoc {
    pub boundary: Vec<String>,
    pub completion: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TileCompletionsDoc {
    pub tile: String,
    pub cells: Vec<String>,
    pub boundary: Vec<String>,
    pub core: Vec<String>,
    pub table: Vec<CompletionDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorMapDoc {
    /// Completions are locally admissible; they need not extend globally.
    pub locally_admissible_only: bool,
    pub tiles: Vec<TileCompletionsDoc>,
}

impl FactorMapDoc {
    pub fn from_map(f: &FactorMap, tiles: &TileSet, x: &SftSpec) -> Self {
        let g = x.group();
        let a = x.alphabet();
        let names = |v: &[u32]| v.iter().map(|&s| a.name(s).to_string()).collect();
        FactorMapDoc {
            locally_admissible_only: true,
            tiles: f
                .tiles
                .iter()
                .map(|t| TileCompletionsDoc {
                    tile: format!("T{}", t.tile),
                    cells: words(g, &tiles.tiles()[t.tile - 1]),
                    boundary: words(g, &t.boundary),
                    core: words(g, &t.core),
                    table: t
                        .table
                        .iter()
                        .map(|(b, c)| CompletionDoc {
                            boundary: names(b),
                            completion: names(c),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodingEntryDoc {
    pub word: String,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodingDoc {
    pub group: Ref<GroupSpec>,
    pub alphabet: Vec<String>,
    pub coding: Vec<CodingEntryDoc>,
}

/// Outcome of resolving a pattern-coding document.
pub enum CodingOutcome {
    Pattern(Pattern),
    /// The two values written to `cell`.
    Clash {
        cell: String,
        first: String,
        second: String,
    },
}

impl CodingDoc {
    pub fn resolve(&self, base: &Path, budget: &Budget) -> Result<CodingOutcome> {
        let (spec, _) = self.group.load(base)?;
        let g = Group::with_budget(spec, budget)?;
        let a = Alphabet::new(self.alphabet.iter().cloned())?;
        let entries = self
            .coding
            .iter()
            .map(|e| Ok((g.parse_word(&e.word)?, a.symbol(&e.value)?)))
            .collect::<Result<_>>()?;
        Ok(match resolve_coding(&g, &PatternCoding { entries })? {
            Resolved::Pattern(p) => CodingOutcome::Pattern(p),
            Resolved::Inconsistent {
                cell,
                first,
                second,
            } => CodingOutcome::Clash {
                cell: word(&g, &cell),
                first: a.name(first).to_string(),
                second: a.name(second).to_string(),
            },
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternFileDoc {
    pub group: Ref<GroupSpec>,
    pub alphabet: Vec<String>,
    #[serde(flatten)]
    pub pattern: PatternDoc,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::snake_chart;
    use crate::sft::count_locally_admissible;
    use crate::sft::tests::{golden_mean, hard_square, rect};

    #[test]
    fn sft_round_trip() {
        let b = Budget::default();
        for x in [
            hard_square(),
            golden_mean(Arc::new(Group::new(GroupSpec::z()).unwrap())),
        ] {
            let json = sft_to_json(&x).unwrap();
            let doc: SftDoc = serde_json::from_str(&json).unwrap();
            let y = doc.build(Path::new("."), &b).unwrap();
            assert_eq!(y.forbidden(), x.forbidden());
            assert_eq!(y.alphabet(), x.alphabet());
        }
    }

    #[test]
    fn set_valued_and_string_values() {
        let json = r#"{"group": {"generators": ["a"], "oracle": {"kind": "free-abelian", "rank": 1}},
                       "alphabet": ["0", "1", "2"],
                       "forbidden": [{"support": ["1", "a"], "values": ["1", ["1", "2"]]}]}"#;
        let doc: SftDoc = serde_json::from_str(json).unwrap();
        let x = doc.build(Path::new("."), &Budget::default()).unwrap();
        let g = x.group();
        let f = Support::new((0..3).map(|i| g.from_coordinates(&[i]).unwrap()).collect());
        let brute = (0..27u32)
            .filter(|c| {
                let v = [c / 9, c / 3 % 3, c % 3];
                !(0..2).any(|i| v[i] == 1 && v[i + 1] >= 1)
            })
            .count();
        assert_eq!(
            count_locally_admissible(&x, &f, &Budget::default()).unwrap(),
            brute.into()
        );
    }

    #[test]
    fn unknown_generator_is_named() {
        let json = r#"{"group": {"generators": ["a"], "oracle": {"kind": "free-abelian", "rank": 1}},
                       "alphabet": ["0", "1"], "forbidden": [{"support": ["1", "q"], "values": ["1", "1"]}]}"#;
        let doc: SftDoc = serde_json::from_str(json).unwrap();
        let err = doc.build(Path::new("."), &Budget::default()).unwrap_err();
        assert!(err.to_string().contains('q'));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn chart_round_trip() {
        let ch = snake_chart().unwrap();
        let json = chart_to_json(&ch).unwrap();
        let doc: ChartDoc = serde_json::from_str(&json).unwrap();
        assert!(doc.h_group.is_none());
        let back = doc.build(Path::new("."), &Budget::default()).unwrap();
        assert_eq!(back.cocycle().entries(), ch.cocycle().entries());
        let b = Budget::default();
        let f = rect(ch.group(), 2, 2);
        assert_eq!(
            count_locally_admissible(back.sft(), &f, &b).unwrap(),
            count_locally_admissible(ch.sft(), &f, &b).unwrap()
        );
    }

    #[test]
    fn coding_clash() {
        let json = r#"{"group": {"generators": ["a"], "oracle": {"kind": "free-abelian", "rank": 1}},
                       "alphabet": ["0", "1"],
                       "coding": [{"word": "a", "value": "0"}, {"word": "a a a^-1", "value": "1"}]}"#;
        let doc: CodingDoc = serde_json::from_str(json).unwrap();
        match doc.resolve(Path::new("."), &Budget::default()).unwrap() {
            CodingOutcome::Clash {
                cell,
                first,
                second,
            } => {
                assert_eq!(
                    (cell.as_str(), first.as_str(), second.as_str()),
                    ("a^-1", "0", "1")
                );
            }
            CodingOutcome::Pattern(_) => panic!("expected a clash"),
        }
    }
}
