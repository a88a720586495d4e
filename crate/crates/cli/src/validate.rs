//! `validate`: recognise each document by its keys, build it, report.

use std::path::Path;
use std::sync::Arc;

use serde_json::Value;

use groupshift_core::io::{
    self, ChartDoc, CodingDoc, CodingOutcome, ExactTilingDoc, PatternFileDoc, SftDoc,
};
use groupshift_core::sft::TileSetDoc;
use groupshift_core::{Alphabet, Budget, Error, Group, GroupSpec, Result, TileSet};

fn has(v: &Value, key: &str) -> bool {
    v.get(key).is_some()
}

fn check(
    path: &Path,
    group: Option<&Path>,
    tiles: Option<&Path>,
    budget: &Budget,
) -> Result<String> {
    let v = io::read_json(path)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let need_group = || -> Result<Arc<Group>> {
        let g = group.ok_or_else(|| Error::Invalid("this document needs --group".into()))?;
        io::load_group(g, budget)
    };
    if v.is_array() {
        let g = need_group()?;
        let s = io::load_support(path, &g)?;
        return Ok(format!("support with {} cells", s.len()));
    }
    if has(&v, "oracle") {
        let spec: GroupSpec = serde_json::from_value(v)?;
        let g = Group::with_budget(spec, budget)?;
        for r in g.relators()? {
            if !g.wp_decide(&r)? {
                return Err(Error::Invalid(format!(
                    "relator `{}` is not trivial",
                    g.format_word(&r)
                )));
            }
        }
        return Ok(format!(
            "group with {} generators",
            g.generator_names().len()
        ));
    }
    if has(&v, "table") {
        let doc: ChartDoc = serde_json::from_value(v)?;
        let ch = doc.build(base, budget)?;
        return Ok(format!(
            "chart with window of {} cells and {} table entries",
            ch.cocycle().window().len(),
            ch.cocycle().entries().len()
        ));
    }
    if has(&v, "coding") {
        let doc: CodingDoc = serde_json::from_value(v)?;
        return Ok(match doc.resolve(base, budget)? {
            CodingOutcome::Pattern(p) => format!("pattern coding with {} cells", p.support().len()),
            CodingOutcome::Clash {
                cell,
                first,
                second,
            } => {
                eprintln!(
                    "warning: {}: inconsistent coding: cell `{cell}` gets `{first}` and `{second}`",
                    path.display()
                );
                "pattern coding (inconsistent)".to_string()
            }
        });
    }
    if has(&v, "values") && has(&v, "group") {
        let doc: PatternFileDoc = serde_json::from_value(v)?;
        let (spec, _) = doc.group.load(base)?;
        let g = Group::with_budget(spec, budget)?;
        let p = doc
            .pattern
            .to_pattern(&g, &Alphabet::new(doc.alphabet.iter().cloned())?)?;
        return Ok(format!("pattern with {} cells", p.support().len()));
    }
    if has(&v, "alphabet") && has(&v, "group") {
        let doc: SftDoc = serde_json::from_value(v)?;
        let x = doc.build(base, budget)?;
        return Ok(format!(
            "sft with {} symbols and {} forbidden patterns",
            x.alphabet().len(),
            x.forbidden().len()
        ));
    }
    if has(&v, "tiles") {
        let doc: TileSetDoc = serde_json::from_value(v)?;
        let g = need_group()?;
        let t = TileSet::from_doc(&g, &doc)?;
        return Ok(format!("tile set with {} tiles", t.len()));
    }
    if has(&v, "lattice") {
        let doc: ExactTilingDoc = serde_json::from_value(v)?;
        let g = need_group()?;
        let t = tiles.ok_or_else(|| Error::Invalid("an exact tiling needs --tiles".into()))?;
        let set = io::load_tiles(t, &g)?;
        let tau = doc.build(g, set)?;
        return Ok(format!(
            "exact tiling with {} placements",
            tau.placements().len()
        ));
    }
    Err(Error::Invalid("unrecognised document".into()))
}

/// Checks every path; the first failure decides the exit code.
pub fn run(
    paths: &[std::path::PathBuf],
    group: Option<&Path>,
    tiles: Option<&Path>,
    budget: &Budget,
) -> Result<()> {
    let mut first_err = None;
    for p in paths {
        match check(p, group, tiles, budget) {
            Ok(msg) => println!("ok {}: {msg}", p.display()),
            Err(e) => {
                println!("FAIL {}: {e}", p.display());
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
