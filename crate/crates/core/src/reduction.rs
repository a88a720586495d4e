//! `K`-cores, entropy-reducing SFTs, periodic tilings of `ℤ^d`, and the
//! overlay of an SFT with a tiling that pins tile cores to their addresses.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::group::{adjugate, apply, Element, Group};
use crate::pattern::{Alphabet, Pattern, Support};
use crate::sft::{lift_left, lift_right, ForbiddenPattern, SftSpec, TileSet, Window};
use crate::symbols::{Symbol, SymbolSet};

/// `{t ∈ T : K·t ⊆ T}`.
pub fn core(t: &Support, k: &Support, g: &Group) -> Result<Support> {
    let mut out = Vec::new();
    'cells: for c in t.cells() {
        for x in k.cells() {
            if !t.contains(&g.multiply(x, c)?) {
                continue 'cells;
            }
        }
        out.push(c.clone());
    }
    Ok(Support::new(out))
}

/// `|K·T Δ T|`.
pub fn invariance_defect(t: &Support, k: &Support, g: &Group) -> Result<usize> {
    let mut kt = BTreeSet::new();
    for x in k.cells() {
        for c in t.cells() {
            kt.insert(g.multiply(x, c)?);
        }
    }
    let inside = kt.iter().filter(|c| t.contains(c)).count();
    Ok(kt.len() - inside + t.len() - inside)
}

/// `x` with every pattern on `d` outside `sample` forbidden.
pub fn entropy_reducing_sft(
    x: &SftSpec,
    d: &Support,
    sample: &[Pattern],
    budget: &Budget,
) -> Result<SftSpec> {
    let k = x.alphabet().len();
    let total = (k as u128)
        .checked_pow(d.len() as u32)
        .filter(|&t| t <= budget.patterns as u128)
        .ok_or_else(|| {
            Error::limit(format!(
                "{k}^{} patterns on the window exceed the pattern budget",
                d.len()
            ))
        })? as usize;
    let mut keep = HashSet::new();
    for p in sample {
        if p.support() != d {
            return Err(Error::SupportMismatch);
        }
        keep.insert(p.iter().map(|(_, s)| s).collect::<Vec<_>>());
    }
    let mut rules = x.forbidden().to_vec();
    let mut values = vec![0 as Symbol; d.len()];
    for code in 0..total {
        let mut c = code;
        for v in values.iter_mut().rev() {
            *v = (c % k) as Symbol;
            c /= k;
        }
        if !keep.contains(&values) {
            rules.push(ForbiddenPattern::from_pattern(
                &Pattern::on(d.clone(), values.clone()),
                k,
            ));
        }
    }
    SftSpec::new(x.group().clone(), x.alphabet().clone(), rules)
}

/// A periodic tiling of `ℤ^d`: tile `tile` centred at `at + L` for each
/// placement, where `L` is the lattice spanned by `lattice`.
#[derive(Clone, Debug)]
pub struct ExactTiling {
    group: Arc<Group>,
    tiles: TileSet,
    lattice: Vec<Vec<i64>>,
    placements: Vec<(usize, Vec<i64>)>,
    adj: Vec<Vec<i64>>,
    det: i64,
    tile_coords: Vec<Vec<Vec<i64>>>,
}

impl ExactTiling {
    /// Fails unless the placed tiles cover each class of `ℤ^d / L` exactly once.
    pub fn new(
        group: Arc<Group>,
        tiles: TileSet,
        lattice: Vec<Vec<i64>>,
        placements: Vec<(usize, Vec<i64>)>,
    ) -> Result<Self> {
        let d = group
            .free_abelian_rank()
            .ok_or_else(|| Error::invalid("exact tilings need a free abelian group"))?;
        if lattice.len() != d || lattice.iter().any(|v| v.len() != d) {
            return Err(Error::invalid(format!(
                "the period lattice needs {d} vectors of length {d}"
            )));
        }
        let basis: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| lattice[j][i]).collect())
            .collect();
        let (adj, det) = adjugate(&basis);
        if det == 0 {
            return Err(Error::invalid("period lattice is degenerate"));
        }
        let tile_coords = tiles
            .tiles()
            .iter()
            .map(|t| {
                t.cells()
                    .iter()
                    .map(|c| Ok(group.coordinates(c)?.expect("free abelian")))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let tiling = ExactTiling {
            group,
            tiles,
            lattice,
            placements,
            adj,
            det: det as i64,
            tile_coords,
        };
        let mut covered: Vec<Vec<i64>> = Vec::new();
        for (i, at) in &tiling.placements {
            if *i >= tiling.tiles.len() || at.len() != d {
                return Err(Error::invalid(
                    "placement names an unknown tile or has the wrong dimension",
                ));
            }
            for t in &tiling.tile_coords[*i] {
                covered.push(add(at, t));
            }
        }
        if covered.len() as i64 != tiling.det.abs() {
            return Err(Error::invalid(format!(
                "placed tiles cover {} cells but a fundamental domain has {}",
                covered.len(),
                tiling.det.abs()
            )));
        }
        for (a, u) in covered.iter().enumerate() {
            for v in &covered[..a] {
                if tiling.in_lattice(&sub(u, v)) {
                    return Err(Error::invalid(format!(
                        "placed tiles overlap at {u:?} and {v:?}"
                    )));
                }
            }
        }
        Ok(tiling)
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn tiles(&self) -> &TileSet {
        &self.tiles
    }

    pub fn lattice(&self) -> &[Vec<i64>] {
        &self.lattice
    }

    pub fn placements(&self) -> &[(usize, Vec<i64>)] {
        &self.placements
    }

    fn in_lattice(&self, v: &[i64]) -> bool {
        apply(&self.adj, v).iter().all(|x| x % self.det == 0)
    }

    /// Tiling symbol at a point of `ℤ^d`.
    pub fn symbol_at(&self, v: &[i64]) -> Symbol {
        self.placements
            .iter()
            .find(|(_, at)| self.in_lattice(&sub(v, at)))
            .map_or(0, |(i, _)| TileSet::symbol(*i))
    }

    /// The tiling shifted by `t`, read on `support`: `p(f) = τ(f·t)`.
    pub fn pattern_on(&self, support: &Support, t: &[i64]) -> Result<Pattern> {
        let values = support
            .cells()
            .iter()
            .map(
                |c| Ok(self.symbol_at(&add(&self.group.coordinates(c)?.expect("free abelian"), t))),
            )
            .collect::<Result<Vec<_>>>()?;
        Ok(Pattern::on(support.clone(), values))
    }

    /// Distinct patterns of all shifts of the tiling on `support`, sorted.
    pub fn language(&self, support: &Support) -> Result<Vec<Pattern>> {
        let mut out = BTreeSet::new();
        for (i, at) in &self.placements {
            for t in &self.tile_coords[*i] {
                out.insert(
                    self.pattern_on(support, &add(at, t))?
                        .iter()
                        .map(|(_, s)| s)
                        .collect::<Vec<_>>(),
                );
            }
        }
        Ok(out
            .into_iter()
            .map(|v| Pattern::on(support.clone(), v))
            .collect())
    }
}

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// The box `[0, n₁) × … × [0, n_d)` as a support.
pub fn box_support(g: &Group, dims: &[usize]) -> Result<Support> {
    let mut cells = vec![Vec::new()];
    for &n in dims {
        cells = cells
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (0..n as i64).map(move |i| {
                    let mut w = v.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    Ok(Support::new(
        cells
            .iter()
            .map(|v| g.from_coordinates(v))
            .collect::<Result<_>>()?,
    ))
}

/// Tiling of `ℤ^d` by translates of one box along the box lattice.
pub fn box_tiling(group: Arc<Group>, dims: &[usize]) -> Result<ExactTiling> {
    let tile = box_support(&group, dims)?;
    let d = dims.len();
    let lattice = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { dims[i] as i64 } else { 0 })
                .collect()
        })
        .collect();
    ExactTiling::new(
        group,
        TileSet::new(vec![tile])?,
        lattice,
        vec![(0, vec![0; d])],
    )
}

/// Boundary-to-completion table of one tile.
#[derive(Clone, Debug)]
pub struct TileCompletions {
    pub tile: usize,
    pub boundary: Support,
    pub core: Support,
    /// Boundary values (in boundary order) to values on the whole tile.
    pub table: BTreeMap<Vec<Symbol>, Vec<Symbol>>,
}

/// For each tile and locally admissible boundary pattern, the first locally
/// admissible completion on the whole tile. Local admissibility stands in for
/// membership in the language, so a completion need not extend globally.
#[derive(Clone, Debug)]
pub struct FactorMap {
    pub tiles: Vec<TileCompletions>,
}

/// Overlay SFT on `(𝒯 ∪ {∅}) × (Σ ∪ U)` with its factor map.
#[derive(Clone, Debug)]
pub struct Overlay {
    pub sft: SftSpec,
    pub factor: FactorMap,
    pub base: SftSpec,
    pub tiles: TileSet,
    pub addresses: Support,
}

impl Overlay {
    fn layer_len(&self) -> usize {
        self.base.alphabet().len() + self.addresses.len()
    }

    /// Index of `(tile symbol, layer symbol)`.
    pub fn symbol(&self, tile: Symbol, layer: Symbol) -> Symbol {
        tile * self.layer_len() as Symbol + layer
    }

    pub fn split(&self, s: Symbol) -> (Symbol, Symbol) {
        let k = self.layer_len() as Symbol;
        (s / k, s % k)
    }

    /// Layer symbol naming the tile cell `c`.
    pub fn address(&self, c: &Element) -> Option<Symbol> {
        self.addresses
            .position(c)
            .map(|i| (self.base.alphabet().len() + i) as Symbol)
    }

    /// Applies the factor map to every tile lying entirely inside `p`.
    pub fn factor(&self, p: &Pattern) -> Result<Pattern> {
        let g = self.sft.group();
        let sigma = self.base.alphabet().len() as Symbol;
        let mut out: BTreeMap<Element, Symbol> = BTreeMap::new();
        for (cell, s) in p.iter() {
            let (tile, _) = self.split(s);
            if tile == 0 {
                continue;
            }
            let entry = &self.factor.tiles[tile as usize - 1];
            let shape = &self.tiles.tiles()[tile as usize - 1];
            let placed: Vec<Element> = shape
                .cells()
                .iter()
                .map(|c| g.multiply(c, cell))
                .collect::<Result<_>>()?;
            if placed.iter().any(|c| p.get(c).is_none()) {
                continue;
            }
            let mut boundary = Vec::with_capacity(entry.boundary.len());
            for c in entry.boundary.cells() {
                let (_, layer) = self.split(p.get(&g.multiply(c, cell)?).expect("inside"));
                if layer >= sigma {
                    return Err(Error::invalid("a boundary cell carries an address"));
                }
                boundary.push(layer);
            }
            let completion = entry
                .table
                .get(&boundary)
                .ok_or_else(|| Error::NoCompletion {
                    tile: tile as usize,
                    boundary: names(self.base.alphabet(), &boundary),
                })?;
            for (c, v) in placed.into_iter().zip(completion) {
                if out.insert(c, *v).is_some() {
                    return Err(Error::invalid("tiles overlap"));
                }
            }
        }
        let (cells, values) = out.into_iter().unzip();
        Pattern::new(cells, values)
    }
}

fn names(a: &Alphabet, v: &[Symbol]) -> String {
    let n: Vec<&str> = v.iter().map(|&s| a.name(s)).collect();
    format!("[{}]", n.join(", "))
}

/// Overlay of `x` with tilings constrained by `tiling`: core cells (for `k`)
/// of each placed tile carry their own address, other covered cells carry
/// symbols of `x`.
pub fn overlay_sft(
    x: &SftSpec,
    tiles: &TileSet,
    tiling: &SftSpec,
    k: &Support,
    budget: &Budget,
) -> Result<Overlay> {
    let g = x.group();
    if !tiling.group().spec().same_group(g.spec()) {
        return Err(Error::invalid(
            "the tiling constraints live on a different group",
        ));
    }
    if tiling.alphabet() != &tiles.alphabet() {
        return Err(Error::invalid(
            "the tiling constraints do not use the tile alphabet",
        ));
    }
    let f = x.forbidden_union();
    for a in f.cells() {
        for b in f.cells() {
            let d = g.multiply(a, &g.invert(b)?)?;
            if !k.contains(&d) {
                return Err(Error::invalid(format!(
                    "K must contain F F^-1; it misses `{}`",
                    g.format(&d)
                )));
            }
        }
    }
    let addresses = tiles.union();
    let sigma = x.alphabet().len();
    let k1 = tiles.len() + 1;
    let k2 = sigma + addresses.len();
    let mut layer_names: Vec<String> = x.alphabet().names().to_vec();
    for c in addresses.cells() {
        let w = if c.is_identity() {
            "1".to_string()
        } else {
            g.format(c)
        };
        layer_names.push(format!("@{w}"));
    }
    let layer = Alphabet::new(layer_names)?;
    let address_set = SymbolSet::from_iter(k2, sigma as Symbol..k2 as Symbol);
    let mut rules: Vec<ForbiddenPattern> = tiling
        .forbidden()
        .iter()
        .map(|r| r.map_sets(|s| lift_left(s, k1, k2)))
        .collect();
    rules.extend(
        x.forbidden()
            .iter()
            .map(|r| r.map_sets(|s| lift_right(s, k1, k2))),
    );
    let meter = budget.meter("factor map");
    let mut completions = Vec::new();
    for (i, t) in tiles.tiles().iter().enumerate() {
        let here = lift_left(&SymbolSet::singleton(k1, TileSet::symbol(i)), k1, k2);
        let core_cells = core(t, k, g)?;
        for c in t.cells() {
            let other = if core_cells.contains(c) {
                let own = (sigma + addresses.position(c).expect("in union")) as Symbol;
                let mut s = SymbolSet::full(k2);
                s.remove(own);
                s
            } else {
                address_set.clone()
            };
            rules.extend(ForbiddenPattern::new(vec![
                (Element::identity(), here.clone()),
                (c.clone(), lift_right(&other, k1, k2)),
            ]));
        }
        let boundary = Support::new(
            t.cells()
                .iter()
                .filter(|c| !core_cells.contains(c))
                .cloned()
                .collect(),
        );
        let whole = Window::new(x, t)?;
        let idx: Vec<usize> = boundary
            .cells()
            .iter()
            .map(|c| t.position(c).expect("in tile"))
            .collect();
        let mut table = BTreeMap::new();
        for b in Window::new(x, &boundary)?.enumerate(budget)? {
            let mut domains = vec![SymbolSet::full(sigma); t.len()];
            for (&j, &v) in idx.iter().zip(&b) {
                domains[j] = SymbolSet::singleton(sigma, v);
            }
            let completion =
                whole
                    .first_within(&domains, &meter)?
                    .ok_or_else(|| Error::NoCompletion {
                        tile: i + 1,
                        boundary: names(x.alphabet(), &b),
                    })?;
            table.insert(b, completion);
        }
        completions.push(TileCompletions {
            tile: i + 1,
            boundary,
            core: core_cells,
            table,
        });
    }
    let sft = SftSpec::new(g.clone(), tiles.alphabet().product(&layer), rules)?;
    Ok(Overlay {
        sft,
        factor: FactorMap { tiles: completions },
        base: x.clone(),
        tiles: tiles.clone(),
        addresses,
    })
}
