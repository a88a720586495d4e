//! Subshifts of finite type over finitely generated groups.

pub mod budget;
pub mod chart;
pub mod entropy;
pub mod error;
pub mod group;
pub mod io;
pub mod pattern;
pub mod reduction;
pub mod sft;
pub mod symbols;

pub use budget::Budget;
pub use chart::{
    chart_from_presentation, check_cocycle, embed, freeness_check, snake_chart, subgroup_chart,
    Chart, Cocycle, CocycleReport, EmbeddedShift, FreenessReport, FreenessScope,
};
pub use entropy::{
    estimate, exact_z, strip_lower_bound, EntropyRow, EntropyTrace, ExactEntropy, SubsetFamily,
};
pub use error::{Error, Result};
pub use group::{Ball, Element, Group, GroupSpec, Letter, Oracle};
pub use pattern::{
    resolve_coding, restrict, translate, Alphabet, Pattern, PatternCoding, Resolved, Support,
};
pub use reduction::{
    box_support, box_tiling, core, entropy_reducing_sft, overlay_sft, ExactTiling, FactorMap,
    Overlay, TileCompletions,
};
pub use sft::{
    count_locally_admissible, free_extension, full_shift, higher_power_shift,
    is_locally_admissible, locally_admissible, product_sft, snake_shift,
    snake_shift_without_cycles, tiling_sft, ForbiddenPattern, HigherPowerShift, SftSpec, TileSet,
    Window,
};
pub use symbols::{Symbol, SymbolSet};
