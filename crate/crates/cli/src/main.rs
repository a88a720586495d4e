use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;

use groupshift_core::chart::{self, FreenessScope};
use groupshift_core::entropy::{self, SubsetFamily};
use groupshift_core::io::{self, FactorMapDoc, PatternDoc};
use groupshift_core::reduction::{self, box_support};
use groupshift_core::{Budget, Chart, Error, Group, Result, SftSpec, Support, Window};

mod validate;

#[derive(Parser)]
#[command(
    name = "groupshift",
    version,
    about = "Subshifts of finite type over finitely generated groups"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Report elapsed times as 0 so outputs are byte-reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Report entropies in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
    /// Search-node budget per operation.
    #[arg(long, global = true, env = "GROUPSHIFT_BUDGET_NODES")]
    budget_nodes: Option<u64>,
    /// Maximum number of cached group elements.
    #[arg(long, global = true)]
    ball_cap: Option<usize>,
    /// Maximum number of patterns held in one list.
    #[arg(long, global = true)]
    max_patterns: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check documents.
    Validate {
        paths: Vec<PathBuf>,
        /// Group used to resolve bare supports, tile sets and tilings.
        #[arg(long)]
        group: Option<PathBuf>,
        /// Tile set used to resolve exact tilings.
        #[arg(long)]
        tiles: Option<PathBuf>,
    },
    #[command(subcommand)]
    Sft(SftCmd),
    #[command(subcommand)]
    Entropy(EntropyCmd),
    #[command(subcommand)]
    Chart(ChartCmd),
    #[command(subcommand)]
    Reduce(ReduceCmd),
}

#[derive(Args)]
struct WindowArgs {
    /// Window as a JSON list of words.
    #[arg(long, conflicts_with = "shape")]
    window: Option<PathBuf>,
    /// Box window `n1xn2x...` anchored at the identity (free abelian groups).
    #[arg(long = "box")]
    shape: Option<String>,
    /// Ball of this radius.
    #[arg(long, conflicts_with_all = ["window", "shape"])]
    ball: Option<usize>,
}

impl WindowArgs {
    fn resolve(&self, g: &Group) -> Result<Support> {
        if let Some(p) = &self.window {
            return io::load_support(p, g);
        }
        if let Some(b) = &self.shape {
            let dims = b
                .split('x')
                .map(|d| d.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Invalid(format!("bad box `{b}`")))?;
            if g.free_abelian_rank() != Some(dims.len()) {
                return Err(Error::Invalid(format!(
                    "box `{b}` does not match the group's rank"
                )));
            }
            return box_support(g, &dims);
        }
        if let Some(r) = self.ball {
            return Ok(Support::new(g.ball(r)?.elements));
        }
        Err(Error::Invalid("give --window, --box or --ball".into()))
    }
}

#[derive(Subcommand)]
enum SftCmd {
    /// Count locally admissible patterns on a window.
    Count {
        #[arg(long)]
        sft: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        /// Also print every pattern.
        #[arg(long)]
        list: bool,
    },
    /// Emit the SFT of all tilings by a tile set.
    Tiling {
        #[arg(long)]
        tiles: PathBuf,
        #[arg(long)]
        group: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum EntropyCmd {
    /// Monotone dyadic upper bounds h_n.
    Estimate {
        #[arg(long)]
        sft: PathBuf,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// `capped:<c>`, `balls`, or `windows:<file>` with a JSON list of word lists.
        #[arg(long, default_value = "capped:12")]
        family: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Exact entropy of a Z-SFT.
    ExactZ {
        #[arg(long)]
        sft: PathBuf,
        #[arg(long, default_value_t = 1)]
        memory: usize,
    },
    /// Strip transfer-matrix value for a nearest-neighbour Z^2-SFT.
    StripBound {
        #[arg(long)]
        sft: PathBuf,
        #[arg(long)]
        width: usize,
    },
}

#[derive(Args)]
struct ChartArgs {
    #[arg(long, required_unless_present = "snake")]
    chart: Option<PathBuf>,
    /// Use the built-in snake chart.
    #[arg(long)]
    snake: bool,
}

impl ChartArgs {
    fn load(&self, budget: &Budget) -> Result<Chart> {
        match &self.chart {
            Some(p) => io::load_chart(p, budget),
            None => chart::snake_chart(),
        }
    }
}

#[derive(Subcommand)]
enum ChartCmd {
    /// Emit the embedding SFT of an H-shift along a chart.
    Embed {
        #[command(flatten)]
        chart: ChartArgs,
        /// The H-shift; its group must be the chart's acting group.
        #[arg(long)]
        y: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check table totality, inverse cancellation and the cocycle equation.
    CheckCocycle {
        #[command(flatten)]
        chart: ChartArgs,
        #[arg(long, default_value_t = 2)]
        radius: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for short H-words fixing a cell.
    Freeness {
        #[command(flatten)]
        chart: ChartArgs,
        #[command(flatten)]
        window: WindowArgs,
        /// JSON list of patterns to check instead of a window.
        #[arg(long)]
        patterns: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
    },
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// The K-core of a finite set.
    Core {
        #[arg(long)]
        group: PathBuf,
        /// JSON list of words.
        #[arg(long)]
        set: PathBuf,
        #[arg(long = "K")]
        k: PathBuf,
    },
    /// Forbid every window pattern outside a sample language.
    Language {
        #[arg(long)]
        sft: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        /// Exact tiling whose patterns form the sample (with --tiles).
        #[arg(long, requires = "tiles", conflicts_with = "sample")]
        tiling: Option<PathBuf>,
        #[arg(long)]
        tiles: Option<PathBuf>,
        /// JSON list of patterns forming the sample.
        #[arg(long)]
        sample: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Overlay an SFT with tilings, pinning tile cores to their addresses.
    Overlay {
        #[arg(long)]
        sft: PathBuf,
        #[arg(long)]
        tiles: PathBuf,
        /// SFT constraining the tiling layer.
        #[arg(long)]
        tiling: PathBuf,
        #[arg(long = "K")]
        k: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the factor map table.
        #[arg(long)]
        factor_map: Option<PathBuf>,
    },
}

struct Ctx {
    budget: Budget,
    no_timing: bool,
    bits: bool,
}

impl Ctx {
    fn num(&self, nats: f64) -> String {
        let v = if self.bits {
            nats * std::f64::consts::LOG2_E
        } else {
            nats
        };
        format!("{v:.9}")
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(p) => Ok(fs::write(p, text)?),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn names(x: &SftSpec, values: &[u32]) -> String {
    values
        .iter()
        .map(|&s| x.alphabet().name(s))
        .collect::<Vec<_>>()
        .join(" ")
}

fn load_patterns(path: &Path, x: &SftSpec) -> Result<Vec<groupshift_core::Pattern>> {
    let docs: Vec<PatternDoc> = serde_json::from_value(io::read_json(path)?)?;
    docs.iter()
        .map(|d| d.to_pattern(x.group(), x.alphabet()))
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    let mut budget = Budget::from_env()?;
    if let Some(n) = cli.budget_nodes {
        budget.nodes = n;
    }
    if let Some(c) = cli.ball_cap {
        budget.ball_cap = c;
    }
    if let Some(p) = cli.max_patterns {
        budget.patterns = p;
    }
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let ctx = Ctx {
        budget,
        no_timing: cli.no_timing,
        bits: cli.bits,
    };
    let b = &ctx.budget;
    match cli.command {
        Command::Validate {
            paths,
            group,
            tiles,
        } => validate::run(&paths, group.as_deref(), tiles.as_deref(), b),
        Command::Sft(SftCmd::Count { sft, window, list }) => {
            let x = io::load_sft(&sft, b)?;
            let f = window.resolve(x.group())?;
            let w = Window::new(&x, &f)?;
            println!("{}", w.count(b)?);
            if list {
                for p in w.enumerate(b)? {
                    println!("{}", names(&x, &p));
                }
            }
            Ok(())
        }
        Command::Sft(SftCmd::Tiling {
            tiles,
            group,
            output,
        }) => {
            let g = io::load_group(&group, b)?;
            let t = io::load_tiles(&tiles, &g)?;
            emit(
                &output,
                &io::sft_to_json(&groupshift_core::tiling_sft(g, &t)?)?,
            )
        }
        Command::Entropy(EntropyCmd::Estimate {
            sft,
            n_max,
            family,
            csv,
        }) => {
            let x = io::load_sft(&sft, b)?;
            let fam = match family.strip_prefix("windows:") {
                Some(file) => {
                    let lists: Vec<Vec<String>> =
                        serde_json::from_value(io::read_json(Path::new(file))?)?;
                    SubsetFamily::Windows(
                        lists
                            .iter()
                            .map(|l| {
                                let refs: Vec<&str> = l.iter().map(String::as_str).collect();
                                Support::from_words(x.group(), &refs)
                            })
                            .collect::<Result<_>>()?,
                    )
                }
                None => family.parse()?,
            };
            let mut trace = entropy::estimate(&x, n_max, &fam, b)?;
            if ctx.no_timing {
                trace.rows.iter_mut().for_each(|r| r.ms = 0);
            }
            let text = trace.to_csv(ctx.bits);
            match csv {
                Some(p) => Ok(fs::write(p, text)?),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Entropy(EntropyCmd::ExactZ { sft, memory }) => {
            let x = io::load_sft(&sft, b)?;
            let e = entropy::exact_z(&x, memory, b)?;
            println!("{}", ctx.num(e.entropy));
            eprintln!(
                "states {} transitions {} spectral radius {:.12}{}",
                e.states,
                e.transitions,
                e.spectral_radius,
                if e.empty { " (empty subshift)" } else { "" }
            );
            Ok(())
        }
        Command::Entropy(EntropyCmd::StripBound { sft, width }) => {
            let x = io::load_sft(&sft, b)?;
            println!("{}", ctx.num(entropy::strip_lower_bound(&x, width, b)?));
            Ok(())
        }
        Command::Chart(ChartCmd::Embed { chart, y, output }) => {
            let ch = chart.load(b)?;
            let yx = io::load_sft(&y, b)?;
            let e = chart::embed(&yx, &ch, b)?;
            eprintln!(
                "{} transported rules, {} cells visited",
                e.transported_rules,
                e.visited.len()
            );
            emit(&output, &io::sft_to_json(&e.sft)?)
        }
        Command::Chart(ChartCmd::CheckCocycle {
            chart,
            radius,
            samples,
            seed,
        }) => {
            let ch = chart.load(b)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let r = chart::check_cocycle(&ch, radius, samples, &mut rng, b)?;
            println!("table entries {}", r.table_entries);
            println!("samples {}", r.samples);
            println!("missing entries {}", r.missing_entries);
            println!(
                "inverse checks {} failures {}",
                r.inverse_checks, r.inverse_failures
            );
            println!(
                "cocycle checks {} failures {}",
                r.equation_checks, r.equation_failures
            );
            if r.ok() {
                Ok(())
            } else {
                Err(Error::Invalid("cocycle check failed".into()))
            }
        }
        Command::Chart(ChartCmd::Freeness {
            chart,
            window,
            patterns,
            max_len,
        }) => {
            let ch = chart.load(b)?;
            let (scope, label) = match (&patterns, window.ball) {
                (Some(p), _) => (
                    FreenessScope::Patterns(load_patterns(p, ch.sft())?),
                    "given patterns".to_string(),
                ),
                (None, Some(r)) => (FreenessScope::Ball(r), format!("ball {r}")),
                (None, None) => (
                    FreenessScope::Window(window.resolve(ch.group())?),
                    "window".to_string(),
                ),
            };
            let r = chart::freeness_check(&ch, &scope, max_len, b)?;
            let h = ch.cocycle().h_group();
            println!("{} patterns, {} nontrivial words", r.patterns, r.words);
            for v in &r.violations {
                println!(
                    "word `{}` fixes `{}` under [{}]",
                    h.format_word(&v.word),
                    io::word(ch.group(), &v.base),
                    names(
                        ch.sft(),
                        &v.pattern.iter().map(|(_, s)| s).collect::<Vec<_>>()
                    )
                );
            }
            println!("{}", r.summary(&label));
            Ok(())
        }
        Command::Reduce(ReduceCmd::Core { group, set, k }) => {
            let g = io::load_group(&group, b)?;
            let c = reduction::core(&io::load_support(&set, &g)?, &io::load_support(&k, &g)?, &g)?;
            println!("{}", serde_json::to_string(&io::words(&g, &c))?);
            Ok(())
        }
        Command::Reduce(ReduceCmd::Language {
            sft,
            window,
            tiling,
            tiles,
            sample,
            output,
        }) => {
            let x = io::load_sft(&sft, b)?;
            let d = window.resolve(x.group())?;
            let sample = match (tiling, tiles, sample) {
                (Some(tau), Some(t), None) => {
                    let tiles = io::load_tiles(&t, x.group())?;
                    io::load_exact_tiling(&tau, x.group().clone(), tiles)?.language(&d)?
                }
                (None, None, Some(s)) => load_patterns(&s, &x)?,
                _ => {
                    return Err(Error::Invalid(
                        "give either --tiling with --tiles, or --sample".into(),
                    ))
                }
            };
            eprintln!("{} sample patterns", sample.len());
            emit(
                &output,
                &io::sft_to_json(&reduction::entropy_reducing_sft(&x, &d, &sample, b)?)?,
            )
        }
        Command::Reduce(ReduceCmd::Overlay {
            sft,
            tiles,
            tiling,
            k,
            output,
            factor_map,
        }) => {
            let x = io::load_sft(&sft, b)?;
            let g: Arc<Group> = x.group().clone();
            let t = io::load_tiles(&tiles, &g)?;
            let tc = io::load_sft(&tiling, b)?;
            let ov = reduction::overlay_sft(&x, &t, &tc, &io::load_support(&k, &g)?, b)?;
            if let Some(p) = factor_map {
                fs::write(
                    p,
                    serde_json::to_string_pretty(&FactorMapDoc::from_map(&ov.factor, &t, &x))?,
                )?;
            }
            emit(&output, &io::sft_to_json(&ov.sft)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
