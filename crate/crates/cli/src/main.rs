use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use phylosemi::acceptance::{self, AcceptanceConfig};
use phylosemi::cube::{classify_cell, is_normal, sweep};
use phylosemi::oracle::{self, OracleError};
use phylosemi::relations::unit_cube_graver;
use phylosemi::rewrite::{decompose_relation, factor_weighting, RewriteError};
use phylosemi::tree::{classify_leaves, is_admissible, merge, parse_tree_input, write_tree_input, LeafWeights, TreeInput, WeightedTree};
use phylosemi::weighting::{SemigroupSpec, Verdict, Weighting};
use phylosemi::{Level, Variant};

#[derive(Parser)]
#[command(name = "phylosemi", version, about = "Graded semigroups of weighted trivalent trees: membership, factorization, relation certificates and brute-force checks")]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true, env = "PHYLOSEMI_JOBS")]
    jobs: Option<usize>,
    /// Output style.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Weightings of the full tree with the parity condition.
    S,
    /// Halved weightings of the clipped tree.
    U,
}

#[derive(Args)]
struct SpecArgs {
    /// Tree file (`edge`, `r` and `level` lines).
    #[arg(long)]
    tree: PathBuf,
    /// Level bound, overriding the file; `inf` for none.
    #[arg(long)]
    level: Option<Level>,
    /// Uniform leaf weight, overriding the file.
    #[arg(long)]
    uniform_r: Option<u64>,
    #[arg(long, value_enum, default_value_t = VariantArg::S)]
    variant: VariantArg,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a tree file and print its canonical form, leaf pairing and admissibility.
    Parse { path: PathBuf },
    /// Membership test: triangle inequalities, parity, leaf grades and level at every trinode.
    Member {
        #[command(flatten)]
        spec: SpecArgs,
        /// Weighting file (`w <u> <v> <value>` lines and `degree <k>`).
        #[arg(long)]
        weighting: PathBuf,
    },
    /// Unit-cube cells of the triangle cone and their catalog of lattice types.
    #[command(subcommand)]
    Cell(CellCommand),
    /// Relations among the vertices of the unit cube.
    #[command(subcommand)]
    Relations(RelationsCommand),
    /// Factor a weighting into degree-one members by local floor/ceiling choices and gluing.
    Factorize {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        weighting: PathBuf,
    },
    /// Certificate rewriting one factorization into another by quadric and cubic moves.
    Decompose {
        #[command(flatten)]
        spec: SpecArgs,
        /// Left side: degree-one weightings, each introduced by `factor <tag>`.
        #[arg(long)]
        lhs: PathBuf,
        /// Right side, same format.
        #[arg(long)]
        rhs: PathBuf,
    },
    /// List all members of one degree.
    Enumerate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(short, long)]
        k: u64,
    },
    /// Hilbert function: member counts per degree.
    Hilbert {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 4)]
        k_max: u64,
    },
    /// Degree-one generation: compares each graded piece with the sumset of degree-one members.
    CheckGen1 {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 3)]
        k_max: u64,
    },
    /// Degrees of minimal relations, by fiber connectivity under lower-degree moves.
    MarkovBound {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Largest allowed number of degree-one members.
        #[arg(long, default_value_t = oracle::MARKOV_S1_CAP)]
        cap: usize,
    },
    /// Good trees (no lone leaf); with a level, cross-checks degree-one generation for unit leaf weights.
    GoodTree {
        #[arg(long)]
        tree: PathBuf,
        /// Level L; the check uses the semigroup of level 2L.
        #[arg(long)]
        level: Option<u64>,
        #[arg(long, default_value_t = 3)]
        k_max: u64,
    },
    /// Odd levels: degree-one generation against obstructions outside the integral hull.
    OddLevel {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 3)]
        k_max: u64,
    },
    /// Search for a degree-3 weighting whose only two factorizations differ by the degenerated Segre cubic.
    FindSegre {
        #[arg(long, default_value_t = 9)]
        max_leaves: usize,
    },
    /// Join two weighted trees by a zero-weight bridge between subdivided edges.
    Merge {
        #[arg(long)]
        tree_a: PathBuf,
        #[arg(long)]
        weighting_a: PathBuf,
        /// Edge of the first tree as `u,v`.
        #[arg(long)]
        edge_a: String,
        #[arg(long)]
        tree_b: PathBuf,
        #[arg(long)]
        weighting_b: PathBuf,
        #[arg(long)]
        edge_b: String,
    },
    /// Run the acceptance suite, one line per criterion.
    Acceptance {
        /// Run every criterion.
        #[arg(long, conflicts_with = "criterion")]
        all: bool,
        /// Run a single criterion (1-10).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=10))]
        criterion: Option<u8>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        relations: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum CellCommand {
    /// Classify the cell based at `m` under a trinode sum bound.
    Classify {
        /// Base point as `m1,m2,m3`.
        #[arg(long, value_parser = parse_triple)]
        m: [i64; 3],
        /// Bound on the trinode sum of a cell point; `inf` for none.
        #[arg(long, default_value = "inf")]
        level: Level,
    },
    /// Census of all cells with base in `[0, max]^3`.
    Sweep {
        #[arg(long, default_value_t = 6)]
        max: i64,
        #[arg(long, value_delimiter = ',', default_value = "inf,4,8,12")]
        levels: Vec<Level>,
        /// Dilation degree up to which normality is checked.
        #[arg(long, default_value_t = 4)]
        degree: u64,
    },
}

#[derive(Subcommand)]
enum RelationsCommand {
    /// The twelve quadrics and eight cubics of the unit cube.
    Cube,
}

/// Outcome of a subcommand: the report and whether it found an obstruction.
struct Report {
    text: String,
    obstruction: bool,
}

impl Report {
    fn ok(text: String) -> Self {
        Report { text, obstruction: false }
    }

    fn obstruction(text: String) -> Self {
        Report { text, obstruction: true }
    }
}

fn parse_triple(text: &str) -> Result<[i64; 3], String> {
    let parts: Vec<i64> = text
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad integer `{x}`")))
        .collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| "expected three comma-separated integers".to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_tree(path: &Path) -> Result<TreeInput> {
    parse_tree_input(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_spec(args: &SpecArgs) -> Result<SemigroupSpec> {
    let input = load_tree(&args.tree)?;
    let tree = Arc::new(input.tree);
    let r = match (args.uniform_r, input.r) {
        (Some(w), _) => LeafWeights::uniform(&tree, w),
        (None, Some(r)) => r,
        (None, None) => bail!("{} has no leaf weights; pass --uniform-r", args.tree.display()),
    };
    let level = args.level.or(input.level).unwrap_or(Level::Infinite);
    let variant = match args.variant {
        VariantArg::S => Variant::S,
        VariantArg::U => Variant::U,
    };
    Ok(SemigroupSpec::new(tree, r, level, variant)?)
}

fn load_weighting(spec: &SemigroupSpec, path: &Path) -> Result<Weighting> {
    spec.parse_weighting(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_factors(spec: &SemigroupSpec, path: &Path) -> Result<Vec<Weighting>> {
    let blocks = spec
        .parse_weighting_blocks(&read(path)?)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(blocks.into_iter().map(|(_, w)| w).collect())
}

fn format_factors(spec: &SemigroupSpec, factors: &[Weighting]) -> String {
    let mut out = String::new();
    for (i, f) in factors.iter().enumerate() {
        writeln!(out, "factor {i}").unwrap();
        out.push_str(&spec.format_weighting(f));
    }
    out
}

fn edge_arg(tree: &phylosemi::tree::TrivalentTree, text: &str) -> Result<usize> {
    let Some((u, v)) = text.split_once(',') else {
        bail!("edge must be given as `u,v`");
    };
    let find = |s: &str| tree.vertex(s.trim()).with_context(|| format!("unknown vertex {s}"));
    tree.find_edge(find(u)?, find(v)?).with_context(|| format!("no edge {u} {v}"))
}

fn table(format: Format, rows: impl IntoIterator<Item = (u64, u128)>, header: &str) -> String {
    let mut out = String::new();
    if format == Format::Human {
        writeln!(out, "{:>3}  {header}", "k").unwrap();
    }
    for (k, n) in rows {
        match format {
            Format::Human => writeln!(out, "{k:>3}  {n}").unwrap(),
            Format::Machine => writeln!(out, "k={k} count={n}").unwrap(),
        }
    }
    out
}

fn run(cli: &Cli) -> Result<Report> {
    let machine = cli.format == Format::Machine;
    match &cli.command {
        Command::Parse { path } => {
            let input = load_tree(path)?;
            let mut out = write_tree_input(&input.tree, input.r.as_ref(), input.level);
            writeln!(out, "# leaves={} edges={}", input.tree.leaf_count(), input.tree.edge_count()).unwrap();
            if let Ok(p) = classify_leaves(&input.tree) {
                let label = |v| input.tree.label(v).to_string();
                let pairs: Vec<String> = p.pairs.iter().map(|&(a, b)| format!("{}+{}", label(a), label(b))).collect();
                let lone: Vec<String> = p.lone.iter().map(|&v| label(v)).collect();
                writeln!(out, "# pairs={} lone={}", pairs.join(" "), lone.join(" ")).unwrap();
            }
            if let (Some(r), Some(level)) = (&input.r, input.level) {
                writeln!(out, "# admissible={}", is_admissible(&input.tree, r, level)).unwrap();
            }
            Ok(Report::ok(out))
        }
        Command::Member { spec, weighting } => {
            let spec = load_spec(spec)?;
            let w = load_weighting(&spec, weighting)?;
            match spec.member(&w)? {
                Verdict::Member => Ok(Report::ok("member=true\n".into())),
                Verdict::NotMember(v) => Ok(Report::obstruction(format!("member=false reason={v}\n"))),
            }
        }
        Command::Cell(CellCommand::Classify { m, level }) => {
            if m.iter().any(|&x| x < 0) {
                bail!("cell base must be nonnegative");
            }
            let cell = classify_cell(*m, *level);
            let pts: Vec<String> = cell.points.iter().map(|p| format!("({},{},{})", p[0], p[1], p[2])).collect();
            let normal = is_normal(&cell.points, 4);
            let mut out = format!("class={} points={}\n", cell.class, cell.points.len());
            if !machine {
                writeln!(out, "offsets {}", pts.join(" ")).unwrap();
            }
            match normal.witness {
                None => writeln!(out, "normal=true").unwrap(),
                Some((d, p)) => writeln!(out, "normal=false witness_degree={d} witness=({},{},{})", p[0], p[1], p[2]).unwrap(),
            }
            Ok(Report::ok(out))
        }
        Command::Cell(CellCommand::Sweep { max, levels, degree }) => {
            let census = sweep(*max, levels, *degree);
            let mut out = String::new();
            for (class, n) in census.class_counts() {
                writeln!(out, "class={class} count={n}").unwrap();
            }
            for (form, n) in census.form_counts() {
                let form = form.map_or("UNMATCHED".to_string(), |f| f.to_string());
                writeln!(out, "form={form} count={n}").unwrap();
            }
            let non_normal = census.entries.iter().filter(|e| !e.normality.is_normal()).count();
            writeln!(out, "nonempty={} empty={} non_normal={non_normal}", census.entries.len(), census.empty_cells).unwrap();
            Ok(Report::ok(out))
        }
        Command::Relations(RelationsCommand::Cube) => {
            let mut out = String::new();
            for r in unit_cube_graver() {
                writeln!(out, "{:<4} {}", r.id, r.binomial).unwrap();
            }
            Ok(Report::ok(out))
        }
        Command::Factorize { spec, weighting } => {
            let spec = load_spec(spec)?;
            let w = load_weighting(&spec, weighting)?;
            match factor_weighting(&spec, &w) {
                Ok(f) => Ok(Report::ok(format!("method={}\n{}", f.method, format_factors(&spec, &f.factors)))),
                Err(RewriteError::NoFactorization { site }) => Ok(Report::obstruction(format!("NO_FACTORIZATION site={site}\n"))),
                Err(e) => Err(e.into()),
            }
        }
        Command::Decompose { spec, lhs, rhs } => {
            let spec = load_spec(spec)?;
            let (lhs, rhs) = (load_factors(&spec, lhs)?, load_factors(&spec, rhs)?);
            let cert = match decompose_relation(&spec, &lhs, &rhs) {
                Ok(c) => c,
                Err(RewriteError::NoFactorization { site }) => {
                    return Ok(Report::obstruction(format!("NO_FACTORIZATION site={site}\n")))
                }
                Err(e) => return Err(e.into()),
            };
            cert.replay()?;
            let mut out = format!("halved={} steps={} max_degree={}\n", cert.halved, cert.steps.len(), cert.max_degree());
            out.push_str(&cert.format_steps());
            out.push_str("replay=ok\n");
            Ok(Report::ok(out))
        }
        Command::Enumerate { spec, k } => {
            let spec = load_spec(spec)?;
            let members = oracle::enumerate_degree(&spec, *k)?;
            let mut out = String::new();
            if !machine {
                out.push_str(&format_factors(&spec, &members));
            }
            writeln!(out, "k={k} count={}", members.len()).unwrap();
            Ok(Report::ok(out))
        }
        Command::Hilbert { spec, k_max } => {
            let spec = load_spec(spec)?;
            let h = oracle::hilbert(&spec, *k_max)?;
            Ok(Report::ok(table(cli.format, (0..).zip(h.counts), "|S[k]|")))
        }
        Command::CheckGen1 { spec, k_max } => {
            let spec = load_spec(spec)?;
            let report = oracle::check_deg1_generation(&spec, *k_max)?;
            match report.witness {
                None => Ok(Report::ok(format!("generated=true k_max={k_max}\n"))),
                Some((k, w)) => Ok(Report::obstruction(format!(
                    "generated=false witness_degree={k}\n{}",
                    spec.format_weighting(&w)
                ))),
            }
        }
        Command::MarkovBound { spec, degree, cap } => {
            let spec = load_spec(spec)?;
            let report = oracle::markov_with_cap(&spec, *degree, *cap)?;
            let mut out = format!("s1={}\n", report.s1_size);
            for (d, n) in &report.generators {
                writeln!(out, "degree={d} generators={n}").unwrap();
            }
            writeln!(out, "max_degree={}", report.max_degree).unwrap();
            Ok(Report::ok(out))
        }
        Command::GoodTree { tree, level, k_max } => {
            let input = load_tree(tree)?;
            let good = oracle::is_good_tree(&input.tree)?;
            let mut out = format!("good={good}\n");
            if let Some(level) = level {
                let c = oracle::check_corollary_good(&input.tree, *level, *k_max)?;
                writeln!(out, "generated={} predicted={} agrees={}", c.generated, c.predicted, c.agrees()).unwrap();
            }
            Ok(Report::ok(out))
        }
        Command::OddLevel { spec, k_max } => {
            let spec = load_spec(spec)?;
            let c = oracle::check_odd_level_theorem(&spec, *k_max)?;
            let mut out = format!("generated={} obstruction={} holds={}\n", c.generated, c.omega_witness.is_some(), c.holds());
            if let Some((w, t)) = &c.omega_witness {
                let q = spec.restrict(w, *t).values;
                writeln!(out, "obstruction_trinode={t} restriction=({},{},{})", q[0], q[1], q[2]).unwrap();
                out.push_str(&spec.format_weighting(w));
            }
            if c.generated {
                Ok(Report::ok(out))
            } else {
                Ok(Report::obstruction(out))
            }
        }
        Command::FindSegre { max_leaves } => match oracle::find_segre_instance(*max_leaves) {
            Ok(inst) => {
                let mut out = write_tree_input(inst.spec.tree(), Some(inst.spec.r()), Some(inst.spec.level()));
                writeln!(out, "# omega").unwrap();
                out.push_str(&inst.spec.format_weighting(&inst.omega));
                for (i, f) in inst.factorizations.iter().enumerate() {
                    writeln!(out, "# factorization {}", i + 1).unwrap();
                    out.push_str(&format_factors(&inst.spec, f));
                }
                writeln!(out, "segre_trinode={}", inst.trinode).unwrap();
                Ok(Report::ok(out))
            }
            Err(OracleError::NotFound) => Ok(Report::obstruction("NOT_FOUND\n".into())),
            Err(e) => Err(e.into()),
        },
        Command::Merge {
            tree_a,
            weighting_a,
            edge_a,
            tree_b,
            weighting_b,
            edge_b,
        } => {
            let weighted = |tree: &Path, weighting: &Path| -> Result<WeightedTree> {
                let t = Arc::new(load_tree(tree)?.tree);
                let spec = SemigroupSpec::s(t.clone(), LeafWeights::uniform(&t, 0), Level::Infinite);
                let w = load_weighting(&spec, weighting)?;
                Ok(WeightedTree::new((*t).clone(), w.values().to_vec(), w.degree()))
            };
            let (a, b) = (weighted(tree_a, weighting_a)?, weighted(tree_b, weighting_b)?);
            let (ea, eb) = (edge_arg(&a.tree, edge_a)?, edge_arg(&b.tree, edge_b)?);
            let m = merge(&a, ea, &b, eb)?;
            let r = m.leaf_grades();
            let mut out = write_tree_input(&m.tree, r.as_ref(), None);
            let t = Arc::new(m.tree.clone());
            let spec = SemigroupSpec::s(t.clone(), LeafWeights::uniform(&t, 0), Level::Infinite);
            out.push_str(&spec.format_weighting(&Weighting::new(m.values.clone(), m.degree)));
            Ok(Report::ok(out))
        }
        Command::Acceptance {
            all,
            criterion,
            samples,
            relations,
            seed,
        } => {
            let defaults = AcceptanceConfig::default();
            let config = AcceptanceConfig {
                samples: samples.unwrap_or(defaults.samples),
                relations: relations.unwrap_or(defaults.relations),
                seed: seed.unwrap_or(defaults.seed),
            };
            let ids: Vec<u8> = match (all, criterion) {
                (_, Some(id)) => vec![*id],
                (true, None) => (1..=10).collect(),
                (false, None) => bail!("pass --all or --criterion <N>"),
            };
            let mut out = String::new();
            let mut failed = false;
            for id in ids {
                let o = acceptance::run(id, &config);
                failed |= !o.passed;
                writeln!(out, "{o}").unwrap();
            }
            Ok(Report { text: out, obstruction: failed })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.text);
            if report.obstruction {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
