use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::bail;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quiverhall::cache::OrbitCache;
use quiverhall::cartan::{
    build_simply_connected_root_datum, check_psi_identity, contract_cartan, generalized_reflection, validate_cartan,
    weyl_word_search, CartanDatum, ContractionPair, WeylElement,
};
use quiverhall::ffalg::{Bounds, Field};
use quiverhall::hall::{quiver_hash, HallAlgebra};
use quiverhall::heart::HallContraction;
use quiverhall::quiver::{
    cartan_of, contract_quiver, parse_quiver, quiver_to_json, realize_graph, verify_contraction_commutes, Automorphism,
    OrbitPair, Quiver,
};
use quiverhall::report::{all_passed, Check, CheckBuilder, Status};
use quiverhall::repspace::{dim_from_map, Dim, OrbitMethod, OrbitTable, RepSpace};
use quiverhall::verify;
use quiverhall::Error;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BOUND: u8 = 3;
const EXIT_INPUT: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "quiverhall",
    version,
    about = "Edge contraction of quivers, Cartan data and Hall algebras over finite fields"
)]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Enumeration bounds as `MAX_POINTS,MAX_GROUP`.
    #[arg(long, global = true, value_parser = parse_bounds)]
    bounds: Option<Bounds>,
    /// Orbit cache directory; defaults to $HALL_CACHE_DIR, then ./.hallcache.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Output format for verification reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generalized Cartan data.
    #[command(subcommand)]
    Cartan(CartanCmd),
    /// Weyl groups of simply connected root data.
    #[command(subcommand)]
    Weyl(WeylCmd),
    /// Quivers with admissible automorphisms.
    #[command(subcommand)]
    Quiver(QuiverCmd),
    /// Hall algebras over finite fields.
    #[command(subcommand)]
    Hall(HallCmd),
    /// The on-disk orbit table cache.
    #[command(subcommand)]
    Cache(CacheCmd),
}

#[derive(Args, Debug)]
struct LabelPair {
    #[arg(long)]
    plus: String,
    #[arg(long)]
    minus: String,
}

#[derive(Subcommand, Debug)]
enum CartanCmd {
    /// List violations of the datum conditions.
    Validate { file: PathBuf },
    /// Contract a pair of labels.
    Contract {
        file: PathBuf,
        #[command(flatten)]
        pair: LabelPair,
    },
    /// Build a graph with automorphism realizing the datum.
    Realize { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum WeylCmd {
    /// Check `s_{i₀} = s₊ s_{i₋+φ̂2 i₊} s₊`.
    CheckPsi {
        file: PathBuf,
        #[command(flatten)]
        pair: LabelPair,
    },
    /// Search for a word in the simple reflections equal to a target element.
    Search {
        file: PathBuf,
        /// JSON `{"matrix": [[...]]}` or `{"reflection": {"label": coeff, ...}}`.
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[arg(long = "plus-orbit", alias = "plus")]
    plus_orbit: String,
    #[arg(long = "minus-orbit", alias = "minus")]
    minus_orbit: String,
    #[arg(long)]
    edge: Option<String>,
}

impl OrbitArgs {
    fn pair(&self) -> OrbitPair {
        let p = OrbitPair::new(self.plus_orbit.clone(), self.minus_orbit.clone());
        match &self.edge {
            Some(e) => p.with_edge(e.clone()),
            None => p,
        }
    }
}

#[derive(Subcommand, Debug)]
enum QuiverCmd {
    /// The Cartan datum of a quiver with automorphism.
    Cartan { file: PathBuf },
    /// Contract an edge orbit between two vertex orbits.
    Contract {
        file: PathBuf,
        #[command(flatten)]
        pair: OrbitArgs,
    },
    /// Check that contracting the graph and contracting its datum agree.
    #[command(name = "verify-commutes", visible_alias = "verify-l14")]
    VerifyCommutes {
        file: PathBuf,
        #[command(flatten)]
        pair: OrbitArgs,
    },
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// Field size, a prime power.
    #[arg(long)]
    q: u64,
}

#[derive(Args, Debug)]
struct ContractionArgs {
    #[arg(long)]
    plus: String,
    #[arg(long)]
    minus: String,
    #[arg(long)]
    edge: Option<String>,
}

impl ContractionArgs {
    fn pair(&self) -> OrbitPair {
        let p = OrbitPair::new(self.plus.clone(), self.minus.clone());
        match &self.edge {
            Some(e) => p.with_edge(e.clone()),
            None => p,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyKind {
    /// Product oracle and associativity.
    Product,
    /// Coproduct multiplicativity and coassociativity.
    Bialgebra,
    /// Multiplicativity and injectivity of ψ, twist identity.
    Embedding,
    /// PBW transport along the contraction.
    Pbw,
    /// The split short exact sequence of the heart.
    Ses,
    /// Extension counts over heart pairs.
    FiberLaw,
    /// Comultiplication under ψ; reported, not asserted.
    ComultCompat,
}

#[derive(Subcommand, Debug)]
enum HallCmd {
    /// List the orbits of `G_V` on `E_V`.
    Orbits {
        quiver: PathBuf,
        #[arg(long)]
        dim: String,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// The characteristic function of an orbit, given by its representative code.
    /// With `--plus`/`--minus` it is taken over the contracted quiver.
    Char {
        quiver: PathBuf,
        #[arg(long)]
        dim: String,
        #[arg(long)]
        orbit: u64,
        #[arg(long, requires = "minus")]
        plus: Option<String>,
        #[arg(long, requires = "plus")]
        minus: Option<String>,
        #[arg(long)]
        edge: Option<String>,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// The product `f ∘ g`.
    Mult {
        quiver: PathBuf,
        f: PathBuf,
        g: PathBuf,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// `Res_{τ,ω}(f)`, or the full coproduct when `--tau`/`--omega` are omitted.
    Res {
        quiver: PathBuf,
        f: PathBuf,
        #[arg(long, requires = "omega")]
        tau: Option<String>,
        #[arg(long, requires = "tau")]
        omega: Option<String>,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// `ψ(f)` for `f` over the contracted quiver.
    Psi {
        quiver: PathBuf,
        f: PathBuf,
        #[command(flatten)]
        pair: ContractionArgs,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Run a verification and emit a pass/fail report.
    Verify {
        #[arg(value_enum)]
        kind: VerifyKind,
        quiver: PathBuf,
        #[arg(long)]
        plus: Option<String>,
        #[arg(long)]
        minus: Option<String>,
        #[arg(long)]
        edge: Option<String>,
        #[command(flatten)]
        field: FieldArgs,
        /// Largest dimension per vertex (of the contracted quiver for contraction checks).
        #[arg(long = "max-dim", default_value_t = 2)]
        max_dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum CacheCmd {
    /// Print a cached orbit table, computing and storing it on a miss.
    Get {
        quiver: PathBuf,
        #[arg(long)]
        dim: String,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Compute an orbit table and store it.
    Put {
        quiver: PathBuf,
        #[arg(long)]
        dim: String,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Remove every cached table.
    Purge,
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let (p, g) = s.split_once(',').ok_or("expected MAX_POINTS,MAX_GROUP")?;
    let max_points: u64 = p.trim().parse().map_err(|e| format!("{e}"))?;
    let max_group: u64 = g.trim().parse().map_err(|e| format!("{e}"))?;
    if max_points == 0 || max_group == 0 {
        return Err("bounds must be positive".into());
    }
    Ok(Bounds { max_points, max_group })
}

struct Ctx {
    out: Option<PathBuf>,
    bounds: Bounds,
    cache: Arc<OrbitCache>,
    format: Format,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
        .into()
    })
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

fn read_datum(path: &Path) -> anyhow::Result<CartanDatum> {
    serde_json::from_value(read_json(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())).into())
}

fn read_quiver(path: &Path) -> anyhow::Result<(Quiver, Automorphism)> {
    Ok(parse_quiver(&read(path)?)?)
}

fn read_plain_quiver(path: &Path) -> anyhow::Result<Quiver> {
    let (q, a) = read_quiver(path)?;
    if !a.is_identity() {
        return Err(Error::NontrivialAutomorphism.into());
    }
    Ok(q)
}

/// Accepts `2`, `1,1` in vertex order, or `p=1,m=1`.
fn parse_dim(q: &Quiver, s: &str) -> anyhow::Result<Dim> {
    if s.contains('=') {
        let mut map = BTreeMap::new();
        for part in s.split(',') {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad dimension entry `{part}`")))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad dimension `{v}`")))?;
            map.insert(k.trim().to_string(), v);
        }
        return Ok(dim_from_map(q, &map)?);
    }
    let dim: Vec<usize> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad dimension `{x}`")))
        })
        .collect::<Result<_, _>>()?;
    if dim.len() != q.num_vertices() {
        return Err(Error::DimMismatch(format!("{} entries for {} vertices", dim.len(), q.num_vertices())).into());
    }
    Ok(dim)
}

impl Ctx {
    fn emit(&self, v: &Value) -> anyhow::Result<()> {
        let text = serde_json::to_string_pretty(v)? + "\n";
        self.write(&text)
    }

    fn write(&self, text: &str) -> anyhow::Result<()> {
        match &self.out {
            Some(p) => fs::write(p, text).map_err(|e| {
                Error::Io {
                    path: p.display().to_string(),
                    message: e.to_string(),
                }
                .into()
            }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn algebra(&self, q: Quiver, field: u64) -> anyhow::Result<HallAlgebra> {
        Ok(HallAlgebra::new(q, field, self.bounds)?.with_store(self.cache.clone()))
    }

    fn contraction(&self, q: Quiver, field: u64, pair: &OrbitPair) -> anyhow::Result<HallContraction> {
        let a = Automorphism::identity(&q);
        let h = Arc::new(self.algebra(q, field)?);
        Ok(HallContraction::new(h, &a, pair)?)
    }

    fn report(&self, command: &str, config: Value, checks: &[Check]) -> anyhow::Result<u8> {
        let passed = all_passed(checks);
        match self.format {
            Format::Json => self.emit(&json!({
                "command": command,
                "config": config,
                "checks": checks,
                "passed": passed,
            }))?,
            Format::Table => {
                let mut text = String::new();
                for c in checks {
                    let status = match c.status {
                        Status::Pass => "PASS",
                        Status::Fail => "FAIL",
                        Status::Info => "INFO",
                    };
                    text.push_str(&format!("{status}  {:<32} {:<40} {}\n", c.name, c.anchor, c.cases));
                }
                text.push_str(if passed {
                    "all checks passed\n"
                } else {
                    "some checks failed\n"
                });
                self.write(&text)?;
            }
        }
        Ok(if passed { 0 } else { EXIT_CHECK_FAILED })
    }
}

fn run_cartan(ctx: &Ctx, cmd: &CartanCmd) -> anyhow::Result<u8> {
    match cmd {
        CartanCmd::Validate { file } => {
            let violations = validate_cartan(&read_datum(file)?);
            ctx.emit(&json!({"valid": violations.is_empty(), "violations": violations}))?;
            Ok(if violations.is_empty() { 0 } else { EXIT_CHECK_FAILED })
        }
        CartanCmd::Contract { file, pair } => {
            let d = read_datum(file)?;
            let c = contract_cartan(&d, &ContractionPair::new(pair.plus.clone(), pair.minus.clone()))?;
            ctx.emit(&serde_json::to_value(&c)?)?;
            Ok(0)
        }
        CartanCmd::Realize { file } => {
            let (q, a) = realize_graph(&read_datum(file)?)?;
            ctx.emit(&quiver_to_json(&q, &a))?;
            Ok(0)
        }
    }
}

fn read_target(d: &CartanDatum, path: &Path) -> anyhow::Result<WeylElement> {
    let v = read_json(path)?;
    if let Some(r) = v.get("reflection") {
        let coeffs: BTreeMap<String, i64> =
            serde_json::from_value(r.clone()).map_err(|e| Error::Parse(format!("reflection: {e}")))?;
        let rd = build_simply_connected_root_datum(d)?;
        return Ok(generalized_reflection(&rd, &coeffs)?);
    }
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("target: {e}")).into())
}

fn run_weyl(ctx: &Ctx, cmd: &WeylCmd) -> anyhow::Result<u8> {
    match cmd {
        WeylCmd::CheckPsi { file, pair } => {
            let d = read_datum(file)?;
            let c = check_psi_identity(&d, &ContractionPair::new(pair.plus.clone(), pair.minus.clone()))?;
            ctx.emit(&serde_json::to_value(&c)?)?;
            Ok(if c.holds { 0 } else { EXIT_CHECK_FAILED })
        }
        WeylCmd::Search { file, target, depth } => {
            let d = read_datum(file)?;
            let t = read_target(&d, target)?;
            let word = weyl_word_search(&d, &t, *depth)?;
            ctx.emit(&json!({"found": word.is_some(), "depth": depth, "word": word}))?;
            Ok(0)
        }
    }
}

fn run_quiver(ctx: &Ctx, cmd: &QuiverCmd) -> anyhow::Result<u8> {
    match cmd {
        QuiverCmd::Cartan { file } => {
            let (q, a) = read_quiver(file)?;
            ctx.emit(&serde_json::to_value(cartan_of(&q, &a)?)?)?;
            Ok(0)
        }
        QuiverCmd::Contract { file, pair } => {
            let (q, a) = read_quiver(file)?;
            let c = contract_quiver(&q, &a, &pair.pair())?;
            ctx.emit(&json!({
                "quiver": quiver_to_json(&c.quiver, &c.autom),
                "provenance": c.provenance_json(&q),
                "swapped": c.swapped,
            }))?;
            Ok(0)
        }
        QuiverCmd::VerifyCommutes { file, pair } => {
            let (q, a) = read_quiver(file)?;
            let holds = verify_contraction_commutes(&q, &a, &pair.pair())?;
            let mut b = CheckBuilder::new("contraction_commutes", "quiver.contraction_commutes");
            b.record(holds, || json!({"quiver": quiver_to_json(&q, &a)}));
            ctx.report(
                "quiver verify-commutes",
                json!({"quiver": quiver_hash(&q)}),
                &[b.finish()],
            )
        }
    }
}

fn orbit_listing(h: &HallAlgebra, dim: &[usize]) -> anyhow::Result<Value> {
    Ok(h.orbits(dim)?.to_json())
}

fn run_hall(ctx: &Ctx, cmd: &HallCmd) -> anyhow::Result<u8> {
    match cmd {
        HallCmd::Orbits { quiver, dim, field } => {
            let q = read_plain_quiver(quiver)?;
            let d = parse_dim(&q, dim)?;
            let h = ctx.algebra(q, field.q)?;
            ctx.emit(&orbit_listing(&h, &d)?)?;
            Ok(0)
        }
        HallCmd::Char {
            quiver,
            dim,
            orbit,
            plus,
            minus,
            edge,
            field,
        } => {
            let q = read_plain_quiver(quiver)?;
            let h = match (plus, minus) {
                (Some(p), Some(m)) => {
                    let pair = ContractionArgs {
                        plus: p.clone(),
                        minus: m.clone(),
                        edge: edge.clone(),
                    }
                    .pair();
                    ctx.contraction(q, field.q, &pair)?.contracted().clone()
                }
                _ => Arc::new(ctx.algebra(q, field.q)?),
            };
            let d = parse_dim(h.quiver(), dim)?;
            let id = h.orbits(&d)?.id_of_rep(*orbit).ok_or_else(|| Error::UnknownOrbit {
                dim: format!("{d:?}"),
                orbit: orbit.to_string(),
            })?;
            ctx.emit(&h.element_to_json(&h.char_function(&d, id)?)?)?;
            Ok(0)
        }
        HallCmd::Mult { quiver, f, g, field } => {
            let h = ctx.algebra(read_plain_quiver(quiver)?, field.q)?;
            let f = h.element_from_json(&read_json(f)?)?;
            let g = h.element_from_json(&read_json(g)?)?;
            ctx.emit(&h.element_to_json(&h.circ(&f, &g)?)?)?;
            Ok(0)
        }
        HallCmd::Res {
            quiver,
            f,
            tau,
            omega,
            field,
        } => {
            let q = read_plain_quiver(quiver)?;
            let split = match (tau, omega) {
                (Some(t), Some(w)) => Some((parse_dim(&q, t)?, parse_dim(&q, w)?)),
                _ => None,
            };
            let h = ctx.algebra(q, field.q)?;
            let f = h.element_from_json(&read_json(f)?)?;
            let t = match split {
                Some((t, w)) => h.res(&f, &t, &w)?,
                None => h.coproduct(&f)?,
            };
            ctx.emit(&h.tensor_to_json(&t)?)?;
            Ok(0)
        }
        HallCmd::Psi { quiver, f, pair, field } => {
            let c = ctx.contraction(read_plain_quiver(quiver)?, field.q, &pair.pair())?;
            let f = c.contracted().element_from_json(&read_json(f)?)?;
            ctx.emit(&c.original().element_to_json(&c.psi(&f)?)?)?;
            Ok(0)
        }
        HallCmd::Verify {
            kind,
            quiver,
            plus,
            minus,
            edge,
            field,
            max_dim,
            seed,
        } => {
            let q = read_plain_quiver(quiver)?;
            let hash = quiver_hash(&q);
            let name = kind
                .to_possible_value()
                .map(|v| v.get_name().to_string())
                .unwrap_or_default();
            let config = json!({
                "quiver": hash,
                "q": field.q,
                "max_dim": max_dim,
                "seed": seed,
                "bounds": ctx.bounds,
                "pair": {"plus": plus, "minus": minus, "edge": edge},
            });
            let checks = match kind {
                VerifyKind::Product | VerifyKind::Bialgebra => {
                    let h = ctx.algebra(q, field.q)?;
                    let max = vec![*max_dim; h.quiver().num_vertices()];
                    if *kind == VerifyKind::Product {
                        vec![
                            verify::verify_oracle(&h, &max)?,
                            verify::verify_associativity(&h, &max)?,
                        ]
                    } else {
                        vec![
                            verify::verify_coproduct_multiplicative(&h, &max)?,
                            verify::verify_coassociativity(&h, &max)?,
                        ]
                    }
                }
                _ => {
                    let (Some(p), Some(m)) = (plus, minus) else {
                        bail!(UsageError(
                            "--plus and --minus are required for contraction checks".into()
                        ));
                    };
                    let mut pair = OrbitPair::new(p.clone(), m.clone());
                    if let Some(e) = edge {
                        pair = pair.with_edge(e.clone());
                    }
                    let c = ctx.contraction(q, field.q, &pair)?;
                    let max = vec![*max_dim; c.contracted().quiver().num_vertices()];
                    match kind {
                        VerifyKind::Embedding => verify::verify_embedding(&c, &max)?,
                        VerifyKind::Pbw => verify::verify_pbw(&c, &max)?,
                        VerifyKind::Ses => verify::verify_ses(&c, &max, *seed, 16)?,
                        VerifyKind::FiberLaw => {
                            let mut checks = Vec::new();
                            for (tau, omega) in verify::dim_pairs_below(&max) {
                                if tau.iter().any(|&x| x > 0) && omega.iter().any(|&x| x > 0) {
                                    checks.push(verify::verify_restriction_fiber_law(&c, &tau, &omega)?);
                                }
                            }
                            checks
                        }
                        _ => vec![verify::comult_compat(&c, &max)?],
                    }
                }
            };
            ctx.report(&format!("hall verify {name}"), config, &checks)
        }
    }
}

fn run_cache(ctx: &Ctx, cmd: &CacheCmd) -> anyhow::Result<u8> {
    match cmd {
        CacheCmd::Get { quiver, dim, field } | CacheCmd::Put { quiver, dim, field } => {
            let q = Arc::new(read_plain_quiver(quiver)?);
            let d = parse_dim(&q, dim)?;
            let f = Arc::new(Field::new(field.q)?);
            let space = RepSpace::new(q, f, d)?;
            if matches!(cmd, CacheCmd::Get { .. }) {
                let (t, _) = ctx.cache.get_or_compute(&space, &ctx.bounds)?;
                ctx.emit(&t.to_json())?;
            } else {
                let t = OrbitTable::compute(&space, &ctx.bounds, OrbitMethod::Auto)?;
                let path = ctx.cache.put(&t)?;
                ctx.emit(&json!({"key": OrbitCache::key(&space), "path": path.display().to_string()}))?;
            }
            Ok(0)
        }
        CacheCmd::Purge => {
            let removed = ctx.cache.purge()?;
            ctx.emit(&json!({"removed": removed, "dir": ctx.cache.dir().display().to_string()}))?;
            Ok(0)
        }
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::BoundExceeded { .. }) => EXIT_BOUND,
        _ => EXIT_INPUT,
    }
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    let cache = match &cli.cache_dir {
        Some(d) => OrbitCache::new(d),
        None => OrbitCache::from_env(),
    };
    let ctx = Ctx {
        out: cli.out.clone(),
        bounds: cli.bounds.unwrap_or_default(),
        cache: Arc::new(cache),
        format: cli.format,
    };
    match &cli.command {
        Command::Cartan(c) => run_cartan(&ctx, c),
        Command::Weyl(c) => run_weyl(&ctx, c),
        Command::Quiver(c) => run_quiver(&ctx, c),
        Command::Hall(c) => run_hall(&ctx, c),
        Command::Cache(c) => run_cache(&ctx, c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.root_cause());
            ExitCode::from(exit_code(&e))
        }
    }
}
