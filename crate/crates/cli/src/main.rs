use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amalgam::catalog::{class_by_name, diversify_with_action, RotatingMachines};
use amalgam::fraisse::{
    build_limit, certify_extension_level, enumerate_members, Certificate, ClassError, FraisseClass,
    LimitApproximation, LimitParams,
};
use amalgam::groups::{identify, GroupTable};
use amalgam::structures::{
    all_embeddings, automorphisms, isomorphic, parse_structure, write_structure, Embedding, FinStructure,
};
use amalgam::verify::{run_suite, Bounds, VerifyError, SUITES};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(name = "amalgam", version, about = "Finite Fraisse classes, limit approximations and automorphism groups")]
struct Cli {
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Identify the automorphism group of a structure file.
    Aut { file: PathBuf },
    /// Decide whether two structure files are isomorphic.
    Iso { a: PathBuf, b: PathBuf },
    /// List embeddings of one structure into another.
    Embed {
        dom: PathBuf,
        cod: PathBuf,
        /// Print at most this many maps.
        #[arg(long, default_value_t = 10)]
        show: usize,
    },
    /// Amalgamate X <-f- Z -g-> Y in a class.
    Amalg {
        class: String,
        z: PathBuf,
        x: PathBuf,
        y: PathBuf,
        /// Images of Z in X, comma separated (default: inclusion).
        #[arg(long)]
        f: Option<String>,
        /// Images of Z in Y, comma separated (default: inclusion).
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate members of a class up to isomorphism.
    Enum {
        class: String,
        size: usize,
        /// Write each member as `M_###.txt` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a finite approximation of a class limit and certify it.
    Limit {
        class: String,
        steps: usize,
        cap: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-certify a chain written by `limit` at level k.
    Certify { dir: PathBuf, k: usize },
    /// Write the rotating-machine gadget for n and k.
    Gadget {
        n: usize,
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orbit-complete a diversified structure under a group.
    OrbitComplete {
        file: PathBuf,
        /// Group name: Zn, Sn, cyclic:n, sym:n or prod:<g>,<h>.
        #[arg(long)]
        group: String,
        /// Class being diversified.
        #[arg(long, default_value = "lo")]
        base: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite, or `all`.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Lines,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    suite: String,
    /// Start from the smoke-test bounds instead of the defaults.
    #[arg(long)]
    quick: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    class_size: Option<usize>,
    #[arg(long)]
    group_order: Option<usize>,
    #[arg(long)]
    completion_size: Option<usize>,
    #[arg(long)]
    max_products: Option<usize>,
    #[arg(long)]
    max_consumers: Option<usize>,
    #[arg(long)]
    mixed_size: Option<usize>,
    #[arg(long)]
    gadget_n: Option<usize>,
    #[arg(long)]
    gadget_k: Option<usize>,
    #[arg(long)]
    machine_size: Option<usize>,
    #[arg(long)]
    wheel_size: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    star_level: Option<usize>,
    #[arg(long)]
    cp_steps: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
}

impl VerifyArgs {
    fn bounds(&self) -> Bounds {
        let mut b = if self.quick { Bounds::quick() } else { Bounds::default() };
        let overrides = [
            (self.class_size, &mut b.class_size),
            (self.group_order, &mut b.group_order),
            (self.completion_size, &mut b.completion_size),
            (self.max_products, &mut b.max_products),
            (self.max_consumers, &mut b.max_consumers),
            (self.mixed_size, &mut b.mixed_size),
            (self.gadget_n, &mut b.gadget_n),
            (self.gadget_k, &mut b.gadget_k),
            (self.machine_size, &mut b.machine_size),
            (self.wheel_size, &mut b.wheel_size),
            (self.steps, &mut b.steps),
            (self.cap, &mut b.cap),
            (self.star_level, &mut b.star_level),
            (self.cp_steps, &mut b.cp_steps),
            (self.samples, &mut b.samples),
        ];
        for (value, slot) in overrides {
            if let Some(v) = value {
                *slot = v;
            }
        }
        if let Some(s) = self.seed {
            b.seed = s;
        }
        b
    }
}

/// Exit 2 covers usage and input errors, 3 construction failures.
#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("{0}")]
    Construction(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input { .. } | CliError::Verify(_) => 2,
            CliError::Construction(_) => 3,
        }
    }
}

/// Unknown classes and malformed arguments are usage errors; everything a
/// class reports while building is a construction failure.
impl From<ClassError> for CliError {
    fn from(e: ClassError) -> Self {
        match e {
            ClassError::UnknownClass(_) | ClassError::NotMember { .. } | ClassError::Structure(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Construction(e.to_string()),
        }
    }
}

/// Command outcome: `Ok(false)` means checks ran and some failed.
type Outcome = Result<bool, CliError>;

fn load(path: &Path) -> Result<FinStructure, CliError> {
    let input = |message: String| CliError::Input {
        path: path.display().to_string(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| input(e.to_string()))?;
    parse_structure(&text).map_err(|e| input(e.to_string()))
}

fn save(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_map(text: Option<&str>, n: usize) -> Result<Embedding, CliError> {
    let Some(text) = text else {
        return Ok(Embedding::identity(n));
    };
    let map = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("bad map `{text}`: {e}")))?;
    Ok(Embedding::new(map))
}

fn join(map: &[usize]) -> String {
    map.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn member(class: &dyn FraisseClass, m: &FinStructure, what: &str) -> Result<(), CliError> {
    class
        .membership(m)
        .map_err(|e| CliError::Usage(format!("{what} is not a member of {}: {e}", class.name())))
}

fn cmd_aut(file: &Path) -> Outcome {
    let m = load(file)?;
    let g = automorphisms(&m).map_err(|e| CliError::Usage(e.to_string()))?;
    let id = identify(&g);
    println!("{id}");
    println!("order {}", id.order);
    println!("abelian {}", id.is_abelian);
    match &id.invariant_factors {
        Some(f) => println!("invariant factors {}", join(f)),
        None => println!("element orders {}", join(&id.element_orders)),
    }
    Ok(true)
}

fn cmd_iso(a: &Path, b: &Path) -> Outcome {
    let (a, b) = (load(a)?, load(b)?);
    match isomorphic(&a, &b).map_err(|e| CliError::Usage(e.to_string()))? {
        Some(e) => println!("isomorphic {}", join(e.map())),
        None => println!("not isomorphic"),
    }
    Ok(true)
}

fn cmd_embed(dom: &Path, cod: &Path, show: usize) -> Outcome {
    let (a, b) = (load(dom)?, load(cod)?);
    let all = all_embeddings(&a, &b).map_err(|e| CliError::Usage(e.to_string()))?;
    println!("embeddings {}", all.len());
    for e in all.iter().take(show) {
        println!("map {}", join(e.map()));
    }
    Ok(true)
}

fn cmd_amalg(
    class: &str,
    paths: [&Path; 3],
    f: Option<&str>,
    g: Option<&str>,
    out: Option<&Path>,
) -> Outcome {
    let class = class_by_name(class)?;
    let [z, x, y] = paths.map(load);
    let (z, x, y) = (z?, x?, y?);
    for (m, what) in [(&z, "Z"), (&x, "X"), (&y, "Y")] {
        member(&*class, m, what)?;
    }
    let f = parse_map(f, z.size())?;
    let g = parse_map(g, z.size())?;
    for (e, cod, what) in [(&f, &x, "f"), (&g, &y, "g")] {
        e.check(&z, cod)
            .map_err(|v| CliError::Usage(format!("{what} is not an embedding: {v}")))?;
    }
    let am = class.amalgamate(&z, &x, &y, &f, &g)?;
    println!("size {}", am.structure.size());
    println!("left {}", join(am.left.map()));
    println!("right {}", join(am.right.map()));
    let text = write_structure(&am.structure);
    match out {
        Some(p) => save(p, &text)?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn cmd_enum(class: &str, size: usize, out: Option<&Path>) -> Outcome {
    let class = class_by_name(class)?;
    let members = enumerate_members(&*class, size)?;
    println!("{} size {size}: {} types", class.name(), members.len());
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
        for (i, m) in members.iter().enumerate() {
            save(&dir.join(format!("M_{i:03}.txt")), &write_structure(m))?;
        }
    }
    Ok(true)
}

fn report_certificate(c: &Certificate, stages: usize) -> bool {
    match c.prefix {
        Some(j) => println!("level {} holds on E_0..E_{j} of {stages} stages", c.level),
        None => println!("level {} holds on no stage", c.level),
    }
    if let Some(m) = c.missing.first() {
        println!(
            "missing {} tasks, first: stage {} template {} e {}",
            c.missing.len(),
            m.stage,
            m.template,
            join(&m.embedding)
        );
    }
    if !c.unsound.is_empty() {
        println!("unsound ledger entries {}", join(&c.unsound));
    }
    if c.certified {
        println!("certified level {}", c.level);
    } else {
        println!("not certified at level {}", c.level);
    }
    c.certified
}

fn cmd_limit(class: &str, steps: usize, cap: usize, seed: Option<u64>, out: Option<&Path>) -> Outcome {
    if steps == 0 || cap == 0 {
        return Err(CliError::Usage("steps and cap must be positive".into()));
    }
    let class = class_by_name(class)?;
    let apx = build_limit(&*class, LimitParams { steps, task_size_cap: cap, seed })?;
    println!(
        "{}: {} steps taken, {} stages, top size {}, {} tasks pending",
        apx.class,
        apx.steps_taken,
        apx.stage_count(),
        apx.top.size(),
        apx.pending()
    );
    if let Some(dir) = out {
        apx.write_to(dir)
            .map_err(|e| CliError::Usage(format!("{}: {e}", dir.display())))?;
    }
    let cert = certify_extension_level(&*class, &apx, cap)?;
    Ok(report_certificate(&cert, apx.stage_count()))
}

fn cmd_certify(dir: &Path, k: usize) -> Outcome {
    if k == 0 {
        return Err(CliError::Usage("k must be positive".into()));
    }
    let manifest_path = dir.join("manifest.txt");
    let manifest = fs::read_to_string(&manifest_path).map_err(|e| CliError::Input {
        path: manifest_path.display().to_string(),
        message: e.to_string(),
    })?;
    let name = manifest
        .lines()
        .find_map(|l| l.strip_prefix("class "))
        .ok_or_else(|| CliError::Input {
            path: manifest_path.display().to_string(),
            message: "no class line".into(),
        })?;
    let class = class_by_name(name.trim())?;
    let apx = LimitApproximation::read_from(dir, &*class).map_err(|message| CliError::Input {
        path: dir.display().to_string(),
        message,
    })?;
    let cert = certify_extension_level(&*class, &apx, k)?;
    Ok(report_certificate(&cert, apx.stage_count()))
}

fn cmd_gadget(n: usize, k: usize, out: Option<&Path>) -> Outcome {
    if n == 0 || k == 0 {
        return Err(CliError::Usage(format!("gadget needs n, k >= 1, got n = {n}, k = {k}")));
    }
    let m = RotatingMachines::new().gadget(n, k)?;
    let text = write_structure(&m);
    match out {
        Some(p) => {
            save(p, &text)?;
            println!("gadget {n} {k}: {} elements", m.size());
        }
        None => print!("{text}"),
    }
    Ok(true)
}

fn cmd_orbit_complete(file: &Path, group: &str, base: &str, out: Option<&Path>) -> Outcome {
    let x = load(file)?;
    let group = GroupTable::by_name(group).map_err(|e| CliError::Usage(e.to_string()))?;
    let div = diversify_with_action(class_by_name(base)?, group)?;
    let done = div.orbit_completion(&x, None)?;
    println!(
        "{}: |X| = {}, |X^G| = {}",
        div.name(),
        x.size(),
        done.structure.size()
    );
    println!("embedding {}", join(done.embedding.map()));
    let text = write_structure(&done.structure);
    match out {
        Some(p) => save(p, &text)?,
        None => print!("{text}"),
    }
    Ok(true)
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let bounds = args.bounds();
    let suites: Vec<&str> = if args.suite == "all" {
        SUITES.to_vec()
    } else {
        vec![args.suite.as_str()]
    };
    let mut text = String::new();
    let mut ok = true;
    for name in suites {
        let report = run_suite(name, &bounds)?;
        ok &= report.passed();
        let part = match args.format {
            Format::Text => format!("{report}\n"),
            Format::Lines => report.to_lines(),
        };
        print!("{part}");
        text.push_str(&part);
    }
    if let Some(p) = &args.out {
        save(p, &text)?;
    }
    Ok(ok)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Aut { file } => cmd_aut(&file),
        Command::Iso { a, b } => cmd_iso(&a, &b),
        Command::Embed { dom, cod, show } => cmd_embed(&dom, &cod, show),
        Command::Amalg { class, z, x, y, f, g, out } => {
            cmd_amalg(&class, [&z, &x, &y], f.as_deref(), g.as_deref(), out.as_deref())
        }
        Command::Enum { class, size, out } => cmd_enum(&class, size, out.as_deref()),
        Command::Limit { class, steps, cap, seed, out } => cmd_limit(&class, steps, cap, seed, out.as_deref()),
        Command::Certify { dir, k } => cmd_certify(&dir, k),
        Command::Gadget { n, k, out } => cmd_gadget(n, k, out.as_deref()),
        Command::OrbitComplete { file, group, base, out } => {
            cmd_orbit_complete(&file, &group, &base, out.as_deref())
        }
        Command::Verify(args) => cmd_verify(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
