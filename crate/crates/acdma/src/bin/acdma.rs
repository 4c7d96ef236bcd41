use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use acdma::codes::{
    build_code_for, build_optical_code_for, read_matrix, search_base, verify, write_matrix, CodeLibrary, NotFound,
    SearchConfig, SearchOutcome, VerifyConfig, VerifyMode,
};
use acdma::experiment::{emit_plotdata, run_recipe, validate_config, ExperimentSpec, Recipe, RunOutput};
use acdma::model::Family;
use acdma::Error;

#[derive(Parser, Debug)]
#[command(name = "acdma", version, about = "Capacity bounds, errorless codes and decoders for chip-asynchronous CDMA")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate capacity bounds and print them as CSV.
    Bounds(BoundsArgs),
    /// Build, verify or search for code matrices.
    #[command(subcommand)]
    Codes(CodesCommand),
    /// Monte Carlo simulations.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Run a named figure/table recipe and write its CSV files.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// Bound identifiers, comma separated (e.g. lb_binary_noiseless,ub_conjectured_noiseless).
    #[arg(long, required = true)]
    bound: String,
    #[arg(long)]
    m: Option<usize>,
    /// Users: `a:b`, `a:step:b` or a comma list.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    snr_db: Option<String>,
    #[arg(long)]
    zeta: Option<String>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CodesCommand {
    /// Errorless signatures for `m` chips and delays up to `tau`.
    Build {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        tau: usize,
        #[arg(long)]
        users: Option<usize>,
        /// 0/1 signatures for intensity-modulated links.
        #[arg(long)]
        optical: bool,
        /// Write the full m-chip signature matrix instead of the base code.
        #[arg(long)]
        signatures: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a matrix file against a family definition.
    Verify {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value = "exhaustive")]
        mode: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Randomized search for a small base matrix.
    Search {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild the overloading table at 64 chips.
    Table,
}

#[derive(Subcommand, Debug)]
enum SimulateCommand {
    /// Bit error rate versus E_b/N0.
    Ber {
        /// Signature sets, comma separated: proposed, gold, pseudo-gold, ooc.
        #[arg(long, default_value = "proposed")]
        code: String,
        /// Receivers, comma separated: pml, map, gpml, ist.
        #[arg(long, default_value = "pml")]
        decoder: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        tau: usize,
        #[arg(long)]
        users: Option<usize>,
        #[arg(long)]
        optical: bool,
        #[arg(long, default_value_t = 5)]
        q: usize,
        #[arg(long, default_value = "0:2:14", allow_negative_numbers = true)]
        snr_db: String,
        #[arg(long, default_value_t = 100_000)]
        frames: u64,
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// fig1..fig7, table1 or custom; may be omitted with --config.
    recipe: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default `out/<recipe>`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Lift the per-point frame cap.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    frames: Option<u64>,
}

enum Failure {
    Lib(Error),
    /// A property check came back negative.
    Falsified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::InvalidParameter(_) | Error::Dimension(_) | Error::Precondition(_) => 2,
        Error::Numerical(_) | Error::Budget { .. } | Error::Io(_) => 3,
    }
}

/// Apply `key = value` lines on top of a spec and re-check the whole thing.
fn with_lines(spec: &ExperimentSpec, extra: &[(&str, String)]) -> Result<ExperimentSpec, Error> {
    let mut text = spec.serialize();
    let keys: Vec<&str> = extra.iter().map(|(k, _)| *k).collect();
    text = text
        .lines()
        .filter(|l| l.split('=').next().is_none_or(|k| !keys.contains(&k.trim())))
        .map(|l| format!("{l}\n"))
        .collect();
    for (k, v) in extra {
        text.push_str(&format!("{k} = {v}\n"));
    }
    validate_config(&text)
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Error> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, body)?;
            Ok(())
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn single_csv(run: RunOutput) -> String {
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    run.files.into_iter().next().map(|(_, body)| body).unwrap_or_default()
}

fn bounds(a: BoundsArgs) -> Result<(), Failure> {
    let mut lines: Vec<(&str, String)> = vec![("task", "bounds".into()), ("bounds", a.bound)];
    let opts = [
        ("m", a.m.map(|v| v.to_string())),
        ("n", a.n),
        ("tau_max", a.tau),
        ("snr_db", a.snr_db),
        ("zeta", a.zeta),
        ("beta", a.beta.map(|v| v.to_string())),
        ("lambda", a.lambda.map(|v| v.to_string())),
    ];
    lines.extend(opts.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))));
    let spec = with_lines(&ExperimentSpec::new(Recipe::Custom), &lines)?;
    emit(a.out.as_deref(), &single_csv(run_recipe(&spec)?))?;
    Ok(())
}

fn codes(cmd: CodesCommand) -> Result<(), Failure> {
    match cmd {
        CodesCommand::Build { m, tau, users, optical, signatures, out } => {
            let mut lib = CodeLibrary::default();
            let built = if optical {
                build_optical_code_for(&mut lib, m, tau, users)?
            } else {
                build_code_for(&mut lib, m, tau, users)?
            };
            eprintln!("{} for {m} chips, delays up to {tau}: {} users", built.describe(), built.signatures.users());
            let text = if signatures {
                let sig = &built.signatures;
                let chips: Vec<Vec<i8>> =
                    (0..sig.users()).map(|c| sig.column_re(c).iter().map(|&v| v as i8).collect()).collect();
                let mat = acdma::codes::CodeMatrix::from_cols(sig.rows(), &chips)?;
                write_matrix(&mat, sig.alphabet(), Some(&built.code.cert))
            } else {
                let alphabet = built.signatures.alphabet();
                write_matrix(&built.code.matrix, alphabet, Some(&built.code.cert))
            };
            emit(out.as_deref(), &text)?;
            Ok(())
        }
        CodesCommand::Verify { family, s, mode, input, trials, seed } => {
            let mode = match mode.to_ascii_lowercase().as_str() {
                "exhaustive" => VerifyMode::Exhaustive,
                "randomized" | "randomised" => VerifyMode::Randomized,
                other => return Err(Error::InvalidParameter(format!("unknown mode `{other}` (exhaustive or randomized)")).into()),
            };
            let text = fs::read_to_string(&input)?;
            let file = read_matrix(&text)?;
            let cfg = VerifyConfig { trials, seed, ..VerifyConfig::default() };
            let v = verify(&file.matrix, family, s, mode, &cfg)?;
            if let Some(cert) = &v.certificate {
                println!("holds: {cert}");
            }
            match (&v.counterexample, v.holds) {
                (Some(cx), _) => {
                    println!("counterexample: shifts {:?} difference {:?}", cx.shifts, cx.diff);
                    Err(Failure::Falsified(format!("matrix is not a {family} matrix for s = {s}")))
                }
                (None, true) => Ok(()),
                (None, false) => Err(Failure::Falsified("verification did not establish the property".into())),
            }
        }
        CodesCommand::Search { family, m, n, s, seed, budget, out } => {
            let cfg = SearchConfig { seed, budget, ..SearchConfig::default() };
            match search_base(family, m, n, s, &cfg)? {
                SearchOutcome::Found(c) => {
                    eprintln!("found {} ({})", c.label(), c.cert);
                    emit(out.as_deref(), &write_matrix(&c.matrix, family_alphabet(family), Some(&c.cert)))?;
                    Ok(())
                }
                SearchOutcome::NotFound(NotFound::Impossible(why)) => Err(Error::Precondition(why).into()),
                SearchOutcome::NotFound(NotFound::BudgetExhausted { tried }) => {
                    Err(Error::Budget { work: tried, context: "no matrix found; this is not a proof of nonexistence".into() }.into())
                }
            }
        }
        CodesCommand::Table => {
            let spec = ExperimentSpec::new(Recipe::Table1);
            print!("{}", single_csv(run_recipe(&spec)?));
            Ok(())
        }
    }
}

fn family_alphabet(f: Family) -> acdma::model::SignatureAlphabet {
    use acdma::model::SignatureAlphabet;
    match f {
        Family::A | Family::B => SignatureAlphabet::Binary,
        Family::ATilde | Family::D => SignatureAlphabet::Optical,
    }
}

fn simulate(cmd: SimulateCommand) -> Result<(), Failure> {
    let SimulateCommand::Ber { code, decoder, m, tau, users, optical, q, snr_db, frames, full, seed, out } = cmd;
    let mut lines: Vec<(&str, String)> = vec![
        ("task", "ber".into()),
        ("codes", code),
        ("decoders", decoder),
        ("m", m.to_string()),
        ("tau_max", tau.to_string()),
        ("q", q.to_string()),
        ("snr_db", snr_db),
        ("frames", frames.to_string()),
        ("seed", seed.to_string()),
    ];
    if let Some(u) = users {
        lines.push(("users", u.to_string()));
    }
    if optical {
        lines.push(("optical", "true".into()));
    }
    if full {
        lines.push(("full", "true".into()));
    }
    let spec = with_lines(&ExperimentSpec::new(Recipe::Custom), &lines)?;
    let run = run_recipe(&spec)?;
    if let Some(p) = &out {
        let mut manifest = p.clone().into_os_string();
        manifest.push(".manifest.txt");
        emit(Some(Path::new(&manifest)), &run.manifest.render())?;
    }
    emit(out.as_deref(), &single_csv(run))?;
    Ok(())
}

fn reproduce(a: ReproduceArgs) -> Result<(), Failure> {
    let base = match &a.config {
        Some(path) => validate_config(&fs::read_to_string(path)?)?,
        None => {
            let Some(r) = &a.recipe else {
                return Err(Error::InvalidParameter("give a recipe name or --config".into()).into());
            };
            ExperimentSpec::new(r.parse()?)
        }
    };
    if let Some(r) = &a.recipe {
        let r: Recipe = r.parse()?;
        if r != base.recipe {
            return Err(Error::InvalidParameter(format!("recipe {r} conflicts with recipe {} in the config", base.recipe)).into());
        }
    }
    let mut lines: Vec<(&str, String)> = Vec::new();
    if let Some(s) = a.seed {
        lines.push(("seed", s.to_string()));
    }
    if let Some(f) = a.frames {
        lines.push(("frames", f.to_string()));
    }
    if a.full {
        lines.push(("full", "true".into()));
    }
    let spec = with_lines(&base, &lines)?;
    let dir = a
        .out
        .or_else(|| spec.output_path.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(spec.recipe.as_str()));
    let run = run_recipe(&spec)?;
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    // Plot data is derived before anything is written, so a failure leaves no partial output.
    let mut plots = Vec::new();
    for (name, body) in &run.files {
        let stem = name.trim_end_matches(".csv");
        plots.push((format!("{stem}.dat"), emit_plotdata(body, spec.recipe, spec.seed)?));
    }
    run.write_to(&dir)?;
    for (name, body) in plots {
        fs::write(dir.join(name), body).map_err(Error::from)?;
    }
    for (name, _) in &run.files {
        eprintln!("wrote {}", dir.join(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds(a) => bounds(a),
        Command::Codes(c) => codes(c),
        Command::Simulate(s) => simulate(s),
        Command::Reproduce(r) => reproduce(r),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Falsified(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
    }
}
