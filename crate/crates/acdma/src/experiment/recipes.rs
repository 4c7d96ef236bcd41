use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use super::config::{CodeChoice, ExperimentSpec, Grid, Recipe, Task};
use crate::bounds::{
    lb_asym_binary_noiseless, lb_asym_gaussian, lb_binary_awgn, lb_binary_noiseless, ub_asym_noiseless,
    ub_conjectured_noiseless, ub_conjectured_noisy, BoundId, BoundResult,
};
use crate::codes::{build_code_for, build_optical_code_for, recipe_table_i, CodeLibrary, Layout};
use crate::decoders::{ber_trial, gold_like_signatures, BaselineKind, BerCount, BerSetup, DecoderConfig, DecoderKind, DelaySampler};
use crate::error::{invalid, Error, Result};
use crate::model::{derive_rng, ebn0_db_to_eta, InputAlphabet, SignatureMatrix, SystemParams};

/// Frames per SNR point when none are requested.
pub const DEFAULT_FRAMES: u64 = 100_000;

/// Largest frame count run without `full = true`.
pub const FRAME_CAP: u64 = 1_000_000;

pub const BOUNDS_HEADER: &str = "bound_id,m,n,tau_max,snr_db,eta,zeta,beta,lambda,total_bits,per_user_bits,gamma_star,s_star";
pub const BER_HEADER: &str = "snr_db,decoder,code,frames,bit_errors,ber,ci95";
pub const TABLE_HEADER: &str = "lambda,tau_max,users,beta,source,code,certificate";

/// Seed stream assigned to one independent unit of work.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSeed {
    pub label: String,
    pub stream: u64,
}

/// Everything needed to audit or repeat a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub spec: ExperimentSpec,
    pub master_seed: u64,
    pub tasks: Vec<TaskSeed>,
    pub certificates: Vec<String>,
    pub wall_clock_s: f64,
    pub version: String,
}

impl RunManifest {
    /// The canonical configuration followed by the run record as comments,
    /// so the file can be fed back through `--config`.
    pub fn render(&self) -> String {
        let mut out = self.spec.serialize();
        let _ = writeln!(out, "# tool acdma {}", self.version);
        let _ = writeln!(out, "# master_seed {}", self.master_seed);
        let _ = writeln!(out, "# wall_clock_s {:.3}", self.wall_clock_s);
        for c in &self.certificates {
            let _ = writeln!(out, "# certificate {c}");
        }
        for t in &self.tasks {
            let _ = writeln!(out, "# task stream={} {}", t.stream, t.label);
        }
        out
    }
}

/// CSV files produced by a recipe, with the manifest and any warnings.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<(String, String)>,
    pub manifest: RunManifest,
    pub warnings: Vec<String>,
}

impl RunOutput {
    /// Write every CSV plus `manifest.txt` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, body) in &self.files {
            std::fs::write(dir.join(name), body)?;
        }
        std::fs::write(dir.join("manifest.txt"), self.manifest.render())?;
        Ok(())
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One line of a bounds CSV; unused coordinates stay empty.
#[derive(Debug, Clone, Default)]
struct BoundRow {
    m: Option<usize>,
    n: Option<usize>,
    tau_max: Option<usize>,
    snr_db: Option<f64>,
    eta: Option<f64>,
    zeta: Option<f64>,
    beta: Option<f64>,
    lambda: Option<f64>,
}

impl BoundRow {
    fn render(&self, r: &BoundResult) -> Result<String> {
        let values = [Some(r.per_user_bits), r.total_bits, r.witnesses.gamma, r.witnesses.s];
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!("{} produced a non-finite value", r.bound_id)));
        }
        Ok(format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.bound_id,
            opt(self.m),
            opt(self.n),
            opt(self.tau_max),
            opt(self.snr_db),
            opt(self.eta),
            opt(self.zeta),
            opt(self.beta),
            opt(self.lambda),
            opt(r.total_bits),
            r.per_user_bits,
            opt(r.witnesses.gamma),
            opt(r.witnesses.s),
        ))
    }
}

fn ints(g: &Grid, what: &str) -> Result<Vec<usize>> {
    g.integers().map_err(|e| Error::InvalidParameter(format!("{what}: {e}")))
}

/// The default Fig. 1 user grid: every `n` up to 100, then every fourth up to 300.
pub fn fig1_users() -> Vec<usize> {
    (1..=100).chain((104..=300).step_by(4)).collect()
}

/// Smallest fixed point of `n = ⌈ζ·m·log₂ n⌉` reached from `n = m`.
pub fn users_for_zeta(zeta: f64, m: usize) -> usize {
    let mut n = m.max(2);
    for _ in 0..256 {
        let next = ((zeta * m as f64 * (n as f64).log2()).ceil() as usize).max(2);
        if next == n {
            break;
        }
        n = next;
    }
    n
}

/// Noise standard deviation matching `E_b/N₀ = η` for unit-power binary signatures.
pub fn sigma_for_eta(eta: f64) -> f64 {
    (1.0 / (2.0 * eta)).sqrt()
}

fn bounds_csv(rows: Vec<String>) -> String {
    let mut s = String::from(BOUNDS_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn fig1(spec: &ExperimentSpec) -> Result<String> {
    let o = &spec.overrides;
    let m = o.m.unwrap_or(64);
    let users = o.n.as_ref().map(|g| ints(g, "n")).transpose()?.unwrap_or_else(fig1_users);
    let taus = o.tau_max.as_ref().map(|g| ints(g, "tau_max")).transpose()?.unwrap_or(vec![0, 16, 32, 38, 48]);
    let mut rows = Vec::new();
    for &n in &users {
        let ctx = BoundRow { m: Some(m), n: Some(n), ..Default::default() };
        rows.push(ctx.render(&ub_conjectured_noiseless(m, n)?)?);
        for &t in &taus {
            let ctx = BoundRow { tau_max: Some(t), ..ctx.clone() };
            rows.push(ctx.render(&lb_binary_noiseless(m, n, t)?)?);
        }
    }
    Ok(bounds_csv(rows))
}

fn fig2(spec: &ExperimentSpec) -> Result<String> {
    let o = &spec.overrides;
    let lambda = o.lambda.unwrap_or(0.5);
    let ms = o.m_values.as_ref().map(|g| ints(g, "m_values")).transpose()?.unwrap_or(vec![64, 256, 1024]);
    let zetas = o.zeta.clone().unwrap_or(Grid::Range { start: 0.1, step: 0.1, end: 2.0 }).points();
    let mut rows = Vec::new();
    for &z in &zetas {
        let ctx = BoundRow { zeta: Some(z), lambda: Some(lambda), ..Default::default() };
        rows.push(ctx.render(&lb_asym_binary_noiseless(z, lambda)?)?);
        rows.push(ctx.render(&ub_asym_noiseless(z, lambda)?)?);
        for &m in &ms {
            let n = users_for_zeta(z, m);
            let tau = (lambda * m as f64).floor() as usize;
            let row = BoundRow { m: Some(m), n: Some(n), tau_max: Some(tau), ..ctx.clone() };
            rows.push(row.render(&lb_binary_noiseless(m, n, tau)?)?);
        }
    }
    Ok(bounds_csv(rows))
}

fn fig3(spec: &ExperimentSpec) -> Result<String> {
    let o = &spec.overrides;
    let m = o.m.unwrap_or(64);
    let users = o.n.as_ref().map(|g| ints(g, "n")).transpose()?.unwrap_or((1..=100).collect());
    let taus = o.tau_max.as_ref().map(|g| ints(g, "tau_max")).transpose()?.unwrap_or(vec![0, 16, 32, 48]);
    let snrs = o.snr_db.clone().unwrap_or(Grid::List(vec![12.0])).points();
    let mut rows = Vec::new();
    for &db in &snrs {
        let eta = ebn0_db_to_eta(db);
        for &n in &users {
            let ctx = BoundRow { m: Some(m), n: Some(n), snr_db: Some(db), eta: Some(eta), ..Default::default() };
            rows.push(ctx.render(&ub_conjectured_noisy(m, n, eta, InputAlphabet::Binary)?)?);
            for &t in &taus {
                let ctx = BoundRow { tau_max: Some(t), ..ctx.clone() };
                rows.push(ctx.render(&lb_binary_awgn(m, n, t, eta, None)?)?);
            }
        }
    }
    Ok(bounds_csv(rows))
}

fn fig4(spec: &ExperimentSpec) -> Result<String> {
    let o = &spec.overrides;
    let beta = o.beta.unwrap_or(2.0);
    let lambda = o.lambda.unwrap_or(0.5);
    let ms = o.m_values.as_ref().map(|g| ints(g, "m_values")).transpose()?.unwrap_or(vec![64, 256, 1024]);
    let snrs = o.snr_db.clone().unwrap_or(Grid::Range { start: -4.0, step: 2.0, end: 20.0 }).points();
    let mut rows = Vec::new();
    for &db in &snrs {
        let eta = ebn0_db_to_eta(db);
        let ctx = BoundRow { snr_db: Some(db), eta: Some(eta), beta: Some(beta), lambda: Some(lambda), ..Default::default() };
        rows.push(ctx.render(&lb_asym_gaussian(beta, lambda, sigma_for_eta(eta))?)?);
        for &m in &ms {
            let n = (beta * m as f64).round() as usize;
            let tau = (lambda * m as f64).floor() as usize;
            if n == 0 {
                return invalid(format!("beta = {beta} leaves no users at m = {m}"));
            }
            let row = BoundRow { m: Some(m), n: Some(n), tau_max: Some(tau), ..ctx.clone() };
            rows.push(row.render(&lb_binary_awgn(m, n, tau, eta, None)?)?);
        }
    }
    Ok(bounds_csv(rows))
}

fn custom_bounds(spec: &ExperimentSpec) -> Result<String> {
    let o = &spec.overrides;
    let Some(ids) = &o.bounds else {
        return invalid("a custom bounds run needs `bounds`");
    };
    let lambda = o.lambda.unwrap_or(0.0);
    let snrs = o.snr_db.as_ref().map(Grid::points);
    let mut rows = Vec::new();
    for &id in ids {
        match id {
            BoundId::LbAsymBinaryNoiseless | BoundId::UbAsymNoiseless => {
                let Some(z) = &o.zeta else {
                    return invalid(format!("{id} needs `zeta`"));
                };
                for z in z.points() {
                    let ctx = BoundRow { zeta: Some(z), lambda: Some(lambda), ..Default::default() };
                    let r = if id == BoundId::UbAsymNoiseless {
                        ub_asym_noiseless(z, lambda)?
                    } else {
                        lb_asym_binary_noiseless(z, lambda)?
                    };
                    rows.push(ctx.render(&r)?);
                }
            }
            BoundId::LbAsymGaussian => {
                let (Some(beta), Some(snrs)) = (o.beta, &snrs) else {
                    return invalid(format!("{id} needs `beta` and `snr_db`"));
                };
                for &db in snrs {
                    let eta = ebn0_db_to_eta(db);
                    let ctx = BoundRow { snr_db: Some(db), eta: Some(eta), beta: Some(beta), lambda: Some(lambda), ..Default::default() };
                    rows.push(ctx.render(&lb_asym_gaussian(beta, lambda, sigma_for_eta(eta))?)?);
                }
            }
            BoundId::LbAsymGeneralNoise | BoundId::LbAsymRealReal => {
                return invalid(format!("{id} takes a noise functional or a fixed gamma and is only available through the library"));
            }
            _ => {
                let (Some(m), Some(ng)) = (o.m, &o.n) else {
                    return invalid(format!("{id} needs `m` and `n`"));
                };
                let taus = o.tau_max.as_ref().map(|g| ints(g, "tau_max")).transpose()?.unwrap_or(vec![0]);
                let needs_snr = matches!(
                    id,
                    BoundId::LbBinaryAwgn | BoundId::LbBinaryRealAwgn | BoundId::LbRealRealAwgn | BoundId::UbConjecturedNoisy
                );
                let points: Vec<Option<f64>> = match (&snrs, needs_snr) {
                    (Some(v), true) => v.iter().copied().map(Some).collect(),
                    (None, true) => return invalid(format!("{id} needs `snr_db`")),
                    (_, false) => vec![None],
                };
                for n in ints(ng, "n")? {
                    for &t in &taus {
                        for &db in &points {
                            let eta = db.map(ebn0_db_to_eta);
                            let ctx = BoundRow { m: Some(m), n: Some(n), tau_max: Some(t), snr_db: db, eta, ..Default::default() };
                            rows.push(ctx.render(&super::evaluate_bound(id, m, n, t, eta.unwrap_or(0.0))?)?);
                        }
                    }
                }
            }
        }
    }
    Ok(bounds_csv(rows))
}

fn table1(lib: &mut CodeLibrary, certs: &mut Vec<String>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(TABLE_HEADER.split(',')).map_err(csv_err)?;
    for row in recipe_table_i(lib)? {
        let cert = row.cert.as_ref().map(|c| c.to_string()).unwrap_or_default();
        if !cert.is_empty() {
            certs.push(format!("{} {cert}", row.code));
        }
        w.write_record([
            row.lambda.to_string(),
            row.tau_max.to_string(),
            opt(row.users),
            format!("{:.2}", row.beta),
            if row.literal { "literal" } else { "constructed" }.to_string(),
            row.code,
            cert,
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// A signature set ready for simulation.
struct SimCode {
    name: String,
    signatures: SignatureMatrix,
    tau_max: usize,
    input: InputAlphabet,
    interval_block: Option<usize>,
}

struct BerPlan {
    codes: Vec<SimCode>,
    decoders: Vec<DecoderKind>,
    snr_db: Vec<f64>,
    frames: u64,
    q: usize,
}

fn proposed(lib: &mut CodeLibrary, m: usize, tau: usize, users: Option<usize>, optical: bool, certs: &mut Vec<String>) -> Result<SimCode> {
    let built = if optical {
        build_optical_code_for(lib, m, tau, users)?
    } else {
        build_code_for(lib, m, tau, users)?
    };
    certs.push(format!("{} {}", built.describe(), built.code.cert));
    let interval_block = match built.layout {
        Layout::FullDelay { k, .. } => Some(k),
        Layout::Windowed { .. } => None,
    };
    Ok(SimCode {
        name: "proposed".into(),
        signatures: built.signatures,
        tau_max: tau,
        input: if optical { InputAlphabet::OnOff } else { InputAlphabet::Binary },
        interval_block,
    })
}

fn baseline(kind: BaselineKind, m: usize, n: usize, tau: usize) -> Result<SimCode> {
    let set = gold_like_signatures(m, n, kind)?;
    let input = if kind == BaselineKind::Ooc { InputAlphabet::OnOff } else { InputAlphabet::Binary };
    Ok(SimCode { name: kind.to_string(), signatures: set.signatures, tau_max: tau, input, interval_block: None })
}

fn ber_plan(spec: &ExperimentSpec, lib: &mut CodeLibrary, certs: &mut Vec<String>, warnings: &mut Vec<String>) -> Result<BerPlan> {
    let o = &spec.overrides;
    let (codes, default_decoders) = match spec.recipe {
        Recipe::Fig5 => (
            vec![proposed(lib, 7, 3, Some(4), false, certs)?, baseline(BaselineKind::PseudoGold, 7, 4, 3)?],
            vec![DecoderKind::PseudoMl, DecoderKind::Gpml, DecoderKind::Map, DecoderKind::Ist],
        ),
        Recipe::Fig6 => (
            vec![proposed(lib, 32, 16, Some(9), false, certs)?, baseline(BaselineKind::Gold, 31, 9, 16)?],
            vec![DecoderKind::PseudoMl, DecoderKind::Gpml, DecoderKind::Ist],
        ),
        Recipe::Fig7 => (
            vec![proposed(lib, 32, 16, Some(13), true, certs)?, baseline(BaselineKind::Ooc, 32, 13, 16)?],
            vec![DecoderKind::PseudoMl, DecoderKind::Gpml],
        ),
        Recipe::Custom => {
            let (Some(m), Some(tg)) = (o.m, &o.tau_max) else {
                return invalid("a custom BER run needs `m` and `tau_max`");
            };
            let tau = match ints(tg, "tau_max")?[..] {
                [t] => t,
                _ => return invalid("a custom BER run takes a single tau_max"),
            };
            let optical = o.optical.unwrap_or(false);
            let mut codes = Vec::new();
            for c in o.codes.clone().unwrap_or(vec![CodeChoice::Proposed]) {
                codes.push(match c {
                    CodeChoice::Proposed => proposed(lib, m, tau, o.users, optical, certs)?,
                    CodeChoice::Baseline(k) => {
                        let Some(n) = o.users.or(codes.first().map(|c: &SimCode| c.signatures.users())) else {
                            return invalid(format!("{k} signatures need `users`"));
                        };
                        baseline(k, m, n, tau)?
                    }
                });
            }
            (codes, vec![DecoderKind::PseudoMl])
        }
        r => return invalid(format!("recipe {r} does not simulate bit error rates")),
    };
    let decoders = o.decoders.clone().unwrap_or(default_decoders);
    for c in &codes {
        for d in &decoders {
            if c.interval_block.is_some() && *d != DecoderKind::PseudoMl {
                return invalid(format!("{} with full-symbol delays is decoded with pml only, not {d}", c.name));
            }
            if *d == DecoderKind::Ist && c.input != InputAlphabet::Binary {
                return invalid(format!("the ist decoder needs ±1 inputs, but {} uses on-off keying", c.name));
            }
        }
    }
    let mut frames = o.frames.unwrap_or(DEFAULT_FRAMES);
    if frames == 0 {
        return invalid("frames must be at least 1");
    }
    if frames > FRAME_CAP && !o.full.unwrap_or(false) {
        warnings.push(format!("frames capped at {FRAME_CAP} per point (requested {frames}); set full = true to lift the cap"));
        frames = FRAME_CAP;
    }
    let snr_db = o.snr_db.clone().unwrap_or(Grid::Range { start: 0.0, step: 2.0, end: 20.0 }).points();
    Ok(BerPlan { codes, decoders, snr_db, frames, q: o.q.unwrap_or(5) })
}

/// Run every (code, decoder, SNR) point with its own seed stream.
fn run_ber(plan: &BerPlan, seed: u64, tasks: &mut Vec<TaskSeed>) -> Result<String> {
    let mut s = String::from(BER_HEADER);
    s.push('\n');
    for code in &plan.codes {
        let sig = &code.signatures;
        for &kind in &plan.decoders {
            let mut decoder = DecoderConfig::new(kind);
            decoder.q = plan.q.min(1usize << sig.users().min(63));
            for &db in &plan.snr_db {
                let stream = tasks.len() as u64 + 1;
                tasks.push(TaskSeed { label: format!("code={} decoder={kind} snr_db={db}", code.name), stream });
                let params = SystemParams::new(sig.rows(), sig.users(), code.tau_max, ebn0_db_to_eta(db))?
                    .with_alphabets(code.input, sig.alphabet());
                let setup = BerSetup {
                    signatures: sig,
                    params,
                    delays: DelaySampler::Uniform,
                    decoder,
                    interval_block: code.interval_block,
                };
                let mut rng = derive_rng(seed, stream);
                let count = ber_trial(&setup, plan.frames, &mut rng)?;
                let _ = writeln!(s, "{}", ber_line(db, kind, &code.name, &count));
            }
        }
    }
    Ok(s)
}

fn ber_line(db: f64, kind: DecoderKind, code: &str, c: &BerCount) -> String {
    let (lo, hi) = c.ci95();
    format!("{db},{kind},{code},{},{},{:e},{:e}", c.frames, c.bit_errors, c.ber(), (hi - lo) / 2.0)
}

/// Execute a validated experiment and return its CSV files.
///
/// Nothing is written to disk; see [`RunOutput::write_to`].
pub fn run_recipe(spec: &ExperimentSpec) -> Result<RunOutput> {
    let start = Instant::now();
    let mut certificates = Vec::new();
    let mut tasks = Vec::new();
    let mut warnings = Vec::new();
    let mut lib = CodeLibrary::default();
    let name = spec.recipe.as_str();
    let files = match spec.recipe {
        Recipe::Fig1 => vec![(format!("{name}.csv"), fig1(spec)?)],
        Recipe::Fig2 => vec![(format!("{name}.csv"), fig2(spec)?)],
        Recipe::Fig3 => vec![(format!("{name}.csv"), fig3(spec)?)],
        Recipe::Fig4 => vec![(format!("{name}.csv"), fig4(spec)?)],
        Recipe::Table1 => vec![(format!("{name}.csv"), table1(&mut lib, &mut certificates)?)],
        Recipe::Custom if spec.overrides.task == Some(Task::Bounds) => {
            vec![("bounds.csv".to_string(), custom_bounds(spec)?)]
        }
        Recipe::Custom if spec.overrides.task.is_none() => return invalid("recipe custom needs `task = bounds | ber`"),
        Recipe::Fig5 | Recipe::Fig6 | Recipe::Fig7 | Recipe::Custom => {
            let plan = ber_plan(spec, &mut lib, &mut certificates, &mut warnings)?;
            let file = if spec.recipe == Recipe::Custom { "ber.csv".to_string() } else { format!("{name}.csv") };
            vec![(file, run_ber(&plan, spec.seed, &mut tasks)?)]
        }
    };
    Ok(RunOutput {
        files,
        manifest: RunManifest {
            spec: spec.clone(),
            master_seed: spec.seed,
            tasks,
            certificates,
            wall_clock_s: start.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
        warnings,
    })
}
