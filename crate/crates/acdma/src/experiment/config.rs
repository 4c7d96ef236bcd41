//! Line-oriented `key = value` experiment files.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::bounds::BoundId;
use crate::decoders::{BaselineKind, DecoderKind};
use crate::error::{ConfigIssue, Error, Result};

/// Named reproduction recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Recipe {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Table1,
    Custom,
}

impl Recipe {
    pub const ALL: [Recipe; 9] = [
        Recipe::Fig1,
        Recipe::Fig2,
        Recipe::Fig3,
        Recipe::Fig4,
        Recipe::Fig5,
        Recipe::Fig6,
        Recipe::Fig7,
        Recipe::Table1,
        Recipe::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Recipe::Fig1 => "fig1",
            Recipe::Fig2 => "fig2",
            Recipe::Fig3 => "fig3",
            Recipe::Fig4 => "fig4",
            Recipe::Fig5 => "fig5",
            Recipe::Fig6 => "fig6",
            Recipe::Fig7 => "fig7",
            Recipe::Table1 => "table1",
            Recipe::Custom => "custom",
        }
    }

    /// Keys this recipe accepts besides `recipe`, `seed` and `out`.
    fn keys(self) -> &'static [Key] {
        match self {
            Recipe::Fig1 => &[Key::M, Key::N, Key::TauMax],
            Recipe::Fig2 => &[Key::MValues, Key::Zeta, Key::Lambda],
            Recipe::Fig3 => &[Key::M, Key::N, Key::TauMax, Key::SnrDb],
            Recipe::Fig4 => &[Key::MValues, Key::SnrDb, Key::Beta, Key::Lambda],
            Recipe::Fig5 | Recipe::Fig6 | Recipe::Fig7 => &[Key::SnrDb, Key::Frames, Key::Full, Key::Decoders, Key::Q],
            Recipe::Table1 => &[],
            Recipe::Custom => &[Key::Task, Key::M, Key::N, Key::TauMax, Key::SnrDb, Key::Zeta, Key::Beta, Key::Lambda, Key::Bounds, Key::Codes, Key::Decoders, Key::Q, Key::Users, Key::Frames, Key::Full, Key::Optical],
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Recipe {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase();
        Recipe::ALL
            .into_iter()
            .find(|r| r.as_str() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown recipe `{s}` (expected fig1..fig7, table1, custom)")))
    }
}

/// What a custom run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Bounds,
    Ber,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Bounds => "bounds",
            Task::Ber => "ber",
        })
    }
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bounds" => Ok(Task::Bounds),
            "ber" => Ok(Task::Ber),
            _ => Err(Error::InvalidParameter(format!("unknown task `{s}` (expected bounds or ber)"))),
        }
    }
}

/// Signature family simulated in a BER run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeChoice {
    Proposed,
    Baseline(BaselineKind),
}

impl fmt::Display for CodeChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeChoice::Proposed => f.write_str("proposed"),
            CodeChoice::Baseline(b) => b.fmt(f),
        }
    }
}

impl FromStr for CodeChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("proposed") {
            Ok(CodeChoice::Proposed)
        } else {
            s.trim().parse().map(CodeChoice::Baseline)
        }
    }
}

/// A numeric sweep: either `start:end`, `start:step:end` (inclusive) or an
/// explicit comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Range { start: f64, step: f64, end: f64 },
    List(Vec<f64>),
}

/// Points of a stepped range are rounded to nine decimals so that
/// `0:0.1:1` produces `0.3`, not `0.30000000000000004`.
fn tidy(v: f64) -> f64 {
    let r = (v * 1e9).round() / 1e9;
    if r == 0.0 { 0.0 } else { r }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            Grid::List(v) => v.clone(),
            Grid::Range { start, step, end } => {
                let count = ((end - start) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|i| tidy(start + i as f64 * step)).collect()
            }
        }
    }

    /// Points as nonnegative integers; fails on fractions.
    pub fn integers(&self) -> std::result::Result<Vec<usize>, String> {
        self.points()
            .into_iter()
            .map(|v| {
                if v >= 0.0 && v.fract() == 0.0 {
                    Ok(v as usize)
                } else {
                    Err(format!("`{v}` is not a nonnegative integer"))
                }
            })
            .collect()
    }

    fn parse(s: &str) -> std::result::Result<Grid, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", t.trim())).and_then(|v| {
            if v.is_finite() { Ok(v) } else { Err(format!("`{}` is not finite", t.trim())) }
        });
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let (start, step, end) = match parts[..] {
                [a, b] => (num(a)?, 1.0, num(b)?),
                [a, st, b] => (num(a)?, num(st)?, num(b)?),
                _ => return Err("ranges are `start:end` or `start:step:end`".into()),
            };
            if !(step > 0.0) {
                return Err("range step must be positive".into());
            }
            if end < start {
                return Err(format!("range end {end} is below its start {start}"));
            }
            Ok(Grid::Range { start, step, end })
        } else {
            let v = s.split(',').map(num).collect::<std::result::Result<Vec<f64>, String>>()?;
            if v.is_empty() {
                return Err("empty list".into());
            }
            Ok(Grid::List(v))
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Range { start, step, end } if *step == 1.0 => write!(f, "{start}:{end}"),
            Grid::Range { start, step, end } => write!(f, "{start}:{step}:{end}"),
            Grid::List(v) => {
                let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                f.write_str(&s.join(", "))
            }
        }
    }
}

/// Optional per-run settings; anything left `None` takes the recipe default.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Overrides {
    pub task: Option<Task>,
    pub m: Option<usize>,
    pub n: Option<Grid>,
    pub tau_max: Option<Grid>,
    pub snr_db: Option<Grid>,
    pub m_values: Option<Grid>,
    pub zeta: Option<Grid>,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
    pub frames: Option<u64>,
    pub full: Option<bool>,
    pub bounds: Option<Vec<BoundId>>,
    pub codes: Option<Vec<CodeChoice>>,
    pub decoders: Option<Vec<DecoderKind>>,
    pub q: Option<usize>,
    pub users: Option<usize>,
    pub optical: Option<bool>,
}

/// A parsed, validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub recipe: Recipe,
    pub seed: u64,
    pub overrides: Overrides,
    /// Output directory; `None` lets the caller choose.
    pub output_path: Option<String>,
}

impl ExperimentSpec {
    pub fn new(recipe: Recipe) -> Self {
        ExperimentSpec { recipe, seed: 0, overrides: Overrides::default(), output_path: None }
    }

    /// Canonical `key = value` text; parsing it yields `self` again.
    pub fn serialize(&self) -> String {
        let mut out = format!("recipe = {}\nseed = {}\n", self.recipe, self.seed);
        if let Some(p) = &self.output_path {
            out.push_str(&format!("out = {p}\n"));
        }
        let o = &self.overrides;
        let mut put = |k: Key, v: Option<String>| {
            if let Some(v) = v {
                out.push_str(&format!("{} = {v}\n", k.as_str()));
            }
        };
        let join = |v: Vec<String>| v.join(", ");
        put(Key::Task, o.task.map(|t| t.to_string()));
        put(Key::M, o.m.map(|v| v.to_string()));
        put(Key::N, o.n.as_ref().map(Grid::to_string));
        put(Key::TauMax, o.tau_max.as_ref().map(Grid::to_string));
        put(Key::SnrDb, o.snr_db.as_ref().map(Grid::to_string));
        put(Key::MValues, o.m_values.as_ref().map(Grid::to_string));
        put(Key::Zeta, o.zeta.as_ref().map(Grid::to_string));
        put(Key::Lambda, o.lambda.map(|v| v.to_string()));
        put(Key::Beta, o.beta.map(|v| v.to_string()));
        put(Key::Frames, o.frames.map(|v| v.to_string()));
        put(Key::Full, o.full.map(|v| v.to_string()));
        put(Key::Bounds, o.bounds.as_ref().map(|v| join(v.iter().map(|b| b.to_string()).collect())));
        put(Key::Codes, o.codes.as_ref().map(|v| join(v.iter().map(|b| b.to_string()).collect())));
        put(Key::Decoders, o.decoders.as_ref().map(|v| join(v.iter().map(|b| b.to_string()).collect())));
        put(Key::Q, o.q.map(|v| v.to_string()));
        put(Key::Users, o.users.map(|v| v.to_string()));
        put(Key::Optical, o.optical.map(|v| v.to_string()));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Recipe,
    Seed,
    Out,
    Task,
    M,
    N,
    TauMax,
    SnrDb,
    MValues,
    Zeta,
    Lambda,
    Beta,
    Frames,
    Full,
    Bounds,
    Codes,
    Decoders,
    Q,
    Users,
    Optical,
}

impl Key {
    const ALL: [Key; 20] = [
        Key::Recipe,
        Key::Seed,
        Key::Out,
        Key::Task,
        Key::M,
        Key::N,
        Key::TauMax,
        Key::SnrDb,
        Key::MValues,
        Key::Zeta,
        Key::Lambda,
        Key::Beta,
        Key::Frames,
        Key::Full,
        Key::Bounds,
        Key::Codes,
        Key::Decoders,
        Key::Q,
        Key::Users,
        Key::Optical,
    ];

    fn as_str(self) -> &'static str {
        match self {
            Key::Recipe => "recipe",
            Key::Seed => "seed",
            Key::Out => "out",
            Key::Task => "task",
            Key::M => "m",
            Key::N => "n",
            Key::TauMax => "tau_max",
            Key::SnrDb => "snr_db",
            Key::MValues => "m_values",
            Key::Zeta => "zeta",
            Key::Lambda => "lambda",
            Key::Beta => "beta",
            Key::Frames => "frames",
            Key::Full => "full",
            Key::Bounds => "bounds",
            Key::Codes => "codes",
            Key::Decoders => "decoders",
            Key::Q => "q",
            Key::Users => "users",
            Key::Optical => "optical",
        }
    }
}

fn list<T: FromStr<Err = Error>>(v: &str) -> std::result::Result<Vec<T>, String> {
    let items = v
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<Vec<T>, String>>()?;
    if items.is_empty() { Err("empty list".into()) } else { Ok(items) }
}

fn scalar<T: FromStr>(v: &str, what: &str) -> std::result::Result<T, String> {
    v.parse::<T>().map_err(|_| format!("`{v}` is not {what}"))
}

/// Parse and check an experiment file, reporting every problem at once.
///
/// Nothing is applied unless the whole file is valid.
pub fn validate_config(text: &str) -> Result<ExperimentSpec> {
    let mut issues: Vec<ConfigIssue> = Vec::new();
    let mut seen: Vec<(Key, usize)> = Vec::new();
    let mut spec = ExperimentSpec::new(Recipe::Custom);
    let mut recipe: Option<Recipe> = None;
    let issue = |line: Option<usize>, key: Option<&str>, message: String| ConfigIssue {
        line,
        key: key.map(str::to_string),
        message,
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            issues.push(issue(Some(line), None, format!("expected `key = value`, found `{content}`")));
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        let Some(key) = Key::ALL.into_iter().find(|c| c.as_str() == k) else {
            issues.push(issue(Some(line), Some(k), format!("unknown key `{k}`")));
            continue;
        };
        if let Some(&(_, first)) = seen.iter().find(|(s, _)| *s == key) {
            issues.push(issue(Some(line), Some(k), format!("duplicate key (first set on line {first})")));
            continue;
        }
        seen.push((key, line));
        if v.is_empty() {
            issues.push(issue(Some(line), Some(k), "missing value".into()));
            continue;
        }
        let o = &mut spec.overrides;
        let res: std::result::Result<(), String> = match key {
            Key::Recipe => v.parse::<Recipe>().map(|r| recipe = Some(r)).map_err(|e| e.to_string()),
            Key::Seed => scalar(v, "an unsigned integer").map(|s| spec.seed = s),
            Key::Out => {
                spec.output_path = Some(v.to_string());
                Ok(())
            }
            Key::Task => v.parse().map(|t| o.task = Some(t)).map_err(|e: Error| e.to_string()),
            Key::M => scalar(v, "a positive integer").map(|m| o.m = Some(m)),
            Key::N => Grid::parse(v).map(|g| o.n = Some(g)),
            Key::TauMax => Grid::parse(v).map(|g| o.tau_max = Some(g)),
            Key::SnrDb => Grid::parse(v).map(|g| o.snr_db = Some(g)),
            Key::MValues => Grid::parse(v).map(|g| o.m_values = Some(g)),
            Key::Zeta => Grid::parse(v).map(|g| o.zeta = Some(g)),
            Key::Lambda => scalar(v, "a number").map(|x| o.lambda = Some(x)),
            Key::Beta => scalar(v, "a number").map(|x| o.beta = Some(x)),
            Key::Frames => scalar(v, "an unsigned integer").map(|x| o.frames = Some(x)),
            Key::Full => scalar(v, "true or false").map(|x| o.full = Some(x)),
            Key::Bounds => list(v).map(|x| o.bounds = Some(x)),
            Key::Codes => list(v).map(|x| o.codes = Some(x)),
            Key::Decoders => list(v).map(|x| o.decoders = Some(x)),
            Key::Q => scalar(v, "a positive integer").map(|x| o.q = Some(x)),
            Key::Users => scalar(v, "a positive integer").map(|x| o.users = Some(x)),
            Key::Optical => scalar(v, "true or false").map(|x| o.optical = Some(x)),
        };
        if let Err(message) = res {
            issues.push(issue(Some(line), Some(k), message));
        }
    }

    let line_of = |key: Key| seen.iter().find(|(k, _)| *k == key).map(|&(_, l)| l);
    match recipe {
        None if !seen.iter().any(|(k, _)| *k == Key::Recipe) => issues.push(issue(
            None,
            Some("recipe"),
            "no recipe given; set `recipe = fig1..fig7 | table1 | custom` (custom would be assumed)".into(),
        )),
        None => {}
        Some(r) => {
            spec.recipe = r;
            let allowed: BTreeSet<Key> =
                [Key::Recipe, Key::Seed, Key::Out].into_iter().chain(r.keys().iter().copied()).collect();
            for &(k, l) in &seen {
                if !allowed.contains(&k) {
                    issues.push(issue(Some(l), Some(k.as_str()), format!("`{}` is not a parameter of recipe {r}", k.as_str())));
                }
            }
        }
    }
    check_ranges(&spec, &line_of, &mut issues);

    if issues.is_empty() {
        Ok(spec)
    } else {
        Err(Error::Config(issues))
    }
}

fn check_ranges(spec: &ExperimentSpec, line_of: &dyn Fn(Key) -> Option<usize>, issues: &mut Vec<ConfigIssue>) {
    let o = &spec.overrides;
    let mut bad = |key: Key, message: String| {
        issues.push(ConfigIssue { line: line_of(key), key: Some(key.as_str().into()), message });
    };
    if o.m == Some(0) {
        bad(Key::M, "m must be at least 1".into());
    }
    let ints = |g: &Option<Grid>| g.as_ref().map(Grid::integers);
    match ints(&o.n) {
        Some(Err(e)) => bad(Key::N, e),
        Some(Ok(v)) if v.contains(&0) => bad(Key::N, "user counts must be at least 1".into()),
        _ => {}
    }
    match ints(&o.tau_max) {
        Some(Err(e)) => bad(Key::TauMax, e),
        Some(Ok(v)) => {
            if let (Some(m), Some(&t)) = (o.m.or(default_m(spec.recipe)), v.iter().max()) {
                if t > m {
                    bad(Key::TauMax, format!("tau_max = {t} violates tau_max <= m (m = {m})"));
                }
            }
        }
        None => {}
    }
    match ints(&o.m_values) {
        Some(Err(e)) => bad(Key::MValues, e),
        Some(Ok(v)) if v.iter().any(|&m| m < 2) => bad(Key::MValues, "signature lengths must be at least 2".into()),
        _ => {}
    }
    if let Some(z) = &o.zeta {
        if z.points().iter().any(|&v| !(v > 0.0)) {
            bad(Key::Zeta, "zeta must be positive".into());
        }
    }
    if let Some(l) = o.lambda {
        if !(0.0..=1.0).contains(&l) {
            bad(Key::Lambda, format!("lambda = {l} outside [0, 1]"));
        }
    }
    if let Some(b) = o.beta {
        if !(b > 0.0) {
            bad(Key::Beta, format!("beta = {b} must be positive"));
        }
    }
    if o.frames == Some(0) {
        bad(Key::Frames, "frames must be at least 1".into());
    }
    if o.q == Some(0) {
        bad(Key::Q, "q must be at least 1".into());
    }
    if o.users == Some(0) {
        bad(Key::Users, "users must be at least 1".into());
    }
    if spec.recipe == Recipe::Custom {
        match o.task {
            Some(Task::Ber) if o.m.is_none() || o.tau_max.is_none() => {
                bad(Key::Task, "a custom BER run needs `m` and `tau_max`".into())
            }
            Some(Task::Ber) => {
                if let Some(Ok(v)) = ints(&o.tau_max) {
                    if v.len() != 1 {
                        bad(Key::TauMax, "a custom BER run takes a single tau_max".into());
                    }
                }
            }
            Some(Task::Bounds) if o.bounds.is_none() => bad(Key::Task, "a custom bounds run needs `bounds`".into()),
            Some(Task::Bounds) => {}
            None if line_of(Key::Recipe).is_some() => bad(Key::Task, "recipe custom needs `task = bounds | ber`".into()),
            None => {}
        }
    }
}

/// Symbol length fixed by a recipe, used when checking `tau_max`.
pub(crate) fn default_m(recipe: Recipe) -> Option<usize> {
    match recipe {
        Recipe::Fig1 | Recipe::Fig3 => Some(64),
        _ => None,
    }
}
