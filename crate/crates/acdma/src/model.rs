//! Shared domain types and the chip-asynchronous channel.
//!
//! A symbol period spans `m` chips.  User `i` starts transmitting `τ_i` chips
//! after the receiver window opens, so window row `r` carries chip
//! `r - τ_i` of the current symbol when `r ≥ τ_i` and the tail chip
//! `m - τ_i + r` of the previous symbol otherwise.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// The crate-wide deterministic generator.
pub type SimRng = ChaCha8Rng;

/// Derive an independent generator for `(master seed, stream index)`.
pub fn derive_rng(master: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Alphabet of the transmitted data symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputAlphabet {
    /// Antipodal `±1` symbols.
    Binary,
    /// On-off keyed `{0, 1}` symbols, used for intensity-modulated optical links.
    OnOff,
    /// Real-valued (Gaussian) inputs; only meaningful for the bounds.
    Real,
}

impl InputAlphabet {
    /// The two symbol values in lexicographic order.
    pub fn symbols(self) -> Option<[i8; 2]> {
        match self {
            InputAlphabet::Binary => Some([-1, 1]),
            InputAlphabet::OnOff => Some([0, 1]),
            InputAlphabet::Real => None,
        }
    }

    /// Mean and variance of a uniformly drawn symbol.
    pub fn moments(self) -> (f64, f64) {
        match self {
            InputAlphabet::Binary | InputAlphabet::Real => (0.0, 1.0),
            InputAlphabet::OnOff => (0.5, 0.25),
        }
    }
}

/// Alphabet of the signature chips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignatureAlphabet {
    Binary,
    Optical,
    Quaternary,
    Ternary,
    Real,
}

impl SignatureAlphabet {
    pub fn is_complex(self) -> bool {
        matches!(self, SignatureAlphabet::Quaternary)
    }

    pub fn contains(self, re: f64, im: f64) -> bool {
        match self {
            SignatureAlphabet::Binary => im == 0.0 && (re == 1.0 || re == -1.0),
            SignatureAlphabet::Optical => im == 0.0 && (re == 0.0 || re == 1.0),
            SignatureAlphabet::Ternary => im == 0.0 && (re == 0.0 || re.abs() == 1.0),
            SignatureAlphabet::Quaternary => {
                (im == 0.0 && re.abs() == 1.0) || (re == 0.0 && im.abs() == 1.0)
            }
            SignatureAlphabet::Real => im == 0.0 && re.is_finite(),
        }
    }
}

impl fmt::Display for SignatureAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignatureAlphabet::Binary => "binary",
            SignatureAlphabet::Optical => "optical",
            SignatureAlphabet::Quaternary => "quaternary",
            SignatureAlphabet::Ternary => "ternary",
            SignatureAlphabet::Real => "real",
        })
    }
}

impl FromStr for SignatureAlphabet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "binary" => SignatureAlphabet::Binary,
            "optical" => SignatureAlphabet::Optical,
            "quaternary" => SignatureAlphabet::Quaternary,
            "ternary" => SignatureAlphabet::Ternary,
            "real" => SignatureAlphabet::Real,
            other => return invalid(format!("unknown signature alphabet `{other}`")),
        })
    }
}

/// Matrix family a certificate vouches for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Every `s`-rotation is injective on `{±1}^n`.
    A,
    /// Every `s`-rotation is injective on `{0,1}^n`.
    ATilde,
    /// Every signed `s̄`-rotation is injective on `{±1}^n`.
    B,
    /// Over GF(2), no `s`-rotation maps a nonzero input to the all-zero or all-one word.
    D,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::A => "A",
            Family::ATilde => "A_tilde",
            Family::B => "B",
            Family::D => "D",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "A" => Family::A,
            "A_TILDE" | "ATILDE" | "AT" => Family::ATilde,
            "B" => Family::B,
            "D" => Family::D,
            other => return invalid(format!("unknown matrix family `{other}`")),
        })
    }
}

/// How a certificate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exhaustive,
    Randomized,
    TheoremChain,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exhaustive => "EXHAUSTIVE",
            Method::Randomized => "RANDOMIZED",
            Method::TheoremChain => "THEOREM_CHAIN",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "EXHAUSTIVE" => Method::Exhaustive,
            "RANDOMIZED" => Method::Randomized,
            "THEOREM_CHAIN" => Method::TheoremChain,
            other => return invalid(format!("unknown verification method `{other}`")),
        })
    }
}

/// Verification record attached to a matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub family: Family,
    /// Certified shift budget; a value `≥ rows` means every cyclic shift.
    pub s: usize,
    pub method: Method,
    pub seed: u64,
    /// Randomized trials, or enumeration steps for exhaustive proofs.
    pub trials: u64,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "family={} s={} method={} seed={} trials={}",
            self.family, self.s, self.method, self.seed, self.trials
        )
    }
}

impl FromStr for Certificate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut family = None;
        let mut budget = None;
        let mut method = None;
        let mut seed = 0;
        let mut trials = 0;
        for tok in s.split_whitespace() {
            let Some((k, v)) = tok.split_once('=') else {
                return invalid(format!("malformed certificate token `{tok}`"));
            };
            let num = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad number `{v}` for `{k}`")))
            };
            match k {
                "family" => family = Some(v.parse()?),
                "s" => budget = Some(num(v)? as usize),
                "method" => method = Some(v.parse()?),
                "seed" => seed = num(v)?,
                "trials" => trials = num(v)?,
                _ => return invalid(format!("unknown certificate field `{k}`")),
            }
        }
        match (family, budget, method) {
            (Some(family), Some(s), Some(method)) => Ok(Certificate { family, s, method, seed, trials }),
            _ => invalid("certificate needs family, s and method"),
        }
    }
}

/// The coordinates of every computation: chips, users, delay spread, SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub m: usize,
    pub n: usize,
    pub tau_max: usize,
    /// Normalised SNR η.
    pub eta: f64,
    pub input: InputAlphabet,
    pub signature: SignatureAlphabet,
}

impl SystemParams {
    pub fn new(m: usize, n: usize, tau_max: usize, eta: f64) -> Result<Self> {
        let p = SystemParams {
            m,
            n,
            tau_max,
            eta,
            input: InputAlphabet::Binary,
            signature: SignatureAlphabet::Binary,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_alphabets(mut self, input: InputAlphabet, signature: SignatureAlphabet) -> Self {
        self.input = input;
        self.signature = signature;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return invalid(format!("m and n must be positive (m={}, n={})", self.m, self.n));
        }
        if self.tau_max > self.m {
            return invalid(format!("tau_max={} exceeds m={}", self.tau_max, self.m));
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return invalid(format!("eta must be finite and nonnegative, got {}", self.eta));
        }
        Ok(())
    }

    /// Largest delay a user may actually take: `τ_max`, capped at `m − 1`
    /// because a delay of a whole symbol is indistinguishable from zero.
    pub fn max_delay(&self) -> usize {
        self.tau_max.min(self.m - 1)
    }
}

/// Convert `E_b/N₀` in dB to the normalised SNR η used throughout.
pub fn ebn0_db_to_eta(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Inverse of [`ebn0_db_to_eta`].
pub fn eta_to_ebn0_db(eta: f64) -> f64 {
    10.0 * eta.log10()
}

/// An `m × n` chip matrix over a declared alphabet, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureMatrix {
    m: usize,
    n: usize,
    alphabet: SignatureAlphabet,
    re: Vec<f64>,
    im: Vec<f64>,
    /// Whether the channel applies the `1/√m` chip normalisation.
    pub normalized: bool,
    pub cert: Option<Certificate>,
}

impl SignatureMatrix {
    /// Build from column-major real entries.
    pub fn from_real(m: usize, n: usize, alphabet: SignatureAlphabet, re: Vec<f64>) -> Result<Self> {
        Self::from_complex(m, n, alphabet, re, Vec::new())
    }

    /// Build from column-major real and imaginary parts (`im` may be empty).
    pub fn from_complex(
        m: usize,
        n: usize,
        alphabet: SignatureAlphabet,
        re: Vec<f64>,
        im: Vec<f64>,
    ) -> Result<Self> {
        if m == 0 || n == 0 || re.len() != m * n || !(im.is_empty() || im.len() == m * n) {
            return Err(Error::Dimension(format!(
                "expected {m}x{n} entries, got {} real / {} imaginary",
                re.len(),
                im.len()
            )));
        }
        for (k, &r) in re.iter().enumerate() {
            let i = if im.is_empty() { 0.0 } else { im[k] };
            if !alphabet.contains(r, i) {
                return invalid(format!(
                    "entry ({}, {}) = {r}{:+}j is not in the {alphabet} alphabet",
                    k % m,
                    k / m,
                    i
                ));
            }
        }
        let im = if im.iter().all(|&v| v == 0.0) { Vec::new() } else { im };
        Ok(Self { m, n, alphabet, re, im, normalized: true, cert: None })
    }

    /// Build from column-major integer chips (`±1`, `0/1` or ternary).
    pub fn from_chips(m: usize, n: usize, alphabet: SignatureAlphabet, chips: &[i8]) -> Result<Self> {
        Self::from_real(m, n, alphabet, chips.iter().map(|&c| c as f64).collect())
    }

    pub fn with_cert(mut self, cert: Option<Certificate>) -> Self {
        self.cert = cert;
        self
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn users(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> SignatureAlphabet {
        self.alphabet
    }

    pub fn is_complex(&self) -> bool {
        !self.im.is_empty()
    }

    /// Entry `(row, col)` as `(re, im)`.
    pub fn entry(&self, row: usize, col: usize) -> (f64, f64) {
        let k = col * self.m + row;
        (self.re[k], if self.im.is_empty() { 0.0 } else { self.im[k] })
    }

    pub fn column_re(&self, col: usize) -> &[f64] {
        &self.re[col * self.m..(col + 1) * self.m]
    }

    pub fn column_im(&self, col: usize) -> Option<&[f64]> {
        (!self.im.is_empty()).then(|| &self.im[col * self.m..(col + 1) * self.m])
    }

    /// Keep only the listed columns.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if cols.is_empty() || cols.iter().any(|&c| c >= self.n) {
            return invalid("column selection out of range");
        }
        let mut re = Vec::with_capacity(cols.len() * self.m);
        let mut im = Vec::new();
        for &c in cols {
            re.extend_from_slice(self.column_re(c));
            if let Some(col) = self.column_im(c) {
                im.extend_from_slice(col);
            }
        }
        Ok(Self { m: self.m, n: cols.len(), alphabet: self.alphabet, re, im, normalized: self.normalized, cert: None })
    }

    /// Rows of the real channel model: `m`, or `2m` for complex signatures.
    pub fn real_rows(&self) -> usize {
        if self.is_complex() { 2 * self.m } else { self.m }
    }
}

/// Per-user integer delays in chips.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DelayProfile {
    pub delays: Vec<usize>,
}

impl DelayProfile {
    pub fn new(delays: Vec<usize>) -> Self {
        Self { delays }
    }

    pub fn zeros(n: usize) -> Self {
        Self { delays: vec![0; n] }
    }

    /// Uniform delays in `[0, params.max_delay()]`.
    pub fn random<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> Self {
        let hi = params.max_delay();
        Self { delays: (0..params.n).map(|_| rng.random_range(0..=hi)).collect() }
    }

    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        if self.delays.len() != params.n {
            return Err(Error::Dimension(format!(
                "delay profile has {} entries for {} users",
                self.delays.len(),
                params.n
            )));
        }
        if let Some((i, &d)) = self.delays.iter().enumerate().find(|(_, &d)| d > params.max_delay()) {
            return invalid(format!(
                "delay of user {i} is {d}, outside [0, {}]",
                params.max_delay()
            ));
        }
        Ok(())
    }
}

/// One symbol period of the linear model `y = C_p x + C_I x_prev + N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInstance {
    /// Chips per symbol; complex signatures give `2·chips` real rows.
    pub chips: usize,
    pub c_p: DMatrix<f64>,
    pub c_i: DMatrix<f64>,
    pub gain: f64,
    pub sigma: f64,
}

impl ChannelInstance {
    pub fn rows(&self) -> usize {
        self.c_p.nrows()
    }

    pub fn users(&self) -> usize {
        self.c_p.ncols()
    }

    /// Real rows `r` with `τ_max ≤ r mod chips`, where no previous symbol reaches.
    pub fn window_rows(&self, tau_max: usize) -> Vec<usize> {
        (0..self.rows()).filter(|r| r % self.chips >= tau_max).collect()
    }

    /// Noiseless received vector.
    pub fn mean(&self, x_prev: &[i8], x_cur: &[i8]) -> DVector<f64> {
        let xp = to_vec(x_prev);
        let xc = to_vec(x_cur);
        &self.c_p * xc + &self.c_i * xp
    }
}

pub(crate) fn to_vec(x: &[i8]) -> DVector<f64> {
    DVector::from_iterator(x.len(), x.iter().map(|&v| v as f64))
}

/// Signal gain `r` for the given SNR.
///
/// Binary inputs over binary or optical chips use `r = √(2η)`; every other
/// combination calibrates the received power per chip against the noise with
/// the trace formula `r² = m·n·η·σ² / tr(A Σ Aᴴ)`, where `A` is the
/// normalised signature matrix and `Σ = var·I + mean²·J` is the input
/// covariance for i.i.d. uniform symbols.
pub fn snr_to_gain(params: &SystemParams, sig: &SignatureMatrix) -> Result<f64> {
    params.validate()?;
    if params.eta == 0.0 {
        return Ok(0.0);
    }
    if params.input == InputAlphabet::Binary
        && matches!(sig.alphabet(), SignatureAlphabet::Binary | SignatureAlphabet::Optical)
    {
        return Ok((2.0 * params.eta).sqrt());
    }
    let (mean, var) = params.input.moments();
    let scale = if sig.normalized { 1.0 / sig.rows() as f64 } else { 1.0 };
    // tr(A Σ Aᴴ) = var·‖A‖_F² + mean²·‖A·1‖²
    let mut frob = 0.0;
    let mut row_sums_re = vec![0.0; sig.rows()];
    let mut row_sums_im = vec![0.0; sig.rows()];
    for c in 0..sig.users() {
        for r in 0..sig.rows() {
            let (a, b) = sig.entry(r, c);
            frob += a * a + b * b;
            row_sums_re[r] += a;
            row_sums_im[r] += b;
        }
    }
    let ones: f64 = row_sums_re.iter().zip(&row_sums_im).map(|(a, b)| a * a + b * b).sum();
    let trace = scale * (var * frob + mean * mean * ones);
    if trace <= 0.0 {
        return Err(Error::Numerical("signature matrix has zero received power".into()));
    }
    Ok((sig.rows() as f64 * params.n as f64 * params.eta / trace).sqrt())
}

/// Assemble `(C_p, C_I)` for a delay profile with an explicit gain and noise level.
pub fn build_channel_with(sig: &SignatureMatrix, d: &DelayProfile, gain: f64, sigma: f64) -> Result<ChannelInstance> {
    let m = sig.rows();
    let n = sig.users();
    if d.delays.len() != n {
        return Err(Error::Dimension(format!("{} delays for {n} users", d.delays.len())));
    }
    if let Some(&bad) = d.delays.iter().find(|&&t| t >= m) {
        return invalid(format!("delay {bad} must be below the symbol length {m}"));
    }
    let scale = if sig.normalized { gain / (m as f64).sqrt() } else { gain };
    let rows = sig.real_rows();
    let mut c_p = DMatrix::zeros(rows, n);
    let mut c_i = DMatrix::zeros(rows, n);
    for (i, &tau) in d.delays.iter().enumerate() {
        let parts: [Option<&[f64]>; 2] = [Some(sig.column_re(i)), sig.column_im(i)];
        for (half, col) in parts.iter().enumerate() {
            let Some(col) = col else { continue };
            let off = half * m;
            for r in 0..m {
                if r >= tau {
                    c_p[(off + r, i)] = scale * col[r - tau];
                } else {
                    c_i[(off + r, i)] = scale * col[m - tau + r];
                }
            }
        }
    }
    Ok(ChannelInstance { chips: m, c_p, c_i, gain, sigma })
}

/// Assemble the channel with the gain implied by `params.eta` and unit noise.
pub fn build_channel(sig: &SignatureMatrix, d: &DelayProfile, params: &SystemParams) -> Result<ChannelInstance> {
    if sig.rows() != params.m || sig.users() != params.n {
        return Err(Error::Dimension(format!(
            "signature matrix is {}x{}, params expect {}x{}",
            sig.rows(),
            sig.users(),
            params.m,
            params.n
        )));
    }
    d.validate(params)?;
    let gain = snr_to_gain(params, sig)?;
    build_channel_with(sig, d, gain, 1.0)
}

/// `C_p x_cur + C_I x_prev + N` with i.i.d. `N(0, σ²)` chips.
pub fn transmit<R: Rng + ?Sized>(ch: &ChannelInstance, x_prev: &[i8], x_cur: &[i8], rng: &mut R) -> Result<DVector<f64>> {
    if x_prev.len() != ch.users() || x_cur.len() != ch.users() {
        return Err(Error::Dimension(format!(
            "input vectors of length {}/{} for {} users",
            x_prev.len(),
            x_cur.len(),
            ch.users()
        )));
    }
    let mut y = ch.mean(x_prev, x_cur);
    if ch.sigma > 0.0 {
        for v in y.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *v += ch.sigma * z;
        }
    }
    Ok(y)
}

/// Draw a uniform symbol vector.
pub fn random_symbols<R: Rng + ?Sized>(alphabet: InputAlphabet, n: usize, rng: &mut R) -> Vec<i8> {
    let [a, b] = alphabet.symbols().unwrap_or([-1, 1]);
    (0..n).map(|_| if rng.random::<bool>() { b } else { a }).collect()
}

/// One frame of a symbol stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub x_prev: Vec<i8>,
    pub x_cur: Vec<i8>,
    pub y: DVector<f64>,
}

/// Generate `num_symbols` consecutive frames for a fixed delay profile,
/// threading each frame's symbols into the next frame's interference.
pub fn stream_frames<R: Rng + ?Sized>(
    sig: &SignatureMatrix,
    d: &DelayProfile,
    params: &SystemParams,
    num_symbols: usize,
    rng: &mut R,
) -> Result<Vec<Frame>> {
    if num_symbols == 0 {
        return invalid("num_symbols must be at least 1");
    }
    let ch = build_channel(sig, d, params)?;
    let mut x_prev = random_symbols(params.input, params.n, rng);
    let mut out = Vec::with_capacity(num_symbols);
    for _ in 0..num_symbols {
        let x_cur = random_symbols(params.input, params.n, rng);
        let y = transmit(&ch, &x_prev, &x_cur, rng)?;
        out.push(Frame { x_prev: x_prev.clone(), x_cur: x_cur.clone(), y });
        x_prev = x_cur;
    }
    Ok(out)
}
