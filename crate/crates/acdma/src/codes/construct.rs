use super::verify::{verify, VerifyConfig, VerifyMode};
use super::{CertifiedMatrix, CodeMatrix, Provenance};
use crate::error::{Error, Result};
use crate::model::{Certificate, Family, Method, SignatureAlphabet, SignatureMatrix};

fn expect(w: &CertifiedMatrix, family: Family, role: &str) -> Result<()> {
    if w.family != family {
        return Err(Error::Precondition(format!(
            "{role} must be certified {family}, got {}",
            w.label()
        )));
    }
    Ok(())
}

/// Budget of a doubled matrix built from inputs certified at `budgets`.
///
/// Full-cycle inputs produce a full-cycle output; otherwise the smallest
/// budget carries over unchanged.
fn doubled_budget(m: usize, budgets: &[usize]) -> usize {
    if budgets.iter().all(|&s| s >= m) {
        2 * m
    } else {
        budgets.iter().copied().min().unwrap_or(0).min(m - 1)
    }
}

fn theorem_output(matrix: CodeMatrix, family: Family, s: usize, provenance: Provenance) -> CertifiedMatrix {
    CertifiedMatrix {
        matrix,
        family,
        s,
        cert: Certificate { family, s, method: Method::TheoremChain, seed: 0, trials: 0 },
        provenance,
    }
}

fn same_rows(ws: &[&CertifiedMatrix]) -> Result<usize> {
    let m = ws[0].rows();
    if ws.iter().any(|w| w.rows() != m) {
        let labels: Vec<String> = ws.iter().map(|w| w.label()).collect();
        return Err(Error::Dimension(format!("row counts differ: {}", labels.join(", "))));
    }
    Ok(m)
}

/// `[[W W 1], [W 0 0]]`: a `D(m,n,s)` matrix doubles to `D(2m, 2n+1, s')`.
pub fn build_d_double(w1: &CertifiedMatrix) -> Result<CertifiedMatrix> {
    expect(w1, Family::D, "W1")?;
    let w = &w1.matrix;
    let (m, n) = (w.rows(), w.cols());
    let zeros = CodeMatrix::filled(m, n, 0);
    let mut ones_col = vec![1i8; m];
    ones_col.extend(std::iter::repeat_n(0, m));
    let left = w.vstack(w)?;
    let mid = w.vstack(&zeros)?;
    let last = CodeMatrix::from_cols(2 * m, &[ones_col])?;
    let out = left.hstack(&mid)?.hstack(&last)?;
    Ok(theorem_output(out, Family::D, doubled_budget(m, &[w1.s]), Provenance::Theorem12))
}

/// `[[W1 W2 M1], [W1 −W2 M2]]` with the default pair `M1 = 2D − J`, `M2 = J`.
pub fn build_a_compose(w1: &CertifiedMatrix, w2: &CertifiedMatrix, d: &CertifiedMatrix) -> Result<CertifiedMatrix> {
    let m1 = d.matrix.map(|x| 2 * x - 1);
    let m2 = d.matrix.map(|_| 1);
    build_a_compose_with(w1, w2, &m1, &m2, d)
}

/// As [`build_a_compose`] with an explicit `±1` pair whose average is `d`.
pub fn build_a_compose_with(
    w1: &CertifiedMatrix,
    w2: &CertifiedMatrix,
    m1: &CodeMatrix,
    m2: &CodeMatrix,
    d: &CertifiedMatrix,
) -> Result<CertifiedMatrix> {
    expect(w1, Family::A, "W1")?;
    expect(w2, Family::B, "W2")?;
    expect(d, Family::D, "(M1+M2)/2")?;
    let m = same_rows(&[w1, w2, d])?;
    if !m1.all_in(&[-1, 1]) || !m2.all_in(&[-1, 1]) {
        return Err(Error::Precondition("M1 and M2 must have entries ±1".into()));
    }
    if m1.zip_map(m2, |a, b| (a + b) / 2)? != d.matrix {
        return Err(Error::Precondition("(M1+M2)/2 differs from the certified D matrix".into()));
    }
    let neg_w2 = w2.matrix.map(|x| -x);
    let top = w1.matrix.hstack(&w2.matrix)?.hstack(m1)?;
    let bottom = w1.matrix.hstack(&neg_w2)?.hstack(m2)?;
    let out = top.vstack(&bottom)?;
    Ok(theorem_output(out, Family::A, doubled_budget(m, &[w1.s, w2.s, d.s]), Provenance::Theorem13))
}

/// The raw `[[T1 (J+T2)/2 M1], [T1 (J−T2)/2 0]]` layout, without any
/// certification requirements on the blocks.
pub fn a_tilde_layout(t1: &CodeMatrix, t2: &CodeMatrix, m1: &CodeMatrix) -> Result<CodeMatrix> {
    let plus = t2.map(|x| (1 + x) / 2);
    let minus = t2.map(|x| (1 - x) / 2);
    let zeros = CodeMatrix::filled(m1.rows(), m1.cols(), 0);
    let top = t1.hstack(&plus)?.hstack(m1)?;
    let bottom = t1.hstack(&minus)?.hstack(&zeros)?;
    top.vstack(&bottom)
}

/// Doubling for 0/1 codes: `Ã(m,n,s)`, `B(m,k,s)` and `D(m,l,s)` give
/// `Ã(2m, n+k+l, s')`.
///
/// The middle block must come from a B matrix: folding its two halves
/// leaves `T2` rotated with the wrapped entries negated, so an A matrix is
/// not enough (no `Ã(4,5,4)` exists at all).
pub fn build_a_tilde_compose(
    t1: &CertifiedMatrix,
    t2: &CertifiedMatrix,
    d: &CertifiedMatrix,
) -> Result<CertifiedMatrix> {
    expect(t1, Family::ATilde, "T1")?;
    expect(t2, Family::B, "T2")?;
    expect(d, Family::D, "M1")?;
    let m = same_rows(&[t1, t2, d])?;
    let out = a_tilde_layout(&t1.matrix, &t2.matrix, &d.matrix)?;
    Ok(theorem_output(out, Family::ATilde, doubled_budget(m, &[t1.s, t2.s, d.s]), Provenance::Theorem14))
}

/// Keep a subset of columns; the family property is inherited, but the
/// result is certified afresh.
pub fn keep_columns(w: &CertifiedMatrix, cols: &[usize], cfg: &VerifyConfig) -> Result<CertifiedMatrix> {
    let matrix = w.matrix.select_columns(cols)?;
    certify(matrix, w.family, w.s, w.provenance, cfg)
}

/// Verify `matrix` exhaustively when the proof fits the work budget, and by
/// randomized trials otherwise; a counterexample is an error.
pub fn certify(
    matrix: CodeMatrix,
    family: Family,
    s: usize,
    provenance: Provenance,
    cfg: &VerifyConfig,
) -> Result<CertifiedMatrix> {
    let verdict = match verify(&matrix, family, s, VerifyMode::Exhaustive, cfg) {
        Err(Error::Budget { .. }) => verify(&matrix, family, s, VerifyMode::Randomized, cfg)?,
        other => other?,
    };
    match verdict.certificate {
        Some(cert) if verdict.holds => Ok(CertifiedMatrix { matrix, family, s, cert, provenance }),
        _ => {
            let what = format!("{family}({},{},{})", matrix.rows(), matrix.cols(), s);
            let detail = match verdict.counterexample {
                Some(cx) => format!("shifts {:?}, difference {:?}", cx.shifts, cx.diff),
                None => "zero sum reachable".into(),
            };
            Err(Error::Precondition(format!("{what} fails verification: {detail}")))
        }
    }
}

/// Signature alphabet matching a family's entries.
fn alphabet_for(family: Family) -> Result<SignatureAlphabet> {
    match family {
        Family::A => Ok(SignatureAlphabet::Binary),
        Family::ATilde => Ok(SignatureAlphabet::Optical),
        f => Err(Error::Precondition(format!("{f} matrices are building blocks, not signature sets"))),
    }
}

/// Periodic signatures of length `m` whose window of `m − τ_max` rows is the
/// code matrix `a`, where `τ_max = m − rows(a)`.
pub fn tile_signatures(a: &CertifiedMatrix, m: usize) -> Result<SignatureMatrix> {
    let p = a.rows();
    if m < p {
        return Err(Error::Dimension(format!("{m} chips cannot hold a {p}-row code")));
    }
    let tau = m - p;
    if !a.covers(tau) {
        return Err(Error::Precondition(format!(
            "{} is not certified for delays up to {tau}",
            a.label()
        )));
    }
    let alphabet = alphabet_for(a.family)?;
    let n = a.cols();
    let chips: Vec<i8> = (0..n)
        .flat_map(|c| (0..m).map(move |r| a.matrix.get(r % p, c)))
        .collect();
    Ok(SignatureMatrix::from_chips(m, n, alphabet, &chips)?.with_cert(Some(a.cert.clone())))
}

/// Signatures that stay decodable for delays spanning a whole symbol.
#[derive(Debug, Clone)]
pub struct FullDelayCode {
    pub signatures: SignatureMatrix,
    /// Rows of the underlying code (length of one block).
    pub k: usize,
    /// Extra blocks beyond one per user.
    pub i: usize,
}

impl FullDelayCode {
    pub fn chips(&self) -> usize {
        self.signatures.rows()
    }

    pub fn users(&self) -> usize {
        self.signatures.users()
    }
}

/// Stack `n + i` copies of an `A(k,n,k)` matrix into `k(n+i)`-chip signatures.
pub fn construct_full_delay(a: &CertifiedMatrix, i: usize) -> Result<FullDelayCode> {
    let k = a.rows();
    if i == 0 {
        return Err(Error::InvalidParameter("at least one spare block is needed (i ≥ 1)".into()));
    }
    if !a.covers(k) {
        return Err(Error::Precondition(format!("{} must allow every cyclic shift", a.label())));
    }
    let alphabet = alphabet_for(a.family)?;
    let n = a.cols();
    let m = k * (n + i);
    let chips: Vec<i8> = (0..n)
        .flat_map(|c| (0..m).map(move |r| a.matrix.get(r % k, c)))
        .collect();
    let signatures = SignatureMatrix::from_chips(m, n, alphabet, &chips)?.with_cert(Some(a.cert.clone()));
    Ok(FullDelayCode { signatures, k, i })
}
