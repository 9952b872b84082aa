//! Command-line front end.
//!
//! Every subcommand produces rows. `table` prints them space-separated with
//! no header, `tsv` prints a header line then tab-separated rows, `json`
//! prints one JSON document per row.

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arith::{phi, phi_tilde, sigma, sigma_nm, sigma_tilde};
use crate::certificate::{decompose, verify_certificate, SolutionCertificate};
use crate::error::{integrity, usage, Error, Result};
use crate::exceptional::{corollary_summary, factored_text, realize, solve_profiles, DqSpec, OmegaProfile};
use crate::factor::factor;
use crate::family::{instantiate, sample_vector, verify_identity, FamilyVector, IdentityReport};
use crate::field::FieldSpec;
use crate::irreducible::{build_table, build_table_with_budget, count_irreducibles, DEFAULT_SIEVE_BUDGET};
use crate::poly::Polynomial;
use crate::search::{search_with, SearchOptions, DEFAULT_SEARCH_BUDGET};
use crate::text::{format_elem, parse_modulus, parse_poly};
use crate::zsigmondy::{decompose_product, residual_multisets, Exception, PrimitiveSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Tsv,
}

#[derive(Debug, Parser)]
#[command(name = "phisigma", version, about = "Totient and divisor-sum equations over F_q[T]")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "PHISIGMA_OUTPUT", default_value = "table")]
    pub output: Format,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Seed for sampled runs.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of polynomials enumerated by a sieve or search side.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
    /// Modulus for an extension field, e.g. "x^2+x+2".
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Worker threads for search.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FieldArg {
    #[arg(long)]
    pub q: u32,
}

#[derive(Debug, Args)]
pub struct PolyArgs {
    #[arg(long)]
    pub q: u32,
    /// Polynomial in T, e.g. "T^2+T+1".
    pub poly: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Irreducible counts pi_q(d) for d = 1..=max-degree.
    Pi {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        max_degree: usize,
    },
    /// Factor a polynomial.
    Factor(PolyArgs),
    /// Polynomial totient phi(F).
    Phi(PolyArgs),
    /// Sum of norms of monic divisors sigma(F).
    Sigma(PolyArgs),
    /// Sum of norms over all divisors, (q-1) sigma(F).
    SigmaNm(PolyArgs),
    /// Polynomial divisor sum: sum of monic divisors.
    SigmaTilde(PolyArgs),
    /// Polynomial totient analogue: prod (P-1) P^(e-1).
    PhiTilde(PolyArgs),
    /// All monic pairs with phi(F) = sigma(G) within degree bounds.
    Search {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        max_deg_f: usize,
        #[arg(long)]
        max_deg_g: usize,
        /// Decompose and verify every solution; exit 3 on any failure.
        #[arg(long)]
        certify: bool,
    },
    /// Decompose one solution and verify the certificate.
    Certify {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Check a certificate given as JSON (file path, or - for stdin).
    Verify { path: String },
    /// A member of V_q(v).
    Family {
        #[arg(long)]
        q: u32,
        /// Comma-separated vector; sampled from --seed when omitted.
        #[arg(long)]
        v: Option<String>,
        #[arg(long, default_value_t = 0)]
        index: u128,
        #[arg(long)]
        verify: bool,
    },
    /// Exceptional count profiles for q = 2 or 3.
    Exceptional {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        realize: bool,
        /// Head-count summary instead of the profile list.
        #[arg(long)]
        summary: bool,
    },
    /// Primitive prime divisors of a^n - b^n for n = 1..=max-n.
    Zsigmondy {
        #[arg(long)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        b: u64,
        #[arg(long)]
        max_n: u32,
    },
    /// Split N = prod (a^{n_i} - 1) into forced exponents and a residual.
    Decompose {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        value: String,
    },
}

struct Output {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    docs: Vec<Value>,
    /// Error returned after printing, for exit-code purposes.
    failure: Option<Error>,
}

impl Output {
    fn new(header: &[&'static str]) -> Self {
        Output { header: header.to_vec(), rows: Vec::new(), docs: Vec::new(), failure: None }
    }

    fn push(&mut self, row: Vec<String>, doc: Value) {
        self.rows.push(row);
        self.docs.push(doc);
    }

    fn render(&self, format: Format) -> String {
        let mut s = String::new();
        match format {
            Format::Table => {
                for r in &self.rows {
                    s.push_str(&r.join(" "));
                    s.push('\n');
                }
            }
            Format::Tsv => {
                s.push_str(&self.header.join("\t"));
                s.push('\n');
                for r in &self.rows {
                    s.push_str(&r.join("\t"));
                    s.push('\n');
                }
            }
            Format::Json => {
                for d in &self.docs {
                    s.push_str(&d.to_string());
                    s.push('\n');
                }
            }
        }
        s
    }
}

fn field(q: u32, g: &Global) -> Result<FieldSpec> {
    let base = FieldSpec::new(q)?;
    match &g.modulus {
        None => Ok(base),
        Some(_) if base.is_prime_field() => Err(usage!("--modulus applies only to extension fields, q = {q} is prime")),
        Some(m) => FieldSpec::with_modulus(base.p(), &parse_modulus(m, base.p())?),
    }
}

fn poly_table(f: &FieldSpec, p: &Polynomial, g: &Global) -> Result<crate::irreducible::IrreducibleTable> {
    build_table_with_budget(f, (p.degree().unwrap_or(0) / 2).max(1), g.budget.unwrap_or(DEFAULT_SIEVE_BUDGET))
}

fn profile_row(spec: &DqSpec, p: &OmegaProfile) -> (Vec<String>, Value) {
    let mut row = Vec::new();
    let mut doc = serde_json::Map::new();
    for (&d, &c) in p.f_counts() {
        row.push(c.to_string());
        doc.insert(format!("f{d}"), json!(c));
    }
    for (&(d, i), &c) in p.g_counts() {
        row.push(c.to_string());
        doc.insert(format!("g{d}_{i}"), json!(c));
    }
    for &d in spec.divisors() {
        row.push(p.heads(d).to_string());
        doc.insert(format!("n{d}"), json!(p.heads(d)));
    }
    if let Some((a, b, c, d, e)) = p.q3_coordinates() {
        let t = format!("({a},{b},{c},{d},{e})");
        row.push(t.clone());
        doc.insert("tuple".into(), json!(t));
    }
    (row, Value::Object(doc))
}

fn profile_header(spec: &DqSpec) -> Vec<&'static str> {
    let leak = |s: String| -> &'static str { Box::leak(s.into_boxed_str()) };
    let mut h: Vec<&'static str> = spec.divisors().iter().map(|d| leak(format!("f{d}"))).collect();
    h.extend(spec.g0_pairs().iter().map(|(d, i)| leak(format!("g{d}_{i}"))));
    h.extend(spec.divisors().iter().map(|d| leak(format!("n{d}"))));
    if spec.q() == 3 {
        h.push("tuple");
    }
    h
}

fn join<T: ToString>(items: &[T]) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
    }
}

fn families_text(c: &SolutionCertificate) -> String {
    if c.families.is_empty() {
        return "-".to_string();
    }
    c.families
        .iter()
        .map(|f| format!("{}:{}", join(&f.v), f.primes.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";")))
        .collect::<Vec<_>>()
        .join("|")
}

fn execute(cmd: &Command, g: &Global) -> Result<Output> {
    match cmd {
        Command::Pi { q, max_degree } => {
            let f = field(*q, g)?;
            let mut out = Output::new(&["degree", "pi"]);
            for d in 1..=*max_degree {
                let c = count_irreducibles(&f, d)?;
                out.push(vec![d.to_string(), c.to_string()], json!({"degree": d, "pi": c.to_string()}));
            }
            Ok(out)
        }
        Command::Factor(a) => {
            let f = field(a.q, g)?;
            let p = parse_poly(&a.poly, &f)?;
            let fac = factor(&p, &poly_table(&f, &p, g)?)?;
            let mut out = Output::new(&["prime", "exponent"]);
            let unit = format_elem(&f, fac.unit());
            out.push(vec!["unit".into(), unit.clone()], json!({"unit": unit}));
            for (pr, e) in fac.factors() {
                out.push(vec![pr.to_string(), e.to_string()], json!({"prime": pr.to_string(), "exponent": e}));
            }
            Ok(out)
        }
        Command::Phi(a) | Command::Sigma(a) | Command::SigmaNm(a) | Command::SigmaTilde(a) | Command::PhiTilde(a) => {
            let f = field(a.q, g)?;
            let p = parse_poly(&a.poly, &f)?;
            let fac = factor(&p, &poly_table(&f, &p, g)?)?;
            let value = match cmd {
                Command::Phi(_) => phi(&fac).to_string(),
                Command::Sigma(_) => sigma(&fac).to_string(),
                Command::SigmaNm(_) => sigma_nm(&fac).to_string(),
                Command::SigmaTilde(_) => sigma_tilde(&fac).to_string(),
                _ => phi_tilde(&fac).to_string(),
            };
            let mut out = Output::new(&["value"]);
            out.push(vec![value.clone()], json!({"value": value}));
            Ok(out)
        }
        Command::Search { q, max_deg_f, max_deg_g, certify } => {
            let f = field(*q, g)?;
            let opts = SearchOptions {
                budget: g.budget.unwrap_or(DEFAULT_SEARCH_BUDGET),
                jobs: g.jobs,
                ..SearchOptions::new(*max_deg_f, *max_deg_g)
            };
            let found = search_with(&f, &opts)?;
            let header: &[&str] = if *certify { &["F", "G", "value", "F0", "G0", "families", "status"] } else { &["F", "G", "value"] };
            let mut out = Output::new(header);
            let mut failed = 0;
            for s in &found {
                let mut row = vec![s.f.to_string(), s.g.to_string(), s.value.to_string()];
                if !*certify {
                    out.push(row, json!({"F": s.f.to_string(), "G": s.g.to_string(), "value": s.value.to_string()}));
                    continue;
                }
                let (status, doc) = match decompose(&s.f, &s.g) {
                    Ok(c) => {
                        let report = verify_certificate(&c);
                        row.extend([c.f0.to_string(), c.g0.to_string(), families_text(&c)]);
                        let mut doc = serde_json::to_value(c.to_json_struct()).unwrap();
                        doc["valid"] = json!(report.is_valid());
                        if report.is_valid() { ("certified".to_string(), doc) } else {
                            failed += 1;
                            doc["failures"] = json!(report.failures);
                            (format!("invalid: {}", report.failures.join("; ")), doc)
                        }
                    }
                    Err(e) => {
                        failed += 1;
                        row.extend(["-".into(), "-".into(), "-".into()]);
                        (format!("failed: {e}"), json!({"F": s.f.to_string(), "G": s.g.to_string(), "error": e.to_string()}))
                    }
                };
                row.push(status);
                out.push(row, doc);
            }
            if failed > 0 {
                out.failure = Some(integrity!("{failed} of {} solutions failed to certify", found.len()));
            }
            Ok(out)
        }
        Command::Certify { q, f: ft, g: gt } => {
            let f = field(*q, g)?;
            let cert = decompose(&parse_poly(ft, &f)?, &parse_poly(gt, &f)?)?;
            certificate_output(&cert)
        }
        Command::Verify { path } => {
            let text = if path == "-" {
                std::io::read_to_string(std::io::stdin()).map_err(|e| usage!("cannot read stdin: {e}"))?
            } else {
                std::fs::read_to_string(path).map_err(|e| usage!("cannot read {path}: {e}"))?
            };
            certificate_output(&SolutionCertificate::from_json(&text)?)
        }
        Command::Family { q, v, index, verify } => {
            let f = field(*q, g)?;
            let vector = match v {
                Some(text) => FamilyVector::parse(text)?,
                None => {
                    let v0 = if *q == 3 { 2 } else { 1 };
                    sample_vector(&mut ChaCha8Rng::seed_from_u64(g.seed), v0, 3, 3)
                }
            };
            let degrees = vector.degrees()?;
            let table = build_table(&f, degrees[0].clamp(1, 8))?;
            let inst = instantiate(&vector, &table, *index)?;
            let mut out = Output::new(&["item", "value"]);
            out.push(vec!["v".into(), join(vector.entries())], json!({"v": vector.entries()}));
            for (k, p) in inst.primes().iter().enumerate() {
                out.push(vec![format!("P{}", k + 1), p.to_string()], json!({format!("P{}", k + 1): p.to_string()}));
            }
            out.push(vec!["F".into(), inst.f().to_string()], json!({"F": inst.f().to_string()}));
            out.push(vec!["G".into(), inst.g().to_string()], json!({"G": inst.g().to_string()}));
            if *verify {
                match verify_identity(&inst) {
                    IdentityReport::Checked { lhs, rhs, holds } => {
                        out.push(vec!["lhs".into(), lhs.to_string()], json!({"lhs": lhs.to_string()}));
                        out.push(vec!["rhs".into(), rhs.to_string()], json!({"rhs": rhs.to_string()}));
                        out.push(vec!["holds".into(), holds.to_string()], json!({"holds": holds}));
                        if !holds {
                            out.failure = Some(integrity!("identity fails for {vector}"));
                        }
                    }
                    IdentityReport::NotApplicable(why) => {
                        out.push(vec!["not-applicable".into(), why.clone()], json!({"not_applicable": why}));
                    }
                }
            }
            Ok(out)
        }
        Command::Exceptional { q, realize: want_realize, summary } => {
            let spec = DqSpec::new(*q)?;
            let f = field(*q, g)?;
            if *summary {
                let table = build_table(&f, spec.d_q())?;
                let s = corollary_summary(*q, &table)?;
                let pats = |ps: &mut dyn Iterator<Item = &Vec<usize>>| {
                    ps.map(|p| format!("({})", p.iter().map(usize::to_string).collect::<Vec<_>>().join(","))).collect::<Vec<_>>().join(" ")
                };
                let mut out = Output::new(&["item", "value"]);
                out.push(vec!["n_max".into(), s.n_max.to_string()], json!({"n_max": s.n_max}));
                out.push(vec!["excluded".into(), pats(&mut s.excluded.iter())], json!({"excluded": s.excluded}));
                let realizable: Vec<_> = s.realizable.iter().cloned().collect();
                out.push(vec!["realizable".into(), pats(&mut realizable.iter())], json!({"realizable": realizable}));
                out.push(
                    vec!["largest_patterns_contain_one".into(), s.largest_patterns_contain_one.to_string()],
                    json!({"largest_patterns_contain_one": s.largest_patterns_contain_one}),
                );
                return Ok(out);
            }
            let profiles = solve_profiles(*q)?;
            let mut header = profile_header(&spec);
            if *want_realize {
                header.extend(["F0", "G0", "n", "heads", "F", "G", "value"]);
            }
            let mut out = Output::new(&header);
            let table = if *want_realize { Some(build_table(&f, spec.d_q())?) } else { None };
            for p in &profiles {
                let (mut row, mut doc) = profile_row(&spec, p);
                if let Some(t) = &table {
                    match realize(p, t)? {
                        Some(r) => {
                            let cols = [
                                factored_text(&r.f0),
                                factored_text(&r.g0),
                                r.families.len().to_string(),
                                join(&r.head_degrees()),
                                factored_text(&r.f),
                                factored_text(&r.g),
                                r.value.to_string(),
                            ];
                            for (k, c) in ["F0", "G0", "n", "heads", "F", "G", "value"].iter().zip(&cols) {
                                doc[*k] = json!(c);
                            }
                            row.extend(cols);
                        }
                        None => {
                            row.extend(["unrealizable".to_string()]);
                            doc["realizable"] = json!(false);
                        }
                    }
                }
                out.push(row, doc);
            }
            Ok(out)
        }
        Command::Zsigmondy { a, b, max_n } => {
            if *max_n == 0 {
                return Err(usage!("--max-n must be >= 1"));
            }
            let seq = PrimitiveSequence::new(*a, *b, *max_n)?;
            let mut out = Output::new(&["n", "term", "primitive_primes", "exception"]);
            for n in 1..=*max_n {
                let r = seq.report(n);
                let exc = r.exception.map(|e: Exception| e.to_string());
                out.push(
                    vec![n.to_string(), r.term.to_string(), join(&r.primitive_primes), exc.clone().unwrap_or_else(|| "-".into())],
                    json!({
                        "a": a, "b": b, "n": n, "term": r.term.to_string(),
                        "primitive_primes": r.primitive_primes.iter().map(u128::to_string).collect::<Vec<_>>(),
                        "exception": exc,
                    }),
                );
            }
            Ok(out)
        }
        Command::Decompose { a, value } => {
            let n: BigUint = value.parse().map_err(|_| usage!("--value {value:?} is not a decimal integer"))?;
            let r = decompose_product(*a, &n)?;
            let forced = r.forced.entries();
            let readings: Vec<Vec<u32>> = residual_multisets(*a, &r.residual, 8)
                .iter()
                .map(|m| m.entries())
                // a = 2: exponent 1 contributes a factor of 1, so those readings are padding.
                .filter(|m| *a != 2 || !m.contains(&1))
                .collect();
            let text = if readings.is_empty() {
                "-".to_string()
            } else {
                readings.iter().map(|m| format!("{{{}}}", m.iter().map(u32::to_string).collect::<Vec<_>>().join(","))).collect::<Vec<_>>().join(" ")
            };
            let mut out = Output::new(&["forced", "residual", "residual_readings"]);
            out.push(
                vec![join(&forced), r.residual.to_string(), text],
                json!({"base": a, "forced": forced, "residual": r.residual.to_string(), "residual_readings": readings}),
            );
            Ok(out)
        }
    }
}

fn certificate_output(cert: &SolutionCertificate) -> Result<Output> {
    let report = verify_certificate(cert);
    let mut out = Output::new(&["item", "value"]);
    let mut doc = serde_json::to_value(cert.to_json_struct()).unwrap();
    doc["valid"] = json!(report.is_valid());
    if !report.is_valid() {
        doc["failures"] = json!(report.failures);
    }
    let mut rows = vec![
        vec!["F".to_string(), cert.f.to_string()],
        vec!["G".into(), cert.g.to_string()],
        vec!["value".into(), cert.value.to_string()],
        vec!["F0".into(), cert.f0.to_string()],
        vec!["G0".into(), cert.g0.to_string()],
    ];
    for fam in &cert.families {
        let mut row = vec!["family".to_string(), join(&fam.v)];
        row.extend(fam.primes.iter().map(|p| p.to_string()));
        rows.push(row);
    }
    rows.push(vec!["valid".into(), report.is_valid().to_string()]);
    for f in &report.failures {
        rows.push(vec!["failure".into(), f.clone()]);
    }
    // JSON mode: the certificate is one document.
    out.docs.push(doc);
    out.rows = rows;
    if !report.is_valid() {
        out.failure = Some(integrity!("certificate failed verification"));
    }
    Ok(out)
}

/// Runs the CLI on `args` (program name first), writing results to `stdout`
/// and diagnostics to `stderr`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    64
                }
            };
        }
    };
    let result = execute(&cli.command, &cli.global);
    let out = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "phisigma: {e}");
            return e.exit_code();
        }
    };
    let text = out.render(cli.global.output);
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => stdout.write_all(text.as_bytes()).map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "phisigma: {msg}");
        return 2;
    }
    match out.failure {
        Some(e) => {
            let _ = writeln!(stderr, "phisigma: {e}");
            e.exit_code()
        }
        None => 0,
    }
}
