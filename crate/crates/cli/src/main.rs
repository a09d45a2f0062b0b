//! Command-line interface: individual computations (straightening, counts,
//! Hecke action, bases, expansion, transforms, confluence, oracles) and the
//! batch verification entry point.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use straightening::coeff::{Case, CaseConfig, Scalar, Sign};
use straightening::hecke::{t_star_direct, t_star_via_delta};
use straightening::oracle::ff::{brute_counts, FormSpace, Fq, FqMatrix};
use straightening::oracle::padic::{
    enumerate_sublattices, verify_main_lemma, GramLattice, StandardLattice, Zq, ZqElem,
};
use straightening::qcomb;
use straightening::straighten::{confluence_check, normal_form, strategy_fuzz};
use straightening::structure::{basis_set, expand_in_basis, expansion_to_certificate};
use straightening::suites;
use straightening::typmon::{
    element_from_json, element_to_json, ElementJson, OrbitCombination, OrbitType,
};

#[derive(Parser)]
#[command(
    name = "straightening",
    version,
    about = "Exact straightening-relation calculus for spherical functions on p-adic matrix spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    #[value(name = "uH", alias = "uh")]
    Uh,
    #[value(name = "S", alias = "s")]
    S,
    #[value(name = "A", alias = "a")]
    A,
}

#[derive(Args)]
struct CaseOpts {
    /// Case: uH (unramified Hermitian), S (symmetric), A (alternating).
    #[arg(long, value_enum)]
    case: CaseArg,
    /// Sign of -1 (symmetric case only; +1 or -1).
    #[arg(long, default_value = "+1", allow_hyphen_values = true)]
    epsilon: String,
}

impl CaseOpts {
    fn config(&self) -> Result<CaseConfig, String> {
        let case = match self.case {
            CaseArg::Uh => Case::UH,
            CaseArg::S => Case::S,
            CaseArg::A => Case::A,
        };
        let eps: Sign = self.epsilon.parse().map_err(|e| format!("{e}"))?;
        CaseConfig::new(case, eps).map_err(|e| format!("{e}"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Normalize an element to straightened normal form.
    Straighten {
        #[command(flatten)]
        case: CaseOpts,
        /// Input element JSON file.
        #[arg(long = "in", value_name = "FILE")]
        input: String,
        /// Output file (stdout when omitted).
        #[arg(long, value_name = "FILE")]
        out: Option<String>,
    },
    /// Print a closed-form subspace count, symbolically or specialized.
    Qcount {
        #[command(flatten)]
        case: CaseOpts,
        /// Which count: h (group order), r (nondegenerate), s (isotropic),
        /// q (radical profile), e (correction factor).
        #[arg(long)]
        count: String,
        /// Ambient rank.
        #[arg(long, default_value_t = 0)]
        rank: i64,
        /// Ambient determinant sign.
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        chi: String,
        #[arg(long, default_value_t = 0)]
        a: i64,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        eta: String,
        #[arg(long, default_value_t = 0)]
        b: i64,
        #[arg(long, default_value_t = 0)]
        n: i64,
        #[arg(long, default_value_t = 0)]
        m: i64,
        #[arg(long, default_value_t = 0)]
        l: i64,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        psi1: String,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        psi2: String,
        /// Evaluate at this residue cardinality instead of printing the
        /// symbolic value.
        #[arg(long)]
        at: Option<i64>,
    },
    /// Apply a minuscule Hecke operator to an orbit.
    Hecke {
        #[command(flatten)]
        case: CaseOpts,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: i64,
        /// Orbit as JSON: [[valuation, multiplicity, "+"|"-"], ...].
        #[arg(long)]
        orbit: String,
        /// direct (lattice counts) or delta (straightening route).
        #[arg(long, default_value = "direct")]
        method: String,
    },
    /// List the free-module basis.
    Basis {
        #[command(flatten)]
        case: CaseOpts,
        #[arg(long)]
        r: usize,
    },
    /// Expand a normal-form element over the operator algebra.
    Expand {
        #[command(flatten)]
        case: CaseOpts,
        #[arg(long = "in", value_name = "FILE")]
        input: String,
        #[arg(long, value_name = "FILE")]
        out: Option<String>,
    },
    /// Check the transform factorization and recursion identities.
    Transforms {
        #[command(flatten)]
        case: CaseOpts,
        #[arg(long)]
        r: usize,
    },
    /// Check confluence of the rewrite system on a window.
    Confluence {
        #[command(flatten)]
        case: CaseOpts,
        /// Window as lo:hi.
        #[arg(long, default_value = "0:4")]
        window: String,
        /// Strategy-independence fuzz seeds.
        #[arg(long, default_value_t = 500)]
        seeds: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Brute-force oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run every verification suite.
    VerifyAll {
        /// Trim the heaviest sweeps.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 500)]
        seeds: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the machine-readable summary here.
        #[arg(long, value_name = "FILE")]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Enumerate subspaces of a finite form space and compare with the
    /// closed-form counts.
    Ff {
        #[command(flatten)]
        case: CaseOpts,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        dim: usize,
        /// Gram matrix: rows separated by ';', entries by ','; an entry is
        /// an integer, optionally with a 't' part like '1+2t'.
        #[arg(long, allow_hyphen_values = true)]
        gram: String,
    },
    /// Enumerate sublattices of a truncated p-adic lattice.
    Padic {
        #[command(flatten)]
        case: CaseOpts,
        #[arg(long)]
        p: u64,
        /// Precision exponent.
        #[arg(long = "N", default_value_t = 8)]
        precision: u32,
        /// Gram matrix over the truncated ring (same entry syntax as ff).
        #[arg(long, conflicts_with = "typ", allow_hyphen_values = true)]
        gram: Option<String>,
        /// Alternatively, a standard lattice given by its orbit type JSON
        /// [[valuation, multiplicity, "+"|"-"], ...]; runs the full
        /// sublattice-type verification.
        #[arg(long)]
        typ: Option<String>,
        /// Colength; sweep all when omitted.
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Serialize)]
struct OrbitTermJson {
    orbit: Vec<(i64, u32, Sign)>,
    coeff: String,
}

fn orbit_to_json(o: &OrbitType) -> Vec<(i64, u32, Sign)> {
    o.entries().collect()
}

fn combination_to_json(c: &OrbitCombination) -> Vec<OrbitTermJson> {
    c.terms()
        .map(|(o, s)| OrbitTermJson {
            orbit: orbit_to_json(o),
            coeff: s.to_string(),
        })
        .collect()
}

fn parse_orbit(s: &str) -> Result<OrbitType, String> {
    let entries: Vec<(i64, u32, Sign)> =
        serde_json::from_str(s).map_err(|e| format!("bad orbit JSON: {e}"))?;
    Ok(OrbitType::from_entries(&entries))
}

/// Parse one gram entry: `a`, `a+bt`, `a-bt`, `bt`.
fn parse_entry(s: &str) -> Result<(i64, i64), String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if !s.contains('t') {
        return Ok((s.parse().map_err(|_| format!("bad entry `{s}`"))?, 0));
    }
    let body = s.strip_suffix('t').ok_or(format!("bad entry `{s}`"))?;
    match body[1..].find(['+', '-']) {
        Some(i) => {
            let (a, b) = body.split_at(i + 1);
            let b = if b == "+" || b == "-" {
                format!("{b}1")
            } else {
                b.to_string()
            };
            Ok((
                a.parse().map_err(|_| format!("bad entry `{s}`"))?,
                b.parse().map_err(|_| format!("bad entry `{s}`"))?,
            ))
        }
        None => {
            let b = if body.is_empty() || body == "+" || body == "-" {
                format!("{body}1")
            } else {
                body.to_string()
            };
            Ok((0, b.parse().map_err(|_| format!("bad entry `{s}`"))?))
        }
    }
}

fn parse_gram(s: &str, dim: usize) -> Result<Vec<(i64, i64)>, String> {
    let mut out = Vec::new();
    let rows: Vec<&str> = s.split(';').collect();
    if rows.len() != dim {
        return Err(format!("expected {dim} gram rows, got {}", rows.len()));
    }
    for row in rows {
        let entries: Vec<&str> = row.split(',').collect();
        if entries.len() != dim {
            return Err(format!("expected {dim} entries per row"));
        }
        for e in entries {
            out.push(parse_entry(e)?);
        }
    }
    Ok(out)
}

fn write_or_print(out: &Option<String>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| format!("writing {path}: {e}")),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn load_element(path: &str, cfg: &CaseConfig) -> Result<straightening::Element, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
    let json: ElementJson = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
    let (file_cfg, elem) = element_from_json(&json).map_err(|e| format!("{path}: {e}"))?;
    if file_cfg != *cfg {
        return Err(format!(
            "{path}: element is for case {file_cfg}, flags say {cfg}"
        ));
    }
    Ok(elem)
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Straighten { case, input, out } => {
            let cfg = case.config()?;
            let elem = load_element(&input, &cfg)?;
            let nf = normal_form(&elem, &cfg).map_err(|e| format!("{e}"))?;
            let json = serde_json::to_string_pretty(&element_to_json(&cfg, &nf)).unwrap();
            write_or_print(&out, &json)?;
            Ok(0)
        }
        Command::Qcount {
            case,
            count,
            rank,
            chi,
            a,
            eta,
            b,
            n,
            m,
            l,
            psi1,
            psi2,
            at,
        } => {
            let cfg = case.config()?;
            let chi: Sign = chi.parse().map_err(|e| format!("{e}"))?;
            let eta: Sign = eta.parse().map_err(|e| format!("{e}"))?;
            let psi1: Sign = psi1.parse().map_err(|e| format!("{e}"))?;
            let psi2: Sign = psi2.parse().map_err(|e| format!("{e}"))?;
            let value: Scalar = match count.to_lowercase().as_str() {
                "h" => qcomb::card_h(rank, chi, &cfg),
                "r" => qcomb::count_r(a, eta, rank, chi, &cfg),
                "s" => qcomb::count_s(b, rank, chi, &cfg),
                "q" => qcomb::count_q(n, psi1, m, l, psi2, &cfg),
                "e" => qcomb::e_factor(rank, chi, &cfg),
                other => return Err(format!("unknown count `{other}` (use h|r|s|q|e)")),
            };
            match at {
                None => println!("{value}"),
                Some(qv) => {
                    let v = value
                        .eval_q(&cfg, &BigRational::from(BigInt::from(qv)))
                        .map_err(|e| format!("{e}"))?;
                    println!("{v}");
                }
            }
            Ok(0)
        }
        Command::Hecke {
            case,
            r,
            k,
            orbit,
            method,
        } => {
            let cfg = case.config()?;
            let o = parse_orbit(&orbit)?;
            if o.rank() as usize != r {
                return Err(format!("orbit has rank {}, but --r {r}", o.rank()));
            }
            let result = match method.as_str() {
                "direct" => t_star_direct(&o, k, &cfg),
                "delta" => t_star_via_delta(&o, k, &cfg).map_err(|e| format!("{e}"))?,
                other => return Err(format!("unknown method `{other}` (use direct|delta)")),
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&combination_to_json(&result)).unwrap()
            );
            Ok(0)
        }
        Command::Basis { case, r } => {
            let cfg = case.config()?;
            let words: Vec<String> = basis_set(&cfg, r).iter().map(|w| w.to_string()).collect();
            println!("{}", serde_json::to_string_pretty(&words).unwrap());
            Ok(0)
        }
        Command::Expand { case, input, out } => {
            let cfg = case.config()?;
            let elem = load_element(&input, &cfg)?;
            let nf = normal_form(&elem, &cfg).map_err(|e| format!("{e}"))?;
            let terms = expand_in_basis(&nf, &cfg, 1_000_000).map_err(|e| format!("{e}"))?;
            // Verify by re-expansion before emitting.
            let back = straightening::structure::apply_expansion(&terms, nf.degree(), &cfg)
                .map_err(|e| format!("{e}"))?;
            if back != nf {
                return Err("internal error: certificate does not re-apply".into());
            }
            let cert = expansion_to_certificate(nf.degree(), &terms);
            write_or_print(&out, &serde_json::to_string_pretty(&cert).unwrap())?;
            Ok(0)
        }
        Command::Transforms { case, r } => {
            let cfg = case.config()?;
            let mut ok = true;
            for rank in 1..=r {
                let f = straightening::transforms::factorization_check(&cfg, rank)
                    .map_err(|e| format!("{e}"))?;
                let rec = straightening::transforms::recursion_check(&cfg, rank)
                    .map_err(|e| format!("{e}"))?;
                let status = if f.passed() && rec.passed() {
                    "pass"
                } else {
                    "FAIL"
                };
                if !(f.passed() && rec.passed()) {
                    ok = false;
                }
                println!("rank {rank}: factorization+recursion {status}");
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Confluence {
            case,
            window,
            seeds,
            seed,
        } => {
            let cfg = case.config()?;
            let (lo, hi) = window
                .split_once(':')
                .and_then(|(a, b)| Some((a.parse::<i64>().ok()?, b.parse::<i64>().ok()?)))
                .ok_or_else(|| format!("bad window `{window}`, expected LO:HI"))?;
            let report = confluence_check(&cfg, lo, hi).map_err(|e| format!("{e}"))?;
            let fuzz = strategy_fuzz(&cfg, lo, hi, seeds, seed);
            #[derive(Serialize)]
            struct Combined<A, B> {
                confluence: A,
                fuzz: B,
            }
            let ok = report.is_confluent() && fuzz.discrepancies.is_empty();
            println!(
                "{}",
                serde_json::to_string_pretty(&Combined {
                    confluence: &report,
                    fuzz: &fuzz
                })
                .unwrap()
            );
            Ok(if ok { 0 } else { 1 })
        }
        Command::Oracle(cmd) => run_oracle(cmd),
        Command::VerifyAll {
            quick,
            seeds,
            seed,
            out,
        } => {
            let summary = suites::run_all(quick, seeds, seed);
            println!("mode: {}", if quick { "quick" } else { "full" });
            for s in &summary.suites {
                let status = if s.passed() { "PASS" } else { "FAIL" };
                println!("[{status}] {:<32} {:>6} checks", s.name, s.checks);
                for f in s.failures.iter().take(10) {
                    println!("         {f}");
                }
            }
            let json = serde_json::to_string_pretty(&summary).unwrap();
            let path = out.unwrap_or_else(|| "verify-summary.json".to_string());
            fs::write(&path, json).map_err(|e| format!("writing {path}: {e}"))?;
            println!("summary written to {path}");
            Ok(if summary.all_passed() { 0 } else { 1 })
        }
    }
}

fn run_oracle(cmd: OracleCommand) -> Result<u8, String> {
    match cmd {
        OracleCommand::Ff { case, p, dim, gram } => {
            let cfg = case.config()?;
            let fq = if cfg.case() == Case::UH {
                Fq::quadratic(p)
            } else {
                Fq::prime(p)
            };
            let entries = parse_gram(&gram, dim)?;
            let mut matrix = FqMatrix::zero(dim, dim);
            for (idx, (a, b)) in entries.iter().enumerate() {
                let av = fq.from_i64(*a);
                let bv = fq.from_i64(*b);
                matrix[(idx / dim, idx % dim)] = (av.0, bv.0);
            }
            let fs = FormSpace::new(cfg, fq, matrix).map_err(|e| format!("{e}"))?;
            let counts = brute_counts(&fs).map_err(|e| format!("{e}"))?;
            #[derive(Serialize)]
            struct FfOut {
                typ: (i64, Sign),
                isotropic_by_dim: BTreeMap<i64, u64>,
                nondegenerate_by_typ: Vec<((i64, Sign), u64)>,
                by_profile: Vec<((i64, Sign, i64), u64)>,
                formula_mismatches: Vec<String>,
            }
            let out = FfOut {
                typ: straightening::oracle::ff::typ_of_form(&fs).map_err(|e| format!("{e}"))?,
                isotropic_by_dim: counts.s.clone(),
                nondegenerate_by_typ: counts.r.iter().map(|(k, v)| (*k, *v)).collect(),
                by_profile: counts.q.iter().map(|(k, v)| (*k, *v)).collect(),
                formula_mismatches: straightening::oracle::ff::formula_mismatches(&fs)
                    .map_err(|e| format!("{e}"))?,
            };
            let ok = out.formula_mismatches.is_empty();
            println!("{}", serde_json::to_string_pretty(&out).unwrap());
            Ok(if ok { 0 } else { 1 })
        }
        OracleCommand::Padic {
            case,
            p,
            precision,
            gram,
            typ,
            k,
        } => {
            let cfg = case.config()?;
            let ring = Zq::for_case(&cfg, p, precision);
            #[derive(Serialize)]
            struct Histogram {
                k: usize,
                total: u64,
                types: Vec<OrbitTermJson>,
            }
            let hist_json = |k: usize, hist: &BTreeMap<OrbitType, u64>| -> Histogram {
                Histogram {
                    k,
                    total: hist.values().sum(),
                    types: hist
                        .iter()
                        .map(|(o, c)| OrbitTermJson {
                            orbit: orbit_to_json(o),
                            coeff: c.to_string(),
                        })
                        .collect(),
                }
            };
            match (gram, typ) {
                (Some(gram), None) => {
                    let dim_guess = gram.split(';').count();
                    let entries = parse_gram(&gram, dim_guess)?;
                    let ring_entries: Vec<ZqElem> = entries
                        .iter()
                        .map(|&(a, b)| {
                            let av = ring.from_i64(a);
                            let bt = ring.from_i64(b);
                            ring.add(av, ring.mul(bt, (0, 1)))
                        })
                        .collect();
                    let gl = GramLattice::new(cfg, ring, dim_guess, ring_entries)
                        .map_err(|e| format!("{e}"))?;
                    let ks: Vec<usize> = match k {
                        Some(k) => vec![k],
                        None => (0..=gl.dim).collect(),
                    };
                    let mut all = Vec::new();
                    for k in ks {
                        let hist = enumerate_sublattices(&gl, k).map_err(|e| format!("{e}"))?;
                        all.push(hist_json(k, &hist));
                    }
                    println!("{}", serde_json::to_string_pretty(&all).unwrap());
                    Ok(0)
                }
                (None, Some(typ)) => {
                    let typ = parse_orbit(&typ)?;
                    let sl = StandardLattice::new(&cfg, ring, &typ).map_err(|e| format!("{e}"))?;
                    let (report, hists) = verify_main_lemma(&sl).map_err(|e| format!("{e}"))?;
                    #[derive(Serialize)]
                    struct PadicOut<'a> {
                        report: &'a straightening::oracle::padic::MainLemmaReport,
                        histograms: Vec<Histogram>,
                    }
                    let histograms = hists
                        .iter()
                        .filter(|(kk, _)| k.is_none() || Some(**kk) == k)
                        .map(|(k, h)| hist_json(*k, h))
                        .collect();
                    let ok = report.passed();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&PadicOut {
                            report: &report,
                            histograms
                        })
                        .unwrap()
                    );
                    Ok(if ok { 0 } else { 1 })
                }
                _ => Err("pass exactly one of --gram or --typ".into()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
