use std::io::Write;
use std::process::ExitCode;

use cellstar::dictionary::{kernel_elements, Dictionary, DEFAULT_ENUMERATION_LIMIT};
use cellstar::gf2poly::{poly_factor, recurrence_kernel};
use cellstar::ledrappier::{complete_patch, conjugate_vertical, stack_orbit, TrianglePatch};
use cellstar::matrixmodel::{verify_relations, RelationCheck, RelationReport};
use cellstar::report::{
    analyze, check_classification_window, classify_shard, shards, AnalysisReport,
    ClassificationSummary,
};
use cellstar::starcomm::{certify_system, DynamicalSystem, SystemCertificate};
use cellstar::{Error, Gf2Poly, Word};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "cellstar", version, about = "Sliding-window cellular automata over {0,1}^N: classification, *-commutation certificates and exact relation checks")]
struct Cli {
    #[command(flatten)]
    output: OutputFormat,

    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputFormat {
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit plain text (the default).
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one dictionary and compare it with the shift.
    Analyze {
        /// Comma-separated words of equal length, e.g. 001,100,011,110.
        dictionary: String,
    },
    /// Count progressive, admissible and shift-star-commuting dictionaries.
    Classify {
        /// Word length.
        n: usize,
        /// Largest window accepted.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        max_n: usize,
    },
    /// List the kernel of a progressive dictionary or of f(σ).
    Kernel {
        /// Dictionary, or a polynomial with --poly.
        input: String,
        #[arg(long)]
        poly: bool,
    },
    /// Certify the system generated by comma-separated polynomials.
    Certify { generators: String },
    /// Check the operator relations at a cylinder level.
    Verify {
        generators: String,
        #[arg(long, default_value_t = 6)]
        level: usize,
    },
    /// Complete a Ledrappier patch over a base word.
    Ledrappier {
        base: String,
        /// Rows to stack with the orbit construction (default: full triangle).
        #[arg(long)]
        rows: Option<usize>,
    },
}

#[derive(Serialize)]
struct KernelReport {
    input: String,
    polynomial: Option<Gf2Poly>,
    factorization: Option<String>,
    elements: Vec<String>,
}

#[derive(Serialize)]
struct CertifyReport {
    generators: Vec<String>,
    certificate: SystemCertificate,
}

#[derive(Serialize)]
struct LedrappierReport {
    base: String,
    patch: TrianglePatch,
    vertical: Option<String>,
    stacked_rows: Vec<String>,
    stacking_matches_patch: bool,
}

enum Failure {
    Input(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
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
        Ok(out) => {
            print_out(&out);
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(out)) => {
            print_out(&out);
            ExitCode::from(1)
        }
    }
}

// a closed pipe (e.g. `| head`) is not an error worth a panic
fn print_out(out: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{out}");
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let json = cli.output.json;
    Ok(match &cli.command {
        Command::Analyze { dictionary } => {
            let r = analyze(dictionary)?;
            emit(json, analysis_text(&r), &r)
        }
        Command::Classify { n, max_n } => {
            let s = classify_parallel(*n, *max_n)?;
            emit(json, classification_text(&s), &s)
        }
        Command::Kernel { input, poly } => {
            let r = kernel(input, *poly)?;
            let text = format!(
                "{}{}\n{}",
                r.input,
                r.polynomial.map(|p| format!(" = {p}")).unwrap_or_default(),
                r.elements.join("\n")
            );
            emit(json, text, &r)
        }
        Command::Certify { generators } => {
            let sys = DynamicalSystem::parse(generators)?;
            let r = CertifyReport {
                generators: sys.names().to_vec(),
                certificate: certify_system(&sys),
            };
            emit(json, certificate_text(&sys, &r.certificate), &r)
        }
        Command::Verify { generators, level } => {
            let sys = DynamicalSystem::parse(generators)?;
            let r = verify_relations(&sys, *level)?;
            let out = emit(json, relations_text(&r), &r);
            if !r.all_pass() {
                return Err(Failure::Violation(out));
            }
            out
        }
        Command::Ledrappier { base, rows } => {
            let r = ledrappier(base, *rows)?;
            let text = format!(
                "{}\nvertical step {}\nstacked orbit matches patch: {}",
                r.patch,
                r.vertical.as_deref().unwrap_or("-"),
                r.stacking_matches_patch
            );
            emit(json, text, &r)
        }
    })
}

fn emit<T: Serialize>(json: bool, text: String, value: &T) -> String {
    if json {
        to_json(value)
    } else {
        text
    }
}

fn classify_parallel(n: usize, max_n: usize) -> Result<ClassificationSummary, Failure> {
    check_classification_window(n, max_n)?;
    let parts = rayon::current_num_threads() * 4;
    let partial: Vec<ClassificationSummary> = shards(n, parts)
        .into_par_iter()
        .map(|r| classify_shard(n, r))
        .collect();
    Ok(partial
        .into_iter()
        .reduce(ClassificationSummary::merge)
        .expect("at least one shard"))
}

fn kernel(input: &str, poly: bool) -> Result<KernelReport, Failure> {
    if poly {
        let p: Gf2Poly = input.parse()?;
        let elements = recurrence_kernel(p)?.iter().map(ToString::to_string).collect();
        return Ok(KernelReport {
            input: input.to_string(),
            polynomial: Some(p),
            factorization: Some(poly_factor(p)?.to_string()),
            elements,
        });
    }
    let d: Dictionary = input.parse()?;
    let p = d.window_map().linear_poly();
    Ok(KernelReport {
        input: d.to_string(),
        polynomial: p,
        factorization: p.map(|p| poly_factor(p).map(|f| f.to_string())).transpose()?,
        elements: kernel_elements(&d)?.iter().map(ToString::to_string).collect(),
    })
}

fn ledrappier(base: &str, rows: Option<usize>) -> Result<LedrappierReport, Failure> {
    let base: Word = base.parse()?;
    let patch = complete_patch(&base)?;
    let vertical = if base.len() >= 2 {
        Some(conjugate_vertical(&base)?.to_string())
    } else {
        None
    };
    let m = rows.unwrap_or(base.len().saturating_sub(1));
    let led: Dictionary = "01,10".parse()?;
    let stacked = stack_orbit(&led, &base, m)?;
    let stacking_matches_patch = stacked.iter().zip(patch.rows()).all(|(a, b)| a == b);
    Ok(LedrappierReport {
        base: base.to_string(),
        stacked_rows: stacked.iter().map(ToString::to_string).collect(),
        patch,
        vertical,
        stacking_matches_patch,
    })
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn analysis_text(r: &AnalysisReport) -> String {
    let c = &r.classification;
    let mut out = vec![
        format!("dictionary   {}", c.members),
        format!("window       {}", c.window),
        format!("progressive  {}", yes_no(c.progressive)),
        format!("admissible   {}", yes_no(c.admissible)),
        format!(
            "polynomial   {}",
            c.polynomial.map_or("-".to_string(), |p| p.to_string())
        ),
    ];
    if let Some(k) = &r.kernel {
        out.push(format!("kernel       {}", k.join(" ")));
    }
    if let Some(d) = &r.diagram_search_with_shift {
        out.push(format!(
            "*-commutes with σ (diagram search, depth {}): {}",
            d.depth,
            yes_no(d.star_commute)
        ));
    }
    if let Some(p) = &r.independence_with_shift {
        out.push(format!(
            "strongly independent {}, independent {}, *-commutes {}, gcd {}",
            yes_no(p.strongly_independent.value()),
            yes_no(p.independent.value()),
            yes_no(p.star_commute.value()),
            p.gcd
        ));
    }
    if let Some(cert) = &r.certificate {
        out.push(format!(
            "system (σ, θ_D): valid {}, minimal {}, topologically free {}",
            yes_no(cert.valid),
            yes_no(cert.minimal),
            yes_no(cert.topologically_free)
        ));
    }
    out.join("\n")
}

fn classification_text(s: &ClassificationSummary) -> String {
    let c = &s.counts;
    let mut out = vec![
        format!("window {}", s.window),
        format!("total {}", c.total),
        format!("progressive {}", c.progressive),
        format!("admissible {}", c.admissible),
        format!("star-commuting with σ {}", c.star_commuting_with_shift),
    ];
    for e in &s.admissible {
        let mark = if e.star_commutes_with_shift { " *" } else { "" };
        out.push(format!("{}\t{}{mark}", e.dictionary, e.polynomial));
    }
    out.join("\n")
}

fn certificate_text(sys: &DynamicalSystem, c: &SystemCertificate) -> String {
    let mut out = vec![
        format!("generators {}", sys.names().join(", ")),
        format!("valid {}", yes_no(c.valid)),
    ];
    for w in &c.witnesses {
        out.push(format!(
            "  gcd({}, {}) = {}",
            sys.names()[w.first],
            sys.names()[w.second],
            w.gcd
        ));
    }
    out.push(format!("minimal {}", yes_no(c.minimal)));
    out.push(format!("topologically free {}", yes_no(c.topologically_free)));
    if let Some((p, q)) = &c.rank_witness.collision {
        out.push(format!("  θ_{p} = θ_{q}"));
    }
    out.push(c.simplicity_report.clone());
    out.join("\n")
}

fn relations_text(r: &RelationReport) -> String {
    let line = |name: &str, c: &RelationCheck| {
        let mut s = format!("{name:<26} {} ({} checks)", if c.pass { "pass" } else { "FAIL" }, c.checks);
        if let Some(ctx) = &c.context {
            s.push_str(&format!("\n    at {ctx}"));
        }
        if let Some(w) = &c.witness {
            s.push_str(&format!(
                "\n    entry ({}, {}): {} vs {}",
                w.row, w.col, w.lhs, w.rhs
            ));
        }
        s
    };
    let mut out = vec![format!(
        "generators {} at level {}",
        r.generators.join(", "),
        r.level
    )];
    out.push(line("(I) intertwining", &r.relation_i));
    out.push(line("(II) transfer", &r.relation_ii));
    out.push(line("(III) doubly commuting", &r.relation_iii));
    out.push(line("(IV) reconstruction", &r.relation_iv));
    out.push(line("frame independence", &r.frame_independence));
    out.push(line("matrix units", &r.orthonormal_matrix_units));
    out.push(line("monoid representation", &r.monoid_representation));
    for i in &r.isometries {
        out.push(format!(
            "S_{}: isometry {}, proper {}",
            i.generator,
            yes_no(i.isometry),
            yes_no(i.proper)
        ));
    }
    out.join("\n")
}
