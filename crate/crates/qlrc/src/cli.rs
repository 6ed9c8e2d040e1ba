//! Command-line front end: `.pcm` matrix I/O, CSV bound sweeps, exactness
//! checks, product construction, the bundled verification battery, and
//! seeded constructive-set sampling.
//!
//! Exit codes: 0 ok, 1 internal, 2 usage or parse error, 3 violated domain
//! precondition, 4 probabilistic budget exhausted.

use std::collections::BTreeSet;
use std::path::PathBuf;

use crate::battery;
use crate::bounds::{sweep, BoundKind, BoundParams, BoundTable, SweepVariable};
use crate::codes::{build_product_code, DEFAULT_DISTANCE_CAP};
use crate::pcm;
use crate::recovery::{
    default_restart_budget, disjoint_correctable_sets, RecoveryError, SetConstructionVariant,
};
use crate::tanner::BipartiteGraph;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

/// Runtime knobs shared by the commands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub seed: u64,
    /// `None` selects the per-instance default of `64 * n` restarts.
    pub restart_budget: Option<usize>,
    pub distance_cap: usize,
    pub exhaustive_cap: usize,
    pub output_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            restart_budget: None,
            distance_cap: DEFAULT_DISTANCE_CAP,
            exhaustive_cap: crate::recovery::DEFAULT_EXHAUSTIVE_CAP,
            output_path: None,
        }
    }
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn domain(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }

    fn silent(code: i32) -> Self {
        Self {
            code,
            message: String::new(),
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let result = match args.first().map(String::as_str) {
        Some("bounds-sweep") => cmd_bounds_sweep(&args[1..]),
        Some("check-exact") => cmd_check_exact(&args[1..]),
        Some("product") => cmd_product(&args[1..]),
        Some("verify-paper-examples") => cmd_verify_paper_examples(&args[1..]),
        Some("sample-sets") => cmd_sample_sets(&args[1..]),
        Some("help") | Some("--help") | Some("-h") => {
            print!("{USAGE}");
            Ok(())
        }
        Some(other) => Err(Failure::usage(format!(
            "unknown command `{other}`\n{USAGE}"
        ))),
        None => Err(Failure::usage(USAGE)),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("{}", failure.message);
            }
            failure.code
        }
    }
}

const USAGE: &str = "\
usage:
  qlrc bounds-sweep --bounds <id,..> --r R --t T --s S --d D \
(--n-min A --n-max B | --d-min A --d-max B | ... ) [--n N] [--out FILE]
  qlrc check-exact <matrix.pcm> --r R --t T --s S
  qlrc product <a.pcm> [<b.pcm>] [--iterate M] --out FILE
  qlrc verify-paper-examples [--json] [--matrix FILE]
  qlrc sample-sets <matrix.pcm> --variant (p2|pe|m1m2|rts2) [--d D] [--seed S] [--restarts R]

bound ids: thm_p2 thm_p2_best thm_pe thm_m1m2 thm_rts2 thm_classical gg23 q_singleton ghsy btv
";

struct ParsedArgs {
    positional: Vec<String>,
    flags: Vec<(String, String)>,
    switches: BTreeSet<String>,
}

impl ParsedArgs {
    fn parse(raw: &[String], switch_names: &[&str]) -> Result<Self, Failure> {
        let mut positional = Vec::new();
        let mut flags = Vec::new();
        let mut switches = BTreeSet::new();
        let mut iter = raw.iter();
        while let Some(arg) = iter.next() {
            if let Some(name) = arg.strip_prefix("--") {
                if switch_names.contains(&name) {
                    switches.insert(name.to_string());
                } else {
                    let value = iter
                        .next()
                        .ok_or_else(|| Failure::usage(format!("flag --{name} needs a value")))?;
                    flags.push((name.to_string(), value.clone()));
                }
            } else {
                positional.push(arg.clone());
            }
        }
        Ok(Self {
            positional,
            flags,
            switches,
        })
    }

    fn flag(&self, name: &str) -> Option<&str> {
        self.flags
            .iter()
            .rev()
            .find(|(key, _)| key == name)
            .map(|(_, value)| value.as_str())
    }

    fn parse_flag<T: std::str::FromStr>(&self, name: &str) -> Result<Option<T>, Failure> {
        match self.flag(name) {
            None => Ok(None),
            Some(text) => text
                .parse()
                .map(Some)
                .map_err(|_| Failure::usage(format!("--{name}: cannot parse `{text}`"))),
        }
    }

    fn require<T: std::str::FromStr>(&self, name: &str) -> Result<T, Failure> {
        self.parse_flag(name)?
            .ok_or_else(|| Failure::usage(format!("missing required flag --{name}")))
    }
}

fn read_matrix(path: &str) -> Result<crate::gf2::BitMatrix, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))?;
    pcm::parse_pcm(&text).map_err(|e| Failure::usage(format!("{path}: {e}")))
}

/// Locale-independent CSV: `,` separator, `\n` endings, unpadded integers,
/// `NA` for inapplicable cells.
pub fn table_to_csv(table: &BoundTable) -> String {
    let mut out = String::from(table.sweep_variable.name());
    for kind in &table.kinds {
        out.push(',');
        out.push_str(kind.id());
    }
    out.push('\n');
    for row in &table.rows {
        out.push_str(&row.value.to_string());
        for cell in &row.cells {
            out.push(',');
            match cell {
                Some(value) => out.push_str(&value.to_string()),
                None => out.push_str("NA"),
            }
        }
        out.push('\n');
    }
    out
}

fn cmd_bounds_sweep(raw: &[String]) -> Result<(), Failure> {
    let args = ParsedArgs::parse(raw, &[])?;
    if !args.positional.is_empty() {
        return Err(Failure::usage("bounds-sweep takes no positional arguments"));
    }
    let ids: &str = args
        .flag("bounds")
        .ok_or_else(|| Failure::usage("missing required flag --bounds"))?;
    let mut kinds = Vec::new();
    for id in ids.split(',').filter(|s| !s.is_empty()) {
        let kind = BoundKind::parse(id)
            .ok_or_else(|| Failure::usage(format!("unknown bound id `{id}`")))?;
        kinds.push(kind);
    }

    let mut sweep_spec: Option<(SweepVariable, u64, u64)> = None;
    for variable in [
        SweepVariable::N,
        SweepVariable::D,
        SweepVariable::R,
        SweepVariable::T,
        SweepVariable::S,
    ] {
        let lo: Option<u64> = args.parse_flag(&format!("{}-min", variable.name()))?;
        let hi: Option<u64> = args.parse_flag(&format!("{}-max", variable.name()))?;
        match (lo, hi) {
            (None, None) => {}
            (Some(lo), Some(hi)) => {
                if sweep_spec.is_some() {
                    return Err(Failure::usage("exactly one sweep variable may be given"));
                }
                if lo > hi {
                    return Err(Failure::usage(format!(
                        "empty range: --{v}-min {lo} exceeds --{v}-max {hi}",
                        v = variable.name()
                    )));
                }
                sweep_spec = Some((variable, lo, hi));
            }
            _ => {
                return Err(Failure::usage(format!(
                    "both --{v}-min and --{v}-max are required",
                    v = variable.name()
                )))
            }
        }
    }
    let (variable, lo, hi) =
        sweep_spec.ok_or_else(|| Failure::usage("a sweep variable range is required"))?;

    let fixed = |name: &str, var: SweepVariable| -> Result<u64, Failure> {
        if variable == var {
            Ok(0) // placeholder; overwritten per row
        } else {
            args.require(name)
        }
    };
    let template = BoundParams {
        n: fixed("n", SweepVariable::N)?,
        k: None,
        d: fixed("d", SweepVariable::D)?,
        r: fixed("r", SweepVariable::R)?,
        t: fixed("t", SweepVariable::T)?,
        s: fixed("s", SweepVariable::S)?,
    };

    let table = sweep(&kinds, &template, variable, lo, hi);
    let csv = table_to_csv(&table);
    match args.flag("out") {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| Failure::internal(format!("cannot write {path}: {e}")))?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_check_exact(raw: &[String]) -> Result<(), Failure> {
    let args = ParsedArgs::parse(raw, &[])?;
    let [path] = args.positional.as_slice() else {
        return Err(Failure::usage("check-exact takes exactly one matrix file"));
    };
    let r: usize = args.require("r")?;
    let t: usize = args.require("t")?;
    let s: usize = args.require("s")?;
    let matrix = read_matrix(path)?;
    let graph = BipartiteGraph::from_matrix(&matrix);
    let report = graph.check_exact(r, t, s);
    if report.is_exact {
        println!("exact=({r},{t},{s})");
        Ok(())
    } else {
        let witness = report
            .violations
            .first()
            .map(|v| v.to_string())
            .unwrap_or_else(|| "not regular".to_string());
        println!("violation: {witness}");
        Err(Failure::silent(EXIT_DOMAIN))
    }
}

/// Uniform check-node degree minus one and uniform bit-node degree; the
/// factor parameters a product construction needs.
fn infer_regular_params(graph: &BipartiteGraph) -> Result<(usize, usize), Failure> {
    let mut check_degrees = (0..graph.check_count()).map(|i| graph.check_neighbors(i).len());
    let first_check = check_degrees
        .next()
        .ok_or_else(|| Failure::domain("factor has no check nodes"))?;
    if check_degrees.any(|d| d != first_check) || first_check == 0 {
        return Err(Failure::domain("factor check degrees are not uniform"));
    }
    let bit_adjacency = graph.bit_adjacency();
    let mut bit_degrees = bit_adjacency.iter().map(Vec::len);
    let first_bit = bit_degrees
        .next()
        .ok_or_else(|| Failure::domain("factor has no bit nodes"))?;
    if bit_degrees.any(|d| d != first_bit) || first_bit == 0 {
        return Err(Failure::domain("factor bit degrees are not uniform"));
    }
    Ok((first_check - 1, first_bit))
}

fn cmd_product(raw: &[String]) -> Result<(), Failure> {
    let args = ParsedArgs::parse(raw, &[])?;
    let iterate: Option<usize> = args.parse_flag("iterate")?;
    let out = args
        .flag("out")
        .ok_or_else(|| Failure::usage("missing required flag --out"))?;

    let (base, factors) = match (args.positional.as_slice(), iterate) {
        ([a], Some(m)) if m >= 2 => {
            let g = BipartiteGraph::from_matrix(&read_matrix(a)?);
            (g.clone(), vec![g; m - 1])
        }
        ([a, b], None) => {
            let first = BipartiteGraph::from_matrix(&read_matrix(a)?);
            let second = BipartiteGraph::from_matrix(&read_matrix(b)?);
            (first, vec![second])
        }
        (_, Some(m)) if m < 2 => return Err(Failure::usage("--iterate must be at least 2")),
        _ => {
            return Err(Failure::usage(
                "product takes two matrix files, or one file with --iterate M",
            ))
        }
    };

    let (mut r_cur, mut t_cur) = infer_regular_params(&base)?;
    let mut current = base;
    let mut last = None;
    for factor in &factors {
        let (r_f, t_f) = infer_regular_params(factor)?;
        let (css, cert) = build_product_code(
            &current,
            factor,
            r_cur,
            t_cur,
            r_f,
            t_f,
            DEFAULT_DISTANCE_CAP,
        )
        .map_err(|e| Failure::domain(e.to_string()))?;
        current = BipartiteGraph::from_matrix(css.matrix());
        r_cur = r_cur + r_f + 1;
        t_cur = r_cur + 1;
        last = Some((css, cert));
    }
    let (css, cert) = last.expect("at least one product step");

    println!("n={}", css.n());
    println!("k_lower={}", cert.k_lower);
    println!("k_actual={}", cert.k_actual);
    match cert.d_lower {
        Some(d) => println!("d_lower={d}"),
        None => println!("d_lower=uncomputed"),
    }
    let exact_label = |report: &crate::tanner::ExactnessReport| {
        if report.is_exact {
            format!("({},{},{})", report.r, report.t, report.s)
        } else {
            "FAIL".to_string()
        }
    };
    println!("exact={}", exact_label(&cert.product_exact));
    println!("transpose_exact={}", exact_label(&cert.transpose_exact));
    println!(
        "appendix={}",
        if cert.appendix_all_pass() {
            "PASS"
        } else {
            "FAIL"
        }
    );
    for check in &cert.appendix {
        println!(
            "appendix.{}={} dims={:?}",
            check.id,
            if check.pass { "PASS" } else { "FAIL" },
            check.dims
        );
    }

    std::fs::write(out, pcm::write_pcm(css.matrix()))
        .map_err(|e| Failure::internal(format!("cannot write {out}: {e}")))?;
    Ok(())
}

fn cmd_verify_paper_examples(raw: &[String]) -> Result<(), Failure> {
    let args = ParsedArgs::parse(raw, &["json"])?;
    if !args.positional.is_empty() {
        return Err(Failure::usage("verify-paper-examples takes no positionals"));
    }
    let matrix = match args.flag("matrix") {
        Some(path) => read_matrix(path)?,
        None => battery::bundled_matrix(),
    };
    let results = battery::run_all(&matrix);
    if args.switches.contains("json") {
        println!("{}", battery::to_json(&results));
    } else {
        for result in &results {
            println!("{}", battery::render_line(result));
        }
    }
    match results.iter().find(|r| !r.pass) {
        None => Ok(()),
        Some(first_failure) => Err(Failure {
            code: EXIT_INTERNAL,
            message: format!(
                "failed: criterion {} ({})",
                first_failure.index, first_failure.name
            ),
        }),
    }
}

fn cmd_sample_sets(raw: &[String]) -> Result<(), Failure> {
    let args = ParsedArgs::parse(raw, &[])?;
    let [path] = args.positional.as_slice() else {
        return Err(Failure::usage("sample-sets takes exactly one matrix file"));
    };
    let variant_name: String = args.require("variant")?;
    let variant = SetConstructionVariant::parse(&variant_name)
        .ok_or_else(|| Failure::usage(format!("unknown variant `{variant_name}`")))?;
    let d: u64 = match variant {
        SetConstructionVariant::M1M2 | SetConstructionVariant::Rts2 => args.require("d")?,
        SetConstructionVariant::P2 | SetConstructionVariant::Pe => {
            args.parse_flag("d")?.unwrap_or(1)
        }
    };
    let seed = match args.parse_flag::<u64>("seed")? {
        Some(seed) => seed,
        None => match std::env::var("QLRC_SEED") {
            Ok(text) => text
                .parse()
                .map_err(|_| Failure::usage(format!("QLRC_SEED: cannot parse `{text}`")))?,
            Err(_) => RunConfig::default().seed,
        },
    };

    let matrix = read_matrix(path)?;
    let graph = BipartiteGraph::from_matrix(&matrix);
    let family = graph
        .recovery_family()
        .map_err(|e| Failure::domain(e.to_string()))?;
    let restarts = match args.parse_flag::<usize>("restarts")? {
        Some(r) => r,
        None => default_restart_budget(family.position_count()),
    };

    let result =
        disjoint_correctable_sets(&family, variant, d, seed, restarts).map_err(|e| match e {
            RecoveryError::RestartsExhausted { attempts } => Failure {
                code: EXIT_BUDGET,
                message: format!(
                    "no ordering reached the target in {attempts} restarts; raise --restarts"
                ),
            },
            other => Failure::domain(other.to_string()),
        })?;

    let empty = BTreeSet::new();
    if !result.cert_a.verify(&family, &empty) || !result.cert_b.verify(&family, &result.a) {
        return Err(Failure::internal("certificate re-verification failed"));
    }

    println!(
        "n={} variant={} seed={seed}",
        family.position_count(),
        variant.id()
    );
    println!("A = {}", render_set(&result.a));
    println!("B = {}", render_set(&result.b));
    println!("cert_a: {}", render_certificate(&result.cert_a));
    println!("cert_b: {}", render_certificate(&result.cert_b));
    println!("k_bound={}", result.k_bound);
    Ok(())
}

fn render_set(set: &BTreeSet<usize>) -> String {
    let items: Vec<String> = set.iter().map(usize::to_string).collect();
    format!("[{}]", items.join(", "))
}

fn render_certificate(cert: &crate::recovery::RecoverableSequence) -> String {
    if cert.is_empty() {
        return "(empty)".to_string();
    }
    cert.positions
        .iter()
        .zip(&cert.alphas)
        .map(|(j, alpha)| match alpha {
            Some(alpha) => format!("j={j} alpha={alpha}"),
            None => format!("j={j} free"),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_format_is_locale_free() {
        let table = sweep(
            &[BoundKind::QSingleton],
            &BoundParams {
                n: 0,
                k: None,
                d: 3,
                r: 3,
                t: 4,
                s: 1,
            },
            SweepVariable::N,
            10,
            12,
        );
        let csv = table_to_csv(&table);
        assert_eq!(csv, "n,q_singleton\n10,6\n11,7\n12,8\n");
    }

    #[test]
    fn inapplicable_cells_serialize_as_na() {
        let table = sweep(
            &[BoundKind::ThmClassical],
            &BoundParams {
                n: 0,
                k: None,
                d: 3,
                r: 3,
                t: 4,
                s: 1,
            },
            SweepVariable::N,
            3,
            4,
        );
        // n = 4 is the first applicable length: 4 - (d-1) - n1(4,3,3,2) = 2.
        assert_eq!(table_to_csv(&table), "n,thm_classical\n3,NA\n4,2\n");
    }

    #[test]
    fn args_last_flag_wins() {
        let raw: Vec<String> = ["--seed", "1", "--seed", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let args = ParsedArgs::parse(&raw, &[]).unwrap();
        assert_eq!(args.flag("seed"), Some("2"));
    }

    #[test]
    fn unknown_command_is_usage_error() {
        assert_eq!(run(&["frobnicate".to_string()]), EXIT_USAGE);
    }

    #[test]
    fn missing_flag_value_is_usage_error() {
        let raw: Vec<String> = ["--bounds".to_string()].to_vec();
        assert!(ParsedArgs::parse(&raw, &[]).is_err());
    }
}
