//! `lasco`: lint policies, check histories, simulate distributed
//! enforcement and debug predicates.
//!
//! Exit status: 0 when nothing is violated, 1 when a violation or alert is
//! reported, 2 on a usage, parse or lint error.

mod report;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lasco_core::distsim::{parse_topology, parse_trace, run_simulation, DistsimError, PoolMode};
use lasco_core::eval::{eval_pred_with_diagnostics, VarBindings};
use lasco_core::history::{parse_history, HistoryError, SystemGraph, SystemHistory};
use lasco_core::lang::{lint_policy, parse_literal, parse_policy_file_named, ParseError, PolicyFileError};
use lasco_core::matcher::{
    find_violations, find_violations_incremental, MatchCache, MatchError, MatchOptions, ViolationReport,
};
use lasco_core::{parse_predicate, AttrSet, PolicyGraph};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Policy { path: PathBuf, source: PolicyFileError },
    #[error("{path}: {source}")]
    History { path: PathBuf, source: HistoryError },
    #[error("replay: {0}")]
    Replay(HistoryError),
    #[error(transparent)]
    Distsim(#[from] DistsimError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error("predicate: {0}")]
    Predicate(#[from] ParseError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    /// JSON lines, one object per report.
    Structured,
}

#[derive(Parser, Debug)]
#[command(name = "lasco", version, about = "Graph-based security policy checking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Report well-formedness problems in a policy file.
    Lint { policy_file: PathBuf },
    /// Check a history against every policy in a file.
    Check {
        policy_file: PathBuf,
        history_file: PathBuf,
        /// Feed the history one instance at a time through the incremental
        /// matcher instead of checking it in one batch.
        #[arg(long)]
        incremental_replay: bool,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Report an isolated-node violation once per object rather than
        /// once per snapshot.
        #[arg(long)]
        collapse_isolated: bool,
    },
    /// Run the department engines of a topology over a trace.
    Simulate {
        topology_file: PathBuf,
        policy_file: PathBuf,
        trace_file: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Scan pools linearly instead of through the per-piece index.
        #[arg(long)]
        linear_pool: bool,
    },
    /// Evaluate one predicate and print the resulting variable conditions.
    Pred {
        expression: String,
        /// Attribute value, as `name=literal`. Repeatable.
        #[arg(long = "attrs", value_name = "NAME=VALUE", num_args = 1..)]
        attrs: Vec<String>,
        /// Variable binding, as `$var=literal`. Repeatable.
        #[arg(long = "bind", value_name = "$VAR=VALUE", num_args = 1..)]
        bind: Vec<String>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_policies(path: &Path) -> Result<Vec<PolicyGraph>, CliError> {
    let source = path
        .file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    parse_policy_file_named(&read(path)?, &source).map_err(|source| CliError::Policy {
        path: path.to_path_buf(),
        source,
    })
}

fn load_history(path: &Path) -> Result<SystemHistory, CliError> {
    parse_history(&read(path)?).map_err(|source| CliError::History {
        path: path.to_path_buf(),
        source,
    })
}

fn lint(path: &Path) -> Result<u8, CliError> {
    let policies = load_policies(path)?;
    if policies.is_empty() {
        println!("warning: {} defines no policies", path.display());
        return Ok(0);
    }
    let mut errors = 0;
    for p in &policies {
        let diags = lint_policy(p);
        for d in &diags {
            match d.element {
                Some(el) => println!("{}: {} [{}] {}: {}", p.name, d.severity, d.code, p.label(el), d.message),
                None => println!("{}: {} [{}]: {}", p.name, d.severity, d.code, d.message),
            }
        }
        errors += diags.iter().filter(|d| d.is_error()).count();
        if diags.is_empty() {
            println!("{}: ok", p.name);
        }
    }
    Ok(if errors > 0 { 2 } else { 0 })
}

fn batch(policies: &[PolicyGraph], h: &SystemHistory) -> Result<Vec<Vec<ViolationReport>>, CliError> {
    let g = lasco_core::history::build_system_graph(h, None);
    let opts = MatchOptions::default();
    Ok(policies
        .iter()
        .map(|p| find_violations(p, &g, &opts))
        .collect::<Result<_, _>>()?)
}

fn replay(policies: &[PolicyGraph], h: &SystemHistory) -> Result<Vec<Vec<ViolationReport>>, CliError> {
    let opts = MatchOptions::default();
    let mut g = SystemGraph::new();
    let mut caches = vec![MatchCache::new(); policies.len()];
    let mut out = vec![Vec::new(); policies.len()];
    for (_, inst) in h.instances() {
        g.append_instance(inst).map_err(CliError::Replay)?;
        for (i, p) in policies.iter().enumerate() {
            out[i].extend(find_violations_incremental(p, &g, &mut caches[i], &opts)?);
        }
    }
    Ok(out)
}

/// Sorts and deduplicates one policy's reports so batch and replay print
/// identically. With `collapse`, reports differing only in the snapshot
/// times of isolated nodes keep the earliest.
fn normalize(mut reports: Vec<ViolationReport>, collapse: bool) -> Vec<ViolationReport> {
    reports.sort_by(|a, b| {
        (&a.matched.ps, &a.matched.conds.bindings, &a.failed).cmp(&(
            &b.matched.ps,
            &b.matched.conds.bindings,
            &b.failed,
        ))
    });
    reports.dedup();
    if collapse {
        let mut seen = BTreeSet::new();
        reports.retain(|r| {
            let m = &r.matched;
            let objects: Vec<_> = m.ps.node_map.iter().map(|(n, (o, _))| (*n, o.clone())).collect();
            seen.insert((
                m.ps.edge_map.clone(),
                objects,
                m.conds.bindings.clone(),
                r.failed.clone(),
            ))
        });
    }
    reports
}

fn check(
    policy_file: &Path,
    history_file: &Path,
    incremental: bool,
    format: Format,
    collapse: bool,
) -> Result<u8, CliError> {
    let policies = load_policies(policy_file)?;
    let h = load_history(history_file)?;
    let per_policy = if incremental {
        replay(&policies, &h)?
    } else {
        batch(&policies, &h)?
    };
    let mut found = false;
    for (p, reports) in policies.iter().zip(per_policy) {
        for r in normalize(reports, collapse) {
            found = true;
            println!(
                "{}",
                match format {
                    Format::Text => report::violation_text(p, &r.matched, &r.failed),
                    Format::Structured => report::violation_json(p, &r.matched, &r.failed),
                }
            );
        }
    }
    Ok(u8::from(found))
}

fn simulate(topology: &Path, policy_file: &Path, trace: &Path, format: Format, linear: bool) -> Result<u8, CliError> {
    let topo = parse_topology(&read(topology)?)?;
    let policies = load_policies(policy_file)?;
    let trace = parse_trace(&read(trace)?, &topo)?;
    let mode = if linear { PoolMode::Linear } else { PoolMode::Indexed };
    let alerts = run_simulation(&topo, &policies, &trace, mode)?;
    for a in &alerts {
        let p = policies
            .iter()
            .find(|p| p.name == a.policy)
            .expect("alert names a loaded policy");
        println!(
            "{}",
            match format {
                Format::Text => report::alert_text(p, a),
                Format::Structured => report::alert_json(p, a),
            }
        );
    }
    Ok(u8::from(!alerts.is_empty()))
}

fn split_assignment(s: &str) -> Result<(&str, &str), CliError> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| CliError::Usage(format!("expected NAME=VALUE, got '{s}'")))
}

fn pred(expression: &str, attrs: &[String], bind: &[String]) -> Result<u8, CliError> {
    let e = parse_predicate(expression)?;
    let mut a = AttrSet::new();
    for s in attrs {
        let (k, v) = split_assignment(s)?;
        a.insert(k.to_string(), parse_literal(v)?);
    }
    let mut b = VarBindings::new();
    for s in bind {
        let (k, v) = split_assignment(s)?;
        b.insert(k.trim_start_matches('$').to_string(), parse_literal(v)?);
    }
    let (c, warnings) = eval_pred_with_diagnostics(&e, &a, &b);
    for w in warnings {
        eprintln!("warning: {w}");
    }
    println!("{c}");
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Lint { policy_file } => lint(&policy_file),
        Command::Check {
            policy_file,
            history_file,
            incremental_replay,
            format,
            collapse_isolated,
        } => check(
            &policy_file,
            &history_file,
            incremental_replay,
            format,
            collapse_isolated,
        ),
        Command::Simulate {
            topology_file,
            policy_file,
            trace_file,
            format,
            linear_pool,
        } => simulate(&topology_file, &policy_file, &trace_file, format, linear_pool),
        Command::Pred {
            expression,
            attrs,
            bind,
        } => pred(&expression, &attrs, &bind),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
