//! The `sace` command line. Exit codes: 0 success, 1 failed checks or lint
//! errors, 2 usage errors, 3 artifacts that cannot be parsed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::artifact::{stage, ArtifactId, ArtifactRef, STAGES};
use crate::assemble::{assemble, assemble_full_case, build_sub_argument, Shortfall};
use crate::gsn::{check_graph, to_dot};
use crate::hazard::{render_table, validation_checklist};
use crate::lint::{has_errors, lint, trace_matrix, trace_matrix_csv};
use crate::odm::{
    check_assessment_matrix, check_odm, check_rod, check_transition_model, evaluate_trace,
    read_trace_csv,
};
use crate::patterns::{get_pattern, PatternId};
use crate::project::{Project, ProjectError};
use crate::registry::{
    default_path, default_records, Manifest, Registry, RegistryError, MANIFEST_FILE,
};
use crate::req::{lint_terms, parse_with_id};

pub const PROJECT_ENV: &str = "SACE_PROJECT";

#[derive(Parser, Debug)]
#[command(name = "sace", version, about = "Staged safety assurance toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Create a manifest and blank artifact stubs.
    Init {
        #[arg(long)]
        name: Option<String>,
        #[arg(long, default_value_t = 1)]
        tiers: u32,
    },
    /// Per-stage readiness and stale artifacts.
    Status,
    /// Check a stage's outputs and record them as validated.
    Validate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        stage: u8,
        #[arg(long)]
        tier: Option<u32>,
    },
    /// Regenerate the decision tables and hazardous scenarios.
    Enumerate,
    /// Requirement grammar and term checks.
    Requirements {
        #[command(subcommand)]
        action: RequirementsAction,
    },
    /// ODM, ROD, transition model and assessment matrix checks.
    Odm {
        #[command(subcommand)]
        action: OdmAction,
    },
    /// Boundary recognizer evaluation.
    Boundary {
        #[command(subcommand)]
        action: BoundaryAction,
    },
    /// Instantiate one pattern from the project sources.
    Instantiate {
        #[arg(long)]
        pattern: PatternId,
        #[arg(long)]
        tier: Option<u32>,
    },
    /// Assemble the complete safety case.
    Assemble,
    /// Cross-artifact lint.
    Lint,
    /// Export the argument as DOT or a text report.
    Export {
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Export a built-in pattern instead of the project argument.
        #[arg(long)]
        pattern: Option<PatternId>,
    },
    /// Requirement trace matrix.
    TraceMatrix,
}

#[derive(Subcommand, Debug)]
pub enum RequirementsAction {
    Check,
}

#[derive(Subcommand, Debug)]
pub enum OdmAction {
    Check,
}

#[derive(Subcommand, Debug)]
pub enum BoundaryAction {
    Eval {
        #[arg(long)]
        trace: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Report,
}

#[derive(Debug)]
enum Failure {
    /// Checks ran and found problems.
    Checks,
    Usage(String),
    Unparseable(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Checks | Failure::Other(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Unparseable(_) => 3,
        }
    }
}

impl From<RegistryError> for Failure {
    fn from(e: RegistryError) -> Self {
        match e {
            RegistryError::UnknownStage(_) | RegistryError::TierRequired(_) => {
                Failure::Usage(e.to_string())
            }
            RegistryError::Io { ref path, .. } if path.ends_with(MANIFEST_FILE) => Failure::Usage(
                format!("{e} (not a project directory; run `sace init` or set {PROJECT_ENV})"),
            ),
            RegistryError::Manifest { .. } | RegistryError::BadTier(..) => {
                Failure::Unparseable(e.to_string())
            }
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<ProjectError> for Failure {
    fn from(e: ProjectError) -> Self {
        match e {
            ProjectError::Registry(r) => r.into(),
            ProjectError::Parse { .. } => Failure::Unparseable(e.to_string()),
            ProjectError::Hazard(h) => Failure::Other(h.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Other(format!("{}: {e}", path.display()))
}

/// Project root: `SACE_PROJECT` if set, else the current directory.
pub fn project_root() -> PathBuf {
    std::env::var_os(PROJECT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Parses `args` (program name first) and runs the command against `root`.
pub fn run<I, T>(args: I, root: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, root, out) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Checks => {}
                Failure::Usage(m) | Failure::Unparseable(m) | Failure::Other(m) => {
                    let _ = writeln!(err, "error: {m}");
                }
            }
            f.code()
        }
    }
}

fn write_out(root: &Path, rel: &str, contents: &str) -> Result<(), Failure> {
    let path = root.join(rel);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    }
    fs::write(&path, contents).map_err(|e| io_failure(&path, e))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

macro_rules! say {
    ($out:expr) => {
        let _ = writeln!($out);
    };
    ($out:expr, $($arg:tt)*) => {
        let _ = writeln!($out, $($arg)*);
    };
}

fn execute(cmd: Command, root: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Init { name, tiers } => init(root, name, tiers, out),
        Command::Status => status(root, out),
        Command::Validate { stage, tier } => validate(root, stage, tier, out),
        Command::Enumerate => enumerate(root, out),
        Command::Requirements {
            action: RequirementsAction::Check,
        } => requirements_check(root, out),
        Command::Odm {
            action: OdmAction::Check,
        } => odm_check(root, out),
        Command::Boundary {
            action: BoundaryAction::Eval { trace },
        } => boundary_eval(root, &trace, out),
        Command::Instantiate { pattern, tier } => instantiate_cmd(root, pattern, tier, out),
        Command::Assemble => assemble_cmd(root, out),
        Command::Lint => lint_cmd(root, out),
        Command::Export { format, pattern } => export(root, format, pattern, out),
        Command::TraceMatrix => trace_matrix_cmd(root, out),
    }
}

fn init(root: &Path, name: Option<String>, tiers: u32, out: &mut dyn Write) -> Result<(), Failure> {
    if tiers == 0 {
        return Err(Failure::Usage("--tiers must be at least 1".into()));
    }
    if root.join(MANIFEST_FILE).exists() {
        return Err(Failure::Usage(format!(
            "{} already exists in {}",
            MANIFEST_FILE,
            root.display()
        )));
    }
    let name = name.unwrap_or_else(|| {
        root.canonicalize()
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "system".into())
    });
    let records = default_records(tiers);
    for rec in &records {
        let path = root.join(&rec.path);
        if rec.path.starts_with("out/") || path.exists() {
            continue;
        }
        write_out(root, &rec.path, "")?;
    }
    let reg = Registry::new(
        root,
        Manifest {
            name: name.clone(),
            tiers,
            artifacts: records,
        },
    );
    reg.save()?;
    say!(
        out,
        "initialised {name} with {tiers} tier(s) in {}",
        root.display()
    );
    Ok(())
}

fn status(root: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let reg = Registry::load(root)?;
    let tiers = reg.manifest.tiers.max(1);
    for spec in STAGES.iter() {
        let tier_list: Vec<Option<u32>> = if spec.is_tiered() {
            (0..tiers).map(Some).collect()
        } else {
            vec![None]
        };
        for tier in tier_list {
            let report = reg.stage_readiness(spec.number, tier)?;
            let label = match tier {
                Some(t) => format!("stage {} (tier {t})", spec.number),
                None => format!("stage {}", spec.number),
            };
            let missing = report.missing();
            if missing.is_empty() {
                say!(out, "{label} {}: ready", spec.name);
            } else {
                let list: Vec<String> = missing.iter().map(|m| m.to_string()).collect();
                say!(out, "{label} {}: missing {}", spec.name, list.join(", "));
            }
        }
    }
    for s in reg.stale_check() {
        say!(out, "stale {}: {}", s.artifact, s.reason);
    }
    Ok(())
}

/// Content checks for a stage; returns human-readable problems.
fn stage_checks(p: &Project, number: u8, tier: Option<u32>) -> Result<Vec<String>, Failure> {
    let mut problems = Vec::new();
    match number {
        1 => {
            if let Some(odm) = &p.odm {
                problems.extend(check_odm(odm).iter().map(|i| i.to_string()));
            }
        }
        2 => {
            let (tables, scenarios) = p.hazard_analysis()?;
            let odm = p.odm.clone().unwrap_or_default();
            let cat = p.scenarios.clone().unwrap_or_default();
            let decisions = p.decisions.clone().unwrap_or_default();
            problems.extend(
                validation_checklist(&odm, &cat, &decisions, &tables, &scenarios)
                    .iter()
                    .map(|f| format!("{:?} {}: {}", f.check, f.locus, f.message)),
            );
        }
        3 | 4 => {
            let tiers: Vec<u32> = match (number, tier) {
                (3, _) => vec![0],
                (_, Some(t)) => vec![t],
                _ => vec![],
            };
            for t in tiers {
                for r in p.requirements.get(&t).into_iter().flatten() {
                    if let Err(e) = parse_with_id(&r.id, &r.text) {
                        problems.push(format!("{}: {e}", r.id));
                    }
                }
            }
            if number == 3 {
                if let (Some(odm), Some(soc)) = (&p.odm, &p.soc) {
                    for rod in &soc.rods {
                        problems.extend(check_rod(odm, rod).iter().map(|i| i.to_string()));
                    }
                }
            }
        }
        7 => {
            if let Some(tm) = &p.transitions {
                problems.extend(check_transition_model(tm).iter().map(|i| i.to_string()));
            }
            if let Some(m) = &p.assessment {
                problems.extend(check_assessment_matrix(m).iter().map(|i| i.to_string()));
            }
        }
        _ => {}
    }
    Ok(problems)
}

fn validate(
    root: &Path,
    number: u8,
    tier: Option<u32>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let mut reg = Registry::load(root)?;
    let report = reg.stage_readiness(number, tier)?;
    let missing = report.missing();
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(|m| m.to_string()).collect();
        say!(out, "stage {number} not ready: missing {}", list.join(", "));
        return Err(Failure::Checks);
    }
    let project = Project::from_registry(reg.clone())?;
    let problems = stage_checks(&project, number, tier)?;
    if !problems.is_empty() {
        for p in &problems {
            say!(out, "{p}");
        }
        return Err(Failure::Checks);
    }
    let spec = stage(number).expect("range checked by the parser");
    let tiers = reg.manifest.tiers.max(1);
    let pick = |id: ArtifactId| -> Vec<ArtifactRef> {
        if !id.is_tier_indexed() {
            vec![ArtifactRef::untiered(id)]
        } else if let Some(t) = tier {
            vec![ArtifactRef::at(id, t)]
        } else {
            (0..tiers).map(|t| ArtifactRef::at(id, t)).collect()
        }
    };
    let mut refs: Vec<ArtifactRef> = spec.outputs.iter().flat_map(|&id| pick(id)).collect();
    refs.extend(
        spec.inputs
            .iter()
            .filter(|id| ArtifactId::PURE_INPUTS.contains(id))
            .flat_map(|&id| pick(id)),
    );
    let changed = reg.mark_validated(&refs);
    reg.save()?;
    if changed.is_empty() {
        say!(out, "stage {number}: nothing to record");
    }
    for c in changed {
        say!(out, "validated {c}");
    }
    Ok(())
}

fn enumerate(root: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let project = Project::load(root)?;
    if project.decisions.is_none() {
        return Err(Failure::Usage(format!(
            "{} is missing or blank",
            project.rel_path(ArtifactId::WW, None)
        )));
    }
    let (tables, scenarios) = project.hazard_analysis()?;
    let text: String = tables
        .iter()
        .map(render_table)
        .collect::<Vec<_>>()
        .join("\n");
    write_out(root, "out/WW.json", &to_json(&tables))?;
    write_out(root, "out/WW.txt", &text)?;
    write_out(root, "out/XX.json", &to_json(&scenarios))?;
    for t in &tables {
        let hazardous = scenarios
            .iter()
            .filter(|s| s.decision_point == t.decision_point)
            .count();
        say!(
            out,
            "{}: {} situations, {} hazardous scenarios",
            t.decision_point,
            t.rows.len(),
            hazardous
        );
    }
    for s in &scenarios {
        say!(out, "{} {}", s.id, s.statement);
    }
    Ok(())
}

fn requirements_check(root: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let project = Project::load(root)?;
    let ontology = project.ontology();
    let mut failed = false;
    for (t, reqs) in &project.requirements {
        for r in reqs {
            match parse_with_id(&r.id, &r.text) {
                Ok(parsed) => {
                    say!(out, "tier-{t}/{} {:?}", r.id, parsed.template);
                    for w in lint_terms(&parsed, &ontology) {
                        say!(
                            out,
                            "  warning: `{}` is not defined ({:?}, offset {})",
                            w.term,
                            w.location,
                            w.offset
                        );
                    }
                }
                Err(e) => {
                    failed = true;
                    say!(out, "tier-{t}/{} error: {e}", r.id);
                }
            }
        }
    }
    if failed {
        Err(Failure::Checks)
    } else {
        Ok(())
    }
}

fn odm_check(root: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let project = Project::load(root)?;
    let mut issues = Vec::new();
    match &project.odm {
        Some(odm) => {
            issues.extend(check_odm(odm));
            if let Some(soc) = &project.soc {
                for rod in &soc.rods {
                    issues.extend(check_rod(odm, rod));
                }
            }
        }
        None => {
            return Err(Failure::Usage(format!(
                "{} is missing or blank",
                project.rel_path(ArtifactId::B, None)
            )))
        }
    }
    if let Some(tm) = &project.transitions {
        issues.extend(check_transition_model(tm));
    }
    if let Some(m) = &project.assessment {
        issues.extend(check_assessment_matrix(m));
    }
    for i in &issues {
        say!(out, "{i}");
    }
    if issues.is_empty() {
        say!(out, "odm: ok");
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn boundary_eval(root: &Path, trace: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let project = Project::load(root)?;
    let boundary = project.boundary.clone().ok_or_else(|| {
        Failure::Usage(format!(
            "{} is missing or blank",
            project.rel_path(ArtifactId::HH, None)
        ))
    })?;
    let stem = trace
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let spec = match boundary.recognizers.as_slice() {
        [only] => only,
        many => many.iter().find(|r| r.id == stem).ok_or_else(|| {
            Failure::Usage(format!(
                "no recognizer with id `{stem}` among {}",
                many.iter()
                    .map(|r| r.id.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        })?,
    };
    let path = if trace.is_absolute() || trace.exists() {
        trace.to_path_buf()
    } else {
        root.join(trace)
    };
    let file = fs::File::open(&path).map_err(|e| io_failure(&path, e))?;
    let (samples, truth) = read_trace_csv(file)
        .map_err(|e| Failure::Unparseable(format!("{}: {e}", path.display())))?;
    let metrics = evaluate_trace(spec, &samples, &truth)
        .map_err(|e| Failure::Unparseable(format!("{}: {e}", path.display())))?;
    let _ = write!(out, "{}", to_json(&metrics));
    Ok(())
}

fn instantiate_cmd(
    root: &Path,
    pattern: PatternId,
    tier: Option<u32>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let project = Project::load(root)?;
    if pattern.is_tiered() && pattern != PatternId::Decomposition && tier.is_none() {
        return Err(Failure::Usage(format!("{pattern} needs --tier")));
    }
    let arg = build_sub_argument(&project, pattern, tier).map_err(|s| match s {
        Shortfall::MissingSources { artifacts } => Failure::Other(format!(
            "{pattern}: missing {}",
            artifacts
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )),
        Shortfall::Failed { reason } => Failure::Other(format!("{pattern}: {reason}")),
    })?;
    let rel = match pattern.output() {
        Some(id) => default_path(id, tier),
        None => format!("out/{}.json", pattern.name().to_ascii_lowercase()),
    };
    write_out(root, &rel, &to_json(&arg))?;
    say!(
        out,
        "{pattern}: {} nodes, {} edges written to {rel}",
        arg.graph.nodes.len(),
        arg.graph.edges.len()
    );
    for w in &arg.warnings {
        say!(out, "  warning: {w}");
    }
    Ok(())
}

fn assemble_cmd(root: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let project = Project::load(root)?;
    let arg = assemble_full_case(&project).map_err(|e| Failure::Other(e.to_string()))?;
    let dot = to_dot(&arg.graph).map_err(|e| Failure::Other(e.to_string()))?;
    write_out(root, "out/argument.json", &to_json(&arg))?;
    write_out(root, "out/argument.dot", &dot)?;
    say!(
        out,
        "argument: {} nodes, {} edges, {} of {} claim points supported",
        arg.graph.nodes.len(),
        arg.graph.edges.len(),
        arg.graph.acp_labels().len() - arg.graph.unsatisfied_acps().len(),
        arg.graph.acp_labels().len()
    );
    for w in &arg.warnings {
        say!(out, "  warning: {w}");
    }
    Ok(())
}

fn lint_cmd(root: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let project = Project::load(root)?;
    let findings = lint(&project)?;
    write_out(root, "out/lint.json", &to_json(&findings))?;
    for f in &findings {
        say!(out, "{f}");
    }
    if has_errors(&findings) {
        Err(Failure::Checks)
    } else {
        Ok(())
    }
}

fn export(
    root: &Path,
    format: ExportFormat,
    pattern: Option<PatternId>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if let Some(id) = pattern {
        let p = get_pattern(id);
        match format {
            ExportFormat::Dot => {
                let _ = write!(out, "{}", p.to_dot());
            }
            ExportFormat::Report => {
                say!(out, "pattern {id}: root {}", p.root);
                for r in &p.roles {
                    say!(out, "role {} ({:?})", r.name, r.role_type);
                }
                for n in &p.nodes {
                    say!(out, "{} {:?}: {}", n.id, n.kind, n.statement);
                }
            }
        }
        return Ok(());
    }
    let project = Project::load(root)?;
    let assembly = assemble(&project)?;
    let graph = &assembly.argument.graph;
    match format {
        ExportFormat::Dot => {
            let dot = to_dot(graph).map_err(|e| Failure::Other(e.to_string()))?;
            let _ = write!(out, "{dot}");
        }
        ExportFormat::Report => {
            say!(out, "# Safety case report: {}", project.name());
            say!(out);
            say!(out, "## Argument");
            say!(out, "nodes: {}", graph.nodes.len());
            say!(out, "edges: {}", graph.edges.len());
            say!(
                out,
                "well-formedness violations: {}",
                check_graph(graph).len()
            );
            for label in graph.acp_labels() {
                let state = if graph.is_acp_satisfied(label) {
                    "supported"
                } else {
                    "open"
                };
                say!(out, "claim point {label}: {state}");
            }
            for u in &assembly.unattached {
                say!(out, "not attached: {} at {}", u.pattern, u.site);
            }
            say!(out);
            say!(out, "## Lint");
            let findings = lint(&project)?;
            if findings.is_empty() {
                say!(out, "no findings");
            }
            for f in &findings {
                say!(out, "{f}");
            }
            say!(out);
            say!(out, "## Trace matrix");
            for r in trace_matrix(&project) {
                say!(
                    out,
                    "tier {} {}: parents [{}] children [{}] evidence [{}] scenarios [{}]",
                    r.tier,
                    r.id,
                    r.parents.join(", "),
                    r.children.join(", "),
                    r.evidence.join(", "),
                    r.scenarios.join(", ")
                );
            }
        }
    }
    Ok(())
}

fn trace_matrix_cmd(root: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let project = Project::load(root)?;
    let rows = trace_matrix(&project);
    let csv = trace_matrix_csv(&rows).map_err(|e| Failure::Other(e.to_string()))?;
    write_out(root, "out/trace_matrix.csv", &csv)?;
    let header = ["tier", "id", "parents", "children", "evidence", "scenarios"];
    let mut table: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    for r in &rows {
        table.push(vec![
            r.tier.to_string(),
            r.id.clone(),
            r.parents.join(", "),
            r.children.join(", "),
            r.evidence.join(", "),
            r.scenarios.join(", "),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            table
                .iter()
                .map(|row| row[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    for row in &table {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        say!(out, "{}", cells.join("  ").trim_end());
    }
    Ok(())
}
