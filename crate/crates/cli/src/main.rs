use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use codistflat::dtsys::{verify_flat_output, verify_triangular_decomposition, SysError, DEFAULT_MAX_SHIFT};
use codistflat::flatness::{compute_sequence, render_text, subsystem_consistency_check, AnalysisReport};
use codistflat::symcore::ZeroTest;
use codistflat::sysfile::{SysFileError, SystemFile};

#[derive(Parser)]
#[command(
    name = "codistflat",
    version,
    about = "Forward-flatness test for discrete-time systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the codistribution sequence and classify the system.
    Analyze(Common),
    /// Check the flat_output section of a system file.
    VerifyFlatOutput(Common),
    /// Check the decomposition section of a system file and compare the
    /// subsystem sequence with the full one.
    VerifyDecomposition(Common),
}

#[derive(Args)]
struct Common {
    /// System definition file.
    file: PathBuf,
    /// Write a machine-readable report to this path.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Seed for the randomized zero test.
    #[arg(long)]
    seed: Option<u64>,
    /// Highest input shift accepted during flat-output verification.
    #[arg(long, default_value_t = DEFAULT_MAX_SHIFT)]
    max_shift: u32,
    /// Print per-step bases and the Lie derivatives added in Step 2.
    #[arg(long)]
    trace: bool,
    /// Number of random evaluations in the zero test.
    #[arg(long, default_value_t = 8)]
    numeric_samples: usize,
}

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;
const INVERSION: u8 = 3;
const INTERNAL: u8 = 4;

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<SysError> for Failure {
    fn from(e: SysError) -> Self {
        let (code, kind) = if e.is_internal() {
            (INTERNAL, "internal")
        } else {
            match e {
                SysError::InversionFailed(_) => (INVERSION, "inversion-failed"),
                SysError::NotSubmersive(_) => (USAGE, "not-submersive"),
                SysError::ShiftCap { .. } => (USAGE, "shift-cap"),
                _ => (USAGE, "invalid-system"),
            }
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<SysFileError> for Failure {
    fn from(e: SysFileError) -> Self {
        match e {
            SysFileError::System(e) => e.into(),
            e => Failure {
                code: USAGE,
                kind: "parse",
                message: e.to_string(),
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { PASS });
        }
    };
    let (name, opts) = match &cli.command {
        Command::Analyze(o) => ("analyze", o),
        Command::VerifyFlatOutput(o) => ("verify-flat-output", o),
        Command::VerifyDecomposition(o) => ("verify-decomposition", o),
    };
    let result = load(opts).and_then(|(file, zt)| match &cli.command {
        Command::Analyze(_) => analyze(&file, &zt, opts),
        Command::VerifyFlatOutput(_) => flat_output(&file, &zt, opts),
        Command::VerifyDecomposition(_) => decomposition(&file, &zt),
    });
    let (code, doc) = match result {
        Ok((code, text, doc)) => {
            print!("{text}");
            (code, doc)
        }
        Err(f) => {
            eprintln!("error[{}]: {}", f.kind, f.message);
            let doc =
                json!({ "command": name, "error": { "kind": f.kind, "message": f.message, "exit_code": f.code } });
            (f.code, doc)
        }
    };
    if let Some(path) = &opts.json {
        if let Err(e) = write_json(path, &doc) {
            eprintln!("error[io]: cannot write {}: {e}", path.display());
            return ExitCode::from(USAGE);
        }
    }
    ExitCode::from(code)
}

fn write_json(path: &Path, doc: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(doc).expect("json value serializes");
    text.push('\n');
    std::fs::write(path, text)
}

fn load(opts: &Common) -> Result<(SystemFile, ZeroTest), Failure> {
    let text = std::fs::read_to_string(&opts.file).map_err(|e| Failure {
        code: USAGE,
        kind: "io",
        message: format!("cannot read {}: {e}", opts.file.display()),
    })?;
    let file = SystemFile::parse(&text)?;
    let mut zt = ZeroTest::default();
    if let Some(seed) = opts.seed {
        zt.seed = seed;
    }
    zt.samples = opts.numeric_samples;
    Ok((file, zt))
}

type Outcome = Result<(u8, String, Value), Failure>;

fn analyze(file: &SystemFile, zt: &ZeroTest, opts: &Common) -> Outcome {
    let sys = file.to_system(zt)?;
    let report = compute_sequence(&sys, zt)?;
    let code = if report.verdict.is_forward_flat() { PASS } else { FAIL };
    let doc = serde_json::to_value(AnalysisReport::new(&report)).expect("report serializes");
    Ok((code, render_text(&report, opts.trace), doc))
}

fn flat_output(file: &SystemFile, zt: &ZeroTest, opts: &Common) -> Outcome {
    let sys = file.to_system(zt)?;
    let cand = file.flat_output_candidate()?.ok_or_else(|| Failure {
        code: USAGE,
        kind: "parse",
        message: "file has no flat_output section".into(),
    })?;
    let v = verify_flat_output(&sys, &cand, opts.max_shift, zt)?;
    let mut text = format!("system: {}\n", sys.name());
    let mut residuals = Vec::new();
    for r in &v.residuals {
        let mark = if r.vanishes { "ok  " } else { "FAIL" };
        text.push_str(&format!("{mark} {r}\n"));
        residuals.push(json!({
            "kind": format!("{:?}", r.kind).to_lowercase(),
            "component": r.component,
            "value": r.value.as_ref().map(|e| e.to_string()),
            "vanishes": r.vanishes,
            "note": r.note,
        }));
    }
    let passed = v.passed();
    text.push_str(if passed {
        "flat output verified\n"
    } else {
        "flat output rejected\n"
    });
    let doc = json!({ "system": sys.name(), "passed": passed, "q": cand.q(), "residuals": residuals });
    Ok((if passed { PASS } else { FAIL }, text, doc))
}

fn decomposition(file: &SystemFile, zt: &ZeroTest) -> Outcome {
    let sys = file.to_system(zt)?;
    let dec = file.triangular_decomposition()?.ok_or_else(|| Failure {
        code: USAGE,
        kind: "parse",
        message: "file has no decomposition section".into(),
    })?;
    let v = verify_triangular_decomposition(&sys, &dec, zt)?;
    let mut text = format!("system: {}\n", sys.name());
    let names = |s: &[codistflat::symcore::Symbol]| s.iter().map(|s| s.name().to_string()).collect::<Vec<_>>();
    let (xbar, ubar) = (names(&v.xbar), names(&v.ubar));
    let transformed: Option<Vec<String>> = v
        .transformed
        .as_ref()
        .map(|f| f.iter().map(|e| e.to_string()).collect());
    if let Some(f) = &transformed {
        for (x, e) in xbar.iter().zip(f) {
            text.push_str(&format!("{x}+ = {e}\n"));
        }
    }
    for r in &v.reasons {
        text.push_str(&format!("FAIL {r}\n"));
    }
    let sub = if v.valid {
        Some(subsystem_consistency_check(&sys, &dec, zt)?)
    } else {
        None
    };
    if let Some(s) = &sub {
        for (k, (a, b)) in s.pairs.iter().enumerate() {
            let rel = if a == b { "=" } else { "≠" };
            text.push_str(&format!("P'{} = {a} {rel} P{} = {b}\n", k + 1, k + 2));
        }
        if let Some(r) = &s.reason {
            text.push_str(&format!("FAIL {r}\n"));
        }
    }
    let passed = v.valid && sub.as_ref().is_some_and(|s| s.consistent);
    text.push_str(if passed {
        "decomposition verified\n"
    } else {
        "decomposition rejected\n"
    });
    let doc = json!({
        "system": sys.name(),
        "passed": passed,
        "valid": v.valid,
        "reasons": v.reasons,
        "xbar": xbar,
        "ubar": ubar,
        "transformed": transformed,
        "subsystem": sub.as_ref().map(|s| json!({
            "consistent": s.consistent,
            "first_mismatch": s.first_mismatch,
            "reason": s.reason,
            "pairs": s.pairs,
        })),
    });
    Ok((if passed { PASS } else { FAIL }, text, doc))
}
