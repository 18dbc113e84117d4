//! `mbl`: run layout programs, score predictions, synthesize datasets,
//! render plans, and call a generation endpoint.

mod client;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use mbl_core::dsl::repair_source;
use mbl_core::kernel::{run_source, KernelConfig, RunError};
use mbl_core::layout_json::{export_layout, from_json, to_json};
use mbl_core::metrics::{
    aggregate_csv, aggregate_markdown, batch_evaluate, records_jsonl, BatchConfig, BatchItem,
    CohortDim,
};
use mbl_core::svg::render_svg;
use mbl_core::synth::{build_full_dataset, dataset_jsonl, SynthConfig};

#[derive(Parser)]
#[command(name = "mbl", version, about = "Modular building layout toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute a layout program and export the layout document.
    Run {
        /// Program file (.mbl, UTF-8).
        file: PathBuf,
        /// Write the layout JSON here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also render the executed layout to this SVG file.
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
        /// Repair the program before running; the repair log goes to
        /// standard error.
        #[arg(long)]
        repair: bool,
        /// Embed adjacency/connectivity matrices in the document.
        #[arg(long)]
        topology: bool,
    },
    /// Score predictions against gold programs.
    Eval {
        /// Predictions: a directory of .mbl/.txt files or a JSONL file.
        #[arg(long)]
        pred: PathBuf,
        /// Gold programs: same shapes as --pred.
        #[arg(long)]
        gold: PathBuf,
        /// Output directory for records.jsonl, aggregate.csv, aggregate.md.
        #[arg(long, default_value = "eval-out")]
        out: PathBuf,
        /// Predictions are coordinate-sequence text; geometry scores only.
        #[arg(long)]
        coordinate: bool,
        /// Add per-cohort aggregate rows split along this count.
        #[arg(long, value_name = "modules|units|rooms")]
        group_by: Option<String>,
    },
    /// Generate a synthetic dataset.
    Synth {
        /// Generation config JSON; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        /// Number of records.
        #[arg(long, short = 'n')]
        count: usize,
        /// Output JSONL path.
        #[arg(long)]
        out: PathBuf,
        /// Attach count-only skeleton instructions to each record.
        #[arg(long)]
        skeleton: bool,
    },
    /// Render a layout document to SVG.
    Render {
        /// Layout JSON file produced by `mbl run`.
        file: PathBuf,
        /// Output SVG path; defaults to the input with an .svg extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a description into program code via a model endpoint.
    Gen {
        /// Text file holding the description.
        #[arg(long)]
        description: PathBuf,
        /// Endpoint config JSON (base_url, model, token_env, temperature,
        /// max_output_tokens).
        #[arg(long)]
        endpoint: PathBuf,
        /// Prompt template file containing a {{description}} placeholder.
        #[arg(long)]
        template: PathBuf,
        /// Write the generated code here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replay recorded responses from this JSONL file instead of
        /// calling the endpoint.
        #[arg(long)]
        offline: Option<PathBuf>,
        /// Override the configured sampling temperature.
        #[arg(long)]
        temperature: Option<f64>,
    },
}

/// Writes through a temp file in the destination directory so readers
/// never observe a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path
        .file_name()
        .ok_or_else(|| anyhow!("{} has no file name", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            std::io::stdout().flush()?;
            Ok(())
        }
    }
}

fn cmd_run(
    file: &Path,
    out: Option<&Path>,
    svg: Option<&Path>,
    repair: bool,
    topology: bool,
) -> Result<u8> {
    let source =
        fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let text = if repair {
        match repair_source(&source) {
            Ok(report) => {
                for action in &report.actions {
                    eprintln!("repair: {action}");
                }
                if report.actions.is_empty() {
                    eprintln!("repair: nothing to fix");
                }
                report.text
            }
            Err(e) => {
                eprintln!("error: {e}");
                return Ok(1);
            }
        }
    } else {
        source
    };
    let cfg = KernelConfig::default();
    let layout = match run_source(&text, &cfg) {
        Ok(layout) => layout,
        Err(err) => {
            let code = match &err {
                RunError::Syntax(_) | RunError::Check(_) => 1,
                RunError::Exec(_) => 2,
            };
            match &err {
                RunError::Syntax(diags) | RunError::Check(diags) => {
                    for d in diags {
                        eprintln!("error: {d}");
                    }
                }
                RunError::Exec(e) => eprintln!("error: {e}"),
            }
            return Ok(code);
        }
    };
    let doc = export_layout(&layout, &cfg, topology);
    emit(out, &to_json(&doc))?;
    if let Some(svg_path) = svg {
        write_atomic(svg_path, render_svg(&doc).as_bytes())?;
    }
    Ok(0)
}

/// How corpus entries are pulled out of JSONL rows.
const GOLD_FIELDS: [&str; 3] = ["code_named", "code", "code_positional"];
const PRED_FIELDS: [&str; 4] = ["code", "prediction", "code_named", "code_positional"];
const COORD_FIELDS: [&str; 3] = ["coordinate_seq", "code", "prediction"];

fn load_corpus(path: &Path, fields: &[&str]) -> Result<Vec<(String, String)>> {
    if path.is_dir() {
        let mut names: Vec<PathBuf> = fs::read_dir(path)
            .with_context(|| format!("reading {}", path.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                matches!(
                    p.extension().and_then(|e| e.to_str()),
                    Some("mbl") | Some("txt")
                )
            })
            .collect();
        names.sort();
        return names
            .into_iter()
            .map(|p| {
                let id = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let text =
                    fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
                Ok((id, text))
            })
            .collect();
    }
    let content =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().and_then(|e| e.to_str()) == Some("jsonl") {
        let mut out = Vec::new();
        for (i, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: serde_json::Value = serde_json::from_str(line)
                .with_context(|| format!("{}:{}", path.display(), i + 1))?;
            let id = row
                .get("id")
                .and_then(|v| v.as_str())
                .ok_or_else(|| anyhow!("{}:{}: record has no id", path.display(), i + 1))?
                .to_string();
            let text = fields
                .iter()
                .find_map(|f| row.get(*f).and_then(|v| v.as_str()))
                .ok_or_else(|| {
                    anyhow!(
                        "{}:{}: record has none of the fields {:?}",
                        path.display(),
                        i + 1,
                        fields
                    )
                })?
                .to_string();
            out.push((id, text));
        }
        return Ok(out);
    }
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(vec![(id, content)])
}

fn cmd_eval(
    pred: &Path,
    gold: &Path,
    out: &Path,
    coordinate: bool,
    group_by: Option<&str>,
) -> Result<u8> {
    let group_by = match group_by {
        Some(s) => Some(
            CohortDim::from_str(s)
                .ok_or_else(|| anyhow!("--group-by must be modules, units, or rooms"))?,
        ),
        None => None,
    };
    let golds = load_corpus(gold, &GOLD_FIELDS)?;
    if golds.is_empty() {
        bail!("no gold records found in {}", gold.display());
    }
    let pred_fields: &[&str] = if coordinate { &COORD_FIELDS } else { &PRED_FIELDS };
    let preds: std::collections::HashMap<String, String> =
        load_corpus(pred, pred_fields)?.into_iter().collect();

    let items: Vec<BatchItem> = golds
        .into_iter()
        .map(|(id, gold)| BatchItem {
            pred: preds.get(&id).cloned(),
            id,
            gold,
        })
        .collect();
    for item in &items {
        if item.pred.is_none() {
            eprintln!("warning: no prediction for id {}", item.id);
        }
    }

    let bcfg = BatchConfig {
        coordinate,
        group_by,
        ..BatchConfig::default()
    };
    let outcome = batch_evaluate(&items, &KernelConfig::default(), &bcfg);
    write_atomic(&out.join("records.jsonl"), records_jsonl(&outcome).as_bytes())?;
    write_atomic(&out.join("aggregate.csv"), aggregate_csv(&outcome).as_bytes())?;
    let table = aggregate_markdown(&outcome);
    write_atomic(&out.join("aggregate.md"), table.as_bytes())?;
    print!("{table}");
    Ok(0)
}

fn cmd_synth(
    config: Option<&Path>,
    seed: u64,
    count: usize,
    out: &Path,
    skeleton: bool,
) -> Result<u8> {
    let scfg: SynthConfig = match config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => SynthConfig::default(),
    };
    let records = build_full_dataset(&scfg, &KernelConfig::default(), seed, count, skeleton)
        .map_err(|e| anyhow!("{e}"))?;
    write_atomic(out, dataset_jsonl(&records).as_bytes())?;
    eprintln!("wrote {} records to {}", records.len(), out.display());
    Ok(0)
}

fn cmd_render(file: &Path, out: Option<&Path>) -> Result<u8> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let doc = from_json(&text).with_context(|| format!("parsing {}", file.display()))?;
    let target = match out {
        Some(p) => p.to_path_buf(),
        None => file.with_extension("svg"),
    };
    write_atomic(&target, render_svg(&doc).as_bytes())?;
    Ok(0)
}

fn cmd_gen(
    description: &Path,
    endpoint: &Path,
    template: &Path,
    out: Option<&Path>,
    offline: Option<&Path>,
    temperature: Option<f64>,
) -> Result<u8> {
    let description = fs::read_to_string(description)
        .with_context(|| format!("reading {}", description.display()))?;
    let description = description.trim_end().to_string();
    let endpoint_cfg: client::ModelEndpointConfig = serde_json::from_str(
        &fs::read_to_string(endpoint)
            .with_context(|| format!("reading {}", endpoint.display()))?,
    )
    .with_context(|| format!("parsing {}", endpoint.display()))?;
    endpoint_cfg.validate().map_err(|e| anyhow!("{e}"))?;
    let template_text =
        fs::read_to_string(template).with_context(|| format!("reading {}", template.display()))?;
    let prompt = client::build_prompt(&template_text, &description).map_err(|e| anyhow!("{e}"))?;

    let code = match offline {
        Some(fixtures_path) => {
            let fixtures = client::Fixtures::parse(
                &fs::read_to_string(fixtures_path)
                    .with_context(|| format!("reading {}", fixtures_path.display()))?,
            )
            .map_err(|e| anyhow!("{e}"))?;
            fixtures.lookup(&description).map_err(|e| anyhow!("{e}"))?
        }
        None => client::generate_live(
            &endpoint_cfg,
            &prompt,
            temperature,
            Duration::from_secs(120),
        )
        .map_err(|e| anyhow!("{e}"))?,
    };
    emit(out, &code)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Run {
            file,
            out,
            svg,
            repair,
            topology,
        } => cmd_run(file, out.as_deref(), svg.as_deref(), *repair, *topology),
        Cmd::Eval {
            pred,
            gold,
            out,
            coordinate,
            group_by,
        } => cmd_eval(pred, gold, out, *coordinate, group_by.as_deref()),
        Cmd::Synth {
            config,
            seed,
            count,
            out,
            skeleton,
        } => cmd_synth(config.as_deref(), *seed, *count, out, *skeleton),
        Cmd::Render { file, out } => cmd_render(file, out.as_deref()),
        Cmd::Gen {
            description,
            endpoint,
            template,
            out,
            offline,
            temperature,
        } => cmd_gen(
            description,
            endpoint,
            template,
            out.as_deref(),
            offline.as_deref(),
            *temperature,
        ),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
