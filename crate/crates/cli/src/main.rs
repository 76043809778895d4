//! Command-line front end for the refchoice library.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use refchoice::dataset::{menus_from_raw, PayloadKind, RawDataset};
use refchoice::engine::{check_reference_dependence, IdentityPsi};
use refchoice::ordu::{build_ordu, fit_ordu_partial, simulate_ordu, verify_ordu, OrduError, OrduParams};
use refchoice::property::ViolationWitness;
use refchoice::risk::{self, AreuParams, RiskError};
use refchoice::social::{self, FspuParams, SocialError};
use refchoice::time::{self, PbduParams, TimeError};
use refchoice::{domain_fixtures, rivals, validate_dataset, ChoiceDataset, Warp};

#[derive(Parser, Debug)]
#[command(
    name = "refchoice",
    version,
    about = "Test choice data for reference dependence and fit ordered-reference models"
)]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed recorded in the output; the commands here are deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a dataset and report its shape.
    Validate { dataset: String },
    /// Run a model's axiom battery.
    Check {
        #[arg(long)]
        model: Model,
        dataset: String,
    },
    /// Fit a model and emit its parameters.
    Fit {
        #[arg(long)]
        model: Model,
        dataset: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand a menus file through model parameters.
    Simulate {
        #[arg(long)]
        model: Model,
        params: String,
        menus: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare parameters' predictions with a dataset.
    Verify {
        #[arg(long)]
        model: Model,
        params: String,
        dataset: String,
    },
    /// Embedded fixtures.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
    /// Write the probability-triangle CSV for three-prize AREU parameters.
    ExportTriangle {
        params: String,
        #[arg(long, default_value_t = 20)]
        resolution: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// WARP versus structural-axiom linkage for a domain dataset.
    Report {
        #[arg(long)]
        model: Model,
        dataset: String,
    },
}

#[derive(Subcommand, Debug)]
enum FixturesCommand {
    /// Names usable as `fixtures://<name>`.
    List,
    /// Print a fixture's JSON.
    Show { name: String },
    /// Classify a comparison table, or run the matching battery on a domain dataset.
    Run { name: String },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Model {
    Ordu,
    Areu,
    Pbdu,
    Fspu,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Ordu => "ordu",
            Model::Areu => "areu",
            Model::Pbdu => "pbdu",
            Model::Fspu => "fspu",
        }
    }
}

/// What a command produced: exit code, JSON body, and a text rendering.
struct Output {
    code: u8,
    body: Value,
    text: String,
}

impl Output {
    fn ok(body: Value, text: String) -> Self {
        Output { code: 0, body, text }
    }
}

const SCHEME: &str = "fixtures://";

/// File contents, or the JSON of an embedded fixture.
fn read_source(path: &str) -> Result<String> {
    if let Some(name) = path.strip_prefix(SCHEME) {
        if let Some(text) = domain_fixtures::json(name) {
            return Ok(text.to_string());
        }
        return match rivals::load_fixture(name) {
            Ok(ds) => Ok(ds.to_json()),
            Err(e) => Err(anyhow!(e)),
        };
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn read_raw(path: &str) -> Result<RawDataset> {
    serde_json::from_str(&read_source(path)?).with_context(|| format!("parsing {path}"))
}

fn load_dataset(path: &str) -> Result<ChoiceDataset> {
    Ok(validate_dataset(&read_raw(path)?)?)
}

fn load_params<T: serde::de::DeserializeOwned>(path: &str) -> Result<T> {
    serde_json::from_str(&read_source(path)?).with_context(|| format!("parsing parameters in {path}"))
}

/// Witness with the observations it cites, as a dataset `validate` accepts.
fn witness_json(ds: &ChoiceDataset, w: &ViolationWitness) -> Value {
    let view = w.render(ds);
    let mut v = serde_json::to_value(&view).unwrap();
    let mut menus = w.menus.clone();
    menus.sort();
    menus.dedup();
    if let Ok(sub) = ds.restrict(&menus) {
        v["data"] = serde_json::to_value(sub.to_raw()).unwrap();
    }
    v
}

fn witnesses_text(ds: &ChoiceDataset, ws: &[ViolationWitness]) -> String {
    ws.iter()
        .map(|w| {
            let v = w.render(ds);
            format!("  [{}] {}", v.kind, v.narrative)
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn verdict(model: Model, ds: &ChoiceDataset, ws: Vec<ViolationWitness>) -> Output {
    let pass = ws.is_empty();
    let body = json!({
        "model": model.name(),
        "status": if pass { "pass" } else { "fail" },
        "witnesses": ws.iter().map(|w| witness_json(ds, w)).collect::<Vec<_>>(),
    });
    let text = if pass {
        format!("{}: all axioms pass", model.name())
    } else {
        format!(
            "{}: {} violation(s)\n{}",
            model.name(),
            ws.len(),
            witnesses_text(ds, &ws)
        )
    };
    Output {
        code: if pass { 0 } else { 1 },
        body,
        text,
    }
}

fn ordu_battery(ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>> {
    Ok(check_reference_dependence(ds, &Warp, &IdentityPsi)?.witnesses(ds))
}

fn battery(model: Model, ds: &ChoiceDataset) -> Result<Vec<ViolationWitness>> {
    Ok(match model {
        Model::Ordu => ordu_battery(ds)?,
        Model::Areu => risk::areu_axiom_battery(ds)?,
        Model::Pbdu => time::pbdu_axiom_battery(ds)?,
        Model::Fspu => social::fspu_axiom_battery(ds)?,
    })
}

/// Fit failures that are findings about the data rather than usage errors.
enum FitFailure {
    Axioms(Vec<ViolationWitness>),
    Infeasible(String),
}

fn fit_value(model: Model, ds: &ChoiceDataset) -> Result<std::result::Result<Value, FitFailure>> {
    macro_rules! done {
        ($p:expr) => {
            Ok(Ok(serde_json::to_value($p)?))
        };
    }
    match model {
        Model::Ordu => {
            let r = if ds.is_subset_closed() {
                build_ordu(ds)
            } else {
                fit_ordu_partial(ds)
            };
            match r {
                Ok(p) => done!(&p),
                Err(OrduError::AxiomFails(f)) => {
                    Ok(Err(FitFailure::Axioms(f.iter().map(|x| x.to_witness(ds)).collect())))
                }
                Err(OrduError::Engine(e)) => Ok(Err(FitFailure::Infeasible(e.to_string()))),
                Err(e) => Err(e.into()),
            }
        }
        Model::Areu => match risk::fit_areu(ds) {
            Ok(p) => done!(&p),
            Err(RiskError::AxiomFails(f)) => Ok(Err(FitFailure::Axioms(f.iter().map(|x| x.to_witness(ds)).collect()))),
            Err(RiskError::Infeasible(m)) => Ok(Err(FitFailure::Infeasible(m))),
            Err(e) => Err(e.into()),
        },
        Model::Pbdu => match time::fit_pbdu(ds) {
            Ok(p) => done!(&p),
            Err(TimeError::AxiomFails(w)) => Ok(Err(FitFailure::Axioms(w))),
            Err(TimeError::Infeasible(m)) => Ok(Err(FitFailure::Infeasible(m))),
            Err(e) => Err(e.into()),
        },
        Model::Fspu => match social::fit_fspu(ds) {
            Ok(p) => done!(&p),
            Err(SocialError::AxiomFails(w)) => Ok(Err(FitFailure::Axioms(w))),
            Err(SocialError::Infeasible(m)) => Ok(Err(FitFailure::Infeasible(m))),
            Err(e) => Err(e.into()),
        },
    }
}

fn write_out(out: &Option<PathBuf>, contents: &str) -> Result<()> {
    if let Some(path) = out {
        std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap()
}

fn cmd_validate(path: &str) -> Result<Output> {
    let ds = load_dataset(path)?;
    let kind = serde_json::to_value(ds.kind())?;
    let body = json!({
        "status": "ok",
        "kind": kind,
        "alternatives": ds.len_universe(),
        "observations": ds.num_observations(),
        "subset_closed": ds.is_subset_closed(),
    });
    let text = format!(
        "valid {} dataset: {} alternatives, {} observations",
        kind.as_str().unwrap_or("?"),
        ds.len_universe(),
        ds.num_observations()
    );
    Ok(Output::ok(body, text))
}

fn cmd_check(model: Model, path: &str) -> Result<Output> {
    let ds = load_dataset(path)?;
    let ws = battery(model, &ds)?;
    Ok(verdict(model, &ds, ws))
}

fn cmd_fit(model: Model, path: &str, out: &Option<PathBuf>) -> Result<Output> {
    let ds = load_dataset(path)?;
    Ok(match fit_value(model, &ds)? {
        Ok(params) => {
            write_out(out, &format!("{}\n", pretty(&params)))?;
            let text = match out {
                Some(p) => format!("{}: fitted, parameters written to {}", model.name(), p.display()),
                None => pretty(&params),
            };
            Output::ok(json!({"model": model.name(), "status": "ok", "params": params}), text)
        }
        Err(FitFailure::Axioms(ws)) => verdict(model, &ds, ws),
        Err(FitFailure::Infeasible(m)) => Output {
            code: 1,
            body: json!({"model": model.name(), "status": "infeasible", "message": m}),
            text: format!("{}: infeasible: {m}", model.name()),
        },
    })
}

/// Menus as id lists, from `menus` or else from the observations.
fn menu_ids(raw: &RawDataset) -> Vec<Vec<String>> {
    let mut ms = match &raw.menus {
        Some(ms) => ms.clone(),
        None => raw.observations.iter().map(|o| o.menu.clone()).collect(),
    };
    for m in &mut ms {
        m.sort();
    }
    ms.sort();
    ms.dedup();
    ms
}

fn cmd_simulate(model: Model, params: &str, menus: &str, out: &Option<PathBuf>) -> Result<Output> {
    let raw = read_raw(menus)?;
    let ds = match model {
        Model::Ordu => simulate_ordu(&load_params::<OrduParams>(params)?, &menu_ids(&raw))?,
        Model::Areu => risk::simulate_areu(&load_params::<AreuParams>(params)?, &menu_ids(&raw))?,
        Model::Pbdu => {
            let (universe, ms) = menus_from_raw(&raw)?;
            time::simulate_pbdu(&load_params::<PbduParams>(params)?, &universe, &ms)?
        }
        Model::Fspu => {
            let (universe, ms) = menus_from_raw(&raw)?;
            social::simulate_fspu(&load_params::<FspuParams>(params)?, &universe, &ms)?
        }
    };
    let data = serde_json::to_value(ds.to_raw())?;
    write_out(out, &format!("{}\n", pretty(&data)))?;
    let text = match out {
        Some(p) => format!(
            "{}: {} menus simulated, written to {}",
            model.name(),
            ds.num_observations(),
            p.display()
        ),
        None => pretty(&data),
    };
    Ok(Output::ok(
        json!({"model": model.name(), "status": "ok", "dataset": data}),
        text,
    ))
}

fn cmd_verify(model: Model, params: &str, path: &str) -> Result<Output> {
    let ds = load_dataset(path)?;
    let mismatches: Vec<Value> = match model {
        Model::Ordu => verify_ordu(&load_params::<OrduParams>(params)?, &ds)?
            .into_iter()
            .map(|(menu, observed, predicted)| json!({"menu": menu, "observed": observed, "predicted": predicted}))
            .collect(),
        Model::Areu => risk::verify_areu(&load_params::<AreuParams>(params)?, &ds)?
            .iter()
            .map(serde_json::to_value)
            .collect::<serde_json::Result<_>>()?,
        Model::Pbdu => time::verify_pbdu(&load_params::<PbduParams>(params)?, &ds)?
            .iter()
            .map(serde_json::to_value)
            .collect::<serde_json::Result<_>>()?,
        Model::Fspu => social::verify_fspu(&load_params::<FspuParams>(params)?, &ds)?
            .iter()
            .map(serde_json::to_value)
            .collect::<serde_json::Result<_>>()?,
    };
    let pass = mismatches.is_empty();
    let text = if pass {
        format!(
            "{}: parameters reproduce all {} observations",
            model.name(),
            ds.num_observations()
        )
    } else {
        let lines: Vec<String> = mismatches
            .iter()
            .map(|m| {
                format!(
                    "  menu {} observed {} predicted {}",
                    m["menu"], m["observed"], m["predicted"]
                )
            })
            .collect();
        format!(
            "{}: {} mismatch(es)\n{}",
            model.name(),
            mismatches.len(),
            lines.join("\n")
        )
    };
    Ok(Output {
        code: if pass { 0 } else { 1 },
        body: json!({"model": model.name(), "status": if pass { "pass" } else { "fail" }, "mismatches": mismatches}),
        text,
    })
}

fn cmd_fixtures(cmd: &FixturesCommand) -> Result<Output> {
    match cmd {
        FixturesCommand::List => {
            let mut names: Vec<&str> = rivals::FIXTURE_NAMES
                .iter()
                .chain(domain_fixtures::NAMES.iter())
                .copied()
                .collect();
            names.sort();
            let text = names
                .iter()
                .map(|n| format!("{SCHEME}{n}"))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output::ok(json!({"status": "ok", "fixtures": names}), text))
        }
        FixturesCommand::Show { name } => {
            let n = name.strip_prefix(SCHEME).unwrap_or(name);
            let v: Value = serde_json::from_str(&read_source(&format!("{SCHEME}{n}"))?)?;
            let text = pretty(&v);
            Ok(Output::ok(json!({"status": "ok", "name": n, "content": v}), text))
        }
        FixturesCommand::Run { name } => {
            let n = name.strip_prefix(SCHEME).unwrap_or(name);
            if rivals::FIXTURE_NAMES.contains(&n) {
                let row = rivals::classify_fixture(n)?;
                let code = if row.mismatches.is_empty() { 0 } else { 1 };
                let text = format!(
                    "{n}: reference dependence {}, ORDU {}, union condition {}, RSM {}, PE {}{}",
                    yes_no(row.reference_dependence),
                    yes_no(row.ordu),
                    opt_yes_no(row.remark1),
                    opt_yes_no(row.rsm),
                    opt_yes_no(row.pe),
                    if code == 0 {
                        String::new()
                    } else {
                        format!("; mismatches: {}", row.mismatches.join("; "))
                    }
                );
                let status = if code == 0 { "pass" } else { "fail" };
                return Ok(Output {
                    code,
                    body: json!({"status": status, "row": row}),
                    text,
                });
            }
            let ds = load_dataset(&format!("{SCHEME}{n}"))?;
            let model = match ds.kind() {
                PayloadKind::Lottery => Model::Areu,
                PayloadKind::DatedPayment => Model::Pbdu,
                PayloadKind::IncomeSplit => Model::Fspu,
                PayloadKind::Generic => Model::Ordu,
            };
            let ws = battery(model, &ds)?;
            Ok(verdict(model, &ds, ws))
        }
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn opt_yes_no(b: Option<bool>) -> &'static str {
    b.map_or("n/a", yes_no)
}

fn cmd_export_triangle(params: &str, resolution: u32, out: &Option<PathBuf>) -> Result<Output> {
    if resolution == 0 {
        bail!("resolution must be positive");
    }
    let p: AreuParams = load_params(params)?;
    let csv = risk::triangle_csv(&p, resolution)?;
    let report = risk::fanning_classify(&p, resolution)?;
    write_out(out, &csv)?;
    let text = match out {
        Some(path) => format!("{:?}; CSV written to {}", report.class, path.display()),
        None => csv.trim_end().to_string(),
    };
    Ok(Output::ok(
        json!({"status": "ok", "fanning": report, "csv": if out.is_some() { Value::Null } else { Value::String(csv) }}),
        text,
    ))
}

fn cmd_report(model: Model, path: &str) -> Result<Output> {
    let ds = load_dataset(path)?;
    let (warp, other, name, extra) = match model {
        Model::Ordu => bail!("linkage reports exist for areu, pbdu, and fspu"),
        Model::Areu => {
            let r = risk::linkage_report_risk(&ds)?;
            (r.warp, r.independence, "independence", Value::Null)
        }
        Model::Pbdu => {
            let r = time::linkage_report_time(&ds)?;
            (
                r.warp,
                r.stationarity,
                "stationarity",
                serde_json::to_value(time::lemma2_equivalence(&ds)?)?,
            )
        }
        Model::Fspu => {
            let r = social::linkage_report_social(&ds)?;
            (r.warp, r.quasilinearity, "quasilinearity", Value::Null)
        }
    };
    let mut body = json!({"model": model.name(), "status": "ok", "warp": warp, name: other, "agree": warp == other});
    let mut text = format!(
        "{}: WARP {}, {} {}",
        model.name(),
        if warp { "pass" } else { "fail" },
        name,
        if other { "pass" } else { "fail" }
    );
    if !extra.is_null() {
        text.push_str(&format!(
            "; pairwise/existential time check: {}",
            extra["verdict"].as_str().unwrap_or("?")
        ));
        body["lemma2"] = extra;
    }
    Ok(Output::ok(body, text))
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Validate { dataset } => cmd_validate(dataset),
        Command::Check { model, dataset } => cmd_check(*model, dataset),
        Command::Fit { model, dataset, out } => cmd_fit(*model, dataset, out),
        Command::Simulate {
            model,
            params,
            menus,
            out,
        } => cmd_simulate(*model, params, menus, out),
        Command::Verify { model, params, dataset } => cmd_verify(*model, params, dataset),
        Command::Fixtures(cmd) => cmd_fixtures(cmd),
        Command::ExportTriangle {
            params,
            resolution,
            out,
        } => cmd_export_triangle(params, *resolution, out),
        Command::Report { model, dataset } => cmd_report(*model, dataset),
    }
}

fn main() -> ExitCode {
    let json_mode = std::env::args().any(|a| a == "--json");
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if json_mode && code == 2 {
                println!("{}", json!({"status": "error", "error": e.to_string().trim_end()}));
            } else {
                let _ = e.print();
            }
            return ExitCode::from(code);
        }
    };
    let out = run(&cli).unwrap_or_else(|e| Output {
        code: 2,
        body: json!({"status": "error", "error": format!("{e:#}")}),
        text: format!("error: {e:#}"),
    });
    // a closed pipe on stdout is not worth a panic
    if cli.json {
        let mut body = out.body;
        body["seed"] = json!(cli.seed);
        let _ = writeln!(std::io::stdout(), "{}", pretty(&body));
    } else if out.code == 2 {
        let _ = writeln!(std::io::stderr(), "{}", out.text);
    } else {
        let _ = writeln!(std::io::stdout(), "{}", out.text);
    }
    ExitCode::from(out.code)
}
