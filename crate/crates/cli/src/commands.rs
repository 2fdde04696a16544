use std::f64::consts::PI;
use std::fs;

use bellmean::chsh::{LhvScan, MonteCarloChsh};
use bellmean::composite::model_transition_table;
use bellmean::dichotomic::{chi_square, measurement_counts, BinaryDistribution};
use bellmean::oracle::amplitude_table;
use bellmean::verify;
use bellmean::*;
use serde::Serialize;

use crate::{ChshModel, CliError, Command, Format, GlobalArgs, TableModel, TOOL, VERSION};

/// Rendered command output.
pub struct Output {
    pub body: String,
    /// Extra line for stderr.
    pub note: Option<String>,
    pub success: bool,
}

impl Output {
    fn ok(body: String) -> Self {
        Output {
            body,
            note: None,
            success: true,
        }
    }
}

#[derive(Serialize)]
struct Record<'a, S: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    spec: S,
    #[serde(flatten)]
    result: R,
}

fn json<S: Serialize, R: Serialize>(command: &str, spec: S, result: R) -> Result<String, CliError> {
    let record = Record {
        tool: TOOL,
        version: VERSION,
        command,
        spec,
        result,
    };
    let mut body =
        serde_json::to_string_pretty(&record).map_err(|e| CliError::Io(e.to_string()))?;
    body.push('\n');
    Ok(body)
}

fn csv_table(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

/// Plain decimal in the usual range, scientific notation for tiny values.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-6 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn execute(command: &Command, global: &GlobalArgs, seed: u64) -> Result<Output, CliError> {
    if !(global.a.is_finite() && global.a > 0.0) {
        return Err(usage(format!("--a must be positive, got {}", global.a)));
    }
    match command {
        Command::Qubit { theta, trials } => qubit(*theta, *trials, global, seed),
        Command::Chsh {
            canonical,
            config,
            model,
            trials,
        } => {
            let config = match (canonical, config) {
                (true, _) => ChshConfig::canonical(),
                (false, Some(path)) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                    serde_json::from_str(&text)
                        .map_err(|e| usage(format!("malformed config: {e}")))?
                }
                (false, None) => return Err(usage("chsh needs --canonical or --config <file>")),
            };
            chsh(config, *model, *trials, global, seed)
        }
        Command::Composite { model, points } => composite(*model, *points, global, seed),
        Command::Stokes { events, prep, meas } => stokes(*events, prep, meas, global, seed),
        Command::Verify { tolerance } => verify_cmd(*tolerance, global, seed),
        Command::Oracle { points } => oracle_dump(*points, global, seed),
    }
}

#[derive(Serialize)]
struct QubitSpec {
    theta: f64,
    a: f64,
    trials: u64,
    seed: u64,
}

#[derive(Serialize)]
struct Pair<T> {
    plus: T,
    minus: T,
}

#[derive(Serialize)]
struct QubitResult {
    seed: u64,
    analytic: BinaryDistribution,
    counts: Pair<u64>,
    frequencies: Pair<f64>,
    expectation: f64,
    sampled_expectation: f64,
    stderr: f64,
    chi_square: f64,
    chi_square_dof: u32,
}

fn qubit(theta: f64, trials: u64, global: &GlobalArgs, seed: u64) -> Result<Output, CliError> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let state = ElementaryState::new(UnitAxis::Z, Sign::Plus, global.a).map_err(usage)?;
    let axis = make_axis(theta, 0.0).map_err(usage)?;
    let analytic = transition_probability(&state, &axis);
    let counts = measurement_counts(&state, &axis, trials, seed);
    let n = trials as f64;
    let mean_sign = (counts[0] as f64 - counts[1] as f64) / n;
    let result = QubitResult {
        seed,
        analytic,
        counts: Pair {
            plus: counts[0],
            minus: counts[1],
        },
        frequencies: Pair {
            plus: counts[0] as f64 / n,
            minus: counts[1] as f64 / n,
        },
        expectation: expectation(&state, &axis),
        sampled_expectation: global.a * mean_sign,
        stderr: global.a * ((1.0 - mean_sign * mean_sign).max(0.0) / n).sqrt(),
        chi_square: chi_square(counts, &analytic),
        chi_square_dof: 1,
    };
    let body = match global.format {
        Format::Json => json(
            "qubit",
            QubitSpec {
                theta,
                a: global.a,
                trials,
                seed,
            },
            result,
        )?,
        Format::Csv => csv_table(
            &[
                "seed",
                "theta",
                "a",
                "trials",
                "p_plus",
                "p_minus",
                "n_plus",
                "n_minus",
                "f_plus",
                "f_minus",
                "expectation",
                "sampled_expectation",
                "stderr",
                "chi_square",
            ],
            [vec![
                seed.to_string(),
                num(theta),
                num(global.a),
                trials.to_string(),
                num(result.analytic.p_plus),
                num(result.analytic.p_minus),
                result.counts.plus.to_string(),
                result.counts.minus.to_string(),
                num(result.frequencies.plus),
                num(result.frequencies.minus),
                num(result.expectation),
                num(result.sampled_expectation),
                num(result.stderr),
                num(result.chi_square),
            ]],
        )?,
    };
    Ok(Output::ok(body))
}

#[derive(Serialize)]
struct ChshSpec {
    model: &'static str,
    trials: u64,
    seed: u64,
}

#[derive(Serialize)]
struct ChshRecord {
    config: ChshConfig,
    model: &'static str,
    b_value: f64,
    violates: bool,
    correlations: [f64; 4],
    trials: u64,
    estimate: f64,
    stderr: f64,
    sampled_correlations: [f64; 4],
    seed: u64,
}

#[derive(Serialize)]
struct StrategyRow {
    v1n: i8,
    v1np: i8,
    v2m: i8,
    v2mp: i8,
    b: f64,
}

#[derive(Serialize)]
struct ScanRecord {
    model: &'static str,
    max_abs_b: f64,
    argmax_count: usize,
    strategies: Vec<StrategyRow>,
    seed: u64,
}

fn strategy_rows(scan: &LhvScan) -> Vec<StrategyRow> {
    scan.rows
        .iter()
        .map(|(s, b)| {
            let [v1n, v1np, v2m, v2mp] = s.values();
            StrategyRow {
                v1n,
                v1np,
                v2m,
                v2mp,
                b: *b,
            }
        })
        .collect()
}

fn chsh(
    config: ChshConfig,
    model: ChshModel,
    trials: u64,
    global: &GlobalArgs,
    seed: u64,
) -> Result<Output, CliError> {
    let correlator = match model {
        ChshModel::LhvScan => return lhv_scan(trials, global, seed),
        ChshModel::Quantum => CorrelatorModel::QuantumSinglet,
        ChshModel::LhvSign => CorrelatorModel::LhvSign,
    };
    let mc: MonteCarloChsh = monte_carlo_chsh(&config, &correlator, trials, seed).map_err(usage)?;
    let record = ChshRecord {
        config,
        model: correlator.name(),
        b_value: mc.analytic.b_value,
        violates: mc.analytic.violates,
        correlations: mc.analytic.correlations,
        trials,
        estimate: mc.estimate,
        stderr: mc.stderr,
        sampled_correlations: mc.correlations,
        seed,
    };
    let body = match global.format {
        Format::Json => json(
            "chsh",
            ChshSpec {
                model: correlator.name(),
                trials,
                seed,
            },
            record,
        )?,
        Format::Csv => {
            let mut row = vec![
                seed.to_string(),
                record.model.to_string(),
                num(record.b_value),
            ];
            row.push(record.violates.to_string());
            row.extend(record.correlations.iter().map(|&e| num(e)));
            row.extend([trials.to_string(), num(record.estimate), num(record.stderr)]);
            csv_table(
                &[
                    "seed", "model", "b_value", "violates", "e_nm", "e_npm", "e_nmp", "e_npmp",
                    "trials", "estimate", "stderr",
                ],
                [row],
            )?
        }
    };
    Ok(Output::ok(body))
}

fn lhv_scan(trials: u64, global: &GlobalArgs, seed: u64) -> Result<Output, CliError> {
    let scan = lhv_deterministic_scan();
    let body = match global.format {
        Format::Json => json(
            "chsh",
            ChshSpec {
                model: "lhv-scan",
                trials,
                seed,
            },
            ScanRecord {
                model: "lhv-scan",
                max_abs_b: scan.max_abs_b,
                argmax_count: scan.argmax.len(),
                strategies: strategy_rows(&scan),
                seed,
            },
        )?,
        Format::Csv => csv_table(
            &["v1n", "v1np", "v2m", "v2mp", "b"],
            strategy_rows(&scan).iter().map(|r| {
                vec![
                    r.v1n.to_string(),
                    r.v1np.to_string(),
                    r.v2m.to_string(),
                    r.v2mp.to_string(),
                    num(r.b),
                ]
            }),
        )?,
    };
    Ok(Output::ok(body))
}

#[derive(Serialize)]
struct CompositeSpec {
    model: &'static str,
    points: usize,
    a: f64,
    seed: u64,
}

#[derive(Serialize)]
struct TableRow {
    level: Level,
    theta: f64,
    model: &'static str,
    p: TernaryDistribution,
}

#[derive(Serialize)]
struct JSquaredRow {
    level: Level,
    theta: f64,
    value: f64,
}

#[derive(Serialize)]
struct CompositeRecord {
    seed: u64,
    tables: Vec<TableRow>,
    j_squared: Vec<JSquaredRow>,
}

fn composite(
    model: TableModel,
    points: usize,
    global: &GlobalArgs,
    seed: u64,
) -> Result<Output, CliError> {
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let model = match model {
        TableModel::Principled => CompositeModel::Principled,
        TableModel::Mixture => CompositeModel::Mixture,
    };
    let mut tables = Vec::new();
    let mut j_squared = Vec::new();
    let mut csv_rows = Vec::new();
    for i in 0..points {
        let theta = PI * i as f64 / (points - 1) as f64;
        let axis = make_axis(theta, 0.0).map_err(usage)?;
        let frame = complete_frame(&axis);
        let mut row = vec![num(theta)];
        let mut j2_cells = Vec::new();
        for level in Level::ALL {
            let state = CompositeState::new(UnitAxis::Z, level, global.a).map_err(usage)?;
            let p = model_transition_table(&state, &axis, model);
            row.extend(Level::ALL.iter().map(|&j| num(p.get(j))));
            tables.push(TableRow {
                level,
                theta,
                model: model.name(),
                p,
            });
            let j2_model = if level == Level::Zero {
                model
            } else {
                CompositeModel::Principled
            };
            let value = j_squared_composite(&state, &frame, j2_model).map_err(usage)?;
            j2_cells.push(num(value));
            j_squared.push(JSquaredRow {
                level,
                theta,
                value,
            });
        }
        row.extend(j2_cells);
        csv_rows.push(row);
    }
    let body = match global.format {
        Format::Json => json(
            "composite",
            CompositeSpec {
                model: model.name(),
                points,
                a: global.a,
                seed,
            },
            CompositeRecord {
                seed,
                tables,
                j_squared,
            },
        )?,
        Format::Csv => {
            let mut header = vec!["theta".to_string()];
            for k in Level::ALL {
                for j in Level::ALL {
                    header.push(format!("p({}:{})", k.key(), j.key()));
                }
            }
            for k in Level::ALL {
                header.push(format!("j2({})", k.key()));
            }
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            csv_table(&header, csv_rows)?
        }
    };
    Ok(Output::ok(body))
}

#[derive(Serialize)]
struct StokesSpec {
    events: u64,
    prep: UnitAxis,
    meas: UnitAxis,
    seed: u64,
}

fn stokes(
    events: u64,
    prep: &UnitAxis,
    meas: &UnitAxis,
    global: &GlobalArgs,
    seed: u64,
) -> Result<Output, CliError> {
    if events == 0 {
        return Err(usage("--events must be at least 1"));
    }
    let record = stokes_experiment(prep, meas, events, seed).map_err(usage)?;
    let body = match global.format {
        Format::Json => json(
            "stokes",
            StokesSpec {
                events,
                prep: *prep,
                meas: *meas,
                seed,
            },
            record,
        )?,
        Format::Csv => csv_table(
            &["seed", "n_events", "plus", "minus", "estimate", "stderr"],
            [vec![
                record.seed.to_string(),
                record.n_events().to_string(),
                record.n_plus.to_string(),
                record.n_minus.to_string(),
                num(record.estimate),
                num(record.stderr),
            ]],
        )?,
    };
    Ok(Output::ok(body))
}

#[derive(Serialize)]
struct VerifySpec {
    tolerance: f64,
    seed: u64,
}

fn verify_cmd(tolerance: f64, global: &GlobalArgs, seed: u64) -> Result<Output, CliError> {
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(usage("--tolerance must be a non-negative number"));
    }
    let report = verify::run(tolerance);
    let body = match global.format {
        Format::Json => json("verify", VerifySpec { tolerance, seed }, &report)?,
        Format::Csv => csv_table(
            &["check", "max_deviation", "passed"],
            report.checks.iter().map(|c| {
                vec![
                    c.name.to_string(),
                    num(c.max_deviation),
                    c.passed.to_string(),
                ]
            }),
        )?,
    };
    let note =
        (!report.passed).then(|| format!("verification failed: {}", report.failures.join(", ")));
    Ok(Output {
        body,
        note,
        success: report.passed,
    })
}

#[derive(Serialize)]
struct OracleSpec {
    points: usize,
    seed: u64,
}

#[derive(Serialize)]
struct OracleRecord {
    seed: u64,
    amplitudes: Vec<bellmean::oracle::AmplitudeRow>,
}

fn oracle_dump(points: usize, global: &GlobalArgs, seed: u64) -> Result<Output, CliError> {
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let axes = (0..points)
        .map(|i| make_axis(PI * i as f64 / (points - 1) as f64, 0.0))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let rows = amplitude_table(&axes);
    let body = match global.format {
        Format::Json => json(
            "oracle",
            OracleSpec { points, seed },
            OracleRecord {
                seed,
                amplitudes: rows,
            },
        )?,
        Format::Csv => csv_table(
            &["x", "y", "z", "plus_0", "plus_1", "minus_0", "minus_1"],
            rows.iter().map(|r| {
                let mut row: Vec<String> = r.axis.to_array().iter().map(|&c| num(c)).collect();
                row.extend(
                    r.plus
                        .components()
                        .iter()
                        .chain(r.minus.components().iter())
                        .map(|c| c.to_string()),
                );
                row
            }),
        )?,
    };
    Ok(Output::ok(body))
}
