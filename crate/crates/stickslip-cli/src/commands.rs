//! Subcommand implementations.
//!
//! Each command resolves its full configuration (defaults included), runs
//! the library call, and hands the resulting table to a common delivery
//! path: stdout when no output directory is given, otherwise
//! `<subcommand>.<ext>` plus a manifest (and optionally an SVG plot) in the
//! directory.

use crate::manifest::RunManifest;
use crate::output::Table;
use crate::plot::{self, Series};
use crate::{
    Cli, Command, FitArgs, FitMode, Format, PhaseArgs, SimulateArgs, StribeckArgs, SweepArgs,
};
use anyhow::{bail, Context, Result};
use serde_json::json;
use std::path::{Path, PathBuf};
use stickslip::{
    breakaway_force, default_k_grid, fit_breakaway_curve, fit_stribeck, phase_diagram, run,
    stribeck, FitOptions, FrictionParams, SimulationConfig, SteadyStateChoice,
};

/// Writes to stdout, treating a closed pipe (e.g. `stickslip … | head`)
/// as a normal early exit rather than an error.
fn emit(text: &str) -> Result<()> {
    use std::io::Write;
    match std::io::stdout().write_all(text.as_bytes()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(e).context("writing to stdout"),
    }
}

pub fn dispatch(cli: &Cli) -> Result<()> {
    let (params, params_input) = load_params(cli.params.as_deref())?;
    match &cli.command {
        Command::StribeckCurve(args) => stribeck_curve(cli, &params, params_input, args),
        Command::PhaseDiagram(args) => phase_cmd(cli, &params, params_input, args),
        Command::BreakawaySweep(args) => sweep_cmd(cli, &params, params_input, args),
        Command::Simulate(args) => simulate_cmd(cli, &params, params_input, args),
        Command::Fit(args) => fit_cmd(cli, &params, params_input, args),
    }
}

fn load_params(path: Option<&Path>) -> Result<(FrictionParams, Option<PathBuf>)> {
    match path {
        None => Ok((FrictionParams::default(), None)),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading params file {}", p.display()))?;
            let params = FrictionParams::from_key_value_str(&text)
                .with_context(|| format!("in params file {}", p.display()))?;
            Ok((params, Some(p.to_path_buf())))
        }
    }
}

/// Evaluates independent work items, optionally on a thread pool; results
/// come back in input order either way.
fn map_items<T: Send, R: Send>(
    parallel: Option<usize>,
    items: Vec<T>,
    f: impl Fn(T) -> Result<R> + Sync + Send,
) -> Result<Vec<R>> {
    match parallel {
        Some(n) if n > 1 => {
            use rayon::prelude::*;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("building thread pool")?;
            pool.install(|| items.into_par_iter().map(&f).collect())
        }
        _ => items.into_iter().map(f).collect(),
    }
}

struct Delivery {
    table: Table,
    /// Extra text document (filename, contents), e.g. the break-away
    /// summary or the fit result.
    extra: Option<(String, String)>,
    plot: Option<(String, String, String, Vec<Series>)>,
}

fn deliver(
    cli: &Cli,
    name: &'static str,
    params: &FrictionParams,
    mut settings: serde_json::Value,
    inputs: Vec<PathBuf>,
    delivery: &Delivery,
) -> Result<()> {
    if let Some(map) = settings.as_object_mut() {
        map.insert("format".into(), json!(format_name(cli.format)));
        map.insert("plot".into(), json!(cli.plot));
        map.insert("parallel".into(), json!(cli.parallel));
    }
    // Commands whose primary artifact is a text document (fit) pass an
    // empty table; the table file is skipped for them.
    let has_table = !delivery.table.columns.is_empty();
    let rendered = delivery.table.render(cli.format);
    let Some(dir) = &cli.out else {
        if cli.plot {
            bail!("--plot requires --out <DIR> to receive the SVG file");
        }
        if has_table {
            emit(&rendered)?;
        }
        if let Some((_, text)) = &delivery.extra {
            emit(text)?;
        }
        return Ok(());
    };
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let mut manifest = RunManifest::new(name, params, settings);
    manifest.inputs = inputs;

    if has_table {
        let table_path = dir.join(format!("{name}.{}", Table::extension(cli.format)));
        std::fs::write(&table_path, &rendered)
            .with_context(|| format!("writing {}", table_path.display()))?;
        manifest.outputs.push(table_path);
    }

    if let Some((file_name, text)) = &delivery.extra {
        let path = dir.join(file_name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        manifest.outputs.push(path);
    }
    if cli.plot {
        if let Some((title, xl, yl, series)) = &delivery.plot {
            let path = dir.join(format!("{name}.svg"));
            std::fs::write(&path, plot::line_plot(title, xl, yl, series))
                .with_context(|| format!("writing {}", path.display()))?;
            manifest.outputs.push(path);
        }
    }
    let manifest_path = manifest.write(dir)?;
    for produced in manifest.outputs.iter().chain([&manifest_path]) {
        emit(&format!("wrote {}\n", produced.display()))?;
    }
    Ok(())
}

fn format_name(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn choice_name(c: SteadyStateChoice) -> String {
    c.to_string()
}

fn resolve_k_grid(flag: &Option<Vec<f64>>) -> Vec<f64> {
    flag.clone().unwrap_or_else(default_k_grid)
}

/// Validates and ascending-sorts a rate grid for per-point evaluation.
fn sorted_rates(mut ks: Vec<f64>) -> Result<Vec<f64>> {
    if ks.is_empty() {
        bail!("the k grid must not be empty");
    }
    for &k in &ks {
        if !k.is_finite() || k <= 0.0 {
            bail!("k values must be positive and finite, got {k}");
        }
    }
    ks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    if ks.windows(2).any(|w| w[0] == w[1]) {
        bail!("k values must be distinct");
    }
    Ok(ks)
}

fn stribeck_curve(
    cli: &Cli,
    params: &FrictionParams,
    params_input: Option<PathBuf>,
    args: &StribeckArgs,
) -> Result<()> {
    if args.points < 2 {
        bail!("--points must be at least 2 to span a velocity range");
    }
    if !(args.v_min.is_finite() && args.v_max.is_finite()) || args.v_min >= args.v_max {
        bail!(
            "empty v-range: --v-min {} must lie below --v-max {}",
            args.v_min,
            args.v_max
        );
    }
    let grid: Vec<f64> = (0..args.points)
        .map(|i| args.v_min + (args.v_max - args.v_min) * i as f64 / (args.points - 1) as f64)
        .collect();
    let forces = map_items(cli.parallel, grid.clone(), |v| {
        stribeck(params, v).map_err(Into::into)
    })?;
    let mut table = Table::new(&["v", "F"]);
    let mut curve = Vec::with_capacity(grid.len());
    for (v, f) in grid.iter().zip(&forces) {
        table.push(vec![(*v).into(), (*f).into()]);
        curve.push((*v, *f));
    }
    let settings = json!({
        "v_min": args.v_min,
        "v_max": args.v_max,
        "points": args.points,
    });
    deliver(
        cli,
        "stribeck-curve",
        params,
        settings,
        params_input.into_iter().collect(),
        &Delivery {
            table,
            extra: None,
            plot: Some((
                "Steady-state friction curve".into(),
                "velocity".into(),
                "friction force".into(),
                vec![Series {
                    label: "F_ss(v)".into(),
                    points: curve,
                }],
            )),
        },
    )
}

fn phase_cmd(
    cli: &Cli,
    params: &FrictionParams,
    params_input: Option<PathBuf>,
    args: &PhaseArgs,
) -> Result<()> {
    if args.z_points == 0 {
        bail!("--z-points must be at least 1");
    }
    if args.z_points > 1 && args.z_min >= args.z_max {
        bail!(
            "empty z-range: --z-min {} must lie below --z-max {}",
            args.z_min,
            args.z_max
        );
    }
    let zs: Vec<f64> = if args.z_points == 1 {
        vec![args.z_min]
    } else {
        (0..args.z_points)
            .map(|i| {
                args.z_min + (args.z_max - args.z_min) * i as f64 / (args.z_points - 1) as f64
            })
            .collect()
    };
    let ks = sorted_rates(resolve_k_grid(&args.k_grid))?;
    let choice: SteadyStateChoice = args.choice.into();
    // One task per rate: each computes its full z-profile, merged k-ascending.
    let profiles = map_items(cli.parallel, ks.clone(), |k| {
        phase_diagram(params, choice, &[k], &zs).map_err(Into::into)
    })?;
    let mut table = Table::new(&["k", "z", "v"]);
    let mut series = Vec::with_capacity(ks.len());
    for profile in &profiles {
        let mut pts = Vec::with_capacity(profile.len());
        for row in profile {
            table.push(vec![row.k.into(), row.z.into(), row.v.into()]);
            pts.push((row.z, row.v));
        }
        series.push(Series {
            label: format!("k={}", profile[0].k),
            points: pts,
        });
    }
    let settings = json!({
        "choice": choice_name(choice),
        "k_grid": ks,
        "z_min": args.z_min,
        "z_max": args.z_max,
        "z_points": args.z_points,
    });
    deliver(
        cli,
        "phase-diagram",
        params,
        settings,
        params_input.into_iter().collect(),
        &Delivery {
            table,
            extra: None,
            plot: Some((
                "Presliding creep velocity".into(),
                "presliding distance z".into(),
                "velocity".into(),
                series,
            )),
        },
    )
}

fn sweep_cmd(
    cli: &Cli,
    params: &FrictionParams,
    params_input: Option<PathBuf>,
    args: &SweepArgs,
) -> Result<()> {
    if args.choices.is_empty() {
        bail!("--choices must name at least one closure");
    }
    let ks = sorted_rates(resolve_k_grid(&args.k_grid))?;
    let choices: Vec<SteadyStateChoice> = args.choices.iter().map(|&c| c.into()).collect();
    // Grid points are independent tasks; the task list is built in
    // (choice, k-ascending) order and merged back in that order.
    let mut tasks = Vec::with_capacity(choices.len() * ks.len());
    for &choice in &choices {
        for &k in &ks {
            tasks.push((choice, k));
        }
    }
    let points = map_items(cli.parallel, tasks, |(choice, k)| {
        breakaway_force(params, choice, k, args.z_th)
            .map(|pt| (choice, pt))
            .map_err(Into::into)
    })?;
    let mut table = Table::new(&["k", "v_th", "F_ba", "choice"]);
    let mut series: Vec<Series> = Vec::new();
    for (choice, pt) in &points {
        table.push(vec![
            pt.k.into(),
            pt.v_th.into(),
            pt.f_ba.into(),
            choice_name(*choice).as_str().into(),
        ]);
        match series.last_mut() {
            Some(s) if s.label == choice_name(*choice) => s.points.push((pt.k, pt.f_ba)),
            _ => series.push(Series {
                label: choice_name(*choice),
                points: vec![(pt.k, pt.f_ba)],
            }),
        }
    }
    let settings = json!({
        "choices": choices.iter().map(|&c| choice_name(c)).collect::<Vec<_>>(),
        "k_grid": ks,
        "z_th": args.z_th,
    });
    deliver(
        cli,
        "breakaway-sweep",
        params,
        settings,
        params_input.into_iter().collect(),
        &Delivery {
            table,
            extra: None,
            plot: Some((
                "Break-away force vs actuation rate".into(),
                "force rate k".into(),
                "break-away force".into(),
                series,
            )),
        },
    )
}

fn simulate_cmd(
    cli: &Cli,
    params: &FrictionParams,
    params_input: Option<PathBuf>,
    args: &SimulateArgs,
) -> Result<()> {
    let mut config = SimulationConfig::recommended(params, args.m, args.k)?;
    if let Some(dt) = args.dt {
        config.dt = dt;
    }
    if let Some(t_end) = args.t_end {
        config.t_end = t_end;
    }
    if let Some(eps_v) = args.eps_v {
        config.eps_v = eps_v;
    }
    config.z_th = args.z_th;
    config.v_th_detect = args.v_th_detect;
    config.stop_at_breakaway = !args.run_to_end;
    config.sample_every = match args.sample_every {
        Some(n) => n,
        None => {
            // Keep unattended trajectory files to ~200k rows.
            let steps = (config.t_end / config.dt).ceil() as usize;
            (steps / 200_000).max(1)
        }
    };
    config.validate()?;

    let traj = run(params, &config)?;
    let mut table = Table::new(&["t", "x", "v", "z", "F", "u"]);
    let mut u_series = Vec::with_capacity(traj.samples.len());
    let mut f_series = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        table.push(vec![
            s.t.into(),
            s.x.into(),
            s.v.into(),
            s.z.into(),
            s.f.into(),
            s.u.into(),
        ]);
        u_series.push((s.t, s.u));
        f_series.push((s.t, s.f));
    }

    let mut summary = format!("k = {}\n", config.k);
    match &traj.breakaway {
        Some(ev) => {
            summary.push_str("detector = z_th\n");
            summary.push_str(&format!("t_ba = {}\n", ev.t_ba));
            summary.push_str(&format!("F_ba_sim = {}\n", ev.f_ba_sim));
        }
        None => summary.push_str("detector = none\n"),
    }
    if let Some(ev) = &traj.velocity_detection {
        summary.push('\n');
        summary.push_str("detector = v_th\n");
        summary.push_str(&format!("t_ba = {}\n", ev.t_ba));
        summary.push_str(&format!("F_ba_sim = {}\n", ev.f_ba_sim));
    }
    summary.push_str(&format!("reversals = {}\n", traj.reversals));
    summary.push_str(&format!(
        "max_force_residual = {}\n",
        traj.force_residual_max
    ));

    let settings = json!({
        "m": config.m,
        "k": config.k,
        "dt": config.dt,
        "t_end": config.t_end,
        "eps_v": config.eps_v,
        "z_th": config.z_th,
        "v_th_detect": config.v_th_detect,
        "stop_at_breakaway": config.stop_at_breakaway,
        "sample_every": config.sample_every,
    });
    deliver(
        cli,
        "simulate",
        params,
        settings,
        params_input.into_iter().collect(),
        &Delivery {
            table,
            extra: Some(("simulate.summary.txt".into(), summary)),
            plot: Some((
                "Ramp-driven run".into(),
                "time".into(),
                "force".into(),
                vec![
                    Series {
                        label: "u = k t".into(),
                        points: u_series,
                    },
                    Series {
                        label: "friction F".into(),
                        points: f_series,
                    },
                ],
            )),
        },
    )
}

/// Reads two-column comma-separated data, tolerating one header line,
/// blank lines, and `#` comments. Errors carry 1-based line numbers.
fn read_data(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading data file {}", path.display()))?;
    let mut rows = Vec::new();
    let mut saw_rows = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let (a, b) = (fields.next(), fields.next());
        if fields.next().is_some() {
            bail!(
                "{}: line {}: expected exactly two comma-separated columns",
                path.display(),
                idx + 1
            );
        }
        let (Some(a), Some(b)) = (a, b) else {
            bail!(
                "{}: line {}: expected two comma-separated columns",
                path.display(),
                idx + 1
            );
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                rows.push((x, y));
                saw_rows = true;
            }
            _ if !saw_rows && rows.is_empty() => {
                // One non-numeric line before any data is taken as a header.
                saw_rows = true;
            }
            _ => bail!(
                "{}: line {}: cannot parse '{}' as two numbers",
                path.display(),
                idx + 1,
                line
            ),
        }
    }
    Ok(rows)
}

fn fit_cmd(
    cli: &Cli,
    params: &FrictionParams,
    params_input: Option<PathBuf>,
    args: &FitArgs,
) -> Result<()> {
    let data = read_data(&args.data)?;
    let options = FitOptions {
        fit_delta_exp: args.fit_delta_exp,
        ..FitOptions::default()
    };
    let result = match args.mode {
        FitMode::Stribeck => fit_stribeck(&data, params, &options)?,
        FitMode::Breakaway => fit_breakaway_curve(&data, params, args.z_th, &options)?,
    };

    let mut doc = result.params.to_key_value_string();
    doc.push_str(&format!("residual_norm = {}\n", result.residual_norm));
    doc.push_str(&format!("iterations = {}\n", result.iterations));
    doc.push_str(&format!("converged = {}\n", result.converged));
    let rendered = match cli.format {
        Format::Csv => doc,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&result).context("serializing fit result")?;
            s.push('\n');
            s
        }
    };

    // Sorted data plus the fitted model curve for plotting.
    let mut sorted = data.clone();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let model: Vec<(f64, f64)> = match args.mode {
        FitMode::Stribeck => sorted
            .iter()
            .map(|&(v, _)| (v, stickslip::stribeck(&result.params, v).unwrap_or(f64::NAN)))
            .collect(),
        FitMode::Breakaway => sorted
            .iter()
            .map(|&(k, _)| {
                let f = breakaway_force(
                    &result.params,
                    SteadyStateChoice::Average,
                    k,
                    args.z_th,
                )
                .map(|pt| pt.f_ba)
                .unwrap_or(f64::NAN);
                (k, f)
            })
            .collect(),
    };

    let mode_name = match args.mode {
        FitMode::Stribeck => "stribeck",
        FitMode::Breakaway => "breakaway",
    };
    let settings = json!({
        "mode": mode_name,
        "data": args.data.display().to_string(),
        "z_th": args.z_th,
        "fit_delta_exp": args.fit_delta_exp,
        "residual_norm": result.residual_norm,
        "iterations": result.iterations,
        "converged": result.converged,
    });
    let file_name = match cli.format {
        Format::Csv => "fit.txt".to_owned(),
        Format::Json => "fit.json".to_owned(),
    };

    // The fit's primary artifact is the key-value document; reuse the
    // delivery path with an empty table so the manifest and plot plumbing
    // stay uniform.
    let mut inputs: Vec<PathBuf> = params_input.into_iter().collect();
    inputs.push(args.data.clone());
    deliver(
        cli,
        "fit",
        &result.params,
        settings,
        inputs,
        &Delivery {
            table: Table::new(&[]),
            extra: Some((file_name, rendered)),
            plot: Some((
                format!("Fit: {mode_name}"),
                if args.mode == FitMode::Stribeck {
                    "velocity".into()
                } else {
                    "force rate k".into()
                },
                "force".into(),
                vec![
                    Series {
                        label: "data".into(),
                        points: sorted,
                    },
                    Series {
                        label: "fit".into(),
                        points: model,
                    },
                ],
            )),
        },
    )
}
