use std::io::Write;

use anyhow::{bail, Context, Result};
use latinapprox::pipeline::describe;
use latinapprox::{
    approximate_compact, approximate_locally_compact, box_partition, complete_partial, lattice_partition,
    loop_approximate, realize_amalgamation, realize_partial, singleton_partition, unimodularity_probe, w_exact,
    w_montecarlo, CompactWindow, GroupKind, GroupModel, IntegerAmalgam, LatinSquare, PartialLatinSquare, Rational,
    Scalar, WTensor,
};
use serde_json::{json, Value};

use crate::config::{parse_box, parse_group, to_float_box, CommandName, Format, RunArgs, TensorModeArg};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_LAW_VIOLATION: u8 = 2;

pub fn run(cfg: &RunArgs) -> Result<u8> {
    cfg.validate()?;
    match cfg.command.context("no command given")? {
        CommandName::Approximate => approximate(cfg, false),
        CommandName::Loop => approximate(cfg, true),
        CommandName::Probe => probe(cfg),
        CommandName::Realize => realize(cfg),
        CommandName::Complete => complete(cfg),
        CommandName::Tensor => tensor(cfg),
    }
}

fn emit(cfg: &RunArgs, artifact: &str) -> Result<()> {
    match &cfg.out {
        Some(path) => std::fs::write(path, artifact).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(artifact.as_bytes())?;
            Ok(())
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn approximate(cfg: &RunArgs, as_loop: bool) -> Result<u8> {
    let model: GroupModel<Rational> = parse_group(cfg.require_group()?)?;
    let cells = cfg.require_cells()?;
    let t = cfg.t.unwrap_or(1);
    let (map, report) = match model.kind() {
        GroupKind::RealLine if !as_loop => {
            let inner = parse_box("inner", cfg.inner.as_deref().unwrap_or("-1:1"))?;
            approximate_locally_compact(&model, &inner, cells, t)?
        }
        _ if as_loop => loop_approximate(&model, cells, t)?,
        _ => approximate_compact(&model, cells, t)?,
    };
    print!("{}", report.summary());
    if cfg.out.is_some() {
        let artifact = match cfg.format() {
            Format::Json => json_text(&json!({"report": report.to_json(), "map": map.to_json()})),
            Format::Csv => map.square.to_csv(),
        };
        emit(cfg, &artifact)?;
    }
    Ok(EXIT_OK)
}

fn probe(cfg: &RunArgs) -> Result<u8> {
    let model: GroupModel<f64> = parse_group(cfg.require_group()?)?;
    let window = match (model.kind(), &cfg.window) {
        (_, Some(w)) => CompactWindow::boxed(&model, to_float_box(&parse_box("window", w)?), None)?,
        (GroupKind::AffineLine, None) => {
            CompactWindow::boxed(&model, to_float_box(&parse_box("window", "1/2:2,-1:1")?), None)?
        }
        (GroupKind::RealLine, None) => CompactWindow::boxed(&model, to_float_box(&parse_box("window", "-3:3")?), None)?,
        _ => CompactWindow::whole_group(),
    };
    let samples = cfg.samples.unwrap_or(1_000_000);
    let report = unimodularity_probe(&model, &window, cfg.require_cells()?, samples, cfg.seed.unwrap_or(0))?;
    println!("model      {}", report.model);
    println!("lines      {}", report.lines);
    println!("disparity  {:.6}", report.disparity);
    println!("noise      {:.6}", report.noise);
    println!("threshold  {:.6}", 4.0 * report.noise);
    println!("exceeds    {}", report.exceeds_noise);
    if cfg.out.is_some() {
        emit(cfg, &json_text(&report.to_json()))?;
    }
    if report.exceeds_noise {
        if let Some((axis, (a, b))) = report.worst_line {
            eprintln!(
                "line law violated: {axis} line ({a},{b}) deviates {:.4} from the median",
                report.disparity
            );
        }
        Ok(EXIT_LAW_VIOLATION)
    } else {
        Ok(EXIT_OK)
    }
}

fn read_json(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn realize(cfg: &RunArgs) -> Result<u8> {
    let path = cfg.amalgam.as_ref().context("field `amalgam`: missing")?;
    let m = IntegerAmalgam::from_json(&read_json(path)?)?;
    let artifact = if m.is_compact() {
        let (sq, groups) = realize_amalgamation(&m)?;
        match cfg.format() {
            Format::Json => json_text(&sq.to_json(Some(&groups))),
            Format::Csv => sq.to_csv(),
        }
    } else {
        let (sq, groups) = realize_partial(&m)?;
        match cfg.format() {
            Format::Json => json_text(&sq.to_json(Some(&groups))),
            Format::Csv => sq.to_csv(),
        }
    };
    emit(cfg, &artifact)?;
    Ok(EXIT_OK)
}

fn complete(cfg: &RunArgs) -> Result<u8> {
    let path = cfg.partial.as_ref().context("field `partial`: missing")?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let partial = if text.trim_start().starts_with('{') {
        PartialLatinSquare::from_json(&serde_json::from_str(&text)?)?.0
    } else {
        PartialLatinSquare::from_csv(&text)?
    };
    let sq: LatinSquare = complete_partial(&partial)?;
    let artifact = match cfg.format() {
        Format::Json => json_text(&sq.to_json(None)),
        Format::Csv => sq.to_csv(),
    };
    emit(cfg, &artifact)?;
    Ok(EXIT_OK)
}

fn tensor_csv<T: Scalar>(w: &WTensor<T>) -> String {
    let mut out = String::from("i,j,k,w\n");
    for k in 0..w.n {
        for j in 0..w.n {
            for i in 0..w.n {
                out.push_str(&format!("{i},{j},{k},{}\n", w.get(i, j, k)));
            }
        }
    }
    out
}

fn tensor(cfg: &RunArgs) -> Result<u8> {
    let spec = cfg.require_group()?;
    let cells = cfg.require_cells()?;
    let mode = cfg.mode.unwrap_or(if cfg.samples.unwrap_or(0) > 0 {
        TensorModeArg::Montecarlo
    } else {
        TensorModeArg::Exact
    });
    let window_text = cfg.window.clone().or_else(|| cfg.inner.as_ref().map(|b| {
        // an inner target alone is inflated the same way as in `approximate`
        parse_box("inner", b)
            .map(|b| latinapprox::pipeline::inflate_window(&b))
            .map(|c| format!("{}:{}", c.lo[0], c.hi[0]))
            .unwrap_or_default()
    }));
    let (artifact, model_name) = match mode {
        TensorModeArg::Exact => {
            let model: GroupModel<Rational> = parse_group(spec)?;
            let window = exact_window(&model, window_text.as_deref())?;
            let p = tensor_partition(&model, &window, cells)?;
            let w = w_exact(&p, &model, &window)?;
            (render_tensor(cfg, &w), describe(&model))
        }
        TensorModeArg::Montecarlo => {
            let model: GroupModel<f64> = parse_group(spec)?;
            let window = match window_text.as_deref() {
                Some(text) => CompactWindow::boxed(&model, to_float_box(&parse_box("window", text)?), None)?,
                None if model.is_compact() => CompactWindow::whole_group(),
                None => bail!("field `window`: required for {}", model.kind().name()),
            };
            let p = tensor_partition(&model, &window, cells)?;
            let samples = cfg.samples.context("field `samples`: missing")?;
            let w = w_montecarlo(&p, &model, &window, samples, cfg.seed.unwrap_or(0))?;
            (render_tensor(cfg, &w), describe(&model))
        }
    };
    eprintln!("tensor for {model_name} with {cells} cells per axis");
    emit(cfg, &artifact)?;
    Ok(EXIT_OK)
}

fn exact_window(model: &GroupModel<Rational>, text: Option<&str>) -> Result<CompactWindow<Rational>> {
    Ok(match text {
        Some(text) => CompactWindow::boxed(model, parse_box("window", text)?, None)?,
        None if model.is_compact() => CompactWindow::whole_group(),
        None => bail!("field `window`: required for {}", model.kind().name()),
    })
}

fn tensor_partition<T: Scalar>(
    model: &GroupModel<T>,
    window: &CompactWindow<T>,
    cells: usize,
) -> Result<latinapprox::Partition<T>> {
    Ok(match model.kind() {
        GroupKind::Finite(_) => singleton_partition(model)?,
        GroupKind::Torus { .. } if window.outer.is_none() => lattice_partition(model, cells)?,
        _ => box_partition(model, window, cells)?,
    })
}

fn render_tensor<T: Scalar>(cfg: &RunArgs, w: &WTensor<T>) -> String {
    match cfg.format() {
        Format::Json => json_text(&w.to_json()),
        Format::Csv => tensor_csv(w),
    }
}
