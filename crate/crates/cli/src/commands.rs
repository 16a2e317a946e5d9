use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bqap::analytics::{average_value, canonical_sweep, canonical_values, class_count, DominationFigures};
use bqap::gadgets::{
    adversarial_instance, default_penalty, embed_instance, partition_gadget, tightness_instance,
    GadgetBundle,
};
use bqap::heuristics::{
    alternating, below_average_rounding, dominate, local_search, round_x_optimize_y,
    round_y_optimize_x, SearchTrace,
};
use bqap::model::{
    decode_instance, decode_solution, encode_instance, encode_solution, random_fractional,
    random_instance, random_solution,
};
use bqap::oracle::{count_at_least_average, domination_count, enumerate_report, witness_sets};
use bqap::{FractionalSolution, Instance, NeighborhoodKind, Rational, Solution};
use clap::ValueEnum;
use serde_json::{json, Value};

use crate::args::{Cli, Command, GenArgs, Kind, Method, SolveArgs};
use crate::CliError;

type Result<T> = std::result::Result<T, CliError>;

/// Random fractional points checked by `verify`, besides the uniform one.
const VERIFY_POINTS: u64 = 8;

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let mut p = Printer { out, json: cli.json };
    match &cli.command {
        Command::Gen(a) => gen(a, &mut p),
        Command::Eval { instance, solution } => {
            let inst = read_instance(instance)?;
            let sol = read_solution(&inst, solution)?;
            let value = inst.evaluate(&sol)?;
            p.emit(json!({ "value": value }), |w| writeln!(w, "{value}"))
        }
        Command::Avg { instance } => {
            let avg = average_value(&read_instance(instance)?);
            p.emit(json!({ "average": avg }), |w| writeln!(w, "{avg}"))
        }
        Command::Solve(a) => solve(a, &mut p),
        Command::Exact { instance, limit, dominates } => {
            let inst = read_instance(instance)?;
            exact(&inst, limit.value, dominates.as_deref(), &mut p)
        }
        Command::Dominate { instance, exact, limit, out } => {
            let inst = read_instance(instance)?;
            dominate_cmd(&inst, *exact, limit.value, out.as_deref(), &mut p)
        }
        Command::Verify { instance, limit, seed } => {
            let inst = read_instance(instance)?;
            verify(&inst, limit.value, *seed, &mut p)
        }
    }
}

struct Printer<'a> {
    out: &'a mut dyn Write,
    json: bool,
}

impl Printer<'_> {
    fn emit<F>(&mut self, value: Value, text: F) -> Result<()>
    where
        F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
    {
        if self.json {
            serde_json::to_writer(&mut *self.out, &value).map_err(std::io::Error::from)?;
            writeln!(self.out)?;
        } else {
            text(self.out)?;
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_instance(path: &Path) -> Result<Instance> {
    decode_instance(&read(path)?).map_err(|source| CliError::File { path: path.to_path_buf(), source })
}

fn read_solution(inst: &Instance, path: &Path) -> Result<Solution> {
    let file_err = |source| CliError::File { path: path.to_path_buf(), source };
    let (variant, sol) = decode_solution(&read(path)?).map_err(file_err)?;
    if variant != inst.variant() {
        return Err(CliError::Usage(format!(
            "{}: solution is for {variant}, instance is {}",
            path.display(),
            inst.variant()
        )));
    }
    inst.check_solution(&sol).map_err(file_err)?;
    Ok(sol)
}

fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}.json"))
}

fn require<T: Copy>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| CliError::Usage(format!("--kind {kind} needs --{flag}")))
}

fn gen(a: &GenArgs, p: &mut Printer) -> Result<()> {
    let dims = |kind| Ok::<_, CliError>((require(a.m, "m", kind)?, require(a.n, "n", kind)?));
    let bundle = match a.kind {
        Kind::Random => {
            let (m, n) = dims("random")?;
            let inst = random_instance(a.variant, m, n, a.lo, a.hi, a.seed)?;
            GadgetBundle { instance: inst, distinguished_solution: None, metadata: Default::default() }
        }
        Kind::Tightness => {
            let (m, n) = dims("tightness")?;
            let at = match a.at.as_slice() {
                [] => [0; 4],
                &[i, j, k, l] => [i, j, k, l],
                other => return Err(CliError::Usage(format!("--at needs 4 indices, got {}", other.len()))),
            };
            tightness_instance(a.variant, m, n, at)?
        }
        Kind::Adversarial => {
            let (m, n) = dims("adversarial")?;
            adversarial_instance(a.variant, m, n, require(a.big_l, "L", "adversarial")?, a.eps)?
        }
        Kind::Partition => {
            if a.elements.is_empty() {
                return Err(CliError::Usage("--kind partition needs --elements".into()));
            }
            partition_gadget(&a.elements)?
        }
        Kind::Embed => {
            let src = a
                .instance
                .as_deref()
                .ok_or_else(|| CliError::Usage("--kind embed needs --instance".into()))?;
            let orig = read_instance(src)?;
            let big_l = a.big_l.unwrap_or_else(|| default_penalty(&orig));
            embed_instance(&orig, require(a.a, "a", "embed")?, require(a.b, "b", "embed")?, big_l)?
        }
    };
    write(&a.out, &encode_instance(&bundle.instance))?;
    let mut written = vec![a.out.clone()];
    let mut solution_path = None;
    if let Some(sol) = &bundle.distinguished_solution {
        let path = sidecar(&a.out, "solution");
        write(&path, &encode_solution(bundle.instance.variant(), sol))?;
        written.push(path.clone());
        solution_path = Some(path);
    }
    let mut meta_path = None;
    if !bundle.metadata.is_empty() {
        let path = sidecar(&a.out, "meta");
        write(&path, &bundle.encode_metadata())?;
        written.push(path.clone());
        meta_path = Some(path);
    }
    let value = json!({
        "instance": a.out,
        "solution": solution_path,
        "metadata": meta_path,
    });
    p.emit(value, |w| {
        for path in &written {
            writeln!(w, "wrote {}", path.display())?;
        }
        Ok(())
    })
}

fn start_solution(inst: &Instance, a: &SolveArgs) -> Result<Solution> {
    match &a.start {
        Some(path) => read_solution(inst, path),
        None => Ok(random_solution(inst, a.seed.unwrap_or(0))),
    }
}

fn rounding_point(inst: &Instance, seed: Option<u64>) -> FractionalSolution {
    match seed {
        Some(seed) => random_fractional(inst, seed, 8),
        None => FractionalSolution::uniform(inst),
    }
}

fn solve(a: &SolveArgs, p: &mut Printer) -> Result<()> {
    let inst = read_instance(&a.instance)?;
    let mut trace: Option<SearchTrace> = None;
    let mut extra = json!({});
    let search = |kind| -> Result<(Solution, SearchTrace)> {
        Ok(local_search(&inst, &start_solution(&inst, a)?, kind, a.max_iters)?)
    };
    let sol = match a.method {
        Method::Canonical => {
            let sweep = canonical_sweep(&inst);
            extra = json!({ "worst": sweep.worst, "worst_value": sweep.worst_value });
            sweep.best
        }
        Method::Rxoy => round_x_optimize_y(&inst, &rounding_point(&inst, a.seed))?,
        Method::Ryox => round_y_optimize_x(&inst, &rounding_point(&inst, a.seed))?,
        Method::Alternate => {
            let (s, t) = alternating(&inst, &start_solution(&inst, a)?)?;
            trace = Some(t);
            s
        }
        Method::LsSwap | Method::LsCswap | Method::LsOswap => {
            let kind = match a.method {
                Method::LsSwap => NeighborhoodKind::Swap,
                Method::LsCswap => NeighborhoodKind::ConcurrentSwap,
                _ => NeighborhoodKind::OptimizedSwap,
            };
            let (s, t) = search(kind)?;
            trace = Some(t);
            s
        }
        Method::Dominate => {
            let (s, cert) = dominate(&inst);
            extra = json!({ "certificate": cert });
            s
        }
    };
    let value = inst.evaluate(&sol)?;
    if let Some(path) = &a.out {
        write(path, &encode_solution(inst.variant(), &sol))?;
    }
    let method = a.method.to_possible_value().expect("no skipped variants").get_name().to_string();
    let mut doc = json!({ "method": method, "value": value, "solution": sol });
    if let Value::Object(map) = extra {
        doc.as_object_mut().expect("object literal").extend(map);
    }
    if a.trace {
        doc["trace"] = json!(trace);
    }
    p.emit(doc, |w| {
        writeln!(w, "value {value}")?;
        writeln!(w, "sigma {:?}", sol.sigma)?;
        writeln!(w, "tau {:?}", sol.tau)?;
        if let (true, Some(t)) = (a.trace, &trace) {
            writeln!(w, "start value {}", t.start_value)?;
            for (idx, mv) in t.moves.iter().enumerate() {
                writeln!(
                    w,
                    "move {}: {:?} {:?} assign {:?} reoptimize {:?} delta {}",
                    idx + 1,
                    mv.side,
                    mv.kind,
                    mv.assignments,
                    mv.reoptimized,
                    mv.delta
                )?;
            }
            writeln!(w, "iterations {}{}", t.iterations, if t.truncated { " (truncated)" } else { "" })?;
        }
        Ok(())
    })
}

fn exact(inst: &Instance, limit: u64, dominates: Option<&Path>, p: &mut Printer) -> Result<()> {
    let report = enumerate_report(inst, limit)?;
    let count = match dominates {
        Some(path) => Some(domination_count(inst, &read_solution(inst, path)?, limit)?),
        None => None,
    };
    let mut doc = json!(report);
    if let Some(c) = &count {
        doc["domination_count"] = json!(c.to_string());
    }
    p.emit(doc, |w| {
        writeln!(w, "count {}", report.count)?;
        writeln!(w, "min {}", report.min_value)?;
        writeln!(w, "max {}", report.max_value)?;
        writeln!(w, "sum {}", report.sum)?;
        writeln!(w, "mean {}", report.mean)?;
        writeln!(w, "lower_median {}", report.lower_median)?;
        writeln!(w, "upper_median {}", report.upper_median)?;
        writeln!(w, "optimum {}", report.optimum_solution)?;
        if let Some(c) = &count {
            writeln!(w, "domination_count {c}")?;
        }
        Ok(())
    })
}

fn dominate_cmd(inst: &Instance, exact: bool, limit: u64, out: Option<&Path>, p: &mut Printer) -> Result<()> {
    let (sol, cert) = dominate(inst);
    if let Some(path) = out {
        write(path, &encode_solution(inst.variant(), &sol))?;
    }
    let mut doc = json!({ "solution": sol, "certificate": cert });
    let mut lines = vec![
        format!("value {}", cert.value),
        format!("average {}", cert.average),
        format!("start {} value {}", format!("{:?}", cert.start_method).to_lowercase(), cert.start_value),
        format!("sigma {:?}", sol.sigma),
        format!("tau {:?}", sol.tau),
    ];
    if exact {
        let count = domination_count(inst, &sol, limit)?;
        let figures = DominationFigures::new(count, inst.solution_space_size())?;
        let witnesses = witness_sets(inst, &cert.start, limit)?;
        lines.push(format!("domination_count {}", figures.dominated_count));
        lines.push(format!("space_size {}", figures.space_size));
        lines.push(format!("ratio {}", figures.ratio));
        lines.push(format!("witness_union {}", witnesses.union_len()));
        lines.push(format!("swap_intersection {}", witnesses.swaps.intersection_len()));
        doc["exact"] = json!({
            "domination_count": figures.dominated_count.to_string(),
            "space_size": figures.space_size.to_string(),
            "ratio": figures.ratio,
            "witness_union": witnesses.union_len(),
            "swap_intersection": witnesses.swaps.intersection_len(),
        });
    }
    p.emit(doc, |w| lines.iter().try_for_each(|l| writeln!(w, "{l}")))
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn verify(inst: &Instance, limit: u64, seed: u64, p: &mut Printer) -> Result<()> {
    let avg = average_value(inst);
    let report = enumerate_report(inst, limit)?;
    let mut checks = vec![Check {
        name: "average-matches-enumeration",
        pass: report.mean == avg,
        detail: format!("closed form {avg}, enumeration {}", report.mean),
    }];

    let at_least = count_at_least_average(inst, limit)?;
    let bound = class_count(inst);
    checks.push(Check {
        name: "at-least-average-bound",
        pass: at_least >= bound,
        detail: format!("{at_least} solutions at or above average, bound {bound}"),
    });

    let canon = canonical_values(inst);
    let (lo, hi) = (*canon.iter().min().expect("non-empty"), *canon.iter().max().expect("non-empty"));
    let rounded = below_average_rounding(inst);
    let rv = inst.evaluate(&rounded)?;
    checks.push(Check {
        name: "canonical-straddle",
        pass: Rational::from(lo) <= avg && avg <= Rational::from(hi) && Rational::from(rv) <= avg,
        detail: format!("canonical range [{lo}, {hi}], rounding value {rv}"),
    });

    let mut worst: Option<String> = None;
    let points = std::iter::once(FractionalSolution::uniform(inst))
        .chain((0..VERIFY_POINTS).map(|s| random_fractional(inst, seed.wrapping_add(s), 8)));
    let mut checked = 0;
    for frac in points {
        let fv = inst.evaluate_fractional(&frac)?;
        for (name, sol) in [
            ("RxOy", round_x_optimize_y(inst, &frac)?),
            ("RyOx", round_y_optimize_x(inst, &frac)?),
        ] {
            let v = Rational::from(inst.evaluate(&sol)?);
            if v > fv && worst.is_none() {
                worst = Some(format!("{name} gives {v} above fractional {fv}"));
            }
            checked += 1;
        }
    }
    checks.push(Check {
        name: "rounding-monotone",
        pass: worst.is_none(),
        detail: worst.unwrap_or_else(|| format!("{checked} roundings")),
    });

    let failed = checks.iter().filter(|c| !c.pass).count();
    let doc = json!({
        "properties": checks
            .iter()
            .map(|c| json!({ "name": c.name, "pass": c.pass, "detail": c.detail }))
            .collect::<Vec<_>>(),
        "failed": failed,
    });
    p.emit(doc, |w| {
        for c in &checks {
            writeln!(w, "{} {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    })?;
    if failed > 0 {
        return Err(CliError::PropertyFailed(failed));
    }
    Ok(())
}
