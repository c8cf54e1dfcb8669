use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use transprec::cost::{estimate, normalize, CostReport, Tables};
use transprec::kernels::{run_kernel, KernelOutput};
use transprec::report::Report;
use transprec::tuner::{tabulate, tune as tune_inputs};
use transprec::{
    FormatMap, Kernel, KernelConfig, KernelInput, PrecisionAssignment, QualityThreshold, StatsContext,
    StatsReport, TypeSystem,
};

use crate::{CostArgs, FormatArgs, InputArgs, RunArgs, StatsArgs, TuneArgs};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn type_system(spec: &str) -> Result<TypeSystem> {
    if let Some(path) = spec.strip_prefix("custom:") {
        let map = FormatMap::parse(&read(Path::new(path))?)
            .with_context(|| format!("parsing format map {path}"))?;
        return Ok(TypeSystem::custom(map));
    }
    Ok(spec.parse()?)
}

fn kernel(name: &str) -> Result<Kernel> {
    Ok(name.parse()?)
}

fn inputs(a: &InputArgs) -> Result<Vec<KernelInput>> {
    let k = kernel(&a.kernel)?;
    let list = if a.input.is_empty() {
        a.seed
            .iter()
            .map(|&s| {
                let mut i = KernelInput::generate(k, s, a.size)?;
                if let Some(it) = a.iterations {
                    i = i.with_iterations(it)?;
                }
                Ok(i)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        a.input
            .iter()
            .map(|p| {
                let i = KernelInput::read(p)?;
                if i.kernel() != k {
                    bail!("{} holds a {} input, not {k}", p.display(), i.kernel());
                }
                Ok(i)
            })
            .collect::<Result<Vec<_>>>()?
    };
    if let Some(path) = &a.write_input {
        if list.len() != 1 {
            bail!("--write-input needs exactly one input");
        }
        list[0].write(path)?;
    }
    Ok(list)
}

fn single_input(a: &InputArgs) -> Result<KernelInput> {
    let mut list = inputs(a)?;
    if list.len() != 1 {
        bail!("this command takes one input, got {}", list.len());
    }
    Ok(list.pop().unwrap())
}

fn config(k: Kernel, f: &FormatArgs) -> Result<(KernelConfig, Option<PrecisionAssignment>)> {
    let ts = type_system(&f.type_system)?;
    let Some(path) = &f.precision_file else {
        return Ok((KernelConfig::binary32(k), None));
    };
    let a = PrecisionAssignment::parse(k, &read(path)?)
        .with_context(|| format!("reading precision file {}", path.display()))?;
    let cfg = if f.storage { a.storage_config(&ts)? } else { a.config(&ts)? };
    Ok((cfg, Some(a)))
}

fn stats_report(input: &KernelInput, cfg: &KernelConfig, seed: Option<u64>) -> Result<(KernelOutput, Report)> {
    let mut ctx = StatsContext::new();
    let out = run_kernel(input, cfg, &mut ctx)?;
    let stats = ctx.finish()?;
    let mut r = Report::new("stats");
    r.set("kernel", input.kernel());
    if let Some(s) = seed {
        r.set("seed", s);
    }
    let dims: Vec<String> = input.dims().iter().map(usize::to_string).collect();
    r.set("dims", dims.join(" "));
    for (name, f) in input.kernel().spec().var_names().zip(cfg.formats()) {
        r.set(format!("format.{name}"), f);
    }
    r.set("fp_ops", stats.fp_ops());
    r.set("casts", stats.casts());
    r.set("memory", stats.memory());
    stats.write_to(&mut r);
    Ok((out, r))
}

fn seed_of(a: &InputArgs) -> Option<u64> {
    if a.input.is_empty() {
        a.seed.first().copied()
    } else {
        None
    }
}

pub fn run(a: RunArgs) -> Result<()> {
    let input = single_input(&a.input)?;
    let (cfg, _) = config(input.kernel(), &a.formats)?;
    let (out, report) = stats_report(&input, &cfg, seed_of(&a.input))?;
    if let Some(p) = &a.report {
        write(p, &report.to_string())?;
    }
    emit(None, &out.to_text())
}

pub fn stats(a: StatsArgs) -> Result<()> {
    let input = single_input(&a.input)?;
    let (cfg, _) = config(input.kernel(), &a.formats)?;
    let (_, report) = stats_report(&input, &cfg, seed_of(&a.input))?;
    emit(a.report.as_deref(), &report.to_string())
}

pub fn tune(a: TuneArgs) -> Result<()> {
    let ts = type_system(&a.type_system)?;
    let threshold = QualityThreshold::new(a.threshold)?;
    let list = inputs(&a.input)?;
    let result = tune_inputs(list, threshold, &ts)?;
    write(&a.precision_file, &result.assignment.to_text())?;
    let mut report = result.to_report(&ts, threshold)?;
    if a.input.input.is_empty() {
        let seeds: Vec<String> = a.input.seed.iter().map(u64::to_string).collect();
        report.set("seeds", seeds.join(" "));
    }
    if let Some(p) = &a.report {
        write(p, &report.to_string())?;
    }
    let k = result.assignment.kernel();
    let mut out = String::new();
    out.push_str(&format!("{k} threshold {threshold} ({})\n", ts.label()));
    for (name, p) in k.spec().var_names().zip(result.assignment.bits()) {
        out.push_str(&format!("  {name:<10} {p:>2} bits  {}\n", ts.classify_precision(*p)?));
    }
    out.push_str(&tabulate(&result.assignment, &ts)?.to_string());
    for (i, m) in result.metrics.iter().enumerate() {
        out.push_str(&format!("metric[{i}] = {m:?}\n"));
    }
    out.push_str(&format!("evaluations = {}\n", result.evaluations));
    emit(None, &out)
}

/// A stats report, or a cost report used as is.
enum Costable {
    Stats(StatsReport),
    Cost(CostReport),
}

fn load_costable(path: &Path) -> Result<Costable> {
    let r = Report::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(match r.kind() {
        "stats" => Costable::Stats(StatsReport::from_report(&r)?),
        "cost" => Costable::Cost(CostReport::from_report(&r)?),
        other => bail!("{}: expected a stats or cost report, got `{other}`", path.display()),
    })
}

fn cost_of(c: Costable, tables: &Tables) -> Result<CostReport> {
    Ok(match c {
        Costable::Stats(s) => estimate(&s, tables)?,
        Costable::Cost(c) => c,
    })
}

pub fn cost(a: CostArgs) -> Result<()> {
    let tables = match &a.tables {
        Some(p) => Tables::parse(&read(p)?).with_context(|| format!("parsing tables {}", p.display()))?,
        None => Tables::default(),
    };
    let (test, default_baseline) = match &a.kernel {
        Some(name) => {
            let k = kernel(name)?;
            let mut input = KernelInput::generate(k, a.seed, a.size)?;
            if let Some(it) = a.iterations {
                input = input.with_iterations(it)?;
            }
            let (cfg, _) = config(
                k,
                &FormatArgs {
                    type_system: a.type_system.clone(),
                    precision_file: a.precision_file.clone(),
                    storage: true,
                },
            )?;
            let run = |cfg: &KernelConfig| -> Result<StatsReport> {
                let mut ctx = StatsContext::new();
                run_kernel(&input, cfg, &mut ctx)?;
                Ok(ctx.finish()?)
            };
            (Costable::Stats(run(&cfg)?), Some(Costable::Stats(run(&KernelConfig::binary32(k))?)))
        }
        None => (load_costable(a.stats.as_deref().unwrap())?, None),
    };
    let mut report = cost_of(test, &tables)?;
    let baseline = match &a.baseline {
        Some(p) => Some(load_costable(p)?),
        None => default_baseline,
    };
    if let Some(b) = baseline {
        report = normalize(&report, &cost_of(b, &tables)?)?;
    }
    let mut out = report.to_report();
    if let Some(k) = &a.kernel {
        out.set("kernel", kernel(k)?);
    }
    emit(a.report.as_deref(), &out.to_string())
}
