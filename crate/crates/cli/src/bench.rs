use rdcnn::bench::{bench_suite, emit_json, BenchError, BenchSpec};
use rdcnn::config::{InitMode, Precision};
use rdcnn::{Backend, Gene, Manifest, RunConfig};

use crate::args::{BackendArgs, BenchArgs};
use crate::error::CliError;

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    let tuning = BackendArgs {
        backend: None,
        threads: args.threads,
        tile_rows: args.tile_rows,
        tile_cols: args.tile_cols,
    };
    let backends = args
        .backends
        .iter()
        .map(|name| name.parse::<Backend>().map(|b| tuning.tune(b)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::Validation)?;
    if backends.is_empty() || args.sizes.is_empty() {
        return Err(CliError::Validation("need at least one backend and one size".into()));
    }
    if let Err(msg) = backends.iter().try_for_each(Backend::check) {
        return Err(CliError::Validation(msg));
    }
    if let Some(&n) = args.sizes.iter().find(|&&n| n < rdcnn::init::SEED_BLOCK) {
        return Err(CliError::Validation(format!(
            "invalid size {n}: sides must be at least {}",
            rdcnn::init::SEED_BLOCK
        )));
    }
    let precision: Precision = args.precision.parse().map_err(CliError::Validation)?;
    let mut gene = Gene::default();
    args.gene.apply(&mut gene);

    let first = RunConfig {
        init_mode: InitMode::CenterSquare,
        iter_max: args.iters,
        nssp: 1,
        seed: args.seed,
        backend: backends[0],
        precision,
        ..RunConfig::square(args.sizes[0])
    };
    let first = rdcnn::validate_config(first, &gene)?;

    let out = crate::out_dir(&args.out)?;
    Manifest::new(gene, first).write(&out.join("manifest.txt"))?;

    let spec = BenchSpec {
        backends,
        sizes: args.sizes.clone(),
        iters: args.iters,
        gene,
        seed: args.seed,
        precision,
        hardware: args.hardware.clone().unwrap_or_else(crate::default_hardware),
        repetitions: args.repetitions,
        max_cell_iters: args.max_cell_iters,
    };
    let report = bench_suite(&spec).map_err(|e| match e {
        BenchError::Run { .. } if e.blow_up_iteration().is_some() => CliError::BlowUp(e.to_string()),
        other => CliError::Validation(other.to_string()),
    })?;
    for s in &report.skipped {
        println!("skipped {} at N={}: {}", s.backend, s.n, s.reason);
    }
    if report.records.is_empty() {
        return Err(CliError::Validation("every benchmark cell was skipped".into()));
    }
    let (csv, table) = report.emit_table().map_err(|e| CliError::Validation(e.to_string()))?;
    std::fs::write(out.join("bench.csv"), &csv)?;
    if args.json {
        std::fs::write(out.join("bench.json"), emit_json(&report.records))?;
    }
    print!("{table}");
    println!("output: {}", out.display());
    Ok(())
}
