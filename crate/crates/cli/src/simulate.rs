use std::path::Path;

use rdcnn::bench::throughput;
use rdcnn::config::Precision;
use rdcnn::imagery::{render_montage, save_frame, MontageOptions, Timing};
use rdcnn::{validate_config, Backend, Manifest, Real, RunOutcome};

use crate::args::SimulateArgs;
use crate::error::CliError;

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let manifest = args.run.resolve()?;
    let config = validate_config(manifest.config.clone(), &manifest.gene)?;
    let image = crate::load_input(&config)?;
    let out = crate::out_dir(&args.out)?;
    manifest.write(&out.join("manifest.txt"))?;
    if let Some(note) = manifest.gene.stability_advisory() {
        eprintln!("warning: {note}");
    }
    match config.precision {
        Precision::Single => simulate::<f32>(&manifest, image.as_ref(), args, &out),
        Precision::Double => simulate::<f64>(&manifest, image.as_ref(), args, &out),
    }
}

fn workers(backend: Backend) -> usize {
    match backend {
        Backend::Parallel { threads: 0 } => std::thread::available_parallelism().map_or(1, |n| n.get()),
        Backend::Parallel { threads } => threads,
        _ => 1,
    }
}

fn simulate<T: Real>(
    manifest: &Manifest,
    image: Option<&rdcnn::imagery::GrayImage>,
    args: &SimulateArgs,
    out: &Path,
) -> Result<(), CliError> {
    let (gene, config) = (&manifest.gene, &manifest.config);
    let initial = rdcnn::initial_state::<T>(config, gene, image)?;
    println!("FHN Calculation: {} x {} mesh", config.rows, config.cols);
    println!(
        "simulator: {} ({} worker{}, {} precision)",
        config.backend.label(),
        workers(config.backend),
        if workers(config.backend) == 1 { "" } else { "s" },
        config.precision
    );
    let outcome: RunOutcome<T> = rdcnn::run(config, gene, initial)?;

    for (label, secs) in outcome.snapshots.labels()[1..].iter().zip(&outcome.snapshot_seconds) {
        println!("{}, (elapsed: {secs:.6} s)", label - 1);
    }
    println!("total: {:.6} s", outcome.seconds);
    println!("=====");
    let rates = throughput(config.rows, config.cols, config.iter_max, outcome.seconds).ok();
    match rates {
        Some((mcells, ns)) => {
            println!("per cell time: {ns} nano-seconds");
            println!("speed: {mcells} Mega cells/second");
        }
        None => println!("per cell time: below timer resolution"),
    }
    let (lo, hi) = outcome.final_state.u_range();
    println!("max-min= {:.6}", (hi - lo).as_f64());
    println!("=====");

    let opts = MontageOptions {
        timing: match (args.montage_timing, rates) {
            (true, Some((mcells_per_s, ns_per_cell))) => Some(Timing {
                seconds: outcome.seconds,
                ns_per_cell,
                mcells_per_s,
            }),
            _ => None,
        },
        ..MontageOptions::default()
    };
    let label = config.backend.label();
    render_montage(&outcome.snapshots, gene, config, &label, &opts, &out.join("montage.png"))?;
    let (rows, cols) = outcome.final_state.shape();
    for ext in ["pgm", "png"] {
        save_frame(&outcome.final_state.u, rows, cols, &out.join(format!("final_u.{ext}")))?;
        save_frame(&outcome.final_state.v, rows, cols, &out.join(format!("final_v.{ext}")))?;
    }
    println!("checksum: {}", rdcnn::checksum_hex(outcome.final_state.checksum()));
    println!("output: {}", out.display());
    Ok(())
}
