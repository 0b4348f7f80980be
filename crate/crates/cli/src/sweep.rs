use rdcnn::config::Precision;
use rdcnn::sweep::{sweep_grid, Axis, SeedMode, SweepError, SweepResult, SweepSpec};
use rdcnn::{validate_config, Real};

use crate::args::SweepArgs;
use crate::error::CliError;

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    let axis = |s: &str, which: &str| {
        s.parse::<Axis>()
            .map_err(|e| CliError::Validation(format!("--{which}: {e}")))
    };
    let (x, y) = (axis(&args.x, "x")?, axis(&args.y, "y")?);
    let manifest = args.run.resolve()?;
    let config = validate_config(manifest.config.clone(), &manifest.gene)?;

    let mut spec = SweepSpec::new(x, y, manifest.gene, config);
    if args.per_cell_seed {
        spec.seed_mode = SeedMode::PerCell;
    }
    spec.concurrent = args.concurrent;
    let t = &mut spec.thresholds;
    let overrides = [
        (&mut t.homogeneity, args.homogeneity),
        (&mut t.floor, args.floor),
        (&mut t.activity, args.activity),
        (&mut t.growth, args.growth),
        (&mut t.dip, args.dip),
    ];
    for (slot, value) in overrides {
        if let Some(v) = value {
            *slot = v;
        }
    }
    spec.validate().map_err(sweep_error)?;

    let image = crate::load_input(&spec.config)?;
    let out = crate::out_dir(&args.out)?;
    manifest.write(&out.join("manifest.txt"))?;
    match spec.config.precision {
        Precision::Single => finish(sweep_grid::<f32>(&spec, image.as_ref()).map_err(sweep_error)?, args, &out),
        Precision::Double => finish(sweep_grid::<f64>(&spec, image.as_ref()).map_err(sweep_error)?, args, &out),
    }
}

fn sweep_error(e: SweepError) -> CliError {
    match e {
        SweepError::Image(img) => img.into(),
        SweepError::Run { source, .. } => source.into(),
        other => CliError::Validation(other.to_string()),
    }
}

fn finish<T: Real>(result: SweepResult<T>, args: &SweepArgs, out: &std::path::Path) -> Result<(), CliError> {
    result.write_dir(out, args.tile_max)?;
    let (x, y) = (result.spec.x.field.name(), result.spec.y.field.name());
    for cell in &result.cells {
        let stats = match cell.label.blow_up_iteration {
            Some(k) => format!("blow-up at iteration {k}"),
            None => format!(
                "max-min= {:.6}  active= {:.4}",
                cell.label.final_range,
                cell.label.final_active_fraction().unwrap_or(0.0)
            ),
        };
        println!(
            "{x}={} {y}={}: {} ({stats})",
            cell.x_value, cell.y_value, cell.label.regime
        );
    }
    println!("output: {}", out.display());
    Ok(())
}
