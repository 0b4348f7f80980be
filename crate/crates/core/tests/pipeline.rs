use rdcnn::init::{init_center_square, init_full_random};
use rdcnn::kernels::evolve;
use rdcnn::sweep::{sweep_grid, Axis, SweepSpec};
use rdcnn::{initial_state, run, Backend, Gene, GeneField, Manifest, RunConfig};

fn config(backend: Backend) -> RunConfig {
    RunConfig {
        rows: 40,
        cols: 56,
        iter_max: 120,
        nssp: 4,
        seed: 9,
        backend,
        ..RunConfig::default()
    }
}

#[test]
fn backends_agree_through_run() {
    let gene = Gene::default();
    let reference = {
        let c = config(Backend::Reference);
        run(&c, &gene, initial_state::<f32>(&c, &gene, None).unwrap()).unwrap()
    };
    assert_eq!(reference.snapshots.labels(), &[0, 30, 60, 90, 120]);
    for backend in [
        Backend::blocked(),
        Backend::Blocked { tile_rows: 7, tile_cols: 13 },
        Backend::parallel(),
        Backend::Parallel { threads: 3 },
    ] {
        let c = config(backend);
        let out = run(&c, &gene, initial_state::<f32>(&c, &gene, None).unwrap()).unwrap();
        for k in 0..out.snapshots.len() {
            assert_eq!(out.snapshots.frame(k).checksum(), reference.snapshots.frame(k).checksum(), "{backend:?} {k}");
        }
    }
    let c = config(Backend::Shift);
    let shifted = run(&c, &gene, initial_state::<f32>(&c, &gene, None).unwrap()).unwrap();
    let (a, b) = (&shifted.final_state.u, &reference.final_state.u);
    let worst = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0f32, f32::max);
    assert!(worst < 1e-4, "{worst}");
}

#[test]
fn dynamics_commute_with_torus_translation() {
    let gene = Gene::default();
    let state = init_full_random::<f64>(24, 18, 4).unwrap();
    let shifted = state.cyclic_shift(5, -7);
    let a = evolve(state, &gene, Backend::Reference, 50).unwrap().cyclic_shift(5, -7);
    let b = evolve(shifted, &gene, Backend::Reference, 50).unwrap();
    assert_eq!(a.checksum(), b.checksum());
}

#[test]
fn manifest_round_trip_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut gene = Gene::default();
    gene.set(GeneField::Du, 0.4);
    let manifest = Manifest::new(gene, config(Backend::blocked()));
    let path = dir.path().join("manifest.txt");
    manifest.write(&path).unwrap();
    let back = Manifest::read(&path).unwrap();
    assert_eq!(back, manifest);

    let go = |m: &Manifest| {
        let init = initial_state::<f32>(&m.config, &m.gene, None).unwrap();
        run(&m.config, &m.gene, init).unwrap().final_state.checksum()
    };
    assert_eq!(go(&back), go(&manifest));
}

#[test]
fn sweep_cell_matches_a_plain_run() {
    let base = RunConfig { rows: 32, cols: 32, iter_max: 60, nssp: 2, seed: 1, ..RunConfig::default() };
    let spec = SweepSpec::new(
        "du:0.3,0.5".parse::<Axis>().unwrap(),
        "eps:0.1".parse::<Axis>().unwrap(),
        Gene::default(),
        base.clone(),
    );
    let result = sweep_grid::<f32>(&spec, None).unwrap();
    let gene = Gene { du: 0.5, eps: 0.1, ..Gene::default() };
    let init = init_center_square::<f32>(32, 32, 1).unwrap();
    let want = run(&base, &gene, init).unwrap().final_state.checksum();
    assert_eq!(result.cell(0, 1).checksum(), Some(want));
}
