use chaoskit::format::{
    expansion_from_json, expansion_to_json, kernel_from_json, kernel_to_json, read_expansion,
    read_kernel, write_expansion, write_kernel,
};
use chaoskit_core::chaos::ChaosExpansion;
use chaoskit_core::grid::{Grid, NoiseSource};
use chaoskit_core::kernel::StepKernel;
use proptest::prelude::*;
use rand::Rng;

fn random_symmetric(seed: u64, m: usize, order: usize) -> StepKernel {
    let mut rng = NoiseSource::new(seed).stream(0);
    let g = Grid::new(m).unwrap();
    StepKernel::from_fn(g, order, |_| rng.random_range(-1.0..1.0))
        .unwrap()
        .symmetrized()
}

#[test]
fn order_three_kernel_round_trips_through_a_file() {
    let k = random_symmetric(3, 5, 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    write_kernel(&path, &k).unwrap();
    assert_eq!(read_kernel(&path).unwrap(), k);
}

#[test]
fn expansion_round_trips_through_a_file() {
    let g = Grid::new(4).unwrap();
    let x = ChaosExpansion::new(
        g,
        vec![
            StepKernel::scalar(g, 0.25),
            random_symmetric(1, 4, 1),
            random_symmetric(2, 4, 2),
            random_symmetric(3, 4, 3),
        ],
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    write_expansion(&path, &x).unwrap();
    assert_eq!(read_expansion(&path).unwrap(), x);
}

#[test]
fn missing_file_is_an_io_error() {
    let err = read_kernel(std::path::Path::new("/nonexistent/k.json")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/k.json"));
}

proptest! {
    #[test]
    fn kernel_json_is_lossless(seed in any::<u64>(), m in 1usize..5, order in 0usize..4) {
        let k = random_symmetric(seed, m, order);
        prop_assert_eq!(kernel_from_json(&kernel_to_json(&k).unwrap()).unwrap(), k);
    }

    #[test]
    fn expansion_json_is_lossless(seed in any::<u64>(), m in 1usize..4, top in 0usize..4) {
        let g = Grid::new(m).unwrap();
        let kernels = (0..=top).map(|n| random_symmetric(seed ^ n as u64, m, n)).collect();
        let x = ChaosExpansion::new(g, kernels).unwrap();
        prop_assert_eq!(expansion_from_json(&expansion_to_json(&x).unwrap()).unwrap(), x);
    }
}
