//! Fixtures shared by the criterion benches in `benches/`.

use rdcnn::init::init_center_square;
use rdcnn::kernels::{Backend, StepBuffers};
use rdcnn::{FitzHughNagumo, Gene, Real};

/// Backends timed by the step bench.
pub fn backends() -> [Backend; 4] {
    [Backend::Reference, Backend::Shift, Backend::blocked(), Backend::parallel()]
}

/// Default-gene center-square state on an `n x n` lattice, warmed by a few
/// steps so the seed block has spread beyond its initial values.
pub fn fixture<T: Real>(n: usize) -> (StepBuffers<T>, FitzHughNagumo<T>) {
    let gene = Gene::default();
    let state = init_center_square::<T>(n, n, 42).expect("lattice at least 11x11");
    let state = rdcnn::kernels::evolve(state, &gene, Backend::blocked(), 20).expect("valid backend");
    (StepBuffers::new(state), FitzHughNagumo::new(&gene))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_finite() {
        let (buffers, _) = fixture::<f32>(32);
        assert!(buffers.front().is_finite());
        assert_eq!(buffers.front().shape(), (32, 32));
    }
}
