use proptest::prelude::*;
use sgg_autodiff::Tape;

proptest! {
    // softmax output is a probability vector: entries in [0,1], sum 1 +/- 1e-6
    #[test]
    fn softmax_is_probability_vector(xs in prop::collection::vec(-30.0f64..30.0, 1..40)) {
        let tape: Tape<f64> = Tape::new();
        let y = tape.vector(xs).softmax().unwrap().data();
        let mut total = 0.0;
        for v in &y {
            prop_assert!(*v >= 0.0 && *v <= 1.0);
            total += v;
        }
        prop_assert!((total - 1.0).abs() <= 1e-6, "sum = {total}");
    }

    // grad of an unused leaf is zero no matter the graph
    #[test]
    fn unreachable_leaf_gets_zero_grad(xs in prop::collection::vec(-5.0f64..5.0, 2..10)) {
        let tape: Tape<f64> = Tape::new();
        let unused = tape.vector(xs.clone());
        let used = tape.vector(xs);
        let loss = used.tanh().softmax().unwrap().nll_gather(&[0]).unwrap();
        tape.backward(loss).unwrap();
        prop_assert!(unused.grad().iter().all(|&g| g == 0.0));
    }
}
