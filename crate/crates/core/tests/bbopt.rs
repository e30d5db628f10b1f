use nalgebra::DMatrix;
use proptest::prelude::*;

use expmath::bbopt::{
    bb_minimize, finite_difference_gradient, norm, steepest_descent_baseline, Objective, Quadratic, QuarticBowl,
    Rosenbrock, Safeguard, Variant,
};

fn spd(entries: &[f64], shift: f64) -> (Quadratic, f64, f64) {
    let m = DMatrix::from_row_slice(5, 5, entries);
    let a = m.transpose() * &m + DMatrix::identity(5, 5) * shift;
    let eig = a.clone().symmetric_eigen().eigenvalues;
    let q = Quadratic::new(5, a.transpose().as_slice().to_vec()).unwrap();
    (q, eig.min(), eig.max())
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Bb1), Just(Variant::Bb2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bb_steps_bracketed_by_inverse_eigenvalues(
        entries in proptest::collection::vec(-1.0f64..1.0, 25),
        shift in 0.01f64..2.0,
        x0 in proptest::collection::vec(-10.0f64..10.0, 5),
        v in variant(),
    ) {
        let (q, lmin, lmax) = spd(&entries, shift);
        let r = bb_minimize(&q, &x0, 1e-9, 20_000, v, Safeguard::off()).unwrap();
        for t in r.trace.iter().skip(1) {
            if let Some(g) = t.gamma {
                prop_assert!(g >= (1.0 / lmax) * (1.0 - 1e-9) && g <= (1.0 / lmin) * (1.0 + 1e-9),
                    "γ = {} outside [{}, {}]", g, 1.0 / lmax, 1.0 / lmin);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences(p in proptest::collection::vec(-2.0f64..2.0, 3)) {
        let problems: Vec<(Box<dyn Objective>, Vec<f64>)> = vec![
            (Box::new(Quadratic::diagonal(&[1.0, 100.0])), p[..2].to_vec()),
            (Box::new(Quadratic::new(2, vec![2.0, 0.5, 0.5, 1.0]).unwrap()), p[..2].to_vec()),
            (Box::new(Rosenbrock::default()), p[..2].to_vec()),
            (Box::new(QuarticBowl { c: vec![1.0, 2.0, 3.0] }), p.clone()),
        ];
        for (f, x) in problems {
            let g = f.gradient(&x);
            let fd = finite_difference_gradient(f.as_ref(), &x, 1e-6);
            let scale = norm(&g).max(1.0);
            for (a, b) in g.iter().zip(&fd) {
                prop_assert!((a - b).abs() <= 1e-6 * scale, "{}: {} vs {}", f.name(), a, b);
            }
        }
    }

    #[test]
    fn scaling_the_objective_leaves_iterates_alone(
        entries in proptest::collection::vec(-1.0f64..1.0, 25),
        c in prop_oneof![Just(0.25f64), Just(0.5), Just(2.0), Just(4.0), Just(8.0)],
        v in variant(),
    ) {
        // powers of two keep every product exact, so the sequences agree bit for bit
        let (q, _, _) = spd(&entries, 0.5);
        let qc = q.scaled(c);
        let x0 = [1.0, -2.0, 3.0, -4.0, 5.0];
        let a = bb_minimize(&q, &x0, 1e-8, 5000, v, Safeguard::off()).unwrap();
        let b = bb_minimize(&qc, &x0, 1e-8 * c, 5000, v, Safeguard::off()).unwrap();
        prop_assert_eq!(a.iterations, b.iterations);
        prop_assert_eq!(&a.x, &b.x);
        for (s, t) in a.trace.iter().zip(&b.trace) {
            if let (Some(g1), Some(g2)) = (s.gamma, t.gamma) {
                prop_assert!((g1 / c - g2).abs() <= 1e-12 * g2.abs());
            }
        }
    }
}

#[test]
fn ill_conditioned_diagonal() {
    let f = Quadratic::diagonal(&[1.0, 100.0]);
    let sd = steepest_descent_baseline(&f, &[100.0, 1.0], 1e-8, 100_000).unwrap();
    assert!(sd.converged);
    for v in [Variant::Bb1, Variant::Bb2] {
        let r = bb_minimize(&f, &[100.0, 1.0], 1e-8, 100_000, v, Safeguard::off()).unwrap();
        assert!(r.converged && r.iterations < sd.iterations, "{v:?}: {} vs {}", r.iterations, sd.iterations);
    }
}

#[test]
fn trace_has_one_entry_per_iterate() {
    let f = QuarticBowl { c: vec![1.0, -1.0] };
    let r = bb_minimize(&f, &[0.0, 0.0], 1e-10, 1000, Variant::Bb2, Safeguard::default()).unwrap();
    assert!(r.converged);
    assert_eq!(r.trace.len(), r.iterations + 1);
    assert!(r.trace.last().unwrap().gamma.is_none());
}
