use ncgp::algebra::{product_state, FiniteAlgebra, State};
use ncgp::distance::{distance_matrix, spectral_distance, DistanceResult};
use ncgp::khomology::{pairing_vector, FredholmModule};
use ncgp::operator::ComplexMatrix;
use ncgp::random::{random_separable_state, random_triple_with, rng, RandomTripleSpec};
use ncgp::triple::{amplified_two_point, lattice_line, point_character, product, pullback_module, two_point};
use ncgp::wasserstein::{k_lambda, product_space, w1, FiniteMetricSpace, Measure};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

const SWEEP_TOL: f64 = 1e-4;

fn unital_spec<R: Rng>(r: &mut R) -> RandomTripleSpec {
    let choices: [(&[usize], usize); 4] = [(&[1, 1], 1), (&[1, 1], 2), (&[2], 2), (&[1, 1, 1], 1)];
    let (blocks, mult) = choices[r.gen_range(0..choices.len())];
    RandomTripleSpec::new(blocks.to_vec(), mult, true)
}

fn nonunital_spec<R: Rng>(r: &mut R) -> RandomTripleSpec {
    let choices: [&[usize]; 3] = [&[1, 1], &[2], &[1, 1, 1]];
    RandomTripleSpec::new(choices[r.gen_range(0..choices.len())].to_vec(), 1, false)
}

fn d(t: &ncgp::triple::SpectralTriple, a: &State, b: &State) -> DistanceResult {
    spectral_distance(t, a, b, SWEEP_TOL).unwrap()
}

#[test]
fn equal_second_states_reduce_to_first_factor() {
    let mut r = rng(11);
    let slack = 3.0 * SWEEP_TOL;
    for trial in 0..40 {
        let (s1, s2) = (unital_spec(&mut r), unital_spec(&mut r));
        let t1 = random_triple_with(&mut r, &s1).unwrap();
        let t2 = random_triple_with(&mut r, &s2).unwrap();
        let t = product(&t1, &t2).unwrap();
        let (_, phi1, phi2) = random_separable_state(t1.algebra(), t2.algebra(), &mut r);
        let psi1 = State::random(t1.algebra(), &mut r);
        let full = d(&t, &product_state(&phi1, &phi2), &product_state(&psi1, &phi2));
        let first = d(&t1, &phi1, &psi1);
        assert_eq!(full.is_infinite(), first.is_infinite(), "trial {trial}: {full} vs {first}");
        if !first.is_infinite() {
            assert!(full.lower <= first.upper + slack, "trial {trial}: {full} vs {first}");
            assert!(full.upper >= first.lower - slack, "trial {trial}: {full} vs {first}");
        }
    }
}

#[test]
fn sum_bound_holds_without_units() {
    let mut r = rng(5);
    let slack = 3.0 * SWEEP_TOL;
    for trial in 0..40 {
        let s1 = nonunital_spec(&mut r);
        let s2 = if trial % 2 == 0 { unital_spec(&mut r) } else { nonunital_spec(&mut r) };
        if s1.hilbert_dim() * s2.hilbert_dim() > 24 {
            continue;
        }
        let t1 = random_triple_with(&mut r, &s1).unwrap();
        let t2 = random_triple_with(&mut r, &s2).unwrap();
        assert!(!t1.is_unital());
        let t = product(&t1, &t2).unwrap();
        let (phi, phi1, phi2) = random_separable_state(t1.algebra(), t2.algebra(), &mut r);
        let (psi, psi1, psi2) = random_separable_state(t1.algebra(), t2.algebra(), &mut r);
        let full = d(&t, &phi, &psi);
        let (a, b) = (d(&t1, &phi1, &psi1), d(&t2, &phi2, &psi2));
        assert!(full.lower <= a.upper + b.upper + slack, "trial {trial}: {full} vs {a} + {b}");
    }
}

/// Shortest-path closure, so slightly inexact distances still form a metric.
fn metric_closure(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i][k] + m[k][j];
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
    m
}

#[test]
fn lattice_distances_form_a_metric_that_bounds_mixed_states() {
    let tol = 1e-6;
    let t = lattice_line(5, 1.0).unwrap();
    let line = FiniteAlgebra::commutative(5);
    let points: Vec<State> = (0..5).map(|k| State::point(&line, k).unwrap()).collect();
    let m = distance_matrix(&t, &points, tol).unwrap();
    for i in 0..5 {
        assert_eq!(m[i][i].upper, 0.0);
        for j in 0..5 {
            assert!(!m[i][j].is_infinite());
            assert_eq!(m[i][j].lower, m[j][i].lower);
            for k in 0..5 {
                assert!(m[i][k].lower <= m[i][j].upper + m[j][k].upper + 2.0 * tol, "({i},{j},{k})");
            }
        }
    }
    // neighbouring points are strictly closer than far ones
    assert!(m[0][1].lower < m[0][4].lower);

    let upper: Vec<Vec<f64>> = m.iter().map(|row| row.iter().map(|x| x.upper).collect()).collect();
    let coords = (0..5).map(|k| vec![k as f64]).collect();
    let labels = (0..5).map(|k| k.to_string()).collect();
    let space = FiniteMetricSpace::new(labels, coords, metric_closure(upper)).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let w = w1(&space, &Measure::dirac(5, i).unwrap(), &Measure::dirac(5, j).unwrap()).unwrap();
            assert!((w.value - space.dist(i, j)).abs() <= 1e-10);
        }
    }
    // every feasible element is 1-Lipschitz for the point metric, so the
    // distance between mixtures cannot exceed their transport cost
    let mut r = rng(3);
    for _ in 0..20 {
        let mut wa: Vec<f64> = (0..5).map(|_| r.gen::<f64>()).collect();
        let mut wb: Vec<f64> = (0..5).map(|_| r.gen::<f64>()).collect();
        let (sa, sb): (f64, f64) = (wa.iter().sum(), wb.iter().sum());
        wa.iter_mut().for_each(|v| *v /= sa);
        wb.iter_mut().for_each(|v| *v /= sb);
        let dist = spectral_distance(
            &t,
            &State::from_weights(&line, &wa).unwrap(),
            &State::from_weights(&line, &wb).unwrap(),
            tol,
        )
        .unwrap();
        let w = w1(&space, &Measure::new(wa).unwrap(), &Measure::new(wb).unwrap()).unwrap();
        assert!(dist.lower <= w.value + 2.0 * tol, "{dist} above transport cost {}", w.value);
    }
}

fn normalized(raw: Vec<f64>) -> Measure {
    let s: f64 = raw.iter().sum();
    Measure::new(raw.into_iter().map(|v| v / s).collect()).unwrap()
}

fn line_and_measures(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-3.0..3.0f64, n),
        prop::collection::vec(0.01..1.0f64, n),
        prop::collection::vec(0.01..1.0f64, n),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_transport_is_sandwiched(
        (x, a1, b1) in (1usize..=6).prop_flat_map(line_and_measures),
        (y, a2, b2) in (1usize..=6).prop_flat_map(line_and_measures),
    ) {
        let s1 = FiniteMetricSpace::line(&x).unwrap();
        let s2 = FiniteMetricSpace::line(&y).unwrap();
        let (mu1, nu1, mu2, nu2) = (normalized(a1), normalized(b1), normalized(a2), normalized(b2));
        let w_1 = w1(&s1, &mu1, &nu1).unwrap().value;
        let w_2 = w1(&s2, &mu2, &nu2).unwrap().value;
        let w = w1(&product_space(&s1, &s2).unwrap(), &mu1.product(&mu2), &nu1.product(&nu2)).unwrap().value;
        let pyth = w_1.hypot(w_2);
        prop_assert!(pyth - 1e-8 <= w, "{pyth} > {w}");
        prop_assert!(w <= std::f64::consts::SQRT_2 * pyth + 1e-8, "{w} > √2·{pyth}");
    }

    #[test]
    fn transport_between_points_is_the_metric(
        pts in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 2), 2..8),
        i in 0usize..8,
        j in 0usize..8,
    ) {
        let n = pts.len();
        let (i, j) = (i % n, j % n);
        let space = FiniteMetricSpace::euclidean(pts).unwrap();
        let w = w1(&space, &Measure::dirac(n, i).unwrap(), &Measure::dirac(n, j).unwrap()).unwrap();
        prop_assert!((w.value - space.dist(i, j)).abs() <= 1e-10);
    }
}

#[test]
fn square_ratio_sweeps_the_whole_interval() {
    let square = product_space(&FiniteMetricSpace::line(&[0.0, 1.0]).unwrap(), &FiniteMetricSpace::line(&[0.0, 1.0]).unwrap())
        .unwrap();
    let origin = Measure::dirac(2, 0).unwrap();
    let mut last = f64::INFINITY;
    for step in 1..100 {
        let lambda = step as f64 / 100.0;
        let phi = Measure::bernoulli(lambda).unwrap();
        let w_1 = w1(&FiniteMetricSpace::line(&[0.0, 1.0]).unwrap(), &phi, &origin).unwrap().value;
        let w = w1(&square, &phi.product(&phi), &origin.product(&origin)).unwrap().value;
        let ratio = w / w_1.hypot(w_1);
        assert!((ratio - k_lambda(lambda)).abs() <= 1e-9, "λ={lambda}: {ratio}");
        assert!(ratio < last && ratio > 1.0 && ratio < std::f64::consts::SQRT_2);
        last = ratio;
    }
}

#[test]
fn single_point_factor_is_isometric() {
    let s = FiniteMetricSpace::euclidean(vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![1.0, -1.0]]).unwrap();
    let p = product_space(&s, &FiniteMetricSpace::line(&[7.0]).unwrap()).unwrap();
    assert_eq!(p.len(), 3);
    for i in 0..3 {
        for j in 0..3 {
            assert!((p.dist(i, j) - s.dist(i, j)).abs() <= 1e-15);
        }
    }
}

fn shuffled(m: &FredholmModule, r: &mut impl Rng) -> FredholmModule {
    let n = m.f().rows();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(r);
    let u = ComplexMatrix::identity(n).permute(&perm).unwrap();
    m.conjugate(&u).unwrap()
}

#[test]
fn pairing_is_invariant_under_permutations() {
    let c2 = FiniteAlgebra::commutative(2);
    let modules = [
        FredholmModule::from_triple(&two_point(3.0).unwrap()).unwrap(),
        FredholmModule::from_triple(&amplified_two_point(0.5).unwrap()).unwrap(),
        pullback_module(&point_character(&c2, 0).unwrap()).unwrap(),
        pullback_module(&point_character(&c2, 1).unwrap()).unwrap(),
    ];
    let mut r = rng(9);
    for m in &modules {
        let (p, q) = pairing_vector(m).unwrap();
        for _ in 0..20 {
            let (ps, qs) = pairing_vector(&shuffled(m, &mut r)).unwrap();
            assert!((ps - p).abs() <= 1e-10 && (qs - q).abs() <= 1e-10);
        }
    }
}

#[test]
fn point_modules_add_up_to_the_amplified_module() {
    let c2 = FiniteAlgebra::commutative(2);
    let plus = pullback_module(&point_character(&c2, 0).unwrap()).unwrap();
    let minus = pullback_module(&point_character(&c2, 1).unwrap()).unwrap();
    let sum = pairing_vector(&FredholmModule::direct_sum(&plus, &minus).unwrap()).unwrap();
    let f2 = pairing_vector(&FredholmModule::from_triple(&amplified_two_point(2.0).unwrap()).unwrap()).unwrap();
    assert!((sum.0 - f2.0).abs() <= 1e-10 && (sum.1 - f2.1).abs() <= 1e-10);
    assert!((sum.0 - 1.0).abs() <= 1e-10 && (sum.1 - 1.0).abs() <= 1e-10);
}
