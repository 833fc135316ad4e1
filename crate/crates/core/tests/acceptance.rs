//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; the process fails if any criterion does.

use std::time::{Duration, Instant};

use ncgp::algebra::{product_state, slice_map, AlgebraElement, FiniteAlgebra, Representation, Side, State};
use ncgp::distance::{spectral_distance, DistanceResult};
use ncgp::khomology::{chern_pairing, pairing_vector, FredholmModule, Projection};
use ncgp::operator::{op_norm, parity_split, tensor, ComplexMatrix, C64};
use ncgp::random::{random_separable_state, random_triple_with, rng, RandomTripleSpec};
use ncgp::triple::{
    amplified_two_point, point_character, product, pullback_module, two_point, two_sheeted_lattice,
    SpectralTriple,
};
use ncgp::wasserstein::{k_lambda, product_space, w1, FiniteMetricSpace, Measure};
use rand::Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: ncgp::Error) -> String {
    e.to_string()
}

fn c2() -> FiniteAlgebra {
    FiniteAlgebra::commutative(2)
}

fn point(k: usize) -> State {
    State::point(&c2(), k).unwrap()
}

fn dist(t: &SpectralTriple, a: &State, b: &State, tol: f64) -> Result<DistanceResult, String> {
    spectral_distance(t, a, b, tol).map_err(err)
}

/// Both ends of the bracket within `tol` of `expected`.
fn near(d: &DistanceResult, expected: f64, tol: f64) -> bool {
    (d.lower - expected).abs() <= tol && (d.upper - expected).abs() <= tol
}

fn two_point_distance() -> Outcome {
    let mut worst: f64 = 0.0;
    for lambda in [0.5, 1.0, 3.0] {
        let start = Instant::now();
        let d = dist(&two_point(lambda).map_err(err)?, &point(0), &point(1), 1e-8)?;
        check(near(&d, lambda, 1e-6), || format!("λ={lambda}: got {d}"))?;
        check(start.elapsed() < Duration::from_secs(1), || format!("λ={lambda} took {:?}", start.elapsed()))?;
        worst = worst.max((d.value() - lambda).abs());
    }
    Ok(format!("max error {worst:.1e}"))
}

fn amplified_distance() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for mu in [0.5, 1.0, 2.0] {
        let d = dist(&amplified_two_point(mu).map_err(err)?, &point(0), &point(1), 1e-8)?;
        check(near(&d, mu, 1e-6), || format!("μ={mu}: got {d}"))?;
        worst = worst.max((d.value() - mu).abs());
    }
    check(start.elapsed() < Duration::from_secs(1), || format!("took {:?}", start.elapsed()))?;
    Ok(format!("max error {worst:.1e}"))
}

fn independence_of_lambda() -> Outcome {
    let pp = product_state(&point(0), &point(0));
    let mm = product_state(&point(1), &point(1));
    let mut worst: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for lambda in [0.1, 1.0, 10.0] {
        for mu in [1.0, 2.0] {
            let start = Instant::now();
            let t1 = two_point(lambda).map_err(err)?;
            let t2 = amplified_two_point(mu).map_err(err)?;
            let t = product(&t1, &t2).map_err(err)?;
            let d = dist(&t, &pp, &mm, 1e-7)?;
            check(near(&d, mu, 1e-5), || format!("λ={lambda}, μ={mu}: got {d}"))?;
            check(start.elapsed() < Duration::from_secs(5), || format!("λ={lambda}, μ={mu} took {:?}", start.elapsed()))?;
            let d1 = dist(&t1, &point(0), &point(1), 1e-8)?.value();
            let d2 = dist(&t2, &point(0), &point(1), 1e-8)?.value();
            let ratio = d.value() / d1.hypot(d2);
            let formula = mu / lambda.hypot(mu);
            check((ratio - formula).abs() <= 1e-5, || format!("ratio {ratio} vs {formula}"))?;
            worst = worst.max((d.value() - mu).abs());
            worst_ratio = worst_ratio.max((ratio - formula).abs());
        }
    }
    Ok(format!("max error {worst:.1e}, ratio error {worst_ratio:.1e}"))
}

/// Largest singular value of a real 2×2 matrix, in closed form.
fn norm2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let s = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    ((s + (s * s - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
}

/// With `a₁ − a₃ = 1` the commutator norm is `max(‖P‖, ‖Q‖)` where `Q`
/// only involves `a₂, a₄` and vanishes at `a₂ = a₄ = 0`, while
/// `P = [[2a₁, 1/λ], [0, 2(a₁ − 1)]]`. The distance is `1 / min ‖P‖`,
/// found by a dense scan followed by golden-section refinement.
fn mixed_distance_oracle(lambda: f64) -> f64 {
    let f = |a1: f64| norm2x2(2.0 * a1, 1.0 / lambda, 0.0, 2.0 * (a1 - 1.0));
    let (mut best, mut arg) = (f64::INFINITY, 0.0);
    for k in 0..=4000 {
        let a1 = -1.0 + 3.0 * k as f64 / 4000.0;
        let v = f(a1);
        if v < best {
            best = v;
            arg = a1;
        }
    }
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (arg - 1e-3, arg + 1e-3);
    while hi - lo > 1e-12 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    1.0 / f(0.5 * (lo + hi))
}

fn mixed_bound() -> Outcome {
    let pp = product_state(&point(0), &point(0));
    let mp = product_state(&point(1), &point(0));
    let mut parts = Vec::new();
    for lambda in [2.0, 5.0, 10.0] {
        let start = Instant::now();
        let t = product(&two_point(lambda).map_err(err)?, &amplified_two_point(1.0).map_err(err)?).map_err(err)?;
        let d = dist(&t, &pp, &mp, 1e-7)?;
        let bound = 2.0 * lambda / (1.0 + lambda);
        check(d.upper <= bound + 1e-5, || format!("λ={lambda}: {d} exceeds {bound}"))?;
        check(d.upper < lambda, || format!("λ={lambda}: {d} not below λ"))?;
        let oracle = mixed_distance_oracle(lambda);
        check(near(&d, oracle, 1e-5), || format!("λ={lambda}: {d} vs oracle {oracle}"))?;
        check(start.elapsed() < Duration::from_secs(5), || format!("λ={lambda} took {:?}", start.elapsed()))?;
        parts.push(format!("λ={lambda}: {:.6} ≤ {bound:.6}", d.value()));
    }
    Ok(parts.join(", "))
}

fn pullback_infinite() -> Outcome {
    let start = Instant::now();
    for k in 0..2 {
        let module = pullback_module(&point_character(&c2(), k).map_err(err)?).map_err(err)?;
        let t = module.as_triple().map_err(err)?;
        let d = dist(&t, &point(0), &point(1), 1e-6)?;
        check(d.is_infinite(), || format!("F{}: got {d}", if k == 0 { "+" } else { "-" }))?;
    }
    check(start.elapsed() < Duration::from_secs(1), || format!("took {:?}", start.elapsed()))?;
    Ok("status=infinite for F+ and F-".into())
}

fn wasserstein_square() -> Outcome {
    let start = Instant::now();
    let seg = FiniteMetricSpace::line(&[0.0, 1.0]).map_err(err)?;
    let square = product_space(&seg, &seg).map_err(err)?;
    let zero = Measure::bernoulli(0.0).map_err(err)?;
    let zero2 = zero.product(&zero);
    let ratio_at = |lambda: f64| -> Result<(f64, f64, f64), String> {
        let m = Measure::bernoulli(lambda).map_err(err)?;
        let w_1 = w1(&seg, &m, &zero).map_err(err)?.value;
        let w = w1(&square, &m.product(&m), &zero2).map_err(err)?.value;
        Ok((w_1, w, w / w_1.hypot(w_1)))
    };
    let mut worst: f64 = 0.0;
    for k in 1..=9 {
        let lambda = k as f64 / 10.0;
        let (w_1, w, ratio) = ratio_at(lambda)?;
        let claimed = std::f64::consts::SQRT_2 * lambda * k_lambda(lambda);
        check((w_1 - lambda).abs() <= 1e-9, || format!("λ={lambda}: W₁={w_1}"))?;
        check((w - claimed).abs() <= 1e-9, || format!("λ={lambda}: W={w} vs {claimed}"))?;
        check((ratio - k_lambda(lambda)).abs() <= 1e-9, || format!("λ={lambda}: ratio {ratio}"))?;
        worst = worst.max((w - claimed).abs());
    }
    let (_, _, at_one) = ratio_at(1.0)?;
    let (_, _, near_zero) = ratio_at(1e-9)?;
    check((at_one - 1.0).abs() <= 1e-9, || format!("ratio at λ=1 is {at_one}"))?;
    check((near_zero - std::f64::consts::SQRT_2).abs() <= 1e-6, || format!("ratio at λ→0 is {near_zero}"))?;
    check(start.elapsed() < Duration::from_secs(1), || format!("took {:?}", start.elapsed()))?;
    Ok(format!("max error {worst:.1e}, ratio range [{at_one:.9}, {near_zero:.9}]"))
}

const UNITAL_FACTORS: [(&[usize], usize); 4] = [(&[1, 1], 1), (&[1, 1], 2), (&[2], 2), (&[1, 1, 1], 1)];

fn product_inequalities() -> Outcome {
    let start = Instant::now();
    let tol = 1e-4;
    let slack = 3.0 * tol;
    let mut r = rng(2024);
    let mut infinite = 0;
    for trial in 0..200 {
        let pick = |r: &mut rand_chacha::ChaCha8Rng| {
            let (blocks, mult) = UNITAL_FACTORS[r.gen_range(0..UNITAL_FACTORS.len())];
            RandomTripleSpec::new(blocks.to_vec(), mult, true)
        };
        let (s1, s2) = (pick(&mut r), pick(&mut r));
        let t1 = random_triple_with(&mut r, &s1).map_err(err)?;
        let t2 = random_triple_with(&mut r, &s2).map_err(err)?;
        let t = product(&t1, &t2).map_err(err)?;
        let (phi, phi1, phi2) = random_separable_state(t1.algebra(), t2.algebra(), &mut r);
        let (psi, psi1, psi2) = random_separable_state(t1.algebra(), t2.algebra(), &mut r);
        let d = dist(&t, &phi, &psi, tol)?;
        let d1 = dist(&t1, &phi1, &psi1, tol)?;
        let d2 = dist(&t2, &phi2, &psi2, tol)?;
        if d.is_infinite() || d1.is_infinite() || d2.is_infinite() {
            infinite += 1;
        }
        let ctx = || format!("trial {trial}: d={d}, d1={d1}, d2={d2}");
        check(d.lower <= d1.upper + d2.upper + slack, || format!("upper sum bound fails, {}", ctx()))?;
        check(d.upper >= d1.lower.hypot(d2.lower) - slack, || format!("Pythagoras lower bound fails, {}", ctx()))?;
        check(
            d.lower <= std::f64::consts::SQRT_2 * d1.upper.hypot(d2.upper) + slack,
            || format!("√2 bound fails, {}", ctx()),
        )?;
    }
    check(start.elapsed() < Duration::from_secs(300), || format!("took {:?}", start.elapsed()))?;
    Ok(format!("200 instances, 0 violations ({infinite} with an infinite distance), {:.1?}", start.elapsed()))
}

fn random_matrix<R: Rng>(r: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(r.sample(StandardNormal), r.sample(StandardNormal)))
}

fn random_element<R: Rng>(r: &mut R, alg: &FiniteAlgebra, self_adjoint: bool) -> AlgebraElement {
    let blocks = alg
        .blocks()
        .iter()
        .map(|&n| {
            let m = random_matrix(r, n);
            if self_adjoint {
                m.hermitian_part()
            } else {
                m
            }
        })
        .collect();
    AlgebraElement::new(alg.clone(), blocks).unwrap()
}

fn comm_norm(d: &ComplexMatrix, a: &ComplexMatrix) -> f64 {
    op_norm(&(&(d * a) - &(a * d))).unwrap()
}

const MIXED_FACTORS: [(&[usize], usize, bool); 5] =
    [(&[1, 1], 1, true), (&[1, 1], 2, true), (&[2], 2, true), (&[1, 1, 1], 1, true), (&[1, 1], 1, false)];

fn norm_inequalities() -> Outcome {
    let start = Instant::now();
    let tol = 1e-9;
    let mut r = rng(7);
    let pick = |r: &mut rand_chacha::ChaCha8Rng, unital_only: bool| loop {
        let (b, m, u) = MIXED_FACTORS[r.gen_range(0..MIXED_FACTORS.len())];
        if u || !unital_only {
            break RandomTripleSpec::new(b.to_vec(), m, u);
        }
    };
    let mut worst = [0.0_f64; 3];

    for trial in 0..1000 {
        let spec = pick(&mut r, false);
        let t1 = random_triple_with(&mut r, &spec).map_err(err)?;
        let spec = pick(&mut r, false);
        let t2 = random_triple_with(&mut r, &spec).map_err(err)?;
        let t = product(&t1, &t2).map_err(err)?;
        let a1 = t1.representation().apply(&random_element(&mut r, t1.algebra(), true)).map_err(err)?;
        let a2 = t2.representation().apply(&random_element(&mut r, t2.algebra(), true)).map_err(err)?;
        let id1 = ComplexMatrix::identity(t1.hilbert_dim());
        let id2 = ComplexMatrix::identity(t2.hilbert_dim());
        let a = &tensor(&a1, &id2) + &tensor(&id1, &a2);
        let lhs = comm_norm(t.dirac().matrix(), &a).powi(2);
        let rhs = comm_norm(t1.dirac().matrix(), &a1).powi(2) + comm_norm(t2.dirac().matrix(), &a2).powi(2);
        let e = (lhs - rhs).abs() / rhs.max(1.0);
        worst[0] = worst[0].max(e);
        check(e <= tol, || format!("Pythagoras trial {trial}: {lhs} vs {rhs}"))?;
    }

    for trial in 0..1000 {
        let n = 2 * r.gen_range(1..=4);
        let mut signs: Vec<f64> = (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        signs.rotate_left(r.gen_range(0..n));
        let gamma = ComplexMatrix::real_diag(&signs);
        let (even, _) = parity_split(&random_matrix(&mut r, n), &gamma).map_err(err)?;
        let (_, odd) = parity_split(&random_matrix(&mut r, n), &gamma).map_err(err)?;
        let sum = op_norm(&(&odd + &even)).map_err(err)?;
        let m = op_norm(&odd).map_err(err)?.max(op_norm(&even).map_err(err)?);
        worst[1] = worst[1].max(m - sum);
        check(m <= sum + tol * sum.max(1.0), || format!("odd/even trial {trial}: max {m} > {sum}"))?;
    }

    for trial in 0..1000 {
        let spec = pick(&mut r, true);
        let t1 = random_triple_with(&mut r, &spec).map_err(err)?;
        let spec = pick(&mut r, true);
        let t2 = random_triple_with(&mut r, &spec).map_err(err)?;
        let t = product(&t1, &t2).map_err(err)?;
        let a = random_element(&mut r, t.algebra(), false);
        let pa = t.representation().apply(&a).map_err(err)?;
        let phi1 = State::random(t1.algebra(), &mut r);
        let phi2 = State::random(t2.algebra(), &mut r);
        let a1 = slice_map(&a, &phi2, Side::Right).map_err(err)?;
        let a2 = slice_map(&a, &phi1, Side::Left).map_err(err)?;
        let id2 = ComplexMatrix::identity(t2.hilbert_dim());
        let d1 = tensor(t1.dirac().matrix(), &id2);
        let gd2 = tensor(t1.grading().unwrap(), t2.dirac().matrix());
        let l1 = comm_norm(t1.dirac().matrix(), &t1.representation().apply(&a1).map_err(err)?);
        let r1 = comm_norm(&d1, &pa);
        let l2 = comm_norm(t2.dirac().matrix(), &t2.representation().apply(&a2).map_err(err)?);
        let r2 = comm_norm(&gd2, &pa);
        let full = comm_norm(t.dirac().matrix(), &pa);
        worst[2] = worst[2].max(l1 - r1).max(l2 - r2);
        check(l1 <= r1 + tol * r1.max(1.0), || format!("slice trial {trial}: {l1} > {r1}"))?;
        check(l2 <= r2 + tol * r2.max(1.0), || format!("slice trial {trial}: {l2} > {r2}"))?;
        check(r1.max(r2) <= full + tol * full.max(1.0), || format!("commutator trial {trial}: {} > {full}", r1.max(r2)))?;
    }
    check(start.elapsed() < Duration::from_secs(30), || format!("took {:?}", start.elapsed()))?;
    Ok(format!(
        "3×1000 trials; worst excess {:.1e}, {:.1e}, {:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn khomology_table() -> Outcome {
    let start = Instant::now();
    let int = |v: f64, want: f64, what: &str| check((v - want).abs() <= 1e-8, || format!("{what}: {v} vs {want}"));
    let f_plus = pullback_module(&point_character(&c2(), 0).map_err(err)?).map_err(err)?;
    let f_minus = pullback_module(&point_character(&c2(), 1).map_err(err)?).map_err(err)?;
    let (a, b) = pairing_vector(&f_plus).map_err(err)?;
    int(a, 1.0, "⟨F+, p+⟩")?;
    int(b, 0.0, "⟨F+, p-⟩")?;
    let (a, b) = pairing_vector(&f_minus).map_err(err)?;
    int(a, 0.0, "⟨F-, p+⟩")?;
    int(b, 1.0, "⟨F-, p-⟩")?;
    let f1 = FredholmModule::from_triple(&two_point(1.0).map_err(err)?).map_err(err)?;
    let (a, b) = pairing_vector(&f1).map_err(err)?;
    int(a, 1.0, "⟨F1, p+⟩")?;
    int(b, -1.0, "⟨F1, p-⟩")?;
    let f2 = FredholmModule::from_triple(&amplified_two_point(1.0).map_err(err)?).map_err(err)?;
    let (a, b) = pairing_vector(&f2).map_err(err)?;
    int(a, 1.0, "⟨F2, p+⟩")?;
    int(b, 1.0, "⟨F2, p-⟩")?;
    let generator = pullback_module(&Representation::diagonal(1)).map_err(err)?;
    let one = AlgebraElement::unit(&FiniteAlgebra::commutative(1));
    let rank = chern_pairing(&generator, &Projection::scalar(one).map_err(err)?).map_err(err)?;
    int(rank, 1.0, "rank pairing over ℂ")?;
    check(start.elapsed() < Duration::from_secs(1), || format!("took {:?}", start.elapsed()))?;
    Ok("δ table, [F1]=(1,-1), [F2]=(1,1), rank 1".into())
}

fn two_sheeted_line() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut diag_at_two = Vec::new();
    for n in [5, 9] {
        let line = FiniteAlgebra::commutative(n);
        for lambda in [0.5, 2.0, 10.0] {
            let t = two_sheeted_lattice(lambda, n, 1.0).map_err(err)?;
            for x in 0..n {
                for y in 0..n {
                    let up = product_state(&point(0), &State::point(&line, x).map_err(err)?);
                    let down = product_state(&point(1), &State::point(&line, y).map_err(err)?);
                    let d = dist(&t, &up, &down, 1e-5)?;
                    check(d.lower <= 1.0 + 1e-5, || format!("n={n}, λ={lambda}, ({x},{y}): {d}"))?;
                    worst = worst.max(d.lower);
                    if lambda == 2.0 && x == y {
                        check(d.upper < lambda, || format!("n={n}, x={x}: {d} not below λ"))?;
                        diag_at_two.push(d.upper);
                    }
                }
            }
        }
    }
    check(start.elapsed() < Duration::from_secs(120), || format!("took {:?}", start.elapsed()))?;
    let top = diag_at_two.iter().fold(0.0_f64, |a, &b| a.max(b));
    Ok(format!("max distance {worst:.6}; same-point distances at λ=2 at most {top:.6}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("two-point distance equals λ", two_point_distance),
        ("amplified two-point distance equals μ", amplified_distance),
        ("product distance equals μ for every λ", independence_of_lambda),
        ("mixed product distance below 2λ/(1+λ) and λ", mixed_bound),
        ("pullback modules give infinite distance", pullback_infinite),
        ("Wasserstein on the unit square", wasserstein_square),
        ("product inequalities on random unital triples", product_inequalities),
        ("norm, parity and slice inequalities", norm_inequalities),
        ("K-homology pairing table", khomology_table),
        ("two-sheeted lattice bound", two_sheeted_line),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
