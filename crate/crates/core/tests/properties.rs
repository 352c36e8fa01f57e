use pencil_core::exact::{full_structure_exact, transfer_exact};
use pencil_core::fixtures::{exact_corpus, random_unitary};
use pencil_core::io::{parse_quadruple_str, write_quadruple};
use pencil_core::linalg::{c, fro_norm, generalized_eigenvalues, ComplexMatrix, C64};
use pencil_core::matching::match_points;
use pencil_core::mcmillan::{degree_sum_check, rational_structure, MinimalityPolicy};
use pencil_core::minreal::{is_strongly_irreducible, is_strongly_minimal, strongly_minimal_reduce, ReductionOrder};
use pencil_core::pencil::{transfer_eval, Pencil, SystemQuadruple};
use pencil_core::scaling::{apply_scaling, default_max_iter, quantize_pow2, scale_approach1, scale_approach2_from};
use pencil_core::staircase::kronecker_structure;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

fn corpus_member(seed: u64) -> SystemQuadruple {
    let (_, eq) = exact_corpus(1, seed).pop().expect("one instance");
    eq.to_float().expect("integer data")
}

fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, spread: f64) -> ComplexMatrix {
    let rs: Vec<f64> = (0..m).map(|_| 10f64.powf(rng.gen_range(-spread..=spread))).collect();
    let cs: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.gen_range(-spread..=spread))).collect();
    ComplexMatrix::from_fn(m, n, |i, j| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * rs[i] * cs[j])
}

fn finite_eigenvalues(p: &Pencil) -> Vec<C64> {
    generalized_eigenvalues(p, TOL).unwrap().iter().filter_map(|e| e.finite()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reduction_preserves_transfer_function(seed in 0u64..10_000, co in any::<bool>()) {
        let q = corpus_member(seed);
        let order = if co { ReductionOrder::ControllableFirst } else { ReductionOrder::ObservableFirst };
        let red = strongly_minimal_reduce(&q, TOL, seed, order).unwrap();
        prop_assert!(is_strongly_minimal(&red.system, TOL, seed).unwrap().strongly_minimal());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..4 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let (Ok(r), Ok(rm)) = (transfer_eval(&q, z, TOL), transfer_eval(&red.system, z, TOL)) else { continue };
            let err = fro_norm(&(rm - &red.w_left * &r * &red.w_right));
            prop_assert!(err <= 1e-8 * fro_norm(&r).max(1.0), "error {err:e} at {z}");
        }
    }

    #[test]
    fn degree_sum_identity_holds(seed in 0u64..10_000) {
        let q = corpus_member(seed);
        let s = rational_structure(&q, TOL, seed, MinimalityPolicy::Reduce).unwrap();
        prop_assert!(degree_sum_check(&s));
    }

    #[test]
    fn numeric_structure_matches_exact(seed in 0u64..10_000) {
        let (_, eq) = exact_corpus(1, seed).pop().unwrap();
        let exact = full_structure_exact(&transfer_exact(&eq).unwrap()).unwrap();
        let s = rational_structure(&eq.to_float().unwrap(), TOL, seed, MinimalityPolicy::Reduce).unwrap();
        prop_assert!(s.agrees_with(&exact.to_mcmillan(), 1e-8));
    }

    #[test]
    fn strongly_minimal_implies_strongly_irreducible(seed in 0u64..10_000) {
        let q = corpus_member(seed);
        if is_strongly_minimal(&q, TOL, seed).unwrap().strongly_minimal() {
            prop_assert!(is_strongly_irreducible(&q, TOL, seed).unwrap());
        }
        let red = strongly_minimal_reduce(&q, TOL, seed, ReductionOrder::ControllableFirst).unwrap();
        prop_assert!(is_strongly_irreducible(&red.system, TOL, seed).unwrap());
    }

    #[test]
    fn kronecker_structure_is_unitarily_invariant(seed in 0u64..10_000, m in 1usize..5, n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Rank-deficient coefficients so that minimal indices appear.
        let k = m.min(n).max(2) - 1;
        let l0 = random_matrix(&mut rng, m, k, 0.0) * random_matrix(&mut rng, k, n, 0.0);
        let l1 = random_matrix(&mut rng, m, k, 0.0) * random_matrix(&mut rng, k, n, 0.0);
        let p = Pencil::new(l0, l1).unwrap();
        let (u, v) = (random_unitary(m, &mut rng), random_unitary(n, &mut rng));
        let a = kronecker_structure(&p, 1e-10, 0).unwrap();
        let b = kronecker_structure(&p.transform(&u, &v), 1e-10, 0).unwrap();
        prop_assert_eq!(a.normal_rank, b.normal_rank);
        prop_assert_eq!(&a.right_minimal, &b.right_minimal);
        prop_assert_eq!(&a.left_minimal, &b.left_minimal);
        prop_assert_eq!(&a.infinite_blocks, &b.infinite_blocks);
        prop_assert_eq!(a.finite_count(), b.finite_count());
        prop_assert!(a.dimensions_consistent());
    }

    #[test]
    fn pow2_quantization_stays_within_a_factor_sqrt2(seed in 0u64..10_000, m in 1usize..6, n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_matrix(&mut rng, m, n, 3.0), random_matrix(&mut rng, m, n, 3.0));
        let r = scale_approach1(&a, &b, 1.0, 1.0, 1e-10, default_max_iter(m, n, 1e-10)).unwrap();
        let q = quantize_pow2(&r);
        for (x, y) in r.d_left.iter().chain(&r.d_right).zip(q.d_left.iter().chain(&q.d_right)) {
            let f = y / x;
            prop_assert!((0.5f64.sqrt() - 1e-12..=2f64.sqrt() + 1e-12).contains(&f), "factor {f}");
            prop_assert_eq!(y.log2().fract(), 0.0);
        }
    }

    #[test]
    fn approach2_scaling_is_unique(seed in 0u64..10_000, m in 1usize..6, n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_matrix(&mut rng, m, n, 2.0), random_matrix(&mut rng, m, n, 2.0));
        let x = scale_approach2_from(&a, &b, 1.0, 1.0, 1e-10, 50_000, None).unwrap();
        let y = scale_approach2_from(&a, &b, 1.0, 1.0, 1e-10, 50_000, Some(seed)).unwrap();
        prop_assert!(x.converged && y.converged);
        for (u, v) in x.d_left.iter().chain(&x.d_right).zip(y.d_left.iter().chain(&y.d_right)) {
            prop_assert!((u / v - 1.0).abs() < 1e-6, "{u} vs {v}");
        }
    }

    #[test]
    fn scaling_keeps_eigenvalues(seed in 0u64..10_000, n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = Pencil::new(random_matrix(&mut rng, n, n, 0.0), random_matrix(&mut rng, n, n, 0.0)).unwrap();
        let r = scale_approach1(&p.l0, &p.l1, 1.0, 1.0, 1e-10, default_max_iter(n, n, 1e-10)).unwrap();
        let scaled = apply_scaling(&p, &quantize_pow2(&r)).unwrap();
        let (x, y) = (finite_eigenvalues(&p), finite_eigenvalues(&scaled));
        prop_assert_eq!(x.len(), y.len());
        let (_, dist) = match_points(&x, &y);
        let big = x.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(dist <= 1e-6 * big, "moved by {dist:e}");
    }

    #[test]
    fn quadruple_files_round_trip_bit_exactly(seed in any::<u64>(), bits in prop::collection::vec(any::<f64>(), 8)) {
        let mut q = corpus_member(seed % 10_000);
        for (k, v) in bits.into_iter().filter(|v| v.is_finite()).enumerate() {
            let (r, cidx) = (k % q.a.nrows(), (k / 2) % q.a.ncols());
            q.a.l0[(r, cidx)] = c(v, -v);
        }
        let back = parse_quadruple_str(&write_quadruple(&q)).unwrap();
        for (x, y) in q.a.l0.iter().zip(back.a.l0.iter()) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
        prop_assert_eq!(back, q);
    }
}
