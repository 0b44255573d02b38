use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sa_noma::channel::{
    align_pair, basis_combiner, build_precoder_from_links, random_combiner, sample_fading,
    select_detection_vectors,
};
use sa_noma::linalg::{inner, norm_sqr};
use sa_noma::PairChannel;

fn pair(n: usize, m: usize, rng: &mut ChaCha8Rng) -> PairChannel {
    PairChannel {
        near: sample_fading(n, m, rng),
        far: sample_fading(n, m, rng),
        near_distance: 4.0,
        far_distance: 12.0,
    }
}

/// `g_mᴴ (I − Θ_m) g_m`, with `Θ_m` the projector onto the other effective vectors.
fn projected_gain(g: &[Vec<Complex64>], m: usize) -> f64 {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for (i, v) in g.iter().enumerate() {
        if i == m {
            continue;
        }
        let mut w = v.clone();
        for b in &basis {
            let c = inner(b, &w);
            for (x, y) in w.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let n = norm_sqr(&w).sqrt();
        basis.push(w.into_iter().map(|x| x / n).collect());
    }
    let mut r = g[m].clone();
    for b in &basis {
        let c = inner(b, &r);
        for (x, y) in r.iter_mut().zip(b) {
            *x -= c * y;
        }
    }
    norm_sqr(&r)
}

#[test]
fn fading_entries_are_circular_unit_gaussians() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let g = sample_fading::<f64, _>(200, 500, &mut rng);
    let n = 100_000.0;
    let (mut mean, mut power, mut pseudo) =
        (Complex64::new(0.0, 0.0), 0.0, Complex64::new(0.0, 0.0));
    for i in 0..200 {
        for j in 0..500 {
            let z = g[(i, j)];
            mean += z;
            power += z.norm_sqr();
            pseudo += z * z;
        }
    }
    assert!((mean / n).norm() < 0.01);
    assert!((power / n - 1.0).abs() < 0.02);
    assert!((pseudo / n).norm() < 0.02);
}

#[test]
fn alignment_holds_for_several_antenna_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (m, n) in [(2, 2), (3, 2), (2, 3), (4, 3), (4, 4)] {
        for _ in 0..50 {
            let ch = pair(n, m, &mut rng);
            let x = random_combiner::<f64, _>(2 * n - m, &mut rng);
            let link = align_pair(&ch, x).unwrap();
            let scale = norm_sqr(&link.effective).sqrt().max(1.0);
            assert!(link.alignment_residual(&ch).unwrap() < 1e-10 * scale);
            let total = norm_sqr(&link.near_vector) + norm_sqr(&link.far_vector);
            assert!((total - 2.0).abs() < 1e-10, "M={m} N={n}: {total}");
        }
    }
}

#[test]
fn effective_gain_equals_projection_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for m in [2, 3, 4] {
        let n = m;
        for _ in 0..50 {
            let links: Vec<_> = (0..m)
                .map(|_| {
                    let ch = pair(n, m, &mut rng);
                    align_pair(&ch, random_combiner(2 * n - m, &mut rng)).unwrap()
                })
                .collect();
            let set = build_precoder_from_links(&links).unwrap();
            let g: Vec<_> = links.iter().map(|l| l.effective.clone()).collect();
            let trace: f64 = (0..m).map(|i| norm_sqr(&set.column(i))).sum();
            assert!((trace - m as f64).abs() < 1e-9);
            for i in 0..m {
                let direct = projected_gain(&g, i);
                assert!((set.effective_gains[i] - direct).abs() < 1e-9 * direct.max(1.0));
                for (j, gj) in g.iter().enumerate() {
                    let c = inner(gj, &set.column(i));
                    if i == j {
                        assert!(
                            (c.norm_sqr() - set.effective_gains[i]).abs() < 1e-9 * direct.max(1.0)
                        );
                    } else {
                        assert!(c.norm() < 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn selection_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (m, n) in [(2, 2), (2, 3), (3, 3), (4, 4)] {
        let k = 2 * n - m;
        for _ in 0..30 {
            let channels: Vec<_> = (0..m).map(|_| pair(n, m, &mut rng)).collect();
            let sel = select_detection_vectors(&channels).unwrap();
            let brute: Vec<f64> = (0..k)
                .map(|i| {
                    let g: Vec<_> = channels
                        .iter()
                        .map(|c| align_pair(c, basis_combiner(k, i)).unwrap().effective)
                        .collect();
                    (0..m)
                        .map(|j| projected_gain(&g, j))
                        .fold(f64::INFINITY, f64::min)
                })
                .collect();
            let best = brute
                .iter()
                .enumerate()
                .fold(0, |b, (i, &v)| if v > brute[b] { i } else { b });
            assert_eq!(sel.index, best);
            for (a, b) in sel.min_gains.iter().zip(&brute) {
                assert!((a - b).abs() < 1e-9 * b.max(1.0));
            }
        }
    }
}

#[test]
fn effective_vector_components_have_the_derived_variance() {
    // Each component of g_m has variance 2N²/(4N² − 1) when ‖x_m‖² = 2.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (m, n) in [(2, 2), (4, 3)] {
        let draws = 20_000;
        let mut power = 0.0;
        for _ in 0..draws {
            let ch = pair(n, m, &mut rng);
            let link = align_pair(&ch, random_combiner(2 * n - m, &mut rng)).unwrap();
            power += norm_sqr(&link.effective);
        }
        let variance = power / (draws * m) as f64;
        let nf = n as f64;
        let expected = 2.0 * nf * nf / (4.0 * nf * nf - 1.0);
        assert!(
            (variance - expected).abs() < 0.02 * expected,
            "M={m} N={n}: {variance} vs {expected}"
        );
    }
}

#[test]
fn rejects_too_few_user_antennas() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ch = pair(2, 4, &mut rng);
    assert!(align_pair(&ch, vec![Complex64::new(2f64.sqrt(), 0.0)]).is_err());
    let channels: Vec<_> = (0..4).map(|_| pair(2, 4, &mut rng)).collect();
    assert!(select_detection_vectors(&channels).is_err());
}
