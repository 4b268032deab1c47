//! Small-N cross-validation of the family search against free optimization.
//!
//! For p = 2 the largest ratio of the N-section Cesàro matrix over
//! nonnegative inputs is its spectral norm; the maximizer is nonnegative, so
//! projected power iteration on `CᵀC` finds it.

use hardy_aux::operator::{apply_weighted_mean, extremal_search, FamilyKind, OperatorSpec, SequenceFamily};

fn cesaro_transpose(y: &[f64]) -> Vec<f64> {
    // (Cᵀ y)_k = Σ_{n>=k} y_n / n
    let n = y.len();
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += y[k] / (k + 1) as f64;
        out[k] = acc;
    }
    out
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn section_norm(n: usize) -> f64 {
    let mut a = vec![1.0 / (n as f64).sqrt(); n];
    let mut ratio = 0.0;
    for _ in 0..10_000 {
        let ca = apply_weighted_mean(1.0, &a, n).unwrap();
        let next: Vec<f64> = cesaro_transpose(&ca).into_iter().map(|x| x.max(0.0)).collect();
        let len = norm(&next);
        a = next.iter().map(|x| x / len).collect();
        let new_ratio = norm(&apply_weighted_mean(1.0, &a, n).unwrap());
        if (new_ratio - ratio).abs() < 1e-15 {
            break;
        }
        ratio = new_ratio;
    }
    ratio
}

fn coarse_grid_max(n: usize, steps: usize) -> f64 {
    // Exhaustive search over a coarse grid of the nonnegative orthant (n small).
    let mut best: f64 = 0.0;
    let mut idx = vec![0usize; n];
    loop {
        let a: Vec<f64> = idx.iter().map(|&i| i as f64 / steps as f64).collect();
        let len = norm(&a);
        if len > 0.0 {
            best = best.max(norm(&apply_weighted_mean(1.0, &a, n).unwrap()) / len);
        }
        let mut d = 0;
        loop {
            if d == n {
                return best;
            }
            idx[d] += 1;
            if idx[d] <= steps {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn family_grid(n: usize) -> Vec<SequenceFamily> {
    let mut grid = Vec::new();
    for i in 0..=40 {
        let s = i as f64 * 0.05;
        grid.push(SequenceFamily::new(FamilyKind::PowerDecay { s }, n).unwrap());
    }
    for i in 1..=40 {
        let r = i as f64 * 0.025;
        grid.push(SequenceFamily::new(FamilyKind::Geometric { r }, n).unwrap());
    }
    grid.push(SequenceFamily::new(FamilyKind::Delta, n).unwrap());
    grid
}

#[test]
fn power_iteration_agrees_with_coarse_grid() {
    for n in 2..=4 {
        let exact = section_norm(n);
        let coarse = coarse_grid_max(n, 12);
        assert!(coarse <= exact + 1e-12, "n = {n}");
        assert!(coarse >= 0.99 * exact, "n = {n}: coarse {coarse}, exact {exact}");
    }
}

#[test]
fn family_search_within_five_percent_of_free_optimum() {
    for n in 1..=8 {
        let exact = section_norm(n);
        let op = OperatorSpec::cesaro(n).unwrap();
        let res = extremal_search(&op, 2.0, &family_grid(n)).unwrap();
        assert!(res.best_ratio <= exact * (1.0 + 1e-12), "n = {n}");
        assert!(res.best_ratio >= 0.95 * exact, "n = {n}: family {}, free {exact}", res.best_ratio);
    }
    // Frozen from an independent dense eigenvalue computation.
    assert!((section_norm(8) - 1.37978).abs() < 1e-5);
}
