//! Spearman rank correlation with average-rank tie handling.

/// Average (fractional) ranks, 1-based. Tied values share the mean of the
/// ranks they occupy.
pub fn average_ranks<T: Copy + Into<f64>>(values: &[T]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].into().total_cmp(&values[b].into()));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let v: f64 = values[order[i]].into();
        let mut j = i + 1;
        while j < n && values[order[j]].into() == v {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho, or `None` when either sequence is constant or shorter than two.
pub fn spearman<T: Copy + Into<f64>>(x: &[T], y: &[T]) -> Option<f64> {
    assert_eq!(x.len(), y.len(), "sequences must be aligned");
    if x.len() < 2 {
        return None;
    }
    pearson(&average_ranks(x), &average_ranks(y))
}
