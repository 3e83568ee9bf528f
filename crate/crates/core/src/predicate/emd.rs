/// 1-Wasserstein distance between two empirical distributions on the line.
///
/// Integrates `|Q_a(u) − Q_b(u)|` over `u ∈ [0, 1]`, where `Q` are the
/// empirical quantile functions; with equal sample counts this is the mean
/// absolute difference of the sorted samples.
pub fn emd_1d(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "emd_1d needs nonempty inputs");
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.total_cmp(q));
    ys.sort_by(|p, q| p.total_cmp(q));
    if xs.len() == ys.len() {
        return xs.iter().zip(&ys).map(|(x, y)| (x - y).abs()).sum::<f64>() / xs.len() as f64;
    }
    // Walk both step functions; each sample carries mass 1/n. Using integer
    // mass units of lcm-free form: sample i of a covers [i·nb, (i+1)·nb) on a
    // grid of na·nb units.
    let (na, nb) = (xs.len() as u64, ys.len() as u64);
    let total = (na * nb) as f64;
    let (mut i, mut j) = (0usize, 0usize);
    let (mut pos, mut acc) = (0u64, 0.0);
    while i < xs.len() && j < ys.len() {
        let next = ((i as u64 + 1) * nb).min((j as u64 + 1) * na);
        acc += (next - pos) as f64 * (xs[i] - ys[j]).abs();
        pos = next;
        if pos == (i as u64 + 1) * nb {
            i += 1;
        }
        if pos == (j as u64 + 1) * na {
            j += 1;
        }
    }
    acc / total
}
