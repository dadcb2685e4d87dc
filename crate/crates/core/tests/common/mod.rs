//! Independent oracles shared by the integration tests. Nothing here calls
//! into the library's counting or diagram code.

#![allow(dead_code)]

/// Pulses of period `t` and on-time `tau` lying strictly between the first
/// and the last pulse visible in `[a, b]`, counted from the pulse start
/// times directly: the first visible pulse starts at `ceil((a - tau)/t)·t`,
/// the last at `floor(b/t)·t`.
pub fn eq2_count(t: f64, tau: f64, a: f64, b: f64) -> usize {
    let a_low = (((a - tau) / t).ceil() + 1.0) * t;
    let a_high = (b / t).floor() * t;
    let n = ((a_high - a_low) / t).round();
    if n > 0.0 {
        n as usize
    } else {
        0
    }
}

/// Number of on-intervals `[kT, kT + τ]` meeting `[a, b]`.
pub fn visible_components(t: f64, tau: f64, a: f64, b: f64) -> usize {
    let first = ((a - tau) / t).ceil() as i64;
    let last = (b / t).floor() as i64;
    (last - first + 1).max(0) as usize
}

fn dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Sorted edge weights of a minimum spanning tree, found by enumerating
/// every labelled tree on the points through its Prüfer sequence.
pub fn exhaustive_mst(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    match n {
        0 | 1 => return vec![],
        2 => return vec![dist(&points[0], &points[1])],
        _ => {}
    }
    let total = n.pow((n - 2) as u32);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut seq = vec![0usize; n - 2];
    for code in 0..total {
        let mut c = code;
        for s in seq.iter_mut() {
            *s = c % n;
            c /= n;
        }
        let mut weights: Vec<f64> = prufer_edges(&seq, n)
            .into_iter()
            .map(|(i, j)| dist(&points[i], &points[j]))
            .collect();
        let sum: f64 = weights.iter().sum();
        if best.as_ref().is_none_or(|b| sum < b.0 - 1e-12) {
            weights.sort_by(f64::total_cmp);
            best = Some((sum, weights));
        }
    }
    best.unwrap().1
}

fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&i| degree[i] == 1).unwrap();
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Bottleneck distance by trying every partial matching.
pub fn brute_bottleneck(a: &[f64], b: &[f64]) -> f64 {
    fn go(i: usize, a: &[f64], b: &[f64], used: &mut Vec<bool>, worst: f64, best: &mut f64) {
        if worst >= *best {
            return;
        }
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(x, _)| x / 2.0)
                .fold(worst, f64::max);
            *best = best.min(rest);
            return;
        }
        go(i + 1, a, b, used, worst.max(a[i] / 2.0), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, a, b, used, worst.max((a[i] - b[j]).abs()), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

/// Two-sided Hausdorff distance by brute force.
pub fn brute_hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let one_way = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter()
            .map(|p| y.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}
