//! Straightforward reference implementations, written without looking at
//! how the library computes the same quantities.

/// Holm adjustment without sorting: the adjusted value of `p_i` is the
/// largest `(m - r_j) * p_j` over every `p_j <= p_i`, where `r_j` counts the
/// values strictly below `p_j`.
pub fn holm_direct(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    p.iter()
        .map(|&pi| {
            p.iter()
                .filter(|&&pj| pj <= pi)
                .map(|&pj| {
                    let below = p.iter().filter(|&&pk| pk < pj).count();
                    (m - below) as f64 * pj
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

pub fn p_value_counting(observed: f64, null: &[f64]) -> f64 {
    let mut at_least = 0usize;
    for &x in null {
        if x >= observed {
            at_least += 1;
        }
    }
    (at_least + 1) as f64 / (null.len() + 1) as f64
}

/// `KL(p || q)` in nats, with `0 * ln(0 / q) = 0`.
pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..p.len() {
        if p[i] > 0.0 {
            total += p[i] * (p[i] / q[i]).ln();
        }
    }
    total
}

pub fn js_via_kl(p: &[f64], q: &[f64]) -> f64 {
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a + b) / 2.0).collect();
    kl(p, &m) / 2.0 + kl(q, &m) / 2.0
}

/// Reachability matrix by Floyd-Warshall: `r[a][b]` iff a path `a -> b`
/// of length at least one exists.
#[allow(clippy::needless_range_loop)]
pub fn reachability(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for &(a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    pearson(&rx, &ry)
}

fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}
