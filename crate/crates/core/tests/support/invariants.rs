//! Property checks shared by the proptest suites and the acceptance run.
//! Each returns `Err` with a description of the first violation.

use std::sync::Arc;

use shiftscope_core::dataset::window_iter;
use shiftscope_core::drift::{holm_normalize, js_divergence};
use shiftscope_core::{
    build_binning, build_histogram, BinningSpec, Column, Dataset, Error, Histogram, IsoDuration, LineageGraph,
};

use super::oracle::reachability;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn histogram_normalized(column: &Column, bin_count: usize) -> Check {
    let spec = Arc::new(build_binning(column, bin_count).map_err(|e| e.to_string())?);
    let h = build_histogram(column, &spec).map_err(|e| e.to_string())?;
    ensure((h.total() - 1.0).abs() <= 1e-9, || {
        format!("mass sums to {}", h.total())
    })?;
    ensure(h.coordinates().all(|x| (0.0..=1.0).contains(&x)), || {
        "mass outside [0, 1]".into()
    })?;
    ensure(h.sample_count as usize == column.len(), || {
        "sample count differs from row count".into()
    })
}

pub fn divergence_symmetric_bounded(spec: &Arc<BinningSpec>, a: &[u64], b: &[u64]) -> Check {
    let p = Histogram::from_counts(spec.clone(), a);
    let q = Histogram::from_counts(spec.clone(), b);
    let pq = js_divergence(&p, &q).map_err(|e| e.to_string())?;
    let qp = js_divergence(&q, &p).map_err(|e| e.to_string())?;
    let pp = js_divergence(&p, &p).map_err(|e| e.to_string())?;
    ensure(pq == qp, || format!("JS(p,q)={pq} but JS(q,p)={qp}"))?;
    ensure((0.0..=std::f64::consts::LN_2).contains(&pq), || {
        format!("JS={pq} outside [0, ln 2]")
    })?;
    ensure(pp.abs() <= 1e-12, || format!("JS(p,p)={pp}"))
}

/// `perm` is a permutation of `0..raw.len()`.
pub fn holm_properties(raw: &[f64], perm: &[usize], alpha: f64) -> Check {
    let norm = holm_normalize(raw);
    ensure(norm.len() == raw.len(), || "length changed".into())?;
    for (r, n) in raw.iter().zip(&norm) {
        ensure(n >= r, || format!("norm {n} < raw {r}"))?;
    }
    let permuted: Vec<f64> = perm.iter().map(|&i| raw[i]).collect();
    let pnorm = holm_normalize(&permuted);
    for (k, &i) in perm.iter().enumerate() {
        ensure(pnorm[k] == norm[i], || {
            format!("permutation changed value of input {i}")
        })?;
        ensure((pnorm[k] < alpha) == (norm[i] < alpha), || {
            "permutation changed alarm set".into()
        })?;
    }
    if let [single] = raw {
        ensure(norm[0] == *single, || "m = 1 is not the identity".into())?;
    }
    Ok(())
}

/// `edges` must form a DAG over nodes `0..n`.
pub fn lineage_duality(n: usize, edges: &[(usize, usize)]) -> Check {
    let name = |i: usize| format!("f{i:02}");
    let named: Vec<(String, String)> = edges.iter().map(|&(a, b)| (name(a), name(b))).collect();
    let g = LineageGraph::new((0..n).map(name), &named).map_err(|e| e.to_string())?;
    let reach = reachability(n, edges);
    let mut anc = Vec::with_capacity(n);
    let mut desc = Vec::with_capacity(n);
    for v in 0..n {
        anc.push(g.ancestors(&name(v)).map_err(|e| e.to_string())?);
        desc.push(g.descendants(&name(v)).map_err(|e| e.to_string())?);
    }
    for a in 0..n {
        for b in 0..n {
            let up = anc[b].contains(&name(a));
            let down = desc[a].contains(&name(b));
            ensure(up == reach[a][b], || {
                format!("ancestors({}) contains {}: {up}", name(b), name(a))
            })?;
            ensure(up == down, || format!("duality fails for {} -> {}", name(a), name(b)))?;
        }
    }
    Ok(())
}

/// Adds the reverse of the `pick`-th reachable pair of a DAG and expects the
/// graph to be rejected with a genuine cycle.
pub fn cycle_rejected(n: usize, edges: &[(usize, usize)], pick: usize) -> Check {
    let reach = reachability(n, edges);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| reach[a][b])
        .collect();
    let Some(&(a, b)) = pairs.get(pick % pairs.len().max(1)) else {
        return Ok(());
    };
    let name = |i: usize| format!("f{i:02}");
    let mut named: Vec<(String, String)> = edges.iter().map(|&(x, y)| (name(x), name(y))).collect();
    named.push((name(b), name(a)));
    match LineageGraph::new((0..n).map(name), &named) {
        Err(Error::LineageCycle(path)) => {
            ensure(path.len() >= 2 && path.first() == path.last(), || {
                format!("not a closed path: {path:?}")
            })?;
            for w in path.windows(2) {
                ensure(named.contains(&(w[0].clone(), w[1].clone())), || {
                    format!("{} -> {} is not an edge", w[0], w[1])
                })?;
            }
            Ok(())
        }
        Err(e) => Err(format!("wrong error: {e}")),
        Ok(_) => Err(format!("cycle through {} and {} accepted", name(a), name(b))),
    }
}

pub fn window_partition(timestamps: Vec<i64>, granularity: IsoDuration) -> Check {
    let ds = Dataset::new(timestamps, vec![], vec![]).map_err(|e| e.to_string())?;
    let ts = ds.timestamps();
    let windows = window_iter(&ds, granularity);
    let step = granularity.millis();
    let mut next_row = 0;
    for (k, w) in windows.iter().enumerate() {
        ensure(w.start.rem_euclid(step) == 0, || format!("window {k} is not aligned"))?;
        if k > 0 {
            ensure(w.start == windows[k - 1].start + step, || {
                format!("gap before window {k}")
            })?;
        }
        ensure(w.rows.start == next_row, || {
            format!("window {k} does not continue at row {next_row}")
        })?;
        for &t in &ts[w.rows.clone()] {
            ensure(w.start <= t && t < w.start + step, || {
                format!("row at {t} outside window {k}")
            })?;
        }
        next_row = w.rows.end;
    }
    ensure(next_row == ts.len(), || {
        format!("{} of {} rows covered", next_row, ts.len())
    })
}
