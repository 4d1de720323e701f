//! Straightforward reference implementations of the trust pipeline, kept
//! free of any dependency on `iot-trust` so they can serve as oracles for
//! its optimized code.
//!
//! Each function favours a literal reading of the rules over speed: grids
//! are rebuilt by rescanning the input, the actual cluster is found by
//! comparing every candidate against every other one.

/// One report as seen by the server: device id, reported direct trust and
/// the device's average precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Report {
    pub device: usize,
    pub direct_trust: f64,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Members of each grid, in input order.
    pub grids: [Vec<Report>; 3],
    pub min_points: usize,
    pub dense: [bool; 3],
    pub actual: usize,
}

fn grid_of(x: f64) -> usize {
    if x < 0.3 {
        0
    } else if x < 0.7 {
        1
    } else {
        2
    }
}

fn mean_precision(members: &[Report]) -> f64 {
    let mut sum = 0.0;
    for r in members {
        sum += r.precision;
    }
    sum / members.len() as f64
}

/// Three-grid clustering. Returns `None` for an empty report set.
pub fn reference_clusters(reports: &[Report]) -> Option<Clustering> {
    if reports.is_empty() {
        return None;
    }
    let grids: [Vec<Report>; 3] = [0, 1, 2].map(|g| {
        reports
            .iter()
            .copied()
            .filter(|r| grid_of(r.direct_trust) == g)
            .collect()
    });
    let min_points = std::cmp::max(1, reports.len() / 3);
    let dense = [0, 1, 2].map(|g| grids[g].len() >= min_points);

    // a dense grid wins if no other dense grid beats it, ties going right
    let beats = |a: usize, b: usize| {
        let (pa, pb) = (mean_precision(&grids[a]), mean_precision(&grids[b]));
        pa > pb || (pa == pb && a > b)
    };
    let actual = (0..3)
        .filter(|&c| dense[c])
        .find(|&c| (0..3).filter(|&o| o != c && dense[o]).all(|o| beats(c, o)))?;

    Some(Clustering {
        grids,
        min_points,
        dense,
        actual,
    })
}

/// Reports kept for domain trust, sorted by device id.
pub fn reference_selection(reports: &[Report]) -> Vec<(usize, f64)> {
    let Some(c) = reference_clusters(reports) else {
        return Vec::new();
    };
    let mut kept: Vec<(usize, f64)> = reports
        .iter()
        .filter(|r| match grid_of(r.direct_trust).abs_diff(c.actual) {
            0 => true,
            1 => r.precision > 0.3,
            _ => r.precision > 0.7,
        })
        .map(|r| (r.device, r.direct_trust))
        .collect();
    kept.sort_by_key(|&(d, _)| d);
    kept
}

/// Direct trust of a window given as per-slot rating lists, oldest first.
/// An empty window yields 0.5.
pub fn reference_direct_trust(slots: &[Vec<f64>], beta: f64, r: f64, e: f64) -> f64 {
    let n_slots = slots.len() as f64;
    let mut values = Vec::new();
    let mut positions = Vec::new();
    for (i, slot) in slots.iter().enumerate() {
        for &v in slot {
            values.push(v);
            positions.push((i + 1) as f64 / n_slots);
        }
    }
    if values.is_empty() {
        return 0.5;
    }
    let n = values.len() as f64;
    let t_tr = values.iter().sum::<f64>() / n;
    let mut w_t = positions.iter().sum::<f64>() / n;
    if t_tr < 0.5 {
        w_t = 1.0 - w_t;
    }
    let b2 = beta * beta;
    let t_int = if b2 * w_t + t_tr == 0.0 {
        0.0
    } else {
        (1.0 + b2) * w_t * t_tr / (b2 * w_t + t_tr)
    };
    let high = values.iter().filter(|&&v| v > 0.7).count() as f64;
    let low = values.iter().filter(|&&v| v < 0.3).count() as f64;
    let reward = 1.0 - (high + 2.0).powf(-r);
    let penalty = (low + 1.0).powf(-e);
    reward * penalty * t_int
}
