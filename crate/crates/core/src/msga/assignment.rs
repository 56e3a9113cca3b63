//! Gated one-to-one assignment via the Kuhn-Munkres algorithm.
//!
//! The score matrix is padded to a square of side `rows + cols`: real pairs
//! below the gate and all dummy pairs cost 0, allowed pairs cost `-score`.
//! A minimum-cost perfect matching on the padded matrix therefore maximizes
//! the summed score over allowed pairs only, with no bias toward higher
//! cardinality; pairs landing on forbidden or dummy cells are simply
//! unmatched.

/// Assignment outcome on a detections-by-tracklets score matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Matched (detection index, tracklet index), ascending detection index.
    pub pairs: Vec<(usize, usize)>,
    /// Detection indices with no matched tracklet.
    pub births: Vec<usize>,
    /// Tracklet indices with no matched detection.
    pub unmatched_tracklets: Vec<usize>,
    /// Sum of matched scores, accumulated in ascending detection order.
    pub total_score: f64,
}

/// Solves the gated assignment. `scores[i][j]` is the consistency of
/// detection `i` against tracklet `j`; `None` marks a non-candidate. Entries
/// below `gate` are forbidden.
pub fn km_assign(scores: &[Vec<Option<f64>>], gate: f64) -> Assignment {
    let rows = scores.len();
    let cols = scores.first().map_or(0, |r| r.len());
    let allowed = |i: usize, j: usize| -> Option<f64> {
        scores[i][j].filter(|s| *s >= gate)
    };
    if rows == 0 || cols == 0 {
        return Assignment {
            pairs: Vec::new(),
            births: (0..rows).collect(),
            unmatched_tracklets: (0..cols).collect(),
            total_score: 0.0,
        };
    }

    let dim = rows + cols;
    let cost = |i: usize, j: usize| -> f64 {
        if i < rows && j < cols {
            allowed(i, j).map_or(0.0, |s| -s)
        } else {
            0.0
        }
    };

    // Kuhn-Munkres with potentials, O(dim^3), 1-indexed internals.
    let inf = f64::INFINITY;
    let mut u = vec![0.0f64; dim + 1];
    let mut v = vec![0.0f64; dim + 1];
    let mut matched_row = vec![0usize; dim + 1]; // column -> row
    let mut way = vec![0usize; dim + 1];
    for i in 1..=dim {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; dim + 1];
        let mut used = vec![false; dim + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=dim {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=dim {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![None; rows];
    for j in 1..=dim {
        let i = matched_row[j];
        if i >= 1 && i <= rows && j <= cols {
            row_to_col[i - 1] = Some(j - 1);
        }
    }

    let mut pairs = Vec::new();
    let mut births = Vec::new();
    let mut total_score = 0.0;
    let mut tracklet_taken = vec![false; cols];
    for i in 0..rows {
        match row_to_col[i].and_then(|j| allowed(i, j).map(|s| (j, s))) {
            Some((j, s)) => {
                pairs.push((i, j));
                tracklet_taken[j] = true;
                total_score += s;
            }
            None => births.push(i),
        }
    }
    let unmatched_tracklets = (0..cols).filter(|&j| !tracklet_taken[j]).collect();
    Assignment { pairs, births, unmatched_tracklets, total_score }
}

/// Exhaustive assignment oracle: tries every one-to-one mapping of
/// detections to allowed tracklets (or none) and returns the best total.
/// Exponential; test/verification use only.
pub fn brute_force_best_total(scores: &[Vec<Option<f64>>], gate: f64) -> f64 {
    let rows = scores.len();
    let cols = scores.first().map_or(0, |r| r.len());
    fn recurse(
        scores: &[Vec<Option<f64>>],
        gate: f64,
        i: usize,
        rows: usize,
        cols: usize,
        used: &mut [bool],
        chosen: &mut Vec<f64>,
        best: &mut f64,
    ) {
        if i == rows {
            // Sum in ascending detection order, matching km_assign.
            let total: f64 = chosen.iter().sum();
            if total > *best {
                *best = total;
            }
            return;
        }
        recurse(scores, gate, i + 1, rows, cols, used, chosen, best);
        for j in 0..cols {
            if !used[j] {
                if let Some(s) = scores[i][j].filter(|s| *s >= gate) {
                    used[j] = true;
                    chosen.push(s);
                    recurse(scores, gate, i + 1, rows, cols, used, chosen, best);
                    chosen.pop();
                    used[j] = false;
                }
            }
        }
    }
    let mut best = 0.0;
    let mut used = vec![false; cols];
    let mut chosen = Vec::new();
    recurse(scores, gate, 0, rows, cols, &mut used, &mut chosen, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn mat(rows: &[&[f64]]) -> Vec<Vec<Option<f64>>> {
        rows.iter().map(|r| r.iter().map(|&x| Some(x)).collect()).collect()
    }

    #[test]
    fn diagonal_dominant_case() {
        let a = km_assign(&mat(&[&[0.9, 0.2], &[0.3, 0.8]]), 0.5);
        assert_eq!(a.pairs, vec![(0, 0), (1, 1)]);
        assert!((a.total_score - 1.7).abs() < 1e-12);
        assert!(a.births.is_empty());
    }

    #[test]
    fn gated_single_entry_births() {
        let a = km_assign(&mat(&[&[0.4]]), 0.5);
        assert_eq!(a.pairs, vec![]);
        assert_eq!(a.births, vec![0]);
        assert_eq!(a.unmatched_tracklets, vec![0]);
    }

    #[test]
    fn off_diagonal_beats_greedy() {
        let a = km_assign(&mat(&[&[0.9, 0.8], &[0.85, 0.1]]), 0.5);
        assert_eq!(a.pairs, vec![(0, 1), (1, 0)]);
        assert!((a.total_score - 1.65).abs() < 1e-12);
    }

    #[test]
    fn lower_cardinality_can_win() {
        // With a 0 gate, matching only (0,0) beats any two-pair matching.
        let scores = vec![
            vec![Some(1.0), Some(0.1)],
            vec![Some(0.1), None],
        ];
        let a = km_assign(&scores, 0.0);
        assert_eq!(a.pairs, vec![(0, 0)]);
        assert_eq!(a.total_score, 1.0);
    }

    #[test]
    fn rectangular_and_empty_shapes() {
        let a = km_assign(&mat(&[&[0.9, 0.7, 0.6]]), 0.5);
        assert_eq!(a.pairs, vec![(0, 0)]);
        assert_eq!(a.unmatched_tracklets, vec![1, 2]);
        let b = km_assign(&[], 0.5);
        assert!(b.pairs.is_empty() && b.births.is_empty());
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2024);
        for trial in 0..1000 {
            let rows = rng.gen_range(1..=6);
            let cols = rng.gen_range(1..=6);
            let scores: Vec<Vec<Option<f64>>> = (0..rows)
                .map(|_| {
                    (0..cols)
                        .map(|_| if rng.gen::<f64>() < 0.2 { None } else { Some(rng.gen::<f64>()) })
                        .collect()
                })
                .collect();
            let gate = rng.gen::<f64>() * 0.6;
            let km = km_assign(&scores, gate);
            let brute = brute_force_best_total(&scores, gate);
            assert_eq!(km.total_score, brute, "trial {trial} mismatch");
        }
    }

    #[test]
    fn raising_gate_never_adds_pairs() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(55);
        for _ in 0..200 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let scores: Vec<Vec<Option<f64>>> = (0..rows)
                .map(|_| (0..cols).map(|_| Some(rng.gen::<f64>())).collect())
                .collect();
            let lo = km_assign(&scores, 0.3).pairs.len();
            let hi = km_assign(&scores, 0.6).pairs.len();
            assert!(hi <= lo);
        }
    }
}
