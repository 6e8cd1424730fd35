//! Exact convex-hull membership by a phase-one simplex with Bland's rule.

use num::{Signed, Zero};

use crate::rational::{one, zero, Rational};

/// Weights `w ≥ 0` with `Σw = 1` and `Σ w_i points[i] = target`, if any.
pub fn convex_weights(points: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let n = points.len();
    if n == 0 {
        return None;
    }
    let dim = target.len();
    assert!(points.iter().all(|p| p.len() == dim));

    // Constraint rows: coordinates, then the normalization row.
    let mut rows: Vec<(Vec<Rational>, Rational)> = (0..dim)
        .map(|r| (points.iter().map(|p| p[r].clone()).collect(), target[r].clone()))
        .collect();
    rows.push((vec![one(); n], one()));
    rows.sort();
    rows.dedup();

    let m = rows.len();
    let width = n + m;
    // Tableau columns: n structural, m artificial, then the right-hand side.
    let mut tab: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
    for (i, (coeffs, rhs)) in rows.into_iter().enumerate() {
        let flip = rhs.is_negative();
        let mut row: Vec<Rational> = coeffs.into_iter().map(|c| if flip { -c } else { c }).collect();
        row.extend((0..m).map(|j| if j == i { one() } else { zero() }));
        row.push(if flip { -rhs } else { rhs });
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs for minimizing the sum of artificials.
    let mut cost = vec![zero(); width + 1];
    for row in &tab {
        for j in 0..n {
            cost[j] -= &row[j];
        }
        cost[width] -= &row[width];
    }

    loop {
        let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let r = &row[width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => r < *lr || (r == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, r));
                }
            }
        }
        let (pr, _) = leave?;
        let piv = tab[pr][enter].clone();
        for v in tab[pr].iter_mut() {
            *v /= &piv;
        }
        let pivot_row = tab[pr].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != pr && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * p;
                }
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (v, p) in cost.iter_mut().zip(&pivot_row) {
                *v -= &f * p;
            }
        }
        basis[pr] = enter;
    }

    if !cost[width].is_zero() {
        return None;
    }
    let mut w = vec![zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            w[b] = tab[i][width].clone();
        }
    }
    Some(w)
}

/// Indices of the points that are not convex combinations of the others.
/// Duplicates are kept only at their first occurrence.
pub fn extreme_points(points: &[Vec<Rational>]) -> Vec<usize> {
    let mut distinct: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if !distinct.iter().any(|&j| points[j] == *p) {
            distinct.push(i);
        }
    }
    distinct
        .iter()
        .copied()
        .filter(|&i| {
            let others: Vec<Vec<Rational>> = distinct
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| points[j].clone())
                .collect();
            convex_weights(&others, &points[i]).is_none()
        })
        .collect()
}
