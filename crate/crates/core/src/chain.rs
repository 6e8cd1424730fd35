//! Exact finite Markov chains over rational transition weights: recurrent
//! classes, periods, stationary laws, absorption and hitting times.

use num::{Integer, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};

/// Gauss–Jordan elimination for `A X = B` with several right-hand sides.
/// Returns `None` when `A` is singular.
pub fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for x in b[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
            for c in 0..b[r].len() {
                let delta = &factor * &b[col][c];
                b[r][c] -= delta;
            }
        }
    }
    Some(b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecurrentClass {
    pub states: Vec<usize>,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainClasses {
    pub recurrent: Vec<RecurrentClass>,
    pub transient: Vec<usize>,
    /// Recurrent class index of each state, `None` for transient states.
    pub class_of: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactChain {
    rows: Vec<Vec<(usize, Rational)>>,
}

impl ExactChain {
    /// Sparse rows; weights for repeated targets are merged. Every row
    /// must sum to one.
    pub fn new(rows: Vec<Vec<(usize, Rational)>>) -> Result<Self> {
        let n = rows.len();
        let mut merged = Vec::with_capacity(n);
        for (i, row) in rows.into_iter().enumerate() {
            let mut dense: std::collections::BTreeMap<usize, Rational> = Default::default();
            for (j, w) in row {
                if j >= n {
                    return Err(Error::Dimension { expected: n, found: j });
                }
                if w < zero() {
                    return Err(Error::InvalidMeasure(format!("negative transition weight in row {i}")));
                }
                *dense.entry(j).or_insert_with(zero) += w;
            }
            let total: Rational = dense.values().cloned().sum();
            if total != one() {
                return Err(Error::InvalidMeasure(format!("row {i} sums to {total}")));
            }
            merged.push(dense.into_iter().filter(|(_, w)| !w.is_zero()).collect());
        }
        Ok(ExactChain { rows: merged })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.rows[i]
    }

    /// `dist · P`.
    pub fn step(&self, dist: &[Rational]) -> Vec<Rational> {
        let mut out = vec![zero(); self.len()];
        for (i, p) in dist.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, w) in &self.rows[i] {
                out[*j] += p * w;
            }
        }
        out
    }

    pub fn classes(&self) -> ChainClasses {
        let n = self.len();
        let mut graph = DiGraph::<(), ()>::with_capacity(n, 0);
        let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, _) in row {
                graph.add_edge(nodes[i], nodes[*j], ());
            }
        }
        let mut class_of = vec![None; n];
        let mut recurrent = Vec::new();
        let mut sccs: Vec<Vec<usize>> = tarjan_scc(&graph)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        sccs.sort();
        for states in sccs {
            let mut member = vec![false; n];
            for &s in &states {
                member[s] = true;
            }
            let closed = states
                .iter()
                .all(|&s| self.rows[s].iter().all(|(j, _)| member[*j]));
            if closed {
                let period = self.period(&states, &member);
                for &s in &states {
                    class_of[s] = Some(recurrent.len());
                }
                recurrent.push(RecurrentClass { states, period });
            }
        }
        let transient = (0..n).filter(|&s| class_of[s].is_none()).collect();
        ChainClasses {
            recurrent,
            transient,
            class_of,
        }
    }

    // gcd of level(u) + 1 - level(v) over edges inside the class
    fn period(&self, states: &[usize], member: &[bool]) -> usize {
        let mut level = vec![usize::MAX; self.len()];
        let base = states[0];
        level[base] = 0;
        let mut queue = std::collections::VecDeque::from([base]);
        while let Some(u) = queue.pop_front() {
            for (v, _) in &self.rows[u] {
                if member[*v] && level[*v] == usize::MAX {
                    level[*v] = level[u] + 1;
                    queue.push_back(*v);
                }
            }
        }
        let mut g = 0usize;
        for &u in states {
            for (v, _) in &self.rows[u] {
                if member[*v] {
                    let d = (level[u] as i64 + 1 - level[*v] as i64).unsigned_abs() as usize;
                    g = g.gcd(&d);
                }
            }
        }
        g.max(1)
    }

    /// The unique stationary law of an irreducible closed class, dense over
    /// all states.
    pub fn stationary(&self, class: &RecurrentClass) -> Vec<Rational> {
        let c = class.states.len();
        let pos: std::collections::HashMap<usize, usize> =
            class.states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        // rows are equations j: sum_i pi_i (P_ij - delta_ij) = 0
        let mut a = vec![vec![zero(); c]; c];
        for (i, &s) in class.states.iter().enumerate() {
            a[i][i] -= one();
            for (t, w) in &self.rows[s] {
                a[pos[t]][i] += w;
            }
        }
        a[c - 1] = vec![one(); c];
        let mut b = vec![vec![zero()]; c];
        b[c - 1][0] = one();
        let sol = solve(a, b).expect("irreducible class has a unique stationary law");
        let mut out = vec![zero(); self.len()];
        for (i, &s) in class.states.iter().enumerate() {
            out[s] = sol[i][0].clone();
        }
        out
    }

    /// `h[s][c]`: probability of eventual absorption into class `c` from `s`.
    pub fn hitting_probabilities(&self, classes: &ChainClasses) -> Vec<Vec<Rational>> {
        let n = self.len();
        let k = classes.recurrent.len();
        let mut h = vec![vec![zero(); k]; n];
        for (s, c) in classes.class_of.iter().enumerate() {
            if let Some(c) = c {
                h[s][*c] = one();
            }
        }
        let t = &classes.transient;
        if t.is_empty() {
            return h;
        }
        let pos: std::collections::HashMap<usize, usize> = t.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut a = vec![vec![zero(); t.len()]; t.len()];
        let mut b = vec![vec![zero(); k]; t.len()];
        for (i, &s) in t.iter().enumerate() {
            a[i][i] += one();
            for (j, w) in &self.rows[s] {
                match classes.class_of[*j] {
                    Some(c) => b[i][c] += w,
                    None => a[i][pos[j]] -= w,
                }
            }
        }
        let sol = solve(a, b).expect("transient block is invertible");
        for (i, &s) in t.iter().enumerate() {
            h[s] = sol[i].clone();
        }
        h
    }

    /// Mass that `init` eventually places in each recurrent class.
    pub fn absorption(&self, classes: &ChainClasses, init: &[Rational]) -> Vec<Rational> {
        let h = self.hitting_probabilities(classes);
        let mut out = vec![zero(); classes.recurrent.len()];
        for (s, p) in init.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (c, hc) in h[s].iter().enumerate() {
                out[c] += p * hc;
            }
        }
        out
    }

    /// `Σ_C absorption(C) · π_C`: the Cesàro limit of `init · Pⁿ`, which is
    /// the plain limit when every class reached is aperiodic.
    pub fn limit_mixture(&self, classes: &ChainClasses, init: &[Rational]) -> Vec<Rational> {
        let absorb = self.absorption(classes, init);
        let mut out = vec![zero(); self.len()];
        for (class, a) in classes.recurrent.iter().zip(&absorb) {
            if a.is_zero() {
                continue;
            }
            let pi = self.stationary(class);
            for &s in &class.states {
                out[s] += a * &pi[s];
            }
        }
        out
    }

    /// The `power`-step chain `P^power`.
    pub fn power(&self, power: usize) -> ExactChain {
        let mut acc = ExactChain {
            rows: (0..self.len()).map(|i| vec![(i, one())]).collect(),
        };
        let mut base = self.clone();
        let mut e = power;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        acc
    }

    fn compose(&self, other: &ExactChain) -> ExactChain {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut dense = vec![zero(); self.len()];
                for (j, w) in row {
                    for (k, v) in &other.rows[*j] {
                        dense[*k] += w * v;
                    }
                }
                dense
                    .into_iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .collect()
            })
            .collect();
        ExactChain { rows }
    }

    /// Probability that a chain started from `init` ever enters `target`.
    pub fn hit_probability(&self, target: &[bool], init: &[Rational]) -> Rational {
        // target states are made absorbing; other closed classes cannot reach it
        let absorbed = self.with_absorbing(target);
        let classes = absorbed.classes();
        let absorb = absorbed.absorption(&classes, init);
        classes
            .recurrent
            .iter()
            .zip(absorb)
            .filter(|(c, _)| target[c.states[0]])
            .map(|(_, a)| a)
            .sum()
    }

    fn with_absorbing(&self, target: &[bool]) -> ExactChain {
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| if target[i] { vec![(i, one())] } else { r.clone() })
            .collect();
        ExactChain { rows }
    }

    /// Expected number of steps until `target` is entered, counting from
    /// `init` at step zero. `None` if the target is missed with positive
    /// probability.
    pub fn expected_hitting_time(&self, target: &[bool], init: &[Rational]) -> Option<Rational> {
        if self.hit_probability(target, init) != one() {
            return None;
        }
        // states reachable from init before the target
        let n = self.len();
        let mut reach = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&s| !init[s].is_zero() && !target[s]).collect();
        for &s in &stack {
            reach[s] = true;
        }
        while let Some(u) = stack.pop() {
            for (v, _) in &self.rows[u] {
                if !target[*v] && !reach[*v] {
                    reach[*v] = true;
                    stack.push(*v);
                }
            }
        }
        let live: Vec<usize> = (0..n).filter(|&s| reach[s]).collect();
        if live.is_empty() {
            return Some(zero());
        }
        let pos: std::collections::HashMap<usize, usize> = live.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let mut a = vec![vec![zero(); live.len()]; live.len()];
        let mut b = vec![vec![one()]; live.len()];
        for (i, &s) in live.iter().enumerate() {
            a[i][i] += one();
            for (j, w) in &self.rows[s] {
                if let Some(&k) = pos.get(j) {
                    a[i][k] -= w;
                }
            }
        }
        let m = solve(a, std::mem::take(&mut b))?;
        let mut total = zero();
        for (s, p) in init.iter().enumerate() {
            if let Some(&i) = pos.get(&s) {
                total += p * &m[i][0];
            }
        }
        Some(total)
    }
}

/// Least common multiple of class periods.
pub fn period_lcm(classes: &[RecurrentClass]) -> usize {
    classes.iter().fold(1usize, |acc, c| acc.lcm(&c.period))
}
