//! Solutions of the convolution equation `λ_k = μ_k ∗ λ_{k-1}` and their
//! classification.

mod classify;
mod families;
mod fourier;
pub mod hull;

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::algebra::Action;
use crate::chain::ExactChain;
use crate::error::{Error, Result};
use crate::measures::{
    limit_analysis, product_law, Carrier, LimitLawReport, LimitOptions, NoiseSpec, ProbMeasure,
};
use crate::rational::{one, zero, Rational};

pub use classify::{classify, classify_with, ClassificationReport, Note};
pub use families::{FamilyOrigin, SolutionLawFamily};
pub use fourier::{fourier_trichotomy, support_gcd, FourierReport, Trichotomy};

pub const DEFAULT_WINDOW: usize = 8;
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Families are stored explicitly at `k = 0, -1, …, -window`.
    pub window: usize,
    pub limits: LimitOptions,
    /// Largest number of atoms an exact enumeration may touch.
    pub budget: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            window: DEFAULT_WINDOW,
            limits: LimitOptions::default(),
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Candidate families `ν_k ∗ δ_x` (or their phase-anchored analogues),
/// deduplicated and pruned to the extreme points of their convex hull.
/// Each family remembers every base point that produced it.
pub fn solution_families(
    noise: &NoiseSpec,
    action: &Action,
    limits: &LimitLawReport,
    window: usize,
) -> Result<Vec<SolutionLawFamily>> {
    let n = action.space().size();
    let states = Carrier::States(n);
    let mut candidates: Vec<SolutionLawFamily> = Vec::new();
    let mut push = |f: SolutionLawFamily, x: usize| {
        if let Some(existing) = candidates.iter_mut().find(|g| g.same_laws(&f)) {
            match &mut existing.origin {
                FamilyOrigin::Extremal { base_points } | FamilyOrigin::PhaseAnchored { base_points, .. } => {
                    base_points.push(x)
                }
                _ => {}
            }
        } else {
            candidates.push(f);
        }
    };
    match &limits.nu {
        Some(nu) => {
            for x in 0..n {
                let f = SolutionLawFamily::from_element_tail(
                    noise,
                    action,
                    std::slice::from_ref(&nu.tail),
                    &ProbMeasure::point(states, x),
                    window + 1,
                    FamilyOrigin::Extremal { base_points: vec![x] },
                )?;
                push(f, x);
            }
        }
        None => {
            let l = limits.phase_period;
            for phase in 0..l {
                let cycle: Vec<ProbMeasure> = (0..l)
                    .map(|j| limits.phase_limits[(phase + l - j % l) % l].clone())
                    .collect();
                for x in 0..n {
                    let f = SolutionLawFamily::from_element_tail(
                        noise,
                        action,
                        &cycle,
                        &ProbMeasure::point(states, x),
                        window + 1,
                        FamilyOrigin::PhaseAnchored {
                            base_points: vec![x],
                            phase,
                        },
                    )?;
                    push(f, x);
                }
            }
        }
    }
    let span = candidates
        .iter()
        .map(|f| f.window_len())
        .max()
        .unwrap_or(1)
        + candidates
            .iter()
            .fold(1usize, |acc, f| num::Integer::lcm(&acc, &f.tail_cycle().len()));
    let vectors: Vec<Vec<Rational>> = candidates.iter().map(|f| f.flatten(span)).collect();
    let keep = hull::extreme_points(&vectors);
    let certified = limits.nu.is_some();
    let mut out = Vec::with_capacity(keep.len());
    for i in keep {
        let mut f = candidates[i].clone();
        f.certified_extremal = certified;
        if !f.satisfies_equation(noise, action)? {
            return Err(Error::Inconsistency("candidate family violates the equation".into()));
        }
        out.push(f);
    }
    Ok(out)
}

fn first_base_point(f: &SolutionLawFamily) -> usize {
    match &f.origin {
        FamilyOrigin::Extremal { base_points } | FamilyOrigin::PhaseAnchored { base_points, .. } => base_points[0],
        _ => 0,
    }
}

/// Extremal solution families `(x, (ν_k ∗ δ_x)_k)`; requires convergence in law.
pub fn extremal_solutions(
    noise: &NoiseSpec,
    action: &Action,
    opts: &SolverOptions,
) -> Result<Vec<(usize, SolutionLawFamily)>> {
    let limits = limit_analysis(noise, action, &opts.limits)?;
    if limits.nu.is_none() {
        return Err(Error::Unsupported(
            "backward products do not converge in law; use the phase-anchored families or simulation".into(),
        ));
    }
    Ok(solution_families(noise, action, &limits, opts.window)?
        .into_iter()
        .map(|f| (first_base_point(&f), f))
        .collect())
}

/// The stationary vector of `Π(j, i) = μ{σ : σ(i) = j}`.
pub fn stationary_law(mu: &ProbMeasure, action: &Action) -> Result<ProbMeasure> {
    if mu.carrier() != Carrier::Elements(action.semigroup().size()) {
        return Err(Error::CarrierMismatch("noise is not over the acting semigroup".into()));
    }
    let n = action.space().size();
    let rows = (0..n)
        .map(|i| mu.support().into_iter().map(|s| (action.apply(s, i), mu.weight(s).clone())).collect())
        .collect();
    let chain = ExactChain::new(rows)?;
    let classes = chain.classes();
    if classes.recurrent.len() != 1 {
        return Err(Error::Multiplicity {
            classes: classes
                .recurrent
                .iter()
                .map(|c| c.states.iter().map(|&s| action.space().label(s).to_string()).collect())
                .collect(),
        });
    }
    ProbMeasure::new(Carrier::States(n), chain.stationary(&classes.recurrent[0]))
}

/// The uniform law at every index, for a finite group acting on itself.
pub fn uniform_solution(action: &Action, noise: &NoiseSpec, window: usize) -> Result<SolutionLawFamily> {
    if !action.is_on_itself() || !action.semigroup().is_group() {
        return Err(Error::Unsupported("the uniform solution needs a group acting on itself".into()));
    }
    let u = ProbMeasure::uniform(Carrier::States(action.space().size()));
    let w = (window + 1).max(noise.prefix_len());
    let f = SolutionLawFamily::new(vec![u.clone(); w], vec![u], FamilyOrigin::UniformGroup)?;
    if !f.satisfies_equation(noise, action)? {
        return Err(Error::Inconsistency("uniform law is not invariant".into()));
    }
    Ok(f)
}

/// Right translate `k ↦ λ_k(· g⁻¹)`, the law of `X_k g`.
pub fn right_translate(action: &Action, f: &SolutionLawFamily, g: usize) -> SolutionLawFamily {
    let sg = action.semigroup();
    f.map_states(|x| sg.mul(x, g), f.origin.clone())
}

/// Whether all families are right translates of the first. `None` when the
/// action is not a group acting on itself.
pub fn translate_orbit_check(action: &Action, families: &[SolutionLawFamily]) -> Option<bool> {
    if !action.is_on_itself() || !action.semigroup().is_group() {
        return None;
    }
    let Some(first) = families.first() else {
        return Some(true);
    };
    let size = action.semigroup().size();
    Some(
        families
            .iter()
            .all(|f| (0..size).any(|g| right_translate(action, first, g).same_laws(f))),
    )
}

/// The average of the right translates of `family` over the whole group.
pub fn translate_barycenter(action: &Action, family: &SolutionLawFamily) -> Result<SolutionLawFamily> {
    let size = action.semigroup().size();
    let w = Rational::new(1.into(), (size as i64).into());
    let translates: Vec<SolutionLawFamily> = (0..size).map(|g| right_translate(action, family, g)).collect();
    let parts: Vec<(Rational, &SolutionLawFamily)> = translates.iter().map(|t| (w.clone(), t)).collect();
    SolutionLawFamily::mixture(
        &parts,
        FamilyOrigin::Mixture {
            weights: Vec::new(),
        },
    )
}

/// Degeneracy of `X_0` given the noise window `N_0, …, N_{-L+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongnessWitness {
    pub depth: usize,
    /// `E[1 - max_y P(X_0 = y | window)]`.
    pub residual: Rational,
    pub previous: Rational,
    pub verdict_hint: bool,
}

fn residual_at(
    noise: &NoiseSpec,
    family: &SolutionLawFamily,
    action: &Action,
    depth: usize,
) -> Result<Rational> {
    let entry = family.at(-(depth as i64));
    let n = action.space().size();
    let prod = if depth == 0 {
        None
    } else {
        Some(product_law(noise, depth, action.semigroup())?)
    };
    let conditional_gap = |s: Option<usize>| {
        let mut out = vec![zero(); n];
        for x in entry.support() {
            let y = s.map_or(x, |s| action.apply(s, x));
            out[y] += entry.weight(x);
        }
        one() - out.into_iter().max().unwrap_or_else(zero)
    };
    Ok(match prod {
        None => conditional_gap(None),
        Some(p) => p
            .support()
            .into_iter()
            .map(|s| p.weight(s) * conditional_gap(Some(s)))
            .sum(),
    })
}

/// The conditional law of `X_0` given the window depends on the window
/// only through the product `N_0 ⋯ N_{-L+1}`, so the enumeration runs
/// over the exact product law.
pub fn strongness_witness(
    noise: &NoiseSpec,
    family: &SolutionLawFamily,
    action: &Action,
    depth: usize,
    budget: usize,
) -> Result<StrongnessWitness> {
    if depth == 0 {
        return Err(Error::Config("depth must be at least 1".into()));
    }
    let work = depth
        .saturating_mul(action.semigroup().size())
        .saturating_mul(noise.support_at_or_below(0).len());
    if work > budget {
        return Err(Error::Capacity {
            what: format!("exact window enumeration of {work} atoms"),
            cap: budget,
        });
    }
    let residual = residual_at(noise, family, action, depth)?;
    let previous = residual_at(noise, family, action, depth - 1)?;
    let threshold = Rational::new(1.into(), 1024.into());
    let verdict_hint = residual <= previous && residual < threshold;
    Ok(StrongnessWitness {
        depth,
        residual,
        previous,
        verdict_hint,
    })
}

/// Exact joint law of `(X_0, N_0, N_{-1}, …, N_{-d+1})` for a family, keyed by
/// `(x, [n_0, …, n_{-d+1}])`.
pub fn window_joint_law(
    noise: &NoiseSpec,
    family: &SolutionLawFamily,
    action: &Action,
    depth: usize,
    budget: usize,
) -> Result<BTreeMap<(usize, Vec<usize>), Rational>> {
    let entry = family.at(-(depth as i64));
    let supports: Vec<Vec<usize>> = (0..depth).map(|j| noise.at(-(j as i64)).support()).collect();
    let atoms = supports
        .iter()
        .fold(entry.support().len(), |acc, s| acc.saturating_mul(s.len()));
    if atoms > budget {
        return Err(Error::Capacity {
            what: format!("joint law with {atoms} atoms"),
            cap: budget,
        });
    }
    // (current state, word so far read from the deep end, weight)
    let mut layer: Vec<(usize, Vec<usize>, Rational)> = entry
        .support()
        .into_iter()
        .map(|x| (x, Vec::new(), entry.weight(x).clone()))
        .collect();
    for j in (0..depth).rev() {
        let mu = noise.at(-(j as i64));
        let mut next = Vec::with_capacity(layer.len() * supports[j].len());
        for (x, word, w) in &layer {
            for &s in &supports[j] {
                let mut word = word.clone();
                word.push(s);
                next.push((action.apply(s, *x), word, w * mu.weight(s)));
            }
        }
        layer = next;
    }
    let mut out: BTreeMap<(usize, Vec<usize>), Rational> = BTreeMap::new();
    for (x, mut word, w) in layer {
        word.reverse();
        *out.entry((x, word)).or_insert_with(zero) += w;
    }
    Ok(out)
}

/// Whether a joint law keyed by `(x, word)` equals the product of the law
/// of `x` and the law of the word.
pub fn factorizes(joint: &BTreeMap<(usize, Vec<usize>), Rational>) -> bool {
    let mut px: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut pw: BTreeMap<&Vec<usize>, Rational> = BTreeMap::new();
    for ((x, word), w) in joint {
        *px.entry(*x).or_insert_with(zero) += w;
        *pw.entry(word).or_insert_with(zero) += w;
    }
    let total: Rational = joint.values().cloned().sum();
    if !total.is_one() {
        return false;
    }
    px.iter().all(|(x, a)| {
        pw.iter().all(|(word, b)| {
            let got = joint.get(&(*x, (*word).clone())).cloned().unwrap_or_else(zero);
            got == a * b
        })
    }) && !px.values().any(|v| v.is_zero())
}

#[cfg(test)]
mod tests;
