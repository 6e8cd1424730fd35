//! Sufficient-condition classification of strongness and uniqueness.

use std::collections::BTreeSet;

use crate::algebra::{classify_elements, Action, Subgroup, Transformation};
use crate::error::{Error, Result};
use crate::measures::{limit_analysis, LimitLawReport, NoiseSpec};

use super::families::{FamilyOrigin, SolutionLawFamily};
use super::fourier::{fourier_trichotomy, Trichotomy};
use super::{solution_families, SolverOptions};

/// A verdict-bearing remark, tagged with the result it applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Note {
    AllExtremalStrong,
    SynchronizingLimit,
    CancellativeLimit,
    SingletonOrbit,
    NonStrongExtremal,
    CancellativityMissing { semigroup: bool, action: bool },
    MixtureRepresentation,
    StrongAndUniqueInLaw,
    PhaseAnchored,
    OutsideSufficientConditions,
    ExampleStationaryLaw,
    ExampleUniqueness,
    Trichotomy(Trichotomy),
}

impl Note {
    pub fn citation(&self) -> Option<&'static str> {
        Some(match self {
            Note::AllExtremalStrong => "Thm 4.2",
            Note::SynchronizingLimit => "Thm 4.6",
            Note::CancellativeLimit => "Thm 4.4",
            Note::SingletonOrbit => "Prop 4.7",
            Note::NonStrongExtremal => "Prop 4.8 / Thm 4.10",
            Note::CancellativityMissing { .. } => "Remark 4.9",
            Note::MixtureRepresentation => "Thm 2.16 / Thm 2.17(v)",
            Note::StrongAndUniqueInLaw => "Thm 2.14",
            Note::ExampleStationaryLaw => "Thm 5.1(i)",
            Note::ExampleUniqueness => "Thm 5.1(ii),(iv)",
            Note::Trichotomy(_) => "Thm 3.3",
            Note::PhaseAnchored | Note::OutsideSufficientConditions => return None,
        })
    }

    pub fn message(&self) -> String {
        match self {
            Note::AllExtremalStrong => "backward products converge a.s.; every extremal solution is strong".into(),
            Note::SynchronizingLimit => {
                "limit products are synchronizing a.s.; pathwise uniqueness holds with X_k = psi(Y_k)".into()
            }
            Note::CancellativeLimit => {
                "limit products are cancellative a.s.; pathwise uniqueness fails".into()
            }
            Note::SingletonOrbit => "every extremal base point has a singleton orbit Hx; extremals are strong".into(),
            Note::NonStrongExtremal => {
                "cancellative setting with a non-singleton orbit Hx; that extremal solution is not strong".into()
            }
            Note::CancellativityMissing { semigroup, action } => format!(
                "non-singleton orbit Hx but cancellativity fails (semigroup left-cancellative: {semigroup}, action cancellative: {action}); strongness undecided"
            ),
            Note::MixtureRepresentation => {
                "a single extremal family; every solution law is a mixture of extremals, so uniqueness in law holds".into()
            }
            Note::StrongAndUniqueInLaw => "uniqueness in law with a strong solution gives pathwise uniqueness".into(),
            Note::PhaseAnchored => {
                "no convergence in law; families are anchored on residue classes and not certified extremal".into()
            }
            Note::OutsideSufficientConditions => "outside the implemented sufficient conditions".into(),
            Note::ExampleStationaryLaw => {
                "three-state example: stationary law (1-pq, p+pq, q+pq)/(2+pq)".into()
            }
            Note::ExampleUniqueness => {
                "three-state example: uniqueness in law holds and any solution is strong".into()
            }
            Note::Trichotomy(t) => format!("cyclic group noise falls in case {}", t.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub p1: bool,
    pub p2: Option<Subgroup>,
    pub extremals: Vec<(usize, SolutionLawFamily)>,
    pub extremals_certified: bool,
    pub unique_in_law: bool,
    pub pathwise_unique: bool,
    pub all_extremal_strong: Option<bool>,
    pub trichotomy: Option<Trichotomy>,
    pub notes: Vec<Note>,
    pub limits: LimitLawReport,
}

impl ClassificationReport {
    pub fn citations(&self) -> Vec<&'static str> {
        self.notes.iter().filter_map(Note::citation).collect()
    }
}

pub fn classify(noise: &NoiseSpec, action: &Action, opts: &SolverOptions) -> Result<ClassificationReport> {
    let limits = limit_analysis(noise, action, &opts.limits)?;
    classify_with(noise, action, limits, opts)
}

fn base_points(f: &SolutionLawFamily) -> &[usize] {
    match &f.origin {
        FamilyOrigin::Extremal { base_points } | FamilyOrigin::PhaseAnchored { base_points, .. } => base_points,
        _ => &[],
    }
}

/// Elements whose residues form `ℤ/n` under addition, indexed by residue.
pub(crate) fn is_cyclic_residues(action: &Action) -> bool {
    let sg = action.semigroup();
    let n = sg.size();
    action.is_on_itself() && (0..n).all(|a| (0..n).all(|b| sg.mul(a, b) == (a + b) % n))
}

fn is_typical_example(noise: &NoiseSpec, action: &Action) -> bool {
    let sg = action.semigroup();
    if action.is_on_itself() || action.space().size() != 3 || noise.prefix_len() != 0 {
        return false;
    }
    let want: BTreeSet<Transformation> = [[1, 0, 1], [2, 2, 0]]
        .iter()
        .map(|img| Transformation::new(img.to_vec()).expect("valid image"))
        .collect();
    let got: BTreeSet<Transformation> = noise
        .tail()
        .support()
        .into_iter()
        .filter_map(|s| sg.transformation(s).cloned())
        .collect();
    got == want
}

/// Classification from a precomputed limit analysis.
pub fn classify_with(
    noise: &NoiseSpec,
    action: &Action,
    limits: LimitLawReport,
    opts: &SolverOptions,
) -> Result<ClassificationReport> {
    let families = solution_families(noise, action, &limits, opts.window)?;
    let certified = limits.nu.is_some();
    let mut notes = Vec::new();
    let p1 = limits.as_convergence;
    let p2 = limits.p2.chosen().cloned();
    let mut all_extremal_strong = None;

    if !certified {
        notes.push(Note::PhaseAnchored);
    }
    if p1 {
        all_extremal_strong = Some(true);
        notes.push(Note::AllExtremalStrong);
    } else if let Some(h) = &p2 {
        let ambient = &limits.ambient;
        let qualifying = limits.p2.qualifying();
        let singleton = |f: &SolutionLawFamily| {
            base_points(f)
                .iter()
                .any(|&x| qualifying.iter().any(|q| ambient.orbit(q, x).len() == 1))
        };
        if families.iter().all(singleton) {
            all_extremal_strong = Some(true);
            notes.push(Note::SingletonOrbit);
        } else {
            let asg = ambient.semigroup();
            let mut seeds: Vec<usize> = ambient.embed.clone();
            seeds.extend(&h.members);
            let generated = asg.subsemigroup(&seeds);
            let left_canc = generated.iter().all(|&a| {
                let mut images: Vec<usize> = generated.iter().map(|&b| asg.mul(a, b)).collect();
                images.sort_unstable();
                images.dedup();
                images.len() == generated.len()
            });
            let n = ambient.action.space().size();
            let action_canc = generated.iter().all(|&a| {
                let mut row: Vec<usize> = (0..n).map(|x| ambient.action.apply(a, x)).collect();
                row.sort_unstable();
                row.dedup();
                row.len() == n
            });
            let wide = families
                .iter()
                .any(|f| base_points(f).iter().any(|&x| ambient.orbit(h, x).len() > 1));
            if left_canc && action_canc && wide {
                all_extremal_strong = Some(false);
                notes.push(Note::NonStrongExtremal);
            } else {
                notes.push(Note::CancellativityMissing {
                    semigroup: left_canc,
                    action: action_canc,
                });
            }
        }
    }

    let unique_in_law = families.len() == 1;
    let mut pathwise_unique = false;
    if let Some(nu) = &limits.nu {
        let classes = classify_elements(action);
        let inside = |set: &BTreeSet<usize>| nu.all().all(|m| m.support().iter().all(|s| set.contains(s)));
        if inside(&classes.synchronizing) {
            pathwise_unique = true;
            if all_extremal_strong.is_none() {
                all_extremal_strong = Some(true);
            }
            notes.push(Note::SynchronizingLimit);
        } else if inside(&classes.cancellative) {
            notes.push(Note::CancellativeLimit);
        }
    }
    if unique_in_law && certified {
        notes.push(Note::MixtureRepresentation);
    }
    if !pathwise_unique && unique_in_law && certified && all_extremal_strong == Some(true) {
        pathwise_unique = true;
        notes.push(Note::StrongAndUniqueInLaw);
    }
    if all_extremal_strong.is_none() && !notes.iter().any(|n| matches!(n, Note::CancellativityMissing { .. })) {
        notes.push(Note::OutsideSufficientConditions);
    }

    let trichotomy = if is_cyclic_residues(action) {
        let t = fourier_trichotomy(action.semigroup().size(), noise)?.trichotomy;
        notes.push(Note::Trichotomy(t));
        Some(t)
    } else {
        None
    };

    if is_typical_example(noise, action) {
        notes.push(Note::ExampleStationaryLaw);
        if pathwise_unique && unique_in_law && all_extremal_strong == Some(true) {
            notes.push(Note::ExampleUniqueness);
        }
    }

    if pathwise_unique && !(unique_in_law && all_extremal_strong == Some(true)) {
        return Err(Error::Inconsistency(
            "pathwise uniqueness without uniqueness in law and strong extremals".into(),
        ));
    }

    let extremals = families
        .into_iter()
        .map(|f| (base_points(&f).first().copied().unwrap_or(0), f))
        .collect();
    Ok(ClassificationReport {
        p1,
        p2,
        extremals,
        extremals_certified: certified,
        unique_in_law,
        pathwise_unique,
        all_extremal_strong,
        trichotomy,
        notes,
        limits,
    })
}
