use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Action, FiniteSemigroup};

/// The descending powers `Σ¹ ⊇ Σ² ⊇ …` up to stabilisation, and the
/// stable set `Σ⁻`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerCore {
    pub powers: Vec<BTreeSet<usize>>,
    pub core: BTreeSet<usize>,
}

pub fn power_core(sg: &FiniteSemigroup) -> PowerCore {
    let all: Vec<usize> = (0..sg.size()).collect();
    let mut current = all.clone();
    let mut powers = vec![current.iter().copied().collect::<BTreeSet<_>>()];
    loop {
        let next = sg.set_product(&current, &all);
        if next == current {
            break;
        }
        powers.push(next.iter().copied().collect());
        current = next;
    }
    let core = powers.last().cloned().unwrap_or_default();
    PowerCore { powers, core }
}

/// `Σ⁻S`, computed as the image of the core.
pub fn core_orbit(action: &Action) -> BTreeSet<usize> {
    let core: Vec<usize> = power_core(action.semigroup()).core.into_iter().collect();
    let states: Vec<usize> = (0..action.space().size()).collect();
    action.image_of(&core, &states).into_iter().collect()
}

/// `⋂ₙ ΣⁿS`, computed from the images of every power separately.
pub fn core_orbit_by_powers(action: &Action) -> BTreeSet<usize> {
    let pc = power_core(action.semigroup());
    let states: Vec<usize> = (0..action.space().size()).collect();
    let mut acc: BTreeSet<usize> = states.iter().copied().collect();
    for p in &pc.powers {
        let elems: Vec<usize> = p.iter().copied().collect();
        let img: BTreeSet<usize> = action.image_of(&elems, &states).into_iter().collect();
        acc = acc.intersection(&img).copied().collect();
    }
    acc
}

/// Cancellative (injective) and synchronizing (constant) elements, with
/// `psi` giving the single image point of each synchronizing element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementClasses {
    pub cancellative: BTreeSet<usize>,
    pub synchronizing: BTreeSet<usize>,
    pub psi: BTreeMap<usize, usize>,
}

pub fn classify_elements(action: &Action) -> ElementClasses {
    let n = action.space().size();
    let mut cancellative = BTreeSet::new();
    let mut synchronizing = BTreeSet::new();
    let mut psi = BTreeMap::new();
    for s in 0..action.semigroup().size() {
        let row = action.row(s);
        let mut hit = vec![false; n];
        let injective = row.iter().all(|&y| !std::mem::replace(&mut hit[y], true));
        if injective {
            cancellative.insert(s);
        }
        if row.iter().all(|&y| y == row[0]) {
            synchronizing.insert(s);
            psi.insert(s, row[0]);
        }
    }
    ElementClasses {
        cancellative,
        synchronizing,
        psi,
    }
}

/// True iff `σσ₁ = σσ₂` forces `σ₁ = σ₂`, i.e. every Cayley row is injective.
pub fn is_left_cancellative(sg: &FiniteSemigroup) -> bool {
    let n = sg.size();
    sg.table().iter().all(|row| {
        let mut hit = vec![false; n];
        row.iter().all(|&c| !std::mem::replace(&mut hit[c], true))
    })
}
