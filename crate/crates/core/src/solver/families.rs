//! Solution law families `(λ_k)_{k ≤ 0}` stored as a finite window plus a
//! periodic tail.

use num::Integer;

use crate::algebra::Action;
use crate::error::{Error, Result};
use crate::measures::{act, through_prefix, Carrier, NoiseSpec, ProbMeasure};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyOrigin {
    /// `λ_k = ν_k ∗ δ_x` for each listed base point `x`.
    Extremal { base_points: Vec<usize> },
    /// `λ_k = ρ_k ∗ δ_x` where `ρ` follows one residue class of the
    /// periodic backward products.
    PhaseAnchored { base_points: Vec<usize>, phase: usize },
    /// Convex combination of other families, by index into a family list.
    Mixture { weights: Vec<(usize, Rational)> },
    /// Uniform law at every index on a group acting on itself.
    UniformGroup,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionLawFamily {
    window: Vec<ProbMeasure>,
    tail: Vec<ProbMeasure>,
    pub origin: FamilyOrigin,
    /// Whether the family is known to be an extreme point of the solution set.
    pub certified_extremal: bool,
}

impl SolutionLawFamily {
    /// `window[i] = λ_{-i}`; `tail[j] = λ_{-W-j}` repeating with period `tail.len()`.
    pub fn new(window: Vec<ProbMeasure>, tail: Vec<ProbMeasure>, origin: FamilyOrigin) -> Result<Self> {
        if window.is_empty() || tail.is_empty() {
            return Err(Error::Config("a family needs a window and a tail".into()));
        }
        let carrier = window[0].carrier();
        if !matches!(carrier, Carrier::States(_)) || window.iter().chain(&tail).any(|m| m.carrier() != carrier) {
            return Err(Error::CarrierMismatch("family laws must share one state carrier".into()));
        }
        let mut f = SolutionLawFamily {
            window,
            tail,
            origin,
            certified_extremal: false,
        };
        f.shrink_tail();
        Ok(f)
    }

    /// Builds `k ↦ ρ_k ∗ entry` where the element laws `ρ_k` equal
    /// `element_tail[j mod L]` at `k = -m-j` and are pushed through the
    /// noise prefix above that.
    pub fn from_element_tail(
        noise: &NoiseSpec,
        action: &Action,
        element_tail: &[ProbMeasure],
        entry: &ProbMeasure,
        window: usize,
        origin: FamilyOrigin,
    ) -> Result<Self> {
        let m = noise.prefix_len();
        let w = window.max(m).max(1);
        let l = element_tail.len();
        let pushed = through_prefix(noise, &element_tail[0], action.semigroup())?;
        let elem = |i: usize| if i < m { &pushed[i] } else { &element_tail[(i - m) % l] };
        let laws = (0..w).map(|i| act(elem(i), entry, action)).collect::<Result<Vec<_>>>()?;
        let tail = (0..l).map(|j| act(elem(w + j), entry, action)).collect::<Result<Vec<_>>>()?;
        Self::new(laws, tail, origin)
    }

    fn shrink_tail(&mut self) {
        let l = self.tail.len();
        if let Some(d) = (1..l).find(|&d| l % d == 0 && (0..l).all(|j| self.tail[j] == self.tail[(j + d) % l])) {
            self.tail.truncate(d);
        }
    }

    pub fn carrier(&self) -> Carrier {
        self.window[0].carrier()
    }

    pub fn window_len(&self) -> usize {
        self.window.len()
    }

    pub fn window(&self) -> &[ProbMeasure] {
        &self.window
    }

    pub fn tail_cycle(&self) -> &[ProbMeasure] {
        &self.tail
    }

    /// `λ_k` for `k ≤ 0`.
    pub fn at(&self, k: i64) -> &ProbMeasure {
        assert!(k <= 0);
        let i = (-k) as usize;
        match self.window.get(i) {
            Some(m) => m,
            None => &self.tail[(i - self.window.len()) % self.tail.len()],
        }
    }

    /// `λ_k = μ_k ∗ λ_{k-1}` at every represented index, exactly.
    pub fn satisfies_equation(&self, noise: &NoiseSpec, action: &Action) -> Result<bool> {
        let span = self.window.len().max(noise.prefix_len()) + self.tail.len();
        for i in 0..span {
            let k = -(i as i64);
            if act(noise.at(k), self.at(k - 1), action)? != *self.at(k) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Number of indices that determine the family: enough to cover both
    /// windows and a common tail period.
    fn span_with(&self, other: &SolutionLawFamily) -> usize {
        self.window.len().max(other.window.len()) + self.tail.len().lcm(&other.tail.len())
    }

    pub fn same_laws(&self, other: &SolutionLawFamily) -> bool {
        self.carrier() == other.carrier()
            && (0..self.span_with(other)).all(|i| self.at(-(i as i64)) == other.at(-(i as i64)))
    }

    /// Concatenated weights of `λ_0, …, λ_{-(span-1)}`.
    pub fn flatten(&self, span: usize) -> Vec<Rational> {
        (0..span)
            .flat_map(|i| self.at(-(i as i64)).weights().to_vec())
            .collect()
    }

    /// Union of the supports of all laws.
    pub fn support(&self) -> Vec<usize> {
        let n = self.carrier().len();
        let mut hit = vec![false; n];
        for m in self.window.iter().chain(&self.tail) {
            for x in m.support() {
                hit[x] = true;
            }
        }
        (0..n).filter(|&x| hit[x]).collect()
    }

    /// The image family under a state map applied at every index.
    pub fn map_states(&self, f: impl Fn(usize) -> usize, origin: FamilyOrigin) -> SolutionLawFamily {
        let c = self.carrier();
        let push = |m: &ProbMeasure| m.pushforward(c, &f);
        SolutionLawFamily {
            window: self.window.iter().map(push).collect(),
            tail: self.tail.iter().map(push).collect(),
            origin,
            certified_extremal: false,
        }
    }

    /// `Σ wᵢ Λᵢ` index by index.
    pub fn mixture(parts: &[(Rational, &SolutionLawFamily)], origin: FamilyOrigin) -> Result<SolutionLawFamily> {
        if parts.is_empty() {
            return Err(Error::InvalidMeasure("empty mixture".into()));
        }
        let w = parts.iter().map(|(_, f)| f.window.len()).max().unwrap_or(1);
        let l = parts.iter().fold(1usize, |acc, (_, f)| acc.lcm(&f.tail.len()));
        let law_at = |i: usize| {
            let comps: Vec<(Rational, &ProbMeasure)> =
                parts.iter().map(|(c, f)| (c.clone(), f.at(-(i as i64)))).collect();
            ProbMeasure::mixture(&comps)
        };
        let window = (0..w).map(law_at).collect::<Result<Vec<_>>>()?;
        let tail = (w..w + l).map(law_at).collect::<Result<Vec<_>>>()?;
        Self::new(window, tail, origin)
    }
}
