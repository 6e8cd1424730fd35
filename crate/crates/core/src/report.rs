//! The analyze / simulate / fourier pipelines and their reports.
//!
//! JSON field order follows struct declaration order, exact values are
//! `p/q` strings and empirical values are 12-significant-digit strings, so
//! identical inputs give byte-identical output.

use std::fmt::Write as _;

use serde::Serialize;

use crate::algebra::{classify_elements, core_orbit, is_left_cancellative, power_core, Action, Subgroup};
use crate::error::{Error, Result};
use crate::measures::{
    build_product_chain, limit_analysis, product_law, Carrier, LimitOptions, ProbMeasure, SubgroupSearch,
};
use crate::montecarlo::{
    ci_coupling, estimate_law, stopping_time_stats, write_csv, CsvRow, Observable, SimConfig, RNG_ALGORITHM,
};
use crate::rational::{fmt_sig12, to_pq};
use crate::solver::{
    classify_with, fourier_trichotomy, solution_families, stationary_law, translate_barycenter,
    translate_orbit_check, uniform_solution, FamilyOrigin, FourierReport, SolutionLawFamily, SolverOptions,
};
use crate::spec_file::{Mode, Problem};

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Atom {
    pub atom: String,
    pub exact: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct IndexedLaw {
    pub k: i64,
    pub law: Vec<Atom>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct AlgebraSection {
    pub closure_size: usize,
    pub elements: Vec<String>,
    pub core: Vec<String>,
    pub core_orbit: Vec<String>,
    pub cancellative: Vec<String>,
    pub synchronizing: Vec<String>,
    pub left_cancellative: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ClassEntry {
    pub elements: Vec<String>,
    pub period: usize,
    pub absorption: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct P2Section {
    pub status: &'static str,
    pub ambient: String,
    pub subgroup: Option<Vec<String>>,
    pub order: Option<usize>,
    pub qualifying: Vec<Vec<String>>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LimitsSection {
    pub p1: bool,
    pub converges_in_law: bool,
    pub phase_period: usize,
    pub nu: Option<Vec<IndexedLaw>>,
    pub cesaro: Vec<Atom>,
    pub phase_limits: Vec<Vec<Atom>>,
    pub recurrent_classes: Vec<ClassEntry>,
    pub p2: P2Section,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FamilySection {
    pub origin: &'static str,
    pub base_points: Vec<String>,
    pub phase: Option<usize>,
    pub certified_extremal: bool,
    pub laws: Vec<IndexedLaw>,
    pub tail_cycle: Vec<Vec<Atom>>,
    pub satisfies_equation: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SolutionsSection {
    pub window: usize,
    pub families: Vec<FamilySection>,
    pub stationary_law: Option<Vec<Atom>>,
    pub stationary_error: Option<String>,
    pub translate_orbit: Option<bool>,
    pub barycenter: Option<bool>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct NoteEntry {
    pub tag: Option<&'static str>,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ClassificationSection {
    pub p1: bool,
    pub p2_order: Option<usize>,
    pub unique_in_law: bool,
    pub pathwise_unique: bool,
    pub all_extremal_strong: Option<bool>,
    pub trichotomy: Option<&'static str>,
    pub notes: Vec<NoteEntry>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FourierSection {
    pub modulus: usize,
    pub pi: Vec<u8>,
    pub z_mu: Vec<usize>,
    pub p_mu: usize,
    pub h_mu: Vec<usize>,
    pub trichotomy: &'static str,
}

impl From<&FourierReport> for FourierSection {
    fn from(r: &FourierReport) -> Self {
        FourierSection {
            modulus: r.modulus,
            pi: r.pi.clone(),
            z_mu: r.z_mu.clone(),
            p_mu: r.p_mu,
            h_mu: r.h_mu.clone(),
            trichotomy: r.trichotomy.name(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct AnalyzeReport {
    pub mode: &'static str,
    pub states: Vec<String>,
    pub algebra: AlgebraSection,
    pub limits: LimitsSection,
    pub solutions: SolutionsSection,
    pub classification: ClassificationSection,
    pub fourier: Option<FourierSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub window: usize,
    pub subgroup_cap: usize,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        let s = SolverOptions::default();
        AnalyzeOptions {
            window: s.window,
            subgroup_cap: s.limits.subgroup_cap,
        }
    }
}

impl AnalyzeOptions {
    fn solver(&self) -> SolverOptions {
        SolverOptions {
            window: self.window,
            limits: LimitOptions {
                subgroup_cap: self.subgroup_cap,
                ..LimitOptions::default()
            },
            ..SolverOptions::default()
        }
    }
}

fn element_law(m: &ProbMeasure, action: &Action) -> Vec<Atom> {
    m.support()
        .into_iter()
        .map(|s| Atom {
            atom: action.semigroup().label(s).to_string(),
            exact: to_pq(m.weight(s)),
        })
        .collect()
}

fn state_law(m: &ProbMeasure, action: &Action) -> Vec<Atom> {
    (0..m.carrier().len())
        .map(|x| Atom {
            atom: action.space().label(x).to_string(),
            exact: to_pq(m.weight(x)),
        })
        .collect()
}

fn element_labels<'a>(action: &Action, ids: impl IntoIterator<Item = &'a usize>) -> Vec<String> {
    ids.into_iter().map(|&s| action.semigroup().label(s).to_string()).collect()
}

fn state_labels<'a>(action: &Action, ids: impl IntoIterator<Item = &'a usize>) -> Vec<String> {
    ids.into_iter().map(|&x| action.space().label(x).to_string()).collect()
}

fn subgroup_labels(ambient: &Action, h: &Subgroup) -> Vec<String> {
    element_labels(ambient, &h.members)
}

fn family_section(f: &SolutionLawFamily, action: &Action, noise_ok: bool) -> FamilySection {
    let (origin, base_points, phase) = match &f.origin {
        FamilyOrigin::Extremal { base_points } => ("extremal", base_points.clone(), None),
        FamilyOrigin::PhaseAnchored { base_points, phase } => ("phase-anchored", base_points.clone(), Some(*phase)),
        FamilyOrigin::Mixture { .. } => ("mixture", Vec::new(), None),
        FamilyOrigin::UniformGroup => ("uniform-group", Vec::new(), None),
    };
    FamilySection {
        origin,
        base_points: state_labels(action, &base_points),
        phase,
        certified_extremal: f.certified_extremal,
        laws: f
            .window()
            .iter()
            .enumerate()
            .map(|(i, m)| IndexedLaw {
                k: -(i as i64),
                law: state_law(m, action),
            })
            .collect(),
        tail_cycle: f.tail_cycle().iter().map(|m| state_law(m, action)).collect(),
        satisfies_equation: noise_ok,
    }
}

pub fn analyze(problem: &Problem, opts: &AnalyzeOptions) -> Result<AnalyzeReport> {
    let action = &problem.action;
    let noise = &problem.noise;
    let sg = action.semigroup();
    let solver = opts.solver();

    let classes = classify_elements(action);
    let algebra = AlgebraSection {
        closure_size: sg.size(),
        elements: sg.labels().to_vec(),
        core: element_labels(action, &power_core(sg).core),
        core_orbit: state_labels(action, &core_orbit(action)),
        cancellative: element_labels(action, &classes.cancellative),
        synchronizing: element_labels(action, &classes.synchronizing),
        left_cancellative: is_left_cancellative(sg),
    };

    let limits = limit_analysis(noise, action, &solver.limits)?;
    let ambient = &limits.ambient;
    let p2 = match &limits.p2 {
        SubgroupSearch::Found { chosen, qualifying } => P2Section {
            status: "found",
            ambient: ambient.description.clone(),
            subgroup: Some(subgroup_labels(&ambient.action, chosen)),
            order: Some(chosen.order()),
            qualifying: qualifying.iter().map(|h| subgroup_labels(&ambient.action, h)).collect(),
            message: None,
        },
        SubgroupSearch::NotFound => P2Section {
            status: "not-found",
            ambient: ambient.description.clone(),
            subgroup: None,
            order: None,
            qualifying: Vec::new(),
            message: None,
        },
        SubgroupSearch::NotApplicable(m) => P2Section {
            status: "not-applicable",
            ambient: ambient.description.clone(),
            subgroup: None,
            order: None,
            qualifying: Vec::new(),
            message: Some(m.clone()),
        },
        SubgroupSearch::CapacityExceeded { message, .. } => P2Section {
            status: "capacity-exceeded",
            ambient: ambient.description.clone(),
            subgroup: None,
            order: None,
            qualifying: Vec::new(),
            message: Some(message.clone()),
        },
    };
    let limits_section = LimitsSection {
        p1: limits.as_convergence,
        converges_in_law: limits.converges_in_law,
        phase_period: limits.phase_period,
        nu: limits.nu.as_ref().map(|nu| {
            let mut out: Vec<IndexedLaw> = nu
                .prefix
                .iter()
                .enumerate()
                .map(|(i, m)| IndexedLaw {
                    k: -(i as i64),
                    law: element_law(m, action),
                })
                .collect();
            out.push(IndexedLaw {
                k: -(nu.prefix.len() as i64),
                law: element_law(&nu.tail, action),
            });
            out
        }),
        cesaro: element_law(&limits.cesaro, action),
        phase_limits: limits.phase_limits.iter().map(|m| element_law(m, action)).collect(),
        recurrent_classes: limits
            .recurrent_classes
            .iter()
            .zip(&limits.absorption)
            .map(|(c, a)| ClassEntry {
                elements: element_labels(action, &c.states),
                period: c.period,
                absorption: to_pq(a),
            })
            .collect(),
        p2,
    };

    let report = classify_with(noise, action, limits, &solver)?;
    let families: Vec<SolutionLawFamily> = report.extremals.iter().map(|(_, f)| f.clone()).collect();
    let family_sections = families
        .iter()
        .map(|f| Ok(family_section(f, action, f.satisfies_equation(noise, action)?)))
        .collect::<Result<Vec<_>>>()?;
    let (stationary, stationary_error) = match stationary_law(noise.tail(), action) {
        Ok(u) => (Some(state_law(&u, action)), None),
        Err(e @ Error::Multiplicity { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let translate = translate_orbit_check(action, &families);
    let barycenter = match (translate, families.first()) {
        (Some(_), Some(f)) => {
            let uniform = uniform_solution(action, noise, opts.window)?;
            Some(translate_barycenter(action, f)?.same_laws(&uniform))
        }
        _ => None,
    };
    let solutions = SolutionsSection {
        window: opts.window,
        families: family_sections,
        stationary_law: stationary,
        stationary_error,
        translate_orbit: translate,
        barycenter,
    };
    let classification = ClassificationSection {
        p1: report.p1,
        p2_order: report.p2.as_ref().map(Subgroup::order),
        unique_in_law: report.unique_in_law,
        pathwise_unique: report.pathwise_unique,
        all_extremal_strong: report.all_extremal_strong,
        trichotomy: report.trichotomy.map(|t| t.name()),
        notes: report
            .notes
            .iter()
            .map(|n| NoteEntry {
                tag: n.citation(),
                text: n.message(),
            })
            .collect(),
    };
    let fourier = match problem.mode {
        Mode::CyclicGroup(n) => Some(FourierSection::from(&fourier_trichotomy(n, noise)?)),
        _ => None,
    };
    Ok(AnalyzeReport {
        mode: problem.mode.name(),
        states: action.space().labels().to_vec(),
        algebra,
        limits: limits_section,
        solutions,
        classification,
        fourier,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn list_or_none(items: &[String]) -> String {
    if items.is_empty() {
        "(none)".to_string()
    } else {
        items.join(", ")
    }
}

fn fmt_law(law: &[Atom]) -> String {
    law.iter()
        .map(|a| format!("{}: {}", a.atom, a.exact))
        .collect::<Vec<_>>()
        .join(", ")
}

impl AnalyzeReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// True when the subgroup search hit its cap.
    pub fn capacity_exceeded(&self) -> bool {
        self.limits.p2.status == "capacity-exceeded"
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let a = &self.algebra;
        let _ = writeln!(o, "mode: {}", self.mode);
        let _ = writeln!(o, "states: {}", self.states.join(" "));
        let _ = writeln!(o, "\n[algebra]");
        let _ = writeln!(o, "closure size: {}", a.closure_size);
        let _ = writeln!(o, "elements: {}", a.elements.join(", "));
        let _ = writeln!(o, "stable core: {}", a.core.join(", "));
        let _ = writeln!(o, "core image of states: {}", a.core_orbit.join(" "));
        let _ = writeln!(o, "cancellative elements: {}", list_or_none(&a.cancellative));
        let _ = writeln!(o, "synchronizing elements: {}", list_or_none(&a.synchronizing));
        let _ = writeln!(o, "left-cancellative: {}", yes_no(a.left_cancellative));

        let l = &self.limits;
        let _ = writeln!(o, "\n[limits]");
        let _ = writeln!(o, "P1' (a.s. convergence): {}", yes_no(l.p1));
        let _ = writeln!(o, "convergence in law: {}", yes_no(l.converges_in_law));
        let _ = writeln!(o, "period of backward products: {}", l.phase_period);
        for c in &l.recurrent_classes {
            let _ = writeln!(
                o,
                "recurrent class {{{}}} period {} absorption {}",
                c.elements.join(", "),
                c.period,
                c.absorption
            );
        }
        match &l.nu {
            Some(nu) => {
                for law in nu {
                    let _ = writeln!(o, "nu[{}]: {}", law.k, fmt_law(&law.law));
                }
            }
            None => {
                for (r, law) in l.phase_limits.iter().enumerate() {
                    let _ = writeln!(o, "phase {r} limit: {}", fmt_law(law));
                }
            }
        }
        let _ = writeln!(o, "cesaro: {}", fmt_law(&l.cesaro));
        let _ = writeln!(o, "P2' subgroup search ({}): {}", l.p2.ambient, l.p2.status);
        if let Some(h) = &l.p2.subgroup {
            let _ = writeln!(o, "P2' subgroup H (order {}): {{{}}}", h.len(), h.join(", "));
            let _ = writeln!(o, "qualifying subgroups: {}", l.p2.qualifying.len());
        }
        if let Some(m) = &l.p2.message {
            let _ = writeln!(o, "P2' note: {m}");
        }

        let s = &self.solutions;
        let _ = writeln!(o, "\n[solutions]");
        for (i, f) in s.families.iter().enumerate() {
            let _ = writeln!(
                o,
                "family {} ({}{}, base points {}{}):",
                i + 1,
                f.origin,
                if f.certified_extremal { ", certified extremal" } else { "" },
                f.base_points.join(" "),
                f.phase.map(|p| format!(", phase {p}")).unwrap_or_default()
            );
            for law in f.laws.iter().take(3) {
                let _ = writeln!(o, "  lambda[{}]: {}", law.k, fmt_law(&law.law));
            }
            for (j, law) in f.tail_cycle.iter().enumerate() {
                let _ = writeln!(o, "  tail[{j}]: {}", fmt_law(law));
            }
        }
        match (&s.stationary_law, &s.stationary_error) {
            (Some(u), _) => {
                let _ = writeln!(o, "stationary law: {}", fmt_law(u));
            }
            (None, Some(e)) => {
                let _ = writeln!(o, "stationary law: {e}");
            }
            _ => {}
        }
        if let Some(t) = s.translate_orbit {
            let _ = writeln!(o, "families are right translates: {}", yes_no(t));
        }
        if let Some(b) = s.barycenter {
            let _ = writeln!(o, "translate barycenter is uniform: {}", yes_no(b));
        }

        let c = &self.classification;
        let _ = writeln!(o, "\n[classification]");
        let _ = writeln!(o, "unique in law: {}", yes_no(c.unique_in_law));
        let _ = writeln!(o, "pathwise unique: {}", yes_no(c.pathwise_unique));
        let _ = writeln!(
            o,
            "all extremal solutions strong: {}",
            c.all_extremal_strong.map_or("undecided", yes_no)
        );
        if let Some(t) = c.trichotomy {
            let _ = writeln!(o, "trichotomy: {t}");
        }
        for n in &c.notes {
            match n.tag {
                Some(tag) => {
                    let _ = writeln!(o, "- {tag} applied: {}", n.text);
                }
                None => {
                    let _ = writeln!(o, "- {}", n.text);
                }
            }
        }
        if let Some(f) = &self.fourier {
            o.push_str("\n[fourier]\n");
            o.push_str(&fourier_text(f));
        }
        o
    }
}

fn fourier_text(f: &FourierSection) -> String {
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let pi: Vec<usize> = f.pi.iter().map(|&b| b as usize).collect();
    format!(
        "modulus: {}\npi: {}\nZ_mu: {{{}}}\np_mu: {}\nH_mu: {{{}}}\ntrichotomy: {}\n",
        f.modulus,
        join(&pi),
        join(&f.z_mu),
        f.p_mu,
        join(&f.h_mu),
        f.trichotomy
    )
}

/// The character analysis alone, for cyclic-group problems.
pub fn fourier(problem: &Problem) -> Result<FourierSection> {
    match problem.mode {
        Mode::CyclicGroup(n) => Ok(FourierSection::from(&fourier_trichotomy(n, &problem.noise)?)),
        _ => Err(Error::Unsupported("fourier needs a `group Z N` problem".into())),
    }
}

impl FourierSection {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn to_text(&self) -> String {
        fourier_text(self)
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SimConfigSection {
    pub depth: usize,
    pub trials: u64,
    pub seed: u64,
    pub rng: &'static str,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SimRow {
    pub atom: String,
    pub exact: Option<String>,
    pub empirical: String,
    pub stderr: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SimulateReport {
    pub config: SimConfigSection,
    /// How `X_{-L}` was drawn for the state rows.
    pub entry: String,
    /// Exact `P(T > L)`: the mass of paths whose product has not yet
    /// stabilized at the simulated depth.
    pub truncation: Option<String>,
    pub analysis_error: Option<String>,
    pub rows: Vec<SimRow>,
    #[serde(skip)]
    csv_rows: Vec<CsvRow>,
}

pub fn simulate(problem: &Problem, cfg: &SimConfig, opts: &AnalyzeOptions) -> Result<SimulateReport> {
    let action = &problem.action;
    let noise = &problem.noise;
    let sg = action.semigroup();
    let n = action.space().size();
    let solver = opts.solver();

    let family = limit_analysis(noise, action, &solver.limits)
        .and_then(|limits| solution_families(noise, action, &limits, opts.window));
    let (family, analysis_error) = match family {
        Ok(mut fams) if !fams.is_empty() => (Some(fams.swap_remove(0)), None),
        Ok(_) => (None, Some("no solution family".to_string())),
        Err(e) => (None, Some(e.to_string())),
    };
    let uniform = ProbMeasure::uniform(Carrier::States(n));
    let (entry, entry_desc, exact_state) = match &family {
        Some(f) => {
            let base = match &f.origin {
                FamilyOrigin::Extremal { base_points } | FamilyOrigin::PhaseAnchored { base_points, .. } => {
                    action.space().label(base_points[0]).to_string()
                }
                _ => String::new(),
            };
            (
                f.at(-(cfg.depth as i64)).clone(),
                format!("law of X at -{} in the solution family based at {base}", cfg.depth),
                Some(f.at(0).clone()),
            )
        }
        None => (uniform, "uniform (no solution family available)".to_string(), None),
    };

    let mut rows = Vec::new();
    let exact_product = product_law(noise, cfg.depth, sg)?;
    let products = estimate_law(noise, action, cfg, &Observable::Product)?;
    for s in 0..sg.size() {
        if products.counts[s] == 0 && exact_product.weight(s) == &crate::rational::zero() {
            continue;
        }
        rows.push(CsvRow {
            atom: format!("product[{}]", sg.label(s)),
            exact: Some(exact_product.weight(s).clone()),
            empirical: products.frequency(s),
            stderr: products.stderr(s),
        });
    }
    let states = estimate_law(noise, action, cfg, &Observable::State(entry.clone()))?;
    for x in 0..n {
        rows.push(CsvRow {
            atom: format!("state[{}]", action.space().label(x)),
            exact: exact_state.as_ref().map(|m| m.weight(x).clone()),
            empirical: states.frequency(x),
            stderr: states.stderr(x),
        });
    }
    let stop = stopping_time_stats(noise, action, cfg)?;
    if let (Some(mean), Some(se)) = (stop.mean, stop.stderr) {
        rows.push(CsvRow {
            atom: "stopping[mean]".into(),
            exact: stop.exact_mean.clone(),
            empirical: mean,
            stderr: se,
        });
    }
    let f = stop.unstopped_frequency;
    rows.push(CsvRow {
        atom: "stopping[beyond_depth]".into(),
        exact: stop.exact_tail.clone(),
        empirical: f,
        stderr: (f * (1.0 - f) / cfg.trials as f64).sqrt(),
    });
    let coupling = ci_coupling(noise, action, &entry, &entry, cfg)?;
    rows.push(CsvRow {
        atom: "coupling[collision]".into(),
        exact: Some(coupling.exact.clone()),
        empirical: coupling.frequency,
        stderr: coupling.stderr,
    });

    let truncation = if noise.prefix_len() == 0 {
        Some(to_pq(&build_product_chain(noise, sg)?.stopping_tail(cfg.depth)))
    } else {
        None
    };
    Ok(SimulateReport {
        config: SimConfigSection {
            depth: cfg.depth,
            trials: cfg.trials,
            seed: cfg.seed,
            rng: RNG_ALGORITHM,
        },
        entry: entry_desc,
        truncation,
        analysis_error,
        rows: rows
            .iter()
            .map(|r| SimRow {
                atom: r.atom.clone(),
                exact: r.exact.as_ref().map(to_pq),
                empirical: fmt_sig12(r.empirical),
                stderr: fmt_sig12(r.stderr),
            })
            .collect(),
        csv_rows: rows,
    })
}

impl SimulateReport {
    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn csv(&self) -> String {
        write_csv(&self.csv_rows)
    }

    pub fn to_text(&self) -> String {
        let mut o = String::new();
        let c = &self.config;
        let _ = writeln!(o, "depth {} trials {} seed {} rng {}", c.depth, c.trials, c.seed, c.rng);
        let _ = writeln!(o, "entry: {}", self.entry);
        if let Some(t) = &self.truncation {
            let _ = writeln!(o, "P(T > depth) = {t}");
        }
        if let Some(e) = &self.analysis_error {
            let _ = writeln!(o, "exact comparison unavailable: {e}");
        }
        let width = self.rows.iter().map(|r| r.atom.len()).max().unwrap_or(4).max(4);
        let _ = writeln!(o, "{:width$}  {:>14}  {:>18}  {:>18}", "atom", "exact", "empirical", "stderr");
        for r in &self.rows {
            let _ = writeln!(
                o,
                "{:width$}  {:>14}  {:>18}  {:>18}",
                r.atom,
                r.exact.as_deref().unwrap_or("-"),
                r.empirical,
                r.stderr
            );
        }
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec_file::parse_spec;

    fn problem(text: &str) -> Problem {
        parse_spec(text).unwrap().build().unwrap()
    }

    #[test]
    fn typical_analysis() {
        let p = problem("space 3\ngen s1 = 2 1 2\ngen s2 = 3 3 1\nnoise iid s1:1/2 s2:1/2\n");
        let r = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.algebra.closure_size, 7);
        assert!(r.limits.p1);
        assert_eq!(r.limits.p2.order, Some(3));
        assert!(r.classification.pathwise_unique);
        let u = r.solutions.stationary_law.as_ref().unwrap();
        assert!(u.iter().all(|a| a.exact == "1/3"));
        assert_eq!(r.to_json(), analyze(&p, &AnalyzeOptions::default()).unwrap().to_json());
        assert!(r.to_text().contains("Thm 4.6 applied"));
    }

    #[test]
    fn rotation_analysis() {
        let p = problem("group Z 4\nnoise iid 1:1\n");
        let r = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.solutions.families.len(), 4);
        assert_eq!(r.solutions.translate_orbit, Some(true));
        assert_eq!(r.solutions.barycenter, Some(true));
        assert_eq!(r.fourier.as_ref().unwrap().trichotomy, "C2");
        assert!(r.solutions.stationary_law.is_some());
    }

    #[test]
    fn fourier_needs_cyclic() {
        let p = problem("space 2\ngen a = 2 1\nnoise iid a:1\n");
        assert!(matches!(fourier(&p), Err(Error::Unsupported(_))));
    }

    #[test]
    fn small_simulation() {
        let p = problem("group Z 2\nnoise iid 0:1/2 1:1/2\n");
        let cfg = SimConfig::new(8, 1000, 42).unwrap();
        let r = simulate(&p, &cfg, &AnalyzeOptions::default()).unwrap();
        let csv = r.csv();
        assert!(csv.starts_with("atom,exact,empirical,stderr\nproduct[0],1/2,"));
        assert!(csv.contains("\nstate[1],1/2,"));
        assert!(csv.contains("\ncoupling[collision],1/2,"));
        assert_eq!(csv, simulate(&p, &cfg, &AnalyzeOptions::default()).unwrap().csv());
    }
}
