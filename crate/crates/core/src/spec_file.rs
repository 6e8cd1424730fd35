//! The line-oriented problem format.
//!
//! ```text
//! # comment
//! space 3
//! gen s1 = 2 1 2
//! gen s2 = 3 3 1
//! noise iid s1:1/2 s2:1/2
//! noise at 0 s1:1
//! ```
//!
//! `group Z N` replaces `space`/`gen` with the cyclic group acting on
//! itself; `group self` makes the group generated by the `gen` maps act on
//! itself by left multiplication.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::algebra::{generate_named_closure, Action, FiniteSemigroup, StateSpace, Transformation};
use crate::error::{Error, Result};
use crate::measures::{Carrier, NoiseSpec, ProbMeasure};
use crate::rational::{one, parse_rational, to_pq, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupDecl {
    Cyclic(usize),
    OnItself,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    SemigroupAction,
    GroupOnItself,
    CyclicGroup(usize),
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::SemigroupAction => "semigroup-action",
            Mode::GroupOnItself => "group-on-itself",
            Mode::CyclicGroup(_) => "cyclic-group",
        }
    }
}

pub type Weights = Vec<(String, Rational)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub space: Option<usize>,
    /// Generator names with 1-based image lists.
    pub generators: Vec<(String, Vec<usize>)>,
    pub group: Option<GroupDecl>,
    pub noise_iid: Weights,
    /// Prefix overrides keyed by `K ≤ 0`.
    pub noise_at: BTreeMap<i64, Weights>,
}

/// A parsed problem ready for analysis.
#[derive(Debug, Clone)]
pub struct Problem {
    pub mode: Mode,
    pub action: Action,
    pub noise: NoiseSpec,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '\'' | '.'))
}

struct Draft {
    space: Option<usize>,
    generators: Vec<(String, Vec<usize>)>,
    group: Option<GroupDecl>,
    noise_iid: Option<Weights>,
    noise_at: BTreeMap<i64, Weights>,
}

impl Draft {
    fn atom_names(&self) -> Vec<String> {
        match self.group {
            Some(GroupDecl::Cyclic(n)) => (0..n).map(|g| g.to_string()).collect(),
            _ => self.generators.iter().map(|(n, _)| n.clone()).collect(),
        }
    }

    fn weights(&self, line: usize, items: &[&str]) -> Result<Weights> {
        if items.is_empty() {
            return Err(err(line, "noise declaration lists no atoms"));
        }
        if self.space.is_none() && self.group.is_none() {
            return Err(err(line, "noise declared before space or group"));
        }
        let names = self.atom_names();
        let mut out: Weights = Vec::new();
        for item in items {
            let (name, w) = item
                .split_once(':')
                .ok_or_else(|| err(line, format!("expected NAME:RAT, found `{item}`")))?;
            if !names.iter().any(|n| n == name) {
                return Err(err(line, format!("unknown element `{name}`")));
            }
            if out.iter().any(|(n, _)| n == name) {
                return Err(err(line, format!("element `{name}` listed twice")));
            }
            let w = parse_rational(w).ok_or_else(|| err(line, format!("bad rational `{w}`")))?;
            out.push((name.to_string(), w));
        }
        let total: Rational = out.iter().map(|(_, w)| w.clone()).sum();
        if total != one() {
            return Err(err(line, format!("weights sum to {}, not 1", to_pq(&total))));
        }
        Ok(out)
    }
}

pub fn parse_spec(text: &str) -> Result<ProblemSpec> {
    let mut d = Draft {
        space: None,
        generators: Vec::new(),
        group: None,
        noise_iid: None,
        noise_at: BTreeMap::new(),
    };
    let mut last = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        match words[0] {
            "space" => {
                if d.space.is_some() {
                    return Err(err(line, "duplicate space declaration"));
                }
                if matches!(d.group, Some(GroupDecl::Cyclic(_))) {
                    return Err(err(line, "space conflicts with group Z"));
                }
                let [_, n] = words[..] else {
                    return Err(err(line, "expected `space N`"));
                };
                let n: usize = n.parse().map_err(|_| err(line, format!("bad size `{n}`")))?;
                if n == 0 {
                    return Err(err(line, "space must be nonempty"));
                }
                d.space = Some(n);
            }
            "gen" => {
                let n = d.space.ok_or_else(|| err(line, "gen declared before space"))?;
                if words.len() < 3 || words[2] != "=" {
                    return Err(err(line, "expected `gen NAME = i1 … iN`"));
                }
                let name = words[1];
                if !valid_name(name) {
                    return Err(err(line, format!("invalid generator name `{name}`")));
                }
                if d.generators.iter().any(|(g, _)| g == name) {
                    return Err(err(line, format!("duplicate generator `{name}`")));
                }
                let image = words[3..]
                    .iter()
                    .map(|w| match w.parse::<usize>() {
                        Ok(v) if (1..=n).contains(&v) => Ok(v),
                        _ => Err(err(line, format!("bad image index `{w}` (expected 1..={n})"))),
                    })
                    .collect::<Result<Vec<usize>>>()?;
                if image.len() != n {
                    return Err(err(line, format!("image has {} entries, expected {n}", image.len())));
                }
                d.generators.push((name.to_string(), image));
            }
            "group" => {
                if d.group.is_some() {
                    return Err(err(line, "duplicate group declaration"));
                }
                d.group = Some(match words[..] {
                    [_, "Z", n] => {
                        if d.space.is_some() {
                            return Err(err(line, "group Z conflicts with space"));
                        }
                        let n: usize = n.parse().map_err(|_| err(line, format!("bad modulus `{n}`")))?;
                        if n == 0 {
                            return Err(err(line, "modulus must be positive"));
                        }
                        GroupDecl::Cyclic(n)
                    }
                    [_, "self"] => GroupDecl::OnItself,
                    _ => return Err(err(line, "expected `group Z N` or `group self`")),
                });
            }
            "noise" => match words.get(1).copied() {
                Some("iid") => {
                    if d.noise_iid.is_some() {
                        return Err(err(line, "duplicate noise iid declaration"));
                    }
                    d.noise_iid = Some(d.weights(line, &words[2..])?);
                }
                Some("at") => {
                    let k: i64 = words
                        .get(2)
                        .and_then(|k| k.parse().ok())
                        .ok_or_else(|| err(line, "expected `noise at K …`"))?;
                    if k > 0 {
                        return Err(err(line, "noise index must be ≤ 0"));
                    }
                    if d.noise_at.contains_key(&k) {
                        return Err(err(line, format!("duplicate noise at {k}")));
                    }
                    let w = d.weights(line, &words[3..])?;
                    d.noise_at.insert(k, w);
                }
                _ => return Err(err(line, "expected `noise iid` or `noise at K`")),
            },
            other => return Err(err(line, format!("unknown keyword `{other}`"))),
        }
    }
    let end = last + 1;
    if d.space.is_none() && d.group.is_none() {
        return Err(err(end, "missing space or group declaration"));
    }
    if !matches!(d.group, Some(GroupDecl::Cyclic(_))) && d.generators.is_empty() {
        return Err(err(end, "no generators declared"));
    }
    let noise_iid = d.noise_iid.ok_or_else(|| err(end, "missing noise iid declaration"))?;
    Ok(ProblemSpec {
        space: d.space,
        generators: d.generators,
        group: d.group,
        noise_iid,
        noise_at: d.noise_at,
    })
}

impl ProblemSpec {
    pub fn mode(&self) -> Mode {
        match self.group {
            Some(GroupDecl::Cyclic(n)) => Mode::CyclicGroup(n),
            Some(GroupDecl::OnItself) => Mode::GroupOnItself,
            None => Mode::SemigroupAction,
        }
    }

    /// Canonical text; parsing it gives back `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(n) = self.space {
            let _ = writeln!(out, "space {n}");
        }
        for (name, image) in &self.generators {
            let img: Vec<String> = image.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "gen {name} = {}", img.join(" "));
        }
        match self.group {
            Some(GroupDecl::Cyclic(n)) => {
                let _ = writeln!(out, "group Z {n}");
            }
            Some(GroupDecl::OnItself) => out.push_str("group self\n"),
            None => {}
        }
        let fmt = |w: &Weights| {
            w.iter()
                .map(|(n, r)| format!("{n}:{}", to_pq(r)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(out, "noise iid {}", fmt(&self.noise_iid));
        for (k, w) in self.noise_at.iter().rev() {
            let _ = writeln!(out, "noise at {k} {}", fmt(w));
        }
        out
    }

    pub fn build(&self) -> Result<Problem> {
        let mode = self.mode();
        let action = match mode {
            Mode::CyclicGroup(n) => Action::regular(FiniteSemigroup::cyclic(n)?)?,
            Mode::SemigroupAction | Mode::GroupOnItself => {
                let n = self.space.ok_or_else(|| Error::Config("missing space".into()))?;
                let space = StateSpace::numbered(n)?;
                let gens = self
                    .generators
                    .iter()
                    .map(|(name, img)| Ok((name.clone(), Transformation::from_one_based(img)?)))
                    .collect::<Result<Vec<_>>>()?;
                let sg = generate_named_closure(&space, &gens)?;
                if mode == Mode::GroupOnItself {
                    if !sg.is_group() {
                        return Err(Error::Unsupported("`group self` needs generators that form a group".into()));
                    }
                    Action::regular(sg)?
                } else {
                    Action::natural(space, sg)?
                }
            }
        };
        let sg = action.semigroup();
        let carrier = Carrier::Elements(sg.size());
        let element_of = |name: &str| -> Result<usize> {
            match mode {
                Mode::CyclicGroup(_) => name
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidElement(name.to_string())),
                _ => {
                    let img = &self
                        .generators
                        .iter()
                        .find(|(g, _)| g == name)
                        .ok_or_else(|| Error::InvalidElement(name.to_string()))?
                        .1;
                    sg.index_of(&Transformation::from_one_based(img)?)
                        .ok_or_else(|| Error::InvalidElement(name.to_string()))
                }
            }
        };
        let measure = |w: &Weights| -> Result<ProbMeasure> {
            let pairs = w
                .iter()
                .map(|(n, r)| Ok((element_of(n)?, r.clone())))
                .collect::<Result<Vec<_>>>()?;
            ProbMeasure::from_pairs(carrier, &pairs)
        };
        let tail = measure(&self.noise_iid)?;
        let depth = self.noise_at.keys().next().map_or(0, |&k| (-k) as usize + 1);
        let prefix = (0..depth)
            .map(|j| match self.noise_at.get(&-(j as i64)) {
                Some(w) => measure(w),
                None => Ok(tail.clone()),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Problem {
            mode,
            action,
            noise: NoiseSpec::new(prefix, tail)?,
        })
    }
}
