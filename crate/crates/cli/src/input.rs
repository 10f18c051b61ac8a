//! Parsing of automaton and group arguments.

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use selfsim_core::automaton::{catalog, AutomatonJson};
use selfsim_core::dynamics::BirkhoffGroup;
use selfsim_core::haar::SamplerSource;
use selfsim_core::quotients::{AutomatonGroup, WreathGroup};
use selfsim_core::{Group, MealyAutomaton, PermGroup};

/// Marks errors caused by bad arguments or input files (exit code 3).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// `catalog:<name>`, `file:<path>` or a bare path.
pub fn load_automaton(spec: &str) -> Result<MealyAutomaton> {
    if let Some(name) = spec.strip_prefix("catalog:") {
        return catalog(name).map_err(|e| usage(e.to_string()));
    }
    let path = spec.strip_prefix("file:").unwrap_or(spec);
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read `{path}`: {e}")))?;
    let json: AutomatonJson =
        serde_json::from_str(&text).map_err(|e| usage(format!("{path}:{}:{}: {e}", e.line(), e.column())))?;
    MealyAutomaton::from_json(&json).map_err(|e| usage(format!("{path}: {e}")))
}

#[derive(Clone, Debug)]
pub enum GroupSpec {
    Automaton {
        automaton: MealyAutomaton,
        states: Option<Vec<String>>,
    },
    Wreath(PermGroup),
}

impl GroupSpec {
    /// `wreath:<H>`, or an automaton spec optionally followed by
    /// `@s1,s2,…` to restrict the generating states.
    pub fn parse(spec: &str) -> Result<GroupSpec> {
        if let Some(h) = spec.strip_prefix("wreath:") {
            let h = PermGroup::parse(h).map_err(|e| usage(e.to_string()))?;
            if !h.is_transitive() {
                bail!(usage(format!("`{spec}`: the permutation group must be transitive")));
            }
            return Ok(GroupSpec::Wreath(h));
        }
        let (aut, states) = match spec.rsplit_once('@') {
            Some((a, s)) => (a, Some(s.split(',').map(|x| x.trim().to_string()).collect())),
            None => (spec, None),
        };
        Ok(GroupSpec::Automaton {
            automaton: load_automaton(aut)?,
            states,
        })
    }

    pub fn group(&self, cap: usize) -> Result<Group> {
        Ok(match self {
            GroupSpec::Wreath(h) => Group::new(WreathGroup::new(h.clone())?, cap),
            GroupSpec::Automaton { automaton, states } => {
                let source = match states {
                    None => AutomatonGroup::new(automaton.clone())?,
                    Some(names) => {
                        let ids = names
                            .iter()
                            .map(|n| automaton.state(n))
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|e| usage(e.to_string()))?;
                        AutomatonGroup::with_states(automaton.clone(), ids)?
                    }
                };
                Group::new(source, cap)
            }
        })
    }

    pub fn birkhoff(&self, cap: usize, depth: usize) -> Result<BirkhoffGroup> {
        Ok(match self {
            GroupSpec::Wreath(h) => BirkhoffGroup::Wreath(h.clone()),
            GroupSpec::Automaton { .. } => BirkhoffGroup::Slice(
                self.group(cap)?
                    .slice(depth)
                    .with_context(|| format!("enumerating the depth-{depth} quotient for sampling"))?,
            ),
        })
    }

    pub fn sampler_source(&self, cap: usize, depth: usize) -> Result<SamplerSource> {
        Ok(match self {
            GroupSpec::Wreath(h) => SamplerSource::WreathPortrait(h.clone()),
            GroupSpec::Automaton { .. } => SamplerSource::SliceUniform(self.group(cap)?.slice(depth)?),
        })
    }

    pub fn wreath(&self) -> Result<&PermGroup> {
        match self {
            GroupSpec::Wreath(h) => Ok(h),
            GroupSpec::Automaton { .. } => Err(anyhow!(usage("this command needs a `wreath:<H>` group"))),
        }
    }
}

/// Comma-separated 0-based indices.
pub fn parse_indices(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| usage(format!("`{x}` is not an index"))))
        .collect()
}
