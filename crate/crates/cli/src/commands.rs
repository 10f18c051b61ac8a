use std::fmt::Write as _;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

use selfsim_core::dynamics::{
    birkhoff_experiment, build_hypercyclic_wreath, hypercyclicity_coverage, BirkhoffGroup, LazyWreathElement,
    LetterDistribution,
};
use selfsim_core::haar::{exact_mixing_check, measure_preservation_check, singleton_cones, HaarSampler};
use selfsim_core::nucleus::{compute_nucleus, cyclicity_certificate, presentations, NucleusStatus, Verdict};
use selfsim_core::quotients::{
    cyclic_at_depth, is_fractal_at_depth, is_super_strongly_fractal_at_depth, CyclicityAtDepth, ElementSpec,
};
use selfsim_core::shiftspace::{commute_check, non_cyclicity_certificate, orbit_span, FpSeq, NonCyclicity};
use selfsim_core::{ConeSpec, MealyAutomaton, PermGroup, Vertex};

use crate::input::{load_automaton, parse_indices, usage, GroupSpec};
use crate::{AutomatonCmd, Cli, Command, HaarCmd, Report, Status};

pub fn dispatch(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Automaton(cmd) => automaton(cmd),
        Command::Quotient {
            gens,
            depth,
            skip_fractality,
        } => quotient(&GroupSpec::parse(gens)?, *depth, g.cap, *skip_fractality),
        Command::Nucleus { automaton } => {
            let aut = load_automaton(automaton)?;
            let n = compute_nucleus(&aut, g.nucleus_size, g.nucleus_iter)?;
            let status = if n.is_certified() {
                Status::Ok
            } else {
                Status::Inconclusive
            };
            let core: Vec<&str> = n.core().into_iter().map(|i| n.members[i].word.as_str()).collect();
            let nucleus_automaton = match n.status {
                NucleusStatus::Certified => Some(n.nucleus_automaton()?),
                NucleusStatus::CapExceeded => None,
            };
            Report::new(
                status,
                json!({
                    "status": n.status,
                    "iterations": n.iterations,
                    "members": n.members,
                    "nucleus": core,
                    "nucleus_automaton": nucleus_automaton,
                }),
            )
        }
        Command::CyclicCert {
            automaton,
            presentations: all,
        } => cyclic_cert(&load_automaton(automaton)?, *all, g.nucleus_size, g.nucleus_iter),
        Command::Closure {
            automaton,
            word,
            depth,
            states,
        } => {
            let aut = load_automaton(automaton)?;
            let w = aut.parse_word(word).map_err(|e| usage(format!("--word: {e}")))?;
            let spec = match states {
                Some(s) => format!("{automaton}@{s}"),
                None => automaton.clone(),
            };
            let group = GroupSpec::parse(&spec)?.group(g.cap)?;
            let verdict = cyclic_at_depth(&ElementSpec::Word(aut, w), &group, *depth);
            let status = match verdict {
                CyclicityAtDepth::Equal { .. } => Status::Ok,
                CyclicityAtDepth::Proper { .. } => Status::Fails,
                CyclicityAtDepth::Undecided { .. } => Status::Inconclusive,
            };
            Report::new(status, json!({ "word": word, "depth": depth, "result": verdict }))
        }
        Command::Shift { p, pre, period, window } => shift(*p, pre, period, *window),
        Command::Haar(cmd) => haar(cmd, g.cap, g.seed),
        Command::Birkhoff {
            group,
            pattern_depth,
            patterns,
            n,
            trials,
            dist,
        } => {
            let spec = GroupSpec::parse(group)?;
            let bg = spec.birkhoff(g.cap, n + pattern_depth)?;
            let quotient = bg.quotient(*pattern_depth)?;
            let chosen = parse_indices(patterns)?
                .into_iter()
                .map(|i| {
                    quotient.get(i).cloned().ok_or_else(|| {
                        usage(format!(
                            "--patterns: index {i} out of range, the quotient has {}",
                            quotient.len()
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let cone = ConeSpec::new(*pattern_depth, chosen)?;
            let dist = match dist {
                Some(d) => LetterDistribution::parse(d).map_err(|e| usage(format!("--dist: {e}")))?,
                None => LetterDistribution::uniform(bg.arity()),
            };
            let table = birkhoff_experiment(&bg, &cone, *n, *trials, g.seed, &dist)?;
            let mut csv = String::from("trial,k,C_k,beta,deviation\n");
            for row in &table.trials {
                for (k, c) in row.values_f64.iter().enumerate() {
                    writeln!(
                        csv,
                        "{},{},{},{},{}",
                        row.trial,
                        k + 1,
                        c,
                        table.beta_f64,
                        c - table.beta_f64
                    )?;
                }
            }
            let mut report = Report::new(Status::Ok, &table)?;
            report.csv = Some(csv);
            Ok(report)
        }
        Command::Coverage { group, n, d, trials } => {
            let h = GroupSpec::parse(group)?.wreath()?.clone();
            let reference = BirkhoffGroup::Wreath(h.clone()).quotient(*n)?;
            let mut rows = Vec::new();
            let mut csv = String::from("trial,pattern,count\n");
            for t in 0..*trials {
                let elem = LazyWreathElement::new(h.clone(), g.seed, t);
                let r = hypercyclicity_coverage(&elem, &reference, *n, *d)?;
                for (i, c) in r.counts.iter().enumerate() {
                    writeln!(csv, "{t},{i},{c}")?;
                }
                rows.push(json!({ "trial": t, "report": r }));
            }
            let full = rows
                .iter()
                .filter(|r| r["report"]["hit"] == r["report"]["total"])
                .count();
            let status = if full as u64 == *trials {
                Status::Ok
            } else {
                Status::Fails
            };
            let mut report = Report::new(
                status,
                json!({ "pattern_depth": n, "search_depth": d, "patterns": reference.len(), "full_trials": full, "trials": rows }),
            )?;
            report.csv = Some(csv);
            Ok(report)
        }
        Command::BuildHypercyclic {
            h,
            depth,
            emit_portrait,
        } => {
            let h = PermGroup::parse(h).map_err(|e| usage(format!("--H: {e}")))?;
            build(&h, *depth, *emit_portrait)
        }
    }
}

fn automaton(cmd: &AutomatonCmd) -> Result<Report> {
    match cmd {
        AutomatonCmd::Validate { automaton } => {
            let aut = load_automaton(automaton)?;
            let report = aut.validate();
            let status = if report.is_ok() { Status::Ok } else { Status::Fails };
            Report::new(
                status,
                json!({ "invertible": report.is_ok(), "violations": report.violations }),
            )
        }
        AutomatonCmd::Minimize { automaton } => {
            let aut = load_automaton(automaton)?;
            let min = aut.minimize();
            let classes: Vec<(&str, &str)> = aut
                .states()
                .map(|s| (aut.name(s), min.automaton.name(min.class_of[s.0])))
                .collect();
            Report::new(
                Status::Ok,
                json!({
                    "states_before": aut.len(),
                    "states_after": min.automaton.len(),
                    "rounds": min.rounds,
                    "class_of": classes,
                    "automaton": min.automaton,
                }),
            )
        }
        AutomatonCmd::Info { automaton } => {
            let aut = load_automaton(automaton)?;
            Report::new(Status::Ok, info(&aut))
        }
    }
}

#[derive(Serialize)]
struct StateInfo<'a> {
    name: &'a str,
    output: Vec<usize>,
    transitions: Vec<&'a str>,
    identity: bool,
    on_cycle: bool,
    finitary_depth: Option<usize>,
    fully_connected: bool,
}

fn info(aut: &MealyAutomaton) -> serde_json::Value {
    let identity = aut.identity_states();
    let cyclic = aut.cyclic_states();
    let states: Vec<StateInfo> = aut
        .states()
        .map(|s| StateInfo {
            name: aut.name(s),
            output: aut.output(s).map(|p| p.one_based()).unwrap_or_default(),
            transitions: (0..aut.arity()).map(|x| aut.name(aut.next(s, x))).collect(),
            identity: identity[s.0],
            on_cycle: cyclic[s.0],
            finitary_depth: aut.finitary_depth(s),
            fully_connected: aut.is_fully_connected(s),
        })
        .collect();
    json!({
        "m": aut.arity(),
        "states": states,
        "invertible": aut.validate().is_ok(),
        "minimal_states": aut.minimize().automaton.len(),
    })
}

fn quotient(spec: &GroupSpec, depth: usize, cap: usize, skip_fractality: bool) -> Result<Report> {
    let group = spec.group(cap)?;
    let slice = group.slice(depth).context("enumerating the quotient")?;
    let stabilizers = (0..=depth)
        .map(|k| {
            let st = slice.level_stabilizer(k)?;
            Ok(json!({ "level": k, "order": st.len(), "index": slice.order() / st.len() }))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut fractality = Vec::new();
    if !skip_fractality {
        for n in 0..depth {
            let m = depth - n;
            let f = is_fractal_at_depth(&group, n, m)?;
            let s = is_super_strongly_fractal_at_depth(&group, n, m)?;
            fractality.push(json!({ "n": n, "m": m, "fractal": f.holds, "super_strongly_fractal": s.holds, "vertices": f.vertices }));
        }
    }
    let generators: Vec<&str> = slice.generators().iter().map(|(n, _)| n.as_str()).collect();
    Report::new(
        Status::Ok,
        json!({
            "depth": depth,
            "order": slice.order(),
            "generators": generators,
            "level_stabilizers": stabilizers,
            "fractality": fractality,
        }),
    )
}

fn cyclic_cert(aut: &MealyAutomaton, all: bool, size: usize, iter: usize) -> Result<Report> {
    let status_of = |v: &Verdict| match v {
        Verdict::Certified => Status::Ok,
        Verdict::FailedI | Verdict::FailedIi => Status::Fails,
        Verdict::Unknown => Status::Inconclusive,
    };
    if !all {
        let cert = cyclicity_certificate(aut, size, iter)?;
        return Report::new(status_of(&cert.verdict), &cert);
    }
    let mut rows = Vec::new();
    let mut statuses = Vec::new();
    for (label, p) in presentations(aut, size, iter)? {
        let cert = cyclicity_certificate(&p, size, iter)?;
        statuses.push(status_of(&cert.verdict));
        rows.push(json!({ "presentation": label, "states": p.names(), "certificate": cert }));
    }
    let status = if statuses.contains(&Status::Ok) {
        Status::Ok
    } else if statuses.contains(&Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Fails
    };
    Report::new(status, json!({ "presentations": rows }))
}

fn shift(p: u8, pre: &str, period: &str, window: Option<usize>) -> Result<Report> {
    let s = FpSeq::parse_periodic(p, pre, period).map_err(|e| usage(e.to_string()))?;
    let cert = non_cyclicity_certificate(&s, window)?;
    let w = match &cert {
        NonCyclicity::Certified { window, .. } => *window,
        NonCyclicity::Inconclusive { .. } => window.unwrap_or(s.period_bound().unwrap_or(0) + 1),
    };
    let span = orbit_span(&s, w)?;
    let commutes = commute_check(&s, w)?;
    let status = match cert {
        NonCyclicity::Certified { .. } => Status::Ok,
        NonCyclicity::Inconclusive { .. } => Status::Inconclusive,
    };
    Report::new(
        status,
        json!({
            "sequence": s.to_string(),
            "orbit": span.orbit,
            "window": span.window,
            "basis": span.basis,
            "dimension": span.dimension,
            "commute_check": commutes,
            "certificate": cert,
        }),
    )
}

fn haar(cmd: &HaarCmd, cap: usize, seed: u64) -> Result<Report> {
    match cmd {
        HaarCmd::CheckMixing { group, n, m } => {
            let group = GroupSpec::parse(group)?.group(cap)?;
            let slice = group.slice(n + m)?;
            let a_cones = singleton_cones(group.slice(*n)?.elements().cloned());
            let b_cones = singleton_cones(group.slice(*m)?.elements().cloned());
            let mut reports = Vec::new();
            for v in Vertex::level(group.arity(), *n) {
                for a in &a_cones {
                    for b in &b_cones {
                        reports.push(exact_mixing_check(&slice, a, b, &v)?);
                    }
                }
            }
            let failures = reports.iter().filter(|r| !r.check.holds()).count();
            let status = if failures == 0 { Status::Ok } else { Status::Fails };
            Report::new(
                status,
                json!({ "n": n, "m": m, "holds": failures == 0, "checks": reports.len(), "failures": failures, "reports": reports }),
            )
        }
        HaarCmd::CheckPreservation { group, n, m } => {
            let group = GroupSpec::parse(group)?.group(cap)?;
            let slice = group.slice(n + m)?;
            let reports = Vertex::level(group.arity(), *n)
                .map(|v| measure_preservation_check(&slice, &v, *m))
                .collect::<Result<Vec<_>, _>>()?;
            let holds = reports.iter().all(|r| r.holds());
            let status = if holds { Status::Ok } else { Status::Fails };
            Report::new(status, json!({ "n": n, "m": m, "holds": holds, "reports": reports }))
        }
        HaarCmd::Sample { group, depth, count } => {
            let source = GroupSpec::parse(group)?.sampler_source(cap, *depth)?;
            let mut sampler = HaarSampler::new(source, seed);
            let samples = (0..*count)
                .map(|_| sampler.sample(*depth))
                .collect::<Result<Vec<_>, _>>()?;
            Report::new(Status::Ok, json!({ "depth": depth, "samples": samples }))
        }
    }
}

fn build(h: &PermGroup, depth: usize, emit_portrait: bool) -> Result<Report> {
    let b = build_hypercyclic_wreath(h, depth)?;
    let verified = b.verify()?;
    let max_n = b.manifest.iter().map(|e| e.pattern_depth).max().unwrap_or(0);
    let mut coverage = Vec::new();
    let mut full = true;
    for n in 1..=max_n {
        let reference = BirkhoffGroup::Wreath(h.clone()).quotient(n)?;
        let placed = b.manifest.iter().filter(|e| e.pattern_depth == n);
        let d = placed.map(|e| e.vertex_word.len()).max().unwrap_or(0);
        let r = hypercyclicity_coverage(&b.portrait, &reference, n, d.min(b.search_depth(n)))?;
        full &= r.is_full();
        coverage.push(r);
    }
    let status = if verified { Status::Ok } else { Status::Fails };
    Report::new(
        status,
        json!({
            "depth": depth,
            "verified": verified,
            "manifest": b.manifest,
            "coverage": coverage,
            "all_placed_depths_covered": full,
            "portrait": emit_portrait.then_some(&b.portrait),
        }),
    )
}
