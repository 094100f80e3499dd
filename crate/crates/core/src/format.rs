//! Line-based text format.
//!
//! ```text
//! # comment
//! alphabet internal: a
//! alphabet call: c
//! alphabet return: r
//! states: q0 q1 qf
//! initial: q0
//! final: qf
//! internal: q0 a q1
//! call: q1 c q0
//! return: q0 r q1 qf
//! ```
//!
//! Every declaration line may appear at most once; `states:` and `initial:`
//! are required. Transition lines may appear anywhere and are resolved after
//! all declarations are read.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::alphabet::{Alphabet, SymbolId, SymbolKind};
use crate::error::VpaError;
use crate::vpa::{ReturnTransition, StateId, Transition, Vpa};

fn err(line: usize, reason: impl Into<String>) -> VpaError {
    VpaError::Parse {
        line,
        reason: reason.into(),
    }
}

struct Pending<'a> {
    line: usize,
    kind: SymbolKind,
    tokens: Vec<&'a str>,
}

#[derive(Default)]
struct Sections<'a> {
    alphabet: [Option<Vec<&'a str>>; 3],
    states: Option<(usize, Vec<&'a str>)>,
    initial: Option<(usize, Vec<&'a str>)>,
    accepting: Option<(usize, Vec<&'a str>)>,
}

fn set_once<T>(slot: &mut Option<T>, value: T, line: usize, what: &str) -> Result<(), VpaError> {
    if slot.is_some() {
        return Err(err(line, format!("duplicate `{what}` declaration")));
    }
    *slot = Some(value);
    Ok(())
}

/// Parses an automaton. Errors carry the 1-based line number.
pub fn parse(text: &str) -> Result<Vpa, VpaError> {
    let mut sec = Sections::default();
    let mut pending = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap().trim();
        if content.is_empty() {
            continue;
        }
        let (head, rest) = content
            .split_once(':')
            .ok_or_else(|| err(line, "expected `<keyword>: ...`"))?;
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        let head: Vec<&str> = head.split_whitespace().collect();
        match head.as_slice() {
            ["alphabet", kind] => {
                let idx = match *kind {
                    "internal" => 0,
                    "call" => 1,
                    "return" => 2,
                    other => return Err(err(line, format!("unknown alphabet part `{other}`"))),
                };
                set_once(
                    &mut sec.alphabet[idx],
                    tokens,
                    line,
                    &format!("alphabet {kind}"),
                )?;
            }
            ["states"] => {
                if tokens.is_empty() {
                    return Err(err(line, "no states"));
                }
                set_once(&mut sec.states, (line, tokens), line, "states")?;
            }
            ["initial"] => set_once(&mut sec.initial, (line, tokens), line, "initial")?,
            ["final"] => set_once(&mut sec.accepting, (line, tokens), line, "final")?,
            [kw @ ("internal" | "call" | "return")] => {
                let kind = match *kw {
                    "internal" => SymbolKind::Internal,
                    "call" => SymbolKind::Call,
                    _ => SymbolKind::Return,
                };
                let want = if kind == SymbolKind::Return { 4 } else { 3 };
                if tokens.len() != want {
                    return Err(err(
                        line,
                        format!("`{kw}` expects {want} fields, found {}", tokens.len()),
                    ));
                }
                pending.push(Pending { line, kind, tokens });
            }
            _ => return Err(err(line, format!("unknown keyword `{}`", head.join(" ")))),
        }
    }

    let parts: Vec<Vec<&str>> = sec
        .alphabet
        .iter()
        .map(|p| p.clone().unwrap_or_default())
        .collect();
    let alphabet = Alphabet::from_names(&parts[0], &parts[1], &parts[2])
        .map_err(|e| err(last_line, e.to_string()))?;

    let (states_line, state_names) = sec
        .states
        .ok_or_else(|| err(last_line, "missing `states:` declaration"))?;
    let mut names: Vec<String> = Vec::new();
    let mut by_name = std::collections::HashMap::new();
    for s in state_names {
        if by_name.insert(s, StateId(names.len() as u32)).is_some() {
            return Err(err(states_line, format!("duplicate state `{s}`")));
        }
        names.push(s.to_string());
    }
    let state = |name: &str, line: usize| {
        by_name
            .get(name)
            .copied()
            .ok_or_else(|| err(line, format!("unknown state `{name}`")))
    };
    let state_list = |decl: Option<(usize, Vec<&str>)>| -> Result<BTreeSet<StateId>, VpaError> {
        match decl {
            None => Ok(BTreeSet::new()),
            Some((line, toks)) => toks.iter().map(|t| state(t, line)).collect(),
        }
    };

    let (init_line, _) = sec
        .initial
        .as_ref()
        .ok_or_else(|| err(last_line, "missing `initial:` declaration"))?;
    let init_line = *init_line;
    let initial = state_list(sec.initial)?;
    if initial.is_empty() {
        return Err(err(init_line, "no initial states"));
    }
    let accepting = state_list(sec.accepting)?;

    let symbol = |name: &str, kind: SymbolKind, line: usize| -> Result<SymbolId, VpaError> {
        let s = alphabet
            .lookup(name)
            .ok_or_else(|| err(line, format!("unknown symbol `{name}`")))?;
        let found = alphabet.kind(s).unwrap();
        if found != kind {
            return Err(err(
                line,
                format!("symbol `{name}` is a {found} symbol, expected {kind}"),
            ));
        }
        Ok(s)
    };

    let mut internal = BTreeSet::new();
    let mut call = BTreeSet::new();
    let mut ret = BTreeSet::new();
    for p in pending {
        let t = &p.tokens;
        let src = state(t[0], p.line)?;
        let sym = symbol(t[1], p.kind, p.line)?;
        match p.kind {
            SymbolKind::Internal => {
                internal.insert(Transition::new(src, sym, state(t[2], p.line)?));
            }
            SymbolKind::Call => {
                call.insert(Transition::new(src, sym, state(t[2], p.line)?));
            }
            SymbolKind::Return => {
                let stack = state(t[2], p.line)?;
                ret.insert(ReturnTransition::new(src, sym, stack, state(t[3], p.line)?));
            }
        }
    }

    Vpa::from_parts(alphabet, names, initial, accepting, internal, call, ret)
        .validated()
        .map_err(|e| err(last_line, e.to_string()))
}

/// Canonical text: alphabet parts, states, initial and final states, then
/// transitions in id order.
pub fn serialize(vpa: &Vpa) -> String {
    let a = vpa.alphabet();
    let n = |q: &StateId| vpa.state_name(*q);
    let mut out = String::new();
    for (label, kind) in [
        ("internal", SymbolKind::Internal),
        ("call", SymbolKind::Call),
        ("return", SymbolKind::Return),
    ] {
        let syms: Vec<&str> = a.symbols_of(kind).map(|s| a.name(s)).collect();
        line(&mut out, &format!("alphabet {label}:"), &syms);
    }
    let all: Vec<&str> = vpa.state_names().iter().map(String::as_str).collect();
    line(&mut out, "states:", &all);
    line(
        &mut out,
        "initial:",
        &vpa.initial().iter().map(n).collect::<Vec<_>>(),
    );
    line(
        &mut out,
        "final:",
        &vpa.accepting().iter().map(n).collect::<Vec<_>>(),
    );
    for t in vpa.internal_transitions() {
        writeln!(
            out,
            "internal: {} {} {}",
            n(&t.src),
            a.name(t.symbol),
            n(&t.dst)
        )
        .unwrap();
    }
    for t in vpa.call_transitions() {
        writeln!(
            out,
            "call: {} {} {}",
            n(&t.src),
            a.name(t.symbol),
            n(&t.dst)
        )
        .unwrap();
    }
    for t in vpa.return_transitions() {
        writeln!(
            out,
            "return: {} {} {} {}",
            n(&t.src),
            a.name(t.symbol),
            n(&t.stack),
            n(&t.dst)
        )
        .unwrap();
    }
    out
}

fn line(out: &mut String, head: &str, items: &[&str]) {
    out.push_str(head);
    for i in items {
        out.push(' ');
        out.push_str(i);
    }
    out.push('\n');
}
