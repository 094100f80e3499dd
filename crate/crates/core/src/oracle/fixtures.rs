//! Small hand-built automata used throughout the tests.

use crate::alphabet::Alphabet;
use crate::vpa::{Vpa, VpaBuilder};

fn finish(mut b: VpaBuilder, initial: &str, accepting: &str) -> Vpa {
    let (i, f) = (b.state(initial), b.state(accepting));
    b.initial(i).accepting(f);
    b.build().validated().expect("fixture is well formed")
}

/// `q2` is only reachable with an empty stack, while `q1` and `q3` disagree
/// on their return with stack symbol `q0`. Language `{c1 r, c2 r a}`.
pub fn fig1x() -> Vpa {
    let mut b = VpaBuilder::new(Alphabet::from_names(&["a"], &["c1", "c2"], &["r"]).unwrap());
    for q in ["q0", "q1", "q2", "q3", "q4", "qf"] {
        b.state(q);
    }
    b.edge("q0", "a", None, "q2")
        .edge("q4", "a", None, "qf")
        .edge("q0", "c1", None, "q1")
        .edge("q0", "c2", None, "q3")
        .edge("q1", "r", Some("q0"), "qf")
        .edge("q3", "r", Some("q0"), "q4");
    finish(b, "q0", "qf")
}

/// Merging `q1` and `q2` merges them as stack symbols too, which mixes up
/// the two returns. Language `{a1 c r1, a2 c r2}`.
pub fn fig2x() -> Vpa {
    let mut b =
        VpaBuilder::new(Alphabet::from_names(&["a1", "a2"], &["c"], &["r1", "r2"]).unwrap());
    for q in ["q0", "q1", "q2", "q3", "qf"] {
        b.state(q);
    }
    b.edge("q0", "a1", None, "q1")
        .edge("q0", "a2", None, "q2")
        .edge("q1", "c", None, "q3")
        .edge("q2", "c", None, "q3")
        .edge("q3", "r1", Some("q1"), "qf")
        .edge("q3", "r2", Some("q2"), "qf");
    finish(b, "q0", "qf")
}

/// `k` single-state modules entered by `ci` and left by `r`. Language
/// `{ci r | 1 ≤ i ≤ k}`.
pub fn sevpa(k: usize) -> Vpa {
    assert!(k >= 1, "sevpa needs at least one module");
    let calls: Vec<String> = (1..=k).map(|i| format!("c{i}")).collect();
    let mut b = VpaBuilder::new(Alphabet::from_names(&[], &calls, &["r".to_string()]).unwrap());
    b.state("q0");
    let modules: Vec<String> = (1..=k).map(|i| format!("q{i}")).collect();
    for q in &modules {
        b.state(q);
    }
    b.state("qf");
    for (c, q) in calls.iter().zip(&modules) {
        b.edge("q0", c, None, q).edge(q, "r", Some("q0"), "qf");
    }
    finish(b, "q0", "qf")
}

/// The words of each fixture's language, as strings.
pub fn fig1x_language() -> Vec<&'static str> {
    vec!["c1 r", "c2 r a"]
}

pub fn fig2x_language() -> Vec<&'static str> {
    vec!["a1 c r1", "a2 c r2"]
}

pub fn sevpa_language(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("c{i} r")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Word;
    use crate::run::enumerate_language;
    use std::collections::BTreeSet;

    fn words(v: &Vpa, ws: &[impl AsRef<str>]) -> BTreeSet<Word> {
        ws.iter()
            .map(|w| v.alphabet().parse_word(w.as_ref()).unwrap())
            .collect()
    }

    #[test]
    fn languages_up_to_eight() {
        let v = fig1x();
        assert_eq!(enumerate_language(&v, 8), words(&v, &fig1x_language()));
        let v = fig2x();
        assert_eq!(enumerate_language(&v, 8), words(&v, &fig2x_language()));
        for k in 1..=5 {
            let v = sevpa(k);
            assert_eq!(enumerate_language(&v, 8), words(&v, &sevpa_language(k)));
        }
    }

    #[test]
    fn sizes() {
        assert_eq!(fig1x().num_states(), 6);
        assert_eq!(fig2x().num_states(), 5);
        assert_eq!(sevpa(4).num_states(), 6);
    }
}
