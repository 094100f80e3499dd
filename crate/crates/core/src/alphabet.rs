//! Visibly pushdown alphabets and words over them.

use std::collections::HashMap;
use std::fmt;

use crate::error::VpaError;

/// Dense symbol identifier; indexes into the owning [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

impl SymbolId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The stack action implied by a symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Internal,
    Call,
    Return,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Internal => "internal",
            SymbolKind::Call => "call",
            SymbolKind::Return => "return",
        })
    }
}

/// A partition of the symbols into internal, call and return symbols.
///
/// Symbols are numbered densely in the order they were added, regardless of
/// kind. Names are unique across all three parts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    kinds: Vec<SymbolKind>,
    by_name: HashMap<String, SymbolId>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an alphabet from three name lists. Fails on a duplicate name.
    pub fn from_names<S: AsRef<str>>(
        internal: &[S],
        call: &[S],
        ret: &[S],
    ) -> Result<Self, VpaError> {
        let mut alphabet = Alphabet::new();
        for (kind, names) in [
            (SymbolKind::Internal, internal),
            (SymbolKind::Call, call),
            (SymbolKind::Return, ret),
        ] {
            for name in names {
                alphabet.add(kind, name.as_ref())?;
            }
        }
        Ok(alphabet)
    }

    pub fn add(&mut self, kind: SymbolKind, name: &str) -> Result<SymbolId, VpaError> {
        if self.by_name.contains_key(name) {
            return Err(VpaError::DuplicateSymbol(name.to_string()));
        }
        let id = SymbolId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.kinds.push(kind);
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, sym: SymbolId) -> bool {
        sym.index() < self.names.len()
    }

    pub fn kind(&self, sym: SymbolId) -> Option<SymbolKind> {
        self.kinds.get(sym.index()).copied()
    }

    pub fn name(&self, sym: SymbolId) -> &str {
        &self.names[sym.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.names.len() as u32).map(SymbolId)
    }

    pub fn symbols_of(&self, kind: SymbolKind) -> impl Iterator<Item = SymbolId> + '_ {
        self.symbols()
            .filter(move |&s| self.kinds[s.index()] == kind)
    }

    pub fn internal(&self) -> Vec<SymbolId> {
        self.symbols_of(SymbolKind::Internal).collect()
    }

    pub fn call(&self) -> Vec<SymbolId> {
        self.symbols_of(SymbolKind::Call).collect()
    }

    pub fn ret(&self) -> Vec<SymbolId> {
        self.symbols_of(SymbolKind::Return).collect()
    }

    /// Parses a whitespace-separated list of symbol names.
    pub fn parse_word(&self, text: &str) -> Result<Word, VpaError> {
        text.split_whitespace()
            .map(|tok| {
                self.lookup(tok)
                    .ok_or_else(|| VpaError::UnknownSymbol(tok.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }

    /// Renders a word as space-separated symbol names; the empty word is `ε`.
    pub fn display_word(&self, word: &Word) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.0
            .iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Fails with the first symbol of `word` not in this alphabet.
    pub fn check_word(&self, word: &Word) -> Result<(), VpaError> {
        match word.0.iter().find(|s| !self.contains(**s)) {
            Some(s) => Err(VpaError::UnknownSymbol(format!("#{}", s.0))),
            None => Ok(()),
        }
    }
}

/// A finite sequence of symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<SymbolId>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[SymbolId] {
        &self.0
    }
}

impl FromIterator<SymbolId> for Word {
    fn from_iter<I: IntoIterator<Item = SymbolId>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

/// Nesting class of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordClass {
    /// Every call and every return is matched.
    WellMatched,
    /// Every return is matched, but some calls are pending.
    MatchedReturnOnly,
    /// Some return has no matching call.
    UnmatchedReturn,
}

impl WordClass {
    /// True for both well-matched and matched-return words.
    pub fn is_matched_return(self) -> bool {
        !matches!(self, WordClass::UnmatchedReturn)
    }
}

/// Classifies `word` with a single left-to-right scan of the call depth.
pub fn classify_word(alphabet: &Alphabet, word: &Word) -> Result<WordClass, VpaError> {
    let mut pending_calls = 0usize;
    for &sym in &word.0 {
        match alphabet.kind(sym) {
            None => return Err(VpaError::UnknownSymbol(format!("#{}", sym.0))),
            Some(SymbolKind::Internal) => {}
            Some(SymbolKind::Call) => pending_calls += 1,
            Some(SymbolKind::Return) => {
                if pending_calls == 0 {
                    return Ok(WordClass::UnmatchedReturn);
                }
                pending_calls -= 1;
            }
        }
    }
    Ok(if pending_calls == 0 {
        WordClass::WellMatched
    } else {
        WordClass::MatchedReturnOnly
    })
}
