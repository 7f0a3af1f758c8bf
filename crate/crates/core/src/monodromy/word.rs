use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A generator (0-based) raised to `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverted: bool,
}

impl Letter {
    pub fn new(generator: usize, inverted: bool) -> Self {
        Letter { generator, inverted }
    }

    pub fn inverse(self) -> Self {
        Letter { inverted: !self.inverted, ..self }
    }
}

/// Freely reduced word in the generators, read in path order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word::default();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(g: usize) -> Self {
        Word { letters: vec![Letter::new(g, false)] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Appends a letter, cancelling against the last one when inverse.
    pub fn push(&mut self, letter: Letter) {
        if self.letters.last() == Some(&letter.inverse()) {
            self.letters.pop();
        } else {
            self.letters.push(letter);
        }
    }

    pub fn then(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Whitespace-separated `g<k>` or `g<k>^-1` with 1-based `k`; `e` or an
    /// empty string is the identity.
    fn from_str(s: &str) -> Result<Word> {
        let mut w = Word::default();
        for token in s.split_whitespace() {
            if token == "e" {
                continue;
            }
            let bad = || Error::InvalidInput(format!("bad word letter {token:?}; expected g<k> or g<k>^-1"));
            let body = token.strip_prefix('g').ok_or_else(bad)?;
            let (index, inverted) = match body.split_once('^') {
                Some((i, "-1")) => (i, true),
                Some((i, "1")) => (i, false),
                Some(_) => return Err(bad()),
                None => (body, false),
            };
            let k: usize = index.parse().map_err(|_| bad())?;
            if k == 0 {
                return Err(bad());
            }
            w.push(Letter::new(k - 1, inverted));
        }
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| format!("g{}{}", l.generator + 1, if l.inverted { "^-1" } else { "" }))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}
