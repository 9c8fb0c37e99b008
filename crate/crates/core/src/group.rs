//! Group presentations as indexed Cayley tables, and the word acceptor they drive.
//!
//! Digits run over `1..=m`; state `0` is both the identity and the crash state.
//! Words are read right to left: the rightmost digit is consumed first.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::moebius::GeneratorSet;

pub const BUILTIN_GROUPS: [&str; 2] = ["once_punctured_torus", "klein_four"];

/// A finite sequence of generator digits; the leftmost digit is applied last.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(digits: Vec<u8>) -> Self {
        Word(digits)
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_digits(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Digits in application order (rightmost first).
    pub fn rl(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().rev().copied()
    }
}

impl From<Vec<u8>> for Word {
    fn from(digits: Vec<u8>) -> Self {
        Word(digits)
    }
}

impl From<&[u8]> for Word {
    fn from(digits: &[u8]) -> Self {
        Word(digits.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.0.iter().any(|&d| d > 9);
        for (i, d) in self.0.iter().enumerate() {
            if wide && i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Result of running a word through a Cayley table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOutcome {
    pub accepted: bool,
    /// Last state reached; `0` whenever the word was rejected.
    pub final_state: u8,
}

/// First cell breaking a table invariant, with its `(row, column)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableViolation {
    IdentityRow { row: usize, col: usize, value: u8 },
    IdentityColumn { row: usize, col: usize, value: u8 },
    OutOfRange { row: usize, col: usize, value: u8 },
}

impl TableViolation {
    pub fn coordinates(&self) -> (usize, usize) {
        match *self {
            TableViolation::IdentityRow { row, col, .. }
            | TableViolation::IdentityColumn { row, col, .. }
            | TableViolation::OutOfRange { row, col, .. } => (row, col),
        }
    }
}

impl fmt::Display for TableViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TableViolation::IdentityRow { row, col, value } => {
                write!(f, "identity row broken at ({row},{col}): {value} != {col}")
            }
            TableViolation::IdentityColumn { row, col, value } => {
                write!(
                    f,
                    "identity column broken at ({row},{col}): {value} != {row}"
                )
            }
            TableViolation::OutOfRange { row, col, value } => {
                write!(f, "cell ({row},{col}) = {value} is out of range")
            }
        }
    }
}

/// `(m+1) × (m+1)` state-transition table; row and column 0 belong to the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedCayleyTable {
    m: u8,
    cells: Vec<u8>,
}

impl IndexedCayleyTable {
    /// Builds a table from square rows. Only the shape is checked here; see
    /// [`validate_table`] for the content invariants.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let size = rows.len();
        if !(3..=256).contains(&size) {
            return Err(Error::InvalidTable(format!(
                "{size} rows, need 3..=256 (alphabet of 2..=255 letters)"
            )));
        }
        let mut cells = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidTable(format!(
                    "row {i} has {} cells, expected {size}",
                    row.len()
                )));
            }
            cells.extend_from_slice(row);
        }
        Ok(Self {
            m: (size - 1) as u8,
            cells,
        })
    }

    /// Shape check plus [`validate_table`].
    pub fn new_validated(rows: &[Vec<u8>]) -> Result<Self> {
        let table = Self::from_rows(rows)?;
        validate_table(&table).map_err(|v| Error::InvalidTable(v.to_string()))?;
        Ok(table)
    }

    /// Alphabet size.
    pub fn m(&self) -> u8 {
        self.m
    }

    #[inline]
    pub fn get(&self, state: u8, digit: u8) -> u8 {
        self.cells[state as usize * (self.m as usize + 1) + digit as usize]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.cells.chunks(self.m as usize + 1)
    }

    /// Runs a digit sequence (already in application order) from `state`,
    /// stopping at the first crash. Returns the state reached, `0` on crash.
    #[inline]
    pub fn advance(&self, mut state: u8, digits: impl IntoIterator<Item = u8>) -> u8 {
        for digit in digits {
            state = self.get(state, digit);
            if state == 0 {
                return 0;
            }
        }
        state
    }

    pub fn check_digits(&self, digits: &[u8]) -> Result<()> {
        match digits.iter().position(|&d| d == 0 || d > self.m) {
            Some(position) => Err(Error::DigitOutOfRange {
                digit: digits[position],
                position,
                m: self.m,
            }),
            None => Ok(()),
        }
    }
}

/// Reports the first cell, in row-major order, that breaks the identity
/// row/column or the `0..=m` range.
pub fn validate_table(table: &IndexedCayleyTable) -> Result<(), TableViolation> {
    let m = table.m;
    for (row, cells) in table.rows().enumerate() {
        for (col, &value) in cells.iter().enumerate() {
            if value > m {
                return Err(TableViolation::OutOfRange { row, col, value });
            }
            if row == 0 && value as usize != col {
                return Err(TableViolation::IdentityRow { row, col, value });
            }
            if col == 0 && value as usize != row {
                return Err(TableViolation::IdentityColumn { row, col, value });
            }
        }
    }
    Ok(())
}

/// Runs `word` through `table` starting from the identity state.
///
/// The empty word is rejected.
pub fn check_word_run(word: &Word, table: &IndexedCayleyTable) -> Result<RunOutcome> {
    table.check_digits(word.digits())?;
    if word.is_empty() {
        return Ok(RunOutcome {
            accepted: false,
            final_state: 0,
        });
    }
    let final_state = table.advance(0, word.rl());
    Ok(RunOutcome {
        accepted: final_state != 0,
        final_state,
    })
}

/// A named group: alphabet, Cayley table and, for renderable groups, Möbius generators.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub name: String,
    alphabet: Vec<String>,
    table: IndexedCayleyTable,
    generators: Option<GeneratorSet>,
}

impl GroupSpec {
    pub fn new(
        name: impl Into<String>,
        alphabet: Vec<String>,
        table: IndexedCayleyTable,
    ) -> Result<Self> {
        if alphabet.len() != table.m() as usize {
            return Err(Error::SpecFormat(format!(
                "{} alphabet tokens for a table over {} letters",
                alphabet.len(),
                table.m()
            )));
        }
        if let Some(bad) = alphabet.iter().find(|t| {
            t.is_empty() || t.contains(|c: char| c.is_whitespace() || c == '(' || c == ')')
        }) {
            return Err(Error::SpecFormat(format!("invalid alphabet token `{bad}`")));
        }
        for (i, token) in alphabet.iter().enumerate() {
            if alphabet[..i].contains(token) {
                return Err(Error::SpecFormat(format!(
                    "duplicate alphabet token `{token}`"
                )));
            }
        }
        validate_table(&table).map_err(|v| Error::InvalidTable(v.to_string()))?;
        Ok(Self {
            name: name.into(),
            alphabet,
            table,
            generators: None,
        })
    }

    /// Binds Möbius generators, one per letter in alphabet order.
    pub fn with_generators(mut self, generators: GeneratorSet) -> Result<Self> {
        if generators.len() != self.m() as usize {
            return Err(Error::SpecFormat(format!(
                "{} generators for an alphabet of {} letters",
                generators.len(),
                self.m()
            )));
        }
        self.generators = Some(generators);
        Ok(self)
    }

    pub fn m(&self) -> u8 {
        self.table.m()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn table(&self) -> &IndexedCayleyTable {
        &self.table
    }

    pub fn generators(&self) -> Option<&GeneratorSet> {
        self.generators.as_ref()
    }

    /// Parses the line-oriented spec format: `m`, the alphabet, then `m + 1` table rows.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim_end);
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::SpecFormat(format!("missing {what}")))
        };
        let m_line = next("alphabet size")?;
        let m: usize = m_line
            .trim()
            .parse()
            .map_err(|_| Error::SpecFormat(format!("bad alphabet size `{m_line}`")))?;
        if !(2..=255).contains(&m) {
            return Err(Error::AlphabetSize(m as u64));
        }
        let alphabet: Vec<String> = next("alphabet")?
            .split_whitespace()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::with_capacity(m + 1);
        for r in 0..=m {
            let line = next(&format!("table row {r}"))?;
            let row = line
                .split_whitespace()
                .enumerate()
                .map(|(c, cell)| match cell.parse::<u64>() {
                    Ok(v) if v <= m as u64 => Ok(v as u8),
                    Ok(_) => Err(Error::InvalidTable(format!(
                        "cell ({r},{c}) = {cell} is out of range"
                    ))),
                    Err(_) => Err(Error::SpecFormat(format!("bad cell `{cell}` in row {r}"))),
                })
                .collect::<Result<Vec<u8>>>()?;
            rows.push(row);
        }
        if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
            return Err(Error::SpecFormat(format!(
                "unexpected trailing line `{extra}`"
            )));
        }
        let table = IndexedCayleyTable::from_rows(&rows)?;
        GroupSpec::new(name, alphabet, table)
    }

    /// Reads a spec file, naming the group after the file stem.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".to_owned());
        Self::parse(&name, &text)
    }

    /// Serializes into the format read by [`GroupSpec::parse`].
    pub fn to_spec_text(&self) -> String {
        let mut out = format!("{}\n{}\n", self.m(), self.alphabet.join(" "));
        for row in self.table.rows() {
            let cells: Vec<String> = row.iter().map(u8::to_string).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Looks up one of the shipped presentations.
pub fn builtin_group(name: &str) -> Result<GroupSpec> {
    let (alphabet, rows): (&[&str], Vec<Vec<u8>>) = match name {
        "once_punctured_torus" => (
            &["a", "b", "A", "B"],
            vec![
                vec![0, 1, 2, 3, 4],
                vec![1, 1, 2, 0, 4],
                vec![2, 1, 2, 3, 0],
                vec![3, 0, 2, 3, 4],
                vec![4, 1, 0, 3, 4],
            ],
        ),
        "klein_four" => (
            &["a", "b", "ab"],
            vec![
                vec![0, 1, 2, 3],
                vec![1, 0, 3, 2],
                vec![2, 3, 0, 1],
                vec![3, 2, 1, 0],
            ],
        ),
        _ => {
            return Err(Error::UnknownGroup {
                name: name.to_owned(),
                available: BUILTIN_GROUPS.join(", "),
            })
        }
    };
    GroupSpec::new(
        name,
        alphabet.iter().map(|s| s.to_string()).collect(),
        IndexedCayleyTable::from_rows(&rows)?,
    )
}

/// Translates letters into digits. Tokens may be wrapped in parentheses, as in
/// `(a)(b)(ab)`; bare runs are split by longest alphabet match.
pub fn letters_to_digits(text: &str, spec: &GroupSpec) -> Result<Word> {
    let chars: Vec<char> = text.chars().collect();
    let lookup = |token: &str| spec.alphabet.iter().position(|t| t == token);
    let mut digits = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let ch = chars[pos];
        if ch.is_whitespace() {
            pos += 1;
            continue;
        }
        if ch == '(' {
            let close = chars[pos..].iter().position(|&c| c == ')').map(|k| pos + k);
            let Some(close) = close else {
                return Err(Error::UnknownLetter {
                    token: chars[pos..].iter().collect(),
                    position: pos,
                });
            };
            let token: String = chars[pos + 1..close].iter().collect();
            let digit = lookup(&token).ok_or(Error::UnknownLetter {
                token,
                position: pos + 1,
            })?;
            digits.push(digit as u8 + 1);
            pos = close + 1;
            continue;
        }
        let best = spec
            .alphabet
            .iter()
            .enumerate()
            .filter(|(_, t)| {
                let t: Vec<char> = t.chars().collect();
                chars[pos..].starts_with(&t)
            })
            .max_by_key(|(_, t)| t.chars().count());
        match best {
            Some((k, token)) => {
                digits.push(k as u8 + 1);
                pos += token.chars().count();
            }
            None => {
                return Err(Error::UnknownLetter {
                    token: ch.to_string(),
                    position: pos,
                })
            }
        }
    }
    Ok(Word(digits))
}

/// Inverse of [`letters_to_digits`]. Alphabets with multi-character tokens
/// are written fully parenthesized so that the output parses back unchanged.
pub fn digits_to_letters(word: &Word, spec: &GroupSpec) -> Result<String> {
    spec.table.check_digits(word.digits())?;
    let wrap = spec.alphabet.iter().any(|t| t.chars().count() > 1);
    let mut out = String::new();
    for &d in word.digits() {
        let token = &spec.alphabet[d as usize - 1];
        if wrap {
            out.push('(');
            out.push_str(token);
            out.push(')');
        } else {
            out.push_str(token);
        }
    }
    Ok(out)
}
