use crate::error::{Error, Result};
use crate::symbolic::{SubshiftSpec, Word};

/// Largest dense table (`d^k` slots) we are willing to allocate.
pub const MAX_TABLE_SLOTS: u128 = 1 << 24;

pub(crate) fn word_code(d: usize, symbols: &[usize]) -> usize {
    symbols.iter().fold(0usize, |acc, &s| acc * d + s)
}

pub(crate) fn decode(d: usize, len: usize, mut code: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = code % d;
        code /= d;
    }
    out
}

pub(crate) fn table_slots(d: usize, k: usize) -> Result<usize> {
    let slots = (d as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if slots > MAX_TABLE_SLOTS {
        return Err(Error::BudgetExceeded { requested: slots, limit: MAX_TABLE_SLOTS });
    }
    Ok(slots as usize)
}

/// A real function of the first `k` symbols (a locally constant function
/// of range `k`), defined on every admissible `k`-word.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTable {
    d: usize,
    range: usize,
    values: Vec<f64>,
}

impl LocalTable {
    /// Builds a table from explicit entries; every admissible `k`-word must
    /// be present and finite.
    pub fn from_entries<I>(spec: &SubshiftSpec, k: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, f64)>,
    {
        if k == 0 {
            return Err(Error::InvalidArgument("range must be at least 1".into()));
        }
        let d = spec.alphabet_size();
        let mut values = vec![f64::NAN; table_slots(d, k)?];
        for (word, v) in entries {
            if word.len() != k {
                return Err(Error::InvalidArgument(format!(
                    "word {word} has length {}, table range is {k}",
                    word.len()
                )));
            }
            word.check(spec)?;
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("value for {word} is not finite")));
            }
            values[word_code(d, word.symbols())] = v;
        }
        for code in 0..values.len() {
            let w = decode(d, k, code);
            if spec.is_admissible(&w) && values[code].is_nan() {
                return Err(Error::MissingValue { word: Word::from_zero_based(w).to_string() });
            }
        }
        Ok(LocalTable { d, range: k, values })
    }

    /// Tabulates `f` (receiving 0-based symbols) on the admissible `k`-words.
    pub fn from_fn(spec: &SubshiftSpec, k: usize, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let d = spec.alphabet_size();
        let entries: Vec<(Word, f64)> = (0..table_slots(d, k)?)
            .map(|c| decode(d, k, c))
            .filter(|w| spec.is_admissible(w))
            .map(|w| {
                let v = f(&w);
                (Word::from_zero_based(w), v)
            })
            .collect();
        LocalTable::from_entries(spec, k, entries)
    }

    pub fn constant(spec: &SubshiftSpec, k: usize, c: f64) -> Result<Self> {
        LocalTable::from_fn(spec, k, |_| c)
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn alphabet_size(&self) -> usize {
        self.d
    }

    /// Value on the first `range` symbols of `symbols` (0-based).
    pub fn get(&self, symbols: &[usize]) -> f64 {
        self.values[word_code(self.d, &symbols[..self.range])]
    }

    /// Same function viewed as a range-`k` table (`k ≥ range`).
    pub fn lift(&self, spec: &SubshiftSpec, k: usize) -> Result<LocalTable> {
        if k < self.range {
            return Err(Error::InvalidArgument(format!(
                "cannot lift range {} table down to {k}",
                self.range
            )));
        }
        if k == self.range {
            return Ok(self.clone());
        }
        LocalTable::from_fn(spec, k, |w| self.get(w))
    }

    /// Admissible words with their values, in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (Word, f64)> + '_ {
        self.values.iter().enumerate().filter(|(_, v)| !v.is_nan()).map(move |(c, &v)| {
            (Word::from_zero_based(decode(self.d, self.range, c)), v)
        })
    }
}
