use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::symbolic::SubshiftSpec;

/// Default cap on the number of words any exhaustive enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 24;

/// A finite word, i.e. the cylinder `[c_0, ..., c_n]`.
///
/// Stored 0-based; `Display`/`FromStr` use the 1-based hyphenated form
/// `1-2-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    /// Wraps 0-based symbols without checking admissibility.
    pub fn from_zero_based(symbols: Vec<usize>) -> Self {
        Word(symbols)
    }

    /// Builds a word from 1-based symbols.
    pub fn from_one_based(symbols: &[usize]) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        symbols
            .iter()
            .map(|&s| {
                s.checked_sub(1)
                    .ok_or_else(|| Error::InvalidArgument("symbols are 1-based".into()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    /// Builds a 1-based word and checks it against `spec`.
    pub fn admissible(spec: &SubshiftSpec, symbols: &[usize]) -> Result<Self> {
        let w = Word::from_one_based(symbols)?;
        w.check(spec)?;
        Ok(w)
    }

    pub fn check(&self, spec: &SubshiftSpec) -> Result<()> {
        if self.0.is_empty() {
            return Err(Error::EmptyInput);
        }
        if spec.is_admissible(&self.0) {
            Ok(())
        } else {
            Err(Error::NotAdmissible { word: self.to_string() })
        }
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|s| s + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("-")?;
            }
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::EmptyInput);
        }
        let symbols = s
            .split(['-', ','])
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad symbol {p:?} in word {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::from_one_based(&symbols)
    }
}

/// Lexicographic iterator over admissible words of a fixed length.
#[derive(Debug, Clone)]
pub struct CylinderIter<'a> {
    spec: &'a SubshiftSpec,
    current: Option<Vec<usize>>,
    first_symbol: Option<usize>,
}

impl<'a> CylinderIter<'a> {
    fn new(spec: &'a SubshiftSpec, len: usize, first_symbol: Option<usize>) -> Self {
        let start = first_symbol.unwrap_or(0);
        let mut w = vec![start];
        fill_smallest(spec, &mut w, len);
        CylinderIter { spec, current: Some(w), first_symbol }
    }

    fn advance(&mut self) {
        let Some(w) = self.current.as_mut() else { return };
        let len = w.len();
        let floor = if self.first_symbol.is_some() { 1 } else { 0 };
        let mut pos = len;
        while pos > floor {
            pos -= 1;
            let next = (w[pos] + 1..self.spec.alphabet_size())
                .find(|&s| pos == 0 || self.spec.allows(w[pos - 1], s));
            if let Some(s) = next {
                w[pos] = s;
                w.truncate(pos + 1);
                fill_smallest(self.spec, w, len);
                return;
            }
        }
        self.current = None;
    }
}

fn fill_smallest(spec: &SubshiftSpec, w: &mut Vec<usize>, len: usize) {
    while w.len() < len {
        let last = *w.last().expect("non-empty");
        // every row has a successor in a validated spec
        let s = spec.successors(last).next().expect("validated spec has no dead rows");
        w.push(s);
    }
}

impl Iterator for CylinderIter<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let out = self.current.clone().map(Word);
        self.advance();
        out
    }
}

/// Checks the enumeration budget for admissible words of length `len`.
pub fn check_budget(spec: &SubshiftSpec, len: usize, budget: u128) -> Result<u128> {
    let requested = spec.count_admissible(len);
    if requested > budget {
        Err(Error::BudgetExceeded { requested, limit: budget })
    } else {
        Ok(requested)
    }
}

/// All admissible words of length `n + 1`, each once, in lexicographic order.
pub fn enumerate_cylinders(spec: &SubshiftSpec, n: usize, budget: u128) -> Result<CylinderIter<'_>> {
    check_budget(spec, n + 1, budget)?;
    Ok(CylinderIter::new(spec, n + 1, None))
}

/// The words of length `n + 1` starting with the 0-based `first` symbol,
/// in lexicographic order. Concatenating the partitions for
/// `first = 0..d` reproduces [`enumerate_cylinders`].
pub fn enumerate_cylinders_with_prefix(
    spec: &SubshiftSpec,
    n: usize,
    first: usize,
    budget: u128,
) -> Result<CylinderIter<'_>> {
    check_budget(spec, n + 1, budget)?;
    if first >= spec.alphabet_size() {
        return Err(Error::InvalidArgument(format!("symbol {} out of range", first + 1)));
    }
    Ok(CylinderIter::new(spec, n + 1, Some(first)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(spec: &SubshiftSpec, n: usize) -> Vec<String> {
        enumerate_cylinders(spec, n, DEFAULT_ENUMERATION_BUDGET)
            .unwrap()
            .map(|w| w.to_string())
            .collect()
    }

    #[test]
    fn full_two_shift_pairs() {
        let s = SubshiftSpec::full_shift(2).unwrap();
        assert_eq!(words(&s, 1), vec!["1-1", "1-2", "2-1", "2-2"]);
    }

    #[test]
    fn golden_mean_excludes_forbidden_pair() {
        let s = SubshiftSpec::golden_mean();
        assert_eq!(words(&s, 1), vec!["1-1", "1-2", "2-1"]);
    }

    #[test]
    fn golden_mean_length_five_matches_brute_force() {
        let s = SubshiftSpec::golden_mean();
        let brute: Vec<String> = (0..32u32)
            .map(|m| (0..5).rev().map(|b| ((m >> b) & 1) as usize).collect::<Vec<_>>())
            .filter(|w| s.is_admissible(w))
            .map(|w| Word::from_zero_based(w).to_string())
            .collect();
        assert_eq!(brute.len(), 13);
        assert_eq!(words(&s, 4), brute);
    }

    #[test]
    fn prefix_partitions_concatenate() {
        let s = SubshiftSpec::new(3, &[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        let all = words(&s, 4);
        let parts: Vec<String> = (0..3)
            .flat_map(|f| {
                enumerate_cylinders_with_prefix(&s, 4, f, DEFAULT_ENUMERATION_BUDGET)
                    .unwrap()
                    .map(|w| w.to_string())
                    .collect::<Vec<_>>()
            })
            .collect();
        assert_eq!(all, parts);
    }

    #[test]
    fn budget_is_enforced() {
        let s = SubshiftSpec::full_shift(2).unwrap();
        let e = enumerate_cylinders(&s, 10, 1000).unwrap_err();
        assert_eq!(e, Error::BudgetExceeded { requested: 2048, limit: 1000 });
    }

    #[test]
    fn word_parsing() {
        let w: Word = "1-2-1".parse().unwrap();
        assert_eq!(w.symbols(), &[0, 1, 0]);
        assert_eq!(w.to_string(), "1-2-1");
        assert!("0-1".parse::<Word>().is_err());
        assert!("".parse::<Word>().is_err());
        let g = SubshiftSpec::golden_mean();
        assert!(Word::admissible(&g, &[2, 2]).is_err());
    }
}
