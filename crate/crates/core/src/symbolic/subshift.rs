use crate::error::{Error, Result};

/// A one-sided subshift of finite type on `d` symbols.
///
/// Symbols are 0-based internally; every external representation
/// (config files, printed words) is 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubshiftSpec {
    d: usize,
    allowed: Vec<bool>,
    primitivity_exponent: usize,
}

impl SubshiftSpec {
    /// Validates a 0/1 transition matrix (`rows[i][j] == 1` means `j` may
    /// follow `i`) and checks that it is primitive.
    pub fn new(d: usize, rows: &[Vec<u8>]) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidMatrix(format!("alphabet size {d} < 2")));
        }
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidMatrix(format!("matrix is not {d}x{d}")));
        }
        let mut allowed = vec![false; d * d];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                allowed[i * d + j] = match v {
                    0 => false,
                    1 => true,
                    other => {
                        return Err(Error::InvalidMatrix(format!(
                            "entry ({},{}) = {other} is not 0/1",
                            i + 1,
                            j + 1
                        )))
                    }
                };
            }
        }
        for s in 0..d {
            if !(0..d).any(|j| allowed[s * d + j]) {
                return Err(Error::EmptyRowOrColumn { symbol: s + 1, axis: "row" });
            }
            if !(0..d).any(|i| allowed[i * d + s]) {
                return Err(Error::EmptyRowOrColumn { symbol: s + 1, axis: "column" });
            }
        }
        let primitivity_exponent = primitivity_exponent(d, &allowed)?;
        Ok(SubshiftSpec { d, allowed, primitivity_exponent })
    }

    /// The full shift on `d` symbols.
    pub fn full_shift(d: usize) -> Result<Self> {
        SubshiftSpec::new(d, &vec![vec![1u8; d]; d])
    }

    /// The golden-mean shift: symbol 2 may not follow itself.
    pub fn golden_mean() -> Self {
        SubshiftSpec::new(2, &[vec![1, 1], vec![1, 0]]).expect("golden-mean matrix is primitive")
    }

    pub fn alphabet_size(&self) -> usize {
        self.d
    }

    /// Smallest `p` with every entry of `M^p` positive.
    pub fn primitivity_exponent(&self) -> usize {
        self.primitivity_exponent
    }

    #[inline]
    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.allowed[from * self.d + to]
    }

    pub fn successors(&self, from: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.d).filter(move |&to| self.allows(from, to))
    }

    pub fn predecessors(&self, to: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.d).filter(move |&from| self.allows(from, to))
    }

    /// Whether a 0-based symbol sequence respects the transitions.
    pub fn is_admissible(&self, symbols: &[usize]) -> bool {
        symbols.iter().all(|&s| s < self.d) && symbols.windows(2).all(|w| self.allows(w[0], w[1]))
    }

    /// Rows of the matrix as 0/1 bytes.
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.d)
            .map(|i| (0..self.d).map(|j| self.allows(i, j) as u8).collect())
            .collect()
    }

    /// Number of admissible words of the given length (sum of the entries
    /// of `M^(len-1)`), saturating at `u128::MAX`.
    pub fn count_admissible(&self, len: usize) -> u128 {
        if len == 0 {
            return 1;
        }
        let mut counts = vec![1u128; self.d];
        for _ in 1..len {
            let mut next = vec![0u128; self.d];
            for (from, &c) in counts.iter().enumerate() {
                for to in self.successors(from) {
                    next[to] = next[to].saturating_add(c);
                }
            }
            counts = next;
        }
        counts.iter().fold(0u128, |a, &b| a.saturating_add(b))
    }
}

fn primitivity_exponent(d: usize, allowed: &[bool]) -> Result<usize> {
    // Wielandt: a primitive d×d matrix has a positive power at most (d-1)^2 + 1.
    let bound = (d - 1) * (d - 1) + 1;
    let mut power = allowed.to_vec();
    for p in 1..=bound {
        if power.iter().all(|&b| b) {
            return Ok(p);
        }
        let mut next = vec![false; d * d];
        for i in 0..d {
            for k in 0..d {
                if power[i * d + k] {
                    for j in 0..d {
                        if allowed[k * d + j] {
                            next[i * d + j] = true;
                        }
                    }
                }
            }
        }
        power = next;
    }
    Err(Error::NotPrimitive { checked: bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_shift_is_primitive_with_exponent_one() {
        let s = SubshiftSpec::new(2, &[vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(s.primitivity_exponent(), 1);
    }

    #[test]
    fn golden_mean_has_exponent_two() {
        assert_eq!(SubshiftSpec::golden_mean().primitivity_exponent(), 2);
    }

    #[test]
    fn identity_is_not_primitive() {
        let e = SubshiftSpec::new(2, &[vec![1, 0], vec![0, 1]]).unwrap_err();
        assert!(matches!(e, Error::NotPrimitive { .. }));
    }

    #[test]
    fn dead_symbol_is_rejected() {
        let e = SubshiftSpec::new(2, &[vec![1, 0], vec![1, 0]]).unwrap_err();
        assert_eq!(e, Error::EmptyRowOrColumn { symbol: 2, axis: "column" });
        let e = SubshiftSpec::new(2, &[vec![1, 1], vec![0, 0]]).unwrap_err();
        assert_eq!(e, Error::EmptyRowOrColumn { symbol: 2, axis: "row" });
    }

    #[test]
    fn bad_shapes_and_entries() {
        assert!(matches!(SubshiftSpec::new(2, &[vec![1, 1]]), Err(Error::InvalidMatrix(_))));
        assert!(matches!(
            SubshiftSpec::new(2, &[vec![1, 2], vec![1, 1]]),
            Err(Error::InvalidMatrix(_))
        ));
        assert!(matches!(SubshiftSpec::new(1, &[vec![1]]), Err(Error::InvalidMatrix(_))));
    }

    #[test]
    fn periodic_cycle_is_not_primitive() {
        let e = SubshiftSpec::new(3, &[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap_err();
        assert!(matches!(e, Error::NotPrimitive { .. }));
    }

    #[test]
    fn golden_mean_counts_are_fibonacci() {
        let s = SubshiftSpec::golden_mean();
        let counts: Vec<u128> = (1..=8).map(|l| s.count_admissible(l)).collect();
        assert_eq!(counts, vec![2, 3, 5, 8, 13, 21, 34, 55]);
    }
}
