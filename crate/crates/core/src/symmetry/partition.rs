use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer partition with weakly decreasing positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not weakly decreasing")));
        }
        Ok(Self(parts))
    }

    /// Sorts and drops zero parts.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn num_parts(&self) -> usize {
        self.0.len()
    }

    /// All partitions of `l`, in reverse lexicographic order (`(l)` first).
    pub fn all(l: usize) -> Vec<Partition> {
        fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(l, l, &mut Vec::new(), &mut out);
        out
    }

    /// Number of standard Young tableaux, by the hook-length formula.
    pub fn hook_length_dim(&self) -> u128 {
        let conj = self.conjugate();
        let mut num: u128 = (1..=self.size() as u128).product();
        let mut den: u128 = 1;
        for (r, &row) in self.0.iter().enumerate() {
            for c in 0..row {
                let hook = (row - c - 1) + (conj.0[c] - r - 1) + 1;
                den *= hook as u128;
            }
        }
        // exact: the hook product always divides l!
        num /= den;
        num
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.0.first().copied().unwrap_or(0);
        Partition((0..cols).map(|c| self.0.iter().filter(|&&r| r > c).count()).collect())
    }

    /// Dimension of the irreducible `U(n)` representation with highest weight
    /// `self` (padded with zeros), by the Weyl dimension formula.
    /// Zero when there are more than `n` parts.
    pub fn weyl_dimension(&self, n: usize) -> u128 {
        if self.num_parts() > n {
            return 0;
        }
        let lam: Vec<i64> = (0..n).map(|i| self.0.get(i).copied().unwrap_or(0) as i64).collect();
        let mut num: i128 = 1;
        let mut den: i128 = 1;
        for i in 0..n {
            for j in i + 1..n {
                num *= (lam[i] - lam[j] + (j - i) as i64) as i128;
                den *= (j - i) as i128;
            }
        }
        (num / den) as u128
    }

    /// Standard Young tableaux of this shape; each tableau is listed as the
    /// `(row, col)` cell holding `1, 2, ..., l`.
    pub fn standard_tableaux(&self) -> Vec<Vec<(usize, usize)>> {
        fn rec(shape: &[usize], filled: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>, total: usize) {
            if cur.len() == total {
                out.push(cur.clone());
                return;
            }
            for r in 0..shape.len() {
                let c = filled[r];
                if c < shape[r] && (r == 0 || filled[r - 1] > c) {
                    filled[r] += 1;
                    cur.push((r, c));
                    rec(shape, filled, cur, out, total);
                    cur.pop();
                    filled[r] -= 1;
                }
            }
        }
        let mut out = Vec::new();
        rec(&self.0, &mut vec![0; self.0.len()], &mut Vec::new(), &mut out, self.size());
        out
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}
