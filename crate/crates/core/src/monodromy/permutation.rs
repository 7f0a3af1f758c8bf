use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Bijection on labels `0..n`; `images[k]` is the image of label `k`.
///
/// Composition is in path order: `a.compose(&b)` applies `a` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::InvalidInput("permutation needs at least one label".into()));
        }
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidInput(format!("{images:?} is not a bijection on 0..{n}")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n).collect() }
    }

    /// Swaps labels `a` and `b` (0-based).
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Permutation { images }
    }

    /// Product of disjoint 0-based cycles; each cycle maps an entry to the next.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                if a >= n || touched[a] {
                    return Err(Error::InvalidInput(format!("cycles {cycles:?} are not disjoint on 0..{n}")));
                }
                touched[a] = true;
                images[a] = cycle[(i + 1) % cycle.len()];
            }
        }
        Permutation::new(images)
    }

    /// Parses 1-based cycle notation such as `(1 3)(2 4)` or `()`.
    pub fn parse_cycles(n: usize, text: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("malformed cycle notation {text:?}"));
        let mut cycles = Vec::new();
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let close = body.find(')').ok_or_else(bad)?;
            let cycle = body[..close]
                .split_whitespace()
                .map(|t| t.parse::<usize>().ok().filter(|&k| k >= 1).map(|k| k - 1).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()?;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            rest = body[close + 1..].trim_start();
        }
        Self::from_cycles(n, &cycles)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    /// `self` then `other`: `result[k] = other[self[k]]`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch { left: self.len(), right: other.len() });
        }
        Ok(Permutation { images: self.images.iter().map(|&k| other.images[k]).collect() })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (k, &i) in self.images.iter().enumerate() {
            images[i] = k;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(k, &i)| k == i)
    }

    /// Non-trivial cycles, 0-based, each starting at its smallest label.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut k = self.images[start];
            while k != start {
                seen[k] = true;
                cycle.push(k);
                k = self.images[k];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }

    pub fn order(&self) -> usize {
        fn gcd(a: usize, b: usize) -> usize {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        self.cycles().iter().fold(1, |acc, c| acc / gcd(acc, c.len()) * c.len())
    }

    /// 1-based image list.
    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&i| i + 1).collect()
    }
}

impl fmt::Display for Permutation {
    /// 1-based cycle notation, `()` for the identity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let labels: Vec<String> = c.iter().map(|k| (k + 1).to_string()).collect();
            write!(f, "({})", labels.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    cycles: String,
    one_line: Vec<usize>,
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr { cycles: self.to_string(), one_line: self.one_line() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = Repr::deserialize(d)?;
        let images = repr
            .one_line
            .iter()
            .map(|&i| i.checked_sub(1).ok_or_else(|| D::Error::custom("labels are 1-based")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let p = Permutation::new(images).map_err(D::Error::custom)?;
        if p.to_string() != repr.cycles {
            return Err(D::Error::custom(format!(
                "cycles {:?} disagree with one_line {:?}",
                repr.cycles, repr.one_line
            )));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_perms(n: usize) -> Vec<Permutation> {
        fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Permutation>) {
            if prefix.len() == n {
                out.push(Permutation::new(prefix.clone()).unwrap());
                return;
            }
            for k in 0..n {
                if !prefix.contains(&k) {
                    prefix.push(k);
                    rec(prefix, n, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), n, &mut out);
        out
    }

    #[test]
    fn compose_follows_path_order() {
        let a = Permutation::transposition(3, 0, 1);
        let b = Permutation::transposition(3, 1, 2);
        let ab = a.compose(&b).unwrap();
        // 1→3, 3→2, 2→1
        assert_eq!(ab.one_line(), vec![3, 1, 2]);
        assert_eq!(ab.to_string(), "(1 3 2)");
    }

    #[test]
    fn group_laws_exhaustive() {
        for n in 1..=4 {
            let perms = all_perms(n);
            let id = Permutation::identity(n);
            for a in &perms {
                assert!(a.compose(&a.inverse()).unwrap().is_identity());
                assert_eq!(id.compose(a).unwrap(), *a);
                assert_eq!(a.compose(&id).unwrap(), *a);
                for b in &perms {
                    for c in &perms {
                        let left = a.compose(b).unwrap().compose(c).unwrap();
                        let right = a.compose(&b.compose(c).unwrap()).unwrap();
                        assert_eq!(left, right);
                    }
                }
            }
        }
    }

    #[test]
    fn size_mismatch() {
        assert!(matches!(
            Permutation::identity(2).compose(&Permutation::identity(3)),
            Err(Error::SizeMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![2, 0]).is_err());
        assert!(Permutation::new(vec![]).is_err());
    }

    #[test]
    fn cycle_notation_round_trip() {
        for n in 1..=4 {
            for p in all_perms(n) {
                assert_eq!(Permutation::parse_cycles(n, &p.to_string()).unwrap(), p);
            }
        }
        assert!(Permutation::parse_cycles(3, "(1 4)").is_err());
        assert!(Permutation::parse_cycles(3, "(1 2)(2 3)").is_err());
        assert!(Permutation::parse_cycles(3, "1 2").is_err());
    }

    #[test]
    fn orders() {
        assert_eq!(Permutation::identity(3).order(), 1);
        assert_eq!(Permutation::transposition(3, 0, 2).order(), 2);
        assert_eq!(Permutation::new(vec![1, 2, 0]).unwrap().order(), 3);
        assert_eq!(Permutation::parse_cycles(5, "(1 2)(3 4 5)").unwrap().order(), 6);
    }

    #[test]
    fn json_shape() {
        let p = Permutation::transposition(3, 0, 2);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"cycles":"(1 3)","one_line":[3,2,1]}"#);
        assert_eq!(serde_json::from_str::<Permutation>(&json).unwrap(), p);
        assert!(serde_json::from_str::<Permutation>(r#"{"cycles":"(1 2)","one_line":[3,2,1]}"#).is_err());
    }
}
