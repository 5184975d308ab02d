use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered tensor factors of a composite Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartyLayout {
    dims: Vec<usize>,
    names: Vec<String>,
}

impl PartyLayout {
    pub fn new(dims: Vec<usize>, names: Vec<String>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidLayout("no parties".into()));
        }
        if dims.len() != names.len() {
            return Err(Error::InvalidLayout(format!(
                "{} dimensions but {} names",
                dims.len(),
                names.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidLayout(format!("party dimension {d} < 2")));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidLayout(format!("party name `{n}` repeated")));
            }
        }
        Ok(Self { dims, names })
    }

    /// Parties named `A`, `B`, `C`, ...
    pub fn with_default_names(dims: Vec<usize>) -> Result<Self> {
        let names = (0..dims.len()).map(default_name).collect();
        Self::new(dims, names)
    }

    pub fn single(dim: usize) -> Result<Self> {
        Self::with_default_names(vec![dim])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn party_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn party_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownParty(name.to_string()))
    }

    /// Layout of `self ⊗ other`. Colliding names in `other` get a numeric suffix.
    pub fn concat(&self, other: &Self) -> Self {
        let mut names = self.names.clone();
        for n in &other.names {
            let mut candidate = n.clone();
            let mut k = 2;
            while names.contains(&candidate) {
                candidate = format!("{n}{k}");
                k += 1;
            }
            names.push(candidate);
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, names }
    }

    /// Product of the dimensions of all parties except the first.
    pub fn responder_dim(&self) -> usize {
        self.dims[1..].iter().product()
    }
}

fn default_name(i: usize) -> String {
    const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    if i < LETTERS.len() {
        (LETTERS[i] as char).to_string()
    } else {
        format!("P{}", i + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_layouts() {
        assert!(PartyLayout::new(vec![2, 1], vec!["A".into(), "B".into()]).is_err());
        assert!(PartyLayout::new(vec![2, 2], vec!["A".into(), "A".into()]).is_err());
        assert!(PartyLayout::new(vec![2], vec![]).is_err());
    }

    #[test]
    fn concat_renames_collisions() {
        let a = PartyLayout::with_default_names(vec![2, 3]).unwrap();
        let ab = a.concat(&a);
        assert_eq!(ab.dims(), &[2, 3, 2, 3]);
        assert_eq!(ab.names(), &["A", "B", "A2", "B2"]);
        assert_eq!(ab.total_dim(), 36);
    }
}
