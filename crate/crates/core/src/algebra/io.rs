use serde::{Deserialize, Serialize};

use super::StructureAlgebra;
use crate::error::{Error, Result};
use crate::scalar::{format_scalar, parse_scalar};

/// On-disk form of an algebra. Indices are 0-based, scalars are `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub name: String,
    pub dim: usize,
    pub basis: Vec<String>,
    pub unit: Option<Vec<String>>,
    pub mul: Vec<(usize, usize, usize, String)>,
}

impl From<&StructureAlgebra> for AlgebraFile {
    fn from(a: &StructureAlgebra) -> Self {
        AlgebraFile {
            name: a.name().to_string(),
            dim: a.dim(),
            basis: a.basis_labels().to_vec(),
            unit: a.unit().map(|u| u.iter().map(format_scalar).collect()),
            mul: a.structure_triples().map(|(i, j, k, c)| (i, j, k, format_scalar(c))).collect(),
        }
    }
}

impl TryFrom<AlgebraFile> for StructureAlgebra {
    type Error = Error;

    fn try_from(f: AlgebraFile) -> Result<Self> {
        if f.dim != f.basis.len() {
            return Err(Error::DimensionMismatch { expected: f.dim, got: f.basis.len() });
        }
        let mut seen = std::collections::HashSet::new();
        for l in &f.basis {
            if !seen.insert(l) {
                return Err(Error::InvalidAlgebra(format!("duplicate basis label {l:?}")));
            }
        }
        let triples =
            f.mul.iter().map(|(i, j, k, c)| Ok((*i, *j, *k, parse_scalar(c)?))).collect::<Result<Vec<_>>>()?;
        let unit = f.unit.map(|u| u.iter().map(|c| parse_scalar(c)).collect::<Result<Vec<_>>>()).transpose()?;
        let a = StructureAlgebra::new(f.name, f.basis, triples, unit)?;
        a.check_associativity()?;
        Ok(a)
    }
}

impl StructureAlgebra {
    /// Compact JSON with sorted structure triples, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&AlgebraFile::from(self)).expect("algebra file serializes");
        s.push('\n');
        s
    }

    /// Parses and validates (including associativity) an algebra file.
    pub fn from_json(text: &str) -> Result<StructureAlgebra> {
        let f: AlgebraFile = serde_json::from_str(text)?;
        StructureAlgebra::try_from(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        for spec in ["mat:2", "ut:1,2", "assoc:1,1;1;1", "prod:F×mat:2"] {
            let a = StructureAlgebra::from_builder_spec(spec).unwrap();
            let text = a.to_json();
            let b = StructureAlgebra::from_json(&text).unwrap();
            assert_eq!(b.to_json(), text);
        }
    }

    #[test]
    fn rejects_bad_files() {
        let nil = r#"{"name":"x","dim":2,"basis":["a","b"],"unit":null,"mul":[[0,0,1,"1/1"]]}"#;
        assert!(StructureAlgebra::from_json(nil).is_ok());
        let bad = r#"{"name":"x","dim":2,"basis":["a","b"],"unit":null,"mul":[[0,0,1,"1/1"],[0,1,0,"1/1"]]}"#;
        assert!(matches!(StructureAlgebra::from_json(bad), Err(Error::NotAssociative(..))));
        let dim = r#"{"name":"x","dim":3,"basis":["a","b"],"unit":null,"mul":[]}"#;
        assert!(StructureAlgebra::from_json(dim).is_err());
        let rat = r#"{"name":"x","dim":1,"basis":["a"],"unit":null,"mul":[[0,0,0,"1/0"]]}"#;
        assert!(matches!(StructureAlgebra::from_json(rat), Err(Error::BadRational(_))));
    }
}
