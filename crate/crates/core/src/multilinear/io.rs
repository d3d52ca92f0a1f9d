use serde::{Deserialize, Serialize};

use super::{AlternationShape, MultilinearPolynomial};
use crate::error::{Error, Result};
use crate::scalar::{format_scalar, parse_scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEntry {
    pub word: Vec<String>,
    pub coeff: String,
}

/// Exchange form. `alternations`, when present, are applied to the listed
/// terms in order; an expanded file has none.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialFile {
    pub variables: Vec<String>,
    pub terms: Vec<TermEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alternations: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<AlternationShape>,
}

impl MultilinearPolynomial {
    pub fn to_file(&self) -> PolynomialFile {
        let names = self.variables().names();
        PolynomialFile {
            variables: names.to_vec(),
            terms: self
                .inner_terms()
                .iter()
                .map(|(w, c)| TermEntry {
                    word: w.iter().map(|&v| names[v as usize].clone()).collect(),
                    coeff: format_scalar(c),
                })
                .collect(),
            alternations: self.alternations(),
            shape: self.shape().cloned(),
        }
    }

    /// Lazy form: the explicit words plus the pending alternations.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(&self.to_file()).expect("polynomial serializes");
        s.push('\n');
        s
    }

    /// Fully expanded form with one entry per word.
    pub fn to_expanded_json(&self) -> String {
        self.expand().to_json()
    }

    pub fn from_file(f: PolynomialFile) -> Result<Self> {
        let terms = f
            .terms
            .iter()
            .map(|t| Ok((t.word.iter().map(String::as_str).collect(), parse_scalar(&t.coeff)?)))
            .collect::<Result<Vec<(Vec<&str>, _)>>>()?;
        let vars: Vec<&str> = f.variables.iter().map(String::as_str).collect();
        let mut p = MultilinearPolynomial::new(&vars, terms)?;
        let mut seen = std::collections::HashSet::new();
        for set in &f.alternations {
            for v in set {
                if !seen.insert(v) {
                    return Err(Error::BadPolynomial(format!("alternating sets overlap at {v:?}")));
                }
            }
            p = p.alternate(set)?;
        }
        match f.shape {
            Some(s) => p.with_shape(s),
            None => Ok(p),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multilinear::{capelli, ut_kemer_polynomial};

    #[test]
    fn round_trips() {
        let (_, f2, _) = ut_kemer_polynomial(&[1, 1], 2).unwrap();
        for f in [capelli(3).unwrap(), f2] {
            let text = f.to_json();
            let g = MultilinearPolynomial::from_json(&text).unwrap();
            assert_eq!(g.to_json(), text);
            let h = MultilinearPolynomial::from_json(&f.to_expanded_json()).unwrap();
            assert_eq!(h, f);
        }
    }

    #[test]
    fn rejects_overlapping_sets() {
        let text = r#"{"variables":["a","b","c"],"terms":[{"word":["a","b","c"],"coeff":"1/1"}],"alternations":[["a","b"],["b","c"]]}"#;
        assert!(MultilinearPolynomial::from_json(text).is_err());
    }
}
