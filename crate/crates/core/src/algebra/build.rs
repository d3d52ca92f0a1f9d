//! The example zoo: matrix algebras, block upper-triangular algebras,
//! associated algebras, direct products, and a small builder language.

use std::collections::HashMap;

use serde::Serialize;

use super::StructureAlgebra;
use crate::error::{Error, Result};
use crate::scalar::{one, zero, Scalar};

fn unit_label(n: usize, i: usize, j: usize) -> String {
    if n <= 9 {
        format!("e{}{}", i + 1, j + 1)
    } else {
        format!("e{},{}", i + 1, j + 1)
    }
}

/// A matrix unit `e_{row,col}` of one simple block (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MatrixUnit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

/// `units[0] b_{letters[0]} units[1] ... b_{letters[m-1]} units[m]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisWord {
    pub units: Vec<MatrixUnit>,
    pub letters: Vec<usize>,
}

impl BasisWord {
    pub fn radical_length(&self) -> usize {
        self.letters.len()
    }

    pub fn first_block(&self) -> usize {
        self.units[0].block
    }

    pub fn last_block(&self) -> usize {
        self.units[self.units.len() - 1].block
    }
}

/// Word metadata kept alongside an associated algebra; `words[i]` describes
/// basis element `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssociatedInfo {
    pub block_dims: Vec<usize>,
    pub r: usize,
    pub u: usize,
    pub words: Vec<BasisWord>,
}

impl AssociatedInfo {
    /// Indices of basis elements carrying at least one radical letter.
    pub fn radical_words(&self) -> Vec<usize> {
        (0..self.words.len()).filter(|&i| self.words[i].radical_length() > 0).collect()
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument("block dimensions must be a nonempty list of positive integers".into()));
    }
    Ok(())
}

impl StructureAlgebra {
    /// The one-dimensional algebra `F`.
    pub fn field() -> StructureAlgebra {
        let mut a = Self::matrix(1).expect("d = 1 is valid");
        a.name = "F".into();
        a
    }

    /// `M_d(F)` on the matrix units in row-major order.
    pub fn matrix(d: usize) -> Result<StructureAlgebra> {
        if d == 0 {
            return Err(Error::InvalidArgument("matrix size must be positive".into()));
        }
        let idx = |i: usize, j: usize| i * d + j;
        let basis = (0..d).flat_map(|i| (0..d).map(move |j| unit_label(d, i, j))).collect();
        let mut triples = Vec::with_capacity(d * d * d);
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    triples.push((idx(i, j), idx(j, l), idx(i, l), one()));
                }
            }
        }
        let mut unit = vec![zero(); d * d];
        for i in 0..d {
            unit[idx(i, i)] = one();
        }
        StructureAlgebra::new(format!("M{d}"), basis, triples, Some(unit))
    }

    /// Block upper-triangular matrices `UT(d_1, ..., d_q)`. The diagonal
    /// blocks come first (block by block, row-major), then the units above
    /// the blocks in row-major order.
    pub fn ut(dims: &[usize]) -> Result<StructureAlgebra> {
        check_dims(dims)?;
        let n: usize = dims.iter().sum();
        let block_of: Vec<usize> = dims.iter().enumerate().flat_map(|(b, &d)| std::iter::repeat_n(b, d)).collect();
        let mut positions = Vec::new();
        for b in 0..dims.len() {
            for i in (0..n).filter(|&i| block_of[i] == b) {
                for j in (0..n).filter(|&j| block_of[j] == b) {
                    positions.push((i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if block_of[i] < block_of[j] {
                    positions.push((i, j));
                }
            }
        }
        let index: HashMap<(usize, usize), usize> = positions.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let mut triples = Vec::new();
        for (a, &(i, j)) in positions.iter().enumerate() {
            for (b, &(j2, l)) in positions.iter().enumerate() {
                if j == j2 {
                    triples.push((a, b, index[&(i, l)], one()));
                }
            }
        }
        let mut unit = vec![zero(); positions.len()];
        for i in 0..n {
            unit[index[&(i, i)]] = one();
        }
        let basis = positions.iter().map(|&(i, j)| unit_label(n, i, j)).collect();
        let name = format!("UT({})", join(dims));
        StructureAlgebra::new(name, basis, triples, Some(unit))
    }

    /// The algebra generated by the matrix units of `M_{d_1} x ... x M_{d_q}`
    /// and `r` free radical letters, with every product of more than `u`
    /// letters set to zero. Basis: words `e b e ... b e` in matrix units with
    /// `0..=u` letters, where each letter sits between two matrix units.
    pub fn associated(block_dims: &[usize], r: usize, u: usize) -> Result<StructureAlgebra> {
        check_dims(block_dims)?;
        if r == 0 || u == 0 {
            return Err(Error::InvalidArgument("r and u must be positive".into()));
        }
        let q = block_dims.len();
        let units: Vec<MatrixUnit> = block_dims
            .iter()
            .enumerate()
            .flat_map(|(block, &d)| (0..d).flat_map(move |row| (0..d).map(move |col| MatrixUnit { block, row, col })))
            .collect();
        let mut words: Vec<BasisWord> = units.iter().map(|&m| BasisWord { units: vec![m], letters: vec![] }).collect();
        let mut layer = words.clone();
        for _ in 1..=u {
            let mut next = Vec::with_capacity(layer.len() * r * units.len());
            for w in &layer {
                for l in 0..r {
                    for &m in &units {
                        let mut nw = w.clone();
                        nw.letters.push(l);
                        nw.units.push(m);
                        next.push(nw);
                    }
                }
            }
            words.extend(next.iter().cloned());
            layer = next;
        }
        let index: HashMap<&BasisWord, usize> = words.iter().enumerate().map(|(k, w)| (w, k)).collect();
        let mut triples = Vec::new();
        for (a, x) in words.iter().enumerate() {
            let last = *x.units.last().expect("words are nonempty");
            for (b, y) in words.iter().enumerate() {
                if x.letters.len() + y.letters.len() > u {
                    continue;
                }
                let first = y.units[0];
                if first.block != last.block || first.row != last.col {
                    continue;
                }
                let mut units = x.units.clone();
                *units.last_mut().unwrap() = MatrixUnit { block: last.block, row: last.row, col: first.col };
                units.extend_from_slice(&y.units[1..]);
                let mut letters = x.letters.clone();
                letters.extend_from_slice(&y.letters);
                let c = index[&BasisWord { units, letters }];
                triples.push((a, b, c, one()));
            }
        }
        let mut unit = vec![zero(); words.len()];
        for (k, m) in units.iter().enumerate() {
            if m.row == m.col {
                unit[k] = one();
            }
        }
        let unit_name = |m: &MatrixUnit| {
            let d = block_dims[m.block];
            let core = if d == 1 { String::new() } else { unit_label(d, m.row, m.col)[1..].to_string() };
            match (q, d) {
                (1, _) => format!("e{core}"),
                (_, 1) => format!("e{}", m.block + 1),
                _ => format!("e{}:{core}", m.block + 1),
            }
        };
        let letter_name = |l: usize| if r == 1 { "b".to_string() } else { format!("b{}", l + 1) };
        let basis = words
            .iter()
            .map(|w| {
                let mut s = unit_name(&w.units[0]);
                for (l, m) in w.letters.iter().zip(&w.units[1..]) {
                    s.push_str(&letter_name(*l));
                    s.push_str(&unit_name(m));
                }
                s
            })
            .collect();
        let name = format!("Assoc(({});r={r};u={u})", join(block_dims));
        let mut alg = StructureAlgebra::new(name, basis, triples, Some(unit))?;
        alg.set_associated(AssociatedInfo { block_dims: block_dims.to_vec(), r, u, words });
        Ok(alg)
    }

    /// `A x B` with block-diagonal structure constants; labels are prefixed
    /// by `L:` and `R:`.
    pub fn direct_product(a: &StructureAlgebra, b: &StructureAlgebra) -> Result<StructureAlgebra> {
        let off = a.dim();
        let basis = a
            .basis_labels()
            .iter()
            .map(|l| format!("L:{l}"))
            .chain(b.basis_labels().iter().map(|l| format!("R:{l}")))
            .collect();
        let triples: Vec<(usize, usize, usize, Scalar)> = a
            .structure_triples()
            .map(|(i, j, k, c)| (i, j, k, c.clone()))
            .chain(b.structure_triples().map(|(i, j, k, c)| (i + off, j + off, k + off, c.clone())))
            .collect();
        let unit = match (a.unit(), b.unit()) {
            (Some(x), Some(y)) => Some(x.iter().chain(y).cloned().collect()),
            _ => None,
        };
        StructureAlgebra::new(format!("{} x {}", a.name(), b.name()), basis, triples, unit)
    }

    /// Parses a builder spec: `F`, `mat:d`, `ut:d1,d2,...`,
    /// `assoc:d1,d2,...;r;u`, or `prod:S1xS2x...` (also `×` or `*`).
    pub fn from_builder_spec(spec: &str) -> Result<StructureAlgebra> {
        let spec = spec.trim();
        let bad = |why: &str| Error::InvalidArgument(format!("builder spec {spec:?}: {why}"));
        if let Some(rest) = spec.strip_prefix("prod:") {
            let parts: Vec<&str> = rest.split(['×', '*', 'x']).map(str::trim).collect();
            if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
                return Err(bad("a product needs at least two factors"));
            }
            let mut acc = Self::from_builder_spec(parts[0])?;
            for p in &parts[1..] {
                acc = Self::direct_product(&acc, &Self::from_builder_spec(p)?)?;
            }
            return Ok(acc);
        }
        if spec.eq_ignore_ascii_case("f") || spec == "field" {
            return Ok(Self::field());
        }
        let (kind, args) = spec.split_once(':').ok_or_else(|| bad("expected kind:arguments"))?;
        let list = |s: &str| -> Result<Vec<usize>> {
            s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| bad("expected positive integers"))).collect()
        };
        match kind.trim() {
            "mat" => {
                let d = args.trim().parse().map_err(|_| bad("expected a matrix size"))?;
                Self::matrix(d)
            }
            "ut" => Self::ut(&list(args)?),
            "assoc" => {
                let fields: Vec<&str> = args.split(';').collect();
                if fields.len() != 3 {
                    return Err(bad("expected blocks;r;u"));
                }
                let blocks = list(fields[0].trim_matches(|c| c == '(' || c == ')'))?;
                let r = fields[1].trim().trim_start_matches("r=").parse().map_err(|_| bad("bad r"))?;
                let u = fields[2].trim().trim_start_matches("u=").parse().map_err(|_| bad("bad u"))?;
                Self::associated(&blocks, r, u)
            }
            other => Err(bad(&format!("unknown kind {other:?}"))),
        }
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn label_index(a: &StructureAlgebra, l: &str) -> usize {
        a.basis_labels().iter().position(|x| x == l).unwrap()
    }

    #[test]
    fn matrix_units() {
        let m = StructureAlgebra::matrix(2).unwrap();
        let (e11, e12, e21) = (label_index(&m, "e11"), label_index(&m, "e12"), label_index(&m, "e21"));
        assert_eq!(m.product_of_basis(e12, e21), &vec![(e11, int(1))]);
        assert!(m.product_of_basis(e12, e12).is_empty());
        let m3 = StructureAlgebra::matrix(3).unwrap();
        assert_eq!(m3.dim(), 9);
        assert_eq!(m3.unit().unwrap().iter().filter(|c| **c == int(1)).count(), 3);
    }

    #[test]
    fn ut_shapes() {
        let a = StructureAlgebra::ut(&[1, 1]).unwrap();
        assert_eq!(a.basis_labels(), &["e11", "e22", "e12"]);
        assert_eq!(StructureAlgebra::ut(&[1, 2]).unwrap().dim(), 7);
        assert_eq!(StructureAlgebra::ut(&[2, 2]).unwrap().dim(), 12);
        assert!(StructureAlgebra::ut(&[]).is_err());
        let x = vec![int(1), int(0), int(1)];
        let y = a.basis_vector(2);
        assert_eq!(a.multiply(&x, &y).unwrap(), y);
    }

    #[test]
    fn associated_small() {
        let a = StructureAlgebra::associated(&[1], 1, 1).unwrap();
        assert_eq!(a.basis_labels(), &["e", "ebe"]);
        assert!(a.product_of_basis(1, 1).is_empty());
        let a2 = StructureAlgebra::associated(&[1], 1, 2).unwrap();
        assert_eq!(a2.basis_labels(), &["e", "ebe", "ebebe"]);
        assert_eq!(a2.product_of_basis(1, 1), &vec![(2, int(1))]);
        assert!(a2.product_of_basis(2, 1).is_empty());
        assert_eq!(StructureAlgebra::associated(&[1, 1], 1, 1).unwrap().dim(), 6);
        assert_eq!(StructureAlgebra::associated(&[2], 1, 1).unwrap().dim(), 20);
    }

    #[test]
    fn builder_specs() {
        assert_eq!(StructureAlgebra::from_builder_spec("mat:3").unwrap().dim(), 9);
        assert_eq!(StructureAlgebra::from_builder_spec("ut:1,2").unwrap().dim(), 7);
        assert_eq!(StructureAlgebra::from_builder_spec("assoc:1,1;1;1").unwrap().dim(), 6);
        assert_eq!(StructureAlgebra::from_builder_spec("assoc:(1);r=1;u=2").unwrap().dim(), 3);
        let p = StructureAlgebra::from_builder_spec("prod:mat:1×mat:2").unwrap();
        assert_eq!(p.dim(), 5);
        assert_eq!(StructureAlgebra::from_builder_spec("prod:F*F*F").unwrap().dim(), 3);
        assert_eq!(StructureAlgebra::from_builder_spec("prod:ut:1,1xmat:2").unwrap().dim(), 7);
        assert!(StructureAlgebra::from_builder_spec("mat:0").is_err());
        assert!(StructureAlgebra::from_builder_spec("cube:2").is_err());
        assert!(StructureAlgebra::from_builder_spec("prod:mat:1").is_err());
    }

    #[test]
    fn products_are_associative() {
        for s in ["mat:3", "ut:1,2", "ut:2,2", "assoc:1,1;2;2", "assoc:2;1;1", "prod:ut:1,1×mat:2"] {
            StructureAlgebra::from_builder_spec(s).unwrap().check_associativity().unwrap();
        }
    }
}
