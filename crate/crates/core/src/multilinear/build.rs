//! Capelli polynomials and their bridged products.

use super::{AlternationShape, MultilinearPolynomial};
use crate::error::{Error, Result};

/// `cap_n = sum_sigma sign(sigma) y_1 x_sigma(1) y_2 ... x_sigma(n) y_{n+1}`
/// on the variables `x_1..x_n, y_1..y_{n+1}`.
pub fn capelli(n: usize) -> Result<MultilinearPolynomial> {
    if n == 0 {
        return Err(Error::InvalidArgument("capelli degree must be positive".into()));
    }
    let xs: Vec<String> = (1..=n).map(|i| format!("x_{i}")).collect();
    let ys: Vec<String> = (1..=n + 1).map(|i| format!("y_{i}")).collect();
    let mut word = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        word.push(ys[i].as_str());
        word.push(xs[i].as_str());
    }
    word.push(ys[n].as_str());
    let vars: Vec<&str> = xs.iter().chain(ys.iter()).map(String::as_str).collect();
    let f = MultilinearPolynomial::new(&vars, vec![(word, num_traits::One::one())])?;
    let f = f.alternate(&xs)?;
    f.with_shape(AlternationShape { small: vec![xs], big: vec![], free: ys })
}

struct RouteWord {
    word: Vec<String>,
    xs: Vec<String>,
    ys: Vec<String>,
    bridges: Vec<String>,
    connectors: Vec<String>,
    /// `cap_sets[c][j]` is `X_{c,j}` for visited components `c`.
    cap_sets: Vec<Vec<Vec<String>>>,
}

/// Products of `mu` Capelli polynomials per visited component, placed at
/// the first visit; consecutive visits are joined by `w_k`, and a revisit
/// is entered through a free connector `v_k`.
fn route_word(block_dims: &[usize], route: &[usize], mu: usize) -> Result<RouteWord> {
    if block_dims.is_empty() || block_dims.contains(&0) {
        return Err(Error::InvalidArgument("block dimensions must be positive".into()));
    }
    if route.is_empty() || route.iter().any(|&c| c >= block_dims.len()) {
        return Err(Error::InvalidArgument("route must be a nonempty list of component indices".into()));
    }
    if mu == 0 {
        return Err(Error::InvalidArgument("mu must be positive".into()));
    }
    let mut out = RouteWord {
        word: vec![],
        xs: vec![],
        ys: vec![],
        bridges: vec![],
        connectors: vec![],
        cap_sets: vec![vec![]; block_dims.len()],
    };
    let mut visited = vec![false; block_dims.len()];
    for (p, &c) in route.iter().enumerate() {
        if p > 0 {
            let w = format!("w_{p}");
            out.word.push(w.clone());
            out.bridges.push(w);
        }
        if visited[c] {
            let v = format!("v_{p}");
            out.word.push(v.clone());
            out.connectors.push(v);
            continue;
        }
        visited[c] = true;
        let n = block_dims[c] * block_dims[c];
        for j in 1..=mu {
            let mut set = Vec::with_capacity(n);
            for k in 1..=n {
                let y = format!("y_{{{},{j},{k}}}", c + 1);
                let x = format!("x_{{{},{j},{k}}}", c + 1);
                out.word.push(y.clone());
                out.word.push(x.clone());
                out.ys.push(y);
                out.xs.push(x.clone());
                set.push(x);
            }
            let y = format!("y_{{{},{j},{}}}", c + 1, n + 1);
            out.word.push(y.clone());
            out.ys.push(y);
            out.cap_sets[c].push(set);
        }
    }
    Ok(out)
}

fn cap_product(rw: &RouteWord) -> Result<MultilinearPolynomial> {
    let vars: Vec<&str> =
        rw.xs.iter().chain(&rw.ys).chain(&rw.bridges).chain(&rw.connectors).map(String::as_str).collect();
    let word: Vec<&str> = rw.word.iter().map(String::as_str).collect();
    let mut f = MultilinearPolynomial::new(&vars, vec![(word, num_traits::One::one())])?;
    for set in rw.cap_sets.iter().flatten() {
        f = f.alternate(set)?;
    }
    Ok(f)
}

/// `prod_j cap_{d_1^2}(X_{1,j}; Y_{1,j}) w_1 prod_j cap_{d_2^2}(X_{2,j}; Y_{2,j}) w_2 ...`
/// with `j = 1..mu`. Variables are `x_{i,j,k}`, `y_{i,j,k}` (block `i`,
/// copy `j`) and the bridges `w_i`.
pub fn capelli_product_bridged(block_dims: &[usize], mu: usize) -> Result<MultilinearPolynomial> {
    let route: Vec<usize> = (0..block_dims.len()).collect();
    let rw = route_word(block_dims, &route, mu)?;
    let f = cap_product(&rw)?;
    let small = rw.cap_sets.iter().flatten().cloned().collect();
    let free = rw.ys.iter().chain(&rw.bridges).cloned().collect();
    f.with_shape(AlternationShape { small, big: vec![], free })
}

/// The bridged Capelli product along `route`, further alternated in the
/// unions `X_j` of the `j`-th copies over the visited components. The
/// first `big` unions also absorb the bridge `w_j`, giving `big` sets of
/// size `d + 1` and `mu - big` sets of size `d`, where `d` is the sum of
/// `d_c^2` over visited components.
pub fn route_polynomial(block_dims: &[usize], route: &[usize], mu: usize, big: usize) -> Result<MultilinearPolynomial> {
    if big >= route.len() {
        return Err(Error::InvalidArgument(format!(
            "a route with {} stops has only {} bridges",
            route.len(),
            route.len() - 1
        )));
    }
    if mu < big {
        return Err(Error::MuTooSmall { mu, needed: big });
    }
    let rw = route_word(block_dims, route, mu)?;
    let mut f = cap_product(&rw)?;
    let mut shape = AlternationShape::default();
    for j in 0..mu {
        let mut set: Vec<String> = rw.cap_sets.iter().filter(|s| !s.is_empty()).flat_map(|s| s[j].clone()).collect();
        if j < big {
            set.push(rw.bridges[j].clone());
            f = f.alternate(&set)?;
            shape.big.push(set);
        } else {
            f = f.alternate(&set)?;
            shape.small.push(set);
        }
    }
    shape.free = rw.ys.iter().chain(&rw.bridges[big..]).chain(&rw.connectors).cloned().collect();
    f.with_shape(shape)
}

/// `(f_1, f_2, shape of f_2)` for `UT(d_1, ..., d_q)`: `f_1` alternates the
/// `mu` unions `X_j`; `f_2` additionally puts `w_j` into `X_j` for
/// `j < q`.
pub fn ut_kemer_polynomial(
    block_dims: &[usize],
    mu: usize,
) -> Result<(MultilinearPolynomial, MultilinearPolynomial, AlternationShape)> {
    let q = block_dims.len();
    if q == 0 {
        return Err(Error::InvalidArgument("block dimensions must be nonempty".into()));
    }
    if mu < q - 1 {
        return Err(Error::MuTooSmall { mu, needed: q - 1 });
    }
    let route: Vec<usize> = (0..q).collect();
    let f1 = route_polynomial(block_dims, &route, mu, 0)?;
    let f2 = route_polynomial(block_dims, &route, mu, q - 1)?;
    let shape = f2.shape().cloned().expect("route polynomials carry a shape");
    Ok((f1, f2, shape))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    #[test]
    fn capelli_terms() {
        let c1 = capelli(1).unwrap();
        assert_eq!(c1.terms(), vec![(vec!["y_1".to_string(), "x_1".into(), "y_2".into()], int(1))]);
        let c2 = capelli(2).unwrap().terms();
        assert_eq!(c2.len(), 2);
        assert_eq!(c2[0].1, -c2[1].1.clone());
        assert_eq!(capelli(4).unwrap().expand().inner_terms().len(), 24);
    }

    #[test]
    fn alternating_a_word_gives_capelli() {
        let vars = ["x_1", "x_2", "y_1", "y_2", "y_3"];
        let f = MultilinearPolynomial::new(&vars, vec![(vec!["y_1", "x_1", "y_2", "x_2", "y_3"], int(1))]).unwrap();
        assert_eq!(f.alternate(&["x_1", "x_2"]).unwrap(), capelli(2).unwrap());
    }

    #[test]
    fn bridged_products() {
        let f = capelli_product_bridged(&[1], 1).unwrap();
        assert_eq!(f.degree(), 3);
        let g = capelli_product_bridged(&[1, 1], 1).unwrap();
        let words: Vec<Vec<String>> = g.terms().into_iter().map(|t| t.0).collect();
        assert_eq!(
            words,
            vec![vec!["y_{1,1,1}", "x_{1,1,1}", "y_{1,1,2}", "w_1", "y_{2,1,1}", "x_{2,1,1}", "y_{2,1,2}"]]
        );
        assert_eq!(capelli_product_bridged(&[1, 2], 1).unwrap().expand().inner_terms().len(), 24);
        assert_eq!(capelli_product_bridged(&[1, 1], 2).unwrap().shape().unwrap().small.len(), 4);
    }

    #[test]
    fn kemer_shapes() {
        let (_, f2, shape) = ut_kemer_polynomial(&[1, 1], 2).unwrap();
        assert_eq!(shape.small.iter().map(Vec::len).collect::<Vec<_>>(), vec![2]);
        assert_eq!(shape.big.iter().map(Vec::len).collect::<Vec<_>>(), vec![3]);
        assert_eq!(f2.expand().inner_terms().len(), 12);
        let (f1, f2, shape) = ut_kemer_polynomial(&[1], 1).unwrap();
        assert_eq!(f1, f2);
        assert!(shape.big.is_empty());
        assert_eq!(f1, capelli_product_bridged(&[1], 1).unwrap());
        assert!(matches!(ut_kemer_polynomial(&[1, 1, 1], 1), Err(Error::MuTooSmall { mu: 1, needed: 2 })));
    }

    #[test]
    fn routes_with_revisits() {
        let f = route_polynomial(&[1], &[0, 0, 0], 2, 2).unwrap();
        let s = f.shape().unwrap();
        assert_eq!(s.big.len(), 2);
        assert!(s.free.contains(&"v_1".to_string()));
        assert!(route_polynomial(&[1], &[0], 1, 1).is_err());
    }
}
