//! Predicted polynomial part, Regev–Beckner sums, fits of `c_n ~ C n^t d^n`
//! and the combined conjecture report.

use std::io::Write;
use std::ops::RangeInclusive;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::algebra::{ParValue, StructureAlgebra};
use crate::codim::{codim_sequence, CodimOptions, CodimRecord, Monotonicity};
use crate::error::{Error, Result};
use crate::kemer::{basicness_check_with, exp_gz, Basicness, KemerOptions};
use crate::scalar::{format_scalar, Scalar};

pub const DEFAULT_PRECISION: usize = 256;
pub const DEFAULT_FIT_WINDOW: usize = 5;
const RM: RoundingMode = RoundingMode::ToEven;

/// `(q - d)/2 + s`.
pub fn predicted_t(q: usize, d: usize, s: usize) -> Result<Scalar> {
    if q == 0 || d < q {
        return Err(Error::InvalidArgument(format!("need d >= q >= 1, got q = {q}, d = {d}")));
    }
    Ok(Scalar::new((q as i64 - d as i64).into(), 2.into()) + Scalar::from_integer(s.into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticParams {
    k: Vec<Scalar>,
    r: Vec<Scalar>,
}

impl AsymptoticParams {
    pub fn new(k: Vec<Scalar>, r: Vec<Scalar>) -> Result<Self> {
        if k.is_empty() || k.len() != r.len() {
            return Err(Error::InvalidArgument("k and r must be nonempty lists of equal length".into()));
        }
        if k.iter().any(|x| !x.is_positive()) {
            return Err(Error::InvalidArgument("every k_i must be positive".into()));
        }
        Ok(Self { k, r })
    }

    pub fn q(&self) -> usize {
        self.k.len()
    }

    pub fn k(&self) -> &[Scalar] {
        &self.k
    }

    pub fn r(&self) -> &[Scalar] {
        &self.r
    }

    pub fn k_total(&self) -> Scalar {
        self.k.iter().sum()
    }

    pub fn r_total(&self) -> Scalar {
        self.r.iter().sum()
    }
}

struct Ctx {
    p: usize,
    cc: Consts,
}

impl Ctx {
    fn new(p: usize) -> Result<Self> {
        let cc = Consts::new().map_err(|e| Error::Precision(format!("{e:?}")))?;
        Ok(Self { p, cc })
    }

    fn int(&mut self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.p, RM, &mut self.cc)
    }

    fn rational(&mut self, x: &Scalar) -> BigFloat {
        let n = self.int(&x.numer().to_string());
        let d = self.int(&x.denom().to_string());
        n.div(&d, self.p, RM)
    }

    /// `base^e` for `base > 0`.
    fn pow(&mut self, base: &BigFloat, e: &Scalar) -> BigFloat {
        if e.is_integer() {
            let m = e.numer().abs().to_usize().expect("small integer exponent");
            let v = base.powi(m, self.p, RM);
            return if e.is_negative() { v.reciprocal(self.p, RM) } else { v };
        }
        let e = self.rational(e);
        base.ln(self.p, RM, &mut self.cc).mul(&e, self.p, RM).exp(self.p, RM, &mut self.cc)
    }

    fn check(&self, x: BigFloat) -> Result<BigFloat> {
        if x.is_nan() || x.is_inf() {
            return Err(Error::Precision(format!("non-finite result at {} bits", self.p)));
        }
        Ok(x)
    }
}

/// Decimal rendering with `digits` significant digits.
pub fn format_real(x: &BigFloat, digits: usize) -> String {
    let mut cc = Consts::new().expect("constant cache");
    let s = x.format(Radix::Dec, RM, &mut cc).unwrap_or_else(|_| "NaN".into());
    let (mant, exp) = s.split_once('e').unwrap_or((&s, "+0"));
    let neg = mant.starts_with('-');
    let all: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).map(|b| b - b'0').collect();
    let mut exp: i64 = exp.parse().unwrap_or(0);
    let digits = digits.max(1);
    let mut kept: Vec<u8> = all.iter().copied().take(digits).collect();
    // round half up on the first dropped digit
    if all.len() > digits && all[digits] >= 5 {
        let mut i = kept.len();
        loop {
            if i == 0 {
                kept.insert(0, 1);
                kept.pop();
                exp += 1;
                break;
            }
            i -= 1;
            if kept[i] == 9 {
                kept[i] = 0;
            } else {
                kept[i] += 1;
                break;
            }
        }
    }
    while kept.len() > 1 && kept.last() == Some(&0) {
        kept.pop();
    }
    let kept: String = kept.iter().map(|d| char::from(b'0' + d)).collect();
    let (head, tail) = kept.split_at(1);
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{exp}")
    } else {
        format!("{sign}{head}.{tail}e{exp}")
    }
}

pub fn real_to_f64(x: &BigFloat) -> f64 {
    format_real(x, 20).parse().unwrap_or(f64::NAN)
}

fn compositions(n: usize, q: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if parts == 1 {
            cur.push(left);
            f(cur);
            cur.pop();
            return;
        }
        for m in 1..=left - (parts - 1) {
            cur.push(m);
            rec(left - m, parts - 1, cur, f);
            cur.pop();
        }
    }
    rec(n, q, &mut Vec::with_capacity(q), f);
}

/// `sum over n_1 + ... + n_q = n, n_i >= 1` of
/// `multinomial(n; n_i) * prod k_i^{n_i} n_i^{r_i}`.
pub fn regev_beckner_lhs(params: &AsymptoticParams, n: usize, precision: usize) -> Result<BigFloat> {
    let q = params.q();
    if n < q {
        return Err(Error::InvalidArgument(format!("n = {n} is smaller than q = {q}")));
    }
    let mut ctx = Ctx::new(precision)?;
    let mut fact = vec![BigUint::one()];
    for i in 1..=n {
        let next = &fact[i - 1] * i;
        fact.push(next);
    }
    // per component: k_i^m and m^{r_i} for m = 1..n
    let mut kpow = Vec::with_capacity(q);
    let mut npow = Vec::with_capacity(q);
    for i in 0..q {
        let k = ctx.rational(&params.k[i]);
        let mut row = vec![BigFloat::from_u8(1, precision)];
        for m in 1..=n {
            let v = row[m - 1].mul(&k, precision, RM);
            row.push(v);
        }
        kpow.push(row);
        let mut row = vec![BigFloat::from_u8(0, precision)];
        for m in 1..=n {
            let b = BigFloat::from_u64(m as u64, precision);
            row.push(ctx.pow(&b, &params.r[i]));
        }
        npow.push(row);
    }
    let mut total = BigFloat::from_u8(0, precision);
    compositions(n, q, &mut |parts| {
        let mut denom = BigUint::one();
        for &m in parts {
            denom *= &fact[m];
        }
        let mut term = ctx.int(&(&fact[n] / denom).to_string());
        for (i, &m) in parts.iter().enumerate() {
            term = term.mul(&kpow[i][m], precision, RM).mul(&npow[i][m], precision, RM);
        }
        total = total.add(&term, precision, RM);
    });
    ctx.check(total)
}

/// `prod (k_i/k)^{r_i} * n^r * k^n`.
pub fn regev_beckner_rhs(params: &AsymptoticParams, n: usize, precision: usize) -> Result<BigFloat> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut ctx = Ctx::new(precision)?;
    let k = params.k_total();
    let kf = ctx.rational(&k);
    let mut acc = BigFloat::from_u8(1, precision);
    for (ki, ri) in params.k.iter().zip(&params.r) {
        let base = ctx.rational(&(ki / &k));
        acc = acc.mul(&ctx.pow(&base, ri), precision, RM);
    }
    let nf = BigFloat::from_u64(n as u64, precision);
    acc = acc.mul(&ctx.pow(&nf, &params.r_total()), precision, RM);
    acc = acc.mul(&kf.powi(n, precision, RM), precision, RM);
    ctx.check(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegevBecknerRow {
    pub n: usize,
    pub lhs: String,
    pub rhs: String,
    pub ratio: f64,
}

pub fn regev_beckner_table(params: &AsymptoticParams, ns: &[usize], precision: usize) -> Result<Vec<RegevBecknerRow>> {
    ns.iter()
        .map(|&n| {
            let lhs = regev_beckner_lhs(params, n, precision)?;
            let rhs = regev_beckner_rhs(params, n, precision)?;
            let ratio = real_to_f64(&lhs.div(&rhs, precision, RM));
            Ok(RegevBecknerRow { n, lhs: format_real(&lhs, 30), rhs: format_real(&rhs, 30), ratio })
        })
        .collect()
}

fn ser_opt_scalar<S: Serializer>(x: &Option<Scalar>, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.as_ref().map(format_scalar).serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeEstimate {
    pub n: usize,
    pub t_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub d: u64,
    pub window: [usize; 2],
    pub t_hat: f64,
    pub c_hat: f64,
    pub residuals: Vec<f64>,
    /// `t_n` from consecutive degrees `n` and the next computed one.
    pub successive: Vec<SlopeEstimate>,
    #[serde(serialize_with = "ser_opt_scalar")]
    pub predicted_t: Option<Scalar>,
    pub gap: Option<f64>,
    /// Smallest and largest successive estimate.
    pub bracket: Option<[f64; 2]>,
    pub bracket_contains_predicted: Option<bool>,
    /// Successive estimates get strictly closer to the prediction.
    pub approaching_predicted: Option<bool>,
}

/// Least-squares fit of `log c_n - n log d = log C + t log n` over the
/// degrees in `window` (default: the last five records).
pub fn fit_t(
    records: &[CodimRecord],
    d: u64,
    window: Option<RangeInclusive<usize>>,
    predicted: Option<Scalar>,
) -> Result<FitReport> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let window = window.unwrap_or_else(|| {
        let hi = records.iter().map(|r| r.n).max().unwrap_or(0);
        let lo = records.iter().map(|r| r.n).filter(|&n| n + DEFAULT_FIT_WINDOW > hi).min().unwrap_or(1);
        lo..=hi
    });
    let mut pts: Vec<(usize, u64)> = records.iter().filter(|r| window.contains(&r.n)).map(|r| (r.n, r.c_n)).collect();
    pts.sort_unstable();
    pts.dedup_by_key(|p| p.0);
    if pts.len() < 2 {
        return Err(Error::InvalidArgument("the fit window needs at least two computed degrees".into()));
    }
    if pts.iter().any(|p| p.1 == 0) {
        return Err(Error::InvalidArgument("codimensions in the fit window must be positive".into()));
    }
    let ld = (d as f64).ln();
    let xs: Vec<f64> = pts.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| (p.1 as f64).ln() - p.0 as f64 * ld).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let t_hat = sxy / sxx;
    let intercept = my - t_hat * mx;
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + t_hat * x)).collect();
    let successive: Vec<SlopeEstimate> = pts
        .windows(2)
        .map(|w| {
            let (a, ca) = w[0];
            let (b, cb) = w[1];
            let num = (cb as f64).ln() - (ca as f64).ln() - (b - a) as f64 * ld;
            SlopeEstimate { n: a, t_hat: num / ((b as f64).ln() - (a as f64).ln()) }
        })
        .collect();
    let lo = successive.iter().map(|s| s.t_hat).fold(f64::INFINITY, f64::min);
    let hi = successive.iter().map(|s| s.t_hat).fold(f64::NEG_INFINITY, f64::max);
    let pred = predicted.as_ref().map(crate::scalar::scalar_to_f64);
    Ok(FitReport {
        d,
        window: [pts[0].0, pts[pts.len() - 1].0],
        t_hat,
        c_hat: intercept.exp(),
        residuals,
        bracket: Some([lo, hi]),
        bracket_contains_predicted: pred.map(|p| lo <= p && p <= hi),
        approaching_predicted: pred
            .map(|p| successive.windows(2).all(|w| (w[1].t_hat - p).abs() < (w[0].t_hat - p).abs())),
        gap: pred.map(|p| (t_hat - p).abs()),
        successive,
        predicted_t: predicted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub n: usize,
    /// `c_n / (n^t d^n)` with the predicted `t`.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub algebra: String,
    pub dim: usize,
    pub q: usize,
    pub block_dims: Vec<usize>,
    pub exp: usize,
    pub par: ParValue,
    #[serde(serialize_with = "ser_opt_scalar")]
    pub predicted_t: Option<Scalar>,
    pub kemer_status: Basicness,
    /// The prediction is only claimed for certified basic algebras.
    pub prediction_applies: bool,
    pub codim: Vec<CodimRecord>,
    pub monotonicity: Monotonicity,
    pub fit: FitReport,
    pub ratios: Vec<RatioRow>,
    pub note: String,
}

impl ConjectureReport {
    pub fn clear_timings(&mut self) {
        for r in &mut self.codim {
            r.seconds = 0.0;
        }
    }

    /// Columns `n, c_n, ratio, successive_t_hat` (the last is empty for
    /// the final degree).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("csv output: {e}"));
        w.write_record(["n", "c_n", "ratio", "successive_t_hat"]).map_err(io)?;
        for (rec, ratio) in self.codim.iter().zip(&self.ratios) {
            let slope = self.fit.successive.iter().find(|s| s.n == rec.n).map(|s| s.t_hat.to_string());
            w.write_record([
                rec.n.to_string(),
                rec.c_n.to_string(),
                ratio.ratio.to_string(),
                slope.unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("csv output: {e}")))?;
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConjectureOptions {
    pub codim: CodimOptions,
    pub kemer: KemerOptions,
    pub window: Option<RangeInclusive<usize>>,
}

pub fn conjecture_report(alg: &StructureAlgebra, max_n: usize, opts: &ConjectureOptions) -> Result<ConjectureReport> {
    let data = alg.wedderburn_data_seeded(opts.kemer.split_seed, crate::algebra::DEFAULT_SPLIT_ATTEMPTS)?;
    let par = data.par();
    let exp = exp_gz(alg)?;
    let predicted = if data.q == 0 { None } else { Some(predicted_t(data.q, par.dim_ss, par.s)?) };
    let seq = codim_sequence(alg, max_n, &opts.codim)?;
    let window = opts.window.clone().or_else(|| (max_n == 1).then_some(1..=1));
    let fit = if max_n >= 2 && exp >= 1 {
        fit_t(&seq.records, exp as u64, window, predicted.clone())?
    } else {
        return Err(Error::InvalidArgument("a conjecture report needs N >= 2 and a nonzero semisimple part".into()));
    };
    let kemer_status = basicness_check_with(alg, &opts.kemer, Some(2))?;
    let t = predicted.as_ref().map(crate::scalar::scalar_to_f64).unwrap_or(0.0);
    let ratios = seq
        .records
        .iter()
        .map(|r| RatioRow { n: r.n, ratio: r.c_n as f64 / ((r.n as f64).powf(t) * (exp as f64).powi(r.n as i32)) })
        .collect();
    Ok(ConjectureReport {
        algebra: alg.name().to_string(),
        dim: alg.dim(),
        q: data.q,
        block_dims: data.block_dims.clone(),
        exp,
        par,
        predicted_t: predicted,
        prediction_applies: matches!(kemer_status, Basicness::CertifiedBasic { .. }),
        kemer_status,
        codim: seq.records,
        monotonicity: seq.monotonicity,
        fit,
        ratios,
        note: "desk-scale diagnostics: the fit shows a trend over small degrees and does not confirm an asymptotic law"
            .into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, parse_scalar};

    fn params(k: &[&str], r: &[&str]) -> AsymptoticParams {
        AsymptoticParams::new(
            k.iter().map(|s| parse_scalar(s).unwrap()).collect(),
            r.iter().map(|s| parse_scalar(s).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn predictions() {
        assert_eq!(predicted_t(1, 4, 0).unwrap(), parse_scalar("-3/2").unwrap());
        assert_eq!(predicted_t(2, 2, 1).unwrap(), int(1));
        assert_eq!(predicted_t(2, 5, 1).unwrap(), parse_scalar("-1/2").unwrap());
        assert!(predicted_t(3, 2, 0).is_err());
    }

    #[test]
    fn single_component_is_exact() {
        let p = params(&["3"], &["2"]);
        let l = regev_beckner_lhs(&p, 10, 128).unwrap();
        assert_eq!(format_real(&l, 10), "5.9049e6");
        let r = regev_beckner_rhs(&p, 10, 128).unwrap();
        assert_eq!(format_real(&l, 30), format_real(&r, 30));
    }

    #[test]
    fn rounding() {
        let x = BigFloat::from_f64(0.1996, 64);
        assert_eq!(format_real(&x, 3), "2e-1");
        assert_eq!(format_real(&x, 2), "2e-1");
        assert_eq!(format_real(&BigFloat::from_f64(9.96, 64), 2), "1e1");
        assert_eq!(format_real(&BigFloat::from_f64(-1.234, 64), 3), "-1.23e0");
    }

    #[test]
    fn binomial_case() {
        let p = params(&["1", "1"], &["0", "0"]);
        let l = regev_beckner_lhs(&p, 20, 128).unwrap();
        assert_eq!(real_to_f64(&l), (1u64 << 20) as f64 - 2.0);
        let r = regev_beckner_rhs(&p, 20, 128).unwrap();
        assert_eq!(real_to_f64(&r), (1u64 << 20) as f64);
    }

    #[test]
    fn bad_parameters() {
        assert!(AsymptoticParams::new(vec![int(0)], vec![int(1)]).is_err());
        assert!(AsymptoticParams::new(vec![int(1)], vec![]).is_err());
        assert!(regev_beckner_lhs(&params(&["1", "1"], &["0", "0"]), 1, 64).is_err());
    }
}
