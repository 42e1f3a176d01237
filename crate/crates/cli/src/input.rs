use std::ops::Range;

use anyhow::{anyhow, bail, Context, Result};
use lauricella::height::Place;
use lauricella::instance::b_from_exponents;
use lauricella::rational::parse_rational;
use lauricella::{Instance, Poly, Rational};
use serde::Deserialize;
use toml::Spanned;

/// A rational given either as a `"p/q"` string or a bare integer.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RawRational {
    Text(String),
    Int(i64),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RawPlace {
    Text(String),
    Prime(u64),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub alpha: Option<Vec<Spanned<RawRational>>>,
    pub s: Option<Vec<Spanned<RawRational>>>,
    pub a_coeffs: Option<Vec<Spanned<RawRational>>>,
    pub b_coeffs: Option<Vec<Spanned<RawRational>>>,
    pub beta: Option<Spanned<RawRational>>,
    pub place: Option<Spanned<RawPlace>>,
    pub epsilon: Option<Spanned<RawRational>>,
    pub n_max: Option<usize>,
    #[serde(rename = "T", alias = "truncation")]
    pub truncation: Option<usize>,
    #[serde(rename = "H_max", alias = "h_max")]
    pub h_max: Option<u64>,
    pub precision: Option<u32>,
}

/// The polynomials named by the file, before any hypothesis is enforced.
pub struct Polys {
    pub a: Poly,
    pub b: Poly,
    pub roots: Option<(Vec<Rational>, Vec<Rational>)>,
}

pub struct Parsed {
    pub file: InstanceFile,
    pub polys: Polys,
    pub beta: Option<Rational>,
    pub place: Option<Place>,
    pub epsilon: Option<Rational>,
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

fn rational(text: &str, field: &str, v: &Spanned<RawRational>) -> Result<Rational> {
    let r = match v.get_ref() {
        RawRational::Text(s) => parse_rational(s),
        RawRational::Int(n) => Ok(Rational::from_integer((*n).into())),
    };
    r.map_err(|e| anyhow!("line {}, field `{field}`: {e}", line_of(text, v.span())))
}

fn rationals(text: &str, field: &str, vs: &[Spanned<RawRational>]) -> Result<Vec<Rational>> {
    vs.iter().enumerate().map(|(i, v)| rational(text, &format!("{field}[{i}]"), v)).collect()
}

pub fn parse_place(s: &str) -> Result<Place> {
    s.parse::<Place>().map_err(|e| anyhow!("{e}"))
}

pub fn parse(text: &str) -> Result<Parsed> {
    let file: InstanceFile = toml::from_str(text).context("malformed instance file")?;
    let polys = match (&file.alpha, &file.s, &file.a_coeffs, &file.b_coeffs) {
        (Some(alpha), Some(s), None, None) => {
            let alpha = rationals(text, "alpha", alpha)?;
            let s = rationals(text, "s", s)?;
            if alpha.len() != s.len() {
                bail!("`alpha` has {} entries but `s` has {}", alpha.len(), s.len());
            }
            let a = Poly::from_roots(&alpha);
            let b = b_from_exponents(&alpha, &s);
            Polys { a, b, roots: Some((alpha, s)) }
        }
        (None, None, Some(a), Some(b)) => {
            let a = Poly::new(rationals(text, "a_coeffs", a)?);
            let b = Poly::new(rationals(text, "b_coeffs", b)?);
            Polys { a, b, roots: None }
        }
        _ => bail!("give exactly one of {{alpha, s}} or {{a_coeffs, b_coeffs}}"),
    };
    let beta = file.beta.as_ref().map(|v| rational(text, "beta", v)).transpose()?;
    let epsilon = file.epsilon.as_ref().map(|v| rational(text, "epsilon", v)).transpose()?;
    let place = file
        .place
        .as_ref()
        .map(|v| {
            let p = match v.get_ref() {
                RawPlace::Text(s) => parse_place(s),
                RawPlace::Prime(p) => Place::prime(*p).map_err(|e| anyhow!("{e}")),
            };
            p.map_err(|e| anyhow!("line {}, field `place`: {e}", line_of(text, v.span())))
        })
        .transpose()?;
    Ok(Parsed { file, polys, beta, place, epsilon })
}

impl Polys {
    pub fn instance(&self) -> Result<Instance> {
        let inst = match &self.roots {
            Some((alpha, s)) => Instance::from_roots(alpha.clone(), s.clone()),
            None => Instance::from_polys(self.a.clone(), self.b.clone()),
        };
        inst.map_err(|e| anyhow!("{e}"))
    }
}
