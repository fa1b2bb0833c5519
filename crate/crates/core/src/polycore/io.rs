use serde::{Deserialize, Serialize};

use super::coeff::{Coeff, CoeffLiteral};
use super::multiindex::MultiIndex;
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffJson {
    Real(f64),
    Ratio { num: i64, den: i64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermJson {
    alpha: Vec<u32>,
    coeff: CoeffJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolyJson {
    d: u32,
    #[serde(rename = "D")]
    dim: usize,
    terms: Vec<TermJson>,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    restricted: bool,
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

impl<C: Coeff> Poly<C> {
    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = PolyJson {
            d: self.degree_bound(),
            dim: self.dim(),
            restricted: self.is_restricted(),
            terms: self
                .terms()
                .map(|(a, c)| TermJson {
                    alpha: a.exps().to_vec(),
                    coeff: match c.to_literal() {
                        CoeffLiteral::Real(x) => CoeffJson::Real(x),
                        CoeffLiteral::Ratio(num, den) => CoeffJson::Ratio { num, den },
                    },
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("polynomial serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PolyJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("polynomial JSON: {e}")))?;
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in doc.terms {
            if t.alpha.len() != doc.dim {
                return Err(Error::Parse(format!(
                    "alpha {:?} has length {}, expected D = {}",
                    t.alpha,
                    t.alpha.len(),
                    doc.dim
                )));
            }
            let lit = match t.coeff {
                CoeffJson::Real(x) => CoeffLiteral::Real(x),
                CoeffJson::Ratio { num, den } => CoeffLiteral::Ratio(num, den),
            };
            terms.push((MultiIndex::new(t.alpha), C::from_literal(lit)?));
        }
        if doc.restricted {
            Self::restricted(doc.dim, doc.d, terms).map_err(|e| Error::Parse(e.to_string()))
        } else {
            Self::general(doc.dim, terms)
        }
    }

    /// Parse the inline form `{(2):0.5, (1,1):1/3}`.
    ///
    /// The dimension is the tuple length; the degree bound is the largest
    /// total degree present (at least 2). An empty `{}` needs `D` and `d`
    /// from elsewhere, so it is rejected here.
    pub fn parse_inline(text: &str) -> Result<Self> {
        let body = text
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::Parse(format!("expected {{...}}, got {text:?}")))?;
        let mut terms = Vec::new();
        let mut rest = body.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' at {rest:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse("unclosed exponent tuple".into()))?;
            let exps = open[..close]
                .split(',')
                .map(|e| e.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("exponent: {e}")))?;
            let after = open[close + 1..].trim_start();
            let after = after
                .strip_prefix(':')
                .ok_or_else(|| Error::Parse("expected ':' after exponent tuple".into()))?;
            let end = after.find(',').unwrap_or(after.len());
            let lit = parse_literal(after[..end].trim())?;
            terms.push((MultiIndex::new(exps), C::from_literal(lit)?));
            rest = after[end..].trim_start_matches(',').trim();
        }
        let dim = terms
            .first()
            .map(|(a, _)| a.dim())
            .ok_or_else(|| Error::Parse("empty polynomial literal".into()))?;
        let d = terms.iter().map(|(a, _)| a.degree()).max().unwrap_or(2).max(2);
        Self::restricted(dim, d, terms).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Accept JSON (starting with `{"`) or the inline form.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with("{\"") || t.starts_with("{ \"") || t.starts_with("{\n") {
            Self::from_json(t)
        } else {
            Self::parse_inline(t)
        }
    }
}

/// `0.5`, `-3`, `1/3`, `pi`, `golden` (fractional parts are not taken).
pub fn parse_literal(s: &str) -> Result<CoeffLiteral> {
    if let Some((n, d)) = s.split_once('/') {
        let num = n.trim().parse::<i64>().map_err(|e| Error::Parse(format!("numerator {n:?}: {e}")))?;
        let den = d.trim().parse::<i64>().map_err(|e| Error::Parse(format!("denominator {d:?}: {e}")))?;
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        return Ok(CoeffLiteral::Ratio(num, den));
    }
    match s {
        "pi" => return Ok(CoeffLiteral::Real(std::f64::consts::PI)),
        "golden" => return Ok(CoeffLiteral::Real((1.0 + 5f64.sqrt()) / 2.0)),
        _ => {}
    }
    if let Ok(i) = s.parse::<i64>() {
        return Ok(CoeffLiteral::Ratio(i, 1));
    }
    s.parse::<f64>()
        .map(CoeffLiteral::Real)
        .map_err(|e| Error::Parse(format!("coefficient {s:?}: {e}")))
}

#[cfg(test)]
mod tests {
    use num_rational::Rational64;

    use super::*;
    use crate::polycore::{RatPoly, RealPoly};

    #[test]
    fn inline_round_trip() {
        let p = RealPoly::parse("{(2,0):0.5, (1,1):1/4}").unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.coeff(&MultiIndex::new(vec![1, 1])), Some(&0.25));
        let back = RealPoly::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rational_json() {
        let text = r#"{"d":3,"D":1,"terms":[{"alpha":[2],"coeff":{"num":1,"den":3}},{"alpha":[3],"coeff":2}]}"#;
        let p = RatPoly::from_json(text).unwrap();
        assert_eq!(p.coeff(&MultiIndex::new(vec![2])), Some(&Rational64::new(1, 3)));
        assert_eq!(RatPoly::from_json(&p.to_json()).unwrap(), p);
        let r = RealPoly::from_json(text).unwrap();
        assert!((r.coeff(&MultiIndex::new(vec![2])).unwrap() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RealPoly::parse("{(1):0.5}").is_err());
        assert!(RealPoly::parse("{(2):1/0}").is_err());
        assert!(RatPoly::parse("{(2):0.3}").is_err());
        assert!(RealPoly::from_json(r#"{"d":2,"D":2,"terms":[{"alpha":[2],"coeff":1}]}"#).is_err());
        assert!(RealPoly::parse("{}").is_err());
    }
}
