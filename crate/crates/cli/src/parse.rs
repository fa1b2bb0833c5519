//! Value parsers shared by flags and the config file.

/// Reads `x`, `num/den` or `2^e` (with integer or real `e`).
pub fn parse_real(text: &str) -> Result<f64, String> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| format!("bad numerator in `{t}`"))?;
        let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in `{t}`"))?;
        if d == 0.0 {
            return Err(format!("zero denominator in `{t}`"));
        }
        return Ok(n / d);
    }
    if let Some((b, e)) = t.split_once('^') {
        let b: f64 = b.trim().parse().map_err(|_| format!("bad base in `{t}`"))?;
        let e: f64 = e.trim().parse().map_err(|_| format!("bad exponent in `{t}`"))?;
        return Ok(b.powf(e));
    }
    let x: f64 = t.parse().map_err(|_| format!("`{t}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{t}` is not finite"))
    }
}

/// Reads an integer list: `a,b,c`, `lo..hi` (inclusive) or a mix.
pub fn parse_int_list(text: &str) -> Result<Vec<i64>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: i64 = lo.trim().parse().map_err(|_| format!("bad range start in `{part}`"))?;
            let hi: i64 = hi.trim().trim_start_matches('=').parse().map_err(|_| format!("bad range end in `{part}`"))?;
            if hi < lo || hi - lo > 1_000_000 {
                return Err(format!("range `{part}` is empty or too long"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| format!("`{part}` is not an integer"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

/// Clap adapter for [`parse_real`].
pub fn real_arg(text: &str) -> Result<f64, String> {
    parse_real(text)
}

/// Clap adapter for [`parse_int_list`].
pub fn int_list_arg(text: &str) -> Result<IntList, String> {
    parse_int_list(text).map(IntList)
}

/// Clap adapter for comma-separated reals.
pub fn real_list_arg(text: &str) -> Result<RealList, String> {
    text.split(',').map(parse_real).collect::<Result<Vec<_>, _>>().map(RealList)
}

/// Integer list argument, kept as one value so clap does not split it.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct IntList(pub Vec<i64>);

/// Real list argument.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct RealList(pub Vec<f64>);

impl IntList {
    pub fn as_u64(&self, what: &str) -> Result<Vec<u64>, String> {
        self.0
            .iter()
            .map(|&v| u64::try_from(v).map_err(|_| format!("{what} must be nonnegative, got {v}")))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals() {
        assert_eq!(parse_real("1/4").unwrap(), 0.25);
        assert_eq!(parse_real("2^-10").unwrap(), 1.0 / 1024.0);
        assert_eq!(parse_real(" 3.5 ").unwrap(), 3.5);
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("inf").is_err());
        assert!(parse_real("x").is_err());
    }

    #[test]
    fn int_lists() {
        assert_eq!(parse_int_list("1..3,7").unwrap(), vec![1, 2, 3, 7]);
        assert_eq!(parse_int_list("-2..=0").unwrap(), vec![-2, -1, 0]);
        assert!(parse_int_list("3..1").is_err());
        assert!(parse_int_list("").is_err());
    }
}
