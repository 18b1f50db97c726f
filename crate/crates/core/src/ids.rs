//! Parsing of registry ids of the form `name(arg, arg, ...)`.

use crate::{Error, Result};

/// Splits `"affine_clifford(1, 2)"` into `("affine_clifford", [1.0, 2.0])`.
/// A bare name has no arguments.
pub fn parse_call(id: &str) -> Result<(String, Vec<f64>)> {
    let id = id.trim();
    let Some(open) = id.find('(') else {
        if id.is_empty() {
            return Err(Error::InvalidInput("empty registry id".into()));
        }
        return Ok((id.to_string(), Vec::new()));
    };
    if !id.ends_with(')') {
        return Err(Error::InvalidInput(format!("unbalanced parentheses in `{id}`")));
    }
    let name = id[..open].trim().to_string();
    let inner = &id[open + 1..id.len() - 1];
    let args = if inner.trim().is_empty() {
        Vec::new()
    } else {
        inner
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad numeric argument `{a}` in `{id}`")))
            })
            .collect::<Result<_>>()?
    };
    Ok((name, args))
}

pub(crate) fn expect_args(name: &str, args: &[f64], n: usize) -> Result<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "`{name}` takes {n} argument(s), got {}",
            args.len()
        )))
    }
}

pub(crate) fn positive_int(name: &str, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e6 {
        Ok(v as usize)
    } else {
        Err(Error::InvalidInput(format!("`{name}` needs a positive integer, got {v}")))
    }
}
