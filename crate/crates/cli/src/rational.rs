//! Exact parsing of decimal and fractional stress values and grids.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest number of points a grid may expand to.
pub const MAX_GRID_POINTS: usize = 1_000_000;

/// Parses `3`, `-0.25`, `1.5e-3` or `1/3` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let t = s.trim();
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("invalid fraction {s:?}"))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("invalid fraction {s:?}"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(num, den));
    }
    let (body, exp) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = t[pos + 1..]
                .parse()
                .map_err(|_| format!("invalid number {s:?}"))?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (negative, body) = match body.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let all_digits = |p: &str| p.chars().all(|c| c.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty())
        || !all_digits(int_part)
        || !all_digits(frac_part)
    {
        return Err(format!("invalid number {s:?}"));
    }
    if exp.abs() > 400 {
        return Err(format!("exponent out of range in {s:?}"));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().expect("digits"));
    let scale = exp - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= pow;
    } else {
        value /= pow;
    }
    Ok(if negative { -value } else { value })
}

/// `p/q` in lowest terms, or `p` for integers.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Expands `start:stop:step` to `start, start+step, …` up to and including
/// `stop`, in exact arithmetic.
pub fn parse_grid(spec: &str) -> Result<Vec<BigRational>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(format!("grid must look like start:stop:step, got {spec:?}"));
    };
    let start = parse_rational(start)?;
    let stop = parse_rational(stop)?;
    let step = parse_rational(step)?;
    if !step.is_positive() {
        return Err(format!(
            "grid step must be positive, got {}",
            format_rational(&step)
        ));
    }
    if stop < start {
        return Err("grid stop lies below its start".into());
    }
    let count = ((&stop - &start) / &step).floor().to_integer() + BigInt::one();
    let count = count
        .to_usize()
        .filter(|&c| c <= MAX_GRID_POINTS)
        .ok_or_else(|| format!("grid expands to more than {MAX_GRID_POINTS} points"))?;
    Ok((0..count)
        .map(|k| &start + &step * BigRational::from_integer(BigInt::from(k)))
        .collect())
}
