//! Exact rational arithmetic helpers.

use num_rational::Ratio;
use num_traits::{CheckedMul, ToPrimitive, Zero};

/// Exact rational used for rates (Mbps), bandwidths, utilities and watts.
pub type Q = Ratio<i128>;

pub fn q(numer: i128, denom: i128) -> Q {
    Q::new(numer, denom)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

/// `pct` percent as a fraction, so `percent(31) == 31/100`.
pub fn percent(pct: i128) -> Q {
    Q::new(pct, 100)
}

pub fn to_f64(v: &Q) -> f64 {
    if let Some(f) = v.to_f64() {
        return f;
    }
    *v.numer() as f64 / *v.denom() as f64
}

/// Parses a plain decimal literal (`12`, `-0.5`, `7.79`, `1e3`, `.25`) into an
/// exact rational. Returns `None` for anything else, including values that
/// would not fit the underlying integer type.
pub fn parse_decimal(s: &str) -> Option<Q> {
    let s = s.trim();
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = body[pos + 1..].parse().ok()?;
            (&body[..pos], exp)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let mut numer: i128 = 0;
    for b in int_part.bytes().chain(frac_part.bytes()) {
        numer = numer.checked_mul(10)?.checked_add(i128::from(b - b'0'))?;
    }
    let scale = i32::try_from(frac_part.len()).ok()? - exponent;
    if scale.unsigned_abs() > 36 {
        return None;
    }
    let pow = 10i128.checked_pow(scale.unsigned_abs())?;
    let value = if scale >= 0 {
        Q::new(numer, pow)
    } else {
        Q::from_integer(numer).checked_mul(&Q::from_integer(pow))?
    };
    Some(if neg { -value } else { value })
}

/// Exact rational for the shortest decimal that round-trips `v`, so a config
/// value written as `118.33` becomes exactly `11833/100`.
pub fn from_f64(v: f64) -> Option<Q> {
    if !v.is_finite() {
        return None;
    }
    parse_decimal(&format!("{v}"))
}

pub fn max_q(a: Q, b: Q) -> Q {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn is_zero(v: &Q) -> bool {
    v.is_zero()
}

/// Fixed-precision rendering for CSV output.
pub fn fmt_fixed(v: &Q, digits: usize) -> String {
    format!("{:.*}", digits, to_f64(v))
}


/// Decimal rendering; exact whenever the denominator has no prime factors
/// other than 2 and 5, otherwise rounded to 12 decimal places.
pub fn format_decimal(v: &Q) -> String {
    let mut d = *v.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        let s = format!("{:.12}", to_f64(v));
        return trim_zeros(s);
    }
    let places = twos.max(fives);
    let Some(scale) = 10i128.checked_pow(places) else {
        return trim_zeros(format!("{:.12}", to_f64(v)));
    };
    let Some(scaled) = (*v.numer()).checked_mul(scale / v.denom()) else {
        return trim_zeros(format!("{:.12}", to_f64(v)));
    };
    if places == 0 {
        return scaled.to_string();
    }
    let neg = scaled < 0;
    let digits = scaled.unsigned_abs().to_string();
    let places = places as usize;
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    let s = format!("{}{int}.{frac}", if neg { "-" } else { "" });
    trim_zeros(s)
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}
