use num_integer::Integer;

/// Exact reduced fraction `(num, den)` of the shortest decimal that round-trips `x`.
///
/// `0.1` becomes `1/10` rather than the binary value nearest to it.
pub(crate) fn decimal_fraction(x: f64) -> Option<(u128, u128)> {
    if !x.is_finite() || x < 0.0 {
        return None;
    }
    let text = format!("{x}");
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    if int.len() + frac.len() > 38 {
        return None;
    }
    let num: u128 = format!("{int}{frac}").parse().ok()?;
    let den = 10u128.checked_pow(frac.len() as u32)?;
    let g = num.gcd(&den);
    Some((num / g, den / g))
}
