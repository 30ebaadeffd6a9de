//! Render-time number formatting.
//!
//! Rounding is half away from zero, applied to the shortest decimal string
//! that round-trips the `f64`, so a stored 161.385 prints as 161.39.

/// Increments a string of ASCII digits by one unit in the last place.
/// Returns true when the carry ran off the front.
fn increment_digits(digits: &mut [u8]) -> bool {
    for d in digits.iter_mut().rev() {
        if *d == b'9' {
            *d = b'0';
        } else {
            *d += 1;
            return false;
        }
    }
    true
}

/// Rounds an unsigned plain decimal string (`"123.4567"`) to `dp` places.
fn round_decimal_str(s: &str, dp: usize) -> String {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let mut digits: Vec<u8> = int.bytes().collect();
    let frac = frac.as_bytes();
    digits.extend((0..dp).map(|i| frac.get(i).copied().unwrap_or(b'0')));
    if frac.get(dp).is_some_and(|&d| d >= b'5') && increment_digits(&mut digits) {
        digits.insert(0, b'1');
    }
    let split = digits.len() - dp;
    let mut out = String::from_utf8(digits[..split].to_vec()).expect("ascii digits");
    if dp > 0 {
        out.push('.');
        out.push_str(std::str::from_utf8(&digits[split..]).expect("ascii digits"));
    }
    out
}

/// Fixed-point with `dp` decimals, half away from zero.
pub fn fixed(x: f64, dp: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let body = round_decimal_str(&format!("{}", x.abs()), dp);
    if x < 0.0 && body.bytes().any(|b| (b'1'..=b'9').contains(&b)) {
        format!("-{body}")
    } else {
        body
    }
}

/// Scientific notation with `dp` mantissa decimals and a signed two-digit
/// exponent, e.g. `1.69E-06`.
pub fn scientific(x: f64, dp: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return format!("{}E+00", fixed(0.0, dp));
    }
    let shortest = format!("{:e}", x.abs());
    let (mantissa, exp) = shortest.split_once('e').expect("exponent form");
    let mut exp: i32 = exp.parse().expect("integer exponent");
    let mut m = round_decimal_str(mantissa, dp);
    if m.starts_with("10") {
        exp += 1;
        m = round_decimal_str(&format!("{}", m.parse::<f64>().expect("mantissa") / 10.0), dp);
    }
    let sign = if x < 0.0 { "-" } else { "" };
    let esign = if exp < 0 { '-' } else { '+' };
    format!("{sign}{m}E{esign}{:02}", exp.abs())
}

/// Integer with `,` thousands separators, after rounding half away from zero.
pub fn thousands(x: f64) -> String {
    let plain = fixed(x, 0);
    let (sign, digits) = match plain.strip_prefix('-') {
        Some(d) => ("-", d),
        None => ("", plain.as_str()),
    };
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    format!("{sign}{out}")
}
