//! Locale-independent number formatting for CSV output.

/// `%g`-style with `digits` significant digits.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        trim(&format!("{:.*}", (digits as i32 - 1 - exp) as usize, x)).to_string()
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn g6(x: f64) -> String {
    sig(x, 6)
}

/// Best estimates carry five decimals.
pub fn be(x: f64) -> String {
    format!("{x:.5}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn general_format() {
        assert_eq!(g6(0.0), "0");
        assert_eq!(g6(-0.9), "-0.9");
        assert_eq!(g6(1.0), "1");
        assert_eq!(g6(1.00667234), "1.00667");
        assert_eq!(g6(0.0147902), "0.0147902");
        assert_eq!(g6(4.68321e-5), "4.68321e-05");
        assert_eq!(g6(1234567.0), "1.23457e+06");
        assert_eq!(g6(9.9999996), "10");
        assert_eq!(be(1.006628), "1.00663");
    }
}
