//! `%.17g`-style number formatting shared by every text output.

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// dropped, exponent form outside `[1e-4, 1e17)`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= 17 {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp).max(0) as usize;
    strip_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::g17;

    #[test]
    fn integers_have_no_fraction() {
        assert_eq!(g17(15.0), "15");
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(-3.0), "-3");
    }

    #[test]
    fn matches_printf() {
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.25), "1.25");
        assert_eq!(g17(2.0 / 3.0), "0.66666666666666663");
        assert_eq!(g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(g17(1e20), "1e+20");
        assert_eq!(g17(123456.5), "123456.5");
    }

    #[test]
    fn round_trips() {
        for x in [0.1, 1.0 / 3.0, 7.0 / 6.0, 1e-300, 6.02e23, -2.5e-8, f64::MAX, f64::MIN_POSITIVE] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x, "{x}");
        }
    }
}
