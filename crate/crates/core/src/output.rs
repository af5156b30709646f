//! Number formatting for data files.

/// Formats `x` with 9 significant digits in the style of C's `%.9g`:
/// fixed notation for moderate exponents, scientific otherwise, trailing
/// zeros removed.
pub fn fmt_sig(x: f64) -> String {
    fmt_sig_digits(x, 9)
}

pub fn fmt_sig_digits(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(21.518412345678), "21.5184123");
        assert_eq!(fmt_sig(0.97564321987), "0.97564322");
        assert_eq!(fmt_sig(485566.0486123), "485566.049");
        assert_eq!(fmt_sig(-2.5e-7), "-2.5e-07");
        assert_eq!(fmt_sig(1.23456789012e12), "1.23456789e+12");
        assert_eq!(fmt_sig(123456789.4), "123456789");
        assert_eq!(fmt_sig(999999999.7), "1e+09");
        assert_eq!(fmt_sig(0.0001), "0.0001");
        assert_eq!(fmt_sig_digits(1.23456, 3), "1.23");
    }
}
