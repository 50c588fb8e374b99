/// Formats `x` with 12 significant digits, trailing zeros trimmed.
///
/// Plain notation is used for decimal exponents in `-5..12`, scientific
/// (`1.5e20`) otherwise. Output is platform independent.
pub(crate) fn sig12(x: f64) -> String {
    const DIGITS: usize = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Round first, then read the exponent back so that 9.9999999999996 -> 10.
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..DIGITS as i32).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Bijective base-26 letter name: 0 -> "a", 25 -> "z", 26 -> "aa".
#[cfg(test)]
pub(crate) fn alpha_name(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(12.0), "12");
        assert_eq!(sig12(0.5), "0.5");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0 / 3.0 * 1000.0), "666.666666667");
        assert_eq!(sig12(std::f64::consts::E), "2.71828182846");
        assert_eq!(sig12(-1.25), "-1.25");
        assert_eq!(sig12(9.99999999999996), "10");
        assert_eq!(sig12(123456789012345.0), "1.23456789012e14");
        assert_eq!(sig12(1.5e-7), "1.5e-7");
        assert_eq!(sig12(0.0001234), "0.0001234");
    }

    #[test]
    fn letter_names() {
        assert_eq!(alpha_name(0), "a");
        assert_eq!(alpha_name(25), "z");
        assert_eq!(alpha_name(26), "aa");
        assert_eq!(alpha_name(27), "ab");
        assert_eq!(alpha_name(26 + 26 * 26), "aaa");
    }
}
