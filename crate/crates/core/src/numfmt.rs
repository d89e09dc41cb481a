//! `%g`-style number rendering shared by the trace printer and the file serializer.

use crate::model::ComplexAmp;

/// Significant digits in trace and amplitude output.
pub const TRACE_DIGITS: usize = 6;

/// Significant digits for matrix entries in `qoperators.txt`.
pub const FILE_DIGITS: usize = 10;

/// Renders `x` with at most `digits` significant digits, dropping trailing
/// zeros. Integral values print without a decimal point and `-0` prints as `0`.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if mantissa.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        return "0".to_string();
    }
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let fixed = format!("{:.*}", decimals, x);
    let out = trim_zeros(&fixed);
    if out == "-0" {
        "0".to_string()
    } else {
        out.to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `(RE + i*IM)` with the imaginary part carrying its own sign.
pub fn format_complex(z: ComplexAmp, digits: usize) -> String {
    format!("({} + i*{})", format_sig(z.re, digits), format_sig(z.im, digits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_digit_rendering() {
        assert_eq!(format_sig(std::f64::consts::FRAC_1_SQRT_2, 6), "0.707107");
        assert_eq!(format_sig(1.0, 6), "1");
        assert_eq!(format_sig(1.0 - 1e-15, 6), "1");
        assert_eq!(format_sig(-0.0, 6), "0");
        assert_eq!(format_sig(-1e-17, 6), "-1e-17");
        assert_eq!(format_sig(0.5, 6), "0.5");
        assert_eq!(format_sig(-0.25, 6), "-0.25");
        assert_eq!(format_sig(123456.7, 6), "123457");
        assert_eq!(format_sig(1234567.0, 6), "1.23457e6");
        assert_eq!(format_sig(0.0001234, 6), "0.0001234");
    }

    #[test]
    fn ten_digit_rendering() {
        assert_eq!(format_sig(std::f64::consts::FRAC_1_SQRT_2, 10), "0.7071067812");
        assert_eq!(format_sig(-std::f64::consts::FRAC_1_SQRT_2, 10), "-0.7071067812");
        assert_eq!(format_sig(0.0, 10), "0");
    }

    #[test]
    fn complex_rendering() {
        assert_eq!(format_complex(ComplexAmp::new(1.0, 0.0), 6), "(1 + i*0)");
        assert_eq!(format_complex(ComplexAmp::new(0.0, -1.0), 6), "(0 + i*-1)");
        assert_eq!(format_complex(ComplexAmp::new(-0.0, -0.0), 6), "(0 + i*0)");
    }
}
