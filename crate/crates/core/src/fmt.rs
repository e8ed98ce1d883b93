/// Formats a real with at least 12 significant decimal digits.
///
/// Values of ordinary magnitude are written in fixed notation; very small or
/// very large ones switch to exponent notation. Digits are added until the
/// output parses back to exactly the same value.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000000".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&magnitude) {
        return format!("{x:.16e}");
    }
    let base = (15 - magnitude).max(12) as usize;
    (base..base + 3)
        .map(|decimals| format!("{x:.decimals$}"))
        .find(|s| s.parse::<f64>() == Ok(x))
        .unwrap_or_else(|| format!("{x:.prec$}", prec = base + 3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn significant_digits(s: &str) -> usize {
        let mantissa = s.split('e').next().unwrap();
        let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
        digits.trim_start_matches('0').len()
    }

    #[test]
    fn keeps_twelve_significant_digits() {
        for x in [
            1.0,
            0.5,
            std::f64::consts::SQRT_2,
            1e-5,
            123456.789,
            2.5e-9,
            -0.03125,
            1e20,
        ] {
            let s = format_real(x);
            assert!(significant_digits(&s) >= 12, "{s}");
            let back: f64 = s.parse().unwrap();
            assert!((back - x).abs() <= 1e-12 * x.abs(), "{s}");
        }
    }

    #[test]
    fn parses_back_exactly() {
        let mut x = 0.1960342806591214_f64;
        for _ in 0..2000 {
            x = (x * 7.31 + 0.123).fract() * 10f64.powi((x * 40.0) as i32 - 20);
            let s = format_real(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        let tricky = 0.19603428065912143_f64;
        assert_eq!(format_real(tricky).parse::<f64>().unwrap(), tricky);
    }
}
