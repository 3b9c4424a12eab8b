//! Fixed float formatting for report files.
//!
//! All numbers written to report files go through [`format_g12`], a
//! `printf("%.12g")` equivalent, so that identical runs produce
//! byte-identical output.

/// Format `v` like C's `%.12g`: 12 significant digits, fixed or scientific
/// notation depending on the decimal exponent, trailing zeros stripped.
pub fn format_g12(v: f64) -> String {
    format_g(v, 12)
}

/// `printf("%.<sig>g")` for finite inputs; `nan`, `inf`, `-inf` otherwise.
pub fn format_g(v: f64, sig: usize) -> String {
    let sig = sig.max(1);
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.to_string();
    }

    // Round to `sig` significant digits first; the exponent used to pick the
    // notation must be the post-rounding one (e.g. 9.99e2 -> 1e3).
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = split_exponent(&sci);
    if exp >= -4 && exp < sig as i32 {
        let prec = (sig as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{:.*}", prec, v);
        trim_zeros(&fixed)
    } else {
        format!("{}e{}", trim_zeros(&mantissa), format_exponent(exp))
    }
}

fn split_exponent(sci: &str) -> (String, i32) {
    let pos = sci.find(['e', 'E']).expect("scientific notation");
    let mantissa = sci[..pos].to_string();
    let exp: i32 = sci[pos + 1..].parse().expect("exponent digits");
    (mantissa, exp)
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0');
    t.trim_end_matches('.').to_string()
}

fn format_exponent(exp: i32) -> String {
    if exp < 0 {
        format!("-{:02}", -exp)
    } else {
        format!("+{:02}", exp)
    }
}
