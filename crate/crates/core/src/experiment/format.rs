/// Six significant digits. Plain notation when the rounded magnitude lies in
/// `[1e-3, 1e6)` (and for zero), otherwise `d.ddddde±x` with a lowercase `e`.
/// Non-finite values print as `inf`, `-inf` and `nan`.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{x:.5e}");
    let exponent: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).expect("rust exponent format");
    if x == 0.0 || (-3..6).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}
