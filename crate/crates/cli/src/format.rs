//! Locale-independent numeric text.

/// Significant digits for CSV values.
pub const CSV_DIGITS: usize = 12;

/// `x` with `digits` significant digits; plain notation for moderate
/// magnitudes, scientific otherwise.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.*e}", digits - 1)
    }
}

pub fn csv(columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| sig(*v, CSV_DIGITS)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
