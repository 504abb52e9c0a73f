//! Number normalization shared by the chart reader and the metrics.

/// Currency symbols stripped when they lead a number.
const CURRENCY: [char; 5] = ['$', '€', '£', '¥', '₹'];

/// Parses a formatted number: `"1,234"`, `"56%"`, `"$12"`, `"-$3.50"`.
///
/// Strips one leading currency symbol (after an optional sign), thousands
/// separators in correct three-digit groups, and one trailing `%`. A percent
/// sign does not rescale. Returns `None` for anything else, including
/// misgrouped commas, `inf` and `nan`.
pub fn normalize_number(s: &str) -> Option<f64> {
    let mut t = s.trim();
    let mut negative = false;
    if let Some(r) = t.strip_prefix('-') {
        negative = true;
        t = r;
    } else if let Some(r) = t.strip_prefix('+') {
        t = r;
    }
    if let Some(c) = t.chars().next().filter(|c| CURRENCY.contains(c)) {
        t = &t[c.len_utf8()..];
        if !negative {
            if let Some(r) = t.strip_prefix('-') {
                negative = true;
                t = r;
            }
        }
    }
    if let Some(r) = t.strip_suffix('%') {
        t = r;
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], Some(&t[i + 1..])),
        None => (t, None),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (mantissa, None),
    };
    let int_digits = strip_grouping(int_part)?;
    if let Some(f) = frac_part {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
    }
    if int_digits.is_empty() && frac_part.is_none() {
        return None;
    }
    if let Some(e) = exponent {
        let digits = e.strip_prefix(['+', '-']).unwrap_or(e);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
    }

    let mut plain = alloc::string::String::with_capacity(t.len() + 1);
    if negative {
        plain.push('-');
    }
    plain.push_str(if int_digits.is_empty() { "0" } else { &int_digits });
    if let Some(f) = frac_part {
        plain.push('.');
        plain.push_str(f);
    }
    if let Some(e) = exponent {
        plain.push('e');
        plain.push_str(e);
    }
    let v: f64 = plain.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Removes thousands separators when grouping is valid; digits only.
fn strip_grouping(s: &str) -> Option<alloc::string::String> {
    if !s.contains(',') {
        return s.bytes().all(|b| b.is_ascii_digit()).then(|| s.into());
    }
    let mut groups = s.split(',');
    let first = groups.next()?;
    if first.is_empty() || first.len() > 3 || !first.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut out = alloc::string::String::from(first);
    for g in groups {
        if g.len() != 3 || !g.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        out.push_str(g);
    }
    Some(out)
}
