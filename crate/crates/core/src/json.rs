//! JSON output with 17 significant digits per float, so every `f64`
//! round-trips exactly.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// Formats `x` like C's `%.17g`. Non-finite values become `null`.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let digits = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", digits, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Pretty printer whose only change from serde_json's is float formatting.
pub struct G17Formatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for G17Formatter<'_> {
    fn default() -> Self {
        G17Formatter {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for G17Formatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes `value` as indented JSON with `%.17g` floats.
pub fn to_string_g17<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17Formatter::default());
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_and_simple_fractions_stay_short() {
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(0.5), "0.5");
        assert_eq!(format_g17(-2.0), "-2");
        assert_eq!(format_g17(0.0), "0");
    }

    #[test]
    fn seventeen_digits_for_inexact_values() {
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1e-300), "1e-300");
        assert_eq!(format_g17(3e-5), "3.0000000000000001e-5");
        assert_eq!(format_g17(1e20), "1e20");
        assert_eq!(format_g17(f64::NAN), "null");
    }

    #[test]
    fn round_trips_exactly() {
        let mut x = 0.123456789_f64;
        for _ in 0..200 {
            x = x * 7.31 + 1e-3 / x;
            let s = format_g17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            let y = -x * 1e-9;
            assert_eq!(format_g17(y).parse::<f64>().unwrap().to_bits(), y.to_bits());
        }
    }

    #[test]
    fn serializes_nested_values() {
        let v = serde_json::json!({"a": [0.1, 2], "b": {"c": f64::NAN}});
        let s = to_string_g17(&v).unwrap();
        assert!(s.contains("0.10000000000000001"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["a"][1], 2);
        assert!(back["b"]["c"].is_null());
    }
}
