//! Deterministic CSV and number formatting.

use anyhow::Result;

const SIGNIFICANT: usize = 9;

/// Formats `x` with nine significant digits: fixed-point for moderate
/// magnitudes, scientific otherwise. Trailing zeros are dropped.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(self) -> Result<String> {
        let bytes = self.writer.into_inner().map_err(|e| anyhow::anyhow!("{}", e.error()))?;
        Ok(String::from_utf8(bytes)?)
    }
}

#[cfg(test)]
mod tests {
    use super::num;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(num(9.0), "9");
        assert_eq!(num(0.321_001_234_56), "0.321001235");
        assert_eq!(num(2.213_456_789_1e-3), "0.00221345679");
        assert_eq!(num(6.949_553_336_8), "6.94955334");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.5e-9), "1.5e-9");
        assert_eq!(num(123_456_789_012.0), "1.23456789e11");
        assert_eq!(num(-1e-7), "-1e-7");
    }

    #[test]
    fn rounding_carry_updates_exponent() {
        assert_eq!(num(9.999_999_999_9), "10");
        assert_eq!(num(0.000_099_999_999_99), "0.0001");
    }
}
