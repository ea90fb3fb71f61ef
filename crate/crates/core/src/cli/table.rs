/// `%.12g`: twelve significant digits, trailing zeros dropped, exponent
/// form outside `[1e-4, 1e12)`.
pub fn fmt_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn opt_g(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

/// CSV text with a fixed header.
#[derive(Debug)]
pub struct Table {
    columns: usize,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &'static str) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let names: Vec<&str> = header.split(',').collect();
        writer.write_record(&names).expect("writing to memory");
        Table { columns: names.len(), writer }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        debug_assert_eq!(cells.len(), self.columns);
        self.writer.write_record(cells.iter().map(|c| c.as_ref())).expect("writing to memory");
    }

    pub fn into_text(self) -> String {
        let bytes = self.writer.into_inner().expect("flushing to memory");
        String::from_utf8(bytes).expect("cells are UTF-8")
    }
}
