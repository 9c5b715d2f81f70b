pub fn format_float(_v: f64) -> String { String::new() }
pub struct CsvWriter;
