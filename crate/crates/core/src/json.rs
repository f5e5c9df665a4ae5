//! JSON rendering. Every float is written with 17 significant digits so that
//! files round-trip bit-exactly; matrices are nested row-major arrays.

use std::io;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::ser::Formatter;

/// Compact formatter writing floats as `{:.16e}` (17 significant digits).
#[derive(Clone, Copy, Debug, Default)]
pub struct SignificantDigits17;

impl Formatter for SignificantDigits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_writer<W: io::Write, T: Serialize + ?Sized>(
    writer: W,
    value: &T,
) -> serde_json::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(writer, SignificantDigits17);
    value.serialize(&mut ser)
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    to_writer(&mut buf, value).expect("serialization into memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn from_str<T: DeserializeOwned>(s: &str) -> serde_json::Result<T> {
    serde_json::from_str(s)
}

/// `#[serde(with = "matrix_rows")]` for `nalgebra` dynamic matrices.
pub mod matrix_rows {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::symmat::Matrix;

    pub fn serialize<S: Serializer>(m: &Matrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(Matrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_17_digits_and_round_trip() {
        let x = 1.0f64 / 3.0;
        let s = to_string(&vec![x, 0.0, -2.5e-300, 1e22]);
        assert_eq!(
            s,
            "[3.3333333333333331e-1,0.0000000000000000e0,-2.5000000000000000e-300,1.0000000000000000e22]"
        );
        let back: Vec<f64> = from_str(&s).unwrap();
        assert_eq!(back, vec![x, 0.0, -2.5e-300, 1e22]);
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(to_string(&f64::NAN), "null");
    }
}
