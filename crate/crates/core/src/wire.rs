//! On-disk formats: decimal-string JSON for parameters and codewords, and a
//! raw little-endian binary layout for codewords.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::frs::FrsCodeword;
use crate::Rational;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
    #[error("binary codeword has {got} bytes, expected {expected}")]
    BinaryLength { expected: usize, got: usize },
    #[error("codeword rows have unequal lengths")]
    Ragged,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Parses `"3"`, `"1/30"` or a terminating decimal such as `"0.125"`.
pub fn parse_rational(s: &str) -> Result<Rational, WireError> {
    let err = || WireError::Parse { what: "rational", input: s.to_string() };
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let neg = int.starts_with('-');
        let whole = if int.is_empty() || int == "-" { BigInt::zero() } else { BigInt::from_str(int).map_err(|_| err())? };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let f = Rational::new(BigInt::from_str(frac).map_err(|_| err())?, scale);
        let w = Rational::from_integer(whole);
        return Ok(if neg { w - f } else { w + f });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| err())
}

pub fn parse_u64(s: &str) -> Result<u64, WireError> {
    s.trim().parse().map_err(|_| WireError::Parse { what: "unsigned integer", input: s.to_string() })
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        r.to_string()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrString {
    Num(u64),
    Str(String),
}

/// Serde adapter: `u64` as a decimal string, also accepting bare numbers.
pub mod dec_u64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match NumOrString::deserialize(d)? {
            NumOrString::Num(n) => Ok(n),
            NumOrString::Str(s) => parse_u64(&s).map_err(de::Error::custom),
        }
    }
}

/// Serde adapter: rationals as `"p/q"` strings, also accepting integers.
pub mod dec_rational {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        match NumOrString::deserialize(d)? {
            NumOrString::Num(n) => Ok(Rational::from_integer(n.into())),
            NumOrString::Str(s) => parse_rational(&s).map_err(de::Error::custom),
        }
    }
}

/// Serde adapter: vectors of field elements as decimal strings.
pub mod dec_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[u64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(u64::to_string))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
        Vec::<NumOrString>::deserialize(d)?
            .into_iter()
            .map(|x| match x {
                NumOrString::Num(n) => Ok(n),
                NumOrString::Str(s) => parse_u64(&s).map_err(de::Error::custom),
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct Row(#[serde(with = "dec_vec")] Vec<u64>);

pub fn codeword_to_json(c: &FrsCodeword) -> String {
    let rows: Vec<Row> = c.symbols.iter().cloned().map(Row).collect();
    serde_json::to_string_pretty(&rows).expect("strings serialise")
}

pub fn codeword_from_json(s: &str) -> Result<FrsCodeword, WireError> {
    let rows: Vec<Row> = serde_json::from_str(s)?;
    let symbols: Vec<Vec<u64>> = rows.into_iter().map(|r| r.0).collect();
    if symbols.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(WireError::Ragged);
    }
    Ok(FrsCodeword { symbols })
}

/// Row-major little-endian `u64` words.
pub fn codeword_to_bytes(c: &FrsCodeword) -> Vec<u8> {
    c.symbols.iter().flatten().flat_map(|x| x.to_le_bytes()).collect()
}

pub fn codeword_from_bytes(bytes: &[u8], n: usize, u: usize) -> Result<FrsCodeword, WireError> {
    let expected = n * u * 8;
    if bytes.len() != expected {
        return Err(WireError::BinaryLength { expected, got: bytes.len() });
    }
    let words: Vec<u64> = bytes
        .chunks_exact(8)
        .map(|b| u64::from_le_bytes(b.try_into().expect("chunk of 8")))
        .collect();
    Ok(FrsCodeword { symbols: words.chunks(u.max(1)).map(<[u64]>::to_vec).collect() })
}

pub fn vector_to_json(v: &[u64]) -> String {
    serde_json::to_string(&Row(v.to_vec())).expect("strings serialise")
}

pub fn vector_from_json(s: &str) -> Result<Vec<u64>, WireError> {
    Ok(serde_json::from_str::<Row>(s)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/30").unwrap(), r(1, 30));
        assert_eq!(parse_rational("2/60").unwrap(), r(1, 30));
        assert_eq!(parse_rational("0.125").unwrap(), r(1, 8));
        assert_eq!(parse_rational("-1.5").unwrap(), r(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), r(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
        assert_eq!(format_rational(&r(4, 2)), "2");
        assert_eq!(format_rational(&r(1, 30)), "1/30");
    }

    #[test]
    fn codeword_formats() {
        let c = FrsCodeword { symbols: vec![vec![1, 240], vec![0, 7]] };
        let js = codeword_to_json(&c);
        assert!(js.contains("\"240\""));
        assert_eq!(codeword_from_json(&js).unwrap(), c);
        assert_eq!(codeword_from_json("[[1, \"240\"], [0, 7]]").unwrap(), c);
        assert!(matches!(codeword_from_json("[[1], [2, 3]]"), Err(WireError::Ragged)));
        let bytes = codeword_to_bytes(&c);
        assert_eq!(bytes.len(), 32);
        assert_eq!(&bytes[8..16], &240u64.to_le_bytes());
        assert_eq!(codeword_from_bytes(&bytes, 2, 2).unwrap(), c);
        assert!(codeword_from_bytes(&bytes[..31], 2, 2).is_err());
    }

    #[test]
    fn vectors() {
        assert_eq!(vector_to_json(&[3, 4]), "[\"3\",\"4\"]");
        assert_eq!(vector_from_json("[\"3\", 4]").unwrap(), vec![3, 4]);
    }
}
