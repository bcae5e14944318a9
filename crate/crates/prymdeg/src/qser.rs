//! Serde adapters writing rationals as strings like `"3/2"`.

use serde::{de::Error, Deserialize, Deserializer, Serializer};

use crate::linalg::Rat;

pub fn format(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse(s: &str) -> Result<Rat, String> {
    let bad = || format!("not a rational: {s:?}");
    match s.split_once('/') {
        None => s.trim().parse::<i128>().map(Rat::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n = n.trim().parse::<i128>().map_err(|_| bad())?;
            let d = d.trim().parse::<i128>().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
    }
}

pub mod one {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse(s).map_err(D::Error::custom)).collect()
    }
}

pub mod mat {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Rat>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter().map(|r| r.iter().map(format).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rat>>, D::Error> {
        let m = Vec::<Vec<String>>::deserialize(d)?;
        m.iter()
            .map(|r| r.iter().map(|s| parse(s).map_err(D::Error::custom)).collect())
            .collect()
    }
}
