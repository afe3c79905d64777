//! Physical quantities written with unit suffixes (`"6.8 GHz"`, `"300 mK"`).
//!
//! Parsing is exact: the decimal mantissa and the unit prefix are combined
//! into one decimal literal before conversion, so `"6.8 GHz"` yields the same
//! bits as `6.8e9`. Serialization uses base units and the shortest
//! round-trip representation.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Frequency,
    Temperature,
    Time,
    Power,
    Inductance,
    Capacitance,
    Resistance,
}

impl Dimension {
    pub fn base_unit(self) -> &'static str {
        match self {
            Dimension::Frequency => "Hz",
            Dimension::Temperature => "K",
            Dimension::Time => "s",
            Dimension::Power => "W",
            Dimension::Inductance => "H",
            Dimension::Capacitance => "F",
            Dimension::Resistance => "ohm",
        }
    }

    /// Decimal exponent of `unit` relative to the base unit.
    pub fn unit_exponent(self, unit: &str) -> Option<i32> {
        let table: &[(&str, i32)] = match self {
            Dimension::Frequency => &[("Hz", 0), ("kHz", 3), ("MHz", 6), ("GHz", 9), ("THz", 12)],
            Dimension::Temperature => &[("K", 0), ("mK", -3), ("uK", -6), ("µK", -6)],
            Dimension::Time => {
                &[("s", 0), ("ms", -3), ("us", -6), ("µs", -6), ("ns", -9), ("ps", -12), ("fs", -15)]
            }
            Dimension::Power => &[
                ("W", 0),
                ("mW", -3),
                ("uW", -6),
                ("µW", -6),
                ("nW", -9),
                ("pW", -12),
                ("fW", -15),
                ("aW", -18),
            ],
            Dimension::Inductance => &[("H", 0), ("mH", -3), ("uH", -6), ("µH", -6), ("nH", -9), ("pH", -12)],
            Dimension::Capacitance => &[
                ("F", 0),
                ("uF", -6),
                ("µF", -6),
                ("nF", -9),
                ("pF", -12),
                ("fF", -15),
                ("aF", -18),
            ],
            Dimension::Resistance => &[("ohm", 0), ("Ω", 0), ("kohm", 3), ("kΩ", 3), ("Mohm", 6), ("MΩ", 6)],
        };
        table.iter().find(|(u, _)| *u == unit).map(|&(_, e)| e)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::Frequency => "frequency",
            Dimension::Temperature => "temperature",
            Dimension::Time => "time",
            Dimension::Power => "power",
            Dimension::Inductance => "inductance",
            Dimension::Capacitance => "capacitance",
            Dimension::Resistance => "resistance",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantityError {
    #[error("'{0}' has no unit; write e.g. '6.8 GHz'")]
    MissingUnit(String),
    #[error("unit '{unit}' is not a valid {dimension} unit")]
    WrongUnit { unit: String, dimension: Dimension },
    #[error("'{0}' is not a number")]
    BadNumber(String),
}

pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, QuantityError> {
    let text = text.trim();
    let split = text
        .char_indices()
        .find(|&(_, c)| c.is_alphabetic() && c != 'e' && c != 'E' || c == 'µ' || c == 'Ω')
        .map(|(i, _)| i)
        .ok_or_else(|| QuantityError::MissingUnit(text.to_string()))?;
    let (num, unit) = text.split_at(split);
    let (num, unit) = (num.trim(), unit.trim());
    let unit_exp = dim
        .unit_exponent(unit)
        .ok_or_else(|| QuantityError::WrongUnit { unit: unit.to_string(), dimension: dim })?;
    let bad = || QuantityError::BadNumber(num.to_string());
    let (mantissa, exp) = match num.find(['e', 'E']) {
        Some(i) => (&num[..i], num[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (num, 0),
    };
    if mantissa.is_empty() || !mantissa.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+')) {
        return Err(bad());
    }
    let v: f64 = format!("{mantissa}e{}", exp + unit_exp).parse().map_err(|_| bad())?;
    if !v.is_finite() {
        return Err(bad());
    }
    Ok(v)
}

/// `"<shortest round-trip value> <base unit>"`.
pub fn format_quantity(value: f64, dim: Dimension) -> String {
    format!("{value:e} {}", dim.base_unit())
}

/// Compile-time tag for a [`Quantity`] dimension.
pub trait DimensionTag {
    const DIM: Dimension;
}

/// A value in base SI units that (de)serializes with a unit suffix.
pub struct Quantity<D>(pub f64, PhantomData<D>);

impl<D> Quantity<D> {
    pub const fn new(v: f64) -> Self {
        Quantity(v, PhantomData)
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl<D> Clone for Quantity<D> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<D> Copy for Quantity<D> {}
impl<D> PartialEq for Quantity<D> {
    fn eq(&self, o: &Self) -> bool {
        self.0.to_bits() == o.0.to_bits() || self.0 == o.0
    }
}
impl<D: DimensionTag> fmt::Debug for Quantity<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_quantity(self.0, D::DIM))
    }
}

impl<D: DimensionTag> Serialize for Quantity<D> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_quantity(self.0, D::DIM))
    }
}

impl<'de, D: DimensionTag> Deserialize<'de> for Quantity<D> {
    fn deserialize<De: Deserializer<'de>>(d: De) -> Result<Self, De::Error> {
        struct V<D>(PhantomData<D>);
        impl<D: DimensionTag> Visitor<'_> for V<D> {
            type Value = Quantity<D>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a {} with a unit, e.g. \"1 {}\"", D::DIM, D::DIM.base_unit())
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Self::Value, E> {
                parse_quantity(v, D::DIM).map(Quantity::new).map_err(E::custom)
            }
        }
        d.deserialize_str(V(PhantomData))
    }
}

macro_rules! tag {
    ($name:ident, $alias:ident, $dim:expr) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name;
        impl DimensionTag for $name {
            const DIM: Dimension = $dim;
        }
        pub type $alias = Quantity<$name>;
    };
}

tag!(FrequencyDim, Frequency, Dimension::Frequency);
tag!(TemperatureDim, Temperature, Dimension::Temperature);
tag!(TimeDim, Time, Dimension::Time);
tag!(PowerDim, Power, Dimension::Power);
tag!(InductanceDim, Inductance, Dimension::Inductance);
tag!(CapacitanceDim, Capacitance, Dimension::Capacitance);
tag!(ResistanceDim, Resistance, Dimension::Resistance);
