//! Issuer, rating and event records in the default-and-recovery database
//! layout.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

macro_rules! string_enum {
    (
        $(#[$meta:meta])*
        pub enum $name:ident { $($variant:ident => $text:literal),+ $(,)? }
    ) => {
        $(#[$meta])*
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = UnknownValue;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim() {
                    $($text => Ok($name::$variant),)+
                    other => Err(UnknownValue {
                        kind: stringify!($name),
                        value: other.to_string(),
                    }),
                }
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {kind} '{value}'")]
pub struct UnknownValue {
    pub kind: &'static str,
    pub value: String,
}

string_enum! {
    /// Long-term issuer rating. `WR` marks a withdrawn rating: the issuer
    /// stays in the history but belongs to no rated cohort afterwards.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
    pub enum Rating {
        Aaa => "Aaa",
        Aa1 => "Aa1",
        Aa2 => "Aa2",
        Aa3 => "Aa3",
        A1 => "A1",
        A2 => "A2",
        A3 => "A3",
        Baa1 => "Baa1",
        Baa2 => "Baa2",
        Baa3 => "Baa3",
        Ba1 => "Ba1",
        Ba2 => "Ba2",
        Ba3 => "Ba3",
        B1 => "B1",
        B2 => "B2",
        B3 => "B3",
        Caa1 => "Caa1",
        Caa2 => "Caa2",
        Caa3 => "Caa3",
        Ca => "Ca",
        C => "C",
        Wr => "WR",
    }
}

impl Rating {
    /// The speculative grades used for the loss/recovery calibration.
    pub const SPECULATIVE: [Rating; 6] = [
        Rating::B1,
        Rating::B2,
        Rating::B3,
        Rating::Caa1,
        Rating::Caa2,
        Rating::Caa3,
    ];
}

string_enum! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
    pub enum Seniority {
        SeniorSecured => "senior_secured",
        SeniorUnsecured => "senior_unsecured",
        Other => "other",
    }
}

string_enum! {
    #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
    pub enum EventType {
        Default => "default",
        Withdrawal => "withdrawal",
    }
}

impl EventType {
    /// Same-day precedence: a default outranks a withdrawal.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            EventType::Default => 0,
            EventType::Withdrawal => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issuer {
    pub issuer_id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingSnapshot {
    pub issuer_id: String,
    pub date: NaiveDate,
    pub rating: Rating,
    pub seniority: Seniority,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IssuerEvent {
    pub issuer_id: String,
    pub event_type: EventType,
    pub date: NaiveDate,
    /// Trading price 30 days after default as a fraction of face value.
    pub recovery_rate: Option<f64>,
}

impl IssuerEvent {
    pub fn default_with_recovery(issuer_id: impl Into<String>, date: NaiveDate, rr: f64) -> Self {
        Self {
            issuer_id: issuer_id.into(),
            event_type: EventType::Default,
            date,
            recovery_rate: Some(rr),
        }
    }

    pub fn withdrawal(issuer_id: impl Into<String>, date: NaiveDate) -> Self {
        Self {
            issuer_id: issuer_id.into(),
            event_type: EventType::Withdrawal,
            date,
            recovery_rate: None,
        }
    }

    /// Checks the per-row invariants; returns a message on violation.
    pub fn check(&self) -> Result<(), String> {
        match (self.event_type, self.recovery_rate) {
            (EventType::Withdrawal, Some(_)) => {
                Err("withdrawal rows must not carry a recovery_rate".into())
            }
            (EventType::Default, Some(rr)) if !(0.0..=1.0).contains(&rr) => {
                Err(format!("recovery_rate {rr} outside [0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rating_text_round_trip() {
        for &r in Rating::ALL {
            assert_eq!(r.as_str().parse::<Rating>().unwrap(), r);
        }
        assert!("Caa4".parse::<Rating>().is_err());
        assert!(Rating::B1 < Rating::Caa3);
    }

    #[test]
    fn event_invariants() {
        let d = NaiveDate::from_ymd_opt(2001, 1, 1).unwrap();
        assert!(IssuerEvent::default_with_recovery("a", d, 0.4).check().is_ok());
        assert!(IssuerEvent::default_with_recovery("a", d, 1.2).check().is_err());
        let mut w = IssuerEvent::withdrawal("a", d);
        assert!(w.check().is_ok());
        w.recovery_rate = Some(0.5);
        assert!(w.check().is_err());
    }
}
