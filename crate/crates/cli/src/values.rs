//! List-valued parameters shared by flags and config files.

use std::fmt;
use std::str::FromStr;

use structural_recovery::cohort::Rating;
use structural_recovery::simulator::RatingTarget;

fn items(s: &str) -> impl Iterator<Item = &str> {
    s.split([',', '|']).map(str::trim).filter(|t| !t.is_empty())
}

fn join<T: fmt::Display>(f: &mut fmt::Formatter<'_>, xs: &[T]) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// Comma-separated numbers, e.g. `0.2,0.6,1.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = items(s)
            .map(|t| t.parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
            .collect::<Result<Vec<_>, _>>()?;
        if v.is_empty() {
            return Err("empty list".into());
        }
        Ok(Self(v))
    }
}

impl fmt::Display for FloatList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join(f, &self.0)
    }
}

/// Rating set, e.g. `Caa1,Caa2,Caa3`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingList(pub Vec<Rating>);

impl FromStr for RatingList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut v = Vec::new();
        for t in items(s) {
            let r: Rating = t.parse().map_err(|e| format!("{e}"))?;
            if !v.contains(&r) {
                v.push(r);
            }
        }
        if v.is_empty() {
            return Err("empty rating list".into());
        }
        Ok(Self(v))
    }
}

impl fmt::Display for RatingList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join(f, &self.0)
    }
}

/// Rating buckets with target PDs, e.g. `B1=0.05,Caa1=0.2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetList(pub Vec<RatingTarget>);

impl FromStr for TargetList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = items(s)
            .map(|t| {
                let (r, p) = t
                    .split_once('=')
                    .ok_or_else(|| format!("'{t}' is not RATING=PD"))?;
                Ok(RatingTarget {
                    rating: r.trim().parse().map_err(|e| format!("{e}"))?,
                    target_pd: p
                        .trim()
                        .parse()
                        .map_err(|_| format!("'{p}' is not a probability"))?,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;
        if v.is_empty() {
            return Err("empty rating list".into());
        }
        Ok(Self(v))
    }
}

impl fmt::Display for TargetList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|t| format!("{}={}", t.rating, t.target_pd))
            .collect();
        join(f, &parts)
    }
}

/// Comma-separated paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PathList(pub Vec<String>);

impl FromStr for PathList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v: Vec<String> = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(String::from)
            .collect();
        if v.is_empty() {
            return Err("empty path list".into());
        }
        Ok(Self(v))
    }
}

impl fmt::Display for PathList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join(f, &self.0)
    }
}

/// Wrapper giving `Display`/`FromStr` round trips for plain path strings.
#[derive(Debug, Clone, PartialEq)]
pub struct PathArg(pub String);

impl FromStr for PathArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim().is_empty() {
            return Err("empty path".into());
        }
        Ok(Self(s.trim().to_string()))
    }
}

impl fmt::Display for PathArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_round_trip() {
        let f: FloatList = "0.2, 0.6,1".parse().unwrap();
        assert_eq!(f.0, vec![0.2, 0.6, 1.0]);
        assert_eq!(f.to_string().parse::<FloatList>().unwrap(), f);
        let r: RatingList = "Caa1|Caa2,Caa1".parse().unwrap();
        assert_eq!(r.0, vec![Rating::Caa1, Rating::Caa2]);
        let t: TargetList = "B1=0.05,Caa3=0.3".parse().unwrap();
        assert_eq!(t.to_string(), "B1=0.05,Caa3=0.3");
        assert!("B1".parse::<TargetList>().is_err());
        assert!("".parse::<FloatList>().is_err());
        assert!("Zz".parse::<RatingList>().is_err());
    }
}
