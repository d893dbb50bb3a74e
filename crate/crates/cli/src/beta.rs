//! Frequency specifications accepted by `--beta`.

use std::str::FromStr;
use sturm_core::cf::{cf_expand, pathological_generator, CfError, ContinuedFraction, GrowthPolicy};

#[derive(Debug, Clone, PartialEq)]
pub enum BetaSpec {
    Golden,
    Silver,
    Precious(u64),
    List(Vec<u64>),
    Real(f64),
    /// Super-geometric quotients `a_{n+1} = q_n^exponent`.
    Pathological { first: u64, exponent: u32 },
}

impl FromStr for BetaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, tail) = s.split_once(':').map_or((s, None), |(h, t)| (h, Some(t)));
        let int = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("bad integer '{t}': {e}"));
        match (head, tail) {
            ("golden", None) => Ok(Self::Golden),
            ("silver", None) => Ok(Self::Silver),
            ("precious", Some(a)) => Ok(Self::Precious(int(a)?)),
            ("list", Some(l)) => Ok(Self::List(l.split(',').map(int).collect::<Result<_, _>>()?)),
            ("real", Some(x)) => x.trim().parse().map(Self::Real).map_err(|e| format!("bad real '{x}': {e}")),
            ("pathological", None) => {
                let p = GrowthPolicy::default();
                Ok(Self::Pathological { first: p.first, exponent: p.exponent })
            }
            ("pathological", Some(t)) => {
                let (f, e) = t.split_once(',').ok_or("expected pathological:first,exponent")?;
                let exponent = e.trim().parse().map_err(|err| format!("bad exponent '{e}': {err}"))?;
                Ok(Self::Pathological { first: int(f)?, exponent })
            }
            _ => Err(format!(
                "unknown frequency '{s}' (expected golden, silver, precious:a, list:a1,a2,..., real:x or pathological[:first,exponent])"
            )),
        }
    }
}

/// A prefix of at most `depth` quotients, with notes on anything truncated.
pub struct Resolved {
    pub cf: ContinuedFraction,
    pub warnings: Vec<String>,
}

impl BetaSpec {
    pub fn resolve(&self, depth: usize) -> Result<Resolved, CfError> {
        let mut warnings = Vec::new();
        let cf = match self {
            Self::Golden => ContinuedFraction::golden(depth)?,
            Self::Silver => ContinuedFraction::silver(depth)?,
            Self::Precious(a) => ContinuedFraction::precious(*a, depth)?,
            Self::List(q) => {
                let cf = ContinuedFraction::from_quotients(q.clone())?;
                if cf.len() > depth {
                    cf.truncated(depth)?
                } else {
                    if cf.len() < depth {
                        warnings.push(format!("quotient list has {} entries, fewer than depth {depth}", cf.len()));
                    }
                    cf
                }
            }
            Self::Real(x) => match cf_expand(*x, depth) {
                Ok(cf) => cf,
                Err(CfError::PrecisionExhausted { valid }) if !valid.is_empty() => {
                    warnings.push(format!("floating precision exhausted after {} quotients", valid.len()));
                    ContinuedFraction::from_quotients(valid)?
                }
                Err(e) => return Err(e),
            },
            Self::Pathological { first, exponent } => {
                pathological_generator(GrowthPolicy { first: *first, exponent: *exponent }, depth)?
            }
        };
        Ok(Resolved { cf, warnings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!("golden".parse(), Ok(BetaSpec::Golden));
        assert_eq!("precious:3".parse(), Ok(BetaSpec::Precious(3)));
        assert_eq!("list:1,2,3".parse(), Ok(BetaSpec::List(vec![1, 2, 3])));
        assert_eq!("real:0.25".parse(), Ok(BetaSpec::Real(0.25)));
        assert_eq!("pathological:2,3".parse(), Ok(BetaSpec::Pathological { first: 2, exponent: 3 }));
        assert!("bronze".parse::<BetaSpec>().is_err());
        assert!("list:1,x".parse::<BetaSpec>().is_err());
    }

    #[test]
    fn real_expansion() {
        let r = BetaSpec::Real(0.6180339887).resolve(8).unwrap();
        assert_eq!(r.cf.quotients(), &[1; 8]);
    }
}
