//! Initial-data specifications: `preset:plane_wave(k, amplitude)`,
//! `preset:constant(c)`, `preset:random_hs(s, seed)` and `file:<path>`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use cnls_core::field::random_hs_field;
use cnls_core::{Complex64, SpectralField};

use crate::error::{io_error, CliError};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    PlaneWave {
        k: i64,
        amplitude: f64,
    },
    Constant {
        value: f64,
    },
    /// `seed = None` defers to the run seed.
    RandomHs {
        s: f64,
        seed: Option<u64>,
    },
    File(PathBuf),
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData::PlaneWave {
            k: 1,
            amplitude: 1.0,
        }
    }
}

impl InitialData {
    pub fn build(&self, mode_cutoff: usize, run_seed: u64) -> Result<SpectralField, CliError> {
        match self {
            InitialData::PlaneWave { k, amplitude } => {
                if k.unsigned_abs() as usize > mode_cutoff {
                    return Err(CliError::InitialData(format!(
                        "plane wave mode {k} exceeds N = {mode_cutoff}"
                    )));
                }
                Ok(SpectralField::plane_wave(
                    mode_cutoff,
                    *k,
                    Complex64::new(*amplitude, 0.0),
                ))
            }
            InitialData::Constant { value } => Ok(SpectralField::constant(
                mode_cutoff,
                Complex64::new(*value, 0.0),
            )),
            InitialData::RandomHs { s, seed } => {
                Ok(random_hs_field(*s, mode_cutoff, seed.unwrap_or(run_seed))?)
            }
            InitialData::File(path) => {
                let text = std::fs::read_to_string(path).map_err(io_error(path))?;
                Ok(SpectralField::from_json(&text)?.with_cutoff(mode_cutoff))
            }
        }
    }
}

fn parse_args(name: &str, body: Option<&str>, max: usize) -> Result<Vec<f64>, CliError> {
    let Some(body) = body else {
        return Ok(Vec::new());
    };
    let args: Vec<f64> = body
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(|a| {
            a.parse::<f64>()
                .map_err(|_| CliError::InitialData(format!("{name}: bad argument {a:?}")))
        })
        .collect::<Result<_, _>>()?;
    if args.len() > max {
        return Err(CliError::InitialData(format!(
            "{name} takes at most {max} arguments, got {}",
            args.len()
        )));
    }
    Ok(args)
}

fn integer(name: &str, v: f64) -> Result<i64, CliError> {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        Ok(v as i64)
    } else {
        Err(CliError::InitialData(format!(
            "{name}: expected an integer, got {v}"
        )))
    }
}

impl FromStr for InitialData {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let text = text.trim();
        if let Some(path) = text.strip_prefix("file:") {
            if path.is_empty() {
                return Err(CliError::InitialData("file: needs a path".into()));
            }
            return Ok(InitialData::File(PathBuf::from(path)));
        }
        let spec = text.strip_prefix("preset:").unwrap_or(text);
        let (name, body) = match spec.find('(') {
            Some(open) => {
                let inner = spec[open + 1..].strip_suffix(')').ok_or_else(|| {
                    CliError::InitialData(format!("unbalanced parentheses in {text:?}"))
                })?;
                (&spec[..open], Some(inner))
            }
            None => (spec, None),
        };
        match name {
            "plane_wave" => {
                let a = parse_args(name, body, 2)?;
                Ok(InitialData::PlaneWave {
                    k: integer(name, a.first().copied().unwrap_or(1.0))?,
                    amplitude: a.get(1).copied().unwrap_or(1.0),
                })
            }
            "constant" => {
                let a = parse_args(name, body, 1)?;
                Ok(InitialData::Constant {
                    value: a.first().copied().unwrap_or(1.0),
                })
            }
            "random_hs" => {
                let a = parse_args(name, body, 2)?;
                let seed = match a.get(1) {
                    Some(&v) if v >= 0.0 => Some(integer(name, v)? as u64),
                    Some(&v) => return Err(CliError::InitialData(format!("negative seed {v}"))),
                    None => None,
                };
                Ok(InitialData::RandomHs {
                    s: a.first().copied().unwrap_or(1.0),
                    seed,
                })
            }
            other => Err(CliError::InitialData(format!(
                "unknown preset {other:?} (expected plane_wave, constant, random_hs or file:<path>)"
            ))),
        }
    }
}

impl fmt::Display for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::PlaneWave { k, amplitude } => {
                write!(f, "preset:plane_wave({k},{amplitude})")
            }
            InitialData::Constant { value } => write!(f, "preset:constant({value})"),
            InitialData::RandomHs {
                s,
                seed: Some(seed),
            } => write!(f, "preset:random_hs({s},{seed})"),
            InitialData::RandomHs { s, seed: None } => write!(f, "preset:random_hs({s})"),
            InitialData::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_presets() {
        assert_eq!(
            "preset:plane_wave".parse::<InitialData>().unwrap(),
            InitialData::default()
        );
        assert_eq!(
            "plane_wave(2, 0.5)".parse::<InitialData>().unwrap(),
            InitialData::PlaneWave {
                k: 2,
                amplitude: 0.5
            }
        );
        assert_eq!(
            "preset:random_hs(0.75,11)".parse::<InitialData>().unwrap(),
            InitialData::RandomHs {
                s: 0.75,
                seed: Some(11)
            }
        );
        assert_eq!(
            "preset:constant(-2)".parse::<InitialData>().unwrap(),
            InitialData::Constant { value: -2.0 }
        );
        assert_eq!(
            "file:/tmp/u0.json".parse::<InitialData>().unwrap(),
            InitialData::File("/tmp/u0.json".into())
        );
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "preset:gauss",
            "plane_wave(1.5)",
            "plane_wave(1",
            "constant(1,2)",
            "random_hs(1,-3)",
            "file:",
        ] {
            assert!(bad.parse::<InitialData>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for spec in [
            "preset:plane_wave(-3,0.25)",
            "preset:constant(2)",
            "preset:random_hs(0.75,11)",
            "preset:random_hs(1)",
        ] {
            let d: InitialData = spec.parse().unwrap();
            assert_eq!(d.to_string(), spec);
            assert_eq!(d.to_string().parse::<InitialData>().unwrap(), d);
        }
    }

    #[test]
    fn builds_fields() {
        let u = InitialData::default().build(8, 0).unwrap();
        assert_eq!(u.eval_at(0.0), Complex64::new(1.0, 0.0));
        assert!(InitialData::PlaneWave {
            k: 9,
            amplitude: 1.0
        }
        .build(8, 0)
        .is_err());
        let a = InitialData::RandomHs { s: 1.0, seed: None }
            .build(16, 5)
            .unwrap();
        let b = InitialData::RandomHs {
            s: 1.0,
            seed: Some(5),
        }
        .build(16, 99)
        .unwrap();
        assert_eq!(a, b);
    }
}
