//! Command-line front end: configuration, argument parsing and output.

use std::collections::BTreeMap;
use std::path::Path;

use g2sew::{Error, C64};

pub mod output;

/// Exit codes shared by every subcommand.
pub mod exit {
    pub const OK: i32 = 0;
    pub const DOMAIN: i32 = 2;
    pub const INCONSISTENT: i32 = 3;
    pub const CUTOFF: i32 = 4;
    pub const VERIFY_FAILED: i32 = 5;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CutoffTooSmall { .. } => exit::CUTOFF,
        e if e.is_domain() => exit::DOMAIN,
        Error::OutOfDisk { .. } | Error::Pole | Error::Coincident | Error::Invalid(_) => exit::DOMAIN,
        _ => exit::INCONSISTENT,
    }
}

/// Parses "re+imi" style complex numbers: "0.3+1.5i", "2i", "-i", "1e-3-2e-1i", "0".
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number {s:?}");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let imag = |x: &str| -> Result<f64, String> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(i) => Ok(C64::new(body[..i].parse::<f64>().map_err(|_| bad())?, imag(&body[i..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// "a,b" to a pair of reals.
pub fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let v: Vec<&str> = s.split(',').map(str::trim).collect();
    match v.as_slice() {
        [a, b] => Ok([a.parse().map_err(|_| format!("bad number {a:?}"))?, b.parse().map_err(|_| format!("bad number {b:?}"))?]),
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

/// Gram matrix rows separated by ';', entries by ','. "2" is A1, "2,-1;-1,2" is A2.
pub fn parse_gram(s: &str) -> Result<Vec<Vec<i64>>, String> {
    s.split(';')
        .map(|row| row.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad gram entry {x:?}"))).collect())
        .collect()
}

/// Run-wide settings. Values come from defaults, then a config file, then flags.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k: usize,
    pub n: usize,
    pub d: u32,
    pub n_max: u32,
    pub r: Option<f64>,
    pub tol_series: f64,
    pub tol_geometry: f64,
    pub format: Format,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: g2sew::defaults::K,
            n: g2sew::defaults::N,
            d: g2sew::defaults::D,
            n_max: g2sew::defaults::N_MAX,
            r: None,
            tol_series: 1e-8,
            tol_geometry: 1e-6,
            format: Format::Json,
            seed: 0,
        }
    }
}

/// Flag values; None means "not given on the command line".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<u32>,
    pub n_max: Option<u32>,
    pub r: Option<f64>,
    pub tol_series: Option<f64>,
    pub tol_geometry: Option<f64>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

/// Flat key=value lines; '#' starts a comment. Keys are case-insensitive.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        out.insert(k.trim().to_ascii_lowercase().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("config key {key}: cannot parse {v:?}"))
}

impl RunConfig {
    pub fn apply_file(&mut self, entries: &BTreeMap<String, String>) -> Result<(), String> {
        for (k, v) in entries {
            match k.as_str() {
                "k" => self.k = num(k, v)?,
                "n" => self.n = num(k, v)?,
                "d" => self.d = num(k, v)?,
                "n_max" => self.n_max = num(k, v)?,
                "r" => self.r = Some(num(k, v)?),
                "tol_series" => self.tol_series = num(k, v)?,
                "tol_geometry" => self.tol_geometry = num(k, v)?,
                "seed" => self.seed = num(k, v)?,
                "format" => {
                    self.format = match v.as_str() {
                        "json" => Format::Json,
                        "csv" => Format::Csv,
                        _ => return Err(format!("config key format: expected json or csv, got {v:?}")),
                    }
                }
                _ => return Err(format!("unknown config key {k}")),
            }
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = o.$f { self.$f = v; } )* };
        }
        take!(k, n, d, n_max, tol_series, tol_geometry, format, seed);
        if o.r.is_some() {
            self.r = o.r;
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.k == 0 || self.n == 0 || self.d == 0 || self.n_max == 0 {
            return Err("K, N, D and N_max must be positive".into());
        }
        if let Some(r) = self.r {
            if !(r > 0.0) {
                return Err("R must be positive".into());
            }
        }
        for (name, t) in [("tol_series", self.tol_series), ("tol_geometry", self.tol_geometry)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(format!("{name} must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    /// defaults < file < flags
    pub fn resolve(file: Option<&Path>, flags: &Overrides) -> Result<Self, String> {
        let mut c = RunConfig::default();
        if let Some(p) = file {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            c.apply_file(&parse_config(&text)?)?;
        }
        c.apply_flags(flags);
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let cases = [
            ("0.3+1.5i", C64::new(0.3, 1.5)),
            ("2i", C64::new(0.0, 2.0)),
            ("-i", C64::new(0.0, -1.0)),
            ("-0.2-1.8i", C64::new(-0.2, -1.8)),
            ("1e-3+2e-1i", C64::new(1e-3, 0.2)),
            ("1.5e+2-3E-2i", C64::new(150.0, -0.03)),
            ("0", C64::new(0.0, 0.0)),
            ("-4", C64::new(-4.0, 0.0)),
            ("1+i", C64::new(1.0, 1.0)),
            (" 0.1 + 0.2 i ", C64::new(0.1, 0.2)),
        ];
        for (s, want) in cases {
            assert_eq!(parse_complex(s).unwrap(), want, "{s}");
        }
        for s in ["", "abc", "1+2", "i1", "1++2i"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    #[test]
    fn gram_and_pairs() {
        assert_eq!(parse_gram("2").unwrap(), vec![vec![2]]);
        assert_eq!(parse_gram("2,-1; -1,2").unwrap(), vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(parse_pair("1, -0.5").unwrap(), [1.0, -0.5]);
        assert!(parse_pair("1").is_err());
    }

    #[test]
    fn flags_beat_file() {
        let mut c = RunConfig::default();
        c.apply_file(&parse_config("K = 12  # comment\nseed=7\nformat=csv\n\nN_max=6").unwrap()).unwrap();
        assert_eq!((c.k, c.seed, c.format, c.n_max), (12, 7, Format::Csv, 6));
        c.apply_flags(&Overrides { k: Some(20), ..Default::default() });
        assert_eq!((c.k, c.seed), (20, 7));
        assert!(c.validate().is_ok());
        assert!(c.apply_file(&parse_config("bogus=1").unwrap()).is_err());
        assert!(parse_config("no equals sign").is_err());
        c.tol_series = 1.5;
        assert!(c.validate().is_err());
    }
}
