//! Run configuration: defaults, a line-oriented `key = value` file, then flags.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// `None` runs the default prime grid {3, 5}.
    pub p: Option<u64>,
    pub r: u32,
    pub n: u32,
    /// Largest T of the localisation grid.
    pub tmax: f64,
    pub seed: u64,
    /// Tolerance for checks that are exact up to rounding.
    pub tol: f64,
    /// Draws for the random amplifier test.
    pub draws: usize,
    pub conjugations: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { p: None, r: 1, n: 1, tmax: 6400.0, seed: 7, tol: 1e-9, draws: 100, conjugations: 20 }
    }
}

fn parse<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "p" => self.p = Some(parse(key, value)?),
            "r" => self.r = parse(key, value)?,
            "n" => self.n = parse(key, value)?,
            "tmax" => self.tmax = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "draws" => self.draws = parse(key, value)?,
            "conjugations" => self.conjugations = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.p {
            if p == 2 || !is_prime(p) || p > 13 {
                return Err(Error::Config(format!("p = {p} must be an odd prime ≤ 13")));
            }
        }
        if !(1..=2).contains(&self.r) {
            return Err(Error::Config(format!("r = {} must be 1 or 2", self.r)));
        }
        if !(1..=2).contains(&self.n) {
            return Err(Error::Config(format!("n = {} must be 1 or 2", self.n)));
        }
        if !(self.tmax >= 400.0 && self.tmax <= 6400.0) {
            return Err(Error::Config(format!("tmax = {} must lie in [400, 6400]", self.tmax)));
        }
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return Err(Error::Config(format!("tol = {} must lie in (0, 1e-3)", self.tol)));
        }
        if self.draws == 0 || self.conjugations == 0 {
            return Err(Error::Config("draws and conjugations must be positive".into()));
        }
        Ok(())
    }

    pub fn primes(&self) -> Vec<u64> {
        self.p.map_or_else(|| vec![3, 5], |p| vec![p])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file_text() {
        let mut c = RunConfig::default();
        c.apply_text("# grid\np = 5\n\ntmax=1600 # shorter\n").unwrap();
        assert_eq!(c.p, Some(5));
        assert_eq!(c.tmax, 1600.0);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("q = 1").is_err());
        assert!(c.apply_text("p").is_err());
        for (k, v) in [("p", "9"), ("p", "2"), ("p", "17"), ("r", "3"), ("tmax", "10000")] {
            let mut c = RunConfig::default();
            c.set(k, v).unwrap();
            assert!(c.validate().is_err(), "{k} = {v}");
        }
    }
}
