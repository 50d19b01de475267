//! Friction model constants and their textual serialization.
//!
//! [`FrictionParams`] collects the six constants that fully determine the
//! model: the steady-state (Stribeck) curve
//!
//! ```text
//! F_ss(v) = sign(v) · (F_c + (F_s − F_c) · exp(−(|v|/V)^delta_exp)) + sigma·v
//! ```
//!
//! and the presliding scaling factor `s` that converts displacement into the
//! normalized presliding distance `z` (see [`crate::friction`]).
//!
//! Parameter files are flat key–value text documents; see
//! [`FrictionParams::from_key_value_str`] for the accepted grammar.

use crate::error::{Error, Result};

/// Constants of the steady-state friction curve plus the presliding scale.
///
/// Units are any consistent system (the model is unit-agnostic); the
/// documented dimensions below fix only the relative roles.
///
/// Invariants, checked by [`FrictionParams::validate`]:
/// * `f_c > 0` — Coulomb level is a positive force,
/// * `f_s ≥ f_c` — stiction bounds Coulomb friction from above,
/// * `sigma ≥ 0` — viscous losses cannot inject energy,
/// * `v > 0`, `delta_exp > 0` — the Stribeck decay must be well-formed,
/// * `s > 0` — presliding distances scale positively,
/// * all fields finite.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrictionParams {
    /// Coulomb friction level `F_c` (force). Lower bound of `|F_ss|`.
    pub f_c: f64,
    /// Stiction level `F_s` (force). Upper bound of `|F_ss|` and the
    /// magnitude approached as `v → 0` on the steady-state curve.
    pub f_s: f64,
    /// Linear viscous coefficient `sigma` (force·time/length).
    pub sigma: f64,
    /// Stribeck velocity scale `V` (length/time): the velocity scale over
    /// which friction decays from `F_s` towards `F_c`.
    pub v: f64,
    /// Stribeck shape exponent `delta_exp` (dimensionless). `1` gives the
    /// classical exponential decay.
    pub delta_exp: f64,
    /// Presliding scaling factor `s` (1/length): `z` accumulates `s·|dx|`.
    pub s: f64,
}

impl Default for FrictionParams {
    /// Normalized defaults: `F_c = 1`, `F_s = 1.5·F_c`, `sigma = 0`,
    /// `V = 0.1`, `delta_exp = 1`, `s = 1`.
    fn default() -> Self {
        Self {
            f_c: 1.0,
            f_s: 1.5,
            sigma: 0.0,
            v: 0.1,
            delta_exp: 1.0,
            s: 1.0,
        }
    }
}

/// Serialization order and key names of the parameter document.
const KEYS: [&str; 6] = ["F_c", "F_s", "sigma", "V", "delta_exp", "s"];

impl FrictionParams {
    /// Checks every invariant, reporting the first violation.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] naming the offending field.
    pub fn validate(&self) -> Result<()> {
        let all = [self.f_c, self.f_s, self.sigma, self.v, self.delta_exp, self.s];
        if let Some(i) = all.iter().position(|x| !x.is_finite()) {
            return Err(Error::Domain(format!(
                "parameter {} must be finite, got {}",
                KEYS[i], all[i]
            )));
        }
        if self.f_c <= 0.0 {
            return Err(Error::Domain(format!("F_c must be > 0, got {}", self.f_c)));
        }
        if self.f_s < self.f_c {
            return Err(Error::Domain(format!(
                "F_s must be ≥ F_c, got F_s = {} < F_c = {}",
                self.f_s, self.f_c
            )));
        }
        if self.sigma < 0.0 {
            return Err(Error::Domain(format!(
                "sigma must be ≥ 0, got {}",
                self.sigma
            )));
        }
        if self.v <= 0.0 {
            return Err(Error::Domain(format!("V must be > 0, got {}", self.v)));
        }
        if self.delta_exp <= 0.0 {
            return Err(Error::Domain(format!(
                "delta_exp must be > 0, got {}",
                self.delta_exp
            )));
        }
        if self.s <= 0.0 {
            return Err(Error::Domain(format!("s must be > 0, got {}", self.s)));
        }
        Ok(())
    }

    /// Mid-point steady-state level `F̂_ss = F_c + (F_s − F_c)/2`, the
    /// average of the curve's two bounds.
    #[must_use]
    pub fn average_steady_state(&self) -> f64 {
        self.f_c + 0.5 * (self.f_s - self.f_c)
    }

    /// Renders the parameters as a flat key–value document.
    ///
    /// The output parses back via [`FrictionParams::from_key_value_str`] and
    /// round-trips bit-exactly (shortest-round-trip float formatting).
    ///
    /// ```
    /// use stickslip::FrictionParams;
    /// let p = FrictionParams::default();
    /// let doc = p.to_key_value_string();
    /// assert_eq!(FrictionParams::from_key_value_str(&doc).unwrap(), p);
    /// ```
    #[must_use]
    pub fn to_key_value_string(&self) -> String {
        let vals = [self.f_c, self.f_s, self.sigma, self.v, self.delta_exp, self.s];
        let mut out = String::new();
        for (key, val) in KEYS.iter().zip(vals) {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&val.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses a flat key–value document.
    ///
    /// Grammar: one `key = value` pair per line; the six keys `F_c`, `F_s`,
    /// `sigma`, `V`, `delta_exp`, `s` are all required, each exactly once.
    /// Blank lines and lines starting with `#` are ignored. Values are
    /// decimal floats.
    ///
    /// # Errors
    ///
    /// [`Error::Parse`] with the 1-based line number for malformed lines,
    /// unknown or duplicate keys, and unparsable numbers; [`Error::Domain`]
    /// if a key is missing or the parsed set violates an invariant.
    // The unwraps below are guarded by the missing-key check.
    #[allow(clippy::missing_panics_doc)]
    pub fn from_key_value_str(text: &str) -> Result<Self> {
        let mut seen: [Option<f64>; 6] = [None; 6];
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let slot = KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| Error::Parse {
                    line: line_no,
                    message: format!(
                        "unknown key `{key}` (expected one of {})",
                        KEYS.join(", ")
                    ),
                })?;
            if seen[slot].is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            let value: f64 = value.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid number `{}` for key `{key}`", value.trim()),
            })?;
            seen[slot] = Some(value);
        }
        for (slot, key) in KEYS.iter().enumerate() {
            if seen[slot].is_none() {
                return Err(Error::Domain(format!("missing key `{key}`")));
            }
        }
        let params = Self {
            f_c: seen[0].unwrap(),
            f_s: seen[1].unwrap(),
            sigma: seen[2].unwrap(),
            v: seen[3].unwrap(),
            delta_exp: seen[4].unwrap(),
            s: seen[5].unwrap(),
        };
        params.validate()?;
        Ok(params)
    }
}
