//! `key = value` parameter files.
//!
//! Recognised keys are `mu`, `q1`, `a2`, `mb`, `t` and `cd`; keys missing
//! from a file keep their default. `#` starts a comment.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::ModelInputs;

pub const SUN_EARTH: &str = include_str!("../presets/sun-earth.txt");

/// Looks up a shipped preset by name.
pub fn builtin(name: &str) -> Option<ModelInputs> {
    match name {
        "sun-earth" => Some(parse(SUN_EARTH).expect("shipped preset parses")),
        "classical" => Some(ModelInputs::default()),
        "table1" => Some(ModelInputs {
            mb: 0.2,
            ..ModelInputs::default()
        }),
        _ => None,
    }
}

pub fn parse(text: &str) -> Result<ModelInputs> {
    parse_onto(ModelInputs::default(), text)
}

pub fn parse_onto(mut inputs: ModelInputs, text: &str) -> Result<ModelInputs> {
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Preset {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let value: f64 = value.trim().parse().map_err(|_| Error::Preset {
            line,
            message: format!("`{}` is not a number", value.trim()),
        })?;
        let slot = match key.trim().to_ascii_lowercase().as_str() {
            "mu" => &mut inputs.mu,
            "q1" => &mut inputs.q1,
            "a2" => &mut inputs.a2,
            "mb" => &mut inputs.mb,
            "t" => &mut inputs.t,
            "cd" => &mut inputs.cd,
            other => {
                return Err(Error::Preset {
                    line,
                    message: format!("unknown key `{other}`"),
                })
            }
        };
        *slot = value;
    }
    inputs.validate()?;
    Ok(inputs)
}

pub fn load(path: &Path) -> Result<ModelInputs> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn render(inputs: &ModelInputs) -> String {
    format!(
        "mu = {}\nq1 = {}\na2 = {}\nmb = {}\nt = {}\ncd = {}\n",
        inputs.mu, inputs.q1, inputs.a2, inputs.mb, inputs.t, inputs.cd
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SUN_EARTH_MU;

    #[test]
    fn sun_earth_preset() {
        let p = builtin("sun-earth").unwrap();
        assert_eq!(p.mu, SUN_EARTH_MU);
        assert_eq!(p.q1, 1.0);
        assert!((p.cd - 10065.3).abs() < 0.01);
    }

    #[test]
    fn missing_keys_keep_defaults_and_comments_are_ignored() {
        let p = parse("# header\nq1=0.5   # grains\n\nMB = 0.25\n").unwrap();
        assert_eq!(p.q1, 0.5);
        assert_eq!(p.mb, 0.25);
        assert_eq!(p.mu, ModelInputs::default().mu);
    }

    #[test]
    fn bad_lines_report_their_number() {
        assert!(matches!(
            parse("mu = 0.1\nfoo = 2"),
            Err(Error::Preset { line: 2, .. })
        ));
        assert!(matches!(
            parse("mu 0.1"),
            Err(Error::Preset { line: 1, .. })
        ));
        assert!(matches!(
            parse("mu = x"),
            Err(Error::Preset { line: 1, .. })
        ));
        assert!(matches!(
            parse("mu = 0.9"),
            Err(Error::Domain { field: "mu", .. })
        ));
    }

    #[test]
    fn render_round_trips() {
        let p = ModelInputs {
            mu: 0.0123,
            q1: 0.75,
            a2: 0.01,
            mb: 0.4,
            t: 0.02,
            cd: 123.5,
        };
        assert_eq!(parse(&render(&p)).unwrap(), p);
    }
}
