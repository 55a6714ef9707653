//! JSON file formats: instances, families and diagrams.
//!
//! Every operand argument is either inline JSON (it starts with `[` or `{`) or
//! a path to a file holding the same JSON. Families additionally accept the
//! keywords `TOP` and `BOT`.

use std::fs;
use std::path::Path;

use posetal_core::homotopy::Diagram;
use posetal_core::instance::{COrientation, ClauseConfig};
use posetal_core::{Family, Instance, Mode, Mutation, Variant};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Partial clause switches; absent fields take the normative value.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClauseFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_orientation: Option<COrientation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_adjoins_empty: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
}

impl ClauseFile {
    pub fn config(&self) -> ClauseConfig {
        let n = ClauseConfig::NORMATIVE;
        ClauseConfig {
            c_orientation: self.c_orientation.unwrap_or(n.c_orientation),
            w_adjoins_empty: self.w_adjoins_empty.unwrap_or(n.w_adjoins_empty),
            mutation: self.mutation.or(n.mutation),
        }
    }
}

/// The instance document. `variant` and `mode` default to `qt`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub universe: usize,
    pub kappa: usize,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clauses: Option<ClauseFile>,
}

fn default_variant() -> Variant {
    Variant::Qt
}

fn default_mode() -> Mode {
    Mode::Qt
}

impl InstanceFile {
    pub fn to_instance(&self, cap: usize) -> Result<Instance, CliError> {
        let mut inst = Instance::with_cap(self.universe, self.kappa, cap)?.variant(self.variant).mode(self.mode);
        if let Some(c) = &self.clauses {
            inst = inst.clauses(c.config());
        }
        if let Some(b) = &self.base {
            inst = inst.base(b.clone())?;
        }
        if let Some(f) = &self.family {
            inst.validate(f)?;
        }
        Ok(inst)
    }

    /// The document describing `inst`, with an optional family attached.
    pub fn from_instance(inst: &Instance, family: Option<Family>) -> Self {
        let clauses = (inst.clauses != ClauseConfig::NORMATIVE).then_some(ClauseFile {
            c_orientation: Some(inst.clauses.c_orientation),
            w_adjoins_empty: Some(inst.clauses.w_adjoins_empty),
            mutation: inst.clauses.mutation,
        });
        InstanceFile {
            universe: inst.universe(),
            kappa: inst.kappa(),
            variant: inst.variant,
            mode: inst.mode,
            family,
            base: inst.base_family().cloned(),
            clauses,
        }
    }
}

fn is_inline(arg: &str) -> bool {
    matches!(arg.trim_start().chars().next(), Some('[' | '{'))
}

/// The JSON text behind an argument, and a name for it in error messages.
pub fn read_arg(arg: &str) -> Result<(String, String), CliError> {
    if is_inline(arg) {
        return Ok((arg.to_string(), String::from("inline argument")));
    }
    let text = fs::read_to_string(arg).map_err(|source| CliError::Read { path: Path::new(arg).into(), source })?;
    Ok((text, arg.to_string()))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|source| CliError::Json { what: what.to_string(), source })
}

pub fn load_instance(arg: &str, cap: usize) -> Result<(Instance, Option<Family>), CliError> {
    let (text, what) = read_arg(arg)?;
    let file: InstanceFile = parse_json(&text, &what)?;
    let inst = file.to_instance(cap)?;
    Ok((inst, file.family))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FamilyDoc {
    List(Family),
    Wrapped { family: Family },
}

/// A family operand: `TOP`, `BOT`, a JSON list of atom lists, or an object with
/// a `family` field (so instance files double as operands).
pub fn parse_family(arg: &str, inst: &Instance) -> Result<Family, CliError> {
    let f = match arg.trim() {
        "TOP" => inst.top(),
        "BOT" => Family::bottom(),
        _ => {
            let (text, what) = read_arg(arg)?;
            match parse_json::<FamilyDoc>(&text, &what)? {
                FamilyDoc::List(f) | FamilyDoc::Wrapped { family: f } => f,
            }
        }
    };
    inst.validate(&f)?;
    Ok(f)
}

/// Splits `S,T` at the first comma outside brackets.
pub fn split_pair(arg: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, ch) in arg.char_indices() {
        match ch {
            '[' | '{' => depth += 1,
            ']' | '}' => depth -= 1,
            ',' if depth == 0 => return Some((&arg[..i], &arg[i + 1..])),
            _ => {}
        }
    }
    None
}

pub fn parse_pair(arg: &str, inst: &Instance) -> Result<(Family, Family), CliError> {
    let (s, t) = split_pair(arg)
        .ok_or_else(|| crate::error::usage(format!("expected SOURCE,TARGET but got `{arg}`")))?;
    Ok((parse_family(s, inst)?, parse_family(t, inst)?))
}

/// A diagram document `{"vertices": [...], "edges": [[i, j], ...]}`.
pub fn load_diagram(arg: &str, inst: &Instance) -> Result<Diagram, CliError> {
    let (text, what) = read_arg(arg)?;
    let d: Diagram = parse_json(&text, &what)?;
    d.validate(inst)?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_splitting_respects_brackets() {
        assert_eq!(split_pair("TOP,BOT"), Some(("TOP", "BOT")));
        assert_eq!(split_pair("[[0,1],[2]],[[0,1,2]]"), Some(("[[0,1],[2]]", "[[0,1,2]]")));
        assert_eq!(split_pair("[[0,1]]"), None);
    }

    #[test]
    fn instance_defaults_and_round_trip() {
        let (inst, fam) = load_instance(r#"{"universe":3,"kappa":1,"family":[[1],[0]]}"#, 16).unwrap();
        assert_eq!(inst.mode, Mode::Qt);
        assert_eq!(inst.variant, Variant::Qt);
        let fam = fam.unwrap();
        let doc = InstanceFile::from_instance(&inst, Some(fam.clone()));
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(text, r#"{"universe":3,"kappa":1,"variant":"qt","mode":"qt","family":[[0],[1]]}"#);
        let (again, fam2) = load_instance(&text, 16).unwrap();
        assert_eq!(again, inst);
        assert_eq!(fam2, Some(fam));
    }

    #[test]
    fn rejections() {
        let err = load_instance(r#"{"universe":3,"kappa":1,"family":[[3]]}"#, 16).unwrap_err();
        assert_eq!(err.kind(), "atom-out-of-range");
        assert_eq!(load_instance(r#"{"universe":20,"kappa":1}"#, 16).unwrap_err().kind(), "universe-too-large");
        assert_eq!(load_instance(r#"{"universe":3,"kappa":1,"extra":0}"#, 16).unwrap_err().kind(), "malformed-json");
        assert_eq!(load_instance("/nonexistent/instance.json", 16).unwrap_err().kind(), "read");
    }

    #[test]
    fn family_keywords() {
        let inst = Instance::new(2, 1).unwrap();
        assert_eq!(parse_family("TOP", &inst).unwrap(), inst.top());
        assert!(parse_family("BOT", &inst).unwrap().is_empty());
        assert_eq!(parse_family(r#"{"family":[[0]]}"#, &inst).unwrap(), Family::from_lists(&[[0]]).unwrap());
    }
}
