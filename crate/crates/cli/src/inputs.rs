//! Named examples and JSON files for atlases, bi-atlases, points and elements.

use std::path::Path;

use quasifold_core::atlas::{reflection_orbifold, rationals_line, t_alpha, Atlas, GroupoidOptions, StructureGroupoid};
use quasifold_core::groupoid::NebulaPoint;
use quasifold_core::lifting::identity_biatlas;
use quasifold_core::mrw::{duplicated, two_scale, BiAtlas};
use quasifold_core::numbers::{AffineElement, GroupPresentation, QAlpha};
use serde::de::DeserializeOwned;

use crate::config::Config;
use crate::CliError;

pub const ATLAS_NAMES: &[&str] = &["t-alpha", "rationals", "reflection"];
pub const BIATLAS_NAMES: &[&str] = &["two-scale", "duplicated", "identity"];

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), detail: e.to_string() })?;
    crate::parse_json(&text, &path.display().to_string())
}

/// A catalog name or a path to an atlas JSON file.
pub fn atlas(name: &str) -> Result<Atlas, CliError> {
    match name {
        "t-alpha" => Ok(t_alpha()),
        "rationals" => Ok(rationals_line()),
        "reflection" => Ok(reflection_orbifold()),
        path => read_json(Path::new(path)).map_err(|e| unknown(e, path, ATLAS_NAMES)),
    }
}

pub fn groupoid(name: &str, cfg: &Config) -> Result<StructureGroupoid, CliError> {
    let options = GroupoidOptions { witness: cfg.witness()?, ..GroupoidOptions::default() };
    Ok(StructureGroupoid::build_with(atlas(name)?, options)?)
}

/// A catalog name or a path to a bi-atlas JSON file.
pub fn biatlas(name: &str) -> Result<BiAtlas, CliError> {
    match name {
        "two-scale" => Ok(two_scale()),
        "duplicated" => Ok(duplicated()),
        "identity" => Ok(identity_biatlas(&t_alpha())?),
        path => read_json(Path::new(path)).map_err(|e| unknown(e, path, BIATLAS_NAMES)),
    }
}

fn unknown(e: CliError, name: &str, names: &[&str]) -> CliError {
    match e {
        CliError::Io { .. } if !name.ends_with(".json") => {
            CliError::Usage(format!("`{name}` is neither a file nor one of: {}", names.join(", ")))
        }
        other => other,
    }
}

/// `2+α` or, for several coordinates, `1/2,α`.
pub fn coords(text: &str) -> Result<Vec<QAlpha>, CliError> {
    text.split(',').map(|s| s.trim().parse().map_err(|e| CliError::Usage(format!("coordinate `{s}`: {e}")))).collect()
}

pub fn point(chart: &str, text: &str) -> Result<NebulaPoint, CliError> {
    Ok(NebulaPoint::new(chart, coords(text)?))
}

pub fn translation(text: &str) -> Result<AffineElement, CliError> {
    Ok(AffineElement::translation(coords(text)?))
}

pub fn group(name: &str) -> Result<GroupPresentation, CliError> {
    match name {
        "lattice" | "z-alpha" => Ok(GroupPresentation::z_plus_alpha_z()),
        "rationals" => Ok(GroupPresentation::rationals(1)),
        other => Err(CliError::Usage(format!("unknown group `{other}` (expected lattice or rationals)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_points() {
        for n in ATLAS_NAMES {
            atlas(n).unwrap();
        }
        for n in BIATLAS_NAMES {
            biatlas(n).unwrap();
        }
        assert_eq!(coords("1/2, 2-α").unwrap().len(), 2);
        assert!(matches!(coords("x"), Err(CliError::Usage(_))));
        assert!(matches!(atlas("nope"), Err(CliError::Usage(_))));
        assert!(matches!(atlas("missing.json"), Err(CliError::Io { .. })));
    }
}
