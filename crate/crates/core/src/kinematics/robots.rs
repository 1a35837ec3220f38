//! Bundled robot descriptions.

use std::path::Path;

use super::KinematicChain;
use crate::error::{Error, Result};

const PLANAR_2R: &str = include_str!("../../data/robots/planar_2r.json");
const PLANAR_3R: &str = include_str!("../../data/robots/planar_3r.json");
const SPATIAL_7R: &str = include_str!("../../data/robots/spatial_7r.json");

/// Two unit links rotating about z.
pub fn planar_2r() -> KinematicChain {
    KinematicChain::from_json(PLANAR_2R).expect("bundled planar-2r is valid")
}

/// Three links of 0.40, 0.35 and 0.25 m rotating about z (1 m reach).
pub fn planar_3r() -> KinematicChain {
    KinematicChain::from_json(PLANAR_3R).expect("bundled planar-3r is valid")
}

/// Seven-joint arm with Kuka-like link lengths and a parallel-jaw gripper.
pub fn spatial_7r() -> KinematicChain {
    KinematicChain::from_json(SPATIAL_7R).expect("bundled spatial-7r is valid")
}

pub const BUNDLED: [&str; 3] = ["planar-2r", "planar-3r", "spatial-7r"];

/// Resolves a bundled robot name, or reads a robot JSON file.
pub fn load_robot(name_or_path: &str) -> Result<KinematicChain> {
    match name_or_path {
        "planar-2r" => Ok(planar_2r()),
        "planar-3r" => Ok(planar_3r()),
        "spatial-7r" => Ok(spatial_7r()),
        path => {
            let text = std::fs::read_to_string(Path::new(path)).map_err(|e| Error::io(path, e))?;
            KinematicChain::from_json(&text)
        }
    }
}
