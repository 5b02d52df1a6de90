//! The 34-node fiducial grid and the geometry control vector derived from it.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gabor::Point;

/// Number of nodes in a face grid.
pub const NODE_COUNT: usize = 34;

/// Default processing resolution.
pub const STANDARD_SIZE: (usize, usize) = (256, 256);

/// Version tag of [`GridTemplate::standard`].
pub const TEMPLATE_VERSION: &str = "face34-v1";

const STANDARD_NAMES: [&str; NODE_COUNT] = [
    "brow_r_outer",
    "brow_r_mid",
    "brow_r_inner",
    "brow_l_inner",
    "brow_l_mid",
    "brow_l_outer",
    "glabella",
    "eye_r_outer",
    "eye_r_upper",
    "eye_r_inner",
    "eye_r_lower",
    "eye_l_inner",
    "eye_l_upper",
    "eye_l_outer",
    "eye_l_lower",
    "nose_bridge",
    "nose_r_wing",
    "nose_tip",
    "nose_l_wing",
    "cheek_r",
    "cheek_l",
    "nasolabial_r",
    "nasolabial_l",
    "mouth_r_corner",
    "lip_upper_r",
    "lip_upper_mid",
    "lip_upper_l",
    "mouth_l_corner",
    "lip_lower_l",
    "lip_lower_mid",
    "lip_lower_r",
    "chin_r",
    "chin_mid",
    "chin_l",
];

/// Node names in their fixed order plus the name of the nose-tip node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTemplate {
    pub version: String,
    pub names: Vec<String>,
    pub nose_tip: String,
}

impl GridTemplate {
    pub fn new(
        version: impl Into<String>,
        names: Vec<String>,
        nose_tip: impl Into<String>,
    ) -> Result<Self> {
        let nose_tip = nose_tip.into();
        check_names(names.iter().map(String::as_str), &nose_tip)?;
        Ok(Self {
            version: version.into(),
            names,
            nose_tip,
        })
    }

    /// The built-in 34-node template.
    pub fn standard() -> Self {
        Self {
            version: TEMPLATE_VERSION.to_string(),
            names: STANDARD_NAMES.iter().map(|s| s.to_string()).collect(),
            nose_tip: "nose_tip".to_string(),
        }
    }

    /// Checks that a placement uses exactly this template's node order and
    /// nose tip.
    pub fn check(&self, placement: &GridPlacement) -> Result<()> {
        if placement.nose_tip != self.nose_tip {
            return Err(grid_err(
                "nose_tip",
                format!(
                    "expected `{}`, found `{}`",
                    self.nose_tip, placement.nose_tip
                ),
            ));
        }
        for (i, (node, name)) in placement.nodes.iter().zip(&self.names).enumerate() {
            if &node.name != name {
                return Err(grid_err(
                    format!("nodes[{i}].name"),
                    format!("expected `{name}`, found `{}`", node.name),
                ));
            }
        }
        Ok(())
    }
}

fn grid_err(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Grid {
        field: field.into(),
        reason: reason.into(),
    }
}

fn check_names<'a>(names: impl ExactSizeIterator<Item = &'a str>, nose_tip: &str) -> Result<()> {
    let names: Vec<&str> = names.collect();
    if names.len() != NODE_COUNT {
        return Err(grid_err(
            "nodes",
            format!("expected {NODE_COUNT} nodes, found {}", names.len()),
        ));
    }
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(grid_err(
                format!("nodes[{i}].name"),
                format!("duplicate node name `{name}`"),
            ));
        }
    }
    if !names.contains(&nose_tip) {
        return Err(grid_err(
            "nose_tip",
            format!("`{nose_tip}` does not name a node"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridNode {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

impl GridNode {
    pub fn new(name: impl Into<String>, x: f64, y: f64) -> Self {
        Self {
            name: name.into(),
            x,
            y,
        }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// One manually placed grid on one image.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPlacement {
    image_id: String,
    nodes: Vec<GridNode>,
    nose_tip: String,
    source_size: (usize, usize),
}

impl GridPlacement {
    pub fn new(
        image_id: impl Into<String>,
        nodes: Vec<GridNode>,
        nose_tip: impl Into<String>,
        source_size: (usize, usize),
    ) -> Result<Self> {
        let nose_tip = nose_tip.into();
        let (w, h) = source_size;
        if w == 0 || h == 0 {
            return Err(grid_err(
                "source_size",
                "width and height must be at least 1",
            ));
        }
        check_names(nodes.iter().map(|n| n.name.as_str()), &nose_tip)?;
        for (i, n) in nodes.iter().enumerate() {
            if !(n.x.is_finite() && n.x >= 0.0 && n.x < w as f64) {
                return Err(grid_err(
                    format!("nodes[{i}].x"),
                    format!("{} is outside [0, {w})", n.x),
                ));
            }
            if !(n.y.is_finite() && n.y >= 0.0 && n.y < h as f64) {
                return Err(grid_err(
                    format!("nodes[{i}].y"),
                    format!("{} is outside [0, {h})", n.y),
                ));
            }
        }
        Ok(Self {
            image_id: image_id.into(),
            nodes,
            nose_tip,
            source_size,
        })
    }

    pub fn image_id(&self) -> &str {
        &self.image_id
    }

    pub fn nodes(&self) -> &[GridNode] {
        &self.nodes
    }

    pub fn nose_tip(&self) -> &str {
        &self.nose_tip
    }

    pub fn source_size(&self) -> (usize, usize) {
        self.source_size
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.nodes.iter().map(GridNode::point)
    }

    fn nose_index(&self) -> usize {
        self.nodes
            .iter()
            .position(|n| n.name == self.nose_tip)
            .expect("validated at construction")
    }

    /// Maps the placement onto an image of size `target`, scaling each axis
    /// independently.
    pub fn rescale(&self, target: (usize, usize)) -> Result<Self> {
        if target.0 == 0 || target.1 == 0 {
            return Err(grid_err("target", "width and height must be at least 1"));
        }
        if target == self.source_size {
            return Ok(self.clone());
        }
        let sx = target.0 as f64 / self.source_size.0 as f64;
        let sy = target.1 as f64 / self.source_size.1 as f64;
        let nodes = self
            .nodes
            .iter()
            .map(|n| GridNode::new(n.name.clone(), n.x * sx, n.y * sy))
            .collect();
        Ok(Self {
            image_id: self.image_id.clone(),
            nodes,
            nose_tip: self.nose_tip.clone(),
            source_size: target,
        })
    }

    /// Distances from every non-nose node to the nose tip, in node order.
    pub fn geometry_vector(&self) -> ShapeVector {
        let nose = self.nose_index();
        let (nx, ny) = (self.nodes[nose].x, self.nodes[nose].y);
        let distances = self
            .nodes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != nose)
            .map(|(_, n)| libm::hypot(n.x - nx, n.y - ny))
            .collect();
        ShapeVector { distances }
    }
}

/// Nose-relative node distances (33 entries for a 34-node grid).
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeVector {
    distances: Vec<f64>,
}

impl ShapeVector {
    pub fn new(distances: Vec<f64>) -> Result<Self> {
        if distances.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(crate::error::invalid(
                "distances",
                "entries must be finite and non-negative",
            ));
        }
        Ok(Self { distances })
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}
