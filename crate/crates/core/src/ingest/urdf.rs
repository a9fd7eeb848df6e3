//! `<inertial>` blocks of URDF robot descriptions.
//!
//! Only `robot/link/inertial/{origin,mass,inertia}` is read. URDF places the
//! inertia tensor at the center of mass, given by `origin xyz`; the
//! [`UrdfMode::OriginHypothesis`] mode instead asks whether the data would be
//! consistent if the tensor had been written about the link origin, which is
//! a common authoring mistake.

use nalgebra::{Matrix3, Rotation3, Vector3};

use crate::error::{Error, Result};
use crate::rigid_body::{InertiaFrame, RigidBodyParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UrdfMode {
    /// Tensor about the center of mass; only tensor validity is checked.
    ComSemantics,
    /// Tensor about the link origin, center of mass at `origin xyz`.
    OriginHypothesis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UrdfLink {
    pub name: String,
    /// Per-link problems do not stop the other links from being read.
    pub params: Result<RigidBodyParams>,
}

/// Reads every link with an `<inertial>` element; links without one are
/// skipped. The `origin rpy` rotation is applied to the tensor.
pub fn parse_urdf(bytes: &[u8], mode: UrdfMode) -> Result<Vec<UrdfLink>> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::input("document", format!("not valid UTF-8: {e}")))?;
    let doc = roxmltree::Document::parse(text).map_err(|e| {
        let pos = e.pos();
        Error::input(
            format!("line {}, column {}", pos.row, pos.col),
            e.to_string(),
        )
    })?;
    let robot = doc.root_element();
    if robot.tag_name().name() != "robot" {
        return Err(Error::input(
            "document",
            format!(
                "root element is <{}>, expected <robot>",
                robot.tag_name().name()
            ),
        ));
    }

    Ok(robot
        .children()
        .filter(|n| n.has_tag_name("link"))
        .enumerate()
        .filter_map(|(i, link)| {
            let inertial = child(link, "inertial")?;
            let name = link
                .attribute("name")
                .map(str::to_string)
                .unwrap_or_else(|| format!("link-{}", i + 1));
            let params = read_inertial(inertial, &name, mode);
            Some(UrdfLink { name, params })
        })
        .collect())
}

fn child<'a, 'input>(
    node: roxmltree::Node<'a, 'input>,
    tag: &str,
) -> Option<roxmltree::Node<'a, 'input>> {
    node.children().find(|n| n.has_tag_name(tag))
}

fn read_inertial(inertial: roxmltree::Node, link: &str, mode: UrdfMode) -> Result<RigidBodyParams> {
    let loc = |what: &str| format!("link '{link}' {what}");

    let (xyz, rpy) = match child(inertial, "origin") {
        Some(origin) => (
            vector_attr(origin, "xyz", &loc("<origin xyz>"))?,
            vector_attr(origin, "rpy", &loc("<origin rpy>"))?,
        ),
        None => (Vector3::zeros(), Vector3::zeros()),
    };

    let mass_node =
        child(inertial, "mass").ok_or_else(|| Error::input(loc("<inertial>"), "missing <mass>"))?;
    let mass = scalar_attr(mass_node, "value", &loc("<mass value>"))?
        .ok_or_else(|| Error::input(loc("<mass>"), "missing value attribute"))?;

    let inertia_node = child(inertial, "inertia")
        .ok_or_else(|| Error::input(loc("<inertial>"), "missing <inertia>"))?;
    let mut parts = [0.0; 6];
    for (slot, name) in parts
        .iter_mut()
        .zip(["ixx", "ixy", "ixz", "iyy", "iyz", "izz"])
    {
        *slot = scalar_attr(inertia_node, name, &loc(&format!("<inertia {name}>")))?
            .ok_or_else(|| Error::input(loc("<inertia>"), format!("missing {name} attribute")))?;
    }
    let [ixx, ixy, ixz, iyy, iyz, izz] = parts;
    let tensor = Matrix3::new(ixx, ixy, ixz, ixy, iyy, iyz, ixz, iyz, izz);
    let rotation = Rotation3::from_euler_angles(rpy[0], rpy[1], rpy[2]);
    let r = rotation.matrix();
    let rotated = r * tensor * r.transpose();

    let frame = match mode {
        UrdfMode::ComSemantics => InertiaFrame::AboutCenterOfMass,
        UrdfMode::OriginHypothesis => InertiaFrame::AboutReferencePoint,
    };
    RigidBodyParams::new(mass, rotated, xyz, frame)
        .map_err(|e| Error::input(loc("<inertial>"), e.to_string()))
}

fn scalar_attr(node: roxmltree::Node, name: &str, location: &str) -> Result<Option<f64>> {
    node.attribute(name)
        .map(|raw| {
            raw.trim()
                .parse::<f64>()
                .map_err(|_| Error::input(location, format!("'{raw}' is not a number")))
        })
        .transpose()
}

fn vector_attr(node: roxmltree::Node, name: &str, location: &str) -> Result<Vector3<f64>> {
    let Some(raw) = node.attribute(name) else {
        return Ok(Vector3::zeros());
    };
    let values: Vec<f64> = raw
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::input(location, format!("'{tok}' is not a number")))
        })
        .collect::<Result<_>>()?;
    if values.len() != 3 {
        return Err(Error::input(
            location,
            format!("expected 3 numbers, got {}", values.len()),
        ));
    }
    Ok(Vector3::new(values[0], values[1], values[2]))
}
