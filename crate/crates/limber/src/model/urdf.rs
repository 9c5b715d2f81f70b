//! Strict URDF-subset ingestion and emission.
//!
//! Supported elements: `robot`, `link` (`inertial` with `origin`/`mass`/
//! `inertia`, `visual` with a primitive `geometry`), `joint` of type
//! `revolute` or `fixed` (`origin`, `parent`, `child`, `axis`, `limit`).
//! Anything else is rejected loudly rather than ignored.

use std::fmt::Write as _;

use super::template::reorder_topologically;
use super::{FloatingBaseModel, Joint, JointKind, Link, ModelError, Shape};
use crate::spatial::{Mat3, Pose, Rotation, SpatialInertia, Vec3};

// ---------------------------------------------------------------------------
// Minimal XML element reader (no text nodes, no namespaces).
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Element>,
    line: usize,
}

impl Element {
    fn attr(&self, key: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn require(&self, key: &str) -> Result<&str, ModelError> {
        self.attr(key).ok_or_else(|| ModelError::Parse {
            line: self.line,
            message: format!("<{}> is missing attribute '{}'", self.name, key),
        })
    }

    fn child(&self, name: &str) -> Option<&Element> {
        self.children.iter().find(|c| c.name == name)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            bytes: text.as_bytes(),
            pos: 0,
            line: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> ModelError {
        ModelError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.bytes.get(self.pos).copied();
        if let Some(b) = b {
            self.pos += 1;
            if b == b'\n' {
                self.line += 1;
            }
        }
        b
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_whitespace(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\r' | b'\n')) {
            self.bump();
        }
    }

    fn eat(&mut self, expected: u8) -> Result<(), ModelError> {
        match self.bump() {
            Some(b) if b == expected => Ok(()),
            other => Err(self.error(format!(
                "expected '{}', found {:?}",
                expected as char,
                other.map(|b| b as char)
            ))),
        }
    }

    fn read_name(&mut self) -> Result<String, ModelError> {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.' | b':') {
                self.bump();
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.error("expected a name"));
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn read_attr_value(&mut self) -> Result<String, ModelError> {
        let quote = match self.bump() {
            Some(q @ (b'"' | b'\'')) => q,
            _ => return Err(self.error("expected a quoted attribute value")),
        };
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated attribute value")),
                Some(q) if q == quote => break,
                Some(b'&') => {
                    let mut entity = String::new();
                    loop {
                        match self.bump() {
                            Some(b';') => break,
                            Some(b) => entity.push(b as char),
                            None => return Err(self.error("unterminated entity")),
                        }
                    }
                    out.push(match entity.as_str() {
                        "amp" => '&',
                        "lt" => '<',
                        "gt" => '>',
                        "quot" => '"',
                        "apos" => '\'',
                        other => return Err(self.error(format!("unknown entity '&{other};'"))),
                    });
                }
                Some(b) => out.push(b as char),
            }
        }
        Ok(out)
    }

    /// Skips `<?...?>` declarations and `<!--...-->` comments.
    fn skip_misc(&mut self) -> Result<(), ModelError> {
        loop {
            self.skip_whitespace();
            if self.bytes[self.pos..].starts_with(b"<?") {
                while !self.bytes[self.pos..].starts_with(b"?>") {
                    if self.bump().is_none() {
                        return Err(self.error("unterminated xml declaration"));
                    }
                }
                self.pos += 2;
            } else if self.bytes[self.pos..].starts_with(b"<!--") {
                while !self.bytes[self.pos..].starts_with(b"-->") {
                    if self.bump().is_none() {
                        return Err(self.error("unterminated comment"));
                    }
                }
                self.pos += 3;
            } else {
                return Ok(());
            }
        }
    }

    fn read_element(&mut self) -> Result<Element, ModelError> {
        self.skip_misc()?;
        let line = self.line;
        self.eat(b'<')?;
        let name = self.read_name()?;
        let mut attrs = Vec::new();
        loop {
            self.skip_whitespace();
            match self.peek() {
                Some(b'/') => {
                    self.bump();
                    self.eat(b'>')?;
                    return Ok(Element {
                        name,
                        attrs,
                        children: Vec::new(),
                        line,
                    });
                }
                Some(b'>') => {
                    self.bump();
                    break;
                }
                Some(_) => {
                    let key = self.read_name()?;
                    self.skip_whitespace();
                    self.eat(b'=')?;
                    self.skip_whitespace();
                    let value = self.read_attr_value()?;
                    attrs.push((key, value));
                }
                None => return Err(self.error("unexpected end of input in tag")),
            }
        }
        let mut children = Vec::new();
        loop {
            self.skip_misc()?;
            if self.bytes[self.pos..].starts_with(b"</") {
                self.pos += 2;
                let closing = self.read_name()?;
                if closing != name {
                    return Err(self.error(format!(
                        "mismatched closing tag </{closing}> for <{name}>"
                    )));
                }
                self.skip_whitespace();
                self.eat(b'>')?;
                return Ok(Element {
                    name,
                    attrs,
                    children,
                    line,
                });
            }
            match self.peek() {
                Some(b'<') => children.push(self.read_element()?),
                Some(_) => return Err(self.error("text content is not part of the model format")),
                None => return Err(self.error(format!("unterminated element <{name}>"))),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// URDF subset -> FloatingBaseModel
// ---------------------------------------------------------------------------

fn parse_f64(el: &Element, key: &str) -> Result<f64, ModelError> {
    el.require(key)?.parse().map_err(|_| ModelError::Parse {
        line: el.line,
        message: format!("attribute '{key}' of <{}> is not a number", el.name),
    })
}

fn parse_vec3(el: &Element, key: &str) -> Result<Vec3, ModelError> {
    let raw = el.require(key)?;
    let parts: Vec<f64> = raw
        .split_whitespace()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| ModelError::Parse {
            line: el.line,
            message: format!("attribute '{key}' of <{}> is not a 3-vector", el.name),
        })?;
    if parts.len() != 3 {
        return Err(ModelError::Parse {
            line: el.line,
            message: format!("attribute '{key}' of <{}> must have 3 entries", el.name),
        });
    }
    Ok(Vec3::new(parts[0], parts[1], parts[2]))
}

fn reject_unknown_children(el: &Element, allowed: &[&str]) -> Result<(), ModelError> {
    for child in &el.children {
        if !allowed.contains(&child.name.as_str()) {
            return Err(ModelError::Parse {
                line: child.line,
                message: format!("unsupported element <{}> inside <{}>", child.name, el.name),
            });
        }
    }
    Ok(())
}

fn parse_origin(el: Option<&Element>) -> Result<Pose, ModelError> {
    let Some(el) = el else {
        return Ok(Pose::identity());
    };
    let xyz = if el.attr("xyz").is_some() {
        parse_vec3(el, "xyz")?
    } else {
        Vec3::zeros()
    };
    let rotation = if el.attr("rpy").is_some() {
        let rpy = parse_vec3(el, "rpy")?;
        Rotation::about_z(rpy.z) * Rotation::about_y(rpy.y) * Rotation::about_x(rpy.x)
    } else {
        Rotation::identity()
    };
    Ok(Pose::new(rotation, xyz))
}

fn parse_geometry(el: &Element) -> Result<Shape, ModelError> {
    if el.children.len() != 1 {
        return Err(ModelError::Parse {
            line: el.line,
            message: "<geometry> must contain exactly one primitive".into(),
        });
    }
    let prim = &el.children[0];
    match prim.name.as_str() {
        "box" => {
            let size = parse_vec3(prim, "size")?;
            Ok(Shape::Box {
                width: size.x,
                height: size.y,
                depth: size.z,
            })
        }
        "cylinder" => Ok(Shape::Cylinder {
            radius: parse_f64(prim, "radius")?,
            height: parse_f64(prim, "length")?,
        }),
        "sphere" => Ok(Shape::Sphere {
            radius: parse_f64(prim, "radius")?,
        }),
        other => Err(ModelError::Parse {
            line: prim.line,
            message: format!("unsupported geometry <{other}>"),
        }),
    }
}

fn parse_link(el: &Element) -> Result<Link, ModelError> {
    reject_unknown_children(el, &["inertial", "visual"])?;
    let name = el.require("name")?.to_string();
    let inertia = match el.child("inertial") {
        None => SpatialInertia::zero(),
        Some(inertial) => {
            reject_unknown_children(inertial, &["origin", "mass", "inertia"])?;
            let com = match inertial.child("origin") {
                None => Vec3::zeros(),
                Some(origin) => {
                    if let Some(rpy) = origin.attr("rpy") {
                        let v: Vec<f64> = rpy
                            .split_whitespace()
                            .filter_map(|p| p.parse().ok())
                            .collect();
                        if v.iter().any(|x| *x != 0.0) {
                            return Err(ModelError::Parse {
                                line: origin.line,
                                message: "rotated inertial frames are unsupported".into(),
                            });
                        }
                    }
                    parse_vec3(origin, "xyz")?
                }
            };
            let mass_el = inertial.child("mass").ok_or_else(|| ModelError::Parse {
                line: inertial.line,
                message: "<inertial> is missing <mass>".into(),
            })?;
            let mass = parse_f64(mass_el, "value")?;
            let rot = match inertial.child("inertia") {
                None => Mat3::zeros(),
                Some(i) => {
                    let (ixx, iyy, izz) = (
                        parse_f64(i, "ixx")?,
                        parse_f64(i, "iyy")?,
                        parse_f64(i, "izz")?,
                    );
                    let ixy = if i.attr("ixy").is_some() { parse_f64(i, "ixy")? } else { 0.0 };
                    let ixz = if i.attr("ixz").is_some() { parse_f64(i, "ixz")? } else { 0.0 };
                    let iyz = if i.attr("iyz").is_some() { parse_f64(i, "iyz")? } else { 0.0 };
                    Mat3::new(ixx, ixy, ixz, ixy, iyy, iyz, ixz, iyz, izz)
                }
            };
            SpatialInertia::new(mass, com, rot)
        }
    };
    let shape = match el.child("visual") {
        None => None,
        Some(visual) => {
            reject_unknown_children(visual, &["geometry"])?;
            let geometry = visual.child("geometry").ok_or_else(|| ModelError::Parse {
                line: visual.line,
                message: "<visual> is missing <geometry>".into(),
            })?;
            Some(parse_geometry(geometry)?)
        }
    };
    Ok(Link {
        name,
        shape,
        inertia,
    })
}

/// Parses a model file; rejects loops, duplicate names and non-tree edges.
pub fn parse_model(text: &str) -> Result<FloatingBaseModel, ModelError> {
    let mut reader = Reader::new(text);
    let root = reader.read_element()?;
    if root.name != "robot" {
        return Err(ModelError::Parse {
            line: root.line,
            message: format!("expected <robot>, found <{}>", root.name),
        });
    }
    reject_unknown_children(&root, &["link", "joint"])?;
    let name = root.require("name")?.to_string();

    let mut links = Vec::new();
    for el in root.children.iter().filter(|c| c.name == "link") {
        links.push(parse_link(el)?);
    }
    let link_index = |needle: &str, line: usize| -> Result<usize, ModelError> {
        links
            .iter()
            .position(|l| l.name == needle)
            .ok_or_else(|| ModelError::Parse {
                line,
                message: format!("joint references unknown link '{needle}'"),
            })
    };

    let mut joints = Vec::new();
    for el in root.children.iter().filter(|c| c.name == "joint") {
        reject_unknown_children(el, &["origin", "parent", "child", "axis", "limit"])?;
        let jname = el.require("name")?.to_string();
        let jtype = el.require("type")?;
        let parent_el = el.child("parent").ok_or_else(|| ModelError::Parse {
            line: el.line,
            message: format!("joint '{jname}' is missing <parent>"),
        })?;
        let child_el = el.child("child").ok_or_else(|| ModelError::Parse {
            line: el.line,
            message: format!("joint '{jname}' is missing <child>"),
        })?;
        let parent = link_index(parent_el.require("link")?, parent_el.line)?;
        let child = link_index(child_el.require("link")?, child_el.line)?;
        let origin = parse_origin(el.child("origin"))?;
        let kind = match jtype {
            "revolute" => {
                let axis_el = el.child("axis").ok_or_else(|| ModelError::Parse {
                    line: el.line,
                    message: format!("revolute joint '{jname}' is missing <axis>"),
                })?;
                JointKind::Revolute {
                    axis: parse_vec3(axis_el, "xyz")?,
                }
            }
            "fixed" => JointKind::Fixed,
            other => {
                return Err(ModelError::Parse {
                    line: el.line,
                    message: format!("unsupported joint type '{other}'"),
                })
            }
        };
        let limits = match el.child("limit") {
            None => None,
            Some(l) => Some((parse_f64(l, "lower")?, parse_f64(l, "upper")?)),
        };
        joints.push(Joint {
            name: jname,
            parent,
            child,
            origin,
            kind,
            limits,
        });
    }
    reorder_topologically(name, links, joints)
}

// ---------------------------------------------------------------------------
// FloatingBaseModel -> URDF subset
// ---------------------------------------------------------------------------

/// Shortest exact decimal representation; `parse` recovers the same f64.
fn fmt(value: f64) -> String {
    format!("{value}")
}

/// Serializes a model in the same subset accepted by [`parse_model`].
///
/// Emission is canonical, so `serialize(parse(serialize(m)))` is
/// byte-identical to `serialize(m)`.
pub fn serialize_model(model: &FloatingBaseModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\"?>");
    let _ = writeln!(out, "<robot name=\"{}\">", model.name());
    for link in model.links() {
        let _ = writeln!(out, "  <link name=\"{}\">", link.name);
        let _ = writeln!(out, "    <inertial>");
        let com = link.inertia.com();
        let _ = writeln!(
            out,
            "      <origin xyz=\"{} {} {}\"/>",
            fmt(com.x),
            fmt(com.y),
            fmt(com.z)
        );
        let _ = writeln!(out, "      <mass value=\"{}\"/>", fmt(link.inertia.mass()));
        let i = link.inertia.inertia_at_com();
        let _ = writeln!(
            out,
            "      <inertia ixx=\"{}\" ixy=\"{}\" ixz=\"{}\" iyy=\"{}\" iyz=\"{}\" izz=\"{}\"/>",
            fmt(i[(0, 0)]),
            fmt(i[(0, 1)]),
            fmt(i[(0, 2)]),
            fmt(i[(1, 1)]),
            fmt(i[(1, 2)]),
            fmt(i[(2, 2)])
        );
        let _ = writeln!(out, "    </inertial>");
        if let Some(shape) = &link.shape {
            let _ = writeln!(out, "    <visual>");
            let _ = writeln!(out, "      <geometry>");
            match *shape {
                Shape::Box {
                    width,
                    height,
                    depth,
                } => {
                    let _ = writeln!(
                        out,
                        "        <box size=\"{} {} {}\"/>",
                        fmt(width),
                        fmt(height),
                        fmt(depth)
                    );
                }
                Shape::Cylinder { radius, height } => {
                    let _ = writeln!(
                        out,
                        "        <cylinder radius=\"{}\" length=\"{}\"/>",
                        fmt(radius),
                        fmt(height)
                    );
                }
                Shape::Sphere { radius } => {
                    let _ = writeln!(out, "        <sphere radius=\"{}\"/>", fmt(radius));
                }
            }
            let _ = writeln!(out, "      </geometry>");
            let _ = writeln!(out, "    </visual>");
        }
        let _ = writeln!(out, "  </link>");
    }
    for joint in model.joints() {
        let jtype = match joint.kind {
            JointKind::Revolute { .. } => "revolute",
            JointKind::Fixed => "fixed",
        };
        let _ = writeln!(out, "  <joint name=\"{}\" type=\"{}\">", joint.name, jtype);
        let p = joint.origin.position;
        // The subset stores rotations via rpy; recover fixed-axis angles.
        let rpy = rotation_to_rpy(&joint.origin.rotation);
        let _ = writeln!(
            out,
            "    <origin xyz=\"{} {} {}\" rpy=\"{} {} {}\"/>",
            fmt(p.x),
            fmt(p.y),
            fmt(p.z),
            fmt(rpy.x),
            fmt(rpy.y),
            fmt(rpy.z)
        );
        let _ = writeln!(
            out,
            "    <parent link=\"{}\"/>",
            model.link(joint.parent).name
        );
        let _ = writeln!(out, "    <child link=\"{}\"/>", model.link(joint.child).name);
        if let JointKind::Revolute { axis } = &joint.kind {
            let _ = writeln!(
                out,
                "    <axis xyz=\"{} {} {}\"/>",
                fmt(axis.x),
                fmt(axis.y),
                fmt(axis.z)
            );
        }
        if let Some((lower, upper)) = joint.limits {
            let _ = writeln!(
                out,
                "    <limit lower=\"{}\" upper=\"{}\"/>",
                fmt(lower),
                fmt(upper)
            );
        }
        let _ = writeln!(out, "  </joint>");
    }
    let _ = writeln!(out, "</robot>");
    out
}

fn rotation_to_rpy(r: &Rotation) -> Vec3 {
    let m = r.matrix();
    let pitch = (-m[(2, 0)]).asin();
    if pitch.cos().abs() < 1e-9 {
        // Gimbal lock: fold everything into roll.
        let roll = m[(0, 1)].atan2(m[(1, 1)]) * if pitch > 0.0 { 1.0 } else { -1.0 };
        return Vec3::new(roll, pitch, 0.0);
    }
    Vec3::new(
        m[(2, 1)].atan2(m[(2, 2)]),
        pitch,
        m[(1, 0)].atan2(m[(0, 0)]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_human_template, TemplateDims};

    const TWO_LINK: &str = r#"<?xml version="1.0"?>
<robot name="pendulum">
  <link name="base">
    <inertial>
      <origin xyz="0 0 0"/>
      <mass value="1"/>
      <inertia ixx="0.01" iyy="0.01" izz="0.01"/>
    </inertial>
  </link>
  <link name="arm">
    <inertial>
      <origin xyz="0 0 -0.5"/>
      <mass value="2"/>
      <inertia ixx="0.02" iyy="0.02" izz="0.002"/>
    </inertial>
  </link>
  <joint name="shoulder" type="revolute">
    <origin xyz="0 0 0" rpy="0 0 0"/>
    <parent link="base"/>
    <child link="arm"/>
    <axis xyz="0 1 0"/>
    <limit lower="-3.14" upper="3.14"/>
  </joint>
</robot>
"#;

    #[test]
    fn parses_two_link_single_revolute() {
        let model = parse_model(TWO_LINK).unwrap();
        assert_eq!(model.dof(), 1);
        assert_eq!(model.num_links(), 2);
        assert_eq!(model.link(1).inertia.mass(), 2.0);
    }

    #[test]
    fn rejects_self_referential_joint() {
        let bad = TWO_LINK.replace("<child link=\"arm\"/>", "<child link=\"base\"/>");
        assert!(matches!(
            parse_model(&bad),
            Err(ModelError::Topology(_))
        ));
    }

    #[test]
    fn rejects_unsupported_elements() {
        let bad = TWO_LINK.replace(
            "<axis xyz=\"0 1 0\"/>",
            "<axis xyz=\"0 1 0\"/><dynamics damping=\"0.1\"/>",
        );
        let err = parse_model(&bad).unwrap_err();
        assert!(matches!(err, ModelError::Parse { .. }), "{err}");
    }

    #[test]
    fn human_template_round_trips_identically() {
        let (model, _) = build_human_template(65.0, &TemplateDims::default(), false).unwrap();
        let text = serialize_model(&model);
        let reparsed = parse_model(&text).unwrap();
        assert_eq!(serialize_model(&reparsed), text);
        assert_eq!(reparsed.dof(), model.dof());
        assert_eq!(reparsed.num_links(), model.num_links());
    }
}
