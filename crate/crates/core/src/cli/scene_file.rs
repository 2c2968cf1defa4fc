//! Scene files.
//!
//! ```text
//! # comment
//! ball <radius>
//! ellipse <cx> <cy> <semi_major> <semi_minor> <rotation>
//! ```
//!
//! Exactly one `ball` line; obstacles are numbered from 1 in file order.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Ellipse, Scene, SceneError, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `ball <radius>` line")]
    MissingBall,
    #[error(transparent)]
    Invalid(#[from] SceneError),
}

fn syntax(line: usize, message: impl Into<String>) -> SceneFileError {
    SceneFileError::Syntax {
        line,
        message: message.into(),
    }
}

fn numbers<const N: usize>(line: usize, fields: &[&str]) -> Result<[f64; N], SceneFileError> {
    if fields.len() != N {
        return Err(syntax(line, format!("expected {N} numbers, found {}", fields.len())));
    }
    let mut out = [0.0; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = f
            .parse::<f64>()
            .map_err(|_| syntax(line, format!("not a decimal number: {f:?}")))?;
        if !slot.is_finite() {
            return Err(syntax(line, format!("not a finite number: {f:?}")));
        }
    }
    Ok(out)
}

pub fn parse_scene(text: &str) -> Result<Scene, SceneFileError> {
    let mut ball = None;
    let mut obstacles = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "ball" => {
                if ball.is_some() {
                    return Err(syntax(line, "duplicate `ball` line"));
                }
                let [r] = numbers::<1>(line, &fields[1..])?;
                ball = Some(r);
            }
            "ellipse" => {
                let [cx, cy, major, minor, rot] = numbers::<5>(line, &fields[1..])?;
                let e = Ellipse::new(Vec2::new(cx, cy), major, minor, rot)
                    .map_err(|e| syntax(line, e.to_string()))?;
                obstacles.push(e);
            }
            other => return Err(syntax(line, format!("unknown directive {other:?}"))),
        }
    }
    let a = ball.ok_or(SceneFileError::MissingBall)?;
    Ok(Scene::new(a, obstacles)?)
}

/// Inverse of [`parse_scene`]: numbers use shortest round-trip form.
pub fn serialize_scene(scene: &Scene) -> String {
    let mut out = format!("ball {}\n", scene.ball_radius());
    for e in scene.obstacles() {
        let c = e.center();
        writeln!(
            out,
            "ellipse {} {} {} {} {}",
            c.x,
            c.y,
            e.semi_major(),
            e.semi_minor(),
            e.rotation()
        )
        .expect("writing to a String");
    }
    out
}
