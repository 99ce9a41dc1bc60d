//! Hasse diagrams in DOT.

use std::fmt::Write;

use quasimetric::balls::{ball_leq, FormalBall};
use quasimetric::numerics::ExtNonneg;
use quasimetric::FiniteSpace;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridError {
    Step(ExtNonneg),
    Max(ExtNonneg),
    TooMany(usize),
}

impl std::fmt::Display for GridError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GridError::Step(s) => write!(f, "--grid-step must be finite and positive, got {s}"),
            GridError::Max(m) => write!(f, "--grid-max must be finite, got {m}"),
            GridError::TooMany(n) => write!(f, "radius grid has {n} values, at most {MAX_RADII} allowed"),
        }
    }
}

const MAX_RADII: usize = 256;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Covering pairs of a preorder on `0..n` given by `leq`, skipping equivalent pairs.
fn hasse(n: usize, leq: impl Fn(usize, usize) -> bool) -> Vec<(usize, usize)> {
    let lt = |a: usize, b: usize| leq(a, b) && !leq(b, a);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                edges.push((a, b));
            }
        }
    }
    edges
}

fn render(name: &str, nodes: &[String], edges: &[(usize, usize)]) -> String {
    let mut out = format!("digraph {name} {{\n  rankdir=BT;\n");
    for n in nodes {
        let _ = writeln!(out, "  {};", quote(n));
    }
    for &(a, b) in edges {
        let _ = writeln!(out, "  {} -> {};", quote(&nodes[a]), quote(&nodes[b]));
    }
    out.push_str("}\n");
    out
}

/// Specialization order; an edge `x -> y` means `d(x, y) = 0`.
pub fn order_dot(space: &FiniteSpace) -> String {
    let order = space.specialization_order();
    let edges = hasse(space.len(), |x, y| order.leq(x, y));
    render("order", space.labels(), &edges)
}

/// Ball order on radii `0, step, …, max`; nodes are named `point@radius`.
pub fn balls_dot(space: &FiniteSpace, step: &ExtNonneg, max: &ExtNonneg) -> Result<String, GridError> {
    if step.is_zero() || step.is_infinite() {
        return Err(GridError::Step(step.clone()));
    }
    if max.is_infinite() {
        return Err(GridError::Max(max.clone()));
    }
    let mut radii = vec![ExtNonneg::zero()];
    loop {
        let next = radii.last().expect("nonempty").add(step);
        if &next > max {
            break;
        }
        radii.push(next);
        if radii.len() > MAX_RADII {
            return Err(GridError::TooMany(radii.len()));
        }
    }
    let balls: Vec<FormalBall> = space
        .points()
        .flat_map(|x| radii.iter().map(move |r| FormalBall::new(x, r.clone()).expect("finite")))
        .collect();
    let nodes: Vec<String> = balls
        .iter()
        .map(|b| format!("{}@{}", space.label(b.point), b.radius))
        .collect();
    let edges = hasse(balls.len(), |a, b| ball_leq(space, &balls[a], &balls[b]));
    Ok(render("balls", &nodes, &edges))
}
