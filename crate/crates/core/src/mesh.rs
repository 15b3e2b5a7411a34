//! One-dimensional meshes, affine element maps and broken polynomial fields.

use crate::error::{Error, Result};
use crate::fracfun::SingularSolution;
use crate::legendre::{coeffs_from_samples, CoeffVector};
use crate::projection::ProjectionKind;
use crate::quadrature::{panel_points, QuadratureRule, PHYSICAL_LEVELS};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    degrees: Vec<usize>,
}

impl Mesh1D {
    pub fn new(nodes: Vec<f64>, degrees: Vec<usize>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMesh("need at least one element".into()));
        }
        if degrees.len() != nodes.len() - 1 {
            return Err(Error::InvalidMesh(format!(
                "{} degrees for {} elements",
                degrees.len(),
                nodes.len() - 1
            )));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidMesh(
                "nodes must be finite and strictly increasing".into(),
            ));
        }
        if degrees.contains(&0) {
            return Err(Error::InvalidMesh(
                "all element degrees must be at least 1".into(),
            ));
        }
        Ok(Self { nodes, degrees })
    }

    /// `elements` equal elements of degree `p` on `(a, b)`.
    pub fn uniform(a: f64, b: f64, elements: usize, p: usize) -> Result<Self> {
        if elements == 0 {
            return Err(Error::InvalidMesh("need at least one element".into()));
        }
        let h = (b - a) / elements as f64;
        let mut nodes: Vec<f64> = (0..=elements).map(|j| a + h * j as f64).collect();
        nodes[elements] = b;
        Self::new(nodes, vec![p; elements])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn n_elements(&self) -> usize {
        self.degrees.len()
    }

    pub fn a(&self) -> f64 {
        self.nodes[0]
    }

    pub fn b(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Endpoints `(x_{j-1}, x_j)` of element `j` (0-based).
    pub fn element(&self, j: usize) -> (f64, f64) {
        (self.nodes[j], self.nodes[j + 1])
    }

    pub fn width(&self, j: usize) -> f64 {
        self.nodes[j + 1] - self.nodes[j]
    }

    pub fn degree(&self, j: usize) -> usize {
        self.degrees[j]
    }

    pub fn h_max(&self) -> f64 {
        (0..self.n_elements())
            .map(|j| self.width(j))
            .fold(0.0, f64::max)
    }

    pub fn h_min(&self) -> f64 {
        (0..self.n_elements())
            .map(|j| self.width(j))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn p_min(&self) -> usize {
        *self.degrees.iter().min().unwrap()
    }

    pub fn p_max(&self) -> usize {
        *self.degrees.iter().max().unwrap()
    }

    pub fn map(&self, j: usize) -> ElementMap {
        ElementMap {
            index: j,
            left: self.nodes[j],
            width: self.width(j),
        }
    }

    /// Index of the node equal to `x`, if any.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        self.nodes.iter().position(|&n| n == x)
    }
}

/// Affine map between `I_j` and the reference interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMap {
    pub index: usize,
    pub left: f64,
    pub width: f64,
}

impl ElementMap {
    pub fn forward(&self, xi: f64) -> f64 {
        self.left + 0.5 * self.width * (1.0 + xi)
    }

    pub fn inverse(&self, x: f64) -> f64 {
        2.0 * (x - self.left) / self.width - 1.0
    }

    /// `dx / dxi`.
    pub fn jacobian(&self) -> f64 {
        0.5 * self.width
    }
}

/// Which limit to take at a mesh node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    /// Only valid away from nodes.
    Interior,
}

/// Per-element modal Legendre coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BrokenField {
    elements: Vec<CoeffVector>,
}

impl BrokenField {
    pub fn zeros(mesh: &Mesh1D) -> Self {
        Self {
            elements: mesh
                .degrees()
                .iter()
                .map(|&p| CoeffVector::zeros(p))
                .collect(),
        }
    }

    pub fn from_elements(mesh: &Mesh1D, elements: Vec<CoeffVector>) -> Result<Self> {
        if elements.len() != mesh.n_elements()
            || elements
                .iter()
                .zip(mesh.degrees())
                .any(|(c, &p)| c.len() != p + 1)
        {
            return Err(Error::InvalidMesh(
                "field layout does not match the mesh".into(),
            ));
        }
        Ok(Self { elements })
    }

    pub fn element(&self, j: usize) -> &CoeffVector {
        &self.elements[j]
    }

    pub fn element_mut(&mut self, j: usize) -> &mut CoeffVector {
        &mut self.elements[j]
    }

    pub fn elements(&self) -> &[CoeffVector] {
        &self.elements
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Iterator over all coefficients, element by element.
    pub fn coeffs(&self) -> impl Iterator<Item = &f64> {
        self.elements.iter().flat_map(|c| c.iter())
    }

    pub fn coeffs_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.elements.iter_mut().flat_map(|c| c.iter_mut())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().all(|v| v.is_finite())
    }

    /// `self += k * other`.
    pub fn axpy(&mut self, k: f64, other: &BrokenField) {
        for (a, b) in self.coeffs_mut().zip(other.coeffs()) {
            *a += k * b;
        }
    }

    /// `self = a * self + b * other`.
    pub fn lincomb(&mut self, a: f64, b: f64, other: &BrokenField) {
        for (x, y) in self.coeffs_mut().zip(other.coeffs()) {
            *x = a * *x + b * y;
        }
    }

    pub fn scale(&mut self, k: f64) {
        for v in self.coeffs_mut() {
            *v *= k;
        }
    }

    /// `||field||_{L2(a, b)}` from the diagonal mass matrix.
    pub fn l2_norm(&self, mesh: &Mesh1D) -> f64 {
        self.elements
            .iter()
            .enumerate()
            .map(|(j, c)| 0.5 * mesh.width(j) * c.l2_norm_sq())
            .sum::<f64>()
            .sqrt()
    }

    /// Right trace `u(x_j^-)` of element `j`.
    pub fn right_trace(&self, j: usize) -> f64 {
        self.elements[j].right_trace()
    }

    /// Left trace `u(x_{j-1}^+)` of element `j`.
    pub fn left_trace(&self, j: usize) -> f64 {
        self.elements[j].left_trace()
    }
}

/// Value of `f` at `x`; at nodes the side picks the owning element.
pub fn eval_field(f: &BrokenField, mesh: &Mesh1D, x: f64, side: Side) -> Result<f64> {
    let (a, b) = (mesh.a(), mesh.b());
    if !(x >= a && x <= b) {
        return Err(Error::OutOfDomain { x, a, b });
    }
    let last = mesh.n_elements() - 1;
    if let Some(i) = mesh.node_index(x) {
        return match side {
            Side::Interior => Err(Error::AmbiguousNode { x }),
            Side::Left if i == 0 => Err(Error::OutOfDomain { x, a, b }),
            Side::Right if i == last + 1 => Err(Error::OutOfDomain { x, a, b }),
            Side::Left => Ok(f.right_trace(i - 1)),
            Side::Right => Ok(f.left_trace(i)),
        };
    }
    let j = mesh.nodes().partition_point(|&n| n <= x) - 1;
    let j = j.min(last);
    Ok(f.element(j).eval(mesh.map(j).inverse(x)))
}

/// Singular points on the closed element `[lo, hi]`, in reference
/// coordinates (endpoints snapped to exactly -1 and 1).
pub fn reference_singularities(singular_points: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let h = hi - lo;
    let tol = 1e-14 * h.max(1.0);
    singular_points
        .iter()
        .filter_map(|&s| {
            if (s - lo).abs() <= tol {
                Some(-1.0)
            } else if (s - hi).abs() <= tol {
                Some(1.0)
            } else if s > lo && s < hi {
                Some(2.0 * (s - lo) / h - 1.0)
            } else {
                None
            }
        })
        .collect()
}

/// Element quadrature for integrands carrying a degree-`degree` polynomial
/// factor: graded toward singular points on the closed element, plain
/// Gauss with `degree + 16` points otherwise.
pub fn element_rule(singular_points: &[f64], lo: f64, hi: f64, degree: usize) -> QuadratureRule {
    let sing = reference_singularities(singular_points, lo, hi);
    if sing.is_empty() {
        QuadratureRule::gauss_legendre(degree + 16)
    } else {
        QuadratureRule::multi_graded(&sing, PHYSICAL_LEVELS, panel_points(degree))
    }
}

/// Physical coordinates of the nodes of `rule` on element `map`, built from
/// the anchored offsets so that nodes next to a singular point keep their
/// exact distance to it.
pub fn physical_nodes(rule: &QuadratureRule, map: &ElementMap) -> Vec<f64> {
    let half = map.jacobian();
    match rule.anchors() {
        None => rule.nodes().iter().map(|&xi| map.forward(xi)).collect(),
        Some(anchors) => anchors
            .iter()
            .zip(rule.offsets())
            .map(|(&a, &y)| {
                let base = if a == -1.0 {
                    map.left
                } else if a == 1.0 {
                    map.left + map.width
                } else {
                    map.forward(a)
                };
                base + half * y
            })
            .collect(),
    }
}

/// `(f, L_n)_{I_j}`-based modal coefficients of `g` on each element, with
/// Gauss-Radau corrections for the `Radau*` kinds.
pub fn project_function<G: Fn(f64) -> f64 + Sync>(
    mesh: &Mesh1D,
    singular_points: &[f64],
    kind: ProjectionKind,
    g: G,
) -> BrokenField {
    let elements = (0..mesh.n_elements())
        .map(|j| {
            let (lo, hi) = mesh.element(j);
            let p = mesh.degree(j);
            let rule = element_rule(singular_points, lo, hi, 2 * p);
            let values: Vec<f64> = physical_nodes(&rule, &mesh.map(j))
                .into_iter()
                .map(&g)
                .collect();
            let mut c = coeffs_from_samples(&values, p, &rule);
            match kind {
                ProjectionKind::L2 => {}
                ProjectionKind::RadauMinus => {
                    let head: f64 = c[..p].iter().sum();
                    c[p] = g(hi) - head;
                }
                ProjectionKind::RadauPlus => {
                    let head: f64 = c[..p]
                        .iter()
                        .enumerate()
                        .map(|(n, v)| if n % 2 == 0 { *v } else { -v })
                        .sum();
                    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
                    c[p] = sign * (g(lo) - head);
                }
            }
            c
        })
        .collect();
    BrokenField { elements }
}

/// Elementwise projection of `u(., t)`.
pub fn project_exact(
    s: &SingularSolution,
    mesh: &Mesh1D,
    t: f64,
    kind: ProjectionKind,
) -> Result<BrokenField> {
    let tf = s.time_factor().value(t);
    // Values are bounded everywhere; surface errors before projecting.
    for &x in mesh.nodes() {
        s.spatial(x, 0)?;
    }
    Ok(project_function(mesh, &s.singular_points(), kind, |x| {
        s.spatial(x, 0).unwrap_or(f64::NAN) * tf
    }))
}
