//! Gauss-Legendre rules and geometrically graded composite rules on the
//! reference interval (-1, 1).
//!
//! Graded rules refine toward a singular point with panel ratio 1/2. Every
//! node of a graded rule also carries its exact signed offset from the
//! grading anchor, so integrands such as `(1 + xi)^-0.5` can be evaluated
//! at distances far below the spacing of `f64` values near `xi = -1`.

use crate::legendre::eval_legendre_pair;

/// Panel levels used for reference-element integrals of singular functions.
pub const REFERENCE_LEVELS: usize = 80;
/// Panel levels used when nodes are mapped to physical coordinates.
pub const PHYSICAL_LEVELS: usize = 40;
/// Minimum Gauss points per graded panel.
pub const MIN_PANEL_POINTS: usize = 20;

/// Location of the (possible) singularity of an integrand on (-1, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Singularity {
    None,
    Left,
    Right,
    /// Interior point in reference coordinates, strictly inside (-1, 1).
    Interior(f64),
}

impl Singularity {
    pub fn anchor(&self) -> Option<f64> {
        match *self {
            Singularity::None => None,
            Singularity::Left => Some(-1.0),
            Singularity::Right => Some(1.0),
            Singularity::Interior(theta) => Some(theta),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Per-node grading anchor; empty for plain rules.
    anchors: Vec<f64>,
    /// `node - anchor`, exact for graded nodes.
    offsets: Vec<f64>,
}

/// A function on the reference interval.
///
/// `eval_anchored` receives the node together with its exact offset from a
/// grading anchor; implementors with a singularity at that anchor should
/// prefer the offset.
pub trait RefFunction: Sync {
    fn eval(&self, xi: f64) -> f64;

    fn eval_anchored(&self, xi: f64, _anchor: f64, _offset: f64) -> f64 {
        self.eval(xi)
    }
}

impl<F: Fn(f64) -> f64 + Sync> RefFunction for F {
    fn eval(&self, xi: f64) -> f64 {
        self(xi)
    }
}

impl QuadratureRule {
    /// `q`-point Gauss-Legendre rule, exact for polynomials of degree `2q - 1`.
    ///
    /// Nodes come from Newton iteration on the three-term recurrence.
    pub fn gauss_legendre(q: usize) -> Self {
        assert!(q >= 1, "a quadrature rule needs at least one point");
        let mut nodes = vec![0.0; q];
        let mut weights = vec![0.0; q];
        let qf = q as f64;
        for i in 0..q.div_ceil(2) {
            // Tricomi initial guess for the i-th largest root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (qf + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = eval_legendre_pair(q, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, dp) = eval_legendre_pair(q, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[q - 1 - i] = x;
            weights[q - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if q % 2 == 1 {
            nodes[q / 2] = 0.0;
        }
        Self {
            offsets: nodes.clone(),
            nodes,
            weights,
            anchors: Vec::new(),
        }
    }

    /// Composite Gauss rule graded geometrically (ratio 1/2) toward `sing`.
    ///
    /// `levels` halvings are applied on each side of the singular point and
    /// every panel, including the innermost one, carries `points` nodes.
    pub fn graded(sing: Singularity, levels: usize, points: usize) -> Self {
        match sing.anchor() {
            None => Self::gauss_legendre(points),
            Some(a) => {
                if let Singularity::Interior(theta) = sing {
                    assert!(
                        theta > -1.0 && theta < 1.0,
                        "interior singularity must lie strictly inside (-1, 1)"
                    );
                }
                Self::multi_graded(&[a], levels, points)
            }
        }
    }

    /// Composite rule graded toward every point of `points` in `[-1, 1]`.
    ///
    /// The interval is split at interior points; a piece with singular
    /// points at both ends is split again at its midpoint.
    pub fn multi_graded(points: &[f64], levels: usize, per_panel: usize) -> Self {
        let mut sing: Vec<f64> = points
            .iter()
            .copied()
            .filter(|x| (-1.0..=1.0).contains(x))
            .collect();
        sing.sort_by(f64::total_cmp);
        sing.dedup();
        if sing.is_empty() {
            return Self::gauss_legendre(per_panel);
        }
        let base = Self::gauss_legendre(per_panel);
        let mut breaks = vec![-1.0];
        breaks.extend(sing.iter().copied().filter(|&x| x > -1.0 && x < 1.0));
        breaks.push(1.0);
        let mut rule = Self {
            nodes: Vec::new(),
            weights: Vec::new(),
            anchors: Vec::new(),
            offsets: Vec::new(),
        };
        for w in breaks.windows(2) {
            let (u, v) = (w[0], w[1]);
            match (sing.contains(&u), sing.contains(&v)) {
                (true, true) => {
                    let mid = 0.5 * (u + v);
                    rule.push_graded_from(u, mid - u, levels, &base);
                    rule.push_graded_toward(v, v - mid, levels, &base);
                }
                (true, false) => rule.push_graded_from(u, v - u, levels, &base),
                (false, true) => rule.push_graded_toward(v, v - u, levels, &base),
                (false, false) => {
                    let half = 0.5 * (v - u);
                    for (&x, &wt) in base.nodes.iter().zip(&base.weights) {
                        let y = half * (1.0 + x);
                        rule.push(u + y, half * wt, u, y);
                    }
                }
            }
        }
        rule
    }

    fn push(&mut self, node: f64, weight: f64, anchor: f64, offset: f64) {
        self.nodes.push(node);
        self.weights.push(weight);
        self.anchors.push(anchor);
        self.offsets.push(offset);
    }

    /// Panels on `[a, a + length]` refined toward `a`.
    fn push_graded_from(&mut self, a: f64, length: f64, levels: usize, base: &Self) {
        for (y, w) in graded_offsets(length, levels, base) {
            self.push(a + y, w, a, y);
        }
    }

    /// Panels on `[b - length, b]` refined toward `b`.
    fn push_graded_toward(&mut self, b: f64, length: f64, levels: usize, base: &Self) {
        for (y, w) in graded_offsets(length, levels, base).into_iter().rev() {
            self.push(b - y, w, b, -y);
        }
    }

    /// Graded rule sized for integrands containing a polynomial factor of
    /// degree `degree` on top of the singular factor.
    pub fn for_singular(sing: Singularity, degree: usize) -> Self {
        Self::graded(sing, REFERENCE_LEVELS, panel_points(degree))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Per-node anchors, `None` for a plain rule.
    pub fn anchors(&self) -> Option<&[f64]> {
        (!self.anchors.is_empty()).then_some(self.anchors.as_slice())
    }

    /// Signed offsets `node - anchor` (the nodes themselves for a plain
    /// rule); exact even where the node itself is not.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Values of `f` at the nodes, using anchored evaluation when available.
    pub fn sample<F: RefFunction + ?Sized>(&self, f: &F) -> Vec<f64> {
        if self.anchors.is_empty() {
            return self.nodes.iter().map(|&x| f.eval(x)).collect();
        }
        self.nodes
            .iter()
            .zip(&self.anchors)
            .zip(&self.offsets)
            .map(|((&x, &a), &y)| f.eval_anchored(x, a, y))
            .collect()
    }

    pub fn integrate<F: RefFunction + ?Sized>(&self, f: &F) -> f64 {
        self.sample(f)
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum()
    }
}

/// Gauss points per panel for a polynomial factor of the given degree.
pub fn panel_points(degree: usize) -> usize {
    MIN_PANEL_POINTS.max(degree / 2 + 16)
}

/// Offsets in `[0, length]` and weights of a composite rule graded toward 0.
fn graded_offsets(length: f64, levels: usize, base: &QuadratureRule) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity((levels + 1) * base.len());
    // Innermost panel [0, length / 2^levels] first, then outward.
    let mut lo = 0.0;
    let mut hi = length * 0.5f64.powi(levels as i32);
    for level in 0..=levels {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&x, &w) in base.nodes.iter().zip(&base.weights) {
            out.push((mid + half * x, half * w));
        }
        if level < levels {
            lo = hi;
            hi = length * 0.5f64.powi((levels - level - 1) as i32);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_and_two_point_rules() {
        let r1 = QuadratureRule::gauss_legendre(1);
        assert_eq!(r1.nodes(), &[0.0]);
        assert_relative_eq!(r1.weights()[0], 2.0, epsilon = 1e-15);
        let r2 = QuadratureRule::gauss_legendre(2);
        let s = 1.0 / 3f64.sqrt();
        assert_relative_eq!(r2.nodes()[0], -s, epsilon = 1e-15);
        assert_relative_eq!(r2.nodes()[1], s, epsilon = 1e-15);
        assert_relative_eq!(r2.weights()[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(r2.weights()[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn rule_invariants_hold_up_to_100_points() {
        for q in 1..=100 {
            let r = QuadratureRule::gauss_legendre(q);
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]), "q = {q}");
            assert!(r.nodes().iter().all(|x| x.abs() < 1.0));
            assert!(r.weights().iter().all(|&w| w > 0.0));
            let total: f64 = r.weights().iter().sum();
            assert!((total - 2.0).abs() <= 1e-13, "q = {q}: {total}");
        }
    }

    #[test]
    fn exact_for_degree_2q_minus_1() {
        for q in 1..=40 {
            let r = QuadratureRule::gauss_legendre(q);
            for k in 0..2 * q {
                let got = r.integrate(&|x: f64| x.powi(k as i32));
                let exact = if k % 2 == 1 {
                    0.0
                } else {
                    2.0 / (k as f64 + 1.0)
                };
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "q = {q}, k = {k}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn sixteen_points_on_sqrt_endpoint() {
        let r = QuadratureRule::gauss_legendre(16);
        let got = r.integrate(&|x: f64| (1.0 + x).sqrt());
        let exact = 2f64.powf(1.5) * 2.0 / 3.0;
        assert!(((got - exact) / exact).abs() <= 1e-3);
        assert_relative_eq!(exact, 1.8856, epsilon = 1e-4);
    }

    #[test]
    fn graded_rules_are_ordered_and_sum_to_two() {
        for sing in [
            Singularity::Left,
            Singularity::Right,
            Singularity::Interior(0.3),
            Singularity::Interior(-0.75),
        ] {
            let r = QuadratureRule::graded(sing, 30, 20);
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]), "{sing:?}");
            assert!(r.nodes().iter().all(|x| x.abs() < 1.0));
            let total: f64 = r.weights().iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "{sing:?}: {total}");
            for ((x, a), y) in r.nodes().iter().zip(r.anchors().unwrap()).zip(r.offsets()) {
                assert!((a + y - x).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn multi_graded_rule_resolves_two_kinks() {
        // |xi + 1|^0.3 |xi - 0.2|^0.3 is smooth except at -1 and 0.2
        let f = |x: f64| (x + 1.0).powf(0.5) * (x - 0.2).abs().powf(0.5);
        let r = QuadratureRule::multi_graded(&[-1.0, 0.2], 40, 20);
        assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        let fine = QuadratureRule::multi_graded(&[-1.0, 0.2, -0.4], 60, 30);
        assert_relative_eq!(r.integrate(&f), fine.integrate(&f), max_relative = 1e-13);
        let total: f64 = r.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn graded_rule_resolves_inverse_sqrt() {
        // int_{-1}^{1} (1 + xi)^{-1/2} = 2 sqrt(2), evaluated through offsets.
        struct InvSqrt;
        impl RefFunction for InvSqrt {
            fn eval(&self, xi: f64) -> f64 {
                (1.0 + xi).powf(-0.5)
            }
            fn eval_anchored(&self, _xi: f64, _a: f64, y: f64) -> f64 {
                y.powf(-0.5)
            }
        }
        let r = QuadratureRule::for_singular(Singularity::Left, 0);
        let got = r.integrate(&InvSqrt);
        assert_relative_eq!(got, 2.0 * 2f64.sqrt(), max_relative = 1e-13);
    }
}
