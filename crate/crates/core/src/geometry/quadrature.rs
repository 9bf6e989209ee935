//! Positive-weight quadrature on tetrahedra and triangles.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::mesh::{cross, norm, signed_volume, sub};
use crate::Point;

/// Points and weights in physical coordinates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate<F: FnMut(&Point) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }

    pub fn extend(&mut self, other: QuadratureRule) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Barycentric points with weights normalized to sum to one.
struct Reference<const N: usize> {
    points: Vec<[f64; N]>,
    weights: Vec<f64>,
}

fn push_orbit_4(r: &mut Reference<4>, pattern: [f64; 4], w: f64) {
    let mut seen: Vec<[f64; 4]> = Vec::new();
    let perms = permutations4();
    for p in perms {
        let q = [pattern[p[0]], pattern[p[1]], pattern[p[2]], pattern[p[3]]];
        if !seen.contains(&q) {
            seen.push(q);
            r.points.push(q);
            r.weights.push(w);
        }
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

fn push_orbit_3(r: &mut Reference<3>, a: f64, w: f64) {
    let b = 1.0 - 2.0 * a;
    for q in [[b, a, a], [a, b, a], [a, a, b]] {
        r.points.push(q);
        r.weights.push(w);
    }
}

fn tet_reference(degree: usize) -> Result<&'static Reference<4>> {
    static CENTROID: OnceLock<Reference<4>> = OnceLock::new();
    static FOUR: OnceLock<Reference<4>> = OnceLock::new();
    static FOURTEEN: OnceLock<Reference<4>> = OnceLock::new();
    match degree {
        0 | 1 => Ok(CENTROID.get_or_init(|| Reference {
            points: vec![[0.25; 4]],
            weights: vec![1.0],
        })),
        2 => Ok(FOUR.get_or_init(|| {
            let a = (5.0 - 5f64.sqrt()) / 20.0;
            let mut r = Reference {
                points: vec![],
                weights: vec![],
            };
            push_orbit_4(&mut r, [1.0 - 3.0 * a, a, a, a], 0.25);
            r
        })),
        3..=5 => Ok(FOURTEEN.get_or_init(|| {
            // 14-point rule, degree 5, all weights positive
            let mut r = Reference {
                points: vec![],
                weights: vec![],
            };
            let a1 = 0.092_735_250_310_891_23;
            let a2 = 0.310_885_919_263_300_6;
            let a3 = 0.045_503_704_125_649_65;
            push_orbit_4(
                &mut r,
                [1.0 - 3.0 * a1, a1, a1, a1],
                6.0 * 0.012_248_840_519_393_66,
            );
            push_orbit_4(
                &mut r,
                [1.0 - 3.0 * a2, a2, a2, a2],
                6.0 * 0.018_781_320_953_002_64,
            );
            push_orbit_4(
                &mut r,
                [a3, a3, 0.5 - a3, 0.5 - a3],
                6.0 * 0.007_091_003_462_846_911,
            );
            r
        })),
        _ => Err(Error::InvalidInput(format!(
            "no tetrahedral rule of degree {degree} (max 5)"
        ))),
    }
}

fn triangle_reference(degree: usize) -> Result<&'static Reference<3>> {
    static CENTROID: OnceLock<Reference<3>> = OnceLock::new();
    static THREE: OnceLock<Reference<3>> = OnceLock::new();
    static SIX: OnceLock<Reference<3>> = OnceLock::new();
    static SEVEN: OnceLock<Reference<3>> = OnceLock::new();
    match degree {
        0 | 1 => Ok(CENTROID.get_or_init(|| Reference {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
        })),
        2 => Ok(THREE.get_or_init(|| {
            let mut r = Reference {
                points: vec![],
                weights: vec![],
            };
            push_orbit_3(&mut r, 1.0 / 6.0, 1.0 / 3.0);
            r
        })),
        3 | 4 => Ok(SIX.get_or_init(|| {
            let mut r = Reference {
                points: vec![],
                weights: vec![],
            };
            push_orbit_3(&mut r, 0.445_948_490_915_964_9, 0.223_381_589_678_011_47);
            push_orbit_3(&mut r, 0.091_576_213_509_770_74, 0.109_951_743_655_321_87);
            r
        })),
        5 => Ok(SEVEN.get_or_init(|| {
            let s = 15f64.sqrt();
            let mut r = Reference {
                points: vec![[1.0 / 3.0; 3]],
                weights: vec![9.0 / 40.0],
            };
            push_orbit_3(&mut r, (6.0 - s) / 21.0, (155.0 - s) / 1200.0);
            push_orbit_3(&mut r, (6.0 + s) / 21.0, (155.0 + s) / 1200.0);
            r
        })),
        _ => Err(Error::InvalidInput(format!(
            "no triangle rule of degree {degree} (max 5)"
        ))),
    }
}

/// Rule exact for polynomials of total degree `degree` on the tet `pts`.
pub fn tet_rule(pts: &[Point; 4], degree: usize) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule::default();
    append_tet_rule(&mut rule, pts, degree)?;
    Ok(rule)
}

pub(crate) fn append_tet_rule(
    rule: &mut QuadratureRule,
    pts: &[Point; 4],
    degree: usize,
) -> Result<()> {
    let reference = tet_reference(degree)?;
    let vol = signed_volume(pts).abs();
    for (lam, w) in reference.points.iter().zip(&reference.weights) {
        rule.points.push(std::array::from_fn(|c| {
            lam[0] * pts[0][c] + lam[1] * pts[1][c] + lam[2] * pts[2][c] + lam[3] * pts[3][c]
        }));
        rule.weights.push(w * vol);
    }
    Ok(())
}

/// Rule exact for polynomials of total degree `degree` on the triangle `pts`.
pub fn triangle_rule(pts: &[Point; 3], degree: usize) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule::default();
    append_triangle_rule(&mut rule, pts, degree)?;
    Ok(rule)
}

pub(crate) fn append_triangle_rule(
    rule: &mut QuadratureRule,
    pts: &[Point; 3],
    degree: usize,
) -> Result<()> {
    let reference = triangle_reference(degree)?;
    let area = triangle_area(pts);
    for (lam, w) in reference.points.iter().zip(&reference.weights) {
        rule.points.push(std::array::from_fn(|c| {
            lam[0] * pts[0][c] + lam[1] * pts[1][c] + lam[2] * pts[2][c]
        }));
        rule.weights.push(w * area);
    }
    Ok(())
}

pub fn triangle_area(p: &[Point; 3]) -> f64 {
    0.5 * norm(&cross(&sub(&p[1], &p[0]), &sub(&p[2], &p[0])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    const REF_TET: [Point; 4] = [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
    ];

    #[test]
    fn tet_rules_integrate_monomials_exactly() {
        for degree in 1..=5usize {
            let rule = tet_rule(&REF_TET, degree).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for i in 0..=degree as u32 {
                for j in 0..=(degree as u32 - i) {
                    for k in 0..=(degree as u32 - i - j) {
                        let q = rule.integrate(|p| {
                            p[0].powi(i as i32) * p[1].powi(j as i32) * p[2].powi(k as i32)
                        });
                        let exact =
                            factorial(i) * factorial(j) * factorial(k) / factorial(i + j + k + 3);
                        assert!((q - exact).abs() < 1e-15, "deg {degree}: x^{i} y^{j} z^{k}");
                    }
                }
            }
        }
    }

    #[test]
    fn triangle_rules_integrate_monomials_exactly() {
        let tri = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        for degree in 1..=5usize {
            let rule = triangle_rule(&tri, degree).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for i in 0..=degree as u32 {
                for j in 0..=(degree as u32 - i) {
                    let q = rule.integrate(|p| p[0].powi(i as i32) * p[1].powi(j as i32));
                    let exact = factorial(i) * factorial(j) / factorial(i + j + 2);
                    assert!((q - exact).abs() < 1e-15, "deg {degree}: x^{i} y^{j}");
                }
            }
        }
    }

    #[test]
    fn unsupported_degree_is_an_error() {
        assert!(tet_rule(&REF_TET, 6).is_err());
        assert!(triangle_rule(&[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 9).is_err());
    }
}
