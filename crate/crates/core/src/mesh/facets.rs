use std::collections::HashMap;

use super::{cross, diameter, dot, norm, sub};
use crate::error::{Error, Result};
use crate::Point;

/// A triangular face of the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    /// Sorted vertex ids.
    pub vertices: [usize; 3],
    /// Adjacent tets; `tets.0 < tets.1` for interior facets.
    pub tets: (usize, Option<usize>),
    /// Unit normal pointing out of `tets.0`.
    pub normal: Point,
    pub area: f64,
    /// Longest edge of the facet.
    pub diameter: f64,
}

impl Facet {
    pub fn is_interior(&self) -> bool {
        self.tets.1.is_some()
    }
}

/// Collect the faces of `tets`, numbered in order of first appearance.
///
/// Fails if a face is shared by more than two tets.
pub fn build_facets(vertices: &[Point], tets: &[[usize; 4]]) -> Result<Vec<Facet>> {
    let mut index: HashMap<[usize; 3], usize> = HashMap::with_capacity(2 * tets.len() + 16);
    let mut facets: Vec<Facet> = Vec::with_capacity(2 * tets.len() + 16);

    for (t, tet) in tets.iter().enumerate() {
        for opposite in 0..4 {
            let mut key = [0usize; 3];
            let mut n = 0;
            for (i, &v) in tet.iter().enumerate() {
                if i != opposite {
                    key[n] = v;
                    n += 1;
                }
            }
            key.sort_unstable();
            match index.get(&key) {
                Some(&f) => {
                    let facet = &mut facets[f];
                    if facet.tets.1.is_some() {
                        return Err(Error::Structural(format!(
                            "facet {key:?} is shared by more than two tets"
                        )));
                    }
                    // tets are visited in increasing order, so t is the larger id
                    facet.tets.1 = Some(t);
                }
                None => {
                    let p = key.map(|v| vertices[v]);
                    let mut normal = cross(&sub(&p[1], &p[0]), &sub(&p[2], &p[0]));
                    let len = norm(&normal);
                    if len == 0.0 {
                        return Err(Error::Structural(format!("degenerate facet {key:?}")));
                    }
                    normal = normal.map(|c| c / len);
                    let to_opposite = sub(&vertices[tet[opposite]], &p[0]);
                    if dot(&normal, &to_opposite) > 0.0 {
                        normal = normal.map(|c| -c);
                    }
                    index.insert(key, facets.len());
                    facets.push(Facet {
                        vertices: key,
                        tets: (t, None),
                        normal,
                        area: 0.5 * len,
                        diameter: diameter(&p),
                    });
                }
            }
        }
    }
    Ok(facets)
}
