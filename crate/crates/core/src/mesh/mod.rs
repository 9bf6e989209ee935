//! Structured tetrahedral meshes of an axis-aligned box.
//!
//! The coarse mesh splits every cube of an `n x n x n` grid into the six Kuhn
//! tetrahedra that share the cube diagonal `(0,0,0) -> (1,1,1)`. Refinement is
//! red (regular) refinement: every tet is split into four corner tets and an
//! octahedron, the octahedron being cut along its shortest diagonal. For Kuhn
//! meshes this reproduces the Kuhn triangulation of the twice finer grid, so
//! every level of a hierarchy is again a Kuhn mesh.
//!
//! Vertex positions are kept as integer grid indices and converted to
//! coordinates by scaling, which keeps hierarchies exactly nested in floating
//! point.

mod facets;
mod io;

use std::collections::HashMap;

pub use facets::{build_facets, Facet};
pub use io::{read_ascii, write_ascii};

use crate::error::{Error, Result};
use crate::Point;

/// Axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDomain {
    pub lo: Point,
    pub hi: Point,
}

impl BoxDomain {
    pub fn new(lo: Point, hi: Point) -> Self {
        Self { lo, hi }
    }

    pub fn cube(half_width: f64) -> Self {
        Self::new([-half_width; 3], [half_width; 3])
    }

    pub fn unit() -> Self {
        Self::new([0.0; 3], [1.0; 3])
    }

    pub fn extent(&self) -> Point {
        [
            self.hi[0] - self.lo[0],
            self.hi[1] - self.lo[1],
            self.hi[2] - self.lo[2],
        ]
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e[0] * e[1] * e[2]
    }
}

/// A conforming tetrahedral mesh on a grid-aligned vertex set.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    grid_index: Vec<[i64; 3]>,
    tets: Vec<[usize; 4]>,
    facets: Vec<Facet>,
    boundary_vertex: Vec<bool>,
    level: usize,
    domain: BoxDomain,
    /// Number of grid intervals per axis at this level.
    intervals: i64,
    spacing: Point,
}

/// Where a vertex of a refined mesh comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexParent {
    /// Same position as the given coarse vertex.
    Vertex(usize),
    /// Midpoint of the coarse edge `(a, b)`, `a < b`.
    Midpoint(usize, usize),
}

/// Parent/child data produced by one refinement step.
#[derive(Debug, Clone)]
pub struct RefinementMap {
    /// `children[t]` are the ids of the eight fine tets of coarse tet `t`.
    pub children: Vec<[usize; 8]>,
    /// One entry per fine vertex.
    pub vertex_parents: Vec<VertexParent>,
}

/// Nested sequence of uniformly refined meshes, coarse to fine.
#[derive(Debug, Clone)]
pub struct MeshHierarchy {
    levels: Vec<Mesh>,
    /// `refinements[l]` maps level `l` to level `l + 1`.
    refinements: Vec<RefinementMap>,
}

impl MeshHierarchy {
    pub fn new(coarse: Mesh, max_level: usize) -> Self {
        let mut levels = vec![coarse];
        let mut refinements = Vec::with_capacity(max_level);
        for _ in 0..max_level {
            let (fine, map) = refine_uniform(levels.last().unwrap());
            levels.push(fine);
            refinements.push(map);
        }
        Self {
            levels,
            refinements,
        }
    }

    /// The hierarchy used throughout the experiments: `[-1.5, 1.5]^3`,
    /// four cubes per axis on level 0.
    pub fn standard(max_level: usize) -> Self {
        let coarse =
            build_initial_mesh(4, BoxDomain::cube(1.5)).expect("standard box is non-degenerate");
        Self::new(coarse, max_level)
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn finest_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, l: usize) -> &Mesh {
        &self.levels[l]
    }

    pub fn levels(&self) -> &[Mesh] {
        &self.levels
    }

    /// Refinement data from level `l` to `l + 1`.
    pub fn refinement(&self, l: usize) -> &RefinementMap {
        &self.refinements[l]
    }

    /// Hierarchy restricted to levels `0..=l`.
    pub fn truncated(&self, l: usize) -> MeshHierarchy {
        MeshHierarchy {
            levels: self.levels[..=l].to_vec(),
            refinements: self.refinements[..l].to_vec(),
        }
    }
}

/// Kuhn tetrahedra of the unit cube as paths along the cube edges, one per
/// permutation of the axes.
const KUHN_PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Structured mesh of `box` with `n_per_axis` cubes per axis, six Kuhn tets per cube.
pub fn build_initial_mesh(n_per_axis: usize, domain: BoxDomain) -> Result<Mesh> {
    if n_per_axis == 0 {
        return Err(Error::InvalidInput("n_per_axis must be positive".into()));
    }
    let extent = domain.extent();
    if extent.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "degenerate box {:?} .. {:?}",
            domain.lo, domain.hi
        )));
    }
    let n = n_per_axis as i64;
    let np = n + 1;
    let id = |i: i64, j: i64, k: i64| (i + np * (j + np * k)) as usize;

    let mut grid_index = Vec::with_capacity((np * np * np) as usize);
    for k in 0..np {
        for j in 0..np {
            for i in 0..np {
                grid_index.push([i, j, k]);
            }
        }
    }

    let mut tets = Vec::with_capacity(6 * (n * n * n) as usize);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for perm in KUHN_PERMUTATIONS {
                    let mut p = [i, j, k];
                    let mut path = [0usize; 4];
                    path[0] = id(p[0], p[1], p[2]);
                    for (s, axis) in perm.iter().enumerate() {
                        p[*axis] += 1;
                        path[s + 1] = id(p[0], p[1], p[2]);
                    }
                    tets.push(path);
                }
            }
        }
    }

    Mesh::from_grid(grid_index, tets, 0, domain, n)
}

impl Mesh {
    fn from_grid(
        grid_index: Vec<[i64; 3]>,
        mut tets: Vec<[usize; 4]>,
        level: usize,
        domain: BoxDomain,
        intervals: i64,
    ) -> Result<Self> {
        let extent = domain.extent();
        let spacing = [
            extent[0] / intervals as f64,
            extent[1] / intervals as f64,
            extent[2] / intervals as f64,
        ];
        let vertices: Vec<Point> = grid_index
            .iter()
            .map(|g| {
                [
                    domain.lo[0] + spacing[0] * g[0] as f64,
                    domain.lo[1] + spacing[1] * g[1] as f64,
                    domain.lo[2] + spacing[2] * g[2] as f64,
                ]
            })
            .collect();
        let boundary_vertex = grid_index
            .iter()
            .map(|g| g.iter().any(|&c| c == 0 || c == intervals))
            .collect();

        for tet in tets.iter_mut() {
            if integer_orientation(&grid_index, tet) < 0 {
                tet.swap(2, 3);
            }
        }
        let facets = build_facets(&vertices, &tets)?;
        Ok(Self {
            vertices,
            grid_index,
            tets,
            facets,
            boundary_vertex,
            level,
            domain,
            intervals,
            spacing,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn domain(&self) -> BoxDomain {
        self.domain
    }

    pub fn grid_index(&self, v: usize) -> [i64; 3] {
        self.grid_index[v]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn boundary_vertex_flags(&self) -> &[bool] {
        &self.boundary_vertex
    }

    /// Cube edge length of the underlying grid (largest over the axes).
    pub fn mesh_size(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn tet_points(&self, t: usize) -> [Point; 4] {
        self.tets[t].map(|v| self.vertices[v])
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        signed_volume(&self.tet_points(t))
    }

    /// Longest edge of tet `t`.
    pub fn tet_diameter(&self, t: usize) -> f64 {
        diameter(&self.tet_points(t))
    }

    /// Grid intervals per axis at this level (`n * 2^level`).
    pub fn intervals_per_axis(&self) -> i64 {
        self.intervals
    }
}

/// Red refinement of every tet. Returns the fine mesh and the parent data.
///
/// Fine vertex ids `0..n_coarse` coincide with the coarse vertices; edge
/// midpoints are appended in order of first appearance.
pub fn refine_uniform(mesh: &Mesh) -> (Mesh, RefinementMap) {
    let n_coarse = mesh.num_vertices();
    let mut grid_index: Vec<[i64; 3]> = mesh.grid_index.iter().map(|g| g.map(|c| 2 * c)).collect();
    let mut vertex_parents: Vec<VertexParent> = (0..n_coarse).map(VertexParent::Vertex).collect();
    let mut midpoint_ids: HashMap<(usize, usize), usize> = HashMap::new();

    let mut tets = Vec::with_capacity(8 * mesh.num_tets());
    let mut children = Vec::with_capacity(mesh.num_tets());

    for (t, tet) in mesh.tets.iter().enumerate() {
        // mid[i][j] for i < j
        let mut mid = [[usize::MAX; 4]; 4];
        for i in 0..4 {
            for j in (i + 1)..4 {
                let (a, b) = ordered(tet[i], tet[j]);
                let m = *midpoint_ids.entry((a, b)).or_insert_with(|| {
                    let ga = grid_index[a];
                    let gb = grid_index[b];
                    grid_index.push([
                        (ga[0] + gb[0]) / 2,
                        (ga[1] + gb[1]) / 2,
                        (ga[2] + gb[2]) / 2,
                    ]);
                    vertex_parents.push(VertexParent::Midpoint(a, b));
                    grid_index.len() - 1
                });
                mid[i][j] = m;
                mid[j][i] = m;
            }
        }

        let pts = mesh.tet_points(t);
        let (e1, e2) = octahedron_diagonal(&pts);
        let (i, j) = e1;
        let (k, l) = e2;

        let mut kids = [
            [tet[0], mid[0][1], mid[0][2], mid[0][3]],
            [mid[0][1], tet[1], mid[1][2], mid[1][3]],
            [mid[0][2], mid[1][2], tet[2], mid[2][3]],
            [mid[0][3], mid[1][3], mid[2][3], tet[3]],
            [0; 4],
            [0; 4],
            [0; 4],
            [0; 4],
        ];
        let p = mid[i][j];
        let q = mid[k][l];
        let equator = [mid[i][k], mid[k][j], mid[j][l], mid[l][i]];
        for s in 0..4 {
            kids[4 + s] = [p, q, equator[s], equator[(s + 1) % 4]];
        }

        let base = tets.len();
        tets.extend_from_slice(&kids);
        children.push(std::array::from_fn(|c| base + c));
    }

    let fine = Mesh::from_grid(
        grid_index,
        tets,
        mesh.level + 1,
        mesh.domain,
        2 * mesh.intervals,
    )
    .expect("red refinement of a conforming mesh is conforming");
    (
        fine,
        RefinementMap {
            children,
            vertex_parents,
        },
    )
}

/// Pair of opposite edges whose midpoints span the octahedron diagonal used
/// to split the interior octahedron.
///
/// Shortest diagonal wins. Ties are broken against the diagonal whose edge
/// pair contains the longest tet edge, then by the fixed order
/// `(01|23), (02|13), (03|12)`.
fn octahedron_diagonal(pts: &[Point; 4]) -> ((usize, usize), (usize, usize)) {
    const PAIRS: [((usize, usize), (usize, usize)); 3] =
        [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
    let midpoint =
        |a: usize, b: usize| -> Point { std::array::from_fn(|c| 0.5 * (pts[a][c] + pts[b][c])) };
    let edge_len2 = |a: usize, b: usize| dist2(&pts[a], &pts[b]);

    let mut longest = (0, 1);
    let mut longest_len = -1.0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            let l = edge_len2(i, j);
            if l > longest_len * (1.0 + 1e-12) {
                longest_len = l;
                longest = (i, j);
            }
        }
    }

    let lengths = PAIRS.map(|(e1, e2)| dist2(&midpoint(e1.0, e1.1), &midpoint(e2.0, e2.1)));
    let shortest = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    let tol = 1e-10 * shortest.max(f64::MIN_POSITIVE);
    let candidates: Vec<usize> = (0..3).filter(|&c| lengths[c] <= shortest + tol).collect();
    let pick = candidates
        .iter()
        .copied()
        .find(|&c| PAIRS[c].0 != longest && PAIRS[c].1 != longest)
        .unwrap_or(candidates[0]);
    PAIRS[pick]
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn integer_orientation(grid: &[[i64; 3]], tet: &[usize; 4]) -> i64 {
    let p0 = grid[tet[0]];
    let d = |v: usize| -> [i64; 3] {
        let p = grid[tet[v]];
        [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]]
    };
    let (a, b, c) = (d(1), d(2), d(3));
    let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0]);
    det.signum()
}

pub(crate) fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist2(a: &Point, b: &Point) -> f64 {
    let d = sub(a, b);
    dot(&d, &d)
}

/// Signed volume of the tet `p`; positive for right-handed orientation.
pub fn signed_volume(p: &[Point; 4]) -> f64 {
    let a = sub(&p[1], &p[0]);
    let b = sub(&p[2], &p[0]);
    let c = sub(&p[3], &p[0]);
    dot(&a, &cross(&b, &c)) / 6.0
}

/// Gradients of the four barycentric coordinates of the tet `p`.
pub fn barycentric_gradients(p: &[Point; 4]) -> [Point; 4] {
    let a = sub(&p[1], &p[0]);
    let b = sub(&p[2], &p[0]);
    let c = sub(&p[3], &p[0]);
    let det = dot(&a, &cross(&b, &c));
    let g1 = cross(&b, &c).map(|x| x / det);
    let g2 = cross(&c, &a).map(|x| x / det);
    let g3 = cross(&a, &b).map(|x| x / det);
    let g0 = std::array::from_fn(|k| -(g1[k] + g2[k] + g3[k]));
    [g0, g1, g2, g3]
}

/// Barycentric coordinates of `x` with respect to the tet `p`.
pub fn barycentric_coordinates(p: &[Point; 4], x: &Point) -> [f64; 4] {
    let g = barycentric_gradients(p);
    let d = sub(x, &p[0]);
    let l1 = dot(&g[1], &d);
    let l2 = dot(&g[2], &d);
    let l3 = dot(&g[3], &d);
    [1.0 - l1 - l2 - l3, l1, l2, l3]
}

/// Longest pairwise distance of a point set.
pub fn diameter(p: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            d = d.max(dist2(&p[i], &p[j]));
        }
    }
    d.sqrt()
}
