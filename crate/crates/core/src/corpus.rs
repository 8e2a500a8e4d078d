//! Bundled closed surfaces used by the test suite and the `check` command.

use std::collections::HashMap;

use crate::surface::SimplicialSurface;

pub fn tetrahedron() -> SimplicialSurface {
    build(&[[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]])
}

pub fn octahedron() -> SimplicialSurface {
    let mut tris = Vec::new();
    for i in 0..4 {
        let (a, b) = (1 + i, 1 + (i + 1) % 4);
        tris.push([0, a, b]);
        tris.push([5, b, a]);
    }
    build(&tris)
}

pub fn icosahedron() -> SimplicialSurface {
    build(&icosahedron_triangles())
}

fn icosahedron_triangles() -> Vec<[usize; 3]> {
    let upper = |i: usize| 1 + i % 5;
    let lower = |i: usize| 6 + i % 5;
    let mut tris = Vec::new();
    for i in 0..5 {
        tris.push([0, upper(i), upper(i + 1)]);
    }
    for i in 0..5 {
        tris.push([upper(i), lower(i), upper(i + 1)]);
        tris.push([upper(i + 1), lower(i), lower(i + 1)]);
    }
    for i in 0..5 {
        tris.push([11, lower(i + 1), lower(i)]);
    }
    tris
}

/// Hexagonal bipyramid: an 8-vertex, 12-triangle sphere.
pub fn hexagonal_bipyramid() -> SimplicialSurface {
    let mut tris = Vec::new();
    for i in 0..6 {
        let (a, b) = (1 + i, 1 + (i + 1) % 6);
        tris.push([0, a, b]);
        tris.push([7, b, a]);
    }
    build(&tris)
}

/// The icosahedron midpoint-subdivided `levels` times (4^levels · 20 triangles).
pub fn subdivided_icosahedron(levels: usize) -> SimplicialSurface {
    let mut tris = icosahedron_triangles();
    let mut vertex_count = 12;
    for _ in 0..levels {
        (vertex_count, tris) = midpoint_subdivide(vertex_count, &tris);
    }
    SimplicialSurface::new(vertex_count, &tris).expect("subdivided icosahedron is a closed surface")
}

/// Combinatorial 4-split of every triangle through its edge midpoints.
pub fn midpoint_subdivide(vertex_count: usize, triangles: &[[usize; 3]]) -> (usize, Vec<[usize; 3]>) {
    let mut next = vertex_count;
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
    let mut midpoint = |u: usize, v: usize| {
        *midpoints.entry((u.min(v), u.max(v))).or_insert_with(|| {
            next += 1;
            next - 1
        })
    };
    let mut out = Vec::with_capacity(4 * triangles.len());
    for &[a, b, c] in triangles {
        let (ab, bc, ca) = (midpoint(a, b), midpoint(b, c), midpoint(c, a));
        out.push([a, ab, ca]);
        out.push([ab, b, bc]);
        out.push([ca, bc, c]);
        out.push([ab, bc, ca]);
    }
    (next, out)
}

/// Császár's 7-vertex torus (the Möbius–Kantor torus, 14 triangles).
pub fn csaszar_torus() -> SimplicialSurface {
    build(&csaszar_triangles())
}

fn csaszar_triangles() -> Vec<[usize; 3]> {
    (0..7)
        .flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 3) % 7, (i + 2) % 7]])
        .collect()
}

/// Connected sum of two Császár tori along one triangle (11 vertices, 26 triangles).
pub fn genus_two() -> SimplicialSurface {
    let a = csaszar_torus();
    let removed = a.triangle(0);
    let mut tris: Vec<[usize; 3]> = a.triangles()[1..].to_vec();
    // Second copy: its removed triangle is glued with reversed orientation.
    let mut relabel: HashMap<usize, usize> = HashMap::new();
    relabel.insert(removed[0], removed[0]);
    relabel.insert(removed[1], removed[2]);
    relabel.insert(removed[2], removed[1]);
    let mut next = 7;
    for v in 0..7 {
        relabel.entry(v).or_insert_with(|| {
            next += 1;
            next - 1
        });
    }
    tris.extend(a.triangles()[1..].iter().map(|t| {
        let t = t.map(|v| relabel[&v]);
        [t[0], t[2], t[1]]
    }));
    build(&tris)
}

/// Six-vertex real projective plane (hemi-icosahedron).
pub fn projective_plane() -> SimplicialSurface {
    build(&[
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 5],
        [0, 5, 1],
        [1, 2, 4],
        [2, 3, 5],
        [3, 4, 1],
        [4, 5, 2],
        [5, 1, 3],
    ])
}

/// Klein bottle from a 3×3 grid with a reflected seam (9 vertices, 18 triangles).
pub fn klein_bottle() -> SimplicialSurface {
    let (m, n) = (3usize, 3usize);
    let id = |i: usize, j: usize| {
        let (i, j) = if j == n { ((m - i % m) % m, 0) } else { (i % m, j) };
        j * m + i
    };
    let mut tris = Vec::new();
    for j in 0..n {
        for i in 0..m {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    build(&tris)
}

fn build(tris: &[[usize; 3]]) -> SimplicialSurface {
    SimplicialSurface::from_triangles(tris).expect("bundled triangulation is a closed surface")
}

/// Every bundled mesh, keyed by its corpus file stem.
pub fn all() -> Vec<(&'static str, SimplicialSurface)> {
    vec![
        ("tetrahedron", tetrahedron()),
        ("octahedron", octahedron()),
        ("hexagonal-bipyramid", hexagonal_bipyramid()),
        ("projective-plane", projective_plane()),
        ("csaszar-torus", csaszar_torus()),
        ("klein-bottle", klein_bottle()),
        ("icosahedron", icosahedron()),
        ("genus-two", genus_two()),
        ("icosahedron-sub1", subdivided_icosahedron(1)),
        ("icosahedron-sub2", subdivided_icosahedron(2)),
        ("icosahedron-sub3", subdivided_icosahedron(3)),
        ("icosahedron-sub4", subdivided_icosahedron(4)),
    ]
}
