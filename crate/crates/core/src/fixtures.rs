//! Small reference meshes: the octahedron, its midpoint subdivisions, and
//! periodic (toroidal) grids, used by the tests.

use std::collections::HashMap;

use crate::triangulation::{ExplicitTriangulation, Triangulation};

/// Octahedron with vertex 0 at the bottom, 1..=4 on the equator, 5 on top.
pub fn octahedron() -> ExplicitTriangulation {
    let points = vec![
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
        [0.0, 0.0, 1.0],
    ];
    let cells = [
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 1],
        [5, 1, 2],
        [5, 2, 3],
        [5, 3, 4],
        [5, 4, 1],
    ];
    ExplicitTriangulation::new(points, cells).expect("valid octahedron")
}

/// Splits every triangle into four through edge midpoints (projected back
/// onto the unit sphere). Original vertices keep their ids.
pub fn subdivide(mesh: &ExplicitTriangulation) -> ExplicitTriangulation {
    assert_eq!(mesh.dimension(), 2, "subdivision is defined for surfaces");
    let mut points = mesh.points().to_vec();
    let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mid = |a: usize, b: usize, points: &mut Vec<[f64; 3]>| {
        let key = (a.min(b), a.max(b));
        *midpoint.entry(key).or_insert_with(|| {
            let (p, q) = (points[a], points[b]);
            let m = [
                (p[0] + q[0]) / 2.0,
                (p[1] + q[1]) / 2.0,
                (p[2] + q[2]) / 2.0,
            ];
            let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
            points.push(if n > 0.0 { m.map(|x| x / n) } else { m });
            points.len() - 1
        })
    };
    let mut cells = Vec::new();
    for c in 0..mesh.cell_count() {
        let [a, b, cc] = [mesh.cell(c)[0], mesh.cell(c)[1], mesh.cell(c)[2]];
        let ab = mid(a, b, &mut points);
        let bc = mid(b, cc, &mut points);
        let ca = mid(cc, a, &mut points);
        cells.push([a, ab, ca]);
        cells.push([b, bc, ab]);
        cells.push([cc, ca, bc]);
        cells.push([ab, bc, ca]);
    }
    ExplicitTriangulation::new(points, cells).expect("subdivision stays valid")
}

/// Octahedron subdivided `levels` times.
pub fn subdivided_octahedron(levels: usize) -> ExplicitTriangulation {
    (0..levels).fold(octahedron(), |m, _| subdivide(&m))
}

/// Kuhn-triangulated grid with periodic identification on every axis: a
/// closed torus (2 axes) or 3-torus (3 axes). Needs at least 3 vertices per
/// axis.
pub fn periodic_grid(dims: &[usize]) -> ExplicitTriangulation {
    assert!((2..=3).contains(&dims.len()) && dims.iter().all(|&n| n >= 3));
    let d = dims.len();
    let mut full = [1usize; 3];
    full[..d].copy_from_slice(dims);
    let id = |c: [usize; 3]| c[0] + full[0] * (c[1] + full[1] * c[2]);
    let total: usize = full.iter().product();
    let points: Vec<[f64; 3]> = (0..total)
        .map(|v| {
            let c = [
                v % full[0],
                (v / full[0]) % full[1],
                v / (full[0] * full[1]),
            ];
            c.map(|x| x as f64)
        })
        .collect();
    let perms: Vec<Vec<usize>> = if d == 2 {
        vec![vec![0, 1], vec![1, 0]]
    } else {
        vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0],
        ]
    };
    let mut cells = Vec::new();
    for v in 0..total {
        let anchor = [
            v % full[0],
            (v / full[0]) % full[1],
            v / (full[0] * full[1]),
        ];
        for perm in &perms {
            let mut c = anchor;
            let mut cell = vec![id(c)];
            for &axis in perm {
                c[axis] = (c[axis] + 1) % full[axis];
                cell.push(id(c));
            }
            cells.push(cell);
        }
    }
    ExplicitTriangulation::new(points, cells).expect("periodic grid is a valid complex")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subdivision_sizes() {
        let mut m1 = subdivided_octahedron(1);
        let mut m2 = subdivided_octahedron(2);
        m1.precondition_all();
        m2.precondition_all();
        assert_eq!(m1.vertex_count(), 18);
        assert_eq!(m1.simplex_count(2).unwrap(), 32);
        assert_eq!(m2.vertex_count(), 66);
        assert_eq!(m2.simplex_count(2).unwrap(), 128);
        assert_eq!(m1.euler_characteristic().unwrap(), 2);
        assert_eq!(m2.euler_characteristic().unwrap(), 2);
        assert!(m2.is_closed().unwrap());
        assert!(m2.validate_pseudo_manifold().is_empty());
    }

    #[test]
    fn periodic_grids_are_closed_tori() {
        let mut t2 = periodic_grid(&[4, 3]);
        t2.precondition_all();
        assert_eq!(t2.euler_characteristic().unwrap(), 0);
        assert!(t2.is_closed().unwrap());
        let mut t3 = periodic_grid(&[3, 3, 3]);
        t3.precondition_all();
        assert_eq!(t3.simplex_count(3).unwrap(), 6 * 27);
        assert_eq!(t3.euler_characteristic().unwrap(), 0);
        assert!(t3.is_closed().unwrap());
        assert!(t3.validate_pseudo_manifold().is_empty());
    }
}
