use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unitopo::fixtures::{periodic_grid, subdivided_octahedron};
use unitopo::gradient::{
    build_gradient, enforce_pl_compliance, find_cycle, match_pl, DiscreteGradient,
};
use unitopo::scalar::{count_by_index, extract_critical_points, PlCriticalPoint};
use unitopo::triangulation::{ImplicitGrid, Mesh, SimplexRef, Triangulation};
use unitopo::OrderField;

fn random_field(n: usize, rng: &mut ChaCha8Rng) -> OrderField {
    OrderField::from_values((0..n).map(|_| rng.gen::<f64>()).collect()).unwrap()
}

fn star_has_critical(t: &impl Triangulation, g: &DiscreteGradient, p: &PlCriticalPoint) -> bool {
    if p.index == 0 {
        return g.is_critical(SimplexRef::vertex(p.vertex));
    }
    t.cofaces(SimplexRef::vertex(p.vertex), p.index)
        .unwrap()
        .into_iter()
        .any(|s| g.is_critical(s))
}

fn fixtures() -> Vec<(&'static str, Mesh)> {
    let mut out = vec![];
    for level in 0..3 {
        let mut m = subdivided_octahedron(level);
        m.precondition_all();
        out.push(("octahedron", Mesh::Explicit(m)));
    }
    let mut torus = periodic_grid(&[6, 5]);
    torus.precondition_all();
    out.push(("torus", Mesh::Explicit(torus)));
    let mut torus3 = periodic_grid(&[4, 4, 4]);
    torus3.precondition_all();
    out.push(("3-torus", Mesh::Explicit(torus3)));
    out.push((
        "grid 6^3",
        Mesh::Implicit(ImplicitGrid::new(&[6, 6, 6]).unwrap()),
    ));
    out.push((
        "grid 8x7",
        Mesh::Implicit(ImplicitGrid::new(&[8, 7]).unwrap()),
    ));
    out
}

#[test]
fn pl_matching_holds_for_interior_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, t) in fixtures() {
        for trial in 0..50 {
            let f = random_field(t.vertex_count(), &mut rng);
            let g = build_gradient(&t, &f).unwrap();
            for p in extract_critical_points(&t, &f).unwrap() {
                if !p.boundary {
                    assert!(star_has_critical(&t, &g, &p), "{name} trial {trial}: {p:?}");
                }
            }
        }
    }
}

#[test]
fn compliance_matches_pl_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, t) in fixtures() {
        let closed = t.is_closed().unwrap();
        let d = t.dimension();
        for trial in 0..50 {
            let f = random_field(t.vertex_count(), &mut rng);
            let mut g = build_gradient(&t, &f).unwrap();
            let pl = extract_critical_points(&t, &f).unwrap();
            let mut xi = match_pl(&t, &f, &g, &pl).unwrap();
            let report = enforce_pl_compliance(&t, &f, &mut g, &mut xi)
                .unwrap_or_else(|e| panic!("{name} trial {trial}: {e}"));
            assert!(report.residue.is_empty() || !closed);
            assert_eq!(g.morse_sum(), t.euler_characteristic().unwrap());
            if closed {
                assert_eq!(
                    g.critical_counts(),
                    count_by_index(&pl, d),
                    "{name} trial {trial}"
                );
            }
            if t.simplex_count(d).unwrap() <= 500 {
                assert!(find_cycle(&t, &g).unwrap().is_none());
            }
        }
    }
}
