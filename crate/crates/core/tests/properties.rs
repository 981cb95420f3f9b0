use std::sync::Arc;

use dgpl_core::forms::{assemble_energy_matrix, assemble_graddiv, assemble_jh_flux, assemble_sip};
use dgpl_core::mesh::{
    build_facet_topology, build_structured_quad_mesh, build_structured_triangle_mesh, load_mesh, write_mesh, BoundingBox, CellKind, Mesh,
};
use dgpl_core::spaces::{build_space, Family, SpaceConfig};
use proptest::prelude::*;

fn structured(kind: CellKind, n: usize, bbox: BoundingBox) -> Mesh {
    match kind {
        CellKind::Triangle => build_structured_triangle_mesh(n, bbox).unwrap(),
        CellKind::Quadrilateral => build_structured_quad_mesh(n, bbox).unwrap(),
    }
}

fn kind_strategy() -> impl Strategy<Value = CellKind> {
    prop_oneof![Just(CellKind::Triangle), Just(CellKind::Quadrilateral)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mesh_text_roundtrip(
        kind in kind_strategy(),
        n in 1usize..7,
        x0 in -10.0f64..10.0,
        y0 in -10.0f64..10.0,
        w in 0.01f64..20.0,
        h in 0.01f64..20.0,
    ) {
        let mesh = structured(kind, n, BoundingBox::new([x0, y0], [x0 + w, y0 + h]));
        let back = load_mesh(&write_mesh(&mesh)).unwrap();
        prop_assert_eq!(back, mesh);
    }

    #[test]
    fn penalty_forms_symmetric_and_nonnegative(
        kind in kind_strategy(),
        k in 1usize..4,
        seed in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let mesh = Arc::new(structured(kind, 2, BoundingBox::unit_square()));
        let topo = build_facet_topology(&mesh).unwrap();
        let v = build_space(&mesh, SpaceConfig::new(Family::dg_vector(kind), k)).unwrap();
        let field = |shift: usize| -> Vec<f64> {
            (0..v.dim()).map(|i| seed[(i * 7 + shift) % seed.len()] * (1.0 + (i % 5) as f64)).collect()
        };
        let (x, y) = (field(0), field(13));
        let sigma = 4.0 * (k * k) as f64;
        let sip = assemble_sip(&v, &topo, sigma);
        let scale = sip.bilinear(&x, &x).abs() + sip.bilinear(&y, &y).abs() + 1.0;
        prop_assert!((sip.bilinear(&x, &y) - sip.bilinear(&y, &x)).abs() <= 1e-11 * scale);
        prop_assert!(assemble_jh_flux(&v, &topo).bilinear(&x, &x) >= -1e-12);
        prop_assert!(assemble_graddiv(&v).bilinear(&x, &x) >= -1e-12);
        prop_assert!(assemble_energy_matrix(&v, &topo, sigma).bilinear(&x, &x) > 0.0);
    }
}
