use fracflow::grid::{Axis, GridDims};
use fracflow::microstructure::{
    gen_capsules, gen_laminate, gen_sphere, gen_sphere_pack, read_voxel, write_phase_map,
    CapsuleSpec, PhaseMap, SpherePackSpec,
};
use proptest::prelude::*;

fn count_fraction(map: &PhaseMap, phase: u8) -> f64 {
    map.ids().iter().filter(|&&p| p == phase).count() as f64 / map.ids().len() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sphere_is_periodic(
        n in (4usize..20, 4usize..20, 4usize..20),
        c in prop::array::uniform3(0.0f64..20.0),
        shift in prop::array::uniform3(-2i32..=2),
        diameter in 0.0f64..4.0,
    ) {
        let d = GridDims::new(n.0, n.1, n.2).unwrap();
        let shape = d.shape();
        let moved: [f64; 3] = std::array::from_fn(|a| c[a] + f64::from(shift[a]) * shape[a] as f64);
        let a = gen_sphere(d, c, diameter, (0, 1)).unwrap();
        let b = gen_sphere(d, moved, diameter, (0, 1)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn packs_are_pure_functions_of_their_seed(seed in any::<u64>(), count in 1usize..12, threads in 1usize..4) {
        let d = GridDims::cubic(16).unwrap();
        let spec = SpherePackSpec::count(count, 4.0, seed);
        let a = gen_sphere_pack(d, &spec).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let b = pool.install(|| gen_sphere_pack(d, &spec)).unwrap();
        prop_assert_eq!(&a.map, &b.map);
        prop_assert_eq!(&a.centers, &b.centers);
        prop_assert_eq!(a.porosity, count_fraction(&a.map, 1));
    }

    #[test]
    fn capsules_are_pure_functions_of_their_seed(seed in any::<u64>(), count in 0usize..8) {
        let d = GridDims::cubic(16).unwrap();
        let spec = CapsuleSpec {
            count,
            diameter: 2.0,
            aspect_ratio: 5.0,
            axis_weights: [0.6, 0.3, 0.1],
            seed,
            phases: (0, 1),
        };
        let a = gen_capsules(d, &spec).unwrap();
        let b = gen_capsules(d, &spec).unwrap();
        prop_assert_eq!(&a.map, &b.map);
        prop_assert_eq!(a.fraction, count_fraction(&a.map, 1));
        for cap in &a.capsules {
            let len: f64 = cap.axis.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((len - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn laminate_layers_cover_the_axis(split in 1usize..15) {
        let d = GridDims::new(16, 3, 2).unwrap();
        let map = gen_laminate(d, Axis::X, &[(split, 0), (16 - split, 1)]).unwrap();
        prop_assert_eq!(count_fraction(&map, 0), split as f64 / 16.0);
        let mut buf = Vec::new();
        write_phase_map(&mut buf, &map).unwrap();
        prop_assert_eq!(read_voxel(&buf[..]).unwrap().into_phase_map().unwrap(), map);
    }
}
