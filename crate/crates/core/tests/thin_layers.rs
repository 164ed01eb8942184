//! One-voxel laminate layers: the weak layer alone carries the crack.

use fracflow::microstructure::{gen_laminate, phases_to_gamma};
use fracflow::oracle::{pdhg_solve, PdhgConfig};
use fracflow::solver::solve;
use fracflow::{Axis, Direction, GammaTable, GridDims, SolverConfig};

fn alternating(n: usize) -> fracflow::ScalarField {
    let layers: Vec<(usize, u8)> = (0..n).map(|i| (1, (i % 2) as u8)).collect();
    let map = gen_laminate(GridDims::cubic(n).unwrap(), Axis::X, &layers).unwrap();
    phases_to_gamma(&map, &"0=1,1=10".parse::<GammaTable>().unwrap()).unwrap()
}

#[test]
fn normal_crack_costs_the_weak_layer() {
    let gamma = alternating(8);
    let dir = Direction::axis(Axis::X);
    let cfg = SolverConfig {
        tol: 1e-6,
        ..Default::default()
    };
    let admm = solve(&gamma, &dir, &cfg).unwrap();
    let pdhg = pdhg_solve(&gamma, &dir, &PdhgConfig::balanced(&gamma)).unwrap();
    assert!((pdhg.gamma_eff - 1.0).abs() < 1e-6, "{}", pdhg.gamma_eff);
    assert!((admm.gamma_eff - 1.0).abs() < 1e-5, "{}", admm.gamma_eff);
}

#[test]
fn tangential_crack_costs_the_mean() {
    let gamma = alternating(8);
    let dir = Direction::axis(Axis::Y);
    let admm = solve(&gamma, &dir, &SolverConfig { tol: 1e-6, ..Default::default() }).unwrap();
    let pdhg = pdhg_solve(&gamma, &dir, &PdhgConfig::balanced(&gamma)).unwrap();
    assert!((pdhg.gamma_eff - 5.5).abs() < 1e-6, "{}", pdhg.gamma_eff);
    assert!((admm.gamma_eff - 5.5).abs() < 1e-4, "{}", admm.gamma_eff);
}
