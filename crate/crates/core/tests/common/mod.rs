#![allow(dead_code)]

use std::sync::OnceLock;

use helicoid_core::scalar::cx;
use helicoid_core::solver::{solve_full, DEFAULT_TARGETS};
use helicoid_core::{Complex, Params, Solution, SolverConfig};

pub fn solution() -> &'static Solution {
    static SOL: OnceLock<Solution> = OnceLock::new();
    SOL.get_or_init(|| solve_full(DEFAULT_TARGETS, (0.2, 0.45), &SolverConfig::default()).expect("solve"))
}

pub fn solved() -> Params {
    solution().params
}

pub fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

pub fn norm(a: [f64; 3]) -> f64 {
    dist(a, [0.0; 3])
}

/// A polyline from the origin that walks the lattice edges given by
/// `word` (0..4 picks `e1, −e1, e2, −e2`) with jittered midpoints, then
/// goes to `target`. The edges stay clear of the end at the half-lattice
/// corners.
pub fn lattice_walk(e1: Complex, e2: Complex, word: &[(usize, f64, f64)], target: Complex) -> Vec<Complex> {
    let mut at = cx(0.0, 0.0);
    let mut path = Vec::new();
    for &(k, s, t) in word {
        let step = [e1, -e1, e2, -e2][k % 4];
        path.push(at + step * 0.5 + (e1 * s + e2 * t) * 0.1);
        at = at + step;
        path.push(at);
    }
    path.push(at + target);
    path
}
