#![allow(dead_code)]

use std::sync::Arc;

use phiconv::{GroundSet, NormKind, PhiSpace, PhiVector, PointSubset};
use proptest::prelude::*;

/// Values on a 1/8 lattice: exact in binary, so ties are real ties.
pub fn lattice(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (lo * 8..=hi * 8).prop_map(|k| f64::from(k) / 8.0)
}

pub fn unit_coeff() -> impl Strategy<Value = f64> {
    -1.0f64..1.0
}

pub fn line(n: usize) -> Arc<GroundSet> {
    Arc::new(GroundSet::euclidean((0..n).map(|i| vec![i as f64]).collect()).unwrap())
}

/// A `Table` span of `m` random rows on `n` points of the line.
pub fn table_space(n: usize, m: usize, norm: NormKind) -> impl Strategy<Value = PhiSpace> {
    proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, n), m)
        .prop_map(move |rows| PhiSpace::new(line(n), rows, norm).unwrap())
}

/// Like [`table_space`] but with a row of ones prepended.
pub fn table_space_with_constants(n: usize, m: usize) -> impl Strategy<Value = PhiSpace> {
    table_space(n, m, NormKind::SupOnK).prop_map(|s| s.with_constants().unwrap())
}

pub fn subset_of(n: usize) -> impl Strategy<Value = PointSubset> {
    proptest::collection::vec(any::<bool>(), n).prop_filter_map("nonempty", move |mask| {
        let ids: Vec<usize> = (0..n).filter(|&i| mask[i]).collect();
        (!ids.is_empty()).then(|| PointSubset::new(n, ids).unwrap())
    })
}

pub fn coeffs(m: usize) -> impl Strategy<Value = PhiVector> {
    proptest::collection::vec(-3.0f64..3.0, m).prop_map(PhiVector)
}

/// Integer grid `[-r, r]²`, row by row.
pub fn integer_grid(r: i32) -> Vec<[f64; 2]> {
    let mut pts = Vec::new();
    for i in -r..=r {
        for j in -r..=r {
            pts.push([f64::from(i), f64::from(j)]);
        }
    }
    pts
}

pub fn planar_ground(points: &[[f64; 2]]) -> Arc<GroundSet> {
    Arc::new(GroundSet::euclidean(points.iter().map(|p| p.to_vec()).collect()).unwrap())
}
