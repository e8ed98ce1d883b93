//! Complex exports: OFF-style facet list and a flat simplex CSV.

use std::fmt::Write as _;

use super::SimplicialComplex;
use crate::format_real;

/// OFF-style listing: vertex coordinates (padded or cut to three) followed by
/// one line `k v_0 ... v_{k-1}` per facet. Vertices without coordinates are
/// placed at the origin.
pub fn complex_off(complex: &SimplicialComplex, coords: Option<&[Vec<f64>]>) -> String {
    let facets = complex.facets();
    let mut out = String::from("OFF\n");
    let _ = writeln!(out, "{} {} 0", complex.vertex_count(), facets.len());
    for v in 0..complex.vertex_count() {
        let point = coords.and_then(|c| c.get(v));
        let xyz: Vec<String> = (0..3)
            .map(|k| format_real(point.and_then(|p| p.get(k)).copied().unwrap_or(0.0)))
            .collect();
        let _ = writeln!(out, "{}", xyz.join(" "));
    }
    for facet in facets {
        let ids: Vec<String> = facet.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{} {}", facet.len(), ids.join(" "));
    }
    out
}

/// CSV with one simplex per row: `dim,vertices...`.
pub fn complex_csv(complex: &SimplicialComplex) -> String {
    let mut out = String::from("dim,vertices\n");
    for d in 0..=complex.max_dim() {
        for s in complex.simplices(d) {
            let ids: Vec<String> = s.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{d},{}", ids.join(","));
        }
    }
    out
}

/// Barycentres of poset elements, for drawing an order complex.
pub fn element_barycentres(elements: &[Vec<usize>], coords: &[Vec<f64>]) -> Vec<Vec<f64>> {
    elements
        .iter()
        .map(|members| {
            let dim = coords.first().map_or(0, Vec::len);
            let mut centre = vec![0.0; dim];
            for &m in members {
                for (c, x) in centre.iter_mut().zip(&coords[m]) {
                    *c += x;
                }
            }
            centre.iter_mut().for_each(|c| *c /= members.len() as f64);
            centre
        })
        .collect()
}
