//! Poset exports: DOT digraph of the covering relation and a flat CSV.

use std::fmt::Write as _;

use super::HyperLevel;
use crate::format_real;

fn label(members: &[usize]) -> String {
    let inner: Vec<String> = members.iter().map(usize::to_string).collect();
    format!("[{}]", inner.join(","))
}

/// DOT digraph with an edge `C -> D` whenever `D` covers `C`.
pub fn poset_dot(level: &HyperLevel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph hyperlevel_{} {{", level.index());
    let _ = writeln!(out, "  rankdir=BT;");
    for (id, members) in level.elements().iter().enumerate() {
        let _ = writeln!(out, "  e{id} [label=\"{}\"];", label(members));
    }
    for id in 0..level.len() {
        for &up in level.upper_covers(id) {
            let _ = writeln!(out, "  e{id} -> e{up};");
        }
    }
    out.push_str("}\n");
    out
}

/// CSV `element_id,cardinality,diameter,members`, members separated by `;`.
pub fn poset_csv(level: &HyperLevel) -> String {
    let mut out = String::from("element_id,cardinality,diameter,members\n");
    for (id, members) in level.elements().iter().enumerate() {
        let joined: Vec<String> = members.iter().map(usize::to_string).collect();
        let _ = writeln!(
            out,
            "{id},{},{},{}",
            members.len(),
            format_real(level.diameters()[id]),
            joined.join(";")
        );
    }
    out
}
