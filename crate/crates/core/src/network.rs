//! Network metrics over bilateral value-added flows, with DOT/GraphML
//! exports.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::forward::va_by_destination;
use crate::icio::IcioTable;
use crate::leontief::LeontiefError;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("power iteration did not converge")]
    NoConvergence,
    #[error("unknown graph format {0:?}")]
    UnknownFormat(String),
    #[error(transparent)]
    Leontief(#[from] LeontiefError),
}

/// Country-by-country bilateral value-added absorption matrix. The
/// diagonal is home absorption.
#[derive(Debug, Clone)]
pub struct FlowMatrix {
    pub nodes: Vec<String>,
    pub w: DMatrix<f64>,
}

pub fn bilateral_va_flows(table: &IcioTable) -> Result<FlowMatrix, LeontiefError> {
    Ok(FlowMatrix {
        nodes: table.countries().to_vec(),
        w: va_by_destination(table)?,
    })
}

/// As [`bilateral_va_flows`], reusing a coefficient system.
pub fn bilateral_va_flows_with(
    table: &IcioTable,
    sys: &crate::leontief::LeontiefSystem,
) -> Result<FlowMatrix, LeontiefError> {
    Ok(FlowMatrix {
        nodes: table.countries().to_vec(),
        w: crate::forward::va_by_destination_with(table, sys)?,
    })
}

#[derive(Debug, Clone)]
pub struct NodeMetrics {
    pub node: String,
    pub out_strength: f64,
    pub in_strength: f64,
    pub degree_out: usize,
    pub degree_in: usize,
    pub eigenvector_centrality: f64,
    /// Herfindahl concentration of outgoing partners; absent without any
    /// outgoing flow.
    pub partner_hhi: Option<f64>,
}

/// Strengths, degrees at a flow threshold, partner concentration, and
/// eigenvector centrality on the symmetrized off-diagonal matrix.
pub fn node_metrics(
    fm: &FlowMatrix,
    degree_threshold: f64,
) -> Result<Vec<NodeMetrics>, NetworkError> {
    let c = fm.nodes.len();
    let mut off = fm.w.clone();
    for i in 0..c {
        off[(i, i)] = 0.0;
    }
    let centrality = eigenvector_centrality(&off)?;
    let mut out = Vec::with_capacity(c);
    for s in 0..c {
        let out_strength: f64 = off.row(s).iter().sum();
        let in_strength: f64 = off.column(s).iter().sum();
        let degree_out = off.row(s).iter().filter(|&&w| w > degree_threshold).count();
        let degree_in = off
            .column(s)
            .iter()
            .filter(|&&w| w > degree_threshold)
            .count();
        let partner_hhi = (out_strength > 0.0).then(|| {
            off.row(s)
                .iter()
                .map(|w| (w / out_strength).powi(2))
                .sum::<f64>()
        });
        out.push(NodeMetrics {
            node: fm.nodes[s].clone(),
            out_strength,
            in_strength,
            degree_out,
            degree_in,
            eigenvector_centrality: centrality[s],
            partner_hhi,
        });
    }
    Ok(out)
}

/// Dominant eigenvector of (W + W')/2, unit Euclidean norm, nonnegative.
/// Uniform when all off-diagonal mass is zero.
fn eigenvector_centrality(off: &DMatrix<f64>) -> Result<DVector<f64>, NetworkError> {
    let c = off.nrows();
    let sym = (off + off.transpose()) * 0.5;
    let uniform = DVector::from_element(c, 1.0 / (c as f64).sqrt());
    if sym.iter().all(|&w| w == 0.0) {
        return Ok(uniform);
    }
    // Shift by the largest row sum so the dominant eigenvalue is unique
    // and positive; bipartite structures otherwise make the iteration
    // oscillate. The eigenvectors are unchanged.
    let shift = (0..c)
        .map(|i| sym.row(i).iter().sum::<f64>())
        .fold(0.0f64, f64::max);
    let sym = sym + DMatrix::identity(c, c) * shift;
    let mut v = uniform;
    for _ in 0..1000 {
        let next = &sym * &v;
        let norm = next.norm();
        if norm == 0.0 {
            return Err(NetworkError::NoConvergence);
        }
        let next = next / norm;
        let delta = (&next - &v).amax();
        v = next;
        if delta < 1e-10 {
            return Ok(v);
        }
    }
    Err(NetworkError::NoConvergence)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    GraphMl,
}

impl std::str::FromStr for GraphFormat {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, NetworkError> {
        match s {
            "dot" => Ok(GraphFormat::Dot),
            "graphml" => Ok(GraphFormat::GraphMl),
            other => Err(NetworkError::UnknownFormat(other.to_string())),
        }
    }
}

/// Serialize the flow network as a directed weighted graph. Edges below
/// `min_edge` are dropped; nodes and edges are emitted in ascending code
/// order.
pub fn export_graph(fm: &FlowMatrix, format: GraphFormat, min_edge: f64) -> String {
    let c = fm.nodes.len();
    let mut order: Vec<usize> = (0..c).collect();
    order.sort_by(|&a, &b| fm.nodes[a].cmp(&fm.nodes[b]));
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for &s in &order {
        for &r in &order {
            if s != r && fm.w[(s, r)] >= min_edge {
                edges.push((s, r, fm.w[(s, r)]));
            }
        }
    }
    match format {
        GraphFormat::Dot => {
            let mut doc = String::from("digraph va_flows {\n");
            for &i in &order {
                doc.push_str(&format!("  \"{}\";\n", fm.nodes[i]));
            }
            for (s, r, w) in edges {
                doc.push_str(&format!(
                    "  \"{}\" -> \"{}\" [label=\"{:.4}\"];\n",
                    fm.nodes[s], fm.nodes[r], w
                ));
            }
            doc.push_str("}\n");
            doc
        }
        GraphFormat::GraphMl => {
            let mut doc = String::from(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
                 <graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n\
                 <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n\
                 <graph edgedefault=\"directed\">\n",
            );
            for &i in &order {
                doc.push_str(&format!("<node id=\"{}\"/>\n", fm.nodes[i]));
            }
            for (s, r, w) in edges {
                doc.push_str(&format!(
                    "<edge source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data></edge>\n",
                    fm.nodes[s], fm.nodes[r], w
                ));
            }
            doc.push_str("</graph>\n</graphml>\n");
            doc
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_abs_diff_eq;

    fn flow(nodes: &[&str], w: DMatrix<f64>) -> FlowMatrix {
        FlowMatrix {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            w,
        }
    }

    #[test]
    fn e2_bilateral_flows() {
        let fm = bilateral_va_flows(&fixtures::e2()).unwrap();
        assert_abs_diff_eq!(fm.w[(0, 0)], 46.454545454545, epsilon = 1e-9);
        assert_abs_diff_eq!(fm.w[(0, 1)], 23.545454545455, epsilon = 1e-9);
        assert_abs_diff_eq!(fm.w[(1, 0)], 18.545454545455, epsilon = 1e-9);
        assert_abs_diff_eq!(fm.w[(1, 1)], 41.454545454545, epsilon = 1e-9);
    }

    #[test]
    fn symmetric_two_node_centrality() {
        let fm = flow(
            &["A", "B"],
            DMatrix::from_row_slice(2, 2, &[0.0, 10.0, 10.0, 0.0]),
        );
        let m = node_metrics(&fm, 0.0).unwrap();
        assert_abs_diff_eq!(m[0].eigenvector_centrality, 0.5f64.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(m[1].eigenvector_centrality, 0.5f64.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(m[0].partner_hhi.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn star_centrality() {
        // Hub exchanges 10 with each leaf; leaves unconnected.
        let w = DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 10.0, 10.0, 10.0, 0.0, 0.0, 10.0, 0.0, 0.0],
        );
        let m = node_metrics(&flow(&["H", "L1", "L2"], w), 0.0).unwrap();
        assert_abs_diff_eq!(m[0].eigenvector_centrality, 0.5f64.sqrt(), epsilon = 1e-8);
        assert_abs_diff_eq!(m[1].eigenvector_centrality, 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(m[2].eigenvector_centrality, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn single_country_metrics() {
        let fm = bilateral_va_flows(&fixtures::aut()).unwrap();
        let m = node_metrics(&fm, 0.0).unwrap();
        assert_eq!(m[0].out_strength, 0.0);
        assert!(m[0].partner_hhi.is_none());
        assert_abs_diff_eq!(m[0].eigenvector_centrality, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn strength_balance() {
        let fm = bilateral_va_flows(&fixtures::e2()).unwrap();
        let m = node_metrics(&fm, 0.0).unwrap();
        let out: f64 = m.iter().map(|n| n.out_strength).sum();
        let inn: f64 = m.iter().map(|n| n.in_strength).sum();
        assert_abs_diff_eq!(out, inn, epsilon = 1e-9);
    }

    #[test]
    fn dot_export_contains_edge() {
        let fm = bilateral_va_flows(&fixtures::e2()).unwrap();
        let doc = export_graph(&fm, GraphFormat::Dot, 0.0);
        assert!(doc.contains("\"A\" -> \"B\" [label=\"23.5455\"]"));
    }

    #[test]
    fn graphml_threshold_drops_edges() {
        let fm = bilateral_va_flows(&fixtures::e2()).unwrap();
        let doc = export_graph(&fm, GraphFormat::GraphMl, 100.0);
        assert_eq!(doc.matches("<node").count(), 2);
        assert_eq!(doc.matches("<edge").count(), 0);
    }

    #[test]
    fn unknown_format_rejected() {
        let err = "gexf".parse::<GraphFormat>().unwrap_err();
        assert!(matches!(err, NetworkError::UnknownFormat(_)));
    }
}
