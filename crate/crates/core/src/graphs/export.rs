use std::fmt::Write as _;

use serde::Serialize;

use super::{A2AEdge, A2AMultigraph, Metric};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActivityNode<'a> {
    pub activity: &'a str,
    pub count: u64,
}

#[derive(Serialize)]
struct A2AJson<'a> {
    nodes: Vec<ActivityNode<'a>>,
    edges: &'a [A2AEdge],
}

impl Serialize for A2AMultigraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        A2AJson {
            nodes: self
                .nodes
                .iter()
                .map(|(a, &count)| ActivityNode {
                    activity: a.as_str(),
                    count,
                })
                .collect(),
            edges: &self.edges,
        }
        .serialize(serializer)
    }
}

/// `{"nodes":[{"activity","count"}],"edges":[{"class","source","target",
/// "count","weight","weightNorm","perf"}]}` with nodes sorted by activity and
/// edges by (class, source, target).
pub fn a2a_json(graph: &A2AMultigraph) -> String {
    serde_json::to_string(graph).expect("A2A graphs always serialize")
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz rendering. Nodes are shaded darker the more often the activity
/// occurs; edges are labelled `class (value)` and their pen width grows
/// with the selected metric.
pub fn to_dot(graph: &A2AMultigraph, metric: Metric) -> String {
    let mut out = String::from("digraph a2a {\n");
    out.push_str("    rankdir=TB;\n");
    out.push_str("    node [shape=box, style=\"rounded,filled\", fontname=\"Helvetica\"];\n");
    out.push_str("    edge [fontname=\"Helvetica\", fontsize=10];\n");

    let max_count = graph.nodes.values().copied().max().unwrap_or(0).max(1);
    for (activity, &count) in &graph.nodes {
        // gray90 for the rarest activity down to gray20 for the most frequent.
        let shade = 90 - (70 * count / max_count);
        let font = if shade < 50 { "white" } else { "black" };
        let _ = writeln!(
            out,
            "    {} [label={}, fillcolor=gray{shade}, fontcolor={font}];",
            quote(activity.as_str()),
            quote(&format!("{activity} ({count})")),
        );
    }

    let max_value = graph
        .edges
        .iter()
        .map(|e| metric.value(e))
        .fold(0.0_f64, f64::max);
    for e in &graph.edges {
        let value = metric.value(e);
        let scale = if max_value > 0.0 { value / max_value } else { 0.0 };
        let _ = writeln!(
            out,
            "    {} -> {} [label={}, penwidth={:.2}];",
            quote(e.source.as_str()),
            quote(e.target.as_str()),
            quote(&format!("{} ({})", e.class, metric.format(value))),
            1.0 + 4.0 * scale,
        );
    }
    out.push_str("}\n");
    out
}
