//! Directed causal graphs: node naming, edge sets, transitive closure, and
//! DOT export.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(usize),
    #[error("node index {0} out of range for {1} nodes")]
    NodeOutOfRange(usize, usize),
}

/// A directed graph over named nodes. Edge iteration order is deterministic
/// (sorted by `(source, target)` index).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CausalGraph {
    node_names: Vec<String>,
    edges: BTreeSet<(usize, usize)>,
}

impl CausalGraph {
    pub fn new(node_names: Vec<String>) -> Self {
        Self {
            node_names,
            edges: BTreeSet::new(),
        }
    }

    pub fn with_edges(
        node_names: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::new(node_names);
        for (s, t) in edges {
            g.add_edge(s, t)?;
        }
        Ok(g)
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn num_nodes(&self) -> usize {
        self.node_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, source: usize, target: usize) -> Result<(), GraphError> {
        let n = self.node_names.len();
        if source >= n {
            return Err(GraphError::NodeOutOfRange(source, n));
        }
        if target >= n {
            return Err(GraphError::NodeOutOfRange(target, n));
        }
        if source == target {
            return Err(GraphError::SelfLoop(source));
        }
        self.edges.insert((source, target));
        Ok(())
    }

    pub fn has_edge(&self, source: usize, target: usize) -> bool {
        self.edges.contains(&(source, target))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    /// Incoming-edge sources of `node`.
    pub fn parents(&self, node: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|&&(_, t)| t == node)
            .map(|&(s, _)| s)
            .collect()
    }

    /// Graph with an edge `u -> v` whenever a directed path from `u` to `v`
    /// exists. Idempotent.
    pub fn transitive_closure(&self) -> CausalGraph {
        let n = self.num_nodes();
        let mut adjacency = vec![Vec::new(); n];
        for &(s, t) in &self.edges {
            adjacency[s].push(t);
        }
        let mut closed = CausalGraph::new(self.node_names.clone());
        for start in 0..n {
            // DFS from start
            let mut seen = vec![false; n];
            let mut stack = adjacency[start].clone();
            while let Some(v) = stack.pop() {
                if seen[v] {
                    continue;
                }
                seen[v] = true;
                stack.extend(adjacency[v].iter().copied());
            }
            for (v, &reached) in seen.iter().enumerate() {
                if reached && v != start {
                    closed.edges.insert((start, v));
                }
            }
        }
        closed
    }

    /// True when the edge relation has no directed cycle.
    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Kahn's algorithm; `None` when the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.num_nodes();
        let mut indegree = vec![0usize; n];
        let mut adjacency = vec![Vec::new(); n];
        for &(s, t) in &self.edges {
            indegree[t] += 1;
            adjacency[s].push(t);
        }
        let mut ready: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        ready.sort_unstable();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &t in &adjacency[v] {
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    ready.push(t);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Renders the graph in DOT syntax (a `digraph` with quoted node names).
    pub fn to_dot(&self) -> String {
        let escape = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
        let mut out = String::from("digraph causal {\n");
        for name in &self.node_names {
            out.push_str(&format!("  \"{}\";\n", escape(name)));
        }
        for &(s, t) in &self.edges {
            out.push_str(&format!(
                "  \"{}\" -> \"{}\";\n",
                escape(&self.node_names[s]),
                escape(&self.node_names[t])
            ));
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("X{i}")).collect()
    }

    #[test]
    fn self_loops_and_bad_indices_are_rejected() {
        let mut g = CausalGraph::new(names(3));
        assert_eq!(g.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
        assert_eq!(g.add_edge(0, 3), Err(GraphError::NodeOutOfRange(3, 3)));
        assert!(g.add_edge(0, 1).is_ok());
    }

    #[test]
    fn closure_of_chain_adds_shortcut() {
        let g = CausalGraph::with_edges(names(3), [(0, 1), (1, 2)]).unwrap();
        let closed = g.transitive_closure();
        let expected: BTreeSet<_> = [(0, 1), (1, 2), (0, 2)].into_iter().collect();
        assert_eq!(closed.edge_set(), &expected);
    }

    #[test]
    fn closure_is_idempotent() {
        let g = CausalGraph::with_edges(names(5), [(0, 1), (1, 2), (3, 2), (1, 4)]).unwrap();
        let once = g.transitive_closure();
        let twice = once.transitive_closure();
        assert_eq!(once, twice);
    }

    #[test]
    fn empty_graph_closure_is_empty() {
        let g = CausalGraph::new(names(4));
        assert_eq!(g.transitive_closure().num_edges(), 0);
    }

    #[test]
    fn acyclicity_detection() {
        let dag = CausalGraph::with_edges(names(3), [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(dag.is_acyclic());
        let cyclic = CausalGraph::with_edges(names(3), [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!cyclic.is_acyclic());
    }

    #[test]
    fn dot_output_is_wellformed() {
        let g = CausalGraph::with_edges(names(2), [(0, 1)]).unwrap();
        let dot = g.to_dot();
        assert!(dot.starts_with("digraph causal {"));
        assert!(dot.contains("\"X1\" -> \"X2\";"));
        assert!(dot.trim_end().ends_with('}'));
        // every non-brace line ends with a semicolon
        for line in dot.lines().filter(|l| !l.contains('{') && !l.contains('}')) {
            assert!(line.trim_end().ends_with(';'), "bad DOT line: {line}");
        }
    }
}
