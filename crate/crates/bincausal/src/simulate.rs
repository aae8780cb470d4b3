//! Bernoulli structural causal models: representation, forward sampling,
//! the 10-variable benchmark generator, and a plain-text model format.
//!
//! Each variable is the OR of its polarity-adjusted parents and an
//! independent Bernoulli noise term:
//! `X_j = (OR over parents i of (X_i if c_ij = 1 else NOT X_i)) OR N_j`,
//! and a parentless variable equals its noise.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dataset::BinaryDataset;
use crate::graph::CausalGraph;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("parent relation contains a cycle")]
    Cyclic,
    #[error("noise probability for variable {0} is {1}; must lie in [0, 1]")]
    NoiseOutOfRange(usize, f64),
    #[error("benchmark noise level must lie in (0, 1), got {0}")]
    BenchmarkNoiseOutOfRange(f64),
    #[error("variable index {0} out of range for {1} variables")]
    VariableOutOfRange(usize, usize),
    #[error("variable {0} lists itself as a parent")]
    SelfParent(usize),
    #[error("duplicate parent {parent} for variable {child}")]
    DuplicateParent { child: usize, parent: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("failed to read model file: {0}")]
    Io(String),
}

/// Whether a parent drives its child directly or through negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    /// Child follows the parent (`c = 1`).
    Positive,
    /// Child follows the negated parent (`c = 0`).
    Negative,
}

/// One parent edge of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParentEdge {
    pub parent: usize,
    pub polarity: Polarity,
}

/// A Bernoulli structural causal model over `d` binary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct BscmModel {
    names: Vec<String>,
    parents: Vec<Vec<ParentEdge>>,
    noise_p: Vec<f64>,
    topo_order: Vec<usize>,
}

impl BscmModel {
    /// Builds a model; the parent relation must form a DAG and noise
    /// probabilities must lie in `[0, 1]`.
    ///
    /// Direction identifiability additionally assumes noise strictly below
    /// 1, but saturated noise is accepted here so degenerate mechanisms can
    /// be expressed.
    pub fn new(
        names: Vec<String>,
        parents: Vec<Vec<ParentEdge>>,
        noise_p: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let d = names.len();
        assert_eq!(parents.len(), d, "one parent set per variable");
        assert_eq!(noise_p.len(), d, "one noise level per variable");
        for (j, &p) in noise_p.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(ModelError::NoiseOutOfRange(j, p));
            }
        }
        let mut graph = CausalGraph::new(names.clone());
        for (child, edges) in parents.iter().enumerate() {
            let mut seen = Vec::new();
            for e in edges {
                if e.parent >= d {
                    return Err(ModelError::VariableOutOfRange(e.parent, d));
                }
                if e.parent == child {
                    return Err(ModelError::SelfParent(child));
                }
                if seen.contains(&e.parent) {
                    return Err(ModelError::DuplicateParent {
                        child,
                        parent: e.parent,
                    });
                }
                seen.push(e.parent);
                graph.add_edge(e.parent, child).expect("validated above");
            }
        }
        // parents precede children, so forward evaluation is well defined
        let topo_order = graph.topological_order().ok_or(ModelError::Cyclic)?;
        Ok(Self {
            names,
            parents,
            noise_p,
            topo_order,
        })
    }

    pub fn d(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parents(&self) -> &[Vec<ParentEdge>] {
        &self.parents
    }

    pub fn noise_p(&self) -> &[f64] {
        &self.noise_p
    }

    /// Draws `n` rows by forward evaluation in topological order.
    ///
    /// Noise is sampled i.i.d. per row and per variable. Rows are generated
    /// from a single seeded stream in row-major order, so the first `k` rows
    /// of a larger sample equal a sample of size `k` with the same seed.
    pub fn sample(&self, n: usize, seed: u64) -> BinaryDataset {
        let d = self.d();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::with_capacity(n);
        let mut values = vec![0u8; d];
        for _ in 0..n {
            // draw the noise vector in variable order, then resolve
            let noise: Vec<u8> = self
                .noise_p
                .iter()
                .map(|&p| u8::from(rng.gen::<f64>() < p))
                .collect();
            for &j in &self.topo_order {
                let mut v = noise[j];
                for e in &self.parents[j] {
                    let pv = values[e.parent];
                    let contribution = match e.polarity {
                        Polarity::Positive => pv,
                        Polarity::Negative => 1 - pv,
                    };
                    v |= contribution;
                }
                values[j] = v;
            }
            rows.push(values.clone());
        }
        BinaryDataset::new(self.names.clone(), rows).expect("model produces valid rows")
    }

    /// Ground-truth graph: the parent relation for the directed task, its
    /// transitive closure for the transitive task.
    pub fn ground_truth(&self, task: crate::evaluate::Task) -> CausalGraph {
        let mut g = CausalGraph::new(self.names.clone());
        for (child, edges) in self.parents.iter().enumerate() {
            for e in edges {
                g.add_edge(e.parent, child).expect("model is validated");
            }
        }
        match task {
            crate::evaluate::Task::Directed => g,
            crate::evaluate::Task::Transitive => g.transitive_closure(),
        }
    }

    /// Serialises the model in the plain-text format of [`parse_model`].
    pub fn to_model_text(&self) -> String {
        let mut out = String::from("[variables]\n");
        for name in &self.names {
            let _ = writeln!(out, "{name}");
        }
        out.push_str("\n[edges]\n");
        for (child, edges) in self.parents.iter().enumerate() {
            for e in edges {
                let sign = match e.polarity {
                    Polarity::Positive => '+',
                    Polarity::Negative => '-',
                };
                let _ = writeln!(out, "{} {} {}", self.names[e.parent], self.names[child], sign);
            }
        }
        out.push_str("\n[noise]\n");
        for (j, p) in self.noise_p.iter().enumerate() {
            let _ = writeln!(out, "{} {}", self.names[j], p);
        }
        out
    }
}

/// The 10-variable benchmark model: seven root indicators plus
/// `X1 <- X2 OR X3`, `X4 <- X2 OR X5`, `X6 <- X1 OR X4`, every edge
/// positive, every variable sharing the noise level `p`.
pub fn benchmark_model(p: f64) -> Result<BscmModel, ModelError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(ModelError::BenchmarkNoiseOutOfRange(p));
    }
    let names: Vec<String> = (1..=10).map(|i| format!("X{i}")).collect();
    let mut parents: Vec<Vec<ParentEdge>> = vec![Vec::new(); 10];
    let pos = |parent: usize| ParentEdge {
        parent,
        polarity: Polarity::Positive,
    };
    parents[0] = vec![pos(1), pos(2)]; // X1 <- X2, X3
    parents[3] = vec![pos(1), pos(4)]; // X4 <- X2, X5
    parents[5] = vec![pos(0), pos(3)]; // X6 <- X1, X4
    BscmModel::new(names, parents, vec![p; 10])
}

/// Parses the plain-text model format.
///
/// Three sections introduced by `[variables]`, `[edges]` and `[noise]`.
/// Variables are whitespace-separated names (one or more per line). Edges
/// are `SRC DST POLARITY` with polarity `+`/`1` or `-`/`0`. Noise lines are
/// `NAME P` with `P` in `[0, 1]`; `* P` sets the default for variables
/// without an explicit entry (otherwise 0). `#` starts a comment.
pub fn parse_model(text: &str) -> Result<BscmModel, ModelError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Variables,
        Edges,
        Noise,
    }
    let mut section = Section::None;
    let mut names: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, usize, Polarity)> = Vec::new();
    let mut noise: Vec<Option<f64>> = Vec::new();
    let mut default_noise: Option<f64> = None;

    let lookup = |names: &[String], token: &str, line: usize| {
        names
            .iter()
            .position(|n| n == token)
            .ok_or(ModelError::Parse {
                line,
                message: format!("unknown variable {token:?}"),
            })
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "[variables]" => {
                section = Section::Variables;
                continue;
            }
            "[edges]" => {
                section = Section::Edges;
                continue;
            }
            "[noise]" => {
                section = Section::Noise;
                continue;
            }
            _ => {}
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::None => {
                return Err(ModelError::Parse {
                    line: line_no,
                    message: "content before any section header".into(),
                })
            }
            Section::Variables => {
                for t in tokens {
                    if names.iter().any(|n| n == t) {
                        return Err(ModelError::Parse {
                            line: line_no,
                            message: format!("duplicate variable {t:?}"),
                        });
                    }
                    names.push(t.to_string());
                    noise.push(None);
                }
            }
            Section::Edges => {
                if tokens.len() != 3 {
                    return Err(ModelError::Parse {
                        line: line_no,
                        message: format!(
                            "expected `SRC DST POLARITY`, got {} tokens",
                            tokens.len()
                        ),
                    });
                }
                let src = lookup(&names, tokens[0], line_no)?;
                let dst = lookup(&names, tokens[1], line_no)?;
                let polarity = match tokens[2] {
                    "+" | "1" => Polarity::Positive,
                    "-" | "0" => Polarity::Negative,
                    other => {
                        return Err(ModelError::Parse {
                            line: line_no,
                            message: format!("bad polarity {other:?}; use + or -"),
                        })
                    }
                };
                edges.push((src, dst, polarity));
            }
            Section::Noise => {
                if tokens.len() != 2 {
                    return Err(ModelError::Parse {
                        line: line_no,
                        message: format!("expected `NAME P`, got {} tokens", tokens.len()),
                    });
                }
                let p: f64 = tokens[1].parse().map_err(|_| ModelError::Parse {
                    line: line_no,
                    message: format!("bad probability {:?}", tokens[1]),
                })?;
                if tokens[0] == "*" {
                    default_noise = Some(p);
                } else {
                    let var = lookup(&names, tokens[0], line_no)?;
                    noise[var] = Some(p);
                }
            }
        }
    }

    if names.is_empty() {
        return Err(ModelError::Parse {
            line: 0,
            message: "model declares no variables".into(),
        });
    }
    let mut parents: Vec<Vec<ParentEdge>> = vec![Vec::new(); names.len()];
    for (src, dst, polarity) in edges {
        parents[dst].push(ParentEdge {
            parent: src,
            polarity,
        });
    }
    let noise_p: Vec<f64> = noise
        .into_iter()
        .map(|p| p.or(default_noise).unwrap_or(0.0))
        .collect();
    BscmModel::new(names, parents, noise_p)
}

/// Reads and parses a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<BscmModel, ModelError> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| ModelError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_model(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::{AlignedDataset, ValueAssignment};
    use crate::evaluate::Task;

    #[test]
    fn noiseless_parentless_model_is_all_zero() {
        let m = BscmModel::new(
            vec!["a".into(), "b".into()],
            vec![Vec::new(), Vec::new()],
            vec![0.0, 0.0],
        )
        .unwrap();
        let ds = m.sample(50, 7);
        assert!(ds.rows().iter().all(|r| r == &[0, 0]));
    }

    #[test]
    fn saturated_parent_forces_child_to_one() {
        // X -> Y positive with X's noise at 1: Y >= X = 1 everywhere
        let m = BscmModel::new(
            vec!["X".into(), "Y".into()],
            vec![
                Vec::new(),
                vec![ParentEdge {
                    parent: 0,
                    polarity: Polarity::Positive,
                }],
            ],
            vec![1.0, 0.0],
        )
        .unwrap();
        let ds = m.sample(100, 3);
        assert!(ds.rows().iter().all(|r| r == &[1, 1]));
    }

    #[test]
    fn negative_polarity_inverts_the_parent() {
        // Y = NOT X with no noise
        let m = BscmModel::new(
            vec!["X".into(), "Y".into()],
            vec![
                Vec::new(),
                vec![ParentEdge {
                    parent: 0,
                    polarity: Polarity::Negative,
                }],
            ],
            vec![0.4, 0.0],
        )
        .unwrap();
        let ds = m.sample(200, 5);
        assert!(ds.rows().iter().all(|r| r[1] == 1 - r[0]));
    }

    #[test]
    fn cycles_are_rejected() {
        let edge = |parent| {
            vec![ParentEdge {
                parent,
                polarity: Polarity::Positive,
            }]
        };
        let err = BscmModel::new(
            vec!["a".into(), "b".into()],
            vec![edge(1), edge(0)],
            vec![0.1, 0.1],
        );
        assert_eq!(err, Err(ModelError::Cyclic));
    }

    #[test]
    fn benchmark_model_has_expected_structure() {
        let m = benchmark_model(0.3).unwrap();
        assert_eq!(m.d(), 10);
        let directed = m.ground_truth(Task::Directed);
        let expected: Vec<(usize, usize)> =
            vec![(1, 0), (2, 0), (1, 3), (4, 3), (0, 5), (3, 5)];
        assert_eq!(directed.num_edges(), 6);
        for e in expected {
            assert!(directed.has_edge(e.0, e.1), "missing {e:?}");
        }
        let transitive = m.ground_truth(Task::Transitive);
        assert_eq!(transitive.num_edges(), 9);
        for extra in [(1, 5), (2, 5), (4, 5)] {
            assert!(transitive.has_edge(extra.0, extra.1), "missing {extra:?}");
        }
    }

    #[test]
    fn benchmark_noise_domain_is_guarded() {
        assert!(benchmark_model(0.0).is_err());
        assert!(benchmark_model(1.0).is_err());
        assert!(benchmark_model(-0.2).is_err());
    }

    #[test]
    fn ground_truth_of_chain() {
        let edge = |parent| {
            vec![ParentEdge {
                parent,
                polarity: Polarity::Positive,
            }]
        };
        let m = BscmModel::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![Vec::new(), edge(0), edge(1)],
            vec![0.2; 3],
        )
        .unwrap();
        let directed = m.ground_truth(Task::Directed);
        assert_eq!(directed.edge_set().len(), 2);
        let transitive = m.ground_truth(Task::Transitive);
        assert!(transitive.has_edge(0, 2));
        assert_eq!(transitive.num_edges(), 3);
    }

    #[test]
    fn sampling_is_deterministic_and_prefix_stable() {
        let m = benchmark_model(0.3).unwrap();
        let a = m.sample(200, 42);
        let b = m.sample(200, 42);
        assert_eq!(a, b);
        let longer = m.sample(500, 42);
        assert_eq!(&longer.rows()[..200], a.rows());
        let other = m.sample(200, 43);
        assert_ne!(a, other);
    }

    #[test]
    fn benchmark_marginals_match_closed_forms() {
        // P(X1=1) = 1 - (1-p)^3 at p = 0.3; large-sample check
        let m = benchmark_model(0.3).unwrap();
        let ds = m.sample(100_000, 2024);
        let p_x1 = ds.rows().iter().filter(|r| r[0] == 1).count() as f64 / ds.n() as f64;
        assert!((p_x1 - 0.657).abs() < 0.01, "P(X1=1) = {p_x1}");

        // ordering along causal layers, comfortably separated
        let p_x2 = ds.rows().iter().filter(|r| r[1] == 1).count() as f64 / ds.n() as f64;
        let p_x6 = ds.rows().iter().filter(|r| r[5] == 1).count() as f64 / ds.n() as f64;
        assert!(p_x2 + 0.1 < p_x1);
        assert!(p_x1 + 0.1 < p_x6);

        // the OR structure forces P(X1=1 | X2=1) = 1 exactly
        let ad = AlignedDataset::from_dataset(&ds).unwrap();
        let y = ValueAssignment::new([(0, 1)]).unwrap();
        let z = ValueAssignment::new([(1, 1)]).unwrap();
        assert_eq!(ad.cond_prob(&y, &z).unwrap(), 1.0);
        // and the conditional asymmetry points from X2 to X1
        let y2 = ValueAssignment::new([(1, 1)]).unwrap();
        let z2 = ValueAssignment::new([(0, 1)]).unwrap();
        assert!(ad.cond_prob(&y, &z).unwrap() > ad.cond_prob(&y2, &z2).unwrap());
    }

    #[test]
    fn model_text_round_trips() {
        let m = benchmark_model(0.25).unwrap();
        let text = m.to_model_text();
        let reparsed = parse_model(&text).unwrap();
        assert_eq!(m, reparsed);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad_edge = "[variables]\nA B\n[edges]\nA C +\n";
        match parse_model(bad_edge) {
            Err(ModelError::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("unknown variable"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad_polarity = "[variables]\nA B\n[edges]\nA B ?\n";
        assert!(matches!(
            parse_model(bad_polarity),
            Err(ModelError::Parse { line: 4, .. })
        ));
        let bad_noise = "[variables]\nA B\n[noise]\nA nope\n";
        assert!(matches!(
            parse_model(bad_noise),
            Err(ModelError::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn parse_supports_defaults_and_comments() {
        let text = "\
# two-variable chain
[variables]
A B   # inline names
[edges]
A B +
[noise]
* 0.25
A 0.5
";
        let m = parse_model(text).unwrap();
        assert_eq!(m.noise_p(), &[0.5, 0.25]);
        assert_eq!(m.parents()[1].len(), 1);
    }
}
