//! Graphviz export of response graphs.

use std::fmt::Write;

use super::{PopulationMode, ResponseGraph};
use crate::game::NormalFormGame;
use crate::scalar::Scalar;

impl ResponseGraph {
    /// Renders the graph in DOT format; sink-component nodes are drawn doubled.
    pub fn to_dot<T: Scalar>(&self, game: &NormalFormGame<T>) -> String {
        let label = |v: usize| -> String {
            match self.mode {
                PopulationMode::Single => game.strategy_label(0, v),
                PopulationMode::Multi => {
                    let p = game.profile_of(v);
                    let parts: Vec<String> = p
                        .iter()
                        .enumerate()
                        .map(|(k, &s)| game.strategy_label(k, s))
                        .collect();
                    format!("({})", parts.join(","))
                }
            }
        };
        let mut out = String::from("digraph response {\n");
        for v in 0..self.num_nodes() {
            let shape = if self.is_in_sink(v) {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  n{v} [label=\"{}\", shape={shape}];", label(v));
        }
        for v in 0..self.num_nodes() {
            for &w in self.successors(v) {
                let _ = writeln!(out, "  n{v} -> n{w};");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::game::{fixture_game, Fixture, NormalFormGame};
    use crate::graph::{build_response_graph, PopulationMode};

    #[test]
    fn dot_lists_every_edge() {
        let g: NormalFormGame<f64> = fixture_game(&Fixture::Chicken).unwrap();
        let rg = build_response_graph(&g, PopulationMode::Multi, 0.0).unwrap();
        let dot = rg.to_dot(&g);
        assert_eq!(dot.matches("->").count(), rg.num_edges());
        assert!(dot.contains("(D,C)"));
    }
}
