//! Iterative Tarjan strong-components over a CSR adjacency.

/// Strong components of the graph `offsets`/`targets` (CSR form).
///
/// Returns `(component id per node, components)`. Components come out in reverse
/// topological order of the condensation, as Tarjan produces them; each
/// component's node list is sorted.
pub(crate) fn tarjan(
    num_nodes: usize,
    offsets: &[usize],
    targets: &[usize],
) -> (Vec<usize>, Vec<Vec<usize>>) {
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; num_nodes];
    let mut low = vec![0usize; num_nodes];
    let mut on_stack = vec![false; num_nodes];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp_id = vec![UNVISITED; num_nodes];
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut next_index = 0usize;
    // Call stack of (node, next edge position).
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..num_nodes {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, offsets[root]));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < offsets[v + 1] {
                let w = targets[*pos];
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, offsets[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let id = components.len();
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp_id[w] = id;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    (comp_id, components)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csr(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
        }
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        for a in adj {
            targets.extend(a);
            offsets.push(targets.len());
        }
        (offsets, targets)
    }

    #[test]
    fn two_cycles_and_a_bridge() {
        let (o, t) = csr(5, &[(0, 1), (1, 0), (1, 2), (2, 3), (3, 4), (4, 2)]);
        let (id, comps) = tarjan(5, &o, &t);
        assert_eq!(comps.len(), 2);
        assert_eq!(id[0], id[1]);
        assert_eq!(id[2], id[4]);
        assert_ne!(id[0], id[2]);
    }

    #[test]
    fn long_path_does_not_recurse() {
        let n = 200_000;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let (o, t) = csr(n, &edges);
        let (_, comps) = tarjan(n, &o, &t);
        assert_eq!(comps.len(), n);
    }
}
