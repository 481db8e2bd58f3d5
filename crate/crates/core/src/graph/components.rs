use super::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentMode {
    Weak,
    Strong,
}

/// Partition of the nodes into connected components.
///
/// Components are numbered by their smallest node index, so component 0 always
/// contains node 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    pub mode: ComponentMode,
    pub assignment: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl ComponentDecomposition {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    fn from_raw(mode: ComponentMode, raw: Vec<usize>) -> Self {
        let mut remap = vec![usize::MAX; raw.len()];
        let mut next = 0;
        let mut assignment = Vec::with_capacity(raw.len());
        for &c in &raw {
            if remap[c] == usize::MAX {
                remap[c] = next;
                next += 1;
            }
            assignment.push(remap[c]);
        }
        let mut sizes = vec![0; next];
        for &c in &assignment {
            sizes[c] += 1;
        }
        ComponentDecomposition {
            mode,
            assignment,
            sizes,
        }
    }
}

pub fn components(g: &Graph, mode: ComponentMode) -> ComponentDecomposition {
    let raw = match mode {
        ComponentMode::Strong if g.is_directed() => tarjan(g),
        _ => weak(g),
    };
    ComponentDecomposition::from_raw(mode, raw)
}

fn weak(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, j, _) in g.arcs() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}

/// Iterative Tarjan; returns a component id per node (arbitrary numbering).
fn tarjan(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![UNSEEN; n];
    let mut next_index = 0;
    let mut next_comp = 0;
    // (node, position in its adjacency row)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = g.targets(v).get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
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
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

/// Restricts `g` to its largest component. Returns the subgraph and the
/// original index of every retained node (new index `k` ↦ `mapping[k]`).
///
/// Equal-size components are resolved in favour of the one holding the
/// smallest original node index.
pub fn largest_component_subgraph(g: &Graph, mode: ComponentMode) -> (Graph, Vec<usize>) {
    if g.is_empty() {
        return (g.clone(), Vec::new());
    }
    let dec = components(g, mode);
    // numbering by smallest member means the first maximum wins ties
    let best = dec.sizes.iter().enumerate().fold(
        0,
        |best, (c, &s)| if s > dec.sizes[best] { c } else { best },
    );
    let nodes: Vec<usize> = (0..g.node_count())
        .filter(|&v| dec.assignment[v] == best)
        .collect();
    (g.induced_subgraph(&nodes), nodes)
}

/// Result of [`prune_low_degree`].
#[derive(Debug, Clone)]
pub struct Pruned {
    pub graph: Graph,
    /// Original indices of the retained nodes.
    pub kept: Vec<usize>,
    /// Set when every node was removed.
    pub emptied: bool,
}

/// Removes nodes whose unweighted degree (distinct neighbours, ignoring
/// direction and self-loops) is at most `threshold`. With `iterate`, repeats
/// until no node qualifies.
pub fn prune_low_degree(g: &Graph, threshold: usize, iterate: bool) -> Pruned {
    let mut current = g.clone();
    let mut kept: Vec<usize> = (0..g.node_count()).collect();
    loop {
        let degrees = current.undirected_neighbor_sets();
        let survivors: Vec<usize> = (0..current.node_count())
            .filter(|&v| degrees[v].len() > threshold)
            .collect();
        let changed = survivors.len() != current.node_count();
        if changed {
            current = current.induced_subgraph(&survivors);
            kept = survivors.iter().map(|&v| kept[v]).collect();
        }
        if !changed || !iterate || current.is_empty() {
            break;
        }
    }
    let emptied = current.is_empty() && !g.is_empty();
    Pruned {
        graph: current,
        kept,
        emptied,
    }
}
