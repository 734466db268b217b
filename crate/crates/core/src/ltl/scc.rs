//! Strongly connected components over implicit graphs (iterative Tarjan).

/// Component index per node, plus whether each component contains a cycle
/// (more than one node, or a self-loop).
pub struct Components {
    pub component: Vec<usize>,
    pub cyclic: Vec<bool>,
}

/// SCCs of the subgraph on nodes `0..n`. Components come out in reverse
/// topological order.
pub fn tarjan<S: AsRef<[usize]>>(n: usize, succ: impl Fn(usize) -> S) -> Components {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component = vec![UNSEEN; n];
    let mut cyclic = Vec::new();
    let mut counter = 0;
    let mut adj: Vec<Option<S>> = (0..n).map(|_| None).collect();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        // (node, next child position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        adj[root] = Some(succ(root));

        while let Some(&mut (v, ref mut k)) = call.last_mut() {
            let children = adj[v].as_ref().expect("expanded").as_ref();
            if *k < children.len() {
                let w = children[*k];
                *k += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    adj[w] = Some(succ(w));
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
                let id = cyclic.len();
                let mut size = 0;
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    component[w] = id;
                    size += 1;
                    if w == v {
                        break;
                    }
                }
                let self_loop = adj[v].as_ref().is_some_and(|c| c.as_ref().contains(&v));
                cyclic.push(size > 1 || self_loop);
            }
        }
    }
    Components { component, cyclic }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cycles_and_singletons() {
        // 0 -> 1 -> 2 -> 1, 3 -> 3, 4 isolated
        let edges = [vec![1], vec![2], vec![1], vec![3], vec![]];
        let c = tarjan(5, |v| edges[v].clone());
        assert_eq!(c.component[1], c.component[2]);
        assert_ne!(c.component[0], c.component[1]);
        assert!(c.cyclic[c.component[1]]);
        assert!(!c.cyclic[c.component[0]]);
        assert!(c.cyclic[c.component[3]]);
        assert!(!c.cyclic[c.component[4]]);
    }
}
