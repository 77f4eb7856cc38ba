//! Reference implementations used only to cross-check the library. They
//! work on explicit position tuples and share no code with the solvers.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use scar::Graph;

/// Closed neighborhoods from a 0-based edge list.
pub fn closed_neighborhoods(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut nb: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    for &(u, v) in edges {
        nb[u].push(v);
        nb[v].push(u);
    }
    nb
}

pub fn neighborhoods_of(g: &Graph) -> Vec<Vec<usize>> {
    let edges: Vec<(usize, usize)> = g.edges().to_vec();
    closed_neighborhoods(g.vertex_count(), &edges)
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let nb = closed_neighborhoods(n, edges);
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &nb[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|x| x)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every connected simple graph on `n` vertices, one per isomorphism class,
/// as 0-based edge lists. Brute force: canonical form is the smallest edge
/// bitmask over all vertex relabelings.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let bit: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let perms = permutations(n);
    let mut canon = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let edges: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p).collect();
        if !connected(n, &edges) {
            continue;
        }
        let min = perms
            .iter()
            .map(|p| {
                edges.iter().fold(0u32, |m, &(u, v)| {
                    let (a, b) = (p[u].min(p[v]), p[u].max(p[v]));
                    m | 1 << bit[&(a, b)]
                })
            })
            .min()
            .unwrap();
        if canon.insert(min) {
            out.push(edges);
        }
    }
    out
}

pub fn to_graph(n: usize, edges: &[(usize, usize)]) -> Graph {
    let one: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (u + 1, v + 1)).collect();
    Graph::from_edges(n, &one).expect("catalog graphs are valid")
}

/// Catalog of all connected graphs with at most `max_n` vertices.
pub fn catalog(max_n: usize) -> Vec<Graph> {
    (1..=max_n).flat_map(|n| connected_graphs(n).into_iter().map(move |e| to_graph(n, &e))).collect()
}

/// Optimal capture time of the turn-based game in which one controller
/// moves all cops: a state is `(positions, mover)`, the last position is the
/// robber's, each turn one token moves within its closed neighborhood and
/// the mover index advances cyclically. Computed by plain fixpoint
/// iteration of `T = 0` at capture, `1 + min` at cop turns and `1 + max` at
/// robber turns, starting from infinity. `None` means never.
pub struct NaiveCaptureTimes {
    pub nb: Vec<Vec<usize>>,
    pub players: usize,
    pub times: HashMap<(Vec<usize>, usize), Option<u32>>,
}

fn all_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|t| (0..n).map(move |v| [t.clone(), vec![v]].concat())).collect();
    }
    out
}

impl NaiveCaptureTimes {
    pub fn new(g: &Graph, players: usize) -> Self {
        let nb = neighborhoods_of(g);
        let n = g.vertex_count();
        let states: Vec<(Vec<usize>, usize)> =
            all_tuples(n, players).into_iter().flat_map(|t| (0..players).map(move |p| (t.clone(), p))).collect();
        let captured = |x: &[usize]| x[..players - 1].contains(&x[players - 1]);
        let mut times: HashMap<(Vec<usize>, usize), Option<u32>> =
            states.iter().map(|s| (s.clone(), if captured(&s.0) { Some(0) } else { None })).collect();
        loop {
            let mut changed = false;
            for (x, p) in &states {
                if captured(x) {
                    continue;
                }
                let mut succ = nb[x[*p]].iter().map(|&to| {
                    let mut y = x.clone();
                    y[*p] = to;
                    times[&(y, (p + 1) % players)]
                });
                let t = if *p == players - 1 {
                    // Robber: worst case; any infinite option dominates.
                    succ.try_fold(0, |acc, t| t.map(|b| acc.max(b)))
                } else {
                    succ.flatten().min()
                }
                .map(|t| t + 1);
                if t != times[&(x.clone(), *p)] {
                    times.insert((x.clone(), *p), t);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        NaiveCaptureTimes { nb, players, times }
    }

    /// Looks up a state given 0-based positions and mover.
    pub fn get(&self, positions: &[usize], mover: usize) -> Option<u32> {
        self.times[&(positions.to_vec(), mover)]
    }
}

/// Whether `k` cops win the classic round-based game on `g`: in a round all
/// cops move simultaneously, then the robber moves; cops win iff they can
/// force capture from every configuration. Least fixpoint of the winning
/// region, memoized over (sorted cop multiset, robber, side to move).
pub fn classic_cops_win(g: &Graph, k: usize) -> bool {
    let nb = neighborhoods_of(g);
    let n = g.vertex_count();
    let mut cop_sets: Vec<Vec<usize>> =
        all_tuples(n, k).into_iter().filter(|t| t.windows(2).all(|w| w[0] <= w[1])).collect();
    cop_sets.sort();
    let index: HashMap<Vec<usize>, usize> = cop_sets.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    // Joint cop moves from each multiset, as multiset indices.
    let moves: Vec<Vec<usize>> = cop_sets
        .iter()
        .map(|c| {
            let mut out: HashSet<usize> = HashSet::new();
            for mut t in c.iter().fold(vec![vec![]], |acc: Vec<Vec<usize>>, &v| {
                acc.into_iter().flat_map(|t| nb[v].iter().map(move |&w| [t.clone(), vec![w]].concat())).collect()
            }) {
                t.sort();
                out.insert(index[&t]);
            }
            out.into_iter().collect()
        })
        .collect();
    let m = cop_sets.len();
    // win[side][c * n + r]: side 0 = cops to move, 1 = robber to move.
    let mut win = [vec![false; m * n], vec![false; m * n]];
    for c in 0..m {
        for r in 0..n {
            if cop_sets[c].contains(&r) {
                win[0][c * n + r] = true;
                win[1][c * n + r] = true;
            }
        }
    }
    loop {
        let mut changed = false;
        for c in 0..m {
            for r in 0..n {
                let i = c * n + r;
                if !win[0][i] && moves[c].iter().any(|&d| win[1][d * n + r]) {
                    win[0][i] = true;
                    changed = true;
                }
                if !win[1][i] && nb[r].iter().all(|&y| win[0][c * n + y]) {
                    win[1][i] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    win[0].iter().all(|&w| w)
}

/// Cop number by the classic game, searching `1..=max`.
pub fn classic_cop_number(g: &Graph, max: usize) -> Option<usize> {
    (1..=max).find(|&k| classic_cops_win(g, k))
}

/// A few named graphs beyond the library's constructors.
pub fn tree_suite() -> Vec<(String, Graph)> {
    let mut out = vec![
        ("P2".to_string(), Graph::path(2)),
        ("P5".to_string(), Graph::path(5)),
        ("P8".to_string(), Graph::path(8)),
        ("star5".to_string(), Graph::star(5)),
        ("fig".to_string(), Graph::delayed_capture_example()),
    ];
    // Spider with three legs of length 2.
    out.push(("spider".to_string(), Graph::from_edges(7, &[(1, 2), (2, 3), (1, 4), (4, 5), (1, 6), (6, 7)]).unwrap()));
    // Complete binary tree of depth 2.
    out.push(("binary".to_string(), Graph::from_edges(7, &[(1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)]).unwrap()));
    out
}
