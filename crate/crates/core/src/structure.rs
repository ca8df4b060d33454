//! Normal form, island decomposition and the lfr / C⊕D / PO classifiers.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::ata::Ata;
use crate::error::{Error, Result};
use crate::tf::{Atom, Tf};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Islands {
    /// `islands[k]` lists member locations, header first.
    pub islands: Vec<Vec<usize>>,
    pub headers: Vec<usize>,
    /// Island index per location; `None` for unreachable locations.
    pub island_of: Vec<Option<usize>>,
    /// `(i, j)`: some location of island `i` resets into the header of island `j`.
    pub reset_edges: BTreeSet<(usize, usize)>,
}

fn successors(a: &Ata) -> (Vec<BTreeSet<usize>>, Vec<BTreeSet<usize>>) {
    let n = a.n_locations();
    let mut free = vec![BTreeSet::new(); n];
    let mut reset = vec![BTreeSet::new(); n];
    for ((s, _), f) in &a.delta {
        free[*s].extend(f.free_locations());
        reset[*s].extend(f.reset_locations());
    }
    (free, reset)
}

/// Checks normal form: the free closures of the initial location and of all
/// reset targets partition the reachable locations.
pub fn check_normal_form(a: &Ata) -> (bool, Option<Islands>) {
    let reach = a.reachable();
    let (free, reset) = successors(a);
    let mut headers = vec![a.initial];
    for s in 0..a.n_locations() {
        if reach[s] {
            for &t in &reset[s] {
                if !headers.contains(&t) {
                    headers.push(t);
                }
            }
        }
    }
    headers[1..].sort();
    let mut island_of: Vec<Option<usize>> = vec![None; a.n_locations()];
    let mut islands = Vec::new();
    for (k, &h) in headers.iter().enumerate() {
        let mut members = vec![h];
        let mut stack = vec![h];
        let mut seen = BTreeSet::from([h]);
        while let Some(s) = stack.pop() {
            for &t in &free[s] {
                if seen.insert(t) {
                    members.push(t);
                    stack.push(t);
                }
            }
        }
        for &m in &members {
            if island_of[m].is_some() {
                return (false, None);
            }
            island_of[m] = Some(k);
        }
        members[1..].sort();
        islands.push(members);
    }
    let mut reset_edges = BTreeSet::new();
    for s in 0..a.n_locations() {
        if let Some(i) = island_of[s] {
            for &t in &reset[s] {
                reset_edges.insert((i, island_of[t].expect("reset targets are headers")));
            }
        }
    }
    (
        true,
        Some(Islands {
            islands,
            headers,
            island_of,
            reset_edges,
        }),
    )
}

/// Returns an equivalent automaton in normal form; already-normal inputs are
/// only pruned.
pub fn normalize(a: &Ata) -> Ata {
    let a = a.prune();
    if check_normal_form(&a).0 {
        return a;
    }
    let n = a.n_locations();
    // s^r = i, s^{nr,j} = n + i * n + j
    let r = |i: usize| i;
    let nr = |i: usize, j: usize| n + i * n + j;
    let mut out = Ata::new(a.alphabet.clone(), vec![], 0);
    for i in 0..n {
        out.add_location(format!("{}_r", a.locations[i]), a.finals[i]);
    }
    for i in 0..n {
        for j in 0..n {
            out.add_location(
                format!("{}_nr_{}", a.locations[i], a.locations[j]),
                a.finals[i],
            );
        }
    }
    out.initial = r(a.initial);
    let copy = |f: &Tf, island: usize| {
        f.map_atoms(&mut |x| match x {
            Tf::Reset(k) => Tf::Reset(r(*k)),
            Tf::Loc(k) => Tf::Loc(nr(*k, island)),
            x => x.clone(),
        })
    };
    for ((s, m), f) in &a.delta {
        out.delta.insert((r(*s), *m), copy(f, *s));
        for j in 0..n {
            out.delta.insert((nr(*s, j), *m), copy(f, j));
        }
    }
    out.prune()
}

/// Islands of a normal-form automaton in topological order of reset edges,
/// lowest islands (no outgoing resets) first.
pub fn island_order(isl: &Islands) -> Result<Vec<usize>> {
    let k = isl.islands.len();
    let mut out_deg = vec![0usize; k];
    let mut preds = vec![Vec::new(); k];
    for &(i, j) in &isl.reset_edges {
        if i == j {
            return Err(Error::pre(
                "resets are not loop-free: an island resets into itself",
            ));
        }
        out_deg[i] += 1;
        preds[j].push(i);
    }
    let mut ready: Vec<usize> = (0..k).filter(|i| out_deg[*i] == 0).collect();
    ready.reverse();
    let mut order = Vec::new();
    while let Some(i) = ready.pop() {
        order.push(i);
        for &p in &preds[i] {
            out_deg[p] -= 1;
            if out_deg[p] == 0 {
                ready.push(p);
            }
        }
    }
    if order.len() < k {
        return Err(Error::pre(
            "resets are not loop-free: reset edges between islands form a cycle",
        ));
    }
    Ok(order)
}

pub fn check_lfr(a: &Ata) -> bool {
    let n = normalize(a);
    let (_, isl) = check_normal_form(&n);
    island_order(&isl.expect("normalize yields normal form")).is_ok()
}

/// Island decomposition of `normalize(a)` together with the normalized automaton.
pub fn islands(a: &Ata) -> (Ata, Islands) {
    let n = normalize(a);
    let (_, isl) = check_normal_form(&n);
    (n, isl.expect("normalize yields normal form"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Polarity {
    Conjunctive,
    Disjunctive,
}

/// A clause is well shaped when it does not combine a free location with a
/// clock constraint and holds at most one free location.
fn clause_ok(c: &[Atom]) -> bool {
    let locs = c.iter().filter(|x| matches!(x, Atom::Loc(_))).count();
    let clocks = c.iter().filter(|x| matches!(x, Atom::Clock(_))).count();
    locs <= 1 && !(locs == 1 && clocks > 0)
}

pub fn disjunctive_ok(a: &Ata, s: usize) -> bool {
    a.letters()
        .all(|m| a.delta(s, m).to_dnf().iter().all(|c| clause_ok(c)))
}

pub fn conjunctive_ok(a: &Ata, s: usize) -> bool {
    a.letters()
        .all(|m| a.delta(s, m).to_cnf().iter().all(|c| clause_ok(c)))
}

/// Finds a C⊕D polarity assignment for the reachable locations of `a`
/// (expected in normal form). Locations linked by a free edge must share a
/// polarity, so each connected component is decided independently.
pub fn cd_partition(a: &Ata) -> Option<Vec<Option<Polarity>>> {
    let n = a.n_locations();
    let reach = a.reachable();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for ((s, _), f) in &a.delta {
        for t in f.free_locations() {
            let (x, y) = (find(&mut parent, *s), find(&mut parent, t));
            parent[x] = y;
        }
    }
    let mut or_ok = vec![true; n];
    let mut and_ok = vec![true; n];
    for s in 0..n {
        if !reach[s] {
            continue;
        }
        let root = find(&mut parent, s);
        if or_ok[root] && !disjunctive_ok(a, s) {
            or_ok[root] = false;
        }
        if and_ok[root] && !conjunctive_ok(a, s) {
            and_ok[root] = false;
        }
    }
    let mut out = vec![None; n];
    for s in 0..n {
        if !reach[s] {
            continue;
        }
        let root = find(&mut parent, s);
        out[s] = Some(if or_ok[root] {
            Polarity::Disjunctive
        } else if and_ok[root] {
            Polarity::Conjunctive
        } else {
            return None;
        });
    }
    Some(out)
}

pub fn check_cd(a: &Ata) -> bool {
    cd_partition(&normalize(a)).is_some()
}

/// Re-validates a polarity assignment against the clause shapes.
pub fn validate_partition(a: &Ata, part: &[Option<Polarity>]) -> bool {
    let reach = a.reachable();
    for s in 0..a.n_locations() {
        if !reach[s] {
            continue;
        }
        let Some(p) = part[s] else { return false };
        let ok = match p {
            Polarity::Disjunctive => disjunctive_ok(a, s),
            Polarity::Conjunctive => conjunctive_ok(a, s),
        };
        if !ok {
            return false;
        }
        for m in a.letters() {
            if a.delta(s, m)
                .free_locations()
                .iter()
                .any(|t| part[*t] != Some(p))
            {
                return false;
            }
        }
    }
    true
}

/// Partially ordered: no self-reset, and the dependency graph without
/// self-loops is acyclic.
pub fn check_po(a: &Ata) -> bool {
    let a = a.prune();
    let n = a.n_locations();
    let (free, reset) = successors(&a);
    if (0..n).any(|s| reset[s].contains(&s)) {
        return false;
    }
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|s| {
            free[s]
                .union(&reset[s])
                .copied()
                .filter(|t| *t != s)
                .collect()
        })
        .collect();
    // iterative three-colour DFS
    let mut color = vec![0u8; n];
    for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, 0usize)];
        color[root] = 1;
        while let Some((s, i)) = stack.pop() {
            if i < succ[s].len() {
                stack.push((s, i + 1));
                let t = succ[s][i];
                match color[t] {
                    0 => {
                        color[t] = 1;
                        stack.push((t, 0));
                    }
                    1 => return false,
                    _ => {}
                }
            } else {
                color[s] = 2;
            }
        }
    }
    true
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub normal: bool,
    pub lfr: bool,
    pub cd: bool,
    pub po: bool,
    /// Islands of the normalized automaton, header first.
    pub islands: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conjunctive: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disjunctive: Option<Vec<String>>,
}

pub fn classify(a: &Ata) -> StructureReport {
    let normal = check_normal_form(&a.prune()).0;
    let (n, isl) = islands(a);
    let lfr = island_order(&isl).is_ok();
    let part = cd_partition(&n);
    let names = |p: Polarity| -> Option<Vec<String>> {
        part.as_ref().map(|pt| {
            (0..n.n_locations())
                .filter(|s| pt[*s] == Some(p))
                .map(|s| n.locations[s].clone())
                .collect()
        })
    };
    StructureReport {
        normal,
        lfr,
        cd: part.is_some(),
        po: check_po(a),
        islands: isl
            .islands
            .iter()
            .map(|is| is.iter().map(|s| n.locations[*s].clone()).collect())
            .collect(),
        conjunctive: names(Polarity::Conjunctive),
        disjunctive: names(Polarity::Disjunctive),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::*;

    fn names(a: &Ata, isl: &Islands) -> Vec<BTreeSet<String>> {
        isl.islands
            .iter()
            .map(|i| i.iter().map(|s| a.locations[*s].clone()).collect())
            .collect()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn automaton_b_normalization() {
        let b = automaton_b();
        assert!(!check_normal_form(&b).0);
        let n = normalize(&b);
        let (ok, isl) = check_normal_form(&n);
        assert!(ok);
        let isl = isl.unwrap();
        let got: BTreeSet<BTreeSet<String>> = names(&n, &isl).into_iter().collect();
        let want: BTreeSet<BTreeSet<String>> = [
            set(&["s0_r", "s0_nr_s0"]),
            set(&["s1_r", "s0_nr_s1", "s1_nr_s1"]),
            set(&["s2_r", "s2_nr_s2"]),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
        let loc = |x: &str| n.loc(x).unwrap();
        let a = n.mask_of(&["a".to_string()].into()).unwrap();
        let bm = n.mask_of(&["b".to_string()].into()).unwrap();
        assert_eq!(
            *n.delta(loc("s0_r"), a),
            Tf::and(Tf::Loc(loc("s0_nr_s0")), Tf::Reset(loc("s1_r")))
        );
        assert_eq!(
            *n.delta(loc("s1_r"), a),
            Tf::and(Tf::Loc(loc("s1_nr_s1")), Tf::Loc(loc("s0_nr_s1")))
        );
        assert_eq!(*n.delta(loc("s2_r"), bm), Tf::Reset(loc("s0_r")));
        assert_eq!(normalize(&n), n);
    }

    #[test]
    fn po_automaton_is_normal_and_po() {
        let a = po_automaton();
        let (ok, isl) = check_normal_form(&a);
        assert!(ok);
        assert_eq!(isl.unwrap().islands.len(), 2);
        assert_eq!(normalize(&a), a);
        assert!(check_po(&a));
        assert!(check_lfr(&a));
    }

    #[test]
    fn cd_examples() {
        let r = classify(&example_cd_a());
        assert!(r.cd && !r.lfr);
        assert!(!classify(&example_cd_b()).cd);
        let r = classify(&example_cd_c());
        assert!(r.lfr && !r.cd);
        let r = classify(&example_cd_d());
        assert!(r.lfr && !r.cd);
    }

    #[test]
    fn not_lfr_example() {
        let a = example_not_lfr();
        assert!(!check_lfr(&a));
        assert!(!check_po(&a));
    }

    #[test]
    fn single_reset_free_location() {
        let a = build(&["a"], &["s"], "s", &["s"], &[("s", Sel::All, "s & x < 1")]);
        let (ok, isl) = check_normal_form(&a);
        assert!(ok && isl.unwrap().islands.len() == 1);
        assert!(check_lfr(&a) && check_po(&a));
    }

    #[test]
    fn even_b_island_order() {
        let (n, isl) = islands(&even_b_automaton());
        let order = island_order(&isl).unwrap();
        let first = &isl.islands[order[0]];
        assert_eq!(n.locations[first[0]], "s1");
        assert_eq!(n.locations[isl.islands[order[1]][0]], "s0");
    }

    #[test]
    fn partitions_revalidate() {
        for a in [example_cd_a(), po_automaton(), even_b_automaton()] {
            let n = normalize(&a);
            if let Some(p) = cd_partition(&n) {
                assert!(validate_partition(&n, &p));
            }
        }
    }
}
