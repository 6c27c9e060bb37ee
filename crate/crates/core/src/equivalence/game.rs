//! Brute-force engines: the coinductive pair closure (the oracle the
//! partition refinement is checked against) and an explicit k-round
//! attacker/defender game.
//!
//! Both treat horizon states as compatible with everything, so a pair
//! reported incompatible is distinguishable no matter how the graph
//! continues beyond the horizon, and the extracted witness never traverses a
//! horizon state.

use std::collections::BTreeMap;

use crate::foundations::ActionLabel;
use crate::lts::{LtsFragment, StateId};

use super::witness::{Witness, WitnessReason};
use super::{CheckResult, Relation, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Debug)]
enum Reason {
    Acceptance,
    Move { side: Side, label: ActionLabel, target: usize },
    Divergence,
}

impl Reason {
    fn mirror(&self) -> Reason {
        match self {
            Reason::Move { side, label, target } => {
                Reason::Move { side: side.flip(), label: label.clone(), target: *target }
            }
            other => other.clone(),
        }
    }
}

struct Ctx<'a> {
    fragment: &'a LtsFragment,
    relation: Relation,
    n: usize,
    horizon: Vec<bool>,
    /// reflexive-transitive tau closure per state
    tau_reach: Vec<Vec<usize>>,
    /// tau closure after at least one tau step
    tau_plus: Vec<Vec<usize>>,
}

impl<'a> Ctx<'a> {
    fn new(fragment: &'a LtsFragment, relation: Relation) -> Self {
        let n = fragment.len();
        let horizon: Vec<bool> = (0..n).map(|i| fragment.horizon(StateId(i))).collect();
        let tau_next: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                fragment
                    .transitions_from(StateId(i))
                    .iter()
                    .filter(|(l, _)| l.is_tau())
                    .map(|(_, t)| t.0)
                    .collect()
            })
            .collect();
        let mut tau_reach = Vec::with_capacity(n);
        for i in 0..n {
            let mut seen = vec![false; n];
            seen[i] = true;
            let mut queue = vec![i];
            while let Some(v) = queue.pop() {
                for &w in &tau_next[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push(w);
                    }
                }
            }
            tau_reach.push((0..n).filter(|&v| seen[v]).collect::<Vec<_>>());
        }
        let tau_plus: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let mut out: Vec<usize> = tau_next[i]
                    .iter()
                    .flat_map(|&w| tau_reach[w].iter().copied())
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        Ctx { fragment, relation, n, horizon, tau_reach, tau_plus }
    }

    fn trans(&self, v: usize) -> &[(ActionLabel, StateId)] {
        self.fragment.transitions_from(StateId(v))
    }

    fn acc(&self, v: usize) -> bool {
        self.fragment.accepting(StateId(v))
    }

    fn wild(&self, s: usize, t: usize) -> bool {
        self.horizon[s] || self.horizon[t]
    }

    /// First violated clause for the pair under `rel`, if any. Divergence is
    /// handled separately.
    fn violated(&self, s: usize, t: usize, rel: &dyn Fn(usize, usize) -> bool) -> Option<Reason> {
        match self.relation {
            Relation::Strong => self.violated_strong(s, t, rel),
            Relation::Branching | Relation::Dpbb => self.violated_branching(s, t, rel),
        }
    }

    fn violated_strong(
        &self,
        s: usize,
        t: usize,
        rel: &dyn Fn(usize, usize) -> bool,
    ) -> Option<Reason> {
        if self.acc(s) != self.acc(t) {
            return Some(Reason::Acceptance);
        }
        for (a, s2) in self.trans(s) {
            let matched = self
                .trans(t)
                .iter()
                .any(|(b, t2)| b == a && rel(s2.0, t2.0));
            if !matched {
                return Some(Reason::Move { side: Side::Left, label: a.clone(), target: s2.0 });
            }
        }
        for (a, t2) in self.trans(t) {
            let matched = self
                .trans(s)
                .iter()
                .any(|(b, s2)| b == a && rel(s2.0, t2.0));
            if !matched {
                return Some(Reason::Move { side: Side::Right, label: a.clone(), target: t2.0 });
            }
        }
        None
    }

    /// Branching move clause: x -a-> x2 is matched by y when some
    /// y' in tau*(y) with x R y' either equals the (a) = tau stutter
    /// (x2 R y') or steps y' -a-> y'' with x2 R y''.
    fn move_matched(
        &self,
        x: usize,
        x2: usize,
        a: &ActionLabel,
        y: usize,
        rel: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        for &y2 in &self.tau_reach[y] {
            if !rel(x, y2) {
                continue;
            }
            if a.is_tau() && rel(x2, y2) {
                return true;
            }
            for (b, y3) in self.trans(y2) {
                if b == a && rel(x2, y3.0) {
                    return true;
                }
            }
        }
        false
    }

    /// Branching acceptance clause: x accepting requires y to tau-reach a
    /// related accepting state.
    fn acc_matched(&self, x: usize, y: usize, rel: &dyn Fn(usize, usize) -> bool) -> bool {
        !self.acc(x)
            || self.tau_reach[y].iter().any(|&y2| rel(x, y2) && self.acc(y2))
    }

    fn violated_branching(
        &self,
        s: usize,
        t: usize,
        rel: &dyn Fn(usize, usize) -> bool,
    ) -> Option<Reason> {
        if !self.acc_matched(s, t, rel) || !self.acc_matched(t, s, rel) {
            return Some(Reason::Acceptance);
        }
        for (a, s2) in self.trans(s) {
            if !self.move_matched(s, s2.0, a, t, rel) {
                return Some(Reason::Move { side: Side::Left, label: a.clone(), target: s2.0 });
            }
        }
        for (a, t2) in self.trans(t) {
            if !self.move_matched(t, t2.0, a, s, rel) {
                return Some(Reason::Move { side: Side::Right, label: a.clone(), target: t2.0 });
            }
        }
        None
    }

    /// Divergence flags per state: an infinite internal tau path within the
    /// candidate classes of `rel` (built by union-find over related interior
    /// pairs).
    fn divergence_flags(&self, rel: &dyn Fn(usize, usize) -> bool) -> Vec<bool> {
        let mut uf = UnionFind::new(self.n);
        for s in 0..self.n {
            if self.horizon[s] {
                continue;
            }
            for t in (s + 1)..self.n {
                if !self.horizon[t] && rel(s, t) {
                    uf.union(s, t);
                }
            }
        }
        let internal_succ: Vec<Vec<usize>> = (0..self.n)
            .map(|v| {
                if self.horizon[v] {
                    return Vec::new();
                }
                self.trans(v)
                    .iter()
                    .filter(|(l, w)| {
                        l.is_tau() && !self.horizon[w.0] && uf.find(v) == uf.find(w.0)
                    })
                    .map(|(_, w)| w.0)
                    .collect()
            })
            .collect();
        // greatest fixpoint: states with arbitrarily long internal tau paths
        let mut div: Vec<bool> = internal_succ.iter().map(|succ| !succ.is_empty()).collect();
        loop {
            let mut changed = false;
            for v in 0..self.n {
                if div[v] && !internal_succ[v].iter().any(|&w| div[w]) {
                    div[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        div
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Result of the pair closure: the largest relation satisfying the selected
/// bisimulation clauses, with horizon states wildcarded.
pub struct Closure {
    n: usize,
    relation: Relation,
    related: Vec<bool>,
    eliminated: BTreeMap<(usize, usize), (u64, Reason)>,
}

/// Computes the pair closure by repeatedly removing pairs that violate a
/// clause. For the divergence-preserving variant, the branching closure is
/// alternated with splitting on per-class divergence flags until both are
/// stable.
pub fn closure(fragment: &LtsFragment, relation: Relation) -> Closure {
    let ctx = Ctx::new(fragment, relation);
    let n = ctx.n;
    let mut related = vec![true; n * n];
    let mut eliminated: BTreeMap<(usize, usize), (u64, Reason)> = BTreeMap::new();
    let mut seq: u64 = 0;

    let eliminate =
        |related: &mut Vec<bool>,
         eliminated: &mut BTreeMap<(usize, usize), (u64, Reason)>,
         seq: &mut u64,
         s: usize,
         t: usize,
         reason: Reason| {
            *seq += 1;
            related[s * n + t] = false;
            related[t * n + s] = false;
            eliminated.insert((t, s), (*seq, reason.mirror()));
            eliminated.insert((s, t), (*seq, reason));
        };

    loop {
        // clause passes until stable
        loop {
            let mut changed = false;
            for s in 0..n {
                for t in (s + 1)..n {
                    if !related[s * n + t] || ctx.wild(s, t) {
                        continue;
                    }
                    let snapshot = &related;
                    let rel = |x: usize, y: usize| snapshot[x * n + y];
                    if let Some(reason) = ctx.violated(s, t, &rel) {
                        eliminate(&mut related, &mut eliminated, &mut seq, s, t, reason);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if relation != Relation::Dpbb {
            break;
        }
        // split on divergence flags and re-run the clauses if anything moved
        let rel_snapshot = related.clone();
        let rel = |x: usize, y: usize| rel_snapshot[x * n + y];
        let div = ctx.divergence_flags(&rel);
        let mut any = false;
        for s in 0..n {
            for t in (s + 1)..n {
                if related[s * n + t] && !ctx.wild(s, t) && div[s] != div[t] {
                    eliminate(&mut related, &mut eliminated, &mut seq, s, t, Reason::Divergence);
                    any = true;
                }
            }
        }
        if !any {
            break;
        }
    }

    Closure { n, relation, related, eliminated }
}

impl Closure {
    pub fn related(&self, s: StateId, t: StateId) -> bool {
        self.related[s.0 * self.n + t.0]
    }

    /// Partition induced by the closure on interior states (used by the
    /// oracle cross-checks). Horizon states share one block.
    pub fn partition(&self, fragment: &LtsFragment) -> Vec<usize> {
        let mut uf = UnionFind::new(self.n);
        for s in 0..self.n {
            for t in (s + 1)..self.n {
                let wild = fragment.horizon(StateId(s)) || fragment.horizon(StateId(t));
                let both_horizon = fragment.horizon(StateId(s)) && fragment.horizon(StateId(t));
                if both_horizon || (!wild && self.related[s * self.n + t]) {
                    uf.union(s, t);
                }
            }
        }
        let mut block_ids: BTreeMap<usize, usize> = BTreeMap::new();
        (0..self.n)
            .map(|v| {
                let root = uf.find(v);
                let next = block_ids.len();
                *block_ids.entry(root).or_insert(next)
            })
            .collect()
    }

    /// Reconstructs a distinguishing experiment by replaying the elimination
    /// order: at each move distinction, descend into the defender response
    /// that was eliminated most recently before the current pair.
    pub fn explain(&self, fragment: &LtsFragment, s: StateId, t: StateId) -> Witness {
        let ctx = Ctx::new(fragment, self.relation);
        let mut steps: Vec<ActionLabel> = Vec::new();
        let mut current = (s.0, t.0);
        loop {
            let Some((cur_seq, reason)) = self.eliminated.get(&current) else {
                // related pair: nothing to explain
                return Witness { steps, reason: WitnessReason::AcceptanceMismatch };
            };
            match reason {
                Reason::Acceptance => {
                    return Witness { steps, reason: WitnessReason::AcceptanceMismatch }
                }
                Reason::Divergence => {
                    return Witness { steps, reason: WitnessReason::DivergenceMismatch }
                }
                Reason::Move { side, label, target } => {
                    let (mover, defender) = match side {
                        Side::Left => (current.0, current.1),
                        Side::Right => (current.1, current.0),
                    };
                    let orient = |x: usize, y: usize| match side {
                        Side::Left => (x, y),
                        Side::Right => (y, x),
                    };
                    // candidate descents: response-target pairs (with the
                    // action recorded) and intermediate stutter pairs
                    let mut action_best: Option<(u64, (usize, usize))> = None;
                    let mut stutter_best: Option<(u64, (usize, usize))> = None;
                    let intermediates: Vec<usize> = match self.relation {
                        Relation::Strong => vec![defender],
                        _ => ctx.tau_reach[defender].clone(),
                    };
                    for &y2 in &intermediates {
                        let ip = orient(mover, y2);
                        if let Some((q, _)) = self.eliminated.get(&ip) {
                            if q < cur_seq && stutter_best.is_none_or(|(bq, _)| *q > bq) {
                                stutter_best = Some((*q, ip));
                            }
                        }
                        let consider = |np: (usize, usize),
                                            action_best: &mut Option<(u64, (usize, usize))>| {
                            if let Some((q, _)) = self.eliminated.get(&np) {
                                if q < cur_seq && action_best.is_none_or(|(bq, _)| *q > bq) {
                                    *action_best = Some((*q, np));
                                }
                            }
                        };
                        if label.is_tau() && self.relation != Relation::Strong {
                            consider(orient(*target, y2), &mut action_best);
                        }
                        for (b, y3) in ctx.trans(y2) {
                            if b == label {
                                consider(orient(*target, y3.0), &mut action_best);
                            }
                        }
                    }
                    match (action_best, stutter_best) {
                        (Some((_, np)), _) => {
                            steps.push(label.clone());
                            current = np;
                        }
                        (None, Some((_, ip))) => {
                            current = ip;
                        }
                        (None, None) => {
                            return Witness {
                                steps,
                                reason: WitnessReason::MissingAction(label.clone()),
                            };
                        }
                    }
                }
            }
        }
    }
}

/// Explicit k-round attacker/defender game between a state of fragment `a`
/// and a state of fragment `b`. Sound for inequivalence at any depth;
/// equivalent verdicts hold at the explored depth only.
pub fn bounded_game(
    a: &LtsFragment,
    s_a: StateId,
    b: &LtsFragment,
    s_b: StateId,
    relation: Relation,
    depth: usize,
) -> Verdict {
    let (union, _, _) = LtsFragment::disjoint_union(a, b);
    let s = s_a.0;
    let t = s_b.0 + a.len();
    let ctx = Ctx::new(&union, relation);
    let n = ctx.n;
    if ctx.wild(s, t) {
        return Verdict {
            relation,
            result: CheckResult::InconclusiveAtHorizon,
            blocks: 0,
            params: format!("game depth {}", depth),
        };
    }

    // levels[j] = pairs the defender survives for j rounds
    let mut levels: Vec<Vec<bool>> = vec![vec![true; n * n]];
    for _ in 1..=depth {
        let prev = levels.last().expect("at least level 0");
        let mut cur = vec![true; n * n];
        for x in 0..n {
            for y in 0..n {
                if ctx.wild(x, y) {
                    continue;
                }
                let rel = |u: usize, v: usize| prev[u * n + v];
                let mut ok = ctx.violated(x, y, &rel).is_none();
                if ok && relation == Relation::Dpbb {
                    // the level matrices are symmetric, so one relation
                    // closure serves both directions
                    ok = divergence_round_ok(&ctx, x, y, &rel)
                        && divergence_round_ok(&ctx, y, x, &rel);
                }
                cur[x * n + y] = ok;
            }
        }
        levels.push(cur);
    }

    let surviving = levels[depth][s * n + t];
    let result = if surviving {
        CheckResult::Equivalent
    } else {
        CheckResult::Inequivalent(replay_game_witness(&ctx, &levels, s, t))
    };
    Verdict { relation, result, blocks: 0, params: format!("game depth {}", depth) }
}

/// Divergence clause, one round: if `x` has an infinite tau path within the
/// states prev-related to `y`, then `y` must make at least one tau step to a
/// state prev-related to some state on such a path.
fn divergence_round_ok(
    ctx: &Ctx<'_>,
    x: usize,
    y: usize,
    rel: &dyn Fn(usize, usize) -> bool,
) -> bool {
    let allowed: Vec<bool> = (0..ctx.n).map(|u| rel(u, y)).collect();
    if !allowed[x] {
        return true;
    }
    let succ: Vec<Vec<usize>> = (0..ctx.n)
        .map(|v| {
            if !allowed[v] || ctx.horizon[v] {
                return Vec::new();
            }
            ctx.trans(v)
                .iter()
                .filter(|(l, w)| l.is_tau() && allowed[w.0] && !ctx.horizon[w.0])
                .map(|(_, w)| w.0)
                .collect()
        })
        .collect();
    let mut div: Vec<bool> = succ.iter().map(|ss| !ss.is_empty()).collect();
    loop {
        let mut changed = false;
        for v in 0..ctx.n {
            if div[v] && !succ[v].iter().any(|&w| div[w]) {
                div[v] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !div[x] {
        return true;
    }
    // states on some qualifying path from x
    let mut on_path = vec![false; ctx.n];
    let mut queue = vec![x];
    on_path[x] = true;
    while let Some(v) = queue.pop() {
        for &w in &succ[v] {
            if !on_path[w] {
                on_path[w] = true;
                queue.push(w);
            }
        }
    }
    ctx.tau_plus[y]
        .iter()
        .any(|&y2| (0..ctx.n).any(|u| on_path[u] && rel(u, y2)))
}

fn replay_game_witness(ctx: &Ctx<'_>, levels: &[Vec<bool>], s: usize, t: usize) -> Witness {
    let n = ctx.n;
    let mut steps = Vec::new();
    let mut current = (s, t);
    // find the first level at which the pair dies
    let mut level = match levels.iter().position(|l| !l[s * n + t]) {
        Some(j) => j,
        None => return Witness { steps, reason: WitnessReason::AcceptanceMismatch },
    };
    loop {
        let prev = &levels[level - 1];
        let rel = |u: usize, v: usize| prev[u * n + v];
        let reason = match ctx.violated(current.0, current.1, &rel) {
            Some(r) => r,
            None => {
                // the pair died of the divergence clause
                return Witness { steps, reason: WitnessReason::DivergenceMismatch };
            }
        };
        match reason {
            Reason::Acceptance => {
                return Witness { steps, reason: WitnessReason::AcceptanceMismatch }
            }
            Reason::Divergence => {
                return Witness { steps, reason: WitnessReason::DivergenceMismatch }
            }
            Reason::Move { side, label, target } => {
                let (mover, defender) = match side {
                    Side::Left => (current.0, current.1),
                    Side::Right => (current.1, current.0),
                };
                let orient = |x: usize, y: usize| match side {
                    Side::Left => (x, y),
                    Side::Right => (y, x),
                };
                let intermediates: Vec<usize> = match ctx.relation {
                    Relation::Strong => vec![defender],
                    _ => ctx.tau_reach[defender].clone(),
                };
                let mut action_next: Option<(usize, usize)> = None;
                let mut stutter_next: Option<(usize, usize)> = None;
                for &y2 in &intermediates {
                    let ip = orient(mover, y2);
                    if !rel(ip.0, ip.1) && stutter_next.is_none() {
                        stutter_next = Some(ip);
                    }
                    if label.is_tau() && ctx.relation != Relation::Strong {
                        let np = orient(target, y2);
                        if !rel(np.0, np.1) && action_next.is_none() {
                            action_next = Some(np);
                        }
                    }
                    for (b, y3) in ctx.trans(y2) {
                        if b == &label {
                            let np = orient(target, y3.0);
                            if !rel(np.0, np.1) && action_next.is_none() {
                                action_next = Some(np);
                            }
                        }
                    }
                }
                match (action_next, stutter_next) {
                    (Some(np), _) => {
                        steps.push(label.clone());
                        current = np;
                    }
                    (None, Some(ip)) => {
                        current = ip;
                    }
                    (None, None) => {
                        return Witness { steps, reason: WitnessReason::MissingAction(label) };
                    }
                }
                if level == 1 {
                    // at level 1 only observational distinctions exist, so a
                    // descent from here cannot happen; bail defensively
                    return Witness { steps, reason: WitnessReason::MissingAction(label) };
                }
                level -= 1;
            }
        }
    }
}
