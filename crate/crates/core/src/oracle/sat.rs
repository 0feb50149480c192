//! A small CDCL solver: two watched literals, first-UIP clause learning,
//! activity-ordered decisions and Luby restarts.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Lit(u32);

impl Lit {
    pub fn pos(var: usize) -> Lit {
        Lit((var as u32) << 1)
    }

    pub fn neg(var: usize) -> Lit {
        Lit(((var as u32) << 1) | 1)
    }

    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) struct OutOfBudget;

#[derive(Default)]
pub(crate) struct Cnf {
    vars: usize,
    clauses: Vec<Vec<Lit>>,
    units: Vec<Lit>,
    empty: bool,
}

impl Cnf {
    pub fn new_var(&mut self) -> usize {
        self.vars += 1;
        self.vars - 1
    }

    pub fn add(&mut self, clause: impl IntoIterator<Item = Lit>) {
        let mut c: Vec<Lit> = clause.into_iter().collect();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        match c.len() {
            0 => self.empty = true,
            1 => self.units.push(c[0]),
            _ => self.clauses.push(c),
        }
    }

    /// A satisfying assignment, `None` if there is none, or an error once
    /// more than `budget` conflicts have been seen.
    pub fn solve(self, budget: u64) -> Result<Option<Vec<bool>>, OutOfBudget> {
        if self.empty {
            return Ok(None);
        }
        Solver::new(self).run(budget)
    }
}

struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    value: Vec<Option<bool>>,
    level: Vec<usize>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    /// Trail length at the start of each decision level.
    levels: Vec<usize>,
    head: usize,
    activity: Vec<f64>,
    bump: f64,
    phase: Vec<bool>,
    seen: Vec<bool>,
    conflict: bool,
}

impl Solver {
    fn new(cnf: Cnf) -> Self {
        let n = cnf.vars;
        let mut s = Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); n * 2],
            value: vec![None; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::new(),
            levels: Vec::new(),
            head: 0,
            activity: vec![0.0; n],
            bump: 1.0,
            phase: vec![false; n],
            seen: vec![false; n],
            conflict: false,
        };
        for c in cnf.clauses {
            s.attach(c);
        }
        for u in cnf.units {
            s.conflict |= !s.assign(u, None);
        }
        s
    }

    fn attach(&mut self, c: Vec<Lit>) -> usize {
        let i = self.clauses.len();
        self.watches[c[0].index()].push(i);
        self.watches[c[1].index()].push(i);
        self.clauses.push(c);
        i
    }

    fn lit_value(&self, l: Lit) -> Option<bool> {
        self.value[l.var()].map(|v| v != l.is_neg())
    }

    /// False if `l` is already false.
    fn assign(&mut self, l: Lit, reason: Option<usize>) -> bool {
        match self.lit_value(l) {
            Some(v) => v,
            None => {
                let v = l.var();
                self.value[v] = Some(!l.is_neg());
                self.level[v] = self.levels.len();
                self.reason[v] = reason;
                self.trail.push(l);
                true
            }
        }
    }

    /// Unit propagation; the falsified clause on conflict.
    fn propagate(&mut self) -> Option<usize> {
        while self.head < self.trail.len() {
            let falsified = !self.trail[self.head];
            self.head += 1;
            let mut watching = std::mem::take(&mut self.watches[falsified.index()]);
            let mut i = 0;
            let mut conflict = None;
            while i < watching.len() {
                let ci = watching[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                if self.value[other.var()].map(|v| v != other.is_neg()) == Some(true) {
                    i += 1;
                    continue;
                }
                let replacement = (2..clause.len())
                    .find(|&k| self.value[clause[k].var()].map(|v| v != clause[k].is_neg()) != Some(false));
                if let Some(k) = replacement {
                    clause.swap(1, k);
                    let w = clause[1];
                    self.watches[w.index()].push(ci);
                    watching.swap_remove(i);
                    continue;
                }
                i += 1;
                if !self.assign(other, Some(ci)) {
                    conflict = Some(ci);
                    break;
                }
            }
            self.watches[falsified.index()] = watching;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    /// First-UIP clause learned from a conflict, asserting literal first,
    /// and the level to jump back to.
    fn analyze(&mut self, conflict: usize) -> (Vec<Lit>, usize) {
        let current = self.levels.len();
        let mut learned = vec![Lit(0)];
        let mut pending = 0;
        let mut clause = conflict;
        let mut index = self.trail.len();
        let mut asserting;
        loop {
            let lits = self.clauses[clause].clone();
            let skip = usize::from(clause != conflict);
            for &q in &lits[skip..] {
                let v = q.var();
                if self.seen[v] || self.level[v] == 0 {
                    continue;
                }
                self.seen[v] = true;
                self.activity[v] += self.bump;
                if self.level[v] == current {
                    pending += 1;
                } else {
                    learned.push(q);
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            asserting = self.trail[index];
            self.seen[asserting.var()] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
            clause = self.reason[asserting.var()].expect("implied literal has a reason");
        }
        learned[0] = !asserting;
        for l in &learned[1..] {
            self.seen[l.var()] = false;
        }
        self.bump *= 1.05;
        if self.bump > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.bump *= 1e-100;
        }
        let mut back = 0;
        if learned.len() > 1 {
            let k = (1..learned.len()).max_by_key(|&k| self.level[learned[k].var()]).unwrap();
            learned.swap(1, k);
            back = self.level[learned[1].var()];
        }
        (learned, back)
    }

    fn backjump(&mut self, level: usize) {
        if self.levels.len() <= level {
            return;
        }
        let len = self.levels[level];
        for l in self.trail.drain(len..) {
            self.value[l.var()] = None;
            self.phase[l.var()] = !l.is_neg();
        }
        self.levels.truncate(level);
        self.head = len;
    }

    fn pick(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for v in 0..self.value.len() {
            if self.value[v].is_none() && best.is_none_or(|b| self.activity[v] > self.activity[b]) {
                best = Some(v);
            }
        }
        best
    }

    fn run(mut self, budget: u64) -> Result<Option<Vec<bool>>, OutOfBudget> {
        if self.conflict {
            return Ok(None);
        }
        let mut conflicts = 0u64;
        let mut restart = 1u64;
        let mut since_restart = 0u64;
        loop {
            if let Some(conflict) = self.propagate() {
                if self.levels.is_empty() {
                    return Ok(None);
                }
                conflicts += 1;
                since_restart += 1;
                if conflicts > budget {
                    return Err(OutOfBudget);
                }
                let (learned, back) = self.analyze(conflict);
                self.backjump(back);
                let first = learned[0];
                if learned.len() == 1 {
                    self.assign(first, None);
                } else {
                    let ci = self.attach(learned);
                    self.assign(first, Some(ci));
                }
                continue;
            }
            if since_restart >= 100 * luby(restart) {
                since_restart = 0;
                restart += 1;
                self.backjump(0);
            }
            let Some(v) = self.pick() else {
                return Ok(Some(self.value.iter().map(|v| v.unwrap_or(false)).collect()));
            };
            self.levels.push(self.trail.len());
            let l = if self.phase[v] { Lit::pos(v) } else { Lit::neg(v) };
            self.assign(l, None);
        }
    }
}

/// The Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(i: u64) -> u64 {
    let mut size = 1;
    let mut seq = 0;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut i = i;
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}
