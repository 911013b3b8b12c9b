//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Expected values come from oracles written here, independently of the
//! engines: direct arithmetic, brute-force word search, a memoized parser,
//! explicit function iteration and exhaustive enumeration.
//!
//! Some claims are known to be false as stated (see the notes printed with
//! them); such a criterion still prints FAIL, but only failures of other
//! claims make the process exit with an error.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use muho::apps::{self, Instance, ReachLattice, UnaryChoice};
use muho::eval::{evaluate, EvalError, Mode, Outcome};
use muho::gen::{small_lattices, TermGen};
use muho::lattice::{value_leq, Domains, Elem, Lattice};
use muho::syntax::{beta_normalize, is_beta_normal, Param, Term, Type, Variance};
use muho::typecheck::typecheck_closed;

const CAP: usize = 1 << 22;

struct Claim {
    text: String,
    ok: bool,
    /// Set when the claim cannot hold for any correct implementation.
    unattainable: Option<&'static str>,
}

#[derive(Default)]
struct Criterion {
    claims: Vec<Claim>,
}

impl Criterion {
    fn claim(&mut self, ok: bool, text: impl Into<String>) {
        self.claims.push(Claim { text: text.into(), ok, unattainable: None });
    }

    fn known_false(&mut self, ok: bool, text: impl Into<String>, why: &'static str) {
        self.claims.push(Claim { text: text.into(), ok, unattainable: Some(why) });
    }

    fn within(&mut self, t: Duration, limit: Duration) {
        self.claim(t <= limit, format!("time {:.2}s within {:.0}s", t.as_secs_f64(), limit.as_secs_f64()));
    }
}

fn local(inst: &Instance) -> Outcome {
    inst.evaluate(Mode::Local, CAP).unwrap_or_else(|e| panic!("{}: {e}", inst.name))
}

fn global(inst: &Instance) -> Result<Outcome, EvalError> {
    inst.evaluate(Mode::Global, CAP)
}

fn result(inst: &Instance, out: &Outcome) -> String {
    out.value.render(&inst.lattice)
}

// ---------------------------------------------------------------- collatz

/// Numbers visited by the search from `x` modulo `2^n` until it reaches 0 or
/// repeats.
fn collatz_orbit(n: u32, x: u64) -> (bool, BTreeSet<u64>) {
    let m = 1u64 << n;
    let mut seen = BTreeSet::new();
    let mut x = x;
    loop {
        if !seen.insert(x) {
            return (false, seen);
        }
        if x == 0 {
            return (true, seen);
        }
        x = if x % 2 == 0 { x / 2 } else { (3 * x + 1) % m };
    }
}

fn discovered_numbers(inst: &Instance, out: &Outcome) -> BTreeSet<u64> {
    let top = inst.lattice.top();
    out.stats
        .fixpoint("F")
        .unwrap()
        .tuples
        .iter()
        .map(|(args, _)| {
            args.iter()
                .enumerate()
                .filter(|(_, v)| v.as_elem() == Some(top))
                .map(|(i, _)| 1u64 << i)
                .sum()
        })
        .collect()
}

fn criterion_1(c: &mut Criterion) {
    let start = Instant::now();
    for (query, bits) in [(5u64, [true, false, true]), (3, [true, true, false])] {
        let inst = apps::collatz_bits(&bits).unwrap();
        let out = local(&inst);
        let (reaches, orbit) = collatz_orbit(3, query);
        let expected = if reaches { "top" } else { "bot" };
        let found = discovered_numbers(&inst, &out);
        c.claim(
            result(&inst, &out) == expected,
            format!("query {query}: local result {} (oracle {expected})", result(&inst, &out)),
        );
        c.claim(found == orbit, format!("query {query}: discovered {found:?} (oracle {orbit:?})"));
        let g = global(&inst).unwrap();
        let f = g.stats.fixpoint("F").unwrap();
        c.claim(f.width == 8, format!("query {query}: global width {}", f.width));
        c.claim(f.rounds <= 3, format!("query {query}: global stable after {} rounds", f.rounds));
        c.claim(g.value == out.value, format!("query {query}: global result agrees"));
    }
    c.within(start.elapsed(), Duration::from_secs(1));
}

// ---------------------------------------------------------------- hfl

/// Direct solution: the functions `<a>^(2^k)` as explicit maps on state
/// sets, then the greatest fixpoint of `F` restricted to them.
fn hfl_oracle(n: usize) -> (u32, usize) {
    let size = 1usize << n;
    let edges = apps::hfl_edges(n);
    let pre = |label: char, s: usize| -> usize {
        edges
            .iter()
            .filter(|e| e.1 == label && s >> e.2 & 1 == 1)
            .fold(0, |acc, e| acc | 1 << e.0)
    };
    // funs[k] = <a>^(2^k) until the sequence repeats; next[k] is the
    // index of funs[k] composed with itself
    let mut funs: Vec<Vec<usize>> = vec![(0..size).map(|s| pre('a', s)).collect()];
    let mut next = Vec::new();
    loop {
        let f = funs.last().unwrap();
        let ff: Vec<usize> = (0..size).map(|s| f[f[s]]).collect();
        match funs.iter().position(|g| *g == ff) {
            Some(i) => {
                next.push(i);
                break;
            }
            None => {
                next.push(funs.len());
                funs.push(ff);
            }
        }
    }
    let mut val = vec![size - 1; funs.len()];
    loop {
        let new: Vec<usize> = (0..funs.len())
            .map(|k| funs[k][1] & pre('b', val[next[k]]))
            .collect();
        if new == val {
            break;
        }
        val = new;
    }
    (val[0] as u32, funs.len())
}

fn is_monotone(l: &Lattice, f: &[u32]) -> bool {
    (0..l.size()).all(|x| {
        (0..l.size()).all(|y| !l.leq(Elem(x as u32), Elem(y as u32)) || l.leq(Elem(f[x]), Elem(f[y])))
    })
}

/// Every function `l -> l`, by counting in base `|l|`.
fn all_unary(l: &Lattice) -> Vec<Vec<u32>> {
    let k = l.size();
    let total = k.pow(k as u32);
    (0..total)
        .map(|mut code| {
            (0..k)
                .map(|_| {
                    let d = code % k;
                    code /= k;
                    d as u32
                })
                .collect()
        })
        .collect()
}

fn criterion_2(c: &mut Criterion) {
    let start = Instant::now();
    let mut counts = Vec::new();
    for n in 2..=7 {
        let inst = apps::hfl(n).unwrap();
        let out = local(&inst);
        let (set, distinct) = hfl_oracle(n);
        let f = out.stats.fixpoint("F").unwrap();
        c.claim(
            result(&inst, &out) == "{1}" && out.value.as_elem() == Some(Elem(set)),
            format!("n={n}: result {} (oracle {})", result(&inst, &out), inst.lattice.name(Elem(set))),
        );
        c.claim(f.arguments == distinct, format!("n={n}: {} arguments (oracle {distinct})", f.arguments));
        counts.push(f.arguments);
    }
    c.claim(counts == [2, 2, 2, 3, 3, 4], format!("argument counts {counts:?}"));
    let inst = apps::hfl(2).unwrap();
    c.claim(global(&inst).unwrap().value == local(&inst).value, "n=2: global agrees");
    let unary = Type::first_order(1, Variance::Plus);
    let enumerated = Domains::new(&inst.lattice, CAP).get(&unary).unwrap().len();
    let all = all_unary(&inst.lattice);
    let monotone = all.iter().filter(|f| is_monotone(&inst.lattice, f)).count();
    c.claim(enumerated == monotone, format!("n=2: enumerated domain {enumerated} (brute force {monotone})"));
    c.known_false(
        enumerated == 256,
        format!("n=2: {enumerated} monotone transformers, 256 required ({} functions in all)", all.len()),
        "256 counts every function on the four subsets; only the monotone ones inhabit the argument type",
    );
    c.within(start.elapsed(), Duration::from_secs(10));
}

// ---------------------------------------------------------------- reach

/// Whether some `a^k b^k c^k`, `1 <= k <= bound`, leads from 0 to 0.
fn word_search(g: &apps::ReachGraph, bound: usize) -> Option<usize> {
    let edges = g.edges();
    let step = |set: &HashSet<usize>, label: char| -> HashSet<usize> {
        edges
            .iter()
            .filter(|e| e.1 == label && set.contains(&e.0))
            .map(|e| e.2)
            .collect()
    };
    (1..=bound).find(|&k| {
        let mut set: HashSet<usize> = [0].into();
        for label in ['a', 'b', 'c'] {
            for _ in 0..k {
                set = step(&set, label);
            }
        }
        set.contains(&0)
    })
}

fn criterion_3(c: &mut Criterion) {
    let start = Instant::now();
    let mut counts = Vec::new();
    for n in 2..=5 {
        let g = apps::reach_graph(n).unwrap();
        let inst = apps::reach(&g, ReachLattice::Flat).unwrap();
        let out = local(&inst);
        let witness = word_search(&g, 1000);
        c.claim(
            result(&inst, &out) == "top" && witness.is_some(),
            format!("n={n}: local {} (shortest witness k={witness:?})", result(&inst, &out)),
        );
        let width = out.stats.fixpoint("F").unwrap().width;
        c.claim(
            Some(width) == witness,
            format!("n={n}: {width} discovered triples, one per k up to the witness"),
        );
        counts.push(width);
    }
    let increasing = counts.windows(2).all(|w| w[0] < w[1]);
    let constant = counts[0] as f64 / 8.0;
    let bounded = counts.iter().zip(2..).all(|(w, n)| *w as f64 <= constant * (n * n * n) as f64);
    let cubic = counts.iter().zip(2usize..).all(|(w, n)| *w <= n * (n + 1) * (n + 2));
    c.claim(cubic, format!("counts {counts:?} stay below n(n+1)(n+2)"));
    c.known_false(
        increasing && bounded,
        format!("counts {counts:?} strictly increasing and within C n^3 for C = {constant} fitted at n=2"),
        "the cycle lengths n, n+1, n+2 are not co-prime for even n, so the count is lcm(n, n+1, n+2): \
         12 at n=2 gives C = 1.5, while n=3 needs 60 > 40.5, and n=3, 4 both give 60",
    );
    let cut = apps::reach_graph(2).unwrap().cut_c_loop();
    let inst = apps::reach(&cut, ReachLattice::Flat).unwrap();
    let out = local(&inst);
    let witness = word_search(&cut, 60);
    c.claim(
        result(&inst, &out) == "bot" && witness.is_none(),
        format!("cut loop: local {} (word search up to k=60 finds {witness:?})", result(&inst, &out)),
    );
    let inst = apps::reach(&apps::reach_graph(2).unwrap(), ReachLattice::Powerset).unwrap();
    let out = local(&inst);
    c.claim(
        out.value.as_elem().is_some_and(|e| e.0 & 1 == 1),
        format!("powerset n=2: result {} contains 0", result(&inst, &out)),
    );
    c.within(start.elapsed(), Duration::from_secs(60));
}

// ---------------------------------------------------------------- indent

/// Memoized recognizer: `B(I_m)` where `I_m` is "at least m spaces".
struct Parser<'w> {
    w: &'w [u8],
    memo: HashMap<(usize, usize), BTreeSet<usize>>,
}

impl Parser<'_> {
    fn block(&mut self, pos: usize, m: usize) -> BTreeSet<usize> {
        if let Some(r) = self.memo.get(&(pos, m)) {
            return r.clone();
        }
        let mut out: BTreeSet<usize> = [pos].into();
        let mut e = pos;
        let mut spaces = 0;
        while e < self.w.len() && self.w[e] == b' ' {
            e += 1;
            spaces += 1;
            if spaces >= m && e < self.w.len() {
                match self.w[e] {
                    b'c' => out.extend(self.block(e + 1, m)),
                    b'b' => out.extend(self.block(e + 1, m + 1)),
                    _ => {}
                }
            }
        }
        self.memo.insert((pos, m), out.clone());
        out
    }

    fn accepts(word: &str) -> bool {
        let w = word.as_bytes();
        if w.first() != Some(&b'b') {
            return false;
        }
        let mut p = Parser { w, memo: HashMap::new() };
        p.block(1, 1).contains(&w.len())
    }
}

fn random_program(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    let mut w = String::from("b");
    let mut indent = 1;
    loop {
        let depth = rng.gen_range(1..=indent);
        let extra = rng.gen_range(0..2);
        let opener = rng.gen_bool(0.3);
        let line = format!("{}{}", " ".repeat(depth + extra), if opener { 'b' } else { 'c' });
        if w.len() + line.len() > max_len {
            return w;
        }
        w.push_str(&line);
        if opener {
            indent = depth + extra + 1;
        } else {
            indent = indent.max(1);
        }
    }
}

fn criterion_4(c: &mut Criterion) {
    let start = Instant::now();
    let example = apps::INDENT_EXAMPLE;
    let inst = apps::indent(example).unwrap();
    let out = local(&inst);
    c.claim(
        result(&inst, &out) == "top" && Parser::accepts(example),
        format!("example {example:?}: {}", result(&inst, &out)),
    );
    // mutations: single deletions and substitutions
    let chars: Vec<char> = example.chars().collect();
    let mut mutations: BTreeSet<String> = BTreeSet::new();
    for i in 0..chars.len() {
        let mut d = chars.clone();
        d.remove(i);
        mutations.insert(d.into_iter().collect());
        for r in ['b', 'c', ' '] {
            let mut s = chars.clone();
            s[i] = r;
            mutations.insert(s.into_iter().collect());
        }
    }
    mutations.remove(example);
    let mut words = mutations.clone();
    words.insert("b c   c".to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..12 {
        words.insert(random_program(&mut rng, 24));
    }
    for _ in 0..12 {
        let len = rng.gen_range(2..=24);
        let w: String = (0..len).map(|_| [' ', 'b', 'c'][rng.gen_range(0..3)]).collect();
        words.insert(w);
    }
    let (mut agree, mut rejected, mut bound_ok, mut tested) = (0, 0, 0, 0);
    let mut disagreements = Vec::new();
    for w in words.iter().filter(|w| w.len() >= 2 && w.len() <= 24) {
        tested += 1;
        let inst = apps::indent(w).unwrap();
        let out = local(&inst);
        let accepted = out.value.as_elem() == Some(inst.lattice.top());
        if accepted == Parser::accepts(w) {
            agree += 1;
        } else {
            disagreements.push(w.clone());
        }
        if !accepted && mutations.contains(w) {
            rejected += 1;
        }
        let args = out.stats.fixpoint("B").map_or(0, |f| f.arguments);
        if args <= w.len() - 1 {
            bound_ok += 1;
        }
    }
    c.claim(
        agree == tested,
        format!("{agree}/{tested} words agree with the parser oracle {disagreements:?}"),
    );
    c.claim(rejected >= 3, format!("{rejected} of {} mutations of the example rejected", mutations.len()));
    c.claim(bound_ok == tested, format!("arguments of B within |word| - 1 on {bound_ok}/{tested} words"));
    let flagged = "b c   c";
    c.claim(
        Parser::accepts(flagged) == (local(&apps::indent(flagged).unwrap()).stats.result == "top"),
        format!("{flagged:?} (a deeper c without a b) is accepted by both, as the grammar allows"),
    );
    c.within(start.elapsed(), Duration::from_secs(10));
}

// ---------------------------------------------------------------- strictness

/// Least fixpoint of `I(x) = p(x) and (I(f(x)) or x)` on the two points.
fn strictness_oracle(f: [u32; 2], p: [u32; 2]) -> u32 {
    let mut i = [0u32; 2];
    loop {
        let new = [0, 1].map(|x: usize| p[x] & (i[f[x] as usize] | x as u32));
        if new == i {
            return i[0];
        }
        i = new;
    }
}

fn table(c: UnaryChoice) -> [u32; 2] {
    match c {
        UnaryChoice::Const0 => [0, 0],
        UnaryChoice::Const1 => [1, 1],
        UnaryChoice::Identity => [0, 1],
    }
}

fn criterion_5(c: &mut Criterion) {
    use UnaryChoice::*;
    let start = Instant::now();
    for (f, p, expected) in [(Const1, Identity, "0"), (Identity, Const1, "0"), (Const1, Const1, "1")] {
        let inst = apps::strictness(f, p).unwrap();
        let out = local(&inst);
        let oracle = inst.lattice.name(Elem(strictness_oracle(table(f), table(p))));
        c.claim(
            result(&inst, &out) == expected && oracle == expected,
            format!("f={} p={}: {} (oracle {oracle})", f.name(), p.name(), result(&inst, &out)),
        );
    }
    let inst = apps::strictness(Const1, Const1).unwrap();
    let l = local(&inst);
    let g = global(&inst).unwrap();
    let lw = l.stats.fixpoint("I").unwrap().width;
    let gw = g.stats.fixpoint("I").unwrap().width;
    let monotone = all_unary(&inst.lattice).iter().filter(|f| is_monotone(&inst.lattice, f)).count();
    c.claim(lw <= 3, format!("local width {lw}"));
    c.claim(gw == monotone * monotone * 2, format!("global width {gw} = {monotone}*{monotone}*2"));
    c.known_false(
        gw == 32,
        format!("global width {gw}, 32 required"),
        "32 = 4*4*2 counts all four functions on two points; (o+) -> o has three monotone ones",
    );
    c.within(start.elapsed(), Duration::from_secs(1));
}

// ---------------------------------------------------------------- worst case

fn criterion_6(c: &mut Criterion) {
    let start = Instant::now();
    for n in 1..=8usize {
        let inst = apps::worstcase(n).unwrap();
        let out = local(&inst);
        // the argument sequence, computed on bitmasks
        let full = (1u32 << n) - 1;
        let dia = |x: u32| (0..n).filter(|&i| x & ((1 << i) - 1) != 0).fold(0, |s, i| s | 1 << i);
        let boxed = |x: u32| (0..n).filter(|&i| x & ((1 << i) - 1) == (1 << i) - 1).fold(0, |s, i| s | 1 << i);
        let mut seen = HashSet::new();
        let mut x = 0u32;
        while seen.insert(x) {
            x = (x & dia(!x & full)) | (!x & full & boxed(x));
        }
        let width = out.stats.fixpoint("F").unwrap().width;
        c.claim(
            out.value.as_elem() == Some(Elem(full)) && width == 1 << n && seen.len() == 1 << n,
            format!("n={n}: {} with {width} arguments (oracle {})", result(&inst, &out), seen.len()),
        );
    }
    c.within(start.elapsed(), Duration::from_secs(30));
}

// ---------------------------------------------------------------- oracle equivalence

fn criterion_7(c: &mut Criterion) {
    let start = Instant::now();
    let (mut compared, mut skipped, mut bad) = (0, 0, Vec::new());
    let mut seed = 0u64;
    while compared < 600 && seed < 2000 {
        let g = TermGen::new(seed).closed(5);
        seed += 1;
        let glob = match evaluate(&g.term, &g.signature, &g.lattice, Mode::Global, 50_000) {
            Ok(o) => o,
            Err(EvalError::Resource(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => panic!("seed {}: {e}", seed - 1),
        };
        let loc = evaluate(&g.term, &g.signature, &g.lattice, Mode::Local, 50_000).unwrap();
        compared += 1;
        if loc.value != glob.value {
            bad.push(seed - 1);
        }
    }
    c.claim(compared >= 500, format!("{compared} random terms compared ({skipped} over the cap)"));
    c.claim(bad.is_empty(), format!("disagreements at seeds {bad:?}"));
    // shipped instances whose global evaluation fits the cap
    let mut shipped: Vec<Instance> = Vec::new();
    for n in 1..=4 {
        for q in 0..1u64 << n {
            shipped.push(apps::collatz(n, q).unwrap());
        }
    }
    for f in UnaryChoice::ALL {
        for p in UnaryChoice::ALL {
            shipped.push(apps::strictness(f, p).unwrap());
        }
    }
    shipped.push(apps::hfl(2).unwrap());
    for n in 1..=3 {
        shipped.push(apps::worstcase(n).unwrap());
    }
    let agree = shipped.iter().filter(|i| global(i).unwrap().value == local(i).value).count();
    c.claim(agree == shipped.len(), format!("{agree}/{} shipped instances agree", shipped.len()));
    for inst in [apps::indent("b c").unwrap(), apps::reach(&apps::reach_graph(2).unwrap(), ReachLattice::Flat).unwrap()] {
        let over = matches!(global(&inst), Err(EvalError::Resource(_)));
        c.claim(over, format!("{}: global evaluation reports the cap instead of running", inst.name));
    }
    c.within(start.elapsed(), Duration::from_secs(300));
}

// ---------------------------------------------------------------- monotonicity

fn criterion_8(c: &mut Criterion) {
    let start = Instant::now();
    let (mut checked, mut pairs, mut violations) = (0, 0u64, Vec::new());
    let lattices = [Lattice::two(), Lattice::boolean()];
    let types = [Type::Ground, Type::first_order(1, Variance::Plus), Type::first_order(1, Variance::Both)];
    let mut seed = 0u64;
    while checked < 240 {
        let mut g = TermGen::new(1000 + seed);
        seed += 1;
        let lattice = &lattices[(seed % 2) as usize];
        let sig = g.signature(lattice);
        let ty = types[(seed / 2 % 3) as usize].clone();
        let v = if seed / 6 % 2 == 0 { Variance::Plus } else { Variance::Minus };
        let body = g.open("y", &ty, v, 4);
        if !body.free_vars().contains("y") {
            continue;
        }
        let lam = Term::lam(vec![Param::new("y", v, ty.clone())], body.clone());
        let out = evaluate(&lam, &sig, lattice, Mode::Global, 1 << 16).unwrap();
        let table = out.value.as_table().unwrap();
        let dom = &table.params()[0];
        checked += 1;
        for i in 0..dom.len() {
            for j in 0..dom.len() {
                if i == j || !dom.leq(lattice, i, j) {
                    continue;
                }
                pairs += 1;
                let (a, b) = (&table.entries()[i], &table.entries()[j]);
                let ok = match v {
                    Variance::Plus => value_leq(lattice, a, b),
                    _ => value_leq(lattice, b, a),
                };
                if !ok {
                    violations.push(body.to_string());
                }
            }
        }
    }
    c.claim(checked >= 200, format!("{checked} open terms, {pairs} ordered pairs"));
    c.claim(violations.is_empty(), format!("{} violations {:?}", violations.len(), violations.first()));
    c.within(start.elapsed(), Duration::from_secs(300));
}

// ---------------------------------------------------------------- invariants

fn lattice_axioms(l: &Lattice) -> bool {
    let els: Vec<Elem> = l.elements().collect();
    let leq = |a: Elem, b: Elem| l.leq(a, b);
    els.iter().all(|&a| {
        leq(l.bot(), a)
            && leq(a, l.top())
            && leq(a, a)
            && els.iter().all(|&b| {
                let (j, m) = (l.join(a, b), l.meet(a, b));
                (!(leq(a, b) && leq(b, a)) || a == b)
                    && leq(a, j)
                    && leq(b, j)
                    && leq(m, a)
                    && leq(m, b)
                    && l.join(a, m) == a
                    && l.meet(a, j) == a
                    && els.iter().all(|&x| {
                        (!(leq(a, b) && leq(b, x)) || leq(a, x))
                            && (!(leq(a, x) && leq(b, x)) || leq(j, x))
                            && (!(leq(x, a) && leq(x, b)) || leq(x, m))
                    })
            })
            && l.complement(a).is_none_or(|c| l.join(a, c) == l.top() && l.meet(a, c) == l.bot())
    })
}

fn criterion_9(c: &mut Criterion) {
    let start = Instant::now();
    let mut lattices = small_lattices();
    lattices.extend([Lattice::flat(3), Lattice::flat(7), Lattice::powerset_n(3).unwrap()]);
    let good = lattices.iter().filter(|l| lattice_axioms(l)).count();
    c.claim(good == lattices.len(), format!("lattice axioms hold on {good}/{} lattices", lattices.len()));

    let (mut preserved, mut total, mut redexes) = (0, 0, 0);
    for seed in 0..300 {
        let g = TermGen::new(5000 + seed).closed(4);
        let nf = beta_normalize(&g.term);
        total += 1;
        redexes += usize::from(nf != g.term);
        let ty_ok = typecheck_closed(&nf, &g.signature).ok() == typecheck_closed(&g.term, &g.signature).ok();
        let a = evaluate(&g.term, &g.signature, &g.lattice, Mode::Global, 1 << 16);
        let b = evaluate(&nf, &g.signature, &g.lattice, Mode::Global, 1 << 16);
        if ty_ok && is_beta_normal(&nf) && matches!((a, b), (Ok(x), Ok(y)) if x.value == y.value) {
            preserved += 1;
        }
    }
    c.claim(
        preserved == total,
        format!("beta normalization keeps type and value on {preserved}/{total} terms ({redexes} changed)"),
    );

    let mut shipped = vec![
        apps::collatz(3, 5).unwrap(),
        apps::collatz(3, 3).unwrap(),
        apps::collatz(8, 27).unwrap(),
        apps::indent(apps::INDENT_EXAMPLE).unwrap(),
        apps::reach(&apps::reach_graph(2).unwrap().cut_c_loop(), ReachLattice::Flat).unwrap(),
        apps::reach(&apps::reach_graph(2).unwrap(), ReachLattice::Powerset).unwrap(),
    ];
    shipped.extend((2..=5).map(|n| apps::reach(&apps::reach_graph(n).unwrap(), ReachLattice::Flat).unwrap()));
    shipped.extend((2..=7).map(|n| apps::hfl(n).unwrap()));
    shipped.extend((1..=8).map(|n| apps::worstcase(n).unwrap()));
    for f in UnaryChoice::ALL {
        for p in UnaryChoice::ALL {
            shipped.push(apps::strictness(f, p).unwrap());
        }
    }
    let mut runs = 0;
    let mut broken = Vec::new();
    for inst in &shipped {
        let mut outs = vec![local(inst)];
        // global runs only where the domains are small
        if let Ok(g) = inst.evaluate(Mode::Global, 1 << 16) {
            outs.push(g);
        }
        for o in outs {
            runs += 1;
            if o.stats.chain_violations() != 0 {
                broken.push(format!("{} {}", inst.name, o.stats.mode));
            }
        }
    }
    c.claim(
        broken.is_empty(),
        format!("iteration chains monotone in {} of {runs} runs over {} instances {broken:?}", runs - broken.len(), shipped.len()),
    );
    c.within(start.elapsed(), Duration::from_secs(300));
}

fn main() {
    let criteria: [(&str, fn(&mut Criterion)); 9] = [
        ("worked first-order example", criterion_1),
        ("higher-order modal formula", criterion_2),
        ("reachability", criterion_3),
        ("indentation parsing", criterion_4),
        ("strictness analysis", criterion_5),
        ("worst case", criterion_6),
        ("local and global agree", criterion_7),
        ("monotonicity of well-typed terms", criterion_8),
        ("algebraic invariants", criterion_9),
    ];
    let (mut failed, mut only_unattainable, mut unexpected) = (0, 0, 0);
    for (i, (name, run)) in criteria.iter().enumerate() {
        let mut c = Criterion::default();
        run(&mut c);
        let pass = c.claims.iter().all(|k| k.ok);
        let surprising = c.claims.iter().filter(|k| !k.ok && k.unattainable.is_none()).count();
        failed += usize::from(!pass);
        only_unattainable += usize::from(!pass && surprising == 0);
        unexpected += surprising;
        println!("criterion {}: {} ({name})", i + 1, if pass { "PASS" } else { "FAIL" });
        for k in &c.claims {
            println!("    {} {}", if k.ok { "ok  " } else { "FAIL" }, k.text);
            if let (false, Some(why)) = (k.ok, k.unattainable) {
                println!("         unattainable as stated: {why}");
            }
        }
    }
    println!(
        "{} of {} criteria pass; {failed} fail, {only_unattainable} of them only on claims that are unattainable as stated",
        criteria.len() - failed,
        criteria.len(),
    );
    if unexpected > 0 {
        std::process::exit(1);
    }
}
