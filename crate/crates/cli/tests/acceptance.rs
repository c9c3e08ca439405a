//! Acceptance suite: one line per criterion, non-zero exit if any fails.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use gridknot::convert::{braid_to_grid, braid_to_pd, grid_to_pd, pd_to_grid, BraidWord, PDCode};
use gridknot::moves::{self, decompose_gen_destabilize, decompose_gen_exchange, enumerate_moves};
use gridknot::simplify::{scramble, simplify, split_search, SearchConfig, Status};
use gridknot::transcript::{self, move_cap};
use gridknot::{GridDiagram, MoveKind};
use gridknot_normal::{
    build_triangulation, coordinate_bound, haken_sum, reconstruct, vertex_enumerate, vertex_link,
};
use num_bigint::{BigInt, BigUint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TREFOIL_N5: &str = include_str!("../../../fixtures/trefoil_n5.grid");
const UNLINK_INTERLEAVED: &str = include_str!("../../../fixtures/unlink_interleaved.grid");
const UNKNOT11_PD: &str = include_str!("../../../fixtures/unknot11.pd");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_grid(rng: &mut ChaCha8Rng, n: usize) -> GridDiagram {
    loop {
        let mut x: Vec<usize> = (0..n).collect();
        let mut o: Vec<usize> = (0..n).collect();
        x.shuffle(rng);
        o.shuffle(rng);
        if let Ok(g) = GridDiagram::new(x, o) {
            return g;
        }
    }
}

fn det(pd: &PDCode) -> BigInt {
    oracle::determinant(&pd.crossings, pd.free_loops)
}

fn crossing_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut violations = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=10);
        let g = random_grid(&mut rng, n);
        if 2 * g.crossing_count() > n * n {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("10000 grids, {violations} violations"))
}

fn move_costs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations = Vec::new();
    let mut by_kind: BTreeMap<MoveKind, usize> = BTreeMap::new();
    let mut done = 0;
    while done < 1000 {
        let n = rng.gen_range(3..=8);
        let g = random_grid(&mut rng, n);
        let kinds: Vec<MoveKind> = MoveKind::ALL
            .into_iter()
            .filter(|k| !enumerate_moves(&g, &[*k]).is_empty())
            .collect();
        let kind = *kinds.choose(&mut rng).expect("cyclic moves are always legal");
        let m = *enumerate_moves(&g, &[kind]).choose(&mut rng).unwrap();
        let h = moves::apply(&g, &m).unwrap();
        let t = transcript::transcript(&g, &m).unwrap();
        if let Err(e) = transcript::verify(&t, &g, &h) {
            violations.push(format!("{m:?}: {e}"));
        }
        let len = t.len();
        let ok = match kind {
            MoveKind::ExchangeCols | MoveKind::ExchangeRows => len <= n,
            MoveKind::CyclicCols | MoveKind::CyclicRows => len <= (n - 1) * (n - 1),
            MoveKind::GenExchange => {
                let steps = decompose_gen_exchange(&g, &m).unwrap();
                let cyclic = steps.iter().filter(|s| matches!(s.kind(), MoveKind::CyclicCols | MoveKind::CyclicRows)).count();
                let exch = steps.iter().filter(|s| matches!(s.kind(), MoveKind::ExchangeCols | MoveKind::ExchangeRows)).count();
                cyclic <= n / 2
                    && exch <= 3 * n * n / 4
                    && cyclic + exch == steps.len()
                    && moves::replay(&g, &steps).unwrap() == h
                    && len <= n * n * n
            }
            MoveKind::GenDestabilize => {
                let steps = decompose_gen_destabilize(&g, &m).unwrap();
                let exch = steps.iter().filter(|s| matches!(s.kind(), MoveKind::ExchangeCols | MoveKind::ExchangeRows)).count();
                let destab = steps.iter().filter(|s| s.kind() == MoveKind::Destabilize).count();
                exch <= n && destab == 1 && exch + destab == steps.len() && moves::replay(&g, &steps).unwrap() == h
            }
            MoveKind::Stabilize | MoveKind::Destabilize => len as u64 <= move_cap(kind, n),
        };
        if !ok {
            violations.push(format!("{m:?} on {g:?}: {len} R-moves"));
        }
        *by_kind.entry(kind).or_default() += 1;
        done += 1;
    }
    let mix: Vec<String> = by_kind.iter().map(|(k, v)| format!("{k:?}={v}")).collect();
    outcome(violations.is_empty(), format!("1000 moves [{}], {} violations", mix.join(" "), violations.len()))
}

fn unknot_recognition() -> Outcome {
    let cfg = SearchConfig::default();
    let mut failures = 0;
    let mut max_n = 0;
    let mut nodes = 0;
    for seed in 0..200u64 {
        let (g, _) = scramble(seed, 12, 7);
        max_n = max_n.max(g.n());
        let r = simplify(&g, &cfg);
        nodes += r.nodes_explored;
        let mut n = g.n() as i64;
        let mut monotone = true;
        for m in &r.move_log {
            let next = n + m.size_delta();
            monotone &= next <= n;
            n = next;
        }
        let replayed = moves::replay(&g, &r.move_log).map(|h| h == r.final_grid).unwrap_or(false);
        if r.status != Status::Trivial || !monotone || !replayed {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("200 scrambles up to n={max_n}, {failures} failures, {nodes} nodes"))
}

fn trefoil_irreducible() -> Outcome {
    let g = GridDiagram::parse(TREFOIL_N5).unwrap();
    let d = det(&grid_to_pd(&g));
    let first = simplify(&g, &SearchConfig::default());
    let second = simplify(&g, &SearchConfig::default());
    let size = match first.status {
        Status::Exhausted { class_size } => Some(class_size),
        _ => None,
    };
    let pass = d == BigInt::from(3) && size.is_some() && first == second;
    outcome(pass, format!("determinant {d}, status {:?}, deterministic {}", first.status, first == second))
}

fn unknot11_end_to_end() -> Outcome {
    let pd = PDCode::parse(UNKNOT11_PD).unwrap();
    let c = pd.crossings.len();
    let (g, rep) = pd_to_grid(&pd).unwrap();
    let cfg = SearchConfig { node_budget: 10_000_000, ..SearchConfig::default() };
    let r = simplify(&g, &cfg);
    let budget = transcript::budget_report_exact(&g, &r.move_log, c).unwrap();
    let total = budget.r_moves_exact.clone().unwrap() + BigUint::from(rep.r_moves);
    let cap = BigUint::from(231u64 * c as u64).pow(11);
    let pass = c == 11 && r.status == Status::Trivial && total <= cap && budget.all_ok();
    outcome(
        pass,
        format!(
            "substitute 11-crossing unknot diagram; grid n={} (raw {}), status {:?}, {} moves, {} R-moves <= (231*11)^11",
            g.n(),
            rep.arc_index_raw,
            r.status,
            r.move_log.len(),
            total
        ),
    )
}

fn split_goal() -> Outcome {
    let g = GridDiagram::parse(UNLINK_INTERLEAVED).unwrap();
    let r = split_search(&g, &SearchConfig::default());
    let verified = match r.status {
        Status::Disconnected { certificate } => certificate.verify(&r.final_grid),
        _ => false,
    };
    let interleaved = g.is_disconnected().is_none() && g.component_count() == 2;
    outcome(
        verified && interleaved && g.n() <= 6,
        format!("n={}, {} moves, certificate verified {verified}", g.n(), r.move_log.len()),
    )
}

fn triangulation_audit() -> Outcome {
    let bad: Vec<usize> = (2..=16).filter(|&n| !build_triangulation(n).unwrap().audit().ok_for(n)).collect();
    outcome(bad.is_empty(), format!("n=2..16, failures at {bad:?}"))
}

fn normal_enumeration() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for n in [2usize, 3] {
        let tri = build_triangulation(n).unwrap();
        let vs = vertex_enumerate(&tri, 1).unwrap();
        let bound = coordinate_bound(&tri);
        let links_ok = (0..2 * n).all(|v| {
            let l = vertex_link(&tri, v);
            vs.contains(&l) && reconstruct(&tri, &l).unwrap().euler == 2
        });
        let vectors_ok = vs.iter().all(|v| v.satisfies_matching && v.satisfies_compatibility && v.max_coord() <= bound);
        let mut rng = ChaCha8Rng::seed_from_u64(8 + n as u64);
        let (mut sums, mut tries, mut additive) = (0, 0, true);
        while sums < 100 && tries < 100_000 {
            tries += 1;
            let (a, b) = (vs.choose(&mut rng).unwrap(), vs.choose(&mut rng).unwrap());
            let s = haken_sum(&tri, a, b);
            if !s.satisfies_compatibility {
                continue;
            }
            let e = |v| reconstruct(&tri, v).unwrap().euler;
            additive &= e(&s) == e(a) + e(b);
            sums += 1;
        }
        pass &= links_ok && vectors_ok && additive && sums == 100;
        details.push(format!("n={n}: {} vectors, links {links_ok}, bound {vectors_ok}, {sums} sums additive {additive}", vs.len()));
    }
    outcome(pass, details.join("; "))
}

fn conversion_oracle() -> Outcome {
    let mut braids: Vec<BraidWord> = [
        (1, vec![]),
        (2, vec![1, 1, 1]),
        (2, vec![-1, -1, -1]),
        (3, vec![1, -2, 1, -2]),
        (2, vec![1, 1, 1, 1, 1]),
        (2, vec![1, 1]),
        (2, vec![1, -1, 1]),
        (3, vec![1, 1, 1, 2, -1, 2]),
        (4, vec![2, -1, 2, 1, 1, 2, -1, -2, 1, -2, 3]),
    ]
    .into_iter()
    .map(|(k, l)| BraidWord::new(k, l).unwrap())
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let k = rng.gen_range(2..=4);
        let len = rng.gen_range(1..=12);
        let letters = (0..len)
            .map(|_| {
                let g = rng.gen_range(1..k as i64);
                if rng.gen_bool(0.5) {
                    g
                } else {
                    -g
                }
            })
            .collect();
        braids.push(BraidWord::new(k, letters).unwrap());
    }
    let mut mismatches = 0;
    let mut checked = 0;
    for b in &braids {
        let pd = braid_to_pd(b);
        let d = det(&pd);
        let (g, _) = braid_to_grid(b);
        if det(&grid_to_pd(&g)) != d {
            mismatches += 1;
        }
        let (g2, _) = pd_to_grid(&pd).unwrap();
        if det(&grid_to_pd(&g2)) != d {
            mismatches += 1;
        }
        checked += 2;
    }
    let pd = PDCode::parse(UNKNOT11_PD).unwrap();
    let (g, _) = pd_to_grid(&pd).unwrap();
    if det(&grid_to_pd(&g)) != det(&pd) {
        mismatches += 1;
    }
    checked += 1;
    outcome(mismatches == 0, format!("{checked} conversions, {mismatches} mismatches"))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("crossing bound", Duration::from_secs(10), crossing_bound),
        ("move-cost lemmas", Duration::from_secs(60), move_costs),
        ("monotone unknot recognition", Duration::from_secs(300), unknot_recognition),
        ("trefoil irreducibility", Duration::from_secs(120), trefoil_irreducible),
        ("11-crossing unknot end to end", Duration::from_secs(600), unknot11_end_to_end),
        ("split-link goal", Duration::from_secs(60), split_goal),
        ("triangulation audit", Duration::from_secs(1), triangulation_audit),
        ("normal enumeration", Duration::from_secs(600), normal_enumeration),
        ("conversion oracle equivalence", Duration::from_secs(600), conversion_oracle),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.pass && took <= *limit;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} [{}] {} ({:.2?} of {:?})",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            name,
            o.detail,
            took,
            limit
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
