//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if a
//! hard criterion fails. Soft criteria print SOFT-FAIL and do not fail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use seatalloc::floorplan::{FloorPlan, SeatKind};
use seatalloc::geometry::Point;
use seatalloc::hierarchy::{check_allocation, delayed_office_allocate, df_hsa, leaf_office_cost, Hierarchy};
use seatalloc::model::{validate, SaProblem, SolverParams};
use seatalloc::oracle::{brute_force_miqp, brute_force_sa, miqp_objective, MIQP_MAX_SEATS};
use seatalloc::pipeline::{self, DistanceConfig, DistanceMode, SolveConfig};
use seatalloc::roadmap::{generate_prm, RoadmapParams};
use seatalloc::solvers::{gsa_solve, ica_solve, ipsa_solve, ls_improve, solve};
use seatalloc::{distance, synth, DistanceMatrix, Method};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

const EPS: f64 = 1e-9;

fn tiny_sweep() -> Vec<SaProblem> {
    (0..300).map(synth::tiny_instance).collect()
}

fn oracle_optimality(sweep: &[SaProblem]) -> Outcome {
    let start = Instant::now();
    let params = SolverParams::default();
    let mut worst: f64 = 0.0;
    let mut mixed = 0;
    let mut failures = Vec::new();
    for (seed, p) in sweep.iter().enumerate() {
        if p.demand(SeatKind::Desk) > 0 && p.demand(SeatKind::Office) > 0 {
            mixed += 1;
        }
        let exact = brute_force_sa(p).expect("instance inside the oracle guard");
        let got = ipsa_solve(p, &params).expect("ipsa solves");
        let gap = (got.objective - exact.objective).abs();
        worst = worst.max(gap);
        if gap > EPS || !got.optimal {
            failures.push(seed);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && sweep.len() >= 200 && secs < 60.0,
        format!(
            "{} instances ({mixed} need both desks and offices), max |ipsa - brute force| = {worst:.1e}, {secs:.1}s, failing seeds {failures:?}",
            sweep.len()
        ),
    )
}

fn heuristic_sandwich(sweep: &[SaProblem]) -> Outcome {
    let params = SolverParams::default();
    let mut bad = Vec::new();
    let mut ls_checks = 0;
    for (seed, p) in sweep.iter().enumerate() {
        let opt = brute_force_sa(p).unwrap().objective;
        let ica = ica_solve(p, &params).unwrap();
        let gsa = gsa_solve(p, &params).unwrap();
        let ica_ls = ls_improve(p, &ica, &params).unwrap();
        let gsa_ls = ls_improve(p, &gsa, &params).unwrap();
        ls_checks += 2;
        let ok = opt <= ica_ls.objective + EPS
            && ica_ls.objective <= ica.objective + EPS
            && opt <= gsa.objective + EPS
            && gsa_ls.objective <= gsa.objective + EPS;
        if !ok {
            bad.push(seed);
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "optimum <= LS(ICA) <= ICA and optimum <= GSA on {} instances, {ls_checks} LS monotonicity checks, violations {bad:?}",
            sweep.len()
        ),
    )
}

fn feasibility_and_ica_convergence() -> (Outcome, Outcome) {
    let start = Instant::now();
    let base = SolverParams {
        max_iterations: 50,
        node_limit: Some(200),
        time_limit: 30.0,
        ..Default::default()
    };
    let engines = [Method::Ipsa, Method::IcaPlusPlus, Method::Gsa, Method::IcaLs];
    let mut infeasible = Vec::new();
    let mut nondeterministic = Vec::new();
    let mut non_monotone = Vec::new();
    let mut too_long = Vec::new();
    for seed in 0..100u64 {
        let p = synth::medium_instance(seed);
        let params = SolverParams { seed, ..base.clone() };
        for m in engines {
            let a = solve(&p, m, &params).expect("medium instances are feasible");
            let b = solve(&p, m, &params).unwrap();
            if !validate(&p, &a.allocation).is_empty() {
                infeasible.push((seed, m.as_str()));
            }
            if a.allocation != b.allocation || a.objective != b.objective {
                nondeterministic.push((seed, m.as_str()));
            }
        }
        let ica = ica_solve(&p, &params).unwrap();
        if ica.trace.windows(2).any(|w| w[1] > w[0] + EPS) {
            non_monotone.push(seed);
        }
        if ica.iterations > params.max_iterations {
            too_long.push(seed);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        outcome(
            infeasible.is_empty() && nondeterministic.is_empty(),
            format!(
                "100 medium instances x {{ipsa (node cap), ica++, gsa, ica+ls}}: infeasible {infeasible:?}, non-deterministic {nondeterministic:?}, {secs:.1}s"
            ),
        ),
        outcome(
            non_monotone.is_empty() && too_long.is_empty(),
            format!(
                "100 medium instances: objective increased on {non_monotone:?}, iteration cap exceeded on {too_long:?}"
            ),
        ),
    )
}

fn roadmap_soundness() -> Outcome {
    let start = Instant::now();
    let plan = synth::office_floor();
    let params = RoadmapParams {
        max_nodes: 2000,
        ..RoadmapParams::for_plan(&plan, 1)
    };
    let rm = generate_prm(&plan, &params).unwrap();
    let connected = rm.all_seats_connected();
    let bad_edges = rm
        .edges()
        .iter()
        .filter(|e| !plan.segment_free(rm.nodes()[e.u].pos, rm.nodes()[e.v].pos))
        .count();
    let m = distance::all_pairs_seat_distances(&rm);
    let pos: Vec<Point> = m.seat_ids().iter().map(|id| plan.seat(id).unwrap().pos).collect();
    let n = m.len();
    let mut below = 0;
    let mut asym = 0;
    for i in 0..n {
        for j in 0..n {
            if m.get(i, j) < pos[i].distance(pos[j]) - 1e-6 {
                below += 1;
            }
            if m.get(i, j) != m.get(j, i) {
                asym += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut triangle = 0;
    for _ in 0..100_000 {
        let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        if m.get(i, k) > m.get(i, j) + m.get(j, k) + 1e-9 {
            triangle += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        connected && bad_edges == 0 && below == 0 && asym == 0 && triangle == 0 && secs < 30.0,
        format!(
            "office floor, K=2000: {} nodes, {} edges, all seats connected {connected}, blocked edges {bad_edges}, below Euclidean {below}, asymmetric {asym}, triangle violations {triangle}/100000, {secs:.1}s",
            rm.nodes().len(),
            rm.edges().len()
        ),
    )
}

/// Shortest paths on a 16-connected raster of the plan. A cell is blocked
/// when its rectangle overlaps an obstacle's bounding box, so walls thinner
/// than a cell still cut the grid. Seats snap to the nearest free cell centre.
struct Grid {
    nx: usize,
    ny: usize,
    cw: f64,
    ch: f64,
    free: Vec<bool>,
}

#[derive(PartialEq)]
struct Entry(f64, usize);
impl Eq for Entry {}
impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.partial_cmp(&self.0).unwrap().then(o.1.cmp(&self.1))
    }
}
impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Grid {
    fn new(plan: &FloorPlan, nx: usize, ny: usize) -> Self {
        let (cw, ch) = (plan.width() / nx as f64, plan.height() / ny as f64);
        let boxes: Vec<_> = plan.obstacles().iter().map(|o| o.bounds()).collect();
        let mut free = vec![false; nx * ny];
        for y in 0..ny {
            for x in 0..nx {
                let (x0, y0) = (x as f64 * cw, y as f64 * ch);
                free[y * nx + x] = !boxes
                    .iter()
                    .any(|b| b.min.x < x0 + cw && b.max.x > x0 && b.min.y < y0 + ch && b.max.y > y0);
            }
        }
        Self { nx, ny, cw, ch, free }
    }

    fn centre(&self, c: usize) -> Point {
        Point::new(((c % self.nx) as f64 + 0.5) * self.cw, ((c / self.nx) as f64 + 0.5) * self.ch)
    }

    fn snap(&self, p: Point) -> usize {
        (0..self.free.len())
            .filter(|&c| self.free[c])
            .min_by(|&a, &b| self.centre(a).distance(p).total_cmp(&self.centre(b).distance(p)))
            .unwrap()
    }

    fn dijkstra(&self, src: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.free.len()];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(Entry(0.0, src));
        while let Some(Entry(d, c)) = heap.pop() {
            if d > dist[c] {
                continue;
            }
            let (x, y) = ((c % self.nx) as i64, (c / self.nx) as i64);
            for dy in -2..=2i64 {
                for dx in -2..=2i64 {
                    // Primitive steps only: the 8 neighbours plus knight moves.
                    if (dx, dy) == (0, 0) || (dx.abs() == 2 && dy.abs() != 1) || (dy.abs() == 2 && dx.abs() != 1) {
                        continue;
                    }
                    let (xx, yy) = (x + dx, y + dy);
                    if xx < 0 || yy < 0 || xx >= self.nx as i64 || yy >= self.ny as i64 {
                        continue;
                    }
                    let nb = yy as usize * self.nx + xx as usize;
                    // Every cell in the box spanned by the step must be free.
                    let clear = (x.min(xx)..=x.max(xx))
                        .all(|cx| (y.min(yy)..=y.max(yy)).all(|cy| self.free[cy as usize * self.nx + cx as usize]));
                    if !clear {
                        continue;
                    }
                    let nd = d + ((dx as f64 * self.cw).powi(2) + (dy as f64 * self.ch).powi(2)).sqrt();
                    if nd < dist[nb] {
                        dist[nb] = nd;
                        heap.push(Entry(nd, nb));
                    }
                }
            }
        }
        dist
    }
}

fn grid_oracle() -> Outcome {
    let plan = synth::office_floor();
    let params = RoadmapParams {
        max_nodes: 2000,
        ..RoadmapParams::for_plan(&plan, 1)
    };
    let m = distance::all_pairs_seat_distances(&generate_prm(&plan, &params).unwrap());
    let grid = Grid::new(&plan, 200, 200);
    let cells: Vec<usize> = m.seat_ids().iter().map(|id| grid.snap(plan.seat(id).unwrap().pos)).collect();
    let (mut total, mut inside) = (0usize, 0usize);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..m.len() {
        let row = grid.dijkstra(cells[i]);
        for j in i + 1..m.len() {
            let g = row[cells[j]];
            if !(g > 0.0 && g.is_finite()) {
                continue;
            }
            let r = m.get(i, j) / g;
            lo = lo.min(r);
            hi = hi.max(r);
            total += 1;
            if (0.95..=1.60).contains(&r) {
                inside += 1;
            }
        }
    }
    let frac = inside as f64 / total as f64;
    outcome(
        frac >= 0.95,
        format!(
            "office floor on a 200x200 raster: {:.2}% of {total} seat pairs have PRM/grid in [0.95, 1.60] (min {lo:.3}, max {hi:.3})",
            100.0 * frac
        ),
    )
}

fn quadrant_spans(plan: &FloorPlan, p: &SaProblem, alloc: &seatalloc::Allocation) -> Vec<usize> {
    (0..p.n_teams())
        .map(|t| {
            let mut qs: Vec<usize> = alloc
                .seats_of(t)
                .iter()
                .map(|&s| synth::quadrant(plan.seat(&p.seats()[s].id).unwrap().pos))
                .collect();
            qs.sort();
            qs.dedup();
            qs.len()
        })
        .collect()
}

fn max_pair(p: &SaProblem, seats: &[usize], d: impl Fn(usize, usize) -> f64) -> f64 {
    let mut m: f64 = 0.0;
    for &a in seats {
        for &b in seats {
            m = m.max(d(a, b));
        }
    }
    let _ = p;
    m
}

fn wall_separation() -> Outcome {
    let plan = synth::walled_quadrants();
    let h = synth::quadrant_teams();
    let params = SolverParams {
        seed: 1,
        ..Default::default()
    };
    let problem = |mode| {
        let cfg = DistanceConfig {
            mode,
            ..Default::default()
        };
        let d = pipeline::build_distances(&plan, &cfg, 1, None).unwrap();
        let base = pipeline::base_problem(&plan, &d.matrix).unwrap();
        let idx: Vec<usize> = (0..base.n_seats()).collect();
        base.restrict(&idx, h.roots().iter().map(|&t| h.team(t).clone()).collect()).unwrap()
    };
    let prm_p = problem(DistanceMode::Prm);
    let euc_p = problem(DistanceMode::Euclidean);
    let prm = ipsa_solve(&prm_p, &params).unwrap();
    let euc = ipsa_solve(&euc_p, &params).unwrap();
    let prm_spans = quadrant_spans(&plan, &prm_p, &prm.allocation);
    let euc_spans = quadrant_spans(&plan, &euc_p, &euc.allocation);
    let count = |s: &[usize]| s.iter().filter(|&&n| n > 1).count();
    let mut three_x = Vec::new();
    for t in 0..prm_p.n_teams() {
        let prm_max = max_pair(&prm_p, &prm.allocation.seats_of(t), |a, b| prm_p.d(a, b));
        let euc_max = max_pair(&euc_p, &euc.allocation.seats_of(t), |a, b| euc_p.d(a, b));
        if prm_max > 3.0 * euc_max + EPS {
            three_x.push(prm_p.teams()[t].id.clone());
        }
    }
    outcome(
        count(&prm_spans) <= count(&euc_spans) && three_x.is_empty(),
        format!(
            "42 seats, 4 teams: teams spanning walled quadrants PRM {} vs Euclidean {}; teams breaking the 3x pair-distance bound {three_x:?}; optimal {}/{}",
            count(&prm_spans),
            count(&euc_spans),
            prm.optimal,
            euc.optimal
        ),
    )
}

fn dfhsa_structure() -> Outcome {
    let plan = synth::medium_floor();
    let h = synth::eight_leaf_hierarchy();
    let d = pipeline::build_distances(&plan, &DistanceConfig::default(), 3, None).unwrap();
    let base = pipeline::base_problem(&plan, &d.matrix).unwrap();
    let params = SolverParams {
        seed: 3,
        node_limit: Some(2_000),
        time_limit: 30.0,
        ..Default::default()
    };
    let mut problems = Vec::new();
    for m in Method::ALL {
        for delayed in [false, true] {
            let run = df_hsa(&base, &h, m, &params, delayed).unwrap();
            let alloc = if delayed {
                delayed_office_allocate(&base, &h, &run.allocation).unwrap()
            } else {
                run.allocation
            };
            let v = check_allocation(&base, &h, &alloc, true);
            if !v.is_empty() {
                problems.push(format!("{}{}: {}", m.as_str(), if delayed { "/delayed" } else { "" }, v[0]));
            }
        }
    }
    outcome(
        problems.is_empty() && h.depth() == 3 && h.leaves().len() == 8,
        format!(
            "3 levels, 8 leaves, {} seats; 6 engines x {{top-down, delayed offices}}: {}",
            base.n_seats(),
            if problems.is_empty() { "nesting, disjointness and counts hold".to_string() } else { problems.join("; ") }
        ),
    )
}

/// Minimum over every injective assignment of leaf office slots to offices.
fn exhaustive_office_cost(base: &SaProblem, h: &Hierarchy, alloc: &seatalloc::hierarchy::HierarchicalAllocation) -> f64 {
    let offices = base.seats_of_kind(SeatKind::Office);
    let mut centrals = Vec::new();
    for t in h.leaves() {
        let team = h.team(t);
        let c = base.seat_index(&alloc.centrals[&team.id]).unwrap();
        centrals.extend(std::iter::repeat_n(c, team.offices));
    }
    fn go(base: &SaProblem, offices: &[usize], centrals: &[usize], used: &mut Vec<bool>, k: usize) -> f64 {
        if k == centrals.len() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for (i, &o) in offices.iter().enumerate() {
            if !used[i] {
                used[i] = true;
                best = best.min(base.d(o, centrals[k]) + go(base, offices, centrals, used, k + 1));
                used[i] = false;
            }
        }
        best
    }
    go(base, &offices, &centrals, &mut vec![false; offices.len()], 0)
}

fn delayed_office() -> (Outcome, Outcome) {
    // Exact part: plans with at most 8 offices.
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (plan, h) in [
        (synth::office_floor(), synth::company_hierarchy()),
        (random_office_plan(7), random_office_hierarchy()),
        (random_office_plan(8), random_office_hierarchy()),
    ] {
        let offices = plan.count_kind(SeatKind::Office);
        assert!(offices <= 8);
        let m = DistanceMatrix::euclidean(&plan);
        let base = pipeline::base_problem(&plan, &m).unwrap();
        for seed in 0..10 {
            for method in [Method::Ica, Method::Gsa] {
                let params = SolverParams { seed, ..Default::default() };
                let run = df_hsa(&base, &h, method, &params, true).unwrap();
                let alloc = delayed_office_allocate(&base, &h, &run.allocation).unwrap();
                let got = leaf_office_cost(&base, &h, &alloc).unwrap();
                let best = exhaustive_office_cost(&base, &h, &run.allocation);
                worst = worst.max(got - best);
                cases += 1;
            }
        }
    }
    let exact = outcome(
        worst <= 1e-7,
        format!("{cases} delayed runs with at most 8 offices: max (IP cost - exhaustive optimum) = {worst:.1e}"),
    );

    // Directional part over the medium fixture.
    let plan = synth::medium_floor();
    let h = synth::medium_hierarchy();
    let d = pipeline::build_distances(&plan, &DistanceConfig::default(), 0, None).unwrap();
    let mut wins = 0;
    let seeds = 30;
    for seed in 0..seeds {
        let run = |delayed| {
            let mut cfg = SolveConfig {
                method: Method::IcaPlusPlus,
                delayed_office: delayed,
                ..Default::default()
            };
            cfg.params.seed = seed;
            let a = pipeline::solve_with(&plan, &h, &cfg, &d).unwrap();
            a.report.per_level[..2].iter().map(|l| l.mean_office_distance.unwrap_or(0.0)).sum::<f64>() / 2.0
        };
        if run(true) < run(false) {
            wins += 1;
        }
    }
    let share = wins as f64 / seeds as f64;
    let directional = outcome(
        share >= 0.6,
        format!("medium fixture, ICA++, {seeds} seeds: delayed offices lower the level 0-1 mean office distance in {wins} seeds ({:.0}%)", 100.0 * share),
    );
    (exact, directional)
}

fn random_office_plan(offices: usize) -> FloorPlan {
    let mut rng = ChaCha8Rng::seed_from_u64(offices as u64);
    let mut seats = Vec::new();
    for i in 0..40 {
        seats.push(seatalloc::Seat {
            id: format!("d{i:02}"),
            kind: SeatKind::Desk,
            pos: Point::new(rng.gen_range(1.0..59.0), rng.gen_range(1.0..39.0)),
        });
    }
    for i in 0..offices {
        seats.push(seatalloc::Seat {
            id: format!("o{i}"),
            kind: SeatKind::Office,
            pos: Point::new(rng.gen_range(1.0..59.0), rng.gen_range(1.0..39.0)),
        });
    }
    FloorPlan::new(60.0, 40.0, Vec::new(), seats).unwrap()
}

fn random_office_hierarchy() -> Hierarchy {
    use seatalloc::hierarchy::TeamEntry;
    let e = |id: &str, parent: Option<&str>, d: Option<usize>, o: Option<usize>| TeamEntry {
        id: id.into(),
        parent: parent.map(Into::into),
        desks: d,
        offices: o,
    };
    Hierarchy::new(&[
        e("root", None, None, None),
        e("a", Some("root"), None, None),
        e("b", Some("root"), None, None),
        e("a1", Some("a"), Some(8), Some(2)),
        e("a2", Some("a"), Some(6), Some(1)),
        e("b1", Some("b"), Some(9), Some(2)),
        e("b2", Some("b"), Some(5), Some(0)),
        e("b3", Some("b"), Some(4), Some(1)),
    ])
    .unwrap()
}

fn miqp_consistency(sweep: &[SaProblem]) -> Outcome {
    let params = SolverParams::default();
    let mut checked = 0;
    let mut bad = Vec::new();
    for (seed, p) in sweep.iter().enumerate() {
        if p.n_seats() > MIQP_MAX_SEATS {
            continue;
        }
        let ipsa = ipsa_solve(p, &params).unwrap();
        let miqp = brute_force_miqp(p).unwrap();
        checked += 1;
        if miqp.objective > miqp_objective(p, &ipsa.allocation) + EPS {
            bad.push(seed);
        }
    }
    outcome(
        bad.is_empty() && checked > 0,
        format!("{checked} instances: MIQP optimum <= MIQP value of the IPSA optimum, violations {bad:?}"),
    )
}

fn bench_reproduction() -> Outcome {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let bin = env!("CARGO_BIN_EXE_seatalloc");
    let status = Command::new(bin)
        .args(["bench", "--runs", "30", "--delayed-office", "--out"])
        .arg(&out)
        .arg("--plan")
        .arg(fixtures.join("office.plan.json"))
        .arg("--hierarchy")
        .arg(fixtures.join("office.hierarchy.json"))
        .env_remove("SEATALLOC_CACHE_DIR")
        .output()
        .unwrap();
    if !status.status.success() {
        return outcome(false, format!("bench failed: {}", String::from_utf8_lossy(&status.stderr)));
    }
    let verify = Command::new(bin).args(["bench", "--verify", "--from"]).arg(&out).output().unwrap();
    let stored = std::fs::read_to_string(out.join("table.txt")).unwrap();
    let in_process = seatalloc_cli::bench::table_from_dir(&out).unwrap();
    let same_json = std::fs::read_to_string(out.join("table.json")).unwrap() == in_process.json();
    let runs_ok = in_process.methods.iter().all(|m| m.runs.len() == 30);
    outcome(
        verify.status.success() && stored == in_process.text() && same_json && runs_ok,
        format!(
            "{} methods x 30 seeds on the office fixture; tables rebuilt from per-run reports match bit for bit: {}",
            in_process.methods.len(),
            verify.status.success() && same_json
        ),
    )
}

/// `cargo test --test acceptance -- NAME...` runs only the criteria whose
/// names contain one of the given substrings.
fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |name: &str| filters.is_empty() || filters.iter().any(|f| name.contains(f.as_str()));
    let sweep_cell = std::cell::OnceCell::new();
    let sweep = || sweep_cell.get_or_init(tiny_sweep);
    let mut failed = 0;
    let mut report = |name: &str, soft: bool, o: Outcome| {
        let tag = match (o.pass, soft) {
            (true, _) => "PASS",
            (false, true) => "SOFT-FAIL",
            (false, false) => {
                failed += 1;
                "FAIL"
            }
        };
        println!("{tag:9} {name:34} {}", o.detail);
    };
    if wanted("oracle optimality") {
        report("oracle optimality", false, oracle_optimality(sweep()));
    }
    if wanted("heuristic sandwich") {
        report("heuristic sandwich", false, heuristic_sandwich(sweep()));
    }
    if wanted("feasibility suite") || wanted("ica monotone convergence") {
        let (feasible, ica) = feasibility_and_ica_convergence();
        report("feasibility suite", false, feasible);
        report("ica monotone convergence", false, ica);
    }
    if wanted("roadmap soundness") {
        report("roadmap soundness", false, roadmap_soundness());
    }
    if wanted("roadmap vs grid oracle") {
        report("roadmap vs grid oracle", false, grid_oracle());
    }
    if wanted("wall separation") {
        report("wall separation", false, wall_separation());
    }
    if wanted("df-hsa structure") {
        report("df-hsa structure", false, dfhsa_structure());
    }
    if wanted("delayed office") {
        let (exact, directional) = delayed_office();
        report("delayed office optimality", false, exact);
        report("delayed office direction (soft)", true, directional);
    }
    if wanted("miqp oracle consistency") {
        report("miqp oracle consistency", false, miqp_consistency(sweep()));
    }
    if wanted("cli determinism + bench") {
        report("cli determinism + bench", false, bench_reproduction());
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
