//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness so the report is always printed.
//! Every oracle below is written independently of the library code it checks.

use std::collections::{BinaryHeap, VecDeque};
use std::cmp::Reverse;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use t2nod::cli::main_with_args;
use t2nod::collision::{check_t2nod, CollisionQuery};
use t2nod::ego_mask::{mask_for_pose, Pose, VehicleShape};
use t2nod::planner::{
    classical_astar, dynamic_astar, t2nod_astar, Connectivity, ObstacleTrajectory, PlannerConfig,
};
use t2nod::raster::{fill_polygon, Frame, PixelMask, Rgb};
use t2nod::t2nod::{compute_occupancy_list, compute_t2no_t2nd, FrameTime, OccupancyList, Thresholds, TimeField};
use t2nod::traffic_sim::{
    compute_metrics, load_scenario, oracle_predict, parse_scenario, run_batch, run_episode,
    EpisodeMetrics, Oracle, Outcome, RunRecord, Scenario, ScenarioFile, StepRecord,
};
use t2nod::{Cell, GridGeometry, Vec2};

const CROSSING: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/crossing_car.json");

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn crossing_scenario(overrides: &[String]) -> Result<(ScenarioFile, Scenario), String> {
    let file = load_scenario(CROSSING.as_ref(), overrides).map_err(err)?;
    let s = Scenario::new(&file).map_err(err)?;
    Ok((file, s))
}

// ---------------------------------------------------------------- 1

fn worked_example() -> Check {
    let t0 = Instant::now();
    let (_, s) = crossing_scenario(&[])?;
    let bg = Oracle::new(&s).map_err(err)?.backgrounds()[0].clone();
    let frames = oracle_predict(&s, 0, s.horizon);
    let (occ, dep) = compute_t2no_t2nd(&frames, &bg, s.thresholds).map_err(err)?;
    let elapsed = t0.elapsed();
    // Conflict pixel: lane row 24, ego column 30; the car drives toward +x.
    let got = |c| (occ.get(24, c).finite(), dep.get(24, c).finite());
    ensure(got(30) == (Some(20), Some(25)), || format!("conflict pixel O/D = {:?}", got(30)))?;
    ensure(got(31) == (Some(21), Some(26)), || format!("next pixel O/D = {:?}", got(31)))?;
    within(elapsed, 1.0)?;
    Ok(format!(
        "conflict (24,30) O=20 D=25, next (24,31) O=21 D=26 exact, no boundary tolerance used, {:.3} s",
        elapsed.as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 2, 3

struct Case {
    frames: Vec<Frame>,
    background: Frame,
    thr: Thresholds,
}

fn l1(a: Rgb, b: Rgb) -> u32 {
    (0..3).map(|c| (a[c] as i32 - b[c] as i32).unsigned_abs()).sum()
}

fn random_color(rng: &mut ChaCha8Rng) -> Rgb {
    [rng.gen(), rng.gen(), rng.gen()]
}

fn corpus() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    (0..200)
        .map(|_| {
            let h = rng.gen_range(1..=16);
            let w = rng.gen_range(1..=16);
            let t = rng.gen_range(0..=12);
            let bg: Vec<Rgb> = (0..h * w).map(|_| random_color(&mut rng)).collect();
            let busy = rng.gen_range(0.1..0.6);
            let frames = (0..=t)
                .map(|k| {
                    let px = bg
                        .iter()
                        .map(|b| {
                            if rng.gen_bool(busy) {
                                random_color(&mut rng)
                            } else {
                                // near-background noise straddles small thresholds
                                b.map(|v| v.saturating_add(rng.gen_range(0..25)))
                            }
                        })
                        .collect();
                    Frame::from_pixels(h, w, px).unwrap().with_timestamp(k as u32)
                })
                .collect();
            let tau_o = rng.gen_range(2..=300);
            let tau_d = rng.gen_range(1..tau_o);
            Case {
                frames,
                background: Frame::from_pixels(h, w, bg).unwrap(),
                thr: Thresholds::new(tau_o, tau_d).unwrap(),
            }
        })
        .collect()
}

fn diff_at(case: &Case, t: usize, r: usize, c: usize) -> u32 {
    l1(case.frames[t].get(r, c), case.background.get(r, c))
}

/// Linear scans for one pixel starting at frame `from`.
fn scan_window(case: &Case, r: usize, c: usize, from: usize) -> (Option<usize>, Option<usize>) {
    let n = case.frames.len();
    let tau_o = case.thr.tau_o() as u32;
    let tau_d = case.thr.tau_d() as u32;
    let o = (from..n).find(|&t| diff_at(case, t, r, c) >= tau_o);
    let d = o.and_then(|o| (o..n).find(|&t| diff_at(case, t, r, c) <= tau_d));
    (o, d)
}

fn as_opt(v: FrameTime) -> Option<usize> {
    v.finite().map(|x| x as usize)
}

fn alg1_equivalence(cases: &[Case]) -> Check {
    let t0 = Instant::now();
    let mut pixels = 0usize;
    for (k, case) in cases.iter().enumerate() {
        let (occ, dep) = compute_t2no_t2nd(&case.frames, &case.background, case.thr).map_err(err)?;
        let (h, w) = case.background.dims();
        for r in 0..h {
            for c in 0..w {
                pixels += 1;
                let want = scan_window(case, r, c, 0);
                let got = (as_opt(occ.get(r, c)), as_opt(dep.get(r, c)));
                ensure(got == want, || format!("case {k} pixel ({r},{c}): got {got:?}, oracle {want:?}"))?;
            }
        }
    }
    within(t0.elapsed(), 10.0)?;
    Ok(format!("200 sequences, {pixels} pixels, 0 mismatches, {:.2} s", t0.elapsed().as_secs_f64()))
}

fn list_consistency(cases: &[Case]) -> Check {
    let mut checked = 0usize;
    for (k, case) in cases.iter().enumerate() {
        let (occ, dep) = compute_t2no_t2nd(&case.frames, &case.background, case.thr).map_err(err)?;
        let (h, w) = case.background.dims();
        for n_l in [2usize, 4, 6] {
            let list = compute_occupancy_list(&case.frames, &case.background, case.thr, n_l).map_err(err)?;
            for r in 0..h {
                for c in 0..w {
                    checked += 1;
                    let got: Vec<Option<usize>> = list.entries(r, c).iter().map(|&v| as_opt(v)).collect();
                    // repeated two-scan oracle
                    let mut want = Vec::new();
                    let mut from = 0;
                    while want.len() < n_l {
                        let (o, d) = scan_window(case, r, c, from);
                        want.push(o);
                        want.push(d);
                        match d {
                            Some(d) => from = d + 1,
                            None => break,
                        }
                    }
                    want.resize(n_l, None);
                    let at = || format!("case {k} n_L={n_l} pixel ({r},{c})");
                    ensure(got == want, || format!("{}: got {got:?}, oracle {want:?}", at()))?;
                    let finite: Vec<usize> = got.iter().map_while(|v| *v).collect();
                    ensure(got[finite.len()..].iter().all(Option::is_none), || format!("{}: gap in entries", at()))?;
                    ensure(finite.windows(2).all(|p| p[0] < p[1]), || format!("{}: not strictly increasing", at()))?;
                    for (i, &t) in finite.iter().enumerate() {
                        let d = diff_at(case, t, r, c);
                        let ok = if i % 2 == 0 {
                            d >= case.thr.tau_o() as u32
                        } else {
                            d <= case.thr.tau_d() as u32
                        };
                        ensure(ok, || format!("{}: entry {i} does not alternate", at()))?;
                    }
                    ensure(
                        (got[0], got[1]) == (as_opt(occ.get(r, c)), as_opt(dep.get(r, c))),
                        || format!("{}: prefix differs from (O, D)", at()),
                    )?;
                }
            }
        }
    }
    Ok(format!("n_L in {{2,4,6}}, {checked} pixel lists, 0 mismatches"))
}

// ---------------------------------------------------------------- 4

/// Even-odd containment or exact boundary membership, in exact arithmetic
/// for coordinates on a quarter-pixel lattice.
fn point_in_polygon(poly: &[(f64, f64)], px: f64, py: f64) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[(i + 1) % n];
        let cross = (xj - xi) * (py - yi) - (px - xi) * (yj - yi);
        if cross == 0.0
            && px >= xi.min(xj)
            && px <= xi.max(xj)
            && py >= yi.min(yj)
            && py <= yi.max(yj)
        {
            return true;
        }
        if (yi > py) != (yj > py) {
            // crossing lies right of the point iff cross has the sign of dy
            if (cross > 0.0) == (yj > yi) {
                inside = !inside;
            }
        }
    }
    inside
}

fn rasterization() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut polys = 0;
    for k in 0..100 {
        let h = rng.gen_range(1..=64);
        let w = rng.gen_range(1..=64);
        let g = GridGeometry::unit(h, w);
        let n = rng.gen_range(3..=9);
        let q = |rng: &mut ChaCha8Rng, max: usize| rng.gen_range(-12..=(max as i32 + 3) * 4) as f64 / 4.0;
        let poly: Vec<(f64, f64)> = (0..n).map(|_| (q(&mut rng, w), q(&mut rng, h))).collect();
        let verts: Vec<Vec2> = poly.iter().map(|&(x, y)| Vec2::new(x, y)).collect();
        let mask = fill_polygon(&g, &verts).map_err(err)?;
        for r in 0..h {
            for c in 0..w {
                let want = point_in_polygon(&poly, c as f64, r as f64);
                ensure(mask.get(r, c) == want, || format!("polygon {k} {poly:?} pixel ({r},{c}): got {}", mask.get(r, c)))?;
            }
        }
        polys += 1;
    }

    let mut ambiguous = 0;
    for k in 0..50 {
        let h = rng.gen_range(8..=64);
        let w = rng.gen_range(8..=64);
        let res = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
        let origin = Vec2::new(rng.gen_range(-20..20) as f64, rng.gen_range(-20..20) as f64);
        let g = GridGeometry::new(h, w, origin, res, 0.1).map_err(err)?;
        let exact = k % 5 == 0; // axis-aligned poses on a quarter-pixel lattice
        let lat = |rng: &mut ChaCha8Rng, n: usize| rng.gen_range(0..(n * 4) as i32) as f64 / 4.0 * res;
        let pos = origin + Vec2::new(lat(&mut rng, w), lat(&mut rng, h));
        let heading = if exact { 0.0 } else { rng.gen_range(-3.2..3.2) };
        let len = rng.gen_range(2..=24) as f64 / 4.0 * res;
        let wid = rng.gen_range(2..=12) as f64 / 4.0 * res;
        let shape = VehicleShape::new(len, wid).map_err(err)?;
        let pose = Pose::new(pos, heading, 0);
        let mask = mask_for_pose(&g, &pose, &shape);
        let (cs, sn) = (pose.heading.cos(), pose.heading.sin());
        for r in 0..h {
            for c in 0..w {
                let p = Vec2::new(origin.x + c as f64 * res, origin.y + r as f64 * res);
                let d = Vec2::new(p.x - pos.x, p.y - pos.y);
                let along = d.x * cs + d.y * sn;
                let across = -d.x * sn + d.y * cs;
                let margin = (len / 2.0 - along.abs()).min(wid / 2.0 - across.abs());
                if !exact && margin.abs() < 1e-9 {
                    ambiguous += 1;
                    continue;
                }
                let want = margin >= 0.0;
                ensure(mask.get(r, c) == want, || format!("pose {k} {pose:?} {len}x{wid} pixel ({r},{c}): got {}", mask.get(r, c)))?;
            }
        }
    }
    Ok(format!(
        "{polys} polygons + 50 poses (10 exact-lattice), 0 mismatches, {ambiguous} pixel(s) within 1e-9 of a rotated edge skipped"
    ))
}

// ---------------------------------------------------------------- 5

fn dijkstra(blocked: &[bool], h: usize, w: usize, s: usize, goal: usize, eight: bool, step: f64) -> Option<f64> {
    let mut dist = vec![f64::INFINITY; h * w];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Reverse((0u64, s)));
    // costs as bit patterns order like the floats themselves (non-negative)
    while let Some(Reverse((bits, u))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[u] {
            continue;
        }
        if u == goal {
            return Some(d);
        }
        let (r, c) = ((u / w) as i64, (u % w) as i64);
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if (dr, dc) == (0, 0) || (!eight && dr != 0 && dc != 0) {
                    continue;
                }
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                    continue;
                }
                let v = (nr as usize) * w + nc as usize;
                if blocked[v] {
                    continue;
                }
                let cost = if dr != 0 && dc != 0 { step * 2f64.sqrt() } else { step };
                let nd = d + cost;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Reverse((nd.to_bits(), v)));
                }
            }
        }
    }
    None
}

fn classical_optimality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let (mut found, mut none) = (0, 0);
    for k in 0..100 {
        let (h, w) = (16, 16);
        let density = rng.gen_range(0.1..0.4);
        let mut blocked: Vec<bool> = (0..h * w).map(|_| rng.gen_bool(density)).collect();
        let s = rng.gen_range(0..h * w);
        let goal = rng.gen_range(0..h * w);
        blocked[s] = false;
        blocked[goal] = false;
        let mask = PixelMask::from_bits(h, w, blocked.clone()).map_err(err)?;
        let g = GridGeometry::unit(h, w);
        for conn in [Connectivity::Four, Connectivity::Eight] {
            let cfg = PlannerConfig {
                connectivity: conn,
                speed: 2.0,
                ..PlannerConfig::default()
            };
            let (sc, gc) = (Cell::new(s / w, s % w), Cell::new(goal / w, goal % w));
            let a = classical_astar(&g, &mask, sc, gc, &cfg).map_err(err)?;
            let b = classical_astar(&g, &mask, sc, gc, &cfg).map_err(err)?;
            let oracle = dijkstra(&blocked, h, w, s, goal, conn == Connectivity::Eight, 0.5);
            let pa = a.path.as_ref().map(|p| (p.cells.clone(), p.cost));
            let pb = b.path.as_ref().map(|p| (p.cells.clone(), p.cost));
            ensure(pa == pb, || format!("grid {k} {conn:?}: repeated runs differ"))?;
            match (pa, oracle) {
                (Some((_, cost)), Some(want)) => {
                    ensure((cost - want).abs() <= 1e-9, || format!("grid {k} {conn:?}: cost {cost}, Dijkstra {want}"))?;
                    found += 1;
                }
                (None, None) => none += 1,
                (got, want) => return Err(format!("grid {k} {conn:?}: planner {got:?}, Dijkstra {want:?}")),
            }
        }
    }
    Ok(format!("200 searches ({found} with paths, {none} unreachable) match Dijkstra within 1e-9 s; repeat runs identical"))
}

// ---------------------------------------------------------------- 6

struct Corridor {
    h: usize,
    w: usize,
    blocked: Vec<bool>,
    start: usize,
    goal: usize,
    /// (cell index, first frame, last frame) occupied
    windows: Vec<(usize, u32, u32)>,
    allow_wait: bool,
}

fn corridor(rng: &mut ChaCha8Rng) -> Corridor {
    let h = rng.gen_range(3..=12);
    let w = rng.gen_range(6..=12);
    let top = rng.gen_range(0..h);
    let band = rng.gen_range(1..=3.min(h - top));
    let mut blocked = vec![true; h * w];
    for r in top..top + band {
        for c in 0..w {
            blocked[r * w + c] = false;
        }
    }
    let row = |rng: &mut ChaCha8Rng| rng.gen_range(top..top + band);
    let start = row(rng) * w;
    let goal = row(rng) * w + w - 1;
    let mut windows = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let c = rng.gen_range(1..w - 1);
        let a = rng.gen_range(0..20);
        let b = a + rng.gen_range(0..40);
        // a car crossing the corridor occupies the whole column
        for r in top..top + band {
            windows.push((r * w + c, a, b));
        }
    }
    Corridor {
        h,
        w,
        blocked,
        start,
        goal,
        windows,
        allow_wait: rng.gen_bool(0.7),
    }
}

impl Corridor {
    fn occupied(&self, cell: usize, frame: u32) -> bool {
        self.windows.iter().any(|&(c, a, b)| c == cell && a <= frame && frame <= b)
    }

    /// Breadth-first search over (cell, frame) with frame <= limit.
    fn bfs_feasible(&self, limit: u32) -> bool {
        let mut seen = vec![vec![false; self.h * self.w]; limit as usize + 1];
        let mut queue = VecDeque::from([(self.start, 0u32)]);
        seen[0][self.start] = true;
        while let Some((u, t)) = queue.pop_front() {
            if u == self.goal {
                return true;
            }
            if t == limit {
                continue;
            }
            let (r, c) = (u / self.w, u % self.w);
            let mut next = Vec::new();
            if self.allow_wait {
                next.push(u);
            }
            if r > 0 {
                next.push(u - self.w);
            }
            if r + 1 < self.h {
                next.push(u + self.w);
            }
            if c > 0 {
                next.push(u - 1);
            }
            if c + 1 < self.w {
                next.push(u + 1);
            }
            for v in next {
                if self.blocked[v] || self.occupied(v, t + 1) || seen[t as usize + 1][v] {
                    continue;
                }
                seen[t as usize + 1][v] = true;
                queue.push_back((v, t + 1));
            }
        }
        false
    }
}

fn time_aware_feasibility() -> Check {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let horizon = 40;
    let (mut feasible, mut dyn_found, mut t2_found) = (0, 0, 0);
    // A 0.5 m square at a pixel center covers exactly that pixel.
    let dot = VehicleShape::new(0.5, 0.5).map_err(err)?;
    for k in 0..50 {
        let cor = corridor(&mut rng);
        let (h, w) = (cor.h, cor.w);
        let g = GridGeometry::unit(h, w);
        let mask = PixelMask::from_bits(h, w, cor.blocked.clone()).map_err(err)?;
        let cfg = PlannerConfig {
            connectivity: Connectivity::Four,
            speed: 10.0,
            allow_wait: cor.allow_wait,
            horizon_frames: horizon,
            ..PlannerConfig::default()
        };
        let (sc, gc) = (g.cell_at(cor.start), g.cell_at(cor.goal));
        let fp = g.frame_period();
        let obstacles: Vec<ObstacleTrajectory> = cor
            .windows
            .iter()
            .map(|&(c, a, b)| {
                let cell = g.cell_at(c);
                ObstacleTrajectory::from_intervals(vec![((a as f64 - 0.5) * fp, (b as f64 + 0.5) * fp, cell)])
            })
            .collect();
        let mut occ = TimeField::infinite(h, w);
        let mut dep = TimeField::infinite(h, w);
        for &(c, a, b) in &cor.windows {
            // one window per cell: merge repeated crossings of the same column
            let cell = g.cell_at(c);
            let (o0, d0) = (occ.get(cell.row, cell.col), dep.get(cell.row, cell.col));
            match o0.finite() {
                None => {
                    occ.set(cell.row, cell.col, FrameTime::at(a));
                    dep.set(cell.row, cell.col, FrameTime::at(b));
                }
                Some(o) => {
                    occ.set(cell.row, cell.col, FrameTime::at(o.min(a)));
                    dep.set(cell.row, cell.col, FrameTime::at(d0.finite().unwrap().max(b)));
                }
            }
        }

        let dyn_out = dynamic_astar(&g, &mask, &obstacles, sc, gc, &cfg).map_err(err)?;
        if let Some(p) = &dyn_out.path {
            dyn_found += 1;
            for n in p.nodes.iter().skip(1) {
                ensure(!mask.get_cell(n.cell), || format!("corridor {k}: dynamic path enters a wall"))?;
                let frame = (n.time / fp).round() as u32;
                ensure(frame == n.frame, || format!("corridor {k}: node frame {} vs time {}", n.frame, n.time))?;
                ensure(!cor.occupied(g.index(n.cell), n.frame), || {
                    format!("corridor {k}: dynamic path hits an obstacle at {:?} frame {}", n.cell, n.frame)
                })?;
            }
        }
        let t2_out = t2nod_astar(&g, &occ, &dep, &mask, sc, gc, &cfg, &dot).map_err(err)?;
        if let Some(p) = &t2_out.path {
            t2_found += 1;
            for n in p.nodes.iter().skip(1) {
                let fm = mask_for_pose(&g, &Pose::new(n.position, n.heading, n.frame), &dot);
                ensure(fm.count() == 1 && fm.get_cell(n.cell), || format!("corridor {k}: footprint is not one pixel"))?;
                let hit = check_t2nod(&CollisionQuery::new(fm, n.frame), &occ, &dep).map_err(err)?;
                ensure(!hit, || format!("corridor {k}: t2nod path collides at {:?} frame {}", n.cell, n.frame))?;
            }
        }
        // Feasibility oracle against the same (merged) windows the fields describe.
        let merged = Corridor {
            windows: (0..h * w)
                .filter_map(|i| {
                    let cell = g.cell_at(i);
                    occ.get(cell.row, cell.col)
                        .finite()
                        .map(|o| (i, o, dep.get(cell.row, cell.col).finite().unwrap()))
                })
                .collect(),
            blocked: cor.blocked.clone(),
            ..cor
        };
        let raw_ok = Corridor { windows: cor.windows.clone(), blocked: cor.blocked.clone(), ..merged };
        if raw_ok.bfs_feasible(horizon) {
            feasible += 1;
            ensure(dyn_out.path.is_some(), || format!("corridor {k}: oracle feasible, dynamic_astar found nothing"))?;
        }
        if merged.bfs_feasible(horizon) {
            ensure(t2_out.path.is_some(), || format!("corridor {k}: oracle feasible, t2nod_astar found nothing"))?;
        }
    }
    within(t0.elapsed(), 60.0)?;
    Ok(format!(
        "50 corridors: {feasible} oracle-feasible, dynamic found {dyn_found}, t2nod found {t2_found}, 0 replay violations, {:.2} s",
        t0.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 7

fn safety_delta() -> Check {
    let t0 = Instant::now();
    let (t2_file, _) = crossing_scenario(&[])?;
    let (cl_file, _) = crossing_scenario(&["ego.planner.mode=classical".into()])?;
    let t2 = run_batch(&t2_file, 20, t2_file.seed).map_err(err)?;
    let cl = run_batch(&cl_file, 20, cl_file.seed).map_err(err)?;
    let t2_collisions: usize = t2.metrics.iter().map(|m| m.collisions).sum();
    let t2_success = t2.metrics.iter().filter(|m| m.success).count();
    let cl_hit = cl.metrics.iter().filter(|m| m.collisions >= 1).count();
    ensure(t2_collisions == 0, || format!("t2nod mode collided {t2_collisions} time(s)"))?;
    ensure(t2_success == 20, || format!("t2nod success {t2_success}/20"))?;
    ensure(cl_hit >= 15, || format!("classical collided in only {cl_hit}/20 episodes"))?;
    within(t0.elapsed(), 120.0)?;
    Ok(format!(
        "t2nod: 0 collisions, success {t2_success}/20; classical: collisions in {cl_hit}/20 episodes; {:.2} s",
        t0.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 8

fn distinct_finite(f: &TimeField) -> usize {
    let mut v: Vec<u32> = f.values().iter().filter_map(|t| t.finite()).collect();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn horizon_check() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let out = dir.path().to_string_lossy().to_string();
    let code = main_with_args(["t2nod", "fields", "--scenario", CROSSING, "--out", &out]);
    ensure(code == 0, || format!("fields exited {code}"))?;
    let read = |name: &str| -> Result<TimeField, String> {
        let bytes = std::fs::read(dir.path().join(name)).map_err(err)?;
        TimeField::read_binary(&bytes[..]).map_err(err)
    };
    let mut short = Vec::new();
    for name in ["t00000_T002.o.bin", "t00000_T002.d.bin"] {
        let n = distinct_finite(&read(name)?);
        ensure(n <= 3, || format!("{name}: {n} distinct finite values at T=2"))?;
        short.push(n);
    }
    let long = distinct_finite(&read("t00000_T060.o.bin")?);
    ensure(long >= 30, || format!("T=60 trail has only {long} distinct values"))?;
    // ramp position 20/60 at the conflict pixel
    let ppm = std::fs::read(dir.path().join("t00000_T060.o.ppm")).map_err(err)?;
    let img = Frame::read_ppm(&ppm[..]).map_err(err)?;
    let level = (255.0f64 * 20.0 / 60.0).round() as u8;
    ensure(img.get(24, 30) == [level, level, 0], || format!("conflict pixel color {:?}", img.get(24, 30)))?;
    Ok(format!(
        "T=2: {:?} distinct finite values (O, D); T=60: {long} distinct values in the trail; conflict pixel at ramp 20/60",
        short
    ))
}

// ---------------------------------------------------------------- 9

fn scripted_record(xs: &[f64], dt: f64) -> RunRecord {
    RunRecord {
        scenario: "scripted".into(),
        seed: 0,
        episode: 0,
        mode: Default::default(),
        frame_period: dt,
        goal: Vec2::new(1e3, 0.0),
        steps: xs
            .iter()
            .enumerate()
            .map(|(k, &x)| StepRecord {
                frame: k as u32,
                position: Vec2::new(x, 0.0),
                heading: 0.0,
                agents: Vec::new(),
                plan: None,
            })
            .collect(),
        collisions: Vec::new(),
        outcome: Outcome::Timeout,
    }
}

fn metric_correctness() -> Check {
    let dt = 0.1;
    let still = compute_metrics(&scripted_record(&[5.0; 30], dt));
    ensure(
        still
            == EpisodeMetrics {
                success: false,
                collisions: 0,
                travel_distance: 0.0,
                total_timesteps: None,
                control_effort: Some(0.0),
                sudden_reversals: Some(0),
            },
        || format!("stationary: {still:?}"),
    )?;

    let cruise: Vec<f64> = (0..30).map(|k| 1.5 * k as f64 * dt).collect();
    let m = compute_metrics(&scripted_record(&cruise, dt));
    let e = m.control_effort.unwrap();
    ensure(e < 1e-6 && m.sudden_reversals == Some(0), || format!("constant velocity: {m:?}"))?;

    // Speeds 1,2,3,2,1,2,3,2,1 m/s over 0.1 s steps. Every acceleration is
    // +-10 m/s^2: ++--++-- gives effort 8 * 10 = 80 and 3 sign changes.
    let speeds = [1.0, 2.0, 3.0, 2.0, 1.0, 2.0, 3.0, 2.0, 1.0];
    let mut xs = vec![0.0];
    for v in speeds {
        xs.push(xs.last().unwrap() + v * dt);
    }
    let m = compute_metrics(&scripted_record(&xs, dt));
    let e = m.control_effort.unwrap();
    ensure((e - 80.0).abs() < 1e-6, || format!("triangle effort {e}"))?;
    ensure(m.sudden_reversals == Some(3), || format!("triangle reversals {:?}", m.sudden_reversals))?;
    Ok(format!("stationary 0/0, constant velocity <1e-6/0, triangle wave {e:.6}/3"))
}

// ---------------------------------------------------------------- 10

fn determinism_and_formats() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    let mut formats = 0;
    for _ in 0..50 {
        let (h, w) = (rng.gen_range(1..20), rng.gen_range(1..20));
        let vals: Vec<FrameTime> = (0..h * w)
            .map(|_| if rng.gen_bool(0.3) { FrameTime::INFINITY } else { FrameTime::at(rng.gen_range(0..1_000_000)) })
            .collect();
        let f = TimeField::from_values(h, w, vals).map_err(err)?;
        let bin = f.to_binary();
        let back = TimeField::read_binary(&bin[..]).map_err(err)?;
        ensure(back == f && back.to_binary() == bin, || "time field binary".into())?;
        let csv = f.to_csv();
        let back = TimeField::from_csv(&csv).map_err(err)?;
        ensure(back == f && back.to_csv() == csv, || "time field CSV".into())?;

        let n_l = 2 * rng.gen_range(1..4);
        let mut times = Vec::new();
        for _ in 0..h * w {
            let k = rng.gen_range(0..=n_l);
            let mut t = 0;
            for i in 0..n_l {
                if i < k {
                    t += rng.gen_range(1..10);
                    times.push(FrameTime::at(t));
                } else {
                    times.push(FrameTime::INFINITY);
                }
            }
        }
        let l = OccupancyList::from_times(h, w, n_l, times).map_err(err)?;
        let bin = l.to_binary();
        ensure(OccupancyList::read_binary(&bin[..]).map_err(err)? == l, || "occupancy list binary".into())?;

        let px: Vec<Rgb> = (0..h * w).map(|_| random_color(&mut rng)).collect();
        let fr = Frame::from_pixels(h, w, px).map_err(err)?;
        let ppm = fr.to_ppm_bytes();
        let back = Frame::read_ppm(&ppm[..]).map_err(err)?;
        ensure(back.pixels() == fr.pixels() && back.to_ppm_bytes() == ppm, || "PPM".into())?;

        let bits: Vec<bool> = (0..h * w).map(|_| rng.gen()).collect();
        let m = PixelMask::from_bits(h, w, bits).map_err(err)?;
        let pgm = m.to_pgm_bytes();
        ensure(PixelMask::read_pgm(&pgm[..]).map_err(err)? == m, || "PGM".into())?;
        formats += 1;
    }

    // scenario documents
    for name in ["crossing_car", "empty_map", "walled_off", "four_view_intersection"] {
        let path = format!("{}/scenarios/{name}.json", env!("CARGO_MANIFEST_DIR"));
        let f = load_scenario(path.as_ref(), &[]).map_err(err)?;
        let text = serde_json::to_string(&f).map_err(err)?;
        let back = parse_scenario(&text, &[]).map_err(err)?;
        ensure(back == f && serde_json::to_string(&back).map_err(err)? == text, || format!("{name} scenario JSON"))?;
    }

    // run records: repeated runs, JSON and CSV round trips
    let (file, s) = crossing_scenario(&[])?;
    let a = run_episode(&s).map_err(err)?;
    let b = run_episode(&s).map_err(err)?;
    ensure(a.to_json() == b.to_json(), || "repeated episodes differ".into())?;
    let back: RunRecord = serde_json::from_str(&a.to_json()).map_err(err)?;
    ensure(back == a && back.to_json() == a.to_json(), || "run record JSON".into())?;
    for (line, step) in a.trajectory_csv().lines().skip(1).zip(&a.steps) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        ensure(
            cols[2] == step.position.x && cols[3] == step.position.y && cols[4] == step.heading,
            || "trajectory CSV".into(),
        )?;
    }
    let x = run_batch(&file, 3, 99).map_err(err)?;
    let y = run_batch(&file, 3, 99).map_err(err)?;
    let dump = |r: &t2nod::traffic_sim::BatchRun| r.records.iter().map(RunRecord::to_json).collect::<Vec<_>>();
    ensure(dump(&x) == dump(&y), || "batch records differ for the same seed".into())?;

    // CLI outputs are byte-identical across invocations
    let d1 = tempfile::tempdir().map_err(err)?;
    let d2 = tempfile::tempdir().map_err(err)?;
    for d in [&d1, &d2] {
        let out = d.path().to_string_lossy().to_string();
        let code = main_with_args(["t2nod", "run", "--scenario", CROSSING, "--out", &out, "--seed", "5"]);
        ensure(code == 0, || format!("run exited {code}"))?;
    }
    for name in ["record.json", "metrics.json", "trajectory.csv"] {
        let a = std::fs::read(d1.path().join(name)).map_err(err)?;
        let b = std::fs::read(d2.path().join(name)).map_err(err)?;
        ensure(a == b, || format!("{name} differs between identical runs"))?;
    }
    Ok(format!(
        "{formats} random instances each of time field/list binary, CSV, PPM, PGM; 4 scenario files; run records, batches and CLI outputs byte-identical"
    ))
}

// ----------------------------------------------------------------

fn main() {
    let cases = corpus();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("worked example O/D", Box::new(worked_example)),
        ("T2NO/T2ND linear-scan oracle", Box::new(|| alg1_equivalence(&cases))),
        ("occupancy list consistency", Box::new(|| list_consistency(&cases))),
        ("rasterization oracles", Box::new(rasterization)),
        ("classical A* vs Dijkstra", Box::new(classical_optimality)),
        ("time-aware feasibility", Box::new(time_aware_feasibility)),
        ("end-to-end safety delta", Box::new(safety_delta)),
        ("horizon false-color fields", Box::new(horizon_check)),
        ("metric correctness", Box::new(metric_correctness)),
        ("determinism and serialization", Box::new(determinism_and_formats)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
