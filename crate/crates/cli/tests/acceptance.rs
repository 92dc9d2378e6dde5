//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use hpppt_core::baselines::{blind_hpp_solve, greedy_solve, oracle_solve};
use hpppt_core::generate::{generate_default, generate_random};
use hpppt_core::solver::{solve_observed, SearchObserver, SearchState};
use hpppt_core::{expected_cost_direct, expected_cost_q, solve, Instance, Path as VisitOrder, Seed, SolverConfig};
use hpppt_sim::bayes::{
    bayes_update, lifelong_scenario, run_mission, Classification, MissionConfig, SensorModel,
};
use hpppt_sim::grid::{
    forest_world, run_exploration, scenario_prior, ExplorationConfig, ForestConfig, PriorCondition,
};
use hpppt_sim::PlannerKind;
use rand::seq::SliceRandom;
use rand::Rng;

type Verdict = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(started: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let t = started.elapsed();
    ensure!(t < limit, "{what} took {t:.2?}, limit {limit:?}");
    Ok(t)
}

/// n = 4..=10, probabilities uniform on [0, 0.9).
fn oracle_instances() -> Vec<Instance> {
    (0..100u64)
        .map(|k| generate_random(4 + (k % 7) as usize, 500.0, 5.0, 0.9, Seed(10_000 + k)).unwrap())
        .collect()
}

fn small_instances(count: u64, base: u64) -> Vec<Instance> {
    (0..count)
        .map(|k| generate_random(3 + (k % 6) as usize, 500.0, 5.0, 0.9, Seed(base + k)).unwrap())
        .collect()
}

fn c1_oracle_optimality() -> Verdict {
    let started = Instant::now();
    let mut matched = 0;
    for inst in oracle_instances() {
        let rpt = solve(&inst, &SolverConfig::default()).map_err(|e| e.to_string())?;
        let oracle = oracle_solve(&inst).map_err(|e| e.to_string())?;
        if (rpt.cost - oracle.cost).abs() <= 1e-9 {
            matched += 1;
        }
    }
    let t = within(started, Duration::from_secs(30), "the oracle comparison")?;
    ensure!(matched == 100, "only {matched}/100 instances matched the oracle");
    Ok(format!("100/100 costs equal the oracle within 1e-9 ({t:.2?})"))
}

fn c2_bounded_suboptimality() -> Verdict {
    let started = Instant::now();
    let instances = oracle_instances();
    let mut worst: f64 = 0.0;
    for eps in [0.01, 0.1] {
        for inst in &instances {
            let r = solve(inst, &SolverConfig::focal(eps)).map_err(|e| e.to_string())?;
            let opt = oracle_solve(inst).map_err(|e| e.to_string())?.cost;
            ensure!(
                r.cost <= (1.0 + eps) * opt + 1e-9,
                "{} with eps {eps}: {} > (1+eps) * {opt}",
                inst.name(),
                r.cost
            );
            if opt > 0.0 {
                worst = worst.max(r.cost / opt - 1.0);
            }
        }
    }
    let t = within(started, Duration::from_secs(30), "the focal sweep")?;
    Ok(format!("200/200 within (1+eps) of the oracle, worst excess {worst:.4} ({t:.2?})"))
}

fn c3_cost_identity() -> Verdict {
    let started = Instant::now();
    let mut rng = Seed(31).rng();
    let mut worst: f64 = 0.0;
    for k in 0..10_000u64 {
        let n = rng.random_range(1..=15);
        let inst = generate_random(n, 500.0, 5.0, 0.9, Seed(300_000 + k)).unwrap();
        let start = rng.random_range(0..n);
        let inst = inst.with_start(start).unwrap();
        let mut rest: Vec<usize> = (0..n).filter(|&v| v != start).collect();
        rest.shuffle(&mut rng);
        let mut order = vec![start];
        order.extend(rest);
        let path = VisitOrder::new(order);
        let direct = expected_cost_direct(&inst, &path).map_err(|e| e.to_string())?;
        let q = expected_cost_q(&inst, &path).map_err(|e| e.to_string())?;
        let rel = (direct - q).abs() / direct.max(1.0);
        ensure!(rel <= 1e-9, "pair {k}: {direct} vs {q}");
        worst = worst.max(rel);
    }
    let t = within(started, Duration::from_secs(5), "10,000 evaluations")?;
    Ok(format!("10000/10000 pairs agree, worst relative gap {worst:.1e} ({t:.2?})"))
}

/// Cheapest way to finish from a state, by enumerating every order of the
/// unvisited vertices.
fn completion_cost(inst: &Instance, state: &SearchState) -> f64 {
    fn go(inst: &Instance, v: usize, q: f64, rest: &mut Vec<usize>) -> f64 {
        if rest.is_empty() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for i in 0..rest.len() {
            let u = rest.remove(i);
            best = best.min(q * inst.cost(v, u) + go(inst, u, q * (1.0 - inst.prob(u)), rest));
            rest.insert(i, u);
        }
        best
    }
    let mut rest: Vec<usize> = (0..inst.n()).filter(|&u| !state.visited.contains(u)).collect();
    go(inst, state.vertex(), state.q, &mut rest)
}

struct Admissibility<'a> {
    inst: &'a Instance,
    checked: usize,
    violations: usize,
}

impl SearchObserver for Admissibility<'_> {
    fn on_generate(&mut self, state: &SearchState, _pruned: bool) {
        self.checked += 1;
        if state.h > completion_cost(self.inst, state) + 1e-9 {
            self.violations += 1;
        }
    }
}

fn c4_admissibility() -> Verdict {
    let started = Instant::now();
    let mut checked = 0;
    let mut violations = 0;
    for inst in small_instances(50, 40_000) {
        let mut obs = Admissibility {
            inst: &inst,
            checked: 0,
            violations: 0,
        };
        solve_observed(&inst, &SolverConfig::default(), &mut obs).map_err(|e| e.to_string())?;
        checked += obs.checked;
        violations += obs.violations;
    }
    let t = within(started, Duration::from_secs(60), "the admissibility check")?;
    ensure!(violations == 0, "{violations} of {checked} states overestimate");
    Ok(format!("0 violations over {checked} generated states ({t:.2?})"))
}

fn c5_dominance_safety() -> Verdict {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for inst in small_instances(50, 50_000) {
        let with = solve(&inst, &SolverConfig::default()).map_err(|e| e.to_string())?;
        let without =
            solve(&inst, &SolverConfig::default().without_pruning()).map_err(|e| e.to_string())?;
        let gap = (with.cost - without.cost).abs();
        ensure!(gap <= 1e-9, "{}: {} vs {}", inst.name(), with.cost, without.cost);
        worst = worst.max(gap);
    }
    let t = within(started, Duration::from_secs(120), "the pruning comparison")?;
    Ok(format!("50/50 equal costs, largest gap {worst:.1e} ({t:.2?})"))
}

fn c6_heuristic_ablation() -> Verdict {
    let started = Instant::now();
    let (mut with_h, mut without_h) = (0u64, 0u64);
    for k in 0..20 {
        let inst = generate_default(20, Seed(60_000 + k)).unwrap();
        let a = solve(&inst, &SolverConfig::default()).map_err(|e| e.to_string())?;
        let b = solve(&inst, &SolverConfig::default().without_heuristic())
            .map_err(|e| e.to_string())?;
        ensure!(
            a.stats.expansions <= b.stats.expansions,
            "instance {k}: {} expansions with the heuristic, {} without",
            a.stats.expansions,
            b.stats.expansions
        );
        with_h += a.stats.expansions;
        without_h += b.stats.expansions;
    }
    let t = within(started, Duration::from_secs(300), "the ablation")?;
    let ratio = with_h as f64 / without_h as f64;
    ensure!(ratio <= 0.7, "mean expansion ratio {ratio:.3} exceeds 0.7");
    Ok(format!("mean expansions {:.0} vs {:.0}, ratio {ratio:.3} <= 0.7 ({t:.2?})", with_h as f64 / 20.0, without_h as f64 / 20.0))
}

fn c7_scalability() -> Verdict {
    let mut solved = 0;
    let mut times = Vec::new();
    for k in 0..5 {
        let inst = generate_default(200, Seed(70_000 + k)).unwrap();
        let cfg = SolverConfig::focal(0.01).with_time_limit(Some(Duration::from_secs(60)));
        let started = Instant::now();
        if solve(&inst, &cfg).is_ok() {
            solved += 1;
        }
        times.push(format!("{:.2?}", started.elapsed()));
    }
    ensure!(solved >= 4, "only {solved}/5 solved within 60 s ({})", times.join(", "));
    Ok(format!("{solved}/5 solved within 60 s [{}]", times.join(", ")))
}

fn c8_baseline_gaps() -> Verdict {
    let (mut greedy_sum, mut blind_sum) = (0.0, 0.0);
    for k in 0..20 {
        let inst = generate_default(30, Seed(80_000 + k)).unwrap();
        let rpt = solve(&inst, &SolverConfig::default()).map_err(|e| e.to_string())?.cost;
        let greedy = greedy_solve(&inst).cost;
        let blind = blind_hpp_solve(&inst).cost;
        ensure!(
            rpt <= greedy + 1e-9 && rpt <= blind + 1e-9,
            "instance {k}: rpt {rpt}, greedy {greedy}, blind {blind}"
        );
        greedy_sum += greedy / rpt;
        blind_sum += blind / rpt;
    }
    let (g, b) = (greedy_sum / 20.0, blind_sum / 20.0);
    let soft = |v: f64, t: f64| if v > t { "met" } else { "NOT met" };
    Ok(format!(
        "rpt <= both on 20/20; mean greedy/rpt {g:.3} (> 1.3 {}), mean blind/rpt {b:.3} (> 1.2 {})",
        soft(g, 1.3),
        soft(b, 1.2)
    ))
}

fn c9_bayes_values() -> Verdict {
    let started = Instant::now();
    let s = SensorModel::new(0.8, 0.4).map_err(|e| e.to_string())?;
    let up = bayes_update(0.5, true, &s).map_err(|e| e.to_string())?;
    let down = bayes_update(0.5, false, &s).map_err(|e| e.to_string())?;
    ensure!((up - 2.0 / 3.0).abs() <= 1e-15, "update(0.5, 1) = {up}");
    ensure!((down - 0.25).abs() <= 1e-15, "update(0.5, 0) = {down}");
    let mut b = 0.5;
    for _ in 0..6 {
        b = bayes_update(b, true, &s).map_err(|e| e.to_string())?;
    }
    ensure!(b > 0.98, "six positives reach only {b}");
    let t = within(started, Duration::from_secs(1), "the update checks")?;
    Ok(format!("2/3 and 1/4 exact to 1e-15, six positives give {b:.4} > 0.98 ({t:.2?})"))
}

fn c10_lifelong() -> Verdict {
    let started = Instant::now();
    for seed in 0..5 {
        let (inst, truth) = lifelong_scenario(13, 3, Seed(seed)).unwrap();
        let inst = inst.with_probabilities(vec![0.5; 13]).unwrap();
        for planner in PlannerKind::ALL {
            let log = run_mission(&inst, &truth, &SensorModel::NOISELESS, &MissionConfig::new(planner, seed))
                .map_err(|e| e.to_string())?;
            ensure!(log.steps.len() == 13, "{planner} seed {seed}: {} visits", log.steps.len());
            for (v, c) in log.classification.iter().enumerate() {
                let want = if truth.is_present(v) {
                    Classification::Present
                } else {
                    Classification::Absent
                };
                ensure!(*c == want, "{planner} seed {seed}: vertex {v} classified {c:?}");
            }
        }
    }
    let noisy = SensorModel::new(0.8, 0.4).map_err(|e| e.to_string())?;
    let mut counts = Vec::new();
    for seed in 0..20 {
        let (inst, truth) = lifelong_scenario(13, 3, Seed(seed)).unwrap();
        let log = run_mission(&inst, &truth, &noisy, &MissionConfig::new(PlannerKind::Rpt, seed))
            .map_err(|e| e.to_string())?;
        ensure!(log.summary.complete, "noisy mission {seed} did not terminate");
        counts.push(log.summary.misclassified);
    }
    let t = within(started, Duration::from_secs(60), "the missions")?;
    Ok(format!(
        "noiseless 15/15 exact in one visit each; 20/20 noisy missions terminate, misclassified per mission {counts:?} ({t:.2?})"
    ))
}

fn c11_exploration() -> Verdict {
    let started = Instant::now();
    let world = forest_world(&ForestConfig::default(), Seed(11)).map_err(|e| e.to_string())?;
    let mean = |condition: PriorCondition, planner: PlannerKind| -> Result<f64, String> {
        let prior = scenario_prior(&world, condition).map_err(|e| e.to_string())?;
        let mut total = 0.0;
        for trial in 0..3 {
            let log = run_exploration(&world, &prior, &ExplorationConfig::new(planner, trial))
                .map_err(|e| e.to_string())?;
            total += log.summary.duration;
        }
        Ok(total / 3.0)
    };
    let (ag, ar, ab) = (
        mean(PriorCondition::Accurate, PlannerKind::Greedy)?,
        mean(PriorCondition::Accurate, PlannerKind::Rpt)?,
        mean(PriorCondition::Accurate, PlannerKind::BlindHpp)?,
    );
    let (mg, mr) = (
        mean(PriorCondition::Misleading, PlannerKind::Greedy)?,
        mean(PriorCondition::Misleading, PlannerKind::Rpt)?,
    );
    let t = within(started, Duration::from_secs(600), "the explorations")?;
    let detail = format!(
        "accurate: greedy {ag:.1}, rpt {ar:.1}, blind {ab:.1}; misleading: rpt {mr:.1}, greedy {mg:.1} ({t:.2?})"
    );
    ensure!(ag <= ar && ar <= ab, "accurate ordering broken: {detail}");
    ensure!(mr < mg, "misleading ordering broken: {detail}");
    Ok(detail)
}

fn hpppt(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hpppt"))
        .current_dir(dir)
        .env_remove("HPPPT_TIME_LIMIT_SECS")
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "`hpppt {}` exited with {}: {}",
        args.join(" "),
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(out.stdout)
}

/// Drops every `wall_ms` JSON field and every CSV column of that name.
fn strip_wall_time(text: &str) -> String {
    let mut lines = text.lines();
    let Some(first) = lines.next() else {
        return String::new();
    };
    if first.starts_with('{') {
        return text
            .lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).expect("JSON line");
                v.as_object_mut().map(|o| o.remove("wall_ms"));
                v.to_string()
            })
            .collect::<Vec<_>>()
            .join("\n");
    }
    let header: Vec<&str> = first.split(',').collect();
    let Some(col) = header.iter().position(|h| *h == "wall_ms") else {
        return text.to_string();
    };
    std::iter::once(first)
        .chain(lines)
        .map(|l| {
            let mut cells: Vec<&str> = l.split(',').collect();
            if cells.len() == header.len() {
                cells.remove(col);
            }
            cells.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .collect();
    entries.sort();
    entries
        .into_iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(p).unwrap()))
        .collect()
}

fn c12_determinism() -> Verdict {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = tmp.path();
    let mut checked = Vec::new();
    let runs: &[(&str, &[&str])] = &[
        ("gen", &["gen", "--sizes", "8..12:2", "--count", "3", "--seed", "7", "--out", "OUT"]),
        ("solve", &["solve", "--solver", "rpt", "--eps", "0.01", "inst/rand_n010_01.hpt"]),
        ("solve oracle", &["solve", "--solver", "oracle", "inst/rand_n008_00.hpt"]),
        ("bench", &["bench", "inst", "--solvers", "rpt,rpt-noh,rpt:0.1,greedy,blind", "--jobs", "4", "--out", "OUT/b.csv"]),
        ("lifelong", &["lifelong", "--trials", "3", "--seed", "5", "--log-dir", "OUT/logs", "--out", "OUT/l.csv"]),
        ("explore", &["explore", "--world-seed", "4", "--prior", "accurate,none", "--trials", "2", "--planners", "rpt,greedy", "--log-dir", "OUT/logs", "--out", "OUT/e.csv"]),
    ];
    hpppt(root, &["gen", "--sizes", "8..12:2", "--count", "2", "--seed", "3", "--out", "inst"])?;
    for (name, args) in runs {
        let mut outputs = Vec::new();
        for attempt in 0..2 {
            let out_dir = root.join(format!("{}_{attempt}", name.replace(' ', "_")));
            std::fs::create_dir_all(&out_dir).map_err(|e| e.to_string())?;
            let rel = out_dir.file_name().unwrap().to_string_lossy().into_owned();
            let args: Vec<String> = args.iter().map(|a| a.replace("OUT", &rel)).collect();
            let argv: Vec<&str> = args.iter().map(String::as_str).collect();
            let stdout = hpppt(root, &argv)?;
            let mut files: Vec<(String, String)> = read_all(&out_dir)
                .into_iter()
                .map(|(f, b)| (f, strip_wall_time(&String::from_utf8_lossy(&b))))
                .collect();
            if out_dir.join("logs").is_dir() {
                files.extend(
                    read_all(&out_dir.join("logs"))
                        .into_iter()
                        .map(|(f, b)| (format!("logs/{f}"), String::from_utf8_lossy(&b).into_owned())),
                );
            }
            let stdout = strip_wall_time(&String::from_utf8_lossy(&stdout).replace(&rel, "OUT"));
            outputs.push((stdout, files));
        }
        ensure!(outputs[0] == outputs[1], "`{name}` differs between identical runs");
        ensure!(
            !outputs[0].0.is_empty() || !outputs[0].1.is_empty(),
            "`{name}` produced no output"
        );
        checked.push(*name);
    }
    Ok(format!("identical reruns for {}", checked.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 12] = [
        ("oracle optimality", c1_oracle_optimality),
        ("bounded suboptimality", c2_bounded_suboptimality),
        ("expected-cost identity", c3_cost_identity),
        ("heuristic admissibility", c4_admissibility),
        ("dominance safety", c5_dominance_safety),
        ("heuristic ablation", c6_heuristic_ablation),
        ("scalability", c7_scalability),
        ("baseline gaps", c8_baseline_gaps),
        ("bayesian update values", c9_bayes_values),
        ("lifelong missions", c10_lifelong),
        ("exploration orderings", c11_exploration),
        ("determinism", c12_determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || name.contains(f.as_str())) {
            continue;
        }
        let verdict = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>().map(String::as_str).or(p.downcast_ref::<&str>().copied()))));
        match verdict {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
