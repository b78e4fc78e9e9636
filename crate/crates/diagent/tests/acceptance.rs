//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use diagent::config::Config;
use diagent::sweep::{run_sweep, SweepRow};
use diagent::tsv::read_coefficients;
use diagent_core::dynamics::{density_moment, predicted_density, QuenchSystem, TimeWindow};
use diagent_core::expansion::{
    verify_stirling_identities, ExpansionCoefficients, Rational, Truncation,
};
use diagent_core::models::{DickeParams, Model, Parity, SmallWorldParams, SyntheticParams};
use diagent_core::partition::{reduced_partitions_up_to, Partition};
use diagent_core::perturbation::{ladder_point, perturbative_kappa, perturbative_lines};
use diagent_core::spectral::{DELOCALIZED_DELTA_S, EULER_GAMMA};
use diagent_core::symmetric::{moment_formula_oracle, PartitionEngine};

type Outcome = Result<String, String>;

struct Suite {
    failed: usize,
}

impl Suite {
    fn run(&mut self, id: u32, name: &str, limit: Duration, body: impl FnOnce() -> Outcome) {
        let t0 = Instant::now();
        let outcome = body();
        let dt = t0.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if dt <= limit => (true, d),
            Ok(d) => (false, format!("{d}; runtime {dt:.1?} over {limit:?}")),
            Err(d) => (false, d),
        };
        if !ok {
            self.failed += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {id:>2} {name} [{:.2}s] {detail}", dt.as_secs_f64());
    }
}

fn info(line: &str) {
    println!("     .. {line}");
}

fn p(parts: &[u32]) -> Partition {
    Partition::new(parts.to_vec())
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn coeffs(s_max: u32) -> ExpansionCoefficients {
    PartitionEngine::default().delta_s_coefficients(s_max).unwrap()
}

fn coefficient_exactness() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_diagent"))
        .args(["coefficients", "--s-max", "6"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("exit status {:?}", out.status.code()));
    }
    let rows = read_coefficients(&String::from_utf8_lossy(&out.stdout)).map_err(|e| e.to_string())?;
    let want = [
        (p(&[2]), r(-1, 4)),
        (p(&[3]), r(1, 9)),
        (p(&[2, 2]), r(1, 16)),
        (p(&[4]), r(-11, 96)),
        (p(&[3, 2]), r(-1, 6)),
        (p(&[2, 2, 2]), r(-1, 16)),
    ];
    for (mu, c) in &want {
        match rows.iter().find(|(m, _)| m == mu) {
            Some((_, got)) if got == c => {}
            other => return Err(format!("{mu:?}: want {c}, got {:?}", other.map(|x| &x.1))),
        }
    }
    let mut expected: Vec<Partition> = reduced_partitions_up_to(6, 20)
        .unwrap()
        .into_iter()
        .filter(|m| m.weight() >= 2)
        .collect();
    let mut got: Vec<Partition> = rows.iter().map(|(m, _)| m.clone()).collect();
    expected.sort_by_key(|m| format!("{m:?}"));
    got.sort_by_key(|m| format!("{m:?}"));
    if got != expected {
        return Err(format!("partition set {got:?}"));
    }
    Ok(format!("{} rows, six listed values exact", rows.len()))
}

fn moment_oracle() -> Outcome {
    let engine = PartitionEngine::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for k in 2..=6u32 {
        let formula = engine.moment_formula(k).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let len = rng.random_range(1..=6);
            let c: Vec<Rational> = (0..len)
                .map(|_| r(rng.random_range(0..=30), rng.random_range(1..=12)))
                .collect();
            let sum = |q: u32| {
                c.iter().fold(Rational::zero(), |a, x| {
                    a + (0..q).fold(Rational::one(), |acc, _| acc * x)
                })
            };
            let h = sum(1);
            if h.is_zero() {
                continue;
            }
            let pow = |x: &Rational, e: u32| (0..e).fold(Rational::one(), |acc, _| acc * x);
            let lhs = formula.evaluate_rational(|q| sum(q) / pow(&h, q)) * pow(&h, k);
            let rhs = moment_formula_oracle(k, &c);
            if lhs != rhs {
                return Err(format!("k={k} c={c:?}: {lhs} vs {rhs}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} exact comparisons"))
}

fn published_values() -> Outcome {
    let engine = PartitionEngine::default();
    let z = |mu: &[u32]| -> i64 {
        let mu = p(mu);
        let table = engine.z_coefficients(mu.weight()).unwrap();
        let v = &table.iter().find(|(m, _)| *m == mu).unwrap().1;
        v.try_into().unwrap()
    };
    let mut bad = Vec::new();
    let z3 = [z(&[3]), z(&[2, 1]), z(&[1, 1, 1])];
    if z3 != [4, -9, 6] {
        bad.push(format!("Z(k=3) = {z3:?}"));
    }
    for (mu, want) in [
        (&[2][..], -1),
        (&[2, 1], -6),
        (&[2, 1, 1], -12),
        (&[2, 1, 1, 1], -20),
    ] {
        let got = z(mu);
        if got != want {
            bad.push(format!("Z{mu:?} = {got}, listed {want}"));
        }
    }
    for (mu, want) in [
        (p(&[2]), r(-1, 2)),
        (p(&[3]), r(2, 3)),
        (p(&[4]), r(-11, 8)),
        (p(&[2, 2]), r(3, 4)),
    ] {
        let got = engine.z_tilde(&mu).unwrap();
        if got != want {
            bad.push(format!("Z~{mu:?} = {got}"));
        }
    }
    let l3 = engine.l_matrix(3).unwrap();
    let want = [[1u32, 0, 0], [1, 1, 0], [1, 3, 6]];
    for (i, row) in want.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if *l3.get(i, j) != v.into() {
                bad.push(format!("L3[{i}][{j}] = {}", l3.get(i, j)));
            }
        }
    }
    if bad.is_empty() {
        Ok("Z(3), Z sequence, Z~ values and L(3) match".into())
    } else {
        Err(bad.join("; "))
    }
}

fn stirling() -> Outcome {
    verify_stirling_identities(12)
        .map(|_| "both identities exact for s = 2..12".into())
        .map_err(|e| e.to_string())
}

fn perturbative_constants() -> Outcome {
    let lines = perturbative_lines().map_err(|e| e.to_string())?;
    let consts = [3.0 / 4.0, 133.0 / 144.0, 167.0 / 288.0].map(|c| c - EULER_GAMMA);
    for (line, want) in lines.iter().zip(consts) {
        if (line.evaluate(0.0) - want).abs() > 1e-14 {
            return Err(format!("constant {} vs {want}", line.evaluate(0.0)));
        }
    }
    // Independent substitution of ξ̄ ≃ 1 − κΣv² into each truncation.
    let table = coeffs(6);
    let slopes = [r(1, 4), r(-1, 96), r(227, 384)];
    for (d, want) in (1..=3).zip(&slopes) {
        let mut slope = Rational::zero();
        for (mu, c) in table.truncated(Truncation::Order(d)).unwrap() {
            slope -= c * perturbative_kappa(&mu).unwrap();
        }
        if &slope != want || &lines[d as usize - 1].slope != want {
            return Err(format!("order {d}: slope {slope}"));
        }
    }
    Ok("constants to 1e-14, slopes 1/4, -1/96, 227/384 exact".into())
}

fn identity_quench() -> Outcome {
    let window = TimeWindow::new(1e6, 2500.0, 400).unwrap();
    let dicke = Model::Dicke(DickeParams {
        omega: 1.0,
        omega0: 1.0,
        lambda: 0.7,
        two_j: 10,
        n_t: 80,
        parity: Parity::Even,
    });
    let sw = Model::SmallWorld(SmallWorldParams::new(512, 2.0, 0.06, 1).unwrap());
    let mut dims = Vec::new();
    for model in [dicke, sw] {
        let sys = QuenchSystem::prepare(&model, 0.0).map_err(|e| e.to_string())?;
        let e = sys.entropy(10, &window).map_err(|e| e.to_string())?;
        if e.delta_s != 0.0 || e.entropy_trace.iter().any(|&s| s != 0.0) {
            return Err(format!("dim {}: delta_s {}", sys.dim(), e.delta_s));
        }
        dims.push(sys.dim());
    }
    Ok(format!("exact zeros at dims {dims:?}"))
}

fn delocalized_limit() -> Outcome {
    let table = coeffs(6);
    let window = TimeWindow::new(1e6, 1e5, 400).unwrap();
    let (mut ds, mut o1) = (0.0, 0.0);
    let seeds = 20;
    for seed in 0..seeds {
        let sys = QuenchSystem::prepare(&Model::Synthetic(SyntheticParams { dim: 200, seed }), std::f64::consts::FRAC_PI_2)
            .map_err(|e| e.to_string())?;
        let a = sys.analyze(100, &window, &table).map_err(|e| e.to_string())?;
        ds += a.entropy.delta_s;
        o1 += a.orders[0];
    }
    ds /= seeds as f64;
    o1 /= seeds as f64;
    let detail = format!("mean dS {ds:.4}, mean O1 {o1:.4}, 1-gamma {DELOCALIZED_DELTA_S:.4}");
    if (ds - o1).abs() <= 0.02 && (DELOCALIZED_DELTA_S - 0.08..=DELOCALIZED_DELTA_S).contains(&ds) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

struct PerturbativeCheck {
    worst_rel: f64,
    worst_o3: f64,
    worst_seed: u64,
}

fn perturbative_sweep(delta_w: f64) -> Result<PerturbativeCheck, String> {
    let table = coeffs(6);
    let window = TimeWindow::new(1e6, 1e5, 400).unwrap();
    let mut out = PerturbativeCheck {
        worst_rel: 0.0,
        worst_o3: 0.0,
        worst_seed: 0,
    };
    for seed in 0..10 {
        let model = Model::SmallWorld(SmallWorldParams::new(256, 2.0, 0.06, seed).map_err(|e| e.to_string())?);
        let lp = ladder_point(&model, delta_w, 10, &window).map_err(|e| e.to_string())?;
        let sys = QuenchSystem::prepare(&model, delta_w).map_err(|e| e.to_string())?;
        let a = sys.analyze(10, &window, &table).map_err(|e| e.to_string())?;
        let rel = (lp.delta_s_exact - lp.delta_s_pert).abs() / lp.delta_s_pert;
        let o3 = (a.orders[2] - lp.delta_s_exact)
            .abs()
            .max((lp.orders[2] - lp.delta_s_exact).abs());
        if rel > out.worst_rel {
            out.worst_rel = rel;
            out.worst_seed = seed;
        }
        out.worst_o3 = out.worst_o3.max(o3);
    }
    Ok(out)
}

fn perturbative_regime() -> Outcome {
    let c = perturbative_sweep(0.004)?;
    let detail = format!(
        "dW/W = 0.002: worst |dS-pert|/pert {:.3} (seed {}), worst |O3-dS| {:.2e}",
        c.worst_rel, c.worst_seed, c.worst_o3
    );
    for ratio in [0.01, 0.02] {
        match perturbative_sweep(2.0 * ratio) {
            Ok(c) => info(&format!(
                "dW/W = {ratio}: worst relative error {:.3} (seed {}), worst |O3-dS| {:.2e}",
                c.worst_rel, c.worst_seed, c.worst_o3
            )),
            Err(e) => info(&format!("dW/W = {ratio}: {e}")),
        }
    }
    if c.worst_rel <= 0.15 && c.worst_o3 <= 0.02 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn done(rows: &[SweepRow]) -> Vec<(f64, f64, [f64; 3])> {
    rows.iter()
        .filter_map(|r| r.analysis().map(|a| (r.param.unwrap(), a.entropy.delta_s, a.orders)))
        .collect()
}

fn width_sweep() -> Outcome {
    let cfg = Config::parse_str(
        "model = smallworld\nsites = 512\np = 0.06\ndelta = 0.3\nn0 = 10\nseed = 1\n\
         sweep = W\nvalues = geom:0.35:35:12\ntau = 1e6\ndtau = 2500\nsamples = 400",
    )
    .map_err(|e| e.to_string())?;
    let rows = run_sweep(&cfg, 0).map_err(|e| e.to_string())?;
    let pts = done(&rows);
    for (w, ds, o) in &pts {
        info(&format!("W {w:7.3}  dS {ds:.4}  O1 {:.4}  O3 {:.4}", o[0], o[2]));
    }
    let n = pts.len();
    let max_ds = pts.iter().map(|x| x.1).fold(f64::MIN, f64::max);
    let o3 = pts[n - 5..].iter().map(|(_, d, o)| (o[2] - d).abs()).fold(0.0, f64::max);
    let o1 = pts[..5].iter().map(|(_, d, o)| (o[0] - d).abs()).fold(0.0, f64::max);
    let detail = format!("max dS {max_ds:.4}, large-W max |O3-dS| {o3:.4}, small-W max |O1-dS| {o1:.4}");
    if n == 12 && max_ds <= DELOCALIZED_DELTA_S + 0.01 && o3 <= 0.05 && o1 <= 0.05 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn kendall_tau(y: &[f64]) -> f64 {
    let n = y.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += (y[j] - y[i]).signum();
        }
    }
    s / (n * (n - 1) / 2) as f64
}

fn lambda_sweep() -> Outcome {
    let cfg = Config::parse_str(
        "model = dicke\nomega = 1\nomega0 = 1\nj = 5\nn_t = 80\nparity = 1\ndelta = 0.1\n\
         n0 = 10\nsweep = lambda\nvalues = lin:0.1:1.0:13\ntau = 1e7\ndtau = 250\nsamples = 400",
    )
    .map_err(|e| e.to_string())?;
    let rows = run_sweep(&cfg, 0).map_err(|e| e.to_string())?;
    let pts = done(&rows);
    if pts.len() < 5 {
        return Err(format!("only {} converged points", pts.len()));
    }
    for (l, ds, o) in &pts {
        info(&format!("lambda {l:.3}  dS {ds:.4}  O3 {:.4}", o[2]));
    }
    let ds: Vec<f64> = pts.iter().map(|x| x.1).collect();
    let smooth: Vec<f64> = ds.windows(3).map(|w| w.iter().sum::<f64>() / 3.0).collect();
    let centers: Vec<f64> = pts.windows(3).map(|w| w[1].0).collect();
    let mean = |f: &dyn Fn(f64) -> bool| {
        let v: Vec<f64> = centers.iter().zip(&smooth).filter(|(l, _)| f(**l)).map(|(_, s)| *s).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let lambda_c = 0.5;
    let below = mean(&|l| l < lambda_c);
    let above = mean(&|l| l > lambda_c);
    let tau = kendall_tau(&smooth);
    let o3 = pts.iter().map(|(_, d, o)| (o[2] - d).abs()).fold(0.0, f64::max);
    let max_ds = ds.iter().copied().fold(f64::MIN, f64::max);
    let detail = format!(
        "{} converged, smoothed mean {below:.3} below vs {above:.3} above lambda_c, Kendall tau {tau:.2}, max |O3-dS| {o3:.4}",
        pts.len()
    );
    if tau > 0.0 && above - below >= 0.1 && max_ds <= DELOCALIZED_DELTA_S + 0.02 && o3 <= 0.07 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn simpson(f: impl Fn(f64) -> f64, b: f64, n: usize) -> f64 {
    let h = b / n as f64;
    let mut acc = f(0.0) + f(b);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(h * i as f64);
    }
    acc * h / 3.0
}

fn density_checks() -> Outcome {
    let h_bar = 0.02;
    let mut worst: f64 = 0.0;
    for xi2 in [0.0, 0.3, 1.0] {
        let upper = 60.0 * h_bar;
        let norm = simpson(|h| predicted_density(h_bar, xi2, h), upper, 40_000);
        let mean = simpson(|h| h * predicted_density(h_bar, xi2, h), upper, 40_000);
        worst = worst.max((norm - 1.0).abs()).max((mean - h_bar).abs());
        worst = worst.max((density_moment(h_bar, xi2, 1) - h_bar).abs());
    }
    if worst <= 1e-8 {
        Ok(format!("worst deviation {worst:.1e}"))
    } else {
        Err(format!("worst deviation {worst:.1e}"))
    }
}

fn main() -> ExitCode {
    let mut suite = Suite { failed: 0 };
    let secs = Duration::from_secs;
    suite.run(1, "coefficient exactness", secs(1), coefficient_exactness);
    suite.run(2, "moment formula vs oracle", secs(10), moment_oracle);
    suite.run(3, "published combinatorial values", secs(60), published_values);
    suite.run(4, "Stirling identities", secs(60), stirling);
    suite.run(5, "perturbative constants", secs(60), perturbative_constants);
    suite.run(6, "identity quench", secs(5), identity_quench);
    suite.run(7, "delocalized limit", secs(120), delocalized_limit);
    suite.run(8, "perturbative regime", secs(300), perturbative_regime);
    suite.run(9, "small-world W sweep", secs(900), width_sweep);
    suite.run(10, "Dicke lambda sweep", secs(1800), lambda_sweep);
    suite.run(11, "density checks", secs(60), density_checks);
    println!("{} of 11 criteria failed", suite.failed);
    if suite.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
