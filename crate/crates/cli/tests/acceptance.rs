//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each, and exits nonzero if any failed.

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use isoforge::formats::{parse_block, parse_embedding, parse_space, write_group, write_space};
use isoforge_core::free_space::{
    ae_map, ae_norm, attach_anchor_chain, fixed_vector_subgroup, linear_ball_symmetries, signed_isometry_actions,
    symmetry_group, Molecule, CHAIN_LABELS,
};
use isoforge_core::group::{abstract_isomorphic, Perm, DEFAULT_ORDER_CAP};
use isoforge_core::metric::{snowflake, FiniteMetricSpace};
use isoforge_core::oracles::{factorial_isometries, lipschitz_dual_lp, transport_lp, unpruned_isometries};
use isoforge_core::rational::{q, qi, Q};
use isoforge_core::search::{isometries, try_isometries};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Runs the binary with `--out` files in a scratch directory and remembers
/// every invocation so it can be repeated.
struct Runner {
    dir: tempfile::TempDir,
    runs: Vec<(Vec<String>, PathBuf, [u8; 32])>,
    counter: usize,
}

struct Run {
    code: Option<i32>,
    out: PathBuf,
    report: serde_json::Value,
}

impl Runner {
    fn new() -> Self {
        Runner { dir: tempfile::tempdir().unwrap(), runs: Vec::new(), counter: 0 }
    }

    fn file(&mut self, stem: &str, text: &str) -> String {
        self.counter += 1;
        let name = format!("{stem}-{}.json", self.counter);
        std::fs::write(self.dir.path().join(&name), text).unwrap();
        name
    }

    fn exec(&self, args: &[String], out: &Path) -> (Option<i32>, serde_json::Value) {
        let output = Command::new(env!("CARGO_BIN_EXE_isoforge"))
            .current_dir(self.dir.path())
            .env_remove("ISOFORGE_POINT_CAP")
            .args(args)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        let report = serde_json::from_slice(output.stderr.trim_ascii_end()).unwrap_or(serde_json::Value::Null);
        (output.status.code(), report)
    }

    fn run(&mut self, args: &[&str]) -> Run {
        self.counter += 1;
        let out = self.dir.path().join(format!("out-{}.json", self.counter));
        let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let (code, report) = self.exec(&args, &out);
        if code == Some(0) || code == Some(1) {
            self.runs.push((args, out.clone(), digest_file(&out)));
        }
        Run { code, out, report }
    }
}

fn digest_file(path: &Path) -> [u8; 32] {
    let bytes = std::fs::read(path).unwrap_or_default();
    Sha256::digest(&bytes).into()
}

fn verdicts(report: &serde_json::Value) -> Vec<(String, bool)> {
    report["verdicts"]
        .as_array()
        .map(|vs| vs.iter().map(|v| (v["check"].as_str().unwrap_or("").to_string(), v["passed"] == true)).collect())
        .unwrap_or_default()
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

fn space(rows: &[&[(i64, i64)]]) -> FiniteMetricSpace {
    let d = rows.iter().map(|r| r.iter().map(|&(a, b)| q(a, b)).collect()).collect();
    FiniteMetricSpace::new(labels(rows.len()), d).unwrap()
}

fn symmetric(n: usize, upper: &[Q]) -> FiniteMetricSpace {
    let mut d = vec![vec![qi(0); n]; n];
    let mut it = upper.iter();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = it.next().expect("entries").clone();
            d[i][j] = v.clone();
            d[j][i] = v;
        }
    }
    FiniteMetricSpace::new(labels(n), d).unwrap()
}

/// Shortest-path closure of random positive weights: always a metric.
fn random_space(rng: &mut ChaCha8Rng, n: usize, pool: Option<&[Q]>) -> FiniteMetricSpace {
    let mut d = vec![vec![qi(0); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = match pool {
                Some(p) => p[rng.gen_range(0..p.len())].clone(),
                None => q(rng.gen_range(1..=40), rng.gen_range(1..=12)),
            };
            d[i][j] = v.clone();
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &d[i][k] + &d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    FiniteMetricSpace::new(labels(n), d).unwrap()
}

fn equilateral() -> FiniteMetricSpace {
    FiniteMetricSpace::discrete(labels(3)).unwrap()
}

fn isosceles() -> FiniteMetricSpace {
    space(&[&[(0, 1), (1, 1), (1, 1)], &[(1, 1), (0, 1), (3, 2)], &[(1, 1), (3, 2), (0, 1)]])
}

fn discrete4() -> FiniteMetricSpace {
    FiniteMetricSpace::discrete(labels(4)).unwrap()
}

fn generic4() -> FiniteMetricSpace {
    symmetric(4, &[q(1, 1), q(11, 10), q(6, 5), q(13, 10), q(7, 5), q(3, 2)])
}

fn square() -> FiniteMetricSpace {
    // 4-cycle with diagonals 2; isometry group dihedral of order 8.
    symmetric(4, &[qi(1), qi(2), qi(1), qi(1), qi(2), qi(1)])
}

const GADGET_CHECKS: [&str; 7] = [
    "gadget:respects",
    "gadget:lambda<=5",
    "gadget:mu<=11",
    "gadget:diagonal-link",
    "gadget:coordinate-link",
    "gadget:tag-unique",
    "gadget:tag-orbit",
];

/// Gadget verdicts of one run, for criterion 3.
#[derive(Default)]
struct GadgetLog {
    runs: usize,
    failures: Vec<String>,
}

impl GadgetLog {
    fn record(&mut self, what: &str, report: &serde_json::Value, expect_gadget: bool) {
        self.runs += 1;
        let v = verdicts(report);
        for (check, passed) in &v {
            if check.starts_with("gadget:") && !passed {
                self.failures.push(format!("{what}: {check}"));
            }
        }
        if expect_gadget {
            for check in GADGET_CHECKS {
                if !v.iter().any(|(c, _)| c == check) {
                    self.failures.push(format!("{what}: {check} missing"));
                }
            }
        }
    }
}

fn criterion_1(r: &mut Runner, log: &mut GadgetLog) -> Outcome {
    let corpus = [
        ("equilateral", equilateral()),
        ("isosceles", isosceles()),
        ("discrete-4", discrete4()),
        ("generic-4", generic4()),
        ("square", square()),
    ];
    let mut total = 0;
    let mut brute = 0;
    for (name, s) in &corpus {
        let space_file = r.file(name, &write_space(s));
        for g in isometries(s).all_subgroups() {
            let group_file = r.file("group", &write_group(&g));
            let run = r.run(&["realize", &space_file, &group_file, "--mode", "base", "--verify"]);
            ensure!(run.code == Some(0), "{name}, subgroup of order {}: exit {:?}", g.order(), run.code);
            let v = verdicts(&run.report);
            ensure!(v.iter().any(|(c, p)| c == "realization" && *p), "{name}: no passing realization verdict");
            log.record(&format!("{name}/order {}", g.order()), &run.report, true);

            // Independent check of the written output: the isometry group of
            // the realized space is exactly the set of hats.
            #[derive(Deserialize)]
            struct Out {
                block: serde_json::Value,
                embedding: serde_json::Value,
            }
            let out: Out = serde_json::from_str(&std::fs::read_to_string(&run.out).unwrap()).unwrap();
            let block = parse_block(&out.block.to_string()).unwrap();
            let emb = parse_embedding(&out.embedding.to_string()).unwrap();
            let mut hats: Vec<Perm> = g.elements().iter().map(|u| block.hat(u)).collect();
            hats.sort();
            let actual = if block.space.len() <= 19 {
                brute += 1;
                unpruned_isometries(&block.space)
            } else {
                isometries(&block.space).elements().to_vec()
            };
            ensure!(actual == hats, "{name}, order {}: isometry group differs from the hats", g.order());
            ensure!(emb.image.elements() == hats.as_slice(), "{name}: embedding image differs");
            total += 1;
        }
    }
    Ok(format!("{total} subgroups over 5 spaces realized and verified ({brute} outputs rechecked by unpruned search)"))
}

#[derive(Deserialize)]
struct GroupJson {
    elements: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
struct IsoJson {
    isometry_group: GroupJson,
    witness: Option<Vec<usize>>,
}

#[derive(Deserialize)]
struct PipelineOut {
    group: GroupJson,
    isomorphism: IsoJson,
    embedding: EmbeddingImage,
}

#[derive(Deserialize)]
struct EmbeddingImage {
    image: GroupJson,
}

fn perms(g: &GroupJson) -> Vec<Perm> {
    g.elements.iter().map(|e| Perm::new(e.clone()).unwrap()).collect()
}

fn criterion_2(r: &mut Runner, log: &mut GadgetLog) -> Outcome {
    let presets = ["C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "S3", "D4", "Q8", "D5"];
    let mut sizes = Vec::new();
    for name in presets {
        let run = r.run(&["group2space", "--preset", name, "--realize"]);
        ensure!(run.code == Some(0), "{name}: exit {:?} {}", run.code, run.report["error"]);
        log.record(name, &run.report, true);
        ensure!(
            verdicts(&run.report).iter().all(|(_, p)| *p),
            "{name}: failing verdict {:?}",
            verdicts(&run.report)
        );
        let text = std::fs::read_to_string(&run.out).unwrap();
        let out: PipelineOut = serde_json::from_str(&text).unwrap();
        let source = perms(&out.group);
        let iso = perms(&out.isomorphism.isometry_group);
        ensure!(perms(&out.embedding.image) == iso, "{name}: isometry group differs from the embedded image");
        let witness = out.isomorphism.witness.ok_or(format!("{name}: no witness"))?;
        // Witness check: a bijection that turns composition into composition.
        ensure!(witness.len() == source.len() && source.len() == iso.len(), "{name}: sizes differ");
        let mut seen = witness.clone();
        seen.sort_unstable();
        seen.dedup();
        ensure!(seen.len() == witness.len() && seen.iter().all(|&i| i < iso.len()), "{name}: not a bijection");
        let index: BTreeMap<&Perm, usize> = source.iter().enumerate().map(|(i, p)| (p, i)).collect();
        for a in 0..source.len() {
            for b in 0..source.len() {
                let ab = index[&source[a].compose(&source[b])];
                ensure!(iso[witness[ab]] == iso[witness[a]].compose(&iso[witness[b]]), "{name}: not a homomorphism");
            }
        }
        sizes.push(format!("{name}:{}", iso[0].degree()));
    }
    Ok(format!("13 presets realized with verified isomorphism witnesses (points {})", sizes.join(" ")))
}

fn criterion_3(log: &GadgetLog) -> Outcome {
    ensure!(log.runs > 0, "no runs recorded");
    ensure!(log.failures.is_empty(), "{} failures, first: {}", log.failures.len(), log.failures[0]);
    Ok(format!("{} gadgets certified on {} checks each", log.runs, GADGET_CHECKS.len()))
}

fn criterion_4(r: &mut Runner) -> Outcome {
    let mut count = 0;
    for (a, b) in [("1", "2"), ("2", "3"), ("3", "5")] {
        for n in 6..=64 {
            let n_text = n.to_string();
            let run = r.run(&["rigid", "--n", &n_text, "--a", a, "--b", b]);
            ensure!(run.code == Some(0), "rigid n={n} a={a} b={b}: exit {:?}", run.code);
            let s = parse_space(&std::fs::read_to_string(&run.out).unwrap()).unwrap();
            let order = isometries(&s).order();
            ensure!(order == 1, "n={n} a={a} b={b}: order {order}");
            count += 1;
        }
    }
    for len in 3..=25 {
        let len_text = len.to_string();
        let run = r.run(&["rigid", "--n", &len_text, "--path"]);
        ensure!(run.code == Some(0), "path {len}: exit {:?}", run.code);
        let s = parse_space(&std::fs::read_to_string(&run.out).unwrap()).unwrap();
        let order = isometries(&s).order();
        ensure!(order == 2, "path N={len}: order {order}");
        if len <= 7 {
            ensure!(factorial_isometries(&s).len() == 2, "path N={len}: factorial oracle disagrees");
        }
    }
    Ok(format!("{count} rigid metrics of order 1, 23 paths of order 2"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pool = [qi(1), qi(2), q(3, 2), q(5, 3)];
    let mut nontrivial = 0;
    for k in 0..200 {
        let n = rng.gen_range(1..=7);
        // Half from a small pool (symmetric spaces are common), half generic.
        let s = random_space(&mut rng, n, (k % 2 == 0).then_some(&pool[..]));
        let pruned = isometries(&s);
        let oracle = factorial_isometries(&s);
        ensure!(pruned.elements() == oracle.as_slice(), "space {k} ({n} points) differs: {}", write_space(&s));
        if pruned.order() > 1 {
            nontrivial += 1;
        }
    }
    Ok(format!("200 spaces equal element for element ({nontrivial} with nontrivial isometries)"))
}

fn criterion_6(r: &mut Runner) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pool = [qi(1), q(3, 2), qi(2), q(5, 4)];
    let mut pairs = 0;
    let mut lp_checked = 0;
    let mut images = 0;
    let mut cli_checked = 0;
    while pairs < 520 {
        let n = rng.gen_range(2..=8);
        let s = random_space(&mut rng, n, (pairs % 3 != 0).then_some(&pool[..]));
        let Ok(iso) = try_isometries(&s, 2000) else { continue };
        for p in 0..n {
            for q_ in 0..n {
                let e = Molecule::elementary(&s, p, q_);
                ensure!(&ae_norm(&e).value == s.d(p, q_), "elementary norm differs at ({p},{q_})");
            }
        }
        for _ in 0..5 {
            let mut c: Vec<Q> = (0..n).map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=6))).collect();
            let total: Q = c.iter().sum();
            c[n - 1] -= total;
            let m = Molecule::new(&s, c.clone()).unwrap();
            let cert = ae_norm(&m);
            ensure!(cert.check(&m).is_ok(), "certificate fails: {:?}", cert.check(&m));
            ensure!(cert.primal_cost(&s) == cert.dual_value(&m), "duality gap");
            if n <= 5 {
                ensure!(transport_lp(&m) == cert.value, "transport LP differs");
                ensure!(lipschitz_dual_lp(&m) == cert.value, "Lipschitz LP differs");
                lp_checked += 1;
            }
            for u in iso.elements() {
                ensure!(ae_norm(&ae_map(u, &m).unwrap()).value == cert.value, "norm not invariant");
                images += 1;
            }
            if cli_checked < 20 {
                let space_file = r.file("ae-space", &write_space(&s));
                let coeffs: BTreeMap<String, String> =
                    s.points().iter().cloned().zip(c.iter().map(|v| v.to_string())).collect();
                let mol = serde_json::json!({ "space": space_file, "coeffs": coeffs }).to_string();
                let mol_file = r.file("molecule", &mol);
                let run = r.run(&["aenorm", &space_file, &mol_file]);
                ensure!(run.code == Some(0), "aenorm exit {:?}", run.code);
                let out: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&run.out).unwrap()).unwrap();
                ensure!(out["value"] == cert.value.to_string(), "CLI value differs");
                cli_checked += 1;
            }
            pairs += 1;
        }
    }
    Ok(format!(
        "{pairs} pairs with zero duality gap ({lp_checked} also against both LPs), {images} isometry images invariant"
    ))
}

fn criterion_7(r: &mut Runner) -> Outcome {
    let eps = q(1, 1000);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut corpus: Vec<(String, FiniteMetricSpace)> = vec![
        ("two-point".into(), FiniteMetricSpace::discrete(labels(2)).unwrap()),
        ("equilateral".into(), equilateral()),
        ("isosceles".into(), isosceles()),
        ("scalene".into(), space(&[&[(0, 1), (1, 1), (5, 4)], &[(1, 1), (0, 1), (3, 2)], &[(5, 4), (3, 2), (0, 1)]])),
        ("discrete-4".into(), discrete4()),
        ("generic-4".into(), generic4()),
    ];
    for k in 0..30 {
        let n = rng.gen_range(2..=4);
        let pool = [qi(1), q(5, 4), q(3, 2), q(7, 4)];
        let s = random_space(&mut rng, n, (k % 2 == 0).then_some(&pool[..]));
        corpus.push((format!("random-{k}"), s));
    }
    // Approximants of √d for every corpus space, including spaces that
    // are not strict themselves.
    let mut flakes = Vec::new();
    for (name, s) in corpus.iter().chain([("square".to_string(), square()), ("path-3".to_string(), symmetric(3, &[qi(1), qi(2), qi(1)]))].iter()) {
        flakes.push((format!("{name} snowflaked"), snowflake(s, &eps).unwrap()));
    }
    corpus.retain(|(_, s)| s.check_strict_triangle().is_ok());
    corpus.extend(flakes);
    let mut findings = Vec::new();
    for (name, s) in &corpus {
        let found: Vec<Vec<usize>> = linear_ball_symmetries(s).unwrap().into_iter().map(|b| b.vertex_perm).collect();
        let signed = signed_isometry_actions(s);
        if found != signed {
            findings.push(format!("{name}: {} ball symmetries vs {} signed isometries", found.len(), signed.len()));
        }
    }
    ensure!(findings.is_empty(), "{}", findings.join("; "));
    let hex = linear_ball_symmetries(&equilateral()).unwrap().len();
    ensure!(hex == 12, "equilateral gives {hex}");
    let eq_file = r.file("equilateral", &write_space(&equilateral()));
    let run = r.run(&["ballsym", &eq_file]);
    let out: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&run.out).unwrap()).unwrap();
    ensure!(run.code == Some(0) && out["order"] == 12, "CLI ballsym on the equilateral space");
    Ok(format!("{} strict spaces match ±AE(Iso); equilateral has 12", corpus.len()))
}

fn criterion_8(r: &mut Runner) -> Outcome {
    let eps = "1/1000";
    let ys: Vec<FiniteMetricSpace> = vec![
        FiniteMetricSpace::discrete(vec!["y".into()]).unwrap(),
        FiniteMetricSpace::discrete(labels(2)).unwrap().dilate(&q(1, 4)).unwrap(),
        FiniteMetricSpace::discrete(labels(2)).unwrap().dilate(&q(2, 5)).unwrap(),
        equilateral().dilate(&q(1, 4)).unwrap(),
        space(&[&[(0, 1), (1, 4), (1, 4)], &[(1, 4), (0, 1), (1, 3)], &[(1, 4), (1, 3), (0, 1)]]),
        space(&[&[(0, 1), (1, 5), (1, 4)], &[(1, 5), (0, 1), (1, 3)], &[(1, 4), (1, 3), (0, 1)]]),
        space(&[&[(0, 1), (1, 8), (1, 4)], &[(1, 8), (0, 1), (1, 8)], &[(1, 4), (1, 8), (0, 1)]]),
    ];
    for (k, y) in ys.iter().enumerate() {
        let anchored = attach_anchor_chain(y).unwrap();
        let chain: Vec<usize> = CHAIN_LABELS.iter().map(|l| anchored.index_of(l).unwrap()).collect();
        let all = factorial_isometries(&anchored);
        ensure!(
            all.iter().all(|u| chain.iter().all(|&c| u.apply(c) == c)),
            "y-space {k}: an isometry moves a chain point"
        );
        ensure!(all.len() == isometries(y).order(), "y-space {k}: anchored group has the wrong order");

        let anchored_file = r.file("anchored", &write_space(&anchored));
        let flake = r.run(&["snowflake", &anchored_file, "--eps", eps]);
        ensure!(flake.code == Some(0), "snowflake exit {:?}", flake.code);
        let flake_name = flake.out.file_name().unwrap().to_str().unwrap().to_string();
        let run = r.run(&["ballsym", &flake_name, "--fix-e"]);
        ensure!(run.code == Some(0), "ballsym --fix-e exit {:?}", run.code);
        let out: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&run.out).unwrap()).unwrap();

        let flaked = parse_space(&std::fs::read_to_string(&flake.out).unwrap()).unwrap();
        let fixed = fixed_vector_subgroup(&flaked).unwrap();
        ensure!(out["order"] == fixed.len(), "y-space {k}: CLI order differs from library");
        let fixed_group = symmetry_group(&fixed).unwrap();
        let y_iso = isometries(y);
        ensure!(
            abstract_isomorphic(&fixed_group, &y_iso, DEFAULT_ORDER_CAP).unwrap().is_some(),
            "y-space {k}: fixed-vector subgroup of order {} is not isomorphic to Iso(y) of order {}",
            fixed_group.order(),
            y_iso.order()
        );
    }
    Ok(format!("{} y-spaces: chains fixed, fixed-vector subgroups isomorphic to Iso(y)", ys.len()))
}

fn criterion_9(r: &Runner) -> Outcome {
    let mut differing = Vec::new();
    let scratch = r.dir.path().join("repeat.json");
    for (args, _, digest) in &r.runs {
        let _ = r.exec(args, &scratch);
        if digest_file(&scratch) != *digest {
            differing.push(args.join(" "));
        }
    }
    ensure!(!r.runs.is_empty(), "nothing to repeat");
    ensure!(differing.is_empty(), "{} runs differ, first: {}", differing.len(), differing[0]);
    Ok(format!("{} runs repeated with byte-identical output", r.runs.len()))
}

fn main() {
    // Accept and ignore libtest flags such as --nocapture or filters.
    let mut runner = Runner::new();
    let mut gadgets = GadgetLog::default();
    let mut results: Vec<(usize, &str, bool, String, f64)> = Vec::new();
    let mut record = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        let line = format!(
            "criterion {n} [{name}]: {} ({secs:.1}s) {detail}\n",
            if passed { "PASS" } else { "FAIL" }
        );
        std::io::stdout().write_all(line.as_bytes()).unwrap();
        std::io::stdout().flush().unwrap();
        results.push((n, name, passed, detail, secs));
    };
    record(1, "realization exactness", &mut || criterion_1(&mut runner, &mut gadgets));
    record(2, "group realization pipeline", &mut || criterion_2(&mut runner, &mut gadgets));
    record(3, "gadget certification", &mut || criterion_3(&gadgets));
    record(4, "rigidity", &mut || criterion_4(&mut runner));
    record(5, "search oracle equivalence", &mut criterion_5);
    record(6, "free-space duality", &mut || criterion_6(&mut runner));
    record(7, "ball symmetries", &mut || criterion_7(&mut runner));
    record(8, "fixed-vector subgroup", &mut || criterion_8(&mut runner));
    record(9, "determinism", &mut || criterion_9(&runner));
    let failed = results.iter().filter(|r| !r.2).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
