use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use chowvol::corpus::{all_matroids, random_matroids, uniform_matroids};
use chowvol::mixedvol::{
    brion_volume, chow_rank_checks_all, cross_validate, decompose_weight_seeded, deletion_volume,
    deletion_volume_traced, evaluation_volume_seeded, generic_vectors, random_projection, subdivision_operator,
};
use chowvol::poly::{int, q, Monomial};
use chowvol::{bergman_fan, Genericity, Matroid, MinkowskiWeight, RationalPoly, VarId};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn x(l: &[u32]) -> RationalPoly {
    RationalPoly::var(VarId::of(l))
}

fn sq(p: &RationalPoly) -> RationalPoly {
    p * p
}

fn half_squares(labels: &[&[u32]]) -> RationalPoly {
    labels.iter().map(|l| sq(&x(l))).sum::<RationalPoly>().scale(&q(-1, 2))
}

fn plane() -> Matroid {
    Matroid::from_bases(&[1, 2, 3, 4], &[vec![1, 2, 4], vec![1, 3, 4], vec![2, 3, 4]]).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn plane_golden() -> Outcome {
    let mut expect = half_squares(&[&[1], &[2], &[3], &[4], &[4], &[1, 4], &[2, 4], &[3, 4], &[1, 2, 3]]);
    expect += &x(&[4]) * &(&(&x(&[1, 4]) + &x(&[2, 4])) + &x(&[3, 4]));
    expect += &x(&[1, 2, 3]) * &(&(&x(&[1]) + &x(&[2])) + &x(&[3]));
    expect += &(&(&x(&[1]) * &x(&[1, 4])) + &(&x(&[2]) * &x(&[2, 4]))) + &(&x(&[3]) * &x(&[3, 4]));
    let m = plane();
    let del = deletion_volume(&m).map_err(|e| e.to_string())?;
    let bri = brion_volume(&m, &generic_vectors(&m, 1).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(del.poly == expect, format!("deletion gave {del}"))?;
    ensure(bri.poly == expect, format!("brion gave {bri}"))?;
    Ok(format!("{} terms, both methods exact", expect.len()))
}

fn boolean_golden() -> Outcome {
    // Known volume on labels {1,2,4}, renamed along 4 -> 3.
    let mut b124 = half_squares(&[&[1], &[2], &[4], &[1, 2], &[1, 4], &[2, 4]]);
    b124 += &x(&[1]) * &(&x(&[1, 2]) + &x(&[1, 4]));
    b124 += &x(&[2]) * &(&x(&[1, 2]) + &x(&[2, 4]));
    b124 += &x(&[4]) * &(&x(&[1, 4]) + &x(&[2, 4]));
    let rename = [
        (VarId::of(&[4]), VarId::of(&[3])),
        (VarId::of(&[1, 4]), VarId::of(&[1, 3])),
        (VarId::of(&[2, 4]), VarId::of(&[2, 3])),
    ]
    .into();
    let expect = b124.rename(&rename);
    let m = Matroid::uniform(3, 3).unwrap();
    let del = deletion_volume(&m).map_err(|e| e.to_string())?;
    let bri = brion_volume(&m, &generic_vectors(&m, 2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(del.poly == expect && bri.poly == expect, format!("got {del}"))?;
    Ok("both methods exact".into())
}

fn deletion_intermediates() -> Outcome {
    let (vol, trace) = deletion_volume_traced(&plane(), 4, None).map_err(|e| e.to_string())?;
    let s = &(&x(&[1]) + &x(&[2])) + &x(&[3]);
    let lifted = &(&x(&[4]) * &(&s + &x(&[4]).scale(&q(1, 2))))
        + &(&x(&[1, 2, 3]) * &(&s - &x(&[1, 2, 3]).scale(&q(1, 2))));
    ensure(trace.coloop, "4 should be a coloop")?;
    ensure(trace.tower.last().map(|v| &v.poly) == Some(&lifted), "lifted volume differs")?;
    let mut expect = lifted.clone();
    for e in 1..=3 {
        expect -= &sq(&(&(&x(&[e, 4]) - &x(&[e])) - &x(&[4]))).scale(&q(1, 2));
    }
    ensure(vol.poly == expect, format!("final volume differs: {vol}"))?;
    let c = vol.poly.coefficient(&Monomial::product([VarId::of(&[4]), VarId::of(&[4])]));
    ensure(c == int(-1), format!("x4^2 coefficient {c}"))?;
    Ok(format!("{} intermediate volumes, x4^2 coefficient -1", trace.tower.len()))
}

fn differential_corpus() -> Outcome {
    let mut list = uniform_matroids(6).map_err(|e| e.to_string())?;
    let uniforms = list.len();
    list.extend(random_matroids(60, 6, 2026).map_err(|e| e.to_string())?);
    let policy = Genericity::default();
    let failures: Vec<String> = list
        .par_iter()
        .filter_map(|c| match cross_validate(&c.matroid, &[11, 12], &policy) {
            Ok(r) if r.passed() => None,
            Ok(r) => Some(format!("{}: {:?}", c.name, r.divergence.map(|d| d.left))),
            Err(e) => Some(format!("{}: {e}", c.name)),
        })
        .collect();
    ensure(failures.is_empty(), failures.join("; "))?;
    Ok(format!("{uniforms} uniform + {} random matroids, 2 seeds each", list.len() - uniforms))
}

fn operator_consistency() -> Outcome {
    let policy = Genericity::default();
    let list = random_matroids(40, 6, 77).map_err(|e| e.to_string())?;
    let pairs: Vec<(usize, usize)> = list
        .iter()
        .enumerate()
        .filter(|(_, c)| c.matroid.dim() >= 2)
        .take(12)
        .flat_map(|(k, _)| [(k, 0), (k, 1)])
        .collect();
    let results: Vec<Result<(), String>> = pairs
        .par_iter()
        .map(|&(k, t)| {
            let m = &list[k].matroid;
            let fan = bergman_fan(m).map_err(|e| e.to_string())?;
            let cones = fan.cones_of_dim(2);
            let tau = &cones[(k * 31 + t * 17) % cones.len()];
            let labels = fan.labels(tau);
            let r = fan.fresh_label();
            let fine = fan.star_subdivide(tau, r).map_err(|e| e.to_string())?;
            let weight = MinkowskiWeight::constant(&fan, int(1))
                .pull_back(&fan, &fine)
                .map_err(|e| e.to_string())?;
            let (_, projected) = random_projection(&fine, k as u64, &policy).map_err(|e| e.to_string())?;
            let eval = evaluation_volume_seeded(&projected, &weight, t as u64, &policy).map_err(|e| e.to_string())?;
            let vol = deletion_volume(m).map_err(|e| e.to_string())?;
            let op = subdivision_operator(&vol, labels[0], labels[1], r).map_err(|e| e.to_string())?;
            ensure(eval == op, format!("{} at {labels:?}", list[k].name))
        })
        .collect();
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    ensure(pairs.len() >= 20, format!("only {} pairs", pairs.len()))?;
    ensure(failures.is_empty(), failures.join("; "))?;
    Ok(format!("{} (fan, 2-cone) pairs", pairs.len()))
}

fn poincare_rank() -> Outcome {
    let all = all_matroids(5).map_err(|e| e.to_string())?;
    let failures: Vec<String> = all
        .par_iter()
        .filter_map(|c| {
            let run = || -> Result<bool, chowvol::Error> {
                let fan = bergman_fan(&c.matroid)?;
                let vol = deletion_volume(&c.matroid)?;
                Ok(chow_rank_checks_all(&fan, &vol)?.iter().all(|r| r.passed()))
            };
            match run() {
                Ok(true) => None,
                Ok(false) => Some(c.name.clone()),
                Err(e) => Some(format!("{}: {e}", c.name)),
            }
        })
        .collect();
    ensure(failures.is_empty(), failures.join("; "))?;
    Ok(format!("{} isomorphism classes on at most 5 elements", all.len()))
}

fn weight_decomposition() -> Outcome {
    let policy = Genericity::default();
    let mut list = uniform_matroids(5).map_err(|e| e.to_string())?;
    list.extend(random_matroids(10, 5, 5).map_err(|e| e.to_string())?);
    let mut fans = 0;
    for (k, c) in list.iter().enumerate().filter(|(_, c)| c.matroid.dim() >= 1) {
        let (_, fan) = random_projection(&bergman_fan(&c.matroid).map_err(|e| e.to_string())?, k as u64, &policy)
            .map_err(|e| e.to_string())?;
        let w = MinkowskiWeight::constant(&fan, int(1));
        let (_, parts) = decompose_weight_seeded(&fan, &w, k as u64, &policy).map_err(|e| format!("{}: {e}", c.name))?;
        ensure(
            parts.iter().all(|p| p.fan.check_balancing(&p.weight).passed()),
            format!("{}: unbalanced summand", c.name),
        )?;
        fans += 1;
    }
    ensure(fans >= 10, format!("only {fans} fans"))?;
    Ok(format!("{fans} projected fans"))
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

/// Output files and stdout of a fixed set of runs under `threads` workers.
fn run_outputs(threads: &str, dir: &std::path::Path) -> Result<Vec<Vec<u8>>, String> {
    let mut outputs = Vec::new();
    for (input, method) in [("plane.json", "both"), ("u35.json", "both"), ("u35.json", "brion")] {
        let out = dir.join(format!("{threads}-{input}-{method}"));
        let o = Command::new(env!("CARGO_BIN_EXE_chowvol"))
            .args(["--threads", threads, "compute", "--input", &data(input), "--method", method, "--seed", "5"])
            .args(["--output", &out.display().to_string()])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.success(), format!("compute {input} failed"))?;
        outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        outputs.push(o.stdout);
    }
    let o = Command::new(env!("CARGO_BIN_EXE_chowvol"))
        .args(["--threads", threads, "--json", "corpus", "--max-elements", "5", "--count", "12", "--seed", "8"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), "corpus failed")?;
    outputs.push(o.stdout);
    Ok(outputs)
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("chowvol-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let reference = run_outputs("1", &dir)?;
    for threads in ["1", "2", "8"] {
        let again = run_outputs(threads, &dir)?;
        ensure(again == reference, format!("outputs differ with {threads} threads"))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} outputs identical under 1, 2 and 8 threads", reference.len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1 golden volume of the four-element rank-3 matroid", Some(Duration::from_secs(1)), plane_golden),
        ("2 Boolean matroid on three elements", Some(Duration::from_secs(1)), boolean_golden),
        ("3 deletion intermediates for i = 4", Some(Duration::from_secs(1)), deletion_intermediates),
        ("4 differential corpus", Some(Duration::from_secs(60)), differential_corpus),
        ("5 operator consistency", Some(Duration::from_secs(30)), operator_consistency),
        ("6 pairing rank equals dim CH^p", Some(Duration::from_secs(60)), poincare_rank),
        ("7 weight decomposition", Some(Duration::from_secs(10)), weight_decomposition),
        ("8 determinism across thread counts", None, determinism),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(_) if limit.is_some_and(|l| elapsed > l) => ("FAIL", "over the time limit".to_string()),
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        let limit = limit.map_or("none".to_string(), |l| format!("{}s", l.as_secs()));
        println!("[{status}] criterion {name}: {detail} ({:.2}s, limit {limit})", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
