//! One line per acceptance criterion, written straight to stdout so it shows up
//! whether or not the harness captures output.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use ptower::commands::{self, batch_descent, batch_descent_params, batch_tower, infer_cmd};
use ptower::schema::{ObservedFile, ObservedLevel};
use ptower_core::descent::{augmentation_check, DeltaPreset, SemidirectGroup, DEFAULT_BUDGET};
use ptower_core::lambda::{
    divmod_distinguished, omega, weierstrass_prepare, CompanionOptions, DistinguishedPoly,
};
use ptower_core::tower::{elementary_growth, ElementaryModule, ElementarySummand, StabilizationDepth, TowerInstance};
use ptower_core::{LambdaElement, RingParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, limit: Duration, started: Instant, outcome: Result<String, String>) {
    let elapsed = started.elapsed();
    let outcome = match outcome {
        Ok(_) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
        other => other,
    };
    let line = match &outcome {
        Ok(detail) => format!("criterion {id:>2} PASS  {name} [{elapsed:.2?}] {detail}"),
        Err(detail) => format!("criterion {id:>2} FAIL  {name} [{elapsed:.2?}] {detail}"),
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").unwrap();
    out.flush().unwrap();
    if let Err(detail) = outcome {
        panic!("criterion {id} failed: {detail}");
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * (n - i) / (i + 1))
}

fn vp(mut v: BigUint, p: u64) -> u64 {
    let mut k = 0;
    while v != BigUint::ZERO && (&v % p) == BigUint::ZERO {
        v /= p;
        k += 1;
    }
    k
}

#[test]
fn criterion_01_omega_algebra() {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        for (p, prec) in [(2u64, 12u32), (3, 8), (5, 6)] {
            let pr = RingParams::new(p, prec).unwrap();
            for n in 0..=4 {
                let w = omega(pr, n);
                let e = w.as_element();
                if !e.is_distinguished() || w.degree() as u64 != p.pow(n) - 1 {
                    return Err(format!("omega_{n} for p={p} is not distinguished of degree p^n - 1"));
                }
                if e.coeff(0).value() != p.pow(n) % pr.modulus() {
                    return Err(format!("omega_{n} for p={p} has constant term {}", e.coeff(0)));
                }
                for m in 0..=n {
                    let (_, r) = divmod_distinguished(e, &omega(pr, m)).map_err(|e| e.to_string())?;
                    if !r.is_zero() {
                        return Err(format!("omega_{m} does not divide omega_{n} for p={p}"));
                    }
                }
            }
        }
        Ok("p ∈ {2,3,5}, n ≤ 4".into())
    };
    report(1, "omega_n algebra", Duration::from_secs(1), t, run());
}

#[test]
fn criterion_02_weierstrass_roundtrip() {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let mut count = 0;
        for (p, prec) in [(2u64, 10u32), (3, 8)] {
            let pr = RingParams::new(p, prec).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            for i in 0..500 {
                let len = rng.random_range(1..=60);
                // bias some inputs towards large μ and λ
                let scale = pr.p_pow(rng.random_range(0..prec));
                let flat = rng.random_range(0..len);
                let coeffs: Vec<u64> = (0..len)
                    .map(|k| {
                        let c = rng.random_range(0..pr.modulus());
                        if k < flat { c * p % pr.modulus() } else { c }
                    })
                    .map(|c| c * scale % pr.modulus())
                    .collect();
                let f = LambdaElement::new(pr, coeffs);
                if f.is_zero() {
                    continue;
                }
                let w = weierstrass_prepare(&f, 40).map_err(|e| format!("p={p} #{i}: {e}"))?;
                if w.recombine() != f.truncate(40) {
                    return Err(format!("p={p} #{i}: recombination differs for {f}"));
                }
                count += 1;
            }
        }
        if count < 990 {
            return Err(format!("only {count} nonzero samples"));
        }
        Ok(format!("{count} polynomials"))
    };
    report(2, "Weierstrass roundtrip mod (p^N, T^41)", Duration::from_secs(30), t, run());
}

#[test]
fn criterion_03_elementary_growth() {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let opts = CompanionOptions::default();
        for p in [2u64, 3] {
            // Λ/(p, omega_n) = F_p[T]/(omega_n mod p) and omega_n ≡ T^{p^n - 1} mod p
            let m = ElementaryModule::new(p, vec![ElementarySummand::PPower { mu: 1 }]).unwrap();
            let (rep, fit) = elementary_growth(&m, 3, opts).map_err(|e| e.to_string())?;
            for r in &rep.levels {
                let pn = p.pow(r.n);
                let low = (1..pn).all(|k| binomial(pn, k) % p == BigUint::ZERO);
                let dim = if low { pn - 1 } else { u64::MAX };
                if r.e != dim || r.e != pn - 1 {
                    return Err(format!("Λ/(p), p={p}, n={}: e_n = {}", r.n, r.e));
                }
            }
            if (fit.mu, fit.lambda, fit.nu) != (1, 0, -1) {
                return Err(format!("Λ/(p), p={p}: fit {fit:?}"));
            }
        }
        for p in [2u64, 3, 5] {
            let pr = RingParams::new(p, 8).unwrap();
            let t_poly = DistinguishedPoly::new(LambdaElement::t(pr)).unwrap();
            let m = ElementaryModule::new(p, vec![ElementarySummand::Distinguished { poly: t_poly, power: 1 }]).unwrap();
            let (rep, fit) = elementary_growth(&m, 6, opts).map_err(|e| e.to_string())?;
            for r in &rep.levels {
                if r.e != vp(BigUint::from(p).pow(r.n), p) {
                    return Err(format!("Λ/(T), p={p}, n={}: e_n = {}", r.n, r.e));
                }
            }
            if (fit.mu, fit.lambda, fit.nu) != (0, 1, 0) {
                return Err(format!("Λ/(T), p={p}: fit {fit:?}"));
            }
        }
        let p = 3u64;
        let pr = RingParams::new(p, 8).unwrap();
        let poly = DistinguishedPoly::new(LambdaElement::from_i64(pr, &[-3, 1])).unwrap();
        let m = ElementaryModule::new(p, vec![ElementarySummand::Distinguished { poly, power: 1 }]).unwrap();
        let (rep, fit) = elementary_growth(&m, 4, opts).map_err(|e| e.to_string())?;
        for r in &rep.levels {
            let num = BigUint::from(1 + p).pow(p.pow(r.n) as u32) - 1u32;
            if r.e != vp(num / p, p) {
                return Err(format!("Λ/(T-3), n={}: e_n = {}", r.n, r.e));
            }
        }
        if (fit.mu, fit.lambda, fit.nu) != (0, 1, 0) {
            return Err(format!("Λ/(T-3): fit {fit:?}"));
        }
        Ok("Λ/(p), Λ/(T), Λ/(T-3)".into())
    };
    report(3, "elementary growth e_n = μp^n + λn + ν", Duration::from_secs(10), t, run());
}

const DEPTHS: [StabilizationDepth; 3] = [StabilizationDepth::Mod(1), StabilizationDepth::Mod(2), StabilizationDepth::Full];

fn n_max_for(inst: &TowerInstance) -> u32 {
    match inst.length() {
        ptower_core::tower::TowerLength::Finite(d) => d.clamp(1, 8),
        ptower_core::tower::TowerLength::Unbounded => 8,
    }
}

fn towers() -> Vec<(u64, u64, TowerInstance)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        for seed in 0..500 {
            out.push((p, seed, batch_tower(p, seed).expect("random tower")));
        }
    }
    out
}

#[test]
fn criterion_04_05_stabilization() {
    let t = Instant::now();
    let all = towers();
    let mut violations = Vec::new();
    let mut disagreements = Vec::new();
    let mut holds = [0usize; 3];
    for (p, seed, inst) in &all {
        let n_max = n_max_for(inst);
        if inst.module().log_order() > 8 {
            violations.push(format!("p={p} seed={seed}: |X̄| > p^8"));
        }
        for (i, &depth) in DEPTHS.iter().enumerate() {
            let a = inst.check_stabilization(depth, n_max);
            let b = inst.rank_stabilization(depth, n_max);
            match (&a, &b) {
                (Ok(a), Ok(b)) => {
                    if a.hypothesis_holds {
                        holds[i] += 1;
                        if !a.conclusion_verified || a.c_in_pk_x != Some(true) {
                            violations.push(format!("p={p} seed={seed} {depth:?}: witness missing"));
                        }
                    }
                    if a != b {
                        disagreements.push(format!("p={p} seed={seed} {depth:?}"));
                    }
                }
                _ => {
                    if let Err(e) = &a {
                        violations.push(format!("p={p} seed={seed} {depth:?}: {e}"));
                    }
                    if a.is_ok() != b.is_ok() {
                        disagreements.push(format!("p={p} seed={seed} {depth:?}"));
                    }
                }
            }
        }
    }
    let detail = format!("{} instances; hypothesis held for k=1: {}, k=2: {}, full: {}", all.len(), holds[0], holds[1], holds[2]);
    let r4 = if violations.is_empty() { Ok(detail.clone()) } else { Err(format!("{} violations, first: {}", violations.len(), violations[0])) };
    let r5 = if disagreements.is_empty() {
        Ok(format!("{} verdict pairs identical", all.len() * 3))
    } else {
        Err(format!("{} disagreements, first: {}", disagreements.len(), disagreements[0]))
    };
    let ok4 = r4.is_ok();
    // criterion 5 is reported first so both lines appear even if 4 fails
    let res5 = std::panic::catch_unwind(|| report(5, "check vs rank formulation", Duration::from_secs(300), t, r5));
    report(4, "stabilization suite, zero theorem violations", Duration::from_secs(300), t, r4);
    assert!(ok4 && res5.is_ok());
}

#[test]
fn criterion_06_norm_monotonicity() {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let mut levels = 0;
        let mut check = |label: String, inst: &TowerInstance, n_max: u32| -> Result<(), String> {
            let rep = inst.layer_sequence(n_max).map_err(|e| format!("{label}: {e}"))?;
            for w in rep.levels.windows(2) {
                // p-groups: |A_n| divides |A_{n+1}| iff e_n <= e_{n+1}
                if w[0].e > w[1].e {
                    return Err(format!("{label}: e_{} = {} > e_{} = {}", w[0].n, w[0].e, w[1].n, w[1].e));
                }
            }
            levels += rep.levels.len();
            Ok(())
        };
        for (p, seed, inst) in towers() {
            check(format!("tower p={p} seed={seed}"), &inst, n_max_for(&inst))?;
        }
        for i in 0..100 {
            let inst = batch_descent(i, 0, None, None, None, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let tower = inst.compile_to_tower().map_err(|e| e.to_string())?;
            check(format!("descent #{i}"), &tower, inst.d())?;
        }
        Ok(format!("{levels} levels"))
    };
    report(6, "norm monotonicity |A_n| divides |A_n+1|", Duration::from_secs(300), t, run());
}

#[test]
fn criterion_07_descent_oracle() {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let mut by_preset: Vec<(DeltaPreset, usize, usize)> = Vec::new();
        let mut first = None;
        for i in 0..100 {
            let (p, d, preset) = batch_descent_params(i, None, None, None);
            let inst = batch_descent(i, 0, None, None, None, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            if inst.group().ambient_order() > 1 << 18 {
                return Err(format!("#{i}: |𝒢| = {} exceeds 2^18", inst.group().ambient_order()));
            }
            let rep = inst.compare_oracle().map_err(|e| format!("#{i}: {e}"))?;
            let entry = match by_preset.iter_mut().find(|e| e.0 == preset) {
                Some(e) => e,
                None => {
                    by_preset.push((preset, 0, 0));
                    by_preset.last_mut().unwrap()
                }
            };
            entry.1 += 1;
            if !rep.all_equal() {
                entry.2 += 1;
                first.get_or_insert_with(|| format!("#{i} (p={p}, d={d}, Δ={}): {}", preset.name(), commands::report_text(&rep, p)));
            }
        }
        let summary: Vec<String> =
            by_preset.iter().map(|(pr, n, bad)| format!("{}: {}/{} equal", pr.name(), n - bad, n)).collect();
        let summary = summary.join(", ");
        match first {
            None => Ok(summary),
            Some(f) => Err(format!("{summary}; first mismatch {f}")),
        }
    };
    report(7, "descent oracle brute force = closed form = compiled tower", Duration::from_secs(600), t, run());
}

#[test]
fn criterion_08_augmentation_lemma() {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let mut cases = 0;
        for p in [2u64, 3] {
            for preset in [DeltaPreset::Trivial, DeltaPreset::Z2Inverting, DeltaPreset::Z3, DeltaPreset::S3Type] {
                for d in 1..=2 {
                    let g = SemidirectGroup::from_preset(p, d, preset).map_err(|e| e.to_string())?;
                    for n in 0..=1 {
                        if !augmentation_check(&g, n, 4, DEFAULT_BUDGET).map_err(|e| e.to_string())? {
                            return Err(format!("p={p} Δ={} d={d} n={n}", preset.name()));
                        }
                        cases += 1;
                    }
                }
            }
        }
        Ok(format!("{cases} cases at N = 4"))
    };
    report(8, "augmentation ideal generated by h^{p^n} - 1 and I_Δ", Duration::from_secs(60), t, run());
}

fn observed(a0: &[u32], a1: &[u32]) -> ObservedFile {
    ObservedFile {
        p: 37,
        levels: vec![
            ObservedLevel { n: 0, group: Some(a0.to_vec()), e: None },
            ObservedLevel { n: 1, group: Some(a1.to_vec()), e: None },
        ],
        ramhyp: true,
    }
}

#[test]
fn criterion_09_inference_fixtures() {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let first_line = |o: &ObservedFile| -> Result<String, String> {
            let out = infer_cmd(o, None, None).map_err(|e| e.to_string())?;
            Ok(out.text.lines().next().unwrap_or_default().to_string())
        };
        let mu = first_line(&observed(&[1], &[1]))?;
        if mu != "A_n ≅ Z/37 for all n ≥ 1" {
            return Err(format!("μ_37 line printed {mu:?}"));
        }
        let radical = first_line(&observed(&[], &[]))?;
        if radical != "A_n trivial for all n" {
            return Err(format!("radical line printed {radical:?}"));
        }
        let bin = env!("CARGO_BIN_EXE_ptower");
        let out = Command::new(bin).args(["infer", "--p", "37", "--a0", "1", "--a1", "1", "--ramhyp"]).output().unwrap();
        if String::from_utf8_lossy(&out.stdout) != "A_n ≅ Z/37 for all n ≥ 1\n" || !out.status.success() {
            return Err("binary output differs".into());
        }
        let refused = Command::new(bin).args(["infer", "--p", "37", "--a0", "1", "--a1", "1"]).output().unwrap();
        if refused.status.code() != Some(1) {
            return Err("inference without the ramification flag was not refused".into());
        }
        Ok("Z/37 and trivial lines".into())
    };
    report(9, "class-group inference for p = 37", Duration::from_secs(1), t, run());
}

#[test]
fn criterion_10_determinism() {
    let t = Instant::now();
    let run = || -> Result<String, String> {
        let bin = env!("CARGO_BIN_EXE_ptower");
        let dir = tempfile::tempdir().unwrap();
        let commands: Vec<Vec<&str>> = vec![
            vec!["fukuda", "--random", "40", "--seed", "3", "--p", "2"],
            vec!["oracle", "--random", "12", "--seed", "7"],
            vec!["random-instance", "--p", "3", "--seed", "5"],
            vec!["random-instance", "--kind", "descent", "--p", "3", "--d", "2", "--delta", "z2", "--seed", "5"],
        ];
        for args in &commands {
            let a = Command::new(bin).args(args).output().unwrap();
            let b = Command::new(bin).args(args).output().unwrap();
            if a.stdout != b.stdout || a.status.code() != b.status.code() {
                return Err(format!("{args:?} differs between runs"));
            }
        }
        // emitted instances re-ingest to the same results
        for (kind, extra) in [("tower", vec![]), ("descent", vec!["--d", "2", "--delta", "z2-central"])] {
            let mut args = vec!["random-instance", "--kind", kind, "--p", "3", "--seed", "11"];
            args.extend(extra);
            let emitted = Command::new(bin).args(&args).output().unwrap();
            let path = dir.path().join(format!("{kind}.json"));
            std::fs::write(&path, &emitted.stdout).unwrap();
            let path = path.to_str().unwrap();
            let json: serde_json::Value = serde_json::from_slice(&emitted.stdout).map_err(|e| e.to_string())?;
            let d = json["d"].as_u64().map_or(6, |d| d.clamp(1, 6)) as u32;
            let n_max = d.to_string();
            let n_max = n_max.as_str();
            for format in ["text", "csv", "json"] {
                let run = || Command::new(bin).args(["layers", path, "--n-max", n_max, "--format", format]).output().unwrap();
                let (x, y) = (run(), run());
                if x.stdout != y.stdout || !x.status.success() {
                    return Err(format!("layers on emitted {kind} file ({format}) not reproducible"));
                }
            }
            if kind == "tower" {
                let direct = batch_tower(3, 11).map_err(|e| e.to_string())?.layer_sequence(d);
                let reread = ptower::schema::read(std::path::Path::new(path)).map_err(|e| e.to_string())?;
                let ptower::InstanceFile::Tower(tf) = reread else { return Err("wrong kind".into()) };
                let reloaded = tf.load().map_err(|e| e.to_string())?.layer_sequence(d);
                if direct.as_ref().ok() != reloaded.as_ref().ok() || direct.is_err() {
                    return Err("re-ingested tower gives different layers".into());
                }
            }
        }
        Ok(format!("{} commands and 2 round trips", commands.len()))
    };
    report(10, "determinism and round trips", Duration::from_secs(60), t, run());
}
