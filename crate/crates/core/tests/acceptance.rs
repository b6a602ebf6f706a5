//! Acceptance suite: one pass/fail line per criterion, non-zero exit if any fails.

mod common;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Signed;

use common::*;
use eulerkit::bidual::*;
use eulerkit::characters::{all_characters, UnitLog};
use eulerkit::commands::{self, Settings};
use eulerkit::cyclo::{CycElt, CyclotomicField};
use eulerkit::euler::*;
use eulerkit::field::{AbelianField, Place};
use eulerkit::finite_field::{dlog_naive, DlogCache};
use eulerkit::group::Group;
use eulerkit::group_ring::IntGroupRing;
use eulerkit::kolyvagin::{residue_log, v_q, DerivativeOp, PrimeAboveData};
use eulerkit::lvalues::{character_field, conductor_order, l_order, vanishing_factors, LValueEngine};
use eulerkit::par::Exec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: u64) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < Duration::from_secs(limit), || format!("took {:.1}s, limit {limit}s", e.as_secs_f64()))
}

fn err(e: eulerkit::Error) -> String {
    e.to_string()
}

fn pow10(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10).pow(k))
}

fn dec(s: &str) -> BigRational {
    let (i, f) = s.split_once('.').unwrap();
    let den = BigInt::from(10).pow(f.len() as u32);
    BigRational::new(format!("{i}{f}").parse::<BigInt>().unwrap(), den)
}

fn distribution_relations() -> Outcome {
    let t = Instant::now();
    let sys = epsilon_system(&ddagger_levels(60)).map_err(err)?;
    let checks = distribution_suite(&sys, 60, Exec::Parallel).map_err(err)?;
    ensure(!checks.is_empty(), || "no nested pairs".into())?;
    if let Some(c) = checks.iter().find(|c| !c.passed) {
        return Err(format!("{} fails: {}", c.name, c.witnesses[0]));
    }
    within(t, 60)?;
    Ok(format!("{} nested pairs exact", checks.len()))
}

fn lvalue_oracles() -> Outcome {
    let t = Instant::now();
    let mut eng = LValueEngine::new(128).map_err(err)?;
    let mut n = 0;
    for f in 3..=30 {
        for chi in all_characters(f) {
            if chi.is_trivial() || !chi.is_primitive() || !chi.is_even(&UnitLog::new(f)) {
                continue;
            }
            let a = eng.log_gamma_oracle(&chi).map_err(err)?;
            let b = eng.cyclotomic_sum(&chi).map_err(err)?;
            let d = a.sub(&b).abs_upper();
            ensure(d < pow10(20), || format!("{chi:?}: oracles differ by up to {}", d))?;
            n += 1;
        }
    }
    // independent 50-digit values of log((1+√5)/2) and log(2+√3)
    let spots = [
        ("5:quadratic", vec![5], "0.48121182505960344749775891342436842313518433438566"),
        ("12:quadratic", vec![2, 3], "1.3169578969248167086250463473079684440269819714675"),
    ];
    for (spec, primes, want) in spots {
        let chi = eulerkit::characters::DirichletChar::parse(spec).map_err(err)?;
        let mut places = vec![Place::Infinite];
        places.extend(primes.into_iter().map(Place::Finite));
        let v = eng.leading_term(&chi, &places).map_err(err)?.value;
        let d = (v.re.mid_rational() - dec(want)).abs() + v.re.rad_rational();
        ensure(d < pow10(30), || format!("{spec}: {} is not within 1e-30 of {want}", v.re.to_f64()))?;
        ensure(v.im.abs_upper() < pow10(30), || format!("{spec}: imaginary part not certified zero"))?;
    }
    within(t, 30)?;
    Ok(format!("{n} even characters agree within 1e-20; spot values within 1e-30"))
}

fn theta_reconstruction() -> Outcome {
    let t = Instant::now();
    let s = Settings { deterministic: true, ..Settings::default() };
    for m in [5, 7, 8, 9, 12, 13, 15, 16] {
        let c = commands::cmd_theta(m, &s).map_err(err)?;
        if let Some(f) = c.failures().next() {
            return Err(format!("m = {m}: {} fails: {}", f.name, f.witnesses[0]));
        };
    }
    within(t, 120)?;
    Ok("exponent 1/2 recovered for m = 5, 7, 8, 9, 12, 13, 15, 16".into())
}

/// dim X^χ counted from decomposition groups: places v ∈ Σ with χ trivial on
/// D_v, minus one for the trivial character.
fn dim_x_chi(chi: &eulerkit::characters::DirichletChar, places: &[Place]) -> eulerkit::Result<usize> {
    let (l, table) = character_field(chi)?;
    let fixed = places.iter().filter(|&&v| table.trivial_on(&l.decomposition_group(v))).count();
    Ok(fixed - chi.primitive().is_trivial() as usize)
}

fn order_formula() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let primes = eulerkit::arith::primes_up_to(60);
    let sets: Vec<Vec<Place>> = (0..50)
        .map(|_| {
            let mut s = vec![Place::Infinite];
            for _ in 0..rng.gen_range(0..=4) {
                s.push(Place::Finite(primes[rng.gen_range(0..primes.len())]));
            }
            s.sort();
            s.dedup();
            s
        })
        .collect();
    let mut n = 0;
    for f in 1..=40 {
        for chi in all_characters(f) {
            for s in &sets {
                let a = l_order(&chi, s).map_err(err)?;
                let b = dim_x_chi(&chi, s).map_err(err)?;
                let c = conductor_order(&chi) + vanishing_factors(&chi, s).len();
                let trivial_c = if chi.primitive().is_trivial() { s.len() - 1 } else { c };
                ensure(a == b && a == trivial_c, || format!("{chi:?} on {s:?}: l_order {a}, dim X^χ {b}, count {trivial_c}"))?;
                n += 1;
            }
        }
    }
    within(t, 30)?;
    Ok(format!("{n} (χ, Σ) pairs agree"))
}

fn bidual_equivalence() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut members, mut non_members, mut images) = (0, 0, 0);
    for i in 0..200 {
        let x = random_lattice(&mut rng);
        let b = Bidual::new(x.clone()).map_err(err)?;
        let r = random_degree(&mut rng, &x, 400);
        let w = random_wedge(&mut rng, &x, r);
        let fast = b.membership(&w).map_err(err)?;
        let slow = bidual_membership_oracle(&w, &x).map_err(err)?;
        ensure(fast.member == slow, || format!("instance {i}: dual-wedge test {} vs oracle {slow} on {}", fast.member, x.to_json()))?;
        if fast.member {
            members += 1;
        } else {
            non_members += 1;
        }
        for idx in subsets(x.rank(), r).into_iter().take(4) {
            let g = rng.gen_range(0..x.group().order());
            let (img, _) = b.xi_map(r, &[(BigInt::one(), g, idx)]).map_err(err)?;
            ensure(b.membership(&img).map_err(err)?.member, || format!("instance {i}: ξ image outside ∩^{r} X"))?;
            images += 1;
        }
    }
    let mut free = 0;
    for i in 0..60 {
        let x = random_free(&mut rng);
        for r in 0..=x.ambient() {
            let xi = xi_analysis(&x, r).map_err(|e| format!("free instance {i}, r = {r}: {e}"))?;
            let full = subsets(x.ambient(), r).len() * x.group().order();
            ensure(xi.cokernel.is_empty() && xi.rank == full, || format!("free instance {i}, r = {r}: rank {} of {full}, cokernel {:?}", xi.rank, xi.cokernel))?;
            free += 1;
        }
    }
    within(t, 120)?;
    Ok(format!("200 lattices ({members} members, {non_members} non-members), {images} ξ images, {free} free (X, r) bijective"))
}

fn circular_distributions() -> Outcome {
    let levels: Vec<u64> = (2..=100).collect();
    let phi = phi_distribution(&levels).map_err(err)?;
    let rep = circular_axiom_check(&phi, Exec::Parallel).map_err(err)?;
    ensure(rep.passed(), || format!("Φ fails at {:?}", rep.exceptional))?;
    let sys = cyclotomic_system(&dagger_levels(100)).map_err(err)?;
    let f = es_to_distribution(&sys, 100).map_err(err)?;
    for m in [2, 6, 10, 14, 30, 50, 98] {
        ensure(f.levels().contains(&m) && f.value(m, 1).ok() == phi.value(m, 1).ok(), || format!("es-iso value at m = {m}"))?;
    }
    let rf = circular_axiom_check(&f, Exec::Parallel).map_err(err)?;
    ensure(rf.passed(), || format!("es-iso distribution fails at {:?}", rf.exceptional))?;
    ensure(distribution_to_es(&f).map_err(err)?.to_json() == sys.to_json(), || "es-iso round trip".into())?;
    for p in [3, 5, 7] {
        let g = finite_order_distribution(p, &levels).map_err(err)?;
        ensure(has_order_two(&g), || format!("p = {p}: f² ≠ 1"))?;
        ensure(circular_axiom_check(&g, Exec::Parallel).map_err(err)?.passed(), || format!("p = {p}: axioms"))?;
    }
    Ok(format!("Φ: {} relations; es-iso through m = 100 incl. m = 2 and 2m'; f² = 1 for p = 3, 5, 7", rep.instances.len()))
}

fn kolyvagin_identities() -> Outcome {
    for n in 1..=50 {
        ensure(DerivativeOp::new(n).map_err(err)?.telescopes(), || format!("(σ−1)D ≠ n − N for n = {n}"))?;
    }
    let mut pairs = 0;
    let mut cache = DlogCache::new(None);
    for q in eulerkit::arith::primes_up_to(50) {
        for p in eulerkit::arith::prime_divisors(q - 1).into_iter().filter(|&p| p != 2) {
            let mut k = 0;
            while (q - 1) % p.pow(k + 1) == 0 {
                k += 1;
            }
            let pk = p.pow(k);
            let e = AbelianField::cyclotomic(p);
            let kp = CyclotomicField::new(p);
            let data = PrimeAboveData::new(&e, q).map_err(err)?;
            let field = data.prime().residue_field().clone();
            let g = field.primitive_element();
            let logs: Vec<u64> = (1..q)
                .map(|a| residue_log(&CycElt::from_int(&kp, a as i64), &data, p, k, &mut cache))
                .collect::<eulerkit::Result<_>>()
                .map_err(err)?;
            for a in 1..q {
                let naive = dlog_naive(&field, &g, &[a]).ok_or("naive dlog failed")? % pk;
                ensure(naive == logs[(a - 1) as usize], || format!("q = {q}, p = {p}: λ({a}) disagrees with the naive logarithm"))?;
                for b in 1..q {
                    let ab = (a * b) % q;
                    ensure(logs[(ab - 1) as usize] == (logs[(a - 1) as usize] + logs[(b - 1) as usize]) % pk, || format!("q = {q}, p = {p}: λ({a}·{b}) ≠ λ({a}) + λ({b})"))?;
                    pairs += 1;
                }
            }
        }
    }
    let e = AbelianField::cyclotomic(5);
    let k5 = CyclotomicField::new(5);
    let data = PrimeAboveData::with_theta(&e, 11, &[3]).map_err(err)?;
    let v = v_q(&CycElt::from_zeta_sum(&k5, &[(0, 3), (1, -1)]), &data).map_err(err)?;
    let stated = IntGroupRing::one(&Group::of_field(&e));
    ensure(v == stated, || format!("v_11(3 − ζ_5) = {} at the prime ζ_5 ↦ 3, expected 1·(id) = {}", v.to_json(), stated.to_json()))?;
    Ok(format!("telescoping n ≤ 50; {pairs} residue-log pairs; v_11 example"))
}

fn norm_coherence() -> Outcome {
    let one = constant_family(3, 3, |_, g| Ok(IntGroupRing::one(g))).map_err(err)?;
    let res = norm_coherence_check(3, &one, 3).map_err(err)?;
    ensure(res.iter().all(|c| c.passed), || "r_n = 1 rejected".into())?;
    let nrm = constant_family(3, 3, |_, g| Ok(IntGroupRing::norm_element(g))).map_err(err)?;
    let res = norm_coherence_check(3, &nrm, 3).map_err(err)?;
    ensure(res.iter().all(|c| !c.passed && !c.witnesses.is_empty()), || "N_{G_n} accepted".into())?;
    Ok("r_n = 1 passes, N_{G_n} fails at p = 3, depth 3".into())
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn read(rel: &str) -> Result<Value, String> {
    let text = std::fs::read_to_string(fixtures().join(rel)).map_err(|e| format!("{rel}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("{rel}: {e}"))
}

/// Runs a fixture command line through the command layer.
fn dispatch(args: &[&str], s: &Settings) -> Result<eulerkit::certificate::Certificate, String> {
    let opt = |k: &str| -> Result<&str, String> {
        args.iter().position(|a| *a == k).and_then(|i| args.get(i + 1).copied()).ok_or(format!("{args:?} lacks {k}"))
    };
    let num = |k: &str| -> Result<u64, String> { opt(k)?.parse().map_err(|_| format!("bad {k}")) };
    match args[0] {
        "dist-check" => commands::cmd_dist_check(&read(opt("--system")?)?, num("--max-conductor")?, s),
        "bidual" => commands::cmd_bidual(&read(opt("--lattice")?)?, num("--degree")? as usize, &read(opt("--element")?)?, s),
        "coleman" => commands::cmd_coleman(&read(opt("--dist")?)?, s),
        "normcoherent" => commands::cmd_normcoherent(num("--p")?, num("--depth")? as u32, &read(opt("--seq")?)?, s),
        "kolyvagin" => commands::cmd_kolyvagin(num("--q")?, num("--p")?, &read(opt("--input")?)?, s),
        other => return Err(format!("unknown verb {other}")),
    }
    .map_err(err)
}

fn negative_controls() -> Outcome {
    let cases = read("corruptions.json")?;
    let s = Settings { deterministic: true, ..Settings::default() };
    let mut n = 0;
    for case in cases.as_array().ok_or("manifest is not an array")? {
        let args: Vec<&str> = case["args"].as_array().unwrap().iter().filter_map(Value::as_str).collect();
        let verifier = case["verifier"].as_str().unwrap_or("?");
        let prefix = case["failing_check"].as_str().unwrap_or("");
        let cert = dispatch(&args, &s)?;
        let failed: Vec<_> = cert.failures().collect();
        ensure(failed.iter().any(|c| c.name.starts_with(prefix)), || format!("{verifier} accepted its corruption fixture"))?;
        ensure(failed.iter().all(|c| c.witnesses.iter().any(|w| !w.is_null())), || format!("{verifier}: failure without witness"))?;
        n += 1;
    }
    ensure(n > 0, || "no corruption fixtures".into())?;
    Ok(format!("{n}/{n} verifiers reject their corruption fixture"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("distribution relations, conductors ≤ 60", distribution_relations),
        ("L-value dual oracles, conductor ≤ 30", lvalue_oracles),
        ("Θ reconstruction", theta_reconstruction),
        ("order of vanishing formula", order_formula),
        ("bidual oracle equivalence", bidual_equivalence),
        ("circular distribution axioms", circular_distributions),
        ("Kolyvagin operator identities", kolyvagin_identities),
        ("norm coherence", norm_coherence),
        ("negative-control coverage", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("criterion {}: PASS  {name} ({msg}; {secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
