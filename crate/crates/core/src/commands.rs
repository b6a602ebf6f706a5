//! One function per CLI verb. Each parses its JSON inputs, runs the underlying
//! operations and collects the outcome in a [`Certificate`].

use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bidual::{bidual_membership_oracle, Bidual, GLattice, WedgeElt};
use crate::certificate::{ball_json, cball_json, Certificate, Check};
use crate::characters::{DirichletChar, UnitLog};
use crate::cyclo::CycElt;
use crate::error::{Error, Result};
use crate::euler::{
    circular_axiom_check, coleman_reduction_check, dagger_levels, distribution_suite, distribution_to_es, es_to_distribution,
    has_order_two, norm_coherence_check, s_unit_check, CircularDist, EulerSystemData, RFamily,
};
use crate::field::{AbelianField, Place};
use crate::finite_field::DlogCache;
use crate::group::Group;
use crate::group_ring::IntGroupRing;
use crate::kolyvagin::{
    cyclic_generator, hypotheses_check, orbit_sum_holds, residue_log, s_membership, v_q, DerivativeOp, PrimeAboveData,
};
use crate::lvalues::{conductor_order, l_order, theta_cyclotomic, LValue, LValueCache, LValueEngine, LValueRequest};
use crate::par::Exec;

/// Runtime settings shared by all commands.
#[derive(Clone, Debug)]
pub struct Settings {
    /// working precision for L-values and Θ, in bits
    pub precision: u32,
    /// trial-division budget when factoring norms
    pub factor_budget: u64,
    pub cache_dir: Option<PathBuf>,
    pub exec: Exec,
    /// omit wall time so repeated runs are byte-identical
    pub deterministic: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { precision: 128, factor_budget: 1 << 24, cache_dir: None, exec: Exec::Parallel, deterministic: false }
    }
}

pub const ORACLE_TOLERANCE: f64 = 1e-20;
pub const THETA_RESIDUAL_TOLERANCE: f64 = 1e-15;

fn finish(mut cert: Certificate, start: Instant, s: &Settings) -> Certificate {
    if !s.deterministic {
        cert.wall_time = Some(start.elapsed());
    }
    cert
}

fn sha256_json(v: &Value) -> String {
    let s = serde_json::to_string(v).expect("json");
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn pow10(k: i32) -> BigRational {
    let t = BigRational::from_integer(BigInt::from(10).pow(k.unsigned_abs()));
    if k < 0 {
        t.recip()
    } else {
        t
    }
}

/// {"a": c, ...} keyed by residues a mod m, as an element of ℤ[G_E].
pub fn group_ring_from_json(v: &Value, e: &AbelianField, g: &std::sync::Arc<Group>) -> Result<IntGroupRing> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("group ring element must be an object {residue: coefficient}".into()))?;
    let mut x = IntGroupRing::zero(g);
    for (k, c) in obj {
        let a: i64 = k.parse().map_err(|_| Error::Parse(format!("bad residue {k:?}")))?;
        let c = crate::cyclo::bigint_from_json(c)?;
        x = x.add(&IntGroupRing::monomial(g, e.index_of(a)?, c));
    }
    Ok(x)
}

fn field_from_json(v: &Value) -> Result<AbelianField> {
    let m = v["m"].as_u64().ok_or_else(|| Error::Parse("field lacks \"m\"".into()))?;
    let h: Vec<u64> = match v.get("H") {
        Some(h) => serde_json::from_value(h.clone()).map_err(|e| Error::Parse(format!("H: {e}")))?,
        None => vec![1 % m.max(1)],
    };
    AbelianField::new(m, &h)
}

/// verify_distribution over every nested pair with conductor ≤ `max_conductor`,
/// plus the S-unit condition on the stored values in that range.
pub fn cmd_dist_check(system: &Value, max_conductor: u64, s: &Settings) -> Result<Certificate> {
    let start = Instant::now();
    let sys = EulerSystemData::from_json(system)?;
    let mut cert = Certificate::new(
        "dist-check",
        json!({"system_sha256": sha256_json(&sys.to_json()), "entries": sys.len(), "flavor": sys.flavor.name(), "max_conductor": max_conductor}),
    )
    .anchor("euler-systems::verify_distribution");
    cert.truncation = json!({"max_conductor": max_conductor, "factor_budget": s.factor_budget});
    for c in distribution_suite(&sys, max_conductor, s.exec)? {
        cert.push(c);
    }
    let mut in_range = EulerSystemData::new(sys.flavor);
    for ent in sys.entries().filter(|e| e.field.modulus() <= max_conductor) {
        in_range.insert(&ent.field, ent.value.clone(), ent.exp_den)?;
    }
    for c in s_unit_check(&in_range, s.factor_budget)? {
        cert.push(c);
    }
    if !in_range.is_empty() {
        cert = cert.anchor("kolyvagin::v_q");
    }
    cert.value = json!({"checked": cert.checks.len(), "failed": cert.failures().count()});
    Ok(finish(cert, start, s))
}

/// Certified leading term of L_S(χ, s) at s = 0. For even nontrivial χ the two
/// independent formulas for L'(χ_0, 0) are compared as well.
pub fn cmd_lvalue(chi: &str, primes: &[u64], order: usize, s: &Settings) -> Result<Certificate> {
    let start = Instant::now();
    let chi = DirichletChar::parse(chi)?;
    let mut places = vec![Place::Infinite];
    places.extend(primes.iter().map(|&p| Place::Finite(p)));
    let req = LValueRequest::new(chi.clone(), &places, order, s.precision);
    let mut cert = Certificate::new("lvalue", req.canonical_json())
        .anchor("lvalues::leading_term")
        .anchor("lvalues::l_order");
    cert.precision = json!({"bits": s.precision, "oracle_tolerance": format!("{ORACLE_TOLERANCE:e}")});
    let mut engine = LValueEngine::new(s.precision)?;
    let mut cache = match &s.cache_dir {
        Some(d) => Some(LValueCache::open(d)?),
        None => None,
    };
    let cached = match &cache {
        Some(c) => c.get(&req)?,
        None => None,
    };
    let val = match cached {
        Some((ord, v)) => {
            let exact_zero = order < ord;
            LValue { leading_order: ord, value: v, exact_zero, reduced_confidence: chi.primitive().is_trivial() }
        }
        None => {
            let v = engine.evaluate(&req)?;
            if let Some(c) = cache.as_mut() {
                c.put(&req, &v)?;
            }
            v
        }
    };
    let expected = l_order(&chi, &places)?;
    let details = json!({"l_order": expected, "leading_order": val.leading_order});
    cert.push(if expected == val.leading_order {
        Check::pass("order of vanishing", details)
    } else {
        Check::fail("order of vanishing", details.clone(), details)
    });
    let chi0 = chi.primitive();
    if !chi0.is_trivial() && chi0.is_even(&UnitLog::new(chi0.modulus())) {
        cert = cert.anchor("lvalues::log_gamma_oracle").anchor("lvalues::cyclotomic_sum").oracle("log-gamma").oracle("cyclotomic-sum");
        let a = engine.log_gamma_oracle(&chi0)?;
        let b = engine.cyclotomic_sum(&chi0)?;
        let diff = a.sub(&b).abs_upper();
        let details = json!({"log_gamma": cball_json(&a), "cyclotomic_sum": cball_json(&b), "difference_bound": crate::ball::Ball::from_ratio(&diff, 64).to_f64()});
        cert.push(if diff < pow10(-20) {
            Check::pass("oracle agreement", details)
        } else {
            Check::fail("oracle agreement", details.clone(), details)
        });
    }
    cert.value = json!({
        "leading_order": val.leading_order,
        "requested_order": order,
        "exact_zero": val.exact_zero,
        "order_jump": val.leading_order - conductor_order(&chi),
        "value": cball_json(&val.value),
        "reduced_confidence": val.reduced_confidence,
    });
    Ok(finish(cert, start, s))
}

/// Θ(θ*) on ℚ(m)^+ against the unit (1−ζ_m)^{1+τ}; the expected image is
/// exponent ½ on the support of that unit.
pub fn cmd_theta(m: u64, s: &Settings) -> Result<Certificate> {
    let start = Instant::now();
    let mut engine = LValueEngine::new(s.precision)?;
    let rep = theta_cyclotomic(m, &mut engine)?;
    let mut cert = Certificate::new("theta", json!({"m": m}))
        .anchor("lvalues::theta_star")
        .anchor("lvalues::regulator")
        .anchor("lvalues::theta_map")
        .anchor("galois-algebra::e_field");
    cert.precision = json!({"bits": s.precision, "residual_tolerance": format!("{THETA_RESIDUAL_TOLERANCE:e}")});
    let x = &rep.result.exponents[0];
    let details = json!({"exponent": x.to_json(), "support": rep.support.to_json()});
    cert.push(if rep.recovers_half {
        Check::pass("exponent one half", details)
    } else {
        Check::fail("exponent one half", details.clone(), details)
    });
    let residual = &rep.result.residual;
    let rd = json!({"residual_bound": crate::ball::Ball::from_ratio(residual, 64).to_f64()});
    cert.push(if residual < &pow10(-15) {
        Check::pass("residual", rd)
    } else {
        Check::fail("residual", rd.clone(), rd)
    });
    cert.value = json!({
        "exponent": x.to_json(),
        "e_field": rep.result.e_field.to_json(),
        "orders": rep.theta.orders,
        "theta_components": rep.theta.components.iter().map(cball_json).collect::<Vec<_>>(),
        "regulator_entries": rep.regulator.entries.iter().map(|r| r.iter().map(ball_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    Ok(finish(cert, start, s))
}

/// Membership of a degree-r element in the exterior bidual ∩^r X, checked by the
/// dual-wedge test and by the contragredient oracle.
pub fn cmd_bidual(lattice: &Value, degree: usize, element: &Value, s: &Settings) -> Result<Certificate> {
    let start = Instant::now();
    let x = GLattice::from_json(lattice)?;
    let w = WedgeElt::from_json(element, &x)?;
    if w.degree != degree {
        return Err(Error::Precondition(format!("element has degree {} but --degree is {degree}", w.degree)));
    }
    let b = Bidual::new(x.clone())?;
    let mut cert = Certificate::new("bidual", json!({"lattice": x.to_json(), "degree": degree, "element": w.to_json()}))
        .anchor("bidual-lattice::dual_lattice")
        .anchor("bidual-lattice::bidual_membership")
        .oracle("contragredient-dual");
    let rep = b.membership(&w)?;
    cert.push(match &rep.witness {
        None => Check::pass("membership", json!({"checked": rep.checked, "is_zero": rep.is_zero})),
        Some(_) => Check::fail("membership", json!({"checked": rep.checked, "is_zero": rep.is_zero}), rep.to_json()["witness"].clone()),
    });
    let oracle = bidual_membership_oracle(&w, &x)?;
    let od = json!({"dual_wedge_test": rep.member, "oracle": oracle});
    cert.push(if oracle == rep.member { Check::pass("oracle agreement", od) } else { Check::fail("oracle agreement", od.clone(), od) });
    let xi = match b.xi_analysis(degree) {
        Ok(a) => {
            cert = cert.anchor("bidual-lattice::xi_map");
            a.to_json()
        }
        Err(Error::Budget(msg)) => json!({"skipped": msg}),
        Err(e) => return Err(e),
    };
    cert.value = json!({"member": rep.member, "dual_rank": b.dual.rank(), "xi": xi});
    Ok(finish(cert, start, s))
}

/// Circular-distribution axioms, the round trip through classical Euler
/// systems and, when the file carries a "coleman" block, the reduction
/// c^{t1(1+τ)} = (1−ζ_m)^{(1+τ)r_m}.
pub fn cmd_coleman(dist: &Value, s: &Settings) -> Result<Certificate> {
    let start = Instant::now();
    let f = CircularDist::from_json(dist)?;
    let levels: Vec<u64> = f.levels().into_iter().collect();
    let max = levels.last().copied().unwrap_or(0);
    let mut cert = Certificate::new("coleman", json!({"distribution_sha256": sha256_json(&f.to_json()), "levels": levels, "coleman": dist.get("coleman")}))
        .anchor("euler-systems::circular_axiom_check")
        .anchor("euler-systems::es_iso");
    let axioms = circular_axiom_check(&f, s.exec)?;
    for c in axioms.checks() {
        cert.push(c);
    }
    let sys = distribution_to_es(&f)?;
    let back = es_to_distribution(&sys, max)?;
    for &m in &levels {
        if !back.levels().contains(&m) {
            continue;
        }
        let (a, b) = (f.value(m, 1)?, back.value(m, 1)?);
        let name = format!("es-iso m={m}");
        cert.push(if a == b {
            Check::pass(name, json!({"m": m}))
        } else {
            Check::fail(name, json!({"m": m}), json!({"stored": a.to_json(), "rebuilt": b.to_json()}))
        });
    }
    if let Some(cb) = dist.get("coleman") {
        cert = cert.anchor("euler-systems::coleman_reduction_check");
        let terms: Vec<(i64, i64)> = serde_json::from_value(cb["r"].clone()).map_err(|e| Error::Parse(format!("coleman.r: {e}")))?;
        let t1 = cb.get("t1").and_then(Value::as_u64).unwrap_or(1) as u32;
        let t2 = cb.get("t2").and_then(Value::as_u64).unwrap_or(1);
        let dl: Vec<u64> = dagger_levels(max).into_iter().filter(|m| sys.contains_field(&AbelianField::cyclotomic(*m))).collect();
        let r = RFamily::from_terms(&terms, &dl)?;
        cert.truncation = json!({"cutoff": max});
        for c in coleman_reduction_check(&sys, &r, t1, t2, max, s.exec)? {
            cert.push(c);
        }
    }
    cert.value = json!({"axioms": axioms.passed(), "exceptional": axioms.exceptional, "order_two": has_order_two(&f)});
    Ok(finish(cert, start, s))
}

/// Exponent sequence file: either {"family": "one" | "norm" | "sigma:a"} or
/// {"r": [{residue: coeff}, ...]} with one entry per level n = 1..=depth.
pub fn parse_sequence(p: u64, depth: u32, v: &Value) -> Result<Vec<IntGroupRing>> {
    if let Some(fam) = v.get("family").and_then(Value::as_str) {
        return crate::euler::constant_family(p, depth, |e, g| match fam {
            "one" => Ok(IntGroupRing::one(g)),
            "norm" => Ok(IntGroupRing::norm_element(g)),
            _ => match fam.strip_prefix("sigma:").and_then(|a| a.parse::<i64>().ok()) {
                Some(a) => Ok(IntGroupRing::monomial(g, e.index_of(a)?, BigInt::from(1))),
                None => Err(Error::Parse(format!("unknown family {fam:?}"))),
            },
        });
    }
    let rs = v["r"].as_array().ok_or_else(|| Error::Parse("sequence needs \"family\" or \"r\"".into()))?;
    if rs.len() != depth as usize {
        return Err(Error::Parse(format!("\"r\" has {} entries, depth is {depth}", rs.len())));
    }
    rs.iter()
        .enumerate()
        .map(|(i, r)| {
            let e = AbelianField::cyclotomic(p.pow(i as u32 + 1));
            let g = Group::of_field(&e);
            group_ring_from_json(r, &e, &g).map_err(|err| Error::Parse(format!("r[{i}]: {err}")))
        })
        .collect()
}

/// Norm coherence of a_n = (1−ζ_{p^n})^{r_n} along ℚ(ζ_p) ⊂ … ⊂ ℚ(ζ_{p^N}).
pub fn cmd_normcoherent(p: u64, depth: u32, seq: &Value, s: &Settings) -> Result<Certificate> {
    let start = Instant::now();
    let rs = parse_sequence(p, depth, seq)?;
    let mut cert = Certificate::new(
        "normcoherent",
        json!({"p": p, "depth": depth, "r": rs.iter().map(IntGroupRing::to_json).collect::<Vec<_>>()}),
    )
    .anchor("euler-systems::norm_coherence_check");
    for c in norm_coherence_check(p, &rs, depth)? {
        cert.push(c);
    }
    cert.value = json!({"coherent": cert.passed()});
    Ok(finish(cert, start, s))
}

/// Valuation, residue-log, derivative and membership checks at a prime above q.
///
/// Input keys: "field" {"m","H"}, "element" (CycElt), optional "theta",
/// "expect_v_q" {residue: coeff}, "level", "units" [CycElt], "n",
/// "derivative" (bool), "hypotheses" {"F": {"m","H"}, "chi": spec}.
pub fn cmd_kolyvagin(q: u64, p: u64, input: &Value, s: &Settings) -> Result<Certificate> {
    let start = Instant::now();
    let e = field_from_json(&input["field"])?;
    let a = CycElt::from_json(&input["element"]).map_err(|err| Error::Parse(format!("element: {err}")))?;
    let data = match input.get("theta") {
        Some(t) => PrimeAboveData::with_theta(&e, q, &serde_json::from_value::<Vec<u64>>(t.clone())?)?,
        None => PrimeAboveData::new(&e, q)?,
    };
    let level = input.get("level").and_then(Value::as_u64).unwrap_or(1) as u32;
    let mut cert = Certificate::new("kolyvagin", json!({"q": q, "p": p, "input": input})).anchor("kolyvagin::v_q");
    cert.truncation = json!({"factor_budget": s.factor_budget});

    let v = v_q(&a, &data)?;
    let orbit = orbit_sum_holds(&a, &data, &v)?;
    let d = json!({"prime": data.to_json(), "v_q": v.to_json()});
    cert.push(if orbit { Check::pass("v_q orbit sum", d) } else { Check::fail("v_q orbit sum", d.clone(), d) });
    if let Some(x) = input.get("expect_v_q") {
        let want = group_ring_from_json(x, &e, data.group())?;
        let d = json!({"computed": v.to_json(), "expected": want.to_json()});
        cert.push(if want == v { Check::pass("v_q value", d) } else { Check::fail("v_q value", d.clone(), d) });
    }

    if let Some(units) = input.get("units").and_then(Value::as_array) {
        cert = cert.anchor("kolyvagin::residue_log");
        let us: Vec<CycElt> = units.iter().map(CycElt::from_json).collect::<Result<_>>()?;
        let mut cache = DlogCache::new(s.cache_dir.as_ref().map(|d| d.join("dlog")));
        let logs: Vec<u64> = us.iter().map(|u| residue_log(u, &data, p, level, &mut cache)).collect::<Result<_>>()?;
        let pk = p.pow(level);
        let mut bad = None;
        'outer: for i in 0..us.len() {
            for j in i..us.len() {
                let prod = residue_log(&us[i].mul(&us[j]), &data, p, level, &mut cache)?;
                if prod != (logs[i] + logs[j]) % pk {
                    bad = Some(json!({"i": i, "j": j, "log_product": prod, "sum": (logs[i] + logs[j]) % pk}));
                    break 'outer;
                }
            }
        }
        let d = json!({"logs": logs, "modulus": pk});
        cert.push(match bad {
            None => Check::pass("residue_log homomorphism", d),
            Some(w) => Check::fail("residue_log homomorphism", d, w),
        });
    }

    if input.get("derivative").and_then(Value::as_bool) == Some(true) {
        cert = cert.anchor("kolyvagin::derivative_op");
        let sigma = cyclic_generator(&e)?;
        let op = DerivativeOp::new(e.degree())?;
        let da = op.apply(&e, sigma, &a)?;
        let ok = op.telescopes() && op.verify_apply(&e, sigma, &a, &da)?;
        let d = json!({"n": e.degree(), "sigma": e.rep(sigma), "derivative": da.to_json()});
        cert.push(if ok { Check::pass("derivative telescopes", d) } else { Check::fail("derivative telescopes", d.clone(), d) });
    }

    if let Some(n) = input.get("n").and_then(Value::as_u64) {
        cert = cert.anchor("kolyvagin::s_membership");
        let rep = s_membership(&a, &e, n, p, level, s.factor_budget)?;
        let d = json!({"n": n, "level": level, "checked_primes": rep.checked_primes});
        cert.push(match &rep.witness {
            None => Check::pass("S membership", d),
            Some(w) => Check::fail("S membership", d, json!({"prime": w.prime, "valuation_mod_p^level": w.valuation})),
        });
    }

    if let Some(h) = input.get("hypotheses") {
        cert = cert.anchor("kolyvagin::hypotheses_check");
        let f = field_from_json(&h["F"])?;
        let chi = DirichletChar::parse(h["chi"].as_str().ok_or_else(|| Error::Parse("hypotheses lack \"chi\"".into()))?)?;
        let r = hypotheses_check(p, &f, &chi)?;
        let d = json!({"h1": r.h1, "h2": r.h2, "h3": r.h3, "h3_split": r.h3_split, "h4": r.h4, "h5": r.h5});
        cert.push(if r.all() { Check::pass("hypotheses", d) } else { Check::fail("hypotheses", d.clone(), d) });
    }

    cert.value = json!({"v_q": v.to_json(), "prime": data.to_json()});
    Ok(finish(cert, start, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::epsilon_system;

    fn det() -> Settings {
        Settings { deterministic: true, ..Settings::default() }
    }

    #[test]
    fn dist_check_empty_below_three() {
        let sys = epsilon_system(&[5, 8]).unwrap().to_json();
        let c = cmd_dist_check(&sys, 0, &det()).unwrap();
        assert!(c.checks.is_empty() && c.passed());
        assert!(c.to_json().get("wall_time_ms").is_none());
    }

    #[test]
    fn lvalue_spot() {
        let c = cmd_lvalue("5:quadratic", &[5], 1, &det()).unwrap();
        assert!(c.passed());
        assert_eq!(c.checks.len(), 2);
        assert!((c.value["value"]["re"]["approx"].as_f64().unwrap() - 0.481_211_825_059_603_4).abs() < 1e-15);
        let c = cmd_lvalue("5:quadratic", &[5, 11], 1, &det()).unwrap();
        assert_eq!(c.value["exact_zero"], true);
        assert_eq!(c.value["leading_order"], 2);
    }

    #[test]
    fn normcoherent_families() {
        assert!(cmd_normcoherent(3, 3, &json!({"family": "one"}), &det()).unwrap().passed());
        assert!(!cmd_normcoherent(3, 3, &json!({"family": "norm"}), &det()).unwrap().passed());
        let explicit = json!({"r": [{"1": 1}, {"1": 1}, {"1": 1}]});
        assert!(cmd_normcoherent(3, 3, &explicit, &det()).unwrap().passed());
        assert!(cmd_normcoherent(3, 3, &json!({"r": [{"1": 1}]}), &det()).is_err());
    }

    #[test]
    fn kolyvagin_valuation() {
        let input = json!({
            "field": {"m": 5},
            "theta": [3],
            "element": {"m": 5, "num": [3, -1, 0, 0]},
            "expect_v_q": {"1": 2},
        });
        let c = cmd_kolyvagin(11, 5, &input, &det()).unwrap();
        assert!(c.passed(), "{}", c.to_canonical_string());
    }
}
