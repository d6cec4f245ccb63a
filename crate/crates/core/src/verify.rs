//! Parameterised identity checks. Each check computes two sides
//! independently and reports pass iff they agree.

use crate::ering::{
    divisibility_witness, factorization_witness, localize, oracle_ideal, quotient, transfer_ideal,
    transfer_unit, EAlgebra, EulerSet, Field, IdealLattice,
};
use crate::error::{Error, Result};
use crate::fgl::{honda_law, honda_multiple_from_log, Series, Truncation};
use crate::groups::{
    count_level_points, dual_hom, family_of, hom_set, image_subgroup, level_points,
    monotypicity_check, sub_points, AbelianPGroup, Element, LatticeMap,
    QZHom, Subgroup, SubgroupFamily, SummandTable,
};
use crate::loopspace::{build_loop_ring, loop_transfer_ideal, CharacterModel};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped { reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
}

impl Params {
    fn group(a: &AbelianPGroup) -> Self {
        Params { p: Some(a.p()), group: Some(group_spec(a)), ..Default::default() }
    }

    fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    fn with_h(mut self, h: usize) -> Self {
        self.h = Some(h);
        self
    }

    fn with_f(mut self, f: &LatticeMap) -> Self {
        self.f = Some(f.encode());
        self
    }

    fn with_mode(mut self, mode: &str) -> Self {
        self.mode = Some(mode.into());
        self
    }
}

/// The group spec string accepted by [`AbelianPGroup::parse`], e.g. `4,2`.
pub fn group_spec(a: &AbelianPGroup) -> String {
    if a.is_trivial() {
        return "1".into();
    }
    a.moduli().iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub params: Params,
    pub status: Status,
    pub lhs: Value,
    pub rhs: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckReport {
    /// Pass iff `lhs == rhs`.
    pub fn compare(name: &str, params: Params, lhs: Value, rhs: Value, witness: Option<Value>) -> Self {
        let status = if lhs == rhs { Status::Pass } else { Status::Fail };
        CheckReport { name: name.into(), params, status, lhs, rhs, witness }
    }

    pub fn skipped(name: &str, params: Params, reason: &str) -> Self {
        CheckReport {
            name: name.into(),
            params,
            status: Status::Skipped { reason: reason.into() },
            lhs: Value::Null,
            rhs: Value::Null,
            witness: None,
        }
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    fn status_label(&self) -> String {
        match &self.status {
            Status::Pass => "pass".into(),
            Status::Fail => "FAIL".into(),
            Status::Skipped { reason } => format!("skipped ({reason})"),
        }
    }

    fn params_label(&self) -> String {
        let v = serde_json::to_value(&self.params).expect("params serialise");
        let mut parts = Vec::new();
        if let Value::Object(m) = v {
            for (k, x) in m {
                let shown = match x {
                    Value::String(s) => s,
                    other => other.to_string(),
                };
                parts.push(format!("{k}={shown}"));
            }
        }
        parts.join(" ")
    }
}

fn compact(v: &Value) -> String {
    let s = v.to_string();
    if s.len() > 160 {
        format!("{}...", &s[..157])
    } else {
        s
    }
}

pub fn reports_to_markdown(reports: &[CheckReport]) -> String {
    let mut out = String::from("| check | parameters | status | lhs | rhs |\n|---|---|---|---|---|\n");
    for r in reports {
        let _ = writeln!(
            out,
            "| {} | {} | {} | `{}` | `{}` |",
            r.name,
            r.params_label(),
            r.status_label(),
            compact(&r.lhs),
            compact(&r.rhs)
        );
    }
    let passed = reports.iter().filter(|r| r.is_pass()).count();
    let failed = reports.iter().filter(|r| r.is_fail()).count();
    let _ = writeln!(out, "\n{passed} passed, {failed} failed, {} skipped", reports.len() - passed - failed);
    out
}

pub fn reports_to_csv(reports: &[CheckReport]) -> String {
    let esc = |s: String| format!("\"{}\"", s.replace('"', "\"\""));
    let mut out = String::from("check,parameters,status,lhs,rhs\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.name,
            esc(r.params_label()),
            esc(r.status_label()),
            esc(r.lhs.to_string()),
            esc(r.rhs.to_string())
        );
    }
    out
}

/// All groups of order at most `max_order`, by order and then by partition.
pub fn groups_up_to(p: u64, max_order: u64) -> Vec<AbelianPGroup> {
    fn partitions(total: u32, largest: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if total == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=largest.min(total)).rev() {
            prefix.push(part);
            partitions(total - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    let mut e = 0u32;
    while (p as u128).pow(e) <= max_order as u128 {
        let mut parts = Vec::new();
        partitions(e, e, &mut Vec::new(), &mut parts);
        for exps in parts {
            out.push(AbelianPGroup::new(p, &exps).expect("valid partition"));
        }
        e += 1;
    }
    out
}

/// `f: Z_p^h -> A` sending the generators to those of `s`.
fn map_onto(s: &Subgroup) -> LatticeMap {
    LatticeMap::new(s.ambient().clone(), s.generators()).expect("generators lie in A")
}

fn sorted_strings(r: &EAlgebra, xs: &[crate::ering::RingElement]) -> Vec<String> {
    let mut v: Vec<String> = xs.iter().map(|x| r.display(x)).collect();
    v.sort();
    v
}

/// The worked example at `p = 2`, `A = Z/2 + Z/2`.
pub fn check_f2_example() -> Result<CheckReport> {
    let a = AbelianPGroup::new(2, &[1, 1])?;
    let r = EAlgebra::integer(&a)?;
    let family = SubgroupFamily::all_proper(&a);
    let units = family
        .maximal_members()
        .iter()
        .map(|h| transfer_unit(&r, h))
        .collect::<Result<Vec<_>>>()?;
    let ideal = transfer_ideal(&r, &family)?;
    let q = quotient(&r, &ideal);
    let small = IdealLattice::generated(&r, &[r.constant(2), r.var(0), r.var(1)]);
    let injections = count_level_points(&a, 1, 0, None, 1 << 10)?;
    let order = num_traits::pow(BigInt::from(2), q.torsion_log_order() as usize);
    let lhs = json!({
        "generators": sorted_strings(&r, &units),
        "ideal_equals_2_x_y": ideal.same_ideal(&small),
        "invariant_factors": q.invariant_factors().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "quotient_order": if q.free_rank == 0 { order.to_string() } else { "infinite".into() },
        "torsion_free_rank": q.free_rank,
    });
    let rhs = json!({
        "generators": ["x + 2", "x*y + x + y + 2", "y + 2"],
        "ideal_equals_2_x_y": true,
        "invariant_factors": ["2"],
        "quotient_order": "2",
        "torsion_free_rank": injections,
    });
    Ok(CheckReport::compare("f2", Params::group(&a).with_n(1).with_mode("exact1"), lhs, rhs, None))
}

/// Cyclic groups: `I_{F_f} = (<p^k>(x))` for every non-surjective `f`, and the
/// quotient is free of rank equal to the number of injections `Z/p^k -> Q_p/Z_p`.
pub fn check_cyclic(p: u64, k: u32) -> Result<CheckReport> {
    let a = AbelianPGroup::cyclic(p, k)?;
    let r = EAlgebra::integer(&a)?;
    let angle = r.from_series(&r.fgl().angle_series(k)?)?;
    let expected = IdealLattice::generated(&r, &[angle]);
    let mut all_equal = true;
    let mut witness = None;
    let mut ranks = BTreeSet::new();
    let mut torsion_free = true;
    for f in hom_set(&a, 1) {
        if f.is_surjective() {
            continue;
        }
        let ideal = transfer_ideal(&r, &family_of(&f))?;
        if !ideal.same_ideal(&expected) && witness.is_none() {
            all_equal = false;
            witness = Some(json!({ "f": f.encode() }));
        }
        let q = quotient(&r, &ideal);
        ranks.insert(q.free_rank);
        torsion_free &= q.torsion_exponents.is_empty();
    }
    let injections = count_level_points(&a, 1, 0, None, 1 << 20)?;
    let closed_form = p.pow(k - 1) * (p - 1);
    let lhs = json!({ "ideal_is_angle_series": all_equal, "free_ranks": ranks, "torsion_free": torsion_free, "closed_form": closed_form });
    let rhs = json!({ "ideal_is_angle_series": true, "free_ranks": [injections], "torsion_free": true, "closed_form": injections });
    Ok(CheckReport::compare("cyclic", Params::group(&a).with_n(1).with_h(1), lhs, rhs, witness))
}

/// One row of the fiber table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberRow {
    pub f: Vec<Vec<u64>>,
    pub family: Vec<String>,
    pub generators: Vec<String>,
    pub rank: usize,
    pub invariant_factors: Vec<String>,
    pub level_count: u64,
    pub matches: bool,
}

/// Per-`f` rank of `(E^0(BA)/I_{F_f})^tors` at height one against the
/// constrained level count.
pub fn fiber_rows(r: &EAlgebra, h: usize, budget: u128) -> Result<Vec<FiberRow>> {
    let a = r.group();
    let l = build_loop_ring(r, h, budget)?;
    let li = loop_transfer_ideal(&l)?;
    li.factors
        .par_iter()
        .map(|x| {
            let count = count_level_points(a, r.height() as usize, h, Some(&dual_hom(&x.f)), budget)?;
            let rank = x.quotient.free_rank;
            Ok(FiberRow {
                f: x.f.encode(),
                family: x.family.maximal_members().iter().map(|m| m.to_string()).collect(),
                generators: x.ideal.generators().iter().map(|g| r.display(g)).collect(),
                rank,
                invariant_factors: x.quotient.invariant_factors().iter().map(|v| v.to_string()).collect(),
                level_count: count,
                matches: rank as u64 == count,
            })
        })
        .collect()
}

pub fn check_fiber_rank(a: &AbelianPGroup, h: usize, budget: u128) -> Result<CheckReport> {
    let r = EAlgebra::integer(a)?;
    let rows = fiber_rows(&r, h, budget)?;
    let total_count = count_level_points(a, 1, h, None, budget)?;
    let ranks: Vec<usize> = rows.iter().map(|x| x.rank).collect();
    let counts: Vec<u64> = rows.iter().map(|x| x.level_count).collect();
    let witness = rows.iter().find(|x| !x.matches).map(|x| json!({ "f": x.f, "rank": x.rank, "level_count": x.level_count }));
    let lhs = json!({ "per_f": ranks, "total": ranks.iter().sum::<usize>() });
    let rhs = json!({ "per_f": counts, "total": total_count });
    Ok(CheckReport::compare("fiber-rank", Params::group(a).with_n(1).with_h(h).with_mode("exact1"), lhs, rhs, witness))
}

/// Surviving pairs of the character model against injective duals, matched
/// one by one, in total and over each `f`.
pub fn check_bijection(a: &AbelianPGroup, n: usize, h: usize, budget: u128) -> Result<CheckReport> {
    let model = CharacterModel::new(a, n, h, budget)?;
    let b = model.bijection(budget)?;
    let support = model.quotient_support();
    let jointly_surjective = (0..model.len()).filter(|&i| model.pair(i).is_surjective()).count();
    let mut fibers: BTreeMap<Vec<Element>, u64> = BTreeMap::new();
    for &i in &support {
        *fibers.entry(model.loop_part(i).to_vec()).or_default() += 1;
    }
    let mut fiber_lhs = Vec::new();
    let mut fiber_rhs = Vec::new();
    for f in hom_set(a, h) {
        fiber_lhs.push(fibers.get(f.images()).copied().unwrap_or(0));
        fiber_rhs.push(count_level_points(a, n, h, Some(&dual_hom(&f)), budget)?);
    }
    let total = count_level_points(a, n, h, None, budget)?;
    let witness = b
        .unmatched_pairs
        .first()
        .map(|x| json!({ "unmatched_pair": x.encode() }))
        .or_else(|| b.unmatched_points.first().map(|x| json!({ "unmatched_point": x.to_string() })));
    let lhs = json!({
        "matched": b.matched.len(),
        "unmatched": b.unmatched_pairs.len() + b.unmatched_points.len(),
        "support": support.len(),
        "fibers": fiber_lhs,
    });
    let rhs = json!({ "matched": total, "unmatched": 0, "support": jointly_surjective, "fibers": fiber_rhs });
    Ok(CheckReport::compare("bijection", Params::group(a).with_n(n).with_h(h), lhs, rhs, witness))
}

/// The split `A = M + K` with `K ⊆ S` a largest summand, found as the dual of
/// the least summand of `A*` containing `S^⊥`.
pub fn dual_split(s: &Subgroup, table: &SummandTable) -> (Subgroup, Subgroup) {
    let (m_dual, k_dual) = table.split(&s.annihilator());
    (k_dual.annihilator(), m_dual.annihilator())
}

/// Decomposition of the quotient over a split satisfying `K ⊆ im f` and
/// `im f ∩ M ⊆ pM`.
pub fn check_fdecomp(image: &Subgroup, table: &SummandTable) -> Result<CheckReport> {
    let a = image.ambient();
    let f = map_onto(image);
    let params = Params::group(a).with_n(1).with_f(&f).with_mode("exact1");
    let (m, k) = dual_split(image, table);
    let is_split = m.intersection(&k).order() == 1 && m.order() * k.order() == a.order();
    let hypotheses = image.contains_subgroup(&k) && m.p_power_multiple(1).contains_subgroup(&image.intersection(&m));
    if !is_split || !hypotheses {
        return Ok(CheckReport::skipped("fdecomp", params, "hypothesis"));
    }
    let r = EAlgebra::integer(a)?;
    let lhs_q = quotient(&r, &transfer_ideal(&r, &family_of(&f))?);
    let mg = m.isomorphism_type();
    let rm = EAlgebra::integer(&mg)?;
    let rhs_q = quotient(&rm, &transfer_ideal(&rm, &SubgroupFamily::all_proper(&mg))?);
    let mut repeated = Vec::new();
    for _ in 0..k.order() {
        repeated.extend(rhs_q.invariant_multiset());
    }
    repeated.sort_unstable();
    let witness = json!({ "M": group_spec(&mg), "K": group_spec(&k.isomorphism_type()) });
    Ok(CheckReport::compare(
        "fdecomp",
        params,
        json!({ "multiset": lhs_q.invariant_multiset() }),
        json!({ "multiset": repeated }),
        Some(witness),
    ))
}

/// Rational dimension of the quotient against the localization at `S_f`,
/// together with the factorization witness. Gated on `M/pM` having rank at
/// most one for the dual split.
pub fn check_localization(image: &Subgroup, table: &SummandTable) -> Result<CheckReport> {
    let a = image.ambient();
    let f = map_onto(image);
    let params = Params::group(a).with_n(1).with_f(&f).with_mode("exact1");
    let (m, _) = dual_split(image, table);
    if m.isomorphism_type().rank() > 1 {
        return Ok(CheckReport::skipped("localize", params, "hypothesis"));
    }
    let r = EAlgebra::integer(a)?;
    let family = family_of(&f);
    let q = quotient(&r, &transfer_ideal(&r, &family)?);
    let s = EulerSet::of_family(&r, &family);
    let loc = localize(&r, &s, Field::Rationals)?;
    let bad = factorization_witness(&r, &family)?;
    let witness = bad.map(|i| json!({ "generator": family.maximal_members()[i].to_string() }));
    Ok(CheckReport::compare(
        "localize",
        params,
        json!({ "rational_dimension": q.free_rank, "factorization": bad.is_none() }),
        json!({ "rational_dimension": loc.dimension(), "factorization": true }),
        witness,
    ))
}

/// `S_Z^{-1} E^0(BZ) = 0` for `Z = (Z/p)^2` at height one.
pub fn check_vandermonde(p: u64) -> Result<CheckReport> {
    let z = AbelianPGroup::new(p, &[1, 1])?;
    let r = EAlgebra::integer(&z)?;
    let loc = localize(&r, &EulerSet::all(&r), Field::Rationals)?;
    Ok(CheckReport::compare(
        "vandermonde",
        Params::group(&z).with_n(1),
        json!({ "dimension": loc.dimension() }),
        json!({ "dimension": 0 }),
        None,
    ))
}

/// Inverting `S_A` is the same as inverting the order-p characters, and each
/// `e(χ)` divides `[p^j](e(χ))`.
pub fn check_unit_criterion(a: &AbelianPGroup) -> Result<CheckReport> {
    let r = EAlgebra::integer(a)?;
    let all = EulerSet::all(&r);
    let small = EulerSet::order_p(&r);
    let l_all = localize(&r, &all, Field::Rationals)?;
    let l_small = localize(&r, &small, Field::Rationals)?;
    let bad = divisibility_witness(&r, &all);
    Ok(CheckReport::compare(
        "unit-criterion",
        Params::group(a).with_n(1),
        json!({ "dimension": l_all.dimension(), "divides": bad.is_none() }),
        json!({ "dimension": l_small.dimension(), "divides": true }),
        bad.map(|c| json!({ "character": c.to_string() })),
    ))
}

/// Unit, symmetry and associativity of the Honda law to degree `d`, and
/// `[p^k](x) = x^{p^{kn}}` by two routes.
pub fn check_honda(p: u64, n: u32, d: u32) -> Result<CheckReport> {
    let fgl = honda_law(p, n, d)?;
    let t = Truncation::degree(d);
    let law = fgl.law();
    let m = Some(p);
    let x1 = Series::var(1, m, 0);
    let zero1 = Series::zero(1, m);
    let unit = fgl.formal_sum(&x1, &zero1, &t)? == x1 && fgl.formal_sum(&zero1, &x1, &t)? == x1;
    let symmetric = law.terms().iter().all(|(e, c)| &law.coefficient(&[e[1], e[0]]) == c);
    let (x, y, z) = (Series::var(3, m, 0), Series::var(3, m, 1), Series::var(3, m, 2));
    let xy = law.compose(&[x.clone(), y.clone()], &t);
    let yz = law.compose(&[y, z.clone()], &t);
    let associative = law.compose(&[xy, z], &t) == law.compose(&[x, yz], &t);
    let mut k = 1u32;
    let mut p_series = Vec::new();
    while (p as u128).pow(k * n) <= d as u128 {
        let q = p.pow(k);
        let expected = Series::monomial(1, m, vec![(p as u32).pow(k * n)], BigInt::from(1));
        let by_law = fgl.multiple(q).truncate(&t);
        let by_log = honda_multiple_from_log(p, n, q as i64, d)?;
        p_series.push(json!({ "k": k, "double_and_add": by_law == expected, "logarithm": by_log == expected }));
        k += 1;
    }
    let expected_series: Vec<Value> = p_series
        .iter()
        .map(|v| json!({ "k": v["k"], "double_and_add": true, "logarithm": true }))
        .collect();
    let params = Params { p: Some(p), n: Some(n as usize), mode: Some("fiber".into()), ..Default::default() };
    Ok(CheckReport::compare(
        "honda",
        params,
        json!({ "unit": unit, "commutative": symmetric, "associative": associative, "p_series": p_series }),
        json!({ "unit": true, "commutative": true, "associative": true, "p_series": expected_series }),
        Some(json!({ "truncation": d, "law": fgl.table_json() })),
    ))
}

/// On the fiber with `f` surjective (so `I = 0`): the quotient has dimension
/// `|A|^n`, which is also the number of level points over the injective `f*`.
pub fn check_fiber_dim(a: &AbelianPGroup, n: u32, trunc: Option<u32>, budget: u128) -> Result<CheckReport> {
    let r = EAlgebra::fiber(a, n, trunc)?;
    let h = a.rank().max(1);
    let params = Params::group(a).with_n(n as usize).with_h(h).with_mode("fiber");
    let expected = (a.order() as u128).pow(n);
    // [p](x_1) = x_1^{p^n}, which is zero when x_1 has order p
    let p_series_ok = a.is_trivial() || {
        let pk = r.multiple(&r.var(0), a.p());
        let mut e = vec![0u32; r.num_vars()];
        e[0] = (a.p() as u32).pow(n);
        if e[0] < r.bounds()[0] {
            pk == r.monomial(&e)
        } else {
            pk.is_zero()
        }
    };
    let mut dims = BTreeSet::new();
    let mut counts = BTreeSet::new();
    for f in hom_set(a, h).into_iter().filter(LatticeMap::is_surjective) {
        let ideal = transfer_ideal(&r, &family_of(&f))?;
        dims.insert(quotient(&r, &ideal).free_rank as u128);
        counts.insert(count_level_points(a, n as usize, h, Some(&dual_hom(&f)), budget)? as u128);
    }
    Ok(CheckReport::compare(
        "fiber-dim",
        params,
        json!({ "dimension": dims, "p_series_monomial": p_series_ok }),
        json!({ "dimension": [expected], "p_series_monomial": true }),
        Some(json!({ "level_counts": counts })),
    ))
}

/// Transfer ideals from every maximal subgroup agree with the induction oracle.
pub fn check_oracle(a: &AbelianPGroup) -> Result<CheckReport> {
    let r = EAlgebra::integer(a)?;
    let maximal = SubgroupFamily::all_proper(a);
    let mut agree = 0usize;
    let mut witness = None;
    for h in maximal.maximal_members() {
        let t = transfer_ideal(&r, &SubgroupFamily::new(a, vec![h.clone()])?)?;
        if t.same_ideal(&oracle_ideal(&r, h)?) {
            agree += 1;
        } else if witness.is_none() {
            witness = Some(json!({ "subgroup": h.to_string() }));
        }
    }
    Ok(CheckReport::compare(
        "oracle",
        Params::group(a).with_n(1).with_mode("exact1"),
        json!({ "agreeing": agree }),
        json!({ "agreeing": maximal.maximal_members().len() }),
        witness,
    ))
}

/// `im f*` as a subgroup of `(Z/p^e)^h`, `e` the exponent of `A`.
pub fn dual_image(g: &QZHom) -> Result<Subgroup> {
    let a = g.source();
    let e = a.exponent().max(1);
    let ambient = AbelianPGroup::homocyclic(a.p(), e, g.target_rank())?;
    let gens: Vec<Element> = g
        .images()
        .iter()
        .map(|v| ambient.element(&v.entries().iter().map(|q| q.numerator_over(e, a.p()) as i64).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    Ok(Subgroup::generated_by(&ambient, &gens))
}

/// Point-level checks per `f`: restriction to `ker f*` is injective on the
/// first `n` coordinates, `im` lands in the constrained subgroup points, and
/// the translation action is monotypical.
pub fn check_square(a: &AbelianPGroup, n: usize, h: usize, budget: u128) -> Result<CheckReport> {
    let big = a.log_order();
    let maps = hom_set(a, h);
    let required: BTreeSet<Subgroup> =
        maps.iter().map(|f| dual_image(&dual_hom(f))).collect::<Result<_>>()?;
    let required: Vec<Subgroup> = required.into_iter().collect();
    let targets_by_image: BTreeMap<Subgroup, BTreeSet<Subgroup>> = required
        .par_iter()
        .map(|s| Ok((s.clone(), sub_points(n, h, big, s, budget)?.points.into_iter().collect())))
        .collect::<Result<_>>()?;
    let rows: Vec<(usize, usize, usize, bool, usize, usize)> = maps
        .par_iter()
        .map(|f| {
            let fd = dual_hom(f);
            let points = level_points(a, n, h, Some(&fd), budget)?;
            let kernel = fd.kernel().elements();
            let targets = &targets_by_image[&dual_image(&fd)?];
            let mut injective = 0;
            let mut landed = 0;
            let mut images = BTreeSet::new();
            for l in &points.points {
                if kernel.iter().all(|x| x.is_zero() || !l.apply(x).entries()[..n].iter().all(|q| q.is_zero())) {
                    injective += 1;
                }
                let im = image_subgroup(l)?;
                if targets.contains(&im) {
                    landed += 1;
                }
                images.insert(im);
            }
            let mono = monotypicity_check(f).monotypical;
            Ok((points.points.len(), injective, landed, mono, images.len(), targets.len()))
        })
        .collect::<Result<_>>()?;
    let total: usize = rows.iter().map(|r| r.0).sum();
    let injective: usize = rows.iter().map(|r| r.1).sum();
    let landed: usize = rows.iter().map(|r| r.2).sum();
    let mono = rows.iter().filter(|r| r.3).count();
    let distinct: usize = rows.iter().map(|r| r.4).sum();
    let sub_counts: Vec<usize> = rows.iter().map(|r| r.5).collect();
    Ok(CheckReport::compare(
        "square",
        Params::group(a).with_n(n).with_h(h),
        json!({ "restriction_injective": injective, "image_in_sub_points": landed, "monotypical": mono }),
        json!({ "restriction_injective": total, "image_in_sub_points": total, "monotypical": maps.len() }),
        Some(json!({ "distinct_images_total": distinct, "sub_point_counts": sub_counts })),
    ))
}

/// Parameters shared by the named checks.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub p: Option<u64>,
    pub n: Option<usize>,
    pub h: Option<usize>,
    pub group: Option<AbelianPGroup>,
    pub max_order: u64,
    pub trunc: Option<u32>,
    pub budget: u128,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { p: None, n: None, h: None, group: None, max_order: 64, trunc: None, budget: crate::DEFAULT_BUDGET }
    }
}

pub const CHECK_NAMES: &[&str] = &[
    "f2", "cyclic", "fiber-rank", "bijection", "fdecomp", "localize", "vandermonde", "unit-criterion", "honda",
    "fiber-dim", "oracle", "square",
];

impl CheckConfig {
    fn primes(&self) -> Vec<u64> {
        match (self.p, &self.group) {
            (_, Some(g)) => vec![g.p()],
            (Some(p), None) => vec![p],
            (None, None) => vec![2, 3],
        }
    }

    fn groups(&self, cap: u64) -> Vec<AbelianPGroup> {
        match &self.group {
            Some(g) => vec![g.clone()],
            None => self.primes().into_iter().flat_map(|p| groups_up_to(p, self.max_order.min(cap))).collect(),
        }
    }

    fn loops(&self, default: &[usize]) -> Vec<usize> {
        self.h.map_or_else(|| default.to_vec(), |h| vec![h])
    }
}

/// Turns a budget refusal inside a sweep into a skipped report.
fn sweep_item(name: &str, params: Params, single: bool, r: Result<CheckReport>) -> Result<CheckReport> {
    match r {
        Err(Error::BudgetExceeded { .. }) if !single => Ok(CheckReport::skipped(name, params, "budget")),
        other => other,
    }
}

/// Runs a named check, sweeping the default parameter range unless a group is
/// given.
pub fn run_check(name: &str, cfg: &CheckConfig) -> Result<Vec<CheckReport>> {
    let single = cfg.group.is_some();
    let budget = cfg.budget;
    let reports: Vec<CheckReport> = match name {
        "f2" => vec![check_f2_example()?],
        "cyclic" => {
            let mut out = Vec::new();
            for a in cfg.groups(u64::MAX) {
                if a.rank() == 1 && (single || a.order() <= a.p().pow(3)) {
                    out.push(check_cyclic(a.p(), a.exponents()[0])?);
                }
            }
            out
        }
        "fiber-rank" => {
            let jobs: Vec<(AbelianPGroup, usize)> = cfg
                .groups(64)
                .into_iter()
                .flat_map(|a| cfg.loops(&[1, 2]).into_iter().map(move |h| (a.clone(), h)))
                .collect();
            jobs.par_iter()
                .map(|(a, h)| {
                    let params = Params::group(a).with_n(1).with_h(*h).with_mode("exact1");
                    sweep_item("fiber-rank", params, single, check_fiber_rank(a, *h, budget))
                })
                .collect::<Result<_>>()?
        }
        "bijection" => {
            let mut jobs = Vec::new();
            for a in cfg.groups(16) {
                let ns: Vec<usize> = cfg.n.map_or_else(|| (0..=3).collect(), |n| vec![n]);
                for n in ns {
                    for h in cfg.loops(&(0..=3usize.saturating_sub(n)).collect::<Vec<_>>()) {
                        jobs.push((a.clone(), n, h));
                    }
                }
            }
            jobs.par_iter()
                .map(|(a, n, h)| {
                    let params = Params::group(a).with_n(*n).with_h(*h);
                    sweep_item("bijection", params, single, check_bijection(a, *n, *h, budget))
                })
                .collect::<Result<_>>()?
        }
        "fdecomp" | "localize" => {
            let cap = if name == "fdecomp" { 64 } else { 32 };
            let mut out = Vec::new();
            for a in cfg.groups(cap) {
                let table = SummandTable::new(&a, budget)?;
                let batch: Vec<CheckReport> = table
                    .subgroups()
                    .par_iter()
                    .map(|s| if name == "fdecomp" { check_fdecomp(s, &table) } else { check_localization(s, &table) })
                    .collect::<Result<_>>()?;
                out.extend(batch);
            }
            out
        }
        "vandermonde" => cfg.primes().into_iter().map(check_vandermonde).collect::<Result<_>>()?,
        "unit-criterion" => cfg.groups(32).iter().map(check_unit_criterion).collect::<Result<_>>()?,
        "honda" => {
            let cases: Vec<(u64, u32)> = match (cfg.p, cfg.n) {
                (Some(p), Some(n)) => vec![(p, n as u32)],
                _ => vec![(2, 1), (2, 2), (3, 2)],
            };
            cases
                .into_iter()
                .map(|(p, n)| check_honda(p, n, cfg.trunc.unwrap_or_else(|| default_honda_degree(p, n))))
                .collect::<Result<_>>()?
        }
        "fiber-dim" => {
            let mut out = Vec::new();
            let ns: Vec<u32> = cfg.n.map_or_else(|| vec![1, 2], |n| vec![n as u32]);
            for a in cfg.groups(16) {
                for &n in &ns {
                    if !single && (a.order() as u128).pow(n) > 16 {
                        continue;
                    }
                    out.push(check_fiber_dim(&a, n, cfg.trunc, budget)?);
                }
            }
            out
        }
        "oracle" => cfg.groups(16).par_iter().map(check_oracle).collect::<Result<_>>()?,
        "square" => {
            let mut jobs = Vec::new();
            for a in cfg.groups(32) {
                for h in cfg.loops(&[1, 2]) {
                    jobs.push((a.clone(), cfg.n.unwrap_or(1), h));
                }
            }
            jobs.iter()
                .map(|(a, n, h)| {
                    let params = Params::group(a).with_n(*n).with_h(*h);
                    sweep_item("square", params, single, check_square(a, *n, *h, budget))
                })
                .collect::<Result<_>>()?
        }
        "all" => {
            let mut out = Vec::new();
            for name in CHECK_NAMES {
                out.extend(run_check(name, cfg)?);
            }
            out
        }
        other => return Err(Error::UnknownCheck(other.into())),
    };
    Ok(reports)
}

/// Smallest degree that shows `[p](x)` and, where cheap, `[p^2](x)`.
pub fn default_honda_degree(p: u64, n: u32) -> u32 {
    let one = (p as u32).pow(n);
    if one * (p as u32).pow(n) <= 16 {
        one * (p as u32).pow(n)
    } else {
        one.max(2)
    }
}

/// One entry of a suite manifest.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub name: String,
    #[serde(default)]
    pub p: Option<u64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub loops: Option<usize>,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub max_order: Option<u64>,
    #[serde(default)]
    pub trunc: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default, rename = "check")]
    pub checks: Vec<SuiteEntry>,
}

impl Suite {
    pub fn parse(text: &str) -> Result<Suite> {
        toml::from_str(text).map_err(|e| Error::InvalidArgument(format!("suite manifest: {e}")))
    }

    pub fn run(&self, base: &CheckConfig) -> Result<Vec<CheckReport>> {
        let mut out = Vec::new();
        for entry in &self.checks {
            let mut cfg = base.clone();
            cfg.p = entry.p.or(base.p);
            cfg.n = entry.n.or(base.n);
            cfg.h = entry.loops.or(base.h);
            cfg.max_order = entry.max_order.unwrap_or(base.max_order);
            cfg.trunc = entry.trunc.or(base.trunc);
            if let Some(spec) = &entry.group {
                cfg.group = Some(AbelianPGroup::parse(spec, cfg.p)?);
            }
            out.extend(run_check(&entry.name, &cfg)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_enumeration() {
        let g = groups_up_to(2, 16);
        assert_eq!(g.len(), 1 + 1 + 2 + 3 + 5);
        assert_eq!(groups_up_to(3, 27).len(), 7);
        assert_eq!(group_spec(&g[5]), "4,2");
    }

    #[test]
    fn f2_passes() {
        let r = check_f2_example().unwrap();
        assert!(r.is_pass(), "{r:?}");
    }

    #[test]
    fn report_round_trip() {
        let r = check_vandermonde(2).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<CheckReport>(&s).unwrap(), r);
        let skipped = CheckReport::skipped("fdecomp", Params::default(), "hypothesis");
        let s = serde_json::to_string(&skipped).unwrap();
        assert_eq!(serde_json::from_str::<CheckReport>(&s).unwrap(), skipped);
        assert!(reports_to_markdown(&[r, skipped]).contains("skipped (hypothesis)"));
    }

    #[test]
    fn suite_manifest() {
        let suite = Suite::parse("[[check]]\nname = \"cyclic\"\ngroup = \"4\"\n\n[[check]]\nname = \"vandermonde\"\np = 3\n").unwrap();
        let reports = suite.run(&CheckConfig::default()).unwrap();
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(CheckReport::is_pass));
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(run_check("nope", &CheckConfig::default()), Err(Error::UnknownCheck(_))));
    }
}
