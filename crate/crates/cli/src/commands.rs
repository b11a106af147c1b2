use std::fs;
use std::path::Path;

use clap::ValueEnum;
use housing_core::exact_stats::*;
use housing_core::experiments::*;
use housing_core::poly::to_f64;
use housing_core::*;
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::report::{perm, profile, rational};
use crate::*;

type Res = std::result::Result<Value, CliError>;

pub(crate) fn dispatch(cmd: &Command) -> Res {
    match cmd {
        Command::Allocate(a) => allocate(a),
        Command::Check(a) => check(a),
        Command::Shuffle(a) => shuffle(a),
        Command::Generate(a) => generate(a),
        Command::Bijection(b) => bijection(b),
        Command::Stats(a) => stats(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Simulate(a) => simulate(a),
        Command::Marriage(m) => marriage(m),
    }
}

fn read_profile(path: &Path) -> std::result::Result<PreferenceProfile, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(PreferenceProfile::parse(&text)?)
}

fn write_profile(path: &Path, p: &PreferenceProfile) -> std::result::Result<(), CliError> {
    fs::write(path, p.to_text()).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn allocation(a: &AllocationResult) -> Value {
    json!({
        "goods": perm(&a.goods),
        "ranks": a.ranks,
        "rank_sum": a.rank_sum(),
    })
}

fn allocate(a: &AllocateArgs) -> Res {
    let p = read_profile(&a.input)?;
    let (method, result) = match &a.priority {
        Some(pi) => ("hash", uniform_hash_allocation(&p, pi)?),
        None => {
            let policy = match (&a.entry_order, a.entry) {
                (Some(order), _) => {
                    if order.len() != p.n() {
                        return Err(Error::SizeMismatch { expected: p.n(), actual: order.len() }.into());
                    }
                    EntryPolicy::Order(order.clone())
                }
                (None, EntryArg::Smallest) => EntryPolicy::Smallest,
                (None, EntryArg::Largest) => EntryPolicy::Largest,
            };
            ("stable", stable_allocation_with(&p, &policy))
        }
    };
    let mut out = allocation(&result);
    out["method"] = method.into();
    out["n"] = p.n().into();
    Ok(out)
}

fn check(a: &CheckArgs) -> Res {
    let p = read_profile(&a.input)?;
    let core = is_core_allocation_bounded(&p, &a.goods, a.bound)?;
    let local = is_locally_optimal_bounded(&p, &a.goods, a.bound)?;
    let reconstructed = match priority_reconstruction(&p, &a.goods) {
        Ok(pi) => perm(&pi),
        Err(Error::NotLocallyOptimal(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let mut out = allocation(&AllocationResult::from_goods(&p, a.goods.clone())?);
    out["core"] = core.into();
    out["locally_optimal"] = local.into();
    out["reconstructed_priority"] = reconstructed;
    Ok(out)
}

fn shuffle(a: &ShuffleArgs) -> Res {
    let p = read_profile(&a.input)?;
    let s = shuffle_profile(&p, &a.sigma)?;
    if let Some(path) = &a.output {
        write_profile(path, &s)?;
    }
    Ok(json!({ "sigma": perm(&a.sigma), "profile": profile(&s) }))
}

fn generate(a: &GenerateArgs) -> Res {
    let p = random_profile(a.n, &mut block_rng(a.seed, 0))?;
    if let Some(path) = &a.output {
        write_profile(path, &p)?;
    }
    Ok(json!({ "n": a.n, "seed": a.seed, "profile": profile(&p) }))
}

fn bijection(b: &BijectionCommand) -> Res {
    match b {
        BijectionCommand::PiToSigma(a) => {
            let p = read_profile(&a.input)?;
            let sigma = pi_to_sigma(&p, &a.perm)?;
            let hashed = uniform_hash_allocation(&p, &a.perm)?;
            Ok(json!({
                "pi": perm(&a.perm),
                "sigma": perm(&sigma),
                "allocation": perm(&hashed.goods),
                "consistent": is_consistent(&p, &a.perm, &sigma)?,
            }))
        }
        BijectionCommand::SigmaToPi(a) => {
            let p = read_profile(&a.input)?;
            let pi = sigma_to_pi(&p, &a.perm)?;
            Ok(json!({
                "sigma": perm(&a.perm),
                "pi": perm(&pi),
                "allocation": perm(&uniform_hash_allocation(&p, &pi)?.goods),
                "consistent": is_consistent(&p, &pi, &a.perm)?,
            }))
        }
        BijectionCommand::Check(a) => {
            let p = read_profile(&a.input)?;
            Ok(json!({
                "pi": perm(&a.perm),
                "sigma": perm(&a.sigma),
                "consistent": is_consistent(&p, &a.perm, &a.sigma)?,
                "pi_to_sigma": perm(&pi_to_sigma(&p, &a.perm)?),
            }))
        }
        BijectionCommand::Tableau(a) => {
            let p = read_profile(&a.input)?;
            let goods = uniform_hash_allocation(&p, &a.perm)?.goods;
            let t = TruncatedTableau::new(&p, &goods)?;
            let rows: Vec<Vec<usize>> = (1..=p.n()).map(|k| t.row(k).to_vec()).collect();
            let first: Vec<usize> = (1..=p.n()).filter(|&k| t.circled_first(k)).collect();
            Ok(json!({
                "pi": perm(&a.perm),
                "circled": perm(&goods),
                "rows": rows,
                "circled_first_rows": first,
            }))
        }
    }
}

fn need(v: Option<usize>, flag: &str, q: Quantity) -> std::result::Result<usize, CliError> {
    v.ok_or_else(|| {
        let name = q.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default();
        CliError::Usage(format!("stats {name} requires --{flag}"))
    })
}

fn poly_value(p: &RationalPolynomial) -> Value {
    json!({
        "coefficients": p.coefficients().iter().map(rational).collect::<Vec<_>>(),
        "display": p.to_string(),
    })
}

fn stats(a: &StatsArgs) -> Res {
    let q = a.quantity;
    let n = || need(a.n, "n", q);
    let mut out = json!({ "quantity": q });
    let value = match q {
        Quantity::RankSum => rational(&expected_rank_sum(n()?)?),
        Quantity::SquareSum => rational(&expected_square_sum(n()?)?),
        Quantity::SecondMoment => rational(&rank_sum_second_moment(n()?)?),
        Quantity::Variance => rational(&rank_sum_variance(n()?)?),
        Quantity::RankVariance => rational(&expected_rank_variance(n()?)?),
        Quantity::ProductCoeff => rational(&rank_product_coeff(n()?)?),
        Quantity::Poly => poly_value(&expected_rank_poly(n()?)?),
        Quantity::SquarePoly => poly_value(&expected_square_poly(n()?)?),
        Quantity::MaxRankCdf => {
            let n = n()?;
            match a.m {
                Some(m) => {
                    out["m"] = m.into();
                    rational(&max_rank_at_most(n, m)?)
                }
                None => Value::Array(
                    (1..=n)
                        .map(|m| max_rank_at_most(n, m).map(|x| rational(&x)))
                        .collect::<Result<Vec<_>>>()?,
                ),
            }
        }
        Quantity::MaxRankLimit => {
            out["terms"] = a.terms.into();
            rational(&max_rank_half_limit(a.terms))
        }
        Quantity::Stirling => {
            let k = need(a.k, "k", q)?;
            out["k"] = k.into();
            json!(stirling_cycle(n()?, k)?.to_string())
        }
        Quantity::Harmonic => {
            out["order"] = a.order.into();
            rational(&harmonic(n()?, a.order)?)
        }
        Quantity::Q => {
            let (k, j) = (need(a.k, "k", q)?, need(a.j, "j", q)?);
            out["k"] = k.into();
            out["j"] = j.into();
            rational(&q_exceed(n()?, k, j)?)
        }
        Quantity::WeightedQ => {
            let (k, m) = (need(a.k, "k", q)?, need(a.m, "m", q)?);
            out["k"] = k.into();
            out["m"] = m.into();
            rational(&weighted_q_sum(n()?, k, m)?)
        }
        Quantity::Binomial => {
            let k = need(a.k, "k", q)?;
            out["k"] = k.into();
            json!(binomial(n()?, k).to_string())
        }
    };
    if let Some(n) = a.n.filter(|_| q != Quantity::MaxRankLimit) {
        out["n"] = n.into();
    }
    out["value"] = value;
    Ok(out)
}

fn mean_rank_sum(d: &RankDistribution) -> ExactRational {
    let sum = d.weighted_sum(|r| r.iter().sum::<usize>().into());
    ratio(sum, d.total().clone())
}

fn enumerate(a: &EnumerateArgs) -> Res {
    let stable = exhaustive_rank_distribution(a.n, &AllocationMethod::Stable)?;
    let priorities = if a.all_priorities {
        Permutation::all(a.n)
    } else {
        vec![a.priority.clone().unwrap_or_else(|| Permutation::identity(a.n))]
    };
    let mut all_equal = true;
    let mut hashed = Vec::with_capacity(priorities.len());
    for pi in &priorities {
        let d = exhaustive_rank_distribution(a.n, &AllocationMethod::Hash(pi.clone()))?;
        let equal = d == stable;
        all_equal &= equal;
        hashed.push(json!({
            "priority": perm(pi),
            "equal_to_stable": equal,
            "distribution": serde_json::to_value(&d)?,
        }));
    }
    let observed = mean_rank_sum(&stable);
    let exact = expected_rank_sum(a.n)?;
    Ok(json!({
        "n": a.n,
        "profiles": stable.total().to_string(),
        "stable": serde_json::to_value(&stable)?,
        "hash": hashed,
        "all_equal": all_equal,
        "mean_rank_sum": rational(&observed),
        "closed_form_mean": rational(&exact),
        "mean_matches_closed_form": observed == exact,
    }))
}

fn simulate(a: &SimulateArgs) -> Res {
    let method = match a.method {
        SimMethodArg::Stable => SimulationMethod::Stable,
        SimMethodArg::Hash => {
            SimulationMethod::Hash(a.priority.clone().unwrap_or_else(|| Permutation::identity(a.n)))
        }
        SimMethodArg::MarriageFixedGirls => {
            let src = a
                .girls
                .as_ref()
                .ok_or_else(|| CliError::Usage("--method marriage-fixed-girls requires --girls".into()))?;
            SimulationMethod::MarriageFixedGirls(resolve_girls(src, Some(a.n))?)
        }
        SimMethodArg::MarriageRandomGirls => SimulationMethod::MarriageRandomGirls,
    };
    let summary = monte_carlo_summary(a.n, a.samples, a.seed, &method)?;
    let mut out = serde_json::to_value(&summary)?;
    let (lo, hi) = summary.exact.marriage_bounds;
    let band = 4.0 * summary.standard_error;
    match method {
        SimulationMethod::Stable | SimulationMethod::Hash(_) => {
            let target = to_f64(&expected_rank_sum(a.n)?);
            out["z_score_vs_exact_mean"] = json!(summary.z_score(target));
        }
        _ => {
            let inside = summary.mean_rank_sum + band >= lo && summary.mean_rank_sum - band <= hi;
            out["consistent_with_marriage_bounds"] = inside.into();
        }
    }
    Ok(out)
}

fn resolve_girls(src: &GirlsSource, n: Option<usize>) -> std::result::Result<PreferenceProfile, CliError> {
    let need_n = || n.ok_or_else(|| CliError::Usage(format!("--girls {src} requires --n")));
    let girls = match src {
        GirlsSource::Cyclic => cyclic_girls(need_n()?)?,
        GirlsSource::Equal => equal_girls(need_n()?)?,
        GirlsSource::File(path) => read_profile(path)?,
    };
    if let Some(n) = n {
        if n != girls.n() {
            return Err(Error::SizeMismatch { expected: n, actual: girls.n() }.into());
        }
    }
    Ok(girls)
}

fn totals_value(girls: &PreferenceProfile, t: &MarriageTotals) -> Value {
    let n = girls.n();
    json!({
        "count": t.count.to_string(),
        "one_based": t.one_based.to_string(),
        "zero_based": t.zero_based(n).to_string(),
        "mean_one_based": rational(&ratio(t.one_based.into(), t.count.into())),
        "mean_zero_based": rational(&ratio(t.zero_based(n).into(), t.count.into())),
    })
}

fn marriage(m: &MarriageCommand) -> Res {
    match m {
        MarriageCommand::Total(a) => {
            let girls = resolve_girls(&a.girls.girls, a.girls.n)?;
            let t = marriage_totals(&girls, a.long_run)?;
            let mut out = totals_value(&girls, &t);
            out["n"] = girls.n().into();
            out["girls"] = profile(&girls);
            out["convention"] = serde_json::to_value(a.convention)?;
            out["total"] = t.get(girls.n(), a.convention.into()).to_string().into();
            Ok(out)
        }
        MarriageCommand::Scan(a) => {
            let r = conjecture_scan(a.n)?;
            let class = |c: &ClassRecord| {
                json!({
                    "canonical": profile(&c.canonical),
                    "class_size": c.class_size,
                    "total_one_based": c.total_one_based.to_string(),
                    "total_zero_based": c.total_zero_based.to_string(),
                })
            };
            let shown = a.top.unwrap_or(r.classes.len()).min(r.classes.len());
            let cyclic = girls_canonical_form(&cyclic_girls(a.n)?)?;
            let equal = girls_canonical_form(&equal_girls(a.n)?)?;
            Ok(json!({
                "n": a.n,
                "class_count": r.classes.len(),
                "matrices_covered": r.matrices_covered(),
                "max": class(r.max_class()),
                "min": class(r.min_class()),
                "cyclic_is_max": r.max_class().canonical == cyclic,
                "equal_lists_is_min": r.classes.iter().any(|c| c.canonical == equal
                    && c.total_zero_based == r.min_class().total_zero_based),
                "classes": r.classes[..shown].iter().map(class).collect::<Vec<_>>(),
            }))
        }
        MarriageCommand::Run(a) => {
            let girls = resolve_girls(&a.girls.girls, a.girls.n)?;
            let cp = run_marriage_totals_checkpointed(&girls, &a.checkpoint, a.chunk_size, a.max_chunks, a.long_run)?;
            let mut out = totals_value(&girls, &cp.totals()?);
            out["n"] = girls.n().into();
            out["complete"] = cp.is_complete().into();
            out["completed"] = cp.completed.into();
            out["total_indices"] = cp.total_indices.into();
            Ok(out)
        }
        MarriageCommand::Canonical(a) => {
            let girls = resolve_girls(&a.girls, a.n)?;
            Ok(json!({
                "girls": profile(&girls),
                "canonical": profile(&girls_canonical_form(&girls)?),
                "class_size": girls_class_size(&girls)?,
            }))
        }
        MarriageCommand::Classes(a) => {
            let classes = girls_isomorphism_classes(a.n)?;
            let mut out = json!({
                "n": a.n,
                "class_count": classes.len(),
                "matrices_covered": classes.iter().map(|c| c.1).sum::<u64>(),
                "classes": classes
                    .iter()
                    .map(|(rep, size)| json!({ "canonical": profile(rep), "class_size": size }))
                    .collect::<Vec<_>>(),
            });
            if a.verify {
                let counted = class_sizes_by_counting(a.n)?;
                let agree = classes.len() == counted.len()
                    && classes.iter().all(|(rep, size)| counted.get(&rep.to_vecs()) == Some(size));
                out["sizes_agree_with_counting"] = agree.into();
            }
            Ok(out)
        }
        MarriageCommand::Match(a) => {
            let girls = resolve_girls(&a.girls.girls, a.girls.n)?;
            let boys = match (&a.boys, a.boys_index) {
                (Some(path), _) => read_profile(path)?,
                (None, Some(idx)) => boys_matrix_at(girls.n(), idx)?,
                (None, None) => return Err(CliError::Usage("--boys or --boys-index is required".into())),
            };
            let matching = gale_shapley_male_optimal(&MarriageInstance::new(boys.clone(), girls.clone())?);
            let mut out = allocation(&matching);
            out["boys"] = profile(&boys);
            out["girls"] = profile(&girls);
            Ok(out)
        }
    }
}

fn ratio(num: BigUint, den: BigUint) -> ExactRational {
    ExactRational::new(num.into(), den.into())
}
