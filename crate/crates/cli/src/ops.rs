//! Command execution. Every subcommand is normalized into an `Invocation`
//! (which doubles as the report's reproducible `inputs` echo), executed to a
//! verdict plus certificate details, and can be re-checked by `verify`.

use crate::fixtures::{self, Fixture};
use crate::input;
use crate::report::{self, Budgets, RunReport};
use crate::{Cli, Command, Model};
use fpgroups_core::baumslag_solitar::{
    bs_normal_form, bs_word_problem, conjugation_power_identity, power_in_n_exponent, BsError,
    BsParams, H1Map,
};
use fpgroups_core::graph_of_groups::{
    GraphOfGroups, IsometryType, KernelOfAction, KernelUnknownReason, RelativeWpd,
};
use fpgroups_core::lattice::AbelianInvariants;
use fpgroups_core::quotients::{
    reidemeister_schreier, separate, todd_coxeter, CosetEnumeration, CosetTable,
    FinitePresentation, HomEnumerator, Perm, PermAssignment, SeparationOutcome,
};
use fpgroups_core::raag::{dimension, is_droms_coherent, multiple_conjugacy, MultipleConjugacy, RaagPresentation};
use fpgroups_core::subdirect::{
    classify_structure, coset_cover_check, fiber_search, membership_semidecide, AmbientProduct,
    CosetCover, Factor, FiberReport, GroupModel, Membership, SearchBudget, SeparationCertificate,
    Side, StructureBucket, SubdirectInput,
};
use fpgroups_core::words::{GenAlphabet, Sign, Word};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Serialize, Deserialize, Clone)]
pub enum Source {
    #[serde(rename = "fixture")]
    Fixture(String),
    #[serde(rename = "input")]
    Inline(Value),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Invocation {
    Nf {
        source: Source,
        model: Option<Model>,
        word: String,
    },
    Wp {
        source: Source,
        model: Option<Model>,
        word: String,
    },
    Conj {
        source: Source,
        u: String,
        v: String,
    },
    MultiConj {
        source: Source,
        pairs: Vec<(String, String)>,
    },
    Member {
        source: Source,
        sub: Option<String>,
        target: String,
    },
    Fiber {
        source: Source,
        side: u8,
    },
    Classify {
        source: Source,
    },
    CosetCover {
        source: Source,
        sub: String,
        extra: String,
        cosets: String,
        cyclic: String,
        witness_budget: usize,
    },
    BsH1 {
        m: i64,
        n: i64,
        xi: String,
    },
    BsPowerIdentity {
        m: i64,
        n: i64,
        max_power: u32,
    },
    BsPowerInN {
        m: i64,
        n: i64,
        big_m: u32,
        k: u32,
    },
    Tc {
        source: Source,
        sub: Option<String>,
    },
    Rs {
        source: Source,
        sub: Option<String>,
    },
    Homs {
        source: Source,
        degree: usize,
    },
    Separate {
        source: Source,
        sub: String,
        target: String,
    },
    Wpd {
        source: Source,
    },
    KernelOfAction {
        source: Source,
    },
    CheckClass {
        source: Source,
        model: Option<Model>,
    },
}

impl Invocation {
    fn name(&self) -> &'static str {
        match self {
            Invocation::Nf { .. } => "nf",
            Invocation::Wp { .. } => "wp",
            Invocation::Conj { .. } => "conj",
            Invocation::MultiConj { .. } => "multi-conj",
            Invocation::Member { .. } => "member",
            Invocation::Fiber { .. } => "fiber",
            Invocation::Classify { .. } => "classify",
            Invocation::CosetCover { .. } => "coset-cover",
            Invocation::BsH1 { .. } => "bs-h1",
            Invocation::BsPowerIdentity { .. } => "bs-power-identity",
            Invocation::BsPowerInN { .. } => "bs-power-in-n",
            Invocation::Tc { .. } => "tc",
            Invocation::Rs { .. } => "rs",
            Invocation::Homs { .. } => "homs",
            Invocation::Separate { .. } => "separate",
            Invocation::Wpd { .. } => "wpd",
            Invocation::KernelOfAction { .. } => "kernel-of-action",
            Invocation::CheckClass { .. } => "check-class",
        }
    }
}

fn source_of(fixture: &Option<String>, file: &Option<String>) -> Result<Source, String> {
    match (fixture, file) {
        (Some(f), None) => Ok(Source::Fixture(f.clone())),
        (None, Some(path)) => Ok(Source::Inline(input::load_json::<Value>(path)?)),
        (Some(_), Some(_)) => Err(String::from("pass either --fixture or a file, not both")),
        (None, None) => Err(String::from(
            "an input is required: --fixture NAME or a JSON file",
        )),
    }
}

pub fn run(cli: &Cli, budgets: Budgets) -> Result<RunReport, String> {
    let fx = &cli.fixture;
    let inv = match &cli.command {
        Command::Nf { model, input, word } => Invocation::Nf {
            source: source_of(fx, input)?,
            model: *model,
            word: word.clone(),
        },
        Command::Wp { model, input, word } => Invocation::Wp {
            source: source_of(fx, input)?,
            model: *model,
            word: word.clone(),
        },
        Command::Conj { input, u, v } => Invocation::Conj {
            source: source_of(fx, input)?,
            u: u.clone(),
            v: v.clone(),
        },
        Command::MultiConj { input, pairs } => Invocation::MultiConj {
            source: source_of(fx, input)?,
            pairs: pairs
                .iter()
                .map(|p| {
                    p.split_once(',')
                        .map(|(u, v)| (u.trim().to_string(), v.trim().to_string()))
                        .ok_or_else(|| format!("--pair wants \"u,v\", got {p:?}"))
                })
                .collect::<Result<_, _>>()?,
        },
        Command::Member { sub, input, target } => Invocation::Member {
            source: source_of(fx, input)?,
            sub: sub.clone(),
            target: target.clone(),
        },
        Command::Fiber { side, input } => Invocation::Fiber {
            source: source_of(fx, input)?,
            side: *side,
        },
        Command::Classify { input } => Invocation::Classify {
            source: source_of(fx, input)?,
        },
        Command::CosetCover {
            sub,
            extra,
            cosets,
            cyclic,
            witness_budget,
        } => Invocation::CosetCover {
            source: source_of(fx, &None)?,
            sub: sub.clone(),
            extra: extra.clone(),
            cosets: cosets.clone(),
            cyclic: cyclic.clone(),
            witness_budget: *witness_budget,
        },
        Command::BsH1 { m, n, xi } => Invocation::BsH1 {
            m: *m,
            n: *n,
            xi: xi.clone(),
        },
        Command::BsPowerIdentity { m, n, max_power } => Invocation::BsPowerIdentity {
            m: *m,
            n: *n,
            max_power: *max_power,
        },
        Command::BsPowerInN { m, n, big_m, k } => Invocation::BsPowerInN {
            m: *m,
            n: *n,
            big_m: *big_m,
            k: *k,
        },
        Command::Tc {
            sub, presentation, ..
        } => Invocation::Tc {
            source: source_of(fx, presentation)?,
            sub: sub.clone(),
        },
        Command::Rs { sub, presentation } => Invocation::Rs {
            source: source_of(fx, presentation)?,
            sub: sub.clone(),
        },
        Command::Homs {
            degree,
            presentation,
        } => Invocation::Homs {
            source: source_of(fx, presentation)?,
            degree: *degree,
        },
        Command::Separate {
            sub,
            presentation,
            target,
        } => Invocation::Separate {
            source: source_of(fx, presentation)?,
            sub: sub.clone(),
            target: target.clone(),
        },
        Command::Wpd { input } => Invocation::Wpd {
            source: source_of(fx, input)?,
        },
        Command::KernelOfAction { input } => Invocation::KernelOfAction {
            source: source_of(fx, input)?,
        },
        Command::CheckClass { model, input } => Invocation::CheckClass {
            source: source_of(fx, input)?,
            model: *model,
        },
        Command::Verify { report } => return verify_report(report),
    };
    execute(&inv, budgets)
}

pub fn execute(inv: &Invocation, budgets: Budgets) -> Result<RunReport, String> {
    let inputs = serde_json::to_value(inv).expect("invocation serializes");
    let (verdict, details) = match inv {
        Invocation::Nf { source, model, word } => do_nf(source, *model, word)?,
        Invocation::Wp { source, model, word } => do_wp(source, *model, word)?,
        Invocation::Conj { source, u, v } => do_conj(source, u, v)?,
        Invocation::MultiConj { source, pairs } => do_multi_conj(source, pairs, budgets)?,
        Invocation::Member { source, sub, target } => {
            do_member(source, sub.as_deref(), target, budgets)?
        }
        Invocation::Fiber { source, side } => do_fiber(source, *side, budgets)?,
        Invocation::Classify { source } => do_classify(source, budgets)?,
        Invocation::CosetCover {
            source,
            sub,
            extra,
            cosets,
            cyclic,
            witness_budget,
        } => do_coset_cover(source, sub, extra, cosets, cyclic, *witness_budget, budgets)?,
        Invocation::BsH1 { m, n, xi } => do_bs_h1(*m, *n, xi)?,
        Invocation::BsPowerIdentity { m, n, max_power } => {
            do_bs_power_identity(*m, *n, *max_power)?
        }
        Invocation::BsPowerInN { m, n, big_m, k } => do_bs_power_in_n(*m, *n, *big_m, *k)?,
        Invocation::Tc { source, sub } => do_tc(source, sub.as_deref(), budgets)?,
        Invocation::Rs { source, sub } => do_rs(source, sub.as_deref(), budgets)?,
        Invocation::Homs { source, degree } => do_homs(source, *degree, budgets)?,
        Invocation::Separate { source, sub, target } => {
            do_separate(source, sub, target, budgets)?
        }
        Invocation::Wpd { source } => do_wpd(source, budgets)?,
        Invocation::KernelOfAction { source } => do_kernel(source)?,
        Invocation::CheckClass { source, model } => do_check_class(source, *model)?,
    };
    Ok(RunReport::new(inv.name(), inputs, budgets, &verdict, details))
}

// ----- input resolution -----

enum ModelChoice {
    Raag(RaagPresentation),
    Gog(GraphOfGroups),
    Bs(BsParams),
}

fn from_value<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T, String> {
    serde_json::from_value(v.clone()).map_err(|e| format!("bad input shape: {e}"))
}

fn resolve_model(source: &Source, model: Option<Model>) -> Result<ModelChoice, String> {
    match source {
        Source::Fixture(name) => {
            let fx = fixtures::lookup(name)?;
            match (fx, model) {
                (Fixture::Raag(r), None | Some(Model::Raag)) => Ok(ModelChoice::Raag(r)),
                (Fixture::Gog(g), None | Some(Model::Gog)) => Ok(ModelChoice::Gog(g)),
                (Fixture::Bs(p), None | Some(Model::Bs)) => Ok(ModelChoice::Bs(p)),
                (Fixture::Bs(p), Some(Model::Gog)) => Ok(ModelChoice::Gog(
                    GraphOfGroups::bs_one_loop(p.m(), p.n()).map_err(|e| e.to_string())?,
                )),
                (Fixture::Subgroup { .. } | Fixture::Product { .. }, _) => Err(format!(
                    "fixture {name:?} is not a single-group model"
                )),
                _ => Err(String::from("--model conflicts with the fixture kind")),
            }
        }
        Source::Inline(v) => match model {
            Some(Model::Raag) => Ok(ModelChoice::Raag(input::raag_from_dto(&from_value(v)?)?)),
            Some(Model::Gog) => Ok(ModelChoice::Gog(input::gog_from_dto(&from_value(v)?)?)),
            Some(Model::Bs) => Err(String::from(
                "the one-relator model takes BS(m,n) fixtures, not files",
            )),
            None => Err(String::from("file input needs --model raag|gog")),
        },
    }
}

fn resolve_raag(source: &Source) -> Result<RaagPresentation, String> {
    match resolve_model(source, infer_model(source, Model::Raag))? {
        ModelChoice::Raag(r) => Ok(r),
        _ => Err(String::from("an Artin-group input is required here")),
    }
}

fn resolve_gog(source: &Source) -> Result<GraphOfGroups, String> {
    match source {
        Source::Fixture(name) => match fixtures::lookup(name)? {
            Fixture::Gog(g) => Ok(g),
            Fixture::Bs(p) => {
                GraphOfGroups::bs_one_loop(p.m(), p.n()).map_err(|e| e.to_string())
            }
            _ => Err(format!("fixture {name:?} is not a splitting")),
        },
        Source::Inline(v) => input::gog_from_dto(&from_value(v)?),
    }
}

/// File inputs for single-model commands that lack a --model flag: sniff
/// graph-of-groups shape (structured vertices) versus plain vertex names.
fn infer_model(source: &Source, fallback: Model) -> Option<Model> {
    match source {
        Source::Fixture(_) => None,
        Source::Inline(v) => {
            if v["vertices"].as_array().and_then(|a| a.first()).map(Value::is_object)
                == Some(true)
            {
                Some(Model::Gog)
            } else {
                Some(fallback)
            }
        }
    }
}

fn resolve_factor(source: &Source) -> Result<Factor, String> {
    match source {
        Source::Fixture(name) => match fixtures::lookup(name)? {
            Fixture::Raag(r) => Ok(Factor::Raag(r)),
            Fixture::Gog(g) => Ok(Factor::Gog(g)),
            Fixture::Bs(p) => Ok(Factor::Gog(
                GraphOfGroups::bs_one_loop(p.m(), p.n()).map_err(|e| e.to_string())?,
            )),
            _ => Err(format!("fixture {name:?} is not a single factor")),
        },
        Source::Inline(v) => match infer_model(source, Model::Raag) {
            Some(Model::Gog) => Ok(Factor::Gog(input::gog_from_dto(&from_value(v)?)?)),
            _ => Ok(Factor::Raag(input::raag_from_dto(&from_value(v)?)?)),
        },
    }
}

fn resolve_subdirect(source: &Source) -> Result<(AmbientProduct, SubdirectInput), String> {
    match source {
        Source::Fixture(name) => match fixtures::lookup(name)? {
            Fixture::Product { ambient, input } => Ok((*ambient, input)),
            _ => Err(format!("fixture {name:?} has no subdirect generating set")),
        },
        Source::Inline(v) => input::subdirect_from_dto(&from_value(v)?),
    }
}

/// Presentation plus subgroup words for the coset-enumeration commands.
fn resolve_presentation(
    source: &Source,
    sub: Option<&str>,
) -> Result<(FinitePresentation, Vec<Word>), String> {
    let (pres, baked) = match source {
        Source::Fixture(name) => match fixtures::lookup(name)? {
            Fixture::Raag(r) => (r.presentation(), None),
            Fixture::Gog(g) => (g.presentation(), None),
            Fixture::Bs(p) => (p.presentation(), None),
            Fixture::Subgroup {
                presentation,
                subgroup,
            } => (presentation, Some(subgroup)),
            Fixture::Product { ambient, .. } => (ambient.product_presentation(), None),
        },
        Source::Inline(v) => (input::presentation_from_dto(&from_value(v)?)?, None),
    };
    let sub_words = match (sub, baked) {
        (Some(text), _) => input::parse_word_list(pres.alphabet(), text)?,
        (None, Some(words)) => words,
        (None, None) => Vec::new(),
    };
    Ok((pres, sub_words))
}

/// Membership runs over a single factor or the whole product.
enum MemberModel {
    Fac(Factor),
    Prod(Box<AmbientProduct>, SubdirectInput),
}

impl GroupModel for MemberModel {
    fn model_alphabet(&self) -> GenAlphabet {
        match self {
            MemberModel::Fac(f) => f.model_alphabet(),
            MemberModel::Prod(a, _) => a.model_alphabet(),
        }
    }

    fn model_word_problem(&self, w: &Word) -> bool {
        match self {
            MemberModel::Fac(f) => f.model_word_problem(w),
            MemberModel::Prod(a, _) => a.model_word_problem(w),
        }
    }

    fn model_presentation(&self) -> FinitePresentation {
        match self {
            MemberModel::Fac(f) => f.model_presentation(),
            MemberModel::Prod(a, _) => a.model_presentation(),
        }
    }
}

fn resolve_member(source: &Source) -> Result<MemberModel, String> {
    match source {
        Source::Fixture(name) => match fixtures::lookup(name)? {
            Fixture::Product { ambient, input } => Ok(MemberModel::Prod(ambient, input)),
            _ => resolve_factor(source).map(MemberModel::Fac),
        },
        Source::Inline(v) => {
            if v.get("ambient").is_some() {
                let (a, i) = input::subdirect_from_dto(&from_value(v)?)?;
                Ok(MemberModel::Prod(Box::new(a), i))
            } else {
                resolve_factor(source).map(MemberModel::Fac)
            }
        }
    }
}

fn member_subgroup(model: &MemberModel, sub: Option<&str>) -> Result<Vec<Word>, String> {
    let alphabet = model.model_alphabet();
    match (model, sub) {
        (_, Some(text)) => input::parse_word_list(&alphabet, text),
        (MemberModel::Prod(ambient, input), None) => Ok(input
            .generators()
            .iter()
            .map(|p| ambient.join(p))
            .collect()),
        (MemberModel::Fac(_), None) => Err(String::from("--sub is required for a factor input")),
    }
}

// ----- shared JSON helpers -----

fn words_json(alphabet: &GenAlphabet, words: &[Word]) -> Value {
    Value::Array(
        words
            .iter()
            .map(|w| Value::String(alphabet.display_word(w)))
            .collect(),
    )
}

fn invariants_json(inv: &AbelianInvariants) -> Value {
    json!({
        "rank": inv.rank,
        "torsion": inv.torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
    })
}

fn presentation_json(pres: &FinitePresentation) -> Value {
    json!({
        "generators": pres.alphabet().names(),
        "relators": pres
            .relators()
            .iter()
            .map(|r| pres.alphabet().display_word(r))
            .collect::<Vec<_>>(),
    })
}

/// Abbreviated form for the classify report, whose quotients can carry a
/// relator for every fiber word found.
fn presentation_summary_json(pres: &FinitePresentation) -> Value {
    json!({
        "generators": pres.alphabet().names(),
        "relator_count": pres.relators().len(),
        "relators_shown": pres
            .relators()
            .iter()
            .take(WITNESS_CAP)
            .map(|r| pres.alphabet().display_word(r))
            .collect::<Vec<_>>(),
    })
}

fn assignment_json(a: &PermAssignment) -> Value {
    Value::Array(
        a.images()
            .iter()
            .map(|p| serde_json::to_value(p.images()).unwrap())
            .collect(),
    )
}

fn assignment_from_json(degree: usize, v: &Value) -> Result<PermAssignment, String> {
    let images: Vec<Vec<usize>> = from_value(v)?;
    let perms = images
        .into_iter()
        .map(|im| Perm::from_images(im).ok_or_else(|| String::from("not a permutation")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PermAssignment::new(degree, perms))
}

fn table_rows(t: &CosetTable) -> Vec<Vec<usize>> {
    (0..t.index())
        .map(|c| (0..2 * t.num_gens()).map(|col| t.entry(c, col)).collect())
        .collect()
}

/// CSV rendering of a `tc` report's table, one row per coset.
pub fn table_csv_from_details(details: &Value) -> String {
    let (Some(gens), Some(rows)) = (details["generators"].as_array(), details["table"].as_array())
    else {
        return String::new();
    };
    let mut head = vec![String::from("coset")];
    for g in gens {
        let name = g.as_str().unwrap_or("?");
        head.push(name.to_string());
        head.push(format!("{name}^-1"));
    }
    let mut out = head.join(",");
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        let mut line = vec![i.to_string()];
        for e in row.as_array().into_iter().flatten() {
            line.push(e.to_string());
        }
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn abstract_names(k: usize) -> GenAlphabet {
    GenAlphabet::new((1..=k).map(|i| format!("s{i}"))).expect("generated names are valid")
}

fn substitute(h_gens: &[Word], w: &Word) -> Word {
    let mut out = Word::empty();
    for l in w.letters() {
        let g = &h_gens[l.gen];
        out = out.concat(&if l.sign == Sign::Plus {
            g.clone()
        } else {
            g.inverse()
        });
    }
    out.freely_reduced()
}

fn search_budget(b: Budgets) -> SearchBudget {
    SearchBudget {
        max_length: b.length,
        max_degree: b.degree,
        max_steps: b.steps,
    }
}

fn budget_trace(b: Budgets) -> Value {
    json!({"steps": b.steps, "degree": b.degree, "length": b.length})
}

// ----- command bodies -----

type Outcome = (String, Value);

fn ok(verdict: &str, details: Value) -> Result<Outcome, String> {
    Ok((verdict.to_string(), details))
}

fn do_nf(source: &Source, model: Option<Model>, word: &str) -> Result<Outcome, String> {
    match resolve_model(source, model)? {
        ModelChoice::Raag(r) => {
            let w = input::parse_over(r.alphabet(), word)?;
            let nf = r.normal_form(&w);
            ok(
                "ok",
                json!({"normal_form": r.alphabet().display_word(&nf), "length": nf.len()}),
            )
        }
        ModelChoice::Gog(g) => {
            let w = input::parse_over(g.alphabet(), word)?;
            let e = g.word_to_element(&w).map_err(|e| e.to_string())?;
            let red = g.britton_reduce(&e).map_err(|e| e.to_string())?;
            ok(
                "ok",
                json!({"normal_form": g.display_element(&red), "crossings": red.crossing_count()}),
            )
        }
        ModelChoice::Bs(p) => {
            let alphabet = p.alphabet();
            let w = input::parse_over(&alphabet, word)?;
            let nf = bs_normal_form(&p, &w);
            ok(
                "ok",
                json!({"normal_form": alphabet.display_word(&nf), "length": nf.len()}),
            )
        }
    }
}

fn do_wp(source: &Source, model: Option<Model>, word: &str) -> Result<Outcome, String> {
    let trivial = match resolve_model(source, model)? {
        ModelChoice::Raag(r) => r.is_trivial(&input::parse_over(r.alphabet(), word)?),
        ModelChoice::Gog(g) => {
            let e = g
                .word_to_element(&input::parse_over(g.alphabet(), word)?)
                .map_err(|e| e.to_string())?;
            g.word_problem(&e).map_err(|e| e.to_string())?
        }
        ModelChoice::Bs(p) => bs_word_problem(&p, &input::parse_over(&p.alphabet(), word)?),
    };
    ok(if trivial { "trivial" } else { "nontrivial" }, json!({}))
}

fn do_conj(source: &Source, u: &str, v: &str) -> Result<Outcome, String> {
    let r = resolve_raag(source)?;
    let uw = input::parse_over(r.alphabet(), u)?;
    let vw = input::parse_over(r.alphabet(), v)?;
    ok(
        if r.conjugate(&uw, &vw) {
            "conjugate"
        } else {
            "not-conjugate"
        },
        json!({}),
    )
}

fn do_multi_conj(
    source: &Source,
    pairs: &[(String, String)],
    budgets: Budgets,
) -> Result<Outcome, String> {
    let r = resolve_raag(source)?;
    let parsed: Vec<(Word, Word)> = pairs
        .iter()
        .map(|(u, v)| {
            Ok((
                input::parse_over(r.alphabet(), u)?,
                input::parse_over(r.alphabet(), v)?,
            ))
        })
        .collect::<Result<_, String>>()?;
    match multiple_conjugacy(&r, &parsed, budgets.length) {
        MultipleConjugacy::Yes(g) => ok(
            "yes",
            json!({"witness": r.alphabet().display_word(&g)}),
        ),
        MultipleConjugacy::No(ob) => ok(
            "no",
            json!({"pair": ob.pair, "abelianization_differs": ob.abelianization_differs}),
        ),
        MultipleConjugacy::Unknown { radius } => ok(
            "unknown",
            json!({"radius": radius, "reason": "pairs are individually conjugate but no common conjugator was found", "budget": budget_trace(budgets)}),
        ),
    }
}

fn combo_display(k: usize, w: &Word) -> String {
    abstract_names(k).display_word(w)
}

fn do_member(
    source: &Source,
    sub: Option<&str>,
    target: &str,
    budgets: Budgets,
) -> Result<Outcome, String> {
    let model = resolve_member(source)?;
    let sub_words = member_subgroup(&model, sub)?;
    let alphabet = model.model_alphabet();
    let target_word = input::parse_over(&alphabet, target)?;
    match membership_semidecide(&model, &sub_words, &target_word, &search_budget(budgets)) {
        Membership::Yes(w) => {
            let rechecked =
                model.model_word_problem(&target_word.inverse().concat(&w.element));
            if !rechecked {
                return Err(String::from("internal: witness failed its own re-check"));
            }
            ok(
                "yes",
                json!({
                    "witness": {
                        "combination": combo_display(sub_words.len(), &w.combination),
                        "element": alphabet.display_word(&w.element),
                    },
                    "verified": true,
                }),
            )
        }
        Membership::No(cert) => {
            if !cert.verify(&model.model_presentation(), &sub_words, &target_word) {
                return Err(String::from("internal: certificate failed its own re-check"));
            }
            ok(
                "no",
                json!({
                    "degree": cert.degree,
                    "images": assignment_json(&cert.assignment),
                    "target_image": cert.image_of_target.images(),
                    "subgroup_order": cert.subgroup_order,
                    "verified": true,
                }),
            )
        }
        Membership::Unknown => ok(
            "unknown",
            json!({"reason": "both searches exhausted their budgets", "budget": budget_trace(budgets)}),
        ),
    }
}

/// How many fiber witnesses a report spells out; the count is still exact.
const WITNESS_CAP: usize = 12;

fn fiber_json(
    ambient: &AmbientProduct,
    input_set: &SubdirectInput,
    rep: &FiberReport,
) -> Value {
    let abstract_alphabet = input_set.abstract_alphabet();
    let first = ambient.factor(Side::First).alphabet();
    let second = ambient.factor(Side::Second).alphabet();
    json!({
        "radius_searched": rep.radius_searched,
        "count": rep.found.len(),
        "witnesses": rep.found.iter().take(WITNESS_CAP).map(|(abs, pair)| json!({
            "abstract": abstract_alphabet.display_word(abs),
            "first": first.display_word(&pair.first),
            "second": second.display_word(&pair.second),
        })).collect::<Vec<_>>(),
    })
}

fn do_fiber(source: &Source, side: u8, budgets: Budgets) -> Result<Outcome, String> {
    let (ambient, input_set) = resolve_subdirect(source)?;
    let side = if side == 1 { Side::First } else { Side::Second };
    let rep = fiber_search(&ambient, &input_set, side, budgets.length);
    let verdict = if rep.is_empty() { "empty" } else { "found" };
    ok(verdict, fiber_json(&ambient, &input_set, &rep))
}

fn bucket_verdict(bucket: &StructureBucket) -> &'static str {
    match bucket {
        StructureBucket::FiniteIndex => "finite-index",
        StructureBucket::ZKernel => "z-kernel",
        StructureBucket::Z2Kernel => "z2-kernel",
        StructureBucket::Unknown => "unknown",
    }
}

fn do_classify(source: &Source, budgets: Budgets) -> Result<Outcome, String> {
    let (ambient, input_set) = resolve_subdirect(source)?;
    let report = classify_structure(&ambient, &input_set, &search_budget(budgets))
        .map_err(|e| e.to_string())?;
    let details = json!({
        "bucket": bucket_verdict(&report.bucket),
        "fiber_first": fiber_json(&ambient, &input_set, &report.fiber_first),
        "fiber_second": fiber_json(&ambient, &input_set, &report.fiber_second),
        "quotient_first": presentation_summary_json(&report.quotient_first),
        "quotient_second": presentation_summary_json(&report.quotient_second),
        "abelianization_first": invariants_json(&report.abelian_first),
        "abelianization_second": invariants_json(&report.abelian_second),
        "index_first": report.index_first,
        "index_second": report.index_second,
        "note": report.note,
    });
    ok(bucket_verdict(&report.bucket), details)
}

#[allow(clippy::too_many_arguments)]
fn do_coset_cover(
    source: &Source,
    sub: &str,
    extra: &str,
    cosets: &str,
    cyclic: &str,
    witness_budget: usize,
    budgets: Budgets,
) -> Result<Outcome, String> {
    let factor = resolve_factor(source)?;
    let alphabet = factor.alphabet().clone();
    let sub_words = input::parse_word_list(&alphabet, sub)?;
    let extra_words = input::parse_word_list(&alphabet, extra)?;
    let coset_words = input::parse_word_list(&alphabet, cosets)?;
    let c = input::parse_over(&alphabet, cyclic)?;
    match coset_cover_check(
        &factor,
        &sub_words,
        &extra_words,
        &coset_words,
        &c,
        budgets.length,
        witness_budget,
    ) {
        CosetCover::Covered { radius } => ok("covered", json!({"radius": radius})),
        CosetCover::Uncovered { witness } => ok(
            "uncovered",
            json!({"witness": alphabet.display_word(&witness)}),
        ),
        CosetCover::Unknown { first_unresolved } => ok(
            "unknown",
            json!({
                "first_unresolved": alphabet.display_word(&first_unresolved),
                "reason": "no exact membership decision for this subgroup shape",
                "budget": budget_trace(budgets),
            }),
        ),
    }
}

fn bs_params(m: i64, n: i64) -> Result<BsParams, String> {
    BsParams::new(m, n).map_err(|e| e.to_string())
}

fn do_bs_h1(m: i64, n: i64, xi: &str) -> Result<Outcome, String> {
    let p = bs_params(m, n)?;
    let w = input::parse_xi_word(xi)?;
    let map = H1Map::new(p).map_err(|e| e.to_string())?;
    let value = map.image(&w);
    let base = (m * n).abs();
    let rendered = if value.denominator_exponent() == 0 {
        value.numerator().to_string()
    } else {
        format!(
            "{}/{}^{}",
            value.numerator(),
            base,
            value.denominator_exponent()
        )
    };
    ok(
        "ok",
        json!({
            "value": rendered,
            "numerator": value.numerator().to_string(),
            "denominator_base": base,
            "denominator_exponent": value.denominator_exponent(),
            "zero": value.is_zero(),
        }),
    )
}

fn do_bs_power_identity(m: i64, n: i64, max_power: u32) -> Result<Outcome, String> {
    let p = bs_params(m, n)?;
    let mut checks = Vec::new();
    for big_m in 1..=max_power {
        for k in 1..=big_m {
            match conjugation_power_identity(&p, big_m, k) {
                Ok(true) => checks.push(json!({"power": big_m, "steps": k, "holds": true})),
                Ok(false) => {
                    return ok(
                        "counterexample",
                        json!({"power": big_m, "steps": k, "holds": false}),
                    )
                }
                Err(BsError::BudgetExceeded { max_power }) => {
                    return ok(
                        "unknown",
                        json!({
                            "reason": format!(
                                "powers beyond {max_power} are not materialized exactly"
                            ),
                            "verified": checks,
                        }),
                    )
                }
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    ok(
        "verified",
        json!({"count": checks.len(), "checks": checks}),
    )
}

fn do_bs_power_in_n(m: i64, n: i64, big_m: u32, k: u32) -> Result<Outcome, String> {
    let p = bs_params(m, n)?;
    let q = power_in_n_exponent(&p, big_m, k).map_err(|e| e.to_string())?;
    ok(
        "ok",
        json!({"exponent": q.to_string(), "nonzero": q != num_bigint::BigInt::from(0)}),
    )
}

fn do_tc(source: &Source, sub: Option<&str>, budgets: Budgets) -> Result<Outcome, String> {
    let (pres, sub_words) = resolve_presentation(source, sub)?;
    let cap = usize::try_from(budgets.steps).unwrap_or(usize::MAX);
    match todd_coxeter(&pres, &sub_words, cap) {
        CosetEnumeration::Closed(table) => ok(
            "closed",
            json!({
                "index": table.index(),
                "generators": pres.alphabet().names(),
                "table": table_rows(&table),
            }),
        ),
        CosetEnumeration::Overflow { defined } => ok(
            "overflow",
            json!({"defined": defined, "budget": budget_trace(budgets)}),
        ),
    }
}

fn do_rs(source: &Source, sub: Option<&str>, budgets: Budgets) -> Result<Outcome, String> {
    let (pres, sub_words) = resolve_presentation(source, sub)?;
    let cap = usize::try_from(budgets.steps).unwrap_or(usize::MAX);
    match todd_coxeter(&pres, &sub_words, cap) {
        CosetEnumeration::Closed(table) => {
            let sp = reidemeister_schreier(&pres, &table);
            ok(
                "ok",
                json!({
                    "index": table.index(),
                    "generator_count": sp.presentation.num_gens(),
                    "schreier_generators": words_json(pres.alphabet(), &sp.generator_words),
                    "presentation": presentation_json(&sp.presentation),
                    "abelianization": invariants_json(&sp.presentation.abelianization()),
                    "transversal": words_json(pres.alphabet(), &sp.transversal),
                }),
            )
        }
        CosetEnumeration::Overflow { defined } => ok(
            "overflow",
            json!({"defined": defined, "budget": budget_trace(budgets)}),
        ),
    }
}

fn do_homs(source: &Source, degree: usize, budgets: Budgets) -> Result<Outcome, String> {
    let (pres, _) = resolve_presentation(source, None)?;
    let mut en = HomEnumerator::new(&pres, degree, budgets.steps);
    let count = en.by_ref().count();
    if en.budget_exhausted() {
        ok(
            "unknown",
            json!({"count_lower_bound": count, "nodes_visited": en.nodes_visited(), "budget": budget_trace(budgets)}),
        )
    } else {
        ok(
            "ok",
            json!({"degree": degree, "count": count, "nodes_visited": en.nodes_visited()}),
        )
    }
}

fn do_separate(
    source: &Source,
    sub: &str,
    target: &str,
    budgets: Budgets,
) -> Result<Outcome, String> {
    let (pres, _) = resolve_presentation(source, None)?;
    let sub_words = input::parse_word_list(pres.alphabet(), sub)?;
    let target_word = input::parse_over(pres.alphabet(), target)?;
    match separate(&pres, &sub_words, &target_word, budgets.degree, budgets.steps) {
        SeparationOutcome::Separated(s) => {
            let cert = SeparationCertificate {
                degree: s.degree,
                assignment: s.assignment.clone(),
                image_of_target: s.image_of_target.clone(),
                subgroup_order: s.subgroup_order,
            };
            if !cert.verify(&pres, &sub_words, &target_word) {
                return Err(String::from("internal: certificate failed its own re-check"));
            }
            ok(
                "separated",
                json!({
                    "degree": s.degree,
                    "images": assignment_json(&s.assignment),
                    "target_image": s.image_of_target.images(),
                    "subgroup_order": s.subgroup_order,
                    "verified": true,
                }),
            )
        }
        SeparationOutcome::NotFound { budget_exhausted } => {
            if budget_exhausted {
                ok(
                    "unknown",
                    json!({"reason": "node budget exhausted", "budget": budget_trace(budgets)}),
                )
            } else {
                ok(
                    "not-separated",
                    json!({"max_degree": budgets.degree, "note": "no separating quotient up to this degree"}),
                )
            }
        }
    }
}

fn do_wpd(source: &Source, budgets: Budgets) -> Result<Outcome, String> {
    let g = resolve_gog(source)?;
    let candidate = g.wpd_candidate().map_err(|e| e.to_string())?;
    let isometry = match g.classify_isometry(&candidate).map_err(|e| e.to_string())? {
        IsometryType::Hyperbolic => "hyperbolic",
        IsometryType::Elliptic => "elliptic",
    };
    let radius = u32::try_from(budgets.length).unwrap_or(u32::MAX);
    let base = json!({
        "candidate": g.display_element(&candidate),
        "isometry": isometry,
        "radius": radius,
    });
    match g
        .check_relative_wpd(&candidate, radius)
        .map_err(|e| e.to_string())?
    {
        RelativeWpd::Verified { radius } => {
            let mut d = base;
            d["verified_radius"] = json!(radius);
            ok("verified", d)
        }
        RelativeWpd::Counterexample { witness } => {
            let mut d = base;
            d["witness"] = json!(g.display_element(&witness));
            ok("counterexample", d)
        }
        RelativeWpd::Unknown => {
            let mut d = base;
            d["reason"] = json!("kernel membership undecided for a candidate obstruction");
            d["budget"] = budget_trace(budgets);
            ok("unknown", d)
        }
    }
}

/// The cyclic certificate re-check: the generator is nontrivial and every
/// group generator conjugates it to itself or its inverse.
fn kernel_generator_normal(g: &GraphOfGroups, element: &fpgroups_core::graph_of_groups::GogElement) -> Result<bool, String> {
    if g.word_problem(element).map_err(|e| e.to_string())? {
        return Ok(false);
    }
    for gen in 0..g.alphabet().len() {
        let s = g.generator_element(gen).map_err(|e| e.to_string())?;
        let conj = s.inverse().concat(element).concat(&s);
        let fixed = g.equal(&conj, element).map_err(|e| e.to_string())?
            || g.equal(&conj, &element.inverse()).map_err(|e| e.to_string())?;
        if !fixed {
            return Ok(false);
        }
    }
    Ok(true)
}

fn do_kernel(source: &Source) -> Result<Outcome, String> {
    let g = resolve_gog(source)?;
    match g.kernel_of_action() {
        KernelOfAction::Trivial => ok("trivial-kernel", json!({})),
        KernelOfAction::Cyclic {
            base_vector,
            element,
        } => {
            if !kernel_generator_normal(&g, &element)? {
                return Err(String::from(
                    "internal: kernel generator failed its normality re-check",
                ));
            }
            ok(
                "cyclic-kernel",
                json!({
                    "vector": base_vector.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "element": g.display_element(&element),
                    "verified": true,
                }),
            )
        }
        KernelOfAction::Unknown { reason } => {
            let text = match reason {
                KernelUnknownReason::NonUnimodularLoop { edge, m, n } => {
                    format!("loop edge {edge} conjugates with unequal powers {m} and {n}")
                }
                KernelUnknownReason::WholeVertexGroup { rank } => {
                    format!("no edges: the kernel is the whole rank-{rank} vertex group")
                }
            };
            ok("unknown", json!({"reason": text}))
        }
    }
}

fn do_check_class(source: &Source, model: Option<Model>) -> Result<Outcome, String> {
    let model = match resolve_model(source, model.or(infer_model(source, Model::Raag)))? {
        // The class checks live on the splitting for one-relator inputs.
        ModelChoice::Bs(p) => {
            ModelChoice::Gog(GraphOfGroups::bs_one_loop(p.m(), p.n()).map_err(|e| e.to_string())?)
        }
        other => other,
    };
    match model {
        ModelChoice::Raag(r) => {
            let graph = r.graph();
            ok(
                "report",
                json!({
                    "coherent": is_droms_coherent(graph, graph.num_vertices()),
                    "dimension": dimension(graph),
                }),
            )
        }
        ModelChoice::Gog(g) => {
            let loops: Vec<Value> = g
                .unimodular_loop_check()
                .iter()
                .map(|l| {
                    json!({
                        "edge": l.edge,
                        "m": l.m.to_string(),
                        "n": l.n.to_string(),
                        "unimodular": l.unimodular,
                    })
                })
                .collect();
            ok(
                "report",
                json!({
                    "loops": loops,
                    "isolated_edge_groups": g.has_isolated_edge_groups(),
                }),
            )
        }
        ModelChoice::Bs(_) => unreachable!("converted above"),
    }
}

// ----- verify -----

fn check(name: &str, okay: bool) -> Value {
    json!({"check": name, "ok": okay})
}

fn verify_report(path: &str) -> Result<RunReport, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let loaded: RunReport =
        serde_json::from_str(&text).map_err(|e| format!("not a run report: {e}"))?;
    if loaded.command == "verify" {
        return Err(String::from("cannot verify a verify report"));
    }
    let mut checks = Vec::new();
    checks.push(check(
        "inputs-digest",
        report::digest(&loaded.inputs) == loaded.inputs_digest,
    ));
    let inv: Invocation = serde_json::from_value(loaded.inputs.clone())
        .map_err(|e| format!("report inputs do not describe a command: {e}"))?;
    let fresh = execute(&inv, loaded.budgets)?;
    checks.push(check("recompute-verdict", fresh.verdict == loaded.verdict));
    checks.push(check("recompute-details", fresh.details == loaded.details));
    match independent_checks(&inv, &loaded) {
        Ok(extra) => checks.extend(extra),
        Err(e) => {
            checks.push(json!({"check": "certificate", "ok": false, "error": e}));
        }
    }
    let valid = checks
        .iter()
        .all(|c| c["ok"].as_bool().unwrap_or(false));
    Ok(RunReport::new(
        "verify",
        json!({"op": "verify", "command": loaded.command, "of": loaded.inputs}),
        loaded.budgets,
        if valid { "valid" } else { "invalid" },
        json!({"source_command": loaded.command, "checks": checks}),
    ))
}

fn str_at<'v>(v: &'v Value, path: &[&str]) -> Result<&'v str, String> {
    let mut cur = v;
    for p in path {
        cur = &cur[*p];
    }
    cur.as_str()
        .ok_or_else(|| format!("missing field {}", path.join(".")))
}

/// Direct certificate re-checks that do not redo the original search.
fn independent_checks(inv: &Invocation, loaded: &RunReport) -> Result<Vec<Value>, String> {
    let mut out = Vec::new();
    let d = &loaded.details;
    match inv {
        Invocation::Member { source, sub, target } if loaded.verdict == "yes" => {
            let model = resolve_member(source)?;
            let sub_words = member_subgroup(&model, sub.as_deref())?;
            let alphabet = model.model_alphabet();
            let target_word = input::parse_over(&alphabet, target)?;
            let element = input::parse_over(&alphabet, str_at(d, &["witness", "element"])?)?;
            out.push(check(
                "witness-word-problem",
                model.model_word_problem(&target_word.inverse().concat(&element)),
            ));
            let combo = input::parse_over(
                &abstract_names(sub_words.len()),
                str_at(d, &["witness", "combination"])?,
            )?;
            let assembled = substitute(&sub_words, &combo);
            out.push(check(
                "witness-combination",
                model.model_word_problem(&element.inverse().concat(&assembled)),
            ));
        }
        Invocation::Member { source, sub, target } if loaded.verdict == "no" => {
            let model = resolve_member(source)?;
            let sub_words = member_subgroup(&model, sub.as_deref())?;
            let alphabet = model.model_alphabet();
            let target_word = input::parse_over(&alphabet, target)?;
            let degree = d["degree"].as_u64().ok_or("missing degree")? as usize;
            let assignment = assignment_from_json(degree, &d["images"])?;
            let image_of_target = Perm::from_images(from_value(&d["target_image"])?)
                .ok_or("target image is not a permutation")?;
            let cert = SeparationCertificate {
                degree,
                assignment,
                image_of_target,
                subgroup_order: d["subgroup_order"].as_u64().ok_or("missing order")? as usize,
            };
            out.push(check(
                "separation-certificate",
                cert.verify(&model.model_presentation(), &sub_words, &target_word),
            ));
        }
        Invocation::Separate { source, sub, target } if loaded.verdict == "separated" => {
            let (pres, _) = resolve_presentation(source, None)?;
            let sub_words = input::parse_word_list(pres.alphabet(), sub)?;
            let target_word = input::parse_over(pres.alphabet(), target)?;
            let degree = d["degree"].as_u64().ok_or("missing degree")? as usize;
            let cert = SeparationCertificate {
                degree,
                assignment: assignment_from_json(degree, &d["images"])?,
                image_of_target: Perm::from_images(from_value(&d["target_image"])?)
                    .ok_or("target image is not a permutation")?,
                subgroup_order: d["subgroup_order"].as_u64().ok_or("missing order")? as usize,
            };
            out.push(check(
                "separation-certificate",
                cert.verify(&pres, &sub_words, &target_word),
            ));
        }
        Invocation::Tc { source, sub } if loaded.verdict == "closed" => {
            let (pres, sub_words) = resolve_presentation(source, sub.as_deref())?;
            let rows: Vec<Vec<usize>> = from_value(&d["table"])?;
            let stated = d["index"].as_u64().ok_or("missing index")? as usize;
            let okay = CosetTable::from_entries(pres.num_gens(), rows)
                .map(|t| t.index() == stated && t.validate(&pres, &sub_words))
                .unwrap_or(false);
            out.push(check("coset-table", okay));
        }
        Invocation::Fiber { source, side } if loaded.verdict == "found" => {
            let (ambient, input_set) = resolve_subdirect(source)?;
            let side = if *side == 1 { Side::First } else { Side::Second };
            let on = ambient.factor(side);
            let off = ambient.factor(side.other());
            let names = input_set.abstract_alphabet();
            let mut okay = true;
            for w in d["witnesses"].as_array().ok_or("missing witnesses")? {
                let abs = input::parse_over(&names, str_at(w, &["abstract"])?)?;
                let pair = input_set.project_pair(&abs).map_err(|e| e.to_string())?;
                okay &= off.word_problem(pair.coordinate(side.other()))
                    && !on.word_problem(pair.coordinate(side));
            }
            out.push(check("fiber-witnesses", okay));
        }
        Invocation::MultiConj { source, pairs } if loaded.verdict == "yes" => {
            let r = resolve_raag(source)?;
            let g = input::parse_over(r.alphabet(), str_at(d, &["witness"])?)?;
            let okay = pairs.iter().try_fold(true, |acc, (u, v)| {
                let uw = input::parse_over(r.alphabet(), u)?;
                let vw = input::parse_over(r.alphabet(), v)?;
                Ok::<bool, String>(acc && r.equal(&g.conjugate(&uw), &vw))
            })?;
            out.push(check("conjugator-witness", okay));
        }
        Invocation::KernelOfAction { source } if loaded.verdict == "cyclic-kernel" => {
            let g = resolve_gog(source)?;
            let okay = match g.kernel_of_action() {
                KernelOfAction::Cyclic { element, .. } => kernel_generator_normal(&g, &element)?,
                _ => false,
            };
            out.push(check("kernel-normality", okay));
        }
        Invocation::Wpd { source } if loaded.verdict == "verified" => {
            let g = resolve_gog(source)?;
            let candidate = g.wpd_candidate().map_err(|e| e.to_string())?;
            let radius = d["verified_radius"].as_u64().ok_or("missing radius")? as u32;
            let hyperbolic = matches!(
                g.classify_isometry(&candidate).map_err(|e| e.to_string())?,
                IsometryType::Hyperbolic
            );
            let verified = matches!(
                g.check_relative_wpd(&candidate, radius)
                    .map_err(|e| e.to_string())?,
                RelativeWpd::Verified { .. }
            );
            out.push(check("wpd-candidate", hyperbolic && verified));
        }
        _ => {}
    }
    Ok(out)
}
