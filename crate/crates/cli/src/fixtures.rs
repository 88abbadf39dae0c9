//! Built-in example inputs, addressable by name from every subcommand.

use fpgroups_core::baumslag_solitar::BsParams;
use fpgroups_core::graph_of_groups::GraphOfGroups;
use fpgroups_core::quotients::FinitePresentation;
use fpgroups_core::raag::RaagPresentation;
use fpgroups_core::subdirect::{AmbientProduct, Factor, PairWord, SubdirectInput};
use fpgroups_core::words::Word;

pub enum Fixture {
    Raag(RaagPresentation),
    Gog(GraphOfGroups),
    Bs(BsParams),
    /// A presentation with a distinguished subgroup generating set.
    Subgroup {
        presentation: FinitePresentation,
        subgroup: Vec<Word>,
    },
    Product {
        ambient: Box<AmbientProduct>,
        input: SubdirectInput,
    },
}

pub const NAMES: &[&str] = &[
    "P4",
    "F2",
    "Z",
    "Z2",
    "P4_SPLITTING",
    "TUBULAR",
    "BS(m,n)",
    "droms_index2",
    "diagonal_p4",
    "bb_kernel_p4xp4",
    "miller_free_index",
    "zkernel_p4xp4",
    "full_product_p4xp4",
];

fn pairs(ambient: &AmbientProduct, specs: &[(&str, &str)]) -> Result<Vec<PairWord>, String> {
    specs
        .iter()
        .map(|(f, s)| {
            let first = ambient
                .factor(fpgroups_core::subdirect::Side::First)
                .alphabet()
                .parse_word(f)
                .map_err(|e| e.to_string())?;
            let second = ambient
                .factor(fpgroups_core::subdirect::Side::Second)
                .alphabet()
                .parse_word(s)
                .map_err(|e| e.to_string())?;
            Ok(PairWord::new(first, second))
        })
        .collect()
}

fn product(
    first: Factor,
    second: Factor,
    generator_pairs: &[(&str, &str)],
) -> Result<Fixture, String> {
    let ambient = AmbientProduct::new(first, second).map_err(|e| e.to_string())?;
    let generators = pairs(&ambient, generator_pairs)?;
    let input = SubdirectInput::new(generators).map_err(|e| e.to_string())?;
    Ok(Fixture::Product {
        ambient: Box::new(ambient),
        input,
    })
}

fn p4_squared(generator_pairs: &[(&str, &str)]) -> Result<Fixture, String> {
    product(
        Factor::Raag(RaagPresentation::p4()),
        Factor::Raag(RaagPresentation::p4()),
        generator_pairs,
    )
}

/// Accepts `BS(m,n)` with integer parameters.
fn parse_bs(name: &str) -> Option<(i64, i64)> {
    let inner = name.strip_prefix("BS(")?.strip_suffix(')')?;
    let (m, n) = inner.split_once(',')?;
    Some((m.trim().parse().ok()?, n.trim().parse().ok()?))
}

pub fn lookup(name: &str) -> Result<Fixture, String> {
    if let Some((m, n)) = parse_bs(name) {
        return Ok(Fixture::Bs(
            BsParams::new(m, n).map_err(|e| format!("bad parameters in {name}: {e}"))?,
        ));
    }
    match name {
        "P4" => Ok(Fixture::Raag(RaagPresentation::p4())),
        "F2" => Ok(Fixture::Raag(RaagPresentation::free(&["a", "b"]))),
        "Z" => Ok(Fixture::Raag(RaagPresentation::free(&["a"]))),
        "Z2" => Ok(Fixture::Raag(RaagPresentation::free_abelian(&["a", "b"]))),
        "P4_SPLITTING" => Ok(Fixture::Gog(GraphOfGroups::p4_splitting())),
        "TUBULAR" => Ok(Fixture::Gog(GraphOfGroups::tubular_loop())),
        "droms_index2" => {
            let presentation = RaagPresentation::p4().presentation();
            let subgroup = ["a^2", "a b", "a c", "a d"]
                .iter()
                .map(|s| presentation.alphabet().parse_word(s).unwrap())
                .collect();
            Ok(Fixture::Subgroup {
                presentation,
                subgroup,
            })
        }
        "diagonal_p4" => p4_squared(&[("a", "a"), ("b", "b"), ("c", "c"), ("d", "d")]),
        // Kernel of f(a)=f(b)=f(d)=1, f(c)=0 summed over both coordinates.
        "bb_kernel_p4xp4" => p4_squared(&[
            ("c", "1"),
            ("a", "a^-1"),
            ("b", "b^-1"),
            ("d", "d^-1"),
            ("a b^-1", "1"),
        ]),
        // L1 x L2 inside F2 x F2 with both fibers cyclic free factors.
        "miller_free_index" => product(
            Factor::Raag(RaagPresentation::free(&["a", "b"])),
            Factor::Raag(RaagPresentation::free(&["a", "b"])),
            &[("a", "1"), ("1", "a")],
        ),
        // Kernel of the exponent-sum map to Z on both coordinates jointly.
        "zkernel_p4xp4" => p4_squared(&[
            ("a", "a"),
            ("b", "b"),
            ("c", "c"),
            ("d", "d"),
            ("a b^-1", "1"),
            ("b c^-1", "1"),
            ("c d^-1", "1"),
            ("1", "a b^-1"),
            ("1", "b c^-1"),
            ("1", "c d^-1"),
        ]),
        "full_product_p4xp4" => p4_squared(&[
            ("a", "1"),
            ("b", "1"),
            ("c", "1"),
            ("d", "1"),
            ("1", "a"),
            ("1", "b"),
            ("1", "c"),
            ("1", "d"),
        ]),
        _ => Err(format!(
            "unknown fixture {name:?}; available: {}",
            NAMES.join(", ")
        )),
    }
}
