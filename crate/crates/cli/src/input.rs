//! File-based inputs: defining graphs, graph-of-groups data, presentations,
//! and subdirect generating sets, all as JSON.

use fpgroups_core::graph_of_groups::{EdgeSpec, GraphOfGroups, VertexSpec};
use fpgroups_core::quotients::FinitePresentation;
use fpgroups_core::raag::{RaagPresentation, SimplicialGraph};
use fpgroups_core::subdirect::{AmbientProduct, Factor, PairWord, SubdirectInput};
use fpgroups_core::words::{GenAlphabet, Word};
use num_bigint::BigInt;
use serde::Deserialize;

#[derive(Deserialize)]
pub struct RaagDto {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
}

#[derive(Deserialize)]
pub struct GogVertexDto {
    pub name: String,
    pub rank: usize,
}

#[derive(Deserialize)]
pub struct GogEdgeDto {
    pub tail: usize,
    pub head: usize,
    pub attach_tail: Vec<i64>,
    pub attach_head: Vec<i64>,
    pub tree: bool,
}

#[derive(Deserialize)]
pub struct GogDto {
    pub vertices: Vec<GogVertexDto>,
    pub edges: Vec<GogEdgeDto>,
}

#[derive(Deserialize)]
pub struct PresentationDto {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorDto {
    Raag(RaagDto),
    Gog(GogDto),
    Bs([i64; 2]),
}

#[derive(Deserialize)]
pub struct AmbientDto {
    pub first: FactorDto,
    pub second: FactorDto,
}

#[derive(Deserialize)]
pub struct SubdirectDto {
    pub ambient: AmbientDto,
    pub generators: Vec<(String, String)>,
}

pub fn raag_from_dto(dto: &RaagDto) -> Result<RaagPresentation, String> {
    let alphabet =
        GenAlphabet::new(dto.vertices.iter().cloned()).map_err(|e| e.to_string())?;
    let index = |name: &String| {
        alphabet
            .index_of(name)
            .ok_or_else(|| format!("edge endpoint {name:?} is not a vertex"))
    };
    let edges: Vec<(usize, usize)> = dto
        .edges
        .iter()
        .map(|(a, b)| Ok((index(a)?, index(b)?)))
        .collect::<Result<_, String>>()?;
    let graph =
        SimplicialGraph::new(dto.vertices.len(), edges).map_err(|e| e.to_string())?;
    RaagPresentation::new(graph, alphabet).map_err(|e| e.to_string())
}

pub fn gog_from_dto(dto: &GogDto) -> Result<GraphOfGroups, String> {
    let vertices = dto
        .vertices
        .iter()
        .map(|v| VertexSpec {
            name: v.name.clone(),
            rank: v.rank,
        })
        .collect();
    let edges = dto
        .edges
        .iter()
        .map(|e| EdgeSpec {
            tail: e.tail,
            head: e.head,
            attach_tail: e.attach_tail.iter().map(|&c| BigInt::from(c)).collect(),
            attach_head: e.attach_head.iter().map(|&c| BigInt::from(c)).collect(),
            tree: e.tree,
        })
        .collect();
    GraphOfGroups::new(vertices, edges).map_err(|e| e.to_string())
}

pub fn presentation_from_dto(dto: &PresentationDto) -> Result<FinitePresentation, String> {
    let alphabet =
        GenAlphabet::new(dto.generators.iter().cloned()).map_err(|e| e.to_string())?;
    let relators: Vec<Word> = dto
        .relators
        .iter()
        .map(|r| alphabet.parse_word(r).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    FinitePresentation::new(alphabet, relators).map_err(|e| e.to_string())
}

fn factor_from_dto(dto: &FactorDto) -> Result<Factor, String> {
    match dto {
        FactorDto::Raag(r) => Ok(Factor::Raag(raag_from_dto(r)?)),
        FactorDto::Gog(g) => Ok(Factor::Gog(gog_from_dto(g)?)),
        FactorDto::Bs([m, n]) => Ok(Factor::Gog(
            GraphOfGroups::bs_one_loop(*m, *n).map_err(|e| e.to_string())?,
        )),
    }
}

pub fn subdirect_from_dto(
    dto: &SubdirectDto,
) -> Result<(AmbientProduct, SubdirectInput), String> {
    let ambient = AmbientProduct::new(
        factor_from_dto(&dto.ambient.first)?,
        factor_from_dto(&dto.ambient.second)?,
    )
    .map_err(|e| e.to_string())?;
    let generators: Vec<PairWord> = dto
        .generators
        .iter()
        .map(|(f, s)| {
            Ok(PairWord::new(
                parse_over(
                    ambient.factor(fpgroups_core::subdirect::Side::First).alphabet(),
                    f,
                )?,
                parse_over(
                    ambient.factor(fpgroups_core::subdirect::Side::Second).alphabet(),
                    s,
                )?,
            ))
        })
        .collect::<Result<_, String>>()?;
    let input = SubdirectInput::new(generators).map_err(|e| e.to_string())?;
    Ok((ambient, input))
}

pub fn parse_over(alphabet: &GenAlphabet, text: &str) -> Result<Word, String> {
    alphabet
        .parse_word(text)
        .map_err(|e| format!("cannot parse {text:?}: {e}"))
}

/// Comma-separated list of words.
pub fn parse_word_list(alphabet: &GenAlphabet, text: &str) -> Result<Vec<Word>, String> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|w| parse_over(alphabet, w.trim())).collect()
}

/// XiWord serialization: `[[index, sign], ...]` with sign in {1, -1}.
pub fn parse_xi_word(text: &str) -> Result<fpgroups_core::baumslag_solitar::XiWord, String> {
    let raw: Vec<(i64, i64)> =
        serde_json::from_str(text).map_err(|e| format!("bad factor list: {e}"))?;
    let factors = raw
        .into_iter()
        .map(|(i, s)| match s {
            1 => Ok((i, fpgroups_core::words::Sign::Plus)),
            -1 => Ok((i, fpgroups_core::words::Sign::Minus)),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(fpgroups_core::baumslag_solitar::XiWord::new(factors))
}

pub fn load_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("cannot parse {path}: {e}"))
}
