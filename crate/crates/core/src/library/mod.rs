//! Bundled systems: rules, constant typings, rule evidence, totality
//! attestations and demo terms.
//!
//! Each bundle lives in `assets/v1/<name>/`:
//!
//! ```text
//! system.rwl         signature and rules
//! delta.types        closed types of the constants
//! evidence.src.json  annotated sources for rule evidence and demos
//! evidence.json      generated derivations for every rule
//! demos.json         generated demo derivations
//! attest.json        totality attestation per constant
//! ```

mod probe;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::rewrite::{load_system, RewriteSystem, RwlError};
use crate::syntax::{parse_term, SyntaxError, Term};
use crate::typesystem::{
    abstract_over_vars, derive, evidence_from_json, parse_type, BuildError, ConstTyping, Derivation,
    DerivationFormatError, RuleEvidence, TotalityAttestation, TypingError,
};

pub use probe::{probe_totality, sample_values, ProbeOutcome, ProbeSample, SampleSpec, TotalityProbeReport};

pub const ASSETS_ENV: &str = "APPLIED_LAMBDA_ASSETS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BundleName {
    Core,
    Rec,
    Mbr,
    Bbc,
    Open,
}

impl BundleName {
    pub const ALL: [BundleName; 5] = [
        BundleName::Core,
        BundleName::Rec,
        BundleName::Mbr,
        BundleName::Bbc,
        BundleName::Open,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BundleName::Core => "core",
            BundleName::Rec => "rec",
            BundleName::Mbr => "mbr",
            BundleName::Bbc => "bbc",
            BundleName::Open => "open",
        }
    }
}

impl fmt::Display for BundleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BundleName {
    type Err = LibraryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BundleName::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| LibraryError::UnknownBundle(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("unknown bundle `{0}` (expected one of core, rec, mbr, bbc, open)")]
    UnknownBundle(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}: {source}")]
    Rwl { file: &'static str, source: RwlError },
    #[error("{file}: {source}")]
    Typing { file: &'static str, source: TypingError },
    #[error("{file}: {source}")]
    Json {
        file: &'static str,
        source: serde_json::Error,
    },
    #[error("{file}: {source}")]
    Format {
        file: &'static str,
        source: DerivationFormatError,
    },
    #[error("{file}: {source}")]
    Build { file: &'static str, source: BuildError },
    #[error("{file}: {source}")]
    Syntax { file: &'static str, source: SyntaxError },
    #[error("{file}: {message}")]
    Invalid { file: &'static str, message: String },
}

/// A closed demo term with its derivation and expected normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demo {
    pub name: String,
    pub term: Term,
    pub expected: Term,
    pub derivation: Derivation,
}

#[derive(Clone, Debug)]
pub struct BundledSystem {
    pub name: String,
    pub system: RewriteSystem,
    pub delta: ConstTyping,
    pub evidence: Vec<RuleEvidence>,
    pub attestation: TotalityAttestation,
    pub demos: Vec<Demo>,
}

impl BundledSystem {
    pub fn demo(&self, name: &str) -> Option<&Demo> {
        self.demos.iter().find(|d| d.name == name)
    }

    /// The first demo; every bundle ships at least one.
    pub fn main_demo(&self) -> &Demo {
        &self.demos[0]
    }
}

/// The raw file contents of a bundle.
#[derive(Clone, Debug)]
pub struct BundleTexts {
    pub system: String,
    pub delta: String,
    pub evidence_src: String,
    pub evidence: String,
    pub demos: String,
    pub attest: String,
}

macro_rules! embedded {
    ($dir:literal) => {
        [
            include_str!(concat!("../../assets/v1/", $dir, "/system.rwl")),
            include_str!(concat!("../../assets/v1/", $dir, "/delta.types")),
            include_str!(concat!("../../assets/v1/", $dir, "/evidence.src.json")),
            include_str!(concat!("../../assets/v1/", $dir, "/evidence.json")),
            include_str!(concat!("../../assets/v1/", $dir, "/demos.json")),
            include_str!(concat!("../../assets/v1/", $dir, "/attest.json")),
        ]
    };
}

fn embedded_texts(name: BundleName) -> BundleTexts {
    let [system, delta, evidence_src, evidence, demos, attest] = match name {
        BundleName::Core => embedded!("core"),
        BundleName::Rec => embedded!("rec"),
        BundleName::Mbr => embedded!("mbr"),
        BundleName::Bbc => embedded!("bbc"),
        BundleName::Open => embedded!("open"),
    };
    BundleTexts {
        system: system.into(),
        delta: delta.into(),
        evidence_src: evidence_src.into(),
        evidence: evidence.into(),
        demos: demos.into(),
        attest: attest.into(),
    }
}

/// The asset directory shipped with the crate.
pub fn default_assets_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("assets").join("v1")
}

/// Reads the files of a bundle directory.
pub fn read_bundle_texts(dir: &Path) -> Result<BundleTexts, LibraryError> {
    let read = |f: &str| {
        let path = dir.join(f);
        std::fs::read_to_string(&path).map_err(|source| LibraryError::Io { path, source })
    };
    Ok(BundleTexts {
        system: read("system.rwl")?,
        delta: read("delta.types")?,
        evidence_src: read("evidence.src.json")?,
        evidence: read("evidence.json")?,
        demos: read("demos.json")?,
        attest: read("attest.json")?,
    })
}

pub fn load_bundle(name: &str, dir: &Path) -> Result<BundledSystem, LibraryError> {
    bundle_from_texts(name, &read_bundle_texts(dir)?)
}

/// A bundle by name, from `$APPLIED_LAMBDA_ASSETS/<name>` when the variable
/// is set and from the embedded assets otherwise.
pub fn resolve_bundle(name: BundleName) -> Result<BundledSystem, LibraryError> {
    match std::env::var_os(ASSETS_ENV) {
        Some(dir) => load_bundle(name.as_str(), &Path::new(&dir).join(name.as_str())),
        None => Ok(bundle(name).clone()),
    }
}

/// The embedded bundle; panics only if the shipped assets are broken.
pub fn bundle(name: BundleName) -> &'static BundledSystem {
    static CELLS: [OnceLock<BundledSystem>; 5] = [const { OnceLock::new() }; 5];
    let i = BundleName::ALL.iter().position(|b| *b == name).expect("listed");
    CELLS[i].get_or_init(|| {
        bundle_from_texts(name.as_str(), &embedded_texts(name))
            .unwrap_or_else(|e| panic!("embedded bundle `{name}` is broken: {e}"))
    })
}

pub fn builtin_systems() -> Vec<&'static BundledSystem> {
    BundleName::ALL.into_iter().map(bundle).collect()
}

pub fn embedded_bundle_texts(name: BundleName) -> BundleTexts {
    embedded_texts(name)
}

fn parse_json(file: &'static str, text: &str) -> Result<Json, LibraryError> {
    serde_json::from_str(text).map_err(|source| LibraryError::Json { file, source })
}

pub fn bundle_from_texts(name: &str, texts: &BundleTexts) -> Result<BundledSystem, LibraryError> {
    let system = load_system(&texts.system).map_err(|source| LibraryError::Rwl {
        file: "system.rwl",
        source,
    })?;
    let delta = ConstTyping::parse(&texts.delta).map_err(|source| LibraryError::Typing {
        file: "delta.types",
        source,
    })?;
    let sig = system.signature();
    let evidence = evidence_from_json(&parse_json("evidence.json", &texts.evidence)?, sig).map_err(|source| {
        LibraryError::Format {
            file: "evidence.json",
            source,
        }
    })?;
    let attestation: TotalityAttestation =
        serde_json::from_str(&texts.attest).map_err(|source| LibraryError::Json {
            file: "attest.json",
            source,
        })?;
    let demos_json = parse_json("demos.json", &texts.demos)?;
    let invalid = |message: String| LibraryError::Invalid {
        file: "demos.json",
        message,
    };
    let mut demos = Vec::new();
    for d in demos_json
        .as_array()
        .ok_or_else(|| invalid("expected an array".into()))?
    {
        let field = |k: &str| {
            d.get(k)
                .and_then(Json::as_str)
                .ok_or_else(|| invalid(format!("missing string field `{k}`")))
        };
        let expected = parse_term(field("expected")?, sig).map_err(|source| LibraryError::Syntax {
            file: "demos.json",
            source,
        })?;
        let derivation = Derivation::from_json(
            d.get("derivation")
                .ok_or_else(|| invalid("missing `derivation`".into()))?,
            sig,
        )
        .map_err(|source| LibraryError::Format {
            file: "demos.json",
            source,
        })?;
        demos.push(Demo {
            name: field("name")?.to_string(),
            term: derivation.term.clone(),
            expected,
            derivation,
        });
    }
    if demos.is_empty() {
        return Err(invalid("a bundle needs at least one demo".into()));
    }
    Ok(BundledSystem {
        name: name.to_string(),
        system,
        delta,
        evidence,
        attestation,
        demos,
    })
}

/// Builds `evidence.json` and `demos.json` from the annotated sources.
pub fn generate_assets(texts: &BundleTexts) -> Result<(String, String), LibraryError> {
    const SRC: &str = "evidence.src.json";
    let system = load_system(&texts.system).map_err(|source| LibraryError::Rwl {
        file: "system.rwl",
        source,
    })?;
    let delta = ConstTyping::parse(&texts.delta).map_err(|source| LibraryError::Typing {
        file: "delta.types",
        source,
    })?;
    let sig = system.signature();
    let src = parse_json(SRC, &texts.evidence_src)?;
    let invalid = |message: String| LibraryError::Invalid { file: SRC, message };
    let str_field = |v: &Json, k: &str| -> Result<String, LibraryError> {
        v.get(k)
            .and_then(Json::as_str)
            .map(str::to_string)
            .ok_or_else(|| invalid(format!("missing string field `{k}`")))
    };
    let build = |text: &str| derive(&delta, sig, text).map_err(|source| LibraryError::Build { file: SRC, source });

    let mut evidence = Vec::new();
    for e in src["evidence"]
        .as_array()
        .ok_or_else(|| invalid("`evidence` must be an array".into()))?
    {
        let ty = parse_type(&str_field(e, "type")?).map_err(|source| LibraryError::Syntax { file: SRC, source })?;
        let lhs = build(&str_field(e, "lhs")?)?;
        let rhs = build(&str_field(e, "rhs")?)?;
        let rule = system
            .rules()
            .iter()
            .find(|r| abstract_over_vars(r, r.lhs()) == lhs.term)
            .ok_or_else(|| invalid(format!("`{}` is not the abstracted left side of any rule", lhs.term)))?;
        evidence.push(RuleEvidence { ty, lhs, rhs }.to_json(Some(rule)));
    }
    let mut demos = Vec::new();
    for d in src["demos"]
        .as_array()
        .ok_or_else(|| invalid("`demos` must be an array".into()))?
    {
        let derivation = build(&str_field(d, "term")?)?;
        demos.push(json!({
            "name": str_field(d, "name")?,
            "expected": str_field(d, "expected")?,
            "derivation": derivation.to_json(),
        }));
    }
    let pretty = |v: Json| serde_json::to_string_pretty(&v).expect("serialisable") + "\n";
    Ok((pretty(Json::Array(evidence)), pretty(Json::Array(demos))))
}

/// `b` extended by `omega x -> omega x` at type `nat -> nat`, with matching
/// rule evidence and no totality attestation for `omega`.
pub fn with_looping_constant(b: &BundledSystem) -> BundledSystem {
    let text = format!("const omega/1;\n{}\nomega x -> omega x;\n", b.system.to_rwl());
    let system = load_system(&text).expect("adding a fresh constant keeps the system valid");
    let mut delta = b.delta.clone();
    delta
        .insert("omega", parse_type("nat -> nat").expect("type"))
        .expect("closed");
    let mut evidence = b.evidence.clone();
    let side = |text: &str| derive(&delta, system.signature(), text).expect("omega evidence derives");
    evidence.push(RuleEvidence {
        ty: parse_type("nat -> nat").expect("type"),
        lhs: side("\\x:nat. omega x"),
        rhs: side("\\x:nat. omega x"),
    });
    BundledSystem {
        name: format!("{}+omega", b.name),
        system,
        delta,
        evidence,
        attestation: b.attestation.clone(),
        demos: b.demos.clone(),
    }
}
