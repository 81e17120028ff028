//! Sequence assembly: discretization, token formatting, vocabulary
//! management, and the encode/decode maps between molecules and token
//! sequences.
//!
//! A molecule encodes as an optional property token followed by one
//! `(element, distance, theta°, phi°)` quadruple per atom in canonical order,
//! terminated by `<eos>`. Numbers are fixed-decimal with half-away-from-zero
//! rounding; angle tokens carry a `°` suffix and are radians.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::canon::{order_strategy, OrderStrategy};
use crate::element;
use crate::geom::{self, SphericalRecord};
use crate::math;
use crate::molgraph::{infer_bonds, BondTable, Molecule3D};
use crate::vec3::Vec3;

pub const BOS_ID: u32 = 0;
pub const EOS_ID: u32 = 1;
pub const PAD_ID: u32 = 2;
pub const UNK_ID: u32 = 3;
pub const SPECIAL_TOKENS: [&str; 4] = ["<bos>", "<eos>", "<pad>", "<unk>"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Element,
    Distance,
    Theta,
    Phi,
    Property,
    Special,
}

impl core::fmt::Display for TokenKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            TokenKind::Element => "element",
            TokenKind::Distance => "distance",
            TokenKind::Theta => "theta",
            TokenKind::Phi => "phi",
            TokenKind::Property => "property",
            TokenKind::Special => "special",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>) -> Self {
        Token {
            kind,
            text: text.into(),
        }
    }

    pub fn eos() -> Self {
        Token::new(TokenKind::Special, SPECIAL_TOKENS[EOS_ID as usize])
    }

    pub fn is_eos(&self) -> bool {
        self.kind == TokenKind::Special && self.text == SPECIAL_TOKENS[EOS_ID as usize]
    }
}

/// Whole real numbers as single tokens, or integer part / "." / fraction part
/// as separate tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TokenizeMode {
    #[default]
    Whole,
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown tokenize mode `{0}` (expected whole or split)")]
pub struct UnknownMode(pub String);

impl core::str::FromStr for TokenizeMode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "whole" => Ok(TokenizeMode::Whole),
            "split" => Ok(TokenizeMode::Split),
            other => Err(UnknownMode(String::from(other))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodecError {
    #[error("token {position}: expected {expected}, found {found} `{text}`")]
    WrongKind {
        position: usize,
        expected: TokenKind,
        found: TokenKind,
        text: String,
    },
    #[error("token {position}: `{text}` is not a valid {expected} value")]
    BadValue {
        position: usize,
        expected: TokenKind,
        text: String,
    },
    #[error("token {position}: {which} = {value} out of range")]
    ValueOutOfRange {
        position: usize,
        which: &'static str,
        value: f64,
    },
    #[error("token {position}: unknown element `{symbol}`")]
    UnknownElement { position: usize, symbol: String },
    #[error("token {position}: `<unk>` is rejected by strict decoding")]
    UnknownToken { position: usize },
    #[error("sequence ends at token {position}: expected {expected}")]
    Truncated {
        position: usize,
        expected: TokenKind,
    },
    #[error("sequence has no atoms")]
    EmptySequence,
    #[error("atomic number {0} has no element symbol")]
    NoSymbol(u8),
    #[error("unparseable number `{0}`")]
    Unparseable(String),
    #[error("vocabulary cap exceeded: {distinct} distinct tokens + {specials} specials > cap {cap} (overflow {overflow})")]
    CapExceeded {
        distinct: usize,
        specials: usize,
        cap: usize,
        overflow: usize,
    },
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("malformed vocabulary: {0}")]
    BadVocabulary(String),
}

/// Rounds half away from zero at `decimals` places and renders with fixed
/// decimals (trailing zeros kept, no leading `+`, never `-0.00`).
pub fn format_fixed(value: f64, decimals: u32) -> String {
    let scaled = value * math::pow10(decimals);
    let rounded = if scaled >= 0.0 {
        math::floor(scaled + 0.5)
    } else {
        math::ceil(scaled - 0.5)
    };
    let r = rounded as i64;
    let base = 10i64.pow(decimals);
    let sign = if r < 0 { "-" } else { "" };
    format!(
        "{sign}{}.{:0width$}",
        (r / base).abs(),
        (r % base).abs(),
        width = decimals as usize
    )
}

/// Parses a fixed-decimal token, stripping a trailing `°` if present.
/// Returns the value and its decimal count.
pub fn parse_fixed(text: &str) -> Result<(f64, u32), CodecError> {
    let number = text.strip_suffix('°').unwrap_or(text);
    let value: f64 = number
        .parse()
        .map_err(|_| CodecError::Unparseable(text.to_string()))?;
    if !value.is_finite() {
        return Err(CodecError::Unparseable(text.to_string()));
    }
    let decimals = number
        .split_once('.')
        .map_or(0, |(_, frac)| frac.len() as u32);
    Ok((value, decimals))
}

/// Splits a formatted number per the tokenize mode: `whole` keeps it intact,
/// `split` yields integer part, ".", and fraction part (any `°` suffix stays
/// on the fraction).
pub fn tokenize_mode(value: &str, mode: TokenizeMode) -> Result<Vec<String>, CodecError> {
    parse_fixed(value)?;
    match mode {
        TokenizeMode::Whole => Ok(alloc::vec![value.to_string()]),
        TokenizeMode::Split => match value.split_once('.') {
            Some((int, frac)) => Ok(alloc::vec![
                int.to_string(),
                ".".to_string(),
                frac.to_string()
            ]),
            None => Ok(alloc::vec![value.to_string()]),
        },
    }
}

/// Settings for [`encode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncodeConfig {
    /// Decimal places for distance tokens (b_d).
    pub decimals_dist: u32,
    /// Decimal places for angle tokens (b_a).
    pub decimals_angle: u32,
    pub strategy: OrderStrategy,
    /// Seed for the `random` ordering strategy.
    pub seed: u64,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        EncodeConfig {
            decimals_dist: 2,
            decimals_angle: 2,
            strategy: OrderStrategy::CanonicalLocality,
            seed: 0,
        }
    }
}

/// `(atomic number, d, theta, phi, theta decimals)` of one parsed quadruple.
type ParsedAtom = (u8, f64, f64, f64, u32);

/// A token stream in grammar order: optional property token, then repeating
/// (element, distance, theta, phi) quadruples, terminated by `<eos>`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn from_tokens(tokens: Vec<Token>) -> Self {
        TokenSequence { tokens }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Number of atom quadruples, assuming a valid grammar.
    pub fn atom_count(&self) -> usize {
        let content = self
            .tokens
            .iter()
            .filter(|t| !matches!(t.kind, TokenKind::Property | TokenKind::Special));
        content.count() / 4
    }

    /// The leading property token text, if any.
    pub fn property(&self) -> Option<&str> {
        self.tokens
            .first()
            .filter(|t| t.kind == TokenKind::Property)
            .map(|t| t.text.as_str())
    }

    /// Prefixes a property token (replacing any existing one).
    pub fn with_property(mut self, token: Token) -> Self {
        debug_assert_eq!(token.kind, TokenKind::Property);
        if self.property().is_some() {
            self.tokens[0] = token;
        } else {
            self.tokens.insert(0, token);
        }
        self
    }

    /// Grammar check: kinds in order, values parseable for their kind,
    /// terminal `<eos>`, strict rejection of `<unk>`.
    pub fn validate(&self) -> Result<(), CodecError> {
        self.parse_atoms().map(|_| ())
    }

    /// Parses the quadruples as `(atomic number, d, theta, phi, theta
    /// decimals)` tuples after a full grammar check.
    fn parse_atoms(&self) -> Result<Vec<ParsedAtom>, CodecError> {
        let mut atoms = Vec::new();
        let mut pos = usize::from(self.property().is_some());
        loop {
            let tok = self.tokens.get(pos).ok_or(CodecError::Truncated {
                position: pos,
                expected: if atoms.is_empty() {
                    TokenKind::Element
                } else {
                    TokenKind::Special
                },
            })?;
            if tok.is_eos() {
                if atoms.is_empty() {
                    return Err(CodecError::EmptySequence);
                }
                if pos + 1 != self.tokens.len() {
                    let t = &self.tokens[pos + 1];
                    return Err(CodecError::WrongKind {
                        position: pos + 1,
                        expected: TokenKind::Special,
                        found: t.kind,
                        text: t.text.clone(),
                    });
                }
                return Ok(atoms);
            }
            atoms.push(self.parse_quadruple(pos)?);
            pos += 4;
        }
    }

    fn expect_kind(&self, pos: usize, expected: TokenKind) -> Result<&Token, CodecError> {
        let tok = self.tokens.get(pos).ok_or(CodecError::Truncated {
            position: pos,
            expected,
        })?;
        if tok.text == SPECIAL_TOKENS[UNK_ID as usize] {
            return Err(CodecError::UnknownToken { position: pos });
        }
        if tok.kind != expected {
            return Err(CodecError::WrongKind {
                position: pos,
                expected,
                found: tok.kind,
                text: tok.text.clone(),
            });
        }
        Ok(tok)
    }

    /// Numeric token in its kind's surface form: angles carry the `°` suffix,
    /// distances never do.
    fn expect_number(&self, pos: usize, expected: TokenKind) -> Result<(f64, u32), CodecError> {
        let tok = self.expect_kind(pos, expected)?;
        let bad = || CodecError::BadValue {
            position: pos,
            expected,
            text: tok.text.clone(),
        };
        let wants_degree = matches!(expected, TokenKind::Theta | TokenKind::Phi);
        if tok.text.ends_with('°') != wants_degree {
            return Err(bad());
        }
        parse_fixed(&tok.text).map_err(|_| bad())
    }

    fn parse_quadruple(&self, pos: usize) -> Result<ParsedAtom, CodecError> {
        let el = self.expect_kind(pos, TokenKind::Element)?;
        let z = element::atomic_number(&el.text).ok_or_else(|| CodecError::UnknownElement {
            position: pos,
            symbol: el.text.clone(),
        })?;
        let (d, _) = self.expect_number(pos + 1, TokenKind::Distance)?;
        let (theta, th_dec) = self.expect_number(pos + 2, TokenKind::Theta)?;
        let (phi, _) = self.expect_number(pos + 3, TokenKind::Phi)?;
        Ok((z, d, theta, phi, th_dec))
    }

    /// Token texts with numeric tokens expanded per the mode. The trailing
    /// `<eos>` is omitted (it is implicit in the one-sequence-per-line file
    /// form and restored by [`TokenSequence::parse_line`]).
    pub fn to_texts(&self, mode: TokenizeMode) -> Vec<String> {
        let mut out = Vec::with_capacity(self.tokens.len());
        for tok in &self.tokens {
            if tok.is_eos() {
                continue;
            }
            match tok.kind {
                TokenKind::Distance | TokenKind::Theta | TokenKind::Phi => {
                    match tokenize_mode(&tok.text, mode) {
                        Ok(parts) => out.extend(parts),
                        Err(_) => out.push(tok.text.clone()),
                    }
                }
                _ => out.push(tok.text.clone()),
            }
        }
        out
    }

    /// Space-joined line form.
    pub fn to_line(&self, mode: TokenizeMode) -> String {
        self.to_texts(mode).join(" ")
    }

    /// Parses a space-joined line. Split-mode sub-tokens are merged back,
    /// kinds are assigned by grammar position, and the terminal `<eos>` is
    /// appended if absent.
    pub fn parse_line(line: &str) -> Result<TokenSequence, CodecError> {
        let raw: Vec<&str> = line.split_whitespace().collect();
        let texts = merge_split_tokens(&raw);
        let mut tokens = Vec::with_capacity(texts.len() + 1);
        let mut content = 0usize;
        for (i, text) in texts.iter().enumerate() {
            if i == 0 && text.starts_with("prop:") {
                tokens.push(Token::new(TokenKind::Property, text.clone()));
                continue;
            }
            if text == SPECIAL_TOKENS[EOS_ID as usize] {
                tokens.push(Token::eos());
                continue;
            }
            let kind = match content % 4 {
                0 => TokenKind::Element,
                1 => TokenKind::Distance,
                2 => TokenKind::Theta,
                _ => TokenKind::Phi,
            };
            tokens.push(Token::new(kind, text.clone()));
            content += 1;
        }
        if !tokens.last().is_some_and(Token::is_eos) {
            tokens.push(Token::eos());
        }
        let seq = TokenSequence { tokens };
        seq.validate()?;
        Ok(seq)
    }
}

/// Rejoins `a "." b` triples produced by split tokenization.
fn merge_split_tokens(texts: &[&str]) -> Vec<String> {
    let mut out = Vec::with_capacity(texts.len());
    let mut i = 0;
    while i < texts.len() {
        if i + 2 < texts.len() && texts[i + 1] == "." && texts[i] != "." {
            out.push(format!("{}.{}", texts[i], texts[i + 2]));
            i += 3;
        } else {
            out.push(texts[i].to_string());
            i += 1;
        }
    }
    out
}

/// Everything the encoder derived on the way to the token sequence; exposed
/// so roundtrip checks can align against the exact frame and per-atom
/// correspondence that produced the tokens.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub seq: TokenSequence,
    /// `order[i]` is the original atom index at sequence position `i`.
    pub order: Vec<usize>,
    pub frame: geom::FrameBasis,
    /// Exact (pre-rounding) spherical records in sequence order.
    pub records: Vec<SphericalRecord>,
}

/// Encodes a molecule, returning the sequence together with the ordering,
/// frame, and exact records behind it.
pub fn encode_full(
    mol: &Molecule3D,
    bonds: &BondTable,
    cfg: &EncodeConfig,
) -> Result<Encoded, CodecError> {
    let graph = infer_bonds(mol, bonds);
    let order = order_strategy(&graph, mol.coords(), cfg.strategy, cfg.seed);
    let ordered: Vec<Vec3> = order.iter().map(|&i| mol.coords()[i]).collect();
    let frame = geom::build_frame(&ordered);
    let records = geom::to_spherical(&ordered, &frame);
    let mut tokens = Vec::with_capacity(4 * order.len() + 1);
    for (&i, rec) in order.iter().zip(&records) {
        let z = mol.atoms()[i];
        let symbol = element::symbol(z).ok_or(CodecError::NoSymbol(z))?;
        tokens.push(Token::new(TokenKind::Element, symbol));
        tokens.push(Token::new(
            TokenKind::Distance,
            format_fixed(rec.d, cfg.decimals_dist),
        ));
        tokens.push(Token::new(
            TokenKind::Theta,
            format!("{}°", format_fixed(rec.theta, cfg.decimals_angle)),
        ));
        tokens.push(Token::new(
            TokenKind::Phi,
            format!("{}°", format_fixed(rec.phi, cfg.decimals_angle)),
        ));
    }
    tokens.push(Token::eos());
    Ok(Encoded {
        seq: TokenSequence { tokens },
        order,
        frame,
        records,
    })
}

/// Encodes a molecule as a token sequence: bond perception, canonical (or
/// ablation) ordering, frame construction, spherical conversion, and
/// fixed-decimal token formatting.
pub fn encode(
    mol: &Molecule3D,
    bonds: &BondTable,
    cfg: &EncodeConfig,
) -> Result<TokenSequence, CodecError> {
    encode_full(mol, bonds, cfg).map(|e| e.seq)
}

/// Decodes a token sequence into a molecule. Coordinates are expressed in the
/// frame's own coordinate system (the first atom at the origin); any property
/// token is ignored for geometry.
pub fn decode(seq: &TokenSequence) -> Result<Molecule3D, CodecError> {
    let atoms = seq.parse_atoms()?;
    let mut numbers = Vec::with_capacity(atoms.len());
    let mut records = Vec::with_capacity(atoms.len());
    let offset = usize::from(seq.property().is_some());
    for (idx, &(z, d, theta, phi, theta_decimals)) in atoms.iter().enumerate() {
        let pos = offset + 4 * idx;
        if d < 0.0 {
            return Err(CodecError::ValueOutOfRange {
                position: pos + 1,
                which: "d",
                value: d,
            });
        }
        // Rounded theta may overshoot π by at most half the last decimal.
        let eps = 0.5 / math::pow10(theta_decimals);
        if !(0.0..=core::f64::consts::PI + eps).contains(&theta) {
            return Err(CodecError::ValueOutOfRange {
                position: pos + 2,
                which: "theta",
                value: theta,
            });
        }
        numbers.push(z);
        records.push(SphericalRecord { d, theta, phi });
    }
    let coords = geom::from_spherical(&records);
    Molecule3D::new(numbers, coords).map_err(|_| CodecError::EmptySequence)
}

/// Bijective token-text ↔ id table with four reserved specials at ids 0–3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    texts: Vec<String>,
    ids: alloc::collections::BTreeMap<String, u32>,
    decimals_distance: u32,
    decimals_angle: u32,
}

impl Vocabulary {
    /// Builds a vocabulary covering every distinct token text in the corpus
    /// (under the given tokenize mode) plus the specials. Content tokens are
    /// sorted, so the table is independent of corpus order and of how the
    /// corpus is partitioned across workers.
    pub fn build(
        corpus: &[TokenSequence],
        mode: TokenizeMode,
        cap: usize,
    ) -> Result<Vocabulary, CodecError> {
        if corpus.is_empty() {
            return Err(CodecError::EmptyCorpus);
        }
        let mut distinct: alloc::collections::BTreeSet<String> =
            alloc::collections::BTreeSet::new();
        for seq in corpus {
            for text in seq.to_texts(mode) {
                distinct.insert(text);
            }
        }
        let total = distinct.len() + SPECIAL_TOKENS.len();
        if total > cap {
            return Err(CodecError::CapExceeded {
                distinct: distinct.len(),
                specials: SPECIAL_TOKENS.len(),
                cap,
                overflow: total - cap,
            });
        }
        let mut texts: Vec<String> = SPECIAL_TOKENS.iter().map(|s| s.to_string()).collect();
        texts.extend(distinct);
        Self::from_texts(texts)
    }

    fn from_texts(texts: Vec<String>) -> Result<Vocabulary, CodecError> {
        let mut ids = alloc::collections::BTreeMap::new();
        let mut decimals_distance = 0;
        let mut decimals_angle = 0;
        for (i, text) in texts.iter().enumerate() {
            if ids.insert(text.clone(), i as u32).is_some() {
                return Err(CodecError::BadVocabulary(format!(
                    "duplicate token `{text}`"
                )));
            }
            if i >= SPECIAL_TOKENS.len() {
                if let Ok((_, dec)) = parse_fixed(text) {
                    if text.ends_with('°') {
                        decimals_angle = decimals_angle.max(dec);
                    } else {
                        decimals_distance = decimals_distance.max(dec);
                    }
                }
            }
        }
        Ok(Vocabulary {
            texts,
            ids,
            decimals_distance,
            decimals_angle,
        })
    }

    /// Total size including the specials.
    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }

    /// Largest decimal count seen on distance tokens.
    pub fn decimals_distance(&self) -> u32 {
        self.decimals_distance
    }

    /// Largest decimal count seen on angle tokens.
    pub fn decimals_angle(&self) -> u32 {
        self.decimals_angle
    }

    pub fn id(&self, text: &str) -> Option<u32> {
        self.ids.get(text).copied()
    }

    pub fn text(&self, id: u32) -> Option<&str> {
        self.texts.get(id as usize).map(String::as_str)
    }

    /// Ids for a text stream; unknown texts map to `<unk>`.
    pub fn ids_for<S: AsRef<str>>(&self, texts: &[S]) -> Vec<u32> {
        texts
            .iter()
            .map(|t| self.id(t.as_ref()).unwrap_or(UNK_ID))
            .collect()
    }

    /// Texts for an id stream; out-of-range ids render as `<unk>`.
    pub fn texts_for(&self, ids: &[u32]) -> Vec<String> {
        ids.iter()
            .map(|&id| {
                self.text(id)
                    .unwrap_or(SPECIAL_TOKENS[UNK_ID as usize])
                    .to_string()
            })
            .collect()
    }

    /// One token text per line: the four reserved specials, then content
    /// tokens; the 0-based line number is the id.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for text in &self.texts {
            out.push_str(text);
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Vocabulary::to_text`].
    pub fn from_text(text: &str) -> Result<Vocabulary, CodecError> {
        let texts: Vec<String> = text.lines().map(str::to_string).collect();
        if texts.len() < SPECIAL_TOKENS.len() {
            return Err(CodecError::BadVocabulary(
                "missing reserved special lines".to_string(),
            ));
        }
        for (i, special) in SPECIAL_TOKENS.iter().enumerate() {
            if texts[i] != *special {
                return Err(CodecError::BadVocabulary(format!(
                    "line {i} must be `{special}`, got `{}`",
                    texts[i]
                )));
            }
        }
        Self::from_texts(texts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_xyz;
    use alloc::vec;

    fn table() -> BondTable {
        BondTable::default_table()
    }

    fn texts(seq: &TokenSequence) -> Vec<&str> {
        seq.tokens().iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn format_fixed_half_away_from_zero() {
        assert_eq!(format_fixed(0.0, 2), "0.00");
        assert_eq!(format_fixed(1.094999, 2), "1.09");
        assert_eq!(format_fixed(1.095, 2), "1.10");
        assert_eq!(format_fixed(-0.025, 2), "-0.03");
        assert_eq!(format_fixed(-1e-16, 2), "0.00");
        assert_eq!(format_fixed(-0.004999, 2), "0.00");
        assert_eq!(format_fixed(core::f64::consts::PI, 2), "3.14");
        assert_eq!(format_fixed(core::f64::consts::PI, 3), "3.142");
    }

    #[test]
    fn single_atom_sequence() {
        let mol = parse_xyz("1\n\nH 3.2 -1.0 0.5").unwrap().remove(0);
        let seq = encode(&mol, &table(), &EncodeConfig::default()).unwrap();
        assert_eq!(texts(&seq), ["H", "0.00", "0.00°", "0.00°", "<eos>"]);
        seq.validate().unwrap();
    }

    #[test]
    fn hc_pair_matches_expected_tokens() {
        // H labels first (lower color), C sits 1.09 Å along the frame x axis.
        let mol = parse_xyz("2\n\nH 0 0 0\nC 1.09 0 0").unwrap().remove(0);
        let seq = encode(&mol, &table(), &EncodeConfig::default()).unwrap();
        assert_eq!(
            texts(&seq),
            ["H", "0.00", "0.00°", "0.00°", "C", "1.09", "1.57°", "0.00°", "<eos>"]
        );
    }

    #[test]
    fn decode_single_atom() {
        let seq = TokenSequence::parse_line("H 0.00 0.00° 0.00°").unwrap();
        let mol = decode(&seq).unwrap();
        assert_eq!(mol.atoms(), &[1]);
        assert_eq!(mol.coords()[0], Vec3::ZERO);
    }

    #[test]
    fn decode_evaluates_inverse_map() {
        let seq = TokenSequence::parse_line("C 0.00 0.00° 0.00° O 1.00 1.57° 0.00°").unwrap();
        let mol = decode(&seq).unwrap();
        let p = mol.coords()[1];
        // (1.00·sin 1.57·cos 0, 1.00·sin 1.57·sin 0, 1.00·cos 1.57)
        assert!((p.x - 1.57f64.sin()).abs() < 1e-12);
        assert!(p.y.abs() < 1e-12);
        assert!((p.z - 1.57f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn decode_rejects_grammar_violations() {
        // Distance where an angle should be.
        let err = TokenSequence::parse_line("H 0.00 0.00 0.00°").unwrap_err();
        assert!(
            matches!(err, CodecError::BadValue { position: 2, .. }),
            "{err:?}"
        );
        // Theta out of range.
        let err = TokenSequence::parse_line("H 0.00 0.00° 0.00° C 1.00 3.20° 0.00°")
            .and_then(|seq| decode(&seq).map(|_| ()))
            .unwrap_err();
        assert!(
            matches!(err, CodecError::ValueOutOfRange { which: "theta", .. }),
            "{err:?}"
        );
        // Theta just past π is allowed at 2 decimals (ε = 0.005).
        let seq = TokenSequence::parse_line("H 0.00 0.00° 0.00° C 1.00 3.14° 0.00°").unwrap();
        decode(&seq).unwrap();
        // <unk> is strictly rejected.
        let seq = TokenSequence::from_tokens(vec![
            Token::new(TokenKind::Element, "<unk>"),
            Token::new(TokenKind::Distance, "0.00"),
            Token::new(TokenKind::Theta, "0.00°"),
            Token::new(TokenKind::Phi, "0.00°"),
            Token::eos(),
        ]);
        assert!(matches!(
            seq.validate(),
            Err(CodecError::UnknownToken { position: 0 })
        ));
    }

    #[test]
    fn tokenize_modes() {
        assert_eq!(
            tokenize_mode("1.09", TokenizeMode::Whole).unwrap(),
            ["1.09"]
        );
        assert_eq!(
            tokenize_mode("1.09", TokenizeMode::Split).unwrap(),
            ["1", ".", "09"]
        );
        assert_eq!(
            tokenize_mode("-0.02°", TokenizeMode::Split).unwrap(),
            ["-0", ".", "02°"]
        );
        assert!(tokenize_mode("x.y", TokenizeMode::Split).is_err());
    }

    #[test]
    fn split_line_roundtrip() {
        let mol = parse_xyz("2\n\nH 0 0 0\nC 1.09 0 0").unwrap().remove(0);
        let seq = encode(&mol, &table(), &EncodeConfig::default()).unwrap();
        let line = seq.to_line(TokenizeMode::Split);
        assert_eq!(line, "H 0 . 00 0 . 00° 0 . 00° C 1 . 09 1 . 57° 0 . 00°");
        let parsed = TokenSequence::parse_line(&line).unwrap();
        assert_eq!(parsed, seq);
    }

    #[test]
    fn whole_line_roundtrip_with_property() {
        let mol = parse_xyz("2\n\nO 0 0 0\nO 0 0 1.21").unwrap().remove(0);
        let seq = encode(&mol, &table(), &EncodeConfig::default()).unwrap();
        let seq = seq.with_property(Token::new(TokenKind::Property, "prop:alpha=3"));
        let line = seq.to_line(TokenizeMode::Whole);
        assert!(line.starts_with("prop:alpha=3 O"));
        let parsed = TokenSequence::parse_line(&line).unwrap();
        assert_eq!(parsed, seq);
        assert_eq!(parsed.property(), Some("prop:alpha=3"));
    }

    #[test]
    fn vocab_single_atom_corpus() {
        let mol = parse_xyz("1\n\nH 0 0 0").unwrap().remove(0);
        let seq = encode(&mol, &table(), &EncodeConfig::default()).unwrap();
        let vocab = Vocabulary::build(&[seq], TokenizeMode::Whole, 100).unwrap();
        // Specials + H + "0.00" + "0.00°".
        assert_eq!(vocab.len(), 7);
        assert_eq!(vocab.text(BOS_ID), Some("<bos>"));
        assert_eq!(vocab.text(EOS_ID), Some("<eos>"));
        for id in 0..vocab.len() as u32 {
            let text = vocab.text(id).unwrap();
            assert_eq!(vocab.id(text), Some(id));
        }
    }

    #[test]
    fn vocab_cap_exceeded() {
        let mols = parse_xyz(
            "3\n\nH 0 0 0\nC 1.09 0 0\nN 2.2 0.8 0.1\n3\n\nO 0 0 0\nC 1.2 0 0\nF 2.1 1.0 -0.4\n",
        )
        .unwrap();
        let corpus: Vec<TokenSequence> = mols
            .iter()
            .map(|m| encode(m, &table(), &EncodeConfig::default()).unwrap())
            .collect();
        let err = Vocabulary::build(&corpus, TokenizeMode::Whole, 10).unwrap_err();
        match err {
            CodecError::CapExceeded {
                distinct,
                cap: 10,
                overflow,
                ..
            } => {
                assert_eq!(overflow, distinct + 4 - 10);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn vocab_text_roundtrip() {
        let mol = parse_xyz("2\n\nH 0 0 0\nC 1.09 0 0").unwrap().remove(0);
        let seq = encode(&mol, &table(), &EncodeConfig::default()).unwrap();
        let vocab = Vocabulary::build(&[seq], TokenizeMode::Whole, 100).unwrap();
        let reparsed = Vocabulary::from_text(&vocab.to_text()).unwrap();
        assert_eq!(reparsed, vocab);
        assert_eq!(reparsed.decimals_distance(), 2);
        assert_eq!(reparsed.decimals_angle(), 2);
    }

    #[test]
    fn encode_decode_keeps_atom_identity() {
        let text = "4\n\nC 0.0 0.0 0.0\nO 1.21 0.0 0.0\nH -0.6 0.9 0.2\nH -0.6 -0.9 0.1\n";
        let mol = parse_xyz(text).unwrap().remove(0);
        let seq = encode(&mol, &table(), &EncodeConfig::default()).unwrap();
        let out = decode(&seq).unwrap();
        let mut orig: Vec<u8> = mol.atoms().to_vec();
        let mut got: Vec<u8> = out.atoms().to_vec();
        orig.sort_unstable();
        got.sort_unstable();
        assert_eq!(orig, got);
    }
}
