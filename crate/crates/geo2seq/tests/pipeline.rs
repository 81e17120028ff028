//! Corpus-level behavior on the checked-in fixture: model-order perplexity
//! ordering, property bucketing and conditioning, geometry-MMD
//! self-consistency, and precision scaling of the roundtrip error.

mod common;

use std::collections::BTreeSet;

use geo2seq_core::codec::{self, EncodeConfig, TokenSequence, TokenizeMode, Vocabulary};
use geo2seq_core::lmgen::{self, SamplerConfig};
use geo2seq_core::metrics;
use geo2seq_core::molgraph::{BondTable, ChemTables, Molecule3D};

use common::load_fixture;

fn encode_corpus(mols: &[Molecule3D], cfg: &EncodeConfig) -> Vec<TokenSequence> {
    let bonds = BondTable::default_table();
    mols.iter()
        .map(|m| codec::encode(m, &bonds, cfg).unwrap())
        .collect()
}

#[test]
fn higher_order_model_fits_corpus_no_worse() {
    let mols = load_fixture();
    let corpus = encode_corpus(&mols[..1000], &EncodeConfig::default());
    let vocab = Vocabulary::build(&corpus, TokenizeMode::Whole, 16_000).unwrap();
    let ids: Vec<Vec<u32>> = corpus
        .iter()
        .map(|s| vocab.ids_for(&s.to_texts(TokenizeMode::Whole)))
        .collect();
    let low = lmgen::train(&ids, 1, 0.4, vocab.len()).unwrap();
    let high = lmgen::train(&ids, 6, 0.4, vocab.len()).unwrap();
    let eval_slice = &ids[..200];
    let p_low = low.perplexity(eval_slice);
    let p_high = high.perplexity(eval_slice);
    assert!(
        p_high <= p_low,
        "order-6 perplexity {p_high} worse than order-1 {p_low}"
    );
}

#[test]
fn alpha_decile_buckets_are_balanced() {
    let mols = load_fixture();
    let values: Vec<f64> = mols
        .iter()
        .map(|m| m.prop("alpha").expect("fixture has alpha"))
        .collect();
    let edges = lmgen::quantile_edges(&values, 10);
    assert_eq!(edges.len(), 9);
    let mut counts = vec![0usize; 10];
    for &v in &values {
        counts[edges.iter().filter(|&&e| e <= v).count()] += 1;
    }
    for (i, &c) in counts.iter().enumerate() {
        let frac = c as f64 / values.len() as f64;
        assert!((frac - 0.10).abs() <= 0.02, "bucket {i} holds {frac:.3}");
    }
}

#[test]
fn conditioning_on_alpha_shifts_molecule_size() {
    let mols = load_fixture();
    let subset = &mols[..1000];
    let values: Vec<f64> = subset.iter().map(|m| m.prop("alpha").unwrap()).collect();
    let edges = lmgen::quantile_edges(&values, 10);

    let cfg = EncodeConfig::default();
    let bonds = BondTable::default_table();
    let corpus: Vec<TokenSequence> = subset
        .iter()
        .map(|m| {
            let tok = lmgen::property_bucket(m.prop("alpha").unwrap(), "alpha", &edges).unwrap();
            codec::encode(m, &bonds, &cfg).unwrap().with_property(tok)
        })
        .collect();
    let vocab = Vocabulary::build(&corpus, TokenizeMode::Whole, 16_000).unwrap();
    let ids: Vec<Vec<u32>> = corpus
        .iter()
        .map(|s| vocab.ids_for(&s.to_texts(TokenizeMode::Whole)))
        .collect();
    let model = lmgen::train(&ids, 6, 0.4, vocab.len()).unwrap();

    let mean_atoms = |bucket: usize| -> f64 {
        let cond = vocab
            .id(&format!("prop:alpha={bucket}"))
            .expect("bucket token in vocab");
        let mut total = 0usize;
        let mut count = 0usize;
        for i in 0..200u64 {
            let cfg = SamplerConfig {
                seed: geo2seq::stream_seed(bucket as u64, i),
                ..Default::default()
            };
            let sampled = lmgen::sample(&model, &cfg, Some(cond));
            let texts = vocab.texts_for(&sampled);
            if let Ok(seq) = TokenSequence::parse_line(&texts.join(" ")) {
                total += seq.atom_count();
                count += 1;
            }
        }
        total as f64 / count.max(1) as f64
    };
    let small = mean_atoms(0);
    let large = mean_atoms(9);
    assert!(
        small < large,
        "bucket-0 samples average {small:.1} atoms, bucket-9 {large:.1}"
    );
}

#[test]
fn bootstrap_halves_have_small_mmd() {
    let mols = load_fixture();
    let tables = ChemTables::default();
    let (even, odd): (Vec<_>, Vec<_>) = mols
        .iter()
        .cloned()
        .enumerate()
        .partition(|(i, _)| i % 2 == 0);
    let even: Vec<Molecule3D> = even.into_iter().map(|(_, m)| m).collect();
    let odd: Vec<Molecule3D> = odd.into_iter().map(|(_, m)| m).collect();
    let (bond, angle, dihedral) = metrics::geometry_mmd(&even, &odd, &tables).unwrap();
    assert!(bond <= 0.05, "bond MMD {bond}");
    assert!(angle <= 0.05, "angle MMD {angle}");
    assert!(dihedral <= 0.05, "dihedral MMD {dihedral}");
}

#[test]
fn eval_of_set_against_itself_is_clean() {
    let mols: Vec<Molecule3D> = load_fixture().into_iter().take(300).collect();
    let tables = ChemTables::default();
    let certs = metrics::certificates(&mols, &tables);
    let report = metrics::evaluate(&mols, &mols, &certs, &tables).unwrap();
    assert!(report.valid >= report.valid_unique);
    assert!(report.valid_unique >= report.valid_unique_novel);
    assert_eq!(
        report.valid_unique_novel, 0.0,
        "a set is never novel against itself"
    );
    assert!(report.bond_length_mmd <= 1e-9);
    assert!(report.bond_angle_mmd <= 1e-9);
    assert!(report.dihedral_mmd <= 1e-9);
}

#[test]
fn finer_decimals_reduce_mean_roundtrip_error() {
    let mols: Vec<Molecule3D> = load_fixture().into_iter().take(300).collect();
    let bonds = BondTable::default_table();
    let mean_error = |decimals: u32| -> f64 {
        let cfg = EncodeConfig {
            decimals_dist: decimals,
            decimals_angle: decimals,
            ..EncodeConfig::default()
        };
        let mut sum = 0.0;
        let mut atoms = 0usize;
        for mol in &mols {
            let enc = codec::encode_full(mol, &bonds, &cfg).unwrap();
            let decoded = codec::decode(&enc.seq).unwrap();
            for (pos, &orig) in enc.order.iter().enumerate() {
                sum += (enc.frame.to_world(decoded.coords()[pos]) - mol.coords()[orig]).norm();
                atoms += 1;
            }
        }
        sum / atoms as f64
    };
    let coarse = mean_error(2);
    let fine = mean_error(3);
    assert!(
        fine < coarse,
        "b=3 mean {fine:.2e} not below b=2 mean {coarse:.2e}"
    );
}

#[test]
fn fixture_sequences_fully_roundtrip_as_text() {
    // File-layer identity: parse(to_line(x)) == x for the whole fixture in
    // both tokenize modes.
    let corpus = encode_corpus(&load_fixture()[..200], &EncodeConfig::default());
    for seq in &corpus {
        for mode in [TokenizeMode::Whole, TokenizeMode::Split] {
            let line = seq.to_line(mode);
            assert_eq!(&TokenSequence::parse_line(&line).unwrap(), seq);
        }
    }
}

#[test]
fn training_set_novelty_is_zero_against_itself() {
    let mols: Vec<Molecule3D> = load_fixture().into_iter().take(100).collect();
    let tables = ChemTables::default();
    let train: BTreeSet<Vec<u8>> = metrics::certificates(&mols, &tables);
    let (_, _, novel) = metrics::validity_uniqueness_novelty(&mols, &train, &tables);
    assert_eq!(novel, 0.0);
}
