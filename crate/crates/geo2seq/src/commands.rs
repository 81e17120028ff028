//! Subcommand implementations. Each returns the process exit code: 0 on
//! success, 1 on data errors; usage errors exit 2 via clap before reaching
//! here.
//!
//! Parallel phases map over items by input index and reassemble results in
//! that order, so single- and multi-worker runs produce byte-identical
//! output files. All randomness flows from the one `--seed` through
//! per-item streams.

use std::collections::BTreeSet;

use anyhow::{Context, Result};
use rayon::prelude::*;

use geo2seq_core::codec::{self, EncodeConfig, Token, TokenKind, TokenSequence, EOS_ID};
use geo2seq_core::lmgen::{self, NgramModel, SamplerConfig};
use geo2seq_core::metrics;
use geo2seq_core::molgraph::{write_xyz, ChemTables, Molecule3D};

use crate::args::*;
use crate::report::{EvalReport, RoundtripReport};
use crate::seqfiles::*;
use crate::stream_seed;

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Encode(args) => encode(&args),
        Command::Decode(args) => decode(&args),
        Command::RoundtripCheck(args) => roundtrip_check(&args),
        Command::BuildVocab(args) => build_vocab(&args),
        Command::Train(args) => train(&args),
        Command::Sample(args) => sample(&args),
        Command::Eval(args) => eval(&args),
    }
}

fn pool(workers: u64) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers as usize)
        .build()
        .context("building worker pool")
}

fn encode_config(codec: &CodecOpts, seed: u64) -> EncodeConfig {
    EncodeConfig {
        decimals_dist: codec.decimals_dist,
        decimals_angle: codec.decimals_angle,
        strategy: codec.order,
        seed,
    }
}

pub fn encode(args: &EncodeArgs) -> Result<i32> {
    let bonds = load_bond_table(args.bond_table.as_deref())?;
    let (mut items, mut errors) = read_xyz_files(&args.inputs)?;

    // Property conditioning: quantile-bucket the named property over the
    // parsed molecules and prefix each sequence with its bucket token.
    let mut prop_tokens: Vec<Option<Token>> = vec![None; items.len()];
    if let Some(name) = &args.property {
        let values: Vec<f64> = items
            .iter()
            .flatten()
            .filter_map(|m| m.prop(name))
            .collect();
        anyhow::ensure!(
            values.len() >= args.buckets,
            "property `{name}`: {} values for {} buckets",
            values.len(),
            args.buckets
        );
        let edges = lmgen::quantile_edges(&values, args.buckets);
        if let Some(path) = &args.edges_out {
            let text: String = edges.iter().map(|e| format!("{e}\n")).collect();
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        for (i, item) in items.iter_mut().enumerate() {
            let Some(mol) = item else { continue };
            match mol.prop(name) {
                Some(v) => {
                    prop_tokens[i] = Some(lmgen::property_bucket(v, name, &edges)?);
                }
                None => {
                    errors.push(ItemError {
                        index: i + 1,
                        message: format!("property `{name}` missing"),
                    });
                    *item = None;
                }
            }
        }
    }

    let results: Vec<Option<Result<String, String>>> = pool(args.workers)?.install(|| {
        items
            .par_iter()
            .enumerate()
            .map(|(i, item)| {
                item.as_ref().map(|mol| {
                    let cfg = encode_config(&args.codec, stream_seed(args.seed, i as u64));
                    codec::encode(mol, &bonds, &cfg)
                        .map(|seq| {
                            let seq = match &prop_tokens[i] {
                                Some(tok) => seq.with_property(tok.clone()),
                                None => seq,
                            };
                            seq.to_line(args.codec.tokenize)
                        })
                        .map_err(|e| e.to_string())
                })
            })
            .collect()
    });

    let mut out = String::new();
    for (i, res) in results.into_iter().enumerate() {
        match res {
            Some(Ok(line)) => {
                out.push_str(&line);
                out.push('\n');
            }
            Some(Err(msg)) => errors.push(ItemError {
                index: i + 1,
                message: msg,
            }),
            None => {}
        }
    }
    errors.sort_by_key(|e| e.index);
    log_errors("molecule", &errors);
    write_output(args.output.as_deref(), &out)?;
    Ok(if errors.is_empty() { 0 } else { 1 })
}

pub fn decode(args: &DecodeArgs) -> Result<i32> {
    let lines = read_sequence_lines(&args.input)?;
    let results: Vec<Result<Molecule3D, String>> = pool(args.workers)?.install(|| {
        lines
            .par_iter()
            .map(|(_, line)| {
                TokenSequence::parse_line(line)
                    .and_then(|seq| codec::decode(&seq))
                    .map_err(|e| e.to_string())
            })
            .collect()
    });
    let mut errors = Vec::new();
    let mut mols = Vec::new();
    for ((line_no, _), res) in lines.iter().zip(results) {
        match res {
            Ok(mol) => mols.push(mol),
            Err(msg) => errors.push(ItemError {
                index: *line_no,
                message: msg,
            }),
        }
    }
    log_errors("line", &errors);
    write_output(args.output.as_deref(), &write_xyz(&mols))?;
    Ok(if errors.is_empty() { 0 } else { 1 })
}

/// Per-atom aligned reconstruction errors of one molecule, paired with the
/// rounding-propagation bound Δ_d + d(Δ_θ + sinθ·Δ_φ) for each atom.
fn roundtrip_errors(
    mol: &Molecule3D,
    bonds: &geo2seq_core::molgraph::BondTable,
    cfg: &EncodeConfig,
) -> Result<Vec<(f64, f64)>, String> {
    let enc = codec::encode_full(mol, bonds, cfg).map_err(|e| e.to_string())?;
    let decoded = codec::decode(&enc.seq).map_err(|e| e.to_string())?;
    let delta_d = 0.5 / 10f64.powi(cfg.decimals_dist as i32);
    let delta_a = 0.5 / 10f64.powi(cfg.decimals_angle as i32);
    let mut out = Vec::with_capacity(enc.order.len());
    for (pos, &orig_idx) in enc.order.iter().enumerate() {
        let aligned = enc.frame.to_world(decoded.coords()[pos]);
        let err = (aligned - mol.coords()[orig_idx]).norm();
        let rec = &enc.records[pos];
        let bound = delta_d + rec.d * (delta_a + rec.theta.sin() * delta_a);
        out.push((err, bound));
    }
    Ok(out)
}

type PerAtomErrors = Vec<(f64, f64)>;

pub fn roundtrip_check(args: &RoundtripArgs) -> Result<i32> {
    let bonds = load_bond_table(args.bond_table.as_deref())?;
    let (items, mut errors) = read_xyz_files(&args.inputs)?;
    let results: Vec<Option<Result<PerAtomErrors, String>>> = pool(args.workers)?.install(|| {
        items
            .par_iter()
            .enumerate()
            .map(|(i, item)| {
                item.as_ref().map(|mol| {
                    let cfg = encode_config(&args.codec, stream_seed(args.seed, i as u64));
                    roundtrip_errors(mol, &bonds, &cfg)
                })
            })
            .collect()
    });

    let mut molecules = 0usize;
    let mut atoms = 0usize;
    let mut sum_error = 0.0;
    let mut max_error: f64 = 0.0;
    let mut violations = 0usize;
    for (i, res) in results.into_iter().enumerate() {
        match res {
            None => {}
            Some(Err(msg)) => errors.push(ItemError {
                index: i + 1,
                message: msg,
            }),
            Some(Ok(per_atom)) => {
                molecules += 1;
                for (err, bound) in per_atom {
                    atoms += 1;
                    sum_error += err;
                    max_error = max_error.max(err);
                    if err > bound {
                        violations += 1;
                    }
                }
            }
        }
    }
    errors.sort_by_key(|e| e.index);
    log_errors("molecule", &errors);
    let report = RoundtripReport {
        molecules,
        failed: errors.len(),
        atoms,
        mean_error: if atoms > 0 {
            sum_error / atoms as f64
        } else {
            0.0
        },
        max_error,
        bound_violations: violations,
        decimals_dist: args.codec.decimals_dist,
        decimals_angle: args.codec.decimals_angle,
    };
    let json = serde_json::to_string_pretty(&report).context("serializing report")?;
    write_output(args.json_out.as_deref(), &format!("{json}\n"))?;
    eprintln!(
        "roundtrip: {molecules} molecules, {atoms} atoms, mean {:.3e}, max {:.3e}, {violations} bound violations",
        report.mean_error, report.max_error
    );
    Ok(if violations == 0 && errors.is_empty() {
        0
    } else {
        1
    })
}

/// Parses sequence lines, logging failures; returns surviving sequences.
fn parse_sequences(lines: &[(usize, String)]) -> (Vec<TokenSequence>, Vec<ItemError>) {
    let mut seqs = Vec::with_capacity(lines.len());
    let mut errors = Vec::new();
    for (line_no, line) in lines {
        match TokenSequence::parse_line(line) {
            Ok(seq) => seqs.push(seq),
            Err(e) => errors.push(ItemError {
                index: *line_no,
                message: e.to_string(),
            }),
        }
    }
    (seqs, errors)
}

pub fn build_vocab(args: &BuildVocabArgs) -> Result<i32> {
    let lines = read_sequence_lines(&args.input)?;
    let (seqs, errors) = parse_sequences(&lines);
    log_errors("line", &errors);
    match codec::Vocabulary::build(&seqs, args.tokenize, args.cap) {
        Ok(vocab) => {
            std::fs::write(&args.output, vocab.to_text())
                .with_context(|| format!("writing {}", args.output.display()))?;
            eprintln!("vocabulary: {} tokens (cap {})", vocab.len(), args.cap);
            Ok(if errors.is_empty() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(1)
        }
    }
}

pub fn train(args: &TrainArgs) -> Result<i32> {
    let vocab_text = std::fs::read_to_string(&args.vocab)
        .with_context(|| format!("reading {}", args.vocab.display()))?;
    let vocab = codec::Vocabulary::from_text(&vocab_text)?;
    let lines = read_sequence_lines(&args.input)?;
    let (seqs, mut errors) = parse_sequences(&lines);
    let mut corpus: Vec<Vec<u32>> = Vec::with_capacity(seqs.len());
    for seq in &seqs {
        let ids = vocab.ids_for(&seq.to_texts(args.tokenize));
        if ids.contains(&codec::UNK_ID) {
            errors.push(ItemError {
                index: corpus.len() + 1,
                message: "sequence contains tokens outside the vocabulary".into(),
            });
            continue;
        }
        corpus.push(ids);
    }
    log_errors("line", &errors);
    let model = lmgen::train(&corpus, args.order, args.backoff, vocab.len())?;
    std::fs::write(&args.output, model.to_text())
        .with_context(|| format!("writing {}", args.output.display()))?;
    eprintln!("model: order {}, {} sequences", args.order, corpus.len());
    Ok(if errors.is_empty() { 0 } else { 1 })
}

pub fn sample(args: &SampleArgs) -> Result<i32> {
    if args.temperature <= 0.0 {
        eprintln!("error: --temperature must be positive");
        return Ok(2);
    }
    let model_text = std::fs::read_to_string(&args.model)
        .with_context(|| format!("reading {}", args.model.display()))?;
    let model = NgramModel::from_text(&model_text)?;
    let vocab_text = std::fs::read_to_string(&args.vocab)
        .with_context(|| format!("reading {}", args.vocab.display()))?;
    let vocab = codec::Vocabulary::from_text(&vocab_text)?;

    let condition_id = match &args.condition {
        None => None,
        Some(text) => match vocab.id(text) {
            Some(id) => Some(id),
            None => {
                eprintln!("error: condition token `{text}` absent from vocabulary");
                return Ok(1);
            }
        },
    };

    let lines: Vec<String> = pool(args.workers)?.install(|| {
        (0..args.num)
            .into_par_iter()
            .map(|i| {
                let cfg = SamplerConfig {
                    top_k: args.top_k,
                    temperature: args.temperature,
                    max_len: args.max_len,
                    seed: stream_seed(args.seed, i as u64),
                };
                let mut ids = lmgen::sample(&model, &cfg, condition_id);
                if ids.last() == Some(&EOS_ID) {
                    ids.pop();
                }
                vocab.texts_for(&ids).join(" ")
            })
            .collect()
    });

    let mut invalid = Vec::new();
    for (i, line) in lines.iter().enumerate() {
        if let Err(e) = TokenSequence::parse_line(line) {
            invalid.push(ItemError {
                index: i + 1,
                message: e.to_string(),
            });
        }
    }
    log_errors("sample", &invalid);
    let mut out = lines.join("\n");
    out.push('\n');
    write_output(args.output.as_deref(), &out)?;
    let frac = invalid.len() as f64 / args.num.max(1) as f64;
    eprintln!(
        "sampled {} sequences, {} grammar-invalid ({:.1}%)",
        args.num,
        invalid.len(),
        100.0 * frac
    );
    Ok(if frac > args.max_invalid_frac { 1 } else { 0 })
}

/// Loads the generated set: XYZ geometries for `.xyz` inputs, otherwise a
/// sequence file decoded line by line. Returns (molecules, total, failures).
fn load_generated(args: &EvalArgs) -> Result<(Vec<Molecule3D>, usize, Vec<ItemError>)> {
    let is_xyz = args.generated.extension().is_some_and(|e| e == "xyz");
    if is_xyz {
        let (items, errors) = read_xyz_files(std::slice::from_ref(&args.generated))?;
        let total = items.len();
        Ok((items.into_iter().flatten().collect(), total, errors))
    } else {
        let lines = read_sequence_lines(&args.generated)?;
        let total = lines.len();
        let mut mols = Vec::new();
        let mut errors = Vec::new();
        for (line_no, line) in &lines {
            match TokenSequence::parse_line(line).and_then(|seq| codec::decode(&seq)) {
                Ok(mol) => mols.push(mol),
                Err(e) => errors.push(ItemError {
                    index: *line_no,
                    message: e.to_string(),
                }),
            }
        }
        Ok((mols, total, errors))
    }
}

pub fn eval(args: &EvalArgs) -> Result<i32> {
    let tables = ChemTables {
        bonds: load_bond_table(args.bond_table.as_deref())?,
        valencies: load_valency_table(args.valency_table.as_deref())?,
    };
    let (generated, generated_total, decode_errors) = load_generated(args)?;
    log_errors("generated", &decode_errors);
    let reference = read_xyz_strict(&args.reference)?;
    let train_mols = match &args.train {
        Some(path) => read_xyz_strict(path)?,
        None => reference.clone(),
    };
    let train_certs: BTreeSet<Vec<u8>> = pool(args.workers)?.install(|| {
        train_mols
            .par_iter()
            .map(|m| {
                geo2seq_core::canon::canonical_order(&geo2seq_core::molgraph::infer_bonds(
                    m,
                    &tables.bonds,
                ))
                .certificate
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect()
    });
    match metrics::evaluate(&generated, &reference, &train_certs, &tables) {
        Ok(m) => {
            let report = EvalReport {
                generated_total,
                generated_used: generated.len(),
                decode_failures: decode_errors.len(),
                reference_total: reference.len(),
                metrics: m,
            };
            let json = serde_json::to_string_pretty(&report).context("serializing report")?;
            match &args.json_out {
                Some(path) => std::fs::write(path, format!("{json}\n"))
                    .with_context(|| format!("writing {}", path.display()))?,
                None => println!("{json}"),
            }
            print!("{}", report.text_table());
            Ok(0)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(1)
        }
    }
}

/// Builds a property token for sampling conditions, mirroring the encode-side
/// bucket format. Exposed for tests.
pub fn condition_token(name: &str, bucket: usize) -> Token {
    Token::new(TokenKind::Property, format!("prop:{name}={bucket}"))
}
