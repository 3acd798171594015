//! Synthetic bundles with known geometry.
//!
//! The planted WiC construction gives every pair a pair of one-hot "sense"
//! vectors: same-sense pairs share the vector, different-sense pairs get two
//! orthogonal ones. Optional extras simulate a collapsed cone (a large
//! offset shared by every record plus small per-record jitter) and
//! uninformative early layers.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::semmap::{Gram, MatrixDocument};
use crate::store::{
    write_bundle, BundleManifest, EmbeddingBundle, Pos, RecordMeta, Setting, Side, Split, TokenRole,
};
use crate::wic::{pair_id_for, WicPair};

const WORDS: [&str; 8] = [
    "bank", "bed", "run", "play", "light", "draw", "spring", "hold",
];

/// A common offset added to every record, plus independent jitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anisotropy {
    /// Norm of the shared offset; the planted sense vectors have norm 1.
    pub offset_norm: f64,
    /// Per-coordinate standard deviation of the per-record noise.
    pub jitter: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedWic {
    pub num_pairs: usize,
    pub num_layers: usize,
    pub dim: usize,
    pub setting: Setting,
    pub token_role: TokenRole,
    pub anisotropy: Option<Anisotropy>,
    /// Layers below this index hold random vectors with no sense signal.
    pub informative_from: usize,
    pub seed: u64,
}

impl Default for PlantedWic {
    fn default() -> Self {
        Self {
            num_pairs: 100,
            num_layers: 3,
            dim: 16,
            setting: Setting::Base,
            token_role: TokenRole::Target,
            anisotropy: None,
            informative_from: 0,
            seed: 7,
        }
    }
}

impl PlantedWic {
    /// The pairs: first half dev, second half test, alternating gold labels
    /// and POS tags in blocks of two so both splits are balanced on each.
    pub fn pairs(&self) -> Vec<WicPair> {
        let dev_count = self.num_pairs / 2;
        (0..self.num_pairs)
            .map(|i| {
                let (split, local) = if i < dev_count {
                    (Split::Dev, i)
                } else {
                    (Split::Test, i - dev_count)
                };
                let word = WORDS[i % WORDS.len()];
                WicPair {
                    pair_id: pair_id_for(split, local),
                    word: word.to_string(),
                    pos: if (local / 2) % 2 == 0 { Pos::N } else { Pos::V },
                    sentence1: format!("the {word} was here ."),
                    sentence2: format!("we saw a {word} today ."),
                    index1: 1,
                    index2: 3,
                    gold: Some(local % 2 == 0),
                    split,
                }
            })
            .collect()
    }

    pub fn build(&self) -> (EmbeddingBundle, Vec<WicPair>) {
        assert!(self.dim >= 2, "planted geometry needs dim >= 2");
        let pairs = self.pairs();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let records: Vec<RecordMeta> = pairs
            .iter()
            .flat_map(|p| [Side::First, Side::Second].map(|side| (p, side)))
            .enumerate()
            .map(|(row, (p, side))| RecordMeta {
                row,
                pair_id: p.pair_id.clone(),
                side,
                word: p.word.clone(),
                pos: p.pos,
                split: p.split,
            })
            .collect();

        let dim = self.dim;
        let offset_coord = self
            .anisotropy
            .map_or(0.0, |a| a.offset_norm / (dim as f64).sqrt());
        let mut layers = Vec::with_capacity(self.num_layers);
        for layer in 0..self.num_layers {
            let mut matrix = Vec::with_capacity(records.len() * dim);
            for (i, pair) in pairs.iter().enumerate() {
                let (first, second) = if layer < self.informative_from {
                    let mut noise =
                        || -> Vec<f64> { (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect() };
                    (noise(), noise())
                } else {
                    let a = (i + layer) % dim;
                    let b = (a + dim / 2) % dim;
                    let one_hot = |k: usize| -> Vec<f64> {
                        (0..dim).map(|d| if d == k { 1.0 } else { 0.0 }).collect()
                    };
                    let second = if pair.gold == Some(true) { a } else { b };
                    (one_hot(a), one_hot(second))
                };
                for v in [first, second] {
                    for x in v {
                        let mut value = x;
                        if let Some(an) = self.anisotropy {
                            value += offset_coord + an.jitter * standard_normal(&mut rng);
                        }
                        matrix.push(value as f32);
                    }
                }
            }
            layers.push(matrix);
        }

        let manifest = BundleManifest::new(
            "planted-geometry",
            self.setting,
            self.token_role,
            dim,
            self.num_layers,
            records.len(),
        );
        let bundle = EmbeddingBundle::new(manifest, records, layers)
            .expect("planted construction satisfies bundle invariants");
        (bundle, pairs)
    }
}

/// Box-Muller draw from N(0, 1).
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Renders pairs in the official WiC tab-separated layout.
pub fn wic_data_text(pairs: &[WicPair]) -> String {
    pairs
        .iter()
        .map(|p| {
            format!(
                "{}\t{}\t{}-{}\t{}\t{}\n",
                p.word, p.pos, p.index1, p.index2, p.sentence1, p.sentence2
            )
        })
        .collect()
}

/// One `T` or `F` per pair; unlabeled pairs are written as `F`.
pub fn wic_gold_text(pairs: &[WicPair]) -> String {
    pairs
        .iter()
        .map(|p| if p.gold == Some(true) { "T\n" } else { "F\n" })
        .collect()
}

/// Word-level bundle: one record per label, `pair_id` = label, side 1.
pub fn word_bundle(
    model_name: &str,
    labels: &[String],
    layers: Vec<Vec<f32>>,
    dim: usize,
) -> EmbeddingBundle {
    let records = labels
        .iter()
        .enumerate()
        .map(|(row, label)| RecordMeta {
            row,
            pair_id: label.clone(),
            side: Side::First,
            word: label.clone(),
            pos: Pos::N,
            split: Split::Train,
        })
        .collect();
    let manifest = BundleManifest::new(
        model_name,
        Setting::Base,
        TokenRole::Target,
        dim,
        layers.len(),
        labels.len(),
    );
    EmbeddingBundle::new(manifest, records, layers).expect("word bundle invariants")
}

/// Small vocabulary with a planted gender/royalty offset structure plus
/// distractors, for network and analogy demos.
pub fn toy_lexicon(seed: u64) -> EmbeddingBundle {
    let dim = 12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis = |scale: f64| -> Vec<f64> {
        (0..dim)
            .map(|_| scale * standard_normal(&mut rng))
            .collect()
    };
    let person = basis(1.0);
    let male = basis(0.6);
    let female = basis(0.6);
    let royal = basis(0.8);
    let young = basis(0.5);
    let fruit = basis(1.0);
    let vehicle = basis(1.0);
    let combine = |parts: &[&Vec<f64>]| -> Vec<f32> {
        (0..dim)
            .map(|d| parts.iter().map(|p| p[d]).sum::<f64>() as f32)
            .collect()
    };
    let mut entries: Vec<(&str, Vec<f32>)> = vec![
        ("man", combine(&[&person, &male])),
        ("woman", combine(&[&person, &female])),
        ("king", combine(&[&person, &male, &royal])),
        ("queen", combine(&[&person, &female, &royal])),
        ("boy", combine(&[&person, &male, &young])),
        ("girl", combine(&[&person, &female, &young])),
        ("prince", combine(&[&person, &male, &royal, &young])),
        ("princess", combine(&[&person, &female, &royal, &young])),
    ];
    for name in ["apple", "pear", "plum", "cherry"] {
        let jitter = basis(0.3);
        entries.push((name, combine(&[&fruit, &jitter])));
    }
    for name in ["car", "truck", "bus", "tram"] {
        let jitter = basis(0.3);
        entries.push((name, combine(&[&vehicle, &jitter])));
    }
    let labels: Vec<String> = entries.iter().map(|(l, _)| l.to_string()).collect();
    let layer: Vec<f32> = entries.into_iter().flat_map(|(_, v)| v).collect();
    word_bundle("toy-lexicon", &labels, vec![layer], dim)
}

/// A small hand-made gram/function instance with three functions.
pub fn three_function_matrix() -> MatrixDocument {
    let s = |x: &str| x.to_string();
    MatrixDocument {
        functions: vec![s("f1"), s("f2"), s("f3")],
        grams: vec![
            Gram {
                language: s("lang_a"),
                gram: s("g1"),
                functions: vec![s("f1"), s("f2")],
            },
            Gram {
                language: s("lang_b"),
                gram: s("g2"),
                functions: vec![s("f2"), s("f3")],
            },
        ],
        gold_edges: Some(vec![[s("f1"), s("f2")], [s("f2"), s("f3")]]),
    }
}

/// Toy repetition-marker instance: six functions, eight grams.
pub fn toy_repetition_matrix() -> MatrixDocument {
    let s = |x: &str| x.to_string();
    let gram = |language: &str, gram: &str, functions: &[&str]| Gram {
        language: s(language),
        gram: s(gram),
        functions: functions.iter().map(|f| s(f)).collect(),
    };
    MatrixDocument {
        functions: [
            "repetitive",
            "restitutive",
            "counter-directional",
            "continuative",
            "additive",
            "frequentative",
        ]
        .map(s)
        .to_vec(),
        grams: vec![
            gram("lang_a", "again", &["repetitive", "restitutive"]),
            gram("lang_a", "back", &["restitutive", "counter-directional"]),
            gram(
                "lang_b",
                "wi",
                &["repetitive", "restitutive", "counter-directional"],
            ),
            gram("lang_b", "no", &["continuative", "additive"]),
            gram("lang_c", "en", &["repetitive", "continuative", "additive"]),
            gram("lang_d", "yo", &["repetitive", "additive", "frequentative"]),
            gram("lang_d", "ha", &["frequentative"]),
            gram("lang_e", "ta", &["repetitive", "frequentative"]),
        ],
        gold_edges: Some(vec![
            [s("repetitive"), s("restitutive")],
            [s("restitutive"), s("counter-directional")],
            [s("repetitive"), s("additive")],
            [s("additive"), s("continuative")],
            [s("repetitive"), s("frequentative")],
        ]),
    }
}

/// Writes the committed fixture set into `dir`.
pub fn write_fixtures(dir: &Path) -> Result<(), crate::Error> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| crate::Error::Io { path, source }
    };
    let write = |path: PathBuf, text: String| fs::write(&path, text).map_err(io(&path));

    let base = PlantedWic::default();
    let (planted, pairs) = base.build();
    write_bundle(&planted, dir.join("planted"))?;

    let (anisotropic, _) = PlantedWic {
        anisotropy: Some(PLANTED_ANISOTROPY),
        ..base.clone()
    }
    .build();
    write_bundle(&anisotropic, dir.join("planted_anisotropic"))?;

    let (prev, _) = PlantedWic {
        token_role: TokenRole::Prev,
        informative_from: base.num_layers - 1,
        seed: base.seed + 1,
        ..base.clone()
    }
    .build();
    write_bundle(&prev, dir.join("planted_prev"))?;

    let wic_dir = dir.join("wic");
    fs::create_dir_all(&wic_dir).map_err(io(&wic_dir))?;
    for split in [Split::Dev, Split::Test] {
        let sel: Vec<WicPair> = pairs.iter().filter(|p| p.split == split).cloned().collect();
        write(
            wic_dir.join(format!("{split}.data.txt")),
            wic_data_text(&sel),
        )?;
        write(
            wic_dir.join(format!("{split}.gold.txt")),
            wic_gold_text(&sel),
        )?;
    }

    write_bundle(&toy_lexicon(11), dir.join("lexicon"))?;

    let semmap_dir = dir.join("semmap");
    fs::create_dir_all(&semmap_dir).map_err(io(&semmap_dir))?;
    write(
        semmap_dir.join("three_functions.json"),
        crate::cli::to_json(&three_function_matrix()),
    )?;
    write(
        semmap_dir.join("repetition.json"),
        crate::cli::to_json(&toy_repetition_matrix()),
    )?;
    Ok(())
}

/// Offset 100x the unit signal norm, with jitter small enough to keep the
/// planted senses separable after centering.
pub const PLANTED_ANISOTROPY: Anisotropy = Anisotropy {
    offset_norm: 100.0,
    jitter: 0.01,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cosine;

    #[test]
    fn planted_is_balanced_and_complete() {
        let (bundle, pairs) = PlantedWic::default().build();
        assert_eq!(bundle.num_records(), 200);
        assert_eq!(bundle.num_layers(), 3);
        for split in [Split::Dev, Split::Test] {
            let sel: Vec<_> = pairs.iter().filter(|p| p.split == split).collect();
            assert_eq!(sel.len(), 50);
            assert_eq!(sel.iter().filter(|p| p.gold == Some(true)).count(), 25);
        }
    }

    #[test]
    fn planted_geometry_without_offset() {
        let (bundle, pairs) = PlantedWic::default().build();
        for layer in 0..3 {
            for (i, p) in pairs.iter().enumerate() {
                let u = bundle.get_vector(layer, 2 * i).unwrap();
                let v = bundle.get_vector(layer, 2 * i + 1).unwrap();
                let c = cosine(u, v).unwrap();
                assert_eq!(c, if p.gold == Some(true) { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn wic_text_round_trips_through_parser() {
        let pairs = PlantedWic::default().pairs();
        let dev: Vec<_> = pairs
            .into_iter()
            .filter(|p| p.split == Split::Dev)
            .collect();
        let parsed =
            crate::wic::parse_wic(&wic_data_text(&dev), Some(&wic_gold_text(&dev)), Split::Dev)
                .unwrap();
        assert_eq!(parsed, dev);
    }
}
