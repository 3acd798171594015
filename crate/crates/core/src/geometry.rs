//! Dense-vector kernels: cosine similarity and mean-centering.
//!
//! Accumulation happens in `f64` regardless of the `f32` storage type.

use thiserror::Error;

use crate::store::{EmbeddingBundle, RecordMeta, StoreError};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("zero-norm vector")]
    ZeroNorm,
    #[error("no records selected for layer {layer}")]
    EmptySelection { layer: usize },
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Per-layer mean used to recenter an anisotropic representation space.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringStats {
    pub layer: usize,
    pub mean_vector: Vec<f32>,
    pub count: usize,
}

pub fn dot(u: &[f32], v: &[f32]) -> f64 {
    u.iter().zip(v).map(|(&a, &b)| a as f64 * b as f64).sum()
}

pub fn norm(v: &[f32]) -> f64 {
    dot(v, v).sqrt()
}

/// Cosine similarity clamped to `[-1, 1]`.
pub fn cosine(u: &[f32], v: &[f32]) -> Result<f64, GeometryError> {
    if u.len() != v.len() {
        return Err(GeometryError::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let uu = dot(u, u);
    let vv = dot(v, v);
    if uu == 0.0 || vv == 0.0 {
        return Err(GeometryError::ZeroNorm);
    }
    let sim = dot(u, v) / (uu * vv).sqrt();
    Ok(sim.clamp(-1.0, 1.0))
}

/// Arithmetic mean of the rows of `layer` whose metadata passes `filter`.
pub fn layer_mean<F>(
    bundle: &EmbeddingBundle,
    layer: usize,
    filter: F,
) -> Result<CenteringStats, GeometryError>
where
    F: Fn(&RecordMeta) -> bool,
{
    let rows = bundle.layer_rows(layer)?;
    let mut sum = vec![0.0f64; bundle.dim()];
    let mut count = 0usize;
    for (record, row) in bundle.records.iter().zip(rows) {
        if !filter(record) {
            continue;
        }
        for (acc, &x) in sum.iter_mut().zip(row) {
            *acc += x as f64;
        }
        count += 1;
    }
    if count == 0 {
        return Err(GeometryError::EmptySelection { layer });
    }
    Ok(CenteringStats {
        layer,
        mean_vector: sum.iter().map(|s| (s / count as f64) as f32).collect(),
        count,
    })
}

/// Means over all records, one entry per layer.
pub fn bundle_means(bundle: &EmbeddingBundle) -> Result<Vec<CenteringStats>, GeometryError> {
    (0..bundle.num_layers())
        .map(|layer| layer_mean(bundle, layer, |_| true))
        .collect()
}

pub fn center(v: &[f32], stats: &CenteringStats) -> Result<Vec<f32>, GeometryError> {
    if v.len() != stats.mean_vector.len() {
        return Err(GeometryError::DimensionMismatch {
            left: v.len(),
            right: stats.mean_vector.len(),
        });
    }
    Ok(v.iter()
        .zip(&stats.mean_vector)
        .map(|(&x, &m)| (x as f64 - m as f64) as f32)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{BundleManifest, Pos, Setting, Side, Split, TokenRole};

    fn bundle(rows: &[[f32; 2]]) -> EmbeddingBundle {
        let records = (0..rows.len())
            .map(|row| RecordMeta {
                row,
                pair_id: format!("p{row}"),
                side: Side::First,
                word: "w".into(),
                pos: if row % 2 == 0 { Pos::N } else { Pos::V },
                split: Split::Dev,
            })
            .collect();
        EmbeddingBundle::new(
            BundleManifest::new("t", Setting::Base, TokenRole::Target, 2, 1, rows.len()),
            records,
            vec![rows.iter().flatten().copied().collect()],
        )
        .unwrap()
    }

    #[test]
    fn cosine_hand_values() {
        assert_eq!(cosine(&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine(&[1.0, 2.0, 2.0], &[2.0, 1.0, 2.0]).unwrap();
        assert!((c - 8.0 / 9.0).abs() < 1e-6);
    }

    #[test]
    fn cosine_errors() {
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(GeometryError::ZeroNorm)
        ));
        assert!(matches!(
            cosine(&[1.0], &[1.0, 0.0]),
            Err(GeometryError::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn mean_and_center() {
        let b = bundle(&[[1.0, 0.0], [0.0, 1.0]]);
        let stats = layer_mean(&b, 0, |_| true).unwrap();
        assert_eq!(stats.mean_vector, vec![0.5, 0.5]);
        assert_eq!(stats.count, 2);
        assert_eq!(center(&[1.0, 0.0], &stats).unwrap(), vec![0.5, -0.5]);
        assert_eq!(center(&[0.5, 0.5], &stats).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn filtered_mean() {
        let b = bundle(&[[3.0, -1.0], [0.0, 1.0], [3.0, -1.0]]);
        let nouns = layer_mean(&b, 0, |r| r.pos == Pos::N).unwrap();
        assert_eq!(nouns.mean_vector, vec![3.0, -1.0]);
        assert_eq!(nouns.count, 2);
        let single = layer_mean(&b, 0, |r| r.row == 1).unwrap();
        assert_eq!(single.mean_vector, vec![0.0, 1.0]);
        assert!(matches!(
            layer_mean(&b, 0, |_| false),
            Err(GeometryError::EmptySelection { layer: 0 })
        ));
        assert!(matches!(
            layer_mean(&b, 3, |_| true),
            Err(GeometryError::Store(StoreError::LayerOutOfRange { .. }))
        ));
    }

    #[test]
    fn center_then_uncenter() {
        let stats = CenteringStats {
            layer: 0,
            mean_vector: vec![0.3, -0.7, 0.125],
            count: 4,
        };
        let v = [1.5f32, 2.0, -3.0];
        let back: Vec<f32> = center(&v, &stats)
            .unwrap()
            .iter()
            .zip(&stats.mean_vector)
            .map(|(c, m)| c + m)
            .collect();
        for (a, b) in back.iter().zip(v) {
            assert!((a - b).abs() <= 1e-6);
        }
        assert!(center(&[1.0], &stats).is_err());
    }
}
