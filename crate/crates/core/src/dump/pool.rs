use serde::{Deserialize, Serialize};

use super::{DumpError, SentenceRecord};
use crate::scalar::Scalar;

/// How a word's subword vectors collapse into one vector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolingMode {
    #[default]
    Mean,
    First,
    Last,
}

/// Pools the aligned subword vectors of word `word_index`.
pub fn pool_subwords<T: Scalar>(
    rec: &SentenceRecord,
    word_index: usize,
    mode: PoolingMode,
) -> Result<Vec<T>, DumpError> {
    let idx = rec
        .alignment()
        .get(word_index)
        .ok_or(DumpError::WordIndex {
            index: word_index,
            len: rec.words().len(),
        })?;
    let pick = |i: usize| rec.subword(i).iter().map(|&x| T::of_f32(x)).collect();
    Ok(match mode {
        PoolingMode::First => pick(idx[0]),
        PoolingMode::Last => pick(idx[idx.len() - 1]),
        PoolingMode::Mean => {
            let mut acc = vec![T::zero(); rec.dim()];
            for &i in idx {
                for (a, &x) in acc.iter_mut().zip(rec.subword(i)) {
                    *a += T::of_f32(x);
                }
            }
            let n = T::from_usize(idx.len()).expect("subword count fits the scalar type");
            acc.iter_mut().for_each(|a| *a /= n);
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> SentenceRecord {
        SentenceRecord::from_subwords(
            vec!["x".into(), "yz".into()],
            &[vec![9.0, 9.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0], vec![1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn modes() {
        let r = sample();
        assert_eq!(pool_subwords::<f64>(&r, 1, PoolingMode::Mean).unwrap(), [0.5, 0.5]);
        assert_eq!(pool_subwords::<f64>(&r, 1, PoolingMode::First).unwrap(), [1.0, 0.0]);
        assert_eq!(pool_subwords::<f64>(&r, 1, PoolingMode::Last).unwrap(), [0.0, 1.0]);
        for mode in [PoolingMode::Mean, PoolingMode::First, PoolingMode::Last] {
            assert_eq!(pool_subwords::<f32>(&r, 0, mode).unwrap(), [9.0, 9.0]);
        }
    }

    #[test]
    fn out_of_range_word() {
        assert!(matches!(
            pool_subwords::<f32>(&sample(), 2, PoolingMode::Mean),
            Err(DumpError::WordIndex { index: 2, len: 2 })
        ));
    }

    proptest! {
        #[test]
        fn mean_matches_sum_over_len(
            vectors in proptest::collection::vec(proptest::collection::vec(-100f32..100.0, 3), 1..12),
            pick in proptest::collection::vec(any::<bool>(), 12),
        ) {
            let mut idx: Vec<usize> = (0..vectors.len()).filter(|&i| pick[i]).collect();
            if idx.is_empty() {
                idx.push(0);
            }
            let rec = SentenceRecord::from_subwords(vec!["w".into()], &vectors, vec![idx.clone()]).unwrap();
            let got = pool_subwords::<f64>(&rec, 0, PoolingMode::Mean).unwrap();
            for j in 0..3 {
                let oracle = idx.iter().map(|&i| vectors[i][j] as f64).sum::<f64>() / idx.len() as f64;
                prop_assert!((got[j] - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()));
            }
        }
    }
}
