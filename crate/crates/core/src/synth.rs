//! Planted co-cluster corpora for recovery tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{ConceptEntry, Corpus, DocumentRecord};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedConfig {
    pub n_docs: usize,
    pub n_concepts: usize,
    pub n_blocks: usize,
    /// Membership probability inside a block.
    pub p_in: f64,
    /// Membership probability across blocks.
    pub p_out: f64,
    pub seed: u64,
}

impl PlantedConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} is not a probability"));
            }
        }
        if self.p_in < self.p_out {
            return bad(format!("p_in ({}) must not be below p_out ({})", self.p_in, self.p_out));
        }
        if self.n_blocks == 0 || self.n_blocks > self.n_docs || self.n_blocks > self.n_concepts {
            return bad(format!(
                "n_blocks = {} must be in 1..=min(n_docs, n_concepts)",
                self.n_blocks
            ));
        }
        Ok(())
    }

    /// Block of document or concept `i`; remainders are dealt round-robin.
    pub fn block_of(&self, i: usize) -> usize {
        i % self.n_blocks
    }
}

/// Draws each document–concept membership independently with `p_in` inside
/// a block and `p_out` across. The block is stored as the document's single
/// category `block<k>`.
pub fn generate_synthetic(config: &PlantedConfig) -> Result<Corpus> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let vocabulary = (0..config.n_concepts)
        .map(|c| ConceptEntry {
            concept_id: c as u32,
            name: format!("concept{c}"),
            is_generic: false,
            doc_count: 0,
        })
        .collect();
    let documents = (0..config.n_docs)
        .map(|d| {
            let block = config.block_of(d);
            let concept_ids = (0..config.n_concepts)
                .filter(|&c| {
                    let p = if config.block_of(c) == block {
                        config.p_in
                    } else {
                        config.p_out
                    };
                    rng.random::<f64>() < p
                })
                .map(|c| c as u32)
                .collect();
            DocumentRecord {
                doc_id: d as u32,
                external_id: format!("synth-{d}"),
                categories: vec![format!("block{block}")],
                concept_ids,
            }
        })
        .collect();
    Corpus::new(vocabulary, documents)
}
