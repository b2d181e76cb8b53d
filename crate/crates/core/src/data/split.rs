//! Person-disjoint train/validation/test split plans.
//!
//! Repetitions are grouped into cycles of `floor(P / test_size)` folds.
//! Each cycle shuffles the person ids once (stream = cycle index) and walks
//! the permutation in consecutive disjoint test blocks, so every person is
//! tested within one cycle whenever `test_size` divides the person count.
//! The validation block follows the test block cyclically; everyone else
//! trains.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TEST_SIZE: usize = 3;
pub const DEFAULT_VAL_SIZE: usize = 3;
pub const DEFAULT_REPETITIONS: usize = 10;

/// One repetition's person assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Repetition {
    pub train_ids: Vec<String>,
    pub val_ids: Vec<String>,
    pub test_ids: Vec<String>,
}

impl Repetition {
    pub fn is_disjoint(&self) -> bool {
        let in_two = |id: &String| {
            (self.train_ids.contains(id) as u8)
                + (self.val_ids.contains(id) as u8)
                + (self.test_ids.contains(id) as u8)
        };
        self.train_ids
            .iter()
            .chain(&self.val_ids)
            .chain(&self.test_ids)
            .all(|id| in_two(id) == 1)
    }
}

/// All repetitions of one experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub repetitions: Vec<Repetition>,
}

pub fn make_split_plan(person_ids: &[String], repetitions: usize, seed: u64) -> Result<SplitPlan> {
    make_split_plan_sized(
        person_ids,
        repetitions,
        DEFAULT_TEST_SIZE,
        DEFAULT_VAL_SIZE,
        seed,
    )
}

pub fn make_split_plan_sized(
    person_ids: &[String],
    repetitions: usize,
    test_size: usize,
    val_size: usize,
    seed: u64,
) -> Result<SplitPlan> {
    if repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be >= 1".into()));
    }
    if test_size == 0 || val_size == 0 {
        return Err(Error::InvalidArgument(
            "test_size and val_size must be >= 1".into(),
        ));
    }
    let n = person_ids.len();
    if n < test_size + val_size + 1 {
        return Err(Error::InvalidArgument(format!(
            "{n} persons cannot fill test {test_size} + val {val_size} + at least 1 train"
        )));
    }
    for (i, id) in person_ids.iter().enumerate() {
        if person_ids[..i].contains(id) {
            return Err(Error::InvalidArgument(format!("duplicate person id `{id}`")));
        }
    }

    let folds = n / test_size;
    let mut reps = Vec::with_capacity(repetitions);
    let mut perm: Vec<String> = Vec::new();
    for rep in 0..repetitions {
        let cycle = rep / folds;
        let slot = rep % folds;
        if slot == 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(cycle as u64);
            perm = person_ids.to_vec();
            perm.shuffle(&mut rng);
        }
        let start = slot * test_size;
        let test_ids: Vec<String> = perm[start..start + test_size].to_vec();
        let val_ids: Vec<String> = (0..val_size)
            .map(|i| perm[(start + test_size + i) % n].clone())
            .collect();
        let train_ids: Vec<String> = perm
            .iter()
            .filter(|id| !test_ids.contains(id) && !val_ids.contains(id))
            .cloned()
            .collect();
        let rep = Repetition {
            train_ids,
            val_ids,
            test_ids,
        };
        debug_assert!(rep.is_disjoint());
        reps.push(rep);
    }
    Ok(SplitPlan {
        seed,
        repetitions: reps,
    })
}
