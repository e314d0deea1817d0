use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{AdaBoostParams, ForestParams, KnnParams, MlpParams, TreeParams};
use crate::ensemble::TieBreak;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Tree,
    Forest,
    AdaBoost,
    Mlp,
    NaiveBayes,
    Knn,
    Voting,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Tree,
        ModelKind::Forest,
        ModelKind::AdaBoost,
        ModelKind::Mlp,
        ModelKind::NaiveBayes,
        ModelKind::Knn,
        ModelKind::Voting,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Tree => "tree",
            ModelKind::Forest => "forest",
            ModelKind::AdaBoost => "adaboost",
            ModelKind::Mlp => "mlp",
            ModelKind::NaiveBayes => "naive_bayes",
            ModelKind::Knn => "knn",
            ModelKind::Voting => "voting",
        }
    }

    /// Name used in benchmark tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelKind::Tree => "J48",
            ModelKind::Forest => "RandomForest",
            ModelKind::AdaBoost => "AdaBoost",
            ModelKind::Mlp => "MultilayerPerceptron",
            ModelKind::NaiveBayes => "NaiveBayes",
            ModelKind::Knn => "KNN",
            ModelKind::Voting => "Ensemble 1 (MLP+RF+AdaBoost)",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tree" | "j48" => Ok(ModelKind::Tree),
            "forest" | "rf" | "randomforest" => Ok(ModelKind::Forest),
            "adaboost" => Ok(ModelKind::AdaBoost),
            "mlp" | "multilayerperceptron" => Ok(ModelKind::Mlp),
            "naive_bayes" | "nb" | "naivebayes" => Ok(ModelKind::NaiveBayes),
            "knn" => Ok(ModelKind::Knn),
            "voting" | "ensemble" => Ok(ModelKind::Voting),
            other => Err(Error::Config(format!("unknown model kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VotingParams {
    pub members: Vec<ModelSpec>,
    pub tie_break: TieBreak,
    pub seed: u64,
}

impl Default for VotingParams {
    fn default() -> Self {
        VotingParams {
            members: vec![
                ModelSpec::Mlp(MlpParams::default()),
                ModelSpec::Forest(ForestParams::default()),
                ModelSpec::AdaBoost(AdaBoostParams::default()),
            ],
            tie_break: TieBreak::Confidence,
            seed: 0,
        }
    }
}

/// Kind plus hyperparameters of a model to train.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ModelSpec {
    Tree(TreeParams),
    Forest(ForestParams),
    AdaBoost(AdaBoostParams),
    Mlp(MlpParams),
    NaiveBayes,
    Knn(KnnParams),
    Voting(VotingParams),
}

impl ModelSpec {
    pub fn default_for(kind: ModelKind) -> ModelSpec {
        match kind {
            ModelKind::Tree => ModelSpec::Tree(TreeParams::default()),
            ModelKind::Forest => ModelSpec::Forest(ForestParams::default()),
            ModelKind::AdaBoost => ModelSpec::AdaBoost(AdaBoostParams::default()),
            ModelKind::Mlp => ModelSpec::Mlp(MlpParams::default()),
            ModelKind::NaiveBayes => ModelSpec::NaiveBayes,
            ModelKind::Knn => ModelSpec::Knn(KnnParams::default()),
            ModelKind::Voting => ModelSpec::Voting(VotingParams::default()),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Tree(_) => ModelKind::Tree,
            ModelSpec::Forest(_) => ModelKind::Forest,
            ModelSpec::AdaBoost(_) => ModelKind::AdaBoost,
            ModelSpec::Mlp(_) => ModelKind::Mlp,
            ModelSpec::NaiveBayes => ModelKind::NaiveBayes,
            ModelSpec::Knn(_) => ModelKind::Knn,
            ModelSpec::Voting(_) => ModelKind::Voting,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            ModelSpec::Forest(p) => Some(p.seed),
            ModelSpec::AdaBoost(p) => Some(p.seed),
            ModelSpec::Mlp(p) => Some(p.seed),
            ModelSpec::Voting(p) => Some(p.seed),
            _ => None,
        }
    }

    /// Copy with every seeded component reseeded from `seed`.
    pub fn with_seed(&self, seed: u64) -> ModelSpec {
        let mut s = self.clone();
        match &mut s {
            ModelSpec::Forest(p) => p.seed = seed,
            ModelSpec::AdaBoost(p) => p.seed = seed,
            ModelSpec::Mlp(p) => p.seed = seed,
            ModelSpec::Voting(p) => p.seed = seed,
            _ => {}
        }
        s
    }

    /// Sets one named hyperparameter from its text form.
    pub fn set(&mut self, param: &str, value: &str) -> Result<()> {
        let kind = self.kind();
        let bad = || Error::Config(format!("bad value `{value}` for {kind}.{param}"));
        fn num<T: FromStr>(v: &str) -> Option<T> {
            v.trim().parse().ok()
        }
        let depth = |v: &str| -> Option<Option<usize>> {
            match v {
                "none" | "unlimited" | "inf" => Some(None),
                _ => num(v).map(Some),
            }
        };
        let ok = match (&mut *self, param) {
            (ModelSpec::Tree(p), "min_leaf") => num(value).map(|v| p.min_leaf = v).is_some(),
            (ModelSpec::Tree(p), "max_depth") => depth(value).map(|v| p.max_depth = v).is_some(),
            (ModelSpec::Tree(p), "prune") => num(value).map(|v| p.prune = v).is_some(),
            (ModelSpec::Tree(p), "confidence") => num(value).map(|v| p.confidence = v).is_some(),
            (ModelSpec::Forest(p), "n_trees") => num(value).map(|v| p.n_trees = v).is_some(),
            (ModelSpec::Forest(p), "features_per_split") => match value {
                "auto" | "sqrt" => {
                    p.features_per_split = None;
                    true
                }
                v => num(v).map(|v| p.features_per_split = Some(v)).is_some(),
            },
            (ModelSpec::Forest(p), "bootstrap") => num(value).map(|v| p.bootstrap = v).is_some(),
            (ModelSpec::Forest(p), "min_leaf") => num(value).map(|v| p.tree.min_leaf = v).is_some(),
            (ModelSpec::Forest(p), "max_depth") => depth(value).map(|v| p.tree.max_depth = v).is_some(),
            (ModelSpec::AdaBoost(p), "n_rounds") => num(value).map(|v| p.n_rounds = v).is_some(),
            (ModelSpec::AdaBoost(p), "weak_depth") => num(value).map(|v| p.weak_depth = v).is_some(),
            (ModelSpec::Mlp(p), "learning_rate") => num(value).map(|v| p.learning_rate = v).is_some(),
            (ModelSpec::Mlp(p), "momentum") => num(value).map(|v| p.momentum = v).is_some(),
            (ModelSpec::Mlp(p), "epochs") => num(value).map(|v| p.epochs = v).is_some(),
            (ModelSpec::Mlp(p), "hidden") | (ModelSpec::Mlp(p), "hidden_layers") => match value {
                "auto" | "a" => {
                    p.hidden_layers = None;
                    true
                }
                "" | "0" | "none" => {
                    p.hidden_layers = Some(Vec::new());
                    true
                }
                v => {
                    let layers: Option<Vec<usize>> = v.split([',', ':']).map(num).collect();
                    layers.map(|l| p.hidden_layers = Some(l)).is_some()
                }
            },
            (ModelSpec::Knn(p), "k") => num(value).map(|v| p.k = v).is_some(),
            (_, "seed") => match num::<u64>(value) {
                Some(s) => {
                    let reseeded = self.with_seed(s);
                    *self = reseeded;
                    true
                }
                None => false,
            },
            _ => {
                return Err(Error::Config(format!("{kind} has no hyperparameter `{param}`")));
            }
        };
        if ok {
            Ok(())
        } else {
            Err(bad())
        }
    }

    /// Checks the invariants of every field.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(format!("{}: {msg}", self.kind())));
        match self {
            ModelSpec::Tree(p) => p.validate().or_else(|e| fail(&e)),
            ModelSpec::Forest(p) => {
                if p.n_trees == 0 {
                    return fail("n_trees must be >= 1");
                }
                if p.features_per_split == Some(0) {
                    return fail("features_per_split must be >= 1");
                }
                p.tree.validate().or_else(|e| fail(&e))
            }
            ModelSpec::AdaBoost(p) => {
                if p.n_rounds == 0 || p.weak_depth == 0 {
                    return fail("n_rounds and weak_depth must be >= 1");
                }
                Ok(())
            }
            ModelSpec::Mlp(p) => {
                if !(p.learning_rate > 0.0) {
                    return fail("learning_rate must be > 0");
                }
                if !(0.0..1.0).contains(&p.momentum) {
                    return fail("momentum must be in [0, 1)");
                }
                if p.epochs == 0 {
                    return fail("epochs must be >= 1");
                }
                if p.hidden_layers.as_ref().is_some_and(|h| h.contains(&0)) {
                    return fail("hidden layer sizes must be >= 1");
                }
                Ok(())
            }
            ModelSpec::NaiveBayes => Ok(()),
            ModelSpec::Knn(p) => {
                if p.k == 0 || p.k % 2 == 0 {
                    return fail("k must be odd");
                }
                Ok(())
            }
            ModelSpec::Voting(p) => {
                if p.members.len() < 2 {
                    return Err(Error::Config("ensemble requires ≥ 2 members".into()));
                }
                p.members.iter().try_for_each(ModelSpec::validate)
            }
        }
    }
}
