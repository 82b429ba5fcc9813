#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sentipred/calendar.hpp"
#include "sentipred/classifier.hpp"
#include "sentipred/indicators.hpp"

namespace sentipred {

/// Every knob of the pipeline in one place. A run is reproducible from the
/// config plus the input files; the canonical hash of the config is embedded
/// in every artifact.
struct PipelineConfig {
    // inputs
    std::string comments_path;
    std::string market_path;
    std::string comments_format = "csv";  // csv | jsonl
    std::string stock_symbol = "stock";
    std::string stemmer_dict_path;
    std::string stopwords_path;
    std::string out_dir = "out";

    // lexicon
    int df_threshold = 3;
    double smoothing = 0.5;

    // classification
    std::string algorithm = "bagging";  // naive_bayes | decision_tree | bagging
    int bagging_size = 25;
    double pruning_confidence = 0.25;
    int max_depth = 30;
    int min_leaf = 2;
    int folds = 10;
    bool include_score = true;

    // day alignment
    std::string cutoff = "12:30";
    int input_utc_offset_minutes = 210;  // +03:30

    // trust
    std::string trust_window_start;  // empty = first trading date
    std::string trust_window_end;    // empty = second-to-last trading date
    double default_tc = 0.5;

    // indices
    std::string missing_policy = "neutral";

    // model building / evaluation
    int max_lag = 5;
    double alpha = 0.05;
    double train_fraction = 0.9;

    std::uint64_t seed = 42;
};

/// Parses a key=value config file ('#' comments, blank lines ignored).
/// Unknown keys are an error.
PipelineConfig load_config(const std::string& path);

/// Applies key=value overrides (e.g. from command-line flags) on top of the
/// loaded config. Flags win.
void apply_override(PipelineConfig& config, const std::string& key, const std::string& value);

/// Validates every field and reports all problems at once.
/// `check_input_paths` additionally requires the referenced input files to
/// exist (used before stages that read them).
std::vector<std::string> validate_config(const PipelineConfig& config,
                                         bool check_input_paths = false);

/// Canonical serialization (sorted key=value lines) and its FNV-1a hash;
/// the hash plus seed is stamped into every output artifact.
std::string canonical_config(const PipelineConfig& config);
std::string config_hash(const PipelineConfig& config);

enum class Stage {
    ingest,
    preprocess,
    build_lexicon,
    train,
    classify,
    trust,
    indices,
    analyze,
    fit,
    evaluate,
    report,
};

std::string to_string(Stage stage);
Stage stage_from_string(const std::string& s);
const std::vector<Stage>& all_stages();

/// Input artifacts the stage reads and the artifacts it writes, as paths
/// under the configured output directory (used for dependency checks and
/// --dry-run plans).
std::vector<std::string> stage_inputs(Stage stage, const PipelineConfig& config);
std::vector<std::string> stage_outputs(Stage stage, const PipelineConfig& config);

/// Runs one stage. Throws with an actionable message when an upstream
/// artifact is missing (naming the stage to run first) or when the config
/// is invalid. Idempotent: identical inputs and seed give identical bytes.
void run_stage(Stage stage, const PipelineConfig& config);

}  // namespace sentipred
