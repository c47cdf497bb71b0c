#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "engram/embedding.hpp"
#include "engram/recall_engine.hpp"
#include "engram/stats.hpp"

namespace engram {

// One candidate event inside a benchmark task. relevance and gradient may be
// given as precomputed columns (to replay reference tables exactly) or left
// out, in which case relevance is computed from the content via the embedder
// and the gradient defaults to 1.
struct EvalEvent {
    std::string label;
    std::string content;
    std::int64_t timestamp = 0;
    std::optional<int> importance;
    std::optional<double> relevance;
    std::optional<double> gradient;
};

struct EvalTask {
    std::string task_id;
    std::string query;
    std::int64_t query_time = 0;
    std::string correct_label;
    std::vector<EvalEvent> events;
};

struct EvalDataset {
    static constexpr int kSchemaVersion = 1;
    std::string name;
    std::vector<EvalTask> tasks;
};

EvalDataset dataset_from_json(const nlohmann::json& doc, const std::string& origin);
EvalDataset load_dataset(const std::filesystem::path& path);

// Numerically stable softmax (max subtraction).
std::vector<double> softmax(std::span<const double> values);

// Loss of one task: min-max normalize the scores, softmax them, then half the
// summed squared error against the one-hot correct label. Requires at least
// two scores. Invariant under positive affine transforms of the raw scores.
double task_loss(std::span<const double> scores, std::size_t correct_index);

struct ModelTaskResult {
    std::vector<double> scores;  // event order of the task
    std::size_t argmax_index = 0;
    std::string argmax_label;
    bool correct = false;
    double loss = 0.0;
};

struct TaskReport {
    std::string task_id;
    std::string correct_label;
    std::vector<std::string> labels;
    std::vector<ModelTaskResult> results;  // parallel to EvalReport::models
};

struct EvalReport {
    std::string dataset_name;
    std::vector<ScorerKind> models;
    std::vector<TaskReport> tasks;          // ordered by task_id
    std::vector<double> mean_loss;          // parallel to models
    std::optional<PairedTTestResult> comparison;  // models[0] vs models[1], two-model runs only
    double comparison_critical_t = 0.0;     // two-tailed 0.05 critical value at the report dof
    EngineConfig config;
};

// Scores every task with every model, computes per-task losses and, when
// exactly two models are given, the paired t-test over those losses.
// Deterministic for a fixed dataset and config.
EvalReport run_benchmark(const EvalDataset& dataset, const std::vector<ScorerKind>& models,
                         const EngineConfig& config, Embedder& embedder);

// Report serializations. JSON output is byte-stable across runs: numeric
// values are rounded to 10 significant digits before serialization.
nlohmann::ordered_json report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);

}  // namespace engram
