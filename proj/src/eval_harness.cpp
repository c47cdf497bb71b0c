#include "engram/eval_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "engram/errors.hpp"
#include "engram/memory_math.hpp"

namespace engram {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void dataset_error(const std::string& origin, const std::string& task,
                                const std::string& what) {
    std::string where = origin;
    if (!task.empty()) where += ", task '" + task + "'";
    throw ValidationError("malformed dataset (" + where + "): " + what);
}

EvalEvent event_from_json(const json& doc, const std::string& origin, const std::string& task) {
    if (!doc.is_object()) dataset_error(origin, task, "event entries must be objects");
    EvalEvent event;
    if (!doc.contains("label") || !doc["label"].is_string()) {
        dataset_error(origin, task, "event field 'label' missing or not a string");
    }
    event.label = doc["label"].get<std::string>();
    if (!doc.contains("content") || !doc["content"].is_string()) {
        dataset_error(origin, task, "event '" + event.label + "' field 'content' missing");
    }
    event.content = doc["content"].get<std::string>();
    if (!doc.contains("timestamp") || !doc["timestamp"].is_number_integer()) {
        dataset_error(origin, task, "event '" + event.label + "' field 'timestamp' missing");
    }
    event.timestamp = doc["timestamp"].get<std::int64_t>();
    if (doc.contains("importance")) {
        if (!doc["importance"].is_number_integer()) {
            dataset_error(origin, task, "event '" + event.label + "' field 'importance' not an integer");
        }
        event.importance = doc["importance"].get<int>();
        if (*event.importance < 1 || *event.importance > 10) {
            dataset_error(origin, task, "event '" + event.label + "' importance out of [1, 10]");
        }
    }
    if (doc.contains("relevance")) {
        if (!doc["relevance"].is_number()) {
            dataset_error(origin, task, "event '" + event.label + "' field 'relevance' not a number");
        }
        event.relevance = doc["relevance"].get<double>();
        if (*event.relevance < -1.0 || *event.relevance > 1.0) {
            dataset_error(origin, task, "event '" + event.label + "' relevance out of [-1, 1]");
        }
    }
    if (doc.contains("gradient")) {
        if (!doc["gradient"].is_number()) {
            dataset_error(origin, task, "event '" + event.label + "' field 'gradient' not a number");
        }
        event.gradient = doc["gradient"].get<double>();
        if (!(*event.gradient >= 1.0)) {
            dataset_error(origin, task, "event '" + event.label + "' gradient must be >= 1");
        }
    }
    return event;
}

}  // namespace

EvalDataset dataset_from_json(const json& doc, const std::string& origin) {
    if (!doc.is_object()) dataset_error(origin, "", "top level must be an object");
    if (doc.value("schema_version", -1) != EvalDataset::kSchemaVersion) {
        dataset_error(origin, "", "schema_version must be " +
                                      std::to_string(EvalDataset::kSchemaVersion));
    }
    EvalDataset dataset;
    dataset.name = doc.value("name", origin);
    if (!doc.contains("tasks") || !doc["tasks"].is_array() || doc["tasks"].empty()) {
        dataset_error(origin, "", "field 'tasks' missing or empty");
    }
    for (const auto& task_doc : doc["tasks"]) {
        EvalTask task;
        if (!task_doc.contains("task_id") || !task_doc["task_id"].is_string()) {
            dataset_error(origin, "", "task field 'task_id' missing or not a string");
        }
        task.task_id = task_doc["task_id"].get<std::string>();
        for (const auto& existing : dataset.tasks) {
            if (existing.task_id == task.task_id) {
                dataset_error(origin, task.task_id, "duplicate task_id");
            }
        }
        if (!task_doc.contains("query") || !task_doc["query"].is_string()) {
            dataset_error(origin, task.task_id, "field 'query' missing or not a string");
        }
        task.query = task_doc["query"].get<std::string>();
        if (!task_doc.contains("query_time") || !task_doc["query_time"].is_number_integer()) {
            dataset_error(origin, task.task_id, "field 'query_time' missing or not an integer");
        }
        task.query_time = task_doc["query_time"].get<std::int64_t>();
        if (!task_doc.contains("correct_label") || !task_doc["correct_label"].is_string()) {
            dataset_error(origin, task.task_id, "field 'correct_label' missing or not a string");
        }
        task.correct_label = task_doc["correct_label"].get<std::string>();
        if (!task_doc.contains("events") || !task_doc["events"].is_array()) {
            dataset_error(origin, task.task_id, "field 'events' missing or not an array");
        }
        for (const auto& event_doc : task_doc["events"]) {
            task.events.push_back(event_from_json(event_doc, origin, task.task_id));
        }
        if (task.events.size() < 2) {
            dataset_error(origin, task.task_id, "needs at least two events");
        }
        std::size_t correct_count = 0;
        for (std::size_t i = 0; i < task.events.size(); ++i) {
            for (std::size_t j = i + 1; j < task.events.size(); ++j) {
                if (task.events[i].label == task.events[j].label) {
                    dataset_error(origin, task.task_id,
                                  "duplicate event label '" + task.events[i].label + "'");
                }
            }
            if (task.events[i].label == task.correct_label) ++correct_count;
        }
        if (correct_count != 1) {
            dataset_error(origin, task.task_id,
                          "correct_label '" + task.correct_label + "' must match exactly one event");
        }
        dataset.tasks.push_back(std::move(task));
    }
    return dataset;
}

EvalDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("dataset file not found: " + path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ValidationError("dataset " + path.string() + " is not valid JSON: " + e.what());
    }
    return dataset_from_json(doc, path.filename().string());
}

std::vector<double> softmax(std::span<const double> values) {
    if (values.empty()) {
        throw ValidationError("softmax: empty input");
    }
    const double max_value = *std::max_element(values.begin(), values.end());
    std::vector<double> out(values.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = std::exp(values[i] - max_value);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return out;
}

double task_loss(std::span<const double> scores, std::size_t correct_index) {
    if (scores.size() < 2) {
        throw ValidationError("task_loss: need at least two scores");
    }
    if (correct_index >= scores.size()) {
        throw ValidationError("task_loss: correct_index out of range");
    }
    const auto normalized = min_max_normalize(scores);
    const auto probabilities = softmax(normalized);
    double loss = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const double target = (i == correct_index) ? 1.0 : 0.0;
        const double diff = probabilities[i] - target;
        loss += diff * diff;
    }
    return 0.5 * loss;
}

EvalReport run_benchmark(const EvalDataset& dataset, const std::vector<ScorerKind>& models,
                         const EngineConfig& config, Embedder& embedder) {
    if (models.empty()) {
        throw ValidationError("run_benchmark: at least one model is required");
    }
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (std::size_t j = i + 1; j < models.size(); ++j) {
            if (models[i] == models[j]) {
                throw ValidationError("run_benchmark: duplicate model in list");
            }
        }
    }

    EvalReport report;
    report.dataset_name = dataset.name;
    report.models = models;
    report.config = config;

    // Content embeddings are cached so repeated texts across tasks embed once.
    std::map<std::string, Embedding> embedding_cache;
    const auto embed_cached = [&](const std::string& text) -> const Embedding& {
        auto it = embedding_cache.find(text);
        if (it == embedding_cache.end()) {
            it = embedding_cache.emplace(text, embedder.embed(text)).first;
        }
        return it->second;
    };

    for (const auto& task : dataset.tasks) {
        TaskReport task_report;
        task_report.task_id = task.task_id;
        task_report.correct_label = task.correct_label;

        std::size_t correct_index = 0;
        std::vector<double> relevances(task.events.size());
        for (std::size_t i = 0; i < task.events.size(); ++i) {
            const auto& event = task.events[i];
            task_report.labels.push_back(event.label);
            if (event.label == task.correct_label) correct_index = i;
            if (event.relevance) {
                relevances[i] = *event.relevance;
            } else {
                const auto& query_embedding = embed_cached(task.query);
                const auto& content_embedding = embed_cached(event.content);
                relevances[i] =
                    cosine_similarity(query_embedding.values, content_embedding.values).value;
            }
        }

        for (const auto model : models) {
            ModelTaskResult result;
            result.scores.resize(task.events.size());
            for (std::size_t i = 0; i < task.events.size(); ++i) {
                const auto& event = task.events[i];
                const double elapsed =
                    task.query_time >= event.timestamp
                        ? static_cast<double>(task.query_time - event.timestamp)
                        : 0.0;  // future-plan events clamp to zero elapsed
                result.scores[i] = score_memory(
                    Relevance{relevances[i]}, elapsed, event.gradient.value_or(1.0),
                    event.importance.value_or(kDefaultImportance), model, config);
            }
            result.argmax_index = static_cast<std::size_t>(
                std::max_element(result.scores.begin(), result.scores.end()) -
                result.scores.begin());
            result.argmax_label = task.events[result.argmax_index].label;
            result.correct = result.argmax_index == correct_index;
            result.loss = task_loss(result.scores, correct_index);
            task_report.results.push_back(std::move(result));
        }
        report.tasks.push_back(std::move(task_report));
    }

    std::sort(report.tasks.begin(), report.tasks.end(),
              [](const TaskReport& a, const TaskReport& b) { return a.task_id < b.task_id; });

    report.mean_loss.assign(models.size(), 0.0);
    for (const auto& task_report : report.tasks) {
        for (std::size_t m = 0; m < models.size(); ++m) {
            report.mean_loss[m] += task_report.results[m].loss;
        }
    }
    for (double& loss : report.mean_loss) loss /= static_cast<double>(report.tasks.size());

    if (models.size() == 2 && report.tasks.size() >= 2) {
        std::vector<double> losses_a, losses_b;
        for (const auto& task_report : report.tasks) {
            losses_a.push_back(task_report.results[0].loss);
            losses_b.push_back(task_report.results[1].loss);
        }
        report.comparison = paired_t_test(losses_a, losses_b);
        report.comparison_critical_t =
            student_t_critical_two_tailed(0.05, static_cast<double>(report.comparison->dof));
    }
    return report;
}

namespace {

// Rounds to 10 significant digits so report bytes do not depend on last-ulp
// differences between libm implementations.
double round_for_report(double value) {
    if (!std::isfinite(value)) return value;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return std::strtod(buf, nullptr);
}

ordered_json rounded_array(const std::vector<double>& values) {
    ordered_json out = ordered_json::array();
    for (double v : values) out.push_back(round_for_report(v));
    return out;
}

}  // namespace

ordered_json report_to_json(const EvalReport& report) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["dataset"] = ordered_json{{"name", report.dataset_name},
                                  {"task_count", report.tasks.size()}};
    doc["config"] = ordered_json{
        {"tau_decay_seconds", round_for_report(report.config.scaling.decay_unit_seconds)},
        {"tau_consolidation_seconds",
         round_for_report(report.config.scaling.consolidation_unit_seconds)},
        {"default_importance", kDefaultImportance},
        {"baseline_weights",
         ordered_json{{"w_recency", round_for_report(report.config.baseline.w_recency)},
                      {"w_importance", round_for_report(report.config.baseline.w_importance)},
                      {"w_relevance", round_for_report(report.config.baseline.w_relevance)},
                      {"recency_decay_per_hour",
                       round_for_report(report.config.baseline.recency_decay_per_hour)},
                      {"importance_scale",
                       round_for_report(report.config.baseline.importance_scale)}}}};
    auto& models = doc["models"] = ordered_json::array();
    for (const auto model : report.models) models.push_back(to_string(model));

    auto& tasks = doc["tasks"] = ordered_json::array();
    for (const auto& task : report.tasks) {
        ordered_json task_doc;
        task_doc["task_id"] = task.task_id;
        task_doc["correct_label"] = task.correct_label;
        task_doc["labels"] = task.labels;
        auto& results = task_doc["results"] = ordered_json::object();
        for (std::size_t m = 0; m < report.models.size(); ++m) {
            const auto& result = task.results[m];
            results[to_string(report.models[m])] =
                ordered_json{{"scores", rounded_array(result.scores)},
                             {"argmax_label", result.argmax_label},
                             {"correct", result.correct},
                             {"loss", round_for_report(result.loss)}};
        }
        tasks.push_back(std::move(task_doc));
    }

    auto& summary = doc["summary"] = ordered_json::object();
    auto& mean_loss = summary["mean_loss"] = ordered_json::object();
    for (std::size_t m = 0; m < report.models.size(); ++m) {
        mean_loss[to_string(report.models[m])] = round_for_report(report.mean_loss[m]);
    }
    if (report.comparison) {
        const auto& cmp = *report.comparison;
        summary["comparison"] = ordered_json{
            {"models", ordered_json::array({to_string(report.models[0]),
                                            to_string(report.models[1])})},
            {"mean_difference", round_for_report(cmp.mean_difference)},
            {"t_statistic", round_for_report(cmp.t)},
            {"p_value", round_for_report(cmp.p)},
            {"dof", cmp.dof},
            {"confidence_interval_95", ordered_json::array({round_for_report(cmp.ci95_low),
                                                            round_for_report(cmp.ci95_high)})},
            {"critical_t_two_tailed_0_05", round_for_report(report.comparison_critical_t)}};
    }
    return doc;
}

std::string report_to_text(const EvalReport& report) {
    std::ostringstream out;
    char line[256];
    out << "benchmark: " << report.dataset_name << "  (" << report.tasks.size() << " tasks)\n";
    out << "models:";
    for (const auto model : report.models) out << ' ' << to_string(model);
    out << "\n\n";

    std::snprintf(line, sizeof(line), "%-12s %-8s", "task", "correct");
    out << line;
    for (const auto model : report.models) {
        std::snprintf(line, sizeof(line), " %20s", to_string(model));
        out << line;
    }
    out << '\n';
    for (const auto& task : report.tasks) {
        std::snprintf(line, sizeof(line), "%-12s %-8s", task.task_id.c_str(),
                      task.correct_label.c_str());
        out << line;
        for (const auto& result : task.results) {
            std::snprintf(line, sizeof(line), "      %4s %c loss=%.4f",
                          result.argmax_label.c_str(), result.correct ? '+' : '-', result.loss);
            out << line;
        }
        out << '\n';
    }
    out << '\n';
    for (std::size_t m = 0; m < report.models.size(); ++m) {
        std::snprintf(line, sizeof(line), "mean loss %-10s %.6f\n", to_string(report.models[m]),
                      report.mean_loss[m]);
        out << line;
    }
    if (report.comparison) {
        const auto& cmp = *report.comparison;
        std::snprintf(line, sizeof(line),
                      "paired t-test (%s - %s): t=%.4f p=%.6f dof=%d\n",
                      to_string(report.models[0]), to_string(report.models[1]), cmp.t, cmp.p,
                      cmp.dof);
        out << line;
        std::snprintf(line, sizeof(line),
                      "mean difference %.6f, 95%% CI [%.6f, %.6f], critical t = +/-%.3f\n",
                      cmp.mean_difference, cmp.ci95_low, cmp.ci95_high,
                      report.comparison_critical_t);
        out << line;
    }
    return out.str();
}

}  // namespace engram
