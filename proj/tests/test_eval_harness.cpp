#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "engram/errors.hpp"
#include "engram/eval_harness.hpp"
#include "support/generators.hpp"
#include "support/stats_oracle.hpp"

using namespace engram;
using engram::test::uniform;
using engram::test::uniform_int;

namespace {

const std::filesystem::path kDataDir = ENGRAM_DATA_DIR;

}  // namespace

TEST_CASE("task_loss: equal scores give the uniform-softmax loss") {
    const std::vector<double> flat{0.7, 0.7, 0.7, 0.7};
    // softmax of all-zeros is uniform 1/4: loss = 1/2 (0.75^2 + 3 * 0.25^2).
    CHECK(std::fabs(task_loss(flat, 1) - 0.375) < 1e-12);
}

TEST_CASE("task_loss: hand-evaluated two-event case") {
    const std::vector<double> scores{1.0, 0.0};
    // normalized [1, 0] -> softmax [e, 1]/(e+1); both squared errors equal
    // (1/(e+1))^2.
    const double q = 1.0 / (std::exp(1.0) + 1.0);
    const double expected = q * q;
    const double loss = task_loss(scores, 0);
    CHECK(loss == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::fabs(loss - 0.0723) < 1e-4);
}

TEST_CASE("task_loss: the correct argmax minimizes the loss over label placements") {
    std::mt19937_64 rng(55);
    for (int i = 0; i < 200; ++i) {
        const int n = uniform_int(rng, 2, 8);
        std::vector<double> scores(static_cast<std::size_t>(n));
        for (auto& s : scores) s = uniform(rng, -3.0, 3.0);
        const std::size_t argmax = static_cast<std::size_t>(
            std::max_element(scores.begin(), scores.end()) - scores.begin());
        const double best = task_loss(scores, argmax);
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (j == argmax) continue;
            CHECK(best <= task_loss(scores, j) + 1e-15);
        }
    }
}

TEST_CASE("task_loss validation") {
    CHECK_THROWS_AS((void)task_loss(std::vector<double>{1.0}, 0), ValidationError);
    CHECK_THROWS_AS((void)task_loss(std::vector<double>{1.0, 2.0}, 5), ValidationError);
}

TEST_CASE("task_loss is invariant under positive affine transforms (property)") {
    std::mt19937_64 rng(56);
    for (int i = 0; i < 1000; ++i) {
        const int n = uniform_int(rng, 2, 10);
        std::vector<double> scores(static_cast<std::size_t>(n));
        for (auto& s : scores) s = uniform(rng, -10.0, 10.0);
        const std::size_t correct = static_cast<std::size_t>(rng()) % scores.size();
        const double scale = uniform(rng, 0.001, 100.0);
        const double shift = uniform(rng, -50.0, 50.0);
        std::vector<double> transformed(scores.size());
        for (std::size_t j = 0; j < scores.size(); ++j) {
            transformed[j] = scale * scores[j] + shift;
        }
        const double base = task_loss(scores, correct);
        CHECK(task_loss(transformed, correct) == doctest::Approx(base).epsilon(1e-9));
        CHECK(base >= 0.0);
        CHECK(base < 1.0);
    }
}

TEST_CASE("softmax is stable under large offsets") {
    const std::vector<double> huge{1000.0, 1001.0};
    const auto soft = softmax(huge);
    CHECK(soft[0] == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-12));
    CHECK(soft[0] + soft[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("task0 replay: both models miss, in different directions") {
    const auto dataset = load_dataset(kDataDir / "task0.json");
    REQUIRE(dataset.tasks.size() == 1);
    LocalHashEmbedder embedder(256);
    const auto report = run_benchmark(dataset, {ScorerKind::proposed, ScorerKind::baseline},
                                      EngineConfig{}, embedder);
    REQUIRE(report.tasks.size() == 1);
    const auto& task = report.tasks.front();
    CHECK(task.correct_label == "B");
    CHECK(task.results[0].argmax_label == "A");
    CHECK_FALSE(task.results[0].correct);
    CHECK(task.results[1].argmax_label == "D");
    CHECK_FALSE(task.results[1].correct);
    // Proposed scores match the reference column within a hundredth.
    const double reference[] = {0.850, 0.830, 0.836, 0.836};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(std::fabs(task.results[0].scores[i] - reference[i]) < 0.01);
    }
    CHECK_FALSE(report.comparison.has_value());  // one task only: no t-test
}

TEST_CASE("synthetic benchmark: proposed wins with a significant negative t") {
    const auto dataset = load_dataset(kDataDir / "synthetic10.json");
    REQUIRE(dataset.tasks.size() == 10);
    LocalHashEmbedder embedder(256);
    const auto report = run_benchmark(dataset, {ScorerKind::proposed, ScorerKind::baseline},
                                      EngineConfig{}, embedder);
    REQUIRE(report.comparison.has_value());
    const auto& cmp = *report.comparison;
    CHECK(cmp.dof == 9);
    CHECK(cmp.t < 0.0);
    CHECK(cmp.t < -report.comparison_critical_t);  // designed to be significant
    CHECK(report.comparison_critical_t == doctest::Approx(2.2622).epsilon(1e-3));
    CHECK(report.mean_loss[0] < report.mean_loss[1]);
    CHECK(cmp.ci95_low <= cmp.mean_difference);
    CHECK(cmp.ci95_high >= cmp.mean_difference);
    CHECK(cmp.ci95_high < 0.0);  // the whole interval is below zero

    // Internal consistency against the quadrature oracle.
    CHECK(cmp.p ==
          doctest::Approx(engram::test::oracle_two_tailed_p(cmp.t, 9.0)).epsilon(1e-9));

    // Per-task losses recompute through the public loss pipeline.
    for (const auto& task : report.tasks) {
        for (const auto& result : task.results) {
            std::size_t correct = 0;
            for (std::size_t i = 0; i < task.labels.size(); ++i) {
                if (task.labels[i] == task.correct_label) correct = i;
            }
            CHECK(result.loss == doctest::Approx(task_loss(result.scores, correct)).epsilon(1e-12));
        }
    }
}

TEST_CASE("easy datasets score below the uniform loss for both models") {
    // Correct events with the highest relevance, the most recent timestamp and
    // g = 1 are easy for both scorers.
    EvalDataset dataset;
    dataset.name = "easy";
    std::mt19937_64 rng(91);
    for (int t = 0; t < 6; ++t) {
        EvalTask task;
        task.task_id = "easy" + std::to_string(t);
        task.query = "query";
        task.query_time = 1'000'000;
        task.correct_label = "A";
        task.events.push_back({"A", "correct", task.query_time - 3600, 8, 0.9, 1.0});
        task.events.push_back({"B", "decoy one", task.query_time - 40 * 86400,
                               uniform_int(rng, 1, 5), uniform(rng, 0.1, 0.5), 1.0});
        task.events.push_back({"C", "decoy two", task.query_time - 60 * 86400,
                               uniform_int(rng, 1, 5), uniform(rng, 0.1, 0.5), 1.0});
        task.events.push_back({"D", "decoy three", task.query_time - 80 * 86400,
                               uniform_int(rng, 1, 5), uniform(rng, 0.1, 0.5), 1.0});
        dataset.tasks.push_back(std::move(task));
    }
    LocalHashEmbedder embedder(64);
    const auto report = run_benchmark(dataset, {ScorerKind::proposed, ScorerKind::baseline},
                                      EngineConfig{}, embedder);
    for (const auto& task : report.tasks) {
        for (const auto& result : task.results) {
            CHECK(result.correct);
            CHECK(result.loss < 0.375);
        }
    }
}

TEST_CASE("single-model runs omit the comparison") {
    const auto dataset = load_dataset(kDataDir / "synthetic10.json");
    LocalHashEmbedder embedder(256);
    const auto report = run_benchmark(dataset, {ScorerKind::proposed}, EngineConfig{}, embedder);
    CHECK_FALSE(report.comparison.has_value());
    const auto doc = report_to_json(report);
    CHECK_FALSE(doc["summary"].contains("comparison"));
    CHECK(doc["summary"]["mean_loss"].contains("proposed"));
}

TEST_CASE("reports are byte-identical across runs") {
    const auto dataset = load_dataset(kDataDir / "synthetic10.json");
    std::string first, second;
    {
        LocalHashEmbedder embedder(256);
        first = report_to_json(run_benchmark(dataset, {ScorerKind::proposed, ScorerKind::baseline},
                                             EngineConfig{}, embedder))
                    .dump(2);
    }
    {
        LocalHashEmbedder embedder(256);
        second = report_to_json(run_benchmark(dataset, {ScorerKind::proposed, ScorerKind::baseline},
                                              EngineConfig{}, embedder))
                     .dump(2);
    }
    CHECK(first == second);
    CHECK(first.find("\"dof\": 9") != std::string::npos);
}

TEST_CASE("report fields are present and coherent") {
    const auto dataset = load_dataset(kDataDir / "synthetic10.json");
    LocalHashEmbedder embedder(256);
    const auto report = run_benchmark(dataset, {ScorerKind::proposed, ScorerKind::baseline},
                                      EngineConfig{}, embedder);
    const auto doc = report_to_json(report);
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["dataset"]["task_count"] == 10);
    CHECK(doc["config"]["default_importance"] == 5);
    CHECK(doc["models"].size() == 2);
    CHECK(doc["tasks"].size() == 10);
    // Tasks are ordered by task_id.
    std::string prev;
    for (const auto& task : doc["tasks"]) {
        const auto id = task["task_id"].get<std::string>();
        CHECK(prev < id);
        prev = id;
    }
    const auto& cmp = doc["summary"]["comparison"];
    CHECK(cmp["dof"] == 9);
    CHECK(cmp["confidence_interval_95"].size() == 2);

    const std::string text = report_to_text(report);
    CHECK(text.find("paired t-test") != std::string::npos);
    CHECK(text.find("critical t") != std::string::npos);
    CHECK(text.find("syn00") != std::string::npos);
}

TEST_CASE("malformed datasets name the task and field") {
    const auto parse = [](const char* text) {
        return dataset_from_json(nlohmann::json::parse(text), "inline");
    };
    CHECK_THROWS_WITH_AS((void)parse(R"({"schema_version":1,"tasks":[]})"),
                         doctest::Contains("tasks"), ValidationError);
    CHECK_THROWS_WITH_AS(
        (void)parse(R"({"schema_version":1,"tasks":[{"task_id":"t1","query":"q"}]})"),
        doctest::Contains("query_time"), ValidationError);
    // Unknown correct label names the task.
    const char* bad_label = R"({"schema_version":1,"tasks":[{
        "task_id":"t9","query":"q","query_time":10,"correct_label":"Z","events":[
        {"label":"A","content":"x","timestamp":1},
        {"label":"B","content":"y","timestamp":2}]}]})";
    CHECK_THROWS_WITH_AS((void)parse(bad_label), doctest::Contains("t9"), ValidationError);
    // Importance range enforced per event.
    const char* bad_importance = R"({"schema_version":1,"tasks":[{
        "task_id":"t2","query":"q","query_time":10,"correct_label":"A","events":[
        {"label":"A","content":"x","timestamp":1,"importance":12},
        {"label":"B","content":"y","timestamp":2}]}]})";
    CHECK_THROWS_WITH_AS((void)parse(bad_importance), doctest::Contains("importance"),
                         ValidationError);
    CHECK_THROWS_AS((void)load_dataset("/nonexistent/path.json"), ValidationError);
}

TEST_CASE("duplicate models are rejected") {
    const auto dataset = load_dataset(kDataDir / "task0.json");
    LocalHashEmbedder embedder(256);
    CHECK_THROWS_AS((void)run_benchmark(dataset, {ScorerKind::proposed, ScorerKind::proposed},
                                        EngineConfig{}, embedder),
                    ValidationError);
    CHECK_THROWS_AS((void)run_benchmark(dataset, {}, EngineConfig{}, embedder), ValidationError);
}
