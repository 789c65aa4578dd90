#include "pdflow/experiment_config.hpp"
#include "pdflow/experiments.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

using namespace pdflow;
using nlohmann::json;

namespace {

json exp1_document() { return find_builtin("exp1_ihdtr")->document; }

std::string error_pointer(const json& doc) {
    try {
        parse_experiment(doc);
    } catch (const ConfigError& e) {
        return e.pointer();
    }
    return "<no error>";
}

std::string compare_error_pointer(const json& doc) {
    try {
        parse_compare(doc);
    } catch (const ConfigError& e) {
        return e.pointer();
    }
    return "<no error>";
}

}  // namespace

TEST(ExperimentConfig, ParsesToyStart) {
    const ExperimentConfig cfg = parse_experiment(exp1_document());
    EXPECT_EQ(cfg.system, SystemKind::IHDTR);
    EXPECT_DOUBLE_EQ(cfg.schedule.alpha, 3.1);
    EXPECT_DOUBLE_EQ(cfg.schedule.gamma, 1.0);
    EXPECT_DOUBLE_EQ(cfg.schedule.beta_shift, -0.5);
    ASSERT_NE(cfg.schedule.eps.as_inverse_power(), nullptr);
    EXPECT_DOUBLE_EQ(cfg.schedule.eps.as_inverse_power()->r, 1.5);
    EXPECT_DOUBLE_EQ(cfg.initial.t0, 1.0);
    EXPECT_DOUBLE_EQ(cfg.schedule.t0, 1.0);
    EXPECT_EQ(cfg.initial.z.pack(), (Vector(8) << 1, -1, -1, 1, -1, 1, 1, -1).finished());
    EXPECT_DOUBLE_EQ(cfg.integrator.t_end, 50.0);
    EXPECT_EQ(cfg.output_dir, "out/exp1_ihdtr");
    const Problem p = cfg.build_problem();
    EXPECT_EQ(p.n(), 3);
    EXPECT_EQ(p.m(), 1);
}

TEST(ExperimentConfig, RoundTripsThroughJson) {
    const ExperimentConfig cfg = parse_experiment(exp1_document());
    EXPECT_EQ(to_json(parse_experiment(to_json(cfg))), to_json(cfg));
}

TEST(ExperimentConfig, VelocitiesDefaultToZero) {
    json doc = exp1_document();
    doc["initial"].erase("vx");
    doc["initial"].erase("vlambda");
    const ExperimentConfig cfg = parse_experiment(doc);
    EXPECT_EQ(cfg.initial.z.vx.norm(), 0.0);
    EXPECT_EQ(cfg.initial.z.vlambda.norm(), 0.0);
}

TEST(ExperimentConfig, ErrorPointers) {
    json doc = exp1_document();
    doc["schedule"]["delta"] = 1;
    EXPECT_EQ(error_pointer(doc), "/schedule/delta");

    doc = exp1_document();
    doc["schedule"]["alpha"] = "large";
    EXPECT_EQ(error_pointer(doc), "/schedule/alpha");

    doc = exp1_document();
    doc["initial"]["x"] = {1, 2};
    EXPECT_EQ(error_pointer(doc), "/initial/x");

    doc = exp1_document();
    doc["problem"]["type"] = "cubic";
    EXPECT_EQ(error_pointer(doc), "/problem/type");

    doc = exp1_document();
    doc["system"] = "pd-avd";
    EXPECT_EQ(error_pointer(doc), "/system");

    doc = exp1_document();
    doc["schedule"]["gamma"] = 0.0;
    EXPECT_EQ(error_pointer(doc), "/schedule");

    doc = exp1_document();
    doc["integrator"]["rtol"] = -1.0;
    EXPECT_EQ(error_pointer(doc), "/integrator");

    doc = exp1_document();
    doc["schedule"]["eps"]["type"] = "logarithmic";
    EXPECT_EQ(error_pointer(doc), "/schedule/eps/type");

    doc = exp1_document();
    doc["rates"] = {{"window", {50, 10}}};
    EXPECT_EQ(error_pointer(doc), "/rates/window");
}

TEST(ExperimentConfig, QuadraticProblemDimensionsAreChecked) {
    json doc = exp1_document();
    doc["problem"] = {{"type", "quadratic"}, {"Q", {{1, 0}, {0, 1}}}, {"q", {0, 0}}, {"A", {{1, 1}}}, {"b", {2}}};
    doc["initial"]["x"] = {0, 0};
    doc["initial"]["vx"] = {0, 0};
    EXPECT_EQ(parse_experiment(doc).build_problem().n(), 2);

    doc["problem"]["A"] = {{1, 1, 1}};
    EXPECT_EQ(error_pointer(doc), "/problem");
}

TEST(ExperimentConfig, DefaultRateWindow) {
    ExperimentConfig cfg = parse_experiment(exp1_document());
    EXPECT_EQ(cfg.effective_rate_window(), std::make_pair(10.0, 50.0));
    cfg.integrator.t_end = 11.0;
    EXPECT_EQ(cfg.effective_rate_window(), std::make_pair(6.0, 11.0));
    cfg.rate_window = std::make_pair(2.0, 3.0);
    EXPECT_EQ(cfg.effective_rate_window(), std::make_pair(2.0, 3.0));
}

TEST(CompareConfig, PatchesMergeIntoBase) {
    const CompareConfig cc = parse_compare(find_builtin("exp2_compare")->document);
    ASSERT_EQ(cc.runs.size(), 5u);
    EXPECT_EQ(cc.runs[0].label, "ihdtr");
    EXPECT_EQ(cc.runs[1].config.schedule.gamma, 0.0);
    EXPECT_EQ(cc.runs[1].config.system, SystemKind::IHDTR);
    EXPECT_EQ(cc.runs[2].config.system, SystemKind::IHD);
    EXPECT_EQ(cc.runs[4].config.system, SystemKind::Baseline);
    for (const CompareRun& r : cc.runs) EXPECT_EQ(r.config.initial.z.pack(), Vector::Ones(8));
}

TEST(CompareConfig, PatchErrorsPointIntoTheRun) {
    json doc = find_builtin("exp2_compare")->document;
    doc["runs"][1]["patch"]["schedule"]["alpha"] = "x";
    EXPECT_EQ(compare_error_pointer(doc), "/runs/1/patch/schedule/alpha");
}

TEST(CompareConfig, RejectsMismatchedHorizons) {
    json doc = find_builtin("exp2_compare")->document;
    doc["runs"][2]["patch"]["integrator"] = {{"t_end", 40}};
    EXPECT_EQ(compare_error_pointer(doc), "/runs/2");
}

TEST(Builtins, ListCoversAllExperiments) {
    std::vector<std::string> ids;
    for (const BuiltinExperiment& b : builtin_experiments()) ids.push_back(b.id);
    for (const char* id : {"exp1_ihdtr", "exp1_ihd", "exp1_baseline", "exp2_compare", "exp3_sweep", "rates_ihd_200",
                           "velocity_ihdtr_200"}) {
        EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
    }
    EXPECT_EQ(find_builtin("nope"), nullptr);
}

TEST(Builtins, EveryDocumentParses) {
    for (const BuiltinExperiment& b : builtin_experiments()) {
        if (is_compare_document(b.document)) {
            EXPECT_NO_THROW(parse_compare(b.document)) << b.id;
        } else {
            EXPECT_NO_THROW(parse_experiment(b.document)) << b.id;
        }
    }
}

TEST(Builtins, ShippedConfigFilesMatch) {
    const std::filesystem::path dir = std::filesystem::path(PDFLOW_SOURCE_DIR) / "configs";
    for (const BuiltinExperiment& b : builtin_experiments()) {
        const std::filesystem::path file = dir / (b.id + ".json");
        ASSERT_TRUE(std::filesystem::exists(file)) << file;
        EXPECT_EQ(load_json_file(file.string()), b.document) << b.id;
    }
}
