#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "experiment/experiment.hpp"
#include "experiment/run_config.hpp"

using namespace elf;
using namespace elf::experiment;

namespace fs = std::filesystem;

namespace {

RunConfig quick_quadratic() {
    RunConfig c;
    c.steps = 3000;
    c.quadratic.dim = 8;
    c.quadratic.train_batches = 40;
    c.quadratic.validation_batches = 40;
    return c;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::string header(const std::string& text) { return text.substr(0, text.find('\n')); }

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("elf_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string command = std::string("\"") + ELF_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(RunConfig, RoundTripsThroughText) {
    RunConfig c;
    c.problem = "mlp";
    c.seed = 12345678901234ULL;
    c.elf.decrease_factor_delta = 0.1 + 0.2;
    c.sgd.learning_rate = 1.0 / 3.0;
    c.quadratic.offset_noise = std::nextafter(0.3, 1.0);
    c.cross_section.lower = -0.25;
    const RunConfig back = parse_config_text(to_text(c));
    EXPECT_EQ(to_text(back), to_text(c));
    EXPECT_EQ(back.elf.decrease_factor_delta, c.elf.decrease_factor_delta);
    EXPECT_EQ(back.quadratic.offset_noise, c.quadratic.offset_noise);
    EXPECT_EQ(back.seed, c.seed);
}

TEST(RunConfig, EveryKeyAppearsOnce) {
    const std::string text = to_text(RunConfig{});
    for (const auto& key : config_keys()) {
        EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
    }
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
    RunConfig c;
    EXPECT_THROW(set_value(c, "no_such_key", "1"), ConfigError);
    EXPECT_THROW(set_value(c, "steps", "many"), ConfigError);
    EXPECT_THROW(split_assignment("steps"), ConfigError);
    c.optimizer = "lbfgs";
    EXPECT_THROW(validate(c), ConfigError);
    c = RunConfig{};
    c.problem = "cifar";
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(RunConfig, CommentsAndBlankLinesIgnored) {
    const RunConfig c = parse_config_text("# comment\n\nsteps = 77\n  seed=4\n");
    EXPECT_EQ(c.steps, 77);
    EXPECT_EQ(c.seed, 4u);
}

TEST(FormatDouble, RoundTrips) {
    for (const double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23}) {
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
}

TEST(RunExperiment, DeterministicArtifacts) {
    const RunConfig c = quick_quadratic();
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    ASSERT_EQ(a.artifacts.size(), b.artifacts.size());
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
        EXPECT_EQ(a.artifacts[i].name, b.artifacts[i].name);
        EXPECT_EQ(a.artifacts[i].content, b.artifacts[i].content) << a.artifacts[i].name;
    }
}

TEST(RunExperiment, ElfLogHasLineSearchRowsAndFixedSchemas) {
    const auto r = run_experiment(quick_quadratic());
    const Artifact* log = r.find("training_log.csv");
    ASSERT_NE(log, nullptr);
    EXPECT_EQ(header(log->content), "step,event,train_loss,update_step,expected_improvement,real_improvement");
    const auto rows = parse_csv(log->content);
    std::size_t searches = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), 6u) << "row " << i;
        searches += rows[i][1] == "line_search";
    }
    EXPECT_GE(searches, 1u);
    EXPECT_EQ(searches, r.line_searches);

    for (std::size_t i = 0; i < r.line_searches; ++i) {
        const Artifact* line = r.find("line_" + std::to_string(i) + ".csv");
        ASSERT_NE(line, nullptr) << i;
        EXPECT_EQ(header(line->content), "round,s,loss");
        EXPECT_EQ(parse_csv(line->content).size(), 1u + 5u * 100u + 1u);
    }
    const Artifact* fits = r.find("fits.csv");
    ASSERT_NE(fits, nullptr);
    EXPECT_EQ(header(fits->content), "line_index,degree,c0,c1,c2,c3,c4,c5,c6,c7,c8,c9,c10");
    const auto fit_rows = parse_csv(fits->content);
    EXPECT_EQ(fit_rows.size(), r.line_searches + 1);
    for (std::size_t i = 1; i < fit_rows.size(); ++i) EXPECT_EQ(fit_rows[i].size(), 13u);
    ASSERT_NE(r.find("config.txt"), nullptr);
    EXPECT_EQ(r.find("config.txt")->content, to_text(quick_quadratic()));
}

TEST(RunExperiment, BaselinesProduceLogsWithoutSearches) {
    for (const std::string optimizer : {"sgd", "adam"}) {
        RunConfig c = quick_quadratic();
        c.optimizer = optimizer;
        c.steps = 200;
        const auto r = run_experiment(c);
        EXPECT_EQ(r.line_searches, 0u);
        EXPECT_EQ(parse_csv(r.find("training_log.csv")->content).size(), 201u);
        EXPECT_EQ(parse_csv(r.find("fits.csv")->content).size(), 1u);
    }
}

TEST(DumpCrossSection, DefaultGridAndClosedFormMean) {
    RunConfig c = quick_quadratic();
    const auto r = dump_cross_section(c);
    const auto curves = parse_csv(r.find("cross_section.csv")->content);
    EXPECT_EQ(curves.front(), (std::vector<std::string>{"batch", "s", "loss"}));
    std::map<std::string, int> per_batch;
    for (std::size_t i = 1; i < curves.size(); ++i) ++per_batch[curves[i][0]];
    EXPECT_EQ(per_batch.size(), 40u);
    for (const auto& [batch, count] : per_batch) EXPECT_EQ(count, 50) << batch;

    // Rebuild the same problem, point and direction to form the closed-form line.
    Rng data = make_stream(c.seed, "data");
    const NoisyQuadraticEnsemble problem(c.quadratic, data);
    Rng init = make_stream(c.seed, "init");
    const Vector theta0 = problem.initial_theta(init);
    BatchStream stream(problem.batch_count(Split::train), make_stream(c.seed, "train_order"));
    const Vector d = (-problem.batch_gradient(theta0, {Split::train, stream.next()})).normalized();
    const Polynomial line = problem.line_restriction(theta0, d);

    const auto summary = parse_csv(r.find("cross_section_summary.csv")->content);
    EXPECT_EQ(summary.front(), (std::vector<std::string>{"s", "mean", "q1", "median", "q3"}));
    ASSERT_EQ(summary.size(), 51u);
    EXPECT_EQ(std::stod(summary[1][0]), -0.3);
    EXPECT_EQ(std::stod(summary[50][0]), 0.7);
    for (std::size_t i = 1; i < summary.size(); ++i) {
        EXPECT_NEAR(std::stod(summary[i][1]), line(std::stod(summary[i][0])), 1e-9);
    }
}

TEST(DumpCrossSection, SinglePointAtOriginIsEmpiricalLoss) {
    RunConfig c = quick_quadratic();
    c.problem = "logistic";
    c.data.train_size = 256;
    c.data.validation_size = 64;
    c.cross_section.points = 1;
    c.cross_section.lower = 0.0;
    c.cross_section.upper = 0.0;
    const auto r = dump_cross_section(c);
    const auto summary = parse_csv(r.find("cross_section_summary.csv")->content);
    ASSERT_EQ(summary.size(), 2u);
    EXPECT_NEAR(std::stod(summary[1][1]), r.final_loss, 1e-12);
}

TEST(Cli, InvalidOptimizerFailsWithoutFiles) {
    const fs::path dir = fresh_dir("invalid") / "out";
    EXPECT_EQ(run_cli("--optimizer nope --out \"" + dir.string() + "\""), 1);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, UnknownOverrideKeyIsConfigError) {
    const fs::path dir = fresh_dir("override") / "out";
    EXPECT_EQ(run_cli("--set bogus=1 --out \"" + dir.string() + "\""), 1);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, DivergenceExitCode) {
    const fs::path dir = fresh_dir("diverge") / "out";
    EXPECT_EQ(run_cli("--optimizer sgd --steps 2000 --set sgd.learning_rate=1000 --set sgd.momentum=0 --out \"" +
                      dir.string() + "\""),
              2);
    EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, ConfigFileWithCommandLinePrecedence) {
    const fs::path root = fresh_dir("precedence");
    {
        std::ofstream f(root / "run.cfg");
        f << "optimizer = adam\nsteps = 40\nseed = 3\nquadratic.dim = 4\n";
    }
    const fs::path out = root / "out";
    ASSERT_EQ(run_cli("--config \"" + (root / "run.cfg").string() + "\" --steps 30 --quiet --out \"" +
                      out.string() + "\""),
              0);
    std::ifstream in(out / "config.txt");
    std::stringstream text;
    text << in.rdbuf();
    const RunConfig resolved = parse_config_text(text.str());
    EXPECT_EQ(resolved.optimizer, "adam");
    EXPECT_EQ(resolved.steps, 30);
    EXPECT_EQ(resolved.seed, 3u);
    EXPECT_EQ(resolved.quadratic.dim, 4u);
    EXPECT_TRUE(fs::exists(out / "training_log.csv"));
    EXPECT_TRUE(fs::exists(out / "fits.csv"));
    EXPECT_TRUE(fs::exists(out / "summary.txt"));
}
