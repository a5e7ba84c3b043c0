#include "experiment/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "elf/baselines.hpp"
#include "elf/random.hpp"

namespace elf::experiment {

namespace {

std::string cell(double value) { return std::isnan(value) ? std::string{} : format_double(value); }

Vector load_theta(const std::string& path, std::size_t dim) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read parameter snapshot '" + path + "'");
    }
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        try {
            values.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw ConfigError("invalid number '" + token + "' in '" + path + "'");
        }
    }
    if (values.size() != dim) {
        throw ConfigError("parameter snapshot '" + path + "' has " + std::to_string(values.size()) +
                          " values, expected " + std::to_string(dim));
    }
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string render_summary(const ExperimentResult& result, const RunConfig& config) {
    std::string out;
    out += "problem = " + config.problem + "\n";
    out += "optimizer = " + config.optimizer + "\n";
    out += "total_steps = " + std::to_string(result.total_steps) + "\n";
    out += "line_searches = " + std::to_string(result.line_searches) + "\n";
    out += "final_loss = " + format_double(result.final_loss) + "\n";
    if (result.train_accuracy) {
        out += "train_accuracy = " + format_double(*result.train_accuracy) + "\n";
    }
    return out;
}

}  // namespace

const Artifact* ExperimentResult::find(std::string_view name) const {
    const auto it = std::find_if(artifacts.begin(), artifacts.end(), [&](const Artifact& a) { return a.name == name; });
    return it == artifacts.end() ? nullptr : &*it;
}

std::unique_ptr<StochasticProblem> make_problem(const RunConfig& config) {
    Rng data_rng = make_stream(config.seed, "data");
    try {
        if (config.problem == "quadratic") {
            return std::make_unique<NoisyQuadraticEnsemble>(config.quadratic, data_rng);
        }
        BlobDatasetConfig data = config.data;
        data.batch_size = config.batch_size;
        auto dataset = std::make_shared<const BlobDataset>(data, data_rng);
        if (config.problem == "logistic") {
            return std::make_unique<LogisticRegression>(std::move(dataset));
        }
        if (config.problem == "mlp") {
            return std::make_unique<MultilayerPerceptron>(std::move(dataset), config.mlp_hidden);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown problem '" + config.problem + "'");
}

std::string render_training_log(const TrainingLog& log) {
    std::string out = "step,event,train_loss,update_step,expected_improvement,real_improvement\n";
    for (const auto& e : log.entries) {
        out += std::to_string(e.step);
        out += ',';
        out += to_string(e.event);
        out += ',' + cell(e.train_loss) + ',' + cell(e.update_step) + ',' + cell(e.expected_improvement) + ',' +
               cell(e.real_improvement) + '\n';
    }
    return out;
}

std::string render_line_samples(const LineSearchResult& result) {
    std::string out = "round,s,loss\n";
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
        out += std::to_string(result.rounds.at(i)) + ',' + format_double(result.samples.position(i)) + ',' +
               format_double(result.samples.loss(i)) + '\n';
    }
    return out;
}

std::string render_fits(const std::vector<LineSearchRecord>& searches, int max_degree) {
    std::string out = "line_index,degree";
    for (int j = 0; j <= max_degree; ++j) {
        out += ",c" + std::to_string(j);
    }
    out += '\n';
    for (std::size_t i = 0; i < searches.size(); ++i) {
        const auto& fit = searches[i].result.fit;
        const auto coefficients = fit.polynomial.coefficients();
        out += std::to_string(i) + ',' + std::to_string(fit.chosen_degree);
        for (int j = 0; j <= max_degree; ++j) {
            out += ',';
            if (static_cast<std::size_t>(j) <= static_cast<std::size_t>(fit.chosen_degree) &&
                static_cast<std::size_t>(j) < coefficients.size()) {
                out += format_double(coefficients[static_cast<std::size_t>(j)]);
            } else if (j <= fit.chosen_degree) {
                out += "0";
            }
        }
        out += '\n';
    }
    return out;
}

ExperimentResult run_experiment(const RunConfig& config) {
    validate(config);
    const auto problem = make_problem(config);
    Rng init_rng = make_stream(config.seed, "init");
    Vector theta0 = problem->initial_theta(init_rng);

    ExperimentResult result;
    Vector final_theta;
    if (config.optimizer == "elf") {
        ElfOptimizer optimizer(*problem, config.elf,
                               ElfStreams{make_stream(config.seed, "train_order"),
                                          make_stream(config.seed, "validation_order"),
                                          make_stream(config.seed, "line_search")},
                               std::move(theta0));
        const ElfRun run = optimizer.run(config.steps);
        result.artifacts.push_back({"training_log.csv", render_training_log(run.log)});
        for (std::size_t i = 0; i < run.searches.size(); ++i) {
            result.artifacts.push_back({"line_" + std::to_string(i) + ".csv", render_line_samples(run.searches[i].result)});
        }
        result.artifacts.push_back({"fits.csv", render_fits(run.searches, config.elf.line_search.max_degree)});
        result.total_steps = run.final_state.t;
        result.line_searches = run.searches.size();
        final_theta = run.final_state.theta;
    } else {
        const bool is_sgd = config.optimizer == "sgd";
        BaselineConfig baseline = is_sgd ? config.sgd : config.adam;
        baseline.total_steps = (is_sgd ? config.sgd_step_decay : config.adam_step_decay) ? config.steps : 0;
        BatchStream stream(problem->batch_count(Split::train), make_stream(config.seed, "train_order"));
        BaselineRun run = run_baseline(*problem, is_sgd ? BaselineKind::sgd : BaselineKind::adam, baseline,
                                       config.steps, stream, std::move(theta0));
        result.artifacts.push_back({"training_log.csv", render_training_log(run.log)});
        result.artifacts.push_back({"fits.csv", render_fits({}, config.elf.line_search.max_degree)});
        result.total_steps = config.steps;
        final_theta = std::move(run.theta);
    }
    result.final_loss = empirical_loss(*problem, final_theta);
    result.train_accuracy = problem->accuracy(final_theta, Split::train);
    result.artifacts.push_back({"summary.txt", render_summary(result, config)});
    result.artifacts.push_back({"config.txt", to_text(config)});
    return result;
}

ExperimentResult dump_cross_section(const RunConfig& config) {
    validate(config);
    const auto problem = make_problem(config);
    Rng init_rng = make_stream(config.seed, "init");
    const Vector theta0 = config.cross_section.theta_path.empty()
                              ? problem->initial_theta(init_rng)
                              : load_theta(config.cross_section.theta_path, problem->dim());

    Vector direction;
    if (config.cross_section.direction == "gradient") {
        BatchStream stream(problem->batch_count(Split::train), make_stream(config.seed, "train_order"));
        direction = -problem->batch_gradient(theta0, BatchRef{Split::train, stream.next()});
    } else {
        Rng rng = make_stream(config.seed, "direction");
        std::normal_distribution<double> normal(0.0, 1.0);
        direction.resize(static_cast<Eigen::Index>(problem->dim()));
        for (Eigen::Index i = 0; i < direction.size(); ++i) {
            direction(i) = normal(rng);
        }
    }
    const double norm = direction.norm();
    if (!(norm > 0.0)) {
        throw ConfigError("cross-section direction has zero length");
    }
    direction /= norm;

    const Split split = config.cross_section.split == "train" ? Split::train : Split::validation;
    const auto grid = linspace(config.cross_section.lower, config.cross_section.upper, config.cross_section.points);
    const CrossSectionProfile profile = cross_section_profile(*problem, theta0, direction, grid, split);

    std::string curves = "batch,s,loss\n";
    for (Eigen::Index b = 0; b < profile.batch_losses.rows(); ++b) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            curves += std::to_string(b) + ',' + format_double(grid[j]) + ',' +
                      format_double(profile.batch_losses(b, static_cast<Eigen::Index>(j))) + '\n';
        }
    }
    std::string summary = "s,mean,q1,median,q3\n";
    for (std::size_t j = 0; j < grid.size(); ++j) {
        summary += format_double(grid[j]) + ',' + format_double(profile.mean[j]) + ',' + format_double(profile.q1[j]) +
                   ',' + format_double(profile.median[j]) + ',' + format_double(profile.q3[j]) + '\n';
    }
    ExperimentResult result;
    result.artifacts.push_back({"cross_section.csv", std::move(curves)});
    result.artifacts.push_back({"cross_section_summary.csv", std::move(summary)});
    result.artifacts.push_back({"config.txt", to_text(config)});
    result.final_loss = empirical_loss(*problem, theta0);
    return result;
}

void write_artifacts(const std::filesystem::path& directory, const std::vector<Artifact>& artifacts) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + directory.string() + "': " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    for (const auto& artifact : artifacts) {
        const auto path = directory / artifact.name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (out) {
            written.push_back(path);
            out << artifact.content;
        }
        if (!out) {
            for (const auto& p : written) {
                std::filesystem::remove(p, ec);
            }
            throw std::runtime_error("cannot write '" + path.string() + "'");
        }
    }
}

}  // namespace elf::experiment
