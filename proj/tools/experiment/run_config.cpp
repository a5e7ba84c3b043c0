#include "experiment/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

namespace elf::experiment {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view text) {
    const std::string s(trim(text));
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("invalid number for '" + std::string(key) + "': '" + s + "'");
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view text) {
    const auto s = trim(text);
    Int value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(s) + "'");
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    const auto s = trim(text);
    if (s == "true" || s == "1") {
        return true;
    }
    if (s == "false" || s == "0") {
        return false;
    }
    throw ConfigError("invalid boolean for '" + std::string(key) + "': '" + std::string(s) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    auto rest = trim(text);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        out.push_back(parse_double(key, rest.substr(0, comma)));
        rest = comma == std::string_view::npos ? std::string_view{} : trim(rest.substr(comma + 1));
    }
    return out;
}

std::string format_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i == 0 ? "" : ",") + format_double(values[i]);
    }
    return out;
}

struct Field {
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
};

#define ELF_FIELD_DOUBLE(name, expr)                                                                   \
    Field {                                                                                            \
        name, [](const RunConfig& c) { return format_double(c.expr); },                                \
            [](RunConfig& c, std::string_view k, std::string_view v) { c.expr = parse_double(k, v); } \
    }
#define ELF_FIELD_INT(name, expr)                                                               \
    Field {                                                                                     \
        name, [](const RunConfig& c) { return std::to_string(c.expr); },                        \
            [](RunConfig& c, std::string_view k, std::string_view v) {                          \
                c.expr = parse_integer<std::remove_cvref_t<decltype(c.expr)>>(k, v);            \
            }                                                                                   \
    }
#define ELF_FIELD_BOOL(name, expr)                                                             \
    Field {                                                                                    \
        name, [](const RunConfig& c) { return std::string(c.expr ? "true" : "false"); },       \
            [](RunConfig& c, std::string_view k, std::string_view v) { c.expr = parse_bool(k, v); } \
    }
#define ELF_FIELD_STRING(name, expr)                                                                 \
    Field {                                                                                          \
        name, [](const RunConfig& c) { return c.expr; },                                             \
            [](RunConfig& c, std::string_view, std::string_view v) { c.expr = std::string(trim(v)); } \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> table{
        ELF_FIELD_STRING("problem", problem),
        ELF_FIELD_STRING("optimizer", optimizer),
        ELF_FIELD_INT("steps", steps),
        ELF_FIELD_INT("batch_size", batch_size),
        ELF_FIELD_INT("seed", seed),
        ELF_FIELD_STRING("out", out),
        ELF_FIELD_INT("verbosity", verbosity),

        ELF_FIELD_INT("quadratic.dim", quadratic.dim),
        ELF_FIELD_INT("quadratic.train_batches", quadratic.train_batches),
        ELF_FIELD_INT("quadratic.validation_batches", quadratic.validation_batches),
        ELF_FIELD_DOUBLE("quadratic.min_eigenvalue", quadratic.min_eigenvalue),
        ELF_FIELD_DOUBLE("quadratic.max_eigenvalue", quadratic.max_eigenvalue),
        ELF_FIELD_DOUBLE("quadratic.offset_noise", quadratic.offset_noise),
        ELF_FIELD_DOUBLE("quadratic.max_constant", quadratic.max_constant),
        ELF_FIELD_DOUBLE("quadratic.initial_distance", quadratic.initial_distance),

        ELF_FIELD_INT("data.features", data.features),
        ELF_FIELD_INT("data.classes", data.classes),
        ELF_FIELD_INT("data.train_size", data.train_size),
        ELF_FIELD_INT("data.validation_size", data.validation_size),
        ELF_FIELD_DOUBLE("data.separation", data.separation),
        ELF_FIELD_INT("mlp.hidden", mlp_hidden),

        ELF_FIELD_INT("elf.window_size", elf.window_size),
        ELF_FIELD_DOUBLE("elf.loss_improvement_factor", elf.loss_improvement_factor),
        ELF_FIELD_DOUBLE("elf.momentum", elf.momentum_beta),
        ELF_FIELD_DOUBLE("elf.delta", elf.decrease_factor_delta),
        ELF_FIELD_INT("elf.lines_to_average", elf.lines_to_average),
        ELF_FIELD_INT("elf.adaptations", elf.line_search.adaptations),
        ELF_FIELD_INT("elf.samples_per_adaptation", elf.line_search.samples_per_adaptation),
        ELF_FIELD_DOUBLE("elf.initial_interval_width", elf.line_search.initial_interval_width),
        ELF_FIELD_INT("elf.min_window_size", elf.line_search.min_window_size),
        ELF_FIELD_INT("elf.folds", elf.line_search.folds),
        ELF_FIELD_INT("elf.max_degree", elf.line_search.max_degree),
        ELF_FIELD_INT("elf.scan_cells", elf.line_search.scan.cells),
        Field{"elf.grid_candidates", [](const RunConfig& c) { return format_list(c.elf.grid_search_candidates); },
              [](RunConfig& c, std::string_view k, std::string_view v) {
                  c.elf.grid_search_candidates = parse_list(k, v);
              }},
        ELF_FIELD_INT("elf.grid_probe_steps", elf.grid_search_probe_steps),
        ELF_FIELD_BOOL("elf.sample_from_validation", elf.sample_from_validation),

        ELF_FIELD_DOUBLE("sgd.learning_rate", sgd.learning_rate),
        ELF_FIELD_DOUBLE("sgd.momentum", sgd.momentum),
        ELF_FIELD_BOOL("sgd.step_decay", sgd_step_decay),
        ELF_FIELD_DOUBLE("adam.learning_rate", adam.learning_rate),
        ELF_FIELD_DOUBLE("adam.beta1", adam.beta1),
        ELF_FIELD_DOUBLE("adam.beta2", adam.beta2),
        ELF_FIELD_DOUBLE("adam.epsilon", adam.epsilon),
        ELF_FIELD_BOOL("adam.step_decay", adam_step_decay),

        ELF_FIELD_INT("cross_section.points", cross_section.points),
        ELF_FIELD_DOUBLE("cross_section.lower", cross_section.lower),
        ELF_FIELD_DOUBLE("cross_section.upper", cross_section.upper),
        ELF_FIELD_STRING("cross_section.direction", cross_section.direction),
        ELF_FIELD_STRING("cross_section.theta", cross_section.theta_path),
        ELF_FIELD_STRING("cross_section.split", cross_section.split),
    };
    return table;
}

#undef ELF_FIELD_DOUBLE
#undef ELF_FIELD_INT
#undef ELF_FIELD_BOOL
#undef ELF_FIELD_STRING

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string to_text(const RunConfig& config) {
    std::string out;
    for (const auto& field : fields()) {
        out += field.key + " = " + field.get(config) + "\n";
    }
    return out;
}

void set_value(RunConfig& config, std::string_view key, std::string_view value) {
    const auto k = trim(key);
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == k; });
    if (it == table.end()) {
        throw ConfigError("unknown configuration key '" + std::string(k) + "'");
    }
    it->set(config, k, value);
}

std::pair<std::string, std::string> split_assignment(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    }
    return {std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1)))};
}

RunConfig parse_config_text(std::string_view text, RunConfig base) {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto content = trim(line);
        if (content.empty() || content.front() == '#') {
            continue;
        }
        const auto [key, value] = split_assignment(content);
        set_value(base, key, value);
    }
    return base;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& field : fields()) {
        keys.push_back(field.key);
    }
    return keys;
}

void validate(const RunConfig& config) {
    static const std::vector<std::string> problems{"quadratic", "logistic", "mlp"};
    static const std::vector<std::string> optimizers{"elf", "sgd", "adam"};
    if (std::find(problems.begin(), problems.end(), config.problem) == problems.end()) {
        throw ConfigError("unknown problem '" + config.problem + "' (expected quadratic, logistic or mlp)");
    }
    if (std::find(optimizers.begin(), optimizers.end(), config.optimizer) == optimizers.end()) {
        throw ConfigError("unknown optimizer '" + config.optimizer + "' (expected elf, sgd or adam)");
    }
    if (config.steps < 1) {
        throw ConfigError("steps must be >= 1");
    }
    if (config.batch_size < 1) {
        throw ConfigError("batch_size must be >= 1");
    }
    if (config.out.empty()) {
        throw ConfigError("output directory must not be empty");
    }
    if (config.cross_section.points < 1) {
        throw ConfigError("cross_section.points must be >= 1");
    }
    if (config.cross_section.direction != "gradient" && config.cross_section.direction != "random") {
        throw ConfigError("cross_section.direction must be 'gradient' or 'random'");
    }
    if (config.cross_section.split != "train" && config.cross_section.split != "validation") {
        throw ConfigError("cross_section.split must be 'train' or 'validation'");
    }
    try {
        config.elf.validate();
        config.sgd.validate();
        config.adam.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace elf::experiment
