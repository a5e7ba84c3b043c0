#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "elf/baselines.hpp"
#include "elf/controller.hpp"
#include "elf/problems.hpp"

namespace elf::experiment {

/// Raised for unknown keys, malformed values and invalid settings.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CrossSectionSettings {
    std::size_t points = 50;
    double lower = -0.3;
    double upper = 0.7;
    std::string direction = "gradient";  // "gradient" or "random"
    std::string theta_path;              // empty: the problem's initial parameters
    std::string split = "train";
};

struct RunConfig {
    std::string problem = "quadratic";  // quadratic | logistic | mlp
    std::string optimizer = "elf";      // elf | sgd | adam
    long steps = 5000;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    std::string out = "elf_out";
    int verbosity = 1;

    QuadraticEnsembleConfig quadratic{};
    BlobDatasetConfig data{};
    std::size_t mlp_hidden = 16;

    ElfConfig elf{};
    BaselineConfig sgd{.learning_rate = 0.01, .momentum = 0.9};
    bool sgd_step_decay = true;
    BaselineConfig adam{.learning_rate = 0.001};
    bool adam_step_decay = true;

    CrossSectionSettings cross_section{};
};

/// Every key with its current value, one `key = value` line each, in a fixed order.
[[nodiscard]] std::string to_text(const RunConfig& config);

/// Applies `key = value` lines on top of `base`. Blank lines and lines
/// starting with '#' are skipped.
[[nodiscard]] RunConfig parse_config_text(std::string_view text, RunConfig base = {});

void set_value(RunConfig& config, std::string_view key, std::string_view value);

/// Splits "key=value".
[[nodiscard]] std::pair<std::string, std::string> split_assignment(std::string_view assignment);

[[nodiscard]] std::vector<std::string> config_keys();

/// Throws ConfigError when names or hyperparameters are invalid.
void validate(const RunConfig& config);

/// Shortest decimal form that round-trips a double (17 significant digits).
[[nodiscard]] std::string format_double(double value);

}  // namespace elf::experiment
