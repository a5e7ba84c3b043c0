#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "elf/polynomial.hpp"
#include "elf/random.hpp"

namespace elf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Split { train, validation };

struct BatchRef {
    Split split = Split::train;
    std::size_t index = 0;
};

/// Stochastic objective seen through per-batch oracles. Implementations are
/// immutable after construction and every oracle is a pure function of
/// (theta, batch).
class StochasticProblem {
public:
    virtual ~StochasticProblem() = default;

    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual std::size_t dim() const = 0;
    [[nodiscard]] virtual std::size_t batch_count(Split split) const = 0;

    [[nodiscard]] virtual double batch_loss(const Vector& theta, BatchRef batch) const = 0;
    [[nodiscard]] virtual Vector batch_gradient(const Vector& theta, BatchRef batch) const = 0;

    /// Loss and gradient in one pass; `gradient` is resized as needed.
    virtual double batch_loss_and_gradient(const Vector& theta, BatchRef batch, Vector& gradient) const {
        gradient = batch_gradient(theta, batch);
        return batch_loss(theta, batch);
    }

    [[nodiscard]] virtual Vector initial_theta(Rng& rng) const = 0;

    /// Classification accuracy over a split, for problems that have one.
    [[nodiscard]] virtual std::optional<double> accuracy(const Vector& /*theta*/, Split /*split*/) const {
        return std::nullopt;
    }
};

/// Mean batch loss over every batch of the split.
[[nodiscard]] double empirical_loss(const StochasticProblem& problem, const Vector& theta,
                                    Split split = Split::train);

/// Dense sampling of all batch losses along theta0 + s * direction.
struct CrossSectionProfile {
    std::vector<double> positions;
    Matrix batch_losses;  // rows: batches, columns: positions
    std::vector<double> mean;
    std::vector<double> q1;
    std::vector<double> median;
    std::vector<double> q3;
};

[[nodiscard]] CrossSectionProfile cross_section_profile(const StochasticProblem& problem, const Vector& theta0,
                                                        const Vector& direction,
                                                        std::span<const double> positions,
                                                        Split split = Split::train);

/// `count` equally spaced points on [lower, upper]; {lower} when count == 1.
[[nodiscard]] std::vector<double> linspace(double lower, double upper, std::size_t count);

/// Endless sequence of batch indices. Each epoch visits every batch once in
/// an order shuffled by the stream's own generator.
class BatchStream {
public:
    BatchStream(std::size_t batch_count, Rng rng);

    [[nodiscard]] std::size_t next();
    [[nodiscard]] std::size_t loads() const noexcept { return loads_; }

private:
    void reshuffle();

    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
    std::size_t loads_ = 0;
    Rng rng_;
};

// ---------------------------------------------------------------------------
// Noisy quadratic ensemble

struct QuadraticEnsembleConfig {
    std::size_t dim = 20;
    std::size_t train_batches = 100;
    std::size_t validation_batches = 100;
    double min_eigenvalue = 0.5;
    double max_eigenvalue = 2.0;
    double offset_noise = 0.3;    // std-dev of each batch centre around the shared centre
    double max_constant = 0.1;    // batch constants drawn from U[0, max_constant]
    double initial_distance = 3.0;  // distance of the initial point from the shared centre
};

/// Batch b has loss 0.5 (theta - b_b)^T A_b (theta - b_b) + c_b with A_b a
/// random rotation of a spectrum drawn from [min_eigenvalue, max_eigenvalue].
class NoisyQuadraticEnsemble final : public StochasticProblem {
public:
    NoisyQuadraticEnsemble(const QuadraticEnsembleConfig& config, Rng& rng);

    [[nodiscard]] std::string name() const override { return "quadratic"; }
    [[nodiscard]] std::size_t dim() const override { return config_.dim; }
    [[nodiscard]] std::size_t batch_count(Split split) const override;
    [[nodiscard]] double batch_loss(const Vector& theta, BatchRef batch) const override;
    [[nodiscard]] Vector batch_gradient(const Vector& theta, BatchRef batch) const override;
    double batch_loss_and_gradient(const Vector& theta, BatchRef batch, Vector& gradient) const override;
    [[nodiscard]] Vector initial_theta(Rng& rng) const override;

    struct Term {
        Matrix hessian;
        Vector centre;
        double constant;
    };
    [[nodiscard]] const Term& term(BatchRef batch) const;

    /// Closed form of the split's mean loss: 0.5 theta^T H theta - g^T theta + k.
    [[nodiscard]] const Matrix& mean_hessian(Split split = Split::train) const;
    [[nodiscard]] Vector minimizer(Split split = Split::train) const;
    [[nodiscard]] double closed_form_loss(const Vector& theta, Split split = Split::train) const;
    [[nodiscard]] double optimal_loss(Split split = Split::train) const;
    /// The split's mean loss restricted to theta0 + s * direction, as a quadratic in s.
    [[nodiscard]] Polynomial line_restriction(const Vector& theta0, const Vector& direction,
                                              Split split = Split::train) const;

private:
    struct Aggregate {
        Matrix hessian;
        Vector linear;
        double constant = 0.0;
    };
    [[nodiscard]] const std::vector<Term>& terms(Split split) const;
    [[nodiscard]] const Aggregate& aggregate(Split split) const;

    QuadraticEnsembleConfig config_;
    Vector shared_centre_;
    std::vector<Term> train_;
    std::vector<Term> validation_;
    Aggregate train_aggregate_;
    Aggregate validation_aggregate_;
};

// ---------------------------------------------------------------------------
// Synthetic classification

struct BlobDatasetConfig {
    std::size_t features = 10;
    std::size_t classes = 2;
    std::size_t train_size = 4096;
    std::size_t validation_size = 1024;
    std::size_t batch_size = 32;
    double separation = 8.0;  // distance between neighbouring class means (unit-variance blobs)
};

/// Gaussian blobs with unit covariance around random class means.
/// Samples are generated in random order and batched contiguously.
struct BlobDataset {
    BlobDataset(const BlobDatasetConfig& config, Rng& rng);

    BlobDatasetConfig config;
    Matrix train_inputs;  // features x samples
    std::vector<int> train_labels;
    Matrix validation_inputs;
    std::vector<int> validation_labels;

    [[nodiscard]] std::size_t batch_count(Split split) const;
    /// Column range [first, first + size) of the batch.
    [[nodiscard]] std::pair<std::size_t, std::size_t> batch_columns(BatchRef batch) const;
    [[nodiscard]] const Matrix& inputs(Split split) const;
    [[nodiscard]] const std::vector<int>& labels(Split split) const;
};

/// Multinomial logistic regression with mean cross-entropy loss.
/// theta = [W (classes x features, column-major), bias (classes)].
class LogisticRegression final : public StochasticProblem {
public:
    explicit LogisticRegression(std::shared_ptr<const BlobDataset> data);

    [[nodiscard]] std::string name() const override { return "logistic"; }
    [[nodiscard]] std::size_t dim() const override;
    [[nodiscard]] std::size_t batch_count(Split split) const override { return data_->batch_count(split); }
    [[nodiscard]] double batch_loss(const Vector& theta, BatchRef batch) const override;
    [[nodiscard]] Vector batch_gradient(const Vector& theta, BatchRef batch) const override;
    double batch_loss_and_gradient(const Vector& theta, BatchRef batch, Vector& gradient) const override;
    [[nodiscard]] Vector initial_theta(Rng& rng) const override;
    [[nodiscard]] std::optional<double> accuracy(const Vector& theta, Split split) const override;

private:
    std::shared_ptr<const BlobDataset> data_;
};

/// Fully connected network features -> hidden -> hidden -> classes with tanh
/// activations, softmax output and mean cross-entropy loss; gradients by
/// backpropagation.
class MultilayerPerceptron final : public StochasticProblem {
public:
    MultilayerPerceptron(std::shared_ptr<const BlobDataset> data, std::size_t hidden);

    [[nodiscard]] std::string name() const override { return "mlp"; }
    [[nodiscard]] std::size_t dim() const override;
    [[nodiscard]] std::size_t batch_count(Split split) const override { return data_->batch_count(split); }
    [[nodiscard]] double batch_loss(const Vector& theta, BatchRef batch) const override;
    [[nodiscard]] Vector batch_gradient(const Vector& theta, BatchRef batch) const override;
    double batch_loss_and_gradient(const Vector& theta, BatchRef batch, Vector& gradient) const override;
    [[nodiscard]] Vector initial_theta(Rng& rng) const override;
    [[nodiscard]] std::optional<double> accuracy(const Vector& theta, Split split) const override;

private:
    struct Layer {
        std::size_t inputs;
        std::size_t outputs;
        std::size_t offset;  // first weight in theta; biases follow the weights
    };
    [[nodiscard]] Matrix forward_logits(const Vector& theta, const Eigen::Ref<const Matrix>& inputs) const;
    double loss_impl(const Vector& theta, BatchRef batch, Vector* gradient) const;

    std::shared_ptr<const BlobDataset> data_;
    std::vector<Layer> layers_;
};

}  // namespace elf
