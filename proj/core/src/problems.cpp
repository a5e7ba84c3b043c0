#include "elf/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "elf/stats.hpp"

namespace elf {

double empirical_loss(const StochasticProblem& problem, const Vector& theta, Split split) {
    const std::size_t count = problem.batch_count(split);
    double total = 0.0;
    for (std::size_t b = 0; b < count; ++b) {
        total += problem.batch_loss(theta, BatchRef{split, b});
    }
    return total / static_cast<double>(count);
}

std::vector<double> linspace(double lower, double upper, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lower;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = i + 1 == count ? upper
                                : lower + (upper - lower) * (static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return out;
}

CrossSectionProfile cross_section_profile(const StochasticProblem& problem, const Vector& theta0,
                                          const Vector& direction, std::span<const double> positions, Split split) {
    if (theta0.size() != direction.size() || static_cast<std::size_t>(theta0.size()) != problem.dim()) {
        throw std::invalid_argument("cross_section_profile: dimension mismatch");
    }
    CrossSectionProfile profile;
    profile.positions.assign(positions.begin(), positions.end());
    const std::size_t batches = problem.batch_count(split);
    const std::size_t points = positions.size();
    profile.batch_losses.resize(static_cast<Eigen::Index>(batches), static_cast<Eigen::Index>(points));
    Vector theta(theta0.size());
    for (std::size_t j = 0; j < points; ++j) {
        theta = theta0 + positions[j] * direction;
        for (std::size_t b = 0; b < batches; ++b) {
            profile.batch_losses(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j)) =
                problem.batch_loss(theta, BatchRef{split, b});
        }
    }
    std::vector<double> column(batches);
    for (std::size_t j = 0; j < points; ++j) {
        for (std::size_t b = 0; b < batches; ++b) {
            column[b] = profile.batch_losses(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
        }
        profile.mean.push_back(mean(column));
        const auto q = quartiles(column);
        profile.q1.push_back(q.lower);
        profile.median.push_back(q.median);
        profile.q3.push_back(q.upper);
    }
    return profile;
}

BatchStream::BatchStream(std::size_t batch_count, Rng rng) : order_(batch_count), rng_(std::move(rng)) {
    if (batch_count == 0) {
        throw std::invalid_argument("BatchStream: no batches");
    }
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    reshuffle();
}

void BatchStream::reshuffle() {
    std::shuffle(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
}

std::size_t BatchStream::next() {
    if (cursor_ == order_.size()) {
        reshuffle();
    }
    ++loads_;
    return order_[cursor_++];
}

// ---------------------------------------------------------------------------

namespace {

Vector gaussian_vector(std::size_t n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = normal(rng);
    }
    return v;
}

Matrix random_orthonormal_columns(std::size_t rows, std::size_t cols, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            g(i, j) = normal(rng);
        }
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    return qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
}

}  // namespace

NoisyQuadraticEnsemble::NoisyQuadraticEnsemble(const QuadraticEnsembleConfig& config, Rng& rng) : config_(config) {
    if (config.dim == 0 || config.train_batches == 0 || config.validation_batches == 0) {
        throw std::invalid_argument("NoisyQuadraticEnsemble: empty dimension or batch set");
    }
    if (!(config.min_eigenvalue > 0.0) || config.max_eigenvalue < config.min_eigenvalue) {
        throw std::invalid_argument("NoisyQuadraticEnsemble: eigenvalue range must be positive and ordered");
    }
    shared_centre_ = gaussian_vector(config.dim, rng);
    std::uniform_real_distribution<double> eigen(config.min_eigenvalue, config.max_eigenvalue);
    std::uniform_real_distribution<double> constant(0.0, config.max_constant);
    const auto make_terms = [&](std::size_t count) {
        std::vector<Term> terms;
        terms.reserve(count);
        for (std::size_t b = 0; b < count; ++b) {
            const Matrix q = random_orthonormal_columns(config.dim, config.dim, rng);
            Vector spectrum(static_cast<Eigen::Index>(config.dim));
            for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
                spectrum(i) = eigen(rng);
            }
            Matrix a = q * spectrum.asDiagonal() * q.transpose();
            a = 0.5 * (a + a.transpose());
            Vector centre = shared_centre_ + config.offset_noise * gaussian_vector(config.dim, rng);
            terms.push_back(Term{std::move(a), std::move(centre), constant(rng)});
        }
        return terms;
    };
    train_ = make_terms(config.train_batches);
    validation_ = make_terms(config.validation_batches);

    const auto aggregate_of = [&](const std::vector<Term>& terms) {
        Aggregate agg;
        agg.hessian = Matrix::Zero(static_cast<Eigen::Index>(config.dim), static_cast<Eigen::Index>(config.dim));
        agg.linear = Vector::Zero(static_cast<Eigen::Index>(config.dim));
        for (const auto& term : terms) {
            const Vector ab = term.hessian * term.centre;
            agg.hessian += term.hessian;
            agg.linear += ab;
            agg.constant += 0.5 * term.centre.dot(ab) + term.constant;
        }
        const auto n = static_cast<double>(terms.size());
        agg.hessian /= n;
        agg.linear /= n;
        agg.constant /= n;
        return agg;
    };
    train_aggregate_ = aggregate_of(train_);
    validation_aggregate_ = aggregate_of(validation_);
}

std::size_t NoisyQuadraticEnsemble::batch_count(Split split) const { return terms(split).size(); }

const std::vector<NoisyQuadraticEnsemble::Term>& NoisyQuadraticEnsemble::terms(Split split) const {
    return split == Split::train ? train_ : validation_;
}

const NoisyQuadraticEnsemble::Aggregate& NoisyQuadraticEnsemble::aggregate(Split split) const {
    return split == Split::train ? train_aggregate_ : validation_aggregate_;
}

const NoisyQuadraticEnsemble::Term& NoisyQuadraticEnsemble::term(BatchRef batch) const {
    return terms(batch.split).at(batch.index);
}

double NoisyQuadraticEnsemble::batch_loss(const Vector& theta, BatchRef batch) const {
    const Term& t = term(batch);
    const Vector r = theta - t.centre;
    return 0.5 * r.dot(t.hessian * r) + t.constant;
}

Vector NoisyQuadraticEnsemble::batch_gradient(const Vector& theta, BatchRef batch) const {
    const Term& t = term(batch);
    return t.hessian * (theta - t.centre);
}

double NoisyQuadraticEnsemble::batch_loss_and_gradient(const Vector& theta, BatchRef batch, Vector& gradient) const {
    const Term& t = term(batch);
    const Vector r = theta - t.centre;
    gradient = t.hessian * r;
    return 0.5 * r.dot(gradient) + t.constant;
}

Vector NoisyQuadraticEnsemble::initial_theta(Rng& rng) const {
    Vector offset = gaussian_vector(config_.dim, rng);
    offset *= config_.initial_distance / offset.norm();
    return shared_centre_ + offset;
}

const Matrix& NoisyQuadraticEnsemble::mean_hessian(Split split) const { return aggregate(split).hessian; }

Vector NoisyQuadraticEnsemble::minimizer(Split split) const {
    const Aggregate& agg = aggregate(split);
    return agg.hessian.ldlt().solve(agg.linear);
}

double NoisyQuadraticEnsemble::closed_form_loss(const Vector& theta, Split split) const {
    const Aggregate& agg = aggregate(split);
    return 0.5 * theta.dot(agg.hessian * theta) - agg.linear.dot(theta) + agg.constant;
}

double NoisyQuadraticEnsemble::optimal_loss(Split split) const { return closed_form_loss(minimizer(split), split); }

Polynomial NoisyQuadraticEnsemble::line_restriction(const Vector& theta0, const Vector& direction, Split split) const {
    const Aggregate& agg = aggregate(split);
    const double slope = (agg.hessian * theta0 - agg.linear).dot(direction);
    const double curvature = direction.dot(agg.hessian * direction);
    return Polynomial{{closed_form_loss(theta0, split), slope, 0.5 * curvature}};
}

// ---------------------------------------------------------------------------

BlobDataset::BlobDataset(const BlobDatasetConfig& cfg, Rng& rng) : config(cfg) {
    if (cfg.classes < 2 || cfg.features < cfg.classes) {
        throw std::invalid_argument("BlobDataset: need 2 <= classes <= features");
    }
    if (cfg.train_size == 0 || cfg.validation_size == 0 || cfg.batch_size == 0) {
        throw std::invalid_argument("BlobDataset: empty split or batch");
    }
    const Matrix means = (cfg.separation / std::sqrt(2.0)) * random_orthonormal_columns(cfg.features, cfg.classes, rng);
    std::uniform_int_distribution<int> label(0, static_cast<int>(cfg.classes) - 1);
    const auto generate = [&](std::size_t count, Matrix& inputs, std::vector<int>& labels) {
        inputs.resize(static_cast<Eigen::Index>(cfg.features), static_cast<Eigen::Index>(count));
        labels.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            labels[i] = label(rng);
            inputs.col(static_cast<Eigen::Index>(i)) = means.col(labels[i]) + gaussian_vector(cfg.features, rng);
        }
    };
    generate(cfg.train_size, train_inputs, train_labels);
    generate(cfg.validation_size, validation_inputs, validation_labels);
}

std::size_t BlobDataset::batch_count(Split split) const {
    const std::size_t n = labels(split).size();
    return (n + config.batch_size - 1) / config.batch_size;
}

std::pair<std::size_t, std::size_t> BlobDataset::batch_columns(BatchRef batch) const {
    const std::size_t n = labels(batch.split).size();
    const std::size_t first = batch.index * config.batch_size;
    if (first >= n) {
        throw std::out_of_range("BlobDataset: batch index");
    }
    return {first, std::min(config.batch_size, n - first)};
}

const Matrix& BlobDataset::inputs(Split split) const {
    return split == Split::train ? train_inputs : validation_inputs;
}

const std::vector<int>& BlobDataset::labels(Split split) const {
    return split == Split::train ? train_labels : validation_labels;
}

namespace {

/// Mean cross-entropy of softmax(logits); overwrites `logits` with
/// (softmax - onehot) / batch when `residual` is requested.
double softmax_cross_entropy(Matrix& logits, std::span<const int> labels, bool residual) {
    const auto batch = static_cast<double>(logits.cols());
    double loss = 0.0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        auto col = logits.col(j);
        const double top = col.maxCoeff();
        const double sum = (col.array() - top).exp().sum();
        const double log_norm = top + std::log(sum);
        const int y = labels[static_cast<std::size_t>(j)];
        loss += log_norm - col(y);
        if (residual) {
            col = ((col.array() - log_norm).exp() / batch).matrix();
            col(y) -= 1.0 / batch;
        }
    }
    return loss / batch;
}

int argmax(const Eigen::Ref<const Vector>& v) {
    Eigen::Index best = 0;
    v.maxCoeff(&best);
    return static_cast<int>(best);
}

}  // namespace

LogisticRegression::LogisticRegression(std::shared_ptr<const BlobDataset> data) : data_(std::move(data)) {
    if (!data_) {
        throw std::invalid_argument("LogisticRegression: no dataset");
    }
}

std::size_t LogisticRegression::dim() const { return data_->config.classes * (data_->config.features + 1); }

double LogisticRegression::batch_loss_and_gradient(const Vector& theta, BatchRef batch, Vector& gradient) const {
    const auto c = static_cast<Eigen::Index>(data_->config.classes);
    const auto f = static_cast<Eigen::Index>(data_->config.features);
    const auto [first, size] = data_->batch_columns(batch);
    const auto x = data_->inputs(batch.split).middleCols(static_cast<Eigen::Index>(first),
                                                         static_cast<Eigen::Index>(size));
    const std::span<const int> y(data_->labels(batch.split).data() + first, size);
    const Eigen::Map<const Matrix> w(theta.data(), c, f);
    const Eigen::Map<const Vector> bias(theta.data() + c * f, c);

    Matrix logits = (w * x).colwise() + bias;
    const double loss = softmax_cross_entropy(logits, y, true);
    gradient.resize(theta.size());
    Eigen::Map<Matrix>(gradient.data(), c, f) = logits * x.transpose();
    gradient.tail(c) = logits.rowwise().sum();
    return loss;
}

double LogisticRegression::batch_loss(const Vector& theta, BatchRef batch) const {
    const auto c = static_cast<Eigen::Index>(data_->config.classes);
    const auto f = static_cast<Eigen::Index>(data_->config.features);
    const auto [first, size] = data_->batch_columns(batch);
    const auto x = data_->inputs(batch.split).middleCols(static_cast<Eigen::Index>(first),
                                                         static_cast<Eigen::Index>(size));
    const std::span<const int> y(data_->labels(batch.split).data() + first, size);
    const Eigen::Map<const Matrix> w(theta.data(), c, f);
    const Eigen::Map<const Vector> bias(theta.data() + c * f, c);
    Matrix logits = (w * x).colwise() + bias;
    return softmax_cross_entropy(logits, y, false);
}

Vector LogisticRegression::batch_gradient(const Vector& theta, BatchRef batch) const {
    Vector g;
    (void)batch_loss_and_gradient(theta, batch, g);
    return g;
}

Vector LogisticRegression::initial_theta(Rng& rng) const { return 0.01 * gaussian_vector(dim(), rng); }

std::optional<double> LogisticRegression::accuracy(const Vector& theta, Split split) const {
    const auto c = static_cast<Eigen::Index>(data_->config.classes);
    const auto f = static_cast<Eigen::Index>(data_->config.features);
    const Eigen::Map<const Matrix> w(theta.data(), c, f);
    const Eigen::Map<const Vector> bias(theta.data() + c * f, c);
    const Matrix logits = (w * data_->inputs(split)).colwise() + bias;
    const auto& labels = data_->labels(split);
    std::size_t correct = 0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        correct += argmax(logits.col(j)) == labels[static_cast<std::size_t>(j)] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

// ---------------------------------------------------------------------------

MultilayerPerceptron::MultilayerPerceptron(std::shared_ptr<const BlobDataset> data, std::size_t hidden)
    : data_(std::move(data)) {
    if (!data_ || hidden == 0) {
        throw std::invalid_argument("MultilayerPerceptron: no dataset or empty hidden layer");
    }
    const std::size_t widths[] = {data_->config.features, hidden, hidden, data_->config.classes};
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < std::size(widths); ++l) {
        layers_.push_back(Layer{widths[l], widths[l + 1], offset});
        offset += widths[l] * widths[l + 1] + widths[l + 1];
    }
}

std::size_t MultilayerPerceptron::dim() const {
    const Layer& last = layers_.back();
    return last.offset + last.inputs * last.outputs + last.outputs;
}

Matrix MultilayerPerceptron::forward_logits(const Vector& theta, const Eigen::Ref<const Matrix>& inputs) const {
    Matrix a = inputs;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        const auto out = static_cast<Eigen::Index>(layer.outputs);
        const auto in = static_cast<Eigen::Index>(layer.inputs);
        const Eigen::Map<const Matrix> w(theta.data() + layer.offset, out, in);
        const Eigen::Map<const Vector> b(theta.data() + layer.offset + layer.outputs * layer.inputs, out);
        Matrix z = (w * a).colwise() + b;
        a = l + 1 < layers_.size() ? Matrix(z.array().tanh()) : std::move(z);
    }
    return a;
}

double MultilayerPerceptron::loss_impl(const Vector& theta, BatchRef batch, Vector* gradient) const {
    const auto [first, size] = data_->batch_columns(batch);
    const auto x = data_->inputs(batch.split).middleCols(static_cast<Eigen::Index>(first),
                                                         static_cast<Eigen::Index>(size));
    const std::span<const int> y(data_->labels(batch.split).data() + first, size);

    std::vector<Matrix> activations{x};
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        const auto out = static_cast<Eigen::Index>(layer.outputs);
        const auto in = static_cast<Eigen::Index>(layer.inputs);
        const Eigen::Map<const Matrix> w(theta.data() + layer.offset, out, in);
        const Eigen::Map<const Vector> b(theta.data() + layer.offset + layer.outputs * layer.inputs, out);
        Matrix z = (w * activations.back()).colwise() + b;
        activations.push_back(l + 1 < layers_.size() ? Matrix(z.array().tanh()) : std::move(z));
    }
    Matrix delta = std::move(activations.back());
    activations.pop_back();
    const double loss = softmax_cross_entropy(delta, y, gradient != nullptr);
    if (gradient == nullptr) {
        return loss;
    }

    gradient->resize(static_cast<Eigen::Index>(dim()));
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const Layer& layer = layers_[l];
        const auto out = static_cast<Eigen::Index>(layer.outputs);
        const auto in = static_cast<Eigen::Index>(layer.inputs);
        const Matrix& input = activations[l];
        Eigen::Map<Matrix>(gradient->data() + layer.offset, out, in) = delta * input.transpose();
        gradient->segment(static_cast<Eigen::Index>(layer.offset + layer.outputs * layer.inputs), out) =
            delta.rowwise().sum();
        if (l > 0) {
            const Eigen::Map<const Matrix> w(theta.data() + layer.offset, out, in);
            delta = ((w.transpose() * delta).array() * (1.0 - input.array().square())).matrix();
        }
    }
    return loss;
}

double MultilayerPerceptron::batch_loss(const Vector& theta, BatchRef batch) const {
    return loss_impl(theta, batch, nullptr);
}

Vector MultilayerPerceptron::batch_gradient(const Vector& theta, BatchRef batch) const {
    Vector g;
    (void)loss_impl(theta, batch, &g);
    return g;
}

double MultilayerPerceptron::batch_loss_and_gradient(const Vector& theta, BatchRef batch, Vector& gradient) const {
    return loss_impl(theta, batch, &gradient);
}

Vector MultilayerPerceptron::initial_theta(Rng& rng) const {
    Vector theta = Vector::Zero(static_cast<Eigen::Index>(dim()));
    for (const Layer& layer : layers_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
        std::uniform_real_distribution<double> uniform(-limit, limit);
        for (std::size_t i = 0; i < layer.inputs * layer.outputs; ++i) {
            theta(static_cast<Eigen::Index>(layer.offset + i)) = uniform(rng);
        }
    }
    return theta;
}

std::optional<double> MultilayerPerceptron::accuracy(const Vector& theta, Split split) const {
    const Matrix logits = forward_logits(theta, data_->inputs(split));
    const auto& labels = data_->labels(split);
    std::size_t correct = 0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
        correct += argmax(logits.col(j)) == labels[static_cast<std::size_t>(j)] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

}  // namespace elf
