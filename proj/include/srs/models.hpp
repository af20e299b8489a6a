#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace srs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Sample {
    Vector x;
    double y = 0.0;
};

/// The ground set: n samples whose feature vectors share one dimension.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Sample> samples);

    std::size_t size() const { return samples_.size(); }
    std::size_t feature_dim() const { return samples_.empty() ? 0 : samples_.front().x.size(); }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    const std::vector<Sample>& samples() const { return samples_; }

    /// Numeric CSV, one sample per row, label in the last column. A first row
    /// that does not parse as numbers is treated as a header.
    static Dataset from_csv(const std::string& path);

private:
    std::vector<Sample> samples_;
};

/// Per-sample loss f(h(x; w), y) and its gradient in w.
class Model {
public:
    virtual ~Model() = default;

    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    virtual double loss(const Vector& w, const Sample& sample) const = 0;
    /// g += scale * grad_w loss(w, sample)
    virtual void add_gradient(const Vector& w, const Sample& sample, double scale,
                              Vector& g) const = 0;

    Vector gradient(const Vector& w, const Sample& sample) const;
};

/// Zero loss everywhere.
class ConstantModel final : public Model {
public:
    explicit ConstantModel(std::size_t d) : d_(d) {}
    std::string name() const override { return "constant"; }
    std::size_t dim() const override { return d_; }
    double loss(const Vector&, const Sample&) const override { return 0.0; }
    void add_gradient(const Vector&, const Sample&, double, Vector&) const override {}

private:
    std::size_t d_;
};

/// f = 0.5 * (x . w - y)^2
class LinearLeastSquares final : public Model {
public:
    explicit LinearLeastSquares(std::size_t d) : d_(d) {}
    std::string name() const override { return "least-squares"; }
    std::size_t dim() const override { return d_; }
    double loss(const Vector& w, const Sample& sample) const override;
    void add_gradient(const Vector& w, const Sample& sample, double scale,
                      Vector& g) const override;

private:
    std::size_t d_;
};

/// Binary cross-entropy of sigmoid(x . w) against y in {0, 1}.
class LogisticRegression final : public Model {
public:
    explicit LogisticRegression(std::size_t d) : d_(d) {}
    std::string name() const override { return "logistic"; }
    std::size_t dim() const override { return d_; }
    double loss(const Vector& w, const Sample& sample) const override;
    void add_gradient(const Vector& w, const Sample& sample, double scale,
                      Vector& g) const override;

private:
    std::size_t d_;
};

/// f = 0.5 * ||A w - b||^2 with A (d x d, row-major) and b packed into x as
/// [A(0,0), A(0,1), ..., A(d-1,d-1), b(0), ..., b(d-1)]. y is unused.
class MatrixQuadratic final : public Model {
public:
    explicit MatrixQuadratic(std::size_t d) : d_(d) {}
    std::string name() const override { return "pl-quadratic"; }
    std::size_t dim() const override { return d_; }
    double loss(const Vector& w, const Sample& sample) const override;
    void add_gradient(const Vector& w, const Sample& sample, double scale,
                      Vector& g) const override;

    static Vector pack(const Matrix& A, const Vector& b);
    Matrix design(const Sample& sample) const;
    Vector target(const Sample& sample) const;

private:
    std::size_t d_;
};

/// One tanh hidden layer, sigmoid output, cross-entropy loss. Parameters are
/// [W1 (hidden x input, row-major), b1 (hidden), w2 (hidden), b2].
class TwoLayerNet final : public Model {
public:
    TwoLayerNet(std::size_t input_dim, std::size_t hidden) : input_(input_dim), hidden_(hidden) {}
    std::string name() const override { return "two-layer-net"; }
    std::size_t dim() const override { return hidden_ * input_ + 2 * hidden_ + 1; }
    double loss(const Vector& w, const Sample& sample) const override;
    void add_gradient(const Vector& w, const Sample& sample, double scale,
                      Vector& g) const override;

private:
    std::size_t input_;
    std::size_t hidden_;
};

std::unique_ptr<Model> make_model(const std::string& name, std::size_t feature_dim);

}  // namespace srs
