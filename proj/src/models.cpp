#include "srs/models.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "srs/error.hpp"

namespace srs {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

bool parse_row(const std::string& line, std::vector<double>& out) {
    out.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(cell, &used));
            while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
            if (used != cell.size()) return false;
        } catch (const std::exception&) {
            return false;
        }
    }
    return !out.empty();
}

}  // namespace

Dataset::Dataset(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw InvalidArgument("dataset must contain at least one sample");
    const auto d = samples_.front().x.size();
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (samples_[i].x.size() != d) {
            throw InvalidArgument("dataset: sample " + std::to_string(i) +
                                  " has a different feature dimension");
        }
    }
}

Dataset Dataset::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open dataset file: " + path);
    std::vector<Sample> samples;
    std::string line;
    std::vector<double> row;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!parse_row(line, row)) {
            if (samples.empty() && line_no == 1) continue;  // header
            throw InvalidArgument(path + ":" + std::to_string(line_no) + ": not a numeric row");
        }
        if (row.size() < 2) {
            throw InvalidArgument(path + ":" + std::to_string(line_no) +
                                  ": need at least one feature and a label");
        }
        Sample s;
        s.x = Eigen::Map<const Vector>(row.data(), static_cast<Eigen::Index>(row.size() - 1));
        s.y = row.back();
        samples.push_back(std::move(s));
    }
    return Dataset(std::move(samples));
}

Vector Model::gradient(const Vector& w, const Sample& sample) const {
    Vector g = Vector::Zero(static_cast<Eigen::Index>(dim()));
    add_gradient(w, sample, 1.0, g);
    return g;
}

double LinearLeastSquares::loss(const Vector& w, const Sample& sample) const {
    const double r = sample.x.dot(w) - sample.y;
    return 0.5 * r * r;
}

void LinearLeastSquares::add_gradient(const Vector& w, const Sample& sample, double scale,
                                      Vector& g) const {
    g.noalias() += (scale * (sample.x.dot(w) - sample.y)) * sample.x;
}

double LogisticRegression::loss(const Vector& w, const Sample& sample) const {
    const double z = sample.x.dot(w);
    return softplus(z) - sample.y * z;
}

void LogisticRegression::add_gradient(const Vector& w, const Sample& sample, double scale,
                                      Vector& g) const {
    g.noalias() += (scale * (sigmoid(sample.x.dot(w)) - sample.y)) * sample.x;
}

Vector MatrixQuadratic::pack(const Matrix& A, const Vector& b) {
    const auto d = b.size();
    Vector x(d * d + d);
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) x[r * d + c] = A(r, c);
    }
    x.tail(d) = b;
    return x;
}

Matrix MatrixQuadratic::design(const Sample& sample) const {
    const auto d = static_cast<Eigen::Index>(d_);
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        sample.x.data(), d, d);
}

Vector MatrixQuadratic::target(const Sample& sample) const {
    return sample.x.tail(static_cast<Eigen::Index>(d_));
}

double MatrixQuadratic::loss(const Vector& w, const Sample& sample) const {
    return 0.5 * (design(sample) * w - target(sample)).squaredNorm();
}

void MatrixQuadratic::add_gradient(const Vector& w, const Sample& sample, double scale,
                                   Vector& g) const {
    const Matrix A = design(sample);
    g.noalias() += scale * (A.transpose() * (A * w - target(sample)));
}

double TwoLayerNet::loss(const Vector& w, const Sample& sample) const {
    const auto in = static_cast<Eigen::Index>(input_);
    const auto h = static_cast<Eigen::Index>(hidden_);
    double z = w[h * in + 2 * h];
    for (Eigen::Index j = 0; j < h; ++j) {
        const double pre = w.segment(j * in, in).dot(sample.x) + w[h * in + j];
        z += w[h * in + h + j] * std::tanh(pre);
    }
    return softplus(z) - sample.y * z;
}

void TwoLayerNet::add_gradient(const Vector& w, const Sample& sample, double scale,
                               Vector& g) const {
    const auto in = static_cast<Eigen::Index>(input_);
    const auto h = static_cast<Eigen::Index>(hidden_);
    Vector act(h);
    double z = w[h * in + 2 * h];
    for (Eigen::Index j = 0; j < h; ++j) {
        act[j] = std::tanh(w.segment(j * in, in).dot(sample.x) + w[h * in + j]);
        z += w[h * in + h + j] * act[j];
    }
    const double dz = scale * (sigmoid(z) - sample.y);
    for (Eigen::Index j = 0; j < h; ++j) {
        const double v = w[h * in + h + j];
        const double dpre = dz * v * (1.0 - act[j] * act[j]);
        g.segment(j * in, in) += dpre * sample.x;
        g[h * in + j] += dpre;
        g[h * in + h + j] += dz * act[j];
    }
    g[h * in + 2 * h] += dz;
}

std::unique_ptr<Model> make_model(const std::string& name, std::size_t feature_dim) {
    if (name == "least-squares") return std::make_unique<LinearLeastSquares>(feature_dim);
    if (name == "logistic") return std::make_unique<LogisticRegression>(feature_dim);
    if (name == "constant") return std::make_unique<ConstantModel>(feature_dim);
    throw InvalidArgument("unknown model '" + name + "' (expected least-squares, logistic, constant)");
}

}  // namespace srs
