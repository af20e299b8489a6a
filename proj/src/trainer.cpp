#include "srs/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "srs/error.hpp"

namespace srs {

namespace {

void check_finite(double value, std::size_t index) {
    if (!std::isfinite(value)) {
        throw NonFiniteLoss("non-finite loss at sample " + std::to_string(index), index);
    }
}

void check_subset(const Dataset& data, std::span<const std::uint32_t> subset) {
    if (subset.empty()) throw InvalidArgument("subset must be non-empty");
    for (auto i : subset) {
        if (i >= data.size()) throw InvalidArgument("subset index " + std::to_string(i) + " out of range");
    }
}

EpochRecord measure(const Model& model, const Dataset& data, const Vector& w,
                    std::uint64_t epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.objective = full_objective(model, data, w);
    const Vector g = full_gradient(model, data, w);
    rec.grad_norm_sq = g.squaredNorm();
    double var = 0.0;
    for (const auto& sample : data.samples()) var += (model.gradient(w, sample) - g).squaredNorm();
    rec.grad_variance = var / static_cast<double>(data.size());
    return rec;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double full_objective(const Model& model, const Dataset& data, const Vector& w) {
    if (data.size() == 0) throw InvalidArgument("full_objective: empty dataset");
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double f = model.loss(w, data[i]);
        check_finite(f, i);
        acc += f;
    }
    return acc / static_cast<double>(data.size());
}

Vector full_gradient(const Model& model, const Dataset& data, const Vector& w) {
    if (data.size() == 0) throw InvalidArgument("full_gradient: empty dataset");
    Vector g = Vector::Zero(static_cast<Eigen::Index>(model.dim()));
    const double scale = 1.0 / static_cast<double>(data.size());
    for (const auto& sample : data.samples()) model.add_gradient(w, sample, scale, g);
    return g;
}

double subset_objective(const Model& model, const Dataset& data, const Vector& w,
                        std::span<const std::uint32_t> subset) {
    check_subset(data, subset);
    double acc = 0.0;
    for (auto i : subset) {
        const double f = model.loss(w, data[i]);
        check_finite(f, i);
        acc += f;
    }
    return acc / static_cast<double>(subset.size());
}

Vector subset_gradient(const Model& model, const Dataset& data, const Vector& w,
                       std::span<const std::uint32_t> subset) {
    check_subset(data, subset);
    Vector g = Vector::Zero(static_cast<Eigen::Index>(model.dim()));
    const double scale = 1.0 / static_cast<double>(subset.size());
    for (auto i : subset) model.add_gradient(w, data[i], scale, g);
    return g;
}

double gradient_variance(const Model& model, const Dataset& data, const Vector& w) {
    return measure(model, data, w, 0).grad_variance;
}

void OptimizerConfig::validate() const {
    if (!(step_size > 0.0) || !std::isfinite(step_size)) {
        throw InvalidArgument("step size must be a positive finite number");
    }
    if (!(step_decay >= 0.0) || !std::isfinite(step_decay)) {
        throw InvalidArgument("step decay must be a nonnegative finite number");
    }
    if (batch_size < 1) throw InvalidArgument("batch size must be >= 1");
    if (!(divergence_factor > 1.0)) throw InvalidArgument("divergence factor must exceed 1");
}

double OptimizerConfig::epoch_step(std::uint64_t k) const {
    return step_size / (1.0 + step_decay * static_cast<double>(k - 1));
}

TrainingTrace train_srs(const Model& model, const Dataset& data, const SubsetSchedule& schedule,
                        const OptimizerConfig& opt, const Vector& w0, Xoshiro256& rng) {
    opt.validate();
    if (schedule.n != data.size()) {
        throw InvalidArgument("schedule covers n = " + std::to_string(schedule.n) +
                              " samples but the dataset has " + std::to_string(data.size()));
    }
    if (static_cast<std::size_t>(w0.size()) != model.dim()) {
        throw InvalidArgument("initial parameters have the wrong dimension");
    }
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        if (!opt.record_wall_time) return 0.0;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    TrainingTrace trace;
    trace.records.reserve(schedule.K() + 1);
    Vector w = w0;
    trace.records.push_back(measure(model, data, w, 0));
    const double initial = trace.records.front().objective;

    std::uint64_t visits = 0;
    Vector g(w.size());
    std::vector<std::uint32_t> order;
    for (std::uint64_t k = 1; k <= schedule.K(); ++k) {
        const IndexSet& subset = schedule.epochs[k - 1];
        if (subset.empty()) throw InvalidArgument("schedule epoch " + std::to_string(k) + " is empty");
        const std::uint64_t steps = opt.epoch_steps == 0 ? subset.size() : opt.epoch_steps;
        const double scale = 1.0 / static_cast<double>(opt.batch_size);
        const double alpha = opt.epoch_step(k);

        std::size_t cursor = subset.size();
        order.assign(subset.begin(), subset.end());
        auto next_index = [&]() -> std::uint32_t {
            if (opt.sampling == WithinEpochSampling::iid_with_replacement) {
                return subset[rng.uniform_below(subset.size())];
            }
            if (cursor == order.size()) {
                for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                    std::swap(order[i], order[i + rng.uniform_below(order.size() - i)]);
                }
                cursor = 0;
            }
            return order[cursor++];
        };

        for (std::uint64_t step = 0; step < steps; ++step) {
            g.setZero();
            for (std::uint64_t b = 0; b < opt.batch_size; ++b) {
                const std::uint32_t i = next_index();
                model.add_gradient(w, data[i], scale, g);
                if (opt.record_visits) trace.visits.push_back(i);
            }
            w.noalias() -= alpha * g;
            visits += opt.batch_size;
        }

        EpochRecord rec;
        try {
            rec = measure(model, data, w, k);
        } catch (const NonFiniteLoss& e) {
            throw DivergenceError("training diverged in epoch " + std::to_string(k) + ": " + e.what(), k);
        }
        rec.subset_hash = subset_fingerprint(subset);
        rec.sample_visits = visits;
        rec.wall_seconds = elapsed();
        if (initial > 0.0 && rec.objective > opt.divergence_factor * initial) {
            throw DivergenceError("training diverged in epoch " + std::to_string(k) + ": objective " +
                                      format_double(rec.objective) + " exceeds " +
                                      format_double(opt.divergence_factor) + " x initial " +
                                      format_double(initial),
                                  k);
        }
        trace.records.push_back(rec);
    }
    trace.final_w = w;
    return trace;
}

std::vector<TrainingTrace> train_seeds(const Model& model, const Dataset& data,
                                       const SelectionPolicy& policy, std::uint64_t K,
                                       const OptimizerConfig& opt, const Vector& w0,
                                       std::uint64_t runs, std::uint64_t base_seed,
                                       unsigned workers) {
    if (runs == 0) throw InvalidArgument("train_seeds: runs must be >= 1");
    std::vector<TrainingTrace> traces(runs);
    auto run_one = [&](std::uint64_t r) {
        SelectionPolicy p = policy;
        p.seed = derive_seed(base_seed, 2 * r);
        const SubsetSchedule schedule = build_schedule(data.size(), p, K);
        Xoshiro256 rng(derive_seed(base_seed, 2 * r + 1));
        traces[r] = train_srs(model, data, schedule, opt, w0, rng);
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(runs)));
    if (workers == 1) {
        for (std::uint64_t r = 0; r < runs; ++r) run_one(r);
        return traces;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::uint64_t r = t; r < runs; r += workers) run_one(r);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return traces;
}

double gradient_check(const Model& model, const Dataset& data, std::span<const Vector> probes,
                      double h) {
    if (!(h > 0.0)) throw InvalidArgument("gradient_check: h must be > 0");
    double worst = 0.0;
    for (const Vector& w : probes) {
        const Vector analytic = full_gradient(model, data, w);
        Vector probe = w;
        for (Eigen::Index j = 0; j < w.size(); ++j) {
            probe[j] = w[j] + h;
            const double up = full_objective(model, data, probe);
            probe[j] = w[j] - h;
            const double down = full_objective(model, data, probe);
            probe[j] = w[j];
            const double numeric = (up - down) / (2.0 * h);
            worst = std::max(worst, std::abs(analytic[j] - numeric) / (std::abs(analytic[j]) + 1e-12));
        }
    }
    return worst;
}

double gradient_check(const Model& model, const Dataset& data, double h, std::size_t count,
                      std::uint64_t seed, double scale) {
    Xoshiro256 rng(seed);
    std::vector<Vector> probes(count);
    for (auto& p : probes) {
        p.resize(static_cast<Eigen::Index>(model.dim()));
        for (Eigen::Index j = 0; j < p.size(); ++j) p[j] = scale * rng.normal();
    }
    return gradient_check(model, data, probes, h);
}

nlohmann::json to_json(const TrainingTrace& trace) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : trace.records) {
        records.push_back({{"epoch", r.epoch},
                           {"objective", r.objective},
                           {"grad_norm_sq", r.grad_norm_sq},
                           {"grad_variance", r.grad_variance},
                           {"subset_hash", r.subset_hash},
                           {"sample_visits", r.sample_visits},
                           {"wall_seconds", r.wall_seconds}});
    }
    nlohmann::json j;
    j["records"] = records;
    j["final_w"] = std::vector<double>(trace.final_w.data(), trace.final_w.data() + trace.final_w.size());
    return j;
}

std::string to_csv(const TrainingTrace& trace) {
    std::ostringstream out;
    out << "epoch,objective,grad_norm_sq,subset_hash,wall_seconds\n";
    for (const auto& r : trace.records) {
        char hash[20];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(r.subset_hash));
        out << r.epoch << ',' << format_double(r.objective) << ',' << format_double(r.grad_norm_sq)
            << ',' << hash << ',' << format_double(r.wall_seconds) << '\n';
    }
    return out.str();
}

}  // namespace srs
