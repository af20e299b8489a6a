#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "srs/models.hpp"
#include "srs/random.hpp"
#include "srs/sampler.hpp"

namespace srs {

/// Mean per-sample loss over the ground set. Throws NonFiniteLoss naming the
/// first offending sample.
double full_objective(const Model& model, const Dataset& data, const Vector& w);
Vector full_gradient(const Model& model, const Dataset& data, const Vector& w);

double subset_objective(const Model& model, const Dataset& data, const Vector& w,
                        std::span<const std::uint32_t> subset);
Vector subset_gradient(const Model& model, const Dataset& data, const Vector& w,
                       std::span<const std::uint32_t> subset);

/// (1/n) sum_i ||grad f_i(w) - grad L_G(w)||^2
double gradient_variance(const Model& model, const Dataset& data, const Vector& w);

enum class WithinEpochSampling { iid_with_replacement, reshuffle };

struct OptimizerConfig {
    double step_size = 0.01;
    double step_decay = 0.0;        // epoch k uses step_size / (1 + step_decay (k - 1))
    std::uint64_t epoch_steps = 0;  // 0 means m, the subset size
    std::uint64_t batch_size = 1;
    WithinEpochSampling sampling = WithinEpochSampling::iid_with_replacement;
    double divergence_factor = 1e6;
    bool record_visits = false;     // keep the per-step sample order in the trace
    bool record_wall_time = false;  // otherwise wall_seconds stays 0 for byte-stable output

    void validate() const;
    double epoch_step(std::uint64_t k) const;
};

struct EpochRecord {
    std::uint64_t epoch = 0;
    double objective = 0.0;       // L_G(w) at the end of the epoch
    double grad_norm_sq = 0.0;    // ||grad L_G(w)||^2
    double grad_variance = 0.0;   // gradient_variance at the same w
    std::uint64_t subset_hash = 0;
    std::uint64_t sample_visits = 0;  // cumulative per-sample gradient evaluations
    double wall_seconds = 0.0;
};

/// records[0] describes the initial point w_0 (epoch 0, no subset);
/// records[k] the iterate after epoch k.
struct TrainingTrace {
    std::vector<EpochRecord> records;
    std::vector<std::uint32_t> visits;  // filled when record_visits is set
    Vector final_w;

    std::uint64_t K() const { return records.empty() ? 0 : records.size() - 1; }
};

/// Runs each epoch's SGD steps on samples from that epoch's subset. With
/// iid_with_replacement every step draws batch_size indices uniformly from V_k;
/// with reshuffle V_k is permuted and consumed in order, reshuffled when used up.
TrainingTrace train_srs(const Model& model, const Dataset& data, const SubsetSchedule& schedule,
                        const OptimizerConfig& opt, const Vector& w0, Xoshiro256& rng);

/// `runs` independent trainings. Run r uses schedule seed derive_seed(base, 2r)
/// and step seed derive_seed(base, 2r + 1); traces come back in run order.
std::vector<TrainingTrace> train_seeds(const Model& model, const Dataset& data,
                                       const SelectionPolicy& policy, std::uint64_t K,
                                       const OptimizerConfig& opt, const Vector& w0,
                                       std::uint64_t runs, std::uint64_t base_seed,
                                       unsigned workers = 1);

/// max over probes and coordinates of |analytic - central difference| /
/// (|analytic| + 1e-12), for the full objective.
double gradient_check(const Model& model, const Dataset& data, std::span<const Vector> probes,
                      double h = 1e-5);
/// Same with `count` probes drawn as scale * N(0, I).
double gradient_check(const Model& model, const Dataset& data, double h, std::size_t count,
                      std::uint64_t seed, double scale = 1.0);

nlohmann::json to_json(const TrainingTrace& trace);
/// CSV with header epoch,objective,grad_norm_sq,subset_hash,wall_seconds
std::string to_csv(const TrainingTrace& trace);

}  // namespace srs
