#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "srs/benchmark.hpp"
#include "srs/cli.hpp"
#include "srs/convergence.hpp"
#include "srs/dynamics.hpp"
#include "srs/error.hpp"
#include "srs/generalization.hpp"
#include "srs/simulator.hpp"

namespace srs::cli {

namespace {

using Files = std::map<std::string, std::string>;
using nlohmann::json;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v, int digits = 6) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// "12.5" -> 125/10, "1/3" -> 1/3. Exact.
BigRational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            return make_rational(BigInteger(text.substr(0, slash)), BigInteger(text.substr(slash + 1)));
        }
        const auto dot = text.find('.');
        if (dot == std::string::npos) return BigRational(BigInteger(text));
        const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        return make_rational(BigInteger(digits), integer_pow(BigInteger(10), text.size() - dot - 1));
    } catch (const std::runtime_error&) {
        throw InvalidArgument("not a number: '" + text + "'");
    }
}

std::uint64_t parse_count(const std::string& text, std::uint64_t n_value) {
    if (text == "n") return n_value;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidArgument("expected a positive integer or 'n', got '" + text + "'");
}

json rational_json(const BigRational& q) {
    return {{"numerator", boost::multiprecision::numerator(q).str()},
            {"denominator", boost::multiprecision::denominator(q).str()},
            {"float", to_double(q)}};
}

// Parsed options shared by every subcommand.
struct Globals {
    std::uint64_t seed = 0;
    std::string out_dir;
    unsigned workers = 0;
};

struct Outcome {
    Files files;
    json summary = json::object();
};

// ---------------------------------------------------------------- coverage

struct CoverageArgs {
    std::uint64_t n = 0, m = 0, K = 0;
    std::string mode = "exact";
    std::uint64_t trials = 100000;
    bool table = false;
    bool curve = false;
    std::vector<std::string> ratios{"5", "10", "20"};
    std::vector<std::uint64_t> epochs{10, 20, 30};
    std::vector<std::uint64_t> intervals{1};
    std::uint64_t runs = 1000;
    std::uint64_t max_exact_n = 200;
};

std::string pmf_csv(const CoverageDistribution& dist) {
    std::ostringstream csv;
    csv << "n,m,K,l,probability_numerator,probability_denominator,probability_float\n";
    for (std::size_t l = 0; l < dist.pmf.size(); ++l) {
        const auto& p = dist.pmf[l];
        csv << dist.config.n << ',' << dist.config.m << ',' << dist.config.K << ',' << l << ','
            << boost::multiprecision::numerator(p) << ',' << boost::multiprecision::denominator(p) << ','
            << fmt(to_double(p)) << '\n';
    }
    return csv.str();
}

Outcome cmd_coverage(const CoverageArgs& a, const Globals& g, std::uint64_t seed, std::ostream& out) {
    Outcome result;
    if (a.table) {
        std::vector<BigRational> ratios;
        for (const auto& r : a.ratios) ratios.push_back(parse_rational(r) / 100);
        const std::uint64_t n = a.n == 0 ? 1000 : a.n;
        const auto cells = coverage_table(ratios, a.epochs, n);

        std::ostringstream csv;
        csv << "ratio_percent,n,m,K,expected_numerator,expected_denominator,percent\n";
        json cells_json = json::array();
        out << "Expected coverage (% of n = " << n << ")\n  m/n    ";
        for (auto K : a.epochs) out << "  K=" << K << "   ";
        out << '\n';
        std::size_t i = 0;
        for (std::size_t r = 0; r < ratios.size(); ++r) {
            const double pct = to_double(ratios[r] * 100);
            out << "  " << fmt_short(pct, 4) << "%\t";
            for (std::size_t k = 0; k < a.epochs.size(); ++k, ++i) {
                const auto& c = cells[i];
                char cell[16];
                std::snprintf(cell, sizeof cell, "%6.1f%%", c.percent);
                out << "  " << cell;
                csv << fmt(pct) << ',' << c.n << ',' << c.m << ',' << c.K << ','
                    << boost::multiprecision::numerator(c.expected) << ','
                    << boost::multiprecision::denominator(c.expected) << ',' << fmt(c.percent) << '\n';
                cells_json.push_back({{"ratio_percent", pct}, {"n", c.n}, {"m", c.m}, {"K", c.K},
                                      {"expected", rational_json(c.expected)}, {"percent", c.percent}});
            }
            out << "   (m = " << cells[i - 1].m << ")\n";
        }
        result.files["coverage_table.csv"] = csv.str();
        result.files["coverage_table.json"] = json{{"n", n}, {"cells", cells_json}}.dump(2) + "\n";
        return result;
    }

    if (a.n == 0 || a.m == 0 || a.K == 0) throw InvalidArgument("coverage: --n, --m and --K are required");
    const SamplingConfig config{a.n, a.m, a.K};
    config.validate();

    if (a.curve) {
        std::ostringstream csv;
        csv << "R,epoch,mean_distinct,mean_percent,expected_distinct\n";
        json curves = json::array();
        for (std::size_t r = 0; r < a.intervals.size(); ++r) {
            const auto R = a.intervals[r];
            const auto mean = mean_coverage_curve(a.n, a.m, R, a.K, a.runs, derive_seed(seed, r));
            out << "R = " << R << " (mean over " << a.runs << " schedules)\n";
            for (std::uint64_t k = 1; k <= a.K; ++k) {
                const std::uint64_t draws = (k + R - 1) / R;
                const double expected = to_double(expected_coverage({a.n, a.m, draws}));
                const double pct = 100.0 * mean[k - 1] / static_cast<double>(a.n);
                csv << R << ',' << k << ',' << fmt(mean[k - 1]) << ',' << fmt(pct) << ',' << fmt(expected) << '\n';
                out << "  epoch " << k << ": " << fmt_short(mean[k - 1]) << " distinct ("
                    << fmt_short(pct, 4) << "%), closed form " << fmt_short(expected) << '\n';
            }
            curves.push_back({{"R", R}, {"mean_distinct", mean}});
        }
        result.files["coverage_curve.csv"] = csv.str();
        result.files["coverage_curve.json"] =
            json{{"n", a.n}, {"m", a.m}, {"K", a.K}, {"runs", a.runs}, {"curves", curves}}.dump(2) + "\n";
        return result;
    }

    CoverageDistribution dist;
    json sim_json;
    if (a.mode == "exact") {
        dist = coverage_pmf(config, ExactLimits{a.max_exact_n});
    } else if (a.mode == "enumerate") {
        dist = enumerate_coverage(config);
    } else if (a.mode == "simulate") {
        const auto sim = simulate_coverage(config, a.trials, seed, ParallelOptions{g.workers});
        dist = CoverageDistribution{config, std::vector<BigRational>(a.n + 1), DistributionSource::monte_carlo};
        for (const auto& [l, count] : sim.counts) {
            dist.pmf[l] = make_rational(BigInteger(count), BigInteger(a.trials));
        }
        sim_json = to_json(sim);
    } else {
        throw InvalidArgument("coverage: --mode must be exact, enumerate or simulate");
    }

    const BigRational expected = expected_coverage(config);
    out << "P(|S| = l) for n = " << a.n << ", m = " << a.m << ", K = " << a.K << " ("
        << to_string(dist.source) << ")\n";
    json pmf_json = json::object();
    for (std::size_t l = 0; l < dist.pmf.size(); ++l) {
        if (dist.pmf[l] == 0) continue;
        out << "  " << l << ": " << to_string(dist.pmf[l]) << "  (" << fmt_short(to_double(dist.pmf[l]), 10)
            << ")\n";
        pmf_json[std::to_string(l)] = rational_json(dist.pmf[l]);
    }
    out << "E|S| = " << fmt_short(to_double(dist.mean()), 10) << " (closed form "
        << fmt_short(to_double(expected), 10) << ")\n";

    result.files["coverage_pmf.csv"] = pmf_csv(dist);
    json j{{"config", {{"n", a.n}, {"m", a.m}, {"K", a.K}}},
           {"source", to_string(dist.source)},
           {"pmf", pmf_json},
           {"mean", rational_json(dist.mean())},
           {"expected_coverage", rational_json(expected)}};
    if (!sim_json.is_null()) j["simulation"] = sim_json;
    result.files["coverage.json"] = j.dump(2) + "\n";
    return result;
}

// ---------------------------------------------------------------- occupancy

struct OccupancyArgs {
    std::uint64_t n = 0, m = 0, s = 0;
    bool classical = false;
    bool simulate = false;
    std::uint64_t trials = 100000;
    double epsilon = 1e-9;
    std::uint64_t max_exact_n = 200;
};

Outcome cmd_occupancy(const OccupancyArgs& a, const Globals& g, std::uint64_t seed, std::ostream& out) {
    Outcome result;
    if (a.classical) {
        if (a.n == 0) throw InvalidArgument("occupancy --classical: --n is required");
        std::ostringstream csv;
        csv << "n,expected_numerator,expected_denominator,expected_float\n";
        BigRational last;
        for (std::uint64_t i = 1; i <= a.n; ++i) {
            last = classical_coupon_expectation(i);
            csv << i << ',' << boost::multiprecision::numerator(last) << ','
                << boost::multiprecision::denominator(last) << ',' << fmt(to_double(last)) << '\n';
        }
        out << "n * H_n for n = " << a.n << ": " << to_string(last) << " (" << fmt_short(to_double(last), 10)
            << ")\n";
        result.files["classical.csv"] = csv.str();
        result.files["classical.json"] = json{{"n", a.n}, {"expected", rational_json(last)}}.dump(2) + "\n";
        return result;
    }
    if (a.n == 0 || a.m == 0 || a.s == 0) throw InvalidArgument("occupancy: --n, --m and --s are required");

    if (a.simulate) {
        const auto sim = simulate_occupancy(a.n, a.m, a.s, a.trials, seed, ParallelOptions{g.workers});
        std::ostringstream csv;
        csv << "n,m,s,k,count,probability_float\n";
        for (const auto& [k, count] : sim.counts) {
            csv << a.n << ',' << a.m << ',' << a.s << ',' << k << ',' << count << ','
                << fmt(static_cast<double>(count) / static_cast<double>(a.trials)) << '\n';
        }
        out << "simulated mean epochs to cover " << a.s << " of " << a.n << " (m = " << a.m
            << ", " << a.trials << " trials): " << fmt_short(sim.mean(), 10) << '\n';
        json j = to_json(sim);
        if (a.n <= a.max_exact_n) {
            const double exact = to_double(expected_occupancy(a.n, a.m, a.s, ExactLimits{a.max_exact_n}));
            out << "exact mean: " << fmt_short(exact, 10) << "  (relative difference "
                << fmt_short(std::abs(sim.mean() - exact) / exact, 3) << ")\n";
            j["exact_mean"] = exact;
        }
        result.files["occupancy_sim.csv"] = csv.str();
        result.files["occupancy_sim.json"] = j.dump(2) + "\n";
        return result;
    }

    const ExactLimits limits{a.max_exact_n};
    const auto dist = occupancy_pmf(a.n, a.m, a.s, a.epsilon, limits);
    const auto expected = expected_occupancy(a.n, a.m, a.s, limits);
    std::ostringstream csv;
    csv << "n,m,s,k,probability_numerator,probability_denominator,probability_float\n";
    json pmf_json = json::object();
    out << "P(epochs = k) to cover s = " << a.s << " of n = " << a.n << " with m = " << a.m << '\n';
    for (std::uint64_t k = 1; k <= dist.k_max; ++k) {
        const auto& p = dist.pmf[k - 1];
        csv << a.n << ',' << a.m << ',' << a.s << ',' << k << ',' << boost::multiprecision::numerator(p) << ','
            << boost::multiprecision::denominator(p) << ',' << fmt(to_double(p)) << '\n';
        if (p != 0) pmf_json[std::to_string(k)] = rational_json(p);
        if (k <= 20 && p != 0) out << "  " << k << ": " << fmt_short(to_double(p), 10) << '\n';
    }
    if (dist.k_max > 20) out << "  ... (" << dist.k_max << " terms in the CSV)\n";
    out << "E[epochs] = " << to_string(expected) << " (" << fmt_short(to_double(expected), 10) << ")\n"
        << "truncated at k_max = " << dist.k_max << ", remaining mass " << fmt_short(dist.tail_mass.value, 3)
        << " <= bound " << fmt_short(dist.tail_bound, 3) << '\n';
    result.files["occupancy_pmf.csv"] = csv.str();
    result.files["occupancy.json"] = json{{"config", {{"n", a.n}, {"m", a.m}, {"s", a.s}}},
                                          {"k_max", dist.k_max},
                                          {"pmf", pmf_json},
                                          {"tail_mass", dist.tail_mass.value},
                                          {"tail_bound", dist.tail_bound},
                                          {"expected", rational_json(expected)}}
                                         .dump(2) +
                                     "\n";
    return result;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
    std::string benchmark;
    std::string dataset;
    std::string model = "least-squares";
    std::size_t d = 5;
    std::size_t n = 50;
    double noise = 0.1;
    double heterogeneity = 0.2;
    std::size_t hidden = 8;
    std::string m = "n";
    std::uint64_t R = 1;
    std::uint64_t K = 100;
    std::string alpha = "auto";
    double step_decay = 0.0;
    std::uint64_t seeds = 1;
    std::uint64_t epoch_steps = 0;
    std::uint64_t batch = 1;
    std::string sampling = "iid";
    bool verify_bound = false;
    std::string bound_mode = "both";
    bool record_wall_time = false;
    bool full_data_reference = false;
};

// Plain SGD over an explicit visit order; the reference for the m = n check.
Vector reference_sgd(const Model& model, const Dataset& data, const std::vector<std::uint32_t>& order,
                     std::uint64_t batch, double alpha, Vector w) {
    Vector g(w.size());
    for (std::size_t i = 0; i < order.size(); i += batch) {
        g.setZero();
        for (std::size_t b = 0; b < batch; ++b) {
            model.add_gradient(w, data[order[i + b]], 1.0 / static_cast<double>(batch), g);
        }
        w.noalias() -= alpha * g;
    }
    return w;
}

Outcome cmd_train(const TrainArgs& a, const Globals& g, std::uint64_t seed, std::ostream& out) {
    Outcome result;
    std::shared_ptr<const Model> model;
    Dataset data;
    Vector w0;
    std::optional<BenchmarkConstants> constants;

    if (!a.benchmark.empty() && !a.dataset.empty()) {
        throw InvalidArgument("train: give either --benchmark or --dataset, not both");
    }
    if (a.benchmark == "pl-quadratic") {
        PlQuadraticOptions opts;
        opts.d = a.d;
        opts.n = a.n;
        opts.noise = a.noise;
        opts.heterogeneity = a.heterogeneity;
        opts.seed = derive_seed(seed, name_salt("benchmark"));
        auto bench = pl_quadratic_benchmark(opts);
        model = bench.model;
        data = std::move(bench.data);
        w0 = Vector::Zero(static_cast<Eigen::Index>(a.d));
        constants = bench.constants;
    } else if (a.benchmark == "two-layer") {
        auto bench = two_layer_benchmark(a.n, a.hidden, derive_seed(seed, name_salt("benchmark")));
        model = bench.model;
        data = std::move(bench.data);
        w0 = bench.w0;
        constants = bench.constants;
    } else if (!a.benchmark.empty()) {
        throw InvalidArgument("train: unknown benchmark '" + a.benchmark + "' (pl-quadratic, two-layer)");
    } else if (!a.dataset.empty()) {
        data = Dataset::from_csv(a.dataset);
        model = make_model(a.model, data.feature_dim());
        w0 = Vector::Zero(static_cast<Eigen::Index>(model->dim()));
    } else {
        throw InvalidArgument("train: --benchmark or --dataset is required");
    }

    const std::uint64_t n = data.size();
    const std::uint64_t m = parse_count(a.m, n);
    if (m < 1 || m > n) throw InvalidArgument("train: need 1 <= m <= n");

    OptimizerConfig opt;
    if (a.alpha == "auto") {
        if (!constants) throw InvalidArgument("train: --alpha auto needs a benchmark with known L");
        opt.step_size = 0.5 / constants->L;
    } else {
        try {
            opt.step_size = std::stod(a.alpha);
        } catch (const std::exception&) {
            throw InvalidArgument("train: --alpha must be a number or 'auto'");
        }
    }
    opt.step_decay = a.step_decay;
    opt.epoch_steps = a.epoch_steps;
    opt.batch_size = a.batch;
    if (a.sampling == "iid") {
        opt.sampling = WithinEpochSampling::iid_with_replacement;
    } else if (a.sampling == "reshuffle") {
        opt.sampling = WithinEpochSampling::reshuffle;
    } else {
        throw InvalidArgument("train: --sampling must be iid or reshuffle");
    }
    opt.record_wall_time = a.record_wall_time;
    opt.record_visits = a.full_data_reference;

    const SelectionPolicy policy{m, a.R, 0};
    const unsigned workers = g.workers == 0 ? 1 : g.workers;
    const auto traces = train_seeds(*model, data, policy, a.K, opt, w0, a.seeds, seed, workers);

    std::vector<double> mean_obj(a.K + 1, 0.0), mean_grad(a.K + 1, 0.0);
    for (std::size_t r = 0; r < traces.size(); ++r) {
        char name[32];
        std::snprintf(name, sizeof name, "trace_%03zu.csv", r);
        result.files[name] = to_csv(traces[r]);
        for (std::uint64_t k = 0; k <= a.K; ++k) {
            mean_obj[k] += traces[r].records[k].objective / static_cast<double>(traces.size());
            mean_grad[k] += traces[r].records[k].grad_norm_sq / static_cast<double>(traces.size());
        }
    }
    std::ostringstream mean_csv;
    mean_csv << "epoch,mean_objective,mean_grad_norm_sq\n";
    for (std::uint64_t k = 0; k <= a.K; ++k) mean_csv << k << ',' << fmt(mean_obj[k]) << ',' << fmt(mean_grad[k]) << '\n';
    result.files["trace_mean.csv"] = mean_csv.str();

    out << model->name() << ": n = " << n << ", m = " << m << ", R = " << a.R << ", K = " << a.K
        << ", alpha = " << fmt_short(opt.step_size) << ", runs = " << a.seeds << '\n'
        << "  mean objective: epoch 0 " << fmt_short(mean_obj[0]) << " -> epoch " << a.K << ' '
        << fmt_short(mean_obj[a.K]) << '\n';

    json summary{{"model", model->name()}, {"n", n}, {"m", m}, {"R", a.R}, {"K", a.K},
                 {"alpha", opt.step_size}, {"runs", a.seeds}, {"final_mean_objective", mean_obj[a.K]}};
    if (constants) {
        summary["constants"] = {{"L", constants->L}, {"mu", constants->mu}, {"sigma2", constants->sigma2},
                                {"optimum_loss", constants->optimum_loss},
                                {"estimated", constants->estimated}};
    }

    if (a.full_data_reference) {
        if (m != n || a.R != 1) throw InvalidArgument("train: --full-data-reference needs m = n and R = 1");
        if (a.step_decay != 0.0) throw InvalidArgument("train: --full-data-reference needs a constant step size");
        bool identical = true;
        for (const auto& t : traces) {
            const Vector ref = reference_sgd(*model, data, t.visits, a.batch, opt.step_size, w0);
            identical = identical && ref == t.final_w;
        }
        out << "  identical to full-data SGD with the same sample order: " << (identical ? "yes" : "no") << '\n';
        summary["identical_to_full_data_sgd"] = identical;
    }

    if (a.verify_bound) {
        if (!constants) throw InvalidArgument("train: --verify-bound needs a benchmark with known constants");
        std::vector<BoundMode> modes;
        if (a.bound_mode == "pl" || a.bound_mode == "both") {
            if (constants->mu > 0.0) modes.push_back(BoundMode::pl);
            else if (a.bound_mode == "pl") throw InvalidArgument("train: PL bound needs mu > 0");
        }
        if (a.bound_mode == "nonconvex" || a.bound_mode == "both") modes.push_back(BoundMode::nonconvex);
        if (modes.empty()) throw InvalidArgument("train: --bound must be pl, nonconvex or both");

        json reports = json::array();
        for (auto mode : modes) {
            const auto report = verify_convergence_bound(traces, *constants, opt, m, n, mode);
            const auto& last = report.final_checkpoint();
            out << "  " << to_string(mode) << " bound (" << (report.estimated_constants ? "estimated" : "exact")
                << " constants): " << (report.passed ? "PASS" : "FAIL") << "  lhs " << fmt_short(last.lhs)
                << " <= rhs " << fmt_short(last.rhs) << " at K = " << last.epoch
                << (report.in_scope ? "" : "  [alpha >= 1/L: outside the bound's step-size range]") << '\n';
            reports.push_back(to_json(report));
        }
        json bound{{"reports", reports}};
        if (a.benchmark == "pl-quadratic" && a.noise == 0.0) {
            // Noise-free targets interpolate: sigma^2 = 0 and only the contraction term remains.
            const double gap0 = mean_obj[0] - constants->optimum_loss;
            const double ratio = gap0 > 0 ? (mean_obj[a.K] - constants->optimum_loss) / gap0 : 0.0;
            const double contraction = std::pow(1.0 - constants->mu * opt.step_size, static_cast<double>(a.K));
            out << "  linear contraction: gap_K / gap_0 = " << fmt_short(ratio) << " <= (1 - mu alpha)^K = "
                << fmt_short(contraction) << (ratio <= contraction ? "  PASS" : "  FAIL") << '\n';
            bound["contraction"] = {{"gap_ratio", ratio}, {"factor", contraction}, {"passed", ratio <= contraction}};
        }
        result.files["bound_report.json"] = bound.dump(2) + "\n";
    }
    result.files["train.json"] = summary.dump(2) + "\n";
    return result;
}

// ---------------------------------------------------------------- genbound

struct GenboundArgs {
    std::uint64_t n = 0, m = 0, K = 0;
    double delta = 0.05;
    bool sweep = false;
    std::uint64_t max_n = 40;
    std::uint64_t max_K = 10;
    std::uint64_t max_exact_n = 200;
};

Outcome cmd_genbound(const GenboundArgs& a, std::ostream& out) {
    Outcome result;
    const ExactLimits limits{a.max_exact_n};
    if (a.sweep) {
        std::ostringstream csv;
        csv << "n,m,K,delta,E_inv_sqrt,mid,tail,chain_holds\n";
        std::uint64_t points = 0, holds = 0;
        for (std::uint64_t n = 1; n <= a.max_n; ++n) {
            for (std::uint64_t m = 1; m <= n; ++m) {
                for (std::uint64_t K = 1; K <= a.max_K; ++K) {
                    const auto r = inv_sqrt_coverage_chain({n, m, K}, a.delta, limits);
                    csv << n << ',' << m << ',' << K << ',' << fmt(a.delta) << ',' << fmt(*r.inv_sqrt_mean) << ','
                        << fmt(r.mid_term) << ',' << fmt(r.tail_term) << ',' << (r.chain_holds ? "true" : "false")
                        << '\n';
                    ++points;
                    holds += r.chain_holds;
                }
            }
        }
        out << "chain ordering holds at " << holds << " of " << points << " grid points\n";
        result.files["genbound_sweep.csv"] = csv.str();
        return result;
    }
    if (a.n == 0 || a.m == 0 || a.K == 0) throw InvalidArgument("genbound: --n, --m and --K are required");
    const auto r = inv_sqrt_coverage_chain({a.n, a.m, a.K}, a.delta, limits);
    out << "E[1/sqrt|S|]              = " << fmt_short(*r.inv_sqrt_mean, 10) << '\n'
        << "E[sqrt((n+1-|S|)/n)]      = " << fmt_short(*r.jensen_term, 10) << '\n'
        << "sqrt((n+1-E|S|)/n)        = " << fmt_short(r.mid_term, 10) << '\n'
        << "sqrt((1+n(1-m/n)^K)/n)    = " << fmt_short(r.final_bound, 10) << '\n'
        << "tail term (delta = " << a.delta << ") = " << fmt_short(r.tail_term, 10) << '\n'
        << "Rademacher term: " << r.rademacher_term << '\n'
        << "chain ordering: " << (r.chain_holds ? "holds" : "VIOLATED") << '\n';
    result.files["genbound.json"] = to_json(r).dump(2) + "\n";
    return result;
}

// ---------------------------------------------------------------- plumbing

std::vector<std::string> strip_out(const std::vector<std::string>& args) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out") {
            ++i;
            continue;
        }
        if (args[i].rfind("--out=", 0) == 0) continue;
        kept.push_back(args[i]);
    }
    return kept;
}

json collect_parameters(const CLI::App* sub) {
    json params = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_name() == "--help" || opt->get_name() == "--out") continue;
        const auto& results = opt->results();
        const std::string key = opt->get_single_name();
        if (results.empty()) {
            params[key] = opt->get_default_str();
        } else if (results.size() == 1) {
            params[key] = results.front();
        } else {
            params[key] = results;
        }
    }
    return params;
}

int replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    std::ifstream in(manifest_path);
    if (!in) {
        err << "replay: cannot open " << manifest_path << '\n';
        return kInvalidArguments;
    }
    json manifest;
    try {
        manifest = json::parse(in);
    } catch (const json::exception& e) {
        err << "replay: " << e.what() << '\n';
        return kInvalidArguments;
    }
    if (manifest.value("tool", "") != "srs" || !manifest.contains("argv")) {
        err << "replay: " << manifest_path << " is not an srs manifest\n";
        return kInvalidArguments;
    }
    if (manifest.value("version", "") != kToolVersion) {
        err << "replay: manifest written by version " << manifest.value("version", "?") << ", running "
            << kToolVersion << '\n';
    }
    std::filesystem::path target = out_dir.empty()
                                       ? std::filesystem::path(manifest_path).parent_path() / "replay"
                                       : std::filesystem::path(out_dir);
    auto args = manifest.at("argv").get<std::vector<std::string>>();
    args.push_back("--out");
    args.push_back(target.string());
    std::ostringstream sink;
    const int code = run(args, sink, err);
    if (code != kSuccess) return code;

    std::ifstream replayed(target / "manifest.json");
    const json fresh = json::parse(replayed);
    const auto& before = manifest.at("outputs");
    const auto& after = fresh.at("outputs");
    std::size_t same = 0;
    bool ok = before.size() == after.size();
    for (const auto& [name, digest] : before.items()) {
        if (after.contains(name) && after.at(name) == digest) {
            ++same;
        } else {
            ok = false;
            out << "replay: " << name << " differs\n";
        }
    }
    out << "replay: " << same << " of " << before.size() << " output files byte-identical\n";
    return ok ? kSuccess : kReplayMismatch;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Soft random sampling: coverage and occupancy analytics, SRS training, bound checks"};
    app.set_version_flag("--version", std::string("srs ") + kToolVersion);
    app.require_subcommand(1);

    Globals g;
    app.add_option("--seed", g.seed, "Master seed; each subcommand salts it with its name");
    app.add_option("--out", g.out_dir, "Directory for CSV/JSON outputs and manifest.json");
    app.add_option("--workers", g.workers, "Worker threads (default: SRS_WORKERS or hardware)");

    CoverageArgs cov;
    auto* coverage = app.add_subcommand("coverage", "Distribution and expectation of distinct samples covered");
    coverage->fallthrough();
    coverage->add_option("--n", cov.n, "Ground-set size");
    coverage->add_option("--m", cov.m, "Subset size per epoch");
    coverage->add_option("--K", cov.K, "Number of epochs");
    coverage->add_option("--mode", cov.mode, "exact | enumerate | simulate")->capture_default_str();
    coverage->add_option("--trials", cov.trials, "Monte Carlo trials")->capture_default_str();
    coverage->add_flag("--table", cov.table, "Expected-coverage grid over ratios x epochs");
    coverage->add_option("--ratios", cov.ratios, "Selection ratios in percent")->delimiter(',');
    coverage->add_option("--epochs", cov.epochs, "Epoch counts for --table")->delimiter(',');
    coverage->add_flag("--curve", cov.curve, "Mean prefix-coverage curve of SRS schedules");
    coverage->add_option("--R", cov.intervals, "Selection intervals for --curve")->delimiter(',');
    coverage->add_option("--runs", cov.runs, "Schedules averaged for --curve")->capture_default_str();
    coverage->add_option("--max-exact-n", cov.max_exact_n, "Exact-mode bound on n")->capture_default_str();

    OccupancyArgs occ;
    auto* occupancy = app.add_subcommand("occupancy", "Epochs needed to cover s distinct samples");
    occupancy->fallthrough();
    occupancy->add_option("--n", occ.n, "Ground-set size");
    occupancy->add_option("--m", occ.m, "Subset size per epoch");
    occupancy->add_option("--s", occ.s, "Target number of distinct samples");
    occupancy->add_flag("--classical", occ.classical, "n * H_n table (m = 1, s = n)");
    occupancy->add_flag("--simulate", occ.simulate, "Monte Carlo instead of the exact pmf");
    occupancy->add_option("--trials", occ.trials, "Monte Carlo trials")->capture_default_str();
    occupancy->add_option("--epsilon", occ.epsilon, "Tail mass allowed beyond the truncation")->capture_default_str();
    occupancy->add_option("--max-exact-n", occ.max_exact_n, "Exact-mode bound on n")->capture_default_str();

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "SGD under SRS subset schedules");
    train->fallthrough();
    train->add_option("--benchmark", tr.benchmark, "pl-quadratic | two-layer");
    train->add_option("--dataset", tr.dataset, "CSV with feature columns and a final label column");
    train->add_option("--model", tr.model, "least-squares | logistic (with --dataset)")->capture_default_str();
    train->add_option("--d", tr.d, "Benchmark dimension")->capture_default_str();
    train->add_option("--n", tr.n, "Benchmark sample count")->capture_default_str();
    train->add_option("--noise", tr.noise, "Target noise of the quadratic benchmark")->capture_default_str();
    train->add_option("--heterogeneity", tr.heterogeneity, "Per-sample Hessian spread")->capture_default_str();
    train->add_option("--hidden", tr.hidden, "Hidden units of the two-layer benchmark")->capture_default_str();
    train->add_option("--m", tr.m, "Subset size, or 'n' for the full set")->capture_default_str();
    train->add_option("--R", tr.R, "Selection interval in epochs")->capture_default_str();
    train->add_option("--K", tr.K, "Epochs")->capture_default_str();
    train->add_option("--alpha", tr.alpha, "Step size, or 'auto' for 0.5 / L")->capture_default_str();
    train->add_option("--step-decay", tr.step_decay, "Epoch k uses alpha / (1 + decay (k - 1))")
        ->capture_default_str();
    train->add_option("--seeds", tr.seeds, "Independent runs")->capture_default_str();
    train->add_option("--epoch-steps", tr.epoch_steps, "SGD steps per epoch (0: m)")->capture_default_str();
    train->add_option("--batch", tr.batch, "Mini-batch size")->capture_default_str();
    train->add_option("--sampling", tr.sampling, "iid | reshuffle")->capture_default_str();
    train->add_flag("--verify-bound", tr.verify_bound, "Check the convergence bounds on the seed average");
    train->add_option("--bound", tr.bound_mode, "pl | nonconvex | both")->capture_default_str();
    train->add_flag("--record-wall-time", tr.record_wall_time, "Fill wall_seconds (breaks byte-identical replay)");
    train->add_flag("--full-data-reference", tr.full_data_reference,
                    "With m = n, R = 1: compare against plain SGD on the same sample order");

    GenboundArgs gb;
    auto* genbound = app.add_subcommand("genbound", "Coverage terms of the generalization bound");
    genbound->fallthrough();
    genbound->add_option("--n", gb.n, "Ground-set size");
    genbound->add_option("--m", gb.m, "Subset size per epoch");
    genbound->add_option("--K", gb.K, "Number of epochs");
    genbound->add_option("--delta", gb.delta, "Confidence parameter in (0, 1)")->capture_default_str();
    genbound->add_flag("--sweep", gb.sweep, "All n <= max-n, m <= n, K <= max-K");
    genbound->add_option("--max-n", gb.max_n, "Sweep bound on n")->capture_default_str();
    genbound->add_option("--max-K", gb.max_K, "Sweep bound on K")->capture_default_str();
    genbound->add_option("--max-exact-n", gb.max_exact_n, "Exact-mode bound on n")->capture_default_str();

    std::string manifest_path;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
    replay_cmd->fallthrough();
    replay_cmd->add_option("manifest", manifest_path, "Path to manifest.json")->required();

    std::vector<std::string> argv_storage{"srs"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForVersion& e) {
        out << e.what() << '\n';
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidArguments;
    }

    if (replay_cmd->parsed()) return replay(manifest_path, g.out_dir, out, err);

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const std::uint64_t derived = derive_seed(g.seed, name_salt(name));

    try {
        Outcome outcome;
        if (coverage->parsed()) {
            outcome = cmd_coverage(cov, g, derived, out);
        } else if (occupancy->parsed()) {
            outcome = cmd_occupancy(occ, g, derived, out);
        } else if (train->parsed()) {
            outcome = cmd_train(tr, g, derived, out);
        } else {
            outcome = cmd_genbound(gb, out);
        }
        if (!g.out_dir.empty()) {
            json manifest{{"tool", "srs"},
                          {"version", kToolVersion},
                          {"schema_version", kSchemaVersion},
                          {"subcommand", name},
                          {"argv", strip_out(args)},
                          {"parameters", collect_parameters(sub)},
                          {"seed", g.seed},
                          {"derived_seed", derived}};
            write_outputs(g.out_dir, outcome.files, manifest);
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kInvalidArguments;
    } catch (const ExactModeRejected& e) {
        err << "error: " << e.what() << '\n';
        return kNumericModeRejected;
    } catch (const EnumerationTooLarge& e) {
        err << "error: " << e.what() << '\n';
        return kNumericModeRejected;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kTrainingDiverged;
    }
    return kSuccess;
}

}  // namespace srs::cli
