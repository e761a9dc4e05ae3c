#include "pdag/benchmark.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "pdag/parallel.hpp"

namespace pdag {

std::string to_string(Method m)
{
    return m == Method::personalized ? "personalized" : "homogeneous";
}

Method parse_method(const std::string& s)
{
    if (s == "personalized") return Method::personalized;
    if (s == "homogeneous") return Method::homogeneous;
    throw InputError("unknown method '" + s + "' (expected personalized or homogeneous)");
}

namespace {

double metric(const MetricsRow& m, int k)
{
    switch (k) {
    case 0: return m.ordering_accuracy;
    case 1: return m.moral_precision;
    case 2: return m.moral_recall;
    default: return m.dag_accuracy;
    }
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

BenchmarkResult run_benchmark(const std::vector<SimConfig>& grid, const std::vector<Method>& methods,
                              int repetitions, std::uint64_t seed, const PipelineConfig& learner, int threads)
{
    if (repetitions < 1) throw InputError("need at least one repetition");
    if (methods.empty()) throw InputError("need at least one method");
    for (const auto& c : grid) c.validate();

    const int nm = static_cast<int>(methods.size());
    const int cells = static_cast<int>(grid.size()) * repetitions;
    std::vector<BenchmarkRow> rows(static_cast<std::size_t>(cells * nm));

    parallel_for(cells, threads, [&](int cell) {
        const int g = cell / repetitions;
        const int r = cell % repetitions;
        SimConfig cfg = grid[static_cast<std::size_t>(g)];
        cfg.seed = seed + static_cast<std::uint64_t>(r);
        for (int k = 0; k < nm; ++k) {
            BenchmarkRow& row = rows[static_cast<std::size_t>(cell * nm + k)];
            row.method = methods[static_cast<std::size_t>(k)];
            row.setup = cfg.setup;
            row.dx = cfg.dx;
            row.n = cfg.n;
            row.seed = cfg.seed;
        }
        std::optional<Simulation> sim;
        try {
            sim.emplace(simulate(cfg));
        } catch (const std::exception& e) {
            for (int k = 0; k < nm; ++k) {
                rows[static_cast<std::size_t>(cell * nm + k)].failed = true;
                rows[static_cast<std::size_t>(cell * nm + k)].error = std::string("simulation: ") + e.what();
            }
            return;
        }
        for (int k = 0; k < nm; ++k) {
            BenchmarkRow& row = rows[static_cast<std::size_t>(cell * nm + k)];
            PipelineConfig pc = learner;
            pc.seed = cfg.seed;
            pc.threads = 1;
            pc.embedding_dim = cfg.dz0;
            pc.homogeneous = row.method == Method::homogeneous;
            try {
                const PipelineResult res = run_pipeline(sim->dataset, sim->network, pc);
                row.metrics = eval_metrics(res.estimate, sim->truth);
            } catch (const std::exception& e) {
                row.failed = true;
                row.error = e.what();
            }
        }
    });

    BenchmarkResult out;
    out.rows = std::move(rows);
    out.aggregates = aggregate_rows(out.rows);
    return out;
}

std::vector<BenchmarkAggregate> aggregate_rows(const std::vector<BenchmarkRow>& rows)
{
    std::vector<BenchmarkAggregate> aggs;
    auto find = [&](const BenchmarkRow& r) -> BenchmarkAggregate& {
        for (auto& a : aggs) {
            if (a.method == r.method && a.setup == r.setup && a.dx == r.dx && a.n == r.n) return a;
        }
        BenchmarkAggregate a;
        a.method = r.method;
        a.setup = r.setup;
        a.dx = r.dx;
        a.n = r.n;
        aggs.push_back(a);
        return aggs.back();
    };
    for (const auto& r : rows) {
        BenchmarkAggregate& a = find(r);
        if (r.failed) {
            ++a.failures;
            continue;
        }
        ++a.runs;
        for (int k = 0; k < 4; ++k) a.mean[k] += metric(r.metrics, k);
    }
    for (auto& a : aggs) {
        if (a.runs == 0) {
            for (int k = 0; k < 4; ++k) a.mean[k] = a.stddev[k] = std::nan("");
            continue;
        }
        for (int k = 0; k < 4; ++k) a.mean[k] /= a.runs;
    }
    for (const auto& r : rows) {
        if (r.failed) continue;
        BenchmarkAggregate& a = find(r);
        for (int k = 0; k < 4; ++k) {
            const double dev = metric(r.metrics, k) - a.mean[k];
            a.stddev[k] += dev * dev;
        }
    }
    for (auto& a : aggs) {
        if (a.runs == 0) continue;
        for (int k = 0; k < 4; ++k) a.stddev[k] = a.runs > 1 ? std::sqrt(a.stddev[k] / (a.runs - 1)) : 0.0;
    }
    return aggs;
}

std::string rows_csv(const std::vector<BenchmarkRow>& rows)
{
    std::ostringstream os;
    os << "method,setup,d_x,n,seed,ordering_acc,moral_prec,moral_rec,dag_acc,status\n";
    for (const auto& r : rows) {
        os << to_string(r.method) << ',' << to_string(r.setup) << ',' << r.dx << ',' << r.n << ',' << r.seed;
        if (r.failed) {
            os << ",,,,,failed\n";
            continue;
        }
        for (int k = 0; k < 4; ++k) os << ',' << fmt(metric(r.metrics, k));
        os << (r.metrics.precision_undefined ? ",precision_undefined\n" : ",ok\n");
    }
    return os.str();
}

std::string aggregates_csv(const std::vector<BenchmarkAggregate>& aggregates)
{
    std::ostringstream os;
    os << "method,setup,d_x,n,runs,failures";
    for (const char* name : {"ordering_acc", "moral_prec", "moral_rec", "dag_acc"}) {
        os << ',' << name << "_mean," << name << "_std";
    }
    os << '\n';
    for (const auto& a : aggregates) {
        os << to_string(a.method) << ',' << to_string(a.setup) << ',' << a.dx << ',' << a.n << ',' << a.runs << ','
           << a.failures;
        for (int k = 0; k < 4; ++k) os << ',' << fmt(a.mean[k]) << ',' << fmt(a.stddev[k]);
        os << '\n';
    }
    return os.str();
}

} // namespace pdag
