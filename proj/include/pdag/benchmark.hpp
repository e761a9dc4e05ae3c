#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdag/pipeline.hpp"
#include "pdag/simulation.hpp"

namespace pdag {

enum class Method { personalized, homogeneous };

std::string to_string(Method m);
Method parse_method(const std::string& s);

struct BenchmarkRow {
    Method method = Method::personalized;
    Setup setup = Setup::linear;
    int dx = 0;
    int n = 0;
    std::uint64_t seed = 0;
    MetricsRow metrics;
    bool failed = false;
    std::string error;
};

struct BenchmarkAggregate {
    Method method = Method::personalized;
    Setup setup = Setup::linear;
    int dx = 0;
    int n = 0;
    int runs = 0;
    int failures = 0;
    double mean[4] = {0, 0, 0, 0}; // ordering, moral precision, moral recall, dag accuracy
    double stddev[4] = {0, 0, 0, 0};
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;
    std::vector<BenchmarkAggregate> aggregates;
};

/// Runs every (config, method, repetition) cell. Repetition r of a config uses seed + r for both the
/// simulated data and the learner, so both methods see the same data. Cells run in parallel with one
/// learner thread each; failures are recorded and excluded from the aggregates.
BenchmarkResult run_benchmark(const std::vector<SimConfig>& grid, const std::vector<Method>& methods,
                              int repetitions, std::uint64_t seed, const PipelineConfig& learner, int threads);

/// Mean and sample standard deviation per (method, setup, d_X, n), in first-appearance order.
std::vector<BenchmarkAggregate> aggregate_rows(const std::vector<BenchmarkRow>& rows);

std::string rows_csv(const std::vector<BenchmarkRow>& rows);
std::string aggregates_csv(const std::vector<BenchmarkAggregate>& aggregates);

} // namespace pdag
