#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "pdag/core.hpp"
#include "pdag/simulation.hpp"

namespace pdag {

/// Malformed file content. The message names the source and, where it applies, the 1-based line.
class ParseError : public InputError {
public:
    using InputError::InputError;
};

std::string read_file(const std::string& path);

/// Writes `content` to a temporary file in the destination directory and renames it into place, so
/// readers see either the old file or the complete new one.
void write_atomic(const std::string& path, const std::string& content);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_real(double v);

// CSV files carry a header `<prefix>1,...,<prefix>k` and one observation per line.
CountMatrix parse_counts_csv(const std::string& text, const std::string& source);
Eigen::MatrixXd parse_real_csv(const std::string& text, char prefix, const std::string& source);
std::string counts_csv(const CountMatrix& counts);
std::string real_csv(const Eigen::MatrixXd& values, char prefix);

/// Edge list: one "i j" pair per line (0-based, whitespace separated); '#' starts a comment.
RelationshipNetwork parse_edge_list(const std::string& text, int n, const std::string& source);
std::string edge_list(const RelationshipNetwork& network);

/// {"ordering": [...], "edges": [[from, to], ...], "neighborhoods": {"j": [...]}, "lambdas": {"j": x}}
std::string dag_json(const DagEstimate& estimate);
DagEstimate parse_dag_json(const std::string& text, const std::string& source);

/// Simulation ground truth: DAG edges, ordering, per-community weights and community labels.
std::string truth_json(const GroundTruth& truth, const std::vector<int>& labels);
GroundTruth parse_truth_json(const std::string& text, const std::string& source, std::vector<int>* labels = nullptr);

} // namespace pdag
