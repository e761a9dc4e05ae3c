#include "pdag/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "json.hpp"

namespace pdag {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg)
{
    throw ParseError(source + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_lines(const std::string& text)
{
    std::vector<std::string> lines;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur)) {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(cur);
    }
    while (!lines.empty() && lines.back().find_first_not_of(" \t") == std::string::npos) lines.pop_back();
    return lines;
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto b = field.find_first_not_of(" \t");
        const auto e = field.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

int check_header(const std::vector<std::string>& lines, char prefix, const std::string& source)
{
    if (lines.empty()) fail(source, 1, "empty file (expected a header line)");
    const auto header = split_fields(lines[0]);
    for (std::size_t k = 0; k < header.size(); ++k) {
        const std::string expect = std::string(1, prefix) + std::to_string(k + 1);
        if (header[k] != expect) fail(source, 1, "header column " + std::to_string(k + 1) + " is '" + header[k] +
                                                     "', expected '" + expect + "'");
    }
    if (lines.size() < 2) fail(source, 2, "no data rows");
    return static_cast<int>(header.size());
}

template <typename T>
T parse_cell(const std::string& cell, const std::string& source, std::size_t line, std::size_t col)
{
    T value{};
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (cell.empty() || ec != std::errc() || ptr != last) {
        fail(source, line, "column " + std::to_string(col + 1) + ": cannot parse '" + cell + "' as " +
                               (std::is_integral_v<T> ? "an integer" : "a real number"));
    }
    return value;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> parse_table(const std::string& text, char prefix,
                                                                   const std::string& source)
{
    const auto lines = split_lines(text);
    const int cols = check_header(lines, prefix, source);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(static_cast<Eigen::Index>(lines.size() - 1), cols);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_fields(lines[r]);
        if (static_cast<int>(fields.size()) != cols) {
            fail(source, r + 1, "expected " + std::to_string(cols) + " fields, found " + std::to_string(fields.size()));
        }
        for (int c = 0; c < cols; ++c) {
            const Scalar v = parse_cell<Scalar>(fields[static_cast<std::size_t>(c)], source, r + 1,
                                                static_cast<std::size_t>(c));
            if constexpr (std::is_floating_point_v<Scalar>) {
                if (!std::isfinite(v)) fail(source, r + 1, "column " + std::to_string(c + 1) + " is not finite");
            }
            out(static_cast<Eigen::Index>(r - 1), c) = v;
        }
    }
    return out;
}

template <typename Derived>
std::string table_csv(const Eigen::MatrixBase<Derived>& m, char prefix)
{
    std::string out;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c > 0) out += ',';
        out += prefix + std::to_string(c + 1);
    }
    out += '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c > 0) out += ',';
            if constexpr (std::is_integral_v<typename Derived::Scalar>) {
                out += std::to_string(m(r, c));
            } else {
                out += format_real(m(r, c));
            }
        }
        out += '\n';
    }
    return out;
}

Json parse_json(const std::string& text, const std::string& source)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(source + ": invalid JSON: " + e.what());
    }
}

Json edges_json(const std::vector<Edge>& edges)
{
    Json arr = Json::array();
    for (const auto& [a, b] : edges) arr.push_back(Json::array({a, b}));
    return arr;
}

std::vector<Edge> edges_from(const Json& j, const std::string& source)
{
    if (!j.is_array()) throw ParseError(source + ": 'edges' must be an array of pairs");
    std::vector<Edge> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            throw ParseError(source + ": every edge must be a pair of integers");
        }
        out.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    return out;
}

std::vector<int> ints_from(const Json& j, const std::string& what, const std::string& source)
{
    if (!j.is_array()) throw ParseError(source + ": '" + what + "' must be an array of integers");
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) throw ParseError(source + ": '" + what + "' must hold integers");
        out.push_back(v.get<int>());
    }
    return out;
}

const Json& field(const Json& j, const char* key, const std::string& source)
{
    if (!j.is_object() || !j.contains(key)) throw ParseError(source + ": missing key '" + key + "'");
    return j.at(key);
}

} // namespace

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path dir = target.has_parent_path() ? target.parent_path() : fs::path(".");
    std::random_device rd;
    const fs::path tmp = dir / ("." + target.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw InputError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InputError("cannot move output into '" + path + "'");
    }
}

std::string format_real(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CountMatrix parse_counts_csv(const std::string& text, const std::string& source)
{
    return parse_table<int>(text, 'x', source);
}

Eigen::MatrixXd parse_real_csv(const std::string& text, char prefix, const std::string& source)
{
    return parse_table<double>(text, prefix, source);
}

std::string counts_csv(const CountMatrix& counts)
{
    return table_csv(counts, 'x');
}

std::string real_csv(const Eigen::MatrixXd& values, char prefix)
{
    return table_csv(values, prefix);
}

RelationshipNetwork parse_edge_list(const std::string& text, int n, const std::string& source)
{
    std::vector<Edge> edges;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a)) continue;
        if (!(ls >> b) || (ls >> extra)) fail(source, lineno, "expected exactly two node indices");
        const int i = parse_cell<int>(a, source, lineno, 0);
        const int j = parse_cell<int>(b, source, lineno, 1);
        if (i < 0 || j < 0 || i >= n || j >= n) {
            fail(source, lineno, "index out of range 0.." + std::to_string(n - 1));
        }
        if (i == j) fail(source, lineno, "self-loop " + std::to_string(i));
        edges.emplace_back(i, j);
    }
    return RelationshipNetwork(n, std::move(edges));
}

std::string edge_list(const RelationshipNetwork& network)
{
    std::string out;
    for (const auto& [i, j] : network.edges()) out += std::to_string(i) + ' ' + std::to_string(j) + '\n';
    return out;
}

std::string dag_json(const DagEstimate& estimate)
{
    const int d = estimate.ordering.size();
    Json j;
    j["ordering"] = estimate.ordering.nodes();
    j["edges"] = edges_json(estimate.edges);
    Json nb = Json::object();
    for (int k = 0; k < d; ++k) nb[std::to_string(k)] = estimate.neighborhoods[k];
    j["neighborhoods"] = nb;
    Json lam = Json::object();
    for (std::size_t k = 0; k < estimate.neighborhood_lambdas.size(); ++k) {
        lam[std::to_string(k)] = estimate.neighborhood_lambdas[k];
    }
    j["lambdas"] = lam;
    return j.dump(2) + "\n";
}

DagEstimate parse_dag_json(const std::string& text, const std::string& source)
{
    const Json j = parse_json(text, source);
    try {
        Ordering ordering(ints_from(field(j, "ordering", source), "ordering", source));
        const int d = ordering.size();
        std::vector<Edge> edges = edges_from(field(j, "edges", source), source);
        for (const auto& [a, b] : edges) {
            if (a < 0 || b < 0 || a >= d || b >= d) throw ParseError(source + ": edge index out of range");
        }
        const Json& nbj = field(j, "neighborhoods", source);
        std::vector<std::vector<int>> sets(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) {
            const std::string key = std::to_string(k);
            if (!nbj.is_object() || !nbj.contains(key)) throw ParseError(source + ": neighborhoods lack node " + key);
            sets[static_cast<std::size_t>(k)] = ints_from(nbj.at(key), "neighborhoods", source);
        }
        std::vector<double> lambdas;
        if (j.contains("lambdas")) {
            const Json& lj = j.at("lambdas");
            for (int k = 0; k < d && lj.is_object() && lj.contains(std::to_string(k)); ++k) {
                lambdas.push_back(lj.at(std::to_string(k)).get<double>());
            }
        }
        return DagEstimate{std::move(ordering), std::move(edges), NeighborhoodSets(std::move(sets)),
                           std::move(lambdas), {}};
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(source + ": " + e.what());
    }
}

std::string truth_json(const GroundTruth& truth, const std::vector<int>& labels)
{
    const int d = truth.dag.d();
    Json j;
    j["d"] = d;
    j["ordering"] = truth.ordering.nodes();
    j["edges"] = edges_json(truth.dag.edges());
    Json w = Json::array();
    for (const auto& table : truth.weights) {
        Json entries = Json::array();
        for (const auto& [l, k] : truth.dag.edges()) entries.push_back(table(l, k));
        w.push_back(entries);
    }
    j["weights"] = w;
    j["labels"] = labels;
    return j.dump(2) + "\n";
}

GroundTruth parse_truth_json(const std::string& text, const std::string& source, std::vector<int>* labels)
{
    const Json j = parse_json(text, source);
    try {
        const int d = field(j, "d", source).get<int>();
        std::vector<Edge> edges = edges_from(field(j, "edges", source), source);
        DagStructure dag(d, edges);
        Ordering ordering(ints_from(field(j, "ordering", source), "ordering", source));
        std::vector<Eigen::MatrixXd> weights;
        if (j.contains("weights")) {
            for (const auto& entries : j.at("weights")) {
                if (!entries.is_array() || entries.size() != dag.edges().size()) {
                    throw ParseError(source + ": each weight list needs one value per edge");
                }
                Eigen::MatrixXd table = Eigen::MatrixXd::Zero(d, d);
                for (std::size_t k = 0; k < dag.edges().size(); ++k) {
                    table(dag.edges()[k].first, dag.edges()[k].second) = entries[k].get<double>();
                }
                weights.push_back(std::move(table));
            }
        }
        if (labels != nullptr) {
            labels->clear();
            if (j.contains("labels")) *labels = ints_from(j.at("labels"), "labels", source);
        }
        return GroundTruth{std::move(dag), std::move(ordering), std::move(weights)};
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(source + ": " + e.what());
    }
}

} // namespace pdag
