#include "ddqncd/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ddqncd/errors.hpp"

namespace ddqncd {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_real(const std::string& cell, std::size_t row, std::size_t col) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        throw DataError("row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1) +
                        ": cannot parse '" + cell + "' as a number");
    return v;
}

}  // namespace

void write_adjacency_csv(std::ostream& out, const Dag& g) {
    for (int i = 0; i < g.p(); ++i) {
        for (int j = 0; j < g.p(); ++j) out << (j ? "," : "") << (g.has_edge(i, j) ? 1 : 0);
        out << '\n';
    }
}

std::vector<std::vector<double>> read_real_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split_commas(line);
        std::vector<double> row;
        row.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) row.push_back(parse_real(cells[c], rows.size(), c));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("row " + std::to_string(rows.size() + 1) + " has " + std::to_string(row.size()) +
                            " columns, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    return rows;
}

Dag read_adjacency_csv(std::istream& in) {
    auto m = read_real_matrix_csv(in);
    std::vector<std::vector<int>> adj;
    for (std::size_t r = 0; r < m.size(); ++r) {
        if (m[r].size() != m.size())
            throw DataError("adjacency CSV is " + std::to_string(m.size()) + " rows by " +
                            std::to_string(m[r].size()) + " columns; expected a square matrix");
        std::vector<int> row;
        for (std::size_t c = 0; c < m[r].size(); ++c) {
            if (m[r][c] != 0.0 && m[r][c] != 1.0)
                throw DataError("row " + std::to_string(r + 1) + ", column " + std::to_string(c + 1) +
                                ": adjacency entries must be 0 or 1");
            row.push_back(static_cast<int>(m[r][c]));
        }
        adj.push_back(std::move(row));
    }
    return Dag::from_matrix(adj);
}

void write_edge_list(std::ostream& out, const Dag& g) {
    out << "p=" << g.p() << '\n';
    for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

Dag read_edge_list(std::istream& in) {
    std::string line;
    int p = -1;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("p=", 0) != 0) throw DataError("edge list must start with a 'p=<n>' line");
        auto digits = line.substr(2);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || p < 0)
            throw DataError("invalid node count line '" + line + "'");
        break;
    }
    if (p < 0) throw DataError("empty edge list");
    std::vector<std::pair<int, int>> edges;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::istringstream ss(line);
        int i = 0, j = 0;
        std::string rest;
        if (!(ss >> i >> j) || (ss >> rest))
            throw DataError("edge list line " + std::to_string(lineno) + ": expected 'i j'");
        edges.emplace_back(i, j);
    }
    return Dag::from_edges(p, edges);
}

Dag load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open graph file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::istringstream probe(text);
    std::string first;
    while (std::getline(probe, first) && trim(first).empty()) {
    }
    std::istringstream body(text);
    try {
        if (trim(first).rfind("p=", 0) == 0) return read_edge_list(body);
        return read_adjacency_csv(body);
    } catch (const MalformedGraph& e) {
        throw DataError(path + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

void save_adjacency_csv(const std::string& path, const Dag& g) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_adjacency_csv(out, g);
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace ddqncd
