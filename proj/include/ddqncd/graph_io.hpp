#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ddqncd/dag.hpp"

namespace ddqncd {

// Adjacency CSV: p rows of p comma-separated 0/1 integers, no header.
void write_adjacency_csv(std::ostream& out, const Dag& g);
Dag read_adjacency_csv(std::istream& in);

// Edge list: first line "p=<n>", then one "i j" pair per line.
void write_edge_list(std::ostream& out, const Dag& g);
Dag read_edge_list(std::istream& in);

// Reads either format, chosen by the first non-blank line.
Dag load_graph(const std::string& path);
void save_adjacency_csv(const std::string& path, const Dag& g);

// Headerless CSV of reals (weighted adjacency). Throws DataError on ragged
// rows or non-numeric cells.
std::vector<std::vector<double>> read_real_matrix_csv(std::istream& in);

}  // namespace ddqncd
