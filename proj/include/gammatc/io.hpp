#ifndef GAMMATC_IO_HPP
#define GAMMATC_IO_HPP

#include "gammatc/dirichlet.hpp"
#include "gammatc/mesh.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace gammatc {

using Json = nlohmann::ordered_json;

// Plot-ready artifacts.  All writers create parent directories as needed
// and throw std::runtime_error when the file cannot be written.

// Generic table: one header row, then one line per row, full precision.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// node, x, y, value
void write_field_csv(const std::string& path, const ScalarField& field);

// Ordered node coordinates of a path: step, node, x, y.
void write_path_csv(const std::string& path, const MeshPtr& mesh,
                    const std::vector<int>& nodes);

// Sparse generator as i, j, L_ij triplets followed by a measure column file
// alongside (path + ".measure.csv": node, m).
void write_generator_csv(const std::string& path, const Generator& gen);

void save_json(const std::string& path, const Json& value);

} // namespace gammatc

#endif
