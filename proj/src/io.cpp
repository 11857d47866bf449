#include "gammatc/io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>

namespace gammatc {

namespace {

std::ofstream open_out(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << std::setprecision(17);
    return out;
}

} // namespace

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out = open_out(path);
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::invalid_argument("write_csv: row width does not match the header");
        for (std::size_t c = 0; c < row.size(); ++c)
            out << row[c] << (c + 1 < row.size() ? "," : "\n");
    }
}

void write_field_csv(const std::string& path, const ScalarField& field) {
    std::ofstream out = open_out(path);
    out << "node,x,y,value\n";
    for (int i = 0; i < field.size(); ++i) {
        const auto xy = field.mesh->coord(i);
        out << i << ',' << xy[0] << ',' << xy[1] << ',' << field[i] << '\n';
    }
}

void write_path_csv(const std::string& path, const MeshPtr& mesh,
                    const std::vector<int>& nodes) {
    std::ofstream out = open_out(path);
    out << "step,node,x,y\n";
    for (std::size_t s = 0; s < nodes.size(); ++s) {
        const auto xy = mesh->coord(nodes[s]);
        out << s << ',' << nodes[s] << ',' << xy[0] << ',' << xy[1] << '\n';
    }
}

void write_generator_csv(const std::string& path, const Generator& gen) {
    {
        std::ofstream out = open_out(path);
        out << "i,j,value\n";
        for (int r = 0; r < gen.op.outerSize(); ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(gen.op, r); it;
                 ++it)
                out << it.row() << ',' << it.col() << ',' << it.value() << '\n';
    }
    std::ofstream mout = open_out(path + ".measure.csv");
    mout << "node,m\n";
    for (int i = 0; i < gen.size(); ++i) mout << i << ',' << gen.measure[i] << '\n';
}

void save_json(const std::string& path, const Json& value) {
    std::ofstream out = open_out(path);
    out << value.dump(2) << '\n';
}

} // namespace gammatc
