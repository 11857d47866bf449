#ifndef GAMMATC_MODELS_HPP
#define GAMMATC_MODELS_HPP

#include "gammatc/dimension.hpp"
#include "gammatc/mesh.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gammatc {

// Model-space catalog.  Each model fixes a mesh, metric components, a
// density exponent V0 and the dimension bound N it is certified for;
// `eligible` masks nodes where sampled components are not smooth (the
// sphere band's chart turning rows) and is empty when every node is clean.
struct ModelSpace {
    std::string name;
    MeshPtr mesh;
    MetricField metric;
    ScalarField V0;
    DimensionBound N = DimensionBound::finite(2.0);
    std::vector<std::uint8_t> eligible;
};

// ids: flat_s1 (circle, g = 1, V0 = 0, N = 2),
//      flat_t2 (square torus, g = I, V0 = 0.2 cos x, N = 3),
//      sphere_band (equatorial band of the unit sphere on a periodic
//                   triangle-wave polar chart, V0 = 0, N = 2),
//      conformal_t2 (g = e^{2 psi} I, psi = 0.05 (cos x + cos y), V0 = 0,
//                    N = 2).
// `resolution` = nodes along the principal axis; all axes share the same
// spacing 2 pi / resolution.
ModelSpace make_model(const std::string& id, int resolution = 256);
std::vector<std::string> model_ids();

// Weight catalog on a model mesh: "zero", "const" (w = amplitude), or
// "harmonic" (w = amplitude * cos of the first harmonic along axis 0).
ScalarField make_weight(const MeshPtr& mesh, const std::string& id, double amplitude);
std::vector<std::string> weight_ids();

} // namespace gammatc

#endif
