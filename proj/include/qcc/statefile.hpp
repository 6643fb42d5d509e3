#pragma once

#include "qcc/stategen.hpp"

#include <string>

namespace qcc {

// On-disk state format: JSON object with "dims_a", "dims_b" (arrays of
// ints) and "re", "im" (row-major full matrices, A-major index). Numbers
// round-trip exactly (shortest-representation doubles, sorted keys), so
// serialize(parse(s)) is byte-identical for files produced here.
struct ParseError : Error {
    using Error::Error;
};

DensityMatrix parse_state(const std::string& text);
std::string serialize_state(const DensityMatrix& rho);

DensityMatrix load_state(const std::string& path);
void save_state(const std::string& path, const DensityMatrix& rho);

// Decomposition sidecar: {"terms": [{"weight", "alpha_re", "alpha_im",
// "beta_re", "beta_im"}, ...]}.
SeparableDecomposition parse_decomposition(const std::string& text);
std::string serialize_decomposition(const SeparableDecomposition& dec);
SeparableDecomposition load_decomposition(const std::string& path);
void save_decomposition(const std::string& path, const SeparableDecomposition& dec);

} // namespace qcc
