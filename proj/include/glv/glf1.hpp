#pragma once

#include <string>
#include <variant>

#include "glv/fields.hpp"

namespace glv {

/// "GLF1" grid file: a short text header (magic, nx, ny, spacing, origin,
/// epsilon, field kind), a blank-line separator, the samples as raw
/// little-endian 64-bit floats in row-major order (2 per node for complex
/// and vector2 fields, 1 for scalar), then one mask byte per node.
/// Round trips are bit-exact.
using AnyGrid = std::variant<ComplexGrid, VectorGrid, ScalarGrid>;

void write_glf1(const std::string& path, const ComplexGrid& g);
void write_glf1(const std::string& path, const VectorGrid& g);
void write_glf1(const std::string& path, const ScalarGrid& g);

AnyGrid read_glf1(const std::string& path);

}  // namespace glv
