#pragma once

#include <string>
#include <vector>

#include "core/field.hpp"
#include "core/iterate.hpp"
#include "core/sparse.hpp"

namespace ellab {

/// Flat binary field layout: 8-byte magic+version, kind (0 scalar, 1
/// vector, 2 matrix), n, m as 32-bit little-endian integers, the domain
/// (center, half_side) as doubles, then the node values row-major as
/// little-endian 8-byte floats.
void write_field(const std::string& path, const ScalarField& f);
void write_field(const std::string& path, const VectorField& f);
void write_field(const std::string& path, const MatrixField& f);
ScalarField read_scalar_field(const std::string& path);
VectorField read_vector_field(const std::string& path);
MatrixField read_matrix_field(const std::string& path);

/// JSON form for small grids (node count capped; larger fields belong in
/// the binary layout).
std::string field_to_json(const ScalarField& f);
ScalarField scalar_field_from_json(const std::string& text);

/// A cube family (e.g. a Whitney decomposition) as a JSON array.
std::string cubes_to_json(const std::vector<Cube>& cubes);
std::vector<Cube> cubes_from_json(const std::string& text);

/// Sparse family with the chosen sets run-length encoded (alternating run
/// lengths starting with zeros) over the reference grid's nodes.
std::string sparse_family_to_json(const SparseFamily& s);
SparseFamily sparse_family_from_json(const std::string& text);

std::string trace_to_json(const IterationTrace& t);

/// Shortest text that round-trips the double exactly (%.17g).
std::string format_g17(double v);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Plain two-column plot data: one "x y" line per sample, %.17g.
void write_dat(const std::string& path, const std::vector<double>& x,
               const std::vector<double>& y);

}  // namespace ellab
