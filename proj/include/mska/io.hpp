#pragma once

#include <string>
#include <vector>

#include "mska/types.hpp"

namespace mska {

/// Reads a whitespace- or comma-separated numeric table; every row must have
/// the same number of columns. Parse errors report the line number.
Matrix read_table(const std::string& path);

void write_matrix_csv(const std::string& path, const std::vector<std::string>& header,
                      const Matrix& values);

struct PlyMesh {
  Matrix vertices;                        // N x 3
  Matrix normals;                         // N x 3, zero rows when absent
  std::vector<std::array<Index, 3>> faces;
  bool has_normals = false;
};

/// Minimal polygon-format reader: ascii and binary_little_endian, float or
/// double vertex properties x,y,z (optionally nx,ny,nz), triangulated faces.
PlyMesh read_ply(const std::string& path);

/// Area-weighted average of incident face normals, normalized per vertex.
Matrix face_average_normals(const Matrix& vertices,
                            const std::vector<std::array<Index, 3>>& faces);

}  // namespace mska
