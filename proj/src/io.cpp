#include "mska/io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mska {

Matrix read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::vector<Scalar>> rows;
  std::string line;
  Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream iss(line);
    std::vector<Scalar> row;
    std::string tok;
    while (iss >> tok) {
      if (tok[0] == '#') break;
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(lineno) + ": cannot parse '" + tok + "'");
      }
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError(path + ":" + std::to_string(lineno) + ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j) out(i, j) = rows[i][j];
  return out;
}

void write_matrix_csv(const std::string& path, const std::vector<std::string>& header,
                      const Matrix& values) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  if (!header.empty()) out << "\n";
  char buf[48];
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", values(i, j));
      out << buf << (j + 1 < values.cols() ? "," : "");
    }
    out << "\n";
  }
}

namespace {

struct PlyProperty {
  std::string name;
  std::string type;
};

std::size_t type_size(const std::string& t) {
  if (t == "float" || t == "float32" || t == "int" || t == "int32" || t == "uint" ||
      t == "uint32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  throw DataError("ply: unsupported property type '" + t + "'");
}

Scalar read_binary_scalar(std::istream& in, const std::string& t) {
  char buf[8];
  const std::size_t n = type_size(t);
  in.read(buf, static_cast<std::streamsize>(n));
  if (t == "float" || t == "float32") {
    float v;
    std::memcpy(&v, buf, 4);
    return v;
  }
  if (t == "double" || t == "float64") {
    double v;
    std::memcpy(&v, buf, 8);
    return v;
  }
  if (t == "uchar" || t == "uint8") return static_cast<unsigned char>(buf[0]);
  if (t == "char" || t == "int8") return static_cast<signed char>(buf[0]);
  if (t == "short" || t == "int16") {
    int16_t v;
    std::memcpy(&v, buf, 2);
    return v;
  }
  if (t == "ushort" || t == "uint16") {
    uint16_t v;
    std::memcpy(&v, buf, 2);
    return v;
  }
  if (t == "int" || t == "int32") {
    int32_t v;
    std::memcpy(&v, buf, 4);
    return v;
  }
  uint32_t v;
  std::memcpy(&v, buf, 4);
  return v;
}

}  // namespace

PlyMesh read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
    throw DataError(path + ": not a ply file");

  bool binary = false;
  Index n_vertex = 0, n_face = 0;
  std::vector<PlyProperty> vertex_props;
  std::string list_count_type = "uchar", list_index_type = "int";
  std::string current_element;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream iss(line);
    std::string word;
    iss >> word;
    if (word == "comment" || word == "obj_info") continue;
    if (word == "format") {
      std::string fmt;
      iss >> fmt;
      if (fmt == "binary_little_endian")
        binary = true;
      else if (fmt != "ascii")
        throw DataError(path + ": unsupported ply format " + fmt);
    } else if (word == "element") {
      std::string name;
      Index count;
      iss >> name >> count;
      current_element = name;
      if (name == "vertex") n_vertex = count;
      if (name == "face") n_face = count;
    } else if (word == "property") {
      std::string type;
      iss >> type;
      if (type == "list") {
        iss >> list_count_type >> list_index_type;
      } else if (current_element == "vertex") {
        std::string name;
        iss >> name;
        vertex_props.push_back({name, type});
      }
    } else if (word == "end_header") {
      break;
    }
  }
  if (n_vertex < 1) throw DataError(path + ": no vertices");

  PlyMesh mesh;
  mesh.vertices.resize(n_vertex, 3);
  mesh.normals = Matrix::Zero(n_vertex, 3);
  int xi = -1, yi = -1, zi = -1, nxi = -1, nyi = -1, nzi = -1;
  for (std::size_t i = 0; i < vertex_props.size(); ++i) {
    const std::string& n = vertex_props[i].name;
    if (n == "x") xi = static_cast<int>(i);
    if (n == "y") yi = static_cast<int>(i);
    if (n == "z") zi = static_cast<int>(i);
    if (n == "nx") nxi = static_cast<int>(i);
    if (n == "ny") nyi = static_cast<int>(i);
    if (n == "nz") nzi = static_cast<int>(i);
  }
  if (xi < 0 || yi < 0 || zi < 0) throw DataError(path + ": vertex positions missing");
  mesh.has_normals = nxi >= 0 && nyi >= 0 && nzi >= 0;

  std::vector<Scalar> row(vertex_props.size());
  for (Index v = 0; v < n_vertex; ++v) {
    if (binary) {
      for (std::size_t i = 0; i < vertex_props.size(); ++i)
        row[i] = read_binary_scalar(in, vertex_props[i].type);
    } else {
      for (std::size_t i = 0; i < vertex_props.size(); ++i)
        if (!(in >> row[i])) throw DataError(path + ": truncated vertex data");
    }
    mesh.vertices(v, 0) = row[xi];
    mesh.vertices(v, 1) = row[yi];
    mesh.vertices(v, 2) = row[zi];
    if (mesh.has_normals) {
      mesh.normals(v, 0) = row[nxi];
      mesh.normals(v, 1) = row[nyi];
      mesh.normals(v, 2) = row[nzi];
    }
  }

  for (Index f = 0; f < n_face; ++f) {
    Index count;
    std::vector<Index> idx;
    if (binary) {
      count = static_cast<Index>(read_binary_scalar(in, list_count_type));
      for (Index i = 0; i < count; ++i)
        idx.push_back(static_cast<Index>(read_binary_scalar(in, list_index_type)));
    } else {
      if (!(in >> count)) throw DataError(path + ": truncated face data");
      idx.resize(count);
      for (Index i = 0; i < count; ++i)
        if (!(in >> idx[i])) throw DataError(path + ": truncated face data");
    }
    // fan-triangulate polygons
    for (Index i = 1; i + 1 < count; ++i)
      mesh.faces.push_back({idx[0], idx[i], idx[i + 1]});
  }
  if (!in) throw DataError(path + ": truncated ply payload");
  return mesh;
}

Matrix face_average_normals(const Matrix& vertices,
                            const std::vector<std::array<Index, 3>>& faces) {
  Matrix normals = Matrix::Zero(vertices.rows(), 3);
  for (const auto& f : faces) {
    const Vector a = vertices.row(f[0]);
    const Vector b = vertices.row(f[1]);
    const Vector c = vertices.row(f[2]);
    const Eigen::Vector3d e1 = b - a, e2 = c - a;
    const Eigen::Vector3d fn = e1.cross(e2);  // length = 2x face area
    for (int k = 0; k < 3; ++k) normals.row(f[k]) += fn.transpose();
  }
  for (Index v = 0; v < normals.rows(); ++v) {
    const Scalar len = normals.row(v).norm();
    if (len > 0) normals.row(v) /= len;
  }
  return normals;
}

}  // namespace mska
