// SPDX-License-Identifier: Apache-2.0
#include "wgstokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <tuple>

#include "wgstokes/errors.hpp"
#include "wgstokes/quadrature.hpp"

namespace wgstokes {

namespace {

void check_level(int level) {
  if (level < 1 || level > 10)
    throw ConfigError("mesh level must be in [1,10], got " + std::to_string(level));
}

/// Signed measure: positive iff the vertex list is positively oriented.
double signed_cell_measure(const SimplicialMesh& mesh, int c) {
  const auto& cell = mesh.cells[c];
  const Eigen::Vector3d& p0 = mesh.vertices[cell[0]];
  if (mesh.dim == 2) {
    Eigen::Vector3d e1 = mesh.vertices[cell[1]] - p0;
    Eigen::Vector3d e2 = mesh.vertices[cell[2]] - p0;
    return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
  }
  Eigen::Matrix3d e;
  e.col(0) = mesh.vertices[cell[1]] - p0;
  e.col(1) = mesh.vertices[cell[2]] - p0;
  e.col(2) = mesh.vertices[cell[3]] - p0;
  return e.determinant() / 6.0;
}

} // namespace

Eigen::Matrix3Xd SimplicialMesh::cell_vertex_matrix(int c) const {
  Eigen::Matrix3Xd m(3, dim + 1);
  for (int j = 0; j <= dim; ++j) m.col(j) = vertices[cells[c][j]];
  return m;
}

Eigen::Matrix3Xd SimplicialMesh::face_vertex_matrix(int f) const {
  Eigen::Matrix3Xd m(3, dim);
  for (int j = 0; j < dim; ++j) m.col(j) = vertices[faces[f].verts[j]];
  return m;
}

void build_face_connectivity(SimplicialMesh& mesh) {
  const int d = mesh.dim;
  const int nc = mesh.num_cells();

  // Cell geometry first; it also screens out inverted cells.
  mesh.cell_measures.resize(nc);
  mesh.cell_centroids.resize(nc);
  mesh.cell_diameters.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const double vol = signed_cell_measure(mesh, c);
    if (!(vol > 0.0))
      throw StructureError("cell " + std::to_string(c) + " is degenerate or negatively oriented");
    mesh.cell_measures[c] = vol;
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    double diam = 0.0;
    for (int a = 0; a <= d; ++a) {
      centroid += mesh.vertices[mesh.cells[c][a]];
      for (int b = a + 1; b <= d; ++b)
        diam = std::max(diam, (mesh.vertices[mesh.cells[c][a]] - mesh.vertices[mesh.cells[c][b]]).norm());
    }
    mesh.cell_centroids[c] = centroid / (d + 1);
    mesh.cell_diameters[c] = diam;
  }

  // Enumerate facets: the facet opposite local vertex l keeps the other d ids,
  // sorted so shared facets compare equal. Sorting the whole list makes face
  // numbering deterministic and pairs duplicates up as neighbors.
  struct Facet {
    std::array<int, 3> key;
    int cell;
    int local;
  };
  std::vector<Facet> facets;
  facets.reserve(static_cast<size_t>(nc) * (d + 1));
  for (int c = 0; c < nc; ++c) {
    for (int l = 0; l <= d; ++l) {
      Facet fc{{-1, -1, -1}, c, l};
      int idx = 0;
      for (int a = 0; a <= d; ++a)
        if (a != l) fc.key[idx++] = mesh.cells[c][a];
      std::sort(fc.key.begin(), fc.key.begin() + d);
      facets.push_back(fc);
    }
  }
  std::sort(facets.begin(), facets.end(), [](const Facet& a, const Facet& b) {
    return std::tie(a.key, a.cell) < std::tie(b.key, b.cell);
  });

  mesh.faces.clear();
  mesh.cell_faces.assign(nc, {{-1, -1, -1, -1}});
  for (size_t i = 0; i < facets.size();) {
    size_t j = i + 1;
    while (j < facets.size() && facets[j].key == facets[i].key) ++j;
    if (j - i > 2) {
      throw StructureError("facet {" + std::to_string(facets[i].key[0]) + "," +
                           std::to_string(facets[i].key[1]) + "," + std::to_string(facets[i].key[2]) +
                           "} is shared by " + std::to_string(j - i) + " cells");
    }
    Face face;
    face.verts = facets[i].key;
    face.owner = facets[i].cell; // the sort put the smaller cell id first
    face.neighbor = (j - i == 2) ? facets[i + 1].cell : -1;

    Eigen::Vector3d fc_centroid = Eigen::Vector3d::Zero();
    for (int a = 0; a < d; ++a) fc_centroid += mesh.vertices[face.verts[a]];
    fc_centroid /= d;

    Eigen::Vector3d normal;
    if (d == 2) {
      Eigen::Vector3d t = mesh.vertices[face.verts[1]] - mesh.vertices[face.verts[0]];
      normal = Eigen::Vector3d(t.y(), -t.x(), 0.0);
      face.measure = t.norm();
      face.diameter = face.measure;
    } else {
      Eigen::Vector3d e1 = mesh.vertices[face.verts[1]] - mesh.vertices[face.verts[0]];
      Eigen::Vector3d e2 = mesh.vertices[face.verts[2]] - mesh.vertices[face.verts[0]];
      normal = e1.cross(e2);
      face.measure = 0.5 * normal.norm();
      face.diameter = std::max({e1.norm(), e2.norm(), (e1 - e2).norm()});
    }
    const double nlen = normal.norm();
    if (!(nlen > 0.0) || !(face.measure > 0.0))
      throw StructureError("face over cells " + std::to_string(face.owner) + "/" +
                           std::to_string(face.neighbor) + " is degenerate");
    normal /= nlen;
    // Point it out of the owner cell (equivalently, towards the neighbor).
    if (normal.dot(fc_centroid - mesh.cell_centroids[face.owner]) < 0.0) normal = -normal;
    face.normal = normal;

    const int fid = static_cast<int>(mesh.faces.size());
    for (size_t t = i; t < j; ++t) mesh.cell_faces[facets[t].cell][facets[t].local] = fid;
    mesh.faces.push_back(face);
    i = j;
  }
}

SimplicialMesh unit_square_mesh(int level) {
  check_level(level);
  const int n = 1 << (level - 1);
  SimplicialMesh mesh;
  mesh.dim = 2;
  mesh.level = level;

  mesh.vertices.reserve(static_cast<size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(double(i) / n, double(j) / n, 0.0);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };

  mesh.cells.reserve(static_cast<size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // Square split along its top-left -> bottom-right diagonal.
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), dd = vid(i, j + 1);
      mesh.cells.push_back({{a, b, dd, -1}});
      mesh.cells.push_back({{b, c, dd, -1}});
    }
  }
  build_face_connectivity(mesh);
  return mesh;
}

SimplicialMesh unit_cube_mesh(int level) {
  check_level(level);
  const int n = 1 << (level - 1);
  SimplicialMesh mesh;
  mesh.dim = 3;
  mesh.level = level;

  mesh.vertices.reserve(static_cast<size_t>(n + 1) * (n + 1) * (n + 1));
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        mesh.vertices.emplace_back(double(i) / n, double(j) / n, double(k) / n);
  auto vid = [n](int i, int j, int k) { return (k * (n + 1) + j) * (n + 1) + i; };

  // The six axis permutations, each walking from a subcube's low corner to its
  // high corner one axis at a time; all resulting tets share the main diagonal.
  static const std::array<std::array<int, 3>, 6> perms = {{
      {{0, 1, 2}}, {{0, 2, 1}}, {{1, 0, 2}}, {{1, 2, 0}}, {{2, 0, 1}}, {{2, 1, 0}},
  }};
  auto perm_sign = [](const std::array<int, 3>& p) {
    int inv = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        if (p[a] > p[b]) ++inv;
    return (inv % 2 == 0) ? 1 : -1;
  };

  mesh.cells.reserve(static_cast<size_t>(6) * n * n * n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        for (const auto& p : perms) {
          std::array<int, 3> corner = {{i, j, k}};
          std::array<int, 4> tet{};
          tet[0] = vid(corner[0], corner[1], corner[2]);
          for (int step = 0; step < 3; ++step) {
            corner[p[step]] += 1;
            tet[step + 1] = vid(corner[0], corner[1], corner[2]);
          }
          if (perm_sign(p) < 0) std::swap(tet[2], tet[3]);
          mesh.cells.push_back(tet);
        }
      }
    }
  }
  build_face_connectivity(mesh);
  return mesh;
}

void validate_mesh(const SimplicialMesh& mesh) {
  const int d = mesh.dim;
  if (d != 2 && d != 3) throw StructureError("mesh dim must be 2 or 3");
  const int nv = mesh.num_vertices();

  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int a = 0; a <= d; ++a) {
      const int v = mesh.cells[c][a];
      if (v < 0 || v >= nv)
        throw StructureError("cell " + std::to_string(c) + " references vertex " + std::to_string(v));
    }
    if (!(signed_cell_measure(mesh, c) > 0.0))
      throw StructureError("cell " + std::to_string(c) + " is not positively oriented");
  }

  if (mesh.cell_faces.size() != mesh.cells.size())
    throw StructureError("cell_faces not built");

  std::vector<int> refs(mesh.num_faces(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    for (int l = 0; l <= d; ++l) {
      const int f = mesh.cell_faces[c][l];
      if (f < 0 || f >= mesh.num_faces())
        throw StructureError("cell " + std::to_string(c) + " has unset face slot " + std::to_string(l));
      if (mesh.faces[f].owner != c && mesh.faces[f].neighbor != c)
        throw StructureError("face " + std::to_string(f) + " does not list cell " + std::to_string(c));
      ++refs[f];
    }
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces[f];
    const int expected = face.is_boundary() ? 1 : 2;
    if (refs[f] != expected)
      throw StructureError("face " + std::to_string(f) + " referenced by " + std::to_string(refs[f]) +
                           " cells, expected " + std::to_string(expected));
    if (std::abs(face.normal.norm() - 1.0) > 1e-12)
      throw StructureError("face " + std::to_string(f) + " normal is not unit length");
    Eigen::Vector3d fc = Eigen::Vector3d::Zero();
    for (int a = 0; a < d; ++a) fc += mesh.vertices[face.verts[a]];
    fc /= d;
    if (face.normal.dot(fc - mesh.cell_centroids[face.owner]) <= 0.0)
      throw StructureError("face " + std::to_string(f) + " normal does not leave its owner cell");
    if (!face.is_boundary() &&
        face.normal.dot(mesh.cell_centroids[face.neighbor] - fc) <= 0.0)
      throw StructureError("face " + std::to_string(f) + " normal does not point at its neighbor");
  }
}

void write_mesh_text(const SimplicialMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "dim " << mesh.dim << "\n";
  out << "vertices " << mesh.num_vertices() << "\n";
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  out << "cells " << mesh.num_cells() << "\n";
  for (const auto& c : mesh.cells) {
    for (int a = 0; a <= mesh.dim; ++a) out << c[a] << (a == mesh.dim ? "\n" : " ");
  }
  out << "faces " << mesh.num_faces() << "\n";
  for (const auto& f : mesh.faces) {
    for (int a = 0; a < mesh.dim; ++a) out << f.verts[a] << " ";
    out << "owner " << f.owner << " neighbor " << f.neighbor;
    std::snprintf(buf, sizeof buf, " normal %.17g %.17g %.17g\n", f.normal.x(), f.normal.y(),
                  f.normal.z());
    out << buf;
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

} // namespace wgstokes
