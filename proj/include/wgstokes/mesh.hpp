// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace wgstokes {

/// Codimension-1 facet: an edge in 2D, a triangle in 3D.
struct Face {
  std::array<int, 3> verts{{-1, -1, -1}}; ///< ascending vertex ids; verts[2] = -1 in 2D
  int owner = -1;    ///< adjacent cell with the smaller index
  int neighbor = -1; ///< second adjacent cell, -1 on the boundary
  Eigen::Vector3d normal = Eigen::Vector3d::Zero(); ///< unit, owner -> neighbor (outward on the boundary)
  double measure = 0.0;  ///< length (2D) or area (3D)
  double diameter = 0.0; ///< longest vertex-to-vertex distance

  bool is_boundary() const { return neighbor < 0; }
};

/// Conforming simplicial mesh. Cells are positively oriented triangles or
/// tetrahedra; faces are globally numbered with a single shared record per
/// facet so both adjacent cells agree on the face basis and normal.
///
/// All fields are plain data, immutable once built; concurrent reads are safe.
struct SimplicialMesh {
  int dim = 2;
  int level = 0; ///< refinement level when produced by a generator, else 0

  std::vector<Eigen::Vector3d> vertices; ///< z = 0 in 2D
  std::vector<std::array<int, 4>> cells; ///< dim+1 vertex ids, remainder -1
  std::vector<Face> faces;
  /// cell_faces[c][l] is the face opposite local vertex l of cell c.
  std::vector<std::array<int, 4>> cell_faces;

  // Cached per-cell geometry, filled by build_face_connectivity.
  std::vector<double> cell_measures;
  std::vector<Eigen::Vector3d> cell_centroids;
  std::vector<double> cell_diameters;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }
  int verts_per_cell() const { return dim + 1; }
  int faces_per_cell() const { return dim + 1; }

  /// Vertex coordinates of cell c as columns (3 x (dim+1)).
  Eigen::Matrix3Xd cell_vertex_matrix(int c) const;
  /// Vertex coordinates of face f as columns (3 x dim).
  Eigen::Matrix3Xd face_vertex_matrix(int f) const;
};

/// Uniform triangulation of (0,1)^2 at refinement `level` (1 <= level <= 10):
/// 2^(level-1) squares per side, each split by the diagonal running from its
/// top-left to its bottom-right corner, i.e. 2*4^(level-1) triangles.
SimplicialMesh unit_square_mesh(int level);

/// Uniform tetrahedralization of (0,1)^3 at refinement `level`
/// (1 <= level <= 10): 2^(level-1) subcubes per side, each split into the six
/// tetrahedra sharing the subcube's main diagonal (Kuhn split, identical in
/// every subcube, hence conforming); 6*8^(level-1) tets.
SimplicialMesh unit_cube_mesh(int level);

/// Rebuild faces, cell_faces and the cached cell geometry from `vertices` and
/// `cells`. Face numbering is deterministic (lexicographic in sorted vertex
/// ids). Throws StructureError for inverted/degenerate cells or facets shared
/// by more than two cells.
void build_face_connectivity(SimplicialMesh& mesh);

/// Structural audit: orientation, conformity, adjacency consistency, unit
/// owner->neighbor normals. Throws StructureError with the offending entity id.
void validate_mesh(const SimplicialMesh& mesh);

/// Plain-text dump (vertices, cells, face adjacency) for debugging.
void write_mesh_text(const SimplicialMesh& mesh, const std::string& path);

} // namespace wgstokes
