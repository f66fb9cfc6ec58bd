#include "boxlab/types.hpp"

#include <utility>

namespace boxlab {

const char* face_label(Face face) {
  return kFaceTable[static_cast<int>(face)].label;
}

Eigen::Vector3d OrientedBox::local_corner(int index) const {
  return Eigen::Vector3d((index & 4) ? local_max.x() : local_min.x(),
                         (index & 2) ? local_max.y() : local_min.y(),
                         (index & 1) ? local_max.z() : local_min.z());
}

const std::array<EdgeDef, 12>& box_edges() {
  static const std::array<EdgeDef, 12> edges = [] {
    std::array<EdgeDef, 12> out{};
    int count = 0;
    for (int a = 0; a < 8; ++a) {
      for (int b = a + 1; b < 8; ++b) {
        int diff = a ^ b;
        if (diff != 1 && diff != 2 && diff != 4) continue;  // not an edge
        EdgeDef edge{};
        edge.corners = {a, b};
        int nfaces = 0;
        for (const auto& def : kFaceTable) {
          const int bit = 4 >> def.axis;
          const int want = def.sign > 0 ? bit : 0;
          if ((a & bit) == want && (b & bit) == want) {
            edge.faces[nfaces++] = def.face;
          }
        }
        out[count++] = edge;
      }
    }
    return out;
  }();
  return edges;
}

}  // namespace boxlab
