#include "pelflow/masks.hpp"

namespace pelflow {

namespace {

MaskTemplate make_mask(int id, int row_lo, int row_hi, int col_lo, int col_hi) {
  MaskTemplate m{id, {}};
  for (int dy = row_lo; dy <= row_hi; ++dy) {
    for (int dx = col_lo; dx <= col_hi; ++dx) m.offsets.push_back({dx, dy});
  }
  return m;
}

}  // namespace

const std::vector<MaskTemplate>& mask_set() {
  static const std::vector<MaskTemplate> masks = {
      make_mask(0, -1, 1, -1, 1),  // full window
      make_mask(1, -1, 0, -1, 1),  // top half
      make_mask(2, 0, 1, -1, 1),   // bottom half
      make_mask(3, -1, 1, -1, 0),  // left half
      make_mask(4, -1, 1, 0, 1),   // right half
      make_mask(5, -1, 0, -1, 0),  // up-left
      make_mask(6, -1, 0, 0, 1),   // up-right
      make_mask(7, 0, 1, -1, 0),   // down-left
      make_mask(8, 0, 1, 0, 1),    // down-right
  };
  return masks;
}

std::optional<std::vector<Pixel>> gather(const MaskTemplate& mask, Pixel r, int width, int height) {
  std::vector<Pixel> out;
  out.reserve(mask.offsets.size());
  for (const auto& o : mask.offsets) {
    const int x = r.x + o.dx;
    const int y = r.y + o.dy;
    if (x >= 0 && y >= 0 && x < width && y < height) out.push_back({x, y});
  }
  if (out.size() < kMinObservations) return std::nullopt;
  return out;
}

std::string render_mask(const MaskTemplate& mask) {
  std::string out;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      char c = '.';
      for (const auto& o : mask.offsets) {
        if (o.dx == dx && o.dy == dy) c = (dx == 0 && dy == 0) ? 'X' : 'O';
      }
      out.push_back(c);
      if (dx < 1) out.push_back(' ');
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace pelflow
