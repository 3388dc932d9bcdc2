#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pelflow/frame.hpp"

namespace pelflow {

struct Offset {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Offset&, const Offset&) = default;
};

/// Neighborhood geometry around the working pixel. Offsets lie in the 3x3
/// window and always include the centre.
struct MaskTemplate {
  int id = 0;
  std::vector<Offset> offsets;
};

/// The nine templates in trial order: full 3x3, four half windows (top,
/// bottom, left, right), then the four 2x2 quadrants (up-left, up-right,
/// down-left, down-right).
const std::vector<MaskTemplate>& mask_set();

/// Minimum neighborhood size that keeps the two-unknown system overdetermined.
inline constexpr std::size_t kMinObservations = 3;

/// In-bounds absolute positions of `mask` around `r`, in template order.
/// Returns nullopt when fewer than kMinObservations survive clipping.
std::optional<std::vector<Pixel>> gather(const MaskTemplate& mask, Pixel r, int width, int height);

/// ASCII rendering: 'X' working pixel, 'O' neighbor, '.' unused.
std::string render_mask(const MaskTemplate& mask);

}  // namespace pelflow
