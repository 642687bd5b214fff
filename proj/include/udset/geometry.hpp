#pragma once

#include <cmath>

namespace udset {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace udset
