#include "sdfem/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "sdfem/error.hpp"

namespace sdfem {

namespace {

using Bary = std::array<double, 3>;

TriangleRule base_rule() {
  const double s15 = std::sqrt(15.0);
  const double a1 = (9.0 - 2.0 * s15) / 21.0, b1 = (6.0 + s15) / 21.0;
  const double a2 = (9.0 + 2.0 * s15) / 21.0, b2 = (6.0 - s15) / 21.0;
  const double w0 = 9.0 / 40.0;
  const double w1 = (155.0 + s15) / 1200.0;
  const double w2 = (155.0 - s15) / 1200.0;
  TriangleRule r;
  r.bary = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
            {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
            {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}};
  r.weights = {w0, w1, w1, w1, w2, w2, w2};
  return r;
}

// Sub-triangles (as barycentric corner triples) after `level` midpoint splits.
std::vector<std::array<Bary, 3>> subdivide(int level) {
  std::vector<std::array<Bary, 3>> tris = {{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}};
  auto mid = [](const Bary& a, const Bary& b) {
    return Bary{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
  };
  for (int l = 0; l < level; ++l) {
    std::vector<std::array<Bary, 3>> next;
    next.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      const Bary m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m02 = mid(t[0], t[2]);
      next.push_back({t[0], m01, m02});
      next.push_back({m01, t[1], m12});
      next.push_back({m02, m12, t[2]});
      next.push_back({m12, m02, m01});
    }
    tris = std::move(next);
  }
  return tris;
}

TriangleRule build(int level) {
  const TriangleRule base = base_rule();
  const auto subs = subdivide(level);
  const double scale = 1.0 / static_cast<double>(subs.size());
  TriangleRule r;
  r.level = level;
  r.bary.reserve(subs.size() * base.size());
  r.weights.reserve(subs.size() * base.size());
  for (const auto& t : subs) {
    for (std::size_t q = 0; q < base.size(); ++q) {
      const auto& l = base.bary[q];
      Bary p{};
      for (int c = 0; c < 3; ++c) p[c] = l[0] * t[0][c] + l[1] * t[1][c] + l[2] * t[2][c];
      r.bary.push_back(p);
      r.weights.push_back(base.weights[q] * scale);
    }
  }
  return r;
}

}  // namespace

const TriangleRule& quad_rule(int level) {
  if (level < 0 || level > 8) throw InvalidArgument("quadrature level must be in [0, 8]");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<TriangleRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[level];
  if (!slot) slot = std::make_unique<TriangleRule>(build(level));
  return *slot;
}

}  // namespace sdfem
