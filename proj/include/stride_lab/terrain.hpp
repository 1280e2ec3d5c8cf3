#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "stride_lab/errors.hpp"

namespace stride_lab {

/// Half-open interval [begin, end) along the direction of travel.
struct GapInterval {
  double begin = 0.0;
  double end = 0.0;
  friend bool operator==(const GapInterval&, const GapInterval&) = default;
};

/// One-dimensional ground model along x.
///
/// Flat ground is solid everywhere at height 0. Gapped ground is flat except
/// for the listed intervals, which offer no support. Rough ground is solid
/// with piecewise-constant height, one uniform draw in [-h_max, h_max] per
/// `kRoughCell` metres, fully determined by the seed.
class Terrain {
 public:
  enum class Kind { Flat, Gapped, Rough };

  static constexpr double kRoughCell = 0.05;

  Terrain() = default;

  static Terrain flat() { return Terrain{}; }

  static Terrain gapped(std::vector<GapInterval> gaps) {
    std::sort(gaps.begin(), gaps.end(),
              [](const GapInterval& a, const GapInterval& b) { return a.begin < b.begin; });
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      if (!(gaps[i].end > gaps[i].begin)) throw ConfigInvalid("gap interval must have end > begin");
      if (i > 0 && gaps[i].begin < gaps[i - 1].end) throw ConfigInvalid("gap intervals overlap");
    }
    Terrain t;
    t.kind_ = Kind::Gapped;
    t.gaps_ = std::move(gaps);
    return t;
  }

  static Terrain rough(double h_max, std::uint64_t seed) {
    if (!(h_max >= 0)) throw ConfigInvalid("rough terrain h_max must be >= 0");
    Terrain t;
    t.kind_ = Kind::Rough;
    t.h_max_ = h_max;
    t.seed_ = seed;
    return t;
  }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const std::vector<GapInterval>& gaps() const { return gaps_; }
  [[nodiscard]] double h_max() const { return h_max_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  [[nodiscard]] bool solid(double x) const {
    for (const auto& g : gaps_) {
      if (x >= g.begin && x < g.end) return false;
    }
    return true;
  }

  /// Ground height at x. Gaps report 0; query solid() for support.
  [[nodiscard]] double height(double x) const {
    if (kind_ != Kind::Rough || h_max_ == 0.0) return 0.0;
    const auto cell = static_cast<std::int64_t>(std::floor(x / kRoughCell));
    const std::uint64_t bits = mix(seed_ ^ (static_cast<std::uint64_t>(cell) * 0x9E3779B97F4A7C15ull));
    const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
    return h_max_ * (2.0 * unit - 1.0);
  }

  friend bool operator==(const Terrain&, const Terrain&) = default;

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  Kind kind_ = Kind::Flat;
  std::vector<GapInterval> gaps_;
  double h_max_ = 0.0;
  std::uint64_t seed_ = 0;
};

}  // namespace stride_lab
