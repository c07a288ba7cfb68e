#pragma once

#include <compare>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace jobprp {

// Walking distance in whole decimetres. All layout lengths are multiples of
// 0.1 m, so every path length and objective value is an exact integer here.
class Distance {
 public:
  constexpr Distance() = default;
  static constexpr Distance decimetres(std::int64_t dm) { return Distance(dm); }
  static Distance metres(double m) {
    const double scaled = m * 10.0;
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-6) {
      throw std::invalid_argument("length " + std::to_string(m) +
                                  " m is not a multiple of 0.1 m");
    }
    return Distance(static_cast<std::int64_t>(rounded));
  }
  static constexpr Distance infinity() {
    return Distance(std::numeric_limits<std::int64_t>::max() / 4);
  }

  constexpr std::int64_t dm() const { return dm_; }
  constexpr double in_metres() const { return static_cast<double>(dm_) / 10.0; }
  constexpr bool is_infinite() const { return dm_ >= infinity().dm_; }

  constexpr Distance& operator+=(Distance o) {
    dm_ += o.dm_;
    return *this;
  }
  constexpr Distance& operator-=(Distance o) {
    dm_ -= o.dm_;
    return *this;
  }
  friend constexpr Distance operator+(Distance a, Distance b) { return a += b; }
  friend constexpr Distance operator-(Distance a, Distance b) { return a -= b; }
  friend constexpr Distance operator*(std::int64_t k, Distance d) { return Distance(k * d.dm_); }
  friend constexpr Distance operator*(Distance d, std::int64_t k) { return Distance(k * d.dm_); }
  friend constexpr auto operator<=>(Distance, Distance) = default;

  friend std::ostream& operator<<(std::ostream& os, Distance d);

 private:
  constexpr explicit Distance(std::int64_t dm) : dm_(dm) {}
  std::int64_t dm_ = 0;
};

// Formats as metres with one decimal, e.g. "348.6".
std::string format_metres(Distance d);

}  // namespace jobprp
