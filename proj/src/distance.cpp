#include "jobprp/distance.hpp"

#include <cstdlib>

namespace jobprp {

std::string format_metres(Distance d) {
  if (d.is_infinite()) return "inf";
  const std::int64_t dm = d.dm();
  const std::int64_t whole = std::llabs(dm) / 10;
  const std::int64_t tenth = std::llabs(dm) % 10;
  return (dm < 0 ? "-" : "") + std::to_string(whole) + "." + std::to_string(tenth);
}

std::ostream& operator<<(std::ostream& os, Distance d) { return os << format_metres(d); }

}  // namespace jobprp
