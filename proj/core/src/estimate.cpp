#include "pbnssa/estimate.hpp"

namespace pbnssa {

std::string_view to_string(EstimateStatus status) noexcept {
  switch (status) {
    case EstimateStatus::ok:
      return "ok";
    case EstimateStatus::degenerate:
      return "degenerate";
    case EstimateStatus::cap_exceeded:
      return "cap-exceeded";
  }
  return "unknown";
}

}  // namespace pbnssa
