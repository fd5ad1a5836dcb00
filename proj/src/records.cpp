#include "cmaswitch/records.hpp"

#include "cmaswitch/config.hpp"

#include <stdexcept>

namespace cmaswitch {

const TargetGrid& TargetGrid::standard() {
  static const TargetGrid grid = [] {
    TargetGrid g{};
    for (int i = 0; i < kNumTargets; ++i)
      g.values[i] = std::pow(10.0, 2.0 - 0.2 * i);
    return g;
  }();
  return grid;
}

std::string AdaptiveTriple::repr() const {
  return c1 + ">" + c2 + "@" + std::to_string(tau_index);
}

std::optional<AdaptiveTriple> AdaptiveTriple::parse(const std::string& token) {
  const auto gt = token.find('>');
  const auto at = token.find('@');
  if (gt == std::string::npos || at == std::string::npos || at < gt)
    return std::nullopt;
  AdaptiveTriple t;
  t.c1 = token.substr(0, gt);
  t.c2 = token.substr(gt + 1, at - gt - 1);
  try {
    t.tau_index = std::stoi(token.substr(at + 1));
    decode(t.c1);
    decode(t.c2);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  if (t.tau_index < 0 || t.tau_index >= kNumTargets) return std::nullopt;
  return t;
}

}  // namespace cmaswitch
