#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace rabi {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are computed once per order and shared; safe to call from any thread.
std::shared_ptr<const GaussLegendreRule> gauss_legendre(std::size_t order);

}  // namespace rabi
