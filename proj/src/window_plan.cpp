#include "lmc/window_plan.hpp"

#include <algorithm>
#include <string>

#include "lmc/errors.hpp"

namespace lmc {

WindowPlan plan_windows(std::size_t token_count, std::size_t context, std::size_t stride) {
  if (stride == 0 || context <= stride) {
    throw ContractViolation("window plan needs context > stride > 0 (context " + std::to_string(context) +
                            ", stride " + std::to_string(stride) + ")");
  }
  WindowPlan plan{token_count, context, stride, {}};
  if (token_count == 0) return plan;

  std::size_t start = 0;
  std::size_t end = std::min(token_count, context);
  plan.windows.push_back({start, end, 0});
  while (end < token_count) {
    const std::size_t scored_from = end;
    start += stride;
    end = std::min(start + context, token_count);
    plan.windows.push_back({start, end, scored_from});
  }
  return plan;
}

std::size_t effective_stride(std::size_t context, std::size_t stride) {
  if (stride < context) return stride;
  return std::max<std::size_t>(1, context / 2);
}

}  // namespace lmc
