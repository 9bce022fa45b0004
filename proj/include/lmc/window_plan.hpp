#pragma once

#include <cstddef>
#include <vector>

namespace lmc {

inline constexpr std::size_t kDefaultContext = 1900;
inline constexpr std::size_t kDefaultStride = 512;

/// One window of a sliding-window evaluation: tokens [start, end) are fed to
/// the model and tokens [score_from, end) are scored.
struct Window {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t score_from = 0;

  friend bool operator==(const Window&, const Window&) = default;
};

/// Sliding-window schedule over one document. The first window covers
/// [0, min(N, context)); each later one starts `stride` further on, ends at
/// most `context` tokens later and scores only what no earlier window
/// scored, so every token is scored exactly once.
struct WindowPlan {
  std::size_t token_count = 0;
  std::size_t context = kDefaultContext;
  std::size_t stride = kDefaultStride;
  std::vector<Window> windows;
};

/// Requires context > stride > 0 (ContractViolation otherwise).
WindowPlan plan_windows(std::size_t token_count,
                        std::size_t context = kDefaultContext,
                        std::size_t stride = kDefaultStride);

}  // namespace lmc

namespace lmc {

/// Stride used when a provider's context is too small for the requested
/// one: the requested stride if it is below `context`, else context / 2
/// (at least 1).
std::size_t effective_stride(std::size_t context, std::size_t stride);

}  // namespace lmc
