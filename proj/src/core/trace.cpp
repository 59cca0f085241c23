#include "core/trace.hpp"

#include <algorithm>
#include <cmath>

namespace freqprint {

const char* errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::parse_error: return "parse-error";
    case Errc::io_error: return "io-error";
    case Errc::format_error: return "format-error";
    case Errc::shape_error: return "shape-error";
    case Errc::state_error: return "state-error";
    case Errc::invalid_dataset: return "invalid-dataset";
    case Errc::unsupported_platform: return "unsupported-platform";
    case Errc::access_error: return "access-error";
    case Errc::target_error: return "target-error";
    case Errc::partial_data: return "partial-data";
    case Errc::order_error: return "order-error";
    case Errc::platform_error: return "platform-error";
  }
  return "unknown";
}

FrequencyTrace::FrequencyTrace(std::vector<std::int64_t> samples, int interval_ms,
                               int core_id, std::int64_t start_time_ms, MetaMap meta)
    : samples_(std::move(samples)),
      interval_ms_(interval_ms),
      core_id_(core_id),
      start_time_ms_(start_time_ms),
      meta_(std::move(meta)) {
  if (samples_.empty()) raise(Errc::invalid_argument, "trace must contain at least one sample");
  if (interval_ms_ <= 0) raise(Errc::invalid_argument, "interval_ms must be positive");
  for (std::int64_t s : samples_) {
    if (s < 0) raise(Errc::invalid_argument, "frequency samples must be non-negative");
  }
}

FrequencyTrace FrequencyTrace::with_samples(std::vector<std::int64_t> samples) const {
  return FrequencyTrace(std::move(samples), interval_ms_, core_id_, start_time_ms_, meta_);
}

WindowSpan centered_window(std::size_t i, int window, std::size_t length) {
  const std::size_t left = static_cast<std::size_t>(window) / 2;
  const std::size_t right = static_cast<std::size_t>(window) - 1 - left;
  WindowSpan span;
  span.lo = i >= left ? i - left : 0;
  span.hi = std::min(i + right, length - 1);
  return span;
}

FrequencyTrace gaussian_smooth(const FrequencyTrace& trace, int window) {
  const std::size_t n = trace.size();
  if (window < 1) raise(Errc::invalid_argument, "smoothing window must be at least 1");
  if (static_cast<std::size_t>(window) > n)
    raise(Errc::invalid_argument, "smoothing window exceeds trace length");

  const double sigma = window / 4.0;
  const std::size_t left = static_cast<std::size_t>(window) / 2;
  std::vector<double> kernel(static_cast<std::size_t>(window));
  for (std::size_t k = 0; k < kernel.size(); ++k) {
    const double offset = static_cast<double>(k) - static_cast<double>(left);
    kernel[k] = std::exp(-(offset * offset) / (2.0 * sigma * sigma));
  }

  const auto& in = trace.samples();
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const WindowSpan span = centered_window(i, window, n);
    double acc = 0.0;
    double weight = 0.0;
    for (std::size_t j = span.lo; j <= span.hi; ++j) {
      const double w = kernel[j + left - i];
      acc += w * static_cast<double>(in[j]);
      weight += w;
    }
    out[i] = std::llround(acc / weight);
  }
  return trace.with_samples(std::move(out));
}

FrequencyTrace moving_max(const FrequencyTrace& trace, int window) {
  if (window < 1) raise(Errc::invalid_argument, "movmax window must be at least 1");
  const std::size_t n = trace.size();
  const auto& in = trace.samples();
  std::vector<std::int64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const WindowSpan span = centered_window(i, window, n);
    std::int64_t best = in[span.lo];
    for (std::size_t j = span.lo + 1; j <= span.hi; ++j) best = std::max(best, in[j]);
    out[i] = best;
  }
  return trace.with_samples(std::move(out));
}

std::vector<double> normalize(const FrequencyTrace& trace, std::int64_t f_min,
                              std::int64_t f_max) {
  if (f_max <= f_min) raise(Errc::invalid_argument, "normalization requires f_max > f_min");
  const double range = static_cast<double>(f_max - f_min);
  std::vector<double> out(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double v = static_cast<double>(trace[i] - f_min) / range;
    out[i] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

FrequencyTrace truncate(const FrequencyTrace& trace, std::size_t n) {
  if (n == 0) raise(Errc::invalid_argument, "truncation length must be positive");
  if (n > trace.size()) raise(Errc::invalid_argument, "truncation length exceeds trace length");
  std::vector<std::int64_t> head(trace.samples().begin(),
                                 trace.samples().begin() + static_cast<std::ptrdiff_t>(n));
  return trace.with_samples(std::move(head));
}

std::uint64_t frequency_activity(const FrequencyTrace& trace, const ActivityConfig& cfg) {
  std::uint64_t count = 0;
  for (std::int64_t s : trace.samples()) {
    if (s > cfg.threshold_khz) ++count;
  }
  return count;
}

}  // namespace freqprint
