#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace freqprint {

const char* split_name(Split s) noexcept {
  switch (s) {
    case Split::unassigned: return "unassigned";
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
  }
  return "unassigned";
}

Split split_from_name(const std::string& name) {
  if (name == "unassigned") return Split::unassigned;
  if (name == "train") return Split::train;
  if (name == "validation") return Split::validation;
  if (name == "test") return Split::test;
  raise(Errc::parse_error, "unknown split tag '" + name + "'");
}

void TraceDataset::add(FrequencyTrace trace, const std::string& label, Split split) {
  if (label.empty()) raise(Errc::invalid_argument, "item label must be non-empty");
  if (class_index(label) < 0) classes_.push_back(label);
  items_.push_back(LabeledTrace{std::move(trace), label});
  splits_.push_back(split);
}

bool TraceDataset::has_split() const noexcept {
  if (items_.empty()) return false;
  return std::none_of(splits_.begin(), splits_.end(),
                      [](Split s) { return s == Split::unassigned; });
}

int TraceDataset::class_index(const std::string& label) const {
  auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) return -1;
  return static_cast<int>(it - classes_.begin());
}

std::vector<std::size_t> TraceDataset::indices_of(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits_.size(); ++i) {
    if (splits_[i] == split) out.push_back(i);
  }
  return out;
}

std::size_t TraceDataset::count_for_label(const std::string& label) const {
  return static_cast<std::size_t>(
      std::count_if(items_.begin(), items_.end(),
                    [&](const LabeledTrace& it) { return it.label == label; }));
}

TraceDataset split_dataset(const TraceDataset& ds, std::uint64_t seed) {
  TraceDataset out = ds;
  std::mt19937_64 rng(seed);
  for (const std::string& label : ds.classes()) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.items().size(); ++i) {
      if (ds.items()[i].label == label) idx.push_back(i);
    }
    const std::size_t m = idx.size();
    if (m < 5)
      raise(Errc::invalid_dataset,
            "class '" + label + "' has only " + std::to_string(m) +
                " items; at least 5 are required to split");
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(0.6 * static_cast<double>(m)));
    const auto n_val = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(m)));
    for (std::size_t k = 0; k < m; ++k) {
      Split s = Split::test;
      if (k < n_train) {
        s = Split::train;
      } else if (k < n_train + n_val) {
        s = Split::validation;
      }
      out.splits_[idx[k]] = s;
    }
  }
  return out;
}

}  // namespace freqprint
