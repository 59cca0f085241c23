#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/trace.hpp"

namespace freqprint {

enum class Split { unassigned, train, validation, test };

const char* split_name(Split s) noexcept;
Split split_from_name(const std::string& name);  // throws parse_error

struct LabeledTrace {
  FrequencyTrace trace;
  std::string label;
};

// Labeled traces plus per-item split bookkeeping. Class order is the order of
// first appearance and is preserved by serialization and splitting.
class TraceDataset {
public:
  TraceDataset() = default;

  void add(FrequencyTrace trace, const std::string& label,
           Split split = Split::unassigned);

  const std::vector<std::string>& classes() const noexcept { return classes_; }
  const std::vector<LabeledTrace>& items() const noexcept { return items_; }
  const std::vector<Split>& split_assignment() const noexcept { return splits_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool has_split() const noexcept;

  int class_index(const std::string& label) const;  // -1 if unknown
  std::vector<std::size_t> indices_of(Split split) const;
  std::size_t count_for_label(const std::string& label) const;

private:
  friend TraceDataset split_dataset(const TraceDataset&, std::uint64_t);

  std::vector<std::string> classes_;
  std::vector<LabeledTrace> items_;
  std::vector<Split> splits_;
};

// Random per-class 60/20/20 assignment, deterministic for a fixed seed.
// Every class needs at least 5 items.
TraceDataset split_dataset(const TraceDataset& ds, std::uint64_t seed);

}  // namespace freqprint
