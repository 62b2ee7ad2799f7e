#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qsig/error.hpp"

namespace qsig {

// Half-open range of token indices, [begin, end).
struct index_range {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const index_range&, const index_range&) = default;
};

// A run of unquoted tokens. `position` is the original index where the run
// starts, `missing` how many tokens it spans. Rendering turns each of these
// into one omission marker.
struct gap_descriptor {
  std::size_t position = 0;
  std::size_t missing = 0;

  friend bool operator==(const gap_descriptor&, const gap_descriptor&) = default;
};

// Non-empty set of token indices, stored as sorted, disjoint, non-adjacent
// half-open ranges. Adjacent input ranges are merged on construction so that
// equal sets always have equal representations; the envelope codec depends on
// that canonical form being unique.
class index_set {
 public:
  // Accepts ranges in any order, merges overlaps and adjacency. Empty ranges
  // and an empty total set are rejected: a quote with nothing in it has no
  // meaning anywhere in the pipeline.
  static index_set from_ranges(std::vector<index_range> ranges) {
    for (const auto& r : ranges) {
      if (r.begin >= r.end) throw error(errc::empty_selection, "empty or inverted range");
    }
    if (ranges.empty()) throw error(errc::empty_selection, "no ranges given");
    std::sort(ranges.begin(), ranges.end(),
              [](const index_range& a, const index_range& b) { return a.begin < b.begin; });
    std::vector<index_range> merged;
    merged.push_back(ranges.front());
    for (std::size_t i = 1; i < ranges.size(); ++i) {
      if (ranges[i].begin <= merged.back().end) {
        merged.back().end = std::max(merged.back().end, ranges[i].end);
      } else {
        merged.push_back(ranges[i]);
      }
    }
    return index_set(std::move(merged));
  }

  static index_set from_indices(std::span<const std::size_t> indices) {
    std::vector<index_range> ranges;
    ranges.reserve(indices.size());
    for (std::size_t i : indices) ranges.push_back({i, i + 1});
    return from_ranges(std::move(ranges));
  }

  static index_set from_indices(std::initializer_list<std::size_t> indices) {
    return from_indices(std::span<const std::size_t>(indices.begin(), indices.size()));
  }

  static index_set single(std::size_t index) { return from_ranges({{index, index + 1}}); }

  static index_set full(std::size_t n) {
    if (n == 0) throw error(errc::empty_selection, "zero-length message");
    return from_ranges({{0, n}});
  }

  // Strict variant for decoded input: ranges must already be in canonical
  // form. Anything unsorted, overlapping, adjacent, or empty is rejected so
  // that a given set of indices has exactly one wire representation.
  static index_set checked(std::vector<index_range> ranges) {
    if (ranges.empty()) throw error(errc::envelope_bad_ranges, "no ranges");
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      if (ranges[i].begin >= ranges[i].end) {
        throw error(errc::envelope_bad_ranges, "empty or inverted range");
      }
      if (i > 0 && ranges[i].begin <= ranges[i - 1].end) {
        throw error(errc::envelope_bad_ranges, "ranges unsorted, overlapping, or unmerged");
      }
    }
    return index_set(std::move(ranges));
  }

  const std::vector<index_range>& ranges() const noexcept { return ranges_; }

  std::size_t count() const noexcept {
    std::size_t total = 0;
    for (const auto& r : ranges_) total += r.size();
    return total;
  }

  std::size_t min_index() const noexcept { return ranges_.front().begin; }
  std::size_t max_index() const noexcept { return ranges_.back().end - 1; }

  bool contiguous() const noexcept { return ranges_.size() == 1; }

  bool contains(std::size_t index) const noexcept {
    for (const auto& r : ranges_) {
      if (index < r.begin) return false;
      if (index < r.end) return true;
    }
    return false;
  }

  bool covers_all(std::size_t n) const noexcept {
    return ranges_.size() == 1 && ranges_.front().begin == 0 && ranges_.front().end == n;
  }

  // True when any member index falls in [begin, end).
  bool intersects(std::size_t begin, std::size_t end) const noexcept {
    for (const auto& r : ranges_) {
      if (r.begin >= end) return false;
      if (r.end > begin) return true;
    }
    return false;
  }

  std::vector<std::size_t> to_indices() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for (const auto& r : ranges_) {
      for (std::size_t i = r.begin; i < r.end; ++i) out.push_back(i);
    }
    return out;
  }

  // Runs of missing tokens relative to a message of n tokens, including a
  // leading run before the first range and a trailing one after the last.
  std::vector<gap_descriptor> gaps(std::size_t n) const {
    if (max_index() >= n) throw error(errc::index_out_of_range, "set exceeds message length");
    std::vector<gap_descriptor> out;
    std::size_t cursor = 0;
    for (const auto& r : ranges_) {
      if (r.begin > cursor) out.push_back({cursor, r.begin - cursor});
      cursor = r.end;
    }
    if (cursor < n) out.push_back({cursor, n - cursor});
    return out;
  }

  friend bool operator==(const index_set&, const index_set&) = default;

 private:
  explicit index_set(std::vector<index_range> ranges) : ranges_(std::move(ranges)) {}

  std::vector<index_range> ranges_;
};

inline std::string to_string(const index_set& set) {
  std::string out;
  for (const auto& r : set.ranges()) {
    if (!out.empty()) out += ' ';
    out += '[' + std::to_string(r.begin) + ',' + std::to_string(r.end) + ')';
  }
  return out;
}

}  // namespace qsig
