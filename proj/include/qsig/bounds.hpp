#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "qsig/error.hpp"
#include "qsig/index_set.hpp"
#include "qsig/merkle.hpp"
#include "qsig/quoter.hpp"

namespace qsig {

// ceil(log2(x)) with the convention ceil_log2(1) == 0.
inline std::size_t ceil_log2(std::size_t x) {
  if (x == 0) throw error(errc::bad_argument, "log of zero");
  return static_cast<std::size_t>(std::bit_width(x - 1));
}

// Most path digests any quote of t tokens out of n can need. Exact worst
// case when n is a power of two; otherwise an overcount of at most t. The
// shape behind it: each quoted token pays for at most one sibling per level
// above the top ceil(log2(t)) levels, and those top levels contribute at most
// a full subtree of 2^ceil(log2(t)) nodes.
inline std::size_t bound_arbitrary(std::size_t n, std::size_t t) {
  if (t < 1 || t > n) throw error(errc::bad_argument, "need 1 <= t <= n");
  const auto log_n = static_cast<std::int64_t>(ceil_log2(n));
  const auto log_t = static_cast<std::int64_t>(ceil_log2(t));
  const auto result = static_cast<std::int64_t>(t) * (log_n - log_t - 1) +
                      (std::int64_t{1} << log_t);
  // The level term can go negative (t near n), the total cannot.
  return static_cast<std::size_t>(result);
}

// Most path digests a contiguous quote can need, any length, n > 2: two
// fringes of at most ceil(log2(n)) - 1 siblings each.
inline std::size_t bound_contiguous(std::size_t n) {
  if (n <= 2) throw error(errc::bad_argument, "contiguous bound needs n > 2");
  return 2 * ceil_log2(n) - 2;
}

// Most path digests any quote whatsoever can need: ceil(n / 2), reached by
// quoting every second token.
inline std::size_t bound_worst_quote(std::size_t n) {
  if (n == 0) throw error(errc::bad_argument, "empty message");
  return (n + 1) / 2;
}

// Path length for one concrete quote shape, no hashing involved.
inline std::size_t path_size(const merkle_tree& skeleton, const index_set& quoted) {
  const flag_assignment fa = mark_flags(skeleton, quoted);
  std::size_t count = 0;
  for (flag f : fa.flags) count += f == flag::required ? 1 : 0;
  return count;
}

struct bound_report {
  std::size_t n = 0;
  std::size_t t = 0;  // 0 means every quote size was in scope
  bool contiguous_only = false;
  bool exhaustive = false;
  std::size_t bound = 0;
  std::size_t observed_max = 0;
  std::uint64_t cases = 0;
  std::optional<index_set> witness;
};

inline constexpr std::size_t exhaustive_arbitrary_limit = 16;
inline constexpr std::size_t exhaustive_contiguous_limit = 256;

namespace detail {

inline std::size_t applicable_bound(std::size_t n, std::size_t t, bool contiguous_only) {
  if (contiguous_only) return bound_contiguous(n);
  if (t == 0) return bound_worst_quote(n);
  return bound_arbitrary(n, t);
}

template <typename Fn>
void for_each_combination(std::size_t n, std::size_t t, Fn&& fn) {
  std::vector<std::size_t> indices(t);
  for (std::size_t i = 0; i < t; ++i) indices[i] = i;
  while (true) {
    fn(indices);
    // Advance to the next t-combination of [0, n) in lexicographic order.
    std::size_t i = t;
    while (i-- > 0) {
      if (indices[i] != i + n - t) {
        ++indices[i];
        for (std::size_t j = i + 1; j < t; ++j) indices[j] = indices[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
  }
}

}  // namespace detail

// True worst case over every quote shape in scope, found by enumeration.
// With t == 0 all sizes are in scope, otherwise only quotes of exactly t
// tokens. Enumeration is the point, so the message sizes are capped; beyond
// the cap use sampled_worst_case for a lower-bound estimate instead.
inline bound_report exhaustive_worst_case(std::size_t n, std::size_t t,
                                          bool contiguous_only) {
  if (n == 0) throw error(errc::bad_argument, "empty message");
  if (t > n) throw error(errc::bad_argument, "need t <= n");
  const std::size_t limit =
      contiguous_only ? exhaustive_contiguous_limit : exhaustive_arbitrary_limit;
  if (n > limit) {
    throw error(errc::bad_argument,
                "exhaustive search capped at n = " + std::to_string(limit) +
                    " in this mode; use sampling above that");
  }

  bound_report report;
  report.n = n;
  report.t = t;
  report.contiguous_only = contiguous_only;
  report.exhaustive = true;
  report.bound = detail::applicable_bound(n, t, contiguous_only);

  const merkle_tree skeleton = build_skeleton(n);
  const auto consider = [&](const index_set& candidate) {
    const std::size_t size = path_size(skeleton, candidate);
    ++report.cases;
    if (!report.witness || size > report.observed_max) {
      report.observed_max = size;
      report.witness = candidate;
    }
  };

  if (contiguous_only) {
    for (std::size_t len = t == 0 ? 1 : t; len <= (t == 0 ? n : t); ++len) {
      for (std::size_t start = 0; start + len <= n; ++start) {
        consider(index_set::from_ranges({{start, start + len}}));
      }
    }
  } else {
    for (std::size_t size = t == 0 ? 1 : t; size <= (t == 0 ? n : t); ++size) {
      detail::for_each_combination(n, size, [&](const std::vector<std::size_t>& indices) {
        consider(index_set::from_indices(indices));
      });
    }
  }
  return report;
}

// Random search over quote shapes: a reproducible lower bound on the true
// worst case for sizes the exhaustive oracle cannot reach.
inline bound_report sampled_worst_case(std::size_t n, std::size_t t, bool contiguous_only,
                                       std::uint64_t samples, std::uint64_t seed) {
  if (n == 0) throw error(errc::bad_argument, "empty message");
  if (t > n) throw error(errc::bad_argument, "need t <= n");
  if (samples == 0) throw error(errc::bad_argument, "need at least one sample");

  bound_report report;
  report.n = n;
  report.t = t;
  report.contiguous_only = contiguous_only;
  report.exhaustive = false;
  report.bound = detail::applicable_bound(n, t, contiguous_only);

  std::mt19937_64 rng(seed);
  const merkle_tree skeleton = build_skeleton(n);
  const auto pick_size = [&] {
    if (t != 0) return t;
    return std::uniform_int_distribution<std::size_t>(1, n)(rng);
  };

  for (std::uint64_t i = 0; i < samples; ++i) {
    const std::size_t size = pick_size();
    index_set candidate = [&] {
      if (contiguous_only) {
        const std::size_t start =
            std::uniform_int_distribution<std::size_t>(0, n - size)(rng);
        return index_set::from_ranges({{start, start + size}});
      }
      // Distinct draws; for large quotes draw the complement instead so the
      // rejection loop stays short.
      const bool invert = size > n / 2;
      const std::size_t draws = invert ? n - size : size;
      std::unordered_set<std::size_t> chosen;
      std::uniform_int_distribution<std::size_t> dist(0, n - 1);
      while (chosen.size() < draws) chosen.insert(dist(rng));
      std::vector<std::size_t> indices;
      indices.reserve(size);
      for (std::size_t v = 0; v < n; ++v) {
        if (chosen.contains(v) != invert) indices.push_back(v);
      }
      return index_set::from_indices(indices);
    }();
    const std::size_t path = path_size(skeleton, candidate);
    ++report.cases;
    if (!report.witness || path > report.observed_max) {
      report.observed_max = path;
      report.witness = std::move(candidate);
    }
  }
  return report;
}

// Gap between the closed-form bound and the enumerated worst case for quotes
// of t tokens out of n. Zero when n is a power of two; in (0, t] otherwise.
// Anything outside that window means the formula or the tree is broken, which
// is worth a loud stop rather than a return value.
inline std::size_t bound_slack(std::size_t n, std::size_t t) {
  const bound_report report = exhaustive_worst_case(n, t, false);
  if (report.observed_max > report.bound) {
    throw error(errc::internal, "worst case exceeds the bound");
  }
  const std::size_t slack = report.bound - report.observed_max;
  if (slack > t) throw error(errc::internal, "bound is looser than it should be");
  return slack;
}

inline std::string bounds_csv_header() {
  return "n,t,mode,bound,observed_max,cases,exhaustive,witness";
}

inline std::string to_csv_row(const bound_report& report) {
  std::string row = std::to_string(report.n) + ',';
  row += report.t == 0 ? std::string("any") : std::to_string(report.t);
  row += ',';
  row += report.contiguous_only ? "contiguous" : "arbitrary";
  row += ',' + std::to_string(report.bound);
  row += ',' + std::to_string(report.observed_max);
  row += ',' + std::to_string(report.cases);
  row += ',';
  row += report.exhaustive ? "yes" : "no";
  row += ',';
  if (report.witness) {
    bool first = true;
    for (const auto& r : report.witness->ranges()) {
      if (!first) row += ';';
      row += std::to_string(r.begin) + ".." + std::to_string(r.end);
      first = false;
    }
  }
  return row;
}

}  // namespace qsig
