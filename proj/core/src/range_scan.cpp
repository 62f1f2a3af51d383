#include "range_scan.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace chedra::detail {

namespace {

constexpr int kSamples = 256;

using ProbeFn = std::function<Probe(double)>;

// Boundary between an admissible `in` and an inadmissible `out`.
std::pair<double, RangeBoundary> bisect(const ProbeFn& probe, double in, double out, RangeBoundary out_kind) {
  for (int it = 0; it < 200; ++it) {
    if (std::abs(in - out) <= 1e-14 * std::max(1.0, std::abs(in))) break;
    const double mid = 0.5 * (in + out);
    const Probe p = probe(mid);
    if (p.ok) {
      in = mid;
    } else {
      out = mid;
      out_kind = p.failing;
    }
  }
  return {in, out_kind};
}

// Zero of b between two admissible samples of opposite sign; returns the last
// point on the left side and the first point on the right side.
std::pair<double, double> crossing(const ProbeFn& probe, double lo, double hi, double sign_lo) {
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const Probe p = probe(mid);
    if (p.ok && p.b * sign_lo > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

}  // namespace

std::vector<RangeInterval> scan_ranges(const ProbeFn& probe, double a_max, double a_ref) {
  std::vector<double> grid;
  grid.reserve(kSamples + 2);
  for (int i = 1; i <= kSamples + 1; ++i) grid.push_back(a_max * i / kSamples);
  if (a_ref > 0.0) grid.push_back(a_ref);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<Probe> probes;
  probes.reserve(grid.size());
  for (double a : grid) probes.push_back(probe(a));

  auto linked = [&](std::size_t k) {  // samples k and k+1 lie in one run
    return probes[k].ok && probes[k + 1].ok && probes[k].b * probes[k + 1].b >= 0.0;
  };

  std::vector<RangeInterval> out;
  std::size_t i = 0;
  const std::size_t n = grid.size();
  while (i < n) {
    if (!probes[i].ok) {
      ++i;
      continue;
    }
    std::size_t k = i;
    while (k + 1 < n && linked(k)) ++k;

    RangeInterval iv;
    if (i == 0) {
      std::tie(iv.lo, iv.lo_kind) = bisect(probe, grid[0], 0.0, RangeBoundary::Domain);
      // admissible all the way down: the open end is a -> 0 itself
      if (iv.lo <= 1e-9 * a_max) {
        iv.lo = 0.0;
        iv.lo_kind = RangeBoundary::Domain;
      }
    } else if (probes[i - 1].ok) {
      iv.lo = crossing(probe, grid[i - 1], grid[i], probes[i - 1].b).second;
      iv.lo_kind = RangeBoundary::TipCollapse;
    } else {
      std::tie(iv.lo, iv.lo_kind) = bisect(probe, grid[i], grid[i - 1], probes[i - 1].failing);
    }

    if (k + 1 >= n) {
      iv.hi = grid[k];
      iv.hi_kind = RangeBoundary::Discriminant;
    } else if (probes[k + 1].ok) {
      iv.hi = crossing(probe, grid[k], grid[k + 1], probes[k].b).first;
      iv.hi_kind = RangeBoundary::TipCollapse;
    } else {
      std::tie(iv.hi, iv.hi_kind) = bisect(probe, grid[k], grid[k + 1], probes[k + 1].failing);
    }
    out.push_back(iv);
    i = k + 1;
  }
  return out;
}

}  // namespace chedra::detail
