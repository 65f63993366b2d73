#include "artkit/pbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "artkit/metrics.hpp"

namespace artkit::pbs {

void PartitionSchema::validate() const {
  if (kind == SchemaKind::Static && per_dim < 1) {
    throw ConfigError("static partitioning needs per_dim >= 1");
  }
}

void SelectionCriterion::validate() const {
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) {
    throw ConfigError("proportional selection weights must lie in [0, 1]");
  }
  if (kind == CriterionKind::Proportional && !(p1 + p2 > 0.0)) {
    throw ConfigError("proportional selection weights cannot both be zero");
  }
  if (!(decay > 0.0 && decay <= 1.0)) throw ConfigError("proportional decay must be in (0, 1]");
}

std::string_view to_string(SchemaKind kind) {
  switch (kind) {
    case SchemaKind::Static: return "static";
    case SchemaKind::RandomBreakpoint: return "random";
    case SchemaKind::BisectionPerDim: return "bisection_per_dim";
    case SchemaKind::BisectionAllDims: return "bisection_all_dims";
    case SchemaKind::IterativeGrid: return "iterative_grid";
    case SchemaKind::IterativeLargestDim: return "iterative_largest_dim";
  }
  return "static";
}

std::string_view to_string(CriterionKind kind) {
  switch (kind) {
    case CriterionKind::MaxSize: return "max_size";
    case CriterionKind::FewestTests: return "fewest_tests";
    case CriterionKind::NoTestSelfOrNeighbor: return "no_test_self_or_neighbor";
    case CriterionKind::Proportional: return "proportional";
  }
  return "fewest_tests";
}

SchemaKind schema_kind_from_string(std::string_view name) {
  for (auto k : {SchemaKind::Static, SchemaKind::RandomBreakpoint, SchemaKind::BisectionPerDim,
                 SchemaKind::BisectionAllDims, SchemaKind::IterativeGrid,
                 SchemaKind::IterativeLargestDim}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown partition schema '{}'", name));
}

CriterionKind criterion_kind_from_string(std::string_view name) {
  for (auto k : {CriterionKind::MaxSize, CriterionKind::FewestTests,
                 CriterionKind::NoTestSelfOrNeighbor, CriterionKind::Proportional}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown selection criterion '{}'", name));
}

PartitionState::PartitionState(InputDomain domain, PartitionSchema schema)
    : domain_(std::move(domain)), schema_(schema), parts_(domain_.dims(), 1) {
  schema_.validate();
  switch (schema_.kind) {
    case SchemaKind::Static:
      std::fill(parts_.begin(), parts_.end(), schema_.per_dim);
      round_ = 1;
      break;
    case SchemaKind::IterativeGrid:
      round_ = 1;
      break;
    default:
      break;
  }
  rebuild_grid();
}

void PartitionState::rebuild_grid() {
  std::size_t total = 1;
  for (auto p : parts_) total *= p;
  const std::size_t d = domain_.dims();
  cells_.clear();
  cells_.reserve(total);
  std::vector<std::size_t> index(d, 0);
  std::vector<Interval> bounds(d);
  for (std::size_t c = 0; c < total; ++c) {
    for (std::size_t i = 0; i < d; ++i) {
      const auto& b = domain_[i];
      const auto p = static_cast<double>(parts_[i]);
      bounds[i].lo = index[i] == 0 ? b.lo : b.lo + b.width() * static_cast<double>(index[i]) / p;
      bounds[i].hi = index[i] + 1 == parts_[i]
                         ? b.hi
                         : b.lo + b.width() * static_cast<double>(index[i] + 1) / p;
    }
    cells_.push_back(Cell{InputDomain(bounds), 0});
    for (std::size_t i = 0; i < d; ++i) {
      if (++index[i] < parts_[i]) break;
      index[i] = 0;
    }
  }
  for (const auto& tc : history_) {
    if (auto c = cell_of(tc)) ++cells_[*c].count;
  }
}

std::optional<std::size_t> PartitionState::cell_of(const TestCase& tc) const {
  if (schema_.is_grid()) {
    // Direct index arithmetic; verified against containment for edge rounding.
    std::size_t idx = 0;
    std::size_t stride = 1;
    for (std::size_t i = 0; i < domain_.dims(); ++i) {
      const auto& b = domain_[i];
      if (!(tc[i] >= b.lo && tc[i] < b.hi)) return std::nullopt;
      auto k = static_cast<std::size_t>((tc[i] - b.lo) / b.width() * static_cast<double>(parts_[i]));
      k = std::min(k, parts_[i] - 1);
      idx += k * stride;
      stride *= parts_[i];
    }
    if (cells_[idx].box.contains(tc)) return idx;
  }
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].box.contains(tc)) return i;
  }
  return std::nullopt;
}

bool PartitionState::all_occupied() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const Cell& c) { return c.count > 0; });
}

void PartitionState::record(const TestCase& tc) {
  if (!domain_.contains(tc)) throw ConfigError("recorded test case lies outside the domain");
  history_.push_back(tc);
  if (auto c = cell_of(tc)) ++cells_[*c].count;
}

void PartitionState::repartition(const TestCase* latest) {
  const std::size_t d = domain_.dims();
  switch (schema_.kind) {
    case SchemaKind::Static:
      return;
    case SchemaKind::RandomBreakpoint: {
      if (latest == nullptr) return;
      const auto which = cell_of(*latest);
      if (!which) return;
      const InputDomain parent = cells_[*which].box;
      // Split every dimension where the test lies strictly inside the cell.
      std::vector<std::vector<Interval>> pieces(d);
      for (std::size_t i = 0; i < d; ++i) {
        const double x = (*latest)[i];
        if (x > parent[i].lo) {
          pieces[i] = {Interval{parent[i].lo, x}, Interval{x, parent[i].hi}};
        } else {
          pieces[i] = {parent[i]};
        }
      }
      cells_.erase(cells_.begin() + static_cast<std::ptrdiff_t>(*which));
      std::vector<std::size_t> index(d, 0);
      std::vector<Interval> bounds(d);
      while (true) {
        for (std::size_t i = 0; i < d; ++i) bounds[i] = pieces[i][index[i]];
        // The breakpoint test sits on the children's common corner and is
        // not counted inside any of them.
        cells_.push_back(Cell{InputDomain(bounds), 0});
        std::size_t i = 0;
        for (; i < d; ++i) {
          if (++index[i] < pieces[i].size()) break;
          index[i] = 0;
        }
        if (i == d) break;
      }
      ++round_;
      return;
    }
    case SchemaKind::BisectionPerDim:
      parts_[round_ % d] *= 2;
      break;
    case SchemaKind::BisectionAllDims:
      for (auto& p : parts_) p *= 2;
      break;
    case SchemaKind::IterativeGrid:
      for (auto& p : parts_) p = round_ + 1;
      break;
    case SchemaKind::IterativeLargestDim: {
      std::size_t widest = 0;
      double best = -1.0;
      for (std::size_t i = 0; i < d; ++i) {
        const double w = domain_[i].width() / static_cast<double>(parts_[i]);
        if (w > best * (1.0 + 1e-12)) {
          best = w;
          widest = i;
        }
      }
      parts_[widest] += 1;
      break;
    }
  }
  ++round_;
  rebuild_grid();
}

bool PartitionState::neighbors(const InputDomain& a, const InputDomain& b) {
  for (std::size_t i = 0; i < a.dims(); ++i) {
    if (a[i].lo > b[i].hi || b[i].lo > a[i].hi) return false;
  }
  return true;
}

namespace {

std::size_t pick(const std::vector<std::size_t>& options, RngStream& rng) {
  return options.size() == 1 ? options.front() : options[rng.uniform_index(options.size())];
}

}  // namespace

std::optional<Selection> select_subdomain(const PartitionState& state,
                                          const SelectionCriterion& criterion, RngStream& rng) {
  const auto& cells = state.cells();
  std::vector<std::size_t> options;
  switch (criterion.kind) {
    case CriterionKind::MaxSize: {
      double best = 0.0;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].count != 0) continue;
        const double v = cells[i].box.volume();
        if (options.empty() || v > best * (1.0 + 1e-12)) {
          best = v;
          options.assign(1, i);
        } else if (v >= best * (1.0 - 1e-12)) {
          options.push_back(i);
        }
      }
      break;
    }
    case CriterionKind::FewestTests: {
      std::size_t best = std::numeric_limits<std::size_t>::max();
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].count < best) {
          best = cells[i].count;
          options.assign(1, i);
        } else if (cells[i].count == best) {
          options.push_back(i);
        }
      }
      break;
    }
    case CriterionKind::NoTestSelfOrNeighbor: {
      std::vector<std::size_t> occupied;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].count > 0) occupied.push_back(i);
      }
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].count > 0) continue;
        const bool isolated = std::none_of(occupied.begin(), occupied.end(), [&](std::size_t o) {
          return PartitionState::neighbors(cells[i].box, cells[o].box);
        });
        if (isolated) options.push_back(i);
      }
      break;
    }
    case CriterionKind::Proportional: {
      const double center_share = criterion.p2 / (criterion.p1 + criterion.p2);
      Selection sel;
      sel.kind = rng.uniform01() < center_share ? Selection::Kind::CenterRegion
                                                : Selection::Kind::EdgeRegion;
      return sel;
    }
  }
  if (options.empty()) return std::nullopt;
  return Selection{Selection::Kind::Cell, pick(options, rng)};
}

PbsGenerator::PbsGenerator(InputDomain domain, PartitionSchema schema,
                           SelectionCriterion criterion)
    : domain_(domain),
      schema_(schema),
      initial_criterion_(criterion),
      criterion_(criterion),
      state_(std::move(domain), schema) {
  criterion_.validate();
}

void PbsGenerator::reset() {
  state_ = PartitionState(domain_, schema_);
  criterion_ = initial_criterion_;
  last_ = Selection{};
}

TestCase PbsGenerator::draw(const Selection& sel, RngStream& rng) const {
  switch (sel.kind) {
    case Selection::Kind::Cell:
      return uniform_point(state_.cells()[sel.cell].box, rng);
    case Selection::Kind::CenterRegion:
      return uniform_point(metrics::center_region(domain_), rng);
    case Selection::Kind::EdgeRegion: {
      const InputDomain center = metrics::center_region(domain_);
      for (std::uint64_t attempt = 0; attempt < kDefaultRetryBudget; ++attempt) {
        TestCase tc = uniform_point(domain_, rng);
        if (!center.contains(tc)) return tc;
      }
      throw BudgetExceeded("edge region sampling failed", kDefaultRetryBudget);
    }
  }
  return uniform_point(domain_, rng);
}

TestCase PbsGenerator::next(RngStream& rng) {
  TestCase tc;
  if (state_.history().empty()) {
    tc = uniform_point(domain_, rng);
    last_ = Selection{Selection::Kind::Cell, *state_.cell_of(tc)};
  } else {
    std::optional<Selection> sel;
    for (std::size_t attempt = 0; attempt <= kMaxRepartitionsPerTest; ++attempt) {
      sel = select_subdomain(state_, criterion_, rng);
      if (sel) break;
      if (schema_.kind == SchemaKind::Static) {
        // A static grid cannot be refined; fall back to balancing counts.
        sel = select_subdomain(state_, SelectionCriterion{CriterionKind::FewestTests}, rng);
        break;
      }
      const TestCase* latest = &state_.history().back();
      state_.repartition(latest);
    }
    if (!sel) {
      throw BudgetExceeded("no qualifying subdomain after repeated repartitioning",
                           kMaxRepartitionsPerTest);
    }
    last_ = *sel;
    tc = draw(*sel, rng);
  }
  state_.record(tc);

  if (criterion_.kind == CriterionKind::Proportional && last_.kind != Selection::Kind::Cell) {
    double& chosen = last_.kind == Selection::Kind::CenterRegion ? criterion_.p2 : criterion_.p1;
    chosen *= criterion_.decay;
    const double sum = criterion_.p1 + criterion_.p2;
    criterion_.p1 /= sum;
    criterion_.p2 /= sum;
  }
  if (schema_.kind == SchemaKind::RandomBreakpoint) {
    state_.repartition(&tc);
  } else if (schema_.is_grid() && state_.all_occupied()) {
    state_.repartition(&tc);
  }
  return tc;
}

}  // namespace artkit::pbs
