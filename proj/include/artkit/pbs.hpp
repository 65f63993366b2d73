#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "artkit/core.hpp"

// Partitioning-based strategy: split the domain into cells, pick a cell,
// draw the next test uniformly inside it.
namespace artkit::pbs {

enum class SchemaKind {
  Static,               // fixed n^d grid
  RandomBreakpoint,     // split the latest test's cell at the test
  BisectionPerDim,      // halve one dimension per round, cycling dimensions
  BisectionAllDims,     // halve every dimension per round: 2^(i*d) cells
  IterativeGrid,        // rebuild as an i^d grid in round i
  IterativeLargestDim,  // add one cut to the widest cell dimension
};

struct PartitionSchema {
  SchemaKind kind = SchemaKind::BisectionAllDims;
  std::size_t per_dim = 2;  // Static only

  bool is_grid() const { return kind != SchemaKind::RandomBreakpoint; }
  void validate() const;
};

enum class CriterionKind { MaxSize, FewestTests, NoTestSelfOrNeighbor, Proportional };

struct SelectionCriterion {
  CriterionKind kind = CriterionKind::FewestTests;
  // Proportional only: edge (p1) and center (p2) weights. After each
  // failure-free test the chosen region's weight is multiplied by `decay`
  // and both are renormalised.
  double p1 = 0.5;
  double p2 = 0.5;
  double decay = 0.99;

  void validate() const;
};

std::string_view to_string(SchemaKind kind);
std::string_view to_string(CriterionKind kind);
SchemaKind schema_kind_from_string(std::string_view name);
CriterionKind criterion_kind_from_string(std::string_view name);

struct Cell {
  InputDomain box;
  std::size_t count = 0;
};

/// Disjoint cells covering the domain, with per-cell test counts.
class PartitionState {
 public:
  PartitionState(InputDomain domain, PartitionSchema schema);

  const InputDomain& domain() const { return domain_; }
  const PartitionSchema& schema() const { return schema_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const ExecutedSet& history() const { return history_; }
  // Number of partitioning rounds applied; IterativeGrid starts at 1 (1^d).
  std::size_t round() const { return round_; }
  const std::vector<std::size_t>& parts_per_dim() const { return parts_; }

  std::optional<std::size_t> cell_of(const TestCase& tc) const;
  bool all_occupied() const;

  // Add an executed test and update the counts.
  void record(const TestCase& tc);
  // Apply the next partitioning round. RandomBreakpoint splits the cell
  // holding `latest` at its coordinates; other schemas ignore it. Static is a
  // no-op after construction.
  void repartition(const TestCase* latest = nullptr);

  // Cells touch (share a face, edge or corner) or overlap in closure.
  static bool neighbors(const InputDomain& a, const InputDomain& b);

 private:
  void rebuild_grid();

  InputDomain domain_;
  PartitionSchema schema_;
  std::vector<Cell> cells_;
  std::vector<std::size_t> parts_;
  ExecutedSet history_;
  std::size_t round_ = 0;
};

struct Selection {
  enum class Kind { Cell, EdgeRegion, CenterRegion };
  Kind kind = Kind::Cell;
  std::size_t cell = 0;
};

/// Choose where to draw the next test. Returns nullopt when the criterion has
/// no qualifying cell (the caller then repartitions).
std::optional<Selection> select_subdomain(const PartitionState& state,
                                          const SelectionCriterion& criterion, RngStream& rng);

/// Partitioning-based ART generator.
class PbsGenerator final : public Generator {
 public:
  PbsGenerator(InputDomain domain, PartitionSchema schema, SelectionCriterion criterion);

  TestCase next(RngStream& rng) override;
  void reset() override;
  const InputDomain& domain() const override { return state_.domain(); }
  std::string_view name() const override { return "pbs"; }

  const PartitionState& state() const { return state_; }
  const SelectionCriterion& criterion() const { return criterion_; }
  // Cell (or region, for Proportional) the last test was drawn from.
  const Selection& last_selection() const { return last_; }

  static constexpr std::size_t kMaxRepartitionsPerTest = 64;

 private:
  TestCase draw(const Selection& sel, RngStream& rng) const;

  InputDomain domain_;
  PartitionSchema schema_;
  SelectionCriterion initial_criterion_;
  SelectionCriterion criterion_;
  PartitionState state_;
  Selection last_;
};

}  // namespace artkit::pbs
