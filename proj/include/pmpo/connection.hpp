#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pmpo/graphs.hpp"
#include "pmpo/linalg.hpp"

namespace pmpo {

/// Corner positions of a cell.  The numbering matches the layers of the
/// original square: x in V0, z in V1, w in V2, y in V3.
enum Corner : int { corner_x = 0, corner_z = 1, corner_w = 2, corner_y = 3 };

/// A cell: left l: x->z, top t: x->y, right r: y->w, bottom b: z->w.
struct Cell {
  std::size_t left = 0;
  std::size_t top = 0;
  std::size_t right = 0;
  std::size_t bottom = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct CellValue {
  Cell cell;
  cplx value;
};

/// Four graphs around a square, per-corner weights and a sparse table of
/// cell values.  Immutable once built.
class Connection {
 public:
  Connection() = default;
  /// Throws InputError if the graphs do not close up around the square or a
  /// cell is not a valid cell.  Exact zeros are dropped; repeated cells are an error.
  Connection(LayeredGraph top, LayeredGraph left, LayeredGraph bottom, LayeredGraph right,
             std::array<std::vector<double>, 4> mu, std::vector<CellValue> cells, double gamma1 = 0.0,
             double gamma2 = 0.0, std::size_t base = 0);

  const LayeredGraph& top() const { return top_; }
  const LayeredGraph& left() const { return left_; }
  const LayeredGraph& bottom() const { return bottom_; }
  const LayeredGraph& right() const { return right_; }

  const std::vector<std::string>& vertices(Corner c) const;
  const std::vector<double>& mu(Corner c) const { return mu_[c]; }
  const std::array<std::vector<double>, 4>& mu() const { return mu_; }
  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  std::size_t base() const { return base_; }

  bool is_cell(const Cell& c) const;
  /// Value of a valid cell (0 when absent).  Throws InputError on an invalid cell.
  cplx value(const Cell& c) const;
  /// Lookup without the validity check.
  cplx value_or_zero(std::size_t l, std::size_t t, std::size_t r, std::size_t b) const;

  /// sqrt(mu_x mu_w / (mu_y mu_z)) for the corners of `c`.
  double renormalization_factor(const Cell& c) const;

  const std::vector<CellValue>& cells() const { return cells_; }
  /// Indices into cells() of the stored cells with the given left and top edges.
  std::span<const std::size_t> cells_at_left_top(std::size_t l, std::size_t t) const;
  /// Indices into cells() of the stored cells with the given top and bottom edges.
  std::span<const std::size_t> cells_at_top_bottom(std::size_t t, std::size_t b) const;

  /// Same connection with every weight multiplied by `factor`.
  Connection rescaled(double factor) const;

 private:
  static std::uint64_t key(std::size_t a, std::size_t b) { return (std::uint64_t{a} << 32) | b; }

  LayeredGraph top_, left_, bottom_, right_;
  std::array<std::vector<double>, 4> mu_;
  double gamma1_ = 0.0;
  double gamma2_ = 0.0;
  std::size_t base_ = 0;
  std::vector<CellValue> cells_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_left_top_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_top_bottom_;
};

/// Evaluation of a cell drawn with some of its edges traversed backwards.
/// Reversing both horizontal edges conjugates the value; reversing both
/// vertical edges multiplies by the renormalization factor.
struct OrientedCellQuery {
  Cell cell;
  std::array<bool, 4> reversed{};  // left, top, right, bottom
};

cplx extended_value(const Connection& c, const OrientedCellQuery& q);

enum class Renormalization { prime, bar, bar_prime };

Connection renormalize(const Connection& c, Renormalization kind);

struct UnitarityReport {
  bool dimensions_match = true;
  double residual_left = 0.0;   // max |U U^* - I|
  double residual_right = 0.0;  // max |U^* U - I|
  double tolerance = 0.0;
  bool passed = false;
  std::vector<std::string> issues;

  double residual() const { return std::max(residual_left, residual_right); }
};

UnitarityReport check_unitarity(const Connection& c, double tol = 1e-9);

struct BiunitarityReport {
  UnitarityReport original;
  UnitarityReport renormalized;
  bool passed = false;

  double residual() const { return std::max(original.residual(), renormalized.residual()); }
};

BiunitarityReport check_biunitarity(const Connection& c, double tol = 1e-9);

/// `top` stacked on `bottom`; vertical edges are composable pairs "(a,b)".
Connection vertical_product(const Connection& top, const Connection& bottom);

/// `leftc` next to `rightc`; horizontal edges are composable pairs "(a,b)".
Connection horizontal_product(const Connection& leftc, const Connection& rightc);

/// Top and bottom graphs coincide (a-type connection).
bool is_a_type(const Connection& c);

/// Dense matrix of values for fixed top and bottom edges:
/// rows = right edges of the top edge's range, columns = left edges from its source.
CMatrix cell_block(const Connection& c, std::size_t top, std::size_t bottom);

}  // namespace pmpo
