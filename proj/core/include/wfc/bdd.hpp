#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wfc/alphabet.hpp"
#include "wfc/bitset.hpp"
#include "wfc/formula.hpp"

namespace wfc {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

// Parses a decimal literal such as "0.25" or "3" into an exact rational.
Rational rational_from_decimal(std::string_view text);
double rational_to_double(const Rational& q);

// Per-atom weight pair. Doubles drive the floating-point counting path; the
// exact rationals preserve the literal decimal input for the rational path.
class WeightFunction {
public:
  void set(const std::string& atom, double w_true, double w_false);
  void set_exact(const std::string& atom, std::string_view w_true, std::string_view w_false);

  bool has(const std::string& atom) const { return weights_.contains(atom); }
  std::pair<double, double> get(const std::string& atom) const;
  std::pair<Rational, Rational> get_exact(const std::string& atom) const;

  std::size_t size() const { return weights_.size(); }
  std::vector<std::string> atom_names() const;

  // One `atom w_true w_false` entry per line, '#' starts a comment.
  static WeightFunction parse_file(std::istream& in);
  static WeightFunction parse_file(const std::string& path);

  // Checks coverage of the given atoms. Missing atoms throw unless
  // fill_missing is set, in which case they default to (1,1) and are
  // reported back so callers can warn.
  std::vector<std::string> complete_for(const std::vector<std::string>& atoms, bool fill_missing);

private:
  struct Entry {
    double w_true, w_false;
    Rational q_true, q_false;
  };
  std::unordered_map<std::string, Entry> weights_;
};

class BddRef {
public:
  constexpr BddRef() = default;
  std::uint32_t index() const { return index_; }
  bool valid() const { return index_ != invalid_index; }
  friend auto operator<=>(BddRef, BddRef) = default;

private:
  friend class BddManager;
  static constexpr std::uint32_t invalid_index = std::numeric_limits<std::uint32_t>::max();
  explicit constexpr BddRef(std::uint32_t index) : index_(index) {}
  std::uint32_t index_ = invalid_index;
};

enum class BddOp : std::uint8_t { And, Or, Xor };

enum class VarOrder : std::uint8_t { first_mention, lexicographic };

// Reduced ordered BDD engine. Variables are named; the order is fixed at
// construction. Canonicity is by (var, low, high) uniqueness, no complement
// edges. A manager must not be driven from two threads at once, but read-only
// use (eval, counting on a finished diagram) is safe to share.
class BddManager {
public:
  explicit BddManager(std::vector<std::string> variable_order);

  // Variable order over the parameter atoms of the alphabet: their
  // first-mention order in the program text, or sorted by name.
  static BddManager for_params(const Alphabet& alphabet,
                               VarOrder order = VarOrder::first_mention);

  std::size_t var_count() const { return order_.size(); }
  const std::vector<std::string>& variables() const { return order_; }
  std::optional<std::uint32_t> level_of(std::string_view name) const;

  BddRef constant(bool value) const { return value ? one_ : zero_; }
  BddRef one() const { return one_; }
  BddRef zero() const { return zero_; }
  BddRef var(std::uint32_t level);

  BddRef apply(BddOp op, BddRef a, BddRef b);
  BddRef negate(BddRef a) { return apply(BddOp::Xor, a, one_); }
  bool equivalent(BddRef a, BddRef b) const { return a == b; }

  // Canonical BDD of a stored circuit; atoms are matched to manager
  // variables by name. Throws if a mentioned atom is not in the order.
  BddRef from_formula(const FormulaStore& store, FormulaRef x);

  // Rebuilds a small circuit from the diagram, e.g. to canonicalize a
  // compiled formula.
  FormulaRef to_formula(BddRef a, FormulaStore& store) const;

  std::uint64_t count_models(BddRef a) const;
  double wmc(BddRef a, const WeightFunction& weights) const;
  Rational wmc_exact(BddRef a, const WeightFunction& weights) const;

  // Up to `limit` total assignments in lexicographic variable order; bit i of
  // an assignment is the value of variable level i.
  std::vector<DynBitset> enumerate_models(BddRef a, std::size_t limit) const;
  std::optional<DynBitset> any_model(BddRef a) const;

  bool eval(BddRef a, const DynBitset& assignment) const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t reachable_count(BddRef a) const;

  BddManager(const BddManager&) = delete;
  BddManager& operator=(const BddManager&) = delete;
  BddManager(BddManager&&) = default;
  BddManager& operator=(BddManager&&) = default;

private:
  struct Node {
    std::uint32_t level;
    BddRef lo, hi;
  };
  struct TripleHash {
    std::size_t operator()(const std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>& t) const;
  };
  struct OpKeyHash {
    std::size_t operator()(const std::tuple<std::uint8_t, std::uint32_t, std::uint32_t>& t) const;
  };

  BddRef make(std::uint32_t level, BddRef lo, BddRef hi);
  std::uint32_t level(BddRef r) const { return nodes_[r.index()].level; }

  std::vector<std::string> order_;
  std::unordered_map<std::string, std::uint32_t> level_index_;
  std::vector<Node> nodes_;
  BddRef zero_, one_;
  std::unordered_map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, BddRef, TripleHash>
      unique_;
  std::unordered_map<std::tuple<std::uint8_t, std::uint32_t, std::uint32_t>, BddRef, OpKeyHash>
      op_cache_;
};

}  // namespace wfc
