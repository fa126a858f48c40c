#include "wfc/bdd.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <sstream>

namespace wfc {

Rational rational_from_decimal(std::string_view text) {
  const std::string s(text);
  bool negative = false;
  std::size_t pos = 0;
  if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) negative = s[pos++] == '-';
  BigInt num = 0, den = 1;
  bool seen_digit = false, seen_dot = false;
  for (; pos < s.size(); ++pos) {
    const char c = s[pos];
    if (c == '.') {
      if (seen_dot) throw Error("malformed weight literal: " + s);
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      num = num * 10 + (c - '0');
      if (seen_dot) den *= 10;
      seen_digit = true;
    } else {
      throw Error("malformed weight literal: " + s);
    }
  }
  if (!seen_digit) throw Error("malformed weight literal: " + s);
  if (negative) num = -num;
  return Rational(num, den);
}

double rational_to_double(const Rational& q) {
  return q.numerator().convert_to<double>() / q.denominator().convert_to<double>();
}

void WeightFunction::set(const std::string& atom, double w_true, double w_false) {
  if (!(w_true >= 0.0) || !(w_false >= 0.0) || !std::isfinite(w_true) || !std::isfinite(w_false))
    throw Error("weights for " + atom + " must be finite and nonnegative");
  std::ostringstream t, f;
  t.precision(17);
  f.precision(17);
  t << w_true;
  f << w_false;
  weights_[atom] =
      Entry{w_true, w_false, rational_from_decimal(t.str()), rational_from_decimal(f.str())};
}

void WeightFunction::set_exact(const std::string& atom, std::string_view w_true,
                               std::string_view w_false) {
  Rational qt = rational_from_decimal(w_true);
  Rational qf = rational_from_decimal(w_false);
  if (qt < Rational(0) || qf < Rational(0))
    throw Error("weights for " + atom + " must be nonnegative");
  weights_[atom] = Entry{rational_to_double(qt), rational_to_double(qf), qt, qf};
}

std::pair<double, double> WeightFunction::get(const std::string& atom) const {
  auto it = weights_.find(atom);
  if (it == weights_.end()) throw Error("missing weight entry for atom " + atom);
  return {it->second.w_true, it->second.w_false};
}

std::pair<Rational, Rational> WeightFunction::get_exact(const std::string& atom) const {
  auto it = weights_.find(atom);
  if (it == weights_.end()) throw Error("missing weight entry for atom " + atom);
  return {it->second.q_true, it->second.q_false};
}

std::vector<std::string> WeightFunction::atom_names() const {
  std::vector<std::string> names;
  names.reserve(weights_.size());
  for (const auto& [k, v] : weights_) names.push_back(k);
  std::sort(names.begin(), names.end());
  return names;
}

WeightFunction WeightFunction::parse_file(std::istream& in) {
  WeightFunction w;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string atom, t, f;
    if (!(ls >> atom)) continue;
    if (!(ls >> t >> f))
      throw Error("weight file line " + std::to_string(lineno) + ": expected `atom w_true w_false`");
    std::string extra;
    if (ls >> extra)
      throw Error("weight file line " + std::to_string(lineno) + ": trailing tokens");
    if (w.has(atom)) throw Error("weight file: duplicate entry for " + atom);
    w.set_exact(atom, t, f);
  }
  return w;
}

WeightFunction WeightFunction::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open weight file: " + path);
  return parse_file(in);
}

std::vector<std::string> WeightFunction::complete_for(const std::vector<std::string>& atoms,
                                                      bool fill_missing) {
  std::vector<std::string> missing;
  for (const auto& a : atoms)
    if (!has(a)) missing.push_back(a);
  if (missing.empty()) return missing;
  if (!fill_missing) {
    std::string msg = "missing weight entries for:";
    for (const auto& a : missing) msg += " " + a;
    throw Error(msg);
  }
  for (const auto& a : missing) set_exact(a, "1", "1");
  return missing;
}

std::size_t BddManager::TripleHash::operator()(
    const std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>& t) const {
  std::size_t seed = std::get<0>(t);
  seed ^= std::get<1>(t) + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
  seed ^= std::get<2>(t) + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
  return seed;
}

std::size_t BddManager::OpKeyHash::operator()(
    const std::tuple<std::uint8_t, std::uint32_t, std::uint32_t>& t) const {
  std::size_t seed = std::get<0>(t);
  seed ^= std::get<1>(t) + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
  seed ^= std::get<2>(t) + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
  return seed;
}

BddManager::BddManager(std::vector<std::string> variable_order) : order_(std::move(variable_order)) {
  for (std::uint32_t i = 0; i < order_.size(); ++i) {
    if (level_index_.contains(order_[i])) throw Error("duplicate variable in order: " + order_[i]);
    level_index_.emplace(order_[i], i);
  }
  const auto terminal_level = static_cast<std::uint32_t>(order_.size());
  nodes_.push_back(Node{terminal_level, BddRef(0), BddRef(0)});
  nodes_.push_back(Node{terminal_level, BddRef(1), BddRef(1)});
  zero_ = BddRef(0);
  one_ = BddRef(1);
}

BddManager BddManager::for_params(const Alphabet& alphabet, VarOrder order) {
  std::vector<std::string> names;
  names.reserve(alphabet.params().size());
  for (AtomId a : alphabet.params()) names.push_back(alphabet.name(a));
  if (order == VarOrder::lexicographic) std::sort(names.begin(), names.end());
  return BddManager(std::move(names));
}

std::optional<std::uint32_t> BddManager::level_of(std::string_view name) const {
  auto it = level_index_.find(std::string(name));
  if (it == level_index_.end()) return std::nullopt;
  return it->second;
}

BddRef BddManager::make(std::uint32_t level, BddRef lo, BddRef hi) {
  if (lo == hi) return lo;
  assert(this->level(lo) > level && this->level(hi) > level);
  const auto key = std::make_tuple(level, lo.index(), hi.index());
  if (auto it = unique_.find(key); it != unique_.end()) return it->second;
  const BddRef ref(static_cast<std::uint32_t>(nodes_.size()));
  nodes_.push_back(Node{level, lo, hi});
  unique_.emplace(key, ref);
  return ref;
}

BddRef BddManager::var(std::uint32_t level) {
  if (level >= order_.size()) throw Error("variable level out of range");
  return make(level, zero_, one_);
}

BddRef BddManager::apply(BddOp op, BddRef a, BddRef b) {
  assert(a.valid() && b.valid() && a.index() < nodes_.size() && b.index() < nodes_.size());
  switch (op) {
    case BddOp::And:
      if (a == zero_ || b == zero_) return zero_;
      if (a == one_) return b;
      if (b == one_) return a;
      if (a == b) return a;
      break;
    case BddOp::Or:
      if (a == one_ || b == one_) return one_;
      if (a == zero_) return b;
      if (b == zero_) return a;
      if (a == b) return a;
      break;
    case BddOp::Xor:
      if (a == b) return zero_;
      if (a == zero_) return b;
      if (b == zero_) return a;
      break;
  }
  // commutative: normalize the cache key
  if (b.index() < a.index()) std::swap(a, b);
  const auto key = std::make_tuple(static_cast<std::uint8_t>(op), a.index(), b.index());
  if (auto it = op_cache_.find(key); it != op_cache_.end()) return it->second;

  const std::uint32_t la = level(a), lb = level(b);
  const std::uint32_t top = std::min(la, lb);
  const BddRef a_lo = la == top ? nodes_[a.index()].lo : a;
  const BddRef a_hi = la == top ? nodes_[a.index()].hi : a;
  const BddRef b_lo = lb == top ? nodes_[b.index()].lo : b;
  const BddRef b_hi = lb == top ? nodes_[b.index()].hi : b;
  const BddRef lo = apply(op, a_lo, b_lo);
  const BddRef hi = apply(op, a_hi, b_hi);
  const BddRef res = make(top, lo, hi);
  op_cache_.emplace(key, res);
  return res;
}

BddRef BddManager::from_formula(const FormulaStore& store, FormulaRef x) {
  assert(x.valid());
  // Children precede parents in the store, so a forward pass suffices. The
  // memo is per call: the same manager may serve several stores.
  std::vector<BddRef> memo(x.index() + 1);
  std::vector<char> needed(x.index() + 1, 0);
  needed[x.index()] = 1;
  for (std::uint32_t i = x.index() + 1; i-- > 0;) {
    if (!needed[i]) continue;
    for (auto c : store.node_at(i).children) needed[c.index()] = 1;
  }
  for (std::uint32_t i = 0; i <= x.index(); ++i) {
    if (!needed[i]) continue;
    const FormulaNode& n = store.node_at(i);
    switch (n.kind) {
      case NodeKind::False:
        memo[i] = zero_;
        break;
      case NodeKind::True:
        memo[i] = one_;
        break;
      case NodeKind::Var: {
        auto lvl = level_of(store.alphabet().name(n.var));
        if (!lvl)
          throw Error("atom " + store.alphabet().name(n.var) +
                      " is not in the manager's variable order");
        memo[i] = var(*lvl);
        break;
      }
      case NodeKind::Not:
        memo[i] = negate(memo[n.children.front().index()]);
        break;
      case NodeKind::And: {
        BddRef acc = one_;
        for (auto c : n.children) acc = apply(BddOp::And, acc, memo[c.index()]);
        memo[i] = acc;
        break;
      }
      case NodeKind::Or: {
        BddRef acc = zero_;
        for (auto c : n.children) acc = apply(BddOp::Or, acc, memo[c.index()]);
        memo[i] = acc;
        break;
      }
    }
  }
  return memo[x.index()];
}

FormulaRef BddManager::to_formula(BddRef a, FormulaStore& store) const {
  std::unordered_map<std::uint32_t, FormulaRef> memo;
  auto rec = [&](auto&& self, BddRef r) -> FormulaRef {
    if (r == zero_) return store.mk_false();
    if (r == one_) return store.mk_true();
    if (auto it = memo.find(r.index()); it != memo.end()) return it->second;
    const Node& n = nodes_[r.index()];
    const AtomId atom = store.alphabet().require(order_[n.level]);
    const FormulaRef v = store.mk_atom_var(atom);
    const FormulaRef lo = self(self, n.lo);
    const FormulaRef hi = self(self, n.hi);
    const FormulaRef res =
        store.mk_or({store.mk_and({v, hi}), store.mk_and({store.mk_not(v), lo})});
    memo.emplace(r.index(), res);
    return res;
  };
  return rec(rec, a);
}

std::uint64_t BddManager::count_models(BddRef a) const {
  if (order_.size() > 62) throw Error("count_models supports at most 62 variables");
  std::unordered_map<std::uint32_t, std::uint64_t> memo;
  // counts assignments of the variables strictly below a node's level
  auto rec = [&](auto&& self, BddRef r) -> std::uint64_t {
    if (r == zero_) return 0;
    if (r == one_) return 1;
    if (auto it = memo.find(r.index()); it != memo.end()) return it->second;
    const Node& n = nodes_[r.index()];
    const std::uint64_t lo = self(self, n.lo) << (level(n.lo) - n.level - 1);
    const std::uint64_t hi = self(self, n.hi) << (level(n.hi) - n.level - 1);
    const std::uint64_t res = lo + hi;
    memo.emplace(r.index(), res);
    return res;
  };
  return rec(rec, a) << level(a);
}

namespace {

// Neumaier-compensated two-term addition.
struct CompensatedSum {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace

double BddManager::wmc(BddRef a, const WeightFunction& weights) const {
  std::vector<double> wt(order_.size()), wf(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i)
    std::tie(wt[i], wf[i]) = weights.get(order_[i]);
  // product of (w_true + w_false) over levels [from, to)
  auto gap = [&](std::uint32_t from, std::uint32_t to) {
    double g = 1.0;
    for (std::uint32_t l = from; l < to; ++l) {
      CompensatedSum s;
      s.add(wt[l]);
      s.add(wf[l]);
      g *= s.value();
    }
    return g;
  };
  std::unordered_map<std::uint32_t, double> memo;
  auto rec = [&](auto&& self, BddRef r) -> double {
    if (r == zero_) return 0.0;
    if (r == one_) return 1.0;
    if (auto it = memo.find(r.index()); it != memo.end()) return it->second;
    const Node& n = nodes_[r.index()];
    const double lo = wf[n.level] * gap(n.level + 1, level(n.lo)) * self(self, n.lo);
    const double hi = wt[n.level] * gap(n.level + 1, level(n.hi)) * self(self, n.hi);
    CompensatedSum s;
    s.add(lo);
    s.add(hi);
    const double res = s.value();
    memo.emplace(r.index(), res);
    return res;
  };
  return gap(0, level(a)) * rec(rec, a);
}

Rational BddManager::wmc_exact(BddRef a, const WeightFunction& weights) const {
  std::vector<Rational> wt(order_.size()), wf(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i)
    std::tie(wt[i], wf[i]) = weights.get_exact(order_[i]);
  auto gap = [&](std::uint32_t from, std::uint32_t to) {
    Rational g(1);
    for (std::uint32_t l = from; l < to; ++l) g *= wt[l] + wf[l];
    return g;
  };
  std::unordered_map<std::uint32_t, Rational> memo;
  auto rec = [&](auto&& self, BddRef r) -> Rational {
    if (r == zero_) return Rational(0);
    if (r == one_) return Rational(1);
    if (auto it = memo.find(r.index()); it != memo.end()) return it->second;
    const Node& n = nodes_[r.index()];
    Rational res = wf[n.level] * gap(n.level + 1, level(n.lo)) * self(self, n.lo) +
                   wt[n.level] * gap(n.level + 1, level(n.hi)) * self(self, n.hi);
    memo.emplace(r.index(), res);
    return res;
  };
  return gap(0, level(a)) * rec(rec, a);
}

std::vector<DynBitset> BddManager::enumerate_models(BddRef a, std::size_t limit) const {
  std::vector<DynBitset> out;
  if (limit == 0) return out;
  DynBitset current(order_.size());
  // Assign variables level by level, low value first: lexicographic order
  // with false < true over the full variable list.
  auto rec = [&](auto&& self, BddRef r, std::uint32_t lvl) -> bool {
    if (r == zero_) return true;
    if (lvl == order_.size()) {
      out.push_back(current);
      return out.size() < limit;
    }
    const Node& n = nodes_[r.index()];
    const BddRef lo = n.level == lvl ? n.lo : r;
    const BddRef hi = n.level == lvl ? n.hi : r;
    current.set(lvl, false);
    if (!self(self, lo, lvl + 1)) return false;
    current.set(lvl, true);
    const bool more = self(self, hi, lvl + 1);
    current.set(lvl, false);
    return more;
  };
  rec(rec, a, 0);
  return out;
}

std::optional<DynBitset> BddManager::any_model(BddRef a) const {
  auto models = enumerate_models(a, 1);
  if (models.empty()) return std::nullopt;
  return models.front();
}

bool BddManager::eval(BddRef a, const DynBitset& assignment) const {
  BddRef r = a;
  while (r != zero_ && r != one_) {
    const Node& n = nodes_[r.index()];
    r = assignment.test(n.level) ? n.hi : n.lo;
  }
  return r == one_;
}

std::size_t BddManager::reachable_count(BddRef a) const {
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<std::uint32_t> stack = {a.index()};
  std::size_t count = 0;
  seen[a.index()] = 1;
  while (!stack.empty()) {
    const std::uint32_t i = stack.back();
    stack.pop_back();
    ++count;
    if (i <= 1) continue;
    for (BddRef c : {nodes_[i].lo, nodes_[i].hi})
      if (!seen[c.index()]) {
        seen[c.index()] = 1;
        stack.push_back(c.index());
      }
  }
  return count;
}

}  // namespace wfc
