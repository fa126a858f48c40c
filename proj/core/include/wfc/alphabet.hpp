#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wfc/errors.hpp"

namespace wfc {

using AtomId = std::uint32_t;

// Symbol table of ground atoms with the parameter/defined partition. Atom ids
// are dense and assigned in first-mention order, which also fixes the default
// variable order of the decision-diagram backend.
class Alphabet {
public:
  AtomId add(std::string name, bool defined) {
    if (auto it = index_.find(name); it != index_.end()) {
      if (is_defined_[it->second] != defined)
        throw Error("atom " + name + " added with conflicting partition");
      return it->second;
    }
    const AtomId id = static_cast<AtomId>(names_.size());
    index_.emplace(name, id);
    names_.push_back(std::move(name));
    is_defined_.push_back(defined);
    if (defined) {
      partition_index_.push_back(static_cast<std::uint32_t>(defined_.size()));
      defined_.push_back(id);
    } else {
      partition_index_.push_back(static_cast<std::uint32_t>(params_.size()));
      params_.push_back(id);
    }
    return id;
  }

  std::optional<AtomId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  AtomId require(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw Error("unknown atom: " + std::string(name));
  }

  std::size_t size() const { return names_.size(); }
  bool valid(AtomId id) const { return id < names_.size(); }

  const std::string& name(AtomId id) const { return names_.at(id); }
  bool is_defined(AtomId id) const { return is_defined_.at(id); }
  bool is_param(AtomId id) const { return !is_defined_.at(id); }

  const std::vector<AtomId>& params() const { return params_; }
  const std::vector<AtomId>& defined() const { return defined_; }

  // Index of an atom within its partition class (params() or defined()).
  std::uint32_t partition_index(AtomId id) const { return partition_index_.at(id); }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.names_ == b.names_ && a.is_defined_ == b.is_defined_;
  }

private:
  std::vector<std::string> names_;
  std::vector<bool> is_defined_;
  std::vector<std::uint32_t> partition_index_;
  std::vector<AtomId> params_;
  std::vector<AtomId> defined_;
  std::unordered_map<std::string, AtomId> index_;
};

}  // namespace wfc
