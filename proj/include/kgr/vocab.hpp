#pragma once
// Insertion-ordered string <-> dense id dictionary. Id assignment is fully
// determined by the order of add() calls, which keeps artifacts reproducible.

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgr/types.hpp"

namespace kgr {

class Vocab {
public:
    std::uint32_t get_or_add(std::string_view name) {
        auto it = ids_.find(std::string(name));
        if (it != ids_.end()) return it->second;
        auto id = static_cast<std::uint32_t>(names_.size());
        names_.emplace_back(name);
        ids_.emplace(names_.back(), id);
        return id;
    }

    // kInvalidId when the name is unknown.
    std::uint32_t find(std::string_view name) const {
        auto it = ids_.find(std::string(name));
        return it == ids_.end() ? kInvalidId : it->second;
    }

    const std::string& name(std::uint32_t id) const { return names_[id]; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(names_.size()); }
    bool empty() const { return names_.empty(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

}  // namespace kgr
