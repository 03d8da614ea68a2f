#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace autoner {

// Token-level prefix trie. Node 0 is the root; each node may carry a payload.
template <typename Payload>
class TokenTrie {
 public:
  TokenTrie() : nodes_(1) {}

  Payload& insert(std::span<const std::string> tokens) {
    std::uint32_t node = 0;
    for (const auto& tok : tokens) {
      auto it = nodes_[node].children.find(tok);
      if (it == nodes_[node].children.end()) {
        const auto next = static_cast<std::uint32_t>(nodes_.size());
        nodes_[node].children.emplace(tok, next);
        nodes_.emplace_back();
        node = next;
      } else {
        node = it->second;
      }
    }
    if (tokens.size() > max_depth_) max_depth_ = tokens.size();
    auto& slot = nodes_[node].payload;
    if (!slot) slot.emplace();
    return *slot;
  }

  const Payload* find(std::span<const std::string> tokens) const {
    std::uint32_t node = 0;
    for (const auto& tok : tokens) {
      auto it = nodes_[node].children.find(tok);
      if (it == nodes_[node].children.end()) return nullptr;
      node = it->second;
    }
    return nodes_[node].payload ? &*nodes_[node].payload : nullptr;
  }

  /// Calls fn(end, payload) for every stored sequence equal to
  /// tokens[start, end). Walks at most max_depth() tokens.
  template <typename Fn>
  void for_each_prefix_match(std::span<const std::string> tokens, std::size_t start, Fn&& fn) const {
    std::uint32_t node = 0;
    for (std::size_t end = start; end < tokens.size(); ++end) {
      auto it = nodes_[node].children.find(tokens[end]);
      if (it == nodes_[node].children.end()) return;
      node = it->second;
      if (nodes_[node].payload) fn(end + 1, *nodes_[node].payload);
    }
  }

  std::size_t max_depth() const { return max_depth_; }

 private:
  struct Node {
    std::unordered_map<std::string, std::uint32_t> children;
    std::optional<Payload> payload;
  };
  std::vector<Node> nodes_;
  std::size_t max_depth_ = 0;
};

}  // namespace autoner
