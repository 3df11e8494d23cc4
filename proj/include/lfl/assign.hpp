#pragma once

#include <optional>
#include <vector>

namespace lfl {

// A bucket receives items; it needs at least `req` of them and accepts more only when `star`.
struct Bucket {
  long long req = 0;
  bool star = false;
};

// `count` identical items, each of which may be placed into any bucket in `allowed`.
struct ItemGroup {
  long long count = 0;
  std::vector<int> allowed;
};

// Decides whether every item can be placed so that each bucket ends with exactly `req`
// items, or at least `req` if starred. On success returns per group a list of
// (bucket, amount) placements.
std::optional<std::vector<std::vector<std::pair<int, long long>>>> assign_buckets(
    const std::vector<Bucket>& buckets, const std::vector<ItemGroup>& groups);

bool buckets_feasible(const std::vector<Bucket>& buckets, const std::vector<ItemGroup>& groups);

}  // namespace lfl
