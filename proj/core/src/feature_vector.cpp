#include "readlevel/feature_vector.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "readlevel/error.hpp"

namespace readlevel {

FeatureCatalog::FeatureCatalog(std::vector<std::string> names) : names_(std::move(names)) {}

std::optional<std::size_t> FeatureCatalog::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::string FeatureCatalog::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const auto& n : names_) {
    for (char c : n) mix(static_cast<unsigned char>(c));
    mix('\n');
  }
  return fmt::format("{:016x}", h);
}

void FeatureCatalog::append(std::string_view name) { names_.emplace_back(name); }

void FeatureCatalog::append(std::span<const std::string_view> names, std::string_view prefix) {
  for (auto n : names) names_.push_back(fmt::format("{}{}", prefix, n));
}

void FeatureCatalog::append(const FeatureCatalog& other) {
  names_.insert(names_.end(), other.names_.begin(), other.names_.end());
}

void check_finite(std::span<const double> values, const FeatureCatalog& catalog, std::string_view doc_id) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      const std::string name = i < catalog.size() ? catalog.name(i) : fmt::format("#{}", i);
      throw DataError(fmt::format("document '{}': feature '{}' is not finite", doc_id, name));
    }
  }
}

}  // namespace readlevel
