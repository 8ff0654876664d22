#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace readlevel {

/// Ordered list of feature names. Its hash identifies the column layout a
/// model was trained on.
class FeatureCatalog {
 public:
  FeatureCatalog() = default;
  explicit FeatureCatalog(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// 16 hex digits of FNV-1a over the newline-joined names.
  std::string hash() const;

  void append(std::string_view name);
  void append(std::span<const std::string_view> names, std::string_view prefix = {});
  void append(const FeatureCatalog& other);

  friend bool operator==(const FeatureCatalog&, const FeatureCatalog&) = default;

 private:
  std::vector<std::string> names_;
};

/// A dense feature vector tagged with the hash of the catalog it follows.
struct FeatureVector {
  std::vector<double> values;
  std::string catalog_id;
};

/// Throws DataError naming the first NaN or infinite entry.
void check_finite(std::span<const double> values, const FeatureCatalog& catalog, std::string_view doc_id);

}  // namespace readlevel
