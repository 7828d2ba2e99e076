#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cmfmts {

enum class FeatureRange { AllReals, NonnegReals, UnitInterval, NonnegInteger };

/// Whether a feature belongs to the core measure set or to the extended
/// completion set that rounds the default catalog out to 41 entries.
enum class FeatureTier { Core, Extended };

struct FeatureDescriptor {
  std::string name;
  FeatureRange range;
  std::size_t min_length; // channels shorter than this always yield NA
  FeatureTier tier;
  std::string formula; // one-line definition for the generated reference doc
};

class FeatureCatalog {
public:
  explicit FeatureCatalog(std::vector<FeatureDescriptor> descriptors);

  const std::vector<FeatureDescriptor>& descriptors() const { return descriptors_; }
  std::size_t size() const { return descriptors_.size(); }
  const FeatureDescriptor& at(std::size_t i) const { return descriptors_[i]; }

  /// Index of a feature name, or npos.
  std::size_t index_of(const std::string& name) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<std::string> names() const;

  /// FNV-1a over the ordered feature names, hex encoded; recorded in run
  /// manifests so results can be matched to the catalog that produced them.
  std::string hash() const;

  /// Markdown reference: name, formula, range, minimum length, tier.
  std::string reference_doc() const;

private:
  std::vector<FeatureDescriptor> descriptors_;
};

/// The default 41-feature catalog.
const FeatureCatalog& default_catalog();

/// Builds a catalog from a comma-separated selection ("all" or names in the
/// requested order). Throws input_error on unknown or duplicate names.
FeatureCatalog catalog_from_selection(const std::string& selection);

const char* feature_range_name(FeatureRange r);

} // namespace cmfmts
