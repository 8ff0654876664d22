#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "readlevel/experiment.hpp"
#include "readlevel/featurizer.hpp"

namespace readlevel {

/// Everything a CLI run needs. Filled from defaults, then a key=value file,
/// then command-line overrides.
struct RunConfig {
  std::filesystem::path train_manifest;
  std::filesystem::path train_dir;  // defaults to the manifest's directory
  std::filesystem::path transfer_manifest;
  std::filesystem::path transfer_dir;
  std::filesystem::path awl;  // defaults to the shipped list
  std::filesystem::path evp;
  std::filesystem::path relations;
  std::filesystem::path reference;  // annotation file of the reference corpus
  FeatureGroups groups;
  ExperimentConfig experiment;

  /// Throws ConfigError: empty group selection, selftrain with ranking,
  /// transfer modes without a transfer corpus, missing train corpus.
  void validate() const;
  /// key/value pairs in a stable order, parseable by apply_setting.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Keys: train, train_dir, transfer, transfer_dir, awl, evp, relations,
/// reference, groups, model, mapper, joint_cutoffs, transfer_mode, C, K,
/// iterations, allowed_levels, seed, folds, epochs, tolerance, max_pairs,
/// same_domain_only, lm_inside_folds, threads. Relative paths are resolved
/// against `base_dir`.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir = {});

/// Lines "key = value"; '#' starts a comment.
void read_config(std::istream& in, const std::string& source_name, RunConfig& config,
                 const std::filesystem::path& base_dir);

/// Defaults, then `file` when non-empty, then each "key=value" override.
RunConfig load_config(const std::filesystem::path& file, std::span<const std::string> overrides);

/// The shipped Academic Word List, if it can be found.
std::filesystem::path default_awl_path();

/// Loads lexicons and trains the reference LMs the feature groups need.
Resources load_resources(const RunConfig& config);

}  // namespace readlevel
