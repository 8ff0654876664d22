#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "readlevel/learn.hpp"

namespace readlevel {

enum class MapperVariant { LinearReg, PolyReg4, CutoffBoundaries, Logistic1D, LinearSVM1D };

/// Names: linear, poly4, cutoff, logistic, svm.
MapperVariant parse_mapper_variant(std::string_view s);
std::string_view mapper_variant_name(MapperVariant v);

struct MapperOptions {
  /// Cutoffs: optimise all thresholds jointly instead of one adjacent level
  /// pair at a time.
  bool joint_cutoffs = false;
  SvmParams svm;
  LogisticParams logistic;
};

/// Maps a one-dimensional ranking score to a level.
struct LevelMapper {
  MapperVariant variant = MapperVariant::LinearReg;
  /// Regression coefficients in increasing power order.
  std::vector<double> coefficients;
  /// Cutoffs: ascending thresholds; level = lowest_level + #{t <= score}.
  std::vector<double> thresholds;
  int lowest_level = kMinLevel;
  LogisticModel logistic;
  /// LinearSVM1D: one binary model per pair of levels, combined by voting.
  std::vector<ClassifierModel> svm;

  friend bool operator==(const LevelMapper&, const LevelMapper&) = default;
};

/// Cutoffs need every level between the lowest and highest label present;
/// a gap is a DataError, as are fewer than two levels.
LevelMapper fit_mapper(std::span<const double> scores, std::span<const int> y, MapperVariant variant,
                       const MapperOptions& options = {});

/// Always in [1, 5]. A score equal to a threshold gets the higher level.
int map_score(const LevelMapper& mapper, double score);
std::vector<int> map_scores(const LevelMapper& mapper, std::span<const double> scores);

/// Round half away from zero, clamp to [1, 5].
int round_and_clamp(double v);

/// Number of training instances a threshold vector classifies correctly.
std::size_t cutoff_hits(std::span<const double> scores, std::span<const int> y, std::span<const double> thresholds,
                        int lowest_level);

}  // namespace readlevel
