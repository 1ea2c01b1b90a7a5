#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace glmdisc {

enum class FeatureKind { Continuous, Categorical };

const char* to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& s);

/// Column layout of a dataset. Features keep the order in which the
/// schema declares them; `categorical_levels[j]` is empty for continuous
/// features and lists the level labels (index = code) for categorical ones.
struct Schema {
  std::vector<std::string> feature_names;
  std::vector<FeatureKind> kinds;
  std::string target_name;
  std::vector<std::vector<std::string>> categorical_levels;

  std::size_t num_features() const { return feature_names.size(); }
  std::size_t num_levels(std::size_t feature) const {
    return categorical_levels[feature].size();
  }
  std::optional<std::size_t> index_of(const std::string& name) const;

  void add_feature(std::string name, FeatureKind kind);

  /// Throws SchemaMismatch when names collide or the target is a feature.
  void validate() const;

  /// Stable 64-bit hash of names, kinds and level labels (hex encoded).
  std::string fingerprint() const;

  bool operator==(const Schema&) const = default;
};

/// Reads a schema config: {"target": name, "features": {name: kind, ...}}.
/// Feature order follows the order of keys in the file.
Schema load_schema(const std::filesystem::path& path);
void save_schema(const Schema& schema, const std::filesystem::path& path);
void write_schema(const Schema& schema, std::ostream& out);

/// Immutable columnar table of mixed features and a binary target.
/// An empty target marks an unlabeled table (prediction input).
class Dataset {
 public:
  Dataset() = default;
  Dataset(Schema schema, std::vector<std::vector<double>> continuous,
          std::vector<std::vector<int>> categorical, std::vector<int> target);

  const Schema& schema() const { return schema_; }
  std::size_t rows() const { return rows_; }
  std::size_t num_features() const { return schema_.num_features(); }
  FeatureKind kind(std::size_t feature) const { return schema_.kinds[feature]; }

  std::span<const double> continuous(std::size_t feature) const;
  std::span<const int> codes(std::size_t feature) const;
  std::span<const int> target() const { return target_; }
  bool has_target() const { return !target_.empty() || rows_ == 0; }

  /// True when the target contains both 0 and 1.
  bool has_both_classes() const;
  void require_both_classes() const;

  Dataset subset(std::span<const std::size_t> rows) const;
  /// Copy with the schema's categorical levels replaced (codes untouched).
  Dataset with_schema(Schema schema) const;

  bool operator==(const Dataset&) const = default;

 private:
  Schema schema_;
  std::vector<std::size_t> slot_;  // feature -> index in its kind's columns
  std::vector<std::vector<double>> continuous_;
  std::vector<std::vector<int>> categorical_;
  std::vector<int> target_;
  std::size_t rows_ = 0;
};

enum class LevelPolicy {
  Learn,   // unseen labels are appended to the schema in first-appearance order
  Strict,  // unseen labels raise UnknownLevel
};

struct LoadOptions {
  LevelPolicy levels = LevelPolicy::Learn;
  bool require_target = true;
};

Dataset load_csv(const std::filesystem::path& path, const Schema& schema,
                 LoadOptions options = {});
Dataset read_csv(std::istream& in, const Schema& schema, LoadOptions options = {});
void save_csv(const Dataset& ds, const std::filesystem::path& path);
void write_csv(const Dataset& ds, std::ostream& out);

/// Re-expresses `ds` in `schema`: same features and kinds, categorical codes
/// remapped by label. Throws SchemaMismatch on differing features and
/// UnknownLevel (with the row) on labels `schema` does not know.
Dataset align_to_schema(const Dataset& ds, const Schema& schema);

struct SplitSpec {
  double test_fraction = 0.3;
  std::uint64_t seed = 0;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

/// Random train/test partition with ceil(n * test_fraction) test rows.
SplitResult split(const Dataset& ds, const SplitSpec& spec);

}  // namespace glmdisc
