#include "glmdisc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "glmdisc/csv.hpp"
#include "glmdisc/error.hpp"

namespace glmdisc {

const char* to_string(FeatureKind kind) {
  return kind == FeatureKind::Continuous ? "continuous" : "categorical";
}

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "continuous") return FeatureKind::Continuous;
  if (s == "categorical") return FeatureKind::Categorical;
  throw SchemaMismatch("unknown feature kind '" + s + "'");
}

std::optional<std::size_t> Schema::index_of(const std::string& name) const {
  auto it = std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names.begin());
}

void Schema::add_feature(std::string name, FeatureKind kind) {
  feature_names.push_back(std::move(name));
  kinds.push_back(kind);
  categorical_levels.emplace_back();
}

void Schema::validate() const {
  if (kinds.size() != feature_names.size() ||
      categorical_levels.size() != feature_names.size())
    throw SchemaMismatch("schema field lengths disagree");
  std::unordered_set<std::string> seen;
  for (const auto& name : feature_names) {
    if (!seen.insert(name).second)
      throw SchemaMismatch("duplicate feature name '" + name + "'");
  }
  if (target_name.empty()) throw SchemaMismatch("schema has no target");
  if (seen.count(target_name))
    throw SchemaMismatch("target '" + target_name + "' is also a feature");
  for (std::size_t j = 0; j < kinds.size(); ++j) {
    if (kinds[j] == FeatureKind::Continuous && !categorical_levels[j].empty())
      throw SchemaMismatch("continuous feature '" + feature_names[j] + "' has levels");
  }
}

std::string Schema::fingerprint() const {
  // FNV-1a over a canonical rendering; separators keep fields unambiguous.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x1f;
    h *= 0x100000001b3ULL;
  };
  mix(target_name);
  for (std::size_t j = 0; j < feature_names.size(); ++j) {
    mix(feature_names[j]);
    mix(to_string(kinds[j]));
    for (const auto& level : categorical_levels[j]) mix(level);
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaMismatch("cannot open schema file " + path.string());
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaMismatch("malformed schema file " + path.string() + ": " + e.what());
  }
  if (!j.contains("target") || !j.contains("features") || !j["features"].is_object())
    throw SchemaMismatch("schema needs 'target' and a 'features' object");
  Schema schema;
  schema.target_name = j["target"].get<std::string>();
  for (const auto& [name, kind] : j["features"].items())
    schema.add_feature(name, feature_kind_from_string(kind.get<std::string>()));
  schema.validate();
  return schema;
}

void write_schema(const Schema& schema, std::ostream& out) {
  nlohmann::ordered_json j;
  j["target"] = schema.target_name;
  j["features"] = nlohmann::ordered_json::object();
  for (std::size_t f = 0; f < schema.num_features(); ++f)
    j["features"][schema.feature_names[f]] = to_string(schema.kinds[f]);
  out << j.dump(2) << '\n';
}

void save_schema(const Schema& schema, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write schema file " + path.string());
  write_schema(schema, out);
  if (!out) throw Error("failed writing schema file " + path.string());
}

Dataset::Dataset(Schema schema, std::vector<std::vector<double>> continuous,
                 std::vector<std::vector<int>> categorical, std::vector<int> target)
    : schema_(std::move(schema)),
      continuous_(std::move(continuous)),
      categorical_(std::move(categorical)),
      target_(std::move(target)) {
  schema_.validate();
  std::size_t nc = 0, nk = 0;
  slot_.resize(schema_.num_features());
  for (std::size_t j = 0; j < schema_.num_features(); ++j)
    slot_[j] = schema_.kinds[j] == FeatureKind::Continuous ? nc++ : nk++;
  if (continuous_.size() != nc || categorical_.size() != nk)
    throw ShapeMismatch("column count disagrees with schema");

  std::optional<std::size_t> n;
  auto check = [&n](std::size_t len) {
    if (n && *n != len) throw ShapeMismatch("columns have different lengths");
    n = len;
  };
  for (const auto& c : continuous_) check(c.size());
  for (const auto& c : categorical_) check(c.size());
  if (!target_.empty() || !n) check(target_.size());
  rows_ = n.value_or(0);

  for (const auto& c : continuous_)
    for (double v : c)
      if (!std::isfinite(v)) throw NonFinite("continuous column contains NaN or inf");
  for (std::size_t j = 0; j < schema_.num_features(); ++j) {
    if (schema_.kinds[j] != FeatureKind::Categorical) continue;
    const int l = static_cast<int>(schema_.num_levels(j));
    for (int code : categorical_[slot_[j]])
      if (code < 0 || code >= l)
        throw UnknownLevel("code " + std::to_string(code) + " out of range for '" +
                           schema_.feature_names[j] + "'");
  }
  for (int y : target_)
    if (y != 0 && y != 1) throw SchemaMismatch("target values must be 0 or 1");
}

std::span<const double> Dataset::continuous(std::size_t feature) const {
  if (schema_.kinds.at(feature) != FeatureKind::Continuous)
    throw SchemaMismatch("feature '" + schema_.feature_names[feature] + "' is not continuous");
  return continuous_[slot_[feature]];
}

std::span<const int> Dataset::codes(std::size_t feature) const {
  if (schema_.kinds.at(feature) != FeatureKind::Categorical)
    throw SchemaMismatch("feature '" + schema_.feature_names[feature] + "' is not categorical");
  return categorical_[slot_[feature]];
}

bool Dataset::has_both_classes() const {
  bool zero = false, one = false;
  for (int y : target_) (y ? one : zero) = true;
  return zero && one;
}

void Dataset::require_both_classes() const {
  if (!has_both_classes()) throw SingleClass();
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  auto pick = [&rows](const auto& col) {
    std::decay_t<decltype(col)> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(col.at(r));
    return out;
  };
  std::vector<std::vector<double>> cont;
  for (const auto& c : continuous_) cont.push_back(pick(c));
  std::vector<std::vector<int>> cat;
  for (const auto& c : categorical_) cat.push_back(pick(c));
  std::vector<int> y = target_.empty() ? std::vector<int>{} : pick(target_);
  if (schema_.num_features() == 0 && target_.empty() && !rows.empty())
    throw ShapeMismatch("cannot subset a table without columns");
  return Dataset(schema_, std::move(cont), std::move(cat), std::move(y));
}

Dataset Dataset::with_schema(Schema schema) const {
  return Dataset(std::move(schema), continuous_, categorical_, target_);
}

namespace {

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first != last && *first == ' ') ++first;
  while (last != first && last[-1] == ' ') --last;
  if (first == last) return false;
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

Dataset read_csv(std::istream& in, const Schema& schema_in, LoadOptions options) {
  Schema schema = schema_in;
  schema.validate();

  csv::Row header;
  if (!csv::read_record(in, header)) throw SchemaMismatch("empty CSV input");

  const std::size_t d = schema.num_features();
  std::vector<std::size_t> column_of(d, static_cast<std::size_t>(-1));
  std::optional<std::size_t> target_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == schema.target_name) {
      if (target_col) throw SchemaMismatch("duplicate target column");
      target_col = c;
      continue;
    }
    auto j = schema.index_of(header[c]);
    if (!j) throw SchemaMismatch("column '" + header[c] + "' is not in the schema");
    if (column_of[*j] != static_cast<std::size_t>(-1))
      throw SchemaMismatch("duplicate column '" + header[c] + "'");
    column_of[*j] = c;
  }
  for (std::size_t j = 0; j < d; ++j)
    if (column_of[j] == static_cast<std::size_t>(-1))
      throw SchemaMismatch("column '" + schema.feature_names[j] + "' missing from header");
  if (!target_col && options.require_target)
    throw SchemaMismatch("target column '" + schema.target_name + "' missing from header");

  std::vector<std::unordered_map<std::string, int>> index(d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < schema.categorical_levels[j].size(); ++k)
      index[j].emplace(schema.categorical_levels[j][k], static_cast<int>(k));

  std::vector<std::vector<double>> cont;
  std::vector<std::vector<int>> cat;
  std::vector<std::size_t> slot(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (schema.kinds[j] == FeatureKind::Continuous) {
      slot[j] = cont.size();
      cont.emplace_back();
    } else {
      slot[j] = cat.size();
      cat.emplace_back();
    }
  }
  std::vector<int> target;

  csv::Row row;
  std::size_t r = 0;
  while (csv::read_record(in, row)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != header.size())
      throw SchemaMismatch("row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                           " fields, header has " + std::to_string(header.size()));
    for (std::size_t j = 0; j < d; ++j) {
      const std::string& cell = row[column_of[j]];
      if (cell.empty()) throw MissingValue(r, schema.feature_names[j]);
      if (schema.kinds[j] == FeatureKind::Continuous) {
        double v;
        if (!parse_double(cell, v)) throw MissingValue(r, schema.feature_names[j]);
        cont[slot[j]].push_back(v);
        continue;
      }
      auto it = index[j].find(cell);
      if (it == index[j].end()) {
        if (options.levels == LevelPolicy::Strict)
          throw UnknownLevel("unknown level '" + cell + "' for feature '" +
                                 schema.feature_names[j] + "' at row " + std::to_string(r),
                             r);
        const int code = static_cast<int>(schema.categorical_levels[j].size());
        schema.categorical_levels[j].push_back(cell);
        it = index[j].emplace(cell, code).first;
      }
      cat[slot[j]].push_back(it->second);
    }
    if (target_col) {
      const std::string& cell = row[*target_col];
      if (cell.empty()) throw MissingValue(r, schema.target_name);
      if (cell == "0") {
        target.push_back(0);
      } else if (cell == "1") {
        target.push_back(1);
      } else {
        throw SchemaMismatch("target value '" + cell + "' at row " + std::to_string(r) +
                             " is not 0 or 1");
      }
    }
    ++r;
  }
  if (d == 0 && !target_col && r > 0)
    throw SchemaMismatch("table has neither features nor a target");
  return Dataset(std::move(schema), std::move(cont), std::move(cat), std::move(target));
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema, LoadOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open data file " + path.string());
  return read_csv(in, schema, options);
}

void write_csv(const Dataset& ds, std::ostream& out) {
  const Schema& s = ds.schema();
  csv::Row fields(s.feature_names.begin(), s.feature_names.end());
  if (ds.has_target() && ds.rows() > 0) fields.push_back(s.target_name);
  csv::write_record(out, fields);

  std::vector<std::span<const double>> cont(s.num_features());
  std::vector<std::span<const int>> cat(s.num_features());
  for (std::size_t j = 0; j < s.num_features(); ++j) {
    if (s.kinds[j] == FeatureKind::Continuous)
      cont[j] = ds.continuous(j);
    else
      cat[j] = ds.codes(j);
  }
  char buf[64];
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    fields.clear();
    for (std::size_t j = 0; j < s.num_features(); ++j) {
      if (s.kinds[j] == FeatureKind::Continuous) {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, cont[j][i]);
        fields.emplace_back(buf, ptr);
      } else {
        fields.push_back(s.categorical_levels[j][static_cast<std::size_t>(cat[j][i])]);
      }
    }
    if (!ds.target().empty()) fields.push_back(ds.target()[i] ? "1" : "0");
    csv::write_record(out, fields);
  }
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write data file " + path.string());
  write_csv(ds, out);
}

Dataset align_to_schema(const Dataset& ds, const Schema& schema) {
  const Schema& have = ds.schema();
  if (have == schema) return ds;
  if (have.feature_names != schema.feature_names || have.kinds != schema.kinds)
    throw SchemaMismatch("data features do not match the model's schema");

  std::vector<std::vector<double>> cont;
  std::vector<std::vector<int>> cat;
  for (std::size_t j = 0; j < schema.num_features(); ++j) {
    if (schema.kinds[j] == FeatureKind::Continuous) {
      auto x = ds.continuous(j);
      cont.emplace_back(x.begin(), x.end());
      continue;
    }
    std::unordered_map<std::string, int> index;
    for (std::size_t k = 0; k < schema.categorical_levels[j].size(); ++k)
      index.emplace(schema.categorical_levels[j][k], static_cast<int>(k));
    std::vector<int> remap(have.categorical_levels[j].size(), -1);
    for (std::size_t k = 0; k < remap.size(); ++k) {
      auto it = index.find(have.categorical_levels[j][k]);
      if (it != index.end()) remap[k] = it->second;
    }
    auto codes = ds.codes(j);
    std::vector<int> out(codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
      const int c = remap[static_cast<std::size_t>(codes[i])];
      if (c < 0)
        throw UnknownLevel("unknown level '" +
                               have.categorical_levels[j][static_cast<std::size_t>(codes[i])] +
                               "' for feature '" + schema.feature_names[j] + "' at row " +
                               std::to_string(i),
                           i);
      out[i] = c;
    }
    cat.push_back(std::move(out));
  }
  Schema merged = schema;
  merged.target_name = have.target_name;
  std::vector<int> y(ds.target().begin(), ds.target().end());
  return Dataset(std::move(merged), std::move(cont), std::move(cat), std::move(y));
}

SplitResult split(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
    throw DegenerateSplit("test fraction must lie in (0, 1)");
  const std::size_t n = ds.rows();
  const auto n_test = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * spec.test_fraction));
  if (n < 2 || n_test == 0 || n_test >= n)
    throw DegenerateSplit("split of " + std::to_string(n) + " rows leaves an empty part");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  SplitResult out;
  out.test_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  out.train_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(out.test_rows.begin(), out.test_rows.end());
  std::sort(out.train_rows.begin(), out.train_rows.end());
  out.train = ds.subset(out.train_rows);
  out.test = ds.subset(out.test_rows);
  return out;
}

}  // namespace glmdisc
