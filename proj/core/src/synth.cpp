#include "vpbias/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vpbias/error.hpp"
#include "vpbias/random.hpp"

namespace vpbias::synth {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& message) { throw Error(ErrorCode::InvalidSpec, message); }

bool is_categorical(const Generator& g) {
  return std::holds_alternative<UniformCategorical>(g) || std::holds_alternative<ZipfCategorical>(g);
}

int category_count(const Generator& g) {
  if (auto* u = std::get_if<UniformCategorical>(&g)) return u->k;
  if (auto* z = std::get_if<ZipfCategorical>(&g)) return z->k;
  return 0;
}

std::vector<std::string> category_names(const DimensionSpec& dim) {
  if (!dim.categories.empty()) return dim.categories;
  std::vector<std::string> names;
  for (int i = 0; i < category_count(dim.generator); ++i) names.push_back("c" + std::to_string(i));
  return names;
}

std::vector<double> category_weights(const Generator& g) {
  std::vector<double> w;
  if (auto* u = std::get_if<UniformCategorical>(&g)) w.assign(static_cast<std::size_t>(u->k), 1.0);
  if (auto* z = std::get_if<ZipfCategorical>(&g))
    for (int i = 0; i < z->k; ++i) w.push_back(1.0 / std::pow(static_cast<double>(i + 1), z->s));
  return w;
}

const DimensionSpec* find_dimension(const SynthSpec& spec, const std::string& name) {
  for (const auto& d : spec.dimensions)
    if (d.name == name) return &d;
  return nullptr;
}

template <typename T>
T get_field(const json& obj, const char* key, const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) invalid(context + ": missing field `" + key + "`");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(context + ": field `" + key + "` has the wrong type");
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& context) {
  if (!obj.contains(key)) return fallback;
  return get_field<T>(obj, key, context);
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.n_ases < 1) invalid("n_ases must be at least 1");
  if (spec.first_asn < 1 || static_cast<std::uint64_t>(spec.first_asn) + spec.n_ases - 1 > UINT32_MAX)
    invalid("ASN range does not fit in 1..2^32-1");
  if (spec.dimensions.empty()) invalid("at least one dimension is required");

  std::set<std::string> names;
  for (const auto& dim : spec.dimensions) {
    if (dim.name.empty() || dim.name == "asn") invalid("invalid dimension name `" + dim.name + "`");
    if (!names.insert(dim.name).second) invalid("duplicate dimension `" + dim.name + "`");
    if (!(dim.missing_rate >= 0.0 && dim.missing_rate < 1.0)) invalid(dim.name + ": missing_rate must be in [0, 1)");
    std::visit(
        [&](const auto& g) {
          using G = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<G, UniformCategorical>) {
            if (g.k < 1) invalid(dim.name + ": k must be >= 1");
          } else if constexpr (std::is_same_v<G, ZipfCategorical>) {
            if (g.k < 1 || !(g.s > 0.0)) invalid(dim.name + ": zipf needs k >= 1 and s > 0");
          } else if constexpr (std::is_same_v<G, LogNormal>) {
            if (!(g.sigma > 0.0) || !std::isfinite(g.mu)) invalid(dim.name + ": lognormal needs sigma > 0");
          } else {
            if (!(g.alpha > 0.0)) invalid(dim.name + ": pareto needs alpha > 0");
          }
        },
        dim.generator);
    if (!dim.categories.empty()) {
      if (!is_categorical(dim.generator)) invalid(dim.name + ": categories given for a numerical generator");
      if (static_cast<int>(dim.categories.size()) != category_count(dim.generator))
        invalid(dim.name + ": categories must list exactly k names");
      std::set<std::string> unique(dim.categories.begin(), dim.categories.end());
      if (unique.size() != dim.categories.size() || unique.contains(""))
        invalid(dim.name + ": category names must be unique and non-empty");
    }
  }

  std::set<std::string> vp_names;
  for (const auto& vp : spec.vp_strategies) {
    if (vp.name.empty() || !vp_names.insert(vp.name).second) invalid("VP strategy names must be unique and non-empty");
    std::visit(
        [&](const auto& rule) {
          using R = std::decay_t<decltype(rule)>;
          if (rule.k < 1 || rule.k > spec.n_ases) invalid(vp.name + ": k must lie in 1..n_ases");
          if constexpr (std::is_same_v<R, CategorySkew>) {
            const auto* dim = find_dimension(spec, rule.dimension);
            if (!dim || !is_categorical(dim->generator))
              invalid(vp.name + ": category-skew needs a categorical dimension");
            auto cats = category_names(*dim);
            if (std::find(cats.begin(), cats.end(), rule.category) == cats.end())
              invalid(vp.name + ": unknown category `" + rule.category + "`");
            if (!(rule.fraction >= 0.0 && rule.fraction <= 1.0)) invalid(vp.name + ": fraction must be in [0, 1]");
          }
        },
        vp.rule);
  }
}

SynthOutput generate(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);

  Schema schema;
  std::vector<std::vector<std::string>> names;
  std::vector<std::vector<double>> weights;
  for (const auto& dim : spec.dimensions) {
    DimensionSchema s;
    s.name = dim.name;
    s.kind = is_categorical(dim.generator) ? DimensionKind::Categorical : DimensionKind::Numerical;
    s.category = dim.category;
    schema.push_back(s);
    names.push_back(category_names(dim));
    weights.push_back(category_weights(dim.generator));
  }

  std::vector<FeatureTable::Row> rows;
  rows.reserve(spec.n_ases);
  for (std::size_t i = 0; i < spec.n_ases; ++i) {
    std::vector<Cell> cells;
    cells.reserve(spec.dimensions.size());
    for (std::size_t d = 0; d < spec.dimensions.size(); ++d) {
      const auto& dim = spec.dimensions[d];
      if (dim.missing_rate > 0.0 && rng.unit() < dim.missing_rate) {
        cells.emplace_back(std::monostate{});
        continue;
      }
      if (is_categorical(dim.generator)) {
        cells.emplace_back(names[d][rng.weighted(weights[d])]);
        continue;
      }
      double x = 0.0;
      if (auto* ln = std::get_if<LogNormal>(&dim.generator)) {
        x = std::exp(ln->mu + ln->sigma * rng.normal());
      } else if (auto* pa = std::get_if<Pareto>(&dim.generator)) {
        x = std::pow(1.0 - rng.unit(), -1.0 / pa->alpha);
      }
      if (dim.integer) x = std::round(x);
      if (!std::isfinite(x)) x = std::numeric_limits<double>::max();
      cells.emplace_back(x);
    }
    rows.emplace_back(Asn(spec.first_asn + static_cast<std::uint32_t>(i)), std::move(cells));
  }

  SynthOutput out{FeatureTable(std::move(schema), std::move(rows)), {}};
  const auto& table = out.table;

  for (const auto& vp : spec.vp_strategies) {
    VantagePointSet set;
    set.name = vp.name;
    std::vector<Asn> pool(table.asns().begin(), table.asns().end());
    if (const auto* uniform = std::get_if<UniformRandom>(&vp.rule)) {
      rng.partial_shuffle(pool, uniform->k);
      set.members.insert(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(uniform->k));
      set.metadata["rule"] = "uniform-random";
    } else {
      const auto& skew = std::get<CategorySkew>(vp.rule);
      const std::size_t d = table.require_dimension(skew.dimension);
      std::vector<Asn> inside, rest;
      for (std::size_t r = 0; r < table.num_rows(); ++r) {
        const auto* token = std::get_if<std::string>(&table.cell(r, d));
        (token && *token == skew.category ? inside : rest).push_back(table.asns()[r]);
      }
      const auto want = static_cast<std::size_t>(std::llround(skew.fraction * static_cast<double>(skew.k)));
      if (want > inside.size())
        invalid(vp.name + ": only " + std::to_string(inside.size()) + " ASes in category `" + skew.category + "`");
      rng.partial_shuffle(inside, want);
      set.members.insert(inside.begin(), inside.begin() + static_cast<std::ptrdiff_t>(want));
      rest.insert(rest.end(), inside.begin() + static_cast<std::ptrdiff_t>(want), inside.end());
      const std::size_t fill = skew.k - want;
      rng.partial_shuffle(rest, fill);
      set.members.insert(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(fill));
      set.metadata["rule"] = "category-skew";
    }
    out.vantage_point_sets.push_back(std::move(set));
  }
  return out;
}

SynthSpec parse_spec(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    invalid(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) invalid("spec must be a JSON object");

  SynthSpec spec;
  spec.n_ases = get_field<std::size_t>(root, "n_ases", "spec");
  spec.seed = get_field<std::uint64_t>(root, "seed", "spec");
  spec.first_asn = get_or<std::uint32_t>(root, "first_asn", 1, "spec");

  for (const auto& d : get_field<json>(root, "dimensions", "spec")) {
    DimensionSpec dim;
    dim.name = get_field<std::string>(d, "name", "dimension");
    const std::string ctx = "dimension `" + dim.name + "`";
    const auto g = get_field<json>(d, "generator", ctx);
    const auto type = get_field<std::string>(g, "type", ctx);
    if (type == "uniform-categorical") {
      dim.generator = UniformCategorical{get_field<int>(g, "k", ctx)};
    } else if (type == "zipf-categorical") {
      dim.generator = ZipfCategorical{get_field<int>(g, "k", ctx), get_or<double>(g, "s", 1.0, ctx)};
    } else if (type == "lognormal") {
      dim.generator = LogNormal{get_or<double>(g, "mu", 0.0, ctx), get_or<double>(g, "sigma", 1.0, ctx)};
    } else if (type == "pareto") {
      dim.generator = Pareto{get_or<double>(g, "alpha", 1.5, ctx)};
    } else {
      invalid(ctx + ": unknown generator `" + type + "`");
    }
    if (d.contains("category")) {
      auto group = parse_category_group(get_field<std::string>(d, "category", ctx));
      if (!group) invalid(ctx + ": unknown category group");
      dim.category = *group;
    }
    dim.categories = get_or<std::vector<std::string>>(d, "categories", {}, ctx);
    dim.missing_rate = get_or<double>(d, "missing_rate", 0.0, ctx);
    dim.integer = get_or<bool>(d, "integer", false, ctx);
    spec.dimensions.push_back(std::move(dim));
  }

  if (root.contains("vp_strategies")) {
    for (const auto& v : root.at("vp_strategies")) {
      VpStrategy vp;
      vp.name = get_field<std::string>(v, "name", "vp strategy");
      const std::string ctx = "vp strategy `" + vp.name + "`";
      const auto rule = get_field<json>(v, "rule", ctx);
      const auto type = get_field<std::string>(rule, "type", ctx);
      if (type == "uniform-random") {
        vp.rule = UniformRandom{get_field<std::size_t>(rule, "k", ctx)};
      } else if (type == "category-skew") {
        vp.rule = CategorySkew{get_field<std::string>(rule, "dimension", ctx),
                               get_field<std::string>(rule, "category", ctx),
                               get_field<double>(rule, "fraction", ctx), get_field<std::size_t>(rule, "k", ctx)};
      } else {
        invalid(ctx + ": unknown rule `" + type + "`");
      }
      spec.vp_strategies.push_back(std::move(vp));
    }
  }
  validate(spec);
  return spec;
}

SynthSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_spec(buffer.str());
}

void write_output(const SynthOutput& output, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string());
  {
    std::ofstream out(dir / "table.csv", std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / "table.csv").string());
    write_feature_table(output.table, out);
  }
  for (const auto& set : output.vantage_point_sets) {
    const auto path = dir / (set.name + ".txt");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    for (Asn asn : set.members) out << asn.value() << '\n';
  }
}

}  // namespace vpbias::synth
