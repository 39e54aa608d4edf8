#include "vpbias/app/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <httplib.h>

#include "vpbias/app/operations.hpp"
#include "vpbias/app/service.hpp"
#include "vpbias/csv.hpp"
#include "vpbias/error.hpp"
#include "vpbias/synth.hpp"

namespace vpbias::app {

namespace {

bool is_usage_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidAggregation:
    case ErrorCode::InvalidK:
    case ErrorCode::InvalidN:
      return true;
    default:
      return false;
  }
}

// Flags shared by every command that scores a sample against a population.
struct Common {
  std::string table;
  std::string schema;
  std::string population;
  std::string metric = "kl";
  double w = 0.01;
  bool no_normalize = false;
  std::string agg = "mean";
  std::string weights;
  std::vector<std::string> dims;
  bool missing_as_category = false;
  unsigned threads = 0;
  std::string output;
  std::string format = "json";

  void add_to(CLI::App& cmd, bool table_required = true) {
    auto* t = cmd.add_option("--table", table, "feature table CSV");
    if (table_required) t->required();
    cmd.add_option("--schema", schema, "schema CSV (name,kind,category,bin_count)");
    cmd.add_option("--population", population, "ASN list restricting the population (default: all rows)");
    cmd.add_option("--metric", metric, "kl|tv|max")->capture_default_str();
    cmd.add_option("--w", w, "smoothing weight for kl")->capture_default_str();
    cmd.add_flag("--no-normalize", no_normalize, "report raw kl instead of the bounded score");
    cmd.add_option("--agg", agg, "mean|max|weighted|subset")->capture_default_str();
    cmd.add_option("--weights", weights, "CSV with dimension,weight rows for --agg weighted");
    cmd.add_option("--dims", dims, "dimensions for --agg subset")->delimiter(',');
    cmd.add_flag("--missing-as-category", missing_as_category, "give missing values their own bin");
    cmd.add_option("--threads", threads, "worker cap (0 = hardware concurrency)");
    add_output(cmd);
  }

  void add_output(CLI::App& cmd) { cmd.add_option("-o,--output", output, "write data here instead of stdout"); }
};

std::map<std::string, double> load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open weights file `" + path + "`");
  auto records = csv::read(in);
  std::map<std::string, double> weights;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& f = records[i].fields;
    if (f.size() != 2) throw Error(ErrorCode::InvalidAggregation, "weights rows must be `dimension,weight`");
    auto v = csv::parse_double(f[1]);
    if (!v) {
      if (i == 0) continue;  // header
      throw Error(ErrorCode::InvalidAggregation, "invalid weight `" + f[1] + "`");
    }
    weights[std::string(csv::trim(f[0]))] = *v;
  }
  return weights;
}

class Context {
 public:
  Context(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  std::ostream& err() { return err_; }

  void warn(const std::string& message) { err_ << "warning: " << message << '\n'; }

  FeatureTable load_table(const Common& c) {
    std::optional<Schema> schema;
    if (!c.schema.empty()) schema = load_schema(c.schema);
    return load_feature_table(c.table, schema);
  }

  AsnSet load_set(const std::string& path, const FeatureTable& table, const char* role) {
    auto resolved = load_vantage_point_set(path, table);
    if (!resolved.unresolved.empty())
      warn(std::to_string(resolved.unresolved.size()) + " " + role + " ASN(s) not in the table were ignored");
    return resolved.set.members;
  }

  AsnSet load_population(const Common& c, const FeatureTable& table) {
    return c.population.empty() ? table.asn_set() : load_set(c.population, table, "population");
  }

  BiasSettings settings(const Common& c, const FeatureTable& table) {
    std::map<std::string, double> weights;
    if (!c.weights.empty()) weights = load_weights(c.weights);
    auto s = make_settings(c.metric, c.w, !c.no_normalize, c.agg, weights, c.dims, c.missing_as_category, c.threads);
    s.aggregation.validate(table.schema());
    return s;
  }

  void warn_outside(const AsnSet& sample, const AsnSet& population) {
    const auto outside = std::count_if(sample.begin(), sample.end(), [&](Asn a) { return !population.contains(a); });
    if (outside > 0) warn(std::to_string(outside) + " sample ASN(s) lie outside the population");
  }

  // Data goes to --output when given, otherwise stdout.
  void emit_text(const Common& c, const std::string& text) {
    if (c.output.empty()) {
      out_ << text;
      return;
    }
    write_file(c.output, text);
  }

  void emit(const Common& c, const json& doc) { emit_text(c, doc.dump(2) + "\n"); }

  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write `" + path + "`");
    f << text;
    if (!f) throw Error(ErrorCode::Io, "write to `" + path + "` failed");
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

std::string fmt(double v) { return std::isfinite(v) ? csv::format_double(v) : std::string(); }

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

// Rows follow schema order; the JSON object itself is key-sorted.
std::string bias_csv(const Schema& schema, const json& report) {
  std::string s = "dimension,score\n";
  for (const auto& dim : schema) {
    const auto& score = report["per_dimension"][dim.name];
    s += csv::escape(dim.name) + "," + (score.is_null() ? "" : fmt(score.get<double>())) + "\n";
  }
  s += "aggregate," + (report["aggregate"].is_null() ? "" : fmt(report["aggregate"].get<double>())) + "\n";
  return s;
}

std::string trajectory_csv(const json& trajectory) {
  std::string s = "size,bias\n";
  for (const auto& p : trajectory)
    s += std::to_string(p[0].get<std::size_t>()) + "," + (p[1].is_null() ? "" : fmt(p[1].get<double>())) + "\n";
  return s;
}

std::string ranking_csv(const json& ranking) {
  std::string s = "asn,bias_delta,relative_delta_pct\n";
  for (const auto& r : ranking) {
    s += std::to_string(r["asn"].get<std::uint32_t>()) + ",";
    s += (r["bias_delta"].is_null() ? "" : fmt(r["bias_delta"].get<double>())) + ",";
    s += (r["relative_delta_pct"].is_null() ? "" : fmt(r["relative_delta_pct"].get<double>())) + "\n";
  }
  return s;
}

AsnSet read_asn_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open `" + path + "`");
  auto list = parse_asn_list(in);
  return {list.begin(), list.end()};
}

json matrix_json(const CorrelationMatrix& m) {
  json groups = json::array();
  for (auto g : m.groups) groups.push_back(to_string(g));
  json values = json::array();
  json methods = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json vrow = json::array();
    json mrow = json::array();
    for (std::size_t j = 0; j < m.size(); ++j) {
      auto v = m.value(i, j);
      vrow.push_back(v ? json(*v) : json(nullptr));
      mrow.push_back(to_string(m.method(i, j)));
    }
    values.push_back(vrow);
    methods.push_back(mrow);
  }
  json group_names = json::array();
  json cat = json::array();
  for (std::size_t a = 0; a < kCategoryGroupCount; ++a) {
    group_names.push_back(to_string(static_cast<CategoryGroup>(a)));
    json row = json::array();
    for (std::size_t b = 0; b < kCategoryGroupCount; ++b) {
      auto v = m.category_matrix[a][b];
      row.push_back(v ? json(*v) : json(nullptr));
    }
    cat.push_back(row);
  }
  return {{"schema_version", kSchemaVersion},
          {"dimensions", m.dimensions},
          {"groups", groups},
          {"values", values},
          {"methods", methods},
          {"category_matrix", {{"groups", group_names}, {"values", cat}}}};
}

std::string policy_name(const CollapsePolicy& p) {
  return std::string(to_string(p.per_label_stat)) + "/" + std::string(to_string(p.cross_label));
}

json scores_json(const std::vector<ComplexityScore>& scores) {
  json arr = json::array();
  for (const auto& s : scores) arr.push_back({{"asn", s.asn.value()}, {"raw", s.raw}, {"normalized", s.normalized}});
  return arr;
}

unsigned default_port() {
  if (const char* env = std::getenv("VPBIAS_PORT")) {
    auto v = csv::parse_double(env);
    if (v && *v >= 1 && *v <= 65535 && *v == static_cast<unsigned>(*v)) return static_cast<unsigned>(*v);
  }
  return 8080;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Vantage point bias toolkit", "vpbias"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vpbias 0.1.0");
  Context ctx(out, err);
  std::function<void()> action;

  // bias
  Common bias_c;
  std::string bias_sample, bias_sample2, bias_radar, bias_dists;
  auto* bias = app.add_subcommand("bias", "bias report of a VP set against the population");
  bias_c.add_to(*bias);
  bias->add_option("--sample", bias_sample, "VP set file")->required();
  bias->add_option("--sample2", bias_sample2, "second VP set reported side by side");
  bias->add_option("--radar", bias_radar, "write [{dimension, score}] for radar plots");
  bias->add_option("--distributions", bias_dists, "write population/sample distributions per dimension");
  bias->add_option("--format", bias_c.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  bias->callback([&] {
    action = [&] {
      auto table = ctx.load_table(bias_c);
      auto population = ctx.load_population(bias_c, table);
      auto settings = ctx.settings(bias_c, table);
      auto sample = ctx.load_set(bias_sample, table, "sample");
      ctx.warn_outside(sample, population);
      auto report = bias_json(table, population, sample, settings);
      if (!bias_radar.empty()) {
        auto full = bias_vector(table, population, sample, settings.metric, settings.aggregation,
                                settings.distribution);
        Context::write_file(bias_radar, radar_json(full).dump(2) + "\n");
      }
      if (!bias_dists.empty()) {
        json dists = json::object();
        for (const auto& dim : table.schema()) {
          try {
            dists[dim.name] = distribution_pair_json(table, population, sample, dim.name, settings);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::NoData) throw;
            dists[dim.name] = nullptr;
          }
        }
        Context::write_file(bias_dists, json{{"schema_version", kSchemaVersion}, {"distributions", dists}}.dump(2) +
                                            "\n");
      }
      if (!bias_sample2.empty()) {
        auto sample2 = ctx.load_set(bias_sample2, table, "sample2");
        ctx.warn_outside(sample2, population);
        auto report2 = bias_json(table, population, sample2, settings);
        if (bias_c.format == "csv") {
          std::string s = "dimension,score_sample,score_sample2\n";
          for (const auto& d : table.schema()) {
            const auto& score = report["per_dimension"][d.name];
            const auto& s2 = report2["per_dimension"][d.name];
            s += csv::escape(d.name) + "," + (score.is_null() ? "" : fmt(score.get<double>())) + "," +
                 (s2.is_null() ? "" : fmt(s2.get<double>())) + "\n";
          }
          auto agg = [](const json& r) { return r["aggregate"].is_null() ? "" : fmt(r["aggregate"].get<double>()); };
          s += "aggregate," + agg(report) + "," + agg(report2) + "\n";
          ctx.emit_text(bias_c, s);
        } else {
          ctx.emit(bias_c, {{"schema_version", kSchemaVersion}, {"reports", json::array({report, report2})}});
        }
        return;
      }
      if (bias_c.format == "csv")
        ctx.emit_text(bias_c, bias_csv(table.schema(), report));
      else
        ctx.emit(bias_c, report);
    };
  });

  // ks
  Common ks_c;
  std::string ks_sample;
  auto* ks = app.add_subcommand("ks", "two-sample Kolmogorov-Smirnov test per dimension");
  ks_c.add_to(*ks);
  ks->add_option("--sample", ks_sample, "VP set file")->required();
  ks->add_option("--format", ks_c.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  ks->callback([&] {
    action = [&] {
      auto table = ctx.load_table(ks_c);
      auto population = ctx.load_population(ks_c, table);
      auto settings = ctx.settings(ks_c, table);
      auto sample = ctx.load_set(ks_sample, table, "sample");
      ctx.warn_outside(sample, population);
      auto doc = ks_json(table, population, sample, settings);
      if (ks_c.format == "csv") {
        std::string s = "dimension,statistic,p_value,reject_at_5pct\n";
        for (const auto& d : table.schema()) {
          const auto& dim = d.name;
          const auto& r = doc["per_dimension"][dim];
          if (r.is_null()) {
            s += csv::escape(dim) + ",,,\n";
            continue;
          }
          s += csv::escape(dim) + "," + fmt(r["statistic"].get<double>()) + "," + fmt(r["p_value"].get<double>()) +
               "," + (r["reject_at_5pct"].get<bool>() ? "true" : "false") + "\n";
        }
        ctx.emit_text(ks_c, s);
      } else {
        ctx.emit(ks_c, doc);
      }
    };
  });

  // subsample
  Common sub_c;
  std::string sub_sample, sub_algorithm = "greedy", sub_traj;
  std::size_t sub_k = 0;
  bool sub_early = false;
  auto* sub = app.add_subcommand("subsample", "pick k of the VPs minimizing aggregate bias");
  sub_c.add_to(*sub);
  sub->add_option("--sample", sub_sample, "VP set file")->required();
  sub->add_option("--k", sub_k, "target size")->required();
  sub->add_option("--algorithm", sub_algorithm, "greedy|sorting")
      ->check(CLI::IsMember({"greedy", "sorting"}))
      ->capture_default_str();
  sub->add_flag("--early-exit", sub_early, "stop greedy when no removal lowers the bias");
  sub->add_option("--trajectory-csv", sub_traj, "write size,bias trajectory");
  sub->callback([&] {
    action = [&] {
      auto table = ctx.load_table(sub_c);
      auto population = ctx.load_population(sub_c, table);
      auto settings = ctx.settings(sub_c, table);
      auto sample = ctx.load_set(sub_sample, table, "sample");
      ctx.warn_outside(sample, population);
      auto doc = subsample_json(table, population, sample, sub_k, *parse_subsample_algorithm(sub_algorithm),
                                sub_early, settings);
      if (!sub_traj.empty()) Context::write_file(sub_traj, trajectory_csv(doc["trajectory"]));
      ctx.emit(sub_c, doc);
    };
  });

  // extend
  Common ext_c;
  std::string ext_sample, ext_candidates, ext_algorithm = "sorting", ext_ranking;
  ExtendRequest ext_req;
  auto* ext = app.add_subcommand("extend", "rank non-member ASes by bias change and add the best n");
  ext_c.add_to(*ext);
  ext->add_option("--sample", ext_sample, "VP set file")->required();
  ext->add_option("--n", ext_req.n, "number of ASes to add")->required();
  ext->add_option("--candidates", ext_candidates, "candidate ASN list (default: population minus the set)");
  ext->add_option("--algorithm", ext_algorithm, "sorting|greedy")
      ->check(CLI::IsMember({"greedy", "sorting"}))
      ->capture_default_str();
  ext->add_flag("--exclude-stubs", ext_req.options.exclude_stubs, "drop candidates with a single neighbor");
  ext->add_option("--stub-dimension", ext_req.options.stub_dimension, "dimension that marks stubs")
      ->capture_default_str();
  ext->add_option("--ranking-csv", ext_ranking, "write asn,bias_delta,relative_delta_pct");
  ext->add_option("--format", ext_c.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  ext->callback([&] {
    action = [&] {
      auto table = ctx.load_table(ext_c);
      auto population = ctx.load_population(ext_c, table);
      auto settings = ctx.settings(ext_c, table);
      auto sample = ctx.load_set(ext_sample, table, "sample");
      ctx.warn_outside(sample, population);
      std::optional<AsnSet> candidates;
      if (!ext_candidates.empty()) candidates = ctx.load_set(ext_candidates, table, "candidate");
      ext_req.algorithm = *parse_subsample_algorithm(ext_algorithm);
      auto doc = extend_json(table, population, sample, candidates, ext_req, settings);
      if (!ext_ranking.empty()) Context::write_file(ext_ranking, ranking_csv(doc["ranking"]));
      if (ext_c.format == "csv")
        ctx.emit_text(ext_c, ranking_csv(doc["ranking"]));
      else
        ctx.emit(ext_c, doc);
    };
  });

  // baseline
  Common base_c;
  std::string base_source;
  std::vector<std::size_t> base_k;
  std::size_t base_iterations = 100;
  std::uint64_t base_seed = 0;
  auto* base = app.add_subcommand("baseline", "bias of uniform random samples");
  base_c.add_to(*base);
  base->add_option("--source", base_source, "ASN list to draw from (default: population)");
  base->add_option("--k", base_k, "sample sizes")->required()->delimiter(',');
  base->add_option("--iterations", base_iterations, "draws per size")->capture_default_str();
  base->add_option("--seed", base_seed, "generator seed")->capture_default_str();
  base->add_option("--format", base_c.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  base->callback([&] {
    action = [&] {
      auto table = ctx.load_table(base_c);
      auto population = ctx.load_population(base_c, table);
      auto settings = ctx.settings(base_c, table);
      auto source = base_source.empty() ? population : ctx.load_set(base_source, table, "source");
      auto doc = baseline_json(table, population, source, base_k, base_iterations, base_seed, settings);
      if (base_c.format == "csv") {
        std::string s = "sample_size,iterations,mean_bias,ci95_half_width,min_bias,max_bias\n";
        for (const auto& r : doc["results"])
          s += std::to_string(r["sample_size"].get<std::size_t>()) + "," +
               std::to_string(r["iterations"].get<std::size_t>()) + "," + fmt(r["mean_bias"].get<double>()) + "," +
               fmt(r["ci95_half_width"].get<double>()) + "," + fmt(r["min_bias"].get<double>()) + "," +
               fmt(r["max_bias"].get<double>()) + "\n";
        ctx.emit_text(base_c, s);
      } else {
        ctx.emit(base_c, doc);
      }
    };
  });

  // complexity
  Common cx_c;
  std::string cx_labels, cx_scores, cx_stat = "mean", cx_collapse = "merge", cx_unknown = "reject", cx_ecdf,
                                    cx_sample, cx_candidates;
  bool cx_all = false, cx_dump = false;
  auto* cx = app.add_subcommand("complexity", "acquisition complexity scores from AS labels");
  cx_c.add_to(*cx, false);
  cx->add_option("--labels", cx_labels, "CSV with asn,label rows");
  cx->add_option("--scores", cx_scores, "score table CSV (label,min,mean,max; default: built in)");
  cx->add_option("--stat", cx_stat, "per-label statistic min|mean|max")
      ->check(CLI::IsMember({"min", "mean", "max"}))
      ->capture_default_str();
  cx->add_option("--collapse", cx_collapse, "cross-label rule min|max|merge")
      ->check(CLI::IsMember({"min", "max", "merge"}))
      ->capture_default_str();
  cx->add_option("--unknown-labels", cx_unknown, "reject|neutral")
      ->check(CLI::IsMember({"reject", "neutral"}))
      ->capture_default_str();
  cx->add_flag("--all-policies", cx_all, "score under all nine collapse policies");
  cx->add_flag("--dump-table", cx_dump, "print the score table as CSV and exit");
  cx->add_option("--ecdf", cx_ecdf, "write the ECDF of normalized scores");
  cx->add_option("--sample", cx_sample, "VP set; joins scores with the extension ranking (needs --table)");
  cx->add_option("--candidates", cx_candidates, "candidate ASN list for the join");
  cx->callback([&] {
    action = [&] {
      const auto score_table = cx_scores.empty() ? ComplexityScoreTable::default_table()
                                                 : ComplexityScoreTable::load(cx_scores);
      if (cx_dump) {
        std::ostringstream s;
        score_table.write(s);
        ctx.emit_text(cx_c, s.str());
        return;
      }
      if (cx_labels.empty()) throw Error(ErrorCode::InvalidConfig, "--labels is required");
      const auto unknown = cx_unknown == "neutral" ? UnknownLabelPolicy::Neutral : UnknownLabelPolicy::Reject;
      const auto assignments = unknown == UnknownLabelPolicy::Reject ? load_labels(cx_labels, score_table)
                                                                     : load_labels(cx_labels);
      const CollapsePolicy policy{*parse_label_stat(cx_stat), *parse_cross_label(cx_collapse)};
      const auto scores = score_all(assignments, score_table, policy, unknown);

      json doc = {{"schema_version", kSchemaVersion},
                  {"policy", {{"stat", cx_stat}, {"collapse", cx_collapse}}},
                  {"unknown_labels", cx_unknown},
                  {"scores", scores_json(scores)}};
      if (cx_all) {
        json variants = json::object();
        for (const auto& p : CollapsePolicy::all())
          variants[policy_name(p)] = scores_json(score_all(assignments, score_table, p, unknown));
        doc["variants"] = variants;
      }
      if (!cx_ecdf.empty()) {
        std::vector<double> values;
        for (const auto& s : scores) values.push_back(s.normalized);
        json points = json::array();
        for (const auto& p : ecdf(values)) points.push_back({{"value", p.value}, {"fraction", p.fraction}});
        Context::write_file(cx_ecdf, points.dump(2) + "\n");
      }
      if (!cx_sample.empty()) {
        if (cx_c.table.empty()) throw Error(ErrorCode::InvalidConfig, "--sample needs --table");
        auto table = ctx.load_table(cx_c);
        auto population = ctx.load_population(cx_c, table);
        auto settings = ctx.settings(cx_c, table);
        auto sample = ctx.load_set(cx_sample, table, "sample");
        AsnSet candidates;
        if (!cx_candidates.empty()) {
          candidates = ctx.load_set(cx_candidates, table, "candidate");
        } else {
          std::set_difference(population.begin(), population.end(), sample.begin(), sample.end(),
                              std::inserter(candidates, candidates.end()));
        }
        const BiasEngine engine(table, population, settings.metric, settings.aggregation, settings.distribution);
        ExtensionOptions options;
        options.threads = settings.threads;
        const auto joined = complexity_vs_bias(engine, sample, candidates, scores, options);
        json records = json::array();
        for (const auto& r : joined.records)
          records.push_back({{"asn", r.asn.value()},
                             {"bias_delta", number_or_null(r.bias_delta)},
                             {"normalized_complexity", r.normalized_complexity}});
        doc["join"] = {{"records", records}, {"missing_score", asn_array(joined.missing_score)}};
        if (!joined.missing_score.empty())
          ctx.warn(std::to_string(joined.missing_score.size()) + " candidate(s) have no complexity score");
      }
      ctx.emit(cx_c, doc);
    };
  });

  // correlate
  Common cor_c;
  std::string cor_categories;
  auto* cor = app.add_subcommand("correlate", "pairwise association matrix of the dimensions");
  cor->add_option("--table", cor_c.table, "feature table CSV")->required();
  cor->add_option("--schema", cor_c.schema, "schema CSV");
  cor->add_option("--population", cor_c.population, "ASN list restricting the rows");
  cor->add_option("--format", cor_c.format, "json|csv (csv: one row per dimension pair)")
      ->check(CLI::IsMember({"json", "csv"}));
  cor->add_option("--categories", cor_categories, "write the category-group matrix as CSV");
  cor_c.add_output(*cor);
  cor->callback([&] {
    action = [&] {
      auto table = ctx.load_table(cor_c);
      auto population = ctx.load_population(cor_c, table);
      const auto m = correlation_matrix(table, population);
      if (!cor_categories.empty()) {
        std::string s = "group";
        for (std::size_t b = 0; b < kCategoryGroupCount; ++b) s += "," + std::string(to_string(CategoryGroup(b)));
        s += "\n";
        for (std::size_t a = 0; a < kCategoryGroupCount; ++a) {
          s += std::string(to_string(CategoryGroup(a)));
          for (std::size_t b = 0; b < kCategoryGroupCount; ++b) s += "," + fmt(m.category_matrix[a][b]);
          s += "\n";
        }
        Context::write_file(cor_categories, s);
      }
      if (cor_c.format == "csv") {
        std::string s = "dimension_a,dimension_b,method,value\n";
        for (std::size_t i = 0; i < m.size(); ++i)
          for (std::size_t j = i + 1; j < m.size(); ++j)
            s += csv::escape(m.dimensions[i]) + "," + csv::escape(m.dimensions[j]) + "," +
                 std::string(to_string(m.method(i, j))) + "," + fmt(m.value(i, j)) + "\n";
        ctx.emit_text(cor_c, s);
      } else {
        ctx.emit(cor_c, matrix_json(m));
      }
    };
  });

  // eval-latency
  Common lat_c;
  std::string lat_truth, lat_estimate, lat_members;
  std::vector<int> lat_pcts{10, 25, 50, 75, 90};
  auto* lat = app.add_subcommand("eval-latency", "percentile relative error of a VP subset's latency estimate");
  lat->add_option("--ground-truth", lat_truth, "CSV asn,latency_ms over all measured ASes")->required();
  lat->add_option("--estimate", lat_estimate, "CSV asn,latency_ms for the estimate (default: ground truth)");
  lat->add_option("--members", lat_members, "ASN list of the estimating subset (default: all estimate rows)");
  lat->add_option("--percentiles", lat_pcts, "percentiles in 1..99")->delimiter(',');
  lat->add_option("--format", lat_c.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  lat_c.add_output(*lat);
  lat->callback([&] {
    action = [&] {
      const auto truth = load_latency(lat_truth);
      const auto estimate = lat_estimate.empty() ? truth : load_latency(lat_estimate);
      AsnSet members;
      if (lat_members.empty()) {
        for (const auto& [asn, ms] : estimate) members.insert(asn);
      } else {
        members = read_asn_file(lat_members);
      }
      const auto r = percentile_relative_error(truth, members, estimate, lat_pcts);
      if (lat_c.format == "csv") {
        std::string s = "percentile,ground_truth,estimate,relative_error\n";
        for (std::size_t i = 0; i < r.percentiles.size(); ++i)
          s += std::to_string(r.percentiles[i]) + "," + fmt(r.ground_truth[i]) + "," + fmt(r.estimate[i]) + "," +
               fmt(r.errors[i]) + "\n";
        ctx.emit_text(lat_c, s);
        return;
      }
      json errors = json::array();
      for (const auto& e : r.errors) errors.push_back(e ? json(*e) : json(nullptr));
      ctx.emit(lat_c, {{"schema_version", kSchemaVersion},
                       {"percentiles", r.percentiles},
                       {"ground_truth", r.ground_truth},
                       {"estimate", r.estimate},
                       {"errors", errors},
                       {"mean_error", r.mean_error},
                       {"estimate_size", r.estimate_size}});
    };
  });

  // synth
  Common syn_c;
  std::string syn_spec, syn_dir;
  auto* syn = app.add_subcommand("synth", "generate a synthetic feature table and VP sets");
  syn->add_option("--spec", syn_spec, "JSON generator spec")->required();
  syn->add_option("--out-dir", syn_dir, "output directory")->required();
  syn->callback([&] {
    action = [&] {
      const auto output = synth::generate(synth::load_spec(syn_spec));
      synth::write_output(output, syn_dir);
      json sets = json::array();
      for (const auto& s : output.vantage_point_sets)
        sets.push_back({{"name", s.name}, {"size", s.members.size()}, {"file", s.name + ".txt"}});
      ctx.emit(syn_c, {{"schema_version", kSchemaVersion},
                       {"table", {{"file", "table.csv"},
                                  {"rows", output.table.num_rows()},
                                  {"dimensions", output.table.num_dimensions()}}},
                       {"sets", sets}});
    };
  });

  // serve
  Common srv_c;
  std::string srv_sets, srv_host = "127.0.0.1";
  unsigned srv_port = default_port();
  ServiceConfig srv_cfg;
  auto* srv = app.add_subcommand("serve", "read-only HTTP API over a table and a directory of VP sets");
  srv->add_option("--table", srv_c.table, "feature table CSV")->required();
  srv->add_option("--schema", srv_c.schema, "schema CSV");
  srv->add_option("--population", srv_c.population, "ASN list restricting the population");
  srv->add_option("--sets-dir", srv_sets, "directory of VP set files (.txt/.csv)")->required();
  srv->add_option("--host", srv_host, "bind address")->capture_default_str();
  srv->add_option("--port", srv_port, "port (default: $VPBIAS_PORT or 8080)");
  srv->add_option("--greedy-cap", srv_cfg.greedy_cap, "largest set accepted by greedy endpoints")
      ->capture_default_str();
  srv->add_option("--threads", srv_cfg.threads, "worker cap per request");
  srv->callback([&] {
    action = [&] {
      auto table = ctx.load_table(srv_c);
      auto population = ctx.load_population(srv_c, table);
      auto sets = Service::load_sets(srv_sets, table, srv_c.table);
      const Service service(std::move(table), std::move(sets), std::move(population), srv_cfg);
      httplib::Server server;
      mount(server, service);
      ctx.err() << "listening on " << srv_host << ":" << srv_port << '\n';
      if (!server.listen(srv_host, static_cast<int>(srv_port)))
        throw Error(ErrorCode::Io, "cannot bind " + srv_host + ":" + std::to_string(srv_port));
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return is_usage_error(e.code()) ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace vpbias::app
