#include "vpbias/app/service.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <httplib.h>

#include "vpbias/csv.hpp"
#include "vpbias/error.hpp"

namespace vpbias::app {

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownDimension: return 404;
    default: return 400;
  }
}

Reply error_reply(int status, std::string_view code, const std::string& message) {
  return {status, json{{"code", code}, {"message", message}}.dump()};
}

Reply ok(const json& doc) { return {200, doc.dump()}; }

template <typename Fn>
Reply guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return error_reply(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    return error_reply(400, to_string(ErrorCode::MalformedInput), e.what());
  } catch (const std::exception& e) {
    return error_reply(500, "Internal", e.what());
  }
}

json parse_body(const std::string& body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error(ErrorCode::MalformedInput, "request body must be a JSON object");
  return doc;
}

Asn asn_from_json(const json& value) {
  std::optional<Asn> asn;
  if (value.is_number_unsigned()) {
    const auto v = value.get<std::uint64_t>();
    if (v > 0 && v <= 0xffffffffULL) asn = Asn(static_cast<std::uint32_t>(v));
  } else if (value.is_string()) {
    asn = parse_asn(value.get<std::string>());
  }
  if (!asn) throw Error(ErrorCode::MalformedInput, "invalid ASN " + value.dump());
  return *asn;
}

std::size_t positive_size(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_number_unsigned())
    throw Error(ErrorCode::MalformedInput, std::string("`") + key + "` must be a non-negative integer");
  return doc[key].get<std::size_t>();
}

// Body fields that mirror the bias query parameters.
Service::Query query_from_body(const json& doc) {
  Service::Query q;
  for (const char* key : {"metric", "agg", "dims", "weights"})
    if (doc.contains(key) && doc[key].is_string()) q[key] = doc[key].get<std::string>();
  for (const char* key : {"normalize", "missing_as_category"})
    if (doc.contains(key) && doc[key].is_boolean()) q[key] = doc[key].get<bool>() ? "true" : "false";
  if (doc.contains("w") && doc["w"].is_number()) q["w"] = csv::format_double(doc["w"].get<double>());
  return q;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(sep, start);
    if (end == std::string_view::npos) end = text.size();
    auto token = csv::trim(text.substr(start, end - start));
    if (!token.empty()) out.emplace_back(token);
    start = end + 1;
  }
  return out;
}

bool parse_flag(const std::string& text, const char* name) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw Error(ErrorCode::InvalidConfig, std::string("`") + name + "` must be true or false");
}

}  // namespace

Service::Service(FeatureTable table, std::vector<VantagePointSet> sets, AsnSet population, ServiceConfig config)
    : table_(std::move(table)), population_(std::move(population)), config_(config) {
  if (population_.empty()) population_ = table_.asn_set();
  for (auto& set : sets) {
    auto name = set.name;
    sets_.insert_or_assign(std::move(name), std::move(set));
  }
}

std::vector<VantagePointSet> Service::load_sets(const std::filesystem::path& dir, const FeatureTable& table,
                                                const std::filesystem::path& skip) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext != ".txt" && ext != ".csv") continue;
    if (!skip.empty() && std::filesystem::exists(skip) && std::filesystem::equivalent(entry.path(), skip)) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<VantagePointSet> sets;
  for (const auto& file : files) sets.push_back(load_vantage_point_set(file, table).set);
  return sets;
}

const VantagePointSet* Service::find_set(const std::string& name) const {
  auto it = sets_.find(name);
  return it == sets_.end() ? nullptr : &it->second;
}

BiasSettings Service::settings_from(const Query& query) const {
  auto get = [&](const char* key, std::string fallback) {
    auto it = query.find(key);
    return it == query.end() ? fallback : it->second;
  };
  double w = 0.01;
  if (auto it = query.find("w"); it != query.end()) {
    auto v = csv::parse_double(it->second);
    if (!v) throw Error(ErrorCode::InvalidConfig, "`w` must be a number");
    w = *v;
  }
  std::map<std::string, double> weights;
  for (const auto& pair : split(get("weights", ""), ',')) {
    auto colon = pair.find(':');
    std::optional<double> v;
    if (colon != std::string::npos) v = csv::parse_double(pair.substr(colon + 1));
    if (!v) throw Error(ErrorCode::InvalidAggregation, "weights must look like `dim:weight,dim:weight`");
    weights[std::string(csv::trim(pair.substr(0, colon)))] = *v;
  }
  auto settings = make_settings(get("metric", "kl"), w, parse_flag(get("normalize", "true"), "normalize"),
                                get("agg", "mean"), weights, split(get("dims", ""), ','),
                                parse_flag(get("missing_as_category", "false"), "missing_as_category"),
                                config_.threads);
  settings.aggregation.validate(table_.schema());
  return settings;
}

Reply Service::list_sets() const {
  json sets = json::array();
  for (const auto& [name, set] : sets_) {
    std::size_t in_population = 0;
    for (Asn a : set.members) in_population += population_.contains(a) ? 1 : 0;
    sets.push_back({{"name", name}, {"size", set.members.size()}, {"in_population", in_population}});
  }
  return ok({{"schema_version", kSchemaVersion}, {"sets", sets}});
}

Reply Service::bias_of_set(const std::string& name, const Query& query) const {
  const auto* set = find_set(name);
  if (!set) return error_reply(404, "UnknownSet", "no vantage point set named `" + name + "`");
  return guarded([&] {
    const auto settings = settings_from(query);
    const auto key = name + '\n' + canonical(to_json(settings.metric)) + canonical(to_json(settings.aggregation)) +
                     (settings.distribution.missing_as_category ? "m" : "");
    {
      std::lock_guard lock(cache_mutex_);
      if (auto it = cache_.find(key); it != cache_.end()) return Reply{200, it->second};
    }
    // Computed outside the lock; a racing duplicate writes the same bytes.
    auto body = bias_json(table_, population_, set->members, settings).dump();
    std::lock_guard lock(cache_mutex_);
    cache_.emplace(key, body);
    return Reply{200, std::move(body)};
  });
}

Reply Service::bias_of_body(const std::string& body, const Query& query) const {
  return guarded([&] {
    const auto doc = parse_body(body);
    if (!doc.contains("asns") || !doc["asns"].is_array())
      throw Error(ErrorCode::MalformedInput, "body must contain an `asns` array");
    std::vector<Asn> asns;
    for (const auto& v : doc["asns"]) asns.push_back(asn_from_json(v));
    auto merged = query_from_body(doc);
    for (const auto& [k, v] : query) merged.emplace(k, v);
    const auto settings = settings_from(merged);
    const auto resolved = resolve_set("custom", asns, table_);
    return ok(bias_json(table_, population_, resolved.set.members, settings));
  });
}

Reply Service::subsample(const std::string& body) const {
  return guarded([&] {
    const auto doc = parse_body(body);
    if (!doc.contains("set") || !doc["set"].is_string())
      throw Error(ErrorCode::MalformedInput, "body must name a `set`");
    const auto name = doc["set"].get<std::string>();
    const auto* set = find_set(name);
    if (!set) return error_reply(404, "UnknownSet", "no vantage point set named `" + name + "`");
    const auto k = positive_size(doc, "k");
    const auto algo_text = doc.value("algorithm", std::string("greedy"));
    const auto algorithm = parse_subsample_algorithm(algo_text);
    if (!algorithm || *algorithm == SubsampleAlgorithm::Random)
      throw Error(ErrorCode::InvalidConfig, "algorithm must be greedy or sorting");
    if (*algorithm == SubsampleAlgorithm::Greedy && set->members.size() > config_.greedy_cap)
      return error_reply(413, "SetTooLarge",
                         "greedy subsampling is limited to " + std::to_string(config_.greedy_cap) + " members");
    const bool early_exit = doc.value("early_exit", false);
    return ok(subsample_json(table_, population_, set->members, k, *algorithm, early_exit,
                             settings_from(query_from_body(doc))));
  });
}

Reply Service::extend(const std::string& body) const {
  return guarded([&] {
    const auto doc = parse_body(body);
    if (!doc.contains("set") || !doc["set"].is_string())
      throw Error(ErrorCode::MalformedInput, "body must name a `set`");
    const auto name = doc["set"].get<std::string>();
    const auto* set = find_set(name);
    if (!set) return error_reply(404, "UnknownSet", "no vantage point set named `" + name + "`");
    ExtendRequest request;
    request.n = positive_size(doc, "n");
    const auto algorithm = parse_subsample_algorithm(doc.value("algorithm", std::string("sorting")));
    if (!algorithm || *algorithm == SubsampleAlgorithm::Random)
      throw Error(ErrorCode::InvalidConfig, "algorithm must be greedy or sorting");
    request.algorithm = *algorithm;
    request.options.exclude_stubs = doc.value("exclude_stubs", false);
    request.options.stub_dimension = doc.value("stub_dimension", request.options.stub_dimension);
    if (*algorithm == SubsampleAlgorithm::Greedy && set->members.size() > config_.greedy_cap)
      return error_reply(413, "SetTooLarge",
                         "greedy extension is limited to " + std::to_string(config_.greedy_cap) + " members");
    return ok(extend_json(table_, population_, set->members, std::nullopt, request,
                          settings_from(query_from_body(doc))));
  });
}

Reply Service::distribution(const std::string& name, const std::string& dimension) const {
  const auto* set = find_set(name);
  if (!set) return error_reply(404, "UnknownSet", "no vantage point set named `" + name + "`");
  if (!table_.dimension_index(dimension))
    return error_reply(404, to_string(ErrorCode::UnknownDimension), "no dimension named `" + dimension + "`");
  return guarded([&] { return ok(distribution_pair_json(table_, population_, set->members, dimension, {})); });
}

void mount(httplib::Server& server, const Service& service) {
  auto send = [](httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  };
  auto query_of = [](const httplib::Request& req) {
    Service::Query q;
    for (const auto& [k, v] : req.params) q.emplace(k, v);
    return q;
  };

  server.Get("/sets", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.list_sets());
  });
  server.Get(R"(/bias/([^/]+))", [&service, send, query_of](const httplib::Request& req, httplib::Response& res) {
    send(res, service.bias_of_set(req.matches[1], query_of(req)));
  });
  server.Post("/bias", [&service, send, query_of](const httplib::Request& req, httplib::Response& res) {
    send(res, service.bias_of_body(req.body, query_of(req)));
  });
  server.Post("/subsample", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.subsample(req.body));
  });
  server.Post("/extend", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.extend(req.body));
  });
  server.Get(R"(/distributions/([^/]+)/([^/]+))", [&service, send](const httplib::Request& req,
                                                                     httplib::Response& res) {
    send(res, service.distribution(req.matches[1], req.matches[2]));
  });
  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    res.set_content(json{{"code", "NotFound"}, {"message", "no such endpoint"}}.dump(), "application/json");
  });
}

}  // namespace vpbias::app
