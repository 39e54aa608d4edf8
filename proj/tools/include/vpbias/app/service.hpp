#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "vpbias/app/operations.hpp"
#include "vpbias/feature_table.hpp"

namespace httplib {
class Server;
}

namespace vpbias::app {

struct ServiceConfig {
  std::size_t greedy_cap = 2000;
  unsigned threads = 0;
};

struct Reply {
  int status = 200;
  std::string body;
};

/// Read-only request handlers over a loaded table and named VP sets. Bodies
/// are the same JSON documents the CLI prints.
class Service {
 public:
  using Query = std::map<std::string, std::string>;

  /// `population` empty means every ASN of the table.
  Service(FeatureTable table, std::vector<VantagePointSet> sets, AsnSet population = {}, ServiceConfig config = {});

  /// Loads every `.txt` / `.csv` ASN list in `dir`, skipping `skip` (the table
  /// file when it lives in the same directory).
  static std::vector<VantagePointSet> load_sets(const std::filesystem::path& dir, const FeatureTable& table,
                                                const std::filesystem::path& skip = {});

  Reply list_sets() const;
  Reply bias_of_set(const std::string& set, const Query& query) const;
  Reply bias_of_body(const std::string& body, const Query& query) const;
  Reply subsample(const std::string& body) const;
  Reply extend(const std::string& body) const;
  Reply distribution(const std::string& set, const std::string& dimension) const;

  const FeatureTable& table() const noexcept { return table_; }
  const AsnSet& population() const noexcept { return population_; }

 private:
  const VantagePointSet* find_set(const std::string& name) const;
  BiasSettings settings_from(const Query& query) const;

  FeatureTable table_;
  std::map<std::string, VantagePointSet> sets_;
  AsnSet population_;
  ServiceConfig config_;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::string> cache_;
};

/// Registers the endpoints on `server`.
void mount(httplib::Server& server, const Service& service);

}  // namespace vpbias::app
