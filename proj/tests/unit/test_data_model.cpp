#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "test_util.hpp"
#include "vpbias/complexity.hpp"
#include "vpbias/csv.hpp"

using namespace vpbias;
using testutil::asns;
using testutil::table_from;

TEST_CASE("minimal table loads") {
  auto t = table_from("asn,continent\n1,EU\n2,AS\n");
  CHECK(t.num_rows() == 2);
  REQUIRE(t.num_dimensions() == 1);
  CHECK(t.schema()[0].kind == DimensionKind::Categorical);
  CHECK(t.schema()[0].category == CategoryGroup::Location);
  CHECK(std::get<std::string>(t.cell(*t.row_index(Asn(2)), 0)) == "AS");
}

TEST_CASE("duplicate ASN is rejected") {
  CHECK_ERROR_CODE(table_from("asn,continent\n1,EU\n1,AS\n"), ErrorCode::DuplicateAsn);
}

TEST_CASE("non-numeric value in a numerical column") {
  Schema schema{{"num_neighbors", DimensionKind::Numerical, CategoryGroup::Topology, 10}};
  std::istringstream in("asn,num_neighbors\n1,4\n2,abc\n");
  CHECK_ERROR_CODE(parse_feature_table(in, schema), ErrorCode::TypeMismatch);
}

TEST_CASE("malformed inputs") {
  CHECK_ERROR_CODE(table_from("asn,x\n1,2,3\n"), ErrorCode::MalformedCsv);
  CHECK_ERROR_CODE(table_from("asn,x\n0,2\n"), ErrorCode::MalformedCsv);
  CHECK_ERROR_CODE(table_from("asn,x\nASx,2\n"), ErrorCode::MalformedCsv);
  CHECK_ERROR_CODE(table_from("x,asn\n2,1\n"), ErrorCode::MalformedCsv);
  CHECK_ERROR_CODE(table_from(""), ErrorCode::MalformedCsv);
  CHECK_ERROR_CODE(load_feature_table("/nonexistent/table.csv"), ErrorCode::Io);
}

TEST_CASE("schema inference") {
  auto t = table_from("asn,neighbors_total,mystery,rir_region\n1,3,x,RIPE\n2,,y,ARIN\n3,7.5,,\n");
  const auto& s = t.schema();
  CHECK(s[0].kind == DimensionKind::Numerical);
  CHECK(s[0].category == CategoryGroup::Topology);
  CHECK(s[1].kind == DimensionKind::Categorical);
  CHECK(s[1].category == CategoryGroup::NetworkType);
  CHECK(s[2].category == CategoryGroup::Location);
  CHECK(is_missing(t.cell(1, 0)));
  CHECK(is_missing(t.cell(2, 2)));
  // Same text, same schema.
  CHECK(table_from("asn,neighbors_total,mystery,rir_region\n1,3,x,RIPE\n2,,y,ARIN\n3,7.5,,\n").schema() == s);
}

TEST_CASE("ASN parsing") {
  CHECK(parse_asn("AS64512") == Asn(64512));
  CHECK(parse_asn("as1") == Asn(1));
  CHECK(parse_asn("4294967295") == Asn(4294967295u));
  CHECK_FALSE(parse_asn("4294967296"));
  CHECK_FALSE(parse_asn("0"));
  CHECK_FALSE(parse_asn("-3"));
  CHECK_FALSE(parse_asn(""));
}

TEST_CASE("default schema has 22 dimensions in five groups") {
  const auto& s = default_schema();
  CHECK(s.size() == 22);
  std::map<CategoryGroup, int> per;
  for (const auto& d : s) per[d.category]++;
  CHECK(per.size() == kCategoryGroupCount);
  CHECK(per[CategoryGroup::Location] == 3);
  CHECK(per[CategoryGroup::NetworkSize] == 5);
  CHECK(per[CategoryGroup::Topology] == 4);
  CHECK(per[CategoryGroup::IxpRelated] == 3);
  CHECK(per[CategoryGroup::NetworkType] == 7);
}

TEST_CASE("embedded data matches the data files") {
  const std::filesystem::path dir = VPBIAS_DATA_DIR;
  CHECK(load_schema(dir / "default_schema.csv") == default_schema());
  CHECK(ComplexityScoreTable::load(dir / "complexity_scores.csv") == ComplexityScoreTable::default_table());
}

TEST_CASE("schema validation") {
  std::istringstream dup("name,kind,category,bin_count\na,numerical,Topology,10\na,numerical,Topology,10\n");
  CHECK_ERROR_CODE(parse_schema(dup), ErrorCode::InvalidSchema);
  std::istringstream bad_bins("name,kind,category,bin_count\na,numerical,Topology,0\n");
  CHECK_ERROR_CODE(parse_schema(bad_bins), ErrorCode::InvalidSchema);
  std::istringstream bad_kind("name,kind,category\na,ordinal,Topology\n");
  CHECK_ERROR_CODE(parse_schema(bad_kind), ErrorCode::InvalidSchema);

  std::ostringstream out;
  write_schema(default_schema(), out);
  std::istringstream back(out.str());
  CHECK(parse_schema(back) == default_schema());
}

TEST_CASE("table columns missing from the schema") {
  Schema schema{{"a", DimensionKind::Numerical, CategoryGroup::Topology, 10}};
  std::istringstream in("asn,b\n1,2\n");
  CHECK_ERROR_CODE(parse_feature_table(in, schema), ErrorCode::MalformedCsv);
}

TEST_CASE("vantage point set resolution") {
  auto t = table_from("asn,x\n1,a\n2,b\n3,c\n");
  {
    std::vector<Asn> l{Asn(1), Asn(2)};
    auto r = resolve_set("v", l, t);
    CHECK(r.set.members == asns({1, 2}));
    CHECK(r.unresolved.empty());
  }
  {
    std::vector<Asn> l{Asn(1), Asn(99)};
    auto r = resolve_set("v", l, t);
    CHECK(r.set.members == asns({1}));
    CHECK(r.unresolved == std::vector<Asn>{Asn(99)});
  }
  std::vector<Asn> l{Asn(99)};
  CHECK_ERROR_CODE(resolve_set("v", l, t), ErrorCode::EmptySet);
}

TEST_CASE("ASN list formats") {
  std::istringstream plain("# comment\n1\n\nAS2\n  3  \n");
  CHECK(parse_asn_list(plain) == std::vector<Asn>{Asn(1), Asn(2), Asn(3)});
  std::istringstream csv("name,asn\nx,5\ny,AS6\n");
  CHECK(parse_asn_list(csv) == std::vector<Asn>{Asn(5), Asn(6)});
  std::istringstream bad("1\nfoo\n");
  CHECK_ERROR_CODE(parse_asn_list(bad), ErrorCode::MalformedInput);
}

TEST_CASE("label assignments") {
  {
    std::istringstream in("asn,label\n1,Personal-use\n1,Education\n");
    auto a = parse_labels(in);
    REQUIRE(a.size() == 1);
    CHECK(a[0].labels == std::set<std::string>{"Education", "Personal-use"});
  }
  {
    std::istringstream in("asn,label\n1,Personal-use\n2,State-owned\n");
    CHECK(parse_labels(in).size() == 2);
  }
  std::istringstream in("asn,label\n1,NoSuchLabel\n");
  auto a = parse_labels(in);
  CHECK_ERROR_CODE(validate_labels(a, ComplexityScoreTable::default_table()), ErrorCode::UnknownLabel);
}

TEST_CASE("CSV round trip preserves every cell") {
  std::mt19937_64 g(42);
  Schema schema{{"num", DimensionKind::Numerical, CategoryGroup::Topology, 10},
                {"cat", DimensionKind::Categorical, CategoryGroup::Location, 10},
                {"odd", DimensionKind::Categorical, CategoryGroup::NetworkType, 10}};
  std::vector<FeatureTable::Row> rows;
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  const std::vector<std::string> tokens{"EU", "with,comma", "quote\"d", "  padded", "multi\nline"};
  for (std::uint32_t i = 1; i <= 300; ++i) {
    std::vector<Cell> cells;
    cells.emplace_back(g() % 7 == 0 ? Cell{} : Cell{u(g) * std::pow(10.0, static_cast<int>(g() % 20) - 10)});
    cells.emplace_back(g() % 5 == 0 ? Cell{} : Cell{tokens[g() % tokens.size()]});
    cells.emplace_back(g() % 3 == 0 ? Cell{} : Cell{std::string("t") + std::to_string(g() % 4)});
    rows.emplace_back(Asn(static_cast<std::uint32_t>(g() % 4000000000u) + 1), std::move(cells));
  }
  std::sort(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.first < b.first; });
  rows.erase(std::unique(rows.begin(), rows.end(), [](auto& a, auto& b) { return a.first == b.first; }), rows.end());
  std::shuffle(rows.begin(), rows.end(), g);
  const FeatureTable t(schema, rows);

  std::ostringstream out;
  write_feature_table(t, out);
  std::istringstream in(out.str());
  CHECK(parse_feature_table(in, schema) == t);
}

TEST_CASE("csv helpers") {
  CHECK(csv::parse_double("1e3") == 1000.0);
  CHECK(csv::parse_double("+2.5") == 2.5);
  CHECK_FALSE(csv::parse_double("nan"));
  CHECK_FALSE(csv::parse_double("inf"));
  CHECK_FALSE(csv::parse_double("1.5x"));
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::escape("a,b") == "\"a,b\"");
}
